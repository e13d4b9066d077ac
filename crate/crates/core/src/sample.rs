//! Synthetic sample dataset and its calibration.
//!
//! The shipped `data/sample` files are produced by [`generate`]. Load, travel
//! and profile shapes are analytic (no randomness); two numbers are then
//! solved for so the bundle reproduces the headline aggregates:
//!
//! * the unmanaged profile's 18:00 share is set so that one percentage point
//!   of EV share adds `plif_target` percent to the annual peak, and
//! * the managed profile's 18:00 share is set to `managed_factor` times the
//!   unmanaged one.
//!
//! Both hold exactly while the combined peak stays on the baseline peak hour,
//! which [`generate`] checks: the baseline peaks at 18:00 on the day with the
//! most travel, every day's load is highest at 18:00, and the unmanaged
//! profile also peaks at 18:00.

use std::f64::consts::PI;
use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};

use crate::charging::{
    build_managed_profile, days_in_year, year_start, ChargingProfile, HourlyLoadSeries, ManagedStrategy, ProfileLabel,
    HOURS_PER_DAY,
};
use crate::error::{Error, Result};
use crate::fleet::IncentiveCoefficients;
use crate::grid::{find_peak, DEFAULT_MANAGED_FACTOR, REFERENCE_PLIF};
use crate::io;
use crate::scenario::DatasetBundle;
use crate::travel::{daily_energy_demand, BinValues, DailyTravelRecord, DistanceBin, TripConversionTable};

pub const SAMPLE_YEAR: i32 = 2019;
/// Friday 16 August, zero-based day of year.
pub const PEAK_DAY_INDEX: usize = 227;
pub const PEAK_HOUR: usize = 18;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpec {
    pub year: i32,
    pub plif_target: f64,
    pub managed_factor: f64,
    /// statewide person trips on an ordinary weekday, per bin
    pub weekday_person_trips: [f64; 5],
    /// shape used for the managed profile before its 18:00 share is pinned
    pub managed_shape: ManagedStrategy<f64>,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            year: SAMPLE_YEAR,
            plif_target: REFERENCE_PLIF,
            managed_factor: DEFAULT_MANAGED_FACTOR,
            weekday_person_trips: [40.0e6, 48.0e6, 0.60e6, 0.15e6, 0.05e6],
            managed_shape: ManagedStrategy::new(5.0, 0.30, 0.20),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub peak_load_mw: f64,
    pub peak_index: usize,
    /// full-electrification charging energy on the peak day, kWh
    pub peak_day_energy_kwh: f64,
    pub unmanaged_peak_fraction: f64,
    pub managed_peak_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct SampleDataset {
    pub bundle: DatasetBundle,
    pub calibration: Calibration,
}

fn seasonal(day: f64, centre: f64) -> f64 {
    (1.0 + (2.0 * PI * (day - centre) / 365.0).cos()) / 2.0
}

fn holiday(year: i32, date: NaiveDate) -> bool {
    let fixed = [(1, 1), (7, 4), (12, 25)];
    if fixed.iter().any(|&(m, d)| date.month() == m && date.day() == d) {
        return true;
    }
    let nth = |month, weekday, n| NaiveDate::from_weekday_of_month_opt(year, month, weekday, n);
    let last_monday_may = (1..=5)
        .rev()
        .find_map(|n| nth(5, Weekday::Mon, n))
        .expect("May has Mondays");
    [Some(last_monday_may), nth(9, Weekday::Mon, 1), nth(11, Weekday::Thu, 4)].contains(&Some(date))
}

fn load_weekday_factor(date: NaiveDate, is_holiday: bool) -> f64 {
    if is_holiday {
        return 0.92;
    }
    match date.weekday() {
        Weekday::Sat => 0.93,
        Weekday::Sun => 0.90,
        _ => 1.0,
    }
}

fn travel_weekday_factor(date: NaiveDate) -> f64 {
    match date.weekday() {
        Weekday::Mon => 0.98,
        Weekday::Tue => 0.99,
        Weekday::Wed => 1.00,
        Weekday::Thu => 1.01,
        Weekday::Fri => 1.06,
        Weekday::Sat => 0.94,
        Weekday::Sun => 0.86,
    }
}

/// Hourly baseline, MW, rounded to 0.1 MW.
pub fn baseline_load(year: i32) -> HourlyLoadSeries<f64> {
    let first = NaiveDate::from_ymd_opt(year, 1, 1).expect("valid year");
    let mut values = Vec::with_capacity(days_in_year(year) * HOURS_PER_DAY);
    for (d, date) in first.iter_days().take(days_in_year(year)).enumerate() {
        let day = d as f64;
        let cooling = seasonal(day, PEAK_DAY_INDEX as f64).powi(2);
        let heating = seasonal(day, 15.0).powi(6);
        let heatwave = (-((day - PEAK_DAY_INDEX as f64) / 2.5).powi(2)).exp();
        let base_level = 36_000.0 + 9_000.0 * cooling + 4_000.0 * heating;
        let evening_amp = 9_000.0 + 17_000.0 * cooling + 3_000.0 * heatwave;
        let morning_amp = 3_500.0 * heating;
        let factor = load_weekday_factor(date, holiday(year, date));
        for h in 0..HOURS_PER_DAY {
            let hour = h as f64;
            let night = 1.0 - 0.12 * (-((hour - 4.0) / 3.0).powi(2)).exp();
            let evening = (-((hour - PEAK_HOUR as f64) / 3.5).powi(2)).exp();
            let morning = (-((hour - 7.0) / 2.0).powi(2)).exp();
            let mw = factor * (base_level * night + evening_amp * evening + morning_amp * morning);
            values.push((mw * 10.0).round() / 10.0);
        }
    }
    HourlyLoadSeries::new(year_start(year), values).expect("synthetic load is non-negative")
}

/// Daily person trips, whole trips only.
pub fn travel_records(spec: &SampleSpec) -> Vec<DailyTravelRecord<f64>> {
    let first = NaiveDate::from_ymd_opt(spec.year, 1, 1).expect("valid year");
    let thanksgiving = NaiveDate::from_weekday_of_month_opt(spec.year, 11, Weekday::Thu, 4);
    first
        .iter_days()
        .take(days_in_year(spec.year))
        .enumerate()
        .map(|(d, date)| {
            let season = 1.0 + 0.04 * (2.0 * PI * (d as f64 - PEAK_DAY_INDEX as f64) / 365.0).cos();
            let weekday = travel_weekday_factor(date);
            let near_thanksgiving = thanksgiving.is_some_and(|t| (date - t).num_days().abs() == 1);
            let (local, long) = if holiday(spec.year, date) {
                (0.80, 2.5)
            } else if near_thanksgiving {
                (0.95, 1.3)
            } else {
                (1.0, 1.0)
            };
            let mut trips = BinValues::splat(0.0);
            for bin in DistanceBin::ALL {
                let mode = if bin <= DistanceBin::From3To100Mi { local } else { long };
                trips[bin] = (spec.weekday_person_trips[bin.index()] * season * weekday * mode).round();
            }
            DailyTravelRecord::new(date, trips).expect("synthetic trips are non-negative")
        })
        .collect()
}

/// Return-home evening peak at 18:00, an overnight tail and some daytime
/// public charging.
pub fn unmanaged_shape() -> ChargingProfile<f64> {
    let circ = |a: usize, b: usize| {
        let d = a.abs_diff(b) % HOURS_PER_DAY;
        d.min(HOURS_PER_DAY - d) as f64
    };
    let mut w = [0.0; HOURS_PER_DAY];
    for (h, v) in w.iter_mut().enumerate() {
        let daytime = if (8..17).contains(&h) { 0.10 } else { 0.0 };
        *v = 0.03 + (-(circ(h, PEAK_HOUR) / 1.3).powi(2)).exp() + 0.5 * (-(circ(h, 22) / 3.0).powi(2)).exp() + daytime;
    }
    ChargingProfile::from_weights(ProfileLabel::Unmanaged, w).expect("positive weights")
}

pub fn generate(spec: &SampleSpec) -> Result<SampleDataset> {
    let load = baseline_load(spec.year);
    let travel = travel_records(spec);
    let table = TripConversionTable::<f64>::default();

    let peak = find_peak(&load)?;
    let (peak_day, peak_hour) = (peak.index / HOURS_PER_DAY, peak.index % HOURS_PER_DAY);
    if peak_hour != PEAK_HOUR {
        return Err(Error::invalid(format!("synthetic baseline peaks at hour {peak_hour}")));
    }
    for (d, day) in load.values().chunks(HOURS_PER_DAY).enumerate() {
        if day
            .iter()
            .enumerate()
            .any(|(h, v)| *v > day[PEAK_HOUR] && h != PEAK_HOUR)
        {
            return Err(Error::invalid(format!(
                "day {d} of the synthetic baseline peaks off 18:00"
            )));
        }
    }

    let full = daily_energy_demand(&travel, &table, 1.0)?;
    let peak_energy = full[peak_day].ev_energy;
    if let Some(d) = full.iter().position(|d| d.ev_energy > peak_energy) {
        return Err(Error::invalid(format!(
            "day {} has more charging energy than the peak day",
            full[d].date
        )));
    }

    // PLIF = (peak-day kWh * f_18 / 1000) / PL, per unit EV fraction
    let unmanaged_fraction = spec.plif_target * peak.load * 1000.0 / peak_energy;
    let unmanaged = unmanaged_shape().with_hour_share(PEAK_HOUR, unmanaged_fraction)?;
    if unmanaged.peak_hour() != PEAK_HOUR {
        return Err(Error::invalid(format!(
            "calibrated unmanaged profile peaks at hour {}",
            unmanaged.peak_hour()
        )));
    }
    let managed_fraction = spec.managed_factor * unmanaged_fraction;
    let managed = build_managed_profile(&unmanaged_shape(), &spec.managed_shape)?
        .with_hour_share(PEAK_HOUR, managed_fraction)?
        .relabel(ProfileLabel::Managed);

    Ok(SampleDataset {
        calibration: Calibration {
            peak_load_mw: peak.load,
            peak_index: peak.index,
            peak_day_energy_kwh: peak_energy,
            unmanaged_peak_fraction: unmanaged_fraction,
            managed_peak_fraction: managed_fraction,
        },
        bundle: DatasetBundle::new(load, travel, unmanaged, managed)?,
    })
}

impl SampleDataset {
    /// Writes the four dataset files plus the default incentive
    /// coefficients and conversion table.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let paths = crate::scenario::DatasetPaths::in_dir(dir);
        io::write_load_csv(&paths.load, &self.bundle.baseline_load)?;
        io::write_travel_csv(&paths.travel, &self.bundle.travel)?;
        io::write_profile_csv(&paths.profile_unmanaged, &self.bundle.profile_unmanaged)?;
        io::write_profile_csv(&paths.profile_managed, &self.bundle.profile_managed)?;
        io::write_incentive_coefficients(
            &dir.join("incentive_coefficients.csv"),
            &IncentiveCoefficients::<f64>::default(),
        )?;
        io::write_conversion_table(&dir.join("conversion.csv"), &TripConversionTable::<f64>::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holidays_2019() {
        let d = |m, day| NaiveDate::from_ymd_opt(2019, m, day).unwrap();
        for date in [d(1, 1), d(5, 27), d(7, 4), d(9, 2), d(11, 28), d(12, 25)] {
            assert!(holiday(2019, date), "{date}");
        }
        assert!(!holiday(2019, d(8, 16)));
    }

    #[test]
    fn peak_day_is_friday_in_august() {
        let date = NaiveDate::from_ymd_opt(SAMPLE_YEAR, 1, 1).unwrap() + chrono::Duration::days(PEAK_DAY_INDEX as i64);
        assert_eq!(date, NaiveDate::from_ymd_opt(2019, 8, 16).unwrap());
        assert_eq!(date.weekday(), Weekday::Fri);
    }

    #[test]
    fn default_spec_calibrates() {
        let s = generate(&SampleSpec::default()).unwrap();
        let c = &s.calibration;
        assert_eq!(c.peak_index, PEAK_DAY_INDEX * 24 + PEAK_HOUR);
        assert!(c.managed_peak_fraction < c.unmanaged_peak_fraction);
        assert_eq!(s.bundle.profile_unmanaged.peak_hour(), PEAK_HOUR);
    }
}
