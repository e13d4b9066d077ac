//! Person trips to LDV vehicle-miles to daily EV charging energy.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use chrono::NaiveDate;

use crate::error::{non_negative, Error, Result};
use crate::scalar::Scalar;

/// Trip distance category of the travel survey data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistanceBin {
    Under3Mi,
    From3To100Mi,
    From100To250Mi,
    From250To500Mi,
    Over500Mi,
}

impl DistanceBin {
    pub const ALL: [DistanceBin; 5] = [
        DistanceBin::Under3Mi,
        DistanceBin::From3To100Mi,
        DistanceBin::From100To250Mi,
        DistanceBin::From250To500Mi,
        DistanceBin::Over500Mi,
    ];

    pub fn code(self) -> &'static str {
        match self {
            DistanceBin::Under3Mi => "lt3mi",
            DistanceBin::From3To100Mi => "3to100mi",
            DistanceBin::From100To250Mi => "100to250mi",
            DistanceBin::From250To500Mi => "250to500mi",
            DistanceBin::Over500Mi => "gt500mi",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for DistanceBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for DistanceBin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.code() == s)
            .ok_or_else(|| Error::invalid(format!("unknown distance bin `{s}`")))
    }
}

/// One value per distance bin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BinValues<T>(pub [T; 5]);

impl<T: Scalar> BinValues<T> {
    pub fn splat(v: T) -> Self {
        Self([v; 5])
    }

    pub fn total(&self) -> T {
        self.0.iter().copied().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (DistanceBin, T)> + '_ {
        DistanceBin::ALL.into_iter().zip(self.0.iter().copied())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0.iter()) {
            *o = f(*o, *b);
        }
        out
    }
}

impl<T> Index<DistanceBin> for BinValues<T> {
    type Output = T;
    fn index(&self, bin: DistanceBin) -> &T {
        &self.0[bin.index()]
    }
}

impl<T> IndexMut<DistanceBin> for BinValues<T> {
    fn index_mut(&mut self, bin: DistanceBin) -> &mut T {
        &mut self.0[bin.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DailyTravelRecord<T> {
    pub date: NaiveDate,
    pub person_trips: BinValues<T>,
}

impl<T: Scalar> DailyTravelRecord<T> {
    pub fn new(date: NaiveDate, person_trips: BinValues<T>) -> Result<Self> {
        for (_, v) in person_trips.iter() {
            non_negative("person trips", v)?;
        }
        Ok(Self { date, person_trips })
    }
}

/// Per-bin vehicle-trip multipliers, representative trip lengths and
/// energy intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct TripConversionTable<T> {
    vt_per_pt: BinValues<T>,
    rep_distance_mi: BinValues<T>,
    kwh_per_mi: BinValues<T>,
}

/// Vehicle trips per person trip by distance bin.
pub const VT_PER_PT: [f64; 5] = [0.684, 0.922, 0.515, 0.513, 0.508];
/// Placeholder one-way trip length per bin, miles.
pub const REP_DISTANCE_MI: [f64; 5] = [1.5, 12.0, 160.0, 330.0, 600.0];
pub const DEFAULT_KWH_PER_MI: f64 = 0.30;

impl<T: Scalar> Default for TripConversionTable<T> {
    fn default() -> Self {
        Self {
            vt_per_pt: BinValues(VT_PER_PT.map(T::of)),
            rep_distance_mi: BinValues(REP_DISTANCE_MI.map(T::of)),
            kwh_per_mi: BinValues::splat(T::of(DEFAULT_KWH_PER_MI)),
        }
    }
}

impl<T: Scalar> TripConversionTable<T> {
    pub fn new(vt_per_pt: BinValues<T>, rep_distance_mi: BinValues<T>, kwh_per_mi: BinValues<T>) -> Result<Self> {
        for (bin, m) in vt_per_pt.iter() {
            if !(m >= T::zero() && m <= T::one()) {
                return Err(Error::invalid(format!(
                    "multiplier for {bin} must lie in [0, 1], got {m}"
                )));
            }
        }
        if rep_distance_mi.0.windows(2).any(|w| !(w[0] < w[1])) || !(rep_distance_mi.0[0] > T::zero()) {
            return Err(Error::invalid(
                "representative distances must be positive and strictly increasing across bins",
            ));
        }
        for (bin, k) in kwh_per_mi.iter() {
            if !(k > T::zero() && k.is_finite()) {
                return Err(Error::invalid(format!("mileage for {bin} must be positive, got {k}")));
            }
        }
        Ok(Self {
            vt_per_pt,
            rep_distance_mi,
            kwh_per_mi,
        })
    }

    /// Default multipliers and distances with one mileage for every bin.
    pub fn with_uniform_mileage(kwh_per_mi: T) -> Result<Self> {
        let d = Self::default();
        Self::new(d.vt_per_pt, d.rep_distance_mi, BinValues::splat(kwh_per_mi))
    }

    pub fn with_mileage(mut self, bin: DistanceBin, kwh_per_mi: T) -> Result<Self> {
        self.kwh_per_mi[bin] = kwh_per_mi;
        Self::new(self.vt_per_pt, self.rep_distance_mi, self.kwh_per_mi)
    }

    pub fn with_distance(mut self, bin: DistanceBin, miles: T) -> Result<Self> {
        self.rep_distance_mi[bin] = miles;
        Self::new(self.vt_per_pt, self.rep_distance_mi, self.kwh_per_mi)
    }

    pub fn vt_per_pt(&self) -> &BinValues<T> {
        &self.vt_per_pt
    }

    pub fn rep_distance_mi(&self) -> &BinValues<T> {
        &self.rep_distance_mi
    }

    pub fn kwh_per_mi(&self) -> &BinValues<T> {
        &self.kwh_per_mi
    }
}

pub fn person_trips_to_vehicle_trips<T: Scalar>(
    record: &DailyTravelRecord<T>,
    table: &TripConversionTable<T>,
) -> BinValues<T> {
    record.person_trips.zip_with(&table.vt_per_pt, |t, m| t * m)
}

pub fn ldv_miles_by_bin<T: Scalar>(vehicle_trips: &BinValues<T>, table: &TripConversionTable<T>) -> BinValues<T> {
    vehicle_trips.zip_with(&table.rep_distance_mi, |t, d| t * d)
}

pub fn daily_ldv_miles<T: Scalar>(vehicle_trips: &BinValues<T>, table: &TripConversionTable<T>) -> T {
    ldv_miles_by_bin(vehicle_trips, table).total()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvEnergy<T> {
    pub per_bin: BinValues<T>,
    pub total: T,
}

/// `miles * ev_fraction * kWh/mile`, bin by bin.
pub fn daily_ev_energy<T: Scalar>(
    miles_by_bin: &BinValues<T>,
    ev_fraction: T,
    table: &TripConversionTable<T>,
) -> Result<EvEnergy<T>> {
    if !(ev_fraction >= T::zero() && ev_fraction <= T::one()) {
        return Err(Error::invalid(format!(
            "EV fraction must lie in [0, 1], got {ev_fraction}"
        )));
    }
    let per_bin = miles_by_bin.zip_with(&table.kwh_per_mi, |m, k| m * ev_fraction * k);
    Ok(EvEnergy {
        total: per_bin.total(),
        per_bin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DailyEnergyDemand<T> {
    pub date: NaiveDate,
    pub ldv_miles: T,
    /// kWh
    pub ev_energy: T,
}

/// Runs the conversion chain for each day independently.
pub fn daily_energy_demand<T: Scalar>(
    travel: &[DailyTravelRecord<T>],
    table: &TripConversionTable<T>,
    ev_fraction: T,
) -> Result<Vec<DailyEnergyDemand<T>>> {
    travel
        .iter()
        .map(|rec| {
            let vt = person_trips_to_vehicle_trips(rec, table);
            let miles = ldv_miles_by_bin(&vt, table);
            let energy = daily_ev_energy(&miles, ev_fraction, table)?;
            Ok(DailyEnergyDemand {
                date: rec.date,
                ldv_miles: miles.total(),
                ev_energy: energy.total,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn day(trips: [f64; 5]) -> DailyTravelRecord<f64> {
        DailyTravelRecord::new(NaiveDate::from_ymd_opt(2019, 3, 1).unwrap(), BinValues(trips)).unwrap()
    }

    #[test]
    fn short_bin_multiplier() {
        let vt = person_trips_to_vehicle_trips(&day([1000.0, 0.0, 0.0, 0.0, 0.0]), &TripConversionTable::default());
        assert_relative_eq!(vt[DistanceBin::Under3Mi], 684.0, epsilon = 1e-9);
    }

    #[test]
    fn all_bin_multipliers() {
        let vt = person_trips_to_vehicle_trips(&day([1000.0; 5]), &TripConversionTable::default());
        let expected = [684.0, 922.0, 515.0, 513.0, 508.0];
        for (got, want) in vt.0.iter().zip(expected) {
            assert_relative_eq!(*got, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn zero_record() {
        let table = TripConversionTable::default();
        let vt = person_trips_to_vehicle_trips(&day([0.0; 5]), &table);
        assert_eq!(vt, BinValues::splat(0.0));
        assert_eq!(daily_ldv_miles(&vt, &table), 0.0);
    }

    #[test]
    fn single_term_miles() {
        let vt = BinValues([0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(daily_ldv_miles(&vt, &TripConversionTable::default()), 12.0);
    }

    #[test]
    fn mixed_bin_miles_match_spreadsheet_sum() {
        let table = TripConversionTable::default();
        let vt = BinValues([10.0, 20.0, 3.0, 2.0, 1.0]);
        // spreadsheet column: 10*1.5 + 20*12 + 3*160 + 2*330 + 1*600
        let oracle = 15.0 + 240.0 + 480.0 + 660.0 + 600.0;
        assert_eq!(daily_ldv_miles(&vt, &table), oracle);
    }

    #[test]
    fn unit_energy() {
        let table = TripConversionTable::with_uniform_mileage(0.30).unwrap();
        let miles = BinValues([0.0, 100.0, 0.0, 0.0, 0.0]);
        let e = daily_ev_energy(&miles, 1.0, &table).unwrap();
        assert_relative_eq!(e.total, 30.0, epsilon = 1e-12);
        assert_eq!(daily_ev_energy(&miles, 0.0, &table).unwrap().total, 0.0);
    }

    #[test]
    fn per_bin_mileage_differs_from_average() {
        let table = TripConversionTable::<f64>::with_uniform_mileage(0.28)
            .unwrap()
            .with_mileage(DistanceBin::From100To250Mi, 0.34)
            .unwrap();
        let miles = BinValues([0.0, 100.0, 200.0, 0.0, 0.0]);
        let e = daily_ev_energy(&miles, 1.0, &table).unwrap();
        // 100 * 0.28 + 200 * 0.34 = 96; single average mileage 0.31 gives 93
        assert_relative_eq!(e.total, 96.0, epsilon = 1e-12);
        assert!((e.total - 300.0 * 0.31).abs() > 1.0);
        let flat = TripConversionTable::with_uniform_mileage(0.31).unwrap();
        assert_relative_eq!(
            daily_ev_energy(&miles, 1.0, &flat).unwrap().total,
            93.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn table_validation() {
        let d = TripConversionTable::<f64>::default();
        assert!(d.clone().with_mileage(DistanceBin::Over500Mi, 0.0).is_err());
        assert!(d.clone().with_distance(DistanceBin::From100To250Mi, 5.0).is_err());
        let mut bad = *d.vt_per_pt();
        bad[DistanceBin::Under3Mi] = 1.2;
        assert!(TripConversionTable::new(bad, *d.rep_distance_mi(), *d.kwh_per_mi()).is_err());
        assert!(DailyTravelRecord::new(NaiveDate::MIN, BinValues([-1.0, 0.0, 0.0, 0.0, 0.0])).is_err());
        assert!(daily_ev_energy(&BinValues::splat(1.0), 1.5, &d).is_err());
    }

    #[test]
    fn bin_codes_round_trip() {
        for b in DistanceBin::ALL {
            assert_eq!(b.code().parse::<DistanceBin>().unwrap(), b);
        }
        assert!("5to10mi".parse::<DistanceBin>().is_err());
    }

    #[test]
    fn days_are_not_smoothed() {
        let table = TripConversionTable::default();
        let recs = vec![day([100.0; 5]), day([300.0, 10.0, 0.0, 0.0, 7.0])];
        let out = daily_energy_demand(&recs, &table, 0.2).unwrap();
        for (rec, d) in recs.iter().zip(&out) {
            let vt = person_trips_to_vehicle_trips(rec, &table);
            let single = daily_ev_energy(&ldv_miles_by_bin(&vt, &table), 0.2, &table).unwrap();
            assert_eq!(d.ev_energy, single.total);
        }
    }

    proptest! {
        #[test]
        fn energy_linear_in_ev_fraction(
            miles in proptest::array::uniform5(0.0f64..1.0e8),
            x in 0.0f64..0.5,
        ) {
            let table = TripConversionTable::default();
            let m = BinValues(miles);
            let one = daily_ev_energy(&m, x, &table).unwrap().total;
            let two = daily_ev_energy(&m, 2.0 * x, &table).unwrap().total;
            prop_assert!((two - 2.0 * one).abs() <= 1e-12 * two.abs().max(1.0));
        }

        #[test]
        fn vehicle_trips_bounded_by_person_trips(trips in proptest::array::uniform5(0.0f64..1.0e9)) {
            let vt = person_trips_to_vehicle_trips(&day(trips), &TripConversionTable::default());
            for (v, p) in vt.0.iter().zip(trips) {
                prop_assert!(*v <= p);
            }
        }

        #[test]
        fn two_day_window_is_additive(
            a in proptest::array::uniform5(0.0f64..1.0e7),
            b in proptest::array::uniform5(0.0f64..1.0e7),
            x in 0.0f64..=1.0,
        ) {
            let table = TripConversionTable::default();
            let days = daily_energy_demand(&[day(a), day(b)], &table, x).unwrap();
            let window: f64 = days.iter().map(|d| d.ev_energy).sum();
            let sep = daily_energy_demand(&[day(a)], &table, x).unwrap()[0].ev_energy
                + daily_energy_demand(&[day(b)], &table, x).unwrap()[0].ev_energy;
            prop_assert_eq!(window, sep);
        }
    }
}
