//! Hourly charging profiles and EV load series.

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, NaiveTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{clamp, Scalar};
use crate::travel::DailyEnergyDemand;

pub const HOURS_PER_DAY: usize = 24;

/// Return-home charging window shifted by a delay, `[start, end)`.
pub const EVENING_WINDOW: (usize, usize) = (16, 22);
/// Hours receiving workplace charging, `[start, end)`.
pub const WORKPLACE_WINDOW: (usize, usize) = (9, 16);
pub const MAX_DELAY_HOURS: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileLabel {
    Unmanaged,
    Managed,
    Custom,
}

/// Share of a day's charging energy drawn in each clock hour.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargingProfile<T> {
    label: ProfileLabel,
    fractions: [T; HOURS_PER_DAY],
}

impl<T: Scalar> ChargingProfile<T> {
    pub fn new(label: ProfileLabel, fractions: [T; HOURS_PER_DAY]) -> Result<Self> {
        for (hour, f) in fractions.iter().enumerate() {
            if !(f.is_finite() && *f >= T::zero()) {
                return Err(Error::ProfileNegative {
                    hour,
                    value: f.as_f64(),
                });
            }
        }
        let sum: T = fractions.iter().copied().sum();
        if (sum.as_f64() - 1.0).abs() > T::NORMALIZATION_TOL {
            return Err(Error::ProfileNotNormalized { sum: sum.as_f64() });
        }
        Ok(Self { label, fractions })
    }

    /// Scales non-negative weights to unit mass.
    pub fn from_weights(label: ProfileLabel, weights: [T; HOURS_PER_DAY]) -> Result<Self> {
        let sum: T = weights.iter().copied().sum();
        if !(sum > T::zero()) {
            return Err(Error::invalid("profile weights sum to zero"));
        }
        Self::new(label, weights.map(|w| w / sum))
    }

    pub fn uniform(label: ProfileLabel) -> Self {
        Self {
            label,
            fractions: [T::one() / T::of_usize(HOURS_PER_DAY); HOURS_PER_DAY],
        }
    }

    /// All energy in one hour.
    pub fn delta(label: ProfileLabel, hour: usize) -> Self {
        let mut fractions = [T::zero(); HOURS_PER_DAY];
        fractions[hour % HOURS_PER_DAY] = T::one();
        Self { label, fractions }
    }

    pub fn label(&self) -> ProfileLabel {
        self.label
    }

    pub fn fractions(&self) -> &[T; HOURS_PER_DAY] {
        &self.fractions
    }

    pub fn fraction(&self, hour: usize) -> T {
        self.fractions[hour % HOURS_PER_DAY]
    }

    /// Hour with the largest share, earliest on ties.
    pub fn peak_hour(&self) -> usize {
        let mut best = 0;
        for h in 1..HOURS_PER_DAY {
            if self.fractions[h] > self.fractions[best] {
                best = h;
            }
        }
        best
    }

    /// Pins `hour` to `share` and rescales the other hours to fill the rest.
    pub fn with_hour_share(&self, hour: usize, share: T) -> Result<Self> {
        if !(share >= T::zero() && share <= T::one()) {
            return Err(Error::invalid(format!("hour share {share} outside [0, 1]")));
        }
        let hour = hour % HOURS_PER_DAY;
        let rest: T = (0..HOURS_PER_DAY)
            .filter(|&h| h != hour)
            .map(|h| self.fractions[h])
            .sum();
        if !(rest > T::zero()) && share < T::one() {
            return Err(Error::invalid("no mass outside the pinned hour to rescale"));
        }
        let mut fractions = [T::zero(); HOURS_PER_DAY];
        for (h, f) in fractions.iter_mut().enumerate() {
            *f = if h == hour {
                share
            } else {
                self.fractions[h] * (T::one() - share) / rest
            };
        }
        Self::new(self.label, fractions)
    }

    pub fn relabel(mut self, label: ProfileLabel) -> Self {
        self.label = label;
        self
    }
}

/// Parameters of the what-if managed-charging transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManagedStrategy<T> {
    /// hours, clamped to `[0, 12]`
    pub delay_hours: T,
    /// fraction of daily energy moved into the workplace window
    pub workplace_share: T,
    /// blend weight toward a uniform profile
    pub spread_weight: T,
}

impl<T: Scalar> ManagedStrategy<T> {
    pub fn new(delay_hours: T, workplace_share: T, spread_weight: T) -> Self {
        Self {
            delay_hours,
            workplace_share,
            spread_weight,
        }
        .clamped()
    }

    pub fn none() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn clamped(self) -> Self {
        let nan_to_zero = |v: T| if v.is_nan() { T::zero() } else { v };
        Self {
            delay_hours: clamp(nan_to_zero(self.delay_hours), T::zero(), T::of(MAX_DELAY_HOURS)),
            workplace_share: clamp(nan_to_zero(self.workplace_share), T::zero(), T::one()),
            spread_weight: clamp(nan_to_zero(self.spread_weight), T::zero(), T::one()),
        }
    }
}

pub fn distribute_daily_energy<T: Scalar>(daily_kwh: T, profile: &ChargingProfile<T>) -> [T; HOURS_PER_DAY] {
    profile.fractions.map(|f| daily_kwh * f)
}

/// Delay, then workplace reallocation, then uniform blend.
pub fn build_managed_profile<T: Scalar>(
    base: &ChargingProfile<T>,
    strategy: &ManagedStrategy<T>,
) -> Result<ChargingProfile<T>> {
    let s = strategy.clamped();
    let mut mass = base.fractions;

    if s.delay_hours > T::zero() {
        let whole = s.delay_hours.floor();
        let part = s.delay_hours - whole;
        let shift = whole.as_f64() as usize;
        let mut shifted = mass;
        for h in EVENING_WINDOW.0..EVENING_WINDOW.1 {
            shifted[h] -= mass[h];
        }
        for h in EVENING_WINDOW.0..EVENING_WINDOW.1 {
            let m = mass[h];
            shifted[(h + shift) % HOURS_PER_DAY] += m * (T::one() - part);
            shifted[(h + shift + 1) % HOURS_PER_DAY] += m * part;
        }
        mass = shifted.map(|v| v.max(T::zero()));
    }

    if s.workplace_share > T::zero() {
        let total: T = mass.iter().copied().sum();
        let moved = total * s.workplace_share;
        let slots = T::of_usize(WORKPLACE_WINDOW.1 - WORKPLACE_WINDOW.0);
        for v in mass.iter_mut() {
            *v *= T::one() - s.workplace_share;
        }
        for v in &mut mass[WORKPLACE_WINDOW.0..WORKPLACE_WINDOW.1] {
            *v += moved / slots;
        }
    }

    if s.spread_weight > T::zero() {
        let total: T = mass.iter().copied().sum();
        let flat = total / T::of_usize(HOURS_PER_DAY);
        for v in mass.iter_mut() {
            *v = (T::one() - s.spread_weight) * *v + s.spread_weight * flat;
        }
    }

    let label = if *strategy == ManagedStrategy::none() {
        base.label
    } else {
        ProfileLabel::Managed
    };
    ChargingProfile::from_weights(label, mass)
}

/// Hourly load on a uniform one-hour grid, MW.
#[derive(Debug, Clone, PartialEq)]
pub struct HourlyLoadSeries<T> {
    start: NaiveDateTime,
    values: Vec<T>,
}

impl<T: Scalar> HourlyLoadSeries<T> {
    pub fn new(start: NaiveDateTime, values: Vec<T>) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            if !(v.is_finite() && *v >= T::zero()) {
                return Err(Error::invalid(format!(
                    "load at {} is {v}",
                    start + Duration::hours(i as i64)
                )));
            }
        }
        Ok(Self { start, values })
    }

    /// Zero load for every hour of `year`.
    pub fn zeros_for_year(year: i32) -> Self {
        let start = year_start(year);
        Self {
            start,
            values: vec![T::zero(); hours_in_year(year)],
        }
    }

    pub fn start(&self) -> NaiveDateTime {
        self.start
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn timestamp(&self, index: usize) -> NaiveDateTime {
        self.start + Duration::hours(index as i64)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.start == other.start && self.values.len() == other.values.len()
    }

    pub fn scaled(&self, k: T) -> Self {
        Self {
            start: self.start,
            values: self.values.iter().map(|v| *v * k).collect(),
        }
    }

    /// MWh over the whole series.
    pub fn total_energy(&self) -> T {
        self.values.iter().copied().sum()
    }
}

pub(crate) fn year_start(year: i32) -> NaiveDateTime {
    NaiveDate::from_ymd_opt(year, 1, 1)
        .expect("valid year")
        .and_time(NaiveTime::MIN)
}

pub fn days_in_year(year: i32) -> usize {
    if NaiveDate::from_ymd_opt(year, 2, 29).is_some() {
        366
    } else {
        365
    }
}

pub fn hours_in_year(year: i32) -> usize {
    days_in_year(year) * HOURS_PER_DAY
}

/// Spreads each day's kWh over its hours; kWh in a 1-hour bin / 1000 = MW.
pub fn fleet_hourly_load<T: Scalar>(
    daily: &[DailyEnergyDemand<T>],
    profile: &ChargingProfile<T>,
    sample_year: i32,
) -> Result<HourlyLoadSeries<T>> {
    let first = NaiveDate::from_ymd_opt(sample_year, 1, 1).expect("valid year");
    let days = days_in_year(sample_year);
    let kw_per_mw = T::of(1000.0);
    let mut values = Vec::with_capacity(days * HOURS_PER_DAY);
    for (i, expected) in first.iter_days().take(days).enumerate() {
        let Some(d) = daily.get(i) else {
            return Err(Error::MissingDay(expected));
        };
        if d.date != expected {
            return Err(if d.date < expected {
                Error::DuplicateDay(d.date)
            } else {
                Error::MissingDay(expected)
            });
        }
        values.extend(distribute_daily_energy(d.ev_energy, profile).map(|kwh| kwh / kw_per_mw));
    }
    if let Some(extra) = daily.get(days) {
        if extra.date.year() == sample_year {
            return Err(Error::DuplicateDay(extra.date));
        }
        return Err(Error::invalid(format!(
            "daily energy for {} lies outside sample year {sample_year}",
            extra.date
        )));
    }
    HourlyLoadSeries::new(year_start(sample_year), values)
}

/// Pointwise sum of two series on the same grid.
pub fn superpose<T: Scalar>(baseline: &HourlyLoadSeries<T>, ev: &HourlyLoadSeries<T>) -> Result<HourlyLoadSeries<T>> {
    if !baseline.same_grid(ev) {
        return Err(Error::GridMismatch);
    }
    Ok(HourlyLoadSeries {
        start: baseline.start,
        values: baseline.values.iter().zip(&ev.values).map(|(a, b)| *a + *b).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn peaked_at(hour: usize) -> ChargingProfile<f64> {
        let mut w = [0.01; HOURS_PER_DAY];
        w[hour] = 0.5;
        w[hour - 1] = 0.2;
        w[hour + 1] = 0.2;
        ChargingProfile::from_weights(ProfileLabel::Unmanaged, w).unwrap()
    }

    #[test]
    fn uniform_distribution() {
        let out = distribute_daily_energy(24.0, &ChargingProfile::uniform(ProfileLabel::Custom));
        for v in out {
            assert_relative_eq!(v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_distribution() {
        let out = distribute_daily_energy(37.5, &ChargingProfile::delta(ProfileLabel::Custom, 18));
        assert_eq!(out[18], 37.5);
        assert_eq!(out.iter().sum::<f64>(), 37.5);
    }

    #[test]
    fn conservation_on_peaked_profile() {
        let out = distribute_daily_energy(1000.0, &peaked_at(18));
        assert_relative_eq!(out.iter().sum::<f64>(), 1000.0, epsilon = 1e-6);
    }

    #[test]
    fn normalization_errors() {
        let mut f = [1.0 / 24.0; HOURS_PER_DAY];
        f[0] -= 0.03;
        assert!(matches!(
            ChargingProfile::new(ProfileLabel::Custom, f),
            Err(Error::ProfileNotNormalized { .. })
        ));
        let mut g = [1.0 / 24.0; HOURS_PER_DAY];
        g[7] = -0.0001;
        g[8] += 0.0001;
        assert!(matches!(
            ChargingProfile::new(ProfileLabel::Custom, g),
            Err(Error::ProfileNegative { hour: 7, .. })
        ));
    }

    #[test]
    fn zero_strategy_is_identity() {
        let base = peaked_at(18);
        let out = build_managed_profile(&base, &ManagedStrategy::none()).unwrap();
        for (a, b) in out.fractions().iter().zip(base.fractions()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-15);
        }
    }

    #[test]
    fn full_spread_is_uniform() {
        let out = build_managed_profile(&peaked_at(18), &ManagedStrategy::new(0.0, 0.0, 1.0)).unwrap();
        for v in out.fractions() {
            assert_relative_eq!(*v, 1.0 / 24.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn delay_moves_evening_peak() {
        let base = peaked_at(18);
        let out = build_managed_profile(&base, &ManagedStrategy::new(4.0, 0.0, 0.0)).unwrap();
        assert_eq!(out.peak_hour(), 22);
        // mass accounting: window hours 16..22 land on 20..26 (mod 24), the rest stay put
        let b = base.fractions();
        let mut oracle = [0.0; HOURS_PER_DAY];
        for h in 0..HOURS_PER_DAY {
            if (16..22).contains(&h) {
                oracle[(h + 4) % 24] += b[h];
            } else {
                oracle[h] += b[h];
            }
        }
        for h in 0..HOURS_PER_DAY {
            assert_relative_eq!(out.fractions()[h], oracle[h], epsilon = 1e-15);
        }
        assert_relative_eq!(out.fractions().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fractional_delay_splits_mass() {
        let base = ChargingProfile::<f64>::delta(ProfileLabel::Unmanaged, 18);
        let out = build_managed_profile(&base, &ManagedStrategy::new(1.5, 0.0, 0.0)).unwrap();
        assert_relative_eq!(out.fraction(19), 0.5, epsilon = 1e-15);
        assert_relative_eq!(out.fraction(20), 0.5, epsilon = 1e-15);
        assert_eq!(out.label(), ProfileLabel::Managed);
    }

    #[test]
    fn workplace_share_fills_daytime() {
        let base = ChargingProfile::<f64>::delta(ProfileLabel::Unmanaged, 18);
        let out = build_managed_profile(&base, &ManagedStrategy::new(0.0, 0.35, 0.0)).unwrap();
        assert_relative_eq!(out.fraction(18), 0.65, epsilon = 1e-15);
        assert_relative_eq!(out.fraction(9), 0.05, epsilon = 1e-15);
        assert_relative_eq!(out.fraction(15), 0.05, epsilon = 1e-15);
        assert_eq!(out.fraction(16), 0.0);
    }

    #[test]
    fn strategy_clamped() {
        let s = ManagedStrategy::new(30.0, -1.0, 2.0);
        assert_eq!(s, ManagedStrategy::new(12.0, 0.0, 1.0));
    }

    #[test]
    fn pin_hour_share() {
        let p = peaked_at(18).with_hour_share(18, 0.15).unwrap();
        assert_relative_eq!(p.fraction(18), 0.15, epsilon = 1e-15);
        assert_relative_eq!(p.fractions().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    fn demand(date: NaiveDate, kwh: f64) -> DailyEnergyDemand<f64> {
        DailyEnergyDemand {
            date,
            ldv_miles: 0.0,
            ev_energy: kwh,
        }
    }

    fn year_of(kwh: impl Fn(usize) -> f64) -> Vec<DailyEnergyDemand<f64>> {
        NaiveDate::from_ymd_opt(2019, 1, 1)
            .unwrap()
            .iter_days()
            .take(365)
            .enumerate()
            .map(|(i, d)| demand(d, kwh(i)))
            .collect()
    }

    #[test]
    fn flat_one_megawatt() {
        let s = fleet_hourly_load(
            &year_of(|_| 24_000.0),
            &ChargingProfile::uniform(ProfileLabel::Custom),
            2019,
        )
        .unwrap();
        assert_eq!(s.len(), 8760);
        for v in s.values() {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_energy_zero_series() {
        let s = fleet_hourly_load(&year_of(|_| 0.0), &peaked_at(18), 2019).unwrap();
        assert!(s.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn week_total_matches_daily_sum() {
        let week = [12_000.0, 15_500.0, 9_800.0, 22_100.0, 30_000.0, 4_000.0, 17_250.0];
        let s = fleet_hourly_load(&year_of(|i| if i < 7 { week[i] } else { 0.0 }), &peaked_at(18), 2019).unwrap();
        let oracle: f64 = week.iter().sum::<f64>() / 1000.0;
        assert_relative_eq!(s.total_energy(), oracle, max_relative = 1e-12);
    }

    #[test]
    fn coverage_gaps_rejected() {
        let mut days = year_of(|_| 1.0);
        days.remove(40);
        assert!(matches!(
            fleet_hourly_load(&days, &peaked_at(18), 2019),
            Err(Error::MissingDay(d)) if d == NaiveDate::from_ymd_opt(2019, 2, 10).unwrap()
        ));
        let mut dup = year_of(|_| 1.0);
        dup.insert(3, dup[2]);
        dup.pop();
        assert!(matches!(
            fleet_hourly_load(&dup, &peaked_at(18), 2019),
            Err(Error::DuplicateDay(_))
        ));
    }

    #[test]
    fn superpose_cases() {
        let start = year_start(2019);
        let base = HourlyLoadSeries::new(start, vec![60_000.0; 48]).unwrap();
        let ev = HourlyLoadSeries::new(start, vec![500.0; 48]).unwrap();
        assert!(superpose(&base, &ev).unwrap().values().iter().all(|v| *v == 60_500.0));
        let zero = HourlyLoadSeries::new(start, vec![0.0; 48]).unwrap();
        assert_eq!(superpose(&base, &zero).unwrap(), base);
        let short = HourlyLoadSeries::new(start, vec![0.0; 47]).unwrap();
        assert!(matches!(superpose(&base, &short), Err(Error::GridMismatch)));
    }

    #[test]
    fn f32_profile_and_load() {
        let p = ChargingProfile::<f32>::uniform(ProfileLabel::Custom);
        let out = distribute_daily_energy(48.0f32, &p);
        assert_relative_eq!(out.iter().sum::<f32>(), 48.0, max_relative = 1e-6);
    }

    proptest! {
        #[test]
        fn superpose_commutes(
            a in proptest::collection::vec(0.0f64..1.0e5, 1..200),
            seed in proptest::collection::vec(0.0f64..1.0e5, 200),
        ) {
            let start = year_start(2019);
            let b: Vec<f64> = seed[..a.len()].to_vec();
            let sa = HourlyLoadSeries::new(start, a).unwrap();
            let sb = HourlyLoadSeries::new(start, b).unwrap();
            prop_assert_eq!(superpose(&sa, &sb).unwrap(), superpose(&sb, &sa).unwrap());
        }

        #[test]
        fn managed_profile_stays_valid(
            weights in proptest::array::uniform24(0.0f64..1.0),
            delay in -2.0f64..15.0,
            workplace in -0.5f64..1.5,
            spread in -0.5f64..1.5,
        ) {
            let mut w = weights;
            w[18] += 0.1;
            let base = ChargingProfile::from_weights(ProfileLabel::Unmanaged, w).unwrap();
            let out = build_managed_profile(&base, &ManagedStrategy::new(delay, workplace, spread)).unwrap();
            prop_assert!(out.fractions().iter().all(|f| *f >= 0.0));
            prop_assert!((out.fractions().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }

        #[test]
        fn distribution_conserves_energy(
            weights in proptest::array::uniform24(0.0f64..1.0),
            kwh in 0.0f64..1.0e9,
        ) {
            let mut w = weights;
            w[0] += 1e-3;
            let p = ChargingProfile::from_weights(ProfileLabel::Custom, w).unwrap();
            let total: f64 = distribute_daily_energy(kwh, &p).iter().sum();
            prop_assert!((total - kwh).abs() <= 1e-9 * kwh.max(1.0));
        }
    }
}
