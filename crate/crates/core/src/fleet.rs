//! EV market share and fleet stock projection.
//!
//! New-vehicle market share is projected under one of three regimes (BAU
//! growth with a decaying growth rate, BAU scaled by incentive elasticities,
//! or a linear ramp to a share target) and then turned into an EV stock with
//! a 16-year average vehicle lifetime: each year 1/16 of the fleet retires
//! and is replaced by new sales at that year's market share.

use serde::{Deserialize, Serialize};

use crate::error::{non_negative, Error, Result};
use crate::scalar::{clamp, Scalar};

/// Average LDV service life in years.
pub const VEHICLE_LIFETIME_YEARS: f64 = 16.0;

/// A value per calendar year over a contiguous range of years.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnualSeries<T> {
    start_year: i32,
    values: Vec<T>,
}

impl<T: Scalar> AnnualSeries<T> {
    pub fn new(start_year: i32, values: Vec<T>) -> Self {
        Self { start_year, values }
    }

    /// `initial` in `start_year`, compounding by `rate` per year through `end_year`.
    pub fn compound(start_year: i32, end_year: i32, initial: T, rate: T) -> Self {
        let mut values = Vec::with_capacity((end_year - start_year + 1).max(0) as usize);
        let mut v = initial;
        for _ in start_year..=end_year {
            values.push(v);
            v *= T::one() + rate;
        }
        Self { start_year, values }
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn end_year(&self) -> i32 {
        self.start_year + self.values.len() as i32 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, year: i32) -> Option<T> {
        let idx = year.checked_sub(self.start_year)?;
        usize::try_from(idx).ok().and_then(|i| self.values.get(i).copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.start_year + i as i32, *v))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            start_year: self.start_year,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthKind {
    Low,
    Medium,
    High,
    Custom,
}

impl GrowthKind {
    /// Annual decay of the sales growth rate for the preset scenarios.
    pub fn default_decline(self) -> Option<f64> {
        match self {
            GrowthKind::Low => Some(0.15),
            GrowthKind::Medium => Some(0.10),
            GrowthKind::High => Some(0.05),
            GrowthKind::Custom => None,
        }
    }
}

/// BAU growth: new-EV sales share grows by `g_n` per year with
/// `g_n = initial_yoy_growth * (1 - yoy_growth_decline)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthScenario<T> {
    pub kind: GrowthKind,
    pub initial_yoy_growth: T,
    pub yoy_growth_decline: T,
}

impl<T: Scalar> GrowthScenario<T> {
    pub fn new(kind: GrowthKind, initial_yoy_growth: T, yoy_growth_decline: T) -> Result<Self> {
        non_negative("initial_yoy_growth", initial_yoy_growth)?;
        if !(yoy_growth_decline >= T::zero() && yoy_growth_decline <= T::one()) {
            return Err(Error::invalid(format!(
                "yoy_growth_decline must lie in [0, 1], got {yoy_growth_decline}"
            )));
        }
        Ok(Self {
            kind,
            initial_yoy_growth,
            yoy_growth_decline,
        })
    }

    /// One of the low/medium/high presets. `Custom` has no preset decline.
    pub fn preset(kind: GrowthKind, initial_yoy_growth: T) -> Result<Self> {
        let decline = kind
            .default_decline()
            .ok_or_else(|| Error::invalid("custom growth scenarios need an explicit yoy_growth_decline"))?;
        Self::new(kind, initial_yoy_growth, T::of(decline))
    }

    /// Growth rates `g_0 .. g_{count-1}`.
    pub fn growth_rates(&self, count: usize) -> Vec<T> {
        let keep = T::one() - self.yoy_growth_decline;
        let mut g = self.initial_yoy_growth;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(g);
            g *= keep;
        }
        out
    }
}

/// Market share from `start_year` (holding `base_share`) through `end_year`.
///
/// Year `start_year + n` has share `share_{n-1} * (1 + g_n)`, capped at 1.
/// The growth rate has already decayed once by the first projected year.
pub fn project_bau_market_share<T: Scalar>(
    scenario: &GrowthScenario<T>,
    base_share: T,
    start_year: i32,
    end_year: i32,
) -> Result<AnnualSeries<T>> {
    check_fraction("base_share", base_share)?;
    if end_year < start_year {
        return Err(Error::invalid(format!(
            "horizon end {end_year} precedes start {start_year}"
        )));
    }
    let years = (end_year - start_year + 1) as usize;
    let rates = scenario.growth_rates(years);
    let mut shares = Vec::with_capacity(years);
    let mut share = base_share;
    shares.push(share);
    for g in rates.iter().skip(1) {
        share = (share * (T::one() + *g)).min(T::one());
        shares.push(share);
    }
    Ok(AnnualSeries::new(start_year, shares))
}

/// Registration-increase percentage per unit of each incentive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncentiveCoefficients<T> {
    /// per public charging station per 100k people
    pub charging_stations_per_100k: T,
    /// per $1000 of tax credit
    pub tax_credit: T,
    /// per $1000 of sales tax waiver
    pub sales_waiver: T,
    /// per $1000 of rebate
    pub rebate: T,
}

impl<T: Scalar> Default for IncentiveCoefficients<T> {
    fn default() -> Self {
        Self {
            charging_stations_per_100k: T::of(3.11),
            tax_credit: T::of(2.33),
            sales_waiver: T::of(3.60),
            rebate: T::of(4.80),
        }
    }
}

/// Incentives named in the coefficient file, with the unit each amount is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Incentive {
    ChargingStationsPer100k,
    TaxCredit,
    SalesWaiver,
    Rebate,
}

impl Incentive {
    pub const ALL: [Incentive; 4] = [
        Incentive::ChargingStationsPer100k,
        Incentive::TaxCredit,
        Incentive::SalesWaiver,
        Incentive::Rebate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Incentive::ChargingStationsPer100k => "charging_stations_per_100k",
            Incentive::TaxCredit => "tax_credit",
            Incentive::SalesWaiver => "sales_waiver",
            Incentive::Rebate => "rebate",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Incentive::ChargingStationsPer100k => "stations_per_100k_people",
            _ => "usd_thousands",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|i| i.name() == name)
    }
}

impl<T: Scalar> IncentiveCoefficients<T> {
    pub fn get(&self, incentive: Incentive) -> T {
        match incentive {
            Incentive::ChargingStationsPer100k => self.charging_stations_per_100k,
            Incentive::TaxCredit => self.tax_credit,
            Incentive::SalesWaiver => self.sales_waiver,
            Incentive::Rebate => self.rebate,
        }
    }

    pub fn set(&mut self, incentive: Incentive, value: T) {
        match incentive {
            Incentive::ChargingStationsPer100k => self.charging_stations_per_100k = value,
            Incentive::TaxCredit => self.tax_credit = value,
            Incentive::SalesWaiver => self.sales_waiver = value,
            Incentive::Rebate => self.rebate = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncentivePackage<T> {
    /// $1000s
    pub tax_credit: T,
    /// $1000s
    pub rebate: T,
    /// $1000s
    pub sales_waiver: T,
    pub charging_stations_per_100k: T,
    pub coefficients: IncentiveCoefficients<T>,
}

impl<T: Scalar> Default for IncentivePackage<T> {
    fn default() -> Self {
        Self {
            tax_credit: T::zero(),
            rebate: T::zero(),
            sales_waiver: T::zero(),
            charging_stations_per_100k: T::zero(),
            coefficients: IncentiveCoefficients::default(),
        }
    }
}

impl<T: Scalar> IncentivePackage<T> {
    pub fn amount(&self, incentive: Incentive) -> T {
        match incentive {
            Incentive::ChargingStationsPer100k => self.charging_stations_per_100k,
            Incentive::TaxCredit => self.tax_credit,
            Incentive::SalesWaiver => self.sales_waiver,
            Incentive::Rebate => self.rebate,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for inc in Incentive::ALL {
            non_negative(inc.name(), self.amount(inc))?;
            let c = self.coefficients.get(inc);
            if !c.is_finite() {
                return Err(Error::invalid(format!("coefficient for {} is not finite", inc.name())));
            }
        }
        Ok(())
    }

    /// `1 + Σ coefficient_i * amount_i / 100`; effects stack additively.
    pub fn multiplier(&self) -> T {
        let points: T = Incentive::ALL
            .into_iter()
            .map(|inc| self.coefficients.get(inc) * self.amount(inc))
            .sum();
        T::one() + points / T::hundred()
    }
}

/// Scales every year's share by the package multiplier, clamped to `[0, 1]`.
pub fn apply_incentives<T: Scalar>(shares: &AnnualSeries<T>, package: &IncentivePackage<T>) -> Result<AnnualSeries<T>> {
    package.validate()?;
    let m = package.multiplier();
    Ok(shares.map(|s| clamp(s * m, T::zero(), T::one())))
}

/// Maps a target-year share benchmark to the share reached by a later
/// benchmark year. Between listed entries the mapping is piecewise linear,
/// `1.0 -> 1.0` is always an anchor, and below the smallest entry the
/// benchmark scales proportionally.
#[derive(Debug, Clone, PartialEq)]
pub struct PostTargetPath<T> {
    pub benchmark_year: i32,
    entries: Vec<(T, T)>,
}

impl<T: Scalar> Default for PostTargetPath<T> {
    fn default() -> Self {
        Self {
            benchmark_year: 2050,
            entries: vec![(T::of(0.5), T::of(0.9))],
        }
    }
}

impl<T: Scalar> PostTargetPath<T> {
    pub fn new(benchmark_year: i32, mut entries: Vec<(T, T)>) -> Result<Self> {
        for &(from, to) in &entries {
            check_fraction("post-target benchmark", from)?;
            check_fraction("post-target benchmark", to)?;
            if to < from {
                return Err(Error::invalid(format!(
                    "post-target share {to} below target share {from}"
                )));
            }
        }
        entries.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
        Ok(Self {
            benchmark_year,
            entries,
        })
    }

    /// Single explicit benchmark for exactly this target share.
    pub fn with_benchmark_year(mut self, benchmark_year: i32) -> Self {
        self.benchmark_year = benchmark_year;
        self
    }

    pub fn explicit(benchmark_year: i32, target_share: T, post_share: T) -> Result<Self> {
        Self::new(benchmark_year, vec![(target_share, post_share)])
    }

    pub fn benchmark_for(&self, target_share: T) -> T {
        let mut points = self.entries.clone();
        if points.last().is_none_or(|p| p.0 < T::one()) {
            points.push((T::one(), T::one()));
        }
        let (x0, y0) = points[0];
        if target_share <= x0 {
            return if x0 > T::zero() {
                (target_share * y0 / x0).min(T::one())
            } else {
                y0
            };
        }
        for w in points.windows(2) {
            let ((xa, ya), (xb, yb)) = (w[0], w[1]);
            if target_share <= xb {
                if xb == xa {
                    return yb;
                }
                return ya + (yb - ya) * (target_share - xa) / (xb - xa);
            }
        }
        T::one()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarketShareTarget<T> {
    pub target_share: T,
    pub target_year: i32,
    pub post_target_path: PostTargetPath<T>,
}

impl<T: Scalar> MarketShareTarget<T> {
    pub fn new(target_share: T, target_year: i32, post_target_path: PostTargetPath<T>) -> Result<Self> {
        if !(target_share > T::zero() && target_share <= T::one()) {
            return Err(Error::invalid(format!(
                "target_share must lie in (0, 1], got {target_share}"
            )));
        }
        if post_target_path.benchmark_year <= target_year {
            return Err(Error::invalid(format!(
                "post-target benchmark year {} must follow target year {target_year}",
                post_target_path.benchmark_year
            )));
        }
        Ok(Self {
            target_share,
            target_year,
            post_target_path,
        })
    }

    pub fn post_target_share(&self) -> T {
        self.post_target_path
            .benchmark_for(self.target_share)
            .max(self.target_share)
    }
}

fn lerp<T: Scalar>(a: T, b: T, year: i32, y0: i32, y1: i32) -> T {
    let t = T::of(f64::from(year - y0)) / T::of(f64::from(y1 - y0));
    a + (b - a) * t
}

/// Linear ramp from `current_share` in `current_year` to the target, then on
/// toward the post-target benchmark, flat after the benchmark year.
pub fn project_target_ramp<T: Scalar>(
    current_share: T,
    current_year: i32,
    target: &MarketShareTarget<T>,
    end_year: i32,
) -> Result<AnnualSeries<T>> {
    check_fraction("current_share", current_share)?;
    if target.target_year <= current_year {
        return Err(Error::TargetInPast {
            target_year: target.target_year,
            current_year,
        });
    }
    if end_year < current_year {
        return Err(Error::invalid(format!(
            "horizon end {end_year} precedes start {current_year}"
        )));
    }
    let post_share = target.post_target_share();
    let post_year = target.post_target_path.benchmark_year;
    let values = (current_year..=end_year)
        .map(|year| {
            if year <= target.target_year {
                lerp(
                    current_share,
                    target.target_share,
                    year,
                    current_year,
                    target.target_year,
                )
            } else if year <= post_year {
                lerp(target.target_share, post_share, year, target.target_year, post_year)
            } else {
                post_share
            }
        })
        .collect();
    Ok(AnnualSeries::new(current_year, values))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FleetYear<T> {
    pub year: i32,
    pub market_share: T,
    pub ev_stock: T,
    pub ldv_stock: T,
}

impl<T: Scalar> FleetYear<T> {
    pub fn ev_fraction(&self) -> T {
        self.ev_stock / self.ldv_stock
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FleetTrajectory<T> {
    years: Vec<FleetYear<T>>,
}

impl<T: Scalar> FleetTrajectory<T> {
    pub fn years(&self) -> &[FleetYear<T>] {
        &self.years
    }

    pub fn year(&self, year: i32) -> Result<&FleetYear<T>> {
        let start = self.years[0].year;
        let end = self.years[self.years.len() - 1].year;
        if year < start || year > end {
            return Err(Error::YearOutOfRange { year, start, end });
        }
        Ok(&self.years[(year - start) as usize])
    }
}

/// Steps the stock recurrence
/// `EV_n = (15/16) EV_{n-1} + share_n * LDV_n / 16`
/// from `initial_ev` in the first year of the series.
pub fn evolve_fleet<T: Scalar>(
    shares: &AnnualSeries<T>,
    ldv: &AnnualSeries<T>,
    initial_ev: T,
) -> Result<FleetTrajectory<T>> {
    if shares.start_year() != ldv.start_year() || shares.len() != ldv.len() {
        return Err(Error::invalid(format!(
            "share series {}..={} and LDV series {}..={} are not aligned",
            shares.start_year(),
            shares.end_year(),
            ldv.start_year(),
            ldv.end_year()
        )));
    }
    if shares.is_empty() {
        return Err(Error::EmptySeries);
    }
    non_negative("initial EV stock", initial_ev)?;
    for (_, s) in shares.iter() {
        non_negative("market share", s)?;
    }
    for (_, l) in ldv.iter() {
        non_negative("LDV stock", l)?;
        if l == T::zero() {
            return Err(Error::invalid("LDV stock must be positive"));
        }
    }

    let lifetime = T::of(VEHICLE_LIFETIME_YEARS);
    let survival = (lifetime - T::one()) / lifetime;
    let mut years = Vec::with_capacity(shares.len());
    let mut ev = initial_ev;
    for (i, ((year, share), (_, ldv_n))) in shares.iter().zip(ldv.iter()).enumerate() {
        if i > 0 {
            ev = survival * ev + share * ldv_n / lifetime;
        }
        if ev > ldv_n {
            return Err(Error::StockExceedsFleet {
                year,
                ev: ev.as_f64(),
                ldv: ldv_n.as_f64(),
            });
        }
        years.push(FleetYear {
            year,
            market_share: share,
            ev_stock: ev,
            ldv_stock: ldv_n,
        });
    }
    Ok(FleetTrajectory { years })
}

/// EV share of the LDV stock in `year`, as a fraction.
pub fn ev_percentage<T: Scalar>(trajectory: &FleetTrajectory<T>, year: i32) -> Result<T> {
    trajectory.year(year).map(FleetYear::ev_fraction)
}

fn check_fraction<T: Scalar>(what: &'static str, v: T) -> Result<T> {
    if v >= T::zero() && v <= T::one() {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{what} must lie in [0, 1], got {v}")))
    }
}
