//! TOML scenario configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::charging::ManagedStrategy;
use crate::error::{Error, Result};
use crate::fleet::{
    GrowthKind, GrowthScenario, IncentiveCoefficients, IncentivePackage, MarketShareTarget, PostTargetPath,
};
use crate::grid::{DEFAULT_MANAGED_FACTOR, DEFAULT_RESERVE_MARGIN};
use crate::io;
use crate::travel::{DistanceBin, TripConversionTable, DEFAULT_KWH_PER_MI};

pub const DEFAULT_MILESTONES: [i32; 2] = [2030, 2050];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Dataset directory, relative to the config file.
    #[serde(default)]
    pub data_dir: Option<PathBuf>,
    pub horizon: Horizon,
    #[serde(default = "default_milestones")]
    pub milestones: Vec<i32>,
    pub growth: GrowthConfig,
    #[serde(default)]
    pub charging_mode: ChargingMode,
    pub fleet: FleetBaseline,
    #[serde(default)]
    pub travel: TravelConfig,
    #[serde(default)]
    pub impact: ImpactConfig,
    #[serde(skip)]
    base_dir: Option<PathBuf>,
}

fn default_milestones() -> Vec<i32> {
    DEFAULT_MILESTONES.to_vec()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizon {
    pub start_year: i32,
    pub end_year: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChargingMode {
    #[default]
    Unmanaged,
    Managed,
}

impl ChargingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ChargingMode::Unmanaged => "unmanaged",
            ChargingMode::Managed => "managed",
        }
    }
}

/// Market-share regime. `base_share` is the new-sales share in the horizon
/// start year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum GrowthConfig {
    Bau {
        base_share: f64,
        scenario: GrowthKind,
        initial_yoy_growth: f64,
        #[serde(default)]
        yoy_growth_decline: Option<f64>,
    },
    Incentivized {
        base_share: f64,
        scenario: GrowthKind,
        initial_yoy_growth: f64,
        #[serde(default)]
        yoy_growth_decline: Option<f64>,
        #[serde(default)]
        incentives: IncentiveAmounts,
        /// `incentive,unit,coefficient_pct` CSV; built-in defaults otherwise
        #[serde(default)]
        coefficients_file: Option<PathBuf>,
    },
    MarketShareTarget {
        base_share: f64,
        target_share: f64,
        target_year: i32,
        #[serde(default)]
        post_target_share: Option<f64>,
        #[serde(default = "default_post_target_year")]
        post_target_year: i32,
    },
}

fn default_post_target_year() -> i32 {
    2050
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IncentiveAmounts {
    pub tax_credit: f64,
    pub rebate: f64,
    pub sales_waiver: f64,
    pub charging_stations_per_100k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FleetBaseline {
    /// EVs on the road in the horizon start year
    pub initial_ev: f64,
    /// LDVs on the road in the horizon start year
    pub initial_ldv: f64,
    #[serde(default)]
    pub ldv_growth_rate: f64,
    /// One LDV count per horizon year; overrides `ldv_growth_rate`.
    #[serde(default)]
    pub ldv_counts: Option<Vec<f64>>,
    /// Milestone year -> EV percentage of the fleet, bypassing the projection.
    #[serde(default)]
    pub ev_pct_override: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TravelConfig {
    pub kwh_per_mile: f64,
    pub kwh_per_mile_overrides: BTreeMap<String, f64>,
    pub rep_distance_overrides: BTreeMap<String, f64>,
    /// `bin,vt_per_pt,rep_distance_mi,kwh_per_mi` CSV replacing the defaults
    pub conversion_table: Option<PathBuf>,
}

impl Default for TravelConfig {
    fn default() -> Self {
        Self {
            kwh_per_mile: DEFAULT_KWH_PER_MI,
            kwh_per_mile_overrides: BTreeMap::new(),
            rep_distance_overrides: BTreeMap::new(),
            conversion_table: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImpactMethod {
    /// superpose the hourly EV load on the baseline for every milestone
    #[default]
    Simulate,
    /// `ΔEV% * PLIF`, managed = unmanaged * managed_factor
    PlifShortcut,
}

impl ImpactMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ImpactMethod::Simulate => "simulate",
            ImpactMethod::PlifShortcut => "plif_shortcut",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for SweepRange {
    fn default() -> Self {
        Self {
            lo: 1.0,
            hi: 15.0,
            step: 1.0,
        }
    }
}

impl SweepRange {
    /// Parses `lo:hi:step`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(Error::invalid(format!("range `{s}` is not lo:hi:step")));
        };
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("range `{s}` has non-numeric part `{v}`")))
        };
        let r = Self {
            lo: num(lo)?,
            hi: num(hi)?,
            step: num(step)?,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.step > 0.0 && self.lo <= self.hi) {
            return Err(Error::invalid(format!(
                "sweep {}:{}:{} needs lo <= hi and step > 0",
                self.lo, self.hi, self.step
            )));
        }
        if self.lo < 0.0 || self.hi > 100.0 {
            return Err(Error::invalid("sweep EV percentages must lie in [0, 100]"));
        }
        Ok(())
    }

    /// EV percentages `lo, lo + step, ...` up to `hi` (inclusive within 1e-9).
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + self.step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImpactConfig {
    pub method: ImpactMethod,
    /// Fixed PLIF for the shortcut; calibrated from the data when absent.
    pub plif: Option<f64>,
    pub managed_factor: f64,
    /// EV percentage already contained in the baseline load.
    pub baseline_ev_pct: f64,
    pub reserve_margin: f64,
    pub plif_sweep: SweepRange,
    /// Builds the managed profile from the unmanaged one instead of using
    /// the dataset's managed profile.
    pub managed_strategy: Option<ManagedStrategy<f64>>,
}

impl Default for ImpactConfig {
    fn default() -> Self {
        Self {
            method: ImpactMethod::default(),
            plif: None,
            managed_factor: DEFAULT_MANAGED_FACTOR,
            baseline_ev_pct: 0.0,
            reserve_margin: DEFAULT_RESERVE_MARGIN,
            plif_sweep: SweepRange::default(),
            managed_strategy: None,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config {
            path: PathBuf::from("<string>"),
            source: Box::new(e),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| Error::Config {
            path: path.into(),
            source: Box::new(e),
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Resolves a config-relative path.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn data_dir(&self) -> Option<PathBuf> {
        self.data_dir.as_deref().map(|d| self.resolve(d))
    }

    pub fn validate(&self) -> Result<()> {
        self.check().map_err(|e| e.in_scenario(&self.name, None))
    }

    fn check(&self) -> Result<()> {
        let h = self.horizon;
        if h.start_year >= h.end_year {
            return Err(Error::invalid(format!(
                "horizon start {} must precede end {}",
                h.start_year, h.end_year
            )));
        }
        let f = &self.fleet;
        if !(f.initial_ev > 0.0 && f.initial_ldv > 0.0) {
            return Err(Error::invalid("initial EV and LDV counts must both be positive"));
        }
        if f.initial_ev > f.initial_ldv {
            return Err(Error::invalid("initial EV count exceeds initial LDV count"));
        }
        if !f.ldv_growth_rate.is_finite() || f.ldv_growth_rate <= -1.0 {
            return Err(Error::invalid("ldv_growth_rate must be finite and above -1"));
        }
        if let Some(counts) = &f.ldv_counts {
            let years = (h.end_year - h.start_year + 1) as usize;
            if counts.len() != years {
                return Err(Error::invalid(format!(
                    "ldv_counts has {} entries, horizon has {years} years",
                    counts.len()
                )));
            }
            if counts.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
                return Err(Error::invalid("ldv_counts must be positive"));
            }
        }
        if self.milestones.is_empty() {
            return Err(Error::invalid("at least one milestone year is required"));
        }
        for &m in &self.milestones {
            if m <= h.start_year || m > h.end_year {
                return Err(Error::invalid(format!(
                    "milestone {m} outside horizon ({}, {}]",
                    h.start_year, h.end_year
                )));
            }
        }
        for (year, pct) in self.ev_pct_overrides()? {
            if !self.milestones.contains(&year) {
                return Err(Error::invalid(format!(
                    "ev_pct_override year {year} is not a milestone"
                )));
            }
            if !(0.0..=100.0).contains(&pct) {
                return Err(Error::invalid(format!("ev_pct_override {pct} outside [0, 100]")));
            }
        }
        self.market_share_regime()?;
        self.check_mileage()?;
        let i = &self.impact;
        if !(0.0..=1.0).contains(&i.reserve_margin) {
            return Err(Error::invalid("reserve_margin must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&i.managed_factor) {
            return Err(Error::invalid("managed_factor must lie in [0, 1]"));
        }
        if !(0.0..=100.0).contains(&i.baseline_ev_pct) {
            return Err(Error::invalid("baseline_ev_pct must lie in [0, 100]"));
        }
        if let Some(p) = i.plif {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::invalid("plif must be non-negative"));
            }
        }
        i.plif_sweep.validate()
    }

    fn check_mileage(&self) -> Result<()> {
        let t = &self.travel;
        if !(t.kwh_per_mile > 0.0 && t.kwh_per_mile.is_finite()) {
            return Err(Error::invalid("kwh_per_mile must be positive"));
        }
        for (bin, v) in &t.kwh_per_mile_overrides {
            bin.parse::<DistanceBin>()?;
            if !(*v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("mileage override for {bin} must be positive")));
            }
        }
        for bin in t.rep_distance_overrides.keys() {
            bin.parse::<DistanceBin>()?;
        }
        Ok(())
    }

    pub fn ev_pct_overrides(&self) -> Result<BTreeMap<i32, f64>> {
        self.fleet
            .ev_pct_override
            .iter()
            .map(|(k, v)| {
                k.parse::<i32>()
                    .map(|y| (y, *v))
                    .map_err(|_| Error::invalid(format!("ev_pct_override key `{k}` is not a year")))
            })
            .collect()
    }

    /// Validated market-share regime for the fleet model.
    pub fn market_share_regime(&self) -> Result<MarketShareRegime> {
        let growth = |kind: GrowthKind, g0: f64, decline: Option<f64>| match decline {
            Some(d) => GrowthScenario::new(kind, g0, d),
            None => GrowthScenario::preset(kind, g0),
        };
        check_share(self.growth.base_share())?;
        Ok(match &self.growth {
            GrowthConfig::Bau {
                scenario,
                initial_yoy_growth,
                yoy_growth_decline,
                ..
            } => MarketShareRegime::Bau(growth(*scenario, *initial_yoy_growth, *yoy_growth_decline)?),
            GrowthConfig::Incentivized {
                scenario,
                initial_yoy_growth,
                yoy_growth_decline,
                incentives,
                coefficients_file,
                ..
            } => {
                let coefficients = match coefficients_file {
                    Some(p) => io::read_incentive_coefficients(&self.resolve(p))?,
                    None => IncentiveCoefficients::default(),
                };
                let package = IncentivePackage {
                    tax_credit: incentives.tax_credit,
                    rebate: incentives.rebate,
                    sales_waiver: incentives.sales_waiver,
                    charging_stations_per_100k: incentives.charging_stations_per_100k,
                    coefficients,
                };
                package.validate()?;
                MarketShareRegime::Incentivized(growth(*scenario, *initial_yoy_growth, *yoy_growth_decline)?, package)
            }
            GrowthConfig::MarketShareTarget {
                target_share,
                target_year,
                post_target_share,
                post_target_year,
                ..
            } => {
                let path = match post_target_share {
                    Some(p) => PostTargetPath::explicit(*post_target_year, *target_share, *p)?,
                    None => PostTargetPath::default().with_benchmark_year(*post_target_year),
                };
                if *target_year <= self.horizon.start_year {
                    return Err(Error::TargetInPast {
                        target_year: *target_year,
                        current_year: self.horizon.start_year,
                    });
                }
                MarketShareRegime::Target(MarketShareTarget::new(*target_share, *target_year, path)?)
            }
        })
    }

    pub fn conversion_table(&self) -> Result<TripConversionTable<f64>> {
        let t = &self.travel;
        let mut table = match &t.conversion_table {
            Some(p) => io::read_conversion_table(&self.resolve(p))?,
            None => TripConversionTable::with_uniform_mileage(t.kwh_per_mile)?,
        };
        for (bin, v) in &t.kwh_per_mile_overrides {
            table = table.with_mileage(bin.parse()?, *v)?;
        }
        for (bin, v) in &t.rep_distance_overrides {
            table = table.with_distance(bin.parse()?, *v)?;
        }
        Ok(table)
    }
}

fn check_share(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::invalid(format!("base_share must lie in [0, 1], got {s}")))
    }
}

impl GrowthConfig {
    pub fn base_share(&self) -> f64 {
        match self {
            GrowthConfig::Bau { base_share, .. }
            | GrowthConfig::Incentivized { base_share, .. }
            | GrowthConfig::MarketShareTarget { base_share, .. } => *base_share,
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self {
            GrowthConfig::Bau { .. } => "bau",
            GrowthConfig::Incentivized { .. } => "incentivized",
            GrowthConfig::MarketShareTarget { .. } => "market_share_target",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MarketShareRegime {
    Bau(GrowthScenario<f64>),
    Incentivized(GrowthScenario<f64>, IncentivePackage<f64>),
    Target(MarketShareTarget<f64>),
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
name = "t"
[horizon]
start_year = 2021
end_year = 2050
[growth]
mode = "market_share_target"
base_share = 0.03
target_share = 0.5
target_year = 2030
[fleet]
initial_ev = 120000
initial_ldv = 22000000
"#;

    #[test]
    fn defaults_applied() {
        let c = ScenarioConfig::from_toml_str(BASE).unwrap();
        assert_eq!(c.milestones, vec![2030, 2050]);
        assert_eq!(c.charging_mode, ChargingMode::Unmanaged);
        assert_eq!(c.impact.managed_factor, 0.35);
        assert_eq!(c.impact.reserve_margin, 0.30);
        assert_eq!(c.impact.plif_sweep.points().len(), 15);
        match c.market_share_regime().unwrap() {
            MarketShareRegime::Target(t) => assert_eq!(t.post_target_share(), 0.9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invariants_enforced() {
        let bad_horizon = BASE.replace("end_year = 2050", "end_year = 2021");
        assert!(ScenarioConfig::from_toml_str(&bad_horizon).is_err());
        let too_many_evs = BASE.replace("initial_ev = 120000", "initial_ev = 30000000");
        assert!(ScenarioConfig::from_toml_str(&too_many_evs).is_err());
        let zero_ldv = BASE.replace("initial_ldv = 22000000", "initial_ldv = 0");
        assert!(ScenarioConfig::from_toml_str(&zero_ldv).is_err());
        let mileage = format!("{BASE}[travel]\nkwh_per_mile = 0.0\n");
        assert!(ScenarioConfig::from_toml_str(&mileage).is_err());
        let override_mileage = format!("{BASE}[travel.kwh_per_mile_overrides]\ngt500mi = -0.1\n");
        assert!(ScenarioConfig::from_toml_str(&override_mileage).is_err());
        let unknown = format!("{BASE}bogus = 1\n");
        assert!(ScenarioConfig::from_toml_str(&unknown).is_err());
        let milestone = BASE.replace("name = \"t\"", "name = \"t\"\nmilestones = [2060]");
        assert!(ScenarioConfig::from_toml_str(&milestone).is_err());
    }

    #[test]
    fn override_keys_are_years() {
        let c = format!("{BASE}[fleet.ev_pct_override]\n2030 = 11.22\n");
        let cfg = ScenarioConfig::from_toml_str(&c).unwrap();
        assert_eq!(cfg.ev_pct_overrides().unwrap()[&2030], 11.22);
        let bad = format!("{BASE}[fleet.ev_pct_override]\n2040 = 11.22\n");
        assert!(ScenarioConfig::from_toml_str(&bad).is_err());
    }

    #[test]
    fn bau_and_incentive_modes() {
        let bau = BASE.replace(
            "mode = \"market_share_target\"\nbase_share = 0.03\ntarget_share = 0.5\ntarget_year = 2030",
            "mode = \"incentivized\"\nbase_share = 0.03\nscenario = \"low\"\ninitial_yoy_growth = 0.3\n[growth.incentives]\ntax_credit = 7.5\nrebate = 2.5",
        );
        let cfg = ScenarioConfig::from_toml_str(&bau).unwrap();
        match cfg.market_share_regime().unwrap() {
            MarketShareRegime::Incentivized(g, p) => {
                assert_eq!(g.yoy_growth_decline, 0.15);
                assert!((p.multiplier() - 1.29475).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let custom = bau.replace("scenario = \"low\"", "scenario = \"custom\"");
        assert!(ScenarioConfig::from_toml_str(&custom).is_err());
    }

    #[test]
    fn sweep_range_parsing() {
        let r = SweepRange::parse("1:15:1").unwrap();
        assert_eq!(r.points(), (1..=15).map(f64::from).collect::<Vec<_>>());
        assert_eq!(SweepRange::parse("0.5:1.5:0.5").unwrap().points(), vec![0.5, 1.0, 1.5]);
        assert!(SweepRange::parse("1:15").is_err());
        assert!(SweepRange::parse("5:1:1").is_err());
        assert!(SweepRange::parse("1:15:0").is_err());
    }
}
