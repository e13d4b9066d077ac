use std::collections::HashSet;

use serde::Serialize;

use crate::charging::{build_managed_profile, fleet_hourly_load, superpose, ChargingProfile, HourlyLoadSeries};
use crate::error::{Error, Result};
use crate::fleet::{
    apply_incentives, evolve_fleet, project_bau_market_share, project_target_ramp, AnnualSeries, FleetTrajectory,
};
use crate::grid::{
    compute_plif, find_peak, managed_pli, peak_load_increase, pli_from_plif, ratio_spread, reserve_margin_check,
    PeakResult, PlifSample,
};
use crate::travel::{daily_energy_demand, TripConversionTable};

use super::config::{ChargingMode, ImpactMethod, MarketShareRegime, ScenarioConfig, SweepRange};
use super::data::DatasetBundle;
use super::report::{Comparison, ImpactReport, ImpactRow};

/// Travel and baseline data with a fixed conversion table, ready to turn an
/// EV fraction into a combined hourly load.
pub struct Simulator<'a> {
    data: &'a DatasetBundle,
    table: TripConversionTable<f64>,
    baseline_peak: PeakResult<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedImpact {
    pub pli_pct: f64,
    pub combined_peak: PeakResult<f64>,
}

impl<'a> Simulator<'a> {
    pub fn new(data: &'a DatasetBundle, table: TripConversionTable<f64>) -> Result<Self> {
        Ok(Self {
            baseline_peak: find_peak(&data.baseline_load)?,
            data,
            table,
        })
    }

    pub fn baseline_peak(&self) -> &PeakResult<f64> {
        &self.baseline_peak
    }

    pub fn ev_load(&self, ev_fraction: f64, profile: &ChargingProfile<f64>) -> Result<HourlyLoadSeries<f64>> {
        let daily = daily_energy_demand(&self.data.travel, &self.table, ev_fraction)?;
        fleet_hourly_load(&daily, profile, self.data.sample_year())
    }

    pub fn combined_load(&self, ev_fraction: f64, profile: &ChargingProfile<f64>) -> Result<HourlyLoadSeries<f64>> {
        superpose(&self.data.baseline_load, &self.ev_load(ev_fraction, profile)?)
    }

    pub fn impact(&self, ev_fraction: f64, profile: &ChargingProfile<f64>) -> Result<SimulatedImpact> {
        let combined = self.combined_load(ev_fraction, profile)?;
        Ok(SimulatedImpact {
            pli_pct: peak_load_increase(&self.data.baseline_load, &combined)?,
            combined_peak: find_peak(&combined)?,
        })
    }

    /// EV charging demand in the baseline peak hour, MW.
    pub fn ev_load_at_baseline_peak(&self, ev_fraction: f64, profile: &ChargingProfile<f64>) -> Result<f64> {
        Ok(self.ev_load(ev_fraction, profile)?.values()[self.baseline_peak.index])
    }

    pub fn sweep(&self, range: &SweepRange, profile: &ChargingProfile<f64>) -> Result<PlifSweep> {
        let mut samples = Vec::new();
        let mut argmax_stable = true;
        for ev_pct in range.points() {
            let imp = self.impact(ev_pct / 100.0, profile)?;
            argmax_stable &= imp.combined_peak.index == self.baseline_peak.index;
            samples.push(PlifSample::new(ev_pct, imp.pli_pct));
        }
        Ok(PlifSweep {
            plif: compute_plif(&samples)?,
            relative_spread: ratio_spread(&samples)?,
            argmax_stable,
            samples,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlifSweep {
    pub samples: Vec<PlifSample<f64>>,
    pub plif: f64,
    /// `(max - min) / mean` of the per-sample ratios
    pub relative_spread: f64,
    /// combined peak stayed on the baseline peak hour for every sample
    pub argmax_stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlifCalibration {
    pub unmanaged: PlifSweep,
    pub managed: PlifSweep,
    /// managed / unmanaged PLIF
    pub managed_ratio: f64,
}

pub fn managed_profile(config: &ScenarioConfig, data: &DatasetBundle) -> Result<ChargingProfile<f64>> {
    match &config.impact.managed_strategy {
        Some(s) => build_managed_profile(&data.profile_unmanaged, s),
        None => Ok(data.profile_managed.clone()),
    }
}

/// PLIF sweeps for both charging profiles.
pub fn calibrate_plif(config: &ScenarioConfig, data: &DatasetBundle, range: &SweepRange) -> Result<PlifCalibration> {
    let run = || {
        let sim = Simulator::new(data, config.conversion_table()?)?;
        let unmanaged = sim.sweep(range, &data.profile_unmanaged)?;
        let managed = sim.sweep(range, &managed_profile(config, data)?)?;
        Ok(PlifCalibration {
            managed_ratio: if unmanaged.plif > 0.0 {
                managed.plif / unmanaged.plif
            } else {
                0.0
            },
            unmanaged,
            managed,
        })
    };
    run().map_err(|e: Error| e.in_scenario(&config.name, None))
}

pub fn market_share_series(config: &ScenarioConfig) -> Result<AnnualSeries<f64>> {
    let h = config.horizon;
    let base = config.growth.base_share();
    match config.market_share_regime()? {
        MarketShareRegime::Bau(g) => project_bau_market_share(&g, base, h.start_year, h.end_year),
        MarketShareRegime::Incentivized(g, package) => {
            apply_incentives(&project_bau_market_share(&g, base, h.start_year, h.end_year)?, &package)
        }
        MarketShareRegime::Target(t) => project_target_ramp(base, h.start_year, &t, h.end_year),
    }
}

pub fn ldv_series(config: &ScenarioConfig) -> AnnualSeries<f64> {
    let h = config.horizon;
    match &config.fleet.ldv_counts {
        Some(counts) => AnnualSeries::new(h.start_year, counts.clone()),
        None => AnnualSeries::compound(
            h.start_year,
            h.end_year,
            config.fleet.initial_ldv,
            config.fleet.ldv_growth_rate,
        ),
    }
}

pub fn fleet_trajectory(config: &ScenarioConfig) -> Result<FleetTrajectory<f64>> {
    evolve_fleet(
        &market_share_series(config)?,
        &ldv_series(config),
        config.fleet.initial_ev,
    )
}

/// Fleet projection, travel conversion, hourly charging load and peak
/// impact for every milestone year.
pub fn run_scenario(config: &ScenarioConfig, data: &DatasetBundle) -> Result<ImpactReport> {
    config.validate()?;
    let name = config.name.as_str();
    let trajectory = fleet_trajectory(config).map_err(|e| e.in_scenario(name, None))?;
    let sim = Simulator::new(data, config.conversion_table().map_err(|e| e.in_scenario(name, None))?)
        .map_err(|e| e.in_scenario(name, None))?;
    let managed = managed_profile(config, data).map_err(|e| e.in_scenario(name, None))?;
    let overrides = config.ev_pct_overrides()?;
    let impact = &config.impact;

    let plif = match (impact.method, impact.plif) {
        (ImpactMethod::PlifShortcut, Some(p)) => p,
        _ => {
            sim.sweep(&impact.plif_sweep, &data.profile_unmanaged)
                .map_err(|e| e.in_scenario(name, None))?
                .plif
        }
    };

    let mut rows = Vec::with_capacity(config.milestones.len());
    for &year in &config.milestones {
        let row = (|| {
            let fy = trajectory.year(year)?;
            let ev_pct = overrides.get(&year).copied().unwrap_or(100.0 * fy.ev_fraction());
            let delta_pct = ev_pct - impact.baseline_ev_pct;
            if delta_pct < 0.0 {
                return Err(Error::invalid(format!(
                    "EV percentage {ev_pct} below baseline_ev_pct {}",
                    impact.baseline_ev_pct
                )));
            }
            let (unmanaged, managed_pct) = match impact.method {
                ImpactMethod::Simulate => (
                    sim.impact(delta_pct / 100.0, &data.profile_unmanaged)?.pli_pct,
                    sim.impact(delta_pct / 100.0, &managed)?.pli_pct,
                ),
                ImpactMethod::PlifShortcut => {
                    let u = pli_from_plif(delta_pct, plif)?;
                    (u, managed_pli(u, impact.managed_factor))
                }
            };
            if managed_pct > unmanaged {
                return Err(Error::invalid(format!(
                    "managed increase {managed_pct} exceeds unmanaged {unmanaged}"
                )));
            }
            let governing = match config.charging_mode {
                ChargingMode::Unmanaged => unmanaged,
                ChargingMode::Managed => managed_pct,
            };
            Ok(ImpactRow {
                year,
                market_share_pct: 100.0 * fy.market_share,
                ev_count: ev_pct / 100.0 * fy.ldv_stock,
                ev_pct,
                pli_unmanaged_pct: unmanaged,
                pli_managed_pct: managed_pct,
                reserve_status: reserve_margin_check(governing, impact.reserve_margin)?,
            })
        })()
        .map_err(|e| e.in_scenario(name, Some(year)))?;
        rows.push(row);
    }

    Ok(ImpactReport {
        scenario: config.name.clone(),
        growth_mode: config.growth.mode_name().to_owned(),
        charging_mode: config.charging_mode,
        method: impact.method,
        plif,
        managed_factor: impact.managed_factor,
        reserve_margin: impact.reserve_margin,
        rows,
    })
}

/// Runs each config on its own thread; reports keep the input order.
pub fn compare_scenarios(configs: &[ScenarioConfig], data: &DatasetBundle) -> Result<Comparison> {
    if configs.len() < 2 {
        return Err(Error::TooFewScenarios(configs.len()));
    }
    let first = &configs[0];
    let mut names = HashSet::new();
    for c in configs {
        if c.horizon != first.horizon {
            return Err(Error::MismatchedHorizons {
                name: c.name.clone(),
                start: c.horizon.start_year,
                end: c.horizon.end_year,
                expected_start: first.horizon.start_year,
                expected_end: first.horizon.end_year,
            });
        }
        if !names.insert(c.name.as_str()) {
            return Err(Error::invalid(format!("scenario name `{}` used twice", c.name)));
        }
    }
    let reports = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || run_scenario(c, data))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(Comparison { reports })
}

/// Baseline plus combined unmanaged/managed load for each report row.
pub fn hourly_dump(config: &ScenarioConfig, data: &DatasetBundle, report: &ImpactReport) -> Result<String> {
    let sim = Simulator::new(data, config.conversion_table()?)?;
    let managed = managed_profile(config, data)?;
    let mut columns = Vec::new();
    let mut header = String::from("timestamp_iso8601,baseline_mw");
    for row in &report.rows {
        let frac = (row.ev_pct - config.impact.baseline_ev_pct).max(0.0) / 100.0;
        header.push_str(&format!(",unmanaged_{0}_mw,managed_{0}_mw", row.year));
        columns.push(sim.combined_load(frac, &data.profile_unmanaged)?);
        columns.push(sim.combined_load(frac, &managed)?);
    }
    let base = &data.baseline_load;
    let mut out = header;
    out.push('\n');
    for i in 0..base.len() {
        out.push_str(&crate::io::format_timestamp(base.timestamp(i)));
        out.push_str(&format!(",{}", base.values()[i]));
        for c in &columns {
            out.push_str(&format!(",{}", c.values()[i]));
        }
        out.push('\n');
    }
    Ok(out)
}
