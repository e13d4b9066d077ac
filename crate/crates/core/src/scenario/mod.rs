//! Configuration, dataset ingestion, scenario orchestration and reports.

mod config;
mod data;
mod report;
mod run;

pub use config::{
    ChargingMode, FleetBaseline, GrowthConfig, Horizon, ImpactConfig, ImpactMethod, IncentiveAmounts,
    MarketShareRegime, ScenarioConfig, SweepRange, TravelConfig, DEFAULT_MILESTONES,
};
pub use data::{load_datasets, DatasetBundle, DatasetPaths};
pub use report::{sig3, Comparison, ImpactReport, ImpactRow, OutputFormat};
pub use run::{
    calibrate_plif, compare_scenarios, fleet_trajectory, hourly_dump, ldv_series, managed_profile, market_share_series,
    run_scenario, PlifCalibration, PlifSweep, SimulatedImpact, Simulator,
};
