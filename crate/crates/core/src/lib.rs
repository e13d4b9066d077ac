//! Scenario engine for EV fleet growth and its effect on grid peak demand.
//!
//! The pipeline runs fleet projection ([`fleet`]), travel-to-energy
//! conversion ([`travel`]), hourly charging load ([`charging`]) and peak
//! impact ([`grid`]). The numeric modules are generic over [`Scalar`]; the
//! orchestration in [`scenario`] works in `f64`.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charging;
pub mod error;
pub mod fleet;
pub mod grid;
pub mod io;
pub mod sample;
pub mod scalar;
pub mod scenario;
pub mod travel;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type AnnualSeries = fleet::AnnualSeries<f64>;
pub type GrowthScenario = fleet::GrowthScenario<f64>;
pub type IncentivePackage = fleet::IncentivePackage<f64>;
pub type MarketShareTarget = fleet::MarketShareTarget<f64>;
pub type FleetTrajectory = fleet::FleetTrajectory<f64>;
pub type DailyTravelRecord = travel::DailyTravelRecord<f64>;
pub type TripConversionTable = travel::TripConversionTable<f64>;
pub type ChargingProfile = charging::ChargingProfile<f64>;
pub type HourlyLoadSeries = charging::HourlyLoadSeries<f64>;
pub type ManagedStrategy = charging::ManagedStrategy<f64>;
pub type PeakResult = grid::PeakResult<f64>;
pub type PlifSample = grid::PlifSample<f64>;

pub type FleetTrajectoryF32 = fleet::FleetTrajectory<f32>;
pub type ChargingProfileF32 = charging::ChargingProfile<f32>;
pub type HourlyLoadSeriesF32 = charging::HourlyLoadSeries<f32>;
