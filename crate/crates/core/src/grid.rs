//! Peak detection, peak-load increase, PLIF and reserve-margin status.

use std::fmt;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::charging::HourlyLoadSeries;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Managed-charging peak contribution relative to unmanaged.
pub const DEFAULT_MANAGED_FACTOR: f64 = 0.35;
/// Peak-load increase per percentage point of fleet EV share.
pub const REFERENCE_PLIF: f64 = 0.41;
pub const DEFAULT_RESERVE_MARGIN: f64 = 0.30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakResult<T> {
    pub index: usize,
    pub timestamp: NaiveDateTime,
    /// MW
    pub load: T,
}

/// Annual maximum; the earliest hour wins ties.
pub fn find_peak<T: Scalar>(series: &HourlyLoadSeries<T>) -> Result<PeakResult<T>> {
    let values = series.values();
    let first = *values.first().ok_or(Error::EmptySeries)?;
    let (index, load) = values
        .iter()
        .enumerate()
        .skip(1)
        .fold((0, first), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    Ok(PeakResult {
        index,
        timestamp: series.timestamp(index),
        load,
    })
}

/// `100 * (max(combined) - max(baseline)) / max(baseline)`.
pub fn peak_load_increase<T: Scalar>(baseline: &HourlyLoadSeries<T>, combined: &HourlyLoadSeries<T>) -> Result<T> {
    if !baseline.same_grid(combined) {
        return Err(Error::GridMismatch);
    }
    if let Some(index) = baseline.values().iter().zip(combined.values()).position(|(b, c)| c < b) {
        return Err(Error::NegativeIncrease { index });
    }
    let base = find_peak(baseline)?.load;
    if !(base > T::zero()) {
        return Err(Error::invalid("baseline peak load must be positive"));
    }
    let peak = find_peak(combined)?.load;
    Ok(T::hundred() * (peak - base) / base)
}

/// One point of a PLIF sweep; both values in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlifSample<T> {
    pub ev_pct: T,
    pub pli_pct: T,
}

impl<T: Scalar> PlifSample<T> {
    pub fn new(ev_pct: T, pli_pct: T) -> Self {
        Self { ev_pct, pli_pct }
    }

    pub fn ratio(&self) -> Option<T> {
        (self.ev_pct > T::zero()).then(|| self.pli_pct / self.ev_pct)
    }
}

/// Mean of `pli / ev` over the samples with a non-zero EV percentage.
pub fn compute_plif<T: Scalar>(samples: &[PlifSample<T>]) -> Result<T> {
    let ratios: Vec<T> = samples.iter().filter_map(PlifSample::ratio).collect();
    if ratios.is_empty() {
        return Err(Error::NoNonzeroSamples);
    }
    let n = T::of_usize(ratios.len());
    Ok(ratios.into_iter().sum::<T>() / n)
}

/// `(max ratio - min ratio) / mean ratio` over the samples with EV% > 0.
pub fn ratio_spread<T: Scalar>(samples: &[PlifSample<T>]) -> Result<T> {
    let ratios: Vec<T> = samples.iter().filter_map(PlifSample::ratio).collect();
    let mean = compute_plif(samples)?;
    let lo = ratios.iter().copied().fold(T::infinity(), T::min);
    let hi = ratios.iter().copied().fold(T::neg_infinity(), T::max);
    if mean == T::zero() {
        return Ok(if hi == lo { T::zero() } else { T::infinity() });
    }
    Ok((hi - lo) / mean)
}

/// Peak-load increase in percent from the PLIF shortcut.
pub fn pli_from_plif<T: Scalar>(ev_pct_delta: T, plif: T) -> Result<T> {
    if !(plif >= T::zero()) {
        return Err(Error::invalid(format!("PLIF must be non-negative, got {plif}")));
    }
    Ok(ev_pct_delta * plif)
}

pub fn managed_pli<T: Scalar>(unmanaged_pli_pct: T, managed_factor: T) -> T {
    unmanaged_pli_pct * managed_factor
}

/// `ΔEV% * EV_load * LDV / PL` with `EV_load` the per-vehicle charging
/// demand in the baseline peak hour (MW per EV) and `PL` the baseline peak.
pub fn pli_direct<T: Scalar>(ev_pct_delta: T, ev_load_mw_per_vehicle: T, ldv_count: T, peak_mw: T) -> T {
    ev_pct_delta * ev_load_mw_per_vehicle * ldv_count / peak_mw
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReserveStatus {
    Ok,
    AtRisk,
    Violation,
}

impl ReserveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ReserveStatus::Ok => "ok",
            ReserveStatus::AtRisk => "at_risk",
            ReserveStatus::Violation => "violation",
        }
    }
}

impl fmt::Display for ReserveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `ok` below half the margin, `at_risk` up to and including the margin,
/// `violation` above it. `margin` is a fraction of peak demand.
pub fn reserve_margin_check<T: Scalar>(pli_pct: T, margin: T) -> Result<ReserveStatus> {
    if !(margin >= T::zero() && margin <= T::one()) {
        return Err(Error::invalid(format!(
            "reserve margin must lie in [0, 1], got {margin}"
        )));
    }
    let headroom = margin * T::hundred();
    let half = headroom * T::of(0.5);
    Ok(if pli_pct < half {
        ReserveStatus::Ok
    } else if pli_pct <= headroom {
        ReserveStatus::AtRisk
    } else {
        ReserveStatus::Violation
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpactMetrics<T> {
    pub pli_pct: T,
    pub ev_pct: T,
    pub plif: T,
    pub reserve_margin: T,
    pub status: ReserveStatus,
}

impl<T: Scalar> ImpactMetrics<T> {
    pub fn new(pli_pct: T, ev_pct: T, plif: T, reserve_margin: T) -> Result<Self> {
        if !(pli_pct >= T::zero()) {
            return Err(Error::invalid(format!("peak-load increase {pli_pct} is negative")));
        }
        Ok(Self {
            pli_pct,
            ev_pct,
            plif,
            reserve_margin,
            status: reserve_margin_check(pli_pct, reserve_margin)?,
        })
    }
}
