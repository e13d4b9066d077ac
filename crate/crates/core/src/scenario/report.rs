//! Report rows and their table / CSV / JSON renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::ReserveStatus;

use super::config::{ChargingMode, ImpactMethod};

#[derive(Debug, Clone, PartialEq)]
pub struct ImpactRow {
    pub year: i32,
    pub market_share_pct: f64,
    /// fractional until emitted
    pub ev_count: f64,
    pub ev_pct: f64,
    pub pli_unmanaged_pct: f64,
    pub pli_managed_pct: f64,
    pub reserve_status: ReserveStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpactReport {
    pub scenario: String,
    pub growth_mode: String,
    pub charging_mode: ChargingMode,
    pub method: ImpactMethod,
    pub plif: f64,
    pub managed_factor: f64,
    pub reserve_margin: f64,
    pub rows: Vec<ImpactRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub reports: Vec<ImpactReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Self::Table),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::invalid(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Serialize)]
struct EmittedRow<'a> {
    scenario: &'a str,
    year: i32,
    market_share_pct: f64,
    ev_count: u64,
    ev_pct: f64,
    pli_unmanaged_pct: f64,
    pli_managed_pct: f64,
    reserve_status: ReserveStatus,
}

#[derive(Serialize)]
struct EmittedReport<'a> {
    scenario: &'a str,
    growth_mode: &'a str,
    charging_mode: ChargingMode,
    method: ImpactMethod,
    plif: f64,
    managed_factor: f64,
    reserve_margin: f64,
    rows: Vec<EmittedRow<'a>>,
}

const CSV_HEADER: &str =
    "scenario,year,market_share_pct,ev_count,ev_pct,pli_unmanaged_pct,pli_managed_pct,reserve_status,plif";

/// `x` with three significant figures.
pub fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (2 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

impl ImpactReport {
    fn emitted(&self) -> EmittedReport<'_> {
        EmittedReport {
            scenario: &self.scenario,
            growth_mode: &self.growth_mode,
            charging_mode: self.charging_mode,
            method: self.method,
            plif: self.plif,
            managed_factor: self.managed_factor,
            reserve_margin: self.reserve_margin,
            rows: self
                .rows
                .iter()
                .map(|r| EmittedRow {
                    scenario: &self.scenario,
                    year: r.year,
                    market_share_pct: r.market_share_pct,
                    ev_count: r.ev_count.round() as u64,
                    ev_pct: r.ev_pct,
                    pli_unmanaged_pct: r.pli_unmanaged_pct,
                    pli_managed_pct: r.pli_managed_pct,
                    reserve_status: r.reserve_status,
                })
                .collect(),
        }
    }

    fn csv_rows(&self, out: &mut String) {
        for r in self.emitted().rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.scenario,
                r.year,
                r.market_share_pct,
                r.ev_count,
                r.ev_pct,
                r.pli_unmanaged_pct,
                r.pli_managed_pct,
                r.reserve_status,
                self.plif
            );
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        self.csv_rows(&mut out);
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.emitted()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "scenario {} ({}, {} charging, {}): PLIF {}\n",
            self.scenario,
            self.growth_mode,
            self.charging_mode.as_str(),
            self.method.as_str(),
            sig3(self.plif)
        );
        out.push_str(&table(std::slice::from_ref(self), false));
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Table => self.to_table(),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

fn table(reports: &[ImpactReport], with_scenario: bool) -> String {
    let mut header = vec!["year", "market share", "EVs", "EV %", "unmanaged", "managed", "reserve"];
    if with_scenario {
        header.insert(0, "scenario");
    }
    let mut cells: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for rep in reports {
        for r in &rep.rows {
            let mut line = vec![
                r.year.to_string(),
                format!("{}%", sig3(r.market_share_pct)),
                format!("{}", r.ev_count.round() as u64),
                format!("{}%", sig3(r.ev_pct)),
                format!("{}%", sig3(r.pli_unmanaged_pct)),
                format!("{}%", sig3(r.pli_managed_pct)),
                r.reserve_status.to_string(),
            ];
            if with_scenario {
                line.insert(0, rep.scenario.clone());
            }
            cells.push(line);
        }
    }
    let widths: Vec<usize> = (0..cells[0].len())
        .map(|c| cells.iter().map(|row| row[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &cells {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (cell, w))| {
                if i == 0 && with_scenario {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

impl Comparison {
    pub fn to_table(&self) -> String {
        table(&self.reports, true)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in &self.reports {
            r.csv_rows(&mut out);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let v: Vec<_> = self.reports.iter().map(ImpactReport::emitted).collect();
        let mut s = serde_json::to_string_pretty(&v).expect("comparison serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Table => self.to_table(),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn report(&self, scenario: &str) -> Option<&ImpactReport> {
        self.reports.iter().find(|r| r.scenario == scenario)
    }
}
