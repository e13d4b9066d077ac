//! CSV readers and writers for the input datasets.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use chrono::{Duration, NaiveDate, NaiveDateTime};

use crate::charging::{ChargingProfile, HourlyLoadSeries, ProfileLabel, HOURS_PER_DAY};
use crate::error::{Error, Result};
use crate::fleet::{Incentive, IncentiveCoefficients};
use crate::scalar::Scalar;
use crate::travel::{BinValues, DailyTravelRecord, DistanceBin, TripConversionTable};

pub const LOAD_HEADER: [&str; 2] = ["timestamp_iso8601", "load_mw"];
pub const TRAVEL_HEADER: [&str; 3] = ["date_iso8601", "bin", "person_trips"];
pub const PROFILE_HEADER: [&str; 2] = ["hour", "fraction"];
pub const INCENTIVE_HEADER: [&str; 3] = ["incentive", "unit", "coefficient_pct"];
pub const CONVERSION_HEADER: [&str; 4] = ["bin", "vt_per_pt", "rep_distance_mi", "kwh_per_mi"];

const TIMESTAMP_FORMATS: [&str; 3] = ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M:%S"];

struct Rows<'a> {
    path: &'a Path,
    reader: csv::Reader<File>,
}

impl<'a> Rows<'a> {
    fn open(path: &'a Path, header: &[&str]) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(file);
        let found = reader.headers().map_err(|e| csv_error(path, e))?.clone();
        if found.iter().ne(header.iter().copied()) {
            return Err(Error::MalformedRow {
                path: path.into(),
                line: 1,
                message: format!(
                    "expected header `{}`, found `{}`",
                    header.join(","),
                    found.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }
        Ok(Self { path, reader })
    }

    /// Calls `f` with each record and its 1-based line number.
    fn for_each(
        mut self,
        width: usize,
        mut f: impl FnMut(&csv::StringRecord, u64) -> std::result::Result<(), String>,
    ) -> Result<()> {
        let mut record = csv::StringRecord::new();
        loop {
            match self.reader.read_record(&mut record) {
                Ok(false) => return Ok(()),
                Ok(true) => {}
                Err(e) => return Err(csv_error(self.path, e)),
            }
            let line = record.position().map_or(0, |p| p.line());
            if record.len() == 1 && record[0].is_empty() {
                continue;
            }
            if record.len() != width {
                return Err(self.malformed(line, format!("expected {width} fields, found {}", record.len())));
            }
            f(&record, line).map_err(|m| self.malformed(line, m))?;
        }
    }

    fn malformed(&self, line: u64, message: String) -> Error {
        Error::MalformedRow {
            path: self.path.into(),
            line,
            message,
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        kind => Error::MalformedRow {
            path: path.into(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn number<T: Scalar>(field: &str, what: &str) -> std::result::Result<T, String> {
    let v: f64 = field.parse().map_err(|_| format!("{what} `{field}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("{what} `{field}` is not finite"));
    }
    Ok(T::of(v))
}

pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    TIMESTAMP_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

pub fn format_timestamp(t: NaiveDateTime) -> String {
    t.format(TIMESTAMP_FORMATS[0]).to_string()
}

/// Reads `timestamp_iso8601,load_mw`; timestamps must advance by exactly one hour.
pub fn read_load_csv<T: Scalar>(path: &Path) -> Result<HourlyLoadSeries<T>> {
    let rows = Rows::open(path, &LOAD_HEADER)?;
    let mut start = None;
    let mut values = Vec::new();
    let mut gap = None;
    rows.for_each(2, |r, _| {
        let ts = parse_timestamp(&r[0]).ok_or_else(|| format!("bad timestamp `{}`", &r[0]))?;
        let load: T = number(&r[1], "load_mw")?;
        if load < T::zero() {
            return Err(format!("negative load {load}"));
        }
        match start {
            None => start = Some(ts),
            Some(s) => {
                let expected = s + Duration::hours(values.len() as i64);
                if ts < expected {
                    return Err(format!("timestamp {ts} not after previous hour"));
                }
                if ts > expected && gap.is_none() {
                    gap = Some((expected, ts));
                }
            }
        }
        values.push(load);
        Ok(())
    })?;
    if let Some((expected, found)) = gap {
        return Err(Error::LoadGap { expected, found });
    }
    let start = start.ok_or(Error::EmptySeries)?;
    HourlyLoadSeries::new(start, values)
}

pub fn write_load_csv<T: Scalar>(path: &Path, series: &HourlyLoadSeries<T>) -> Result<()> {
    let mut out = String::with_capacity(series.len() * 32);
    out.push_str(&LOAD_HEADER.join(","));
    out.push('\n');
    for (i, v) in series.values().iter().enumerate() {
        out.push_str(&format!("{},{}\n", format_timestamp(series.timestamp(i)), v.as_f64()));
    }
    write_file(path, &out)
}

/// Reads `date_iso8601,bin,person_trips` into one record per date, sorted.
pub fn read_travel_csv<T: Scalar>(path: &Path) -> Result<Vec<DailyTravelRecord<T>>> {
    let rows = Rows::open(path, &TRAVEL_HEADER)?;
    let mut days: BTreeMap<NaiveDate, [Option<T>; 5]> = BTreeMap::new();
    rows.for_each(3, |r, _| {
        let date = NaiveDate::parse_from_str(&r[0], "%Y-%m-%d").map_err(|_| format!("bad date `{}`", &r[0]))?;
        let bin: DistanceBin = r[1].parse().map_err(|e: Error| e.to_string())?;
        let trips: T = number(&r[2], "person_trips")?;
        if trips < T::zero() {
            return Err(format!("negative person_trips {trips}"));
        }
        let slot = &mut days.entry(date).or_default()[bin.index()];
        if slot.is_some() {
            return Err(format!("duplicate entry for {date} {bin}"));
        }
        *slot = Some(trips);
        Ok(())
    })?;
    days.into_iter()
        .map(|(date, bins)| {
            let mut trips = BinValues::splat(T::zero());
            for bin in DistanceBin::ALL {
                trips[bin] = bins[bin.index()].ok_or(Error::MissingBin { date, bin: bin.code() })?;
            }
            DailyTravelRecord::new(date, trips)
        })
        .collect()
}

pub fn write_travel_csv<T: Scalar>(path: &Path, travel: &[DailyTravelRecord<T>]) -> Result<()> {
    let mut out = TRAVEL_HEADER.join(",");
    out.push('\n');
    for rec in travel {
        for (bin, v) in rec.person_trips.iter() {
            out.push_str(&format!("{},{},{}\n", rec.date.format("%Y-%m-%d"), bin, v.as_f64()));
        }
    }
    write_file(path, &out)
}

/// Reads `hour,fraction` with every hour 0..23 listed exactly once.
pub fn read_profile_csv<T: Scalar>(path: &Path, label: ProfileLabel) -> Result<ChargingProfile<T>> {
    let rows = Rows::open(path, &PROFILE_HEADER)?;
    let mut fractions: [Option<T>; HOURS_PER_DAY] = [None; HOURS_PER_DAY];
    rows.for_each(2, |r, _| {
        let hour: usize = r[0].parse().map_err(|_| format!("bad hour `{}`", &r[0]))?;
        if hour >= HOURS_PER_DAY {
            return Err(format!("hour {hour} outside 0..23"));
        }
        let f: T = number(&r[1], "fraction")?;
        if fractions[hour].replace(f).is_some() {
            return Err(format!("hour {hour} listed twice"));
        }
        Ok(())
    })?;
    let mut out = [T::zero(); HOURS_PER_DAY];
    for (h, f) in fractions.iter().enumerate() {
        out[h] = f.ok_or_else(|| Error::MalformedRow {
            path: path.into(),
            line: 0,
            message: format!("hour {h} missing"),
        })?;
    }
    ChargingProfile::new(label, out)
}

pub fn write_profile_csv<T: Scalar>(path: &Path, profile: &ChargingProfile<T>) -> Result<()> {
    let mut out = PROFILE_HEADER.join(",");
    out.push('\n');
    for (h, f) in profile.fractions().iter().enumerate() {
        out.push_str(&format!("{h},{}\n", f.as_f64()));
    }
    write_file(path, &out)
}

/// Reads `incentive,unit,coefficient_pct`; unlisted incentives keep their defaults.
pub fn read_incentive_coefficients<T: Scalar>(path: &Path) -> Result<IncentiveCoefficients<T>> {
    let rows = Rows::open(path, &INCENTIVE_HEADER)?;
    let mut coeffs = IncentiveCoefficients::default();
    rows.for_each(3, |r, _| {
        let inc = Incentive::from_name(&r[0]).ok_or_else(|| format!("unknown incentive `{}`", &r[0]))?;
        if &r[1] != inc.unit() {
            return Err(format!(
                "{} is measured in {}, found unit `{}`",
                inc.name(),
                inc.unit(),
                &r[1]
            ));
        }
        coeffs.set(inc, number(&r[2], "coefficient_pct")?);
        Ok(())
    })?;
    Ok(coeffs)
}

pub fn write_incentive_coefficients<T: Scalar>(path: &Path, coeffs: &IncentiveCoefficients<T>) -> Result<()> {
    let mut out = INCENTIVE_HEADER.join(",");
    out.push('\n');
    for inc in Incentive::ALL {
        out.push_str(&format!("{},{},{}\n", inc.name(), inc.unit(), coeffs.get(inc).as_f64()));
    }
    write_file(path, &out)
}

/// Reads `bin,vt_per_pt,rep_distance_mi,kwh_per_mi` with all five bins.
pub fn read_conversion_table<T: Scalar>(path: &Path) -> Result<TripConversionTable<T>> {
    let rows = Rows::open(path, &CONVERSION_HEADER)?;
    let mut seen = [None; 5];
    rows.for_each(4, |r, _| {
        let bin: DistanceBin = r[0].parse().map_err(|e: Error| e.to_string())?;
        let row: (T, T, T) = (
            number(&r[1], "vt_per_pt")?,
            number(&r[2], "rep_distance_mi")?,
            number(&r[3], "kwh_per_mi")?,
        );
        if seen[bin.index()].replace(row).is_some() {
            return Err(format!("bin {bin} listed twice"));
        }
        Ok(())
    })?;
    let mut vt = BinValues::splat(T::zero());
    let mut dist = BinValues::splat(T::zero());
    let mut kwh = BinValues::splat(T::zero());
    for bin in DistanceBin::ALL {
        let (a, b, c) = seen[bin.index()].ok_or_else(|| Error::MalformedRow {
            path: path.into(),
            line: 0,
            message: format!("bin {bin} missing"),
        })?;
        vt[bin] = a;
        dist[bin] = b;
        kwh[bin] = c;
    }
    TripConversionTable::new(vt, dist, kwh)
}

pub fn write_conversion_table<T: Scalar>(path: &Path, table: &TripConversionTable<T>) -> Result<()> {
    let mut out = CONVERSION_HEADER.join(",");
    out.push('\n');
    for bin in DistanceBin::ALL {
        out.push_str(&format!(
            "{bin},{},{},{}\n",
            table.vt_per_pt()[bin].as_f64(),
            table.rep_distance_mi()[bin].as_f64(),
            table.kwh_per_mi()[bin].as_f64()
        ));
    }
    write_file(path, &out)
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))
}
