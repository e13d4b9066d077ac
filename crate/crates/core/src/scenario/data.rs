use std::path::{Path, PathBuf};

use chrono::Datelike;

use crate::charging::{hours_in_year, year_start, ChargingProfile, HourlyLoadSeries, ProfileLabel};
use crate::error::{Error, Result};
use crate::io;
use crate::travel::DailyTravelRecord;

/// Inputs shared by every scenario: one sample year of load and travel plus
/// the two charging profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub baseline_load: HourlyLoadSeries<f64>,
    pub travel: Vec<DailyTravelRecord<f64>>,
    pub profile_unmanaged: ChargingProfile<f64>,
    pub profile_managed: ChargingProfile<f64>,
}

impl DatasetBundle {
    /// Checks that load and travel cover the same calendar year completely.
    pub fn new(
        baseline_load: HourlyLoadSeries<f64>,
        travel: Vec<DailyTravelRecord<f64>>,
        profile_unmanaged: ChargingProfile<f64>,
        profile_managed: ChargingProfile<f64>,
    ) -> Result<Self> {
        let year = travel.first().ok_or(Error::EmptySeries)?.date.year();
        let first = chrono::NaiveDate::from_ymd_opt(year, 1, 1).expect("valid year");
        if travel[0].date != first {
            return Err(Error::MissingDay(first));
        }
        for (i, expected) in first.iter_days().take_while(|d| d.year() == year).enumerate() {
            match travel.get(i) {
                Some(r) if r.date == expected => {}
                Some(r) if r.date < expected => return Err(Error::DuplicateDay(r.date)),
                _ => return Err(Error::MissingDay(expected)),
            }
        }
        if let Some(extra) = travel.get(crate::charging::days_in_year(year)) {
            return Err(Error::invalid(format!(
                "travel day {} lies outside sample year {year}",
                extra.date
            )));
        }

        let expected_start = year_start(year);
        if baseline_load.start() != expected_start {
            return Err(Error::LoadMisaligned {
                expected: expected_start,
                found: baseline_load.start(),
            });
        }
        if baseline_load.len() != hours_in_year(year) {
            return Err(Error::LoadCoverage {
                expected: hours_in_year(year),
                found: baseline_load.len(),
            });
        }
        Ok(Self {
            baseline_load,
            travel,
            profile_unmanaged,
            profile_managed,
        })
    }

    pub fn sample_year(&self) -> i32 {
        self.travel[0].date.year()
    }

    /// Multiplies every population-linked quantity (trips, baseline load) by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            baseline_load: self.baseline_load.scaled(k),
            travel: self
                .travel
                .iter()
                .map(|r| DailyTravelRecord {
                    date: r.date,
                    person_trips: crate::travel::BinValues(r.person_trips.0.map(|t| t * k)),
                })
                .collect(),
            profile_unmanaged: self.profile_unmanaged.clone(),
            profile_managed: self.profile_managed.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetPaths {
    pub load: PathBuf,
    pub travel: PathBuf,
    pub profile_unmanaged: PathBuf,
    pub profile_managed: PathBuf,
}

impl DatasetPaths {
    /// `load.csv`, `travel.csv`, `profile_unmanaged.csv`, `profile_managed.csv`.
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            load: dir.join("load.csv"),
            travel: dir.join("travel.csv"),
            profile_unmanaged: dir.join("profile_unmanaged.csv"),
            profile_managed: dir.join("profile_managed.csv"),
        }
    }
}

pub fn load_datasets(paths: &DatasetPaths) -> Result<DatasetBundle> {
    DatasetBundle::new(
        io::read_load_csv(&paths.load)?,
        io::read_travel_csv(&paths.travel)?,
        io::read_profile_csv(&paths.profile_unmanaged, ProfileLabel::Unmanaged)?,
        io::read_profile_csv(&paths.profile_managed, ProfileLabel::Managed)?,
    )
}
