//! Field measurements on disk: an admissions table plus a long-format
//! series table, both comma-separated with one header row.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use adapta_core::ingest::{FieldDataset, IngestError};
use adapta_core::model::{IcuType, PatientRecord, Sample, SensorKind};
use thiserror::Error;

pub const ADMISSIONS_FILE: &str = "admissions.csv";
pub const SERIES_FILE: &str = "series.csv";

const ADMISSIONS_HEADER: &str = "record_id,age,gender,height_m,weight_kg,icu";
const SERIES_HEADER: &str = "record_id,t_offset_s,sensor,value";

#[derive(Debug, Error)]
pub enum FieldDataError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}:{line}: {msg}")]
    Parse { file: &'static str, line: usize, msg: String },
    #[error(transparent)]
    Invalid(#[from] IngestError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FieldDataError + '_ {
    move |source| FieldDataError::Io { path: path.to_path_buf(), source }
}

pub fn write_field_data(dir: &Path, data: &FieldDataset) -> Result<(), FieldDataError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let mut admissions = String::from(ADMISSIONS_HEADER);
    admissions.push('\n');
    for r in &data.records {
        let _ = writeln!(
            admissions,
            "{},{},{},{},{},{}",
            r.record_id,
            r.age,
            r.gender,
            r.height_m,
            r.weight_kg,
            r.icu.label()
        );
    }
    let path = dir.join(ADMISSIONS_FILE);
    fs::write(&path, admissions).map_err(io_err(&path))?;

    let mut series = String::from(SERIES_HEADER);
    series.push('\n');
    for r in &data.records {
        for sensor in SensorKind::ALL {
            for s in &r.series[sensor.index()] {
                let _ = writeln!(
                    series,
                    "{},{},{},{}",
                    r.record_id,
                    s.t_offset,
                    sensor.label(),
                    s.value
                );
            }
        }
    }
    let path = dir.join(SERIES_FILE);
    fs::write(&path, series).map_err(io_err(&path))?;
    Ok(())
}

fn parse_err(file: &'static str, line: usize, msg: impl Into<String>) -> FieldDataError {
    FieldDataError::Parse { file, line, msg: msg.into() }
}

pub fn read_field_data(dir: &Path) -> Result<FieldDataset, FieldDataError> {
    let path = dir.join(ADMISSIONS_FILE);
    let admissions = fs::read_to_string(&path).map_err(io_err(&path))?;
    let mut lines = admissions.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == ADMISSIONS_HEADER => {}
        _ => return Err(parse_err(ADMISSIONS_FILE, 1, "missing admissions header")),
    }

    let mut records: Vec<PatientRecord> = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for (i, line) in lines {
        let n = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let [record_id, age, gender, height_m, weight_kg, icu] = fields[..] else {
            return Err(parse_err(ADMISSIONS_FILE, n, "expected 6 fields"));
        };
        let age: u32 =
            age.parse().map_err(|_| parse_err(ADMISSIONS_FILE, n, "bad age"))?;
        let height_m: f64 =
            height_m.parse().map_err(|_| parse_err(ADMISSIONS_FILE, n, "bad height_m"))?;
        let weight_kg: f64 =
            weight_kg.parse().map_err(|_| parse_err(ADMISSIONS_FILE, n, "bad weight_kg"))?;
        let icu = IcuType::parse(icu)
            .ok_or_else(|| parse_err(ADMISSIONS_FILE, n, format!("unknown icu {icu:?}")))?;
        by_id.insert(record_id.to_string(), records.len());
        records.push(PatientRecord {
            record_id: record_id.to_string(),
            age,
            gender: gender.to_string(),
            height_m,
            weight_kg,
            icu,
            series: std::array::from_fn(|_| Vec::new()),
        });
    }

    let path = dir.join(SERIES_FILE);
    let series = fs::read_to_string(&path).map_err(io_err(&path))?;
    let mut lines = series.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == SERIES_HEADER => {}
        _ => return Err(parse_err(SERIES_FILE, 1, "missing series header")),
    }
    for (i, line) in lines {
        let n = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let [record_id, t_offset, sensor, value] = fields[..] else {
            return Err(parse_err(SERIES_FILE, n, "expected 4 fields"));
        };
        let idx = *by_id
            .get(record_id)
            .ok_or_else(|| parse_err(SERIES_FILE, n, format!("unknown record {record_id}")))?;
        let sensor = SensorKind::parse(sensor)
            .ok_or_else(|| parse_err(SERIES_FILE, n, format!("unknown sensor {sensor:?}")))?;
        let t_offset: f64 =
            t_offset.parse().map_err(|_| parse_err(SERIES_FILE, n, "bad t_offset_s"))?;
        let value: f64 = value.parse().map_err(|_| parse_err(SERIES_FILE, n, "bad value"))?;
        records[idx].series[sensor.index()].push(Sample { t_offset, value });
    }

    Ok(FieldDataset::new(records)?)
}
