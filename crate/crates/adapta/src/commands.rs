//! The four commands behind the binary: generate field data, derive
//! patient models, execute test sessions, rebuild reports.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use adapta_core::{
    build_profile_models, ptcr, run, FaultConfig, ProfileId, ProfileModel, RiskRangeTable,
    RunConfig, RunMode, RunLog, Scenario, Schedule,
};
use thiserror::Error;

use crate::formats::field_data::{read_field_data, write_field_data, FieldDataError};
use crate::formats::model_file::{read_model_file, write_model_file, ModelFileError};
use crate::formats::report::{build_report, ReportBundle, ReportError};
use crate::formats::runlog::{read_runlog, runlog_file_name, write_runlog, ParsedRunLog, RunlogError};

pub const REPORT_SCENARIOS_FILE: &str = "report_scenarios.csv";
pub const REPORT_PROFILES_FILE: &str = "report_profiles.csv";
pub const REPORT_SUMMARY_FILE: &str = "report.txt";

#[derive(Debug, Error)]
pub enum CommandError {
    /// A bad flag or argument value; the command exits 1.
    #[error("{0}")]
    Usage(String),
    /// Unreadable, unwritable or invalid data; the command exits 2.
    #[error("{0}")]
    Data(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Usage(_) => 1,
            CommandError::Data(_) => 2,
        }
    }
}

macro_rules! into_data {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CommandError {
            fn from(e: $ty) -> Self {
                CommandError::Data(e.to_string())
            }
        }
    )*};
}
into_data!(FieldDataError, ModelFileError, RunlogError, ReportError, adapta_core::RunError);

fn io_data(path: &Path, e: std::io::Error) -> CommandError {
    CommandError::Data(format!("{}: {e}", path.display()))
}

pub fn cmd_gen_data(seed: u64, records: usize, samples: usize, out: &Path) -> Result<(), CommandError> {
    let data = adapta_core::generate_synthetic_dataset(seed, records, samples)
        .map_err(|e| CommandError::Usage(e.to_string()))?;
    write_field_data(out, &data)?;
    println!(
        "wrote {} records with {} samples per series to {}",
        records,
        samples,
        out.display()
    );
    Ok(())
}

pub fn cmd_derive(data_dir: &Path, out: &Path) -> Result<(), CommandError> {
    let data = read_field_data(data_dir)?;
    let (models, empty) = build_profile_models(&data, &RiskRangeTable::default_table())
        .map_err(|e| CommandError::Data(e.to_string()))?;
    for profile in &empty {
        eprintln!("warning: no transitions for profile {profile}; its chains fall back to uniform");
    }
    write_model_file(out, &models)?;
    println!("derived {} profile models from {} records into {}", models.len(), data.records.len(), out.display());
    Ok(())
}

/// One `run` invocation: which runs to execute and where results go.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub scenarios: Vec<Scenario>,
    pub modes: Vec<RunMode>,
    pub reps: u32,
    pub patient_seed: u64,
    pub sut_seed: u64,
    pub model: PathBuf,
    pub out: PathBuf,
    pub duration: u64,
    pub test_window: u64,
    pub pause: u64,
    /// None defers to the per-scenario default.
    pub battery_rate: Option<f64>,
    pub misclassify_prob: f64,
    pub jobs: usize,
}

fn validate_spec(spec: &ExperimentSpec) -> Result<(), CommandError> {
    let usage = |msg: &str| Err(CommandError::Usage(msg.to_string()));
    if spec.scenarios.is_empty() || spec.modes.is_empty() {
        return usage("nothing to run: no scenario or mode selected");
    }
    if spec.reps == 0 {
        return usage("--reps must be at least 1");
    }
    if spec.duration == 0 {
        return usage("--duration must be at least 1 tick");
    }
    if spec.test_window == 0 {
        return usage("--test-window must be at least 1 tick");
    }
    if spec.jobs == 0 {
        return usage("--jobs must be at least 1");
    }
    if !(0.0..=1.0).contains(&spec.misclassify_prob) {
        return usage("--misclassify-prob must lie in [0, 1]");
    }
    if let Some(rate) = spec.battery_rate {
        if !rate.is_finite() || rate < 0.0 {
            return usage("--battery-rate must be a finite non-negative number");
        }
    }
    Ok(())
}

struct WorkItem {
    config: RunConfig,
    path: PathBuf,
}

fn plan_runs(spec: &ExperimentSpec) -> Result<Vec<WorkItem>, CommandError> {
    let mut items = Vec::new();
    for &scenario in &spec.scenarios {
        // The oracle-weight scenario only has weights for BMI classes,
        // so its schedule narrows to those six profiles.
        let profiles: &[ProfileId] = match scenario {
            Scenario::S2 => &ProfileId::BMI,
            _ => &ProfileId::ALL,
        };
        for &mode in &spec.modes {
            for rep in 1..=spec.reps {
                let schedule = Schedule::uniform(profiles, spec.duration)
                    .map_err(|e| CommandError::Usage(e.to_string()))?;
                let mut config = RunConfig::new(scenario, mode, schedule);
                config.patient_seed = spec.patient_seed + u64::from(rep - 1);
                config.sut_seed = spec.sut_seed + u64::from(rep - 1);
                config.battery_rate =
                    spec.battery_rate.unwrap_or_else(|| scenario.default_battery_rate());
                config.faults = FaultConfig {
                    misclassify_prob: spec.misclassify_prob,
                    ..FaultConfig::default()
                };
                config.test_window = spec.test_window;
                config.pause = spec.pause;
                config.repetition = rep;
                config.validate().map_err(|e| CommandError::Usage(e.to_string()))?;
                items.push(WorkItem {
                    config,
                    path: spec.out.join(runlog_file_name(scenario, mode, rep)),
                });
            }
        }
    }
    Ok(items)
}

fn execute_item(item: &WorkItem, models: &[ProfileModel]) -> Result<(), CommandError> {
    let log: RunLog = run(&item.config, models)?;
    write_runlog(&item.path, &log)?;
    Ok(())
}

pub fn cmd_run(spec: &ExperimentSpec) -> Result<(), CommandError> {
    validate_spec(spec)?;
    let models = read_model_file(&spec.model)?;
    let items = plan_runs(spec)?;
    std::fs::create_dir_all(&spec.out).map_err(|e| io_data(&spec.out, e))?;

    let jobs = spec.jobs.min(items.len());
    if jobs <= 1 {
        for item in &items {
            execute_item(item, &models)?;
        }
    } else {
        let next = AtomicUsize::new(0);
        let failures: Mutex<Vec<(usize, CommandError)>> = Mutex::new(Vec::new());
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(item) = items.get(i) else { break };
                    if let Err(e) = execute_item(item, &models) {
                        failures.lock().unwrap().push((i, e));
                    }
                });
            }
        });
        let mut failures = failures.into_inner().unwrap();
        failures.sort_by_key(|(i, _)| *i);
        if let Some((_, e)) = failures.into_iter().next() {
            return Err(e);
        }
    }

    // Reread what was just written: the report must reflect the files,
    // and a later `report` run over them stays byte-identical.
    let mut logs = Vec::with_capacity(items.len());
    for item in &items {
        logs.push(read_runlog(&item.path)?);
    }
    for (item, log) in items.iter().zip(&logs) {
        let (passes, total) = log.verdict_counts();
        let rate = match ptcr(passes, total) {
            Some(r) => format!("{r:.2}"),
            None => "NA".to_string(),
        };
        println!("wrote {} (PTCR {rate})", item.path.display());
    }
    let bundle = build_report(&logs)?;
    for path in write_report_files(&spec.out, &bundle)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn write_report_files(dir: &Path, bundle: &ReportBundle) -> Result<[PathBuf; 3], CommandError> {
    std::fs::create_dir_all(dir).map_err(|e| io_data(dir, e))?;
    let paths = [
        dir.join(REPORT_SCENARIOS_FILE),
        dir.join(REPORT_PROFILES_FILE),
        dir.join(REPORT_SUMMARY_FILE),
    ];
    let contents = [&bundle.scenarios_csv, &bundle.profiles_csv, &bundle.summary];
    for (path, text) in paths.iter().zip(contents) {
        std::fs::write(path, text).map_err(|e| io_data(path, e))?;
    }
    Ok(paths)
}

pub fn cmd_report(logs_dir: &Path, out: Option<&Path>) -> Result<(), CommandError> {
    let entries = std::fs::read_dir(logs_dir).map_err(|e| io_data(logs_dir, e))?;
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| io_data(logs_dir, e))?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if name.starts_with("runlog_") && name.ends_with(".csv") {
            paths.push(entry.path());
        }
    }
    if paths.is_empty() {
        return Err(CommandError::Data(format!(
            "no run logs (runlog_*.csv) found in {}",
            logs_dir.display()
        )));
    }
    paths.sort();

    let mut logs: Vec<ParsedRunLog> = Vec::with_capacity(paths.len());
    for path in &paths {
        logs.push(read_runlog(path)?);
    }
    let bundle = build_report(&logs)?;
    for path in write_report_files(out.unwrap_or(logs_dir), &bundle)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
