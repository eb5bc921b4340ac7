use std::path::PathBuf;

use adapta::commands::{
    cmd_derive, cmd_gen_data, cmd_report, cmd_run, CommandError, ExperimentSpec,
};
use adapta_core::{RunMode, Scenario};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "adapta",
    version,
    about = "Self-adaptive test sessions against a simulated body sensor network"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic field dataset (admissions + vital series)
    GenData {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of admission records
        #[arg(long, default_value_t = 26)]
        records: usize,
        /// Samples per sensor series
        #[arg(long, default_value_t = 720)]
        samples: usize,
        /// Output directory (ADAPTA_OUT overrides)
        #[arg(long, default_value = "data")]
        out: PathBuf,
    },
    /// Derive per-profile patient models from field data
    Derive {
        /// Directory holding admissions.csv and series.csv
        #[arg(long)]
        data: PathBuf,
        /// Model file to write
        #[arg(long, default_value = "model.txt")]
        out: PathBuf,
    },
    /// Execute test sessions and write run logs plus a report
    Run {
        /// Scenarios to run (comma-separated)
        #[arg(long, value_delimiter = ',', default_value = "all")]
        scenario: Vec<ScenarioArg>,
        #[arg(long, default_value = "both")]
        mode: ModeArg,
        /// Repetitions per scenario and mode
        #[arg(long, default_value_t = 5)]
        reps: u32,
        /// Patient-simulation seed of repetition 1; later repetitions
        /// increment it
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Sensor-network seed of repetition 1
        #[arg(long, default_value_t = 1)]
        sut_seed: u64,
        /// Model file from `derive`
        #[arg(long)]
        model: PathBuf,
        /// Output directory (ADAPTA_OUT overrides)
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        /// Ticks per scheduled profile
        #[arg(long, default_value_t = 3600)]
        duration: u64,
        /// Tested ticks at the start of each periodic cycle
        #[arg(long, default_value_t = 60)]
        test_window: u64,
        /// Untested ticks completing each periodic cycle
        #[arg(long, default_value_t = 300)]
        pause: u64,
        /// Battery percent drained per tick before per-sensor scaling;
        /// defaults to 0.65 under s1 and 0.05 otherwise
        #[arg(long)]
        battery_rate: Option<f64>,
        /// Chance that the network misreports an outcome by one level
        #[arg(long, default_value_t = 0.05)]
        misclassify_prob: f64,
        /// Worker threads for executing runs
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Rebuild the report tables from existing run logs
    Report {
        /// Directory holding runlog_*.csv files
        #[arg(long)]
        logs: PathBuf,
        /// Output directory; defaults to the logs directory
        /// (ADAPTA_OUT overrides)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum ScenarioArg {
    S1,
    S2,
    S3,
    All,
}

#[derive(ValueEnum, Clone, Copy)]
enum ModeArg {
    Adaptive,
    Baseline,
    Both,
}

fn scenarios(args: &[ScenarioArg]) -> Vec<Scenario> {
    if args.contains(&ScenarioArg::All) {
        return Scenario::ALL.to_vec();
    }
    // Canonical order, duplicates collapsed.
    Scenario::ALL
        .into_iter()
        .filter(|s| {
            args.iter().any(|a| {
                matches!(
                    (a, s),
                    (ScenarioArg::S1, Scenario::S1)
                        | (ScenarioArg::S2, Scenario::S2)
                        | (ScenarioArg::S3, Scenario::S3)
                )
            })
        })
        .collect()
}

fn modes(arg: ModeArg) -> Vec<RunMode> {
    match arg {
        ModeArg::Adaptive => vec![RunMode::Adaptive],
        ModeArg::Baseline => vec![RunMode::Baseline],
        ModeArg::Both => vec![RunMode::Baseline, RunMode::Adaptive],
    }
}

/// ADAPTA_OUT redirects any output directory flag.
fn out_override(out: PathBuf) -> PathBuf {
    std::env::var_os("ADAPTA_OUT").map(PathBuf::from).unwrap_or(out)
}

fn dispatch(cmd: Cmd) -> Result<(), CommandError> {
    match cmd {
        Cmd::GenData { seed, records, samples, out } => {
            cmd_gen_data(seed, records, samples, &out_override(out))
        }
        Cmd::Derive { data, out } => cmd_derive(&data, &out),
        Cmd::Run {
            scenario,
            mode,
            reps,
            seed,
            sut_seed,
            model,
            out,
            duration,
            test_window,
            pause,
            battery_rate,
            misclassify_prob,
            jobs,
        } => cmd_run(&ExperimentSpec {
            scenarios: scenarios(&scenario),
            modes: modes(mode),
            reps,
            patient_seed: seed,
            sut_seed,
            model,
            out: out_override(out),
            duration,
            test_window,
            pause,
            battery_rate,
            misclassify_prob,
            jobs,
        }),
        Cmd::Report { logs, out } => {
            let out = std::env::var_os("ADAPTA_OUT").map(PathBuf::from).or(out);
            cmd_report(&logs, out.as_deref())
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not mistakes.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = dispatch(cli.cmd) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
