//! Run logs on disk: `#`-prefixed header metadata echoing the full run
//! configuration, then one comma-separated row per tick.
//!
//! Row columns: tick, profile, the six logged sensor values (`DEACT`
//! when off), the network's fused outcome id, the expected outcome id
//! (blank when the tick was untested, `NA` when tested with every
//! sensor excluded), pass as 1/0 (blank when there is no verdict), and
//! a `;`-joined event column covering detected changes and the
//! adaptations applied that tick.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use adapta_core::harness::AdaptationPlan;
use adapta_core::{ChangeEventKind, OutcomeLevel, ProfileId, ReadingValue, RunLog, RunMode, Scenario};
use thiserror::Error;

pub const RUNLOG_FORMAT_VERSION: u32 = 1;

const MAGIC: &str = "# adapta-runlog 1";
const COLUMNS: &str =
    "tick,profile,oxi,ecg,term,abps,abpd,glc,bsn_outcome_id,expected_outcome_id,pass,events";

#[derive(Debug, Error)]
pub enum RunlogError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
}

/// Canonical log file name for one run; the report command globs for
/// this shape.
pub fn runlog_file_name(scenario: Scenario, mode: RunMode, repetition: u32) -> String {
    format!("runlog_{}_{}_rep{}.csv", scenario.label(), mode.label(), repetition)
}

fn event_token(kind: &ChangeEventKind) -> String {
    match kind {
        ChangeEventKind::SensorDeactivated(s) => format!("deact:{}", s.label()),
        ChangeEventKind::SensorActivated(s) => format!("act:{}", s.label()),
        ChangeEventKind::ProfileChanged(p) => format!("profile:{p}"),
        ChangeEventKind::CriticalDsr => "critical".to_string(),
    }
}

fn adaptation_token(action: &AdaptationPlan) -> String {
    match action {
        AdaptationPlan::ExcludeSensor(s) => format!("adapt:exclude:{}", s.label()),
        AdaptationPlan::IncludeSensor(s) => format!("adapt:include:{}", s.label()),
        AdaptationPlan::InstallWeights(p) => format!("adapt:weights:{p}"),
        AdaptationPlan::TestNow => "adapt:test-now".to_string(),
    }
}

pub fn write_runlog(path: &Path, log: &RunLog) -> Result<(), RunlogError> {
    let h = &log.header;
    let mut out = String::with_capacity(48 * log.entries.len() + 512);
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "# scenario {}", h.scenario.label());
    let _ = writeln!(out, "# mode {}", h.mode.label());
    let _ = writeln!(out, "# repetition {}", h.repetition);
    let _ = writeln!(out, "# patient_seed {}", h.patient_seed);
    let _ = writeln!(out, "# sut_seed {}", h.sut_seed);
    let _ = writeln!(out, "# battery_rate {}", h.battery_rate);
    let _ = writeln!(out, "# stale_hold {}", h.stale_hold);
    let _ = writeln!(out, "# misclassify_prob {}", h.misclassify_prob);
    let _ = writeln!(out, "# instant_recharge {}", h.instant_recharge);
    let _ = writeln!(out, "# threshold {}", h.threshold);
    let _ = writeln!(out, "# test_window {}", h.test_window);
    let _ = writeln!(out, "# pause {}", h.pause);
    let schedule: Vec<String> =
        h.schedule.iter().map(|(p, ticks)| format!("{p}={ticks}")).collect();
    let _ = writeln!(out, "# schedule {}", schedule.join(";"));
    let _ = writeln!(out, "# ticks {}", h.ticks);
    let _ = writeln!(out, "# dsr_test_cases {}", h.dsr_test_cases);
    let _ = writeln!(out, "# reading_test_cases {}", h.reading_test_cases);
    let _ = writeln!(out, "{COLUMNS}");

    let mut adaptations = log.adaptations.iter().peekable();
    for e in &log.entries {
        let _ = write!(out, "{},{}", e.tick, e.profile);
        for v in e.logged {
            match v {
                ReadingValue::Present(x) => {
                    let _ = write!(out, ",{x}");
                }
                ReadingValue::Deactivated => out.push_str(",DEACT"),
            }
        }
        let _ = write!(out, ",{}", e.bsn.id());
        match (e.tested, e.expected) {
            (false, _) => out.push(','),
            (true, Some(level)) => {
                let _ = write!(out, ",{}", level.id());
            }
            (true, None) => out.push_str(",NA"),
        }
        out.push_str(match e.pass {
            Some(true) => ",1",
            Some(false) => ",0",
            None => ",",
        });
        let mut tokens: Vec<String> = e.events.iter().map(event_token).collect();
        while let Some(a) = adaptations.next_if(|a| a.tick == e.tick) {
            tokens.push(adaptation_token(&a.action));
        }
        let _ = writeln!(out, ",{}", tokens.join(";"));
    }
    let _ = adaptations; // every record sits on some entry's tick
    fs::write(path, out).map_err(|source| RunlogError::Io { path: path.to_path_buf(), source })
}

/// One parsed log row; sensor values and events are checked for shape
/// but not retained, the report only needs verdicts per profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsedRow {
    pub tick: u64,
    pub profile: ProfileId,
    pub tested: bool,
    /// None when untested or when tested with every sensor excluded.
    pub expected: Option<OutcomeLevel>,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRunLog {
    pub scenario: Scenario,
    pub mode: RunMode,
    pub repetition: u32,
    pub patient_seed: u64,
    pub sut_seed: u64,
    pub ticks: u64,
    pub dsr_test_cases: u64,
    pub reading_test_cases: u64,
    pub rows: Vec<ParsedRow>,
}

impl ParsedRunLog {
    /// (passes, total) over rows with a verdict.
    pub fn verdict_counts(&self) -> (u64, u64) {
        let mut passes = 0;
        let mut total = 0;
        for row in &self.rows {
            if let Some(pass) = row.pass {
                total += 1;
                passes += u64::from(pass);
            }
        }
        (passes, total)
    }
}

struct HeaderCursor<'a> {
    path: &'a Path,
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> HeaderCursor<'a> {
    fn err(&self, line: usize, msg: impl Into<String>) -> RunlogError {
        RunlogError::Parse { path: self.path.to_path_buf(), line, msg: msg.into() }
    }

    fn next(&mut self) -> Result<(usize, &'a str), RunlogError> {
        let (i, line) =
            self.lines.next().ok_or_else(|| self.err(0, "unexpected end of file"))?;
        Ok((i + 1, line))
    }

    /// Reads the `# <key> <value>` line for `key`.
    fn meta(&mut self, key: &str) -> Result<&'a str, RunlogError> {
        let (n, line) = self.next()?;
        line.strip_prefix("# ")
            .and_then(|rest| rest.strip_prefix(key))
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.err(n, format!("expected '# {key} ...', got {line:?}")))
    }

    fn meta_parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, RunlogError> {
        let value = self.meta(key)?;
        value.parse().map_err(|_| self.err(0, format!("bad {key} value {value:?}")))
    }
}

pub fn read_runlog(path: &Path) -> Result<ParsedRunLog, RunlogError> {
    let text = fs::read_to_string(path)
        .map_err(|source| RunlogError::Io { path: path.to_path_buf(), source })?;
    let mut cur = HeaderCursor { path, lines: text.lines().enumerate() };

    let (n, magic) = cur.next()?;
    if magic != MAGIC {
        return Err(cur.err(n, format!("not a run log (expected {MAGIC:?})")));
    }
    let scenario = cur.meta("scenario")?;
    let scenario = Scenario::parse(scenario)
        .ok_or_else(|| cur.err(2, format!("unknown scenario {scenario:?}")))?;
    let mode = cur.meta("mode")?;
    let mode =
        RunMode::parse(mode).ok_or_else(|| cur.err(3, format!("unknown mode {mode:?}")))?;
    let repetition: u32 = cur.meta_parse("repetition")?;
    let patient_seed: u64 = cur.meta_parse("patient_seed")?;
    let sut_seed: u64 = cur.meta_parse("sut_seed")?;
    let _: f64 = cur.meta_parse("battery_rate")?;
    let _: bool = cur.meta_parse("stale_hold")?;
    let _: f64 = cur.meta_parse("misclassify_prob")?;
    let _: bool = cur.meta_parse("instant_recharge")?;
    let _: u8 = cur.meta_parse("threshold")?;
    let _: u64 = cur.meta_parse("test_window")?;
    let _: u64 = cur.meta_parse("pause")?;
    let _ = cur.meta("schedule")?;
    let ticks: u64 = cur.meta_parse("ticks")?;
    let dsr_test_cases: u64 = cur.meta_parse("dsr_test_cases")?;
    let reading_test_cases: u64 = cur.meta_parse("reading_test_cases")?;

    let (n, columns) = cur.next()?;
    if columns != COLUMNS {
        return Err(cur.err(n, "unexpected column header"));
    }

    let err = |line: usize, msg: String| RunlogError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut rows = Vec::with_capacity(ticks as usize);
    let mut tested_rows = 0u64;
    for (i, line) in cur.lines {
        let n = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(err(n, format!("expected 12 fields, got {}", fields.len())));
        }
        let tick: u64 = fields[0].parse().map_err(|_| err(n, "bad tick".into()))?;
        let profile = ProfileId::parse(fields[1])
            .ok_or_else(|| err(n, format!("unknown profile {:?}", fields[1])))?;
        for (slot, field) in fields[2..8].iter().enumerate() {
            if *field != "DEACT" && field.parse::<f64>().is_err() {
                return Err(err(n, format!("bad sensor value in slot {slot}")));
            }
        }
        let bsn_id: u8 =
            fields[8].parse().map_err(|_| err(n, "bad bsn_outcome_id".into()))?;
        OutcomeLevel::from_id(bsn_id)
            .ok_or_else(|| err(n, format!("bsn_outcome_id {bsn_id} out of range")))?;
        let (tested, expected) = match fields[9] {
            "" => (false, None),
            "NA" => (true, None),
            id => {
                let id: u8 = id.parse().map_err(|_| err(n, "bad expected_outcome_id".into()))?;
                let level = OutcomeLevel::from_id(id)
                    .ok_or_else(|| err(n, format!("expected_outcome_id {id} out of range")))?;
                (true, Some(level))
            }
        };
        let pass = match fields[10] {
            "" => None,
            "1" => Some(true),
            "0" => Some(false),
            other => return Err(err(n, format!("bad pass flag {other:?}"))),
        };
        if pass.is_some() != expected.is_some() {
            return Err(err(n, "pass flag does not match expected outcome".into()));
        }
        tested_rows += u64::from(tested);
        rows.push(ParsedRow { tick, profile, tested, expected, pass });
    }

    if rows.len() as u64 != ticks {
        return Err(err(0, format!("header says {ticks} ticks, file has {} rows", rows.len())));
    }
    if tested_rows != dsr_test_cases {
        return Err(err(
            0,
            format!("header says {dsr_test_cases} test cases, file has {tested_rows}"),
        ));
    }

    Ok(ParsedRunLog {
        scenario,
        mode,
        repetition,
        patient_seed,
        sut_seed,
        ticks,
        dsr_test_cases,
        reading_test_cases,
        rows,
    })
}
