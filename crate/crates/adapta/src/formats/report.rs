//! Report assembly: two comma-separated tables (pass rates per
//! scenario and per patient profile) plus a plain-text summary, all
//! derived from parsed run logs. Everything is rendered in a fixed
//! order so rebuilding a report from the same logs is byte-identical.

use std::fmt::Write as _;

use adapta_core::{a12, mann_whitney_u, p_exact, p_normal, ptcr, summarize, ProfileId, RunMode, Scenario};
use thiserror::Error;

use super::runlog::ParsedRunLog;

/// Report row order: ICU, Age, BMI, riskiest class first within BMI.
const PROFILE_ROWS: [ProfileId; 13] = [
    ProfileId::Icu(adapta_core::IcuType::MedicalIcu),
    ProfileId::Icu(adapta_core::IcuType::CoronaryCareUnit),
    ProfileId::Icu(adapta_core::IcuType::SurgicalIcu),
    ProfileId::Icu(adapta_core::IcuType::CardiacSurgeryUnit),
    ProfileId::Age(adapta_core::AgeGroup::Youth),
    ProfileId::Age(adapta_core::AgeGroup::Adult),
    ProfileId::Age(adapta_core::AgeGroup::Elderly),
    ProfileId::Bmi(adapta_core::BmiClass::Obesity3),
    ProfileId::Bmi(adapta_core::BmiClass::Obesity2),
    ProfileId::Bmi(adapta_core::BmiClass::Obesity1),
    ProfileId::Bmi(adapta_core::BmiClass::Overweight),
    ProfileId::Bmi(adapta_core::BmiClass::NormalWeight),
    ProfileId::Bmi(adapta_core::BmiClass::Underweight),
];

const MODES: [RunMode; 2] = [RunMode::Baseline, RunMode::Adaptive];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub scenarios_csv: String,
    pub profiles_csv: String,
    pub summary: String,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no run logs to report")]
    Empty,
    #[error("duplicate run log for {scenario} {mode} repetition {repetition}")]
    DuplicateRun { scenario: Scenario, mode: RunMode, repetition: u32 },
    #[error("mismatched scenario sets: baseline logs cover {{{baseline}}}, adaptive logs cover {{{adaptive}}}")]
    MismatchedScenarios { baseline: String, adaptive: String },
}

struct RunStats {
    repetition: u32,
    ptcr: Option<f64>,
    dsr_test_cases: u64,
    reading_test_cases: u64,
    /// (passes, verdicts) per `ProfileId::index()`.
    per_profile: [(u64, u64); 13],
}

fn run_stats(log: &ParsedRunLog) -> RunStats {
    let mut per_profile = [(0u64, 0u64); 13];
    let mut passes = 0;
    let mut total = 0;
    for row in &log.rows {
        if let Some(pass) = row.pass {
            let slot = &mut per_profile[row.profile.index()];
            slot.1 += 1;
            slot.0 += u64::from(pass);
            total += 1;
            passes += u64::from(pass);
        }
    }
    RunStats {
        repetition: log.repetition,
        ptcr: ptcr(passes, total),
        dsr_test_cases: log.dsr_test_cases,
        reading_test_cases: log.reading_test_cases,
        per_profile,
    }
}

fn mode_title(mode: RunMode) -> &'static str {
    match mode {
        RunMode::Baseline => "Baseline",
        RunMode::Adaptive => "Adaptive",
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.2}"),
        None => "NA".to_string(),
    }
}

/// 3 x 2 grid of run groups, each sorted by repetition.
struct Groups([[Vec<RunStats>; 2]; 3]);

impl Groups {
    fn get(&self, scenario: Scenario, mode: RunMode) -> &[RunStats] {
        let s = Scenario::ALL.iter().position(|x| *x == scenario).unwrap();
        let m = MODES.iter().position(|x| *x == mode).unwrap();
        &self.0[s][m]
    }

    fn ptcrs(&self, scenario: Scenario, mode: RunMode) -> Vec<f64> {
        self.get(scenario, mode).iter().filter_map(|r| r.ptcr).collect()
    }
}

fn group_logs(logs: &[ParsedRunLog]) -> Result<Groups, ReportError> {
    if logs.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut grid: [[Vec<RunStats>; 2]; 3] = Default::default();
    for log in logs {
        let s = Scenario::ALL.iter().position(|x| *x == log.scenario).unwrap();
        let m = MODES.iter().position(|x| *x == log.mode).unwrap();
        grid[s][m].push(run_stats(log));
    }
    for (s, row) in grid.iter_mut().enumerate() {
        for (m, group) in row.iter_mut().enumerate() {
            group.sort_by_key(|r| r.repetition);
            for pair in group.windows(2) {
                if pair[0].repetition == pair[1].repetition {
                    return Err(ReportError::DuplicateRun {
                        scenario: Scenario::ALL[s],
                        mode: MODES[m],
                        repetition: pair[0].repetition,
                    });
                }
            }
        }
    }
    // Comparisons pair per scenario, so when both modes are present
    // they must cover the same scenarios.
    let covered = |mode: usize| -> Vec<Scenario> {
        Scenario::ALL
            .into_iter()
            .enumerate()
            .filter(|(s, _)| !grid[*s][mode].is_empty())
            .map(|(_, sc)| sc)
            .collect()
    };
    let baseline = covered(0);
    let adaptive = covered(1);
    if !baseline.is_empty() && !adaptive.is_empty() && baseline != adaptive {
        let join = |set: &[Scenario]| {
            set.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
        };
        return Err(ReportError::MismatchedScenarios {
            baseline: join(&baseline),
            adaptive: join(&adaptive),
        });
    }
    Ok(Groups(grid))
}

struct Comparison {
    u: f64,
    p_normal: f64,
    p_exact: Option<f64>,
    a12: f64,
}

fn comparison(groups: &Groups, scenario: Scenario) -> Option<Comparison> {
    let baseline = groups.ptcrs(scenario, RunMode::Baseline);
    let adaptive = groups.ptcrs(scenario, RunMode::Adaptive);
    if baseline.is_empty() || adaptive.is_empty() {
        return None;
    }
    Some(Comparison {
        u: mann_whitney_u(&baseline, &adaptive),
        p_normal: p_normal(&baseline, &adaptive),
        p_exact: p_exact(&baseline, &adaptive),
        a12: a12(&baseline, &adaptive),
    })
}

fn scenarios_csv(groups: &Groups) -> String {
    let max_reps = Scenario::ALL
        .iter()
        .flat_map(|s| MODES.iter().map(|m| groups.get(*s, *m).len()))
        .max()
        .unwrap_or(0);

    let mut out = String::from("run");
    for i in 1..=max_reps {
        let _ = write!(out, ",ex{i}");
    }
    out.push_str(",avg,std\n");

    for scenario in Scenario::ALL {
        for mode in MODES {
            let group = groups.get(scenario, mode);
            if group.is_empty() {
                continue;
            }
            let _ = write!(out, "{}-{}", mode_title(mode), scenario);
            for i in 0..max_reps {
                match group.get(i) {
                    Some(run) => {
                        let _ = write!(out, ",{}", fmt_opt(run.ptcr));
                    }
                    None => out.push(','),
                }
            }
            let stat = summarize(&groups.ptcrs(scenario, mode));
            let _ = writeln!(
                out,
                ",{},{}",
                fmt_opt(stat.as_ref().map(|s| s.mean)),
                fmt_opt(stat.as_ref().map(|s| s.std))
            );
        }
    }

    out.push('\n');
    out.push_str("scenario,u,p_normal,p_exact,a12\n");
    for scenario in Scenario::ALL {
        if let Some(c) = comparison(groups, scenario) {
            let p_exact = match c.p_exact {
                Some(p) => format!("{p:.6e}"),
                None => "NA".to_string(),
            };
            let _ = writeln!(
                out,
                "{scenario},{:.1},{:.6e},{p_exact},{:.3}",
                c.u, c.p_normal, c.a12
            );
        }
    }
    out
}

fn profiles_csv(groups: &Groups) -> String {
    let mut out = String::from("dimension,profile");
    for scenario in Scenario::ALL {
        for mode in MODES {
            let tag = format!("{}_{}", scenario.label(), mode.label());
            let _ = write!(out, ",{tag}_mean,{tag}_std");
        }
    }
    out.push('\n');

    for profile in PROFILE_ROWS {
        let (dimension, name) = match profile {
            ProfileId::Icu(u) => ("ICU", u.label()),
            ProfileId::Age(g) => ("Age", g.label()),
            ProfileId::Bmi(c) => ("BMI", c.label()),
        };
        let _ = write!(out, "{dimension},{name}");
        for scenario in Scenario::ALL {
            for mode in MODES {
                let rates: Vec<f64> = groups
                    .get(scenario, mode)
                    .iter()
                    .filter_map(|r| {
                        let (passes, total) = r.per_profile[profile.index()];
                        ptcr(passes, total)
                    })
                    .collect();
                match summarize(&rates) {
                    Some(stat) => {
                        let _ = write!(out, ",{:.2},{:.2}", stat.mean, stat.std);
                    }
                    None => out.push_str(",-,-"),
                }
            }
        }
        out.push('\n');
    }
    out
}

fn summary_text(groups: &Groups) -> String {
    let mut out = String::from("test session summary\n====================\n");

    out.push_str("\npass rates\n----------\n");
    let mut single_rep = false;
    for scenario in Scenario::ALL {
        for mode in MODES {
            let group = groups.get(scenario, mode);
            if group.is_empty() {
                continue;
            }
            let rates = groups.ptcrs(scenario, mode);
            let undefined = group.len() - rates.len();
            let _ = write!(
                out,
                "{scenario} {}: n={}, mean PTCR {}, std {}",
                mode_title(mode).to_lowercase(),
                rates.len(),
                fmt_opt(summarize(&rates).map(|s| s.mean)),
                fmt_opt(summarize(&rates).map(|s| s.std)),
            );
            if undefined > 0 {
                let _ = write!(out, " ({undefined} run(s) without verdicts)");
            }
            if rates.len() == 1 {
                single_rep = true;
                out.push_str(" [single repetition]");
            }
            out.push('\n');
        }
    }

    let mut compared = false;
    for scenario in Scenario::ALL {
        let Some(c) = comparison(groups, scenario) else { continue };
        if !compared {
            out.push_str("\nbaseline vs adaptive\n--------------------\n");
            compared = true;
        }
        let p_exact = match c.p_exact {
            Some(p) => format!("{p:.6e}"),
            None => "NA (a group exceeds 12 repetitions)".to_string(),
        };
        let _ = writeln!(
            out,
            "{scenario}: U={:.1} A12={:.3} p_normal={:.6e} p_exact={p_exact}",
            c.u, c.a12, c.p_normal
        );
        let baseline_mean = summarize(&groups.ptcrs(scenario, RunMode::Baseline)).map(|s| s.mean);
        let adaptive_mean = summarize(&groups.ptcrs(scenario, RunMode::Adaptive)).map(|s| s.mean);
        if let (Some(b), Some(a)) = (baseline_mean, adaptive_mean) {
            let verdict = if a < b {
                "adaptive runs passed less often: the adaptations surfaced failures the baseline missed"
            } else if a > b {
                "baseline runs passed less often"
            } else {
                "no difference in mean pass rate"
            };
            let _ = writeln!(out, "    {verdict}");
        }
    }

    out.push_str("\ntest cases\n----------\n");
    for scenario in Scenario::ALL {
        for mode in MODES {
            let group = groups.get(scenario, mode);
            if group.is_empty() {
                continue;
            }
            let records: u64 = group.iter().map(|r| r.dsr_test_cases).sum();
            let readings: u64 = group.iter().map(|r| r.reading_test_cases).sum();
            let _ = writeln!(
                out,
                "{scenario} {}: {records} record-level test cases ({readings} counted per contributing reading) over {} run(s)",
                mode_title(mode).to_lowercase(),
                group.len(),
            );
        }
    }

    out.push_str("\nnotes\n-----\n");
    out.push_str(
        "- PTCR: percentage of tested records whose network outcome stayed within the verdict threshold of the expected outcome.\n",
    );
    out.push_str("- U and A12 take the baseline group first; A12 is the chance a baseline repetition outranks an adaptive one.\n");
    out.push_str("- std is taken over the repetitions of one group.\n");
    if single_rep {
        out.push_str("- warning: groups with a single repetition report std 0 by construction.\n");
    }
    out
}

pub fn build_report(logs: &[ParsedRunLog]) -> Result<ReportBundle, ReportError> {
    let groups = group_logs(logs)?;
    Ok(ReportBundle {
        scenarios_csv: scenarios_csv(&groups),
        profiles_csv: profiles_csv(&groups),
        summary: summary_text(&groups),
    })
}
