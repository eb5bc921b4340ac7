//! The test-session control loop: a simulated patient feeds the
//! network under test while a monitor/analyse/plan/execute cycle
//! adapts test cases, oracle, or test strategy. Every tick lands in a
//! run log, the substrate all statistics are computed from.

use alloc::vec::Vec;
use core::fmt;

use crate::dtmc::{PatientSim, Schedule, SimError};
use crate::ingest::ProfileModel;
use crate::model::{
    Dsr, ModelError, OutcomeLevel, ProfileId, ReadingValue, RiskLevel, RiskRangeTable,
    SensorKind,
};
use crate::oracle::{
    compare, expected_default, expected_weighted, weights_for, OracleError, RiskVector, Verdict,
    WeightVector,
};
use crate::sut::{FaultConfig, StatusEvent, StatusEventKind, Sut, SutConfig, SutError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Sensors drop out on battery and test cases exclude them.
    S1,
    /// Patient profiles change and the oracle is reweighted.
    S2,
    /// Testing happens only while the patient is critical.
    S3,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::S1, Scenario::S2, Scenario::S3];

    pub fn label(self) -> &'static str {
        match self {
            Scenario::S1 => "s1",
            Scenario::S2 => "s2",
            Scenario::S3 => "s3",
        }
    }

    pub fn parse(s: &str) -> Option<Scenario> {
        match s {
            "s1" | "S1" => Some(Scenario::S1),
            "s2" | "S2" => Some(Scenario::S2),
            "s3" | "S3" => Some(Scenario::S3),
            _ => None,
        }
    }

    /// Experiment battery rates: the sensor scenario runs hot so
    /// batteries cycle several times per hour, the others keep the
    /// stock rate.
    pub fn default_battery_rate(self) -> f64 {
        match self {
            Scenario::S1 => 0.65,
            Scenario::S2 | Scenario::S3 => 0.05,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::S1 => f.write_str("S1"),
            Scenario::S2 => f.write_str("S2"),
            Scenario::S3 => f.write_str("S3"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunMode {
    Adaptive,
    Baseline,
}

impl RunMode {
    pub const ALL: [RunMode; 2] = [RunMode::Adaptive, RunMode::Baseline];

    pub fn label(self) -> &'static str {
        match self {
            RunMode::Adaptive => "adaptive",
            RunMode::Baseline => "baseline",
        }
    }

    pub fn parse(s: &str) -> Option<RunMode> {
        match s {
            "adaptive" => Some(RunMode::Adaptive),
            "baseline" => Some(RunMode::Baseline),
            _ => None,
        }
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChangeEventKind {
    SensorDeactivated(SensorKind),
    SensorActivated(SensorKind),
    ProfileChanged(ProfileId),
    /// Two or more present readings classify High in the observed
    /// record.
    CriticalDsr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChangeEvent {
    pub tick: u64,
    pub kind: ChangeEventKind,
}

/// Watches the record stream and the network's status events. Holds
/// no state beyond the previously seen profile, so the first record
/// of a run counts as a profile change.
#[derive(Debug, Clone, Default)]
pub struct Monitor {
    prev_profile: Option<ProfileId>,
}

impl Monitor {
    pub fn observe(
        &mut self,
        dsr: &Dsr,
        sut_events: &[StatusEvent],
        table: &RiskRangeTable,
    ) -> Vec<ChangeEvent> {
        let mut out = Vec::new();
        for e in sut_events {
            let kind = match e.kind {
                StatusEventKind::SensorDeactivated(s) => ChangeEventKind::SensorDeactivated(s),
                StatusEventKind::SensorActivated(s) => ChangeEventKind::SensorActivated(s),
            };
            out.push(ChangeEvent { tick: dsr.tick, kind });
        }
        if self.prev_profile != Some(dsr.profile) {
            out.push(ChangeEvent {
                tick: dsr.tick,
                kind: ChangeEventKind::ProfileChanged(dsr.profile),
            });
        }
        self.prev_profile = Some(dsr.profile);
        let highs = SensorKind::ALL
            .iter()
            .filter(|s| match dsr.readings[s.index()] {
                ReadingValue::Present(v) => table.classify(**s, v) == Ok(RiskLevel::High),
                ReadingValue::Deactivated => false,
            })
            .count();
        if highs >= 2 {
            out.push(ChangeEvent { tick: dsr.tick, kind: ChangeEventKind::CriticalDsr });
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdaptTarget {
    TestCases,
    Oracle,
    TestStrategy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdaptationDecision {
    pub target: AdaptTarget,
    pub cause: ChangeEvent,
}

/// Decides whether an observed change matches the scenario's trigger.
/// Battery events drive the test-case scenario, profile changes the
/// oracle scenario, criticality the strategy scenario; anything else
/// needs no adaptation.
pub fn analyse(event: ChangeEvent, scenario: Scenario) -> Option<AdaptationDecision> {
    let target = match (scenario, event.kind) {
        (Scenario::S1, ChangeEventKind::SensorDeactivated(_))
        | (Scenario::S1, ChangeEventKind::SensorActivated(_)) => AdaptTarget::TestCases,
        (Scenario::S2, ChangeEventKind::ProfileChanged(_)) => AdaptTarget::Oracle,
        (Scenario::S3, ChangeEventKind::CriticalDsr) => AdaptTarget::TestStrategy,
        _ => return None,
    };
    Some(AdaptationDecision { target, cause: event })
}

/// One concrete adaptation action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdaptationPlan {
    ExcludeSensor(SensorKind),
    IncludeSensor(SensorKind),
    InstallWeights(ProfileId),
    TestNow,
}

pub fn plan(decision: &AdaptationDecision) -> AdaptationPlan {
    match decision.cause.kind {
        ChangeEventKind::SensorDeactivated(s) => AdaptationPlan::ExcludeSensor(s),
        ChangeEventKind::SensorActivated(s) => AdaptationPlan::IncludeSensor(s),
        ChangeEventKind::ProfileChanged(p) => AdaptationPlan::InstallWeights(p),
        ChangeEventKind::CriticalDsr => AdaptationPlan::TestNow,
    }
}

/// Testing cadence. Periodic cycles open with the test window, so
/// tick 0 is tested; the on-demand flag is one-shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestStrategy {
    Periodic { test: u64, pause: u64 },
    OnDemand { ts: bool },
}

impl TestStrategy {
    pub fn should_test(&mut self, tick: u64) -> bool {
        match self {
            TestStrategy::Periodic { test, pause } => tick % (*test + *pause) < *test,
            TestStrategy::OnDemand { ts } => core::mem::take(ts),
        }
    }

    /// Arms a one-shot test request; periodic strategies ignore it.
    pub fn request_test(&mut self) {
        if let TestStrategy::OnDemand { ts } = self {
            *ts = true;
        }
    }
}

/// The three mutable targets the adaptation loop may touch.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptState {
    /// Sensors currently replaced by a deactivated label in test
    /// records.
    pub excluded: [bool; 6],
    /// Oracle weights installed by the profile adaptation.
    pub weights: WeightVector,
    pub strategy: TestStrategy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptationRecord {
    pub tick: u64,
    pub action: AdaptationPlan,
}

/// Applies a plan to exactly one target and records it.
pub fn execute(
    action: AdaptationPlan,
    tick: u64,
    state: &mut AdaptState,
    ledger: &mut Vec<AdaptationRecord>,
) {
    match action {
        AdaptationPlan::ExcludeSensor(s) => state.excluded[s.index()] = true,
        AdaptationPlan::IncludeSensor(s) => state.excluded[s.index()] = false,
        AdaptationPlan::InstallWeights(profile) => state.weights = weights_for(profile),
        AdaptationPlan::TestNow => state.strategy.request_test(),
    }
    ledger.push(AdaptationRecord { tick, action });
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    ZeroTestWindow,
    ZeroThreshold,
    /// The oracle-weight scenario only reads BMI profiles.
    NonBmiProfile { profile: ProfileId },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::ZeroTestWindow => write!(f, "test window must be at least 1 tick"),
            ConfigError::ZeroThreshold => write!(f, "comparison threshold must be at least 1"),
            ConfigError::NonBmiProfile { profile } => {
                write!(f, "scenario s2 schedules BMI profiles only, got {profile}")
            }
        }
    }
}

impl core::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub mode: RunMode,
    pub schedule: Schedule,
    pub patient_seed: u64,
    pub sut_seed: u64,
    pub battery_rate: f64,
    pub faults: FaultConfig,
    pub instant_recharge: bool,
    pub threshold: u8,
    pub test_window: u64,
    pub pause: u64,
    /// Repetition number, echoed into the log header.
    pub repetition: u32,
}

impl RunConfig {
    /// Stock configuration: periodic 60/300 testing, threshold 2,
    /// the scenario's battery rate, faults at type defaults.
    pub fn new(scenario: Scenario, mode: RunMode, schedule: Schedule) -> Self {
        RunConfig {
            scenario,
            mode,
            schedule,
            patient_seed: 1,
            sut_seed: 1,
            battery_rate: scenario.default_battery_rate(),
            faults: FaultConfig::default(),
            instant_recharge: false,
            threshold: crate::oracle::DEFAULT_THRESHOLD,
            test_window: 60,
            pause: 300,
            repetition: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.test_window == 0 {
            return Err(ConfigError::ZeroTestWindow);
        }
        if self.threshold == 0 {
            return Err(ConfigError::ZeroThreshold);
        }
        if self.scenario == Scenario::S2 {
            for (profile, _) in &self.schedule.entries {
                if !matches!(profile, ProfileId::Bmi(_)) {
                    return Err(ConfigError::NonBmiProfile { profile: *profile });
                }
            }
        }
        Ok(())
    }

    fn strategy(&self) -> TestStrategy {
        match (self.scenario, self.mode) {
            // The criticality adaptation replaces the periodic cadence
            // outright: tests run only on demand.
            (Scenario::S3, RunMode::Adaptive) => TestStrategy::OnDemand { ts: false },
            _ => TestStrategy::Periodic { test: self.test_window, pause: self.pause },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunHeader {
    pub scenario: Scenario,
    pub mode: RunMode,
    pub repetition: u32,
    pub patient_seed: u64,
    pub sut_seed: u64,
    pub battery_rate: f64,
    pub stale_hold: bool,
    pub misclassify_prob: f64,
    pub instant_recharge: bool,
    pub threshold: u8,
    pub test_window: u64,
    pub pause: u64,
    pub schedule: Vec<(ProfileId, u64)>,
    pub ticks: u64,
    /// One test case per tested record.
    pub dsr_test_cases: u64,
    /// The same sessions counted per contributing sensor reading.
    pub reading_test_cases: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub tick: u64,
    pub profile: ProfileId,
    /// True vitals as simulated.
    pub raw: [ReadingValue; 6],
    /// The record as logged and tested: what the sensing layer
    /// delivered (the raw record in adaptive criticality runs),
    /// exclusion labels applied where adapted.
    pub logged: [ReadingValue; 6],
    pub bsn: OutcomeLevel,
    pub tested: bool,
    /// None when untested, or when tested with every sensor excluded.
    pub expected: Option<OutcomeLevel>,
    pub pass: Option<bool>,
    pub events: Vec<ChangeEventKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub header: RunHeader,
    pub entries: Vec<LogEntry>,
    /// Adaptation ledger; empty in baseline runs.
    pub adaptations: Vec<AdaptationRecord>,
}

impl RunLog {
    pub fn verdicts(&self) -> impl Iterator<Item = Verdict> + '_ {
        let (scenario, mode) = (self.header.scenario, self.header.mode);
        let threshold = self.header.threshold;
        self.entries.iter().filter_map(move |e| {
            let expected = e.expected?;
            Some(Verdict::new(e.tick, expected, e.bsn, threshold, scenario, mode))
        })
    }

    /// (passes, total) over defined verdicts.
    pub fn verdict_counts(&self) -> (u64, u64) {
        let mut passes = 0;
        let mut total = 0;
        for e in &self.entries {
            if let Some(pass) = e.pass {
                total += 1;
                if pass {
                    passes += 1;
                }
            }
        }
        (passes, total)
    }

    /// Per-profile (passes, total) for every scheduled profile, in
    /// first-appearance schedule order. Profiles without verdicts
    /// stay at (0, 0).
    pub fn per_profile_counts(&self) -> Vec<(ProfileId, u64, u64)> {
        let mut out: Vec<(ProfileId, u64, u64)> = Vec::new();
        for (profile, _) in &self.header.schedule {
            if !out.iter().any(|(p, _, _)| p == profile) {
                out.push((*profile, 0, 0));
            }
        }
        for e in &self.entries {
            if let Some(pass) = e.pass {
                let slot = match out.iter_mut().find(|(p, _, _)| *p == e.profile) {
                    Some(slot) => slot,
                    None => {
                        out.push((e.profile, 0, 0));
                        out.last_mut().unwrap()
                    }
                };
                slot.2 += 1;
                if pass {
                    slot.1 += 1;
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config(ConfigError),
    Sim(SimError),
    Sut(SutError),
    Classify(ModelError),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "configuration: {e}"),
            RunError::Sim(e) => write!(f, "patient simulation: {e}"),
            RunError::Sut(e) => write!(f, "network under test: {e}"),
            RunError::Classify(e) => write!(f, "classification: {e}"),
        }
    }
}

impl core::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<SimError> for RunError {
    fn from(e: SimError) -> Self {
        RunError::Sim(e)
    }
}

impl From<SutError> for RunError {
    fn from(e: SutError) -> Self {
        RunError::Sut(e)
    }
}

/// Runs one full test session.
///
/// Per tick: the patient emits a record, batteries advance, the
/// adaptation loop reacts to observed changes (adaptive mode only),
/// exclusion labels produce the logged record, the network fuses it,
/// and the strategy decides whether this tick's record becomes a test
/// case.
///
/// Test cases carry what the sensing layer delivered (fresh values
/// for active sensors, the last accepted value under stale_hold for
/// inactive ones), so a run with no adaptation passes by
/// construction: the network is only ever asked about data it has
/// seen. Each adaptation then injects patient awareness and reveals
/// failures: excluding dead sensors from expected outcomes exposes
/// stale fusion inputs, installed profile weights expose rule-of-
/// thumb misratings, and on-demand testing scores the true patient
/// record against the network during emergencies. Baseline runs skip
/// the loop entirely; the criticality baseline just tests
/// periodically.
pub fn run(config: &RunConfig, models: &[ProfileModel]) -> Result<RunLog, RunError> {
    config.validate()?;
    let table = RiskRangeTable::default_table();
    let mut sim = PatientSim::new(models, config.schedule.clone(), config.patient_seed)?;
    let mut sut = Sut::new(config.sut_seed);
    sut.configure(SutConfig {
        faults: config.faults,
        battery_rate: config.battery_rate,
        instant_recharge: config.instant_recharge,
    })?;

    let mut monitor = Monitor::default();
    let mut state = AdaptState {
        excluded: [false; 6],
        weights: WeightVector::UNIT,
        strategy: config.strategy(),
    };
    let mut ledger: Vec<AdaptationRecord> = Vec::new();
    let mut entries: Vec<LogEntry> = Vec::new();
    // Last value accepted while each sensor was active; mirrors the
    // network's stale-hold table.
    let mut held: [Option<f64>; 6] = [None; 6];
    let mut dsr_cases = 0u64;
    let mut reading_cases = 0u64;

    while let Some(raw_dsr) = sim.next_dsr() {
        let tick = raw_dsr.tick;
        let sut_events = sut.advance_batteries();
        let status = sut.sensor_status();

        let mut delivered = [ReadingValue::Deactivated; 6];
        for sensor in SensorKind::ALL {
            let i = sensor.index();
            if status[i].0 {
                if let ReadingValue::Present(v) = raw_dsr.readings[i] {
                    held[i] = Some(v);
                }
                delivered[i] = raw_dsr.readings[i];
            } else if config.faults.stale_hold {
                delivered[i] = match held[i] {
                    Some(v) => ReadingValue::Present(v),
                    None => ReadingValue::Deactivated,
                };
            }
        }

        // Test cases are built from what the sensing layer delivered,
        // with one exception: the criticality adaptation tests the
        // flagged patient record itself. That asymmetry IS the
        // adaptation: only the monitored arm knows the true patient.
        let substrate = match (config.scenario, config.mode) {
            (Scenario::S3, RunMode::Adaptive) => raw_dsr.readings,
            _ => delivered,
        };

        let mut entry_events: Vec<ChangeEventKind> = Vec::new();
        if config.mode == RunMode::Adaptive {
            // The monitor watches the patient stream, not the network.
            let events = monitor.observe(&raw_dsr, &sut_events, &table);
            for event in &events {
                entry_events.push(event.kind);
            }
            for event in events {
                if let Some(decision) = analyse(event, config.scenario) {
                    execute(plan(&decision), tick, &mut state, &mut ledger);
                }
            }
        } else {
            // No adaptation loop, but battery events are still facts
            // worth logging.
            for e in &sut_events {
                entry_events.push(match e.kind {
                    StatusEventKind::SensorDeactivated(s) => {
                        ChangeEventKind::SensorDeactivated(s)
                    }
                    StatusEventKind::SensorActivated(s) => ChangeEventKind::SensorActivated(s),
                });
            }
        }

        let mut logged = substrate;
        for sensor in SensorKind::ALL {
            if state.excluded[sensor.index()] {
                logged[sensor.index()] = ReadingValue::Deactivated;
            }
        }
        let logged_dsr = Dsr { tick, profile: raw_dsr.profile, readings: logged };

        let outcome = sut.ingest_and_fuse(&logged_dsr)?;

        let tested = state.strategy.should_test(tick);
        let (expected, pass) = if tested {
            dsr_cases += 1;
            let rv = RiskVector::from_dsr(&logged_dsr, &table).map_err(RunError::Classify)?;
            reading_cases += rv.active_count() as u64;
            let want = match (config.scenario, config.mode) {
                (Scenario::S2, RunMode::Adaptive) => expected_weighted(&rv, &state.weights),
                _ => expected_default(&rv),
            };
            match want {
                Ok(level) => {
                    (Some(level), Some(compare(level, outcome.level, config.threshold)))
                }
                Err(OracleError::AllSensorsExcluded) => (None, None),
            }
        } else {
            (None, None)
        };

        entries.push(LogEntry {
            tick,
            profile: raw_dsr.profile,
            raw: raw_dsr.readings,
            logged,
            bsn: outcome.level,
            tested,
            expected,
            pass,
            events: entry_events,
        });
    }

    let header = RunHeader {
        scenario: config.scenario,
        mode: config.mode,
        repetition: config.repetition,
        patient_seed: config.patient_seed,
        sut_seed: config.sut_seed,
        battery_rate: config.battery_rate,
        stale_hold: config.faults.stale_hold,
        misclassify_prob: config.faults.misclassify_prob,
        instant_recharge: config.instant_recharge,
        threshold: config.threshold,
        test_window: config.test_window,
        pause: config.pause,
        schedule: config.schedule.entries.clone(),
        ticks: entries.len() as u64,
        dsr_test_cases: dsr_cases,
        reading_test_cases: reading_cases,
    };
    Ok(RunLog { header, entries, adaptations: ledger })
}
