//! Reference network under test: six sensors behind per-sensor
//! batteries, an internal reading table with optional stale-value
//! retention, rule-based fusion shared with the default oracle, and
//! seeded misclassification noise. Every failure the harness can
//! detect traces back to one of the configured faults.

use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;

use crate::model::{
    Dsr, ModelError, OutcomeLevel, ReadingValue, RiskRangeTable, SensorKind,
};
use crate::oracle::{expected_default, OracleError, RiskVector, SensorRisk};
use crate::rng::{self, domain};

/// Battery percentage at which an active sensor switches off.
pub const BATTERY_LO: f64 = 20.0;
/// Battery percentage at which a charging sensor switches back on.
pub const BATTERY_HI: f64 = 90.0;

// Per-sensor drain scaling in canonical sensor order. Identical rates
// would deactivate all six sensors on the same tick, which makes the
// exclusion adaptation indistinguishable from an all-sensor outage;
// slightly staggered rates keep every battery cycle observable.
pub const DRAIN_FACTORS: [f64; 6] = [1.0, 0.95, 0.90, 0.85, 0.80, 0.75];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionMode {
    RuleBased,
}

/// Seeded fault plumbing. `stale_hold` keeps an inactive sensor's
/// last accepted value in the reading table; `misclassify_prob`
/// perturbs the fused outcome one level up or down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultConfig {
    pub stale_hold: bool,
    pub misclassify_prob: f64,
    pub fusion_mode: FusionMode,
}

impl Default for FaultConfig {
    fn default() -> Self {
        FaultConfig {
            stale_hold: true,
            misclassify_prob: 0.0,
            fusion_mode: FusionMode::RuleBased,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SutConfig {
    pub faults: FaultConfig,
    /// Base battery percent per tick; scaled by DRAIN_FACTORS per
    /// sensor. Zero pins every sensor active.
    pub battery_rate: f64,
    /// A drained sensor refills to 100% immediately instead of
    /// recharging at the battery rate.
    pub instant_recharge: bool,
}

impl Default for SutConfig {
    fn default() -> Self {
        SutConfig { faults: FaultConfig::default(), battery_rate: 0.05, instant_recharge: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryState {
    pub level: f64,
    pub active: bool,
    /// Effective percent per tick for this sensor.
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatusEventKind {
    SensorDeactivated(SensorKind),
    SensorActivated(SensorKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatusEvent {
    pub tick: u64,
    pub kind: StatusEventKind,
}

/// Fused patient risk reported for one tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BsnOutcome {
    pub tick: u64,
    pub level: OutcomeLevel,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SutError {
    ReconfigureAfterStart,
    BatteryRateOutOfRange { rate: f64 },
    ProbabilityOutOfRange { p: f64 },
    BadReading { sensor: SensorKind, cause: ModelError },
}

impl fmt::Display for SutError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SutError::ReconfigureAfterStart => {
                write!(f, "configuration is only accepted before the first tick")
            }
            SutError::BatteryRateOutOfRange { rate } => {
                write!(f, "battery rate must be finite and non-negative, got {rate}")
            }
            SutError::ProbabilityOutOfRange { p } => {
                write!(f, "misclassification probability must lie in [0,1], got {p}")
            }
            SutError::BadReading { sensor, cause } => {
                write!(f, "sensor {sensor}: {cause}")
            }
        }
    }
}

impl core::error::Error for SutError {}

pub struct Sut {
    config: SutConfig,
    batteries: [BatteryState; 6],
    /// Internal reading table the fusion runs over. None means the
    /// slot currently holds no value.
    last: [Option<f64>; 6],
    ranges: RiskRangeTable,
    clock: u64,
    started: bool,
    rng: ChaCha8Rng,
}

impl Sut {
    /// Fresh instance with default configuration: all sensors active
    /// at 100%, empty reading table, its own rng stream.
    pub fn new(seed: u64) -> Self {
        let config = SutConfig::default();
        Sut {
            batteries: Self::batteries_for(config.battery_rate),
            config,
            last: [None; 6],
            ranges: RiskRangeTable::default_table(),
            clock: 0,
            started: false,
            rng: rng::seeded(seed, domain::SUT),
        }
    }

    fn batteries_for(rate: f64) -> [BatteryState; 6] {
        SensorKind::ALL.map(|s| BatteryState {
            level: 100.0,
            active: true,
            rate: rate * DRAIN_FACTORS[s.index()],
        })
    }

    /// Applies a full configuration. Allowed only before the first
    /// tick.
    pub fn configure(&mut self, config: SutConfig) -> Result<(), SutError> {
        if self.started {
            return Err(SutError::ReconfigureAfterStart);
        }
        if !config.battery_rate.is_finite() || config.battery_rate < 0.0 {
            return Err(SutError::BatteryRateOutOfRange { rate: config.battery_rate });
        }
        let p = config.faults.misclassify_prob;
        if !(0.0..=1.0).contains(&p) {
            return Err(SutError::ProbabilityOutOfRange { p });
        }
        self.batteries = Self::batteries_for(config.battery_rate);
        self.config = config;
        Ok(())
    }

    /// First half of a tick: threshold checks, then one battery move
    /// per sensor. A sensor entering the tick at or below the low
    /// threshold deactivates; an inactive one at or above the high
    /// threshold reactivates. Call exactly once per tick, before
    /// ingest_and_fuse.
    pub fn advance_batteries(&mut self) -> Vec<StatusEvent> {
        self.started = true;
        let mut events = Vec::new();
        for sensor in SensorKind::ALL {
            let b = &mut self.batteries[sensor.index()];
            if b.active && b.level <= BATTERY_LO {
                b.active = false;
                events.push(StatusEvent {
                    tick: self.clock,
                    kind: StatusEventKind::SensorDeactivated(sensor),
                });
            } else if !b.active && b.level >= BATTERY_HI {
                b.active = true;
                events.push(StatusEvent {
                    tick: self.clock,
                    kind: StatusEventKind::SensorActivated(sensor),
                });
            }
            if b.active {
                b.level = (b.level - b.rate).max(0.0);
            } else if self.config.instant_recharge {
                b.level = 100.0;
            } else {
                b.level = (b.level + b.rate).min(100.0);
            }
        }
        events
    }

    /// Second half of a tick: active sensors accept their reading
    /// into the table, inactive ones keep the last accepted value
    /// under stale_hold or go empty without it; fusion rates the
    /// table and noise may shift the result one level.
    pub fn ingest_and_fuse(&mut self, dsr: &Dsr) -> Result<BsnOutcome, SutError> {
        self.started = true;
        for sensor in SensorKind::ALL {
            let i = sensor.index();
            let accepted = match (self.batteries[i].active, dsr.readings[i]) {
                (true, ReadingValue::Present(v)) => {
                    self.ranges.classify(sensor, v).map_err(|cause| SutError::BadReading {
                        sensor,
                        cause,
                    })?;
                    Some(v)
                }
                _ => None,
            };
            match accepted {
                Some(v) => self.last[i] = Some(v),
                None if self.config.faults.stale_hold => {}
                None => self.last[i] = None,
            }
        }
        let mut slots = [SensorRisk::Deactivated; 6];
        for sensor in SensorKind::ALL {
            let i = sensor.index();
            if let Some(v) = self.last[i] {
                let level = self.ranges.classify(sensor, v).map_err(|cause| {
                    SutError::BadReading { sensor, cause }
                })?;
                slots[i] = SensorRisk::Active(level);
            }
        }
        let fused = match expected_default(&RiskVector(slots)) {
            Ok(level) => level,
            // The network always reports something; an empty table
            // reads as no elevated signs.
            Err(OracleError::AllSensorsExcluded) => OutcomeLevel::VeryLow,
        };
        // One draw per tick regardless of p, so the stream position
        // depends only on tick count.
        let u = rng::next_f64(&mut self.rng);
        let level = if u < self.config.faults.misclassify_prob {
            let delta: i16 = if rng::next_f64(&mut self.rng) < 0.5 { -1 } else { 1 };
            let id = (fused.id() as i16 + delta).clamp(1, 5);
            OutcomeLevel::from_id(id as u8).expect("clamped to valid id range")
        } else {
            fused
        };
        let outcome = BsnOutcome { tick: self.clock, level };
        self.clock += 1;
        Ok(outcome)
    }

    /// Both halves in order.
    pub fn sut_tick(&mut self, dsr: &Dsr) -> Result<(BsnOutcome, Vec<StatusEvent>), SutError> {
        let events = self.advance_batteries();
        let outcome = self.ingest_and_fuse(dsr)?;
        Ok((outcome, events))
    }

    /// Read-only snapshot: per-sensor (active, level) in canonical
    /// sensor order.
    pub fn sensor_status(&self) -> [(bool, f64); 6] {
        SensorKind::ALL.map(|s| {
            let b = &self.batteries[s.index()];
            (b.active, b.level)
        })
    }
}
