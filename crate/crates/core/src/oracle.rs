//! Expected-outcome computation and the pass rule: the count-based
//! default oracle, the weighted-score oracle installed by the profile
//! adaptation, and verdict construction.

use core::fmt;

use crate::harness::{RunMode, Scenario};
use crate::model::{
    Dsr, ModelError, OutcomeLevel, ReadingValue, RiskLevel, RiskRangeTable, SensorKind,
};

/// A test passes while expected and actual outcome ids differ by less
/// than this.
pub const DEFAULT_THRESHOLD: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensorRisk {
    Active(RiskLevel),
    Deactivated,
}

/// Per-sensor risk levels for one reading vector, in canonical sensor
/// order. Deactivated slots are excluded from every oracle rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RiskVector(pub [SensorRisk; 6]);

impl RiskVector {
    /// Classifies a record's present readings; deactivated slots pass
    /// through unclassified.
    pub fn from_dsr(dsr: &Dsr, table: &RiskRangeTable) -> Result<Self, ModelError> {
        let mut out = [SensorRisk::Deactivated; 6];
        for sensor in SensorKind::ALL {
            out[sensor.index()] = match dsr.readings[sensor.index()] {
                ReadingValue::Present(v) => SensorRisk::Active(table.classify(sensor, v)?),
                ReadingValue::Deactivated => SensorRisk::Deactivated,
            };
        }
        Ok(RiskVector(out))
    }

    pub fn all_active(levels: [RiskLevel; 6]) -> Self {
        RiskVector(levels.map(SensorRisk::Active))
    }

    pub fn active_count(&self) -> usize {
        self.0.iter().filter(|r| matches!(r, SensorRisk::Active(_))).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleError {
    /// Every sensor excluded: there is nothing to rate the patient on.
    AllSensorsExcluded,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::AllSensorsExcluded => {
                write!(f, "expected outcome undefined: all sensors excluded")
            }
        }
    }
}

impl core::error::Error for OracleError {}

/// Count-based rule oracle. Rules apply by descending severity, so a
/// vector matching several rows takes the most severe one: two or
/// more High readings are very critical, exactly one High is
/// critical, then the same split over Medium, else very low.
pub fn expected_default(rv: &RiskVector) -> Result<OutcomeLevel, OracleError> {
    let mut active = 0usize;
    let mut medium = 0usize;
    let mut high = 0usize;
    for r in &rv.0 {
        if let SensorRisk::Active(level) = r {
            active += 1;
            match level {
                RiskLevel::High => high += 1,
                RiskLevel::Medium => medium += 1,
                RiskLevel::Low => {}
            }
        }
    }
    if active == 0 {
        return Err(OracleError::AllSensorsExcluded);
    }
    Ok(if high >= 2 {
        OutcomeLevel::VeryCritical
    } else if high == 1 {
        OutcomeLevel::Critical
    } else if medium >= 2 {
        OutcomeLevel::Moderate
    } else if medium == 1 {
        OutcomeLevel::Low
    } else {
        OutcomeLevel::VeryLow
    })
}

pub fn score(level: RiskLevel) -> u32 {
    match level {
        RiskLevel::Low => 5,
        RiskLevel::Medium => 20,
        RiskLevel::High => 100,
    }
}

/// Per-sensor oracle weights in canonical sensor order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVector(pub [f64; 6]);

impl WeightVector {
    pub const UNIT: WeightVector = WeightVector([1.0; 6]);
}

/// Weight plan for a profile. Only the BMI profiles scale the
/// priority sensors (Ecg, Abps, Abpd); everything else stays at 1.
pub fn weights_for(profile: crate::model::ProfileId) -> WeightVector {
    use crate::model::{BmiClass, ProfileId};
    let priority = match profile {
        ProfileId::Bmi(BmiClass::NormalWeight) => 1.0,
        ProfileId::Bmi(BmiClass::Underweight) | ProfileId::Bmi(BmiClass::Overweight) => 1.75,
        ProfileId::Bmi(BmiClass::Obesity1) => 1.85,
        ProfileId::Bmi(BmiClass::Obesity2) => 1.90,
        ProfileId::Bmi(BmiClass::Obesity3) => 2.0,
        ProfileId::Age(_) | ProfileId::Icu(_) => 1.0,
    };
    let mut w = [1.0; 6];
    for sensor in [SensorKind::Ecg, SensorKind::Abps, SensorKind::Abpd] {
        w[sensor.index()] = priority;
    }
    WeightVector(w)
}

/// Score-based oracle: Overall = sum of weight * score over active
/// sensors, divided by the active count. Thresholds: under 8 very
/// low; under 11 low; up to 20 moderate; up to 36 critical; above,
/// very critical.
pub fn expected_weighted(
    rv: &RiskVector,
    w: &WeightVector,
) -> Result<OutcomeLevel, OracleError> {
    let mut sum = 0.0;
    let mut active = 0usize;
    for (i, r) in rv.0.iter().enumerate() {
        if let SensorRisk::Active(level) = r {
            sum += w.0[i] * score(*level) as f64;
            active += 1;
        }
    }
    if active == 0 {
        return Err(OracleError::AllSensorsExcluded);
    }
    let overall = sum / active as f64;
    Ok(if overall < 8.0 {
        OutcomeLevel::VeryLow
    } else if overall < 11.0 {
        OutcomeLevel::Low
    } else if overall <= 20.0 {
        OutcomeLevel::Moderate
    } else if overall <= 36.0 {
        OutcomeLevel::Critical
    } else {
        OutcomeLevel::VeryCritical
    })
}

/// Pass rule: outcome ids within strict distance `threshold`.
pub fn compare(expected: OutcomeLevel, actual: OutcomeLevel, threshold: u8) -> bool {
    (expected.id() as i16 - actual.id() as i16).unsigned_abs() < threshold as u16
}

/// One executed test case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub tick: u64,
    pub expected: OutcomeLevel,
    pub actual: OutcomeLevel,
    pub pass: bool,
    pub scenario: Scenario,
    pub mode: RunMode,
}

impl Verdict {
    pub fn new(
        tick: u64,
        expected: OutcomeLevel,
        actual: OutcomeLevel,
        threshold: u8,
        scenario: Scenario,
        mode: RunMode,
    ) -> Self {
        Verdict {
            tick,
            expected,
            actual,
            pass: compare(expected, actual, threshold),
            scenario,
            mode,
        }
    }
}
