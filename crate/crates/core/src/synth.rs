//! Seeded synthetic admissions generator. Produces records that cycle
//! through every age group, BMI class and unit so a small batch still
//! feeds all thirteen profiles, with vitals that sit in the Low band
//! most of the time and drift out more often for riskier categories.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;

use crate::ingest::FieldDataset;
use crate::model::{
    AgeGroup, BmiClass, IcuType, PatientRecord, RiskLevel, RiskRangeTable, Sample, SensorKind,
};
use crate::rng::{self, domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthError {
    ZeroRecords,
    /// Need at least two samples per series or no transition is
    /// observable downstream.
    TooFewSamples { samples: usize },
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::ZeroRecords => write!(f, "record count must be at least 1"),
            SynthError::TooFewSamples { samples } => {
                write!(f, "samples per series must be at least 2, got {samples}")
            }
        }
    }
}

impl core::error::Error for SynthError {}

// Risk appetite per category. A record's factor is the product of its
// three tilts, clamped to [0.5, 2.0]; it scales how often the band
// walk steps away from Low.
fn age_tilt(group: AgeGroup) -> f64 {
    match group {
        AgeGroup::Youth => 0.85,
        AgeGroup::Adult => 1.0,
        AgeGroup::Elderly => 1.3,
    }
}

fn bmi_tilt(class: BmiClass) -> f64 {
    match class {
        BmiClass::Underweight => 1.15,
        BmiClass::NormalWeight => 0.85,
        BmiClass::Overweight => 1.05,
        BmiClass::Obesity1 => 1.15,
        BmiClass::Obesity2 => 1.3,
        BmiClass::Obesity3 => 1.5,
    }
}

fn icu_tilt(icu: IcuType) -> f64 {
    match icu {
        IcuType::CardiacSurgeryUnit => 1.1,
        IcuType::CoronaryCareUnit => 1.25,
        IcuType::MedicalIcu => 0.95,
        IcuType::SurgicalIcu => 1.05,
    }
}

// Baseline per-step move probabilities for the band walk. Escapes are
// rare and recovery dominates, so the long-run mix stays cold.
const AWAY_RATE: f64 = 0.05;
const TOWARD_RATE: f64 = 0.15;

/// BMI targets drawn inside each class with margin from the cut
/// points, so float rounding of weight = bmi * h^2 cannot flip the
/// class on re-derivation.
fn bmi_target_range(class: BmiClass) -> (f64, f64) {
    match class {
        BmiClass::Underweight => (15.0, 18.4),
        BmiClass::NormalWeight => (18.6, 24.9),
        BmiClass::Overweight => (25.1, 29.9),
        BmiClass::Obesity1 => (30.1, 34.9),
        BmiClass::Obesity2 => (35.1, 39.9),
        BmiClass::Obesity3 => (40.1, 50.0),
    }
}

fn age_range(group: AgeGroup) -> (u32, u32) {
    match group {
        AgeGroup::Youth => (16, 29),
        AgeGroup::Adult => (30, 59),
        AgeGroup::Elderly => (60, 95),
    }
}

fn uniform_u32(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> u32 {
    lo + (rng::next_f64(rng) * (hi - lo + 1) as f64) as u32
}

/// One step of the band walk. States are the sensor's bands in
/// ascending value order; `low` is the Low band's position. With
/// probability `away` the state moves one band further from Low
/// (split across both sides when sitting on Low), with TOWARD_RATE it
/// moves one band back, otherwise it stays. Exactly one draw.
fn walk_step(rng: &mut ChaCha8Rng, state: usize, low: usize, n: usize, away: f64) -> usize {
    let u = rng::next_f64(rng);
    if state == low {
        let down_ok = state > 0;
        let up_ok = state + 1 < n;
        match (down_ok, up_ok) {
            (true, true) => {
                if u < away / 2.0 {
                    state - 1
                } else if u < away {
                    state + 1
                } else {
                    state
                }
            }
            (true, false) => {
                if u < away {
                    state - 1
                } else {
                    state
                }
            }
            (false, true) => {
                if u < away {
                    state + 1
                } else {
                    state
                }
            }
            (false, false) => state,
        }
    } else if state < low {
        if u < away {
            state.saturating_sub(1).max(0)
        } else if u < away + TOWARD_RATE {
            state + 1
        } else {
            state
        }
    } else {
        if u < away {
            (state + 1).min(n - 1)
        } else if u < away + TOWARD_RATE {
            state - 1
        } else {
            state
        }
    }
}

/// Generates `n_records` admissions with `samples` measurements per
/// sensor series. Record `i` takes age group `i % 3`, BMI class
/// `i % 6` and unit `i % 4`, so thirteen records already cover every
/// profile. Deterministic in `seed`.
pub fn generate_synthetic_dataset(
    seed: u64,
    n_records: usize,
    samples: usize,
) -> Result<FieldDataset, SynthError> {
    if n_records == 0 {
        return Err(SynthError::ZeroRecords);
    }
    if samples < 2 {
        return Err(SynthError::TooFewSamples { samples });
    }
    let table = RiskRangeTable::default_table();
    let mut rng = rng::seeded(seed, domain::SYNTH);
    let mut records = Vec::with_capacity(n_records);
    for i in 0..n_records {
        let group = AgeGroup::ALL[i % 3];
        let class = BmiClass::ALL[i % 6];
        let icu = IcuType::ALL[i % 4];

        let (age_lo, age_hi) = age_range(group);
        let age = uniform_u32(&mut rng, age_lo, age_hi);
        let (bmi_lo, bmi_hi) = bmi_target_range(class);
        let bmi = rng::uniform_in(&mut rng, bmi_lo, bmi_hi);
        let height_m = rng::uniform_in(&mut rng, 1.50, 1.95);
        let weight_kg = bmi * height_m * height_m;
        let gender: String = if i % 2 == 0 { "F" } else { "M" }.to_string();

        let factor =
            (age_tilt(group) * bmi_tilt(class) * icu_tilt(icu)).clamp(0.5, 2.0);
        let away = AWAY_RATE * factor;

        let mut series: [Vec<Sample>; 6] = Default::default();
        for sensor in SensorKind::ALL {
            let bands = table.bands(sensor);
            let n = bands.len();
            let low = bands
                .iter()
                .position(|b| b.level == RiskLevel::Low)
                .expect("every sensor has a Low band");
            let mut state = low;
            let out = &mut series[sensor.index()];
            out.reserve(samples);
            for k in 0..samples {
                let band = &bands[state];
                let value = rng::uniform_in(&mut rng, band.lo, band.hi);
                out.push(Sample { t_offset: k as f64, value });
                state = walk_step(&mut rng, state, low, n, away);
            }
        }

        records.push(PatientRecord {
            record_id: format!("R{:04}", i + 1),
            age,
            gender,
            height_m,
            weight_kg,
            icu,
            series,
        });
    }
    Ok(FieldDataset::new(records).expect("generated records satisfy dataset invariants"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::build_profile_models;
    use crate::model::{categorize, compute_bmi, ProfileId};

    #[test]
    fn rejects_degenerate_requests() {
        assert_eq!(generate_synthetic_dataset(1, 0, 10), Err(SynthError::ZeroRecords));
        assert_eq!(
            generate_synthetic_dataset(1, 5, 1),
            Err(SynthError::TooFewSamples { samples: 1 })
        );
    }

    #[test]
    fn deterministic_in_seed() {
        let a = generate_synthetic_dataset(42, 13, 50).unwrap();
        let b = generate_synthetic_dataset(42, 13, 50).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic_dataset(43, 13, 50).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn thirteen_records_feed_every_profile() {
        let table = RiskRangeTable::default_table();
        let data = generate_synthetic_dataset(7, 13, 30).unwrap();
        let (models, empty) = build_profile_models(&data, &table).unwrap();
        assert_eq!(models.len(), 13);
        assert!(empty.is_empty(), "unfed profiles: {empty:?}");
    }

    #[test]
    fn categories_follow_record_index() {
        let data = generate_synthetic_dataset(3, 13, 10).unwrap();
        for (i, record) in data.records.iter().enumerate() {
            let profiles = categorize(record).unwrap();
            assert_eq!(profiles[0], ProfileId::Age(AgeGroup::ALL[i % 3]));
            assert_eq!(profiles[1], ProfileId::Bmi(BmiClass::ALL[i % 6]));
            assert_eq!(profiles[2], ProfileId::Icu(IcuType::ALL[i % 4]));
            assert_eq!(record.record_id, format!("R{:04}", i + 1));
        }
    }

    #[test]
    fn bmi_lands_inside_target_class_with_margin() {
        let data = generate_synthetic_dataset(11, 24, 5).unwrap();
        for (i, record) in data.records.iter().enumerate() {
            let bmi = compute_bmi(record.weight_kg, record.height_m).unwrap();
            let (lo, hi) = bmi_target_range(BmiClass::ALL[i % 6]);
            assert!(bmi >= lo - 1e-9 && bmi <= hi + 1e-9, "record {i}: bmi {bmi}");
        }
    }

    #[test]
    fn long_series_leave_the_low_band_sometimes() {
        let table = RiskRangeTable::default_table();
        let data = generate_synthetic_dataset(5, 13, 2000).unwrap();
        let mut highs = 0usize;
        let mut total = 0usize;
        for record in &data.records {
            for sensor in SensorKind::ALL {
                for sample in &record.series[sensor.index()] {
                    if table.classify(sensor, sample.value).unwrap() == RiskLevel::High {
                        highs += 1;
                    }
                    total += 1;
                }
            }
        }
        let frac = highs as f64 / total as f64;
        assert!(frac > 0.005 && frac < 0.25, "high fraction {frac}");
    }
}
