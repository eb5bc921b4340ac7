//! Turns field measurement series into per-profile patient models:
//! classify consecutive samples, count band transitions, normalize
//! counts into row-stochastic matrices.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::dtmc::Dtmc;
use crate::model::{
    categorize, Band, ModelError, PatientRecord, ProfileId, RiskRangeTable, SensorKind,
};

/// Validated collection of admission records. Ids are unique; series
/// rows are ordered by timestamp.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldDataset {
    pub records: Vec<PatientRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IngestError {
    DuplicateRecordId { record_id: String },
    InvalidRecord { record_id: String, cause: ModelError },
    /// A series value outside its sensor's domain.
    BadSample { record_id: String, sensor: SensorKind, cause: ModelError },
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestError::DuplicateRecordId { record_id } => {
                write!(f, "duplicate record id {record_id}")
            }
            IngestError::InvalidRecord { record_id, cause } => {
                write!(f, "record {record_id}: {cause}")
            }
            IngestError::BadSample { record_id, sensor, cause } => {
                write!(f, "record {record_id}, sensor {sensor}: {cause}")
            }
        }
    }
}

impl core::error::Error for IngestError {}

impl FieldDataset {
    /// Validates id uniqueness, record fields and series domains, and
    /// orders every series by timestamp (stable for equal stamps).
    pub fn new(mut records: Vec<PatientRecord>) -> Result<Self, IngestError> {
        let table = RiskRangeTable::default_table();
        for i in 0..records.len() {
            for j in 0..i {
                if records[i].record_id == records[j].record_id {
                    return Err(IngestError::DuplicateRecordId {
                        record_id: records[i].record_id.clone(),
                    });
                }
            }
        }
        for record in &mut records {
            categorize(record).map_err(|cause| IngestError::InvalidRecord {
                record_id: record.record_id.clone(),
                cause,
            })?;
            for sensor in SensorKind::ALL {
                let series = &mut record.series[sensor.index()];
                series.sort_by(|a, b| {
                    a.t_offset.partial_cmp(&b.t_offset).unwrap_or(core::cmp::Ordering::Equal)
                });
                for sample in series.iter() {
                    table.classify(sensor, sample.value).map_err(|cause| {
                        IngestError::BadSample {
                            record_id: record.record_id.clone(),
                            sensor,
                            cause,
                        }
                    })?;
                }
            }
        }
        Ok(FieldDataset { records })
    }
}

/// Raw transition tallies between one sensor's risk bands.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionCounts {
    pub sensor: SensorKind,
    pub bands: Vec<Band>,
    /// Row-major `dim x dim` tallies.
    pub counts: Vec<u64>,
}

impl TransitionCounts {
    pub fn empty(sensor: SensorKind, table: &RiskRangeTable) -> Self {
        let bands = table.bands(sensor).to_vec();
        let n = bands.len();
        TransitionCounts { sensor, bands, counts: alloc::vec![0; n * n] }
    }

    pub fn dim(&self) -> usize {
        self.bands.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// True when the source series had fewer than two samples, so no
    /// transition was observable.
    pub fn is_insufficient(&self) -> bool {
        self.total() == 0
    }

    pub fn add(&mut self, other: &TransitionCounts) {
        debug_assert_eq!(self.bands, other.bands);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}

/// Tallies band transitions over consecutive samples of one series.
/// A series with fewer than two samples yields all-zero counts.
pub fn derive_counts(
    values: &[f64],
    sensor: SensorKind,
    table: &RiskRangeTable,
) -> Result<TransitionCounts, ModelError> {
    let mut tc = TransitionCounts::empty(sensor, table);
    let n = tc.dim();
    let mut prev: Option<usize> = None;
    for &v in values {
        let state = table.band_index(sensor, v)?;
        if let Some(p) = prev {
            tc.counts[p * n + state] += 1;
        }
        prev = Some(state);
    }
    Ok(tc)
}

/// Normalizes tallies into a row-stochastic matrix. Rows with no
/// observations fall back to the uniform distribution. The chain
/// starts in the Low band.
pub fn normalize(counts: &TransitionCounts) -> Dtmc {
    let n = counts.dim();
    let mut rows = alloc::vec![0.0; n * n];
    for i in 0..n {
        let total: u64 = counts.counts[i * n..(i + 1) * n].iter().sum();
        for j in 0..n {
            rows[i * n + j] = if total == 0 {
                1.0 / n as f64
            } else {
                counts.counts[i * n + j] as f64 / total as f64
            };
        }
    }
    let low = counts
        .bands
        .iter()
        .position(|b| b.level == crate::model::RiskLevel::Low)
        .unwrap_or(0);
    Dtmc { bands: counts.bands.clone(), rows, current: low }
}

/// Patient model for one profile: a chain per sensor plus the band
/// table the chains were derived against.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileModel {
    pub profile: ProfileId,
    pub chains: [Dtmc; 6],
    pub ranges: RiskRangeTable,
}

impl ProfileModel {
    pub fn chain(&self, sensor: SensorKind) -> &Dtmc {
        &self.chains[sensor.index()]
    }
}

/// Pools every record's transition tallies into the three profiles the
/// record belongs to and normalizes the result, one model per profile.
///
/// Profiles with no contributing data fall back to all-uniform chains
/// and are reported in the second element.
pub fn build_profile_models(
    data: &FieldDataset,
    table: &RiskRangeTable,
) -> Result<(Vec<ProfileModel>, Vec<ProfileId>), IngestError> {
    let mut pooled: Vec<[TransitionCounts; 6]> = ProfileId::ALL
        .iter()
        .map(|_| SensorKind::ALL.map(|s| TransitionCounts::empty(s, table)))
        .collect();
    for record in &data.records {
        let profiles = categorize(record).map_err(|cause| IngestError::InvalidRecord {
            record_id: record.record_id.clone(),
            cause,
        })?;
        for sensor in SensorKind::ALL {
            let values: Vec<f64> =
                record.series[sensor.index()].iter().map(|s| s.value).collect();
            let counts = derive_counts(&values, sensor, table).map_err(|cause| {
                IngestError::BadSample { record_id: record.record_id.clone(), sensor, cause }
            })?;
            for profile in profiles {
                pooled[profile.index()][sensor.index()].add(&counts);
            }
        }
    }
    let mut models = Vec::with_capacity(ProfileId::ALL.len());
    let mut empty = Vec::new();
    for profile in ProfileId::ALL {
        let per_sensor = &pooled[profile.index()];
        if per_sensor.iter().all(|c| c.is_insufficient()) {
            empty.push(profile);
        }
        let chains = SensorKind::ALL.map(|s| normalize(&per_sensor[s.index()]));
        models.push(ProfileModel { profile, chains, ranges: table.clone() });
    }
    Ok((models, empty))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IcuType, RiskLevel, Sample};
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn counts_from_consecutive_classifications() {
        let table = RiskRangeTable::default_table();
        let tc =
            derive_counts(&[36.5, 36.7, 39.0, 40.0, 37.0], SensorKind::Term, &table).unwrap();
        // Term bands ascending: High, Medium, Low, Medium, High.
        assert_eq!(tc.dim(), 5);
        assert_eq!(tc.total(), 4);
        let at = |i: usize, j: usize| tc.counts[i * 5 + j];
        assert_eq!(at(2, 2), 1); // Low -> Low
        assert_eq!(at(2, 3), 1); // Low -> Medium (upper)
        assert_eq!(at(3, 3), 1); // Medium -> Medium
        assert_eq!(at(3, 2), 1); // Medium -> Low
    }

    #[test]
    fn short_series_is_insufficient() {
        let table = RiskRangeTable::default_table();
        let tc = derive_counts(&[36.5], SensorKind::Term, &table).unwrap();
        assert!(tc.is_insufficient());
        let tc = derive_counts(&[], SensorKind::Term, &table).unwrap();
        assert!(tc.is_insufficient());
        assert!(!derive_counts(&[36.5, 40.0], SensorKind::Term, &table)
            .unwrap()
            .is_insufficient());
    }

    #[test]
    fn out_of_domain_sample_is_an_error() {
        let table = RiskRangeTable::default_table();
        assert!(derive_counts(&[36.5, 55.5], SensorKind::Term, &table).is_err());
    }

    #[test]
    fn normalize_divides_rows_and_backfills_uniform() {
        let table = RiskRangeTable::default_table();
        let tc =
            derive_counts(&[36.5, 36.7, 39.0, 40.0, 37.0], SensorKind::Term, &table).unwrap();
        let chain = normalize(&tc);
        chain.validate().unwrap();
        assert_eq!(chain.current, 2); // starts in the Low band
        assert_eq!(chain.row(2), &[0.0, 0.0, 0.5, 0.5, 0.0]);
        assert_eq!(chain.row(3), &[0.0, 0.0, 0.5, 0.5, 0.0]);
        for i in [0usize, 1, 4] {
            assert_eq!(chain.row(i), &[0.2, 0.2, 0.2, 0.2, 0.2]);
        }
    }

    fn record(id: &str, icu: IcuType, term_values: &[f64]) -> PatientRecord {
        let mut series: [Vec<Sample>; 6] = Default::default();
        series[SensorKind::Term.index()] = term_values
            .iter()
            .enumerate()
            .map(|(i, &value)| Sample { t_offset: i as f64, value })
            .collect();
        PatientRecord {
            record_id: id.to_string(),
            age: 25,
            gender: "F".to_string(),
            height_m: 1.70,
            weight_kg: 65.0,
            icu,
            series,
        }
    }

    #[test]
    fn dataset_rejects_duplicate_ids() {
        let records = vec![
            record("R0001", IcuType::MedicalIcu, &[36.5]),
            record("R0001", IcuType::SurgicalIcu, &[36.5]),
        ];
        assert!(matches!(
            FieldDataset::new(records),
            Err(IngestError::DuplicateRecordId { .. })
        ));
    }

    #[test]
    fn dataset_orders_series_by_timestamp() {
        let mut r = record("R0001", IcuType::MedicalIcu, &[36.5, 37.0]);
        r.series[SensorKind::Term.index()].reverse();
        let ds = FieldDataset::new(vec![r]).unwrap();
        let series = &ds.records[0].series[SensorKind::Term.index()];
        assert!(series[0].t_offset < series[1].t_offset);
    }

    #[test]
    fn pooling_is_record_order_invariant() {
        let table = RiskRangeTable::default_table();
        let a = record("R0001", IcuType::MedicalIcu, &[36.5, 39.0, 37.0]);
        let b = record("R0002", IcuType::MedicalIcu, &[36.2, 36.4, 42.0]);
        let fwd = FieldDataset::new(vec![a.clone(), b.clone()]).unwrap();
        let rev = FieldDataset::new(vec![b, a]).unwrap();
        let (m1, _) = build_profile_models(&fwd, &table).unwrap();
        let (m2, _) = build_profile_models(&rev, &table).unwrap();
        assert_eq!(m1, m2);
    }

    #[test]
    fn records_contribute_to_all_three_profiles() {
        let table = RiskRangeTable::default_table();
        let ds =
            FieldDataset::new(vec![record("R0001", IcuType::MedicalIcu, &[36.5, 39.0])]).unwrap();
        let (models, empty) = build_profile_models(&ds, &table).unwrap();
        assert_eq!(models.len(), 13);
        // Age:Youth, BMI:NormalWeight (65 / 1.7^2 = 22.5) and
        // ICU:MedicalICU received the same single transition.
        let fed: Vec<ProfileId> =
            ProfileId::ALL.into_iter().filter(|p| !empty.contains(p)).collect();
        assert_eq!(fed.len(), 3);
        for p in &fed {
            let model = &models[p.index()];
            let term = model.chain(SensorKind::Term);
            assert_eq!(term.row(2)[3], 1.0); // Low -> Medium observed once
        }
        // Unfed profiles are uniform everywhere.
        let unfed = &models[ProfileId::Bmi(crate::model::BmiClass::Obesity3).index()];
        for sensor in SensorKind::ALL {
            let chain = unfed.chain(sensor);
            let n = chain.dim();
            ((0..n * n).for_each(|k| assert_eq!(chain.rows[k], 1.0 / n as f64)));
        }
        assert_eq!(empty.len(), 10);
    }

    #[test]
    fn low_band_rule_on_low_free_table() {
        // normalize falls back to state 0 when no Low band exists.
        let bands = vec![
            Band { lo: 0.0, hi: 1.0, level: RiskLevel::Medium },
            Band { lo: 1.0, hi: 2.0, level: RiskLevel::High },
        ];
        let tc = TransitionCounts { sensor: SensorKind::Oxi, bands, counts: vec![0; 4] };
        assert_eq!(normalize(&tc).current, 0);
    }
}
