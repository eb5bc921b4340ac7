//! Domain vocabulary: the six monitored vital signs, their risk bands,
//! patient admission records and the thirteen patient profiles.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// The six body sensors, in canonical order. The order is load-bearing:
/// data-sample records, DSRs and weight vectors index by it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SensorKind {
    /// Pulse oximeter, %.
    Oxi,
    /// Electrocardiogram, bpm.
    Ecg,
    /// Thermometer, °C.
    Term,
    /// Systolic arterial pressure, mmHg.
    Abps,
    /// Diastolic arterial pressure, mmHg.
    Abpd,
    /// Glucose meter, mg/dL.
    Glc,
}

impl SensorKind {
    pub const ALL: [SensorKind; 6] = [
        SensorKind::Oxi,
        SensorKind::Ecg,
        SensorKind::Term,
        SensorKind::Abps,
        SensorKind::Abpd,
        SensorKind::Glc,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            SensorKind::Oxi => "Oxi",
            SensorKind::Ecg => "Ecg",
            SensorKind::Term => "Term",
            SensorKind::Abps => "Abps",
            SensorKind::Abpd => "Abpd",
            SensorKind::Glc => "Glc",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            SensorKind::Oxi => "%",
            SensorKind::Ecg => "bpm",
            SensorKind::Term => "°C",
            SensorKind::Abps => "mmHg",
            SensorKind::Abpd => "mmHg",
            SensorKind::Glc => "mg/dL",
        }
    }

    pub fn parse(s: &str) -> Option<SensorKind> {
        Self::ALL.into_iter().find(|k| k.label() == s)
    }
}

impl fmt::Display for SensorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Per-sensor risk classification of a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RiskLevel {
    Low,
    Medium,
    High,
}

impl RiskLevel {
    pub fn label(self) -> &'static str {
        match self {
            RiskLevel::Low => "Low",
            RiskLevel::Medium => "Medium",
            RiskLevel::High => "High",
        }
    }

    pub fn parse(s: &str) -> Option<RiskLevel> {
        match s {
            "Low" => Some(RiskLevel::Low),
            "Medium" => Some(RiskLevel::Medium),
            "High" => Some(RiskLevel::High),
            _ => None,
        }
    }
}

impl fmt::Display for RiskLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One value band of a sensor's range table. Bands are half-open on
/// paper ([lo, hi)), but a value exactly on an interior boundary is
/// assigned to the riskier of the two touching bands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub level: RiskLevel,
}

/// Errors from domain-level operations.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// Value falls outside the sensor's total measurable range.
    OutOfDomain { sensor: SensorKind, value: f64 },
    /// A physical quantity that must be strictly positive was not.
    NonPositive { quantity: &'static str, value: f64 },
    /// Admission age below the supported minimum of 16 years.
    AgeBelowRange { age: u32 },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::OutOfDomain { sensor, value } => {
                write!(f, "{value} is outside the {sensor} domain")
            }
            ModelError::NonPositive { quantity, value } => {
                write!(f, "{quantity} must be positive, got {value}")
            }
            ModelError::AgeBelowRange { age } => {
                write!(f, "age {age} is below the supported minimum of 16")
            }
        }
    }
}

impl core::error::Error for ModelError {}

/// Structural defects in a risk-range table.
#[derive(Debug, Clone, PartialEq)]
pub enum TableError {
    Empty { sensor: SensorKind },
    Degenerate { sensor: SensorKind, lo: f64, hi: f64 },
    Gap { sensor: SensorKind, at: f64 },
    NoLowBand { sensor: SensorKind },
    MultipleLowBands { sensor: SensorKind },
}

impl fmt::Display for TableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableError::Empty { sensor } => write!(f, "{sensor}: no bands"),
            TableError::Degenerate { sensor, lo, hi } => {
                write!(f, "{sensor}: band [{lo}, {hi}) is not ascending")
            }
            TableError::Gap { sensor, at } => {
                write!(f, "{sensor}: bands are not contiguous at {at}")
            }
            TableError::NoLowBand { sensor } => write!(f, "{sensor}: no Low band"),
            TableError::MultipleLowBands { sensor } => {
                write!(f, "{sensor}: more than one Low band")
            }
        }
    }
}

impl core::error::Error for TableError {}

/// Per-sensor band layout mapping raw values to risk levels.
///
/// Bands are kept in ascending value order and must tile the sensor's
/// domain without gaps. Exactly one band per sensor carries `Low`; it
/// doubles as the initial state of derived patient chains.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskRangeTable {
    bands: [Vec<Band>; 6],
}

impl RiskRangeTable {
    /// Builds a table from per-sensor band lists (ascending order).
    pub fn new(bands: [Vec<Band>; 6]) -> Result<Self, TableError> {
        let table = RiskRangeTable { bands };
        table.validate()?;
        Ok(table)
    }

    /// The built-in clinical band layout.
    pub fn default_table() -> Self {
        use RiskLevel::*;
        let b = |lo: f64, hi: f64, level: RiskLevel| Band { lo, hi, level };
        RiskRangeTable {
            bands: [
                alloc::vec![b(0.0, 55.0, High), b(55.0, 65.0, Medium), b(65.0, 100.0, Low)],
                alloc::vec![
                    b(0.0, 70.0, High),
                    b(70.0, 85.0, Medium),
                    b(85.0, 97.0, Low),
                    b(97.0, 115.0, Medium),
                    b(115.0, 300.0, High),
                ],
                alloc::vec![
                    b(0.0, 32.0, High),
                    b(32.0, 36.0, Medium),
                    b(36.0, 38.0, Low),
                    b(38.0, 41.0, Medium),
                    b(41.0, 50.0, High),
                ],
                alloc::vec![b(0.0, 120.0, Low), b(120.0, 140.0, Medium), b(140.0, 300.0, High)],
                alloc::vec![b(0.0, 80.0, Low), b(80.0, 90.0, Medium), b(90.0, 300.0, High)],
                alloc::vec![
                    b(20.0, 40.0, High),
                    b(40.0, 55.0, Medium),
                    b(55.0, 96.0, Low),
                    b(96.0, 120.0, Medium),
                    b(120.0, 200.0, High),
                ],
            ],
        }
    }

    fn validate(&self) -> Result<(), TableError> {
        for sensor in SensorKind::ALL {
            let bands = self.bands(sensor);
            if bands.is_empty() {
                return Err(TableError::Empty { sensor });
            }
            let mut lows = 0;
            for (i, band) in bands.iter().enumerate() {
                if !(band.lo < band.hi) {
                    return Err(TableError::Degenerate { sensor, lo: band.lo, hi: band.hi });
                }
                if i > 0 && bands[i - 1].hi != band.lo {
                    return Err(TableError::Gap { sensor, at: band.lo });
                }
                if band.level == RiskLevel::Low {
                    lows += 1;
                }
            }
            if lows == 0 {
                return Err(TableError::NoLowBand { sensor });
            }
            if lows > 1 {
                return Err(TableError::MultipleLowBands { sensor });
            }
        }
        Ok(())
    }

    pub fn bands(&self, sensor: SensorKind) -> &[Band] {
        &self.bands[sensor.index()]
    }

    /// Total measurable range of the sensor, endpoints inclusive.
    pub fn domain(&self, sensor: SensorKind) -> (f64, f64) {
        let bands = self.bands(sensor);
        (bands[0].lo, bands[bands.len() - 1].hi)
    }

    /// Index of the sensor's unique Low band.
    pub fn low_band_index(&self, sensor: SensorKind) -> usize {
        self.bands(sensor)
            .iter()
            .position(|b| b.level == RiskLevel::Low)
            .expect("validated table has a Low band")
    }

    /// Band index for a value. Interior boundary values go to the
    /// riskier of the two touching bands; domain endpoints belong to
    /// their only touching band.
    pub fn band_index(&self, sensor: SensorKind, value: f64) -> Result<usize, ModelError> {
        let bands = self.bands(sensor);
        let (lo, hi) = self.domain(sensor);
        if !value.is_finite() || value < lo || value > hi {
            return Err(ModelError::OutOfDomain { sensor, value });
        }
        if value == lo {
            return Ok(0);
        }
        if value == hi {
            return Ok(bands.len() - 1);
        }
        for (i, band) in bands.iter().enumerate() {
            if value == band.lo {
                // Boundary between band i-1 and band i.
                return Ok(if bands[i - 1].level >= band.level { i - 1 } else { i });
            }
            if value > band.lo && value < band.hi {
                return Ok(i);
            }
        }
        unreachable!("contiguous bands cover the domain")
    }

    pub fn classify(&self, sensor: SensorKind, value: f64) -> Result<RiskLevel, ModelError> {
        Ok(self.bands(sensor)[self.band_index(sensor, value)?].level)
    }
}

impl Default for RiskRangeTable {
    fn default() -> Self {
        Self::default_table()
    }
}

/// Risk level of one sensor value under the given table.
pub fn classify_risk(
    sensor: SensorKind,
    value: f64,
    table: &RiskRangeTable,
) -> Result<RiskLevel, ModelError> {
    table.classify(sensor, value)
}

/// Fused patient state reported to the medical staff, ordered by
/// severity. Numeric ids 1..=5 feed the verdict distance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutcomeLevel {
    VeryLow,
    Low,
    Moderate,
    Critical,
    VeryCritical,
}

impl OutcomeLevel {
    pub const ALL: [OutcomeLevel; 5] = [
        OutcomeLevel::VeryLow,
        OutcomeLevel::Low,
        OutcomeLevel::Moderate,
        OutcomeLevel::Critical,
        OutcomeLevel::VeryCritical,
    ];

    pub fn id(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_id(id: u8) -> Option<OutcomeLevel> {
        Self::ALL.get(id.checked_sub(1)? as usize).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            OutcomeLevel::VeryLow => "VeryLow",
            OutcomeLevel::Low => "Low",
            OutcomeLevel::Moderate => "Moderate",
            OutcomeLevel::Critical => "Critical",
            OutcomeLevel::VeryCritical => "VeryCritical",
        }
    }
}

impl fmt::Display for OutcomeLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One sensor slot of a data sample record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReadingValue {
    Present(f64),
    /// The sensor is known to be off; no value was produced.
    Deactivated,
}

impl ReadingValue {
    pub fn value(self) -> Option<f64> {
        match self {
            ReadingValue::Present(v) => Some(v),
            ReadingValue::Deactivated => None,
        }
    }
}

/// Data sample record: one simulated second of all six vital signs,
/// stamped with the tick and the profile active at that tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Dsr {
    pub tick: u64,
    pub profile: ProfileId,
    pub readings: [ReadingValue; 6],
}

impl Dsr {
    pub fn reading(&self, sensor: SensorKind) -> ReadingValue {
        self.readings[sensor.index()]
    }
}

/// Age bracket of a patient profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgeGroup {
    /// 16 to 29 years.
    Youth,
    /// 30 to 59 years.
    Adult,
    /// 60 years and above.
    Elderly,
}

impl AgeGroup {
    pub const ALL: [AgeGroup; 3] = [AgeGroup::Youth, AgeGroup::Adult, AgeGroup::Elderly];

    pub fn label(self) -> &'static str {
        match self {
            AgeGroup::Youth => "Youth",
            AgeGroup::Adult => "Adult",
            AgeGroup::Elderly => "Elderly",
        }
    }

    pub fn of_age(age: u32) -> Result<AgeGroup, ModelError> {
        match age {
            0..=15 => Err(ModelError::AgeBelowRange { age }),
            16..=29 => Ok(AgeGroup::Youth),
            30..=59 => Ok(AgeGroup::Adult),
            _ => Ok(AgeGroup::Elderly),
        }
    }
}

/// Body-mass-index bracket. Brackets are lower-inclusive and
/// upper-exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BmiClass {
    Underweight,
    NormalWeight,
    Overweight,
    Obesity1,
    Obesity2,
    Obesity3,
}

impl BmiClass {
    pub const ALL: [BmiClass; 6] = [
        BmiClass::Underweight,
        BmiClass::NormalWeight,
        BmiClass::Overweight,
        BmiClass::Obesity1,
        BmiClass::Obesity2,
        BmiClass::Obesity3,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BmiClass::Underweight => "Underweight",
            BmiClass::NormalWeight => "NormalWeight",
            BmiClass::Overweight => "Overweight",
            BmiClass::Obesity1 => "Obesity1",
            BmiClass::Obesity2 => "Obesity2",
            BmiClass::Obesity3 => "Obesity3",
        }
    }

    pub fn of_bmi(bmi: f64) -> BmiClass {
        if bmi < 18.5 {
            BmiClass::Underweight
        } else if bmi < 25.0 {
            BmiClass::NormalWeight
        } else if bmi < 30.0 {
            BmiClass::Overweight
        } else if bmi < 35.0 {
            BmiClass::Obesity1
        } else if bmi < 40.0 {
            BmiClass::Obesity2
        } else {
            BmiClass::Obesity3
        }
    }
}

/// Intensive-care unit the patient was admitted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IcuType {
    CardiacSurgeryUnit,
    CoronaryCareUnit,
    MedicalIcu,
    SurgicalIcu,
}

impl IcuType {
    pub const ALL: [IcuType; 4] = [
        IcuType::CardiacSurgeryUnit,
        IcuType::CoronaryCareUnit,
        IcuType::MedicalIcu,
        IcuType::SurgicalIcu,
    ];

    pub fn label(self) -> &'static str {
        match self {
            IcuType::CardiacSurgeryUnit => "CardiacSurgeryUnit",
            IcuType::CoronaryCareUnit => "CoronaryCareUnit",
            IcuType::MedicalIcu => "MedicalICU",
            IcuType::SurgicalIcu => "SurgicalICU",
        }
    }

    pub fn parse(s: &str) -> Option<IcuType> {
        Self::ALL.into_iter().find(|k| k.label() == s)
    }
}

impl fmt::Display for IcuType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One of the thirteen patient profiles: an age bracket, a BMI bracket
/// or an ICU type. Each admission record belongs to exactly one profile
/// of each dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProfileId {
    Age(AgeGroup),
    Bmi(BmiClass),
    Icu(IcuType),
}

impl ProfileId {
    pub const ALL: [ProfileId; 13] = [
        ProfileId::Age(AgeGroup::Youth),
        ProfileId::Age(AgeGroup::Adult),
        ProfileId::Age(AgeGroup::Elderly),
        ProfileId::Bmi(BmiClass::Underweight),
        ProfileId::Bmi(BmiClass::NormalWeight),
        ProfileId::Bmi(BmiClass::Overweight),
        ProfileId::Bmi(BmiClass::Obesity1),
        ProfileId::Bmi(BmiClass::Obesity2),
        ProfileId::Bmi(BmiClass::Obesity3),
        ProfileId::Icu(IcuType::CardiacSurgeryUnit),
        ProfileId::Icu(IcuType::CoronaryCareUnit),
        ProfileId::Icu(IcuType::MedicalIcu),
        ProfileId::Icu(IcuType::SurgicalIcu),
    ];

    /// The six BMI profiles, the only ones with non-trivial oracle
    /// weights.
    pub const BMI: [ProfileId; 6] = [
        ProfileId::Bmi(BmiClass::Underweight),
        ProfileId::Bmi(BmiClass::NormalWeight),
        ProfileId::Bmi(BmiClass::Overweight),
        ProfileId::Bmi(BmiClass::Obesity1),
        ProfileId::Bmi(BmiClass::Obesity2),
        ProfileId::Bmi(BmiClass::Obesity3),
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|p| *p == self).expect("every profile is listed")
    }

    pub fn parse(s: &str) -> Option<ProfileId> {
        let (dim, name) = s.split_once(':')?;
        match dim {
            "Age" => AgeGroup::ALL.into_iter().find(|g| g.label() == name).map(ProfileId::Age),
            "BMI" => BmiClass::ALL.into_iter().find(|c| c.label() == name).map(ProfileId::Bmi),
            "ICU" => IcuType::ALL.into_iter().find(|u| u.label() == name).map(ProfileId::Icu),
            _ => None,
        }
    }
}

impl fmt::Display for ProfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileId::Age(g) => write!(f, "Age:{}", g.label()),
            ProfileId::Bmi(c) => write!(f, "BMI:{}", c.label()),
            ProfileId::Icu(u) => write!(f, "ICU:{}", u.label()),
        }
    }
}

/// One timestamped field measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t_offset: f64,
    pub value: f64,
}

/// One patient admission with its per-sensor measurement series.
#[derive(Debug, Clone, PartialEq)]
pub struct PatientRecord {
    pub record_id: String,
    pub age: u32,
    pub gender: String,
    pub height_m: f64,
    pub weight_kg: f64,
    pub icu: IcuType,
    /// Indexed by `SensorKind`; rows ordered by timestamp.
    pub series: [Vec<Sample>; 6],
}

/// Body mass index, kg/m². Errors if either dimension is not strictly
/// positive.
pub fn compute_bmi(weight_kg: f64, height_m: f64) -> Result<f64, ModelError> {
    if !(height_m > 0.0) {
        return Err(ModelError::NonPositive { quantity: "height", value: height_m });
    }
    if !(weight_kg > 0.0) {
        return Err(ModelError::NonPositive { quantity: "weight", value: weight_kg });
    }
    Ok(weight_kg / (height_m * height_m))
}

/// The three profiles an admission belongs to, one per dimension.
pub fn categorize(record: &PatientRecord) -> Result<[ProfileId; 3], ModelError> {
    let age = AgeGroup::of_age(record.age)?;
    let bmi = BmiClass::of_bmi(compute_bmi(record.weight_kg, record.height_m)?);
    Ok([ProfileId::Age(age), ProfileId::Bmi(bmi), ProfileId::Icu(record.icu)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn default_band_counts() {
        let t = RiskRangeTable::default_table();
        assert_eq!(t.bands(SensorKind::Oxi).len(), 3);
        assert_eq!(t.bands(SensorKind::Ecg).len(), 5);
        assert_eq!(t.bands(SensorKind::Term).len(), 5);
        assert_eq!(t.bands(SensorKind::Abps).len(), 3);
        assert_eq!(t.bands(SensorKind::Abpd).len(), 3);
        assert_eq!(t.bands(SensorKind::Glc).len(), 5);
        t.validate().unwrap();
    }

    #[test]
    fn classify_interior_values() {
        let t = RiskRangeTable::default_table();
        assert_eq!(t.classify(SensorKind::Oxi, 70.0), Ok(RiskLevel::Low));
        assert_eq!(t.classify(SensorKind::Glc, 30.0), Ok(RiskLevel::High));
        assert_eq!(t.classify(SensorKind::Term, 39.0), Ok(RiskLevel::Medium));
        assert_eq!(t.classify(SensorKind::Ecg, 90.0), Ok(RiskLevel::Low));
        assert_eq!(t.classify(SensorKind::Abps, 130.0), Ok(RiskLevel::Medium));
        assert_eq!(t.classify(SensorKind::Abpd, 95.0), Ok(RiskLevel::High));
    }

    #[test]
    fn boundary_goes_to_riskier_band() {
        let t = RiskRangeTable::default_table();
        assert_eq!(t.classify(SensorKind::Oxi, 65.0), Ok(RiskLevel::Medium));
        assert_eq!(t.classify(SensorKind::Oxi, 55.0), Ok(RiskLevel::High));
        assert_eq!(t.classify(SensorKind::Term, 38.0), Ok(RiskLevel::Medium));
        assert_eq!(t.classify(SensorKind::Term, 36.0), Ok(RiskLevel::Medium));
        assert_eq!(t.classify(SensorKind::Ecg, 70.0), Ok(RiskLevel::High));
        assert_eq!(t.classify(SensorKind::Ecg, 115.0), Ok(RiskLevel::High));
        assert_eq!(t.classify(SensorKind::Abps, 140.0), Ok(RiskLevel::High));
    }

    #[test]
    fn domain_endpoints_belong_to_edge_bands() {
        let t = RiskRangeTable::default_table();
        assert_eq!(t.classify(SensorKind::Oxi, 0.0), Ok(RiskLevel::High));
        assert_eq!(t.classify(SensorKind::Oxi, 100.0), Ok(RiskLevel::Low));
        assert_eq!(t.classify(SensorKind::Glc, 20.0), Ok(RiskLevel::High));
        assert_eq!(t.classify(SensorKind::Glc, 200.0), Ok(RiskLevel::High));
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let t = RiskRangeTable::default_table();
        assert!(t.classify(SensorKind::Oxi, 100.1).is_err());
        assert!(t.classify(SensorKind::Glc, 19.9).is_err());
        assert!(t.classify(SensorKind::Term, f64::NAN).is_err());
    }

    #[test]
    fn full_domain_sweep_classifies_every_value() {
        let t = RiskRangeTable::default_table();
        for sensor in SensorKind::ALL {
            let (lo, hi) = t.domain(sensor);
            for i in 0..=10_000 {
                let v = lo + (hi - lo) * (i as f64 / 10_000.0);
                t.classify(sensor, v).unwrap();
            }
        }
    }

    #[test]
    fn rejects_malformed_tables() {
        let b = |lo, hi, level| Band { lo, hi, level };
        let mk = |oxi: Vec<Band>| {
            let mut bands = RiskRangeTable::default_table().bands;
            bands[0] = oxi;
            RiskRangeTable::new(bands)
        };
        assert!(matches!(mk(vec![]), Err(TableError::Empty { .. })));
        assert!(matches!(
            mk(vec![b(0.0, 0.0, RiskLevel::Low)]),
            Err(TableError::Degenerate { .. })
        ));
        assert!(matches!(
            mk(vec![b(0.0, 50.0, RiskLevel::Low), b(60.0, 100.0, RiskLevel::High)]),
            Err(TableError::Gap { .. })
        ));
        assert!(matches!(
            mk(vec![b(0.0, 100.0, RiskLevel::High)]),
            Err(TableError::NoLowBand { .. })
        ));
        assert!(matches!(
            mk(vec![b(0.0, 50.0, RiskLevel::Low), b(50.0, 100.0, RiskLevel::Low)]),
            Err(TableError::MultipleLowBands { .. })
        ));
    }

    #[test]
    fn outcome_ids_round_trip() {
        for level in OutcomeLevel::ALL {
            assert_eq!(OutcomeLevel::from_id(level.id()), Some(level));
        }
        assert_eq!(OutcomeLevel::VeryLow.id(), 1);
        assert_eq!(OutcomeLevel::VeryCritical.id(), 5);
        assert_eq!(OutcomeLevel::from_id(0), None);
        assert_eq!(OutcomeLevel::from_id(6), None);
    }

    #[test]
    fn bmi_formula_and_errors() {
        assert_eq!(compute_bmi(80.0, 2.0), Ok(20.0));
        let bmi = compute_bmi(45.0, 1.6).unwrap();
        assert!((bmi - 17.578125).abs() < 1e-12);
        assert!(compute_bmi(50.0, 0.0).is_err());
        assert!(compute_bmi(0.0, 1.7).is_err());
        assert!(compute_bmi(-3.0, 1.7).is_err());
    }

    #[test]
    fn bmi_brackets_are_lower_inclusive() {
        assert_eq!(BmiClass::of_bmi(18.5), BmiClass::NormalWeight);
        assert_eq!(BmiClass::of_bmi(18.49), BmiClass::Underweight);
        assert_eq!(BmiClass::of_bmi(25.0), BmiClass::Overweight);
        assert_eq!(BmiClass::of_bmi(30.0), BmiClass::Obesity1);
        assert_eq!(BmiClass::of_bmi(35.0), BmiClass::Obesity2);
        assert_eq!(BmiClass::of_bmi(40.0), BmiClass::Obesity3);
        assert_eq!(BmiClass::of_bmi(55.0), BmiClass::Obesity3);
    }

    fn record(age: u32, height: f64, weight: f64, icu: IcuType) -> PatientRecord {
        PatientRecord {
            record_id: "R0001".to_string(),
            age,
            gender: "F".to_string(),
            height_m: height,
            weight_kg: weight,
            icu,
            series: Default::default(),
        }
    }

    #[test]
    fn categorize_returns_one_profile_per_dimension() {
        let profiles = categorize(&record(25, 1.70, 120.0, IcuType::MedicalIcu)).unwrap();
        assert_eq!(
            profiles,
            [
                ProfileId::Age(AgeGroup::Youth),
                ProfileId::Bmi(BmiClass::Obesity3),
                ProfileId::Icu(IcuType::MedicalIcu)
            ]
        );
        let profiles = categorize(&record(65, 2.0, 74.0, IcuType::CoronaryCareUnit)).unwrap();
        assert_eq!(
            profiles,
            [
                ProfileId::Age(AgeGroup::Elderly),
                ProfileId::Bmi(BmiClass::NormalWeight),
                ProfileId::Icu(IcuType::CoronaryCareUnit)
            ]
        );
    }

    #[test]
    fn categorize_rejects_invalid_records() {
        assert!(categorize(&record(15, 1.7, 60.0, IcuType::MedicalIcu)).is_err());
        assert!(categorize(&record(40, 0.0, 60.0, IcuType::MedicalIcu)).is_err());
    }

    #[test]
    fn profile_labels_round_trip() {
        for p in ProfileId::ALL {
            let label = p.to_string();
            assert_eq!(ProfileId::parse(&label), Some(p));
        }
        assert_eq!(ProfileId::parse("BMI:Obesity9"), None);
        assert_eq!(ProfileId::parse("Weight:Obesity1"), None);
        assert_eq!(ProfileId::ALL.len(), 13);
    }

    #[test]
    fn sensor_labels_round_trip() {
        for s in SensorKind::ALL {
            assert_eq!(SensorKind::parse(s.label()), Some(s));
        }
        assert_eq!(SensorKind::parse("Emg"), None);
    }
}
