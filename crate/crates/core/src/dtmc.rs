//! Discrete-time Markov chains over risk bands and the patient
//! simulator that drives one chain per sensor, one step per simulated
//! second.

use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;

use crate::ingest::ProfileModel;
use crate::model::{Band, Dsr, ProfileId, ReadingValue, SensorKind};
use crate::rng;

/// Tolerance for row-stochasticity checks.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum DtmcError {
    /// Matrix is not square or does not match the band count.
    Shape { states: usize, entries: usize },
    /// An entry falls outside [0, 1].
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    /// A row does not sum to 1 within `ROW_SUM_TOLERANCE`.
    RowNotStochastic { row: usize, sum: f64 },
    /// Current state index is out of bounds.
    CurrentOutOfRange { current: usize, states: usize },
    /// Band with lo >= hi cannot be sampled.
    DegenerateBand { lo: f64, hi: f64 },
}

impl fmt::Display for DtmcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DtmcError::Shape { states, entries } => {
                write!(f, "matrix has {entries} entries, expected {states}x{states}")
            }
            DtmcError::EntryOutOfRange { row, col, value } => {
                write!(f, "P[{row}][{col}] = {value} is outside [0, 1]")
            }
            DtmcError::RowNotStochastic { row, sum } => {
                write!(f, "row {row} sums to {sum}, expected 1")
            }
            DtmcError::CurrentOutOfRange { current, states } => {
                write!(f, "state {current} out of range for {states} states")
            }
            DtmcError::DegenerateBand { lo, hi } => {
                write!(f, "band [{lo}, {hi}) has no width to sample")
            }
        }
    }
}

impl core::error::Error for DtmcError {}

/// A chain over one sensor's risk bands. States are the bands in
/// ascending value order; `rows` is the row-major transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dtmc {
    pub bands: Vec<Band>,
    pub rows: Vec<f64>,
    pub current: usize,
}

impl Dtmc {
    pub fn new(bands: Vec<Band>, rows: Vec<f64>, current: usize) -> Result<Self, DtmcError> {
        let chain = Dtmc { bands, rows, current };
        chain.validate()?;
        Ok(chain)
    }

    pub fn dim(&self) -> usize {
        self.bands.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim()..(i + 1) * self.dim()]
    }

    /// Checks shape, entry range, row-stochasticity and the current
    /// state index.
    pub fn validate(&self) -> Result<(), DtmcError> {
        let n = self.dim();
        if self.rows.len() != n * n {
            return Err(DtmcError::Shape { states: n, entries: self.rows.len() });
        }
        for i in 0..n {
            let mut sum = 0.0;
            for j in 0..n {
                let p = self.rows[i * n + j];
                if !(0.0..=1.0).contains(&p) {
                    return Err(DtmcError::EntryOutOfRange { row: i, col: j, value: p });
                }
                sum += p;
            }
            if libm::fabs(sum - 1.0) > ROW_SUM_TOLERANCE {
                return Err(DtmcError::RowNotStochastic { row: i, sum });
            }
        }
        if self.current >= n {
            return Err(DtmcError::CurrentOutOfRange { current: self.current, states: n });
        }
        Ok(())
    }

    /// Advances one step by inverse-CDF sampling over the current row
    /// and returns the new state index. State order is fixed, so a
    /// given rng stream always walks the same trajectory.
    pub fn step(&mut self, rng: &mut ChaCha8Rng) -> usize {
        let u = rng::next_f64(rng);
        let row = self.row(self.current);
        let mut cum = 0.0;
        let mut next = row.len() - 1; // guards against cum < 1 from rounding
        for (j, p) in row.iter().enumerate() {
            cum += p;
            if u < cum {
                next = j;
                break;
            }
        }
        self.current = next;
        next
    }
}

/// Uniform draw within a band, lower bound inclusive.
pub fn sample_value(band: &Band, rng: &mut ChaCha8Rng) -> Result<f64, DtmcError> {
    if !(band.lo < band.hi) {
        return Err(DtmcError::DegenerateBand { lo: band.lo, hi: band.hi });
    }
    Ok(rng::uniform_in(rng, band.lo, band.hi))
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    EmptySchedule,
    ZeroDuration { profile: ProfileId },
    UnknownProfile { profile: ProfileId },
    BadModel { profile: ProfileId, sensor: SensorKind, cause: DtmcError },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::EmptySchedule => write!(f, "schedule has no entries"),
            SimError::ZeroDuration { profile } => {
                write!(f, "schedule entry for {profile} has zero duration")
            }
            SimError::UnknownProfile { profile } => {
                write!(f, "no model for profile {profile}")
            }
            SimError::BadModel { profile, sensor, cause } => {
                write!(f, "model {profile}/{sensor}: {cause}")
            }
        }
    }
}

impl core::error::Error for SimError {}

/// Ordered list of (profile, duration in ticks) segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub entries: Vec<(ProfileId, u64)>,
}

impl Schedule {
    pub fn new(entries: Vec<(ProfileId, u64)>) -> Result<Self, SimError> {
        if entries.is_empty() {
            return Err(SimError::EmptySchedule);
        }
        for (profile, dur) in &entries {
            if *dur == 0 {
                return Err(SimError::ZeroDuration { profile: *profile });
            }
        }
        Ok(Schedule { entries })
    }

    /// Every listed profile for `duration` ticks each.
    pub fn uniform(profiles: &[ProfileId], duration: u64) -> Result<Self, SimError> {
        Self::new(profiles.iter().map(|p| (*p, duration)).collect())
    }

    pub fn total_ticks(&self) -> u64 {
        self.entries.iter().map(|(_, d)| d).sum()
    }
}

/// Simulates one monitored patient: six risk-band chains stepped once
/// per tick, values drawn uniformly within the entered band.
///
/// Chains start in the Low band and restart there on every profile
/// switch; the switch takes effect on the next emitted record.
#[derive(Debug, Clone)]
pub struct PatientSim {
    models: Vec<ProfileModel>,
    schedule: Schedule,
    chains: [Dtmc; 6],
    profile: ProfileId,
    seg_idx: usize,
    seg_elapsed: u64,
    clock: u64,
    rng: ChaCha8Rng,
}

impl PatientSim {
    pub fn new(models: &[ProfileModel], schedule: Schedule, seed: u64) -> Result<Self, SimError> {
        for model in models {
            for sensor in SensorKind::ALL {
                let chain = model.chain(sensor);
                let check = || {
                    chain.validate()?;
                    for b in &chain.bands {
                        if !(b.lo < b.hi) {
                            return Err(DtmcError::DegenerateBand { lo: b.lo, hi: b.hi });
                        }
                    }
                    Ok(())
                };
                check().map_err(|cause| SimError::BadModel {
                    profile: model.profile,
                    sensor,
                    cause,
                })?;
            }
        }
        for (profile, _) in &schedule.entries {
            if !models.iter().any(|m| m.profile == *profile) {
                return Err(SimError::UnknownProfile { profile: *profile });
            }
        }
        let first = schedule.entries[0].0;
        let chains = Self::chains_for(models, first)?;
        Ok(PatientSim {
            models: models.to_vec(),
            schedule,
            chains,
            profile: first,
            seg_idx: 0,
            seg_elapsed: 0,
            clock: 0,
            rng: rng::seeded(seed, rng::domain::PATIENT),
        })
    }

    fn chains_for(models: &[ProfileModel], profile: ProfileId) -> Result<[Dtmc; 6], SimError> {
        let model = models
            .iter()
            .find(|m| m.profile == profile)
            .ok_or(SimError::UnknownProfile { profile })?;
        Ok(SensorKind::ALL.map(|s| {
            let mut chain = model.chain(s).clone();
            chain.current = chain
                .bands
                .iter()
                .position(|b| b.level == crate::model::RiskLevel::Low)
                .unwrap_or(0);
            chain
        }))
    }

    pub fn profile(&self) -> ProfileId {
        self.profile
    }

    /// Switches the active profile; chains restart in the Low band.
    /// The next record emitted carries the new profile.
    pub fn set_profile(&mut self, profile: ProfileId) -> Result<(), SimError> {
        self.chains = Self::chains_for(&self.models, profile)?;
        self.profile = profile;
        Ok(())
    }

    /// Emits the next data sample record, or `None` once the schedule
    /// is exhausted. Ticks are consecutive from 0 across the whole
    /// schedule.
    pub fn next_dsr(&mut self) -> Option<Dsr> {
        if self.seg_idx >= self.schedule.entries.len() {
            return None;
        }
        let mut readings = [ReadingValue::Deactivated; 6];
        for sensor in SensorKind::ALL {
            let chain = &mut self.chains[sensor.index()];
            let state = chain.step(&mut self.rng);
            let band = chain.bands[state];
            let value = rng::uniform_in(&mut self.rng, band.lo, band.hi);
            readings[sensor.index()] = ReadingValue::Present(value);
        }
        let dsr = Dsr { tick: self.clock, profile: self.profile, readings };
        self.clock += 1;
        self.seg_elapsed += 1;
        if self.seg_elapsed >= self.schedule.entries[self.seg_idx].1 {
            self.seg_idx += 1;
            self.seg_elapsed = 0;
            if self.seg_idx < self.schedule.entries.len() {
                let next = self.schedule.entries[self.seg_idx].0;
                self.set_profile(next).expect("profiles validated at construction");
            }
        }
        Some(dsr)
    }
}
