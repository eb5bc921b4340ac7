//! Core logic for AdapTA: patient vital-sign models, a reference body
//! sensor network, test oracles, the run harness and result statistics.
//!
//! Everything here is pure computation over `alloc` types; IO, file
//! formats and the command-line interface live in the `adapta` crate.

#![no_std]

extern crate alloc;

pub mod dtmc;
pub mod harness;
pub mod ingest;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod stats;
pub mod sut;
pub mod synth;

pub use dtmc::{Dtmc, PatientSim, Schedule};
pub use harness::{
    run, ChangeEventKind, LogEntry, RunConfig, RunError, RunHeader, RunLog, RunMode, Scenario,
    TestStrategy,
};
pub use ingest::{build_profile_models, derive_counts, normalize, FieldDataset, ProfileModel};
pub use model::{
    classify_risk, compute_bmi, categorize, AgeGroup, Band, BmiClass, Dsr, IcuType, OutcomeLevel,
    PatientRecord, ProfileId, ReadingValue, RiskLevel, RiskRangeTable, SensorKind,
};
pub use oracle::{compare, expected_default, expected_weighted, weights_for, RiskVector, Verdict, WeightVector};
pub use stats::{
    a12, compare_groups, mann_whitney_u, p_exact, p_normal, ptcr, summarize, GroupComparison,
    StatReport,
};
pub use sut::{BsnOutcome, FaultConfig, StatusEvent, Sut, SutConfig};
pub use synth::generate_synthetic_dataset;
