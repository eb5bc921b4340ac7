//! IO companion to `adapta-core`: file formats for field data, derived
//! patient models, run logs and reports, plus the commands behind the
//! `adapta` binary.

pub mod commands;
pub mod formats;
