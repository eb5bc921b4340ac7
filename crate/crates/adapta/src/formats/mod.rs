//! On-disk formats. All four are line-oriented text, written and read
//! by hand so byte-identical reruns are easy to guarantee.

pub mod field_data;
pub mod model_file;
pub mod report;
pub mod runlog;
