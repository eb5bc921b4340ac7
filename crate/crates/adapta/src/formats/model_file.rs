//! Derived patient models as structured text.
//!
//! One token line each, in order: `format 1`, `profiles N`, then per
//! profile a `profile <id>` line followed by six sensor blocks in
//! canonical sensor order. A sensor block is `sensor <name>`,
//! `bands <B>`, B ascending `band <lo> <hi> <level>` lines,
//! `matrix <B>`, and B rows of B transition probabilities. The band
//! lists double as the risk-range table for that profile, so a file
//! can override the built-in defaults.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use adapta_core::dtmc::Dtmc;
use adapta_core::ingest::ProfileModel;
use adapta_core::model::{Band, ProfileId, RiskLevel, RiskRangeTable, SensorKind};
use thiserror::Error;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub fn write_model_file(path: &Path, models: &[ProfileModel]) -> Result<(), ModelFileError> {
    let mut out = String::new();
    let _ = writeln!(out, "format {MODEL_FORMAT_VERSION}");
    let _ = writeln!(out, "profiles {}", models.len());
    for model in models {
        let _ = writeln!(out, "profile {}", model.profile);
        for sensor in SensorKind::ALL {
            let chain = model.chain(sensor);
            let _ = writeln!(out, "sensor {}", sensor.label());
            let _ = writeln!(out, "bands {}", chain.bands.len());
            for b in &chain.bands {
                let _ = writeln!(out, "band {} {} {}", b.lo, b.hi, b.level.label());
            }
            let n = chain.bands.len();
            let _ = writeln!(out, "matrix {n}");
            for row in chain.rows.chunks(n) {
                let mut line = String::new();
                for (j, p) in row.iter().enumerate() {
                    if j > 0 {
                        line.push(' ');
                    }
                    // 17 significant digits: re-reading restores the bit pattern.
                    let _ = write!(line, "{p:.16e}");
                }
                let _ = writeln!(out, "{line}");
            }
        }
    }
    fs::write(path, out).map_err(|source| ModelFileError::Io { path: path.to_path_buf(), source })
}

struct Cursor<'a> {
    lines: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self) -> Result<&'a str, ModelFileError> {
        for line in self.lines.by_ref() {
            self.line_no += 1;
            if !line.trim().is_empty() {
                return Ok(line.trim());
            }
        }
        self.line_no += 1;
        Err(self.err("unexpected end of file"))
    }

    fn err(&self, msg: impl Into<String>) -> ModelFileError {
        ModelFileError::Parse { line: self.line_no, msg: msg.into() }
    }

    /// Reads a `<keyword> <rest>` line and returns the rest.
    fn keyword(&mut self, keyword: &str) -> Result<&'a str, ModelFileError> {
        let line = self.next()?;
        line.strip_prefix(keyword)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected {keyword:?} line, got {line:?}")))
    }

    fn count(&mut self, keyword: &str) -> Result<usize, ModelFileError> {
        let rest = self.keyword(keyword)?;
        rest.parse().map_err(|_| self.err(format!("bad {keyword} count {rest:?}")))
    }
}

pub fn read_model_file(path: &Path) -> Result<Vec<ProfileModel>, ModelFileError> {
    let text = fs::read_to_string(path)
        .map_err(|source| ModelFileError::Io { path: path.to_path_buf(), source })?;
    let mut cur = Cursor { lines: text.lines(), line_no: 0 };

    let version = cur.keyword("format")?;
    if version != MODEL_FORMAT_VERSION.to_string() {
        return Err(cur.err(format!("unsupported format version {version:?}")));
    }
    let n_profiles = cur.count("profiles")?;

    let mut models = Vec::with_capacity(n_profiles);
    for _ in 0..n_profiles {
        let id = cur.keyword("profile")?;
        let profile = ProfileId::parse(id)
            .ok_or_else(|| cur.err(format!("unknown profile {id:?}")))?;

        let mut band_lists: [Vec<Band>; 6] = Default::default();
        let mut chains: Vec<Dtmc> = Vec::with_capacity(6);
        for sensor in SensorKind::ALL {
            let name = cur.keyword("sensor")?;
            if SensorKind::parse(name) != Some(sensor) {
                return Err(cur.err(format!(
                    "expected sensor {}, got {name:?}",
                    sensor.label()
                )));
            }
            let n_bands = cur.count("bands")?;
            let mut bands = Vec::with_capacity(n_bands);
            for _ in 0..n_bands {
                let rest = cur.keyword("band")?;
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [lo, hi, level] = parts[..] else {
                    return Err(cur.err(format!("bad band line {rest:?}")));
                };
                let lo: f64 = lo.parse().map_err(|_| cur.err("bad band lo"))?;
                let hi: f64 = hi.parse().map_err(|_| cur.err("bad band hi"))?;
                let level = RiskLevel::parse(level)
                    .ok_or_else(|| cur.err(format!("unknown risk level {level:?}")))?;
                bands.push(Band { lo, hi, level });
            }
            let dim = cur.count("matrix")?;
            if dim != n_bands {
                return Err(cur.err(format!("matrix dim {dim} does not match {n_bands} bands")));
            }
            let mut rows = Vec::with_capacity(dim * dim);
            for _ in 0..dim {
                let line = cur.next()?;
                let row: Result<Vec<f64>, _> =
                    line.split_whitespace().map(str::parse::<f64>).collect();
                let row = row.map_err(|_| cur.err(format!("bad matrix row {line:?}")))?;
                if row.len() != dim {
                    return Err(cur.err(format!("matrix row has {} entries, want {dim}", row.len())));
                }
                rows.extend(row);
            }
            let low = bands
                .iter()
                .position(|b| b.level == RiskLevel::Low)
                .unwrap_or(0);
            band_lists[sensor.index()] = bands.clone();
            chains.push(
                Dtmc::new(bands, rows, low)
                    .map_err(|e| cur.err(format!("sensor {}: {e}", sensor.label())))?,
            );
        }
        let ranges = RiskRangeTable::new(band_lists)
            .map_err(|e| cur.err(format!("profile {profile}: {e}")))?;
        let chains: [Dtmc; 6] = chains.try_into().expect("six sensors");
        models.push(ProfileModel { profile, chains, ranges });
    }
    Ok(models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use adapta_core::ingest::build_profile_models;
    use adapta_core::synth::generate_synthetic_dataset;

    fn sample_models() -> Vec<ProfileModel> {
        let data = generate_synthetic_dataset(5, 13, 90).unwrap();
        build_profile_models(&data, &RiskRangeTable::default_table()).unwrap().0
    }

    #[test]
    fn round_trips_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.txt");
        let models = sample_models();
        write_model_file(&path, &models).unwrap();
        let back = read_model_file(&path).unwrap();
        assert_eq!(back, models);
    }

    #[test]
    fn rejects_unknown_version() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.txt");
        fs::write(&path, "format 2\nprofiles 0\n").unwrap();
        let err = read_model_file(&path).unwrap_err();
        assert!(err.to_string().contains("version"), "{err}");
    }

    #[test]
    fn truncation_is_a_parse_error_with_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.txt");
        let models = sample_models();
        write_model_file(&path, &models).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let cut: String = text.lines().take(20).collect::<Vec<_>>().join("\n");
        fs::write(&path, cut).unwrap();
        let err = read_model_file(&path).unwrap_err();
        assert!(matches!(err, ModelFileError::Parse { line, .. } if line == 21), "{err}");
    }

    #[test]
    fn non_stochastic_matrix_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.txt");
        let models = sample_models();
        write_model_file(&path, &models).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        // Swap the first matrix row for one that sums to 1.5.
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let idx = lines.iter().position(|l| l.starts_with("matrix")).unwrap();
        let dim: usize = lines[idx].split_whitespace().nth(1).unwrap().parse().unwrap();
        lines[idx + 1] = std::iter::repeat_n(format!("{:.16e}", 1.5 / dim as f64), dim)
            .collect::<Vec<_>>()
            .join(" ");
        fs::write(&path, lines.join("\n")).unwrap();
        let err = read_model_file(&path).unwrap_err();
        assert!(matches!(err, ModelFileError::Parse { .. }), "{err}");
    }
}
