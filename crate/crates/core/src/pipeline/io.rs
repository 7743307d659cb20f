use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{PipelineError, Stage};

/// Shortest representation that parses back to the same value.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn parse_f64(stage: Stage, path: &Path, field: &str) -> Result<f64, PipelineError> {
    match field {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        _ => field.parse().map_err(|_| PipelineError::malformed(stage, path, format!("bad number `{field}`"))),
    }
}

/// Collects one stage's outputs under `<name>.partial` and renames them
/// into place only when the whole stage succeeded.
pub struct StageOutput {
    stage: Stage,
    dir: PathBuf,
    files: Vec<String>,
}

impl StageOutput {
    pub fn new(stage: Stage, dir: &Path) -> Result<Self, PipelineError> {
        fs::create_dir_all(dir).map_err(|source| PipelineError::Io { stage, path: dir.to_path_buf(), source })?;
        Ok(StageOutput { stage, dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn partial(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{name}.partial"))
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), PipelineError> {
        let path = self.partial(name);
        fs::write(&path, bytes).map_err(|source| PipelineError::Io { stage: self.stage, path, source })?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), PipelineError> {
        let mut text = serde_json::to_string_pretty(value).expect("outputs serialize");
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), PipelineError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let csv_err = |e: csv::Error| PipelineError::Io { stage: self.stage, path: self.partial(name), source: e.into() };
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| PipelineError::Io {
            stage: self.stage,
            path: self.partial(name),
            source: e.into_error(),
        })?;
        self.write_bytes(name, &bytes)
    }

    /// Moves every partial file into place and returns the output names.
    pub fn commit(self) -> Result<Vec<String>, PipelineError> {
        for name in &self.files {
            let target = self.dir.join(name);
            fs::rename(self.partial(name), &target)
                .map_err(|source| PipelineError::Io { stage: self.stage, path: target, source })?;
        }
        Ok(self.files)
    }
}

/// Path of an upstream output, or `MissingUpstream` naming the producer.
pub fn upstream(stage: Stage, producer: Stage, dir: &Path, name: &str) -> Result<PathBuf, PipelineError> {
    let path = dir.join(name);
    if path.is_file() {
        Ok(path)
    } else {
        Err(PipelineError::MissingUpstream { stage, upstream: producer, path })
    }
}

pub fn read_json<T: DeserializeOwned>(stage: Stage, path: &Path) -> Result<T, PipelineError> {
    let text = fs::read_to_string(path).map_err(|source| PipelineError::Io { stage, path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| PipelineError::malformed(stage, path, e.to_string()))
}

/// Header and records of a CSV file.
pub fn read_csv(stage: Stage, path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), PipelineError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| PipelineError::malformed(stage, path, e.to_string()))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| PipelineError::malformed(stage, path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| PipelineError::malformed(stage, path, e.to_string()))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

/// Reads a CSV whose header must start with `expected`.
pub fn read_csv_expect(
    stage: Stage,
    path: &Path,
    expected: &[&str],
) -> Result<(Vec<String>, Vec<Vec<String>>), PipelineError> {
    let (header, rows) = read_csv(stage, path)?;
    if header.len() < expected.len() || header.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(PipelineError::malformed(stage, path, format!("expected header starting with {}", expected.join(","))));
    }
    Ok((header, rows))
}
