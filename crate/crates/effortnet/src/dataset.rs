//! Project data ingestion, validation, seeded train/test splits, and feature
//! encodings for the networks.
//!
//! The on-disk format is a UTF-8 CSV with a required header:
//!
//! ```text
//! id,mode,rely,data,cplx,time,stor,virt,turn,acap,aexp,pcap,vexp,lexp,modp,tool,sced,kdsi,actual
//! ```
//!
//! Multipliers are stored numerically (the form public project files use),
//! the mode as case-insensitive text. Splits draw `train_count` projects with
//! a seeded, fixed-algorithm shuffle and are serialized to a JSON manifest so
//! any run can be replayed; the test set is always the whole dataset.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cocomo::{effort_from_eaf, DevelopmentMode};

/// Identifier of the split shuffle recorded in every manifest: ChaCha8
/// keyed with the seed, partial Fisher-Yates over the id list in dataset
/// order, modulo-rejection sampling for bounds.
pub const SPLIT_GENERATOR_ID: &str = "chacha8-fisher-yates/1";

pub const CSV_HEADER: [&str; 19] = [
    "id", "mode", "rely", "data", "cplx", "time", "stor", "virt", "turn", "acap", "aexp", "pcap",
    "vexp", "lexp", "modp", "tool", "sced", "kdsi", "actual",
];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed CSV at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    HeaderMismatch { expected: String, found: String },
    #[error("invalid row at line {line} (project id {id}): {message}")]
    Validation { line: u64, id: u32, message: String },
    #[error("dataset contains no records")]
    EmptyDataset,
    #[error("train count {requested} out of range 1..={available}")]
    BadCount { requested: usize, available: usize },
    #[error("unknown project id {0} in split manifest")]
    UnknownId(u32),
}

/// One project: mode, the fifteen numeric multipliers in table row order,
/// size, and the observed effort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectRecord {
    pub id: u32,
    pub mode: DevelopmentMode,
    pub multipliers: [f64; 15],
    /// KDSI.
    pub size: f64,
    /// Man-months.
    pub actual_effort: f64,
}

impl ProjectRecord {
    /// Product of the fifteen multipliers.
    pub fn eaf(&self) -> f64 {
        self.multipliers.iter().product()
    }

    /// Intermediate COCOMO estimate for this record.
    pub fn cocomo_estimate(&self) -> f64 {
        // size was validated positive at construction
        effort_from_eaf(self.mode, self.size, self.eaf()).expect("validated record")
    }

    fn validate(&self, line: u64) -> Result<(), DatasetError> {
        let fail = |message: String| DatasetError::Validation { line, id: self.id, message };
        // NaN must fail these checks too
        if self.size <= 0.0 || self.size.is_nan() {
            return Err(fail(format!("kdsi must be positive, got {}", self.size)));
        }
        if self.actual_effort <= 0.0 || self.actual_effort.is_nan() {
            return Err(fail(format!("actual effort must be positive, got {}", self.actual_effort)));
        }
        for (i, m) in self.multipliers.iter().enumerate() {
            if *m <= 0.0 || *m >= 2.0 || m.is_nan() {
                return Err(fail(format!(
                    "multiplier {} = {m} outside (0, 2); row looks corrupt",
                    CSV_HEADER[2 + i]
                )));
            }
        }
        Ok(())
    }
}

/// An ordered, validated collection of project records.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<ProjectRecord>,
    pub provenance: String,
}

impl Dataset {
    /// Validate and wrap records: non-empty, unique ids, per-record checks.
    pub fn new(records: Vec<ProjectRecord>, provenance: impl Into<String>) -> Result<Self, DatasetError> {
        if records.is_empty() {
            return Err(DatasetError::EmptyDataset);
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, r) in records.iter().enumerate() {
            let line = i as u64 + 2; // header is line 1
            r.validate(line)?;
            if !seen.insert(r.id) {
                return Err(DatasetError::Validation {
                    line,
                    id: r.id,
                    message: "duplicate project id".into(),
                });
            }
        }
        Ok(Dataset { records, provenance: provenance.into() })
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let path = path.as_ref();
        let file = File::open(path)
            .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
        Self::from_reader(file, path.display().to_string())
    }

    pub fn from_reader(reader: impl Read, provenance: impl Into<String>) -> Result<Self, DatasetError> {
        let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = csv_reader
            .headers()
            .map_err(|e| DatasetError::Parse { line: 1, message: e.to_string() })?
            .clone();
        if headers.is_empty() || headers.iter().all(|h| h.trim().is_empty()) {
            return Err(DatasetError::EmptyDataset);
        }
        let found: Vec<&str> = headers.iter().map(str::trim).collect();
        if found != CSV_HEADER {
            return Err(DatasetError::HeaderMismatch {
                expected: CSV_HEADER.join(","),
                found: found.join(","),
            });
        }

        let mut records = Vec::new();
        for (i, row) in csv_reader.records().enumerate() {
            let line = i as u64 + 2;
            let row = row.map_err(|e| DatasetError::Parse { line, message: e.to_string() })?;
            if row.len() != CSV_HEADER.len() {
                return Err(DatasetError::Parse {
                    line,
                    message: format!("expected {} fields, found {}", CSV_HEADER.len(), row.len()),
                });
            }
            let parse_f64 = |idx: usize| -> Result<f64, DatasetError> {
                row[idx].trim().parse::<f64>().map_err(|_| DatasetError::Parse {
                    line,
                    message: format!("field `{}` is not a number: `{}`", CSV_HEADER[idx], &row[idx]),
                })
            };
            let id = row[0].trim().parse::<u32>().map_err(|_| DatasetError::Parse {
                line,
                message: format!("field `id` is not a positive integer: `{}`", &row[0]),
            })?;
            if id == 0 {
                return Err(DatasetError::Validation {
                    line,
                    id,
                    message: "project id must be positive".into(),
                });
            }
            let mode = DevelopmentMode::parse(row[1].trim())
                .map_err(|e| DatasetError::Parse { line, message: e.to_string() })?;
            let mut multipliers = [0.0; 15];
            for (k, m) in multipliers.iter_mut().enumerate() {
                *m = parse_f64(2 + k)?;
            }
            records.push(ProjectRecord {
                id,
                mode,
                multipliers,
                size: parse_f64(17)?,
                actual_effort: parse_f64(18)?,
            });
        }
        Dataset::new(records, provenance)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<(), DatasetError> {
        let path = path.as_ref();
        let file = File::create(path)
            .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
        self.write_csv(file)
            .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })
    }

    pub fn write_csv(&self, writer: impl Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_HEADER)?;
        for r in &self.records {
            let mut fields: Vec<String> = vec![r.id.to_string(), r.mode.name().to_string()];
            fields.extend(r.multipliers.iter().map(|m| m.to_string()));
            fields.push(r.size.to_string());
            fields.push(r.actual_effort.to_string());
            w.write_record(&fields)?;
        }
        w.flush()
    }

    /// The bundled 14-project smoke-test sample. Ids, modes, sizes and actual
    /// efforts are real; the driver multipliers are placeholders (all nominal
    /// except a varied SCED column) and carry no calibration meaning.
    pub fn sample() -> Dataset {
        let bytes: &[u8] = include_bytes!("../../../data/sample14.csv");
        Dataset::from_reader(bytes, "bundled sample14 (placeholder driver ratings)")
            .expect("bundled sample is valid")
    }

    pub fn records(&self) -> &[ProjectRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ids(&self) -> Vec<u32> {
        self.records.iter().map(|r| r.id).collect()
    }

    pub fn by_id(&self, id: u32) -> Option<&ProjectRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}

/// A replayable train/test partition. Training rows are a seeded draw; the
/// test set is the whole dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub generator: String,
    /// Sorted training project ids.
    pub train_ids: Vec<u32>,
    pub train_count: usize,
}

/// Draw `train_count` training projects with the seeded shuffle recorded in
/// [`SPLIT_GENERATOR_ID`].
pub fn split(dataset: &Dataset, train_count: usize, seed: u64) -> Result<SplitPlan, DatasetError> {
    if train_count < 1 || train_count > dataset.len() {
        return Err(DatasetError::BadCount { requested: train_count, available: dataset.len() });
    }
    let mut ids = dataset.ids();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..train_count {
        let j = i + bounded(&mut rng, (ids.len() - i) as u64) as usize;
        ids.swap(i, j);
    }
    let mut train_ids = ids[..train_count].to_vec();
    train_ids.sort_unstable();
    Ok(SplitPlan { seed, generator: SPLIT_GENERATOR_ID.to_string(), train_ids, train_count })
}

/// Uniform draw in `0..bound` by rejection, so the stream is well-defined
/// by the generator id alone.
fn bounded(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let threshold = u64::MAX - u64::MAX % bound;
    loop {
        let r = rng.next_u64();
        if r < threshold {
            return r % bound;
        }
    }
}

impl SplitPlan {
    pub fn is_train(&self, id: u32) -> bool {
        self.train_ids.binary_search(&id).is_ok()
    }

    /// The evaluation protocol tests on every record.
    pub fn test_ids(&self, dataset: &Dataset) -> Vec<u32> {
        dataset.ids()
    }

    pub fn train_records<'a>(&self, dataset: &'a Dataset) -> Result<Vec<&'a ProjectRecord>, DatasetError> {
        self.train_ids
            .iter()
            .map(|&id| dataset.by_id(id).ok_or(DatasetError::UnknownId(id)))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain struct serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DatasetError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json())
            .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
        serde_json::from_str(&text)
            .map_err(|e| DatasetError::Parse { line: 0, message: e.to_string() })
    }
}

/// How project records become network inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureEncoding {
    /// `[size, EAF]`: the same information Intermediate COCOMO consumes.
    #[default]
    SizeEaf,
    /// `[size, m1..m15]`: size plus every raw multiplier.
    SizeDrivers,
}

impl FeatureEncoding {
    pub fn feature_count(self) -> usize {
        match self {
            FeatureEncoding::SizeEaf => 2,
            FeatureEncoding::SizeDrivers => 16,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureEncoding::SizeEaf => "size-eaf",
            FeatureEncoding::SizeDrivers => "size-drivers",
        }
    }

    /// Raw (unscaled) feature vector for one record.
    pub fn features(self, record: &ProjectRecord) -> Vec<f64> {
        match self {
            FeatureEncoding::SizeEaf => vec![record.size, record.eaf()],
            FeatureEncoding::SizeDrivers => {
                let mut v = Vec::with_capacity(16);
                v.push(record.size);
                v.extend_from_slice(&record.multipliers);
                v
            }
        }
    }
}

impl std::fmt::Display for FeatureEncoding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FeatureEncoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "size-eaf" | "sizeeaf" => Ok(FeatureEncoding::SizeEaf),
            "size-drivers" | "sizedrivers" | "size-plus-drivers" => Ok(FeatureEncoding::SizeDrivers),
            other => Err(format!("unknown encoding `{other}` (expected size-eaf or size-drivers)")),
        }
    }
}

/// Per-feature min-max map fitted on training rows only. Test features use
/// the same affine map and may fall outside `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    mins: Vec<f64>,
    maxs: Vec<f64>,
    /// Indices of features that were constant on the training rows; those
    /// coordinates map to 0 by convention and the caller should warn.
    pub degenerate: Vec<usize>,
}

impl MinMaxScaler {
    pub fn fit(train_rows: &[Vec<f64>]) -> MinMaxScaler {
        assert!(!train_rows.is_empty(), "scaler needs at least one training row");
        let dim = train_rows[0].len();
        let mut mins = vec![f64::INFINITY; dim];
        let mut maxs = vec![f64::NEG_INFINITY; dim];
        for row in train_rows {
            for (i, v) in row.iter().enumerate() {
                mins[i] = mins[i].min(*v);
                maxs[i] = maxs[i].max(*v);
            }
        }
        let degenerate = (0..dim).filter(|&i| mins[i] == maxs[i]).collect();
        MinMaxScaler { mins, maxs, degenerate }
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(i, v)| {
                if self.mins[i] == self.maxs[i] {
                    0.0
                } else {
                    (v - self.mins[i]) / (self.maxs[i] - self.mins[i])
                }
            })
            .collect()
    }
}

/// Feature matrix for a record slice, optionally scaled.
pub fn feature_matrix(
    records: &[&ProjectRecord],
    encoding: FeatureEncoding,
    scaler: Option<&MinMaxScaler>,
) -> Vec<Vec<f64>> {
    records
        .iter()
        .map(|r| {
            let raw = encoding.features(r);
            match scaler {
                Some(s) => s.transform(&raw),
                None => raw,
            }
        })
        .collect()
}
