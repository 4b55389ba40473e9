//! End-to-end comparison runner: load a dataset, draw the seeded training
//! split, build the selected estimators, score them with the metrics suite,
//! and hand the results to [`crate::report`] for emission.
//!
//! The default configuration is the reference protocol: 53 training projects
//! drawn from the 63, every model tested on all rows, spread 0.94, `[size,
//! EAF]` features, no scaling.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cocomo::CocomoError;
use crate::dataset::{
    feature_matrix, split, Dataset, DatasetError, FeatureEncoding, MinMaxScaler, SplitPlan,
};
use crate::grnn::{self, GrnnError, SavedGrnn};
use crate::metrics::{evaluate, EvaluationReport, MetricsError};
use crate::radial::{RadialError, Spread};
use crate::rbnn::{self, RbnnError, SavedRbnn, SolveStrategy};

/// Prediction-accuracy levels reported as Pred(n).
pub const PRED_LEVELS: [u32; 1] = [40];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("dataset: {0}")]
    Dataset(#[from] DatasetError),
    #[error("cocomo: {0}")]
    Cocomo(#[from] CocomoError),
    #[error("radial layer: {0}")]
    Radial(#[from] RadialError),
    #[error("rbnn fit/predict: {0}")]
    Rbnn(#[from] RbnnError),
    #[error("grnn fit/predict: {0}")]
    Grnn(#[from] GrnnError),
    #[error("metrics: {0}")]
    Metrics(#[from] MetricsError),
    #[error("writing {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl ExperimentError {
    /// Process exit code contract: 1 validation, 2 IO, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 1,
            ExperimentError::Dataset(DatasetError::Io { .. }) => 2,
            ExperimentError::Dataset(_) => 1,
            ExperimentError::Cocomo(_) => 1,
            ExperimentError::Radial(_) | ExperimentError::Rbnn(_) | ExperimentError::Grnn(_) => 3,
            ExperimentError::Metrics(_) => 3,
            ExperimentError::Io { .. } => 2,
        }
    }
}

/// Which estimators to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Cocomo,
    Rbnn,
    Grnn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Cocomo, ModelKind::Rbnn, ModelKind::Grnn];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Cocomo => "cocomo",
            ModelKind::Rbnn => "rbnn",
            ModelKind::Grnn => "grnn",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cocomo" => Ok(ModelKind::Cocomo),
            "rbnn" => Ok(ModelKind::Rbnn),
            "grnn" => Ok(ModelKind::Grnn),
            other => Err(format!("unknown model `{other}` (expected cocomo, rbnn or grnn)")),
        }
    }
}

/// Report output formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown report format `{other}` (expected csv or markdown)")),
        }
    }
}

/// Everything one experiment run needs. [`ExperimentConfig::new`] fills in
/// the reference defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub data_path: PathBuf,
    pub train_count: usize,
    pub seed: u64,
    pub spread: f64,
    pub encoding: FeatureEncoding,
    pub scale: bool,
    pub models: Vec<ModelKind>,
    pub output_dir: PathBuf,
    pub formats: Vec<ReportFormat>,
    pub solver: SolveStrategy,
}

impl ExperimentConfig {
    pub fn new(data_path: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            data_path: data_path.into(),
            train_count: 53,
            seed: 0,
            spread: 0.94,
            encoding: FeatureEncoding::SizeEaf,
            scale: false,
            models: ModelKind::ALL.to_vec(),
            output_dir: output_dir.into(),
            formats: vec![ReportFormat::Csv, ReportFormat::Markdown],
            solver: SolveStrategy::default(),
        }
    }

    fn validate(&self) -> Result<Spread, ExperimentError> {
        if self.models.is_empty() {
            return Err(ExperimentError::Config("select at least one model".into()));
        }
        Spread::new(self.spread)
            .map_err(|_| ExperimentError::Config(format!("spread must be positive, got {}", self.spread)))
    }

    /// Selected models in canonical table order, deduplicated.
    pub fn selected_models(&self) -> Vec<ModelKind> {
        let mut out = Vec::new();
        for m in ModelKind::ALL {
            if self.models.contains(&m) && !out.contains(&m) {
                out.push(m);
            }
        }
        out
    }
}

/// One model's estimates over the whole dataset plus its evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRun {
    pub model: ModelKind,
    /// Aligned with the dataset record order.
    pub estimates: Vec<f64>,
    pub report: EvaluationReport,
    /// Estimates at or below zero (kept everywhere except BRE).
    pub non_positive_predictions: usize,
    pub warnings: Vec<String>,
}

/// The complete, emission-ready result of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArtifacts {
    pub config: ExperimentConfig,
    /// `(id, actual effort)` in dataset order.
    pub projects: Vec<(u32, f64)>,
    pub split: Option<SplitPlan>,
    pub runs: Vec<ModelRun>,
    pub warnings: Vec<String>,
    pub rbnn_model: Option<SavedRbnn>,
    pub grnn_model: Option<SavedGrnn>,
}

impl RunArtifacts {
    pub fn run_for(&self, model: ModelKind) -> Option<&ModelRun> {
        self.runs.iter().find(|r| r.model == model)
    }
}

/// Execute one experiment in memory (no files are written; see
/// [`crate::report::emit`]).
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunArtifacts, ExperimentError> {
    let spread = config.validate()?;
    let dataset = Dataset::load_csv(&config.data_path)?;
    run_on_dataset(config, &dataset, spread)
}

/// Same as [`run_experiment`] but on an already-loaded dataset; useful for
/// seed sweeps.
pub fn run_on_dataset(
    config: &ExperimentConfig,
    dataset: &Dataset,
    spread: Spread,
) -> Result<RunArtifacts, ExperimentError> {
    let models = config.selected_models();
    let needs_network = models.iter().any(|m| matches!(m, ModelKind::Rbnn | ModelKind::Grnn));

    let mut warnings = Vec::new();
    let mut split_plan = None;
    let mut train_features: Vec<Vec<f64>> = Vec::new();
    let mut train_targets: Vec<f64> = Vec::new();
    let mut all_features: Vec<Vec<f64>> = Vec::new();
    let mut scaler: Option<MinMaxScaler> = None;

    if needs_network {
        let plan = split(dataset, config.train_count, config.seed)?;
        let train_records = plan.train_records(dataset)?;
        let raw_train = feature_matrix(&train_records, config.encoding, None);
        if config.scale {
            let fitted = MinMaxScaler::fit(&raw_train);
            for &i in &fitted.degenerate {
                warnings.push(format!(
                    "scaling: feature {i} is constant on the training rows; that coordinate maps to 0"
                ));
            }
            scaler = Some(fitted);
        }
        let all_records: Vec<&crate::dataset::ProjectRecord> = dataset.records().iter().collect();
        all_features = feature_matrix(&all_records, config.encoding, scaler.as_ref());
        train_features = feature_matrix(&train_records, config.encoding, scaler.as_ref());
        train_targets = train_records.iter().map(|r| r.actual_effort).collect();
        split_plan = Some(plan);
    }

    let mut runs = Vec::new();
    let mut rbnn_model = None;
    let mut grnn_model = None;

    for model in models {
        let estimates: Vec<f64> = match model {
            ModelKind::Cocomo => dataset.records().iter().map(|r| r.cocomo_estimate()).collect(),
            ModelKind::Rbnn => {
                let fitted = rbnn::fit_with(&train_features, &train_targets, spread, config.solver)?;
                let mut model_warnings = Vec::new();
                if let Some(d) = fitted.diagnostics() {
                    if d.ill_conditioned {
                        model_warnings.push(format!(
                            "rbnn: condition estimate {:.3e} exceeds {:.0e}{}",
                            d.condition_estimate,
                            rbnn::CONDITION_WARN_THRESHOLD,
                            if d.ridge_applied { "; ridge applied" } else { "" }
                        ));
                    }
                }
                let estimates = all_features
                    .iter()
                    .map(|f| fitted.predict(f))
                    .collect::<Result<Vec<f64>, RbnnError>>()?;
                let mut saved = SavedRbnn::from_model(&fitted);
                saved.feature_encoding = Some(config.encoding);
                saved.scaler = scaler.clone();
                rbnn_model = Some(saved);
                warnings.extend(model_warnings.clone());
                push_run(&mut runs, model, estimates, dataset, model_warnings)?;
                continue;
            }
            ModelKind::Grnn => {
                let fitted = grnn::fit(&train_features, &train_targets, spread)?;
                let estimates = all_features
                    .iter()
                    .map(|f| fitted.predict(f))
                    .collect::<Result<Vec<f64>, GrnnError>>()?;
                let mut saved = SavedGrnn::from_model(&fitted);
                saved.feature_encoding = Some(config.encoding);
                saved.scaler = scaler.clone();
                grnn_model = Some(saved);
                push_run(&mut runs, model, estimates, dataset, Vec::new())?;
                continue;
            }
        };
        push_run(&mut runs, model, estimates, dataset, Vec::new())?;
    }

    Ok(RunArtifacts {
        config: config.clone(),
        projects: dataset.records().iter().map(|r| (r.id, r.actual_effort)).collect(),
        split: split_plan,
        runs,
        warnings,
        rbnn_model,
        grnn_model,
    })
}

fn push_run(
    runs: &mut Vec<ModelRun>,
    model: ModelKind,
    estimates: Vec<f64>,
    dataset: &Dataset,
    warnings: Vec<String>,
) -> Result<(), ExperimentError> {
    let rows: Vec<(u32, f64, f64)> = dataset
        .records()
        .iter()
        .zip(&estimates)
        .map(|(r, &e)| (r.id, r.actual_effort, e))
        .collect();
    let report = evaluate(&rows, &PRED_LEVELS)?;
    let non_positive_predictions = estimates.iter().filter(|e| **e <= 0.0).count();
    runs.push(ModelRun { model, estimates, report, non_positive_predictions, warnings });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_config() -> (tempfile::TempDir, ExperimentConfig) {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("sample.csv");
        Dataset::sample().save_csv(&data).unwrap();
        let mut config = ExperimentConfig::new(data, dir.path().join("out"));
        config.train_count = 10;
        config.seed = 5;
        (dir, config)
    }

    #[test]
    fn default_run_produces_three_model_rows() {
        let (_dir, config) = sample_config();
        let artifacts = run_experiment(&config).unwrap();
        assert_eq!(artifacts.runs.len(), 3);
        assert_eq!(artifacts.projects.len(), 14);
        for run in &artifacts.runs {
            assert_eq!(run.estimates.len(), 14);
            assert!(run.report.pred.contains_key(&40));
        }
        assert!(artifacts.split.is_some());
        assert!(artifacts.rbnn_model.is_some());
        assert!(artifacts.grnn_model.is_some());
    }

    #[test]
    fn cocomo_only_needs_no_split() {
        let (_dir, mut config) = sample_config();
        config.models = vec![ModelKind::Cocomo];
        let artifacts = run_experiment(&config).unwrap();
        assert!(artifacts.split.is_none());
        assert_eq!(artifacts.runs.len(), 1);
        assert!(artifacts.rbnn_model.is_none());
    }

    #[test]
    fn rbnn_reproduces_training_rows_at_system_level() {
        let (_dir, config) = sample_config();
        let artifacts = run_experiment(&config).unwrap();
        let plan = artifacts.split.as_ref().unwrap();
        let run = artifacts.run_for(ModelKind::Rbnn).unwrap();
        for ((id, actual), estimate) in artifacts.projects.iter().zip(&run.estimates) {
            if plan.is_train(*id) {
                let rel = (estimate - actual).abs() / actual.abs().max(1.0);
                assert!(rel < 1e-6, "project {id}: relative error {rel}");
            }
        }
    }

    #[test]
    fn changing_the_seed_never_touches_the_cocomo_column() {
        let (_dir, mut config) = sample_config();
        let a = run_experiment(&config).unwrap();
        config.seed = 99;
        let b = run_experiment(&config).unwrap();
        assert_eq!(
            a.run_for(ModelKind::Cocomo).unwrap().estimates,
            b.run_for(ModelKind::Cocomo).unwrap().estimates
        );
        assert_ne!(a.split, b.split);
    }

    #[test]
    fn run_is_deterministic_for_a_fixed_seed() {
        let (_dir, config) = sample_config();
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_model_selection_is_a_config_error() {
        let (_dir, mut config) = sample_config();
        config.models.clear();
        let err = run_experiment(&config).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn bad_spread_is_a_config_error() {
        let (_dir, mut config) = sample_config();
        config.spread = -1.0;
        assert_eq!(run_experiment(&config).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn missing_data_file_maps_to_io_exit_code() {
        let (_dir, mut config) = sample_config();
        config.data_path = PathBuf::from("/nonexistent/data.csv");
        assert_eq!(run_experiment(&config).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn bad_train_count_is_a_validation_error() {
        let (_dir, mut config) = sample_config();
        config.train_count = 400;
        assert_eq!(run_experiment(&config).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn solver_failures_map_to_the_numerical_exit_code() {
        let err = ExperimentError::Rbnn(crate::rbnn::RbnnError::SingularSystem);
        assert_eq!(err.exit_code(), 3);
        let err = ExperimentError::Grnn(crate::grnn::GrnnError::EmptyTrainingSet);
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn model_order_is_canonical_regardless_of_selection_order() {
        let (_dir, mut config) = sample_config();
        config.models = vec![ModelKind::Grnn, ModelKind::Cocomo, ModelKind::Grnn];
        let artifacts = run_experiment(&config).unwrap();
        let order: Vec<ModelKind> = artifacts.runs.iter().map(|r| r.model).collect();
        assert_eq!(order, vec![ModelKind::Cocomo, ModelKind::Grnn]);
    }
}
