//! Accuracy criteria for effort estimates: MARE, VARE, mean BRE, MMRE and
//! Pred(n), all over paired (actual, estimated) effort lists.
//!
//! Conventions:
//!
//! - The relative error of a pair is `|actual - estimated| / actual`, so
//!   actuals must be positive.
//! - Per-project frequencies are 1, which makes MARE and MMRE numerically
//!   identical; both are still reported since comparison tables list them
//!   as separate columns.
//! - VARE is the variance of the relative errors (squared deviations from
//!   their mean), as a percentage.
//! - BRE divides by `min(actual, estimated)` and is therefore undefined for
//!   non-positive estimates; such pairs are excluded from the mean with a
//!   count, while every other metric keeps them.
//! - Pred(n) counts relative errors strictly below n percent.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("metric requires at least one pair")]
    EmptyInput,
    #[error("actual effort must be positive, got {0}")]
    NonPositiveActual(f64),
    #[error("BRE is undefined for non-positive estimate {0}")]
    NonPositiveEstimate(f64),
    #[error("prediction level must be positive, got {0}")]
    NonPositiveLevel(f64),
}

/// One (actual, estimated) effort pair, in man-months.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationPair {
    /// Observed effort; must be positive.
    pub actual: f64,
    /// Model output; any real (networks can extrapolate below zero).
    pub estimated: f64,
}

impl EvaluationPair {
    pub fn new(actual: f64, estimated: f64) -> Self {
        EvaluationPair { actual, estimated }
    }
}

/// Absolute relative error `|actual - estimated| / actual`.
pub fn relative_error(pair: EvaluationPair) -> Result<f64, MetricsError> {
    if pair.actual <= 0.0 || pair.actual.is_nan() {
        return Err(MetricsError::NonPositiveActual(pair.actual));
    }
    Ok((pair.actual - pair.estimated).abs() / pair.actual)
}

fn relative_errors(pairs: &[EvaluationPair]) -> Result<Vec<f64>, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    pairs.iter().map(|&p| relative_error(p)).collect()
}

/// Mean absolute relative error, as a percentage.
pub fn mare(pairs: &[EvaluationPair]) -> Result<f64, MetricsError> {
    let res = relative_errors(pairs)?;
    Ok(res.iter().sum::<f64>() / res.len() as f64 * 100.0)
}

/// Mean magnitude of relative error, as a percentage. With unit frequencies
/// this coincides with [`mare`]; kept separate to mirror comparison tables.
pub fn mmre(pairs: &[EvaluationPair]) -> Result<f64, MetricsError> {
    mare(pairs)
}

/// Variance of the absolute relative errors, as a percentage.
pub fn vare(pairs: &[EvaluationPair]) -> Result<f64, MetricsError> {
    let res = relative_errors(pairs)?;
    let mean = res.iter().sum::<f64>() / res.len() as f64;
    Ok(res.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / res.len() as f64 * 100.0)
}

/// Balanced relative error `|estimated - actual| / min(estimated, actual)`.
pub fn bre(pair: EvaluationPair) -> Result<f64, MetricsError> {
    if pair.actual <= 0.0 || pair.actual.is_nan() {
        return Err(MetricsError::NonPositiveActual(pair.actual));
    }
    if pair.estimated <= 0.0 || pair.estimated.is_nan() {
        return Err(MetricsError::NonPositiveEstimate(pair.estimated));
    }
    Ok((pair.estimated - pair.actual).abs() / pair.estimated.min(pair.actual))
}

/// Mean BRE over the pairs where BRE is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanBre {
    pub value: f64,
    /// Pairs excluded because their estimate was not positive.
    pub excluded: usize,
}

pub fn mean_bre(pairs: &[EvaluationPair]) -> Result<MeanBre, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut sum = 0.0;
    let mut kept = 0usize;
    let mut excluded = 0usize;
    for &pair in pairs {
        match bre(pair) {
            Ok(v) => {
                sum += v;
                kept += 1;
            }
            Err(MetricsError::NonPositiveEstimate(_)) => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    if kept == 0 {
        return Err(MetricsError::EmptyInput);
    }
    Ok(MeanBre { value: sum / kept as f64, excluded })
}

/// Percentage of pairs with relative error strictly below `n` percent.
pub fn pred(pairs: &[EvaluationPair], n: f64) -> Result<f64, MetricsError> {
    if n <= 0.0 || n.is_nan() {
        return Err(MetricsError::NonPositiveLevel(n));
    }
    let res = relative_errors(pairs)?;
    let below = res.iter().filter(|&&r| r < n / 100.0).count();
    Ok(below as f64 / res.len() as f64 * 100.0)
}

/// Per-project evaluation row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectEvaluation {
    pub id: u32,
    pub actual: f64,
    pub estimated: f64,
    pub relative_error: f64,
    /// `None` when the estimate was not positive.
    pub bre: Option<f64>,
}

/// The five criteria over one model's estimates, plus per-project detail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub mare_pct: f64,
    pub vare_pct: f64,
    pub mean_bre: f64,
    pub mmre_pct: f64,
    /// Pred(n) percentage per requested level n.
    pub pred: BTreeMap<u32, f64>,
    pub per_project: Vec<ProjectEvaluation>,
    /// Pairs excluded from mean BRE because their estimate was not positive.
    pub bre_excluded: usize,
}

/// Evaluate one model: `rows` are `(project id, actual, estimated)`.
pub fn evaluate(
    rows: &[(u32, f64, f64)],
    pred_levels: &[u32],
) -> Result<EvaluationReport, MetricsError> {
    let pairs: Vec<EvaluationPair> =
        rows.iter().map(|&(_, a, e)| EvaluationPair::new(a, e)).collect();
    let mean_bre_result = mean_bre(&pairs)?;
    let mut pred_map = BTreeMap::new();
    for &level in pred_levels {
        pred_map.insert(level, pred(&pairs, level as f64)?);
    }
    let per_project = rows
        .iter()
        .map(|&(id, actual, estimated)| {
            Ok(ProjectEvaluation {
                id,
                actual,
                estimated,
                relative_error: relative_error(EvaluationPair::new(actual, estimated))?,
                bre: bre(EvaluationPair::new(actual, estimated)).ok(),
            })
        })
        .collect::<Result<Vec<_>, MetricsError>>()?;
    Ok(EvaluationReport {
        mare_pct: mare(&pairs)?,
        vare_pct: vare(&pairs)?,
        mean_bre: mean_bre_result.value,
        mmre_pct: mmre(&pairs)?,
        pred: pred_map,
        per_project,
        bre_excluded: mean_bre_result.excluded,
    })
}
