//! Exact-design radial basis network.
//!
//! The hidden layer keeps one neuron per training vector (centers = training
//! inputs). The linear second layer (a weight row `lw2` and a scalar bias
//! `b2`) is found by solving
//!
//! ```text
//! [lw2 b2] * [A1; ones] = T
//! ```
//!
//! where column `j` of `A1` is the hidden-layer output at training input `j`
//! and `T` are the training targets. That system has Q equations and Q+1
//! unknowns, so among the least-squares solutions a convention must pick one;
//! see [`SolveStrategy`]. Either way the fitted network reproduces every
//! training target (up to solver round-off): the network is designed, not
//! iteratively trained.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{FeatureEncoding, MinMaxScaler};
use crate::linalg::{solve_min_norm, DenseMatrix, PivotedQr};
use crate::radial::{RadialError, RadialLayer, Spread};

/// Condition-estimate level above which a fit is flagged (and, for the
/// minimum-norm route, stabilized with a small ridge).
pub const CONDITION_WARN_THRESHOLD: f64 = 1e12;

/// Ridge added to the normal equations when the system is flagged
/// ill-conditioned (minimum-norm route only).
pub const RIDGE_LAMBDA: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RbnnError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("{inputs} training inputs but {targets} targets")]
    TargetCountMismatch { inputs: usize, targets: usize },
    #[error("training inputs {first} and {second} are identical but their targets differ ({t_first} vs {t_second}); an exact fit is impossible")]
    DuplicateInputs { first: usize, second: usize, t_first: f64, t_second: f64 },
    #[error("second-layer system is singular and could not be solved")]
    SingularSystem,
    #[error(transparent)]
    Radial(#[from] RadialError),
}

/// Which least-squares solution of the underdetermined second-layer system
/// to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStrategy {
    /// Basic solution from rank-revealing (column-pivoted) QR: at most
    /// `rank` nonzero coefficients, the semantics of matrix right-division
    /// in numerical environments. This is the default.
    #[default]
    BasicQr,
    /// Minimum-norm solution over `[lw2, b2]` via the normal equations of
    /// the underdetermined system.
    MinNorm,
}

impl SolveStrategy {
    pub fn name(self) -> &'static str {
        match self {
            SolveStrategy::BasicQr => "basic-qr",
            SolveStrategy::MinNorm => "min-norm",
        }
    }
}

impl std::fmt::Display for SolveStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SolveStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "basic-qr" | "basicqr" | "basic" => Ok(SolveStrategy::BasicQr),
            "min-norm" | "minnorm" => Ok(SolveStrategy::MinNorm),
            other => Err(format!("unknown solve strategy `{other}` (expected basic-qr or min-norm)")),
        }
    }
}

/// Numerical diagnostics recorded while fitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    /// Ratio of extreme `R` diagonals from the pivoted QR of the system.
    pub condition_estimate: f64,
    /// True when `condition_estimate` exceeded [`CONDITION_WARN_THRESHOLD`].
    pub ill_conditioned: bool,
    /// True when the minimum-norm route fell back to a ridge.
    pub ridge_applied: bool,
    /// `max_i |predict(x_i) - t_i| / max(1, |t_i|)` over the training set.
    pub max_training_residual: f64,
}

/// A fitted exact-design radial basis network.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedRbnn {
    layer: RadialLayer,
    spread: Spread,
    weights: Vec<f64>,
    bias: f64,
    strategy: SolveStrategy,
    diagnostics: Option<FitDiagnostics>,
}

/// Fit with the default solve strategy.
pub fn fit(inputs: &[Vec<f64>], targets: &[f64], spread: Spread) -> Result<FittedRbnn, RbnnError> {
    fit_with(inputs, targets, spread, SolveStrategy::default())
}

/// Fit an exact-design network: centers are the training inputs, the second
/// layer is solved so every training target is reproduced.
pub fn fit_with(
    inputs: &[Vec<f64>],
    targets: &[f64],
    spread: Spread,
    strategy: SolveStrategy,
) -> Result<FittedRbnn, RbnnError> {
    if inputs.is_empty() {
        return Err(RbnnError::EmptyTrainingSet);
    }
    if inputs.len() != targets.len() {
        return Err(RbnnError::TargetCountMismatch { inputs: inputs.len(), targets: targets.len() });
    }
    check_conflicting_duplicates(inputs, targets)?;

    let q = inputs.len();
    let layer = RadialLayer::new(inputs.to_vec(), spread)?;

    // row j: activations of all neurons at training input j, plus the bias 1
    let mut system = DenseMatrix::zeros(q, q + 1);
    for (j, input) in inputs.iter().enumerate() {
        let a1 = layer.output(input)?;
        for (i, v) in a1.into_iter().enumerate() {
            *system.at_mut(j, i) = v;
        }
        *system.at_mut(j, q) = 1.0;
    }

    let qr = PivotedQr::factor(&system);
    let condition_estimate = qr.condition_estimate();
    let ill_conditioned =
        condition_estimate > CONDITION_WARN_THRESHOLD || condition_estimate.is_nan();

    let mut ridge_applied = false;
    let solution = match strategy {
        SolveStrategy::BasicQr => qr.solve_basic_refined(&system, targets),
        SolveStrategy::MinNorm => {
            let ridge = if ill_conditioned { RIDGE_LAMBDA } else { 0.0 };
            ridge_applied = ridge > 0.0;
            match solve_min_norm(&system, targets, ridge) {
                Some(x) => x,
                None => {
                    // Gram matrix lost positive definiteness; retry ridged.
                    ridge_applied = true;
                    solve_min_norm(&system, targets, RIDGE_LAMBDA)
                        .ok_or(RbnnError::SingularSystem)?
                }
            }
        }
    };

    let (weights, bias) = (solution[..q].to_vec(), solution[q]);
    let mut model = FittedRbnn {
        layer,
        spread,
        weights,
        bias,
        strategy,
        diagnostics: None,
    };
    let max_training_residual = inputs
        .iter()
        .zip(targets)
        .map(|(x, t)| (model.predict(x).unwrap() - t).abs() / t.abs().max(1.0))
        .fold(0.0, f64::max);
    model.diagnostics = Some(FitDiagnostics {
        condition_estimate,
        ill_conditioned,
        ridge_applied,
        max_training_residual,
    });
    Ok(model)
}

fn check_conflicting_duplicates(inputs: &[Vec<f64>], targets: &[f64]) -> Result<(), RbnnError> {
    for i in 0..inputs.len() {
        for j in i + 1..inputs.len() {
            if inputs[i] == inputs[j] && targets[i] != targets[j] {
                return Err(RbnnError::DuplicateInputs {
                    first: i,
                    second: j,
                    t_first: targets[i],
                    t_second: targets[j],
                });
            }
        }
    }
    Ok(())
}

impl FittedRbnn {
    /// Network output `lw2 . a1(p) + b2`; unconstrained real, never clamped.
    pub fn predict(&self, input: &[f64]) -> Result<f64, RbnnError> {
        let a1 = self.layer.output(input)?;
        Ok(self.weights.iter().zip(&a1).map(|(w, a)| w * a).sum::<f64>() + self.bias)
    }

    pub fn layer(&self) -> &RadialLayer {
        &self.layer
    }

    pub fn spread(&self) -> Spread {
        self.spread
    }

    pub fn second_layer_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn second_layer_bias(&self) -> f64 {
        self.bias
    }

    pub fn strategy(&self) -> SolveStrategy {
        self.strategy
    }

    /// Fit diagnostics; `None` on models restored from serialized form.
    pub fn diagnostics(&self) -> Option<&FitDiagnostics> {
        self.diagnostics.as_ref()
    }
}

/// Serialized form of a fitted network, for replayable runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedRbnn {
    pub spread: f64,
    pub centers: Vec<Vec<f64>>,
    pub lw2: Vec<f64>,
    pub b2: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub feature_encoding: Option<FeatureEncoding>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scaler: Option<MinMaxScaler>,
}

impl SavedRbnn {
    pub fn from_model(model: &FittedRbnn) -> Self {
        SavedRbnn {
            spread: model.spread.value(),
            centers: model.layer.centers().to_vec(),
            lw2: model.weights.clone(),
            b2: model.bias,
            feature_encoding: None,
            scaler: None,
        }
    }

    pub fn into_model(self) -> Result<FittedRbnn, RbnnError> {
        let spread = Spread::new(self.spread)?;
        let layer = RadialLayer::new(self.centers, spread)?;
        if layer.len() != self.lw2.len() {
            return Err(RbnnError::TargetCountMismatch {
                inputs: layer.len(),
                targets: self.lw2.len(),
            });
        }
        Ok(FittedRbnn {
            layer,
            spread,
            weights: self.lw2,
            bias: self.b2,
            strategy: SolveStrategy::default(),
            diagnostics: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spread(v: f64) -> Spread {
        Spread::new(v).unwrap()
    }

    fn one_d(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn single_pair_is_reproduced_exactly() {
        for strategy in [SolveStrategy::BasicQr, SolveStrategy::MinNorm] {
            let model = fit_with(&one_d(&[2.0]), &[7.5], spread(1.0), strategy).unwrap();
            assert!((model.predict(&[2.0]).unwrap() - 7.5).abs() < 1e-12);
        }
    }

    #[test]
    fn far_input_returns_the_solved_bias() {
        let model = fit(&one_d(&[0.0]), &[5.0], spread(1.0)).unwrap();
        let far = model.predict(&[1e6]).unwrap();
        assert!((far - model.second_layer_bias()).abs() < 1e-12);
    }

    #[test]
    fn three_point_training_targets_reproduced() {
        let inputs = one_d(&[0.0, 1.0, 2.0]);
        let targets = [0.0, 1.0, 0.0];
        for strategy in [SolveStrategy::BasicQr, SolveStrategy::MinNorm] {
            let model = fit_with(&inputs, &targets, spread(1.0), strategy).unwrap();
            for (x, t) in inputs.iter().zip(&targets) {
                assert!(
                    (model.predict(x).unwrap() - t).abs() < 1e-9,
                    "strategy {strategy}: training point not reproduced"
                );
            }
        }
    }

    /// Independent construction of the 3-point system and its minimum-norm
    /// solve: with spread 1 the activation between points at distance d is
    /// 2^(-d^2), so A1 = [[1,1/2,1/16],[1/2,1,1/2],[1/16,1/2,1]].
    #[test]
    fn three_point_min_norm_matches_brute_force() {
        let inputs = one_d(&[0.0, 1.0, 2.0]);
        let targets = [0.0, 1.0, 0.0];
        let model = fit_with(&inputs, &targets, spread(1.0), SolveStrategy::MinNorm).unwrap();

        let g = [
            [1.0, 0.5, 1.0 / 16.0, 1.0],
            [0.5, 1.0, 0.5, 1.0],
            [1.0 / 16.0, 0.5, 1.0, 1.0],
        ];
        let x = brute_force_min_norm(&g, &targets);
        for probe in [[0.5], [1.5], [3.0], [0.0]] {
            let a: Vec<f64> = inputs
                .iter()
                .map(|c| {
                    let d: f64 = probe[0] - c[0];
                    (-(d * d) * 2.0_f64.ln()).exp()
                })
                .collect();
            let by_hand = x[0] * a[0] + x[1] * a[1] + x[2] * a[2] + x[3];
            let by_model = model.predict(&probe).unwrap();
            assert!((by_hand - by_model).abs() < 1e-8);
        }
    }

    /// Minimum-norm solution of g x = t (m rows, m+1 columns) computed the
    /// long way: x = g' (g g')^-1 t with a tiny Gauss-Jordan inverse.
    #[allow(clippy::needless_range_loop)]
    fn brute_force_min_norm(g: &[[f64; 4]; 3], t: &[f64; 3]) -> [f64; 4] {
        let mut gram = [[0.0_f64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                gram[i][j] = (0..4).map(|c| g[i][c] * g[j][c]).sum();
            }
        }
        // augment with identity and eliminate
        let mut aug = [[0.0_f64; 6]; 3];
        for i in 0..3 {
            aug[i][..3].copy_from_slice(&gram[i]);
            aug[i][3 + i] = 1.0;
        }
        for col in 0..3 {
            let pivot_row = (col..3)
                .max_by(|&a, &b| aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap())
                .unwrap();
            aug.swap(col, pivot_row);
            let pivot = aug[col][col];
            for v in aug[col].iter_mut() {
                *v /= pivot;
            }
            for row in 0..3 {
                if row != col {
                    let factor = aug[row][col];
                    for c in 0..6 {
                        aug[row][c] -= factor * aug[col][c];
                    }
                }
            }
        }
        let mut y = [0.0_f64; 3];
        for i in 0..3 {
            y[i] = (0..3).map(|j| aug[i][3 + j] * t[j]).sum();
        }
        let mut x = [0.0_f64; 4];
        for c in 0..4 {
            x[c] = (0..3).map(|i| g[i][c] * y[i]).sum();
        }
        x
    }

    #[test]
    fn well_separated_sets_interpolate_below_1e6_relative() {
        let inputs = one_d(&[0.0, 3.0, 7.0, 11.0, 20.0]);
        let targets = [100.0, -40.0, 1250.0, 3.0, 0.5];
        for strategy in [SolveStrategy::BasicQr, SolveStrategy::MinNorm] {
            let model = fit_with(&inputs, &targets, spread(1.5), strategy).unwrap();
            let d = model.diagnostics().unwrap();
            assert!(d.max_training_residual < 1e-6, "residual {}", d.max_training_residual);
        }
    }

    #[test]
    fn conflicting_duplicate_inputs_are_rejected() {
        let err = fit(&one_d(&[1.0, 1.0]), &[2.0, 3.0], spread(1.0)).unwrap_err();
        assert!(matches!(err, RbnnError::DuplicateInputs { first: 0, second: 1, .. }));
    }

    #[test]
    fn agreeing_duplicate_inputs_are_allowed() {
        let model = fit(&one_d(&[1.0, 1.0, 4.0]), &[2.0, 2.0, 9.0], spread(1.0)).unwrap();
        assert!((model.predict(&[1.0]).unwrap() - 2.0).abs() < 1e-8);
        assert!((model.predict(&[4.0]).unwrap() - 9.0).abs() < 1e-8);
        assert!(model.diagnostics().unwrap().ill_conditioned);
    }

    #[test]
    fn dimension_mismatch_on_predict() {
        let model = fit(&[vec![0.0, 0.0]], &[1.0], spread(1.0)).unwrap();
        assert!(matches!(
            model.predict(&[1.0]),
            Err(RbnnError::Radial(RadialError::DimensionMismatch { .. }))
        ));
    }

    #[test]
    fn permutation_of_training_rows_leaves_predictions_unchanged() {
        let inputs = one_d(&[0.0, 2.0, 5.0, 9.0]);
        let targets = [1.0, -2.0, 4.0, 8.0];
        let permuted_inputs = one_d(&[5.0, 0.0, 9.0, 2.0]);
        let permuted_targets = [4.0, 1.0, 8.0, -2.0];
        for strategy in [SolveStrategy::BasicQr, SolveStrategy::MinNorm] {
            let a = fit_with(&inputs, &targets, spread(1.0), strategy).unwrap();
            let b = fit_with(&permuted_inputs, &permuted_targets, spread(1.0), strategy).unwrap();
            for x in [-1.0, 0.5, 3.3, 6.0, 12.0] {
                let pa = a.predict(&[x]).unwrap();
                let pb = b.predict(&[x]).unwrap();
                assert!((pa - pb).abs() <= 1e-9 * pa.abs().max(1.0), "{strategy} at {x}");
            }
        }
    }

    #[test]
    fn predictions_vary_continuously_in_spread() {
        let inputs = one_d(&[0.0, 1.0, 2.5, 4.0]);
        let targets = [0.0, 10.0, -5.0, 3.0];
        for strategy in [SolveStrategy::BasicQr, SolveStrategy::MinNorm] {
            for probe in [0.3, 1.7, 3.1] {
                let f = |s: f64| {
                    fit_with(&inputs, &targets, spread(s), strategy)
                        .unwrap()
                        .predict(&[probe])
                        .unwrap()
                };
                let s0 = 1.0;
                let h = 1e-4;
                let local_slope = ((f(s0 + 1e-2) - f(s0 - 1e-2)) / 2e-2).abs();
                let jump = (f(s0 + h) - f(s0)).abs();
                assert!(
                    jump <= 10.0 * (local_slope + 1e-9) * h,
                    "{strategy} probe {probe}: jump {jump}, slope {local_slope}"
                );
            }
        }
    }

    #[test]
    fn serialization_round_trip_preserves_predictions() {
        let model = fit(&one_d(&[0.0, 1.0, 3.0]), &[5.0, -1.0, 2.0], spread(0.94)).unwrap();
        let json = serde_json::to_string(&SavedRbnn::from_model(&model)).unwrap();
        let restored: SavedRbnn = serde_json::from_str(&json).unwrap();
        let restored = restored.into_model().unwrap();
        for x in [-2.0, 0.0, 0.4, 1.0, 2.9, 10.0] {
            assert_eq!(model.predict(&[x]).unwrap(), restored.predict(&[x]).unwrap());
        }
    }

    proptest! {
        #[test]
        fn exact_interpolation_on_random_separated_sets(
            raw in proptest::collection::vec((-50.0_f64..50.0, -200.0_f64..200.0), 1..8),
            s in 0.5_f64..3.0,
        ) {
            // keep inputs pairwise separated so the system stays benign
            let mut inputs: Vec<Vec<f64>> = Vec::new();
            let mut targets: Vec<f64> = Vec::new();
            for (x, t) in raw {
                if inputs.iter().all(|v: &Vec<f64>| (v[0] - x).abs() > 0.5) {
                    inputs.push(vec![x]);
                    targets.push(t);
                }
            }
            for strategy in [SolveStrategy::BasicQr, SolveStrategy::MinNorm] {
                let model = fit_with(&inputs, &targets, spread(s), strategy).unwrap();
                let d = model.diagnostics().unwrap();
                if d.condition_estimate < 1e12 {
                    prop_assert!(d.max_training_residual < 1e-6);
                }
            }
        }
    }
}
