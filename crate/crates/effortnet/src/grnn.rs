//! Generalized regression network.
//!
//! Same radial first layer as the exact-design network, but the second layer
//! stores the training targets verbatim and outputs their kernel-weighted
//! average:
//!
//! ```text
//! predict(p) = sum_i t_i * a1_i(p) / sum_i a1_i(p)
//! ```
//!
//! No solve is performed; fitting is storage. Because the output is a convex
//! combination of stored targets it always lies in `[min(T), max(T)]`, and
//! unlike the exact-design network it does not reproduce training targets
//! exactly in general.
//!
//! The weight ratio is evaluated in log space so that inputs far from every
//! center (where every raw kernel value underflows to zero) still get the
//! mathematically correct nearest-center limit instead of 0/0.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{FeatureEncoding, MinMaxScaler};
use crate::radial::{RadialError, RadialLayer, Spread};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrnnError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("{inputs} training inputs but {targets} targets")]
    TargetCountMismatch { inputs: usize, targets: usize },
    #[error(transparent)]
    Radial(#[from] RadialError),
}

/// A fitted generalized regression network: stored centers and targets.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedGrnn {
    layer: RadialLayer,
    spread: Spread,
    targets: Vec<f64>,
}

/// Store the training data as the network. Duplicate inputs are permitted;
/// they simply double-weight their target in the average.
pub fn fit(inputs: &[Vec<f64>], targets: &[f64], spread: Spread) -> Result<FittedGrnn, GrnnError> {
    if inputs.is_empty() {
        return Err(GrnnError::EmptyTrainingSet);
    }
    if inputs.len() != targets.len() {
        return Err(GrnnError::TargetCountMismatch { inputs: inputs.len(), targets: targets.len() });
    }
    let layer = RadialLayer::new(inputs.to_vec(), spread)?;
    Ok(FittedGrnn { layer, spread, targets: targets.to_vec() })
}

impl FittedGrnn {
    /// Kernel-weighted average of the stored targets.
    pub fn predict(&self, input: &[f64]) -> Result<f64, GrnnError> {
        let net = self.layer.net_inputs(input)?;
        // log weights are -n_i^2; shift by the max so the dominant kernel
        // contributes exactly 1 and the denominator never underflows
        let max_log = net.iter().map(|n| -(n * n)).fold(f64::NEG_INFINITY, f64::max);
        let mut numerator = 0.0;
        let mut denominator = 0.0;
        for (n, t) in net.iter().zip(&self.targets) {
            let w = (-(n * n) - max_log).exp();
            numerator += t * w;
            denominator += w;
        }
        Ok(numerator / denominator)
    }

    pub fn layer(&self) -> &RadialLayer {
        &self.layer
    }

    pub fn spread(&self) -> Spread {
        self.spread
    }

    /// Stored training targets (the second-layer weights).
    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}

/// Serialized form of a fitted network, for replayable runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedGrnn {
    pub spread: f64,
    pub centers: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub feature_encoding: Option<FeatureEncoding>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scaler: Option<MinMaxScaler>,
}

impl SavedGrnn {
    pub fn from_model(model: &FittedGrnn) -> Self {
        SavedGrnn {
            spread: model.spread.value(),
            centers: model.layer.centers().to_vec(),
            targets: model.targets.clone(),
            feature_encoding: None,
            scaler: None,
        }
    }

    pub fn into_model(self) -> Result<FittedGrnn, GrnnError> {
        let spread = Spread::new(self.spread)?;
        if self.centers.len() != self.targets.len() {
            return Err(GrnnError::TargetCountMismatch {
                inputs: self.centers.len(),
                targets: self.targets.len(),
            });
        }
        let layer = RadialLayer::new(self.centers, spread)?;
        Ok(FittedGrnn { layer, spread, targets: self.targets })
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
    fn fitting_is_storage() {
        let model = fit(&one_d(&[1.0, 2.0, 3.0]), &[5.0, 6.0, 7.0], spread(1.0)).unwrap();
        assert_eq!(model.layer().len(), 3);
        assert_eq!(model.targets(), &[5.0, 6.0, 7.0]);
    }

    #[test]
    fn single_center_predicts_its_target_everywhere() {
        let model = fit(&one_d(&[3.0]), &[42.0], spread(0.7)).unwrap();
        for x in [-100.0, 0.0, 3.0, 1e7] {
            assert_eq!(model.predict(&[x]).unwrap(), 42.0);
        }
    }

    #[test]
    fn equidistant_input_averages_the_two_targets() {
        let model = fit(&one_d(&[0.0, 4.0]), &[10.0, 30.0], spread(1.3)).unwrap();
        assert_eq!(model.predict(&[2.0]).unwrap(), 20.0);
    }

    #[test]
    fn two_kernel_prediction_matches_hand_built_sum() {
        // centers {0, 10}, targets {0, 100}, spread 1, query at 0
        let model = fit(&one_d(&[0.0, 10.0]), &[0.0, 100.0], spread(1.0)).unwrap();
        let got = model.predict(&[0.0]).unwrap();

        let bias = (2.0_f64.ln()).sqrt();
        let w_far = (-(10.0 * bias) * (10.0 * bias)).exp();
        let by_hand = 100.0 * w_far / (1.0 + w_far);
        assert!((got - by_hand).abs() <= 1e-15 * by_hand.abs());
        // 100 * 2^-100 / (1 + 2^-100), evaluated independently
        assert!((got - 7.888609052210118e-29).abs() < 1e-40);
        assert!(got > 0.0);
    }

    #[test]
    fn prediction_survives_total_kernel_underflow() {
        // all raw kernel values underflow at this distance; the nearest
        // center must still dominate
        let model = fit(&one_d(&[0.0, 10.0]), &[1.0, 9.0], spread(1.0)).unwrap();
        let far = model.predict(&[1.0e6]).unwrap();
        assert_eq!(far, 9.0);
    }

    #[test]
    fn fitting_twice_gives_identical_serialized_models() {
        let inputs = one_d(&[0.0, 1.0, 5.0]);
        let targets = [3.0, -2.0, 8.0];
        let a = fit(&inputs, &targets, spread(0.94)).unwrap();
        let b = fit(&inputs, &targets, spread(0.94)).unwrap();
        let ja = serde_json::to_string(&SavedGrnn::from_model(&a)).unwrap();
        let jb = serde_json::to_string(&SavedGrnn::from_model(&b)).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn large_spread_limit_is_the_target_mean() {
        let targets = [3.0, 1.0, 4.0, 1.5, 5.0];
        let model = fit(&one_d(&[0.0, 1.0, 2.0, 3.0, 4.0]), &targets, spread(1e6)).unwrap();
        let mean = targets.iter().sum::<f64>() / targets.len() as f64;
        for x in [0.0, 2.2, 4.0] {
            let p = model.predict(&[x]).unwrap();
            assert!((p - mean).abs() <= 1e-6 * mean.abs());
        }
    }

    #[test]
    fn small_spread_limit_is_the_nearest_target() {
        let targets = [3.0, 1.0, 4.0, 1.5, 5.0];
        let model = fit(&one_d(&[0.0, 1.0, 2.0, 3.0, 4.0]), &targets, spread(1e-3)).unwrap();
        for (i, t) in targets.iter().enumerate() {
            let p = model.predict(&[i as f64]).unwrap();
            assert!((p - t).abs() < 1e-6);
        }
        // off-grid inputs snap to the nearest center's target
        assert_eq!(model.predict(&[1.2]).unwrap(), 1.0);
    }

    #[test]
    fn training_targets_are_not_reproduced_exactly_in_general() {
        let model = fit(&one_d(&[0.0, 2.0]), &[0.0, 10.0], spread(1.0)).unwrap();
        let at_first = model.predict(&[0.0]).unwrap();
        assert!(at_first > 0.0);
        assert!(at_first < 1.0); // near 0 but pulled toward the other target
    }

    #[test]
    fn duplicate_centers_double_weight_their_target() {
        let model = fit(&one_d(&[0.0, 0.0, 2.0]), &[6.0, 6.0, 0.0], spread(1.0)).unwrap();
        // at the midpoint, weights are (w, w, w): average = (6+6+0)/3
        assert!((model.predict(&[1.0]).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn permutation_invariance_of_training_rows() {
        let a = fit(&one_d(&[0.0, 1.0, 4.0]), &[2.0, 5.0, -3.0], spread(0.8)).unwrap();
        let b = fit(&one_d(&[4.0, 0.0, 1.0]), &[-3.0, 2.0, 5.0], spread(0.8)).unwrap();
        for x in [-1.0, 0.5, 2.0, 6.0] {
            let pa = a.predict(&[x]).unwrap();
            let pb = b.predict(&[x]).unwrap();
            assert!((pa - pb).abs() <= 1e-12 * pa.abs().max(1.0));
        }
    }

    #[test]
    fn serialization_round_trip_preserves_predictions() {
        let model = fit(&one_d(&[0.0, 1.0, 3.0]), &[5.0, -1.0, 2.0], spread(0.94)).unwrap();
        let json = serde_json::to_string(&SavedGrnn::from_model(&model)).unwrap();
        let restored: SavedGrnn = serde_json::from_str(&json).unwrap();
        let restored = restored.into_model().unwrap();
        for x in [-2.0, 0.0, 0.4, 1.0, 2.9, 10.0] {
            assert_eq!(model.predict(&[x]).unwrap(), restored.predict(&[x]).unwrap());
        }
    }

    proptest! {
        #[test]
        fn predictions_stay_within_the_target_range(
            pairs in proptest::collection::vec((-30.0_f64..30.0, -100.0_f64..100.0), 1..10),
            query in -50.0_f64..50.0,
            s in 0.05_f64..20.0,
        ) {
            let inputs = one_d(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
            let targets: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let model = fit(&inputs, &targets, spread(s)).unwrap();
            let p = model.predict(&[query]).unwrap();
            let lo = targets.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = targets.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(p >= lo - 1e-9 && p <= hi + 1e-9);
        }
    }
}
