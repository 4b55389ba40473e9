//! The radial first layer shared by both networks: Euclidean distance to
//! stored centers, the spread-to-bias rule, and the Gaussian transfer
//! function `radbas(n) = exp(-n^2)`.
//!
//! Each hidden neuron stores one center vector. For an input `p` the neuron's
//! net input is `||p - center|| * bias` and its output is `radbas` of that,
//! so activation is 1 at the center and decays with distance. The scalar bias
//! is derived from the user-chosen spread as `sqrt(ln 2) / spread`, which
//! makes `spread` the distance at which activation falls to exactly 0.5.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("spread must be positive, got {0}")]
    NonPositiveSpread(f64),
    #[error("input has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("a radial layer needs at least one center")]
    EmptyCenters,
    #[error("center {index} has dimension {got}, expected {expected}")]
    RaggedCenters { index: usize, expected: usize, got: usize },
}

/// Gaussian transfer function of a radial neuron.
pub fn radbas(n: f64) -> f64 {
    (-(n * n)).exp()
}

/// User-chosen kernel width, in feature-space distance units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spread(f64);

impl Spread {
    pub fn new(value: f64) -> Result<Self, RadialError> {
        if value > 0.0 && value.is_finite() {
            Ok(Spread(value))
        } else {
            Err(RadialError::NonPositiveSpread(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The layer bias for this spread: `sqrt(ln 2) / spread`.
    pub fn bias(self) -> f64 {
        bias_from_spread(self)
    }
}

/// Convert a spread to the shared scalar bias, `sqrt(ln 2) / spread`.
///
/// With this rule a neuron's output at distance `spread` from its center is
/// exactly 0.5: `radbas(spread * bias) = exp(-ln 2) = 1/2`.
pub fn bias_from_spread(spread: Spread) -> f64 {
    (2.0_f64.ln()).sqrt() / spread.value()
}

/// Fitted hidden layer: stored centers plus the shared bias.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialLayer {
    centers: Vec<Vec<f64>>,
    dim: usize,
    bias: f64,
}

impl RadialLayer {
    /// Build a layer from center vectors and a spread. All centers must share
    /// one dimension and there must be at least one.
    pub fn new(centers: Vec<Vec<f64>>, spread: Spread) -> Result<Self, RadialError> {
        let dim = centers.first().ok_or(RadialError::EmptyCenters)?.len();
        if dim == 0 {
            return Err(RadialError::RaggedCenters { index: 0, expected: 1, got: 0 });
        }
        for (index, c) in centers.iter().enumerate() {
            if c.len() != dim {
                return Err(RadialError::RaggedCenters { index, expected: dim, got: c.len() });
            }
        }
        Ok(RadialLayer { centers, dim, bias: spread.bias() })
    }

    /// Number of neurons (stored centers).
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Feature-space dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    fn check_dim(&self, input: &[f64]) -> Result<(), RadialError> {
        if input.len() != self.dim {
            return Err(RadialError::DimensionMismatch { expected: self.dim, got: input.len() });
        }
        Ok(())
    }

    /// Net inputs: `||p - center_i|| * bias` for every neuron.
    pub fn net_inputs(&self, input: &[f64]) -> Result<Vec<f64>, RadialError> {
        self.check_dim(input)?;
        Ok(self
            .centers
            .iter()
            .map(|c| euclidean_distance(input, c) * self.bias)
            .collect())
    }

    /// Layer output: `radbas` of every net input. Entries lie in `(0, 1]`,
    /// with 1 exactly when the input coincides with a center.
    pub fn output(&self, input: &[f64]) -> Result<Vec<f64>, RadialError> {
        Ok(self.net_inputs(input)?.into_iter().map(radbas).collect())
    }
}

pub(crate) fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
