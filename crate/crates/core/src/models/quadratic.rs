use nalgebra::{DMatrix, DVector};

use crate::domain::{DiscreteState, Domain};
use crate::error::{Error, Result};
use crate::model::{EnergyModel, FlipDifferences};

/// A binary energy of the explicit quadratic form `U(θ) = θᵀAθ + bᵀθ`, the
/// multilinear extension of a second-order modular set function.
///
/// The diagonal of `A` is required to be zero: on the hypercube a diagonal
/// term is linear (`θ_i² = θ_i`) and belongs in `b`.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    domain: Domain,
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl QuadraticModel {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let d = b.len();
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.nrows(),
            });
        }
        if (0..d).any(|i| a[(i, i)] != 0.0) {
            return Err(Error::InvalidDomain(
                "quadratic form must have a zero diagonal".into(),
            ));
        }
        Ok(QuadraticModel {
            domain: Domain::binary(d)?,
            a,
            b,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn linear(&self) -> &DVector<f64> {
        &self.b
    }

    /// Symmetric part `(A + Aᵀ)/2`; `θᵀAθ` depends only on it.
    pub fn symmetric_matrix(&self) -> DMatrix<f64> {
        (&self.a + self.a.transpose()) * 0.5
    }

    /// Gradient of the extension, `2 A_sym θ + b`.
    pub fn gradient(&self, state: &DiscreteState) -> DVector<f64> {
        let theta = DVector::from_iterator(
            state.dim(),
            state.values().iter().map(|&v| v as f64),
        );
        (&self.a + self.a.transpose()) * &theta + &self.b
    }
}

impl EnergyModel for QuadraticModel {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn energy(&self, state: &DiscreteState) -> f64 {
        let theta = DVector::from_iterator(
            state.dim(),
            state.values().iter().map(|&v| v as f64),
        );
        (theta.transpose() * &self.a * &theta)[(0, 0)] + self.b.dot(&theta)
    }

    fn flip_differences(&self, state: &DiscreteState) -> FlipDifferences {
        // With a zero diagonal the flip difference along coordinate i equals
        // the flip direction times the gradient entry.
        let grad = self.gradient(state);
        let diffs = (0..state.dim())
            .map(|i| (1.0 - 2.0 * state.level(i) as f64) * grad[i])
            .collect();
        FlipDifferences::PerCoordinate(diffs)
    }
}
