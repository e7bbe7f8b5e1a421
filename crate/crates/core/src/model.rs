//! The pluggable energy-model interface and generic finite differences.
//!
//! A model evaluates `U(θ)` for states of its domain; the target distribution
//! is `π(θ) ∝ exp(U(θ))`. Per-coordinate finite differences drive the informed
//! proposals; models may override `flip_differences` with incremental formulas
//! but must stay consistent with direct energy evaluation.

use crate::domain::{DiscreteState, Domain, Encoding};
use crate::error::{Error, Result};

/// Per-coordinate energy differences at a state.
#[derive(Debug, Clone, PartialEq)]
pub enum FlipDifferences {
    /// One value per coordinate.
    ///
    /// Binary encoding: `U(flip_i θ) - U(θ)` (flip convention).
    /// Ordinal encoding: the difference in the +1 direction, with a one-sided
    /// backward rule at the upper boundary `θ_i = L-1`.
    PerCoordinate(Vec<f64>),
    /// Full `d × L` matrix, entry `(i, ℓ) = U(θ with coordinate i at ℓ) - U(θ)`.
    /// The column at the current level is exactly zero.
    PerLevel { diffs: Vec<f64>, levels: usize },
}

impl FlipDifferences {
    pub fn per_coordinate(&self) -> &[f64] {
        match self {
            FlipDifferences::PerCoordinate(v) => v,
            FlipDifferences::PerLevel { .. } => {
                panic!("expected per-coordinate differences, got per-level matrix")
            }
        }
    }

    /// Entry `(i, ℓ)` of the per-level matrix.
    pub fn level_entry(&self, i: usize, level: usize) -> f64 {
        match self {
            FlipDifferences::PerLevel { diffs, levels } => diffs[i * levels + level],
            FlipDifferences::PerCoordinate(_) => {
                panic!("expected per-level matrix, got per-coordinate differences")
            }
        }
    }
}

/// A target energy `U` over a factorized discrete domain.
///
/// Implementations are immutable after construction and safe to call from
/// multiple threads; `energy` must be a pure function of the state.
pub trait EnergyModel: Send + Sync {
    fn domain(&self) -> &Domain;

    fn energy(&self, state: &DiscreteState) -> f64;

    /// Per-coordinate differences at `state`. The default performs `d`
    /// (or `d·L`) full energy evaluations; models with local structure
    /// override this with O(neighborhood) formulas.
    fn flip_differences(&self, state: &DiscreteState) -> FlipDifferences {
        forward_difference(self, state)
    }
}

impl<M: EnergyModel + ?Sized> EnergyModel for &M {
    fn domain(&self) -> &Domain {
        (**self).domain()
    }
    fn energy(&self, state: &DiscreteState) -> f64 {
        (**self).energy(state)
    }
    fn flip_differences(&self, state: &DiscreteState) -> FlipDifferences {
        (**self).flip_differences(state)
    }
}

impl<M: EnergyModel + ?Sized> EnergyModel for Box<M> {
    fn domain(&self) -> &Domain {
        (**self).domain()
    }
    fn energy(&self, state: &DiscreteState) -> f64 {
        (**self).energy(state)
    }
    fn flip_differences(&self, state: &DiscreteState) -> FlipDifferences {
        (**self).flip_differences(state)
    }
}

/// Generic window-1 forward difference by direct energy evaluation.
pub fn forward_difference<M: EnergyModel + ?Sized>(
    model: &M,
    state: &DiscreteState,
) -> FlipDifferences {
    let domain = *model.domain();
    let d = domain.dim();
    let levels = domain.levels();
    let u0 = model.energy(state);
    match domain.encoding() {
        Encoding::Binary => {
            let diffs = (0..d)
                .map(|i| {
                    let flipped = state.with_level(i, 1 - state.level(i));
                    model.energy(&flipped) - u0
                })
                .collect();
            FlipDifferences::PerCoordinate(diffs)
        }
        Encoding::Ordinal => {
            let diffs = (0..d)
                .map(|i| {
                    let v = state.level(i);
                    if v + 1 < levels {
                        model.energy(&state.with_level(i, v + 1)) - u0
                    } else {
                        // One-sided backward rule at the boundary, kept in the
                        // +1 direction convention.
                        u0 - model.energy(&state.with_level(i, v - 1))
                    }
                })
                .collect();
            FlipDifferences::PerCoordinate(diffs)
        }
        Encoding::OneHot => {
            let mut diffs = vec![0.0; d * levels];
            for i in 0..d {
                for l in 0..levels {
                    diffs[i * levels + l] = if l == state.level(i) {
                        0.0
                    } else {
                        model.energy(&state.with_level(i, l)) - u0
                    };
                }
            }
            FlipDifferences::PerLevel { diffs, levels }
        }
    }
}

/// Energy differences `U(θ with θ_i = ℓ) - U(θ)` for every coordinate and
/// level, as a `d × L` row-major matrix. Used by the locally-balanced
/// neighborhood and Gibbs conditionals; reuses the model's fast differences
/// where they determine the full matrix.
pub fn level_difference_matrix<M: EnergyModel + ?Sized>(
    model: &M,
    state: &DiscreteState,
) -> Vec<f64> {
    let domain = *model.domain();
    let d = domain.dim();
    let levels = domain.levels();
    match (domain.encoding(), model.flip_differences(state)) {
        (Encoding::Binary, FlipDifferences::PerCoordinate(flip)) => {
            let mut out = vec![0.0; d * 2];
            for i in 0..d {
                out[i * 2 + (1 - state.level(i))] = flip[i];
            }
            out
        }
        (_, FlipDifferences::PerLevel { diffs, .. }) => diffs,
        // Ordinal +1-direction differences do not determine distant levels.
        _ => {
            let u0 = model.energy(state);
            let mut out = vec![0.0; d * levels];
            for i in 0..d {
                for l in 0..levels {
                    if l != state.level(i) {
                        out[i * levels + l] = model.energy(&state.with_level(i, l)) - u0;
                    }
                }
            }
            out
        }
    }
}

/// Checks that a model's `flip_differences` agrees with direct energy
/// evaluation at `state`, within `tol`. Returns the worst absolute deviation.
pub fn difference_consistency<M: EnergyModel + ?Sized>(
    model: &M,
    state: &DiscreteState,
    tol: f64,
) -> Result<f64> {
    let fast = model.flip_differences(state);
    let slow = forward_difference(model, state);
    let worst = match (&fast, &slow) {
        (FlipDifferences::PerCoordinate(a), FlipDifferences::PerCoordinate(b)) => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
        (
            FlipDifferences::PerLevel { diffs: a, .. },
            FlipDifferences::PerLevel { diffs: b, .. },
        ) => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
        _ => {
            return Err(Error::InvalidState(
                "difference representations disagree in shape".into(),
            ))
        }
    };
    if worst > tol {
        return Err(Error::InvalidState(format!(
            "flip differences deviate from direct evaluation by {worst:e}"
        )));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Linear energy over a small binary cube, used as a difference oracle.
    struct Linear {
        domain: Domain,
        weights: Vec<f64>,
    }

    impl EnergyModel for Linear {
        fn domain(&self) -> &Domain {
            &self.domain
        }
        fn energy(&self, state: &DiscreteState) -> f64 {
            state
                .values()
                .iter()
                .zip(&self.weights)
                .map(|(&v, w)| v as f64 * w)
                .sum()
        }
    }

    #[test]
    fn linear_binary_differences() {
        let m = Linear {
            domain: Domain::binary(2).unwrap(),
            weights: vec![3.0, 1.0],
        };
        let s = DiscreteState::new(vec![0, 0], &m.domain).unwrap();
        let d = forward_difference(&m, &s);
        assert_eq!(d.per_coordinate(), &[3.0, 1.0]);

        let s = DiscreteState::new(vec![1, 0], &m.domain).unwrap();
        let d = forward_difference(&m, &s);
        assert_eq!(d.per_coordinate(), &[-3.0, 1.0]);
    }

    #[test]
    fn binary_flip_antisymmetry() {
        let m = Linear {
            domain: Domain::binary(3).unwrap(),
            weights: vec![0.3, -1.2, 2.0],
        };
        let s = DiscreteState::new(vec![0, 1, 0], &m.domain).unwrap();
        let base = forward_difference(&m, &s);
        for i in 0..3 {
            let flipped = s.with_level(i, 1 - s.level(i));
            let at_flip = forward_difference(&m, &flipped);
            assert!((at_flip.per_coordinate()[i] + base.per_coordinate()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn ordinal_boundary_rule() {
        let m = Linear {
            domain: Domain::ordinal(1, 3).unwrap(),
            weights: vec![2.0],
        };
        let interior = DiscreteState::new(vec![1], &m.domain).unwrap();
        assert_eq!(forward_difference(&m, &interior).per_coordinate(), &[2.0]);
        // At the top level the backward difference still points in the +1
        // direction for a linear energy.
        let top = DiscreteState::new(vec![2], &m.domain).unwrap();
        assert_eq!(forward_difference(&m, &top).per_coordinate(), &[2.0]);
    }

    #[test]
    fn one_hot_self_column_is_zero() {
        let m = Linear {
            domain: Domain::one_hot(2, 3).unwrap(),
            weights: vec![1.0, -1.0],
        };
        let s = DiscreteState::new(vec![1, 2], &m.domain).unwrap();
        let d = forward_difference(&m, &s);
        assert_eq!(d.level_entry(0, 1), 0.0);
        assert_eq!(d.level_entry(1, 2), 0.0);
    }
}
