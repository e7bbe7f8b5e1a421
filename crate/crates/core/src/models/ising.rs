use nalgebra::{DMatrix, DVector};

use crate::domain::{DiscreteState, Domain};
use crate::error::Result;
use crate::model::{EnergyModel, FlipDifferences};
use crate::models::QuadraticModel;

/// Ising model on a non-periodic 4-neighbor lattice.
///
/// States are bits; spins are `s = 2θ - 1 ∈ {-1,+1}`. The energy is
/// `U(θ) = a·Σ_{(u,v)∈E} s_u s_v + b·Σ_u s_u`.
#[derive(Debug, Clone)]
pub struct IsingModel {
    domain: Domain,
    height: usize,
    width: usize,
    coupling: f64,
    bias: f64,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl IsingModel {
    pub fn new(height: usize, width: usize, coupling: f64, bias: f64) -> Result<Self> {
        let d = height * width;
        let domain = Domain::binary(d)?;
        let site = |r: usize, c: usize| r * width + c;
        let mut edges = Vec::new();
        for r in 0..height {
            for c in 0..width {
                if c + 1 < width {
                    edges.push((site(r, c), site(r, c + 1)));
                }
                if r + 1 < height {
                    edges.push((site(r, c), site(r + 1, c)));
                }
            }
        }
        let mut neighbors = vec![Vec::new(); d];
        for &(u, v) in &edges {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        Ok(IsingModel {
            domain,
            height,
            width,
            coupling,
            bias,
            edges,
            neighbors,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn spin(state: &DiscreteState, u: usize) -> f64 {
        2.0 * state.level(u) as f64 - 1.0
    }

    /// Certified quadratic form `(A, b, c)` with
    /// `U(θ) = θᵀAθ + bᵀθ + c` for all vertex states, obtained by expanding
    /// `s = 2θ - 1`. `A` is symmetric with a zero diagonal.
    pub fn quadratic_form(&self) -> (DMatrix<f64>, DVector<f64>, f64) {
        let d = self.domain.dim();
        let mut a = DMatrix::zeros(d, d);
        let mut b = DVector::from_element(d, 2.0 * self.bias);
        let mut c = -self.bias * d as f64;
        for &(u, v) in &self.edges {
            a[(u, v)] += 2.0 * self.coupling;
            a[(v, u)] += 2.0 * self.coupling;
            b[u] -= 2.0 * self.coupling;
            b[v] -= 2.0 * self.coupling;
            c += self.coupling;
        }
        (a, b, c)
    }

    /// The quadratic energy `θᵀAθ + bᵀθ` as a model; its target distribution
    /// equals this model's (the dropped constant only rescales `Z`).
    pub fn to_quadratic(&self) -> QuadraticModel {
        let (a, b, _) = self.quadratic_form();
        QuadraticModel::new(a, b).expect("Ising quadratic form is zero-diagonal")
    }
}

impl EnergyModel for IsingModel {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn energy(&self, state: &DiscreteState) -> f64 {
        let pair: f64 = self
            .edges
            .iter()
            .map(|&(u, v)| Self::spin(state, u) * Self::spin(state, v))
            .sum();
        let field: f64 = (0..self.domain.dim()).map(|u| Self::spin(state, u)).sum();
        self.coupling * pair + self.bias * field
    }

    fn flip_differences(&self, state: &DiscreteState) -> FlipDifferences {
        // Flipping site u: ΔU = -2 s_u (a Σ_{v∈N(u)} s_v + b), O(1) per site.
        let diffs = (0..self.domain.dim())
            .map(|u| {
                let local: f64 = self.neighbors[u].iter().map(|&v| Self::spin(state, v)).sum();
                -2.0 * Self::spin(state, u) * (self.coupling * local + self.bias)
            })
            .collect();
        FlipDifferences::PerCoordinate(diffs)
    }
}
