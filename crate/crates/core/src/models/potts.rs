use crate::domain::{DiscreteState, Domain};
use crate::error::{Error, Result};
use crate::model::{EnergyModel, FlipDifferences};

/// Potts model on a non-periodic 4-neighbor lattice with `L` levels.
///
/// `U(θ) = a·Σ_{(u,v)∈E} 1[θ_u = θ_v] + Σ_u bias[θ_u]`, the standard
/// equal-label coupling with a per-level bias. Uses the one-hot encoding.
#[derive(Debug, Clone)]
pub struct PottsModel {
    domain: Domain,
    height: usize,
    width: usize,
    coupling: f64,
    bias: Vec<f64>,
    neighbors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl PottsModel {
    pub fn new(height: usize, width: usize, levels: usize, coupling: f64, bias: Vec<f64>) -> Result<Self> {
        if bias.len() != levels {
            return Err(Error::DimensionMismatch {
                expected: levels,
                got: bias.len(),
            });
        }
        let d = height * width;
        let domain = Domain::one_hot(d, levels)?;
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
        Ok(PottsModel {
            domain,
            height,
            width,
            coupling,
            bias,
            neighbors,
            edges,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }
}

impl EnergyModel for PottsModel {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn energy(&self, state: &DiscreteState) -> f64 {
        let agree = self
            .edges
            .iter()
            .filter(|&&(u, v)| state.level(u) == state.level(v))
            .count() as f64;
        let field: f64 = state.values().iter().map(|&v| self.bias[v as usize]).sum();
        self.coupling * agree + field
    }

    fn flip_differences(&self, state: &DiscreteState) -> FlipDifferences {
        let levels = self.domain.levels();
        let d = self.domain.dim();
        let mut diffs = vec![0.0; d * levels];
        for u in 0..d {
            let current = state.level(u);
            // Count neighbors at each level once per site.
            let mut counts = vec![0usize; levels];
            for &v in &self.neighbors[u] {
                counts[state.level(v)] += 1;
            }
            for l in 0..levels {
                if l != current {
                    diffs[u * levels + l] = self.coupling
                        * (counts[l] as f64 - counts[current] as f64)
                        + self.bias[l]
                        - self.bias[current];
                }
            }
        }
        FlipDifferences::PerLevel { diffs, levels }
    }
}
