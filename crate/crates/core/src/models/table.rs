use crate::domain::{state_index, DiscreteState, Domain};
use crate::error::{Error, Result};
use crate::model::EnergyModel;
use crate::multilinear::SetFunctionTable;
use crate::rng::RngStream;

/// An explicit energy per state, indexed by the lexicographic state index.
/// Mostly used as an oracle in tests and for small exact experiments.
#[derive(Debug, Clone)]
pub struct TableModel {
    domain: Domain,
    energies: Vec<f64>,
}

impl TableModel {
    pub fn new(domain: Domain, energies: Vec<f64>) -> Result<Self> {
        let expected = domain
            .state_count()
            .filter(|&n| n <= usize::MAX as u128)
            .map(|n| n as usize)
            .ok_or(Error::StateSpaceTooLarge {
                states: u128::MAX,
                cap: usize::MAX,
            })?;
        if energies.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: energies.len(),
            });
        }
        Ok(TableModel { domain, energies })
    }

    /// Binary table from a set function (energies equal the set-function
    /// values at the matching subsets).
    pub fn from_set_function(f: &SetFunctionTable) -> Result<Self> {
        TableModel::new(Domain::binary(f.dim())?, f.values().to_vec())
    }

    /// Random table with i.i.d. standard normal energies scaled by `scale`.
    pub fn random(domain: Domain, scale: f64, seed: u64) -> Result<Self> {
        let n = domain.checked_state_count(crate::domain::DEFAULT_STATE_CAP)?;
        let mut rng = RngStream::new(seed, 0);
        let energies = (0..n).map(|_| scale * rng.normal()).collect();
        TableModel::new(domain, energies)
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }
}

impl EnergyModel for TableModel {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn energy(&self, state: &DiscreteState) -> f64 {
        self.energies[state_index(state, &self.domain)]
    }
}
