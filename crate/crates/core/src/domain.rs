//! Factorized discrete domains `{0,…,L-1}^d` and their enumeration.
//!
//! States are enumerated in lexicographic order of the value vector
//! (coordinate 0 is the most significant digit), so kernel matrix indices
//! are reproducible across runs and implementations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How coordinate values are interpreted by proposals and distance terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    /// Two levels, flip semantics. Requires `levels == 2`.
    Binary,
    /// Integer levels with an ordering; distances use the integer metric.
    Ordinal,
    /// Unordered categorical levels; distances use one-hot geometry.
    OneHot,
}

/// Default cap on the number of states for exact enumeration.
pub const DEFAULT_STATE_CAP: usize = 1 << 20;

/// A product domain with `dim` coordinates, each over `levels` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    dim: usize,
    levels: usize,
    encoding: Encoding,
}

impl Domain {
    pub fn new(dim: usize, levels: usize, encoding: Encoding) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDomain("dimension must be positive".into()));
        }
        if levels < 2 {
            return Err(Error::InvalidDomain("levels must be at least 2".into()));
        }
        if levels > u8::MAX as usize + 1 {
            return Err(Error::InvalidDomain("levels must fit in a byte".into()));
        }
        if encoding == Encoding::Binary && levels != 2 {
            return Err(Error::InvalidDomain(
                "binary encoding requires exactly 2 levels".into(),
            ));
        }
        Ok(Domain {
            dim,
            levels,
            encoding,
        })
    }

    pub fn binary(dim: usize) -> Result<Self> {
        Domain::new(dim, 2, Encoding::Binary)
    }

    pub fn ordinal(dim: usize, levels: usize) -> Result<Self> {
        Domain::new(dim, levels, Encoding::Ordinal)
    }

    pub fn one_hot(dim: usize, levels: usize) -> Result<Self> {
        Domain::new(dim, levels, Encoding::OneHot)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    /// Total state count `L^d`, or `None` on overflow.
    pub fn state_count(&self) -> Option<u128> {
        (self.levels as u128).checked_pow(u32::try_from(self.dim).ok()?)
    }

    /// State count checked against an enumeration cap.
    pub fn checked_state_count(&self, cap: usize) -> Result<usize> {
        let n = self.state_count().unwrap_or(u128::MAX);
        if n > cap as u128 {
            return Err(Error::StateSpaceTooLarge { states: n, cap });
        }
        Ok(n as usize)
    }

    /// Squared Euclidean distance between two states under this encoding.
    ///
    /// Binary and ordinal use the integer-vector metric; one-hot uses the
    /// squared distance between one-hot vectors (2 per changed coordinate).
    pub fn squared_distance(&self, a: &DiscreteState, b: &DiscreteState) -> f64 {
        match self.encoding {
            Encoding::Binary | Encoding::Ordinal => a
                .values()
                .iter()
                .zip(b.values())
                .map(|(&x, &y)| {
                    let d = x as f64 - y as f64;
                    d * d
                })
                .sum(),
            Encoding::OneHot => {
                2.0 * a
                    .values()
                    .iter()
                    .zip(b.values())
                    .filter(|(x, y)| x != y)
                    .count() as f64
            }
        }
    }
}

/// A point of the domain: a length-d vector of levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscreteState {
    values: Vec<u8>,
}

impl DiscreteState {
    pub fn new(values: Vec<u8>, domain: &Domain) -> Result<Self> {
        if values.len() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: values.len(),
            });
        }
        if let Some(&v) = values.iter().find(|&&v| v as usize >= domain.levels()) {
            return Err(Error::InvalidState(format!(
                "level {v} out of range [0, {})",
                domain.levels()
            )));
        }
        Ok(DiscreteState { values })
    }

    /// All-zeros state.
    pub fn zeros(domain: &Domain) -> Self {
        DiscreteState {
            values: vec![0; domain.dim()],
        }
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn level(&self, i: usize) -> usize {
        self.values[i] as usize
    }

    pub fn set_level(&mut self, i: usize, level: usize) {
        self.values[i] = level as u8;
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Copy with coordinate `i` set to `level`.
    pub fn with_level(&self, i: usize, level: usize) -> Self {
        let mut s = self.clone();
        s.set_level(i, level);
        s
    }

    /// Number of coordinates where `self` and `other` differ.
    pub fn hamming_distance(&self, other: &DiscreteState) -> usize {
        self.values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// All `L^d` states in lexicographic order, using the default cap.
pub fn enumerate_states(domain: &Domain) -> Result<Vec<DiscreteState>> {
    enumerate_states_capped(domain, DEFAULT_STATE_CAP)
}

/// All `L^d` states in lexicographic order, with an explicit cap.
pub fn enumerate_states_capped(domain: &Domain, cap: usize) -> Result<Vec<DiscreteState>> {
    let n = domain.checked_state_count(cap)?;
    (0..n).map(|i| index_state(i, domain)).collect()
}

/// Lexicographic index of a state: base-L encoding, coordinate 0 most
/// significant.
pub fn state_index(state: &DiscreteState, domain: &Domain) -> usize {
    let mut idx = 0usize;
    for &v in state.values() {
        idx = idx * domain.levels() + v as usize;
    }
    idx
}

/// Inverse of [`state_index`].
pub fn index_state(index: usize, domain: &Domain) -> Result<DiscreteState> {
    let size = domain
        .state_count()
        .filter(|&n| n <= usize::MAX as u128)
        .map(|n| n as usize)
        .unwrap_or(usize::MAX);
    if index >= size {
        return Err(Error::IndexOutOfRange { index, size });
    }
    let mut values = vec![0u8; domain.dim()];
    let mut rem = index;
    for i in (0..domain.dim()).rev() {
        values[i] = (rem % domain.levels()) as u8;
        rem /= domain.levels();
    }
    Ok(DiscreteState { values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_base_cases() {
        let d1 = Domain::binary(1).unwrap();
        let states = enumerate_states(&d1).unwrap();
        assert_eq!(
            states.iter().map(|s| s.values().to_vec()).collect::<Vec<_>>(),
            vec![vec![0], vec![1]]
        );

        let d2 = Domain::binary(2).unwrap();
        let states = enumerate_states(&d2).unwrap();
        assert_eq!(
            states.iter().map(|s| s.values().to_vec()).collect::<Vec<_>>(),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );

        let d3 = Domain::ordinal(2, 3).unwrap();
        let states = enumerate_states(&d3).unwrap();
        assert_eq!(states.len(), 9);
        assert_eq!(states[0].values(), &[0, 0]);
        assert_eq!(states[1].values(), &[0, 1]);
        assert_eq!(states[2].values(), &[0, 2]);
    }

    #[test]
    fn index_examples() {
        let d2 = Domain::binary(2).unwrap();
        let s = DiscreteState::new(vec![1, 1], &d2).unwrap();
        assert_eq!(state_index(&s, &d2), 3);

        let d3 = Domain::ordinal(2, 3).unwrap();
        let s = DiscreteState::new(vec![0, 2], &d3).unwrap();
        assert_eq!(state_index(&s, &d3), 2);
    }

    #[test]
    fn index_round_trip() {
        let domain = Domain::binary(3).unwrap();
        for s in enumerate_states(&domain).unwrap() {
            let back = index_state(state_index(&s, &domain), &domain).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn cap_enforced() {
        let domain = Domain::binary(30).unwrap();
        let err = enumerate_states_capped(&domain, 1 << 20).unwrap_err();
        assert!(matches!(err, Error::StateSpaceTooLarge { .. }));
    }

    #[test]
    fn binary_requires_two_levels() {
        assert!(Domain::new(3, 3, Encoding::Binary).is_err());
    }

    #[test]
    fn out_of_range_index_rejected() {
        let domain = Domain::binary(2).unwrap();
        assert!(index_state(4, &domain).is_err());
    }

    #[test]
    fn one_hot_distance() {
        let domain = Domain::one_hot(3, 3).unwrap();
        let a = DiscreteState::new(vec![0, 1, 2], &domain).unwrap();
        let b = DiscreteState::new(vec![0, 2, 0], &domain).unwrap();
        assert_eq!(domain.squared_distance(&a, &b), 4.0);
    }
}
