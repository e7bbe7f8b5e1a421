use std::path::Path;

use crate::domain::{DiscreteState, Domain};
use crate::error::{Error, Result};
use crate::model::{EnergyModel, FlipDifferences};
use crate::rng::RngStream;

/// Two-component Gaussian mixture used to generate utility matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureParams {
    /// Weight of the first component; the second gets `1 - weight`.
    pub weight: f64,
    pub means: (f64, f64),
    pub std_devs: (f64, f64),
}

impl Default for MixtureParams {
    fn default() -> Self {
        MixtureParams {
            weight: 0.5,
            means: (0.0, 5.0),
            std_devs: (1.0, 1.0),
        }
    }
}

impl MixtureParams {
    pub fn mean(&self) -> f64 {
        self.weight * self.means.0 + (1.0 - self.weight) * self.means.1
    }
}

/// Facility location: a binary state opens a subset `S` of facilities and
///
/// `f(S) = Σ_j max_{i∈S} c_{i,j} - λ|S|`,
///
/// where each customer `j` takes the best opened facility and the max over an
/// empty selection is 0.
#[derive(Debug, Clone)]
pub struct FacilityLocationModel {
    domain: Domain,
    /// `n_facilities × m_customers`, row-major.
    utilities: Vec<f64>,
    n_facilities: usize,
    m_customers: usize,
    penalty: f64,
}

impl FacilityLocationModel {
    pub fn new(utilities: Vec<f64>, n_facilities: usize, m_customers: usize, penalty: f64) -> Result<Self> {
        if utilities.len() != n_facilities * m_customers {
            return Err(Error::DimensionMismatch {
                expected: n_facilities * m_customers,
                got: utilities.len(),
            });
        }
        if penalty < 0.0 {
            return Err(Error::OutOfRange("penalty must be nonnegative".into()));
        }
        Ok(FacilityLocationModel {
            domain: Domain::binary(n_facilities)?,
            utilities,
            n_facilities,
            m_customers,
            penalty,
        })
    }

    /// Deterministic instance with i.i.d. utilities from a two-component
    /// Gaussian mixture.
    pub fn generate(
        m_customers: usize,
        n_facilities: usize,
        mixture: &MixtureParams,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = RngStream::new(seed, 0);
        let mut utilities = Vec::with_capacity(n_facilities * m_customers);
        for _ in 0..n_facilities * m_customers {
            let pick_first = rng.uniform() < mixture.weight;
            let z = rng.normal();
            let (mu, sd) = if pick_first {
                (mixture.means.0, mixture.std_devs.0)
            } else {
                (mixture.means.1, mixture.std_devs.1)
            };
            utilities.push(mu + sd * z);
        }
        FacilityLocationModel::new(utilities, n_facilities, m_customers, 0.0).map(|mut m| {
            m.penalty = 0.0;
            m
        })
    }

    /// As [`generate`](Self::generate) but with an explicit penalty.
    pub fn generate_with_penalty(
        m_customers: usize,
        n_facilities: usize,
        mixture: &MixtureParams,
        penalty: f64,
        seed: u64,
    ) -> Result<Self> {
        let mut model = Self::generate(m_customers, n_facilities, mixture, seed)?;
        if penalty < 0.0 {
            return Err(Error::OutOfRange("penalty must be nonnegative".into()));
        }
        model.penalty = penalty;
        Ok(model)
    }

    pub fn utility(&self, facility: usize, customer: usize) -> f64 {
        self.utilities[facility * self.m_customers + customer]
    }

    pub fn n_facilities(&self) -> usize {
        self.n_facilities
    }

    pub fn m_customers(&self) -> usize {
        self.m_customers
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn set_penalty(&mut self, penalty: f64) {
        self.penalty = penalty;
    }

    /// Loads a utility matrix from CSV (rows = facilities, columns =
    /// customers, no header).
    pub fn from_csv(path: &Path, penalty: f64) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_path(path)
            .map_err(|e| Error::Parse(e.to_string()))?;
        let mut utilities = Vec::new();
        let mut m = None;
        let mut n = 0;
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            let row: Vec<f64> = record
                .iter()
                .map(|s| s.trim().parse().map_err(|e| Error::Parse(format!("{e}"))))
                .collect::<Result<_>>()?;
            if *m.get_or_insert(row.len()) != row.len() {
                return Err(Error::Parse("ragged CSV rows".into()));
            }
            utilities.extend(row);
            n += 1;
        }
        let m = m.ok_or_else(|| Error::Parse("empty CSV".into()))?;
        FacilityLocationModel::new(utilities, n, m, penalty)
    }

    /// Writes the utility matrix as CSV (rows = facilities).
    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Parse(e.to_string()))?;
        for i in 0..self.n_facilities {
            let row: Vec<String> = (0..self.m_customers)
                .map(|j| format!("{:?}", self.utility(i, j)))
                .collect();
            writer
                .write_record(&row)
                .map_err(|e| Error::Parse(e.to_string()))?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Best and second-best opened utility per customer, with the argmax
    /// facility. Empty selection yields `(0, 0, None)` by the empty-max
    /// convention.
    fn per_customer_best(&self, state: &DiscreteState) -> Vec<(f64, f64, Option<usize>)> {
        let mut best = vec![(f64::NEG_INFINITY, f64::NEG_INFINITY, None); self.m_customers];
        let mut any_open = false;
        for i in 0..self.n_facilities {
            if state.level(i) == 1 {
                any_open = true;
                for j in 0..self.m_customers {
                    let c = self.utility(i, j);
                    let slot = &mut best[j];
                    if c > slot.0 {
                        *slot = (c, slot.0, Some(i));
                    } else if c > slot.1 {
                        slot.1 = c;
                    }
                }
            }
        }
        if !any_open {
            best.fill((0.0, 0.0, None));
        }
        best
    }
}

impl EnergyModel for FacilityLocationModel {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn energy(&self, state: &DiscreteState) -> f64 {
        let open_count = state.values().iter().filter(|&&v| v == 1).count();
        if open_count == 0 {
            return 0.0;
        }
        let served: f64 = self
            .per_customer_best(state)
            .iter()
            .map(|&(b, _, _)| b)
            .sum();
        served - self.penalty * open_count as f64
    }

    fn flip_differences(&self, state: &DiscreteState) -> FlipDifferences {
        let open_count = state.values().iter().filter(|&&v| v == 1).count();
        let best = self.per_customer_best(state);
        let diffs = (0..self.n_facilities)
            .map(|u| {
                if state.level(u) == 0 {
                    // Opening u.
                    let mut delta = -self.penalty;
                    for j in 0..self.m_customers {
                        let c = self.utility(u, j);
                        delta += if open_count == 0 {
                            c // empty selection served 0
                        } else {
                            (c - best[j].0).max(0.0)
                        };
                    }
                    delta
                } else {
                    // Closing u.
                    let mut delta = self.penalty;
                    for j in 0..self.m_customers {
                        let (b, second, arg) = best[j];
                        let after = if open_count == 1 {
                            0.0
                        } else if arg == Some(u) {
                            second
                        } else {
                            b
                        };
                        delta += after - b;
                    }
                    delta
                }
            })
            .collect();
        FlipDifferences::PerCoordinate(diffs)
    }
}
