//! Multilinear extension of set functions and its categorical generalization.
//!
//! The multilinear extension of `f: 2^D -> R` is the unique multilinear
//! polynomial over `[0,1]^d` agreeing with `f` on the hypercube vertices; it
//! equals the expectation of `f` under independent Bernoulli marginals. The
//! categorical generalization replaces Bernoulli marginals with per-coordinate
//! categorical marginals.

use std::io::BufRead;

use crate::domain::{enumerate_states_capped, DiscreteState, Domain, DEFAULT_STATE_CAP};
use crate::error::{Error, Result};
use crate::model::EnergyModel;

/// Hard cap on dimensions for explicit set-function tables (2^20 entries).
pub const MAX_TABLE_DIM: usize = 20;

/// An explicit table of a set function over all subsets of `{0,…,d-1}`.
///
/// Entry order matches the lexicographic state enumeration: the subset's
/// indicator vector read with coordinate 0 as the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFunctionTable {
    dim: usize,
    values: Vec<f64>,
}

impl SetFunctionTable {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim > MAX_TABLE_DIM {
            return Err(Error::InvalidDomain(format!(
                "set-function table dimension must be in [1, {MAX_TABLE_DIM}]"
            )));
        }
        if values.len() != 1 << dim {
            return Err(Error::DimensionMismatch {
                expected: 1 << dim,
                got: values.len(),
            });
        }
        Ok(SetFunctionTable { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at the subset encoded by `mask` (coordinate 0 = most significant
    /// bit, matching the state enumeration order).
    pub fn value(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    /// Membership of coordinate `i` in the subset encoded by `mask`.
    pub fn contains(&self, mask: usize, i: usize) -> bool {
        mask >> (self.dim - 1 - i) & 1 == 1
    }

    /// Parses lines of the form `bitstring value`, e.g. `0110 2.5`. The
    /// leftmost bit is coordinate 0. Every subset must appear exactly once.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut dim = None;
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let bits = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing bitstring", lineno + 1)))?;
            let value: f64 = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing value", lineno + 1)))?
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let d = bits.len();
            if *dim.get_or_insert(d) != d {
                return Err(Error::Parse(format!(
                    "line {}: inconsistent bitstring length",
                    lineno + 1
                )));
            }
            let mut mask = 0usize;
            for c in bits.chars() {
                mask = mask << 1
                    | match c {
                        '0' => 0,
                        '1' => 1,
                        _ => {
                            return Err(Error::Parse(format!(
                                "line {}: invalid bit '{c}'",
                                lineno + 1
                            )))
                        }
                    };
            }
            entries.push((mask, value));
        }
        let dim = dim.ok_or_else(|| Error::Parse("empty set-function file".into()))?;
        if dim > MAX_TABLE_DIM {
            return Err(Error::InvalidDomain(format!(
                "bitstring length {dim} exceeds {MAX_TABLE_DIM}"
            )));
        }
        let mut values = vec![f64::NAN; 1 << dim];
        for (mask, v) in entries {
            values[mask] = v;
        }
        if let Some(missing) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::Parse(format!("missing subset {missing:0>width$b}", width = dim)));
        }
        SetFunctionTable::new(dim, values)
    }
}

/// Exact multilinear extension `F(θ) = Σ_S f(S) Π_{i∈S} θ_i Π_{i∉S} (1-θ_i)`.
pub fn multilinear_extension(f: &SetFunctionTable, theta: &[f64]) -> Result<f64> {
    if theta.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: theta.len(),
        });
    }
    if theta.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
        return Err(Error::OutOfRange("θ outside the unit cube".into()));
    }
    let mut total = 0.0;
    for mask in 0..f.values().len() {
        let mut weight = 1.0;
        for (i, &t) in theta.iter().enumerate() {
            weight *= if f.contains(mask, i) { t } else { 1.0 - t };
        }
        total += f.value(mask) * weight;
    }
    Ok(total)
}

/// Gradient of the multilinear extension; entry `i` is the difference of the
/// extension with `θ_i` pinned to 1 and to 0 (F is linear in each coordinate).
pub fn multilinear_gradient(f: &SetFunctionTable, theta: &[f64]) -> Result<Vec<f64>> {
    let mut grad = Vec::with_capacity(f.dim());
    let mut work = theta.to_vec();
    for i in 0..f.dim() {
        let orig = work[i];
        work[i] = 1.0;
        let hi = multilinear_extension(f, &work)?;
        work[i] = 0.0;
        let lo = multilinear_extension(f, &work)?;
        work[i] = orig;
        grad.push(hi - lo);
    }
    Ok(grad)
}

/// Per-coordinate categorical marginals: a `d × (L-1)` matrix of level
/// probabilities with each row in the (L-1)-simplex. Level 0 carries the
/// remaining mass `1 - Σ_j ρ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalVector {
    dim: usize,
    levels: usize,
    rows: Vec<f64>,
}

const SIMPLEX_TOL: f64 = 1e-12;

impl MarginalVector {
    /// `rows` is row-major `d × (L-1)`.
    pub fn new(dim: usize, levels: usize, rows: Vec<f64>) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidDomain("levels must be at least 2".into()));
        }
        if rows.len() != dim * (levels - 1) {
            return Err(Error::DimensionMismatch {
                expected: dim * (levels - 1),
                got: rows.len(),
            });
        }
        for i in 0..dim {
            let row = &rows[i * (levels - 1)..(i + 1) * (levels - 1)];
            if row.iter().any(|&p| p < -SIMPLEX_TOL) {
                return Err(Error::InvalidSimplexRow {
                    row: i,
                    reason: "negative entry".into(),
                });
            }
            let sum: f64 = row.iter().sum();
            if sum > 1.0 + SIMPLEX_TOL {
                return Err(Error::InvalidSimplexRow {
                    row: i,
                    reason: format!("row sum {sum} exceeds 1"),
                });
            }
        }
        Ok(MarginalVector { dim, levels, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Probability that coordinate `i` takes `level`.
    pub fn prob(&self, i: usize, level: usize) -> f64 {
        let row = &self.rows[i * (self.levels - 1)..(i + 1) * (self.levels - 1)];
        if level == 0 {
            (1.0 - row.iter().sum::<f64>()).max(0.0)
        } else {
            row[level - 1]
        }
    }

    /// Copy with row `i` pinned to the unit vector of `level` (level 0 means
    /// the zero vector, i.e. all mass on level 0).
    pub fn with_row_pinned(&self, i: usize, level: usize) -> Self {
        let mut rows = self.rows.clone();
        let row = &mut rows[i * (self.levels - 1)..(i + 1) * (self.levels - 1)];
        row.fill(0.0);
        if level > 0 {
            row[level - 1] = 1.0;
        }
        MarginalVector {
            dim: self.dim,
            levels: self.levels,
            rows,
        }
    }
}

/// Generalized multilinear extension: the exact expectation of the energy
/// under independent per-coordinate categorical marginals.
pub fn generalized_multilinear_extension<M: EnergyModel + ?Sized>(
    model: &M,
    rho: &MarginalVector,
) -> Result<f64> {
    generalized_multilinear_extension_capped(model, rho, DEFAULT_STATE_CAP)
}

pub fn generalized_multilinear_extension_capped<M: EnergyModel + ?Sized>(
    model: &M,
    rho: &MarginalVector,
    cap: usize,
) -> Result<f64> {
    let domain = *model.domain();
    if rho.dim() != domain.dim() || rho.levels() != domain.levels() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: rho.dim(),
        });
    }
    let mut total = 0.0;
    for state in enumerate_states_capped(&domain, cap)? {
        let mut weight = 1.0;
        for i in 0..domain.dim() {
            weight *= rho.prob(i, state.level(i));
            if weight == 0.0 {
                break;
            }
        }
        if weight != 0.0 {
            total += weight * model.energy(&state);
        }
    }
    Ok(total)
}

/// Partial derivative of the generalized extension in direction `(i, level)`,
/// `1 ≤ level ≤ L-1`: the difference of two extensions with row `i` pinned to
/// the level's unit vector and to the zero vector.
pub fn generalized_partial_derivative<M: EnergyModel + ?Sized>(
    model: &M,
    rho: &MarginalVector,
    i: usize,
    level: usize,
) -> Result<f64> {
    if level == 0 || level >= rho.levels() {
        return Err(Error::OutOfRange(format!(
            "level must be in [1, {}]",
            rho.levels() - 1
        )));
    }
    let hi = generalized_multilinear_extension(model, &rho.with_row_pinned(i, level))?;
    let lo = generalized_multilinear_extension(model, &rho.with_row_pinned(i, 0))?;
    Ok(hi - lo)
}

/// Vertex marginals corresponding to a concrete state.
pub fn vertex_marginals(state: &DiscreteState, domain: &Domain) -> MarginalVector {
    let levels = domain.levels();
    let mut rows = vec![0.0; domain.dim() * (levels - 1)];
    for i in 0..domain.dim() {
        let l = state.level(i);
        if l > 0 {
            rows[i * (levels - 1) + l - 1] = 1.0;
        }
    }
    MarginalVector::new(domain.dim(), levels, rows).expect("vertex marginals are valid")
}
