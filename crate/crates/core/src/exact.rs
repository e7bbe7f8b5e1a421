//! Exact transition-matrix analysis on enumerable state spaces.
//!
//! Everything here materializes the `n × n` kernel (`n = L^d`) and is meant
//! for validation on small models: stationary distributions, detailed
//! balance, spectral gaps, asymptotic variances, and the two quantitative
//! guarantees of the coordinatewise proposal — the stationarity bias bound of
//! the uncorrected chain on second-order modular energies, and the spectral
//! comparison between the corrected coordinatewise kernel and the
//! full-space informed kernel it approximates.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::domain::{
    enumerate_states_capped, DiscreteState, Domain, Encoding, DEFAULT_STATE_CAP,
};
use crate::error::{Error, Result};
use crate::model::{level_difference_matrix, EnergyModel, FlipDifferences};
use crate::models::QuadraticModel;
use crate::proposal::{lb_proposal, newton_proposal};

/// Which exact kernel to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    /// The uncorrected coordinatewise proposal used directly as the kernel.
    UnadjustedProposal,
    /// The coordinatewise proposal with Metropolis–Hastings correction.
    AdjustedProposal,
    /// Window-1 locally-balanced proposal with correction.
    LocallyBalancedMh,
    /// Full-space informed proposal (all states in the window) with
    /// correction; the reference kernel of the spectral comparison.
    FullSpaceMh,
}

/// A dense row-stochastic transition matrix over the enumerated state space.
#[derive(Debug, Clone)]
pub struct DenseKernel {
    pub domain: Domain,
    pub matrix: DMatrix<f64>,
}

impl DenseKernel {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Max deviation of any row sum from 1.
    pub fn row_sum_residual(&self) -> f64 {
        (0..self.n())
            .map(|i| (self.matrix.row(i).sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// The target distribution `π ∝ exp(U)` by enumeration.
pub fn target_distribution<M: EnergyModel + ?Sized>(model: &M) -> Result<Vec<f64>> {
    target_distribution_capped(model, DEFAULT_STATE_CAP)
}

pub fn target_distribution_capped<M: EnergyModel + ?Sized>(
    model: &M,
    cap: usize,
) -> Result<Vec<f64>> {
    let states = enumerate_states_capped(model.domain(), cap)?;
    let energies: Vec<f64> = states.iter().map(|s| model.energy(s)).collect();
    let max = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut weights: Vec<f64> = energies.iter().map(|&u| (u - max).exp()).collect();
    let z: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= z;
    }
    Ok(weights)
}

/// Exact kernel of the uncorrected coordinatewise chain: row `x` is the
/// product of the per-coordinate proposal rows at `x`.
pub fn build_unadjusted_kernel<M: EnergyModel + ?Sized>(
    model: &M,
    alpha: f64,
    cap: usize,
) -> Result<DenseKernel> {
    let domain = *model.domain();
    let states = enumerate_states_capped(&domain, cap)?;
    let n = states.len();
    let mut k = DMatrix::zeros(n, n);
    for (xi, x) in states.iter().enumerate() {
        let q = newton_proposal(model, x, alpha);
        for (yi, y) in states.iter().enumerate() {
            let mut p = 1.0;
            for i in 0..domain.dim() {
                p *= q.prob(i, y.level(i));
            }
            k[(xi, yi)] = p;
        }
    }
    Ok(DenseKernel { domain, matrix: k })
}

/// Row-stochastic matrix of the full-space informed proposal
/// `q(y|x) ∝ exp(½(U(y) - U(x)) - ‖y-x‖²/(2α))`, normalized over all states.
pub fn build_full_space_proposal<M: EnergyModel + ?Sized>(
    model: &M,
    alpha: f64,
    cap: usize,
) -> Result<DenseKernel> {
    let domain = *model.domain();
    let states = enumerate_states_capped(&domain, cap)?;
    let n = states.len();
    let energies: Vec<f64> = states.iter().map(|s| model.energy(s)).collect();
    let mut k = DMatrix::zeros(n, n);
    for xi in 0..n {
        let mut row = Vec::with_capacity(n);
        for yi in 0..n {
            let dist = domain.squared_distance(&states[xi], &states[yi]);
            row.push(0.5 * (energies[yi] - energies[xi]) - dist / (2.0 * alpha));
        }
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for v in &mut row {
            *v = (*v - max).exp();
            z += *v;
        }
        for (yi, v) in row.iter().enumerate() {
            k[(xi, yi)] = v / z;
        }
    }
    Ok(DenseKernel { domain, matrix: k })
}

/// Row-stochastic matrix of the window-1 locally-balanced proposal.
pub fn build_lb_proposal_matrix<M: EnergyModel + ?Sized>(
    model: &M,
    cap: usize,
) -> Result<DenseKernel> {
    let domain = *model.domain();
    let states = enumerate_states_capped(&domain, cap)?;
    let n = states.len();
    let mut k = DMatrix::zeros(n, n);
    for (xi, x) in states.iter().enumerate() {
        let lb = lb_proposal(model, x);
        for (idx, &(i, l)) in lb.moves().iter().enumerate() {
            let y = x.with_level(i, l);
            let yi = crate::domain::state_index(&y, &domain);
            k[(xi, yi)] = lb.probs()[idx];
        }
    }
    Ok(DenseKernel { domain, matrix: k })
}

/// Metropolizes a proposal matrix against `pi`: off-diagonal
/// `K(x,y) = q(x,y)·min(1, π(y)q(y,x) / (π(x)q(x,y)))`, rejection mass on the
/// diagonal.
pub fn build_mh_kernel(proposal: &DenseKernel, pi: &[f64]) -> Result<DenseKernel> {
    let n = proposal.n();
    if pi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: pi.len(),
        });
    }
    let q = &proposal.matrix;
    let mut k = DMatrix::zeros(n, n);
    for x in 0..n {
        let mut off = 0.0;
        for y in 0..n {
            if y == x {
                continue;
            }
            let forward = pi[x] * q[(x, y)];
            let backward = pi[y] * q[(y, x)];
            let move_prob = if forward > 0.0 {
                q[(x, y)] * (backward / forward).min(1.0)
            } else {
                0.0
            };
            k[(x, y)] = move_prob;
            off += move_prob;
        }
        k[(x, x)] = (1.0 - off).max(0.0);
    }
    Ok(DenseKernel {
        domain: proposal.domain,
        matrix: k,
    })
}

/// Builds the exact kernel of the requested kind.
pub fn build_kernel<M: EnergyModel + ?Sized>(
    model: &M,
    kind: KernelKind,
    alpha: f64,
    cap: usize,
) -> Result<DenseKernel> {
    match kind {
        KernelKind::UnadjustedProposal => build_unadjusted_kernel(model, alpha, cap),
        KernelKind::AdjustedProposal => {
            let q = build_unadjusted_kernel(model, alpha, cap)?;
            build_mh_kernel(&q, &target_distribution_capped(model, cap)?)
        }
        KernelKind::LocallyBalancedMh => {
            let q = build_lb_proposal_matrix(model, cap)?;
            build_mh_kernel(&q, &target_distribution_capped(model, cap)?)
        }
        KernelKind::FullSpaceMh => {
            let q = build_full_space_proposal(model, alpha, cap)?;
            build_mh_kernel(&q, &target_distribution_capped(model, cap)?)
        }
    }
}

/// Stationary distribution by left power iteration to residual `tol`.
pub fn stationary_distribution(kernel: &DenseKernel, tol: f64) -> Result<Vec<f64>> {
    let n = kernel.n();
    let k = &kernel.matrix;
    let mut p = DVector::from_element(n, 1.0 / n as f64);
    let max_iters = 1_000_000usize;
    for _ in 0..max_iters {
        let next = k.transpose() * &p;
        let next = &next / next.sum();
        let residual = (&next - &p).abs().max();
        p = next;
        if residual <= tol {
            return Ok(p.iter().cloned().collect());
        }
    }
    Err(Error::NonConvergence(max_iters))
}

/// Max absolute detailed-balance violation
/// `|π(x)K(x,y) - π(y)K(y,x)|` over all pairs.
pub fn detailed_balance_residual(kernel: &DenseKernel, pi: &[f64]) -> f64 {
    let n = kernel.n();
    let k = &kernel.matrix;
    let mut worst = 0.0f64;
    for x in 0..n {
        for y in (x + 1)..n {
            worst = worst.max((pi[x] * k[(x, y)] - pi[y] * k[(y, x)]).abs());
        }
    }
    worst
}

/// Spectrum of a reversible kernel: eigenvalues in descending order with the
/// matching eigenvectors of the π-symmetrized matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors of `D_π^{1/2} K D_π^{-1/2}`, aligned with
    /// `eigenvalues`.
    pub vectors: DMatrix<f64>,
}

/// Eigendecomposition of `D_π^{1/2} K D_π^{-1/2}`; errors when the kernel is
/// not reversible with respect to `pi` (symmetrization residual above
/// `reversibility_tol`).
pub fn spectrum(kernel: &DenseKernel, pi: &[f64], reversibility_tol: f64) -> Result<Spectrum> {
    let n = kernel.n();
    let k = &kernel.matrix;
    let sqrt_pi: Vec<f64> = pi.iter().map(|&p| p.sqrt()).collect();
    let mut s = DMatrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            s[(x, y)] = sqrt_pi[x] * k[(x, y)] / sqrt_pi[y];
        }
    }
    let asym = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| (s[(x, y)] - s[(y, x)]).abs())
        .fold(0.0, f64::max);
    if asym > reversibility_tol {
        return Err(Error::NonReversibleKernel(asym));
    }
    let sym = (&s + s.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    Ok(Spectrum {
        eigenvalues,
        vectors,
    })
}

/// Spectral gap `1 - λ₂` of a reversible kernel.
pub fn spectral_gap(kernel: &DenseKernel, pi: &[f64], reversibility_tol: f64) -> Result<f64> {
    let spec = spectrum(kernel, pi, reversibility_tol)?;
    let gap = 1.0 - spec.eigenvalues[1];
    debug_assert!((-1e-9..=2.0 + 1e-9).contains(&gap));
    Ok(gap)
}

/// Asymptotic variance of the ergodic average of `h` under a reversible
/// kernel, `Σ_{i≥2} (1+λᵢ)/(1-λᵢ) · ⟨h, φᵢ⟩²_π`.
pub fn asymptotic_variance(
    kernel: &DenseKernel,
    pi: &[f64],
    h: &[f64],
    reversibility_tol: f64,
) -> Result<f64> {
    let n = kernel.n();
    if h.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: h.len(),
        });
    }
    let spec = spectrum(kernel, pi, reversibility_tol)?;
    let mean: f64 = h.iter().zip(pi).map(|(&v, &p)| v * p).sum();
    // ⟨h, φᵢ⟩_π = (D_π^{1/2} h_centered) · vᵢ in the symmetrized basis.
    let weighted = DVector::from_iterator(
        n,
        h.iter().zip(pi).map(|(&v, &p)| (v - mean) * p.sqrt()),
    );
    let mut var = 0.0;
    for i in 1..n {
        let lambda = spec.eigenvalues[i];
        if lambda >= 1.0 - 1e-12 {
            return Err(Error::DegenerateSpectrum);
        }
        let coeff = weighted.dot(&spec.vectors.column(i));
        var += (1.0 + lambda) / (1.0 - lambda) * coeff * coeff;
    }
    Ok(var)
}

/// Stationary variance `var_π(h)`.
pub fn stationary_variance(pi: &[f64], h: &[f64]) -> f64 {
    let mean: f64 = h.iter().zip(pi).map(|(&v, &p)| v * p).sum();
    h.iter()
        .zip(pi)
        .map(|(&v, &p)| p * (v - mean) * (v - mean))
        .sum()
}

/// First-order approximation `Δ[U](x)ᵀ(y - x)` of the energy difference, in
/// the geometry of the domain encoding.
fn first_order_estimate<M: EnergyModel + ?Sized>(
    model: &M,
    x: &DiscreteState,
    y: &DiscreteState,
    diffs: &FlipDifferences,
) -> f64 {
    let domain = model.domain();
    match domain.encoding() {
        Encoding::Binary => {
            let flip = diffs.per_coordinate();
            (0..domain.dim())
                .map(|i| {
                    // Plus-direction difference times the signed step.
                    let plus = flip[i] * (1.0 - 2.0 * x.level(i) as f64);
                    plus * (y.level(i) as f64 - x.level(i) as f64)
                })
                .sum()
        }
        Encoding::Ordinal => {
            let delta = diffs.per_coordinate();
            (0..domain.dim())
                .map(|i| delta[i] * (y.level(i) as f64 - x.level(i) as f64))
                .sum()
        }
        Encoding::OneHot => {
            // ⟨per-level differences, e_{y_i} - e_{x_i}⟩; the entry at the
            // current level is zero.
            let matrix = level_difference_matrix(model, x);
            let levels = domain.levels();
            (0..domain.dim())
                .map(|i| matrix[i * levels + y.level(i)])
                .sum()
        }
    }
}

/// Worst-case curvature of the energy relative to its first-order estimate:
/// `max_{x≠y} 2·|U(y) - U(x) - Δ[U](x)ᵀ(y-x)| / ‖y-x‖²` over all ordered
/// state pairs.
pub fn lipschitz_constant<M: EnergyModel + ?Sized>(model: &M, cap: usize) -> Result<f64> {
    let states = enumerate_states_capped(model.domain(), cap)?;
    let energies: Vec<f64> = states.iter().map(|s| model.energy(s)).collect();
    let mut worst = 0.0f64;
    for (xi, x) in states.iter().enumerate() {
        let diffs = model.flip_differences(x);
        for (yi, y) in states.iter().enumerate() {
            if xi == yi {
                continue;
            }
            let actual = energies[yi] - energies[xi];
            let estimate = first_order_estimate(model, x, y, &diffs);
            let dist2 = model.domain().squared_distance(x, y);
            worst = worst.max(2.0 * (actual - estimate).abs() / dist2);
        }
    }
    Ok(worst)
}

/// Squared diameter `max_{x,y} ‖x - y‖²` of the domain.
pub fn squared_diameter(domain: &Domain) -> f64 {
    match domain.encoding() {
        Encoding::Binary => domain.dim() as f64,
        Encoding::Ordinal => domain.dim() as f64 * ((domain.levels() - 1) as f64).powi(2),
        Encoding::OneHot => 2.0 * domain.dim() as f64,
    }
}

/// Closed-form stationary distribution of the uncorrected coordinatewise
/// chain on a quadratic energy `F(θ) = θᵀAθ + bᵀθ`:
/// `π_α(θ) ∝ exp(F(θ)) · Σ_y exp(½(F(y)-F(θ)) - (y-θ)ᵀ(A_s/2 + I/(2α))(y-θ))`.
pub fn closed_form_stationary(model: &QuadraticModel, alpha: f64) -> Result<Vec<f64>> {
    let domain = *model.domain();
    let states = enumerate_states_capped(&domain, DEFAULT_STATE_CAP)?;
    let energies: Vec<f64> = states.iter().map(|s| model.energy(s)).collect();
    let a_sym = model.symmetric_matrix();
    let d = domain.dim();
    let mut weights = Vec::with_capacity(states.len());
    for (xi, x) in states.iter().enumerate() {
        let mut z = 0.0;
        for (yi, y) in states.iter().enumerate() {
            let diff = DVector::from_iterator(
                d,
                (0..d).map(|i| y.level(i) as f64 - x.level(i) as f64),
            );
            let quad = (diff.transpose() * &a_sym * &diff)[(0, 0)] * 0.5
                + diff.norm_squared() / (2.0 * alpha);
            z += (0.5 * (energies[yi] - energies[xi]) - quad).exp();
        }
        weights.push(energies[xi].exp() * z);
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(weights)
}

/// Total-variation-style L1 distance between two distributions.
pub fn l1_distance(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(&a, &b)| (a - b).abs()).sum()
}

/// One stepsize's worth of stationarity-bias evidence for the uncorrected
/// coordinatewise chain on a quadratic energy.
#[derive(Debug, Clone, Serialize)]
pub struct StationarityBiasReport {
    pub alpha: f64,
    /// ‖π_α - π‖₁ with π_α the kernel's stationary distribution.
    pub l1_distance: f64,
    /// The analytic bound `Z·exp(-1/(2α) - λ_min/2)`.
    pub bound: f64,
    pub lambda_min: f64,
    /// Detailed balance residual of the kernel against the closed-form π_α.
    pub reversibility_residual: f64,
    /// ‖π_α(power iteration) - π_α(closed form)‖₁.
    pub closed_form_l1: f64,
}

/// Checks the stationarity-bias bound of the uncorrected chain on a
/// quadratic energy across stepsizes. Reports are ordered like `alphas`.
pub fn verify_stationarity_bias(
    model: &QuadraticModel,
    alphas: &[f64],
) -> Result<Vec<StationarityBiasReport>> {
    let pi = target_distribution(model)?;
    let a_sym = model.symmetric_matrix();
    let lambda_min = a_sym
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    // Unnormalized mass Z = Σ exp(F).
    let states = enumerate_states_capped(model.domain(), DEFAULT_STATE_CAP)?;
    let z: f64 = states.iter().map(|s| model.energy(s).exp()).sum();
    let mut reports = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let kernel = build_unadjusted_kernel(model, alpha, DEFAULT_STATE_CAP)?;
        let stationary = stationary_distribution(&kernel, 1e-14)?;
        let closed = closed_form_stationary(model, alpha)?;
        reports.push(StationarityBiasReport {
            alpha,
            l1_distance: l1_distance(&stationary, &pi),
            bound: z * (-1.0 / (2.0 * alpha) - lambda_min / 2.0).exp(),
            lambda_min,
            reversibility_residual: detailed_balance_residual(&kernel, &closed),
            closed_form_l1: l1_distance(&stationary, &closed),
        });
    }
    Ok(reports)
}

/// Spectral comparison between the corrected coordinatewise kernel and the
/// full-space informed kernel at the same stepsize.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralComparisonReport {
    pub alpha: f64,
    pub lipschitz: f64,
    pub squared_diameter: f64,
    /// `c = exp(-½·L·D²)`, the comparison constant.
    pub constant: f64,
    pub gap_full_space: f64,
    pub gap_coordinatewise: f64,
    /// Asymptotic variances of the supplied test function.
    pub asymvar_full_space: f64,
    pub asymvar_coordinatewise: f64,
    pub stationary_variance: f64,
    pub gap_bound_holds: bool,
    pub asymvar_bound_holds: bool,
}

/// Checks `Gap(K̃) ≥ c·Gap(K)` and the matching asymptotic-variance bound,
/// where `K̃` is the corrected coordinatewise kernel and `K` the corrected
/// full-space kernel.
pub fn verify_spectral_comparison<M: EnergyModel + ?Sized>(
    model: &M,
    alpha: f64,
    h: &[f64],
    cap: usize,
) -> Result<SpectralComparisonReport> {
    let pi = target_distribution_capped(model, cap)?;
    let lipschitz = lipschitz_constant(model, cap)?;
    let d2 = squared_diameter(model.domain());
    let constant = (-0.5 * lipschitz * d2).exp();
    let coord = build_kernel(model, KernelKind::AdjustedProposal, alpha, cap)?;
    let full = build_kernel(model, KernelKind::FullSpaceMh, alpha, cap)?;
    let tol = 1e-8;
    let gap_coordinatewise = spectral_gap(&coord, &pi, tol)?;
    let gap_full_space = spectral_gap(&full, &pi, tol)?;
    let asymvar_coordinatewise = asymptotic_variance(&coord, &pi, h, tol)?;
    let asymvar_full_space = asymptotic_variance(&full, &pi, h, tol)?;
    let var_pi = stationary_variance(&pi, h);
    // Tiny slack absorbs eigensolver rounding.
    let slack = 1e-10;
    Ok(SpectralComparisonReport {
        alpha,
        lipschitz,
        squared_diameter: d2,
        constant,
        gap_full_space,
        gap_coordinatewise,
        asymvar_full_space,
        asymvar_coordinatewise,
        stationary_variance: var_pi,
        gap_bound_holds: gap_coordinatewise >= constant * gap_full_space - slack,
        asymvar_bound_holds: asymvar_coordinatewise
            <= asymvar_full_space / constant
                + (1.0 - constant) / constant * var_pi
                + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{IsingModel, TableModel};
    use nalgebra::DMatrix;

    fn two_by_two() -> IsingModel {
        IsingModel::new(2, 2, 0.1, 0.2).unwrap()
    }

    #[test]
    fn kernels_are_row_stochastic() {
        let m = two_by_two();
        for kind in [
            KernelKind::UnadjustedProposal,
            KernelKind::AdjustedProposal,
            KernelKind::LocallyBalancedMh,
            KernelKind::FullSpaceMh,
        ] {
            let k = build_kernel(&m, kind, 0.5, DEFAULT_STATE_CAP).unwrap();
            assert!(k.row_sum_residual() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn mh_kernels_satisfy_detailed_balance() {
        let m = two_by_two();
        let pi = target_distribution(&m).unwrap();
        for kind in [
            KernelKind::AdjustedProposal,
            KernelKind::LocallyBalancedMh,
            KernelKind::FullSpaceMh,
        ] {
            let k = build_kernel(&m, kind, 0.5, DEFAULT_STATE_CAP).unwrap();
            assert!(detailed_balance_residual(&k, &pi) < 1e-14, "{kind:?}");
        }
    }

    #[test]
    fn mh_stationary_matches_target() {
        let m = two_by_two();
        let pi = target_distribution(&m).unwrap();
        let k = build_kernel(&m, KernelKind::AdjustedProposal, 0.5, DEFAULT_STATE_CAP).unwrap();
        let stat = stationary_distribution(&k, 1e-14).unwrap();
        assert!(l1_distance(&stat, &pi) < 1e-10);
    }

    #[test]
    fn two_state_kernel_by_hand() {
        // K = [[1-p, p], [q, 1-q]] has stationary (q, p)/(p+q) and
        // λ₂ = 1 - p - q.
        let domain = Domain::binary(1).unwrap();
        let matrix = DMatrix::from_row_slice(2, 2, &[0.7, 0.3, 0.6, 0.4]);
        let k = DenseKernel { domain, matrix };
        let stat = stationary_distribution(&k, 1e-14).unwrap();
        assert!((stat[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((stat[1] - 1.0 / 3.0).abs() < 1e-12);
        let gap = spectral_gap(&k, &stat, 1e-8).unwrap();
        assert!((gap - 0.9).abs() < 1e-12);
    }

    #[test]
    fn iid_kernel_asymptotic_variance_is_stationary_variance() {
        // Rows all equal to π: samples are iid, so the asymptotic variance of
        // any h equals var_π(h).
        let domain = Domain::binary(2).unwrap();
        let pi = [0.1, 0.2, 0.3, 0.4];
        let matrix = DMatrix::from_fn(4, 4, |_, y| pi[y]);
        let k = DenseKernel { domain, matrix };
        let h = [1.0, -1.0, 2.0, 0.5];
        let v = asymptotic_variance(&k, &pi, &h, 1e-8).unwrap();
        assert!((v - stationary_variance(&pi, &h)).abs() < 1e-12);
    }

    #[test]
    fn quadratic_has_zero_lipschitz_constant() {
        // For a zero-diagonal quadratic the first-order estimate is exact up
        // to the (y-x)ᵀA(y-x) term... which vanishes only on single flips;
        // the constant is the largest curvature over multi-coordinate moves.
        let m = two_by_two().to_quadratic();
        let l = lipschitz_constant(&m, DEFAULT_STATE_CAP).unwrap();
        // Curvature of θᵀAθ over the cube: bounded by the largest |eigenvalue|.
        let a_sym = m.symmetric_matrix();
        let spec_norm = a_sym
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        assert!(l <= 2.0 * spec_norm + 1e-12);
        assert!(l > 0.0);
    }

    #[test]
    fn linear_energy_unadjusted_chain_is_exact() {
        // Modular energy: the coordinatewise proposal with the correction off
        // still targets a product distribution whose bias bound is controlled
        // by λ_min = 0, and the closed form matches power iteration.
        let a = DMatrix::zeros(3, 3);
        let b = nalgebra::DVector::from_row_slice(&[0.4, -0.3, 0.7]);
        let m = QuadraticModel::new(a, b).unwrap();
        let reports = verify_stationarity_bias(&m, &[0.5]).unwrap();
        let r = &reports[0];
        assert!(r.closed_form_l1 < 1e-12);
        assert!(r.reversibility_residual < 1e-13);
        assert!(r.l1_distance <= r.bound + 1e-12);
    }

    #[test]
    fn stationarity_bias_shrinks_with_alpha() {
        let m = two_by_two().to_quadratic();
        let reports = verify_stationarity_bias(&m, &[1.0, 0.2, 0.05]).unwrap();
        assert!(reports[0].l1_distance > reports[1].l1_distance);
        assert!(reports[1].l1_distance > reports[2].l1_distance);
        for r in &reports {
            assert!(r.l1_distance <= r.bound + 1e-12, "alpha {}", r.alpha);
        }
    }

    #[test]
    fn spectral_comparison_on_random_table() {
        let domain = Domain::binary(4).unwrap();
        let m = TableModel::random(domain, 0.5, 31).unwrap();
        let pi = target_distribution(&m).unwrap();
        let h: Vec<f64> = (0..16).map(|i| (i & 1) as f64).collect();
        let _ = pi;
        let report = verify_spectral_comparison(&m, 0.5, &h, DEFAULT_STATE_CAP).unwrap();
        assert!(report.gap_bound_holds);
        assert!(report.asymvar_bound_holds);
        assert!(report.constant > 0.0 && report.constant <= 1.0);
    }

    #[test]
    fn full_space_row_matches_direct_normalization() {
        let domain = Domain::binary(3).unwrap();
        let m = TableModel::random(domain, 1.0, 41).unwrap();
        let k = build_full_space_proposal(&m, 0.7, DEFAULT_STATE_CAP).unwrap();
        let states = crate::domain::enumerate_states(&domain).unwrap();
        let x = &states[3];
        let ux = m.energy(x);
        let weights: Vec<f64> = states
            .iter()
            .map(|y| {
                (0.5 * (m.energy(y) - ux)
                    - domain.squared_distance(x, y) / (2.0 * 0.7))
                    .exp()
            })
            .collect();
        let z: f64 = weights.iter().sum();
        for (yi, w) in weights.iter().enumerate() {
            assert!((k.matrix[(3, yi)] - w / z).abs() < 1e-12);
        }
    }

    #[test]
    fn non_reversible_kernel_rejected_by_spectrum() {
        // A 3-cycle is not reversible w.r.t. its uniform stationary law.
        let domain = Domain::ordinal(1, 3).unwrap();
        let matrix = DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
        );
        let k = DenseKernel { domain, matrix };
        let pi = [1.0 / 3.0; 3];
        assert!(matches!(
            spectrum(&k, &pi, 1e-8),
            Err(Error::NonReversibleKernel(_))
        ));
    }
}
