//! Proposal kernels: the Newton proposal (binary, ordinal, one-hot), the
//! window-1 locally-balanced baseline, and single-site Gibbs conditionals.
//!
//! The Newton proposal factorizes coordinatewise: each coordinate draws a new
//! level from a categorical distribution whose logits combine the finite
//! difference along that coordinate with a squared-distance stepsize term.

use serde::{Deserialize, Serialize};

use crate::domain::{DiscreteState, Domain, Encoding};
use crate::error::{Error, Result};
use crate::model::{level_difference_matrix, EnergyModel, FlipDifferences};
use crate::rng::RngStream;

/// Proposal families available to the chain driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProposalFamily {
    Newton,
    LocallyBalanced,
    Gibbs,
}

/// Sampler configuration: family, stepsize, MH toggle, optional exponential
/// stepsize decay `α_t = α·γ^t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalSpec {
    pub family: ProposalFamily,
    pub alpha: f64,
    pub mh: bool,
    /// Decay factor γ ∈ (0, 1]; `None` means constant stepsize.
    pub decay: Option<f64>,
}

impl ProposalSpec {
    pub fn newton(alpha: f64, mh: bool) -> Self {
        ProposalSpec {
            family: ProposalFamily::Newton,
            alpha,
            mh,
            decay: None,
        }
    }

    pub fn locally_balanced(mh: bool) -> Self {
        ProposalSpec {
            family: ProposalFamily::LocallyBalanced,
            alpha: 1.0,
            mh,
            decay: None,
        }
    }

    pub fn gibbs() -> Self {
        ProposalSpec {
            family: ProposalFamily::Gibbs,
            alpha: 1.0,
            mh: false,
            decay: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidSpec("alpha must be positive".into()));
        }
        if let Some(g) = self.decay {
            if !(g > 0.0 && g <= 1.0) {
                return Err(Error::InvalidSpec("decay must be in (0, 1]".into()));
            }
        }
        Ok(())
    }

    /// Stepsize used at step `t` (0-based).
    pub fn alpha_at(&self, step: usize) -> f64 {
        match self.decay {
            Some(g) if g < 1.0 => self.alpha * g.powi(step as i32),
            _ => self.alpha,
        }
    }
}

/// A coordinatewise product of categorical distributions: `d` rows of `L`
/// level probabilities (2 for binary).
#[derive(Debug, Clone)]
pub struct ProposalDistribution {
    dim: usize,
    levels: usize,
    /// Row-major `d × L` probabilities; row i is `q_i(· | θ)`.
    rows: Vec<f64>,
}

impl ProposalDistribution {
    fn from_logits(dim: usize, levels: usize, mut logits: Vec<f64>) -> Self {
        for i in 0..dim {
            let row = &mut logits[i * levels..(i + 1) * levels];
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut sum = 0.0;
            for v in row.iter_mut() {
                *v = (*v - max).exp();
                sum += *v;
            }
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
        ProposalDistribution {
            dim,
            levels,
            rows: logits,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn prob(&self, i: usize, level: usize) -> f64 {
        self.rows[i * self.levels + level]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.levels..(i + 1) * self.levels]
    }

    /// Log probability of proposing `target`, `Σ_i log q_i(target_i | θ)`.
    pub fn log_prob(&self, target: &DiscreteState) -> f64 {
        (0..self.dim)
            .map(|i| self.prob(i, target.level(i)).ln())
            .sum()
    }

    /// Draws every coordinate independently by inverse CDF over levels in
    /// increasing index order, one uniform per coordinate in coordinate order.
    pub fn sample(&self, domain: &Domain, rng: &mut RngStream) -> DiscreteState {
        let mut values = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let u = rng.uniform();
            let row = self.row(i);
            let mut acc = 0.0;
            let mut chosen = self.levels - 1;
            for (l, &p) in row.iter().enumerate() {
                acc += p;
                if u < acc {
                    chosen = l;
                    break;
                }
            }
            values.push(chosen as u8);
        }
        DiscreteState::new(values, domain).expect("sampled levels are in range")
    }
}

/// The Newton proposal at `state` with stepsize `alpha`.
pub fn newton_proposal<M: EnergyModel + ?Sized>(
    model: &M,
    state: &DiscreteState,
    alpha: f64,
) -> ProposalDistribution {
    let diffs = model.flip_differences(state);
    newton_proposal_from_differences(model.domain(), state, &diffs, alpha)
}

/// Newton proposal built from an explicit difference structure. Split out so
/// alternative difference routes (e.g. a multilinear gradient) can feed the
/// same construction.
pub fn newton_proposal_from_differences(
    domain: &Domain,
    state: &DiscreteState,
    diffs: &FlipDifferences,
    alpha: f64,
) -> ProposalDistribution {
    let d = domain.dim();
    let levels = domain.levels();
    match domain.encoding() {
        Encoding::Binary => {
            let flip = diffs.per_coordinate();
            let mut logits = vec![0.0; d * 2];
            for i in 0..d {
                // Flip logit ½·flipdiff - 1/(2α) against a zero stay logit.
                let other = 1 - state.level(i);
                logits[i * 2 + other] = 0.5 * flip[i] - 1.0 / (2.0 * alpha);
            }
            ProposalDistribution::from_logits(d, 2, logits)
        }
        Encoding::Ordinal => {
            let delta = diffs.per_coordinate();
            let mut logits = vec![0.0; d * levels];
            for i in 0..d {
                let current = state.level(i) as f64;
                for l in 0..levels {
                    let step = l as f64 - current;
                    logits[i * levels + l] =
                        0.5 * delta[i] * step - step * step / (2.0 * alpha);
                }
            }
            ProposalDistribution::from_logits(d, levels, logits)
        }
        Encoding::OneHot => {
            // Squared one-hot distance is 2 for any level change.
            let mut logits = vec![0.0; d * levels];
            for i in 0..d {
                for l in 0..levels {
                    let dist = if l == state.level(i) { 0.0 } else { 1.0 / alpha };
                    logits[i * levels + l] = 0.5 * diffs.level_entry(i, l) - dist;
                }
            }
            ProposalDistribution::from_logits(d, levels, logits)
        }
    }
}

/// The window-1 locally-balanced proposal: weights `exp(½ ΔU)` over the
/// `d·(L-1)` single-coordinate changes, self excluded.
#[derive(Debug, Clone)]
pub struct LbProposal {
    domain: Domain,
    /// Moves in scan order: coordinate-major, then target level skipping the
    /// current one.
    moves: Vec<(usize, usize)>,
    probs: Vec<f64>,
    /// Normalizer Z(θ) = Σ weights; its ratio drives the MH acceptance.
    normalizer: f64,
}

impl LbProposal {
    pub fn moves(&self) -> &[(usize, usize)] {
        &self.moves
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Probability of proposing the single-coordinate change to `(i, level)`.
    pub fn prob_of_move(&self, i: usize, level: usize) -> f64 {
        self.moves
            .iter()
            .position(|&m| m == (i, level))
            .map(|k| self.probs[k])
            .unwrap_or(0.0)
    }

    /// Inverse-CDF draw of a neighbor (one uniform).
    pub fn sample(&self, state: &DiscreteState, rng: &mut RngStream) -> DiscreteState {
        let u = rng.uniform();
        let mut acc = 0.0;
        let mut chosen = self.moves.len() - 1;
        for (k, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = k;
                break;
            }
        }
        let (i, level) = self.moves[chosen];
        let mut next = state.clone();
        next.set_level(i, level);
        let _ = self.domain;
        next
    }
}

/// Builds the window-1 locally-balanced proposal at `state`.
pub fn lb_proposal<M: EnergyModel + ?Sized>(model: &M, state: &DiscreteState) -> LbProposal {
    let domain = *model.domain();
    let levels = domain.levels();
    let diffs = level_difference_matrix(model, state);
    let mut moves = Vec::with_capacity(domain.dim() * (levels - 1));
    let mut weights = Vec::with_capacity(domain.dim() * (levels - 1));
    for i in 0..domain.dim() {
        for l in 0..levels {
            if l != state.level(i) {
                moves.push((i, l));
                weights.push((0.5 * diffs[i * levels + l]).exp());
            }
        }
    }
    let normalizer: f64 = weights.iter().sum();
    let probs = weights.iter().map(|w| w / normalizer).collect();
    LbProposal {
        domain,
        moves,
        probs,
        normalizer,
    }
}

/// Resamples `coordinate` from its exact conditional `∝ exp(U(θ_i = ℓ))`,
/// consuming one uniform.
pub fn gibbs_step<M: EnergyModel + ?Sized>(
    model: &M,
    state: &DiscreteState,
    coordinate: usize,
    rng: &mut RngStream,
) -> DiscreteState {
    let domain = *model.domain();
    let levels = domain.levels();
    let logits = conditional_logits(model, state, coordinate);
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logits.iter().map(|&x| (x - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    let u = rng.uniform() * total;
    let mut acc = 0.0;
    let mut chosen = levels - 1;
    for (l, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            chosen = l;
            break;
        }
    }
    state.with_level(coordinate, chosen)
}

/// Conditional logits `U(θ with θ_i = ℓ) - U(θ)` over levels for one
/// coordinate, using the model's fast differences where possible.
fn conditional_logits<M: EnergyModel + ?Sized>(
    model: &M,
    state: &DiscreteState,
    coordinate: usize,
) -> Vec<f64> {
    let domain = *model.domain();
    let levels = domain.levels();
    match (domain.encoding(), model.flip_differences(state)) {
        (Encoding::Binary, FlipDifferences::PerCoordinate(flip)) => {
            let mut logits = vec![0.0; 2];
            logits[1 - state.level(coordinate)] = flip[coordinate];
            logits
        }
        (_, FlipDifferences::PerLevel { diffs, levels: l }) => {
            diffs[coordinate * l..(coordinate + 1) * l].to_vec()
        }
        _ => {
            let u0 = model.energy(state);
            (0..levels)
                .map(|l| {
                    if l == state.level(coordinate) {
                        0.0
                    } else {
                        model.energy(&state.with_level(coordinate, l)) - u0
                    }
                })
                .collect()
        }
    }
}

/// Max deviation of every proposal row sum from 1.
pub fn row_stochastic_residual(q: &ProposalDistribution) -> f64 {
    (0..q.dim())
        .map(|i| (q.row(i).iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{enumerate_states, state_index};
    use crate::models::TableModel;

    fn constant_model(d: usize) -> TableModel {
        let domain = Domain::binary(d).unwrap();
        TableModel::new(domain, vec![1.0; 1 << d]).unwrap()
    }

    #[test]
    fn constant_energy_flip_probability() {
        let m = constant_model(3);
        let s = DiscreteState::zeros(m.domain());
        let q = newton_proposal(&m, &s, 1.0);
        let expected = (-0.5f64).exp() / ((-0.5f64).exp() + 1.0);
        for i in 0..3 {
            assert!((q.prob(i, 1) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_logit_gives_half() {
        // ½·flipdiff = 1/(2α) with α = 1 means flipdiff = 1.
        let domain = Domain::binary(1).unwrap();
        let m = TableModel::new(domain, vec![0.0, 1.0]).unwrap();
        let s = DiscreteState::zeros(&domain);
        let q = newton_proposal(&m, &s, 1.0);
        assert!((q.prob(0, 1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rows_match_joint_restriction() {
        // Brute-force the perfect-square joint restricted to one coordinate.
        let domain = Domain::binary(4).unwrap();
        let m = TableModel::random(domain, 1.0, 3).unwrap();
        let alpha = 0.7;
        for s in enumerate_states(&domain).unwrap() {
            let q = newton_proposal(&m, &s, alpha);
            let flip = m.flip_differences(&s);
            let flip = flip.per_coordinate();
            for i in 0..4 {
                // Plus-direction difference for the exponent of the joint.
                let plus = flip[i] * (1.0 - 2.0 * s.level(i) as f64);
                let weight = |target: usize| -> f64 {
                    let step = target as f64 - s.level(i) as f64;
                    (0.5 * plus * step - step * step / (2.0 * alpha)).exp()
                };
                let z = weight(0) + weight(1);
                for target in 0..2 {
                    assert!((q.prob(i, target) - weight(target) / z).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn stepsize_limits() {
        let domain = Domain::binary(1).unwrap();
        let m = TableModel::new(domain, vec![0.0, 2.0]).unwrap();
        let s = DiscreteState::zeros(&domain);
        // α → 0: flip probability → 0.
        let q = newton_proposal(&m, &s, 1e-3);
        assert!(q.prob(0, 1) < 1e-100);
        // α → ∞: flip probability → σ(½·flipdiff).
        let q = newton_proposal(&m, &s, 1e3);
        let sigma = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((q.prob(0, 1) - sigma).abs() < 1e-3);
        // α = 1 closed form.
        let q = newton_proposal(&m, &s, 1.0);
        let x: f64 = 1.0 - 0.5;
        assert!((q.prob(0, 1) - x.exp() / (x.exp() + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn proposal_rows_are_stochastic() {
        let domain = Domain::ordinal(3, 4).unwrap();
        let m = TableModel::random(domain, 1.5, 9).unwrap();
        for s in enumerate_states(&domain).unwrap() {
            let q = newton_proposal(&m, &s, 0.5);
            assert!(row_stochastic_residual(&q) < 1e-12);
        }
    }

    #[test]
    fn lb_uniform_on_constant_energy() {
        let m = constant_model(3);
        let s = DiscreteState::zeros(m.domain());
        let lb = lb_proposal(&m, &s);
        for &p in lb.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn lb_two_state_symmetry() {
        // U = (0, 1, 1, 2) lexicographically on {0,1}²; θ = (0,0) has two
        // neighbors with equal weight e^{0.5}.
        let domain = Domain::binary(2).unwrap();
        let m = TableModel::new(domain, vec![0.0, 1.0, 1.0, 2.0]).unwrap();
        let s = DiscreteState::zeros(&domain);
        let lb = lb_proposal(&m, &s);
        assert!((lb.probs()[0] - 0.5).abs() < 1e-15);
        assert!((lb.probs()[1] - 0.5).abs() < 1e-15);
        assert!((lb.normalizer() - 2.0 * 0.5f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn lb_matches_brute_force() {
        let domain = Domain::binary(4).unwrap();
        let m = TableModel::random(domain, 1.0, 17).unwrap();
        for s in enumerate_states(&domain).unwrap() {
            let lb = lb_proposal(&m, &s);
            let u0 = m.energy(&s);
            let mut weights = Vec::new();
            for i in 0..4 {
                let n = s.with_level(i, 1 - s.level(i));
                weights.push((0.5 * (m.energy(&n) - u0)).exp());
            }
            let z: f64 = weights.iter().sum();
            for (k, &(i, l)) in lb.moves().iter().enumerate() {
                assert_eq!(l, 1 - s.level(i));
                assert!((lb.probs()[k] - weights[i] / z).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gibbs_constant_energy_is_uniform() {
        let domain = Domain::ordinal(1, 4).unwrap();
        let m = TableModel::new(domain, vec![3.0; 4]).unwrap();
        let s = DiscreteState::zeros(&domain);
        let mut rng = RngStream::new(1, 0);
        let mut counts = [0usize; 4];
        let n = 40_000;
        for _ in 0..n {
            let next = gibbs_step(&m, &s, 0, &mut rng);
            counts[next.level(0)] += 1;
        }
        for &c in &counts {
            let freq = c as f64 / n as f64;
            assert!((freq - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn gibbs_d1_samples_target_exactly() {
        let domain = Domain::binary(1).unwrap();
        let m = TableModel::new(domain, vec![0.0, 1.0]).unwrap();
        let target1 = 1.0f64.exp() / (1.0 + 1.0f64.exp());
        let s = DiscreteState::zeros(&domain);
        let mut rng = RngStream::new(2, 0);
        let n = 100_000;
        let mut ones = 0usize;
        for _ in 0..n {
            ones += gibbs_step(&m, &s, 0, &mut rng).level(0);
        }
        let freq = ones as f64 / n as f64;
        let se = (target1 * (1.0 - target1) / n as f64).sqrt();
        assert!((freq - target1).abs() < 3.0 * se);
    }

    #[test]
    fn gibbs_marginals_match_enumeration() {
        let domain = Domain::binary(3).unwrap();
        let m = TableModel::random(domain, 1.0, 21).unwrap();
        // Exact marginals by enumeration.
        let states = enumerate_states(&domain).unwrap();
        let weights: Vec<f64> = states.iter().map(|s| m.energy(s).exp()).collect();
        let z: f64 = weights.iter().sum();
        let mut exact = [0.0f64; 3];
        for (s, w) in states.iter().zip(&weights) {
            for i in 0..3 {
                exact[i] += s.level(i) as f64 * w / z;
            }
        }
        // Long Gibbs run by systematic sweeps.
        let mut rng = RngStream::new(3, 0);
        let mut state = DiscreteState::zeros(&domain);
        let sweeps = 100_000;
        let mut sums = [0.0f64; 3];
        for _ in 0..sweeps {
            for i in 0..3 {
                state = gibbs_step(&m, &state, i, &mut rng);
            }
            for i in 0..3 {
                sums[i] += state.level(i) as f64;
            }
        }
        for i in 0..3 {
            let est = sums[i] / sweeps as f64;
            // Conservative iid standard error times an autocorrelation margin.
            let se = (exact[i] * (1.0 - exact[i]) / sweeps as f64).sqrt();
            assert!(
                (est - exact[i]).abs() < 6.0 * se.max(1e-3),
                "marginal {i}: est {est} exact {}",
                exact[i]
            );
        }
    }

    #[test]
    fn spec_validation() {
        assert!(ProposalSpec::newton(0.0, true).validate().is_err());
        let mut spec = ProposalSpec::newton(1.0, true);
        spec.decay = Some(1.5);
        assert!(spec.validate().is_err());
        spec.decay = Some(0.99);
        assert!(spec.validate().is_ok());
        assert!((spec.alpha_at(2) - 0.99f64.powi(2)).abs() < 1e-15);
    }

    #[test]
    fn ordinal_proposal_matches_softmax_form() {
        let domain = Domain::ordinal(2, 3).unwrap();
        let m = TableModel::random(domain, 1.0, 5).unwrap();
        let s = DiscreteState::new(vec![1, 2], &domain).unwrap();
        let q = newton_proposal(&m, &s, 0.5);
        let delta = m.flip_differences(&s);
        let delta = delta.per_coordinate();
        for i in 0..2 {
            let mut weights = [0.0f64; 3];
            for l in 0..3 {
                let step = l as f64 - s.level(i) as f64;
                weights[l] = (0.5 * delta[i] * step - step * step).exp();
            }
            let z: f64 = weights.iter().sum();
            for l in 0..3 {
                assert!((q.prob(i, l) - weights[l] / z).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn table_index_sanity() {
        // Guard for the lexicographic convention used by several oracles here.
        let domain = Domain::binary(2).unwrap();
        let s = DiscreteState::new(vec![1, 0], &domain).unwrap();
        assert_eq!(state_index(&s, &domain), 2);
    }
}
