//! Markov chain driver: one transition per call, deterministic given the
//! `(seed, stream)` pair and the step index.
//!
//! Uniform consumption per step is fixed so traces are reproducible:
//!
//! - coordinatewise proposal: `d` uniforms in coordinate order, then one
//!   acceptance uniform when the correction is on;
//! - locally-balanced: one neighbor uniform, then one acceptance uniform;
//! - Gibbs: one uniform for the resampled coordinate (`step mod d`, a
//!   systematic scan), no acceptance draw.

use std::time::Instant;

use crate::domain::{DiscreteState, Domain};
use crate::error::Result;
use crate::model::EnergyModel;
use crate::proposal::{
    gibbs_step, lb_proposal, newton_proposal, ProposalFamily, ProposalSpec,
};
use crate::rng::RngStream;

/// What happened in one transition.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub proposed: DiscreteState,
    pub accepted: bool,
    /// MH acceptance probability; 1 when the correction is off.
    pub acceptance_probability: f64,
    /// Coordinates changed by the *proposal* (before accept/reject).
    pub changed_coordinates: usize,
    /// `log q(θ' | θ)`.
    pub forward_logprob: f64,
    /// `log q(θ | θ')`; `NaN` when no correction was evaluated.
    pub reverse_logprob: f64,
}

/// Executes one transition from `state`, returning the next state and the
/// step outcome.
pub fn sample_step<M: EnergyModel + ?Sized>(
    model: &M,
    state: &DiscreteState,
    spec: &ProposalSpec,
    step: usize,
    rng: &mut RngStream,
) -> (DiscreteState, StepOutcome) {
    match spec.family {
        ProposalFamily::Newton => newton_step(model, state, spec, step, rng),
        ProposalFamily::LocallyBalanced => lb_step(model, state, spec, rng),
        ProposalFamily::Gibbs => {
            let coordinate = step % model.domain().dim();
            let next = gibbs_step(model, state, coordinate, rng);
            let changed = next.hamming_distance(state);
            let outcome = StepOutcome {
                proposed: next.clone(),
                accepted: true,
                acceptance_probability: 1.0,
                changed_coordinates: changed,
                forward_logprob: f64::NAN,
                reverse_logprob: f64::NAN,
            };
            (next, outcome)
        }
    }
}

fn newton_step<M: EnergyModel + ?Sized>(
    model: &M,
    state: &DiscreteState,
    spec: &ProposalSpec,
    step: usize,
    rng: &mut RngStream,
) -> (DiscreteState, StepOutcome) {
    let alpha = spec.alpha_at(step);
    let forward = newton_proposal(model, state, alpha);
    let proposed = forward.sample(model.domain(), rng);
    let changed = proposed.hamming_distance(state);
    let forward_logprob = forward.log_prob(&proposed);
    if !spec.mh {
        // Unadjusted variant: the proposal is the transition.
        let outcome = StepOutcome {
            proposed: proposed.clone(),
            accepted: true,
            acceptance_probability: 1.0,
            changed_coordinates: changed,
            forward_logprob,
            reverse_logprob: f64::NAN,
        };
        return (proposed, outcome);
    }
    let reverse = newton_proposal(model, &proposed, alpha);
    let reverse_logprob = reverse.log_prob(state);
    let log_ratio =
        model.energy(&proposed) - model.energy(state) + reverse_logprob - forward_logprob;
    let acc = log_ratio.min(0.0).exp();
    let accepted = rng.uniform() < acc;
    let next = if accepted { proposed.clone() } else { state.clone() };
    let outcome = StepOutcome {
        proposed,
        accepted,
        acceptance_probability: acc,
        changed_coordinates: changed,
        forward_logprob,
        reverse_logprob,
    };
    (next, outcome)
}

fn lb_step<M: EnergyModel + ?Sized>(
    model: &M,
    state: &DiscreteState,
    spec: &ProposalSpec,
    rng: &mut RngStream,
) -> (DiscreteState, StepOutcome) {
    let forward = lb_proposal(model, state);
    let proposed = forward.sample(state, rng);
    // Exactly one coordinate changes in a window-1 move.
    let (coord, _) = {
        let i = (0..state.dim())
            .find(|&i| state.level(i) != proposed.level(i))
            .expect("window-1 proposal changes one coordinate");
        (i, ())
    };
    let forward_logprob = forward.prob_of_move(coord, proposed.level(coord)).ln();
    if !spec.mh {
        let outcome = StepOutcome {
            proposed: proposed.clone(),
            accepted: true,
            acceptance_probability: 1.0,
            changed_coordinates: 1,
            forward_logprob,
            reverse_logprob: f64::NAN,
        };
        return (proposed, outcome);
    }
    let reverse = lb_proposal(model, &proposed);
    let reverse_logprob = reverse.prob_of_move(coord, state.level(coord)).ln();
    // π(θ')·q(θ|θ') / (π(θ)·q(θ'|θ)) collapses to Z(θ)/Z(θ') for the
    // weight exp(½ΔU); keep the general form, they agree to rounding.
    let log_ratio =
        model.energy(&proposed) - model.energy(state) + reverse_logprob - forward_logprob;
    let acc = log_ratio.min(0.0).exp();
    let accepted = rng.uniform() < acc;
    let next = if accepted { proposed.clone() } else { state.clone() };
    let outcome = StepOutcome {
        proposed,
        accepted,
        acceptance_probability: acc,
        changed_coordinates: 1,
        forward_logprob,
        reverse_logprob,
    };
    (next, outcome)
}

/// Per-step record kept in a run trace.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub step: usize,
    /// Energy of the chain state *after* this step.
    pub energy: f64,
    pub accepted: bool,
    pub acceptance_probability: f64,
    pub changed_coordinates: usize,
    pub alpha: f64,
}

/// Inputs of a single-chain run.
#[derive(Debug, Clone)]
pub struct ChainParams {
    pub spec: ProposalSpec,
    pub steps: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
    pub stream: u64,
    /// Start state; a uniform draw from the stream when absent.
    pub initial: Option<DiscreteState>,
}

impl ChainParams {
    pub fn new(spec: ProposalSpec, steps: usize, seed: u64) -> Self {
        ChainParams {
            spec,
            steps,
            burn_in: 0,
            thinning: 1,
            seed,
            stream: 0,
            initial: None,
        }
    }
}

/// Output of a single-chain run.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub records: Vec<StepRecord>,
    /// States retained after burn-in and thinning.
    pub samples: Vec<DiscreteState>,
    pub final_state: DiscreteState,
    pub elapsed_us: u64,
}

impl RunTrace {
    /// Per-coordinate mean level over the retained samples.
    pub fn mean_state(&self) -> Vec<f64> {
        let d = self.final_state.dim();
        let mut mean = vec![0.0; d];
        for s in &self.samples {
            for i in 0..d {
                mean[i] += s.level(i) as f64;
            }
        }
        let n = self.samples.len().max(1) as f64;
        for m in &mut mean {
            *m /= n;
        }
        mean
    }

    /// Energies of the retained samples.
    pub fn sample_energies<M: EnergyModel + ?Sized>(&self, model: &M) -> Vec<f64> {
        self.samples.iter().map(|s| model.energy(s)).collect()
    }
}

fn uniform_initial(domain: &Domain, rng: &mut RngStream) -> DiscreteState {
    let values = (0..domain.dim())
        .map(|_| {
            let u = rng.uniform();
            ((u * domain.levels() as f64) as usize).min(domain.levels() - 1) as u8
        })
        .collect();
    DiscreteState::new(values, domain).expect("uniform levels are in range")
}

/// Runs one chain. Deterministic given the model and parameters.
pub fn run_chain<M: EnergyModel + ?Sized>(model: &M, params: &ChainParams) -> Result<RunTrace> {
    params.spec.validate()?;
    let start = Instant::now();
    let mut rng = RngStream::new(params.seed, params.stream);
    let mut state = match &params.initial {
        Some(s) => s.clone(),
        None => uniform_initial(model.domain(), &mut rng),
    };
    let mut records = Vec::with_capacity(params.steps);
    let mut samples = Vec::new();
    for step in 0..params.steps {
        let (next, outcome) = sample_step(model, &state, &params.spec, step, &mut rng);
        state = next;
        records.push(StepRecord {
            step,
            energy: model.energy(&state),
            accepted: outcome.accepted,
            acceptance_probability: outcome.acceptance_probability,
            changed_coordinates: outcome.changed_coordinates,
            alpha: params.spec.alpha_at(step),
        });
        if step >= params.burn_in && (step - params.burn_in).is_multiple_of(params.thinning) {
            samples.push(state.clone());
        }
    }
    Ok(RunTrace {
        records,
        samples,
        final_state: state,
        elapsed_us: start.elapsed().as_micros() as u64,
    })
}
