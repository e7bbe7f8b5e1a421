//! Experiment harness behind the CLI: runs configured chains, exact
//! analyses, and benchmarks, writing deterministic artifacts to an output
//! directory.
//!
//! Artifacts per proposal `name`:
//!
//! - `<name>/trace_seed<seed>.csv` with columns
//!   `step,energy,accepted,acc_prob,changed,alpha` (no wall-clock data, so
//!   repeated runs are byte-identical);
//! - `summary.json` / `exact.json` / `bench.json` depending on the
//!   subcommand;
//! - `config.toml`, the resolved configuration that produced the outputs.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::chain::{run_chain, ChainParams, RunTrace};
use crate::config::{ExperimentConfig, ModelConfig, TestFunction};
use crate::diagnostics::{acceptance_stats, effective_sample_size, exact_mean, AcceptanceStats};
use crate::domain::DEFAULT_STATE_CAP;
use crate::error::{Error, Result};
use crate::exact::{
    verify_spectral_comparison, verify_stationarity_bias, SpectralComparisonReport,
    StationarityBiasReport,
};
use crate::model::EnergyModel;
use crate::models::IsingModel;

/// Process exit codes used by the CLI.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const BOUND_VIOLATION: i32 = 3;
    pub const STATE_CAP: i32 = 4;
}

/// Maps library errors to CLI exit codes.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::StateSpaceTooLarge { .. } => exit_code::STATE_CAP,
        Error::Parse(_)
        | Error::InvalidSpec(_)
        | Error::InvalidDomain(_)
        | Error::InvalidSimplexRow { .. }
        | Error::Io(_) => exit_code::CONFIG,
        _ => 1,
    }
}

/// Common CLI options shared by the subcommands.
#[derive(Debug, Clone)]
pub struct HarnessOptions {
    pub config: PathBuf,
    pub out: PathBuf,
    pub overwrite: bool,
    /// Replaces the config's seed list when present.
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

fn load_config(options: &HarnessOptions) -> Result<(ExperimentConfig, PathBuf)> {
    let mut config = ExperimentConfig::from_path(&options.config)?;
    if let Some(seed) = options.seed {
        config.run.seeds = vec![seed];
    }
    let base_dir = options
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((config, base_dir))
}

fn prepare_out_dir(out: &Path, overwrite: bool) -> Result<()> {
    if out.exists() {
        if !overwrite {
            return Err(Error::InvalidSpec(format!(
                "output directory {} exists; pass --overwrite to replace it",
                out.display()
            )));
        }
        fs::remove_dir_all(out)?;
    }
    fs::create_dir_all(out)?;
    Ok(())
}

fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // Ignore failure: the global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(serde_json::to_string_pretty(value).unwrap().as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}

fn write_resolved_config(out: &Path, config: &ExperimentConfig) -> Result<()> {
    fs::write(out.join("config.toml"), config.to_toml_string()?)?;
    Ok(())
}

/// Writes one chain trace as CSV. Booleans become 0/1; floats use shortest
/// round-trip formatting so identical runs produce identical bytes.
pub fn write_trace_csv(path: &Path, trace: &RunTrace) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Parse(e.to_string()))?;
    writer
        .write_record(["step", "energy", "accepted", "acc_prob", "changed", "alpha"])
        .map_err(|e| Error::Parse(e.to_string()))?;
    for r in &trace.records {
        writer
            .write_record([
                r.step.to_string(),
                format!("{:?}", r.energy),
                (r.accepted as u8).to_string(),
                format!("{:?}", r.acceptance_probability),
                r.changed_coordinates.to_string(),
                format!("{:?}", r.alpha),
            ])
            .map_err(|e| Error::Parse(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct SeedSummary {
    seed: u64,
    acceptance: AcceptanceStats,
    /// ESS of the retained-sample energy series, when estimable.
    energy_ess: Option<f64>,
    mean_state: Vec<f64>,
    final_energy: f64,
    elapsed_us: u64,
}

fn run_one(
    model: &dyn EnergyModel,
    config: &ExperimentConfig,
    spec: &crate::proposal::ProposalSpec,
    seed: u64,
    stream: u64,
) -> Result<(RunTrace, SeedSummary)> {
    let params = ChainParams {
        spec: spec.clone(),
        steps: config.run.steps,
        burn_in: config.run.burn_in,
        thinning: config.run.thinning,
        seed,
        stream,
        initial: None,
    };
    let trace = run_chain(model, &params)?;
    let energies = trace.sample_energies(model);
    let summary = SeedSummary {
        seed,
        acceptance: acceptance_stats(&trace.records),
        energy_ess: effective_sample_size(&energies).ok(),
        mean_state: trace.mean_state(),
        final_energy: model.energy(&trace.final_state),
        elapsed_us: trace.elapsed_us,
    };
    Ok((trace, summary))
}

/// `sample`: run every configured proposal across the seed list and write
/// traces plus a summary.
pub fn cmd_sample(options: &HarnessOptions) -> Result<i32> {
    configure_threads(options.threads);
    let (config, base_dir) = load_config(options)?;
    let model = config.build_model(&base_dir)?;
    prepare_out_dir(&options.out, options.overwrite)?;
    let mut proposals_json = Vec::new();
    for (pi, proposal) in config.all_proposals().iter().enumerate() {
        let dir = options.out.join(&proposal.name);
        fs::create_dir_all(&dir)?;
        // One RNG stream per (proposal, seed) pair; results do not depend on
        // the parallel schedule.
        let results: Vec<Result<(u64, RunTrace, SeedSummary)>> = config
            .run
            .seeds
            .par_iter()
            .map(|&seed| {
                run_one(model.as_ref(), &config, &proposal.spec, seed, pi as u64)
                    .map(|(t, s)| (seed, t, s))
            })
            .collect();
        let mut summaries = Vec::new();
        for result in results {
            let (seed, trace, summary) = result?;
            write_trace_csv(&dir.join(format!("trace_seed{seed}.csv")), &trace)?;
            summaries.push(summary);
        }
        proposals_json.push(json!({
            "name": proposal.name,
            "spec": proposal.spec,
            "seeds": summaries,
        }));
    }
    write_json(
        &options.out.join("summary.json"),
        &json!({
            "command": "sample",
            "steps": config.run.steps,
            "burn_in": config.run.burn_in,
            "thinning": config.run.thinning,
            "proposals": proposals_json,
        }),
    )?;
    write_resolved_config(&options.out, &config)?;
    Ok(exit_code::OK)
}

#[derive(Debug, Serialize)]
struct ExactOutput {
    target_mean: Vec<f64>,
    stationarity_bias: Vec<StationarityBiasReport>,
    spectral_comparison: Option<SpectralComparisonReport>,
}

fn test_function_values(
    model: &dyn EnergyModel,
    which: TestFunction,
) -> Result<Vec<f64>> {
    let states = crate::domain::enumerate_states_capped(model.domain(), DEFAULT_STATE_CAP)?;
    Ok(match which {
        TestFunction::Energy => states.iter().map(|s| model.energy(s)).collect(),
        TestFunction::FirstCoordinate => {
            states.iter().map(|s| s.level(0) as f64).collect()
        }
    })
}

/// `exact`: enumerate the target, check the stationarity-bias bound (models
/// with a certified quadratic form) and the spectral-comparison bound.
/// Returns exit code 3 when a verified bound fails.
pub fn cmd_exact(options: &HarnessOptions) -> Result<i32> {
    configure_threads(options.threads);
    let (config, base_dir) = load_config(options)?;
    let model = config.build_model(&base_dir)?;
    prepare_out_dir(&options.out, options.overwrite)?;
    let exact_cfg = config.exact.clone().unwrap_or(crate::config::ExactConfig {
        bias_alphas: Vec::new(),
        comparison_alpha: None,
        test_function: TestFunction::Energy,
    });
    let truth = exact_mean(model.as_ref(), DEFAULT_STATE_CAP)?;
    let mut violated = false;

    let stationarity_bias = if exact_cfg.bias_alphas.is_empty() {
        Vec::new()
    } else {
        // The bias bound needs the energy as an explicit quadratic form.
        let quadratic = match &config.model {
            ModelConfig::Ising {
                height,
                width,
                coupling,
                bias,
            } => IsingModel::new(*height, *width, *coupling, *bias)?.to_quadratic(),
            _ => return Err(Error::NotQuadratic),
        };
        let reports = verify_stationarity_bias(&quadratic, &exact_cfg.bias_alphas)?;
        for r in &reports {
            if r.l1_distance > r.bound + 1e-12 {
                violated = true;
            }
        }
        reports
    };

    let spectral_comparison = match exact_cfg.comparison_alpha {
        Some(alpha) => {
            let h = test_function_values(model.as_ref(), exact_cfg.test_function)?;
            let report =
                verify_spectral_comparison(model.as_ref(), alpha, &h, DEFAULT_STATE_CAP)?;
            if !report.gap_bound_holds || !report.asymvar_bound_holds {
                violated = true;
            }
            Some(report)
        }
        None => None,
    };

    let output = ExactOutput {
        target_mean: truth.mean,
        stationarity_bias,
        spectral_comparison,
    };
    write_json(
        &options.out.join("exact.json"),
        &serde_json::to_value(&output).unwrap(),
    )?;
    write_resolved_config(&options.out, &config)?;
    Ok(if violated {
        exit_code::BOUND_VIOLATION
    } else {
        exit_code::OK
    })
}

/// `bench`: time every proposal over the seed list and report throughput and
/// sampling efficiency.
pub fn cmd_bench(options: &HarnessOptions) -> Result<i32> {
    configure_threads(options.threads);
    let (config, base_dir) = load_config(options)?;
    let model = config.build_model(&base_dir)?;
    prepare_out_dir(&options.out, options.overwrite)?;
    let mut rows = Vec::new();
    for (pi, proposal) in config.all_proposals().iter().enumerate() {
        let mut elapsed_total = 0u64;
        let mut ess_values = Vec::new();
        let mut acceptance = Vec::new();
        for &seed in &config.run.seeds {
            let (trace, summary) =
                run_one(model.as_ref(), &config, &proposal.spec, seed, pi as u64)?;
            elapsed_total += trace.elapsed_us;
            if let Some(e) = summary.energy_ess {
                ess_values.push(e);
            }
            acceptance.push(summary.acceptance.rate);
        }
        let runs = config.run.seeds.len() as f64;
        let secs = elapsed_total as f64 / 1e6;
        let mean_ess = if ess_values.is_empty() {
            None
        } else {
            Some(ess_values.iter().sum::<f64>() / ess_values.len() as f64)
        };
        rows.push(json!({
            "name": proposal.name,
            "spec": proposal.spec,
            "steps_per_second": config.run.steps as f64 * runs / secs.max(1e-9),
            "mean_acceptance_rate": acceptance.iter().sum::<f64>() / runs,
            "mean_energy_ess": mean_ess,
            "ess_per_second": mean_ess.map(|e| e * runs / secs.max(1e-9)),
            "total_elapsed_us": elapsed_total,
        }));
    }
    write_json(
        &options.out.join("bench.json"),
        &json!({ "command": "bench", "results": rows }),
    )?;
    write_resolved_config(&options.out, &config)?;
    Ok(exit_code::OK)
}
