//! TOML experiment configuration.
//!
//! A config names a model, one or more proposal specs, run parameters, and
//! optionally the exact-analysis settings. Relative file paths inside the
//! config are resolved against the config file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::EnergyModel;
use crate::models::{
    FacilityLocationModel, IsingModel, MixtureParams, PottsModel, TableModel,
};
use crate::multilinear::SetFunctionTable;
use crate::proposal::ProposalSpec;

/// Model section, discriminated by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelConfig {
    /// Ising lattice: `height × width`, coupling `a`, field `b`.
    Ising {
        height: usize,
        width: usize,
        coupling: f64,
        bias: f64,
    },
    /// Potts lattice with `levels` labels and a per-level bias.
    Potts {
        height: usize,
        width: usize,
        levels: usize,
        coupling: f64,
        bias: Vec<f64>,
    },
    /// Facility location; either generated from a seed or loaded from a CSV
    /// utility matrix.
    Facility {
        n_facilities: usize,
        m_customers: usize,
        penalty: f64,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        file: Option<PathBuf>,
    },
    /// Explicit set-function table loaded from a text file of
    /// `bitstring value` lines.
    Table { file: PathBuf },
}

/// A named proposal spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalConfig {
    pub name: String,
    #[serde(flatten)]
    pub spec: ProposalSpec,
}

/// Chain-run parameters shared by all proposals in the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub steps: usize,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default = "default_thinning")]
    pub thinning: usize,
    pub seeds: Vec<u64>,
}

fn default_thinning() -> usize {
    1
}

/// Test function used by the exact asymptotic-variance comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    #[default]
    Energy,
    FirstCoordinate,
}

/// Exact-analysis section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactConfig {
    /// Stepsizes for the stationarity-bias report of the uncorrected chain.
    #[serde(default)]
    pub bias_alphas: Vec<f64>,
    /// Stepsize for the spectral comparison; absent skips it.
    #[serde(default)]
    pub comparison_alpha: Option<f64>,
    #[serde(default)]
    pub test_function: TestFunction,
}

/// The full experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    /// Single-proposal shorthand; merged ahead of `proposals`.
    #[serde(default)]
    pub proposal: Option<ProposalConfig>,
    #[serde(default)]
    pub proposals: Vec<ProposalConfig>,
    pub run: RunConfig,
    #[serde(default)]
    pub exact: Option<ExactConfig>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// All proposals in declaration order, the singular one first.
    pub fn all_proposals(&self) -> Vec<&ProposalConfig> {
        self.proposal.iter().chain(self.proposals.iter()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let proposals = self.all_proposals();
        if proposals.is_empty() {
            return Err(Error::InvalidSpec(
                "config declares no proposals".into(),
            ));
        }
        for p in &proposals {
            if p.name.is_empty() {
                return Err(Error::InvalidSpec("proposal name is empty".into()));
            }
            p.spec.validate()?;
        }
        let mut names: Vec<&str> = proposals.iter().map(|p| p.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != proposals.len() {
            return Err(Error::InvalidSpec("duplicate proposal names".into()));
        }
        if self.run.seeds.is_empty() {
            return Err(Error::InvalidSpec("run.seeds must be non-empty".into()));
        }
        if self.run.steps == 0 || self.run.steps <= self.run.burn_in {
            return Err(Error::InvalidSpec(
                "run.steps must exceed run.burn_in".into(),
            ));
        }
        if self.run.thinning == 0 {
            return Err(Error::InvalidSpec("run.thinning must be at least 1".into()));
        }
        if let ModelConfig::Facility { seed, file, .. } = &self.model {
            if seed.is_none() && file.is_none() {
                return Err(Error::InvalidSpec(
                    "facility model needs either a seed or a utility file".into(),
                ));
            }
        }
        Ok(())
    }

    /// Instantiates the model; `base_dir` anchors relative file paths.
    pub fn build_model(&self, base_dir: &Path) -> Result<Box<dyn EnergyModel>> {
        let resolve = |p: &PathBuf| -> PathBuf {
            if p.is_absolute() {
                p.clone()
            } else {
                base_dir.join(p)
            }
        };
        Ok(match &self.model {
            ModelConfig::Ising {
                height,
                width,
                coupling,
                bias,
            } => Box::new(IsingModel::new(*height, *width, *coupling, *bias)?),
            ModelConfig::Potts {
                height,
                width,
                levels,
                coupling,
                bias,
            } => Box::new(PottsModel::new(
                *height,
                *width,
                *levels,
                *coupling,
                bias.clone(),
            )?),
            ModelConfig::Facility {
                n_facilities,
                m_customers,
                penalty,
                seed,
                file,
            } => match file {
                Some(path) => Box::new(FacilityLocationModel::from_csv(
                    &resolve(path),
                    *penalty,
                )?),
                None => Box::new(FacilityLocationModel::generate_with_penalty(
                    *m_customers,
                    *n_facilities,
                    &MixtureParams::default(),
                    *penalty,
                    seed.expect("validated: seed or file present"),
                )?),
            },
            ModelConfig::Table { file } => {
                let text = fs::read_to_string(resolve(file))?;
                let table = SetFunctionTable::from_reader(text.as_bytes())?;
                Box::new(TableModel::from_set_function(&table)?)
            }
        })
    }
}

/// A ready-to-run proposal spec by family name, used by CLI shortcuts.
pub fn spec_by_name(name: &str) -> Option<ProposalSpec> {
    match name {
        "newton-mh" => Some(ProposalSpec::newton(1.0, true)),
        "newton" => Some(ProposalSpec::newton(0.2, false)),
        "lb" => Some(ProposalSpec::locally_balanced(true)),
        "gibbs" => Some(ProposalSpec::gibbs()),
        _ => None,
    }
}
