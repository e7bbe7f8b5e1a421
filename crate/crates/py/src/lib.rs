//! Python bindings: energy models, chain runs, exact analysis, and
//! diagnostics, mirroring the core crate's main operations.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use newton_mcmc::chain::{run_chain, ChainParams};
use newton_mcmc::diagnostics::{
    acceptance_stats, dimension_wise_majority_vote, effective_sample_size, exact_mean,
};
use newton_mcmc::domain::{DiscreteState, Domain, DEFAULT_STATE_CAP};
use newton_mcmc::exact::{verify_spectral_comparison, verify_stationarity_bias};
use newton_mcmc::model::EnergyModel;
use newton_mcmc::models::{
    FacilityLocationModel, IsingModel, MixtureParams, PottsModel, TableModel,
};
use newton_mcmc::multilinear::{multilinear_extension, multilinear_gradient, SetFunctionTable};
use newton_mcmc::proposal::{ProposalFamily, ProposalSpec};

fn to_py_err(err: newton_mcmc::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

enum ModelKind {
    Ising(IsingModel),
    Potts(PottsModel),
    Facility(FacilityLocationModel),
    Table(TableModel),
}

impl ModelKind {
    fn as_dyn(&self) -> &dyn EnergyModel {
        match self {
            ModelKind::Ising(m) => m,
            ModelKind::Potts(m) => m,
            ModelKind::Facility(m) => m,
            ModelKind::Table(m) => m,
        }
    }
}

/// A discrete energy model `U(θ)`; the target distribution is
/// `π(θ) ∝ exp(U(θ))`.
#[pyclass(name = "Model")]
struct PyModel {
    inner: ModelKind,
}

#[pymethods]
impl PyModel {
    /// Ising lattice with coupling `a` and field `b` (non-periodic grid).
    #[staticmethod]
    fn ising(height: usize, width: usize, coupling: f64, bias: f64) -> PyResult<Self> {
        Ok(PyModel {
            inner: ModelKind::Ising(
                IsingModel::new(height, width, coupling, bias).map_err(to_py_err)?,
            ),
        })
    }

    /// Potts lattice with `levels` labels and a per-level bias vector.
    #[staticmethod]
    fn potts(
        height: usize,
        width: usize,
        levels: usize,
        coupling: f64,
        bias: Vec<f64>,
    ) -> PyResult<Self> {
        Ok(PyModel {
            inner: ModelKind::Potts(
                PottsModel::new(height, width, levels, coupling, bias).map_err(to_py_err)?,
            ),
        })
    }

    /// Facility location with utilities drawn from the default two-component
    /// Gaussian mixture.
    #[staticmethod]
    fn facility(
        n_facilities: usize,
        m_customers: usize,
        penalty: f64,
        seed: u64,
    ) -> PyResult<Self> {
        Ok(PyModel {
            inner: ModelKind::Facility(
                FacilityLocationModel::generate_with_penalty(
                    m_customers,
                    n_facilities,
                    &MixtureParams::default(),
                    penalty,
                    seed,
                )
                .map_err(to_py_err)?,
            ),
        })
    }

    /// Binary model from an explicit table of `2^d` energies in
    /// lexicographic state order.
    #[staticmethod]
    fn table(dim: usize, energies: Vec<f64>) -> PyResult<Self> {
        let domain = Domain::binary(dim).map_err(to_py_err)?;
        Ok(PyModel {
            inner: ModelKind::Table(TableModel::new(domain, energies).map_err(to_py_err)?),
        })
    }

    fn dim(&self) -> usize {
        self.inner.as_dyn().domain().dim()
    }

    fn levels(&self) -> usize {
        self.inner.as_dyn().domain().levels()
    }

    /// `U(θ)` at a level vector.
    fn energy(&self, values: Vec<u8>) -> PyResult<f64> {
        let model = self.inner.as_dyn();
        let state = DiscreteState::new(values, model.domain()).map_err(to_py_err)?;
        Ok(model.energy(&state))
    }

    /// Exact per-coordinate mean of π by enumeration.
    fn exact_mean(&self) -> PyResult<Vec<f64>> {
        exact_mean(self.inner.as_dyn(), DEFAULT_STATE_CAP)
            .map(|gt| gt.mean)
            .map_err(to_py_err)
    }
}

/// Output of a chain run.
#[pyclass(name = "RunResult")]
struct PyRunResult {
    #[pyo3(get)]
    mean_state: Vec<f64>,
    #[pyo3(get)]
    energies: Vec<f64>,
    #[pyo3(get)]
    acceptance_rate: f64,
    #[pyo3(get)]
    mean_changed_per_accepted: f64,
    #[pyo3(get)]
    final_state: Vec<u8>,
}

fn parse_spec(family: &str, alpha: f64, mh: bool) -> PyResult<ProposalSpec> {
    let family = match family {
        "newton" => ProposalFamily::Newton,
        "locally-balanced" | "lb" => ProposalFamily::LocallyBalanced,
        "gibbs" => ProposalFamily::Gibbs,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown proposal family {other:?}; expected newton, locally-balanced, or gibbs"
            )))
        }
    };
    let spec = ProposalSpec {
        family,
        alpha,
        mh,
        decay: None,
    };
    spec.validate().map_err(to_py_err)?;
    Ok(spec)
}

/// Runs one chain and returns its summary.
#[pyfunction]
#[pyo3(signature = (model, family, alpha, mh, steps, seed, burn_in=0, thinning=1, stream=0))]
#[allow(clippy::too_many_arguments)]
fn run(
    model: &PyModel,
    family: &str,
    alpha: f64,
    mh: bool,
    steps: usize,
    seed: u64,
    burn_in: usize,
    thinning: usize,
    stream: u64,
) -> PyResult<PyRunResult> {
    let spec = parse_spec(family, alpha, mh)?;
    let params = ChainParams {
        spec,
        steps,
        burn_in,
        thinning,
        seed,
        stream,
        initial: None,
    };
    let inner = model.inner.as_dyn();
    let trace = run_chain(inner, &params).map_err(to_py_err)?;
    let stats = acceptance_stats(&trace.records);
    Ok(PyRunResult {
        mean_state: trace.mean_state(),
        energies: trace.sample_energies(inner),
        acceptance_rate: stats.rate,
        mean_changed_per_accepted: stats.mean_changed_accepted,
        final_state: trace.final_state.values().to_vec(),
    })
}

/// Effective sample size of a scalar series (initial-positive-sequence rule).
#[pyfunction]
fn ess(series: Vec<f64>) -> PyResult<f64> {
    effective_sample_size(&series).map_err(to_py_err)
}

/// Indicator vector selecting the `count` coordinates with the largest means.
#[pyfunction]
fn majority_vote(means: Vec<f64>, count: usize) -> PyResult<Vec<u8>> {
    dimension_wise_majority_vote(&means, count).map_err(to_py_err)
}

/// Multilinear extension of a set function (values in subset-mask order,
/// coordinate 0 the most significant bit) at a point of the unit cube.
#[pyfunction]
fn extension(dim: usize, values: Vec<f64>, theta: Vec<f64>) -> PyResult<f64> {
    let table = SetFunctionTable::new(dim, values).map_err(to_py_err)?;
    multilinear_extension(&table, &theta).map_err(to_py_err)
}

/// Gradient of the multilinear extension.
#[pyfunction]
fn extension_gradient(dim: usize, values: Vec<f64>, theta: Vec<f64>) -> PyResult<Vec<f64>> {
    let table = SetFunctionTable::new(dim, values).map_err(to_py_err)?;
    multilinear_gradient(&table, &theta).map_err(to_py_err)
}

/// Checks the stationarity-bias bound of the uncorrected coordinatewise
/// chain on an Ising energy. Returns one `(alpha, l1_distance, bound)` tuple
/// per stepsize.
#[pyfunction]
fn stationarity_bias(
    model: &PyModel,
    alphas: Vec<f64>,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let ModelKind::Ising(ising) = &model.inner else {
        return Err(PyValueError::new_err(
            "stationarity_bias needs a model with a certified quadratic form (ising)",
        ));
    };
    let reports =
        verify_stationarity_bias(&ising.to_quadratic(), &alphas).map_err(to_py_err)?;
    Ok(reports
        .iter()
        .map(|r| (r.alpha, r.l1_distance, r.bound))
        .collect())
}

/// Checks the spectral comparison between the corrected coordinatewise
/// kernel and the full-space informed kernel, using the energy as the test
/// function. Returns `(constant, gap_full, gap_coord, gap_ok, var_ok)`.
#[pyfunction]
fn spectral_comparison(
    model: &PyModel,
    alpha: f64,
) -> PyResult<(f64, f64, f64, bool, bool)> {
    let inner = model.inner.as_dyn();
    let states = newton_mcmc::domain::enumerate_states_capped(inner.domain(), DEFAULT_STATE_CAP)
        .map_err(to_py_err)?;
    let h: Vec<f64> = states.iter().map(|s| inner.energy(s)).collect();
    let report =
        verify_spectral_comparison(inner, alpha, &h, DEFAULT_STATE_CAP).map_err(to_py_err)?;
    Ok((
        report.constant,
        report.gap_full_space,
        report.gap_coordinatewise,
        report.gap_bound_holds,
        report.asymvar_bound_holds,
    ))
}

#[pymodule]
fn newton_mcmc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(ess, m)?)?;
    m.add_function(wrap_pyfunction!(majority_vote, m)?)?;
    m.add_function(wrap_pyfunction!(extension, m)?)?;
    m.add_function(wrap_pyfunction!(extension_gradient, m)?)?;
    m.add_function(wrap_pyfunction!(stationarity_bias, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_comparison, m)?)?;
    Ok(())
}
