//! Python bindings. Channels cross the boundary as JSON strings in the same
//! format the command-line tool reads; entropies are in nats.

use chanent::asymptotics::{fig1_experiment, free_moment_check};
use chanent::channels::{Channel, SchmidtKind};
use chanent::entropy::{lemma1_gap, map_entropy as map_entropy_rs, OptimizerConfig};
use chanent::io::{channel_from_json, channel_to_json, ChannelSpec};
use chanent::qubit_unital::{f_of_p as f_of_p_rs, verify_theorem2 as verify_theorem2_rs};
use chanent::rng::DEFAULT_SEED;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn to_py(e: chanent::Error) -> PyErr {
    match e {
        chanent::Error::ConvergenceFailure | chanent::Error::SingularMarginal(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn load(channel: &str) -> PyResult<Channel> {
    channel_from_json(channel).map_err(to_py)
}

fn kind(nu: &str) -> PyResult<SchmidtKind> {
    nu.parse().map_err(to_py)
}

/// Von Neumann entropy of the normalized Choi state.
#[pyfunction]
fn map_entropy(channel: &str) -> PyResult<f64> {
    map_entropy_rs(&load(channel)?).map_err(to_py)
}

/// Normalized Choi matrix `J_Φ` as nested lists of complex numbers.
#[pyfunction]
fn choi_state(channel: &str) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(load(channel)?.jamiolkowski().state.matrix().to_rows())
}

/// `h_map`, `h_channel`, `gap` and optimizer diagnostics.
#[pyfunction]
#[pyo3(signature = (channel, restarts = 8, seed = DEFAULT_SEED))]
fn channel_entropy<'py>(py: Python<'py>, channel: &str, restarts: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let phi = load(channel)?;
    let r = lemma1_gap(&phi, &OptimizerConfig::with_restarts(restarts, seed)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("h_map", r.h_map)?;
    d.set_item("h_channel", r.h_channel)?;
    d.set_item("gap", r.gap)?;
    d.set_item("converged", r.optimizer.converged)?;
    d.set_item("evaluations", r.optimizer.evaluations)?;
    d.set_item("argmax_lambda", r.optimizer.argmax_lambda)?;
    Ok(d)
}

#[pyfunction]
fn f_of_p(channel: &str, p: f64) -> PyResult<f64> {
    f_of_p_rs(&load(channel)?, p).map_err(to_py)
}

/// Both sides of the unital-qubit identity, from the general optimizer and
/// from the one-parameter search.
#[pyfunction]
#[pyo3(signature = (channel, restarts = 8, seed = DEFAULT_SEED))]
fn verify_theorem2<'py>(py: Python<'py>, channel: &str, restarts: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let r = verify_theorem2_rs(&load(channel)?, &OptimizerConfig::with_restarts(restarts, seed)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("lhs", r.lhs)?;
    d.set_item("rhs", r.rhs)?;
    d.set_item("delta", r.delta)?;
    d.set_item("lhs_from_p", r.lhs_from_p)?;
    d.set_item("delta_from_p", r.delta_from_p)?;
    d.set_item("p_star", r.p_star)?;
    Ok(d)
}

/// Kraus-form JSON of a seeded random channel; `k` defaults to `d²`.
#[pyfunction]
#[pyo3(signature = (d, k = None, seed = DEFAULT_SEED))]
fn random_channel(d: usize, k: Option<usize>, seed: u64) -> PyResult<String> {
    let mut params = serde_json::Map::new();
    params.insert("d".into(), d.into());
    if let Some(k) = k {
        params.insert("k".into(), k.into());
    }
    let phi = ChannelSpec::named("random", params, seed).build().map_err(to_py)?;
    channel_to_json(&phi).map_err(to_py)
}

/// Aggregate curve points as a list of dicts.
#[pyfunction]
#[pyo3(signature = (d_list, trials, nu = None, seed = DEFAULT_SEED))]
fn fig1<'py>(
    py: Python<'py>,
    d_list: Vec<usize>,
    trials: usize,
    nu: Option<Vec<String>>,
    seed: u64,
) -> PyResult<Bound<'py, PyList>> {
    let kinds = match nu {
        Some(v) => v.iter().map(|s| kind(s)).collect::<PyResult<Vec<_>>>()?,
        None => SchmidtKind::ALL.to_vec(),
    };
    let table = fig1_experiment(&d_list, &kinds, trials, seed).map_err(to_py)?;
    let out = PyList::empty(py);
    for p in table.points {
        let d = PyDict::new(py);
        d.set_item("d", p.d)?;
        d.set_item("nu_kind", p.nu_kind.tag())?;
        d.set_item("mean_d", p.mean_d)?;
        d.set_item("stderr", p.stderr)?;
        d.set_item("trials", p.trials)?;
        d.set_item("entropy_bound", p.entropy_bound)?;
        d.set_item("reference", p.reference)?;
        out.append(d)?;
    }
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (d, trials, k = None, nu = "dir-d-1", seed = DEFAULT_SEED))]
fn free_moments<'py>(
    py: Python<'py>,
    d: usize,
    trials: usize,
    k: Option<usize>,
    nu: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = free_moment_check(d, k.unwrap_or(d * d), kind(nu)?, trials, seed).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("m1", r.m1)?;
    out.set_item("m1_predicted", r.m1_predicted)?;
    out.set_item("z_m1", r.z_m1)?;
    out.set_item("m2", r.m2)?;
    out.set_item("m2_predicted", r.m2_predicted)?;
    out.set_item("z_m2", r.z_m2)?;
    Ok(out)
}

#[pymodule]
pub fn pychanent(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    m.add_function(wrap_pyfunction!(map_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(choi_state, m)?)?;
    m.add_function(wrap_pyfunction!(channel_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(f_of_p, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem2, m)?)?;
    m.add_function(wrap_pyfunction!(random_channel, m)?)?;
    m.add_function(wrap_pyfunction!(fig1, m)?)?;
    m.add_function(wrap_pyfunction!(free_moments, m)?)?;
    Ok(())
}
