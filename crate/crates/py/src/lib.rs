//! Python bindings. Trees cross the boundary as Newick strings and
//! structured results as dicts or JSON text.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tbrkern::maf::exact_tbr_distance;
use tbrkern::reduce::{EligibilityMode, KernelConfig};
use tbrkern::verify::{run_suites, Suite, VerifyConfig};
use tbrkern::{kernelize_with, parse_newick, PhyloTree};

fn err(e: tbrkern::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn pair(t: &str, tp: &str) -> PyResult<(PhyloTree, PhyloTree)> {
    let text = format!("{t}\n{tp}\n");
    tbrkern::parse_instance(&text).map_err(err)
}

fn config(exact_eligibility: bool) -> KernelConfig {
    if exact_eligibility {
        KernelConfig::exact(EligibilityMode::DEFAULT_CAP)
    } else {
        KernelConfig::default()
    }
}

/// Canonical Newick form of a tree.
#[pyfunction]
fn canonical_newick(newick: &str) -> PyResult<String> {
    Ok(parse_newick(newick).map_err(err)?.to_newick())
}

/// Kernelizes a pair. The result dict has `kernel` (two Newick strings),
/// `offset`, `original_taxa`, `kernel_taxa` and `trace` (JSON text).
#[pyfunction]
#[pyo3(signature = (t, tp, exact_eligibility = false))]
fn kernelize<'py>(py: Python<'py>, t: &str, tp: &str, exact_eligibility: bool) -> PyResult<Bound<'py, PyDict>> {
    let (t, tp) = pair(t, tp)?;
    let r = kernelize_with(&t, &tp, &config(exact_eligibility)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("kernel", (r.t().to_newick(), r.tp().to_newick()))?;
    d.set_item("offset", r.offset)?;
    d.set_item("original_taxa", r.original_taxa)?;
    d.set_item("kernel_taxa", r.kernel_taxa)?;
    d.set_item("trace", r.trace_file().to_json())?;
    Ok(d)
}

/// Exact TBR distance, or None when it exceeds `k_max`. The pair is
/// kernelized first.
#[pyfunction]
#[pyo3(signature = (t, tp, k_max = 6))]
fn distance(t: &str, tp: &str, k_max: usize) -> PyResult<Option<usize>> {
    let (t, tp) = pair(t, tp)?;
    let r = kernelize_with(&t, &tp, &KernelConfig::default()).map_err(err)?;
    let Some(budget) = k_max.checked_sub(r.offset) else {
        return Ok(None);
    };
    let cert = exact_tbr_distance(r.t(), r.tp(), budget).map_err(err)?;
    Ok(cert.map(|c| c.k + r.offset))
}

/// The irreducible pair at distance `k` (k ≥ 3) with its certificate.
#[pyfunction]
fn tight_instance<'py>(py: Python<'py>, k: usize) -> PyResult<Bound<'py, PyDict>> {
    let ti = tbrkern::tight::tight_instance(k).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("t", ti.t.to_newick())?;
    d.set_item("tp", ti.tp.to_newick())?;
    let character: Vec<(String, u8)> = ti
        .character
        .assignment
        .iter()
        .map(|(x, &s)| (x.to_string(), s))
        .collect();
    d.set_item("character", PyDict::from_sequence(&character.into_pyobject(py)?)?)?;
    let forest: Vec<Vec<String>> = ti
        .forest
        .blocks
        .iter()
        .map(|b| b.iter().map(|x| x.to_string()).collect())
        .collect();
    d.set_item("forest", forest)?;
    d.set_item("lf_t", ti.lf_t)?;
    d.set_item("lf_tprime", ti.lf_tprime)?;
    Ok(d)
}

/// A seeded random pair `k_moves` TBR moves apart at most.
#[pyfunction]
fn random_instance(n: usize, k_moves: usize, seed: u64) -> PyResult<(String, String)> {
    let (t, tp) = tbrkern::random_instance(n, k_moves, seed).map_err(err)?;
    Ok((t.to_newick(), tp.to_newick()))
}

/// Runs verification suites (all by default) and returns the reports as
/// JSON text.
#[pyfunction]
#[pyo3(signature = (seed = 0, suites = None))]
fn verify(py: Python<'_>, seed: u64, suites: Option<Vec<String>>) -> PyResult<String> {
    let suites: Vec<Suite> = match suites {
        None => Suite::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|s| s.parse().map_err(err))
            .collect::<PyResult<_>>()?,
    };
    let cfg = VerifyConfig { seed, ..Default::default() };
    let reports = py.detach(|| run_suites(&suites, &cfg)).map_err(err)?;
    Ok(serde_json::to_string(&reports).expect("reports serialize"))
}

#[pymodule]
fn tbrkern_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(canonical_newick, m)?)?;
    m.add_function(wrap_pyfunction!(kernelize, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(tight_instance, m)?)?;
    m.add_function(wrap_pyfunction!(random_instance, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
