//! Python bindings: a `Domain` class plus free functions mirroring the
//! library's solvers and experiment checks. Values cross the boundary as
//! plain floats, lists, and dicts so the module needs no Python-side
//! wrapper code.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use robinlab_core::{
    ball_lambda1 as core_ball_lambda1, check_faber_krahn as core_check_faber_krahn,
    check_two_balls as core_check_two_balls, crossover as core_crossover, make_dk as core_make_dk,
    parse_domain, scale_domain, spectrum_of, wentzell_eigs_detailed, BoundaryParams, DomainCurves,
    DomainSpec, Error, ExperimentReport, SolveOptions, Spectrum, WentzellParams,
};

fn to_py_err(e: Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn solve_options(solver: &str, refine: usize, tol: f64) -> PyResult<SolveOptions> {
    Ok(SolveOptions { solver: solver.parse().map_err(to_py_err)?, refine, tol })
}

fn boundary(bc: &str, p: f64, alpha: f64) -> PyResult<BoundaryParams> {
    match bc {
        "robin" => Ok(BoundaryParams::robin(p, alpha)),
        "neumann" => Ok(BoundaryParams::neumann(p)),
        "dirichlet" => Ok(BoundaryParams::dirichlet(p)),
        other => Err(PyValueError::new_err(format!(
            "unknown boundary condition '{other}' (expected robin|neumann|dirichlet)"
        ))),
    }
}

/// A computational domain: interval, rectangle, disk, ball, mesh file, or
/// a disjoint union. Construct from the same DSL the CLI accepts.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Domain {
    inner: DomainSpec,
}

#[pymethods]
impl Domain {
    #[new]
    fn new(dsl: &str) -> PyResult<Self> {
        parse_domain(dsl).map(|inner| Domain { inner }).map_err(to_py_err)
    }

    fn dim(&self) -> u32 {
        self.inner.dim()
    }

    fn volume(&self) -> f64 {
        robinlab_core::volume(&self.inner)
    }

    fn n_components(&self) -> usize {
        self.inner.components().len()
    }

    /// Homothety t·Ω.
    fn scale(&self, t: f64) -> PyResult<Domain> {
        scale_domain(&self.inner, t).map(|inner| Domain { inner }).map_err(to_py_err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Domain(\"{}\")", self.inner)
    }
}

fn spectrum_to_dicts(py: Python<'_>, s: &Spectrum) -> PyResult<Vec<Py<PyDict>>> {
    let mut rows = Vec::new();
    let mut index = 1usize;
    for e in s.entries() {
        let d = PyDict::new(py);
        d.set_item("index", index)?;
        d.set_item("value", e.value)?;
        d.set_item("multiplicity", e.multiplicity)?;
        d.set_item("component", e.provenance.component)?;
        d.set_item("mode", &e.provenance.mode)?;
        d.set_item("solver", &e.provenance.solver)?;
        d.set_item("err", e.provenance.abs_error)?;
        rows.push(d.unbind());
        index += e.multiplicity;
    }
    Ok(rows)
}

fn report_to_dict(py: Python<'_>, r: &ExperimentReport) -> PyResult<Py<PyDict>> {
    let verdict = match r.verdict {
        robinlab_core::Verdict::Holds => "holds",
        robinlab_core::Verdict::Violated => "violated",
        robinlab_core::Verdict::Inconclusive => "inconclusive",
    };
    let d = PyDict::new(py);
    d.set_item("experiment", &r.experiment)?;
    d.set_item("inputs", &r.inputs)?;
    d.set_item("verdict", verdict)?;
    d.set_item("alpha_star", r.alpha_star)?;
    d.set_item("notes", r.notes.clone())?;
    let mut cases = Vec::new();
    for c in &r.cases {
        let row = PyDict::new(py);
        row.set_item("label", &c.label)?;
        row.set_item("lhs", c.lhs)?;
        row.set_item("rhs", c.rhs)?;
        row.set_item("margin", c.margin)?;
        row.set_item("tolerance", c.tolerance)?;
        row.set_item(
            "outcome",
            match c.outcome {
                robinlab_core::CaseOutcome::Holds => "holds",
                robinlab_core::CaseOutcome::Violated => "violated",
                robinlab_core::CaseOutcome::Inconclusive => "inconclusive",
                robinlab_core::CaseOutcome::Extremal => "extremal",
            },
        )?;
        cases.push(row.unbind());
    }
    d.set_item("cases", cases)?;
    Ok(d.unbind())
}

/// Full spectrum rows (one dict per eigenvalue entry, with multiplicity
/// and provenance).
#[pyfunction]
#[pyo3(signature = (domain, alpha=1.0, p=2.0, k=1, bc="robin", solver="auto", refine=0, tol=1e-10))]
#[allow(clippy::too_many_arguments)]
fn spectrum(
    py: Python<'_>,
    domain: &Domain,
    alpha: f64,
    p: f64,
    k: usize,
    bc: &str,
    solver: &str,
    refine: usize,
    tol: f64,
) -> PyResult<Vec<Py<PyDict>>> {
    let opts = solve_options(solver, refine, tol)?;
    let s = spectrum_of(&domain.inner, &boundary(bc, p, alpha)?, k, &opts).map_err(to_py_err)?;
    spectrum_to_dicts(py, &s)
}

/// First k eigenvalues as a flat list of floats (multiplicities expanded).
#[pyfunction]
#[pyo3(signature = (domain, alpha=1.0, p=2.0, k=1, bc="robin", solver="auto", refine=0, tol=1e-10))]
#[allow(clippy::too_many_arguments)]
fn eigenvalues(
    domain: &Domain,
    alpha: f64,
    p: f64,
    k: usize,
    bc: &str,
    solver: &str,
    refine: usize,
    tol: f64,
) -> PyResult<Vec<f64>> {
    let opts = solve_options(solver, refine, tol)?;
    let s = spectrum_of(&domain.inner, &boundary(bc, p, alpha)?, k, &opts).map_err(to_py_err)?;
    Ok(s.flattened())
}

/// Ground state of the radial p-Laplacian on an N-ball, by shooting.
#[pyfunction]
#[pyo3(signature = (n_dim, radius=1.0, alpha=1.0, p=2.0))]
fn ball_lambda1(
    py: Python<'_>,
    n_dim: u32,
    radius: f64,
    alpha: f64,
    p: f64,
) -> PyResult<Py<PyDict>> {
    let r = core_ball_lambda1(n_dim, radius, alpha, p).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("lambda1", r.lambda1)?;
    d.set_item("est_error", r.est_error)?;
    d.set_item("residual", r.residual)?;
    d.set_item("steps", r.steps)?;
    Ok(d.unbind())
}

/// Generalized Wentzell eigenvalues Λ₁..Λ_k as fixed points of the Robin
/// eigencurves; one dict per level.
#[pyfunction]
#[pyo3(signature = (domain, beta=1.0, gamma=1.0, k=1, refine=0, tol=1e-10))]
fn wentzell_eigs(
    py: Python<'_>,
    domain: &Domain,
    beta: f64,
    gamma: f64,
    k: usize,
    refine: usize,
    tol: f64,
) -> PyResult<Vec<Py<PyDict>>> {
    let params = WentzellParams::new(beta, gamma).map_err(to_py_err)?;
    let opts = solve_options("auto", refine, tol)?;
    let curves = DomainCurves::with_options(domain.inner.clone(), opts).map_err(to_py_err)?;
    let eigs = wentzell_eigs_detailed(&params, k, &curves).map_err(to_py_err)?;
    let mut rows = Vec::new();
    for e in &eigs {
        let d = PyDict::new(py);
        d.set_item("n", e.n)?;
        d.set_item("alpha", e.alpha)?;
        d.set_item("lambda", e.lambda)?;
        d.set_item("residual", e.residual)?;
        d.set_item("iterations", e.iterations)?;
        d.set_item("curve_error", e.curve_error)?;
        rows.push(d.unbind());
    }
    Ok(rows)
}

/// λ₁(Ω, α) against the equal-volume ball.
#[pyfunction]
#[pyo3(signature = (domain, alpha=1.0, p=2.0, refine=0, tol=1e-10))]
fn check_faber_krahn(
    py: Python<'_>,
    domain: &Domain,
    alpha: f64,
    p: f64,
    refine: usize,
    tol: f64,
) -> PyResult<Py<PyDict>> {
    let opts = solve_options("auto", refine, tol)?;
    let r = core_check_faber_krahn(&domain.inner, &BoundaryParams::robin(p, alpha), &opts)
        .map_err(to_py_err)?;
    report_to_dict(py, &r)
}

/// λ₂(Ω, α) against two disjoint half-volume balls.
#[pyfunction]
#[pyo3(signature = (domain, alpha=1.0, p=2.0, refine=0, tol=1e-10))]
fn check_two_balls(
    py: Python<'_>,
    domain: &Domain,
    alpha: f64,
    p: f64,
    refine: usize,
    tol: f64,
) -> PyResult<Py<PyDict>> {
    let opts = solve_options("auto", refine, tol)?;
    let r = core_check_two_balls(&domain.inner, &BoundaryParams::robin(p, alpha), &opts)
        .map_err(to_py_err)?;
    report_to_dict(py, &r)
}

/// Sign change of λ_k(Ω, α) − λ_k(D_k, α) over a logarithmic α grid.
#[pyfunction]
#[pyo3(signature = (domain, k=2, alpha_min=0.01, alpha_max=1000.0, steps=25, refine=0, tol=1e-10))]
#[allow(clippy::too_many_arguments)]
fn crossover(
    py: Python<'_>,
    domain: &Domain,
    k: usize,
    alpha_min: f64,
    alpha_max: f64,
    steps: usize,
    refine: usize,
    tol: f64,
) -> PyResult<Py<PyDict>> {
    let opts = solve_options("auto", refine, tol)?;
    let r = core_crossover(&domain.inner, k, alpha_min, alpha_max, steps, &opts)
        .map_err(to_py_err)?;
    report_to_dict(py, &r)
}

/// D_k: the disjoint union of k equal balls of total volume `measure`.
#[pyfunction]
#[pyo3(signature = (measure, k, dim=2))]
fn make_dk(measure: f64, k: usize, dim: u32) -> PyResult<Domain> {
    core_make_dk(measure, k, dim).map(|inner| Domain { inner }).map_err(to_py_err)
}

/// Bessel function J_m(x).
#[pyfunction]
fn bessel_j(m: u32, x: f64) -> f64 {
    robinlab_core::bessel::bessel_j(m, x)
}

/// s-th positive zero of J_m.
#[pyfunction]
fn bessel_zero(m: u32, s: usize) -> f64 {
    robinlab_core::bessel::bessel_zero(m, s)
}

#[pymodule]
fn robinlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Domain>()?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(ball_lambda1, m)?)?;
    m.add_function(wrap_pyfunction!(wentzell_eigs, m)?)?;
    m.add_function(wrap_pyfunction!(check_faber_krahn, m)?)?;
    m.add_function(wrap_pyfunction!(check_two_balls, m)?)?;
    m.add_function(wrap_pyfunction!(crossover, m)?)?;
    m.add_function(wrap_pyfunction!(make_dk, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_zero, m)?)?;
    Ok(())
}
