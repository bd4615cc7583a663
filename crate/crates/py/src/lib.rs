//! Python bindings: matrices, products, means, gap assemblers and the
//! falsification harness. Every call uses the default tolerances.

use chebcert::campaign;
use chebcert::chebyshev::{self, GapReport, PointwiseStudy, StudyGrid};
use chebcert::means::{self, MeanSpec};
use chebcert::products;
use chebcert::{Error, OperatorField, Tolerances, WeightVector};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: Error) -> PyErr {
    match e {
        Error::ConvergenceFailure { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

/// Dense complex Hermitian matrix.
#[pyclass(name = "HermitianMatrix", module = "pychebcert", skip_from_py_object)]
#[derive(Clone)]
pub struct PyHermitian {
    inner: chebcert::HermitianMatrix,
}

impl From<chebcert::HermitianMatrix> for PyHermitian {
    fn from(inner: chebcert::HermitianMatrix) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyHermitian {
    /// Build from nested lists of real or complex numbers; the input is
    /// symmetrized and rejected if it is not nearly Hermitian.
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        chebcert::HermitianMatrix::from_complex_rows(&rows, &tol())
            .map(Self::from)
            .map_err(err)
    }

    #[staticmethod]
    fn identity(dim: usize) -> Self {
        chebcert::HermitianMatrix::identity(dim).into()
    }

    #[staticmethod]
    fn diagonal(values: Vec<f64>) -> Self {
        chebcert::HermitianMatrix::diagonal(&values).into()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn to_list(&self) -> Vec<Vec<Complex64>> {
        let n = self.inner.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.inner.entry(i, j)).collect())
            .collect()
    }

    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.spectral_decompose().map_err(err)?.eigenvalues)
    }

    fn min_eigenvalue(&self) -> PyResult<f64> {
        self.inner.min_eigenvalue().map_err(err)
    }

    fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    fn is_psd(&self) -> PyResult<bool> {
        self.inner.is_psd(&tol()).map_err(err)
    }

    /// `self ≤ other` in the Loewner order.
    fn loewner_leq(&self, other: PyRef<'_, Self>) -> PyResult<bool> {
        self.inner.loewner_leq(&other.inner, &tol()).map_err(err)
    }

    /// Real power of a PSD matrix.
    fn power(&self, p: f64) -> PyResult<Self> {
        self.inner.power_psd(p, &tol()).map(Self::from).map_err(err)
    }

    fn __add__(&self, other: PyRef<'_, Self>) -> PyResult<Self> {
        self.inner
            .checked_add(&other.inner)
            .map(Self::from)
            .map_err(err)
    }

    fn __sub__(&self, other: PyRef<'_, Self>) -> PyResult<Self> {
        self.inner
            .checked_sub(&other.inner)
            .map(Self::from)
            .map_err(err)
    }

    fn __mul__(&self, factor: f64) -> Self {
        self.inner.scaled(factor).into()
    }

    fn __rmul__(&self, factor: f64) -> Self {
        self.inner.scaled(factor).into()
    }

    fn __eq__(&self, other: PyRef<'_, Self>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("HermitianMatrix(dim={})", self.inner.dim())
    }
}

/// Result of a gap assembly.
#[pyclass(name = "GapReport", module = "pychebcert", frozen, skip_from_py_object)]
pub struct PyGapReport {
    #[pyo3(get)]
    name: String,
    #[pyo3(get)]
    min_eig: f64,
    #[pyo3(get)]
    scale: f64,
    #[pyo3(get)]
    verdict: String,
    #[pyo3(get)]
    inputs_digest: Option<String>,
    gap: chebcert::HermitianMatrix,
}

impl From<GapReport> for PyGapReport {
    fn from(r: GapReport) -> Self {
        Self {
            name: r.name,
            min_eig: r.min_eig,
            scale: r.scale,
            verdict: if r.verdict.is_pass() { "pass" } else { "fail" }.to_owned(),
            inputs_digest: r.inputs_digest,
            gap: r.gap,
        }
    }
}

#[pymethods]
impl PyGapReport {
    #[getter]
    fn gap(&self) -> PyHermitian {
        self.gap.clone().into()
    }

    #[getter]
    fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    fn __repr__(&self) -> String {
        format!(
            "GapReport(name={:?}, verdict={:?}, min_eig={:e}, scale={:e})",
            self.name, self.verdict, self.min_eig, self.scale
        )
    }
}

fn field(ms: &[PyRef<'_, PyHermitian>]) -> PyResult<OperatorField> {
    OperatorField::indexed(ms.iter().map(|m| m.inner.clone()).collect()).map_err(err)
}

fn weights(w: Vec<f64>) -> PyResult<WeightVector> {
    WeightVector::new(w).map_err(err)
}

#[pyfunction]
fn hadamard(a: PyRef<'_, PyHermitian>, b: PyRef<'_, PyHermitian>) -> PyResult<PyHermitian> {
    products::hadamard(&a.inner, &b.inner)
        .map(PyHermitian::from)
        .map_err(err)
}

#[pyfunction]
fn kronecker(a: PyRef<'_, PyHermitian>, b: PyRef<'_, PyHermitian>) -> PyResult<PyHermitian> {
    products::kronecker(&a.inner, &b.inner)
        .map(PyHermitian::from)
        .map_err(err)
}

/// Weighted power mean `A m_{r,t} B`; `t` weights `B`.
#[pyfunction]
fn power_mean(
    a: PyRef<'_, PyHermitian>,
    b: PyRef<'_, PyHermitian>,
    r: f64,
    t: f64,
) -> PyResult<PyHermitian> {
    let spec = MeanSpec::new(r, t).map_err(err)?;
    means::power_mean(&a.inner, &b.inner, spec, &tol())
        .map(PyHermitian::from)
        .map_err(err)
}

#[pyfunction]
fn check_path_identity(
    r: f64,
    p: f64,
    q: f64,
    s: f64,
    a: PyRef<'_, PyHermitian>,
    b: PyRef<'_, PyHermitian>,
) -> PyResult<f64> {
    means::check_path_identity(r, p, q, s, &a.inner, &b.inner, &tol()).map_err(err)
}

/// Randomized axiom check; returns `{"passed", "failures", "min_relative_slack"}`.
#[pyfunction]
fn check_mean_axioms<'py>(
    py: Python<'py>,
    r: f64,
    t: f64,
    trials: usize,
    dim: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = MeanSpec::new(r, t).map_err(err)?;
    let report = means::check_mean_axioms(spec, trials, dim, seed, &tol()).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("passed", report.passed())?;
    out.set_item("failures", report.failures.len())?;
    out.set_item("min_relative_slack", report.min_relative_slack)?;
    Ok(out)
}

#[pyfunction]
fn gap_two_weight(
    f: Vec<PyRef<'_, PyHermitian>>,
    g: Vec<PyRef<'_, PyHermitian>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
) -> PyResult<PyGapReport> {
    chebyshev::gap_two_weight(
        &field(&f)?,
        &field(&g)?,
        &weights(alpha)?,
        &weights(beta)?,
        &tol(),
    )
    .map(PyGapReport::from)
    .map_err(err)
}

#[pyfunction]
fn gap_discrete(
    f: Vec<PyRef<'_, PyHermitian>>,
    g: Vec<PyRef<'_, PyHermitian>>,
    omega: Vec<f64>,
    nu: Vec<f64>,
) -> PyResult<PyGapReport> {
    chebyshev::gap_discrete(
        &field(&f)?,
        &field(&g)?,
        &weights(omega)?,
        &weights(nu)?,
        &tol(),
    )
    .map(PyGapReport::from)
    .map_err(err)
}

/// Interpolational-mean gap; both fields must be positive and increasing.
#[pyfunction]
fn gap_mean(
    f: Vec<PyRef<'_, PyHermitian>>,
    g: Vec<PyRef<'_, PyHermitian>>,
    alpha: Vec<f64>,
    r: f64,
    lam: f64,
) -> PyResult<PyGapReport> {
    chebyshev::gap_mean(&field(&f)?, &field(&g)?, &weights(alpha)?, r, lam, &tol())
        .map(PyGapReport::from)
        .map_err(err)
}

#[pyfunction]
fn pointwise_mean_gap(
    a: PyRef<'_, PyHermitian>,
    b: PyRef<'_, PyHermitian>,
    r: f64,
    lam: f64,
) -> PyResult<PyGapReport> {
    chebyshev::pointwise_mean_gap(&a.inner, &b.inner, r, lam, &tol())
        .map(PyGapReport::from)
        .map_err(err)
}

/// Builds the refinement chain and returns its check summary as a dict.
#[pyfunction]
fn q_chain_check<'py>(
    py: Python<'py>,
    f: Vec<PyRef<'_, PyHermitian>>,
    g: Vec<PyRef<'_, PyHermitian>>,
    omega: Vec<f64>,
    nu: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let chain = chebyshev::q_chain(&field(&f)?, &field(&g)?, &weights(omega)?, &weights(nu)?)
        .map_err(err)?;
    let c = chain.check(&tol()).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("passed", c.passed())?;
    out.set_item("increments_psd", c.increments_psd)?;
    out.set_item("monotone", c.monotone)?;
    out.set_item("min_increment_eig", c.min_increment_eig)?;
    out.set_item("endpoint_residual", c.endpoint_residual)?;
    out.set_item("scale", c.scale)?;
    Ok(out)
}

/// Scalar study of the pointwise mean inequality over the default grid.
/// Returns `(valid_exponents, refuted)` with `refuted` a list of `(r, lam)`.
#[pyfunction]
fn pointwise_study() -> (Vec<f64>, Vec<(f64, f64)>) {
    let study = PointwiseStudy::run(StudyGrid::default(), &tol());
    let refuted = study.refuted().map(|c| (c.r, c.lambda)).collect();
    (study.valid_exponents(), refuted)
}

/// Returns the replay digest of the first failing cell, or `None`.
#[pyfunction]
#[pyo3(signature = (inequality, generator, trials, seed = 0))]
fn falsify(
    inequality: &str,
    generator: &str,
    trials: usize,
    seed: u64,
) -> PyResult<Option<String>> {
    let report =
        campaign::falsify(inequality, generator, trials, seed, None, &tol()).map_err(err)?;
    Ok(report.first_failure.map(|r| r.inputs_digest))
}

#[pyfunction]
fn replay(digest: &str) -> PyResult<PyGapReport> {
    campaign::replay(digest, &tol())
        .map(PyGapReport::from)
        .map_err(err)
}

#[pymodule]
fn pychebcert(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHermitian>()?;
    m.add_class::<PyGapReport>()?;
    m.add_function(wrap_pyfunction!(hadamard, m)?)?;
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(power_mean, m)?)?;
    m.add_function(wrap_pyfunction!(check_path_identity, m)?)?;
    m.add_function(wrap_pyfunction!(check_mean_axioms, m)?)?;
    m.add_function(wrap_pyfunction!(gap_two_weight, m)?)?;
    m.add_function(wrap_pyfunction!(gap_discrete, m)?)?;
    m.add_function(wrap_pyfunction!(gap_mean, m)?)?;
    m.add_function(wrap_pyfunction!(pointwise_mean_gap, m)?)?;
    m.add_function(wrap_pyfunction!(q_chain_check, m)?)?;
    m.add_function(wrap_pyfunction!(pointwise_study, m)?)?;
    m.add_function(wrap_pyfunction!(falsify, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    Ok(())
}
