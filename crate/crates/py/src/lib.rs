//! Python bindings. Structured results (flow reports, certificates, Segre
//! checks) come back as plain dicts built from the same JSON the CLI emits.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use quiverforge::charvar::{self, Permutation, SymPoly};
use quiverforge::linalg::CMatrix;
use quiverforge::moment_flow::{self, FlowConfig};
use quiverforge::quiver::{self, DimensionVector, Quiver};
use quiverforge::representation::{self, Representation, StabilityData};
use quiverforge::{segre, tensor_rep};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn err(e: quiverforge::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for quiverforge::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(err)
    }
}

/// Round-trips a serializable value through `json.loads`.
fn to_py<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = quiverforge::json::to_string(v).py()?;
    py.import("json")?.call_method1("loads", (text,))
}

fn matrix(rows: &[Vec<Complex64>], shape: (usize, usize)) -> PyResult<CMatrix> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(PyValueError::new_err(format!("expected a {}x{} matrix", shape.0, shape.1)));
    }
    Ok(CMatrix::from_fn(shape.0, shape.1, |i, j| rows[i][j]))
}

fn square(rows: &[Vec<Complex64>]) -> PyResult<CMatrix> {
    matrix(rows, (rows.len(), rows.len()))
}

fn rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn stability(theta: Vec<f64>, sigma: Option<Vec<f64>>) -> PyResult<StabilityData> {
    let sigma = sigma.unwrap_or_else(|| vec![1.0; theta.len()]);
    StabilityData::new(sigma, theta).py()
}

fn flow_config(step: Option<f64>, tol: Option<f64>, max_iters: Option<usize>, kappa: f64) -> FlowConfig {
    let d = FlowConfig::default();
    FlowConfig {
        step: step.unwrap_or(d.step),
        tol: tol.unwrap_or(d.tol),
        max_iters: max_iters.unwrap_or(d.max_iters),
        kappa,
        ..d
    }
}

#[pyclass(name = "Quiver", module = "quiverforge_py", from_py_object)]
#[derive(Clone)]
struct PyQuiver {
    inner: Quiver,
}

#[pymethods]
impl PyQuiver {
    /// `Quiver(n, [(tail, head), ...])`, vertices labelled `0..n`.
    #[new]
    fn new(vertices: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyQuiver {
            inner: Quiver::with_vertices(vertices, &edges).py()?,
        })
    }

    #[staticmethod]
    fn kronecker(n: usize) -> Self {
        PyQuiver {
            inner: Quiver::kronecker(n),
        }
    }

    #[staticmethod]
    fn jordan() -> Self {
        PyQuiver { inner: Quiver::jordan() }
    }

    #[staticmethod]
    fn a_type(m: usize) -> Self {
        PyQuiver {
            inner: Quiver::a_type(m),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyQuiver {
            inner: serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        quiverforge::json::to_string(&self.inner).py()
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().iter().map(|e| (e.tail, e.head)).collect()
    }

    #[pyo3(signature = (d, e = None))]
    fn euler_form(&self, d: Vec<usize>, e: Option<Vec<usize>>) -> PyResult<i64> {
        let d = DimensionVector(d);
        let e = e.map(DimensionVector).unwrap_or_else(|| d.clone());
        self.inner.euler_form(&d, &e).py()
    }

    /// Paths as lists of edge ids, head first.
    fn paths(&self, source: usize, target: usize, max_len: usize) -> PyResult<Vec<Vec<usize>>> {
        let paths = self.inner.enumerate_paths(source, target, max_len).py()?;
        Ok(paths.iter().map(|p| p.edges().to_vec()).collect())
    }

    fn opposite(&self) -> Self {
        PyQuiver {
            inner: self.inner.opposite(),
        }
    }

    fn tensor(&self, other: &PyQuiver) -> PyResult<Self> {
        Ok(PyQuiver {
            inner: quiver::tensor_quiver(&self.inner, &other.inner).py()?.quiver,
        })
    }

    fn __eq__(&self, other: &PyQuiver) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Quiver({}, {:?})", self.inner.vertex_count(), self.edges())
    }
}

#[pyclass(name = "Representation", module = "quiverforge_py", from_py_object)]
#[derive(Clone)]
struct PyRepresentation {
    inner: Representation,
}

#[pymethods]
impl PyRepresentation {
    /// One `d_head x d_tail` matrix of complex numbers per edge, in edge order.
    #[new]
    fn new(quiver: &PyQuiver, dims: Vec<usize>, matrices: Vec<Vec<Vec<Complex64>>>) -> PyResult<Self> {
        let q = &quiver.inner;
        let dims = DimensionVector(dims);
        dims.check(q).py()?;
        if matrices.len() != q.edge_count() {
            return Err(PyValueError::new_err(format!("expected {} matrices", q.edge_count())));
        }
        let ms = q
            .edges()
            .iter()
            .zip(&matrices)
            .map(|(e, m)| matrix(m, (dims[e.head], dims[e.tail])))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyRepresentation {
            inner: Representation::new(q, dims, ms).py()?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (quiver, dims, seed = 0))]
    fn random(quiver: &PyQuiver, dims: Vec<usize>, seed: u64) -> PyResult<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(PyRepresentation {
            inner: Representation::random(&quiver.inner, DimensionVector(dims), &mut rng).py()?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyRepresentation {
            inner: serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        quiverforge::json::to_string(&self.inner).py()
    }

    #[getter]
    fn quiver(&self) -> PyQuiver {
        PyQuiver {
            inner: self.inner.quiver().clone(),
        }
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims().0.clone()
    }

    #[getter]
    fn matrices(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.inner.matrices().iter().map(rows).collect()
    }

    fn is_thin(&self) -> bool {
        self.inner.is_thin()
    }

    fn tensor(&self, other: &PyRepresentation) -> PyResult<Self> {
        Ok(PyRepresentation {
            inner: tensor_rep::tensor(&self.inner, &other.inner).py()?.rep,
        })
    }

    fn dual(&self) -> Self {
        PyRepresentation {
            inner: tensor_rep::dual(&self.inner),
        }
    }

    /// `(verdict, witness)` for a thin representation.
    #[pyo3(signature = (theta, sigma = None))]
    fn thin_stability(&self, theta: Vec<f64>, sigma: Option<Vec<f64>>) -> PyResult<(String, Option<Vec<usize>>)> {
        let r = representation::thin_stability(&self.inner, &stability(theta, sigma)?).py()?;
        let verdict = serde_json::to_value(r.verdict).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok((verdict.as_str().unwrap_or_default().to_string(), r.witness))
    }

    /// Largest Frobenius norm of the vortex residual at the balanced `theta_prime`.
    #[pyo3(signature = (theta_prime, kappa = -1.0))]
    fn vortex_residual(&self, theta_prime: Vec<f64>, kappa: f64) -> PyResult<f64> {
        let r = moment_flow::vortex_residual(&self.inner, &theta_prime, kappa).py()?;
        Ok(moment_flow::max_residual(&r))
    }

    /// Runs the flow; returns `(limit, report)`.
    #[pyo3(signature = (theta_prime, step = None, tol = None, max_iters = None, kappa = -1.0))]
    fn flow<'py>(
        &self,
        py: Python<'py>,
        theta_prime: Vec<f64>,
        step: Option<f64>,
        tol: Option<f64>,
        max_iters: Option<usize>,
        kappa: f64,
    ) -> PyResult<(Self, Bound<'py, PyAny>)> {
        let cfg = flow_config(step, tol, max_iters, kappa);
        let (end, report) = py.detach(|| moment_flow::kempf_ness_flow(&self.inner, &theta_prime, &cfg)).py()?;
        Ok((PyRepresentation { inner: end }, to_py(py, &report)?))
    }

    #[pyo3(signature = (theta, tol = None, max_iters = None, kappa = -1.0))]
    fn certify<'py>(
        &self,
        py: Python<'py>,
        theta: Vec<f64>,
        tol: Option<f64>,
        max_iters: Option<usize>,
        kappa: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cfg = flow_config(None, tol, max_iters, kappa);
        let c = py.detach(|| moment_flow::certify_polystable(&self.inner, &theta, &cfg)).py()?;
        to_py(py, &c)
    }

    #[pyo3(signature = (theta_prime, kappa = -1.0, tol = 1e-6))]
    fn tangent_dim<'py>(&self, py: Python<'py>, theta_prime: Vec<f64>, kappa: f64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &moment_flow::moduli_tangent_dim(&self.inner, &theta_prime, kappa, tol).py()?)
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn segre_check<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &segre::in_segre_image(&self.inner, tol).py()?)
    }

    fn __eq__(&self, other: &PyRepresentation) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Representation(dims={:?})", self.inner.dims().0)
    }
}

/// The tensor of two vortex solutions against the tensor vortex equation.
#[pyfunction]
#[pyo3(signature = (left, theta_left, right, theta_right, tol = 1e-6, kappa = -1.0))]
fn verify_tensor_polystability<'py>(
    py: Python<'py>,
    left: &PyRepresentation,
    theta_left: Vec<f64>,
    right: &PyRepresentation,
    theta_right: Vec<f64>,
    tol: f64,
    kappa: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = moment_flow::verify_tensor_polystability(&left.inner, &theta_left, &right.inner, &theta_right, tol, kappa)
        .py()?;
    to_py(py, &r)
}

#[pyfunction]
fn balance_theta(theta: Vec<f64>, dims: Vec<usize>) -> PyResult<Vec<f64>> {
    representation::balance_theta(&theta, &DimensionVector(dims)).py()
}

/// One-line notation, 1-based.
#[pyfunction]
fn tau(n: usize, m: usize, sigma: Vec<usize>, sigma_prime: Vec<usize>) -> PyResult<Vec<usize>> {
    let t = charvar::tau(n, m, &Permutation::new(sigma).py()?, &Permutation::new(sigma_prime).py()?).py()?;
    Ok(t.one_line().to_vec())
}

/// Substitution on a polynomial given in its JSON form; returns JSON.
#[pyfunction]
fn phi(poly_json: &str, dims: Vec<usize>) -> PyResult<String> {
    let p: SymPoly = serde_json::from_str(poly_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    quiverforge::json::to_string(&charvar::phi_substitute_r(&p, &dims).py()?).py()
}

/// `(is_grid, factors)` for a multiset of tuples.
#[pyfunction]
#[pyo3(signature = (tuples, dims, tol = charvar::DEFAULT_GRID_TOL))]
fn grid_test(
    tuples: Vec<Vec<Complex64>>,
    dims: Vec<usize>,
    tol: f64,
) -> PyResult<(bool, Option<Vec<Vec<Complex64>>>)> {
    let g = charvar::grid_test_r(&tuples, &dims, tol).py()?;
    Ok((g.is_grid, g.factors))
}

/// `[e_1, ..., e_N]` of a square matrix.
#[pyfunction]
fn char_poly_invariants(a: Vec<Vec<Complex64>>) -> PyResult<Vec<Complex64>> {
    charvar::char_poly_invariants(&square(&a)?).py()
}

#[pyfunction]
#[pyo3(signature = (matrices, tol = 1e-8, seed = 0))]
fn joint_spectrum(matrices: Vec<Vec<Vec<Complex64>>>, tol: f64, seed: u64) -> PyResult<Vec<Vec<Complex64>>> {
    let ms = matrices.iter().map(|m| square(m)).collect::<PyResult<Vec<_>>>()?;
    charvar::joint_spectrum(&ms, tol, seed).py()
}

#[pymodule]
fn quiverforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQuiver>()?;
    m.add_class::<PyRepresentation>()?;
    m.add_function(wrap_pyfunction!(verify_tensor_polystability, m)?)?;
    m.add_function(wrap_pyfunction!(balance_theta, m)?)?;
    m.add_function(wrap_pyfunction!(tau, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(grid_test, m)?)?;
    m.add_function(wrap_pyfunction!(char_poly_invariants, m)?)?;
    m.add_function(wrap_pyfunction!(joint_spectrum, m)?)?;
    Ok(())
}
