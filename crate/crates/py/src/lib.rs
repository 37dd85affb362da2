//! Python bindings. Matrices cross the boundary as lists of rows of complex
//! numbers; numeric errors surface as `ValueError`.

use nhspec::coulomb::{self, Coupling};
use nhspec::hatano_nelson::{self as hn, Boundary};
use nhspec::report::{self, Scenario, ScenarioConfig};
use nhspec::{hilbert, path, pt, C64, CMat};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

type Rows = Vec<Vec<C64>>;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_mat(rows: &Rows) -> PyResult<CMat> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(err("ragged matrix"));
    }
    Ok(CMat::from_fn(n, m, |r, c| rows[r][c]))
}

fn to_rows(a: &CMat) -> Rows {
    a.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn boundary(bc: &str) -> PyResult<Boundary> {
    match bc {
        "open" => Ok(Boundary::Open),
        "periodic" => Ok(Boundary::Periodic),
        _ => Err(err(format!("boundary must be 'open' or 'periodic', got '{bc}'"))),
    }
}

/// Coefficient space with a diagonal positive weight per basis vector.
#[pyclass(name = "WeightedSpace", frozen)]
pub struct PyWeightedSpace {
    inner: nhspec::WeightedBasisSpace,
}

#[pymethods]
impl PyWeightedSpace {
    #[new]
    #[pyo3(signature = (weights, bulk_buffer=None))]
    fn new(weights: Vec<f64>, bulk_buffer: Option<usize>) -> PyResult<Self> {
        let dim = weights.len();
        let buf = bulk_buffer.unwrap_or_else(|| hilbert::default_bulk_buffer(dim).min(dim.saturating_sub(1)));
        Ok(Self { inner: hilbert::build_weighted_space(dim, &weights, buf).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    fn inner(&self, f: Vec<C64>, g: Vec<C64>) -> PyResult<C64> {
        self.inner.inner(&f, &g).map_err(err)
    }

    /// Adjoint of a matrix with respect to this space's scalar product.
    fn adjoint(&self, a: Rows) -> PyResult<Rows> {
        let a = to_mat(&a)?;
        if a.nrows() != self.inner.dim() || a.ncols() != self.inner.dim() {
            return Err(err("matrix does not match the space dimension"));
        }
        Ok(to_rows(&hilbert::weighted_adjoint(&a, self.inner.weights())))
    }

    #[pyo3(signature = (a, bulk_only=true))]
    fn hermiticity_defect(&self, a: Rows, bulk_only: bool) -> PyResult<f64> {
        let rep = nhspec::OperatorRep::new(to_mat(&a)?, nhspec::BasisTag::Lattice).map_err(err)?;
        hilbert::hermiticity_defect(&rep, &self.inner, bulk_only).map_err(err)
    }
}

/// Eigenvalues of a square matrix.
#[pyfunction]
fn spectrum(a: Rows) -> PyResult<Vec<C64>> {
    nhspec::linalg::eigenvalues(&to_mat(&a)?).map_err(err)
}

/// Optimal-matching distance between two spectra.
#[pyfunction]
fn spectral_distance(s1: Vec<C64>, s2: Vec<C64>) -> PyResult<f64> {
    hilbert::spectral_distance(&s1, &s2).map_err(err)
}

/// Asymmetric-hopping tight-binding chain.
#[pyclass(name = "Lattice", frozen)]
pub struct PyLattice {
    inner: hn::LatticeModel,
}

#[pyclass(name = "Delocalization", frozen, get_all)]
pub struct PyDelocalization {
    pub g_c: f64,
    pub bracket: f64,
    pub tau: f64,
    pub g_grid: Vec<f64>,
    pub max_imag: Vec<f64>,
}

#[pymethods]
impl PyLattice {
    #[new]
    #[pyo3(signature = (potential, g=0.0, t=1.0, bc="open"))]
    fn new(potential: Vec<f64>, g: f64, t: f64, bc: &str) -> PyResult<Self> {
        let inner = hn::build_lattice(potential.len(), t, g, potential, boundary(bc)?).map_err(err)?;
        Ok(Self { inner })
    }

    /// Lattice with a seeded uniform disorder potential on `[-w/2, w/2]`.
    #[staticmethod]
    #[pyo3(signature = (sites, w, seed, g=0.0, bc="open"))]
    fn disordered(sites: usize, w: f64, seed: u64, g: f64, bc: &str) -> PyResult<Self> {
        Self::new(hn::random_potential(sites, w, seed), g, 1.0, bc)
    }

    #[getter]
    fn sites(&self) -> usize {
        self.inner.sites
    }

    #[getter]
    fn g(&self) -> f64 {
        self.inner.g
    }

    fn with_g(&self, g: f64) -> Self {
        Self { inner: self.inner.with_g(g) }
    }

    fn matrix(&self) -> Rows {
        to_rows(&self.inner.matrix())
    }

    fn spectrum(&self) -> PyResult<Vec<C64>> {
        self.inner.spectrum().map_err(err)
    }

    #[pyo3(signature = (g_grid, tau=None))]
    fn critical_g(&self, g_grid: Vec<f64>, tau: Option<f64>) -> PyResult<PyDelocalization> {
        let s = hn::critical_g_scan(&self.inner, &g_grid, tau).map_err(err)?;
        Ok(PyDelocalization { g_c: s.g_c, bracket: s.bracket, tau: s.tau, g_grid: s.g_grid, max_imag: s.max_imag })
    }

    /// `(similarity defect, spectral distance to g = 0)` of the imaginary gauge map.
    fn gauge_check(&self) -> PyResult<(f64, f64)> {
        let r = hn::imaginary_gauge_check(&self.inner).map_err(err)?;
        Ok((r.similarity_defect, r.spectral_distance))
    }

    /// `(sign pairing, conjugation closure)` defects.
    fn pairing_defect(&self) -> PyResult<(f64, f64)> {
        let r = hn::pairing_defect(&self.inner).map_err(err)?;
        Ok((r.sign_pairing, r.closure))
    }
}

/// Antilinear operator `Theta v = P conj(v)` for a permutation `P`.
#[pyclass(name = "PtOperator", frozen)]
pub struct PyPtOperator {
    inner: pt::AntilinearOp,
}

#[pyclass(name = "PairAnalysis", frozen, get_all)]
pub struct PyPairAnalysis {
    pub eigenvalues: Vec<C64>,
    /// `"unbroken"`, `"broken"`, `"cluster"` or `"unclassified"` per eigenvalue.
    pub modes: Vec<String>,
    pub closure_defect: f64,
    pub swap_defect: f64,
}

#[pymethods]
impl PyPtOperator {
    /// `permutation=None` gives lattice reflection.
    #[new]
    #[pyo3(signature = (dim, permutation=None))]
    fn new(dim: usize, permutation: Option<Vec<usize>>) -> PyResult<Self> {
        let parity = permutation.map_or(pt::Parity::LatticeReflection, pt::Parity::Custom);
        Ok(Self { inner: pt::build_pt_operator(dim, parity).map_err(err)? })
    }

    fn defect(&self, h: Rows) -> PyResult<f64> {
        pt::pt_defect(&to_mat(&h)?, &self.inner).map_err(err)
    }

    fn symmetrize(&self, a: Rows) -> PyResult<Rows> {
        Ok(to_rows(&pt::pt_symmetrize(&to_mat(&a)?, &self.inner)))
    }

    fn analyze(&self, h: Rows) -> PyResult<PyPairAnalysis> {
        let a = pt::spectrum_pair_analysis(&to_mat(&h)?, &self.inner).map_err(err)?;
        let modes = a
            .modes
            .iter()
            .map(|m| match m {
                pt::ModeClass::Unbroken => "unbroken",
                pt::ModeClass::Broken { .. } => "broken",
                pt::ModeClass::Cluster => "cluster",
                pt::ModeClass::Unclassified => "unclassified",
            })
            .map(String::from)
            .collect();
        Ok(PyPairAnalysis { eigenvalues: a.eigenvalues, modes, closure_defect: a.closure_defect, swap_defect: a.swap_defect })
    }
}

/// Energy of level `n` on the rotated (`rotated=True`) or Hermitian branch.
#[pyfunction]
#[pyo3(signature = (n, alpha, rotated=true))]
fn coulomb_energy(n: usize, alpha: f64, rotated: bool) -> PyResult<f64> {
    let c = if rotated { Coupling::Rotated(alpha) } else { Coupling::Hermitian(alpha) };
    coulomb::coulomb_spectrum(n, c).map_err(err)
}

/// `(largest singular value, largest column norm)` of the truncated momentum matrix.
#[pyfunction]
fn momentum_norm(n: usize) -> PyResult<(f64, f64)> {
    let m = nhspec::cannata::momentum_norm(n).map_err(err)?;
    Ok((m.largest_singular_value, m.largest_column_norm))
}

/// `(hermitian, angle residual, grid defect)` for the line `x = a + b s`.
#[pyfunction]
#[pyo3(signature = (a, b, half_length=8.0, samples=256))]
fn straight_line_check(a: C64, b: C64, half_length: f64, samples: usize) -> PyResult<(bool, f64, f64)> {
    let r = path::straight_line_hermiticity_check(a, b, half_length, samples).map_err(err)?;
    Ok((r.hermitian, r.angle_residual, r.grid_defect))
}

#[pyfunction]
fn list_scenarios() -> Vec<(&'static str, &'static str)> {
    Scenario::ALL.iter().map(|s| (s.name(), s.summary())).collect()
}

/// Run a scenario from config text; returns `(report json, {file name: contents})`.
#[pyfunction]
#[pyo3(signature = (config, seed=None))]
fn run_scenario(config: &str, seed: Option<u64>) -> PyResult<(String, std::collections::BTreeMap<String, String>)> {
    let mut cfg = ScenarioConfig::parse_unvalidated(config).map_err(err)?;
    if seed.is_some() {
        cfg.seed = seed;
    }
    let out = report::run_scenario(&cfg).map_err(err)?;
    Ok((out.report.to_json(), out.side_files.into_iter().collect()))
}

#[pymodule]
pub fn pynhspec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", report::VERSION)?;
    m.add_class::<PyWeightedSpace>()?;
    m.add_class::<PyLattice>()?;
    m.add_class::<PyDelocalization>()?;
    m.add_class::<PyPtOperator>()?;
    m.add_class::<PyPairAnalysis>()?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_distance, m)?)?;
    m.add_function(wrap_pyfunction!(coulomb_energy, m)?)?;
    m.add_function(wrap_pyfunction!(momentum_norm, m)?)?;
    m.add_function(wrap_pyfunction!(straight_line_check, m)?)?;
    m.add_function(wrap_pyfunction!(list_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
