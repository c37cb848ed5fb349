use std::path::PathBuf;

use num_complex::Complex64;
use otoc_core::channel::{Channel, Picture};
use otoc_core::experiment::{run_to_dir, ExperimentConfig};
use otoc_core::otoc::{self as engine, OtocValue};
use otoc_core::propagate::Integrator;
use otoc_core::record::OtocRecord;
use otoc_core::special::{self, DephasingBasis};
use otoc_core::spin_chain::{self, DissipationSpec, SpinChainModel};
use otoc_core::{BipartiteSpace, CMatrix, OtocError};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

type Rows = Vec<Vec<Complex64>>;

fn err(e: OtocError) -> PyErr {
    match e {
        OtocError::NonConvergence { .. } | OtocError::NotUnital { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_matrix(rows: &Rows) -> PyResult<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(PyValueError::new_err("matrix rows must be nonempty and of equal length"));
    }
    Ok(CMatrix::from_fn(n, rows[0].len(), |i, j| rows[i][j]))
}

fn to_rows(m: &CMatrix) -> Rows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn picture(name: &str) -> PyResult<Picture> {
    match name.to_ascii_lowercase().as_str() {
        "heisenberg" => Ok(Picture::Heisenberg),
        "schrodinger" => Ok(Picture::Schrodinger),
        other => Err(PyValueError::new_err(format!("unknown picture {other:?}"))),
    }
}

fn value_dict<'py>(py: Python<'py>, v: &OtocValue) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("G", v.g)?;
    d.set_item("G1", v.g1)?;
    d.set_item("G2", v.g2)?;
    d.set_item("method", v.method.as_str())?;
    d.set_item("std_err", v.std_err)?;
    Ok(d)
}

fn record_dict<'py>(py: Python<'py>, r: &OtocRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", r.t)?;
    d.set_item("G", r.g)?;
    d.set_item("G1", r.g1)?;
    d.set_item("G2", r.g2)?;
    d.set_item("method", r.method.as_str())?;
    for (k, v) in &r.extra {
        d.set_item(k, v)?;
    }
    Ok(d)
}

/// A quantum channel on a bipartite space `A ⊗ B`.
#[pyclass(name = "Channel", module = "otoc")]
struct PyChannel {
    inner: Channel,
}

#[pymethods]
impl PyChannel {
    #[staticmethod]
    #[pyo3(signature = (d_a, d_b, kraus, picture = "heisenberg"))]
    fn from_kraus(d_a: usize, d_b: usize, kraus: Vec<Rows>, picture: &str) -> PyResult<Self> {
        let space = BipartiteSpace::new(d_a, d_b).map_err(err)?;
        let ops = kraus.iter().map(to_matrix).collect::<PyResult<Vec<_>>>()?;
        let inner = Channel::from_kraus(space, ops, self::picture(picture)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (d_a, d_b, u, picture = "heisenberg"))]
    fn unitary(d_a: usize, d_b: usize, u: Rows, picture: &str) -> PyResult<Self> {
        let space = BipartiteSpace::new(d_a, d_b).map_err(err)?;
        let inner = Channel::unitary(space, to_matrix(&u)?, self::picture(picture)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dims(&self) -> (usize, usize) {
        let s = self.inner.space();
        (s.d_a(), s.d_b())
    }

    #[getter]
    fn picture(&self) -> &'static str {
        match self.inner.picture() {
            Picture::Heisenberg => "heisenberg",
            Picture::Schrodinger => "schrodinger",
        }
    }

    fn apply(&self, x: Rows) -> PyResult<Rows> {
        Ok(to_rows(&self.inner.apply(&to_matrix(&x)?).map_err(err)?))
    }

    fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    fn compose(&self, other: &PyChannel) -> PyResult<Self> {
        Ok(Self { inner: self.inner.compose(&other.inner).map_err(err)? })
    }

    fn kraus(&self) -> PyResult<Vec<Rows>> {
        Ok(self.inner.kraus().map_err(err)?.iter().map(to_rows).collect())
    }

    fn choi(&self) -> Rows {
        to_rows(&self.inner.choi())
    }

    fn is_unital(&self) -> bool {
        self.inner.is_unital()
    }

    fn is_trace_preserving(&self) -> bool {
        self.inner.is_trace_preserving()
    }

    fn is_unitary(&self) -> bool {
        self.inner.is_unitary()
    }

    /// Exact OTOC with its `G1`/`G2` split.
    fn otoc<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        value_dict(py, &engine::g_exact(&self.inner).map_err(err)?)
    }

    fn otoc_choi(&self) -> PyResult<(f64, f64)> {
        let c = engine::g_choi(&self.inner).map_err(err)?;
        Ok((c.value.g, c.distance_form))
    }

    #[pyo3(signature = (n_pairs, seed = 0))]
    fn otoc_monte_carlo<'py>(&self, py: Python<'py>, n_pairs: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        value_dict(py, &engine::g_commutator_mc(&self.inner, n_pairs, seed).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        let (a, b) = self.dims();
        format!("Channel(d_a={a}, d_b={b}, picture={})", self.picture())
    }
}

/// OTOC of the unitary channel `X ↦ U X U†`.
#[pyfunction]
fn otoc_unitary<'py>(py: Python<'py>, d_a: usize, d_b: usize, u: Rows) -> PyResult<Bound<'py, PyDict>> {
    let space = BipartiteSpace::new(d_a, d_b).map_err(err)?;
    value_dict(py, &engine::g_closed(&space, &to_matrix(&u)?).map_err(err)?)
}

#[pyfunction]
fn operator_entanglement(d_a: usize, d_b: usize, u: Rows) -> PyResult<f64> {
    let space = BipartiteSpace::new(d_a, d_b).map_err(err)?;
    engine::operator_entanglement(&space, &to_matrix(&u)?).map_err(err)
}

#[pyfunction]
fn entangling_power(d: usize, u: Rows) -> PyResult<f64> {
    let space = BipartiteSpace::new(d, d).map_err(err)?;
    engine::entangling_power(&space, &to_matrix(&u)?).map_err(err)
}

/// Dephasing channel in the basis given by the columns of `u`.
#[pyfunction]
fn dephasing_channel(d_a: usize, d_b: usize, u: Rows) -> PyResult<PyChannel> {
    let space = BipartiteSpace::new(d_a, d_b).map_err(err)?;
    let basis = DephasingBasis::from_unitary(space, &to_matrix(&u)?).map_err(err)?;
    Ok(PyChannel { inner: basis.dephasing_channel(Picture::Heisenberg) })
}

#[pyfunction]
fn otoc_dephasing(d_a: usize, d_b: usize, u: Rows) -> PyResult<f64> {
    let space = BipartiteSpace::new(d_a, d_b).map_err(err)?;
    let basis = DephasingBasis::from_unitary(space, &to_matrix(&u)?).map_err(err)?;
    Ok(special::g_dephasing(&basis))
}

#[pyfunction]
fn bell_dephasing() -> PyChannel {
    PyChannel { inner: DephasingBasis::bell().dephasing_channel(Picture::Heisenberg) }
}

#[pyfunction]
fn example1_curve(t: f64) -> f64 {
    special::example1_curve(t)
}

#[pyfunction]
fn example2_curve(t: f64, lambda: f64) -> f64 {
    special::example2_curve(t, lambda)
}

#[pyfunction]
fn example2_channel(t: f64, lambda: f64) -> PyResult<PyChannel> {
    Ok(PyChannel { inner: special::example2_channel(t, lambda).map_err(err)? })
}

/// OTOC time series of a dissipative spin chain with subsystem A = the first `cut` sites.
#[pyfunction]
#[pyo3(signature = (model, sites, params, alpha = 0.0, gamma = 0.0, t_max = 30.0, n = 200, cut = 1))]
#[allow(clippy::too_many_arguments)]
fn spin_chain_series<'py>(
    py: Python<'py>,
    model: &str,
    sites: usize,
    params: Vec<f64>,
    alpha: f64,
    gamma: f64,
    t_max: f64,
    n: usize,
    cut: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let m = match (model, params.as_slice()) {
        ("tfim", [g, h]) => SpinChainModel::tfim(sites, *g, *h),
        ("xxz_nnn", [j, delta, j2, delta2]) => SpinChainModel::xxz_nnn(sites, *j, *delta, *j2, *delta2),
        _ => {
            return Err(PyValueError::new_err(
                "model must be \"tfim\" with [g, h] or \"xxz_nnn\" with [j, delta, j2, delta2]",
            ))
        }
    }
    .map_err(err)?;
    let diss = DissipationSpec::new(alpha, gamma).map_err(err)?;
    let times = spin_chain::uniform_grid(0.0, t_max, n).map_err(err)?;
    let records = py
        .detach(|| spin_chain::otoc_timeseries(&m, &diss, cut, &times, Integrator::taylor()))
        .map_err(err)?;
    records.iter().map(|r| record_dict(py, r)).collect()
}

/// Run a TOML experiment config, writing tables and a manifest; returns the written paths.
#[pyfunction]
#[pyo3(signature = (path, out = None, seed = None))]
fn run_config(py: Python<'_>, path: PathBuf, out: Option<PathBuf>, seed: Option<u64>) -> PyResult<Vec<String>> {
    let (mut config, text) = ExperimentConfig::load(&path).map_err(err)?;
    if let Some(o) = out {
        config.output.dir = o;
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    config.validate().map_err(err)?;
    let manifest = py.detach(|| run_to_dir(&config, &text)).map_err(err)?;
    let dir = &config.output.dir;
    let mut files: Vec<String> = manifest.files.iter().map(|f| dir.join(f).display().to_string()).collect();
    files.push(dir.join("manifest.json").display().to_string());
    Ok(files)
}

#[pymodule]
fn otoc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChannel>()?;
    m.add_function(wrap_pyfunction!(otoc_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(operator_entanglement, m)?)?;
    m.add_function(wrap_pyfunction!(entangling_power, m)?)?;
    m.add_function(wrap_pyfunction!(dephasing_channel, m)?)?;
    m.add_function(wrap_pyfunction!(otoc_dephasing, m)?)?;
    m.add_function(wrap_pyfunction!(bell_dephasing, m)?)?;
    m.add_function(wrap_pyfunction!(example1_curve, m)?)?;
    m.add_function(wrap_pyfunction!(example2_curve, m)?)?;
    m.add_function(wrap_pyfunction!(example2_channel, m)?)?;
    m.add_function(wrap_pyfunction!(spin_chain_series, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
