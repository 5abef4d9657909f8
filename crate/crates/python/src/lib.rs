//! Python bindings: classical sequence tools plus the embedded-code pipeline
//! (encode, insertion plus deletion channel, decode).

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qinsdel::decoder::{self, ChannelSpec, DecodeReport};
use qinsdel::editgraph;
use qinsdel::harness::{self, CodeConfig, SigmaKind};
use qinsdel::io::StateDoc;
use qinsdel::mhcode::{self, MHCode};
use qinsdel::qsim::{self, Ensemble, PureState};
use qinsdel::seqcore::{self, IndexSet, Sequence};

fn err(e: qinsdel::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn seq(q: u32, xs: Vec<u32>) -> PyResult<Sequence> {
    Sequence::new(q, xs).map_err(err)
}

fn pair(x: Vec<u32>, y: Vec<u32>, q: Option<u32>) -> PyResult<(Sequence, Sequence)> {
    let q = q.unwrap_or_else(|| x.iter().chain(&y).max().map_or(2, |m| (m + 1).max(2)));
    Ok((seq(q, x)?, seq(q, y)?))
}

/// Delete the 1-based positions `indices` from `x`.
#[pyfunction]
#[pyo3(signature = (x, indices, q=None))]
fn delete(x: Vec<u32>, indices: Vec<usize>, q: Option<u32>) -> PyResult<Vec<u32>> {
    let q = q.unwrap_or_else(|| x.iter().max().map_or(2, |m| (m + 1).max(2)));
    let x = seq(q, x)?;
    let s = IndexSet::new(x.len(), indices).map_err(err)?;
    Ok(seqcore::delete(&x, &s).map_err(err)?.symbols().to_vec())
}

#[pyfunction]
#[pyo3(signature = (x, y, q=None))]
fn indel_distance(x: Vec<u32>, y: Vec<u32>, q: Option<u32>) -> PyResult<u32> {
    let (x, y) = pair(x, y, q)?;
    editgraph::indel_distance(&x, &y).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, y, q=None))]
fn edit_matrix(x: Vec<u32>, y: Vec<u32>, q: Option<u32>) -> PyResult<Vec<Vec<u32>>> {
    let (x, y) = pair(x, y, q)?;
    Ok(editgraph::edit_matrix(&x, &y).map_err(err)?.to_rows())
}

/// Vertex lists of the bottom and top extremal paths.
#[pyfunction]
#[pyo3(signature = (x, y, q=None))]
fn extremal_paths(x: Vec<u32>, y: Vec<u32>, q: Option<u32>) -> PyResult<(Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    let (x, y) = pair(x, y, q)?;
    let h = editgraph::edit_matrix(&x, &y).map_err(err)?;
    let bot = editgraph::path_bot(&x, &y, &h).map_err(err)?;
    let top = editgraph::path_top(&x, &y, &h).map_err(err)?;
    Ok((bot.vertices().to_vec(), top.vertices().to_vec()))
}

/// `(S1, S2)` insertion candidates of `y` with respect to `x`.
#[pyfunction]
#[pyo3(signature = (x, y, q=None))]
fn candidates(x: Vec<u32>, y: Vec<u32>, q: Option<u32>) -> PyResult<(Vec<usize>, Vec<usize>)> {
    let (x, y) = pair(x, y, q)?;
    let c = editgraph::candidate_insertion_indices(&x, &y).map_err(err)?;
    Ok((c.s1.indices().to_vec(), c.s2.indices().to_vec()))
}

/// Exact insertion index set by brute force.
#[pyfunction]
#[pyo3(signature = (x, y, q=None))]
fn oracle_j(x: Vec<u32>, y: Vec<u32>, q: Option<u32>) -> PyResult<Vec<usize>> {
    let (x, y) = pair(x, y, q)?;
    Ok(editgraph::oracle_j(&x, &y).map_err(err)?.indices().to_vec())
}

#[pyfunction]
fn monotone_periodic(n: usize, t: usize) -> Vec<u32> {
    seqcore::monotone_periodic(n, t).symbols().to_vec()
}

#[pyfunction]
fn detects_deletions(x: Vec<u32>, q: u32, t: usize) -> PyResult<bool> {
    Ok(seqcore::detects_deletions(&seq(q, x)?, t))
}

/// A mixed state stored as a weighted list of pure components.
#[pyclass(frozen, name = "State")]
struct PyState {
    inner: Ensemble,
}

#[pymethods]
impl PyState {
    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.spec().dims().to_vec()
    }

    fn trace(&self) -> f64 {
        self.inner.trace()
    }

    /// `(weight, amplitudes)` pairs.
    fn components(&self) -> Vec<(f64, Vec<Complex64>)> {
        self.inner.components().iter().map(|(w, psi)| (*w, psi.amplitudes().to_vec())).collect()
    }

    /// `<psi| rho |psi>` for a pure `psi` given by its amplitudes.
    fn fidelity(&self, amplitudes: Vec<Complex64>) -> PyResult<f64> {
        let psi = PureState::new(self.inner.spec().clone(), amplitudes).map_err(err)?;
        qsim::fidelity(&psi, &self.inner).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&StateDoc::from_ensemble(&self.inner)).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc: StateDoc = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyState { inner: doc.to_ensemble().map_err(err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("State(dims={:?}, components={})", self.inner.spec().dims(), self.inner.len())
    }
}

fn report_dict<'py>(py: Python<'py>, r: &DecodeReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("branch", r.branch.as_str())?;
    d.set_item("r", r.r.clone())?;
    d.set_item("s1", r.s1.clone())?;
    d.set_item("s2", r.s2.clone())?;
    d.set_item("deleted_total", r.deleted_total.clone())?;
    d.set_item("probability", r.probability)?;
    Ok(d)
}

/// Embedded deletion code over the five-qudit base code.
#[pyclass(frozen, name = "Code")]
struct PyCode {
    inner: MHCode,
}

#[pymethods]
impl PyCode {
    #[new]
    #[pyo3(signature = (l=2, t=2, base="five-qudit"))]
    fn new(l: usize, t: usize, base: &str) -> PyResult<Self> {
        if t < 2 {
            return Err(PyValueError::new_err(format!("insertion plus deletion decoding needs t >= 2, got {t}")));
        }
        let cfg = CodeConfig { n: 5, l, t, base: base.into(), base_file: None };
        Ok(PyCode { inner: cfg.build().map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn l(&self) -> usize {
        self.inner.l()
    }

    #[getter]
    fn t(&self) -> usize {
        self.inner.t()
    }

    #[getter]
    fn embedded_dim(&self) -> usize {
        self.inner.embedded_dim()
    }

    fn marker(&self) -> Vec<u32> {
        self.inner.marker().symbols().to_vec()
    }

    /// Seeded random logical message, as amplitudes.
    fn random_message(&self, seed: u64) -> Vec<Complex64> {
        let spec = self.inner.base().logical_spec();
        PureState::random(spec, &mut ChaCha8Rng::seed_from_u64(seed)).amplitudes().to_vec()
    }

    fn encode(&self, message: Vec<Complex64>) -> PyResult<PyState> {
        let mu = PureState::normalized(self.inner.base().logical_spec(), message).map_err(err)?;
        let psi = mhcode::mh_encode(&self.inner, &mu).map_err(err)?;
        Ok(PyState { inner: Ensemble::pure(psi) })
    }

    /// Insert `sigma` (`basis:K`, `random:I` or `mixed`) at `j2`, then delete site `j1`.
    #[pyo3(signature = (state, j2, j1, sigma="mixed", seed=0))]
    fn channel(&self, state: &PyState, j2: usize, j1: usize, sigma: &str, seed: u64) -> PyResult<PyState> {
        let kind: SigmaKind = sigma.parse().map_err(err)?;
        let sigma = harness::build_sigma(kind, &self.inner, seed).map_err(err)?;
        let ch = ChannelSpec::new(j2, sigma, j1).map_err(err)?;
        Ok(PyState { inner: decoder::apply_insdel(&state.inner, &ch).map_err(err)? })
    }

    /// Sampled decode; returns the logical state and a report dict.
    #[pyo3(signature = (state, seed=0))]
    fn decode<'py>(&self, py: Python<'py>, state: &PyState, seed: u64) -> PyResult<(PyState, Bound<'py, PyDict>)> {
        let (msg, report) = decoder::decode(&self.inner, &state.inner, seed).map_err(err)?;
        Ok((PyState { inner: msg }, report_dict(py, &report)?))
    }

    /// Every measurement and syndrome branch as `(probability, state, report)`.
    fn decode_branches<'py>(
        &self,
        py: Python<'py>,
        state: &PyState,
    ) -> PyResult<Vec<(f64, PyState, Bound<'py, PyDict>)>> {
        decoder::decode_branches(&self.inner, &state.inner)
            .map_err(err)?
            .into_iter()
            .map(|b| Ok((b.probability, PyState { inner: b.message.clone() }, report_dict(py, &b.report)?)))
            .collect()
    }
}

#[pymodule]
pub fn pyqinsdel(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(delete, m)?)?;
    m.add_function(wrap_pyfunction!(indel_distance, m)?)?;
    m.add_function(wrap_pyfunction!(edit_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(extremal_paths, m)?)?;
    m.add_function(wrap_pyfunction!(candidates, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_j, m)?)?;
    m.add_function(wrap_pyfunction!(monotone_periodic, m)?)?;
    m.add_function(wrap_pyfunction!(detects_deletions, m)?)?;
    m.add_class::<PyState>()?;
    m.add_class::<PyCode>()?;
    Ok(())
}
