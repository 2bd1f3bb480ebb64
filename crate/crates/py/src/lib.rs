//! Python bindings: parity-check matrices, solver configuration, decoding
//! and Monte Carlo simulation.

use lpdecode::codes::{
    enumerate_codewords, gen_regular_ldpc, is_codeword, ml_decode_exhaustive, parse_alist,
};
use lpdecode::polytope::build_polytope;
use lpdecode::{
    Algorithm, BinaryWord, ChannelSpec, InnerSolverKind, LlrVector, RngSeed, SimOptions,
    SparseBinaryMatrix,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;

fn err(e: lpdecode::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn word(bits: Vec<u8>) -> PyResult<BinaryWord> {
    BinaryWord::new(bits).map_err(err)
}

// Vec<u8> would surface as `bytes`; words are handed out as int lists.
fn bit_list(w: BinaryWord) -> Vec<u32> {
    w.bits().iter().map(|&b| u32::from(b)).collect()
}

fn llr(values: Vec<f64>) -> PyResult<LlrVector> {
    LlrVector::new(values).map_err(err)
}

fn json_loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "ParityCheck", module = "lpdecode", frozen)]
struct PyParityCheck {
    inner: SparseBinaryMatrix,
}

#[pymethods]
impl PyParityCheck {
    /// `rows[j]` lists the 0-based variable indices of check `j`.
    #[new]
    fn new(n: usize, rows: Vec<Vec<usize>>) -> PyResult<Self> {
        Ok(Self {
            inner: SparseBinaryMatrix::new(n, rows).map_err(err)?,
        })
    }

    #[staticmethod]
    fn hamming_7_4() -> Self {
        Self {
            inner: SparseBinaryMatrix::hamming_7_4(),
        }
    }

    #[staticmethod]
    fn repetition(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: SparseBinaryMatrix::repetition(n).map_err(err)?,
        })
    }

    #[staticmethod]
    fn regular_ldpc(n: usize, wc: usize, wr: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: gen_regular_ldpc(n, wc, wr, seed).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_alist(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_alist(text).map_err(err)?,
        })
    }

    fn to_alist(&self) -> String {
        self.inner.to_alist()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<usize>> {
        self.inner.rows().to_vec()
    }

    fn is_codeword(&self, bits: Vec<u8>) -> PyResult<bool> {
        is_codeword(&self.inner, &word(bits)?).map_err(err)
    }

    fn codewords(&self) -> PyResult<Vec<Vec<u32>>> {
        Ok(enumerate_codewords(&self.inner)
            .map_err(err)?
            .into_iter()
            .map(bit_list)
            .collect())
    }

    /// Exhaustive maximum-likelihood decoding; returns `(word, cost)`.
    fn ml_decode(&self, gamma: Vec<f64>) -> PyResult<(Vec<u32>, f64)> {
        let (w, cost) = ml_decode_exhaustive(&self.inner, &llr(gamma)?).map_err(err)?;
        Ok((bit_list(w), cost))
    }

    /// Number of facet inequalities of the fundamental polytope.
    fn inequality_count(&self) -> PyResult<usize> {
        Ok(build_polytope(&self.inner).map_err(err)?.inequalities.len())
    }

    fn __repr__(&self) -> String {
        format!("ParityCheck(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

#[pyclass(name = "SolverConfig", module = "lpdecode", frozen)]
struct PySolverConfig {
    inner: lpdecode::SolverConfig,
}

#[pymethods]
impl PySolverConfig {
    #[new]
    #[pyo3(signature = (algorithm = "pdip", inner = "cg", *, gap_tol = None, max_outer = None,
        decompose = None, rounding_cadence = None, tau_round = None, record_trajectory = false))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        algorithm: &str,
        inner: &str,
        gap_tol: Option<f64>,
        max_outer: Option<usize>,
        decompose: Option<usize>,
        rounding_cadence: Option<usize>,
        tau_round: Option<f64>,
        record_trajectory: bool,
    ) -> PyResult<Self> {
        let alg: Algorithm = algorithm.parse().map_err(err)?;
        let kind: InnerSolverKind = inner.parse().map_err(err)?;
        let mut cfg = lpdecode::SolverConfig::new(alg, kind);
        if let Some(v) = gap_tol {
            cfg.gap_tol = v;
        }
        if let Some(v) = max_outer {
            cfg.max_outer = v;
        }
        cfg.decompose = decompose;
        if let Some(v) = rounding_cadence {
            cfg.rounding_cadence = v;
        }
        if let Some(v) = tau_round {
            cfg.tau_round = v;
        }
        cfg.record_trajectory = record_trajectory;
        cfg.validate().map_err(err)?;
        Ok(Self { inner: cfg })
    }

    #[getter]
    fn algorithm(&self) -> &'static str {
        self.inner.algorithm.name()
    }

    #[getter]
    fn inner(&self) -> &'static str {
        self.inner.inner.name()
    }

    #[getter]
    fn gap_tol(&self) -> f64 {
        self.inner.gap_tol
    }

    #[getter]
    fn max_outer(&self) -> usize {
        self.inner.max_outer
    }

    #[getter]
    fn decompose(&self) -> Option<usize> {
        self.inner.decompose
    }

    #[getter]
    fn rounding_cadence(&self) -> usize {
        self.inner.rounding_cadence
    }

    fn __repr__(&self) -> String {
        format!(
            "SolverConfig(algorithm='{}', inner='{}')",
            self.inner.algorithm, self.inner.inner
        )
    }
}

type TraceTuple = (usize, f64, f64, Vec<f64>);

#[pyclass(name = "DecodeResult", module = "lpdecode", frozen)]
struct PyDecodeResult {
    inner: lpdecode::DecodeResult,
}

#[pymethods]
impl PyDecodeResult {
    /// "Integral", "Fractional", "EarlyRounded" or "Failure".
    #[getter]
    fn status(&self) -> &'static str {
        self.inner.status.name()
    }

    /// Rounded output over {0, 0.5, 1}.
    #[getter]
    fn output(&self) -> Vec<f64> {
        self.inner.output.clone()
    }

    /// The binary word, or None for fractional and failed decodes.
    #[getter]
    fn word(&self) -> Option<Vec<u32>> {
        self.inner.word().map(bit_list)
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.x.clone()
    }

    #[getter]
    fn cost(&self) -> f64 {
        self.inner.cost
    }

    #[getter]
    fn ml_certificate(&self) -> bool {
        self.inner.ml_certificate
    }

    #[getter]
    fn outer_iterations(&self) -> usize {
        self.inner.outer_iterations
    }

    #[getter]
    fn gap(&self) -> f64 {
        self.inner.gap
    }

    /// `(iteration, cost, gap, x)` tuples when the trajectory was recorded.
    #[getter]
    fn trajectory(&self) -> Option<Vec<TraceTuple>> {
        self.inner.trajectory.as_ref().map(|t| {
            t.iter()
                .map(|p| (p.iteration, p.cost, p.gap, p.x.clone()))
                .collect()
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "DecodeResult(status='{}', cost={}, outer_iterations={})",
            self.inner.status.name(),
            self.inner.cost,
            self.inner.outer_iterations
        )
    }
}

#[pyclass(name = "Decoder", module = "lpdecode", frozen)]
struct PyDecoder {
    inner: lpdecode::Decoder,
}

#[pymethods]
impl PyDecoder {
    #[new]
    #[pyo3(signature = (code, config = None))]
    fn new(code: &PyParityCheck, config: Option<&PySolverConfig>) -> PyResult<Self> {
        let cfg = config.map(|c| c.inner.clone()).unwrap_or_default();
        Ok(Self {
            inner: lpdecode::Decoder::new(&code.inner, &cfg).map_err(err)?,
        })
    }

    fn decode(&self, py: Python<'_>, gamma: Vec<f64>) -> PyResult<PyDecodeResult> {
        let gamma = llr(gamma)?;
        let res = py.detach(|| self.inner.decode(&gamma)).map_err(err)?;
        Ok(PyDecodeResult { inner: res })
    }
}

/// One-shot decode of an LLR vector (positive values favour bit 0).
#[pyfunction]
#[pyo3(signature = (code, gamma, config = None))]
fn decode(
    py: Python<'_>,
    code: &PyParityCheck,
    gamma: Vec<f64>,
    config: Option<&PySolverConfig>,
) -> PyResult<PyDecodeResult> {
    PyDecoder::new(code, config)?.decode(py, gamma)
}

/// LLRs observed when `bits` is sent over `channel` ("bsc:P" or
/// "awgn:SNR_DB[:RATE]").
#[pyfunction]
fn transmit(bits: Vec<u8>, channel: &str, seed: u64) -> PyResult<Vec<f64>> {
    let ch: ChannelSpec = channel.parse().map_err(err)?;
    Ok(lpdecode::transmit_and_llr(&word(bits)?, &ch, RngSeed(seed))
        .map_err(err)?
        .into_values())
}

/// Monte Carlo run of the all-zero codeword; returns the summary as a dict.
#[pyfunction]
#[pyo3(signature = (code, channel, trials, seed = 0, config = None, workers = None, compare_ml = false))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    code: &PyParityCheck,
    channel: &str,
    trials: usize,
    seed: u64,
    config: Option<&PySolverConfig>,
    workers: Option<usize>,
    compare_ml: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let ch: ChannelSpec = channel.parse().map_err(err)?;
    let cfg = config.map(|c| c.inner.clone()).unwrap_or_default();
    let mut opts = SimOptions::new(trials, seed);
    opts.workers = workers;
    opts.compare_ml = compare_ml;
    let h = code.inner.clone();
    let (summary, _) = py
        .detach(|| lpdecode::simulate(&h, &ch, &cfg, &opts))
        .map_err(err)?;
    json_loads(py, &summary.to_json())
}

/// Registers the classes and functions on `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParityCheck>()?;
    m.add_class::<PySolverConfig>()?;
    m.add_class::<PyDecodeResult>()?;
    m.add_class::<PyDecoder>()?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(transmit, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add("ALGORITHMS", Algorithm::ALL.map(Algorithm::name).to_vec())?;
    m.add(
        "INNER_SOLVERS",
        InnerSolverKind::ALL.map(InnerSolverKind::name).to_vec(),
    )?;
    Ok(())
}

#[pymodule]
#[pyo3(name = "lpdecode")]
fn lpdecode_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
