use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use seqdec::bounds::{self, BoundVariant, Lemma2Inputs};
use seqdec::channel::{self, ChannelConfig};
use seqdec::codes::{self, Codeword};
use seqdec::decoders::{self, DecodeOutcome};
use seqdec::harness::{self, ExperimentConfig, ResolvedCode, SimOptions};
use seqdec::numerics::{db_to_linear, RngStream};
use seqdec::trellis;

create_exception!(seqdec_py, SeqdecError, PyException);

fn err(e: seqdec::Error) -> PyErr {
    SeqdecError::new_err(e.to_string())
}

fn variant(name: &str) -> PyResult<BoundVariant> {
    match name {
        "be" => Ok(BoundVariant::berry_esseen()),
        "chernoff" => Ok(BoundVariant::chernoff()),
        _ => Err(SeqdecError::new_err(format!(
            "unknown variant '{name}', expected 'be' or 'chernoff'"
        ))),
    }
}

fn bits(w: &Codeword) -> Vec<u32> {
    w.bits.iter().map(|&b| b as u32).collect()
}

fn codeword(b: Vec<u8>) -> PyResult<Codeword> {
    if b.iter().any(|&x| x > 1) {
        return Err(SeqdecError::new_err("bits must be 0 or 1"));
    }
    Ok(Codeword::new(b))
}

#[pyclass(name = "BlockCode", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBlockCode {
    inner: codes::BlockCode,
}

#[pymethods]
impl PyBlockCode {
    /// Rows are generator rows as integers, bit i = position i.
    #[new]
    fn new(name: &str, n: usize, rows: Vec<u64>) -> PyResult<Self> {
        let inner = codes::BlockCode::from_rows(name, n, &rows).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn golay24() -> Self {
        Self {
            inner: codes::build_extended_golay(),
        }
    }

    #[staticmethod]
    fn qr48() -> Self {
        Self {
            inner: codes::build_extended_qr48(),
        }
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn encode(&self, info: Vec<u8>) -> PyResult<Vec<u32>> {
        Ok(bits(&self.inner.encode(&info).map_err(err)?))
    }

    fn is_codeword(&self, word: Vec<u8>) -> PyResult<bool> {
        Ok(self.inner.is_codeword(&codeword(word)?))
    }

    /// Minimum distance and the number of codewords at that distance.
    fn min_distance(&self, py: Python<'_>) -> (usize, u64) {
        py.detach(|| self.inner.min_distance())
    }

    fn weight_distribution(&self, py: Python<'_>) -> Vec<u64> {
        py.detach(|| self.inner.weight_distribution())
    }

    fn __repr__(&self) -> String {
        format!("BlockCode('{}', n={}, k={})", self.inner.name(), self.inner.n(), self.inner.k())
    }
}

#[pyclass(name = "ConvCode", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyConvCode {
    inner: codes::ConvCode,
}

#[pymethods]
impl PyConvCode {
    /// Tap strings are read with the first character as the current input.
    #[new]
    fn new(name: &str, m: usize, taps: Vec<String>) -> PyResult<Self> {
        let t: Vec<&str> = taps.iter().map(String::as_str).collect();
        let inner = codes::ConvCode::from_tap_strings(name, m, &t).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_octal(octal: Vec<String>, m: usize) -> PyResult<Self> {
        let o: Vec<&str> = octal.iter().map(String::as_str).collect();
        let inner = codes::parse_octal_generators(&o, m).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        let inner = match name {
            "conv-3-1-2" => codes::conv_3_1_2(),
            "conv-2-1-6" => codes::conv_2_1_6(),
            "conv-2-1-16" => codes::conv_2_1_16(),
            _ => return Err(SeqdecError::new_err(format!("unknown code '{name}'"))),
        };
        Ok(Self { inner })
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n_out(&self) -> usize {
        self.inner.n_out()
    }

    #[getter]
    fn taps(&self) -> Vec<String> {
        self.inner.tap_strings()
    }

    /// Encodes `info` followed by m zero tail bits.
    fn encode(&self, info: Vec<u8>) -> PyResult<Vec<u32>> {
        Ok(bits(&codes::encode_conv(&self.inner, &info).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!("ConvCode('{}', m={}, taps={:?})", self.inner.name(), self.inner.m(), self.inner.tap_strings())
    }
}

#[pyclass(name = "Trellis", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTrellis {
    inner: trellis::Trellis,
}

#[pymethods]
impl PyTrellis {
    #[new]
    fn new(code: &PyConvCode, info_length: usize) -> PyResult<Self> {
        let inner = trellis::build_trellis(&code.inner, info_length).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn info_length(&self) -> usize {
        self.inner.info_length()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    #[getter]
    fn code_length(&self) -> usize {
        self.inner.code_length()
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.inner.num_states()
    }

    fn states_at(&self, level: usize) -> Vec<usize> {
        self.inner.states_at(level)
    }

    /// Minimum weight of any path from (level, state) to the terminal node,
    /// or None if the node is absent.
    fn dstar(&self, level: usize, state: usize) -> Option<u32> {
        self.inner.dstar(level, state)
    }

    /// (next state, output bits) or None if the branch does not exist.
    fn transition(&self, level: usize, state: usize, input: u8) -> Option<(usize, String)> {
        let n = self.inner.code().n_out();
        self.inner.transition(level, state, input).map(|(s, out)| {
            let label: String = (0..n)
                .map(|j| if (out >> j) & 1 == 1 { '1' } else { '0' })
                .collect();
            (s, label)
        })
    }
}

#[pyclass(name = "Channel", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyChannel {
    inner: ChannelConfig,
}

#[pymethods]
impl PyChannel {
    #[staticmethod]
    fn block(k: usize, n: usize, gamma_b_db: f64) -> PyResult<Self> {
        let inner = ChannelConfig::block(k, n, gamma_b_db);
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn conv(l: usize, code_length: usize, gamma_b_db: f64) -> PyResult<Self> {
        let inner = ChannelConfig::conv(1, l, code_length, gamma_b_db);
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma()
    }

    #[getter]
    fn noise_stddev(&self) -> f64 {
        self.inner.noise_stddev()
    }

    /// BPSK over AWGN; returns the received vector.
    fn transmit(&self, word: Vec<u8>, seed: u64) -> PyResult<Vec<f64>> {
        let mut rng = RngStream::new(seed);
        Ok(channel::transmit(&codeword(word)?, &self.inner, &mut rng))
    }

    fn llr(&self, received: Vec<f64>) -> Vec<f64> {
        channel::llr(&received, &self.inner)
    }
}

#[pyclass(name = "DecodeResult", frozen, get_all)]
struct PyDecodeResult {
    decoded: Vec<u32>,
    branch_computations: u64,
    branch_computations_total: u64,
    extensions: u64,
    final_metric: f64,
}

impl From<DecodeOutcome> for PyDecodeResult {
    fn from(o: DecodeOutcome) -> Self {
        Self {
            decoded: bits(&o.decoded),
            branch_computations: o.branch_computations,
            branch_computations_total: o.branch_computations_total,
            extensions: o.extensions,
            final_metric: o.final_metric,
        }
    }
}

#[pymethods]
impl PyDecodeResult {
    fn __repr__(&self) -> String {
        format!(
            "DecodeResult(branch_computations={}, extensions={}, final_metric={})",
            self.branch_computations, self.extensions, self.final_metric
        )
    }
}

#[pyfunction]
#[pyo3(signature = (code, phi, cap=None))]
fn gda_decode(py: Python<'_>, code: &PyBlockCode, phi: Vec<f64>, cap: Option<u64>) -> PyResult<PyDecodeResult> {
    py.detach(|| decoders::GdaDecoder::new(&code.inner).with_cap(cap).decode(&phi))
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
fn mlsda_decode(py: Python<'_>, trellis: &PyTrellis, phi: Vec<f64>) -> PyResult<PyDecodeResult> {
    py.detach(|| decoders::mlsda_decode(&trellis.inner, &phi))
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
fn viterbi_ml(trellis: &PyTrellis, phi: Vec<f64>) -> PyResult<(Vec<u32>, f64)> {
    let (w, m) = decoders::viterbi_ml(&trellis.inner, &phi).map_err(err)?;
    Ok((bits(&w), m))
}

#[pyfunction]
fn brute_force_ml_block(py: Python<'_>, code: &PyBlockCode, phi: Vec<f64>) -> PyResult<Vec<u32>> {
    let w = py
        .detach(|| decoders::brute_force_ml_block(&code.inner, &phi))
        .map_err(err)?;
    Ok(bits(&w))
}

/// Bound on Pr{R_d + W_nd <= 0} at SNR `gamma` (linear).
#[pyfunction]
#[pyo3(signature = (d, nd, gamma, variant="be"))]
fn lemma2_bound(d: u64, nd: u64, gamma: f64, variant: &str) -> PyResult<f64> {
    let v = self::variant(variant)?;
    bounds::lemma2_bound(Lemma2Inputs::new(d, nd, gamma).map_err(err)?, v).map_err(err)
}

/// Saddle point and subexponential factor; None where no saddle point exists.
#[pyfunction]
#[pyo3(signature = (d, nd, gamma, variant="be"))]
fn a_tilde(d: u64, nd: u64, gamma: f64, variant: &str) -> PyResult<Option<(f64, f64)>> {
    let v = self::variant(variant)?;
    let det = bounds::lemma2_detail(Lemma2Inputs::new(d, nd, gamma).map_err(err)?, v).map_err(err)?;
    Ok(match (det.lambda, det.a_tilde) {
        (Some(l), Some(a)) => Some((l, a.value)),
        _ => None,
    })
}

#[pyfunction]
#[pyo3(signature = (code, gamma_b_db, variant="be"))]
fn gda_bound(code: &PyBlockCode, gamma_b_db: f64, variant: &str) -> PyResult<f64> {
    bounds::theorem1_bound(&code.inner, gamma_b_db, self::variant(variant)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (trellis, gamma_b_db, variant="be"))]
fn mlsda_bound(py: Python<'_>, trellis: &PyTrellis, gamma_b_db: f64, variant: &str) -> PyResult<f64> {
    let v = self::variant(variant)?;
    py.detach(|| bounds::theorem2_bound(&trellis.inner, gamma_b_db, v))
        .map_err(err)
}

fn resolve(code: &Bound<'_, PyAny>) -> PyResult<ResolvedCode> {
    if let Ok(b) = code.cast::<PyBlockCode>() {
        return Ok(ResolvedCode::Block(b.get().inner.clone()));
    }
    if let Ok(t) = code.cast::<PyTrellis>() {
        return Ok(ResolvedCode::Conv(t.get().inner.clone()));
    }
    Err(SeqdecError::new_err("expected a BlockCode or a Trellis"))
}

/// Monte Carlo mean of branch metric computations at one SNR.
/// Returns (mean, ci95_half, trials_used, overflow).
#[pyfunction]
#[pyo3(signature = (code, gamma_b_db, trials, seed=1, workers=1, all_zero=false, cap=None))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    code: &Bound<'_, PyAny>,
    gamma_b_db: f64,
    trials: u64,
    seed: u64,
    workers: usize,
    all_zero: bool,
    cap: Option<u64>,
) -> PyResult<(f64, f64, u64, u64)> {
    let code = resolve(code)?;
    let opts = SimOptions {
        workers,
        all_zero,
        extension_cap: cap,
        ..SimOptions::new(trials, seed)
    };
    let st = py
        .detach(|| harness::simulate_point(&code, gamma_b_db, &opts))
        .map_err(err)?;
    Ok((st.mean, st.ci95_half, st.trials, st.overflow))
}

/// Runs a JSON experiment config and returns the CSV text.
#[pyfunction]
fn run_config(py: Python<'_>, json: &str) -> PyResult<String> {
    let cfg = ExperimentConfig::from_json(json).map_err(err)?;
    let pts = py.detach(|| harness::run_curve(&cfg)).map_err(err)?;
    Ok(harness::curve_to_csv(&pts))
}

#[pyfunction]
fn atilde_table(d_over_n: f64, gamma_db: f64, n_grid: Vec<u64>) -> PyResult<Vec<(u64, f64)>> {
    let rows = harness::run_atilde_table(d_over_n, gamma_db, &n_grid).map_err(err)?;
    Ok(rows.iter().map(|r| (r.n, r.atilde)).collect())
}

#[pyfunction]
fn db_to_lin(db: f64) -> f64 {
    db_to_linear(db)
}

#[pymodule]
fn seqdec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SeqdecError", m.py().get_type::<SeqdecError>())?;
    m.add_class::<PyBlockCode>()?;
    m.add_class::<PyConvCode>()?;
    m.add_class::<PyTrellis>()?;
    m.add_class::<PyChannel>()?;
    m.add_class::<PyDecodeResult>()?;
    m.add_function(wrap_pyfunction!(gda_decode, m)?)?;
    m.add_function(wrap_pyfunction!(mlsda_decode, m)?)?;
    m.add_function(wrap_pyfunction!(viterbi_ml, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_ml_block, m)?)?;
    m.add_function(wrap_pyfunction!(lemma2_bound, m)?)?;
    m.add_function(wrap_pyfunction!(a_tilde, m)?)?;
    m.add_function(wrap_pyfunction!(gda_bound, m)?)?;
    m.add_function(wrap_pyfunction!(mlsda_bound, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(atilde_table, m)?)?;
    m.add_function(wrap_pyfunction!(db_to_lin, m)?)?;
    Ok(())
}
