//! Python bindings: the switch model, scheduler, analytics, Monte Carlo
//! estimation and the FEC/throughput pipeline, driven in-process.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fsrswitch::analytics;
use fsrswitch::montecarlo;
use fsrswitch::physical::{self, ModulationOrder, SyntheticBerModel};
use fsrswitch::scheduler::{self, Decision, SchedulerPolicy, StartRule, WavelengthPolicy};
use fsrswitch::topology;
use fsrswitch::traffic;
use fsrswitch::{Link, TrafficClass};

fn to_py_err(err: fsrswitch::Error) -> PyErr {
    if err.is_validation() {
        PyValueError::new_err(err.to_string())
    } else {
        PyRuntimeError::new_err(err.to_string())
    }
}

/// Switch dimensions: N x N AWG, N couplers with K ports, F FSRs,
/// N_W = F * N wavelengths.
#[pyclass(name = "SwitchConfig", frozen)]
struct PySwitchConfig {
    inner: fsrswitch::SwitchConfig,
}

#[pymethods]
impl PySwitchConfig {
    #[new]
    fn new(awg_ports: usize, coupler_ports: usize, fsr_count: usize) -> PyResult<Self> {
        let inner =
            fsrswitch::SwitchConfig::new(awg_ports, coupler_ports, fsr_count).map_err(to_py_err)?;
        Ok(PySwitchConfig { inner })
    }

    /// Derive the AWG port count from a fixed wavelength budget.
    #[staticmethod]
    fn from_wavelength_budget(
        wavelength_count: usize,
        coupler_ports: usize,
        fsr_count: usize,
    ) -> PyResult<Self> {
        let inner = fsrswitch::SwitchConfig::from_wavelength_budget(
            wavelength_count,
            coupler_ports,
            fsr_count,
        )
        .map_err(to_py_err)?;
        Ok(PySwitchConfig { inner })
    }

    #[getter]
    fn awg_ports(&self) -> usize {
        self.inner.awg_ports()
    }

    #[getter]
    fn coupler_ports(&self) -> usize {
        self.inner.coupler_ports()
    }

    #[getter]
    fn fsr_count(&self) -> usize {
        self.inner.fsr_count()
    }

    #[getter]
    fn wavelength_count(&self) -> usize {
        self.inner.wavelength_count()
    }

    #[getter]
    fn nodes_per_coupler(&self) -> usize {
        self.inner.nodes_per_coupler()
    }

    #[getter]
    fn total_nodes(&self) -> usize {
        self.inner.total_nodes()
    }

    fn __repr__(&self) -> String {
        format!(
            "SwitchConfig(awg_ports={}, coupler_ports={}, fsr_count={}, wavelength_count={})",
            self.inner.awg_ports(),
            self.inner.coupler_ports(),
            self.inner.fsr_count(),
            self.inner.wavelength_count()
        )
    }
}

/// One cycle's offered traffic.
#[pyclass(name = "RequestBatch", frozen)]
struct PyRequestBatch {
    inner: traffic::RequestBatch,
}

#[pymethods]
impl PyRequestBatch {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Requests as (src_coupler, src_local, dst_coupler, dst_local, kind).
    fn requests(&self) -> Vec<(usize, usize, usize, usize, &'static str)> {
        self.inner
            .requests()
            .iter()
            .map(|r| {
                let kind = match r.class() {
                    TrafficClass::Interdomain => "inter",
                    TrafficClass::Intradomain => "intra",
                };
                (
                    r.source.coupler,
                    r.source.local,
                    r.destination.coupler,
                    r.destination.local,
                    kind,
                )
            })
            .collect()
    }

    /// Line-oriented dump (one `src_coupler,src_local,dst_coupler,dst_local`
    /// per request).
    fn to_lines(&self) -> String {
        self.inner.to_lines()
    }

    #[staticmethod]
    fn from_lines(config: &PySwitchConfig, text: &str) -> PyResult<Self> {
        let inner = traffic::RequestBatch::from_lines(&config.inner, text).map_err(to_py_err)?;
        Ok(PyRequestBatch { inner })
    }
}

/// Per-request decisions and per-class tallies for one scheduled cycle.
#[pyclass(name = "ScheduleOutcome", frozen)]
struct PyScheduleOutcome {
    inner: scheduler::ScheduleOutcome,
}

fn counters_dict<'py>(
    py: Python<'py>,
    counters: &scheduler::ClassCounters,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("offered", counters.offered)?;
    d.set_item("granted", counters.granted)?;
    d.set_item(
        "blocked_wavelength_shortage",
        counters.blocked_wavelength_shortage,
    )?;
    d.set_item("blocked_receiver_busy", counters.blocked_receiver_busy)?;
    d.set_item(
        "blocked_receiver_contention",
        counters.blocked_receiver_contention,
    )?;
    Ok(d)
}

#[pymethods]
impl PyScheduleOutcome {
    /// Decisions parallel to the batch: ("granted", wavelength) or
    /// ("blocked", reason).
    fn decisions<'py>(&self, py: Python<'py>) -> PyResult<Vec<(&'static str, Py<PyAny>)>> {
        self.inner
            .decisions
            .iter()
            .map(|d| match d {
                Decision::Granted(w) => Ok(("granted", w.0.into_pyobject(py)?.into_any().unbind())),
                Decision::Blocked(reason) => Ok((
                    "blocked",
                    reason.as_str().into_pyobject(py)?.into_any().unbind(),
                )),
            })
            .collect()
    }

    fn interdomain<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        counters_dict(py, &self.inner.interdomain)
    }

    fn intradomain<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        counters_dict(py, &self.inner.intradomain)
    }

    fn render_trace(&self, batch: &PyRequestBatch) -> String {
        self.inner.render_trace(&batch.inner)
    }
}

fn parse_policy(
    start: &str,
    cycle: u64,
    wavelength_policy: &str,
    physical_occupancy: bool,
) -> PyResult<SchedulerPolicy> {
    let start = match start {
        "round-robin" => StartRule::RoundRobin { cycle },
        "random" => StartRule::Random,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown start rule {other:?} (expected \"round-robin\" or \"random\")"
            )))
        }
    };
    let wavelength_policy = match wavelength_policy {
        "random" => WavelengthPolicy::Random,
        "first-fit" => WavelengthPolicy::FirstFit,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown wavelength policy {other:?} (expected \"random\" or \"first-fit\")"
            )))
        }
    };
    Ok(SchedulerPolicy {
        start,
        wavelength_policy,
        physical_occupancy,
    })
}

/// Wavelengths of the AWG link from `input` to `output` (1-based, ascending).
#[pyfunction]
fn link_wavelengths(config: &PySwitchConfig, input: usize, output: usize) -> PyResult<Vec<usize>> {
    Ok(
        topology::link_wavelengths(&config.inner, Link::new(input, output))
            .map_err(to_py_err)?
            .into_iter()
            .map(|w| w.0)
            .collect(),
    )
}

/// The two fairness halves (w1, w2) of a link's wavelength set.
#[pyfunction]
fn partition(
    config: &PySwitchConfig,
    input: usize,
    output: usize,
) -> PyResult<(Vec<usize>, Vec<usize>)> {
    let p = topology::partition(&config.inner, Link::new(input, output)).map_err(to_py_err)?;
    Ok((
        p.w1.into_iter().map(|w| w.0).collect(),
        p.w2.into_iter().map(|w| w.0).collect(),
    ))
}

#[pyfunction]
fn reciprocity_check(config: &PySwitchConfig, input: usize, output: usize) -> PyResult<bool> {
    topology::reciprocity_check(&config.inner, input, output).map_err(to_py_err)
}

/// Draw one cycle of offered traffic.
#[pyfunction]
fn generate_batch(
    config: &PySwitchConfig,
    load: f64,
    r_inter: f64,
    seed: u64,
) -> PyResult<PyRequestBatch> {
    let inner = traffic::generate_batch(&config.inner, load, r_inter, seed).map_err(to_py_err)?;
    Ok(PyRequestBatch { inner })
}

/// Run both scheduling phases on one batch.
#[pyfunction]
#[pyo3(signature = (config, batch, seed, *, start = "round-robin", cycle = 0,
       wavelength_policy = "random", physical_occupancy = false))]
#[allow(clippy::too_many_arguments)]
fn schedule(
    config: &PySwitchConfig,
    batch: &PyRequestBatch,
    seed: u64,
    start: &str,
    cycle: u64,
    wavelength_policy: &str,
    physical_occupancy: bool,
) -> PyResult<PyScheduleOutcome> {
    let policy = parse_policy(start, cycle, wavelength_policy, physical_occupancy)?;
    let inner = scheduler::schedule(&config.inner, &batch.inner, seed, &policy);
    Ok(PyScheduleOutcome { inner })
}

#[pyfunction]
fn bp_occupancy(k_in: f64, k_out: f64) -> PyResult<f64> {
    analytics::bp_occupancy(k_in, k_out).map_err(to_py_err)
}

fn analytic_input(
    awg_ports: usize,
    coupler_ports: usize,
    load: f64,
    r_inter: f64,
) -> PyResult<analytics::AnalyticInput> {
    analytics::AnalyticInput::new(awg_ports, coupler_ports, load, r_inter).map_err(to_py_err)
}

/// Single-FSR interdomain chain; returns the full step breakdown.
#[pyfunction]
fn bp_inter_f1<'py>(
    py: Python<'py>,
    awg_ports: usize,
    coupler_ports: usize,
    load: f64,
    r_inter: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let b = analytics::bp_inter_f1(&analytic_input(awg_ports, coupler_ports, load, r_inter)?);
    let d = PyDict::new(py);
    d.set_item("m1", b.m1)?;
    d.set_item("b1", b.b1)?;
    d.set_item("m2", b.m2)?;
    d.set_item("b2", b.b2)?;
    d.set_item("m3", b.m3)?;
    d.set_item("b3", b.b3)?;
    d.set_item("b_inter", b.b_inter)?;
    Ok(d)
}

/// Two-FSR interdomain chain; returns the full step breakdown.
#[pyfunction]
fn bp_inter_f2<'py>(
    py: Python<'py>,
    awg_ports: usize,
    coupler_ports: usize,
    load: f64,
    r_inter: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let b = analytics::bp_inter_f2(&analytic_input(awg_ports, coupler_ports, load, r_inter)?);
    let d = PyDict::new(py);
    d.set_item("m1", b.m1)?;
    d.set_item("b1", b.b1)?;
    d.set_item("b2", b.b2)?;
    d.set_item("m2", b.m2)?;
    d.set_item("m3", b.m3)?;
    d.set_item("b3", b.b3)?;
    d.set_item("b4", b.b4)?;
    d.set_item("b5", b.b5)?;
    d.set_item("m4", b.m4)?;
    d.set_item("b6_busy", b.b6_busy)?;
    d.set_item("m5", b.m5)?;
    d.set_item("b6_contention", b.b6_contention)?;
    d.set_item("b_inter", b.b_inter)?;
    d.set_item("saturated", b.saturated)?;
    Ok(d)
}

/// Intradomain chain fed by an interdomain total.
#[pyfunction]
fn bp_intra<'py>(
    py: Python<'py>,
    awg_ports: usize,
    coupler_ports: usize,
    load: f64,
    r_inter: f64,
    b_inter: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let b = analytics::bp_intra(
        &analytic_input(awg_ports, coupler_ports, load, r_inter)?,
        b_inter,
    )
    .map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("n_b", b.n_b)?;
    d.set_item("n_f", b.n_f)?;
    d.set_item("b_l1", b.b_l1)?;
    d.set_item("b_l2", b.b_l2)?;
    d.set_item("b_intra", b.b_intra)?;
    d.set_item("saturated", b.saturated)?;
    Ok(d)
}

/// Single-coupler interdomain limit (the large-F approximation).
#[pyfunction]
fn bp_single_coupler(
    awg_ports: usize,
    coupler_ports: usize,
    load: f64,
    r_inter: f64,
) -> PyResult<f64> {
    Ok(analytics::bp_single_coupler(&analytic_input(
        awg_ports,
        coupler_ports,
        load,
        r_inter,
    )?))
}

fn plan_from_args(
    wavelength_count: usize,
    coupler_ports: usize,
    fsr_values: Vec<usize>,
    loads: Vec<f64>,
    r_inter: f64,
    runs: u64,
    master_seed: u64,
    policy: SchedulerPolicy,
) -> montecarlo::SimulationPlan {
    montecarlo::SimulationPlan {
        wavelength_count,
        coupler_ports,
        fsr_values,
        loads,
        r_inter,
        runs,
        master_seed,
        policy,
    }
}

/// Monte Carlo blocking probabilities over an (FSR, load) grid.
///
/// Returns one dict per grid point with pooled tallies, blocking
/// probabilities and standard errors.
#[pyfunction]
#[pyo3(signature = (wavelength_count, coupler_ports, fsr_values, loads, r_inter,
       runs, master_seed, *, start = "round-robin", wavelength_policy = "random",
       physical_occupancy = false))]
#[allow(clippy::too_many_arguments)]
fn estimate<'py>(
    py: Python<'py>,
    wavelength_count: usize,
    coupler_ports: usize,
    fsr_values: Vec<usize>,
    loads: Vec<f64>,
    r_inter: f64,
    runs: u64,
    master_seed: u64,
    start: &str,
    wavelength_policy: &str,
    physical_occupancy: bool,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let policy = parse_policy(start, 0, wavelength_policy, physical_occupancy)?;
    let plan = plan_from_args(
        wavelength_count,
        coupler_ports,
        fsr_values,
        loads,
        r_inter,
        runs,
        master_seed,
        policy,
    );
    let estimates = py
        .detach(|| montecarlo::estimate(&plan))
        .map_err(to_py_err)?;
    estimates
        .iter()
        .map(|e| {
            let d = PyDict::new(py);
            d.set_item("fsr", e.fsr)?;
            d.set_item("load", e.load)?;
            d.set_item("runs", e.runs)?;
            for (prefix, class) in [("inter", &e.interdomain), ("intra", &e.intradomain)] {
                d.set_item(format!("{prefix}_offered"), class.offered)?;
                d.set_item(format!("{prefix}_granted"), class.granted)?;
                d.set_item(
                    format!("{prefix}_blocked_wavelength_shortage"),
                    class.blocked_wavelength_shortage,
                )?;
                d.set_item(
                    format!("{prefix}_blocked_receiver_busy"),
                    class.blocked_receiver_busy,
                )?;
                d.set_item(
                    format!("{prefix}_blocked_receiver_contention"),
                    class.blocked_receiver_contention,
                )?;
                d.set_item(format!("b_{prefix}"), class.bp)?;
                d.set_item(format!("b_{prefix}_se"), class.std_error)?;
            }
            Ok(d)
        })
        .collect()
}

/// Largest RS(255, k) message size meeting the post-FEC target, as a dict
/// with `k`, `code_rate` and `post_fec_ber` (`k` is None above the cutoff).
#[pyfunction]
fn fec_select<'py>(py: Python<'py>, pre_fec_ber: f64) -> PyResult<Bound<'py, PyDict>> {
    let fec = physical::fec_select(pre_fec_ber).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("k", fec.k)?;
    d.set_item("code_rate", fec.code_rate)?;
    d.set_item("post_fec_ber", fec.post_fec_ber)?;
    Ok(d)
}

/// Cross-layer sweep under the shipped synthetic BER model: per-point BER,
/// code rate and normalized interdomain throughput.
#[pyfunction]
#[pyo3(signature = (wavelength_count, coupler_ports, fsr_values, loads, r_inter,
       runs, master_seed, modulation, *, symbol_rate_gbaud = 28.0,
       start = "round-robin", wavelength_policy = "random",
       physical_occupancy = false))]
#[allow(clippy::too_many_arguments)]
fn evaluate_crosslayer<'py>(
    py: Python<'py>,
    wavelength_count: usize,
    coupler_ports: usize,
    fsr_values: Vec<usize>,
    loads: Vec<f64>,
    r_inter: f64,
    runs: u64,
    master_seed: u64,
    modulation: u8,
    symbol_rate_gbaud: f64,
    start: &str,
    wavelength_policy: &str,
    physical_occupancy: bool,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let policy = parse_policy(start, 0, wavelength_policy, physical_occupancy)?;
    let modulation = ModulationOrder::from_levels(modulation).map_err(to_py_err)?;
    let plan = plan_from_args(
        wavelength_count,
        coupler_ports,
        fsr_values,
        loads,
        r_inter,
        runs,
        master_seed,
        policy,
    );
    let model = SyntheticBerModel::default();
    let report = py
        .detach(|| physical::evaluate_crosslayer(&plan, &model, modulation, symbol_rate_gbaud))
        .map_err(to_py_err)?;
    report
        .rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("fsr", r.fsr)?;
            d.set_item("load", r.load)?;
            d.set_item("modulation", r.modulation)?;
            d.set_item("pre_fec_ber", r.pre_fec_ber)?;
            d.set_item("code_rate", r.code_rate)?;
            d.set_item("effective_rate_gbps", r.effective_rate_gbps)?;
            d.set_item("granted_inter_mean", r.granted_inter_mean)?;
            d.set_item("t_inter_gbps", r.t_inter_gbps)?;
            d.set_item("t_inter_se", r.t_inter_std_error)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn fsrswitch_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySwitchConfig>()?;
    m.add_class::<PyRequestBatch>()?;
    m.add_class::<PyScheduleOutcome>()?;
    m.add_function(wrap_pyfunction!(link_wavelengths, m)?)?;
    m.add_function(wrap_pyfunction!(partition, m)?)?;
    m.add_function(wrap_pyfunction!(reciprocity_check, m)?)?;
    m.add_function(wrap_pyfunction!(generate_batch, m)?)?;
    m.add_function(wrap_pyfunction!(schedule, m)?)?;
    m.add_function(wrap_pyfunction!(bp_occupancy, m)?)?;
    m.add_function(wrap_pyfunction!(bp_inter_f1, m)?)?;
    m.add_function(wrap_pyfunction!(bp_inter_f2, m)?)?;
    m.add_function(wrap_pyfunction!(bp_intra, m)?)?;
    m.add_function(wrap_pyfunction!(bp_single_coupler, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(fec_select, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_crosslayer, m)?)?;
    Ok(())
}
