//! Python bindings. Results cross the boundary as plain dicts and lists,
//! built from the same JSON the command-line tool prints.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use tpkit::lab::campaign::{
    bar_campaign, gl_campaign, lemma34_campaign, lemma44_campaign, mbs_campaign, stp_campaign, GenConfig,
};
use tpkit::lab::{
    bar_induction_check, check_on_instance, gl_check, lemma44_check, minimal_bad_sequence, stp_check,
    PrincipleInstance,
};
use tpkit::openrec::{phi as run_phi, realizer_by_name, PhiBudget, PhiEnv};
use tpkit::rewriting::{empirical_termination, normalize_with, LoopCheck, Trs as CoreTrs};
use tpkit::rpo::{orient_trs, PrecedenceStatus, SearchConfig, StatusMode, DEFAULT_SEARCH_BUDGET};
use tpkit::syntax::{parse_term, parse_trs};
use tpkit::{Lasso, RpoInstance};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn status_mode(status: &str) -> PyResult<StatusMode> {
    match status {
        "lex" => Ok(StatusMode::Lex),
        "mul" => Ok(StatusMode::Mul),
        "auto" => Ok(StatusMode::Auto),
        other => Err(value_error(format!("unknown status {other:?}: use lex, mul or auto"))),
    }
}

/// A term rewriting system read from the `(VAR …) (RULES …)` format.
#[pyclass(module = "pytpkit", frozen)]
struct Trs {
    inner: CoreTrs,
    vars: Vec<String>,
}

impl Trs {
    fn orient(&self, status: &str, budget: usize) -> PyResult<Option<(PrecedenceStatus, tpkit::rpo::Certificate)>> {
        let cfg = SearchConfig {
            status: status_mode(status)?,
            budget,
        };
        orient_trs(self.inner.signature(), self.inner.rules(), &cfg).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
}

#[pymethods]
impl Trs {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let file = parse_trs(text).map_err(value_error)?;
        let vars = file.vars.clone();
        let inner = CoreTrs::from_file(file).map_err(value_error)?;
        Ok(Trs { inner, vars })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| value_error(format!("{path}: {e}")))?;
        Self::parse(&text)
    }

    fn __len__(&self) -> usize {
        self.inner.rules().len()
    }

    fn __repr__(&self) -> String {
        format!("Trs({} rules)", self.inner.rules().len())
    }

    /// The rules as `(lhs, rhs)` strings.
    fn rules(&self) -> Vec<(String, String)> {
        let sig = self.inner.signature();
        self.inner.rules().iter().map(|(l, r)| (sig.show(l), sig.show(r))).collect()
    }

    /// Searches for a path order orienting every rule. Returns the
    /// certificate, whose `status` is `YES` or `NO_INSTANCE`.
    #[pyo3(signature = (status = "auto", budget = DEFAULT_SEARCH_BUDGET))]
    fn check<'py>(&self, py: Python<'py>, status: &str, budget: usize) -> PyResult<Bound<'py, PyAny>> {
        let cert = match self.orient(status, budget)? {
            Some((_, cert)) => cert,
            None => tpkit::rpo::Certificate::without_instance(tpkit::rpo::CertificateStatus::NoInstance),
        };
        to_py(py, &cert)
    }

    /// `s ≻ t` under the order found by `check`, or `None` without one.
    #[pyo3(signature = (s, t, status = "auto"))]
    fn greater(&self, s: &str, t: &str, status: &str) -> PyResult<Option<bool>> {
        let Some((prec, _)) = self.orient(status, DEFAULT_SEARCH_BUDGET)? else {
            return Ok(None);
        };
        let sig = self.inner.signature();
        let s = parse_term(s, sig, &self.vars).map_err(value_error)?;
        let t = parse_term(t, sig, &self.vars).map_err(value_error)?;
        Ok(Some(RpoInstance::new(sig.clone(), prec).gt(&s, &t)))
    }

    /// Rewrites a ground term to normal form.
    #[pyo3(signature = (term, fuel = 10_000, loop_check = "exact"))]
    fn normalize<'py>(&self, py: Python<'py>, term: &str, fuel: usize, loop_check: &str) -> PyResult<Bound<'py, PyAny>> {
        let mode: LoopCheck = loop_check.parse().map_err(value_error)?;
        let sig = self.inner.signature();
        let t = parse_term::<&str>(term, sig, &[]).map_err(value_error)?;
        let result = normalize_with(&self.inner, &t, fuel, mode);
        let normal_form = match &result {
            tpkit::rewriting::Normalization::Normal { term, .. } => Some(sig.show(term)),
            _ => None,
        };
        to_py(
            py,
            &serde_json::json!({
                "outcome": result.kind(),
                "normal_form": normal_form,
                "steps": result.trace().render(sig),
            }),
        )
    }

    /// Normalises every ground term of height at most `depth`.
    #[pyo3(signature = (depth = 2, fuel = 10_000))]
    fn empirical<'py>(&self, py: Python<'py>, depth: usize, fuel: usize) -> PyResult<Bound<'py, PyAny>> {
        let report = empirical_termination(&self.inner, depth, fuel).map_err(value_error)?;
        to_py(py, &report)
    }

    /// The found order on ground terms of height at most `depth`.
    #[pyo3(signature = (depth = 2))]
    fn export(&self, depth: usize) -> PyResult<Instance> {
        let Some((prec, _)) = self.orient("auto", DEFAULT_SEARCH_BUDGET)? else {
            return Err(value_error("no orientation found, nothing to export"));
        };
        let rpo = RpoInstance::new(self.inner.signature().clone(), prec);
        let inner = PrincipleInstance::from_rpo(&rpo, depth).map_err(value_error)?;
        Ok(Instance { inner })
    }
}

/// A finite carrier with `≻`, `⊳` and optionally `≻₀` and `≫`.
#[pyclass(module = "pytpkit", frozen)]
struct Instance {
    inner: PrincipleInstance,
}

#[pymethods]
impl Instance {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = PrincipleInstance::from_json(text).map_err(value_error)?;
        Ok(Instance { inner })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Instance({} elements)", self.inner.len())
    }

    fn labels(&self) -> Vec<String> {
        (0..self.inner.len()).map(|i| self.inner.label(i)).collect()
    }

    /// Well-foundedness of each element, in carrier order.
    fn wellfounded(&self) -> Vec<bool> {
        self.inner.ewf_table()
    }

    fn stp<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let r = stp_check(&self.inner).map_err(value_error)?;
        to_py(py, &serde_json::json!({ "verdict": format!("{:?}", r.verdict()), "report": r }))
    }

    fn gl<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let r = gl_check(&self.inner).map_err(value_error)?;
        to_py(py, &serde_json::json!({ "discrepancy": r.discrepancy(), "report": r }))
    }

    #[pyo3(signature = (length = 8))]
    fn mbs<'py>(&self, py: Python<'py>, length: usize) -> PyResult<Bound<'py, PyAny>> {
        let r = minimal_bad_sequence(&self.inner, length).map_err(value_error)?;
        to_py(py, &r)
    }

    #[pyo3(signature = (max_len = 4))]
    fn bar<'py>(&self, py: Python<'py>, max_len: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &bar_induction_check(&self.inner, max_len))
    }

    #[pyo3(signature = (max_len = 4))]
    fn lemma44<'py>(&self, py: Python<'py>, max_len: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &lemma44_check(&self.inner, max_len))
    }

    #[pyo3(signature = (cap = 4))]
    fn lemma34<'py>(&self, py: Python<'py>, cap: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &check_on_instance(&self.inner, cap))
    }
}

/// Runs a seeded campaign over random instances.
#[pyfunction]
#[pyo3(signature = (kind, seed = 0, count = 1000, max_size = 6))]
fn campaign<'py>(py: Python<'py>, kind: &str, seed: u64, count: usize, max_size: usize) -> PyResult<Bound<'py, PyAny>> {
    let cfg = GenConfig::default().with_max_size(max_size.max(1));
    let report = py.detach(|| match kind {
        "stp" => Ok(stp_campaign(seed, count, &cfg)),
        "gl" => Ok(gl_campaign(seed, count, &cfg)),
        "mbs" => Ok(mbs_campaign(seed, count, &cfg)),
        "bi" => Ok(bar_campaign(seed, count, &cfg)),
        "lemma34" => Ok(lemma34_campaign(seed, count)),
        "lemma44" => Ok(lemma44_campaign(seed, count, &cfg)),
        other => Err(format!("unknown campaign {other:?}")),
    });
    to_py(py, &report.map_err(value_error)?)
}

/// Evaluates the open recursion functional on an eventually constant
/// sequence of naturals written like `"5,4,3;7"`.
#[pyfunction]
#[pyo3(signature = (alpha, realizer = "scan", max_depth = 64, max_probes = 65_536))]
fn phi<'py>(py: Python<'py>, alpha: &str, realizer: &str, max_depth: usize, max_probes: usize) -> PyResult<Bound<'py, PyAny>> {
    let alpha: Lasso<usize> = alpha.parse().map_err(value_error)?;
    let f = realizer_by_name(realizer).ok_or_else(|| value_error(format!("unknown realizer {realizer:?}")))?;
    let budget = PhiBudget { max_depth, max_probes };
    let out = run_phi(&PhiEnv::nat(), f.as_ref(), &alpha.to_sequence(), budget);
    to_py(py, &out)
}

#[pymodule]
fn pytpkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Trs>()?;
    m.add_class::<Instance>()?;
    m.add_function(wrap_pyfunction!(campaign, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    Ok(())
}
