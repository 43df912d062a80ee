//! Python bindings. Structured results cross the boundary as plain Python
//! dicts and lists built from the library's JSON forms.

use lpform_core::augment::{self, MutationConfig};
use lpform_core::beams::parse_beam_file;
use lpform_core::metrics::{self, DEFAULT_EXEC_TOL};
use lpform_core::rules::{self, BeamCandidate, RuleConfig};
use lpform_core::solver::{self, SolverOptions};
use lpform_core::{CanonicalLP, canonicalize, parse_corpus as parse_corpus_text};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::Value;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (v.to_string(),))?.unbind())
}

fn rule_config(rules_json: Option<&str>) -> PyResult<RuleConfig> {
    rules_json.map_or_else(|| Ok(RuleConfig::default()), |t| RuleConfig::from_json(t).map_err(err))
}

/// One objective plus constraints over named variables.
#[pyclass(name = "Formulation", module = "lpform", skip_from_py_object)]
#[derive(Clone)]
struct PyFormulation {
    inner: lpform_core::Formulation,
}

#[pymethods]
impl PyFormulation {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        lpform_core::Formulation::from_json(text).map(|inner| Self { inner }).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.inner.vars.clone()
    }

    #[getter]
    fn declaration_count(&self) -> usize {
        self.inner.declaration_count()
    }

    /// Violations as `"path: message"` strings; empty when valid.
    fn validate(&self) -> Vec<String> {
        lpform_core::validate(&self.inner).violations.iter().map(|v| format!("{}: {}", v.path, v.message)).collect()
    }

    fn __eq__(&self, other: PyRef<'_, Self>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Formulation({} declarations over {:?})", self.inner.declaration_count(), self.inner.vars)
    }
}

/// A tagged word problem with its variable order and optional gold.
#[pyclass(name = "ProblemRecord", module = "lpform", skip_from_py_object)]
#[derive(Clone)]
struct PyProblemRecord {
    inner: lpform_core::ProblemRecord,
}

impl PyProblemRecord {
    fn lower(&self, f: Option<PyRef<'_, PyFormulation>>) -> PyResult<CanonicalLP> {
        let f = match &f {
            Some(f) => &f.inner,
            None => self.inner.gold.as_ref().ok_or_else(|| err("record has no gold formulation"))?,
        };
        canonicalize(f, &self.inner).map_err(err)
    }
}

#[pymethods]
impl PyProblemRecord {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        lpform_core::parse_problem(text).map(|inner| Self { inner }).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id.clone()
    }

    #[getter]
    fn text(&self) -> String {
        self.inner.text.clone()
    }

    #[getter]
    fn variable_order(&self) -> Vec<String> {
        self.inner.variable_order.clone()
    }

    #[getter]
    fn gold(&self) -> Option<PyFormulation> {
        self.inner.gold.clone().map(|inner| PyFormulation { inner })
    }

    /// Matrix form of `formulation` (default: the gold).
    #[pyo3(signature = (formulation=None))]
    fn canonicalize(&self, py: Python<'_>, formulation: Option<PyRef<'_, PyFormulation>>) -> PyResult<Py<PyAny>> {
        let lp = self.lower(formulation)?;
        to_py(py, &serde_json::to_value(&lp).map_err(err)?)
    }

    /// Solves `formulation` (default: the gold) as an integer program, or
    /// its LP relaxation with `relax=True`.
    #[pyo3(signature = (formulation=None, relax=false))]
    fn solve(&self, py: Python<'_>, formulation: Option<PyRef<'_, PyFormulation>>, relax: bool) -> PyResult<Py<PyAny>> {
        solve_canonical(py, &self.lower(formulation)?, relax)
    }

    #[pyo3(signature = (formulation=None))]
    fn emit_lp(&self, formulation: Option<PyRef<'_, PyFormulation>>) -> PyResult<String> {
        solver::emit_lp_file(&self.lower(formulation)?, &self.inner.id).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ProblemRecord(id={:?})", self.inner.id)
    }
}

fn solve_canonical(py: Python<'_>, lp: &CanonicalLP, relax: bool) -> PyResult<Py<PyAny>> {
    let opts = SolverOptions::default();
    let v = if relax {
        serde_json::to_value(solver::solve_lp_with(&lp.relaxed(), &opts).map_err(err)?)
    } else {
        serde_json::to_value(solver::solve_ilp_with(lp, &opts).map_err(err)?)
    };
    to_py(py, &v.map_err(err)?)
}

/// Parses a JSON-lines corpus.
#[pyfunction]
fn parse_corpus(text: &str) -> PyResult<Vec<PyProblemRecord>> {
    Ok(parse_corpus_text(text).map_err(err)?.into_iter().map(|inner| PyProblemRecord { inner }).collect())
}

/// `{"fp", "fn", "d", "pairs", "accuracy"}` for `pred` against `gold`.
#[pyfunction]
fn match_declarations(
    py: Python<'_>,
    pred: PyRef<'_, PyFormulation>,
    gold: PyRef<'_, PyFormulation>,
    record: PyRef<'_, PyProblemRecord>,
) -> PyResult<Py<PyAny>> {
    let m = metrics::match_declarations(&pred.inner, &gold.inner, &record.inner);
    let mut v = serde_json::to_value(&m).map_err(err)?;
    v["accuracy"] = m.accuracy().into();
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (pred, gold, record, tol=DEFAULT_EXEC_TOL))]
fn execution_match(
    pred: PyRef<'_, PyFormulation>,
    gold: PyRef<'_, PyFormulation>,
    record: PyRef<'_, PyProblemRecord>,
    tol: f64,
) -> bool {
    metrics::execution_match(&pred.inner, &gold.inner, &record.inner, tol)
}

/// Corrects, scores and ranks `(ir_json, logprob)` candidates; returns the
/// top `k` (all when `k` is None) best first.
#[pyfunction]
#[pyo3(signature = (record, candidates, rules_json=None, k=None))]
fn rank_beams(
    py: Python<'_>,
    record: PyRef<'_, PyProblemRecord>,
    candidates: Vec<(String, f64)>,
    rules_json: Option<&str>,
    k: Option<usize>,
) -> PyResult<Vec<Py<PyAny>>> {
    let cfg = rule_config(rules_json)?;
    let cands: Vec<BeamCandidate> = candidates
        .into_iter()
        .enumerate()
        .map(|(i, (ir, lp))| {
            let raw = serde_json::from_str(&ir).unwrap_or(Value::String(ir));
            BeamCandidate::new(raw, lp, i)
        })
        .collect();
    let ranked = rules::rank_beams(cands, &record.inner, &cfg);
    let top = rules::select_top_k(&ranked, k.unwrap_or(ranked.len()));
    top.iter().enumerate().map(|(i, c)| to_py(py, &c.to_value(i))).collect()
}

/// Full evaluation report for a corpus and beam file (both JSON lines).
#[pyfunction]
#[pyo3(signature = (corpus_text, beams_text, rules_json=None, ks=vec![1, 5], tol=DEFAULT_EXEC_TOL))]
fn evaluate(
    py: Python<'_>,
    corpus_text: &str,
    beams_text: &str,
    rules_json: Option<&str>,
    ks: Vec<usize>,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let corpus = parse_corpus_text(corpus_text).map_err(err)?;
    let beams = parse_beam_file(beams_text).map_err(err)?;
    let cfg = rule_config(rules_json)?;
    let report = metrics::evaluate_dataset_with(&corpus, &beams, &cfg, &ks, tol).map_err(err)?;
    to_py(py, &report.to_value())
}

/// Solves the problem in an LP file.
#[pyfunction]
#[pyo3(signature = (text, relax=false))]
fn solve_lp_file(py: Python<'_>, text: &str, relax: bool) -> PyResult<Py<PyAny>> {
    let lp = solver::parse_lp_file(text).map_err(err)?;
    solve_canonical(py, &lp, relax)
}

/// `n` seeded parameter mutations of `formulation`.
#[pyfunction]
#[pyo3(signature = (formulation, seed, n=5, rename=true))]
fn mutate(formulation: PyRef<'_, PyFormulation>, seed: u64, n: usize, rename: bool) -> PyResult<Vec<PyFormulation>> {
    let cfg = MutationConfig { seed, mutations_per_record: n, rename, ..Default::default() };
    Ok(augment::mutate_parameters(&formulation.inner, &cfg)
        .map_err(err)?
        .into_iter()
        .map(|inner| PyFormulation { inner })
        .collect())
}

#[pyfunction]
fn render_facts(formulation: PyRef<'_, PyFormulation>) -> String {
    augment::render_facts(&formulation.inner)
}

/// What `text` fails to mention of `formulation`, plus `accepted`.
#[pyfunction]
fn validate_generated(py: Python<'_>, text: &str, formulation: PyRef<'_, PyFormulation>) -> PyResult<Py<PyAny>> {
    let r = augment::validate_generated(text, &formulation.inner);
    let mut v = serde_json::to_value(&r).map_err(err)?;
    v["accepted"] = r.accepted().into();
    to_py(py, &v)
}

#[pymodule]
fn lpform(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFormulation>()?;
    m.add_class::<PyProblemRecord>()?;
    m.add_function(wrap_pyfunction!(parse_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(match_declarations, m)?)?;
    m.add_function(wrap_pyfunction!(execution_match, m)?)?;
    m.add_function(wrap_pyfunction!(rank_beams, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(solve_lp_file, m)?)?;
    m.add_function(wrap_pyfunction!(mutate, m)?)?;
    m.add_function(wrap_pyfunction!(render_facts, m)?)?;
    m.add_function(wrap_pyfunction!(validate_generated, m)?)?;
    Ok(())
}
