//! Canonical accuracy, execution match and pass@k.
//!
//! Canonical accuracy over a set of problems is
//! `1 - Σ(FP + FN) / ΣD`, where a declaration counts as a false positive if
//! it matches no gold declaration, as a false negative if no prediction
//! matches it, and `D` is the number of gold declarations.

use std::collections::HashMap;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::beams::BeamLine;
use crate::canonical::{CanonicalLP, canonicalize, normalize_sense, scale_normalize};
use crate::ir::{Formulation, ProblemRecord};
use crate::rules::{BeamCandidate, RuleConfig, rank_beams};
use crate::solver::{Status, solve_ilp};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no gold declarations to score against")]
    EmptyDataset,
    #[error("record {0:?} has no gold formulation")]
    MissingGold(String),
    #[error("beam line {0:?} has no matching record")]
    OrphanBeam(String),
    #[error("beam id {0:?} appears more than once")]
    DuplicateBeam(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MatchResult {
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub d: usize,
    /// `(prediction index, gold index)`, objectives first, then constraints
    /// offset by the number of objectives on each side.
    pub pairs: Vec<(usize, usize)>,
}

impl MatchResult {
    pub fn accuracy(&self) -> f64 {
        if self.d == 0 {
            return if self.fp == 0 { 1.0 } else { 0.0 };
        }
        1.0 - (self.fp + self.fn_) as f64 / self.d as f64
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchOptions {
    /// Also divide each row by its largest coefficient magnitude before
    /// comparing.
    pub scale_normalize: bool,
}

fn matched_pairs<T>(pred: &[T], gold: &[T], eq: impl Fn(&T, &T) -> bool) -> Vec<(usize, usize)> {
    let mut used = vec![false; gold.len()];
    let mut pairs = Vec::new();
    for (i, p) in pred.iter().enumerate() {
        if let Some(j) = (0..gold.len()).find(|&j| !used[j] && eq(p, &gold[j])) {
            used[j] = true;
            pairs.push((i, j));
        }
    }
    pairs
}

fn lowered(lp: &CanonicalLP, opts: MatchOptions) -> CanonicalLP {
    let mut lp = lp.clone();
    for r in &mut lp.rows {
        *r = normalize_sense(r);
        if opts.scale_normalize {
            *r = scale_normalize(r);
        }
    }
    lp
}

/// Matches declarations of `pred` against `gold` by exact row equality.
pub fn match_declarations(pred: &Formulation, gold: &Formulation, rec: &ProblemRecord) -> MatchResult {
    match_declarations_with(pred, gold, rec, MatchOptions::default())
}

pub fn match_declarations_with(
    pred: &Formulation,
    gold: &Formulation,
    rec: &ProblemRecord,
    opts: MatchOptions,
) -> MatchResult {
    let d = gold.declaration_count();
    let Ok(g) = canonicalize(gold, rec) else {
        return MatchResult { fp: pred.declaration_count(), fn_: d, d, pairs: vec![] };
    };
    let Ok(p) = canonicalize(pred, rec) else {
        return MatchResult { fp: pred.declaration_count(), fn_: d, d, pairs: vec![] };
    };
    let (g, p) = (lowered(&g, opts), lowered(&p, opts));
    let mut pairs = matched_pairs(&p.objectives, &g.objectives, |a, b| a.same_objective(b));
    let (po, go) = (p.objectives.len(), g.objectives.len());
    pairs.extend(matched_pairs(&p.rows, &g.rows, |a, b| a.same_row(b)).into_iter().map(|(i, j)| (i + po, j + go)));
    let m = pairs.len();
    MatchResult { fp: po + p.rows.len() - m, fn_: d - m, d, pairs }
}

/// Returns `(micro, mean)`.
pub fn canonical_accuracy(results: &[MatchResult]) -> Result<(f64, f64), MetricsError> {
    let d: usize = results.iter().map(|r| r.d).sum();
    if d == 0 {
        return Err(MetricsError::EmptyDataset);
    }
    let errors: usize = results.iter().map(|r| r.fp + r.fn_).sum();
    let micro = 1.0 - errors as f64 / d as f64;
    let mean = results.iter().map(MatchResult::accuracy).sum::<f64>() / results.len() as f64;
    Ok((micro, mean))
}

pub const DEFAULT_EXEC_TOL: f64 = 1e-6;

fn solve_value(f: &Formulation, rec: &ProblemRecord) -> Option<(Status, Option<f64>)> {
    let lp = canonicalize(f, rec).ok()?;
    let s = solve_ilp(&lp).ok()?;
    Some((s.status, s.objective_value))
}

/// True when both formulations solve to the same status and, if optimal,
/// to values within `tol · max(1, |gold|)`.
pub fn execution_match(pred: &Formulation, gold: &Formulation, rec: &ProblemRecord, tol: f64) -> bool {
    execution_match_gold_value(pred, solve_value(gold, rec), rec, tol)
}

fn execution_match_gold_value(pred: &Formulation, gold: Option<(Status, Option<f64>)>, rec: &ProblemRecord, tol: f64) -> bool {
    let (Some(p), Some(g)) = (solve_value(pred, rec), gold) else {
        return false;
    };
    match (p, g) {
        ((Status::Optimal, Some(vp)), (Status::Optimal, Some(vg))) => (vp - vg).abs() <= tol * vg.abs().max(1.0),
        ((sp, _), (sg, _)) => sp == sg && sp != Status::Optimal,
    }
}

/// Best canonical accuracy and any execution match among the first `k`
/// ranked beams.
pub fn pass_at_k(beams: &[BeamCandidate], gold: &Formulation, rec: &ProblemRecord, k: usize) -> (f64, bool) {
    let top = &beams[..k.min(beams.len())];
    let gold_value = solve_value(gold, rec);
    let d = gold.declaration_count();
    let mut best = f64::NEG_INFINITY;
    let mut exec = false;
    for c in top {
        let acc = match &c.formulation {
            Some(f) => match_declarations(f, gold, rec).accuracy(),
            None => MatchResult { fp: 0, fn_: d, d, pairs: vec![] }.accuracy(),
        };
        best = best.max(acc);
        exec = exec || c.formulation.as_ref().is_some_and(|f| execution_match_gold_value(f, gold_value, rec, DEFAULT_EXEC_TOL));
    }
    if top.is_empty() {
        best = 0.0;
    }
    (best, exec)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemResult {
    pub id: String,
    pub canonical_accuracy: f64,
    pub exec_match: bool,
    pub chosen_beam: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub problems: usize,
    pub micro_canonical_accuracy: f64,
    pub micro_canonical_accuracy_clamped: f64,
    pub mean_canonical_accuracy: f64,
    pub execution_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassAtK {
    pub k: usize,
    pub canonical_micro: f64,
    pub canonical_mean: f64,
    pub execution_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub per_problem: Vec<ProblemResult>,
    pub aggregate: Aggregate,
    pub pass_at_k: Vec<PassAtK>,
    /// Records with a gold formulation but no beam line.
    pub unscored: Vec<String>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Per-problem rows as CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,canonical_accuracy,exec_match,chosen_beam,fp,fn,d\n");
        for p in &self.per_problem {
            let id = if p.id.contains([',', '"', '\n']) { format!("\"{}\"", p.id.replace('"', "\"\"")) } else { p.id.clone() };
            out.push_str(&format!(
                "{id},{},{},{},{},{},{}\n",
                p.canonical_accuracy, p.exec_match, p.chosen_beam, p.fp, p.fn_, p.d
            ));
        }
        out
    }

    /// Fixed-width summary for terminals.
    pub fn to_table(&self) -> String {
        let a = &self.aggregate;
        let mut out = String::new();
        out.push_str(&format!("problems                   {}\n", a.problems));
        out.push_str(&format!("canonical accuracy (micro) {:.4}  (clamped {:.4})\n", a.micro_canonical_accuracy, a.micro_canonical_accuracy_clamped));
        out.push_str(&format!("canonical accuracy (mean)  {:.4}\n", a.mean_canonical_accuracy));
        out.push_str(&format!("execution match rate       {:.4}\n", a.execution_rate));
        if !self.pass_at_k.is_empty() {
            out.push_str("\n   k  canon(micro)  canon(mean)  exec\n");
            for p in &self.pass_at_k {
                out.push_str(&format!("{:>4}  {:>12.4}  {:>11.4}  {:.4}\n", p.k, p.canonical_micro, p.canonical_mean, p.execution_rate));
            }
        }
        if !self.unscored.is_empty() {
            out.push_str(&format!("\n{} record(s) without beams\n", self.unscored.len()));
        }
        out
    }
}

struct Scored {
    result: ProblemResult,
    /// Best `MatchResult` in the top k, per requested k.
    best: Vec<(MatchResult, bool)>,
}

fn evaluate_problem(
    rec: &ProblemRecord,
    gold: &Formulation,
    line: &BeamLine,
    cfg: &RuleConfig,
    ks: &[usize],
    tol: f64,
) -> Scored {
    let ranked = rank_beams(line.to_candidates(), rec, cfg);
    let d = gold.declaration_count();
    let gold_value = solve_value(gold, rec);
    let scored: Vec<(MatchResult, bool)> = ranked
        .iter()
        .map(|c| match &c.formulation {
            Some(f) => (match_declarations(f, gold, rec), execution_match_gold_value(f, gold_value, rec, tol)),
            None => (MatchResult { fp: 0, fn_: d, d, pairs: vec![] }, false),
        })
        .collect();
    let empty = (MatchResult { fp: 0, fn_: d, d, pairs: vec![] }, false);
    let (first, first_exec) = scored.first().cloned().unwrap_or_else(|| empty.clone());
    let best = ks
        .iter()
        .map(|&k| {
            let top = &scored[..k.min(scored.len())];
            let m = top
                .iter()
                .map(|(m, _)| m)
                .max_by(|a, b| a.accuracy().total_cmp(&b.accuracy()).then((b.fp + b.fn_).cmp(&(a.fp + a.fn_))))
                .cloned()
                .unwrap_or_else(|| empty.0.clone());
            (m, top.iter().any(|(_, e)| *e))
        })
        .collect();
    Scored {
        result: ProblemResult {
            id: rec.id.clone(),
            canonical_accuracy: first.accuracy(),
            exec_match: first_exec,
            chosen_beam: ranked.first().map_or(0, |c| c.original_index),
            fp: first.fp,
            fn_: first.fn_,
            d: first.d,
        },
        best,
    }
}

/// Ranks each problem's beams and scores the top candidate, plus pass@k for
/// each `k` in `ks`. Output order follows the beam file.
pub fn evaluate_dataset(
    corpus: &[ProblemRecord],
    beams: &[BeamLine],
    cfg: &RuleConfig,
    ks: &[usize],
) -> Result<EvalReport, MetricsError> {
    evaluate_dataset_with(corpus, beams, cfg, ks, DEFAULT_EXEC_TOL)
}

/// As [`evaluate_dataset`] with an explicit execution-match tolerance.
pub fn evaluate_dataset_with(
    corpus: &[ProblemRecord],
    beams: &[BeamLine],
    cfg: &RuleConfig,
    ks: &[usize],
    exec_tol: f64,
) -> Result<EvalReport, MetricsError> {
    let by_id: HashMap<&str, &ProblemRecord> = corpus.iter().map(|r| (r.id.as_str(), r)).collect();
    let mut seen: IndexMap<&str, ()> = IndexMap::new();
    let mut work = Vec::with_capacity(beams.len());
    for line in beams {
        if seen.insert(line.id.as_str(), ()).is_some() {
            return Err(MetricsError::DuplicateBeam(line.id.clone()));
        }
        let rec = by_id.get(line.id.as_str()).ok_or_else(|| MetricsError::OrphanBeam(line.id.clone()))?;
        let gold = rec.gold.as_ref().ok_or_else(|| MetricsError::MissingGold(rec.id.clone()))?;
        work.push((*rec, gold, line));
    }
    let scored: Vec<Scored> = work.par_iter().map(|(rec, gold, line)| evaluate_problem(rec, gold, line, cfg, ks, exec_tol)).collect();

    let firsts: Vec<MatchResult> = scored
        .iter()
        .map(|s| MatchResult { fp: s.result.fp, fn_: s.result.fn_, d: s.result.d, pairs: vec![] })
        .collect();
    let (micro, mean) = canonical_accuracy(&firsts)?;
    let n = scored.len() as f64;
    let exec = scored.iter().filter(|s| s.result.exec_match).count() as f64 / n;
    let pass = ks
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let results: Vec<MatchResult> = scored.iter().map(|s| s.best[i].0.clone()).collect();
            let (micro, mean) = canonical_accuracy(&results).expect("nonempty checked above");
            let exec = scored.iter().filter(|s| s.best[i].1).count() as f64 / n;
            PassAtK { k, canonical_micro: micro, canonical_mean: mean, execution_rate: exec }
        })
        .collect();
    let unscored =
        corpus.iter().filter(|r| r.gold.is_some() && !seen.contains_key(r.id.as_str())).map(|r| r.id.clone()).collect();
    Ok(EvalReport {
        per_problem: scored.into_iter().map(|s| s.result).collect(),
        aggregate: Aggregate {
            problems: work.len(),
            micro_canonical_accuracy: micro,
            micro_canonical_accuracy_clamped: micro.clamp(0.0, 1.0),
            mean_canonical_accuracy: mean,
            execution_rate: exec,
        },
        pass_at_k: pass,
        unscored,
    })
}
