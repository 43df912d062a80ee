//! Post-editing corrections and rule-based beam scoring.
//!
//! Corrections (applied in this order, repeated to a fixpoint):
//!
//! | id | repair |
//! |----|--------|
//! | `C1` | linear objective whose coefficients are all equal becomes a sum objective |
//! | `C2` | lowerbound gets `GREATER_OR_EQUAL`, upperbound gets `LESS_OR_EQUAL` |
//! | `C3` | sum constraints lose their terms |
//! | `C4` | constraints with equal normalized rows are deduplicated, first kept |
//!
//! Penalties (magnitude is weight times the quantity shown):
//!
//! | id | quantity |
//! |----|----------|
//! | `S1` | constraint-direction spans minus constraints, if positive |
//! | `S2` | fraction of limit spans with no matching constraint limit |
//! | `S3` | fraction of parameter spans with no matching coefficient |
//! | `S4` | per row, `ratio / threshold - 1` when the coefficient spread exceeds the threshold |
//! | `S5` | number of linear/sum constraint pairs breaking coefficient/limit monotonicity |
//! | `OBJVAR_HINT` | 1 if a linear objective reuses a constraint's coefficient vector |
//! | `EXEC_FAIL` | 1 if the integer program is not solved to optimality |
//! | `CANON_FAIL` | the candidate does not parse or lower; ranks last |

use std::cmp::Ordering;
use std::collections::BTreeSet;

use indexmap::IndexMap;
use num_traits::{Signed, Zero};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::canonical::{CanonicalRow, canonical_objective, canonical_row, canonicalize, normalize_sense};
use crate::ir::{
    ConstraintDecl, ConstraintType, EntityLabel, Formulation, ObjectiveBody, ObjectiveDecl, Operator,
    ProblemRecord, VarResolver, constraint_from_json, constraint_value, objective_from_json, objective_value,
};
use crate::quantity::{Quantity, Rational, parse_quantity, rational_to_f64};
use crate::solver::{Status, solve_ilp};

pub const C1: &str = "C1";
pub const C2: &str = "C2";
pub const C3: &str = "C3";
pub const C4: &str = "C4";
pub const S1: &str = "S1";
pub const S2: &str = "S2";
pub const S3: &str = "S3";
pub const S4: &str = "S4";
pub const S5: &str = "S5";
pub const OBJVAR_HINT: &str = "OBJVAR_HINT";
pub const EXEC_FAIL: &str = "EXEC_FAIL";
pub const CANON_FAIL: &str = "CANON_FAIL";

pub const CORRECTION_IDS: [&str; 4] = [C1, C2, C3, C4];
pub const PENALTY_IDS: [&str; 8] = [S1, S2, S3, S4, S5, OBJVAR_HINT, EXEC_FAIL, CANON_FAIL];

/// Magnitude of the `CANON_FAIL` penalty. Large enough to sort below any
/// parseable candidate, finite so reports stay valid JSON.
pub const CANON_FAIL_MAGNITUDE: f64 = 1e9;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed rule config: {0}")]
    Malformed(String),
    #[error("weight for {0} must be finite and nonnegative")]
    BadWeight(String),
    #[error("scale_threshold must be finite and positive")]
    BadThreshold,
    #[error("unknown rule id {0:?}")]
    UnknownRule(String),
}

/// Penalty weights, the coefficient-spread threshold and the set of enabled
/// rules (corrections and penalties share one id space).
#[derive(Debug, Clone, PartialEq)]
pub struct RuleConfig {
    weights: IndexMap<String, f64>,
    scale_threshold: f64,
    enabled: BTreeSet<String>,
}

impl Default for RuleConfig {
    fn default() -> Self {
        let weights = [(S1, 2.0), (S2, 1.0), (S3, 1.0), (S4, 0.5), (S5, 1.5), (OBJVAR_HINT, 0.25), (EXEC_FAIL, 3.0)]
            .into_iter()
            .map(|(k, w)| (k.to_string(), w))
            .collect();
        let enabled = CORRECTION_IDS.iter().chain(&PENALTY_IDS).map(|s| s.to_string()).collect();
        Self { weights, scale_threshold: 1e4, enabled }
    }
}

impl RuleConfig {
    /// Reads `{"S1": 2.0, ..., "scale_threshold": 1e4, "enabled": ["C1", ...]}`.
    /// Missing weights keep their defaults; a missing `enabled` enables all.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let v: Value = serde_json::from_str(text).map_err(|e| ConfigError::Malformed(e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| ConfigError::Malformed("expected an object".into()))?;
        let mut cfg = Self::default();
        for (k, v) in obj {
            match k.as_str() {
                "scale_threshold" => {
                    let t = v.as_f64().ok_or(ConfigError::BadThreshold)?;
                    cfg = cfg.with_scale_threshold(t)?;
                }
                "enabled" => {
                    let list = v.as_array().ok_or_else(|| ConfigError::Malformed("enabled must be a list".into()))?;
                    let mut enabled = BTreeSet::new();
                    for id in list {
                        let id = id.as_str().ok_or_else(|| ConfigError::Malformed("rule ids are strings".into()))?;
                        if !CORRECTION_IDS.contains(&id) && !PENALTY_IDS.contains(&id) {
                            return Err(ConfigError::UnknownRule(id.into()));
                        }
                        enabled.insert(id.to_string());
                    }
                    cfg.enabled = enabled;
                }
                id => {
                    let w = v.as_f64().ok_or_else(|| ConfigError::BadWeight(id.into()))?;
                    cfg = cfg.with_weight(id, w)?;
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut m = Map::new();
        for (k, w) in &self.weights {
            m.insert(k.clone(), (*w).into());
        }
        m.insert("scale_threshold".into(), self.scale_threshold.into());
        m.insert("enabled".into(), self.enabled.iter().cloned().collect::<Vec<_>>().into());
        Value::Object(m).to_string()
    }

    pub fn with_weight(mut self, id: &str, w: f64) -> Result<Self, ConfigError> {
        if !PENALTY_IDS.contains(&id) || id == CANON_FAIL {
            return Err(ConfigError::UnknownRule(id.into()));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(ConfigError::BadWeight(id.into()));
        }
        self.weights.insert(id.to_string(), w);
        Ok(self)
    }

    pub fn with_scale_threshold(mut self, t: f64) -> Result<Self, ConfigError> {
        if !t.is_finite() || t <= 0.0 {
            return Err(ConfigError::BadThreshold);
        }
        self.scale_threshold = t;
        Ok(self)
    }

    pub fn with_enabled(mut self, id: &str, on: bool) -> Self {
        if on {
            self.enabled.insert(id.to_string());
        } else {
            self.enabled.remove(id);
        }
        self
    }

    pub fn weight(&self, id: &str) -> f64 {
        if id == CANON_FAIL {
            return CANON_FAIL_MAGNITUDE;
        }
        self.weights.get(id).copied().unwrap_or(0.0)
    }

    pub fn scale_threshold(&self) -> f64 {
        self.scale_threshold
    }

    pub fn is_enabled(&self, id: &str) -> bool {
        self.enabled.contains(id)
    }
}

// ---------------------------------------------------------------------------
// Corrections
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Objective(usize),
    Constraint(usize),
}

impl Location {
    pub fn to_value(self) -> Value {
        match self {
            Location::Objective(i) => serde_json::json!({ "objective": i }),
            Location::Constraint(i) => serde_json::json!({ "constraint": i }),
        }
    }
}

/// One edit: the declaration at `location` before and after. `after = None`
/// means the declaration was removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub rule_id: &'static str,
    pub location: Location,
    pub before: Value,
    pub after: Option<Value>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorrectionLog {
    pub entries: Vec<Correction>,
}

impl CorrectionLog {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Re-applies the logged edits to `f`. Indices refer to the formulation
    /// as it stood when each edit was made.
    pub fn replay(&self, f: &Formulation) -> Formulation {
        let mut out = f.clone();
        for e in &self.entries {
            match (e.location, &e.after) {
                (Location::Objective(i), Some(v)) => {
                    out.objectives[i] = objective_from_json(v).expect("logged objective is well-formed");
                }
                (Location::Objective(i), None) => {
                    out.objectives.remove(i);
                }
                (Location::Constraint(i), Some(v)) => {
                    out.constraints[i] = constraint_from_json(v).expect("logged constraint is well-formed");
                }
                (Location::Constraint(i), None) => {
                    out.constraints.remove(i);
                }
            }
        }
        out
    }

    pub fn to_value(&self) -> Value {
        Value::Array(
            self.entries
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "rule": e.rule_id,
                        "location": e.location.to_value(),
                        "before": e.before,
                        "after": e.after,
                    })
                })
                .collect(),
        )
    }
}

fn correct_objective_equal_coefficients(f: &mut Formulation, log: &mut CorrectionLog) {
    for (i, o) in f.objectives.iter_mut().enumerate() {
        let ObjectiveBody::Linear(terms) = &o.body else { continue };
        if terms.len() < 2 {
            continue;
        }
        let values: Vec<&Rational> = terms.iter().map(|(_, q)| q.value()).collect();
        if values.iter().any(|v| *v != values[0]) {
            continue;
        }
        let vars: Vec<String> = terms.iter().map(|(v, _)| v.clone()).collect();
        let before = objective_value(o);
        o.body = ObjectiveBody::Sum(vars);
        log.entries.push(Correction {
            rule_id: C1,
            location: Location::Objective(i),
            before,
            after: Some(objective_value(o)),
        });
    }
}

fn correct_bound_operators(f: &mut Formulation, log: &mut CorrectionLog) {
    for (i, c) in f.constraints.iter_mut().enumerate() {
        let required = match c.kind {
            ConstraintType::LowerBound => Operator::GreaterOrEqual,
            ConstraintType::UpperBound => Operator::LessOrEqual,
            _ => continue,
        };
        if c.operator != required {
            let before = constraint_value(c);
            c.operator = required;
            log.entries.push(Correction {
                rule_id: C2,
                location: Location::Constraint(i),
                before,
                after: Some(constraint_value(c)),
            });
        }
    }
}

fn correct_sum_terms(f: &mut Formulation, log: &mut CorrectionLog) {
    for (i, c) in f.constraints.iter_mut().enumerate() {
        if c.kind == ConstraintType::Sum && c.terms.is_some() {
            let before = constraint_value(c);
            c.terms = None;
            log.entries.push(Correction {
                rule_id: C3,
                location: Location::Constraint(i),
                before,
                after: Some(constraint_value(c)),
            });
        }
    }
}

#[derive(Debug, PartialEq)]
enum DedupKey {
    Row(CanonicalRow),
    Raw(Value),
}

fn dedup_key(c: &ConstraintDecl, resolver: &VarResolver<'_>) -> DedupKey {
    match canonical_row(c, resolver) {
        Ok(row) => {
            let mut row = normalize_sense(&row);
            row.comment = None;
            DedupKey::Row(row)
        }
        Err(_) => {
            let mut v = constraint_value(c);
            if let Some(m) = v.as_object_mut() {
                m.remove("direction");
            }
            DedupKey::Raw(v)
        }
    }
}

fn correct_duplicates(f: &mut Formulation, log: &mut CorrectionLog) {
    let vars = f.vars.clone();
    let resolver = VarResolver::new(&vars);
    let mut seen: Vec<DedupKey> = Vec::new();
    let mut i = 0;
    while i < f.constraints.len() {
        let key = dedup_key(&f.constraints[i], &resolver);
        if seen.contains(&key) {
            let removed = f.constraints.remove(i);
            log.entries.push(Correction {
                rule_id: C4,
                location: Location::Constraint(i),
                before: constraint_value(&removed),
                after: None,
            });
        } else {
            seen.push(key);
            i += 1;
        }
    }
}

/// Applies the enabled corrections until nothing changes.
pub fn apply_corrections(f: &Formulation, cfg: &RuleConfig) -> (Formulation, CorrectionLog) {
    let mut out = f.clone();
    let mut log = CorrectionLog::default();
    loop {
        let before = log.len();
        if cfg.is_enabled(C1) {
            correct_objective_equal_coefficients(&mut out, &mut log);
        }
        if cfg.is_enabled(C2) {
            correct_bound_operators(&mut out, &mut log);
        }
        if cfg.is_enabled(C3) {
            correct_sum_terms(&mut out, &mut log);
        }
        if cfg.is_enabled(C4) {
            correct_duplicates(&mut out, &mut log);
        }
        if log.len() == before {
            return (out, log);
        }
    }
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

pub type Penalty = (String, f64);

fn span_values(rec: &ProblemRecord, label: EntityLabel) -> Vec<Vec<Rational>> {
    rec.spans_with(label)
        .filter_map(|s| parse_quantity(&s.surface).ok())
        .map(|q| q.match_values())
        .collect()
}

fn missing_fraction(spans: &[Vec<Rational>], pool: &[&Quantity]) -> f64 {
    if spans.is_empty() {
        return 0.0;
    }
    let pool: Vec<Vec<Rational>> = pool.iter().map(|q| q.match_values()).collect();
    let missing = spans
        .iter()
        .filter(|want| !pool.iter().any(|have| have.iter().any(|h| want.contains(h))))
        .count();
    missing as f64 / spans.len() as f64
}

fn formulation_limits(f: &Formulation) -> Vec<&Quantity> {
    f.constraints.iter().filter_map(|c| c.limit.as_ref()).collect()
}

fn formulation_coefficients(f: &Formulation) -> Vec<&Quantity> {
    let mut out = Vec::new();
    for o in &f.objectives {
        if let ObjectiveBody::Linear(t) = &o.body {
            out.extend(t.iter().map(|(_, q)| q));
        }
    }
    for c in &f.constraints {
        if let Some(t) = &c.terms {
            out.extend(t.iter().map(|(_, q)| q));
        }
        out.extend(c.param.as_ref());
    }
    out
}

/// Ratio of the largest to the smallest nonzero coefficient magnitude.
pub fn coefficient_spread(row: &CanonicalRow) -> Option<f64> {
    let mags: Vec<f64> =
        row.coefficients.iter().filter(|c| !c.is_zero()).map(|c| rational_to_f64(&c.abs())).collect();
    let max = mags.iter().copied().fold(f64::NAN, f64::max);
    let min = mags.iter().copied().fold(f64::NAN, f64::min);
    (mags.len() >= 2).then(|| max / min)
}

/// Counts violated pairs among linear and sum rows of the same type.
///
/// Each row is oriented as written (coefficients nonnegative; rows with
/// mixed signs are skipped). For distinct rows with `w1 ≥ w2` elementwise
/// and `w1 ≠ w2`, `z1 ≥ z2` must hold; equal coefficient vectors are a
/// violation on their own.
pub fn monotonicity_violations(f: &Formulation, rows: &[CanonicalRow]) -> usize {
    let oriented: Vec<(ConstraintType, &CanonicalRow)> = f
        .constraints
        .iter()
        .zip(rows)
        .filter(|(c, _)| matches!(c.kind, ConstraintType::Linear | ConstraintType::Sum))
        .filter(|(_, r)| r.coefficients.iter().all(|w| !w.is_negative()))
        .map(|(c, r)| (c.kind, r))
        .collect();
    let mut count = 0;
    for i in 0..oriented.len() {
        for j in i + 1..oriented.len() {
            let (ki, a) = oriented[i];
            let (kj, b) = oriented[j];
            if ki != kj {
                continue;
            }
            if a.coefficients == b.coefficients {
                count += 1;
                continue;
            }
            let a_dom = a.coefficients.iter().zip(&b.coefficients).all(|(x, y)| x >= y);
            let b_dom = a.coefficients.iter().zip(&b.coefficients).all(|(x, y)| y >= x);
            if a_dom && a.rhs < b.rhs || b_dom && b.rhs < a.rhs {
                count += 1;
            }
        }
    }
    count
}

fn reuses_constraint_coefficients(objective: &ObjectiveDecl, obj_row: &[Rational], rows: &[CanonicalRow]) -> bool {
    if !matches!(objective.body, ObjectiveBody::Linear(_)) {
        return false;
    }
    rows.iter().any(|r| {
        r.coefficients == obj_row || r.coefficients.iter().zip(obj_row).all(|(a, b)| *a == -b.clone())
    })
}

/// Scores `f` against the tagging in `rec`. Only positive magnitudes are
/// returned.
pub fn score_candidate(f: &Formulation, rec: &ProblemRecord, cfg: &RuleConfig) -> Vec<Penalty> {
    let lp = match canonicalize(f, rec) {
        Ok(lp) => lp,
        Err(_) => return vec![(CANON_FAIL.to_string(), CANON_FAIL_MAGNITUDE)],
    };
    let mut out: Vec<Penalty> = Vec::new();
    let mut push = |id: &str, amount: f64| {
        let m = cfg.weight(id) * amount;
        if cfg.is_enabled(id) && m > 0.0 {
            out.push((id.to_string(), m));
        }
    };

    let directions = rec.spans_with(EntityLabel::ConstDir).count();
    push(S1, directions.saturating_sub(f.constraints.len()) as f64);
    push(S2, missing_fraction(&span_values(rec, EntityLabel::Limit), &formulation_limits(f)));
    push(S3, missing_fraction(&span_values(rec, EntityLabel::Param), &formulation_coefficients(f)));

    let t = cfg.scale_threshold();
    let excess: f64 = lp
        .rows
        .iter()
        .filter_map(coefficient_spread)
        .filter(|&s| s > t)
        .map(|s| s / t - 1.0)
        .sum();
    push(S4, excess);
    push(S5, monotonicity_violations(f, &lp.rows) as f64);

    let resolver = rec.resolver();
    let hint = f.objectives.iter().any(|o| {
        canonical_objective(o, &resolver).is_ok_and(|row| reuses_constraint_coefficients(o, &row.coefficients, &lp.rows))
    });
    push(OBJVAR_HINT, if hint { 1.0 } else { 0.0 });

    if cfg.is_enabled(EXEC_FAIL) && lp.objectives.len() == 1 {
        let solved = solve_ilp(&lp).is_ok_and(|s| s.status == Status::Optimal);
        push(EXEC_FAIL, if solved { 0.0 } else { 1.0 });
    }
    out
}

// ---------------------------------------------------------------------------
// Ranking
// ---------------------------------------------------------------------------

/// One beam hypothesis. `formulation` is `None` when the raw IR does not
/// parse.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamCandidate {
    pub formulation: Option<Formulation>,
    pub raw_ir: Value,
    pub logprob: f64,
    pub penalties: Vec<Penalty>,
    pub total_score: f64,
    pub original_index: usize,
    pub corrections: CorrectionLog,
}

impl BeamCandidate {
    pub fn new(raw_ir: Value, logprob: f64, original_index: usize) -> Self {
        let formulation = Formulation::from_value(&raw_ir).ok();
        Self {
            formulation,
            raw_ir,
            logprob,
            penalties: Vec::new(),
            total_score: logprob,
            original_index,
            corrections: CorrectionLog::default(),
        }
    }

    pub fn from_formulation(f: Formulation, logprob: f64, original_index: usize) -> Self {
        let raw_ir = f.to_value();
        Self {
            formulation: Some(f),
            raw_ir,
            logprob,
            penalties: Vec::new(),
            total_score: logprob,
            original_index,
            corrections: CorrectionLog::default(),
        }
    }

    pub fn penalty_total(&self) -> f64 {
        self.penalties.iter().map(|(_, m)| m).sum()
    }

    pub fn penalty(&self, id: &str) -> f64 {
        self.penalties.iter().filter(|(k, _)| k == id).map(|(_, m)| m).sum()
    }

    /// Corrects and scores in place.
    pub fn evaluate(&mut self, rec: &ProblemRecord, cfg: &RuleConfig) {
        match &self.formulation {
            Some(f) => {
                let (fixed, log) = apply_corrections(f, cfg);
                self.penalties = score_candidate(&fixed, rec, cfg);
                self.formulation = Some(fixed);
                self.corrections = log;
            }
            None => self.penalties = vec![(CANON_FAIL.to_string(), CANON_FAIL_MAGNITUDE)],
        }
        self.total_score = self.logprob - self.penalty_total();
    }

    pub fn to_value(&self, rank: usize) -> Value {
        let penalties: Map<String, Value> = self.penalties.iter().map(|(k, m)| (k.clone(), (*m).into())).collect();
        let ir = self.formulation.as_ref().map_or_else(|| self.raw_ir.clone(), Formulation::to_value);
        serde_json::json!({
            "rank": rank,
            "original_index": self.original_index,
            "logprob": self.logprob,
            "total_score": self.total_score,
            "penalties": penalties,
            "corrections": self.corrections.to_value(),
            "ir": ir,
        })
    }
}

fn rank_order(a: &BeamCandidate, b: &BeamCandidate) -> Ordering {
    b.total_score
        .total_cmp(&a.total_score)
        .then(a.penalties.len().cmp(&b.penalties.len()))
        .then(a.original_index.cmp(&b.original_index))
}

/// Corrects and scores every candidate, then sorts best first.
pub fn rank_beams(mut candidates: Vec<BeamCandidate>, rec: &ProblemRecord, cfg: &RuleConfig) -> Vec<BeamCandidate> {
    for c in &mut candidates {
        c.evaluate(rec, cfg);
    }
    candidates.sort_by(rank_order);
    candidates
}

pub fn select_top_k(ranked: &[BeamCandidate], k: usize) -> &[BeamCandidate] {
    &ranked[..k.min(ranked.len())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{EntitySpan, ObjectiveDirection, Terms};
    use crate::quantity::int;

    fn q(s: &str) -> Quantity {
        parse_quantity(s).unwrap()
    }

    fn terms(pairs: &[(&str, &str)]) -> Terms {
        pairs.iter().map(|(v, c)| (*v, q(c))).collect()
    }

    fn dentists(swapped: bool) -> Formulation {
        let (a, b) = if swapped { ("65000", "1000") } else { ("1000", "65000") };
        let (opa, opb) = if swapped {
            (Operator::LessOrEqual, Operator::GreaterOrEqual)
        } else {
            (Operator::GreaterOrEqual, Operator::LessOrEqual)
        };
        Formulation::new(
            ObjectiveDecl::sum(ObjectiveDirection::Minimize, "total number of shifts", vec!["dentists".into(), "oral hygienists".into()]),
            vec![
                ConstraintDecl::new(ConstraintType::Linear, opa)
                    .with_limit(q(a))
                    .with_terms(terms(&[("Dentists", "12"), ("oral hygienists", "5")])),
                ConstraintDecl::new(ConstraintType::Sum, Operator::GreaterOrEqual).with_limit(q("20")),
                ConstraintDecl::new(ConstraintType::Linear, opb)
                    .with_limit(q(b))
                    .with_terms(terms(&[("dentists", "900"), ("oral hygienists", "250")])),
            ],
            vec!["dentists".into(), "oral hygienists".into()],
        )
    }

    fn record(f: &Formulation) -> ProblemRecord {
        ProblemRecord {
            id: "t".into(),
            text: String::new(),
            spans: vec![],
            variable_order: f.vars.clone(),
            entity_mapping: IndexMap::new(),
            gold: Some(f.clone()),
            extra: Map::new(),
        }
    }

    #[test]
    fn equal_objective_coefficients_become_sum() {
        let f = Formulation::new(
            ObjectiveDecl::linear(ObjectiveDirection::Maximize, "p", terms(&[("x", "5"), ("y", "5")])),
            vec![],
            vec!["x".into(), "y".into()],
        );
        let (g, log) = apply_corrections(&f, &RuleConfig::default());
        assert_eq!(g.objectives[0].body, ObjectiveBody::Sum(vec!["x".into(), "y".into()]));
        assert_eq!(log.len(), 1);
        assert_eq!(log.entries[0].rule_id, C1);
        assert_eq!(log.replay(&f), g);
    }

    #[test]
    fn bound_operator_repair() {
        let f = Formulation::new(
            ObjectiveDecl::sum(ObjectiveDirection::Maximize, "p", vec!["AC seats".into()]),
            vec![ConstraintDecl::new(ConstraintType::LowerBound, Operator::LessOrEqual).with_var("AC seats").with_limit(q("100"))],
            vec!["AC seats".into()],
        );
        let (g, _) = apply_corrections(&f, &RuleConfig::default());
        assert_eq!(g.constraints[0].operator, Operator::GreaterOrEqual);
    }

    #[test]
    fn duplicates_removed_and_idempotent() {
        let c = ConstraintDecl::new(ConstraintType::Linear, Operator::LessOrEqual)
            .with_limit(q("10"))
            .with_terms(terms(&[("x", "1"), ("y", "2")]));
        let f = Formulation::new(
            ObjectiveDecl::linear(ObjectiveDirection::Maximize, "p", terms(&[("x", "1"), ("y", "3")])),
            vec![c.clone(), c],
            vec!["x".into(), "y".into()],
        );
        let (g, log) = apply_corrections(&f, &RuleConfig::default());
        assert_eq!(g.constraints.len(), 1);
        assert_eq!(log.len(), 1);
        assert_eq!(log.entries[0].after, None);
        let (h, log2) = apply_corrections(&g, &RuleConfig::default());
        assert_eq!(h, g);
        assert!(log2.is_empty());
    }

    #[test]
    fn swapped_limits_break_monotonicity() {
        let cfg = RuleConfig::default();
        let gold = dentists(false);
        let pred = dentists(true);
        let rec = record(&gold);
        let gold_rows = canonicalize(&gold, &rec).unwrap().rows;
        let pred_rows = canonicalize(&pred, &rec).unwrap().rows;
        assert_eq!(monotonicity_violations(&gold, &gold_rows), 0);
        assert_eq!(monotonicity_violations(&pred, &pred_rows), 1);
        let p = score_candidate(&pred, &rec, &cfg);
        assert!(p.iter().any(|(k, m)| k == S5 && *m == 1.5), "{p:?}");
        assert!(score_candidate(&gold, &rec, &cfg).is_empty());
    }

    #[test]
    fn missing_constraint_hits_direction_and_limit_rules() {
        let text = "A train can carry at most 500 passengers.";
        let at_most = text.find("at most").unwrap();
        let five = text.find("500").unwrap();
        let f = Formulation::new(
            ObjectiveDecl::linear(ObjectiveDirection::Maximize, "profit", terms(&[("x", "50"), ("y", "30")])),
            vec![],
            vec!["x".into(), "y".into()],
        );
        let mut rec = record(&f);
        rec.text = text.into();
        rec.spans = vec![
            EntitySpan { start: at_most, end: at_most + 7, label: EntityLabel::ConstDir, surface: "at most".into() },
            EntitySpan { start: five, end: five + 3, label: EntityLabel::Limit, surface: "500".into() },
        ];
        let mut cfg = RuleConfig::default();
        cfg = cfg.with_enabled(EXEC_FAIL, false);
        let p = score_candidate(&f, &rec, &cfg);
        assert_eq!(p, vec![(S1.to_string(), 2.0), (S2.to_string(), 1.0)]);
    }

    #[test]
    fn spread_threshold() {
        let row = CanonicalRow::new(vec![int(1), int(20000)], crate::canonical::Sense::Le, int(5));
        assert_eq!(coefficient_spread(&row), Some(20000.0));
        let f = Formulation::new(
            ObjectiveDecl::linear(ObjectiveDirection::Maximize, "p", terms(&[("x", "1"), ("y", "3")])),
            vec![ConstraintDecl::new(ConstraintType::Linear, Operator::LessOrEqual)
                .with_limit(q("5"))
                .with_terms(terms(&[("x", "1"), ("y", "20000")]))],
            vec!["x".into(), "y".into()],
        );
        let p = score_candidate(&f, &record(&f), &RuleConfig::default());
        assert_eq!(p, vec![(S4.to_string(), 0.5)]);
    }

    #[test]
    fn ranking_ties_fall_to_index() {
        let f = dentists(false);
        let rec = record(&f);
        let mut broken = f.clone();
        broken.constraints.insert(
            0,
            ConstraintDecl::new(ConstraintType::LowerBound, Operator::LessOrEqual).with_var("dentists").with_limit(q("0")),
        );
        let cands = vec![
            BeamCandidate::from_formulation(broken, 0.0, 0),
            BeamCandidate::from_formulation(f, 0.0, 1),
        ];
        let ranked = rank_beams(cands, &rec, &RuleConfig::default());
        assert_eq!(ranked.iter().map(|c| c.original_index).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(select_top_k(&ranked, 5).len(), 2);
        assert_eq!(select_top_k(&ranked, 1)[0].original_index, 0);
    }

    #[test]
    fn config_round_trip_and_rejection() {
        let cfg = RuleConfig::from_json(r#"{"S1": 4.0, "scale_threshold": 100}"#).unwrap();
        assert_eq!(cfg.weight(S1), 4.0);
        assert_eq!(cfg.weight(S2), 1.0);
        assert_eq!(cfg.scale_threshold(), 100.0);
        assert_eq!(RuleConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        assert!(RuleConfig::from_json(r#"{"S1": -1}"#).is_err());
        assert!(RuleConfig::from_json(r#"{"scale_threshold": 0}"#).is_err());
        assert!(RuleConfig::from_json(r#"{"S9": 1}"#).is_err());
    }

    #[test]
    fn unparseable_candidate_ranks_last() {
        let f = dentists(false);
        let rec = record(&f);
        let cands = vec![
            BeamCandidate::new(serde_json::json!({"obj_declaration": 3}), 0.0, 0),
            BeamCandidate::from_formulation(f, -5.0, 1),
        ];
        let ranked = rank_beams(cands, &rec, &RuleConfig::default());
        assert_eq!(ranked[0].original_index, 1);
        assert_eq!(ranked[1].penalty(CANON_FAIL), CANON_FAIL_MAGNITUDE);
    }
}
