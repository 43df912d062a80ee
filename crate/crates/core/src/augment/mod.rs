//! IR-level data augmentation: parameter jitter, variable renaming,
//! promotion of a linear constraint to a second objective, text generation
//! and checking that generated text mentions everything it should.

mod check;
mod generate;

pub use check::{GenValidationReport, validate_generated};
pub use generate::{GenServiceConfig, GeneratedProblem, backtranslate, backtranslate_all, render_facts};

use indexmap::IndexMap;
use num_traits::{Signed, Zero};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::canonical::canonicalize_with;
use crate::ir::{
    ConstraintType, Formulation, ObjectiveBody, ObjectiveDecl, ObjectiveDirection, Operator, ProblemRecord, Terms,
    VarResolver,
};
use crate::quantity::{
    Quantity, Rational, decimal_places, format_decimal, int, rational_to_f64, render_rational, round_to_places,
};
use crate::solver::{Status, solve_ilp};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AugmentError {
    #[error("not eligible: {0}")]
    NotEligible(String),
    #[error("invalid mutation config: {0}")]
    InvalidConfig(String),
    #[error("generation service unavailable: {0}")]
    ServiceUnavailable(String),
    #[error("generation service returned empty text")]
    EmptyGeneration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MutationConfig {
    pub seed: u64,
    /// Relative half-width of the multiplicative coefficient jitter.
    pub coefficient_jitter: f64,
    /// Relative half-width of the multiplicative limit jitter.
    pub limit_jitter: f64,
    /// Rename variables from `rename_pool`.
    pub rename: bool,
    pub rename_pool: IndexMap<String, Vec<String>>,
    pub mutations_per_record: usize,
}

impl Default for MutationConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            coefficient_jitter: 0.5,
            limit_jitter: 0.5,
            rename: true,
            rename_pool: default_rename_pool(),
            mutations_per_record: 5,
        }
    }
}

impl MutationConfig {
    pub fn check(&self) -> Result<(), AugmentError> {
        for (name, j) in [("coefficient_jitter", self.coefficient_jitter), ("limit_jitter", self.limit_jitter)] {
            if !(0.0..1.0).contains(&j) {
                return Err(AugmentError::InvalidConfig(format!("{name} must lie in [0, 1)")));
            }
        }
        Ok(())
    }
}

/// Variable names by application domain.
pub fn default_rename_pool() -> IndexMap<String, Vec<String>> {
    let pool: [(&str, &[&str]); 6] = [
        ("advertising", &["radio ads", "newspaper ads", "billboards", "television ads", "flyers", "podcast spots", "banner ads", "magazine ads"]),
        ("investment", &["bonds", "stocks", "real estate", "mutual funds", "savings accounts", "gold", "index funds", "startups"]),
        ("production", &["chairs", "tables", "desks", "shelves", "cabinets", "stools", "benches", "beds"]),
        ("sales", &["cakes", "cookies", "muffins", "pies", "bagels", "donuts", "croissants", "scones"]),
        ("transportation", &["trucks", "vans", "cargo planes", "trains", "ships", "motorcycles", "buses", "carts"]),
        ("sciences", &["beakers", "test tubes", "microscopes", "centrifuges", "pipettes", "petri dishes", "flasks", "burners"]),
    ];
    pool.iter().map(|(d, names)| (d.to_string(), names.iter().map(|s| s.to_string()).collect())).collect()
}

/// Returns `q` scaled by `factor`, re-rationalized to a readable value of
/// the same kind. Integers stay integers (magnitude at least 1), decimals
/// keep at least two places. Unchanged values keep their source text.
fn jitter_quantity(q: &Quantity, factor: f64, cap_at_one: bool) -> Quantity {
    let v = q.value();
    if v.is_zero() {
        return q.clone();
    }
    let magnitude = rational_to_f64(&v.abs()) * factor;
    let places = if v.is_integer() { 0 } else { decimal_places(v).unwrap_or(2).max(2) };
    let floor = if places == 0 { int(1) } else { Rational::new(1.into(), num_bigint::BigInt::from(10u64.pow(places))) };
    let mut m = round_to_places(magnitude, places);
    if m < floor {
        m = floor;
    }
    if cap_at_one && m > int(1) {
        m = int(1);
    }
    let value = if v.is_negative() { -m } else { m };
    if &value == v {
        return q.clone();
    }
    let text = if q.is_percent() {
        format!("{}%", format_decimal(&(&value * int(100))).expect("terminating"))
    } else {
        format_decimal(&value).expect("terminating")
    };
    Quantity::new(value, text)
}

fn all_equal(terms: &Terms) -> bool {
    let mut values = terms.iter().map(|(_, q)| q.value());
    let first = values.next();
    values.all(|v| Some(v) == first)
}

/// `q` plus one unit in its last decimal place.
fn nudged(q: &Quantity) -> Quantity {
    let places = decimal_places(q.value()).unwrap_or(2);
    let value = q.value() + Rational::new(1.into(), num_bigint::BigInt::from(10u64.pow(places)));
    Quantity::new(value.clone(), render_rational(&value))
}

fn factor(rng: &mut ChaCha8Rng, jitter: f64) -> f64 {
    if jitter == 0.0 { 1.0 } else { 1.0 + rng.random_range(-jitter..=jitter) }
}

fn rename_map(f: &Formulation, cfg: &MutationConfig, rng: &mut ChaCha8Rng) -> Option<Vec<String>> {
    let n = f.vars.len();
    let domains: Vec<&Vec<String>> = cfg.rename_pool.values().filter(|names| names.len() >= n).collect();
    let names = domains.choose(rng)?;
    let mut picked: Vec<String> = names.choose_multiple(rng, n).cloned().collect();
    picked.shuffle(rng);
    Some(picked)
}

fn mutate_one(f: &Formulation, resolver: &VarResolver<'_>, cfg: &MutationConfig, rng: &mut ChaCha8Rng) -> Formulation {
    let mut m = f.clone();
    for o in &mut m.objectives {
        if let ObjectiveBody::Linear(terms) = &mut o.body {
            let weighted = !all_equal(terms);
            for (_, q) in terms.iter_mut() {
                *q = jitter_quantity(q, factor(rng, cfg.coefficient_jitter), false);
            }
            // equal weights would read as an unweighted sum objective
            if weighted
                && all_equal(terms)
                && let Some((_, q)) = terms.iter_mut().last()
            {
                *q = nudged(q);
            }
        }
    }
    for c in &mut m.constraints {
        if let Some(t) = &mut c.terms {
            for (_, q) in t.iter_mut() {
                *q = jitter_quantity(q, factor(rng, cfg.coefficient_jitter), false);
            }
        }
        if let Some(p) = &mut c.param {
            *p = jitter_quantity(p, factor(rng, cfg.coefficient_jitter), false);
        }
        if let Some(l) = &mut c.limit {
            *l = jitter_quantity(l, factor(rng, cfg.limit_jitter), c.kind == ConstraintType::Ratio);
        }
    }
    if cfg.rename
        && let Some(new_names) = rename_map(f, cfg, rng)
    {
        let rename = |name: &mut String| {
            if let Some(i) = resolver.resolve(name) {
                *name = new_names[i].clone();
            }
        };
        for o in &mut m.objectives {
            match &mut o.body {
                ObjectiveBody::Linear(t) => t.iter_mut().for_each(|(v, _)| rename(v)),
                ObjectiveBody::Sum(vs) => vs.iter_mut().for_each(rename),
            }
        }
        for c in &mut m.constraints {
            if let Some(t) = &mut c.terms {
                t.iter_mut().for_each(|(v, _)| rename(v));
            }
            for v in [&mut c.var, &mut c.x_var, &mut c.y_var].into_iter().flatten() {
                rename(v);
            }
        }
        m.vars.iter_mut().for_each(rename);
    }
    m
}

/// `cfg.mutations_per_record` mutants of `f`, resolving names against
/// `f.vars`.
pub fn mutate_parameters(f: &Formulation, cfg: &MutationConfig) -> Result<Vec<Formulation>, AugmentError> {
    mutate_parameters_with(f, &VarResolver::new(&f.vars), cfg)
}

/// As [`mutate_parameters`], resolving names with `resolver`, whose order
/// must match `f.vars`.
pub fn mutate_parameters_with(
    f: &Formulation,
    resolver: &VarResolver<'_>,
    cfg: &MutationConfig,
) -> Result<Vec<Formulation>, AugmentError> {
    cfg.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok((0..cfg.mutations_per_record).map(|_| mutate_one(f, resolver, cfg, &mut rng)).collect())
}

pub fn linear_constraint_count(f: &Formulation) -> usize {
    f.constraints.iter().filter(|c| c.kind == ConstraintType::Linear).count()
}

/// Eligible for promotion: single objective and more than three linear
/// constraints.
pub fn is_multi_objective_eligible(f: &Formulation) -> bool {
    f.objectives.len() == 1 && linear_constraint_count(f) > 3
}

/// Removes linear constraint `index` and appends its terms as a second
/// objective: `≤` rows are minimized, `≥` rows maximized.
pub fn constraint_to_objective(f: &Formulation, index: usize) -> Result<Formulation, AugmentError> {
    let linear = linear_constraint_count(f);
    if linear <= 3 {
        return Err(AugmentError::NotEligible(format!("needs more than 3 linear constraints, found {linear}")));
    }
    let c = f
        .constraints
        .get(index)
        .ok_or_else(|| AugmentError::NotEligible(format!("no constraint at index {index}")))?;
    if c.kind != ConstraintType::Linear {
        return Err(AugmentError::NotEligible(format!("constraint {index} is {}, not linear", c.kind)));
    }
    let terms = c.terms.clone().ok_or_else(|| AugmentError::NotEligible(format!("constraint {index} has no terms")))?;
    let direction = match c.operator {
        Operator::LessOrEqual => ObjectiveDirection::Minimize,
        Operator::GreaterOrEqual => ObjectiveDirection::Maximize,
    };
    let name = if c.direction.trim().is_empty() { format!("constraint {index}") } else { c.direction.clone() };
    let mut out = f.clone();
    out.constraints.remove(index);
    out.objectives.push(ObjectiveDecl::linear(direction, name, terms));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Corpus assembly
// ---------------------------------------------------------------------------

/// Targets per original record; the reference mix is 3553 single-objective
/// and 483 multi-objective records from 713 originals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AugmentPlan {
    pub single_per_original: f64,
    pub multi_per_original: f64,
}

impl Default for AugmentPlan {
    fn default() -> Self {
        Self { single_per_original: 3553.0 / 713.0, multi_per_original: 483.0 / 713.0 }
    }
}

impl AugmentPlan {
    /// `n` single-objective mutants per record, multi-objective share kept
    /// at the reference proportion.
    pub fn per_record(n: usize) -> Self {
        Self { single_per_original: n as f64, multi_per_original: n as f64 * 483.0 / 3553.0 }
    }

    /// Spreads `round(rate · slots)` items over `slots` positions by
    /// cumulative floor.
    fn spread(rate: f64, slots: usize) -> Vec<usize> {
        if slots == 0 {
            return Vec::new();
        }
        let total = (rate * slots as f64).round() as usize;
        (0..slots).map(|i| (i + 1) * total / slots - i * total / slots).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Original,
    Mutant,
    MultiObjective,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub source_id: String,
    pub seed: u64,
    pub service: String,
    pub kind: RecordKind,
    /// Whether the first objective over the constraints solves to
    /// optimality.
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedRecord {
    pub text: String,
    pub ir: Formulation,
    pub provenance: Provenance,
}

impl AugmentedRecord {
    pub fn to_value(&self) -> Value {
        serde_json::json!({
            "text": self.text,
            "ir": self.ir.to_value(),
            "provenance": self.provenance,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AugmentSummary {
    pub original: usize,
    pub simulated: usize,
    pub multi_objective: usize,
}

impl AugmentSummary {
    pub fn of(records: &[AugmentedRecord]) -> Self {
        let mut s = Self::default();
        for r in records {
            match r.provenance.kind {
                RecordKind::Original => s.original += 1,
                RecordKind::Mutant => s.simulated += 1,
                RecordKind::MultiObjective => s.multi_objective += 1,
            }
        }
        s
    }
}

fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn is_feasible(f: &Formulation, resolver: &VarResolver<'_>) -> bool {
    let Ok(mut lp) = canonicalize_with(f, resolver) else {
        return false;
    };
    lp.objectives.truncate(1);
    solve_ilp(&lp).is_ok_and(|s| s.status == Status::Optimal)
}

struct Pending {
    ir: Formulation,
    source_id: String,
    seed: u64,
    kind: RecordKind,
    text: Option<String>,
    feasible: bool,
}

/// Builds the augmented corpus: every record with a gold formulation is
/// kept as an original, followed by its mutants and multi-objective
/// variants, each with generated text.
pub fn augment_corpus(
    records: &[ProblemRecord],
    plan: AugmentPlan,
    cfg: &MutationConfig,
    svc: &GenServiceConfig,
) -> Result<Vec<AugmentedRecord>, AugmentError> {
    cfg.check()?;
    let golds: Vec<(&ProblemRecord, &Formulation)> =
        records.iter().filter_map(|r| r.gold.as_ref().map(|g| (r, g))).collect();
    let singles = AugmentPlan::spread(plan.single_per_original, golds.len());
    let eligible: Vec<usize> = (0..golds.len()).filter(|&i| is_multi_objective_eligible(golds[i].1)).collect();
    let mut multis = vec![0; golds.len()];
    for (slot, n) in eligible.iter().zip(AugmentPlan::spread(plan.multi_per_original * golds.len() as f64 / eligible.len().max(1) as f64, eligible.len())) {
        multis[*slot] = n;
    }

    let per_record: Vec<Vec<Pending>> = golds
        .par_iter()
        .enumerate()
        .map(|(i, (rec, gold))| {
            let seed = derive_seed(cfg.seed, i as u64);
            // Names in the gold are resolved through the record's mapping;
            // mutants carry the record's variable order as their vars.
            let mut base = (*gold).clone();
            let resolver = rec.resolver();
            if base.vars.len() != rec.variable_order.len() {
                base.vars = rec.variable_order.clone();
            }
            let mut out = vec![Pending {
                ir: (*gold).clone(),
                source_id: rec.id.clone(),
                seed,
                kind: RecordKind::Original,
                text: Some(rec.text.clone()),
                feasible: is_feasible(gold, &resolver),
            }];
            let local = MutationConfig { seed, mutations_per_record: singles[i], ..cfg.clone() };
            let mutants = mutate_parameters_with(&base, &resolver, &local).expect("config checked");
            out.extend(mutants.into_iter().map(|ir| Pending {
                feasible: is_feasible(&ir, &VarResolver::new(&ir.vars)),
                ir,
                source_id: rec.id.clone(),
                seed,
                kind: RecordKind::Mutant,
                text: None,
            }));
            if multis[i] > 0 {
                let mseed = derive_seed(seed, u64::MAX);
                let local = MutationConfig { seed: mseed, mutations_per_record: multis[i], ..cfg.clone() };
                let mut rng = ChaCha8Rng::seed_from_u64(mseed);
                for m in mutate_parameters_with(&base, &resolver, &local).expect("config checked") {
                    let linear: Vec<usize> =
                        (0..m.constraints.len()).filter(|&j| m.constraints[j].kind == ConstraintType::Linear).collect();
                    let j = *linear.choose(&mut rng).expect("eligible record has linear constraints");
                    let ir = constraint_to_objective(&m, j).expect("eligibility checked");
                    out.push(Pending {
                        feasible: is_feasible(&ir, &VarResolver::new(&ir.vars)),
                        ir,
                        source_id: rec.id.clone(),
                        seed: mseed,
                        kind: RecordKind::MultiObjective,
                        text: None,
                    });
                }
            }
            out
        })
        .collect();
    let mut pending: Vec<Pending> = per_record.into_iter().flatten().collect();

    let todo: Vec<usize> = (0..pending.len()).filter(|&i| pending[i].text.is_none()).collect();
    let irs: Vec<&Formulation> = todo.iter().map(|&i| &pending[i].ir).collect();
    let texts = backtranslate_all(&irs, svc)?;
    for (i, g) in todo.into_iter().zip(texts) {
        pending[i].text = Some(g.text);
    }
    let service = svc.service_label();
    Ok(pending
        .into_iter()
        .map(|p| AugmentedRecord {
            text: p.text.expect("filled above"),
            provenance: Provenance {
                source_id: p.source_id,
                seed: p.seed,
                service: service.clone(),
                kind: p.kind,
                feasible: p.feasible,
            },
            ir: p.ir,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{ConstraintDecl, Terms};
    use crate::quantity::{parse_quantity, ratio};

    fn q(s: &str) -> Quantity {
        parse_quantity(s).unwrap()
    }

    #[test]
    fn jitter_keeps_kind() {
        let a = jitter_quantity(&q("400"), 1.2345, false);
        assert_eq!(a.value(), &int(494));
        assert_eq!(a.source_text(), "494");
        let b = jitter_quantity(&q("0.55"), 1.1, true);
        assert_eq!(b.value(), &ratio(61, 100));
        let c = jitter_quantity(&q("55%"), 1.1, true);
        assert_eq!(c.source_text(), "61%");
        assert_eq!(jitter_quantity(&q("two"), 1.0, false).source_text(), "two");
        assert_eq!(jitter_quantity(&q("3"), 0.01, false).value(), &int(1));
        assert_eq!(jitter_quantity(&q("0.9"), 1.5, true).value(), &int(1));
    }

    #[test]
    fn weighted_objective_stays_weighted() {
        let obj = [("x", q("45")), ("y", q("46"))].into_iter().collect::<Terms>();
        let f = Formulation::new(ObjectiveDecl::linear(ObjectiveDirection::Maximize, "profit", obj), vec![], vec![
            "x".into(),
            "y".into(),
        ]);
        let cfg = MutationConfig { rename: false, mutations_per_record: 200, ..Default::default() };
        for m in mutate_parameters(&f, &cfg).unwrap() {
            let ObjectiveBody::Linear(t) = &m.objectives[0].body else { panic!("objective type changed") };
            assert!(!all_equal(t), "{t:?}");
        }
        assert_eq!(nudged(&q("64")).value(), &int(65));
        assert_eq!(nudged(&q("0.25")).value(), &ratio(26, 100));
    }

    #[test]
    fn spread_hits_totals() {
        let s = AugmentPlan::spread(3553.0 / 713.0, 713);
        assert_eq!(s.iter().sum::<usize>(), 3553);
        assert!(s.iter().all(|&n| n == 4 || n == 5));
        assert_eq!(AugmentPlan::spread(0.0, 5), vec![0; 5]);
    }

    #[test]
    fn promotion_direction() {
        let lin = |op, lim: &str| {
            ConstraintDecl::new(ConstraintType::Linear, op)
                .with_direction("available")
                .with_limit(q(lim))
                .with_terms([("x", q("1")), ("y", q("2"))].into_iter().collect::<Terms>())
        };
        let f = Formulation::new(
            ObjectiveDecl::sum(ObjectiveDirection::Maximize, "n", vec!["x".into(), "y".into()]),
            vec![lin(Operator::LessOrEqual, "1"), lin(Operator::GreaterOrEqual, "2"), lin(Operator::LessOrEqual, "3"), lin(Operator::LessOrEqual, "4")],
            vec!["x".into(), "y".into()],
        );
        let g = constraint_to_objective(&f, 1).unwrap();
        assert_eq!(g.objectives.len(), 2);
        assert_eq!(g.objectives[1].direction, ObjectiveDirection::Maximize);
        assert_eq!(g.constraints.len(), 3);
        let h = constraint_to_objective(&f, 0).unwrap();
        assert_eq!(h.objectives[1].direction, ObjectiveDirection::Minimize);
        assert!(constraint_to_objective(&g, 0).is_err());
    }

    #[test]
    fn rejects_bad_jitter() {
        let cfg = MutationConfig { coefficient_jitter: 1.0, ..MutationConfig::default() };
        assert!(cfg.check().is_err());
    }
}
