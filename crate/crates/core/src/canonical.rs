//! Lowering of declarations to rows `W·x (≤|≥) z` over a fixed variable order.

use serde::Serialize;
use thiserror::Error;

use crate::ir::{
    ConstraintDecl, ConstraintType, Formulation, ObjectiveBody, ObjectiveDecl, ObjectiveDirection,
    Operator, ProblemRecord, VarResolver,
};
use crate::quantity::{Rational, int, rational_to_f64, render_rational};
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("unresolved variable {0:?}")]
    UnresolvedVariable(String),
    #[error("degenerate row: all coefficients are zero")]
    DegenerateRow,
    #[error("{kind} constraint is missing {field}")]
    MissingField { kind: ConstraintType, field: &'static str },
    #[error("constraint {index}: {source}")]
    AtConstraint { index: usize, source: Box<CanonError> },
    #[error("objective {index}: {source}")]
    AtObjective { index: usize, source: Box<CanonError> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

impl Sense {
    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sense::Le => Sense::Ge,
            Sense::Ge => Sense::Le,
        }
    }
}

impl From<Operator> for Sense {
    fn from(op: Operator) -> Self {
        match op {
            Operator::LessOrEqual => Sense::Le,
            Operator::GreaterOrEqual => Sense::Ge,
        }
    }
}

fn rationals_as_strings<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(render_rational))
}

fn rational_as_string<S: serde::Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&render_rational(v))
}

/// One constraint in matrix form. `comment` carries the IR's direction text
/// and does not take part in row identity (see [`CanonicalRow::same_row`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalRow {
    #[serde(serialize_with = "rationals_as_strings")]
    pub coefficients: Vec<Rational>,
    pub sense: Sense,
    #[serde(serialize_with = "rational_as_string")]
    pub rhs: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
}

impl CanonicalRow {
    pub fn new(coefficients: Vec<Rational>, sense: Sense, rhs: Rational) -> Self {
        Self { coefficients, sense, rhs, comment: None }
    }

    /// Equality of coefficients, sense and right-hand side.
    pub fn same_row(&self, other: &Self) -> bool {
        self.sense == other.sense && self.rhs == other.rhs && self.coefficients == other.coefficients
    }

    pub fn is_degenerate(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    pub fn lhs_at(&self, point: &[Rational]) -> Rational {
        self.coefficients.iter().zip(point).map(|(a, x)| a * x).sum()
    }

    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        let lhs = self.lhs_at(point);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
        }
    }

    pub fn satisfied_by_f64(&self, point: &[f64], tol: f64) -> bool {
        let lhs: f64 = self.coefficients.iter().zip(point).map(|(a, x)| rational_to_f64(a) * x).sum();
        let rhs = rational_to_f64(&self.rhs);
        let slack = tol * rhs.abs().max(1.0);
        match self.sense {
            Sense::Le => lhs <= rhs + slack,
            Sense::Ge => lhs >= rhs - slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectiveRow {
    #[serde(serialize_with = "rationals_as_strings")]
    pub coefficients: Vec<Rational>,
    pub direction: ObjectiveDirection,
    pub name: String,
}

impl ObjectiveRow {
    pub fn same_objective(&self, other: &Self) -> bool {
        self.direction == other.direction && self.coefficients == other.coefficients
    }

    pub fn value_at(&self, point: &[f64]) -> f64 {
        self.coefficients.iter().zip(point).map(|(c, x)| rational_to_f64(c) * x).sum()
    }
}

/// A whole problem in matrix form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalLP {
    pub objectives: Vec<ObjectiveRow>,
    pub rows: Vec<CanonicalRow>,
    pub variable_order: Vec<String>,
    pub nonneg: Vec<bool>,
    pub integral: Vec<bool>,
}

impl CanonicalLP {
    pub fn n_vars(&self) -> usize {
        self.variable_order.len()
    }

    /// Same problem with every variable continuous.
    pub fn relaxed(&self) -> Self {
        let mut lp = self.clone();
        lp.integral.iter_mut().for_each(|b| *b = false);
        lp
    }

    pub fn with_integrality(mut self, integral: bool) -> Self {
        self.integral.iter_mut().for_each(|b| *b = integral);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("canonical LP serializes")
    }
}

fn resolve(resolver: &VarResolver<'_>, name: &str) -> Result<usize, CanonError> {
    resolver.resolve(name).ok_or_else(|| CanonError::UnresolvedVariable(name.to_string()))
}

fn require<T>(v: Option<T>, kind: ConstraintType, field: &'static str) -> Result<T, CanonError> {
    v.ok_or(CanonError::MissingField { kind, field })
}

/// Lowers one constraint declaration.
///
/// | type | lowered row |
/// |---|---|
/// | sum | `Σ xᵢ op c` |
/// | upperbound / lowerbound | `x ≤ c` / `x ≥ c` |
/// | linear | `Σ aᵢ xᵢ op c` |
/// | ratio | `(eₓ − c·1)·x op 0` |
/// | xby | `x − a·y op 0` |
/// | xy | `x − y op 0` |
pub fn canonical_row(c: &ConstraintDecl, resolver: &VarResolver<'_>) -> Result<CanonicalRow, CanonError> {
    let n = resolver.order().len();
    let mut w = vec![Rational::zero(); n];
    let mut sense = Sense::from(c.operator);
    let kind = c.kind;
    let rhs = match kind {
        ConstraintType::Sum => {
            w.iter_mut().for_each(|a| *a = int(1));
            require(c.limit.as_ref(), kind, "limit")?.value().clone()
        }
        ConstraintType::UpperBound | ConstraintType::LowerBound => {
            let i = resolve(resolver, require(c.var.as_deref(), kind, "var")?)?;
            w[i] = int(1);
            sense = if kind == ConstraintType::LowerBound { Sense::Ge } else { Sense::Le };
            require(c.limit.as_ref(), kind, "limit")?.value().clone()
        }
        ConstraintType::Linear => {
            let terms = require(c.terms.as_ref(), kind, "terms")?;
            for (v, q) in terms.iter() {
                let i = resolve(resolver, v)?;
                w[i] += q.value();
            }
            require(c.limit.as_ref(), kind, "limit")?.value().clone()
        }
        ConstraintType::Ratio => {
            let i = resolve(resolver, require(c.var.as_deref(), kind, "var")?)?;
            let share = require(c.limit.as_ref(), kind, "limit")?.value();
            w.iter_mut().for_each(|a| *a = -share.clone());
            w[i] += int(1);
            Rational::zero()
        }
        ConstraintType::Xby => {
            let x = resolve(resolver, require(c.x_var.as_deref(), kind, "x_var")?)?;
            let y = resolve(resolver, require(c.y_var.as_deref(), kind, "y_var")?)?;
            let a = require(c.param.as_ref(), kind, "param")?.value();
            w[x] += int(1);
            w[y] -= a;
            Rational::zero()
        }
        ConstraintType::Xy => {
            let x = resolve(resolver, require(c.x_var.as_deref(), kind, "x_var")?)?;
            let y = resolve(resolver, require(c.y_var.as_deref(), kind, "y_var")?)?;
            w[x] += int(1);
            w[y] -= int(1);
            Rational::zero()
        }
    };
    let row = CanonicalRow {
        coefficients: w,
        sense,
        rhs,
        comment: (!c.direction.is_empty()).then(|| c.direction.clone()),
    };
    if row.is_degenerate() {
        return Err(CanonError::DegenerateRow);
    }
    Ok(row)
}

pub fn canonical_objective(o: &ObjectiveDecl, resolver: &VarResolver<'_>) -> Result<ObjectiveRow, CanonError> {
    let mut w = vec![Rational::zero(); resolver.order().len()];
    match &o.body {
        ObjectiveBody::Linear(terms) => {
            for (v, q) in terms.iter() {
                w[resolve(resolver, v)?] += q.value();
            }
        }
        ObjectiveBody::Sum(vars) => {
            for v in vars {
                w[resolve(resolver, v)?] = int(1);
            }
        }
    }
    Ok(ObjectiveRow { coefficients: w, direction: o.direction, name: o.name.clone() })
}

/// Lowers a whole formulation over the record's variable order.
pub fn canonicalize(f: &Formulation, rec: &ProblemRecord) -> Result<CanonicalLP, CanonError> {
    canonicalize_with(f, &rec.resolver())
}

/// Lowers a whole formulation with an explicit resolver. Variables default
/// to nonnegative integers.
pub fn canonicalize_with(f: &Formulation, resolver: &VarResolver<'_>) -> Result<CanonicalLP, CanonError> {
    let objectives = f
        .objectives
        .iter()
        .enumerate()
        .map(|(index, o)| {
            canonical_objective(o, resolver)
                .map_err(|e| CanonError::AtObjective { index, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows = f
        .constraints
        .iter()
        .enumerate()
        .map(|(index, c)| {
            canonical_row(c, resolver).map_err(|e| CanonError::AtConstraint { index, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = resolver.order().len();
    Ok(CanonicalLP {
        objectives,
        rows,
        variable_order: resolver.order().to_vec(),
        nonneg: vec![true; n],
        integral: vec![true; n],
    })
}

/// Rewrites `≥` rows as `≤` rows by negation. Idempotent.
pub fn normalize_sense(row: &CanonicalRow) -> CanonicalRow {
    match row.sense {
        Sense::Le => row.clone(),
        Sense::Ge => CanonicalRow {
            coefficients: row.coefficients.iter().map(|a| -a).collect(),
            sense: Sense::Le,
            rhs: -row.rhs.clone(),
            comment: row.comment.clone(),
        },
    }
}

/// Divides a row by its largest absolute coefficient. Positive scaling keeps
/// the sense and the solution set.
pub fn scale_normalize(row: &CanonicalRow) -> CanonicalRow {
    let max = row.coefficients.iter().map(|a| a.abs()).max().unwrap_or_else(Rational::zero);
    if max.is_zero() {
        return row.clone();
    }
    CanonicalRow {
        coefficients: row.coefficients.iter().map(|a| a / &max).collect(),
        sense: row.sense,
        rhs: &row.rhs / &max,
        comment: row.comment.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::Terms;
    use crate::quantity::{Quantity, parse_quantity, ratio};

    fn q(s: &str) -> Quantity {
        parse_quantity(s).unwrap()
    }

    fn order(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn xby_lowering() {
        let ord = order(&["AC seats", "non-AC seats"]);
        let c = ConstraintDecl::new(ConstraintType::Xby, Operator::GreaterOrEqual)
            .with_xy("non-AC seats", "AC seats")
            .with_param(q("2"));
        let row = canonical_row(&c, &VarResolver::new(&ord)).unwrap();
        assert_eq!(row.coefficients, vec![int(-2), int(1)]);
        assert_eq!(row.sense, Sense::Ge);
        assert_eq!(row.rhs, int(0));
        // (AC, nonAC) = (1, 2) satisfies "twice as many", (1, 1) does not
        assert!(row.satisfied_by(&[int(1), int(2)]));
        assert!(!row.satisfied_by(&[int(1), int(1)]));
    }

    #[test]
    fn ratio_lowering() {
        let ord = order(&["rafts", "kayaks"]);
        let c = ConstraintDecl::new(ConstraintType::Ratio, Operator::GreaterOrEqual)
            .with_var("rafts")
            .with_limit(q("0.55"));
        let row = canonical_row(&c, &VarResolver::new(&ord)).unwrap();
        assert_eq!(row.coefficients, vec![ratio(9, 20), ratio(-11, 20)]);
        assert_eq!(row.sense, Sense::Ge);
        assert_eq!(row.rhs, int(0));
        // 0.55·(r+k) ≤ r
        for (r, k) in [(11, 9), (1, 9)] {
            let direct = ratio(11, 20) * int(r + k) <= int(r);
            assert_eq!(row.satisfied_by(&[int(r), int(k)]), direct);
        }
    }

    #[test]
    fn sum_lowering() {
        let ord = order(&["a", "b"]);
        let c = ConstraintDecl::new(ConstraintType::Sum, Operator::LessOrEqual).with_limit(q("500"));
        let row = canonical_row(&c, &VarResolver::new(&ord)).unwrap();
        assert_eq!(row.coefficients, vec![int(1), int(1)]);
        assert_eq!((row.sense, row.rhs), (Sense::Le, int(500)));
    }

    #[test]
    fn lowerbound_forces_ge() {
        let ord = order(&["a"]);
        let c = ConstraintDecl::new(ConstraintType::LowerBound, Operator::LessOrEqual)
            .with_var("a")
            .with_limit(q("100"));
        assert_eq!(canonical_row(&c, &VarResolver::new(&ord)).unwrap().sense, Sense::Ge);
    }

    #[test]
    fn objectives() {
        let ord = order(&["rafts", "kayaks"]);
        let r = VarResolver::new(&ord);
        let t: Terms = [("rafts", q("45")), ("kayaks", q("55"))].into_iter().collect();
        let o = ObjectiveDecl::linear(ObjectiveDirection::Maximize, "profit", t);
        assert_eq!(canonical_objective(&o, &r).unwrap().coefficients, vec![int(45), int(55)]);
        let o = ObjectiveDecl::sum(ObjectiveDirection::Minimize, "n", ord.clone());
        assert_eq!(canonical_objective(&o, &r).unwrap().coefficients, vec![int(1), int(1)]);
        let t: Terms = [("rafts", q("3"))].into_iter().collect();
        let o = ObjectiveDecl::linear(ObjectiveDirection::Maximize, "p", t);
        assert_eq!(canonical_objective(&o, &r).unwrap().coefficients, vec![int(3), int(0)]);
    }

    #[test]
    fn errors() {
        let ord = order(&["a", "b"]);
        let r = VarResolver::new(&ord);
        let c = ConstraintDecl::new(ConstraintType::UpperBound, Operator::LessOrEqual)
            .with_var("zzz")
            .with_limit(q("1"));
        assert_eq!(canonical_row(&c, &r), Err(CanonError::UnresolvedVariable("zzz".into())));
        let c = ConstraintDecl::new(ConstraintType::Xy, Operator::LessOrEqual).with_xy("a", "a");
        assert_eq!(canonical_row(&c, &r), Err(CanonError::DegenerateRow));
        let c = ConstraintDecl::new(ConstraintType::Linear, Operator::LessOrEqual).with_limit(q("1"));
        assert!(matches!(canonical_row(&c, &r), Err(CanonError::MissingField { field: "terms", .. })));
    }

    #[test]
    fn normalize_examples() {
        let r = CanonicalRow::new(vec![int(-2), int(1)], Sense::Ge, int(0));
        let n = normalize_sense(&r);
        assert_eq!(n.coefficients, vec![int(2), int(-1)]);
        assert_eq!((n.sense, n.rhs.clone()), (Sense::Le, int(0)));
        let le = CanonicalRow::new(vec![int(1), int(1)], Sense::Le, int(500));
        assert_eq!(normalize_sense(&le), le);
    }
}
