//! The intermediate representation of an LP word problem.
//!
//! A [`ProblemRecord`] carries the problem text, its tagged entity spans, the
//! variable order and entity mapping, and optionally a gold [`Formulation`].
//! The JSON layout follows the NL4OPT dataset: `obj_declaration`,
//! `const_declarations` and `vars`. Unknown keys are kept and written back.

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::quantity::{Quantity, parse_quantity};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("schema violation at {path}: {reason}")]
    SchemaViolation { path: String, reason: String },
}

fn violation(path: impl Into<String>, reason: impl Into<String>) -> IrError {
    IrError::SchemaViolation { path: path.into(), reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntityLabel {
    ConstDir,
    Limit,
    Param,
    Var,
    ObjDir,
    ObjName,
}

/// A tagged span of the problem text. Offsets count characters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    pub label: EntityLabel,
    #[serde(default)]
    pub surface: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveDirection {
    Maximize,
    Minimize,
}

impl ObjectiveDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Maximize => "maximize",
            Self::Minimize => "minimize",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "maximize" | "maximise" | "max" | "maximum" => Some(Self::Maximize),
            "minimize" | "minimise" | "min" | "minimum" => Some(Self::Minimize),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    LessOrEqual,
    GreaterOrEqual,
}

impl Operator {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::LessOrEqual => "LESS_OR_EQUAL",
            Self::GreaterOrEqual => "GREATER_OR_EQUAL",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "LESS_OR_EQUAL" | "LESS_THAN_EQUAL_TO" | "<=" | "=<" => Some(Self::LessOrEqual),
            "GREATER_OR_EQUAL" | "GREATER_THAN_EQUAL_TO" | ">=" | "=>" => {
                Some(Self::GreaterOrEqual)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintType {
    Sum,
    UpperBound,
    LowerBound,
    Linear,
    Ratio,
    Xby,
    Xy,
}

impl ConstraintType {
    pub const ALL: [ConstraintType; 7] = [
        Self::Sum,
        Self::UpperBound,
        Self::LowerBound,
        Self::Linear,
        Self::Ratio,
        Self::Xby,
        Self::Xy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sum => "sum",
            Self::UpperBound => "upperbound",
            Self::LowerBound => "lowerbound",
            Self::Linear => "linear",
            Self::Ratio => "ratio",
            Self::Xby => "xby",
            Self::Xy => "xy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s.trim())
    }
}

impl fmt::Display for ConstraintType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered `variable -> coefficient` map, as written in the source.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Terms(Vec<(String, Quantity)>);

impl Terms {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Inserts or replaces the coefficient of `var`.
    pub fn insert(&mut self, var: impl Into<String>, q: Quantity) {
        let var = var.into();
        match self.0.iter_mut().find(|(v, _)| *v == var) {
            Some(slot) => slot.1 = q,
            None => self.0.push((var, q)),
        }
    }

    pub fn get(&self, var: &str) -> Option<&Quantity> {
        self.0.iter().find(|(v, _)| v == var).map(|(_, q)| q)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Quantity)> {
        self.0.iter().map(|(v, q)| (v, q))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&mut String, &mut Quantity)> {
        self.0.iter_mut().map(|(v, q)| (v, q))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, Quantity)> for Terms {
    fn from_iter<I: IntoIterator<Item = (S, Quantity)>>(iter: I) -> Self {
        let mut t = Terms::new();
        for (v, q) in iter {
            t.insert(v, q);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectiveBody {
    /// Weighted sum of the listed terms.
    Linear(Terms),
    /// Unit-weighted sum of the listed variables (`objvar` in dataset files).
    Sum(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectiveDecl {
    pub direction: ObjectiveDirection,
    pub name: String,
    pub body: ObjectiveBody,
    pub extra: Map<String, Value>,
}

impl ObjectiveDecl {
    pub fn linear(direction: ObjectiveDirection, name: impl Into<String>, terms: Terms) -> Self {
        Self { direction, name: name.into(), body: ObjectiveBody::Linear(terms), extra: Map::new() }
    }

    pub fn sum(direction: ObjectiveDirection, name: impl Into<String>, vars: Vec<String>) -> Self {
        Self { direction, name: name.into(), body: ObjectiveBody::Sum(vars), extra: Map::new() }
    }

    pub fn type_tag(&self) -> &'static str {
        match self.body {
            ObjectiveBody::Linear(_) => "objective",
            ObjectiveBody::Sum(_) => "objvar",
        }
    }

    pub fn referenced_vars(&self) -> Vec<&str> {
        match &self.body {
            ObjectiveBody::Linear(t) => t.iter().map(|(v, _)| v.as_str()).collect(),
            ObjectiveBody::Sum(vs) => vs.iter().map(String::as_str).collect(),
        }
    }
}

/// One constraint declaration. Which optional fields are required depends on
/// `kind`; see [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintDecl {
    pub kind: ConstraintType,
    pub operator: Operator,
    pub direction: String,
    pub limit: Option<Quantity>,
    pub terms: Option<Terms>,
    pub var: Option<String>,
    pub x_var: Option<String>,
    pub y_var: Option<String>,
    pub param: Option<Quantity>,
    pub extra: Map<String, Value>,
}

impl ConstraintDecl {
    pub fn new(kind: ConstraintType, operator: Operator) -> Self {
        Self {
            kind,
            operator,
            direction: String::new(),
            limit: None,
            terms: None,
            var: None,
            x_var: None,
            y_var: None,
            param: None,
            extra: Map::new(),
        }
    }

    pub fn with_direction(mut self, d: impl Into<String>) -> Self {
        self.direction = d.into();
        self
    }

    pub fn with_limit(mut self, q: Quantity) -> Self {
        self.limit = Some(q);
        self
    }

    pub fn with_terms(mut self, t: Terms) -> Self {
        self.terms = Some(t);
        self
    }

    pub fn with_var(mut self, v: impl Into<String>) -> Self {
        self.var = Some(v.into());
        self
    }

    pub fn with_xy(mut self, x: impl Into<String>, y: impl Into<String>) -> Self {
        self.x_var = Some(x.into());
        self.y_var = Some(y.into());
        self
    }

    pub fn with_param(mut self, q: Quantity) -> Self {
        self.param = Some(q);
        self
    }

    pub fn referenced_vars(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        if let Some(t) = &self.terms {
            out.extend(t.iter().map(|(v, _)| v.as_str()));
        }
        out.extend(self.var.as_deref());
        out.extend(self.x_var.as_deref());
        out.extend(self.y_var.as_deref());
        out
    }

    /// Every number carried by the declaration: limit, parameter and term
    /// coefficients.
    pub fn quantities(&self) -> Vec<&Quantity> {
        let mut out: Vec<&Quantity> = self.limit.iter().chain(self.param.iter()).collect();
        if let Some(t) = &self.terms {
            out.extend(t.iter().map(|(_, q)| q));
        }
        out
    }
}

/// One problem's declared objectives, constraints and variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formulation {
    pub objectives: Vec<ObjectiveDecl>,
    pub constraints: Vec<ConstraintDecl>,
    pub vars: Vec<String>,
    pub extra: Map<String, Value>,
}

impl Formulation {
    pub fn new(objective: ObjectiveDecl, constraints: Vec<ConstraintDecl>, vars: Vec<String>) -> Self {
        Self { objectives: vec![objective], constraints, vars, extra: Map::new() }
    }

    /// Number of declarations (objectives plus constraints).
    pub fn declaration_count(&self) -> usize {
        self.objectives.len() + self.constraints.len()
    }

    pub fn from_json(text: &str) -> Result<Self, IrError> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| IrError::MalformedJson(e.to_string()))?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self, IrError> {
        let obj = v.as_object().ok_or_else(|| violation("$", "expected an object"))?;
        let mut extra = Map::new();
        for (k, val) in obj {
            if !FORMULATION_KEYS.contains(&k.as_str()) {
                extra.insert(k.clone(), val.clone());
            }
        }
        let mut f = formulation_from_map(obj, "$")?;
        f.extra = extra;
        Ok(f)
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        write_formulation(self, &mut m);
        for (k, v) in &self.extra {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        serialize_ir(self)
    }
}

const FORMULATION_KEYS: [&str; 4] = ["obj_declaration", "obj_declarations", "const_declarations", "vars"];

/// Serializes a formulation as compact JSON with keys in the order
/// objectives, constraints, vars, then any preserved extra keys.
pub fn serialize_ir(f: &Formulation) -> String {
    f.to_value().to_string()
}

fn write_formulation(f: &Formulation, m: &mut Map<String, Value>) {
    if f.objectives.len() == 1 {
        m.insert("obj_declaration".into(), objective_to_value(&f.objectives[0]));
    } else {
        m.insert(
            "obj_declarations".into(),
            Value::Array(f.objectives.iter().map(objective_to_value).collect()),
        );
    }
    m.insert(
        "const_declarations".into(),
        Value::Array(f.constraints.iter().map(constraint_to_value).collect()),
    );
    m.insert("vars".into(), Value::Array(f.vars.iter().cloned().map(Value::String).collect()));
}

fn formulation_from_map(obj: &Map<String, Value>, path: &str) -> Result<Formulation, IrError> {
    let objectives = match (obj.get("obj_declaration"), obj.get("obj_declarations")) {
        (Some(o), None) => vec![objective_from_value(o, &format!("{path}.obj_declaration"))?],
        (None, Some(Value::Array(items))) => items
            .iter()
            .enumerate()
            .map(|(i, o)| objective_from_value(o, &format!("{path}.obj_declarations[{i}]")))
            .collect::<Result<_, _>>()?,
        (None, Some(_)) => return Err(violation(format!("{path}.obj_declarations"), "expected an array")),
        (Some(_), Some(_)) => {
            return Err(violation(path, "both obj_declaration and obj_declarations present"));
        }
        (None, None) => return Err(violation(path, "missing obj_declaration")),
    };
    if objectives.is_empty() {
        return Err(violation(format!("{path}.obj_declarations"), "at least one objective required"));
    }
    let constraints = match obj.get("const_declarations") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, c)| constraint_from_value(c, &format!("{path}.const_declarations[{i}]")))
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(violation(format!("{path}.const_declarations"), "expected an array")),
    };
    let vars = string_list(
        obj.get("vars").ok_or_else(|| violation(path, "missing vars"))?,
        &format!("{path}.vars"),
    )?;
    Ok(Formulation { objectives, constraints, vars, extra: Map::new() })
}

fn string_list(v: &Value, path: &str) -> Result<Vec<String>, IrError> {
    let arr = v.as_array().ok_or_else(|| violation(path, "expected an array of strings"))?;
    arr.iter()
        .enumerate()
        .map(|(i, s)| {
            s.as_str().map(str::to_string).ok_or_else(|| violation(format!("{path}[{i}]"), "expected a string"))
        })
        .collect()
}

fn quantity_from_value(v: &Value, path: &str) -> Result<Quantity, IrError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(violation(path, "expected a quantity string or number")),
    };
    parse_quantity(&text).map_err(|e| violation(path, e.to_string()))
}

fn quantity_to_value(q: &Quantity) -> Value {
    Value::String(q.source_text().to_string())
}

fn terms_from_value(v: &Value, path: &str) -> Result<Terms, IrError> {
    let obj = v.as_object().ok_or_else(|| violation(path, "expected a terms object"))?;
    obj.iter()
        .map(|(k, q)| Ok((k.clone(), quantity_from_value(q, &format!("{path}.{k}"))?)))
        .collect()
}

fn terms_to_value(t: &Terms) -> Value {
    Value::Object(t.iter().map(|(k, q)| (k.clone(), quantity_to_value(q))).collect())
}

const OBJECTIVE_KEYS: [&str; 5] = ["type", "direction", "name", "terms", "vars"];

fn objective_from_value(v: &Value, path: &str) -> Result<ObjectiveDecl, IrError> {
    let obj = v.as_object().ok_or_else(|| violation(path, "expected an object"))?;
    let tag = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| violation(format!("{path}.type"), "missing objective type"))?;
    let direction = obj
        .get("direction")
        .and_then(Value::as_str)
        .and_then(ObjectiveDirection::parse)
        .ok_or_else(|| violation(format!("{path}.direction"), "expected maximize or minimize"))?;
    let name = match obj.get("name") {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(violation(format!("{path}.name"), "expected a string")),
    };
    let body = match tag {
        "objective" | "linear" => {
            if obj.contains_key("vars") {
                return Err(violation(path, "linear objective must not list vars"));
            }
            let terms = obj
                .get("terms")
                .ok_or_else(|| violation(format!("{path}.terms"), "linear objective requires terms"))?;
            ObjectiveBody::Linear(terms_from_value(terms, &format!("{path}.terms"))?)
        }
        "objvar" | "sum" => {
            if obj.contains_key("terms") {
                return Err(violation(path, "sum objective must not have terms"));
            }
            let vars = obj
                .get("vars")
                .ok_or_else(|| violation(format!("{path}.vars"), "sum objective requires vars"))?;
            ObjectiveBody::Sum(string_list(vars, &format!("{path}.vars"))?)
        }
        other => return Err(violation(format!("{path}.type"), format!("unknown objective type {other:?}"))),
    };
    let extra = obj
        .iter()
        .filter(|(k, _)| !OBJECTIVE_KEYS.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Ok(ObjectiveDecl { direction, name, body, extra })
}

fn objective_to_value(o: &ObjectiveDecl) -> Value {
    let mut m = Map::new();
    m.insert("type".into(), o.type_tag().into());
    m.insert("direction".into(), o.direction.as_str().into());
    m.insert("name".into(), o.name.clone().into());
    match &o.body {
        ObjectiveBody::Linear(t) => m.insert("terms".into(), terms_to_value(t)),
        ObjectiveBody::Sum(vs) => {
            m.insert("vars".into(), Value::Array(vs.iter().cloned().map(Value::String).collect()))
        }
    };
    for (k, v) in &o.extra {
        m.insert(k.clone(), v.clone());
    }
    Value::Object(m)
}

const CONSTRAINT_KEYS: [&str; 9] =
    ["type", "direction", "limit", "var", "x_var", "param", "y_var", "terms", "operator"];

fn constraint_from_value(v: &Value, path: &str) -> Result<ConstraintDecl, IrError> {
    let obj = v.as_object().ok_or_else(|| violation(path, "expected an object"))?;
    let tag = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| violation(format!("{path}.type"), "missing constraint type"))?;
    let kind = ConstraintType::parse(tag)
        .ok_or_else(|| violation(format!("{path}.type"), format!("unknown constraint type {tag:?}")))?;
    let operator = obj
        .get("operator")
        .and_then(Value::as_str)
        .and_then(Operator::parse)
        .ok_or_else(|| {
            violation(format!("{path}.operator"), "expected LESS_OR_EQUAL or GREATER_OR_EQUAL")
        })?;
    let direction = match obj.get("direction") {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(violation(format!("{path}.direction"), "expected a string")),
    };
    let opt_q = |key: &str| -> Result<Option<Quantity>, IrError> {
        obj.get(key)
            .filter(|v| !v.is_null())
            .map(|v| quantity_from_value(v, &format!("{path}.{key}")))
            .transpose()
    };
    let opt_s = |key: &str| -> Result<Option<String>, IrError> {
        match obj.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(violation(format!("{path}.{key}"), "expected a string")),
        }
    };
    let terms = obj
        .get("terms")
        .filter(|v| !v.is_null())
        .map(|t| terms_from_value(t, &format!("{path}.terms")))
        .transpose()?;
    let extra = obj
        .iter()
        .filter(|(k, _)| !CONSTRAINT_KEYS.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Ok(ConstraintDecl {
        kind,
        operator,
        direction,
        limit: opt_q("limit")?,
        terms,
        var: opt_s("var")?,
        x_var: opt_s("x_var")?,
        y_var: opt_s("y_var")?,
        param: opt_q("param")?,
        extra,
    })
}

fn constraint_to_value(c: &ConstraintDecl) -> Value {
    let mut m = Map::new();
    m.insert("type".into(), c.kind.as_str().into());
    m.insert("direction".into(), c.direction.clone().into());
    if let Some(q) = &c.limit {
        m.insert("limit".into(), quantity_to_value(q));
    }
    if let Some(v) = &c.var {
        m.insert("var".into(), v.clone().into());
    }
    if let Some(v) = &c.x_var {
        m.insert("x_var".into(), v.clone().into());
    }
    if let Some(q) = &c.param {
        m.insert("param".into(), quantity_to_value(q));
    }
    if let Some(v) = &c.y_var {
        m.insert("y_var".into(), v.clone().into());
    }
    if let Some(t) = &c.terms {
        m.insert("terms".into(), terms_to_value(t));
    }
    m.insert("operator".into(), c.operator.as_str().into());
    for (k, v) in &c.extra {
        m.insert(k.clone(), v.clone());
    }
    Value::Object(m)
}

pub(crate) fn objective_value(o: &ObjectiveDecl) -> Value {
    objective_to_value(o)
}

pub(crate) fn constraint_value(c: &ConstraintDecl) -> Value {
    constraint_to_value(c)
}

pub(crate) fn objective_from_json(v: &Value) -> Result<ObjectiveDecl, IrError> {
    objective_from_value(v, "$")
}

pub(crate) fn constraint_from_json(v: &Value) -> Result<ConstraintDecl, IrError> {
    constraint_from_value(v, "$")
}

// ---------------------------------------------------------------------------
// Variable resolution
// ---------------------------------------------------------------------------

pub(crate) fn normalize_name(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

pub(crate) fn singular(s: &str) -> String {
    if let Some(stem) = s.strip_suffix("ies") {
        format!("{stem}y")
    } else if s.ends_with("ss") {
        s.to_string()
    } else if let Some(stem) = s.strip_suffix('s') {
        stem.to_string()
    } else {
        s.to_string()
    }
}

/// Resolves variable mentions to positions in a variable order.
///
/// Lookup goes through the entity mapping first (exact, then normalized),
/// then compares names case-insensitively, then tolerates singular/plural
/// differences.
#[derive(Debug, Clone, Copy)]
pub struct VarResolver<'a> {
    order: &'a [String],
    mapping: Option<&'a IndexMap<String, String>>,
}

impl<'a> VarResolver<'a> {
    pub fn new(order: &'a [String]) -> Self {
        Self { order, mapping: None }
    }

    pub fn with_mapping(order: &'a [String], mapping: &'a IndexMap<String, String>) -> Self {
        Self { order, mapping: Some(mapping) }
    }

    pub fn order(&self) -> &'a [String] {
        self.order
    }

    pub fn resolve(&self, name: &str) -> Option<usize> {
        if let Some(mapping) = self.mapping {
            let target = mapping.get(name).or_else(|| {
                let n = normalize_name(name);
                mapping.iter().find(|(k, _)| normalize_name(k) == n).map(|(_, v)| v)
            });
            if let Some(i) = target.and_then(|t| self.match_order(t)) {
                return Some(i);
            }
        }
        self.match_order(name)
    }

    fn match_order(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.order.iter().position(|v| v == name) {
            return Some(i);
        }
        let n = normalize_name(name);
        if let Some(i) = self.order.iter().position(|v| normalize_name(v) == n) {
            return Some(i);
        }
        let s = singular(&n);
        self.order.iter().position(|v| singular(&normalize_name(v)) == s)
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { path: path.into(), message: message.into() });
    }
}

/// Checks a formulation on its own, resolving names against `f.vars`.
pub fn validate(f: &Formulation) -> ValidationReport {
    validate_with(f, &VarResolver::new(&f.vars))
}

/// Checks a formulation, resolving variable mentions with `resolver`.
pub fn validate_with(f: &Formulation, resolver: &VarResolver<'_>) -> ValidationReport {
    let mut report = ValidationReport::default();
    if f.objectives.is_empty() {
        report.push("objectives", "at least one objective required");
    }
    for (i, o) in f.objectives.iter().enumerate() {
        let path = format!("objectives[{i}]");
        match &o.body {
            ObjectiveBody::Linear(t) if t.is_empty() => {
                report.push(&path, "linear objective must have at least one term")
            }
            ObjectiveBody::Sum(vs) if vs.is_empty() => {
                report.push(&path, "sum objective must list at least one variable")
            }
            _ => {}
        }
        for v in o.referenced_vars() {
            if resolver.resolve(v).is_none() {
                report.push(&path, format!("unresolved variable {v:?}"));
            }
        }
    }
    for (i, c) in f.constraints.iter().enumerate() {
        let path = format!("constraints[{i}]");
        check_constraint(c, &path, &mut report);
        for v in c.referenced_vars() {
            if resolver.resolve(v).is_none() {
                report.push(&path, format!("unresolved variable {v:?}"));
            }
        }
    }
    report
}

fn check_constraint(c: &ConstraintDecl, path: &str, report: &mut ValidationReport) {
    let kind = c.kind;
    let mut require = |present: bool, field: &str| {
        if !present {
            report.push(path, format!("{kind} requires {field}"));
        }
    };
    match kind {
        ConstraintType::Sum => require(c.limit.is_some(), "limit"),
        ConstraintType::UpperBound | ConstraintType::LowerBound => {
            require(c.var.is_some(), "var");
            require(c.limit.is_some(), "limit");
        }
        ConstraintType::Linear => {
            require(c.terms.as_ref().is_some_and(|t| !t.is_empty()), "terms");
            require(c.limit.is_some(), "limit");
        }
        ConstraintType::Ratio => {
            require(c.var.is_some(), "var");
            require(c.limit.is_some(), "limit");
        }
        ConstraintType::Xby => {
            require(c.x_var.is_some(), "x_var");
            require(c.y_var.is_some(), "y_var");
            require(c.param.is_some(), "param");
        }
        ConstraintType::Xy => {
            require(c.x_var.is_some(), "x_var");
            require(c.y_var.is_some(), "y_var");
        }
    }
    if kind == ConstraintType::Sum && c.terms.is_some() {
        report.push(path, "sum must not have terms");
    }
    if kind == ConstraintType::Ratio
        && let Some(limit) = &c.limit
    {
        let v = limit.value();
        if *v < crate::quantity::int(0) || *v > crate::quantity::int(1) {
            report.push(path, format!("ratio limit {limit} outside [0, 1]"));
        }
    }
    match (kind, c.operator) {
        (ConstraintType::LowerBound, Operator::LessOrEqual) => {
            report.push(path, "lowerbound operator must be GREATER_OR_EQUAL")
        }
        (ConstraintType::UpperBound, Operator::GreaterOrEqual) => {
            report.push(path, "upperbound operator must be LESS_OR_EQUAL")
        }
        _ => {}
    }
}

// ---------------------------------------------------------------------------
// Problem records
// ---------------------------------------------------------------------------

/// A word problem with its tagging, variable order and optional gold IR.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemRecord {
    pub id: String,
    pub text: String,
    pub spans: Vec<EntitySpan>,
    pub variable_order: Vec<String>,
    pub entity_mapping: IndexMap<String, String>,
    pub gold: Option<Formulation>,
    pub extra: Map<String, Value>,
}

const RECORD_KEYS: [&str; 7] =
    ["id", "text", "spans", "variable_order", "entity_mapping", "gold", "document"];

impl ProblemRecord {
    pub fn resolver(&self) -> VarResolver<'_> {
        VarResolver::with_mapping(&self.variable_order, &self.entity_mapping)
    }

    pub fn spans_with(&self, label: EntityLabel) -> impl Iterator<Item = &EntitySpan> {
        self.spans.iter().filter(move |s| s.label == label)
    }

    /// Parses without checking invariants; see [`ProblemRecord::check`].
    pub fn from_value_unchecked(v: &Value) -> Result<Self, IrError> {
        let obj = v.as_object().ok_or_else(|| violation("$", "expected an object"))?;
        let id = match obj.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            None => String::new(),
            Some(_) => return Err(violation("$.id", "expected a string")),
        };
        let text = match obj.get("text").or_else(|| obj.get("document")) {
            Some(Value::String(s)) => s.clone(),
            None => String::new(),
            Some(_) => return Err(violation("$.text", "expected a string")),
        };
        let spans: Vec<EntitySpan> = match obj.get("spans") {
            None | Some(Value::Null) => Vec::new(),
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| violation("$.spans", e.to_string()))?,
        };
        let entity_mapping: IndexMap<String, String> = match obj.get("entity_mapping") {
            None | Some(Value::Null) => IndexMap::new(),
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| violation("$.entity_mapping", e.to_string()))?,
        };
        let gold = if let Some(g) = obj.get("gold").filter(|g| !g.is_null()) {
            Some(Formulation::from_value(g).map_err(|e| prefix_path(e, "$.gold"))?)
        } else if obj.contains_key("obj_declaration") || obj.contains_key("obj_declarations") {
            Some(formulation_from_map(obj, "$")?)
        } else {
            None
        };
        let variable_order = match obj.get("variable_order") {
            Some(v) => string_list(v, "$.variable_order")?,
            None => gold
                .as_ref()
                .map(|g| g.vars.clone())
                .ok_or_else(|| violation("$.variable_order", "missing variable_order"))?,
        };
        let inline_gold = !obj.contains_key("gold");
        let extra = obj
            .iter()
            .filter(|(k, _)| {
                !RECORD_KEYS.contains(&k.as_str())
                    && !(inline_gold && gold.is_some() && FORMULATION_KEYS.contains(&k.as_str()))
            })
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let mut rec = ProblemRecord { id, text, spans, variable_order, entity_mapping, gold, extra };
        let chars: Vec<char> = rec.text.chars().collect();
        for s in &mut rec.spans {
            if s.surface.is_empty() && s.start < s.end && s.end <= chars.len() {
                s.surface = chars[s.start..s.end].iter().collect();
            }
        }
        Ok(rec)
    }

    /// Record-level invariants plus gold validation.
    pub fn check(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.variable_order.is_empty() {
            report.push("variable_order", "must not be empty");
        }
        for (i, v) in self.variable_order.iter().enumerate() {
            if self.variable_order[..i].contains(v) {
                report.push("variable_order", format!("duplicate variable {v:?}"));
            }
        }
        for (k, v) in &self.entity_mapping {
            if !self.variable_order.contains(v) {
                report.push(format!("entity_mapping.{k}"), format!("target {v:?} not in variable_order"));
            }
        }
        let chars: Vec<char> = self.text.chars().collect();
        for (i, s) in self.spans.iter().enumerate() {
            if !(s.start < s.end && s.end <= chars.len()) {
                report.push(format!("spans[{i}]"), format!("offsets {}..{} out of range", s.start, s.end));
                continue;
            }
            let slice: String = chars[s.start..s.end].iter().collect();
            if slice != s.surface {
                report.push(
                    format!("spans[{i}]"),
                    format!("surface {:?} does not match text {:?}", s.surface, slice),
                );
            }
        }
        if let Some(gold) = &self.gold {
            let resolver = self.resolver();
            for v in &gold.vars {
                if resolver.resolve(v).is_none() {
                    report.push("gold.vars", format!("unresolved variable {v:?}"));
                }
            }
            for v in validate_with(gold, &resolver).violations {
                report.push(format!("gold.{}", v.path), v.message);
            }
        }
        report
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("id".into(), self.id.clone().into());
        m.insert("text".into(), self.text.clone().into());
        m.insert("spans".into(), serde_json::to_value(&self.spans).expect("spans serialize"));
        m.insert(
            "variable_order".into(),
            Value::Array(self.variable_order.iter().cloned().map(Value::String).collect()),
        );
        m.insert(
            "entity_mapping".into(),
            serde_json::to_value(&self.entity_mapping).expect("mapping serialize"),
        );
        if let Some(g) = &self.gold {
            write_formulation(g, &mut m);
            if !g.extra.is_empty() {
                // Extras of a nested gold would collide with record keys.
                m.insert("gold".into(), g.to_value());
                for k in FORMULATION_KEYS {
                    m.shift_remove(k);
                }
            }
        }
        for (k, v) in &self.extra {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        self.to_value().to_string()
    }
}

fn prefix_path(e: IrError, prefix: &str) -> IrError {
    match e {
        IrError::SchemaViolation { path, reason } => {
            IrError::SchemaViolation { path: path.replacen('$', prefix, 1), reason }
        }
        other => other,
    }
}

/// Parses one record and enforces every invariant, including validity of
/// the gold formulation.
pub fn parse_problem(json_text: &str) -> Result<ProblemRecord, IrError> {
    let v: Value =
        serde_json::from_str(json_text).map_err(|e| IrError::MalformedJson(e.to_string()))?;
    let rec = ProblemRecord::from_value_unchecked(&v)?;
    if let Some(first) = rec.check().violations.into_iter().next() {
        return Err(IrError::SchemaViolation { path: first.path, reason: first.message });
    }
    Ok(rec)
}

/// Parses a JSON-lines corpus, skipping blank lines. Errors carry the
/// 1-based line number in the path.
pub fn parse_corpus(text: &str) -> Result<Vec<ProblemRecord>, IrError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_problem(l).map_err(|e| match e {
                IrError::SchemaViolation { path, reason } => {
                    IrError::SchemaViolation { path: format!("line {}: {path}", i + 1), reason }
                }
                IrError::MalformedJson(m) => IrError::MalformedJson(format!("line {}: {m}", i + 1)),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantity::{int, ratio};

    const TRAIN_GOLD: &str = r#"{"obj_declaration": {"type": "objective", "direction": "maximize", "name": "profit", "terms": {"AC seat": "50", "non-AC seat": "30"}}, "const_declarations": [{"type": "lowerbound", "direction": "at least", "limit": "100", "var": "AC seats", "operator": "GREATER_OR_EQUAL"}, {"type": "xby", "x_var": "non-AC seats", "direction": "minimum", "param": "2", "y_var": "AC seats", "operator": "GREATER_OR_EQUAL"}], "vars": ["AC seats", "non-AC seats"]}"#;

    #[test]
    fn parses_train_record() {
        let f = Formulation::from_json(TRAIN_GOLD).unwrap();
        assert_eq!(f.vars, vec!["AC seats", "non-AC seats"]);
        assert_eq!(f.objectives.len(), 1);
        assert_eq!(f.constraints.len(), 2);
        assert_eq!(f.constraints[1].param.as_ref().unwrap().value(), &int(2));
        assert!(validate(&f).is_empty(), "{:?}", validate(&f));
    }

    #[test]
    fn serialization_is_stable_and_round_trips() {
        let f = Formulation::from_json(TRAIN_GOLD).unwrap();
        let once = serialize_ir(&f);
        let again = serialize_ir(&Formulation::from_json(&once).unwrap());
        assert_eq!(once, again);
        assert_eq!(Formulation::from_json(&once).unwrap(), f);
    }

    #[test]
    fn objvar_tag_round_trips_as_sum() {
        let f = Formulation::from_json(
            r#"{"obj_declaration": {"type": "objvar", "direction": "minimize", "name": "n", "vars": ["a", "b"]}, "const_declarations": [], "vars": ["a", "b"]}"#,
        )
        .unwrap();
        assert!(matches!(f.objectives[0].body, ObjectiveBody::Sum(_)));
        assert!(serialize_ir(&f).contains(r#""type":"objvar""#));
    }

    #[test]
    fn decimal_source_text_is_preserved() {
        let f = Formulation::from_json(
            r#"{"obj_declaration": {"type": "objective", "direction": "maximize", "name": "p", "terms": {"r": "45"}}, "const_declarations": [{"type": "ratio", "direction": "at least", "limit": "0.55", "var": "r", "operator": "GREATER_OR_EQUAL"}], "vars": ["r", "k"]}"#,
        )
        .unwrap();
        assert_eq!(f.constraints[0].limit.as_ref().unwrap().value(), &ratio(11, 20));
        assert!(serialize_ir(&f).contains(r#""limit":"0.55""#));
    }

    #[test]
    fn unknown_keys_are_preserved() {
        let f = Formulation::from_json(
            r#"{"obj_declaration": {"type": "objvar", "direction": "minimize", "name": "n", "vars": ["a"], "note": 1}, "const_declarations": [], "vars": ["a"], "id": "-996226930", "num_of_constraints": 0}"#,
        )
        .unwrap();
        assert_eq!(f.extra.get("id"), Some(&Value::from("-996226930")));
        let out = serialize_ir(&f);
        assert!(out.ends_with(r#""id":"-996226930","num_of_constraints":0}"#), "{out}");
        assert!(out.contains(r#""note":1"#));
    }

    #[test]
    fn validation_messages() {
        let mut c = ConstraintDecl::new(ConstraintType::Sum, Operator::LessOrEqual)
            .with_limit(Quantity::from_integer(500));
        c.terms = Some([("a", Quantity::from_integer(1))].into_iter().collect());
        let f = Formulation::new(
            ObjectiveDecl::sum(ObjectiveDirection::Maximize, "n", vec!["a".into()]),
            vec![c],
            vec!["a".into()],
        );
        let r = validate(&f);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].message, "sum must not have terms");

        let lb = ConstraintDecl::new(ConstraintType::LowerBound, Operator::LessOrEqual)
            .with_var("a")
            .with_limit(Quantity::from_integer(100));
        let f = Formulation::new(
            ObjectiveDecl::sum(ObjectiveDirection::Maximize, "n", vec!["a".into()]),
            vec![lb],
            vec!["a".into()],
        );
        let r = validate(&f);
        assert_eq!(r.violations.len(), 1);
        assert!(r.violations[0].message.contains("GREATER_OR_EQUAL"));
    }

    #[test]
    fn resolver_is_case_and_plural_tolerant() {
        let order = vec!["AC seats".to_string(), "oral hygienists".to_string(), "batteries".to_string()];
        let r = VarResolver::new(&order);
        assert_eq!(r.resolve("AC seat"), Some(0));
        assert_eq!(r.resolve("ac  SEATS"), Some(0));
        assert_eq!(r.resolve("Oral hygienist"), Some(1));
        assert_eq!(r.resolve("battery"), Some(2));
        assert_eq!(r.resolve("kayaks"), None);
        let mut mapping = IndexMap::new();
        mapping.insert("electric-based stores".to_string(), "batteries".to_string());
        let r = VarResolver::with_mapping(&order, &mapping);
        assert_eq!(r.resolve("Electric-based stores"), Some(2));
    }

    #[test]
    fn record_requires_resolvable_constraint_variables() {
        let rec = r#"{"id": "x", "text": "t", "variable_order": ["a", "b"], "obj_declaration": {"type": "objvar", "direction": "maximize", "name": "n", "vars": ["a", "b"]}, "const_declarations": [{"type": "upperbound", "direction": "at most", "limit": "3", "var": "zebras", "operator": "LESS_OR_EQUAL"}], "vars": ["a", "b"]}"#;
        match parse_problem(rec) {
            Err(IrError::SchemaViolation { path, reason }) => {
                assert!(path.contains("constraints[0]"), "{path}");
                assert!(reason.contains("zebras"));
            }
            other => panic!("expected schema violation, got {other:?}"),
        }
    }

    #[test]
    fn record_with_no_constraints_is_valid() {
        let rec = r#"{"id": "x", "text": "t", "obj_declaration": {"type": "objvar", "direction": "maximize", "name": "n", "vars": ["a"]}, "const_declarations": [], "vars": ["a"]}"#;
        let r = parse_problem(rec).unwrap();
        assert_eq!(r.variable_order, vec!["a"]);
        assert_eq!(r.gold.unwrap().constraints.len(), 0);
    }

    #[test]
    fn record_span_checks() {
        let bad = r#"{"id": "x", "text": "at most 5", "variable_order": ["a"], "spans": [{"start": 0, "end": 7, "label": "CONST_DIR", "surface": "at most"}, {"start": 8, "end": 12, "label": "LIMIT", "surface": "5"}]}"#;
        assert!(matches!(parse_problem(bad), Err(IrError::SchemaViolation { .. })));
        let ok = r#"{"id": "x", "text": "at most 5", "variable_order": ["a"], "spans": [{"start": 8, "end": 9, "label": "LIMIT"}]}"#;
        assert_eq!(parse_problem(ok).unwrap().spans[0].surface, "5");
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(parse_problem("{nope"), Err(IrError::MalformedJson(_))));
    }
}
