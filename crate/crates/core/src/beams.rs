//! Beam files: one JSON object per line,
//! `{"id": ..., "candidates": [{"ir": <formulation>, "logprob": <number>}]}`.

use serde_json::Value;
use thiserror::Error;

use crate::ir::Formulation;
use crate::rules::BeamCandidate;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("beam file line {line}: {reason}")]
pub struct BeamFileError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawCandidate {
    pub ir: Value,
    pub logprob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamLine {
    pub id: String,
    pub candidates: Vec<RawCandidate>,
}

impl BeamLine {
    /// Wraps formulations as candidates with logprob 0.
    pub fn from_formulations<'a>(id: impl Into<String>, fs: impl IntoIterator<Item = &'a Formulation>) -> Self {
        Self {
            id: id.into(),
            candidates: fs.into_iter().map(|f| RawCandidate { ir: f.to_value(), logprob: 0.0 }).collect(),
        }
    }

    pub fn to_candidates(&self) -> Vec<BeamCandidate> {
        self.candidates.iter().enumerate().map(|(i, c)| BeamCandidate::new(c.ir.clone(), c.logprob, i)).collect()
    }

    pub fn to_value(&self) -> Value {
        let cands: Vec<Value> =
            self.candidates.iter().map(|c| serde_json::json!({"ir": c.ir, "logprob": c.logprob})).collect();
        serde_json::json!({"id": self.id, "candidates": cands})
    }
}

fn parse_line(text: &str, line: usize) -> Result<BeamLine, BeamFileError> {
    let err = |reason: String| BeamFileError { line, reason };
    let v: Value = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
    let id = match v.get("id") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => return Err(err("missing string id".into())),
    };
    let list = v.get("candidates").and_then(Value::as_array).ok_or_else(|| err("missing candidates list".into()))?;
    let mut candidates = Vec::with_capacity(list.len());
    for (i, c) in list.iter().enumerate() {
        let ir = c.get("ir").cloned().ok_or_else(|| err(format!("candidate {i} has no ir")))?;
        let logprob = match c.get("logprob") {
            None | Some(Value::Null) => 0.0,
            Some(x) => x.as_f64().ok_or_else(|| err(format!("candidate {i} logprob is not a number")))?,
        };
        candidates.push(RawCandidate { ir, logprob });
    }
    Ok(BeamLine { id, candidates })
}

/// Parses a beam file; blank lines are skipped.
pub fn parse_beam_file(text: &str) -> Result<Vec<BeamLine>, BeamFileError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(l, i + 1))
        .collect()
}
