//! Checks that generated text mentions every quantity, variable and
//! direction of its source IR.

use std::sync::LazyLock;

use num_traits::Signed;
use regex::Regex;
use serde::Serialize;

use crate::ir::{Formulation, ObjectiveBody, ObjectiveDirection, normalize_name, singular};
use crate::quantity::{Quantity, Rational, extract_numbers};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GenValidationReport {
    pub missing_quantities: Vec<String>,
    pub missing_variables: Vec<String>,
    pub missing_objective_directions: Vec<String>,
    pub constraint_phrases: usize,
    pub constraints: usize,
}

impl GenValidationReport {
    pub fn accepted(&self) -> bool {
        self.missing_quantities.is_empty()
            && self.missing_variables.is_empty()
            && self.missing_objective_directions.is_empty()
            && self.constraint_phrases >= self.constraints
    }

    pub fn misses(&self) -> usize {
        self.missing_quantities.len()
            + self.missing_variables.len()
            + self.missing_objective_directions.len()
            + self.constraints.saturating_sub(self.constraint_phrases)
    }
}

static MAXIMIZE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(maximi[sz]e[sd]?|maximi[sz]ing|maximum|maximal|highest|largest|greatest|most profit)\b")
        .expect("maximize regex")
});

static MINIMIZE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(minimi[sz]e[sd]?|minimi[sz]ing|minimum|minimal|lowest|smallest|fewest|least cost)\b")
        .expect("minimize regex")
});

/// Bound phrases, longest first so overlapping shorter forms are not
/// double-counted.
static CONSTRAINT_PHRASE: LazyLock<Regex> = LazyLock::new(|| {
    let phrases = [
        "must not exceed",
        "cannot exceed",
        "can not exceed",
        "does not exceed",
        "should not exceed",
        "no more than",
        "no less than",
        "no fewer than",
        "not more than",
        "not less than",
        "times as many",
        "at most",
        "at least",
        "a maximum of",
        "a minimum of",
        "up to",
        "more than",
        "fewer than",
        "less than",
        "exceed",
        "available",
        "budget",
        "requires",
        "required",
        "require",
    ];
    Regex::new(&format!(r"(?i)\b({})\b", phrases.join("|"))).expect("constraint phrase regex")
});

fn all_quantities(f: &Formulation) -> Vec<&Quantity> {
    let mut out = Vec::new();
    for o in &f.objectives {
        if let ObjectiveBody::Linear(t) = &o.body {
            out.extend(t.iter().map(|(_, q)| q));
        }
    }
    for c in &f.constraints {
        out.extend(c.quantities());
    }
    out
}

fn mentions_variable(text_norm: &str, name: &str) -> bool {
    let n = normalize_name(name);
    let words: Vec<String> = n.split(' ').map(singular).collect();
    let stem = words.join(" ");
    text_norm.contains(&n) || text_norm.contains(&stem)
}

/// Reports what `text` fails to mention. Quantities match as numerals,
/// number words or percentages (`55%` matches 0.55 and 55).
pub fn validate_generated(text: &str, f: &Formulation) -> GenValidationReport {
    let found: Vec<Rational> = extract_numbers(text).iter().flat_map(|n| n.match_values()).collect();
    let mut report = GenValidationReport { constraints: f.constraints.len(), ..Default::default() };
    for q in all_quantities(f) {
        let wanted: Vec<Rational> = q.match_values().into_iter().map(|v| v.abs()).collect();
        if !wanted.iter().any(|w| found.contains(w)) {
            report.missing_quantities.push(q.source_text().to_string());
        }
    }
    let text_norm = normalize_name(&text.replace(['.', ',', ';', ':', '?', '!', '(', ')'], " "));
    for v in &f.vars {
        if !mentions_variable(&text_norm, v) {
            report.missing_variables.push(v.clone());
        }
    }
    for o in &f.objectives {
        let (re, word) = match o.direction {
            ObjectiveDirection::Maximize => (&*MAXIMIZE, "maximize"),
            ObjectiveDirection::Minimize => (&*MINIMIZE, "minimize"),
        };
        if !re.is_match(text) && !report.missing_objective_directions.iter().any(|w| w == word) {
            report.missing_objective_directions.push(word.to_string());
        }
    }
    report.constraint_phrases = CONSTRAINT_PHRASE.find_iter(text).count();
    report
}
