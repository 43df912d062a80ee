//! Problem-text generation from an IR.
//!
//! `stub:` endpoints render a fixed template locally. Any other endpoint is
//! treated as an HTTP JSON completion API: the request body is
//! `{"prompt": ...}` and the text is read from the first of `text`,
//! `choices[0].text`, `choices[0].message.content`, `completion` or
//! `output` that is present.

use std::sync::Mutex;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::AugmentError;
use crate::ir::{ConstraintDecl, ConstraintType, Formulation, ObjectiveBody, ObjectiveDirection, Operator};
use crate::quantity::{Quantity, format_decimal, int, render_rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenServiceConfig {
    pub endpoint: String,
    /// Name of the environment variable holding the bearer token.
    pub auth_env: Option<String>,
    /// `{facts}` is replaced by the template rendering, `{ir}` by the JSON IR.
    pub prompt_template: String,
    pub max_attempts: u32,
    pub timeout_secs: u64,
    pub max_concurrency: usize,
}

impl Default for GenServiceConfig {
    fn default() -> Self {
        Self {
            endpoint: "stub:".into(),
            auth_env: None,
            prompt_template: "Rewrite the following facts as a short optimization word problem. \
                Keep every number, every item name and every direction word.\n\n{facts}"
                .into(),
            max_attempts: 3,
            timeout_secs: 30,
            max_concurrency: 4,
        }
    }
}

impl GenServiceConfig {
    pub fn stub() -> Self {
        Self::default()
    }

    pub fn is_stub(&self) -> bool {
        self.endpoint.starts_with("stub:")
    }

    /// Endpoint without query string or credentials, for provenance.
    pub fn service_label(&self) -> String {
        let e = self.endpoint.split(['?', '#']).next().unwrap_or_default();
        match e.split_once("://") {
            Some((scheme, rest)) => {
                let host = rest.rsplit_once('@').map_or(rest, |(_, h)| h);
                format!("{scheme}://{host}")
            }
            None => e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedProblem {
    pub text: String,
    pub ir: Formulation,
}

fn qty(q: &Quantity) -> String {
    if q.is_percent() {
        return q.source_text().to_string();
    }
    render_rational(q.value())
}

fn percent(q: &Quantity) -> String {
    if q.is_percent() {
        return q.source_text().to_string();
    }
    match format_decimal(&(q.value() * int(100))) {
        Some(p) => format!("{p}%"),
        None => render_rational(q.value()),
    }
}

fn bound_word(op: Operator) -> &'static str {
    match op {
        Operator::LessOrEqual => "at most",
        Operator::GreaterOrEqual => "at least",
    }
}

fn join_names(names: &[&str]) -> String {
    match names {
        [] => String::new(),
        [one] => one.to_string(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

fn constraint_sentence(c: &ConstraintDecl, vars: &[String]) -> String {
    let bound = bound_word(c.operator);
    let var = c.var.as_deref().unwrap_or("?");
    let x = c.x_var.as_deref().unwrap_or("?");
    let y = c.y_var.as_deref().unwrap_or("?");
    let limit = c.limit.as_ref().map(qty).unwrap_or_default();
    match c.kind {
        ConstraintType::Sum => {
            let names: Vec<&str> = vars.iter().map(String::as_str).collect();
            format!("The combined number of {} must be {bound} {limit}.", join_names(&names))
        }
        ConstraintType::UpperBound | ConstraintType::LowerBound => format!("The number of {var} must be {bound} {limit}."),
        ConstraintType::Linear => {
            let parts: Vec<String> = c
                .terms
                .iter()
                .flat_map(|t| t.iter())
                .map(|(v, q)| format!("{} per unit of {v}", qty(q)))
                .collect();
            let parts: Vec<&str> = parts.iter().map(String::as_str).collect();
            let what = if c.direction.trim().is_empty() { "resource use".to_string() } else { format!("{} total", c.direction.trim()) };
            format!("With {}, the {what} must be {bound} {limit}.", join_names(&parts))
        }
        ConstraintType::Ratio => {
            let share = c.limit.as_ref().map(percent).unwrap_or_default();
            format!("The number of {var} must be {bound} {share} of all units.")
        }
        ConstraintType::Xby => {
            let p = c.param.as_ref().map(qty).unwrap_or_default();
            format!("The number of {x} must be {bound} {p} times the number of {y}.")
        }
        ConstraintType::Xy => format!("The number of {x} must be {bound} the number of {y}."),
    }
}

/// Deterministic plain-text rendering that states every variable, quantity
/// and direction of `f`.
pub fn render_facts(f: &Formulation) -> String {
    let names: Vec<&str> = f.vars.iter().map(String::as_str).collect();
    let mut out = vec![format!("A planner decides how many {} to use.", join_names(&names))];
    for c in &f.constraints {
        out.push(constraint_sentence(c, &f.vars));
    }
    for o in &f.objectives {
        let verb = match o.direction {
            ObjectiveDirection::Maximize => "maximize",
            ObjectiveDirection::Minimize => "minimize",
        };
        let name = if o.name.trim().is_empty() { "the objective" } else { o.name.trim() };
        match &o.body {
            ObjectiveBody::Linear(t) => {
                let parts: Vec<String> = t.iter().map(|(v, q)| format!("{} for each of the {v}", qty(q))).collect();
                let parts: Vec<&str> = parts.iter().map(String::as_str).collect();
                out.push(format!("The {name} counts {}. The goal is to {verb} the {name}.", join_names(&parts)));
            }
            ObjectiveBody::Sum(vs) => {
                let vs: Vec<&str> = vs.iter().map(String::as_str).collect();
                out.push(format!("The goal is to {verb} the {name}, the total count of {}.", join_names(&vs)));
            }
        }
    }
    out.join(" ")
}

fn extract_text(v: &Value) -> Option<String> {
    let candidates = [
        v.get("text"),
        v.pointer("/choices/0/text"),
        v.pointer("/choices/0/message/content"),
        v.get("completion"),
        v.get("output"),
    ];
    candidates.into_iter().flatten().find_map(|x| x.as_str().map(str::to_string))
}

fn request(agent: &ureq::Agent, svc: &GenServiceConfig, token: Option<&str>, prompt: &str) -> Result<String, String> {
    let mut req = agent.post(&svc.endpoint).header("Content-Type", "application/json");
    if let Some(t) = token {
        req = req.header("Authorization", &format!("Bearer {t}"));
    }
    let body = serde_json::json!({ "prompt": prompt }).to_string();
    let mut resp = req.send(body.as_bytes()).map_err(|e| e.to_string())?;
    let text = resp.body_mut().read_to_string().map_err(|e| e.to_string())?;
    let v: Value = serde_json::from_str(&text).map_err(|e| format!("response is not JSON: {e}"))?;
    Ok(extract_text(&v).unwrap_or_default())
}

fn agent(svc: &GenServiceConfig) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(svc.timeout_secs.max(1))))
        .http_status_as_error(true)
        .build()
        .into()
}

fn generate(f: &Formulation, svc: &GenServiceConfig, agent: Option<&ureq::Agent>) -> Result<GeneratedProblem, AugmentError> {
    let facts = render_facts(f);
    let Some(agent) = agent else {
        return Ok(GeneratedProblem { text: facts, ir: f.clone() });
    };
    let prompt = svc.prompt_template.replace("{facts}", &facts).replace("{ir}", &f.to_json());
    let token = svc.auth_env.as_deref().and_then(|k| std::env::var(k).ok());
    let mut last_error = None;
    for _ in 0..svc.max_attempts.max(1) {
        match request(agent, svc, token.as_deref(), &prompt) {
            Ok(text) if !text.trim().is_empty() => {
                return Ok(GeneratedProblem { text: text.trim().to_string(), ir: f.clone() });
            }
            Ok(_) => last_error = None,
            Err(e) => last_error = Some(e),
        }
    }
    Err(match last_error {
        Some(e) => AugmentError::ServiceUnavailable(e),
        None => AugmentError::EmptyGeneration,
    })
}

/// Generates problem text for `f`, retrying up to `svc.max_attempts` times.
pub fn backtranslate(f: &Formulation, svc: &GenServiceConfig) -> Result<GeneratedProblem, AugmentError> {
    let agent = (!svc.is_stub()).then(|| agent(svc));
    generate(f, svc, agent.as_ref())
}

/// Generates text for every formulation with at most
/// `svc.max_concurrency` requests in flight. Output order matches input.
pub fn backtranslate_all(fs: &[&Formulation], svc: &GenServiceConfig) -> Result<Vec<GeneratedProblem>, AugmentError> {
    if svc.is_stub() {
        return fs.iter().map(|f| generate(f, svc, None)).collect();
    }
    let agent = agent(svc);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<GeneratedProblem, AugmentError>>>> = Mutex::new((0..fs.len()).map(|_| None).collect());
    let workers = svc.max_concurrency.clamp(1, fs.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| {
                loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= fs.len() {
                        break;
                    }
                    let r = generate(fs[i], svc, Some(&agent));
                    let failed = r.is_err();
                    results.lock().expect("results lock")[i] = Some(r);
                    if failed {
                        // stop handing out work; the first error is reported
                        next.store(fs.len(), Ordering::Relaxed);
                    }
                }
            });
        }
    });
    let results = results.into_inner().expect("results lock");
    let mut out = Vec::with_capacity(fs.len());
    for r in results {
        match r {
            Some(Ok(g)) => out.push(g),
            Some(Err(e)) => return Err(e),
            None => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn service_label_drops_credentials() {
        let svc = GenServiceConfig { endpoint: "https://user:pw@host.example/v1?key=abc".into(), ..Default::default() };
        assert_eq!(svc.service_label(), "https://host.example/v1");
        assert_eq!(GenServiceConfig::stub().service_label(), "stub:");
    }

    #[test]
    fn reads_common_response_shapes() {
        for v in [
            serde_json::json!({"text": "a"}),
            serde_json::json!({"choices": [{"text": "a"}]}),
            serde_json::json!({"choices": [{"message": {"content": "a"}}]}),
            serde_json::json!({"completion": "a"}),
        ] {
            assert_eq!(extract_text(&v).as_deref(), Some("a"));
        }
        assert_eq!(extract_text(&serde_json::json!({})), None);
    }
}
