//! CPLEX LP file subset: `Maximize`/`Minimize`, `Subject To`, `Bounds`,
//! `General`, `End`.
//!
//! Grammar of what is written and read:
//!
//! ```text
//! file      := comment* sense objective [ "Subject To" row* ] "Bounds" bound* [ "General" name* ] "End"
//! sense     := "Maximize" | "Minimize"
//! objective := label ":" expr
//! row       := [ "\" text ] [ "\ exact" label ":" exact ("," exact)* ] label ":" expr op number
//! expr      := [sign] [number] name { sign [number] name }
//! op        := "<=" | "=<" | ">=" | "=>" | "<" | ">"
//! bound     := name ">=" "0" | name "free" | "0" "<=" name
//! ```
//!
//! Variable names are sanitized to `[A-Za-z0-9_.]` (other characters become
//! `_`, a leading digit or dot gets a `_` prefix). Coefficients are written
//! as exact decimals; values without a terminating expansion are written as
//! the nearest double and repeated exactly as `p/q` in a `\ exact` comment,
//! which the parser reads back.

use std::collections::HashMap;
use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::SolveError;
use crate::canonical::{CanonicalLP, CanonicalRow, ObjectiveRow, Sense};
use crate::ir::ObjectiveDirection;
use crate::quantity::{Rational, format_decimal, rational_to_f64};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("LP syntax error at line {line}: {reason}")]
pub struct LpSyntaxError {
    pub line: usize,
    pub reason: String,
}

fn syntax(line: usize, reason: impl Into<String>) -> LpSyntaxError {
    LpSyntaxError { line, reason: reason.into() }
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

/// Maps an arbitrary string to a legal LP identifier.
pub fn sanitize_name(name: &str) -> String {
    let mut s: String = name.trim().chars().map(|c| if is_name_char(c) { c } else { '_' }).collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        s.insert(0, '_');
    }
    s
}

fn unique_names(names: &[String]) -> Vec<String> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut out = Vec::with_capacity(names.len());
    for n in names {
        let base = sanitize_name(n);
        let mut candidate = base.clone();
        let mut k = 1;
        while seen.contains_key(&candidate) {
            k += 1;
            candidate = format!("{base}_{k}");
        }
        seen.insert(candidate.clone(), 1);
        out.push(candidate);
    }
    out
}

fn number_text(r: &Rational) -> (String, bool) {
    match format_decimal(r) {
        Some(s) => (s, true),
        None => (format!("{:?}", rational_to_f64(r)), false),
    }
}

/// Writes `expr` and collects entries that need an exact comment.
fn write_expr(coeffs: &[Rational], names: &[String], inexact: &mut Vec<String>) -> String {
    let mut out = String::new();
    for (c, name) in coeffs.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let (mag, exact) = number_text(&c.abs());
        if !exact {
            inexact.push(format!("{name} = {}/{}", c.numer(), c.denom()));
        }
        let sign = if c.is_negative() { "-" } else { "+" };
        if out.is_empty() {
            if c.is_negative() {
                out.push_str("- ");
            }
        } else {
            write!(out, " {sign} ").unwrap();
        }
        if c.abs().is_one() {
            out.push_str(name);
        } else {
            write!(out, "{mag} {name}").unwrap();
        }
    }
    if out.is_empty()
        && let Some(first) = names.first() {
            write!(out, "0 {first}").unwrap();
        }
    out
}

/// Renders a single-objective problem as an LP file.
pub fn emit_lp_file(lp: &CanonicalLP, name: &str) -> Result<String, SolveError> {
    if lp.objectives.len() != 1 {
        return Err(SolveError::MultiObjectiveUnsupported);
    }
    let names = unique_names(&lp.variable_order);
    let obj = &lp.objectives[0];
    let mut out = String::new();
    writeln!(out, "\\ Problem: {name}").unwrap();
    out.push_str(match obj.direction {
        ObjectiveDirection::Maximize => "Maximize\n",
        ObjectiveDirection::Minimize => "Minimize\n",
    });
    let label = if obj.name.trim().is_empty() { "obj".to_string() } else { sanitize_name(&obj.name) };
    let mut inexact = Vec::new();
    let expr = write_expr(&obj.coefficients, &names, &mut inexact);
    if !inexact.is_empty() {
        writeln!(out, " \\ exact {label}: {}", inexact.join(", ")).unwrap();
    }
    writeln!(out, " {label}: {expr}").unwrap();
    if !lp.rows.is_empty() {
        out.push_str("Subject To\n");
        for (i, row) in lp.rows.iter().enumerate() {
            let label = format!("C{}", i + 1);
            let mut inexact = Vec::new();
            let expr = write_expr(&row.coefficients, &names, &mut inexact);
            let (rhs, exact) = number_text(&row.rhs.abs());
            if !exact {
                inexact.push(format!("rhs = {}/{}", row.rhs.numer(), row.rhs.denom()));
            }
            let rhs = if row.rhs.is_negative() { format!("-{rhs}") } else { rhs };
            if let Some(comment) = row.comment.as_deref().filter(|c| !c.trim().is_empty()) {
                writeln!(out, " \\ {}", comment.replace('\n', " ")).unwrap();
            }
            if !inexact.is_empty() {
                writeln!(out, " \\ exact {label}: {}", inexact.join(", ")).unwrap();
            }
            writeln!(out, " {label}: {expr} {} {rhs}", row.sense.as_str()).unwrap();
        }
    }
    out.push_str("Bounds\n");
    for (n, nonneg) in names.iter().zip(&lp.nonneg) {
        if *nonneg {
            writeln!(out, " {n} >= 0").unwrap();
        } else {
            writeln!(out, " {n} free").unwrap();
        }
    }
    let general: Vec<&str> =
        names.iter().zip(&lp.integral).filter(|(_, i)| **i).map(|(n, _)| n.as_str()).collect();
    if !general.is_empty() {
        writeln!(out, "General\n {}", general.join(" ")).unwrap();
    }
    out.push_str("End\n");
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Label(String),
    Num(Rational),
    Plus,
    Minus,
    Sense(Sense),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    General,
    End,
}

fn section_keyword(line: &str) -> Option<(Section, Option<ObjectiveDirection>)> {
    let l = line.trim().to_ascii_lowercase();
    let l = l.split_whitespace().collect::<Vec<_>>().join(" ");
    Some(match l.as_str() {
        "maximize" | "maximise" | "maximum" | "max" => (Section::Objective, Some(ObjectiveDirection::Maximize)),
        "minimize" | "minimise" | "minimum" | "min" => (Section::Objective, Some(ObjectiveDirection::Minimize)),
        "subject to" | "such that" | "st" | "s.t." => (Section::Constraints, None),
        "bounds" | "bound" => (Section::Bounds, None),
        "general" | "generals" | "gen" | "integer" | "integers" => (Section::General, None),
        "end" => (Section::End, None),
        _ => return None,
    })
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let ten = BigInt::from(10);
    let mut r = Rational::new(digits, ten.pow(frac.len() as u32));
    let scale = Rational::from_integer(ten.pow(exp.unsigned_abs()));
    if exp >= 0 {
        r *= scale;
    } else {
        r /= scale;
    }
    Some(r)
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Tok>, LpSyntaxError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '+' {
            out.push(Tok::Plus);
            i += 1;
        } else if c == '-' {
            out.push(Tok::Minus);
            i += 1;
        } else if matches!(c, '<' | '>' | '=' | '!') {
            let start = i;
            while i < chars.len() && matches!(chars[i], '<' | '>' | '=' | '!') {
                i += 1;
            }
            let op: String = chars[start..i].iter().collect();
            let sense = match op.as_str() {
                "<=" | "=<" | "<" => Sense::Le,
                ">=" | "=>" | ">" => Sense::Ge,
                "=" => return Err(syntax(lineno, "equality rows are not supported")),
                _ => return Err(syntax(lineno, format!("malformed sense token {op:?}"))),
            };
            out.push(Tok::Sense(sense));
        } else if c.is_ascii_digit() || c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j], '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = parse_decimal(&text).ok_or_else(|| syntax(lineno, format!("bad number {text:?}")))?;
            out.push(Tok::Num(v));
        } else if is_name_char(c) {
            let start = i;
            while i < chars.len() && is_name_char(chars[i]) {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            let mut j = i;
            while j < chars.len() && chars[j] == ' ' {
                j += 1;
            }
            if j < chars.len() && chars[j] == ':' {
                out.push(Tok::Label(name));
                i = j + 1;
            } else {
                out.push(Tok::Name(name));
            }
        } else {
            return Err(syntax(lineno, format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

type Expr = Vec<(String, Rational)>;

/// Parses `[sign] [number] name ...` until a non-term token; returns the
/// expression and the index of the first unconsumed token.
fn parse_expr(toks: &[(Tok, usize)], mut i: usize) -> Result<(Expr, usize), LpSyntaxError> {
    let mut expr = Vec::new();
    loop {
        let start = i;
        let mut sign = Rational::one();
        let mut signed = false;
        while let Some((t @ (Tok::Plus | Tok::Minus), _)) = toks.get(i) {
            if *t == Tok::Minus {
                sign = -sign;
            }
            signed = true;
            i += 1;
        }
        if !expr.is_empty() && !signed {
            return Ok((expr, start));
        }
        let coef = match toks.get(i) {
            Some((Tok::Num(v), _)) => {
                i += 1;
                v.clone()
            }
            _ => Rational::one(),
        };
        match toks.get(i) {
            Some((Tok::Name(n), _)) => {
                expr.push((n.clone(), sign * coef));
                i += 1;
            }
            Some((_, line)) if signed || i > start => {
                return Err(syntax(*line, "expected a variable name"));
            }
            _ if expr.is_empty() => {
                let line = toks.get(i).or(toks.last()).map_or(0, |t| t.1);
                return Err(syntax(line, "expected a linear expression"));
            }
            _ => return Ok((expr, start)),
        }
    }
}

struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    fn index(&mut self, name: &str) -> usize {
        match self.names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                self.names.push(name.to_string());
                self.names.len() - 1
            }
        }
    }
}

struct RawRow {
    expr: Expr,
    sense: Sense,
    rhs: Rational,
    label: String,
    comment: Option<String>,
}

fn parse_exact_comment(body: &str, lineno: usize) -> Result<(String, Vec<(String, Rational)>), LpSyntaxError> {
    let (label, rest) = body.split_once(':').ok_or_else(|| syntax(lineno, "exact comment needs a label"))?;
    let mut values = Vec::new();
    for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, frac) = item.split_once('=').ok_or_else(|| syntax(lineno, "exact entry needs '='"))?;
        let (p, q) = frac.trim().split_once('/').ok_or_else(|| syntax(lineno, "exact value must be p/q"))?;
        let p: BigInt = p.trim().parse().map_err(|_| syntax(lineno, "bad exact numerator"))?;
        let q: BigInt = q.trim().parse().map_err(|_| syntax(lineno, "bad exact denominator"))?;
        if q.is_zero() {
            return Err(syntax(lineno, "zero denominator"));
        }
        values.push((name.trim().to_string(), Rational::new(p, q)));
    }
    Ok((label.trim().to_string(), values))
}

/// Reads an LP file in the subset written by [`emit_lp_file`].
pub fn parse_lp_file(text: &str) -> Result<CanonicalLP, LpSyntaxError> {
    let mut section = Section::Preamble;
    let mut direction = None;
    let mut objective_toks: Vec<(Tok, usize)> = Vec::new();
    let mut row_toks: Vec<(Tok, usize)> = Vec::new();
    // comment preceding each row label, keyed by token index of the label
    let mut row_comments: HashMap<usize, String> = HashMap::new();
    let mut pending_comment: Option<String> = None;
    let mut exact: HashMap<String, Vec<(String, Rational)>> = HashMap::new();
    let mut bound_lines: Vec<(Vec<Tok>, usize)> = Vec::new();
    let mut general: Vec<String> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let (code, comment) = match raw.find('\\') {
            Some(p) => (&raw[..p], Some(raw[p + 1..].trim())),
            None => (raw, None),
        };
        if let Some(c) = comment {
            if let Some(body) = c.strip_prefix("exact ") {
                let (label, values) = parse_exact_comment(body, lineno)?;
                exact.insert(label, values);
            } else if section == Section::Constraints && !c.is_empty() {
                pending_comment = Some(c.to_string());
            }
        }
        if code.trim().is_empty() {
            continue;
        }
        if let Some((s, dir)) = section_keyword(code) {
            if s == Section::Objective {
                if direction.is_some() {
                    return Err(syntax(lineno, "more than one objective section"));
                }
                direction = dir;
            }
            if s == Section::Constraints && direction.is_none() {
                return Err(syntax(lineno, "constraints before objective sense"));
            }
            section = s;
            continue;
        }
        match section {
            Section::Preamble => return Err(syntax(lineno, "expected Maximize or Minimize")),
            Section::Objective => objective_toks.extend(tokenize(code, lineno)?.into_iter().map(|t| (t, lineno))),
            Section::Constraints => {
                let toks = tokenize(code, lineno)?;
                if let Some(c) = pending_comment.take()
                    && matches!(toks.first(), Some(Tok::Label(_)))
                {
                    row_comments.insert(row_toks.len(), c);
                }
                row_toks.extend(toks.into_iter().map(|t| (t, lineno)));
            }
            Section::Bounds => bound_lines.push((tokenize(code, lineno)?, lineno)),
            Section::General => {
                for t in tokenize(code, lineno)? {
                    match t {
                        Tok::Name(n) => general.push(n),
                        _ => return Err(syntax(lineno, "expected variable names in General")),
                    }
                }
            }
            Section::End => return Err(syntax(lineno, "content after End")),
        }
    }
    if section != Section::End {
        return Err(syntax(last_line, "missing End"));
    }
    let direction = direction.ok_or_else(|| syntax(last_line, "missing objective section"))?;

    // objective
    let mut i = 0;
    let mut obj_label = "obj".to_string();
    if let Some((Tok::Label(l), _)) = objective_toks.first() {
        obj_label = l.clone();
        i = 1;
    }
    let obj_expr = if i < objective_toks.len() {
        let (expr, end) = parse_expr(&objective_toks, i)?;
        if let Some((_, line)) = objective_toks.get(end) {
            return Err(syntax(*line, "unexpected token in objective"));
        }
        expr
    } else {
        Vec::new()
    };

    // rows
    let mut rows = Vec::new();
    let mut i = 0;
    while i < row_toks.len() {
        let comment = row_comments.get(&i).cloned();
        let label = match &row_toks[i].0 {
            Tok::Label(l) => {
                i += 1;
                l.clone()
            }
            _ => format!("R{}", rows.len() + 1),
        };
        let (expr, end) = parse_expr(&row_toks, i)?;
        i = end;
        let line = row_toks.get(i).map_or(last_line, |t| t.1);
        let sense = match row_toks.get(i) {
            Some((Tok::Sense(s), _)) => *s,
            _ => return Err(syntax(line, "expected a sense token")),
        };
        i += 1;
        let mut sign = Rational::one();
        while let Some((t @ (Tok::Plus | Tok::Minus), _)) = row_toks.get(i) {
            if *t == Tok::Minus {
                sign = -sign;
            }
            i += 1;
        }
        let rhs = match row_toks.get(i) {
            Some((Tok::Num(v), _)) => sign * v.clone(),
            _ => return Err(syntax(line, "expected a numeric right-hand side")),
        };
        i += 1;
        rows.push(RawRow { expr, sense, rhs, label, comment });
    }

    // variable order: Bounds first, then General, then first appearance
    let mut vars = VarTable { names: Vec::new() };
    let mut free = Vec::new();
    for (toks, line) in &bound_lines {
        match toks.as_slice() {
            [Tok::Name(n), Tok::Sense(Sense::Ge), Tok::Num(z)] if z.is_zero() => {
                vars.index(n);
            }
            [Tok::Num(z), Tok::Sense(Sense::Le), Tok::Name(n)] if z.is_zero() => {
                vars.index(n);
            }
            [Tok::Name(n), Tok::Name(kw)] if kw.eq_ignore_ascii_case("free") => {
                vars.index(n);
                free.push(n.clone());
            }
            _ => return Err(syntax(*line, "unsupported bound")),
        }
    }
    for n in &general {
        vars.index(n);
    }
    for (n, _) in &obj_expr {
        vars.index(n);
    }
    for r in &rows {
        for (n, _) in &r.expr {
            vars.index(n);
        }
    }
    let nvars = vars.names.len();
    let dense = |expr: &Expr, vars: &mut VarTable| {
        let mut w = vec![Rational::zero(); nvars];
        for (n, c) in expr {
            w[vars.index(n)] += c;
        }
        w
    };
    let apply_exact = |label: &str, w: &mut Vec<Rational>, rhs: Option<&mut Rational>, vars: &mut VarTable| {
        if let Some(values) = exact.get(label) {
            let mut rhs = rhs;
            for (n, v) in values {
                if n == "rhs" {
                    if let Some(r) = rhs.as_deref_mut() {
                        *r = v.clone();
                    }
                } else {
                    let j = vars.index(n);
                    if j < w.len() {
                        w[j] = v.clone();
                    }
                }
            }
        }
    };
    let mut obj_w = dense(&obj_expr, &mut vars);
    apply_exact(&obj_label, &mut obj_w, None, &mut vars);
    let objective = ObjectiveRow { coefficients: obj_w, direction, name: obj_label };
    let mut canonical_rows = Vec::with_capacity(rows.len());
    for r in rows {
        let mut w = dense(&r.expr, &mut vars);
        let mut rhs = r.rhs;
        apply_exact(&r.label, &mut w, Some(&mut rhs), &mut vars);
        canonical_rows.push(CanonicalRow { coefficients: w, sense: r.sense, rhs, comment: r.comment });
    }
    let integral = vars.names.iter().map(|n| general.contains(n)).collect();
    let nonneg = vars.names.iter().map(|n| !free.contains(n)).collect();
    Ok(CanonicalLP {
        objectives: vec![objective],
        rows: canonical_rows,
        variable_order: vars.names,
        nonneg,
        integral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantity::{int, ratio};

    fn sample() -> CanonicalLP {
        CanonicalLP {
            objectives: vec![ObjectiveRow {
                coefficients: vec![int(45), int(55)],
                direction: ObjectiveDirection::Maximize,
                name: "profit".into(),
            }],
            rows: vec![
                CanonicalRow { comment: Some("available".into()), ..CanonicalRow::new(vec![int(10), int(12)], Sense::Le, int(400)) },
                CanonicalRow::new(vec![ratio(9, 20), ratio(-11, 20)], Sense::Ge, int(0)),
                CanonicalRow::new(vec![ratio(1, 3), int(1)], Sense::Le, ratio(10, 3)),
            ],
            variable_order: vec!["rafts".into(), "kayak boats".into()],
            nonneg: vec![true, true],
            integral: vec![true, true],
        }
    }

    #[test]
    fn emits_expected_text() {
        let text = emit_lp_file(&sample(), "demo").unwrap();
        let expected = "\\ Problem: demo
Maximize
 profit: 45 rafts + 55 kayak_boats
Subject To
 \\ available
 C1: 10 rafts + 12 kayak_boats <= 400
 C2: 0.45 rafts - 0.55 kayak_boats >= 0
 \\ exact C3: rafts = 1/3, rhs = 10/3
 C3: 0.3333333333333333 rafts + kayak_boats <= 3.3333333333333335
Bounds
 rafts >= 0
 kayak_boats >= 0
General
 rafts kayak_boats
End
";
        assert_eq!(text, expected);
    }

    #[test]
    fn round_trip_is_exact() {
        let lp = sample();
        let text = emit_lp_file(&lp, "demo").unwrap();
        let back = parse_lp_file(&text).unwrap();
        assert_eq!(back.rows, lp.rows);
        assert_eq!(back.objectives[0].coefficients, lp.objectives[0].coefficients);
        assert_eq!(back.variable_order, vec!["rafts", "kayak_boats"]);
        assert_eq!(emit_lp_file(&back, "demo").unwrap(), text);
    }

    #[test]
    fn single_variable_without_rows() {
        let lp = CanonicalLP {
            objectives: vec![ObjectiveRow { coefficients: vec![int(1)], direction: ObjectiveDirection::Minimize, name: String::new() }],
            rows: vec![],
            variable_order: vec!["x".into()],
            nonneg: vec![true],
            integral: vec![false],
        };
        let text = emit_lp_file(&lp, "one").unwrap();
        assert_eq!(text, "\\ Problem: one\nMinimize\n obj: x\nBounds\n x >= 0\nEnd\n");
        assert_eq!(parse_lp_file(&text).unwrap().rows.len(), 0);
    }

    #[test]
    fn malformed_sense_reports_line() {
        let text = "Maximize\n obj: x\nSubject To\n c1: x <> 4\nEnd\n";
        let err = parse_lp_file(text).unwrap_err();
        assert_eq!(err.line, 4);
        assert!(err.reason.contains("malformed sense"), "{}", err.reason);
    }

    #[test]
    fn realigns_out_of_order_terms() {
        let text = "Maximize\n obj: 2 x + 3 y\nSubject To\n c1: 4 y + x <= 10\n c2: -y\n   - 2 x >= -8\nBounds\n x >= 0\n y >= 0\nEnd\n";
        let lp = parse_lp_file(text).unwrap();
        assert_eq!(lp.variable_order, vec!["x", "y"]);
        assert_eq!(lp.rows[0].coefficients, vec![int(1), int(4)]);
        assert_eq!(lp.rows[1].coefficients, vec![int(-2), int(-1)]);
        assert_eq!(lp.rows[1].rhs, int(-8));
        assert_eq!(lp.integral, vec![false, false]);
    }

    #[test]
    fn rejects_equality_and_missing_end() {
        assert!(parse_lp_file("Maximize\n obj: x\nSubject To\n c: x = 1\nEnd\n").is_err());
        assert!(parse_lp_file("Maximize\n obj: x\n").is_err());
        assert!(parse_lp_file("obj: x\nEnd\n").is_err());
    }

    #[test]
    fn sanitizes_names() {
        assert_eq!(sanitize_name("non-AC seats"), "non_AC_seats");
        assert_eq!(sanitize_name("2nd shift"), "_2nd_shift");
        assert_eq!(unique_names(&["a b".into(), "a-b".into()]), vec!["a_b", "a_b_2"]);
    }
}
