//! Exact textual quantities.
//!
//! Word problems state numbers as numerals (`"400"`, `"0.55"`), with currency
//! (`"$10000"`), as percentages (`"55%"`) or as words (`"two"`). Everything is
//! parsed into an exact [`Rational`] so that downstream matching never depends
//! on float rounding.

use std::fmt;
use std::sync::LazyLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use regex::Regex;
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse quantity from {text:?}")]
pub struct UnparseableQuantity {
    pub text: String,
}

/// A number together with the text it was read from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantity {
    value: Rational,
    source_text: String,
}

impl Quantity {
    pub fn new(value: Rational, source_text: impl Into<String>) -> Self {
        Self { value, source_text: source_text.into() }
    }

    /// A quantity whose text is the canonical rendering of `value`.
    pub fn from_value(value: Rational) -> Self {
        let source_text = render_rational(&value);
        Self { value, source_text }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_value(Rational::from_integer(BigInt::from(n)))
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn source_text(&self) -> &str {
        &self.source_text
    }

    /// True when the source text was written as a percentage.
    pub fn is_percent(&self) -> bool {
        is_percent_text(&self.source_text)
    }

    /// Values this quantity may stand for when matched against other text:
    /// the value itself and, for percentages, the bare number as well.
    pub fn match_values(&self) -> Vec<Rational> {
        let mut out = vec![self.value.clone()];
        if self.is_percent() {
            out.push(&self.value * Rational::from_integer(BigInt::from(100)));
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.value)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source_text)
    }
}

fn is_percent_text(text: &str) -> bool {
    let t = text.trim().to_ascii_lowercase();
    t.ends_with('%') || t.ends_with("percent") || t.ends_with("per cent")
}

const UNITS: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen",
];
const TENS: [&str; 10] =
    ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"];

/// Number words from zero to one hundred.
pub fn number_word_value(word: &str) -> Option<u32> {
    let w = word.trim().to_ascii_lowercase();
    let w = w.split_whitespace().collect::<Vec<_>>().join(" ");
    if w == "hundred" || w == "one hundred" || w == "a hundred" {
        return Some(100);
    }
    if let Some(i) = UNITS.iter().position(|u| *u == w) {
        return Some(i as u32);
    }
    if let Some(i) = TENS.iter().position(|t| !t.is_empty() && *t == w) {
        return Some(10 * i as u32);
    }
    let (tens, unit) = w.split_once(['-', ' '])?;
    let t = TENS.iter().position(|t| !t.is_empty() && *t == tens)?;
    let u = UNITS[1..10].iter().position(|u| *u == unit)? + 1;
    Some((10 * t + u) as u32)
}

/// English words for 0..=100, hyphenating compounds ("twenty-five").
pub fn number_to_words(n: u32) -> Option<String> {
    match n {
        0..=19 => Some(UNITS[n as usize].to_string()),
        20..=99 if n.is_multiple_of(10) => Some(TENS[(n / 10) as usize].to_string()),
        20..=99 => Some(format!("{}-{}", TENS[(n / 10) as usize], UNITS[(n % 10) as usize])),
        100 => Some("one hundred".to_string()),
        _ => None,
    }
}

static NUMERAL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^([+-]?)(\d+(?:,\d{3})*|\d*)(?:\.(\d+))?$").expect("numeral regex")
});

fn parse_numeral(s: &str) -> Option<Rational> {
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_numeral(num.trim())?;
        let den = parse_numeral(den.trim())?;
        if den.is_zero() {
            return None;
        }
        return Some(num / den);
    }
    let caps = NUMERAL.captures(s)?;
    let int_part = caps.get(2).map_or("", |m| m.as_str()).replace(',', "");
    let frac_part = caps.get(3).map_or("", |m| m.as_str());
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let mut r = Rational::new(numer, denom);
    if caps.get(1).is_some_and(|m| m.as_str() == "-") {
        r = -r;
    }
    Some(r)
}

/// Parses a numeral, number word, percentage or currency amount.
pub fn parse_quantity(text: &str) -> Result<Quantity, UnparseableQuantity> {
    parse_value(text)
        .map(|value| Quantity::new(value, text.trim()))
        .ok_or_else(|| UnparseableQuantity { text: text.to_string() })
}

fn parse_value(text: &str) -> Option<Rational> {
    let mut t = text.trim().to_ascii_lowercase();
    if t.is_empty() {
        return None;
    }
    let mut percent = false;
    for suffix in ["%", "per cent", "percent"] {
        if let Some(rest) = t.strip_suffix(suffix) {
            t = rest.trim_end().to_string();
            percent = true;
            break;
        }
    }
    let t = t
        .trim_start_matches(['$', '€', '£', '¥'])
        .trim_start_matches("usd")
        .trim();
    // "-$5" style
    let t = t.replacen("-$", "-", 1);
    let value = match parse_numeral(&t) {
        Some(v) => v,
        None => Rational::from_integer(BigInt::from(number_word_value(&t)?)),
    };
    Some(if percent { value / Rational::from_integer(BigInt::from(100)) } else { value })
}

/// A number found inside free text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextNumber {
    pub value: Rational,
    pub percent: bool,
}

impl TextNumber {
    /// Values this mention may stand for: `p` and, for percentages, `p/100`.
    pub fn match_values(&self) -> Vec<Rational> {
        if self.percent {
            vec![self.value.clone(), &self.value / Rational::from_integer(BigInt::from(100))]
        } else {
            vec![self.value.clone()]
        }
    }
}

static TEXT_NUMERAL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)[$€£]?\s?(\d+(?:,\d{3})*(?:\.\d+)?|\.\d+)(\s?(?:%|percent\b|per cent\b))?")
        .expect("text numeral regex")
});

static TEXT_WORD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b[a-z]+(?:-[a-z]+)?\b").expect("word regex"));

/// Every number mentioned in `text`. Percent mentions record the bare
/// number (`55` for "55%").
pub fn extract_numbers(text: &str) -> Vec<TextNumber> {
    let mut out = Vec::new();
    for caps in TEXT_NUMERAL.captures_iter(text) {
        let digits = caps[1].replace(',', "");
        if let Some(value) = parse_numeral(&digits) {
            out.push(TextNumber { value, percent: caps.get(2).is_some() });
        }
    }
    let words: Vec<_> = TEXT_WORD.find_iter(text).collect();
    let mut i = 0;
    while i < words.len() {
        let w = words[i].as_str().to_ascii_lowercase();
        // "one hundred" / "a hundred"
        if (w == "one" || w == "a")
            && words.get(i + 1).is_some_and(|n| n.as_str().eq_ignore_ascii_case("hundred"))
        {
            out.push(word_number(100, text, words[i + 1].end()));
            i += 2;
            continue;
        }
        if TENS.contains(&w.as_str())
            && !w.is_empty()
            && let Some(next) = words.get(i + 1)
            && text[words[i].end()..next.start()].trim().is_empty()
            && let Some(v) = number_word_value(&format!("{w} {}", next.as_str()))
        {
            out.push(word_number(v, text, next.end()));
            i += 2;
            continue;
        }
        if let Some(v) = number_word_value(&w)
            && w != "a" {
                out.push(word_number(v, text, words[i].end()));
            }
        i += 1;
    }
    out
}

fn word_number(v: u32, text: &str, end: usize) -> TextNumber {
    let rest = text[end..].trim_start().to_ascii_lowercase();
    let percent = rest.starts_with('%') || rest.starts_with("percent") || rest.starts_with("per cent");
    TextNumber { value: Rational::from_integer(BigInt::from(v)), percent }
}

/// True when the denominator has no prime factors other than 2 and 5.
pub fn is_terminating(r: &Rational) -> bool {
    let mut d = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while d.is_even() {
        d /= &two;
    }
    while (&d % &five).is_zero() {
        d /= &five;
    }
    d.is_one()
}

/// Exact decimal rendering, if `r` has a terminating expansion.
pub fn format_decimal(r: &Rational) -> Option<String> {
    if !is_terminating(r) {
        return None;
    }
    if r.is_integer() {
        return Some(r.to_integer().to_string());
    }
    let mut places = 0u32;
    let ten = BigInt::from(10);
    let mut scaled = r.abs();
    while !scaled.is_integer() {
        scaled *= Rational::from_integer(ten.clone());
        places += 1;
    }
    let digits = scaled.to_integer().to_string();
    let places = places as usize;
    let padded = if digits.len() <= places {
        format!("{}{}", "0".repeat(places - digits.len() + 1), digits)
    } else {
        digits
    };
    let (int, frac) = padded.split_at(padded.len() - places);
    let sign = if r.is_negative() { "-" } else { "" };
    Some(format!("{sign}{int}.{frac}"))
}

/// Decimal when terminating, otherwise `p/q`.
pub fn render_rational(r: &Rational) -> String {
    format_decimal(r).unwrap_or_else(|| format!("{}/{}", r.numer(), r.denom()))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rounds `x` to `places` decimal digits and returns the exact rational.
pub fn round_to_places(x: f64, places: u32) -> Rational {
    let scale = 10f64.powi(places as i32);
    let n = (x * scale).round();
    Rational::new(BigInt::from(n as i64), BigInt::from(10u64.pow(places)))
}

/// Number of decimal places in the canonical rendering of `r`.
pub fn decimal_places(r: &Rational) -> Option<u32> {
    let s = format_decimal(r)?;
    Some(s.split_once('.').map_or(0, |(_, f)| f.len() as u32))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_quantity(s).unwrap().value().clone()
    }

    #[test]
    fn numerals_words_percent_currency() {
        assert_eq!(q("two"), int(2));
        assert_eq!(q("0.55"), ratio(11, 20));
        assert_eq!(q("$10000"), int(10000));
        assert_eq!(q("55%"), ratio(11, 20));
        assert_eq!(q("55 percent"), ratio(11, 20));
        assert_eq!(q("10,000"), int(10000));
        assert_eq!(q("twenty-five"), int(25));
        assert_eq!(q("Forty two"), int(42));
        assert_eq!(q("one hundred"), int(100));
        assert_eq!(q("3/4"), ratio(3, 4));
        assert_eq!(q(".5"), ratio(1, 2));
        assert_eq!(q("-3"), int(-3));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_quantity("").is_err());
        assert!(parse_quantity("many").is_err());
        assert!(parse_quantity("1/0").is_err());
        assert!(parse_quantity("1.2.3").is_err());
        assert!(parse_quantity("hundred and one").is_err());
    }

    #[test]
    fn words_round_trip() {
        for n in 0..=100 {
            let w = number_to_words(n).unwrap();
            assert_eq!(number_word_value(&w), Some(n), "{w}");
        }
    }

    #[test]
    fn percent_match_values() {
        let p = parse_quantity("55%").unwrap();
        assert_eq!(p.match_values(), vec![ratio(11, 20), int(55)]);
        let plain = parse_quantity("0.55").unwrap();
        assert_eq!(plain.match_values(), vec![ratio(11, 20)]);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(&ratio(11, 20)).as_deref(), Some("0.55"));
        assert_eq!(format_decimal(&ratio(-1, 8)).as_deref(), Some("-0.125"));
        assert_eq!(format_decimal(&ratio(1, 100)).as_deref(), Some("0.01"));
        assert_eq!(format_decimal(&ratio(1, 3)), None);
        assert_eq!(render_rational(&ratio(1, 3)), "1/3");
        assert_eq!(render_rational(&int(400)), "400");
        assert_eq!(decimal_places(&ratio(11, 20)), Some(2));
    }

    #[test]
    fn numbers_in_text() {
        let found = extract_numbers(
            "A budget of $10,000, at least 55% rafts, two types and twenty five boxes.",
        );
        let vals: Vec<_> = found.iter().map(|n| (n.value.clone(), n.percent)).collect();
        assert!(vals.contains(&(int(10000), false)));
        assert!(vals.contains(&(int(55), true)));
        assert!(vals.contains(&(int(2), false)));
        assert!(vals.contains(&(int(25), false)));
    }
}
