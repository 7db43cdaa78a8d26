//! Turning free-text replies back into numbers.

use std::sync::OnceLock;

use regex::Regex;

use crate::error::{Error, Result};

fn echo_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\b([A-F])\s*[-–:.)]\s*(?:Argument [AB]\b|The claim\b)").expect("valid regex"))
}

fn letter_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\b([A-F])\b").expect("valid regex"))
}

fn keyword_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)\b(?:answer|option|choice|response)\b\s*(?:is\s*)?[:\-]?\s*\(?([a-f])\)?(?:[^a-z]|$)")
            .expect("valid regex")
    })
}

fn number_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\d+(?:\.\d+)?").expect("valid regex"))
}

fn unparseable(text: &str) -> Error {
    Error::Unparseable { raw: text.to_string() }
}

/// Whether an uppercase letter at `start..start+1` reads as an answer
/// rather than part of "Argument A" or the article "A".
fn standalone(text: &str, start: usize) -> bool {
    let before = &text[..start];
    if before.ends_with("Argument ") || before.ends_with("argument ") {
        return false;
    }
    let after = &text[start + 1..];
    let mut rest = after.chars();
    if &text[start..start + 1] == "A" {
        if let (Some(' '), Some(c)) = (rest.next(), rest.next()) {
            if c.is_ascii_lowercase() {
                return false;
            }
        }
    }
    true
}

/// The final option letter in a reply, A → 1 … F → 6.
pub fn parse_choice(text: &str) -> Result<u8> {
    let trimmed = text.trim();
    if trimmed.len() == 1 {
        let c = trimmed.chars().next().expect("one char").to_ascii_uppercase();
        if ('A'..='F').contains(&c) {
            return Ok(c as u8 - b'A' + 1);
        }
    }
    let mut best: Option<(usize, char)> = None;
    let mut consider = |pos: usize, c: char| {
        if best.map_or(true, |(p, _)| pos >= p) {
            best = Some((pos, c.to_ascii_uppercase()));
        }
    };
    for cap in echo_re().captures_iter(text) {
        let m = cap.get(1).expect("group");
        consider(m.start(), m.as_str().chars().next().expect("letter"));
    }
    for m in letter_re().find_iter(text) {
        if standalone(text, m.start()) {
            consider(m.start(), m.as_str().chars().next().expect("letter"));
        }
    }
    for cap in keyword_re().captures_iter(text) {
        let m = cap.get(1).expect("group");
        consider(m.start(), m.as_str().chars().next().expect("letter"));
    }
    match best {
        Some((_, c)) => Ok(c as u8 - b'A' + 1),
        None => Err(unparseable(text)),
    }
}

/// The last number between 0 and 100 in a reply.
pub fn parse_rating(text: &str) -> Result<f64> {
    number_re()
        .find_iter(text)
        .filter_map(|m| m.as_str().parse::<f64>().ok())
        .filter(|v| (0.0..=100.0).contains(v))
        .last()
        .ok_or_else(|| unparseable(text))
}

fn scale_suffix_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)(?:out of|/)\s*20\b").expect("valid regex"))
}

/// The last number between 0 and 20 in a similarity reply, ignoring a
/// restated scale maximum ("15 out of 20", "12/20").
pub fn parse_similarity(text: &str) -> Result<f64> {
    let stripped = scale_suffix_re().replace_all(text, " ");
    number_re()
        .find_iter(&stripped)
        .filter_map(|m| m.as_str().parse::<f64>().ok())
        .filter(|v| (0.0..=20.0).contains(v))
        .last()
        .ok_or_else(|| unparseable(text))
}
