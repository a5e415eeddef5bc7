use super::prompt::PhraseTable;
use crate::logic::{LogicError, Reference, RelationAtom, RelationSet};
use regex::Regex;
use std::sync::OnceLock;

/// Any of these means the model should be asked again.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("reply has no line starting with 'Place'")]
    NoPlaceLines,
    #[error("unknown object '{name}' in line '{line}'")]
    UnknownObject { name: String, line: String },
    #[error("no known relation phrase in line '{0}'")]
    UnknownPhrase(String),
    #[error("line '{line}': {source}")]
    Relation { line: String, source: LogicError },
    #[error("no 'centimeter' in reply")]
    NoDistanceKeyword,
    #[error("no number before 'centimeter' in '{0}'")]
    NoDistanceNumber(String),
}

const ARTICLES: [&str; 3] = ["a", "an", "the"];

fn tokens(s: &str) -> Vec<String> {
    s.split_whitespace()
        .map(|t| t.trim_matches(|c: char| c == ',' || c == ';' || c == ':' || c == '"' || c == '*' || c == '_').to_lowercase())
        .filter(|t| !t.is_empty() && !ARTICLES.contains(&t.as_str()))
        .collect()
}

fn strip_list_marker(line: &str) -> &str {
    static MARKER: OnceLock<Regex> = OnceLock::new();
    let re = MARKER.get_or_init(|| Regex::new(r"^\s*(?:[-*\u{2022}]+|\d+[.)]|\(\d+\)|step\s*\d+[:.)]?)\s*").unwrap());
    match re.find(line) {
        Some(m) => &line[m.end()..],
        None => line,
    }
}

fn resolve(words: &[String], objects: &[String], line: &str) -> Result<String, ParseError> {
    let id = words.join("_");
    if objects.iter().any(|o| *o == id) {
        Ok(id)
    } else {
        Err(ParseError::UnknownObject { name: words.join(" "), line: line.to_string() })
    }
}

/// One `Place` line to an atom. The longest phrase wins; ties go to the
/// earliest position.
pub fn parse_place_line(line: &str, objects: &[String], table: &PhraseTable) -> Result<RelationAtom, ParseError> {
    let body = strip_list_marker(line).trim().trim_end_matches('.');
    let toks = tokens(body);
    if toks.first().map(String::as_str) != Some("place") {
        return Err(ParseError::UnknownPhrase(line.to_string()));
    }
    let rest = &toks[1..];
    let mut best: Option<(usize, usize, &super::prompt::Phrase)> = None;
    for p in &table.phrases {
        let pt = tokens(&p.text);
        if pt.is_empty() || pt.len() > rest.len() {
            continue;
        }
        for start in 0..=rest.len() - pt.len() {
            if rest[start..start + pt.len()] == pt[..] {
                let better = match best {
                    None => true,
                    Some((bs, bl, _)) => pt.len() > bl || (pt.len() == bl && start < bs),
                };
                if better {
                    best = Some((start, pt.len(), p));
                }
                break;
            }
        }
    }
    let (start, len, phrase) = best.ok_or_else(|| ParseError::UnknownPhrase(line.to_string()))?;
    let subject_words = &rest[..start];
    let reference_words = &rest[start + len..];
    if subject_words.is_empty() {
        return Err(ParseError::UnknownObject { name: String::new(), line: line.to_string() });
    }
    let subject = resolve(subject_words, objects, line)?;
    let reference = if phrase.kind.is_unary() {
        if !reference_words.is_empty() {
            return Err(ParseError::UnknownPhrase(line.to_string()));
        }
        Reference::Table
    } else {
        Reference::Object(resolve(reference_words, objects, line)?)
    };
    let atom = RelationAtom { subject, kind: phrase.kind, reference };
    atom.validate().map_err(|source| ParseError::Relation { line: line.to_string(), source })?;
    Ok(atom)
}

fn is_place_line(line: &str) -> bool {
    tokens(strip_list_marker(line)).first().is_some_and(|t| t == "place")
}

/// Every line that starts with "Place" (after any list marker), in order.
pub fn parse_place_lines(text: &str, objects: &[String], table: &PhraseTable) -> Result<RelationSet, ParseError> {
    let mut set = RelationSet::new();
    let mut any = false;
    for line in text.lines().filter(|l| is_place_line(l)) {
        any = true;
        let atom = parse_place_line(line, objects, table)?;
        set.push(atom).map_err(|source| ParseError::Relation { line: line.to_string(), source })?;
    }
    if !any {
        return Err(ParseError::NoPlaceLines);
    }
    Ok(set)
}

/// Number, or midpoint of a hyphenated range, right before the first
/// "centimeter".
pub fn parse_distance(text: &str) -> Result<f64, ParseError> {
    static NUM: OnceLock<Regex> = OnceLock::new();
    let lower = text.to_lowercase();
    let at = lower.find("centimet").ok_or(ParseError::NoDistanceKeyword)?;
    let before = &text[..at];
    let re = NUM.get_or_init(|| {
        Regex::new(r"(\d+(?:\.\d+)?)(?:\s*(?:-|\u{2013}|\u{2014}|to)\s*(\d+(?:\.\d+)?))?\s*$").unwrap()
    });
    let caps = re.captures(before).ok_or_else(|| ParseError::NoDistanceNumber(text.to_string()))?;
    let lo: f64 = caps[1].parse().map_err(|_| ParseError::NoDistanceNumber(text.to_string()))?;
    match caps.get(2) {
        Some(hi) => {
            let hi: f64 = hi.as_str().parse().map_err(|_| ParseError::NoDistanceNumber(text.to_string()))?;
            Ok(0.5 * (lo + hi))
        }
        None => Ok(lo),
    }
}
