use crate::logic::{RelationAtom, RelationKind};
use serde::Deserialize;
use std::sync::OnceLock;

const PHRASES_TOML: &str = include_str!("../../../../config/phrases.toml");

pub const DEFAULT_NOTES: &str =
    "Each action should be on a separate line starting with 'Place'. The answer cannot include other objects";

#[derive(Clone, Debug, Deserialize)]
pub struct Phrase {
    pub text: String,
    pub kind: RelationKind,
}

#[derive(Clone, Debug, Deserialize)]
pub struct PhraseTable {
    #[serde(rename = "phrase")]
    pub phrases: Vec<Phrase>,
}

impl PhraseTable {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// The table shipped in `config/phrases.toml`.
    pub fn builtin() -> &'static PhraseTable {
        static TABLE: OnceLock<PhraseTable> = OnceLock::new();
        TABLE.get_or_init(|| PhraseTable::from_toml(PHRASES_TOML).expect("builtin phrase table parses"))
    }

    /// First listed phrase for `kind`.
    pub fn canonical(&self, kind: RelationKind) -> &str {
        self.phrases
            .iter()
            .find(|p| p.kind == kind)
            .map(|p| p.text.as_str())
            .unwrap_or_else(|| kind.as_str())
    }
}

/// `a`, `a and b`, `a, b, and c`.
pub fn join_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [a, b] => format!("{a} and {b}"),
        [rest @ .., last] => format!("{}, and {last}", rest.join(", ")),
    }
}

fn sentence(s: &str) -> String {
    let t = s.trim().trim_end_matches('.');
    format!("{t}.")
}

/// Symbolic-goal prompt. Empty `examples` yields the zero-shot form, empty
/// `notes` drops the trailing sentence.
pub fn render_symbolic_prompt(objects: &[String], relations_vocab: &[String], examples: &[String], notes: &str) -> String {
    let mut out = format!(
        "The goal is to set a dining table with objects. The symbolic spatial relationship between objects includes {}.",
        relations_vocab.join(", ")
    );
    if !examples.is_empty() {
        out.push(' ');
        out.push_str(&sentence(&examples.join(" ")));
    }
    out.push_str(&format!(" What is a typical way of positioning {} on a table?", join_list(objects)));
    if !notes.trim().is_empty() {
        out.push(' ');
        out.push_str(&sentence(notes));
    }
    out
}

/// Phrases for every relation kind, as offered to the model.
pub fn default_vocab(table: &PhraseTable) -> Vec<String> {
    RelationKind::ALL.iter().map(|k| table.canonical(*k).to_string()).collect()
}

/// Display name for an object id.
pub fn object_name(id: &str) -> String {
    id.replace('_', " ")
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Distance prompt for a binary atom.
pub fn render_distance_prompt(atom: &RelationAtom, table: &PhraseTable) -> String {
    let a = object_name(&atom.subject);
    let b = object_name(&atom.reference.to_string());
    let rel = table.canonical(atom.kind);
    format!("{} is placed {rel} {b}. How many centimeters {rel} {b} should {a} be placed?", capitalize(&a))
}

/// Canonical "Place ..." line for an atom.
pub fn render_place_line(atom: &RelationAtom, table: &PhraseTable) -> String {
    let rel = table.canonical(atom.kind);
    match atom.reference_id() {
        Some(r) => format!("Place {} {rel} {}.", object_name(&atom.subject), object_name(r)),
        None => format!("Place {} {rel}.", object_name(&atom.subject)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn symbolic_prompt_shape() {
        let p = render_symbolic_prompt(
            &names(&["dinner plate", "dinner fork", "dinner knife"]),
            &default_vocab(PhraseTable::builtin()),
            &[],
            DEFAULT_NOTES,
        );
        assert!(p.contains("What is a typical way of positioning dinner plate, dinner fork, and dinner knife on a table?"));
        assert!(p.ends_with("The answer cannot include other objects."));
    }

    #[test]
    fn empty_notes_dropped() {
        let p = render_symbolic_prompt(&names(&["mug"]), &names(&["on top of"]), &[], "");
        assert!(p.ends_with("positioning mug on a table?"));
    }

    #[test]
    fn distance_prompt_shape() {
        let a = RelationAtom::new("dinner_fork", RelationKind::LeftOf, "dinner_plate");
        assert_eq!(
            render_distance_prompt(&a, PhraseTable::builtin()),
            "Dinner fork is placed to the left of dinner plate. How many centimeters to the left of dinner plate should dinner fork be placed?"
        );
    }

    #[test]
    fn every_kind_has_a_phrase() {
        let t = PhraseTable::builtin();
        for k in RelationKind::ALL {
            assert!(t.phrases.iter().any(|p| p.kind == k), "{k}");
        }
    }
}
