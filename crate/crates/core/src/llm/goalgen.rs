use super::backend::{CompletionParams, LlmBackend, LlmError};
use super::parse::{parse_distance, parse_place_lines, ParseError};
use super::prompt::{default_vocab, object_name, render_distance_prompt, render_symbolic_prompt, PhraseTable, DEFAULT_NOTES};
use crate::logic::{check_consistency, ConsistencyReport, RelationAtom, RelationKind, RelationSet};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalGenParams {
    pub max_attempts: u32,
    pub distance_retries: u32,
    pub notes: String,
    pub examples: Vec<String>,
    pub completion: CompletionParams,
}

impl Default for GoalGenParams {
    fn default() -> Self {
        Self {
            max_attempts: 5,
            distance_retries: 3,
            notes: DEFAULT_NOTES.to_string(),
            examples: Vec::new(),
            completion: CompletionParams::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GoalGenError {
    #[error(transparent)]
    Backend(#[from] LlmError),
    #[error("max_attempts must be at least 1")]
    NoAttempts,
    #[error("no consistent goal after {attempts} attempts; last problem: {last_error}")]
    Exhausted {
        attempts: u32,
        last_error: String,
        last_report: Option<ConsistencyReport>,
    },
    #[error("no distance for '{atom}' after {attempts} attempts: {source}")]
    Distance { atom: String, attempts: u32, source: ParseError },
}

/// A consistent symbolic goal and where it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicGoal {
    pub objects: Vec<String>,
    pub relations: RelationSet,
    pub raw_text: String,
    pub attempts: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceSuggestion {
    pub atom: RelationAtom,
    pub distance_cm: f64,
    pub raw_text: String,
}

pub const MIN_DISTANCE_CM: f64 = 1.0;
pub const MAX_DISTANCE_CM: f64 = 100.0;

/// Atoms that get a distance query: binary ones other than stacking.
pub fn needs_distance(atom: &RelationAtom) -> bool {
    !atom.kind.is_unary() && atom.kind != RelationKind::OnTopOf
}

fn subjects_cover(rels: &RelationSet, objects: &[String]) -> Result<(), String> {
    for o in objects {
        let n = rels.iter().filter(|a| a.subject == *o).count();
        if n != 1 {
            return Err(format!("object '{o}' is the subject of {n} instructions, expected exactly 1"));
        }
    }
    Ok(())
}

/// The symbolic-goal prompt for a set of object ids.
pub fn symbolic_prompt_for(objects: &[String], params: &GoalGenParams) -> String {
    let names: Vec<String> = objects.iter().map(|o| object_name(o)).collect();
    render_symbolic_prompt(&names, &default_vocab(PhraseTable::builtin()), &params.examples, &params.notes)
}

/// Ask the model with the same prompt until a reply parses, is consistent and
/// names every object exactly once as a subject.
pub fn generate_symbolic_goal(
    objects: &[String],
    backend: &dyn LlmBackend,
    params: &GoalGenParams,
) -> Result<SymbolicGoal, GoalGenError> {
    if params.max_attempts == 0 {
        return Err(GoalGenError::NoAttempts);
    }
    let prompt = symbolic_prompt_for(objects, params);
    let table = PhraseTable::builtin();
    let mut last_error = String::new();
    let mut last_report = None;
    for attempt in 0..params.max_attempts {
        let reply = backend.complete(&prompt, &params.completion.with_attempt(attempt))?;
        let rels = match parse_place_lines(&reply, objects, table) {
            Ok(r) => r,
            Err(e) => {
                log::debug!("attempt {attempt}: {e}");
                last_error = e.to_string();
                continue;
            }
        };
        let report = check_consistency(&rels, objects).expect("parser only yields declared objects");
        if !report.is_consistent() {
            last_error = format!(
                "inconsistent relations: {}",
                report.conflict().unwrap().iter().map(|i| rels.atoms()[*i].to_string()).collect::<Vec<_>>().join("; ")
            );
            last_report = Some(report);
            continue;
        }
        if let Err(e) = subjects_cover(&rels, objects) {
            last_error = e;
            last_report = Some(report);
            continue;
        }
        return Ok(SymbolicGoal { objects: objects.to_vec(), relations: rels, raw_text: reply, attempts: attempt + 1 });
    }
    Err(GoalGenError::Exhausted { attempts: params.max_attempts, last_error, last_report })
}

/// One distance per atom that needs one, clamped to `[1, 100]` cm.
pub fn generate_distances(
    goal: &SymbolicGoal,
    backend: &dyn LlmBackend,
    params: &GoalGenParams,
) -> Result<Vec<DistanceSuggestion>, GoalGenError> {
    let table = PhraseTable::builtin();
    let mut out = Vec::new();
    for atom in goal.relations.iter().filter(|a| needs_distance(a)) {
        let prompt = render_distance_prompt(atom, table);
        let tries = params.distance_retries.max(1);
        let mut last = ParseError::NoDistanceKeyword;
        let mut found = None;
        for attempt in 0..tries {
            let reply = backend.complete(&prompt, &params.completion.with_attempt(attempt))?;
            match parse_distance(&reply) {
                Ok(d) => {
                    found = Some((d.clamp(MIN_DISTANCE_CM, MAX_DISTANCE_CM), reply));
                    break;
                }
                Err(e) => last = e,
            }
        }
        match found {
            Some((distance_cm, raw_text)) => out.push(DistanceSuggestion { atom: atom.clone(), distance_cm, raw_text }),
            None => return Err(GoalGenError::Distance { atom: atom.to_string(), attempts: tries, source: last }),
        }
    }
    Ok(out)
}
