//! Language-model goal generation: prompts, backends and reply parsing.

pub mod backend;
pub mod goalgen;
pub mod http;
pub mod mock;
pub mod parse;
pub mod prompt;

pub use backend::{CompletionParams, LlmBackend, LlmError};
pub use goalgen::{
    generate_distances, generate_symbolic_goal, needs_distance, symbolic_prompt_for, DistanceSuggestion, GoalGenError,
    GoalGenParams, SymbolicGoal,
};
pub use http::{HttpBackend, HttpConfig};
pub use mock::{prompt_hash, ScriptEntry, ScriptFile, ScriptedMock};
pub use parse::{parse_distance, parse_place_line, parse_place_lines, ParseError};
pub use prompt::{
    default_vocab, render_distance_prompt, render_place_line, render_symbolic_prompt, PhraseTable, DEFAULT_NOTES,
};
