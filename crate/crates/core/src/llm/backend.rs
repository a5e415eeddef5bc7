use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("no scripted reply for prompt hash {0}")]
    NoScript(String),
    #[error("mock script {path}: {message}")]
    Script { path: String, message: String },
    #[error("http backend: {0}")]
    Http(String),
    #[error("http backend configuration: {0}")]
    Config(String),
}

/// Sampling hyperparameters sent with each request. `attempt` is the zero-based
/// retry index; it is not sent over the wire and only lets scripted backends
/// vary their reply.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletionParams {
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    pub frequency_penalty: f64,
    pub presence_penalty: f64,
    #[serde(skip)]
    pub attempt: u32,
}

impl Default for CompletionParams {
    fn default() -> Self {
        Self {
            temperature: 0.1,
            top_p: 1.0,
            max_tokens: 512,
            frequency_penalty: 0.0,
            presence_penalty: 0.0,
            attempt: 0,
        }
    }
}

impl CompletionParams {
    pub fn with_attempt(&self, attempt: u32) -> Self {
        Self { attempt, ..self.clone() }
    }
}

pub trait LlmBackend: Send + Sync {
    fn complete(&self, prompt: &str, params: &CompletionParams) -> Result<String, LlmError>;
}

impl<T: LlmBackend + ?Sized> LlmBackend for &T {
    fn complete(&self, prompt: &str, params: &CompletionParams) -> Result<String, LlmError> {
        (**self).complete(prompt, params)
    }
}

impl<T: LlmBackend + ?Sized> LlmBackend for Box<T> {
    fn complete(&self, prompt: &str, params: &CompletionParams) -> Result<String, LlmError> {
        (**self).complete(prompt, params)
    }
}
