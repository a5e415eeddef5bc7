use super::backend::{CompletionParams, LlmBackend, LlmError};
use serde::{Deserialize, Serialize};
use std::time::Duration;

pub const ENV_ENDPOINT: &str = "TABLETAMP_LLM_ENDPOINT";
pub const ENV_MODEL: &str = "TABLETAMP_LLM_MODEL";
pub const ENV_API_KEY: &str = "TABLETAMP_LLM_API_KEY";
pub const ENV_API_KEY_FALLBACK: &str = "OPENAI_API_KEY";
pub const ENV_TIMEOUT: &str = "TABLETAMP_LLM_TIMEOUT_SECS";

#[derive(Clone, Debug, PartialEq)]
pub struct HttpConfig {
    /// Base URL, e.g. `https://api.openai.com`.
    pub endpoint: String,
    pub model: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
}

impl HttpConfig {
    pub fn from_env() -> Result<Self, LlmError> {
        let endpoint = std::env::var(ENV_ENDPOINT).unwrap_or_else(|_| "https://api.openai.com".to_string());
        let model = std::env::var(ENV_MODEL).unwrap_or_else(|_| "gpt-3.5-turbo".to_string());
        let api_key = std::env::var(ENV_API_KEY).or_else(|_| std::env::var(ENV_API_KEY_FALLBACK)).ok();
        let timeout = match std::env::var(ENV_TIMEOUT) {
            Ok(s) => Duration::from_secs_f64(
                s.parse::<f64>().map_err(|_| LlmError::Config(format!("{ENV_TIMEOUT}={s} is not a number")))?,
            ),
            Err(_) => Duration::from_secs(60),
        };
        Ok(Self { endpoint, model, api_key, timeout })
    }
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<ChatMessage<'a>>,
    temperature: f64,
    top_p: f64,
    max_tokens: u32,
    frequency_penalty: f64,
    presence_penalty: f64,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ReplyMessage,
}

#[derive(Deserialize)]
struct ReplyMessage {
    content: Option<String>,
}

/// Client for an OpenAI-compatible `POST /v1/chat/completions` endpoint. One
/// request per call; retries are left to the caller.
pub struct HttpBackend {
    config: HttpConfig,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Result<Self, LlmError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| LlmError::Config(e.to_string()))?;
        Ok(Self { config, client })
    }

    pub fn url(&self) -> String {
        format!("{}/v1/chat/completions", self.config.endpoint.trim_end_matches('/'))
    }
}

impl LlmBackend for HttpBackend {
    fn complete(&self, prompt: &str, params: &CompletionParams) -> Result<String, LlmError> {
        let body = ChatRequest {
            model: &self.config.model,
            messages: vec![ChatMessage { role: "user", content: prompt }],
            temperature: params.temperature,
            top_p: params.top_p,
            max_tokens: params.max_tokens,
            frequency_penalty: params.frequency_penalty,
            presence_penalty: params.presence_penalty,
        };
        let mut req = self.client.post(self.url()).json(&body);
        if let Some(key) = &self.config.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| LlmError::Http(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            let text = resp.text().unwrap_or_default();
            return Err(LlmError::Http(format!("status {status}: {text}")));
        }
        let parsed: ChatResponse = resp.json().map_err(|e| LlmError::Http(format!("bad response body: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| LlmError::Http("response has no message content".into()))
    }
}
