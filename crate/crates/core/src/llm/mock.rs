use super::backend::{CompletionParams, LlmBackend, LlmError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

pub fn prompt_hash(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScriptEntry {
    pub prompt_hash: String,
    pub prompt: String,
    /// Reply per attempt; the last one repeats.
    pub replies: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScriptFile {
    #[serde(default, rename = "entry")]
    pub entries: Vec<ScriptEntry>,
}

impl ScriptFile {
    pub fn push(&mut self, prompt: &str, replies: Vec<String>) {
        self.entries.push(ScriptEntry { prompt_hash: prompt_hash(prompt), prompt: prompt.to_string(), replies });
    }
}

/// Replays canned replies keyed by the SHA-256 of the prompt.
#[derive(Clone, Debug, Default)]
pub struct ScriptedMock {
    replies: BTreeMap<String, Vec<String>>,
}

impl ScriptedMock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, prompt: &str, replies: Vec<String>) {
        self.replies.insert(prompt_hash(prompt), replies);
    }

    pub fn from_script(script: &ScriptFile, origin: &str) -> Result<Self, LlmError> {
        let mut m = Self::new();
        m.merge(script, origin)?;
        Ok(m)
    }

    pub fn from_file(path: &Path) -> Result<Self, LlmError> {
        let mut m = Self::new();
        m.load_file(path)?;
        Ok(m)
    }

    /// Every `*.toml` in `dir`, in file-name order.
    pub fn from_dir(dir: &Path) -> Result<Self, LlmError> {
        let err = |message: String| LlmError::Script { path: dir.display().to_string(), message };
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| err(e.to_string()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        paths.sort();
        let mut m = Self::new();
        for p in paths {
            m.load_file(&p)?;
        }
        Ok(m)
    }

    pub fn load_file(&mut self, path: &Path) -> Result<(), LlmError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| LlmError::Script { path: origin.clone(), message: e.to_string() })?;
        let script: ScriptFile =
            toml::from_str(&text).map_err(|e| LlmError::Script { path: origin.clone(), message: e.to_string() })?;
        self.merge(&script, &origin)
    }

    fn merge(&mut self, script: &ScriptFile, origin: &str) -> Result<(), LlmError> {
        let err = |message: String| LlmError::Script { path: origin.to_string(), message };
        for e in &script.entries {
            if prompt_hash(&e.prompt) != e.prompt_hash {
                return Err(err(format!("hash {} does not match its prompt", e.prompt_hash)));
            }
            if e.replies.is_empty() {
                return Err(err(format!("entry {} has no replies", e.prompt_hash)));
            }
            match self.replies.get(&e.prompt_hash) {
                Some(existing) if *existing != e.replies => {
                    return Err(err(format!("conflicting replies for {}", e.prompt_hash)))
                }
                _ => {
                    self.replies.insert(e.prompt_hash.clone(), e.replies.clone());
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.replies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replies.is_empty()
    }
}

impl LlmBackend for ScriptedMock {
    fn complete(&self, prompt: &str, params: &CompletionParams) -> Result<String, LlmError> {
        let h = prompt_hash(prompt);
        let replies = self.replies.get(&h).ok_or(LlmError::NoScript(h))?;
        let i = (params.attempt as usize).min(replies.len() - 1);
        Ok(replies[i].clone())
    }
}
