//! Language-model access: the [`LanguageModel`] trait, an OpenAI-compatible
//! HTTP client, and a scripted double for deterministic runs.

mod openai;
mod scripted;

use std::fmt;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};

use crate::domain::{GenerationSettings, LlmStage};
use crate::error::LlmError;

pub use openai::{ApiKey, BackoffPolicy, LlmEndpointConfig, NoThinkMode, OpenAiCompatClient};
pub use scripted::{CallRecord, ScriptedLlm};

/// One completion request. `stage` identifies the calling pipeline module.
#[derive(Debug, Clone, PartialEq)]
pub struct LlmRequest {
    pub stage: LlmStage,
    pub prompt: String,
    pub settings: GenerationSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt: u64,
    pub completion: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LlmResponse {
    pub answer_text: String,
    pub thinking_text: String,
    pub token_usage: Option<TokenUsage>,
    pub latency: Duration,
}

#[async_trait]
pub trait LanguageModel: Send + Sync {
    async fn complete(&self, request: &LlmRequest) -> Result<LlmResponse, LlmError>;
}

#[async_trait]
impl<T: LanguageModel + ?Sized> LanguageModel for std::sync::Arc<T> {
    async fn complete(&self, request: &LlmRequest) -> Result<LlmResponse, LlmError> {
        (**self).complete(request).await
    }
}

/// Opening and closing markers of a reasoning block.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinkDelimiters {
    pub open: String,
    pub close: String,
}

impl Default for ThinkDelimiters {
    fn default() -> Self {
        Self {
            open: "<think>".into(),
            close: "</think>".into(),
        }
    }
}

impl fmt::Debug for ThinkDelimiters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.open, self.close)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ThinkingSplit {
    pub answer: String,
    pub thinking: String,
}

/// Separates the first reasoning block from the answer, without trimming.
///
/// An unterminated opening marker makes everything after it thinking. A
/// closing marker with no opening one (some servers drop the opening tag)
/// makes everything before it thinking.
pub fn strip_thinking(raw: &str) -> ThinkingSplit {
    strip_thinking_with(raw, &ThinkDelimiters::default())
}

pub fn strip_thinking_with(raw: &str, delims: &ThinkDelimiters) -> ThinkingSplit {
    let open_at = raw.find(&delims.open);
    let close_at = raw.find(&delims.close);
    match (open_at, close_at) {
        (Some(open), _) => {
            let body_start = open + delims.open.len();
            match raw[body_start..].find(&delims.close) {
                Some(rel) => {
                    let close = body_start + rel;
                    ThinkingSplit {
                        answer: format!("{}{}", &raw[..open], &raw[close + delims.close.len()..]),
                        thinking: raw[body_start..close].to_string(),
                    }
                }
                None => ThinkingSplit {
                    answer: raw[..open].to_string(),
                    thinking: raw[body_start..].to_string(),
                },
            }
        }
        (None, Some(close)) => ThinkingSplit {
            answer: raw[close + delims.close.len()..].to_string(),
            thinking: raw[..close].to_string(),
        },
        (None, None) => ThinkingSplit {
            answer: raw.to_string(),
            thinking: String::new(),
        },
    }
}

/// Builds a response from raw model text, trimming both parts.
pub(crate) fn response_from_raw(
    raw: &str,
    extra_thinking: Option<&str>,
    delims: &ThinkDelimiters,
    token_usage: Option<TokenUsage>,
    latency: Duration,
) -> LlmResponse {
    let split = strip_thinking_with(raw, delims);
    let mut thinking = split.thinking.trim().to_string();
    if let Some(extra) = extra_thinking.map(str::trim).filter(|t| !t.is_empty()) {
        thinking = if thinking.is_empty() {
            extra.to_string()
        } else {
            format!("{extra}\n{thinking}")
        };
    }
    LlmResponse {
        answer_text: split.answer.trim().to_string(),
        thinking_text: thinking,
        token_usage,
        latency,
    }
}
