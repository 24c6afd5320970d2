use std::sync::Mutex;
use std::time::Duration;

use async_trait::async_trait;

use super::{response_from_raw, LanguageModel, LlmRequest, LlmResponse, ThinkDelimiters};
use crate::domain::LlmStage;
use crate::error::LlmError;

/// A call observed by [`ScriptedLlm`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallRecord {
    pub stage: LlmStage,
    pub think: bool,
    pub prompt: String,
}

type Handler = dyn Fn(&LlmRequest, usize) -> Result<String, LlmError> + Send + Sync;

/// Test double that answers from a closure and logs every call.
///
/// The closure receives the request and the number of earlier calls for the
/// same stage, so scripts can vary their answer across iterations.
pub struct ScriptedLlm {
    handler: Box<Handler>,
    log: Mutex<Vec<CallRecord>>,
}

impl ScriptedLlm {
    pub fn new<F>(handler: F) -> Self
    where
        F: Fn(&LlmRequest, usize) -> Result<String, LlmError> + Send + Sync + 'static,
    {
        Self {
            handler: Box::new(handler),
            log: Mutex::new(Vec::new()),
        }
    }

    /// Canned answers per stage, ignoring the prompt.
    pub fn fixed(planning: &str, summary: &str, synthesis: &str, evaluation: &str) -> Self {
        let answers = [planning, summary, synthesis, evaluation].map(str::to_string);
        Self::new(move |req, _| Ok(answers[req.stage as usize].clone()))
    }

    /// Offline stand-in used for dry runs: searches for the claim itself,
    /// keeps the first sentence of each article, never asks for more
    /// evidence, and always concludes `Not Enough Evidence`.
    pub fn offline() -> Self {
        Self::new(|req, _| {
            Ok(match req.stage {
                LlmStage::Planning => {
                    let claim = req
                        .prompt
                        .lines()
                        .rev()
                        .find_map(|l| l.strip_prefix("Claim: "))
                        .unwrap_or("claim")
                        .replace('"', "'");
                    format!("```\nweb_search(\"{claim}\")\n```")
                }
                LlmStage::Summarization => {
                    let body = req
                        .prompt
                        .split_once("\nEvidence:\n")
                        .and_then(|(_, rest)| rest.split_once('\n'))
                        .map(|(_, rest)| rest.split("\n\nRecord:\n").next().unwrap_or(""))
                        .unwrap_or("");
                    match crate::domain::split_sentences(body).first() {
                        Some(first) => first.to_string(),
                        None => "NONE".to_string(),
                    }
                }
                LlmStage::Synthesis => "The recorded evidence was reviewed.".to_string(),
                LlmStage::Evaluation => "No decisive evidence was assessed offline. `Not Enough Evidence`".to_string(),
            })
        })
    }

    pub fn calls(&self) -> Vec<CallRecord> {
        self.log.lock().expect("log lock").clone()
    }

    pub fn call_count(&self) -> usize {
        self.log.lock().expect("log lock").len()
    }
}

#[async_trait]
impl LanguageModel for ScriptedLlm {
    async fn complete(&self, request: &LlmRequest) -> Result<LlmResponse, LlmError> {
        let prior = {
            let mut log = self.log.lock().expect("log lock");
            let prior = log.iter().filter(|c| c.stage == request.stage).count();
            log.push(CallRecord {
                stage: request.stage,
                think: request.settings.think,
                prompt: request.prompt.clone(),
            });
            prior
        };
        let raw = (self.handler)(request, prior)?;
        Ok(response_from_raw(
            &raw,
            None,
            &ThinkDelimiters::default(),
            None,
            Duration::ZERO,
        ))
    }
}
