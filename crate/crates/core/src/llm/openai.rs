use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::Semaphore;
use url::Url;

use super::{response_from_raw, LanguageModel, LlmRequest, LlmResponse, ThinkDelimiters, TokenUsage};
use crate::domain::GenerationSettings;
use crate::error::LlmError;

/// How a disabled-thinking request is expressed to the endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoThinkMode {
    /// Append the `/no_think` soft switch to the user message.
    #[default]
    SoftSwitch,
    /// Send `"think": false` (Ollama-style request flag).
    ThinkFlag,
    /// Send `chat_template_kwargs.enable_thinking = false` (vLLM / SGLang).
    TemplateKwargs,
}

pub const SOFT_NO_THINK: &str = "/no_think";

#[derive(Clone, PartialEq, Eq)]
pub struct ApiKey(String);

impl ApiKey {
    pub fn new(key: impl Into<String>) -> Self {
        Self(key.into())
    }

    pub fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ApiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ApiKey(***)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackoffPolicy {
    pub base: Duration,
    pub max: Duration,
}

impl Default for BackoffPolicy {
    fn default() -> Self {
        Self {
            base: Duration::from_millis(500),
            max: Duration::from_secs(30),
        }
    }
}

impl BackoffPolicy {
    /// Delay before retry number `attempt` (0-based): base * 2^attempt, capped.
    pub fn delay(&self, attempt: u32) -> Duration {
        let factor = 1u32.checked_shl(attempt).unwrap_or(u32::MAX);
        self.base.saturating_mul(factor).min(self.max)
    }

    /// Sum of all delays for `retries` retries.
    pub fn total(&self, retries: u32) -> Duration {
        (0..retries).map(|a| self.delay(a)).sum()
    }
}

#[derive(Debug, Clone)]
pub struct LlmEndpointConfig {
    pub base_url: Url,
    pub model_name: String,
    pub api_key: Option<ApiKey>,
    pub settings: GenerationSettings,
    pub request_timeout: Duration,
    pub max_retries: u32,
    pub backoff: BackoffPolicy,
    pub no_think: NoThinkMode,
    pub delimiters: ThinkDelimiters,
    pub max_concurrency: usize,
}

pub const MAX_RETRIES_LIMIT: u32 = 5;

impl LlmEndpointConfig {
    pub fn new(base_url: &str, model_name: impl Into<String>) -> Result<Self, LlmError> {
        let base_url =
            Url::parse(base_url).map_err(|e| LlmError::Config(format!("invalid base url {base_url:?}: {e}")))?;
        Ok(Self {
            base_url,
            model_name: model_name.into(),
            api_key: None,
            settings: GenerationSettings::default(),
            request_timeout: Duration::from_secs(300),
            max_retries: 2,
            backoff: BackoffPolicy::default(),
            no_think: NoThinkMode::default(),
            delimiters: ThinkDelimiters::default(),
            max_concurrency: 4,
        })
    }

    /// Reads `LLM_BASE_URL`, `LLM_MODEL` and `LLM_API_KEY`, defaulting to a
    /// local Ollama server running `qwen3:4b`.
    pub fn from_env() -> Result<Self, LlmError> {
        let base = std::env::var("LLM_BASE_URL").unwrap_or_else(|_| "http://localhost:11434/v1".into());
        let model = std::env::var("LLM_MODEL").unwrap_or_else(|_| "qwen3:4b".into());
        let mut config = Self::new(&base, model)?;
        config.api_key = std::env::var("LLM_API_KEY")
            .ok()
            .filter(|k| !k.is_empty())
            .map(ApiKey::new);
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if !matches!(self.base_url.scheme(), "http" | "https") {
            return Err(LlmError::Config("base url must be http(s)".into()));
        }
        if self.max_retries > MAX_RETRIES_LIMIT {
            return Err(LlmError::Config(format!("max_retries must be <= {MAX_RETRIES_LIMIT}")));
        }
        if self.max_concurrency == 0 {
            return Err(LlmError::Config("max_concurrency must be >= 1".into()));
        }
        self.settings.validate().map_err(|e| LlmError::Config(e.to_string()))
    }

    fn completions_url(&self) -> Url {
        let mut base = self.base_url.clone();
        if !base.path().ends_with('/') {
            let path = format!("{}/", base.path());
            base.set_path(&path);
        }
        base.join("chat/completions").expect("relative join")
    }

    /// Worst-case wall time of one `complete` call, excluding queueing.
    pub fn worst_case_latency(&self) -> Duration {
        self.request_timeout * (self.max_retries + 1) + self.backoff.total(self.max_retries)
    }
}

/// Client for `POST {base_url}/chat/completions`.
pub struct OpenAiCompatClient {
    config: LlmEndpointConfig,
    http: reqwest::Client,
    permits: Arc<Semaphore>,
}

impl OpenAiCompatClient {
    pub fn new(config: LlmEndpointConfig) -> Result<Self, LlmError> {
        config.validate()?;
        let http = reqwest::Client::builder()
            .timeout(config.request_timeout)
            .build()
            .map_err(|e| LlmError::Config(e.to_string()))?;
        let permits = Arc::new(Semaphore::new(config.max_concurrency));
        Ok(Self { config, http, permits })
    }

    pub fn config(&self) -> &LlmEndpointConfig {
        &self.config
    }

    /// JSON body for one request.
    pub fn request_body(&self, prompt: &str, settings: &GenerationSettings) -> Value {
        let mut content = prompt.to_string();
        if !settings.think && self.config.no_think == NoThinkMode::SoftSwitch {
            content.push_str("\n\n");
            content.push_str(SOFT_NO_THINK);
        }
        let mut body = json!({
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": content}],
            "temperature": settings.temperature,
            "top_p": settings.top_p,
            "max_tokens": settings.max_output_tokens,
        });
        match self.config.no_think {
            NoThinkMode::SoftSwitch => {}
            NoThinkMode::ThinkFlag => {
                body["think"] = json!(settings.think);
            }
            NoThinkMode::TemplateKwargs => {
                body["chat_template_kwargs"] = json!({"enable_thinking": settings.think});
            }
        }
        body
    }

    async fn attempt(&self, body: &Value) -> Result<(String, Option<String>, Option<TokenUsage>), LlmError> {
        let mut req = self.http.post(self.config.completions_url()).json(body);
        if let Some(key) = &self.config.api_key {
            req = req.bearer_auth(key.expose());
        }
        let resp = req.send().await.map_err(map_transport)?;
        let status = resp.status();
        if !status.is_success() {
            return Err(LlmError::HttpStatus(status.as_u16()));
        }
        let value: Value = resp.json().await.map_err(|e| {
            if e.is_timeout() {
                LlmError::Timeout
            } else {
                LlmError::MalformedResponse(e.to_string())
            }
        })?;
        parse_completion(&value)
    }
}

fn map_transport(e: reqwest::Error) -> LlmError {
    if e.is_timeout() {
        LlmError::Timeout
    } else {
        LlmError::Transport(e.to_string())
    }
}

/// Extracts `(content, reasoning, usage)` from a chat-completions response.
pub(crate) fn parse_completion(value: &Value) -> Result<(String, Option<String>, Option<TokenUsage>), LlmError> {
    let message = value
        .get("choices")
        .and_then(|c| c.get(0))
        .and_then(|c| c.get("message"))
        .ok_or_else(|| LlmError::MalformedResponse("missing choices[0].message".into()))?;
    let content = match message.get("content") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Null) | None => String::new(),
        Some(other) => return Err(LlmError::MalformedResponse(format!("content is not a string: {other}"))),
    };
    let reasoning = ["reasoning_content", "reasoning"]
        .iter()
        .find_map(|k| message.get(*k).and_then(Value::as_str))
        .map(str::to_string);
    if content.is_empty() && reasoning.is_none() {
        return Err(LlmError::MalformedResponse("empty completion".into()));
    }
    let usage = value.get("usage").map(|u| TokenUsage {
        prompt: u.get("prompt_tokens").and_then(Value::as_u64).unwrap_or(0),
        completion: u.get("completion_tokens").and_then(Value::as_u64).unwrap_or(0),
    });
    Ok((content, reasoning, usage))
}

#[async_trait]
impl LanguageModel for OpenAiCompatClient {
    async fn complete(&self, request: &LlmRequest) -> Result<LlmResponse, LlmError> {
        if request.prompt.trim().is_empty() {
            return Err(LlmError::Config("prompt is empty".into()));
        }
        let _permit = self
            .permits
            .acquire()
            .await
            .map_err(|_| LlmError::Config("client closed".into()))?;
        let body = self.request_body(&request.prompt, &request.settings);
        let started = Instant::now();
        let mut attempt = 0;
        loop {
            match self.attempt(&body).await {
                Ok((content, reasoning, usage)) => {
                    return Ok(response_from_raw(
                        &content,
                        reasoning.as_deref(),
                        &self.config.delimiters,
                        usage,
                        started.elapsed(),
                    ))
                }
                Err(e) if e.is_retryable() && attempt < self.config.max_retries => {
                    let delay = self.config.backoff.delay(attempt);
                    tracing::warn!(error = %e, attempt, ?delay, "llm call failed, retrying");
                    tokio::time::sleep(delay).await;
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn client(mode: NoThinkMode) -> OpenAiCompatClient {
        let mut config = LlmEndpointConfig::new("http://localhost:1/v1", "qwen3:4b").unwrap();
        config.no_think = mode;
        OpenAiCompatClient::new(config).unwrap()
    }

    #[test]
    fn body_carries_sampling_settings() {
        let c = client(NoThinkMode::SoftSwitch);
        let body = c.request_body("hi", &GenerationSettings::default());
        assert_eq!(body["model"], "qwen3:4b");
        assert_eq!(body["temperature"], 0.6);
        assert_eq!(body["top_p"], 0.95);
        assert_eq!(body["max_tokens"], 4096);
        assert_eq!(body["messages"][0]["content"], "hi");
    }

    #[test]
    fn no_think_conventions() {
        let off = GenerationSettings::default().with_think(false);
        let soft = client(NoThinkMode::SoftSwitch).request_body("hi", &off);
        assert_eq!(soft["messages"][0]["content"], "hi\n\n/no_think");
        assert!(soft.get("think").is_none());
        let flag = client(NoThinkMode::ThinkFlag).request_body("hi", &off);
        assert_eq!(flag["think"], false);
        assert_eq!(flag["messages"][0]["content"], "hi");
        let kw = client(NoThinkMode::TemplateKwargs).request_body("hi", &off);
        assert_eq!(kw["chat_template_kwargs"]["enable_thinking"], false);
    }

    #[test]
    fn url_join_keeps_base_path() {
        let c = LlmEndpointConfig::new("http://h:8000/v1", "m").unwrap();
        assert_eq!(c.completions_url().as_str(), "http://h:8000/v1/chat/completions");
        let c = LlmEndpointConfig::new("http://h:8000/v1/", "m").unwrap();
        assert_eq!(c.completions_url().as_str(), "http://h:8000/v1/chat/completions");
    }

    #[test]
    fn config_validation() {
        let mut c = LlmEndpointConfig::new("http://h/v1", "m").unwrap();
        c.max_retries = 6;
        assert!(c.validate().is_err());
        assert!(LlmEndpointConfig::new("not a url", "m").is_err());
        let c = LlmEndpointConfig::new("ftp://h/v1", "m").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn backoff_doubles() {
        let b = BackoffPolicy {
            base: Duration::from_millis(100),
            max: Duration::from_millis(350),
        };
        assert_eq!(b.delay(0), Duration::from_millis(100));
        assert_eq!(b.delay(1), Duration::from_millis(200));
        assert_eq!(b.delay(2), Duration::from_millis(350));
        assert_eq!(b.total(2), Duration::from_millis(300));
    }

    #[test]
    fn parses_completion_shapes() {
        let v = json!({"choices":[{"message":{"content":"<think>a</think>b"}}],"usage":{"prompt_tokens":3,"completion_tokens":4}});
        let (content, reasoning, usage) = parse_completion(&v).unwrap();
        assert_eq!(content, "<think>a</think>b");
        assert_eq!(reasoning, None);
        assert_eq!(
            usage,
            Some(TokenUsage {
                prompt: 3,
                completion: 4
            })
        );
        let v = json!({"choices":[{"message":{"content":"x","reasoning_content":"r"}}]});
        assert_eq!(parse_completion(&v).unwrap().1.as_deref(), Some("r"));
        assert!(parse_completion(&json!({"choices":[]})).is_err());
        assert!(parse_completion(&json!({"choices":[{"message":{"content":null}}]})).is_err());
        assert!(parse_completion(&json!({"choices":[{"message":{"content":5}}]})).is_err());
    }

    #[test]
    fn api_key_is_redacted() {
        assert_eq!(format!("{:?}", ApiKey::new("sk-secret")), "ApiKey(***)");
    }
}
