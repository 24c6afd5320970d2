use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("claim text is empty")]
    EmptyClaim,
    #[error("search query is empty")]
    EmptyQuery,
    #[error("unknown verdict label: {0:?}")]
    UnknownLabel(String),
    #[error("think vector must be `all`, `none` or four T/F letters, got {0:?}")]
    BadThinkVector(String),
    #[error("unknown generation profile {0:?}")]
    BadProfile(String),
    #[error("unknown cutoff mode {0:?}")]
    BadCutoffMode(String),
    #[error("invalid generation settings: {0}")]
    BadSettings(String),
    #[error("invalid pipeline config: {0}")]
    BadConfig(String),
    #[error("report is frozen")]
    ReportFrozen,
    #[error("report has no iteration yet")]
    NoIteration,
    #[error("report already holds the maximum of {0} iterations")]
    TooManyIterations(usize),
}

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("missing placeholder(s): {}", .0.join(", "))]
    MissingPlaceholder(Vec<String>),
    #[error("unknown placeholder(s): {}", .0.join(", "))]
    UnknownPlaceholder(Vec<String>),
    #[error("template {name} has placeholders {found:?}, expected {expected:?}")]
    TemplateShape {
        name: &'static str,
        found: Vec<String>,
        expected: Vec<String>,
    },
    #[error("invalid verdict rules: {0}")]
    InvalidRules(String),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LlmError {
    #[error("request timed out")]
    Timeout,
    #[error("endpoint returned HTTP {0}")]
    HttpStatus(u16),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("invalid endpoint configuration: {0}")]
    Config(String),
}

impl LlmError {
    pub fn is_retryable(&self) -> bool {
        match self {
            LlmError::Timeout | LlmError::MalformedResponse(_) | LlmError::Transport(_) => true,
            LlmError::HttpStatus(code) => *code == 429 || *code == 408 || *code >= 500,
            LlmError::Config(_) => false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("search provider returned status {0}")]
    ProviderError(u16),
    #[error("search quota exceeded")]
    QuotaExceeded,
    #[error("search transport error: {0}")]
    Transport(String),
    #[error("search provider configuration: {0}")]
    Config(String),
    #[error("fixture error: {0}")]
    Fixture(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error("planning output contains no web_search action")]
    NoActions,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JudgementError {
    #[error("no backtick-enclosed decision option found")]
    VerdictUnparseable,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("planning produced no usable query after a re-prompt")]
    PlanningFailed,
    #[error("language model unavailable: {0}")]
    LlmUnavailable(#[from] LlmError),
    #[error("prompt rendering failed: {0}")]
    Prompt(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot read dataset {path}: {source}")]
    FileUnreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("dataset schema mismatch at record {index:?}: {reason}")]
    SchemaMismatch { index: Option<usize>, reason: String },
    #[error("subset size {requested} out of range 1..={available}")]
    BadSize { requested: usize, available: usize },
    #[error("ablation base must be all-think or all-no-think, got {0}")]
    BadAblationBase(String),
    #[error(transparent)]
    Config(#[from] DomainError),
    #[error("writing {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid setting {name}: {reason}")]
    Config { name: &'static str, reason: String },
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("no search backend: set a Serper API key or a fixture directory")]
    NoSearchBackend,
}
