//! ClaimCheck: an LLM-guided fact-checking pipeline.
//!
//! A claim is planned into web searches, the retrieved articles are
//! summarized against the claim, the evidence is synthesized (possibly
//! triggering follow-up searches), and a final verdict is produced from a
//! fixed set of four labels. Every step is recorded in a
//! [`FactCheckReport`].

pub mod actions;
pub mod backend;
pub mod domain;
pub mod error;
pub mod eval;
pub mod llm;
pub mod pipeline;
pub mod prompts;
pub mod report;
pub mod retrieval;
pub mod service;

pub use domain::{
    Claim, FactCheckReport, GenerationSettings, Judgement, LlmStage, PipelineConfig, Stage, ThinkMatrix, Verdict,
};
pub use pipeline::{extract_judgement, Pipeline, ProgressEvent, RunOutput};
pub use report::report_to_markdown;
