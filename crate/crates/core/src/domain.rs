//! Shared domain types: claims, verdicts, queries, evidence and the
//! fact-checking report that every pipeline stage appends to.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::DomainError;

/// A statement under verification.
///
/// `claim_date` is the exclusive upper bound for admissible evidence
/// publication dates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claim_date: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speaker: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

impl Claim {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Result<Self, DomainError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(DomainError::EmptyClaim);
        }
        Ok(Self {
            id: id.into(),
            text,
            claim_date: None,
            speaker: None,
            origin: None,
        })
    }

    pub fn with_date(mut self, date: NaiveDate) -> Self {
        self.claim_date = Some(date);
        self
    }

    pub fn with_speaker(mut self, speaker: impl Into<String>) -> Self {
        self.speaker = Some(speaker.into());
        self
    }

    pub fn with_origin(mut self, origin: impl Into<String>) -> Self {
        self.origin = Some(origin.into());
        self
    }
}

/// The four verdict labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Supported,
    Refuted,
    ConflictingEvidence,
    NotEnoughEvidence,
}

impl Verdict {
    pub const ALL: [Verdict; 4] = [
        Verdict::Supported,
        Verdict::Refuted,
        Verdict::ConflictingEvidence,
        Verdict::NotEnoughEvidence,
    ];

    /// Display string used in prompts and datasets.
    pub fn surface(self) -> &'static str {
        match self {
            Verdict::Supported => "Supported",
            Verdict::Refuted => "Refuted",
            Verdict::ConflictingEvidence => "Conflicting Evidence/Cherrypicking",
            Verdict::NotEnoughEvidence => "Not Enough Evidence",
        }
    }

    pub fn identifier(self) -> &'static str {
        match self {
            Verdict::Supported => "Supported",
            Verdict::Refuted => "Refuted",
            Verdict::ConflictingEvidence => "ConflictingEvidence",
            Verdict::NotEnoughEvidence => "NotEnoughEvidence",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.surface())
    }
}

impl FromStr for Verdict {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_verdict_label(s)
    }
}

/// Parses a verdict label, ignoring case and surrounding whitespace.
///
/// The "/Cherrypicking" suffix of the conflicting label is optional, and the
/// PascalCase identifiers are accepted as well.
pub fn parse_verdict_label(raw: &str) -> Result<Verdict, DomainError> {
    let folded = collapse_whitespace(raw).to_lowercase();
    let verdict = match folded.as_str() {
        "supported" => Verdict::Supported,
        "refuted" => Verdict::Refuted,
        "conflicting evidence/cherrypicking"
        | "conflicting evidence / cherrypicking"
        | "conflicting evidence"
        | "conflictingevidence" => Verdict::ConflictingEvidence,
        "not enough evidence" | "notenoughevidence" => Verdict::NotEnoughEvidence,
        _ => return Err(DomainError::UnknownLabel(raw.to_string())),
    };
    Ok(verdict)
}

/// Which stage proposed a search query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum QueryOrigin {
    Planning,
    Synthesis,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchQuery {
    pub text: String,
    pub origin_stage: QueryOrigin,
    pub iteration: u32,
}

impl SearchQuery {
    pub fn new(text: impl Into<String>, origin_stage: QueryOrigin, iteration: u32) -> Result<Self, DomainError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(DomainError::EmptyQuery);
        }
        Ok(Self {
            text,
            origin_stage,
            iteration,
        })
    }

    /// Dedup key: lowercased with internal whitespace collapsed.
    pub fn normalized(&self) -> String {
        normalize_query(&self.text)
    }
}

pub fn normalize_query(text: &str) -> String {
    collapse_whitespace(text).to_lowercase()
}

pub(crate) fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub url: String,
    pub title: String,
    pub snippet: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub published_date: Option<NaiveDate>,
    pub rank: u32,
    /// Text of the query that produced this result.
    pub query: String,
    #[serde(default)]
    pub date_unknown: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceSummary {
    pub source_url: String,
    pub summary_text: String,
    pub relevant: bool,
    pub sentence_count: usize,
    /// The summary was cut down to the sentence budget.
    #[serde(default)]
    pub truncated: bool,
    /// The article had no known publication date but was admitted.
    #[serde(default)]
    pub date_unknown: bool,
    /// The search snippet was summarized because the page could not be fetched.
    #[serde(default)]
    pub from_snippet: bool,
}

impl EvidenceSummary {
    pub fn irrelevant(source_url: impl Into<String>) -> Self {
        Self {
            source_url: source_url.into(),
            summary_text: String::new(),
            relevant: false,
            sentence_count: 0,
            truncated: false,
            date_unknown: false,
            from_snippet: false,
        }
    }

    pub fn relevant(source_url: impl Into<String>, text: impl Into<String>) -> Self {
        let summary_text = text.into();
        let sentence_count = count_sentences(&summary_text).max(1);
        Self {
            source_url: source_url.into(),
            summary_text,
            relevant: true,
            sentence_count,
            truncated: false,
            date_unknown: false,
            from_snippet: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisOutcome {
    pub analysis_text: String,
    pub followup_queries: Vec<SearchQuery>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgement {
    pub verdict: Verdict,
    pub justification: String,
    pub raw_output: String,
}

/// Per-module reasoning switches, in pipeline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThinkMatrix {
    pub planning: bool,
    pub summarization: bool,
    pub synthesis: bool,
    pub evaluation: bool,
}

impl ThinkMatrix {
    pub const ALL: ThinkMatrix = ThinkMatrix::uniform(true);
    pub const NONE: ThinkMatrix = ThinkMatrix::uniform(false);

    pub const fn uniform(think: bool) -> Self {
        Self {
            planning: think,
            summarization: think,
            synthesis: think,
            evaluation: think,
        }
    }

    pub fn flags(&self) -> [bool; 4] {
        [self.planning, self.summarization, self.synthesis, self.evaluation]
    }

    pub fn from_flags(flags: [bool; 4]) -> Self {
        Self {
            planning: flags[0],
            summarization: flags[1],
            synthesis: flags[2],
            evaluation: flags[3],
        }
    }

    pub fn for_stage(&self, stage: LlmStage) -> bool {
        self.flags()[stage as usize]
    }

    /// Copy with the flag of one module inverted.
    pub fn flipped(&self, stage: LlmStage) -> Self {
        let mut flags = self.flags();
        flags[stage as usize] = !flags[stage as usize];
        Self::from_flags(flags)
    }

    /// Four-letter T/F vector, e.g. `TFTT`.
    pub fn vector(&self) -> String {
        self.flags().iter().map(|&f| if f { 'T' } else { 'F' }).collect()
    }
}

impl Default for ThinkMatrix {
    fn default() -> Self {
        Self::ALL
    }
}

impl FromStr for ThinkMatrix {
    type Err = DomainError;

    /// Accepts `all`, `none`, or a four-letter T/F vector.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => return Ok(Self::ALL),
            "none" => return Ok(Self::NONE),
            _ => {}
        }
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != 4 {
            return Err(DomainError::BadThinkVector(s.to_string()));
        }
        let mut flags = [false; 4];
        for (slot, c) in flags.iter_mut().zip(chars) {
            *slot = match c {
                'T' | 't' | '1' => true,
                'F' | 'f' | '0' => false,
                _ => return Err(DomainError::BadThinkVector(s.to_string())),
            };
        }
        Ok(Self::from_flags(flags))
    }
}

/// The four stages that call the language model, in pipeline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LlmStage {
    Planning = 0,
    Summarization = 1,
    Synthesis = 2,
    Evaluation = 3,
}

impl LlmStage {
    pub const ALL: [LlmStage; 4] = [
        LlmStage::Planning,
        LlmStage::Summarization,
        LlmStage::Synthesis,
        LlmStage::Evaluation,
    ];

    /// Row label used in ablation tables.
    pub fn module_name(self) -> &'static str {
        match self {
            LlmStage::Planning => "Planning",
            LlmStage::Summarization => "Evidence Summarization",
            LlmStage::Synthesis => "Evidence Synthesis",
            LlmStage::Evaluation => "Evaluation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSettings {
    pub temperature: f64,
    pub top_p: f64,
    pub max_output_tokens: u32,
    pub think: bool,
}

/// Sampling presets for the supported model families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenerationProfile {
    #[default]
    Qwen3,
    O4Mini,
}

impl GenerationProfile {
    pub fn settings(self) -> GenerationSettings {
        match self {
            GenerationProfile::Qwen3 => GenerationSettings {
                temperature: 0.6,
                top_p: 0.95,
                ..GenerationSettings::default()
            },
            GenerationProfile::O4Mini => GenerationSettings {
                temperature: 0.3,
                top_p: 1.0,
                ..GenerationSettings::default()
            },
        }
    }
}

impl FromStr for GenerationProfile {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qwen3" => Ok(Self::Qwen3),
            "o4-mini" | "o4mini" => Ok(Self::O4Mini),
            _ => Err(DomainError::BadProfile(s.to_string())),
        }
    }
}

impl Default for GenerationSettings {
    fn default() -> Self {
        Self {
            temperature: 0.6,
            top_p: 0.95,
            max_output_tokens: 4096,
            think: true,
        }
    }
}

impl GenerationSettings {
    pub fn validate(&self) -> Result<(), DomainError> {
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(DomainError::BadSettings("temperature must be >= 0".into()));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(DomainError::BadSettings("top_p must be in (0, 1]".into()));
        }
        if self.max_output_tokens == 0 {
            return Err(DomainError::BadSettings("max_output_tokens must be positive".into()));
        }
        Ok(())
    }

    pub fn with_think(&self, think: bool) -> Self {
        Self { think, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CutoffMode {
    #[default]
    Strict,
    Off,
}

impl FromStr for CutoffMode {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "strict" => Ok(Self::Strict),
            "off" => Ok(Self::Off),
            _ => Err(DomainError::BadCutoffMode(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub think_matrix: ThinkMatrix,
    pub max_iterations: u32,
    pub top_k: usize,
    pub cutoff_mode: CutoffMode,
    pub record_char_budget: usize,
    pub summary_sentence_budget: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            think_matrix: ThinkMatrix::ALL,
            max_iterations: 3,
            top_k: 3,
            cutoff_mode: CutoffMode::Strict,
            record_char_budget: 24_000,
            summary_sentence_budget: 5,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), DomainError> {
        if self.max_iterations == 0 {
            return Err(DomainError::BadConfig("max_iterations must be >= 1".into()));
        }
        if self.top_k == 0 {
            return Err(DomainError::BadConfig("top_k must be >= 1".into()));
        }
        if self.summary_sentence_budget == 0 {
            return Err(DomainError::BadConfig("summary_sentence_budget must be >= 1".into()));
        }
        if self.record_char_budget == 0 {
            return Err(DomainError::BadConfig("record_char_budget must be >= 1".into()));
        }
        Ok(())
    }
}

/// Progress stages, in emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    Planning,
    Executing,
    Summarizing,
    Synthesizing,
    Evaluating,
    Done,
    Failed,
}

impl Stage {
    pub fn is_terminal(self) -> bool {
        matches!(self, Stage::Done | Stage::Failed)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Auditable conditions recorded on a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ReportFlag {
    PlanningReprompted,
    EvaluationReprompted,
    /// No verdict could be parsed; NotEnoughEvidence was substituted.
    VerdictFallback,
    DateUnknownEvidence,
    SummaryTruncated,
    RecordElided,
    SearchError,
    /// Synthesis still wanted more evidence when the iteration bound was hit.
    IterationLimitReached,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunFailure {
    pub stage: Stage,
    pub message: String,
}

/// One retrieval round: the queries issued and everything derived from them.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Iteration {
    pub queries: Vec<SearchQuery>,
    pub results: Vec<SearchResult>,
    /// URLs fetched but rejected by the temporal cutoff.
    #[serde(default)]
    pub excluded_urls: Vec<String>,
    pub summaries: Vec<EvidenceSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthesis: Option<SynthesisOutcome>,
}

/// The append-only record of a pipeline run.
///
/// Iterations may only be appended, and nothing can change once a judgement
/// or a failure has been recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactCheckReport {
    claim: Claim,
    iterations: Vec<Iteration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    judgement: Option<Judgement>,
    /// Milliseconds spent per stage.
    stage_timings: BTreeMap<Stage, u64>,
    config_snapshot: PipelineConfig,
    #[serde(default)]
    flags: BTreeSet<ReportFlag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    failure: Option<RunFailure>,
}

impl FactCheckReport {
    pub fn new(claim: Claim, config: PipelineConfig) -> Self {
        Self {
            claim,
            iterations: Vec::new(),
            judgement: None,
            stage_timings: BTreeMap::new(),
            config_snapshot: config,
            flags: BTreeSet::new(),
            failure: None,
        }
    }

    pub fn claim(&self) -> &Claim {
        &self.claim
    }

    pub fn iterations(&self) -> &[Iteration] {
        &self.iterations
    }

    pub fn judgement(&self) -> Option<&Judgement> {
        self.judgement.as_ref()
    }

    pub fn stage_timings(&self) -> &BTreeMap<Stage, u64> {
        &self.stage_timings
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config_snapshot
    }

    pub fn flags(&self) -> &BTreeSet<ReportFlag> {
        &self.flags
    }

    pub fn has_flag(&self, flag: ReportFlag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn failure(&self) -> Option<&RunFailure> {
        self.failure.as_ref()
    }

    pub fn is_frozen(&self) -> bool {
        self.judgement.is_some() || self.failure.is_some()
    }

    /// All queries issued so far, across iterations.
    pub fn all_queries(&self) -> impl Iterator<Item = &SearchQuery> {
        self.iterations.iter().flat_map(|it| it.queries.iter())
    }

    fn ensure_open(&self) -> Result<(), DomainError> {
        if self.is_frozen() {
            Err(DomainError::ReportFrozen)
        } else {
            Ok(())
        }
    }

    pub fn push_iteration(&mut self, iteration: Iteration) -> Result<(), DomainError> {
        self.ensure_open()?;
        let max = self.config_snapshot.max_iterations as usize;
        if self.iterations.len() >= max {
            return Err(DomainError::TooManyIterations(max));
        }
        self.iterations.push(iteration);
        Ok(())
    }

    /// The latest iteration, for stages that fill it in.
    pub fn current_iteration_mut(&mut self) -> Result<&mut Iteration, DomainError> {
        self.ensure_open()?;
        self.iterations.last_mut().ok_or(DomainError::NoIteration)
    }

    pub fn add_flag(&mut self, flag: ReportFlag) -> Result<(), DomainError> {
        self.ensure_open()?;
        self.flags.insert(flag);
        Ok(())
    }

    pub fn add_timing(&mut self, stage: Stage, millis: u64) -> Result<(), DomainError> {
        self.ensure_open()?;
        *self.stage_timings.entry(stage).or_insert(0) += millis;
        Ok(())
    }

    pub fn finalize(&mut self, judgement: Judgement) -> Result<(), DomainError> {
        self.ensure_open()?;
        self.judgement = Some(judgement);
        Ok(())
    }

    pub fn fail(&mut self, failure: RunFailure) -> Result<(), DomainError> {
        self.ensure_open()?;
        self.failure = Some(failure);
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

/// Splits text into sentences.
///
/// A sentence ends at `.`, `!` or `?` followed by whitespace or the end of
/// the text; trailing text without a terminator counts as a sentence.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((idx, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let end = idx + c.len_utf8();
            let boundary = match chars.peek() {
                None => true,
                Some(&(_, next)) => next.is_whitespace(),
            };
            if boundary {
                let sentence = text[start..end].trim();
                if !sentence.is_empty() {
                    sentences.push(sentence);
                }
                start = end;
            }
        }
    }
    let rest = text[start..].trim();
    if !rest.is_empty() {
        sentences.push(rest);
    }
    sentences
}

pub fn count_sentences(text: &str) -> usize {
    split_sentences(text).len()
}
