//! The fact-checking loop: planning, execution, summarization, synthesis
//! with bounded re-retrieval, and evaluation.
//!
//! ```text
//! plan ──▶ execute ──▶ summarize ──▶ synthesize ──▶ evaluate
//!              ▲                          │
//!              └──── follow-up queries ───┘   (at most max_iterations rounds)
//! ```
//!
//! Every intermediate product is appended to the [`FactCheckReport`], and a
//! [`ProgressEvent`] is emitted as each stage completes.

use std::collections::HashSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use futures::stream::{self, StreamExt};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::mpsc::UnboundedSender;

use crate::actions::{parse_actions, strip_fenced_blocks};
use crate::domain::{
    parse_verdict_label, split_sentences, Claim, EvidenceSummary, FactCheckReport, GenerationSettings, Iteration,
    Judgement, LlmStage, PipelineConfig, QueryOrigin, ReportFlag, RunFailure, SearchQuery, SearchResult, Stage,
    SynthesisOutcome, Verdict,
};
use crate::error::{ActionError, JudgementError, PipelineError};
use crate::llm::{LanguageModel, LlmRequest, LlmResponse};
use crate::prompts::{render_record_with_budget, PromptKit};
use crate::retrieval::{admit_evidence, search, FetchLimits, FetchStatus, PageFetcher, SearchProvider};

/// Appended to the planning prompt when the first answer held no action.
pub const PLANNING_REMINDER: &str = "\n\nReminder: answer with at least one action of the form web_search(\"your query\") inside a single Markdown code block.";

/// Appended to the evaluation prompt when no verdict could be parsed.
pub const EVALUATION_REMINDER: &str = "\n\nReminder: end your answer with exactly one of the Decision Options enclosed in backticks, for example `Refuted`.";

const PREVIEW_CHARS: usize = 280;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgressEvent {
    pub run_id: String,
    /// 1-based, strictly increasing within a run.
    pub seq: u64,
    pub stage: Stage,
    pub iteration: u32,
    pub payload: Value,
}

/// Source of elapsed time for stage timings.
pub trait Clock: Send + Sync {
    fn elapsed(&self) -> Duration;
}

pub struct SystemClock(Instant);

impl Default for SystemClock {
    fn default() -> Self {
        Self(Instant::now())
    }
}

impl Clock for SystemClock {
    fn elapsed(&self) -> Duration {
        self.0.elapsed()
    }
}

/// Always reports zero elapsed time; makes reports byte-reproducible.
pub struct FrozenClock;

impl Clock for FrozenClock {
    fn elapsed(&self) -> Duration {
        Duration::ZERO
    }
}

struct Emitter<'a> {
    run_id: &'a str,
    seq: u64,
    sink: Option<&'a UnboundedSender<ProgressEvent>>,
    log: Vec<ProgressEvent>,
    current: Stage,
    iteration: u32,
}

impl Emitter<'_> {
    fn emit(&mut self, stage: Stage, payload: Value) {
        self.seq += 1;
        let event = ProgressEvent {
            run_id: self.run_id.to_string(),
            seq: self.seq,
            stage,
            iteration: self.iteration,
            payload,
        };
        if let Some(sink) = self.sink {
            let _ = sink.send(event.clone());
        }
        self.log.push(event);
    }
}

/// A finished run: the frozen report and every event emitted.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: FactCheckReport,
    pub events: Vec<ProgressEvent>,
}

pub struct Pipeline {
    llm: Arc<dyn LanguageModel>,
    search: Arc<dyn SearchProvider>,
    fetcher: Arc<dyn PageFetcher>,
    prompts: Arc<PromptKit>,
    generation: GenerationSettings,
    fetch_limits: FetchLimits,
    clock: Arc<dyn Clock>,
    summary_concurrency: usize,
    thinking_previews: bool,
}

impl Pipeline {
    pub fn new(llm: Arc<dyn LanguageModel>, search: Arc<dyn SearchProvider>, fetcher: Arc<dyn PageFetcher>) -> Self {
        Self {
            llm,
            search,
            fetcher,
            prompts: Arc::new(PromptKit::default()),
            generation: GenerationSettings::default(),
            fetch_limits: FetchLimits::default(),
            clock: Arc::new(SystemClock::default()),
            summary_concurrency: 4,
            thinking_previews: false,
        }
    }

    pub fn with_prompts(mut self, prompts: PromptKit) -> Self {
        self.prompts = Arc::new(prompts);
        self
    }

    /// Base sampling settings; `think` is overridden per stage.
    pub fn with_generation(mut self, generation: GenerationSettings) -> Self {
        self.generation = generation;
        self
    }

    pub fn with_fetch_limits(mut self, limits: FetchLimits) -> Self {
        self.fetch_limits = limits;
        self
    }

    pub fn with_clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    pub fn with_summary_concurrency(mut self, n: usize) -> Self {
        self.summary_concurrency = n.max(1);
        self
    }

    /// Include the first characters of model reasoning in event payloads.
    pub fn with_thinking_previews(mut self, on: bool) -> Self {
        self.thinking_previews = on;
        self
    }

    pub fn prompts(&self) -> &PromptKit {
        &self.prompts
    }

    /// Runs the pipeline for one claim. Always returns a frozen report;
    /// failures are recorded in it and signalled by a final `Failed` event.
    pub async fn run(
        &self,
        claim: Claim,
        config: PipelineConfig,
        run_id: &str,
        sink: Option<&UnboundedSender<ProgressEvent>>,
    ) -> RunOutput {
        let mut report = FactCheckReport::new(claim, config.clone());
        let mut emitter = Emitter {
            run_id,
            seq: 0,
            sink,
            log: Vec::new(),
            current: Stage::Planning,
            iteration: 1,
        };
        let outcome = match config.validate() {
            Ok(()) => self.drive(&mut report, &config, &mut emitter).await,
            Err(e) => Err(PipelineError::Domain(e)),
        };
        match outcome {
            Ok(()) => {
                let verdict = report.judgement().map(|j| j.verdict);
                emitter.emit(Stage::Done, json!({ "verdict": verdict }));
            }
            Err(e) => {
                let failure = RunFailure {
                    stage: emitter.current,
                    message: e.to_string(),
                };
                let payload = json!({ "stage": failure.stage, "error": failure.message });
                if !report.is_frozen() {
                    let _ = report.fail(failure);
                }
                emitter.emit(Stage::Failed, payload);
            }
        }
        RunOutput {
            report,
            events: emitter.log,
        }
    }

    async fn call(&self, stage: LlmStage, prompt: String, think: bool) -> Result<LlmResponse, PipelineError> {
        let request = LlmRequest {
            stage,
            prompt,
            settings: self.generation.with_think(think),
        };
        Ok(self.llm.complete(&request).await?)
    }

    fn record(&self, report: &mut FactCheckReport) -> Result<String, PipelineError> {
        let rendered = render_record_with_budget(report, report.config().record_char_budget);
        if rendered.was_elided() {
            report.add_flag(ReportFlag::RecordElided)?;
        }
        Ok(rendered.text)
    }

    fn preview(&self, payload: &mut Value, thinking: &str) {
        if self.thinking_previews && !thinking.is_empty() {
            payload["thinking_preview"] = json!(thinking.chars().take(PREVIEW_CHARS).collect::<String>());
        }
    }

    async fn drive(
        &self,
        report: &mut FactCheckReport,
        config: &PipelineConfig,
        emitter: &mut Emitter<'_>,
    ) -> Result<(), PipelineError> {
        let think = config.think_matrix;
        let started = self.clock.elapsed();

        // Planning.
        emitter.current = Stage::Planning;
        let record = self.record(report)?;
        let prompt = self
            .prompts
            .planning(&record, &report.claim().text)
            .map_err(|e| PipelineError::Prompt(e.to_string()))?;
        let response = self.call(LlmStage::Planning, prompt.clone(), think.planning).await?;
        let mut thinking = response.thinking_text.clone();
        let mut queries = match parse_actions(&response.answer_text, QueryOrigin::Planning, 1) {
            Ok(block) => block.actions,
            Err(ActionError::NoActions) => {
                report.add_flag(ReportFlag::PlanningReprompted)?;
                let retry = self
                    .call(
                        LlmStage::Planning,
                        format!("{prompt}{PLANNING_REMINDER}"),
                        think.planning,
                    )
                    .await?;
                thinking = retry.thinking_text.clone();
                parse_actions(&retry.answer_text, QueryOrigin::Planning, 1)
                    .map_err(|_| PipelineError::PlanningFailed)?
                    .actions
            }
        };
        self.lap(report, Stage::Planning, started)?;
        let mut payload = json!({ "queries": query_texts(&queries) });
        self.preview(&mut payload, &thinking);
        emitter.emit(Stage::Planning, payload);

        let mut seen: HashSet<String> = queries.iter().map(SearchQuery::normalized).collect();
        let mut iteration = 1u32;
        loop {
            emitter.iteration = iteration;
            report.push_iteration(Iteration {
                queries: queries.clone(),
                ..Iteration::default()
            })?;

            emitter.current = Stage::Executing;
            let started = self.clock.elapsed();
            let admitted = self.execute(report, config, &queries).await?;
            self.lap(report, Stage::Executing, started)?;
            let current = report.iterations().last().expect("pushed above");
            emitter.emit(
                Stage::Executing,
                json!({
                    "queries": query_texts(&queries),
                    "result_count": current.results.len(),
                    "admitted_count": admitted.len(),
                    "results": current.results.iter().map(|r| json!({
                        "url": r.url,
                        "title": r.title,
                        "snippet": r.snippet,
                        "rank": r.rank,
                        "query": r.query,
                        "published_date": r.published_date,
                        "date_unknown": r.date_unknown,
                    })).collect::<Vec<_>>(),
                    "excluded_urls": current.excluded_urls,
                }),
            );

            emitter.current = Stage::Summarizing;
            let started = self.clock.elapsed();
            let previews = self.summarize(report, config, admitted).await?;
            self.lap(report, Stage::Summarizing, started)?;
            emitter.emit(Stage::Summarizing, json!({ "summaries": previews }));

            emitter.current = Stage::Synthesizing;
            let started = self.clock.elapsed();
            let record = self.record(report)?;
            let prompt = self
                .prompts
                .synthesis(&record)
                .map_err(|e| PipelineError::Prompt(e.to_string()))?;
            let response = self.call(LlmStage::Synthesis, prompt, think.synthesis).await?;
            let proposed = parse_actions(&response.answer_text, QueryOrigin::Synthesis, iteration + 1)
                .map(|b| b.actions)
                .unwrap_or_default();
            let followups: Vec<SearchQuery> = proposed.into_iter().filter(|q| seen.insert(q.normalized())).collect();
            let mut analysis = strip_fenced_blocks(&response.answer_text);
            if analysis.is_empty() {
                analysis = "(no analysis text)".to_string();
            }
            report.current_iteration_mut()?.synthesis = Some(SynthesisOutcome {
                analysis_text: analysis.clone(),
                followup_queries: followups.clone(),
            });
            self.lap(report, Stage::Synthesizing, started)?;
            let mut payload = json!({
                "analysis": analysis,
                "followup_queries": query_texts(&followups),
            });
            self.preview(&mut payload, &response.thinking_text);
            emitter.emit(Stage::Synthesizing, payload);

            if followups.is_empty() {
                break;
            }
            if iteration >= config.max_iterations {
                report.add_flag(ReportFlag::IterationLimitReached)?;
                break;
            }
            iteration += 1;
            queries = followups;
        }

        emitter.current = Stage::Evaluating;
        let started = self.clock.elapsed();
        let record = self.record(report)?;
        let prompt = self
            .prompts
            .evaluation(&record)
            .map_err(|e| PipelineError::Prompt(e.to_string()))?;
        let response = self
            .call(LlmStage::Evaluation, prompt.clone(), think.evaluation)
            .await?;
        let mut thinking = response.thinking_text.clone();
        let judgement = match extract_judgement(&response.answer_text) {
            Ok(j) => j,
            Err(JudgementError::VerdictUnparseable) => {
                report.add_flag(ReportFlag::EvaluationReprompted)?;
                let retry = self
                    .call(
                        LlmStage::Evaluation,
                        format!("{prompt}{EVALUATION_REMINDER}"),
                        think.evaluation,
                    )
                    .await?;
                thinking = retry.thinking_text.clone();
                match extract_judgement(&retry.answer_text) {
                    Ok(j) => j,
                    Err(JudgementError::VerdictUnparseable) => {
                        report.add_flag(ReportFlag::VerdictFallback)?;
                        fallback_judgement(&retry.answer_text)
                    }
                }
            }
        };
        self.lap(report, Stage::Evaluating, started)?;
        let mut payload = json!({
            "verdict": judgement.verdict,
            "label": judgement.verdict.surface(),
            "justification": judgement.justification,
        });
        self.preview(&mut payload, &thinking);
        report.finalize(judgement)?;
        emitter.emit(Stage::Evaluating, payload);
        Ok(())
    }

    fn lap(&self, report: &mut FactCheckReport, stage: Stage, started: Duration) -> Result<(), PipelineError> {
        let ms = self.clock.elapsed().saturating_sub(started).as_millis() as u64;
        report.add_timing(stage, ms)?;
        Ok(())
    }

    /// Searches every query, fetches results, and applies the cutoff.
    /// Returns the admitted evidence in rank order.
    async fn execute(
        &self,
        report: &mut FactCheckReport,
        config: &PipelineConfig,
        queries: &[SearchQuery],
    ) -> Result<Vec<Admitted>, PipelineError> {
        let cutoff = report.claim().claim_date;
        let mut results: Vec<SearchResult> = Vec::new();
        let mut search_failed = false;
        for q in queries {
            match search(self.search.as_ref(), q, cutoff, config.top_k, config.cutoff_mode).await {
                Ok(mut r) => results.append(&mut r),
                Err(e) => {
                    tracing::warn!(query = %q.text, error = %e, "search failed");
                    search_failed = true;
                }
            }
        }
        if search_failed {
            report.add_flag(ReportFlag::SearchError)?;
        }

        let limits = self.fetch_limits;
        let articles = futures::future::join_all(results.iter().map(|r| self.fetcher.fetch(&r.url, &limits))).await;

        let mut admitted = Vec::new();
        let mut excluded = Vec::new();
        let mut any_unknown = false;
        for (result, article) in results.iter().zip(articles) {
            let date = article.published_date.or(result.published_date);
            if !admit_evidence(date, cutoff, config.cutoff_mode) {
                excluded.push(result.url.clone());
                continue;
            }
            let from_snippet = article.fetch_status != FetchStatus::Ok;
            let text = if from_snippet {
                result.snippet.clone()
            } else {
                article.extracted_text
            };
            if text.trim().is_empty() {
                continue;
            }
            let date_unknown = date.is_none() && cutoff.is_some();
            any_unknown |= date_unknown;
            admitted.push(Admitted {
                url: result.url.clone(),
                text,
                from_snippet,
                date_unknown,
            });
        }
        if any_unknown {
            report.add_flag(ReportFlag::DateUnknownEvidence)?;
        }
        let current = report.current_iteration_mut()?;
        current.results = results;
        current.excluded_urls = excluded;
        Ok(admitted)
    }

    async fn summarize(
        &self,
        report: &mut FactCheckReport,
        config: &PipelineConfig,
        admitted: Vec<Admitted>,
    ) -> Result<Vec<Value>, PipelineError> {
        let record = self.record(report)?;
        let claim_text = report.claim().text.clone();
        let think = config.think_matrix.summarization;
        let budget = config.summary_sentence_budget;
        let outcomes: Vec<Result<(EvidenceSummary, String), PipelineError>> = stream::iter(admitted)
            .map(|item| {
                let record = record.as_str();
                let claim_text = claim_text.as_str();
                async move {
                    let prompt = self
                        .prompts
                        .summarization(claim_text, &item.url, &item.text, record)
                        .map_err(|e| PipelineError::Prompt(e.to_string()))?;
                    let response = self.call(LlmStage::Summarization, prompt, think).await?;
                    let mut summary = summary_from_answer(&item.url, &response.answer_text, budget);
                    summary.from_snippet = item.from_snippet;
                    summary.date_unknown = item.date_unknown;
                    Ok((summary, response.thinking_text))
                }
            })
            .buffered(self.summary_concurrency)
            .collect()
            .await;

        let mut previews = Vec::new();
        let mut summaries = Vec::new();
        for outcome in outcomes {
            let (summary, thinking) = outcome?;
            let mut preview = json!({
                "url": summary.source_url,
                "relevant": summary.relevant,
                "summary": summary.summary_text,
                "truncated": summary.truncated,
            });
            self.preview(&mut preview, &thinking);
            previews.push(preview);
            summaries.push(summary);
        }
        if summaries.iter().any(|s| s.truncated) {
            report.add_flag(ReportFlag::SummaryTruncated)?;
        }
        report.current_iteration_mut()?.summaries = summaries;
        Ok(previews)
    }
}

struct Admitted {
    url: String,
    text: String,
    from_snippet: bool,
    date_unknown: bool,
}

fn query_texts(queries: &[SearchQuery]) -> Vec<&str> {
    queries.iter().map(|q| q.text.as_str()).collect()
}

/// True when a summarization answer is the irrelevance sentinel.
pub fn is_none_sentinel(answer: &str) -> bool {
    let t = answer
        .trim()
        .trim_matches(|c: char| c == '*' || c == '`' || c == '"' || c == '\'')
        .trim_end_matches('.')
        .trim();
    t.is_empty() || t.eq_ignore_ascii_case("none")
}

fn summary_from_answer(url: &str, answer: &str, budget: usize) -> EvidenceSummary {
    if is_none_sentinel(answer) {
        return EvidenceSummary::irrelevant(url);
    }
    let text = answer.trim();
    let kept = enforce_summary_budget(text, budget);
    let truncated = kept.len() != text.len();
    let mut summary = EvidenceSummary::relevant(url, kept);
    summary.truncated = truncated;
    summary
}

/// Keeps at most `budget_sentences` sentences, cutting the original text
/// after the last kept terminator.
pub fn enforce_summary_budget(summary: &str, budget_sentences: usize) -> String {
    let sentences = split_sentences(summary);
    if sentences.len() <= budget_sentences {
        return summary.to_string();
    }
    if budget_sentences == 0 {
        return String::new();
    }
    let last = sentences[budget_sentences - 1];
    let end = last.as_ptr() as usize - summary.as_ptr() as usize + last.len();
    summary[..end].to_string()
}

/// Picks the verdict from an evaluation answer: the last backtick-enclosed
/// span that names a decision option.
pub fn extract_judgement(llm_answer: &str) -> Result<Judgement, JudgementError> {
    let ticks: Vec<usize> = llm_answer.match_indices('`').map(|(i, _)| i).collect();
    let verdict = ticks
        .windows(2)
        .rev()
        .find_map(|w| parse_verdict_label(&llm_answer[w[0] + 1..w[1]]).ok())
        .ok_or(JudgementError::VerdictUnparseable)?;
    Ok(Judgement {
        verdict,
        justification: llm_answer.trim().to_string(),
        raw_output: llm_answer.to_string(),
    })
}

fn fallback_judgement(answer: &str) -> Judgement {
    let justification = if answer.trim().is_empty() {
        "The model did not return a recognizable verdict; defaulting to Not Enough Evidence.".to_string()
    } else {
        format!(
            "The model did not return a recognizable verdict; defaulting to Not Enough Evidence.\n\n{}",
            answer.trim()
        )
    };
    Judgement {
        verdict: Verdict::NotEnoughEvidence,
        justification,
        raw_output: answer.to_string(),
    }
}

/// Upper bound on model calls for a run: planning (+1 re-prompt), one per
/// summarized article, one synthesis per iteration, evaluation (+1 re-prompt).
pub fn llm_call_bound(admitted_articles: usize, max_iterations: u32) -> usize {
    2 + admitted_articles + max_iterations as usize + 2
}
