//! Prompt templates, verdict rules, and rendering of the running record.
//!
//! Placeholders are single-brace names such as `{claim}`. Bound values are
//! inserted verbatim and never re-scanned, so a value containing `{record}`
//! is not expanded a second time.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use std::path::Path;

use crate::domain::{FactCheckReport, LlmStage, Verdict};
use crate::error::PromptError;

pub const PLAN_TEMPLATE: &str = r#"Instructions
The available knowledge is insufficient to assess the Claim. Therefore, propose a set of actions to retrieve new and helpful evidence. Adhere to the following rules:

- The actions available are listed under Valid Actions, including a short description for each action. No other actions are possible at this moment.
- For each action, use the formatting as specified in Valid Actions.
- Include all actions in a single Markdown code block at the end of your answer.
- Propose as few actions as possible but as much as needed. Do not propose similar or previously used actions.
- Consider Both Modalities Equally: Avoid focusing too much on one modality at the expense of the other, but always check whether the text claim is true or false.
- Compare Image and Caption: Verify the context of the image and caption.

Valid Actions:
web search: Run an open web search for related webpages.

Examples:
web_search("New Zealand Food Bill 2020")

Record:
{record}

Claim: {claim}
Your Actions:
"#;

pub const SUMMARIZE_TEMPLATE: &str = r#"Instructions
In order to find evidence that helps your fact-check, you just ran a web search, which yielded a Search Result. Your task right now is to summarize the Search Result concisely in at most 5 sentences, only including information that is relevant to the Claim you are checking.

What to include:
- Information that might be useful for fact-checking the claim (see Record).
- If available: the release date as well as the author or the publisher (e.g., the media company) of the search result.

Do NOT include:
- Advertisements.
- Any other information unrelated to the Record or the Claim.

Additional Rules:
- Do not add any additional information besides the information in the Search Result. Also, do not add any information that is not related to the claim, even if it is mentioned in the Search Result.
- If the Search Result doesn't contain any relevant information for the fact-checking work, print only one word in capital letters, do not include anything else: NONE.
- Keep your writing style consistent with the provided Examples.
- Try to filter out relevant information even if the Search Result is in a different language.

Claim: {claim}

Evidence:
{url}
{search_result}

Record:
{record}


Your Summary:
"#;

pub const SYNTHESIZE_TEMPLATE: &str = r#"Instructions
You just retrieved new Evidence. Now, analyze the Claim's veracity using the evidence. Always adhere to the following rules:
- Focus on developing new insights. Do not repeat larger parts from the Record. Do not restate the Claim.
- Write down your thoughts step-by-step. Whenever necessary, you may elaborate in more detail.
- Depending on the topic's complexity, invest one to three paragraphs. The fewer, the better.
- If you find that there is insufficient information to verify the Claim, explicitly state what information is missing.
- If you cite web sources, always refer to them by including their URL as a Markdown hyperlink.
- Use information only from the recorded evidence:
- Avoid inserting information that is not implied by the evidence. You may use commonsense knowledge, though.

If it is extremely necessary to retrieve more evidence, you can propose actions to the user. If not necessary, do not add anything else other than the reasoning.

Adhere to the following rules:
- The actions available are listed under Valid Actions, including a short description for each action. No other actions are possible at this moment.
- For each action, use the formatting as specified in Valid Actions.
- Propose as few actions as possible but as much as needed. Do not propose similar or previously used actions.
- Include all actions in a single Markdown code block at the end of your answer.

Valid Actions:
web search: Run an open web search for related webpages.

Examples:
web_search("New Zealand Food Bill 2020")

Record:
{record}

Your Analysis:
"#;

pub const EVALUATE_TEMPLATE: &str = r#"Instructions
Determine the Claim's veracity by following these steps:
1. Briefly summarize the key insights from the fact-check (see Record) in at most one paragraph.
2. Write one paragraph about which one of the Decision Options applies best. Include the most appropriate decision option at the end and enclose it in backticks
like `this`.

Decision Options:
Supported|Refuted|Conflicting Evidence/Cherrypicking|Not Enough Evidence

Rules:
{verdict_descriptions}

Record:
{record}
Your Judgement:
"#;

pub const VERDICT_RULES: &str = r#"Supported
- The claim is directly and clearly backed by strong, credible evidence. Minor uncertainty or lack of detail does not disqualify a claim from being Supported if the main point is well-evidenced.
- Use Supported if the overall weight of evidence points to the claim being true, even if there are minor caveats or not every detail is confirmed.

Refuted
- The claim is contradicted by strong, credible evidence, or is shown to be fabricated, deceptive, or false in its main point.
- Use Refuted if the central elements of the claim are disproven, even if some minor details are unclear.
- Lack of any credible sources supporting the claim does not mean "Not Enough Evidence"—it means the claim is Refuted.

Conflicting Evidence/Cherrypicking
- Only use this if there are reputable sources that directly and irreconcilably contradict each other about the main point of the claim, and no clear resolution is possible after careful analysis.
- Do NOT use this for minor disagreements, incomplete evidence, or if most evidence points one way but a few sources disagree.

Not Enough Evidence
- Only use this if there is genuinely no relevant evidence available after a thorough search, or if the claim is too vague or ambiguous to evaluate.
- Do NOT use this if there is some evidence, even if it is weak, or if the claim is mostly clear but not every detail is confirmed.
- This is a last-resort option only.
"#;

/// Inserted where old evidence was dropped to respect the record budget.
pub const ELISION_MARKER: &str = "[earlier evidence elided]";

pub type TemplateName = LlmStage;

fn file_name(name: TemplateName) -> &'static str {
    match name {
        LlmStage::Planning => "plan.txt",
        LlmStage::Summarization => "summarize.txt",
        LlmStage::Synthesis => "synthesize.txt",
        LlmStage::Evaluation => "evaluate.txt",
    }
}

fn template_label(name: TemplateName) -> &'static str {
    match name {
        LlmStage::Planning => "planning",
        LlmStage::Summarization => "summarization",
        LlmStage::Synthesis => "synthesis",
        LlmStage::Evaluation => "evaluation",
    }
}

pub fn required_placeholders(name: TemplateName) -> &'static [&'static str] {
    match name {
        LlmStage::Planning => &["record", "claim"],
        LlmStage::Summarization => &["claim", "url", "search_result", "record"],
        LlmStage::Synthesis => &["record"],
        LlmStage::Evaluation => &["verdict_descriptions", "record"],
    }
}

fn builtin_body(name: TemplateName) -> &'static str {
    match name {
        LlmStage::Planning => PLAN_TEMPLATE,
        LlmStage::Summarization => SUMMARIZE_TEMPLATE,
        LlmStage::Synthesis => SYNTHESIZE_TEMPLATE,
        LlmStage::Evaluation => EVALUATE_TEMPLATE,
    }
}

/// A template body holding exactly its stage's placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    name: TemplateName,
    body: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment<'a> {
    Text(&'a str),
    Slot(&'a str),
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_'
}

/// Splits a body into literal text and `{name}` slots.
fn segments(body: &str) -> Vec<Segment<'_>> {
    let bytes = body.as_bytes();
    let mut out = Vec::new();
    let mut literal_start = 0;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' {
            let mut j = i + 1;
            while j < bytes.len() && is_ident_byte(bytes[j]) {
                j += 1;
            }
            if j > i + 1 && j < bytes.len() && bytes[j] == b'}' && bytes[i + 1].is_ascii_lowercase() {
                if literal_start < i {
                    out.push(Segment::Text(&body[literal_start..i]));
                }
                out.push(Segment::Slot(&body[i + 1..j]));
                i = j + 1;
                literal_start = i;
                continue;
            }
        }
        i += 1;
    }
    if literal_start < body.len() {
        out.push(Segment::Text(&body[literal_start..]));
    }
    out
}

impl PromptTemplate {
    pub fn builtin(name: TemplateName) -> Self {
        Self {
            name,
            body: builtin_body(name).to_string(),
        }
    }

    /// Builds a template, checking that the body's placeholders match the
    /// stage's required set exactly.
    pub fn new(name: TemplateName, body: impl Into<String>) -> Result<Self, PromptError> {
        let body = body.into();
        let found: BTreeSet<String> = segments(&body)
            .into_iter()
            .filter_map(|s| match s {
                Segment::Slot(n) => Some(n.to_string()),
                Segment::Text(_) => None,
            })
            .collect();
        let expected: BTreeSet<String> = required_placeholders(name).iter().map(|s| s.to_string()).collect();
        if found != expected {
            return Err(PromptError::TemplateShape {
                name: template_label(name),
                found: found.into_iter().collect(),
                expected: expected.into_iter().collect(),
            });
        }
        Ok(Self { name, body })
    }

    pub fn name(&self) -> TemplateName {
        self.name
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    /// Literal instruction text between placeholders, in order.
    pub fn literal_regions(&self) -> Vec<&str> {
        segments(&self.body)
            .into_iter()
            .filter_map(|s| match s {
                Segment::Text(t) => Some(t),
                Segment::Slot(_) => None,
            })
            .collect()
    }

    /// Substitutes every placeholder. `bindings` must name exactly the
    /// required placeholders.
    pub fn render(&self, bindings: &BTreeMap<&str, &str>) -> Result<String, PromptError> {
        let required = required_placeholders(self.name);
        let missing: Vec<String> = required
            .iter()
            .filter(|p| !bindings.contains_key(*p))
            .map(|p| p.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(PromptError::MissingPlaceholder(missing));
        }
        let unknown: Vec<String> = bindings
            .keys()
            .filter(|k| !required.contains(k))
            .map(|k| k.to_string())
            .collect();
        if !unknown.is_empty() {
            return Err(PromptError::UnknownPlaceholder(unknown));
        }
        let mut out = String::with_capacity(self.body.len() + bindings.values().map(|v| v.len()).sum::<usize>());
        for seg in segments(&self.body) {
            match seg {
                Segment::Text(t) => out.push_str(t),
                Segment::Slot(name) => out.push_str(bindings[name]),
            }
        }
        Ok(out)
    }
}

/// The four verdict rule blocks embedded in the evaluation prompt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictRules {
    blocks: Vec<(Verdict, String)>,
}

impl VerdictRules {
    pub fn builtin() -> Self {
        Self::parse(VERDICT_RULES).expect("builtin verdict rules are well-formed")
    }

    /// Parses rule text where each block starts with a line holding a
    /// verdict's surface name.
    pub fn parse(text: &str) -> Result<Self, PromptError> {
        let mut blocks: Vec<(Verdict, Vec<&str>)> = Vec::new();
        for line in text.lines() {
            let header = Verdict::ALL.into_iter().find(|v| line.trim() == v.surface());
            match header {
                Some(v) => {
                    if blocks.iter().any(|(seen, _)| *seen == v) {
                        return Err(PromptError::InvalidRules(format!(
                            "duplicate block for {}",
                            v.surface()
                        )));
                    }
                    blocks.push((v, vec![line.trim()]));
                }
                None => match blocks.last_mut() {
                    Some((_, lines)) => lines.push(line),
                    None if line.trim().is_empty() => {}
                    None => {
                        return Err(PromptError::InvalidRules(
                            "text before the first verdict heading".into(),
                        ))
                    }
                },
            }
        }
        if blocks.len() != 4 {
            return Err(PromptError::InvalidRules(format!(
                "expected 4 verdict blocks, found {}",
                blocks.len()
            )));
        }
        Ok(Self {
            blocks: blocks
                .into_iter()
                .map(|(v, lines)| (v, lines.join("\n").trim_end().to_string()))
                .collect(),
        })
    }

    pub fn blocks(&self) -> &[(Verdict, String)] {
        &self.blocks
    }

    pub fn text(&self) -> String {
        self.blocks
            .iter()
            .map(|(_, b)| b.as_str())
            .collect::<Vec<_>>()
            .join("\n\n")
    }
}

/// All templates plus the verdict rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptKit {
    templates: [PromptTemplate; 4],
    rules: VerdictRules,
}

impl Default for PromptKit {
    fn default() -> Self {
        Self {
            templates: LlmStage::ALL.map(PromptTemplate::builtin),
            rules: VerdictRules::builtin(),
        }
    }
}

impl PromptKit {
    /// Loads overrides from `dir`; files that are absent keep the builtin text.
    pub fn from_dir(dir: &Path) -> Result<Self, PromptError> {
        let read = |name: &str| -> Result<Option<String>, PromptError> {
            let path = dir.join(name);
            match std::fs::read_to_string(&path) {
                Ok(text) => Ok(Some(text)),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
                Err(source) => Err(PromptError::Io { path, source }),
            }
        };
        let mut kit = Self::default();
        for stage in LlmStage::ALL {
            if let Some(body) = read(file_name(stage))? {
                kit.templates[stage as usize] = PromptTemplate::new(stage, body)?;
            }
        }
        if let Some(text) = read("verdict_rules.txt")? {
            kit.rules = VerdictRules::parse(&text)?;
        }
        Ok(kit)
    }

    pub fn template(&self, name: TemplateName) -> &PromptTemplate {
        &self.templates[name as usize]
    }

    pub fn rules(&self) -> &VerdictRules {
        &self.rules
    }

    pub fn planning(&self, record: &str, claim: &str) -> Result<String, PromptError> {
        self.template(LlmStage::Planning)
            .render(&BTreeMap::from([("record", record), ("claim", claim)]))
    }

    pub fn summarization(
        &self,
        claim: &str,
        url: &str,
        search_result: &str,
        record: &str,
    ) -> Result<String, PromptError> {
        self.template(LlmStage::Summarization).render(&BTreeMap::from([
            ("claim", claim),
            ("url", url),
            ("search_result", search_result),
            ("record", record),
        ]))
    }

    pub fn synthesis(&self, record: &str) -> Result<String, PromptError> {
        self.template(LlmStage::Synthesis)
            .render(&BTreeMap::from([("record", record)]))
    }

    pub fn evaluation(&self, record: &str) -> Result<String, PromptError> {
        let rules = self.rules.text();
        self.template(LlmStage::Evaluation).render(&BTreeMap::from([
            ("verdict_descriptions", rules.as_str()),
            ("record", record),
        ]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BlockKind {
    Header,
    Queries,
    Summary,
    Analysis,
}

/// Serialized record plus how much was dropped to fit the budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedRecord {
    pub text: String,
    pub elided_blocks: usize,
    pub hard_truncated: bool,
}

impl RenderedRecord {
    pub fn was_elided(&self) -> bool {
        self.elided_blocks > 0 || self.hard_truncated
    }
}

/// Plain-text record for the `{record}` placeholder, capped at the
/// report's configured character budget.
pub fn render_record(report: &FactCheckReport) -> String {
    render_record_with_budget(report, report.config().record_char_budget).text
}

pub fn render_record_with_budget(report: &FactCheckReport, budget: usize) -> RenderedRecord {
    let mut blocks: Vec<(BlockKind, String)> = Vec::new();
    let claim = report.claim();
    let mut header = format!("Claim: {}", claim.text);
    if let Some(date) = claim.claim_date {
        let _ = write!(header, "\nClaim date: {date}");
    }
    if let Some(speaker) = &claim.speaker {
        let _ = write!(header, "\nSpeaker: {speaker}");
    }
    if let Some(origin) = &claim.origin {
        let _ = write!(header, "\nOrigin: {origin}");
    }
    blocks.push((BlockKind::Header, header));

    for iteration in report.iterations() {
        if !iteration.queries.is_empty() {
            let mut q = String::from("Search Queries:");
            for query in &iteration.queries {
                let _ = write!(q, "\n- {}", query.text);
            }
            blocks.push((BlockKind::Queries, q));
        }
        for s in iteration.summaries.iter().filter(|s| s.relevant) {
            blocks.push((
                BlockKind::Summary,
                format!("Evidence Summary ({}):\n{}", s.source_url, s.summary_text.trim()),
            ));
        }
        if let Some(synthesis) = &iteration.synthesis {
            blocks.push((
                BlockKind::Analysis,
                format!("Analysis:\n{}", synthesis.analysis_text.trim()),
            ));
        }
    }
    elide(blocks, budget)
}

fn joined_len(blocks: &[(BlockKind, String)]) -> usize {
    let content: usize = blocks.iter().map(|(_, b)| b.chars().count()).sum();
    content + 2 * blocks.len().saturating_sub(1)
}

fn elide(mut blocks: Vec<(BlockKind, String)>, budget: usize) -> RenderedRecord {
    let mut elided = 0;
    let mut marker_at: Option<usize> = None;

    // Oldest summaries go first, then older analyses; the latest analysis stays.
    for kind in [BlockKind::Summary, BlockKind::Analysis] {
        loop {
            if joined_len(&blocks) <= budget {
                break;
            }
            let last_analysis = blocks.iter().rposition(|(k, _)| *k == BlockKind::Analysis);
            let victim = blocks
                .iter()
                .enumerate()
                .position(|(i, (k, _))| *k == kind && (kind != BlockKind::Analysis || Some(i) != last_analysis));
            let Some(idx) = victim else { break };
            elided += 1;
            match marker_at {
                None => {
                    blocks[idx] = (BlockKind::Header, ELISION_MARKER.to_string());
                    marker_at = Some(idx);
                }
                Some(m) => {
                    blocks.remove(idx);
                    if idx < m {
                        marker_at = Some(m - 1);
                    }
                }
            }
        }
    }

    let text = blocks.iter().map(|(_, b)| b.as_str()).collect::<Vec<_>>().join("\n\n");
    let total = text.chars().count();
    if total <= budget {
        return RenderedRecord {
            text,
            elided_blocks: elided,
            hard_truncated: false,
        };
    }
    // Keep the beginning of the header and the most recent tail.
    let head: String = blocks[0].1.chars().take(budget / 2).collect();
    let sep = format!("\n\n{ELISION_MARKER}\n\n");
    let tail_len = budget.saturating_sub(head.chars().count() + sep.chars().count());
    let tail: String = text.chars().skip(total - tail_len).collect();
    let mut text = format!("{head}{sep}{tail}");
    if text.chars().count() > budget {
        text = text.chars().take(budget).collect();
    }
    RenderedRecord {
        text,
        elided_blocks: elided,
        hard_truncated: true,
    }
}
