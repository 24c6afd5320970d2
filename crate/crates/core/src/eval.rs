//! Benchmark harness: AVeriTeC ingestion, reproducible subsetting,
//! accuracy and confusion computation, and the per-module think ablation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use futures::stream::{self, StreamExt};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::{parse_verdict_label, Claim, LlmStage, PipelineConfig, ThinkMatrix, Verdict};
use crate::error::EvalError;
use crate::pipeline::Pipeline;
use crate::report::report_to_markdown;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaPair {
    pub question: String,
    pub answer: String,
}

/// One labelled benchmark claim. `id` is the record's position in the
/// source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AveritecRecord {
    pub id: usize,
    pub claim_text: String,
    pub label: Verdict,
    pub claim_date: NaiveDate,
    pub speaker: Option<String>,
    pub reporting_source: Option<String>,
    pub location: Option<String>,
    pub qa_pairs: Vec<QaPair>,
    pub justification: String,
}

impl AveritecRecord {
    pub fn to_claim(&self) -> Claim {
        let mut claim = Claim {
            id: self.id.to_string(),
            text: self.claim_text.clone(),
            claim_date: Some(self.claim_date),
            speaker: None,
            origin: None,
        };
        if let Some(s) = &self.speaker {
            claim = claim.with_speaker(s.clone());
        }
        if let Some(o) = &self.reporting_source {
            claim = claim.with_origin(o.clone());
        }
        claim
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub index: usize,
    pub reason: String,
}

/// Per-label counts, indexed by [`Verdict::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub counts: [usize; 4],
}

impl ClassDistribution {
    pub fn of<'a>(labels: impl IntoIterator<Item = &'a Verdict>) -> Self {
        let mut counts = [0; 4];
        for v in labels {
            counts[v.index()] += 1;
        }
        Self { counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.counts[verdict.index()]
    }

    /// Percentage share of a label; 0 for an empty distribution.
    pub fn percent(&self, verdict: Verdict) -> f64 {
        match self.total() {
            0 => 0.0,
            t => 100.0 * self.count(verdict) as f64 / t as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub records: Vec<AveritecRecord>,
    pub rejects: Vec<Reject>,
    pub distribution: ClassDistribution,
}

pub fn load_dataset(path: &Path) -> Result<Dataset, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::FileUnreadable {
        path: path.to_path_buf(),
        source,
    })?;
    parse_dataset(&text)
}

/// Parses AVeriTeC JSON. Structural problems (not an array, an element
/// that is not an object) are errors; records with unusable fields are
/// collected as rejects.
pub fn parse_dataset(text: &str) -> Result<Dataset, EvalError> {
    let value: Value = serde_json::from_str(text).map_err(|e| EvalError::SchemaMismatch {
        index: None,
        reason: format!("invalid JSON: {e}"),
    })?;
    let Value::Array(items) = value else {
        return Err(EvalError::SchemaMismatch {
            index: None,
            reason: "top level is not an array".into(),
        });
    };
    let mut records = Vec::new();
    let mut rejects = Vec::new();
    for (index, item) in items.iter().enumerate() {
        let Value::Object(obj) = item else {
            return Err(EvalError::SchemaMismatch {
                index: Some(index),
                reason: "record is not an object".into(),
            });
        };
        match record_from_object(index, obj) {
            Ok(r) => records.push(r),
            Err(reason) => rejects.push(Reject { index, reason }),
        }
    }
    let distribution = ClassDistribution::of(records.iter().map(|r| &r.label));
    Ok(Dataset {
        records,
        rejects,
        distribution,
    })
}

fn opt_str(obj: &serde_json::Map<String, Value>, key: &str) -> Option<String> {
    obj.get(key)
        .and_then(Value::as_str)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
}

/// Dates appear as `D-M-YYYY` in the benchmark files; ISO is accepted too.
pub fn parse_claim_date(raw: &str) -> Option<NaiveDate> {
    let raw = raw.trim();
    NaiveDate::parse_from_str(raw, "%d-%m-%Y")
        .or_else(|_| NaiveDate::parse_from_str(raw, "%Y-%m-%d"))
        .ok()
}

fn record_from_object(index: usize, obj: &serde_json::Map<String, Value>) -> Result<AveritecRecord, String> {
    let claim_text = opt_str(obj, "claim").ok_or("missing claim text")?;
    let raw_label = opt_str(obj, "label").ok_or("missing label")?;
    let label = parse_verdict_label(&raw_label).map_err(|_| format!("unknown label {raw_label:?}"))?;
    let raw_date = opt_str(obj, "claim_date").ok_or("missing claim_date")?;
    let claim_date = parse_claim_date(&raw_date).ok_or(format!("invalid claim_date {raw_date:?}"))?;
    let mut qa_pairs = Vec::new();
    if let Some(questions) = obj.get("questions").and_then(Value::as_array) {
        for q in questions {
            let question = q
                .get("question")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string();
            let answers = q.get("answers").and_then(Value::as_array).cloned().unwrap_or_default();
            for a in answers {
                let answer = a.get("answer").and_then(Value::as_str).unwrap_or_default().to_string();
                qa_pairs.push(QaPair {
                    question: question.clone(),
                    answer,
                });
            }
        }
    }
    Ok(AveritecRecord {
        id: index,
        claim_text,
        label,
        claim_date,
        speaker: opt_str(obj, "speaker"),
        reporting_source: opt_str(obj, "reporting_source"),
        location: opt_str(obj, "location_ISO_code"),
        qa_pairs,
        justification: opt_str(obj, "justification").unwrap_or_default(),
    })
}

/// SplitMix64 (Steele, Lea and Flood), seeded directly with the integer
/// seed.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Unbiased integer in `0..range` by rejection: draws below
    /// `2^64 mod range` are discarded.
    pub fn below(&mut self, range: u64) -> u64 {
        assert!(range > 0, "empty range");
        let threshold = range.wrapping_neg() % range;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % range;
            }
        }
    }
}

/// Positions of a size-`n` sample of `0..len`: the first `n` slots of a
/// forward Fisher-Yates shuffle where slot `i` swaps with
/// `i + below(len - i)`.
pub fn sample_indices(len: usize, n: usize, seed: u64) -> Result<Vec<usize>, EvalError> {
    if n == 0 || n > len {
        return Err(EvalError::BadSize {
            requested: n,
            available: len,
        });
    }
    let mut rng = SplitMix64::new(seed);
    let mut idx: Vec<usize> = (0..len).collect();
    for i in 0..n {
        let j = i + rng.below((len - i) as u64) as usize;
        idx.swap(i, j);
    }
    idx.truncate(n);
    Ok(idx)
}

pub fn sample_subset(records: &[AveritecRecord], n: usize, seed: u64) -> Result<Vec<AveritecRecord>, EvalError> {
    Ok(sample_indices(records.len(), n, seed)?
        .into_iter()
        .map(|i| records[i].clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub id: usize,
    pub gold: Verdict,
    pub predicted: Verdict,
    pub failed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_path: Option<String>,
}

/// `matrix[gold][predicted]`, indexed by [`Verdict::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub matrix: [[usize; 4]; 4],
}

impl ConfusionMatrix {
    pub fn add(&mut self, gold: Verdict, predicted: Verdict) {
        self.matrix[gold.index()][predicted.index()] += 1;
    }

    pub fn row_sum(&self, gold: Verdict) -> usize {
        self.matrix[gold.index()].iter().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("gold\\predicted");
        for v in Verdict::ALL {
            let _ = write!(out, ",{}", v.surface());
        }
        out.push('\n');
        for g in Verdict::ALL {
            out.push_str(g.surface());
            for p in Verdict::ALL {
                let _ = write!(out, ",{}", self.matrix[g.index()][p.index()]);
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRunResult {
    pub think_vector: String,
    pub config: PipelineConfig,
    pub claims: Vec<ClaimResult>,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
    pub failed: usize,
    pub gold_distribution: ClassDistribution,
    pub predicted_distribution: ClassDistribution,
    pub confusion: ConfusionMatrix,
}

impl EvalRunResult {
    /// Aggregates per-claim outcomes; claims are ordered by id.
    pub fn from_claims(config: PipelineConfig, mut claims: Vec<ClaimResult>) -> Self {
        claims.sort_by_key(|c| c.id);
        let mut confusion = ConfusionMatrix::default();
        for c in &claims {
            confusion.add(c.gold, c.predicted);
        }
        let total = claims.len();
        let correct = claims.iter().filter(|c| c.gold == c.predicted).count();
        Self {
            think_vector: config.think_matrix.vector(),
            accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
            correct,
            total,
            failed: claims.iter().filter(|c| c.failed).count(),
            gold_distribution: ClassDistribution::of(claims.iter().map(|c| &c.gold)),
            predicted_distribution: ClassDistribution::of(claims.iter().map(|c| &c.predicted)),
            confusion,
            claims,
            config,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct EvalOptions {
    /// Claims evaluated at once.
    pub concurrency: usize,
    /// When set, reports and summaries are written here.
    pub out_dir: Option<PathBuf>,
}

fn write_file(path: &Path, contents: &str) -> Result<(), EvalError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| EvalError::Output {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| EvalError::Output {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs the pipeline on every record with the record's claim date as the
/// cutoff. A failed run counts as a `NotEnoughEvidence` prediction.
pub async fn run_eval(
    pipeline: &Pipeline,
    records: &[AveritecRecord],
    config: &PipelineConfig,
    options: &EvalOptions,
) -> Result<EvalRunResult, EvalError> {
    config.validate()?;
    let reports_dir = options.out_dir.as_ref().map(|d| d.join("reports"));
    let outcomes: Vec<Result<ClaimResult, EvalError>> = stream::iter(records)
        .map(|record| {
            let reports_dir = reports_dir.clone();
            async move {
                let output = pipeline
                    .run(record.to_claim(), config.clone(), &format!("claim-{}", record.id), None)
                    .await;
                let report = output.report;
                let predicted = report.judgement().map_or(Verdict::NotEnoughEvidence, |j| j.verdict);
                let mut report_path = None;
                if let Some(dir) = reports_dir {
                    let md = dir.join(format!("{}.md", record.id));
                    write_file(&md, &report_to_markdown(&report))?;
                    write_file(&dir.join(format!("{}.json", record.id)), &report.to_json())?;
                    report_path = Some(format!("reports/{}.md", record.id));
                }
                Ok(ClaimResult {
                    id: record.id,
                    gold: record.label,
                    predicted,
                    failed: report.failure().is_some(),
                    report_path,
                })
            }
        })
        .buffer_unordered(options.concurrency.max(1))
        .collect()
        .await;
    let claims = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    let result = EvalRunResult::from_claims(config.clone(), claims);
    if let Some(dir) = &options.out_dir {
        let json = serde_json::to_string_pretty(&result).expect("result serializes");
        write_file(&dir.join("results.json"), &json)?;
        write_file(&dir.join("confusion.csv"), &result.confusion.to_csv())?;
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    /// `None` for the baseline row.
    pub flipped: Option<LlmStage>,
    pub label: String,
    pub result: EvalRunResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationGrid {
    pub base: ThinkMatrix,
    pub rows: Vec<AblationRow>,
}

impl AblationGrid {
    /// Markdown table: baseline first, then one row per flipped module.
    pub fn to_markdown(&self) -> String {
        let base_thinks = self.base == ThinkMatrix::ALL;
        let mut out = String::from("| Configuration | Think vector | Accuracy |\n|---|---|---|\n");
        for row in &self.rows {
            let label = match row.flipped {
                None => format!("**{}**", row.label),
                Some(_) => row.label.clone(),
            };
            let _ = writeln!(
                out,
                "| {} | {} | {:.1}% |",
                label,
                row.result.think_vector,
                100.0 * row.result.accuracy
            );
        }
        let _ = writeln!(
            out,
            "\nRows below the baseline {} thinking for the named module only.",
            if base_thinks { "disable" } else { "enable" }
        );
        out
    }
}

/// The think vectors of an ablation: the base, then the base with each
/// module flipped in pipeline order.
pub fn ablation_matrices(base: ThinkMatrix) -> Result<Vec<(Option<LlmStage>, ThinkMatrix)>, EvalError> {
    if base != ThinkMatrix::ALL && base != ThinkMatrix::NONE {
        return Err(EvalError::BadAblationBase(base.vector()));
    }
    let mut grid = vec![(None, base)];
    grid.extend(LlmStage::ALL.iter().map(|&s| (Some(s), base.flipped(s))));
    Ok(grid)
}

fn row_label(base: ThinkMatrix, flipped: Option<LlmStage>) -> String {
    match flipped {
        None if base == ThinkMatrix::ALL => "All modules Think (baseline)".into(),
        None => "All modules No-Think (baseline)".into(),
        Some(stage) if base == ThinkMatrix::ALL => format!("No-Think: {}", stage.module_name()),
        Some(stage) => format!("Think: {}", stage.module_name()),
    }
}

/// Runs the baseline and the four single-module flips. With an output
/// directory each run goes under `<out>/<vector>/` and the summary table to
/// `<out>/table.md`.
pub async fn ablation_grid(
    pipeline: &Pipeline,
    records: &[AveritecRecord],
    base: ThinkMatrix,
    config: &PipelineConfig,
    options: &EvalOptions,
) -> Result<AblationGrid, EvalError> {
    let mut rows = Vec::new();
    for (flipped, matrix) in ablation_matrices(base)? {
        let run_config = PipelineConfig {
            think_matrix: matrix,
            ..config.clone()
        };
        let run_options = EvalOptions {
            concurrency: options.concurrency,
            out_dir: options.out_dir.as_ref().map(|d| d.join(matrix.vector())),
        };
        let result = run_eval(pipeline, records, &run_config, &run_options).await?;
        rows.push(AblationRow {
            flipped,
            label: row_label(base, flipped),
            result,
        });
    }
    let grid = AblationGrid { base, rows };
    if let Some(dir) = &options.out_dir {
        write_file(&dir.join("table.md"), &grid.to_markdown())?;
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_vector() {
        let mut rng = SplitMix64::new(1234567);
        let got: Vec<u64> = (0..5).map(|_| rng.next_u64()).collect();
        assert_eq!(
            got,
            [
                6457827717110365317,
                3203168211198807973,
                9817491932198370423,
                4593380528125082431,
                16408922859458223821
            ]
        );
    }

    // Frozen from an independent implementation of the same generator.
    #[test]
    fn frozen_subsets() {
        let s42 = sample_indices(500, 100, 42).unwrap();
        assert_eq!(&s42[..10], [413, 122, 1, 180, 54, 47, 471, 238, 297, 393]);
        assert_eq!(s42[99], 13);
        let s43 = sample_indices(500, 100, 43).unwrap();
        assert_eq!(&s43[..10], [160, 253, 281, 290, 387, 181, 236, 454, 26, 104]);
        assert_eq!(s43[99], 218);
        assert_ne!(s42, s43);
        assert_eq!(sample_indices(10, 10, 7).unwrap(), [7, 0, 4, 6, 8, 5, 2, 1, 9, 3]);
    }

    #[test]
    fn sampling_bounds() {
        assert!(matches!(sample_indices(5, 0, 1), Err(EvalError::BadSize { .. })));
        assert!(matches!(sample_indices(5, 6, 1), Err(EvalError::BadSize { .. })));
        let mut all = sample_indices(50, 50, 42).unwrap();
        all.sort();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
        assert_eq!(
            sample_indices(500, 100, 42).unwrap(),
            sample_indices(500, 100, 42).unwrap()
        );
    }

    #[test]
    fn dataset_parsing() {
        let json = r#"[
          {"claim": "A", "label": "Refuted", "claim_date": "25-8-2020", "speaker": "X",
           "questions": [{"question": "Q?", "answers": [{"answer": "yes"}, {"answer": "no"}]}]},
          {"claim": "B", "label": "Conflicting Evidence/Cherrypicking", "claim_date": "2020-01-02"},
          {"claim": "C", "label": "Maybe", "claim_date": "1-1-2020"},
          {"claim": "D", "label": "Supported", "claim_date": "31-2-2020"},
          {"label": "Supported", "claim_date": "1-1-2020"}
        ]"#;
        let ds = parse_dataset(json).unwrap();
        assert_eq!(ds.records.len(), 2);
        assert_eq!(ds.rejects.iter().map(|r| r.index).collect::<Vec<_>>(), [2, 3, 4]);
        let a = &ds.records[0];
        assert_eq!(a.claim_date, NaiveDate::from_ymd_opt(2020, 8, 25).unwrap());
        assert_eq!(a.qa_pairs.len(), 2);
        assert_eq!(a.to_claim().speaker.as_deref(), Some("X"));
        assert_eq!(ds.records[1].id, 1);
        assert_eq!(ds.distribution.count(Verdict::ConflictingEvidence), 1);

        let empty = parse_dataset("[]").unwrap();
        assert!(empty.records.is_empty() && empty.distribution.total() == 0);
        assert_eq!(empty.distribution.percent(Verdict::Supported), 0.0);
        assert!(matches!(
            parse_dataset("{}"),
            Err(EvalError::SchemaMismatch { index: None, .. })
        ));
        assert!(matches!(
            parse_dataset("[{}, 3]"),
            Err(EvalError::SchemaMismatch { index: Some(1), .. })
        ));
    }

    #[test]
    fn unreadable_file() {
        assert!(matches!(
            load_dataset(Path::new("/nonexistent/dev.json")),
            Err(EvalError::FileUnreadable { .. })
        ));
    }

    #[test]
    fn ablation_vectors() {
        let v: Vec<String> = ablation_matrices(ThinkMatrix::ALL)
            .unwrap()
            .iter()
            .map(|(_, m)| m.vector())
            .collect();
        assert_eq!(v, ["TTTT", "FTTT", "TFTT", "TTFT", "TTTF"]);
        let v: Vec<String> = ablation_matrices(ThinkMatrix::NONE)
            .unwrap()
            .iter()
            .map(|(_, m)| m.vector())
            .collect();
        assert_eq!(v, ["FFFF", "TFFF", "FTFF", "FFTF", "FFFT"]);
        assert!(matches!(
            ablation_matrices("TFTF".parse().unwrap()),
            Err(EvalError::BadAblationBase(_))
        ));
    }

    #[test]
    fn accuracy_and_confusion() {
        let claims = vec![
            ClaimResult {
                id: 2,
                gold: Verdict::Refuted,
                predicted: Verdict::Refuted,
                failed: false,
                report_path: None,
            },
            ClaimResult {
                id: 0,
                gold: Verdict::Supported,
                predicted: Verdict::Refuted,
                failed: false,
                report_path: None,
            },
            ClaimResult {
                id: 1,
                gold: Verdict::NotEnoughEvidence,
                predicted: Verdict::NotEnoughEvidence,
                failed: true,
                report_path: None,
            },
        ];
        let r = EvalRunResult::from_claims(PipelineConfig::default(), claims);
        assert_eq!(r.claims.iter().map(|c| c.id).collect::<Vec<_>>(), [0, 1, 2]);
        assert_eq!((r.correct, r.total, r.failed), (2, 3, 1));
        assert_eq!(r.accuracy, 2.0 / 3.0);
        assert_eq!(r.confusion.row_sum(Verdict::Supported), 1);
        let csv = r.confusion.to_csv();
        assert!(csv.starts_with("gold\\predicted,Supported,Refuted,"));
        assert!(csv.contains("\nRefuted,0,1,0,0\n"));
    }
}
