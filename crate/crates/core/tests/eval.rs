mod common;

use std::sync::Arc;

use claimcheck::domain::{LlmStage, PipelineConfig, ThinkMatrix, Verdict};
use claimcheck::eval::{
    ablation_grid, load_dataset, parse_dataset, run_eval, sample_subset, EvalOptions, EvalRunResult,
};
use claimcheck::llm::ScriptedLlm;
use claimcheck::FactCheckReport;

use common::suite::{self, boundary_url, records, suite_llm, SUITE};

fn options(concurrency: usize, out: Option<&std::path::Path>) -> EvalOptions {
    EvalOptions {
        concurrency,
        out_dir: out.map(|p| p.to_path_buf()),
    }
}

#[tokio::test]
async fn suite_run_persists_outputs() {
    let world = tempfile::tempdir().unwrap();
    suite::write_suite_world(world.path());
    let out = tempfile::tempdir().unwrap();
    let llm = Arc::new(suite_llm());
    let pipeline = common::pipeline(llm.clone(), world.path());
    let result = run_eval(
        &pipeline,
        &records(),
        &PipelineConfig::default(),
        &options(4, Some(out.path())),
    )
    .await
    .unwrap();

    assert_eq!(result.total, 10);
    assert_eq!(result.correct, 7);
    assert_eq!(result.accuracy, suite::SUITE_ACCURACY);
    assert_eq!(result.failed, 0);
    assert_eq!(result.think_vector, "TTTT");
    assert_eq!(llm.call_count(), SUITE.iter().map(suite::suite_calls).sum::<usize>());
    for v in Verdict::ALL {
        assert_eq!(result.confusion.row_sum(v), result.gold_distribution.count(v));
    }
    assert_eq!(
        result.confusion.matrix[Verdict::Supported.index()][Verdict::Refuted.index()],
        1
    );

    for (id, claim) in SUITE.iter().enumerate() {
        let md = std::fs::read_to_string(out.path().join(format!("reports/{id}.md"))).unwrap();
        assert!(md.starts_with("# Fact-Checking Report"));
        let json = std::fs::read_to_string(out.path().join(format!("reports/{id}.json"))).unwrap();
        let report = FactCheckReport::from_json(&json).unwrap();
        assert_eq!(report.judgement().unwrap().verdict, claim.forced);
        let its = report.iterations();
        assert!(its
            .iter()
            .flat_map(|it| &it.summaries)
            .all(|s| s.source_url != boundary_url(id)));
        assert!(its
            .iter()
            .flat_map(|it| &it.results)
            .all(|r| !r.url.ends_with("/fact-check")));
        assert!(its[0].excluded_urls.contains(&boundary_url(id)));
        let rounds = if claim.follow_up { 2 } else { 1 };
        assert_eq!(its.len(), rounds);
    }
    let saved: EvalRunResult =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("results.json")).unwrap()).unwrap();
    assert_eq!(saved, result);
    let csv = std::fs::read_to_string(out.path().join("confusion.csv")).unwrap();
    assert_eq!(csv, result.confusion.to_csv());
    assert_eq!(csv.lines().count(), 5);
}

#[tokio::test]
async fn failed_runs_count_as_not_enough_evidence() {
    let world = tempfile::tempdir().unwrap();
    let llm = Arc::new(ScriptedLlm::fixed(
        "I cannot decide what to search.",
        "NONE",
        "",
        "`Supported`",
    ));
    let pipeline = common::pipeline(llm, world.path());
    let recs = records();
    let result = run_eval(&pipeline, &recs, &PipelineConfig::default(), &options(3, None))
        .await
        .unwrap();
    assert_eq!(result.failed, 10);
    assert!(result
        .claims
        .iter()
        .all(|c| c.failed && c.predicted == Verdict::NotEnoughEvidence));
    let nee_share = result.gold_distribution.count(Verdict::NotEnoughEvidence) as f64 / 10.0;
    assert_eq!(result.accuracy, nee_share);
}

#[tokio::test]
async fn result_is_independent_of_order_and_concurrency() {
    let world = tempfile::tempdir().unwrap();
    suite::write_suite_world(world.path());
    let pipeline = common::pipeline(Arc::new(suite_llm()), world.path());
    let forward = run_eval(&pipeline, &records(), &PipelineConfig::default(), &options(1, None))
        .await
        .unwrap();
    let mut shuffled = records();
    shuffled.reverse();
    shuffled.swap(2, 7);
    let backward = run_eval(&pipeline, &shuffled, &PipelineConfig::default(), &options(8, None))
        .await
        .unwrap();
    assert_eq!(forward, backward);
}

#[tokio::test]
async fn ablation_writes_each_vector_and_table() {
    let world = tempfile::tempdir().unwrap();
    suite::write_suite_world(world.path());
    let out = tempfile::tempdir().unwrap();
    let pipeline = common::pipeline(Arc::new(suite_llm()), world.path());
    let recs = &records()[..3];
    let grid = ablation_grid(
        &pipeline,
        recs,
        ThinkMatrix::NONE,
        &PipelineConfig::default(),
        &options(2, Some(out.path())),
    )
    .await
    .unwrap();
    let vectors: Vec<&str> = grid.rows.iter().map(|r| r.result.think_vector.as_str()).collect();
    assert_eq!(vectors, ["FFFF", "TFFF", "FTFF", "FFTF", "FFFT"]);
    assert_eq!(grid.rows[0].label, "All modules No-Think (baseline)");
    assert_eq!(grid.rows[1].flipped, Some(LlmStage::Planning));
    assert!(grid.rows[4].label.starts_with("Think: "));
    for v in vectors {
        assert!(out.path().join(v).join("results.json").exists());
    }
    let table = std::fs::read_to_string(out.path().join("table.md")).unwrap();
    assert_eq!(table, grid.to_markdown());
    assert!(ablation_grid(
        &pipeline,
        recs,
        ThinkMatrix::from_flags([true, false, true, true]),
        &PipelineConfig::default(),
        &options(1, None)
    )
    .await
    .is_err());
}

#[test]
fn synthetic_dev_file_loads() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dev.json");
    std::fs::write(&path, suite::synthetic_dev_json()).unwrap();
    let data = load_dataset(&path).unwrap();
    assert_eq!(data.records.len(), 500);
    assert!(data.rejects.is_empty());
    assert_eq!(data.distribution.count(Verdict::Supported), 122);
    assert_eq!(data.distribution.count(Verdict::Refuted), 305);
    assert_eq!(data.distribution.count(Verdict::ConflictingEvidence), 38);
    assert_eq!(data.distribution.count(Verdict::NotEnoughEvidence), 35);
    assert_eq!(data.records[0].qa_pairs.len(), 1);
    let a = sample_subset(&data.records, 100, 42).unwrap();
    let b = sample_subset(&data.records, 100, 42).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, sample_subset(&data.records, 100, 43).unwrap());
}

#[test]
fn malformed_records_are_rejected_not_fatal() {
    let text = r#"[
        {"claim": "ok", "label": "Refuted", "claim_date": "25-8-2020"},
        {"claim": "", "label": "Refuted", "claim_date": "25-8-2020"},
        {"claim": "bad label", "label": "Mostly True", "claim_date": "25-8-2020"},
        {"claim": "bad date", "label": "Supported", "claim_date": "August 2020"}
    ]"#;
    let data = parse_dataset(text).unwrap();
    assert_eq!(data.records.len(), 1);
    assert_eq!(data.rejects.iter().map(|r| r.index).collect::<Vec<_>>(), [1, 2, 3]);
    assert!(parse_dataset("{}").is_err());
    assert!(parse_dataset("[1]").is_err());
}
