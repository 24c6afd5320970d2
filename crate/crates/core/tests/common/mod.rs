#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use claimcheck::llm::ScriptedLlm;
use claimcheck::pipeline::{FrozenClock, Pipeline};
use claimcheck::retrieval::{FixtureEntry, FixtureFile, FixtureProvider};

pub mod suite;

/// Writes one fixture file per query.
pub fn write_world(dir: &Path, queries: &[(&str, Vec<FixtureEntry>)]) {
    for (query, results) in queries {
        FixtureProvider::write(
            dir,
            &FixtureFile {
                query: query.to_string(),
                results: results.clone(),
            },
        )
        .unwrap();
    }
}

pub fn page(url: &str, date: Option<&str>, body: &str) -> FixtureEntry {
    FixtureEntry {
        url: url.into(),
        title: format!("Title of {url}"),
        snippet: format!("Snippet of {url}."),
        date: date.map(str::to_string),
        body: Some(body.into()),
        page_date: None,
    }
}

/// Deterministic pipeline over a fixture directory.
pub fn pipeline(llm: Arc<ScriptedLlm>, fixtures: &Path) -> Pipeline {
    let provider = Arc::new(FixtureProvider::open(fixtures).unwrap());
    Pipeline::new(llm, provider.clone(), provider).with_clock(Arc::new(FrozenClock))
}

/// The claim named in a planning prompt (its last `Claim: ` line).
pub fn planning_claim(prompt: &str) -> String {
    prompt
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix("Claim: "))
        .unwrap_or_default()
        .to_string()
}

/// The claim at the head of the record embedded in a prompt.
pub fn record_claim(prompt: &str) -> String {
    let record = prompt.split("Record:\n").nth(1).unwrap_or_default();
    record
        .lines()
        .find_map(|l| l.strip_prefix("Claim: "))
        .unwrap_or_default()
        .to_string()
}

/// The URL being summarized in a summarization prompt.
pub fn summarized_url(prompt: &str) -> String {
    prompt
        .split_once("\nEvidence:\n")
        .and_then(|(_, rest)| rest.lines().next())
        .unwrap_or_default()
        .to_string()
}

/// The article text in a summarization prompt.
pub fn summarized_text(prompt: &str) -> String {
    prompt
        .split_once("\nEvidence:\n")
        .and_then(|(_, rest)| rest.split_once('\n'))
        .map(|(_, rest)| rest.split("\n\nRecord:\n").next().unwrap_or_default().to_string())
        .unwrap_or_default()
}

pub fn search_block(queries: &[&str]) -> String {
    let calls: Vec<String> = queries.iter().map(|q| format!("web_search(\"{q}\")")).collect();
    format!("I will search.\n```\n{}\n```", calls.join("\n"))
}
