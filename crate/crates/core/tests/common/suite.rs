//! A ten-claim benchmark with a fixture web and a scripted model whose
//! verdicts are forced per claim. Seven of the forced verdicts match gold.

use std::path::Path;

use chrono::{Days, NaiveDate};
use serde_json::{json, Value};

use claimcheck::domain::{LlmStage, Verdict};
use claimcheck::eval::AveritecRecord;
use claimcheck::llm::ScriptedLlm;
use claimcheck::retrieval::FixtureEntry;

use super::{page, planning_claim, record_claim, write_world};

pub struct SuiteClaim {
    pub text: &'static str,
    pub gold: Verdict,
    pub forced: Verdict,
    /// Whether synthesis asks for one follow-up search.
    pub follow_up: bool,
}

use Verdict::*;

pub const SUITE: [SuiteClaim; 10] = [
    SuiteClaim {
        text: "The city council approved a cycling budget in March.",
        gold: Supported,
        forced: Supported,
        follow_up: true,
    },
    SuiteClaim {
        text: "The governor vetoed the school meals bill twice.",
        gold: Refuted,
        forced: Refuted,
        follow_up: false,
    },
    SuiteClaim {
        text: "A new vaccine causes memory loss in adults.",
        gold: NotEnoughEvidence,
        forced: NotEnoughEvidence,
        follow_up: true,
    },
    SuiteClaim {
        text: "Crime fell by half after the curfew was introduced.",
        gold: ConflictingEvidence,
        forced: ConflictingEvidence,
        follow_up: false,
    },
    SuiteClaim {
        text: "The senator voted against the infrastructure package.",
        gold: Supported,
        forced: Supported,
        follow_up: false,
    },
    SuiteClaim {
        text: "The minister said unemployment hit a record low.",
        gold: Refuted,
        forced: Refuted,
        follow_up: true,
    },
    SuiteClaim {
        text: "Tap water in the capital contains lithium.",
        gold: Refuted,
        forced: Refuted,
        follow_up: false,
    },
    SuiteClaim {
        text: "The stadium was built entirely with public money.",
        gold: Supported,
        forced: Refuted,
        follow_up: true,
    },
    SuiteClaim {
        text: "The mayor banned cars from the old town.",
        gold: Refuted,
        forced: NotEnoughEvidence,
        follow_up: false,
    },
    SuiteClaim {
        text: "Exports doubled in the last quarter.",
        gold: NotEnoughEvidence,
        forced: Supported,
        follow_up: false,
    },
];

pub const SUITE_ACCURACY: f64 = 0.7;

pub fn claim_date(id: usize) -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 6, 15).unwrap() + Days::new(id as u64)
}

pub fn records() -> Vec<AveritecRecord> {
    SUITE
        .iter()
        .enumerate()
        .map(|(id, c)| AveritecRecord {
            id,
            claim_text: c.text.to_string(),
            label: c.gold,
            claim_date: claim_date(id),
            speaker: Some(format!("Speaker {id}")),
            reporting_source: Some("Example Times".into()),
            location: Some("GB".into()),
            qa_pairs: Vec::new(),
            justification: String::new(),
        })
        .collect()
}

pub fn planning_query(text: &str) -> String {
    format!("{} fact check", text.trim_end_matches('.'))
}

pub fn follow_up_query(text: &str) -> String {
    format!("{} background", text.trim_end_matches('.'))
}

/// URL of the article dated exactly on the claim date, which must never be
/// admitted.
pub fn boundary_url(id: usize) -> String {
    format!("https://news.example/{id}/same-day")
}

/// Per claim: one older relevant article, one off-topic article, one
/// article on the claim date (excluded after fetching), one after it
/// (excluded at search time), and for follow-up claims a background
/// article.
pub fn write_suite_world(dir: &Path) {
    for (id, c) in SUITE.iter().enumerate() {
        let date = claim_date(id);
        let iso = |d: NaiveDate| d.format("%Y-%m-%d").to_string();
        let before = iso(date - Days::new(30));
        let after = iso(date + Days::new(3));
        write_world(
            dir,
            &[(
                &planning_query(c.text),
                vec![
                    page(
                        &format!("https://news.example/{id}/report"),
                        Some(&before),
                        &format!("<html><body><article><p>Officials addressed claim {id} in detail. Records from the period were published.</p></article></body></html>"),
                    ),
                    page(
                        &format!("https://blog.example/{id}/recipes"),
                        Some(&before),
                        "<p>This page is unrelated cooking advice. Stir well.</p>",
                    ),
                    // Undated in search results; the page itself carries the claim date.
                    FixtureEntry {
                        page_date: Some(iso(date)),
                        ..page(&boundary_url(id), None, "Same-day coverage of the claim. It repeats the claim.")
                    },
                    page(
                        &format!("https://news.example/{id}/fact-check"),
                        Some(&after),
                        "A later fact check rated the claim. It must stay out of the record.",
                    ),
                ],
            )],
        );
        if c.follow_up {
            write_world(
                dir,
                &[(
                    &follow_up_query(c.text),
                    vec![page(
                        &format!("https://archive.example/{id}/background"),
                        Some(&before),
                        &format!("Background on claim {id} shows a long history. Earlier debates were similar."),
                    )],
                )],
            );
        }
    }
}

fn suite_index(claim: &str) -> usize {
    SUITE
        .iter()
        .position(|c| c.text == claim)
        .unwrap_or_else(|| panic!("unknown claim {claim:?}"))
}

/// The scripted model for the suite. Synthesis always proposes the same
/// follow-up for follow-up claims, so the second round is a duplicate and
/// the loop stops.
pub fn suite_llm() -> ScriptedLlm {
    ScriptedLlm::new(|req, _| {
        Ok(match req.stage {
            LlmStage::Planning => {
                let claim = planning_claim(&req.prompt);
                format!(
                    "Checking the claim.\n```\nweb_search(\"{}\")\n```",
                    planning_query(&claim)
                )
            }
            LlmStage::Summarization => {
                let text = super::summarized_text(&req.prompt);
                if text.contains("unrelated") {
                    "NONE".to_string()
                } else {
                    claimcheck::domain::split_sentences(&text)[0].to_string()
                }
            }
            LlmStage::Synthesis => {
                let c = &SUITE[suite_index(&record_claim(&req.prompt))];
                if c.follow_up {
                    format!(
                        "The record is thin.\n```\nweb_search(\"{}\")\n```",
                        follow_up_query(c.text)
                    )
                } else {
                    "The record covers the claim.".to_string()
                }
            }
            LlmStage::Evaluation => {
                let c = &SUITE[suite_index(&record_claim(&req.prompt))];
                format!("Weighing the record against the claim. `{}`", c.forced.surface())
            }
        })
    })
}

/// Model calls made for one suite claim: planning, two summaries in
/// round one (plus one for the follow-up round), one synthesis per round
/// and evaluation.
pub fn suite_calls(c: &SuiteClaim) -> usize {
    if c.follow_up {
        1 + 2 + 1 + 1 + 1 + 1
    } else {
        1 + 2 + 1 + 1
    }
}

/// The AVeriTeC-shaped file used when the official dev file is absent:
/// 500 records, 122 Supported, 305 Refuted, 38 Conflicting and 35 Not
/// Enough Evidence, interleaved.
pub fn synthetic_dev_json() -> String {
    let mut labels: Vec<&str> = Vec::new();
    for (label, n) in [
        ("Supported", 122),
        ("Refuted", 305),
        ("Conflicting Evidence/Cherrypicking", 38),
        ("Not Enough Evidence", 35),
    ] {
        labels.extend(std::iter::repeat_n(label, n));
    }
    // Deterministic interleave: stride through the list with a step coprime to 500.
    let records: Vec<Value> = (0..500)
        .map(|i| {
            let label = labels[(i * 7) % 500];
            json!({
                "claim": format!("Synthetic claim {i}."),
                "label": label,
                "claim_date": format!("{}-{}-2020", 1 + i % 28, 1 + i % 12),
                "speaker": "Someone",
                "reporting_source": "Somewhere",
                "location_ISO_code": "US",
                "questions": [{"question": "Q?", "answers": [{"answer": "A."}]}],
                "justification": "J."
            })
        })
        .collect();
    serde_json::to_string(&records).unwrap()
}
