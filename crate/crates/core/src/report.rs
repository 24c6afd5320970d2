//! Markdown export of a [`FactCheckReport`].

use std::fmt::Write;

use crate::domain::{FactCheckReport, QueryOrigin, SearchResult};

/// Renders the report as a deterministic Markdown document.
///
/// Sections follow pipeline order: claim, then one `## Iteration n` section
/// per retrieval round, then verdict and justification.
pub fn report_to_markdown(report: &FactCheckReport) -> String {
    let mut out = String::new();
    let claim = report.claim();
    out.push_str("# Fact-Checking Report\n\n## Claim\n\n");
    out.push_str(&quote_block(&claim.text));
    let mut meta = Vec::new();
    if !claim.id.is_empty() {
        meta.push(format!("- Claim ID: {}", claim.id));
    }
    if let Some(date) = claim.claim_date {
        meta.push(format!("- Claim date: {date}"));
    }
    if let Some(speaker) = &claim.speaker {
        meta.push(format!("- Speaker: {speaker}"));
    }
    if let Some(origin) = &claim.origin {
        meta.push(format!("- Origin: {origin}"));
    }
    if !meta.is_empty() {
        out.push('\n');
        out.push_str(&meta.join("\n"));
        out.push('\n');
    }

    for (idx, iteration) in report.iterations().iter().enumerate() {
        let _ = write!(out, "\n## Iteration {}\n\n### Queries\n\n", idx + 1);
        if iteration.queries.is_empty() {
            out.push_str("_No queries._\n");
        }
        for q in &iteration.queries {
            let origin = match q.origin_stage {
                QueryOrigin::Planning => "planning",
                QueryOrigin::Synthesis => "synthesis",
            };
            let _ = writeln!(out, "- `{}` ({origin})", q.text.replace('`', "'"));
        }

        out.push_str("\n### Evidence\n\n");
        if iteration.results.is_empty() {
            out.push_str("_No search results._\n");
        }
        for r in &iteration.results {
            out.push_str(&evidence_line(r));
        }
        if !iteration.excluded_urls.is_empty() {
            out.push_str("\nExcluded by the temporal cutoff:\n\n");
            for url in &iteration.excluded_urls {
                let _ = writeln!(out, "- <{url}>");
            }
        }

        out.push_str("\n### Summaries\n\n");
        if iteration.summaries.is_empty() {
            out.push_str("_No articles summarized._\n");
        }
        for s in &iteration.summaries {
            let mut notes = Vec::new();
            if s.from_snippet {
                notes.push("from snippet");
            }
            if s.date_unknown {
                notes.push("date unknown");
            }
            if s.truncated {
                notes.push("truncated");
            }
            let notes = if notes.is_empty() {
                String::new()
            } else {
                format!(" _({})_", notes.join(", "))
            };
            if s.relevant {
                let _ = writeln!(
                    out,
                    "- [{url}]({url}){notes}: {}",
                    one_line(&s.summary_text),
                    url = s.source_url
                );
            } else {
                let _ = writeln!(out, "- [{url}]({url}){notes}: _not relevant_", url = s.source_url);
            }
        }

        out.push_str("\n### Synthesis\n\n");
        match &iteration.synthesis {
            Some(synthesis) => {
                out.push_str(synthesis.analysis_text.trim_end());
                out.push('\n');
                if !synthesis.followup_queries.is_empty() {
                    out.push_str("\nFollow-up queries:\n\n");
                    for q in &synthesis.followup_queries {
                        let _ = writeln!(out, "- `{}`", q.text.replace('`', "'"));
                    }
                }
            }
            None => out.push_str("_Not reached._\n"),
        }
    }

    out.push_str("\n## Verdict\n\n");
    match report.judgement() {
        Some(j) => {
            let _ = writeln!(out, "**{}**", j.verdict.surface());
            out.push_str("\n## Justification\n\n");
            out.push_str(j.justification.trim_end());
            out.push('\n');
        }
        None => out.push_str("_No verdict._\n"),
    }

    if let Some(failure) = report.failure() {
        let _ = write!(
            out,
            "\n## Failure\n\nThe run failed during {}: {}\n",
            failure.stage, failure.message
        );
    }

    if !report.flags().is_empty() {
        out.push_str("\n## Flags\n\n");
        for flag in report.flags() {
            let _ = writeln!(out, "- {flag:?}");
        }
    }
    out
}

fn evidence_line(r: &SearchResult) -> String {
    let title = if r.title.trim().is_empty() {
        r.url.as_str()
    } else {
        r.title.trim()
    };
    let date = match r.published_date {
        Some(d) => format!(" (published {d})"),
        None if r.date_unknown => " (date unknown)".to_string(),
        None => String::new(),
    };
    let mut line = format!("{}. [{}]({}){date}", r.rank, title.replace(['[', ']'], ""), r.url);
    if !r.snippet.trim().is_empty() {
        line.push_str(": ");
        line.push_str(&one_line(&r.snippet));
    }
    line.push('\n');
    line
}

fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn quote_block(text: &str) -> String {
    text.trim().lines().map(|l| format!("> {l}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::*;

    fn judged(iterations: usize) -> FactCheckReport {
        let claim = Claim::new("c1", "Joe Biden voted for the Iraq War.").unwrap();
        let mut report = FactCheckReport::new(claim, PipelineConfig::default());
        for i in 0..iterations {
            let q = SearchQuery::new(format!("q{i}"), QueryOrigin::Planning, i as u32 + 1).unwrap();
            report
                .push_iteration(Iteration {
                    queries: vec![q],
                    ..Iteration::default()
                })
                .unwrap();
        }
        report
            .finalize(Judgement {
                verdict: Verdict::NotEnoughEvidence,
                justification: "Nothing found. `Not Enough Evidence`".into(),
                raw_output: "Nothing found. `Not Enough Evidence`".into(),
            })
            .unwrap();
        report
    }

    #[test]
    fn single_iteration_heading() {
        let md = report_to_markdown(&judged(1));
        assert!(md.starts_with("# Fact-Checking Report"));
        assert_eq!(md.matches("## Iteration 1").count(), 1);
        assert!(!md.contains("## Iteration 2"));
        assert!(md.contains("**Not Enough Evidence**"));
    }

    #[test]
    fn iterations_in_order() {
        let md = report_to_markdown(&judged(2));
        let first = md.find("## Iteration 1").unwrap();
        let second = md.find("## Iteration 2").unwrap();
        assert!(first < second);
        assert!(second < md.find("## Verdict").unwrap());
    }

    #[test]
    fn deterministic() {
        let report = judged(2);
        assert_eq!(report_to_markdown(&report), report_to_markdown(&report.clone()));
    }
}
