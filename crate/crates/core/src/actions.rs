//! Extraction of `web_search("...")` actions from planning and synthesis
//! answers.
//!
//! Only text inside fenced code blocks is considered. Accepted call forms are
//! `web_search(...)` and `web search(...)` (case-insensitive), with single or
//! double quotes and arbitrary spacing around the argument. `\"`, `\'` and
//! `\\` inside the quotes are unescaped.

use std::collections::HashSet;

use crate::domain::{normalize_query, QueryOrigin, SearchQuery};
use crate::error::ActionError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionBlock {
    pub actions: Vec<SearchQuery>,
    /// Concatenated contents of every fenced block that was scanned.
    pub raw_block: String,
}

/// Contents of every fenced code block, in order.
///
/// A fence is a line whose trimmed start is three or more backticks; anything
/// after the backticks on the opening line is the info string. An unclosed
/// block runs to the end of the text.
pub fn fenced_blocks(text: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in text.lines() {
        let is_fence = line.trim_start().starts_with("```");
        match (&mut current, is_fence) {
            (None, true) => current = Some(Vec::new()),
            (None, false) => {}
            (Some(lines), true) => {
                blocks.push(lines.join("\n"));
                current = None;
            }
            (Some(lines), false) => lines.push(line),
        }
    }
    if let Some(lines) = current {
        blocks.push(lines.join("\n"));
    }
    blocks
}

/// Removes fenced code blocks, returning the surrounding prose.
pub fn strip_fenced_blocks(text: &str) -> String {
    let mut out = Vec::new();
    let mut inside = false;
    for line in text.lines() {
        if line.trim_start().starts_with("```") {
            inside = !inside;
            continue;
        }
        if !inside {
            out.push(line);
        }
    }
    out.join("\n").trim().to_string()
}

const CALL_NAMES: [&str; 2] = ["web_search", "web search"];

/// Every quoted argument of a search call on `line`, unescaped.
fn calls_in_line(line: &str) -> Vec<String> {
    let lower = line.to_ascii_lowercase();
    let bytes = line.as_bytes();
    let mut found = Vec::new();
    let mut pos = 0;
    while pos < line.len() {
        let next = CALL_NAMES
            .iter()
            .filter_map(|name| lower[pos..].find(name).map(|i| (pos + i, name.len())))
            .min();
        let Some((start, name_len)) = next else { break };
        let mut i = skip_spaces(bytes, start + name_len);
        if bytes.get(i) != Some(&b'(') {
            pos = start + name_len;
            continue;
        }
        i = skip_spaces(bytes, i + 1);
        let quote = match bytes.get(i) {
            Some(&q @ (b'"' | b'\'')) => q,
            _ => {
                pos = i;
                continue;
            }
        };
        match read_quoted(line, i + 1, quote) {
            Some((value, after)) => {
                let close = skip_spaces(bytes, after);
                if bytes.get(close) == Some(&b')') {
                    found.push(value);
                    pos = close + 1;
                } else {
                    pos = after;
                }
            }
            None => break,
        }
    }
    found
}

fn skip_spaces(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && (bytes[i] == b' ' || bytes[i] == b'\t') {
        i += 1;
    }
    i
}

/// Reads up to the closing `quote`, returning the unescaped value and the
/// byte index after the quote.
fn read_quoted(line: &str, start: usize, quote: u8) -> Option<(String, usize)> {
    let mut value = String::new();
    let mut chars = line[start..].char_indices();
    while let Some((offset, c)) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some((_, e)) if e == '"' || e == '\'' || e == '\\' => value.push(e),
                Some((_, e)) => {
                    value.push('\\');
                    value.push(e);
                }
                None => value.push('\\'),
            }
        } else if c as u32 == quote as u32 {
            return Some((value, start + offset + 1));
        } else {
            value.push(c);
        }
    }
    None
}

/// Parses the search actions proposed in a thinking-stripped answer.
///
/// Duplicates (case-insensitive, whitespace-normalized) are dropped with the
/// first occurrence kept. Planning must yield at least one query; for
/// synthesis an empty list means the evidence is sufficient.
pub fn parse_actions(llm_answer: &str, stage: QueryOrigin, iteration: u32) -> Result<ActionBlock, ActionError> {
    let blocks = fenced_blocks(llm_answer);
    let mut seen = HashSet::new();
    let mut actions = Vec::new();
    for block in &blocks {
        for line in block.lines() {
            for raw in calls_in_line(line) {
                let text = raw.trim();
                if text.is_empty() {
                    continue;
                }
                if seen.insert(normalize_query(text)) {
                    actions.push(SearchQuery {
                        text: text.to_string(),
                        origin_stage: stage,
                        iteration,
                    });
                }
            }
        }
    }
    if actions.is_empty() && stage == QueryOrigin::Planning {
        return Err(ActionError::NoActions);
    }
    Ok(ActionBlock {
        actions,
        raw_block: blocks.join("\n"),
    })
}
