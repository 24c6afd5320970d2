//! Readable-text and publication-date extraction from HTML.

use chrono::NaiveDate;
use ego_tree::NodeRef;
use scraper::{ElementRef, Html, Node, Selector};
use serde_json::Value;

use super::dates::{find_date_in_text, parse_loose_date};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedPage {
    pub text: String,
    pub published_date: Option<NaiveDate>,
}

const SKIPPED_TAGS: &[&str] = &[
    "script", "style", "noscript", "nav", "header", "footer", "aside", "form", "iframe", "svg", "button", "template",
    "select", "head", "dialog",
];

const BOILERPLATE_TOKENS: &[&str] = &[
    "nav",
    "navbar",
    "menu",
    "footer",
    "sidebar",
    "cookie",
    "cookies",
    "advert",
    "ads",
    "ad",
    "share",
    "social",
    "breadcrumb",
    "breadcrumbs",
    "related",
    "newsletter",
    "subscribe",
    "comments",
    "promo",
];

const BLOCK_TAGS: &[&str] = &[
    "p",
    "div",
    "section",
    "article",
    "main",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "li",
    "ul",
    "ol",
    "br",
    "tr",
    "table",
    "blockquote",
    "pre",
    "dd",
    "dt",
    "dl",
    "figcaption",
    "hr",
];

fn selector(s: &str) -> Selector {
    Selector::parse(s).expect("static selector")
}

/// Extracts the main readable text and the publication date of a page.
///
/// The text root is the longest `<article>`, else `<main>` or
/// `[role=main]`, else `<body>`. Scripts, navigation and elements whose
/// class or id marks them as boilerplate are dropped. Lines are
/// whitespace-normalized and the result is cut to `max_chars` characters.
pub fn extract_article(html: &str, max_chars: usize) -> ExtractedPage {
    let doc = Html::parse_document(html);
    let published_date = published_date(&doc);
    let root = content_root(&doc);
    let mut raw = String::new();
    match root {
        Some(el) => collect_text(*el, &mut raw),
        None => collect_text(doc.tree.root(), &mut raw),
    }
    let text = normalize_lines(&raw);
    ExtractedPage {
        text: truncate_chars(&text, max_chars),
        published_date,
    }
}

fn content_root(doc: &Html) -> Option<ElementRef<'_>> {
    let articles: Vec<ElementRef> = doc.select(&selector("article")).collect();
    if let Some(best) = articles
        .into_iter()
        .max_by_key(|a| text_len(a))
        .filter(|a| text_len(a) > 0)
    {
        return Some(best);
    }
    for s in ["main", "[role=main]", "body"] {
        if let Some(el) = doc.select(&selector(s)).next() {
            return Some(el);
        }
    }
    None
}

fn text_len(el: &ElementRef) -> usize {
    let mut s = String::new();
    collect_text(**el, &mut s);
    s.split_whitespace().map(str::len).sum()
}

fn is_boilerplate(el: &scraper::node::Element) -> bool {
    if SKIPPED_TAGS.contains(&el.name()) {
        return true;
    }
    if el.attr("hidden").is_some() || el.attr("aria-hidden") == Some("true") {
        return true;
    }
    let marks = el.attr("class").into_iter().chain(el.attr("id")).chain(el.attr("role"));
    for value in marks {
        for token in value.split(|c: char| c.is_whitespace() || c == '-' || c == '_') {
            let token = token.to_ascii_lowercase();
            if BOILERPLATE_TOKENS.contains(&token.as_str()) || token == "navigation" {
                return true;
            }
        }
    }
    false
}

fn collect_text(node: NodeRef<'_, Node>, out: &mut String) {
    match node.value() {
        Node::Text(t) => out.push_str(t),
        Node::Element(el) => {
            if is_boilerplate(el) {
                return;
            }
            let block = BLOCK_TAGS.contains(&el.name());
            if block {
                out.push('\n');
            }
            for child in node.children() {
                collect_text(child, out);
            }
            if block {
                out.push('\n');
            }
        }
        Node::Document | Node::Fragment => {
            for child in node.children() {
                collect_text(child, out);
            }
        }
        _ => {}
    }
}

fn normalize_lines(raw: &str) -> String {
    raw.lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

pub(crate) fn truncate_chars(text: &str, max_chars: usize) -> String {
    match text.char_indices().nth(max_chars) {
        Some((idx, _)) => text[..idx].to_string(),
        None => text.to_string(),
    }
}

/// Publication date from, in order: `article:published_time` meta, JSON-LD
/// `datePublished`, then visible bylines (`<time datetime>`, itemprop or
/// date/byline classes).
fn published_date(doc: &Html) -> Option<NaiveDate> {
    for s in [
        r#"meta[property="article:published_time"]"#,
        r#"meta[name="article:published_time"]"#,
    ] {
        if let Some(d) = doc
            .select(&selector(s))
            .filter_map(|m| m.attr("content"))
            .find_map(parse_loose_date)
        {
            return Some(d);
        }
    }

    for script in doc.select(&selector(r#"script[type="application/ld+json"]"#)) {
        let text: String = script.text().collect();
        if let Ok(value) = serde_json::from_str::<Value>(text.trim()) {
            if let Some(d) = json_ld_date(&value) {
                return Some(d);
            }
        }
    }

    for el in doc.select(&selector("[itemprop=datePublished]")) {
        let candidate = el
            .attr("content")
            .or_else(|| el.attr("datetime"))
            .and_then(parse_loose_date)
            .or_else(|| find_date_in_text(&el.text().collect::<String>()));
        if candidate.is_some() {
            return candidate;
        }
    }
    if let Some(d) = doc
        .select(&selector("time[datetime]"))
        .filter_map(|t| t.attr("datetime"))
        .find_map(parse_loose_date)
    {
        return Some(d);
    }
    doc.select(&selector(
        r#"[class*="byline"], [class*="date"], [class*="published"], time"#,
    ))
    .find_map(|el| find_date_in_text(&el.text().collect::<String>()))
}

fn json_ld_date(value: &Value) -> Option<NaiveDate> {
    match value {
        Value::Object(map) => {
            if let Some(d) = map
                .get("datePublished")
                .and_then(Value::as_str)
                .and_then(parse_loose_date)
            {
                return Some(d);
            }
            map.values().find_map(json_ld_date)
        }
        Value::Array(items) => items.iter().find_map(json_ld_date),
        _ => None,
    }
}
