//! Offline search provider backed by a directory of JSON files.
//!
//! Each query maps to `<dir>/<fixture_file_name(query)>`:
//!
//! ```json
//! {
//!   "query": "joe biden iraq war vote",
//!   "results": [
//!     {"url": "https://example.org/a", "title": "A", "snippet": "...",
//!      "date": "2019-01-01", "body": "<html>...</html>", "page_date": "2019-01-01"}
//!   ]
//! }
//! ```
//!
//! `date` is the date reported by the search engine; `body` is the page
//! served when the URL is fetched (HTML when it starts with `<`, plain text
//! otherwise). A missing file means no results. Results without a body
//! are unreachable when fetched.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use async_trait::async_trait;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::fetch::article_from_body;
use super::{parse_loose_date, FetchLimits, FetchStatus, FetchedArticle, PageFetcher, RawHit, SearchProvider};
use crate::domain::normalize_query;
use crate::error::SearchError;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub url: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub snippet: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
    /// Overrides the date extracted from `body`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub page_date: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FixtureFile {
    pub query: String,
    pub results: Vec<FixtureEntry>,
}

/// File name for a query: the normalized query with every run of
/// non-alphanumeric characters replaced by `_`, capped at 120 characters.
pub fn fixture_file_name(query: &str) -> String {
    let normalized = normalize_query(query);
    let mut slug = String::new();
    for c in normalized.chars() {
        if c.is_alphanumeric() {
            slug.push(c);
        } else if !slug.ends_with('_') {
            slug.push('_');
        }
    }
    let slug: String = slug.trim_matches('_').chars().take(120).collect();
    if slug.is_empty() {
        "_empty.json".to_string()
    } else {
        format!("{slug}.json")
    }
}

pub struct FixtureProvider {
    dir: PathBuf,
    pages: HashMap<String, (String, Option<NaiveDate>)>,
}

impl FixtureProvider {
    /// Opens a fixture directory and indexes every inline page body.
    pub fn open(dir: &Path) -> Result<Self, SearchError> {
        let entries = std::fs::read_dir(dir).map_err(|e| SearchError::Fixture(format!("{}: {e}", dir.display())))?;
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut pages = HashMap::new();
        for path in paths {
            let file = read_fixture(&path)?;
            for entry in file.results {
                if let Some(body) = entry.body {
                    let page_date = entry.page_date.as_deref().and_then(parse_loose_date);
                    pages.entry(entry.url).or_insert((body, page_date));
                }
            }
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            pages,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes `file` under its query's file name.
    pub fn write(dir: &Path, file: &FixtureFile) -> std::io::Result<PathBuf> {
        let path = dir.join(fixture_file_name(&file.query));
        std::fs::write(&path, serde_json::to_string_pretty(file)?)?;
        Ok(path)
    }
}

fn read_fixture(path: &Path) -> Result<FixtureFile, SearchError> {
    let text = std::fs::read_to_string(path).map_err(|e| SearchError::Fixture(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| SearchError::Fixture(format!("{}: {e}", path.display())))
}

#[async_trait]
impl SearchProvider for FixtureProvider {
    async fn search_raw(
        &self,
        query: &str,
        _cutoff: Option<NaiveDate>,
        _num: usize,
    ) -> Result<Vec<RawHit>, SearchError> {
        let path = self.dir.join(fixture_file_name(query));
        if !path.exists() {
            return Ok(Vec::new());
        }
        let file = read_fixture(&path)?;
        if normalize_query(&file.query) != normalize_query(query) {
            return Err(SearchError::Fixture(format!(
                "{} holds query {:?}, expected {:?}",
                path.display(),
                file.query,
                query
            )));
        }
        Ok(file
            .results
            .into_iter()
            .map(|e| RawHit {
                url: e.url,
                title: e.title,
                snippet: e.snippet,
                date: e.date,
            })
            .collect())
    }
}

#[async_trait]
impl PageFetcher for FixtureProvider {
    async fn fetch(&self, url: &str, limits: &FetchLimits) -> FetchedArticle {
        match self.pages.get(url) {
            Some((body, page_date)) => {
                let is_html = body.trim_start().starts_with('<');
                let mut article = article_from_body(url, body, is_html, limits);
                if page_date.is_some() {
                    article.published_date = *page_date;
                }
                article
            }
            None => FetchedArticle::failed(url, FetchStatus::Unreachable),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_names() {
        assert_eq!(fixture_file_name("Joe  Biden, Iraq War?"), "joe_biden_iraq_war.json");
        assert_eq!(fixture_file_name("???"), "_empty.json");
    }

    #[tokio::test]
    async fn serves_results_and_pages() {
        let dir = tempfile::tempdir().unwrap();
        FixtureProvider::write(
            dir.path(),
            &FixtureFile {
                query: "q1".into(),
                results: vec![
                    FixtureEntry {
                        url: "https://a".into(),
                        body: Some("<p>Body A.</p>".into()),
                        page_date: Some("2019-02-02".into()),
                        ..FixtureEntry::default()
                    },
                    FixtureEntry {
                        url: "https://b".into(),
                        ..FixtureEntry::default()
                    },
                ],
            },
        )
        .unwrap();
        let p = FixtureProvider::open(dir.path()).unwrap();
        let hits = p.search_raw("Q1", None, 3).await.unwrap();
        assert_eq!(hits.len(), 2);
        assert!(p.search_raw("other", None, 3).await.unwrap().is_empty());
        let limits = FetchLimits::default();
        let a = p.fetch("https://a", &limits).await;
        assert_eq!(a.fetch_status, FetchStatus::Ok);
        assert_eq!(a.extracted_text, "Body A.");
        assert_eq!(a.published_date, Some("2019-02-02".parse().unwrap()));
        assert_eq!(
            p.fetch("https://b", &limits).await.fetch_status,
            FetchStatus::Unreachable
        );
    }

    #[tokio::test]
    async fn query_mismatch_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("q1.json"), r#"{"query": "q-1", "results": []}"#).unwrap();
        let p = FixtureProvider::open(dir.path()).unwrap();
        // "q-1" normalizes differently from "q1" even though the slug collides.
        assert!(matches!(
            p.search_raw("q1", None, 3).await,
            Err(SearchError::Fixture(_))
        ));
    }
}
