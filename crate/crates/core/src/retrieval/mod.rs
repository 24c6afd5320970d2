//! Query execution: search providers, the temporal cutoff, and page fetching.

mod dates;
mod extract;
mod fetch;
mod fixture;
mod robots;
mod serper;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use async_trait::async_trait;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::domain::{CutoffMode, SearchQuery, SearchResult};
use crate::error::SearchError;

pub use dates::parse_loose_date;
pub use extract::{extract_article, ExtractedPage};
pub use fetch::{fetch_and_extract, HttpFetcher, USER_AGENT};
pub use fixture::{fixture_file_name, FixtureEntry, FixtureFile, FixtureProvider};
pub use robots::RobotsRules;
pub use serper::{date_restriction, SerperProvider, SERPER_ENDPOINT};

/// A hit as returned by a provider, before ranking and date filtering.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawHit {
    pub url: String,
    pub title: String,
    pub snippet: String,
    pub date: Option<String>,
}

#[async_trait]
pub trait SearchProvider: Send + Sync {
    /// Runs one query. `cutoff`, when present, should be pushed down to the
    /// provider as a date restriction.
    async fn search_raw(&self, query: &str, cutoff: Option<NaiveDate>, num: usize) -> Result<Vec<RawHit>, SearchError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FetchStatus {
    Ok,
    Unreachable,
    NonHtml,
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchedArticle {
    pub url: String,
    pub extracted_text: String,
    pub published_date: Option<NaiveDate>,
    pub fetch_status: FetchStatus,
}

impl FetchedArticle {
    pub fn failed(url: impl Into<String>, status: FetchStatus) -> Self {
        Self {
            url: url.into(),
            extracted_text: String::new(),
            published_date: None,
            fetch_status: status,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FetchLimits {
    pub max_bytes: usize,
    pub timeout: Duration,
    /// Extracted text is cut to this many characters.
    pub max_chars: usize,
}

impl Default for FetchLimits {
    fn default() -> Self {
        Self {
            max_bytes: 2 * 1024 * 1024,
            timeout: Duration::from_secs(20),
            max_chars: 12_000,
        }
    }
}

/// Downloads pages and extracts their readable text. Never fails: problems
/// are reported through [`FetchStatus`].
#[async_trait]
pub trait PageFetcher: Send + Sync {
    async fn fetch(&self, url: &str, limits: &FetchLimits) -> FetchedArticle;
}

/// Provider with no results and no reachable pages, for dry runs.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoSearch;

#[async_trait]
impl SearchProvider for NoSearch {
    async fn search_raw(
        &self,
        _query: &str,
        _cutoff: Option<NaiveDate>,
        _num: usize,
    ) -> Result<Vec<RawHit>, SearchError> {
        Ok(Vec::new())
    }
}

#[async_trait]
impl PageFetcher for NoSearch {
    async fn fetch(&self, url: &str, _limits: &FetchLimits) -> FetchedArticle {
        FetchedArticle::failed(url, FetchStatus::Unreachable)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProviderKind {
    SerperCompatible,
    Fixture,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchProviderConfig {
    pub provider: ProviderKind,
    pub api_key: Option<String>,
    pub top_k: usize,
    pub cutoff_mode: CutoffMode,
    pub fixture_dir: Option<PathBuf>,
    /// Overrides the Serper endpoint, e.g. for a self-hosted proxy.
    pub endpoint: Option<String>,
}

/// A search provider and, for fixtures, the matching page fetcher.
pub type SearchBackend = (Arc<dyn SearchProvider>, Option<Arc<dyn PageFetcher>>);

impl SearchProviderConfig {
    pub fn serper(api_key: impl Into<String>) -> Self {
        Self {
            provider: ProviderKind::SerperCompatible,
            api_key: Some(api_key.into()),
            top_k: 3,
            cutoff_mode: CutoffMode::Strict,
            fixture_dir: None,
            endpoint: None,
        }
    }

    pub fn fixture(dir: impl Into<PathBuf>) -> Self {
        Self {
            provider: ProviderKind::Fixture,
            api_key: None,
            top_k: 3,
            cutoff_mode: CutoffMode::Strict,
            fixture_dir: Some(dir.into()),
            endpoint: None,
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.top_k == 0 {
            return Err(SearchError::Config("top_k must be >= 1".into()));
        }
        match self.provider {
            ProviderKind::Fixture if self.fixture_dir.is_none() => {
                Err(SearchError::Config("fixture provider needs a fixture directory".into()))
            }
            ProviderKind::SerperCompatible if self.api_key.as_deref().is_none_or(str::is_empty) => {
                Err(SearchError::Config("SERPER_API_KEY is not set".into()))
            }
            _ => Ok(()),
        }
    }

    /// Builds the provider and, for fixtures, the matching page fetcher.
    pub fn build(&self) -> Result<SearchBackend, SearchError> {
        self.validate()?;
        match self.provider {
            ProviderKind::SerperCompatible => {
                let mut provider = SerperProvider::new(self.api_key.clone().unwrap_or_default());
                if let Some(endpoint) = &self.endpoint {
                    provider = provider.with_endpoint(endpoint)?;
                }
                Ok((Arc::new(provider), None))
            }
            ProviderKind::Fixture => {
                let dir = self.fixture_dir.as_ref().expect("validated");
                let provider = Arc::new(FixtureProvider::open(dir)?);
                Ok((provider.clone(), Some(provider)))
            }
        }
    }
}

/// Runs a query and applies ranking, truncation and the temporal cutoff.
///
/// With a cutoff in `Strict` mode the cutoff is pushed to the provider and
/// results dated on or after it are dropped afterwards. Results without a
/// parseable date are kept and flagged `date_unknown`. At most `top_k`
/// results are returned, ranked 1.. in provider order.
pub async fn search(
    provider: &dyn SearchProvider,
    query: &SearchQuery,
    cutoff: Option<NaiveDate>,
    top_k: usize,
    mode: CutoffMode,
) -> Result<Vec<SearchResult>, SearchError> {
    let active_cutoff = match mode {
        CutoffMode::Strict => cutoff,
        CutoffMode::Off => None,
    };
    let hits = provider.search_raw(&query.text, active_cutoff, top_k).await?;
    Ok(rank_hits(hits, &query.text, active_cutoff, top_k))
}

pub(crate) fn rank_hits(hits: Vec<RawHit>, query: &str, cutoff: Option<NaiveDate>, top_k: usize) -> Vec<SearchResult> {
    hits.into_iter()
        .filter(|h| !h.url.trim().is_empty())
        .map(|h| {
            let date = h.date.as_deref().and_then(parse_loose_date);
            (h, date)
        })
        .filter(|(_, date)| match (cutoff, date) {
            (Some(c), Some(d)) => *d < c,
            _ => true,
        })
        .take(top_k)
        .enumerate()
        .map(|(i, (h, date))| SearchResult {
            url: h.url,
            title: h.title,
            snippet: h.snippet,
            published_date: date,
            rank: i as u32 + 1,
            query: query.to_string(),
            date_unknown: date.is_none(),
        })
        .collect()
}

/// Whether an article may be used as evidence for a claim with `cutoff`.
///
/// Admitted iff the cutoff is off or absent, or the article's date is known
/// and strictly before the cutoff. Articles with no known date are admitted;
/// callers flag them as date-unknown.
pub fn admit_evidence(published_date: Option<NaiveDate>, cutoff: Option<NaiveDate>, mode: CutoffMode) -> bool {
    match (mode, cutoff, published_date) {
        (CutoffMode::Off, _, _) | (_, None, _) => true,
        (CutoffMode::Strict, Some(c), Some(d)) => d < c,
        (CutoffMode::Strict, Some(_), None) => true,
    }
}

/// [`admit_evidence`] applied to a fetched article.
pub fn admit_article(article: &FetchedArticle, cutoff: Option<NaiveDate>, mode: CutoffMode) -> bool {
    admit_evidence(article.published_date, cutoff, mode)
}
