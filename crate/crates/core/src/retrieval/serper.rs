use async_trait::async_trait;
use chrono::{Days, NaiveDate};
use serde::Deserialize;
use serde_json::json;
use url::Url;

use super::{RawHit, SearchProvider};
use crate::error::SearchError;

pub const SERPER_ENDPOINT: &str = "https://google.serper.dev/search";

/// Serper-compatible Google search client.
pub struct SerperProvider {
    http: reqwest::Client,
    api_key: String,
    endpoint: Url,
}

#[derive(Debug, Deserialize)]
struct SerperItem {
    #[serde(default)]
    title: String,
    #[serde(default)]
    link: String,
    #[serde(default)]
    snippet: String,
    #[serde(default)]
    date: Option<String>,
}

#[derive(Debug, Deserialize)]
struct SerperResponse {
    #[serde(default)]
    organic: Vec<SerperItem>,
}

/// Google `tbs` custom-date-range value restricting results to strictly
/// before `cutoff` (`cd_max` is inclusive, so it is set to the day before).
pub fn date_restriction(cutoff: NaiveDate) -> String {
    let last = cutoff.checked_sub_days(Days::new(1)).unwrap_or(cutoff);
    format!("cdr:1,cd_max:{}", last.format("%m/%d/%Y"))
}

impl SerperProvider {
    pub fn new(api_key: impl Into<String>) -> Self {
        Self {
            http: reqwest::Client::new(),
            api_key: api_key.into(),
            endpoint: Url::parse(SERPER_ENDPOINT).expect("static url"),
        }
    }

    pub fn with_endpoint(mut self, endpoint: &str) -> Result<Self, SearchError> {
        self.endpoint =
            Url::parse(endpoint).map_err(|e| SearchError::Config(format!("invalid endpoint {endpoint:?}: {e}")))?;
        Ok(self)
    }

    pub fn request_body(query: &str, cutoff: Option<NaiveDate>, num: usize) -> serde_json::Value {
        let mut body = json!({ "q": query, "num": num.max(10) });
        if let Some(c) = cutoff {
            body["tbs"] = json!(date_restriction(c));
        }
        body
    }
}

#[async_trait]
impl SearchProvider for SerperProvider {
    async fn search_raw(&self, query: &str, cutoff: Option<NaiveDate>, num: usize) -> Result<Vec<RawHit>, SearchError> {
        let resp = self
            .http
            .post(self.endpoint.clone())
            .header("X-API-KEY", &self.api_key)
            .json(&Self::request_body(query, cutoff, num))
            .send()
            .await
            .map_err(|e| SearchError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        match status {
            200..=299 => {}
            402 | 429 => return Err(SearchError::QuotaExceeded),
            _ => return Err(SearchError::ProviderError(status)),
        }
        let parsed: SerperResponse = resp
            .json()
            .await
            .map_err(|e| SearchError::Transport(format!("bad response body: {e}")))?;
        Ok(parsed
            .organic
            .into_iter()
            .map(|i| RawHit {
                url: i.link,
                title: i.title,
                snippet: i.snippet,
                date: i.date,
            })
            .collect())
    }
}
