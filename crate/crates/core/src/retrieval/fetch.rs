use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use async_trait::async_trait;
use tokio::sync::Semaphore;
use url::Url;

use super::extract::{extract_article, truncate_chars};
use super::robots::RobotsRules;
use super::{FetchLimits, FetchStatus, FetchedArticle, PageFetcher};

pub const USER_AGENT: &str = "ClaimCheckBot/0.1";
const ROBOTS_TOKEN: &str = "claimcheckbot";

/// HTTP fetcher honoring robots.txt, with per-host and global concurrency
/// ceilings.
pub struct HttpFetcher {
    http: reqwest::Client,
    global: Arc<Semaphore>,
    per_host_limit: usize,
    hosts: Mutex<HashMap<String, Arc<Semaphore>>>,
    robots: tokio::sync::Mutex<HashMap<String, Arc<RobotsRules>>>,
    respect_robots: bool,
}

impl Default for HttpFetcher {
    fn default() -> Self {
        Self::new(8, 2)
    }
}

impl HttpFetcher {
    pub fn new(global_limit: usize, per_host_limit: usize) -> Self {
        let http = reqwest::Client::builder()
            .user_agent(USER_AGENT)
            .redirect(reqwest::redirect::Policy::limited(5))
            .build()
            .expect("http client builds");
        Self {
            http,
            global: Arc::new(Semaphore::new(global_limit.max(1))),
            per_host_limit: per_host_limit.max(1),
            hosts: Mutex::new(HashMap::new()),
            robots: tokio::sync::Mutex::new(HashMap::new()),
            respect_robots: true,
        }
    }

    pub fn ignore_robots(mut self) -> Self {
        self.respect_robots = false;
        self
    }

    fn host_permits(&self, host: &str) -> Arc<Semaphore> {
        let mut hosts = self.hosts.lock().expect("host map lock");
        hosts
            .entry(host.to_string())
            .or_insert_with(|| Arc::new(Semaphore::new(self.per_host_limit)))
            .clone()
    }

    async fn robots_for(&self, url: &Url, timeout: Duration) -> Arc<RobotsRules> {
        let origin = url.origin().ascii_serialization();
        let mut cache = self.robots.lock().await;
        if let Some(rules) = cache.get(&origin) {
            return rules.clone();
        }
        let rules = match self
            .http
            .get(format!("{origin}/robots.txt"))
            .timeout(timeout.min(Duration::from_secs(10)))
            .send()
            .await
        {
            Ok(resp) if resp.status().is_success() => match resp.text().await {
                Ok(body) => RobotsRules::parse(&body, ROBOTS_TOKEN),
                Err(_) => RobotsRules::allow_all(),
            },
            _ => RobotsRules::allow_all(),
        };
        let rules = Arc::new(rules);
        cache.insert(origin, rules.clone());
        rules
    }

    async fn fetch_inner(&self, url: &Url, limits: &FetchLimits) -> FetchedArticle {
        let raw_url = url.as_str();
        if self.respect_robots {
            let rules = self.robots_for(url, limits.timeout).await;
            if !rules.is_allowed(url.path()) {
                tracing::debug!(url = raw_url, "disallowed by robots.txt");
                return FetchedArticle::failed(raw_url, FetchStatus::Unreachable);
            }
        }
        let mut resp = match self.http.get(url.clone()).timeout(limits.timeout).send().await {
            Ok(r) if r.status().is_success() => r,
            Ok(r) => {
                tracing::debug!(url = raw_url, status = %r.status(), "fetch failed");
                return FetchedArticle::failed(raw_url, FetchStatus::Unreachable);
            }
            Err(e) => {
                tracing::debug!(url = raw_url, error = %e, "fetch failed");
                return FetchedArticle::failed(raw_url, FetchStatus::Unreachable);
            }
        };
        let content_type = resp
            .headers()
            .get(reqwest::header::CONTENT_TYPE)
            .and_then(|v| v.to_str().ok())
            .unwrap_or("text/html")
            .to_ascii_lowercase();
        let is_html = content_type.contains("html") || content_type.contains("xml");
        let is_plain = content_type.starts_with("text/plain");
        if !is_html && !is_plain {
            return FetchedArticle::failed(raw_url, FetchStatus::NonHtml);
        }
        let mut bytes = Vec::new();
        loop {
            match resp.chunk().await {
                Ok(Some(chunk)) => {
                    let room = limits.max_bytes.saturating_sub(bytes.len());
                    bytes.extend_from_slice(&chunk[..chunk.len().min(room)]);
                    if bytes.len() >= limits.max_bytes {
                        break;
                    }
                }
                Ok(None) => break,
                Err(_) if !bytes.is_empty() => break,
                Err(_) => return FetchedArticle::failed(raw_url, FetchStatus::Unreachable),
            }
        }
        let body = String::from_utf8_lossy(&bytes);
        article_from_body(raw_url, &body, is_html, limits)
    }
}

/// Builds an article from a downloaded (or fixture) body.
pub(crate) fn article_from_body(url: &str, body: &str, is_html: bool, limits: &FetchLimits) -> FetchedArticle {
    let (text, published_date) = if is_html {
        let page = extract_article(body, limits.max_chars);
        (page.text, page.published_date)
    } else {
        let normalized = body
            .lines()
            .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join("\n");
        (truncate_chars(&normalized, limits.max_chars), None)
    };
    let fetch_status = if text.is_empty() {
        FetchStatus::Empty
    } else {
        FetchStatus::Ok
    };
    FetchedArticle {
        url: url.to_string(),
        extracted_text: text,
        published_date,
        fetch_status,
    }
}

#[async_trait]
impl PageFetcher for HttpFetcher {
    async fn fetch(&self, url: &str, limits: &FetchLimits) -> FetchedArticle {
        let parsed = match Url::parse(url) {
            Ok(u) if matches!(u.scheme(), "http" | "https") && u.host_str().is_some() => u,
            _ => return FetchedArticle::failed(url, FetchStatus::Unreachable),
        };
        let host = parsed.host_str().unwrap_or_default().to_string();
        let host_permits = self.host_permits(&host);
        let _global = self.global.acquire().await.expect("semaphore open");
        let _host = host_permits.acquire().await.expect("semaphore open");
        self.fetch_inner(&parsed, limits).await
    }
}

/// Fetches one URL with a fresh [`HttpFetcher`].
pub async fn fetch_and_extract(url: &str, limits: &FetchLimits) -> FetchedArticle {
    HttpFetcher::default().fetch(url, limits).await
}
