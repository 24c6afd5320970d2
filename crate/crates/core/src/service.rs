//! HTTP facade over the pipeline.
//!
//! | Method | Path                          | Purpose                              |
//! |--------|-------------------------------|--------------------------------------|
//! | POST   | `/api/runs`                   | submit a claim, returns `run_id`     |
//! | GET    | `/api/runs/{id}`              | run status                           |
//! | GET    | `/api/runs/{id}/events`       | server-sent [`ProgressEvent`] stream |
//! | GET    | `/api/runs/{id}/report`       | `?format=json` or `?format=markdown` |
//!
//! Each SSE message carries one event: `id` is the event's `seq` and `data`
//! its JSON encoding. A stream replays past events, follows live ones and
//! closes after the `Done` or `Failed` event. Reconnecting with
//! `Last-Event-ID: n` (or `?last_event_id=n`) resumes at event `n + 1`.
//!
//! Runs are persisted under `<data_dir>/<run_id>/` as `run.json`,
//! `events.jsonl`, `report.json` and `report.md`.

use std::collections::{HashMap, VecDeque};
use std::convert::Infallible;
use std::io::Write as _;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::extract::{ConnectInfo, Path as UrlPath, Query, State};
use axum::http::{header, Extensions, HeaderMap, HeaderValue, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, NaiveDate, Utc};
use futures::Stream;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::{mpsc, watch};
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;

use crate::domain::{Claim, CutoffMode, FactCheckReport, PipelineConfig, RunFailure, Stage, ThinkMatrix};
use crate::error::ServiceError;
use crate::pipeline::{Pipeline, ProgressEvent};
use crate::report::report_to_markdown;

pub const MAX_CLAIM_CHARS: usize = 2000;
const INTERRUPTED: &str = "run interrupted by a service restart";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunStatus {
    Queued,
    Running,
    Done,
    Failed,
}

impl RunStatus {
    pub fn is_terminal(self) -> bool {
        matches!(self, RunStatus::Done | RunStatus::Failed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHandle {
    pub run_id: String,
    pub status: RunStatus,
    pub created_at: DateTime<Utc>,
    pub claim: Claim,
    pub config: PipelineConfig,
}

/// Per-client submission limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RateLimit {
    pub max_concurrent: usize,
    pub per_hour: usize,
}

impl Default for RateLimit {
    fn default() -> Self {
        Self {
            max_concurrent: 3,
            per_hour: 30,
        }
    }
}

impl FromStr for RateLimit {
    type Err = ServiceError;

    /// `"<concurrent>/<per hour>"`, e.g. `"3/30"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ServiceError::Config {
            name: "RATE_LIMIT",
            reason: format!("expected <concurrent>/<per hour>, got {s:?}"),
        };
        let (c, h) = s.split_once('/').ok_or_else(bad)?;
        Ok(Self {
            max_concurrent: c.trim().parse().map_err(|_| bad())?,
            per_hour: h.trim().parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    pub worker_pool: usize,
    pub rate_limit: RateLimit,
    /// Built web console assets, served for non-API paths.
    pub static_dir: Option<PathBuf>,
    /// Allowed browser origin; any origin when unset.
    pub cors_origin: Option<String>,
    /// Template for submitted runs; `think` and `cutoff_mode` may be
    /// overridden per request.
    pub base_config: PipelineConfig,
}

impl ServiceConfig {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        Self {
            data_dir: data_dir.into(),
            worker_pool: 2,
            rate_limit: RateLimit::default(),
            static_dir: None,
            cors_origin: None,
            base_config: PipelineConfig::default(),
        }
    }
}

struct RunState {
    handle: RunHandle,
    events: Vec<ProgressEvent>,
    report_json: Option<Arc<str>>,
    report_md: Option<Arc<str>>,
    client: Option<IpAddr>,
}

struct RunSlot {
    state: Mutex<RunState>,
    latest: watch::Sender<u64>,
    dir: PathBuf,
}

impl RunSlot {
    fn new(state: RunState, dir: PathBuf) -> Arc<Self> {
        let last = state.events.last().map_or(0, |e| e.seq);
        Arc::new(Self {
            state: Mutex::new(state),
            latest: watch::channel(last).0,
            dir,
        })
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, RunState> {
        self.state.lock().expect("run state lock")
    }

    fn publish(&self, event: ProgressEvent) {
        let seq = event.seq;
        {
            let mut state = self.lock();
            append_event(&self.dir, &event);
            state.events.push(event);
        }
        self.latest.send_replace(seq);
    }

    /// Events after `seq`, and whether the run has reached a terminal
    /// status.
    fn events_after(&self, seq: u64) -> (Vec<ProgressEvent>, bool) {
        let state = self.lock();
        let events = state.events.iter().filter(|e| e.seq > seq).cloned().collect();
        (events, state.handle.status.is_terminal())
    }
}

struct Inner {
    runs: RwLock<HashMap<String, Arc<RunSlot>>>,
    pipeline: Arc<Pipeline>,
    config: ServiceConfig,
    queue: mpsc::UnboundedSender<String>,
    submissions: Mutex<HashMap<IpAddr, VecDeque<Instant>>>,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

#[derive(Debug)]
pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

fn bad_request(msg: impl Into<String>) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, msg.into())
}

fn not_found() -> ApiError {
    ApiError(StatusCode::NOT_FOUND, "unknown run id".into())
}

fn write_atomic(path: &Path, contents: &str) {
    let tmp = path.with_extension("tmp");
    let result = std::fs::write(&tmp, contents).and_then(|()| std::fs::rename(&tmp, path));
    if let Err(e) = result {
        tracing::error!(path = %path.display(), error = %e, "persisting run state failed");
    }
}

fn append_event(dir: &Path, event: &ProgressEvent) {
    let path = dir.join("events.jsonl");
    let line = serde_json::to_string(event).expect("event serializes");
    let result = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .and_then(|mut f| writeln!(f, "{line}"));
    if let Err(e) = result {
        tracing::error!(path = %path.display(), error = %e, "persisting event failed");
    }
}

fn persist_handle(dir: &Path, handle: &RunHandle) {
    write_atomic(
        &dir.join("run.json"),
        &serde_json::to_string_pretty(handle).expect("handle serializes"),
    );
}

#[derive(Debug, Deserialize)]
pub struct SubmitRequest {
    pub claim_text: String,
    #[serde(default)]
    pub claim_date: Option<String>,
    #[serde(default)]
    pub think: Option<String>,
    #[serde(default)]
    pub cutoff_mode: Option<String>,
}

#[derive(Debug, Deserialize)]
pub struct EventsQuery {
    last_event_id: Option<u64>,
}

#[derive(Debug, Deserialize)]
pub struct ReportQuery {
    format: Option<String>,
}

impl AppState {
    /// Rebuilds the run index from disk, marks unfinished runs failed, and
    /// starts the worker pool. Must be called inside a Tokio runtime.
    pub fn start(config: ServiceConfig, pipeline: Arc<Pipeline>) -> Result<Self, ServiceError> {
        std::fs::create_dir_all(&config.data_dir).map_err(|source| ServiceError::Io {
            path: config.data_dir.clone(),
            source,
        })?;
        let runs = load_runs(&config.data_dir)?;
        let (queue, rx) = mpsc::unbounded_channel();
        let workers = config.worker_pool.max(1);
        let state = AppState(Arc::new(Inner {
            runs: RwLock::new(runs),
            pipeline,
            config,
            queue,
            submissions: Mutex::new(HashMap::new()),
        }));
        let rx = Arc::new(tokio::sync::Mutex::new(rx));
        for _ in 0..workers {
            let state = state.clone();
            let rx = rx.clone();
            tokio::spawn(async move {
                loop {
                    let next = rx.lock().await.recv().await;
                    match next {
                        Some(id) => state.execute(&id).await,
                        None => break,
                    }
                }
            });
        }
        Ok(state)
    }

    pub fn router(&self) -> Router {
        let cors = match &self.0.config.cors_origin {
            Some(origin) => match HeaderValue::from_str(origin) {
                Ok(v) => CorsLayer::new().allow_origin(AllowOrigin::exact(v)),
                Err(_) => CorsLayer::new(),
            },
            None => CorsLayer::new().allow_origin(AllowOrigin::any()),
        }
        .allow_methods([axum::http::Method::GET, axum::http::Method::POST])
        .allow_headers([header::CONTENT_TYPE, header::HeaderName::from_static("last-event-id")]);
        let mut router = Router::new()
            .route("/api/runs", post(submit))
            .route("/api/runs/{id}", get(status))
            .route("/api/runs/{id}/events", get(events))
            .route("/api/runs/{id}/report", get(report));
        if let Some(dir) = &self.0.config.static_dir {
            router = router.fallback_service(ServeDir::new(dir));
        }
        router.layer(cors).with_state(self.clone())
    }

    fn slot(&self, id: &str) -> Option<Arc<RunSlot>> {
        self.0.runs.read().expect("run index lock").get(id).cloned()
    }

    pub fn run_handle(&self, id: &str) -> Option<RunHandle> {
        self.slot(id).map(|s| s.lock().handle.clone())
    }

    /// Validates a submission, applies the client's limits and enqueues
    /// the run.
    pub fn submit(&self, request: SubmitRequest, client: Option<IpAddr>) -> Result<String, ApiError> {
        let text = request.claim_text.trim();
        if text.is_empty() {
            return Err(bad_request("claim_text must not be empty"));
        }
        if text.chars().count() > MAX_CLAIM_CHARS {
            return Err(bad_request(format!("claim_text exceeds {MAX_CLAIM_CHARS} characters")));
        }
        let mut config = self.0.config.base_config.clone();
        if let Some(think) = &request.think {
            config.think_matrix = ThinkMatrix::from_str(think).map_err(|e| bad_request(e.to_string()))?;
        }
        if let Some(mode) = &request.cutoff_mode {
            config.cutoff_mode = CutoffMode::from_str(mode).map_err(|e| bad_request(e.to_string()))?;
        }
        let run_id = uuid::Uuid::new_v4().simple().to_string();
        let mut claim = Claim::new(run_id.clone(), text).map_err(|e| bad_request(e.to_string()))?;
        if let Some(raw) = request.claim_date.as_deref().filter(|d| !d.trim().is_empty()) {
            let date = NaiveDate::parse_from_str(raw.trim(), "%Y-%m-%d")
                .map_err(|_| bad_request(format!("claim_date {raw:?} is not an ISO-8601 date")))?;
            claim = claim.with_date(date);
        }

        let mut submissions = self.0.submissions.lock().expect("limiter lock");
        if let Some(ip) = client {
            let limit = self.0.config.rate_limit;
            let window = submissions.entry(ip).or_default();
            let hour = Duration::from_secs(3600);
            while window.front().is_some_and(|t| t.elapsed() >= hour) {
                window.pop_front();
            }
            let active = self
                .0
                .runs
                .read()
                .expect("run index lock")
                .values()
                .filter(|s| {
                    let s = s.lock();
                    s.client == Some(ip) && !s.handle.status.is_terminal()
                })
                .count();
            if active >= limit.max_concurrent {
                return Err(ApiError(StatusCode::TOO_MANY_REQUESTS, "too many active runs".into()));
            }
            if window.len() >= limit.per_hour {
                return Err(ApiError(
                    StatusCode::TOO_MANY_REQUESTS,
                    "hourly submission limit reached".into(),
                ));
            }
            window.push_back(Instant::now());
        }

        let handle = RunHandle {
            run_id: run_id.clone(),
            status: RunStatus::Queued,
            created_at: Utc::now(),
            claim,
            config,
        };
        let dir = self.0.config.data_dir.join(&run_id);
        std::fs::create_dir_all(&dir).map_err(|e| {
            ApiError(
                StatusCode::INTERNAL_SERVER_ERROR,
                format!("cannot create run directory: {e}"),
            )
        })?;
        persist_handle(&dir, &handle);
        let slot = RunSlot::new(
            RunState {
                handle,
                events: Vec::new(),
                report_json: None,
                report_md: None,
                client,
            },
            dir,
        );
        self.0
            .runs
            .write()
            .expect("run index lock")
            .insert(run_id.clone(), slot);
        drop(submissions);
        let _ = self.0.queue.send(run_id.clone());
        Ok(run_id)
    }

    async fn execute(&self, run_id: &str) {
        let Some(slot) = self.slot(run_id) else { return };
        let (claim, config) = {
            let mut state = slot.lock();
            state.handle.status = RunStatus::Running;
            persist_handle(&slot.dir, &state.handle);
            (state.handle.claim.clone(), state.handle.config.clone())
        };

        let (tx, mut rx) = mpsc::unbounded_channel::<ProgressEvent>();
        let forward_slot = slot.clone();
        // The terminal event is held back until the report is stored, so a
        // client reacting to it can always download the report.
        let forward = tokio::spawn(async move {
            let mut terminal = None;
            while let Some(event) = rx.recv().await {
                if event.stage.is_terminal() {
                    terminal = Some(event);
                } else {
                    forward_slot.publish(event);
                }
            }
            terminal
        });
        let pipeline = self.0.pipeline.clone();
        let id = run_id.to_string();
        let task_claim = claim.clone();
        let task_config = config.clone();
        let run = tokio::spawn(async move { pipeline.run(task_claim, task_config, &id, Some(&tx)).await });
        let output = run.await;
        let held = forward.await.ok().flatten();

        let (report, terminal) = match output {
            Ok(out) => (out.report, held),
            Err(e) => {
                tracing::error!(run_id, error = %e, "pipeline task aborted");
                let mut report = FactCheckReport::new(claim, config);
                let failure = RunFailure {
                    stage: Stage::Planning,
                    message: format!("internal error: {e}"),
                };
                let payload = json!({ "stage": failure.stage, "error": failure.message });
                let _ = report.fail(failure);
                let seq = slot.lock().events.last().map_or(0, |e| e.seq) + 1;
                let event = ProgressEvent {
                    run_id: run_id.to_string(),
                    seq,
                    stage: Stage::Failed,
                    iteration: 0,
                    payload,
                };
                (report, Some(event))
            }
        };
        self.finish(&slot, &report);
        if let Some(event) = terminal {
            slot.publish(event);
        }
    }

    fn finish(&self, slot: &RunSlot, report: &FactCheckReport) {
        let json: Arc<str> = report.to_json().into();
        let md: Arc<str> = report_to_markdown(report).into();
        write_atomic(&slot.dir.join("report.json"), &json);
        write_atomic(&slot.dir.join("report.md"), &md);
        let mut state = slot.lock();
        state.report_json = Some(json);
        state.report_md = Some(md);
        state.handle.status = if report.failure().is_some() {
            RunStatus::Failed
        } else {
            RunStatus::Done
        };
        persist_handle(&slot.dir, &state.handle);
    }
}

fn read_events(dir: &Path) -> Vec<ProgressEvent> {
    let Ok(text) = std::fs::read_to_string(dir.join("events.jsonl")) else {
        return Vec::new();
    };
    let mut events: Vec<ProgressEvent> = Vec::new();
    for line in text.lines() {
        match serde_json::from_str::<ProgressEvent>(line) {
            // A torn trailing write must not introduce gaps.
            Ok(e) if events.last().map_or(e.seq == 1, |l| e.seq == l.seq + 1) => events.push(e),
            _ => break,
        }
    }
    events
}

fn load_runs(data_dir: &Path) -> Result<HashMap<String, Arc<RunSlot>>, ServiceError> {
    let entries = std::fs::read_dir(data_dir).map_err(|source| ServiceError::Io {
        path: data_dir.to_path_buf(),
        source,
    })?;
    let mut runs = HashMap::new();
    for entry in entries.flatten() {
        let dir = entry.path();
        let Ok(text) = std::fs::read_to_string(dir.join("run.json")) else {
            continue;
        };
        let Ok(mut handle) = serde_json::from_str::<RunHandle>(&text) else {
            tracing::warn!(dir = %dir.display(), "skipping unreadable run");
            continue;
        };
        let mut events = read_events(&dir);
        // Rewrite so the file matches the accepted prefix.
        let lines: String = events
            .iter()
            .map(|e| serde_json::to_string(e).expect("event serializes") + "\n")
            .collect();
        write_atomic(&dir.join("events.jsonl"), &lines);
        let mut report_json = std::fs::read_to_string(dir.join("report.json")).ok().map(Arc::from);
        let mut report_md = std::fs::read_to_string(dir.join("report.md")).ok().map(Arc::from);
        let finished = events.last().is_some_and(|e| e.stage.is_terminal());
        if !handle.status.is_terminal() || !finished || report_json.is_none() {
            let stage = events
                .iter()
                .rev()
                .map(|e| e.stage)
                .find(|s| !s.is_terminal())
                .unwrap_or(Stage::Planning);
            let mut report = FactCheckReport::new(handle.claim.clone(), handle.config.clone());
            let failure = RunFailure {
                stage,
                message: INTERRUPTED.into(),
            };
            let payload = json!({ "stage": failure.stage, "error": failure.message });
            let _ = report.fail(failure);
            handle.status = RunStatus::Failed;
            let json: Arc<str> = report.to_json().into();
            let md: Arc<str> = report_to_markdown(&report).into();
            write_atomic(&dir.join("report.json"), &json);
            write_atomic(&dir.join("report.md"), &md);
            report_json = Some(json);
            report_md = Some(md);
            if !finished {
                let event = ProgressEvent {
                    run_id: handle.run_id.clone(),
                    seq: events.last().map_or(0, |e| e.seq) + 1,
                    stage: Stage::Failed,
                    iteration: events.last().map_or(0, |e| e.iteration),
                    payload,
                };
                append_event(&dir, &event);
                events.push(event);
            }
            persist_handle(&dir, &handle);
        }
        let id = handle.run_id.clone();
        let state = RunState {
            handle,
            events,
            report_json,
            report_md,
            client: None,
        };
        runs.insert(id, RunSlot::new(state, dir));
    }
    Ok(runs)
}

/// Deletes finished runs created more than `max_age` before `now`.
/// Returns the removed run ids, sorted.
pub fn purge_runs(data_dir: &Path, max_age: chrono::Duration, now: DateTime<Utc>) -> Result<Vec<String>, ServiceError> {
    let entries = std::fs::read_dir(data_dir).map_err(|source| ServiceError::Io {
        path: data_dir.to_path_buf(),
        source,
    })?;
    let mut removed = Vec::new();
    for entry in entries.flatten() {
        let dir = entry.path();
        let Ok(text) = std::fs::read_to_string(dir.join("run.json")) else {
            continue;
        };
        let Ok(handle) = serde_json::from_str::<RunHandle>(&text) else {
            continue;
        };
        if handle.status.is_terminal() && now - handle.created_at > max_age {
            std::fs::remove_dir_all(&dir).map_err(|source| ServiceError::Io {
                path: dir.clone(),
                source,
            })?;
            removed.push(handle.run_id);
        }
    }
    removed.sort();
    Ok(removed)
}

fn client_ip(ext: &Extensions) -> Option<IpAddr> {
    ext.get::<ConnectInfo<SocketAddr>>().map(|c| c.0.ip())
}

async fn submit(
    State(state): State<AppState>,
    ext: Extensions,
    body: Result<Json<SubmitRequest>, axum::extract::rejection::JsonRejection>,
) -> Result<(StatusCode, Json<serde_json::Value>), ApiError> {
    let Json(request) = body.map_err(|e| bad_request(e.body_text()))?;
    let run_id = state.submit(request, client_ip(&ext))?;
    Ok((StatusCode::ACCEPTED, Json(json!({ "run_id": run_id }))))
}

async fn status(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Json<RunHandle>, ApiError> {
    state.run_handle(&id).map(Json).ok_or_else(not_found)
}

fn sse_event(event: &ProgressEvent) -> Event {
    Event::default()
        .id(event.seq.to_string())
        .data(serde_json::to_string(event).expect("event serializes"))
}

struct Cursor {
    slot: Arc<RunSlot>,
    rx: watch::Receiver<u64>,
    last: u64,
    pending: VecDeque<ProgressEvent>,
    finished: bool,
}

async fn events(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(query): Query<EventsQuery>,
    headers: HeaderMap,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let slot = state.slot(&id).ok_or_else(not_found)?;
    let last = headers
        .get("last-event-id")
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.trim().parse::<u64>().ok())
        .or(query.last_event_id)
        .unwrap_or(0);
    let rx = slot.latest.subscribe();
    let cursor = Cursor {
        slot,
        rx,
        last,
        pending: VecDeque::new(),
        finished: false,
    };
    let stream = futures::stream::unfold(cursor, |mut c| async move {
        loop {
            if let Some(event) = c.pending.pop_front() {
                c.last = event.seq;
                c.finished = event.stage.is_terminal();
                return Some((Ok(sse_event(&event)), c));
            }
            if c.finished {
                return None;
            }
            c.rx.borrow_and_update();
            let (fresh, terminal) = c.slot.events_after(c.last);
            if fresh.is_empty() {
                if terminal {
                    return None;
                }
                if c.rx.changed().await.is_err() {
                    return None;
                }
            }
            c.pending.extend(fresh);
        }
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

async fn report(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(query): Query<ReportQuery>,
) -> Result<Response, ApiError> {
    let slot = state.slot(&id).ok_or_else(not_found)?;
    let format = query.format.as_deref().unwrap_or("json");
    if !matches!(format, "json" | "markdown" | "md") {
        return Err(bad_request(format!(
            "unsupported format {format:?}; use json or markdown"
        )));
    }
    let s = slot.lock();
    if !s.handle.status.is_terminal() {
        return Err(ApiError(StatusCode::CONFLICT, "run has not finished".into()));
    }
    let (body, content_type, ext) = if format == "json" {
        (s.report_json.clone(), "application/json", "json")
    } else {
        (s.report_md.clone(), "text/markdown; charset=utf-8", "md")
    };
    let body = body.ok_or_else(|| ApiError(StatusCode::INTERNAL_SERVER_ERROR, "report missing".into()))?;
    let disposition = format!("attachment; filename=\"claimcheck-report-{id}.{ext}\"");
    Ok((
        [
            (header::CONTENT_TYPE, content_type.to_string()),
            (header::CONTENT_DISPOSITION, disposition),
        ],
        body.to_string(),
    )
        .into_response())
}

/// Serves until the process receives Ctrl-C.
pub async fn serve(state: AppState, addr: SocketAddr) -> Result<(), ServiceError> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServiceError::Io {
            path: PathBuf::from(addr.to_string()),
            source,
        })?;
    tracing::info!(%addr, "listening");
    axum::serve(
        listener,
        state.router().into_make_service_with_connect_info::<SocketAddr>(),
    )
    .with_graceful_shutdown(async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
    .map_err(|source| ServiceError::Io {
        path: PathBuf::from(addr.to_string()),
        source,
    })
}
