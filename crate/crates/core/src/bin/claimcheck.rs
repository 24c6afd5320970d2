use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use tokio::sync::mpsc;

use claimcheck::backend::BackendConfig;
use claimcheck::domain::{Claim, CutoffMode, GenerationProfile, PipelineConfig, Stage, ThinkMatrix};
use claimcheck::eval::{ablation_grid, load_dataset, run_eval, sample_subset, EvalOptions};
use claimcheck::llm::NoThinkMode;
use claimcheck::pipeline::{Pipeline, ProgressEvent};
use claimcheck::report::report_to_markdown;
use claimcheck::service::{purge_runs, serve, AppState, RateLimit, ServiceConfig};

#[derive(Parser)]
#[command(name = "claimcheck", version, about = "LLM-guided fact-checking with web search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fact-check a single claim, printing progress as stages complete.
    Check(CheckArgs),
    /// Evaluate on an AVeriTeC-format dataset.
    Eval(EvalArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Delete finished runs older than the retention period.
    Purge(PurgeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum NoThinkArg {
    SoftSwitch,
    ThinkFlag,
    TemplateKwargs,
}

impl From<NoThinkArg> for NoThinkMode {
    fn from(a: NoThinkArg) -> Self {
        match a {
            NoThinkArg::SoftSwitch => NoThinkMode::SoftSwitch,
            NoThinkArg::ThinkFlag => NoThinkMode::ThinkFlag,
            NoThinkArg::TemplateKwargs => NoThinkMode::TemplateKwargs,
        }
    }
}

#[derive(Args)]
struct BackendArgs {
    /// OpenAI-compatible endpoint base URL.
    #[arg(long, env = "LLM_BASE_URL", default_value = "http://localhost:11434/v1")]
    llm_base_url: String,
    #[arg(long, env = "LLM_MODEL", default_value = "qwen3:4b")]
    llm_model: String,
    #[arg(long, env = "LLM_API_KEY", hide_env_values = true)]
    llm_api_key: Option<String>,
    /// How disabled thinking is signalled to the endpoint.
    #[arg(long, value_enum, env = "LLM_NO_THINK_MODE", default_value = "soft-switch")]
    no_think_mode: NoThinkArg,
    /// Sampling profile: qwen3 or o4-mini.
    #[arg(long, default_value = "qwen3")]
    profile: String,
    #[arg(long, env = "SERPER_API_KEY", hide_env_values = true)]
    serper_api_key: Option<String>,
    /// Serve searches and pages from a fixture directory instead of the web.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Use the built-in scripted model instead of an endpoint.
    #[arg(long)]
    offline: bool,
    /// Directory with replacement prompt templates.
    #[arg(long)]
    prompts_dir: Option<PathBuf>,
    /// Fetch pages even where robots.txt disallows it.
    #[arg(long)]
    ignore_robots: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Per-module thinking: all, none, or a vector such as TFTT
    /// (planning, summarization, synthesis, evaluation).
    #[arg(long, default_value = "all")]
    think: String,
    #[arg(long, default_value_t = 3)]
    max_iterations: u32,
    #[arg(long, default_value_t = 3)]
    top_k: usize,
    /// Temporal cutoff: strict or off.
    #[arg(long, default_value = "strict")]
    cutoff: String,
}

impl RunArgs {
    fn config(&self) -> Result<PipelineConfig, String> {
        let config = PipelineConfig {
            think_matrix: ThinkMatrix::from_str(&self.think).map_err(|e| e.to_string())?,
            max_iterations: self.max_iterations,
            top_k: self.top_k,
            cutoff_mode: CutoffMode::from_str(&self.cutoff).map_err(|e| e.to_string())?,
            ..PipelineConfig::default()
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

#[derive(Args)]
struct CheckArgs {
    claim: String,
    /// Claim date (YYYY-MM-DD); evidence from this day on is excluded.
    #[arg(long)]
    date: Option<NaiveDate>,
    #[arg(long)]
    speaker: Option<String>,
    /// Write the Markdown report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Evaluate a seeded random subset of this size.
    #[arg(long)]
    subset_size: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Run the baseline plus the four single-module think flips.
    #[arg(long)]
    ablation: bool,
    /// Scripted model and no web access (fixtures if given).
    #[arg(long)]
    dry_run: bool,
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, env = "BIND", default_value = "0.0.0.0")]
    bind: std::net::IpAddr,
    #[arg(long, env = "DATA_DIR", default_value = "data")]
    data_dir: PathBuf,
    #[arg(long, env = "WORKER_POOL", default_value_t = 2)]
    worker_pool: usize,
    /// `<concurrent>/<per hour>` submissions per client address.
    #[arg(long, env = "RATE_LIMIT", default_value = "3/30")]
    rate_limit: String,
    /// Built web console to serve at `/`.
    #[arg(long, env = "STATIC_DIR")]
    static_dir: Option<PathBuf>,
    #[arg(long, env = "CORS_ORIGIN")]
    cors_origin: Option<String>,
    /// Include the start of model reasoning in progress events.
    #[arg(long, env = "THINKING_PREVIEWS")]
    thinking_previews: bool,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args)]
struct PurgeArgs {
    #[arg(long, env = "DATA_DIR", default_value = "data")]
    data_dir: PathBuf,
    #[arg(long, default_value_t = 30)]
    days: i64,
}

fn build_pipeline(b: &BackendArgs, offline: bool) -> Result<Pipeline, String> {
    let config = BackendConfig {
        llm_base_url: b.llm_base_url.clone(),
        llm_model: b.llm_model.clone(),
        llm_api_key: b.llm_api_key.clone(),
        no_think_mode: b.no_think_mode.into(),
        profile: GenerationProfile::from_str(&b.profile).map_err(|e| e.to_string())?,
        serper_api_key: b.serper_api_key.clone(),
        serper_endpoint: None,
        fixtures_dir: b.fixtures.clone(),
        offline: offline || b.offline,
        prompts_dir: b.prompts_dir.clone(),
        ignore_robots: b.ignore_robots,
        thinking_previews: false,
    };
    config.build().map_err(|e| e.to_string())
}

fn stage_number(stage: Stage) -> usize {
    match stage {
        Stage::Planning => 1,
        Stage::Executing => 2,
        Stage::Summarizing => 3,
        Stage::Synthesizing => 4,
        _ => 5,
    }
}

fn progress_line(e: &ProgressEvent) -> String {
    let p = &e.payload;
    let count = |key: &str| p[key].as_array().map_or(0, Vec::len);
    let detail = match e.stage {
        Stage::Planning => format!("{} queries", count("queries")),
        Stage::Executing => format!(
            "round {}: {} results, {} admitted",
            e.iteration,
            p["result_count"].as_u64().unwrap_or(0),
            p["admitted_count"].as_u64().unwrap_or(0)
        ),
        Stage::Summarizing => {
            let relevant = p["summaries"]
                .as_array()
                .map_or(0, |s| s.iter().filter(|x| x["relevant"] == true).count());
            format!("round {}: {relevant} of {} relevant", e.iteration, count("summaries"))
        }
        Stage::Synthesizing => format!("round {}: {} follow-up queries", e.iteration, count("followup_queries")),
        Stage::Evaluating => p["label"].as_str().unwrap_or_default().to_string(),
        Stage::Done => return "Done".into(),
        Stage::Failed => {
            return format!(
                "Failed during {}: {}",
                p["stage"].as_str().unwrap_or("?"),
                p["error"].as_str().unwrap_or_default()
            )
        }
    };
    format!("[{}/5] {}: {detail}", stage_number(e.stage), e.stage)
}

async fn check(args: CheckArgs) -> Result<ExitCode, String> {
    let config = args.run.config()?;
    let pipeline = build_pipeline(&args.backend, false)?;
    let mut claim = Claim::new("cli", args.claim.clone()).map_err(|e| e.to_string())?;
    if let Some(d) = args.date {
        claim = claim.with_date(d);
    }
    if let Some(s) = &args.speaker {
        claim = claim.with_speaker(s.clone());
    }
    let (tx, mut rx) = mpsc::unbounded_channel();
    let printer = tokio::spawn(async move {
        while let Some(event) = rx.recv().await {
            eprintln!("{}", progress_line(&event));
        }
    });
    let output = pipeline.run(claim, config, "cli", Some(&tx)).await;
    drop(tx);
    let _ = printer.await;
    let report = output.report;
    if let Some(path) = &args.out {
        std::fs::write(path, report_to_markdown(&report)).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if let Some(path) = &args.json {
        std::fs::write(path, report.to_json()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    match (report.judgement(), report.failure()) {
        (Some(j), _) => {
            println!("{}", j.verdict.surface());
            Ok(ExitCode::SUCCESS)
        }
        (None, Some(f)) => Err(format!("run failed during {}: {}", f.stage, f.message)),
        (None, None) => Err("run ended without a verdict".into()),
    }
}

async fn eval(args: EvalArgs) -> Result<ExitCode, String> {
    let config = args.run.config()?;
    let dataset = load_dataset(&args.dataset).map_err(|e| e.to_string())?;
    let d = &dataset.distribution;
    eprintln!(
        "loaded {} records ({} rejected): {}",
        dataset.records.len(),
        dataset.rejects.len(),
        claimcheck::Verdict::ALL
            .iter()
            .map(|&v| format!("{} {:.1}%", v.surface(), d.percent(v)))
            .collect::<Vec<_>>()
            .join(", ")
    );
    for r in &dataset.rejects {
        eprintln!("  rejected record {}: {}", r.index, r.reason);
    }
    let records = match args.subset_size {
        Some(n) => sample_subset(&dataset.records, n, args.seed).map_err(|e| e.to_string())?,
        None => dataset.records,
    };
    let pipeline = build_pipeline(&args.backend, args.dry_run)?;
    let options = EvalOptions {
        concurrency: args.concurrency,
        out_dir: Some(args.out.clone()),
    };
    if args.ablation {
        let grid = ablation_grid(&pipeline, &records, config.think_matrix, &config, &options)
            .await
            .map_err(|e| e.to_string())?;
        println!("{}", grid.to_markdown());
    } else {
        let result = run_eval(&pipeline, &records, &config, &options)
            .await
            .map_err(|e| e.to_string())?;
        println!(
            "accuracy {:.1}% ({}/{}), {} failed runs; results in {}",
            100.0 * result.accuracy,
            result.correct,
            result.total,
            result.failed,
            args.out.display()
        );
    }
    Ok(ExitCode::SUCCESS)
}

async fn run_service(args: ServeArgs) -> Result<ExitCode, String> {
    let base_config = args.run.config()?;
    let pipeline = build_pipeline(&args.backend, false)?.with_thinking_previews(args.thinking_previews);
    let config = ServiceConfig {
        data_dir: args.data_dir,
        worker_pool: args.worker_pool,
        rate_limit: RateLimit::from_str(&args.rate_limit).map_err(|e| e.to_string())?,
        static_dir: args.static_dir,
        cors_origin: args.cors_origin,
        base_config,
    };
    let state = AppState::start(config, Arc::new(pipeline)).map_err(|e| e.to_string())?;
    serve(state, SocketAddr::new(args.bind, args.port))
        .await
        .map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn purge(args: PurgeArgs) -> Result<ExitCode, String> {
    let removed =
        purge_runs(&args.data_dir, chrono::Duration::days(args.days), chrono::Utc::now()).map_err(|e| e.to_string())?;
    println!("removed {} runs", removed.len());
    Ok(ExitCode::SUCCESS)
}

#[tokio::main]
async fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_level = if matches!(cli.command, Command::Serve(_)) {
        "info"
    } else {
        "warn"
    };
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default_level)),
        )
        .with_writer(std::io::stderr)
        .init();
    let result = match cli.command {
        Command::Check(a) => check(a).await,
        Command::Eval(a) => eval(a).await,
        Command::Serve(a) => run_service(a).await,
        Command::Purge(a) => purge(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}
