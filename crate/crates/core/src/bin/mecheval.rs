use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mecheval::card::{load_submission, SubmissionError};
use mecheval::harness::{
    http, ingest_run, render_csv, render_json, score_offline, HarnessError, Phase, Report, ReviewService, RunConfig,
    SystemClock,
};

#[derive(Parser)]
#[command(name = "mecheval", version, about = "Score curated interaction cards and mechanism explanations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check submission directories against the card schema.
    Validate {
        #[arg(long = "submission", value_name = "DIR", required = true)]
        submissions: Vec<PathBuf>,
    },
    /// Precision and throughput for open-ended card extraction.
    ScorePhase1(ScoreArgs),
    /// Reference-set overlap and, with `--gold`, gold-card error rates. Needs at least one of the two.
    ScorePhase2(ScoreArgs),
    /// Plausibility of submitted explanations against executable models.
    CheckPhase3(ScoreArgs),
    /// Create a persistent run whose open decisions go to the review queue.
    Ingest {
        #[arg(long)]
        run_id: String,
        #[arg(long, value_enum)]
        phase: PhaseArg,
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, env = "MECHEVAL_DATA_ROOT", value_name = "DIR")]
        data_root: PathBuf,
    },
    /// Serve the review API over HTTP.
    Serve {
        #[arg(long, env = "MECHEVAL_DATA_ROOT", value_name = "DIR")]
        data_root: PathBuf,
        /// JSON object mapping bearer tokens to reviewer names.
        #[arg(long, value_name = "FILE")]
        tokens: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Seconds before an idle claim returns to the queue.
        #[arg(long, default_value_t = 1800)]
        claim_timeout: u64,
    },
    /// Write the current report of a persistent run.
    Export {
        #[arg(long)]
        run_id: String,
        #[arg(long, env = "MECHEVAL_DATA_ROOT", value_name = "DIR")]
        data_root: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PhaseArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
}

impl From<PhaseArg> for Phase {
    fn from(p: PhaseArg) -> Phase {
        match p {
            PhaseArg::One => Phase::I,
            PhaseArg::Two => Phase::II,
            PhaseArg::Three => Phase::III,
        }
    }
}

#[derive(Args)]
struct Inputs {
    #[arg(long = "submission", value_name = "DIR")]
    submissions: Vec<PathBuf>,
    #[arg(long, value_name = "FILE")]
    refset: Option<PathBuf>,
    /// Directory of gold cards, laid out like a submission.
    #[arg(long, value_name = "DIR")]
    gold: Option<PathBuf>,
    #[arg(long = "model", value_name = "FILE")]
    models: Vec<PathBuf>,
    #[arg(long, value_name = "FILE")]
    observations: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    explanations: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    roles: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    equiv_table: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    days: Option<u32>,
}

#[derive(Args)]
struct Output {
    /// File for JSON; directory for CSV tables. Defaults to stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Human judgments (JSONL) layered over the rule-based ones.
    #[arg(long, value_name = "FILE")]
    judgments: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn config(run_id: &str, phase: Phase, i: Inputs) -> RunConfig {
    let mut c = RunConfig::new(run_id, phase);
    c.submissions = i.submissions;
    c.refset = i.refset;
    c.gold = i.gold;
    c.models = i.models;
    c.observations = i.observations;
    c.explanations = i.explanations;
    c.roles = i.roles;
    c.equiv_table = i.equiv_table;
    c.days = i.days;
    c
}

fn write_report(report: &Report, out: &Output) -> Result<(), HarnessError> {
    let io = |p: &Path, e: std::io::Error| HarnessError::Io(format!("{}: {e}", p.display()));
    match (out.format, &out.out) {
        (Format::Json, None) => print!("{}", render_json(report)),
        (Format::Json, Some(p)) => std::fs::write(p, render_json(report)).map_err(|e| io(p, e))?,
        (Format::Csv, None) => {
            for (name, body) in render_csv(report) {
                println!("## {name}");
                print!("{body}");
            }
        }
        (Format::Csv, Some(dir)) => {
            std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
            for (name, body) in render_csv(report) {
                let p = dir.join(format!("{name}.csv"));
                std::fs::write(&p, body).map_err(|e| io(&p, e))?;
            }
        }
    }
    Ok(())
}

fn score(phase: Phase, args: ScoreArgs) -> Result<(), HarnessError> {
    let report = score_offline(&config("adhoc", phase, args.inputs), args.judgments.as_deref())?;
    write_report(&report, &args.output)
}

fn validate(dirs: &[PathBuf]) -> Result<bool, HarnessError> {
    let mut clean = true;
    for dir in dirs {
        match load_submission(dir) {
            Ok(s) => println!("ok {} ({} cards)", dir.display(), s.len()),
            Err(SubmissionError::Invalid(files)) => {
                clean = false;
                for (file, errors) in files {
                    for e in errors {
                        println!("error {}: {e}", file.display());
                    }
                }
            }
            Err(e) => return Err(HarnessError::Io(e.to_string())),
        }
    }
    Ok(clean)
}

async fn serve(root: PathBuf, tokens: PathBuf, addr: SocketAddr, timeout: u64) -> Result<(), HarnessError> {
    let tokens = http::load_tokens(&tokens)?;
    let service = Arc::new(ReviewService::new(root, Arc::new(SystemClock), timeout));
    let app = http::router(http::ApiState { service, tokens });
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| HarnessError::Io(format!("{addr}: {e}")))?;
    eprintln!("listening on {addr}");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| HarnessError::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Validate { submissions } => return validate(&submissions),
        Command::ScorePhase1(a) => score(Phase::I, a)?,
        Command::ScorePhase2(a) => score(Phase::II, a)?,
        Command::CheckPhase3(a) => score(Phase::III, a)?,
        Command::Ingest { run_id, phase, inputs, data_root } => {
            let run = ingest_run(&data_root, &config(&run_id, phase.into(), inputs))?;
            println!("ingested {} with {} review items", run.run_id, run.items.len());
        }
        Command::Serve { data_root, tokens, addr, claim_timeout } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| HarnessError::Io(e.to_string()))?;
            rt.block_on(serve(data_root, tokens, addr, claim_timeout))?;
        }
        Command::Export { run_id, data_root, output } => {
            let service = ReviewService::new(data_root, Arc::new(SystemClock), u64::MAX);
            write_report(&service.report(&run_id)?, &output)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
