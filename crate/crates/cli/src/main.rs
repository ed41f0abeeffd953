//! `crs eval`: replay an annotated corpus through a bot and report intent
//! accuracy and Recall@k next to the random baseline.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use crs_core::config::ConfigDocument;
use crs_core::eval::EvalError;
use crs_core::{replay_corpus, BotRuntime, EvalCorpus, KnowledgeGraph};

#[derive(Debug, Parser)]
#[command(name = "crs", version, about = "Rule-based conversational recommender tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score a bot against an annotated corpus.
    Eval(EvalArgs),
}

#[derive(Debug, clap::Args)]
struct EvalArgs {
    /// Knowledge graph data file (five tab-separated columns).
    #[arg(long)]
    kg: PathBuf,

    /// Config document; preset defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Corpus, one JSON conversation per line.
    #[arg(long)]
    corpus: PathBuf,

    /// Cut-offs for Recall@k.
    #[arg(long, value_delimiter = ',', default_value = "1,10,50")]
    k: Vec<usize>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Where to write the JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit status for a corpus that does not parse or validate.
const EXIT_CORPUS: u8 = 2;

fn read(path: &Path) -> Result<Vec<u8>, String> {
    fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn eval(args: &EvalArgs) -> Result<(), (u8, String)> {
    let fail = |msg: String| (1, msg);
    let mut ks = args.k.clone();
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() || ks[0] == 0 {
        return Err(fail("--k needs positive cut-offs".into()));
    }

    let graph = KnowledgeGraph::from_bytes(&read(&args.kg).map_err(fail)?)
        .map_err(|e| fail(format!("{}: {e}", args.kg.display())))?;
    let document = match &args.config {
        Some(path) => ConfigDocument::from_slice(&read(path).map_err(fail)?)
            .map_err(|e| fail(format!("{}: {e}", path.display())))?,
        None => ConfigDocument::default(),
    };
    let bot = BotRuntime::from_document(Arc::new(graph), &document).map_err(|e| {
        let findings = serde_json::to_string_pretty(e.findings()).unwrap_or_default();
        fail(format!("config rejected: {e}\n{findings}"))
    })?;

    let corpus = EvalCorpus::from_bytes(&read(&args.corpus).map_err(|e| (EXIT_CORPUS, e))?)
        .map_err(|e| (EXIT_CORPUS, format!("{}: {e}", args.corpus.display())))?;
    let report = replay_corpus(&corpus, &bot, &ks, args.seed).map_err(|e| match e {
        EvalError::CorpusFormat { .. } => (EXIT_CORPUS, e.to_string()),
        EvalError::Pipeline { .. } => fail(e.to_string()),
    })?;

    print!("{}", report.to_table());
    let json = serde_json::to_string_pretty(&report).map_err(|e| fail(e.to_string()))?;
    if let Some(out) = &args.out {
        fs::write(out, json + "\n").map_err(|e| fail(format!("{}: {e}", out.display())))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(args) => eval(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
