//! `moba-tutor`: headless matches, experiments, replay checks and the live server.
//!
//! Exit codes: 0 ok, 1 invalid input (config, spec, tables, corrupt or mismatched
//! logs), 2 runtime failure. `MOBA_TUTOR_LOG` sets log verbosity.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use moba_tutor::analytics::Condition;
use moba_tutor::arena::ArenaConfig;
use moba_tutor::harness::{
    load_record, read_text, replay, resimulate_matches, run_experiment_to_dir, run_match, verify, ExperimentSpec,
    HarnessError, MatchOutcome, MatchSetup, MatchStore,
};
use moba_tutor::tips::TipTable;
use moba_tutor_server::{ServeOptions, Server, ServerError};

#[derive(Parser)]
#[command(name = "moba-tutor", version, about = "Tutored MOBA arena: headless matches, experiments and a live server")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Play one headless match and store its record and event log.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Put the tutor in the novice's team.
        #[arg(long)]
        tutor: bool,
        /// Tip table enabling the tip system (requires --tutor).
        #[arg(long, value_name = "TABLE")]
        tips: Option<PathBuf>,
        #[arg(long, default_value = "matches")]
        out: PathBuf,
    },
    /// Run every match of an experiment spec and write reports.
    Experiment {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute scorelines and checksum from an event log.
    Replay {
        #[arg(long)]
        log: PathBuf,
        /// Record to check against; defaults to `<id>.json` beside the log.
        #[arg(long)]
        record: Option<PathBuf>,
        /// Also re-run the match from this config and compare byte for byte.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Host one live match on ws://0.0.0.0:PORT/match.
    Serve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        port: u16,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "TABLE")]
        tips: Option<PathBuf>,
        /// Where to store the finished match.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    /// Input files that could not be read or parsed.
    #[error(transparent)]
    Input(HarnessError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Server(#[from] ServerError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        let validation = match self {
            CliError::Usage(_) | CliError::Input(_) => true,
            CliError::Harness(e) | CliError::Server(ServerError::Harness(e)) => {
                e.is_validation() || matches!(e, HarnessError::Replay(_))
            }
            CliError::Server(_) => false,
        };
        if validation {
            1
        } else {
            2
        }
    }
}

fn input<T>(r: Result<T, impl Into<HarnessError>>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Input(e.into()))
}

fn load_config(path: &Path) -> Result<ArenaConfig, CliError> {
    input(ArenaConfig::from_json(&input(read_text(path))?))
}

fn load_table(path: &Path) -> Result<TipTable, CliError> {
    input(TipTable::from_json(&input(read_text(path))?))
}

fn summarize(outcome: &MatchOutcome) -> String {
    let r = &outcome.record;
    let line = r.scoreline(r.novice);
    format!(
        "{} condition={} ticks={} winner={} novice={} kda={}",
        r.match_id,
        r.condition,
        r.duration_ticks,
        r.winner.map(|t| format!("{t:?}")).unwrap_or_else(|| "none".into()),
        r.novice,
        line.map(|l| format!("{}/{}/{} ({:.3})", l.kills, l.deaths, l.assists, l.kda())).unwrap_or_default(),
    )
}

fn run(config: &Path, seed: u64, tutor: bool, tips: Option<&Path>, out: &Path) -> Result<(), CliError> {
    let condition = match (tutor, tips.is_some()) {
        (false, false) => Condition::Baseline,
        (true, false) => Condition::SupportOnly,
        (true, true) => Condition::SupportPlusTips,
        (false, true) => return Err(CliError::Usage("--tips requires --tutor".into())),
    };
    let mut setup = MatchSetup::new(load_config(config)?, condition);
    if let Some(t) = tips {
        setup.tips = load_table(t)?;
    }
    let outcome = run_match(&setup, seed)?;
    let path = MatchStore::create(out)?.save(&outcome)?;
    println!("{}", summarize(&outcome));
    println!("record: {}", path.display());
    Ok(())
}

fn experiment(spec_path: &Path, out: &Path) -> Result<(), CliError> {
    let spec = input(ExperimentSpec::from_json(&input(read_text(spec_path))?))?;
    let base = spec_path.parent().unwrap_or(Path::new("."));
    let inputs = input(spec.load_inputs(base))?;
    let result = run_experiment_to_dir(&spec, &inputs, out)?;
    println!("{} matches, novice {}", result.records.len(), result.novice);
    print!("{}", result.csv);
    Ok(())
}

fn replay_log(log: &Path, record: Option<&Path>, config: Option<&Path>) -> Result<(), CliError> {
    let text = input(read_text(log))?;
    let sibling = log
        .file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.strip_suffix(".events.jsonl"))
        .map(|id| log.with_file_name(format!("{id}.json")));
    let record_path = record.map(Path::to_path_buf).or(sibling.filter(|p| p.exists()));
    let replayed = match &record_path {
        Some(p) => verify(&input(load_record(p))?, &text).map_err(HarnessError::from)?,
        None => replay(&text).map_err(HarnessError::from)?,
    };
    for s in &replayed.scorelines {
        println!("{} {}/{}/{} kda={:.3}", s.player, s.kills, s.deaths, s.assists, s.kda());
    }
    println!("checksum {}", replayed.checksum);
    if let Some(p) = record_path {
        println!("matches record {}", p.display());
    }
    if let Some(c) = config {
        resimulate_matches(&load_config(c)?, &text).map_err(HarnessError::from)?;
        println!("resimulation is byte-identical");
    }
    Ok(())
}

fn serve(config: &Path, port: u16, seed: u64, tips: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
    let mut opts = ServeOptions::tutored(load_config(config)?, seed);
    if let Some(t) = tips {
        opts.setup.tips = load_table(t)?;
    }
    let store = out.map(MatchStore::create).transpose()?;
    let runtime = tokio::runtime::Runtime::new().map_err(ServerError::from)?;
    let outcome = runtime.block_on(async move {
        let server = Server::bind(("0.0.0.0", port), opts).await?;
        println!("listening on ws://{}/match", server.local_addr()?);
        server.run().await
    })?;
    println!("{}", summarize(&outcome));
    if let Some(store) = store {
        println!("record: {}", store.save(&outcome)?.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MOBA_TUTOR_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Cmd::Run { config, seed, tutor, tips, out } => run(config, *seed, *tutor, tips.as_deref(), out),
        Cmd::Experiment { spec, out } => experiment(spec, out),
        Cmd::Replay { log, record, config } => replay_log(log, record.as_deref(), config.as_deref()),
        Cmd::Serve { config, port, seed, tips, out } => serve(config, *port, *seed, tips.as_deref(), out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
