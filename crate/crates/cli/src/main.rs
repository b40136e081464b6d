use std::path::PathBuf;
use std::process::ExitCode;

use adkey_cli::figures::{figure1, figure2, FIG2_N_MAX};
use adkey_cli::scenario_file::load_scenario;
use adkey_cli::sweep::{run_sweep, SweepConfig};
use adkey_cli::{AppError, AppResult};
use adkey_core::adqkd::asymptotic_verdict;
use adkey_core::classical_ht::DEFAULT_BINS;
use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "adkey", version, about = "Entropy bounds for advantage-distillation key rates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate block bounds over a range of n and write a CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Single-copy bounds along the qubit family of the first figure.
    Fig1 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Block-length sweep of the shipped F = 0.684 scenario.
    Fig2 {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = FIG2_N_MAX)]
        n_max: usize,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
    },
    /// Asymptotic Chernoff test of a scenario, printed as JSON.
    Verdict {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn init_logging() {
    let level = match std::env::var("ADKEY_LOG").ok().as_deref() {
        Some("info") => log::LevelFilter::Info,
        Some("debug") => log::LevelFilter::Debug,
        Some("error") | None => log::LevelFilter::Error,
        Some(other) => {
            eprintln!("warning: ADKEY_LOG={other:?} not one of error, info, debug; using error");
            log::LevelFilter::Error
        }
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn run(cli: Cli) -> AppResult<()> {
    match cli.command {
        Command::Sweep { config, threads } => {
            let cfg = SweepConfig::from_file(&config)?;
            run_sweep(&cfg, threads)?;
        }
        Command::Fig1 { out } => {
            figure1(&out)?;
        }
        Command::Fig2 {
            out,
            threads,
            n_max,
            bins,
        } => {
            figure2(&out, n_max, bins, threads)?;
        }
        Command::Verdict { scenario } => {
            let sc = load_scenario(&scenario)?.into_scenario();
            let v = asymptotic_verdict(&sc).map_err(|e| AppError::from_core(scenario.display(), e))?;
            let out = json!({
                "eps": sc.eps(),
                "beta_eps": v.beta_eps,
                "chernoff_q": v.q,
                "chernoff_alpha": v.alpha,
                "fidelity_sq": v.fidelity_sq,
                "pure_states": v.pure_states,
                "verdict": v.verdict.as_str(),
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("plain values serialise"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
