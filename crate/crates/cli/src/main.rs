use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use simplang::driver::EXIT_FAILURE;
use simplang::{run_file, Format, RunConfig};
use symex_core::diagnostics::LogLevel;
use symex_core::solver::{BackendConfig, SolverKind};
use symex_core::symex::{Fuel, Mode};

/// Symbolically execute a SimpleLang program and report every branch.
///
/// Exit status: 0 when no branch errs, 1 when some branch errs, 2 on usage,
/// parse, sort or backend failures and on failed soundness checks.
#[derive(Debug, Parser)]
#[command(name = "simplang", version)]
struct Cli {
    /// Program file. The whole file is one expression.
    file: PathBuf,

    /// How solver `unknown` answers are treated.
    #[arg(long, default_value = "ox", value_parser = ["ox", "ux"])]
    mode: String,

    /// Extra branches that may be explored over the whole run.
    #[arg(long, value_name = "N")]
    fuel_branching: Option<u64>,

    /// Interpreter steps each path may take.
    #[arg(long, value_name = "N")]
    fuel_steps: Option<u64>,

    #[arg(long, default_value = "optimized", value_parser = ["direct", "optimized"])]
    solver: String,

    /// SMT-LIB2 solver command line, e.g. "z3 -in" or "cvc5 --incremental".
    #[arg(long, value_name = "PATH [ARGS]")]
    smt_cmd: Option<String>,

    /// Per-query timeout in milliseconds.
    #[arg(long, value_name = "N")]
    timeout_ms: Option<u64>,

    #[arg(long, default_value = "text", value_parser = ["text", "json"])]
    report: String,

    /// Include the log tree at this level: error, warning, info, debug,
    /// trace or smt.
    #[arg(long, value_name = "L")]
    log_level: Option<LogLevel>,

    /// Keep message timestamps in the log.
    #[arg(long)]
    log_timestamps: bool,

    /// Attach a model to every error branch.
    #[arg(long)]
    models: bool,

    /// Compare against the concrete semantics with every `nondet` ranging
    /// over [-B, B].
    #[arg(long, value_name = "B")]
    check_soundness: Option<u32>,
}

fn backend_config(cli: &Cli) -> BackendConfig {
    let mut cfg = BackendConfig::default();
    if let Some(cmd) = &cli.smt_cmd {
        let mut words: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
        // A bare z3 path needs `-in` to read from stdin.
        let is_z3 = words.len() == 1
            && std::path::Path::new(&words[0])
                .file_stem()
                .is_some_and(|s| s == "z3");
        if is_z3 {
            words.push("-in".into());
        }
        cfg.command = words;
    }
    if let Some(ms) = cli.timeout_ms {
        cfg.timeout = Some(Duration::from_millis(ms));
    }
    cfg
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_FAILURE as u8
            } else {
                0
            });
        }
    };
    if cli.smt_cmd.as_deref().is_some_and(|c| c.trim().is_empty()) {
        eprintln!("error: --smt-cmd must not be empty");
        return ExitCode::from(EXIT_FAILURE as u8);
    }
    let cfg = RunConfig {
        mode: cli.mode.parse::<Mode>().expect("validated by clap"),
        fuel: Fuel {
            branching: cli.fuel_branching,
            steps: cli.fuel_steps,
        },
        solver: cli.solver.parse::<SolverKind>().expect("validated by clap"),
        backend: backend_config(&cli),
        format: cli.report.parse::<Format>().expect("validated by clap"),
        log_level: cli.log_level,
        log_timestamps: cli.log_timestamps,
        emit_models: cli.models,
        oracle_bound: cli.check_soundness,
    };
    match run_file(&cli.file, &cfg) {
        Ok(out) => {
            print!("{}", out.report.render(cfg.format));
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE as u8)
        }
    }
}
