//! Parse, check, run and report.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use symex_core::diagnostics::LogLevel;
use symex_core::simplang::{
    check_ox_soundness, check_ux_soundness, eval_program, sort_check, SimpError, SortError,
};
use symex_core::solver::{BackendConfig, BackendError, SolverKind};
use symex_core::symex::{Engine, EngineConfig, Fuel, Mode};
use symex_core::values::{Ground, Interpretation, Sort, Term, VarId};
use thiserror::Error;

use crate::parse::{parse_program, ParseError};
use crate::report::{BranchReport, Format, LogEntry, Report, VarReport};

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub mode: Mode,
    pub fuel: Fuel,
    pub solver: SolverKind,
    pub backend: BackendConfig,
    pub format: Format,
    /// Include the log tree, filtered at this level.
    pub log_level: Option<LogLevel>,
    pub log_timestamps: bool,
    pub emit_models: bool,
    /// Run the soundness checks over `[-B, B]`.
    pub oracle_bound: Option<u32>,
}

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Sort { path: String, source: SortError },
    #[error("{0}")]
    Backend(BackendError),
}

/// A finished run and the exit code it maps to.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    pub exit_code: i32,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR_BRANCHES: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

pub fn run_file(path: &Path, cfg: &RunConfig) -> Result<RunOutcome, DriverError> {
    let name = path.display().to_string();
    let src = std::fs::read_to_string(path).map_err(|source| DriverError::Io {
        path: name.clone(),
        source,
    })?;
    run_source(&name, &src, cfg)
}

pub fn run_source(name: &str, src: &str, cfg: &RunConfig) -> Result<RunOutcome, DriverError> {
    let prog = parse_program(src).map_err(|source| DriverError::Parse {
        path: name.to_string(),
        source,
    })?;
    sort_check(&prog).map_err(|source| DriverError::Sort {
        path: name.to_string(),
        source,
    })?;

    let mut engine = Engine::new(engine_config(cfg, cfg.mode, cfg.fuel));
    let mut vars: BTreeMap<VarId, Sort> = BTreeMap::new();
    let emit_models = cfg.emit_models;
    let leaves = engine.run_inspect(eval_program(&prog), |e, r| {
        vars.extend(e.solver.declared_vars());
        if emit_models && r.is_err() {
            e.solver.get_model()
        } else {
            None
        }
    });
    if let Some(err @ BackendError::Spawn { .. }) = engine.solver.backend_error() {
        return Err(DriverError::Backend(err));
    }

    let branches = leaves
        .iter()
        .map(|(b, model)| branch_report(&b.result, &b.path_condition, emit_models, model.as_ref()))
        .collect();
    let backend_error = engine.solver.backend_error().map(|e| e.to_string());
    let log = cfg
        .log_level
        .map(|_| LogEntry::from_section(&engine.diag.tree().pruned(), cfg.log_timestamps));
    let stats = engine.stats();

    let mut verdicts = Vec::new();
    if let Some(bound) = cfg.oracle_bound {
        let b = i64::from(bound);
        let domain: Vec<BigInt> = (-b..=b).map(BigInt::from).collect();
        let mut ox_engine = Engine::new(engine_config(cfg, Mode::OX, Fuel::default()));
        verdicts.push(check_ox_soundness(&mut ox_engine, &prog, &domain));
        let mut ux_engine = Engine::new(engine_config(cfg, Mode::UX, Fuel::default()));
        verdicts.push(check_ux_soundness(&mut ux_engine, &prog, &domain));
    }

    let report = Report {
        program: name.to_string(),
        mode: cfg.mode,
        solver: match cfg.solver {
            SolverKind::Direct => "direct",
            SolverKind::Optimized => "optimized",
        }
        .to_string(),
        variables: vars
            .into_iter()
            .map(|(v, s)| VarReport {
                name: v.to_string(),
                sort: s.to_string(),
            })
            .collect(),
        branches,
        stats,
        verdicts,
        backend_error,
        log,
    };
    let exit_code = if report.verdicts.iter().any(|v| !(v.passed && v.exact)) {
        EXIT_FAILURE
    } else if report.error_branches() > 0 {
        EXIT_ERROR_BRANCHES
    } else {
        EXIT_OK
    };
    Ok(RunOutcome { report, exit_code })
}

fn engine_config(cfg: &RunConfig, mode: Mode, fuel: Fuel) -> EngineConfig {
    EngineConfig {
        mode,
        fuel,
        solver: cfg.solver,
        backend: cfg.backend.clone(),
        log_level: cfg.log_level,
    }
}

fn branch_report(
    result: &Result<Term, SimpError>,
    pc: &[Term],
    emit_models: bool,
    model: Option<&Interpretation>,
) -> BranchReport {
    let (outcome, value, error) = match result {
        Ok(t) => ("ok", Some(t.to_string()), None),
        Err(e) => ("error", None, Some(e.to_string())),
    };
    let wants_model = emit_models && result.is_err();
    BranchReport {
        outcome: outcome.to_string(),
        value,
        error,
        path_condition: pc.iter().map(|c| c.to_string()).collect(),
        model: model.map(|m| {
            m.iter()
                .map(|(v, g)| (v.to_string(), g.to_string()))
                .collect()
        }),
        model_valid: wants_model.then(|| model.is_some_and(|m| validates(m, pc))),
    }
}

/// Every constraint evaluates to true under `m`, checked without the backend.
pub fn validates(m: &Interpretation, pc: &[Term]) -> bool {
    pc.iter()
        .all(|c| c.eval_ground(m) == Ok(Ground::Bool(true)))
}
