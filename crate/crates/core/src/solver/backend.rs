//! An SMT-LIB2 solver running as a child process.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::rc::Rc;
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::{default_timeout, SolverResult};
use crate::diagnostics::{Diagnostics, LogLevel};
use crate::sexp::{self, Sexp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendConfig {
    /// Executable followed by its arguments.
    pub command: Vec<String>,
    /// Per-response timeout; `None` waits forever.
    pub timeout: Option<Duration>,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            command: vec!["z3".into(), "-in".into()],
            timeout: default_timeout(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("cannot start solver `{command}`: {reason}")]
    Spawn { command: String, reason: String },
    #[error("solver process exited unexpectedly")]
    Died,
    #[error("solver did not answer within {0} ms")]
    Timeout(u128),
    #[error("unexpected solver output: {0}")]
    Protocol(String),
    #[error("i/o error talking to the solver: {0}")]
    Io(String),
}

struct Process {
    child: Child,
    stdin: BufWriter<ChildStdin>,
    lines: Receiver<String>,
}

/// A lazily started solver process. After a failure the process is discarded
/// and a new one is started on next use; [`SmtBackend::generation`] changes
/// so clients know to replay their assertions.
pub struct SmtBackend {
    config: BackendConfig,
    diag: Rc<Diagnostics>,
    proc: Option<Process>,
    generation: u64,
    spawn_error: Option<BackendError>,
    last_error: Option<BackendError>,
}

impl SmtBackend {
    pub fn new(config: BackendConfig, diag: Rc<Diagnostics>) -> Self {
        SmtBackend {
            config,
            diag,
            proc: None,
            generation: 0,
            spawn_error: None,
            last_error: None,
        }
    }

    /// Incremented each time a process is started.
    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn is_running(&self) -> bool {
        self.proc.is_some()
    }

    pub fn spawn_error(&self) -> Option<&BackendError> {
        self.spawn_error.as_ref()
    }

    pub fn last_error(&self) -> Option<&BackendError> {
        self.last_error.as_ref()
    }

    fn ensure(&mut self) -> Result<(), BackendError> {
        if self.proc.is_some() {
            return Ok(());
        }
        if let Some(e) = &self.spawn_error {
            return Err(e.clone());
        }
        let (program, args) =
            self.config
                .command
                .split_first()
                .ok_or_else(|| BackendError::Spawn {
                    command: String::new(),
                    reason: "empty command".into(),
                })?;
        let spawned = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn();
        let mut child = match spawned {
            Ok(c) => c,
            Err(e) => {
                let err = BackendError::Spawn {
                    command: self.config.command.join(" "),
                    reason: e.to_string(),
                };
                self.diag.log(LogLevel::Error, || err.to_string());
                self.spawn_error = Some(err.clone());
                self.last_error = Some(err.clone());
                return Err(err);
            }
        };
        let stdin = BufWriter::new(child.stdin.take().expect("piped stdin"));
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        self.proc = Some(Process {
            child,
            stdin,
            lines: rx,
        });
        self.generation += 1;
        for cmd in [
            "(set-option :print-success false)",
            "(set-option :produce-models true)",
            "(set-logic ALL)",
        ] {
            self.send(cmd)?;
        }
        Ok(())
    }

    /// Writes one command. Commands that produce no output are buffered.
    pub fn send(&mut self, cmd: &str) -> Result<(), BackendError> {
        self.ensure()?;
        self.diag.log(LogLevel::Smt, || format!("> {cmd}"));
        let proc = self.proc.as_mut().expect("running");
        if let Err(e) = writeln!(proc.stdin, "{cmd}") {
            return Err(self.fail(BackendError::Io(e.to_string())));
        }
        Ok(())
    }

    pub fn check_sat(&mut self) -> Result<SolverResult, BackendError> {
        self.send("(check-sat)")?;
        let answer = self.read_response()?;
        match answer.as_atom() {
            Some("sat") => Ok(SolverResult::Sat),
            Some("unsat") => Ok(SolverResult::Unsat),
            Some("unknown") => Ok(SolverResult::Unknown),
            _ => Err(self.fail(BackendError::Protocol(answer.to_string()))),
        }
    }

    /// Sends `(get-model)` and returns the raw answer.
    pub fn get_model(&mut self) -> Result<Sexp, BackendError> {
        self.send("(get-model)")?;
        self.read_response()
    }

    fn read_response(&mut self) -> Result<Sexp, BackendError> {
        let timeout = self.config.timeout;
        let deadline = timeout.map(|t| Instant::now() + t);
        let proc = self.proc.as_mut().expect("running");
        if let Err(e) = proc.stdin.flush() {
            return Err(self.fail(BackendError::Io(e.to_string())));
        }
        let mut buf = String::new();
        loop {
            let proc = self.proc.as_mut().expect("running");
            let line = match deadline {
                None => proc
                    .lines
                    .recv()
                    .map_err(|_| RecvTimeoutError::Disconnected),
                Some(d) => proc
                    .lines
                    .recv_timeout(d.saturating_duration_since(Instant::now())),
            };
            let line = match line {
                Ok(l) => l,
                Err(RecvTimeoutError::Timeout) => {
                    let ms = timeout.unwrap_or_default().as_millis();
                    return Err(self.fail(BackendError::Timeout(ms)));
                }
                Err(RecvTimeoutError::Disconnected) => return Err(self.fail(BackendError::Died)),
            };
            if !buf.is_empty() {
                buf.push('\n');
            }
            buf.push_str(&line);
            match sexp::parse_all(&buf) {
                Ok(items) if items.is_empty() => {}
                Ok(mut items) => {
                    let resp = items.remove(0);
                    self.diag.log(LogLevel::Smt, || format!("< {resp}"));
                    let is_error = resp
                        .as_list()
                        .and_then(|l| l.first())
                        .and_then(Sexp::as_atom)
                        == Some("error");
                    if is_error {
                        // Errors from earlier silent commands arrive first.
                        self.diag
                            .log(LogLevel::Warning, || format!("solver reported {resp}"));
                        buf.clear();
                        continue;
                    }
                    return Ok(resp);
                }
                Err(e) if e.incomplete => {}
                Err(e) => return Err(self.fail(BackendError::Protocol(e.to_string()))),
            }
        }
    }

    fn fail(&mut self, err: BackendError) -> BackendError {
        self.diag.log(LogLevel::Warning, || {
            format!("solver backend failure: {err}; restarting")
        });
        self.kill();
        self.last_error = Some(err.clone());
        err
    }

    /// Stops the process; the next command starts a fresh one.
    pub fn kill(&mut self) {
        if let Some(mut p) = self.proc.take() {
            let _ = p.child.kill();
            let _ = p.child.wait();
        }
    }
}

impl Drop for SmtBackend {
    fn drop(&mut self) {
        if let Some(p) = self.proc.as_mut() {
            let _ = writeln!(p.stdin, "(exit)");
            let _ = p.stdin.flush();
        }
        self.kill();
    }
}

pub(crate) fn declare_cmd(v: crate::values::VarId, sort: crate::values::Sort) -> String {
    format!("(declare-const {v} {sort})")
}

/// Reads the `define-fun` entries of a `(get-model)` answer. Entries that are
/// not nullary constants named like our variables are ignored.
pub(crate) fn model_from_sexp(
    answer: &Sexp,
    arena: &crate::values::TermArena,
) -> Result<crate::values::Interpretation, String> {
    use crate::values::{Interpretation, VarId};

    let mut items = answer
        .as_list()
        .ok_or_else(|| format!("model is not a list: {answer}"))?;
    if items.first().and_then(Sexp::as_atom) == Some("model") {
        items = &items[1..];
    }
    let mut model = Interpretation::new();
    for item in items {
        let Some([head, name, params, _sort, value]) = item.as_list() else {
            continue;
        };
        if head.as_atom() != Some("define-fun") || params.as_list().is_none_or(|p| !p.is_empty()) {
            continue;
        }
        let Some(id) = name
            .as_atom()
            .and_then(|n| n.strip_prefix('v'))
            .and_then(|n| n.parse::<u32>().ok())
        else {
            continue;
        };
        let term = crate::values::smtlib_from_sexp(arena, value, &|_| None)
            .map_err(|e| format!("bad model value {value}: {e}"))?;
        let g = term
            .as_ground()
            .ok_or_else(|| format!("model value {value} is not a literal"))?;
        model.insert(VarId(id), g);
    }
    Ok(model)
}
