//! Levelled logs grouped into nested sections, plus execution counters.

use std::cell::{Cell, RefCell};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Severity, ordered so that `Smt < Trace < … < Error`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogLevel {
    Smt,
    Trace,
    Debug,
    Info,
    Warning,
    Error,
}

impl LogLevel {
    pub const ALL: [LogLevel; 6] = [
        LogLevel::Error,
        LogLevel::Warning,
        LogLevel::Info,
        LogLevel::Debug,
        LogLevel::Trace,
        LogLevel::Smt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LogLevel::Smt => "smt",
            LogLevel::Trace => "trace",
            LogLevel::Debug => "debug",
            LogLevel::Info => "info",
            LogLevel::Warning => "warning",
            LogLevel::Error => "error",
        }
    }
}

impl fmt::Display for LogLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LogLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LogLevel::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown log level `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Message {
    pub level: LogLevel,
    pub text: String,
    /// Microseconds since the owning [`Diagnostics`] was created.
    pub offset_us: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LogNode {
    Section(Section),
    Message(Message),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Section {
    pub label: String,
    pub children: Vec<LogNode>,
}

impl Section {
    /// All messages in document order.
    pub fn messages(&self) -> Vec<&Message> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a Message>) {
        for c in &self.children {
            match c {
                LogNode::Section(s) => s.collect(out),
                LogNode::Message(m) => out.push(m),
            }
        }
    }

    /// Maximum nesting of sections below this one.
    pub fn depth(&self) -> usize {
        self.children
            .iter()
            .map(|c| match c {
                LogNode::Section(s) => 1 + s.depth(),
                LogNode::Message(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// A copy without sections that contain no messages at any depth.
    pub fn pruned(&self) -> Section {
        Section {
            label: self.label.clone(),
            children: self
                .children
                .iter()
                .filter_map(|c| match c {
                    LogNode::Section(s) => {
                        let p = s.pruned();
                        (!p.children.is_empty()).then_some(LogNode::Section(p))
                    }
                    LogNode::Message(m) => Some(LogNode::Message(m.clone())),
                })
                .collect(),
        }
    }
}

/// Execution counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    /// Choice points where a second alternative was explored.
    pub branches: u64,
    /// Alternatives skipped because branching fuel ran out.
    pub unexplored_branches: u64,
    /// `(check-sat)` commands sent to the backend on behalf of `check_sat`.
    pub solver_queries_external: u64,
    pub cache_hits: u64,
    pub guard_concrete_shortcuts: u64,
    pub guard_simplified_shortcuts: u64,
    pub guard_in_pc_shortcuts: u64,
    /// Calls to `check_sat` made by the engine.
    pub sat_checks: u64,
    /// Leaves dropped by the final feasibility check.
    pub leaves_discarded: u64,
    pub steps_consumed: u64,
    /// Paths cut because step fuel ran out.
    pub unexplored_steps: u64,
}

/// Log tree and counters for one engine.
#[derive(Debug)]
pub struct Diagnostics {
    threshold: Cell<LogLevel>,
    start: Instant,
    // stack[0] is the root; the last element is the innermost open section.
    stack: RefCell<Vec<Section>>,
    stats: RefCell<Stats>,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self::new(LogLevel::Warning)
    }
}

impl Diagnostics {
    pub fn new(threshold: LogLevel) -> Self {
        Diagnostics {
            threshold: Cell::new(threshold),
            start: Instant::now(),
            stack: RefCell::new(vec![Section {
                label: "root".into(),
                children: Vec::new(),
            }]),
            stats: RefCell::new(Stats::default()),
        }
    }

    pub fn threshold(&self) -> LogLevel {
        self.threshold.get()
    }

    pub fn set_threshold(&self, level: LogLevel) {
        self.threshold.set(level);
    }

    pub fn enabled(&self, level: LogLevel) -> bool {
        level >= self.threshold.get()
    }

    /// Records a message. `produce` runs only when `level` is enabled.
    pub fn log(&self, level: LogLevel, produce: impl FnOnce() -> String) {
        if !self.enabled(level) {
            return;
        }
        let text = produce();
        let offset_us = self.start.elapsed().as_micros() as u64;
        let mut stack = self.stack.borrow_mut();
        stack
            .last_mut()
            .expect("root section")
            .children
            .push(LogNode::Message(Message {
                level,
                text,
                offset_us,
            }));
    }

    /// Runs `body` inside a fresh child section. The section is closed even
    /// if `body` unwinds.
    pub fn with_section<R>(&self, label: &str, body: impl FnOnce() -> R) -> R {
        let _guard = self.open_section(label);
        body()
    }

    pub fn open_section(&self, label: &str) -> SectionGuard<'_> {
        let mut stack = self.stack.borrow_mut();
        stack.push(Section {
            label: label.to_string(),
            children: Vec::new(),
        });
        SectionGuard {
            diag: self,
            depth: stack.len(),
        }
    }

    fn close_to(&self, depth: usize) {
        let mut stack = self.stack.borrow_mut();
        while stack.len() >= depth && stack.len() > 1 {
            let done = stack.pop().unwrap();
            stack
                .last_mut()
                .unwrap()
                .children
                .push(LogNode::Section(done));
        }
    }

    /// A copy of the tree, with any still-open sections shown closed.
    pub fn tree(&self) -> Section {
        let stack = self.stack.borrow();
        let mut iter = stack.iter().rev();
        let mut acc = iter.next().unwrap().clone();
        for parent in iter {
            let mut p = parent.clone();
            p.children.push(LogNode::Section(acc));
            acc = p;
        }
        acc
    }

    pub fn stats_snapshot(&self) -> Stats {
        *self.stats.borrow()
    }

    pub fn bump(&self, update: impl FnOnce(&mut Stats)) {
        update(&mut self.stats.borrow_mut());
    }

    /// Clears the log tree and counters.
    pub fn clear(&self) {
        *self.stack.borrow_mut() = vec![Section {
            label: "root".into(),
            children: Vec::new(),
        }];
        *self.stats.borrow_mut() = Stats::default();
    }
}

/// Closes its section on drop.
#[must_use]
pub struct SectionGuard<'a> {
    diag: &'a Diagnostics,
    depth: usize,
}

impl Drop for SectionGuard<'_> {
    fn drop(&mut self) {
        self.diag.close_to(self.depth);
    }
}
