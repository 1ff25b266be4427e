//! Run reports and their text and JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use symex_core::diagnostics::{LogNode, Section, Stats};
use symex_core::simplang::Verdict;
use symex_core::symex::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown report format `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VarReport {
    pub name: String,
    pub sort: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchReport {
    /// `ok` or `error`.
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// SMT-LIB terms.
    pub path_condition: Vec<String>,
    /// Variable name to value, for error branches when models are requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<BTreeMap<String, String>>,
    /// Whether every path condition constraint evaluates to true under
    /// `model`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_valid: Option<bool>,
}

impl BranchReport {
    pub fn is_error(&self) -> bool {
        self.outcome == "error"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum LogEntry {
    Section {
        section: String,
        children: Vec<LogEntry>,
    },
    Message {
        level: String,
        text: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        offset_us: Option<u64>,
    },
}

impl LogEntry {
    pub fn from_section(s: &Section, timestamps: bool) -> LogEntry {
        LogEntry::Section {
            section: s.label.clone(),
            children: s
                .children
                .iter()
                .map(|c| match c {
                    LogNode::Section(s) => LogEntry::from_section(s, timestamps),
                    LogNode::Message(m) => LogEntry::Message {
                        level: m.level.name().to_string(),
                        text: m.text.clone(),
                        offset_us: timestamps.then_some(m.offset_us),
                    },
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub program: String,
    pub mode: Mode,
    pub solver: String,
    pub variables: Vec<VarReport>,
    pub branches: Vec<BranchReport>,
    pub stats: Stats,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log: Option<LogEntry>,
}

impl Report {
    pub fn error_branches(&self) -> usize {
        self.branches.iter().filter(|b| b.is_error()).count()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("serializable");
                s.push('\n');
                s
            }
            Format::Text => self.to_text(),
        }
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "program: {}", self.program);
        let _ = writeln!(w, "mode: {}", self.mode);
        let _ = writeln!(w, "solver: {}", self.solver);
        let _ = writeln!(w, "variables:");
        for v in &self.variables {
            let _ = writeln!(w, "  {}: {}", v.name, v.sort);
        }
        let _ = writeln!(w, "branches: {}", self.branches.len());
        for (i, b) in self.branches.iter().enumerate() {
            let what = b.value.as_deref().or(b.error.as_deref()).unwrap_or("");
            let _ = writeln!(w, "  [{i}] {} {what}", b.outcome);
            if b.path_condition.is_empty() {
                let _ = writeln!(w, "      pc: true");
            }
            for c in &b.path_condition {
                let _ = writeln!(w, "      pc: {c}");
            }
            if let Some(m) = &b.model {
                let shown: Vec<String> = m.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                let valid = if b.model_valid == Some(true) {
                    ""
                } else {
                    " (INVALID)"
                };
                let _ = writeln!(w, "      model: {}{valid}", shown.join(", "));
            }
        }
        let _ = writeln!(w, "stats:");
        if let Ok(serde_json::Value::Object(fields)) = serde_json::to_value(self.stats) {
            for (k, v) in fields {
                let _ = writeln!(w, "  {k}: {v}");
            }
        }
        if !self.verdicts.is_empty() {
            let _ = writeln!(w, "verdicts:");
            for v in &self.verdicts {
                let status = match (v.passed, v.exact) {
                    (true, true) => "passed, exact",
                    (true, false) => "passed, inexact",
                    _ => "FAILED",
                };
                let _ = writeln!(
                    w,
                    "  {}: {status} ({} branches, {} concrete outcomes, {} symbolic outcomes)",
                    v.mode,
                    v.branches,
                    v.concrete_outcomes.len(),
                    v.symbolic_outcomes.len()
                );
                if let Some(r) = &v.reason {
                    let _ = writeln!(w, "    reason: {r}");
                }
            }
        }
        if let Some(e) = &self.backend_error {
            let _ = writeln!(w, "backend error: {e}");
        }
        if let Some(LogEntry::Section { children, .. }) = &self.log {
            let _ = writeln!(w, "log:");
            for c in children {
                write_log(w, c, 1);
            }
        }
        out
    }
}

fn write_log(w: &mut String, e: &LogEntry, depth: usize) {
    let pad = "  ".repeat(depth);
    match e {
        LogEntry::Section { section, children } => {
            let _ = writeln!(w, "{pad}{section}:");
            for c in children {
                write_log(w, c, depth + 1);
            }
        }
        LogEntry::Message {
            level,
            text,
            offset_us,
        } => {
            let stamp = offset_us.map(|t| format!(" +{t}us")).unwrap_or_default();
            let _ = writeln!(w, "{pad}[{level}{stamp}] {text}");
        }
    }
}
