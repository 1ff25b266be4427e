#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

pub const BLESS_VAR: &str = "SIMPLANG_BLESS";

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Corpus programs, sorted, as paths relative to the crate directory.
pub fn corpus() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = fs::read_dir(crate_dir().join("tests/corpus"))
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "sl"))
        .map(|p| p.strip_prefix(crate_dir()).unwrap().to_path_buf())
        .collect();
    out.sort();
    out
}

pub fn stem(p: &Path) -> String {
    p.file_stem().unwrap().to_string_lossy().into_owned()
}

pub struct Run {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn simplang(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_simplang"))
        .args(args)
        .current_dir(crate_dir())
        .output()
        .expect("run simplang");
    Run {
        stdout: String::from_utf8(out.stdout).expect("utf-8 output"),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        code: out.status.code().unwrap_or(-1),
    }
}

/// The fixed configurations golden files are produced with.
pub fn golden_configs() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("txt", vec!["--models", "--check-soundness", "2"]),
        (
            "json",
            vec!["--models", "--check-soundness", "2", "--report", "json"],
        ),
    ]
}

/// Programs that also get a golden with the debug log.
pub const LOGGED: [&str; 3] = ["02_ok_or_error", "25_redundant_guard", "28_div_in_guard"];

/// Each golden file name with the command line that produces it.
pub fn golden_cases() -> Vec<(String, Vec<String>)> {
    let mut out = Vec::new();
    for p in corpus() {
        let path = p.to_string_lossy().into_owned();
        for (ext, args) in golden_configs() {
            let mut argv = vec![path.clone()];
            argv.extend(args.iter().map(|s| s.to_string()));
            out.push((format!("{}.{ext}", stem(&p)), argv));
        }
        if LOGGED.contains(&stem(&p).as_str()) {
            out.push((
                format!("{}.log.txt", stem(&p)),
                vec![path.clone(), "--log-level".into(), "debug".into()],
            ));
        }
    }
    out
}

/// Compares every golden file, or rewrites them when the bless variable is
/// set. Returns the mismatching file names.
pub fn check_goldens() -> Vec<String> {
    let bless = std::env::var_os(BLESS_VAR).is_some();
    let dir = crate_dir().join("tests/golden");
    let mut bad = Vec::new();
    let mut codes = String::new();
    for (name, argv) in golden_cases() {
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        let run = simplang(&argv);
        let got = run.stdout;
        codes.push_str(&format!("{name} {}\n", run.code));
        let file = dir.join(&name);
        if bless {
            fs::write(&file, &got).unwrap();
        } else if fs::read_to_string(&file).ok().as_deref() != Some(got.as_str()) {
            bad.push(name);
        }
    }
    let codes_file = dir.join("exit_codes");
    if bless {
        fs::write(codes_file, codes).unwrap();
    } else if fs::read_to_string(codes_file).ok().as_deref() != Some(codes.as_str()) {
        bad.push("exit_codes".into());
    }
    bad
}
