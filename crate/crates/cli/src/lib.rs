//! Batch driver: reads an experiment file, runs it, and writes
//! `result.json` plus kind-specific CSVs into an output directory. Failures
//! are written to `error.json` instead.

pub mod config;
pub mod error;
pub mod jobs;

use std::fs;
use std::path::Path;

use serde_json::json;
use supbin::schemes::{build_by_name, SCHEME_NAMES};

pub use config::{ExperimentConfig, Job, Kind};
pub use error::{CliError, ErrorReport, EXIT_FAILED, EXIT_INVALID, EXIT_REFUSED};

pub const RESULT_FILE: &str = "result.json";
pub const ERROR_FILE: &str = "error.json";

/// Runs the experiment in `config_path`, writing outputs to `out_dir`.
pub fn run(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(config_path).map_err(|source| CliError::Io {
        action: "read",
        path: config_path.to_path_buf(),
        source,
    })?;
    let cfg = ExperimentConfig::parse(&text)?;
    let output = jobs::run_job(&cfg.job, cfg.seed)?;
    create_dir(out_dir)?;
    for (name, contents) in &output.files {
        write(&out_dir.join(name), contents)?;
    }
    let doc = json!({
        "status": "ok",
        "version": config::CONFIG_VERSION,
        "kind": cfg.job.kind().name(),
        "seed": cfg.seed,
        "files": output.files.iter().map(|(n, _)| n).collect::<Vec<_>>(),
        "result": output.result,
    });
    write(&out_dir.join(RESULT_FILE), &(pretty(&doc)? + "\n"))?;
    remove_stale(&out_dir.join(ERROR_FILE))
}

/// Runs and converts the outcome to an exit status, recording any failure
/// in `error.json` when the output directory is usable.
pub fn run_to_exit_code(config_path: &Path, out_dir: &Path) -> i32 {
    match run(config_path, out_dir) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            let body = pretty(&e.report()).unwrap_or_default() + "\n";
            let written = create_dir(out_dir)
                .and_then(|()| write(&out_dir.join(ERROR_FILE), &body))
                .and_then(|()| remove_stale(&out_dir.join(RESULT_FILE)));
            if let Err(w) = written {
                eprintln!("error: {w}");
            }
            e.exit_code()
        }
    }
}

/// One line per builder: its name and rate symbols.
pub fn list_schemes() -> String {
    let mut out = String::new();
    for name in SCHEME_NAMES {
        let symbols = build_by_name(name, None)
            .map(|r| r.symbol_names().join(" "))
            .unwrap_or_else(|e| format!("<{e}>"));
        out.push_str(&format!("{name}: {symbols}\n"));
    }
    out
}

fn pretty<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Failed(e.to_string()))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        action: "create",
        path: dir.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        action: "write",
        path: path.to_path_buf(),
        source,
    })
}

fn remove_stale(path: &Path) -> Result<(), CliError> {
    match fs::remove_file(path) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(CliError::Io {
            action: "remove",
            path: path.to_path_buf(),
            source: e,
        }),
        _ => Ok(()),
    }
}
