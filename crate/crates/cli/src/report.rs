use std::io::Write;

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    /// `value ≤ bound`; NaN fails.
    pub fn at_most(name: &'static str, value: f64, bound: f64) -> Self {
        Self {
            name,
            value,
            bound,
            pass: value <= bound,
        }
    }

    /// `lo ≤ value ≤ hi`, reported against `hi`.
    pub fn between(name: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name,
            value,
            bound: hi,
            pass: (lo..=hi).contains(&value),
        }
    }

    pub fn holds(name: &'static str, ok: bool) -> Self {
        Self {
            name,
            value: f64::from(u8::from(ok)),
            bound: 1.0,
            pass: ok,
        }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// Error listing every failed check, or `Ok` if none failed.
pub fn verdict(checks: &[Check]) -> Result<(), CliError> {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} = {:e} (bound {:e})", c.name, c.value, c.bound))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Breach(failed.join("; ")))
    }
}

/// Write to `--out` or stdout.
pub fn emit(cfg: &RunConfig, bytes: &[u8]) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("<stdout>".as_ref(), e))
        }
    }
}

pub fn emit_json<T: Serialize>(cfg: &RunConfig, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    emit(cfg, s.as_bytes())
}

/// Human-readable summary; stdout when the report went to a file.
pub fn say(cfg: &RunConfig, line: &str) {
    if cfg.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}
