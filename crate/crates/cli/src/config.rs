use std::path::{Path, PathBuf};

use clap::ValueEnum;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Settings shared by every subcommand, after merging the config file with
/// command-line flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub grid: usize,
    pub seed: u64,
    pub trials: usize,
    pub s_max: f64,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 2,
            grid: 256,
            seed: 0,
            trials: 200,
            s_max: 8.0,
            tol: None,
            out: None,
            format: None,
        }
    }
}

/// Flag values; `None` means "not given".
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Number of points / matrix size
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Grid intervals M on [0, 1], or samples for eigenpaths
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Random growth trials in addition to the three canonical ones
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Upper end of the flow parameter range
    #[arg(long, global = true)]
    pub smax: Option<f64>,
    /// Override the primary tolerance of the command's checks
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// key=value file; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Usage(format!("config: cannot parse {key} = {v:?}")))
}

/// Apply `key = value` lines; `#` starts a comment.
pub fn apply_file(cfg: &mut RunConfig, text: &str) -> Result<(), CliError> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected key=value",
                lineno + 1
            )));
        };
        let (k, v) = (k.trim(), v.trim());
        match k {
            "n" => cfg.n = parse(k, v)?,
            "grid" => cfg.grid = parse(k, v)?,
            "seed" => cfg.seed = parse(k, v)?,
            "trials" => cfg.trials = parse(k, v)?,
            "smax" => cfg.s_max = parse(k, v)?,
            "tol" => cfg.tol = Some(parse(k, v)?),
            "out" => cfg.out = Some(PathBuf::from(v)),
            "format" => {
                cfg.format = Some(
                    Format::from_str(v, true).map_err(|_| CliError::Usage(format!("config: unknown format {v:?}")))?,
                )
            }
            _ => {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key {k:?}",
                    lineno + 1
                )))
            }
        }
    }
    Ok(())
}

impl RunConfig {
    pub fn resolve(o: &Overrides) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        if let Some(path) = &o.config {
            apply_file(&mut cfg, &read(path)?)?;
        }
        if let Some(v) = o.n {
            cfg.n = v;
        }
        if let Some(v) = o.grid {
            cfg.grid = v;
        }
        if let Some(v) = o.seed {
            cfg.seed = v;
        }
        if let Some(v) = o.trials {
            cfg.trials = v;
        }
        if let Some(v) = o.smax {
            cfg.s_max = v;
        }
        if o.tol.is_some() {
            cfg.tol = o.tol;
        }
        if o.out.is_some() {
            cfg.out.clone_from(&o.out);
        }
        if o.format.is_some() {
            cfg.format = o.format;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Usage(format!("{what} must be positive")));
        if self.n == 0 {
            return bad("n");
        }
        if self.grid < 2 {
            return Err(CliError::Usage("grid must be at least 2".into()));
        }
        if self.trials == 0 {
            return bad("trials");
        }
        if !(self.s_max > 0.0 && self.s_max.is_finite()) {
            return bad("smax");
        }
        if self.tol.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
            return bad("tol");
        }
        Ok(())
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut cfg = RunConfig::default();
        apply_file(&mut cfg, "# run\nn = 3\nseed=9  # trailing\nformat = csv\n").unwrap();
        assert_eq!((cfg.n, cfg.seed, cfg.format), (3, 9, Some(Format::Csv)));
        assert!(apply_file(&mut cfg, "bogus = 1").is_err());
        assert!(apply_file(&mut cfg, "n 3").is_err());
        assert!(apply_file(&mut cfg, "grid = x").is_err());
    }

    #[test]
    fn validation() {
        let o = Overrides {
            n: Some(0),
            ..Default::default()
        };
        assert!(matches!(RunConfig::resolve(&o), Err(CliError::Usage(_))));
        let o = Overrides {
            smax: Some(-1.0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&o).is_err());
        let o = Overrides {
            seed: Some(4),
            ..Default::default()
        };
        assert_eq!(RunConfig::resolve(&o).unwrap().seed, 4);
    }
}
