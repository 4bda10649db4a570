//! Run configuration: defaults, an optional `key = value` file, then flags.

use clap::Args;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::{Path, PathBuf};

/// An error in the user's configuration (exit status 1).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand. All optional so that a config file
/// value survives when the flag is absent.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// key = value configuration file; flags override its entries
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub weight: Option<u32>,
    /// Coefficient table size (default depends on the command)
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    /// Height of the computed zero table
    #[arg(long = "zeros-tmax", global = true)]
    pub zeros_tmax: Option<f64>,
    /// Import the zero table instead of computing it
    #[arg(long = "zeros-file", global = true)]
    pub zeros_file: Option<PathBuf>,
    /// Reference zero table for cross-validation
    #[arg(long = "zeros-reference", global = true)]
    pub zeros_reference: Option<PathBuf>,
    #[arg(long = "out-dir", global = true)]
    pub out_dir: Option<PathBuf>,
    /// Coefficient cache directory
    #[arg(long = "cache-dir", global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    #[arg(long = "quad-tol", global = true)]
    pub quad_tol: Option<f64>,
    /// Target accuracy of L-values
    #[arg(long, global = true)]
    pub accuracy: Option<f64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Comma-separated gamma values for sweeps
    #[arg(long = "gamma-grid", global = true)]
    pub gamma_grid: Option<String>,
    /// t values for sweeps: comma list or start:step:end
    #[arg(long = "t-grid", global = true)]
    pub t_grid: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub weight: u32,
    pub nmax: Option<usize>,
    pub zeros_tmax: f64,
    pub zeros_file: Option<PathBuf>,
    pub zeros_reference: Option<PathBuf>,
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    pub quad_tol: f64,
    pub accuracy: f64,
    #[serde(skip)]
    pub threads: Option<usize>,
    pub seed: u64,
    pub gamma_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            weight: 12,
            nmax: None,
            zeros_tmax: 100.0,
            zeros_file: None,
            zeros_reference: None,
            out_dir: PathBuf::from("."),
            cache_dir: None,
            format: Format::Csv,
            quad_tol: 1e-9,
            accuracy: 1e-10,
            threads: None,
            seed: 20_240_611,
            gamma_grid: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            t_grid: parse_grid("0:0.5:30").expect("default grid"),
        }
    }
}

/// `a,b,c` or `start:step:end` (end included up to rounding).
pub fn parse_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    let num = |v: &str| -> anyhow::Result<f64> {
        let x: f64 = v.trim().parse().map_err(|_| config_err(format!("bad number {v:?} in grid {s:?}")))?;
        if !x.is_finite() {
            return Err(config_err(format!("non-finite value in grid {s:?}")));
        }
        Ok(x)
    };
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts[..] {
        [a, step, b] => {
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            if !(step > 0.0) || b < a {
                return Err(config_err(format!("grid {s:?} needs step > 0 and end >= start")));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            (0..=n).map(|j| a + j as f64 * step).collect()
        }
        [_] => s.split(',').map(num).collect::<anyhow::Result<Vec<_>>>()?,
        _ => return Err(config_err(format!("grid {s:?} is neither a list nor start:step:end"))),
    };
    if grid.is_empty() {
        return Err(config_err(format!("grid {s:?} is empty")));
    }
    Ok(grid)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> anyhow::Result<T> {
    v.parse().map_err(|_| config_err(format!("config key {key}: cannot parse {v:?}")))
}

impl RunConfig {
    /// Defaults, then the config file named by `--config`, then flags.
    pub fn resolve(args: &ConfigArgs) -> anyhow::Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = &args.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_file(&text)?;
        }
        cfg.apply_flags(args)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_file(&mut self, text: &str) -> anyhow::Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("config line {}: expected key = value", i + 1)))?;
            let key = key.trim().replace('-', "_");
            let v = value.trim();
            match key.as_str() {
                "weight" => self.weight = parse_value(&key, v)?,
                "nmax" => self.nmax = Some(parse_value(&key, v)?),
                "zeros_tmax" => self.zeros_tmax = parse_value(&key, v)?,
                "zeros_file" => self.zeros_file = Some(PathBuf::from(v)),
                "zeros_reference" => self.zeros_reference = Some(PathBuf::from(v)),
                "out_dir" => self.out_dir = PathBuf::from(v),
                "cache_dir" => self.cache_dir = Some(PathBuf::from(v)),
                "format" => {
                    self.format = match v {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        _ => return Err(config_err(format!("config key format: {v:?} is not csv or json"))),
                    }
                }
                "quad_tol" => self.quad_tol = parse_value(&key, v)?,
                "accuracy" => self.accuracy = parse_value(&key, v)?,
                "threads" => self.threads = Some(parse_value(&key, v)?),
                "seed" => self.seed = parse_value(&key, v)?,
                "gamma_grid" => self.gamma_grid = parse_grid(v)?,
                "t_grid" => self.t_grid = parse_grid(v)?,
                _ => return Err(config_err(format!("config line {}: unknown key {key:?}", i + 1))),
            }
        }
        Ok(())
    }

    fn apply_flags(&mut self, a: &ConfigArgs) -> anyhow::Result<()> {
        if let Some(v) = a.weight {
            self.weight = v;
        }
        if a.nmax.is_some() {
            self.nmax = a.nmax;
        }
        if let Some(v) = a.zeros_tmax {
            self.zeros_tmax = v;
        }
        if a.zeros_file.is_some() {
            self.zeros_file = a.zeros_file.clone();
        }
        if a.zeros_reference.is_some() {
            self.zeros_reference = a.zeros_reference.clone();
        }
        if let Some(v) = &a.out_dir {
            self.out_dir = v.clone();
        }
        if a.cache_dir.is_some() {
            self.cache_dir = a.cache_dir.clone();
        }
        if let Some(v) = a.format {
            self.format = v;
        }
        if let Some(v) = a.quad_tol {
            self.quad_tol = v;
        }
        if let Some(v) = a.accuracy {
            self.accuracy = v;
        }
        if a.threads.is_some() {
            self.threads = a.threads;
        }
        if let Some(v) = a.seed {
            self.seed = v;
        }
        if let Some(v) = &a.gamma_grid {
            self.gamma_grid = parse_grid(v)?;
        }
        if let Some(v) = &a.t_grid {
            self.t_grid = parse_grid(v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.quad_tol > 0.0) || !(self.accuracy > 0.0) {
            return Err(config_err("tolerances must be positive"));
        }
        if let Some(n) = self.nmax {
            if n < 10 {
                return Err(config_err(format!("nmax = {n} is below 10")));
            }
        }
        if !(self.zeros_tmax > 0.0) {
            return Err(config_err("zeros-tmax must be positive"));
        }
        if self.threads == Some(0) {
            return Err(config_err("threads must be at least 1"));
        }
        Ok(())
    }

    /// Table size: the configured one, else the command's default.
    pub fn nmax_or(&self, default: usize) -> usize {
        self.nmax.unwrap_or(default).max(10)
    }

    /// sha256 of the canonical JSON of everything that affects results.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serialization");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn out_path(&self, name: &Path) -> PathBuf {
        if name.is_absolute() {
            name.to_path_buf()
        } else {
            self.out_dir.join(name)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:0.5:2").unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(parse_grid("0:0.5:30").unwrap().len(), 61);
        assert_eq!(parse_grid("0.1, 0.3").unwrap(), vec![0.1, 0.3]);
        assert!(parse_grid("1:0:2").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut cfg = RunConfig::default();
        cfg.apply_file("# sweep\nweight = 16\nquad-tol = 1e-8\n").unwrap();
        assert_eq!(cfg.weight, 16);
        let args = ConfigArgs {
            weight: Some(12),
            ..Default::default()
        };
        cfg.apply_flags(&args).unwrap();
        assert_eq!((cfg.weight, cfg.quad_tol), (12, 1e-8));
    }

    #[test]
    fn unknown_key_and_bad_tolerance_are_config_errors() {
        let mut cfg = RunConfig::default();
        let e = cfg.apply_file("colour = blue").unwrap_err();
        assert!(e.downcast_ref::<ConfigError>().is_some());
        cfg.quad_tol = 0.0;
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            nmax: Some(5),
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn hash_ignores_paths_and_threads() {
        let a = RunConfig::default();
        let b = RunConfig {
            out_dir: "elsewhere".into(),
            threads: Some(3),
            ..Default::default()
        };
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig {
            seed: 1,
            ..Default::default()
        };
        assert_ne!(a.hash(), c.hash());
    }
}
