//! Settings resolved from defaults, a `key=value` file, `YOUNG_*` environment
//! variables and command-line flags, in increasing order of precedence.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use young_core::group::DEFAULT_SUMSET_LIMIT;
use young_core::QuadratureConfig;

use crate::CliError;

/// Prefix of environment overrides: `YOUNG_QUADRATURE_TOL=1e-9` sets
/// `quadrature_tol`.
pub const ENV_PREFIX: &str = "YOUNG_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::Config(format!("format must be json or csv, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    /// Stopping tolerance for iterative searches (change in ratio per cycle).
    pub norm_rel_tol: f64,
    /// Relative change at which torus quadrature stops refining.
    pub quadrature_tol: f64,
    pub sumset_limit: usize,
    /// Cap on quadrature points per axis.
    pub max_grid: usize,
    /// Search window: half-width of the lattice box or longest free word.
    /// `None` uses `[-50, 50]^d` and words of length at most 6.
    pub window: Option<u64>,
    /// Partition γ overrides by exponent regime; `None` uses `1/max(p, p')`.
    pub gamma_p_ge_2: Option<f64>,
    pub gamma_p_lt_2: Option<f64>,
    pub oversampling: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for CliConfig {
    fn default() -> Self {
        let q = QuadratureConfig::default();
        CliConfig {
            norm_rel_tol: 1e-12,
            quadrature_tol: q.tolerance,
            sumset_limit: DEFAULT_SUMSET_LIMIT,
            max_grid: q.max_points_per_axis,
            window: None,
            gamma_p_ge_2: None,
            gamma_p_lt_2: None,
            oversampling: q.oversampling,
            format: Format::Json,
            out: None,
        }
    }
}

pub const KEYS: [&str; 10] = [
    "norm_rel_tol",
    "quadrature_tol",
    "sumset_limit",
    "max_grid",
    "window",
    "gamma_p_ge_2",
    "gamma_p_lt_2",
    "oversampling",
    "format",
    "out",
];

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.trim()
        .parse()
        .map_err(|e| CliError::Config(format!("{key}: cannot parse {v:?}: {e}")))
}

fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{key} must be positive, got {v}")))
    }
}

impl CliConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "norm_rel_tol" => self.norm_rel_tol = positive(key, parse(key, value)?)?,
            "quadrature_tol" => self.quadrature_tol = positive(key, parse(key, value)?)?,
            "sumset_limit" => self.sumset_limit = parse(key, value)?,
            "max_grid" => self.max_grid = parse(key, value)?,
            "window" => self.window = Some(parse(key, value)?),
            "gamma_p_ge_2" => self.gamma_p_ge_2 = Some(positive(key, parse(key, value)?)?),
            "gamma_p_lt_2" => self.gamma_p_lt_2 = Some(positive(key, parse(key, value)?)?),
            "oversampling" => self.oversampling = parse(key, value)?,
            "format" => self.format = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            other => return Err(CliError::Config(format!("unknown setting {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn apply_env(&mut self, env: &dyn Fn(&str) -> Option<String>) -> Result<(), CliError> {
        for key in KEYS {
            if let Some(v) = env(&format!("{ENV_PREFIX}{}", key.to_uppercase())) {
                self.set(key, &v)?;
            }
        }
        Ok(())
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            oversampling: self.oversampling,
            tolerance: self.quadrature_tol,
            max_points_per_axis: self.max_grid,
            ..QuadratureConfig::default()
        }
    }

    pub fn gamma_for(&self, p: f64) -> Option<f64> {
        if p >= 2.0 {
            self.gamma_p_ge_2
        } else {
            self.gamma_p_lt_2
        }
    }
}
