//! Flag/config-file merging and validation into a [`RunConfig`].

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};

use super::output::{Format, Separator};
use crate::error::{Error, Result};
use crate::massmodel::Grid;
use crate::numerics::DEFAULT_SEED;
use crate::parallel::Execution;
use crate::params::{parse_exact, preset, OrderingParams, Preset, SystemConfig};

/// Flags shared by every subcommand. Unset flags fall back to the
/// `--config` file, then to the defaults.
#[derive(Clone, Debug, Default, Args)]
pub struct RunArgs {
    /// Reduced Planck constant.
    #[arg(long, allow_hyphen_values = true)]
    pub hbar: Option<f64>,
    /// Mass prefactor in m(x) = m0·e^{cx}.
    #[arg(long, allow_hyphen_values = true)]
    pub m0: Option<f64>,
    /// Grading rate c (nonzero; negative mirrors the profile).
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Potential prefactor in V(x) = V0·e^{cx}.
    #[arg(long = "V0", allow_hyphen_values = true)]
    pub v0: Option<f64>,
    /// Preset name or explicit `a,alpha,beta,gamma` (fractions like -1/2 stay exact).
    #[arg(long, allow_hyphen_values = true)]
    pub ordering: Option<String>,
    /// Number of levels.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Finite-difference grid `xmin:xmax:n`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Also solve the discretized problem.
    #[arg(long)]
    pub numeric: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for the inverse-iteration start vectors.
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV field separator.
    #[arg(long, value_enum)]
    pub separator: Option<Separator>,
    /// Disable the thread pool.
    #[arg(long)]
    pub sequential: bool,
    /// `key = value` file; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderingChoice {
    pub label: String,
    pub params: OrderingParams,
    pub preset: Option<Preset>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub ordering: OrderingChoice,
    pub grid: Option<Grid>,
    pub levels: usize,
    pub numeric: bool,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub separator: Separator,
    pub execution: Execution,
}

pub const DEFAULT_LEVELS: usize = 4;
pub const DEFAULT_ORDERING: Preset = Preset::BenDanielDuke;

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => read_config_file(path)?,
            None => RunArgs::default(),
        };
        let merged = merge(args, file);
        let reference = SystemConfig::reference();
        let system = SystemConfig::new(
            merged.hbar.unwrap_or(reference.hbar()),
            merged.m0.unwrap_or(reference.m0()),
            merged.c.unwrap_or(reference.c()),
            merged.v0.unwrap_or(reference.v0()),
        )?;
        let ordering = match &merged.ordering {
            Some(s) => parse_ordering(s)?,
            None => OrderingChoice {
                label: DEFAULT_ORDERING.name().into(),
                params: DEFAULT_ORDERING.params(),
                preset: Some(DEFAULT_ORDERING),
            },
        };
        let levels = merged.levels.unwrap_or(DEFAULT_LEVELS);
        if levels == 0 {
            return Err(Error::Parse("--levels must be at least 1".into()));
        }
        Ok(Self {
            system,
            ordering,
            grid: merged.grid.as_deref().map(parse_grid).transpose()?,
            levels,
            numeric: merged.numeric,
            format: merged.format,
            out: merged.out,
            seed: merged.seed.unwrap_or(DEFAULT_SEED),
            separator: merged.separator.unwrap_or_default(),
            execution: if merged.sequential { Execution::Sequential } else { Execution::Parallel },
        })
    }

    /// The explicit grid, or the default domain with `n` points.
    pub fn grid_or_default(&self, n: usize) -> Result<Grid> {
        match self.grid {
            Some(g) => Ok(g),
            None => Grid::default_for(&self.system, n),
        }
    }
}

fn merge(flags: &RunArgs, file: RunArgs) -> RunArgs {
    let flags = flags.clone();
    RunArgs {
        hbar: flags.hbar.or(file.hbar),
        m0: flags.m0.or(file.m0),
        c: flags.c.or(file.c),
        v0: flags.v0.or(file.v0),
        ordering: flags.ordering.or(file.ordering),
        levels: flags.levels.or(file.levels),
        grid: flags.grid.or(file.grid),
        numeric: flags.numeric || file.numeric,
        format: flags.format.or(file.format),
        out: flags.out.or(file.out),
        seed: flags.seed.or(file.seed),
        separator: flags.separator.or(file.separator),
        sequential: flags.sequential || file.sequential,
        config: flags.config,
    }
}

fn read_config_file(path: &Path) -> Result<RunArgs> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Parse(format!("config key `{key}`: cannot parse `{raw}`")))
}

fn enum_value<T: ValueEnum>(key: &str, raw: &str) -> Result<T> {
    T::from_str(raw, true).map_err(|_| Error::Parse(format!("config key `{key}`: unknown value `{raw}`")))
}

/// Parses `key = value` lines; `#` starts a comment, values may be quoted.
pub fn parse_config(text: &str) -> Result<RunArgs> {
    let mut args = RunArgs::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, raw) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        let raw = raw.trim().trim_matches('"');
        match key {
            "hbar" => args.hbar = Some(value(key, raw)?),
            "m0" => args.m0 = Some(value(key, raw)?),
            "c" => args.c = Some(value(key, raw)?),
            "V0" | "v0" => args.v0 = Some(value(key, raw)?),
            "ordering" => args.ordering = Some(raw.to_string()),
            "levels" => args.levels = Some(value(key, raw)?),
            "grid" => args.grid = Some(raw.to_string()),
            "numeric" => args.numeric = value(key, raw)?,
            "format" => args.format = Some(enum_value(key, raw)?),
            "out" => args.out = Some(PathBuf::from(raw)),
            "seed" => args.seed = Some(value(key, raw)?),
            "separator" => args.separator = Some(enum_value(key, raw)?),
            "sequential" => args.sequential = value(key, raw)?,
            _ => return Err(Error::Parse(format!("config line {}: unknown key `{key}`", lineno + 1))),
        }
    }
    Ok(args)
}

/// Preset name or `a,alpha,beta,gamma`. Components that parse as exact
/// rationals keep the ordering exact.
pub fn parse_ordering(s: &str) -> Result<OrderingChoice> {
    if let Ok(p) = preset(s) {
        return Ok(OrderingChoice { label: p.name.name().into(), params: p.params, preset: Some(p.name) });
    }
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::UnknownPreset(s.to_string()));
    }
    let params = match parts.iter().map(|p| parse_exact(p)).collect::<Option<Vec<_>>>() {
        Some(q) => OrderingParams::exact(q[0], q[1], q[2], q[3])?,
        None => {
            let f: Vec<f64> = parts.iter().map(|p| value("ordering", p)).collect::<Result<_>>()?;
            OrderingParams::new(f[0], f[1], f[2], f[3])?
        }
    };
    Ok(OrderingChoice { label: parts.join(","), params, preset: None })
}

/// `xmin:xmax:n`
pub fn parse_grid(s: &str) -> Result<Grid> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidGrid(format!("expected xmin:xmax:n, got `{s}`")));
    }
    let bad = || Error::InvalidGrid(format!("cannot parse `{s}`"));
    Grid::new(
        parts[0].trim().parse().map_err(|_| bad())?,
        parts[1].trim().parse().map_err(|_| bad())?,
        parts[2].trim().parse().map_err(|_| bad())?,
    )
}
