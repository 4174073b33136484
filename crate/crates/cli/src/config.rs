//! Run configuration: flags, `key = value` files and their merge.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use recoil_bec::{Couplings64, LatticeConfig64, Model, ModelParams, ModelParams64};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CommandKind {
    /// Observables at one chemical potential.
    Point,
    /// Observables on a uniform chemical-potential grid.
    Sweep,
    /// Critical points, subcase and side of the first-order transition.
    Boundaries,
    /// Density profile of the matter-wave grating.
    Grating,
    /// Finite-volume convergence table.
    Fv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Command-line grammar. Values stay strings here so that flags and config
/// file entries go through one parser.
#[derive(Debug, Parser)]
#[command(name = "bec", version, about = "Phase structure of BEC superradiance with recoil")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    pub command: CommandKind,
    /// 1 = Raman (two internal states), 2 = Rayleigh (one state).
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long)]
    pub mass: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long = "mu-from")]
    pub mu_from: Option<String>,
    #[arg(long = "mu-to")]
    pub mu_to: Option<String>,
    #[arg(long)]
    pub steps: Option<String>,
    #[arg(long = "n-samples")]
    pub n_samples: Option<String>,
    /// Box sides for `fv`, comma separated and increasing.
    #[arg(long = "L")]
    pub box_sides: Option<String>,
    #[arg(long)]
    pub cutoff: Option<String>,
    /// Sources for `fv`, comma separated and decreasing.
    #[arg(long)]
    pub h: Option<String>,
    #[arg(long)]
    pub damping: Option<String>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<String>,
    #[arg(long)]
    pub tol: Option<String>,
    /// Flat `key = value` file; flags override its entries.
    #[arg(long, env = "BEC_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
}

/// Keys accepted in config files, in canonical form.
pub const KEYS: &[&str] = &[
    "model", "beta", "lambda", "omega", "g", "mass", "q", "mu", "mu_from", "mu_to", "steps", "n_samples", "L",
    "cutoff", "h", "damping", "max_iter", "tol", "output", "out",
];

fn canonical_key(raw: &str) -> Option<&'static str> {
    let k = raw.trim().replace('-', "_");
    if k == "box_side" {
        return Some("L");
    }
    KEYS.iter().copied().find(|&known| known == k)
}

/// Parses a flat `key = value` file; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
        let key = canonical_key(k).ok_or_else(|| CliError::Config(format!("line {}: unknown key {:?}", n + 1, k.trim())))?;
        map.insert(key.to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

impl Cli {
    fn flag_entries(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("model", &self.model),
            ("beta", &self.beta),
            ("lambda", &self.lambda),
            ("omega", &self.omega),
            ("g", &self.g),
            ("mass", &self.mass),
            ("q", &self.q),
            ("mu", &self.mu),
            ("mu_from", &self.mu_from),
            ("mu_to", &self.mu_to),
            ("steps", &self.steps),
            ("n_samples", &self.n_samples),
            ("L", &self.box_sides),
            ("cutoff", &self.cutoff),
            ("h", &self.h),
            ("damping", &self.damping),
            ("max_iter", &self.max_iter),
            ("tol", &self.tol),
            ("output", &self.output),
            ("out", &self.out),
        ]
    }

    /// Config file entries overridden by explicit flags.
    pub fn merged(&self) -> Result<BTreeMap<String, String>, CliError> {
        let mut map = match &self.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        for (key, value) in self.flag_entries() {
            if let Some(v) = value {
                map.insert(key.to_string(), v.clone());
            }
        }
        Ok(map)
    }

    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let map = self.merged()?;
        RunConfig::from_map(self.command, &map)
    }
}

/// Fully validated run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: ModelParams64,
    pub mu: Option<f64>,
    pub mu_from: Option<f64>,
    pub mu_to: Option<f64>,
    pub steps: usize,
    pub n_samples: usize,
    /// Box sides of an `fv` scan.
    pub box_sides: Vec<f64>,
    /// Sources of an `fv` scan.
    pub sources: Vec<f64>,
    /// Cutoff at the first box side, damping, iteration cap and tolerance.
    pub lattice: LatticeConfig64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_STEPS: usize = 101;
pub const DEFAULT_SAMPLES: usize = 64;
pub const DEFAULT_BOX_SIDES: &[f64] = &[10.0, 20.0, 40.0];
pub const DEFAULT_SOURCES: &[f64] = &[1e-2, 1e-3, 1e-4];

fn parse<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{key}: cannot parse {v:?}"))),
    }
}

fn finite(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>, CliError> {
    match parse::<f64>(map, key)? {
        Some(x) if !x.is_finite() => Err(CliError::Config(format!("{key}: must be finite"))),
        other => Ok(other),
    }
}

fn list(map: &BTreeMap<String, String>, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
    match map.get(key) {
        None => Ok(default.to_vec()),
        Some(v) => v
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Config(format!("{key}: cannot parse {s:?}")))
            })
            .collect(),
    }
}

impl RunConfig {
    /// Builds and validates a configuration from canonical keys.
    pub fn from_map(command: CommandKind, map: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let model = match parse::<u8>(map, "model")? {
            None => Model::Raman,
            Some(n) => Model::from_number(n).ok_or_else(|| CliError::Config(format!("model: expected 1 or 2, got {n}")))?,
        };
        let d = Couplings64::default();
        let couplings = Couplings64 {
            beta: finite(map, "beta")?.unwrap_or(d.beta),
            lambda: finite(map, "lambda")?.unwrap_or(d.lambda),
            omega: finite(map, "omega")?.unwrap_or(d.omega),
            g: finite(map, "g")?.unwrap_or(d.g),
            mass: finite(map, "mass")?.unwrap_or(d.mass),
            q: finite(map, "q")?.unwrap_or(d.q),
        };
        let params = ModelParams::new(model, couplings).map_err(|e| CliError::Config(e.to_string()))?;

        let box_sides = list(map, "L", DEFAULT_BOX_SIDES)?;
        let sources = list(map, "h", DEFAULT_SOURCES)?;
        let first_side = box_sides.first().copied().unwrap_or(DEFAULT_BOX_SIDES[0]);
        let defaults = LatticeConfig64::default();
        let lattice = LatticeConfig64 {
            box_side: first_side,
            cutoff: parse(map, "cutoff")?.unwrap_or_else(|| (1.2 * first_side).ceil().max(1.0) as usize),
            h: sources.first().copied().unwrap_or(defaults.h),
            damping: finite(map, "damping")?.unwrap_or(defaults.damping),
            max_iter: parse(map, "max_iter")?.unwrap_or(defaults.max_iter),
            tol: finite(map, "tol")?.unwrap_or(defaults.tol),
        };
        let format = match map.get("output").map(|s| s.to_ascii_lowercase()) {
            None => Format::Csv,
            Some(s) if s == "csv" => Format::Csv,
            Some(s) if s == "json" => Format::Json,
            Some(s) => return Err(CliError::Config(format!("output: expected csv or json, got {s:?}"))),
        };
        let cfg = Self {
            command,
            params,
            mu: finite(map, "mu")?,
            mu_from: finite(map, "mu_from")?,
            mu_to: finite(map, "mu_to")?,
            steps: parse(map, "steps")?.unwrap_or(DEFAULT_STEPS),
            n_samples: parse(map, "n_samples")?.unwrap_or(DEFAULT_SAMPLES),
            box_sides,
            sources,
            lattice,
            format,
            out: map.get("out").map(PathBuf::from),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        match self.command {
            CommandKind::Point | CommandKind::Grating | CommandKind::Fv if self.mu.is_none() => {
                return bad(format!("{:?} needs --mu", self.command).to_lowercase());
            }
            CommandKind::Sweep => {
                let (Some(a), Some(b)) = (self.mu_from, self.mu_to) else {
                    return bad("sweep needs --mu-from and --mu-to".into());
                };
                if !(a < b) {
                    return bad(format!("sweep needs mu_from < mu_to, got {a} >= {b}"));
                }
                if self.steps < 2 {
                    return bad(format!("sweep needs steps >= 2, got {}", self.steps));
                }
            }
            CommandKind::Boundaries if self.steps < 1 => {
                return bad("boundaries needs steps >= 1".into());
            }
            CommandKind::Grating if self.n_samples < 2 => {
                return bad(format!("n_samples must be at least 2, got {}", self.n_samples));
            }
            CommandKind::Grating if self.params.degenerate_recoil() => {
                return bad("grating needs q > 0".into());
            }
            CommandKind::Fv => {
                if self.params.degenerate_recoil() {
                    return bad("fv needs q > 0".into());
                }
                if self.box_sides.len() < 2 || self.box_sides.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("L: need at least two increasing box sides".into());
                }
                if self.box_sides[0] <= 0.0 {
                    return bad("L: box sides must be positive".into());
                }
                if self.sources.is_empty()
                    || self.sources.iter().any(|&h| !(h > 0.0))
                    || self.sources.windows(2).any(|w| !(w[1] < w[0]))
                {
                    return bad("h: need positive, decreasing sources".into());
                }
                self.lattice.validate().map_err(|e| CliError::Config(e.to_string()))?;
            }
            _ => {}
        }
        Ok(())
    }

    /// Uniform sweep grid including both ends.
    pub fn sweep_grid(&self) -> Vec<f64> {
        let (a, b) = (self.mu_from.unwrap_or(0.0), self.mu_to.unwrap_or(0.0));
        let n = self.steps.max(2);
        (0..n)
            .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn config_text_with_comments() {
        let m = parse_config_text("# defaults\nbeta = 2 # hot\n\nmu-from=-1\nbox_side = 5,10\n").unwrap();
        assert_eq!(m["beta"], "2");
        assert_eq!(m["mu_from"], "-1");
        assert_eq!(m["L"], "5,10");
        assert!(parse_config_text("nonsense").is_err());
        assert!(parse_config_text("colour = red").is_err());
    }

    #[test]
    fn defaults_and_validation() {
        let cfg = RunConfig::from_map(CommandKind::Point, &map(&[("mu", "-1")])).unwrap();
        assert_eq!(cfg.params.model(), Model::Raman);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.lattice.cutoff, 12);
        assert!(RunConfig::from_map(CommandKind::Point, &map(&[])).is_err());
        assert!(RunConfig::from_map(CommandKind::Point, &map(&[("mu", "0"), ("model", "3")])).is_err());
        assert!(RunConfig::from_map(CommandKind::Point, &map(&[("mu", "0"), ("lambda", "0.1")])).is_err());
        assert!(RunConfig::from_map(CommandKind::Point, &map(&[("mu", "nan")])).is_err());
        let sweep = |a: &str, b: &str, n: &str| {
            RunConfig::from_map(CommandKind::Sweep, &map(&[("mu_from", a), ("mu_to", b), ("steps", n)]))
        };
        assert!(sweep("0", "1", "5").is_ok());
        assert!(sweep("1", "0", "5").is_err());
        assert!(sweep("0", "1", "1").is_err());
    }

    #[test]
    fn fv_lists() {
        let cfg = RunConfig::from_map(CommandKind::Fv, &map(&[("mu", "4"), ("L", "5, 10"), ("h", "1e-2,1e-3")])).unwrap();
        assert_eq!(cfg.box_sides, vec![5.0, 10.0]);
        assert_eq!(cfg.sources, vec![1e-2, 1e-3]);
        assert_eq!(cfg.lattice.box_side, 5.0);
        assert!(RunConfig::from_map(CommandKind::Fv, &map(&[("mu", "4"), ("L", "10,5")])).is_err());
        assert!(RunConfig::from_map(CommandKind::Fv, &map(&[("mu", "4"), ("h", "1e-3,1e-2")])).is_err());
    }

    #[test]
    fn sweep_grid_hits_both_ends() {
        let cfg = RunConfig::from_map(CommandKind::Sweep, &map(&[("mu_from", "-1"), ("mu_to", "0.3"), ("steps", "7")])).unwrap();
        let grid = cfg.sweep_grid();
        assert_eq!(grid.len(), 7);
        assert_eq!(grid[0], -1.0);
        assert_eq!(grid[6], 0.3);
    }
}
