//! Run configuration: `key = value` file merged under command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// `key = value` file; flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub m: Option<u32>,
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Dimension of the Plateau graph domain.
    #[arg(long = "N", global = true)]
    pub dim: Option<u32>,
    /// Obstacle radius of the Plateau graph.
    #[arg(long = "R", global = true)]
    pub radius: Option<f64>,
    #[arg(long = "s-max", global = true)]
    pub s_max: Option<f64>,
    #[arg(long = "r-max", global = true)]
    pub r_max: Option<f64>,
    /// Arc length of the series start off the axis.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Relative step tolerance of the profile integrator.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output directory (default: $CJL_OUT, else ./cjl_out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Comma-separated cone list for `report`, e.g. `2x2,2x3,4x4`.
    #[arg(long, global = true)]
    pub sweep: Option<String>,
    /// Number of link eigenvalues listed by `spectrum`.
    #[arg(long, global = true)]
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub m: Option<u32>,
    pub n: Option<u32>,
    #[serde(rename = "N")]
    pub dim: u32,
    #[serde(rename = "R")]
    pub radius: f64,
    pub s_max: f64,
    pub r_max: f64,
    pub eps: f64,
    pub tol: f64,
    pub out: PathBuf,
    pub format: Format,
    pub sweep: Vec<(u32, u32)>,
    pub count: usize,
}

pub const DEFAULT_SWEEP: [(u32, u32); 4] = [(2, 2), (2, 3), (3, 3), (4, 4)];

impl RunConfig {
    pub fn resolve(command: &'static str, flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        let get = |key: &str| file.get(key).map(String::as_str);

        let m = pick(flags.m, get("m"), "m")?;
        let n = pick(flags.n, get("n"), "n")?;
        let dim = pick(flags.dim, get("N"), "N")?.unwrap_or(3);
        let radius = pick(flags.radius, get("R"), "R")?.unwrap_or(1.0);
        let default_s = match command {
            "profile" => 200.0,
            _ => 2000.0,
        };
        let s_max = pick(flags.s_max, get("s-max"), "s-max")?.unwrap_or(default_s);
        let r_max = pick(flags.r_max, get("r-max"), "r-max")?.unwrap_or(1e3 * radius);
        let eps = pick(flags.eps, get("eps"), "eps")?.unwrap_or(1e-3);
        let tol = pick(flags.tol, get("tol"), "tol")?.unwrap_or(1e-12);
        let count = pick(flags.count, get("count"), "count")?.unwrap_or(16);
        let format = match (flags.format, get("format")) {
            (Some(f), _) => f,
            (None, Some(v)) => Format::from_str(v, true).map_err(|_| CliError::Usage(format!("unknown format `{v}`")))?,
            (None, None) => Format::Csv,
        };
        let out = flags
            .out
            .clone()
            .or_else(|| get("out").map(PathBuf::from))
            .or_else(|| std::env::var_os("CJL_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("cjl_out"));
        let sweep = match flags.sweep.as_deref().or(get("sweep")) {
            Some(text) => parse_sweep(text)?,
            None => DEFAULT_SWEEP.to_vec(),
        };

        if !(tol > 0.0 && eps > 0.0 && s_max > 0.0 && r_max > 0.0 && radius > 0.0) {
            return Err(CliError::Usage("tolerances, lengths and radii must be positive".into()));
        }
        Ok(Self { command, m, n, dim, radius, s_max, r_max, eps, tol, out, format, sweep, count })
    }

    /// `(m, n)` for single-cone commands.
    pub fn cone(&self) -> Result<(u32, u32), CliError> {
        match (self.m, self.n) {
            (Some(m), Some(n)) => Ok((m, n)),
            _ => Err(CliError::Usage(format!("`{}` needs --m and --n", self.command))),
        }
    }
}

fn pick<T: std::str::FromStr>(flag: Option<T>, file: Option<&str>, key: &str) -> Result<Option<T>, CliError> {
    match (flag, file) {
        (Some(v), _) => Ok(Some(v)),
        (None, Some(text)) => text
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{text}`"))),
        (None, None) => Ok(None),
    }
}

const KNOWN_KEYS: [&str; 12] = ["m", "n", "N", "R", "s-max", "r-max", "eps", "tol", "out", "format", "sweep", "count"];

/// Parses `key = value` lines; `#` starts a comment, `_` and `-` are
/// interchangeable in keys.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", no + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key `{}`", no + 1, k.trim())));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_sweep(text: &str) -> Result<Vec<(u32, u32)>, CliError> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(CliError::Usage("sweep list is empty".into()));
    }
    items
        .into_iter()
        .map(|item| {
            let (a, b) = item
                .split_once(['x', 'X', ':'])
                .ok_or_else(|| CliError::Usage(format!("sweep entry `{item}` is not of the form MxN")))?;
            let parse = |s: &str| s.trim().parse::<u32>().map_err(|_| CliError::Usage(format!("bad sweep entry `{item}`")));
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let map = parse_config("# run\nm = 3\n s_max = 500 # long\n\nformat=json\n").unwrap();
        assert_eq!(map["m"], "3");
        assert_eq!(map["s-max"], "500");
        assert_eq!(map["format"], "json");
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("m 3").is_err());
    }

    #[test]
    fn sweep_lists() {
        assert_eq!(parse_sweep("2x2, 3x3").unwrap(), vec![(2, 2), (3, 3)]);
        assert_eq!(parse_sweep("2:4").unwrap(), vec![(2, 4)]);
        assert!(parse_sweep("").is_err());
        assert!(parse_sweep(" , ").is_err());
        assert!(parse_sweep("2-2").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("cjl-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "m = 3\nn = 3\neps = 1e-4\n").unwrap();
        let flags = Flags { config: Some(path), m: Some(4), ..Flags::default() };
        let cfg = RunConfig::resolve("profile", &flags).unwrap();
        assert_eq!(cfg.cone().unwrap(), (4, 3));
        assert_eq!(cfg.eps, 1e-4);
        assert_eq!(cfg.s_max, 200.0);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
