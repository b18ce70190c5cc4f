//! Run configuration: command-line flags layered over an optional
//! `key = value` file.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Parser;
use transvecta::experiments::Radius;
use transvecta::lines::WordSpec;
use transvecta::sigma::SigmaMap;
use transvecta::torus::{CircleMap, TrigPoly};

use crate::CliError;

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "TRANSVECTA_THREADS";

/// Keys accepted in a config file; each is also a `--flag`.
pub const KEYS: &[&str] = &[
    "command",
    "action",
    "sigma",
    "alpha",
    "point",
    "r",
    "depth",
    "grid",
    "box",
    "steps",
    "digits",
    "seed",
    "threads",
    "format",
    "out",
    "algorithm",
    "slope",
    "word",
    "tol",
    "exact",
    "map1",
    "map2",
    "phi1",
    "phi2",
    "starts",
    "samples",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Euclid,
    Lines,
    Cfrac,
    Golden,
    Tower,
    LinesMeasure,
    Mertens,
    Coverage,
    Discrete,
    Torus,
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "euclid" => Command::Euclid,
            "lines" => Command::Lines,
            "cfrac" => Command::Cfrac,
            "golden" => Command::Golden,
            "tower" => Command::Tower,
            "lines-measure" => Command::LinesMeasure,
            "mertens" => Command::Mertens,
            "coverage" => Command::Coverage,
            "discrete" => Command::Discrete,
            "torus" => Command::Torus,
            other => return Err(CliError::Validation(format!("unknown command {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Slow,
    Accel,
}

/// Generalized transvections: Euclidean algorithms, σ-continued fractions,
/// exact radical towers and experiments.
///
/// Commands: euclid, lines, cfrac, golden, tower (verify-m0 | identity-check),
/// lines-measure, mertens, coverage, discrete, torus.
#[derive(Debug, Parser, Default)]
#[command(name = "transvecta", version)]
pub struct Cli {
    /// Command to run.
    pub command: Option<String>,
    /// Sub-action: `verify-m0` / `identity-check` for tower, `ox` / `oy` for lines.
    pub action: Option<String>,
    /// Config file of `key = value` lines; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// σ descriptor: id, pow:A, lin:A:B, sine:C [default: id, pow:2 for discrete].
    #[arg(long)]
    pub sigma: Option<String>,
    /// Exponent of the power map [default: 2].
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Point as comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Radius as p/q (exact) or a decimal.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    /// Word length or tower depth.
    #[arg(long)]
    pub depth: Option<String>,
    /// Cells per axis (t0:t1:steps for lines).
    #[arg(long)]
    pub grid: Option<String>,
    /// Box x0,y0,x1,y1 (or lo,hi for a cube).
    #[arg(long = "box", allow_hyphen_values = true)]
    pub bbox: Option<String>,
    /// Iterations or samples per line.
    #[arg(long)]
    pub steps: Option<String>,
    /// Number of digit pairs [default: 10].
    #[arg(long)]
    pub digits: Option<String>,
    /// Master seed [default: 0].
    #[arg(long)]
    pub seed: Option<String>,
    /// Worker threads [default: TRANSVECTA_THREADS, else all cores].
    #[arg(long)]
    pub threads: Option<String>,
    /// json or csv [default: csv for lines, json otherwise].
    #[arg(long)]
    pub format: Option<String>,
    /// Shorthand for --format csv.
    #[arg(long)]
    pub csv: bool,
    /// Output path [default: standard output].
    #[arg(long)]
    pub out: Option<String>,
    /// slow or accel [default: slow].
    #[arg(long)]
    pub algorithm: Option<String>,
    /// Slope r > 1 for cfrac.
    #[arg(long, allow_hyphen_values = true)]
    pub slope: Option<String>,
    /// Word spec pre:per over h, v.
    #[arg(long)]
    pub word: Option<String>,
    /// Tolerance [default: 1e-12].
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<String>,
    /// Exact rational arithmetic (mertens with sigma id).
    #[arg(long)]
    pub exact: bool,
    /// Torus map σ₁ [default: sine:0.5].
    #[arg(long)]
    pub map1: Option<String>,
    /// Torus map σ₂ [default: const:0.41421356237309515].
    #[arg(long)]
    pub map2: Option<String>,
    /// Test function in x [default: cos1].
    #[arg(long)]
    pub phi1: Option<String>,
    /// Test function in y [default: cos1].
    #[arg(long)]
    pub phi2: Option<String>,
    /// Random starts for the Birkhoff test [default: 8].
    #[arg(long)]
    pub starts: Option<String>,
    /// Points for the invariance histogram [default: 1000000].
    #[arg(long)]
    pub samples: Option<String>,
}

impl Cli {
    fn flags(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v.clone());
            }
        };
        put("command", &self.command);
        put("action", &self.action);
        put("sigma", &self.sigma);
        put("alpha", &self.alpha);
        put("point", &self.point);
        put("r", &self.r);
        put("depth", &self.depth);
        put("grid", &self.grid);
        put("box", &self.bbox);
        put("steps", &self.steps);
        put("digits", &self.digits);
        put("seed", &self.seed);
        put("threads", &self.threads);
        put("format", &self.format);
        put("out", &self.out);
        put("algorithm", &self.algorithm);
        put("slope", &self.slope);
        put("word", &self.word);
        put("tol", &self.tol);
        put("map1", &self.map1);
        put("map2", &self.map2);
        put("phi1", &self.phi1);
        put("phi2", &self.phi2);
        put("starts", &self.starts);
        put("samples", &self.samples);
        if self.csv {
            m.insert("format".into(), "csv".into());
        }
        if self.exact {
            m.insert("exact".into(), "true".into());
        }
        m
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut m = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(CliError::Validation(format!("config line {}: unknown key {k:?}", i + 1)));
        }
        m.insert(k.to_string(), v.trim().to_string());
    }
    Ok(m)
}

/// Fully validated configuration; subcommand-specific defaults are applied by
/// the handlers.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub action: Option<String>,
    /// `None` selects the command's default (pow:2 for discrete, id elsewhere).
    pub sigma: Option<SigmaMap>,
    pub alpha: Option<f64>,
    pub point: Option<Vec<f64>>,
    pub r: Option<Radius>,
    pub depth: Option<usize>,
    /// Cells per axis, or `t0:t1:steps` for `lines`.
    pub grid: Option<String>,
    pub bbox: Option<Vec<f64>>,
    pub steps: Option<usize>,
    pub digits: Option<usize>,
    pub seed: u64,
    pub threads: Option<usize>,
    /// `None` selects the command's default.
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub algorithm: Algorithm,
    pub slope: Option<f64>,
    pub word: Option<WordSpec>,
    pub tol: Option<f64>,
    pub exact: bool,
    pub map1: Option<CircleMap>,
    pub map2: Option<CircleMap>,
    pub phi1: Option<TrigPoly>,
    pub phi2: Option<TrigPoly>,
    pub starts: Option<usize>,
    pub samples: Option<usize>,
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::Validation(format!("invalid value {value:?} for {key}"))
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim().parse().map_err(|_| bad(key, v))
}

fn finite(key: &str, v: &str) -> Result<f64, CliError> {
    num::<f64>(key, v).and_then(|x| if x.is_finite() { Ok(x) } else { Err(bad(key, v)) })
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',').map(|t| finite(key, t)).collect()
}

impl RunConfig {
    /// Builds a configuration from parsed flags, reading `--config` if given.
    pub fn from_cli(cli: &Cli) -> Result<RunConfig, CliError> {
        let mut map = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        map.extend(cli.flags());
        RunConfig::from_map(&map)
    }

    /// Validates a key-value map; unknown keys are rejected.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(CliError::Validation(format!("unknown key {k:?}")));
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let command = get("command").ok_or_else(|| CliError::Validation("no command given".into()))?.parse()?;
        let opt_usize = |k: &str| get(k).map(|v| num::<usize>(k, v)).transpose();
        let opt_f64 = |k: &str| get(k).map(|v| finite(k, v)).transpose();
        let threads = match get("threads") {
            Some(v) => Some(num::<usize>("threads", v)?),
            None => match std::env::var(THREADS_ENV) {
                Ok(v) => Some(num::<usize>(THREADS_ENV, &v)?),
                Err(_) => None,
            },
        };
        if threads == Some(0) {
            return Err(bad("threads", "0"));
        }
        Ok(RunConfig {
            command,
            action: get("action").map(str::to_string),
            sigma: get("sigma")
                .map(|v| v.parse().map_err(|e: transvecta::sigma::SigmaError| CliError::Validation(e.to_string())))
                .transpose()?,
            alpha: opt_f64("alpha")?,
            point: get("point").map(|v| list("point", v)).transpose()?,
            r: get("r").map(|v| Radius::parse(v).ok_or_else(|| bad("r", v))).transpose()?,
            depth: opt_usize("depth")?,
            grid: get("grid").map(str::to_string),
            bbox: get("box").map(|v| list("box", v)).transpose()?,
            steps: opt_usize("steps")?,
            digits: opt_usize("digits")?,
            seed: get("seed").map(|v| num::<u64>("seed", v)).transpose()?.unwrap_or(0),
            threads,
            format: match get("format") {
                None => None,
                Some("json") => Some(Format::Json),
                Some("csv") => Some(Format::Csv),
                Some(v) => return Err(bad("format", v)),
            },
            out: get("out").map(PathBuf::from),
            algorithm: match get("algorithm") {
                None | Some("slow") => Algorithm::Slow,
                Some("accel") => Algorithm::Accel,
                Some(v) => return Err(bad("algorithm", v)),
            },
            slope: opt_f64("slope")?,
            word: get("word").map(|v| v.parse().map_err(|_| bad("word", v))).transpose()?,
            tol: opt_f64("tol")?,
            exact: match get("exact") {
                None | Some("false") => false,
                Some("true") => true,
                Some(v) => return Err(bad("exact", v)),
            },
            map1: get("map1").map(|v| v.parse().map_err(|_| bad("map1", v))).transpose()?,
            map2: get("map2").map(|v| v.parse().map_err(|_| bad("map2", v))).transpose()?,
            phi1: get("phi1").map(|v| v.parse().map_err(|_| bad("phi1", v))).transpose()?,
            phi2: get("phi2").map(|v| v.parse().map_err(|_| bad("phi2", v))).transpose()?,
            starts: opt_usize("starts")?,
            samples: opt_usize("samples")?,
        })
    }
}
