use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chp_core::codewords::Variant;
use serde::Serialize;

use crate::CliError;

pub const KEYS: &[&str] = &[
    "n",
    "s-range",
    "variant",
    "errors",
    "reps",
    "trials",
    "seed",
    "grid",
    "tol",
    "out",
    "format",
    "state",
    "worst-case",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Coherent,
    Squeezed,
}

impl StateKind {
    pub fn name(self) -> &'static str {
        match self {
            StateKind::Coherent => "coherent",
            StateKind::Squeezed => "squeezed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Errors {
    All,
    List(Vec<usize>),
}

/// Fully resolved settings for one run. `out` is not echoed into outputs so
/// the same run written to two directories stays byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub qubits: Vec<u32>,
    pub variant: Variant,
    pub errors: Option<Errors>,
    pub reps: Vec<usize>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub grid: (usize, usize),
    pub tol: f64,
    #[serde(skip)]
    pub out: PathBuf,
    pub format: Format,
    pub state: StateKind,
    pub worst_case: bool,
}

pub struct Defaults {
    pub qubits: &'static [u32],
}

/// Reads `key=value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("{}:{}: expected key=value", path.display(), lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("{}:{}: unknown key `{key}`", path.display(), lineno + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e| CliError::Config(format!("invalid {key} `{value}`: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    value.split(',').map(|v| parse(key, v)).collect()
}

/// `6`, `2..10` (inclusive) or `3,5,7`.
pub fn parse_qubits(value: &str) -> Result<Vec<u32>, CliError> {
    let mut out = Vec::new();
    for item in value.split(',') {
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b): (u32, u32) = (parse("n", a)?, parse("n", b)?);
                if a > b {
                    return Err(CliError::Config(format!("empty n range `{item}`")));
                }
                out.extend(a..=b);
            }
            None => out.push(parse("n", item)?),
        }
    }
    Ok(out)
}

/// A spin value written as `7/2`, `3.5` or `1`, returned as `2s`.
fn parse_two_s(value: &str) -> Result<u64, CliError> {
    let bad = || CliError::Config(format!("invalid spin `{value}`"));
    let value = value.trim();
    if let Some((p, q)) = value.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        return match q.trim() {
            "2" => Ok(p),
            "1" => Ok(2 * p),
            _ => Err(bad()),
        };
    }
    let x: f64 = value.parse().map_err(|_| bad())?;
    let two_s = 2.0 * x;
    if two_s < 0.0 || two_s.fract() != 0.0 {
        return Err(bad());
    }
    Ok(two_s as u64)
}

fn qubits_of(two_s: u64, raw: &str) -> Result<u32, CliError> {
    let dim = two_s + 1;
    if !dim.is_power_of_two() {
        return Err(CliError::Config(format!("spin {raw} gives N={dim}, not a power of two")));
    }
    Ok(dim.trailing_zeros())
}

/// `63/2`, `3/2..1023/2` (every power-of-two N in between) or a list.
pub fn parse_s_range(value: &str) -> Result<Vec<u32>, CliError> {
    let mut out = Vec::new();
    for item in value.split(',') {
        match item.split_once("..") {
            Some((a, b)) => {
                let lo = parse_two_s(a)? + 1;
                let hi = parse_two_s(b)? + 1;
                if lo > hi {
                    return Err(CliError::Config(format!("empty s range `{item}`")));
                }
                let mut n = lo.next_power_of_two().trailing_zeros();
                while (1u64 << n) <= hi {
                    out.push(n);
                    n += 1;
                }
            }
            None => out.push(qubits_of(parse_two_s(item)?, item)?),
        }
    }
    if out.is_empty() {
        return Err(CliError::Config(format!("s range `{value}` contains no power-of-two dimension")));
    }
    Ok(out)
}

fn parse_variant(value: &str) -> Result<Variant, CliError> {
    value.parse().map_err(CliError::Core)
}

fn parse_errors(value: &str) -> Result<Errors, CliError> {
    if value.trim() == "all" {
        Ok(Errors::All)
    } else {
        Ok(Errors::List(parse_list("errors", value)?))
    }
}

/// `64` or `65x64` (θ steps × φ steps).
fn parse_grid(value: &str) -> Result<(usize, usize), CliError> {
    match value.split_once(['x', 'X']) {
        Some((t, p)) => Ok((parse("grid", t)?, parse("grid", p)?)),
        None => {
            let g = parse("grid", value)?;
            Ok((g, g))
        }
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Config(format!("invalid {key} `{value}`"))),
    }
}

impl RunConfig {
    /// Builds the config from merged `key → value` settings.
    pub fn resolve(map: &BTreeMap<String, String>, defaults: Defaults) -> Result<Self, CliError> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let qubits = match (get("n"), get("s-range")) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either n or s-range, not both".into())),
            (Some(v), None) => parse_qubits(v)?,
            (None, Some(v)) => parse_s_range(v)?,
            (None, None) => defaults.qubits.to_vec(),
        };
        let format = match get("format").unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(CliError::Config(format!("format must be csv or json, got `{other}`"))),
        };
        let state = match get("state").unwrap_or("coherent") {
            "coherent" => StateKind::Coherent,
            "squeezed" => StateKind::Squeezed,
            other => return Err(CliError::Config(format!("state must be coherent or squeezed, got `{other}`"))),
        };
        let tol: f64 = get("tol").map(|v| parse("tol", v)).transpose()?.unwrap_or(1e-9);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CliError::Config(format!("tol must lie in (0, 1), got {tol}")));
        }
        let reps = get("reps").map(|v| parse_list("reps", v)).transpose()?.unwrap_or_else(|| vec![1]);
        if reps.is_empty() || reps.contains(&0) {
            return Err(CliError::Config("reps must be positive".into()));
        }
        let trials = get("trials").map(|v| parse("trials", v)).transpose()?;
        if trials == Some(0) {
            return Err(CliError::Config("trials must be positive".into()));
        }
        Ok(Self {
            qubits,
            variant: get("variant").map(parse_variant).transpose()?.unwrap_or(Variant::Restricted),
            errors: get("errors").map(parse_errors).transpose()?,
            reps,
            trials,
            seed: get("seed").map(|v| parse("seed", v)).transpose()?.unwrap_or(0),
            grid: get("grid").map(parse_grid).transpose()?.unwrap_or((65, 64)),
            tol,
            out: PathBuf::from(get("out").unwrap_or("out")),
            format,
            state,
            worst_case: get("worst-case").map(|v| parse_bool("worst-case", v)).transpose()?.unwrap_or(false),
        })
    }
}
