//! `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use tricrystal::profiles::{kink_threshold, FamilyKind};
use tricrystal::YGraphSpec;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Profile,
    Spectrum,
    Evolve,
    Instability,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Profile => "profile",
            Self::Spectrum => "spectrum",
            Self::Evolve => "evolve",
            Self::Instability => "instability",
            Self::Sweep => "sweep",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "profile" => Ok(Self::Profile),
            "spectrum" => Ok(Self::Spectrum),
            "evolve" => Ok(Self::Evolve),
            "instability" => Ok(Self::Instability),
            "sweep" => Ok(Self::Sweep),
            _ => Err("one of profile, spectrum, evolve, instability, sweep".into()),
        }
    }
}

/// Which stationary state (or none) the run is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Kink,
    Antikink,
    /// No background: the bare vertex operator / vacuum dynamics.
    Free,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Self::Kink => "kink",
            Self::Antikink => "antikink",
            Self::Free => "free",
        }
    }

    pub fn kind(self) -> Option<FamilyKind> {
        match self {
            Self::Kink => Some(FamilyKind::Kink),
            Self::Antikink => Some(FamilyKind::AntikinkKink),
            Self::Free => None,
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "kink" => Ok(Self::Kink),
            "antikink" | "antikink-kink" => Ok(Self::Antikink),
            "free" => Ok(Self::Free),
            _ => Err("one of kink, antikink, free".into()),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub family: Family,
    pub speeds: [f64; 3],
    /// Single-run coupling; `None` only for sweeps.
    pub lambda: Option<f64>,
    pub lambdas: Vec<f64>,
    pub length: f64,
    pub n_points: usize,
    pub k: usize,
    pub kernel_tol: Option<f64>,
    pub restricted: bool,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub epsilon: f64,
    pub record_every: usize,
    pub snapshot_every: usize,
    pub snapshot_stride: usize,
    pub pulse: Pulse,
    pub out: Option<PathBuf>,
    pub plot: bool,
}

pub use tricrystal::graph::{DEFAULT_LENGTH, DEFAULT_POINTS};
pub const DEFAULT_K: usize = 8;
pub const DEFAULT_EPSILON: f64 = 1e-6;

const KEYS: &[&str] = &[
    "command",
    "family",
    "lambda",
    "lambdas",
    "c",
    "L",
    "n",
    "k",
    "kernel_tol",
    "restricted",
    "dt",
    "t_end",
    "epsilon",
    "record_every",
    "snapshot_every",
    "snapshot_stride",
    "pulse_amplitude",
    "pulse_center",
    "pulse_width",
    "out",
    "plot",
];

fn bad(key: &str, expect: &str, got: &str) -> CliError {
    CliError::Config(format!("key '{key}' expects {expect}, got '{got}'"))
}

fn parse_f64(key: &str, raw: &str) -> Result<f64, CliError> {
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(key, "a finite number", raw))
}

fn parse_usize(key: &str, raw: &str) -> Result<usize, CliError> {
    raw.parse::<usize>().map_err(|_| bad(key, "a non-negative integer", raw))
}

fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',').map(|s| parse_f64(key, s.trim())).collect()
}

fn parse_bool(key: &str, raw: &str) -> Result<bool, CliError> {
    match raw {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, "true or false", raw)),
    }
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let mut raw: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected 'key = value', got '{line}'", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!(
                "line {}: unknown key '{key}' (known keys: {})",
                lineno + 1,
                KEYS.join(", ")
            )));
        }
        if raw.insert(key.to_string(), value.to_string()).is_some() {
            return Err(CliError::Config(format!("line {}: key '{key}' given twice", lineno + 1)));
        }
    }

    let command: Option<Command> = raw
        .get("command")
        .map(|v| v.parse().map_err(|e: String| bad("command", &e, v)))
        .transpose()?;
    let family: Option<Family> = raw
        .get("family")
        .map(|v| v.parse().map_err(|e: String| bad("family", &e, v)))
        .transpose()?;
    let needs_lambda = command != Some(Command::Sweep);
    let mut missing = Vec::new();
    if command.is_none() {
        missing.push("command");
    }
    if family.is_none() {
        missing.push("family");
    }
    if needs_lambda && !raw.contains_key("lambda") {
        missing.push("lambda");
    }
    if command == Some(Command::Sweep) && !raw.contains_key("lambdas") {
        missing.push("lambdas");
    }
    if !missing.is_empty() {
        return Err(CliError::Config(format!(
            "missing required keys: {} (sweeps take 'lambdas' instead of 'lambda')",
            missing.join(", ")
        )));
    }
    let (command, family) = (command.unwrap_or(Command::Spectrum), family.unwrap_or(Family::Free));

    let get_f64 = |key: &str| raw.get(key).map(|v| parse_f64(key, v)).transpose();
    let get_usize = |key: &str| raw.get(key).map(|v| parse_usize(key, v)).transpose();

    let speeds = match raw.get("c") {
        None => [1.0; 3],
        Some(v) => {
            let list = parse_list("c", v)?;
            <[f64; 3]>::try_from(list.as_slice()).map_err(|_| bad("c", "three comma-separated speeds", v))?
        }
    };
    if speeds.iter().any(|&c| c <= 0.0) {
        return Err(CliError::Config(format!("speeds c must all be > 0, got {speeds:?}")));
    }

    let lambda = get_f64("lambda")?;
    let lambdas = match raw.get("lambdas") {
        Some(v) => parse_list("lambdas", v)?,
        None => Vec::new(),
    };
    if command == Command::Sweep && lambdas.is_empty() {
        return Err(bad("lambdas", "a non-empty comma-separated list", ""));
    }

    let length = get_f64("L")?.unwrap_or(DEFAULT_LENGTH);
    if length <= 0.0 {
        return Err(CliError::Config(format!("L must be > 0, got {length}")));
    }
    let n_points = get_usize("n")?.unwrap_or(DEFAULT_POINTS);
    if n_points < tricrystal::graph::MIN_GRID_POINTS {
        return Err(CliError::Config(format!(
            "n must be >= {}, got {n_points}",
            tricrystal::graph::MIN_GRID_POINTS
        )));
    }
    let k = get_usize("k")?.unwrap_or(DEFAULT_K);
    if k == 0 {
        return Err(CliError::Config("k must be >= 1".into()));
    }
    let kernel_tol = get_f64("kernel_tol")?;
    if kernel_tol.is_some_and(|t| t <= 0.0) {
        return Err(CliError::Config("kernel_tol must be > 0".into()));
    }
    let restricted = raw.get("restricted").map(|v| parse_bool("restricted", v)).transpose()?.unwrap_or(false);
    if restricted && !(speeds[0] == speeds[1] && speeds[1] == speeds[2]) {
        return Err(CliError::Config(format!("restricted = true needs equal speeds, got c = {speeds:?}")));
    }
    let dt = get_f64("dt")?;
    if dt.is_some_and(|v| v <= 0.0) {
        return Err(CliError::Config("dt must be > 0".into()));
    }
    let t_end = get_f64("t_end")?;
    if t_end.is_some_and(|v| v < 0.0) {
        return Err(CliError::Config("t_end must be >= 0".into()));
    }
    let epsilon = get_f64("epsilon")?.unwrap_or(DEFAULT_EPSILON);
    if command == Command::Instability && !(1e-7..=1e-4).contains(&epsilon) {
        return Err(CliError::Config(format!("epsilon must lie in [1e-7, 1e-4], got {epsilon}")));
    }
    let record_every = get_usize("record_every")?.unwrap_or(10);
    let snapshot_every = get_usize("snapshot_every")?.unwrap_or(25);
    let snapshot_stride = get_usize("snapshot_stride")?.unwrap_or(10);
    for (key, v) in [("record_every", record_every), ("snapshot_every", snapshot_every), ("snapshot_stride", snapshot_stride)] {
        if v == 0 {
            return Err(CliError::Config(format!("{key} must be >= 1")));
        }
    }
    let pulse = Pulse {
        amplitude: get_f64("pulse_amplitude")?.unwrap_or(0.0),
        center: get_f64("pulse_center")?.unwrap_or(10.0),
        width: get_f64("pulse_width")?.unwrap_or(1.0),
    };
    if pulse.width <= 0.0 {
        return Err(CliError::Config("pulse_width must be > 0".into()));
    }
    let out = raw.get("out").map(PathBuf::from);
    let plot = raw.get("plot").map(|v| parse_bool("plot", v)).transpose()?.unwrap_or(false);

    if matches!(command, Command::Profile | Command::Instability) && family == Family::Free {
        return Err(CliError::Config(format!("command '{}' needs family = kink or antikink", command.name())));
    }

    let cfg = RunConfig {
        command,
        family,
        speeds,
        lambda: if command == Command::Sweep { None } else { lambda },
        lambdas: if command == Command::Sweep { lambdas } else { Vec::new() },
        length,
        n_points,
        k,
        kernel_tol,
        restricted,
        dt,
        t_end,
        epsilon,
        record_every,
        snapshot_every,
        snapshot_stride,
        pulse,
        out,
        plot,
    };
    for l in cfg.lambda_values() {
        validate_lambda(family, speeds, l)?;
    }
    Ok(cfg)
}

/// Checks the coupling against the existence range of the chosen family.
pub fn validate_lambda(family: Family, speeds: [f64; 3], lambda: f64) -> Result<(), CliError> {
    let spec = YGraphSpec::new(speeds, lambda).map_err(|e| CliError::Config(e.to_string()))?;
    if family == Family::Kink {
        let bound = -spec.speed_sum();
        if lambda >= bound {
            return Err(CliError::Config(format!(
                "lambda must be < -(c1+c2+c3) = {bound} for kink; got {lambda} (valid range: (-inf, {bound}); flat profile at {})",
                kink_threshold(&spec)
            )));
        }
    }
    if family == Family::Free && lambda == 0.0 {
        return Err(CliError::Config("lambda = 0 is not available for family = free".into()));
    }
    Ok(())
}

impl RunConfig {
    /// Couplings this run visits, in order.
    pub fn lambda_values(&self) -> Vec<f64> {
        match self.command {
            Command::Sweep => self.lambdas.clone(),
            _ => self.lambda.into_iter().collect(),
        }
    }

    /// Resolved configuration as ordered `key -> value` strings.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let join = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        m.insert("command".into(), self.command.name().into());
        m.insert("family".into(), self.family.name().into());
        m.insert("c".into(), join(&self.speeds));
        if let Some(l) = self.lambda {
            m.insert("lambda".into(), format!("{l}"));
        }
        if !self.lambdas.is_empty() {
            m.insert("lambdas".into(), join(&self.lambdas));
        }
        m.insert("L".into(), format!("{}", self.length));
        m.insert("n".into(), format!("{}", self.n_points));
        m.insert("k".into(), format!("{}", self.k));
        if let Some(t) = self.kernel_tol {
            m.insert("kernel_tol".into(), format!("{t}"));
        }
        m.insert("restricted".into(), format!("{}", self.restricted));
        if let Some(dt) = self.dt {
            m.insert("dt".into(), format!("{dt}"));
        }
        if let Some(t) = self.t_end {
            m.insert("t_end".into(), format!("{t}"));
        }
        m.insert("epsilon".into(), format!("{}", self.epsilon));
        m.insert("record_every".into(), format!("{}", self.record_every));
        m.insert("snapshot_every".into(), format!("{}", self.snapshot_every));
        m.insert("snapshot_stride".into(), format!("{}", self.snapshot_stride));
        m.insert("pulse_amplitude".into(), format!("{}", self.pulse.amplitude));
        m.insert("pulse_center".into(), format!("{}", self.pulse.center));
        m.insert("pulse_width".into(), format!("{}", self.pulse.width));
        m.insert("plot".into(), format!("{}", self.plot));
        m
    }
}
