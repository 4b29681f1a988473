//! Run configuration: a strict JSON file, overridden field by field by flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use serde_json::{Map, Value};
use stocomp_core::heat::{DoublingOptions, MassOptions, SolverChoice};
use stocomp_core::GraphFamily;

use crate::input::{parse_family, InputError};

/// Largest truncation radius accepted from input.
pub const MAX_RADIUS: u64 = 1 << 24;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoublingConfig {
    pub start_radius: Option<usize>,
    pub max_radius: Option<usize>,
    pub tolerance: Option<f64>,
}

/// Everything a command may read from `--config`. Unknown fields are
/// rejected; fields a command does not use are ignored by it.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub family: Option<Value>,
    pub lambda: Option<f64>,
    pub radius: Option<u64>,
    pub attachment: Option<String>,
    pub times: Option<Vec<f64>>,
    pub solver: Option<String>,
    pub poisson_tail: Option<f64>,
    pub stiff_tolerance: Option<f64>,
    pub doubling: Option<DoublingConfig>,
    pub paths: Option<u64>,
    pub seed: Option<u64>,
    pub with_mass: Option<bool>,
    pub t: Option<f64>,
    pub cap: Option<usize>,
    pub volume_series: Option<bool>,
    pub out: Option<PathBuf>,
    pub trace: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("config {}", path.display()))
    }
}

/// Family flags, each overriding the key of the same name in the config's
/// family object.
#[derive(Clone, Debug, Default)]
pub struct FamilyFlags {
    pub family: Option<String>,
    pub k: Option<String>,
    pub k_tilde: Option<String>,
    pub sphere: Option<String>,
    pub a: Option<String>,
    pub k_plus: Option<String>,
    pub k_minus: Option<String>,
    pub m_zero: Option<String>,
    pub intra: Option<String>,
}

impl FamilyFlags {
    fn pairs(&self) -> [(&'static str, &'static str, &Option<String>); 9] {
        [
            ("family", "--family", &self.family),
            ("k", "--k", &self.k),
            ("k_tilde", "--k-tilde", &self.k_tilde),
            ("S", "--S", &self.sphere),
            ("a", "--a", &self.a),
            ("k_plus", "--k-plus", &self.k_plus),
            ("k_minus", "--k-minus", &self.k_minus),
            ("m_zero", "--m-zero", &self.m_zero),
            ("intra", "--intra", &self.intra),
        ]
    }
}

/// The family after applying flags over the config file.
pub fn resolve_family(
    file: Option<&Value>,
    flags: &FamilyFlags,
) -> Result<GraphFamily, InputError> {
    let mut map = match file {
        Some(Value::Object(m)) => m.clone(),
        Some(_) => {
            return Err(InputError {
                field: "family".into(),
                message: "expected an object".into(),
            })
        }
        None => Map::new(),
    };
    // A different family on the command line starts from scratch.
    if let Some(name) = &flags.family {
        if map.get("family").and_then(Value::as_str) != Some(name.as_str()) {
            map.clear();
        }
    }
    let mut from_flag = Vec::new();
    for (key, flag, value) in flags.pairs() {
        if let Some(v) = value {
            map.insert(key.to_string(), Value::String(v.clone()));
        }
        if value.is_some() || file.is_none() {
            from_flag.push((key, flag));
        }
    }
    if map.is_empty() {
        return Err(InputError {
            field: "--family".into(),
            message: "no family given (use --family or a config file)".into(),
        });
    }
    parse_family("family", &Value::Object(map)).map_err(|mut e| {
        // Name the flag when the value came, or should have come, from one.
        for (key, flag) in from_flag {
            if e.field == format!("family.{key}") {
                e.field = flag.to_string();
            }
        }
        e
    })
}

pub fn check_radius(name: &str, r: u64) -> Result<usize> {
    if !(1..=MAX_RADIUS).contains(&r) {
        bail!("{name}: must lie in 1..={MAX_RADIUS}, got {r}");
    }
    Ok(r as usize)
}

pub fn check_positive(name: &str, x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        bail!("{name}: must be finite and positive, got {x}");
    }
    Ok(x)
}

pub fn check_tolerance(name: &str, x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0 && x < 1.0) {
        bail!("{name}: must lie in (0, 1), got {x}");
    }
    Ok(x)
}

/// Parses `0.1,0.5,1` from a flag; an empty string is an empty grid.
pub fn parse_times(text: &str) -> Result<Vec<f64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("--times: `{s}` is not a number"))
        })
        .collect()
}

pub fn check_times(times: &[f64], allow_zero: bool) -> Result<()> {
    if times.is_empty() {
        bail!("times: the time grid is empty");
    }
    for &t in times {
        if !(t.is_finite() && (t > 0.0 || allow_zero && t == 0.0)) {
            bail!("times: {t} is not a valid time");
        }
    }
    if times.windows(2).any(|p| p[1] <= p[0]) {
        bail!("times: must be strictly increasing");
    }
    Ok(())
}

pub fn parse_solver(name: &str) -> Result<SolverChoice> {
    Ok(match name {
        "auto" => SolverChoice::Auto,
        "uniformization" => SolverChoice::Uniformization,
        "radau-pade" | "stiff" => SolverChoice::Stiff,
        "contour" => SolverChoice::Contour,
        other => {
            bail!("solver: unknown solver `{other}` (auto, uniformization, radau-pade, contour)")
        }
    })
}

/// Mass options from the file and flags.
pub fn mass_options(
    file: &ConfigFile,
    solver: Option<&str>,
    poisson_tail: Option<f64>,
    stiff_tolerance: Option<f64>,
) -> Result<MassOptions> {
    let mut opts = MassOptions::default();
    if let Some(s) = solver.or(file.solver.as_deref()) {
        opts.solver = parse_solver(s)?;
    }
    if let Some(x) = poisson_tail.or(file.poisson_tail) {
        opts.poisson_tail = check_tolerance("poisson_tail", x)?;
    }
    if let Some(x) = stiff_tolerance.or(file.stiff_tolerance) {
        opts.stiff_tolerance = check_tolerance("stiff_tolerance", x)?;
    }
    Ok(opts)
}

pub fn doubling_options(
    file: &ConfigFile,
    start: Option<usize>,
    max: Option<usize>,
    tolerance: Option<f64>,
) -> Result<DoublingOptions> {
    let d = file.doubling.clone().unwrap_or_default();
    let mut opts = DoublingOptions::default();
    if let Some(s) = start.or(d.start_radius) {
        opts.start_radius = check_radius("doubling.start_radius", s as u64)?;
    }
    if let Some(m) = max.or(d.max_radius) {
        opts.max_radius = check_radius("doubling.max_radius", m as u64)?;
    }
    if opts.max_radius < opts.start_radius {
        bail!("doubling: max_radius is below start_radius");
    }
    if let Some(t) = tolerance.or(d.tolerance) {
        opts.tolerance = check_tolerance("doubling.tolerance", t)?;
    }
    Ok(opts)
}
