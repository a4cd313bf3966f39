//! Flat `key=value` run configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use ddmcert_core::pipeline::{Averaging, EpsPolicy, EstimatorOptions, ExperimentConfig, Preset, Record, PRESET_FRIEDRICHS};
use ddmcert_core::schwarz::{Schedule, SchwarzMode};

pub const KEYS: [&str; 11] =
    ["preset", "h", "H", "sweeps", "mode", "eps", "out", "emit_fields", "averaging", "local_improvement", "schedule"];

/// Rounds of corrector re-solves under the optimized Young parameters.
pub const OPT_ROUNDS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub h: f64,
    /// `None` means the corrector lives on the fine mesh.
    pub coarse_h: Option<f64>,
    pub sweeps: usize,
    pub mode: SchwarzMode,
    pub schedule: Schedule,
    pub eps: EpsPolicy,
    pub averaging: Averaging,
    pub local_improvement: bool,
    pub out: PathBuf,
    pub emit_fields: bool,
}

/// Reads `key=value` lines; `#` starts a comment.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key=value", n + 1))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            bail!("line {}: unknown key `{k}`", n + 1);
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Accepts decimals and `1/n`.
pub fn parse_spacing(s: &str) -> Result<f64> {
    let v = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>()? / b.trim().parse::<f64>()?,
        None => s.trim().parse::<f64>()?,
    };
    let n = 1.0 / v;
    if !(v > 0.0 && v <= 1.0) || (n - n.round()).abs() > 1e-9 {
        bail!("spacing {s}: 1/h must be a positive integer");
    }
    Ok(v)
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => bail!("expected a boolean, got `{s}`"),
    }
}

fn parse_preset(s: &str) -> Result<Preset> {
    if s == "lshape" {
        return Ok(Preset::LShape);
    }
    let dims = s.strip_prefix("rect:").or(if s == "rect" { Some("2x2") } else { None });
    let (m, n) = dims.and_then(|d| d.split_once('x')).ok_or_else(|| anyhow!("unknown preset `{s}`"))?;
    let (m, n) = (m.parse::<usize>()?, n.parse::<usize>()?);
    if m == 0 || n == 0 {
        bail!("rect preset needs positive dimensions");
    }
    Ok(Preset::Rect { m, n })
}

impl RunConfig {
    /// Builds a config from merged keys; `default_h` applies when `h` is absent.
    pub fn from_map(map: &BTreeMap<String, String>, default_h: f64) -> Result<Self> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let h = get("h").map(parse_spacing).transpose().context("h")?.unwrap_or(default_h);
        let coarse_h = get("H").map(parse_spacing).transpose().context("H")?;
        if let Some(c) = coarse_h {
            let r = c / h;
            if r < 1.0 - 1e-9 || (r - r.round()).abs() > 1e-9 {
                bail!("H = {c} must be an integer multiple of h = {h}");
            }
        }
        let sweeps = match get("sweeps") {
            Some(s) => s.parse::<usize>().context("sweeps")?,
            None => 16,
        };
        if sweeps == 0 {
            bail!("sweeps must be at least 1");
        }
        let mode = match get("mode").unwrap_or("multiplicative") {
            "multiplicative" => SchwarzMode::Multiplicative,
            "additive" => SchwarzMode::Additive,
            m => bail!("unknown mode `{m}`"),
        };
        let schedule = match get("schedule").unwrap_or("alternating") {
            "alternating" => Schedule::Alternating,
            "sweep" => Schedule::Sweep,
            s => bail!("unknown schedule `{s}`"),
        };
        let eps = match get("eps").unwrap_or("fixed") {
            "fixed" => EpsPolicy::Fixed([1.0; 3]),
            "opt" => EpsPolicy::Optimized { rounds: OPT_ROUNDS },
            e => bail!("unknown eps policy `{e}`"),
        };
        let averaging = match get("averaging").unwrap_or("fine") {
            "fine" => Averaging::FineMesh,
            "corrector" => Averaging::CorrectorMesh,
            a => bail!("unknown averaging `{a}`"),
        };
        Ok(RunConfig {
            preset: parse_preset(get("preset").unwrap_or("lshape"))?,
            h,
            coarse_h: coarse_h.filter(|c| (c - h).abs() > 1e-12 * h),
            sweeps,
            mode,
            schedule,
            eps,
            averaging,
            local_improvement: get("local_improvement").map(parse_bool).transpose()?.unwrap_or(false),
            out: PathBuf::from(get("out").unwrap_or("out")),
            emit_fields: get("emit_fields").map(parse_bool).transpose()?.unwrap_or(false),
        })
    }

    pub fn coarse(&self) -> f64 {
        self.coarse_h.unwrap_or(self.h)
    }

    pub fn experiment(&self, record: Record) -> ExperimentConfig {
        ExperimentConfig {
            preset: self.preset,
            h: self.h,
            coarse_h: self.coarse(),
            sweeps: self.sweeps,
            mode: self.mode,
            schedule: self.schedule,
            estimator: EstimatorOptions { eps: self.eps, averaging: self.averaging, local_improvement: self.local_improvement },
            record,
            c_f: PRESET_FRIEDRICHS,
        }
    }
}
