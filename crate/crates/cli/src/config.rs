//! Run configuration: TOML config files plus command-line overrides.
//!
//! Config documents mirror the run parameters; unknown keys are rejected
//! so typos surface instead of silently falling back to defaults.

use anyhow::{anyhow, bail, Context, Result};
use modsmooth_core::funcspace::{by_name, FunctionSpec};
use modsmooth_core::moduli::ModulusKind;
use modsmooth_core::quadrature::{Grading, Lp, QuadratureRule};
use serde::Deserialize;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Modulus,
    KFunc,
    BestApprox,
    Verify,
    Report,
}

impl FromStr for Command {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "modulus" => Command::Modulus,
            "kfunc" => Command::KFunc,
            "bestapprox" => Command::BestApprox,
            "verify" => Command::Verify,
            "report" => Command::Report,
            other => bail!("unknown command {other:?}"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Equivalence,
    Scaling,
    Hierarchy,
    Jackson,
    Derivative,
    Inverse,
    Characterization,
    Membership,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Equivalence => "equivalence",
            Suite::Scaling => "scaling",
            Suite::Hierarchy => "hierarchy",
            Suite::Jackson => "jackson",
            Suite::Derivative => "derivative",
            Suite::Inverse => "inverse",
            Suite::Characterization => "characterization",
            Suite::Membership => "membership",
        }
    }
}

impl FromStr for Suite {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "equivalence" => Suite::Equivalence,
            "scaling" => Suite::Scaling,
            "hierarchy" => Suite::Hierarchy,
            "jackson" => Suite::Jackson,
            "derivative" => Suite::Derivative,
            "inverse" => Suite::Inverse,
            "characterization" => Suite::Characterization,
            "membership" => Suite::Membership,
            other => bail!(
                "unknown suite {other:?} (expected all, equivalence, scaling, hierarchy, \
                 jackson, derivative, inverse, characterization, membership)"
            ),
        })
    }
}

pub fn parse_kind(s: &str) -> Result<ModulusKind> {
    Ok(match s {
        "omega" => ModulusKind::Omega,
        "star" => ModulusKind::OmegaStar,
        "dt" => ModulusKind::OmegaDt,
        "mainpart" => ModulusKind::OmegaMainPart,
        other => bail!("unknown modulus kind {other:?} (expected omega, star, dt, mainpart)"),
    })
}

pub fn parse_p(s: &str) -> Result<Lp> {
    if s == "inf" || s == "infinity" {
        return Ok(Lp::Infinity);
    }
    let value: f64 = s.parse().with_context(|| format!("malformed p value {s:?}"))?;
    Lp::new(value).map_err(|_| anyhow!("p must be in [1, inf]"))
}

/// Raw TOML shape; every field optional so files can carry only what a
/// command needs. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    pub function_names: Option<Vec<String>>,
    pub k: Option<u32>,
    pub r: Option<u32>,
    pub p: Option<toml::Value>,
    pub t_values: Option<Vec<f64>>,
    pub output_dir: Option<String>,
    pub cache: Option<bool>,
    pub kind: Option<String>,
    pub suite: Option<String>,
    pub n: Option<u32>,
    pub n_max: Option<u32>,
    pub max_degree: Option<u32>,
    pub quadrature: Option<QuadratureSection>,
    pub hgrid: Option<HGridSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub panels: Option<usize>,
    pub nodes: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HGridSection {
    pub count: Option<usize>,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub functions: Vec<FunctionSpec>,
    pub k: u32,
    pub r: u32,
    pub p: Lp,
    pub t_values: Vec<f64>,
    pub kind: ModulusKind,
    pub suite: Suite,
    pub n: u32,
    pub n_max: Option<u32>,
    pub max_degree: u32,
    pub panels: usize,
    pub nodes: usize,
    pub hgrid_count: usize,
    pub output_dir: PathBuf,
    pub cache: bool,
}

impl RunConfig {
    pub fn rule(&self) -> QuadratureRule {
        QuadratureRule::new(self.panels, self.nodes, Grading::Cosine)
    }
}

pub fn resolve_functions(names: &[String]) -> Result<Vec<FunctionSpec>> {
    names
        .iter()
        .map(|name| {
            by_name(name).ok_or_else(|| anyhow!("unknown function name {name:?} in catalog"))
        })
        .collect()
}

/// Parse and validate a TOML config document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let file: FileConfig = toml::from_str(text).context("malformed config")?;
    let command: Command = file
        .command
        .as_deref()
        .ok_or_else(|| anyhow!("config must set command"))?
        .parse()?;
    build_config(command, &file)
}

/// Merge a (possibly empty) file config under a command; flags are applied
/// on top by the CLI layer.
pub fn build_config(command: Command, file: &FileConfig) -> Result<RunConfig> {
    let p = match &file.p {
        None => Lp::Finite(2.0),
        Some(toml::Value::String(s)) => parse_p(s)?,
        Some(toml::Value::Float(v)) => Lp::new(*v).map_err(|_| anyhow!("p must be in [1, inf]"))?,
        Some(toml::Value::Integer(v)) => {
            Lp::new(*v as f64).map_err(|_| anyhow!("p must be in [1, inf]"))?
        }
        Some(other) => bail!("p must be a number or \"inf\", got {other:?}"),
    };
    let functions = match &file.function_names {
        Some(names) => resolve_functions(names)?,
        None => Vec::new(),
    };
    if let Some(ts) = &file.t_values {
        if ts.iter().any(|&t| t <= 0.0) {
            bail!("t_values must be positive");
        }
    }
    Ok(RunConfig {
        command,
        functions,
        k: file.k.unwrap_or(2),
        r: file.r.unwrap_or(0),
        p,
        t_values: file.t_values.clone().unwrap_or_default(),
        kind: match &file.kind {
            Some(s) => parse_kind(s)?,
            None => ModulusKind::Omega,
        },
        suite: match &file.suite {
            Some(s) => s.parse()?,
            None => Suite::All,
        },
        n: file.n.unwrap_or(8),
        n_max: file.n_max,
        max_degree: file.max_degree.unwrap_or(32),
        panels: file.quadrature.as_ref().and_then(|q| q.panels).unwrap_or(64),
        nodes: file.quadrature.as_ref().and_then(|q| q.nodes).unwrap_or(16),
        hgrid_count: file.hgrid.as_ref().and_then(|h| h.count).unwrap_or(40),
        output_dir: PathBuf::from(file.output_dir.clone().unwrap_or_else(|| "out".into())),
        cache: file.cache.unwrap_or(false),
    })
}
