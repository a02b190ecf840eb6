//! modsmooth: weighted moduli of smoothness, K-functionals, best
//! polynomial approximation, and the verification harness tying them
//! together.

use anyhow::{Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand};
use modsmooth_cli::config::{self, build_config, parse_kind, parse_p, Command, FileConfig, RunConfig};
use modsmooth_cli::runner;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "modsmooth", version, about = "weighted moduli of smoothness toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Catalog function name (repeatable).
    #[arg(long = "f")]
    functions: Vec<String>,
    /// Output directory for CSV/JSON results.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Cache query results under <output_dir>/cache and reuse them.
    #[arg(long, action = ArgAction::SetTrue)]
    cache: bool,
    /// Optional TOML config file supplying defaults for any flag.
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a modulus of smoothness on a t-grid.
    Modulus {
        #[command(flatten)]
        common: CommonArgs,
        /// Difference order.
        #[arg(long)]
        k: Option<u32>,
        /// Derivative order of the function under the modulus.
        #[arg(long)]
        r: Option<u32>,
        /// Integrability exponent in [1, inf]; pass "inf" for the sup norm.
        #[arg(long)]
        p: Option<String>,
        /// Modulus scale t (repeatable).
        #[arg(long = "t")]
        t: Vec<f64>,
        /// One of omega, star, dt, mainpart.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Upper-bound the K-functional on a t-grid.
    Kfunc {
        #[command(flatten)]
        common: CommonArgs,
        /// Difference order.
        #[arg(long)]
        k: Option<u32>,
        /// Derivative order of the function under the modulus.
        #[arg(long)]
        r: Option<u32>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long = "t")]
        t: Vec<f64>,
        /// Cap on the candidate polynomial degree.
        #[arg(long)]
        max_degree: Option<u32>,
    },
    /// Degree of best polynomial approximation.
    Bestapprox {
        #[command(flatten)]
        common: CommonArgs,
        /// Approximate by polynomials of degree < n.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        p: Option<String>,
        /// Compute the whole sequence E_1..E_n_max instead of a single n.
        #[arg(long)]
        sequence: Option<u32>,
    },
    /// Run a verification suite and emit per-report CSVs plus summary.json.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// all, equivalence, scaling, hierarchy, jackson, derivative,
        /// inverse, characterization, membership.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Print the summary table from a previous verify run.
    Report {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn load_file_config(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

fn apply_common(cfg: &mut RunConfig, common: &CommonArgs) -> Result<()> {
    if !common.functions.is_empty() {
        cfg.functions = config::resolve_functions(&common.functions)?;
    }
    if let Some(dir) = &common.output_dir {
        cfg.output_dir = dir.clone();
    }
    if common.cache {
        cfg.cache = true;
    }
    Ok(())
}

fn make_config(cli: Cmd) -> Result<RunConfig> {
    match cli {
        Cmd::Modulus { common, k, r, p, t, kind } => {
            let file = load_file_config(&common.config)?;
            let mut cfg = build_config(Command::Modulus, &file)?;
            apply_common(&mut cfg, &common)?;
            if let Some(k) = k {
                cfg.k = k;
            }
            if let Some(r) = r {
                cfg.r = r;
            }
            if let Some(p) = p {
                cfg.p = parse_p(&p)?;
            }
            if !t.is_empty() {
                cfg.t_values = t;
            }
            if let Some(kind) = kind {
                cfg.kind = parse_kind(&kind)?;
            }
            Ok(cfg)
        }
        Cmd::Kfunc { common, k, r, p, t, max_degree } => {
            let file = load_file_config(&common.config)?;
            let mut cfg = build_config(Command::KFunc, &file)?;
            apply_common(&mut cfg, &common)?;
            if let Some(k) = k {
                cfg.k = k;
            }
            if let Some(r) = r {
                cfg.r = r;
            }
            if let Some(p) = p {
                cfg.p = parse_p(&p)?;
            }
            if !t.is_empty() {
                cfg.t_values = t;
            }
            if let Some(d) = max_degree {
                cfg.max_degree = d;
            }
            Ok(cfg)
        }
        Cmd::Bestapprox { common, n, p, sequence } => {
            let file = load_file_config(&common.config)?;
            let mut cfg = build_config(Command::BestApprox, &file)?;
            apply_common(&mut cfg, &common)?;
            if let Some(n) = n {
                cfg.n = n;
            }
            if let Some(p) = p {
                cfg.p = parse_p(&p)?;
            }
            if sequence.is_some() {
                cfg.n_max = sequence;
            }
            Ok(cfg)
        }
        Cmd::Verify { common, suite } => {
            let file = load_file_config(&common.config)?;
            let mut cfg = build_config(Command::Verify, &file)?;
            apply_common(&mut cfg, &common)?;
            if let Some(s) = suite {
                cfg.suite = s.parse()?;
            }
            Ok(cfg)
        }
        Cmd::Report { common } => {
            let file = load_file_config(&common.config)?;
            let mut cfg = build_config(Command::Report, &file)?;
            apply_common(&mut cfg, &common)?;
            Ok(cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match make_config(cli.command) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(2);
        }
    };
    ExitCode::from(runner::run(&cfg) as u8)
}
