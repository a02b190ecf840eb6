//! Command execution: assembles verification jobs, dispatches them to a
//! small worker pool, and persists CSV/JSON results.
//!
//! Exit-code contract: 0 on success, 1 when any verdict fails, 2 on
//! execution errors. Independent jobs may run concurrently; results are
//! collected and written in job order, so output bytes do not depend on
//! the worker count.

use crate::cache::Cache;
use crate::config::{Command, RunConfig, Suite};
use crate::output::{
    csv_document, report_csv, report_file_name, write_atomic, write_summary, ReportRecord,
    SummaryEntry,
};
use anyhow::{anyhow, Context, Result};
use modsmooth_core::bestapprox::best_approx;
use modsmooth_core::funcspace::{by_name, FunctionSpec};
use modsmooth_core::kfunctional::k_functional_upper;
use modsmooth_core::moduli::{compute, ModulusQuery};
use modsmooth_core::quadrature::Lp;
use modsmooth_core::smoothcheck::{
    default_eps_list, probe_membership, vanishing_limit_probe,
};
use modsmooth_core::verify::{
    default_matrix_function_names, default_n_grid, default_t_grid, log_grid, RatioRow,
    VerificationReport, Verdict, Verifier,
};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub fn run(config: &RunConfig) -> i32 {
    match execute(config) {
        Ok(any_failed) => {
            if any_failed {
                1
            } else {
                0
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    }
}

fn execute(config: &RunConfig) -> Result<bool> {
    match config.command {
        Command::Modulus => run_modulus(config),
        Command::KFunc => run_kfunc(config),
        Command::BestApprox => run_bestapprox(config),
        Command::Verify => run_verify(config),
        Command::Report => run_report(config),
    }
}

fn require_functions(config: &RunConfig) -> Result<Vec<FunctionSpec>> {
    if config.functions.is_empty() {
        Err(anyhow!("no function selected; pass --f <name> or set function_names"))
    } else {
        Ok(config.functions.clone())
    }
}

fn lp_key(p: Lp) -> String {
    format!("{p}")
}

// ---------------------------------------------------------------------
// modulus / kfunc / bestapprox
// ---------------------------------------------------------------------

fn run_modulus(config: &RunConfig) -> Result<bool> {
    let functions = require_functions(config)?;
    if config.t_values.is_empty() {
        return Err(anyhow!("no t values; pass --t or set t_values"));
    }
    let cache = Cache::new(&config.output_dir, config.cache);
    let rule = config.rule();
    let mut rows = Vec::new();
    for f in &functions {
        for &t in &config.t_values {
            let key = format!(
                "modulus;v1;f={};k={};r={};p={};t={t:.17e};kind={};panels={};nodes={};hgrid={}",
                f.name,
                config.k,
                config.r,
                lp_key(config.p),
                config.kind,
                config.panels,
                config.nodes,
                config.hgrid_count
            );
            let (value, argmax_h): (f64, f64) = match cache.get(&key) {
                Some(hit) => hit,
                None => {
                    let q = ModulusQuery::with_resolution(
                        f,
                        config.k,
                        config.r,
                        config.p,
                        t,
                        config.hgrid_count,
                        rule.clone(),
                    )
                    .map_err(|e| anyhow!("{e}"))?;
                    let res = compute(&q, config.kind).map_err(|e| anyhow!("{e}"))?;
                    let pair = (res.value, res.argmax_h);
                    cache.put(&key, &pair)?;
                    pair
                }
            };
            rows.push(format!(
                "{},{},{},{},{},{t},{value},{argmax_h}",
                config.kind,
                f.name,
                config.k,
                config.r,
                lp_key(config.p)
            ));
        }
    }
    let doc = csv_document("kind,f,k,r,p,t,value,argmax_h", &rows);
    write_atomic(&config.output_dir.join("modulus.csv"), &doc)?;
    Ok(false)
}

fn run_kfunc(config: &RunConfig) -> Result<bool> {
    let functions = require_functions(config)?;
    if config.t_values.is_empty() {
        return Err(anyhow!("no t values; pass --t or set t_values"));
    }
    let cache = Cache::new(&config.output_dir, config.cache);
    let rule = config.rule();
    let mut rows = Vec::new();
    for f in &functions {
        for &t in &config.t_values {
            let key = format!(
                "kfunc;v1;f={};k={};r={};p={};t={t:.17e};maxdeg={};panels={};nodes={}",
                f.name,
                config.k,
                config.r,
                lp_key(config.p),
                config.max_degree,
                config.panels,
                config.nodes
            );
            let (value, term_approx, term_deriv, degree_used): (f64, f64, f64, u32) =
                match cache.get(&key) {
                    Some(hit) => hit,
                    None => {
                        let res = k_functional_upper(
                            f,
                            config.k,
                            config.r,
                            config.p,
                            t,
                            config.max_degree,
                            &rule,
                        )
                        .map_err(|e| anyhow!("{e}"))?;
                        let tuple = (res.value, res.term_approx, res.term_deriv, res.degree_used);
                        cache.put(&key, &tuple)?;
                        tuple
                    }
                };
            rows.push(format!(
                "{},{},{},{},{t},{value},{term_approx},{term_deriv},{degree_used}",
                f.name,
                config.k,
                config.r,
                lp_key(config.p)
            ));
        }
    }
    let doc = csv_document("f,k,r,p,t,value,term_approx,term_deriv,degree_used", &rows);
    write_atomic(&config.output_dir.join("kfunc.csv"), &doc)?;
    Ok(false)
}

fn run_bestapprox(config: &RunConfig) -> Result<bool> {
    let functions = require_functions(config)?;
    let cache = Cache::new(&config.output_dir, config.cache);
    let rule = config.rule();
    let mut rows = Vec::new();
    let mut cert_rows = Vec::new();
    for f in &functions {
        let ns: Vec<u32> = match config.n_max {
            Some(n_max) => (1..=n_max).collect(),
            None => vec![config.n],
        };
        for &n in &ns {
            let key = format!(
                "bestapprox;v1;f={};n={n};p={};panels={};nodes={}",
                f.name,
                lp_key(config.p),
                config.panels,
                config.nodes
            );
            let (error, certificate): (f64, Option<Vec<f64>>) = match cache.get(&key) {
                Some(hit) => hit,
                None => {
                    let res = best_approx(f, n, config.p, &rule).map_err(|e| anyhow!("{e}"))?;
                    let pair = (res.error, res.certificate);
                    cache.put(&key, &pair)?;
                    pair
                }
            };
            rows.push(format!("{},{n},{},{error}", f.name, lp_key(config.p)));
            if config.n_max.is_none() {
                if let Some(points) = certificate {
                    for (idx, x) in points.iter().enumerate() {
                        cert_rows.push(format!("{},{n},{},{idx},{x}", f.name, lp_key(config.p)));
                    }
                }
            }
        }
    }
    let doc = csv_document("f,n,p,error", &rows);
    write_atomic(&config.output_dir.join("bestapprox.csv"), &doc)?;
    if !cert_rows.is_empty() {
        let doc = csv_document("f,n,p,point_index,x", &cert_rows);
        write_atomic(&config.output_dir.join("bestapprox_certificate.csv"), &doc)?;
    }
    Ok(false)
}

// ---------------------------------------------------------------------
// verify suites
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
enum VerifyJob {
    Equivalence { f: FunctionSpec, k: u32, r: u32, p: Lp },
    Scaling { f: FunctionSpec, k: u32, r: u32, p: Lp },
    Hierarchy { f: FunctionSpec, k: u32, r: u32, p: Lp },
    Jackson { f: FunctionSpec, k: u32, r: u32, p: Lp },
    Derivative { f: FunctionSpec, k: u32, r: u32, p: Lp, n_set: Vec<u32> },
    Inverse { f: FunctionSpec, k: u32, r: u32, p: Lp, n_max: u32 },
    Characterization { f: FunctionSpec, k: u32, r: u32, p: Lp, alpha: f64 },
    MembershipNorm { f: FunctionSpec, r: u32, p: Lp, gamma: f64 },
    MembershipVanishing { f: FunctionSpec, k: u32, r: u32, p: Lp },
}

impl VerifyJob {
    /// Canonical cache key; embeds everything the result depends on.
    fn cache_key(&self, config: &RunConfig) -> String {
        let res = format!(
            "panels={};nodes={};hgrid={};maxdeg={}",
            config.panels, config.nodes, config.hgrid_count, config.max_degree
        );
        match self {
            VerifyJob::Equivalence { f, k, r, p } => {
                format!("verify;v1;equivalence;f={};k={k};r={r};p={p};{res}", f.name)
            }
            VerifyJob::Scaling { f, k, r, p } => {
                format!("verify;v1;scaling;f={};k={k};r={r};p={p};{res}", f.name)
            }
            VerifyJob::Hierarchy { f, k, r, p } => {
                format!("verify;v1;hierarchy;f={};k={k};r={r};p={p};{res}", f.name)
            }
            VerifyJob::Jackson { f, k, r, p } => {
                format!("verify;v1;jackson;f={};k={k};r={r};p={p};{res}", f.name)
            }
            VerifyJob::Derivative { f, k, r, p, n_set } => {
                format!("verify;v1;derivative;f={};k={k};r={r};p={p};n={n_set:?};{res}", f.name)
            }
            VerifyJob::Inverse { f, k, r, p, n_max } => {
                format!("verify;v1;inverse;f={};k={k};r={r};p={p};nmax={n_max};{res}", f.name)
            }
            VerifyJob::Characterization { f, k, r, p, alpha } => format!(
                "verify;v1;characterization;f={};k={k};r={r};p={p};alpha={alpha};{res}",
                f.name
            ),
            VerifyJob::MembershipNorm { f, r, p, gamma } => {
                format!("verify;v1;membership;f={};r={r};p={p};gamma={gamma};{res}", f.name)
            }
            VerifyJob::MembershipVanishing { f, k, r, p } => {
                format!("verify;v1;vanishing;f={};k={k};r={r};p={p};{res}", f.name)
            }
        }
    }

    fn execute(&self, config: &RunConfig) -> Result<VerificationReport> {
        let v = Verifier::new(config.rule(), config.hgrid_count, config.max_degree);
        let report = match self {
            VerifyJob::Equivalence { f, k, r, p } => {
                v.check_equivalence(f, *k, *r, *p, &default_t_grid(*k))
            }
            VerifyJob::Scaling { f, k, r, p } => {
                v.check_scaling(f, *k, *r, *p, &log_grid(0.01, 2.0 / *k as f64, 4), &[2.0, 4.0])
            }
            VerifyJob::Hierarchy { f, k, r, p } => {
                v.check_hierarchy(f, *k, *r, *p, &default_t_grid(*k))
            }
            VerifyJob::Jackson { f, k, r, p } => {
                v.check_jackson(f, *k, *r, *p, &default_n_grid(*k, *r))
            }
            VerifyJob::Derivative { f, k, r, p, n_set } => {
                v.check_derivative_error(f, *k, *r, n_set, *p)
            }
            VerifyJob::Inverse { f, k, r, p, n_max } => {
                v.check_inverse(f, *k, *r, *p, *n_max, &log_grid(0.01, 0.5, 12))
            }
            VerifyJob::Characterization { f, k, r, p, alpha } => {
                v.check_alpha_characterization(f, *k, *r, *p, *alpha)
            }
            VerifyJob::MembershipNorm { f, r, p, gamma } => {
                let probe = probe_membership(f, *r, *p, *gamma, &default_eps_list(), &config.rule())
                    .map_err(|e| anyhow!("{e}"))?;
                let rows = probe
                    .norm_estimates
                    .iter()
                    .map(|&(eps, norm)| RatioRow {
                        params: format!("eps={eps:.6e}"),
                        lhs: norm,
                        rhs: 1.0,
                    })
                    .collect();
                return Ok(VerificationReport {
                    theorem_id: format!(
                        "membership[f={},r={r},p={p},gamma={gamma}]",
                        f.name
                    ),
                    rows,
                    fitted_constant: 0.0,
                    cap: 0.0,
                    verdict: Verdict::Pass,
                    tolerance_note: format!(
                        "{}; stabilizes={}",
                        probe.note, probe.stabilizes
                    ),
                });
            }
            VerifyJob::MembershipVanishing { f, k, r, p } => {
                let probe = vanishing_limit_probe(f, *k, *r, *p, &config.rule())
                    .map_err(|e| anyhow!("{e}"))?;
                let rows = probe
                    .rows
                    .iter()
                    .map(|&(t, w)| RatioRow { params: format!("t={t:.6e}"), lhs: w, rhs: 1.0 })
                    .collect();
                return Ok(VerificationReport {
                    theorem_id: format!("vanishing[f={},k={k},r={r},p={p}]", f.name),
                    rows,
                    fitted_constant: 0.0,
                    cap: 0.0,
                    verdict: Verdict::Pass,
                    tolerance_note: format!(
                        "{}; decays={} endpoint_limit_zero={:?} agreement={:?}",
                        probe.note, probe.decays, probe.endpoint_limit_zero, probe.agreement
                    ),
                });
            }
        };
        report.map_err(|e| anyhow!("{e}"))
    }
}

fn matrix_functions(config: &RunConfig) -> Result<Vec<FunctionSpec>> {
    if config.functions.is_empty() {
        default_matrix_function_names()
            .iter()
            .map(|n| by_name(n).ok_or_else(|| anyhow!("catalog missing {n}")))
            .collect()
    } else {
        Ok(config.functions.clone())
    }
}

fn all_p() -> [Lp; 3] {
    [Lp::Finite(1.0), Lp::Finite(2.0), Lp::Infinity]
}

fn assemble_jobs(config: &RunConfig, suite: Suite) -> Result<Vec<VerifyJob>> {
    let functions = matrix_functions(config)?;
    let mut jobs = Vec::new();
    let matrix = |jobs: &mut Vec<VerifyJob>, make: &dyn Fn(FunctionSpec, u32, u32, Lp) -> VerifyJob| {
        for f in &functions {
            for k in [1u32, 2, 3] {
                for r in [0u32, 1] {
                    for p in all_p() {
                        if f.max_order >= r && f.in_bpr(r, p) {
                            jobs.push(make(f.clone(), k, r, p));
                        }
                    }
                }
            }
        }
    };
    match suite {
        Suite::All => {
            for s in [
                Suite::Equivalence,
                Suite::Scaling,
                Suite::Hierarchy,
                Suite::Jackson,
                Suite::Derivative,
                Suite::Inverse,
                Suite::Characterization,
                Suite::Membership,
            ] {
                jobs.extend(assemble_jobs(config, s)?);
            }
        }
        Suite::Equivalence => {
            matrix(&mut jobs, &|f, k, r, p| VerifyJob::Equivalence { f, k, r, p })
        }
        Suite::Scaling => matrix(&mut jobs, &|f, k, r, p| VerifyJob::Scaling { f, k, r, p }),
        Suite::Hierarchy => {
            for f in &functions {
                for k in [2u32, 3] {
                    for r in [0u32, 1] {
                        for p in all_p() {
                            if f.max_order >= r + 1 && f.in_bpr(r + 1, p) {
                                jobs.push(VerifyJob::Hierarchy { f: f.clone(), k, r, p });
                            }
                        }
                    }
                }
            }
        }
        Suite::Jackson => matrix(&mut jobs, &|f, k, r, p| VerifyJob::Jackson { f, k, r, p }),
        Suite::Derivative => {
            let smooth = ["exp", "x^4", "abs_x_2.5", "one_minus_x_1.5"];
            for f in functions.iter().filter(|f| smooth.contains(&f.name.as_str())) {
                for k in [1u32, 2] {
                    for p in [Lp::Finite(2.0), Lp::Infinity] {
                        if f.in_bpr(1, p) {
                            jobs.push(VerifyJob::Derivative {
                                f: f.clone(),
                                k,
                                r: 1,
                                p,
                                n_set: vec![8, 16, 32],
                            });
                        }
                    }
                }
            }
        }
        Suite::Inverse => {
            let configs: [(&str, u32, u32, u32); 3] =
                [("abs_x_1", 2, 0, 128), ("abs_x_2.5", 2, 1, 128), ("phi_inv_r1", 1, 1, 64)];
            for (name, k, r, n_max) in configs {
                if let Some(f) = functions.iter().find(|f| f.name == name) {
                    jobs.push(VerifyJob::Inverse {
                        f: f.clone(),
                        k,
                        r,
                        p: Lp::Infinity,
                        n_max,
                    });
                }
            }
        }
        Suite::Characterization => {
            let configs: [(&str, u32, u32, f64); 3] =
                [("abs_x_1", 2, 0, 1.0), ("abs_x_1.5", 2, 0, 1.5), ("abs_x_2.5", 2, 1, 2.5)];
            for (name, k, r, alpha) in configs {
                if let Some(f) = functions.iter().find(|f| f.name == name) {
                    jobs.push(VerifyJob::Characterization {
                        f: f.clone(),
                        k,
                        r,
                        p: Lp::Infinity,
                        alpha,
                    });
                }
            }
        }
        Suite::Membership => {
            for f in &functions {
                for r in [1u32, 2] {
                    if f.max_order >= r {
                        jobs.push(VerifyJob::MembershipNorm {
                            f: f.clone(),
                            r,
                            p: Lp::Finite(2.0),
                            gamma: r as f64,
                        });
                    }
                }
                jobs.push(VerifyJob::MembershipVanishing {
                    f: f.clone(),
                    k: 2,
                    r: 0,
                    p: Lp::Finite(2.0),
                });
                if f.max_order >= 1 {
                    jobs.push(VerifyJob::MembershipVanishing {
                        f: f.clone(),
                        k: 1,
                        r: 1,
                        p: Lp::Infinity,
                    });
                }
            }
        }
    }
    Ok(jobs)
}

fn worker_count(jobs: usize) -> usize {
    let configured = std::env::var("MODSMOOTH_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    configured.min(jobs.max(1))
}

fn run_verify(config: &RunConfig) -> Result<bool> {
    let jobs = assemble_jobs(config, config.suite)?;
    let cache = Cache::new(&config.output_dir, config.cache);
    let cache_writes = Mutex::new(());

    let next = AtomicUsize::new(0);
    let results: Vec<Mutex<Option<Result<ReportRecord>>>> =
        (0..jobs.len()).map(|_| Mutex::new(None)).collect();
    let workers = worker_count(jobs.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= jobs.len() {
                    break;
                }
                let job = &jobs[idx];
                let key = job.cache_key(config);
                let outcome: Result<ReportRecord> = match cache.get::<ReportRecord>(&key) {
                    Some(hit) => Ok(hit),
                    None => job.execute(config).map(|report| {
                        let record = ReportRecord::from(&report);
                        let _guard = cache_writes.lock().unwrap();
                        let _ = cache.put(&key, &record);
                        record
                    }),
                };
                *results[idx].lock().unwrap() = Some(outcome);
            });
        }
    });

    let mut any_failed = false;
    let mut summary = Vec::with_capacity(jobs.len());
    for slot in results {
        let record = slot
            .into_inner()
            .unwrap()
            .expect("worker filled every slot")
            .context("verification job failed")?;
        let doc = report_csv(&record);
        write_atomic(&config.output_dir.join(report_file_name(&record.theorem_id)), &doc)?;
        if record.verdict == "fail" {
            any_failed = true;
        }
        summary.push(SummaryEntry {
            theorem_id: record.theorem_id,
            fitted_constant: record.fitted_constant,
            cap: record.cap,
            verdict: record.verdict,
        });
    }
    write_summary(&config.output_dir, &summary)?;
    println!(
        "verify[{}]: {} reports -> {} ({} workers)",
        config.suite.name(),
        summary.len(),
        config.output_dir.display(),
        workers
    );
    Ok(any_failed)
}

fn run_report(config: &RunConfig) -> Result<bool> {
    let entries = crate::output::read_summary(&config.output_dir)?;
    let mut any_failed = false;
    println!("{:<64} {:>12} {:>8} verdict", "theorem", "fitted", "cap");
    for e in &entries {
        println!("{:<64} {:>12.4e} {:>8.1} {}", e.theorem_id, e.fitted_constant, e.cap, e.verdict);
        if e.verdict == "fail" {
            any_failed = true;
        }
    }
    Ok(any_failed)
}
