use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;

use pifo_bounds::analysis::{fit_complexity, stopping_times, ComplexityRecord, FitSummary, StoppingTime};
use pifo_bounds::instances::InstanceDoc;
use pifo_bounds::solvers::{run_with, RunOptions, RunTrace};
use pifo_bounds::verify::{run_suite, Suite};
use pifo_bounds::{certificate, Certificate, Family, HardInstance};

use crate::config::{read_json, ExperimentConfig, SweepConfig};

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(BufWriter::new(file), value)?;
    Ok(())
}

fn out_dir(flag: Option<&Path>, config: Option<&PathBuf>) -> PathBuf {
    flag.map(Path::to_path_buf).or_else(|| config.cloned()).unwrap_or_else(|| PathBuf::from("."))
}

#[derive(Serialize)]
struct Derived {
    alpha: f64,
    q: f64,
    xi: f64,
    certificate: Option<Certificate>,
}

#[derive(Serialize)]
struct GenOutput {
    instance: InstanceDoc,
    derived: Derived,
}

fn instance_certificate(inst: &HardInstance) -> Option<Certificate> {
    match inst.family {
        Family::OneD => None,
        _ => certificate(inst, inst.s.eps).ok(),
    }
}

pub fn gen(config: &Path, out: &Path) -> anyhow::Result<bool> {
    let cfg: ExperimentConfig = read_json(config)?;
    let inst = cfg.instance()?;
    let doc = GenOutput {
        instance: InstanceDoc::from_instance(&inst),
        derived: Derived { alpha: inst.s.alpha, q: inst.s.q, xi: inst.s.xi, certificate: instance_certificate(&inst) },
    };
    create_dir(out)?;
    let path = out.join("instance.json");
    write_json(&path, &doc)?;
    println!("{}", path.display());
    Ok(true)
}

pub fn verify(suite: &str, out: Option<&Path>, seed: u64) -> anyhow::Result<bool> {
    let suite: Suite = suite.parse()?;
    let report = run_suite(suite, seed);
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if let Some(dir) = out {
        create_dir(dir)?;
        write_json(&dir.join("report.json"), &report)?;
    }
    Ok(report.passed)
}

#[derive(Debug, Clone, Serialize)]
struct RunRecord {
    seed: u64,
    queries: u64,
    queries_to_eps: Option<u64>,
    censored: bool,
    final_metric: f64,
    /// Stopping time of the first index pattern that leaves the certified
    /// subspace, if observed.
    t_exit: Option<u64>,
    t_exit_beyond_budget: Option<bool>,
    /// Whether reaching the target came no earlier than that stopping time.
    consistent: bool,
}

#[derive(Serialize)]
struct RunSummary {
    family: Family,
    algorithm: &'static str,
    n: usize,
    budget: u64,
    eps: Option<f64>,
    certificate: Option<Certificate>,
    runs: Vec<RunRecord>,
    median_queries_to_eps: Option<u64>,
    median_censored: bool,
    consistent: bool,
}

fn run_record(inst: &HardInstance, cert: Option<&Certificate>, eps: Option<f64>, seed: u64, trace: &RunTrace) -> RunRecord {
    let queries_to_eps = eps.and_then(|e| trace.queries_to(e));
    let t_exit = cert.and_then(|c| stopping_times(trace, inst.n, c.depth + 1).last().copied().and_then(StoppingTime::value));
    let t_exit_beyond_budget = cert.map(|c| t_exit.map_or(trace.queries() > c.budget as u64, |t| t > c.budget as u64));
    // reaching eps means leaving the certified subspace, which needs the exit pattern first
    let consistent = match (cert, queries_to_eps) {
        (Some(_), Some(q)) => t_exit.is_some_and(|t| t <= q),
        _ => true,
    };
    RunRecord {
        seed,
        queries: trace.queries(),
        queries_to_eps,
        censored: queries_to_eps.is_none(),
        final_metric: trace.final_metric(),
        t_exit,
        t_exit_beyond_budget,
        consistent,
    }
}

/// Lower median, with censored runs ordered last.
fn median(values: &[Option<u64>]) -> Option<u64> {
    let mut v: Vec<u64> = values.iter().map(|q| q.unwrap_or(u64::MAX)).collect();
    v.sort_unstable();
    match v.get(v.len().saturating_sub(1) / 2) {
        Some(&m) if m != u64::MAX => Some(m),
        _ => None,
    }
}

fn execute(cfg: &ExperimentConfig, seeds: &[u64]) -> anyhow::Result<(HardInstance, Vec<(u64, RunTrace)>)> {
    let inst = cfg.instance()?;
    let scheme = cfg.scheme()?;
    let algo = cfg.algorithm();
    let budget = cfg.budget()?;
    let opts = RunOptions { target: cfg.target().filter(|_| cfg.stop_at_eps), span_check: false };
    let traces = seeds
        .par_iter()
        .map(|&seed| Ok((seed, run_with(&inst, &algo, &scheme, budget, seed, opts)?)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok((inst, traces))
}

pub fn run(config: &Path, out: Option<&Path>, seed: Option<u64>) -> anyhow::Result<bool> {
    let cfg: ExperimentConfig = read_json(config)?;
    let dir = out_dir(out, cfg.output.as_ref());
    let seeds = cfg.seeds(seed);
    let (inst, traces) = execute(&cfg, &seeds)?;
    let cert = instance_certificate(&inst);
    create_dir(&dir)?;
    let mut runs = Vec::new();
    for (seed, trace) in &traces {
        let path = dir.join(format!("trace_seed{seed}.csv"));
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        trace.write_csv(BufWriter::new(file))?;
        runs.push(run_record(&inst, cert.as_ref(), cfg.target(), *seed, trace));
    }
    let med = median(&runs.iter().map(|r| r.queries_to_eps).collect::<Vec<_>>());
    let consistent = runs.iter().all(|r| r.consistent);
    let summary = RunSummary {
        family: inst.family,
        algorithm: cfg.algorithm().name(),
        n: inst.n,
        budget: cfg.budget()?,
        eps: cfg.target(),
        certificate: cert,
        median_censored: med.is_none(),
        median_queries_to_eps: med,
        runs,
        consistent,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    println!(
        "{} runs; median queries to eps: {}",
        traces.len(),
        med.map_or_else(|| "censored".to_string(), |q| q.to_string())
    );
    Ok(consistent)
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    n: usize,
    kappa: f64,
    delta: f64,
    eps: f64,
    seeds: usize,
    queries: Option<u64>,
    censored: bool,
    /// `(n + √(nκ))·log(Δ/ε)`.
    law: f64,
    predicted: Option<f64>,
    consistent: bool,
}

#[derive(Serialize)]
struct SweepOutput {
    fit: Option<FitSummary>,
    fit_error: Option<String>,
    rows: Vec<SweepRow>,
}

pub fn sweep(config: &Path, out: Option<&Path>, seed: Option<u64>) -> anyhow::Result<bool> {
    let cfg: SweepConfig = read_json(config)?;
    let points = cfg.expand()?;
    let dir = out_dir(out, cfg.base.output.as_ref());
    let results = points
        .par_iter()
        .map(|p| {
            let seeds = p.seeds(seed);
            let (inst, traces) = execute(p, &seeds)?;
            let cert = instance_certificate(&inst);
            let recs: Vec<RunRecord> =
                traces.iter().map(|(s, t)| run_record(&inst, cert.as_ref(), p.target(), *s, t)).collect();
            Ok((p.clone(), inst, recs))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (p, inst, recs) in &results {
        let eps = p.target().context("sweep points need an eps target")?;
        let kappa = if inst.s.mu > 0.0 { inst.s.l / inst.s.mu } else { 0.0 };
        let delta = if inst.s.delta > 0.0 { inst.s.delta } else { 1.0 };
        let queries = median(&recs.iter().map(|r| r.queries_to_eps).collect::<Vec<_>>());
        let nf = inst.n as f64;
        if let Some(q) = queries {
            records.push(ComplexityRecord { n: inst.n, kappa, delta, eps, queries: q as f64 });
        }
        rows.push(SweepRow {
            n: inst.n,
            kappa,
            delta,
            eps,
            seeds: recs.len(),
            queries,
            censored: queries.is_none(),
            law: (nf + (nf * kappa).sqrt()) * (delta / eps).ln(),
            predicted: None,
            consistent: recs.iter().all(|r| r.consistent),
        });
    }
    let (fit, fit_error) = match fit_complexity(&records) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    if let Some(f) = &fit {
        for r in &mut rows {
            r.predicted = Some(f.predict(r.n, r.kappa, r.delta, r.eps));
        }
    }
    create_dir(&dir)?;
    let path = dir.join("records.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    write_json(&dir.join("fit.json"), &SweepOutput { fit, fit_error: fit_error.clone(), rows: rows.clone() })?;
    match &fit {
        Some(f) => println!("{} grid points; a = {:.4}, b = {:.4}, R^2 = {:.4}", rows.len(), f.a, f.b, f.r2),
        None => println!("{} grid points; no fit: {}", rows.len(), fit_error.unwrap_or_default()),
    }
    Ok(rows.iter().all(|r| r.consistent))
}
