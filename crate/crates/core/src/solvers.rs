//! Span-model runner with seeded component sampling and reference
//! incremental algorithms.
//!
//! Every run starts at `x₀ = 0` and pays one query per oracle call. The
//! trace holds one row per query. Algorithms:
//!
//! * `prox_point`: `x ← prox_{f_i}^γ(x)`, default `γ = 1/L`.
//! * `sgd`: constant step, default `1/(2L)`.
//! * `svrg` (Johnson & Zhang 2013): epoch `2n`, step `1/(4L)`.
//! * `saga` (Defazio, Bach & Lacoste-Julien 2014): step `1/(3L)`.
//! * `point_saga` (Defazio 2016): `γ = √((n−1)² + 4nL/μ)/(2Ln) − (1 − 1/n)/(2L)`,
//!   or `1/(3L)` without strong convexity.
//!
//! On the non-convex family every prox step is capped at half the validity
//! limit of the non-convex prox.

use std::io::Write;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{minimizer, Family, HardInstance};
use crate::oracle::{full_gradient, full_value, IfoReply, Oracle, OracleReply};
use crate::structure::{subspace_index, SUBSPACE_TOL};

/// Per-component sampling probabilities, nondecreasing, plus a seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SchemeDoc")]
pub struct SamplingScheme {
    probs: Vec<f64>,
    #[serde(skip)]
    cdf: Vec<f64>,
    seed: u64,
}

#[derive(Deserialize)]
struct SchemeDoc {
    probs: Vec<f64>,
    seed: u64,
}

impl TryFrom<SchemeDoc> for SamplingScheme {
    type Error = Error;

    fn try_from(doc: SchemeDoc) -> Result<Self> {
        SamplingScheme::new(doc.probs, doc.seed)
    }
}

impl SamplingScheme {
    pub fn uniform(n: usize, seed: u64) -> Self {
        Self::new(vec![1.0 / n as f64; n], seed).expect("uniform probabilities are valid")
    }

    pub fn new(probs: Vec<f64>, seed: u64) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::Invalid(format!("need at least 2 probabilities, got {}", probs.len())));
        }
        if probs.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::Invalid("every probability must be positive".into()));
        }
        if probs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Invalid("probabilities must be nondecreasing".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("probabilities sum to {total}, not 1")));
        }
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        *cdf.last_mut().unwrap() = 1.0;
        Ok(SamplingScheme { probs, cdf, seed })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SamplingScheme { seed, ..self.clone() }
    }

    fn pick(&self, u: f64) -> usize {
        self.cdf.partition_point(|&c| c <= u).min(self.probs.len() - 1) + 1
    }
}

/// Draw `t` (0-based) of the scheme's index stream, as a 1-based component.
/// Each draw is the ChaCha8 output at word position `2t` keyed by the
/// seed, so any single draw can be replayed without the ones before it.
pub fn sample_index(scheme: &SamplingScheme, t: u64) -> usize {
    IndexStream::starting_at(scheme, t).next_index()
}

/// Sequential reader of the same stream as [`sample_index`].
pub struct IndexStream<'a> {
    scheme: &'a SamplingScheme,
    rng: ChaCha8Rng,
}

impl<'a> IndexStream<'a> {
    pub fn new(scheme: &'a SamplingScheme) -> Self {
        Self::starting_at(scheme, 0)
    }

    pub fn starting_at(scheme: &'a SamplingScheme, t: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(scheme.seed);
        rng.set_word_pos(2 * t as u128);
        IndexStream { scheme, rng }
    }

    pub fn next_index(&mut self) -> usize {
        let u: f64 = self.rng.gen();
        self.scheme.pick(u)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum AlgorithmSpec {
    ProxPoint {
        #[serde(default)]
        gamma: Option<f64>,
    },
    Sgd {
        #[serde(default)]
        step: Option<f64>,
    },
    Svrg {
        #[serde(default)]
        step: Option<f64>,
        #[serde(default)]
        epoch: Option<usize>,
    },
    Saga {
        #[serde(default)]
        step: Option<f64>,
    },
    PointSaga {
        #[serde(default)]
        gamma: Option<f64>,
    },
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::ProxPoint { .. } => "prox_point",
            AlgorithmSpec::Sgd { .. } => "sgd",
            AlgorithmSpec::Svrg { .. } => "svrg",
            AlgorithmSpec::Saga { .. } => "saga",
            AlgorithmSpec::PointSaga { .. } => "point_saga",
        }
    }

    /// Spec with all hyperparameters at their defaults.
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "prox_point" => AlgorithmSpec::ProxPoint { gamma: None },
            "sgd" => AlgorithmSpec::Sgd { step: None },
            "svrg" => AlgorithmSpec::Svrg { step: None, epoch: None },
            "saga" => AlgorithmSpec::Saga { step: None },
            "point_saga" => AlgorithmSpec::PointSaga { gamma: None },
            other => return Err(Error::Invalid(format!("unknown algorithm {other:?}"))),
        })
    }
}

/// Default Point-SAGA step for `n` components, smoothness `L` and modulus `μ`.
pub fn point_saga_gamma(n: usize, l: f64, mu: f64) -> f64 {
    if mu > 0.0 {
        let nf = n as f64;
        ((nf - 1.0).powi(2) + 4.0 * nf * l / mu).sqrt() / (2.0 * l * nf) - (1.0 - 1.0 / nf) / (2.0 * l)
    } else {
        1.0 / (3.0 * l)
    }
}

fn cap_gamma(inst: &HardInstance, gamma: f64) -> f64 {
    gamma.min(0.5 * inst.gamma_limit())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `f(x) − f*`.
    Subopt,
    /// `‖∇f(x)‖`, for the non-convex family.
    GradNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    /// Query number, 1-based.
    pub t: u64,
    /// Component queried.
    pub i_t: usize,
    pub gamma_t: f64,
    /// Cumulative query count.
    pub queries: u64,
    /// Suboptimality or gradient norm of the iterate after this query.
    pub metric: f64,
    /// Subspace index of the iterate after this query.
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub metric: Metric,
    /// Metric at `x₀ = 0`.
    pub initial_metric: f64,
    pub rows: Vec<TraceRow>,
    pub final_iterate: Vec<f64>,
}

impl RunTrace {
    pub fn queries(&self) -> u64 {
        self.rows.last().map_or(0, |r| r.queries)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.i_t).collect()
    }

    /// Query count at which the metric first drops to `eps` or below.
    pub fn queries_to(&self, eps: f64) -> Option<u64> {
        if self.initial_metric <= eps {
            return Some(0);
        }
        self.rows.iter().find(|r| r.metric <= eps).map(|r| r.queries)
    }

    pub fn final_metric(&self) -> f64 {
        self.rows.last().map_or(self.initial_metric, |r| r.metric)
    }

    /// CSV with columns `t, i_t, gamma_t, queries, subopt|grad_norm, k`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let metric = match self.metric {
            Metric::Subopt => "subopt",
            Metric::GradNorm => "grad_norm",
        };
        let io = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "i_t", "gamma_t", "queries", metric, "k"]).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.t.to_string(),
                r.i_t.to_string(),
                format!("{:e}", r.gamma_t),
                r.queries.to_string(),
                format!("{:e}", r.metric),
                r.k.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Invalid(format!("csv: {e}")))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    /// Stop as soon as the metric reaches this level.
    pub target: Option<f64>,
    /// Verify after every query that the iterate lies in the span of `x₀`
    /// and all oracle outputs so far.
    pub span_check: bool,
}

/// Orthonormal basis of the accumulated span.
struct SpanTracker {
    basis: Vec<Vec<f64>>,
}

impl SpanTracker {
    fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut r = v.to_vec();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &self.basis {
                let c: f64 = r.iter().zip(b).map(|(x, y)| x * y).sum();
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        r
    }

    fn add(&mut self, v: &[f64]) {
        let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if scale == 0.0 {
            return;
        }
        let r = self.residual(v);
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 * scale {
            self.basis.push(r.into_iter().map(|x| x / norm).collect());
        }
    }
}

struct Runner<'a> {
    oracle: Oracle<'a>,
    budget: u64,
    opts: RunOptions,
    fstar: f64,
    trace: RunTrace,
    span: Option<SpanTracker>,
    stopped: bool,
}

impl<'a> Runner<'a> {
    fn new(inst: &'a HardInstance, budget: u64, opts: RunOptions) -> Result<Self> {
        let (metric, fstar) = match inst.family {
            Family::Nc => (Metric::GradNorm, 0.0),
            _ => (Metric::Subopt, minimizer(inst)?.1),
        };
        let x0 = vec![0.0; inst.dim()];
        let mut runner = Runner {
            oracle: Oracle::new(inst),
            budget,
            opts,
            fstar,
            trace: RunTrace { metric, initial_metric: 0.0, rows: Vec::new(), final_iterate: x0.clone() },
            span: opts.span_check.then(|| SpanTracker { basis: Vec::new() }),
            stopped: budget == 0,
        };
        runner.trace.initial_metric = runner.metric(&x0)?;
        if let Some(t) = opts.target {
            runner.stopped |= runner.trace.initial_metric <= t;
        }
        Ok(runner)
    }

    fn inst(&self) -> &'a HardInstance {
        self.oracle.instance()
    }

    fn metric(&self, x: &[f64]) -> Result<f64> {
        match self.trace.metric {
            Metric::Subopt => Ok(full_value(self.inst(), x)? - self.fstar),
            Metric::GradNorm => Ok(full_gradient(self.inst(), x)?.iter().map(|g| g * g).sum::<f64>().sqrt()),
        }
    }

    fn at_step(&self, e: Error) -> Error {
        Error::AtStep { step: self.oracle.queries() as usize + 1, source: Box::new(e) }
    }

    fn ifo(&mut self, i: usize, x: &[f64]) -> Result<Option<IfoReply>> {
        if self.stopped {
            return Ok(None);
        }
        let reply = self.oracle.ifo(i, x).map_err(|e| self.at_step(e))?;
        if let Some(span) = &mut self.span {
            span.add(&reply.gradient);
        }
        Ok(Some(reply))
    }

    fn pifo(&mut self, i: usize, x: &[f64], gamma: f64) -> Result<Option<OracleReply>> {
        if self.stopped {
            return Ok(None);
        }
        let reply = self.oracle.pifo(i, x, gamma).map_err(|e| self.at_step(e))?;
        if let Some(span) = &mut self.span {
            span.add(&reply.gradient);
            span.add(&reply.prox_point);
        }
        Ok(Some(reply))
    }

    /// Logs the query just made, with the iterate that follows it.
    fn record(&mut self, i: usize, gamma: f64, x: &[f64]) -> Result<()> {
        let q = self.oracle.queries();
        if let Some(span) = &self.span {
            let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let r = span.residual(x);
            let off = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if off > 1e-10 * (1.0 + scale) {
                return Err(Error::AtStep {
                    step: q as usize,
                    source: Box::new(Error::Numerical(format!("iterate leaves the span by {off:e}"))),
                });
            }
        }
        let metric = self.metric(x)?;
        let k = subspace_index(x, self.inst().orientation, SUBSPACE_TOL);
        self.trace.rows.push(TraceRow { t: q, i_t: i, gamma_t: gamma, queries: q, metric, k });
        self.trace.final_iterate.copy_from_slice(x);
        if q >= self.budget || self.opts.target.is_some_and(|t| metric <= t) {
            self.stopped = true;
        }
        Ok(())
    }
}

/// Runs `algo` from `x₀ = 0` for `budget` queries. Sampled indices come from
/// the scheme's probabilities on the stream keyed by `seed`.
pub fn run(inst: &HardInstance, algo: &AlgorithmSpec, scheme: &SamplingScheme, budget: u64, seed: u64) -> Result<RunTrace> {
    run_with(inst, algo, scheme, budget, seed, RunOptions::default())
}

pub fn run_with(
    inst: &HardInstance,
    algo: &AlgorithmSpec,
    scheme: &SamplingScheme,
    budget: u64,
    seed: u64,
    opts: RunOptions,
) -> Result<RunTrace> {
    if scheme.n() != inst.n {
        return Err(Error::DimensionMismatch { expected: inst.n, got: scheme.n() });
    }
    let keyed = scheme.with_seed(seed);
    let mut stream = IndexStream::new(&keyed);
    let mut r = Runner::new(inst, budget, opts)?;
    let l = inst.s.l;
    let n = inst.n;
    let d = inst.dim();
    let mut x = vec![0.0; d];
    match *algo {
        AlgorithmSpec::ProxPoint { gamma } => {
            let gamma = cap_gamma(inst, gamma.unwrap_or(1.0 / l));
            while !r.stopped {
                let i = stream.next_index();
                let Some(rep) = r.pifo(i, &x, gamma)? else { break };
                x = rep.prox_point;
                r.record(i, gamma, &x)?;
            }
        }
        AlgorithmSpec::Sgd { step } => {
            let step = step.unwrap_or(0.5 / l);
            while !r.stopped {
                let i = stream.next_index();
                let Some(rep) = r.ifo(i, &x)? else { break };
                axpy(&mut x, -step, &rep.gradient);
                r.record(i, step, &x)?;
            }
        }
        AlgorithmSpec::Svrg { step, epoch } => {
            let step = step.unwrap_or(0.25 / l);
            let epoch = epoch.unwrap_or(2 * n);
            'outer: while !r.stopped {
                let snapshot = x.clone();
                let mut mean = vec![0.0; d];
                for i in 1..=n {
                    let Some(rep) = r.ifo(i, &snapshot)? else { break 'outer };
                    axpy(&mut mean, 1.0 / n as f64, &rep.gradient);
                    r.record(i, 0.0, &x)?;
                }
                for _ in 0..epoch {
                    let i = stream.next_index();
                    let Some(cur) = r.ifo(i, &x)? else { break 'outer };
                    r.record(i, 0.0, &x)?;
                    let Some(old) = r.ifo(i, &snapshot)? else { break 'outer };
                    for j in 0..d {
                        x[j] -= step * (cur.gradient[j] - old.gradient[j] + mean[j]);
                    }
                    r.record(i, step, &x)?;
                }
            }
        }
        AlgorithmSpec::Saga { step } => {
            let step = step.unwrap_or(1.0 / (3.0 * l));
            if let Some((mut table, mut mean)) = gradient_table(&mut r, &x)? {
                while !r.stopped {
                    let j = stream.next_index();
                    let Some(rep) = r.ifo(j, &x)? else { break };
                    for c in 0..d {
                        x[c] -= step * (rep.gradient[c] - table[j - 1][c] + mean[c]);
                    }
                    update_table(&mut table, &mut mean, j, rep.gradient);
                    r.record(j, step, &x)?;
                }
            }
        }
        AlgorithmSpec::PointSaga { gamma } => {
            let gamma = cap_gamma(inst, gamma.unwrap_or_else(|| point_saga_gamma(n, l, inst.s.mu)));
            if let Some((mut table, mut mean)) = gradient_table(&mut r, &x)? {
                while !r.stopped {
                    let j = stream.next_index();
                    let z: Vec<f64> = (0..d).map(|c| x[c] + gamma * (table[j - 1][c] - mean[c])).collect();
                    let Some(rep) = r.pifo(j, &z, gamma)? else { break };
                    x = rep.prox_point;
                    let g: Vec<f64> = (0..d).map(|c| (z[c] - x[c]) / gamma).collect();
                    update_table(&mut table, &mut mean, j, g);
                    r.record(j, gamma, &x)?;
                }
            }
        }
    }
    Ok(r.trace)
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

type Table = (Vec<Vec<f64>>, Vec<f64>);

/// Gradients of every component at `x`, in order, plus their mean.
fn gradient_table(r: &mut Runner<'_>, x: &[f64]) -> Result<Option<Table>> {
    let n = r.inst().n;
    let mut table = Vec::with_capacity(n);
    let mut mean = vec![0.0; x.len()];
    for i in 1..=n {
        let Some(rep) = r.ifo(i, x)? else { return Ok(None) };
        axpy(&mut mean, 1.0 / n as f64, &rep.gradient);
        table.push(rep.gradient);
        r.record(i, 0.0, x)?;
    }
    Ok(Some((table, mean)))
}

fn update_table(table: &mut [Vec<f64>], mean: &mut [f64], j: usize, g: Vec<f64>) {
    let inv_n = 1.0 / table.len() as f64;
    for c in 0..mean.len() {
        mean[c] += (g[c] - table[j - 1][c]) * inv_n;
    }
    table[j - 1] = g;
}

/// A favorable span algorithm: each step queries the prox of the sampled
/// component at the best point so far and keeps it if the full objective
/// improves.
pub fn greedy_span_probe(inst: &HardInstance, scheme: &SamplingScheme, budget: u64, seed: u64) -> Result<RunTrace> {
    if scheme.n() != inst.n {
        return Err(Error::DimensionMismatch { expected: inst.n, got: scheme.n() });
    }
    let keyed = scheme.with_seed(seed);
    let mut stream = IndexStream::new(&keyed);
    let mut r = Runner::new(inst, budget, RunOptions::default())?;
    let gamma = cap_gamma(inst, 1.0 / inst.s.l);
    let mut best = vec![0.0; inst.dim()];
    let mut best_value = full_value(inst, &best)?;
    while !r.stopped {
        let i = stream.next_index();
        let Some(rep) = r.pifo(i, &best, gamma)? else { break };
        let v = full_value(inst, &rep.prox_point)?;
        if v < best_value {
            best_value = v;
            best = rep.prox_point;
        }
        r.record(i, gamma, &best)?;
    }
    Ok(r.trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{make_one_d, make_sc};

    #[test]
    fn scheme_validation() {
        assert!(SamplingScheme::new(vec![0.5, 0.5], 1).is_ok());
        assert!(SamplingScheme::new(vec![0.6, 0.4], 1).is_err());
        assert!(SamplingScheme::new(vec![0.0, 1.0], 1).is_err());
        assert!(SamplingScheme::new(vec![0.3, 0.3], 1).is_err());
        assert!(SamplingScheme::new(vec![1.0], 1).is_err());
    }

    #[test]
    fn counter_draws_match_sequential_stream() {
        let s = SamplingScheme::new(vec![0.1, 0.2, 0.3, 0.4], 99).unwrap();
        let mut stream = IndexStream::new(&s);
        for t in 0..100 {
            assert_eq!(stream.next_index(), sample_index(&s, t));
        }
    }

    #[test]
    fn budget_zero_is_the_origin() {
        let inst = make_sc(10.0, 1.0, 4, 1.0, 1e-4).unwrap();
        let s = SamplingScheme::uniform(4, 0);
        let tr = greedy_span_probe(&inst, &s, 0, 3).unwrap();
        assert!(tr.rows.is_empty());
        assert!(tr.final_iterate.iter().all(|&v| v == 0.0));
        assert!((tr.initial_metric - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_is_exact_for_every_algorithm() {
        let inst = make_sc(10.0, 1.0, 4, 1.0, 1e-4).unwrap();
        let s = SamplingScheme::uniform(4, 0);
        for name in ["prox_point", "sgd", "svrg", "saga", "point_saga"] {
            let algo = AlgorithmSpec::by_name(name).unwrap();
            for budget in [1, 3, 17, 40] {
                let tr = run(&inst, &algo, &s, budget, 5).unwrap();
                assert_eq!(tr.queries(), budget, "{name}");
                assert_eq!(tr.rows.len() as u64, budget, "{name}");
            }
        }
    }

    #[test]
    fn one_d_stays_at_zero_until_first_draw() {
        let inst = make_one_d(1.0, 1.0, 8).unwrap();
        let s = SamplingScheme::uniform(8, 0);
        let tr = run(&inst, &AlgorithmSpec::ProxPoint { gamma: None }, &s, 200, 11).unwrap();
        let first = tr.rows.iter().position(|r| r.i_t == 1).unwrap();
        assert!(tr.rows[..first].iter().all(|r| r.k == 0));
        assert_eq!(tr.rows[first].k, 1);
    }
}
