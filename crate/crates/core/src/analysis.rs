//! Stopping times, sums of geometric variables, tail checks and complexity
//! fits.
//!
//! All tails are strict: `P(S > threshold)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{certificate, Family, HardInstance};
use crate::solvers::{RunTrace, SamplingScheme};

/// Number of independent Monte-Carlo partitions. Fixed so results do not
/// depend on the thread count.
const PARTITIONS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingTime {
    At(u64),
    /// Not reached within the observed horizon.
    Censored,
}

impl StoppingTime {
    pub fn value(self) -> Option<u64> {
        match self {
            StoppingTime::At(t) => Some(t),
            StoppingTime::Censored => None,
        }
    }
}

/// `T_1..T_K` for an index sequence, where `T_k` is the first `t > T_{k−1}`
/// (1-based) with `i_t = ((k − 1) mod n) + 1`.
pub fn stopping_times_of(indices: &[usize], n: usize, upto: usize) -> Vec<StoppingTime> {
    let mut out = Vec::with_capacity(upto);
    let mut iter = indices.iter().enumerate();
    for k in 1..=upto {
        let target = (k - 1) % n + 1;
        match iter.by_ref().find(|&(_, &i)| i == target) {
            Some((pos, _)) => out.push(StoppingTime::At(pos as u64 + 1)),
            None => {
                out.resize(upto, StoppingTime::Censored);
                break;
            }
        }
    }
    out
}

pub fn stopping_times(trace: &RunTrace, n: usize, upto: usize) -> Vec<StoppingTime> {
    stopping_times_of(&trace.indices(), n, upto)
}

fn check_prob(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!("probability {p} outside (0, 1]")))
    }
}

/// Exact `P(X₁ + X₂ > j)` for independent `X_k ~ Geometric(p_k)` on
/// `{1, 2, …}`.
pub fn two_geo_tail(p1: f64, p2: f64, j: u64) -> Result<f64> {
    check_prob(p1)?;
    check_prob(p2)?;
    if j == 0 {
        return Err(Error::Invalid("j must be at least 1".into()));
    }
    let (p1, p2) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
    let a = 1.0 - p1;
    let b = 1.0 - p2;
    let jf = j as f64;
    if a == 0.0 {
        return Ok(if j < 2 { 1.0 } else { 0.0 });
    }
    if p2 - p1 <= 1e-12 * p2 {
        return Ok(jf * p1 * a.powf(jf - 1.0) + a.powf(jf));
    }
    if b == 0.0 {
        return Ok(a.powf(jf - 1.0));
    }
    // (p₂aʲ − p₁bʲ)/(p₂ − p₁) = aʲ + p₁ a^{j−1} (1 − (b/a)ʲ)/(1 − b/a)
    let d = (a - b) / a;
    let ratio = -(jf * (-d).ln_1p()).exp_m1() / d;
    Ok(a.powf(jf) + p1 * a.powf(jf - 1.0) * ratio)
}

/// Whether `P(X₁ + X₂ > j) ≥ P(Y₁ + Y₂ > j)` with `Y_k ~ Geometric((p₁+p₂)/2)`,
/// up to `1e-12`.
pub fn averaging_dominance_check(p1: f64, p2: f64, j: u64) -> Result<bool> {
    let avg = 0.5 * (p1 + p2);
    Ok(two_geo_tail(p1, p2, j)? >= two_geo_tail(avg, avg, j)? - 1e-12)
}

/// Independent geometric variables with success probabilities `q_1..q_K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoSumModel {
    probs: Vec<f64>,
}

impl GeoSumModel {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Invalid("need at least one probability".into()));
        }
        for &p in &probs {
            check_prob(p)?;
        }
        Ok(GeoSumModel { probs })
    }

    /// `q_l = p_{((l−1) mod n)+1}` for `l = 1..K`: the increments of
    /// `T_1..T_K` under a sampling scheme.
    pub fn from_scheme(scheme: &SamplingScheme, k: usize) -> Result<Self> {
        let p = scheme.probs();
        Self::new((0..k).map(|l| p[l % p.len()]).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().map(|q| 1.0 / q).sum()
    }

    pub fn variance(&self) -> f64 {
        self.probs.iter().map(|q| (1.0 - q) / (q * q)).sum()
    }

    /// `K²/(4 Σ q_l)`.
    pub fn quarter_threshold(&self) -> f64 {
        let k = self.len() as f64;
        k * k / (4.0 * self.probs.iter().sum::<f64>())
    }

    /// Exact `P(Σ Y_l > threshold)` by dynamic programming over the sum.
    pub fn tail_exact(&self, threshold: f64) -> f64 {
        let k = self.len();
        if threshold < k as f64 {
            return 1.0;
        }
        let s_max = threshold.floor() as usize;
        // c[s] = P(partial sum = s)
        let mut c = vec![0.0; s_max + 1];
        c[0] = 1.0;
        for &q in &self.probs {
            let mut next = vec![0.0; s_max + 1];
            for s in 1..=s_max {
                next[s] = (1.0 - q) * next[s - 1] + q * c[s - 1];
            }
            c = next;
        }
        let below: f64 = c.iter().sum();
        (1.0 - below).max(0.0)
    }

    /// A lower bound on `P(Σ Y_l > threshold)`: Chebyshev below the mean,
    /// and `1 − 16/(9K)` up to `K²/(4 Σ q_l)`.
    pub fn tail_lower_bound(&self, threshold: f64) -> f64 {
        let mean = self.mean();
        let chebyshev = if threshold < mean { 1.0 - self.variance() / (mean - threshold).powi(2) } else { 0.0 };
        let quarter = if threshold <= self.quarter_threshold() {
            1.0 - 16.0 / (9.0 * self.len() as f64)
        } else {
            0.0
        };
        chebyshev.max(quarter).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub threshold: f64,
    pub empirical_prob: f64,
    pub trials: u64,
    /// Analytic lower bound the empirical probability is compared with.
    pub bound: f64,
    /// Binomial standard error of `empirical_prob`.
    pub sigma_hat: f64,
}

impl TailReport {
    fn from_hits(threshold: f64, hits: u64, trials: u64, bound: f64) -> Self {
        let p = hits as f64 / trials as f64;
        TailReport {
            threshold,
            empirical_prob: p,
            trials,
            bound,
            sigma_hat: (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }

    /// `empirical_prob ≥ bound − margin·σ̂`.
    pub fn holds_within(&self, margin: f64) -> bool {
        self.empirical_prob >= self.bound - margin * self.sigma_hat
    }
}

/// Splits `trials` over fixed partitions, each with its own ChaCha stream,
/// and counts the trials for which `event` fires.
fn monte_carlo(trials: u64, seed: u64, event: impl Fn(&mut ChaCha8Rng) -> bool + Sync) -> u64 {
    (0..PARTITIONS)
        .into_par_iter()
        .map(|p| {
            let share = trials / PARTITIONS + u64::from(p < trials % PARTITIONS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(p);
            (0..share).filter(|_| event(&mut rng)).count() as u64
        })
        .sum()
}

/// Monte-Carlo estimate of `P(Σ Y_l > threshold)`.
pub fn geo_sum_tail_mc(model: &GeoSumModel, threshold: f64, trials: u64, seed: u64) -> Result<TailReport> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be positive".into()));
    }
    let dists: Vec<Geometric> = model
        .probs
        .iter()
        .map(|&q| Geometric::new(q).map_err(|e| Error::Invalid(e.to_string())))
        .collect::<Result<_>>()?;
    let hits = monte_carlo(trials, seed, |rng| {
        // rand_distr counts failures; Y_l here counts trials
        let sum: f64 = dists.iter().map(|g| (g.sample(rng) + 1) as f64).sum();
        sum > threshold
    });
    Ok(TailReport::from_hits(threshold, hits, trials, model.tail_lower_bound(threshold)))
}

/// Simulates index draws only and measures `P(T_{M+1} > N)` for the
/// instance's certificate, or `P(T_1 > 1/(2p₁))` for the one-dimensional
/// family.
pub fn certificate_tail_check(inst: &HardInstance, scheme: &SamplingScheme, trials: u64, seed: u64) -> Result<TailReport> {
    if scheme.n() != inst.n {
        return Err(Error::DimensionMismatch { expected: inst.n, got: scheme.n() });
    }
    if trials == 0 {
        return Err(Error::Invalid("trials must be positive".into()));
    }
    let probs = scheme.probs();
    let n = inst.n;
    let (stages, horizon, threshold, bound) = if inst.family == Family::OneD {
        let thr = 1.0 / (2.0 * probs[0]);
        (1usize, thr.floor() as u64, thr, 0.5)
    } else {
        let cert = certificate(inst, inst.s.eps)?;
        let stages = cert.depth + 1;
        let bound = (1.0f64 / 9.0).max(1.0 - 16.0 / (9.0 * stages as f64));
        (stages, cert.budget as u64, cert.budget as f64, bound)
    };
    let mut cdf: Vec<f64> = probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    *cdf.last_mut().unwrap() = 1.0;
    let hits = monte_carlo(trials, seed, |rng| {
        let mut k = 0;
        for _ in 0..horizon {
            let u: f64 = rng.gen();
            let i = cdf.partition_point(|&c| c <= u).min(n - 1) + 1;
            if i == k % n + 1 {
                k += 1;
                if k == stages {
                    return false;
                }
            }
        }
        true
    });
    Ok(TailReport::from_hits(threshold, hits, trials, bound))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRecord {
    pub n: usize,
    pub kappa: f64,
    pub delta: f64,
    pub eps: f64,
    pub queries: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    /// Coefficient of `n·log(Δ/ε)`.
    pub a: f64,
    /// Coefficient of `√(nκ)·log(Δ/ε)`.
    pub b: f64,
    pub r2: f64,
    pub records: usize,
}

impl FitSummary {
    pub fn predict(&self, n: usize, kappa: f64, delta: f64, eps: f64) -> f64 {
        let (u, v) = features(n, kappa, delta, eps);
        self.a * u + self.b * v
    }
}

fn features(n: usize, kappa: f64, delta: f64, eps: f64) -> (f64, f64) {
    let log = (delta / eps).ln();
    let nf = n as f64;
    (nf * log, (nf * kappa).sqrt() * log)
}

fn distinct(values: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// Least squares `queries ≈ a·n·log(Δ/ε) + b·√(nκ)·log(Δ/ε)` (no intercept),
/// with the centered `R²`.
pub fn fit_complexity(records: &[ComplexityRecord]) -> Result<FitSummary> {
    if records.len() < 6 {
        return Err(Error::Degenerate(format!("{} records; need at least 6", records.len())));
    }
    if distinct(records.iter().map(|r| r.n as f64)) < 2 || distinct(records.iter().map(|r| r.kappa)) < 2 {
        return Err(Error::Degenerate("need at least 2 distinct values of n and of kappa".into()));
    }
    let (mut suu, mut suv, mut svv, mut suy, mut svy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in records {
        let (u, v) = features(r.n, r.kappa, r.delta, r.eps);
        suu += u * u;
        suv += u * v;
        svv += v * v;
        suy += u * r.queries;
        svy += v * r.queries;
    }
    let det = suu * svv - suv * suv;
    if !(det.abs() > 1e-12 * suu * svv) {
        return Err(Error::Degenerate("design matrix is singular".into()));
    }
    let a = (svv * suy - suv * svy) / det;
    let b = (suu * svy - suv * suy) / det;
    let mean = records.iter().map(|r| r.queries).sum::<f64>() / records.len() as f64;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for r in records {
        let (u, v) = features(r.n, r.kappa, r.delta, r.eps);
        ss_res += (r.queries - a * u - b * v).powi(2);
        ss_tot += (r.queries - mean).powi(2);
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else if ss_res == 0.0 { 1.0 } else { 0.0 };
    Ok(FitSummary { a, b, r2, records: records.len() })
}
