//! Property suites run by `pifo-bounds verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{averaging_dominance_check, certificate_tail_check, geo_sum_tail_mc, two_geo_tail, GeoSumModel};
use crate::error::{Error, Result};
use crate::instances::{
    certificate, make_avg_c, make_avg_sc, make_c, make_nc, make_one_d, make_sc, minimizer, nc_alpha, nc_gap_bound,
    nc_gradient_floor, restricted_gap, restricted_min, restricted_min_distance, restricted_minimizer, Family,
    HardInstance,
};
use crate::oracle::{component_gradient, component_prox, full_gradient, full_value, prox_blocks, BlockKind, ProxBlock};
use crate::probe::{average_smoothness, bregman_bracket, component_curvature, power_iteration};
use crate::solvers::SamplingScheme;
use crate::structure::{
    accumulate_group_gram, partition_rows, row_vector, solve_shifted_group_gram, subspace_index, BandSpec,
    SubspaceOrientation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Structure,
    Spanjump,
    Minimizers,
    Geo,
    Nonconvex,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "structure" => Suite::Structure,
            "spanjump" => Suite::Spanjump,
            "minimizers" => Suite::Minimizers,
            "geo" => Suite::Geo,
            "nonconvex" => Suite::Nonconvex,
            "all" => Suite::All,
            other => return Err(Error::Invalid(format!("unknown suite {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    /// The property being checked, in words.
    pub claim: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

struct Recorder {
    suite: Suite,
    checks: Vec<Check>,
}

impl Recorder {
    fn push(&mut self, name: impl Into<String>, claim: &str, outcome: Result<(bool, String)>) {
        let (passed, detail) = match outcome {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(Check { suite: self.suite, name: name.into(), claim: claim.into(), passed, detail });
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> VerifyReport {
    let mut checks = Vec::new();
    let suites: &[Suite] = match suite {
        Suite::All => &[Suite::Structure, Suite::Spanjump, Suite::Minimizers, Suite::Geo, Suite::Nonconvex],
        _ => std::slice::from_ref(&suite),
    };
    for &s in suites {
        let mut rec = Recorder { suite: s, checks: Vec::new() };
        match s {
            Suite::Structure => structure_suite(&mut rec, seed),
            Suite::Spanjump => spanjump_suite(&mut rec, seed),
            Suite::Minimizers => minimizers_suite(&mut rec, seed),
            Suite::Geo => geo_suite(&mut rec, seed),
            Suite::Nonconvex => nonconvex_suite(&mut rec, seed),
            Suite::All => unreachable!(),
        }
        checks.extend(rec.checks);
    }
    VerifyReport { suite, passed: checks.iter().all(|c| c.passed), checks }
}

/// Instances used by the suites: one per quadratic family plus the
/// one-dimensional and non-convex ones.
pub fn default_instances() -> Vec<HardInstance> {
    vec![
        make_sc(50.0, 1.0, 5, 1.0, 1e-6).expect("default SC parameters"),
        make_c(1.0, 1.0, 4, 1e-5).expect("default C parameters"),
        make_avg_sc(40.0, 1.0, 6, 1.0, 1e-6).expect("default AVG_SC parameters"),
        make_avg_c(1.0, 1.0, 6, 1e-5).expect("default AVG_C parameters"),
        make_one_d(1.0, 1.0, 8).expect("default ONE_D parameters"),
        default_nc(),
    ]
}

/// A non-convex instance with chain length about 20.
pub fn default_nc() -> HardInstance {
    let (l, sigma, n, delta) = (1.0, 1.0, 10, 1.0);
    let alpha = nc_alpha(l, sigma, n);
    let eps = (delta * l * alpha.sqrt() / (40824.0 * n as f64 * 20.0)).sqrt();
    make_nc(l, sigma, n, delta, eps).expect("default NC parameters")
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// A random point of the `k`-dimensional subspace of the instance's
/// orientation, with entries of size about `scale`.
pub fn random_point_in_subspace(inst: &HardInstance, k: usize, scale: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = inst.dim();
    let mut x = vec![0.0; d];
    let range = match inst.orientation {
        SubspaceOrientation::Tail => d - k..d,
        SubspaceOrientation::Head => 0..k,
    };
    for j in range {
        x[j] = scale * rng.gen_range(-1.0..1.0);
    }
    x
}

/// Natural coordinate scale for random points.
pub fn point_scale(inst: &HardInstance) -> f64 {
    match inst.family {
        Family::Nc => 2.0 * inst.s.nc_beta,
        _ => 1.0,
    }
}

/// A random prox step inside the instance's validity range.
pub fn random_gamma(inst: &HardInstance, rng: &mut ChaCha8Rng) -> f64 {
    let limit = inst.gamma_limit();
    if limit.is_finite() {
        limit * 10f64.powf(rng.gen_range(-3.0..-0.01))
    } else {
        10f64.powf(rng.gen_range(-3.0..3.0)) / inst.s.l
    }
}

/// Subspace the outputs at `x ∈ F_k` (or `G_k`) may reach when component
/// `i` is queried.
pub fn predicted_index(inst: &HardInstance, k: usize, i: usize) -> usize {
    let grow = i == k % inst.n + 1;
    (k + usize::from(grow)).min(inst.dim())
}

/// Largest coordinate of `v` outside the `k`-dimensional subspace, relative
/// to `1 + max|v|`.
pub fn outside_violation(inst: &HardInstance, v: &[f64], k: usize) -> f64 {
    let d = inst.dim();
    let outside = match inst.orientation {
        SubspaceOrientation::Tail => &v[..d - k],
        SubspaceOrientation::Head => &v[k..],
    };
    max_abs(outside) / (1.0 + max_abs(v))
}

/// Walks the chain with random components and steps, checking after every
/// call that the gradient and prox stay inside the predicted subspace.
/// Returns the worst relative violation and the deepest index reached.
pub fn span_jump_walk(inst: &HardInstance, steps: usize, rng: &mut ChaCha8Rng) -> Result<(f64, usize)> {
    let scale = point_scale(inst);
    let mut k = 0;
    let mut worst = 0.0f64;
    for _ in 0..steps {
        let x = random_point_in_subspace(inst, k, scale, rng);
        let i = rng.gen_range(1..=inst.n);
        let gamma = random_gamma(inst, rng);
        let g = component_gradient(inst, i, &x)?;
        let p = component_prox(inst, i, &x, gamma)?;
        let allowed = predicted_index(inst, k, i);
        worst = worst.max(outside_violation(inst, &g, allowed)).max(outside_violation(inst, &p, allowed));
        let reached = subspace_index(&g, inst.orientation, 0.0).max(subspace_index(&p, inst.orientation, 0.0));
        k = k.max(reached.min(allowed));
    }
    Ok((worst, k))
}

/// `‖∇f_i(u) + (u − x)/γ‖ / (1 + ‖x‖/γ)` at `u = prox_{f_i}^γ(x)`.
pub fn prox_stationarity(inst: &HardInstance, i: usize, x: &[f64], gamma: f64) -> Result<f64> {
    let u = component_prox(inst, i, x, gamma)?;
    let g = component_gradient(inst, i, &u)?;
    let r: Vec<f64> = g.iter().zip(u.iter().zip(x)).map(|(gj, (uj, xj))| gj + (uj - xj) / gamma).collect();
    Ok(norm(&r) / (1.0 + norm(x) / gamma))
}

/// Number of sign changes of a block's residual along `[lo, hi]` (the
/// second coordinate of a pair block is eliminated exactly).
pub fn block_root_count(block: &ProxBlock, lo: f64, hi: f64, points: usize) -> usize {
    let residual = |u0: f64| -> f64 {
        match block.kind {
            BlockKind::Single => block.residual([u0, 0.0])[0],
            BlockKind::Pair => {
                // solve the second equation for this u0 by bisection on its monotone residual
                let f = |u1: f64| block.residual([u0, u1])[1];
                let (mut a, mut b) = (-1e6, 1e6);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if f(mid) < 0.0 {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                block.residual([u0, 0.5 * (a + b)])[0]
            }
        }
    };
    let mut count = 0;
    let mut prev = residual(lo);
    for s in 1..=points {
        let u = lo + (hi - lo) * s as f64 / points as f64;
        let cur = residual(u);
        if (prev < 0.0) != (cur < 0.0) || cur == 0.0 {
            count += 1;
        }
        prev = cur;
    }
    count
}

fn structure_suite(rec: &mut Recorder, seed: u64) {
    rec.push("gram_matches_chain", "B^T B equals the tridiagonal chain with corner w^2+1 and end 1", (|| {
        let mut worst = 0.0f64;
        for m in 2..=64 {
            for &omega in &[0.0, 0.3, 1.0] {
                let spec = BandSpec::new(m, omega, 2)?;
                let rows: Vec<Vec<f64>> = (1..=m).map(|l| row_vector(&spec, l)).collect::<Result<_>>()?;
                for a in 0..m {
                    for b in 0..m {
                        let dense: f64 = rows.iter().map(|r| r[a] * r[b]).sum();
                        let chain = if a == b {
                            if a == 0 { omega * omega + 1.0 } else if a == m - 1 { 1.0 } else { 2.0 }
                        } else if a.abs_diff(b) == 1 {
                            -1.0
                        } else {
                            0.0
                        };
                        worst = worst.max((dense - chain).abs());
                    }
                }
            }
        }
        Ok((worst == 0.0, format!("max entry difference {worst:e}")))
    })());

    rec.push("partition_property", "groups are disjoint, cover all rows, follow l = i-1 mod n, and are n apart", (|| {
        for m in 2..=256 {
            for n in 2..=m {
                let spec = BandSpec::new(m, 1.0, n)?;
                let p = partition_rows(&spec);
                let mut seen = vec![false; m + 1];
                for i in 1..=n {
                    let g = p.group(i)?;
                    for w in g.windows(2) {
                        if w[1] - w[0] < n {
                            return Ok((false, format!("m={m} n={n}: rows {w:?} closer than n")));
                        }
                    }
                    for &l in g {
                        if seen[l] || l % n != i - 1 {
                            return Ok((false, format!("m={m} n={n}: row {l} misplaced")));
                        }
                        seen[l] = true;
                    }
                }
                if !seen[1..].iter().all(|&s| s) {
                    return Ok((false, format!("m={m} n={n}: rows missing")));
                }
            }
        }
        Ok((true, "2 <= n <= m <= 256".into()))
    })());

    rec.push("shifted_solve_inverts", "(I + c2 B_i^T B_i) applied to the structured solve recovers y", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for &(m, n) in &[(8, 3), (17, 2), (64, 5)] {
            let spec = BandSpec::new(m, 0.7, n)?;
            let p = partition_rows(&spec);
            for _ in 0..100 {
                let i = rng.gen_range(1..=n);
                let c2 = 10f64.powf(rng.gen_range(-3.0..3.0));
                let y: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let u = solve_shifted_group_gram(&spec, &p, i, c2, &y)?;
                let mut back = u.clone();
                accumulate_group_gram(&spec, &p, i, &u, c2, &mut back)?;
                let err: f64 = back.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                worst = worst.max(err / norm(&y));
            }
        }
        Ok((worst <= 1e-10, format!("max relative error {worst:e}")))
    })());

    rec.push("group_gram_norm", "the spectral norm of each B_i^T B_i is at most 2", (|| {
        let mut worst = 0.0f64;
        for m in [4usize, 16, 64] {
            for n in [2usize, 3, 7] {
                let spec = BandSpec::new(m, 1.0, n)?;
                let p = partition_rows(&spec);
                for i in 1..=n {
                    let top = power_iteration(
                        |v| {
                            let mut out = vec![0.0; m];
                            accumulate_group_gram(&spec, &p, i, v, 1.0, &mut out).expect("valid group");
                            out
                        },
                        m,
                        300,
                        seed + i as u64,
                    );
                    worst = worst.max(top);
                }
            }
        }
        Ok((worst <= 2.0 + 1e-12, format!("largest eigenvalue {worst}")))
    })());
}

fn spanjump_suite(rec: &mut Recorder, seed: u64) {
    for inst in default_instances().into_iter().filter(|i| i.family != Family::OneD) {
        let name = format!("span_jump_{}", inst.family);
        rec.push(name, "oracle outputs at x in F_k leave F_k only through component (k mod n)+1, by one step", (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = 0.0f64;
            let mut deepest = 0;
            for _ in 0..200 {
                let (w, k) = span_jump_walk(&inst, 2 * inst.dim() + 4, &mut rng)?;
                worst = worst.max(w);
                deepest = deepest.max(k);
            }
            Ok((worst <= 1e-12, format!("worst violation {worst:e}; deepest subspace {deepest} of {}", inst.dim())))
        })());
    }
}

fn minimizers_suite(rec: &mut Recorder, seed: u64) {
    let _ = seed;
    for inst in default_instances().into_iter().filter(|i| i.family != Family::Nc) {
        let fam = inst.family;
        rec.push(format!("minimizer_{fam}"), "the closed-form minimizer is stationary and attains the stated value", (|| {
            let (x, fstar) = minimizer(&inst)?;
            let g = full_gradient(&inst, &x)?;
            let scale = 1.0 + max_abs(&full_gradient(&inst, &vec![0.0; inst.dim()])?);
            let f = full_value(&inst, &x)?;
            let ok = norm(&g) <= 1e-9 * scale && (f - fstar).abs() <= 1e-9 * fstar.abs().max(1e-300);
            Ok((ok, format!("|grad| = {:e}, f = {f}, f* = {fstar}", norm(&g))))
        })());
        if fam == Family::OneD {
            continue;
        }
        rec.push(format!("restricted_minima_{fam}"), "restricted minimizers are stationary on F_k and match the gap formula", (|| {
            let mut worst = 0.0f64;
            let (_, fstar) = minimizer(&inst)?;
            let mut prev = f64::INFINITY;
            for k in 0..=inst.m {
                let xk = restricted_minimizer(&inst, k)?;
                let g = full_gradient(&inst, &xk)?;
                let inside = &g[inst.m - k..];
                worst = worst.max(max_abs(inside) / (1.0 + max_abs(&g)));
                let value = full_value(&inst, &xk)?;
                let expect = restricted_min(&inst, k)?;
                worst = worst.max((value - expect).abs() / fstar.abs());
                let gap = restricted_gap(&inst, k)?;
                if gap > prev {
                    return Ok((false, format!("gap increases at k = {k}")));
                }
                prev = gap;
            }
            Ok((worst <= 1e-9, format!("worst relative error {worst:e}")))
        })());
        if fam.is_strongly_convex() {
            rec.push(format!("restricted_distance_{fam}"), "the restricted distance formula equals the tail mass of x*", (|| {
                let (x, _) = minimizer(&inst)?;
                let mut worst = 0.0f64;
                for k in 0..=inst.m {
                    let direct: f64 = x[..inst.m - k].iter().map(|v| v * v).sum();
                    let formula = restricted_min_distance(&inst, k)?;
                    worst = worst.max((direct - formula).abs() / norm(&x).powi(2));
                }
                Ok((worst <= 1e-12, format!("worst relative error {worst:e}")))
            })());
        }
        rec.push(format!("certificate_{fam}"), "the certified depth has gap at least 9 eps", (|| {
            let c = certificate(&inst, inst.s.eps)?;
            Ok((c.gap_at_depth >= 9.0 * inst.s.eps && c.depth >= 1, format!("M = {}, N = {}, gap = {:e}", c.depth, c.budget, c.gap_at_depth)))
        })());
        rec.push(format!("constants_{fam}"), "components are L-smooth and mu-strongly convex; the family is Lavg-average smooth", (|| {
            let mut hi = 0.0f64;
            let mut lo = f64::INFINITY;
            for i in 1..=inst.n {
                let (a, b) = component_curvature(&inst, i, 400, 3)?;
                hi = hi.max(a);
                lo = lo.min(b);
            }
            let mut ok = hi <= inst.s.l + 1e-8 && lo >= inst.s.mu - 1e-8;
            let mut detail = format!("max curvature {hi} (L = {}), min {lo} (mu = {})", inst.s.l, inst.s.mu);
            if matches!(fam, Family::AvgSc | Family::AvgC) {
                let avg = average_smoothness(&inst, 400, 5)?;
                ok &= avg <= inst.s.lavg * (1.0 + 1e-12);
                detail += &format!("; average smoothness {avg} (Lavg = {})", inst.s.lavg);
            }
            Ok((ok, detail))
        })());
    }
}

fn geo_suite(rec: &mut Recorder, seed: u64) {
    rec.push("two_geo_exact", "closed-form two-geometric tails equal the exact convolution", (|| {
        let mut worst = 0.0f64;
        for a in 1..=19 {
            for b in 1..=19 {
                let (p1, p2) = (a as f64 * 0.05, b as f64 * 0.05);
                let model = GeoSumModel::new(vec![p1, p2])?;
                for j in 1..=30u64 {
                    worst = worst.max((two_geo_tail(p1, p2, j)? - model.tail_exact(j as f64)).abs());
                }
            }
        }
        Ok((worst <= 1e-10, format!("max difference {worst:e}")))
    })());
    rec.push("averaging_dominance", "averaging two success probabilities never raises the tail", (|| {
        for a in 1..=19 {
            for b in a..=19 {
                for j in 1..=30u64 {
                    if !averaging_dominance_check(a as f64 * 0.05, b as f64 * 0.05, j)? {
                        return Ok((false, format!("violated at p = ({}, {}), j = {j}", a as f64 * 0.05, b as f64 * 0.05)));
                    }
                }
            }
        }
        Ok((true, "sweep of p in 0.05..0.95, j <= 30".into()))
    })());
    for &(k, n) in &[(8usize, 4usize), (16, 8), (32, 4)] {
        rec.push(format!("geo_tail_K{k}_n{n}"), "P(sum > K^2/(4 sum q)) >= 1 - 16/(9K)", (|| {
            let model = GeoSumModel::new(vec![1.0 / n as f64; k])?;
            let report = geo_sum_tail_mc(&model, model.quarter_threshold(), 20_000, seed)?;
            let bound = 1.0 - 16.0 / (9.0 * k as f64);
            let ok = report.empirical_prob >= bound - 3.0 * report.sigma_hat;
            Ok((ok, format!("empirical {:.4} +- {:.4}, bound {bound:.4}", report.empirical_prob, report.sigma_hat)))
        })());
    }
    for inst in [make_sc(50.0, 1.0, 5, 1.0, 1e-6), make_one_d(1.0, 1.0, 8)] {
        let Ok(inst) = inst else { continue };
        rec.push(format!("certificate_tail_{}", inst.family), "the certified stopping time exceeds its budget with the stated probability", (|| {
            let scheme = SamplingScheme::uniform(inst.n, 0);
            let r = certificate_tail_check(&inst, &scheme, 10_000, seed)?;
            Ok((r.holds_within(3.0), format!("empirical {:.4} +- {:.4}, bound {:.4}", r.empirical_prob, r.sigma_hat, r.bound)))
        })());
    }
}

fn nonconvex_suite(rec: &mut Recorder, seed: u64) {
    let inst = default_nc();
    let s = inst.s;
    rec.push("nc_constants", "the scalings give (-sigma, L)-smooth components and gap bound at most Delta", (|| {
        let b2 = s.nc_beta * s.nc_beta;
        let l1 = 45.0 * (3f64.sqrt() - 1.0) * s.nc_alpha * s.nc_lambda / b2;
        let l2 = (2.0 * inst.n as f64 + 180.0 * s.nc_alpha) * s.nc_lambda / b2;
        let gap = nc_gap_bound(&inst);
        let ok = l1 <= s.sigma * (1.0 + 1e-12) && l2 <= s.l * (1.0 + 1e-12) && gap <= s.delta * (1.0 + 1e-12);
        Ok((ok, format!("l1 = {l1}, l2 = {l2}, gap bound = {gap}")))
    })());
    rec.push("nc_bregman_bracket", "each component's Bregman gap lies in [-sigma, L]", (|| {
        let (lo, hi) = bregman_bracket(&inst, 1000, seed)?;
        Ok((lo >= -s.sigma - 1e-8 && hi <= s.l + 1e-8, format!("range [{lo}, {hi}]")))
    })());
    rec.push("nc_gradient_floor", "points with x_m = x_{m+1} = 0 have gradient norm at least the floor", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let floor = nc_gradient_floor(&inst);
        let mut least = f64::INFINITY;
        for t in 0..100 {
            let width = if t % 2 == 0 { 2.0 } else { 0.2 };
            let mut x = random_point_in_subspace(&inst, inst.m - 1, width * s.nc_beta, &mut rng);
            // half the draws sit near the plateau u_j ≈ 1
            if t % 4 == 1 {
                x.iter_mut().take(inst.m - 1).for_each(|v| *v += s.nc_beta);
            }
            least = least.min(norm(&full_gradient(&inst, &x)?));
        }
        Ok((least >= floor, format!("smallest gradient norm {least:e}, floor {floor:e}")))
    })());
    rec.push("nc_descent_gap", "descent from the origin decreases F by at most the gap bound", (|| {
        let (drop, grad) = nc_descent(&inst, 20_000)?;
        let bound = nc_gap_bound(&inst);
        Ok((drop <= bound, format!("F(0) - F(x) = {drop:e} after descent to |grad| = {grad:e}; bound {bound:e}")))
    })());
    rec.push("nc_prox_stationarity", "non-convex prox outputs satisfy the stationarity residual", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let x: Vec<f64> = (0..inst.dim()).map(|_| 2.0 * s.nc_beta * rng.gen_range(-1.0..1.0)).collect();
            let i = rng.gen_range(1..=inst.n);
            worst = worst.max(prox_stationarity(&inst, i, &x, random_gamma(&inst, &mut rng))?);
        }
        Ok((worst <= 1e-10, format!("worst residual {worst:e}")))
    })());
    rec.push("nc_block_uniqueness", "every prox block has a single root on a fine grid", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10 {
            let x: Vec<f64> = (0..inst.dim()).map(|_| 2.0 * s.nc_beta * rng.gen_range(-1.0..1.0)).collect();
            let i = rng.gen_range(1..=inst.n);
            let gamma = random_gamma(&inst, &mut rng);
            for block in prox_blocks(&inst, i, &x, gamma)? {
                let root = block.solve([x[block.coords[0]] / s.nc_beta, x[block.coords[1]] / s.nc_beta])?[0];
                let count = block_root_count(&block, root - 10.0, root + 10.0 + 1e-7, 10_000);
                if count != 1 {
                    return Ok((false, format!("block {:?} shows {count} sign changes", block.coords)));
                }
            }
        }
        Ok((true, "10 random prox systems".into()))
    })());
}

/// Gradient descent on the full non-convex objective with step `1/L`.
/// Returns `F(0) − F(x)` and the final gradient norm.
pub fn nc_descent(inst: &HardInstance, iters: usize) -> Result<(f64, f64)> {
    let mut x = vec![0.0; inst.dim()];
    let f0 = full_value(inst, &x)?;
    let step = 1.0 / inst.s.l;
    let mut gnorm = f64::INFINITY;
    for _ in 0..iters {
        let g = full_gradient(inst, &x)?;
        gnorm = norm(&g);
        if gnorm <= 1e-12 {
            break;
        }
        x.iter_mut().zip(&g).for_each(|(xj, gj)| *xj -= step * gj);
    }
    Ok((f0 - full_value(inst, &x)?, gnorm))
}
