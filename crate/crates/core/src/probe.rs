//! Numerical probes of the smoothness constants an instance declares.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instances::{Family, HardInstance};
use crate::oracle::{component_gradient, component_value};
use crate::structure::accumulate_group_gram;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(&mut v);
    v
}

/// Largest eigenvalue of a symmetric positive semidefinite operator by power
/// iteration, reported as the final Rayleigh quotient.
pub fn power_iteration(apply: impl Fn(&[f64]) -> Vec<f64>, d: usize, iters: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = random_unit(&mut rng, d);
    let mut rayleigh = 0.0;
    for _ in 0..iters {
        let w = apply(&v);
        rayleigh = dot(&v, &w);
        v = w;
        if normalize(&mut v) == 0.0 {
            return 0.0;
        }
    }
    rayleigh
}

fn quadratic_hessian(inst: &HardInstance, i: usize, x: &[f64]) -> Vec<f64> {
    let s = &inst.s;
    let mut out: Vec<f64> = x.iter().map(|v| 2.0 * s.lambda2 * v).collect();
    accumulate_group_gram(inst.band(), inst.partition(), i, x, 2.0 * s.lambda1, &mut out)
        .expect("group index checked by caller");
    out
}

fn require_quadratic(inst: &HardInstance) -> Result<()> {
    if inst.family.is_quadratic() || inst.family == Family::OneD {
        Ok(())
    } else {
        Err(Error::Unsupported {
            family: inst.family.to_string(),
            reason: "Hessian probes need a quadratic family; use the Bregman bracket probe",
        })
    }
}

/// Extreme Hessian eigenvalues `(max, min)` of component `i`.
pub fn component_curvature(inst: &HardInstance, i: usize, iters: usize, seed: u64) -> Result<(f64, f64)> {
    require_quadratic(inst)?;
    inst.check_component(i)?;
    if inst.family == Family::OneD {
        return Ok((inst.s.l, inst.s.l));
    }
    let d = inst.dim();
    let top = power_iteration(|v| quadratic_hessian(inst, i, v), d, iters, seed);
    // the spectrum of (top·I − H) is top − λ(H); its largest value gives λ_min
    let shifted = power_iteration(
        |v| {
            let h = quadratic_hessian(inst, i, v);
            v.iter().zip(&h).map(|(a, b)| top * a - b).collect()
        },
        d,
        iters,
        seed ^ 0x9e37_79b9_7f4a_7c15,
    );
    Ok((top, top - shifted))
}

/// `sqrt(λ_max((1/n) Σ H_i²))`, the tightest average-smoothness constant.
pub fn average_smoothness(inst: &HardInstance, iters: usize, seed: u64) -> Result<f64> {
    require_quadratic(inst)?;
    if inst.family == Family::OneD {
        return Ok(inst.s.l);
    }
    let nf = inst.n as f64;
    let top = power_iteration(
        |v| {
            let mut acc = vec![0.0; v.len()];
            for i in 1..=inst.n {
                let h2 = quadratic_hessian(inst, i, &quadratic_hessian(inst, i, v));
                acc.iter_mut().zip(&h2).for_each(|(a, b)| *a += b / nf);
            }
            acc
        },
        inst.dim(),
        iters,
        seed,
    );
    Ok(top.max(0.0).sqrt())
}

fn random_point(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
}

fn probe_scale(inst: &HardInstance) -> f64 {
    match inst.family {
        Family::Nc => 2.0 * inst.s.nc_beta,
        _ => 1.0,
    }
}

/// Largest `sqrt((1/n) Σ‖∇f_i(x) − ∇f_i(y)‖² / ‖x − y‖²)` over random pairs.
pub fn average_smoothness_pairs(inst: &HardInstance, pairs: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = inst.dim();
    let scale = probe_scale(inst);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let x = random_point(&mut rng, d, scale);
        let y = random_point(&mut rng, d, scale);
        let dist2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum();
        let mut acc = 0.0;
        for i in 1..=inst.n {
            let gx = component_gradient(inst, i, &x)?;
            let gy = component_gradient(inst, i, &y)?;
            acc += gx.iter().zip(&gy).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        }
        worst = worst.max((acc / inst.n as f64 / dist2).sqrt());
    }
    Ok(worst)
}

/// Range `(min, max)` of the normalized Bregman gap
/// `2(f_i(y) − f_i(x) − ⟨∇f_i(x), y − x⟩)/‖y − x‖²` over random pairs and
/// all components. A `(l, L)`-smooth component stays within `[l, L]`
/// (with `l` negative for the non-convex family).
pub fn bregman_bracket(inst: &HardInstance, pairs: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = inst.dim();
    let scale = probe_scale(inst);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for t in 0..pairs {
        let i = 1 + t % inst.n;
        let x = random_point(&mut rng, d, scale);
        // short steps too, where the curvature of the penalty is resolved
        let radius = scale * 10f64.powf(rng.gen_range(-3.0..0.0));
        let y: Vec<f64> = x.iter().map(|v| v + radius * rng.gen_range(-1.0..1.0)).collect();
        let dist2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum();
        let fx = component_value(inst, i, &x)?;
        let fy = component_value(inst, i, &y)?;
        let gx = component_gradient(inst, i, &x)?;
        let lin: f64 = gx.iter().zip(x.iter().zip(&y)).map(|(g, (a, b))| g * (b - a)).sum();
        let ratio = 2.0 * (fy - fx - lin) / dist2;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok((lo, hi))
}
