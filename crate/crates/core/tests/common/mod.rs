//! Brute-force reference implementations: dense matrices, dense solves,
//! finite differences and exhaustive enumeration.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use pifo_bounds::instances::{Family, HardInstance};
use pifo_bounds::structure::{partition_rows_oriented, row_vector, BandSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
}

pub fn dense_band(spec: &BandSpec) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(spec.m, spec.m);
    for l in 1..=spec.m {
        let row = row_vector(spec, l).unwrap();
        for (j, v) in row.into_iter().enumerate() {
            b[(l - 1, j)] = v;
        }
    }
    b
}

/// `A(m, ω)`: tridiagonal with 2 on the diagonal, −1 off it, `ω² + 1` in the
/// top-left corner and `1` in the bottom-right.
pub fn chain_matrix(m: usize, omega: f64) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(m, m);
    for j in 0..m {
        a[(j, j)] = 2.0;
        if j + 1 < m {
            a[(j, j + 1)] = -1.0;
            a[(j + 1, j)] = -1.0;
        }
    }
    a[(0, 0)] = omega * omega + 1.0;
    a[(m - 1, m - 1)] = 1.0;
    a
}

/// `B_iᵀB_i` assembled from the rows of group `i`.
pub fn dense_group_gram(spec: &BandSpec, rows: &[usize]) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(spec.m, spec.m);
    for &l in rows {
        let b = DVector::from_vec(row_vector(spec, l).unwrap());
        g += &b * b.transpose();
    }
    g
}

pub fn instance_group_gram(inst: &HardInstance, i: usize) -> DMatrix<f64> {
    let band = inst.band.as_ref().unwrap();
    let p = partition_rows_oriented(band, inst.orientation);
    dense_group_gram(band, p.group(i).unwrap())
}

/// Hessian of a quadratic component, `2λ₁ B_iᵀB_i + 2λ₂ I`.
pub fn dense_hessian(inst: &HardInstance, i: usize) -> DMatrix<f64> {
    let s = &inst.s;
    instance_group_gram(inst, i) * (2.0 * s.lambda1) + DMatrix::identity(inst.m, inst.m) * (2.0 * s.lambda2)
}

fn linear_term(inst: &HardInstance, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(inst.m);
    if i == 1 {
        e[inst.m - 1] = inst.s.lambda0;
    }
    e
}

/// Minimizer of a quadratic family by a dense solve of `∇f(x) = 0`.
pub fn dense_minimizer(inst: &HardInstance) -> DVector<f64> {
    dense_restricted_minimizer(inst, inst.m)
}

/// Minimizer over the last `k` coordinates, by a dense solve of the
/// restricted normal equations.
pub fn dense_restricted_minimizer(inst: &HardInstance, k: usize) -> DVector<f64> {
    assert!(inst.family.is_quadratic());
    let m = inst.m;
    let nf = inst.n as f64;
    let mut h = DMatrix::zeros(m, m);
    for i in 1..=inst.n {
        h += dense_hessian(inst, i) / nf;
    }
    let rhs = linear_term(inst, 1) / nf;
    let mut x = DVector::zeros(m);
    if k == 0 {
        return x;
    }
    let sub = h.view((m - k, m - k), (k, k)).clone_owned();
    let r = rhs.rows(m - k, k).clone_owned();
    let y = sub.lu().solve(&r).unwrap();
    x.rows_mut(m - k, k).copy_from(&y);
    x
}

/// `(1/n) Σ f_i(x)` from dense matrices.
pub fn dense_full_value(inst: &HardInstance, x: &DVector<f64>) -> f64 {
    let nf = inst.n as f64;
    let mut v = 0.0;
    for i in 1..=inst.n {
        let h = dense_hessian(inst, i);
        v += 0.5 * x.dot(&(&h * x)) - linear_term(inst, i).dot(x);
    }
    v / nf
}

/// Prox of a quadratic component by a dense solve of
/// `(H_i + I/γ) u = x/γ + η_i e_m`.
pub fn dense_prox(inst: &HardInstance, i: usize, x: &[f64], gamma: f64) -> Vec<f64> {
    let m = inst.m;
    let a = dense_hessian(inst, i) + DMatrix::identity(m, m) / gamma;
    let rhs = DVector::from_column_slice(x) / gamma + linear_term(inst, i);
    a.lu().solve(&rhs).unwrap().as_slice().to_vec()
}

/// Central finite differences of `f` at `x`, with step `h` per coordinate.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|j| {
            let orig = y[j];
            y[j] = orig + h;
            let fp = f(&y);
            y[j] = orig - h;
            let fm = f(&y);
            y[j] = orig;
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Joint enumeration of `X₁ + X₂` for two geometrics on `{1, 2, …}`, each
/// truncated once its remaining mass falls below `1e−13`. Returns the pmf of
/// the sum indexed by value and the total mass left out.
pub fn enumerate_two_geo_sum(p1: f64, p2: f64) -> (Vec<f64>, f64) {
    let support = |p: f64| -> Vec<f64> {
        let mut out = Vec::new();
        let mut rest = 1.0;
        let mut k = 1;
        while rest > 1e-13 {
            let mass = p * (1.0 - p).powi(k - 1);
            out.push(mass);
            rest -= mass;
            k += 1;
        }
        out
    };
    let (a, b) = (support(p1), support(p2));
    let mut pmf = vec![0.0; a.len() + b.len() + 2];
    for (x1, pa) in a.iter().enumerate() {
        for (x2, pb) in b.iter().enumerate() {
            pmf[x1 + x2 + 2] += pa * pb;
        }
    }
    let covered: f64 = pmf.iter().sum();
    (pmf, (1.0 - covered).max(0.0))
}

/// `P(X₁ + X₂ > j)` summed directly from the enumerated pmf.
pub fn enumerate_two_geo_tail(pmf: &[f64], missing: f64, j: u64) -> f64 {
    pmf.iter().skip(j as usize + 1).sum::<f64>() + missing
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(b).max(1e-300)
}

/// Families with band rows.
pub fn quadratic_families() -> [Family; 4] {
    [Family::Sc, Family::C, Family::AvgSc, Family::AvgC]
}
