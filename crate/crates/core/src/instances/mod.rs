//! Adversarial finite-sum families.
//!
//! Every quadratic family is built from
//! `r_i(x) = λ₁ Σ_{l∈L_i} (b_lᵀx)² + λ₂‖x‖² − η_i ⟨e_m, x⟩` with `η_1 = λ₀`
//! and `η_i = 0` otherwise. The non-convex family composes the same band
//! rows (head orientation, dimension `m + 1`) with the separable penalty
//! `Γ`. The one-dimensional family covers the large-ε regime of the convex
//! cases.
//!
//! Constructors derive and store every scalar once; nothing downstream
//! recomputes them.

mod serial;

use std::f64::consts::SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{partition_rows_oriented, BandSpec, RowPartition, SubspaceOrientation};

pub use serial::InstanceDoc;

/// Relative slack when testing boundary preconditions, so that parameters
/// sitting exactly on a domain boundary are accepted.
const BOUNDARY_SLACK: f64 = 1e-12;

/// `(1/9)·((√2−1)/(√2+1))²`, about `0.00327`.
pub fn sc_eps_ratio_limit() -> f64 {
    let q = (SQRT_2 - 1.0) / (SQRT_2 + 1.0);
    q * q / 9.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "SC")]
    Sc,
    #[serde(rename = "C")]
    C,
    #[serde(rename = "AVG_SC")]
    AvgSc,
    #[serde(rename = "AVG_C")]
    AvgC,
    #[serde(rename = "ONE_D")]
    OneD,
    #[serde(rename = "NC")]
    Nc,
}

impl Family {
    pub fn is_strongly_convex(self) -> bool {
        matches!(self, Family::Sc | Family::AvgSc)
    }

    pub fn is_quadratic(self) -> bool {
        matches!(self, Family::Sc | Family::C | Family::AvgSc | Family::AvgC)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Sc => "SC",
            Family::C => "C",
            Family::AvgSc => "AVG_SC",
            Family::AvgC => "AVG_C",
            Family::OneD => "ONE_D",
            Family::Nc => "NC",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "SC" => Family::Sc,
            "C" => Family::C,
            "AVG_SC" => Family::AvgSc,
            "AVG_C" => Family::AvgC,
            "ONE_D" => Family::OneD,
            "NC" => Family::Nc,
            other => return Err(Error::Invalid(format!("unknown family {other:?}"))),
        })
    }
}

/// Every scalar an instance carries. Fields that do not apply to a family
/// are zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scalars {
    /// Smoothness of each component.
    pub l: f64,
    /// Strong-convexity modulus.
    pub mu: f64,
    /// Average-smoothness target (average-smooth families).
    pub lavg: f64,
    /// Initial gap `Δ`.
    pub delta: f64,
    /// Initial distance `B`.
    pub bdist: f64,
    pub eps: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub omega: f64,
    pub alpha: f64,
    pub q: f64,
    pub xi: f64,
    /// Lower smoothness modulus `σ` (non-convex family).
    pub sigma: f64,
    pub nc_alpha: f64,
    pub nc_lambda: f64,
    pub nc_beta: f64,
}

/// A fully parameterized adversarial finite-sum problem.
#[derive(Debug, Clone, PartialEq)]
pub struct HardInstance {
    pub family: Family,
    pub n: usize,
    /// Chain length `m`. The non-convex family lives in dimension `m + 1`.
    pub m: usize,
    pub orientation: SubspaceOrientation,
    /// Band rows; `None` for the one-dimensional family.
    pub band: Option<BandSpec>,
    pub partition: Option<RowPartition>,
    pub s: Scalars,
}

impl HardInstance {
    /// Dimension of the ambient space.
    pub fn dim(&self) -> usize {
        match self.family {
            Family::OneD => 1,
            Family::Nc => self.m + 1,
            _ => self.m,
        }
    }

    pub(crate) fn band(&self) -> &BandSpec {
        self.band.as_ref().expect("family has band rows")
    }

    pub(crate) fn partition(&self) -> &RowPartition {
        self.partition.as_ref().expect("family has band rows")
    }

    /// Smoothness constant each component is guaranteed to satisfy.
    pub fn declared_smoothness(&self) -> f64 {
        self.s.l
    }

    /// Component `i`'s linear coefficient.
    pub(crate) fn eta(&self, i: usize) -> f64 {
        if i != 1 {
            return 0.0;
        }
        match self.family {
            Family::OneD => self.n as f64 * self.s.l * self.s.bdist,
            Family::Nc => {
                self.s.nc_lambda * self.n as f64 * self.s.nc_alpha.sqrt() / self.s.nc_beta
            }
            _ => self.s.lambda0,
        }
    }

    /// Upper end of the admissible prox step for the non-convex family,
    /// `((√3+1)/90)·β²/(λα)`. Infinite for convex families.
    pub fn gamma_limit(&self) -> f64 {
        match self.family {
            Family::Nc => {
                (3f64.sqrt() + 1.0) / 90.0 * self.s.nc_beta.powi(2)
                    / (self.s.nc_lambda * self.s.nc_alpha)
            }
            _ => f64::INFINITY,
        }
    }

    pub fn check_component(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::IndexOutOfRange { index: i, max: self.n });
        }
        Ok(())
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }
}

fn require(ok: bool, condition: &'static str, detail: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ParameterDomain { condition, detail: detail() })
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    require(v.is_finite() && v > 0.0, name, || format!("got {v}"))
}

fn leq_with_slack(a: f64, b: f64) -> bool {
    a <= b * (1.0 + BOUNDARY_SLACK)
}

/// `⌊x⌋`, rounding values within a few ulps below an integer up to it.
fn robust_floor(x: f64) -> f64 {
    let f = x.floor();
    if (f + 1.0) - x <= 1e-9 * x.abs().max(1.0) {
        f + 1.0
    } else {
        f
    }
}

fn band_instance(
    family: Family,
    n: usize,
    m: usize,
    dim: usize,
    omega: f64,
    orientation: SubspaceOrientation,
    s: Scalars,
) -> Result<HardInstance> {
    let band = BandSpec::new(dim, omega, n)?;
    let partition = partition_rows_oriented(&band, orientation);
    Ok(HardInstance { family, n, m, orientation, band: Some(band), partition: Some(partition), s })
}

fn sc_like(family: Family, l: f64, mu: f64, n: usize, delta: f64, eps: f64, m: usize) -> Result<HardInstance> {
    let nf = n as f64;
    let alpha = (2.0 * (l / mu - 1.0) / nf + 1.0).sqrt();
    let q = (alpha - 1.0) / (alpha + 1.0);
    let omega = (2.0 / (alpha + 1.0)).sqrt();
    let lambda0 = (2.0 * (l - mu) * nf * delta / (alpha - 1.0)).sqrt();
    let xi = (2.0 * delta * nf * (alpha + 1.0).powi(2) / ((l - mu) * (alpha - 1.0))).sqrt();
    let s = Scalars {
        l,
        mu,
        delta,
        eps,
        lambda0,
        lambda1: (l - mu) / 4.0,
        lambda2: mu / 2.0,
        omega,
        alpha,
        q,
        xi,
        ..Scalars::default()
    };
    band_instance(family, n, m, m, omega, SubspaceOrientation::Tail, s)
}

fn check_sc_params(l: f64, mu: f64, n: usize, delta: f64, eps: f64) -> Result<()> {
    require(n >= 2, "n >= 2", || format!("n = {n}"))?;
    positive("L > 0", l)?;
    positive("mu > 0", mu)?;
    positive("Delta > 0", delta)?;
    positive("eps > 0", eps)?;
    let limit = sc_eps_ratio_limit();
    require(leq_with_slack(eps / delta, limit), "eps/Delta <= (1/9)((sqrt2-1)/(sqrt2+1))^2 ~ 0.00327", || {
        format!("eps/Delta = {:e} exceeds {:e}", eps / delta, limit)
    })
}

fn sc_dimension(scale: f64, delta: f64, eps: f64) -> usize {
    let raw = 0.25 * scale * (delta / (9.0 * eps)).ln() + 1.0;
    (raw.ceil() as usize).max(2)
}

/// Strongly convex family: each component `L`-smooth and `μ`-strongly convex,
/// `f(0) − f* = Δ`.
pub fn make_sc(l: f64, mu: f64, n: usize, delta: f64, eps: f64) -> Result<HardInstance> {
    check_sc_params(l, mu, n, delta, eps)?;
    let kappa = l / mu;
    let floor = n as f64 / 2.0 + 1.0;
    require(leq_with_slack(floor, kappa), "kappa = L/mu >= n/2 + 1", || {
        format!("kappa = {kappa} < {floor}")
    })?;
    let alpha = (2.0 * (kappa - 1.0) / n as f64 + 1.0).sqrt();
    let m = sc_dimension(alpha, delta, eps);
    sc_like(Family::Sc, l, mu, n, delta, eps, m)
}

/// Average-smooth strongly convex family: `{f_i}` is `Lavg`-average smooth
/// and `f` is `μ`-strongly convex.
pub fn make_avg_sc(lavg: f64, mu: f64, n: usize, delta: f64, eps: f64) -> Result<HardInstance> {
    positive("Lavg > 0", lavg)?;
    positive("mu > 0", mu)?;
    require(n >= 2, "n >= 2", || format!("n = {n}"))?;
    let nf = n as f64;
    let floor = (3.0 / nf).sqrt() * (nf / 2.0 + 1.0);
    require(leq_with_slack(floor, lavg / mu), "Lavg/mu >= sqrt(3/n)(n/2 + 1)", || {
        format!("Lavg/mu = {} < {floor}", lavg / mu)
    })?;
    let l = (nf * (lavg * lavg - mu * mu) / 2.0 - mu * mu).sqrt();
    check_sc_params(l, mu, n, delta, eps)?;
    require(leq_with_slack(nf / 2.0 + 1.0, l / mu), "derived L/mu >= n/2 + 1", || {
        format!("L/mu = {}", l / mu)
    })?;
    let scale = ((2.0 / nf).sqrt() * lavg / mu + 1.0).sqrt();
    let m = sc_dimension(scale, delta, eps);
    let mut inst = sc_like(Family::AvgSc, l, mu, n, delta, eps, m)?;
    inst.s.lavg = lavg;
    Ok(inst)
}

/// Largest `ε` for which the convex chain construction applies,
/// `B²L/(384n)`.
pub fn c_eps_limit(l: f64, bdist: f64, n: usize) -> f64 {
    bdist * bdist * l / (384.0 * n as f64)
}

fn c_like(family: Family, l: f64, bdist: f64, n: usize, eps: f64) -> Result<HardInstance> {
    let nf = n as f64;
    let m = robust_floor((bdist * bdist * l / (24.0 * nf * eps)).sqrt()) as usize;
    let m = m.saturating_sub(1).max(3);
    let xi = 3f64.sqrt() / 2.0 * bdist * l / ((m + 1) as f64).powf(1.5);
    let s = Scalars {
        l,
        bdist,
        eps,
        lambda0: xi,
        lambda1: l / 4.0,
        lambda2: 0.0,
        omega: 1.0,
        xi,
        ..Scalars::default()
    };
    band_instance(family, n, m, m, 1.0, SubspaceOrientation::Tail, s)
}

/// Convex family with `‖x₀ − x*‖ ≤ B`. Requires `ε ≤ B²L/(384n)`; larger
/// `ε` must use [`make_one_d`].
pub fn make_c(l: f64, bdist: f64, n: usize, eps: f64) -> Result<HardInstance> {
    require(n >= 2, "n >= 2", || format!("n = {n}"))?;
    positive("L > 0", l)?;
    positive("B > 0", bdist)?;
    positive("eps > 0", eps)?;
    let limit = c_eps_limit(l, bdist, n);
    if !leq_with_slack(eps, limit) {
        return Err(Error::Regime {
            detail: format!("eps = {eps:e} > B^2 L/(384 n) = {limit:e}"),
            directive: "ONE_D",
        });
    }
    c_like(Family::C, l, bdist, n, eps)
}

/// Largest `ε` for the average-smooth convex chain, `(√2/768)·B²·Lavg/√n`.
pub fn avg_c_eps_limit(lavg: f64, bdist: f64, n: usize) -> f64 {
    SQRT_2 / 768.0 * bdist * bdist * lavg / (n as f64).sqrt()
}

/// Average-smooth convex family, built from the convex chain with
/// `L = √(n/2)·Lavg`.
pub fn make_avg_c(lavg: f64, bdist: f64, n: usize, eps: f64) -> Result<HardInstance> {
    require(n >= 2, "n >= 2", || format!("n = {n}"))?;
    positive("Lavg > 0", lavg)?;
    positive("B > 0", bdist)?;
    positive("eps > 0", eps)?;
    let limit = avg_c_eps_limit(lavg, bdist, n);
    if !leq_with_slack(eps, limit) {
        return Err(Error::Regime {
            detail: format!("eps = {eps:e} > (sqrt2/768) B^2 Lavg/sqrt(n) = {limit:e}"),
            directive: "ONE_D",
        });
    }
    let l = (n as f64 / 2.0).sqrt() * lavg;
    let mut inst = c_like(Family::AvgC, l, bdist, n, eps)?;
    inst.s.lavg = lavg;
    Ok(inst)
}

/// One-dimensional family: `g_1 = (L/2)x² − nLBx`, `g_i = (L/2)x²`.
pub fn make_one_d(l: f64, bdist: f64, n: usize) -> Result<HardInstance> {
    require(n >= 2, "n >= 2", || format!("n = {n}"))?;
    positive("L > 0", l)?;
    positive("B > 0", bdist)?;
    Ok(HardInstance {
        family: Family::OneD,
        n,
        m: 1,
        orientation: SubspaceOrientation::Tail,
        band: None,
        partition: None,
        s: Scalars { l, bdist, lavg: l, delta: l * bdist * bdist / 2.0, ..Scalars::default() },
    })
}

/// `α = min{1, (√3+1)nσ/(30L), n/180}`.
pub fn nc_alpha(l: f64, sigma: f64, n: usize) -> f64 {
    let nf = n as f64;
    1f64.min((3f64.sqrt() + 1.0) * nf * sigma / (30.0 * l)).min(nf / 180.0)
}

/// Non-convex family: each component `(−σ, L)`-smooth, `f(0) − inf f ≤ Δ`,
/// and the gradient norm stays at least `9ε` until the last two coordinates
/// are reached.
pub fn make_nc(l: f64, sigma: f64, n: usize, delta: f64, eps: f64) -> Result<HardInstance> {
    require(n >= 2, "n >= 2", || format!("n = {n}"))?;
    positive("L > 0", l)?;
    positive("sigma > 0", sigma)?;
    positive("Delta > 0", delta)?;
    positive("eps > 0", eps)?;
    let nf = n as f64;
    let alpha = nc_alpha(l, sigma, n);
    let limit = delta * l * alpha / (81648.0 * nf);
    require(leq_with_slack(eps * eps, limit), "eps^2 <= Delta L alpha/(81648 n)", || {
        format!("eps^2 = {:e} > {limit:e}", eps * eps)
    })?;
    let lambda = 3888.0 * nf * eps * eps / (l * alpha.powf(1.5));
    let beta = (3.0 * lambda * nf / l).sqrt();
    let m = robust_floor(delta * l * alpha.sqrt() / (40824.0 * nf * eps * eps)) as usize;
    let m = m.max(2);
    let omega = alpha.powf(0.25);
    let s = Scalars {
        l,
        sigma,
        delta,
        eps,
        omega,
        nc_alpha: alpha,
        nc_lambda: lambda,
        nc_beta: beta,
        ..Scalars::default()
    };
    band_instance(Family::Nc, n, m, m + 1, omega, SubspaceOrientation::Head, s)
}

/// Closed-form minimizer and minimum value.
pub fn minimizer(inst: &HardInstance) -> Result<(Vec<f64>, f64)> {
    let s = &inst.s;
    match inst.family {
        Family::Sc | Family::AvgSc => {
            let m = inst.m;
            // coordinate j (1-based) is ξ q^{m − j + 1}
            let x = (1..=m).map(|j| s.xi * s.q.powi((m - j + 1) as i32)).collect();
            Ok((x, -s.delta))
        }
        Family::C | Family::AvgC => {
            let scale = 2.0 * s.xi / s.l;
            let x = (1..=inst.m).map(|j| scale * j as f64).collect();
            Ok((x, c_optimal_value(inst)))
        }
        Family::OneD => Ok((vec![s.bdist], -s.l * s.bdist * s.bdist / 2.0)),
        Family::Nc => Err(Error::Unsupported {
            family: inst.family.to_string(),
            reason: "no closed-form minimizer; only the gap bound lambda(sqrt(alpha)/2 + 10 alpha m) is known",
        }),
    }
}

fn c_optimal_value(inst: &HardInstance) -> f64 {
    -(inst.m as f64) * inst.s.xi * inst.s.xi / (inst.n as f64 * inst.s.l)
}

fn check_k(inst: &HardInstance, k: usize) -> Result<()> {
    if k > inst.m {
        return Err(Error::IndexOutOfRange { index: k, max: inst.m });
    }
    Ok(())
}

/// `min_{x∈F_k} f(x) − f*`.
pub fn restricted_gap(inst: &HardInstance, k: usize) -> Result<f64> {
    check_k(inst, k)?;
    let s = &inst.s;
    match inst.family {
        Family::Sc | Family::AvgSc => {
            if k == inst.m {
                return Ok(0.0);
            }
            let q = s.q;
            let q2k = q.powi(2 * k as i32);
            Ok(s.delta * q2k * (1.0 + q) / (1.0 + q2k * q))
        }
        Family::C | Family::AvgC => {
            Ok(s.xi * s.xi * (inst.m - k) as f64 / (inst.n as f64 * s.l))
        }
        Family::OneD => Ok(if k == 0 { s.l * s.bdist * s.bdist / 2.0 } else { 0.0 }),
        Family::Nc => Err(Error::Unsupported {
            family: inst.family.to_string(),
            reason: "restricted minima are not available in closed form",
        }),
    }
}

/// `min_{x∈F_k} f(x)`.
pub fn restricted_min(inst: &HardInstance, k: usize) -> Result<f64> {
    let gap = restricted_gap(inst, k)?;
    let (_, fstar) = minimizer(inst)?;
    Ok(fstar + gap)
}

/// Minimizer of `f` over `F_k`, as a full-length vector.
pub fn restricted_minimizer(inst: &HardInstance, k: usize) -> Result<Vec<f64>> {
    check_k(inst, k)?;
    if k == inst.m {
        return Ok(minimizer(inst)?.0);
    }
    let s = &inst.s;
    let m = inst.m;
    let mut x = vec![0.0; inst.dim()];
    match inst.family {
        Family::Sc | Family::AvgSc => {
            // last k coordinates y_1..y_k ∝ (q^{-j} − q^{j})
            let q = s.q;
            let c = s.xi * q.powi(k as i32 + 1) / (1.0 + q.powi(2 * k as i32 + 1));
            for j in 1..=k {
                x[m - k + j - 1] = c * (q.powi(-(j as i32)) - q.powi(j as i32));
            }
        }
        Family::C | Family::AvgC => {
            let scale = 2.0 * s.xi / s.l;
            for j in 1..=k {
                x[m - k + j - 1] = scale * j as f64;
            }
        }
        Family::OneD => {}
        Family::Nc => {
            return Err(Error::Unsupported {
                family: inst.family.to_string(),
                reason: "restricted minima are not available in closed form",
            })
        }
    }
    Ok(x)
}

/// `min_{x∈F_k} ‖x − x*‖² = ξ²(q^{2(k+1)} − q^{2(m+1)})/(1 − q²)`.
pub fn restricted_min_distance(inst: &HardInstance, k: usize) -> Result<f64> {
    if !inst.family.is_strongly_convex() {
        return Err(Error::Unsupported {
            family: inst.family.to_string(),
            reason: "restricted distance is defined for the strongly convex families",
        });
    }
    check_k(inst, k)?;
    let q2 = inst.s.q * inst.s.q;
    let hi = q2.powi(k as i32 + 1);
    let lo = q2.powi(inst.m as i32 + 1);
    Ok(inst.s.xi * inst.s.xi * (hi - lo) / (1.0 - q2))
}

/// Upper bound on `f(0) − inf f` for the non-convex family.
pub fn nc_gap_bound(inst: &HardInstance) -> f64 {
    let s = &inst.s;
    s.nc_lambda * (s.nc_alpha.sqrt() / 2.0 + 10.0 * s.nc_alpha * inst.m as f64)
}

/// Gradient-norm floor `α^{3/4}λ/(4β)` on points with `x_m = x_{m+1} = 0`.
pub fn nc_gradient_floor(inst: &HardInstance) -> f64 {
    let s = &inst.s;
    s.nc_alpha.powf(0.75) * s.nc_lambda / (4.0 * s.nc_beta)
}

/// Subspace depth `M` with a certified gap of at least `9ε` and the
/// matching query budget `N = ⌊n(M+1)/4⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub depth: usize,
    pub budget: usize,
    /// Suboptimality gap (gradient-norm floor for the non-convex family).
    pub gap_at_depth: f64,
}

pub fn certificate(inst: &HardInstance, eps: f64) -> Result<Certificate> {
    positive("eps > 0", eps)?;
    let s = &inst.s;
    let (depth, gap) = match inst.family {
        Family::Sc | Family::AvgSc => {
            let raw = (9.0 * eps / s.delta).ln() / (2.0 * s.q.ln());
            let depth = robust_floor(raw).max(0.0) as usize;
            if depth >= inst.m {
                return Err(Error::Regime {
                    detail: format!("certified depth M = {depth} is not below m = {}", inst.m),
                    directive: "a larger dimension",
                });
            }
            (depth, restricted_gap(inst, depth)?)
        }
        Family::C | Family::AvgC => {
            let depth = (inst.m - 1) / 2;
            (depth, restricted_gap(inst, depth)?)
        }
        Family::Nc => (inst.m - 1, nc_gradient_floor(inst)),
        Family::OneD => {
            return Err(Error::Unsupported {
                family: inst.family.to_string(),
                reason: "the one-dimensional family is certified by its first-draw time",
            })
        }
    };
    if depth < 1 {
        return Err(Error::Regime { detail: format!("certified depth M = {depth} < 1"), directive: "a smaller eps" });
    }
    if gap < 9.0 * eps * (1.0 - BOUNDARY_SLACK) {
        return Err(Error::Regime {
            detail: format!("gap {gap:e} at depth {depth} is below 9 eps = {:e}", 9.0 * eps),
            directive: "a smaller eps",
        });
    }
    Ok(Certificate { depth, budget: inst.n * (depth + 1) / 4, gap_at_depth: gap })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sc_boundary_kappa_gives_sqrt2() {
        let n = 6;
        let inst = make_sc(n as f64 / 2.0 + 1.0, 1.0, n, 1.0, 1e-4).unwrap();
        assert!((inst.s.alpha - SQRT_2).abs() < 1e-15);
        assert!((inst.s.q - (SQRT_2 - 1.0) / (SQRT_2 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn sc_rejections_name_the_condition() {
        match make_sc(2.0, 1.0, 8, 1.0, 1e-4) {
            Err(Error::ParameterDomain { condition, .. }) => assert!(condition.contains("n/2 + 1")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(make_sc(100.0, 1.0, 4, 1.0, 0.01), Err(Error::ParameterDomain { .. })));
        assert!(make_sc(100.0, 1.0, 1, 1.0, 1e-4).is_err());
    }

    #[test]
    fn sc_scalars() {
        let inst = make_sc(10.0, 1.0, 4, 1.0, 1e-4).unwrap();
        let s = inst.s;
        assert_eq!(s.lambda1, 9.0 / 4.0);
        assert_eq!(s.lambda2, 0.5);
        assert!((4.0 * s.lambda1 + 2.0 * s.lambda2 - 10.0).abs() < 1e-15);
        assert!(inst.m >= 2);
        let expected_m = (0.25 * s.alpha * (1.0f64 / 9e-4).ln() + 1.0).ceil() as usize;
        assert_eq!(inst.m, expected_m);
        let cert = certificate(&inst, 1e-4).unwrap();
        assert!(cert.depth >= 1 && cert.depth < inst.m);
        assert!(s.delta * s.q.powi(2 * cert.depth as i32) >= 9e-4);
        assert!(cert.gap_at_depth >= 9e-4);
    }

    #[test]
    fn c_regimes() {
        let (l, b, n) = (2.0, 3.0, 5);
        let limit = c_eps_limit(l, b, n);
        let inst = make_c(l, b, n, limit).unwrap();
        assert!(inst.m >= 3);
        match make_c(l, b, n, limit * 1.01) {
            Err(Error::Regime { directive, .. }) => assert_eq!(directive, "ONE_D"),
            other => panic!("{other:?}"),
        }
        let (x, fstar) = minimizer(&inst).unwrap();
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        assert!(norm2 <= b * b * (1.0 + 1e-12));
        let xi = inst.s.xi;
        assert!((fstar + inst.m as f64 * xi * xi / (n as f64 * l)).abs() < 1e-15);
    }

    #[test]
    fn avg_c_identities() {
        let (lavg, b, n, eps) = (1.5, 2.0, 8, 1e-4);
        let inst = make_avg_c(lavg, b, n, eps).unwrap();
        let l = (n as f64 / 2.0).sqrt() * lavg;
        assert!((avg_c_eps_limit(lavg, b, n) - c_eps_limit(l, b, n)).abs() < 1e-15);
        let nf = n as f64;
        let m_avg = robust_floor(18f64.powf(0.25) / 12.0 * b * nf.powf(-0.25) * (lavg / eps).sqrt()) as usize - 1;
        assert_eq!(inst.m, m_avg);
        assert!(make_avg_c(lavg, b, n, 1.0).is_err());
    }

    #[test]
    fn avg_sc_mapping() {
        let n = 6;
        let nf = n as f64;
        let mu = 1.0;
        let lavg = 20.0;
        let inst = make_avg_sc(lavg, mu, n, 1.0, 1e-5).unwrap();
        let l = inst.s.l;
        assert!((nf / 3.0).sqrt() * lavg <= l + 1e-12 && l <= (nf / 2.0).sqrt() * lavg + 1e-12);
        assert!(l / mu >= nf / 2.0 + 1.0);
        let sc_m = sc_dimension(inst.s.alpha, 1.0, 1e-5);
        assert!(inst.m >= sc_m);
        let boundary = (3.0 / nf).sqrt() * (nf / 2.0 + 1.0);
        assert!(make_avg_sc(boundary * mu, mu, n, 1.0, 1e-5).is_ok());
        assert!(make_avg_sc(0.9 * boundary * mu, mu, n, 1.0, 1e-5).is_err());
    }

    #[test]
    fn one_d_closed_forms() {
        let inst = make_one_d(3.0, 0.5, 4).unwrap();
        let (x, fstar) = minimizer(&inst).unwrap();
        assert_eq!(x, vec![0.5]);
        assert!((0.0 - fstar - 3.0 * 0.25 / 2.0).abs() < 1e-15);
        assert!(certificate(&inst, 0.1).is_err());
    }

    #[test]
    fn nc_parameters() {
        let (l, sigma, n, delta) = (1.0, 0.1, 10, 1.0);
        let alpha = nc_alpha(l, sigma, n);
        let eps = (delta * l * alpha / (81648.0 * n as f64)).sqrt();
        let inst = make_nc(l, sigma, n, delta, eps).unwrap();
        assert!(inst.m >= 2);
        assert_eq!(inst.dim(), inst.m + 1);
        let s = inst.s;
        let l1 = 45.0 * (3f64.sqrt() - 1.0) * s.nc_alpha * s.nc_lambda / s.nc_beta.powi(2);
        let l2 = (2.0 * n as f64 + 180.0 * s.nc_alpha) * s.nc_lambda / s.nc_beta.powi(2);
        assert!(l1 <= sigma * (1.0 + 1e-12));
        assert!(l2 <= l * (1.0 + 1e-12));
        assert!(nc_gap_bound(&inst) <= delta * (1.0 + 1e-12));
        assert!((nc_gradient_floor(&inst) - 9.0 * eps).abs() < 1e-12 * eps);
        let cert = certificate(&inst, eps).unwrap();
        assert_eq!(cert.depth, inst.m - 1);
        assert!(make_nc(l, sigma, n, delta, 2.0 * eps).is_err());
        assert!(minimizer(&inst).is_err());
    }

    #[test]
    fn restricted_gaps() {
        let inst = make_sc(50.0, 1.0, 5, 1.0, 1e-6).unwrap();
        assert_eq!(restricted_gap(&inst, inst.m).unwrap(), 0.0);
        assert!((restricted_gap(&inst, 0).unwrap() - 1.0).abs() < 1e-14);
        let mut prev = f64::INFINITY;
        for k in 0..=inst.m {
            let g = restricted_gap(&inst, k).unwrap();
            assert!(g <= prev);
            if k < inst.m {
                assert!(g >= inst.s.delta * inst.s.q.powi(2 * k as i32));
            }
            prev = g;
        }
        assert!(restricted_gap(&inst, inst.m + 1).is_err());

        let c = make_c(1.0, 1.0, 3, 1e-5).unwrap();
        let slope = c.s.xi * c.s.xi / (3.0 * 1.0);
        for k in 1..c.m {
            let d = restricted_gap(&c, k - 1).unwrap() - restricted_gap(&c, k).unwrap();
            assert!((d - slope).abs() < 1e-12 * slope);
        }
    }

    #[test]
    fn restricted_distances() {
        let inst = make_sc(40.0, 1.0, 4, 1.0, 1e-6).unwrap();
        let (x, _) = minimizer(&inst).unwrap();
        let direct: f64 = x.iter().map(|v| v * v).sum();
        let d0 = restricted_min_distance(&inst, 0).unwrap();
        assert!((d0 - direct).abs() < 1e-12 * direct);
        assert!(restricted_min_distance(&inst, inst.m).unwrap().abs() < 1e-15 * direct);
        let q = inst.s.q;
        for big_m in 1..=inst.m / 2 {
            let ratio = restricted_min_distance(&inst, big_m).unwrap() / d0;
            assert!(ratio >= q.powi(2 * big_m as i32) / 2.0);
        }
        let c = make_c(1.0, 1.0, 3, 1e-5).unwrap();
        assert!(restricted_min_distance(&c, 1).is_err());
    }
}
