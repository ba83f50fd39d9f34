//! The proximal incremental first-order oracle
//! `h(x, i, γ) = [f_i(x), ∇f_i(x), prox_{f_i}^γ(x)]`.
//!
//! Evaluation is exact and structured: quadratic components use the group
//! gram products and the Woodbury solve from [`crate::structure`], the
//! non-convex components solve their prox block by block.

mod nc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{Family, HardInstance};
use crate::nonconvex::{gamma, gamma_prime};
use crate::structure::{
    accumulate_full_gram, accumulate_group_gram, full_norm_sq, group_norm_sq, solve_shifted_group_gram,
};

pub use nc::{prox_blocks, BlockKind, ProxBlock};

/// Relative slack on the strict step bound of the non-convex prox.
const GAMMA_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReply {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub prox_point: Vec<f64>,
    pub gamma: f64,
}

fn check(inst: &HardInstance, i: usize, x: &[f64]) -> Result<()> {
    inst.check_component(i)?;
    inst.check_point(x)
}

fn sum_gamma(inst: &HardInstance, x: &[f64]) -> f64 {
    let beta = inst.s.nc_beta;
    x[..inst.m].iter().map(|&v| gamma(v / beta)).sum()
}

pub fn component_value(inst: &HardInstance, i: usize, x: &[f64]) -> Result<f64> {
    check(inst, i, x)?;
    let s = &inst.s;
    let eta = inst.eta(i);
    Ok(match inst.family {
        Family::OneD => 0.5 * s.l * x[0] * x[0] - eta * x[0],
        Family::Nc => {
            let quad = group_norm_sq(inst.band(), inst.partition(), i, x)?;
            let coef = s.nc_lambda * inst.n as f64 / (2.0 * s.nc_beta * s.nc_beta);
            coef * quad - eta * x[0] + s.nc_lambda * s.nc_alpha * sum_gamma(inst, x)
        }
        _ => {
            let quad = group_norm_sq(inst.band(), inst.partition(), i, x)?;
            let norm2: f64 = x.iter().map(|v| v * v).sum();
            s.lambda1 * quad + s.lambda2 * norm2 - eta * x[inst.m - 1]
        }
    })
}

pub fn component_gradient(inst: &HardInstance, i: usize, x: &[f64]) -> Result<Vec<f64>> {
    check(inst, i, x)?;
    let s = &inst.s;
    let eta = inst.eta(i);
    match inst.family {
        Family::OneD => Ok(vec![s.l * x[0] - eta]),
        Family::Nc => {
            let mut g = vec![0.0; x.len()];
            let coef = s.nc_lambda * inst.n as f64 / (s.nc_beta * s.nc_beta);
            accumulate_group_gram(inst.band(), inst.partition(), i, x, coef, &mut g)?;
            add_penalty_gradient(inst, x, &mut g);
            g[0] -= eta;
            Ok(g)
        }
        _ => {
            let mut g: Vec<f64> = x.iter().map(|v| 2.0 * s.lambda2 * v).collect();
            accumulate_group_gram(inst.band(), inst.partition(), i, x, 2.0 * s.lambda1, &mut g)?;
            g[inst.m - 1] -= eta;
            Ok(g)
        }
    }
}

fn add_penalty_gradient(inst: &HardInstance, x: &[f64], g: &mut [f64]) {
    let s = &inst.s;
    let w = s.nc_lambda * s.nc_alpha / s.nc_beta;
    for j in 0..inst.m {
        g[j] += w * gamma_prime(x[j] / s.nc_beta);
    }
}

/// Checks the prox step against the family's validity range.
pub fn check_gamma(inst: &HardInstance, gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::GammaOutOfRange { gamma, bound: inst.gamma_limit() });
    }
    let bound = inst.gamma_limit();
    if bound.is_finite() && gamma >= bound * (1.0 - GAMMA_SLACK) {
        return Err(Error::GammaOutOfRange { gamma, bound });
    }
    Ok(())
}

/// `argmin_u f_i(u) + ‖u − x‖²/(2γ)`.
pub fn component_prox(inst: &HardInstance, i: usize, x: &[f64], gamma: f64) -> Result<Vec<f64>> {
    check(inst, i, x)?;
    check_gamma(inst, gamma)?;
    let s = &inst.s;
    let eta = inst.eta(i);
    match inst.family {
        Family::OneD => Ok(vec![(x[0] + gamma * eta) / (1.0 + s.l * gamma)]),
        Family::Nc => nc::prox(inst, i, x, gamma),
        _ => {
            // u = c1 (I + c2 B_iᵀB_i)⁻¹ (x/γ + η e_m)
            let c1 = 1.0 / (2.0 * s.lambda2 + 1.0 / gamma);
            let c2 = 2.0 * s.lambda1 * c1;
            let mut y: Vec<f64> = x.iter().map(|v| v / gamma).collect();
            y[inst.m - 1] += eta;
            let mut u = solve_shifted_group_gram(inst.band(), inst.partition(), i, c2, &y)?;
            u.iter_mut().for_each(|v| *v *= c1);
            Ok(u)
        }
    }
}

pub fn pifo_call(inst: &HardInstance, i: usize, x: &[f64], gamma: f64) -> Result<OracleReply> {
    Ok(OracleReply {
        value: component_value(inst, i, x)?,
        gradient: component_gradient(inst, i, x)?,
        prox_point: component_prox(inst, i, x, gamma)?,
        gamma,
    })
}

/// `f(x) = (1/n) Σ f_i(x)`, evaluated over all rows at once. Used for
/// reporting only.
pub fn full_value(inst: &HardInstance, x: &[f64]) -> Result<f64> {
    inst.check_point(x)?;
    let s = &inst.s;
    let nf = inst.n as f64;
    Ok(match inst.family {
        Family::OneD => 0.5 * s.l * x[0] * x[0] - s.l * s.bdist * x[0],
        Family::Nc => {
            let quad = full_norm_sq(inst.band(), x);
            let lin = s.nc_lambda * s.nc_alpha.sqrt() / s.nc_beta;
            s.nc_lambda / (2.0 * s.nc_beta * s.nc_beta) * quad - lin * x[0]
                + s.nc_lambda * s.nc_alpha * sum_gamma(inst, x)
        }
        _ => {
            let quad = full_norm_sq(inst.band(), x);
            let norm2: f64 = x.iter().map(|v| v * v).sum();
            s.lambda1 / nf * quad + s.lambda2 * norm2 - s.lambda0 / nf * x[inst.m - 1]
        }
    })
}

pub fn full_gradient(inst: &HardInstance, x: &[f64]) -> Result<Vec<f64>> {
    inst.check_point(x)?;
    let s = &inst.s;
    let nf = inst.n as f64;
    match inst.family {
        Family::OneD => Ok(vec![s.l * x[0] - s.l * s.bdist]),
        Family::Nc => {
            let mut g = vec![0.0; x.len()];
            accumulate_full_gram(inst.band(), x, s.nc_lambda / (s.nc_beta * s.nc_beta), &mut g);
            add_penalty_gradient(inst, x, &mut g);
            g[0] -= s.nc_lambda * s.nc_alpha.sqrt() / s.nc_beta;
            Ok(g)
        }
        _ => {
            let mut g: Vec<f64> = x.iter().map(|v| 2.0 * s.lambda2 * v).collect();
            accumulate_full_gram(inst.band(), x, 2.0 * s.lambda1 / nf, &mut g);
            g[inst.m - 1] -= s.lambda0 / nf;
            Ok(g)
        }
    }
}

/// Value and gradient of one component, the reply of an incremental
/// first-order oracle without the prox.
#[derive(Debug, Clone, PartialEq)]
pub struct IfoReply {
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// Query-counting front end owned by a single run. Every call, with or
/// without prox, counts as one query.
#[derive(Debug)]
pub struct Oracle<'a> {
    inst: &'a HardInstance,
    queries: u64,
}

impl<'a> Oracle<'a> {
    pub fn new(inst: &'a HardInstance) -> Self {
        Oracle { inst, queries: 0 }
    }

    pub fn instance(&self) -> &'a HardInstance {
        self.inst
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn pifo(&mut self, i: usize, x: &[f64], gamma: f64) -> Result<OracleReply> {
        let reply = pifo_call(self.inst, i, x, gamma)?;
        self.queries += 1;
        Ok(reply)
    }

    pub fn ifo(&mut self, i: usize, x: &[f64]) -> Result<IfoReply> {
        let reply = IfoReply { value: component_value(self.inst, i, x)?, gradient: component_gradient(self.inst, i, x)? };
        self.queries += 1;
        Ok(reply)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{make_one_d, make_sc};

    #[test]
    fn one_d_prox_closed_forms() {
        let inst = make_one_d(2.0, 1.5, 4).unwrap();
        for &g in &[0.1, 1.0, 7.0] {
            assert_eq!(component_prox(&inst, 3, &[0.0], g).unwrap(), vec![0.0]);
            let p = component_prox(&inst, 1, &[0.0], g).unwrap()[0];
            assert!((p - 4.0 * 2.0 * 1.5 * g / (1.0 + 2.0 * g)).abs() < 1e-14);
        }
        assert_eq!(component_gradient(&inst, 2, &[0.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn first_gradient_at_origin_is_corner() {
        let inst = make_sc(10.0, 1.0, 4, 1.0, 1e-4).unwrap();
        let x = vec![0.0; inst.m];
        let g = component_gradient(&inst, 1, &x).unwrap();
        assert_eq!(g[inst.m - 1], -inst.s.lambda0);
        assert!(g[..inst.m - 1].iter().all(|&v| v == 0.0));
        assert_eq!(component_value(&inst, 2, &x).unwrap(), 0.0);
    }

    #[test]
    fn counter_counts_every_call() {
        let inst = make_sc(10.0, 1.0, 4, 1.0, 1e-4).unwrap();
        let mut o = Oracle::new(&inst);
        let x = vec![0.0; inst.m];
        o.pifo(1, &x, 0.1).unwrap();
        o.ifo(2, &x).unwrap();
        assert!(o.pifo(9, &x, 0.1).is_err());
        assert_eq!(o.queries(), 2);
    }
}
