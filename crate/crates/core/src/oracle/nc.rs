//! Prox of a non-convex component, split into independent blocks.
//!
//! In scaled units `u = v/β` the prox stationarity system of component `i`
//! decouples along the rows of group `i`: each pair row couples its two
//! coordinates, the corner row adds a diagonal term to coordinate 1, and
//! every other coordinate is a scalar equation. Each block reads
//!
//! `a_j u_j + c (u_j − u_other) + b_j Γ'(u_j) = r_j`
//!
//! with `c = 0` for single blocks. Below the step limit `a_j + b_j Γ'' > 0`,
//! so every block system is strongly monotone and has exactly one root.

use crate::error::Result;
use crate::instances::HardInstance;
use crate::nonconvex::{gamma_prime, gamma_second};
use crate::roots::increasing_root;
use crate::structure::{row_support, RowSupport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Single,
    Pair,
}

/// One independent piece of the non-convex prox system. Coordinates are
/// 0-based; for a single block only the first entry of each array is used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxBlock {
    pub kind: BlockKind,
    pub coords: [usize; 2],
    /// Diagonal coefficient `β/γ`, plus the corner term on coordinate 1.
    pub a: [f64; 2],
    /// Coupling `λn/β` of a pair row.
    pub c: f64,
    /// Penalty weight `λα/β`, zero on the last coordinate.
    pub b: [f64; 2],
    pub r: [f64; 2],
}

impl ProxBlock {
    fn eq(&self, j: usize, uj: f64, other: f64) -> f64 {
        self.a[j] * uj + self.c * (uj - other) + self.b[j] * gamma_prime(uj) - self.r[j]
    }

    /// Block residual at `u` (second entry zero for single blocks).
    pub fn residual(&self, u: [f64; 2]) -> [f64; 2] {
        match self.kind {
            BlockKind::Single => [self.eq(0, u[0], u[0]), 0.0],
            BlockKind::Pair => [self.eq(0, u[0], u[1]), self.eq(1, u[1], u[0])],
        }
    }

    fn tol(&self, j: usize, start: f64) -> f64 {
        4.0 * f64::EPSILON * (self.r[j].abs() + (self.a[j] + self.c) * (1.0 + start.abs()) + 120.0 * self.b[j])
    }

    fn solve_second(&self, u0: f64, start: f64) -> Result<f64> {
        let (a, b, c, r) = (self.a[1], self.b[1], self.c, self.r[1]);
        let tol = self.tol(1, start);
        increasing_root(
            |u| (a * u + c * (u - u0) + b * gamma_prime(u) - r, a + c + b * gamma_second(u)),
            start,
            tol,
        )
    }

    /// Unique root of the block system, searched from `start`.
    pub fn solve(&self, start: [f64; 2]) -> Result<[f64; 2]> {
        match self.kind {
            BlockKind::Single => {
                let (a, b, r) = (self.a[0], self.b[0], self.r[0]);
                if b == 0.0 {
                    return Ok([r / a, 0.0]);
                }
                let u = increasing_root(|u| (a * u + b * gamma_prime(u) - r, a + b * gamma_second(u)), start[0], self.tol(0, start[0]))?;
                Ok([u, 0.0])
            }
            BlockKind::Pair => {
                let c = self.c;
                let tol = self.tol(0, start[0]);
                let inner = |u0: f64| self.solve_second(u0, start[1]);
                // eliminate the second coordinate; the outer slope is the Schur complement
                let eval = |u0: f64| match inner(u0) {
                    Ok(u1) => {
                        let d0 = self.a[0] + c + self.b[0] * gamma_second(u0);
                        let d1 = self.a[1] + c + self.b[1] * gamma_second(u1);
                        (self.eq(0, u0, u1), d0 - c * c / d1)
                    }
                    Err(_) => (f64::NAN, f64::NAN),
                };
                let u0 = increasing_root(eval, start[0], tol)?;
                let u1 = inner(u0)?;
                Ok([u0, u1])
            }
        }
    }
}

/// Decompose the prox system of component `i` at `x` with step `gamma`.
pub fn prox_blocks(inst: &HardInstance, i: usize, x: &[f64], gamma: f64) -> Result<Vec<ProxBlock>> {
    let band = inst.band();
    let rows = inst.partition().group(i)?;
    let d = inst.dim();
    let s = &inst.s;
    let beta = s.nc_beta;
    let a = beta / gamma;
    let c = s.nc_lambda * inst.n as f64 / beta;
    let pen = s.nc_lambda * s.nc_alpha / beta;
    let weight = |j: usize| if j < inst.m { pen } else { 0.0 };
    let rhs = |j: usize| x[j] / gamma + if j == 0 { inst.eta(i) } else { 0.0 };

    let mut covered = vec![false; d];
    let mut corner = false;
    let mut blocks = Vec::with_capacity(d);
    for &l in rows {
        match row_support(d, l) {
            RowSupport::Pair(lo) => {
                covered[lo] = true;
                covered[lo + 1] = true;
                blocks.push(ProxBlock {
                    kind: BlockKind::Pair,
                    coords: [lo, lo + 1],
                    a: [a, a],
                    c,
                    b: [weight(lo), weight(lo + 1)],
                    r: [rhs(lo), rhs(lo + 1)],
                });
            }
            RowSupport::Corner => corner = true,
        }
    }
    let corner_term = c * band.omega * band.omega;
    for j in (0..d).filter(|&j| !covered[j]) {
        let aj = if j == 0 && corner { a + corner_term } else { a };
        blocks.push(ProxBlock {
            kind: BlockKind::Single,
            coords: [j, j],
            a: [aj, 0.0],
            c: 0.0,
            b: [weight(j), 0.0],
            r: [rhs(j), 0.0],
        });
    }
    Ok(blocks)
}

pub(crate) fn prox(inst: &HardInstance, i: usize, x: &[f64], gamma: f64) -> Result<Vec<f64>> {
    let beta = inst.s.nc_beta;
    let mut out = vec![0.0; x.len()];
    for block in prox_blocks(inst, i, x, gamma)? {
        let [p, q] = block.coords;
        let u = block.solve([x[p] / beta, x[q] / beta])?;
        out[p] = beta * u[0];
        if block.kind == BlockKind::Pair {
            out[q] = beta * u[1];
        }
    }
    Ok(out)
}
