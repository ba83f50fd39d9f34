//! Safeguarded Newton iteration for strictly increasing scalar equations.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;
const MAX_EXPAND: usize = 80;

/// Root of a strictly increasing `g`, where `eval(u)` returns `(g(u), g'(u))`.
///
/// Newton steps start at `start`; a step that leaves the current sign bracket
/// (or a non-positive derivative) falls back to bisection. The bracket is
/// seeded by `[-10, 10]` and doubled outward until the sign changes. `tol` is
/// an absolute residual tolerance; iteration also stops once the bracket has
/// collapsed to adjacent doubles.
pub fn increasing_root(eval: impl Fn(f64) -> (f64, f64), start: f64, tol: f64) -> Result<f64> {
    let (g0, _) = eval(start);
    if g0 == 0.0 {
        return Ok(start);
    }
    if !g0.is_finite() {
        return Err(Error::Numerical(format!("residual not finite at {start}")));
    }

    let (mut lo, mut hi) = ((-10.0f64).min(start), 10.0f64.max(start));
    let mut expand = 0;
    while eval(lo).0 > 0.0 {
        lo *= 2.0;
        expand += 1;
        if expand > MAX_EXPAND {
            return Err(Error::Numerical("no lower bracket found".into()));
        }
    }
    while eval(hi).0 < 0.0 {
        hi *= 2.0;
        expand += 1;
        if expand > MAX_EXPAND {
            return Err(Error::Numerical("no upper bracket found".into()));
        }
    }

    let mut u = start;
    let mut best = (g0.abs(), start);
    for _ in 0..MAX_ITER {
        let (g, dg) = eval(u);
        if g.abs() < best.0 {
            best = (g.abs(), u);
        }
        if g == 0.0 || g.abs() <= tol {
            return Ok(u);
        }
        if g < 0.0 {
            lo = lo.max(u);
        } else {
            hi = hi.min(u);
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(best.1);
        }
        let newton = u - g / dg;
        u = if dg > 0.0 && newton > lo && newton < hi { newton } else { mid };
    }
    if best.0 <= tol * 1e3 {
        return Ok(best.1);
    }
    Err(Error::Numerical(format!("no convergence, best residual {:e}", best.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let r = increasing_root(|u| (u * u * u + u - 3.0, 3.0 * u * u + 1.0), 0.0, 1e-14).unwrap();
        assert!((r * r * r + r - 3.0).abs() < 1e-13);
    }

    #[test]
    fn exact_start_is_kept() {
        let r = increasing_root(|u| (u, 1.0), 0.0, 0.0).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn far_root_needs_expansion() {
        let r = increasing_root(|u| ((u - 1e4).atan(), 1.0 / (1.0 + (u - 1e4).powi(2))), 0.0, 1e-12).unwrap();
        assert!((r - 1e4).abs() < 1e-8);
    }
}
