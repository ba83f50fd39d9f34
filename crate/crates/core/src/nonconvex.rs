//! The scalar penalty `Γ(x) = 120 ∫₁ˣ t²(t−1)/(1+t²) dt` and its derivatives.
//!
//! Dividing the integrand gives `t − 1 + (1 − t)/(1 + t²)`, so
//! `Γ(x) = 120[(x²−1)/2 − (x−1) + (arctan x − π/4) − ½ log((1+x²)/2)]`.

use std::f64::consts::FRAC_PI_4;

pub fn gamma(x: f64) -> f64 {
    let quad = 0.5 * (x - 1.0) * (x + 1.0) - (x - 1.0);
    let atan = x.atan() - FRAC_PI_4;
    // log((1 + x²)/2) = log1p((x² − 1)/2), accurate near x = 1
    let log = 0.5 * (0.5 * (x - 1.0) * (x + 1.0)).ln_1p();
    120.0 * (quad + atan - log)
}

pub fn gamma_prime(x: f64) -> f64 {
    let x2 = x * x;
    120.0 * x2 * (x - 1.0) / (1.0 + x2)
}

pub fn gamma_second(x: f64) -> f64 {
    let x2 = x * x;
    let d = 1.0 + x2;
    120.0 * (x2 * x2 + 3.0 * x2 - 2.0 * x) / (d * d)
}

/// Lower and upper curvature bounds of `Γ`: it is `(−45(√3−1), 180)`-smooth.
pub const GAMMA_LOWER_CURVATURE: f64 = -45.0 * (1.732_050_807_568_877_2 - 1.0);
pub const GAMMA_UPPER_CURVATURE: f64 = 180.0;
