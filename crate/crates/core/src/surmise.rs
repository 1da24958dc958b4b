//! Shifted Wigner surmise for the splitting densities.
//!
//! `p^s(s, c) = p^W(s + c)/𝒩(c)` with the GUE surmise `p^W` and its tail mass
//! `𝒩(c)`. The threshold `c` is fixed by matching the density at zero.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::analytics::p_zero_closed_form;
use crate::error::{Error, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// GUE Wigner surmise `(32 s²/π²) e^{−4s²/π}`.
pub fn wigner_gue(s: f64) -> f64 {
    32.0 * s * s / (PI * PI) * (-4.0 * s * s / PI).exp()
}

/// GOE Wigner surmise `(π/2) s e^{−πs²/4}`.
pub fn wigner_goe(s: f64) -> f64 {
    0.5 * PI * s * (-0.25 * PI * s * s).exp()
}

/// `erf` by its Taylor series; accurate to a few ulp for `|x| ≤ 2`.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..200 {
        term *= -x2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// `e^{x²} erfc(x)` for `x ≥ 2` by the Laplace continued fraction, evaluated backwards.
fn erfcx_cf(x: f64) -> f64 {
    let mut t = x;
    for k in (1..=120).rev() {
        t = x + 0.5 * k as f64 / t;
    }
    1.0 / (PI.sqrt() * t)
}

/// Complementary error function, absolute error below `1e−15` on the real line.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x < 2.0 {
        1.0 - erf_series(x)
    } else {
        erfcx_cf(x) * (-x * x).exp()
    }
}

/// Scaled complementary error function `e^{x²} erfc(x)` for `x ≥ 0`.
pub fn erfcx(x: f64) -> f64 {
    if x < 2.0 {
        (x * x).exp() * erfc(x)
    } else {
        erfcx_cf(x)
    }
}

/// Tail mass `𝒩(c) = ∫_c^∞ p^W = (4/π)c e^{−4c²/π} + erfc(2c/√π)`.
pub fn norm_const(c: f64) -> f64 {
    4.0 / PI * c * (-4.0 * c * c / PI).exp() + erfc(2.0 * c / PI.sqrt())
}

/// `p^W(s + c)/𝒩(c)`.
pub fn shifted_surmise(s: f64, c: f64) -> f64 {
    let x = s + c;
    // Both factors carry e^{−4c²/π}; divide it out before forming the ratio.
    let num = 32.0 * x * x / (PI * PI) * (-4.0 * (x * x - c * c) / PI).exp();
    num / scaled_norm(c)
}

/// `𝒩(c) e^{4c²/π}`.
fn scaled_norm(c: f64) -> f64 {
    4.0 / PI * c + erfcx(2.0 * c / PI.sqrt())
}

/// `p^s(0, c) = p^W(c)/𝒩(c)`, strictly increasing in `c`.
pub fn density_at_zero(c: f64) -> f64 {
    shifted_surmise(0.0, c)
}

/// The threshold `c ≥ 0` with `p^W(c)/𝒩(c) = p0`.
pub fn solve_threshold(p0: f64) -> Result<f64> {
    if !(p0 >= 0.0) || p0.is_infinite() {
        return Err(Error::InvalidParameter(format!("target density {p0} at zero")));
    }
    if p0 == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 6.0;
    while density_at_zero(hi) < p0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if density_at_zero(mid) < p0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    let residual = (density_at_zero(c) - p0).abs();
    if residual > 1e-10 * p0.max(1.0) {
        return Err(Error::Numerical(format!("threshold residual {residual:e} at p0 = {p0}")));
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurmiseParams {
    pub nu: f64,
    pub c_in: f64,
    pub c_ex: f64,
}

impl SurmiseParams {
    /// Thresholds from the exact densities at zero; `ν < 0` swaps the roles.
    pub fn new(nu: f64) -> Result<Self> {
        if nu == 0.0 || nu.is_nan() {
            return Err(Error::InvalidParameter(format!("surmise at ν = {nu}")));
        }
        let (p_in0, p_ex0) = p_zero_closed_form(nu.abs())?;
        let (c_in, c_ex) = (solve_threshold(p_in0)?, solve_threshold(p_ex0)?);
        Ok(if nu > 0.0 { Self { nu, c_in, c_ex } } else { Self { nu, c_in: c_ex, c_ex: c_in } })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurmiseCurves {
    pub params: SurmiseParams,
    pub s: Vec<f64>,
    pub p_in: Vec<f64>,
    pub p_ex: Vec<f64>,
}

pub fn surmise_curves(nu: f64, grid: &[f64]) -> Result<SurmiseCurves> {
    let params = SurmiseParams::new(nu)?;
    Ok(SurmiseCurves {
        params,
        s: grid.to_vec(),
        p_in: grid.iter().map(|&s| shifted_surmise(s, params.c_in)).collect(),
        p_ex: grid.iter().map(|&s| shifted_surmise(s, params.c_ex)).collect(),
    })
}
