//! Perturbation strength.
//!
//! `ν` is the strength in units of the mean level spacing of the unperturbed
//! spectrum. Near a level the secular equation reads `1/(2πν) = Σ w/(λ−ε)` on the
//! unfolded scale, so the local coupling of a backscatterer is `tan α = πν`.
//! The scatterer realising strength `ν` uses `α = −arctan(πν)`, the sign that
//! corresponds to a repulsive δ-potential and moves eigenphases downwards.

use std::f64::consts::PI;

/// Local coupling `tan α` belonging to strength `ν`. Infinite for `ν = ±∞`.
pub fn coupling(nu: f64) -> f64 {
    PI * nu
}

/// Strength `ν` belonging to a coupling `tan α`.
pub fn from_coupling(coupling: f64) -> f64 {
    coupling / PI
}

/// Scatterer angle `α = −arctan(πν)`; `ν = ±∞` maps to `α = π/2` (full reflection).
pub fn scatterer_angle(nu: f64) -> f64 {
    if nu.is_infinite() {
        PI / 2.0
    } else {
        -(PI * nu).atan()
    }
}

/// Strength belonging to a scatterer angle; inverse of [`scatterer_angle`].
pub fn from_scatterer_angle(alpha: f64) -> f64 {
    if (alpha.abs() - PI / 2.0).abs() < 1e-15 {
        f64::INFINITY
    } else {
        -alpha.tan() / PI
    }
}

/// Angle entering the ensemble secular equation `cot α = Σ w cot((λ−ε)/2)`:
/// `α = arctan(πν)`, positive for roots that move to larger phases.
pub fn secular_angle(nu: f64) -> f64 {
    if nu.is_infinite() {
        PI / 2.0
    } else {
        (PI * nu).atan()
    }
}
