//! Large-`N` densities from the sine-kernel matrix `R` and the diagonal `Λ`.

use ndarray::{Array1, Array2};
use ndarray_linalg::{EigValsh, UPLO};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Lu, C64};

/// Default truncation of the kernel matrices.
pub const DEFAULT_N: usize = 100;
/// Largest allowed imaginary part of a density.
pub const IMAG_TOL: f64 = 1e-8;
const COND_WARN: f64 = 1e10;

/// Largest splitting evaluated at truncation `n`; beyond it `R` is numerically
/// singular and every density is below `1e−6`, so zero is returned.
pub fn s_cap(n: usize) -> f64 {
    6.0 * n as f64 / 100.0
}

/// `R`, `Λ`, `u`, `u*` and `g` at one `(N, ν, s)`; indices run over `1..=N`.
#[derive(Clone, Debug)]
pub struct KernelWorkspace {
    pub n: usize,
    pub nu: f64,
    pub s: f64,
    pub r: Array2<f64>,
    /// Diagonal of `Λ_kk = ik + N/(2πν) − i(N+1)/2`.
    pub lambda: Array1<C64>,
    pub u: Array1<C64>,
    pub u_star: Array1<C64>,
    /// `exp(i(N+1)πs/N − s/ν)`.
    pub g: C64,
}

pub fn build_workspace(n: usize, nu: f64, s: f64) -> Result<KernelWorkspace> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("kernel truncation N = {n}")));
    }
    if nu == 0.0 || nu.is_nan() {
        return Err(Error::InvalidParameter(format!("Λ is undefined at ν = {nu}")));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("splitting s = {s}")));
    }
    let nf = n as f64;
    let shift = if nu.is_infinite() { 0.0 } else { nf / (2.0 * PI * nu) };
    let lambda: Array1<C64> = (1..=n).map(|k| C64::new(shift, k as f64 - 0.5 * (nf + 1.0))).collect();
    if lambda.iter().any(|z| z.norm() == 0.0) {
        return Err(Error::InvalidParameter("Λ is singular: ν = ∞ needs an even N".into()));
    }
    let r = Array2::from_shape_fn((n, n), |(k, l)| {
        if k == l {
            1.0 - s / nf
        } else {
            let d = k as f64 - l as f64;
            -(d * PI * s / nf).sin() / (d * PI)
        }
    });
    let u: Array1<C64> = (1..=n).map(|j| C64::from_polar(1.0, j as f64 * PI * s / nf)).collect();
    let u_star = u.mapv(|z| z.conj());
    let decay = if nu.is_infinite() { 0.0 } else { s / nu };
    let g = C64::from_polar((-decay).exp(), (nf + 1.0) * PI * s / nf);
    Ok(KernelWorkspace { n, nu, s, r, lambda, u, u_star, g })
}

/// One point of the analytic curves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub s: f64,
    pub p_in: f64,
    pub p_ex: f64,
    pub p_gue: f64,
    /// Largest `|Im|` among the three densities.
    pub imag_residue: f64,
}

fn dot(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// All brackets needed by the three densities, obtained from three solves with `R`.
struct Brackets {
    p_in: C64,
    p_ex: C64,
    p_gue: C64,
}

fn brackets(ws: &KernelWorkspace, with_lambda: bool) -> Result<Brackets> {
    let n = ws.n as f64;
    let rc: CMatrix = ws.r.mapv(|x| C64::new(x, 0.0));
    let eig = ws.r.eigvalsh(UPLO::Lower)?;
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);
    if lo <= 0.0 || hi / lo > COND_WARN {
        log::warn!("sine-kernel matrix badly conditioned at s = {}: eigenvalues in [{lo:e}, {hi:e}]", ws.s);
    }
    let lu = Lu::new(&rc)?;
    let (log_abs, phase) = lu.log_det()?;
    let det_r = log_abs.exp() * phase.re.signum();
    let ubar = &ws.u_star; // conj(u)
    // y = R⁻¹u; R is real, so R⁻¹u* = conj(y).
    let y = lu.solve(&ws.u)?;
    let ybar = y.mapv(|z| z.conj());
    let a3 = dot(ubar, &y); // ⟨u|R⁻¹|u⟩
    let b1 = dot(&ws.u, &ybar); // ⟨u*|R⁻¹|u*⟩
    let c1 = dot(ubar, &ybar); // ⟨u|R⁻¹|u*⟩
    let c2 = dot(&ws.u, &y); // ⟨u*|R⁻¹|u⟩
    let p_gue = det_r / (n * n) * (b1 * a3 - c1 * c2);
    let (p_in, p_ex) = if with_lambda {
        let ubar_over_l: Array1<C64> = ubar.iter().zip(&ws.lambda).map(|(a, l)| a / l).collect();
        // x = R⁻¹Λu*, w = R⁻¹Λu.
        let x = lu.solve(&(&ws.lambda * &ws.u_star))?;
        let w = lu.solve(&(&ws.lambda * &ws.u))?;
        let a1 = dot(ubar, &x); // ⟨u|R⁻¹Λ|u*⟩
        let a2 = dot(&ubar_over_l, &y); // ⟨u|Λ⁻¹R⁻¹|u⟩
        let a4 = dot(&ubar_over_l, &x); // ⟨u|Λ⁻¹R⁻¹Λ|u*⟩
        let b2 = dot(&ubar_over_l, &w); // ⟨u|Λ⁻¹R⁻¹Λ|u⟩
        let b3 = dot(&ubar_over_l, &ybar); // ⟨u|Λ⁻¹R⁻¹|u*⟩
        let b4 = dot(&ws.u, &w); // ⟨u*|R⁻¹Λ|u⟩
        let p_in = 2.0 * ws.g * PI / (n * n) * det_r * (a1 - a2 * a1 / (2.0 * PI) + a3 * a4 / (2.0 * PI));
        let p_ex = det_r / (n * n) * (b1 * b2 - b3 * b4);
        (p_in, p_ex)
    } else {
        (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    };
    Ok(Brackets { p_in, p_ex, p_gue })
}

fn real_part(z: C64, what: &str, s: f64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::Numerical(format!("{what}({s}) has imaginary part {:e}", z.im)));
    }
    Ok(z.re)
}

fn require_positive(nu: f64) -> Result<()> {
    if nu > 0.0 {
        Ok(())
    } else if nu < 0.0 {
        Err(Error::SwapRule(nu))
    } else {
        Err(Error::InvalidParameter(format!("ν = {nu}")))
    }
}

/// All three densities at one `s` for `ν > 0`.
pub fn evaluate(n: usize, nu: f64, s: f64) -> Result<CurvePoint> {
    require_positive(nu)?;
    if s > s_cap(n) {
        build_workspace(n, nu, 0.0)?;
        return Ok(CurvePoint { s, p_in: 0.0, p_ex: 0.0, p_gue: 0.0, imag_residue: 0.0 });
    }
    let ws = build_workspace(n, nu, s)?;
    let b = brackets(&ws, true)?;
    let imag_residue = b.p_in.im.abs().max(b.p_ex.im.abs()).max(b.p_gue.im.abs());
    Ok(CurvePoint {
        s,
        p_in: real_part(b.p_in, "p_in", s)?,
        p_ex: real_part(b.p_ex, "p_ex", s)?,
        p_gue: real_part(b.p_gue, "p_gue", s)?,
        imag_residue,
    })
}

/// Internal splitting density for `ν > 0`; `ν < 0` is rejected with [`Error::SwapRule`].
pub fn p_in_exact(nu: f64, s: f64, n: usize) -> Result<f64> {
    Ok(evaluate(n, nu, s)?.p_in)
}

/// External splitting density for `ν > 0`.
pub fn p_ex_exact(nu: f64, s: f64, n: usize) -> Result<f64> {
    Ok(evaluate(n, nu, s)?.p_ex)
}

/// GUE nearest-neighbour density.
pub fn p_gue_exact(s: f64, n: usize) -> Result<f64> {
    if s > s_cap(n) {
        return Ok(0.0);
    }
    // Λ does not enter p_GUE; any ν builds the workspace.
    let ws = build_workspace(n, 1.0, s)?;
    let b = brackets(&ws, false)?;
    real_part(b.p_gue, "p_gue", s)
}

/// `(p_in, p_ex)` for either sign of `ν`, using `p^in_ν = p^ex_{−ν}` for `ν < 0`.
pub fn densities_signed(nu: f64, s: f64, n: usize) -> Result<(f64, f64)> {
    if nu < 0.0 {
        let p = evaluate(n, -nu, s)?;
        Ok((p.p_ex, p.p_in))
    } else {
        let p = evaluate(n, nu, s)?;
        Ok((p.p_in, p.p_ex))
    }
}

/// `(p_in(0), p_ex(0)) = (1 + 1/ν − T, 1 − T)` with `T = arctan(πν)/(πν)`.
pub fn p_zero_closed_form(nu: f64) -> Result<(f64, f64)> {
    require_positive(nu)?;
    if nu.is_infinite() {
        return Ok((1.0, 1.0));
    }
    let t = (PI * nu).atan() / (PI * nu);
    Ok((1.0 + 1.0 / nu - t, 1.0 - t))
}

/// Curves on a grid, evaluated in parallel. Negative `ν` goes through the swap rule.
pub fn curves(nu: f64, n: usize, grid: &[f64]) -> Result<Vec<CurvePoint>> {
    let abs_nu = nu.abs();
    grid.par_iter()
        .map(|&s| {
            let mut p = evaluate(n, abs_nu, s)?;
            if nu < 0.0 {
                std::mem::swap(&mut p.p_in, &mut p.p_ex);
            }
            Ok(p)
        })
        .collect()
}

/// Uniform grid `0, ds, 2ds, …` up to and including `s_max` when it lies on the grid.
pub fn uniform_grid(s_max: f64, ds: f64) -> Result<Vec<f64>> {
    if !(ds > 0.0 && s_max >= 0.0) {
        return Err(Error::InvalidParameter(format!("grid up to {s_max} with step {ds}")));
    }
    let m = (s_max / ds + 1e-9).floor() as usize;
    Ok((0..=m).map(|i| i as f64 * ds).collect())
}
