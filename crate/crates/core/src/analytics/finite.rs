//! Finite-`N` gap probability `E = det F(bounds) / det F(0,0;0,0)`.
//!
//! `F_kl` integrates `e^{n_k ε + n_l λ}` over `−π < ε < λ < π` outside the gap
//! intervals, with `k̃ = k − 1 − (N−1)/2`, `n_k = ik̃ + a`, `n_l = il̃ − a` and
//! `a = N/(2πν)`. Every piece is a sum of rectangle integrals over the ordered
//! region, evaluated in closed form.

use ndarray::Array2;
use ndarray_linalg::Inverse;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::GapBounds;
use crate::error::{Error, Result};
use crate::linalg::{log_det, CMatrix, C64};

/// Largest `a = N/(2πν)` for which the closed forms stay inside `f64` range.
pub const MAX_DECAY_RATE: f64 = 100.0;
/// Tolerance for reporting a gap probability as clipped into `[0, 1]`.
pub const CLIP_TOL: f64 = 1e-6;

fn decay_rate(n: usize, nu: f64) -> Result<f64> {
    if n < 1 || nu == 0.0 || nu.is_nan() {
        return Err(Error::InvalidParameter(format!("finite-N F needs N ≥ 1 and ν ≠ 0, got N = {n}, ν = {nu}")));
    }
    let a = if nu.is_infinite() { 0.0 } else { n as f64 / (2.0 * PI * nu) };
    if a.abs() > MAX_DECAY_RATE {
        return Err(Error::InvalidParameter(format!(
            "N/(2πν) = {a} overflows the finite-N closed forms; use the large-N densities"
        )));
    }
    Ok(a)
}

/// Centred index `k̃ = k − 1 − (N−1)/2` for zero-based `k`.
fn centred(k: usize, n: usize) -> f64 {
    k as f64 - 0.5 * (n as f64 - 1.0)
}

fn exponents(k: usize, l: usize, n: usize, a: f64) -> (C64, C64) {
    (C64::new(a, centred(k, n)), C64::new(-a, centred(l, n)))
}

/// `∫_p^q e^{zx} dx`, zero for an empty interval.
fn ei(z: C64, p: f64, q: f64) -> C64 {
    if q <= p {
        return C64::new(0.0, 0.0);
    }
    let d = q - p;
    let zd = z * d;
    let em1_over_z = if zd.norm() < 1e-4 {
        d * (1.0 + zd / 2.0 + zd * zd / 6.0 + zd * zd * zd / 24.0)
    } else {
        (zd.exp() - 1.0) / z
    };
    (z * p).exp() * em1_over_z
}

/// `∫_p^q (b − x) e^{zx} dx`.
fn linear_ei(z: C64, p: f64, q: f64, b: f64) -> C64 {
    if q <= p {
        return C64::new(0.0, 0.0);
    }
    if z.norm() < 1e-12 {
        return C64::new(0.5 * ((b - p).powi(2) - (b - q).powi(2)), 0.0);
    }
    ((b - q) * (z * q).exp() - (b - p) * (z * p).exp()) / z + ei(z, p, q) / z
}

/// `∫∫ e^{n_k ε + n_l λ}` over `ε ∈ [a1, a2]`, `λ ∈ [b1, b2]`, `ε < λ`.
fn rect(nk: C64, nl: C64, (a1, a2): (f64, f64), (b1, b2): (f64, f64)) -> C64 {
    let mut v = C64::new(0.0, 0.0);
    let m1 = a2.min(b1);
    if m1 > a1 {
        v += ei(nk, a1, m1) * ei(nl, b1, b2);
    }
    let (p, q) = (a1.max(b1), a2.min(b2));
    if q > p {
        v += if nl.norm() < 1e-12 {
            linear_ei(nk, p, q, b2)
        } else {
            ((nl * b2).exp() * ei(nk, p, q) - ei(nk + nl, p, q)) / nl
        };
    }
    v
}

fn clip(lo: f64, hi: f64) -> (f64, f64) {
    (lo.clamp(-PI, PI), hi.clamp(-PI, PI))
}

const FULL: (f64, f64) = (-PI, PI);

/// The plain matrix `F(bounds)`.
pub fn finite_n_f(bounds: &GapBounds, n: usize, nu: f64) -> Result<CMatrix> {
    bounds.validate()?;
    let a = decay_rate(n, nu)?;
    let eg = clip(bounds.eps_min, bounds.eps_max);
    let lg = clip(bounds.lamb_min, bounds.lamb_max);
    Ok(Array2::from_shape_fn((n, n), |(k, l)| {
        let (nk, nl) = exponents(k, l, n, a);
        rect(nk, nl, FULL, FULL) - rect(nk, nl, eg, FULL) - rect(nk, nl, FULL, lg) + rect(nk, nl, eg, lg)
    }))
}

/// Gap geometries used by the splitting densities, `z = sπ/N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum FVariant {
    Plain { bounds: GapBounds },
    /// `F(−z−δε, z; −z, z+δλ)`.
    NumeratorIn { s: f64, d_eps: f64, d_lamb: f64 },
    /// `F(−z, z+δε; −z−δλ, z)`.
    NumeratorEx { s: f64, d_eps: f64, d_lamb: f64 },
    /// `F(−z−δε, −z; 0, 0)`.
    Denominator { s: f64, d_eps: f64 },
}

impl FVariant {
    pub fn bounds(&self, n: usize) -> GapBounds {
        let z = |s: f64| s * PI / n as f64;
        match *self {
            FVariant::Plain { bounds } => bounds,
            FVariant::NumeratorIn { s, d_eps, d_lamb } => {
                GapBounds { eps_min: -z(s) - d_eps, eps_max: z(s), lamb_min: -z(s), lamb_max: z(s) + d_lamb }
            }
            FVariant::NumeratorEx { s, d_eps, d_lamb } => {
                GapBounds { eps_min: -z(s), eps_max: z(s) + d_eps, lamb_min: -z(s) - d_lamb, lamb_max: z(s) }
            }
            FVariant::Denominator { s, d_eps } => {
                GapBounds { eps_min: -z(s) - d_eps, eps_max: -z(s), lamb_min: 0.0, lamb_max: 0.0 }
            }
        }
    }

    pub fn matrix(&self, n: usize, nu: f64) -> Result<CMatrix> {
        finite_n_f(&self.bounds(n), n, nu)
    }
}

/// `sin(m·w)/m`, equal to `w` at `m = 0`.
fn sin_ratio(m: f64, w: f64) -> f64 {
    if m == 0.0 {
        w
    } else {
        (m * w).sin() / m
    }
}

/// The four pieces `F = F⁰ − F^ε − F^λ + F^{ελ}` in their closed forms.
#[derive(Clone, Debug)]
pub struct FPieces {
    pub f0: CMatrix,
    pub f_eps: CMatrix,
    pub f_lamb: CMatrix,
    pub f_eps_lamb: CMatrix,
}

impl FPieces {
    pub fn assemble(&self) -> CMatrix {
        &self.f0 - &self.f_eps - &self.f_lamb + &self.f_eps_lamb
    }
}

/// Closed-form pieces for the numerator geometry: `ε` gap `[x_ε, z]`, `λ` gap
/// `[x_λ, y_λ]` with `z = sπ/N` and `x_λ = −z`. `F^{ελ}` carries its
/// `θ(x_λ − x_ε)` branch, which is one for the internal and zero for the external
/// geometry.
pub fn numerator_pieces(variant: &FVariant, n: usize, nu: f64) -> Result<FPieces> {
    let s = match *variant {
        FVariant::NumeratorIn { s, .. } | FVariant::NumeratorEx { s, .. } => s,
        _ => return Err(Error::InvalidParameter("closed-form pieces exist for the numerator geometries".into())),
    };
    let a = decay_rate(n, nu)?;
    let b = variant.bounds(n);
    let z = s * PI / n as f64;
    let (xe, xl, yl) = (b.eps_min, b.lamb_min, b.lamb_max);
    let theta = if xl - xe > 0.0 { 1.0 } else { 0.0 };
    let mut p = FPieces {
        f0: Array2::zeros((n, n)),
        f_eps: Array2::zeros((n, n)),
        f_lamb: Array2::zeros((n, n)),
        f_eps_lamb: Array2::zeros((n, n)),
    };
    for k in 0..n {
        for l in 0..n {
            let (nk, nl) = exponents(k, l, n, a);
            let m = centred(k, n) + centred(l, n);
            let delta = if m == 0.0 { 1.0 } else { 0.0 };
            let knl = nk * nl;
            p.f0[[k, l]] = 2.0 * (nl * PI).exp() / knl * (nk * PI).sinh() - 2.0 * PI / nl * delta;
            let (lc, lw) = (0.5 * (b.lamb_max + b.lamb_min), b.lamb_max - b.lamb_min);
            p.f_lamb[[k, l]] = 2.0 / nk * sin_ratio(m, 0.5 * lw) * C64::from_polar(1.0, m * lc)
                - 2.0 * (-nk * PI).exp() / knl * (nl * lc).exp() * (0.5 * nl * lw).sinh();
            let (ec, ew) = (0.5 * (b.eps_max + b.eps_min), b.eps_max - b.eps_min);
            p.f_eps[[k, l]] = 2.0 * (nl * PI).exp() / knl * (nk * ec).exp() * (0.5 * nk * ew).sinh()
                - 2.0 / nl * sin_ratio(m, 0.5 * ew) * C64::from_polar(1.0, m * ec);
            p.f_eps_lamb[[k, l]] = 2.0 / knl * (nl * yl).exp() * (nk * z).sinh() - 2.0 / nl * sin_ratio(m, z)
                + 2.0 * theta * (0.5 * nl * (xl + yl)).exp() / knl * ((nk * xl).exp() - (nk * xe).exp())
                    * (0.5 * nl * (yl - xl)).sinh();
        }
    }
    Ok(p)
}

/// Large-`N` expansion of `n_k n_l F` for the internal numerator, linear in `δε`,
/// `δλ` and their product. Terms of order `e^{−N/ν}` are dropped. With
/// `alternating = false` the additive `e^{i(k̃+l̃)π}` term is omitted, which leaves
/// the splitting densities unchanged.
pub fn expanded_numerator(s: f64, n: usize, nu: f64, d_eps: f64, d_lamb: f64, alternating: bool) -> Result<CMatrix> {
    let a = decay_rate(n, nu)?;
    let z = s * PI / n as f64;
    let decay = if nu.is_infinite() { 0.0 } else { s / nu };
    Ok(Array2::from_shape_fn((n, n), |(k, l)| {
        let (nk, nl) = exponents(k, l, n, a);
        let (kt, lt) = (centred(k, n), centred(l, n));
        let m = kt + lt;
        let mut v = if alternating { C64::from_polar(1.0, m * PI) } else { C64::new(0.0, 0.0) };
        if m == 0.0 {
            v -= 2.0 * PI * nk;
        }
        v -= 2.0 * nl * sin_ratio(m, z);
        v += 2.0 * (nl * z).exp() * (nk * z).sinh();
        v += C64::from_polar((-decay).exp(), (lt - kt) * z) * (nk * d_eps - nl * d_lamb + nl * nk * d_eps * d_lamb);
        v
    }))
}

/// Large-`N` expansion of `n_k n_l F^{(den)}`, linear in `δε`.
pub fn expanded_denominator(s: f64, n: usize, nu: f64, d_eps: f64, alternating: bool) -> Result<CMatrix> {
    let a = decay_rate(n, nu)?;
    let z = s * PI / n as f64;
    Ok(Array2::from_shape_fn((n, n), |(k, l)| {
        let (nk, _) = exponents(k, l, n, a);
        let m = centred(k, n) + centred(l, n);
        let mut v = if alternating { C64::from_polar(1.0, m * PI) } else { C64::new(0.0, 0.0) };
        if m == 0.0 {
            v -= 2.0 * PI * nk;
        }
        v + C64::from_polar(1.0, -m * z) * nk * d_eps
    }))
}

/// Multiply row `k` by `n_k` and column `l` by `n_l`.
pub fn scale_by_exponents(f: &CMatrix, n: usize, nu: f64) -> Result<CMatrix> {
    let a = decay_rate(n, nu)?;
    Ok(Array2::from_shape_fn((n, n), |(k, l)| {
        let (nk, nl) = exponents(k, l, n, a);
        nk * nl * f[[k, l]]
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapProbability {
    pub value: f64,
    pub imag: f64,
    /// Set when the raw ratio left `[0, 1]` by less than [`CLIP_TOL`] and was clipped.
    pub clipped: bool,
}

/// `det F` as `(log|det|, phase)`, with a singular matrix mapped to `log|det| = −∞`.
fn log_det_or_zero(m: &CMatrix) -> Result<(f64, C64)> {
    match log_det(m) {
        Ok(v) => Ok(v),
        Err(Error::Linalg(_)) => Ok((f64::NEG_INFINITY, C64::new(1.0, 0.0))),
        Err(e) => Err(e),
    }
}

fn ratio(num: &CMatrix, den: &CMatrix) -> Result<C64> {
    let (ln, pn) = log_det_or_zero(num)?;
    let (ld, pd) = log_det(den)?;
    if ln == f64::NEG_INFINITY {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok((ln - ld).exp() * pn / pd)
}

/// Probability that no `ε` lies in `[eps_min, eps_max]` and no `λ` in
/// `[lamb_min, lamb_max]`.
pub fn gap_probability(bounds: &GapBounds, n: usize, nu: f64) -> Result<GapProbability> {
    let num = finite_n_f(bounds, n, nu)?;
    let den = finite_n_f(&GapBounds::default(), n, nu)?;
    let e = ratio(&num, &den)?;
    if e.im.abs() > 1e-8 {
        return Err(Error::Numerical(format!("gap probability has imaginary part {:e}", e.im)));
    }
    let (value, clipped) = if e.re < 0.0 || e.re > 1.0 {
        if e.re < -CLIP_TOL || e.re > 1.0 + CLIP_TOL {
            return Err(Error::Numerical(format!("gap probability {} outside [0, 1]", e.re)));
        }
        (e.re.clamp(0.0, 1.0), true)
    } else {
        (e.re, false)
    };
    Ok(GapProbability { value, imag: e.im, clipped })
}

fn trace_prod(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    (0..n).map(|i| (0..n).map(|j| a[[i, j]] * b[[j, i]]).sum::<C64>()).sum()
}

/// Exact finite-`N` splitting densities `(p_in, p_ex)` in units of `2π/N`.
///
/// `p_in = (2π/N) ∂_{δε}∂_{δλ} det F^{num} / (−∂_{δε} det F^{den})` with the
/// boundary derivatives of every piece taken analytically; `p_ex` uses the
/// external geometry and the `λ` density at the left gap edge.
pub fn finite_n_densities(s: f64, n: usize, nu: f64) -> Result<(f64, f64)> {
    if !(s >= 0.0) || s * PI / n as f64 >= PI {
        return Err(Error::InvalidParameter(format!("splitting s = {s} for N = {n}")));
    }
    let a = decay_rate(n, nu)?;
    let z = s * PI / n as f64;
    let build = |f: &dyn Fn(C64, C64) -> C64| -> CMatrix {
        Array2::from_shape_fn((n, n), |(k, l)| {
            let (nk, nl) = exponents(k, l, n, a);
            f(nk, nl)
        })
    };
    // ε edge at x with the λ integral running to π, and λ edge at y with ε from −π.
    let g_eps = |nk: C64, nl: C64, x: f64| (nk * x).exp() * ei(nl, x, PI);
    let h_lamb = |nk: C64, nl: C64, y: f64| (nl * y).exp() * ei(nk, -PI, y);

    let f_mid = finite_n_f(&GapBounds { eps_min: -z, eps_max: z, lamb_min: -z, lamb_max: z }, n, nu)?;
    let f0 = finite_n_f(&GapBounds::default(), n, nu)?;
    let e_mid = ratio(&f_mid, &f0)?;
    let g_mid = f_mid.inv()?;
    let g0 = f0.inv()?;

    let jacobi = |fa: &CMatrix, fb: &CMatrix, fab: Option<&CMatrix>| -> C64 {
        let ga = g_mid.dot(fa);
        let gb = g_mid.dot(fb);
        let ta: C64 = ga.diag().sum();
        let tb: C64 = gb.diag().sum();
        let tab = fab.map(|m| g_mid.dot(m).diag().sum()).unwrap_or_default();
        tab + ta * tb - trace_prod(&ga, &gb)
    };

    // Internal: ε at −z, λ at z.
    let fa = build(&|nk, nl| -g_eps(nk, nl, -z) + (-nk * z).exp() * ei(nl, -z, z));
    let fb = build(&|nk, nl| -h_lamb(nk, nl, z) + (nl * z).exp() * ei(nk, -z, z));
    let fab = build(&|nk, nl| ((nl - nk) * z).exp());
    let den_in = build(&|nk, nl| -g_eps(nk, nl, -z));
    let rho_eps = -g0.dot(&den_in).diag().sum();
    let p_in = 2.0 * PI / n as f64 * e_mid * jacobi(&fa, &fb, Some(&fab)) / rho_eps;

    // External: λ at −z, ε at z; the mixed derivative of F^{ελ} vanishes.
    let fa = build(&|nk, nl| -g_eps(nk, nl, z));
    let fb = build(&|nk, nl| -h_lamb(nk, nl, -z));
    let rho_lamb = -g0.dot(&fb).diag().sum();
    let p_ex = 2.0 * PI / n as f64 * e_mid * jacobi(&fa, &fb, None) / rho_lamb;

    for (p, what) in [(p_in, "p_in"), (p_ex, "p_ex")] {
        if p.im.abs() > 1e-8 * p.norm().max(1.0) {
            return Err(Error::Numerical(format!("finite-N {what}({s}) has imaginary part {:e}", p.im)));
        }
    }
    Ok((p_in.re, p_ex.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::kernel::{p_ex_exact, p_in_exact};
    use crate::linalg::max_abs_diff;

    /// Midpoint-rule double integral of the defining integrand.
    fn brute_entry(k: usize, l: usize, n: usize, nu: f64, b: &GapBounds) -> C64 {
        let a = n as f64 / (2.0 * PI * nu);
        let (nk, nl) = exponents(k, l, n, a);
        let m = 1200;
        let h = 2.0 * PI / m as f64;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..m {
            let e = -PI + (i as f64 + 0.5) * h;
            if e > b.eps_min && e < b.eps_max {
                continue;
            }
            for j in i + 1..m {
                let x = -PI + (j as f64 + 0.5) * h;
                if x > b.lamb_min && x < b.lamb_max {
                    continue;
                }
                acc += (nk * e + nl * x).exp();
            }
            // Diagonal cell: half of it lies above ε = λ.
            let x = e;
            if !(x > b.lamb_min && x < b.lamb_max) {
                acc += 0.5 * (nk * e + nl * x).exp();
            }
        }
        acc * h * h
    }

    #[test]
    fn closed_form_matches_quadrature() {
        // Gap edges on the quadrature grid keep the midpoint rule second order.
        let h = 2.0 * PI / 1200.0;
        let at = |i: f64| -PI + i * h;
        let b = GapBounds::new(at(524.0), at(772.0), at(390.0), at(638.0)).unwrap();
        let f = finite_n_f(&b, 3, 0.7).unwrap();
        for k in 0..3 {
            for l in 0..3 {
                let q = brute_entry(k, l, 3, 0.7, &b);
                assert!((f[[k, l]] - q).norm() < 2e-3 * q.norm().max(1.0), "({k},{l}) {} vs {q}", f[[k, l]]);
            }
        }
    }

    #[test]
    fn printed_pieces_match_direct_integration() {
        for v in [
            FVariant::NumeratorIn { s: 0.7, d_eps: 0.05, d_lamb: 0.03 },
            FVariant::NumeratorEx { s: 1.3, d_eps: 0.02, d_lamb: 0.04 },
        ] {
            for n in [3, 4, 7] {
                let pieces = numerator_pieces(&v, n, 1.2).unwrap();
                let direct = v.matrix(n, 1.2).unwrap();
                assert!(max_abs_diff(&pieces.assemble(), &direct) < 1e-12, "{v:?} N = {n}");
            }
        }
    }

    #[test]
    fn zero_gap_has_probability_one() {
        let e = gap_probability(&GapBounds::default(), 4, 1.0).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gap_probability_decreases_with_width() {
        let mut last = 1.0;
        for i in 1..=12 {
            let h = 0.25 * i as f64;
            let e = gap_probability(&GapBounds::symmetric(h).unwrap(), 3, 1.0).unwrap().value;
            assert!(e < last, "h = {h}: {e} ≥ {last}");
            last = e;
        }
        assert!(last < 1e-3);
        let full = gap_probability(&GapBounds::symmetric(PI).unwrap(), 3, 1.0).unwrap().value;
        assert!(full.abs() < 1e-10);
    }

    #[test]
    fn expansion_matches_exact_matrix() {
        let (n, nu, s) = (20, 1.0, 0.8);
        let h = 1e-6;
        let exact = |de: f64, dl: f64| {
            scale_by_exponents(&FVariant::NumeratorIn { s, d_eps: de, d_lamb: dl }.matrix(n, nu).unwrap(), n, nu).unwrap()
        };
        let e00 = exact(0.0, 0.0);
        let x00 = expanded_numerator(s, n, nu, 0.0, 0.0, true).unwrap();
        assert!(max_abs_diff(&e00, &x00) <= 1e-4 * e00.iter().map(|z| z.norm()).fold(0.0, f64::max));
        // First-order coefficients by forward differencing.
        for (de, dl) in [(h, 0.0), (0.0, h)] {
            let fd = (exact(de, dl) - &e00) / C64::new(h, 0.0);
            let xd = (expanded_numerator(s, n, nu, de, dl, true).unwrap() - &x00) / C64::new(h, 0.0);
            let scale = xd.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(max_abs_diff(&fd, &xd) <= 1e-4 * scale, "δ = ({de}, {dl})");
        }
        let den = |de: f64| {
            scale_by_exponents(&FVariant::Denominator { s, d_eps: de }.matrix(n, nu).unwrap(), n, nu).unwrap()
        };
        let d0 = den(0.0);
        let x0 = expanded_denominator(s, n, nu, 0.0, true).unwrap();
        assert!(max_abs_diff(&d0, &x0) <= 1e-4 * d0.iter().map(|z| z.norm()).fold(0.0, f64::max));
        let fd = (den(h) - &d0) / C64::new(h, 0.0);
        let xd = (expanded_denominator(s, n, nu, h, true).unwrap() - &x0) / C64::new(h, 0.0);
        assert!(max_abs_diff(&fd, &xd) <= 1e-4 * xd.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }

    #[test]
    fn finite_densities_match_differencing() {
        let (n, nu, s) = (6, 0.8, 0.9);
        let (p_in, p_ex) = finite_n_densities(s, n, nu).unwrap();
        let h = 1e-5;
        let det = |v: FVariant| {
            let (l, p) = log_det(&v.matrix(n, nu).unwrap()).unwrap();
            l.exp() * p
        };
        let num = |de, dl| det(FVariant::NumeratorIn { s, d_eps: de, d_lamb: dl });
        let mixed = (num(h, h) - num(h, 0.0) - num(0.0, h) + num(0.0, 0.0)) / (h * h);
        let d = (det(FVariant::Denominator { s, d_eps: h }) - det(FVariant::Denominator { s, d_eps: 0.0 })) / h;
        let fd_in = (2.0 * PI / n as f64 * mixed / -d).re;
        assert!((p_in - fd_in).abs() < 1e-3, "{p_in} vs {fd_in}");
        let num = |de, dl| det(FVariant::NumeratorEx { s, d_eps: de, d_lamb: dl });
        let mixed = (num(h, h) - num(h, 0.0) - num(0.0, h) + num(0.0, 0.0)) / (h * h);
        let z = s * PI / n as f64;
        let lam = |dl: f64| det(FVariant::Plain { bounds: GapBounds { eps_min: 0.0, eps_max: 0.0, lamb_min: -z - dl, lamb_max: -z } });
        let d = (lam(h) - lam(0.0)) / h;
        let fd_ex = (2.0 * PI / n as f64 * mixed / -d).re;
        assert!((p_ex - fd_ex).abs() < 1e-3, "{p_ex} vs {fd_ex}");
    }

    #[test]
    fn finite_densities_approach_large_n() {
        for s in [0.0, 0.5, 1.0, 2.0] {
            let (a, b) = finite_n_densities(s, 40, 1.0).unwrap();
            assert!((a - p_in_exact(1.0, s, 100).unwrap()).abs() < 2e-3, "s = {s}");
            assert!((b - p_ex_exact(1.0, s, 100).unwrap()).abs() < 2e-3, "s = {s}");
        }
    }

    #[test]
    fn dropping_alternating_term_keeps_density() {
        let (n, nu, s, h) = (100, 1.0, 0.5, 1e-6);
        let p = |alt: bool| {
            let det = |m: CMatrix| {
                let (l, ph) = log_det(&m).unwrap();
                (l, ph)
            };
            let (l00, p00) = det(expanded_numerator(s, n, nu, 0.0, 0.0, alt).unwrap());
            let rel = |m: CMatrix| {
                let (l, ph) = det(m);
                (l - l00).exp() * ph / p00
            };
            let mixed = rel(expanded_numerator(s, n, nu, h, h, alt).unwrap())
                - rel(expanded_numerator(s, n, nu, h, 0.0, alt).unwrap())
                - rel(expanded_numerator(s, n, nu, 0.0, h, alt).unwrap())
                + 1.0;
            let (ld, pd) = det(expanded_denominator(s, n, nu, 0.0, alt).unwrap());
            let (lh, ph) = det(expanded_denominator(s, n, nu, h, alt).unwrap());
            let dden = (lh - ld).exp() * ph / pd - 1.0;
            ((l00 - ld).exp() * p00 / pd * 2.0 * PI / n as f64 * (mixed / (h * h)) / (-dden / h)).re
        };
        let exact = p_in_exact(nu, s, n).unwrap();
        assert!((p(false) - exact).abs() < 5e-3, "{} vs {exact}", p(false));
    }
}
