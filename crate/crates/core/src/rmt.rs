//! The rank-one random-matrix ensemble.
//!
//! An instance holds `N` CUE eigenphases `ε`, overlap weights `w` drawn as
//! independent exponentials and normalised to one, and a strength `ν`. The
//! perturbed phases solve either the circular secular equation
//! `cot α = Σ w cot((λ−ε)/2)` with `α = arctan(πν)` or its local form
//! `1/(2πν) = Σ w/(λ−ε)` on the unwrapped line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::analytics::GapBounds;
use crate::error::{Error, Result};
use crate::graph::haar_unitary;
use crate::linalg::eigvals;
use crate::strength::{coupling, secular_angle};

const WEIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RmtInstance {
    pub n: usize,
    pub eps: Vec<f64>,
    pub weights: Vec<f64>,
    pub nu: f64,
}

impl RmtInstance {
    pub fn new(eps: Vec<f64>, weights: Vec<f64>, nu: f64) -> Result<Self> {
        let n = eps.len();
        if n == 0 || weights.len() != n {
            return Err(Error::InvalidDimension(format!("{} phases, {} weights", n, weights.len())));
        }
        if nu.is_nan() {
            return Err(Error::InvalidParameter("ν is NaN".into()));
        }
        if eps.iter().any(|&e| !(e > -PI && e <= PI)) || eps.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidParameter("phases must increase strictly inside (−π, π]".into()));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| !(w >= 0.0)) || (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidParameter(format!("weights must be nonnegative and sum to 1, got {total}")));
        }
        Ok(Self { n, eps, weights, nu })
    }

    pub fn sample<R: Rng + ?Sized>(n: usize, nu: f64, rng: &mut R) -> Result<Self> {
        let eps = sample_cue_phases(n, rng)?;
        let weights = sample_overlaps(n, rng)?;
        Self::new(eps, weights, nu)
    }
}

/// Sorted eigenphases of a Haar unitary.
pub fn sample_cue_phases<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let u = haar_unitary(n, rng)?;
    let mut phases: Vec<f64> = eigvals(&u)?.iter().map(|z| z.arg()).collect();
    // arg lands in [−π, π]; keep the half-open convention.
    for p in &mut phases {
        if *p <= -PI {
            *p += 2.0 * PI;
        }
    }
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}

/// `n` independent exponential draws with mean `1/n`, before normalisation.
pub fn raw_overlaps<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(Exp1) / n as f64).collect()
}

/// Exponential overlaps normalised to sum to one.
pub fn sample_overlaps<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidDimension("zero overlaps".into()));
    }
    let mut w = raw_overlaps(n, rng);
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    Ok(w)
}

/// Root of a function decreasing from `+∞` to `−∞` on the open interval `(a, b)`,
/// found by bisection down to adjacent floats.
fn bisect_decreasing(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (a, b);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

fn strictly_inside(x: f64, a: f64, b: f64) -> Result<f64> {
    if x > a && x < b {
        Ok(x)
    } else {
        Err(Error::Numerical(format!("secular root {x} collapsed onto the pole interval ({a}, {b})")))
    }
}

/// Solutions of `cot α = Σ w cot((λ−ε)/2)`, one per arc. Root `i` lies in
/// `(ε_i, ε_{i+1})`, the last one in `(ε_N, ε_1 + 2π)` and is left unwrapped.
pub fn solve_secular_cot(inst: &RmtInstance, alpha: f64) -> Result<Vec<f64>> {
    if alpha == 0.0 {
        return Err(Error::DegenerateLimit("α = 0 leaves every phase in place".into()));
    }
    if inst.weights.iter().any(|&w| w <= 0.0) {
        return Err(Error::InvalidParameter("the circular solver needs positive weights".into()));
    }
    let target = if (alpha.abs() - PI / 2.0).abs() < 1e-15 { 0.0 } else { 1.0 / alpha.tan() };
    let f = |x: f64| -> f64 {
        inst.eps.iter().zip(&inst.weights).map(|(&e, &w)| w / (0.5 * (x - e)).tan()).sum::<f64>() - target
    };
    let n = inst.n;
    (0..n)
        .map(|i| {
            let a = inst.eps[i];
            let b = if i + 1 < n { inst.eps[i + 1] } else { inst.eps[0] + 2.0 * PI };
            strictly_inside(bisect_decreasing(f, a, b), a, b)
        })
        .collect()
}

/// Solutions of `1/(2πν) = Σ w/(λ−ε)` on the line, sorted. There is one root per
/// interval between consecutive `ε`, plus one above `ε_N` for `ν > 0` or below
/// `ε_1` for `ν < 0`; `ν = ±∞` has only the `N − 1` interval roots.
pub fn solve_secular_rational(inst: &RmtInstance) -> Result<Vec<f64>> {
    if inst.nu == 0.0 {
        return Err(Error::DegenerateLimit("ν = 0 leaves every phase in place".into()));
    }
    let c = coupling(inst.nu);
    let rhs = if c.is_infinite() { 0.0 } else { 0.5 / c };
    let f = |x: f64| -> f64 { inst.eps.iter().zip(&inst.weights).map(|(&e, &w)| w / (x - e)).sum::<f64>() - rhs };
    let eps = &inst.eps;
    let n = inst.n;
    let mut roots = Vec::with_capacity(n);
    if rhs < 0.0 {
        // Σ w/(λ−ε) ≥ 1/(λ−ε_1) below ε_1, so the root lies in [ε_1 + 2c, ε_1).
        let (a, b) = (eps[0] + 2.0 * c, eps[0]);
        roots.push(bisect_decreasing(f, a - (b - a) * 1e-12, b));
    }
    for i in 0..n - 1 {
        roots.push(strictly_inside(bisect_decreasing(f, eps[i], eps[i + 1]), eps[i], eps[i + 1])?);
    }
    if rhs > 0.0 {
        let (a, b) = (eps[n - 1], eps[n - 1] + 2.0 * c);
        roots.push(bisect_decreasing(f, a, b + (b - a) * 1e-12));
    }
    Ok(roots)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SecularSolver {
    /// Local equation on the unwrapped line.
    #[default]
    Rational,
    /// Circular equation with `α = arctan(πν)`.
    Cot,
}

pub fn solve_instance(inst: &RmtInstance, solver: SecularSolver) -> Result<Vec<f64>> {
    match solver {
        SecularSolver::Rational => solve_secular_rational(inst),
        SecularSolver::Cot => solve_secular_cot(inst, secular_angle(inst.nu)),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RmtSplittings {
    pub internal: Vec<f64>,
    pub external: Vec<f64>,
}

/// Splittings of the middle half of the levels, in units of `2π/N`.
///
/// For each `i` in `[N/4, 3N/4)` the root `λ` inside `(ε_i, ε_{i+1})` gives
/// `s_in = λ − ε_i` and `s_ex = ε_{i+1} − λ`. Both are nonnegative whatever the
/// sign of `ν`; for `ν < 0` the roots sit near the right pole instead.
pub fn measure_splittings(eps: &[f64], lambdas: &[f64]) -> Result<RmtSplittings> {
    let n = eps.len();
    let scale = n as f64 / (2.0 * PI);
    let mut out = RmtSplittings::default();
    for i in n / 4..(3 * n / 4).min(n.saturating_sub(1)) {
        let (a, b) = (eps[i], eps[i + 1]);
        let j = lambdas.partition_point(|&l| l <= a);
        let l = *lambdas
            .get(j)
            .filter(|&&l| l < b)
            .ok_or_else(|| Error::Classification(format!("no root between ε_{i} and ε_{}", i + 1)))?;
        if lambdas.get(j + 1).is_some_and(|&m| m < b) {
            return Err(Error::Classification(format!("two roots between ε_{i} and ε_{}", i + 1)));
        }
        out.internal.push((l - a) * scale);
        out.external.push((b - l) * scale);
    }
    Ok(out)
}

/// Independent stream `index` of the generator family keyed by `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Splittings pooled over `n_instances` independent instances. Instance `i`
/// draws from [`instance_rng`]`(seed, i)`, so the result does not depend on the
/// thread count.
pub fn sample_splittings(
    n: usize,
    nu: f64,
    n_instances: usize,
    seed: u64,
    solver: SecularSolver,
) -> Result<RmtSplittings> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("N = {n} has no spacings")));
    }
    if nu == 0.0 {
        return Err(Error::DegenerateLimit("ν = 0 leaves every phase in place".into()));
    }
    let parts = (0..n_instances as u64)
        .into_par_iter()
        .map(|i| {
            let inst = RmtInstance::sample(n, nu, &mut instance_rng(seed, i))?;
            measure_splittings(&inst.eps, &solve_instance(&inst, solver)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = RmtSplittings::default();
    for p in parts {
        out.internal.extend(p.internal);
        out.external.extend(p.external);
    }
    Ok(out)
}

/// One draw from the interlaced joint density
/// `∝ Π_{i>j} sin((ε_i−ε_j)/2) sin((λ_i−λ_j)/2) · exp(−N/(2πν) Σ(λ_i−ε_i))`
/// on `−π < ε_1 < λ_1 < ε_2 < … < ε_N < λ_N < π`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointSample {
    pub eps: Vec<f64>,
    pub lambdas: Vec<f64>,
}

/// Exact rejection sampler for the joint density: sorted uniform points are
/// assigned alternately to `ε` and `λ` and accepted with the density divided by
/// its maximum. The sine products are bounded by `(N^{N/2} / 2^{N(N−1)/2})²`,
/// reached by equally spaced points.
pub fn sample_joint_density<R: Rng + ?Sized>(n: usize, nu: f64, rng: &mut R) -> Result<JointSample> {
    if n == 0 {
        return Err(Error::InvalidDimension("N = 0".into()));
    }
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("joint density sampler needs ν > 0, got {nu}")));
    }
    let a = if nu.is_infinite() { 0.0 } else { n as f64 / (2.0 * PI * nu) };
    let nf = n as f64;
    let log_bound = 2.0 * (0.5 * nf * nf.ln() - 0.5 * nf * (nf - 1.0) * 2f64.ln());
    let mut pts = vec![0.0; 2 * n];
    loop {
        for p in &mut pts {
            *p = -PI + 2.0 * PI * rng.random::<f64>();
        }
        pts.sort_by(f64::total_cmp);
        let mut log_w = 0.0;
        for i in 0..n {
            for j in 0..i {
                log_w += (0.5 * (pts[2 * i] - pts[2 * j])).sin().ln();
                log_w += (0.5 * (pts[2 * i + 1] - pts[2 * j + 1])).sin().ln();
            }
            log_w -= a * (pts[2 * i + 1] - pts[2 * i]);
        }
        if rng.random::<f64>().ln() < log_w - log_bound {
            let eps = pts.iter().step_by(2).copied().collect();
            let lambdas = pts.iter().skip(1).step_by(2).copied().collect();
            return Ok(JointSample { eps, lambdas });
        }
    }
}

/// `count` joint-density draws; draw `i` uses [`instance_rng`]`(seed, i)`.
pub fn sample_joint_many(n: usize, nu: f64, count: usize, seed: u64) -> Result<Vec<JointSample>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| sample_joint_density(n, nu, &mut instance_rng(seed, i)))
        .collect()
}

/// Monte-Carlo gap probability with its standard error.
pub fn gap_fraction(samples: &[JointSample], bounds: &GapBounds) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let hits = samples.iter().filter(|s| bounds.is_gap(&s.eps, &s.lambdas)).count();
    let n = samples.len() as f64;
    let p = hits as f64 / n;
    Ok((p, (p * (1.0 - p) / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn cue_single_phase_is_uniform() {
        let mut r = rng(1);
        let xs: Vec<f64> = (0..10_000).map(|_| sample_cue_phases(1, &mut r).unwrap()[0]).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let se = PI / 3f64.sqrt() / (xs.len() as f64).sqrt();
        assert!(mean.abs() < 3.0 * se, "mean {mean}");
        let second = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
        assert!((second - PI * PI / 3.0).abs() < 0.1);
    }

    #[test]
    fn cue_spacings_repel() {
        let mut r = rng(2);
        let n = 20;
        let mut sp = Vec::new();
        for _ in 0..2000 {
            let e = sample_cue_phases(n, &mut r).unwrap();
            for i in 0..n {
                let next = if i + 1 < n { e[i + 1] } else { e[0] + 2.0 * PI };
                sp.push((next - e[i]) * n as f64 / (2.0 * PI));
            }
        }
        let m = sp.iter().sum::<f64>() / sp.len() as f64;
        let v = sp.iter().map(|s| (s - m).powi(2)).sum::<f64>() / sp.len() as f64;
        assert!((m - 1.0).abs() < 1e-12);
        // Poisson spacings have variance 1, CUE about 0.18.
        assert!(v < 0.3, "variance {v}");
    }

    #[test]
    fn overlaps_normalise() {
        let mut r = rng(3);
        assert_eq!(sample_overlaps(1, &mut r).unwrap(), vec![1.0]);
        let w = sample_overlaps(100, &mut r).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let n = 100;
        let raw: Vec<f64> = (0..1000).flat_map(|_| raw_overlaps(n, &mut r)).collect();
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        let se = (1.0 / n as f64) / (raw.len() as f64).sqrt();
        assert!((mean - 0.01).abs() < 3.0 * se);
    }

    #[test]
    fn cot_single_level() {
        for &(e, alpha) in &[(0.3, 0.4), (-1.0, 1.2), (2.0, -0.7)] {
            let inst = RmtInstance::new(vec![e], vec![1.0], 1.0).unwrap();
            let l = solve_secular_cot(&inst, alpha).unwrap()[0];
            let expect = if alpha > 0.0 { e + 2.0 * alpha } else { e + 2.0 * alpha + 2.0 * PI };
            assert!((l - expect).abs() < 1e-13, "{l} vs {expect}");
        }
        let inst = RmtInstance::new(vec![0.0], vec![1.0], 1.0).unwrap();
        assert!(matches!(solve_secular_cot(&inst, 0.0), Err(Error::DegenerateLimit(_))));
    }

    /// Dense grid for sign changes, then secant-type refinement.
    fn grid_roots(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Vec<f64> {
        let m = 200_000;
        let xs: Vec<f64> = (1..m).map(|i| a + (b - a) * i as f64 / m as f64).collect();
        let mut roots = Vec::new();
        for p in xs.windows(2) {
            let (fa, fb) = (f(p[0]), f(p[1]));
            if fa > 0.0 && fb <= 0.0 {
                let (mut x0, mut x1) = (p[0], p[1]);
                for _ in 0..100 {
                    let (f0, f1) = (f(x0), f(x1));
                    if f1 == f0 {
                        break;
                    }
                    let x2 = (x1 - f1 * (x1 - x0) / (f1 - f0)).clamp(p[0], p[1]);
                    x0 = x1;
                    x1 = x2;
                }
                roots.push(x1);
            }
        }
        roots
    }

    #[test]
    fn cot_two_levels_match_grid_scan() {
        let d = 0.8;
        let alpha = 0.6;
        let inst = RmtInstance::new(vec![-d, d], vec![0.5, 0.5], 1.0).unwrap();
        let got = solve_secular_cot(&inst, alpha).unwrap();
        let f = |x: f64| 0.5 / (0.5 * (x + d)).tan() + 0.5 / (0.5 * (x - d)).tan() - 1.0 / alpha.tan();
        let want = grid_roots(f, -d, -d + 2.0 * PI);
        assert_eq!(want.len(), 2);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10, "{g} vs {w}");
        }
    }

    #[test]
    fn cot_near_full_reflection_interlaces() {
        let mut r = rng(4);
        let inst = RmtInstance::sample(30, 1.0, &mut r).unwrap();
        let l = solve_secular_cot(&inst, PI / 2.0 - 1e-9).unwrap();
        for i in 0..29 {
            assert!(l[i] > inst.eps[i] && l[i] < inst.eps[i + 1]);
        }
        assert!(l[29] > inst.eps[29] && l[29] < inst.eps[0] + 2.0 * PI);
    }

    #[test]
    fn rational_single_level() {
        let inst = RmtInstance::new(vec![0.2], vec![1.0], 0.7).unwrap();
        let l = solve_secular_rational(&inst).unwrap();
        assert_eq!(l.len(), 1);
        assert!((l[0] - (0.2 + 2.0 * coupling(0.7))).abs() < 1e-12);
        let inst = RmtInstance::new(vec![0.2], vec![1.0], -0.7).unwrap();
        assert!((solve_secular_rational(&inst).unwrap()[0] - (0.2 - 2.0 * coupling(0.7))).abs() < 1e-12);
    }

    #[test]
    fn rational_infinite_strength_is_nu_free() {
        let mut r = rng(5);
        let mut inst = RmtInstance::sample(12, f64::INFINITY, &mut r).unwrap();
        let l = solve_secular_rational(&inst).unwrap();
        assert_eq!(l.len(), 11);
        for &x in &l {
            let s: f64 = inst.eps.iter().zip(&inst.weights).map(|(e, w)| w / (x - e)).sum();
            let scale: f64 = inst.eps.iter().zip(&inst.weights).map(|(e, w)| (w / (x - e)).abs()).sum();
            assert!(s.abs() < 1e-12 * scale);
        }
        // Large ν approaches the same roots.
        inst.nu = 1e9;
        let big = solve_secular_rational(&inst).unwrap();
        for (a, b) in l.iter().zip(&big) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    /// The two equations differ per instance by the far-level remainder of
    /// `cot(x/2) − 2/x`, which fluctuates like `N^{-1/2}`; the splitting statistics
    /// of the central levels agree.
    #[test]
    fn rational_and_cot_agree_on_central_levels() {
        let n = 201;
        let nu = 0.8;
        let (mut sum_cot, mut sum_rat, mut shift) = (0.0, 0.0, 0.0f64);
        let mut count = 0;
        for seed in 0..100 {
            let inst = RmtInstance::sample(n, nu, &mut rng(seed)).unwrap();
            let cot = solve_secular_cot(&inst, secular_angle(nu)).unwrap();
            let rat = solve_secular_rational(&inst).unwrap();
            for i in n / 3..2 * n / 3 {
                sum_cot += cot[i] - inst.eps[i];
                sum_rat += rat[i] - inst.eps[i];
                shift += (cot[i] - rat[i]).abs();
                count += 1;
            }
        }
        let mls = 2.0 * PI / n as f64;
        assert!((sum_cot - sum_rat).abs() / sum_rat <= 2e-2, "{sum_cot} vs {sum_rat}");
        assert!(shift / count as f64 / mls < 0.1);
    }

    #[test]
    fn splittings_telescope_and_stay_positive() {
        for (solver, instances) in [(SecularSolver::Rational, 1000), (SecularSolver::Cot, 300)] {
            let s = sample_splittings(101, 1.0, instances, 7, solver).unwrap();
            assert_eq!(s.internal.len(), s.external.len());
            assert!(s.internal.iter().chain(&s.external).all(|&x| x >= 0.0));
            let mi = s.internal.iter().sum::<f64>() / s.internal.len() as f64;
            let me = s.external.iter().sum::<f64>() / s.external.len() as f64;
            assert!((mi + me - 1.0).abs() < 0.01, "{solver:?}: {}", mi + me);
        }
    }

    #[test]
    fn splittings_are_reproducible() {
        let a = sample_splittings(41, 0.5, 20, 99, SecularSolver::Rational).unwrap();
        let b = sample_splittings(41, 0.5, 20, 99, SecularSolver::Rational).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn internal_splittings_grow_with_strength() {
        let mut last = 0.0;
        for nu in [0.1, 0.5, 1.0, 2.0] {
            let s = sample_splittings(61, nu, 200, 11, SecularSolver::Rational).unwrap();
            let m = s.internal.iter().sum::<f64>() / s.internal.len() as f64;
            assert!(m > last, "ν = {nu}: {m} ≤ {last}");
            last = m;
        }
    }

    #[test]
    fn joint_density_single_pair() {
        // N = 1: density ∝ exp(−aΔ) on −π < ε < λ < π, so Δ has density
        // ∝ (2π − Δ) e^{−aΔ} on (0, 2π).
        let nu = 0.4;
        let a = 1.0 / (2.0 * PI * nu);
        let samples = sample_joint_many(1, nu, 40_000, 3).unwrap();
        let d: Vec<f64> = samples.iter().map(|s| s.lambdas[0] - s.eps[0]).collect();
        assert!(d.iter().all(|&x| x > 0.0));
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let m = 20_000;
        let h = 2.0 * PI / m as f64;
        let (mut z, mut z1, mut z2) = (0.0, 0.0, 0.0);
        for i in 0..m {
            let x = (i as f64 + 0.5) * h;
            let p = (2.0 * PI - x) * (-a * x).exp();
            z += p;
            z1 += x * p;
            z2 += x * x * p;
        }
        let (want, var) = (z1 / z, z2 / z - (z1 / z).powi(2));
        let se = (var / d.len() as f64).sqrt();
        assert!((mean - want).abs() < 3.0 * se, "{mean} vs {want}");
    }

    #[test]
    fn joint_density_interlaces() {
        for s in sample_joint_many(4, 1.0, 200, 8).unwrap() {
            for i in 0..4 {
                assert!(s.eps[i] < s.lambdas[i]);
                if i + 1 < 4 {
                    assert!(s.lambdas[i] < s.eps[i + 1]);
                }
            }
        }
    }

    #[test]
    fn gap_fraction_of_empty_interval_is_one() {
        let s = sample_joint_many(3, 1.0, 100, 9).unwrap();
        assert_eq!(gap_fraction(&s, &GapBounds::default()).unwrap().0, 1.0);
        let (p, _) = gap_fraction(&s, &GapBounds::symmetric(PI).unwrap()).unwrap();
        assert_eq!(p, 0.0);
    }
}
