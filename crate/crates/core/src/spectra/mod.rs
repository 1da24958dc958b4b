//! Eigenphases of the quantum map, `k`-spectra, overlap amplitudes and the
//! internal/external splitting classification.

mod kroots;

pub use kroots::{find_k_spectrum, find_k_spectrum_with_step, winding_count, KRoot, KSpectrum};

use ndarray::{Array1, Axis};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{eig, eigvals, wrap_phase, CMatrix, C64};
use crate::qmap::GlobalScattering;

/// Eigenvalue moduli must be within this distance of 1.
pub const MODULUS_TOL: f64 = 1e-10;
/// Pinned/moved matching tolerance.
pub const MATCH_TOL: f64 = 1e-8;
/// Phases closer than this are treated as one degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct EigenphaseSet {
    pub k: f64,
    /// Sorted in `(−π, π]`.
    pub phases: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `phases`.
    pub vectors: Option<CMatrix>,
}

/// Circular distance between two phases.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// Eigenphases (and optionally eigenvectors) of a unitary matrix.
pub fn unitary_eigenphases(m: &CMatrix, with_vectors: bool, k: f64) -> Result<EigenphaseSet> {
    let (vals, vecs) = if with_vectors {
        let (v, w) = eig(m).map_err(|e| Error::EigenSolver { k, msg: e.to_string() })?;
        (v, Some(w))
    } else {
        (eigvals(m).map_err(|e| Error::EigenSolver { k, msg: e.to_string() })?, None)
    };
    for z in vals.iter() {
        if (z.norm() - 1.0).abs() > MODULUS_TOL {
            return Err(Error::EigenSolver { k, msg: format!("eigenvalue modulus {} off the unit circle", z.norm()) });
        }
    }
    // Eigenvalues are projected radially onto the unit circle.
    let raw: Vec<f64> = vals.iter().map(|z| wrap_phase(z.arg())).collect();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
    let phases: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let vectors = vecs.map(|w| {
        let mut sorted = w.select(Axis(1), &order);
        orthonormalise_clusters(&phases, &mut sorted);
        sorted
    });
    Ok(EigenphaseSet { k, phases, vectors })
}

/// Gram–Schmidt inside each cluster of (circularly) degenerate phases.
fn orthonormalise_clusters(phases: &[f64], vecs: &mut CMatrix) {
    let n = phases.len();
    if n == 0 {
        return;
    }
    // Start clusters at a gap so that the wrap-around at ±π is handled.
    let start = (0..n)
        .find(|&i| circular_distance(phases[i], phases[(i + n - 1) % n]) > DEGENERACY_TOL)
        .unwrap_or(0);
    let mut i = 0;
    while i < n {
        let mut cluster = vec![(start + i) % n];
        while i + cluster.len() < n {
            let last = *cluster.last().unwrap();
            let next = (start + i + cluster.len()) % n;
            if circular_distance(phases[last], phases[next]) > DEGENERACY_TOL {
                break;
            }
            cluster.push(next);
        }
        for (a, &ca) in cluster.iter().enumerate() {
            for &cb in &cluster[..a] {
                let proj: C64 = vecs.column(cb).iter().zip(vecs.column(ca).iter()).map(|(x, y)| x.conj() * y).sum();
                let vb = vecs.column(cb).to_owned();
                let mut col = vecs.column_mut(ca);
                col.zip_mut_with(&vb, |y, x| *y -= proj * x);
            }
            let norm = vecs.column(ca).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            vecs.column_mut(ca).mapv_inplace(|z| z / norm);
        }
        i += cluster.len();
    }
}

/// Eigenphases of `S·L(k)`.
pub fn quantum_map_eigenphases(gs: &GlobalScattering, k: f64, with_vectors: bool) -> Result<EigenphaseSet> {
    unitary_eigenphases(&gs.quantum_map(k), with_vectors, k)
}

/// The `B'` distinct unperturbed eigenphases, from the `Γ₊` block alone.
pub fn forward_eigenphases(gs: &GlobalScattering, k: f64, with_vectors: bool) -> Result<EigenphaseSet> {
    if gs.cross_block_norm() != 0.0 {
        return Err(Error::InvalidParameter("forward eigenphases need a block-diagonal S".into()));
    }
    unitary_eigenphases(&gs.forward_map(k), with_vectors, k)
}

/// `|A_m|² = |v_m(in₊)|² + |v_m(in₋)|²` for every eigenvector column.
pub fn amplitude_overlaps(vectors: &CMatrix, in_plus: usize, in_minus: Option<usize>) -> Vec<f64> {
    vectors
        .columns()
        .into_iter()
        .map(|v| v[in_plus].norm_sqr() + in_minus.map_or(0.0, |i| v[i].norm_sqr()))
        .collect()
}

/// Reduce a doubly degenerate spectrum to its distinct levels; each level gets the
/// mean of its pair's overlaps, so that a `Γ₊`/`Γ₋` split of the pair gives the
/// stated sum for either member.
pub fn reduce_degenerate_pairs(phases: &[f64], overlaps: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = phases.len();
    if n % 2 == 1 || overlaps.len() != n {
        return Err(Error::InvalidDimension("degenerate pairs need an even, matched count".into()));
    }
    for offset in [0, 1] {
        let paired = (0..n / 2).all(|p| {
            let (a, b) = ((2 * p + offset) % n, (2 * p + 1 + offset) % n);
            circular_distance(phases[a], phases[b]) <= MATCH_TOL
        });
        if paired {
            let levels = (0..n / 2).map(|p| phases[(2 * p + offset) % n]).collect();
            let amps = (0..n / 2)
                .map(|p| 0.5 * (overlaps[(2 * p + offset) % n] + overlaps[(2 * p + 1 + offset) % n]))
                .collect();
            return Ok((levels, amps));
        }
    }
    Err(Error::Classification("spectrum is not doubly degenerate".into()))
}

/// Overlaps `|v_m(j)|²` of the `Γ₊` eigenvectors of an unperturbed graph with edge `j`.
pub fn edge_overlaps(gs: &GlobalScattering, k: f64, edges: &[usize]) -> Result<Vec<Vec<f64>>> {
    let set = forward_eigenphases(gs, k, true)?;
    let v = set.vectors.expect("vectors requested");
    Ok(edges.iter().map(|&j| amplitude_overlaps(&v, j, None)).collect())
}

/// Internal and external splittings in units of the mean `ε` spacing.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ClassifiedSplittings {
    pub internal: Vec<f64>,
    pub external: Vec<f64>,
    pub mls_used: f64,
    /// Pinned levels (sorted, in the original orientation).
    pub pinned: Vec<f64>,
    /// Moved levels (sorted, in the original orientation).
    pub moved: Vec<f64>,
}

/// Classify perturbed eigenphases against the distinct unperturbed levels `eps`.
///
/// `direction` is the sign in which the moved phases are displaced from their
/// pinned partners (`+1` for `α > 0`, `−1` for `α < 0`); the internal splitting is
/// measured from each pinned level in that direction, the external one onwards to
/// the next pinned level.
pub fn classify_splittings(perturbed: &[f64], eps: &[f64], direction: f64) -> Result<ClassifiedSplittings> {
    let n = eps.len();
    if n == 0 || perturbed.len() != 2 * n {
        return Err(Error::Classification(format!(
            "expected 2×{n} perturbed phases, got {}",
            perturbed.len()
        )));
    }
    let flip = |x: f64| if direction < 0.0 { wrap_phase(-x) } else { x };
    let mut e: Vec<f64> = eps.iter().map(|&x| flip(x)).collect();
    let mut p: Vec<f64> = perturbed.iter().map(|&x| flip(x)).collect();
    e.sort_by(f64::total_cmp);
    p.sort_by(f64::total_cmp);

    let nearest = |x: f64| -> (usize, f64) {
        let i = e.partition_point(|&y| y < x);
        [i % n, (i + n - 1) % n]
            .iter()
            .map(|&j| (j, circular_distance(x, e[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    };
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut moved = Vec::with_capacity(n);
    for (idx, &x) in p.iter().enumerate() {
        let (j, d) = nearest(x);
        if d <= MATCH_TOL {
            if let Some(prev) = owner[j] {
                return Err(Error::Classification(format!(
                    "ambiguous match: phases {} and {} both within {MATCH_TOL:e} of ε = {}",
                    p[prev], x, e[j]
                )));
            }
            owner[j] = Some(idx);
        } else {
            moved.push(x);
        }
    }
    if let Some(j) = owner.iter().position(|o| o.is_none()) {
        return Err(Error::Classification(format!("no perturbed phase matches ε = {}", e[j])));
    }
    if moved.len() != n {
        return Err(Error::Classification(format!("{} moved phases for {n} pinned levels", moved.len())));
    }

    let two_pi = 2.0 * PI;
    let mls = two_pi / n as f64;
    let mut used = vec![false; n];
    let mut internal = Vec::with_capacity(n);
    let mut external = Vec::with_capacity(n);
    for i in 0..n {
        let start = e[i] - MATCH_TOL;
        let j = moved.partition_point(|&y| y < start) % n;
        if std::mem::replace(&mut used[j], true) {
            return Err(Error::Classification(format!("interlacing violated after ε = {}", e[i])));
        }
        let d_in = (moved[j] - start).rem_euclid(two_pi) - MATCH_TOL;
        let spacing = if n == 1 { two_pi } else { (e[(i + 1) % n] - e[i]).rem_euclid(two_pi) };
        internal.push(d_in / mls);
        external.push((spacing - d_in) / mls);
    }
    let unflip = |v: Vec<f64>| {
        let mut v: Vec<f64> = v.into_iter().map(flip).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    Ok(ClassifiedSplittings { internal, external, mls_used: mls, pinned: unflip(e), moved: unflip(moved) })
}

/// Same classification on the real line (for `k`-spectra). `perturbed` may contain
/// up to one extra or missing moved level at the window ends; only pinned levels
/// with a following pinned level inside the window contribute.
pub fn classify_splittings_linear(perturbed: &[f64], eps: &[f64], direction: f64) -> Result<ClassifiedSplittings> {
    if eps.len() < 2 {
        return Err(Error::Classification("need at least two pinned levels".into()));
    }
    let flip = |x: f64| if direction < 0.0 { -x } else { x };
    let mut e: Vec<f64> = eps.iter().map(|&x| flip(x)).collect();
    let mut p: Vec<f64> = perturbed.iter().map(|&x| flip(x)).collect();
    e.sort_by(f64::total_cmp);
    p.sort_by(f64::total_cmp);
    let mut matched = vec![false; e.len()];
    let mut moved = Vec::new();
    for &x in &p {
        let i = e.partition_point(|&y| y < x);
        let cand = [i.checked_sub(1), (i < e.len()).then_some(i)];
        let best = cand
            .iter()
            .flatten()
            .map(|&j| (j, (x - e[j]).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((j, d)) if d <= MATCH_TOL => {
                if std::mem::replace(&mut matched[j], true) {
                    return Err(Error::Classification(format!("ambiguous match near k = {}", e[j])));
                }
            }
            _ => moved.push(x),
        }
    }
    let n = e.len();
    let mls = (e[n - 1] - e[0]) / (n - 1) as f64;
    let mut internal = Vec::with_capacity(n - 1);
    let mut external = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        if !matched[i] || !matched[i + 1] {
            return Err(Error::Classification(format!("pinned level {} missing from perturbed spectrum", e[i])));
        }
        let lo = moved.partition_point(|&y| y < e[i] - MATCH_TOL);
        let hi = moved.partition_point(|&y| y < e[i + 1] - MATCH_TOL);
        if hi - lo != 1 {
            return Err(Error::Classification(format!(
                "{} moved levels between pinned {} and {}",
                hi - lo,
                e[i],
                e[i + 1]
            )));
        }
        let d_in = moved[lo] - e[i];
        internal.push(d_in / mls);
        external.push((e[i + 1] - e[i] - d_in) / mls);
    }
    let unflip = |v: Vec<f64>| {
        let mut v: Vec<f64> = v.into_iter().map(flip).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    Ok(ClassifiedSplittings { internal, external, mls_used: mls, pinned: unflip(e), moved: unflip(moved) })
}

/// Number of perturbed phases within [`MATCH_TOL`] of some unperturbed level.
pub fn count_pinned(perturbed: &[f64], eps: &[f64]) -> usize {
    perturbed
        .iter()
        .filter(|&&x| eps.iter().any(|&y| circular_distance(x, y) <= MATCH_TOL))
        .count()
}

/// Rescale `values` by the mean spacing of the sorted `reference` sequence.
pub fn unfold(values: &[f64], reference: &[f64]) -> Result<Vec<f64>> {
    if reference.len() < 2 {
        return Err(Error::InvalidDimension("unfolding needs at least two reference levels".into()));
    }
    let (lo, hi) = reference
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let mls = (hi - lo) / (reference.len() - 1) as f64;
    if mls <= 0.0 {
        return Err(Error::Numerical("reference levels have zero spread".into()));
    }
    Ok(values.iter().map(|v| v / mls).collect())
}

/// Nearest-neighbour spacings of a full circular spectrum of `n` phases, in units of
/// `2π/n`.
pub fn circular_spacings(phases: &[f64]) -> Vec<f64> {
    let n = phases.len();
    let mut p = phases.to_vec();
    p.sort_by(f64::total_cmp);
    let mls = 2.0 * PI / n as f64;
    (0..n).map(|i| (p[(i + 1) % n] - p[i]).rem_euclid(2.0 * PI) / mls).collect()
}

/// Sum of phases mapped to `[0, 2π)`.
pub(crate) fn phase_sum_positive(vals: &Array1<C64>) -> f64 {
    vals.iter().map(|z| z.arg().rem_euclid(2.0 * PI)).sum()
}
