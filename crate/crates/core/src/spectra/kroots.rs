//! Roots of `det(1 − S·L(k))`.
//!
//! Every eigenphase of `S·L(k)` increases monotonically with `k`, and the phases sum
//! to `arg det S + 2kΣl`. The number of roots in `(a, b]` is therefore the winding
//! count `[2Σl(b − a) − Σφ(b) + Σφ(a)] / 2π` with phases taken in `[0, 2π)`. The scan
//! evaluates these counts on a grid of step `0.2·π/Σl`, splits intervals by
//! bisection until each holds one root, and refines each root by Illinois
//! regula falsi on the smallest singular value of `1 − S·L(k)`, signed by which side
//! of the root the iterate lies on.

use ndarray_linalg::EigVals;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::phase_sum_positive;
use crate::error::{Error, Result};
use crate::linalg::{singular_values, CMatrix, C64};
use crate::qmap::GlobalScattering;

/// Required accuracy of a root.
pub const ROOT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KRoot {
    pub k: f64,
    pub multiplicity: usize,
    /// Smallest singular value of `1 − S·L(k)` at the root.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KSpectrum {
    pub roots: Vec<KRoot>,
    pub k_min: f64,
    pub k_max: f64,
}

impl KSpectrum {
    /// Roots repeated according to multiplicity.
    pub fn levels(&self) -> Vec<f64> {
        self.roots.iter().flat_map(|r| std::iter::repeat_n(r.k, r.multiplicity)).collect()
    }

    pub fn count(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }
}

/// Evaluation of `S·L(k)` restricted to a square matrix acting on `lengths`.
struct Map {
    s: CMatrix,
    lengths: Vec<f64>,
    /// `Σ` of `lengths`, the rate at which the phase sum grows.
    total: f64,
}

impl Map {
    fn new(s: CMatrix, lengths: Vec<f64>) -> Self {
        let total = lengths.iter().sum();
        Self { s, lengths, total }
    }

    fn full(gs: &GlobalScattering) -> Self {
        let doubled = gs.lengths.iter().chain(gs.lengths.iter()).copied().collect();
        Self::new(gs.s.clone(), doubled)
    }

    fn at(&self, k: f64) -> CMatrix {
        let mut m = self.s.clone();
        for (mut col, &l) in m.columns_mut().into_iter().zip(&self.lengths) {
            let p = C64::from_polar(1.0, k * l);
            col.mapv_inplace(|z| z * p);
        }
        m
    }

    fn phase_sum(&self, k: f64) -> Result<f64> {
        let vals = self.at(k).eigvals().map_err(|e| Error::EigenSolver { k, msg: e.to_string() })?;
        Ok(phase_sum_positive(&vals))
    }

    fn sigma_min(&self, k: f64) -> Result<f64> {
        let mut m = self.at(k).mapv(|z| -z);
        for i in 0..m.nrows() {
            m[[i, i]] += 1.0;
        }
        let s = singular_values(&m).map_err(|e| Error::EigenSolver { k, msg: e.to_string() })?;
        Ok(*s.iter().last().unwrap())
    }

    fn count(&self, a: f64, sa: f64, b: f64, sb: f64) -> usize {
        let c = (self.total * (b - a) - sb + sa) / (2.0 * PI);
        c.round().max(0.0) as usize
    }
}

/// Winding count of roots in `(a, b]`.
pub fn winding_count(gs: &GlobalScattering, a: f64, b: f64) -> Result<usize> {
    let map = Map::full(gs);
    Ok(map.count(a, map.phase_sum(a)?, b, map.phase_sum(b)?))
}

/// All roots in `[k_min, k_max]` with the default grid step `0.2·π/Σl`.
pub fn find_k_spectrum(gs: &GlobalScattering, k_min: f64, k_max: f64) -> Result<KSpectrum> {
    find_k_spectrum_with_step(gs, k_min, k_max, 0.2)
}

/// As [`find_k_spectrum`] with the grid step given as a fraction of `π/Σl`.
pub fn find_k_spectrum_with_step(gs: &GlobalScattering, k_min: f64, k_max: f64, step_fraction: f64) -> Result<KSpectrum> {
    if !(k_min >= 0.0 && k_max > k_min) || !(step_fraction > 0.0) {
        return Err(Error::InvalidParameter(format!("bad window [{k_min}, {k_max}]")));
    }
    let sum_l: f64 = gs.lengths.iter().sum();
    let h = step_fraction * PI / sum_l;
    if gs.cross_block_norm() == 0.0 {
        // Unidirectional: the Γ₋ block repeats the Γ₊ roots, so solve the half-size
        // problem and double every root.
        let map = Map::new(gs.forward_block(), gs.lengths.clone());
        let mut spec = scan(&map, k_min, k_max, h)?;
        for r in &mut spec.roots {
            r.multiplicity *= 2;
        }
        return Ok(spec);
    }
    scan(&Map::full(gs), k_min, k_max, h)
}

fn scan(map: &Map, k_min: f64, k_max: f64, h: f64) -> Result<KSpectrum> {
    let steps = ((k_max - k_min) / h).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| if i == steps { k_max } else { k_min + i as f64 * h }).collect();
    let sums = grid.iter().map(|&k| map.phase_sum(k)).collect::<Result<Vec<_>>>()?;
    let expected = map.count(k_min, sums[0], k_max, sums[steps]);
    let mut roots = Vec::new();
    for i in 0..steps {
        let c = map.count(grid[i], sums[i], grid[i + 1], sums[i + 1]);
        isolate(map, grid[i], sums[i], grid[i + 1], sums[i + 1], c, &mut roots)?;
    }
    // A root sitting exactly on k_min belongs to the window too.
    let s0 = map.sigma_min(k_min)?;
    if s0 <= ROOT_TOL && roots.first().is_none_or(|r: &KRoot| r.k - k_min > ROOT_TOL) {
        roots.insert(0, KRoot { k: k_min, multiplicity: 1, residual: s0 });
    }
    let found: usize = roots.iter().filter(|r| r.k > k_min).map(|r| r.multiplicity).sum();
    if found != expected {
        return Err(Error::IncompleteScan { k_min, k_max, found, expected });
    }
    Ok(KSpectrum { roots, k_min, k_max })
}

fn isolate(map: &Map, a: f64, sa: f64, b: f64, sb: f64, count: usize, out: &mut Vec<KRoot>) -> Result<()> {
    match count {
        0 => Ok(()),
        1 => {
            out.push(refine(map, a, sa, b)?);
            Ok(())
        }
        _ => {
            let width_floor = 1e-11 * b.abs().max(1.0);
            if b - a <= width_floor {
                let k = 0.5 * (a + b);
                let residual = map.sigma_min(k)?;
                if residual > ROOT_TOL {
                    return Err(Error::IncompleteScan { k_min: a, k_max: b, found: 0, expected: count });
                }
                out.push(KRoot { k, multiplicity: count, residual });
                return Ok(());
            }
            let m = 0.5 * (a + b);
            let sm = map.phase_sum(m)?;
            let c1 = map.count(a, sa, m, sm).min(count);
            isolate(map, a, sa, m, sm, c1, out)?;
            isolate(map, m, sm, b, sb, count - c1, out)
        }
    }
}

/// Single root in `(a, b]`.
fn refine(map: &Map, a0: f64, sa0: f64, b0: f64) -> Result<KRoot> {
    let (mut a, mut b) = (a0, b0);
    let mut fa = -map.sigma_min(a)?;
    let mut fb = map.sigma_min(b)?;
    if fb == 0.0 {
        return Ok(KRoot { k: b, multiplicity: 1, residual: 0.0 });
    }
    let mut side = 0i8;
    let mut best = if -fa < fb { (a, -fa) } else { (b, fb) };
    for _ in 0..200 {
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let sx = map.sigma_min(x)?;
        if sx < best.1 {
            best = (x, sx);
        }
        let past = map.count(a0, sa0, x, map.phase_sum(x)?) >= 1;
        if past {
            b = x;
            fb = sx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = x;
            fa = -sx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
        if best.1 <= 1e-13 || b - a <= 1e-12 * b.abs().max(1.0) {
            break;
        }
    }
    if best.1 > ROOT_TOL {
        return Err(Error::IncompleteScan { k_min: a0, k_max: b0, found: 0, expected: 1 });
    }
    Ok(KRoot { k: best.0, multiplicity: 1, residual: best.1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fully_connected_graph, insert_backscatterer, BackscattererPlacement, Edge, UnidirectionalGraph};
    use crate::qmap::{assemble_S, assemble_unperturbed};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_loop_roots() {
        let l = 1.7;
        let g = UnidirectionalGraph::new(
            1,
            vec![Edge { tail: 0, head: 0, length: l }],
            vec![ndarray::array![[C64::new(1.0, 0.0)]]],
        )
        .unwrap();
        let gs = assemble_unperturbed(&g).unwrap();
        let spec = find_k_spectrum(&gs, 0.1, 30.0).unwrap();
        let expect: Vec<f64> = (1..).map(|n| 2.0 * PI * n as f64 / l).take_while(|&k| k <= 30.0).collect();
        assert_eq!(spec.roots.len(), expect.len());
        for (r, e) in spec.roots.iter().zip(&expect) {
            assert_eq!(r.multiplicity, 2);
            assert!((r.k - e).abs() < 1e-9, "{} vs {e}", r.k);
        }
    }

    #[test]
    fn perturbed_roots_are_accurate_and_counted() {
        let g = fully_connected_graph(5, &mut ChaCha8Rng::seed_from_u64(12)).unwrap();
        let pg = insert_backscatterer(&g, BackscattererPlacement::from_strength(3, 1.0).unwrap()).unwrap();
        let gs = assemble_S(&pg).unwrap();
        let spec = find_k_spectrum(&gs, 0.0, 40.0).unwrap();
        let w = winding_count(&gs, 0.0, 40.0).unwrap();
        assert_eq!(spec.count(), w);
        for r in &spec.roots {
            assert!(r.residual <= ROOT_TOL);
        }
        assert!(spec.roots.windows(2).all(|p| p[1].k > p[0].k));
        // Weyl: N(k) ≈ 2Σl·k/2π with bounded fluctuation.
        let sum_l: f64 = gs.lengths.iter().sum();
        let weyl = 2.0 * sum_l * 40.0 / (2.0 * PI);
        assert!((spec.count() as f64 - weyl).abs() < 2.0 * gs.dim() as f64);
    }

    #[test]
    fn transparent_insertion_keeps_spectrum() {
        let g = fully_connected_graph(5, &mut ChaCha8Rng::seed_from_u64(13)).unwrap();
        let gs0 = assemble_unperturbed(&g).unwrap();
        let pg = insert_backscatterer(&g, BackscattererPlacement::new(2, 0.0, 1.1, 0.0).unwrap()).unwrap();
        let gs1 = assemble_S(&pg).unwrap();
        let a = find_k_spectrum(&gs0, 1.0, 25.0).unwrap();
        let b = find_k_spectrum(&gs1, 1.0, 25.0).unwrap();
        assert_eq!(a.roots.len(), b.roots.len());
        for (x, y) in a.roots.iter().zip(&b.roots) {
            assert!((x.k - y.k).abs() < 2e-9);
        }
    }
}
