//! Random and structured graph constructors.

use ndarray::{Array2, Axis};
use ndarray_linalg::QR;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use super::{cycles::is_strongly_connected, Edge, UnidirectionalGraph, UNITARY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{unitarity_defect, CMatrix, C64};

/// Haar-random `n×n` unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("Haar unitary of size 0".into()));
    }
    let z = Array2::from_shape_simple_fn((n, n), || {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * FRAC_1_SQRT_2
    });
    let (mut q, r) = z.qr()?;
    for (j, mut col) in q.axis_iter_mut(Axis(1)).enumerate() {
        let d = r[[j, j]];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        col.mapv_inplace(|x| x * ph);
    }
    Ok(q)
}

/// The local vertex matrix `[[0, U], [Uᵀ, 0]]`.
pub fn build_vertex_scatterer(u: &CMatrix) -> Result<CMatrix> {
    let (r, c) = u.dim();
    if r != c {
        return Err(Error::InvalidDimension(format!("vertex block is {r}×{c}")));
    }
    let defect = unitarity_defect(u)?;
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { defect, tol: UNITARY_TOL });
    }
    let d = r;
    let mut s = CMatrix::zeros((2 * d, 2 * d));
    for a in 0..d {
        for b in 0..d {
            s[[a, d + b]] = u[[a, b]];
            s[[d + a, b]] = u[[b, a]];
        }
    }
    Ok(s)
}

/// `B` lengths uniform on `(0, 1)`, rescaled to unit mean.
pub fn sample_edge_lengths<R: Rng + ?Sized>(b: usize, rng: &mut R) -> Result<Vec<f64>> {
    if b == 0 {
        return Err(Error::InvalidDimension("no edges".into()));
    }
    let mut out: Vec<f64> = (0..b)
        .map(|_| loop {
            let x: f64 = rng.random();
            if x > 0.0 {
                break x;
            }
        })
        .collect();
    let mean = out.iter().sum::<f64>() / b as f64;
    out.iter_mut().for_each(|x| *x /= mean);
    Ok(out)
}

/// Complete graph on an odd number of vertices, oriented along an Euler circuit.
///
/// Randomness is consumed as: edge lengths, then one Haar block per vertex.
pub fn fully_connected_graph<R: Rng + ?Sized>(v: usize, rng: &mut R) -> Result<UnidirectionalGraph> {
    if v < 3 {
        return Err(Error::InvalidParameter(format!("fully connected graph needs V ≥ 3, got {v}")));
    }
    if v % 2 == 0 {
        return Err(Error::Parity(format!(
            "V = {v} gives vertex degree {}, but a unidirectional splitting needs an even number of edges per vertex",
            v - 1
        )));
    }
    let mut pairs = Vec::with_capacity(v * (v - 1) / 2);
    for i in 0..v {
        for j in i + 1..v {
            pairs.push((i, j));
        }
    }
    let oriented = euler_orientation(v, &pairs);
    let lengths = sample_edge_lengths(pairs.len(), rng)?;
    let edges = oriented
        .iter()
        .zip(&lengths)
        .map(|(&(tail, head), &length)| Edge { tail, head, length })
        .collect();
    let d = (v - 1) / 2;
    let blocks = (0..v).map(|_| haar_unitary(d, rng)).collect::<Result<Vec<_>>>()?;
    UnidirectionalGraph::new(v, edges, blocks)
}

/// Orient every undirected edge along an Euler circuit (Hierholzer). Requires all
/// degrees even and a connected edge set.
fn euler_orientation(v: usize, pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); v];
    for (e, &(a, b)) in pairs.iter().enumerate() {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    let mut used = vec![false; pairs.len()];
    let mut next = vec![0usize; v];
    let mut orient = pairs.to_vec();
    let mut stack = vec![0usize];
    while let Some(&x) = stack.last() {
        let mut advanced = false;
        while next[x] < adj[x].len() {
            let (y, e) = adj[x][next[x]];
            next[x] += 1;
            if !used[e] {
                used[e] = true;
                orient[e] = (x, y);
                stack.push(y);
                advanced = true;
                break;
            }
        }
        if !advanced {
            stack.pop();
        }
    }
    orient
}

/// Choice of the 2×2 blocks on a De Bruijn graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BlockChoice {
    /// The discrete Fourier matrix `(1/√2)[[1, 1], [1, −1]]` at every vertex.
    #[default]
    FixedDefault,
    /// One Haar 2×2 block shared by all vertices.
    HaarIdentical,
    /// An independent Haar block per vertex.
    HaarIndependent,
}

pub fn dft2() -> CMatrix {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    ndarray::array![[h, h], [h, -h]]
}

/// Binary De Bruijn graph with `2^p` vertices.
///
/// Edge `w` (a word of `p+1` bits) runs from `w >> 1` to `w mod 2^p`, so vertex `v`
/// leaves along `2v, 2v+1` and is entered along `v, v + 2^p`. The block `U[c, b]`
/// couples the incoming edge with prepended bit `b` to the outgoing edge with
/// appended bit `c`. Randomness: lengths first, then blocks.
pub fn de_bruijn_graph<R: Rng + ?Sized>(
    p: u32,
    choice: BlockChoice,
    rng: &mut R,
) -> Result<UnidirectionalGraph> {
    if !(2..=20).contains(&p) {
        return Err(Error::InvalidParameter(format!("De Bruijn order p = {p} outside [2, 20]")));
    }
    let nv = 1usize << p;
    let ne = nv << 1;
    let lengths = sample_edge_lengths(ne, rng)?;
    let edges = (0..ne)
        .map(|w| Edge { tail: w >> 1, head: w & (nv - 1), length: lengths[w] })
        .collect();
    let blocks = match choice {
        BlockChoice::FixedDefault => vec![dft2(); nv],
        BlockChoice::HaarIdentical => vec![haar_unitary(2, rng)?; nv],
        BlockChoice::HaarIndependent => {
            (0..nv).map(|_| haar_unitary(2, rng)).collect::<Result<Vec<_>>>()?
        }
    };
    UnidirectionalGraph::new(nv, edges, blocks)
}

/// Random directed multigraph with `d/2` incoming and outgoing `Γ₊` edges per vertex.
///
/// Out-stubs are paired with a shuffled list of in-stubs; configurations whose `Γ₊`
/// is not strongly connected are redrawn (at most 1000 times). Self-loops and
/// parallel edges are allowed.
pub fn random_regular_unidirectional<R: Rng + ?Sized>(
    v: usize,
    d: usize,
    rng: &mut R,
) -> Result<UnidirectionalGraph> {
    if v == 0 || d < 2 || d % 2 == 1 {
        return Err(Error::InvalidParameter(format!("need V ≥ 1 and even d ≥ 2, got V={v}, d={d}")));
    }
    let h = d / 2;
    let tails: Vec<usize> = (0..v).flat_map(|x| std::iter::repeat_n(x, h)).collect();
    let mut heads = tails.clone();
    for _ in 0..1000 {
        heads.shuffle(rng);
        let pairs: Vec<(usize, usize)> = tails.iter().copied().zip(heads.iter().copied()).collect();
        if is_strongly_connected(v, &pairs) {
            let lengths = sample_edge_lengths(pairs.len(), rng)?;
            let edges = pairs
                .iter()
                .zip(&lengths)
                .map(|(&(tail, head), &length)| Edge { tail, head, length })
                .collect();
            let blocks = (0..v).map(|_| haar_unitary(h, rng)).collect::<Result<Vec<_>>>()?;
            return UnidirectionalGraph::new(v, edges, blocks);
        }
    }
    Err(Error::Generation(format!(
        "no strongly connected pairing for V={v}, d={d} after 1000 attempts"
    )))
}
