//! Global scattering matrix, propagation and the rank-one structure of a
//! single backscatterer.
//!
//! Directed edge `j < B'` is the `Γ₊` copy of undirected edge `j`, and `j + B'` its
//! `Γ₋` reversal. `S[out, in]` maps the amplitude arriving along `in` onto the
//! amplitude leaving along `out`; with this indexing the unperturbed `S` is
//! block-diagonal `[[𝒮, 0], [0, 𝒮ᵀ]]`.

use ndarray::{s, Array1};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::graph::{backscatter_matrix, PerturbedGraph, UnidirectionalGraph};
use crate::linalg::{cis, max_abs_diff, unitarity_defect, CMatrix, C64};

/// Tolerance on the unitarity of assembled matrices.
pub const ASSEMBLY_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct GlobalScattering {
    /// `2B' × 2B'` scattering matrix.
    pub s: CMatrix,
    /// The `B'` undirected lengths after splitting.
    pub lengths: Vec<f64>,
}

impl GlobalScattering {
    /// Undirected edge count `B'`.
    pub fn edge_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.lengths.len()
    }

    pub fn plus(&self, j: usize) -> usize {
        j
    }

    pub fn minus(&self, j: usize) -> usize {
        j + self.lengths.len()
    }

    /// Diagonal of `L(k)`.
    pub fn propagation(&self, k: f64) -> Array1<C64> {
        propagation_diagonal(&self.lengths, k)
    }

    /// `S·L(k)`.
    pub fn quantum_map(&self, k: f64) -> CMatrix {
        let l = self.propagation(k);
        let mut m = self.s.clone();
        for (mut col, &p) in m.columns_mut().into_iter().zip(l.iter()) {
            col.mapv_inplace(|z| z * p);
        }
        m
    }

    /// The `Γ₊ → Γ₊` block `𝒮`.
    pub fn forward_block(&self) -> CMatrix {
        let b = self.edge_count();
        CMatrix::from_shape_fn((b, b), |(i, j)| self.s[[i, j]])
    }

    /// `𝒮·L₊(k)`, the quantum map restricted to `Γ₊`.
    pub fn forward_map(&self, k: f64) -> CMatrix {
        let b = self.edge_count();
        let mut m = self.forward_block();
        for (j, mut col) in m.columns_mut().into_iter().enumerate() {
            let p = cis(k * self.lengths[j]);
            col.mapv_inplace(|z| z * p);
        }
        debug_assert_eq!(m.dim(), (b, b));
        m
    }

    /// Largest entry of the blocks coupling `Γ₊` and `Γ₋`.
    pub fn cross_block_norm(&self) -> f64 {
        let b = self.edge_count();
        let a = self.s.slice(s![..b, b..]).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let c = self.s.slice(s![b.., ..b]).iter().map(|z| z.norm()).fold(0.0, f64::max);
        a.max(c)
    }

    /// Max-entry distance between the `Γ₋` block and the transpose of the `Γ₊` block.
    pub fn transpose_defect(&self) -> f64 {
        let b = self.edge_count();
        let fwd = self.forward_block();
        let bwd = self.s.slice(s![b.., b..]).to_owned();
        max_abs_diff(&bwd, &fwd.t().to_owned())
    }
}

/// `diag(e^{ik l})` over the `2B'` directed edges; each length appears twice.
pub fn propagation_diagonal(lengths: &[f64], k: f64) -> Array1<C64> {
    lengths.iter().chain(lengths.iter()).map(|&l| cis(k * l)).collect()
}

/// Dense form of [`propagation_diagonal`].
pub fn propagation_matrix(lengths: &[f64], k: f64) -> CMatrix {
    CMatrix::from_diag(&propagation_diagonal(lengths, k))
}

/// One end of a local scatterer: the directed edge arriving through it and the one
/// leaving through it.
#[derive(Clone, Copy, Debug)]
struct End {
    inc: usize,
    out: usize,
}

struct LocalScatterer {
    ends: Vec<End>,
    sigma: CMatrix,
}

fn unidirectional_local(
    incoming: &[usize],
    outgoing: &[usize],
    u: &CMatrix,
    b: usize,
) -> LocalScatterer {
    // Ends where Γ₊ departs come first, then ends where Γ₊ arrives, so that the
    // local matrix is [[0, U], [Uᵀ, 0]].
    let mut ends: Vec<End> = outgoing.iter().map(|&m| End { inc: m + b, out: m }).collect();
    ends.extend(incoming.iter().map(|&j| End { inc: j, out: j + b }));
    let d = incoming.len();
    let mut sigma = CMatrix::zeros((2 * d, 2 * d));
    sigma.slice_mut(s![..d, d..]).assign(u);
    sigma.slice_mut(s![d.., ..d]).assign(&u.t());
    LocalScatterer { ends, sigma }
}

fn assemble(bp: usize, locals: &[LocalScatterer]) -> Result<CMatrix> {
    let n = 2 * bp;
    let mut s = CMatrix::zeros((n, n));
    let mut seen_in = vec![false; n];
    let mut seen_out = vec![false; n];
    for loc in locals {
        for e in &loc.ends {
            if e.inc >= n || e.out >= n {
                return Err(Error::Assembly(format!("directed edge index out of range in {e:?}")));
            }
            if std::mem::replace(&mut seen_in[e.inc], true) {
                return Err(Error::Assembly(format!("directed edge {} enters two vertices", e.inc)));
            }
            if std::mem::replace(&mut seen_out[e.out], true) {
                return Err(Error::Assembly(format!("directed edge {} leaves two vertices", e.out)));
            }
        }
        for (a, ea) in loc.ends.iter().enumerate() {
            for (c, ec) in loc.ends.iter().enumerate() {
                s[[ea.out, ec.inc]] = loc.sigma[[a, c]];
            }
        }
    }
    if seen_in.iter().chain(&seen_out).any(|x| !x) {
        return Err(Error::Assembly("some directed edge is not attached at both ends".into()));
    }
    let defect = unitarity_defect(&s)?;
    if defect > ASSEMBLY_TOL {
        return Err(Error::Assembly(format!("assembled S has unitarity defect {defect:.3e}")));
    }
    Ok(s)
}

/// Local scatterers of a perturbed graph on its split layout.
fn locals_of(pg: &PerturbedGraph) -> (Vec<f64>, Vec<LocalScatterer>) {
    let base = &pg.base;
    let b = base.edge_count();
    let bp = pg.split_edge_count();
    let layout = pg.split_layout();
    // A host edge now reaches its old head through the appended segment.
    let mut last_segment: Vec<usize> = (0..b).collect();
    for (i, p) in pg.scatterers.iter().enumerate() {
        last_segment[p.edge] = b + i;
    }
    let mut locals = Vec::with_capacity(layout.vertex_count);
    for v in 0..base.vertex_count() {
        let inc: Vec<usize> = base.incoming(v).iter().map(|&j| last_segment[j]).collect();
        locals.push(unidirectional_local(&inc, base.outgoing(v), &base.blocks()[v], bp));
    }
    for (i, p) in pg.scatterers.iter().enumerate() {
        let h = p.edge;
        let hp = b + i;
        // The end on the appended segment comes first; with this order the phase β
        // enters ψ as e^{±iβ/2} on the incoming Γ₊ / Γ₋ directions.
        let ends = vec![End { inc: hp + bp, out: hp }, End { inc: h, out: h + bp }];
        locals.push(LocalScatterer { ends, sigma: backscatter_matrix(p.alpha, p.beta, p.gamma) });
    }
    let lengths = layout.edges.iter().map(|e| e.length).collect();
    (lengths, locals)
}

/// Assemble `S` for a graph with any number of scatterers.
#[allow(non_snake_case)]
pub fn assemble_S(pg: &PerturbedGraph) -> Result<GlobalScattering> {
    let (lengths, locals) = locals_of(pg);
    let s = assemble(lengths.len(), &locals)?;
    Ok(GlobalScattering { s, lengths })
}

/// Assemble `S` for an unperturbed graph.
pub fn assemble_unperturbed(g: &UnidirectionalGraph) -> Result<GlobalScattering> {
    assemble_S(&PerturbedGraph::unperturbed(g.clone()))
}

/// `S = S₀·exp(2iα|ψ⟩⟨ψ|)` for a single scatterer.
#[derive(Clone, Debug)]
pub struct RankOneData {
    pub s0: CMatrix,
    pub psi: Array1<C64>,
    pub alpha: f64,
    /// Directed edge entering the scatterer along `Γ₊`.
    pub in_plus: usize,
    /// Directed edge entering the scatterer along `Γ₋`.
    pub in_minus: usize,
}

impl RankOneData {
    /// `S₀ (I + (e^{2iα} − 1)|ψ⟩⟨ψ|)`.
    pub fn reconstruct(&self) -> CMatrix {
        let c = cis(2.0 * self.alpha) - 1.0;
        let s0psi = self.s0.dot(&self.psi);
        let mut out = self.s0.clone();
        for ((i, j), z) in out.indexed_iter_mut() {
            *z += c * s0psi[i] * self.psi[j].conj();
        }
        out
    }
}

pub fn rank_one_decomposition(pg: &PerturbedGraph) -> Result<RankOneData> {
    if pg.rank() != 1 {
        return Err(Error::RankMismatch { expected: 1, found: pg.rank() });
    }
    let p = pg.scatterers[0];
    let s0 = assemble_S(&pg.transparent())?;
    let b = pg.base.edge_count();
    let bp = s0.edge_count();
    let in_plus = p.edge;
    let in_minus = b + bp;
    let mut psi = Array1::zeros(2 * bp);
    psi[in_plus] = cis(p.beta / 2.0) * FRAC_1_SQRT_2;
    psi[in_minus] = cis(-p.beta / 2.0) * FRAC_1_SQRT_2;
    Ok(RankOneData { s0: s0.s, psi, alpha: p.alpha, in_plus, in_minus })
}

/// Degree-4 Neumann matrix `½J − I`.
pub fn neumann_sigma() -> CMatrix {
    CMatrix::from_shape_fn((4, 4), |(i, j)| C64::new(if i == j { -0.5 } else { 0.5 }, 0.0))
}

fn check_degree_four(g: &UnidirectionalGraph, v: usize) -> Result<()> {
    if v >= g.vertex_count() {
        return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
    }
    if g.degree(v) != 4 {
        return Err(Error::WrongDegree { vertex: v, degree: g.degree(v), expected: 4 });
    }
    Ok(())
}

/// `S` with the vertex `v` (four edge-ends) given Neumann conditions.
pub fn neumann_replacement(g: &UnidirectionalGraph, v: usize) -> Result<GlobalScattering> {
    check_degree_four(g, v)?;
    let pg = PerturbedGraph::unperturbed(g.clone());
    let (lengths, mut locals) = locals_of(&pg);
    let b = g.edge_count();
    let inc = g.incoming(v);
    let out = g.outgoing(v);
    let ends = vec![
        End { inc: inc[0], out: inc[0] + b },
        End { inc: out[0] + b, out: out[0] },
        End { inc: inc[1], out: inc[1] + b },
        End { inc: out[1] + b, out: out[1] },
    ];
    locals[v] = LocalScatterer { ends, sigma: neumann_sigma() };
    let s = assemble(lengths.len(), &locals)?;
    Ok(GlobalScattering { s, lengths })
}

/// Rank-one form of the Neumann vertex: `S_N = S₀(1 − 2|ψ⟩⟨ψ|)`, i.e. `α = π/2`,
/// where `S₀` is the unidirectional graph with `U_v` replaced by the identity
/// pairing of incoming and outgoing `Γ₊` edges.
pub fn neumann_rank_one(g: &UnidirectionalGraph, v: usize) -> Result<(UnidirectionalGraph, RankOneData)> {
    check_degree_four(g, v)?;
    let reference = g.with_block(v, CMatrix::eye(2))?;
    let s0 = assemble_unperturbed(&reference)?;
    let b = g.edge_count();
    let inc = g.incoming(v);
    let out = g.outgoing(v);
    let mut psi = Array1::zeros(2 * b);
    psi[inc[0]] += C64::new(0.5, 0.0);
    psi[out[0] + b] += C64::new(0.5, 0.0);
    psi[inc[1]] -= C64::new(0.5, 0.0);
    psi[out[1] + b] -= C64::new(0.5, 0.0);
    let data = RankOneData { s0: s0.s, psi, alpha: PI / 2.0, in_plus: inc[0], in_minus: out[0] + b };
    Ok((reference, data))
}
