//! Unidirectional quantum graphs and backscattering vertices.
//!
//! A graph is stored through its `Γ₊` half: every undirected edge `j` is a directed
//! edge `tail → head`, and its `Γ₋` partner is the reversal. At each vertex the
//! unitary block `U_v` maps incoming `Γ₊` amplitudes (columns, ordered by edge id)
//! onto outgoing `Γ₊` amplitudes (rows, ordered by edge id).

mod build;
mod cycles;
mod io;

pub use build::{
    build_vertex_scatterer, de_bruijn_graph, dft2, fully_connected_graph, haar_unitary,
    random_regular_unidirectional, sample_edge_lengths, BlockChoice,
};
pub use cycles::{generic_edges, is_strongly_connected, short_cycle_classification};
pub use io::{GraphFile, FORMAT_TAG};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{cis, unitarity_defect, CMatrix, C64, I};
use crate::strength;

/// Tolerance for unitarity of local blocks.
pub const UNITARY_TOL: f64 = 1e-12;

/// A `Γ₊` directed edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub length: f64,
}

#[derive(Clone, Debug)]
pub struct UnidirectionalGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    blocks: Vec<CMatrix>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
}

impl UnidirectionalGraph {
    /// Validates degrees, block shapes, unitarity and lengths.
    pub fn new(vertex_count: usize, edges: Vec<Edge>, blocks: Vec<CMatrix>) -> Result<Self> {
        if vertex_count == 0 || edges.is_empty() {
            return Err(Error::InvalidDimension("graph needs at least one vertex and one edge".into()));
        }
        if blocks.len() != vertex_count {
            return Err(Error::InvalidDimension(format!(
                "{} vertex blocks for {vertex_count} vertices",
                blocks.len()
            )));
        }
        let mut incoming = vec![Vec::new(); vertex_count];
        let mut outgoing = vec![Vec::new(); vertex_count];
        for (j, e) in edges.iter().enumerate() {
            if e.tail >= vertex_count || e.head >= vertex_count {
                return Err(Error::InvalidParameter(format!("edge {j} references a missing vertex")));
            }
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(Error::InvalidParameter(format!("edge {j} has length {}", e.length)));
            }
            outgoing[e.tail].push(j);
            incoming[e.head].push(j);
        }
        for v in 0..vertex_count {
            let (din, dout) = (incoming[v].len(), outgoing[v].len());
            if din != dout {
                return Err(Error::Parity(format!(
                    "vertex {v} has {din} incoming and {dout} outgoing Γ₊ edges"
                )));
            }
            if din == 0 {
                return Err(Error::InvalidParameter(format!("vertex {v} is isolated")));
            }
            if blocks[v].dim() != (dout, din) {
                return Err(Error::InvalidDimension(format!(
                    "block at vertex {v} is {:?}, expected {dout}×{din}",
                    blocks[v].dim()
                )));
            }
            let defect = unitarity_defect(&blocks[v])?;
            if defect > UNITARY_TOL {
                return Err(Error::NotUnitary { defect, tol: UNITARY_TOL });
            }
        }
        Ok(Self { vertex_count, edges, blocks, incoming, outgoing })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of undirected edges `B`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, j: usize) -> Result<&Edge> {
        self.edges.get(j).ok_or_else(|| Error::InvalidParameter(format!("edge {j} out of range")))
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    /// `Γ₊` edges arriving at `v`, ordered by id; these index the columns of `U_v`.
    pub fn incoming(&self, v: usize) -> &[usize] {
        &self.incoming[v]
    }

    /// `Γ₊` edges leaving `v`, ordered by id; these index the rows of `U_v`.
    pub fn outgoing(&self, v: usize) -> &[usize] {
        &self.outgoing[v]
    }

    /// Number of undirected edge-ends at `v` (a self-loop counts twice).
    pub fn degree(&self, v: usize) -> usize {
        self.incoming[v].len() + self.outgoing[v].len()
    }

    /// Copy of the graph with the block at `v` replaced.
    pub fn with_block(&self, v: usize, block: CMatrix) -> Result<Self> {
        if v >= self.vertex_count {
            return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
        }
        let mut blocks = self.blocks.clone();
        blocks[v] = block;
        Self::new(self.vertex_count, self.edges.clone(), blocks)
    }

    /// Copy of the graph with new edge lengths.
    pub fn with_lengths(&self, lengths: &[f64]) -> Result<Self> {
        if lengths.len() != self.edges.len() {
            return Err(Error::InvalidDimension("length count differs from edge count".into()));
        }
        let edges = self
            .edges
            .iter()
            .zip(lengths)
            .map(|(e, &l)| Edge { length: l, ..*e })
            .collect();
        Self::new(self.vertex_count, edges, self.blocks.clone())
    }
}

/// Backscattering vertex on an edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackscattererPlacement {
    pub edge: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Position along the `Γ₊` direction of the host edge, in `(0, 1)`.
    #[serde(default = "default_fraction")]
    pub fraction: f64,
}

fn default_fraction() -> f64 {
    0.5
}

impl BackscattererPlacement {
    pub fn new(edge: usize, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let p = Self { edge, alpha, beta, gamma, fraction: 0.5 };
        p.validate()?;
        Ok(p)
    }

    /// Scatterer of strength `ν` (mean-spacing units) with `β = γ = 0`.
    pub fn from_strength(edge: usize, nu: f64) -> Result<Self> {
        if nu.is_nan() {
            return Err(Error::InvalidParameter("strength is NaN".into()));
        }
        Self::new(edge, strength::scatterer_angle(nu), 0.0, 0.0)
    }

    /// δ-like scatterer with coupling `tan α = −c`, i.e. `r = c/(i−c)`, `t = i/(i−c)`.
    pub fn delta(edge: usize, coupling: f64) -> Result<Self> {
        Self::new(edge, -coupling.atan(), 0.0, 0.0)
    }

    pub fn with_fraction(mut self, fraction: f64) -> Result<Self> {
        self.fraction = fraction;
        self.validate()?;
        Ok(self)
    }

    /// Same placement with `α = 0` (transmission only, phase `e^{iγ}` kept).
    pub fn transparent(&self) -> Self {
        Self { alpha: 0.0, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > -PI / 2.0 && self.alpha <= PI / 2.0) {
            return Err(Error::InvalidParameter(format!("alpha = {} outside (−π/2, π/2]", self.alpha)));
        }
        if !self.beta.is_finite() || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter("beta and gamma must be finite".into()));
        }
        if !(self.fraction > 0.0 && self.fraction < 1.0) {
            return Err(Error::InvalidParameter(format!("fraction {} outside (0, 1)", self.fraction)));
        }
        Ok(())
    }

    /// Strength `ν` in mean-spacing units, `−tan α / π`.
    pub fn strength(&self) -> f64 {
        strength::from_scatterer_angle(self.alpha)
    }

    pub fn matrix(&self) -> CMatrix {
        backscatter_matrix(self.alpha, self.beta, self.gamma)
    }
}

/// `e^{i(α+γ)} [[r, t], [t, −r*]]` with `r = i e^{iβ} sin α`, `t = cos α`.
pub fn backscatter_matrix(alpha: f64, beta: f64, gamma: f64) -> CMatrix {
    let r = I * cis(beta) * alpha.sin();
    let t = C64::new(alpha.cos(), 0.0);
    let ph = cis(alpha + gamma);
    ndarray::array![[ph * r, ph * t], [ph * t, -ph * r.conj()]]
}

/// A unidirectional graph with backscatterers attached.
#[derive(Clone, Debug)]
pub struct PerturbedGraph {
    pub base: UnidirectionalGraph,
    pub scatterers: Vec<BackscattererPlacement>,
}

/// Metric layout after splitting every host edge at its scatterer.
#[derive(Clone, Debug)]
pub struct SplitLayout {
    /// `B'` edges: the original ones (host edges shortened to their first part)
    /// followed by one new edge per scatterer.
    pub edges: Vec<Edge>,
    /// Original vertices followed by one scatterer vertex per placement.
    pub vertex_count: usize,
}

impl PerturbedGraph {
    pub fn unperturbed(base: UnidirectionalGraph) -> Self {
        Self { base, scatterers: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.scatterers.len()
    }

    /// Add a scatterer; fails if the edge is invalid or already occupied.
    pub fn insert(mut self, placement: BackscattererPlacement) -> Result<Self> {
        placement.validate()?;
        self.base.edge(placement.edge)?;
        if self.scatterers.iter().any(|p| p.edge == placement.edge) {
            return Err(Error::DuplicateScatterer { edge: placement.edge });
        }
        self.scatterers.push(placement);
        Ok(self)
    }

    /// All scatterers made transparent, keeping their `γ`.
    pub fn transparent(&self) -> Self {
        Self {
            base: self.base.clone(),
            scatterers: self.scatterers.iter().map(|p| p.transparent()).collect(),
        }
    }

    /// Number of undirected edges after splitting, `B' = B + rank`.
    pub fn split_edge_count(&self) -> usize {
        self.base.edge_count() + self.scatterers.len()
    }

    /// Edge `j` of the base graph keeps index `j`; scatterer `i` on host `h` turns
    /// `h` into `tail(h) → x_i` and appends `x_i → head(h)` as edge `B + i`, where
    /// `x_i = V + i`. The two parts sum exactly to the original length.
    pub fn split_layout(&self) -> SplitLayout {
        let b = self.base.edge_count();
        let v = self.base.vertex_count();
        let mut edges = self.base.edges().to_vec();
        for (i, p) in self.scatterers.iter().enumerate() {
            let host = edges[p.edge];
            let (first, second) = split_length(host.length, p.fraction);
            let x = v + i;
            edges[p.edge] = Edge { tail: host.tail, head: x, length: first };
            edges.push(Edge { tail: x, head: host.head, length: second });
            debug_assert_eq!(edges.len(), b + i + 1);
        }
        SplitLayout { edges, vertex_count: v + self.scatterers.len() }
    }
}

/// Split `l` at fraction `f` so that the parts add up to `l` bit-exactly: the
/// larger part is a rounded product, the smaller one an exact (Sterbenz) difference.
pub fn split_length(l: f64, f: f64) -> (f64, f64) {
    if f >= 0.5 {
        let first = f * l;
        (first, l - first)
    } else {
        let second = (1.0 - f) * l;
        (l - second, second)
    }
}

/// Attach a single scatterer to an unperturbed graph.
pub fn insert_backscatterer(
    graph: &UnidirectionalGraph,
    placement: BackscattererPlacement,
) -> Result<PerturbedGraph> {
    PerturbedGraph::unperturbed(graph.clone()).insert(placement)
}
