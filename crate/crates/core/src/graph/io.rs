//! JSON form of graphs.
//!
//! Lengths are written through `serde_json`'s shortest round-trip float format
//! (at most 17 significant digits), so reading a file back reproduces every bit.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{BackscattererPlacement, Edge, PerturbedGraph, UnidirectionalGraph};
use crate::error::{Error, Result};
use crate::linalg::C64;

pub const FORMAT_TAG: &str = "nuqg-graph/1";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub format: String,
    pub vertex_count: usize,
    pub edges: Vec<DirectedEdgeRecord>,
    pub blocks: Vec<BlockRecord>,
    #[serde(default)]
    pub scatterers: Vec<BackscattererPlacement>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DirectedEdgeRecord {
    pub id: usize,
    pub tail: usize,
    pub head: usize,
    pub length: f64,
    /// `"plus"` or `"minus"`.
    pub half: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockRecord {
    pub vertex: usize,
    pub dim: usize,
    /// Row-major `[re, im]` pairs.
    pub entries: Vec<[f64; 2]>,
}

impl GraphFile {
    pub fn from_graph(g: &PerturbedGraph) -> Self {
        let b = g.base.edge_count();
        let mut edges = Vec::with_capacity(2 * b);
        for (j, e) in g.base.edges().iter().enumerate() {
            edges.push(DirectedEdgeRecord { id: j, tail: e.tail, head: e.head, length: e.length, half: "plus".into() });
        }
        for (j, e) in g.base.edges().iter().enumerate() {
            edges.push(DirectedEdgeRecord {
                id: j + b,
                tail: e.head,
                head: e.tail,
                length: e.length,
                half: "minus".into(),
            });
        }
        let blocks = g
            .base
            .blocks()
            .iter()
            .enumerate()
            .map(|(v, u)| BlockRecord {
                vertex: v,
                dim: u.nrows(),
                entries: u.iter().map(|z| [z.re, z.im]).collect(),
            })
            .collect();
        Self {
            format: FORMAT_TAG.into(),
            vertex_count: g.base.vertex_count(),
            edges,
            blocks,
            scatterers: g.scatterers.clone(),
        }
    }

    pub fn to_graph(&self) -> Result<PerturbedGraph> {
        if self.format != FORMAT_TAG {
            return Err(Error::Format(format!("unknown graph format {:?}", self.format)));
        }
        let mut plus: Vec<&DirectedEdgeRecord> = self.edges.iter().filter(|e| e.half == "plus").collect();
        let minus: Vec<&DirectedEdgeRecord> = self.edges.iter().filter(|e| e.half == "minus").collect();
        if plus.len() + minus.len() != self.edges.len() || plus.len() != minus.len() {
            return Err(Error::Format("edges must be split evenly into plus and minus halves".into()));
        }
        plus.sort_by_key(|e| e.id);
        let b = plus.len();
        for (j, e) in plus.iter().enumerate() {
            if e.id != j {
                return Err(Error::Format(format!("plus edge ids must be 0..{b}")));
            }
        }
        for m in &minus {
            let j = m.id.checked_sub(b).filter(|&j| j < b).ok_or_else(|| {
                Error::Format(format!("minus edge id {} outside {b}..{}", m.id, 2 * b))
            })?;
            let p = plus[j];
            if m.tail != p.head || m.head != p.tail || m.length.to_bits() != p.length.to_bits() {
                return Err(Error::Format(format!("minus edge {} is not the reversal of edge {j}", m.id)));
            }
        }
        let edges = plus.iter().map(|e| Edge { tail: e.tail, head: e.head, length: e.length }).collect();
        let mut blocks = vec![None; self.vertex_count];
        for br in &self.blocks {
            if br.vertex >= self.vertex_count || br.entries.len() != br.dim * br.dim {
                return Err(Error::Format(format!("malformed block for vertex {}", br.vertex)));
            }
            let data = br.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
            let m = Array2::from_shape_vec((br.dim, br.dim), data)
                .map_err(|e| Error::Format(e.to_string()))?;
            blocks[br.vertex] = Some(m);
        }
        let blocks = blocks
            .into_iter()
            .enumerate()
            .map(|(v, b)| b.ok_or_else(|| Error::Format(format!("missing block for vertex {v}"))))
            .collect::<Result<Vec<_>>>()?;
        let base = UnidirectionalGraph::new(self.vertex_count, edges, blocks)?;
        let mut g = PerturbedGraph::unperturbed(base);
        for p in &self.scatterers {
            g = g.insert(*p)?;
        }
        Ok(g)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fully_connected_graph, insert_backscatterer};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_bit_faithful() {
        let g = fully_connected_graph(7, &mut ChaCha8Rng::seed_from_u64(21)).unwrap();
        let p = BackscattererPlacement::new(4, 0.3, 0.2, -1.0).unwrap().with_fraction(0.3).unwrap();
        let pg = insert_backscatterer(&g, p).unwrap();
        let text = GraphFile::from_graph(&pg).to_json().unwrap();
        let back = GraphFile::from_json(&text).unwrap().to_graph().unwrap();
        for (a, b) in pg.base.edges().iter().zip(back.base.edges()) {
            assert_eq!(a.length.to_bits(), b.length.to_bits());
            assert_eq!((a.tail, a.head), (b.tail, b.head));
        }
        assert_eq!(pg.base.blocks(), back.base.blocks());
        assert_eq!(pg.scatterers, back.scatterers);
    }

    #[test]
    fn rejects_inconsistent_minus_half() {
        let g = fully_connected_graph(3, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let mut f = GraphFile::from_graph(&PerturbedGraph::unperturbed(g));
        f.edges[3].length += 1e-3;
        assert!(f.to_graph().is_err());
    }
}
