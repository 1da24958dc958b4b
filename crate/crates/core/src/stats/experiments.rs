//! Splitting experiments on graphs: rank-one scatterers, Neumann vertices, scar
//! statistics of the overlaps and rank-`k` nearest-neighbour distributions.
//!
//! Every random `k` is drawn from its own stream `instance_rng(seed, i)`, and per-`k`
//! results are collected in index order, so outputs do not depend on the number of
//! worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::{histogram, ks_exponential, AnalyticCurve, Histogram, KsResult};
use crate::analytics::{densities_signed, DEFAULT_N};
use crate::error::{Error, Result};
use crate::graph::{
    de_bruijn_graph, fully_connected_graph, random_regular_unidirectional, short_cycle_classification,
    BackscattererPlacement, BlockChoice, GraphFile, PerturbedGraph, UnidirectionalGraph,
};
use crate::qmap::{assemble_S, assemble_unperturbed, neumann_rank_one, neumann_replacement, GlobalScattering};
use crate::rmt::instance_rng;
use crate::spectra::{
    circular_spacings, classify_splittings, classify_splittings_linear, edge_overlaps, find_k_spectrum,
    forward_eigenphases, quantum_map_eigenphases, ClassifiedSplittings, MATCH_TOL,
};
use crate::surmise::wigner_goe;

/// Cycles up to this length count as short (scar-prone).
pub const SHORT_CYCLE_MAX: usize = 4;
/// KS significance level for scar detection.
pub const SCAR_ALPHA: f64 = 0.001;
/// Overlap above which a state counts as localised on the edge.
pub const TAIL_THRESHOLD: f64 = 0.2;

/// A graph recipe such as `fullyconnected:V=9` or `debruijn:p=6`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GraphSpec {
    FullyConnected { v: usize },
    DeBruijn { p: u32, blocks: BlockChoice },
    Regular { v: usize, d: usize },
    /// A graph JSON file (scatterers included).
    File(String),
}

impl Default for GraphSpec {
    fn default() -> Self {
        GraphSpec::FullyConnected { v: 9 }
    }
}

impl GraphSpec {
    /// Build the graph; the generator stream is seeded with `seed` alone.
    pub fn build(&self, seed: u64) -> Result<PerturbedGraph> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = match self {
            GraphSpec::FullyConnected { v } => fully_connected_graph(*v, &mut rng)?,
            GraphSpec::DeBruijn { p, blocks } => de_bruijn_graph(*p, *blocks, &mut rng)?,
            GraphSpec::Regular { v, d } => random_regular_unidirectional(*v, *d, &mut rng)?,
            GraphSpec::File(path) => return GraphFile::from_json(&std::fs::read_to_string(path)?)?.to_graph(),
        };
        Ok(PerturbedGraph::unperturbed(base))
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::FullyConnected { v } => write!(f, "fullyconnected:V={v}"),
            GraphSpec::DeBruijn { p, blocks } => {
                let b = serde_json::to_value(blocks).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                write!(f, "debruijn:p={p},blocks={b}")
            }
            GraphSpec::Regular { v, d } => write!(f, "regular:V={v},d={d}"),
            GraphSpec::File(path) => write!(f, "file:{path}"),
        }
    }
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidParameter(format!("graph spec {s:?}: {msg}"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        if kind == "file" {
            if rest.is_empty() {
                return Err(bad("missing path"));
            }
            return Ok(GraphSpec::File(rest.to_string()));
        }
        let mut params = std::collections::BTreeMap::new();
        for kv in rest.split(',').filter(|t| !t.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            params.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        let mut take = |key: &str| params.remove(key);
        let num = |v: Option<String>, key: &str| -> Result<usize> {
            v.ok_or_else(|| bad(&format!("missing {key}")))?.parse().map_err(|_| bad(&format!("{key} must be an integer")))
        };
        let spec = match kind.to_ascii_lowercase().as_str() {
            "fullyconnected" | "fully-connected" | "complete" => GraphSpec::FullyConnected { v: num(take("v"), "V")? },
            "debruijn" | "de-bruijn" => {
                let p = num(take("p"), "p")? as u32;
                let blocks = match take("blocks") {
                    None => BlockChoice::default(),
                    Some(b) => serde_json::from_value(serde_json::Value::String(b))
                        .map_err(|_| bad("blocks must be fixed-default, haar-identical or haar-independent"))?,
                };
                GraphSpec::DeBruijn { p, blocks }
            }
            "regular" => GraphSpec::Regular { v: num(take("v"), "V")?, d: num(take("d"), "d")? },
            _ => return Err(bad("unknown graph kind")),
        };
        if let Some(k) = params.keys().next() {
            return Err(bad(&format!("unknown key {k}")));
        }
        Ok(spec)
    }
}

/// Sampling of random `k` values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    pub n_k: usize,
    /// `k` is uniform on `[k_range.0, k_range.1)`.
    pub k_range: (f64, f64),
    pub seed: u64,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self { n_k: 1000, k_range: (0.0, 1000.0), seed: 0 }
    }
}

impl ExperimentOptions {
    fn validate(&self) -> Result<()> {
        let (a, b) = self.k_range;
        if self.n_k == 0 || !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidParameter(format!("need n_k > 0 and a finite k range, got {self:?}")));
        }
        Ok(())
    }

    /// The `i`-th random wavenumber.
    pub fn k_value(&self, i: usize) -> f64 {
        instance_rng(self.seed, i as u64).random_range(self.k_range.0..self.k_range.1)
    }
}

/// Pooled internal/external splittings of a graph experiment.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SplittingRun {
    pub internal: Vec<f64>,
    pub external: Vec<f64>,
    /// `k` samples that contributed.
    pub k_used: usize,
    /// `k` samples dropped because the classification was ambiguous.
    pub skipped: usize,
    /// Smallest splitting seen (interlacing check).
    pub min_splitting: f64,
    /// Largest number of perturbed phases matched to pinned levels, per `k`.
    pub pinned_per_k: usize,
}

impl SplittingRun {
    fn collect(parts: Vec<Option<ClassifiedSplittings>>) -> Self {
        let mut run = SplittingRun { min_splitting: f64::INFINITY, ..Default::default() };
        for part in parts {
            match part {
                Some(c) => {
                    run.k_used += 1;
                    run.pinned_per_k = run.pinned_per_k.max(c.pinned.len());
                    run.min_splitting =
                        c.internal.iter().chain(&c.external).fold(run.min_splitting, |m, &x| m.min(x));
                    run.internal.extend(c.internal);
                    run.external.extend(c.external);
                }
                None => run.skipped += 1,
            }
        }
        run
    }
}

/// Classify the spectra of `gs` against the unperturbed `gs0` at every sampled `k`.
fn rank_one_run(gs: &GlobalScattering, gs0: &GlobalScattering, direction: f64, opts: &ExperimentOptions) -> Result<SplittingRun> {
    opts.validate()?;
    let parts = (0..opts.n_k)
        .into_par_iter()
        .map(|i| {
            let k = opts.k_value(i);
            let pert = quantum_map_eigenphases(gs, k, false)?;
            let eps = forward_eigenphases(gs0, k, false)?;
            match classify_splittings(&pert.phases, &eps.phases, direction) {
                Ok(c) => Ok(Some(c)),
                Err(e) if e.is_audit() => {
                    log::debug!("skipping k = {k}: {e}");
                    Ok(None)
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let run = SplittingRun::collect(parts);
    if run.k_used == 0 {
        return Err(Error::Classification(format!("all {} k samples were ambiguous", opts.n_k)));
    }
    if run.skipped > 0 {
        log::info!("skipped {} of {} k samples", run.skipped, opts.n_k);
    }
    Ok(run)
}

fn single_scatterer(pg: &PerturbedGraph) -> Result<BackscattererPlacement> {
    if pg.rank() != 1 {
        return Err(Error::RankMismatch { expected: 1, found: pg.rank() });
    }
    let p = pg.scatterers[0];
    if p.alpha == 0.0 {
        return Err(Error::DegenerateLimit("α = 0 leaves the spectrum degenerate".into()));
    }
    Ok(p)
}

/// Splittings of the quantum-map eigenphases of a graph with one scatterer, in units
/// of the mean spacing `2π/B'` of the distinct unperturbed levels.
pub fn quantum_map_splittings(pg: &PerturbedGraph, opts: &ExperimentOptions) -> Result<SplittingRun> {
    let p = single_scatterer(pg)?;
    let gs = assemble_S(pg)?;
    let gs0 = assemble_S(&pg.transparent())?;
    rank_one_run(&gs, &gs0, p.alpha.signum(), opts)
}

/// Splittings when vertex `v` gets Neumann conditions instead of a scatterer.
pub fn neumann_splittings(g: &UnidirectionalGraph, v: usize, opts: &ExperimentOptions) -> Result<SplittingRun> {
    let gs = neumann_replacement(g, v)?;
    let (reference, _) = neumann_rank_one(g, v)?;
    let gs0 = assemble_unperturbed(&reference)?;
    rank_one_run(&gs, &gs0, 1.0, opts)
}

/// Splittings of the `k`-spectrum in `[k_min, k_max]`, unfolded by the mean spacing
/// of the pinned levels.
pub fn k_spectrum_splittings(pg: &PerturbedGraph, k_min: f64, k_max: f64) -> Result<SplittingRun> {
    let p = single_scatterer(pg)?;
    let pert = find_k_spectrum(&assemble_S(pg)?, k_min, k_max)?;
    let unpert = find_k_spectrum(&assemble_S(&pg.transparent())?, k_min, k_max)?;
    let eps: Vec<f64> = unpert.roots.iter().map(|r| r.k).collect();
    // Eigenphases increase with k, so a phase pushed up reaches the root condition
    // at a smaller k: the displacement in k has the opposite sign.
    let c = classify_splittings_linear(&pert.levels(), &eps, -p.alpha.signum())?;
    Ok(SplittingRun::collect(vec![Some(c)]))
}

/// Overlap statistics of one edge.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeScar {
    pub edge: usize,
    /// Shortest directed cycle through the edge, if at most [`SHORT_CYCLE_MAX`].
    pub cycle: Option<usize>,
    pub samples: usize,
    pub mean: f64,
    /// KS test of `|A_m|²` against the exponential law with the empirical mean.
    pub ks: KsResult,
    /// Fraction of states with `|A_m|² > 0.2`.
    pub tail_mass: f64,
    /// The same fraction under the fitted exponential law.
    pub tail_expected: f64,
    /// Histogram of `B·|A_m|²`.
    pub histogram: Histogram,
}

impl EdgeScar {
    /// Whether the exponential model is rejected at [`SCAR_ALPHA`].
    pub fn rejects_exponential(&self) -> bool {
        self.ks.p_value < SCAR_ALPHA
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScarReport {
    pub edge_count: usize,
    pub options: ExperimentOptions,
    pub edges: Vec<EdgeScar>,
}

/// `|A_m|²` of the unperturbed `Γ₊` eigenvectors on the given edges at random `k`.
pub fn scar_analysis(g: &UnidirectionalGraph, edges: &[usize], opts: &ExperimentOptions) -> Result<ScarReport> {
    opts.validate()?;
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    for &e in edges {
        g.edge(e)?;
    }
    let gs = assemble_unperturbed(g)?;
    let per_k = (0..opts.n_k)
        .into_par_iter()
        .map(|i| edge_overlaps(&gs, opts.k_value(i), edges))
        .collect::<Result<Vec<_>>>()?;
    let classes = short_cycle_classification(g, SHORT_CYCLE_MAX);
    let b = g.edge_count() as f64;
    let report = edges
        .iter()
        .enumerate()
        .map(|(slot, &edge)| {
            let values: Vec<f64> = per_k.iter().flat_map(|v| v[slot].iter().copied()).collect();
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let ks = ks_exponential(&values)?;
            let tail = values.iter().filter(|&&x| x > TAIL_THRESHOLD).count() as f64 / values.len() as f64;
            let scaled: Vec<f64> = values.iter().map(|x| x * b).collect();
            Ok(EdgeScar {
                edge,
                cycle: classes[edge],
                samples: values.len(),
                mean,
                ks,
                tail_mass: tail,
                tail_expected: (-TAIL_THRESHOLD / mean).exp(),
                histogram: histogram(&scaled, 0.1, (0.0, 10.0))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScarReport { edge_count: g.edge_count(), options: *opts, edges: report })
}

/// Nearest-neighbour statistics with several scatterers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankKReport {
    pub rank: usize,
    pub nu: f64,
    /// Spacings of all `2B'` eigenphases in units of their mean spacing `π/B'`.
    pub histogram: Histogram,
    /// The GOE surmise `(π/2)s e^{−πs²/4}`.
    pub goe: AnalyticCurve,
    /// The rank-one density `½(p_in + p_ex)` converted to the same units.
    pub rank_one: AnalyticCurve,
    pub sup_goe: f64,
    pub sup_rank_one: f64,
    /// Density of the first bin.
    pub first_bin: f64,
}

/// The rank-one nearest-neighbour density in units of the full mean spacing, where
/// `s_full = 2 s`: `¼[p_in(s/2) + p_ex(s/2)]`.
pub fn rank_one_full_units(nu: f64, s: f64) -> Result<f64> {
    let (a, b) = densities_signed(nu, 0.5 * s, DEFAULT_N)?;
    Ok(0.25 * (a + b))
}

/// Scatterers of strength `ν` on each of `edges`; all `2B'` eigenphases are pooled
/// without any pinned/moved split.
pub fn rank_k_experiment(
    g: &UnidirectionalGraph,
    edges: &[usize],
    nu: f64,
    opts: &ExperimentOptions,
    bin_width: f64,
    range: (f64, f64),
) -> Result<RankKReport> {
    opts.validate()?;
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    let classes = short_cycle_classification(g, SHORT_CYCLE_MAX);
    let mut pg = PerturbedGraph::unperturbed(g.clone());
    for &e in edges {
        g.edge(e)?;
        if let Some(c) = classes[e] {
            log::warn!("edge {e} lies on a cycle of length {c}");
        }
        pg = pg.insert(BackscattererPlacement::from_strength(e, nu)?)?;
    }
    let gs = assemble_S(&pg)?;
    let per_k = (0..opts.n_k)
        .into_par_iter()
        .map(|i| Ok(circular_spacings(&quantum_map_eigenphases(&gs, opts.k_value(i), false)?.phases)))
        .collect::<Result<Vec<_>>>()?;
    let spacings: Vec<f64> = per_k.into_iter().flatten().collect();
    let hist = histogram(&spacings, bin_width, range)?;
    let ds = bin_width / 5.0;
    let goe = AnalyticCurve::from_fn(wigner_goe, range.1, ds)?;
    let grid = crate::analytics::uniform_grid(range.1, ds)?;
    let p1 = grid.par_iter().map(|&s| rank_one_full_units(nu, s)).collect::<Result<Vec<_>>>()?;
    let rank_one = AnalyticCurve::new(grid, p1)?;
    let sup_goe = super::compare_curves(&hist, &goe)?.sup_norm;
    let sup_rank_one = super::compare_curves(&hist, &rank_one)?.sup_norm;
    Ok(RankKReport {
        rank: edges.len(),
        nu,
        first_bin: hist.density[0],
        histogram: hist,
        goe,
        rank_one,
        sup_goe,
        sup_rank_one,
    })
}

/// First edge not on any cycle of length up to [`SHORT_CYCLE_MAX`].
pub fn first_generic_edge(g: &UnidirectionalGraph) -> Option<usize> {
    short_cycle_classification(g, SHORT_CYCLE_MAX).iter().position(|c| c.is_none())
}

/// Endpoints of edges on short cycles.
fn short_cycle_vertices(g: &UnidirectionalGraph, classes: &[Option<usize>]) -> Vec<bool> {
    let mut blocked = vec![false; g.vertex_count()];
    for (e, c) in g.edges().iter().zip(classes) {
        if c.is_some() {
            blocked[e.tail] = true;
            blocked[e.head] = true;
        }
    }
    blocked
}

/// Up to `count` generic edges, taken in index order, that share no vertex with each
/// other nor with any edge on a short cycle.
pub fn spread_generic_edges(g: &UnidirectionalGraph, count: usize) -> Vec<usize> {
    let classes = short_cycle_classification(g, SHORT_CYCLE_MAX);
    let mut blocked = short_cycle_vertices(g, &classes);
    let mut picked = Vec::new();
    for (j, e) in g.edges().iter().enumerate() {
        if picked.len() == count {
            break;
        }
        if classes[j].is_none() && !blocked[e.tail] && !blocked[e.head] {
            picked.push(j);
            blocked[e.tail] = true;
            blocked[e.head] = true;
        }
    }
    picked
}

/// Degree-4 vertices whose edges and neighbours stay clear of short cycles.
pub fn generic_vertices(g: &UnidirectionalGraph) -> Vec<usize> {
    let classes = short_cycle_classification(g, SHORT_CYCLE_MAX);
    let blocked = short_cycle_vertices(g, &classes);
    (0..g.vertex_count())
        .filter(|&v| {
            g.degree(v) == 4
                && !blocked[v]
                && g.incoming(v).iter().chain(g.outgoing(v)).all(|&e| {
                    let edge = &g.edges()[e];
                    classes[e].is_none() && !blocked[edge.tail] && !blocked[edge.head]
                })
        })
        .collect()
}

/// Pinned phases must agree with unperturbed ones to this accuracy.
pub const PINNED_TOL: f64 = MATCH_TOL;
