//! Unidirectional quantum graphs with backscatterers.
//!
//! The crate builds unidirectional quantum graphs, breaks the chiral symmetry with
//! backscattering vertices and compares the resulting level splittings with random
//! matrix predictions.
//!
//! # Conventions
//!
//! * Directed edges: the `Γ₊` copy of undirected edge `j` has index `j`, its `Γ₋`
//!   reversal has index `j + B'`.
//! * `S` maps incoming amplitudes (after propagation) to outgoing amplitudes, so the
//!   quantum map is `S·L(k)` with `L(k) = diag(e^{ik l})`.
//! * The perturbation strength `ν` is measured in units of the mean level spacing.
//!   The coupling that enters the local secular equation is `tan α = πν`; see
//!   [`strength`].

pub mod analytics;
pub mod error;
pub mod export;
pub mod graph;
pub mod linalg;
pub mod qmap;
pub mod rmt;
pub mod spectra;
pub mod stats;
pub mod strength;
pub mod surmise;

pub use error::{Error, Result};
pub use graph::{
    BackscattererPlacement, BlockChoice, Edge, PerturbedGraph, UnidirectionalGraph,
};
pub use linalg::{CMatrix, C64};
pub use qmap::{GlobalScattering, RankOneData};
pub use analytics::GapBounds;
pub use export::{CsvTable, Manifest, OutputFormat};
pub use rmt::{RmtInstance, RmtSplittings, SecularSolver};
pub use spectra::{ClassifiedSplittings, EigenphaseSet, KSpectrum};
pub use stats::{AnalyticCurve, Comparison, GraphSpec, Histogram, SampleSource, SplittingHistogram};
pub use surmise::{SurmiseCurves, SurmiseParams};
