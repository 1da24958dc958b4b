//! `nuqg`: command-line driver for spectra, splitting statistics and analytics.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

use nuqg_core::stats::GraphSpec;
use nuqg_core::OutputFormat;

#[derive(Parser, Debug)]
#[command(name = "nuqg", version, about = "Level-splitting statistics for unidirectional quantum graphs with backscatterers")]
pub struct Cli {
    /// Seed for every random draw (graph construction and sampling).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// TOML file whose keys mirror the long flags; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, env = "NUQG_OUT", default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a graph (optionally with scatterers) and write it as JSON.
    GenerateGraph(GenerateArgs),
    /// Wavenumber spectrum in a window.
    Spectrum(SpectrumArgs),
    /// Quantum-map eigenphases at given or random wavenumbers.
    Eigenphases(EigenphaseArgs),
    /// Internal/external splitting histograms with analytic overlays.
    NnDist(NnDistArgs),
    /// Analytic splitting densities on a grid.
    RmtCurve(RmtCurveArgs),
    /// Finite-N gap probabilities for symmetric gaps.
    GapProb(GapProbArgs),
    /// Shifted Wigner surmise.
    Surmise(SurmiseArgs),
    /// Eigenvector overlap statistics on edges.
    Scar(ScarArgs),
    /// Nearest-neighbour statistics with several scatterers.
    RankK(RankKArgs),
    /// Compare a histogram file with an analytic curve.
    Compare(CompareArgs),
}

pub const SUBCOMMANDS: &[&str] = &[
    "generate-graph",
    "spectrum",
    "eigenphases",
    "nn-dist",
    "rmt-curve",
    "gap-prob",
    "surmise",
    "scar",
    "rank-k",
    "compare",
];

fn parse_graph(s: &str) -> Result<GraphSpec, String> {
    s.parse().map_err(|e: nuqg_core::Error| e.to_string())
}

/// Counts such as `2e5`.
fn parse_count(s: &str) -> Result<usize, String> {
    let x: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if !(x >= 1.0 && x.fract() == 0.0 && x < 1e15) {
        return Err(format!("{s:?} is not a positive integer"));
    }
    Ok(x as usize)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GraphArgs {
    /// `fullyconnected:V=9`, `debruijn:p=6[,blocks=...]`, `regular:V=..,d=..` or `file:PATH`.
    #[arg(long, value_parser = parse_graph, default_value = "fullyconnected:V=9")]
    #[serde(serialize_with = "display")]
    pub graph: GraphSpec,
}

fn display<S: serde::Serializer>(g: &GraphSpec, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(g)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScattererArgs {
    /// Host edge of the scatterer.
    #[arg(long, default_value_t = 0)]
    pub edge: usize,
    /// Strength in mean-level-spacing units; `inf` for full backscattering.
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Scatterer host edges (comma separated); requires --nu.
    #[arg(long, value_delimiter = ',')]
    pub edges: Vec<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub scatterer: ScattererArgs,
    #[arg(long, default_value_t = 0.0)]
    pub kmin: f64,
    #[arg(long, default_value_t = 10.0)]
    pub kmax: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EigenphaseArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub scatterer: ScattererArgs,
    /// Wavenumbers (comma separated); random ones are drawn when empty.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub k: Vec<f64>,
    /// Number of random wavenumbers when --k is empty.
    #[arg(long, value_parser = parse_count, default_value = "1")]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    QuantumMap,
    KSpectrum,
    Rmt,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct NnDistArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub scatterer: ScattererArgs,
    #[arg(long, value_enum, default_value_t = Source::QuantumMap)]
    pub source: Source,
    /// Target number of splittings (internal plus external).
    #[arg(long, value_parser = parse_count, default_value = "20000")]
    pub samples: usize,
    /// Replace vertex V by Neumann conditions instead of inserting a scatterer.
    #[arg(long)]
    pub neumann: Option<usize>,
    /// Matrix size for `--source rmt`.
    #[arg(long = "N", default_value_t = 101)]
    pub n: usize,
    /// Wavenumber window for `--source k-spectrum`.
    #[arg(long, default_value_t = 0.0)]
    pub kmin: f64,
    #[arg(long, default_value_t = 50.0)]
    pub kmax: f64,
    #[arg(long, default_value_t = 0.1)]
    pub bin_width: f64,
    #[arg(long, default_value_t = 6.0)]
    pub smax: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RmtCurveArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub nu: f64,
    #[arg(long = "N", default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 4.0)]
    pub smax: f64,
    #[arg(long, default_value_t = 0.02)]
    pub ds: f64,
    /// Exact finite-N densities instead of the large-N formulas.
    #[arg(long)]
    pub finite: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GapProbArgs {
    #[arg(long = "N", default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    /// Gap widths in mean spacings; the gap is `[−h, h]` with `h = sπ/N` for both species.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.4,0.6,0.8,1.0")]
    pub widths: Vec<f64>,
    /// Monte-Carlo draws from the joint density for comparison (0 = none).
    #[arg(long, value_parser = parse_count_or_zero, default_value = "0")]
    pub mc: usize,
}

fn parse_count_or_zero(s: &str) -> Result<usize, String> {
    if s.trim() == "0" {
        Ok(0)
    } else {
        parse_count(s)
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SurmiseArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub nu: f64,
    #[arg(long, default_value_t = 4.0)]
    pub smax: f64,
    #[arg(long, default_value_t = 0.02)]
    pub ds: f64,
    /// Add the exact densities and the deviations.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScarArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Edges to analyse (comma separated); all edges when empty.
    #[arg(long, value_delimiter = ',')]
    pub edges: Vec<usize>,
    /// Number of random wavenumbers.
    #[arg(long, value_parser = parse_count, default_value = "100")]
    pub samples: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RankKArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Scatterer host edges; spread generic edges are chosen when empty.
    #[arg(long, value_delimiter = ',')]
    pub edges: Vec<usize>,
    /// Number of scatterers when --edges is empty.
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub nu: f64,
    /// Number of random wavenumbers.
    #[arg(long, value_parser = parse_count, default_value = "200")]
    pub samples: usize,
    #[arg(long, default_value_t = 0.1)]
    pub bin_width: f64,
    #[arg(long, default_value_t = 6.0)]
    pub smax: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Column {
    Internal,
    External,
    Combined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Curve {
    /// Determinant formulas at the given ν.
    Exact,
    /// Shifted Wigner surmise at the given ν.
    Surmise,
    /// GUE nearest-neighbour density.
    Gue,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CompareArgs {
    /// Histogram CSV written by `nn-dist`.
    #[arg(long)]
    pub hist: PathBuf,
    #[arg(long, value_enum, default_value_t = Column::Combined)]
    pub column: Column,
    #[arg(long, value_enum, default_value_t = Curve::Exact)]
    pub curve: Curve,
    /// Strength for the analytic curve; read from the histogram metadata when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
}

/// 2 for bad input, 3 for numerical failures, 4 for failed self-checks.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<nuqg_core::Error>()) {
        Some(e) if e.is_numerical() => 3,
        Some(e) if e.is_audit() => 4,
        _ => 2,
    }
}

fn init_workers() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("NUQG_WORKERS") {
        let n: usize = v.parse().map_err(|_| anyhow::anyhow!("NUQG_WORKERS={v:?} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match config::merge_args(std::env::args().collect(), SUBCOMMANDS) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match init_workers().and_then(|()| commands::run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
