//! Histograms, curve comparison, Kolmogorov–Smirnov tests and the graph experiments.

pub mod experiments;

pub use experiments::{
    k_spectrum_splittings, neumann_splittings, quantum_map_splittings, rank_k_experiment, scar_analysis,
    EdgeScar, ExperimentOptions, GraphSpec, RankKReport, ScarReport, SplittingRun,
};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default bin width in mean-spacing units.
pub const DEFAULT_BIN_WIDTH: f64 = 0.1;
/// Default histogram support.
pub const DEFAULT_RANGE: (f64, f64) = (0.0, 6.0);
/// Samples this far below the lower edge still land in the first bin.
pub const EDGE_TOL: f64 = 1e-9;
/// Relative tolerance when matching bin edges to curve grid points.
const GRID_TOL: f64 = 1e-9;

/// Density-normalised histogram with equal-width bins.
///
/// `density[i] = counts[i] / (total · width)`, where `total` includes the samples
/// outside the range, so the bins integrate to `1 − (underflow + overflow)/total`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    pub total: usize,
    pub underflow: usize,
    pub overflow: usize,
}

impl Histogram {
    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.edges[self.edges.len() - 1] - self.edges[0]) / self.bin_count() as f64
    }

    pub fn centres(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Fraction of samples above the range.
    pub fn overflow_mass(&self) -> f64 {
        self.overflow as f64 / self.total as f64
    }

    pub fn underflow_mass(&self) -> f64 {
        self.underflow as f64 / self.total as f64
    }

    /// `∫ density` over the range.
    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.width()
    }

    fn from_counts(edges: Vec<f64>, counts: Vec<u64>, underflow: usize, overflow: usize) -> Self {
        let total = counts.iter().sum::<u64>() as usize + underflow + overflow;
        let w = (edges[edges.len() - 1] - edges[0]) / counts.len() as f64;
        let density = counts.iter().map(|&c| if total == 0 { 0.0 } else { c as f64 / (total as f64 * w) }).collect();
        Self { edges, counts, density, total, underflow, overflow }
    }

    /// Sum of two histograms on the same bins.
    pub fn merge(&self, other: &Histogram) -> Result<Histogram> {
        if self.edges != other.edges {
            return Err(Error::GridMismatch("histograms have different bin edges".into()));
        }
        let counts = self.counts.iter().zip(&other.counts).map(|(a, b)| a + b).collect();
        Ok(Self::from_counts(
            self.edges.clone(),
            counts,
            self.underflow + other.underflow,
            self.overflow + other.overflow,
        ))
    }
}

/// Bin edges `lo, lo + w, …, hi`; the range must hold a whole number of bins.
pub fn bin_edges(bin_width: f64, range: (f64, f64)) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if !(bin_width > 0.0) || !lo.is_finite() || !hi.is_finite() || hi <= lo {
        return Err(Error::InvalidParameter(format!("bad histogram layout width {bin_width} on [{lo}, {hi}]")));
    }
    let n = ((hi - lo) / bin_width).round();
    if n < 1.0 || (n * bin_width - (hi - lo)).abs() > 1e-9 * (hi - lo) {
        return Err(Error::InvalidParameter(format!("[{lo}, {hi}] is not a whole number of bins of width {bin_width}")));
    }
    let n = n as usize;
    Ok((0..=n).map(|i| if i == n { hi } else { lo + i as f64 * bin_width }).collect())
}

/// Density histogram of `samples` (already in mean-spacing units).
pub fn histogram(samples: &[f64], bin_width: f64, range: (f64, f64)) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let edges = bin_edges(bin_width, range)?;
    let n = edges.len() - 1;
    let (lo, hi) = range;
    let w = (hi - lo) / n as f64;
    let mut counts = vec![0u64; n];
    let (mut under, mut over) = (0, 0);
    for &x in samples {
        if x.is_nan() {
            return Err(Error::InvalidParameter("NaN sample".into()));
        }
        if x < lo - EDGE_TOL {
            under += 1;
        } else if x >= hi {
            over += 1;
        } else {
            let i = (((x - lo) / w).floor().max(0.0) as usize).min(n - 1);
            counts[i] += 1;
        }
    }
    Ok(Histogram::from_counts(edges, counts, under, over))
}

/// Where a set of splittings came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleSource {
    KSpectrum,
    QuantumMap,
    Rmt,
}

impl std::fmt::Display for SampleSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SampleSource::KSpectrum => "k-spectrum",
            SampleSource::QuantumMap => "quantum-map",
            SampleSource::Rmt => "rmt",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramMeta {
    /// Graph spec string, if the samples come from a graph.
    pub graph: Option<String>,
    pub nu: f64,
    pub seed: u64,
    pub source: SampleSource,
}

/// Internal, external and combined splitting densities on common bins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingHistogram {
    pub internal: Histogram,
    pub external: Histogram,
    /// `½(p_in + p_ex)` per bin.
    pub combined: Vec<f64>,
    pub meta: HistogramMeta,
}

impl SplittingHistogram {
    pub fn new(
        internal: &[f64],
        external: &[f64],
        bin_width: f64,
        range: (f64, f64),
        meta: HistogramMeta,
    ) -> Result<Self> {
        if internal.len() != external.len() {
            return Err(Error::InvalidDimension(format!(
                "{} internal vs {} external splittings",
                internal.len(),
                external.len()
            )));
        }
        let internal = histogram(internal, bin_width, range)?;
        let external = histogram(external, bin_width, range)?;
        let combined = internal.density.iter().zip(&external.density).map(|(a, b)| 0.5 * (a + b)).collect();
        Ok(Self { internal, external, combined, meta })
    }

    pub fn edges(&self) -> &[f64] {
        &self.internal.edges
    }

    /// The pooled histogram, whose density is `combined`.
    pub fn combined_histogram(&self) -> Histogram {
        self.internal.merge(&self.external).expect("common bins")
    }
}

/// Tabulated analytic density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticCurve {
    pub s: Vec<f64>,
    pub p: Vec<f64>,
}

impl AnalyticCurve {
    pub fn new(s: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if s.len() != p.len() || s.len() < 2 {
            return Err(Error::InvalidDimension("curve needs ≥ 2 matched points".into()));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("curve grid must increase strictly".into()));
        }
        Ok(Self { s, p })
    }

    /// Tabulate `f` on `0, ds, …, s_max`.
    pub fn from_fn(f: impl Fn(f64) -> f64, s_max: f64, ds: f64) -> Result<Self> {
        let s = crate::analytics::uniform_grid(s_max, ds)?;
        let p = s.iter().map(|&x| f(x)).collect();
        Self::new(s, p)
    }

    fn index_of(&self, x: f64) -> Option<usize> {
        let i = self.s.partition_point(|&y| y < x);
        let tol = GRID_TOL * x.abs().max(1.0);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .find(|&j| j < self.s.len() && (self.s[j] - x).abs() <= tol)
    }

    /// Mean of the curve over `[a, b]` by the trapezoid rule; both ends must be grid points.
    pub fn bin_average(&self, a: f64, b: f64) -> Result<f64> {
        let (i, j) = match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) if j > i => (i, j),
            _ => {
                return Err(Error::GridMismatch(format!("bin [{a}, {b}] does not fall on curve grid points")));
            }
        };
        let area: f64 = (i..j).map(|k| 0.5 * (self.p[k] + self.p[k + 1]) * (self.s[k + 1] - self.s[k])).sum();
        Ok(area / (self.s[j] - self.s[i]))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub sup_norm: f64,
    pub chi2: f64,
    /// Bins with positive expected count.
    pub dof: usize,
    /// Histogram density minus bin-averaged curve.
    pub residuals: Vec<f64>,
    /// The bin-averaged curve.
    pub expected: Vec<f64>,
}

/// Compare a histogram with an analytic density averaged over each bin.
pub fn compare_curves(hist: &Histogram, curve: &AnalyticCurve) -> Result<Comparison> {
    let w = hist.width();
    let expected = hist.edges.windows(2).map(|e| curve.bin_average(e[0], e[1])).collect::<Result<Vec<_>>>()?;
    let residuals: Vec<f64> = hist.density.iter().zip(&expected).map(|(h, e)| h - e).collect();
    let sup_norm = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let mut chi2 = 0.0;
    let mut dof = 0;
    for (&c, &e) in hist.counts.iter().zip(&expected) {
        let mu = e * w * hist.total as f64;
        if mu > 0.0 {
            chi2 += (c as f64 - mu).powi(2) / mu;
            dof += 1;
        }
    }
    Ok(Comparison { sup_norm, chi2, dof, residuals, expected })
}

/// Largest pointwise difference of two tabulated curves on a common grid.
pub fn sup_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} vs {} points", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Effective sample size entering the asymptotic distribution.
    pub n_eff: f64,
}

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Theta-function form converges fast for small λ.
        let a = PI * PI / (8.0 * lambda * lambda);
        let cdf: f64 = (1..=8).map(|k| (-((2 * k - 1) as f64).powi(2) * a).exp()).sum::<f64>()
            * (2.0 * PI).sqrt()
            / lambda;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let sum: f64 = (1..=100)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
            })
            .sum();
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// Asymptotic p-value with the usual small-sample correction of the argument.
fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let rt = n_eff.sqrt();
    kolmogorov_survival((rt + 0.12 + 0.11 / rt) * d)
}

/// One-sample KS test against a continuous CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let d = x.iter().enumerate().fold(0.0f64, |m, (i, &v)| {
        let f = cdf(v);
        m.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    });
    Ok(KsResult { statistic: d, p_value: ks_p_value(d, n), n_eff: n })
}

/// KS test against the exponential law with the empirical mean.
pub fn ks_exponential(samples: &[f64]) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::InvalidParameter(format!("exponential fit needs a positive mean, got {mean}")));
    }
    ks_one_sample(samples, |x| if x <= 0.0 { 0.0 } else { 1.0 - (-x / mean).exp() })
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let n_eff = n * m / (n + m);
    Ok(KsResult { statistic: d, p_value: ks_p_value(d, n_eff), n_eff })
}
