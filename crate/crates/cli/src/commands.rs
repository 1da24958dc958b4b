use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nuqg_core::analytics::{
    curves, densities_signed, finite_n_densities, gap_probability, p_gue_exact, uniform_grid, GapBounds, DEFAULT_N,
};
use nuqg_core::export::{write_json, write_table};
use nuqg_core::graph::{short_cycle_classification, BackscattererPlacement, GraphFile, PerturbedGraph};
use nuqg_core::qmap::assemble_S;
use nuqg_core::rmt::{gap_fraction, sample_joint_many, sample_splittings};
use nuqg_core::spectra::{circular_distance, find_k_spectrum, forward_eigenphases, quantum_map_eigenphases, MATCH_TOL};
use nuqg_core::stats::experiments::{
    k_spectrum_splittings, neumann_splittings, quantum_map_splittings, rank_k_experiment, scar_analysis,
    spread_generic_edges, ExperimentOptions, SplittingRun, SHORT_CYCLE_MAX,
};
use nuqg_core::stats::{bin_edges, compare_curves, AnalyticCurve, Histogram, HistogramMeta, SampleSource, SplittingHistogram};
use nuqg_core::surmise::{shifted_surmise, SurmiseParams};
use nuqg_core::{CsvTable, Manifest, OutputFormat, SecularSolver};

use crate::*;

/// Output directory, format and the manifest being filled.
struct Run {
    out: PathBuf,
    format: OutputFormat,
    manifest: Manifest,
}

impl Run {
    fn new(cli: &Cli, name: &str, args: &impl Serialize) -> Result<Self> {
        std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
        let params = serde_json::json!({
            "seed": cli.seed,
            "format": cli.format,
            "args": args,
        });
        Ok(Self { out: cli.out.clone(), format: cli.format.into(), manifest: Manifest::new(name, cli.seed, params) })
    }

    fn table(&mut self, stem: &str, table: &CsvTable) -> Result<()> {
        let path = write_table(&self.out, stem, table, self.format)?;
        println!("wrote {}", path.display());
        self.manifest.add_output(&path);
        Ok(())
    }

    fn finish(self) -> Result<()> {
        let path = self.manifest.write(&self.out)?;
        println!("wrote {}", path.display());
        Ok(())
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::GenerateGraph(a) => generate_graph(cli, a),
        Command::Spectrum(a) => spectrum(cli, a),
        Command::Eigenphases(a) => eigenphases(cli, a),
        Command::NnDist(a) => nn_dist(cli, a),
        Command::RmtCurve(a) => rmt_curve(cli, a),
        Command::GapProb(a) => gap_prob(cli, a),
        Command::Surmise(a) => surmise(cli, a),
        Command::Scar(a) => scar(cli, a),
        Command::RankK(a) => rank_k(cli, a),
        Command::Compare(a) => compare(cli, a),
    }
}

/// Random wavenumbers use the stream family `seed + 1`, keeping them apart from
/// the graph construction stream.
fn k_options(seed: u64, n_k: usize) -> ExperimentOptions {
    ExperimentOptions { n_k, seed: seed.wrapping_add(1), ..Default::default() }
}

fn build(g: &GraphArgs, seed: u64) -> Result<PerturbedGraph> {
    Ok(g.graph.build(seed)?)
}

/// The graph with the requested scatterer; a graph file's own scatterers are used
/// when `--nu` is absent.
fn with_scatterer(pg: PerturbedGraph, sc: &ScattererArgs) -> Result<PerturbedGraph> {
    match sc.nu {
        Some(nu) => Ok(PerturbedGraph::unperturbed(pg.base).insert(BackscattererPlacement::from_strength(sc.edge, nu)?)?),
        None if pg.rank() > 0 => Ok(pg),
        None => bail!(nuqg_core::Error::InvalidParameter("--nu is required".into())),
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn generate_graph(cli: &Cli, a: &GenerateArgs) -> Result<()> {
    let mut run = Run::new(cli, "generate-graph", a)?;
    let mut pg = build(&a.graph, cli.seed)?;
    if !a.edges.is_empty() {
        let nu = a.nu.ok_or_else(|| nuqg_core::Error::InvalidParameter("--edges needs --nu".into()))?;
        for &e in &a.edges {
            pg = pg.insert(BackscattererPlacement::from_strength(e, nu)?)?;
        }
    }
    let path = run.out.join("graph.json");
    write_json(&path, &GraphFile::from_graph(&pg))?;
    println!("wrote {}", path.display());
    run.manifest.add_output(&path);

    let classes = short_cycle_classification(&pg.base, SHORT_CYCLE_MAX);
    let mut t = CsvTable::new(["edge", "tail", "head", "length", "short_cycle"])
        .meta("graph", &a.graph.graph)
        .meta("short_cycle", format!("shortest directed cycle up to {SHORT_CYCLE_MAX}, 0 if none"));
    for (j, e) in pg.base.edges().iter().enumerate() {
        t.push(vec![j as f64, e.tail as f64, e.head as f64, e.length, classes[j].unwrap_or(0) as f64])?;
    }
    run.table("edges", &t)?;
    run.finish()
}

fn spectrum(cli: &Cli, a: &SpectrumArgs) -> Result<()> {
    let mut run = Run::new(cli, "spectrum", a)?;
    let base = build(&a.graph, cli.seed)?;
    let mut t = CsvTable::new(["k", "multiplicity", "residual", "perturbed"])
        .meta("graph", &a.graph.graph)
        .meta("k_range", format!("[{}, {}]", a.kmin, a.kmax));
    let mut graphs = vec![(PerturbedGraph::unperturbed(base.base.clone()), false)];
    if a.scatterer.nu.is_some() || base.rank() > 0 {
        graphs.push((with_scatterer(base, &a.scatterer)?, true));
    }
    for (pg, perturbed) in graphs {
        let spec = find_k_spectrum(&assemble_S(&pg)?, a.kmin, a.kmax)?;
        println!("{} levels ({})", spec.count(), if perturbed { "perturbed" } else { "unperturbed" });
        for r in &spec.roots {
            t.push(vec![r.k, r.multiplicity as f64, r.residual, flag(perturbed)])?;
        }
    }
    run.table("spectrum", &t)?;
    run.finish()
}

fn eigenphases(cli: &Cli, a: &EigenphaseArgs) -> Result<()> {
    let mut run = Run::new(cli, "eigenphases", a)?;
    let pg = with_scatterer(build(&a.graph, cli.seed)?, &a.scatterer)?;
    let gs = assemble_S(&pg)?;
    let gs0 = assemble_S(&pg.transparent())?;
    let ks: Vec<f64> = if a.k.is_empty() {
        let opts = k_options(cli.seed, a.samples);
        (0..a.samples).map(|i| opts.k_value(i)).collect()
    } else {
        a.k.clone()
    };
    let mut t = CsvTable::new(["k", "phase", "perturbed", "pinned"]).meta("graph", &a.graph.graph);
    for &k in &ks {
        let eps = forward_eigenphases(&gs0, k, false)?.phases;
        for &e in &eps {
            t.push(vec![k, e, 0.0, 0.0])?;
        }
        for p in quantum_map_eigenphases(&gs, k, false)?.phases {
            let pinned = eps.iter().any(|&e| circular_distance(p, e) <= MATCH_TOL);
            t.push(vec![k, p, 1.0, flag(pinned)])?;
        }
    }
    run.table("eigenphases", &t)?;
    run.finish()
}

/// Splittings per instance taken from the middle half of an `N`-level spectrum.
fn middle_half(n: usize) -> usize {
    (n / 4..(3 * n / 4).min(n.saturating_sub(1))).len()
}

fn nn_dist(cli: &Cli, a: &NnDistArgs) -> Result<()> {
    let mut run = Run::new(cli, "nn-dist", a)?;
    let (nu, source, graph_label, data) = match a.source {
        Source::Rmt => {
            let nu = a.scatterer.nu.ok_or_else(|| nuqg_core::Error::InvalidParameter("--nu is required".into()))?;
            let per = middle_half(a.n).max(1);
            let instances = a.samples.div_ceil(2 * per);
            let sp = sample_splittings(a.n, nu, instances, cli.seed, SecularSolver::Rational)?;
            let r = SplittingRun { internal: sp.internal, external: sp.external, k_used: instances, ..Default::default() };
            (nu, SampleSource::Rmt, None, r)
        }
        Source::QuantumMap => {
            let pg = build(&a.graph, cli.seed)?;
            if let Some(v) = a.neumann {
                let n_k = a.samples.div_ceil(2 * pg.base.edge_count());
                let r = neumann_splittings(&pg.base, v, &k_options(cli.seed, n_k))?;
                (f64::INFINITY, SampleSource::QuantumMap, Some(a.graph.graph.to_string()), r)
            } else {
                let pg = with_scatterer(pg, &a.scatterer)?;
                let n_k = a.samples.div_ceil(2 * pg.split_edge_count());
                let r = quantum_map_splittings(&pg, &k_options(cli.seed, n_k))?;
                (pg.scatterers[0].strength(), SampleSource::QuantumMap, Some(a.graph.graph.to_string()), r)
            }
        }
        Source::KSpectrum => {
            let pg = with_scatterer(build(&a.graph, cli.seed)?, &a.scatterer)?;
            let r = k_spectrum_splittings(&pg, a.kmin, a.kmax)?;
            (pg.scatterers[0].strength(), SampleSource::KSpectrum, Some(a.graph.graph.to_string()), r)
        }
    };
    let meta = HistogramMeta { graph: graph_label.clone(), nu, seed: cli.seed, source };
    let range = (0.0, a.smax);
    let h = SplittingHistogram::new(&data.internal, &data.external, a.bin_width, range, meta)?;

    let grid = uniform_grid(a.smax, a.bin_width / 5.0)?;
    let pts = grid.par_iter().map(|&s| densities_signed(nu, s, DEFAULT_N)).collect::<nuqg_core::Result<Vec<_>>>()?;
    let p_in: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let p_ex: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let comb: Vec<f64> = pts.iter().map(|p| 0.5 * (p.0 + p.1)).collect();
    let sup = |hist: &Histogram, p: &[f64]| -> Result<f64> {
        Ok(compare_curves(hist, &AnalyticCurve::new(grid.clone(), p.to_vec())?)?.sup_norm)
    };
    let sup_in = sup(&h.internal, &p_in)?;
    let sup_ex = sup(&h.external, &p_ex)?;
    let sup_comb = sup(&h.combined_histogram(), &comb)?;

    let edges = h.edges().to_vec();
    let mut t = CsvTable::new(["s_lo", "s_hi", "count_internal", "count_external", "internal", "external", "combined"])
        .meta("graph", graph_label.as_deref().unwrap_or("none"))
        .meta("source", source)
        .meta("nu", nu)
        .meta("seed", cli.seed)
        .meta("bin_width", a.bin_width)
        .meta("range", format!("{},{}", range.0, range.1))
        .meta("total_internal", h.internal.total)
        .meta("total_external", h.external.total)
        .meta("overflow_internal", h.internal.overflow)
        .meta("overflow_external", h.external.overflow)
        .meta("k_used", data.k_used)
        .meta("skipped", data.skipped)
        .meta("sup_internal", sup_in)
        .meta("sup_external", sup_ex)
        .meta("sup_combined", sup_comb);
    for i in 0..edges.len() - 1 {
        t.push(vec![
            edges[i],
            edges[i + 1],
            h.internal.counts[i] as f64,
            h.external.counts[i] as f64,
            h.internal.density[i],
            h.external.density[i],
            h.combined[i],
        ])?;
    }
    run.table("nn_hist", &t)?;
    let curve = CsvTable::from_columns(["s", "p_in", "p_ex", "combined"], &[&grid, &p_in, &p_ex, &comb])?
        .meta("nu", nu)
        .meta("N", DEFAULT_N);
    run.table("nn_curve", &curve)?;
    println!(
        "{} splittings ({} skipped k); sup-norm internal {sup_in:.4}, external {sup_ex:.4}, combined {sup_comb:.4}",
        data.internal.len() + data.external.len(),
        data.skipped
    );
    run.finish()
}

fn rmt_curve(cli: &Cli, a: &RmtCurveArgs) -> Result<()> {
    let mut run = Run::new(cli, "rmt-curve", a)?;
    let grid = uniform_grid(a.smax, a.ds)?;
    let t = if a.finite {
        let pts = grid
            .par_iter()
            .map(|&s| {
                let (i, e) = finite_n_densities(s, a.n, a.nu.abs())?;
                Ok(if a.nu < 0.0 { (e, i) } else { (i, e) })
            })
            .collect::<nuqg_core::Result<Vec<_>>>()?;
        let p_in: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let p_ex: Vec<f64> = pts.iter().map(|p| p.1).collect();
        CsvTable::from_columns(["s", "p_in", "p_ex"], &[&grid, &p_in, &p_ex])?
    } else {
        let c = curves(a.nu, a.n, &grid)?;
        let col = |f: fn(&nuqg_core::analytics::CurvePoint) -> f64| c.iter().map(f).collect::<Vec<_>>();
        CsvTable::from_columns(["s", "p_in", "p_ex", "p_gue"], &[&grid, &col(|p| p.p_in), &col(|p| p.p_ex), &col(|p| p.p_gue)])?
    };
    let t = t.meta("nu", a.nu).meta("N", a.n).meta("finite", a.finite);
    run.table("rmt_curve", &t)?;
    run.finish()
}

fn gap_prob(cli: &Cli, a: &GapProbArgs) -> Result<()> {
    let mut run = Run::new(cli, "gap-prob", a)?;
    let samples = if a.mc > 0 { Some(sample_joint_many(a.n, a.nu, a.mc, cli.seed)?) } else { None };
    let mut cols = vec!["width", "h", "probability"];
    if samples.is_some() {
        cols.extend(["monte_carlo", "standard_error"]);
    }
    let mut t = CsvTable::new(cols).meta("N", a.n).meta("nu", a.nu).meta("draws", a.mc);
    for &w in &a.widths {
        let h = w * PI / a.n as f64;
        let bounds = GapBounds::symmetric(h)?;
        let e = gap_probability(&bounds, a.n, a.nu)?.value;
        let mut row = vec![w, h, e];
        if let Some(s) = &samples {
            let (p, se) = gap_fraction(s, &bounds)?;
            row.extend([p, se]);
        }
        t.push(row)?;
    }
    run.table("gap_prob", &t)?;
    run.finish()
}

fn surmise(cli: &Cli, a: &SurmiseArgs) -> Result<()> {
    let mut run = Run::new(cli, "surmise", a)?;
    let params = SurmiseParams::new(a.nu)?;
    let grid = uniform_grid(a.smax, a.ds)?;
    let s_in: Vec<f64> = grid.iter().map(|&s| shifted_surmise(s, params.c_in)).collect();
    let s_ex: Vec<f64> = grid.iter().map(|&s| shifted_surmise(s, params.c_ex)).collect();
    let mut t = if a.exact {
        let pts = grid.par_iter().map(|&s| densities_signed(a.nu, s, DEFAULT_N)).collect::<nuqg_core::Result<Vec<_>>>()?;
        let e_in: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let e_ex: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let d_in: Vec<f64> = s_in.iter().zip(&e_in).map(|(a, b)| a - b).collect();
        let d_ex: Vec<f64> = s_ex.iter().zip(&e_ex).map(|(a, b)| a - b).collect();
        let sup = |d: &[f64]| d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        println!("sup deviation internal {:.4}, external {:.4}", sup(&d_in), sup(&d_ex));
        CsvTable::from_columns(
            ["s", "p_in", "p_ex", "exact_in", "exact_ex", "dev_in", "dev_ex"],
            &[&grid, &s_in, &s_ex, &e_in, &e_ex, &d_in, &d_ex],
        )?
        .meta("sup_dev_in", sup(&d_in))
        .meta("sup_dev_ex", sup(&d_ex))
    } else {
        CsvTable::from_columns(["s", "p_in", "p_ex"], &[&grid, &s_in, &s_ex])?
    };
    t = t.meta("nu", a.nu).meta("c_in", params.c_in).meta("c_ex", params.c_ex);
    println!("thresholds c_in = {:.6}, c_ex = {:.6}", params.c_in, params.c_ex);
    run.table("surmise", &t)?;
    run.finish()
}

fn scar(cli: &Cli, a: &ScarArgs) -> Result<()> {
    let mut run = Run::new(cli, "scar", a)?;
    let g = build(&a.graph, cli.seed)?.base;
    let edges: Vec<usize> = if a.edges.is_empty() { (0..g.edge_count()).collect() } else { a.edges.clone() };
    let report = scar_analysis(&g, &edges, &k_options(cli.seed, a.samples))?;
    let mut summary = CsvTable::new([
        "edge",
        "short_cycle",
        "samples",
        "mean",
        "ks_statistic",
        "ks_p_value",
        "tail_mass",
        "tail_expected",
        "rejects_exponential",
    ])
    .meta("graph", &a.graph.graph)
    .meta("k_samples", a.samples);
    let mut hist = CsvTable::new(["edge", "x_lo", "x_hi", "density"])
        .meta("graph", &a.graph.graph)
        .meta("x", "edge count times overlap");
    for e in &report.edges {
        summary.push(vec![
            e.edge as f64,
            e.cycle.unwrap_or(0) as f64,
            e.samples as f64,
            e.mean,
            e.ks.statistic,
            e.ks.p_value,
            e.tail_mass,
            e.tail_expected,
            flag(e.rejects_exponential()),
        ])?;
        for (i, d) in e.histogram.density.iter().enumerate() {
            hist.push(vec![e.edge as f64, e.histogram.edges[i], e.histogram.edges[i + 1], *d])?;
        }
    }
    let rejected = report.edges.iter().filter(|e| e.rejects_exponential()).count();
    println!("{rejected} of {} edges reject the exponential law", report.edges.len());
    run.table("scar_summary", &summary)?;
    run.table("scar_hist", &hist)?;
    run.finish()
}

fn rank_k(cli: &Cli, a: &RankKArgs) -> Result<()> {
    let mut run = Run::new(cli, "rank-k", a)?;
    let g = build(&a.graph, cli.seed)?.base;
    let edges = if a.edges.is_empty() {
        let e = spread_generic_edges(&g, a.rank);
        if e.len() < a.rank {
            bail!(nuqg_core::Error::InvalidParameter(format!(
                "only {} vertex-disjoint generic edges available for rank {}",
                e.len(),
                a.rank
            )));
        }
        e
    } else {
        a.edges.clone()
    };
    let rep = rank_k_experiment(&g, &edges, a.nu, &k_options(cli.seed, a.samples), a.bin_width, (0.0, a.smax))?;
    let goe = compare_curves(&rep.histogram, &rep.goe)?.expected;
    let r1 = compare_curves(&rep.histogram, &rep.rank_one)?.expected;
    let edge_list = edges.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ");
    let mut t = CsvTable::new(["s_lo", "s_hi", "count", "density", "goe", "rank_one"])
        .meta("graph", &a.graph.graph)
        .meta("edges", &edge_list)
        .meta("nu", a.nu)
        .meta("sup_goe", rep.sup_goe)
        .meta("sup_rank_one", rep.sup_rank_one)
        .meta("first_bin", rep.first_bin);
    let h = &rep.histogram;
    for i in 0..h.bin_count() {
        t.push(vec![h.edges[i], h.edges[i + 1], h.counts[i] as f64, h.density[i], goe[i], r1[i]])?;
    }
    println!(
        "rank {} on edges [{edge_list}]: first bin {:.4}, sup to GOE {:.4}, sup to rank one {:.4}",
        rep.rank, rep.first_bin, rep.sup_goe, rep.sup_rank_one
    );
    run.table("rank_k", &t)?;
    run.finish()
}

fn meta_value<'a>(t: &'a CsvTable, key: &str) -> Result<&'a str> {
    t.metadata
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| anyhow!("histogram file lacks the {key:?} metadata line"))
}

fn meta_number<T: std::str::FromStr>(t: &CsvTable, key: &str) -> Result<T> {
    let v = meta_value(t, key)?;
    v.parse().map_err(|_| anyhow!("metadata {key} = {v:?} is not a number"))
}

/// Rebuild one column of an `nn-dist` histogram file.
fn read_histogram(path: &Path, column: Column) -> Result<(CsvTable, Histogram)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let t = CsvTable::parse(&text)?;
    let width: f64 = meta_number(&t, "bin_width")?;
    let (lo, hi) = meta_value(&t, "range")?.split_once(',').ok_or_else(|| anyhow!("bad range metadata"))?;
    let range = (lo.trim().parse::<f64>()?, hi.trim().parse::<f64>()?);
    let col = |name: &str| t.column(name).ok_or_else(|| anyhow!("histogram file lacks column {name:?}"));
    let (counts, total): (Vec<f64>, usize) = match column {
        Column::Internal => (col("count_internal")?, meta_number(&t, "total_internal")?),
        Column::External => (col("count_external")?, meta_number(&t, "total_external")?),
        Column::Combined => {
            let a = col("count_internal")?;
            let b = col("count_external")?;
            let n = meta_number::<usize>(&t, "total_internal")? + meta_number::<usize>(&t, "total_external")?;
            (a.iter().zip(&b).map(|(x, y)| x + y).collect(), n)
        }
    };
    let edges = bin_edges(width, range)?;
    if edges.len() != counts.len() + 1 {
        bail!(nuqg_core::Error::GridMismatch(format!("{} bins in the file, {} from its metadata", counts.len(), edges.len() - 1)));
    }
    let counts: Vec<u64> = counts.iter().map(|&c| c as u64).collect();
    let inside: u64 = counts.iter().sum();
    let density = counts.iter().map(|&c| c as f64 / (total as f64 * width)).collect();
    let hist = Histogram { edges, counts, density, total, underflow: 0, overflow: total - inside as usize };
    Ok((t, hist))
}

fn compare(cli: &Cli, a: &CompareArgs) -> Result<()> {
    let mut run = Run::new(cli, "compare", a)?;
    let (t, hist) = read_histogram(&a.hist, a.column)?;
    let nu = match a.nu {
        Some(nu) => nu,
        None => meta_number(&t, "nu")?,
    };
    let s_max = *hist.edges.last().expect("bins");
    let grid = uniform_grid(s_max, hist.width() / 5.0)?;
    let p = match a.curve {
        Curve::Exact => grid
            .par_iter()
            .map(|&s| {
                let (i, e) = densities_signed(nu, s, DEFAULT_N)?;
                Ok(match a.column {
                    Column::Internal => i,
                    Column::External => e,
                    Column::Combined => 0.5 * (i + e),
                })
            })
            .collect::<nuqg_core::Result<Vec<_>>>()?,
        Curve::Surmise => {
            let sp = SurmiseParams::new(nu)?;
            grid.iter()
                .map(|&s| match a.column {
                    Column::Internal => shifted_surmise(s, sp.c_in),
                    Column::External => shifted_surmise(s, sp.c_ex),
                    Column::Combined => 0.5 * (shifted_surmise(s, sp.c_in) + shifted_surmise(s, sp.c_ex)),
                })
                .collect()
        }
        Curve::Gue => grid.par_iter().map(|&s| p_gue_exact(s, DEFAULT_N)).collect::<nuqg_core::Result<Vec<_>>>()?,
    };
    let cmp = compare_curves(&hist, &AnalyticCurve::new(grid, p)?)?;
    let mut out = CsvTable::new(["s_lo", "s_hi", "observed", "expected", "residual"])
        .meta("source_file", a.hist.display())
        .meta("column", serde_json::to_value(a.column)?.as_str().unwrap_or_default())
        .meta("curve", serde_json::to_value(a.curve)?.as_str().unwrap_or_default())
        .meta("nu", nu)
        .meta("sup_norm", cmp.sup_norm)
        .meta("chi2", cmp.chi2)
        .meta("dof", cmp.dof);
    for i in 0..hist.bin_count() {
        out.push(vec![hist.edges[i], hist.edges[i + 1], hist.density[i], cmp.expected[i], cmp.residuals[i]])?;
    }
    println!("sup-norm {:.4}, chi2 {:.1} on {} bins", cmp.sup_norm, cmp.chi2, cmp.dof);
    run.table("compare", &out)?;
    run.finish()
}
