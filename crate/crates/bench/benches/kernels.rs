use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use nuqg_core::analytics::{evaluate, gap_probability, GapBounds};
use nuqg_core::graph::{BackscattererPlacement, PerturbedGraph};
use nuqg_core::qmap::assemble_S;
use nuqg_core::rmt::{sample_joint_density, solve_instance, RmtInstance, SecularSolver};
use nuqg_core::spectra::{classify_splittings, forward_eigenphases, quantum_map_eigenphases};
use nuqg_core::stats::{histogram, GraphSpec};
use nuqg_core::surmise::SurmiseParams;

fn secular(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inst = RmtInstance::sample(101, 1.0, &mut rng).unwrap();
    let mut g = c.benchmark_group("secular_n101");
    g.bench_function("rational", |b| b.iter(|| solve_instance(black_box(&inst), SecularSolver::Rational).unwrap()));
    g.bench_function("cot", |b| b.iter(|| solve_instance(black_box(&inst), SecularSolver::Cot).unwrap()));
    g.finish();
    c.bench_function("cue_instance_n101", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        b.iter(|| RmtInstance::sample(101, 1.0, &mut rng).unwrap())
    });
}

fn kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernel_point");
    for n in [50usize, 100] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| evaluate(n, 1.0, black_box(0.7)).unwrap()));
    }
    g.finish();
    c.bench_function("gap_probability_n4", |b| {
        let bounds = GapBounds::symmetric(0.5).unwrap();
        b.iter(|| gap_probability(black_box(&bounds), 4, 1.0).unwrap())
    });
    c.bench_function("joint_density_draw_n4", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        b.iter(|| sample_joint_density(4, 1.0, &mut rng).unwrap())
    });
    c.bench_function("surmise_thresholds", |b| b.iter(|| SurmiseParams::new(black_box(1.3)).unwrap()));
}

fn graph(c: &mut Criterion) {
    let base = GraphSpec::default().build(1).unwrap().base;
    let pg = PerturbedGraph::unperturbed(base).insert(BackscattererPlacement::from_strength(0, 1.0).unwrap()).unwrap();
    let gs = assemble_S(&pg).unwrap();
    let gs0 = assemble_S(&pg.transparent()).unwrap();
    c.bench_function("qmap_eigenphases_v9", |b| b.iter(|| quantum_map_eigenphases(&gs, black_box(12.3), false).unwrap()));
    let pert = quantum_map_eigenphases(&gs, 12.3, false).unwrap().phases;
    let eps = forward_eigenphases(&gs0, 12.3, false).unwrap().phases;
    c.bench_function("classify_v9", |b| b.iter(|| classify_splittings(black_box(&pert), &eps, -1.0).unwrap()));
}

fn stats(c: &mut Criterion) {
    let samples: Vec<f64> = (0..100_000).map(|i| ((i as f64) * 0.618_033_988_75).fract() * 5.0).collect();
    c.bench_function("histogram_1e5", |b| b.iter(|| histogram(black_box(&samples), 0.1, (0.0, 6.0)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = secular, kernel, graph, stats
}
criterion_main!(benches);
