use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use flohaar::analysis::{trace_samples, EnsembleSampler};
use flohaar::clifford_samplers::sample_clifford_active;
use flohaar::commutant::commutant_dimension;
use flohaar::hurwitz_oracle::compile_so;
use flohaar::representations::{adjoint_matrix, trace_abs2};
use flohaar::turnover::compress_active_triangular;
use flohaar::{Ensemble, Group};
use flohaar_bench::{circuits, orthogonal_matrices};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_circuit");
    for e in [Ensemble::ActiveHaar, Ensemble::PassiveHaar, Ensemble::OracleActive] {
        for n in [4, 8] {
            let s = EnsembleSampler::new(e, n, 1).unwrap();
            let mut i = 0u64;
            g.bench_with_input(BenchmarkId::new(e.name(), n), &n, |b, _| {
                b.iter(|| {
                    i += 1;
                    black_box(s.circuit(i))
                })
            });
        }
    }
    g.finish();

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    c.bench_function("clifford_algorithm1_n50", |b| b.iter(|| black_box(sample_clifford_active(50, &mut rng))));
}

fn adjoint(c: &mut Criterion) {
    let cs = circuits(Ensemble::ActiveHaar, 8, 64);
    c.bench_function("adjoint_and_trace_n8", |b| {
        b.iter(|| cs.iter().map(|c| trace_abs2(&adjoint_matrix(c))).sum::<f64>())
    });
    c.bench_function("frame_potential_traces_n4_1000", |b| {
        b.iter(|| black_box(trace_samples(Ensemble::ActiveHaar, 4, 1000, 9).unwrap()))
    });
}

fn compile_and_compress(c: &mut Criterion) {
    let ms = orthogonal_matrices(8, 32);
    c.bench_function("compile_so_d8", |b| b.iter(|| ms.iter().map(|m| black_box(compile_so(m).unwrap())).next_back()));
    let tri = circuits(Ensemble::ActiveHaarTri, 4, 32);
    c.bench_function("compress_triangle_n4", |b| {
        b.iter(|| tri.iter().map(|c| compress_active_triangular(c).unwrap().turnovers).sum::<usize>())
    });
}

fn commutant(c: &mut Criterion) {
    let mut g = c.benchmark_group("commutant");
    g.sample_size(10);
    for (group, n, t) in [(Group::Active, 4, 5), (Group::Passive, 4, 5), (Group::Active, 6, 4)] {
        g.bench_function(format!("{group}_n{n}_t{t}"), |b| b.iter(|| commutant_dimension(group, n, t).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, sampling, adjoint, compile_and_compress, commutant);
criterion_main!(benches);
