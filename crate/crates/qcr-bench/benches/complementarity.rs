use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qcr_bench::{bases, mixed_state};
use qcr_core::{
    bound_b_best_order, bound_b_oracle, bound_b_ordered, check_discord_relation,
    check_multipartite_conditional, dephase, partial_trace, rel_entropy_coherence, thermal_discord,
    von_neumann_entropy, RelationOptions,
};

fn bench_entropy(c: &mut Criterion) {
    let mut g = c.benchmark_group("entropy");
    for dims in [vec![2, 2], vec![2, 2, 2, 2]] {
        let rho = mixed_state(&dims, 11);
        let d: usize = dims.iter().product();
        g.bench_function(format!("von_neumann/d{d}"), |b| {
            b.iter(|| von_neumann_entropy(black_box(&rho)).unwrap())
        });
    }
    g.finish();
}

fn bench_state_maps(c: &mut Criterion) {
    let mut g = c.benchmark_group("state_maps");
    let rho = mixed_state(&[2, 2, 2, 2], 13);
    g.bench_function("partial_trace/16_to_4", |b| {
        b.iter(|| partial_trace(black_box(&rho), &[0, 1]).unwrap())
    });
    let m = &bases(16, 1, 17)[0];
    g.bench_function("dephase/d16", |b| {
        b.iter(|| dephase(black_box(&rho), black_box(m)).unwrap())
    });
    g.finish();
}

fn bench_quantities(c: &mut Criterion) {
    let mut g = c.benchmark_group("quantities");
    let basis = &bases(2, 1, 23)[0];
    let rho2 = mixed_state(&[2], 19);
    g.bench_function("coherence/qubit", |b| {
        b.iter(|| rel_entropy_coherence(black_box(&rho2), black_box(basis)).unwrap())
    });
    let rho22 = mixed_state(&[2, 2], 29);
    g.bench_function("thermal_discord/two_qubit", |b| {
        b.iter(|| thermal_discord(black_box(&rho22), black_box(basis), 0).unwrap())
    });
    g.finish();
}

fn bench_bound(c: &mut Criterion) {
    let mut g = c.benchmark_group("bound");
    for d in [2usize, 3] {
        let ms = bases(d, 3, 31);
        g.bench_function(format!("chain/d{d}_n3"), |b| {
            b.iter(|| bound_b_ordered(black_box(&ms)).unwrap())
        });
        g.bench_function(format!("oracle/d{d}_n3"), |b| {
            b.iter(|| bound_b_oracle(black_box(&ms)).unwrap())
        });
    }
    let ms = bases(2, 5, 37);
    g.bench_function("best_order/d2_n5", |b| {
        b.iter(|| bound_b_best_order(black_box(&ms)).unwrap())
    });
    g.finish();
}

fn bench_relations(c: &mut Criterion) {
    let mut g = c.benchmark_group("relations");
    let opts = RelationOptions::default();
    let rho = mixed_state(&[2, 2], 41);
    let ms = bases(2, 2, 43);
    g.bench_function("discord_memory/two_qubit_pair", |b| {
        b.iter(|| check_discord_relation(black_box(&rho), black_box(&ms), 0, &[1], &opts).unwrap())
    });
    let rho4 = mixed_state(&[2, 2, 2, 2], 47);
    let ms3 = bases(2, 3, 53);
    g.bench_function("multipartite/four_party_triple", |b| {
        b.iter(|| check_multipartite_conditional(black_box(&rho4), black_box(&ms3), &opts).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_entropy,
    bench_state_maps,
    bench_quantities,
    bench_bound,
    bench_relations
);
criterion_main!(benches);
