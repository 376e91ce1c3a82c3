use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use dbfrag::baselines::{bond_energy_order, phorizontal};
use dbfrag::kocluster::{cluster, ClusterOptions};
use dbfrag::similarity::SimilarityMatrix;
use dbfrag::vertical::attribute_similarity;
use dbfrag_bench::{
    random_affinity_matrix, random_query_workload, random_record_workload,
    random_similarity_matrix, rng,
};

fn bench_similarity_matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("similarity_matrix");
    for n in [16usize, 64] {
        let workload = random_query_workload(&mut rng(1), n, 32);
        group.bench_with_input(BenchmarkId::new("cosine", n), &workload, |b, w| {
            b.iter(|| attribute_similarity(black_box(w)).unwrap())
        });
    }
    for n in [64usize, 256] {
        let workload = random_record_workload(&mut rng(2), n, 8);
        let matrix = dbfrag::workload::vectorize_records(&workload.records, &workload.predicates)
            .unwrap();
        group.bench_with_input(BenchmarkId::new("binary", n), &matrix, |b, m| {
            b.iter(|| {
                SimilarityMatrix::from_binary_rows(m.row_ids().to_vec(), m.rows()).unwrap()
            })
        });
    }
    group.finish();
}

fn bench_clustering(c: &mut Criterion) {
    let mut group = c.benchmark_group("kocluster");
    for n in [16usize, 64, 128] {
        let sm = random_similarity_matrix(&mut rng(3), n);
        group.bench_with_input(BenchmarkId::new("auto", n), &sm, |b, sm| {
            b.iter(|| cluster(black_box(sm), &ClusterOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_bond_energy(c: &mut Criterion) {
    let mut group = c.benchmark_group("bond_energy_order");
    // 12 exercises the exact search at its limit, 24 the greedy insertion
    for n in [8usize, 12, 24] {
        let aff = random_affinity_matrix(&mut rng(4), n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &aff, |b, aff| {
            b.iter(|| bond_energy_order(black_box(aff)))
        });
    }
    group.finish();
}

fn bench_phorizontal(c: &mut Criterion) {
    let mut group = c.benchmark_group("phorizontal");
    for (records, predicates) in [(200usize, 8usize), (1000, 10)] {
        let workload = random_record_workload(&mut rng(5), records, predicates);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{records}rx{predicates}p")),
            &workload,
            |b, w| b.iter(|| phorizontal(black_box(w)).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_similarity_matrix,
    bench_clustering,
    bench_bond_energy,
    bench_phorizontal
);
criterion_main!(benches);
