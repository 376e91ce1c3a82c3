//! Deterministic input generators for the benchmarks.

use dbfrag::similarity::{AffinityMatrix, SimilarityMatrix};
use dbfrag::workload::{parse_workload, Workload};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_similarity_matrix(rng: &mut ChaCha8Rng, n: usize) -> SimilarityMatrix {
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let v = rng.gen_range(0.0..=1.0);
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    SimilarityMatrix::from_values((0..n).map(|i| format!("o{i}")).collect(), values)
        .expect("generated matrix is valid")
}

pub fn random_affinity_matrix(rng: &mut ChaCha8Rng, n: usize) -> AffinityMatrix {
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(0.0..100.0);
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    AffinityMatrix::from_values((0..n).map(|i| format!("A{i}")).collect(), values)
        .expect("generated matrix is valid")
}

/// Workload with `n_records` numeric records and `n_predicates` range
/// predicates, for the horizontal pipelines.
pub fn random_record_workload(
    rng: &mut ChaCha8Rng,
    n_records: usize,
    n_predicates: usize,
) -> Workload {
    let records: Vec<String> = (0..n_records)
        .map(|i| {
            format!(
                r#"{{"id": "r{i}", "values": {{"x": {}}}}}"#,
                rng.gen_range(0..1000)
            )
        })
        .collect();
    let ops = ["<", "<=", ">", ">=", "=", "!="];
    let predicates: Vec<String> = (0..n_predicates)
        .map(|i| {
            format!(
                r#"{{"id": "p{i}", "attr": "x", "op": "{}", "value": {}}}"#,
                ops[rng.gen_range(0..ops.len())],
                rng.gen_range(0..1000)
            )
        })
        .collect();
    parse_workload(&format!(
        r#"{{"attributes": ["x"], "records": [{}], "predicates": [{}]}}"#,
        records.join(", "),
        predicates.join(", ")
    ))
    .expect("generated workload is valid")
}

/// Workload with `n_attrs` attributes and random query usage, for the
/// vertical pipelines.
pub fn random_query_workload(rng: &mut ChaCha8Rng, n_attrs: usize, n_queries: usize) -> Workload {
    let attributes: Vec<String> = (0..n_attrs).map(|i| format!("\"A{i}\"")).collect();
    let queries: Vec<String> = (0..n_queries)
        .map(|qi| {
            let uses: Vec<String> = (0..n_attrs)
                .filter(|_| rng.gen_bool(0.3))
                .map(|a| format!("\"A{a}\""))
                .collect();
            let uses = if uses.is_empty() {
                vec![format!("\"A{}\"", rng.gen_range(0..n_attrs))]
            } else {
                uses
            };
            format!(
                r#"{{"id": "q{qi}", "uses": [{}], "freq": {}}}"#,
                uses.join(", "),
                rng.gen_range(1..100)
            )
        })
        .collect();
    parse_workload(&format!(
        r#"{{"attributes": [{}], "queries": [{}]}}"#,
        attributes.join(", "),
        queries.join(", ")
    ))
    .expect("generated workload is valid")
}
