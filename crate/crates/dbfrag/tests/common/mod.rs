//! Shared generators for the integration tests. Each test binary uses a
//! different subset, hence the module-wide dead_code allowance.
#![allow(dead_code)]

use dbfrag::similarity::SimilarityMatrix;
use dbfrag::workload::{parse_workload, Workload};
use proptest::prelude::*;
use rand::Rng;

/// Reference vertical workload: 4 attributes, 4 queries, freqs 45/5/75/3.
pub fn paper_vertical_workload() -> Workload {
    parse_workload(
        r#"{
            "attributes": ["A1", "A2", "A3", "A4"],
            "queries": [
                {"id": "q1", "uses": ["A1", "A3"], "freq": 45},
                {"id": "q2", "uses": ["A2", "A3"], "freq": 5},
                {"id": "q3", "uses": ["A2", "A4"], "freq": 75},
                {"id": "q4", "uses": ["A3", "A4"], "freq": 3}
            ]
        }"#,
    )
    .expect("fixture parses")
}

/// Builds a workload from attribute count plus (usage-mask, freq) pairs.
/// Integer frequencies keep every similarity computation exact, so
/// order- and scale-invariance properties can assert bitwise equality.
pub fn workload_from_masks(n_attrs: usize, queries: &[(u64, u32)]) -> Workload {
    let attributes: Vec<String> = (0..n_attrs).map(|i| format!("A{i}")).collect();
    let queries_json: Vec<String> = queries
        .iter()
        .enumerate()
        .map(|(qi, (mask, freq))| {
            let uses: Vec<String> = (0..n_attrs)
                .filter(|a| mask & (1 << a) != 0)
                .map(|a| format!("\"A{a}\""))
                .collect();
            format!(
                r#"{{"id": "q{qi}", "uses": [{}], "freq": {freq}}}"#,
                uses.join(", ")
            )
        })
        .collect();
    let doc = format!(
        r#"{{"attributes": [{}], "queries": [{}]}}"#,
        attributes
            .iter()
            .map(|a| format!("\"{a}\""))
            .collect::<Vec<_>>()
            .join(", "),
        queries_json.join(", ")
    );
    parse_workload(&doc).expect("generated workload is valid")
}

/// Strategy: small workloads with integer frequencies.
pub fn arb_workload() -> impl Strategy<Value = Workload> {
    (1usize..=6).prop_flat_map(|n_attrs| {
        let mask_max = 1u64 << n_attrs;
        proptest::collection::vec((1..mask_max, 0u32..=50), 1..=6)
            .prop_map(move |queries| workload_from_masks(n_attrs, &queries))
    })
}

/// Strategy: workloads with records and numeric predicates, everything
/// evaluable.
pub fn arb_record_workload() -> impl Strategy<Value = Workload> {
    let records = proptest::collection::vec(proptest::collection::vec(0u8..=9, 2), 1..=8);
    let predicates = proptest::collection::vec((0usize..2, 0usize..6, 0u8..=9), 1..=4);
    (records, predicates).prop_map(|(records, predicates)| {
        let ops = ["=", "!=", "<", "<=", ">", ">="];
        let records_json: Vec<String> = records
            .iter()
            .enumerate()
            .map(|(i, values)| {
                format!(
                    r#"{{"id": "r{i}", "values": {{"x0": {}, "x1": {}}}}}"#,
                    values[0], values[1]
                )
            })
            .collect();
        let predicates_json: Vec<String> = predicates
            .iter()
            .enumerate()
            .map(|(i, (attr, op, value))| {
                format!(
                    r#"{{"id": "p{i}", "attr": "x{attr}", "op": "{}", "value": {value}}}"#,
                    ops[*op]
                )
            })
            .collect();
        let doc = format!(
            r#"{{"attributes": ["x0", "x1"], "records": [{}], "predicates": [{}]}}"#,
            records_json.join(", "),
            predicates_json.join(", ")
        );
        parse_workload(&doc).expect("generated workload is valid")
    })
}

/// Strategy: random symmetric similarity matrices with unit diagonal.
pub fn arb_similarity_matrix(max_n: usize) -> impl Strategy<Value = SimilarityMatrix> {
    (1usize..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(0.0f64..=1.0, n * (n.saturating_sub(1)) / 2).prop_map(
            move |upper| similarity_from_upper(n, &upper),
        )
    })
}

pub fn similarity_from_upper(n: usize, upper: &[f64]) -> SimilarityMatrix {
    let mut values = vec![0.0; n * n];
    let mut next = 0;
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let v = upper[next];
            next += 1;
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    let ids = (0..n).map(|i| format!("o{i}")).collect();
    SimilarityMatrix::from_values(ids, values).expect("generated matrix is valid")
}

/// Plain-rand version for seeded oracle loops.
pub fn random_similarity_matrix<R: Rng>(rng: &mut R, n: usize) -> SimilarityMatrix {
    let upper: Vec<f64> = (0..n * (n - 1) / 2).map(|_| rng.gen_range(0.0..=1.0)).collect();
    similarity_from_upper(n, &upper)
}

/// Random workload for the oracle suites (plain rand, seeded by caller).
pub fn random_workload<R: Rng>(rng: &mut R, max_attrs: usize) -> Workload {
    let n_attrs = rng.gen_range(2..=max_attrs);
    let n_queries = rng.gen_range(1..=8);
    let queries: Vec<(u64, u32)> = (0..n_queries)
        .map(|_| {
            let mask = rng.gen_range(1..(1u64 << n_attrs));
            let freq = rng.gen_range(1..=100);
            (mask, freq)
        })
        .collect();
    workload_from_masks(n_attrs, &queries)
}
