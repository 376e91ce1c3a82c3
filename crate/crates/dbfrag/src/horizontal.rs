//! Horizontal fragmentation pipeline: records + predicates → binary
//! vectors → binary similarity → clustering → record fragments.

use crate::kocluster::{cluster, ClusterOptions};
use crate::plan::{
    check_partition, plan_from_clustering, FragmentError, FragmentationPlan, Method,
    ValidationReport, Violation, ViolationKind,
};
use crate::similarity::{Measure, SimilarityMatrix};
use crate::workload::{vectorize_records, BinaryMatrix, Workload};

/// Binary record-by-predicate matrix of the workload.
pub fn record_vectors(w: &Workload) -> Result<BinaryMatrix, FragmentError> {
    if w.records.is_empty() {
        return Err(FragmentError::NoRecords);
    }
    if w.predicates.is_empty() {
        return Err(FragmentError::NoPredicates);
    }
    Ok(vectorize_records(&w.records, &w.predicates)?)
}

/// Binary similarity matrix over the rows of a record-by-predicate matrix.
pub fn record_similarity(matrix: &BinaryMatrix) -> Result<SimilarityMatrix, FragmentError> {
    Ok(SimilarityMatrix::from_binary_rows(
        matrix.row_ids().to_vec(),
        matrix.rows(),
    )?)
}

/// Fragments the record set by clustering binary similarity of the
/// vectorized records.
pub fn horizontal_fragment(
    w: &Workload,
    opts: &ClusterOptions,
) -> Result<FragmentationPlan, FragmentError> {
    horizontal_fragment_from_matrix(&record_vectors(w)?, opts)
}

/// Same pipeline, starting from an existing binary matrix. Lets callers
/// with precomputed vectorizations bypass predicate evaluation.
pub fn horizontal_fragment_from_matrix(
    matrix: &BinaryMatrix,
    opts: &ClusterOptions,
) -> Result<FragmentationPlan, FragmentError> {
    if matrix.n_rows() == 0 || matrix.n_cols() == 0 {
        return Err(FragmentError::EmptyMatrix);
    }
    let similarity = record_similarity(matrix)?;
    let clustering = cluster(&similarity, opts)?;
    Ok(plan_from_clustering(
        Method::KoHorizontal,
        "H",
        Measure::Jaccard,
        &similarity,
        &clustering,
        opts,
        &[],
    ))
}

/// Checks completeness, disjointness, and non-emptiness of a horizontal
/// plan against the workload's record set.
pub fn validate_horizontal(plan: &FragmentationPlan, w: &Workload) -> ValidationReport {
    let mut violations = Vec::new();
    if !plan.method.is_horizontal() {
        violations.push(Violation {
            kind: ViolationKind::Method,
            detail: format!("'{}' is not a horizontal method", plan.method),
        });
    } else {
        let record_ids: Vec<String> = w.records.iter().map(|r| r.id.clone()).collect();
        violations = check_partition(&record_ids, &plan.fragments, "record");
    }
    ValidationReport {
        valid: violations.is_empty(),
        violations,
    }
}
