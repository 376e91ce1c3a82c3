//! Vertical fragmentation pipeline: workload → feature vectors → cosine
//! similarity → clustering → attribute fragments.

use crate::kocluster::{cluster, ClusterOptions};
use crate::plan::{
    check_partition, plan_from_clustering, FragmentError, FragmentationPlan, Method,
    ValidationReport, Violation, ViolationKind,
};
use crate::similarity::{Measure, SimilarityMatrix};
use crate::workload::Workload;

/// Cosine similarity matrix of the workload's attribute feature vectors.
pub fn attribute_similarity(w: &Workload) -> Result<SimilarityMatrix, FragmentError> {
    if w.attributes.is_empty() {
        return Err(FragmentError::NoAttributes);
    }
    let vectors: Vec<Vec<f64>> = w
        .feature_vectors()
        .map_err(|_| FragmentError::NoQueries)?
        .into_iter()
        .map(|v| v.measures)
        .collect();
    Ok(SimilarityMatrix::from_feature_vectors(
        w.attributes.clone(),
        &vectors,
    )?)
}

/// Fragments the attribute set by clustering cosine similarity of the
/// frequency-weighted usage vectors. Key attributes participate in
/// clustering like any other attribute; the plan replicates them into
/// every fragment's materialization list.
pub fn vertical_fragment(
    w: &Workload,
    opts: &ClusterOptions,
) -> Result<FragmentationPlan, FragmentError> {
    let matrix = attribute_similarity(w)?;
    let clustering = cluster(&matrix, opts)?;
    Ok(plan_from_clustering(
        Method::KoVertical,
        "V",
        Measure::Cosine,
        &matrix,
        &clustering,
        opts,
        &w.key_attributes,
    ))
}

/// Checks completeness, disjointness, and non-emptiness of a vertical
/// plan against the workload's attribute set. Violations are report
/// content, never errors.
pub fn validate_vertical(plan: &FragmentationPlan, w: &Workload) -> ValidationReport {
    let mut violations = Vec::new();
    if !plan.method.is_vertical() {
        violations.push(Violation {
            kind: ViolationKind::Method,
            detail: format!("'{}' is not a vertical method", plan.method),
        });
    } else {
        violations = check_partition(&w.attributes, &plan.fragments, "attribute");
        for fragment in &plan.fragments {
            let materialized = fragment.materialize.as_ref().unwrap_or(&fragment.members);
            for key in &w.key_attributes {
                if !materialized.contains(key) {
                    violations.push(Violation {
                        kind: ViolationKind::KeyReplication,
                        detail: format!(
                            "key attribute '{key}' missing from fragment '{}'",
                            fragment.name
                        ),
                    });
                }
            }
        }
    }
    ValidationReport {
        valid: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::paper_vertical_workload;
    use crate::parse_workload;
    use crate::plan::Fragment;

    fn members(plan: &FragmentationPlan) -> Vec<Vec<String>> {
        plan.fragments.iter().map(|f| f.members.clone()).collect()
    }

    #[test]
    fn paper_workload_fragments() {
        let w = paper_vertical_workload();
        let plan = vertical_fragment(&w, &ClusterOptions::default()).unwrap();
        assert_eq!(plan.method, Method::KoVertical);
        assert_eq!(members(&plan), [["A1", "A3"], ["A2", "A4"]]);
        assert!(plan.converged);
        assert!(validate_vertical(&plan, &w).valid);
    }

    #[test]
    fn single_attribute_single_fragment() {
        let w = parse_workload(
            r#"{"attributes": ["A1"], "queries": [{"id": "q1", "uses": ["A1"], "freq": 2}]}"#,
        )
        .unwrap();
        let plan = vertical_fragment(&w, &ClusterOptions::default()).unwrap();
        assert_eq!(members(&plan), [["A1"]]);
    }

    #[test]
    fn disjoint_usage_separates_attributes() {
        let w = parse_workload(
            r#"{"attributes": ["A1", "A2"], "queries": [
                {"id": "q1", "uses": ["A1"], "freq": 10},
                {"id": "q2", "uses": ["A2"], "freq": 20}]}"#,
        )
        .unwrap();
        let plan = vertical_fragment(&w, &ClusterOptions::default()).unwrap();
        assert_eq!(members(&plan), [["A1"], ["A2"]]);
    }

    #[test]
    fn no_queries_is_an_error() {
        let w = parse_workload(r#"{"attributes": ["A1"]}"#).unwrap();
        assert!(matches!(
            vertical_fragment(&w, &ClusterOptions::default()),
            Err(FragmentError::NoQueries)
        ));
    }

    #[test]
    fn key_attributes_replicate_into_materialization() {
        let w = parse_workload(
            r#"{"attributes": ["Id", "A1", "A2"], "key_attributes": ["Id"], "queries": [
                {"id": "q1", "uses": ["A1"], "freq": 10},
                {"id": "q2", "uses": ["A2"], "freq": 20},
                {"id": "q3", "uses": ["Id"], "freq": 1}]}"#,
        )
        .unwrap();
        let plan = vertical_fragment(&w, &ClusterOptions::default()).unwrap();
        for fragment in &plan.fragments {
            let materialized = fragment.materialize.as_ref().unwrap();
            assert!(materialized.contains(&"Id".to_string()));
        }
        assert!(validate_vertical(&plan, &w).valid);
    }

    #[test]
    fn validation_flags_missing_and_duplicated_attributes() {
        let w = paper_vertical_workload();
        let mut plan = vertical_fragment(&w, &ClusterOptions::default()).unwrap();
        plan.fragments[1].members.retain(|m| m != "A4");
        let report = validate_vertical(&plan, &w);
        assert!(!report.valid);
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::Completeness && v.detail.contains("A4")));

        let mut plan = vertical_fragment(&w, &ClusterOptions::default()).unwrap();
        plan.fragments[1].members.push("A3".into());
        let report = validate_vertical(&plan, &w);
        assert!(!report.valid);
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::Disjointness && v.detail.contains("A3")));
    }

    #[test]
    fn validation_rejects_horizontal_method() {
        let w = paper_vertical_workload();
        let plan = FragmentationPlan {
            method: Method::KoHorizontal,
            params: serde_json::json!({}),
            fragments: vec![Fragment {
                name: "H1".into(),
                members: vec!["A1".into()],
                materialize: None,
            }],
            metrics: Default::default(),
            converged: true,
            matrices: None,
        };
        let report = validate_vertical(&plan, &w);
        assert!(!report.valid);
        assert_eq!(report.violations[0].kind, ViolationKind::Method);
    }
}
