//! Fragmentation plans: the output document shared by every method, plus
//! partition validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kocluster::{ClusterError, ClusterMode, ClusterOptions, Clustering};
use crate::similarity::{Measure, MeasureError, SimilarityMatrix};
use crate::workload::{EvalError, WorkloadError};

/// Significant digits kept when numbers enter a plan document. Internal
/// computation stays unrounded.
pub const PLAN_SIGNIFICANT_DIGITS: u32 = 6;

/// Pipeline-level failures.
#[derive(Debug, Error)]
pub enum FragmentError {
    #[error("vertical fragmentation needs at least one attribute")]
    NoAttributes,
    #[error("vertical fragmentation needs at least one query")]
    NoQueries,
    #[error("horizontal fragmentation needs at least one record")]
    NoRecords,
    #[error("horizontal fragmentation needs at least one predicate")]
    NoPredicates,
    #[error("binary matrix is empty")]
    EmptyMatrix,
    #[error("bond-energy split needs at least two attributes")]
    TooFewAttributes,
    #[error("{count} predicates would generate 2^{count} minterms, above the cap of {cap}")]
    TooManyPredicates { count: usize, cap: usize },
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
}

/// The fragmentation method that produced a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "ko-vertical")]
    KoVertical,
    #[serde(rename = "ko-horizontal")]
    KoHorizontal,
    #[serde(rename = "bea")]
    Bea,
    #[serde(rename = "phorizontal")]
    Phorizontal,
}

impl Method {
    pub fn is_vertical(self) -> bool {
        matches!(self, Method::KoVertical | Method::Bea)
    }

    pub fn is_horizontal(self) -> bool {
        !self.is_vertical()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::KoVertical => "ko-vertical",
            Method::KoHorizontal => "ko-horizontal",
            Method::Bea => "bea",
            Method::Phorizontal => "phorizontal",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One fragment: a named, disjoint piece of the attribute or record set.
/// Vertical fragments of a workload with declared key attributes also
/// carry the materialization list (members plus replicated keys).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fragment {
    pub name: String,
    pub members: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub materialize: Option<Vec<String>>,
}

/// A complete fragmentation plan: method, the parameters it ran with,
/// the fragments, quality metrics, and the convergence flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentationPlan {
    pub method: Method,
    pub params: serde_json::Value,
    pub fragments: Vec<Fragment>,
    pub metrics: BTreeMap<String, f64>,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<serde_json::Value>,
}

impl FragmentationPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serialization cannot fail")
    }

    pub fn from_json(input: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(input)
    }

    /// The plan's partition as a set of member sets, for order- and
    /// name-insensitive comparison.
    pub fn partition(&self) -> BTreeSet<BTreeSet<String>> {
        self.fragments
            .iter()
            .map(|f| f.members.iter().cloned().collect())
            .collect()
    }

    pub fn same_partition(&self, other: &FragmentationPlan) -> bool {
        self.partition() == other.partition()
    }
}

/// Rounds to `digits` significant digits (plan display precision).
pub fn round_sig(value: f64, digits: u32) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    let magnitude = value.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits as i32 - 1 - magnitude);
    (value * factor).round() / factor
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Completeness,
    Disjointness,
    EmptyFragment,
    UnknownMember,
    KeyReplication,
    Method,
}

/// One broken correctness rule, naming the object that breaks it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

/// Outcome of checking a plan against the correctness rules:
/// completeness, disjointness, non-emptiness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Checks that the fragments partition `expected` exactly: every id in
/// exactly one fragment, no empty fragment, no stray member.
pub(crate) fn check_partition(
    expected: &[String],
    fragments: &[Fragment],
    entity: &str,
) -> Vec<Violation> {
    let mut violations = Vec::new();
    for fragment in fragments {
        if fragment.members.is_empty() {
            violations.push(Violation {
                kind: ViolationKind::EmptyFragment,
                detail: format!("fragment '{}' has no members", fragment.name),
            });
        }
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for fragment in fragments {
        for member in &fragment.members {
            *counts.entry(member.as_str()).or_insert(0) += 1;
        }
    }
    for (member, count) in &counts {
        if !expected.iter().any(|e| e == member) {
            violations.push(Violation {
                kind: ViolationKind::UnknownMember,
                detail: format!("{entity} '{member}' is not part of the workload"),
            });
        } else if *count > 1 {
            violations.push(Violation {
                kind: ViolationKind::Disjointness,
                detail: format!("{entity} '{member}' appears in {count} fragments"),
            });
        }
    }
    for id in expected {
        if !counts.contains_key(id.as_str()) {
            violations.push(Violation {
                kind: ViolationKind::Completeness,
                detail: format!("{entity} '{id}' appears in no fragment"),
            });
        }
    }
    violations
}

/// Builds the plan document for a clustering-based pipeline.
pub(crate) fn plan_from_clustering(
    method: Method,
    prefix: &str,
    measure: Measure,
    matrix: &SimilarityMatrix,
    clustering: &Clustering,
    opts: &ClusterOptions,
    key_attributes: &[String],
) -> FragmentationPlan {
    let ids = matrix.ids();
    let fragments = clustering
        .clusters
        .iter()
        .enumerate()
        .map(|(index, cluster)| {
            let members: Vec<String> = cluster.iter().map(|&i| ids[i].clone()).collect();
            let materialize = if key_attributes.is_empty() {
                None
            } else {
                // keys replicate into every fragment's materialization,
                // listed in attribute input order
                let mut wanted: BTreeSet<&str> =
                    members.iter().map(String::as_str).collect();
                wanted.extend(key_attributes.iter().map(String::as_str));
                Some(
                    ids.iter()
                        .filter(|id| wanted.contains(id.as_str()))
                        .cloned()
                        .collect(),
                )
            };
            Fragment {
                name: format!("{prefix}{}", index + 1),
                members,
                materialize,
            }
        })
        .collect();

    let mut params = serde_json::Map::new();
    match opts.mode {
        ClusterMode::Auto => {
            params.insert("mode".into(), "auto".into());
        }
        ClusterMode::TargetK(k) => {
            params.insert("mode".into(), "target_k".into());
            params.insert("k".into(), k.into());
        }
    }
    params.insert("gamma_threshold".into(), opts.gamma_threshold.into());
    params.insert("max_iters".into(), opts.max_iters.into());
    params.insert(
        "measure".into(),
        serde_json::to_value(measure).expect("measure serializes"),
    );

    FragmentationPlan {
        method,
        params: serde_json::Value::Object(params),
        fragments,
        metrics: clustering_metrics(matrix, &clustering.clusters, clustering.iterations),
        converged: clustering.converged,
        matrices: None,
    }
}

/// Plan quality metrics: mean/min per-fragment intra-similarity, the
/// strongest similarity crossing a fragment boundary, and the gap between
/// the two (only meaningful with at least two fragments).
pub(crate) fn clustering_metrics(
    matrix: &SimilarityMatrix,
    clusters: &[Vec<usize>],
    iterations: usize,
) -> BTreeMap<String, f64> {
    let mut metrics = BTreeMap::new();
    metrics.insert("iterations".to_string(), iterations as f64);
    metrics.insert("fragments".to_string(), clusters.len() as f64);

    let intra: Vec<f64> = clusters
        .iter()
        .map(|cluster| {
            if cluster.len() < 2 {
                return 1.0;
            }
            let mut sum = 0.0;
            let mut pairs = 0usize;
            for (pos, &a) in cluster.iter().enumerate() {
                for &b in &cluster[(pos + 1)..] {
                    sum += matrix.get(a, b);
                    pairs += 1;
                }
            }
            sum / pairs as f64
        })
        .collect();
    let mean_intra = intra.iter().sum::<f64>() / intra.len() as f64;
    metrics.insert(
        "mean_intra_similarity".to_string(),
        round_sig(mean_intra, PLAN_SIGNIFICANT_DIGITS),
    );

    if clusters.len() >= 2 {
        let min_intra = intra.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut max_inter = 0.0f64;
        for (pos, a) in clusters.iter().enumerate() {
            for b in &clusters[(pos + 1)..] {
                for &i in a {
                    for &j in b {
                        max_inter = max_inter.max(matrix.get(i, j));
                    }
                }
            }
        }
        metrics.insert(
            "max_inter_similarity".to_string(),
            round_sig(max_inter, PLAN_SIGNIFICANT_DIGITS),
        );
        metrics.insert(
            "separation_gap".to_string(),
            round_sig(min_intra - max_inter, PLAN_SIGNIFICANT_DIGITS),
        );
    }
    metrics
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fragment(name: &str, members: &[&str]) -> Fragment {
        Fragment {
            name: name.into(),
            members: members.iter().map(|m| m.to_string()).collect(),
            materialize: None,
        }
    }

    #[test]
    fn round_sig_six_digits() {
        assert_eq!(round_sig(0.99170947, 6), 0.991709);
        assert_eq!(round_sig(34330.0, 6), 34330.0);
        assert_eq!(round_sig(0.0073297, 6), 0.0073297);
        assert_eq!(round_sig(1234567.89, 6), 1234570.0);
        assert_eq!(round_sig(0.0, 6), 0.0);
        assert_eq!(round_sig(-0.99170947, 6), -0.991709);
    }

    #[test]
    fn partition_check_passes_exact_cover() {
        let expected: Vec<String> = ["A1", "A2", "A3"].map(String::from).to_vec();
        let fragments = [fragment("V1", &["A1", "A3"]), fragment("V2", &["A2"])];
        assert!(check_partition(&expected, &fragments, "attribute").is_empty());
    }

    #[test]
    fn partition_check_names_missing_member() {
        let expected: Vec<String> = ["A1", "A2"].map(String::from).to_vec();
        let fragments = [fragment("V1", &["A1"])];
        let violations = check_partition(&expected, &fragments, "attribute");
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].kind, ViolationKind::Completeness);
        assert!(violations[0].detail.contains("A2"));
    }

    #[test]
    fn partition_check_names_duplicated_member() {
        let expected: Vec<String> = ["A1", "A2"].map(String::from).to_vec();
        let fragments = [fragment("V1", &["A1", "A2"]), fragment("V2", &["A2"])];
        let violations = check_partition(&expected, &fragments, "attribute");
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].kind, ViolationKind::Disjointness);
        assert!(violations[0].detail.contains("A2"));
    }

    #[test]
    fn plan_json_round_trip() {
        let plan = FragmentationPlan {
            method: Method::KoVertical,
            params: serde_json::json!({"mode": "auto"}),
            fragments: vec![fragment("V1", &["A1"])],
            metrics: BTreeMap::from([("iterations".to_string(), 2.0)]),
            converged: true,
            matrices: None,
        };
        let parsed = FragmentationPlan::from_json(&plan.to_json()).unwrap();
        assert_eq!(plan, parsed);
    }
}
