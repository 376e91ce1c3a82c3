//! Workload-driven fragmentation design for relational schemas.
//!
//! Given a workload description — the schema's attributes, the queries
//! that use them, and optionally records plus the simple predicates
//! extracted from those queries — this crate computes:
//!
//! * **vertical fragments** (attribute groups) by clustering cosine
//!   similarity of frequency-weighted usage vectors
//!   ([`vertical_fragment`]);
//! * **horizontal fragments** (record groups) by clustering binary
//!   similarity of predicate-vectorized records
//!   ([`horizontal_fragment`]);
//! * the classical **bond-energy** vertical split ([`bea_vertical`]) and
//!   **minterm** horizontal split ([`phorizontal`]) as cross-validation
//!   baselines.
//!
//! The clustering engine ([`kocluster`]) derives a distance threshold per
//! object from the similarity matrix, builds indiscernibility relations,
//! and iterates a refinement over the pairwise indiscernibility degree
//! until the partition stabilizes — the number of fragments emerges from
//! the workload instead of being fixed up front. A target fragment count
//! remains available through [`kocluster::ClusterMode::TargetK`].
//!
//! ```
//! use dbfrag::{parse_workload, vertical_fragment, kocluster::ClusterOptions};
//!
//! let workload = parse_workload(r#"{
//!     "attributes": ["name", "salary", "dept"],
//!     "queries": [
//!         {"id": "payroll", "uses": ["salary"], "freq": 40},
//!         {"id": "directory", "uses": ["name", "dept"], "freq": 10}
//!     ]
//! }"#).unwrap();
//! let plan = vertical_fragment(&workload, &ClusterOptions::default()).unwrap();
//! assert_eq!(plan.fragments.len(), 2);
//! ```

pub mod baselines;
pub mod horizontal;
pub mod kocluster;
pub mod plan;
pub mod similarity;
pub mod vertical;
pub mod workload;

pub use baselines::{
    affinity_matrix, bea_vertical, bond_energy_order, generate_minterms, phorizontal,
    split_partition, ClusteredAffinityMatrix, MintermPredicate, SplitResult,
    DEFAULT_MINTERM_CAP,
};
pub use horizontal::{
    horizontal_fragment, horizontal_fragment_from_matrix, validate_horizontal,
};
pub use kocluster::{
    cluster, cluster_target_k, ClusterError, ClusterMode, ClusterOptions, Clustering,
};
pub use plan::{
    round_sig, FragmentError, Fragment, FragmentationPlan, Method, ValidationReport, Violation,
    ViolationKind,
};
pub use similarity::{
    attribute_affinity, binary_dissimilarity, contingency, cosine_similarity,
    jaccard_similarity, AffinityMatrix, ContingencyCounts, Measure, MeasureError,
    SimilarityMatrix,
};
pub use vertical::{validate_vertical, vertical_fragment};
pub use workload::{
    evaluate_predicate, parse_workload, vectorize_records, AttributeFeatureVector, BinaryMatrix,
    CompareOp, EvalError, Query, Record, Scalar, SimplePredicate, SiteAccess, Workload,
    WorkloadError,
};
