//! Pairwise measures: cosine similarity for feature vectors, symmetric
//! binary (dis)similarity for record vectors, attribute affinity, and
//! similarity-matrix assembly.
//!
//! All entries are plain `f64`, unrounded; display rounding happens at the
//! serialization layer only.

use serde::Serialize;
use thiserror::Error;

use crate::workload::{Workload, WorkloadError};

/// Errors from measure evaluation and matrix construction.
#[derive(Debug, Error, PartialEq)]
pub enum MeasureError {
    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("vectors must be non-empty")]
    Empty,
    #[error("matrix needs at least one object")]
    NoObjects,
    #[error("{ids} ids given for {objects} objects")]
    IdCount { ids: usize, objects: usize },
    #[error("{n} ids require {expected} entries, got {found}")]
    ValueCount {
        n: usize,
        expected: usize,
        found: usize,
    },
    #[error("entry ({i},{j}) = {value} is not a similarity in [0,1]")]
    OutOfRange { i: usize, j: usize, value: f64 },
    #[error("entries ({i},{j}) and ({j},{i}) differ")]
    Asymmetric { i: usize, j: usize },
    #[error("diagonal entry ({i},{i}) must be 1")]
    BadDiagonal { i: usize },
}

/// Which pairwise measure a matrix was built with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Cosine,
    Jaccard,
}

/// Contingency counts of two equal-length binary vectors:
/// q = #(1,1), r = #(1,0), s = #(0,1), t = #(0,0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContingencyCounts {
    pub q: usize,
    pub r: usize,
    pub s: usize,
    pub t: usize,
}

impl ContingencyCounts {
    pub fn total(&self) -> usize {
        self.q + self.r + self.s + self.t
    }
}

/// Cosine of the angle between two nonnegative vectors, in [0,1].
///
/// Zero-vector policy: a zero vector is maximally similar to another zero
/// vector (1) and dissimilar to everything else (0). Never-referenced
/// objects therefore cluster together instead of failing the pipeline.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64, MeasureError> {
    if u.len() != v.len() {
        return Err(MeasureError::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let nu = norm(u);
    let nv = norm(v);
    if nu == 0.0 && nv == 0.0 {
        return Ok(1.0);
    }
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    if u == v {
        return Ok(1.0);
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    Ok((dot / (nu * nv)).clamp(0.0, 1.0))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Counts the four agreement/disagreement cases of two binary vectors.
pub fn contingency(x: &[bool], y: &[bool]) -> Result<ContingencyCounts, MeasureError> {
    if x.len() != y.len() {
        return Err(MeasureError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let mut c = ContingencyCounts {
        q: 0,
        r: 0,
        s: 0,
        t: 0,
    };
    for (&a, &b) in x.iter().zip(y) {
        match (a, b) {
            (true, true) => c.q += 1,
            (true, false) => c.r += 1,
            (false, true) => c.s += 1,
            (false, false) => c.t += 1,
        }
    }
    Ok(c)
}

/// Symmetric binary dissimilarity: (r+s)/(q+r+s+t).
pub fn binary_dissimilarity(x: &[bool], y: &[bool]) -> Result<f64, MeasureError> {
    let c = contingency(x, y)?;
    if c.total() == 0 {
        return Err(MeasureError::Empty);
    }
    Ok((c.r + c.s) as f64 / c.total() as f64)
}

/// Complement of [`binary_dissimilarity`]. Note this counts (0,0) matches
/// as agreement, i.e. it is the simple-matching similarity.
pub fn jaccard_similarity(x: &[bool], y: &[bool]) -> Result<f64, MeasureError> {
    Ok(1.0 - binary_dissimilarity(x, y)?)
}

/// Symmetric n×n matrix of pairwise object similarity in [0,1],
/// unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    ids: Vec<String>,
    values: Vec<f64>, // row-major n×n
}

impl SimilarityMatrix {
    /// Builds the cosine similarity matrix of real-valued feature vectors.
    pub fn from_feature_vectors(
        ids: Vec<String>,
        vectors: &[Vec<f64>],
    ) -> Result<Self, MeasureError> {
        Self::build(ids, vectors, |u, v| cosine_similarity(u, v))?.warn_zero_vectors(vectors)
    }

    /// Builds the binary similarity matrix of 0/1 record vectors.
    pub fn from_binary_rows(ids: Vec<String>, rows: &[Vec<bool>]) -> Result<Self, MeasureError> {
        Self::build(ids, rows, |u, v| jaccard_similarity(u, v))
    }

    /// Wraps precomputed values, enforcing the matrix invariants
    /// (square, symmetric, unit diagonal, entries in [0,1]).
    pub fn from_values(ids: Vec<String>, values: Vec<f64>) -> Result<Self, MeasureError> {
        let n = ids.len();
        if n == 0 {
            return Err(MeasureError::NoObjects);
        }
        if values.len() != n * n {
            return Err(MeasureError::ValueCount {
                n,
                expected: n * n,
                found: values.len(),
            });
        }
        for i in 0..n {
            if values[i * n + i] != 1.0 {
                return Err(MeasureError::BadDiagonal { i });
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(MeasureError::OutOfRange { i, j, value: v });
                }
                if values[j * n + i] != v {
                    return Err(MeasureError::Asymmetric { i, j });
                }
            }
        }
        Ok(SimilarityMatrix { ids, values })
    }

    fn build<T>(
        ids: Vec<String>,
        objects: &[T],
        measure: impl Fn(&T, &T) -> Result<f64, MeasureError>,
    ) -> Result<Self, MeasureError> {
        let n = objects.len();
        if n == 0 {
            return Err(MeasureError::NoObjects);
        }
        if ids.len() != n {
            return Err(MeasureError::IdCount {
                ids: ids.len(),
                objects: n,
            });
        }
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
            for j in (i + 1)..n {
                let s = measure(&objects[i], &objects[j])?;
                values[i * n + j] = s;
                values[j * n + i] = s;
            }
        }
        Ok(SimilarityMatrix { ids, values })
    }

    fn warn_zero_vectors(self, vectors: &[Vec<f64>]) -> Result<Self, MeasureError> {
        let zero: Vec<&str> = self
            .ids
            .iter()
            .zip(vectors)
            .filter(|(_, v)| v.iter().all(|&x| x == 0.0))
            .map(|(id, _)| id.as_str())
            .collect();
        if !zero.is_empty() {
            log::warn!(
                "objects with all-zero vectors treated as mutually identical: {}",
                zero.join(", ")
            );
        }
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    /// Distance between two objects: 1 − s(i,j).
    pub fn dissimilarity(&self, i: usize, j: usize) -> f64 {
        1.0 - self.get(i, j)
    }
}

/// Workload-weighted co-access strength of two attributes: the summed
/// access weight of every query that uses both.
pub fn attribute_affinity(w: &Workload, a: &str, b: &str) -> Result<f64, WorkloadError> {
    for name in [a, b] {
        if w.attribute_index(name).is_none() {
            return Err(WorkloadError::UnknownAttribute(name.to_string()));
        }
    }
    Ok(w.queries
        .iter()
        .filter(|q| q.uses_attribute(a) && q.uses_attribute(b))
        .map(|q| q.weight())
        .sum())
}

/// Symmetric nonnegative matrix of pairwise attribute affinities.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    ids: Vec<String>,
    values: Vec<f64>, // row-major n×n
}

impl AffinityMatrix {
    pub fn from_values(ids: Vec<String>, values: Vec<f64>) -> Result<Self, MeasureError> {
        let n = ids.len();
        if n == 0 {
            return Err(MeasureError::NoObjects);
        }
        if values.len() != n * n {
            return Err(MeasureError::ValueCount {
                n,
                expected: n * n,
                found: values.len(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = values[i * n + j];
                if v < 0.0 || !v.is_finite() {
                    return Err(MeasureError::OutOfRange { i, j, value: v });
                }
                if values[j * n + i] != v {
                    return Err(MeasureError::Asymmetric { i, j });
                }
            }
        }
        Ok(AffinityMatrix { ids, values })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{paper_similarity_matrix, paper_vertical_workload, table_v_rows};
    use approx::assert_abs_diff_eq;

    const PAPER_TOL: f64 = 5e-4;

    #[test]
    fn cosine_matches_reference_entries() {
        let va1 = vec![45.0, 0.0, 0.0, 0.0];
        let va2 = vec![0.0, 5.0, 75.0, 0.0];
        let va3 = vec![45.0, 5.0, 0.0, 3.0];
        assert_abs_diff_eq!(
            cosine_similarity(&va1, &va3).unwrap(),
            0.9918,
            epsilon = PAPER_TOL
        );
        assert_eq!(cosine_similarity(&va1, &va2).unwrap(), 0.0);
    }

    #[test]
    fn cosine_self_similarity_is_exactly_one() {
        let v = vec![3.0, 0.5, 7.0];
        assert_eq!(cosine_similarity(&v, &v).unwrap(), 1.0);
    }

    #[test]
    fn cosine_zero_vector_policy() {
        let zero = vec![0.0, 0.0];
        let v = vec![1.0, 2.0];
        assert_eq!(cosine_similarity(&zero, &v).unwrap(), 0.0);
        assert_eq!(cosine_similarity(&zero, &zero).unwrap(), 1.0);
    }

    #[test]
    fn cosine_length_mismatch() {
        assert!(matches!(
            cosine_similarity(&[1.0], &[1.0, 2.0]),
            Err(MeasureError::LengthMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn contingency_counts() {
        let c = contingency(&[true, false], &[false, true]).unwrap();
        assert_eq!((c.q, c.r, c.s, c.t), (0, 1, 1, 0));
        let c = contingency(&[true, false], &[true, false]).unwrap();
        assert_eq!((c.q, c.r, c.s, c.t), (1, 0, 0, 1));
    }

    #[test]
    fn contingency_self_counts_ones_and_zeros() {
        let x = [true, true, false, true, false];
        let c = contingency(&x, &x).unwrap();
        assert_eq!((c.q, c.r, c.s, c.t), (3, 0, 0, 2));
        assert_eq!(c.total(), x.len());
    }

    #[test]
    fn binary_dissimilarity_values() {
        assert_eq!(
            binary_dissimilarity(&[true, false], &[false, true]).unwrap(),
            1.0
        );
        assert_eq!(
            binary_dissimilarity(&[true, false], &[true, false]).unwrap(),
            0.0
        );
        assert_eq!(
            binary_dissimilarity(&[true, false], &[false, false]).unwrap(),
            0.5
        );
        assert!(matches!(
            binary_dissimilarity(&[], &[]),
            Err(MeasureError::Empty)
        ));
    }

    #[test]
    fn jaccard_values() {
        assert_eq!(
            jaccard_similarity(&[true, false], &[false, true]).unwrap(),
            0.0
        );
        assert_eq!(
            jaccard_similarity(&[true, false], &[true, false]).unwrap(),
            1.0
        );
        assert_eq!(
            jaccard_similarity(&[true, false], &[false, false]).unwrap(),
            0.5
        );
    }

    #[test]
    fn paper_cosine_matrix_upper_triangle() {
        let sm = paper_similarity_matrix();
        let expected = [
            (0, 1, 0.0),
            (0, 2, 0.9918),
            (0, 3, 0.0),
            (1, 2, 0.0073),
            (1, 3, 0.9970),
            (2, 3, 0.0026),
        ];
        for (i, j, want) in expected {
            assert_abs_diff_eq!(sm.get(i, j), want, epsilon = PAPER_TOL);
            assert_eq!(sm.get(i, j), sm.get(j, i));
        }
        for i in 0..4 {
            assert_eq!(sm.get(i, i), 1.0);
        }
    }

    #[test]
    fn single_object_matrix() {
        let sm = SimilarityMatrix::from_feature_vectors(vec!["a".into()], &[vec![2.0]]).unwrap();
        assert_eq!(sm.n(), 1);
        assert_eq!(sm.get(0, 0), 1.0);
    }

    #[test]
    fn table_v_jaccard_matrix_entries() {
        let (ids, rows) = table_v_rows();
        let sm = SimilarityMatrix::from_binary_rows(ids, &rows).unwrap();
        assert_eq!(sm.get(0, 2), 1.0); // T1,T3
        assert_eq!(sm.get(0, 1), 0.0); // T1,T2
        assert_eq!(sm.get(0, 3), 0.5); // T1,T4
        assert_eq!(sm.n(), 8);
    }

    #[test]
    fn affinity_pairs() {
        let w = paper_vertical_workload();
        assert_eq!(attribute_affinity(&w, "A1", "A3").unwrap(), 45.0);
        assert_eq!(attribute_affinity(&w, "A2", "A4").unwrap(), 75.0);
        assert_eq!(attribute_affinity(&w, "A1", "A4").unwrap(), 0.0);
        assert!(matches!(
            attribute_affinity(&w, "A1", "AX"),
            Err(WorkloadError::UnknownAttribute(_))
        ));
    }

    #[test]
    fn affinity_diagonal_is_total_weighted_access() {
        let w = paper_vertical_workload();
        assert_eq!(attribute_affinity(&w, "A2", "A2").unwrap(), 80.0);
        assert_eq!(attribute_affinity(&w, "A3", "A3").unwrap(), 53.0);
    }

    #[test]
    fn affinity_uses_site_access_when_given() {
        let w = crate::parse_workload(
            r#"{
                "attributes": ["A1", "A2"],
                "queries": [{
                    "id": "q1", "uses": ["A1", "A2"], "freq": 10,
                    "sites": [
                        {"site": "s1", "acc": 4, "ref": 2},
                        {"site": "s2", "acc": 3, "ref": 1}
                    ]
                }]
            }"#,
        )
        .unwrap();
        // 2*4 + 1*3, not the freq of 10
        assert_eq!(attribute_affinity(&w, "A1", "A2").unwrap(), 11.0);
    }

    #[test]
    fn from_values_enforces_invariants() {
        let bad_diag = SimilarityMatrix::from_values(
            vec!["a".into(), "b".into()],
            vec![0.9, 0.2, 0.2, 1.0],
        );
        assert!(matches!(bad_diag, Err(MeasureError::BadDiagonal { i: 0 })));
        let asym = SimilarityMatrix::from_values(
            vec!["a".into(), "b".into()],
            vec![1.0, 0.2, 0.3, 1.0],
        );
        assert!(matches!(asym, Err(MeasureError::Asymmetric { .. })));
    }
}
