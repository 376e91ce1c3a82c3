//! Schema, query, record, and predicate model: the workload every
//! fragmentation algorithm consumes.
//!
//! A [`Workload`] is parsed from a JSON document ([`parse_workload`]) and
//! validated up front — all references resolve, ids are unique, frequencies
//! are nonnegative — so the algorithms downstream never re-check them.
//! All types are immutable after construction and safe to share across
//! threads.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Validation and lookup failures for workload documents.
#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{entity} '{id}' references undeclared attribute '{attribute}'")]
    UndeclaredAttribute {
        entity: &'static str,
        id: String,
        attribute: String,
    },
    #[error("duplicate {kind} id '{id}'")]
    DuplicateId { kind: &'static str, id: String },
    #[error("query '{id}' lists attribute '{attribute}' more than once")]
    DuplicateUse { id: String, attribute: String },
    #[error("query '{id}' has negative frequency {freq}")]
    NegativeFrequency { id: String, freq: f64 },
    #[error("query '{id}', site '{site}': negative {field} {value}")]
    NegativeSiteValue {
        id: String,
        site: String,
        field: &'static str,
        value: f64,
    },
    #[error("attribute names must be non-empty")]
    EmptyAttributeName,
    #[error("unknown query '{0}'")]
    UnknownQuery(String),
    #[error("unknown attribute '{0}'")]
    UnknownAttribute(String),
    #[error("workload has no queries")]
    NoQueries,
    #[error("binary matrix row '{row}' has {found} cells, expected {expected}")]
    MatrixShape {
        row: String,
        expected: usize,
        found: usize,
    },
}

/// Errors raised while evaluating predicates against records.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("record '{record}' has no value for attribute '{attribute}'")]
    MissingValue { record: String, attribute: String },
    #[error("record '{record}' vs predicate '{predicate}': text compared against number")]
    TypeMismatch { record: String, predicate: String },
    #[error("no records to vectorize")]
    NoRecords,
    #[error("no predicates to vectorize against")]
    NoPredicates,
}

/// A typed scalar: text or number. Text compares by code point,
/// numbers numerically; the two never compare against each other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Text(String),
    Number(f64),
}

impl Scalar {
    fn compare(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Text(a), Scalar::Text(b)) => Some(a.cmp(b)),
            (Scalar::Number(a), Scalar::Number(b)) => a.partial_cmp(b),
            _ => None,
        }
    }
}

/// Comparison operator of a simple predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompareOp {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl CompareOp {
    fn matches(self, ord: Ordering) -> bool {
        match self {
            CompareOp::Eq => ord == Ordering::Equal,
            CompareOp::Ne => ord != Ordering::Equal,
            CompareOp::Lt => ord == Ordering::Less,
            CompareOp::Le => ord != Ordering::Greater,
            CompareOp::Gt => ord == Ordering::Greater,
            CompareOp::Ge => ord != Ordering::Less,
        }
    }
}

/// Per-site access statistics of a query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteAccess {
    pub site: String,
    /// Access frequency of the query at this site.
    pub acc: f64,
    /// Reference count of the query at this site.
    #[serde(rename = "ref")]
    pub refs: f64,
}

/// A query (application): the attributes it uses and how often it runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Query {
    pub id: String,
    pub uses: Vec<String>,
    pub freq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<Vec<SiteAccess>>,
}

impl Query {
    pub fn uses_attribute(&self, attribute: &str) -> bool {
        self.uses.iter().any(|a| a == attribute)
    }

    /// Total access weight: Σ ref·acc over sites, or the plain frequency
    /// when no per-site statistics were given (implicit single site with
    /// ref=1 and acc=freq).
    pub fn weight(&self) -> f64 {
        match &self.sites {
            Some(sites) => sites.iter().map(|s| s.refs * s.acc).sum(),
            None => self.freq,
        }
    }
}

/// One tuple of the relation, identified by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub id: String,
    pub values: BTreeMap<String, Scalar>,
}

/// An atomic condition `attribute θ value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplePredicate {
    pub id: String,
    pub attr: String,
    pub op: CompareOp,
    pub value: Scalar,
}

/// The full input to the fragmentation pipelines.
///
/// Attribute, query, record, and predicate order is preserved from the
/// input document and is semantic: it defines object order in every
/// derived matrix and fragment listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Workload {
    pub attributes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub key_attributes: Vec<String>,
    #[serde(default)]
    pub queries: Vec<Query>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<Record>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub predicates: Vec<SimplePredicate>,
}

/// Frequency-weighted usage of one attribute across all queries, in
/// query order: component i is `use(q_i, A)·freq(q_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeFeatureVector {
    pub attribute: String,
    pub measures: Vec<f64>,
}

/// Records × predicates 0/1 matrix: cell (i,j) is 1 iff predicate j
/// holds on record i.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMatrix {
    row_ids: Vec<String>,
    col_ids: Vec<String>,
    rows: Vec<Vec<bool>>,
}

impl BinaryMatrix {
    pub fn new(
        row_ids: Vec<String>,
        col_ids: Vec<String>,
        rows: Vec<Vec<bool>>,
    ) -> Result<Self, WorkloadError> {
        if rows.len() != row_ids.len() {
            return Err(WorkloadError::MatrixShape {
                row: "<row count>".into(),
                expected: row_ids.len(),
                found: rows.len(),
            });
        }
        for (id, row) in row_ids.iter().zip(&rows) {
            if row.len() != col_ids.len() {
                return Err(WorkloadError::MatrixShape {
                    row: id.clone(),
                    expected: col_ids.len(),
                    found: row.len(),
                });
            }
        }
        Ok(BinaryMatrix {
            row_ids,
            col_ids,
            rows,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_ids.len()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row][col]
    }

    pub fn row(&self, row: usize) -> &[bool] {
        &self.rows[row]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }
}

impl Workload {
    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == name)
    }

    pub fn query(&self, id: &str) -> Result<&Query, WorkloadError> {
        self.queries
            .iter()
            .find(|q| q.id == id)
            .ok_or_else(|| WorkloadError::UnknownQuery(id.to_string()))
    }

    /// Usage value: 1 iff the query references the attribute.
    pub fn usage(&self, query: &str, attribute: &str) -> Result<u8, WorkloadError> {
        let q = self.query(query)?;
        if self.attribute_index(attribute).is_none() {
            return Err(WorkloadError::UnknownAttribute(attribute.to_string()));
        }
        Ok(u8::from(q.uses_attribute(attribute)))
    }

    /// Frequency-weighted usage: `use(q, A)·freq(q)`.
    pub fn reference_measure(&self, query: &str, attribute: &str) -> Result<f64, WorkloadError> {
        let u = self.usage(query, attribute)?;
        let q = self.query(query)?;
        Ok(f64::from(u) * q.freq)
    }

    /// One feature vector per attribute, components in query order.
    pub fn feature_vectors(&self) -> Result<Vec<AttributeFeatureVector>, WorkloadError> {
        if self.queries.is_empty() {
            return Err(WorkloadError::NoQueries);
        }
        Ok(self
            .attributes
            .iter()
            .map(|attr| AttributeFeatureVector {
                attribute: attr.clone(),
                measures: self
                    .queries
                    .iter()
                    .map(|q| if q.uses_attribute(attr) { q.freq } else { 0.0 })
                    .collect(),
            })
            .collect())
    }

    /// Canonical JSON serialization; `parse_workload` of the output
    /// reproduces the workload exactly.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("workload serialization cannot fail")
    }

    fn validate(&self) -> Result<(), WorkloadError> {
        let mut seen = HashSet::new();
        for attr in &self.attributes {
            if attr.is_empty() {
                return Err(WorkloadError::EmptyAttributeName);
            }
            if !seen.insert(attr.as_str()) {
                return Err(WorkloadError::DuplicateId {
                    kind: "attribute",
                    id: attr.clone(),
                });
            }
        }
        for key in &self.key_attributes {
            if self.attribute_index(key).is_none() {
                return Err(WorkloadError::UndeclaredAttribute {
                    entity: "key",
                    id: key.clone(),
                    attribute: key.clone(),
                });
            }
        }

        let mut query_ids = HashSet::new();
        for q in &self.queries {
            if !query_ids.insert(q.id.as_str()) {
                return Err(WorkloadError::DuplicateId {
                    kind: "query",
                    id: q.id.clone(),
                });
            }
            if q.freq < 0.0 || !q.freq.is_finite() {
                return Err(WorkloadError::NegativeFrequency {
                    id: q.id.clone(),
                    freq: q.freq,
                });
            }
            let mut used = HashSet::new();
            for attr in &q.uses {
                if self.attribute_index(attr).is_none() {
                    return Err(WorkloadError::UndeclaredAttribute {
                        entity: "query",
                        id: q.id.clone(),
                        attribute: attr.clone(),
                    });
                }
                if !used.insert(attr.as_str()) {
                    return Err(WorkloadError::DuplicateUse {
                        id: q.id.clone(),
                        attribute: attr.clone(),
                    });
                }
            }
            if let Some(sites) = &q.sites {
                for s in sites {
                    for (field, value) in [("acc", s.acc), ("ref", s.refs)] {
                        if value < 0.0 || !value.is_finite() {
                            return Err(WorkloadError::NegativeSiteValue {
                                id: q.id.clone(),
                                site: s.site.clone(),
                                field,
                                value,
                            });
                        }
                    }
                }
            }
        }

        let mut record_ids = HashSet::new();
        for r in &self.records {
            if !record_ids.insert(r.id.as_str()) {
                return Err(WorkloadError::DuplicateId {
                    kind: "record",
                    id: r.id.clone(),
                });
            }
            for attr in r.values.keys() {
                if self.attribute_index(attr).is_none() {
                    return Err(WorkloadError::UndeclaredAttribute {
                        entity: "record",
                        id: r.id.clone(),
                        attribute: attr.clone(),
                    });
                }
            }
        }

        let mut predicate_ids = HashSet::new();
        for p in &self.predicates {
            if !predicate_ids.insert(p.id.as_str()) {
                return Err(WorkloadError::DuplicateId {
                    kind: "predicate",
                    id: p.id.clone(),
                });
            }
            if self.attribute_index(&p.attr).is_none() {
                return Err(WorkloadError::UndeclaredAttribute {
                    entity: "predicate",
                    id: p.id.clone(),
                    attribute: p.attr.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Parses and validates a workload document.
pub fn parse_workload(input: &str) -> Result<Workload, WorkloadError> {
    let workload: Workload = serde_json::from_str(input).map_err(|e| WorkloadError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    workload.validate()?;
    Ok(workload)
}

/// Truth of `record[p.attr] θ p.value`.
pub fn evaluate_predicate(record: &Record, predicate: &SimplePredicate) -> Result<bool, EvalError> {
    let value = record
        .values
        .get(&predicate.attr)
        .ok_or_else(|| EvalError::MissingValue {
            record: record.id.clone(),
            attribute: predicate.attr.clone(),
        })?;
    let ord = value
        .compare(&predicate.value)
        .ok_or_else(|| EvalError::TypeMismatch {
            record: record.id.clone(),
            predicate: predicate.id.clone(),
        })?;
    Ok(predicate.op.matches(ord))
}

/// Evaluates every predicate on every record. Records satisfying no
/// predicate keep their all-zero row; they are never dropped.
pub fn vectorize_records(
    records: &[Record],
    predicates: &[SimplePredicate],
) -> Result<BinaryMatrix, EvalError> {
    if records.is_empty() {
        return Err(EvalError::NoRecords);
    }
    if predicates.is_empty() {
        return Err(EvalError::NoPredicates);
    }
    let mut rows = Vec::with_capacity(records.len());
    for record in records {
        let mut row = Vec::with_capacity(predicates.len());
        for predicate in predicates {
            row.push(evaluate_predicate(record, predicate)?);
        }
        rows.push(row);
    }
    Ok(BinaryMatrix {
        row_ids: records.iter().map(|r| r.id.clone()).collect(),
        col_ids: predicates.iter().map(|p| p.id.clone()).collect(),
        rows,
    })
}
