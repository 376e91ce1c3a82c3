//! Classical baseline algorithms: bond-energy vertical fragmentation and
//! minterm-based horizontal fragmentation.
//!
//! Both exist to cross-validate the clustering pipelines: on workloads
//! where the cluster structure is clear, `bea_vertical` agrees with
//! `vertical_fragment` and `phorizontal` with `horizontal_fragment`
//! (surfaced by the CLI `compare` command).

use std::collections::BTreeMap;

use crate::plan::{
    clustering_metrics, round_sig, FragmentError, Fragment, FragmentationPlan, Method,
    PLAN_SIGNIFICANT_DIGITS,
};
use crate::similarity::{attribute_affinity, AffinityMatrix};
use crate::workload::{evaluate_predicate, Record, SimplePredicate, Workload};

/// Most predicates `phorizontal` accepts before refusing the 2^m minterm
/// enumeration.
pub const DEFAULT_MINTERM_CAP: usize = 20;

/// Exact bond-energy ordering is affordable up to this many attributes;
/// larger matrices fall back to greedy insertion.
const EXACT_ORDERING_LIMIT: usize = 12;

/// Full attribute-affinity matrix, diagonal included.
pub fn affinity_matrix(w: &Workload) -> Result<AffinityMatrix, FragmentError> {
    if w.queries.is_empty() {
        return Err(FragmentError::NoQueries);
    }
    let n = w.attributes.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let aff = attribute_affinity(w, &w.attributes[i], &w.attributes[j])?;
            values[i * n + j] = aff;
            values[j * n + i] = aff;
        }
    }
    Ok(AffinityMatrix::from_values(w.attributes.clone(), values)?)
}

/// The affinity matrix reordered so high-affinity attributes sit next to
/// each other, together with the ordering that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredAffinityMatrix {
    /// Attribute names in clustered order.
    pub ordering: Vec<String>,
    /// The reordered affinity matrix (ids follow `ordering`).
    pub matrix: AffinityMatrix,
    /// Positions of the ordered attributes in the input matrix.
    pub permutation: Vec<usize>,
    /// "exact" or "greedy-insertion", depending on the matrix size.
    pub strategy: &'static str,
}

/// Reorders the affinity matrix to maximize the global affinity measure
/// (the summed bond strength of adjacent columns).
///
/// For n ≤ 12 the maximizing ordering is found exactly by dynamic
/// programming over attribute subsets; beyond that the classical greedy
/// insertion is used (seed the first two attributes, then insert each
/// next attribute at the position with the highest bond contribution).
pub fn bond_energy_order(aff: &AffinityMatrix) -> ClusteredAffinityMatrix {
    let n = aff.n();
    let bonds = bond_matrix(aff);
    let (permutation, strategy) = if n <= EXACT_ORDERING_LIMIT {
        (exact_order(n, &bonds), "exact")
    } else {
        (greedy_order(n, &bonds), "greedy-insertion")
    };
    let ordering: Vec<String> = permutation.iter().map(|&i| aff.ids()[i].clone()).collect();
    let mut values = vec![0.0; n * n];
    for (ri, &oi) in permutation.iter().enumerate() {
        for (rj, &oj) in permutation.iter().enumerate() {
            values[ri * n + rj] = aff.get(oi, oj);
        }
    }
    let matrix = AffinityMatrix::from_values(ordering.clone(), values)
        .expect("permuted affinity matrix stays valid");
    ClusteredAffinityMatrix {
        ordering,
        matrix,
        permutation,
        strategy,
    }
}

/// bond(x,y) = Σ_z aff(z,x)·aff(z,y).
fn bond_matrix(aff: &AffinityMatrix) -> Vec<f64> {
    let n = aff.n();
    let mut bonds = vec![0.0; n * n];
    for x in 0..n {
        for y in 0..n {
            bonds[x * n + y] = (0..n).map(|z| aff.get(z, x) * aff.get(z, y)).sum();
        }
    }
    bonds
}

/// Global affinity measure of an ordering: twice the summed bond of
/// adjacent pairs (boundary neighbors are virtual zero attributes).
pub fn affinity_measure(aff: &AffinityMatrix, permutation: &[usize]) -> f64 {
    let n = aff.n();
    let bonds = bond_matrix(aff);
    2.0 * permutation
        .windows(2)
        .map(|w| bonds[w[0] * n + w[1]])
        .sum::<f64>()
}

/// Max-weight Hamiltonian path over bond weights, exact via Held-Karp.
fn exact_order(n: usize, bonds: &[f64]) -> Vec<usize> {
    if n == 1 {
        return vec![0];
    }
    let full = (1usize << n) - 1;
    let mut dp = vec![f64::NEG_INFINITY; (full + 1) * n];
    let mut back = vec![usize::MAX; (full + 1) * n];
    for v in 0..n {
        dp[(1 << v) * n + v] = 0.0;
    }
    for mask in 1..=full {
        for v in 0..n {
            let weight = dp[mask * n + v];
            if weight == f64::NEG_INFINITY || mask & (1 << v) == 0 {
                continue;
            }
            for u in 0..n {
                if mask & (1 << u) != 0 {
                    continue;
                }
                let next = mask | (1 << u);
                let candidate = weight + bonds[v * n + u];
                if candidate > dp[next * n + u] {
                    dp[next * n + u] = candidate;
                    back[next * n + u] = v;
                }
            }
        }
    }
    let mut end = 0;
    for v in 1..n {
        if dp[full * n + v] > dp[full * n + end] {
            end = v;
        }
    }
    let mut path = vec![end];
    let mut mask = full;
    let mut v = end;
    while back[mask * n + v] != usize::MAX {
        let u = back[mask * n + v];
        mask ^= 1 << v;
        path.push(u);
        v = u;
    }
    path.reverse();
    canonical_orientation(path)
}

/// Classical greedy insertion: seed with the first two attributes in
/// input order, then place each next attribute where the contribution
/// 2·bond(left,new) + 2·bond(new,right) − 2·bond(left,right) is largest.
fn greedy_order(n: usize, bonds: &[f64]) -> Vec<usize> {
    if n <= 2 {
        return (0..n).collect();
    }
    let bond = |x: Option<usize>, y: Option<usize>| match (x, y) {
        (Some(a), Some(b)) => bonds[a * n + b],
        _ => 0.0, // virtual zero attribute at the boundaries
    };
    let mut order = vec![0, 1];
    for new in 2..n {
        let mut best_pos = 0;
        let mut best_cont = f64::NEG_INFINITY;
        for pos in 0..=order.len() {
            let left = if pos > 0 { Some(order[pos - 1]) } else { None };
            let right = order.get(pos).copied();
            let cont = 2.0 * bond(left, Some(new)) + 2.0 * bond(Some(new), right)
                - 2.0 * bond(left, right);
            if cont > best_cont {
                best_cont = cont;
                best_pos = pos;
            }
        }
        order.insert(best_pos, new);
    }
    canonical_orientation(order)
}

/// A path and its reverse have the same measure; keep the
/// lexicographically smaller one.
fn canonical_orientation(path: Vec<usize>) -> Vec<usize> {
    let reversed: Vec<usize> = path.iter().rev().copied().collect();
    if reversed < path {
        reversed
    } else {
        path
    }
}

/// A two-way attribute split with its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub top: Vec<String>,
    pub bottom: Vec<String>,
    pub z: f64,
    /// Circular shift of the clustered ordering the winning split was
    /// found at.
    pub shift: usize,
    /// Number of leading attributes (of the shifted ordering) in `top`.
    pub cut: usize,
}

/// Scans every circular shift and split point of the clustered ordering
/// (n·(n−1) candidates) and returns the split maximizing
/// Z = CTQ·CBQ − COQ², ties broken by scan order.
pub fn split_partition(
    ca: &ClusteredAffinityMatrix,
    w: &Workload,
) -> Result<SplitResult, FragmentError> {
    let n = ca.ordering.len();
    if n < 2 {
        return Err(FragmentError::TooFewAttributes);
    }
    let queries: Vec<(Vec<&str>, f64)> = w
        .queries
        .iter()
        .map(|q| (q.uses.iter().map(String::as_str).collect(), q.weight()))
        .collect();

    let mut best: Option<(f64, usize, usize)> = None;
    for shift in 0..n {
        let shifted: Vec<&str> = (0..n)
            .map(|i| ca.ordering[(i + shift) % n].as_str())
            .collect();
        for cut in 1..n {
            let top = &shifted[..cut];
            let bottom = &shifted[cut..];
            let mut ctq = 0.0;
            let mut cbq = 0.0;
            let mut coq = 0.0;
            for (uses, weight) in &queries {
                if uses.iter().all(|a| top.contains(a)) {
                    ctq += weight;
                } else if uses.iter().all(|a| bottom.contains(a)) {
                    cbq += weight;
                } else {
                    coq += weight;
                }
            }
            let z = ctq * cbq - coq * coq;
            if best.is_none_or(|(bz, _, _)| z > bz) {
                best = Some((z, shift, cut));
            }
        }
    }
    let (z, shift, cut) = best.expect("n >= 2 scans at least one candidate");
    let shifted: Vec<String> = (0..n)
        .map(|i| ca.ordering[(i + shift) % n].clone())
        .collect();
    Ok(SplitResult {
        top: shifted[..cut].to_vec(),
        bottom: shifted[cut..].to_vec(),
        z,
        shift,
        cut,
    })
}

/// Bond-energy vertical fragmentation: affinity matrix → clustered
/// ordering → Z-maximizing two-way split.
pub fn bea_vertical(w: &Workload) -> Result<FragmentationPlan, FragmentError> {
    if w.queries.is_empty() {
        return Err(FragmentError::NoQueries);
    }
    if w.attributes.len() < 2 {
        return Err(FragmentError::TooFewAttributes);
    }
    let aff = affinity_matrix(w)?;
    let ca = bond_energy_order(&aff);
    let split = split_partition(&ca, w)?;

    // fragments in input-attribute order, the one holding the earliest
    // attribute first
    let in_input_order = |names: &[String]| -> Vec<String> {
        w.attributes
            .iter()
            .filter(|a| names.contains(a))
            .cloned()
            .collect()
    };
    let mut halves = [in_input_order(&split.top), in_input_order(&split.bottom)];
    let top_is_first = w
        .attributes
        .iter()
        .position(|a| halves[0].contains(a))
        .unwrap_or(0)
        <= w.attributes
            .iter()
            .position(|a| halves[1].contains(a))
            .unwrap_or(0);
    if !top_is_first {
        halves.swap(0, 1);
    }
    let fragments = halves
        .iter()
        .enumerate()
        .map(|(i, members)| Fragment {
            name: format!("V{}", i + 1),
            members: members.clone(),
            materialize: materialization(w, members),
        })
        .collect();

    let am = affinity_measure(&aff, &ca.permutation);
    let mut metrics = BTreeMap::new();
    metrics.insert("am".to_string(), round_sig(am, PLAN_SIGNIFICANT_DIGITS));
    metrics.insert("z".to_string(), round_sig(split.z, PLAN_SIGNIFICANT_DIGITS));

    let params = serde_json::json!({
        "ordering": ca.ordering,
        "ordering_strategy": ca.strategy,
        "split_scan": "all circular shifts x all split points",
        "split_candidates": w.attributes.len() * (w.attributes.len() - 1),
        "shift": split.shift,
        "cut": split.cut,
    });

    Ok(FragmentationPlan {
        method: Method::Bea,
        params,
        fragments,
        metrics,
        converged: true,
        matrices: None,
    })
}

fn materialization(w: &Workload, members: &[String]) -> Option<Vec<String>> {
    if w.key_attributes.is_empty() {
        return None;
    }
    Some(
        w.attributes
            .iter()
            .filter(|a| members.contains(a) || w.key_attributes.contains(a))
            .cloned()
            .collect(),
    )
}

/// One conjunction over the predicate set: each predicate taken either
/// positively or negated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MintermPredicate {
    signs: Vec<bool>, // true = positive literal
}

impl MintermPredicate {
    pub fn signs(&self) -> &[bool] {
        &self.signs
    }

    /// Renders the sign vector as one character per predicate: `+-` means
    /// first predicate positive, second negated.
    pub fn sign_string(&self) -> String {
        self.signs.iter().map(|&s| if s { '+' } else { '-' }).collect()
    }

    /// Truth of the conjunction on a record.
    pub fn evaluate(
        &self,
        record: &Record,
        predicates: &[SimplePredicate],
    ) -> Result<bool, crate::workload::EvalError> {
        debug_assert_eq!(self.signs.len(), predicates.len());
        for (&sign, predicate) in self.signs.iter().zip(predicates) {
            if evaluate_predicate(record, predicate)? != sign {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// All 2^m sign assignments over the predicates, in binary-counting order
/// with the all-positive minterm first.
pub fn generate_minterms(
    predicates: &[SimplePredicate],
    cap: usize,
) -> Result<Vec<MintermPredicate>, FragmentError> {
    let m = predicates.len();
    if m > cap || m >= usize::BITS as usize - 1 {
        return Err(FragmentError::TooManyPredicates { count: m, cap });
    }
    let total = 1usize << m;
    let mut minterms = Vec::with_capacity(total);
    for index in 0..total {
        let signs = (0..m).map(|j| index & (1 << (m - 1 - j)) == 0).collect();
        minterms.push(MintermPredicate { signs });
    }
    Ok(minterms)
}

/// Minterm-based horizontal fragmentation: each record lands in the one
/// minterm matching its full sign vector; empty minterms are dropped.
pub fn phorizontal(w: &Workload) -> Result<FragmentationPlan, FragmentError> {
    if w.records.is_empty() {
        return Err(FragmentError::NoRecords);
    }
    if w.predicates.is_empty() {
        return Err(FragmentError::NoPredicates);
    }
    let m = w.predicates.len();
    if m > DEFAULT_MINTERM_CAP {
        return Err(FragmentError::TooManyPredicates {
            count: m,
            cap: DEFAULT_MINTERM_CAP,
        });
    }

    // group records by minterm index: bit (m-1-j) set iff predicate j negated,
    // so ascending index order equals the generation order of the minterms
    let mut groups: BTreeMap<u64, Vec<&str>> = BTreeMap::new();
    for record in &w.records {
        let mut index = 0u64;
        for (j, predicate) in w.predicates.iter().enumerate() {
            if !evaluate_predicate(record, predicate)? {
                index |= 1 << (m - 1 - j);
            }
        }
        groups.entry(index).or_default().push(&record.id);
    }

    let mut fragments = Vec::with_capacity(groups.len());
    let mut minterm_signs = serde_json::Map::new();
    for (position, (index, members)) in groups.iter().enumerate() {
        let name = format!("H{}", position + 1);
        let signs: String = (0..m)
            .map(|j| if index & (1 << (m - 1 - j)) == 0 { '+' } else { '-' })
            .collect();
        minterm_signs.insert(name.clone(), signs.into());
        fragments.push(Fragment {
            name,
            members: members.iter().map(|id| id.to_string()).collect(),
            materialize: None,
        });
    }

    let total = 1u64 << m;
    let mut metrics = BTreeMap::new();
    metrics.insert("minterms_total".to_string(), total as f64);
    metrics.insert(
        "minterms_empty".to_string(),
        (total - groups.len() as u64) as f64,
    );

    let params = serde_json::json!({
        "minterm_cap": DEFAULT_MINTERM_CAP,
        "predicate_order": w.predicates.iter().map(|p| p.id.clone()).collect::<Vec<_>>(),
        "minterms": minterm_signs,
    });

    Ok(FragmentationPlan {
        method: Method::Phorizontal,
        params,
        fragments,
        metrics,
        converged: true,
        matrices: None,
    })
}

/// Quality metrics of an arbitrary plan against a similarity matrix;
/// used by the CLI to report comparable numbers for baseline plans.
pub fn plan_metrics_against(
    plan: &FragmentationPlan,
    matrix: &crate::similarity::SimilarityMatrix,
) -> BTreeMap<String, f64> {
    let clusters: Vec<Vec<usize>> = plan
        .fragments
        .iter()
        .map(|f| {
            f.members
                .iter()
                .filter_map(|m| matrix.ids().iter().position(|id| id == m))
                .collect()
        })
        .collect();
    clustering_metrics(matrix, &clusters, 0)
}
