//! Knowledge-oriented clustering: a rough-set-style engine that determines
//! the number of clusters from the data itself.
//!
//! The engine works on a [`SimilarityMatrix`] over objects (attributes for
//! vertical fragmentation, records for horizontal):
//!
//! 1. every object gets a distance threshold equal to its mean
//!    dissimilarity to the other objects ([`initial_thresholds`]);
//! 2. each object's initial relation gathers the objects within that
//!    threshold ([`initial_relations`]);
//! 3. the indiscernibility degree γ(i,j) of a pair is the fraction of all
//!    per-object relations that classify i and j alike
//!    ([`indiscernibility_degree`]);
//! 4. pairs with γ at or above a threshold are merged and closed
//!    transitively into clusters ([`refine`]);
//! 5. relations are rebuilt from the clusters and steps 3–4 repeat until
//!    the partition stabilizes ([`cluster`]).
//!
//! [`cluster_target_k`] forces an exact cluster count by merging the most
//! similar cluster pair (or splitting the largest cluster at its weakest
//! internal link) after the automatic pass.

use thiserror::Error;

use crate::similarity::SimilarityMatrix;

/// Default γ threshold for the refinement step. A pair is considered
/// indiscernible when at least this fraction of per-object relations
/// agrees on it. 0.7 reproduces the reference partitions; lowering it
/// merges more aggressively.
pub const DEFAULT_GAMMA_THRESHOLD: f64 = 0.7;

/// Default iteration cap; refinement usually stabilizes in a handful of
/// rounds.
pub const DEFAULT_MAX_ITERS: usize = 100;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClusterError {
    #[error("clustering needs at least one object")]
    EmptyUniverse,
    #[error("per-object thresholds need at least two objects")]
    TooFewObjects,
    #[error("target k={k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },
}

/// How the engine picks the cluster count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterMode {
    /// Iterate until stable; the data decides how many clusters emerge.
    Auto,
    /// Auto first, then merge or split to exactly k clusters.
    TargetK(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOptions {
    pub mode: ClusterMode,
    pub gamma_threshold: f64,
    pub max_iters: usize,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        ClusterOptions {
            mode: ClusterMode::Auto,
            gamma_threshold: DEFAULT_GAMMA_THRESHOLD,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

/// Per-object distance thresholds T_k, each in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdVector(Vec<f64>);

impl ThresholdVector {
    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// For each object i, the set R_i of objects related to it. Always
/// reflexive; not necessarily symmetric or transitive.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationSet {
    n: usize,
    membership: Vec<bool>, // membership[i*n + j] = j ∈ R_i
}

impl RelationSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.membership[i * self.n + j]
    }

    /// Members of R_i in index order.
    pub fn related_to(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.contains(i, j)).collect()
    }

    /// Rebuilds relations from a partition: R_i becomes the cluster
    /// containing object i.
    pub fn from_partition(n: usize, clusters: &[Vec<usize>]) -> Self {
        let mut membership = vec![false; n * n];
        for cluster in clusters {
            for &i in cluster {
                for &j in cluster {
                    membership[i * n + j] = true;
                }
            }
        }
        RelationSet { n, membership }
    }
}

/// Symmetric matrix of indiscernibility degrees γ(i,j) ∈ [0,1] with unit
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct IndiscernibilityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl IndiscernibilityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

/// A partition of the object universe: disjoint, exhaustive, no empty
/// cluster. Members are sorted within each cluster and clusters are
/// ordered by smallest member index.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub clusters: Vec<Vec<usize>>,
    pub iterations: usize,
    pub converged: bool,
    pub gamma_threshold: f64,
}

/// Mean dissimilarity of each object to its peers (Σ_{j≠i} (1−s(i,j)))/(n−1).
pub fn initial_thresholds(s: &SimilarityMatrix) -> Result<ThresholdVector, ClusterError> {
    let n = s.n();
    if n < 2 {
        return Err(ClusterError::TooFewObjects);
    }
    let thresholds = (0..n)
        .map(|i| {
            let sum: f64 = (0..n).filter(|&j| j != i).map(|j| s.dissimilarity(i, j)).sum();
            sum / (n - 1) as f64
        })
        .collect();
    Ok(ThresholdVector(thresholds))
}

/// R_i = {j : d(i,j) ≤ T_k[i] and d(i,j) < 1} ∪ {i}.
///
/// The strict d < 1 guard keeps objects with zero similarity apart even
/// when an object's threshold degenerates to 1 (all peers fully
/// dissimilar), where the mean-distance bound alone would relate
/// everything.
pub fn initial_relations(s: &SimilarityMatrix, thresholds: &ThresholdVector) -> RelationSet {
    let n = s.n();
    let mut membership = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = s.dissimilarity(i, j);
            membership[i * n + j] = j == i || (d <= thresholds.get(i) && d < 1.0);
        }
    }
    RelationSet { n, membership }
}

/// Fraction of per-object relations that classify i and j alike:
/// γ(i,j) = |{k : (i ∈ R_k) = (j ∈ R_k)}| / n.
pub fn indiscernibility_degree(rels: &RelationSet, i: usize, j: usize) -> f64 {
    let n = rels.n();
    let agreements = (0..n)
        .filter(|&k| rels.contains(k, i) == rels.contains(k, j))
        .count();
    agreements as f64 / n as f64
}

/// Full γ matrix for a relation set.
pub fn indiscernibility_matrix(rels: &RelationSet) -> IndiscernibilityMatrix {
    let n = rels.n();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let g = indiscernibility_degree(rels, i, j);
            values[i * n + j] = g;
            values[j * n + i] = g;
        }
    }
    IndiscernibilityMatrix { n, values }
}

/// One refinement step: pairs with γ(i,j) ≥ gamma_threshold are linked and
/// clusters are the connected components of that graph.
pub fn refine(rels: &RelationSet, gamma_threshold: f64) -> Clustering {
    let gamma = indiscernibility_matrix(rels);
    Clustering {
        clusters: components(rels.n(), |i, j| gamma.get(i, j) >= gamma_threshold),
        iterations: 0,
        converged: true,
        gamma_threshold,
    }
}

/// Runs the engine in the mode selected by `opts`.
pub fn cluster(s: &SimilarityMatrix, opts: &ClusterOptions) -> Result<Clustering, ClusterError> {
    match opts.mode {
        ClusterMode::Auto => cluster_auto(s, opts),
        ClusterMode::TargetK(k) => cluster_target_k(s, k, opts),
    }
}

fn cluster_auto(s: &SimilarityMatrix, opts: &ClusterOptions) -> Result<Clustering, ClusterError> {
    let n = s.n();
    if n == 0 {
        return Err(ClusterError::EmptyUniverse);
    }
    if n == 1 {
        return Ok(Clustering {
            clusters: vec![vec![0]],
            iterations: 0,
            converged: true,
            gamma_threshold: opts.gamma_threshold,
        });
    }
    let thresholds = initial_thresholds(s)?;
    let mut rels = initial_relations(s, &thresholds);
    let mut previous: Option<Vec<Vec<usize>>> = None;
    for iteration in 1..=opts.max_iters {
        let refined = refine(&rels, opts.gamma_threshold);
        if previous.as_ref() == Some(&refined.clusters) {
            debug_assert!(is_partition(n, &refined.clusters));
            return Ok(Clustering {
                clusters: refined.clusters,
                iterations: iteration,
                converged: true,
                gamma_threshold: opts.gamma_threshold,
            });
        }
        rels = RelationSet::from_partition(n, &refined.clusters);
        previous = Some(refined.clusters);
    }
    let clusters = previous.expect("max_iters >= 1");
    debug_assert!(is_partition(n, &clusters));
    Ok(Clustering {
        clusters,
        iterations: opts.max_iters,
        converged: false,
        gamma_threshold: opts.gamma_threshold,
    })
}

/// Auto clustering followed by merges or splits until exactly k clusters
/// remain.
///
/// Merge rule: join the cluster pair with the highest average
/// inter-cluster similarity; ties prefer the smaller combined cluster,
/// then the lower cluster index. Split rule: divide the largest cluster
/// at its weakest internal similarity link, assigning the other members
/// to the nearer seed; a cluster whose members are mutually
/// indistinguishable splits by input order into a leading pair and the
/// remainder.
pub fn cluster_target_k(
    s: &SimilarityMatrix,
    k: usize,
    opts: &ClusterOptions,
) -> Result<Clustering, ClusterError> {
    let n = s.n();
    if n == 0 {
        return Err(ClusterError::EmptyUniverse);
    }
    if k < 1 || k > n {
        return Err(ClusterError::KOutOfRange { k, n });
    }
    let base = cluster_auto(s, opts)?;
    let mut clusters = base.clusters;
    while clusters.len() > k {
        merge_closest_pair(s, &mut clusters);
    }
    while clusters.len() < k {
        split_largest(s, &mut clusters);
    }
    debug_assert!(is_partition(n, &clusters));
    Ok(Clustering {
        clusters,
        iterations: base.iterations,
        converged: base.converged,
        gamma_threshold: opts.gamma_threshold,
    })
}

fn average_similarity(s: &SimilarityMatrix, a: &[usize], b: &[usize]) -> f64 {
    let sum: f64 = a.iter().flat_map(|&i| b.iter().map(move |&j| s.get(i, j))).sum();
    sum / (a.len() * b.len()) as f64
}

fn merge_closest_pair(s: &SimilarityMatrix, clusters: &mut Vec<Vec<usize>>) {
    let mut best: Option<(f64, usize, usize, usize)> = None; // (sim, combined, i, j)
    for i in 0..clusters.len() {
        for j in (i + 1)..clusters.len() {
            let sim = average_similarity(s, &clusters[i], &clusters[j]);
            let combined = clusters[i].len() + clusters[j].len();
            let better = match best {
                None => true,
                Some((bs, bc, _, _)) => sim > bs || (sim == bs && combined < bc),
            };
            if better {
                best = Some((sim, combined, i, j));
            }
        }
    }
    let (_, _, i, j) = best.expect("at least two clusters");
    let absorbed = clusters.remove(j);
    clusters[i].extend(absorbed);
    clusters[i].sort_unstable();
    clusters.sort_by_key(|c| c[0]);
}

fn split_largest(s: &SimilarityMatrix, clusters: &mut Vec<Vec<usize>>) {
    let mut largest = 0;
    for i in 1..clusters.len() {
        if clusters[i].len() > clusters[largest].len() {
            largest = i;
        }
    }
    let cluster = clusters.remove(largest);
    let (left, right) = split_cluster(s, &cluster);
    clusters.push(left);
    clusters.push(right);
    clusters.sort_by_key(|c| c[0]);
}

fn split_cluster(s: &SimilarityMatrix, cluster: &[usize]) -> (Vec<usize>, Vec<usize>) {
    if cluster.len() == 2 {
        return (vec![cluster[0]], vec![cluster[1]]);
    }
    // weakest internal link; all-equal similarities mean there is none
    let mut weakest: Option<(f64, usize, usize)> = None;
    let mut all_equal = true;
    let first = s.get(cluster[0], cluster[1]);
    for (pos, &a) in cluster.iter().enumerate() {
        for &b in &cluster[(pos + 1)..] {
            let sim = s.get(a, b);
            if sim != first {
                all_equal = false;
            }
            if weakest.map_or(true, |(w, _, _)| sim < w) {
                weakest = Some((sim, a, b));
            }
        }
    }
    if all_equal {
        return (cluster[..2].to_vec(), cluster[2..].to_vec());
    }
    let (_, seed_a, seed_b) = weakest.expect("cluster of size >= 3");
    let mut left = vec![seed_a];
    let mut right = vec![seed_b];
    for &m in cluster {
        if m == seed_a || m == seed_b {
            continue;
        }
        if s.get(m, seed_a) >= s.get(m, seed_b) {
            left.push(m);
        } else {
            right.push(m);
        }
    }
    left.sort_unstable();
    right.sort_unstable();
    (left, right)
}

/// Connected components of the edge relation, members sorted, components
/// ordered by smallest member.
fn components(n: usize, edge: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if edge(i, j) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        groups[root].push(i);
    }
    groups.retain(|g| !g.is_empty());
    groups.sort_by_key(|g| g[0]);
    groups
}

fn is_partition(n: usize, clusters: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; n];
    for cluster in clusters {
        if cluster.is_empty() {
            return false;
        }
        for &m in cluster {
            if m >= n || seen[m] {
                return false;
            }
            seen[m] = true;
        }
    }
    seen.into_iter().all(|covered| covered)
}
