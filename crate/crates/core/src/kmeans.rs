//! Seeded Lloyd's algorithm that keeps every intermediate assignment.
//!
//! The selective p-value conditions on the whole sequence of assignments
//! `c^(0), c^(1), …, c^(T)`, so the trace stores all of them instead of only
//! the final partition.
//!
//! Conventions:
//! - labels are zero-based; centroid `k` is the `k`-th sampled row;
//! - `argmin` ties go to the smallest label;
//! - `T` counts assignment updates after the initial one, and at most
//!   `t_max` updates are performed;
//! - a run in which any cluster becomes empty is rejected with
//!   [`Error::EmptyCluster`] rather than repaired.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::data::{squared_distance, DataMatrix};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Complete record of one Lloyd run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterTrace {
    initial_indices: Vec<usize>,
    assignments: Vec<Vec<usize>>,
    converged: bool,
    seed: u64,
    k: usize,
}

impl ClusterTrace {
    /// Validates and assembles a trace from its parts.
    ///
    /// `assignments[t]` must hold `n` labels in `0..k`, every cluster must be
    /// nonempty at every `t`, and a converged trace must end with two equal
    /// assignment vectors.
    pub fn from_parts(
        initial_indices: Vec<usize>,
        assignments: Vec<Vec<usize>>,
        converged: bool,
        seed: u64,
    ) -> Result<Self> {
        let k = initial_indices.len();
        if k == 0 {
            return Err(Error::invalid("trace needs at least one centroid"));
        }
        let first = assignments
            .first()
            .ok_or_else(|| Error::invalid("trace needs at least one assignment vector"))?;
        let n = first.len();
        if initial_indices.iter().any(|&s| s >= n) {
            return Err(Error::invalid("initial index out of range"));
        }
        let mut seen = initial_indices.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != k {
            return Err(Error::invalid("initial indices must be distinct"));
        }
        for (t, labels) in assignments.iter().enumerate() {
            if labels.len() != n {
                return Err(Error::dims(format!(
                    "assignment {t} has {} labels, expected {n}",
                    labels.len()
                )));
            }
            let sizes = cluster_sizes(labels, k)?;
            if let Some(empty) = sizes.iter().position(|&s| s == 0) {
                return Err(Error::EmptyCluster {
                    cluster: empty,
                    iteration: Some(t),
                });
            }
        }
        let len = assignments.len();
        let repeats = len >= 2 && assignments[len - 1] == assignments[len - 2];
        if converged != repeats {
            return Err(Error::invalid(
                "converged flag must match whether the last two assignments are equal",
            ));
        }
        Ok(ClusterTrace {
            initial_indices,
            assignments,
            converged,
            seed,
            k,
        })
    }

    pub fn initial_indices(&self) -> &[usize] {
        &self.initial_indices
    }

    /// All recorded assignment vectors, `c^(0)` through `c^(T)`.
    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.assignments
    }

    pub fn labels_at(&self, t: usize) -> &[usize] {
        &self.assignments[t]
    }

    pub fn final_labels(&self) -> &[usize] {
        self.assignments.last().expect("trace is never empty")
    }

    /// Index of the last recorded assignment.
    pub fn iterations(&self) -> usize {
        self.assignments.len() - 1
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.assignments[0].len()
    }

    /// Member count of cluster `k` at iteration `t`.
    pub fn cluster_size(&self, t: usize, k: usize) -> usize {
        self.assignments[t].iter().filter(|&&c| c == k).count()
    }
}

/// Samples `k` distinct row indices out of `n` with a partial Fisher–Yates
/// shuffle driven by a ChaCha8 stream seeded with `seed`.
///
/// The returned order defines the centroid labels.
pub fn sample_initial_centroids(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "cannot sample {k} centroids from {n} observations"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k);
    Ok(pool)
}

/// Assigns each row to its nearest centroid (squared Euclidean distance,
/// smallest label on ties).
pub fn assign_step(x: &DataMatrix, centroids: &DataMatrix) -> Vec<usize> {
    x.rows().map(|row| nearest(row, centroids)).collect()
}

fn nearest(row: &[f64], centroids: &DataMatrix) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (k, m) in centroids.rows().enumerate() {
        let d = squared_distance(row, m);
        if d < best_dist {
            best_dist = d;
            best = k;
        }
    }
    best
}

fn cluster_sizes(labels: &[usize], k: usize) -> Result<Vec<usize>> {
    let mut sizes = vec![0usize; k];
    for &c in labels {
        if c >= k {
            return Err(Error::invalid(format!(
                "label {c} out of range for K = {k}"
            )));
        }
        sizes[c] += 1;
    }
    Ok(sizes)
}

/// Cluster means for the given labels.
pub fn update_centroids(x: &DataMatrix, labels: &[usize], k: usize) -> Result<DataMatrix> {
    if labels.len() != x.n() {
        return Err(Error::dims(format!(
            "{} labels for {} observations",
            labels.len(),
            x.n()
        )));
    }
    let sizes = cluster_sizes(labels, k)?;
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyCluster {
            cluster: empty,
            iteration: None,
        });
    }
    let q = x.q();
    let mut sums = vec![0.0; k * q];
    for (row, &c) in x.rows().zip(labels) {
        for (s, v) in sums[c * q..(c + 1) * q].iter_mut().zip(row) {
            *s += v;
        }
    }
    for (c, &size) in sizes.iter().enumerate() {
        for s in &mut sums[c * q..(c + 1) * q] {
            *s /= size as f64;
        }
    }
    Ok(DataMatrix::from_raw(k, q, sums))
}

fn centroids_from_indices(x: &DataMatrix, indices: &[usize]) -> DataMatrix {
    let mut values = Vec::with_capacity(indices.len() * x.q());
    for &s in indices {
        values.extend_from_slice(x.row(s));
    }
    DataMatrix::from_raw(indices.len(), x.q(), values)
}

fn ensure_nonempty(labels: &[usize], k: usize, iteration: usize) -> Result<()> {
    let sizes = cluster_sizes(labels, k)?;
    match sizes.iter().position(|&s| s == 0) {
        Some(empty) => Err(Error::EmptyCluster {
            cluster: empty,
            iteration: Some(iteration),
        }),
        None => Ok(()),
    }
}

/// Runs Lloyd's algorithm from centroids sampled with `seed`.
pub fn lloyd(x: &DataMatrix, k: usize, t_max: usize, seed: u64) -> Result<ClusterTrace> {
    if k == 0 || k > x.n() {
        return Err(Error::invalid(format!("K = {k} must lie in 1..={}", x.n())));
    }
    let initial = sample_initial_centroids(x.n(), k, seed)?;
    lloyd_from_indices(x, initial, t_max, seed)
}

/// Runs Lloyd's algorithm from the given initial centroid rows.
pub fn lloyd_from_indices(
    x: &DataMatrix,
    initial_indices: Vec<usize>,
    t_max: usize,
    seed: u64,
) -> Result<ClusterTrace> {
    if t_max == 0 {
        return Err(Error::invalid("maximum iteration count must be at least 1"));
    }
    let k = initial_indices.len();
    let centroids = centroids_from_indices(x, &initial_indices);
    let first = assign_step(x, &centroids);
    ensure_nonempty(&first, k, 0)?;
    let mut assignments = vec![first];
    let mut converged = false;
    for t in 1..=t_max {
        let prev = assignments.last().expect("nonempty");
        let centroids = update_centroids(x, prev, k).map_err(|e| match e {
            Error::EmptyCluster { cluster, .. } => Error::EmptyCluster {
                cluster,
                iteration: Some(t - 1),
            },
            other => other,
        })?;
        let next = assign_step(x, &centroids);
        ensure_nonempty(&next, k, t)?;
        let repeated = next == *prev;
        assignments.push(next);
        if repeated {
            converged = true;
            break;
        }
    }
    Ok(ClusterTrace {
        initial_indices,
        assignments,
        converged,
        seed,
        k,
    })
}

/// Whether Lloyd's algorithm on `x`, started from the trace's initial rows,
/// reproduces every recorded assignment of `trace`.
pub fn reproduces_trace(x: &DataMatrix, trace: &ClusterTrace) -> bool {
    let k = trace.k();
    let centroids = centroids_from_indices(x, trace.initial_indices());
    let mut prev = assign_step(x, &centroids);
    if prev != trace.labels_at(0) {
        return false;
    }
    for t in 1..=trace.iterations() {
        let centroids = match update_centroids(x, &prev, k) {
            Ok(c) => c,
            Err(_) => return false,
        };
        let next = assign_step(x, &centroids);
        if next != trace.labels_at(t) {
            return false;
        }
        prev = next;
    }
    true
}

/// Within-cluster sum of squared distances to the cluster means.
pub fn objective(x: &DataMatrix, labels: &[usize], k: usize) -> Result<f64> {
    let centroids = update_centroids(x, labels, k)?;
    Ok(x.rows()
        .zip(labels)
        .map(|(row, &c)| squared_distance(row, centroids.row(c)))
        .sum())
}
