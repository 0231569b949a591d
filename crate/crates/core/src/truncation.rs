//! The truncation set `S_T`: every `φ ≥ 0` for which Lloyd's algorithm run
//! on the perturbed data `x'(φ)` reproduces the recorded trace.
//!
//! Along the perturbation path each observation moves affinely in `φ`, so
//! every squared distance Lloyd's algorithm compares is a quadratic in `φ`.
//! `S_T` is the intersection of the sets `{φ : own − other ≤ 0}` where
//! `own` is the squared distance to the centroid an observation was
//! assigned to and `other` the squared distance to a competing centroid:
//!
//! - at `t = 0` the centroids are the sampled rows `x_{s_k}`;
//! - at `t ≥ 1` they are the weighted means of iteration `t − 1`.
//!
//! Comparisons of a centroid with itself are identically zero and are not
//! generated, so a trace with `T` updates yields `n (K − 1) (T + 1)`
//! quadratics.

use crate::contrast::{ContrastContext, PerturbationPath};
use crate::covariance::CovarianceFactors;
use crate::error::{Error, Result};
use crate::interval::{intersect_all, IntervalSet};
use crate::kmeans::{reproduces_trace, ClusterTrace};

/// Relative threshold below which a leading coefficient counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// The predicate `a φ² + b φ + c ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quadratic {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Quadratic { a, b, c }
    }

    pub fn eval(&self, phi: f64) -> f64 {
        (self.a * phi + self.b) * phi + self.c
    }

    fn minus(self, other: Quadratic) -> Quadratic {
        Quadratic::new(self.a - other.a, self.b - other.b, self.c - other.c)
    }
}

/// Solution set of `a φ² + b φ + c ≤ 0` over the real line.
///
/// With `scale = max(|a|, |b|, |c|)`, a leading coefficient of magnitude at
/// most `tol · scale` is treated as zero, first for `a` and then for `b`.
pub fn solve_quadratic_leq(quad: Quadratic, tol: f64) -> IntervalSet {
    let Quadratic { a, b, c } = quad;
    let scale = a.abs().max(b.abs()).max(c.abs());
    let negligible = |v: f64| v.abs() <= tol * scale;
    if scale == 0.0 || (negligible(a) && negligible(b)) {
        return if c <= 0.0 {
            IntervalSet::full()
        } else {
            IntervalSet::empty()
        };
    }
    if negligible(a) {
        let root = -c / b;
        return if b > 0.0 {
            IntervalSet::single(f64::NEG_INFINITY, root)
        } else {
            IntervalSet::single(root, f64::INFINITY)
        };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return if a > 0.0 {
            IntervalSet::empty()
        } else {
            IntervalSet::full()
        };
    }
    // cancellation-free roots
    let h = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = if h == 0.0 { (0.0, 0.0) } else { (h / a, c / h) };
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    if a > 0.0 {
        IntervalSet::single(lo, hi)
    } else {
        IntervalSet::from_intervals([(f64::NEG_INFINITY, lo), (hi, f64::INFINITY)])
            .expect("finite roots")
    }
}

/// `w^(t)(k)`: the indicator of cluster `k` at iteration `t`, divided by the
/// cluster size.
pub fn iteration_weights(trace: &ClusterTrace, t: usize, k: usize) -> Result<Vec<f64>> {
    if t > trace.iterations() || k >= trace.k() {
        return Err(Error::invalid(format!(
            "no cluster {} at iteration {t}",
            k + 1
        )));
    }
    let size = trace.cluster_size(t, k);
    if size == 0 {
        return Err(Error::EmptyCluster {
            cluster: k,
            iteration: Some(t),
        });
    }
    let w = 1.0 / size as f64;
    Ok(trace
        .labels_at(t)
        .iter()
        .map(|&c| if c == k { w } else { 0.0 })
        .collect())
}

// ‖(pb − cb) + φ (pν − cν) slope d‖² as a quadratic in φ.
fn distance_quadratic(
    path: &PerturbationPath,
    point_base: &[f64],
    point_nu: f64,
    center_base: &[f64],
    center_nu: f64,
) -> Quadratic {
    let mut cross = 0.0;
    let mut sq = 0.0;
    for ((p, m), d) in point_base.iter().zip(center_base).zip(&path.direction) {
        let diff = p - m;
        cross += diff * d;
        sq += diff * diff;
    }
    let lin = (point_nu - center_nu) * path.slope;
    Quadratic::new(lin * lin, 2.0 * lin * cross, sq)
}

fn check_index(ctx: &ContrastContext<'_>, i: usize) -> Result<()> {
    if i >= ctx.x().n() {
        return Err(Error::invalid(format!(
            "observation {} out of range for n = {}",
            i + 1,
            ctx.x().n()
        )));
    }
    Ok(())
}

fn weighted_center(path: &PerturbationPath, w: &[f64]) -> (Vec<f64>, f64) {
    let mut center = vec![0.0; path.q];
    let mut nu = 0.0;
    for (i, &wi) in w.iter().enumerate() {
        if wi != 0.0 {
            for (c, b) in center.iter_mut().zip(path.base_row(i)) {
                *c += wi * b;
            }
            nu += wi * path.nu[i];
        }
    }
    (center, nu)
}

/// `(a, b, γ)` with `‖[x'(φ)]_i − [x'(φ)]_j‖² = a φ² + b φ + γ`.
pub fn coeffs_pairwise(ctx: &ContrastContext<'_>, i: usize, j: usize) -> Result<Quadratic> {
    coeffs_pairwise_sigma(ctx, i, j, 1.0)
}

/// Known-`Σ` version of [`coeffs_pairwise`] along `x̃'(φ)`; `ratio` is
/// `‖x^T ν‖ / ‖Σ^{-1/2} x^T ν‖`.
pub fn coeffs_pairwise_sigma(
    ctx: &ContrastContext<'_>,
    i: usize,
    j: usize,
    ratio: f64,
) -> Result<Quadratic> {
    check_index(ctx, i)?;
    check_index(ctx, j)?;
    let path = ctx.path(ratio)?;
    Ok(distance_quadratic(
        &path,
        path.base_row(i),
        path.nu[i],
        path.base_row(j),
        path.nu[j],
    ))
}

/// `(ã, b̃, γ̃)` with `‖[x'(φ)]_i − Σ_{i'} w_{i'} [x'(φ)]_{i'}‖² = ã φ² + b̃ φ + γ̃`.
pub fn coeffs_centroid(ctx: &ContrastContext<'_>, i: usize, w: &[f64]) -> Result<Quadratic> {
    coeffs_centroid_sigma(ctx, i, w, 1.0)
}

/// Known-`Σ` version of [`coeffs_centroid`].
pub fn coeffs_centroid_sigma(
    ctx: &ContrastContext<'_>,
    i: usize,
    w: &[f64],
    ratio: f64,
) -> Result<Quadratic> {
    check_index(ctx, i)?;
    if w.len() != ctx.x().n() {
        return Err(Error::dims(format!(
            "{} weights for {} observations",
            w.len(),
            ctx.x().n()
        )));
    }
    let path = ctx.path(ratio)?;
    let (center, center_nu) = weighted_center(&path, w);
    Ok(distance_quadratic(
        &path,
        path.base_row(i),
        path.nu[i],
        &center,
        center_nu,
    ))
}

fn check_compatible(trace: &ClusterTrace, ctx: &ContrastContext<'_>) -> Result<()> {
    if trace.n() != ctx.x().n() {
        return Err(Error::dims(format!(
            "trace has {} observations, data has {}",
            trace.n(),
            ctx.x().n()
        )));
    }
    let (k1, k2) = ctx.pair();
    if k1 >= trace.k() || k2 >= trace.k() {
        return Err(Error::invalid("cluster pair is not part of the trace"));
    }
    Ok(())
}

/// Every inequality defining the truncation set along the path with slope
/// factor `ratio` (1 for the spherical path), in generation order:
/// initialization first, then iterations `1..=T`, observations in order,
/// competing clusters in increasing label order.
pub fn conditioning_quadratics(
    trace: &ClusterTrace,
    ctx: &ContrastContext<'_>,
    ratio: f64,
) -> Result<Vec<Quadratic>> {
    check_compatible(trace, ctx)?;
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::invalid(format!(
            "path ratio must be positive, got {ratio}"
        )));
    }
    let path = ctx.path(ratio)?;
    let n = trace.n();
    let k_count = trace.k();
    let steps = trace.iterations();
    let mut out = Vec::with_capacity(n * k_count.saturating_sub(1) * (steps + 1));

    let seeds = trace.initial_indices();
    let labels0 = trace.labels_at(0);
    for i in 0..n {
        let own_row = seeds[labels0[i]];
        let own = distance_quadratic(
            &path,
            path.base_row(i),
            path.nu[i],
            path.base_row(own_row),
            path.nu[own_row],
        );
        for (k, &s) in seeds.iter().enumerate() {
            if k == labels0[i] {
                continue;
            }
            let other = distance_quadratic(
                &path,
                path.base_row(i),
                path.nu[i],
                path.base_row(s),
                path.nu[s],
            );
            out.push(own.minus(other));
        }
    }

    for t in 1..=steps {
        let centers: Vec<(Vec<f64>, f64)> = (0..k_count)
            .map(|k| iteration_weights(trace, t - 1, k).map(|w| weighted_center(&path, &w)))
            .collect::<Result<_>>()?;
        let labels = trace.labels_at(t);
        for i in 0..n {
            let (own_c, own_nu) = &centers[labels[i]];
            let own = distance_quadratic(&path, path.base_row(i), path.nu[i], own_c, *own_nu);
            for (k, (c, c_nu)) in centers.iter().enumerate() {
                if k == labels[i] {
                    continue;
                }
                let other = distance_quadratic(&path, path.base_row(i), path.nu[i], c, *c_nu);
                out.push(own.minus(other));
            }
        }
    }
    Ok(out)
}

fn set_from_quadratics(quads: &[Quadratic], observed: f64) -> Result<IntervalSet> {
    let sets: Vec<IntervalSet> = quads
        .iter()
        .map(|&q| solve_quadratic_leq(q, DEGENERACY_TOL))
        .collect();
    let set = intersect_all(&sets).clip_nonnegative();
    let slack = 1e-8 * observed.max(1.0);
    if !set.contains_within(observed, slack) {
        return Err(Error::Numerical(format!(
            "observed statistic {observed} is not in the computed truncation set {set}"
        )));
    }
    Ok(set)
}

/// `S_T ∩ [0, ∞)` for the spherical path `x'(φ)`.
pub fn truncation_set(trace: &ClusterTrace, ctx: &ContrastContext<'_>) -> Result<IntervalSet> {
    let quads = conditioning_quadratics(trace, ctx, 1.0)?;
    set_from_quadratics(&quads, ctx.stat())
}

/// `S_T^Σ ∩ [0, ∞)` for the known-covariance path `x̃'(φ)`, in units of the
/// whitened statistic `‖Σ^{-1/2} x^T ν‖`.
pub fn truncation_set_sigma(
    trace: &ClusterTrace,
    ctx: &ContrastContext<'_>,
    factors: &CovarianceFactors,
) -> Result<IntervalSet> {
    let white = ctx.whitened(factors)?;
    let quads = conditioning_quadratics(trace, ctx, white.ratio)?;
    set_from_quadratics(&quads, white.stat)
}

/// Direct membership test: rerun Lloyd's algorithm on `x'(φ)` from the
/// trace's initial rows and compare every assignment.
pub fn oracle_membership(
    trace: &ClusterTrace,
    ctx: &ContrastContext<'_>,
    phi: f64,
) -> Result<bool> {
    check_compatible(trace, ctx)?;
    Ok(reproduces_trace(&ctx.perturbed_data(phi)?, trace))
}

/// [`oracle_membership`] along `x̃'(φ)`.
pub fn oracle_membership_sigma(
    trace: &ClusterTrace,
    ctx: &ContrastContext<'_>,
    factors: &CovarianceFactors,
    phi: f64,
) -> Result<bool> {
    check_compatible(trace, ctx)?;
    Ok(reproduces_trace(
        &ctx.perturbed_data_sigma(phi, factors)?,
        trace,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DataMatrix;
    use crate::kmeans::lloyd;

    fn sol(a: f64, b: f64, c: f64) -> IntervalSet {
        solve_quadratic_leq(Quadratic::new(a, b, c), DEGENERACY_TOL)
    }

    #[test]
    fn quadratic_cases() {
        assert_eq!(sol(1.0, 0.0, -4.0), IntervalSet::single(-2.0, 2.0));
        assert_eq!(
            sol(-1.0, 0.0, 4.0),
            IntervalSet::from_intervals([(f64::NEG_INFINITY, -2.0), (2.0, f64::INFINITY)]).unwrap()
        );
        assert!(sol(0.0, 0.0, -1.0).is_full());
        assert!(sol(0.0, 0.0, 1.0).is_empty());
        assert!(sol(0.0, 0.0, 0.0).is_full());
        assert_eq!(
            sol(0.0, 2.0, -4.0),
            IntervalSet::single(f64::NEG_INFINITY, 2.0)
        );
        assert_eq!(
            sol(0.0, -2.0, -4.0),
            IntervalSet::single(-2.0, f64::INFINITY)
        );
        assert!(sol(1.0, 0.0, 1.0).is_empty());
        assert!(sol(-1.0, 0.0, -1.0).is_full());
        // double root
        assert_eq!(sol(1.0, -2.0, 1.0), IntervalSet::single(1.0, 1.0));
    }

    #[test]
    fn weights() {
        let trace =
            ClusterTrace::from_parts(vec![0, 2], vec![vec![0, 0, 1], vec![0, 1, 1]], false, 0)
                .unwrap();
        assert_eq!(
            iteration_weights(&trace, 0, 0).unwrap(),
            vec![0.5, 0.5, 0.0]
        );
        assert_eq!(
            iteration_weights(&trace, 1, 1).unwrap(),
            vec![0.0, 0.5, 0.5]
        );
        assert_eq!(
            iteration_weights(&trace, 0, 1).unwrap(),
            vec![0.0, 0.0, 1.0]
        );
    }

    fn sample() -> DataMatrix {
        DataMatrix::from_rows(&[
            [0.0, 0.3],
            [0.4, -0.2],
            [-0.3, 0.1],
            [5.0, 5.2],
            [5.3, 4.9],
            [4.8, 5.1],
        ])
        .unwrap()
    }

    #[test]
    fn equal_contrast_entries_cancel() {
        let x = sample();
        let trace = lloyd(&x, 2, 10, 3).unwrap();
        let labels = trace.final_labels().to_vec();
        let ctx = ContrastContext::new(&x, &labels, 0, 1).unwrap();
        // two members of the same cluster share ν
        let (i, j) = {
            let first = labels[0];
            let j = (1..6).find(|&j| labels[j] == first).unwrap();
            (0, j)
        };
        let quad = coeffs_pairwise(&ctx, i, j).unwrap();
        assert_eq!(quad.a, 0.0);
        assert_eq!(quad.b, 0.0);
        let direct: f64 = x
            .row(i)
            .iter()
            .zip(x.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        assert!((quad.c - direct).abs() < 1e-12);
    }

    #[test]
    fn singleton_centroid_is_zero() {
        let x = sample();
        let labels = [0, 0, 0, 1, 1, 1];
        let ctx = ContrastContext::new(&x, &labels, 0, 1).unwrap();
        let mut w = vec![0.0; 6];
        w[4] = 1.0;
        let quad = coeffs_centroid(&ctx, 4, &w).unwrap();
        assert_eq!(quad, Quadratic::new(0.0, 0.0, 0.0));
    }

    #[test]
    fn separated_clusters_exclude_zero() {
        let x = sample();
        let trace = lloyd(&x, 2, 10, 3).unwrap();
        let labels = trace.final_labels().to_vec();
        let ctx = ContrastContext::new(&x, &labels, 0, 1).unwrap();
        let set = truncation_set(&trace, &ctx).unwrap();
        assert!(set.contains(ctx.stat()));
        assert!(!set.contains(0.0));
        assert!(!oracle_membership(&trace, &ctx, 0.0).unwrap());
        assert!(oracle_membership(&trace, &ctx, ctx.stat()).unwrap());
        let expected = 6 * (2 - 1) * (trace.iterations() + 1);
        assert_eq!(
            conditioning_quadratics(&trace, &ctx, 1.0).unwrap().len(),
            expected
        );
    }
}
