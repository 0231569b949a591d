//! Instance generators and brute-force oracles shared by the integration
//! tests.
#![allow(dead_code)]

use kmsel_core::contrast::ContrastContext;
use kmsel_core::covariance::CovarianceFactors;
use kmsel_core::kmeans::{lloyd, reproduces_trace, ClusterTrace};
use kmsel_core::rng::{derive_seed, rng_from_seed, Rng};
use kmsel_core::{DataMatrix, Error, IntervalSet};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

pub fn normal_matrix(n: usize, q: usize, rng: &mut Rng) -> DataMatrix {
    let v = (0..n * q).map(|_| StandardNormal.sample(rng)).collect();
    DataMatrix::new(n, q, v).unwrap()
}

/// A small clustered dataset together with a Lloyd trace and a pair of
/// final clusters.
pub struct Instance {
    pub x: DataMatrix,
    pub trace: ClusterTrace,
    pub pair: (usize, usize),
}

/// Points around up to three random centers, so traces vary from a single
/// step to many.
pub fn clustered_instance(
    n: usize,
    q: usize,
    k: usize,
    t_max: usize,
    seed: u64,
) -> Option<Instance> {
    let mut rng = rng_from_seed(seed);
    let spread: f64 = rng.random_range(0.0..4.0);
    let centers: Vec<Vec<f64>> = (0..3)
        .map(|_| {
            (0..q)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    spread * z
                })
                .collect()
        })
        .collect();
    let mut v = Vec::with_capacity(n * q);
    for _ in 0..n {
        let c = &centers[rng.random_range(0..3)];
        for cj in c {
            let z: f64 = StandardNormal.sample(&mut rng);
            v.push(cj + z);
        }
    }
    let x = DataMatrix::new(n, q, v).unwrap();
    let trace = match lloyd(&x, k, t_max, derive_seed(seed, 7, 0)) {
        Ok(t) => t,
        Err(Error::EmptyCluster { .. }) => return None,
        Err(e) => panic!("{e}"),
    };
    let a = rng.random_range(0..k);
    let mut b = rng.random_range(0..k - 1);
    if b >= a {
        b += 1;
    }
    Some(Instance {
        x,
        trace,
        pair: (a, b),
    })
}

/// Counts grid points in `[0, 3·stat]` where the analytic set and the
/// rerun-Lloyd oracle disagree, skipping points within `1e-6` of an endpoint.
pub fn grid_disagreements(
    set: &IntervalSet,
    stat: f64,
    points: usize,
    member: impl Fn(f64) -> bool,
) -> usize {
    let top = 3.0 * stat;
    let mut bad = 0;
    for g in 0..points {
        let phi = top * g as f64 / (points - 1) as f64;
        if set.distance_to_boundary(phi) <= 1e-6 * phi.abs().max(1.0) {
            continue;
        }
        if set.contains(phi) != member(phi) {
            bad += 1;
        }
    }
    bad
}

/// Draws `scale · χ_q` by the norm of `q` standard normals.
pub fn chi_draw(q: usize, scale: f64, rng: &mut Rng) -> f64 {
    let s: f64 = (0..q)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            z * z
        })
        .sum();
    scale * s.sqrt()
}

/// Rejection-sampling estimate of the selective p-value: draw `φ` from its
/// null law, keep draws whose perturbed data reproduce the trace, and
/// report the accepted fraction at or above the observed statistic.
pub struct ConditionalEstimate {
    pub accepted: Vec<f64>,
    pub draws: usize,
}

pub fn rejection_sample(
    trace: &ClusterTrace,
    ctx: &ContrastContext<'_>,
    sigma: f64,
    wanted: usize,
    max_draws: usize,
    seed: u64,
) -> ConditionalEstimate {
    let mut rng = rng_from_seed(seed);
    let scale = sigma * ctx.nu_norm_sq().sqrt();
    let q = ctx.x().q();
    let mut accepted = Vec::with_capacity(wanted);
    let mut draws = 0;
    while accepted.len() < wanted && draws < max_draws {
        draws += 1;
        let phi = chi_draw(q, scale, &mut rng);
        let x = ctx.perturbed_data(phi).unwrap();
        if reproduces_trace(&x, trace) {
            accepted.push(phi);
        }
    }
    ConditionalEstimate { accepted, draws }
}

/// Known-covariance counterpart of [`rejection_sample`] along `x̃'(φ)`,
/// where `φ ~ ‖ν‖ χ_q`.
pub fn rejection_sample_sigma(
    trace: &ClusterTrace,
    ctx: &ContrastContext<'_>,
    factors: &CovarianceFactors,
    wanted: usize,
    max_draws: usize,
    seed: u64,
) -> ConditionalEstimate {
    let mut rng = rng_from_seed(seed);
    let scale = ctx.nu_norm_sq().sqrt();
    let q = ctx.x().q();
    let mut accepted = Vec::with_capacity(wanted);
    let mut draws = 0;
    while accepted.len() < wanted && draws < max_draws {
        draws += 1;
        let phi = chi_draw(q, scale, &mut rng);
        let x = ctx.perturbed_data_sigma(phi, factors).unwrap();
        if reproduces_trace(&x, trace) {
            accepted.push(phi);
        }
    }
    ConditionalEstimate { accepted, draws }
}

/// `ln Q(a, x)` for integer `a` from the finite Poisson sum
/// `Q(a, x) = e^{-x} Σ_{k<a} x^k / k!`, in log space.
pub fn ln_q_integer(a: usize, x: f64) -> f64 {
    let terms: Vec<f64> = (0..a)
        .scan(0.0f64, |ln_fact, k| {
            if k > 0 {
                *ln_fact += (k as f64).ln();
            }
            Some(k as f64 * x.ln() - *ln_fact)
        })
        .collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    -x + max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}
