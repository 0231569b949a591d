//! Truncated scaled-χ tail probabilities and the selective p-values.
//!
//! Under the null the statistic `φ = ‖X^T ν‖` is distributed as
//! `σ ‖ν‖ χ_q`, independently of the quantities conditioned on, so the
//! selective p-value is the survival function of that law restricted to the
//! truncation set. Interval masses are formed in log space from the
//! regularized incomplete gamma function, which keeps p-values far in the
//! tail finite.

use serde::{Deserialize, Serialize};

use crate::contrast::ContrastContext;
use crate::covariance::CovarianceFactors;
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::kmeans::ClusterTrace;
use crate::special::{gamma_pair, GammaPair};
use crate::truncation::{truncation_set, truncation_set_sigma};

fn chi_gamma(c: f64, q: usize, scale: f64) -> GammaPair {
    let z = c / scale;
    gamma_pair(0.5 * q as f64, 0.5 * z * z)
}

fn check_dist(q: usize, scale: f64) -> Result<()> {
    if q == 0 {
        return Err(Error::invalid("degrees of freedom must be positive"));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid(format!(
            "scale must be positive, got {scale}"
        )));
    }
    Ok(())
}

/// `Pr(scale · χ_q ≥ c)`.
pub fn chi_survival(c: f64, q: usize, scale: f64) -> Result<f64> {
    Ok(ln_chi_survival(c, q, scale)?.exp())
}

/// `ln Pr(scale · χ_q ≥ c)`.
pub fn ln_chi_survival(c: f64, q: usize, scale: f64) -> Result<f64> {
    check_dist(q, scale)?;
    if c.is_nan() {
        return Err(Error::invalid("threshold is NaN"));
    }
    if c <= 0.0 {
        return Ok(0.0);
    }
    Ok(chi_gamma(c, q, scale).ln_q)
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// A scaled `χ_q` law truncated to a subset of `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedChi {
    dof: usize,
    scale: f64,
    support: IntervalSet,
}

impl TruncatedChi {
    /// The support is intersected with `[0, ∞)`.
    pub fn new(dof: usize, scale: f64, support: IntervalSet) -> Result<Self> {
        check_dist(dof, scale)?;
        Ok(TruncatedChi {
            dof,
            scale,
            support: support.clip_nonnegative(),
        })
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn support(&self) -> &IntervalSet {
        &self.support
    }

    /// Log of the untruncated probability of `[lo, hi]`, with `0 ≤ lo ≤ hi`.
    fn ln_interval_mass(&self, iv: Interval) -> f64 {
        if iv.hi <= iv.lo {
            return f64::NEG_INFINITY;
        }
        let lo = chi_gamma(iv.lo, self.dof, self.scale);
        if iv.hi == f64::INFINITY {
            return lo.ln_q;
        }
        let hi = chi_gamma(iv.hi, self.dof, self.scale);
        if iv.lo <= 0.0 {
            return hi.ln_p;
        }
        // difference of survival values in the upper region, of CDF values
        // in the lower one
        if lo.q <= 0.5 {
            lo.ln_q + (-(hi.ln_q - lo.ln_q).exp_m1()).ln()
        } else {
            hi.ln_p + (-(lo.ln_p - hi.ln_p).exp_m1()).ln()
        }
    }

    fn ln_mass(&self, set: &IntervalSet) -> f64 {
        let terms: Vec<f64> = set
            .intervals()
            .iter()
            .map(|&iv| self.ln_interval_mass(iv))
            .collect();
        log_sum_exp(&terms)
    }

    /// `ln Pr(φ ≥ c | φ ∈ support)`.
    pub fn ln_survival(&self, c: f64) -> Result<f64> {
        if c.is_nan() {
            return Err(Error::invalid("threshold is NaN"));
        }
        let ln_den = self.ln_mass(&self.support);
        if ln_den == f64::NEG_INFINITY || ln_den.is_nan() {
            return Err(Error::DegenerateSupport);
        }
        let upper = self
            .support
            .intersect(&IntervalSet::single(c, f64::INFINITY));
        let ln_num = self.ln_mass(&upper);
        let ln_p = (ln_num - ln_den).min(0.0);
        if ln_p.is_nan() {
            return Err(Error::Numerical(format!(
                "truncated survival at {c} is not a number"
            )));
        }
        Ok(ln_p)
    }

    /// `Pr(φ ≥ c | φ ∈ support)`.
    pub fn survival(&self, c: f64) -> Result<f64> {
        Ok(self.ln_survival(c)?.exp())
    }
}

/// `Pr(φ ≥ c | φ ∈ dist.support)`.
pub fn truncated_survival(c: f64, dist: &TruncatedChi) -> Result<f64> {
    dist.survival(c)
}

/// Logarithm of [`truncated_survival`]; finite wherever the support has
/// mass above `c`, even when the probability itself underflows.
pub fn ln_truncated_survival(c: f64, dist: &TruncatedChi) -> Result<f64> {
    dist.ln_survival(c)
}

/// Where the noise scale used by a p-value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaSource {
    Known,
    Med,
    Sample,
    User,
}

/// Summary of the trace a result conditions on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub k: usize,
    pub iterations: usize,
    pub seed: u64,
    pub converged: bool,
}

impl From<&ClusterTrace> for TraceMeta {
    fn from(trace: &ClusterTrace) -> Self {
        TraceMeta {
            k: trace.k(),
            iterations: trace.iterations(),
            seed: trace.seed(),
            converged: trace.converged(),
        }
    }
}

/// One selective test of a cluster pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectiveTestResult {
    pub p_value: f64,
    /// `ln p_value`, finite even when `p_value` underflows to zero.
    pub ln_p_value: f64,
    /// Observed statistic, `‖x^T ν‖` or `‖Σ^{-1/2} x^T ν‖`.
    pub stat: f64,
    /// Scale of the χ law, `σ ‖ν‖` or `‖ν‖`.
    pub scale: f64,
    /// Noise level behind `scale`; `None` for a full covariance.
    pub sigma: Option<f64>,
    pub sigma_source: SigmaSource,
    /// Zero-based cluster pair.
    pub pair: (usize, usize),
    pub truncation: IntervalSet,
    pub trace_meta: TraceMeta,
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(())
}

/// Selective p-value for an already computed truncation set.
pub fn p_selective_given_set(
    trace: &ClusterTrace,
    ctx: &ContrastContext<'_>,
    truncation: IntervalSet,
    sigma: f64,
    source: SigmaSource,
) -> Result<SelectiveTestResult> {
    check_sigma(sigma)?;
    let scale = sigma * ctx.nu_norm_sq().sqrt();
    let dist = TruncatedChi::new(ctx.x().q(), scale, truncation)?;
    let ln_p = dist.ln_survival(ctx.stat())?;
    Ok(SelectiveTestResult {
        p_value: ln_p.exp(),
        ln_p_value: ln_p,
        stat: ctx.stat(),
        scale,
        sigma: Some(sigma),
        sigma_source: source,
        pair: ctx.pair(),
        truncation: dist.support,
        trace_meta: trace.into(),
    })
}

/// Selective p-value with known noise level `σ`.
pub fn p_selective(
    x: &DataMatrix,
    trace: &ClusterTrace,
    k1: usize,
    k2: usize,
    sigma: f64,
) -> Result<SelectiveTestResult> {
    p_selective_estimated(x, trace, k1, k2, sigma, SigmaSource::Known)
}

/// Selective p-value with a plug-in noise level `σ̂`, tagged with where it
/// came from.
pub fn p_selective_estimated(
    x: &DataMatrix,
    trace: &ClusterTrace,
    k1: usize,
    k2: usize,
    sigma_hat: f64,
    source: SigmaSource,
) -> Result<SelectiveTestResult> {
    check_sigma(sigma_hat)?;
    let ctx = ContrastContext::new(x, trace.final_labels(), k1, k2)?;
    let set = truncation_set(trace, &ctx)?;
    p_selective_given_set(trace, &ctx, set, sigma_hat, source)
}

/// Selective p-value under a known covariance `Σ`.
pub fn p_sigma_selective(
    x: &DataMatrix,
    trace: &ClusterTrace,
    k1: usize,
    k2: usize,
    factors: &CovarianceFactors,
) -> Result<SelectiveTestResult> {
    let ctx = ContrastContext::new(x, trace.final_labels(), k1, k2)?;
    let white = ctx.whitened(factors)?;
    let set = truncation_set_sigma(trace, &ctx, factors)?;
    let scale = ctx.nu_norm_sq().sqrt();
    let dist = TruncatedChi::new(x.q(), scale, set)?;
    let ln_p = dist.ln_survival(white.stat)?;
    Ok(SelectiveTestResult {
        p_value: ln_p.exp(),
        ln_p_value: ln_p,
        stat: white.stat,
        scale,
        sigma: None,
        sigma_source: SigmaSource::Known,
        pair: (k1, k2),
        truncation: dist.support,
        trace_meta: trace.into(),
    })
}

/// Unadjusted tail probability `Pr(σ ‖ν‖ χ_q ≥ ‖x^T ν‖)`.
pub fn p_naive(ctx: &ContrastContext<'_>, q: usize, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    chi_survival(ctx.stat(), q, sigma * ctx.nu_norm_sq().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::from_intervals(v.iter().copied()).unwrap()
    }

    #[test]
    fn chi_survival_values() {
        assert_eq!(chi_survival(0.0, 3, 1.0).unwrap(), 1.0);
        assert!((chi_survival(3.0, 2, 1.0).unwrap() - (-4.5f64).exp()).abs() < 1e-15);
        let a = chi_survival(1.7, 5, 2.5).unwrap();
        let b = chi_survival(1.7 / 2.5, 5, 1.0).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn untruncated_support_matches_plain_survival() {
        let dist = TruncatedChi::new(4, 1.3, IntervalSet::single(0.0, f64::INFINITY)).unwrap();
        for c in [0.1, 1.0, 2.5, 6.0] {
            let a = truncated_survival(c, &dist).unwrap();
            let b = chi_survival(c, 4, 1.3).unwrap();
            assert!((a - b).abs() < 1e-14, "{a} {b}");
        }
    }

    #[test]
    fn two_piece_support_closed_form() {
        let dist = TruncatedChi::new(2, 1.0, set(&[(1.0, 2.0), (3.0, f64::INFINITY)])).unwrap();
        let e = |c: f64| (-c * c / 2.0).exp();
        let expected = e(3.0) / (e(1.0) - e(2.0) + e(3.0));
        let got = truncated_survival(3.0, &dist).unwrap();
        assert!((got - expected).abs() < 1e-14);
        assert!((got - 0.02303).abs() < 5e-6);
        let dist = TruncatedChi::new(2, 1.0, set(&[(2.0, f64::INFINITY)])).unwrap();
        assert!((truncated_survival(2.0, &dist).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_support_is_degenerate() {
        let dist = TruncatedChi::new(2, 1.0, IntervalSet::empty()).unwrap();
        assert_eq!(dist.survival(1.0), Err(Error::DegenerateSupport));
        let dist = TruncatedChi::new(2, 1.0, set(&[(1.0, 1.0)])).unwrap();
        assert_eq!(dist.survival(1.0), Err(Error::DegenerateSupport));
    }

    #[test]
    fn deep_tail_log_survival_is_finite() {
        let dist = TruncatedChi::new(784, 1.0, set(&[(28.0, f64::INFINITY)])).unwrap();
        let ln_p = dist.ln_survival(28.0 + 280.0).unwrap();
        assert!(ln_p.is_finite() && ln_p < -1e4);
    }
}
