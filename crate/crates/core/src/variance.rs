//! Noise-level estimators for the plug-in p-value.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::special::gamma_q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMethod {
    /// Median of squared column-median-centered entries.
    Med,
    /// Median of squared raw entries.
    MedUncentered,
    /// Pooled sample standard deviation around column means.
    Sample,
}

impl SigmaMethod {
    pub fn name(self) -> &'static str {
        match self {
            SigmaMethod::Med => "med",
            SigmaMethod::MedUncentered => "med_uncentered",
            SigmaMethod::Sample => "sample",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaEstimate {
    pub value: f64,
    pub method: SigmaMethod,
    pub n: usize,
    pub q: usize,
    /// Set when the estimate is exactly zero and cannot be used as a scale.
    pub degenerate: bool,
}

impl SigmaEstimate {
    fn new(value: f64, method: SigmaMethod, x: &DataMatrix) -> Self {
        SigmaEstimate {
            value,
            method,
            n: x.n(),
            q: x.q(),
            degenerate: value == 0.0,
        }
    }
}

/// Median of the `χ²_1` distribution, found by bisection on
/// `Q(1/2, m/2) = 1/2`.
pub fn chi1_median() -> f64 {
    static MEDIAN: OnceLock<f64> = OnceLock::new();
    *MEDIAN.get_or_init(|| {
        let (mut lo, mut hi) = (0.0f64, 2.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gamma_q(0.5, 0.5 * mid) > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    })
}

/// Median with the midpoint convention for even counts. Reorders `v`.
pub fn median(v: &mut [f64]) -> f64 {
    assert!(!v.is_empty(), "median of an empty slice");
    let mid = v.len() / 2;
    let (_, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if v.len() % 2 == 1 {
        upper
    } else {
        let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

fn med_of_squares(mut squares: Vec<f64>) -> f64 {
    (median(&mut squares) / chi1_median()).sqrt()
}

/// `σ̂_MED`: column-median centering, then `sqrt(median(squares) / M)`
/// with `M` the `χ²_1` median.
pub fn sigma_med(x: &DataMatrix) -> SigmaEstimate {
    let centers: Vec<f64> = (0..x.q()).map(|j| median(&mut x.column(j))).collect();
    let squares = x
        .rows()
        .flat_map(|row| row.iter().zip(&centers).map(|(v, m)| (v - m) * (v - m)))
        .collect();
    SigmaEstimate::new(med_of_squares(squares), SigmaMethod::Med, x)
}

/// `σ̃_MED`: like [`sigma_med`] without the column centering.
pub fn sigma_med_uncentered(x: &DataMatrix) -> SigmaEstimate {
    let squares = x.as_slice().iter().map(|v| v * v).collect();
    SigmaEstimate::new(med_of_squares(squares), SigmaMethod::MedUncentered, x)
}

/// `σ̂_Sample = sqrt(Σ_ij (x_ij − x̄_j)² / (nq − q))`.
pub fn sigma_sample(x: &DataMatrix) -> Result<SigmaEstimate> {
    let (n, q) = (x.n(), x.q());
    if n < 2 {
        return Err(Error::invalid(
            "the sample estimator needs at least two rows",
        ));
    }
    let mut means = vec![0.0; q];
    for row in x.rows() {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let ss: f64 = x
        .rows()
        .map(|row| {
            row.iter()
                .zip(&means)
                .map(|(v, m)| (v - m) * (v - m))
                .sum::<f64>()
        })
        .sum();
    let value = (ss / (n * q - q) as f64).sqrt();
    Ok(SigmaEstimate::new(value, SigmaMethod::Sample, x))
}

/// Dispatches on `method`.
pub fn estimate_sigma(x: &DataMatrix, method: SigmaMethod) -> Result<SigmaEstimate> {
    match method {
        SigmaMethod::Med => Ok(sigma_med(x)),
        SigmaMethod::MedUncentered => Ok(sigma_med_uncentered(x)),
        SigmaMethod::Sample => sigma_sample(x),
    }
}

/// `E[σ̂²_Sample] − σ²` for mean matrix `μ`:
/// `(1 / (2 n (n−1) q)) Σ_j Σ_i Σ_i' (μ_ij − μ_i'j)²`.
///
/// Evaluated through the identity `Σ_i Σ_i' (a_i − a_i')² = 2n Σ_i (a_i − ā)²`.
pub fn bias_sample(mu: &DataMatrix) -> Result<f64> {
    let (n, q) = (mu.n(), mu.q());
    if n < 2 {
        return Err(Error::invalid("bias needs at least two rows"));
    }
    let mut total = 0.0;
    for j in 0..q {
        let col = mu.column(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        total += col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    }
    Ok(total / ((n - 1) * q) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi1_median_defining_property() {
        let m = chi1_median();
        assert!((m - 0.454_936_4).abs() < 1e-6, "{m}");
        assert!((gamma_q(0.5, m / 2.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn median_conventions() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&mut [7.0]), 7.0);
    }

    #[test]
    fn sample_two_points() {
        let x = DataMatrix::from_rows(&[[0.0], [2.0]]).unwrap();
        let s = sigma_sample(&x).unwrap();
        assert!((s.value - 2f64.sqrt()).abs() < 1e-15);
        let x = DataMatrix::from_rows(&[[1.0, 2.0], [1.0, 2.0]]).unwrap();
        let s = sigma_sample(&x).unwrap();
        assert!(s.degenerate && s.value == 0.0);
        assert!(sigma_sample(&DataMatrix::from_rows(&[[1.0]]).unwrap()).is_err());
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let x = DataMatrix::zeros(4, 3).unwrap();
        let s = sigma_med_uncentered(&x);
        assert!(s.degenerate && s.value == 0.0);
    }

    #[test]
    fn bias_two_points() {
        let mu = DataMatrix::from_rows(&[[0.0], [3.0]]).unwrap();
        assert!((bias_sample(&mu).unwrap() - 4.5).abs() < 1e-15);
        assert_eq!(bias_sample(&DataMatrix::zeros(5, 2).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn centering_and_scale() {
        let x = DataMatrix::from_rows(&[
            [0.3, -1.2],
            [1.1, 0.4],
            [-0.7, 2.2],
            [0.05, -0.3],
            [2.0, 0.9],
        ])
        .unwrap();
        let base = sigma_med(&x).value;
        let shifted: Vec<Vec<f64>> = x.rows().map(|r| vec![r[0] + 10.0, r[1] - 3.0]).collect();
        let shifted = DataMatrix::from_rows(&shifted).unwrap();
        assert!((sigma_med(&shifted).value - base).abs() < 1e-12);
        let scaled = x.scaled(-3.0).unwrap();
        assert!((sigma_med(&scaled).value - 3.0 * base).abs() < 1e-12);
        assert!(
            (sigma_sample(&scaled).unwrap().value - 3.0 * sigma_sample(&x).unwrap().value).abs()
                < 1e-12
        );
    }
}
