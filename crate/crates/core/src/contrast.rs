//! Cluster-pair contrast `ν` and the one-parameter perturbation paths.
//!
//! For clusters `C1` and `C2`, `ν_i = 1{i ∈ C1}/|C1| − 1{i ∈ C2}/|C2|`, so
//! `x^T ν` is the difference of the two centroids. The path
//!
//! ```text
//! x'(φ) = x + (φ − ‖x^T ν‖) (ν / ‖ν‖²) dir(x^T ν)^T
//! ```
//!
//! slides the centroid difference to length `φ` while keeping `Π_ν^⊥ x` and
//! the difference direction fixed. Under a known covariance `Σ` the path is
//! `Π_ν^⊥ x + (φ/‖ν‖²) ν dir(Σ^{-1/2} x^T ν)^T Σ^{1/2}`, which differs from
//! the spherical one only by the slope factor
//! `r = ‖x^T ν‖ / ‖Σ^{-1/2} x^T ν‖`.

use crate::covariance::CovarianceFactors;
use crate::data::{dot, norm, DataMatrix};
use crate::error::{Error, Result};

/// `ν` for the ordered pair `(k1, k2)`.
pub fn contrast_vector(labels: &[usize], k1: usize, k2: usize) -> Result<Vec<f64>> {
    if k1 == k2 {
        return Err(Error::invalid(format!(
            "contrast needs two different clusters, got {} twice",
            k1 + 1
        )));
    }
    let n1 = labels.iter().filter(|&&c| c == k1).count();
    let n2 = labels.iter().filter(|&&c| c == k2).count();
    for (k, size) in [(k1, n1), (k2, n2)] {
        if size == 0 {
            return Err(Error::EmptyCluster {
                cluster: k,
                iteration: None,
            });
        }
    }
    let (w1, w2) = (1.0 / n1 as f64, 1.0 / n2 as f64);
    Ok(labels
        .iter()
        .map(|&c| {
            if c == k1 {
                w1
            } else if c == k2 {
                -w2
            } else {
                0.0
            }
        })
        .collect())
}

/// Everything about one cluster pair that the truncation and p-value code
/// reuses: `ν`, `‖ν‖²`, `x^T ν`, its norm and its direction.
#[derive(Debug, Clone)]
pub struct ContrastContext<'a> {
    x: &'a DataMatrix,
    pair: (usize, usize),
    nu: Vec<f64>,
    nu_norm_sq: f64,
    xtnu: Vec<f64>,
    stat: f64,
    direction: Option<Vec<f64>>,
}

/// The contrast seen through `Σ^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WhitenedContrast {
    /// `‖Σ^{-1/2} x^T ν‖`, the test statistic under a known `Σ`.
    pub stat: f64,
    /// `‖x^T ν‖ / ‖Σ^{-1/2} x^T ν‖`.
    pub ratio: f64,
    /// `dir(Σ^{-1/2} x^T ν)`.
    pub direction: Vec<f64>,
}

impl<'a> ContrastContext<'a> {
    /// Builds the context for final clusters `k1` and `k2` of `labels`.
    pub fn new(x: &'a DataMatrix, labels: &[usize], k1: usize, k2: usize) -> Result<Self> {
        if labels.len() != x.n() {
            return Err(Error::dims(format!(
                "{} labels for {} observations",
                labels.len(),
                x.n()
            )));
        }
        let nu = contrast_vector(labels, k1, k2)?;
        let nu_norm_sq = dot(&nu, &nu);
        let xtnu = x.transpose_times(&nu);
        let stat = norm(&xtnu);
        let direction = (stat > 0.0).then(|| xtnu.iter().map(|v| v / stat).collect());
        Ok(ContrastContext {
            x,
            pair: (k1, k2),
            nu,
            nu_norm_sq,
            xtnu,
            stat,
            direction,
        })
    }

    pub fn x(&self) -> &'a DataMatrix {
        self.x
    }

    pub fn pair(&self) -> (usize, usize) {
        self.pair
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn nu_norm_sq(&self) -> f64 {
        self.nu_norm_sq
    }

    /// `x^T ν`, the centroid difference.
    pub fn xtnu(&self) -> &[f64] {
        &self.xtnu
    }

    /// `‖x^T ν‖`.
    pub fn stat(&self) -> f64 {
        self.stat
    }

    /// `dir(x^T ν)`; `None` when the centroids coincide.
    pub fn direction(&self) -> Option<&[f64]> {
        self.direction.as_deref()
    }

    pub(crate) fn require_direction(&self) -> Result<&[f64]> {
        self.direction().ok_or(Error::DegenerateContrast)
    }

    /// `x'(φ)`.
    pub fn perturbed_data(&self, phi: f64) -> Result<DataMatrix> {
        let dir = self.require_direction()?;
        let shift = (phi - self.stat) / self.nu_norm_sq;
        let mut out = self.x.as_slice().to_vec();
        let q = self.x.q();
        for (i, &nu_i) in self.nu.iter().enumerate() {
            if nu_i != 0.0 {
                let c = shift * nu_i;
                for (o, d) in out[i * q..(i + 1) * q].iter_mut().zip(dir) {
                    *o += c * d;
                }
            }
        }
        Ok(DataMatrix::from_raw(self.x.n(), q, out))
    }

    /// Statistic, slope ratio and direction after whitening by `Σ^{-1/2}`.
    pub fn whitened(&self, factors: &CovarianceFactors) -> Result<WhitenedContrast> {
        if factors.q() != self.x.q() {
            return Err(Error::dims(format!(
                "data has {} features but covariance is {}x{}",
                self.x.q(),
                factors.q(),
                factors.q()
            )));
        }
        self.require_direction()?;
        let w = factors.apply_inv_sqrt(&self.xtnu);
        let stat = norm(&w);
        if !(stat > 0.0) {
            return Err(Error::DegenerateContrast);
        }
        Ok(WhitenedContrast {
            stat,
            ratio: self.stat / stat,
            direction: w.iter().map(|v| v / stat).collect(),
        })
    }

    /// `x̃'(φ) = Π_ν^⊥ x + (φ/‖ν‖²) ν dir(Σ^{-1/2} x^T ν)^T Σ^{1/2}`.
    pub fn perturbed_data_sigma(
        &self,
        phi: f64,
        factors: &CovarianceFactors,
    ) -> Result<DataMatrix> {
        let white = self.whitened(factors)?;
        let back = factors.apply_sqrt(&white.direction);
        let q = self.x.q();
        let mut out = self.x.as_slice().to_vec();
        for (i, &nu_i) in self.nu.iter().enumerate() {
            if nu_i != 0.0 {
                let proj = nu_i / self.nu_norm_sq;
                for ((o, m), b) in out[i * q..(i + 1) * q]
                    .iter_mut()
                    .zip(&self.xtnu)
                    .zip(&back)
                {
                    *o += -proj * m + phi * proj * b;
                }
            }
        }
        Ok(DataMatrix::from_raw(self.x.n(), q, out))
    }

    /// Row-wise decomposition `x'(φ)_i = base_i + φ · ν_i · slope`, with
    /// `base_i = x_i − ν_i x^T ν / ‖ν‖²` and `slope = ratio · dir / ‖ν‖²`.
    pub(crate) fn path(&self, ratio: f64) -> Result<PerturbationPath> {
        let dir = self.require_direction()?.to_vec();
        let q = self.x.q();
        let mut base = self.x.as_slice().to_vec();
        for (i, &nu_i) in self.nu.iter().enumerate() {
            if nu_i != 0.0 {
                let proj = nu_i / self.nu_norm_sq;
                for (b, m) in base[i * q..(i + 1) * q].iter_mut().zip(&self.xtnu) {
                    *b -= proj * m;
                }
            }
        }
        Ok(PerturbationPath {
            q,
            base,
            nu: self.nu.clone(),
            slope: ratio / self.nu_norm_sq,
            direction: dir,
        })
    }
}

/// Affine decomposition of a perturbation path, shared by the quadratic
/// coefficient routines.
#[derive(Debug, Clone)]
pub(crate) struct PerturbationPath {
    pub q: usize,
    /// `n × q` row-major `Π_ν^⊥ x`.
    pub base: Vec<f64>,
    pub nu: Vec<f64>,
    /// `ratio / ‖ν‖²`.
    pub slope: f64,
    pub direction: Vec<f64>,
}

impl PerturbationPath {
    pub fn base_row(&self, i: usize) -> &[f64] {
        &self.base[i * self.q..(i + 1) * self.q]
    }
}
