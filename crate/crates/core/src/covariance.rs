//! Symmetric square roots of a known covariance matrix and whitening.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::data::DataMatrix;
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;
const MIN_EIGENVALUE: f64 = 1e-12;

/// `Σ`, `Σ^{1/2}` and `Σ^{-1/2}` for a symmetric positive-definite `Σ`.
///
/// Both roots are the unique symmetric positive-definite ones, computed from
/// one eigendecomposition `Σ = U Λ U^T` as `U (Λ + ridge·I)^{±1/2} U^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceFactors {
    sigma: DMatrix<f64>,
    sqrt: DMatrix<f64>,
    inv_sqrt: DMatrix<f64>,
    ridge: f64,
}

impl CovarianceFactors {
    pub fn q(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn sqrt(&self) -> &DMatrix<f64> {
        &self.sqrt
    }

    pub fn inv_sqrt(&self) -> &DMatrix<f64> {
        &self.inv_sqrt
    }

    /// `Σ^{-1/2} v`.
    pub fn apply_inv_sqrt(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.inv_sqrt, v)
    }

    /// `Σ^{1/2} v`.
    pub fn apply_sqrt(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.sqrt, v)
    }

    /// `σ² I_q`.
    pub fn spherical(q: usize, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        let sigma_sq = sigma * sigma;
        let mut m = vec![0.0; q * q];
        for j in 0..q {
            m[j * q + j] = sigma_sq;
        }
        factorize(&DataMatrix::new(q, q, m)?, 0.0)
    }
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    debug_assert_eq!(m.ncols(), v.len());
    (m * DVector::from_column_slice(v))
        .iter()
        .copied()
        .collect()
}

/// Eigendecomposes `sigma` and forms both symmetric square roots.
///
/// Inputs whose asymmetry is within `1e-10` (relative to the largest entry,
/// floored at one) are symmetrized as `(A + A^T)/2`. Diagonal inputs skip
/// the eigensolver so that `Σ = I` yields exact identities.
pub fn factorize(sigma: &DataMatrix, ridge: f64) -> Result<CovarianceFactors> {
    let q = sigma.n();
    if sigma.q() != q {
        return Err(Error::dims(format!(
            "covariance must be square, got {}x{}",
            sigma.n(),
            sigma.q()
        )));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::invalid(format!(
            "ridge must be nonnegative, got {ridge}"
        )));
    }
    let a = DMatrix::from_row_slice(q, q, sigma.as_slice());
    let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let asymmetry = (&a - a.transpose()).amax();
    if asymmetry > SYMMETRY_TOL * scale {
        return Err(Error::invalid(format!(
            "covariance is not symmetric (max asymmetry {asymmetry:e})"
        )));
    }
    let a = (&a + a.transpose()) * 0.5;

    let is_diagonal = (0..q).all(|i| (0..q).all(|j| i == j || a[(i, j)] == 0.0));
    let (vectors, values) = if is_diagonal {
        (DMatrix::identity(q, q), a.diagonal())
    } else {
        let eig = SymmetricEigen::new(a.clone());
        (eig.eigenvectors, eig.eigenvalues)
    };

    let shifted: Vec<f64> = values.iter().map(|l| l + ridge).collect();
    if let Some(bad) = shifted.iter().find(|&&l| !(l > MIN_EIGENVALUE)) {
        return Err(Error::invalid(format!(
            "covariance is not positive definite after ridge (eigenvalue {bad:e})"
        )));
    }
    let root = DVector::from_iterator(q, shifted.iter().map(|l| l.sqrt()));
    let inv_root = DVector::from_iterator(q, shifted.iter().map(|l| 1.0 / l.sqrt()));
    let (sqrt, inv_sqrt) = if is_diagonal {
        (
            DMatrix::from_diagonal(&root),
            DMatrix::from_diagonal(&inv_root),
        )
    } else {
        let sym = |m: DMatrix<f64>| (&m + m.transpose()) * 0.5;
        (
            sym(&vectors * DMatrix::from_diagonal(&root) * vectors.transpose()),
            sym(&vectors * DMatrix::from_diagonal(&inv_root) * vectors.transpose()),
        )
    };
    Ok(CovarianceFactors {
        sigma: a,
        sqrt,
        inv_sqrt,
        ridge,
    })
}

/// Maps every observation `x_i` to `Σ^{-1/2} x_i`.
pub fn whiten(x: &DataMatrix, factors: &CovarianceFactors) -> Result<DataMatrix> {
    if x.q() != factors.q() {
        return Err(Error::dims(format!(
            "data has {} features but covariance is {}x{}",
            x.q(),
            factors.q(),
            factors.q()
        )));
    }
    let mut out = Vec::with_capacity(x.n() * x.q());
    for row in x.rows() {
        out.extend(factors.apply_inv_sqrt(row));
    }
    Ok(DataMatrix::from_raw(x.n(), x.q(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand_distr::{Distribution, StandardNormal};

    pub(crate) fn random_spd(q: usize, seed: u64) -> DataMatrix {
        let mut rng = rng_from_seed(seed);
        let b: DMatrix<f64> = DMatrix::from_fn(q, q, |_, _| StandardNormal.sample(&mut rng));
        let s = &b * b.transpose() / q as f64 + DMatrix::identity(q, q) * 0.5;
        let mut v = Vec::with_capacity(q * q);
        for i in 0..q {
            for j in 0..q {
                v.push(s[(i, j)]);
            }
        }
        DataMatrix::new(q, q, v).unwrap()
    }

    #[test]
    fn identity_is_exact() {
        let f = CovarianceFactors::spherical(3, 1.0).unwrap();
        assert_eq!(f.sqrt(), &DMatrix::identity(3, 3));
        assert_eq!(f.inv_sqrt(), &DMatrix::identity(3, 3));
    }

    #[test]
    fn diagonal_roots() {
        let s = DataMatrix::from_rows(&[[4.0, 0.0], [0.0, 9.0]]).unwrap();
        let f = factorize(&s, 0.0).unwrap();
        assert_eq!(f.inv_sqrt()[(0, 0)], 0.5);
        assert!((f.inv_sqrt()[(1, 1)] - 1.0 / 3.0).abs() < 1e-16);
        let x = DataMatrix::from_rows(&[[2.0, 3.0], [4.0, -6.0]]).unwrap();
        let w = whiten(&x, &f).unwrap();
        assert!((w.get(0, 0) - 1.0).abs() < 1e-15 && (w.get(0, 1) - 1.0).abs() < 1e-15);
        assert!((w.get(1, 0) - 2.0).abs() < 1e-15 && (w.get(1, 1) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn random_spd_residuals() {
        let s = random_spd(20, 4);
        let f = factorize(&s, 0.0).unwrap();
        let id = DMatrix::<f64>::identity(20, 20);
        let r1 = (f.inv_sqrt() * f.sigma() * f.inv_sqrt() - &id).norm();
        let r2 = (f.sqrt() * f.inv_sqrt() - &id).amax();
        assert!(r1 < 1e-8, "{r1}");
        assert!(r2 < 1e-10, "{r2}");
        assert_eq!(f.sqrt(), &f.sqrt().transpose());
    }

    #[test]
    fn rejects_asymmetric_and_indefinite() {
        let s = DataMatrix::from_rows(&[[1.0, 0.5], [0.4, 1.0]]).unwrap();
        assert!(factorize(&s, 0.0).is_err());
        let s = DataMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(factorize(&s, 0.0).is_err());
        // ridge rescues a singular matrix
        let s = DataMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(factorize(&s, 0.0).is_err());
        assert!(factorize(&s, 0.01).is_ok());
    }

    #[test]
    fn dimension_mismatch() {
        let f = CovarianceFactors::spherical(3, 1.0).unwrap();
        let x = DataMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(matches!(whiten(&x, &f), Err(Error::DimensionMismatch(_))));
    }
}
