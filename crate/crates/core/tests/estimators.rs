//! Noise-level estimators and the matrix-normal generator checked by
//! simulation.

mod common;

use common::normal_matrix;
use kmsel_core::rng::rng_from_seed;
use kmsel_core::simulation::{gen_matrix_normal, mu_spike};
use kmsel_core::stats::mean_and_se;
use kmsel_core::variance::{
    bias_sample, chi1_median, sigma_med, sigma_med_uncentered, sigma_sample,
};
use kmsel_core::DataMatrix;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn chi1_median_splits_simulated_squares() {
    let m = 200_000;
    let med = chi1_median();
    let mut rng = rng_from_seed(3);
    let below = (0..m)
        .filter(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * z < med
        })
        .count() as f64
        / m as f64;
    assert!((below - 0.5).abs() < 4.0 * (0.25 / m as f64).sqrt());
    assert!((ChiSquared::new(1.0).unwrap().cdf(med) - 0.5).abs() < 1e-12);
}

#[test]
fn med_estimators_are_consistent() {
    let mut rng = rng_from_seed(4);
    let x = normal_matrix(200, 500, &mut rng).scaled(2.0).unwrap();
    assert!((sigma_med(&x).value - 2.0).abs() < 0.1);
    assert!((sigma_med_uncentered(&x).value - 2.0).abs() < 0.1);
    // a common shift in every column leaves the centered version unchanged
    let shifted =
        DataMatrix::new(200, 500, x.as_slice().iter().map(|v| v + 5.0).collect()).unwrap();
    assert!((sigma_med(&shifted).value - 2.0).abs() < 0.1);
}

#[test]
fn estimators_on_spike_data() {
    // σ̂_Sample absorbs the spread of the means, σ̂_MED much less of it
    let (n, q, sigma, delta) = (150, 10, 1.0, 6.0);
    let mu = mu_spike(n, q, delta).unwrap();
    let mut med = Vec::new();
    let mut sample = Vec::new();
    for seed in 0..300 {
        let x = gen_matrix_normal(&mu, sigma, seed).unwrap();
        med.push(sigma_med(&x).value);
        sample.push(sigma_sample(&x).unwrap().value.powi(2));
    }
    let (m_med, _) = mean_and_se(&med);
    let (m_sample, se_sample) = mean_and_se(&sample);
    let expected = sigma * sigma + bias_sample(&mu).unwrap();
    assert!((m_sample - expected).abs() < 4.0 * se_sample);
    // a tenth of the entries are shifted, which lifts the median slightly
    assert!(m_med > sigma && m_med < sigma + 0.2);
    assert!(m_sample.sqrt() - sigma > 2.0 * (m_med - sigma));
}

#[test]
fn generator_moments() {
    let (n, q, sigma) = (400, 50, 1.5);
    let mu = DataMatrix::new(n, q, (0..n * q).map(|k| (k % 7) as f64 - 3.0).collect()).unwrap();
    let x = gen_matrix_normal(&mu, sigma, 12).unwrap();
    let resid: Vec<f64> = x
        .as_slice()
        .iter()
        .zip(mu.as_slice())
        .map(|(a, b)| a - b)
        .collect();
    let m = resid.len() as f64;
    let mean = resid.iter().sum::<f64>() / m;
    let var = resid.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (m - 1.0);
    assert!(mean.abs() < 4.0 * sigma / m.sqrt());
    // var of the sample variance is 2σ⁴/(m-1) for normal data
    assert!((var - sigma * sigma).abs() < 4.0 * sigma * sigma * (2.0 / (m - 1.0)).sqrt());
    // neighbouring entries are uncorrelated
    let lag: f64 = resid.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (m - 1.0);
    assert!(lag.abs() < 4.0 * sigma * sigma / m.sqrt());
    // different seeds give different draws, equal seeds equal draws
    assert_ne!(x, gen_matrix_normal(&mu, sigma, 13).unwrap());
    assert_eq!(x, gen_matrix_normal(&mu, sigma, 12).unwrap());
}
