//! Kolmogorov–Smirnov uniformity checks and small Monte Carlo helpers.

/// `sup_u |F_M(u) − u|` for the empirical CDF of `values` against
/// Uniform(0, 1).
pub fn ks_uniform(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &u)| {
            let u = u.clamp(0.0, 1.0);
            let above = (i + 1) as f64 / m - u;
            let below = u - i as f64 / m;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Survival of the Kolmogorov limit law, `Pr(K > lambda)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    // the alternating series is useless near zero, where the law has no mass
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Effective `λ` for `M` draws (Stephens' finite-sample correction).
fn effective_lambda(d: f64, m: usize) -> f64 {
    let s = (m as f64).sqrt();
    (s + 0.12 + 0.11 / s) * d
}

/// Approximate p-value of the KS distance `d` from `m` draws.
pub fn ks_p_value(d: f64, m: usize) -> f64 {
    kolmogorov_survival(effective_lambda(d, m))
}

/// Approximate critical distance at level `alpha` for `m` draws.
pub fn ks_critical_value(alpha: f64, m: usize) -> f64 {
    // invert the limit survival by bisection, then undo the correction
    let (mut lo, mut hi) = (0.2f64, 5.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_survival(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let s = (m as f64).sqrt();
    lambda / (s + 0.12 + 0.11 / s)
}

/// Fraction of `values` at or below `alpha`.
pub fn rejection_rate(values: &[f64], alpha: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().filter(|&&p| p <= alpha).count() as f64 / values.len() as f64
}

/// Binomial standard error `sqrt(p (1 − p) / m)`.
pub fn proportion_se(p: f64, m: usize) -> f64 {
    (p * (1.0 - p) / m as f64).sqrt()
}

/// Mean and standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// `(sorted value, uniform quantile (i + 0.5) / M)` pairs for QQ plots.
pub fn uniform_qq(values: &[f64]) -> Vec<(f64, f64)> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() as f64;
    v.into_iter()
        .enumerate()
        .map(|(i, p)| (p, (i as f64 + 0.5) / m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_critical_value() {
        // asymptotic 1% point is 1.62762
        let d = ks_critical_value(0.01, 10_000);
        let lambda = d * (100.0 + 0.12 + 0.0011);
        assert!((lambda - 1.627_62).abs() < 1e-4, "{lambda}");
        assert!((kolmogorov_survival(1.358_1) - 0.05).abs() < 1e-3);
    }

    #[test]
    fn ks_of_a_perfect_grid() {
        let m = 1000;
        let v: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect();
        assert!((ks_uniform(&v) - 0.5 / m as f64).abs() < 1e-12);
        let v = vec![0.0; 10];
        assert_eq!(ks_uniform(&v), 1.0);
    }

    #[test]
    fn rates() {
        assert_eq!(rejection_rate(&[0.01, 0.05, 0.5, 0.9], 0.05), 0.5);
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
