//! Mean models, matrix-normal data and Monte Carlo drivers for Type I error
//! and power experiments.
//!
//! Replicate `r` draws its data, its k-means seed and its pair choice from
//! seeds derived from `base_seed` on separate streams, so results do not
//! depend on thread scheduling. A replicate whose Lloyd run empties a
//! cluster is redrawn, up to [`MAX_ATTEMPTS`] times.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::contrast::ContrastContext;
use crate::covariance::CovarianceFactors;
use crate::data::{norm, DataMatrix};
use crate::error::{Error, Result};
use crate::inference::{p_naive, p_selective_given_set, p_sigma_selective, SigmaSource};
use crate::kmeans::{lloyd, ClusterTrace};
use crate::rng::{derive_seed, rng_from_seed};
use crate::stats::{ks_critical_value, ks_p_value, ks_uniform, proportion_se, rejection_rate};
use crate::truncation::truncation_set;
use crate::variance::{sigma_med, sigma_sample};

pub const MAX_ATTEMPTS: u64 = 100;

const STREAM_DATA: u64 = 1;
const STREAM_KMEANS: u64 = 2;
const STREAM_PAIR: u64 = 3;

/// `μ + σ Z` with i.i.d. standard normal `Z`, filled row by row.
pub fn gen_matrix_normal(mu: &DataMatrix, sigma: f64, seed: u64) -> Result<DataMatrix> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let values = mu
        .as_slice()
        .iter()
        .map(|m| {
            let z: f64 = StandardNormal.sample(&mut rng);
            m + sigma * z
        })
        .collect();
    DataMatrix::new(mu.n(), mu.q(), values)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!(
            "delta must be nonnegative, got {delta}"
        )));
    }
    Ok(())
}

fn check_thirds(n: usize) -> Result<()> {
    if n == 0 || !n.is_multiple_of(3) {
        return Err(Error::invalid(format!(
            "n = {n} must be a positive multiple of 3"
        )));
    }
    Ok(())
}

/// Three equidistant means: rows in the first, second and last third sit at
/// `(−δ/2, 0, …, 0)`, `(0, …, 0, √3 δ/2)` and `(δ/2, 0, …, 0)`.
pub fn mu_spike(n: usize, q: usize, delta: f64) -> Result<DataMatrix> {
    check_thirds(n)?;
    check_delta(delta)?;
    if q < 2 {
        return Err(Error::invalid(format!(
            "the spike model needs q >= 2, got {q}"
        )));
    }
    let mut v = vec![0.0; n * q];
    let third = n / 3;
    for i in 0..n {
        let row = &mut v[i * q..(i + 1) * q];
        match i / third {
            0 => row[0] = -delta / 2.0,
            1 => row[q - 1] = 3f64.sqrt() * delta / 2.0,
            _ => row[0] = delta / 2.0,
        }
    }
    DataMatrix::new(n, q, v)
}

/// Three means `(θ_b, 0)` with `θ_b = sqrt(δ/2) e_b` inside the first `q/10`
/// coordinates, so the rows are orthogonal with squared norm `δ/2` and any
/// two are at squared distance `δ`.
pub fn mu_ortho_theta(n: usize, q: usize, delta: f64) -> Result<DataMatrix> {
    check_thirds(n)?;
    check_delta(delta)?;
    if !q.is_multiple_of(10) || q / 10 < 3 {
        return Err(Error::invalid(format!(
            "the orthogonal model needs q divisible by 10 with q/10 >= 3, got {q}"
        )));
    }
    let mut v = vec![0.0; n * q];
    let third = n / 3;
    let height = (delta / 2.0).sqrt();
    for i in 0..n {
        v[i * q + i / third] = height;
    }
    DataMatrix::new(n, q, v)
}

/// Ground-truth partition of the three-group models: row `i` belongs to
/// group `i / (n/3)`.
pub fn thirds_partition(n: usize) -> Vec<usize> {
    let third = (n / 3).max(1);
    (0..n).map(|i| (i / third).min(2)).collect()
}

/// Whether both estimated clusters `pair` coincide exactly with some true
/// cluster.
pub fn true_pair_recovered(labels: &[usize], pair: (usize, usize), truth: &[usize]) -> bool {
    let matches_truth = |k: usize| {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == k).collect();
        let Some(&first) = members.first() else {
            return false;
        };
        let g = truth[first];
        members.iter().all(|&i| truth[i] == g)
            && truth.iter().filter(|&&t| t == g).count() == members.len()
    };
    matches_truth(pair.0) && matches_truth(pair.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    GlobalNull,
    Spike,
    OrthoTheta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    /// Selective p-value with the true `σ`.
    SelectiveKnown,
    /// Selective p-value with `σ̂_MED`.
    SelectiveMed,
    /// Selective p-value with `σ̂_Sample`.
    SelectiveSample,
    /// Unadjusted χ tail with the true `σ`.
    Naive,
    /// Known-covariance route with `Σ = σ² I`.
    SigmaDirect,
}

impl PValueMethod {
    pub fn name(self) -> &'static str {
        match self {
            PValueMethod::SelectiveKnown => "selective_known",
            PValueMethod::SelectiveMed => "selective_med",
            PValueMethod::SelectiveSample => "selective_sample",
            PValueMethod::Naive => "naive",
            PValueMethod::SigmaDirect => "sigma_direct",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPolicy {
    RandomPair,
    AllPairs,
}

fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

fn default_n() -> usize {
    30
}
fn default_q() -> usize {
    2
}
fn default_k() -> usize {
    3
}
fn default_t_max() -> usize {
    100
}
fn default_sigma() -> f64 {
    1.0
}
fn default_replicates() -> usize {
    100
}
fn default_alpha() -> f64 {
    0.05
}
fn default_methods() -> Vec<PValueMethod> {
    vec![PValueMethod::SelectiveKnown]
}
fn default_pair_policy() -> PairPolicy {
    PairPolicy::RandomPair
}

/// One Monte Carlo experiment. Only `model` is required when deserializing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Model,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_q")]
    pub q: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(
        default = "default_methods",
        deserialize_with = "one_or_many",
        rename = "p_value_method"
    )]
    pub methods: Vec<PValueMethod>,
    #[serde(default = "default_pair_policy")]
    pub pair_policy: PairPolicy,
}

impl ExperimentConfig {
    /// Defaults for everything but the model.
    pub fn new(model: Model) -> Self {
        ExperimentConfig {
            model,
            n: default_n(),
            q: default_q(),
            k: default_k(),
            t_max: default_t_max(),
            sigma: default_sigma(),
            delta: 0.0,
            replicates: default_replicates(),
            alpha: default_alpha(),
            base_seed: 0,
            methods: default_methods(),
            pair_policy: default_pair_policy(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be at least 1"));
        }
        if self.k < 2 || self.k > self.n {
            return Err(Error::invalid(format!(
                "k = {} must lie in 2..={}",
                self.k, self.n
            )));
        }
        if self.t_max == 0 {
            return Err(Error::invalid("t_max must be at least 1"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid(
                "p_value_method must name at least one method",
            ));
        }
        check_delta(self.delta)?;
        self.mean_matrix().map(|_| ())
    }

    /// Mean matrix of the configured model.
    pub fn mean_matrix(&self) -> Result<DataMatrix> {
        match self.model {
            Model::GlobalNull => DataMatrix::zeros(self.n, self.q),
            Model::Spike => mu_spike(self.n, self.q, self.delta),
            Model::OrthoTheta => mu_ortho_theta(self.n, self.q, self.delta),
        }
    }

    fn truth(&self) -> Vec<usize> {
        match self.model {
            Model::GlobalNull => vec![0; self.n],
            _ => thirds_partition(self.n),
        }
    }
}

/// One p-value from one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub replicate: usize,
    pub method: PValueMethod,
    /// Zero-based cluster pair.
    pub pair: (usize, usize),
    pub p_value: f64,
    pub stat: f64,
    /// `‖μ^T ν‖`, the true centroid gap along the tested contrast.
    pub effect: f64,
    pub recovered: bool,
    /// Plug-in `σ̂` when the method estimates one.
    pub sigma_hat: Option<f64>,
}

/// Counts of replicates that needed redrawing or produced no p-value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub empty_cluster_retries: usize,
    pub abandoned_replicates: usize,
    /// `(method, message)` for every p-value that could not be computed.
    pub failures: Vec<(String, String)>,
}

#[derive(Debug)]
struct ReplicateOutcome {
    records: Vec<TestRecord>,
    retries: usize,
    abandoned: bool,
    failures: Vec<(String, String)>,
}

fn choose_pairs(config: &ExperimentConfig, replicate: usize) -> Vec<(usize, usize)> {
    match config.pair_policy {
        PairPolicy::AllPairs => (0..config.k)
            .flat_map(|a| (a + 1..config.k).map(move |b| (a, b)))
            .collect(),
        PairPolicy::RandomPair => {
            let mut rng =
                rng_from_seed(derive_seed(config.base_seed, STREAM_PAIR, replicate as u64));
            let a = rng.random_range(0..config.k);
            let mut b = rng.random_range(0..config.k - 1);
            if b >= a {
                b += 1;
            }
            vec![(a.min(b), a.max(b))]
        }
    }
}

fn draw(
    config: &ExperimentConfig,
    mu: &DataMatrix,
    replicate: usize,
    attempt: u64,
) -> Result<(DataMatrix, ClusterTrace)> {
    let index = replicate as u64 * MAX_ATTEMPTS + attempt;
    let x = gen_matrix_normal(
        mu,
        config.sigma,
        derive_seed(config.base_seed, STREAM_DATA, index),
    )?;
    let trace = lloyd(
        &x,
        config.k,
        config.t_max,
        derive_seed(config.base_seed, STREAM_KMEANS, index),
    )?;
    Ok((x, trace))
}

fn run_replicate(
    config: &ExperimentConfig,
    mu: &DataMatrix,
    truth: &[usize],
    replicate: usize,
) -> Result<ReplicateOutcome> {
    let mut retries = 0;
    let mut drawn = None;
    for attempt in 0..MAX_ATTEMPTS {
        match draw(config, mu, replicate, attempt) {
            Ok(v) => {
                drawn = Some(v);
                break;
            }
            Err(Error::EmptyCluster { .. }) => retries += 1,
            Err(e) => return Err(e),
        }
    }
    let Some((x, trace)) = drawn else {
        return Ok(ReplicateOutcome {
            records: Vec::new(),
            retries,
            abandoned: true,
            failures: Vec::new(),
        });
    };

    let needs = |m: PValueMethod| config.methods.contains(&m);
    let med = needs(PValueMethod::SelectiveMed).then(|| sigma_med(&x).value);
    let sample = if needs(PValueMethod::SelectiveSample) {
        Some(sigma_sample(&x)?.value)
    } else {
        None
    };
    let spherical = if needs(PValueMethod::SigmaDirect) {
        Some(CovarianceFactors::spherical(config.q, config.sigma)?)
    } else {
        None
    };

    let labels = trace.final_labels();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for pair in choose_pairs(config, replicate) {
        let ctx = match ContrastContext::new(&x, labels, pair.0, pair.1) {
            Ok(c) => c,
            Err(e) => {
                failures.push(("contrast".to_string(), e.to_string()));
                continue;
            }
        };
        let effect = norm(&mu.transpose_times(ctx.nu()));
        let recovered = true_pair_recovered(labels, pair, truth);
        let set = truncation_set(&trace, &ctx);
        for &method in &config.methods {
            let computed: Result<(f64, f64, Option<f64>)> = match method {
                PValueMethod::Naive => {
                    p_naive(&ctx, config.q, config.sigma).map(|p| (p, ctx.stat(), None))
                }
                PValueMethod::SigmaDirect => p_sigma_selective(
                    &x,
                    &trace,
                    pair.0,
                    pair.1,
                    spherical.as_ref().expect("factors prepared"),
                )
                .map(|r| (r.p_value, r.stat, None)),
                _ => {
                    let (sigma, source) = match method {
                        PValueMethod::SelectiveKnown => (config.sigma, SigmaSource::Known),
                        PValueMethod::SelectiveMed => (med.expect("estimated"), SigmaSource::Med),
                        _ => (sample.expect("estimated"), SigmaSource::Sample),
                    };
                    let sigma_hat = (source != SigmaSource::Known).then_some(sigma);
                    set.clone().and_then(|s| {
                        p_selective_given_set(&trace, &ctx, s, sigma, source)
                            .map(|r| (r.p_value, r.stat, sigma_hat))
                    })
                }
            };
            match computed {
                Ok((p_value, stat, sigma_hat)) => records.push(TestRecord {
                    replicate,
                    method,
                    pair,
                    p_value,
                    stat,
                    effect,
                    recovered,
                    sigma_hat,
                }),
                Err(e) => failures.push((method.name().to_string(), e.to_string())),
            }
        }
    }
    Ok(ReplicateOutcome {
        records,
        retries,
        abandoned: false,
        failures,
    })
}

fn run_all(config: &ExperimentConfig) -> Result<(Vec<TestRecord>, Diagnostics)> {
    config.validate()?;
    let mu = config.mean_matrix()?;
    let truth = config.truth();
    let outcomes: Vec<ReplicateOutcome> = (0..config.replicates)
        .into_par_iter()
        .map(|r| run_replicate(config, &mu, &truth, r))
        .collect::<Result<_>>()?;
    let mut diagnostics = Diagnostics::default();
    let mut records = Vec::new();
    for o in outcomes {
        diagnostics.empty_cluster_retries += o.retries;
        diagnostics.abandoned_replicates += usize::from(o.abandoned);
        diagnostics.failures.extend(o.failures);
        records.extend(o.records);
    }
    Ok((records, diagnostics))
}

/// Calibration summary of one method's p-values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: PValueMethod,
    pub count: usize,
    pub rejection_rate: f64,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    /// KS distance rejected at the 1% level for this many draws.
    pub ks_critical_1pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Type1Report {
    pub config: ExperimentConfig,
    pub summaries: Vec<MethodSummary>,
    pub diagnostics: Diagnostics,
    pub records: Vec<TestRecord>,
}

impl Type1Report {
    /// P-values of `method` in replicate order.
    pub fn p_values(&self, method: PValueMethod) -> Vec<f64> {
        method_p_values(&self.records, method)
    }

    pub fn summary(&self, method: PValueMethod) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }
}

fn method_p_values(records: &[TestRecord], method: PValueMethod) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.method == method)
        .map(|r| r.p_value)
        .collect()
}

/// Null calibration run on pure noise, one p-value per tested pair and
/// method.
pub fn run_type1(config: &ExperimentConfig) -> Result<Type1Report> {
    if config.model != Model::GlobalNull {
        return Err(Error::invalid("Type I runs need the global_null model"));
    }
    let (records, diagnostics) = run_all(config)?;
    let summaries = config
        .methods
        .iter()
        .map(|&method| {
            let p = method_p_values(&records, method);
            let ks = ks_uniform(&p);
            MethodSummary {
                method,
                count: p.len(),
                rejection_rate: rejection_rate(&p, config.alpha),
                ks_statistic: ks,
                ks_p_value: ks_p_value(ks, p.len()),
                ks_critical_1pct: ks_critical_value(0.01, p.len().max(1)),
            }
        })
        .collect();
    Ok(Type1Report {
        config: config.clone(),
        summaries,
        diagnostics,
        records,
    })
}

/// Rejection frequency of one method among tests of recovered true clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPower {
    pub method: PValueMethod,
    /// `None` when no tested pair was a pair of true clusters.
    pub power: Option<f64>,
    pub standard_error: Option<f64>,
    pub accepted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub config: ExperimentConfig,
    /// Fraction of tested pairs made of two true clusters.
    pub detection_probability: f64,
    pub detection_standard_error: f64,
    /// Tested pairs that were true clusters.
    pub accepted_replicates: usize,
    pub tested_pairs: usize,
    pub conditional_power: Vec<ConditionalPower>,
    pub diagnostics: Diagnostics,
    pub records: Vec<TestRecord>,
}

impl PowerReport {
    pub fn power(&self, method: PValueMethod) -> Option<&ConditionalPower> {
        self.conditional_power.iter().find(|c| c.method == method)
    }
}

/// Detection probability and conditional power under a three-group model.
pub fn run_power(config: &ExperimentConfig) -> Result<PowerReport> {
    if config.model == Model::GlobalNull {
        return Err(Error::invalid(
            "power runs need the spike or ortho_theta model",
        ));
    }
    let (records, diagnostics) = run_all(config)?;
    // detection is counted once per tested pair, using the first method's
    // records so that pairs with a failed p-value are still counted
    let mut pairs: Vec<(usize, (usize, usize), bool)> = records
        .iter()
        .map(|r| (r.replicate, r.pair, r.recovered))
        .collect();
    pairs.dedup();
    let tested = pairs.len();
    let accepted = pairs.iter().filter(|p| p.2).count();
    let detection = if tested == 0 {
        0.0
    } else {
        accepted as f64 / tested as f64
    };
    let conditional_power = config
        .methods
        .iter()
        .map(|&method| {
            let p: Vec<f64> = records
                .iter()
                .filter(|r| r.method == method && r.recovered)
                .map(|r| r.p_value)
                .collect();
            let power = (!p.is_empty()).then(|| rejection_rate(&p, config.alpha));
            ConditionalPower {
                method,
                power,
                standard_error: power.map(|v| proportion_se(v, p.len())),
                accepted: p.len(),
            }
        })
        .collect();
    Ok(PowerReport {
        config: config.clone(),
        detection_probability: detection,
        detection_standard_error: proportion_se(detection, tested.max(1)),
        accepted_replicates: accepted,
        tested_pairs: tested,
        conditional_power,
        diagnostics,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    #[test]
    fn spike_means_are_equidistant() {
        let mu = mu_spike(6, 3, 6.0).unwrap();
        let (a, b, c) = (mu.row(0), mu.row(2), mu.row(4));
        for d in [dist_sq(a, b), dist_sq(a, c), dist_sq(b, c)] {
            assert!((d.sqrt() - 6.0).abs() < 1e-12);
        }
        let mu = mu_spike(6, 3, 2.0).unwrap();
        assert_eq!(mu.row(0), &[-1.0, 0.0, 0.0]);
        assert_eq!(mu.row(2), &[0.0, 0.0, 3f64.sqrt()]);
        assert_eq!(mu.row(5), &[1.0, 0.0, 0.0]);
        assert!(mu_spike(6, 3, 0.0)
            .unwrap()
            .as_slice()
            .iter()
            .all(|&v| v == 0.0));
        assert!(mu_spike(7, 3, 1.0).is_err());
        assert!(mu_spike(6, 1, 1.0).is_err());
    }

    #[test]
    fn ortho_means() {
        let mu = mu_ortho_theta(9, 30, 4.0).unwrap();
        for i in [0, 3, 6] {
            assert!((dist_sq(mu.row(i), &[0.0; 30]) - 2.0).abs() < 1e-12);
        }
        assert!((dist_sq(mu.row(0), mu.row(3)) - 4.0).abs() < 1e-12);
        assert!((dist_sq(mu.row(3), mu.row(8)) - 4.0).abs() < 1e-12);
        assert!(mu_ortho_theta(9, 20, 4.0).is_err());
        assert!(mu_ortho_theta(9, 35, 4.0).is_err());
    }

    #[test]
    fn recovery() {
        let truth = [0, 0, 1, 1, 2, 2];
        assert!(true_pair_recovered(&[2, 2, 0, 0, 1, 1], (0, 1), &truth));
        assert!(true_pair_recovered(&[2, 2, 0, 0, 1, 1], (0, 2), &truth));
        let labels = [2, 0, 0, 0, 1, 1];
        assert!(!true_pair_recovered(&labels, (0, 1), &truth));
        assert!(!true_pair_recovered(&labels, (0, 2), &truth));
        assert!(true_pair_recovered(&[2, 2, 0, 0, 1, 1], (1, 2), &truth));
    }

    #[test]
    fn fixed_seed_matrix() {
        let mu = DataMatrix::zeros(4, 3).unwrap();
        let a = gen_matrix_normal(&mu, 1.0, 9).unwrap();
        let b = gen_matrix_normal(&mu, 1.0, 9).unwrap();
        assert_eq!(a, b);
        let tiny = gen_matrix_normal(&mu, 1e-300, 9).unwrap();
        assert!(tiny.as_slice().iter().all(|v| v.abs() < 1e-290));
    }

    #[test]
    fn single_replicate_smoke() {
        let mut config = ExperimentConfig::new(Model::GlobalNull);
        config.replicates = 1;
        config.methods = vec![PValueMethod::SelectiveKnown, PValueMethod::Naive];
        let report = run_type1(&config).unwrap();
        let p = report.p_values(PValueMethod::SelectiveKnown);
        assert_eq!(p.len(), 1);
        assert!((0.0..=1.0).contains(&p[0]));
        config.model = Model::Spike;
        assert!(run_type1(&config).is_err());
        assert!(run_power(&ExperimentConfig::new(Model::GlobalNull)).is_err());
    }

    #[test]
    fn config_accepts_single_method_or_list() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"model":"spike","p_value_method":"naive"}"#).unwrap();
        assert_eq!(c.methods, vec![PValueMethod::Naive]);
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"model":"spike","p_value_method":["naive","selective_med"]}"#)
                .unwrap();
        assert_eq!(c.methods.len(), 2);
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"n":30}"#).unwrap_err();
        assert!(err.to_string().contains("model"));
    }
}
