//! Monte-Carlo calibration: trial ensembles of `T`, empirical tail
//! probabilities, the Kolmogorov-Smirnov distance to TW1, and the growth of
//! `T` under an unrealizable hypothesis.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localization::{default_cluster_count, localize, LocalizerConfig};
use crate::model::{BiclusterAssignment, ObservedMatrix};
use crate::seeds::derive_seed;
use crate::synthgen::{generate, Distribution, GeneratorSpec, LayoutSpec};
use crate::tw::{run_test_with, TestOptions, TwTable};

/// Any tabulated level works; only the statistic is kept.
const STATISTIC_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleConfig {
    pub distribution: Distribution,
    pub k: usize,
    pub n: usize,
    pub p: usize,
    pub trials: usize,
    pub seed: u64,
    /// Test against the generating assignment instead of a localized one.
    pub oracle_assignment: bool,
    /// Hypothesis tested in localized mode; `None` means the true `k`.
    pub k0: Option<usize>,
    /// Unset cluster counts default to `min(2^k, n)` and `min(2^k, p)`.
    pub localizer: LocalizerConfig,
    pub test: TestOptions,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            distribution: Distribution::gaussian_default(),
            k: 3,
            n: 500,
            p: 375,
            trials: 100,
            seed: 0,
            oracle_assignment: true,
            k0: None,
            localizer: LocalizerConfig::default(),
            test: TestOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    #[serde(rename = "T")]
    pub statistic: Option<f64>,
    pub error: Option<String>,
}

/// One record per requested trial; failed trials carry their error and are
/// left out of every statistic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub config: EnsembleConfig,
    pub trials: Vec<TrialRecord>,
}

impl EnsembleResult {
    /// Statistics of the successful trials, in trial order.
    pub fn t_values(&self) -> Vec<f64> {
        self.trials.iter().filter_map(|t| t.statistic).collect()
    }

    pub fn seeds(&self) -> Vec<u64> {
        self.trials.iter().map(|t| t.seed).collect()
    }

    pub fn failures(&self) -> usize {
        self.trials.iter().filter(|t| t.statistic.is_none()).count()
    }
}

/// `T` for one matrix drawn with `seed`.
fn trial_statistic(config: &EnsembleConfig, seed: u64, table: &TwTable) -> Result<f64> {
    let spec = GeneratorSpec {
        distribution: config.distribution.clone(),
        layout: LayoutSpec::new(config.k, config.n, config.p),
        seed,
    };
    let (a, truth) = generate(&spec)?;
    let g = if config.oracle_assignment {
        truth
    } else {
        // compress with the cluster counts of the generating structure
        let mut localizer = config.localizer.clone();
        localizer.l1 = localizer
            .l1
            .or(Some(default_cluster_count(config.k, config.n)));
        localizer.l2 = localizer
            .l2
            .or(Some(default_cluster_count(config.k, config.p)));
        hypothesis_assignment(&a, config.k0.unwrap_or(config.k), &localizer, seed)?
    };
    Ok(run_test_with(&a, &g, STATISTIC_ALPHA, &config.test, table)?.statistic)
}

fn hypothesis_assignment(
    a: &ObservedMatrix,
    k0: usize,
    localizer: &LocalizerConfig,
    seed: u64,
) -> Result<BiclusterAssignment> {
    if k0 == 0 {
        let (n, p) = a.dim();
        return Ok(BiclusterAssignment::background(n, p));
    }
    Ok(localize(a, k0, localizer, seed)?.assignment)
}

/// Runs `config.trials` independent trials; trial `i` uses
/// `derive_seed(config.seed, i)` for both data and localization.
pub fn run_ensemble(config: &EnsembleConfig, table: &TwTable) -> Result<EnsembleResult> {
    if config.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if !config.oracle_assignment {
        config.localizer.validate()?;
    }
    // surface contract errors once instead of per trial
    crate::synthgen::null_layout(config.k, config.n, config.p)?;

    let trials = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(config.seed, i as u64);
            match trial_statistic(config, seed, table) {
                Ok(t) => TrialRecord {
                    trial: i,
                    seed,
                    statistic: Some(t),
                    error: None,
                },
                Err(e) => {
                    log::warn!("trial {i} failed: {e}");
                    TrialRecord {
                        trial: i,
                        seed,
                        statistic: None,
                        error: Some(format!("{}: {e}", e.kind())),
                    }
                }
            }
        })
        .collect();
    Ok(EnsembleResult {
        config: config.clone(),
        trials,
    })
}

/// Fraction of `values` with `T >= t(alpha)` for each alpha.
pub fn tail_probabilities(values: &[f64], alphas: &[f64], table: &TwTable) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    alphas
        .iter()
        .map(|&alpha| {
            let t = table.quantile(alpha)?;
            let hits = values.iter().filter(|&&v| v >= t).count();
            Ok(hits as f64 / values.len() as f64)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "D_sqrt_r")]
    pub d_sqrt_r: f64,
    pub r: usize,
    /// Sample points outside the tabulated CDF range.
    pub clamped: usize,
}

/// Kolmogorov-Smirnov distance between the empirical law of `values` and
/// the tabulated TW1 CDF.
pub fn ks_statistic(values: &[f64], table: &TwTable) -> Result<KsResult> {
    if values.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if values.len() < 2 {
        return Err(Error::InvalidConfig(
            "the KS statistic needs at least two values".into(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let r = sorted.len();
    let clamped = sorted.iter().filter(|&&x| !table.covers(x)).count();
    if clamped > 0 {
        log::warn!("{clamped} value(s) outside the TW1 grid were clamped to its edges");
    }
    let rf = r as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = table.cdf(x);
            ((i + 1) as f64 / rf - f)
                .abs()
                .max((i as f64 / rf - f).abs())
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        d,
        d_sqrt_r: d * rf.sqrt(),
        r,
        clamped,
    })
}

/// Tail and KS summary of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSummary {
    pub n: usize,
    pub p: usize,
    pub alphas: Vec<f64>,
    pub tails: Vec<f64>,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "D_sqrt_r")]
    pub d_sqrt_r: f64,
    pub r: usize,
    pub failures: usize,
    pub clamped: usize,
}

pub fn summarize(
    ensemble: &EnsembleResult,
    alphas: &[f64],
    table: &TwTable,
) -> Result<CalibrationSummary> {
    let values = ensemble.t_values();
    let tails = tail_probabilities(&values, alphas, table)?;
    let ks = ks_statistic(&values, table)?;
    Ok(CalibrationSummary {
        n: ensemble.config.n,
        p: ensemble.config.p,
        alphas: alphas.to_vec(),
        tails,
        d: ks.d,
        d_sqrt_r: ks.d_sqrt_r,
        r: ks.r,
        failures: ensemble.failures(),
        clamped: ks.clamped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub n: usize,
    pub p: usize,
    /// Mean of `T / n^(5/3)` over successful trials.
    pub mean_scaled: f64,
    pub mean_t: f64,
    pub t_values: Vec<f64>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub sizes: Vec<(usize, usize)>,
    pub k: usize,
    pub k0: usize,
    pub distribution: Distribution,
    pub trials: usize,
    pub seed: u64,
    pub localizer: LocalizerConfig,
    pub test: TestOptions,
}

/// Mean `T / n^(5/3)` per size when testing `K0 < K` on data with `K`
/// biclusters, using localized assignments.
pub fn growth_check(config: &GrowthConfig, table: &TwTable) -> Result<Vec<GrowthPoint>> {
    if config.k0 >= config.k {
        return Err(Error::InvalidConfig(format!(
            "growth check needs K0 < K, got K0={} and K={}",
            config.k0, config.k
        )));
    }
    if config.sizes.is_empty() {
        return Err(Error::InvalidConfig("no sizes given".into()));
    }
    config
        .sizes
        .iter()
        .enumerate()
        .map(|(idx, &(n, p))| {
            let ensemble = EnsembleConfig {
                distribution: config.distribution.clone(),
                k: config.k,
                n,
                p,
                trials: config.trials,
                seed: derive_seed(config.seed, idx as u64),
                oracle_assignment: false,
                k0: Some(config.k0),
                localizer: config.localizer.clone(),
                test: config.test,
            };
            let result = run_ensemble(&ensemble, table)?;
            let values = result.t_values();
            if values.is_empty() {
                return Err(Error::EmptyEnsemble);
            }
            let scale = (n as f64).powf(5.0 / 3.0);
            let count = values.len() as f64;
            Ok(GrowthPoint {
                n,
                p,
                mean_scaled: values.iter().map(|t| t / scale).sum::<f64>() / count,
                mean_t: values.iter().sum::<f64>() / count,
                failures: result.failures(),
                t_values: values,
            })
        })
        .collect()
}
