use serde::{Deserialize, Serialize};

use super::test::{run_test_with, TestOptions, TestOutcome};
use super::{default_table, TwTable};
use crate::error::{Error, Result};
use crate::localization::{
    localize_with, profile_likelihood, EntropyFn, LocalizerConfig, RowColumnHierarchy,
};
use crate::model::{BiclusterAssignment, ObservedMatrix};
use crate::seeds::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectConfig {
    pub alpha: f64,
    pub k_max: usize,
    pub seed: u64,
    pub localizer: LocalizerConfig,
    pub test: TestOptions,
}

impl Default for SelectConfig {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            k_max: 10,
            seed: 0,
            localizer: LocalizerConfig::default(),
            test: TestOptions::default(),
        }
    }
}

/// One hypothesis of the sequential procedure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionRecord {
    #[serde(rename = "K0")]
    pub k0: usize,
    #[serde(rename = "T")]
    pub statistic: f64,
    pub lambda1: f64,
    pub threshold: f64,
    pub reject: bool,
    pub profile_likelihood: f64,
    /// Seed handed to the localizer (restart `r` uses stream `r`).
    pub seed: u64,
    pub best_restart: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectReport {
    #[serde(rename = "K_hat")]
    pub k_hat: Option<usize>,
    pub accepted: bool,
    pub alpha: f64,
    pub k_max: usize,
    pub records: Vec<SelectionRecord>,
    #[serde(skip)]
    pub trace: Vec<TestOutcome>,
}

/// Tests `K0 = 0, 1, ...` and returns the first accepted `K0` with the trace
/// of outcomes. Fails with [`Error::NotAccepted`] when every hypothesis up to
/// `k_max` is rejected.
pub fn select_k(
    a: &ObservedMatrix,
    alpha: f64,
    k_max: usize,
    localizer: &LocalizerConfig,
    seed: u64,
) -> Result<(usize, Vec<TestOutcome>)> {
    let config = SelectConfig {
        alpha,
        k_max,
        seed,
        localizer: localizer.clone(),
        test: TestOptions::default(),
    };
    let report = select_k_report(a, &config, default_table()?)?;
    match report.k_hat {
        Some(k) => Ok((k, report.trace)),
        None => Err(Error::NotAccepted {
            trace: report.trace,
        }),
    }
}

/// Sequential procedure returning the full report whether or not a
/// hypothesis was accepted.
pub fn select_k_report(
    a: &ObservedMatrix,
    config: &SelectConfig,
    table: &TwTable,
) -> Result<SelectReport> {
    table.quantile(config.alpha)?;
    config.localizer.validate()?;
    let (n, p) = a.dim();
    let f = EntropyFn::from(config.localizer.entropy);
    let mut hierarchy: Option<RowColumnHierarchy> = None;
    let mut records = Vec::new();
    let mut trace = Vec::new();
    let mut k_hat = None;

    for k0 in 0..=config.k_max {
        let seed = derive_seed(config.seed, k0 as u64);
        let (assignment, objective, best_restart) = if k0 == 0 {
            let g = BiclusterAssignment::background(n, p);
            let objective = profile_likelihood(a, &g, &f)?;
            (g, objective, None)
        } else {
            if hierarchy.is_none() && !config.localizer.uncompressed {
                hierarchy = Some(RowColumnHierarchy::new(a));
            }
            let loc = localize_with(a, k0, &config.localizer, seed, hierarchy.as_ref())?;
            log::debug!(
                "K0={k0}: best restart {} with F={:.6e}",
                loc.best_restart,
                loc.objective
            );
            (loc.assignment, loc.objective, Some(loc.best_restart))
        };
        let outcome = run_test_with(a, &assignment, config.alpha, &config.test, table)?;
        log::info!(
            "K0={k0}: T={:.4} threshold={:.5} reject={}",
            outcome.statistic,
            outcome.threshold,
            outcome.reject
        );
        records.push(SelectionRecord {
            k0,
            statistic: outcome.statistic,
            lambda1: outcome.lambda1,
            threshold: outcome.threshold,
            reject: outcome.reject,
            profile_likelihood: objective,
            seed,
            best_restart,
        });
        let reject = outcome.reject;
        trace.push(outcome);
        if !reject {
            k_hat = Some(k0);
            break;
        }
    }
    Ok(SelectReport {
        k_hat,
        accepted: k_hat.is_some(),
        alpha: config.alpha,
        k_max: config.k_max,
        records,
        trace,
    })
}
