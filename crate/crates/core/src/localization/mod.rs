//! Submatrix localization: estimates a disjoint bicluster assignment with a
//! given number of biclusters by maximizing the generalized profile
//! likelihood with simulated annealing, optionally on a Ward-compressed
//! matrix.

mod anneal;
mod compress;
mod entropy;
mod objective;
mod schedule;
mod ward;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BiclusterAssignment, ObservedMatrix};

pub use anneal::{anneal, metropolis_accept, AnnealOutcome, WeightedGrid};
pub use compress::{
    compress, default_cluster_count, CompressedAssignment, CompressedMatrix, RowColumnHierarchy,
};
pub use entropy::{EntropyFn, EntropyKind, LOG_CLAMP};
pub use objective::{profile_likelihood, profile_likelihood_compressed};
pub use schedule::{CoolingKind, CoolingSchedule, DEFAULT_MAX_STEPS};
pub use ward::{ward_cluster, ward_linkage, Dendrogram, Merge};

/// Generator for one annealing run.
///
/// ChaCha8 keyed by `seed`, with the restart index selecting the stream, so
/// restart `r` of seed `s` is reproducible independently of the others.
pub fn restart_rng(seed: u64, restart: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart);
    rng
}

/// Entry-level result of a localization run.
#[derive(Debug, Clone, PartialEq)]
pub struct Localized {
    pub assignment: BiclusterAssignment,
    pub outcome: AnnealOutcome,
}

/// Annealing directly on the entries of `a`.
pub fn sa_localize(
    a: &ObservedMatrix,
    k0: usize,
    f: &EntropyFn,
    schedule: &CoolingSchedule,
    rng: &mut ChaCha8Rng,
) -> Result<BiclusterAssignment> {
    sa_localize_traced(a, k0, f, schedule, rng, false).map(|l| l.assignment)
}

pub fn sa_localize_traced(
    a: &ObservedMatrix,
    k0: usize,
    f: &EntropyFn,
    schedule: &CoolingSchedule,
    rng: &mut ChaCha8Rng,
    record_trace: bool,
) -> Result<Localized> {
    let (n, p) = a.dim();
    let grid = WeightedGrid::new(n, p, a.as_slice().to_vec(), vec![1.0; n * p]);
    let outcome = anneal(&grid, k0, f, schedule, rng, record_trace)?;
    let assignment = BiclusterAssignment::new(outcome.group_of_cell.clone(), k0)?;
    Ok(Localized {
        assignment,
        outcome,
    })
}

/// Annealing on a compressed matrix, expanded back to the entries.
pub fn sa_localize_compressed(
    a: &ObservedMatrix,
    k0: usize,
    f: &EntropyFn,
    l1: usize,
    l2: usize,
    schedule: &CoolingSchedule,
    rng: &mut ChaCha8Rng,
) -> Result<BiclusterAssignment> {
    let c = compress(a, l1, l2)?;
    anneal_compressed(&c, k0, f, schedule, rng, false).map(|l| l.assignment)
}

/// Anneals on an existing compression.
pub fn anneal_compressed(
    c: &CompressedMatrix,
    k0: usize,
    f: &EntropyFn,
    schedule: &CoolingSchedule,
    rng: &mut ChaCha8Rng,
    record_trace: bool,
) -> Result<Localized> {
    let sum: Vec<f64> = c
        .a_comp
        .iter()
        .zip(c.m_counts.iter())
        .map(|(&x, &m)| m as f64 * x)
        .collect();
    let weight: Vec<f64> = c.m_counts.iter().map(|&m| m as f64).collect();
    let grid = WeightedGrid::new(c.l1(), c.l2(), sum, weight);
    let outcome = anneal(&grid, k0, f, schedule, rng, record_trace)?;
    let cells = CompressedAssignment::from_parts_unchecked(outcome.group_of_cell.clone(), k0);
    let assignment = c.expand(&cells)?;
    Ok(Localized {
        assignment,
        outcome,
    })
}

/// Localizer settings shared by the CLI, `select_k` and the calibration
/// harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalizerConfig {
    pub entropy: EntropyKind,
    pub cooling: CoolingSchedule,
    pub restarts: usize,
    /// Row clusters; `None` means `min(2^K0, n)`.
    pub l1: Option<usize>,
    /// Column clusters; `None` means `min(2^K0, p)`.
    pub l2: Option<usize>,
    /// Skip compression and anneal over individual entries.
    pub uncompressed: bool,
    pub record_trace: bool,
}

impl Default for LocalizerConfig {
    fn default() -> Self {
        Self {
            entropy: EntropyKind::Gaussian,
            cooling: CoolingSchedule::synthetic_default(),
            restarts: 5,
            l1: None,
            l2: None,
            uncompressed: false,
            record_trace: false,
        }
    }
}

impl LocalizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        self.cooling.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub restart: usize,
    pub objective: Option<f64>,
    pub steps: u64,
    pub accepted_moves: u64,
    pub noop_steps: u64,
    pub error: Option<String>,
}

/// Best-of-restarts localization.
#[derive(Debug, Clone)]
pub struct Localization {
    pub assignment: BiclusterAssignment,
    pub best_restart: usize,
    pub objective: f64,
    pub outcome: AnnealOutcome,
    pub restarts: Vec<RestartRecord>,
    pub l1: usize,
    pub l2: usize,
}

/// Runs `config.restarts` independent annealers and keeps the one with the
/// largest final profile likelihood (ties go to the lowest restart index).
pub fn localize(
    a: &ObservedMatrix,
    k0: usize,
    config: &LocalizerConfig,
    seed: u64,
) -> Result<Localization> {
    let hierarchy = (!config.uncompressed).then(|| RowColumnHierarchy::new(a));
    localize_with(a, k0, config, seed, hierarchy.as_ref())
}

/// As [`localize`], reusing precomputed row/column hierarchies.
pub fn localize_with(
    a: &ObservedMatrix,
    k0: usize,
    config: &LocalizerConfig,
    seed: u64,
    hierarchy: Option<&RowColumnHierarchy>,
) -> Result<Localization> {
    config.validate()?;
    if k0 == 0 {
        return Err(Error::InvalidConfig("localization needs K0 >= 1".into()));
    }
    let (n, p) = a.dim();
    let f = EntropyFn::from(config.entropy);
    let compressed = match (config.uncompressed, hierarchy) {
        (true, _) => None,
        (false, h) => {
            let l1 = config.l1.unwrap_or_else(|| default_cluster_count(k0, n));
            let l2 = config.l2.unwrap_or_else(|| default_cluster_count(k0, p));
            let c = match h {
                Some(h) => h.compress(a, l1, l2)?,
                None => compress(a, l1, l2)?,
            };
            Some(c)
        }
    };

    let runs: Vec<Result<Localized>> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(seed, r as u64);
            match &compressed {
                Some(c) => {
                    anneal_compressed(c, k0, &f, &config.cooling, &mut rng, config.record_trace)
                }
                None => {
                    sa_localize_traced(a, k0, &f, &config.cooling, &mut rng, config.record_trace)
                }
            }
        })
        .collect();

    let mut records = Vec::with_capacity(runs.len());
    let mut best: Option<(usize, Localized)> = None;
    let mut first_error = None;
    for (r, run) in runs.into_iter().enumerate() {
        match run {
            Ok(l) => {
                records.push(RestartRecord {
                    restart: r,
                    objective: Some(l.outcome.objective),
                    steps: l.outcome.steps,
                    accepted_moves: l.outcome.accepted_moves,
                    noop_steps: l.outcome.noop_steps,
                    error: None,
                });
                let better = match &best {
                    None => true,
                    Some((_, b)) => l.outcome.objective > b.outcome.objective,
                };
                if better {
                    best = Some((r, l));
                }
            }
            Err(e) => {
                records.push(RestartRecord {
                    restart: r,
                    objective: None,
                    steps: 0,
                    accepted_moves: 0,
                    noop_steps: 0,
                    error: Some(e.to_string()),
                });
                first_error.get_or_insert(e);
            }
        }
    }
    let (best_restart, best) = match best {
        Some(b) => b,
        None => return Err(first_error.expect("at least one restart ran")),
    };
    let (l1, l2) = compressed.as_ref().map_or((n, p), |c| (c.l1(), c.l2()));
    Ok(Localization {
        objective: best.outcome.objective,
        assignment: best.assignment,
        outcome: best.outcome,
        best_restart,
        restarts: records,
        l1,
        l2,
    })
}
