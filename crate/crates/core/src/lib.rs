//! Selecting the number of biclusters in a data matrix.
//!
//! For each hypothesis `K0 = 0, 1, ...` a disjoint bicluster assignment is
//! estimated by simulated annealing on the generalized profile likelihood,
//! the matrix is standardized group-wise, and the largest eigenvalue of the
//! residual Gram matrix is compared with a Tracy-Widom (TW1) quantile. The
//! smallest accepted `K0` is the estimate.
//!
//! ```no_run
//! use biclust_tw::{io, localization::LocalizerConfig, tw::select_k};
//!
//! let a = io::read_matrix("matrix.csv")?;
//! let (k_hat, trace) = select_k(&a, 0.01, 10, &LocalizerConfig::default(), 7)?;
//! println!("K = {k_hat} after {} tests", trace.len());
//! # Ok::<(), biclust_tw::Error>(())
//! ```

// negated comparisons deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod error;
pub mod io;
pub mod localization;
pub mod model;
pub mod seeds;
pub mod spectral;
pub mod synthgen;
pub mod tw;
pub mod validation;

pub use error::{Error, Result};
pub use localization::{
    localize, profile_likelihood, profile_likelihood_compressed, sa_localize,
    sa_localize_compressed, CoolingSchedule, EntropyFn, EntropyKind, LocalizerConfig,
};
pub use model::{
    compute_group_stats, standardize, BiclusterAssignment, GroupStats, ObservedMatrix,
    ResidualMatrix,
};
pub use spectral::max_eigenvalue;
pub use synthgen::{generate, null_layout, Distribution, GeneratorSpec, LayoutSpec};
pub use tw::{run_test, select_k, tw1_quantile, TestOutcome, TwTable};
pub use validation::{growth_check, ks_statistic, run_ensemble, tail_probabilities};
