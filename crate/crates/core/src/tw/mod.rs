//! Tracy-Widom (TW1) largest-eigenvalue test and sequential selection of K.

mod pchip;
mod select;

use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use pchip::MonotoneCubic;
pub use select::{select_k, select_k_report, SelectConfig, SelectReport, SelectionRecord};
pub use test::{run_test, run_test_with, TestOptions, TestOutcome};

/// Environment variable overriding the TW1 CDF table path.
pub const TABLE_ENV: &str = "BICLUST_TW_TABLE";

/// Embedded TW1 CDF grid, produced by `tools/tw1_table.py`.
pub const EMBEDDED_TABLE: &str = include_str!("../../data/tw1_cdf.csv");

/// Upper-tail quantiles from Tracy and Widom's Table 2 as quoted for the test.
pub const PINNED_QUANTILES: [(f64, f64); 3] = [(0.01, 2.02345), (0.05, 0.97931), (0.1, 0.45014)];

pub const ALPHA_MIN: f64 = 0.001;
pub const ALPHA_MAX: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwScaling {
    pub a_tw: f64,
    pub b_tw: f64,
}

/// Centering `(sqrt n + sqrt p)^2` and scale
/// `(sqrt n + sqrt p)(1/sqrt n + 1/sqrt p)^(1/3)`.
pub fn tw_scaling(n: usize, p: usize) -> TwScaling {
    assert!(n >= 1 && p >= 1, "matrix dimensions must be positive");
    let rn = (n as f64).sqrt();
    let rp = (p as f64).sqrt();
    let sum = rn + rp;
    TwScaling {
        a_tw: sum * sum,
        b_tw: sum * (1.0 / rn + 1.0 / rp).cbrt(),
    }
}

pub fn test_statistic(lambda1: f64, scaling: TwScaling) -> f64 {
    (lambda1 - scaling.a_tw) / scaling.b_tw
}

/// Tabulated TW1 distribution: a CDF grid plus upper-tail quantile pairs.
#[derive(Debug, Clone)]
pub struct TwTable {
    cdf: MonotoneCubic,
    quantiles: MonotoneCubic,
    quantile_pairs: Vec<(f64, f64)>,
}

impl TwTable {
    /// Parses a two-column `x,cdf` CSV. Lines starting with `#` and a
    /// non-numeric header line are skipped.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(',');
            let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::TableFormat(format!(
                    "line {}: expected two columns",
                    lineno + 1
                )));
            };
            match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
                (Ok(x), Ok(f)) => {
                    xs.push(x);
                    fs.push(f);
                }
                _ if xs.is_empty() => continue,
                _ => {
                    return Err(Error::TableFormat(format!(
                        "line {}: cannot parse {line:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Self::from_grid(xs, fs)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }

    pub fn embedded() -> Self {
        Self::from_csv_str(EMBEDDED_TABLE).expect("embedded TW1 table is valid")
    }

    /// The table named by `BICLUST_TW_TABLE`, or the embedded one.
    pub fn load_default() -> Result<Self> {
        match std::env::var_os(TABLE_ENV) {
            Some(path) if !path.is_empty() => Self::from_path(path),
            _ => Ok(Self::embedded()),
        }
    }

    pub fn from_grid(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() < 4 {
            return Err(Error::TableFormat("need at least four grid points".into()));
        }
        for w in xs.windows(2).zip(fs.windows(2)) {
            let (x, f) = w;
            if !(x[1] > x[0]) || !(f[1] > f[0]) {
                return Err(Error::TableFormat(format!(
                    "grid not strictly increasing near x = {}",
                    x[0]
                )));
            }
        }
        if fs[0] < 0.0 || fs[fs.len() - 1] > 1.0 {
            return Err(Error::TableFormat("CDF values outside [0, 1]".into()));
        }
        let max_step = xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        if xs[0] > -5.0 || xs[xs.len() - 1] < 4.0 || max_step > 0.05 + 1e-12 {
            return Err(Error::TableFormat(
                "grid must cover [-5, 4] with step at most 0.05".into(),
            ));
        }
        let cdf = MonotoneCubic::new(xs, fs);

        // upper-tail quantiles on an alpha grid, with the literature values pinned
        let count = (ALPHA_MAX / ALPHA_MIN).round() as usize;
        let mut pairs = Vec::with_capacity(count);
        for i in 1..=count {
            let alpha = i as f64 / 1000.0;
            let t = match PINNED_QUANTILES.iter().find(|(a, _)| *a == alpha) {
                Some(&(_, t)) => t,
                None => invert(&cdf, 1.0 - alpha)?,
            };
            pairs.push((alpha, t));
        }
        if pairs.windows(2).any(|w| !(w[1].1 < w[0].1)) {
            return Err(Error::TableFormat(
                "pinned quantiles are inconsistent with the CDF grid".into(),
            ));
        }
        let quantiles = MonotoneCubic::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
        );
        Ok(Self {
            cdf,
            quantiles,
            quantile_pairs: pairs,
        })
    }

    /// TW1 CDF; arguments outside the grid are clamped to its edges.
    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf.eval(x).clamp(0.0, 1.0)
    }

    /// Whether `x` lies inside the tabulated range.
    pub fn covers(&self, x: f64) -> bool {
        let (xs, _) = self.cdf.knots();
        x >= xs[0] && x <= xs[xs.len() - 1]
    }

    pub fn cdf_grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (xs, fs) = self.cdf.knots();
        xs.iter().copied().zip(fs.iter().copied())
    }

    pub fn quantile_pairs(&self) -> &[(f64, f64)] {
        &self.quantile_pairs
    }

    /// Upper-tail quantile `t(alpha)`, i.e. `P(TW1 >= t) = alpha`.
    pub fn quantile(&self, alpha: f64) -> Result<f64> {
        if !(ALPHA_MIN..=ALPHA_MAX).contains(&alpha) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        if let Some(&(_, t)) = self.quantile_pairs.iter().find(|(a, _)| *a == alpha) {
            return Ok(t);
        }
        Ok(self.quantiles.eval(alpha))
    }
}

fn invert(cdf: &MonotoneCubic, target: f64) -> Result<f64> {
    let (xs, fs) = cdf.knots();
    if target <= fs[0] || target >= fs[fs.len() - 1] {
        return Err(Error::TableFormat(format!(
            "CDF grid does not reach probability {target}"
        )));
    }
    let (mut lo, mut hi) = (xs[0], xs[xs.len() - 1]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf.eval(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

static DEFAULT_TABLE: OnceLock<Option<TwTable>> = OnceLock::new();

/// Process-wide table, loaded once from `BICLUST_TW_TABLE` or the embedded data.
pub fn default_table() -> Result<&'static TwTable> {
    match DEFAULT_TABLE.get_or_init(|| TwTable::load_default().ok()) {
        Some(table) => Ok(table),
        // reload to report the original error
        None => Err(TwTable::load_default()
            .err()
            .unwrap_or_else(|| Error::TableFormat("table changed while loading".into()))),
    }
}

/// Upper-tail TW1 quantile from the default table.
pub fn tw1_quantile(alpha: f64) -> Result<f64> {
    default_table()?.quantile(alpha)
}
