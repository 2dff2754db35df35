use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Clamp applied inside the logarithms of the Bernoulli and Poisson
/// entropy functions.
pub const LOG_CLAMP: f64 = 1e-5;

/// Named entropy functions, as used in configuration files and on the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EntropyKind {
    Gaussian,
    Bernoulli,
    Poisson,
}

/// Relative-entropy function `f` of the generalized profile likelihood.
#[derive(Clone)]
pub enum EntropyFn {
    /// `x^2 / 2`
    Gaussian,
    /// `x log max(x, 1e-5) + (1 - x) log max(1 - x, 1e-5)`
    Bernoulli,
    /// `x log max(x, 1e-5) - x`
    Poisson,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl EntropyFn {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        EntropyFn::Custom(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            EntropyFn::Gaussian => 0.5 * x * x,
            EntropyFn::Bernoulli => {
                x * x.max(LOG_CLAMP).ln() + (1.0 - x) * (1.0 - x).max(LOG_CLAMP).ln()
            }
            EntropyFn::Poisson => x * x.max(LOG_CLAMP).ln() - x,
            EntropyFn::Custom(f) => f(x),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EntropyFn::Gaussian => "gaussian",
            EntropyFn::Bernoulli => "bernoulli",
            EntropyFn::Poisson => "poisson",
            EntropyFn::Custom(_) => "custom",
        }
    }
}

impl From<EntropyKind> for EntropyFn {
    fn from(kind: EntropyKind) -> Self {
        match kind {
            EntropyKind::Gaussian => EntropyFn::Gaussian,
            EntropyKind::Bernoulli => EntropyFn::Bernoulli,
            EntropyKind::Poisson => EntropyFn::Poisson,
        }
    }
}

impl fmt::Debug for EntropyFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_values() {
        let f = EntropyFn::Gaussian;
        assert_eq!(f.eval(0.0), 0.0);
        assert!((f.eval(1e-5) - 0.5e-10).abs() < 1e-25);
        assert_eq!(f.eval(0.5), 0.125);
        assert_eq!(f.eval(1.0), 0.5);
    }

    #[test]
    fn bernoulli_values() {
        let f = EntropyFn::Bernoulli;
        // both endpoints vanish: 0 * log(1e-5) + 1 * log(1)
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(1.0), 0.0);
        let x = 1e-5f64;
        assert_eq!(f.eval(x), x * x.ln() + (1.0 - x) * (1.0 - x).ln());
        assert_eq!(f.eval(0.5), 0.5f64.ln());
    }

    #[test]
    fn poisson_values() {
        let f = EntropyFn::Poisson;
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(1e-5), 1e-5 * 1e-5f64.ln() - 1e-5);
        assert_eq!(f.eval(0.5), 0.5 * 0.5f64.ln() - 0.5);
        assert_eq!(f.eval(1.0), -1.0);
        // clamp kicks in below 1e-5
        assert_eq!(f.eval(1e-7), 1e-7 * 1e-5f64.ln() - 1e-7);
    }

    #[test]
    fn custom_function() {
        let f = EntropyFn::custom(|x| 3.0 * x);
        assert_eq!(f.eval(2.0), 6.0);
        assert_eq!(format!("{f:?}"), "custom");
    }
}
