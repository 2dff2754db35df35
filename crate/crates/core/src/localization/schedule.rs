use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on annealing steps regardless of schedule.
pub const DEFAULT_MAX_STEPS: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CoolingKind {
    /// `T_t = initial * rate^t`
    Geometric {
        rate: f64,
        #[serde(default = "one")]
        initial: f64,
    },
    /// `T_t = scale / log(t + 2)`
    Logarithmic { scale: f64 },
    /// `T_t = 0` for a fixed number of steps; only non-decreasing moves
    /// are accepted.
    Greedy { steps: u64 },
}

fn one() -> f64 {
    1.0
}

/// Temperature sequence and stopping threshold of the annealer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingSchedule {
    #[serde(flatten)]
    pub kind: CoolingKind,
    /// Annealing stops once the temperature drops below this.
    pub threshold: f64,
    #[serde(default)]
    pub max_steps: Option<u64>,
}

impl CoolingSchedule {
    pub fn geometric(rate: f64, threshold: f64) -> Self {
        Self {
            kind: CoolingKind::Geometric { rate, initial: 1.0 },
            threshold,
            max_steps: None,
        }
    }

    pub fn logarithmic(scale: f64, threshold: f64, max_steps: u64) -> Self {
        Self {
            kind: CoolingKind::Logarithmic { scale },
            threshold,
            max_steps: Some(max_steps),
        }
    }

    pub fn greedy(steps: u64) -> Self {
        Self {
            kind: CoolingKind::Greedy { steps },
            threshold: 0.0,
            max_steps: None,
        }
    }

    /// Rate 0.999 down to 1e-5, the setting used for the synthetic studies.
    pub fn synthetic_default() -> Self {
        Self::geometric(0.999, 1e-5)
    }

    /// Slower preset for real data: rate 0.9999, threshold `10^(-k0/2.5 - 2)`.
    pub fn practical(k0: usize) -> Self {
        Self::geometric(0.9999, 10f64.powf(-(k0 as f64) / 2.5 - 2.0))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        match self.kind {
            CoolingKind::Geometric { rate, initial } => {
                if !(rate > 0.0 && rate < 1.0) {
                    return bad("geometric cooling rate must lie in (0, 1)");
                }
                if !(initial >= 0.0) || !initial.is_finite() {
                    return bad("initial temperature must be finite and non-negative");
                }
                if !(self.threshold > 0.0) {
                    return bad("temperature threshold must be positive");
                }
            }
            CoolingKind::Logarithmic { scale } => {
                if !(scale > 0.0) || !scale.is_finite() {
                    return bad("logarithmic cooling scale must be positive");
                }
                if !(self.threshold > 0.0) {
                    return bad("temperature threshold must be positive");
                }
            }
            CoolingKind::Greedy { .. } => {}
        }
        Ok(())
    }

    pub fn temperature(&self, t: u64) -> f64 {
        match self.kind {
            CoolingKind::Geometric { rate, initial } => initial * rate.powf(t as f64),
            CoolingKind::Logarithmic { scale } => scale / ((t + 2) as f64).ln(),
            CoolingKind::Greedy { .. } => 0.0,
        }
    }

    /// Whether step `t` runs, and at which temperature.
    pub fn step(&self, t: u64) -> Option<f64> {
        if t >= self.max_steps.unwrap_or(DEFAULT_MAX_STEPS) {
            return None;
        }
        match self.kind {
            CoolingKind::Greedy { steps } => (t < steps).then_some(0.0),
            _ => {
                let temp = self.temperature(t);
                (temp >= self.threshold).then_some(temp)
            }
        }
    }
}

impl Default for CoolingSchedule {
    fn default() -> Self {
        Self::synthetic_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_step_count() {
        let s = CoolingSchedule::synthetic_default();
        let steps = (0..).take_while(|&t| s.step(t).is_some()).count();
        // 0.999^t >= 1e-5  <=>  t <= ln(1e-5) / ln(0.999) = 11507.2
        assert_eq!(steps, 11508);
        let mut prev = f64::INFINITY;
        for t in 0..steps as u64 {
            let temp = s.step(t).unwrap();
            assert!(temp <= prev);
            prev = temp;
        }
    }

    #[test]
    fn threshold_above_start_never_runs() {
        let s = CoolingSchedule::geometric(0.999, 2.0);
        assert_eq!(s.step(0), None);
    }

    #[test]
    fn practical_threshold() {
        let s = CoolingSchedule::practical(5);
        assert!((s.threshold - 1e-4).abs() < 1e-18);
        assert!(matches!(s.kind, CoolingKind::Geometric { rate, .. } if rate == 0.9999));
    }

    #[test]
    fn logarithmic_and_greedy() {
        let s = CoolingSchedule::logarithmic(2.0, 0.1, 10);
        assert!((s.step(0).unwrap() - 2.0 / 2f64.ln()).abs() < 1e-15);
        assert_eq!(s.step(10), None);
        let g = CoolingSchedule::greedy(3);
        assert_eq!(g.step(2), Some(0.0));
        assert_eq!(g.step(3), None);
    }

    #[test]
    fn validation() {
        assert!(CoolingSchedule::geometric(1.0, 1e-5).validate().is_err());
        assert!(CoolingSchedule::geometric(0.5, 0.0).validate().is_err());
        assert!(CoolingSchedule::geometric(0.5, 1e-3).validate().is_ok());
    }

    #[test]
    fn serde_shape() {
        let s = CoolingSchedule::synthetic_default();
        let json = serde_json::to_value(s).unwrap();
        assert_eq!(json["kind"], "geometric");
        assert_eq!(json["rate"], 0.999);
        let back: CoolingSchedule = serde_json::from_value(json).unwrap();
        assert_eq!(back, s);
    }
}
