//! Scoring: success proportions, time-to-solution, energy gaps, and the
//! ensemble sweep that produces benchmark records.

mod report;
mod sweep;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixed::Milli;
use crate::sa::{SaError, SampleSet};

pub use report::{summarize, write_results_csv, ConfigSummary, Summary};
pub use sweep::{pool_records, run_sweep, sa_params, sa_solver_id, score_samples, SolverSpec, POOLED_SA_ID};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("proportion {successes}/{total} is not in [0, 1]")]
    InvalidProportion { successes: u64, total: u64 },
    #[error("sample set is empty")]
    EmptySamples,
    #[error(
        "{solver_id} reported energy {energy} below the planted energy {planted} of certified instance {instance_id}"
    )]
    Undercut { instance_id: String, solver_id: String, energy: Milli, planted: Milli },
    #[error("{solver_id} matched the planted bitstring of {instance_id} at energy {energy}, expected {planted}")]
    EnergyMismatch { instance_id: String, solver_id: String, energy: Milli, planted: Milli },
    #[error("sample variables do not match the variables of instance {0}")]
    VariableMismatch(String),
    #[error(transparent)]
    Sa(#[from] SaError),
    #[error("results csv: {0}")]
    Csv(String),
}

/// Exact success ratio `successes / total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub total: u64,
}

impl Proportion {
    pub fn new(successes: u64, total: u64) -> Result<Self, BenchError> {
        if total == 0 || successes > total {
            return Err(BenchError::InvalidProportion { successes, total });
        }
        Ok(Proportion { successes, total })
    }

    pub fn value(&self) -> f64 {
        self.successes as f64 / self.total as f64
    }

    /// `1 - p`, computed from the counts.
    pub fn complement(&self) -> f64 {
        (self.total - self.successes) as f64 / self.total as f64
    }

    /// Binomial standard error `sqrt(p (1 - p) / total)`.
    pub fn std_error(&self) -> f64 {
        (self.value() * self.complement() / self.total as f64).sqrt()
    }
}

/// Expected time to see the optimum once with 99% confidence:
/// `t log(0.01) / log(1 - p)`. `None` when `p = 0`; `t` when `p = 1`.
pub fn tts(p: Proportion, t_per_sample: f64) -> Option<f64> {
    if p.successes == 0 {
        None
    } else if p.successes == p.total {
        Some(t_per_sample)
    } else {
        Some(t_per_sample * (0.01f64.ln() / p.complement().ln()))
    }
}

/// Occurrence-weighted fraction of samples whose bitstring equals `planted`.
pub fn success_rate(samples: &SampleSet, planted: &str) -> Result<Proportion, BenchError> {
    let total = samples.num_samples();
    if total == 0 {
        return Err(BenchError::EmptySamples);
    }
    Proportion::new(samples.occurrences_of(planted), total)
}

/// Lowest sampled energy minus the planted energy.
pub fn energy_gap(samples: &SampleSet, planted_energy: Milli) -> Result<Milli, BenchError> {
    let best = samples.lowest().ok_or(BenchError::EmptySamples)?.energy;
    Ok(best - planted_energy)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance_id: String,
    pub solver_id: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub total_samples: u64,
    pub success_count: u64,
    pub t_per_sample: f64,
    pub tts: Option<f64>,
    pub best_energy: Milli,
    pub gap: Milli,
}

impl BenchRecord {
    pub fn proportion(&self) -> Proportion {
        Proportion { successes: self.success_count, total: self.total_samples }
    }

    pub fn p(&self) -> f64 {
        self.proportion().value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sa::{SaConfig, SampleRecord};
    use proptest::prelude::{prop_assert, proptest};

    pub(crate) fn sample_set(records: &[(&str, i64, u64)]) -> SampleSet {
        SampleSet {
            variables: (0..records.first().map_or(0, |r| r.0.len() as u32)).collect(),
            records: records
                .iter()
                .map(|&(b, e, n)| SampleRecord { bitstring: b.into(), energy: Milli(e), occurrences: n })
                .collect(),
            config: SaConfig { num_sweeps: 1, num_reads: 1, beta_min: 0.1, beta_max: 1.0, seed: 0 },
            wall_time_per_read: 1e-4,
        }
    }

    #[test]
    fn success_rates() {
        let s = sample_set(&[("11", -2000, 37), ("10", -1000, 63)]);
        let p = success_rate(&s, "11").unwrap();
        assert_eq!((p.successes, p.total), (37, 100));
        assert_eq!(p.value(), 0.37);
        assert_eq!(success_rate(&s, "00").unwrap().value(), 0.0);
        let all = sample_set(&[("11", -2000, 100)]);
        assert_eq!(success_rate(&all, "11").unwrap().value(), 1.0);
        assert!(success_rate(&sample_set(&[]), "11").is_err());
    }

    #[test]
    fn tts_values() {
        let t = 1e-4;
        assert_eq!(tts(Proportion::new(99, 100).unwrap(), t), Some(t));
        let half = tts(Proportion::new(1, 2).unwrap(), t).unwrap();
        assert!((half / t - 6.643856189774724).abs() < 1e-12);
        let low = tts(Proportion::new(1, 100).unwrap(), 1.0).unwrap();
        assert!((low - 458.2105).abs() < 1e-3);
        assert_eq!(tts(Proportion::new(0, 100).unwrap(), t), None);
        assert_eq!(tts(Proportion::new(7, 7).unwrap(), t), Some(t));
        assert!(Proportion::new(3, 2).is_err());
        assert!(Proportion::new(0, 0).is_err());
    }

    #[test]
    fn gaps() {
        let s = sample_set(&[("01", -5200, 3), ("11", -4000, 1)]);
        assert_eq!(energy_gap(&s, Milli(-5300)).unwrap(), Milli(100));
        assert_eq!(energy_gap(&s, Milli(-5200)).unwrap(), Milli(0));
        assert!(energy_gap(&sample_set(&[]), Milli(0)).is_err());
    }

    proptest! {
        #[test]
        fn tts_decreases_with_p(total in 2u64..2000, a in 1u64..2000, b in 1u64..2000, t in 1e-6f64..10.0) {
            let (x, y) = (1 + a % (total - 1), 1 + b % (total - 1));
            let (lo, hi) = (x.min(y), x.max(y));
            let tl = tts(Proportion::new(lo, total).unwrap(), t).unwrap();
            let th = tts(Proportion::new(hi, total).unwrap(), t).unwrap();
            if lo < hi {
                prop_assert!(th < tl);
            } else {
                prop_assert!(th == tl);
            }
        }
    }
}
