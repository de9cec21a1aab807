//! Simulated annealing: geometric inverse-temperature schedule, one
//! Metropolis sweep per step in ascending variable order.

use std::collections::BTreeMap;
use std::io;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixed::Milli;
use crate::graph::NodeId;
use crate::qubo::{IndexedQubo, Qubo};
use crate::seed::{self, derive_seed, LABEL_SA_READ};

#[derive(Debug, Error)]
pub enum SaError {
    #[error("invalid annealing config: {0}")]
    InvalidConfig(String),
    #[error("qubo has no nonzero terms; no temperature scale")]
    NoTerms,
    #[error("samples csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaConfig {
    pub num_sweeps: usize,
    pub num_reads: usize,
    pub beta_min: f64,
    pub beta_max: f64,
    pub seed: u64,
}

impl SaConfig {
    /// Config with the default beta range for `qubo`.
    pub fn for_qubo(qubo: &Qubo, num_sweeps: usize, num_reads: usize, seed: u64) -> Result<Self, SaError> {
        let (beta_min, beta_max) = default_beta_range(qubo)?;
        let cfg = SaConfig { num_sweeps, num_reads, beta_min, beta_max, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SaError> {
        let bad = |m: &str| Err(SaError::InvalidConfig(m.to_string()));
        if self.num_sweeps == 0 {
            return bad("num_sweeps must be positive");
        }
        if self.num_reads == 0 {
            return bad("num_reads must be positive");
        }
        if !(self.beta_min > 0.0 && self.beta_min.is_finite() && self.beta_max.is_finite()) {
            return bad("betas must be positive and finite");
        }
        if self.beta_min >= self.beta_max {
            return bad("beta_min must be below beta_max");
        }
        Ok(())
    }

    /// Inverse temperature at each sweep.
    pub fn schedule(&self) -> Vec<f64> {
        if self.num_sweeps == 1 {
            return vec![self.beta_min];
        }
        let ratio = self.beta_max / self.beta_min;
        let last = (self.num_sweeps - 1) as f64;
        (0..self.num_sweeps).map(|k| self.beta_min * ratio.powf(k as f64 / last)).collect()
    }
}

/// `(ln 2 / d_max, ln 1000 / d_min)` in inverse energy units: `d_max` is the
/// largest per-variable flip bound `|a_i| + sum_j |a_ij|`, `d_min` the
/// smallest nonzero coefficient magnitude.
pub fn default_beta_range(qubo: &Qubo) -> Result<(f64, f64), SaError> {
    let iq = qubo.indexed();
    let d_max = (0..iq.len()).map(|p| iq.flip_bound(p)).max().unwrap_or(0);
    let d_min = qubo.linear().values().chain(qubo.quadratic().values()).map(|c| c.raw().abs()).filter(|&c| c > 0).min();
    match d_min {
        Some(d_min) if d_max > 0 => {
            let unit = Milli::ONE.raw() as f64;
            Ok((2f64.ln() * unit / d_max as f64, 1000f64.ln() * unit / d_min as f64))
        }
        _ => Err(SaError::NoTerms),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub bitstring: String,
    pub energy: Milli,
    pub occurrences: u64,
}

/// Deduplicated reads, sorted by energy then bitstring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub variables: Vec<NodeId>,
    pub records: Vec<SampleRecord>,
    pub config: SaConfig,
    pub wall_time_per_read: f64,
}

impl SampleSet {
    pub fn num_samples(&self) -> u64 {
        self.records.iter().map(|r| r.occurrences).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn lowest(&self) -> Option<&SampleRecord> {
        self.records.first()
    }

    pub fn occurrences_of(&self, bitstring: &str) -> u64 {
        self.records.iter().filter(|r| r.bitstring == bitstring).map(|r| r.occurrences).sum()
    }

    pub fn write_csv(&self, w: impl io::Write) -> Result<(), SaError> {
        let err = |e: csv::Error| SaError::Csv(e.to_string());
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["bitstring", "energy", "occurrences"]).map_err(err)?;
        for r in &self.records {
            out.write_record([r.bitstring.clone(), r.energy.to_string(), r.occurrences.to_string()]).map_err(err)?;
        }
        out.flush().map_err(|e| SaError::Csv(e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Records from a samples CSV; the caller supplies the run metadata.
    pub fn read_csv_records(r: impl io::Read) -> Result<Vec<SampleRecord>, SaError> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers().map_err(|e| SaError::Csv(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["bitstring", "energy", "occurrences"] {
            return Err(SaError::Csv(format!("unexpected header {:?}", headers)));
        }
        rdr.deserialize().map(|row| row.map_err(|e| SaError::Csv(e.to_string()))).collect()
    }
}

/// Run `cfg.num_reads` independent anneals. Read `r` uses the seed derived
/// from `(cfg.seed, SA_READ, r)`, so results do not depend on thread count.
pub fn sample(qubo: &Qubo, cfg: &SaConfig) -> Result<SampleSet, SaError> {
    cfg.validate()?;
    let iq = qubo.indexed();
    let schedule = cfg.schedule();
    let reads: Vec<(Vec<u8>, i64, f64)> = (0..cfg.num_reads)
        .into_par_iter()
        .map(|r| {
            let t = Instant::now();
            let mut rng = seed::rng(derive_seed(cfg.seed, LABEL_SA_READ, r as u64));
            let x = anneal(iq, &schedule, &mut rng);
            let e = iq.energy(&x);
            (x, e, t.elapsed().as_secs_f64())
        })
        .collect();

    let mut counts: BTreeMap<(i64, String), u64> = BTreeMap::new();
    let mut total_time = 0.0;
    for (x, e, t) in reads {
        total_time += t;
        let s: String = x.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        *counts.entry((e, s)).or_insert(0) += 1;
    }
    Ok(SampleSet {
        variables: qubo.variables().to_vec(),
        records: counts
            .into_iter()
            .map(|((e, bitstring), occurrences)| SampleRecord { bitstring, energy: Milli(e), occurrences })
            .collect(),
        config: cfg.clone(),
        wall_time_per_read: total_time / cfg.num_reads as f64,
    })
}

/// Beyond this `beta * delta` the acceptance probability is below 1e-21 and
/// the move is rejected without drawing.
const REJECT_EXPONENT: f64 = 48.0;

fn anneal(iq: &IndexedQubo, schedule: &[f64], rng: &mut impl Rng) -> Vec<u8> {
    let n = iq.len();
    let mut x: Vec<u8> = (0..n).map(|_| u8::from(rng.gen::<bool>())).collect();
    let mut field: Vec<i64> = (0..n).map(|p| iq.field(&x, p)).collect();
    let unit = Milli::ONE.raw() as f64;
    for &beta in schedule {
        let scale = beta / unit;
        for p in 0..n {
            let d = if x[p] == 0 { field[p] } else { -field[p] };
            let accept = d <= 0 || {
                let t = scale * d as f64;
                t < REJECT_EXPONENT && rng.gen::<f64>() < (-t).exp()
            };
            if accept {
                let s = if x[p] == 0 { 1 } else { -1 };
                x[p] ^= 1;
                let (cols, weights) = iq.row(p);
                for (&q, &w) in cols.iter().zip(weights) {
                    field[q] += s * w;
                }
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{Assignment, QuboBuilder};
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};

    fn all_negative(n: u32) -> Qubo {
        let mut b = QuboBuilder::new();
        for i in 0..n {
            b.add_linear(i, Milli(-1000));
        }
        b.build()
    }

    #[test]
    fn beta_range_single_variable() {
        let (lo, hi) = default_beta_range(&all_negative(1)).unwrap();
        assert!((lo - 2f64.ln()).abs() < 1e-12);
        assert!((hi - 1000f64.ln()).abs() < 1e-12);
        assert!((lo - 0.693).abs() < 1e-3 && (hi - 6.908).abs() < 1e-3);
    }

    #[test]
    fn beta_range_scales_inversely() {
        let q = crate::qubo::tests::random_dense_qubo(10, 0.5, 3);
        let mut b = QuboBuilder::new();
        b.add_scaled(&q, Milli(10_000)).unwrap();
        let (lo, hi) = default_beta_range(&q).unwrap();
        let (lo10, hi10) = default_beta_range(&b.build()).unwrap();
        assert!((lo / 10.0 - lo10).abs() < 1e-12);
        assert!((hi / 10.0 - hi10).abs() < 1e-12);
    }

    #[test]
    fn beta_range_rejects_zero_qubo() {
        assert!(matches!(default_beta_range(&Qubo::zero([1, 2])), Err(SaError::NoTerms)));
    }

    #[test]
    fn schedule_shape() {
        let cfg = SaConfig { num_sweeps: 5, num_reads: 1, beta_min: 0.1, beta_max: 10.0, seed: 0 };
        let s = cfg.schedule();
        assert_eq!(s.len(), 5);
        assert!((s[0] - 0.1).abs() < 1e-12 && (s[4] - 10.0).abs() < 1e-9);
        assert!((s[2] - 1.0).abs() < 1e-12);
        let one = SaConfig { num_sweeps: 1, ..cfg.clone() };
        assert_eq!(one.schedule(), vec![0.1]);
        assert!(SaConfig { beta_min: 10.0, beta_max: 1.0, ..cfg.clone() }.validate().is_err());
        assert!(SaConfig { num_reads: 0, ..cfg }.validate().is_err());
    }

    #[test]
    fn unfrustrated_reaches_all_ones() {
        let q = all_negative(20);
        let cfg = SaConfig::for_qubo(&q, 100, 100, 7).unwrap();
        let s = sample(&q, &cfg).unwrap();
        assert_eq!(s.num_samples(), 100);
        let ones = "1".repeat(20);
        assert!(s.occurrences_of(&ones) >= 99);
        assert_eq!(s.lowest().unwrap().energy, Milli(-20_000));
    }

    #[test]
    fn deterministic_and_csv() {
        let q = crate::qubo::tests::random_dense_qubo(12, 0.4, 5);
        let cfg = SaConfig::for_qubo(&q, 10, 50, 123).unwrap();
        let a = sample(&q, &cfg).unwrap();
        let b = sample(&q, &cfg).unwrap();
        assert_eq!(a.records, b.records);
        let csv = a.to_csv();
        assert!(csv.starts_with("bitstring,energy,occurrences\n"));
        assert_eq!(SampleSet::read_csv_records(csv.as_bytes()).unwrap(), a.records);
        let other = sample(&q, &SaConfig { seed: 124, ..cfg }).unwrap();
        assert_ne!(a.records, other.records);
        assert!(SampleSet::read_csv_records("a,b\n".as_bytes()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn reported_energies_reevaluate(n in 1u32..14, seed: u64, sweeps in 1usize..30) {
            let q = crate::qubo::tests::random_dense_qubo(n, 0.5, seed);
            prop_assume_terms(&q)?;
            let cfg = SaConfig::for_qubo(&q, sweeps, 16, seed).unwrap();
            let s = sample(&q, &cfg).unwrap();
            prop_assert_eq!(s.num_samples(), 16);
            let mut prev = None;
            for r in &s.records {
                prop_assert!(r.occurrences >= 1);
                let a = Assignment::from_bitstring(q.variables(), &r.bitstring).unwrap();
                prop_assert_eq!(q.evaluate(&a).unwrap(), r.energy);
                let key = (r.energy, r.bitstring.clone());
                prop_assert!(prev.as_ref().map_or(true, |p| *p < key));
                prev = Some(key);
            }
        }
    }

    fn prop_assume_terms(q: &Qubo) -> Result<(), proptest::test_runner::TestCaseError> {
        if default_beta_range(q).is_err() {
            return Err(proptest::test_runner::TestCaseError::reject("no terms"));
        }
        Ok(())
    }
}
