use std::collections::BTreeMap;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{tts, BenchError, BenchRecord, Proportion};
use crate::exact::branch_and_bound;
use crate::fixed::Milli;
use crate::planting::PlantedInstance;
use crate::sa::{self, SaConfig, SampleSet};

pub const POOLED_SA_ID: &str = "sa:pooled";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "kebab-case")]
pub enum SolverSpec {
    Sa {
        num_sweeps: usize,
        num_reads: usize,
        seed: u64,
        /// `None` uses the instance's default range.
        beta_range: Option<(f64, f64)>,
    },
    BranchAndBound {
        time_limit_s: f64,
    },
}

impl SolverSpec {
    pub fn sa(num_sweeps: usize, num_reads: usize, seed: u64) -> Self {
        SolverSpec::Sa { num_sweeps, num_reads, seed, beta_range: None }
    }

    pub fn solver_id(&self) -> String {
        match self {
            SolverSpec::Sa { num_sweeps, .. } => sa_solver_id(*num_sweeps),
            SolverSpec::BranchAndBound { .. } => "exact:bnb".into(),
        }
    }

    fn is_sa(&self) -> bool {
        matches!(self, SolverSpec::Sa { .. })
    }
}

pub fn sa_solver_id(num_sweeps: usize) -> String {
    format!("sa:sweeps={num_sweeps}")
}

/// Record parameters for an SA run.
pub fn sa_params(cfg: &SaConfig) -> BTreeMap<String, Value> {
    BTreeMap::from([
        ("beta_max".to_string(), json!(cfg.beta_max)),
        ("beta_min".to_string(), json!(cfg.beta_min)),
        ("num_reads".to_string(), json!(cfg.num_reads)),
        ("num_sweeps".to_string(), json!(cfg.num_sweeps)),
        ("seed".to_string(), json!(cfg.seed)),
    ])
}

/// Score one sample set against an instance. For certified instances any
/// energy below the planted one is an error, as is a planted-bitstring match
/// at the wrong energy.
pub fn score_samples(
    instance_id: &str,
    inst: &PlantedInstance,
    solver_id: &str,
    params: BTreeMap<String, Value>,
    samples: &SampleSet,
) -> Result<BenchRecord, BenchError> {
    if samples.variables != inst.qubo.variables() {
        return Err(BenchError::VariableMismatch(instance_id.into()));
    }
    let best = samples.lowest().ok_or(BenchError::EmptySamples)?.energy;
    let planted = inst.planted_bitstring();
    if inst.is_certified() && best < inst.planted_energy {
        return Err(BenchError::Undercut {
            instance_id: instance_id.into(),
            solver_id: solver_id.into(),
            energy: best,
            planted: inst.planted_energy,
        });
    }
    if let Some(r) = samples.records.iter().find(|r| r.bitstring == planted && r.energy != inst.planted_energy) {
        return Err(BenchError::EnergyMismatch {
            instance_id: instance_id.into(),
            solver_id: solver_id.into(),
            energy: r.energy,
            planted: inst.planted_energy,
        });
    }
    let p = Proportion::new(samples.occurrences_of(&planted), samples.num_samples())?;
    Ok(BenchRecord {
        instance_id: instance_id.into(),
        solver_id: solver_id.into(),
        params,
        total_samples: p.total,
        success_count: p.successes,
        t_per_sample: samples.wall_time_per_read,
        tts: tts(p, samples.wall_time_per_read),
        best_energy: best,
        gap: best - inst.planted_energy,
    })
}

/// One record over all samples of `records`: successes and samples summed,
/// `t_per_sample` averaged across configs, TTS from the pooled proportion.
pub fn pool_records(records: &[BenchRecord], solver_id: &str, planted_energy: Milli) -> Option<BenchRecord> {
    let first = records.first()?;
    let total: u64 = records.iter().map(|r| r.total_samples).sum();
    let successes: u64 = records.iter().map(|r| r.success_count).sum();
    let t = records.iter().map(|r| r.t_per_sample).sum::<f64>() / records.len() as f64;
    let best = records.iter().map(|r| r.best_energy).min()?;
    let p = Proportion::new(successes, total).ok()?;
    let pooled: Vec<Value> = records.iter().map(|r| Value::String(r.solver_id.clone())).collect();
    Some(BenchRecord {
        instance_id: first.instance_id.clone(),
        solver_id: solver_id.into(),
        params: BTreeMap::from([("pooled".to_string(), Value::Array(pooled))]),
        total_samples: total,
        success_count: successes,
        t_per_sample: t,
        tts: tts(p, t),
        best_energy: best,
        gap: best - planted_energy,
    })
}

fn run_cell(id: &str, inst: &PlantedInstance, spec: &SolverSpec) -> Result<BenchRecord, BenchError> {
    match *spec {
        SolverSpec::Sa { num_sweeps, num_reads, seed, beta_range } => {
            let cfg = match beta_range {
                Some((beta_min, beta_max)) => SaConfig { num_sweeps, num_reads, beta_min, beta_max, seed },
                None => SaConfig::for_qubo(&inst.qubo, num_sweeps, num_reads, seed)?,
            };
            let samples = sa::sample(&inst.qubo, &cfg)?;
            score_samples(id, inst, &sa_solver_id(num_sweeps), sa_params(&cfg), &samples)
        }
        SolverSpec::BranchAndBound { time_limit_s } => {
            let r = branch_and_bound(&inst.qubo, Duration::from_secs_f64(time_limit_s));
            let samples = SampleSet {
                variables: inst.qubo.variables().to_vec(),
                records: vec![crate::sa::SampleRecord {
                    bitstring: r.witness().to_bitstring(inst.qubo.variables()).expect("witness is total"),
                    energy: r.optimum_energy,
                    occurrences: 1,
                }],
                config: SaConfig { num_sweeps: 1, num_reads: 1, beta_min: 1.0, beta_max: 2.0, seed: 0 },
                wall_time_per_read: r.wall_time,
            };
            let params = BTreeMap::from([
                ("proved".to_string(), json!(r.proved)),
                ("time_limit_s".to_string(), json!(time_limit_s)),
            ]);
            score_samples(id, inst, &spec.solver_id(), params, &samples)
        }
    }
}

/// One record per (certified instance, solver config), followed for each
/// instance by a pooled record over its SA configs. Uncertified instances are
/// skipped with a warning.
pub fn run_sweep(instances: &[(String, PlantedInstance)], grid: &[SolverSpec]) -> Result<Vec<BenchRecord>, BenchError> {
    let kept: Vec<&(String, PlantedInstance)> = instances
        .iter()
        .filter(|(id, inst)| {
            if !inst.is_certified() {
                log::warn!("skipping uncertified instance {id}");
            }
            inst.is_certified()
        })
        .collect();
    let cells: Vec<(usize, usize)> = (0..kept.len()).flat_map(|i| (0..grid.len()).map(move |g| (i, g))).collect();
    let results: Vec<BenchRecord> =
        cells.par_iter().map(|&(i, g)| run_cell(&kept[i].0, &kept[i].1, &grid[g])).collect::<Result<_, _>>()?;

    let mut out = Vec::with_capacity(results.len() + kept.len());
    for (i, (_, inst)) in kept.iter().enumerate() {
        let row = &results[i * grid.len()..(i + 1) * grid.len()];
        out.extend_from_slice(row);
        let sa_rows: Vec<BenchRecord> =
            row.iter().zip(grid).filter(|(_, g)| g.is_sa()).map(|(r, _)| r.clone()).collect();
        out.extend(pool_records(&sa_rows, POOLED_SA_ID, inst.planted_energy));
    }
    Ok(out)
}
