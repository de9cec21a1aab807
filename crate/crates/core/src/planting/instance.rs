use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::verify::flip_scan;
use super::{plant_posiform_with, PlantingError, PlantingOptions};
use crate::exact::{branch_and_bound, brute_force_with, BruteForceOptions, BRUTE_FORCE_CAP};
use crate::fixed::Milli;
use crate::graph::{recursive_bisection, Graph, NodeId, Partition};
use crate::qubo::{random_qubo, Assignment, CoefficientSet, CsetTag, Qubo};
use crate::seed::{self, derive_seed, LABEL_PARTITION, LABEL_PLANT, LABEL_SUBQUBO};
use crate::twosat::{formula_to_posiform_qubo, Clause, Literal, TwoSatFormula};

pub const DEFAULT_SUB_SOLVER_LIMIT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub max_part_size: usize,
    pub cset: CoefficientSet,
    pub alpha: Milli,
    /// `None` picks `max(32, ceil(n / 10))`.
    pub batch_size: Option<usize>,
    /// `None` picks `10 |E|`.
    pub max_clauses: Option<usize>,
    pub unit_clauses: bool,
    pub sub_solver_limit: Duration,
    /// Instances with at most this many variables get an exhaustive
    /// uniqueness check; 0 disables it.
    pub brute_force_cap: usize,
    pub topology_id: String,
}

impl GeneratorConfig {
    pub fn new(max_part_size: usize, cset: CoefficientSet, alpha: Milli) -> Self {
        GeneratorConfig {
            max_part_size,
            cset,
            alpha,
            batch_size: None,
            max_clauses: None,
            unit_clauses: true,
            sub_solver_limit: DEFAULT_SUB_SOLVER_LIMIT,
            brute_force_cap: BRUTE_FORCE_CAP,
            topology_id: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartRecord {
    pub seed: u64,
    pub optimum_energy: Milli,
    pub proved: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaStats {
    pub clauses: usize,
    pub unit_clauses: usize,
    pub batches: usize,
    pub batch_size: usize,
    pub max_clauses: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedTree {
    pub master: u64,
    pub mixer: String,
    pub partition: u64,
    pub plant: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certification {
    pub parts_proved: bool,
    pub flip_scan_passed: bool,
    /// Set when the exhaustive check ran.
    pub ground_state_count: Option<u64>,
    pub unique_verified: bool,
    pub method: String,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedInstance {
    pub qubo: Qubo,
    pub planted: Assignment,
    pub planted_energy: Milli,
    pub alpha: Milli,
    pub cset: CsetTag,
    pub max_part_size: usize,
    pub partition: Partition,
    pub per_part: Vec<PartRecord>,
    pub formula: TwoSatFormula,
    pub formula_stats: FormulaStats,
    pub seeds: SeedTree,
    pub topology_id: String,
    pub certification: Certification,
}

impl PlantedInstance {
    pub fn is_certified(&self) -> bool {
        self.certification.certified
    }

    pub fn planted_bitstring(&self) -> String {
        self.planted.to_bitstring(self.qubo.variables()).expect("planted covers the qubo")
    }

    /// The unscaled clause-penalty QUBO.
    pub fn posiform(&self) -> Qubo {
        formula_to_posiform_qubo(&self.formula)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, PlantingError> {
        serde_json::from_str(s).map_err(|e| PlantingError::Format(e.to_string()))
    }
}

/// Partition, solve each part's random QUBO exactly, plant the concatenated
/// optimum over the whole graph and glue. Unproved sub-solves or failed
/// checks leave the instance uncertified rather than failing.
pub fn build_planted_instance(
    graph: &Graph,
    cfg: &GeneratorConfig,
    master_seed: u64,
) -> Result<PlantedInstance, PlantingError> {
    if cfg.alpha.raw() <= 0 {
        return Err(PlantingError::InvalidParameter("alpha"));
    }
    let partition_seed = derive_seed(master_seed, LABEL_PARTITION, 0);
    let partition = recursive_bisection(graph, cfg.max_part_size, partition_seed)?;

    let solved: Vec<(Qubo, Assignment, PartRecord)> = partition
        .parts
        .par_iter()
        .enumerate()
        .map(|(i, part)| {
            let sub = graph.induced_subgraph(part)?;
            let seed = derive_seed(master_seed, LABEL_SUBQUBO, i as u64);
            let r = random_qubo(&sub, &cfg.cset, seed);
            let res = branch_and_bound(&r, cfg.sub_solver_limit);
            if !res.proved {
                log::warn!("part {i} ({} nodes) not proved within {:?}", part.len(), cfg.sub_solver_limit);
            }
            let rec = PartRecord { seed, optimum_energy: res.optimum_energy, proved: res.proved };
            Ok((r, res.optima.into_iter().next().expect("witness"), rec))
        })
        .collect::<Result<_, PlantingError>>()?;

    let mut target = Assignment::new();
    let mut randoms = Vec::with_capacity(solved.len());
    let mut per_part = Vec::with_capacity(solved.len());
    for (r, w, rec) in solved {
        target.extend(&w);
        randoms.push(r);
        per_part.push(rec);
    }

    let mut opts = PlantingOptions::defaults_for(graph);
    opts.unit_clauses = cfg.unit_clauses;
    if let Some(b) = cfg.batch_size {
        opts.batch_size = b;
    }
    if let Some(m) = cfg.max_clauses {
        opts.max_clauses = m;
    }
    let plant_seed = derive_seed(master_seed, LABEL_PLANT, 0);
    let planted = plant_posiform_with(graph, &target, &opts, plant_seed)?;
    let posiform = formula_to_posiform_qubo(&planted.formula);
    let qubo = Qubo::glue(&randoms, &posiform, cfg.alpha)?;
    let planted_energy = qubo.evaluate(&target)?;

    let certification = certify(&qubo, &target, planted_energy, &per_part, cfg.brute_force_cap)?;
    if !certification.certified {
        log::warn!("instance with master seed {master_seed} is not certified");
    }

    Ok(PlantedInstance {
        qubo,
        planted: target,
        planted_energy,
        alpha: cfg.alpha,
        cset: cfg.cset.tag,
        max_part_size: cfg.max_part_size,
        partition,
        per_part,
        formula_stats: FormulaStats {
            clauses: planted.formula.len(),
            unit_clauses: planted.unit_clauses,
            batches: planted.batches,
            batch_size: opts.batch_size,
            max_clauses: opts.max_clauses,
        },
        formula: planted.formula,
        seeds: SeedTree {
            master: master_seed,
            mixer: seed::MIXER_ID.to_string(),
            partition: partition_seed,
            plant: plant_seed,
        },
        topology_id: cfg.topology_id.clone(),
        certification,
    })
}

fn certify(
    qubo: &Qubo,
    planted: &Assignment,
    planted_energy: Milli,
    parts: &[PartRecord],
    cap: usize,
) -> Result<Certification, PlantingError> {
    let parts_proved = parts.iter().all(|p| p.proved);
    let flip_scan_passed = flip_scan(qubo, planted)?.is_none();
    let n = qubo.num_variables();
    let (ground_state_count, unique_verified) = if n <= cap {
        let opts = BruteForceOptions { enumerate_all: true, max_stored_optima: 1, max_variables: cap };
        let r = brute_force_with(qubo, &opts)?;
        let count = r.ground_state_count.expect("enumeration counts");
        (Some(count), count == 1 && r.optimum_energy == planted_energy && r.witness() == planted)
    } else {
        (None, false)
    };
    let exhaustive = ground_state_count.is_some();
    Ok(Certification {
        parts_proved,
        flip_scan_passed,
        ground_state_count,
        unique_verified,
        method: if exhaustive { "brute-force" } else { "flip-scan" }.to_string(),
        certified: parts_proved && flip_scan_passed && (!exhaustive || unique_verified),
    })
}

/// On-disk layout. Clauses are `[node, polarity]` pairs; the planted
/// bitstring follows the QUBO's variable order.
#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    topology_id: String,
    cset: CsetTag,
    alpha: Milli,
    max_part_size: usize,
    planted: String,
    planted_energy: Milli,
    qubo: Qubo,
    partition: Vec<Vec<NodeId>>,
    per_part: Vec<PartRecord>,
    formula_stats: FormulaStats,
    clauses: Vec<Vec<(NodeId, bool)>>,
    seeds: SeedTree,
    certification: Certification,
}

impl Serialize for PlantedInstance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        InstanceDoc {
            topology_id: self.topology_id.clone(),
            cset: self.cset,
            alpha: self.alpha,
            max_part_size: self.max_part_size,
            planted: self.planted_bitstring(),
            planted_energy: self.planted_energy,
            qubo: self.qubo.clone(),
            partition: self.partition.parts.clone(),
            per_part: self.per_part.clone(),
            formula_stats: self.formula_stats.clone(),
            clauses: self
                .formula
                .clauses()
                .iter()
                .map(|c| c.literals().map(|l| (l.var, l.positive)).collect())
                .collect(),
            seeds: self.seeds.clone(),
            certification: self.certification.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlantedInstance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let doc = InstanceDoc::deserialize(d)?;
        let planted = Assignment::from_bitstring(doc.qubo.variables(), &doc.planted).map_err(D::Error::custom)?;
        let mut formula = TwoSatFormula::new(doc.qubo.variables().iter().copied());
        for c in &doc.clauses {
            let lit = |&(var, positive): &(NodeId, bool)| Literal { var, positive };
            let clause = match c.as_slice() {
                [a] => Clause::Unit(lit(a)),
                [a, b] => Clause::binary(lit(a), lit(b)).map_err(D::Error::custom)?,
                _ => return Err(D::Error::custom("clauses have one or two literals")),
            };
            formula.add_clause(clause).map_err(D::Error::custom)?;
        }
        Ok(PlantedInstance {
            qubo: doc.qubo,
            planted,
            planted_energy: doc.planted_energy,
            alpha: doc.alpha,
            cset: doc.cset,
            max_part_size: doc.max_part_size,
            partition: Partition { parts: doc.partition, seed: doc.seeds.partition },
            per_part: doc.per_part,
            formula,
            formula_stats: doc.formula_stats,
            seeds: doc.seeds,
            topology_id: doc.topology_id,
            certification: doc.certification,
        })
    }
}
