use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{PlantedInstance, PlantingError};
use crate::exact::{brute_force_with, BruteForceOptions};
use crate::fixed::Milli;
use crate::graph::NodeId;
use crate::qubo::{Assignment, Qubo, QuboError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    FlipScan,
    BruteForce,
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerifyMode::FlipScan => "flip-scan",
            VerifyMode::BruteForce => "brute-force",
        })
    }
}

impl FromStr for VerifyMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "flip-scan" => Ok(VerifyMode::FlipScan),
            "brute-force" => Ok(VerifyMode::BruteForce),
            other => Err(format!("unknown verification mode {other:?}")),
        }
    }
}

/// First variable (in variable order) whose flip does not strictly raise the
/// energy of `planted`, with the flip's energy change.
pub fn flip_scan(qubo: &Qubo, planted: &Assignment) -> Result<Option<(NodeId, Milli)>, QuboError> {
    let x = qubo.dense_state(planted)?;
    let iq = qubo.indexed();
    Ok((0..iq.len()).find_map(|p| {
        let d = iq.delta(&x, p);
        (d <= 0).then(|| (qubo.variables()[p], Milli(d)))
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub reason: String,
    pub bitstring: String,
    pub energy: Milli,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub mode: VerifyMode,
    pub passed: bool,
    pub variables: usize,
    pub planted_energy: Milli,
    pub recomputed_energy: Milli,
    pub ground_state_count: Option<u64>,
    pub optimum_energy: Option<Milli>,
    pub violation: Option<Violation>,
}

fn base(inst: &PlantedInstance, mode: VerifyMode) -> Result<VerificationReport, PlantingError> {
    let recomputed = inst.qubo.evaluate(&inst.planted)?;
    let violation = (recomputed != inst.planted_energy).then(|| Violation {
        reason: format!("stored planted energy {} differs from evaluation", inst.planted_energy),
        bitstring: inst.planted_bitstring(),
        energy: recomputed,
    });
    Ok(VerificationReport {
        mode,
        passed: violation.is_none(),
        variables: inst.qubo.num_variables(),
        planted_energy: inst.planted_energy,
        recomputed_energy: recomputed,
        ground_state_count: None,
        optimum_energy: None,
        violation,
    })
}

/// Every single-bit neighbour of the planted assignment must be strictly higher.
pub fn verify_flip_scan(inst: &PlantedInstance) -> Result<VerificationReport, PlantingError> {
    let mut rep = base(inst, VerifyMode::FlipScan)?;
    if rep.passed {
        if let Some((v, d)) = flip_scan(&inst.qubo, &inst.planted)? {
            let n = inst.planted.flipped(v);
            rep.passed = false;
            rep.violation = Some(Violation {
                reason: format!("flipping node {v} changes the energy by {d}"),
                bitstring: n.to_bitstring(inst.qubo.variables())?,
                energy: rep.recomputed_energy + d,
            });
        }
    }
    Ok(rep)
}

/// Exhaustive check: exactly one ground state, equal to the planted bitstring.
pub fn verify_brute_force(inst: &PlantedInstance) -> Result<VerificationReport, PlantingError> {
    let mut rep = base(inst, VerifyMode::BruteForce)?;
    let opts = BruteForceOptions { enumerate_all: true, max_stored_optima: 2, ..Default::default() };
    let r = brute_force_with(&inst.qubo, &opts)?;
    let count = r.ground_state_count.expect("enumeration counts");
    rep.ground_state_count = Some(count);
    rep.optimum_energy = Some(r.optimum_energy);
    if rep.passed {
        let other = r.optima.iter().find(|a| **a != inst.planted);
        if let Some(a) = other {
            rep.passed = false;
            rep.violation = Some(Violation {
                reason: if r.optimum_energy < inst.planted_energy {
                    "assignment below the planted energy".into()
                } else {
                    format!("{count} ground states")
                },
                bitstring: a.to_bitstring(inst.qubo.variables())?,
                energy: r.optimum_energy,
            });
        }
    }
    Ok(rep)
}
