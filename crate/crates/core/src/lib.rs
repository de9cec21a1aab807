//! Planted-solution QUBO benchmark instances.
//!
//! Instances are built by recursively bisecting a target graph, drawing a
//! small random QUBO on every part and solving it exactly, then planting the
//! concatenated optimum with a 2-SAT posiform that spans the whole graph. The
//! glued problem `Q = sum(R_i) + alpha * P` has the concatenated bitstring as
//! its single ground state.
//!
//! All coefficients and energies are fixed-point integers (thousandths, see
//! [`Milli`]) so that equality and uniqueness checks are exact.

pub mod bench;
pub mod exact;
pub mod fixed;
pub mod graph;
pub mod planting;
pub mod qubo;
pub mod sa;
pub mod seed;
pub mod twosat;

pub use fixed::Milli;
pub use graph::{Graph, NodeId, Partition};
pub use qubo::{Assignment, CoefficientSet, CsetTag, Qubo};
