//! MaxCover: id-driven spreading of mobile sensors onto a triangular lattice.
//!
//! A population of n point sensors, deployed together at an origin, spreads
//! onto the vertices of an equilateral triangular lattice with edge √3·r in
//! O(√n) synchronous rounds — no messages, no coordination: each node decides
//! every move from its own id and the round counter. The resulting hexagonal
//! arrangement covers the occupied region with no holes, which is the densest
//! coverage n sensing disks of radius r can achieve in the open plane.
//!
//! The crate provides:
//!
//! * [`lattice`] — exact integer coordinates for the lattice,
//! * [`protocol`] — the per-node state machine,
//! * [`engine`] — the synchronous round scheduler with per-round reports and
//!   energy accounting,
//! * [`planner`] — closed-form and iterative destination oracles, plus
//!   straight-line deployment plans (including random initial positions),
//! * [`analysis`] — tiling/hole/coverage verification and SVG rendering.

pub mod analysis;
pub mod engine;
pub mod lattice;
pub mod planner;
pub mod protocol;

pub use engine::{expected_termination_round, run, SimulationConfig, SimulationResult};
pub use lattice::{Direction, LatticeCoord};
pub use protocol::{NodeState, NodeType, SextantRule, Status};
