//! Synchronous round scheduler.
//!
//! Applies the protocol transitions to every unstable node once per round,
//! with a barrier between rounds: all round-k outputs are computed from
//! round-(k-1) states, so results are bit-identical regardless of evaluation
//! order. Rounds with many active nodes are evaluated in parallel.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{LatticeCoord, SQRT_3};
use crate::protocol::{self, NodeState, NodeType, SextantRule};

/// Rounds with at least this many unstable nodes run on the rayon pool.
const PARALLEL_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("node count must be at least 1")]
    ZeroNodes,
    #[error("sensing radius must be positive and finite, got {0}")]
    BadRadius(f64),
}

/// Run parameters. `r` is the sensing radius in distance units.
#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub n: u64,
    pub r: f64,
    pub record_trajectories: bool,
    /// Feed the raw residue `id mod 6` into thresholds and the turn test
    /// instead of the effective sextant. See [`SextantRule::LiteralJ0`].
    pub literal_j0: bool,
}

impl SimulationConfig {
    pub fn new(n: u64, r: f64) -> Result<Self, ConfigError> {
        if n == 0 {
            return Err(ConfigError::ZeroNodes);
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(ConfigError::BadRadius(r));
        }
        Ok(SimulationConfig {
            n,
            r,
            record_trajectories: false,
            literal_j0: false,
        })
    }

    pub fn with_trajectories(mut self, record: bool) -> Self {
        self.record_trajectories = record;
        self
    }

    pub fn with_literal_j0(mut self, literal: bool) -> Self {
        self.literal_j0 = literal;
        self
    }

    fn rule(&self) -> SextantRule {
        if self.literal_j0 {
            SextantRule::LiteralJ0
        } else {
            SextantRule::Effective
        }
    }
}

/// Census of one round, taken after its transitions have been applied.
///
/// `double_group_positions` holds the distinct positions occupied by at least
/// one still-unstable double node; round `k+1` starts from exactly this
/// census.
#[derive(Clone, Debug, Serialize)]
pub struct RoundReport {
    pub k: u64,
    pub newly_stable: Vec<u64>,
    pub double_group_positions: Vec<LatticeCoord>,
    pub unstable_remaining: u64,
}

/// Outcome of a complete run: all nodes stable.
#[derive(Clone, Debug)]
pub struct SimulationResult {
    /// Final state per node, indexed by id.
    pub final_states: Vec<NodeState>,
    /// One report per round, `k = 0..=termination_round`.
    pub reports: Vec<RoundReport>,
    pub termination_round: u64,
    /// Full per-round state snapshots (`[round][id]`), recorded only on
    /// request: at n = 10^6 this is O(n·√n) records.
    pub trajectories: Option<Vec<Vec<NodeState>>>,
}

impl SimulationResult {
    /// Round at which each node stabilized, indexed by id.
    pub fn stable_rounds(&self) -> Vec<u64> {
        let mut rounds = vec![0u64; self.final_states.len()];
        for report in &self.reports {
            for &id in &report.newly_stable {
                rounds[id as usize] = report.k;
            }
        }
        rounds
    }

    /// Final positions, indexed by id.
    pub fn final_positions(&self) -> Vec<LatticeCoord> {
        self.final_states.iter().map(|s| s.pos).collect()
    }
}

/// Executes a full run of the spreading protocol. Deterministic: identical
/// configs produce identical results, independent of thread count.
pub fn run(config: &SimulationConfig) -> SimulationResult {
    let n = config.n;
    let rule = config.rule();

    let mut states: Vec<NodeState> = (0..n).map(|id| protocol::initial_transition(id, n)).collect();
    let mut active: Vec<NodeState> = states[1..].to_vec();
    let mut trajectories = config.record_trajectories.then(|| vec![states.clone()]);

    let mut reports = vec![round_report(0, vec![0], &active)];
    // The literal-j0 rule delays some nodes by a round or two; anything far
    // beyond the closed-form bound is a scheduler bug, not a slow run.
    let round_cap = 4 * expected_termination_round(n) + 8;

    let mut k = 0u64;
    while !active.is_empty() {
        k += 1;
        assert!(k <= round_cap, "no termination after {k} rounds (n = {n})");

        if active.len() >= PARALLEL_THRESHOLD {
            active
                .par_iter_mut()
                .for_each(|s| *s = protocol::round_transition(s, k, rule));
        } else {
            for s in active.iter_mut() {
                *s = protocol::round_transition(s, k, rule);
            }
        }

        let mut newly_stable = Vec::new();
        for s in &active {
            if s.is_stable() {
                states[s.id as usize] = *s;
                newly_stable.push(s.id);
            }
        }
        active.retain(|s| !s.is_stable());

        if let Some(t) = &mut trajectories {
            let mut snapshot = states.clone();
            for s in &active {
                snapshot[s.id as usize] = *s;
            }
            t.push(snapshot);
        }
        reports.push(round_report(k, newly_stable, &active));
    }

    SimulationResult {
        final_states: states,
        reports,
        termination_round: k,
        trajectories,
    }
}

fn round_report(k: u64, newly_stable: Vec<u64>, active: &[NodeState]) -> RoundReport {
    let mut groups: Vec<LatticeCoord> = active
        .iter()
        .filter(|s| s.node_type == NodeType::Double)
        .map(|s| s.pos)
        .collect();
    groups.sort_unstable();
    groups.dedup();
    RoundReport {
        k,
        newly_stable,
        double_group_positions: groups,
        unstable_remaining: active.len() as u64,
    }
}

/// Smallest m ≥ 0 with `1 + 3m(m+1) ≥ n`: the round at which a run of n
/// nodes terminates. Integer arithmetic only (equivalently
/// `⌈(−3+√(12n−3))/6⌉`).
pub fn expected_termination_round(n: u64) -> u64 {
    assert!(n >= 1);
    let mut m = (12 * n - 3).isqrt().saturating_sub(3) / 6;
    while 1 + 3 * m * (m + 1) < n {
        m += 1;
    }
    while m > 0 && 1 + 3 * (m - 1) * m >= n {
        m -= 1;
    }
    m
}

/// The closed form `⌈−1/2 + √((4n−1)/3)⌉` sometimes quoted for the round
/// bound. It does not solve `n ≤ 1 + 3m(m+1)` (it yields 3 instead of 1 at
/// n = 7); [`expected_termination_round`] is the correct bound. Retained so
/// the two can be printed side by side for comparison.
pub fn quoted_round_bound(n: u64) -> u64 {
    assert!(n >= 1);
    // smallest t ≥ 0 with (2t+1)²·3 ≥ 16n − 4
    let target = 16 * n - 4;
    let mut t = ((target / 3).isqrt().saturating_sub(1)) / 2;
    while 3 * (2 * t + 1) * (2 * t + 1) < target {
        t += 1;
    }
    while t > 0 && 3 * (2 * (t - 1) + 1) * (2 * (t - 1) + 1) >= target {
        t -= 1;
    }
    t
}

/// Energy accounting for one node: distance walked round by round versus the
/// straight-line displacement from the origin to its final vertex.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyEntry {
    pub id: u64,
    pub path_length: f64,
    pub straight_line: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    pub entries: Vec<EnergyEntry>,
    pub total_path: f64,
    pub total_straight: f64,
    pub ratio: f64,
}

/// Per-node and total path length versus straight-line displacement.
///
/// `path_length = moves_made·√3·r`; the straight line is the Euclidean norm
/// of the final position. Equality holds exactly for nodes that never turn.
pub fn energy_report(result: &SimulationResult, r: f64) -> EnergyReport {
    let entries: Vec<EnergyEntry> = result
        .final_states
        .iter()
        .map(|s| {
            let path_length = s.moves_made as f64 * SQRT_3 * r;
            let straight_line = if s.pos == LatticeCoord::ORIGIN {
                0.0
            } else {
                s.pos.cartesian_norm(r)
            };
            let ratio = if straight_line == 0.0 {
                1.0
            } else {
                path_length / straight_line
            };
            EnergyEntry {
                id: s.id,
                path_length,
                straight_line,
                ratio,
            }
        })
        .collect();
    let total_path: f64 = entries.iter().map(|e| e.path_length).sum();
    let total_straight: f64 = entries.iter().map(|e| e.straight_line).sum();
    let ratio = if total_straight == 0.0 {
        1.0
    } else {
        total_path / total_straight
    };
    EnergyReport {
        entries,
        total_path,
        total_straight,
        ratio,
    }
}
