//! Destination oracle and deployment planners.
//!
//! Every id's final vertex is determined by the protocol alone, so it can be
//! computed without moving: either by iterating the round transitions on a
//! single in-memory state ([`iterative_plan`], the reference), or in O(1) by
//! the closed form below ([`final_slot`], cross-checked against the iteration
//! in the test suite).
//!
//! Closed form: with `ĵ = sextant_of(id)` and `q = (id − ĵ)/6`, let `v` be
//! the largest integer with `v(v+1)/2 ≤ q` and `s = q − v(v+1)/2`. The node
//! stabilizes in round `v+1` on ring `v+1`, at
//! `(s+1)·u_ĵ + (v−s)·u_{ĵ+1}` — slot `s` of its sextant's ring edge, the
//! edge corner exactly when `s = v`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{Direction, LatticeCoord};
use crate::protocol::{self, NodeState, SextantRule};

/// A final destination: ring, sextant, and in-edge index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Slot {
    /// Sextant `ĵ ∈ {1..6}`.
    pub sextant: u8,
    /// Hexagonal layer, `≥ 1`.
    pub ring: u64,
    /// Position along the sextant's ring edge, `0..ring`.
    pub index: u64,
    pub coord: LatticeCoord,
}

impl Slot {
    /// Corner slots are positive multiples of a single basis direction;
    /// the nodes that land there never turn.
    pub fn is_corner(&self) -> bool {
        self.index == self.ring - 1
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("deployment requires at least one start position")]
    EmptyStarts,
}

/// Closed-form final slot for a node, O(1) integer arithmetic.
pub fn final_slot(id: u64) -> Slot {
    assert!(id >= 1, "node 0 stays at the origin and has no slot");
    let sextant = protocol::sextant_of(id);
    let q = (id - sextant as u64) / 6;
    // largest v with v(v+1)/2 <= q
    let mut v = ((8 * q + 1).isqrt().saturating_sub(1)) / 2;
    while (v + 1) * (v + 2) / 2 <= q {
        v += 1;
    }
    while v * (v + 1) / 2 > q {
        v -= 1;
    }
    let s = q - v * (v + 1) / 2;
    let u_j = Direction::new(sextant % 6).unit();
    let u_next = Direction::new((sextant + 1) % 6).unit();
    Slot {
        sextant,
        ring: v + 1,
        index: s,
        coord: u_j * (s as i64 + 1) + u_next * ((v - s) as i64),
    }
}

/// Inverts [`final_slot`]: the slot whose coordinate is `c`, if any.
///
/// Consecutive basis pairs are unimodular, so the decomposition
/// `c = p·u_ĵ + q·u_{ĵ+1}` is solved exactly by integer cross products.
pub fn slot_of_coord(c: LatticeCoord) -> Option<Slot> {
    if c == LatticeCoord::ORIGIN {
        return None;
    }
    let ring = c.ring();
    for sextant in 1..=6u8 {
        let u_j = Direction::new(sextant % 6).unit();
        let u_next = Direction::new((sextant + 1) % 6).unit();
        let p = c.a * u_next.b - c.b * u_next.a;
        let q = u_j.a * c.b - u_j.b * c.a;
        if p >= 1 && q >= 0 {
            debug_assert_eq!(p as u64 + q as u64, ring);
            return Some(Slot {
                sextant,
                ring,
                index: (p - 1) as u64,
                coord: c,
            });
        }
    }
    None
}

/// Round at which a node stabilizes: 0 for node 0, otherwise its ring.
pub fn stable_round_of(id: u64) -> u64 {
    if id == 0 {
        0
    } else {
        final_slot(id).ring
    }
}

/// Reference destination computation: runs the round transitions on a single
/// node state, updating coordinates only, until it stabilizes.
pub fn iterative_plan(id: u64) -> LatticeCoord {
    if id == 0 {
        return LatticeCoord::ORIGIN;
    }
    let mut state: NodeState = protocol::initial_transition(id, id + 1);
    let mut k = 0;
    while !state.is_stable() {
        k += 1;
        state = protocol::round_transition(&state, k, SextantRule::Effective);
    }
    state.pos
}

/// Final coordinates for the whole population, indexed by id (closed form).
pub fn plan_all(n: u64) -> Vec<LatticeCoord> {
    assert!(n >= 1);
    (0..n)
        .map(|id| {
            if id == 0 {
                LatticeCoord::ORIGIN
            } else {
                final_slot(id).coord
            }
        })
        .collect()
}

/// Final coordinates for the whole population via the iterative reference.
pub fn plan_all_iterative(n: u64) -> Vec<LatticeCoord> {
    assert!(n >= 1);
    (0..n).map(iterative_plan).collect()
}

/// Length of the straight origin-to-destination segment for one node.
pub fn straight_line_distance(id: u64, r: f64) -> f64 {
    if id == 0 {
        0.0
    } else {
        final_slot(id).coord.cartesian_norm(r)
    }
}

/// One node's planned straight-line move.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DeploymentTarget {
    pub id: u64,
    pub start: (f64, f64),
    pub target: (f64, f64),
    pub distance: f64,
}

/// A one-shot motion plan: every node moves straight to its target.
#[derive(Clone, Debug, Serialize)]
pub struct DeploymentPlan {
    pub targets: Vec<DeploymentTarget>,
    pub one_shot: bool,
    /// 0 when all nodes start at a common known origin, 1 when node 0 must
    /// announce its position first.
    pub broadcast_count: u32,
    pub total_distance: f64,
}

fn plan_from_starts(starts: &[(f64, f64)], r: f64, broadcast_count: u32) -> DeploymentPlan {
    let origin = starts[0];
    let targets: Vec<DeploymentTarget> = starts
        .iter()
        .enumerate()
        .map(|(id, &start)| {
            let id = id as u64;
            let offset = if id == 0 {
                (0.0, 0.0)
            } else {
                final_slot(id).coord.to_cartesian(r)
            };
            let target = (origin.0 + offset.0, origin.1 + offset.1);
            let distance = (target.0 - start.0).hypot(target.1 - start.1);
            DeploymentTarget {
                id,
                start,
                target,
                distance,
            }
        })
        .collect();
    let total_distance = targets.iter().map(|t| t.distance).sum();
    DeploymentPlan {
        targets,
        one_shot: true,
        broadcast_count,
        total_distance,
    }
}

/// Energy-optimal plan for the standard point deployment: all nodes start at
/// the origin, already knowing it, and move straight to their slots.
pub fn point_deployment_plan(n: u64, r: f64) -> DeploymentPlan {
    assert!(n >= 1);
    let starts = vec![(0.0, 0.0); n as usize];
    plan_from_starts(&starts, r, 0)
}

/// Plan for arbitrary initial positions: node 0 announces its location (one
/// broadcast), every other node targets its slot translated by that location
/// and moves in a single round.
pub fn random_deployment_plan(starts: &[(f64, f64)], r: f64) -> Result<DeploymentPlan, PlanError> {
    if starts.is_empty() {
        return Err(PlanError::EmptyStarts);
    }
    Ok(plan_from_starts(starts, r, 1))
}

/// Seeded uniform start positions over a centered square of the given side.
///
/// Samples x then y per node, in id order, from a ChaCha8 stream; a fixed
/// seed reproduces the deployment exactly.
pub fn uniform_starts(n: u64, side: f64, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = side / 2.0;
    (0..n)
        .map(|_| {
            let x = rng.gen_range(-half..=half);
            let y = rng.gen_range(-half..=half);
            (x, y)
        })
        .collect()
}
