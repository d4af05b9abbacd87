//! The per-node MaxCover state machine.
//!
//! Every sensor runs the same three transitions, driven only by its id and
//! the round counter — no messages are exchanged:
//!
//! * the initial round pins node 0 at the origin and sends everyone else one
//!   step into their sextant,
//! * the `double` round either stabilizes a node, turns it into a `single`
//!   (one +π/3 turn, at most once per lifetime), or moves it straight ahead,
//! * the `single` round either stabilizes the node or moves it straight.
//!
//! The turn decision tests whether `(m_id - ĵ)/3` is a pronic number
//! `v·(v+1)`; it is computed with integer square roots only, never by
//! rounding a floating-point value.
//!
//! Sextants are numbered `ĵ ∈ {1..6}` with ids divisible by 6 mapped to
//! sextant 6, matching the special-cased initial `min_id`. Using the raw
//! residue 0 for those ids in the turn test misroutes every sixth node and
//! leaves a lattice vertex vacant; that historical reading stays available
//! behind [`SextantRule::LiteralJ0`] so the defect can be demonstrated and
//! detected by the verifier.

use serde::Serialize;

use crate::lattice::{Direction, LatticeCoord};

/// Whether a node has reached its final vertex. Stable nodes never act again.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Stable,
    Unstable,
}

/// Movement class of an unstable node: a `Double` node may still turn once,
/// a `Single` node keeps its heading until it stabilizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeType {
    Single,
    Double,
}

/// Which sextant value feeds the turn test and the `min_id` thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SextantRule {
    /// Effective sextant `ĵ ∈ {1..6}` everywhere (6 for ids ≡ 0 mod 6).
    #[default]
    Effective,
    /// Raw residue `id mod 6` (0 for ids divisible by 6). Demonstrably
    /// wrong: with n ≥ 19 it leaves vertex (1,1) vacant. Kept for the
    /// `--literal-j0` compatibility switch.
    LiteralJ0,
}

/// Full protocol state of one sensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NodeState {
    pub id: u64,
    pub status: Status,
    /// Meaningful only while unstable.
    pub node_type: NodeType,
    /// Effective sextant `ĵ ∈ {1..6}`; 0 for node 0, which never enters one.
    pub sextant: u8,
    pub heading: Direction,
    pub m_id: u64,
    pub min_id: u64,
    pub pos: LatticeCoord,
    /// Unit moves performed so far, for energy accounting.
    pub moves_made: u32,
}

impl NodeState {
    pub fn is_stable(&self) -> bool {
        self.status == Status::Stable
    }

    /// The sextant value used in thresholds under the given rule.
    fn threshold_j(&self, rule: SextantRule) -> u64 {
        match rule {
            SextantRule::Effective => self.sextant as u64,
            SextantRule::LiteralJ0 => (self.sextant % 6) as u64,
        }
    }
}

/// Effective sextant of a node: `id mod 6`, with 0 mapped to 6.
///
/// Node 0 never enters a sextant; calling this with id 0 is a caller bug.
pub fn sextant_of(id: u64) -> u8 {
    assert!(id >= 1, "node 0 has no sextant");
    match (id % 6) as u8 {
        0 => 6,
        j => j,
    }
}

/// Round-0 transition. Node 0 stabilizes at the origin without moving; every
/// other node becomes an unstable double, heads into its sextant (direction
/// `ĵ mod 6`), and takes its first step.
pub fn initial_transition(id: u64, n: u64) -> NodeState {
    assert!(id < n, "id {id} outside population [0, {n})");
    if id == 0 {
        return NodeState {
            id: 0,
            status: Status::Stable,
            node_type: NodeType::Double,
            sextant: 0,
            heading: Direction::new(0),
            m_id: 0,
            min_id: 0,
            pos: LatticeCoord::ORIGIN,
            moves_made: 0,
        };
    }
    let sextant = sextant_of(id);
    let heading = Direction::new(sextant % 6);
    NodeState {
        id,
        status: Status::Unstable,
        node_type: NodeType::Double,
        sextant,
        heading,
        m_id: id,
        min_id: sextant as u64,
        pos: LatticeCoord::ORIGIN.step(heading),
        moves_made: 1,
    }
}

/// Exact integer turn decision.
///
/// Returns `Some(v)` iff `m_id - j = 3·v·(v+1)` for an integer `v ≥ 0`,
/// i.e. iff the quantity `-1/2 + √((m_id-j)/3 + 1/4)` is integral.
pub fn turn_test(m_id: u64, j: u64) -> Option<u64> {
    debug_assert!(m_id >= j, "turn test on m_id {m_id} < j {j}");
    let d = m_id - j;
    if d % 3 != 0 {
        return None;
    }
    let w = d / 3;
    // v(v+1) = w  =>  v = (isqrt(4w+1) - 1) / 2, then confirm exactly.
    let v = ((4 * w + 1).isqrt() - 1) / 2;
    (v * (v + 1) == w).then_some(v)
}

/// The `min_id` value written in round `k`: `3·k·(k+1) + j`.
///
/// With `k = 0` this reproduces the initial `min_id = ĵ`.
pub fn stable_threshold(k: u64, j: u64) -> u64 {
    3 * k * (k + 1) + j
}

/// Round-k transition for an unstable double node. Checks, in order:
/// stability, then the turn test, then the straight move.
pub fn double_transition(s: &NodeState, k: u64, rule: SextantRule) -> NodeState {
    debug_assert!(k >= 1);
    assert!(
        s.status == Status::Unstable && s.node_type == NodeType::Double,
        "double_transition on a {:?} {:?} node",
        s.status,
        s.node_type,
    );
    let mut next = *s;
    if s.m_id == s.min_id {
        next.status = Status::Stable;
        return next;
    }
    let j = s.threshold_j(rule);
    if turn_test(s.m_id, j).is_some() {
        // Turn: +π/3, become single, m_id frozen from here on.
        next.heading = s.heading.turned_left();
        next.node_type = NodeType::Single;
        next.min_id = stable_threshold(k, j);
        next.pos = s.pos.step(next.heading);
        next.moves_made += 1;
    } else {
        next.pos = s.pos.step(s.heading);
        next.m_id = s.m_id - 6;
        next.min_id = stable_threshold(k, j);
        next.moves_made += 1;
    }
    next
}

/// Round-k transition for an unstable single node: stabilize or move straight.
pub fn single_transition(s: &NodeState, k: u64, rule: SextantRule) -> NodeState {
    debug_assert!(k >= 1);
    assert!(
        s.status == Status::Unstable && s.node_type == NodeType::Single,
        "single_transition on a {:?} {:?} node",
        s.status,
        s.node_type,
    );
    let mut next = *s;
    if s.m_id == s.min_id {
        next.status = Status::Stable;
        return next;
    }
    next.min_id = stable_threshold(k, s.threshold_j(rule));
    next.pos = s.pos.step(s.heading);
    next.moves_made += 1;
    next
}

/// Dispatches the appropriate round-k transition for any unstable node.
pub fn round_transition(s: &NodeState, k: u64, rule: SextantRule) -> NodeState {
    match s.node_type {
        NodeType::Double => double_transition(s, k, rule),
        NodeType::Single => single_transition(s, k, rule),
    }
}
