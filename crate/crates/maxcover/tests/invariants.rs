//! Cross-module invariants: protocol state evolution, per-round engine
//! structure, and planner/engine agreement.

use std::collections::{HashMap, HashSet};

use maxcover::analysis::{check_no_holes, check_round_counts, check_tiling, interior_vacancies};
use maxcover::engine::{energy_report, expected_termination_round, run, SimulationConfig};
use maxcover::lattice::{LatticeCoord, SQRT_3};
use maxcover::planner::{final_slot, iterative_plan, plan_all, slot_of_coord, stable_round_of};
use maxcover::protocol::{initial_transition, round_transition, NodeType, SextantRule, Status};

fn ring_vertices(m: u64) -> HashSet<LatticeCoord> {
    let m = m as i64;
    let mut set = HashSet::new();
    for a in -m..=m {
        for b in -m..=m {
            let c = LatticeCoord::new(a, b);
            if c.ring() <= m as u64 {
                set.insert(c);
            }
        }
    }
    set
}

/// A node is judged stable at round k exactly when its m_id equals
/// 3(k−1)k + ĵ; the stored min_id and the closed form must agree for every
/// node of every population at every round.
#[test]
fn stored_min_id_matches_stateless_threshold() {
    for n in 1..=2000u64 {
        let mut active: Vec<_> = (1..n).map(|id| initial_transition(id, n)).collect();
        let mut k = 0;
        while !active.is_empty() {
            k += 1;
            for s in &active {
                let stored = s.m_id == s.min_id;
                let closed = s.m_id == 3 * (k - 1) * k + s.sextant as u64;
                assert_eq!(stored, closed, "n={n} id={} k={k}", s.id);
            }
            active = active
                .iter()
                .map(|s| round_transition(s, k, SextantRule::Effective))
                .filter(|s| !s.is_stable())
                .collect();
        }
    }
}

/// Doubles never change heading; singles never change m_id; m_id decreases
/// only by 6 and only on the double straight branch; a node turns at most
/// once.
#[test]
fn state_evolution_laws() {
    for n in [2, 6, 7, 19, 48, 91, 500, 1999] {
        let config = SimulationConfig::new(n, 1.0).unwrap().with_trajectories(true);
        let result = run(&config);
        let t = result.trajectories.as_ref().unwrap();
        let mut turns = vec![0u32; n as usize];
        for w in t.windows(2) {
            let (prev, next) = (&w[0], &w[1]);
            for id in 0..n as usize {
                let (p, q) = (&prev[id], &next[id]);
                if p.status == Status::Stable {
                    assert_eq!(p, q, "stable node {id} changed");
                    continue;
                }
                match (p.node_type, q.node_type) {
                    (NodeType::Double, NodeType::Double) => {
                        assert_eq!(p.heading, q.heading, "double {id} changed heading");
                        assert!(q.m_id == p.m_id || q.m_id == p.m_id - 6);
                        if q.status == Status::Unstable && q.m_id == p.m_id {
                            panic!("double {id} moved straight without decrementing m_id");
                        }
                    }
                    (NodeType::Double, NodeType::Single) => {
                        turns[id] += 1;
                        assert_eq!(q.heading, p.heading.turned_left());
                        assert_eq!(q.m_id, p.m_id, "turning must freeze m_id");
                    }
                    (NodeType::Single, NodeType::Single) => {
                        assert_eq!(p.heading, q.heading);
                        assert_eq!(p.m_id, q.m_id, "single {id} changed m_id");
                    }
                    (NodeType::Single, NodeType::Double) => {
                        panic!("node {id} reverted to double");
                    }
                }
            }
        }
        assert!(turns.iter().all(|&t| t <= 1), "a node turned twice (n={n})");
    }
}

/// After round k the stable set is exactly the vertices of layers 0..k, and
/// every still-unstable node stands on layer k+1.
#[test]
fn layer_completion_and_frontier() {
    for n in [7, 19, 20, 48, 91, 200, 1000] {
        let config = SimulationConfig::new(n, 1.0).unwrap().with_trajectories(true);
        let result = run(&config);
        let t = result.trajectories.as_ref().unwrap();
        let m = result.termination_round;
        for (k, snapshot) in t.iter().enumerate() {
            let k = k as u64;
            let stable: HashSet<LatticeCoord> = snapshot
                .iter()
                .filter(|s| s.status == Status::Stable)
                .map(|s| s.pos)
                .collect();
            if k < m {
                assert_eq!(stable, ring_vertices(k), "n={n} k={k}");
            }
            for s in snapshot.iter().filter(|s| s.status == Status::Unstable) {
                assert_eq!(s.pos.ring(), k + 1, "n={n} id={} off frontier", s.id);
            }
        }
    }
}

#[test]
fn round_reports_validate_for_sampled_populations() {
    for n in [1, 2, 3, 6, 7, 8, 19, 37, 48, 61, 91, 100, 777, 2000] {
        let result = run(&SimulationConfig::new(n, 1.0).unwrap());
        assert!(check_round_counts(&result.reports, n), "n = {n}");
        assert_eq!(result.termination_round, expected_termination_round(n));
        // newly-stable ids are disjoint across rounds and cover the population
        let mut seen = HashSet::new();
        for report in &result.reports {
            for &id in &report.newly_stable {
                assert!(seen.insert(id), "id {id} reported stable twice (n={n})");
            }
        }
        assert_eq!(seen.len() as u64, n);
    }
}

/// path_length = stable_round·√3·r, straight_line ≤ path_length, equality
/// exactly for nodes whose final vertex is a corner (never-turners).
#[test]
fn energy_laws() {
    let n = 500u64;
    let r = 2.5f64;
    let result = run(&SimulationConfig::new(n, r).unwrap());
    let report = energy_report(&result, r);
    let rounds = result.stable_rounds();
    for e in &report.entries {
        let expected_path = rounds[e.id as usize] as f64 * SQRT_3 * r;
        assert!((e.path_length - expected_path).abs() <= 1e-12 * expected_path.max(1.0));
        assert!(e.straight_line <= e.path_length + 1e-12);
        let never_turned = e.id == 0 || final_slot(e.id).is_corner();
        let equal = (e.path_length - e.straight_line).abs() <= 1e-9 * e.path_length.max(1.0);
        assert_eq!(equal, never_turned, "id = {}", e.id);
    }
    assert!(report.total_straight < report.total_path);
}

#[test]
fn closed_form_matches_iteration_and_engine() {
    let n = 10_000u64;
    let result = run(&SimulationConfig::new(n, 1.0).unwrap());
    let plan = plan_all(n);
    let rounds = result.stable_rounds();
    for id in 0..n {
        assert_eq!(plan[id as usize], result.final_states[id as usize].pos, "id = {id}");
        assert_eq!(plan[id as usize], iterative_plan(id), "id = {id}");
        assert_eq!(stable_round_of(id), rounds[id as usize], "id = {id}");
    }
}

/// Ids landing on layer ℓ are exactly 1+3(ℓ−1)ℓ ..= 3ℓ(ℓ+1).
#[test]
fn id_ranges_per_ring() {
    let mut by_ring: HashMap<u64, Vec<u64>> = HashMap::new();
    let max_id = 3 * 60 * 61;
    for id in 1..=max_id {
        by_ring.entry(final_slot(id).ring).or_default().push(id);
    }
    for ring in 1..=60u64 {
        let ids = &by_ring[&ring];
        let lo = 1 + 3 * (ring - 1) * ring;
        let hi = 3 * ring * (ring + 1);
        assert_eq!(*ids.first().unwrap(), lo, "ring {ring}");
        assert_eq!(*ids.last().unwrap(), hi, "ring {ring}");
        assert_eq!(ids.len() as u64, 6 * ring, "ring {ring}");
    }
}

/// plan_all is injective and its image is layer-downward-closed except on the
/// outermost layer.
#[test]
fn plan_all_structure() {
    for n in [1u64, 2, 7, 19, 48, 500, 10_000] {
        let plan = plan_all(n);
        let image: HashSet<LatticeCoord> = plan.iter().copied().collect();
        assert_eq!(image.len() as u64, n, "plan_all({n}) not injective");
        let m = expected_termination_round(n);
        if m >= 1 {
            for c in ring_vertices(m - 1) {
                assert!(image.contains(&c), "n={n}: interior vertex {c} unplanned");
            }
        }
        assert!(plan.iter().all(|c| c.ring() <= m));
    }
}

/// Every unoccupied outermost-layer vertex must be adjacent to an unoccupied
/// vertex one layer out, so a partial outer layer never encloses a vacancy.
#[test]
fn partial_outer_ring_never_encloses() {
    for n in 1..=2000u64 {
        let plan = plan_all(n);
        let image: HashSet<LatticeCoord> = plan.iter().copied().collect();
        let m = expected_termination_round(n);
        for c in ring_vertices(m) {
            if c.ring() == m && !image.contains(&c) {
                let escapes = c
                    .neighbors()
                    .iter()
                    .any(|nb| nb.ring() == m + 1 && !image.contains(nb));
                assert!(escapes, "n={n}: vacancy {c} cannot escape outward");
            }
        }
    }
}

/// Tiling and hole-freeness of final configurations across a coarse sweep;
/// the full sweep lives in the acceptance suite.
#[test]
fn final_configurations_verify() {
    for n in [2u64, 5, 7, 13, 19, 48, 79, 91, 331, 1000] {
        let result = run(&SimulationConfig::new(n, 1.0).unwrap());
        let coords = result.final_positions();
        let occupied: HashSet<LatticeCoord> = coords.iter().copied().collect();
        assert!(check_tiling(&coords, 1.0).ok(1.0), "n = {n}");
        assert_eq!(check_no_holes(&occupied), vec![], "n = {n}");
        assert_eq!(interior_vacancies(&occupied), vec![], "n = {n}");
    }
}

/// slot_of_coord agrees with final_slot across the whole populated region.
#[test]
fn slot_inversion_roundtrip() {
    for id in 1..=20_000u64 {
        let slot = final_slot(id);
        assert_eq!(slot_of_coord(slot.coord), Some(slot));
    }
}
