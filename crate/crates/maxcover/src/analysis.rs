//! Verification and rendering: tiling conformance, coverage-hole detection,
//! disk-coverage sampling, round-schedule checks, and SVG figure output.
//!
//! Two complementary notions of "coverage hole" are implemented:
//!
//! * [`check_no_holes`] — an *enclosed vacancy*: an unoccupied lattice vertex
//!   with no unoccupied lattice path to the exterior, found by flood-filling
//!   inward from outside the configuration.
//! * [`interior_vacancies`] — an *interior vacancy*: an unoccupied lattice
//!   vertex lying within the convex hull of the occupied vertices. This
//!   catches vacancies that poke into the spread region through a gap (as the
//!   literal-j0 rule produces at vertex (1,1)) and which the flood fill alone
//!   cannot see. Computed exactly with integer arithmetic; the hull transfers
//!   from Cartesian space because the basis map is linear.
//!
//! A configuration verifies hole-free only if both lists are empty; the
//! report's `holes_found` is their union.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{expected_termination_round, RoundReport};
use crate::lattice::{Direction, LatticeCoord, SQRT_3};
use crate::planner::slot_of_coord;

/// Largest supported layer index for the grid-based hole scans.
const MAX_SCAN_RING: u64 = 4096;

/// Tiling conformance: distinct vertices, exact √3·r spacing, connectivity.
#[derive(Clone, Debug, Serialize)]
pub struct TilingCheck {
    /// Positions held by more than one node.
    pub duplicates: Vec<LatticeCoord>,
    /// Minimum Cartesian distance between distinct nodes; `None` with fewer
    /// than two nodes.
    pub min_pairwise_distance: Option<f64>,
    pub connected: bool,
}

impl TilingCheck {
    pub fn ok(&self, r: f64) -> bool {
        let spacing_ok = match self.min_pairwise_distance {
            None => true,
            Some(d) => (d - SQRT_3 * r).abs() <= 1e-12 * SQRT_3 * r,
        };
        self.duplicates.is_empty() && spacing_ok && self.connected
    }
}

/// Verifies that the coordinates form a section of the triangular tiling:
/// no duplicates, closest pair exactly √3·r apart, one connected component.
pub fn check_tiling(coords: &[LatticeCoord], r: f64) -> TilingCheck {
    assert!(!coords.is_empty(), "tiling check needs at least one vertex");
    let mut seen = HashSet::with_capacity(coords.len());
    let mut duplicates = Vec::new();
    for &c in coords {
        if !seen.insert(c) {
            duplicates.push(c);
        }
    }
    duplicates.sort_unstable();
    duplicates.dedup();

    let min_pairwise_distance = if coords.len() < 2 {
        None
    } else if !duplicates.is_empty() {
        Some(0.0)
    } else if seen.iter().any(|c| c.neighbors().iter().any(|n| seen.contains(n))) {
        // distinct lattice vertices are at least one unit apart, so an
        // adjacent pair realizes the minimum exactly
        Some(SQRT_3 * r)
    } else {
        let list: Vec<LatticeCoord> = seen.iter().copied().collect();
        assert!(
            list.len() <= 20_000,
            "pairwise distance scan on a degenerate (adjacency-free) set this large is unsupported"
        );
        let mut min_q = i64::MAX;
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                min_q = min_q.min((a - b).quadratic_form());
            }
        }
        Some(SQRT_3 * r * (min_q as f64).sqrt())
    };

    TilingCheck {
        duplicates,
        min_pairwise_distance,
        connected: is_connected(&seen),
    }
}

fn is_connected(occupied: &HashSet<LatticeCoord>) -> bool {
    let start = match occupied.iter().min() {
        Some(&c) => c,
        None => return true,
    };
    let mut visited = HashSet::with_capacity(occupied.len());
    let mut stack = vec![start];
    visited.insert(start);
    while let Some(c) = stack.pop() {
        for nb in c.neighbors() {
            if occupied.contains(&nb) && visited.insert(nb) {
                stack.push(nb);
            }
        }
    }
    visited.len() == occupied.len()
}

/// Enclosed vacancies: unoccupied vertices with no unoccupied lattice path to
/// the exterior.
///
/// Flood-fills unoccupied vertices inward from the boundary of the occupied
/// set's layer bounding box expanded by one; whatever stays unreached inside
/// the box is enclosed. Returned sorted by `(a, b)`.
pub fn check_no_holes(occupied: &HashSet<LatticeCoord>) -> Vec<LatticeCoord> {
    assert!(!occupied.is_empty(), "hole check needs at least one vertex");
    let max_ring = occupied.iter().map(|c| c.ring()).max().unwrap();
    assert!(
        max_ring < MAX_SCAN_RING,
        "hole detection supports configurations up to ring {MAX_SCAN_RING}"
    );
    let radius = (max_ring + 1) as i64;
    let width = (2 * radius + 1) as usize;
    let cell = |c: LatticeCoord| ((c.a + radius) as usize) * width + ((c.b + radius) as usize);

    const VACANT: u8 = 0;
    const OCCUPIED: u8 = 1;
    const REACHED: u8 = 2;
    let mut grid = vec![VACANT; width * width];
    for &c in occupied {
        grid[cell(c)] = OCCUPIED;
    }

    let mut stack = Vec::new();
    for a in -radius..=radius {
        for b in -radius..=radius {
            let c = LatticeCoord::new(a, b);
            if c.ring() == radius as u64 && grid[cell(c)] == VACANT {
                grid[cell(c)] = REACHED;
                stack.push(c);
            }
        }
    }
    while let Some(c) = stack.pop() {
        for nb in c.neighbors() {
            if nb.ring() <= radius as u64 && grid[cell(nb)] == VACANT {
                grid[cell(nb)] = REACHED;
                stack.push(nb);
            }
        }
    }

    let mut holes = Vec::new();
    for a in -radius..=radius {
        for b in -radius..=radius {
            let c = LatticeCoord::new(a, b);
            if c.ring() <= radius as u64 && grid[cell(c)] == VACANT {
                holes.push(c);
            }
        }
    }
    holes
}

/// Interior vacancies: unoccupied lattice vertices inside (or on the boundary
/// of) the convex hull of the occupied vertices. Returned sorted by `(a, b)`.
pub fn interior_vacancies(occupied: &HashSet<LatticeCoord>) -> Vec<LatticeCoord> {
    assert!(!occupied.is_empty(), "vacancy check needs at least one vertex");
    let hull = convex_hull(occupied);
    let a_min = occupied.iter().map(|c| c.a).min().unwrap();
    let a_max = occupied.iter().map(|c| c.a).max().unwrap();
    let b_min = occupied.iter().map(|c| c.b).min().unwrap();
    let b_max = occupied.iter().map(|c| c.b).max().unwrap();
    assert!(
        (a_max - a_min) as u64 <= 2 * MAX_SCAN_RING && (b_max - b_min) as u64 <= 2 * MAX_SCAN_RING,
        "vacancy detection supports configurations up to ring {MAX_SCAN_RING}"
    );

    let mut vacancies = Vec::new();
    for a in a_min..=a_max {
        for b in b_min..=b_max {
            let c = LatticeCoord::new(a, b);
            if !occupied.contains(&c) && hull_contains(&hull, c) {
                vacancies.push(c);
            }
        }
    }
    vacancies
}

fn cross(o: LatticeCoord, p: LatticeCoord, q: LatticeCoord) -> i64 {
    (p.a - o.a) * (q.b - o.b) - (p.b - o.b) * (q.a - o.a)
}

/// Monotone-chain convex hull in `(a, b)` coordinates, counterclockwise,
/// collinear boundary points dropped.
fn convex_hull(points: &HashSet<LatticeCoord>) -> Vec<LatticeCoord> {
    let mut pts: Vec<LatticeCoord> = points.iter().copied().collect();
    pts.sort_unstable();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<LatticeCoord> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<LatticeCoord> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // fully collinear inputs collapse to their two extremes
    if lower.len() < 2 {
        return vec![pts[0], pts[pts.len() - 1]];
    }
    lower
}

fn hull_contains(hull: &[LatticeCoord], p: LatticeCoord) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0] == p,
        2 => {
            let (a, b) = (hull[0], hull[1]);
            cross(a, b, p) == 0
                && p.a >= a.a.min(b.a)
                && p.a <= a.a.max(b.a)
                && p.b >= a.b.min(b.b)
                && p.b <= a.b.max(b.b)
        }
        n => (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], p) >= 0),
    }
}

/// All holes a configuration exhibits: enclosed vacancies plus interior
/// vacancies, deduplicated and sorted.
pub fn find_holes(occupied: &HashSet<LatticeCoord>) -> Vec<LatticeCoord> {
    let mut holes = check_no_holes(occupied);
    holes.extend(interior_vacancies(occupied));
    holes.sort_unstable();
    holes.dedup();
    holes
}

/// Samples points inside the occupied lattice triangles and confirms each is
/// within `disk_r·(1 + 1e−9)` of an occupied vertex. `lattice_r` fixes the
/// vertex spacing at √3·lattice_r.
///
/// A triangle of side √3·r has circumradius exactly r, so with
/// `disk_r = lattice_r` this holds analytically; the relative tolerance
/// absorbs rounding at the circumcenters. Vacuously true when the set spans
/// no complete triangle. Reproducible from the seed.
pub fn disk_coverage(
    occupied: &HashSet<LatticeCoord>,
    lattice_r: f64,
    disk_r: f64,
    samples: u64,
    seed: u64,
) -> bool {
    let mut corners: Vec<LatticeCoord> = occupied.iter().copied().collect();
    corners.sort_unstable();

    let u0 = Direction::new(0);
    let u1 = Direction::new(1);
    let u2 = Direction::new(2);
    let mut triangles: Vec<[LatticeCoord; 3]> = Vec::new();
    for &c in &corners {
        let up = [c, c.step(u0), c.step(u1)];
        if up.iter().all(|v| occupied.contains(v)) {
            triangles.push(up);
        }
        let down = [c, c.step(u1), c.step(u2)];
        if down.iter().all(|v| occupied.contains(v)) {
            triangles.push(down);
        }
    }
    if triangles.is_empty() {
        return true;
    }

    let limit = disk_r * (1.0 + 1e-9);
    let limit_sq = limit * limit;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let tri = triangles[rng.gen_range(0..triangles.len())];
        let (ax, ay) = tri[0].to_cartesian(lattice_r);
        let (bx, by) = tri[1].to_cartesian(lattice_r);
        let (cx, cy) = tri[2].to_cartesian(lattice_r);
        let (mut u, mut v) = (rng.gen::<f64>(), rng.gen::<f64>());
        if u + v > 1.0 {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        let px = ax + u * (bx - ax) + v * (cx - ax);
        let py = ay + u * (by - ay) + v * (cy - ay);
        let covered = tri.iter().any(|corner| {
            let (x, y) = corner.to_cartesian(lattice_r);
            (px - x) * (px - x) + (py - y) * (py - y) <= limit_sq
        });
        if !covered {
            return false;
        }
    }
    true
}

/// Disk-coverage check at the protocol's own radius.
pub fn check_coverage(occupied: &HashSet<LatticeCoord>, r: f64, samples: u64, seed: u64) -> bool {
    disk_coverage(occupied, r, r, samples, seed)
}

/// Validates a run's round schedule:
/// one node stable in round 0, `6k` in round `k`, the remainder
/// `n − 1 − 3(m−1)m` in the final round `m`; at most six double groups at the
/// start of every round (exactly six for complete-hexagon populations); and
/// termination in exactly `expected_termination_round(n)` rounds.
pub fn check_round_counts(reports: &[RoundReport], n: u64) -> bool {
    let m = expected_termination_round(n);
    if reports.len() as u64 != m + 1 {
        return false;
    }
    if reports[0].newly_stable != [0] {
        return false;
    }
    for k in 1..m {
        if reports[k as usize].newly_stable.len() as u64 != 6 * k {
            return false;
        }
    }
    if m >= 1 {
        let remainder = n - 1 - 3 * (m - 1) * m;
        if reports[m as usize].newly_stable.len() as u64 != remainder {
            return false;
        }
    }
    let complete = n == 1 + 3 * m * (m + 1);
    // round k+1 starts from the census taken after round k
    for k in 0..m {
        let groups = reports[k as usize].double_group_positions.len();
        if groups > 6 || (complete && groups != 6) {
            return false;
        }
    }
    let total: u64 = reports.iter().map(|r| r.newly_stable.len() as u64).sum();
    total == n && reports[m as usize].unstable_remaining == 0
}

/// One row of a final configuration, as read back from a run.
#[derive(Clone, Copy, Debug)]
pub struct FinalEntry {
    pub id: u64,
    pub coord: LatticeCoord,
    pub stable_round: u64,
}

/// Everything the verifier can determine about a final configuration.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub n: u64,
    pub radius: f64,
    pub tiling_ok: bool,
    pub duplicates: Vec<LatticeCoord>,
    pub min_pairwise_distance: Option<f64>,
    pub connected: bool,
    pub holes_found: Vec<LatticeCoord>,
    pub coverage_ok: bool,
    /// At most six double groups per round (six for complete hexagons),
    /// reconstructed from the slot decomposition of the final vertices.
    pub group_census_ok: bool,
    /// Stable-count schedule 1, 6, 12, …, 6k, …, remainder.
    pub schedule_ok: bool,
    pub termination_ok: bool,
    pub termination_round: u64,
    pub expected_termination_round: u64,
    pub passed: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

/// Runs every configuration-level check on a final configuration.
pub fn verify_entries(entries: &[FinalEntry], r: f64, samples: u64, seed: u64) -> VerificationReport {
    assert!(!entries.is_empty(), "verification needs at least one row");
    let n = entries.len() as u64;
    let coords: Vec<LatticeCoord> = entries.iter().map(|e| e.coord).collect();
    let occupied: HashSet<LatticeCoord> = coords.iter().copied().collect();

    let tiling = check_tiling(&coords, r);
    let holes_found = find_holes(&occupied);
    let coverage_ok = check_coverage(&occupied, r, samples, seed);

    let termination_round = entries.iter().map(|e| e.stable_round).max().unwrap();
    let expected = expected_termination_round(n);
    let schedule_ok = stable_schedule_ok(entries, n, expected);
    let group_census_ok = group_census_ok(entries, n, expected);

    let tiling_ok = tiling.ok(r);
    let termination_ok = termination_round == expected;
    let passed = tiling_ok
        && holes_found.is_empty()
        && coverage_ok
        && group_census_ok
        && schedule_ok
        && termination_ok;
    VerificationReport {
        n,
        radius: r,
        tiling_ok,
        duplicates: tiling.duplicates,
        min_pairwise_distance: tiling.min_pairwise_distance,
        connected: tiling.connected,
        holes_found,
        coverage_ok,
        group_census_ok,
        schedule_ok,
        termination_ok,
        termination_round,
        expected_termination_round: expected,
        passed,
    }
}

fn stable_schedule_ok(entries: &[FinalEntry], n: u64, m: u64) -> bool {
    let mut counts = vec![0u64; m as usize + 1];
    for e in entries {
        match counts.get_mut(e.stable_round as usize) {
            Some(c) => *c += 1,
            None => return false,
        }
    }
    if counts[0] != 1 {
        return false;
    }
    for k in 1..m {
        if counts[k as usize] != 6 * k {
            return false;
        }
    }
    m == 0 || counts[m as usize] == n - 1 - 3 * (m - 1) * m
}

/// Reconstructs the double-group census from the slot decomposition: a node
/// in slot `s` of its sextant was part of a double group through round
/// `s + 1`, co-located with its sextant's other doubles. The census per
/// round is the number of sextants still contributing, never more than six.
fn group_census_ok(entries: &[FinalEntry], n: u64, m: u64) -> bool {
    let mut origin_ids = Vec::new();
    // deepest slot index per sextant (1-based sextants)
    let mut deepest = [0u64; 7];
    for e in entries {
        if e.coord == LatticeCoord::ORIGIN {
            origin_ids.push(e.id);
            continue;
        }
        match slot_of_coord(e.coord) {
            Some(slot) => {
                let d = &mut deepest[slot.sextant as usize];
                *d = (*d).max(slot.index + 1);
            }
            None => return false,
        }
    }
    if origin_ids != [0] {
        return false;
    }
    let complete = n == 1 + 3 * m * (m + 1);
    if complete {
        for k in 1..=m {
            let census = (1..=6).filter(|&j| deepest[j] >= k).count();
            if census != 6 {
                return false;
            }
        }
    }
    true
}

/// SVG rendering knobs. Defaults follow the published figures: thin outlines,
/// a center dot per node, node 0 dashed.
#[derive(Clone, Copy, Debug)]
pub struct RenderOptions {
    /// Outline width; defaults to 2% of the sensing radius.
    pub stroke_width: Option<f64>,
    pub center_dots: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            stroke_width: None,
            center_dots: true,
        }
    }
}

/// Fixed-precision number formatting shared by all deterministic outputs.
/// Six decimal places, negative zero normalized away.
pub fn fmt_fixed(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.6}")
}

/// Renders one sensing disk per node as an SVG document.
///
/// Elements are ordered by id, coordinates use six decimal places, and the
/// viewBox fits all disks with a 5% margin, so identical inputs produce
/// byte-identical documents. Node 0's disk is stroke-dashed.
pub fn render_svg(final_positions: &[(u64, LatticeCoord)], r: f64, options: &RenderOptions) -> String {
    assert!(!final_positions.is_empty(), "nothing to render");
    let mut nodes: Vec<(u64, LatticeCoord)> = final_positions.to_vec();
    nodes.sort_unstable_by_key(|&(id, _)| id);

    // SVG's y axis points down; flip so the figures read like plots.
    let points: Vec<(u64, f64, f64)> = nodes
        .iter()
        .map(|&(id, c)| {
            let (x, y) = c.to_cartesian(r);
            (id, x, -y)
        })
        .collect();

    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for &(_, x, y) in &points {
        min_x = min_x.min(x - r);
        max_x = max_x.max(x + r);
        min_y = min_y.min(y - r);
        max_y = max_y.max(y + r);
    }
    let margin = 0.05 * (max_x - min_x).max(max_y - min_y).max(2.0 * r);
    let (vx, vy) = (min_x - margin, min_y - margin);
    let (vw, vh) = (max_x - min_x + 2.0 * margin, max_y - min_y + 2.0 * margin);

    let stroke = options.stroke_width.unwrap_or(0.02 * r);
    let dash = format!("{} {}", fmt_fixed(0.25 * r), fmt_fixed(0.15 * r));

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">\n",
        fmt_fixed(vx),
        fmt_fixed(vy),
        fmt_fixed(vw),
        fmt_fixed(vh)
    ));
    for &(id, x, y) in &points {
        let extra = if id == 0 {
            format!(" stroke-dasharray=\"{dash}\"")
        } else {
            String::new()
        };
        svg.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\"{}/>\n",
            fmt_fixed(x),
            fmt_fixed(y),
            fmt_fixed(r),
            fmt_fixed(stroke),
            extra
        ));
        if options.center_dots {
            svg.push_str(&format!(
                "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"black\"/>\n",
                fmt_fixed(x),
                fmt_fixed(y),
                fmt_fixed(0.04 * r)
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}
