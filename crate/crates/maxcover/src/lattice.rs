//! Exact integer arithmetic for the triangular lattice with edge length √3·r.
//!
//! Every vertex is an integer combination `a·u0 + b·u1` of the two basis
//! vectors `u_d = √3·r·(cos dπ/3, sin dπ/3)` at 0° and 60°. All positions and
//! motion stay in integer `(a, b)` coordinates; Cartesian values are a derived
//! view computed only for output. This keeps the tiling invariants exact over
//! arbitrarily many accumulated moves.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::Serialize;

/// A vertex of the triangular lattice, as coefficients of the basis vectors
/// `u0` (0°) and `u1` (60°). Equality is integer equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeCoord {
    pub a: i64,
    pub b: i64,
}

/// One of the six lattice directions; direction `d` points at angle `d·π/3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Direction(u8);

/// Unit step vectors in `(a, b)` coordinates, indexed by direction.
///
/// `u2 = u1 - u0`, `u3 = -u0`, `u4 = -u1`, `u5 = u0 - u1`.
const STEPS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

pub const SQRT_3: f64 = 1.732050807568877293527446341505872367_f64;

impl LatticeCoord {
    pub const ORIGIN: LatticeCoord = LatticeCoord { a: 0, b: 0 };

    pub const fn new(a: i64, b: i64) -> Self {
        LatticeCoord { a, b }
    }

    /// The vertex one unit step away in direction `d`.
    pub fn step(self, d: Direction) -> LatticeCoord {
        let (da, db) = STEPS[d.index() as usize];
        LatticeCoord::new(self.a + da, self.b + db)
    }

    /// The six adjacent vertices, in direction order `0..=5`.
    pub fn neighbors(self) -> [LatticeCoord; 6] {
        Direction::ALL.map(|d| self.step(d))
    }

    /// Hexagonal layer index: the minimum number of unit steps from the origin.
    pub fn ring(self) -> u64 {
        ((self.a.abs() + self.b.abs() + (self.a + self.b).abs()) / 2) as u64
    }

    /// Lattice (hop) distance to another vertex.
    pub fn distance(self, other: LatticeCoord) -> u64 {
        (self - other).ring()
    }

    /// Exact Cartesian position for sensing radius `r`:
    /// `x = √3·r·(a + b/2)`, `y = (3r/2)·b`.
    ///
    /// Injective on lattice coordinates for any fixed `r > 0`.
    pub fn to_cartesian(self, r: f64) -> (f64, f64) {
        assert!(r > 0.0, "sensing radius must be positive, got {r}");
        let x = SQRT_3 * r * (self.a as f64 + self.b as f64 / 2.0);
        let y = 1.5 * r * self.b as f64;
        (x, y)
    }

    /// Euclidean distance from the origin for radius `r`, computed from the
    /// integer quadratic form: `√3·r·√(a² + ab + b²)`.
    pub fn cartesian_norm(self, r: f64) -> f64 {
        assert!(r > 0.0, "sensing radius must be positive, got {r}");
        SQRT_3 * r * (self.quadratic_form() as f64).sqrt()
    }

    /// `a² + ab + b²`, the squared Cartesian norm in units of `(√3·r)²`.
    pub fn quadratic_form(self) -> i64 {
        self.a * self.a + self.a * self.b + self.b * self.b
    }
}

impl Add for LatticeCoord {
    type Output = LatticeCoord;
    fn add(self, rhs: LatticeCoord) -> LatticeCoord {
        LatticeCoord::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for LatticeCoord {
    type Output = LatticeCoord;
    fn sub(self, rhs: LatticeCoord) -> LatticeCoord {
        LatticeCoord::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Mul<i64> for LatticeCoord {
    type Output = LatticeCoord;
    fn mul(self, k: i64) -> LatticeCoord {
        LatticeCoord::new(self.a * k, self.b * k)
    }
}

impl fmt::Display for LatticeCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction(0),
        Direction(1),
        Direction(2),
        Direction(3),
        Direction(4),
        Direction(5),
    ];

    /// Wraps `d` modulo 6.
    pub fn new(d: u8) -> Direction {
        Direction(d % 6)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Unit step of this direction as a coordinate.
    pub fn unit(self) -> LatticeCoord {
        let (a, b) = STEPS[self.0 as usize];
        LatticeCoord::new(a, b)
    }

    /// Rotation by +π/3 (counterclockwise).
    pub fn turned_left(self) -> Direction {
        Direction((self.0 + 1) % 6)
    }

    /// Angle against the positive x-axis, in radians.
    pub fn angle(self) -> f64 {
        self.0 as f64 * std::f64::consts::FRAC_PI_3
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::collections::{HashMap, VecDeque};

    #[test]
    fn basis_steps() {
        assert_eq!(LatticeCoord::ORIGIN.step(Direction::new(0)), LatticeCoord::new(1, 0));
        assert_eq!(LatticeCoord::ORIGIN.step(Direction::new(2)), LatticeCoord::new(-1, 1));
        assert_eq!(LatticeCoord::new(1, 1).step(Direction::new(4)), LatticeCoord::new(1, 0));
    }

    #[test]
    fn cartesian_examples() {
        assert_eq!(LatticeCoord::ORIGIN.to_cartesian(1.0), (0.0, 0.0));
        let (x, y) = LatticeCoord::new(1, 0).to_cartesian(1.0);
        assert_relative_eq!(x, SQRT_3, max_relative = 1e-15);
        assert_eq!(y, 0.0);
        // node 7's final vertex
        let (x, y) = LatticeCoord::new(-1, 2).to_cartesian(1.0);
        assert_relative_eq!(x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(y, 3.0, max_relative = 1e-15);
    }

    #[test]
    #[should_panic(expected = "positive")]
    fn cartesian_rejects_nonpositive_radius() {
        let _ = LatticeCoord::new(1, 0).to_cartesian(0.0);
    }

    #[test]
    fn ring_examples() {
        assert_eq!(LatticeCoord::ORIGIN.ring(), 0);
        assert_eq!(LatticeCoord::new(-1, 2).ring(), 2);
        assert_eq!(LatticeCoord::new(-2, 3).ring(), 3);
    }

    #[test]
    fn neighbors_of_origin_in_direction_order() {
        let n = LatticeCoord::ORIGIN.neighbors();
        let expected = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
        for (got, (a, b)) in n.iter().zip(expected) {
            assert_eq!(*got, LatticeCoord::new(a, b));
        }
        let n1 = LatticeCoord::new(1, 0).neighbors();
        assert!(n1.contains(&LatticeCoord::new(2, 0)));
        assert!(n1.contains(&LatticeCoord::ORIGIN));
    }

    /// Oracle: ring() must equal true BFS hop distance from the origin.
    #[test]
    fn ring_matches_bfs_distance() {
        let mut dist: HashMap<LatticeCoord, u64> = HashMap::new();
        let mut queue = VecDeque::new();
        dist.insert(LatticeCoord::ORIGIN, 0);
        queue.push_back(LatticeCoord::ORIGIN);
        while let Some(c) = queue.pop_front() {
            let d = dist[&c];
            if d == 7 {
                continue;
            }
            for nb in c.neighbors() {
                dist.entry(nb).or_insert_with(|| {
                    queue.push_back(nb);
                    d + 1
                });
            }
        }
        for (c, d) in &dist {
            if *d <= 6 {
                assert_eq!(c.ring(), *d, "ring mismatch at {c}");
            }
        }
    }

    #[test]
    fn norm_formula_matches_direct_cartesian() {
        for a in -20..=20i64 {
            for b in -20..=20i64 {
                let c = LatticeCoord::new(a, b);
                for r in [1.0, 0.5, 7.25] {
                    let (x, y) = if (a, b) == (0, 0) {
                        (0.0, 0.0)
                    } else {
                        c.to_cartesian(r)
                    };
                    let direct = (x * x + y * y).sqrt();
                    assert_relative_eq!(c.cartesian_norm(r), direct, max_relative = 1e-12);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn unit_step_has_cartesian_length_sqrt3_r(
            a in -1000i64..1000, b in -1000i64..1000, d in 0u8..6, r in 0.01f64..100.0,
        ) {
            let c = LatticeCoord::new(a, b);
            let n = c.step(Direction::new(d));
            let (x0, y0) = c.to_cartesian(r);
            let (x1, y1) = n.to_cartesian(r);
            let len = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
            prop_assert!((len - SQRT_3 * r).abs() <= 1e-12 * SQRT_3 * r);
        }

        #[test]
        fn step_is_invertible_and_symmetric(a in -1000i64..1000, b in -1000i64..1000, d in 0u8..6) {
            let c = LatticeCoord::new(a, b);
            let n = c.step(Direction::new(d));
            prop_assert!(n.neighbors().contains(&c));
            prop_assert_eq!(c.distance(n), 1);
        }

        #[test]
        fn ring_changes_by_at_most_one_per_step(a in -1000i64..1000, b in -1000i64..1000, d in 0u8..6) {
            let c = LatticeCoord::new(a, b);
            let n = c.step(Direction::new(d));
            let (r0, r1) = (c.ring() as i64, n.ring() as i64);
            prop_assert!((r0 - r1).abs() <= 1);
        }
    }
}
