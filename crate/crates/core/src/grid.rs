//! Geometry of the infinite `k`-star and the grid living over it.
//!
//! The star is `k` half-lines glued at a common origin; dual coordinates for a
//! node are a point on the star plus a height. All coordinates are kept exact
//! as doubled integers (`radius2 = 2 * radius`, `y2 = 2 * height`), so that
//! half-integral points are ordinary integers and no floating point appears
//! anywhere. Grid points are those whose two coordinates are both integral or
//! both proper half-integral; they carry a partial order of height two
//! (even < non-integral < odd) that drives discrete midpoint rounding and the
//! neighborhood structure of the descent algorithm.

use alloc::vec::Vec;

/// A point of the infinite `k`-star, stored as a doubled radius.
///
/// Branches are indexed `0..k` by terminal. The origin is canonical: a zero
/// radius always has `branch == None`, so equality is structural.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StarPoint {
    branch: Option<usize>,
    radius2: i64,
}

impl StarPoint {
    pub fn new(branch: Option<usize>, radius2: i64) -> Self {
        assert!(radius2 >= 0, "negative radius");
        let branch = if radius2 == 0 { None } else { branch };
        assert!(
            radius2 == 0 || branch.is_some(),
            "nonzero radius requires a branch"
        );
        StarPoint { branch, radius2 }
    }

    pub fn origin() -> Self {
        StarPoint {
            branch: None,
            radius2: 0,
        }
    }

    pub fn on_branch(branch: usize, radius2: i64) -> Self {
        Self::new(Some(branch), radius2)
    }

    pub fn branch(&self) -> Option<usize> {
        self.branch
    }

    pub fn radius2(&self) -> i64 {
        self.radius2
    }

    pub fn is_origin(&self) -> bool {
        self.radius2 == 0
    }
}

/// Doubled star distance: `2 * dist(a, b)`.
pub fn star_dist2(a: StarPoint, b: StarPoint) -> i64 {
    if a.branch == b.branch || a.is_origin() || b.is_origin() {
        (a.radius2 - b.radius2).abs()
    } else {
        a.radius2 + b.radius2
    }
}

/// A grid point: star coordinate plus doubled height (`y2` may be negative).
///
/// Membership in the grid requires `radius2 = y2 (mod 2)`: both coordinates
/// integral or both proper half-integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridPoint {
    pub x: StarPoint,
    pub y2: i64,
}

impl GridPoint {
    pub fn new(x: StarPoint, y2: i64) -> Self {
        assert!(
            (x.radius2 - y2) % 2 == 0,
            "not a grid point: radius2={} y2={}",
            x.radius2,
            y2
        );
        GridPoint { x, y2 }
    }

    pub fn origin(y2: i64) -> Self {
        Self::new(StarPoint::origin(), y2)
    }

    pub fn on_branch(branch: usize, radius2: i64, y2: i64) -> Self {
        Self::new(StarPoint::on_branch(branch, radius2), y2)
    }

    pub fn is_integral(&self) -> bool {
        self.x.radius2 % 2 == 0
    }
}

/// Doubled norm `2 * (dist(x, x') + |y - y'|)`.
pub fn grid_norm2(p: GridPoint, q: GridPoint) -> i64 {
    star_dist2(p.x, q.x) + (p.y2 - q.y2).abs()
}

/// Doubled l-infinity distance between coordinate vectors.
pub fn vec_norm2(p: &[GridPoint], q: &[GridPoint]) -> i64 {
    assert_eq!(p.len(), q.len(), "vector length mismatch");
    p.iter()
        .zip(q)
        .map(|(a, b)| grid_norm2(*a, *b))
        .max()
        .unwrap_or(0)
}

/// Doubled slack `2 * (dist(x, x') - y - y')`.
pub fn pi2(u: GridPoint, v: GridPoint) -> i64 {
    star_dist2(u.x, v.x) - u.y2 - v.y2
}

/// Parity class of a grid point.
///
/// Integral points are `Even`/`Odd` by the parity of `|x - y|`. A
/// non-integral point is classified by the parity of the integral point
/// reached by the half-step toward the origin and up: `NonIntEven` if that
/// point is even, `NonIntOdd` if odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    NonIntEven,
    NonIntOdd,
}

impl Parity {
    /// Level in the order: even points are minimal, odd points maximal.
    pub fn level(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::NonIntEven | Parity::NonIntOdd => 1,
            Parity::Odd => 2,
        }
    }

    pub fn is_integral(self) -> bool {
        matches!(self, Parity::Even | Parity::Odd)
    }
}

pub fn parity(p: GridPoint) -> Parity {
    let diff = (p.x.radius2 - p.y2).rem_euclid(4);
    if p.is_integral() {
        if diff == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    } else if diff == 2 {
        // shift by (-1/2, +1/2) lands on an even point
        Parity::NonIntEven
    } else {
        Parity::NonIntOdd
    }
}

/// The grid partial order. Covering steps join adjacent points (norm one,
/// exactly one integral) with the lower end even or the upper end odd, which
/// collapses to: `p` is below `q` iff they are equal, or they are at norm one
/// with the parity level of `p` strictly below that of `q`.
pub fn leq(p: GridPoint, q: GridPoint) -> bool {
    p == q || (grid_norm2(p, q) == 2 && parity(p).level() < parity(q).level())
}

/// All grid points within doubled norm `bound2` of `p`, in a `k`-branch star.
pub fn points_within(p: GridPoint, bound2: i64, k: usize) -> Vec<GridPoint> {
    let mut out = Vec::new();
    let mut branches: Vec<Option<usize>> = Vec::new();
    branches.push(None);
    if p.x.radius2 > bound2 {
        branches.push(p.x.branch);
    } else {
        for b in 0..k {
            branches.push(Some(b));
        }
    }
    for &b in &branches {
        for r2 in 0..=(p.x.radius2 + bound2) {
            if b.is_none() && r2 > 0 {
                continue;
            }
            if b.is_some() && r2 == 0 {
                continue;
            }
            let x = StarPoint::new(b, r2);
            let dx = star_dist2(p.x, x);
            if dx > bound2 {
                continue;
            }
            let rem = bound2 - dx;
            for y2 in (p.y2 - rem)..=(p.y2 + rem) {
                if (r2 - y2) % 2 != 0 {
                    continue;
                }
                out.push(GridPoint::new(x, y2));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// All grid points above `p` in the order (finite; `{p}` when `p` is odd).
pub fn up_set(p: GridPoint, k: usize) -> Vec<GridPoint> {
    points_within(p, 2, k)
        .into_iter()
        .filter(|&q| leq(p, q))
        .collect()
}

/// All grid points below `p` in the order.
pub fn down_set(p: GridPoint, k: usize) -> Vec<GridPoint> {
    points_within(p, 2, k)
        .into_iter()
        .filter(|&q| leq(q, p))
        .collect()
}

/// A point of the ambient space in quadrupled coordinates, used transiently
/// for exact midpoints of grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadPoint {
    pub branch: Option<usize>,
    pub radius4: i64,
    pub y4: i64,
}

fn quad_mid_x(a: StarPoint, b: StarPoint) -> (Option<usize>, i64) {
    let (branch, radius4) = if a.branch == b.branch || a.is_origin() || b.is_origin() {
        let br = if a.is_origin() { b.branch } else { a.branch };
        (br, a.radius2 + b.radius2)
    } else if a.radius2 >= b.radius2 {
        (a.branch, a.radius2 - b.radius2)
    } else {
        (b.branch, b.radius2 - a.radius2)
    };
    if radius4 == 0 {
        (None, 0)
    } else {
        (branch, radius4)
    }
}

/// Exact midpoint of two grid points, in quadrupled coordinates.
pub fn quad_midpoint(p: GridPoint, q: GridPoint) -> QuadPoint {
    let (branch, radius4) = quad_mid_x(p.x, q.x);
    QuadPoint {
        branch,
        radius4,
        y4: p.y2 + q.y2,
    }
}

fn quad_dist_x(branch: Option<usize>, radius4: i64, x: StarPoint) -> i64 {
    let xr4 = 2 * x.radius2;
    if branch == x.branch || radius4 == 0 || x.is_origin() {
        (radius4 - xr4).abs()
    } else {
        radius4 + xr4
    }
}

/// Discrete midpoint rounding: the unique pair `(low, high)` of grid points
/// with `low` below `high` whose midpoint is the exact midpoint of `p, q`.
/// When the midpoint is itself a grid point both components equal it; when it
/// is the midpoint of a grid edge they are its endpoints; when it is the
/// center of a unit square they are the even and odd corners.
pub fn round_mid(p: GridPoint, q: GridPoint, k: usize) -> (GridPoint, GridPoint) {
    let w = quad_midpoint(p, q);
    if w.radius4 % 2 == 0 && w.y4 % 2 == 0 && (w.radius4 - w.y4).rem_euclid(4) == 0 {
        let g = GridPoint::new(StarPoint::new(w.branch, w.radius4 / 2), w.y4 / 2);
        return (g, g);
    }
    // Candidates are grid points within quadrupled distance 2 of the midpoint.
    let mut cands: Vec<GridPoint> = Vec::new();
    let mut branches: Vec<Option<usize>> = Vec::new();
    branches.push(None);
    if w.radius4 > 2 {
        branches.push(w.branch);
    } else {
        for b in 0..k {
            branches.push(Some(b));
        }
    }
    for &b in &branches {
        let lo = if b == w.branch { (w.radius4 - 2) / 2 } else { 0 };
        for r2 in lo.max(0)..=(w.radius4 + 2) / 2 {
            if (b.is_none()) != (r2 == 0) {
                continue;
            }
            let x = StarPoint::new(b, r2);
            let dx = quad_dist_x(w.branch, w.radius4, x);
            if dx > 2 {
                continue;
            }
            let rem = 2 - dx;
            // y4 of a candidate is 2 * y2; keep |2*y2 - w.y4| <= rem
            let ylo = (w.y4 - rem).div_euclid(2);
            let yhi = (w.y4 + rem).div_euclid(2);
            for y2 in ylo..=yhi {
                if (2 * y2 - w.y4).abs() > rem || (r2 - y2) % 2 != 0 {
                    continue;
                }
                cands.push(GridPoint::new(x, y2));
            }
        }
    }
    cands.sort();
    cands.dedup();
    let mut found: Option<(GridPoint, GridPoint)> = None;
    for &u in &cands {
        for &v in &cands {
            if leq(u, v) && quad_midpoint(u, v) == w {
                assert!(
                    found.is_none() || found == Some((u, v)),
                    "discrete midpoint is not unique for {p:?}, {q:?}"
                );
                found = Some((u, v));
            }
        }
    }
    found.unwrap_or_else(|| panic!("no discrete midpoint for {p:?}, {q:?}"))
}
