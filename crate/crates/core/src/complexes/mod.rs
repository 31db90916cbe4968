//! Čech, Vietoris–Rips and alpha complexes of a planar point set.

mod events;

pub use events::{detect_events, detect_events_with, DetectOptions};

use crate::error::{Error, Result};
use crate::geometry::{circumcircle, dist, min_enclosing_ball};
use crate::model::Point;
use crate::simplex::{Simplex, SimplicialComplex};
use crate::stream::{ComplexKind, RotationSnapshot};

/// Slack on radius comparisons, so that touching balls intersect.
pub const RADIUS_SLACK: f64 = 1e-12;

fn check_distinct(points: &[Point]) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(Error::CoincidentPoints(i, j));
            }
        }
    }
    Ok(())
}

/// Simplices of dimension `≤ max_dim` whose vertex sets are cliques of
/// `adjacent` and pass `keep`.
fn clique_complex(
    n: usize,
    max_dim: usize,
    adjacent: impl Fn(usize, usize) -> bool,
    keep: impl Fn(&[usize]) -> bool,
) -> SimplicialComplex {
    let nbrs: Vec<Vec<usize>> = (0..n).map(|i| (i + 1..n).filter(|&j| adjacent(i, j)).collect()).collect();
    let mut out = SimplicialComplex::new();
    let mut stack: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    while let Some(s) = stack.pop() {
        if !keep(&s) {
            continue;
        }
        if s.len() <= max_dim {
            let last = *s.last().unwrap();
            for &j in &nbrs[last] {
                if s.iter().all(|&v| adjacent(v, j)) {
                    let mut t = s.clone();
                    t.push(j);
                    stack.push(t);
                }
            }
        }
        out.insert(Simplex::new(s).expect("clique vertices are distinct"));
    }
    out
}

/// Whether the balls of radius `r` around the points share a common point.
pub fn cech_present(points: &[Point], vertices: &[usize], r: f64) -> bool {
    let pts: Vec<Point> = vertices.iter().map(|&v| points[v]).collect();
    min_enclosing_ball(&pts).radius <= r + RADIUS_SLACK
}

pub fn vr_present(points: &[Point], vertices: &[usize], eps: f64) -> bool {
    vertices
        .iter()
        .enumerate()
        .all(|(k, &a)| vertices[k + 1..].iter().all(|&b| dist(points[a], points[b]) <= 2.0 * eps + RADIUS_SLACK))
}

/// Nerve of the closed radius-`r` balls, truncated at `max_dim`.
pub fn cech_complex(points: &[Point], r: f64, max_dim: usize) -> Result<SimplicialComplex> {
    check_distinct(points)?;
    Ok(clique_complex(
        points.len(),
        max_dim,
        |a, b| dist(points[a], points[b]) <= 2.0 * r + RADIUS_SLACK,
        |s| s.len() < 3 || cech_present(points, s, r),
    ))
}

/// Simplices of diameter at most `2 eps`, truncated at `max_dim`.
pub fn vietoris_rips(points: &[Point], eps: f64, max_dim: usize) -> Result<SimplicialComplex> {
    check_distinct(points)?;
    Ok(clique_complex(
        points.len(),
        max_dim,
        |a, b| dist(points[a], points[b]) <= 2.0 * eps + RADIUS_SLACK,
        |_| true,
    ))
}

/// Whether the Voronoi edge between `a` and `b` meets both radius-`r` balls.
///
/// The bisector is parametrised by signed distance `s` from the midpoint; every
/// other point cuts it to a half-line and the ball cuts it to `|s| ≤ √(r² − h²)`.
pub fn alpha_edge_present(points: &[Point], a: usize, b: usize, r: f64) -> bool {
    let (pa, pb) = (points[a], points[b]);
    let h = 0.5 * dist(pa, pb);
    if h > r + RADIUS_SLACK {
        return false;
    }
    let half = (r * r - h * h).max(0.0).sqrt();
    let m = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
    let n = [-(pb[1] - pa[1]) / (2.0 * h), (pb[0] - pa[0]) / (2.0 * h)];
    let (mut lo, mut hi) = (-half, half);
    for (k, &pc) in points.iter().enumerate() {
        if k == a || k == b {
            continue;
        }
        // |x − a|² ≤ |x − c|² with x = m + s n is linear in s: coef * s ≤ rhs
        let d = [pc[0] - pa[0], pc[1] - pa[1]];
        let coef = 2.0 * (d[0] * n[0] + d[1] * n[1]);
        let rhs = (pc[0] * pc[0] + pc[1] * pc[1]) - (pa[0] * pa[0] + pa[1] * pa[1]) - 2.0 * (d[0] * m[0] + d[1] * m[1]);
        let scale = d[0].abs() + d[1].abs() + 1.0;
        if coef.abs() <= 1e-15 * scale {
            if rhs < 0.0 {
                return false;
            }
        } else if coef > 0.0 {
            hi = hi.min(rhs / coef);
        } else {
            lo = lo.max(rhs / coef);
        }
        if lo > hi + RADIUS_SLACK {
            return false;
        }
    }
    lo <= hi + RADIUS_SLACK
}

/// Whether `abc` is a Delaunay triangle whose circumradius is at most `r`.
///
/// Fails when another point lies on the circumcircle of a small triangle,
/// since the Delaunay triangulation is then not unique.
pub fn alpha_triangle_present(points: &[Point], a: usize, b: usize, c: usize, r: f64) -> Result<bool> {
    let Some((center, radius)) = circumcircle(points[a], points[b], points[c]) else {
        return Ok(false);
    };
    if radius > r + RADIUS_SLACK {
        return Ok(false);
    }
    for (k, &p) in points.iter().enumerate() {
        if k == a || k == b || k == c {
            continue;
        }
        let d = dist(center, p);
        if (d - radius).abs() <= 1e-12 * radius.max(1.0) {
            return Err(Error::Degenerate(format!("points {a}, {b}, {c}, {k} are cocircular")));
        }
        if d < radius {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The alpha complex at radius `r` and the clockwise neighbour order at each vertex.
pub fn alpha_complex(points: &[Point], r: f64) -> Result<(SimplicialComplex, RotationSnapshot)> {
    check_distinct(points)?;
    let n = points.len();
    let mut k = SimplicialComplex::closure((0..n).map(Simplex::vertex));
    for a in 0..n {
        for b in a + 1..n {
            if alpha_edge_present(points, a, b, r) {
                k.insert(Simplex::edge(a, b));
            }
        }
    }
    let edges: Vec<(usize, usize)> = k.edges();
    let has = |a: usize, b: usize| edges.binary_search(&(a.min(b), a.max(b))).is_ok();
    for &(a, b) in &edges {
        for c in b + 1..n {
            if has(a, c) && has(b, c) && alpha_triangle_present(points, a, b, c, r)? {
                k.insert(Simplex::triangle(a, b, c));
            }
        }
    }
    let rot = rotation_snapshot(points, &edges);
    Ok((k, rot))
}

/// Clockwise order of neighbours, each list starting at its smallest vertex.
pub fn rotation_snapshot(points: &[Point], edges: &[(usize, usize)]) -> RotationSnapshot {
    let mut rot = RotationSnapshot::new();
    for &(a, b) in edges {
        rot.entry(a).or_default().push(b);
        rot.entry(b).or_default().push(a);
    }
    for (&v, nbrs) in rot.iter_mut() {
        let angle = |u: usize| (points[u][1] - points[v][1]).atan2(points[u][0] - points[v][0]);
        nbrs.sort_by(|&x, &y| angle(y).total_cmp(&angle(x)));
        let start = nbrs.iter().enumerate().min_by_key(|&(_, &u)| u).map(|(i, _)| i).unwrap_or(0);
        nbrs.rotate_left(start);
    }
    rot
}

/// The complex of the given kind; `max_dim` is ignored for alpha complexes.
pub fn build_complex(kind: ComplexKind, points: &[Point], r: f64, max_dim: usize) -> Result<SimplicialComplex> {
    match kind {
        ComplexKind::Cech => cech_complex(points, r, max_dim),
        ComplexKind::Vr => vietoris_rips(points, r, max_dim),
        ComplexKind::Alpha => alpha_complex(points, r).map(|(k, _)| k),
    }
}

/// Whether two closed segments cross at a point interior to at least one of them.
pub fn segments_cross(p: Point, q: Point, a: Point, b: Point) -> bool {
    if p == a || p == b || q == a || q == b {
        return false;
    }
    let d1 = crate::geometry::orient(p, q, a);
    let d2 = crate::geometry::orient(p, q, b);
    let d3 = crate::geometry::orient(a, b, p);
    let d4 = crate::geometry::orient(a, b, q);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}
