//! Small planar predicates: enclosing balls, circumcircles, orientation.

use crate::model::Point;

pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Twice the signed area of `abc`; positive when counter-clockwise.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Circumcentre and circumradius, or `None` for (near-)collinear points.
pub fn circumcircle(a: Point, b: Point, c: Point) -> Option<(Point, f64)> {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    let scale = (bx * bx + by * by).max(cx * cx + cy * cy);
    if d.abs() <= 1e-14 * scale {
        return None;
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    Some(([a[0] + ux, a[1] + uy], ux.hypot(uy)))
}

/// A disc given by centre and radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    fn contains(&self, p: Point) -> bool {
        dist(self.center, p) <= self.radius * (1.0 + 1e-12) + 1e-15
    }

    fn from_two(a: Point, b: Point) -> Ball {
        Ball { center: [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])], radius: 0.5 * dist(a, b) }
    }

    fn from_three(a: Point, b: Point, c: Point) -> Ball {
        match circumcircle(a, b, c) {
            Some((center, radius)) => Ball { center, radius },
            // collinear: the farthest pair spans the ball
            None => [Ball::from_two(a, b), Ball::from_two(a, c), Ball::from_two(b, c)]
                .into_iter()
                .max_by(|x, y| x.radius.total_cmp(&y.radius))
                .unwrap(),
        }
    }
}

/// Smallest enclosing disc by Welzl's move-to-front recursion.
pub fn min_enclosing_ball(points: &[Point]) -> Ball {
    fn welzl(p: &[Point], boundary: &mut Vec<Point>) -> Ball {
        if p.is_empty() || boundary.len() == 3 {
            return match boundary.len() {
                0 => Ball { center: [0.0, 0.0], radius: 0.0 },
                1 => Ball { center: boundary[0], radius: 0.0 },
                2 => Ball::from_two(boundary[0], boundary[1]),
                _ => Ball::from_three(boundary[0], boundary[1], boundary[2]),
            };
        }
        let (q, rest) = p.split_last().unwrap();
        let ball = welzl(rest, boundary);
        if ball.contains(*q) {
            return ball;
        }
        boundary.push(*q);
        let ball = welzl(rest, boundary);
        boundary.pop();
        ball
    }
    welzl(points, &mut Vec::with_capacity(3))
}

/// Brute-force smallest enclosing disc over all pair and triple candidates.
pub fn min_enclosing_ball_brute(points: &[Point]) -> Ball {
    let n = points.len();
    if n == 0 {
        return Ball { center: [0.0, 0.0], radius: 0.0 };
    }
    if n == 1 {
        return Ball { center: points[0], radius: 0.0 };
    }
    let mut best: Option<Ball> = None;
    let mut consider = |b: Ball| {
        if points.iter().all(|&p| b.contains(p)) && best.is_none_or(|x| b.radius < x.radius) {
            best = Some(b);
        }
    };
    for i in 0..n {
        for j in i + 1..n {
            consider(Ball::from_two(points[i], points[j]));
            for k in j + 1..n {
                if let Some((center, radius)) = circumcircle(points[i], points[j], points[k]) {
                    consider(Ball { center, radius });
                }
            }
        }
    }
    best.expect("the diametral disc of the farthest pair encloses everything")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equilateral_circumradius() {
        let h = 3f64.sqrt();
        let b = min_enclosing_ball(&[[0.0, 0.0], [2.0, 0.0], [1.0, h]]);
        assert!((b.radius - 2.0 / h).abs() < 1e-12);
    }

    #[test]
    fn obtuse_uses_diameter() {
        let b = min_enclosing_ball(&[[0.0, 0.0], [4.0, 0.0], [2.0, 0.5]]);
        assert!((b.radius - 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn welzl_matches_brute_force(pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..6)) {
            let pts: Vec<Point> = pts.into_iter().map(|(x, y)| [x, y]).collect();
            let a = min_enclosing_ball(&pts);
            let b = min_enclosing_ball_brute(&pts);
            prop_assert!((a.radius - b.radius).abs() <= 1e-9 * (1.0 + b.radius));
        }
    }
}
