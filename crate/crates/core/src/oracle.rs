//! Geometric ground truth for evasion.
//!
//! Space is cut into square cells of side `h` and time into uniform slices.
//! A cell is covered when its centre lies within the sensing radius of some
//! sensor. Since an intruder may move arbitrarily fast, each uncovered
//! component of a slice is traversable in zero time; two components of
//! consecutive slices are linked when they share a cell. Evasion is possible
//! on the grid iff a chain of linked components runs from the first slice to
//! the last.

use crate::error::{Error, Result};
use crate::geometry::dist;
use crate::model::{Point, Scenario};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleVerdict {
    Evasion,
    NoEvasion,
}

/// Spatial and temporal discretisation of a scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacetimeGrid {
    pub h: f64,
    pub dt: f64,
    pub origin: Point,
    pub nx: usize,
    pub ny: usize,
    pub times: Vec<f64>,
    inside: Vec<bool>,
}

/// Occupancy and uncovered components at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct Slice {
    pub t: f64,
    pub covered: Vec<bool>,
    /// Component of each uncovered cell inside the domain; `u32::MAX` elsewhere.
    pub labels: Vec<u32>,
    pub components: usize,
}

impl SpacetimeGrid {
    pub fn new(s: &Scenario, h: f64, dt: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid parameters h = {h}, dt = {dt} must be positive")));
        }
        let [x0, y0, x1, y1] = s.domain.bounding_box();
        let nx = ((x1 - x0) / h).ceil().max(1.0) as usize;
        let ny = ((y1 - y0) / h).ceil().max(1.0) as usize;
        if nx.saturating_mul(ny) > 50_000_000 {
            return Err(Error::InvalidParameter(format!("{nx} x {ny} cells is too fine a grid")));
        }
        let steps = ((1.0 / dt) - 1e-9).ceil().max(1.0) as usize;
        let times = (0..=steps).map(|k| k as f64 / steps as f64).collect();
        let mut grid = SpacetimeGrid { h, dt: 1.0 / steps as f64, origin: [x0, y0], nx, ny, times, inside: vec![] };
        grid.inside = (0..nx * ny).map(|c| s.domain.contains(grid.center(c))).collect();
        Ok(grid)
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn center(&self, cell: usize) -> Point {
        let (i, j) = (cell % self.nx, cell / self.nx);
        [self.origin[0] + (i as f64 + 0.5) * self.h, self.origin[1] + (j as f64 + 0.5) * self.h]
    }

    pub fn slice(&self, s: &Scenario, k: usize) -> Slice {
        let t = self.times[k];
        let covered = self.occupancy(&s.positions_unchecked(t), s.sensor_radius);
        let (labels, components) = self.label(&covered);
        Slice { t, covered, labels, components }
    }

    fn occupancy(&self, pts: &[Point], r: f64) -> Vec<bool> {
        let mut covered = vec![false; self.cells()];
        let index = |x: f64, o: f64, n: usize| (((x - o) / self.h).floor().max(0.0) as usize).min(n - 1);
        for &p in pts {
            let (i0, i1) = (index(p[0] - r, self.origin[0], self.nx), index(p[0] + r, self.origin[0], self.nx));
            let (j0, j1) = (index(p[1] - r, self.origin[1], self.ny), index(p[1] + r, self.origin[1], self.ny));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let c = j * self.nx + i;
                    if !covered[c] && dist(self.center(c), p) <= r {
                        covered[c] = true;
                    }
                }
            }
        }
        covered
    }

    fn label(&self, covered: &[bool]) -> (Vec<u32>, usize) {
        let mut labels = vec![NONE; self.cells()];
        let mut next = 0u32;
        let mut queue = VecDeque::new();
        for start in 0..self.cells() {
            if covered[start] || !self.inside[start] || labels[start] != NONE {
                continue;
            }
            labels[start] = next;
            queue.push_back(start);
            while let Some(c) = queue.pop_front() {
                let (i, j) = (c % self.nx, c / self.nx);
                let mut visit = |d: usize| {
                    if !covered[d] && self.inside[d] && labels[d] == NONE {
                        labels[d] = next;
                        queue.push_back(d);
                    }
                };
                if i > 0 {
                    visit(c - 1);
                }
                if i + 1 < self.nx {
                    visit(c + 1);
                }
                if j > 0 {
                    visit(c - self.nx);
                }
                if j + 1 < self.ny {
                    visit(c + self.nx);
                }
            }
            next += 1;
        }
        (labels, next as usize)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub verdict: OracleVerdict,
    /// Polyline `[t, x, y]` avoiding the covered region at every sampled time.
    pub witness: Option<Vec<[f64; 3]>>,
    pub h: f64,
    pub dt: f64,
    pub slices: usize,
    pub warnings: Vec<String>,
}

/// Cell size `r/20` and a time step keeping per-step displacement below `h/2`.
pub fn default_resolution(s: &Scenario) -> (f64, f64) {
    let h = s.sensor_radius / 20.0;
    let v = s.max_speed();
    let dt = if v > 0.0 { (h / (2.0 * v)).min(1.0) } else { 1.0 };
    (h, dt)
}

pub fn evasion_oracle(s: &Scenario, h: f64, dt: f64) -> Result<OracleResult> {
    let grid = SpacetimeGrid::new(s, h, dt)?;
    let mut warnings = Vec::new();
    let step = s.max_speed() * grid.dt;
    if step > h {
        warnings.push(format!("undersampled: sensors move up to {step:.3e} per step, more than the cell size {h:.3e}"));
    }

    let n = grid.times.len();
    let chunk = (4 * rayon::current_num_threads()).max(8);
    // parent[k][c] = (component in slice k-1, shared cell)
    let mut parent: Vec<Vec<Option<(u32, usize)>>> = Vec::with_capacity(n);
    let mut prev: Option<(Slice, Vec<bool>)> = None;
    let mut k = 0;
    while k < n {
        let end = (k + chunk).min(n);
        let slices: Vec<Slice> = (k..end).into_par_iter().map(|i| grid.slice(s, i)).collect();
        for slice in slices {
            let (reach, links) = match &prev {
                None => (vec![true; slice.components], vec![None; slice.components]),
                Some((p, preach)) => {
                    let mut links = vec![None; slice.components];
                    for c in 0..grid.cells() {
                        let (a, b) = (p.labels[c], slice.labels[c]);
                        if a != NONE && b != NONE && preach[a as usize] && links[b as usize].is_none() {
                            links[b as usize] = Some((a, c));
                        }
                    }
                    (links.iter().map(Option::is_some).collect(), links)
                }
            };
            parent.push(links);
            prev = Some((slice, reach));
        }
        k = end;
        if prev.as_ref().is_some_and(|(_, r)| !r.contains(&true)) {
            break;
        }
    }

    let (last, reach) = prev.expect("at least two slices");
    let reached = parent.len() == n && reach.contains(&true);
    let witness = if reached {
        let end = reach.iter().position(|&x| x).unwrap() as u32;
        let mut w = vec![];
        if n == 1 {
            let cell = last.labels.iter().position(|&l| l == end).unwrap();
            let p = grid.center(cell);
            w.push([grid.times[0], p[0], p[1]]);
        }
        let mut comp = end;
        for k in (1..n).rev() {
            let (pc, cell) = parent[k][comp as usize].expect("reachable components have a parent");
            let p = grid.center(cell);
            w.push([grid.times[k], p[0], p[1]]);
            w.push([grid.times[k - 1], p[0], p[1]]);
            comp = pc;
        }
        w.reverse();
        verify_witness(s, &w)?;
        Some(w)
    } else {
        None
    };
    Ok(OracleResult {
        verdict: if reached { OracleVerdict::Evasion } else { OracleVerdict::NoEvasion },
        witness,
        h,
        dt: grid.dt,
        slices: n,
        warnings,
    })
}

/// Checks a witness against exact sensor positions and the domain.
pub fn verify_witness(s: &Scenario, w: &[[f64; 3]]) -> Result<()> {
    for &[t, x, y] in w {
        if !s.domain.contains([x, y]) {
            return Err(Error::InvalidParameter(format!("witness point ({x}, {y}) at t = {t} leaves the domain")));
        }
        if let Some(p) = s.positions(t)?.into_iter().find(|&p| dist(p, [x, y]) <= s.sensor_radius) {
            return Err(Error::InvalidParameter(format!("witness point ({x}, {y}) at t = {t} is seen by a sensor at {p:?}")));
        }
    }
    Ok(())
}

/// Halves `h` and `dt` until two successive verdicts agree.
pub fn refine_until_stable(s: &Scenario, h0: f64, dt0: f64, max_halvings: u32) -> Result<OracleResult> {
    let mut prev = evasion_oracle(s, h0, dt0)?;
    for k in 1..=max_halvings {
        let scale = 0.5f64.powi(k as i32);
        let next = evasion_oracle(s, h0 * scale, dt0 * scale)?;
        if next.verdict == prev.verdict {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence { halvings: max_halvings })
}
