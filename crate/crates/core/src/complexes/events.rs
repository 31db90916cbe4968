//! Locating the times at which a complex changes along a scenario.
//!
//! The time axis is sampled finely enough that no sensor moves more than a
//! small fraction of the radius per step; every simplex whose membership
//! differs between two consecutive samples is then bisected on its own
//! indicator to within the tolerance.

use super::{alpha_complex, alpha_edge_present, alpha_triangle_present, build_complex, cech_present, rotation_snapshot, vr_present};
use crate::error::{Error, Result};
use crate::model::{Point, Scenario};
use crate::simplex::{Simplex, SimplicialComplex};
use crate::stream::{AlphaEventKind, ComplexKind, EventBatch, EventOp, RotationSnapshot, SimplicialEventStream, TimeGrid};
use rayon::prelude::*;
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectOptions {
    /// Changes closer than this are treated as simultaneous.
    pub tol: f64,
    /// Truncation dimension for Čech and Rips complexes.
    pub max_dim: usize,
    /// Number of sampling steps; derived from sensor speeds when absent.
    pub steps: Option<usize>,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions { tol: 1e-9, max_dim: 3, steps: None }
    }
}

pub fn detect_events(s: &Scenario, kind: ComplexKind, tol: f64) -> Result<SimplicialEventStream> {
    detect_events_with(s, kind, &DetectOptions { tol, ..DetectOptions::default() })
}

struct Change {
    t: f64,
    simplex: Simplex,
    add: bool,
}

pub fn detect_events_with(s: &Scenario, kind: ComplexKind, opts: &DetectOptions) -> Result<SimplicialEventStream> {
    if !(opts.tol > 0.0 && opts.tol < 0.01) {
        return Err(Error::InvalidParameter(format!("tolerance {} must lie in (0, 0.01)", opts.tol)));
    }
    let r = s.sensor_radius;
    let steps = opts
        .steps
        .unwrap_or_else(|| ((200.0 * s.max_speed() / r).ceil() as usize).clamp(400, 200_000));
    let mut times: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
    times.extend(s.breakpoints());
    times.sort_by(f64::total_cmp);
    times.dedup();

    let build = |t: f64| build_complex(kind, &s.positions_unchecked(t), r, opts.max_dim);
    let complexes: Vec<SimplicialComplex> = times.par_iter().map(|&t| build(t)).collect::<Result<_>>()?;

    let mut changes = Vec::new();
    for k in 0..times.len() - 1 {
        let (a, b) = (&complexes[k], &complexes[k + 1]);
        for simplex in a.simplices().symmetric_difference(b.simplices()) {
            let was = a.contains(simplex);
            let t = bisect(s, kind, simplex, times[k], times[k + 1], was, opts.tol)?;
            changes.push(Change { t, simplex: simplex.clone(), add: !was });
        }
    }
    changes.sort_by(|x, y| x.t.total_cmp(&y.t).then_with(|| x.simplex.cmp(&y.simplex)));

    let mut batches: Vec<EventBatch> = Vec::new();
    let mut start = 0;
    while start < changes.len() {
        let mut end = start + 1;
        while end < changes.len() && changes[end].t - changes[start].t <= opts.tol {
            end += 1;
        }
        batches.extend(cluster_batches(&changes[start..end], kind)?);
        start = end;
    }

    let grid = TimeGrid::from_events(batches.iter().map(|b| b.t).collect())?;
    let initial = complexes[0].clone();

    let mut stream = SimplicialEventStream {
        kind,
        vertex_count: s.len(),
        labels: Some(s.sensors.iter().map(|x| x.id.clone()).collect()),
        fence: s.fence_indices(),
        grid,
        initial: initial.iter().cloned().collect(),
        initial_rotations: None,
        outer: None,
        events: batches,
    };

    // replay must reproduce the directly built complex at every sample time
    let slices = stream.slices()?;
    for (i, &t) in stream.grid.sample_times.iter().enumerate() {
        if build(t)? != slices[i] {
            return Err(Error::NonGenericEvent {
                t,
                message: "replayed complex differs from the constructed one; refine the sampling".into(),
            });
        }
    }

    if kind == ComplexKind::Alpha {
        attach_rotations(s, &mut stream)?;
    }
    Ok(stream)
}

fn present(s: &Scenario, kind: ComplexKind, simplex: &Simplex, t: f64) -> Result<bool> {
    let pts = s.positions_unchecked(t);
    let v = simplex.vertices();
    let r = s.sensor_radius;
    Ok(match (kind, v.len()) {
        (_, 1) => true,
        (ComplexKind::Cech, _) => cech_present(&pts, v, r),
        (ComplexKind::Vr, _) => vr_present(&pts, v, r),
        (ComplexKind::Alpha, 2) => alpha_edge_present(&pts, v[0], v[1], r),
        (ComplexKind::Alpha, 3) => {
            alpha_edge_present(&pts, v[0], v[1], r)
                && alpha_edge_present(&pts, v[0], v[2], r)
                && alpha_edge_present(&pts, v[1], v[2], r)
                && alpha_triangle_present(&pts, v[0], v[1], v[2], r)?
        }
        (ComplexKind::Alpha, _) => false,
    })
}

fn bisect(s: &Scenario, kind: ComplexKind, simplex: &Simplex, mut lo: f64, mut hi: f64, at_lo: bool, tol: f64) -> Result<f64> {
    while hi - lo > tol / 4.0 {
        let mid = 0.5 * (lo + hi);
        if present(s, kind, simplex, mid)? == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn mean_time(cs: &[&Change]) -> f64 {
    cs.iter().map(|c| c.t).sum::<f64>() / cs.len() as f64
}

/// Turns one cluster of near-simultaneous changes into batches.
fn cluster_batches(cluster: &[Change], kind: ComplexKind) -> Result<Vec<EventBatch>> {
    let t0 = cluster[0].t;
    let mut seen = BTreeSet::new();
    for c in cluster {
        if !seen.insert(&c.simplex) {
            return Err(Error::NonGenericEvent { t: t0, message: format!("{:?} enters and leaves together", c.simplex) });
        }
    }
    let adds: Vec<&Change> = cluster.iter().filter(|c| c.add).collect();
    let removes: Vec<&Change> = cluster.iter().filter(|c| !c.add).collect();

    if kind == ComplexKind::Alpha && !adds.is_empty() && !removes.is_empty() {
        let out: Vec<Simplex> = removes.iter().map(|c| c.simplex.clone()).collect();
        let inn: Vec<Simplex> = adds.iter().map(|c| c.simplex.clone()).collect();
        if is_flip_half(&out) && is_flip_half(&inn) {
            return Ok(vec![EventBatch {
                t: mean_time(&cluster.iter().collect::<Vec<_>>()),
                op: EventOp::Flip,
                simplices: sorted(out),
                added: sorted(inn),
                kind: Some(AlphaEventKind::Flip),
                rotations: None,
            }]);
        }
    }

    // split into runs of one operation in time order
    let mut runs: Vec<Vec<&Change>> = Vec::new();
    for c in cluster {
        match runs.last_mut() {
            Some(run) if run[0].add == c.add => run.push(c),
            _ => runs.push(vec![c]),
        }
    }
    if runs.len() > 2 {
        return Err(Error::NonGenericEvent { t: t0, message: "interleaved insertions and deletions".into() });
    }
    let mut out = Vec::new();
    for run in runs {
        let simplices = sorted(run.iter().map(|c| c.simplex.clone()).collect());
        let op = if run[0].add { EventOp::Add } else { EventOp::Remove };
        let kind_tag = if kind == ComplexKind::Alpha { Some(classify(&simplices, t0)?) } else { None };
        out.push(EventBatch { t: mean_time(&run), op, simplices, added: vec![], kind: kind_tag, rotations: None });
    }
    if out.len() == 2 && out[0].t >= out[1].t {
        return Err(Error::NonGenericEvent { t: t0, message: "simultaneous insertion and deletion".into() });
    }
    Ok(out)
}

fn sorted(mut v: Vec<Simplex>) -> Vec<Simplex> {
    v.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
    v
}

/// An edge together with the two triangles on it.
fn is_flip_half(s: &[Simplex]) -> bool {
    let edges: Vec<&Simplex> = s.iter().filter(|x| x.dim() == 1).collect();
    let tris: Vec<&Simplex> = s.iter().filter(|x| x.dim() == 2).collect();
    s.len() == 3 && edges.len() == 1 && tris.len() == 2 && tris.iter().all(|t| edges[0].is_face_of(t))
}

fn classify(simplices: &[Simplex], t: f64) -> Result<AlphaEventKind> {
    let dims: Vec<usize> = simplices.iter().map(Simplex::dim).collect();
    match dims.as_slice() {
        [1] => Ok(AlphaEventKind::Edge),
        [2] => Ok(AlphaEventKind::Triangle),
        [1, 2] if simplices[0].is_face_of(&simplices[1]) => Ok(AlphaEventKind::FreePair),
        _ => Err(Error::NonGenericEvent {
            t,
            message: format!("composite alpha event {simplices:?} is none of the four elementary kinds"),
        }),
    }
}

fn attach_rotations(s: &Scenario, stream: &mut SimplicialEventStream) -> Result<()> {
    let r = s.sensor_radius;
    let snap = |t: f64| -> Result<(Vec<Point>, RotationSnapshot)> {
        let pts = s.positions_unchecked(t);
        let (k, _) = alpha_complex(&pts, r)?;
        let rot = rotation_snapshot(&pts, &k.edges());
        Ok((pts, rot))
    };
    let (pts0, mut prev) = snap(0.0)?;
    stream.outer = crate::rotation::outer_cycle_from_geometry(&pts0, &prev);
    stream.initial_rotations = Some(prev.clone());
    for i in 0..stream.n() {
        let (_, next) = snap(stream.grid.sample_times[i + 1])?;
        let mut changed = RotationSnapshot::new();
        for v in prev.keys().chain(next.keys()) {
            let after = next.get(v).cloned().unwrap_or_default();
            if prev.get(v) != Some(&after) {
                changed.insert(*v, after);
            }
        }
        stream.events[i].rotations = Some(changed);
        prev = next;
    }
    Ok(())
}
