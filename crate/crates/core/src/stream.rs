//! Time-varying simplicial complexes in combinatorial form.
//!
//! A [`SimplicialEventStream`] is the input to every criterion: the complex at
//! `s_0 = 0` plus one batch of simplex insertions or deletions at each event
//! time. Its JSON form doubles as the exchange format for connectivity data
//! that comes without geometry.

use crate::error::{Error, Result};
use crate::simplex::{Simplex, SimplicialComplex};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Event times `t_1 < … < t_n` in `(0, 1)` and interleaved sample times
/// `0 = s_0 < t_1 < s_1 < … < t_n < s_n = 1`; a stream without events has
/// the single sample `s_0 = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub event_times: Vec<f64>,
    pub sample_times: Vec<f64>,
}

impl TimeGrid {
    /// Samples at the midpoints between consecutive events.
    pub fn from_events(event_times: Vec<f64>) -> Result<Self> {
        let mut sample_times = vec![0.0];
        for (i, &t) in event_times.iter().enumerate() {
            let next = event_times.get(i + 1).copied().unwrap_or(1.0);
            sample_times.push(if i + 1 == event_times.len() { 1.0 } else { 0.5 * (t + next) });
        }
        let g = TimeGrid { event_times, sample_times };
        g.validate()?;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.event_times.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.event_times.len();
        if self.sample_times.len() != n + 1 {
            return Err(Error::InvalidStream(format!(
                "{} sample times for {n} events",
                self.sample_times.len()
            )));
        }
        // with no events the single sample is s_0 = 0
        if self.sample_times[0] != 0.0 || (n > 0 && self.sample_times[n] != 1.0) {
            return Err(Error::InvalidStream("sample times must start at 0 and end at 1".into()));
        }
        for i in 0..n {
            let (s0, t, s1) = (self.sample_times[i], self.event_times[i], self.sample_times[i + 1]);
            if !(s0 < t && t < s1) {
                return Err(Error::InvalidStream(format!("event time {t} not strictly between {s0} and {s1}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventOp {
    Add,
    Remove,
    /// Delaunay flip in an alpha stream: `simplices` leave, `added` enter.
    Flip,
}

/// The four kinds of elementary alpha-complex change.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaEventKind {
    Edge,
    Triangle,
    FreePair,
    Flip,
}

/// Clockwise cyclic order of neighbours around each vertex.
pub type RotationSnapshot = BTreeMap<usize, Vec<usize>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventBatch {
    pub t: f64,
    pub op: EventOp,
    pub simplices: Vec<Simplex>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub added: Vec<Simplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<AlphaEventKind>,
    /// New cyclic orders at the vertices whose neighbourhood changed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotations: Option<RotationSnapshot>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ComplexKind {
    #[default]
    Cech,
    Vr,
    Alpha,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplicialEventStream {
    #[serde(default)]
    pub kind: ComplexKind,
    pub vertex_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub fence: Vec<usize>,
    pub grid: TimeGrid,
    pub initial: Vec<Simplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_rotations: Option<RotationSnapshot>,
    /// Directed edges of the boundary cycle outside the fence, in order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<Vec<(usize, usize)>>,
    pub events: Vec<EventBatch>,
}

impl SimplicialEventStream {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: SimplicialEventStream = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stream serializes")
    }

    pub fn n(&self) -> usize {
        self.events.len()
    }

    pub fn fence_set(&self) -> BTreeSet<usize> {
        self.fence.iter().copied().collect()
    }

    pub fn initial_complex(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::from_closed(self.initial.iter().cloned().collect())
    }

    /// Checks the grid, vertex range, purity of batches and face-closure after each batch.
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.grid.n() != self.events.len() {
            return Err(Error::InvalidStream("grid and event list disagree on n".into()));
        }
        for (i, e) in self.events.iter().enumerate() {
            if e.t != self.grid.event_times[i] {
                return Err(Error::InvalidStream(format!("event {i} time differs from the grid")));
            }
        }
        if let Some(l) = &self.labels {
            if l.len() != self.vertex_count {
                return Err(Error::InvalidStream("label count differs from vertex count".into()));
            }
        }
        for &v in &self.fence {
            if v >= self.vertex_count {
                return Err(Error::InvalidStream(format!("fence vertex {v} out of range")));
            }
        }
        self.slices().map(|_| ())
    }

    /// Applies one batch, checking that it changes the complex as claimed.
    ///
    /// An empty batch is a no-op event.
    pub fn apply(complex: &mut SimplicialComplex, batch: &EventBatch) -> Result<()> {
        let fail = |m: String| Error::InvalidStream(format!("event at t = {}: {m}", batch.t));
        match batch.op {
            EventOp::Add => {
                for s in &batch.simplices {
                    if !complex.insert(s.clone()) {
                        return Err(fail(format!("{s:?} added twice")));
                    }
                }
                if !batch.added.is_empty() {
                    return Err(fail("`added` is only valid for flips".into()));
                }
            }
            EventOp::Remove => {
                for s in &batch.simplices {
                    if !complex.remove(s) {
                        return Err(fail(format!("{s:?} removed but absent")));
                    }
                }
                if !batch.added.is_empty() {
                    return Err(fail("`added` is only valid for flips".into()));
                }
            }
            EventOp::Flip => {
                for s in &batch.simplices {
                    if !complex.remove(s) {
                        return Err(fail(format!("{s:?} flipped out but absent")));
                    }
                }
                for s in &batch.added {
                    if !complex.insert(s.clone()) {
                        return Err(fail(format!("{s:?} flipped in twice")));
                    }
                }
            }
        }
        complex.check_closed().map_err(|e| fail(e.to_string()))
    }

    /// `C(s_0), …, C(s_n)`.
    pub fn slices(&self) -> Result<Vec<SimplicialComplex>> {
        let mut k = self.initial_complex()?;
        for s in k.iter() {
            if s.vertices().iter().any(|&v| v >= self.vertex_count) {
                return Err(Error::InvalidStream(format!("{s:?} uses an unknown vertex")));
            }
        }
        let mut out = vec![k.clone()];
        for e in &self.events {
            for s in e.simplices.iter().chain(&e.added) {
                if s.vertices().iter().any(|&v| v >= self.vertex_count) {
                    return Err(Error::InvalidStream(format!("{s:?} uses an unknown vertex")));
                }
            }
            Self::apply(&mut k, e)?;
            out.push(k.clone());
        }
        Ok(out)
    }

    /// Rejects streams containing flips, which the homological criteria cannot use.
    pub fn require_pure(&self) -> Result<()> {
        match self.events.iter().find(|e| e.op == EventOp::Flip) {
            Some(e) => Err(Error::InvalidStream(format!(
                "flip at t = {} is not a pure add or remove batch",
                e.t
            ))),
            None => Ok(()),
        }
    }

    /// A stream with no geometry: a fixed complex over `[0, 1]`.
    pub fn constant(vertex_count: usize, complex: &SimplicialComplex, fence: Vec<usize>) -> Self {
        SimplicialEventStream {
            kind: ComplexKind::Cech,
            vertex_count,
            labels: None,
            fence,
            grid: TimeGrid { event_times: vec![], sample_times: vec![0.0] },
            initial: complex.iter().cloned().collect(),
            initial_rotations: None,
            outer: None,
            events: vec![],
        }
    }

    /// Combinatorial equality: same complexes and batches, ignoring event times.
    pub fn same_combinatorics(&self, other: &SimplicialEventStream) -> bool {
        let strip = |s: &SimplicialEventStream| {
            s.events
                .iter()
                .map(|e| (e.op, e.simplices.clone(), e.added.clone()))
                .collect::<Vec<_>>()
        };
        self.vertex_count == other.vertex_count && self.initial == other.initial && strip(self) == strip(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SimplicialEventStream {
        SimplicialEventStream {
            kind: ComplexKind::Cech,
            vertex_count: 3,
            labels: None,
            fence: vec![],
            grid: TimeGrid::from_events(vec![0.5]).unwrap(),
            initial: vec![Simplex::vertex(0), Simplex::vertex(1), Simplex::vertex(2), Simplex::edge(0, 1)],
            initial_rotations: None,
            outer: None,
            events: vec![EventBatch {
                t: 0.5,
                op: EventOp::Add,
                simplices: vec![Simplex::edge(0, 2), Simplex::edge(1, 2), Simplex::triangle(0, 1, 2)],
                added: vec![],
                kind: None,
                rotations: None,
            }],
        }
    }

    #[test]
    fn grid_interleaves() {
        let g = TimeGrid::from_events(vec![0.2, 0.6]).unwrap();
        assert_eq!(g.sample_times, vec![0.0, 0.4, 1.0]);
        assert!(TimeGrid { event_times: vec![0.0], sample_times: vec![0.0, 1.0] }.validate().is_err());
    }

    #[test]
    fn json_round_trip_and_replay() {
        let s = tiny();
        let back = SimplicialEventStream::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let slices = s.slices().unwrap();
        assert_eq!(slices[1].len(), 7);
    }

    #[test]
    fn rejects_unclosed_batches_and_unknown_fields() {
        let mut s = tiny();
        s.events[0].simplices.remove(0);
        assert!(s.validate().is_err());
        let mut v: serde_json::Value = serde_json::from_str(&tiny().to_json()).unwrap();
        v["bogus"] = serde_json::json!(1);
        assert!(SimplicialEventStream::from_json(&v.to_string()).is_err());
    }
}
