//! Exact evasion decision from alpha complexes with cyclic orderings.
//!
//! The clockwise order of neighbours at every vertex turns the 1-skeleton into
//! a rotation system whose boundary cycles are the faces of the planar graph.
//! Removing the outer face and the faces filled by triangles leaves exactly
//! the uncovered components, and labels on the cycles record which of them
//! may still hide an intruder.

use crate::error::{Error, Result};
use crate::model::Point;
use crate::simplex::Simplex;
use crate::stream::{EventBatch, EventOp, RotationSnapshot, SimplicialEventStream};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

pub type DirectedEdge = (usize, usize);
/// A cycle as its lexicographically least rotation.
pub type CycleKey = Vec<DirectedEdge>;

/// Clockwise neighbour lists on a fixed vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    vertices: BTreeSet<usize>,
    rot: BTreeMap<usize, Vec<usize>>,
}

impl RotationSystem {
    /// Validates that adjacency is symmetric and lists have no repeats.
    pub fn new(vertices: impl IntoIterator<Item = usize>, snapshot: &RotationSnapshot) -> Result<Self> {
        let vertices: BTreeSet<usize> = vertices.into_iter().collect();
        let rot: BTreeMap<usize, Vec<usize>> =
            snapshot.iter().filter(|(_, l)| !l.is_empty()).map(|(&v, l)| (v, l.clone())).collect();
        let rs = RotationSystem { vertices, rot };
        rs.validate()?;
        Ok(rs)
    }

    fn validate(&self) -> Result<()> {
        for (&v, nbrs) in &self.rot {
            if !self.vertices.contains(&v) {
                return Err(Error::MalformedRotation(format!("unknown vertex {v}")));
            }
            let set: BTreeSet<usize> = nbrs.iter().copied().collect();
            if set.len() != nbrs.len() || set.contains(&v) {
                return Err(Error::MalformedRotation(format!("order at {v} is not a permutation of its edges")));
            }
            for &u in nbrs {
                if !self.rot.get(&u).is_some_and(|l| l.contains(&v)) {
                    return Err(Error::MalformedRotation(format!("edge {v}-{u} is missing at {u}")));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn order(&self, v: usize) -> &[usize] {
        self.rot.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        self.rot.iter().flat_map(|(&v, l)| l.iter().filter(move |&&u| v < u).map(move |&u| (v, u))).collect()
    }

    /// Face successor: at the target `v` of `u → v`, continue along the
    /// clockwise successor of `u` around `v`.
    pub fn successor(&self, (u, v): DirectedEdge) -> DirectedEdge {
        let l = &self.rot[&v];
        let i = l.iter().position(|&x| x == u).expect("directed edge of the graph");
        (v, l[(i + 1) % l.len()])
    }

    /// Replaces the order at each listed vertex; an empty list isolates it.
    pub fn apply_updates(&self, updates: &RotationSnapshot) -> Result<Self> {
        let mut rot = self.rot.clone();
        for (&v, l) in updates {
            if l.is_empty() {
                rot.remove(&v);
            } else {
                rot.insert(v, l.clone());
            }
        }
        let rs = RotationSystem { vertices: self.vertices.clone(), rot };
        rs.validate()?;
        Ok(rs)
    }

    /// Components of the graph, isolated vertices included.
    pub fn component_count(&self) -> usize {
        let mut seen = BTreeSet::new();
        let mut count = 0;
        for &s in &self.vertices {
            if !seen.insert(s) {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &u in self.order(v) {
                    if seen.insert(u) {
                        stack.push(u);
                    }
                }
            }
        }
        count
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCycle {
    pub edges: Vec<DirectedEdge>,
}

impl BoundaryCycle {
    pub fn key(&self) -> CycleKey {
        canonical(&self.edges)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertex_set(&self) -> BTreeSet<usize> {
        self.edges.iter().map(|e| e.0).collect()
    }

    /// Shoelace area of the closed walk; positive for counter-clockwise.
    pub fn signed_area(&self, points: &[Point]) -> f64 {
        0.5 * self
            .edges
            .iter()
            .map(|&(a, b)| points[a][0] * points[b][1] - points[b][0] * points[a][1])
            .sum::<f64>()
    }
}

pub fn canonical(edges: &[DirectedEdge]) -> CycleKey {
    (0..edges.len())
        .map(|k| edges[k..].iter().chain(&edges[..k]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Orbits of the face successor, sorted by key.
pub fn boundary_cycles(rs: &RotationSystem) -> Vec<BoundaryCycle> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (&v, l) in &rs.rot {
        for &u in l {
            let start = (v, u);
            if seen.contains(&start) {
                continue;
            }
            let mut edges = Vec::new();
            let mut e = start;
            while seen.insert(e) {
                edges.push(e);
                e = rs.successor(e);
            }
            out.push(BoundaryCycle { edges: canonical(&edges) });
        }
    }
    out.sort_by(|a, b| a.edges.cmp(&b.edges));
    out
}

/// The face of most negative area, which is the unbounded face of a connected
/// straight-line embedding.
pub fn outer_cycle_from_geometry(points: &[Point], snapshot: &RotationSnapshot) -> Option<Vec<DirectedEdge>> {
    let rs = RotationSystem::new(0..points.len(), snapshot).ok()?;
    boundary_cycles(&rs)
        .into_iter()
        .min_by(|a, b| a.signed_area(points).total_cmp(&b.signed_area(points)))
        .map(|c| c.edges)
}

/// Checks the partition and Euler-count invariants of a rotation system.
pub fn check_cycle_invariants(rs: &RotationSystem) -> Result<()> {
    let cycles = boundary_cycles(rs);
    let edges = rs.edges().len();
    let total: usize = cycles.iter().map(BoundaryCycle::len).sum();
    if total != 2 * edges {
        return Err(Error::MalformedRotation(format!("cycles cover {total} directed edges, expected {}", 2 * edges)));
    }
    let active: BTreeSet<usize> = rs.rot.keys().copied().collect();
    let isolated = rs.vertices.len() - active.len();
    let comps = rs.component_count() - isolated;
    // every component contributes its own outer cycle
    if edges > 0 && cycles.len() + active.len() != edges + 2 * comps {
        return Err(Error::MalformedRotation(format!(
            "{} cycles on V = {}, E = {edges}, C = {comps} is not a planar embedding",
            cycles.len(),
            active.len()
        )));
    }
    Ok(())
}

/// True/false labels on the current boundary cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelState {
    pub labels: BTreeMap<CycleKey, bool>,
    pub triangles: BTreeSet<Simplex>,
    pub outer: CycleKey,
}

impl LabelState {
    pub fn true_count(&self) -> usize {
        self.labels.values().filter(|&&l| l).count()
    }

    fn filled(&self, key: &CycleKey) -> bool {
        key.len() == 3 && {
            let v: Vec<usize> = key.iter().map(|e| e.0).collect();
            self.triangles.contains(&Simplex::triangle(v[0], v[1], v[2]))
        }
    }
}

fn check_connected(rs: &RotationSystem, t: f64) -> Result<()> {
    let components = rs.component_count();
    if components > 1 {
        return Err(Error::Disconnected { t, components });
    }
    Ok(())
}

/// Labels at time zero: filled triangles and the outer face are false.
pub fn init_labels(triangles: BTreeSet<Simplex>, rs: &RotationSystem, outer: &[DirectedEdge]) -> Result<LabelState> {
    check_connected(rs, 0.0)?;
    let outer = canonical(outer);
    let cycles = boundary_cycles(rs);
    if !cycles.iter().any(|c| c.edges == outer) {
        return Err(Error::UnknownCycle(format!("outer cycle {outer:?} is not a boundary cycle")));
    }
    let mut ls = LabelState { labels: BTreeMap::new(), triangles, outer: outer.clone() };
    for c in cycles {
        let label = c.edges != outer && !ls.filled(&c.edges);
        ls.labels.insert(c.edges, label);
    }
    Ok(ls)
}

/// How one old cycle relates to the new cycles after an event.
#[derive(Clone, Debug, Default)]
pub struct Transition {
    /// `(old key, new key)` pairs sharing a directed edge.
    pub links: Vec<(CycleKey, CycleKey)>,
    pub notes: Vec<String>,
}

/// Updates rotation system and labels across one alpha event.
pub fn apply_event(ls: &LabelState, rs: &RotationSystem, ev: &EventBatch) -> Result<(LabelState, RotationSystem, Transition)> {
    check_connected(rs, ev.t)?;
    let fail = |m: String| Error::InconsistentEvent(format!("t = {}: {m}", ev.t));

    let (removed, added): (Vec<&Simplex>, Vec<&Simplex>) = match ev.op {
        EventOp::Add => (vec![], ev.simplices.iter().collect()),
        EventOp::Remove => (ev.simplices.iter().collect(), vec![]),
        EventOp::Flip => (ev.simplices.iter().collect(), ev.added.iter().collect()),
    };
    let mut edges = rs.edges();
    let mut triangles = ls.triangles.clone();
    for s in &removed {
        let ok = match s.dim() {
            1 => edges.remove(&(s.vertices()[0], s.vertices()[1])),
            2 => triangles.remove(*s),
            _ => false,
        };
        if !ok {
            return Err(fail(format!("{s:?} is not present")));
        }
    }
    for s in &added {
        let ok = match s.dim() {
            1 => edges.insert((s.vertices()[0], s.vertices()[1])),
            2 => triangles.insert((*s).clone()),
            _ => false,
        };
        if !ok {
            return Err(fail(format!("{s:?} is already present")));
        }
    }
    let next_rs = match &ev.rotations {
        Some(u) => rs.apply_updates(u)?,
        None if removed.iter().chain(&added).all(|s| s.dim() != 1) => rs.clone(),
        None => return Err(fail("edge change without rotation updates".into())),
    };
    if next_rs.edges() != edges {
        return Err(fail("rotation updates disagree with the edge changes".into()));
    }
    for s in &triangles {
        let v = s.vertices();
        if !(edges.contains(&(v[0], v[1])) && edges.contains(&(v[0], v[2])) && edges.contains(&(v[1], v[2]))) {
            return Err(fail(format!("triangle {s:?} lacks an edge")));
        }
    }
    check_connected(&next_rs, ev.t)?;

    let old_of: BTreeMap<DirectedEdge, &CycleKey> =
        ls.labels.keys().flat_map(|k| k.iter().map(move |&e| (e, k))).collect();
    let event_vertices: BTreeSet<usize> =
        removed.iter().chain(&added).flat_map(|s| s.vertices().iter().copied()).collect();

    let mut next = LabelState { labels: BTreeMap::new(), triangles, outer: Vec::new() };
    let mut tr = Transition::default();
    for c in boundary_cycles(&next_rs) {
        let mut parents: BTreeSet<&CycleKey> = c.edges.iter().filter_map(|e| old_of.get(e).copied()).collect();
        if parents.is_empty() {
            // every edge is new: inherit from the faces around the event
            parents = ls
                .labels
                .keys()
                .filter(|k| k.iter().any(|e| event_vertices.contains(&e.0)))
                .collect();
        }
        let is_outer = parents.contains(&ls.outer);
        if is_outer {
            if !next.outer.is_empty() {
                return Err(fail("outer face split".into()));
            }
            next.outer = c.edges.clone();
            if added.iter().any(|s| s.dim() == 2) && added.iter().any(|s| s.dim() == 1) {
                tr.notes.push(format!("t = {}: free pair added against the outer face", ev.t));
            }
        }
        let label = !is_outer && !next.filled(&c.edges) && parents.iter().any(|k| ls.labels[*k]);
        for p in &parents {
            tr.links.push(((*p).clone(), c.edges.clone()));
        }
        next.labels.insert(c.edges, label);
    }
    if next.outer.is_empty() {
        return Err(fail("outer face vanished".into()));
    }
    Ok((next, next_rs, tr))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationVerdict {
    EvasionExists,
    NoEvasion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReebNode {
    pub id: usize,
    /// Vertices along the boundary cycle.
    pub cycle: Vec<usize>,
    pub label: bool,
    pub outer: bool,
    pub t_start: f64,
    pub t_end: f64,
}

/// Component history of the complement of the 1-skeleton.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReebGraph {
    pub nodes: Vec<ReebNode>,
    pub edges: Vec<(usize, usize)>,
}

impl ReebGraph {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph reeb {\n  rankdir=LR;\n");
        for n in &self.nodes {
            let style = match (n.outer, n.label) {
                (true, _) => "dotted",
                (false, true) => "bold",
                (false, false) => "solid",
            };
            let _ = writeln!(
                s,
                "  n{} [label=\"{:?}\\n[{:.4}, {:.4}]\\n{}\", style={style}];",
                n.id, n.cycle, n.t_start, n.t_end, n.label
            );
        }
        for (a, b) in &self.edges {
            let _ = writeln!(s, "  n{a} -> n{b};");
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvasionDecision {
    pub verdict: RotationVerdict,
    /// True-labelled cycles on each slice `s_0 … s_n`.
    pub true_counts: Vec<usize>,
    pub reeb: ReebGraph,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Runs the label algorithm over an alpha stream carrying rotations.
pub fn decide_evasion(es: &SimplicialEventStream) -> Result<EvasionDecision> {
    es.validate()?;
    let snap = es
        .initial_rotations
        .as_ref()
        .ok_or_else(|| Error::MalformedRotation("stream has no initial rotations".into()))?;
    let outer = es.outer.as_ref().ok_or_else(|| Error::UnknownCycle("stream has no outer cycle".into()))?;
    let initial = es.initial_complex()?;
    let mut rs = RotationSystem::new(0..es.vertex_count, snap)?;
    if rs.edges() != initial.edges().into_iter().collect() {
        return Err(Error::MalformedRotation("initial rotations disagree with the initial edges".into()));
    }
    check_cycle_invariants(&rs)?;
    let mut ls = init_labels(initial.of_dim(2).cloned().collect(), &rs, outer)?;

    let mut reeb = ReebGraph::default();
    let mut node_of: BTreeMap<CycleKey, usize> = BTreeMap::new();
    let push_node = |reeb: &mut ReebGraph, key: &CycleKey, ls: &LabelState, t: f64| -> usize {
        let id = reeb.nodes.len();
        reeb.nodes.push(ReebNode {
            id,
            cycle: key.iter().map(|e| e.0).collect(),
            label: ls.labels[key],
            outer: *key == ls.outer,
            t_start: t,
            t_end: 1.0,
        });
        id
    };
    for key in ls.labels.keys() {
        let id = push_node(&mut reeb, key, &ls, 0.0);
        node_of.insert(key.clone(), id);
    }

    let mut true_counts = vec![ls.true_count()];
    let mut notes = Vec::new();
    for ev in &es.events {
        let (next_ls, next_rs, tr) = apply_event(&ls, &rs, ev)?;
        check_cycle_invariants(&next_rs)?;
        notes.extend(tr.notes);
        let mut next_nodes = BTreeMap::new();
        for key in next_ls.labels.keys() {
            let unchanged = ls.labels.get(key) == Some(&next_ls.labels[key]) && node_of.contains_key(key);
            if unchanged {
                next_nodes.insert(key.clone(), node_of[key]);
            } else {
                let id = push_node(&mut reeb, key, &next_ls, ev.t);
                next_nodes.insert(key.clone(), id);
            }
        }
        for (old, new) in tr.links {
            let (a, b) = (node_of[&old], next_nodes[&new]);
            if a != b && !reeb.edges.contains(&(a, b)) {
                reeb.edges.push((a, b));
            }
        }
        for (key, &id) in &node_of {
            if next_nodes.get(key) != Some(&id) {
                reeb.nodes[id].t_end = ev.t;
            }
        }
        node_of = next_nodes;
        ls = next_ls;
        rs = next_rs;
        true_counts.push(ls.true_count());
    }
    let verdict = if ls.true_count() > 0 { RotationVerdict::EvasionExists } else { RotationVerdict::NoEvasion };
    Ok(EvasionDecision { verdict, true_counts, reeb, notes })
}

/// A small rotation system with four faces: a square `0 1 2 3` split by the
/// diagonal `0 2`, plus a vertex `4` attached to `1` and `2` outside it.
pub fn four_face_example() -> RotationSystem {
    RotationSystem::new(0..5, &four_face_snapshot()).expect("valid example")
}

/// Clockwise neighbour lists of [`four_face_example`].
pub fn four_face_snapshot() -> RotationSnapshot {
    [
        (0, vec![1, 3, 2]),
        (1, vec![0, 2, 4]),
        (2, vec![0, 3, 4, 1]),
        (3, vec![0, 2]),
        (4, vec![1, 2]),
    ]
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::alpha_complex;

    fn from_points(points: &[Point], r: f64) -> (RotationSystem, BTreeSet<Simplex>) {
        let (k, rot) = alpha_complex(points, r).unwrap();
        (RotationSystem::new(0..points.len(), &rot).unwrap(), k.of_dim(2).cloned().collect())
    }

    #[test]
    fn single_edge_has_one_cycle() {
        let (rs, _) = from_points(&[[0.0, 0.0], [1.0, 0.0]], 1.0);
        let c = boundary_cycles(&rs);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].edges, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn triangle_has_inner_and_outer() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]];
        let (rs, _) = from_points(&pts, 1.0);
        let c = boundary_cycles(&rs);
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|x| x.len() == 3));
        let areas: Vec<f64> = c.iter().map(|x| x.signed_area(&pts)).collect();
        assert!(areas.iter().any(|&a| a > 0.0) && areas.iter().any(|&a| a < 0.0));
        check_cycle_invariants(&rs).unwrap();
    }

    #[test]
    fn four_faces() {
        let rs = four_face_example();
        assert_eq!(boundary_cycles(&rs).len(), 4);
        check_cycle_invariants(&rs).unwrap();
    }

    #[test]
    fn malformed_rotations_rejected() {
        let snap: RotationSnapshot = [(0, vec![1]), (1, vec![])].into_iter().collect();
        assert!(RotationSystem::new(0..2, &snap).is_err());
    }

    #[test]
    fn filled_disk_is_all_false() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]];
        let (rs, tris) = from_points(&pts, 1.0);
        let outer = outer_cycle_from_geometry(&pts, &alpha_complex(&pts, 1.0).unwrap().1).unwrap();
        let ls = init_labels(tris, &rs, &outer).unwrap();
        assert_eq!(ls.true_count(), 0);
    }

    #[test]
    fn hollow_ring_interior_is_true() {
        let pts: Vec<Point> = (0..8)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 8.0;
                [2.0 * a.cos(), 2.0 * a.sin()]
            })
            .collect();
        let (k, rot) = alpha_complex(&pts, 1.0).unwrap();
        assert_eq!(k.count_in_dim(1), 8);
        let rs = RotationSystem::new(0..8, &rot).unwrap();
        let outer = outer_cycle_from_geometry(&pts, &rot).unwrap();
        let ls = init_labels(BTreeSet::new(), &rs, &outer).unwrap();
        assert_eq!(ls.true_count(), 1);
    }
}
