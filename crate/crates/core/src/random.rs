//! Seeded random instances for tests, benchmarks and the acceptance suite.

use crate::field::PrimeField;
use crate::linalg::Matrix;
use crate::simplex::{Simplex, SimplicialComplex};
use crate::stream::{ComplexKind, EventBatch, EventOp, SimplicialEventStream, TimeGrid};
use crate::zigzag::{Arrow, Direction, ZigzagModule};
use rand::Rng;

/// A zigzag module with `1..=max_len` slots, dimensions up to `max_dim` and
/// uniformly random structure maps.
pub fn random_zigzag_module<R: Rng>(rng: &mut R, f: PrimeField, max_len: usize, max_dim: usize) -> ZigzagModule {
    let m = rng.gen_range(1..=max_len.max(1));
    let dims: Vec<usize> = (0..m).map(|_| rng.gen_range(0..=max_dim)).collect();
    let arrows = (0..m - 1)
        .map(|i| {
            let direction = if rng.gen_bool(0.5) { Direction::Right } else { Direction::Left };
            let (src, tgt) = match direction {
                Direction::Right => (dims[i], dims[i + 1]),
                Direction::Left => (dims[i + 1], dims[i]),
            };
            Arrow { direction, matrix: random_matrix(rng, f, tgt, src) }
        })
        .collect();
    ZigzagModule { field: f, dims, arrows }
}

pub fn random_matrix<R: Rng>(rng: &mut R, f: PrimeField, rows: usize, cols: usize) -> Matrix {
    let p = f.characteristic();
    let entries = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..p)).collect()).collect();
    Matrix::from_rows(rows, cols, entries)
}

/// A stream of single-simplex insertions and deletions on `vertices` vertices.
///
/// Every vertex is present throughout; each event adds a simplex of dimension
/// 1 or 2 whose faces are present, or removes one without cofaces.
pub fn random_event_stream<R: Rng>(rng: &mut R, vertices: usize, events: usize) -> SimplicialEventStream {
    let mut k = SimplicialComplex::closure((0..vertices).map(Simplex::vertex));
    let initial: Vec<Simplex> = k.iter().cloned().collect();
    let mut batches = Vec::new();
    for i in 0..events {
        let t = (i + 1) as f64 / (events + 1) as f64;
        let addable: Vec<Simplex> = candidates(vertices).filter(|s| !k.contains(s) && s.facets().all(|f| k.contains(&f))).collect();
        let removable: Vec<Simplex> = k
            .iter()
            .filter(|s| s.dim() > 0 && k.cofacets(s).next().is_none())
            .cloned()
            .collect();
        let add = removable.is_empty() || (!addable.is_empty() && rng.gen_bool(0.6));
        let (op, s) = if add && !addable.is_empty() {
            (EventOp::Add, addable[rng.gen_range(0..addable.len())].clone())
        } else if !removable.is_empty() {
            (EventOp::Remove, removable[rng.gen_range(0..removable.len())].clone())
        } else {
            break;
        };
        match op {
            EventOp::Add => k.insert(s.clone()),
            _ => k.remove(&s),
        };
        batches.push(EventBatch { t, op, simplices: vec![s], added: vec![], kind: None, rotations: None });
    }
    let grid = TimeGrid::from_events(batches.iter().map(|b| b.t).collect()).expect("increasing times");
    SimplicialEventStream {
        kind: ComplexKind::Cech,
        vertex_count: vertices,
        labels: None,
        fence: Vec::new(),
        grid,
        initial,
        initial_rotations: None,
        outer: None,
        events: batches,
    }
}

fn candidates(n: usize) -> impl Iterator<Item = Simplex> {
    let edges = (0..n).flat_map(move |a| (a + 1..n).map(move |b| Simplex::edge(a, b)));
    let tris = (0..n).flat_map(move |a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| Simplex::triangle(a, b, c))));
    edges.chain(tris)
}

/// `n` points uniform in `[0, w] x [0, h]`.
pub fn random_points<R: Rng>(rng: &mut R, n: usize, w: f64, h: f64) -> Vec<[f64; 2]> {
    (0..n).map(|_| [rng.gen_range(0.0..w), rng.gen_range(0.0..h)]).collect()
}
