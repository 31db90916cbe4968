//! Zigzag modules of a simplicial event stream.
//!
//! `ZH_j` of a stream with `n` events is
//! `H_j(K_0) → H_j(U_0) ← H_j(K_1) → … ← H_j(K_n)` with `U_i = K_i ∪ K_{i+1}`.
//! [`zigzag_from_stream`] materialises every slot; [`StreamingState`] runs the
//! same sweep while holding a single complex and the open bars.

use super::{decompose, Arrow, Barcode, Direction, OpenBars, ZigzagModule};
use crate::chain::Homology;
use crate::error::{Error, Result};
use crate::field::{PrimeField, Scalar};
use crate::linalg::Matrix;
use crate::simplex::{Simplex, SimplicialComplex};
use crate::stream::{EventBatch, EventOp, SimplicialEventStream};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

type SimplicialChain = Vec<(Simplex, Scalar)>;

/// Homology of one complex with chains addressed by simplex.
struct SliceHomology {
    h: Homology,
    ids: BTreeMap<Simplex, usize>,
    by_id: Vec<Simplex>,
    degree: usize,
}

impl SliceHomology {
    fn new(k: &SimplicialComplex, degree: usize, f: PrimeField) -> Self {
        let (c, ids) = k.to_cell_complex(&BTreeSet::new());
        let mut by_id = vec![Simplex::vertex(0); ids.len()];
        for (s, &i) in &ids {
            by_id[i] = s.clone();
        }
        SliceHomology { h: Homology::compute(&c, f, true), ids, by_id, degree }
    }

    fn betti(&self) -> usize {
        self.h.betti(self.degree)
    }

    fn basis(&self) -> Vec<SimplicialChain> {
        self.h
            .basis(self.degree)
            .into_iter()
            .map(|z| z.into_iter().map(|(i, a)| (self.by_id[i].clone(), a)).collect())
            .collect()
    }

    fn coordinates(&self, z: &SimplicialChain) -> Result<Vec<Scalar>> {
        let mut chain = Vec::with_capacity(z.len());
        for (s, a) in z {
            let id = self
                .ids
                .get(s)
                .ok_or_else(|| Error::NotAChainMap(format!("{s:?} is missing from the target")))?;
            chain.push((*id, *a));
        }
        chain.sort_unstable_by_key(|&(i, _)| i);
        self.h.coordinates(self.degree, &chain)
    }

    /// Matrix of the map induced by inclusion into `target`.
    fn map_into(&self, target: &SliceHomology) -> Result<Matrix> {
        let cols: Result<Vec<_>> = self.basis().iter().map(|z| target.coordinates(z)).collect();
        Ok(Matrix::from_columns(target.betti(), &cols?))
    }
}

fn check_degree(degree: usize) -> Result<()> {
    if degree > 8 {
        return Err(Error::InvalidParameter(format!("degree {degree} is out of range")));
    }
    Ok(())
}

/// The homology zigzag module `ZH_degree` of a stream.
pub fn zigzag_from_stream(stream: &SimplicialEventStream, degree: usize, field: PrimeField) -> Result<ZigzagModule> {
    check_degree(degree)?;
    stream.require_pure()?;
    let slices = stream.slices()?;
    let hs: Vec<SliceHomology> = slices.iter().map(|k| SliceHomology::new(k, degree, field)).collect();
    let mut dims = vec![hs[0].betti()];
    let mut arrows = Vec::new();
    for i in 0..stream.n() {
        let u = SliceHomology::new(&slices[i].union(&slices[i + 1]), degree, field);
        arrows.push(Arrow { direction: Direction::Right, matrix: hs[i].map_into(&u)? });
        arrows.push(Arrow { direction: Direction::Left, matrix: hs[i + 1].map_into(&u)? });
        dims.push(u.betti());
        dims.push(hs[i + 1].betti());
    }
    ZigzagModule::new(field, dims, arrows)
}

/// Cohomology of one complex, computed as homology of its dual complex.
struct SliceCohomology {
    h: Homology,
    ids: BTreeMap<Simplex, usize>,
    by_id: Vec<Simplex>,
    dual_degree: usize,
}

impl SliceCohomology {
    fn new(k: &SimplicialComplex, degree: usize, f: PrimeField) -> Self {
        let (c, ids) = k.to_cell_complex(&BTreeSet::new());
        let top = c.max_dim().unwrap_or(0);
        let mut by_id = vec![Simplex::vertex(0); ids.len()];
        for (s, &i) in &ids {
            by_id[i] = s.clone();
        }
        // a complex with no simplices of dimension `degree` has no cocycles there
        let dual_degree = top.checked_sub(degree).unwrap_or(usize::MAX);
        SliceCohomology { h: Homology::compute(&c.dual(), f, true), ids, by_id, dual_degree }
    }

    fn betti(&self) -> usize {
        if self.dual_degree == usize::MAX {
            0
        } else {
            self.h.betti(self.dual_degree)
        }
    }

    /// Matrix of restriction of cocycles to the subcomplex `target`.
    fn restrict_to(&self, target: &SliceCohomology) -> Result<Matrix> {
        if self.betti() == 0 {
            return Ok(Matrix::zeros(target.betti(), 0));
        }
        let mut cols = Vec::new();
        for z in self.h.basis(self.dual_degree) {
            let mut chain: Vec<(usize, Scalar)> = z
                .into_iter()
                .filter_map(|(i, a)| target.ids.get(&self.by_id[i]).map(|&k| (k, a)))
                .collect();
            chain.sort_unstable_by_key(|&(i, _)| i);
            if target.betti() == 0 {
                cols.push(Vec::new());
            } else {
                cols.push(target.h.coordinates(target.dual_degree, &chain)?);
            }
        }
        Ok(Matrix::from_columns(target.betti(), &cols))
    }
}

/// The cohomology zigzag `H^j(K_0) ← H^j(U_0) → H^j(K_1) ← …` built from cochains.
///
/// Over a field its barcode agrees with that of [`zigzag_from_stream`].
pub fn cohomology_zigzag(stream: &SimplicialEventStream, degree: usize, field: PrimeField) -> Result<ZigzagModule> {
    check_degree(degree)?;
    stream.require_pure()?;
    let slices = stream.slices()?;
    let cs: Vec<SliceCohomology> = slices.iter().map(|k| SliceCohomology::new(k, degree, field)).collect();
    let mut dims = vec![cs[0].betti()];
    let mut arrows = Vec::new();
    for i in 0..stream.n() {
        let u = SliceCohomology::new(&slices[i].union(&slices[i + 1]), degree, field);
        arrows.push(Arrow { direction: Direction::Left, matrix: u.restrict_to(&cs[i])? });
        arrows.push(Arrow { direction: Direction::Right, matrix: u.restrict_to(&cs[i + 1])? });
        dims.push(u.betti());
        dims.push(cs[i + 1].betti());
    }
    ZigzagModule::new(field, dims, arrows)
}

/// Peak sizes seen while streaming.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamStats {
    pub events: usize,
    /// Largest `|K_i|`.
    pub max_slice: usize,
    /// Largest complex held at once, which is `|U_i|` at its peak.
    pub max_held: usize,
    pub max_open_bars: usize,
    /// Largest `held simplices + open bars` at any moment.
    pub max_tracked: usize,
}

impl StreamStats {
    /// Tracked state stays within twice the largest slice.
    pub fn within_bound(&self) -> bool {
        self.max_tracked <= 2 * self.max_slice.max(1)
    }

    fn observe(&mut self, held: usize, open: usize) {
        self.max_held = self.max_held.max(held);
        self.max_open_bars = self.max_open_bars.max(open);
        self.max_tracked = self.max_tracked.max(held + open);
    }
}

/// One-pass zigzag persistence over an event stream.
///
/// Keeps the current complex, the homology of the current slice and the open
/// bars with their generators in that homology's basis. Nothing from earlier
/// slices is retained.
pub struct StreamingState {
    field: PrimeField,
    degree: usize,
    complex: SimplicialComplex,
    current: SliceHomology,
    open: OpenBars,
    slot: usize,
    closed: Vec<(usize, usize)>,
    stats: StreamStats,
}

impl StreamingState {
    pub fn new(initial: SimplicialComplex, degree: usize, field: PrimeField) -> Result<Self> {
        check_degree(degree)?;
        initial.check_closed()?;
        let current = SliceHomology::new(&initial, degree, field);
        let open = OpenBars::initial(current.betti());
        let mut stats = StreamStats { max_slice: initial.len(), ..StreamStats::default() };
        stats.observe(initial.len(), open.len());
        Ok(StreamingState { field, degree, complex: initial, current, open, slot: 0, closed: Vec::new(), stats })
    }

    /// Processes one batch and returns the bars that ended, as 1-based slots.
    pub fn push(&mut self, batch: &EventBatch) -> Result<Vec<(usize, usize)>> {
        let f = self.field;
        let before = self.closed.len();
        match batch.op {
            EventOp::Add => {
                SimplicialEventStream::apply(&mut self.complex, batch)?;
                let u = SliceHomology::new(&self.complex, self.degree, f);
                self.stats.observe(self.complex.len(), self.open.len());
                let images = self.images_in(&u)?;
                let closed = self.open.step_right(self.slot, images, u.betti(), f).closed;
                self.close(closed, self.slot);
                // K_{i+1} = U_i, so the left arrow is the identity
                let id = Matrix::identity(u.betti());
                self.cross_left(&id, u.betti());
                self.current = u;
            }
            EventOp::Remove => {
                // U_i = K_i, so the right arrow is the identity
                let dim = self.current.betti();
                let images = self.open.vectors.clone();
                let closed = self.open.step_right(self.slot, images, dim, f).closed;
                self.close(closed, self.slot);
                self.stats.observe(self.complex.len(), self.open.len());
                SimplicialEventStream::apply(&mut self.complex, batch)?;
                let next = SliceHomology::new(&self.complex, self.degree, f);
                let m = next.map_into(&self.current)?;
                self.cross_left(&m, next.betti());
                self.current = next;
            }
            EventOp::Flip => {
                return Err(Error::InvalidStream(format!(
                    "flip at t = {} is not a pure add or remove batch",
                    batch.t
                )))
            }
        }
        self.stats.events += 1;
        self.stats.max_slice = self.stats.max_slice.max(self.complex.len());
        self.stats.observe(self.complex.len(), self.open.len());
        Ok(self.closed[before..].to_vec())
    }

    fn images_in(&self, target: &SliceHomology) -> Result<Vec<Vec<Scalar>>> {
        let m = self.current.map_into(target)?;
        Ok(self.open.vectors.iter().map(|v| m.mul_vec(v, self.field)).collect())
    }

    /// Crosses `V_slot ← V_{slot+1}` given the matrix of that map.
    fn cross_left(&mut self, m: &Matrix, target_dim: usize) {
        let f = self.field;
        let gens = self.open.generator_matrix(m.rows());
        let inv = gens.inverse(f).expect("open generators form a basis");
        let pre = inv.mul(m, f).columns();
        let closed = self.open.step_left(self.slot + 1, pre, target_dim, f).closed;
        self.close(closed, self.slot + 1);
        self.slot += 2;
    }

    fn close(&mut self, births: Vec<usize>, slot: usize) {
        self.closed.extend(births.into_iter().map(|b| (b + 1, slot + 1)));
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn open_bars(&self) -> usize {
        self.open.len()
    }

    pub fn stats(&self) -> StreamStats {
        self.stats
    }

    /// Closes the remaining bars at the last slot.
    pub fn finish(self) -> (Barcode, StreamStats) {
        let m = self.slot + 1;
        let mut bars = self.closed;
        bars.extend(self.open.births.iter().map(|&b| (b + 1, m)));
        (Barcode::new(m, bars), self.stats)
    }
}

/// Barcode of `ZH_degree` computed in one streaming pass.
pub fn stream_barcode(stream: &SimplicialEventStream, degree: usize, field: PrimeField) -> Result<Barcode> {
    stream_barcode_with_stats(stream, degree, field).map(|(b, _)| b)
}

pub fn stream_barcode_with_stats(
    stream: &SimplicialEventStream,
    degree: usize,
    field: PrimeField,
) -> Result<(Barcode, StreamStats)> {
    stream.validate()?;
    stream.require_pure()?;
    let mut state = StreamingState::new(stream.initial_complex()?, degree, field)?;
    for e in &stream.events {
        state.push(e)?;
    }
    Ok(state.finish())
}

/// Barcode through the materialised module; the reference for [`stream_barcode`].
pub fn batch_barcode(stream: &SimplicialEventStream, degree: usize, field: PrimeField) -> Result<Barcode> {
    Ok(decompose(&zigzag_from_stream(stream, degree, field)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_event_stream;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn streaming_matches_batch_on_random_streams() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [2, 3] {
            let f = PrimeField::new(p).unwrap();
            for _ in 0..40 {
                let s = random_event_stream(&mut rng, 6, 12);
                for j in 0..2 {
                    let (a, stats) = stream_barcode_with_stats(&s, j, f).unwrap();
                    let z = zigzag_from_stream(&s, j, f).unwrap();
                    assert_eq!(a, decompose(&z));
                    a.check_consistency(&z).unwrap();
                    assert_eq!(stats.events, s.n());
                }
            }
        }
    }

    #[test]
    fn cohomology_barcode_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = PrimeField::new(3).unwrap();
        for _ in 0..30 {
            let s = random_event_stream(&mut rng, 5, 10);
            for j in 0..2 {
                let h = decompose(&zigzag_from_stream(&s, j, f).unwrap());
                let c = decompose(&cohomology_zigzag(&s, j, f).unwrap());
                assert_eq!(h, c);
            }
        }
    }
}
