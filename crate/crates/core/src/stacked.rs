//! The stacked complex of an event stream and the relative-homology criterion.
//!
//! Between consecutive event times the complex is constant, so the covered
//! region of spacetime is a union of prisms `σ × [t_i, t_{i+1}]` glued along
//! slices at the event times. The fence cells form the subcomplex `F × I`.

use crate::chain::{check_chain_map, Chain, CellComplex, Homology};
use crate::error::{Error, Result};
use crate::field::{PrimeField, Scalar};
use crate::linalg::Matrix;
use crate::simplex::{Simplex, SimplicialComplex};
use crate::stream::SimplicialEventStream;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Cell complex of prisms with its fence subcomplex marked.
#[derive(Clone, Debug)]
pub struct StackedComplex {
    pub complex: CellComplex,
    /// `times[l]` for slice level `l`: `0, t_1, …, t_n, 1`.
    pub times: Vec<f64>,
    /// Cell id of `σ × {t_l}` for every simplex of the slice at level `l`.
    pub slice_cells: Vec<BTreeMap<Simplex, usize>>,
    /// Cell id of `σ × [t_i, t_{i+1}]` for every `σ ∈ C(s_i)`.
    pub prism_cells: Vec<BTreeMap<Simplex, usize>>,
}

pub fn build_stacked_complex(es: &SimplicialEventStream) -> Result<StackedComplex> {
    es.validate()?;
    es.require_pure()?;
    let k = es.slices()?;
    let n = es.n();
    let fence = es.fence_set();
    let mut levels: Vec<SimplicialComplex> = vec![k[0].clone()];
    for i in 1..=n {
        levels.push(k[i - 1].union(&k[i]));
    }
    levels.push(k[n].clone());
    let mut times = vec![0.0];
    times.extend(&es.grid.event_times);
    times.push(1.0);

    let on_fence = |s: &Simplex| s.vertices().iter().all(|v| fence.contains(v));
    let mut c = CellComplex::new();
    let mut slice_cells = Vec::with_capacity(levels.len());
    for level in &levels {
        let mut ids: BTreeMap<Simplex, usize> = BTreeMap::new();
        for s in by_dimension(level) {
            let boundary = signed_facets(s).map(|(f, sign)| (ids[&f], sign)).collect();
            ids.insert(s.clone(), c.push(s.dim(), boundary, on_fence(s)));
        }
        slice_cells.push(ids);
    }
    let mut prism_cells = Vec::with_capacity(n + 1);
    for (i, block) in k.iter().enumerate() {
        let mut ids: BTreeMap<Simplex, usize> = BTreeMap::new();
        for s in by_dimension(block) {
            let mut boundary: Vec<(usize, i64)> = signed_facets(s).map(|(f, sign)| (ids[&f], sign)).collect();
            let sign = if s.dim() % 2 == 0 { 1 } else { -1 };
            boundary.push((slice_cells[i + 1][s], sign));
            boundary.push((slice_cells[i][s], -sign));
            ids.insert(s.clone(), c.push(s.dim() + 1, boundary, on_fence(s)));
        }
        prism_cells.push(ids);
    }
    Ok(StackedComplex { complex: c, times, slice_cells, prism_cells })
}

fn by_dimension(k: &SimplicialComplex) -> Vec<&Simplex> {
    let mut v: Vec<&Simplex> = k.iter().collect();
    v.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
    v
}

fn signed_facets(s: &Simplex) -> impl Iterator<Item = (Simplex, i64)> + '_ {
    s.facets().enumerate().map(|(i, f)| (f, if i % 2 == 0 { 1 } else { -1 }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DsgVerdict {
    NoEvasionCertified,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsgReport {
    pub verdict: DsgVerdict,
    /// Rank of `H_d(SC, F×I) → H_{d−1}(F×I)`.
    pub connecting_rank: usize,
    pub relative_betti: usize,
    pub fence_betti: usize,
    pub cells: usize,
}

/// The relative-homology criterion in ambient dimension `d`.
///
/// The connecting map is computed on explicit relative cycles and checked
/// against the two ranks forced by the long exact sequence of the pair.
pub fn dsg_criterion(sc: &StackedComplex, d: usize, field: PrimeField) -> Result<DsgReport> {
    if d == 0 {
        return Err(Error::InvalidParameter("ambient dimension must be positive".into()));
    }
    let c = &sc.complex;
    if c.marked_count() == 0 {
        return Err(Error::EmptyFence);
    }
    let (fence, fence_ids) = c.marked_subcomplex();
    let (quot, quot_ids) = c.quotient_by_marked();
    let h_sc = Homology::compute(c, field, true);
    let h_f = Homology::compute(&fence, field, true);
    let h_rel = Homology::compute(&quot, field, true);
    let to_fence: BTreeMap<usize, usize> = fence_ids.iter().enumerate().map(|(k, &i)| (i, k)).collect();

    // direct: lift each relative cycle, take its boundary, read it in H_{d-1}(F)
    let mut cols = Vec::new();
    for z in h_rel.basis(d) {
        let lifted: Chain = z.iter().map(|&(i, a)| (quot_ids[i], a)).collect();
        let mut bd: Chain = Vec::new();
        for (i, a) in c.boundary_of_chain(&lifted, field) {
            let k = *to_fence
                .get(&i)
                .ok_or_else(|| Error::NotAChainMap("relative cycle has boundary outside the fence".into()))?;
            bd.push((k, a));
        }
        bd.sort_unstable_by_key(|&(k, _)| k);
        cols.push(h_f.coordinates(d - 1, &bd)?);
    }
    let connecting_rank = Matrix::from_columns(h_f.betti(d - 1), &cols).rank(field);

    // exactness at H_{d-1}(F): im ∂ = ker(H_{d-1}(F) → H_{d-1}(SC))
    let incl_low = map_rank(&h_f, &fence, &fence_ids, &h_sc, c, d - 1, field)?;
    let via_kernel = h_f.betti(d - 1) - incl_low;
    // exactness at H_d(SC, F): ker ∂ = im(H_d(SC) → H_d(SC, F)) = H_d(SC) / im H_d(F)
    let incl_top = map_rank(&h_f, &fence, &fence_ids, &h_sc, c, d, field)?;
    let via_cokernel = h_rel.betti(d) - (h_sc.betti(d) - incl_top);
    if connecting_rank != via_kernel || connecting_rank != via_cokernel {
        return Err(Error::NotAChainMap(format!(
            "long exact sequence mismatch: {connecting_rank} vs {via_kernel} vs {via_cokernel}"
        )));
    }
    Ok(DsgReport {
        verdict: if connecting_rank > 0 { DsgVerdict::NoEvasionCertified } else { DsgVerdict::Inconclusive },
        connecting_rank,
        relative_betti: h_rel.betti(d),
        fence_betti: h_f.betti(d - 1),
        cells: c.len(),
    })
}

fn map_rank(
    h_src: &Homology,
    src: &CellComplex,
    embedding: &[usize],
    h_tgt: &Homology,
    tgt: &CellComplex,
    j: usize,
    field: PrimeField,
) -> Result<usize> {
    check_chain_map(src, tgt, embedding, field)?;
    let cols: Result<Vec<Vec<Scalar>>> = h_src
        .basis(j)
        .iter()
        .map(|z| {
            let mut pushed: Chain = z.iter().map(|&(i, a)| (embedding[i], a)).collect();
            pushed.sort_unstable_by_key(|&(i, _)| i);
            h_tgt.coordinates(j, &pushed)
        })
        .collect();
    Ok(Matrix::from_columns(h_tgt.betti(j), &cols?).rank(field))
}

/// A simplicial triangulation of the stacked complex, used as an oracle.
///
/// Vertex `(v, l)` gets id `v * levels + l`; each prism over `[v_0 < … < v_k]`
/// is split into the `k + 1` staircase simplices, which agree on shared faces.
/// Fence vertices are returned for marking the fence subcomplex.
pub fn triangulate(es: &SimplicialEventStream) -> Result<(SimplicialComplex, BTreeSet<usize>)> {
    es.require_pure()?;
    let k = es.slices()?;
    let n = es.n();
    let levels = n + 2;
    let id = |v: usize, l: usize| v * levels + l;
    let mut tops: Vec<Simplex> = Vec::new();
    let slice_at = |l: usize, kk: &SimplicialComplex, tops: &mut Vec<Simplex>| {
        for s in kk.iter() {
            tops.push(Simplex::new(s.vertices().iter().map(|&v| id(v, l)).collect()).expect("distinct"));
        }
    };
    slice_at(0, &k[0], &mut tops);
    for i in 1..=n {
        slice_at(i, &k[i - 1].union(&k[i]), &mut tops);
    }
    slice_at(n + 1, &k[n], &mut tops);
    for (i, block) in k.iter().enumerate() {
        for s in block.iter() {
            let v = s.vertices();
            for j in 0..v.len() {
                let mut verts: Vec<usize> = v[..=j].iter().map(|&x| id(x, i)).collect();
                verts.extend(v[j..].iter().map(|&x| id(x, i + 1)));
                tops.push(Simplex::new(verts).expect("distinct"));
            }
        }
    }
    let fence: BTreeSet<usize> = es.fence.iter().flat_map(|&v| (0..levels).map(move |l| id(v, l))).collect();
    Ok((SimplicialComplex::closure(tops), fence))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{betti_numbers, Strategy};
    use crate::random::random_event_stream;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pad(a: &mut Vec<usize>, b: &mut Vec<usize>) {
        let n = a.len().max(b.len());
        a.resize(n, 0);
        b.resize(n, 0);
    }

    #[test]
    fn static_stream_is_a_product() {
        let k = SimplicialComplex::closure([Simplex::edge(0, 1), Simplex::edge(1, 2), Simplex::edge(0, 2)]);
        let es = SimplicialEventStream::constant(3, &k, vec![]);
        let sc = build_stacked_complex(&es).unwrap();
        let f = PrimeField::TWO;
        sc.complex.validate(f).unwrap();
        let (kc, _) = k.to_cell_complex(&BTreeSet::new());
        let mut a = betti_numbers(&sc.complex, f, Strategy::Auto);
        let mut b = betti_numbers(&kc, f, Strategy::Auto);
        pad(&mut a, &mut b);
        assert_eq!(a, b);
    }

    #[test]
    fn cellular_matches_triangulated() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let es = random_event_stream(&mut rng, 5, 8);
            let sc = build_stacked_complex(&es).unwrap();
            let (tri, _) = triangulate(&es).unwrap();
            let (tc, _) = tri.to_cell_complex(&BTreeSet::new());
            for p in [2, 3] {
                let f = PrimeField::new(p).unwrap();
                sc.complex.validate(f).unwrap();
                let mut a = betti_numbers(&sc.complex, f, Strategy::Auto);
                let mut b = betti_numbers(&tc, f, Strategy::Auto);
                pad(&mut a, &mut b);
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn empty_fence_is_an_error() {
        let k = SimplicialComplex::closure([Simplex::edge(0, 1)]);
        let sc = build_stacked_complex(&SimplicialEventStream::constant(2, &k, vec![])).unwrap();
        assert_eq!(dsg_criterion(&sc, 2, PrimeField::TWO).unwrap_err(), Error::EmptyFence);
    }

    #[test]
    fn hollow_fence_ring_is_inconclusive_and_filled_ring_certifies() {
        let ring: Vec<Simplex> = (0..4).map(|i| Simplex::edge(i, (i + 1) % 4)).collect();
        let hollow = SimplicialComplex::closure(ring.clone());
        let es = SimplicialEventStream::constant(4, &hollow, vec![0, 1, 2, 3]);
        let r = dsg_criterion(&build_stacked_complex(&es).unwrap(), 2, PrimeField::TWO).unwrap();
        assert_eq!(r.verdict, DsgVerdict::Inconclusive);

        // an interior vertex 4 coning off the ring fills it
        let mut tops = ring;
        tops.extend((0..4).map(|i| Simplex::triangle(i, (i + 1) % 4, 4)));
        let filled = SimplicialComplex::closure(tops);
        let es = SimplicialEventStream::constant(5, &filled, vec![0, 1, 2, 3]);
        let r = dsg_criterion(&build_stacked_complex(&es).unwrap(), 2, PrimeField::TWO).unwrap();
        assert_eq!(r.verdict, DsgVerdict::NoEvasionCertified);
        assert_eq!(r.connecting_rank, 1);
    }
}
