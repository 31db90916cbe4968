//! Cell complexes, boundary-matrix reduction and homology over `F_p`.
//!
//! Boundaries are stored with integer coefficients and reduced into the
//! requested field when homology is computed, so the same complex can be
//! examined over several primes.

use crate::error::{Error, Result};
use crate::field::{PrimeField, Scalar};
use crate::linalg::Matrix;
use std::collections::HashMap;

/// A chain: sparse `(cell id, coefficient)` pairs, sorted by cell id, no zeros.
pub type Chain = Vec<(usize, Scalar)>;

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub dim: usize,
    /// Integer boundary coefficients; reduced modulo `p` on use.
    pub boundary: Vec<(usize, i64)>,
}

/// A finite regular-ish cell complex given by its cellular boundary.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CellComplex {
    cells: Vec<Cell>,
    marked: Vec<bool>,
}

impl CellComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a cell and returns its id.
    pub fn push(&mut self, dim: usize, boundary: Vec<(usize, i64)>, marked: bool) -> usize {
        self.cells.push(Cell { dim, boundary });
        self.marked.push(marked);
        self.cells.len() - 1
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, id: usize) -> &Cell {
        &self.cells[id]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_marked(&self, id: usize) -> bool {
        self.marked[id]
    }

    pub fn marked_count(&self) -> usize {
        self.marked.iter().filter(|&&m| m).count()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.cells.iter().map(|c| c.dim).max()
    }

    pub fn count_in_dim(&self, dim: usize) -> usize {
        self.cells.iter().filter(|c| c.dim == dim).count()
    }

    /// Checks that boundaries reference existing cells one dimension down,
    /// that marked cells form a subcomplex, and that `∂∘∂ = 0` over `field`.
    pub fn validate(&self, field: PrimeField) -> Result<()> {
        for (id, cell) in self.cells.iter().enumerate() {
            for &(face, _) in &cell.boundary {
                let Some(fc) = self.cells.get(face) else {
                    return Err(Error::MalformedComplex(format!("cell {id} references missing cell {face}")));
                };
                if fc.dim + 1 != cell.dim {
                    return Err(Error::MalformedComplex(format!(
                        "cell {id} of dimension {} has a face {face} of dimension {}",
                        cell.dim, fc.dim
                    )));
                }
                if self.marked[id] && !self.marked[face] {
                    return Err(Error::MalformedComplex(format!(
                        "marked cell {id} has unmarked face {face}"
                    )));
                }
            }
        }
        for id in 0..self.cells.len() {
            let dd = self.boundary_of_chain(&self.boundary_chain(id, field), field);
            if !dd.is_empty() {
                return Err(Error::MalformedComplex(format!("∂∂ ≠ 0 on cell {id}")));
            }
        }
        Ok(())
    }

    /// The boundary of a single cell as a chain over `field`.
    pub fn boundary_chain(&self, id: usize, field: PrimeField) -> Chain {
        let mut acc: HashMap<usize, Scalar> = HashMap::new();
        for &(face, c) in &self.cells[id].boundary {
            let e = acc.entry(face).or_insert(0);
            *e = field.add(*e, field.reduce(c));
        }
        normalize(acc)
    }

    pub fn boundary_of_chain(&self, chain: &[(usize, Scalar)], field: PrimeField) -> Chain {
        let mut acc: HashMap<usize, Scalar> = HashMap::new();
        for &(id, a) in chain {
            for &(face, c) in &self.cells[id].boundary {
                let e = acc.entry(face).or_insert(0);
                *e = field.add(*e, field.mul(a, field.reduce(c)));
            }
        }
        normalize(acc)
    }

    /// The marked subcomplex together with the map from its ids into `self`.
    pub fn marked_subcomplex(&self) -> (CellComplex, Vec<usize>) {
        let ids: Vec<usize> = (0..self.len()).filter(|&i| self.marked[i]).collect();
        let index: HashMap<usize, usize> = ids.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut sub = CellComplex::new();
        for &i in &ids {
            let cell = &self.cells[i];
            let boundary = cell.boundary.iter().map(|&(f, c)| (index[&f], c)).collect();
            sub.push(cell.dim, boundary, true);
        }
        (sub, ids)
    }

    /// The relative complex `self / marked`, with the ids of `self` that survive.
    pub fn quotient_by_marked(&self) -> (CellComplex, Vec<usize>) {
        let ids: Vec<usize> = (0..self.len()).filter(|&i| !self.marked[i]).collect();
        let index: HashMap<usize, usize> = ids.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut q = CellComplex::new();
        for &i in &ids {
            let cell = &self.cells[i];
            let boundary = cell
                .boundary
                .iter()
                .filter_map(|&(f, c)| index.get(&f).map(|&k| (k, c)))
                .collect();
            q.push(cell.dim, boundary, false);
        }
        (q, ids)
    }

    /// The dual complex: degree `top - dim`, boundary = coboundary.
    ///
    /// Homology of the dual in degree `top - j` is the cohomology of `self` in
    /// degree `j`, and cochains on `self` are chains on the dual with the same ids.
    pub fn dual(&self) -> CellComplex {
        let top = self.max_dim().unwrap_or(0);
        let mut cob: Vec<Vec<(usize, i64)>> = vec![Vec::new(); self.len()];
        for (id, cell) in self.cells.iter().enumerate() {
            for &(face, c) in &cell.boundary {
                cob[face].push((id, c));
            }
        }
        let mut d = CellComplex::new();
        for (id, cell) in self.cells.iter().enumerate() {
            d.push(top - cell.dim, std::mem::take(&mut cob[id]), false);
        }
        d
    }

    /// Boundary matrix `C_dim → C_{dim-1}` in the order of ids within each dimension.
    pub fn boundary_matrix(&self, dim: usize, field: PrimeField) -> Matrix {
        let src: Vec<usize> = (0..self.len()).filter(|&i| self.cells[i].dim == dim).collect();
        let tgt: Vec<usize> = if dim == 0 {
            Vec::new()
        } else {
            (0..self.len()).filter(|&i| self.cells[i].dim == dim - 1).collect()
        };
        let row: HashMap<usize, usize> = tgt.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut m = Matrix::zeros(tgt.len(), src.len());
        for (col, &i) in src.iter().enumerate() {
            for (face, c) in self.boundary_chain(i, field) {
                m.set(row[&face], col, c);
            }
        }
        m
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .map(|c| if c.dim % 2 == 0 { 1 } else { -1 })
            .sum()
    }
}

fn normalize(acc: HashMap<usize, Scalar>) -> Chain {
    let mut v: Chain = acc.into_iter().filter(|&(_, c)| c != 0).collect();
    v.sort_unstable_by_key(|&(i, _)| i);
    v
}

/// Adds `factor * b` into `a`; both sparse and sorted by index.
pub(crate) fn axpy(a: &[(usize, Scalar)], factor: Scalar, b: &[(usize, Scalar)], f: PrimeField) -> Chain {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            let v = f.mul(factor, b[j].1);
            if v != 0 {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = f.add(a[i].1, f.mul(factor, b[j].1));
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// How boundary ranks are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Dense,
    Sparse,
    /// Dense up to [`DENSE_LIMIT`] cells, sparse above.
    Auto,
}

pub const DENSE_LIMIT: usize = 2000;

/// Betti numbers `β_0 ..= β_top` over `field`.
pub fn betti_numbers(c: &CellComplex, field: PrimeField, strategy: Strategy) -> Vec<usize> {
    let top = match c.max_dim() {
        Some(t) => t,
        None => return Vec::new(),
    };
    let dense = match strategy {
        Strategy::Dense => true,
        Strategy::Sparse => false,
        Strategy::Auto => c.len() <= DENSE_LIMIT,
    };
    if dense {
        let ranks: Vec<usize> = (0..=top + 1)
            .map(|d| if d == 0 || d > top { 0 } else { c.boundary_matrix(d, field).rank(field) })
            .collect();
        (0..=top)
            .map(|d| c.count_in_dim(d) - ranks[d] - ranks[d + 1])
            .collect()
    } else {
        let h = Homology::compute(c, field, false);
        (0..=top).map(|d| h.betti(d)).collect()
    }
}

/// The result of reducing the full boundary matrix `D = R V`.
///
/// Columns are ordered by dimension, then id. Unpaired positive columns give
/// a homology basis whose representatives are the matching columns of `V`.
#[derive(Clone, Debug)]
pub struct Homology {
    field: PrimeField,
    /// `order[k]` is the cell id at filtration position `k`.
    order: Vec<usize>,
    position: Vec<usize>,
    dims: Vec<usize>,
    /// Reduced columns, indexed by position, entries in positions.
    reduced: Vec<Chain>,
    /// `V` columns (positions), when requested.
    v: Option<Vec<Chain>>,
    /// low position → column position owning that pivot.
    pivot_of: HashMap<usize, usize>,
    /// Positions of unpaired positive columns, per dimension.
    essential: Vec<Vec<usize>>,
}

impl Homology {
    /// Reduces the boundary matrix; `with_representatives` keeps `V`.
    pub fn compute(c: &CellComplex, field: PrimeField, with_representatives: bool) -> Self {
        let mut order: Vec<usize> = (0..c.len()).collect();
        order.sort_by_key(|&i| (c.cell(i).dim, i));
        let mut position = vec![0; c.len()];
        for (k, &i) in order.iter().enumerate() {
            position[i] = k;
        }
        let dims: Vec<usize> = order.iter().map(|&i| c.cell(i).dim).collect();
        let mut reduced: Vec<Chain> = Vec::with_capacity(c.len());
        let mut v: Vec<Chain> = Vec::new();
        let mut pivot_of: HashMap<usize, usize> = HashMap::new();
        for (k, &id) in order.iter().enumerate() {
            let mut col: Chain = c
                .boundary_chain(id, field)
                .into_iter()
                .map(|(f, a)| (position[f], a))
                .collect();
            col.sort_unstable_by_key(|&(p, _)| p);
            let mut vcol: Chain = vec![(k, 1)];
            while let Some(&(low, a)) = col.last() {
                let Some(&other) = pivot_of.get(&low) else { break };
                let b = reduced[other].last().unwrap().1;
                let factor = field.neg(field.mul(a, field.inv(b)));
                col = axpy(&col, factor, &reduced[other], field);
                if with_representatives {
                    vcol = axpy(&vcol, factor, &v[other], field);
                }
            }
            if let Some(&(low, _)) = col.last() {
                pivot_of.insert(low, k);
            }
            reduced.push(col);
            if with_representatives {
                v.push(vcol);
            }
        }
        let top = dims.last().copied().unwrap_or(0);
        let mut essential = vec![Vec::new(); top + 1];
        for k in 0..order.len() {
            if reduced[k].is_empty() && !pivot_of.contains_key(&k) {
                essential[dims[k]].push(k);
            }
        }
        Homology {
            field,
            order,
            position,
            dims,
            reduced,
            v: with_representatives.then_some(v),
            pivot_of,
            essential,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn betti(&self, dim: usize) -> usize {
        self.essential.get(dim).map_or(0, Vec::len)
    }

    /// Rank of the boundary map out of dimension `dim`.
    pub fn boundary_rank(&self, dim: usize) -> usize {
        (0..self.order.len())
            .filter(|&k| self.dims[k] == dim && !self.reduced[k].is_empty())
            .count()
    }

    /// Representative cycles (in cell ids) of a basis of `H_dim`.
    pub fn basis(&self, dim: usize) -> Vec<Chain> {
        let v = self.v.as_ref().expect("homology computed without representatives");
        self.essential
            .get(dim)
            .map(|ks| ks.iter().map(|&k| self.to_ids(&v[k])).collect())
            .unwrap_or_default()
    }

    fn to_ids(&self, chain: &[(usize, Scalar)]) -> Chain {
        let mut out: Chain = chain.iter().map(|&(p, a)| (self.order[p], a)).collect();
        out.sort_unstable_by_key(|&(i, _)| i);
        out
    }

    /// Coordinates of the class of `cycle` (cell ids) in the basis of `H_dim`.
    ///
    /// Fails if `cycle` is not a cycle of dimension `dim`.
    pub fn coordinates(&self, dim: usize, cycle: &[(usize, Scalar)]) -> Result<Vec<Scalar>> {
        let v = self.v.as_ref().expect("homology computed without representatives");
        let f = self.field;
        let ess = self.essential.get(dim).cloned().unwrap_or_default();
        let slot: HashMap<usize, usize> = ess.iter().enumerate().map(|(s, &k)| (k, s)).collect();
        let mut coords = vec![0; ess.len()];
        let mut z: Chain = cycle.iter().map(|&(i, a)| (self.position[i], a)).collect();
        z.sort_unstable_by_key(|&(p, _)| p);
        while let Some(&(low, a)) = z.last() {
            if self.dims[low] != dim {
                return Err(Error::NotAChainMap(format!("chain has a cell of dimension {}", self.dims[low])));
            }
            if let Some(&col) = self.pivot_of.get(&low) {
                let b = self.reduced[col].last().unwrap().1;
                z = axpy(&z, f.neg(f.mul(a, f.inv(b))), &self.reduced[col], f);
            } else if let Some(&s) = slot.get(&low) {
                coords[s] = a;
                z = axpy(&z, f.neg(a), &v[low], f);
            } else {
                return Err(Error::NotAChainMap("chain is not a cycle".into()));
            }
        }
        Ok(coords)
    }
}

/// `dim H_j` and a basis of representative cycles.
pub fn homology(c: &CellComplex, j: usize, field: PrimeField) -> (usize, Vec<Chain>) {
    let h = Homology::compute(c, field, true);
    (h.betti(j), h.basis(j))
}

/// The matrix of `H_j(source) → H_j(target)` induced by a cellular embedding.
///
/// `embedding[i]` is the target id of source cell `i`; the embedding must be
/// injective, preserve dimension and commute with the boundary.
pub fn induced_map(
    source: &CellComplex,
    target: &CellComplex,
    embedding: &[usize],
    j: usize,
    field: PrimeField,
) -> Result<Matrix> {
    check_chain_map(source, target, embedding, field)?;
    let hs = Homology::compute(source, field, true);
    let ht = Homology::compute(target, field, true);
    let cols: Result<Vec<Vec<Scalar>>> = hs
        .basis(j)
        .iter()
        .map(|z| {
            let mut pushed: Chain = z.iter().map(|&(i, a)| (embedding[i], a)).collect();
            pushed.sort_unstable_by_key(|&(i, _)| i);
            ht.coordinates(j, &pushed)
        })
        .collect();
    Ok(Matrix::from_columns(ht.betti(j), &cols?))
}

pub fn check_chain_map(source: &CellComplex, target: &CellComplex, embedding: &[usize], field: PrimeField) -> Result<()> {
    if embedding.len() != source.len() {
        return Err(Error::NotAChainMap("embedding length differs from source size".into()));
    }
    let mut seen = vec![false; target.len()];
    for (i, &t) in embedding.iter().enumerate() {
        if t >= target.len() || seen[t] {
            return Err(Error::NotAChainMap(format!("cell {i} is not mapped injectively")));
        }
        seen[t] = true;
        if source.cell(i).dim != target.cell(t).dim {
            return Err(Error::NotAChainMap(format!("cell {i} changes dimension")));
        }
        let mut pushed: Chain = source
            .boundary_chain(i, field)
            .into_iter()
            .map(|(f, a)| (embedding[f], a))
            .collect();
        pushed.sort_unstable_by_key(|&(k, _)| k);
        if pushed != target.boundary_chain(t, field) {
            return Err(Error::NotAChainMap(format!("boundary of cell {i} is not preserved")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(filled: bool) -> CellComplex {
        let mut c = CellComplex::new();
        let v: Vec<usize> = (0..3).map(|_| c.push(0, vec![], false)).collect();
        let e01 = c.push(1, vec![(v[1], 1), (v[0], -1)], false);
        let e12 = c.push(1, vec![(v[2], 1), (v[1], -1)], false);
        let e02 = c.push(1, vec![(v[2], 1), (v[0], -1)], false);
        if filled {
            c.push(2, vec![(e12, 1), (e02, -1), (e01, 1)], false);
        }
        c
    }

    #[test]
    fn hollow_and_filled_triangle() {
        for p in [2, 3, 5] {
            let f = PrimeField::new(p).unwrap();
            let hollow = triangle(false);
            hollow.validate(f).unwrap();
            assert_eq!(betti_numbers(&hollow, f, Strategy::Sparse), vec![1, 1]);
            assert_eq!(betti_numbers(&hollow, f, Strategy::Dense), vec![1, 1]);
            let filled = triangle(true);
            filled.validate(f).unwrap();
            assert_eq!(betti_numbers(&filled, f, Strategy::Auto), vec![1, 0, 0]);
        }
    }

    #[test]
    fn hollow_triangle_dies_in_filled_one() {
        let f = PrimeField::new(3).unwrap();
        let m = induced_map(&triangle(false), &triangle(true), &[0, 1, 2, 3, 4, 5], 1, f).unwrap();
        assert_eq!((m.rows(), m.cols()), (0, 1));
        assert_eq!(m.rank(f), 0);
        let id = induced_map(&triangle(false), &triangle(false), &[0, 1, 2, 3, 4, 5], 1, f).unwrap();
        assert_eq!(id, Matrix::identity(1));
    }

    #[test]
    fn vertex_pair_into_edge() {
        let f = PrimeField::TWO;
        let mut pair = CellComplex::new();
        pair.push(0, vec![], false);
        pair.push(0, vec![], false);
        let mut edge = pair.clone();
        edge.push(1, vec![(1, 1), (0, -1)], false);
        let m = induced_map(&pair, &edge, &[0, 1], 0, f).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 2));
        assert_eq!(m.rank(f), 1);
    }

    #[test]
    fn non_chain_map_rejected() {
        let f = PrimeField::TWO;
        let t = triangle(false);
        // swapping two edges breaks the boundary
        assert!(induced_map(&t, &t, &[0, 1, 2, 4, 3, 5], 1, f).is_err());
    }

    #[test]
    fn malformed_boundary_detected() {
        let mut c = CellComplex::new();
        c.push(0, vec![], false);
        c.push(1, vec![(0, 1)], false);
        c.push(2, vec![(1, 1)], false);
        assert!(c.validate(PrimeField::TWO).is_err());
    }

    #[test]
    fn cohomology_via_dual_matches_betti() {
        let f = PrimeField::new(5).unwrap();
        let t = triangle(false);
        let d = t.dual();
        let top = t.max_dim().unwrap();
        let hd = Homology::compute(&d, f, false);
        assert_eq!(hd.betti(top - 1), 1);
        assert_eq!(hd.betti(top), 1);
    }
}
