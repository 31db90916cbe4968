//! Abstract simplices and simplicial complexes on sensor indices.

use crate::chain::CellComplex;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A simplex as a strictly increasing, nonempty list of vertex indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts and validates the vertices.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.is_empty() {
            return Err(Error::MalformedComplex("empty simplex".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedComplex(format!("repeated vertex in {vertices:?}")));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertex(v: usize) -> Self {
        Simplex(vec![v])
    }

    pub fn edge(a: usize, b: usize) -> Self {
        Simplex::new(vec![a, b]).expect("edge endpoints must differ")
    }

    pub fn triangle(a: usize, b: usize, c: usize) -> Self {
        Simplex::new(vec![a, b, c]).expect("triangle vertices must differ")
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Codimension-one faces, `i`-th face omits the `i`-th vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = self.0.len();
        (0..if n > 1 { n } else { 0 }).map(move |i| {
            let mut v = self.0.clone();
            v.remove(i);
            Simplex(v)
        })
    }

    /// All nonempty faces including itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (1u32..(1 << n))
            .map(|mask| Simplex((0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.0[i]).collect()))
            .collect()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains_vertex(*v))
    }
}

impl TryFrom<Vec<usize>> for Simplex {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Simplex::new(v)
    }
}

impl From<Simplex> for Vec<usize> {
    fn from(s: Simplex) -> Self {
        s.0
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A face-closed set of simplices.
#[derive(Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplicialComplex {
    simplices: BTreeSet<Simplex>,
}

impl SimplicialComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// The closure of the given simplices.
    pub fn closure<I: IntoIterator<Item = Simplex>>(simplices: I) -> Self {
        let mut set = BTreeSet::new();
        for s in simplices {
            for f in s.faces() {
                set.insert(f);
            }
        }
        SimplicialComplex { simplices: set }
    }

    /// Wraps a set that must already be face-closed.
    pub fn from_closed(simplices: BTreeSet<Simplex>) -> Result<Self> {
        let c = SimplicialComplex { simplices };
        c.check_closed()?;
        Ok(c)
    }

    pub fn check_closed(&self) -> Result<()> {
        for s in &self.simplices {
            for f in s.facets() {
                if !self.simplices.contains(&f) {
                    return Err(Error::MalformedComplex(format!("face {f:?} of {s:?} missing")));
                }
            }
        }
        Ok(())
    }

    pub fn insert(&mut self, s: Simplex) -> bool {
        self.simplices.insert(s)
    }

    pub fn remove(&mut self, s: &Simplex) -> bool {
        self.simplices.remove(s)
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn simplices(&self) -> &BTreeSet<Simplex> {
        &self.simplices
    }

    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().map(Simplex::dim).max()
    }

    pub fn count_in_dim(&self, d: usize) -> usize {
        self.simplices.iter().filter(|s| s.dim() == d).count()
    }

    pub fn of_dim(&self, d: usize) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().filter(move |s| s.dim() == d)
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.of_dim(0).map(|s| s.vertices()[0]).collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.of_dim(1).map(|s| (s.vertices()[0], s.vertices()[1])).collect()
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.simplices.is_subset(&other.simplices)
    }

    pub fn union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        SimplicialComplex {
            simplices: self.simplices.union(&other.simplices).cloned().collect(),
        }
    }

    /// The full subcomplex on the given vertex set.
    pub fn induced(&self, vertices: &BTreeSet<usize>) -> SimplicialComplex {
        SimplicialComplex {
            simplices: self
                .simplices
                .iter()
                .filter(|s| s.vertices().iter().all(|v| vertices.contains(v)))
                .cloned()
                .collect(),
        }
    }

    /// Cofaces of `s` one dimension up.
    pub fn cofacets<'a>(&'a self, s: &'a Simplex) -> impl Iterator<Item = &'a Simplex> + 'a {
        self.simplices
            .iter()
            .filter(move |t| t.dim() == s.dim() + 1 && s.is_face_of(t))
    }

    /// Number of connected components of the 1-skeleton.
    pub fn component_count(&self) -> usize {
        let verts = self.vertices();
        let index: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let n = p[y];
                p[y] = r;
                y = n;
            }
            r
        }
        let mut count = verts.len();
        for (a, b) in self.edges() {
            let (ra, rb) = (find(&mut parent, index[&a]), find(&mut parent, index[&b]));
            if ra != rb {
                parent[ra] = rb;
                count -= 1;
            }
        }
        count
    }

    /// Converts to a cell complex with oriented simplicial boundaries.
    ///
    /// Returns the complex and the id assigned to each simplex; simplices whose
    /// vertices all lie in `marked` are marked.
    pub fn to_cell_complex(&self, marked: &BTreeSet<usize>) -> (CellComplex, BTreeMap<Simplex, usize>) {
        let mut ordered: Vec<&Simplex> = self.simplices.iter().collect();
        ordered.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
        let mut ids = BTreeMap::new();
        let mut c = CellComplex::new();
        for s in ordered {
            let boundary = s
                .facets()
                .enumerate()
                .map(|(i, f)| (ids[&f], if i % 2 == 0 { 1 } else { -1 }))
                .collect();
            let m = s.vertices().iter().all(|v| marked.contains(v));
            let id = c.push(s.dim(), boundary, m);
            ids.insert(s.clone(), id);
        }
        (c, ids)
    }
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.simplices.iter()).finish()
    }
}

impl FromIterator<Simplex> for SimplicialComplex {
    fn from_iter<T: IntoIterator<Item = Simplex>>(iter: T) -> Self {
        SimplicialComplex::closure(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{betti_numbers, Strategy};
    use crate::field::PrimeField;

    #[test]
    fn simplex_normalizes_and_rejects_repeats() {
        assert_eq!(Simplex::new(vec![3, 1, 2]).unwrap().vertices(), &[1, 2, 3]);
        assert!(Simplex::new(vec![1, 1]).is_err());
        assert!(Simplex::new(vec![]).is_err());
        assert_eq!(Simplex::triangle(0, 1, 2).faces().len(), 7);
    }

    #[test]
    fn closure_and_boundary() {
        let k = SimplicialComplex::closure([Simplex::triangle(0, 1, 2), Simplex::edge(2, 3)]);
        assert_eq!(k.len(), 4 + 4 + 1);
        k.check_closed().unwrap();
        let (c, _) = k.to_cell_complex(&BTreeSet::new());
        for p in [2, 3] {
            let f = PrimeField::new(p).unwrap();
            c.validate(f).unwrap();
            assert_eq!(betti_numbers(&c, f, Strategy::Auto), vec![1, 0, 0]);
        }
        assert_eq!(k.component_count(), 1);
    }

    #[test]
    fn open_set_rejected() {
        let mut set = BTreeSet::new();
        set.insert(Simplex::edge(0, 1));
        assert!(SimplicialComplex::from_closed(set).is_err());
    }
}
