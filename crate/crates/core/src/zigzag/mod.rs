//! Zigzag modules, their interval decomposition, and the full-length-bar
//! evasion criterion.
//!
//! Slots are numbered `1..=m` in every public type. A module built from an
//! event stream with `n` events has `m = 2n + 1` slots: odd slots hold the
//! homology of a slice complex, even slots the homology of the union of two
//! consecutive slices.
//!
//! [`decompose`] sweeps the module left to right, keeping a basis of the
//! current space in which every vector generates the restriction of one
//! interval summand. Change of basis is only allowed along nonzero morphisms
//! between interval modules; that rule fixes which bar ends when a kernel
//! appears, and it is what [`absorb order`](OpenBars) encodes.

mod brute;
mod stream;

pub use brute::{brute_force_decompose, BRUTE_FORCE_LIMIT};
pub use stream::{
    batch_barcode, cohomology_zigzag, stream_barcode, stream_barcode_with_stats, zigzag_from_stream, StreamStats,
    StreamingState,
};

use crate::error::{Error, Result};
use crate::field::{PrimeField, Scalar};
use crate::linalg::Matrix;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `V_i → V_{i+1}`
    Right,
    /// `V_i ← V_{i+1}`
    Left,
}

/// One structure map between adjacent slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub direction: Direction,
    /// `dim(target) x dim(source)`.
    pub matrix: Matrix,
}

/// A zigzag module over a prime field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZigzagModule {
    pub field: PrimeField,
    pub dims: Vec<usize>,
    pub arrows: Vec<Arrow>,
}

impl ZigzagModule {
    /// Builds a module and checks matrix shapes.
    pub fn new(field: PrimeField, dims: Vec<usize>, arrows: Vec<Arrow>) -> Result<Self> {
        let z = ZigzagModule { field, dims, arrows };
        z.validate()?;
        Ok(z)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::InvalidParameter("zigzag module needs at least one slot".into()));
        }
        if self.arrows.len() + 1 != self.dims.len() {
            return Err(Error::InvalidParameter("arrow count must be slot count minus one".into()));
        }
        for (i, a) in self.arrows.iter().enumerate() {
            let (src, tgt) = match a.direction {
                Direction::Right => (self.dims[i], self.dims[i + 1]),
                Direction::Left => (self.dims[i + 1], self.dims[i]),
            };
            if a.matrix.rows() != tgt || a.matrix.cols() != src {
                return Err(Error::InvalidParameter(format!(
                    "arrow {} has shape {}x{}, expected {}x{}",
                    i + 1,
                    a.matrix.rows(),
                    a.matrix.cols(),
                    tgt,
                    src
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// The interval module `I(b, d)` on `directions.len() + 1` slots.
    pub fn interval(field: PrimeField, directions: &[Direction], b: usize, d: usize) -> Self {
        let m = directions.len() + 1;
        assert!(1 <= b && b <= d && d <= m);
        let dims: Vec<usize> = (1..=m).map(|i| usize::from(b <= i && i <= d)).collect();
        let arrows = directions
            .iter()
            .enumerate()
            .map(|(i, &direction)| {
                let (src, tgt) = match direction {
                    Direction::Right => (dims[i], dims[i + 1]),
                    Direction::Left => (dims[i + 1], dims[i]),
                };
                let mut matrix = Matrix::zeros(tgt, src);
                if src == 1 && tgt == 1 {
                    matrix.set(0, 0, 1);
                }
                Arrow { direction, matrix }
            })
            .collect();
        ZigzagModule { field, dims, arrows }
    }

    /// Slotwise direct sum; directions must agree.
    pub fn direct_sum(&self, other: &ZigzagModule) -> Result<Self> {
        if self.field != other.field || self.dims.len() != other.dims.len() {
            return Err(Error::InvalidParameter("direct sum of incompatible modules".into()));
        }
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let mut arrows = Vec::new();
        for (a, b) in self.arrows.iter().zip(&other.arrows) {
            if a.direction != b.direction {
                return Err(Error::InvalidParameter("arrow directions differ".into()));
            }
            let (r1, c1, r2, c2) = (a.matrix.rows(), a.matrix.cols(), b.matrix.rows(), b.matrix.cols());
            let mut m = Matrix::zeros(r1 + r2, c1 + c2);
            for i in 0..r1 {
                for j in 0..c1 {
                    m.set(i, j, a.matrix.get(i, j));
                }
            }
            for i in 0..r2 {
                for j in 0..c2 {
                    m.set(r1 + i, c1 + j, b.matrix.get(i, j));
                }
            }
            arrows.push(Arrow { direction: a.direction, matrix: m });
        }
        Ok(ZigzagModule { field: self.field, dims, arrows })
    }

    /// The dual module: arrows reversed, matrices transposed.
    pub fn dual(&self) -> Self {
        let arrows = self
            .arrows
            .iter()
            .map(|a| Arrow {
                direction: match a.direction {
                    Direction::Right => Direction::Left,
                    Direction::Left => Direction::Right,
                },
                matrix: a.matrix.transpose(),
            })
            .collect();
        ZigzagModule { field: self.field, dims: self.dims.clone(), arrows }
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.arrows.iter().map(|a| a.direction).collect()
    }
}

/// A multiset of intervals `[b, d]` with `1 ≤ b ≤ d ≤ m`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Barcode {
    /// Number of slots.
    pub length: usize,
    pub intervals: Vec<(usize, usize)>,
}

impl Barcode {
    pub fn new(length: usize, mut intervals: Vec<(usize, usize)>) -> Self {
        intervals.sort_unstable();
        Barcode { length, intervals }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn has_full_length(&self) -> bool {
        self.intervals.contains(&(1, self.length))
    }

    pub fn multiplicity(&self, b: usize, d: usize) -> usize {
        self.intervals.iter().filter(|&&iv| iv == (b, d)).count()
    }

    /// Checks slot dimensions and arrow ranks against `module`.
    pub fn check_consistency(&self, module: &ZigzagModule) -> Result<()> {
        if self.length != module.len() {
            return Err(Error::InvalidParameter("barcode length differs from module length".into()));
        }
        for (i, &dim) in module.dims.iter().enumerate() {
            let slot = i + 1;
            let count = self.intervals.iter().filter(|&&(b, d)| b <= slot && slot <= d).count();
            if count != dim {
                return Err(Error::InvalidParameter(format!("slot {slot}: {count} bars but dimension {dim}")));
            }
        }
        for (i, a) in module.arrows.iter().enumerate() {
            let slot = i + 1;
            let count = self
                .intervals
                .iter()
                .filter(|&&(b, d)| b <= slot && slot < d)
                .count();
            let rank = a.matrix.rank(module.field);
            if count != rank {
                return Err(Error::InvalidParameter(format!(
                    "arrow {slot}: {count} bars span it but its rank is {rank}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Barcode(m={}, {:?})", self.length, self.intervals)
    }
}

/// Verdict of a necessary-only homological criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionVerdict {
    /// A full-length bar is present; the criterion cannot exclude evasion.
    EvasionPossible,
    NoEvasionCertified,
}

/// No full-length bar `[1, 2n+1]` in `ZH_{d-1}` certifies that no evasion path exists.
pub fn full_length_criterion(barcode: &Barcode, n: usize) -> CriterionVerdict {
    if barcode.intervals.contains(&(1, 2 * n + 1)) {
        CriterionVerdict::EvasionPossible
    } else {
        CriterionVerdict::NoEvasionCertified
    }
}

/// Open bars of a left-to-right sweep, kept in absorb order.
///
/// For two open bars `x` (lower) and `y` (higher) the generator of `x` may be
/// added into the generator of `y`; an interval born across a right arrow is
/// inserted at the top, one born across a left arrow at the bottom. Kernels
/// are always assigned to the highest participating bar.
#[derive(Clone, Debug, Default)]
pub(crate) struct OpenBars {
    /// 0-based birth slot of each bar.
    pub births: Vec<usize>,
    /// Generator in coordinates of the current slot's basis.
    pub vectors: Vec<Vec<Scalar>>,
}

pub(crate) struct StepResult {
    /// 0-based birth slots of the bars that close at the current slot.
    pub closed: Vec<usize>,
}

impl OpenBars {
    pub fn initial(dim: usize) -> Self {
        let vectors = (0..dim).map(|i| unit(dim, i)).collect();
        OpenBars { births: vec![0; dim], vectors }
    }

    pub fn len(&self) -> usize {
        self.births.len()
    }

    /// Crosses `V_slot → V_{slot+1}`; `images[j]` is the image of generator `j`
    /// in the target basis of dimension `target_dim`.
    pub fn step_right(&mut self, slot: usize, images: Vec<Vec<Scalar>>, target_dim: usize, f: PrimeField) -> StepResult {
        let mut pivots: Vec<(usize, Vec<Scalar>)> = Vec::new();
        let mut births = Vec::new();
        let mut vectors = Vec::new();
        let mut closed = Vec::new();
        for (j, mut col) in images.into_iter().enumerate() {
            reduce_by(&mut col, &pivots, f);
            match last_nonzero(&col) {
                None => closed.push(self.births[j]),
                Some(p) => {
                    pivots.push((p, col.clone()));
                    births.push(self.births[j]);
                    vectors.push(col);
                }
            }
        }
        for l in 0..target_dim {
            let mut e = unit(target_dim, l);
            reduce_by(&mut e, &pivots, f);
            if let Some(p) = last_nonzero(&e) {
                pivots.push((p, e));
                births.push(slot + 1);
                vectors.push(unit(target_dim, l));
            }
        }
        self.births = births;
        self.vectors = vectors;
        StepResult { closed }
    }

    /// Crosses `V_slot ← V_{slot+1}`; `preimages[l]` is the image of the
    /// `l`-th basis vector of `V_{slot+1}` written in the current generators.
    pub fn step_left(&mut self, slot: usize, preimages: Vec<Vec<Scalar>>, target_dim: usize, f: PrimeField) -> StepResult {
        let k = self.len();
        let mut pivots: Vec<(usize, Vec<Scalar>)> = Vec::new();
        let mut combos: Vec<Vec<Scalar>> = Vec::new();
        let mut kernel: Vec<Vec<Scalar>> = Vec::new();
        let mut new_vec: Vec<Option<Vec<Scalar>>> = vec![None; k];
        for (l, mut col) in preimages.into_iter().enumerate() {
            let mut u = unit(target_dim, l);
            while let Some(idx) = last_nonzero(&col).and_then(|p| pivots.iter().position(|(q, _)| *q == p)) {
                let p = pivots[idx].0;
                let factor = f.neg(f.mul(col[p], f.inv(pivots[idx].1[p])));
                add_scaled(&mut col, factor, &pivots[idx].1, f);
                add_scaled(&mut u, factor, &combos[idx], f);
            }
            match last_nonzero(&col) {
                None => kernel.push(u),
                Some(p) => {
                    let inv = f.inv(col[p]);
                    new_vec[p] = Some(u.iter().map(|&x| f.mul(x, inv)).collect());
                    pivots.push((p, col));
                    combos.push(u);
                }
            }
        }
        let mut births: Vec<usize> = vec![slot + 1; kernel.len()];
        let mut vectors = kernel;
        let mut closed = Vec::new();
        for (j, v) in new_vec.into_iter().enumerate() {
            match v {
                Some(v) => {
                    births.push(self.births[j]);
                    vectors.push(v);
                }
                None => closed.push(self.births[j]),
            }
        }
        self.births = births;
        self.vectors = vectors;
        StepResult { closed }
    }

    /// Matrix whose columns are the generators.
    pub fn generator_matrix(&self, dim: usize) -> Matrix {
        Matrix::from_columns(dim, &self.vectors)
    }
}

fn unit(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn last_nonzero(v: &[Scalar]) -> Option<usize> {
    v.iter().rposition(|&x| x != 0)
}

fn add_scaled(a: &mut [Scalar], factor: Scalar, b: &[Scalar], f: PrimeField) {
    for (x, &y) in a.iter_mut().zip(b) {
        *x = f.add(*x, f.mul(factor, y));
    }
}

fn reduce_by(col: &mut [Scalar], pivots: &[(usize, Vec<Scalar>)], f: PrimeField) {
    loop {
        let Some(p) = last_nonzero(col) else { return };
        let Some((_, piv)) = pivots.iter().find(|(q, _)| *q == p) else { return };
        let factor = f.neg(f.mul(col[p], f.inv(piv[p])));
        add_scaled(col, factor, piv, f);
    }
}

/// Interval decomposition of a zigzag module.
///
/// Output intervals are sorted by birth, then death.
pub fn decompose(z: &ZigzagModule) -> Barcode {
    let f = z.field;
    let m = z.len();
    let mut open = OpenBars::initial(z.dims[0]);
    let mut bars = Vec::new();
    for (i, arrow) in z.arrows.iter().enumerate() {
        let target_dim = z.dims[i + 1];
        let result = match arrow.direction {
            Direction::Right => {
                let images = open.vectors.iter().map(|v| arrow.matrix.mul_vec(v, f)).collect();
                open.step_right(i, images, target_dim, f)
            }
            Direction::Left => {
                let gens = open.generator_matrix(z.dims[i]);
                let inv = gens.inverse(f).expect("open generators form a basis");
                let in_gens = inv.mul(&arrow.matrix, f);
                open.step_left(i, in_gens.columns(), target_dim, f)
            }
        };
        bars.extend(result.closed.into_iter().map(|b| (b + 1, i + 1)));
    }
    bars.extend(open.births.iter().map(|&b| (b + 1, m)));
    Barcode::new(m, bars)
}
