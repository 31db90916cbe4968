//! Exhaustive interval decomposition over `F_2`, used as a test oracle.
//!
//! For every window `[b, d]` the compatible families `(x_b, …, x_d)` of the
//! restricted diagram are enumerated outright; their image in the colimit
//! counts the summands whose support contains the window. Inclusion–exclusion
//! over windows then yields each interval's multiplicity.

use super::{Barcode, Direction, ZigzagModule};
use crate::error::{Error, Result};

/// Upper bound on the total dimension handled by [`brute_force_decompose`].
pub const BRUTE_FORCE_LIMIT: usize = 21;

pub fn brute_force_decompose(z: &ZigzagModule) -> Result<Barcode> {
    if z.field.characteristic() != 2 {
        return Err(Error::SizeLimit("brute force runs over F_2 only".into()));
    }
    let total: usize = z.dims.iter().sum();
    if total > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit(format!("total dimension {total} exceeds {BRUTE_FORCE_LIMIT}")));
    }
    let m = z.len();
    // covering[b][d] for 0-based inclusive windows
    let mut covering = vec![vec![0usize; m]; m];
    for b in 0..m {
        for d in b..m {
            covering[b][d] = window_rank(z, b, d);
        }
    }
    let c = |b: isize, d: usize| -> isize {
        if b < 0 || d >= m {
            0
        } else {
            covering[b as usize][d] as isize
        }
    };
    let mut intervals = Vec::new();
    for b in 0..m {
        for d in b..m {
            let mult = c(b as isize, d) - c(b as isize - 1, d) - c(b as isize, d + 1) + c(b as isize - 1, d + 1);
            assert!(mult >= 0, "negative multiplicity: module is not interval decomposable?");
            for _ in 0..mult {
                intervals.push((b + 1, d + 1));
            }
        }
    }
    Ok(Barcode::new(m, intervals))
}

/// Bit `k` of a slot vector is coordinate `k`.
fn apply(matrix: &crate::linalg::Matrix, x: u64) -> u64 {
    let mut out = 0u64;
    for i in 0..matrix.rows() {
        let mut bit = 0;
        for j in 0..matrix.cols() {
            if matrix.get(i, j) & 1 == 1 && (x >> j) & 1 == 1 {
                bit ^= 1;
            }
        }
        out |= (bit as u64) << i;
    }
    out
}

/// Rank of `lim → colim` for the window `[b, d]`.
fn window_rank(z: &ZigzagModule, b: usize, d: usize) -> usize {
    let offsets: Vec<usize> = (b..=d)
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += z.dims[s];
            Some(o)
        })
        .collect();
    let total: usize = (b..=d).map(|s| z.dims[s]).sum();
    let part = |x: u64, s: usize| -> u64 { (x >> offsets[s - b]) & ((1u64 << z.dims[s]) - 1) };
    let embed = |v: u64, s: usize| -> u64 { v << offsets[s - b] };

    let mut lim = Vec::new();
    for x in 0u64..(1u64 << total) {
        let compatible = (b..d).all(|s| {
            let a = &z.arrows[s];
            match a.direction {
                Direction::Right => apply(&a.matrix, part(x, s)) == part(x, s + 1),
                Direction::Left => apply(&a.matrix, part(x, s + 1)) == part(x, s),
            }
        });
        if compatible {
            lim.push(x);
        }
    }

    let mut relations = XorBasis::default();
    for s in b..d {
        let a = &z.arrows[s];
        let (src, tgt) = match a.direction {
            Direction::Right => (s, s + 1),
            Direction::Left => (s + 1, s),
        };
        for k in 0..z.dims[src] {
            let y = 1u64 << k;
            relations.insert(embed(apply(&a.matrix, y), tgt) ^ embed(y, src));
        }
    }
    let base = relations.rank();
    for x in lim {
        relations.insert(embed(part(x, b), b));
    }
    relations.rank() - base
}

#[derive(Default)]
struct XorBasis {
    rows: Vec<u64>,
}

impl XorBasis {
    fn insert(&mut self, mut v: u64) {
        for &r in &self.rows {
            v = v.min(v ^ r);
        }
        if v != 0 {
            self.rows.push(v);
            self.rows.sort_unstable_by(|a, b| b.cmp(a));
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}
