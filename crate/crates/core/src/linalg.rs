//! Exact rank computations over the rationals, carried out on integer rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// Rank of a set of integer row vectors (all of the same length).
///
/// Uses fraction-free elimination: each update cross-multiplies by the pivot
/// and divides the row by its content, so entries stay integral and small.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    if m.is_empty() {
        return 0;
    }
    let width = m[0].len();
    let mut r = 0;
    for c in 0..width {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot_row = m[r].clone();
        let pivot = pivot_row[c].clone();
        for row in m.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = &*x * &pivot - &factor * y;
            }
            reduce_content(row);
        }
        r += 1;
    }
    r
}

/// Rank of small-integer rows.
pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    rank(&big)
}

fn reduce_content(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && g.abs() != BigInt::from(1) {
        for x in row.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Whether `row` lies in the rational row span of `basis`.
pub fn in_span(row: &[BigInt], basis: &[Vec<BigInt>]) -> bool {
    let base = rank(basis);
    let mut all = basis.to_vec();
    all.push(row.to_vec());
    rank(&all) == base
}

/// Row space of a set of rational vectors, kept in reduced row echelon form.
#[derive(Clone, Debug)]
pub struct RowSpace {
    /// Reduced rows; `pivots[r]` is the pivot column of `rows[r]` (entry 1).
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
    width: usize,
}

impl RowSpace {
    pub fn new(width: usize, generators: &[Vec<Rational>]) -> Self {
        let mut space = RowSpace { rows: Vec::new(), pivots: Vec::new(), width };
        for g in generators {
            space.insert(g);
        }
        space
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Component of `v` outside the span: `v` minus its reduction by the
    /// echelon rows. Zero iff `v` lies in the span. Linear in `v`.
    pub fn residual(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.width, "vector width mismatch");
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = r[p];
            if !f.is_zero() {
                for (x, y) in r.iter_mut().zip(row) {
                    *x = *x - f * *y;
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.residual(v).iter().all(Rational::is_zero)
    }

    fn insert(&mut self, v: &[Rational]) {
        let r = self.residual(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return;
        };
        let lead = r[p];
        let new: Vec<Rational> = r.iter().map(|&x| x / lead).collect();
        for row in self.rows.iter_mut() {
            let f = row[p];
            if !f.is_zero() {
                for (x, y) in row.iter_mut().zip(&new) {
                    *x = *x - f * *y;
                }
            }
        }
        self.rows.push(new);
        self.pivots.push(p);
    }
}
