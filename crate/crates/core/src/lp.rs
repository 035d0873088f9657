//! Exact rational simplex for packing LPs and the covering LPs dual to them.
//!
//! The packing form `max c·x  s.t.  A x <= b, x >= 0` with `b >= 0` starts
//! from the all-slack basis, so no phase-one is needed. Bland's rule
//! (smallest entering index, smallest leaving basic index on ratio ties)
//! prevents cycling. Duals are read off the final objective row.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Optimal primal and dual solutions of a packing LP.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: BigRational,
    /// Primal variables `x`.
    pub primal: Vec<BigRational>,
    /// Dual variables `y` (one per constraint row), `A^T y >= c`, `b·y = value`.
    pub dual: Vec<BigRational>,
}

/// Solves `max c·x  s.t.  A x <= b, x >= 0`, where `b >= 0`.
///
/// Returns `Err(InvalidArgument)` for negative `b` or shape mismatch and
/// `Err(InvariantViolation)` if the LP is unbounded.
pub fn solve_packing(a: &[Vec<BigRational>], b: &[BigRational], c: &[BigRational]) -> Result<LpSolution> {
    let rows = a.len();
    let n = c.len();
    if b.len() != rows || a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("LP shape mismatch".into()));
    }
    if b.iter().any(|x| x.is_negative()) {
        return Err(Error::InvalidArgument("packing LP needs b >= 0".into()));
    }
    let width = n + rows;
    // tableau rows: [coefficients (width) | rhs]
    let mut tab: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row = a[r].clone();
            row.extend((0..rows).map(|s| if s == r { BigRational::one() } else { BigRational::zero() }));
            row.push(b[r].clone());
            row
        })
        .collect();
    // objective row holds reduced costs c_j - z_j; optimal when all <= 0
    let mut obj: Vec<BigRational> = c.iter().cloned().chain((0..=rows).map(|_| BigRational::zero())).collect();
    let mut basis: Vec<usize> = (n..width).collect();

    while let Some(enter) = (0..width).find(|&j| obj[j].is_positive()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..rows {
            if tab[r][enter].is_positive() {
                let ratio = &tab[r][width] / &tab[r][enter];
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            return Err(Error::InvariantViolation("packing LP is unbounded".into()));
        };
        pivot(&mut tab, &mut obj, pr, enter);
        basis[pr] = enter;
    }

    let mut primal = vec![BigRational::zero(); n];
    for (r, &var) in basis.iter().enumerate() {
        if var < n {
            primal[var] = tab[r][width].clone();
        }
    }
    let dual: Vec<BigRational> = (0..rows).map(|s| -obj[n + s].clone()).collect();
    let value = -obj[width].clone();
    Ok(LpSolution { value, primal, dual })
}

fn pivot(tab: &mut [Vec<BigRational>], obj: &mut [BigRational], pr: usize, pc: usize) {
    let p = tab[pr][pc].clone();
    for x in tab[pr].iter_mut() {
        *x = &*x / &p;
    }
    let prow = tab[pr].clone();
    for (r, row) in tab.iter_mut().enumerate() {
        if r == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for (x, y) in row.iter_mut().zip(&prow) {
            *x -= &f * y;
        }
    }
    let f = obj[pc].clone();
    if !f.is_zero() {
        for (x, y) in obj.iter_mut().zip(&prow) {
            *x -= &f * y;
        }
    }
}

/// Optimal fractional cover of `elements` by `sets`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverSolution {
    pub value: BigRational,
    /// One weight per set; zero for unused sets.
    pub weights: Vec<BigRational>,
}

/// Minimizes the total weight on `sets` (bitmasks over `0..elements`) so
/// that every element gets weight at least 1.
///
/// Solved through the dual packing LP; the returned cover is checked for
/// feasibility and for equality with the dual optimum before returning.
pub fn fractional_set_cover(elements: usize, sets: &[u64]) -> Result<CoverSolution> {
    if let Some(e) = (0..elements).find(|&e| sets.iter().all(|s| s >> e & 1 == 0)) {
        return Err(Error::InvalidArgument(format!("element {} is in no set", e + 1)));
    }
    let one = BigRational::one();
    let zero = BigRational::zero();
    // dual packing: max sum y_e  s.t.  sum_{e in S} y_e <= 1 for every set S
    let a: Vec<Vec<BigRational>> = sets
        .iter()
        .map(|&s| (0..elements).map(|e| if s >> e & 1 == 1 { one.clone() } else { zero.clone() }).collect())
        .collect();
    let b = vec![one.clone(); sets.len()];
    let c = vec![one.clone(); elements];
    let sol = solve_packing(&a, &b, &c)?;
    let weights = sol.dual;
    for e in 0..elements {
        let covered: BigRational = sets
            .iter()
            .zip(&weights)
            .filter(|(s, _)| *s >> e & 1 == 1)
            .fold(BigRational::zero(), |acc, (_, w)| acc + w);
        if covered < one {
            return Err(Error::InvariantViolation(format!("LP cover leaves element {} short", e + 1)));
        }
    }
    let total = weights.iter().fold(BigRational::zero(), |acc, w| acc + w);
    if total != sol.value || weights.iter().any(|w| w.is_negative()) {
        return Err(Error::InvariantViolation("LP primal and dual optima differ".into()));
    }
    Ok(CoverSolution { value: total, weights })
}

/// Integer-valued rational, for building LP inputs.
pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_packing_lp() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6 -> x = 8/5, y = 6/5, value 14/5
        let a = vec![vec![int(1), int(2)], vec![int(3), int(1)]];
        let sol = solve_packing(&a, &[int(4), int(6)], &[int(1), int(1)]).unwrap();
        assert_eq!(sol.value, r(14, 5));
        assert_eq!(sol.primal, vec![r(8, 5), r(6, 5)]);
        // dual: 4 y1 + 6 y2 = 14/5 with y1 + 3 y2 = 1, 2 y1 + y2 = 1
        assert_eq!(sol.dual, vec![r(2, 5), r(1, 5)]);
    }

    #[test]
    fn unbounded_is_reported() {
        let a = vec![vec![int(1), int(-1)]];
        assert!(solve_packing(&a, &[int(1)], &[int(0), int(1)]).is_err());
    }

    #[test]
    fn degenerate_lp_terminates() {
        // classic degenerate instance; Bland's rule must terminate
        let a = vec![
            vec![r(1, 4), int(-8), int(-1), int(9)],
            vec![r(1, 2), int(-12), r(-1, 2), int(3)],
            vec![int(0), int(0), int(1), int(0)],
        ];
        let sol = solve_packing(&a, &[int(0), int(0), int(1)], &[r(3, 4), int(-20), r(1, 2), int(-6)]).unwrap();
        assert_eq!(sol.value, r(5, 4));
    }

    #[test]
    fn odd_cycle_cover() {
        // edges of a 5-cycle cover its vertices with value 5/2
        let sets: Vec<u64> = (0..5).map(|i| (1 << i) | (1 << ((i + 1) % 5))).collect();
        let sol = fractional_set_cover(5, &sets).unwrap();
        assert_eq!(sol.value, r(5, 2));
    }

    #[test]
    fn singletons_and_whole_set() {
        assert_eq!(fractional_set_cover(3, &[1, 2, 4]).unwrap().value, int(3));
        assert_eq!(fractional_set_cover(3, &[7, 1]).unwrap().value, int(1));
        assert!(fractional_set_cover(2, &[1]).is_err());
    }
}
