//! Smith normal form over the integers.
//!
//! Elimination runs on machine integers with checked arithmetic first and
//! restarts on arbitrary-precision integers if any intermediate overflows,
//! so the result is always exact. The pivot is the nonzero entry of least
//! absolute value in the remaining submatrix.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntegerMatrix, Matrix};

/// Rank and invariant factors `d_1 | d_2 | ... | d_rank`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl SmithDecomposition {
    /// Invariant factors greater than one.
    pub fn torsion_factors(&self) -> impl Iterator<Item = &BigInt> {
        self.invariant_factors.iter().filter(|d| !d.is_one())
    }
}

#[derive(Debug)]
struct Overflow;

trait Entry: Clone + Zero {
    fn cmp_abs(&self, other: &Self) -> Ordering;
    fn is_unit(&self) -> bool;
    /// Truncated quotient `self / pivot`.
    fn quotient(&self, pivot: &Self) -> Self;
    fn sub_mul(&mut self, q: &Self, b: &Self) -> Result<(), Overflow>;
    fn to_bigint_abs(&self) -> BigInt;
}

impl Entry for i64 {
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn quotient(&self, pivot: &Self) -> Self {
        // i64::MIN never occurs: inputs are below 2^63 and sub_mul rejects it.
        self / pivot
    }
    fn sub_mul(&mut self, q: &Self, b: &Self) -> Result<(), Overflow> {
        let prod = q.checked_mul(*b).ok_or(Overflow)?;
        *self = self.checked_sub(prod).ok_or(Overflow)?;
        if *self == i64::MIN {
            return Err(Overflow);
        }
        Ok(())
    }
    fn to_bigint_abs(&self) -> BigInt {
        BigInt::from(self.unsigned_abs())
    }
}

impl Entry for BigInt {
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn quotient(&self, pivot: &Self) -> Self {
        self / pivot
    }
    fn sub_mul(&mut self, q: &Self, b: &Self) -> Result<(), Overflow> {
        *self -= q * b;
        Ok(())
    }
    fn to_bigint_abs(&self) -> BigInt {
        self.abs()
    }
}

/// Smallest-magnitude nonzero entry of `a[t.., t..]`, stopping early at a unit.
fn find_pivot<T: Entry>(a: &Matrix<T>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        let row = a.row(i);
        for (j, v) in row.iter().enumerate().skip(t) {
            if v.is_zero() {
                continue;
            }
            if v.is_unit() {
                return Some((i, j));
            }
            if best.map_or(true, |(bi, bj)| v.cmp_abs(&a[(bi, bj)]) == Ordering::Less) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Diagonalizes `a` in place and returns the absolute diagonal entries.
fn diagonalize<T: Entry>(a: &mut Matrix<T>) -> Result<Vec<BigInt>, Overflow> {
    let (m, n) = (a.rows(), a.cols());
    let mut diagonal = Vec::new();
    for t in 0..m.min(n) {
        let Some((pi, pj)) = find_pivot(a, t) else { break };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].quotient(&a[(t, t)]);
                for j in t..n {
                    let pivot_row_entry = a[(t, j)].clone();
                    if !pivot_row_entry.is_zero() {
                        a[(i, j)].sub_mul(&q, &pivot_row_entry)?;
                    }
                }
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].quotient(&a[(t, t)]);
                for i in t..m {
                    let pivot_col_entry = a[(i, t)].clone();
                    if !pivot_col_entry.is_zero() {
                        a[(i, j)].sub_mul(&q, &pivot_col_entry)?;
                    }
                }
                clean &= a[(t, j)].is_zero();
            }
            if clean {
                break;
            }
            // A remainder survived: bring the smallest entry of row t or
            // column t to the pivot position and repeat.
            let mut best = (t, t);
            for i in t + 1..m {
                let v = &a[(i, t)];
                if !v.is_zero() && v.cmp_abs(&a[best]) == Ordering::Less {
                    best = (i, t);
                }
            }
            for j in t + 1..n {
                let v = &a[(t, j)];
                if !v.is_zero() && v.cmp_abs(&a[best]) == Ordering::Less {
                    best = (t, j);
                }
            }
            a.swap_rows(t, best.0);
            a.swap_cols(t, best.1);
        }
        diagonal.push(a[(t, t)].to_bigint_abs());
    }
    Ok(diagonal)
}

/// Turns an arbitrary diagonal into a divisibility chain with the same
/// cokernel.
fn normalize_chain(mut d: Vec<BigInt>) -> Vec<BigInt> {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if (&d[j] % &d[i]).is_zero() {
                continue;
            }
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

fn decompose(diagonal: Vec<BigInt>) -> SmithDecomposition {
    let invariant_factors = normalize_chain(diagonal);
    SmithDecomposition { rank: invariant_factors.len(), invariant_factors }
}

pub fn smith_normal_form(m: &IntegerMatrix) -> SmithDecomposition {
    let small = m.data_iter().all(|v| v.bits() < 63);
    if small {
        let mut a = m.map(|v| i64::try_from(v).expect("checked magnitude"));
        if let Ok(d) = diagonalize(&mut a) {
            return decompose(d);
        }
    }
    let mut a = m.clone();
    decompose(diagonalize(&mut a).expect("bigint arithmetic cannot overflow"))
}

/// Machine-integer entry point used by the homology routines.
pub(crate) fn smith_normal_form_i64(m: &Matrix<i64>) -> SmithDecomposition {
    let mut a = m.clone();
    match diagonalize(&mut a) {
        Ok(d) => decompose(d),
        Err(Overflow) => smith_normal_form(&IntegerMatrix::from(m)),
    }
}

/// Splits `n >= 2` into prime powers, ascending.
pub fn prime_power_factors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2u32);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            let mut q = BigInt::one();
            while (&n % &p).is_zero() {
                n /= &p;
                q *= &p;
            }
            out.push(q);
        }
        p += 1u32;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out.sort();
    out
}
