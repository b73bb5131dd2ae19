//! Small exact linear algebra on integer exponent vectors.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{q, FieldElement, Q};

fn to_field(rows: &[Vec<i64>], p: u64) -> Vec<Vec<FieldElement>> {
    rows.iter()
        .map(|r| r.iter().map(|&e| FieldElement::from_int(p, e)).collect())
        .collect()
}

/// Row echelon form over the field of characteristic `p`; returns pivot columns.
fn echelon(m: &mut [Vec<FieldElement>]) -> Vec<usize> {
    let mut pivots = Vec::new();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        let Some(k) = (r..m.len()).find(|&k| !m[k][col].is_zero()) else {
            continue;
        };
        m.swap(r, k);
        let inv = m[r][col].inv().expect("nonzero pivot");
        for k in 0..m.len() {
            if k != r && !m[k][col].is_zero() {
                let f = m[k][col].mul(&inv);
                let pivot_row = m[r].clone();
                for (a, b) in m[k].iter_mut().zip(&pivot_row) {
                    *a = a.sub(&f.mul(b));
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Rank of the integer rows read in characteristic `p`.
pub fn rank(rows: &[Vec<i64>], p: u64) -> usize {
    echelon(&mut to_field(rows, p)).len()
}

/// The first column where `v` is independent of `rows` in characteristic `p`,
/// or `None` if `v` lies in their span.
pub fn new_pivot(rows: &[Vec<i64>], v: &[i64], p: u64) -> Option<usize> {
    let mut m = to_field(rows, p);
    let before = echelon(&mut m);
    let mut w: Vec<FieldElement> = v.iter().map(|&e| FieldElement::from_int(p, e)).collect();
    for (r, &col) in before.iter().enumerate() {
        if !w[col].is_zero() {
            let f = w[col].div(&m[r][col]).unwrap();
            for (a, b) in w.iter_mut().zip(&m[r]) {
                *a = a.sub(&f.mul(b));
            }
        }
    }
    w.iter().position(|e| !e.is_zero())
}

/// Rational coefficients `c` with `Σ c_k rows_k = v`, if `v` is in the rational span.
pub fn solve(rows: &[Vec<i64>], v: &[i64]) -> Option<Vec<Q>> {
    let k = rows.len();
    let n = v.len();
    // augmented system: columns are the rows, plus the right-hand side
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut r: Vec<Q> = rows.iter().map(|row| q(row[i])).collect();
            r.push(q(v[i]));
            r
        })
        .collect();
    let mut piv = Vec::new();
    let mut r = 0;
    for col in 0..k {
        let Some(s) = (r..n).find(|&s| !m[s][col].is_zero()) else {
            continue;
        };
        m.swap(r, s);
        let p = m[r][col].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &p;
        }
        for s in 0..n {
            if s != r && !m[s][col].is_zero() {
                let f = m[s][col].clone();
                let pr = m[r].clone();
                for (a, b) in m[s].iter_mut().zip(&pr) {
                    *a -= &f * b;
                }
            }
        }
        piv.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut c = vec![Q::zero(); k];
    for (row, &col) in piv.iter().enumerate() {
        c[col] = m[row][k].clone();
    }
    Some(c)
}

/// A `ℤ`-basis of the integer relations `{c : Σ c_k rows_k = 0}`.
pub fn integer_relations(rows: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let k = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let overflow = || Error::Algebra("integer overflow in lattice reduction".into());
    // [A | I] with integer row operations only
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<i128> = r.iter().map(|&e| e as i128).collect();
            row.extend((0..k).map(|j| i128::from(i == j)));
            row
        })
        .collect();
    let mut top = 0;
    for col in 0..n {
        loop {
            let nz: Vec<usize> = (top..k).filter(|&s| m[s][col] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&s) = nz.first() {
                    m.swap(top, s);
                    top += 1;
                }
                break;
            }
            let &s = nz.iter().min_by_key(|&&s| m[s][col].abs()).unwrap();
            for &t in &nz {
                if t != s {
                    let f = m[t][col] / m[s][col];
                    let src = m[s].clone();
                    for (a, b) in m[t].iter_mut().zip(&src) {
                        *a = a.checked_sub(f.checked_mul(*b).ok_or_else(overflow)?).ok_or_else(overflow)?;
                    }
                }
            }
        }
    }
    m[top..]
        .iter()
        .map(|row| row[n..].iter().map(|&e| i64::try_from(e).map_err(|_| overflow())).collect())
        .collect()
}

/// Exponent of the largest power of `p` dividing `n` (`n ≠ 0`).
pub fn valuation(mut n: i64, p: u64) -> u32 {
    if p == 0 || n == 0 {
        return 0;
    }
    let p = p as i64;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_depend_on_characteristic() {
        let rows = vec![vec![1, 0], vec![1, 2]];
        assert_eq!(rank(&rows, 0), 2);
        assert_eq!(rank(&rows, 2), 1);
        assert_eq!(new_pivot(&rows[..1], &rows[1], 0), Some(1));
        assert_eq!(new_pivot(&rows[..1], &rows[1], 2), None);
    }

    #[test]
    fn rational_solutions() {
        let rows = vec![vec![2, 0, 0], vec![0, 1, 1]];
        assert_eq!(solve(&rows, &[1, 3, 3]), Some(vec![Q::new(1.into(), 2.into()), q(3)]));
        assert_eq!(solve(&rows, &[0, 1, 0]), None);
    }

    #[test]
    fn relations_are_a_basis() {
        let rows = vec![vec![1, 1], vec![2, 2], vec![1, 0], vec![0, 1]];
        let rel = integer_relations(&rows).unwrap();
        assert_eq!(rel.len(), 2);
        for c in &rel {
            for col in 0..2 {
                let s: i64 = c.iter().zip(&rows).map(|(a, r)| a * r[col]).sum();
                assert_eq!(s, 0);
            }
        }
        assert!(integer_relations(&[vec![1, 0], vec![0, 1]]).unwrap().is_empty());
    }

    #[test]
    fn p_adic_valuation() {
        assert_eq!(valuation(12, 2), 2);
        assert_eq!(valuation(-9, 3), 2);
        assert_eq!(valuation(5, 0), 0);
    }
}
