//! Small dense exact linear algebra over any [`Scalar`] field: rank, linear
//! solves, inversion. Sizes here are tiny (dimensions <= 8), so plain
//! Gauss-Jordan with exact arithmetic is all we need.

use crate::scalar::Scalar;

/// Reduced row echelon form in place; returns the pivot column of each
/// processed row (in order).
fn rref<S: Scalar>(m: &mut [Vec<S>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = S::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = f.clone() * m[r][j].clone();
                    m[i][j] = m[i][j].clone() - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    let mut m: Vec<Vec<S>> = rows.to_vec();
    rref(&mut m).len()
}

/// Any solution `x` of `a x = b` (free variables set to zero), or `None`
/// when the system is inconsistent. `a` is given by rows.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<S>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut v = row.clone();
            v.push(rhs.clone());
            v
        })
        .collect();
    let pivots = rref(&mut aug);
    // Inconsistent iff some pivot lands in the augmented column.
    if pivots.iter().any(|&c| c == cols) {
        return None;
    }
    let mut x = vec![S::zero(); cols];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = aug[row][cols].clone();
    }
    Some(x)
}

/// Inverse of a square matrix, or `None` when singular.
pub fn invert<S: Scalar>(a: &[Vec<S>]) -> Option<Vec<Vec<S>>> {
    let n = a.len();
    let mut aug: Vec<Vec<S>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n);
            let mut v = row.clone();
            for j in 0..n {
                v.push(if i == j { S::one() } else { S::zero() });
            }
            v
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_vec<S: Scalar>(a: &[Vec<S>], x: &[S]) -> Vec<S> {
    a.iter().map(|row| dot(row, x)).collect()
}

pub fn mat_mul<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>]) -> Vec<Vec<S>> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner);
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b.iter())
                        .fold(S::zero(), |acc, (x, brow)| acc + x.clone() * brow[j].clone())
                })
                .collect()
        })
        .collect()
}

/// Plain bilinear pairing (no conjugation): functionals act linearly.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn vec_scale<S: Scalar>(c: &S, v: &[S]) -> Vec<S> {
    v.iter().map(|x| c.clone() * x.clone()).collect()
}

pub fn vec_add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b.iter()).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn vec_sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b.iter()).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn is_zero_vec<S: Scalar>(v: &[S]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn transpose<S: Scalar>(a: &[Vec<S>]) -> Vec<Vec<S>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cq, q, qz, Q};

    #[test]
    fn rank_of_dependent_rows() {
        let a = vec![vec![qz(1), qz(1)], vec![qz(1), qz(-1)], vec![qz(2), qz(0)]];
        assert_eq!(rank(&a), 2);
        assert_eq!(rank(&[vec![qz(0), qz(0)]]), 0);
    }

    #[test]
    fn solve_membership() {
        // Columns are basis vectors; solving B^T? Use rows = equations.
        // span{(1,1,1),(1,-1,0)} contains (2,0,1)?
        let rows = vec![
            vec![qz(1), qz(1)],
            vec![qz(1), qz(-1)],
            vec![qz(1), qz(0)],
        ];
        let x = solve(&rows, &[qz(2), qz(0), qz(1)]).expect("consistent");
        assert_eq!(x, vec![qz(1), qz(1)]);
        assert!(solve(&rows, &[qz(0), qz(0), qz(1)]).is_none());
    }

    #[test]
    fn invert_matrix() {
        let a = vec![vec![qz(0), qz(1)], vec![qz(-1), qz(0)]];
        let inv = invert(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), vec![vec![qz(1), qz(0)], vec![qz(0), qz(1)]]);
        let singular = vec![vec![qz(1), qz(2)], vec![qz(2), qz(4)]];
        assert!(invert::<Q>(&singular).is_none());
    }

    #[test]
    fn complex_solve() {
        // i * x = 1 + i  =>  x = 1 - i
        let rows = vec![vec![cq(0, 1)]];
        let x = solve(&rows, &[cq(1, 1)]).unwrap();
        assert_eq!(x, vec![cq(1, -1)]);
    }

    #[test]
    fn rational_fraction_pivots() {
        let a = vec![vec![q(1, 2), q(1, 3)], vec![q(1, 5), q(1, 7)]];
        let inv = invert(&a).unwrap();
        let prod = mat_mul(&a, &inv);
        assert_eq!(prod[0][0], qz(1));
        assert_eq!(prod[1][0], qz(0));
    }
}
