//! Brute-force polytope enumeration over the rationals: H-representation
//! vertex enumeration by exhaustive basis selection, and convex-hull
//! membership via barycentric solves over small subsets. Deliberately free
//! of any simplex/LP code so it can serve as an independent cross-check.

use itertools::Itertools;
use num_traits::{One, Signed};

use crate::linalg;
use crate::scalar::Q;

/// A linear constraint `normal . x (<=|=) offset`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub normal: Vec<Q>,
    pub offset: Q,
    pub equality: bool,
}

impl Constraint {
    pub fn le(normal: Vec<Q>, offset: Q) -> Constraint {
        Constraint { normal, offset, equality: false }
    }

    pub fn eq(normal: Vec<Q>, offset: Q) -> Constraint {
        Constraint { normal, offset, equality: true }
    }

    pub fn satisfied_by(&self, x: &[Q]) -> bool {
        let lhs: Q = self.normal.iter().zip(x.iter()).map(|(a, v)| a * v).sum();
        if self.equality {
            lhs == self.offset
        } else {
            lhs <= self.offset
        }
    }
}

/// All vertices of the polytope cut out by the constraints: every maximal
/// independent selection of `dim` constraints treated as equalities whose
/// unique solution satisfies the rest. Exponential in `dim`, which stays
/// tiny here.
pub fn vertices(dim: usize, constraints: &[Constraint]) -> Vec<Vec<Q>> {
    let mut found: Vec<Vec<Q>> = Vec::new();
    if dim == 0 {
        let origin: Vec<Q> = vec![];
        if constraints.iter().all(|c| c.satisfied_by(&origin)) {
            found.push(origin);
        }
        return found;
    }
    for subset in (0..constraints.len()).combinations(dim) {
        let rows: Vec<Vec<Q>> = subset.iter().map(|&i| constraints[i].normal.clone()).collect();
        if linalg::rank(&rows) != dim {
            continue;
        }
        let rhs: Vec<Q> = subset.iter().map(|&i| constraints[i].offset.clone()).collect();
        let Some(x) = linalg::solve(&rows, &rhs) else {
            continue;
        };
        if constraints.iter().all(|c| c.satisfied_by(&x)) && !found.contains(&x) {
            found.push(x);
        }
    }
    found
}

/// Membership of `v` in the convex hull of `points`, by exhausting subsets
/// of at most `dim + 1` points and solving the barycentric system exactly.
pub fn conv_contains(points: &[Vec<Q>], v: &[Q]) -> bool {
    let dim = v.len();
    if points.is_empty() {
        return false;
    }
    for k in 1..=(dim + 1).min(points.len()) {
        for subset in (0..points.len()).combinations(k) {
            // rows: each coordinate, then the affine row of ones.
            let mut rows: Vec<Vec<Q>> = (0..dim)
                .map(|j| subset.iter().map(|&i| points[i][j].clone()).collect())
                .collect();
            rows.push(vec![Q::one(); k]);
            let mut rhs: Vec<Q> = v.to_vec();
            rhs.push(Q::one());
            if let Some(lambda) = linalg::solve(&rows, &rhs) {
                if lambda.iter().all(|l| !l.is_negative()) {
                    return true;
                }
            }
        }
    }
    false
}

/// For each input point, whether it is a vertex of the convex hull of the
/// whole input. Duplicate values share a verdict.
pub fn hull_vertex_flags(points: &[Vec<Q>]) -> Vec<bool> {
    let mut distinct: Vec<Vec<Q>> = Vec::new();
    for p in points {
        if !distinct.contains(p) {
            distinct.push(p.clone());
        }
    }
    points
        .iter()
        .map(|p| {
            let others: Vec<Vec<Q>> = distinct.iter().filter(|q| *q != p).cloned().collect();
            !conv_contains(&others, p)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qz};

    fn pt(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| qz(x)).collect()
    }

    #[test]
    fn square_vertices() {
        // |x| <= 1, |y| <= 1
        let cs = vec![
            Constraint::le(pt(&[1, 0]), qz(1)),
            Constraint::le(pt(&[-1, 0]), qz(1)),
            Constraint::le(pt(&[0, 1]), qz(1)),
            Constraint::le(pt(&[0, -1]), qz(1)),
        ];
        let vs = vertices(2, &cs);
        assert_eq!(vs.len(), 4);
        assert!(vs.contains(&pt(&[1, 1])));
        assert!(vs.contains(&pt(&[-1, -1])));
    }

    #[test]
    fn face_vertices_with_equality() {
        let cs = vec![
            Constraint::le(pt(&[1, 0]), qz(1)),
            Constraint::le(pt(&[-1, 0]), qz(1)),
            Constraint::le(pt(&[0, 1]), qz(1)),
            Constraint::le(pt(&[0, -1]), qz(1)),
            Constraint::eq(pt(&[1, 0]), qz(1)),
        ];
        let vs = vertices(2, &cs);
        assert_eq!(vs.len(), 2);
        assert!(vs.contains(&pt(&[1, 1])));
        assert!(vs.contains(&pt(&[1, -1])));
    }

    #[test]
    fn conv_membership() {
        let square = vec![pt(&[1, 1]), pt(&[1, -1]), pt(&[-1, 1]), pt(&[-1, -1])];
        assert!(conv_contains(&square, &pt(&[0, 0])));
        assert!(conv_contains(&square, &[q(1, 2), q(-1, 3)]));
        assert!(conv_contains(&square, &pt(&[1, 1])));
        assert!(!conv_contains(&square, &[q(3, 2), qz(0)]));
        assert!(!conv_contains(&[], &pt(&[0])));
    }

    #[test]
    fn vertex_flags_with_duplicates() {
        let pts = vec![pt(&[1, 1]), pt(&[1, -1]), pt(&[-1, 1]), pt(&[-1, -1]), pt(&[0, 0]), pt(&[1, 1])];
        let flags = hull_vertex_flags(&pts);
        assert_eq!(flags, vec![true, true, true, true, false, true]);
    }

    #[test]
    fn degenerate_subset_skipped() {
        // Dependent triple on a line plus an honest vertex pair.
        let cs = vec![
            Constraint::le(pt(&[1, 1]), qz(2)),
            Constraint::le(pt(&[2, 2]), qz(4)),
            Constraint::le(pt(&[1, -1]), qz(0)),
            Constraint::le(pt(&[-1, 0]), qz(0)),
            Constraint::le(pt(&[0, -1]), qz(0)),
        ];
        let vs = vertices(2, &cs);
        assert!(vs.contains(&pt(&[1, 1])));
        assert!(vs.contains(&pt(&[0, 0])));
    }
}
