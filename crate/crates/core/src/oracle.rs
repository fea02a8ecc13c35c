//! Independent brute-force oracles for the real field. These recompute the
//! dual-geometry answers by exhaustive vertex/face enumeration instead of
//! linear programming, and exist purely to cross-check the LP-based path.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::linalg;
use crate::polytope::{self, Constraint};
use crate::scalar::Q;
use crate::space::{Family, Subspace};

/// Signed evaluation-functional vectors `±Δ(1,z)` in basis coordinates.
fn signed_generator_points(subspace: &Subspace<Q>) -> Vec<Vec<Q>> {
    let mut pts = Vec::new();
    for z in 0..subspace.ambient().len() {
        let g = subspace.delta_unchecked(&Q::one(), z);
        let coords = g.coords().to_vec();
        let neg: Vec<Q> = coords.iter().map(|c| -c.clone()).collect();
        pts.push(coords);
        pts.push(neg);
    }
    pts
}

/// For each point of the ambient set, whether its evaluation functional is a
/// vertex of the dual unit ball, decided by convex-hull membership over the
/// signed generator values (no LP involved).
pub fn extreme_generator_flags(subspace: &Subspace<Q>) -> Vec<bool> {
    let pts = signed_generator_points(subspace);
    let zero = vec![Q::zero(); subspace.dim()];
    let flags = polytope::hull_vertex_flags(&pts);
    (0..subspace.ambient().len())
        .map(|z| flags[2 * z] && pts[2 * z] != zero)
        .collect()
}

/// Points of the ambient set whose evaluation functional is extreme.
pub fn extreme_point_set(subspace: &Subspace<Q>) -> BTreeSet<usize> {
    extreme_generator_flags(subspace)
        .iter()
        .enumerate()
        .filter_map(|(z, &ex)| ex.then_some(z))
        .collect()
}

/// Vertices of the predual unit ball `{f : |p(z) f(z)| <= 1}` in basis
/// coordinates, by exhaustive H-representation enumeration.
pub fn predual_ball_vertices(subspace: &Subspace<Q>) -> Vec<Vec<Q>> {
    let d = subspace.dim();
    let mut cs = Vec::new();
    for z in 0..subspace.ambient().len() {
        let g = subspace.delta_unchecked(&Q::one(), z);
        let row = g.coords().to_vec();
        let neg: Vec<Q> = row.iter().map(|c| -c.clone()).collect();
        cs.push(Constraint::le(row, Q::one()));
        cs.push(Constraint::le(neg, Q::one()));
    }
    polytope::vertices(d, &cs)
}

/// An H-representation of the dual unit ball: `|ell(v)| <= 1` over the
/// predual ball vertices `v`.
pub fn dual_ball_constraints(subspace: &Subspace<Q>) -> Vec<Constraint> {
    let mut cs = Vec::new();
    for v in predual_ball_vertices(subspace) {
        let neg: Vec<Q> = v.iter().map(|c| -c.clone()).collect();
        cs.push(Constraint::le(v, Q::one()));
        cs.push(Constraint::le(neg, Q::one()));
    }
    cs
}

/// The extreme points of the attainment set of a family, by brute force:
/// for each sign pattern, the face of the dual ball where every member's
/// value is pinned to its signed norm is enumerated vertex by vertex; the
/// union over patterns is the answer. Members must be nonzero.
pub fn sigma_extreme_points(subspace: &Subspace<Q>, family: &Family<Q>) -> Vec<Vec<Q>> {
    let d = subspace.dim();
    let ball = dual_ball_constraints(subspace);
    let norms: Vec<Q> = family
        .members()
        .iter()
        .map(|f| {
            subspace
                .ambient()
                .sup_norm(f.values())
                .exact()
                .expect("real norms are rational")
        })
        .collect();
    let mut out: Vec<Vec<Q>> = Vec::new();
    for signs in (0..family.len()).map(|_| [Q::one(), -Q::one()].into_iter()).multi_cartesian_product() {
        let mut cs = ball.clone();
        for ((coords, norm), sign) in family.coords().iter().zip(norms.iter()).zip(signs.iter()) {
            cs.push(Constraint::eq(coords.clone(), sign * norm));
        }
        for v in polytope::vertices(d, &cs) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

/// Exhaustive norm check: `max_z |p(z) f(z)|` recomputed from raw values,
/// compared against evaluation through every generator.
pub fn norm_via_generators(subspace: &Subspace<Q>, coords: &[Q]) -> Q {
    (0..subspace.ambient().len())
        .map(|z| {
            let g = subspace.delta_unchecked(&Q::one(), z);
            linalg::dot(g.coords(), coords).abs()
        })
        .max()
        .expect("nonempty point set")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::GeneratorSystem;
    use crate::scalar::{q, qz};
    use crate::space::{FunctionVec, WeightedSpace};
    use crate::DEFAULT_S_POINTS;

    fn rsub(weights: &[Q], basis: &[&[Q]]) -> Subspace<Q> {
        let names: Vec<String> = (0..weights.len())
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect();
        let sp = WeightedSpace::new(names, weights.to_vec()).unwrap();
        let basis = basis
            .iter()
            .map(|row| FunctionVec::new(&sp, row.to_vec()).unwrap())
            .collect();
        Subspace::new(sp, basis).unwrap()
    }

    fn full(weights: &[Q]) -> Subspace<Q> {
        let names: Vec<String> = (0..weights.len())
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect();
        Subspace::full(WeightedSpace::new(names, weights.to_vec()).unwrap())
    }

    #[test]
    fn oracle_matches_worked_example() {
        let a = rsub(
            &[qz(1), qz(1), qz(1)],
            &[&[qz(1), qz(1), qz(1)], &[qz(1), qz(-1), qz(0)]],
        );
        assert_eq!(extreme_generator_flags(&a), vec![true, true, false]);
        let b = rsub(
            &[qz(1), qz(1), qz(1)],
            &[&[qz(1), qz(1), qz(1)], &[qz(0), q(1, 2), qz(1)]],
        );
        assert_eq!(extreme_generator_flags(&b), vec![true, false, true]);
    }

    #[test]
    fn predual_vertices_of_full_space() {
        let f = full(&[qz(1), qz(1)]);
        let vs = predual_ball_vertices(&f);
        assert_eq!(vs.len(), 4);
        assert!(vs.contains(&vec![qz(1), qz(-1)]));
    }

    #[test]
    fn sigma_oracle_on_full_space() {
        let f = full(&[qz(1), qz(1)]);
        let fam = Family::new(
            &f,
            vec![FunctionVec::new(f.ambient(), vec![qz(1), qz(1)]).unwrap()],
        )
        .unwrap();
        let ex = sigma_extreme_points(&f, &fam);
        assert_eq!(ex.len(), 4);
        for v in [
            vec![qz(1), qz(0)],
            vec![qz(0), qz(1)],
            vec![qz(-1), qz(0)],
            vec![qz(0), qz(-1)],
        ] {
            assert!(ex.contains(&v));
        }
    }

    #[test]
    fn oracle_agrees_with_lp_on_fixed_cases() {
        for a in [
            rsub(
                &[qz(1), qz(1), qz(1)],
                &[&[qz(1), qz(1), qz(1)], &[qz(1), qz(-1), qz(0)]],
            ),
            full(&[qz(2), qz(1)]),
            rsub(&[qz(1), qz(1)], &[&[qz(1), q(1, 2)]]),
        ] {
            let gs = GeneratorSystem::new(&a, DEFAULT_S_POINTS);
            let lp_side = gs.extreme_points();
            let oracle_side = extreme_point_set(&a);
            assert_eq!(lp_side, oracle_side);
        }
    }

    #[test]
    fn norm_oracle() {
        let a = rsub(
            &[qz(1), qz(1), qz(1)],
            &[&[qz(1), qz(1), qz(1)], &[qz(1), qz(-1), qz(0)]],
        );
        // f = f1 + f2 = (2, 0, 1): norm 2
        assert_eq!(norm_via_generators(&a, &[qz(1), qz(1)]), qz(2));
        assert!(norm_via_generators(&a, &[qz(0), qz(0)]).is_zero());
    }
}
