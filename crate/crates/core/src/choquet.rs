//! Choquet sets of isometries: the codomain points whose pulled-back
//! evaluation functionals are extreme, the families of point sets whose
//! image covers the extreme functionals exactly, the classical face-based
//! characterization for unit-weight spaces containing the constants, and the
//! boundary-meets-suppmax law.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use crate::dual::{Functional, GeneratorSystem};
use crate::error::{Error, Result};
use crate::isometry::{IsometryVerdict, LinearMap};
use crate::lp::{Lp, LpOutcome};
use crate::scalar::{unimodular_ratio, Confidence, Q, Scalar};
use crate::space::{FunctionVec, Subspace};

/// Report for the extreme-pullback analysis of a map.
#[derive(Debug, Clone)]
pub struct ChoquetReport<S> {
    pub m_set: BTreeSet<usize>,
    /// The pulled-back evaluation functional at every codomain point.
    pub generator_images: BTreeMap<usize, Functional<S>>,
    /// Queried point sets and whether their image covers the extreme
    /// functionals exactly.
    pub is_ch_member: Vec<(BTreeSet<usize>, bool)>,
    pub confidence: Confidence,
}

fn require_into<S: Scalar>(t: &LinearMap<S>, s_points: usize) -> Result<Confidence> {
    match t.verify_into_isometry(s_points)? {
        IsometryVerdict::Isometry { confidence } => Ok(confidence),
        IsometryVerdict::No { .. } => Err(Error::NotIntoIsometry),
        IsometryVerdict::Unknown { .. } => Err(Error::ComplexUnsupported(
            "cannot certify the isometry at this circle sample size".into(),
        )),
    }
}

/// The set of codomain points whose pulled-back evaluation functional is an
/// extreme point of the domain's dual ball. Requires an into-isometry.
pub fn m_set<S: Scalar>(t: &LinearMap<S>, s_points: usize) -> Result<(BTreeSet<usize>, Confidence)> {
    let mut confidence = require_into(t, s_points)?;
    let gens = GeneratorSystem::new(t.domain(), s_points);
    let mut out = BTreeSet::new();
    for x in 0..t.codomain().ambient().len() {
        let pulled = t.pulled_generator(x);
        if pulled.is_zero() {
            continue;
        }
        let (norm, nconf) = gens.dual_norm(&pulled);
        if !norm.is_one() {
            confidence = confidence.merge(nconf);
            continue;
        }
        let (extreme, econf) = gens.is_extreme(&pulled)?;
        confidence = confidence.merge(econf);
        if extreme {
            out.insert(x);
        }
    }
    Ok((out, confidence))
}

/// Whether the image of `S x Y` under the pullback equals the extreme
/// functionals exactly: every image point extreme, every extreme class hit.
pub fn ch_contains<S: Scalar>(
    t: &LinearMap<S>,
    y: &BTreeSet<usize>,
    s_points: usize,
) -> Result<(bool, Confidence)> {
    if y.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    for &x in y {
        t.codomain().ambient().check_point(x)?;
    }
    let mut confidence = require_into(t, s_points)?;
    let gens = GeneratorSystem::new(t.domain(), s_points);

    let mut pulled = BTreeMap::new();
    for &x in y {
        let p = t.pulled_generator(x);
        if p.is_zero() {
            return Ok((false, confidence));
        }
        let (norm, nconf) = gens.dual_norm(&p);
        confidence = confidence.merge(nconf);
        if !norm.is_one() {
            return Ok((false, confidence));
        }
        let (extreme, econf) = gens.is_extreme(&p)?;
        confidence = confidence.merge(econf);
        if !extreme {
            return Ok((false, confidence));
        }
        pulled.insert(x, p);
    }

    // Every extreme generator class must be hit up to a unimodular factor.
    let verdicts = gens.extreme_classes().to_vec();
    for (c, class) in gens.classes().iter().enumerate() {
        let (extreme, econf) = verdicts[c];
        confidence = confidence.merge(econf);
        if !extreme {
            continue;
        }
        let rep = gens.generator(class[0]);
        let hit = pulled
            .values()
            .any(|p| unimodular_ratio(p.coords(), rep.coords()).is_some());
        if !hit {
            return Ok((false, confidence));
        }
    }
    Ok((true, confidence))
}

/// Full report: the extreme-pullback set, all pulled generators, and any
/// requested membership queries. The set itself is always queried; on finite
/// models it must be a member, so a negative answer is a law violation.
pub fn choquet_report<S: Scalar>(
    t: &LinearMap<S>,
    queries: &[BTreeSet<usize>],
    s_points: usize,
) -> Result<ChoquetReport<S>> {
    let (mset, mut confidence) = m_set(t, s_points)?;
    let mut generator_images = BTreeMap::new();
    for x in 0..t.codomain().ambient().len() {
        generator_images.insert(x, t.pulled_generator(x));
    }
    let mut is_ch_member = Vec::new();
    let (self_member, sconf) = ch_contains(t, &mset, s_points)?;
    confidence = confidence.merge(sconf);
    if !self_member && confidence.is_exact() {
        return Err(Error::LawViolation(
            "the extreme-pullback set failed its own covering test".into(),
        ));
    }
    is_ch_member.push((mset.clone(), self_member));
    for q in queries {
        let (ok, qconf) = ch_contains(t, q, s_points)?;
        confidence = confidence.merge(qconf);
        is_ch_member.push((q.clone(), ok));
    }
    Ok(ChoquetReport {
        m_set: mset,
        generator_images,
        is_ch_member,
        confidence,
    })
}

/// Convex-hull membership of rational coordinate vectors by LP (implementation
/// path; the enumeration oracle lives elsewhere).
fn conv_member_lp(points: &[Vec<Q>], target: &[Q]) -> bool {
    if points.is_empty() {
        return false;
    }
    let n = points.len();
    let d = target.len();
    let mut lp = Lp::feasibility(n);
    for j in 0..d {
        lp.eq(points.iter().map(|p| p[j].clone()).collect(), target[j].clone());
    }
    lp.eq(vec![Q::one(); n], Q::one());
    matches!(lp.solve(), LpOutcome::Optimal { .. })
}

/// The classical route for a unit-weight space containing the constant-one
/// function: restrict to the face of the dual ball where the value on the
/// constant is one, and keep the points whose evaluation functional is a
/// vertex of that face. Checked against the extreme-pullback set of the
/// identity, which it must equal.
pub fn prop63_set(a: &Subspace<Q>, s_points: usize) -> Result<BTreeSet<usize>> {
    if a.ambient().weights().iter().any(|w| !w.is_one()) {
        return Err(Error::NonConstantWeight);
    }
    let ones = FunctionVec::new(a.ambient(), vec![Q::one(); a.ambient().len()])?;
    a.coords_of(&ones).map_err(|_| Error::MissingConstantOne)?;

    // The face is the convex hull of the evaluation functionals themselves.
    let n = a.ambient().len();
    let gens: Vec<Vec<Q>> = (0..n)
        .map(|z| a.delta_unchecked(&Q::one(), z).coords().to_vec())
        .collect();
    let mut distinct: Vec<Vec<Q>> = Vec::new();
    for g in &gens {
        if !distinct.contains(g) {
            distinct.push(g.clone());
        }
    }
    let mut out = BTreeSet::new();
    for (z, g) in gens.iter().enumerate() {
        let others: Vec<Vec<Q>> = distinct.iter().filter(|v| *v != g).cloned().collect();
        if !conv_member_lp(&others, g) {
            out.insert(z);
        }
    }

    let identity = LinearMap::identity(a.clone());
    let (mset, _) = m_set(&identity, s_points)?;
    if out != mset {
        return Err(Error::LawViolation(format!(
            "face-vertex route gave {out:?} but the extreme-pullback set is {mset:?}"
        )));
    }
    Ok(out)
}

/// Whether `Y` meets the norm-attaining set of `f`. `Y` must be a Choquet
/// family for the identity; the answer is then guaranteed positive, so a
/// `false` return is a law-violation signal for the harness.
pub fn boundary_meets_suppmax<S: Scalar>(
    a: &Subspace<S>,
    f: &FunctionVec<S>,
    y: &BTreeSet<usize>,
    s_points: usize,
) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let identity = LinearMap::identity(a.clone());
    let (ok, _) = ch_contains(&identity, y, s_points)?;
    if !ok {
        return Err(Error::NotChoquetFamily);
    }
    let spm = a.suppmax(f)?;
    Ok(y.intersection(&spm).next().is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qz};
    use crate::space::WeightedSpace;
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

    fn set(zs: &[usize]) -> BTreeSet<usize> {
        zs.iter().copied().collect()
    }

    #[test]
    fn m_set_identity_examples() {
        let a = rsub(
            &[qz(1), qz(1), qz(1)],
            &[&[qz(1), qz(1), qz(1)], &[qz(1), qz(-1), qz(0)]],
        );
        let id = LinearMap::identity(a);
        assert_eq!(m_set(&id, DEFAULT_S_POINTS).unwrap().0, set(&[0, 1]));

        let b = rsub(
            &[qz(1), qz(1), qz(1)],
            &[&[qz(1), qz(1), qz(1)], &[qz(0), q(1, 2), qz(1)]],
        );
        let idb = LinearMap::identity(b);
        assert_eq!(m_set(&idb, DEFAULT_S_POINTS).unwrap().0, set(&[0, 2]));
    }

    #[test]
    fn m_set_of_embedding() {
        // Tf = (f(a), -f(b), (f(a)+f(b))/2) into a full three-point space.
        let a1 = full(&[qz(1), qz(1)]);
        let a2 = full(&[qz(1), qz(1), qz(1)]);
        let t = LinearMap::new(
            a1,
            a2,
            vec![
                vec![qz(1), qz(0)],
                vec![qz(0), qz(-1)],
                vec![q(1, 2), q(1, 2)],
            ],
        )
        .unwrap();
        assert_eq!(m_set(&t, DEFAULT_S_POINTS).unwrap().0, set(&[0, 1]));
    }

    #[test]
    fn m_set_requires_isometry() {
        let a = full(&[qz(1), qz(1)]);
        let t = LinearMap::new(
            a.clone(),
            a,
            vec![vec![q(1, 2), qz(0)], vec![qz(0), qz(1)]],
        )
        .unwrap();
        assert!(matches!(m_set(&t, DEFAULT_S_POINTS), Err(Error::NotIntoIsometry)));
    }

    #[test]
    fn ch_contains_examples() {
        let a = rsub(
            &[qz(1), qz(1), qz(1)],
            &[&[qz(1), qz(1), qz(1)], &[qz(1), qz(-1), qz(0)]],
        );
        let id = LinearMap::identity(a);
        assert!(ch_contains(&id, &set(&[0, 1]), DEFAULT_S_POINTS).unwrap().0);
        assert!(!ch_contains(&id, &set(&[0]), DEFAULT_S_POINTS).unwrap().0);
        assert!(!ch_contains(&id, &set(&[0, 1, 2]), DEFAULT_S_POINTS).unwrap().0);
    }

    #[test]
    fn prop63_examples() {
        let b = rsub(
            &[qz(1), qz(1), qz(1)],
            &[&[qz(1), qz(1), qz(1)], &[qz(0), q(1, 2), qz(1)]],
        );
        assert_eq!(prop63_set(&b, DEFAULT_S_POINTS).unwrap(), set(&[0, 2]));

        let f = full(&[qz(1), qz(1)]);
        assert_eq!(prop63_set(&f, DEFAULT_S_POINTS).unwrap(), set(&[0, 1]));

        let line = rsub(&[qz(1), qz(1)], &[&[qz(1), qz(1)]]);
        assert_eq!(prop63_set(&line, DEFAULT_S_POINTS).unwrap(), set(&[0, 1]));

        // missing constant
        let noconst = rsub(&[qz(1), qz(1)], &[&[qz(1), qz(0)]]);
        assert!(matches!(
            prop63_set(&noconst, DEFAULT_S_POINTS),
            Err(Error::MissingConstantOne)
        ));
        // nonconstant weight
        let weighted = full(&[qz(2), qz(1)]);
        assert!(matches!(
            prop63_set(&weighted, DEFAULT_S_POINTS),
            Err(Error::NonConstantWeight)
        ));
    }

    #[test]
    fn boundary_meets_suppmax_examples() {
        let a = rsub(
            &[qz(1), qz(1), qz(1)],
            &[&[qz(1), qz(1), qz(1)], &[qz(1), qz(-1), qz(0)]],
        );
        let f = FunctionVec::new(a.ambient(), vec![qz(2), qz(0), qz(1)]).unwrap();
        assert!(boundary_meets_suppmax(&a, &f, &set(&[0, 1]), DEFAULT_S_POINTS).unwrap());
        let f1 = FunctionVec::new(a.ambient(), vec![qz(1), qz(1), qz(1)]).unwrap();
        assert!(boundary_meets_suppmax(&a, &f1, &set(&[0, 1]), DEFAULT_S_POINTS).unwrap());

        let fullsp = full(&[qz(1), qz(1)]);
        let g = FunctionVec::new(fullsp.ambient(), vec![qz(0), qz(3)]).unwrap();
        assert!(boundary_meets_suppmax(&fullsp, &g, &set(&[0, 1]), DEFAULT_S_POINTS).unwrap());

        // {c} is not a Choquet family here
        assert!(matches!(
            boundary_meets_suppmax(&a, &f, &set(&[2]), DEFAULT_S_POINTS),
            Err(Error::NotChoquetFamily)
        ));
    }

    #[test]
    fn report_contains_self_membership() {
        let a = rsub(
            &[qz(1), qz(1), qz(1)],
            &[&[qz(1), qz(1), qz(1)], &[qz(1), qz(-1), qz(0)]],
        );
        let id = LinearMap::identity(a);
        let report = choquet_report(&id, &[set(&[0])], DEFAULT_S_POINTS).unwrap();
        assert_eq!(report.m_set, set(&[0, 1]));
        assert_eq!(report.generator_images.len(), 3);
        assert_eq!(report.is_ch_member[0], (set(&[0, 1]), true));
        assert_eq!(report.is_ch_member[1], (set(&[0]), false));
    }
}
