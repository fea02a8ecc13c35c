//! Exact geometry of the dual unit ball: dual norms, membership in
//! absolutely convex hulls of evaluation functionals, extreme-functional
//! certification, and the sets of norm-one functionals that attain the norm
//! of every member of a family at once.
//!
//! Over the real field every decision here is an exact rational LP. Over the
//! complex field the unimodular circle is sampled, which under-approximates
//! hulls: membership answers stay exact, non-membership carries a
//! `Discretized` confidence tag.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use itertools::Itertools;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{Lp, LpOutcome};
use crate::scalar::{unimodular_ratio, Confidence, Norm, Q, Scalar};
use crate::space::{Family, Subspace};

/// Largest family size for the sign-pattern search in [`GeneratorSystem::sigma_check`].
pub const MAX_SIGMA_FAMILY: usize = 20;
const MAX_SIGMA_PATTERNS: usize = 1 << 20;

/// An element of the dual space, stored as its value vector on the owning
/// subspace's basis. The dual norm is cached after first computation; a
/// functional belongs to the subspace it was built from.
#[derive(Debug, Clone)]
pub struct Functional<S> {
    coords: Vec<S>,
    dual_norm_cache: OnceLock<(Norm, Confidence)>,
}

impl<S: Scalar> Functional<S> {
    pub fn new(coords: Vec<S>) -> Functional<S> {
        Functional {
            coords,
            dual_norm_cache: OnceLock::new(),
        }
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        linalg::is_zero_vec(&self.coords)
    }

    /// Apply to an element of the subspace given by basis coordinates.
    pub fn apply(&self, f_coords: &[S]) -> S {
        linalg::dot(&self.coords, f_coords)
    }

    pub fn scale(&self, c: &S) -> Functional<S> {
        Functional::new(linalg::vec_scale(c, &self.coords))
    }

    pub fn cached_dual_norm(&self) -> Option<&(Norm, Confidence)> {
        self.dual_norm_cache.get()
    }
}

impl<S: Scalar> PartialEq for Functional<S> {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

impl<S: Scalar> Eq for Functional<S> {}

impl<S: Scalar> Hash for Functional<S> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl<S: Scalar> fmt::Display for Functional<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Outcome of an absolutely-convex-hull membership test.
#[derive(Debug, Clone)]
pub enum HullMembership<S> {
    /// `target = sum c_i lambda_i g_i` with `c_i >= 0`, `sum c_i <= 1`.
    Member { combo: Vec<(usize, S, Q)> },
    /// A separating element of the predual, in basis coordinates: its value
    /// on the target strictly exceeds its sup over the (sampled) hull.
    Outside {
        separator: Vec<S>,
        confidence: Confidence,
    },
}

impl<S> HullMembership<S> {
    pub fn is_member(&self) -> bool {
        matches!(self, HullMembership::Member { .. })
    }
}

/// Decide `target in absconv{ lambda g : lambda in s_set, g in gens }`.
pub fn hull_membership<S: Scalar>(
    target: &Functional<S>,
    gens: &[&Functional<S>],
    s_set: &[S],
) -> HullMembership<S> {
    let d = target.dim();
    let complex = !S::exact_hulls();
    let confidence = if complex {
        Confidence::Discretized { s_points: s_set.len() }
    } else {
        Confidence::Exact
    };

    let columns: Vec<(usize, S, Vec<S>)> = gens
        .iter()
        .enumerate()
        .filter(|(_, g)| !g.is_zero())
        .flat_map(|(i, g)| {
            s_set
                .iter()
                .map(move |lam| (i, lam.clone(), linalg::vec_scale(lam, g.coords())))
        })
        .collect();

    if columns.is_empty() {
        // hull = {0}
        if target.is_zero() {
            return HullMembership::Member { combo: vec![] };
        }
        let separator: Vec<S> = target.coords.iter().map(|c| c.conj()).collect();
        return HullMembership::Outside {
            separator,
            confidence: Confidence::Exact,
        };
    }

    // Components: d rows over the reals, 2d over the complexes.
    let comp = |x: &S, r: usize| -> Q {
        if r < d {
            x.re()
        } else {
            x.im()
        }
    };
    let comp_rows = if complex { 2 * d } else { d };
    let nvars = columns.len();
    let mut lp = Lp::feasibility(nvars);
    for r in 0..comp_rows {
        let j = r % d;
        let coeffs: Vec<Q> = columns.iter().map(|(_, _, v)| comp(&v[j], r)).collect();
        lp.eq(coeffs, comp(&target.coords[j], r));
    }
    lp.le(vec![Q::one(); nvars], Q::one());

    match lp.solve() {
        LpOutcome::Optimal { x, .. } => {
            let combo = columns
                .iter()
                .zip(x.iter())
                .filter(|(_, c)| !c.is_zero())
                .map(|((i, lam, _), c)| (*i, lam.clone(), c.clone()))
                .collect();
            HullMembership::Member { combo }
        }
        LpOutcome::Infeasible { farkas } => {
            // Farkas rows: comp_rows equalities then the budget row. With
            // y the multipliers, f_j = -y_j (real) or -y_j + i y_{d+j}
            // (complex) satisfies Re target(f) > sup_hull Re m(f).
            let separator: Vec<S> = (0..d)
                .map(|j| {
                    let re = -farkas[j].clone();
                    let im = if complex { farkas[d + j].clone() } else { Q::zero() };
                    S::from_parts(re, im).expect("separator parts")
                })
                .collect();
            debug_assert!(verify_separator(target, &columns, &separator));
            HullMembership::Outside { separator, confidence }
        }
        LpOutcome::Unbounded { .. } => unreachable!("feasibility LP cannot be unbounded"),
    }
}

fn verify_separator<S: Scalar>(
    target: &Functional<S>,
    columns: &[(usize, S, Vec<S>)],
    separator: &[S],
) -> bool {
    let value = |v: &[S]| -> Q { linalg::dot(v, separator).re() };
    let t = value(&target.coords);
    columns.iter().all(|(_, _, v)| value(v) < t) && t > Q::zero()
}

/// Verdict plus confidence for an extremality test.
pub type ExtremeVerdict = (bool, Confidence);

/// The evaluation functionals of a subspace, one per point, grouped into
/// equivalence classes of points whose functionals agree up to a unimodular
/// factor. The absolutely convex hull of these generators is exactly the
/// dual unit ball, which makes the dual geometry finitely decidable.
pub struct GeneratorSystem<S> {
    subspace: Subspace<S>,
    s_set: Vec<S>,
    gens: Vec<Functional<S>>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    extreme_cache: OnceLock<Vec<ExtremeVerdict>>,
}

impl<S: Scalar> GeneratorSystem<S> {
    pub fn new(subspace: &Subspace<S>, s_points: usize) -> GeneratorSystem<S> {
        let n = subspace.ambient().len();
        let gens: Vec<Functional<S>> = (0..n)
            .map(|z| subspace.delta_unchecked(&S::one(), z))
            .collect();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = vec![usize::MAX; n];
        for z in 0..n {
            let found = classes.iter().position(|cl| {
                unimodular_ratio(gens[z].coords(), gens[cl[0]].coords()).is_some()
            });
            match found {
                Some(c) => {
                    classes[c].push(z);
                    class_of[z] = c;
                }
                None => {
                    class_of[z] = classes.len();
                    classes.push(vec![z]);
                }
            }
        }
        GeneratorSystem {
            subspace: subspace.clone(),
            s_set: S::s_sample(s_points),
            gens,
            classes,
            class_of,
            extreme_cache: OnceLock::new(),
        }
    }

    pub fn subspace(&self) -> &Subspace<S> {
        &self.subspace
    }

    pub fn s_set(&self) -> &[S] {
        &self.s_set
    }

    pub fn generator(&self, z: usize) -> &Functional<S> {
        &self.gens[z]
    }

    pub fn generators(&self) -> &[Functional<S>] {
        &self.gens
    }

    /// Point classes under the unimodular-agreement equivalence.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, z: usize) -> usize {
        self.class_of[z]
    }

    /// Lowest point of the class containing `z`.
    pub fn class_rep(&self, z: usize) -> usize {
        self.classes[self.class_of[z]][0]
    }

    fn dim(&self) -> usize {
        self.subspace.dim()
    }

    /// Exact dual norm by linear programming over the predual unit ball
    /// (real field); over the complex field, the gauge of the sampled hull,
    /// an upper bound on the true norm.
    pub fn dual_norm(&self, ell: &Functional<S>) -> (Norm, Confidence) {
        assert_eq!(ell.dim(), self.dim(), "functional/subspace dimension mismatch");
        ell.dual_norm_cache
            .get_or_init(|| {
                if ell.is_zero() {
                    return (Norm::zero(), Confidence::Exact);
                }
                if S::exact_hulls() {
                    (self.dual_norm_real(ell), Confidence::Exact)
                } else {
                    (
                        self.dual_norm_gauge(ell),
                        Confidence::Discretized { s_points: self.s_set.len() },
                    )
                }
            })
            .clone()
    }

    fn dual_norm_real(&self, ell: &Functional<S>) -> Norm {
        // max |ell(f)| over {f : |p(z) f(z)| <= 1 for all z}, with f's basis
        // coordinates split into positive and negative parts.
        let d = self.dim();
        let mut best = Q::zero();
        for flip in [false, true] {
            let mut obj = Vec::with_capacity(2 * d);
            for j in 0..d {
                let c = if flip { -ell.coords[j].re() } else { ell.coords[j].re() };
                obj.push(c.clone());
                obj.push(-c);
            }
            let mut lp = Lp::maximize(2 * d, obj);
            for g in &self.gens {
                let mut row = Vec::with_capacity(2 * d);
                for j in 0..d {
                    let c = g.coords[j].re();
                    row.push(c.clone());
                    row.push(-c);
                }
                let neg: Vec<Q> = row.iter().map(|c| -c.clone()).collect();
                lp.le(row, Q::one());
                lp.le(neg, Q::one());
            }
            match lp.solve() {
                LpOutcome::Optimal { value, .. } => {
                    if value > best {
                        best = value;
                    }
                }
                _ => unreachable!("predual ball is a nonempty bounded polytope"),
            }
        }
        Norm::from_sq(&best * &best)
    }

    fn dual_norm_gauge(&self, ell: &Functional<S>) -> Norm {
        let d = self.dim();
        let columns: Vec<Vec<S>> = self
            .gens
            .iter()
            .filter(|g| !g.is_zero())
            .flat_map(|g| {
                self.s_set
                    .iter()
                    .map(move |lam| linalg::vec_scale(lam, g.coords()))
            })
            .collect();
        let nvars = columns.len();
        let mut lp = Lp::maximize(nvars, vec![-Q::one(); nvars]);
        for r in 0..2 * d {
            let j = r % d;
            let pick = |x: &S| if r < d { x.re() } else { x.im() };
            lp.eq(columns.iter().map(|v| pick(&v[j])).collect(), pick(&ell.coords[j]));
        }
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => {
                let gauge = -value;
                Norm::from_sq(&gauge * &gauge)
            }
            _ => unreachable!("sampled generators span the dual"),
        }
    }

    /// Membership of `ell` in the (sampled) dual unit ball.
    pub fn ball_membership(&self, ell: &Functional<S>) -> HullMembership<S> {
        let refs: Vec<&Functional<S>> = self.gens.iter().collect();
        hull_membership(ell, &refs, &self.s_set)
    }

    /// Whether `ell` is an extreme point of the dual unit ball. `ell` must
    /// have dual norm one. The test: `ell` must agree, up to a unimodular
    /// factor, with some evaluation functional, and must lie outside the
    /// absolutely convex hull of the generators of all other classes.
    pub fn is_extreme(&self, ell: &Functional<S>) -> Result<ExtremeVerdict> {
        let (norm, norm_conf) = self.dual_norm(ell);
        if !norm.is_one() {
            return Err(Error::NotNormalized(norm.to_string()));
        }
        let matched = self.matching_class(ell);
        let Some(class) = matched else {
            // Every extreme point is a unimodular multiple of a generator.
            return Ok((false, Confidence::Exact));
        };
        let others: Vec<&Functional<S>> = (0..self.gens.len())
            .filter(|&z| self.class_of[z] != class && !self.gens[z].is_zero())
            .map(|z| &self.gens[z])
            .collect();
        match hull_membership(ell, &others, &self.s_set) {
            HullMembership::Member { .. } => Ok((false, Confidence::Exact)),
            HullMembership::Outside { confidence, .. } => {
                Ok((true, confidence.merge(norm_conf)))
            }
        }
    }

    /// The class whose generators are unimodular multiples of `ell`, if any.
    pub fn matching_class(&self, ell: &Functional<S>) -> Option<usize> {
        (0..self.classes.len()).find(|&c| {
            let rep = self.classes[c][0];
            !self.gens[rep].is_zero()
                && unimodular_ratio(ell.coords(), self.gens[rep].coords()).is_some()
        })
    }

    /// Extremality verdict for each class (via its representative).
    pub fn extreme_classes(&self) -> &[ExtremeVerdict] {
        self.extreme_cache.get_or_init(|| {
            self.classes
                .iter()
                .map(|cl| {
                    let rep = &self.gens[cl[0]];
                    let (norm, conf) = self.dual_norm(rep);
                    if !norm.is_one() {
                        return (false, conf);
                    }
                    self.is_extreme(rep).expect("norm checked above")
                })
                .collect()
        })
    }

    /// Point indices whose evaluation functional is extreme.
    pub fn extreme_points(&self) -> BTreeSet<usize> {
        let verdicts = self.extreme_classes();
        (0..self.gens.len())
            .filter(|&z| verdicts[self.class_of[z]].0)
            .collect()
    }

    /// The norm-one functionals attaining `|ell(f)| = ||f||` for every member
    /// of the family at once: emptiness test (with witness), membership test,
    /// and the extreme members among the generators.
    pub fn sigma_check(&self, family: &Family<S>) -> Result<SigmaReport<S>> {
        if family.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if family.len() > MAX_SIGMA_FAMILY {
            return Err(Error::FamilyTooLarge(family.len(), MAX_SIGMA_FAMILY));
        }
        let k = family.len();
        let mut confidence = if S::exact_hulls() {
            Confidence::Exact
        } else {
            Confidence::Discretized { s_points: self.s_set.len() }
        };

        let member_coords: Vec<Vec<S>> = family.coords().to_vec();
        let member_norm_values: Vec<Q> = family
            .members()
            .iter()
            .map(|f| {
                self.subspace
                    .ambient()
                    .sup_norm(f.values())
                    .exact()
                    .ok_or_else(|| {
                        Error::ComplexUnsupported(
                            "family member has an irrational sup norm; the attainment \
                             equations need a rational right-hand side"
                                .into(),
                        )
                    })
            })
            .collect::<Result<_>>()?;

        let patterns: usize = self.s_set.len().checked_pow(k as u32).unwrap_or(usize::MAX);
        if patterns > MAX_SIGMA_PATTERNS {
            return Err(Error::FamilyTooLarge(family.len(), MAX_SIGMA_FAMILY));
        }

        // Columns of the hull representation.
        let columns: Vec<Vec<S>> = self
            .gens
            .iter()
            .filter(|g| !g.is_zero())
            .flat_map(|g| {
                self.s_set
                    .iter()
                    .map(move |lam| linalg::vec_scale(lam, g.coords()))
            })
            .collect();
        let nvars = columns.len();
        // Pairings of each column with each family member.
        let pairing: Vec<Vec<S>> = columns
            .iter()
            .map(|v| member_coords.iter().map(|fc| linalg::dot(v, fc)).collect())
            .collect();

        let complex = !S::exact_hulls();
        let mut witness = None;
        'patterns: for phases in (0..k).map(|_| self.s_set.iter()).multi_cartesian_product() {
            let mut lp = Lp::feasibility(nvars);
            let rows = if complex { 2 * k } else { k };
            for r in 0..rows {
                let i = r % k;
                let pick = |x: &S| if r < k { x.re() } else { x.im() };
                let target = phases[i].clone() * S::from_q(member_norm_values[i].clone());
                lp.eq(
                    (0..nvars).map(|c| pick(&pairing[c][i])).collect(),
                    pick(&target),
                );
            }
            lp.le(vec![Q::one(); nvars], Q::one());
            if let LpOutcome::Optimal { x, .. } = lp.solve() {
                let mut coords = vec![S::zero(); self.dim()];
                for (c, weight) in x.iter().enumerate() {
                    if !weight.is_zero() {
                        let w = S::from_q(weight.clone());
                        coords = linalg::vec_add(&coords, &linalg::vec_scale(&w, &columns[c]));
                    }
                }
                witness = Some(Functional::new(coords));
                break 'patterns;
            }
        }
        if complex && witness.is_none() {
            // The sampled phases may simply have missed; keep the tag.
            confidence = Confidence::Discretized { s_points: self.s_set.len() };
        }

        let report_stub = SigmaReport {
            centered: witness.is_some(),
            witness,
            extreme_members: Vec::new(),
            confidence,
            member_coords,
            member_norm_sqs: family
                .members()
                .iter()
                .map(|f| self.subspace.ambient().sup_norm(f.values()).sq().clone())
                .collect(),
        };

        let mut extreme_members = Vec::new();
        let verdicts = self.extreme_classes();
        for (c, class) in self.classes.iter().enumerate() {
            let rep = &self.gens[class[0]];
            if rep.is_zero() {
                continue;
            }
            let (is_member, mconf) = report_stub.is_member(self, rep);
            confidence = confidence.merge(mconf);
            if !is_member || !verdicts[c].0 {
                continue;
            }
            for lam in &self.s_set {
                let cand = rep.scale(lam);
                if !extreme_members.contains(&cand) {
                    extreme_members.push(cand);
                }
            }
        }

        Ok(SigmaReport {
            extreme_members,
            confidence,
            ..report_stub
        })
    }
}

/// Result of [`GeneratorSystem::sigma_check`].
#[derive(Debug, Clone)]
pub struct SigmaReport<S> {
    /// Whether the attainment set is nonempty.
    pub centered: bool,
    /// A functional in the set, when nonempty.
    pub witness: Option<Functional<S>>,
    /// The extreme members among unimodular multiples of the generators.
    pub extreme_members: Vec<Functional<S>>,
    pub confidence: Confidence,
    member_coords: Vec<Vec<S>>,
    member_norm_sqs: Vec<Q>,
}

impl<S: Scalar> SigmaReport<S> {
    /// Pointwise membership: dual norm one and attainment on every member.
    pub fn is_member(&self, gens: &GeneratorSystem<S>, ell: &Functional<S>) -> (bool, Confidence) {
        let (norm, conf) = gens.dual_norm(ell);
        if !norm.is_one() {
            return (false, conf);
        }
        let attained = self
            .member_coords
            .iter()
            .zip(self.member_norm_sqs.iter())
            .all(|(fc, nsq)| &ell.apply(fc).abs_sq() == nsq);
        (attained, conf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qz, Q};
    use crate::space::{FunctionVec, Subspace, WeightedSpace};
    use crate::DEFAULT_S_POINTS;
    use std::sync::Arc;

    fn rspace(weights: &[Q]) -> Arc<WeightedSpace<Q>> {
        let names: Vec<String> = (0..weights.len())
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect();
        WeightedSpace::new(names, weights.to_vec()).unwrap()
    }

    fn rsub(weights: &[Q], basis: &[&[Q]]) -> Subspace<Q> {
        let sp = rspace(weights);
        let basis = basis
            .iter()
            .map(|row| FunctionVec::new(&sp, row.to_vec()).unwrap())
            .collect();
        Subspace::new(sp, basis).unwrap()
    }

    fn func(coords: &[Q]) -> Functional<Q> {
        Functional::new(coords.to_vec())
    }

    #[test]
    fn dual_norm_examples() {
        // Full two-point space, ell = ev_a - ev_b has dual norm 2.
        let a = Subspace::full(rspace(&[qz(1), qz(1)]));
        let gs = GeneratorSystem::new(&a, DEFAULT_S_POINTS);
        let (n, conf) = gs.dual_norm(&func(&[qz(1), qz(-1)]));
        assert_eq!(n.exact(), Some(qz(2)));
        assert!(conf.is_exact());

        let (z, _) = gs.dual_norm(&func(&[qz(0), qz(0)]));
        assert!(z.is_zero());

        // Weight (2,1): ev_a has dual norm 1/2.
        let b = Subspace::full(rspace(&[qz(2), qz(1)]));
        let gsb = GeneratorSystem::new(&b, DEFAULT_S_POINTS);
        let (h, _) = gsb.dual_norm(&func(&[qz(1), qz(0)]));
        assert_eq!(h.exact(), Some(q(1, 2)));
    }

    #[test]
    fn dual_norm_cache_coheres() {
        let a = Subspace::full(rspace(&[qz(1), qz(1)]));
        let gs = GeneratorSystem::new(&a, DEFAULT_S_POINTS);
        let ell = func(&[qz(1), qz(-1)]);
        assert!(ell.cached_dual_norm().is_none());
        let first = gs.dual_norm(&ell);
        assert_eq!(ell.cached_dual_norm(), Some(&first));
        // Recomputing from scratch gives the same value.
        let fresh = func(&[qz(1), qz(-1)]);
        assert_eq!(gs.dual_norm(&fresh), first);
    }

    #[test]
    fn hull_membership_examples() {
        let s = Q::s_sample(0);
        let g1 = func(&[qz(1), qz(1)]);
        let g2 = func(&[qz(1), qz(-1)]);
        let g3 = func(&[qz(1), qz(0)]);

        // midpoint
        match hull_membership(&func(&[qz(1), qz(0)]), &[&g1, &g2], &s) {
            HullMembership::Member { combo } => {
                let total: Q = combo.iter().map(|(_, _, c)| c.clone()).sum();
                assert_eq!(total, qz(1));
            }
            other => panic!("expected member, got {other:?}"),
        }

        // (1,1) outside absconv{(1,-1),(1,0)}
        match hull_membership(&g1, &[&g2, &g3], &s) {
            HullMembership::Outside { separator, confidence } => {
                assert!(confidence.is_exact());
                let t = linalg::dot(g1.coords(), &separator);
                for g in [&g2, &g3] {
                    for lam in [qz(1), qz(-1)] {
                        assert!(linalg::dot(&g.scale(&lam).coords, &separator) < t);
                    }
                }
            }
            other => panic!("expected outside, got {other:?}"),
        }

        // zero target is always inside
        assert!(hull_membership(&func(&[qz(0), qz(0)]), &[&g1], &s).is_member());
    }

    #[test]
    fn extreme_examples() {
        let a = rsub(
            &[qz(1), qz(1), qz(1)],
            &[&[qz(1), qz(1), qz(1)], &[qz(1), qz(-1), qz(0)]],
        );
        let gs = GeneratorSystem::new(&a, DEFAULT_S_POINTS);
        assert_eq!(gs.is_extreme(&func(&[qz(1), qz(1)])).unwrap(), (true, Confidence::Exact));
        assert_eq!(gs.is_extreme(&func(&[qz(1), qz(0)])).unwrap(), (false, Confidence::Exact));

        let full = Subspace::full(rspace(&[qz(1), qz(1)]));
        let gf = GeneratorSystem::new(&full, DEFAULT_S_POINTS);
        assert_eq!(gf.is_extreme(&func(&[qz(1), qz(0)])).unwrap(), (true, Confidence::Exact));

        // norm != 1 is a precondition failure
        assert!(matches!(
            gs.is_extreme(&func(&[q(1, 2), qz(0)])),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn extreme_scaling_invariance() {
        let a = rsub(
            &[qz(1), qz(1), qz(1)],
            &[&[qz(1), qz(1), qz(1)], &[qz(1), qz(-1), qz(0)]],
        );
        let gs = GeneratorSystem::new(&a, DEFAULT_S_POINTS);
        for coords in [[qz(1), qz(1)], [qz(1), qz(-1)], [qz(1), qz(0)]] {
            let plus = gs.is_extreme(&func(&coords)).unwrap().0;
            let minus = gs
                .is_extreme(&func(&coords).scale(&qz(-1)))
                .unwrap()
                .0;
            assert_eq!(plus, minus);
        }
    }

    #[test]
    fn class_grouping() {
        // span{(1,-1)}: the two evaluation functionals are opposite, one class.
        let b = rsub(&[qz(1), qz(1)], &[&[qz(1), qz(-1)]]);
        let gs = GeneratorSystem::new(&b, DEFAULT_S_POINTS);
        assert_eq!(gs.classes().len(), 1);
        assert_eq!(gs.class_rep(1), 0);
        // extreme: dual ball is the segment [-1, 1]
        assert_eq!(gs.is_extreme(&func(&[qz(1)])).unwrap(), (true, Confidence::Exact));
    }

    #[test]
    fn sigma_examples() {
        let full = Subspace::full(rspace(&[qz(1), qz(1)]));
        let gs = GeneratorSystem::new(&full, DEFAULT_S_POINTS);

        let g = Family::new(
            &full,
            vec![FunctionVec::new(full.ambient(), vec![qz(1), qz(1)]).unwrap()],
        )
        .unwrap();
        let report = gs.sigma_check(&g).unwrap();
        assert!(report.centered);
        let (ok, conf) = report.is_member(&gs, &func(&[q(1, 2), q(1, 2)]));
        assert!(ok && conf.is_exact());
        // extreme members: all four signed evaluations
        let expect: Vec<Functional<Q>> = vec![
            func(&[qz(1), qz(0)]),
            func(&[qz(-1), qz(0)]),
            func(&[qz(0), qz(1)]),
            func(&[qz(0), qz(-1)]),
        ];
        assert_eq!(report.extreme_members.len(), 4);
        for e in expect {
            assert!(report.extreme_members.contains(&e));
        }

        // Indicators cannot both attain in the cross-polytope ball.
        let g2 = Family::new(
            &full,
            vec![
                FunctionVec::new(full.ambient(), vec![qz(1), qz(0)]).unwrap(),
                FunctionVec::new(full.ambient(), vec![qz(0), qz(1)]).unwrap(),
            ],
        )
        .unwrap();
        let report2 = gs.sigma_check(&g2).unwrap();
        assert!(!report2.centered);
        assert!(report2.extreme_members.is_empty());
    }

    #[test]
    fn sigma_family_guard() {
        let full = Subspace::full(rspace(&[qz(1), qz(1)]));
        let gs = GeneratorSystem::new(&full, DEFAULT_S_POINTS);
        let many = vec![FunctionVec::new(full.ambient(), vec![qz(1), qz(1)]).unwrap(); 21];
        let fam = Family::new(&full, many).unwrap();
        assert!(matches!(
            gs.sigma_check(&fam),
            Err(Error::FamilyTooLarge(21, _))
        ));
    }
}
