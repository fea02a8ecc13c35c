//! Linear maps between subspaces: exact isometry verification by two-sided
//! hull inclusion, weighted composition operators, recovery of the
//! phase/point factorization on the extreme-pullback set, the composition
//! and inverse laws, and the pinning properties used to characterize when
//! the factorization covers the whole codomain.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::choquet;
use crate::dual::{hull_membership, Functional, GeneratorSystem, HullMembership};
use crate::error::{Error, Result};
use crate::linalg;
use crate::polytope::{self, Constraint};
use crate::scalar::{q, unimodular_ratio, Confidence, Field, Q, Scalar};
use crate::space::{FunctionVec, Subspace};

/// A linear operator between two subspaces, stored as the matrix taking
/// domain basis coordinates to codomain basis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap<S> {
    domain: Subspace<S>,
    codomain: Subspace<S>,
    matrix: Vec<Vec<S>>, // d2 x d1
}

impl<S: Scalar> LinearMap<S> {
    pub fn new(domain: Subspace<S>, codomain: Subspace<S>, matrix: Vec<Vec<S>>) -> Result<LinearMap<S>> {
        let d1 = domain.dim();
        let d2 = codomain.dim();
        if matrix.len() != d2 || matrix.iter().any(|row| row.len() != d1) {
            return Err(Error::DimensionMismatch {
                rows: matrix.len(),
                cols: matrix.first().map_or(0, |r| r.len()),
                expected_rows: d2,
                expected_cols: d1,
            });
        }
        Ok(LinearMap { domain, codomain, matrix })
    }

    pub fn identity(subspace: Subspace<S>) -> LinearMap<S> {
        let d = subspace.dim();
        let matrix = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { S::one() } else { S::zero() })
                    .collect()
            })
            .collect();
        LinearMap {
            domain: subspace.clone(),
            codomain: subspace,
            matrix,
        }
    }

    pub fn domain(&self) -> &Subspace<S> {
        &self.domain
    }

    pub fn codomain(&self) -> &Subspace<S> {
        &self.codomain
    }

    pub fn matrix(&self) -> &[Vec<S>] {
        &self.matrix
    }

    pub fn apply_coords(&self, domain_coords: &[S]) -> Vec<S> {
        linalg::mat_vec(&self.matrix, domain_coords)
    }

    pub fn apply(&self, f: &FunctionVec<S>) -> Result<FunctionVec<S>> {
        let c = self.domain.coords_of(f)?;
        Ok(self.codomain.function_from_coords(&self.apply_coords(&c)))
    }

    /// The adjoint on coordinates: a functional on the codomain pulled back
    /// to one on the domain.
    pub fn pullback(&self, m: &Functional<S>) -> Functional<S> {
        assert_eq!(m.dim(), self.codomain.dim());
        let coords = (0..self.domain.dim())
            .map(|j| {
                m.coords()
                    .iter()
                    .zip(self.matrix.iter())
                    .fold(S::zero(), |acc, (mk, row)| acc + mk.clone() * row[j].clone())
            })
            .collect();
        Functional::new(coords)
    }

    /// Pullback of the codomain evaluation functional at `x`.
    pub fn pulled_generator(&self, x: usize) -> Functional<S> {
        self.pullback(&self.codomain.delta_unchecked(&S::one(), x))
    }

    /// `self` after `first`: the map `f -> self(first(f))`.
    pub fn compose(&self, first: &LinearMap<S>) -> Result<LinearMap<S>> {
        if first.codomain != self.domain {
            return Err(Error::ComposeMismatch);
        }
        Ok(LinearMap {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: linalg::mat_mul(&self.matrix, &first.matrix),
        })
    }

    pub fn inverse(&self) -> Result<LinearMap<S>> {
        let inv = linalg::invert(&self.matrix).ok_or(Error::NotOntoIsometry)?;
        Ok(LinearMap {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            matrix: inv,
        })
    }

    /// Exact norm-preservation check by two-sided hull inclusion: every
    /// domain evaluation functional must lie in the absolutely convex hull
    /// of the pulled-back codomain ones, and vice versa. A failed inclusion
    /// yields a function whose norm the map provably changes.
    pub fn verify_into_isometry(&self, s_points: usize) -> Result<IsometryVerdict<S>> {
        let s_set = S::s_sample(s_points);
        let n1 = self.domain.ambient().len();
        let n2 = self.codomain.ambient().len();
        let domain_gens: Vec<Functional<S>> = (0..n1)
            .map(|z| self.domain.delta_unchecked(&S::one(), z))
            .collect();
        let pulled: Vec<Functional<S>> = (0..n2).map(|x| self.pulled_generator(x)).collect();
        let domain_refs: Vec<&Functional<S>> = domain_gens.iter().collect();
        let pulled_refs: Vec<&Functional<S>> = pulled.iter().collect();

        let mut confidence = Confidence::Exact;
        let mut inconclusive = false;
        let mut pending: Vec<(&Functional<S>, &Vec<&Functional<S>>)> = Vec::new();
        for g in &domain_gens {
            pending.push((g, &pulled_refs));
        }
        for p in &pulled {
            pending.push((p, &domain_refs));
        }
        for (target, hull) in pending {
            match hull_membership(target, hull, &s_set) {
                HullMembership::Member { .. } => {}
                HullMembership::Outside { separator, confidence: c } => {
                    // Both inclusion directions separate with an element of
                    // the domain (pullbacks live on the domain).
                    let f = self.domain.function_from_coords(&separator);
                    let nf = self.domain.ambient().sup_norm(f.values());
                    let tf_coords = self.apply_coords(&separator);
                    let tf = self.codomain.function_from_coords(&tf_coords);
                    let ntf = self.codomain.ambient().sup_norm(tf.values());
                    if nf != ntf {
                        return Ok(IsometryVerdict::No { witness: f });
                    }
                    if S::exact_hulls() {
                        unreachable!("exact separation must change the norm");
                    }
                    confidence = confidence.merge(c);
                    inconclusive = true;
                }
            }
        }
        if inconclusive {
            return Ok(IsometryVerdict::Unknown { confidence });
        }
        Ok(IsometryVerdict::Isometry { confidence: Confidence::Exact })
    }

    /// Surjectivity on top of norm preservation: full rank onto the codomain.
    pub fn verify_onto_isometry(&self, s_points: usize) -> Result<bool> {
        match self.verify_into_isometry(s_points)? {
            IsometryVerdict::Isometry { .. } => {}
            IsometryVerdict::No { .. } => return Err(Error::NotIntoIsometry),
            IsometryVerdict::Unknown { .. } => {
                return Err(Error::ComplexUnsupported(
                    "cannot certify the isometry at this circle sample size".into(),
                ))
            }
        }
        Ok(linalg::rank(&self.matrix) == self.codomain.dim())
    }
}

#[derive(Debug, Clone)]
pub enum IsometryVerdict<S> {
    Isometry { confidence: Confidence },
    /// The witness has `||Tf|| != ||f||`, checked exactly.
    No { witness: FunctionVec<S> },
    /// Complex-field sampling could not settle the question.
    Unknown { confidence: Confidence },
}

impl<S> IsometryVerdict<S> {
    pub fn is_isometry(&self) -> bool {
        matches!(self, IsometryVerdict::Isometry { .. })
    }
}

/// A phase/point factorization: on a subset of the codomain's points,
/// a unimodular phase and a domain point per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionForm<S> {
    entries: BTreeMap<usize, (S, usize)>,
}

impl<S: Scalar> CompositionForm<S> {
    pub fn new(entries: BTreeMap<usize, (S, usize)>) -> Result<CompositionForm<S>> {
        for (x, (phi, _)) in &entries {
            if !phi.is_unimodular() {
                return Err(Error::NotUnimodular(format!("phi(#{x}) = {phi}")));
            }
        }
        Ok(CompositionForm { entries })
    }

    pub fn defined_on(&self) -> BTreeSet<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn phi(&self, x: usize) -> Option<&S> {
        self.entries.get(&x).map(|(p, _)| p)
    }

    pub fn tau(&self, x: usize) -> Option<usize> {
        self.entries.get(&x).map(|(_, t)| *t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S, usize)> {
        self.entries.iter().map(|(&x, (p, t))| (x, p, *t))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Image of the point map.
    pub fn tau_image(&self) -> BTreeSet<usize> {
        self.entries.values().map(|(_, t)| *t).collect()
    }
}

/// Build the operator `Tf(x) = phi(x) (p1(tau(x)) / p2(x)) f(tau(x))` on the
/// form's domain and `0` elsewhere, expressed against the codomain basis.
/// Also reports whether the result preserves norms, which happens exactly
/// when the image of `tau` is a boundary of the domain.
pub fn weighted_composition_operator<S: Scalar>(
    a1: &Subspace<S>,
    a2: &Subspace<S>,
    form: &CompositionForm<S>,
    s_points: usize,
) -> Result<(LinearMap<S>, IsometryVerdict<S>)> {
    let n2 = a2.ambient().len();
    for (x, _, t) in form.iter() {
        a2.ambient().check_point(x)?;
        a1.ambient().check_point(t)?;
    }
    let d1 = a1.dim();
    let mut columns: Vec<Vec<S>> = Vec::with_capacity(d1);
    for b in a1.basis() {
        let mut values = vec![S::zero(); n2];
        for (x, phi, t) in form.iter() {
            let ratio = a1.ambient().weight(t).clone() / a2.ambient().weight(x).clone();
            values[x] = phi.clone() * ratio * b.value(t).clone();
        }
        let fv = FunctionVec::new(a2.ambient(), values)?;
        columns.push(a2.coords_of(&fv).map_err(|_| Error::NotInCodomainSpan)?);
    }
    let matrix: Vec<Vec<S>> = (0..a2.dim())
        .map(|k| (0..d1).map(|j| columns[j][k].clone()).collect())
        .collect();
    let map = LinearMap::new(a1.clone(), a2.clone(), matrix)?;

    let verdict = if form.is_empty() {
        IsometryVerdict::No {
            witness: a1.basis()[0].clone(),
        }
    } else {
        match crate::space::is_boundary(a1, &form.tau_image(), s_points)? {
            crate::space::BoundaryVerdict::Holds { confidence } => {
                IsometryVerdict::Isometry { confidence }
            }
            crate::space::BoundaryVerdict::Fails { witness } => IsometryVerdict::No { witness },
            crate::space::BoundaryVerdict::Unknown { confidence } => {
                IsometryVerdict::Unknown { confidence }
            }
        }
    };
    Ok((map, verdict))
}

/// Whether the factorization identity holds at every point of the form:
/// the pulled-back evaluation at `x` equals `phi(x)` times the domain
/// evaluation at `tau(x)`.
pub fn form_matches_map<S: Scalar>(t: &LinearMap<S>, form: &CompositionForm<S>) -> Result<Option<usize>> {
    for (x, phi, tp) in form.iter() {
        t.codomain().ambient().check_point(x)?;
        t.domain().ambient().check_point(tp)?;
        let pulled = t.pulled_generator(x);
        let expected = t.domain().delta_unchecked(phi, tp);
        if pulled != expected {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// Recover the canonical factorization of an into-isometry on its
/// extreme-pullback set: match each pulled generator against the domain's
/// evaluation-functional classes, taking the class representative as the
/// point value and the unimodular ratio as the phase.
pub fn decompose<S: Scalar>(
    t: &LinearMap<S>,
    s_points: usize,
) -> Result<(CompositionForm<S>, Confidence)> {
    let gens = GeneratorSystem::new(t.domain(), s_points);
    for class in gens.classes() {
        if gens.generator(class[0]).is_zero() {
            let names = class
                .iter()
                .map(|&z| t.domain().ambient().name_of(z).to_string())
                .collect();
            return Err(Error::AmbiguousEvaluationClass(names));
        }
    }
    let (mset, mut confidence) = choquet::m_set(t, s_points)?;
    let mut entries = BTreeMap::new();
    for &x in &mset {
        let pulled = t.pulled_generator(x);
        let class = gens
            .matching_class(&pulled)
            .ok_or_else(|| Error::LawViolation("extreme pullback matches no generator class".into()))?;
        let rep = gens.classes()[class][0];
        let phi = unimodular_ratio(pulled.coords(), gens.generator(rep).coords())
            .ok_or_else(|| Error::LawViolation("matched class lost proportionality".into()))?;
        entries.insert(x, (phi, rep));
    }
    let form = CompositionForm::new(entries)?;

    // Every extreme class representative must be hit by the point map.
    let verdicts = gens.extreme_classes().to_vec();
    for (c, class) in gens.classes().iter().enumerate() {
        let (extreme, econf) = verdicts[c];
        confidence = confidence.merge(econf);
        if extreme && !form.tau_image().contains(&class[0]) {
            return Err(Error::LawViolation(format!(
                "extreme class of point {} is missed by the point map",
                t.domain().ambient().name_of(class[0])
            )));
        }
    }
    Ok((form, confidence))
}

/// How a candidate factorization relates to the canonical one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormComparison {
    /// The defining identity fails at this codomain point: rejected.
    IdentityFails { point: usize },
    /// Identity holds everywhere and the candidate agrees with the
    /// canonical form on its whole domain.
    Agrees,
    /// Identity holds but the point lies outside the canonical set; only
    /// possible off the full-space setting.
    OffCanonicalSet { point: usize },
    /// Identity holds inside the canonical set with a different value: a
    /// law-violation signal.
    DisagreesAt { point: usize },
}

/// Check a candidate factorization against the canonical one, implementing
/// the uniqueness clause: a candidate satisfying the identity must live
/// inside the canonical set and agree with it there.
pub fn compare_form<S: Scalar>(
    t: &LinearMap<S>,
    canonical: &CompositionForm<S>,
    candidate: &CompositionForm<S>,
) -> Result<FormComparison> {
    if let Some(x) = form_matches_map(t, candidate)? {
        return Ok(FormComparison::IdentityFails { point: x });
    }
    for (x, phi, tp) in candidate.iter() {
        match (canonical.phi(x), canonical.tau(x)) {
            (None, _) | (_, None) => return Ok(FormComparison::OffCanonicalSet { point: x }),
            (Some(cphi), Some(ctau)) => {
                if cphi != phi || ctau != tp {
                    return Ok(FormComparison::DisagreesAt { point: x });
                }
            }
        }
    }
    Ok(FormComparison::Agrees)
}

/// The factorization of a composition: defined on the preimage of the first
/// map's canonical set under the second map's point map, with phases
/// multiplied and point maps composed. Verified against decomposing the
/// composed operator directly.
pub fn compose_forms<S: Scalar>(
    t1: &LinearMap<S>,
    form1: &CompositionForm<S>,
    t2: &LinearMap<S>,
    form2: &CompositionForm<S>,
    s_points: usize,
) -> Result<CompositionForm<S>> {
    if t1.codomain() != t2.domain() {
        return Err(Error::ComposeMismatch);
    }
    let mut entries = BTreeMap::new();
    for (x, phi2, t2p) in form2.iter() {
        let (Some(phi1), Some(t1p)) = (form1.phi(t2p), form1.tau(t2p)) else {
            continue;
        };
        entries.insert(x, (phi2.clone() * phi1.clone(), t1p));
    }
    if entries.is_empty() {
        return Err(Error::LawViolation(
            "composite factorization domain is empty".into(),
        ));
    }
    let composed = CompositionForm::new(entries)?;

    let t3 = t2.compose(t1)?;
    let (canonical, _) = decompose(&t3, s_points)?;
    match compare_form(&t3, &canonical, &composed)? {
        FormComparison::Agrees => Ok(composed),
        other => Err(Error::LawViolation(format!(
            "composite form disagrees with the direct factorization: {other:?}"
        ))),
    }
}

/// The factorization of the inverse of an onto-isometry: the point map is
/// inverted and the phase reciprocated along it. Verified against
/// decomposing the inverse matrix directly.
pub fn invert_form<S: Scalar>(
    t: &LinearMap<S>,
    form: &CompositionForm<S>,
    s_points: usize,
) -> Result<CompositionForm<S>> {
    if !t.verify_onto_isometry(s_points)? {
        return Err(Error::NotOntoIsometry);
    }
    let n1 = t.domain().ambient().len();
    let mut inverse_entries: BTreeMap<usize, (S, usize)> = BTreeMap::new();
    for (x, phi, tp) in form.iter() {
        if inverse_entries.contains_key(&tp) {
            return Err(Error::PointMapNotBijective);
        }
        inverse_entries.insert(tp, (phi.unimodular_recip(), x));
    }
    if inverse_entries.len() != n1 {
        return Err(Error::PointMapNotBijective);
    }
    let constructed = CompositionForm::new(inverse_entries)?;

    let tinv = t.inverse()?;
    let (canonical, _) = decompose(&tinv, s_points)?;
    if canonical != constructed {
        return Err(Error::LawViolation(
            "inverted form disagrees with the factorization of the inverse map".into(),
        ));
    }
    Ok(constructed)
}

/// Status of the pinning property at one codomain point.
#[derive(Debug, Clone)]
pub enum BetaStatus<S> {
    /// A family whose images attain their norms simultaneously exactly here.
    Pinned { family: Vec<FunctionVec<S>> },
    /// Impossible: any function norming this point also norms `blocking`
    /// (or, with `None`, no function norms this point at all).
    NotPinned { blocking: Option<usize> },
    /// The bounded complex-field search was exhausted without an answer.
    Unknown,
}

impl<S> BetaStatus<S> {
    pub fn is_pinned(&self) -> bool {
        matches!(self, BetaStatus::Pinned { .. })
    }
}

/// Report for the two factorization-coverage properties of an isometry.
#[derive(Debug, Clone)]
pub struct AlphaBetaReport<S> {
    /// Escape from any compact is impossible on a finite model, so the
    /// functional-avoidance property holds with the whole point set.
    pub alpha: bool,
    pub alpha_note: &'static str,
    pub beta: BTreeMap<usize, BetaStatus<S>>,
    pub confidence: Confidence,
}

impl<S> AlphaBetaReport<S> {
    pub fn beta_everywhere(&self) -> bool {
        self.beta.values().all(BetaStatus::is_pinned)
    }
}

const BETA_SEARCH_BUDGET: usize = 10_000;

/// Decide, per codomain point, whether some family of domain functions is
/// normed by its image exactly at that point. Exact over the real field via
/// the face geometry of the predual ball; bounded three-valued search over
/// the complex field.
pub fn property_alpha_beta<S: Scalar>(
    t: &LinearMap<S>,
    s_points: usize,
) -> Result<AlphaBetaReport<S>> {
    match t.verify_into_isometry(s_points)? {
        IsometryVerdict::Isometry { .. } => {}
        IsometryVerdict::No { .. } => return Err(Error::NotIntoIsometry),
        IsometryVerdict::Unknown { .. } => {
            return Err(Error::ComplexUnsupported(
                "cannot certify the isometry at this circle sample size".into(),
            ))
        }
    }
    let (beta, confidence) = if S::FIELD == Field::Real {
        (beta_exact(t)?, Confidence::Exact)
    } else {
        (
            beta_search(t)?,
            Confidence::Discretized { s_points },
        )
    };
    Ok(AlphaBetaReport {
        alpha: true,
        alpha_note: "finite model: the whole point set is the compact",
        beta,
        confidence,
    })
}

/// Exact pinning decision over the real field. The unit-norm functions
/// normed by the image at `x0` form a face of the predual ball; `x0` is
/// pinnable iff that face escapes the corresponding face pair of every
/// other point, and explicit escapees assemble into the witness family.
fn beta_exact<S: Scalar>(t: &LinearMap<S>) -> Result<BTreeMap<usize, BetaStatus<S>>> {
    let d1 = t.domain().dim();
    let n1 = t.domain().ambient().len();
    let n2 = t.codomain().ambient().len();

    let to_q = |f: &Functional<S>| -> Vec<Q> { f.coords().iter().map(|c| c.re()).collect() };
    let pulled: Vec<Vec<Q>> = (0..n2).map(|x| to_q(&t.pulled_generator(x))).collect();

    let mut constraints = Vec::with_capacity(2 * n1);
    for z in 0..n1 {
        let row = to_q(&t.domain().delta_unchecked(&S::one(), z));
        let neg: Vec<Q> = row.iter().map(|c| -c.clone()).collect();
        constraints.push(Constraint::le(row, Q::one()));
        constraints.push(Constraint::le(neg, Q::one()));
    }
    let ball_vertices = polytope::vertices(d1, &constraints);

    let value = |g: &[Q], v: &[Q]| -> Q { g.iter().zip(v.iter()).map(|(a, b)| a * b).sum() };

    let mut out = BTreeMap::new();
    for x0 in 0..n2 {
        let face: Vec<Vec<Q>> = ball_vertices
            .iter()
            .filter(|v| value(&pulled[x0], v) == Q::one())
            .cloned()
            .collect();
        if face.is_empty() {
            out.insert(x0, BetaStatus::NotPinned { blocking: None });
            continue;
        }
        let mut witnesses: Vec<Vec<Q>> = Vec::new();
        let mut blocked = None;
        for x in 0..n2 {
            if x == x0 {
                continue;
            }
            let vals: Vec<Q> = face.iter().map(|v| value(&pulled[x], v)).collect();
            let all_plus = vals.iter().all(|v| v == &Q::one());
            let all_minus = vals.iter().all(|v| v == &(-Q::one()));
            if all_plus || all_minus {
                blocked = Some(x);
                break;
            }
            // A face vertex with |value| != 1 escapes both faces of x;
            // otherwise mix a +1 and a -1 vertex.
            let escape: Vec<Q> = face
                .iter()
                .zip(vals.iter())
                .find(|(_, v)| *v != &Q::one() && *v != &(-Q::one()))
                .map(|(v, _)| v.clone())
                .unwrap_or_else(|| {
                    let plus = face
                        .iter()
                        .zip(vals.iter())
                        .find(|(_, v)| *v == &Q::one())
                        .expect("mixed face");
                    let minus = face
                        .iter()
                        .zip(vals.iter())
                        .find(|(_, v)| *v == &(-Q::one()))
                        .expect("mixed face");
                    plus.0
                        .iter()
                        .zip(minus.0.iter())
                        .map(|(a, b)| (a + b) * q(1, 2))
                        .collect()
                });
            if !witnesses.contains(&escape) {
                witnesses.push(escape);
            }
        }
        if let Some(x) = blocked {
            out.insert(x0, BetaStatus::NotPinned { blocking: Some(x) });
            continue;
        }
        if witnesses.is_empty() {
            // single-point codomain: any face vertex pins it
            witnesses.push(face[0].clone());
        }
        let family: Vec<FunctionVec<S>> = witnesses
            .iter()
            .map(|w| {
                let coords: Vec<S> = w.iter().map(|c| S::from_q(c.clone())).collect();
                t.domain().function_from_coords(&coords)
            })
            .collect();
        debug_assert!(pin_verified(t, &family, x0));
        out.insert(x0, BetaStatus::Pinned { family });
    }
    Ok(out)
}

/// Exact check that the family's images attain their norms exactly at `x0`.
fn pin_verified<S: Scalar>(t: &LinearMap<S>, family: &[FunctionVec<S>], x0: usize) -> bool {
    let mut intersection: Option<BTreeSet<usize>> = None;
    for f in family {
        let tf = match t.apply(f) {
            Ok(tf) => tf,
            Err(_) => return false,
        };
        let spm = match t.codomain().suppmax(&tf) {
            Ok(s) => s,
            Err(_) => return false,
        };
        intersection = Some(match intersection {
            None => spm,
            Some(acc) => acc.intersection(&spm).copied().collect(),
        });
    }
    intersection.is_some_and(|s| s.len() == 1 && s.contains(&x0))
}

/// Bounded search for pinning families over the complex field: the direct
/// construction through the inverse when the map is onto a full space, then
/// a budgeted greedy random search. Never claims a negative.
fn beta_search<S: Scalar>(t: &LinearMap<S>) -> Result<BTreeMap<usize, BetaStatus<S>>> {
    let n2 = t.codomain().ambient().len();
    let mut out = BTreeMap::new();
    let onto_full = t.codomain().is_full()
        && t.domain().dim() == t.codomain().dim()
        && linalg::rank(t.matrix()) == t.codomain().dim();

    let mut rng = ChaCha20Rng::seed_from_u64(0x6265_7461);
    for x0 in 0..n2 {
        if onto_full {
            // h peaks exactly at x0 in weighted modulus; pull it back.
            let values: Vec<S> = (0..n2)
                .map(|x| {
                    let peak = if x == x0 { S::one() } else { S::from_q(q(1, 2)) };
                    peak / t.codomain().ambient().weight(x).clone()
                })
                .collect();
            let h = FunctionVec::new(t.codomain().ambient(), values)?;
            let hc = t.codomain().coords_of(&h)?;
            let inv = t.inverse()?;
            let f = t.domain().function_from_coords(&inv.apply_coords(&hc));
            let family = vec![f];
            if pin_verified(t, &family, x0) {
                out.insert(x0, BetaStatus::Pinned { family });
                continue;
            }
        }
        let mut family: Vec<FunctionVec<S>> = Vec::new();
        let mut current: Option<BTreeSet<usize>> = None;
        let mut found = false;
        for _ in 0..BETA_SEARCH_BUDGET {
            let coords: Vec<S> = (0..t.domain().dim())
                .map(|_| {
                    let re = q(rng.random_range(-8..=8), rng.random_range(1..=4));
                    let im = q(rng.random_range(-8..=8), rng.random_range(1..=4));
                    S::from_parts(re, im).expect("complex scalar")
                })
                .collect();
            let f = t.domain().function_from_coords(&coords);
            if f.is_zero() {
                continue;
            }
            let tf = t.apply(&f)?;
            if tf.is_zero() {
                continue;
            }
            let spm = t.codomain().suppmax(&tf)?;
            if !spm.contains(&x0) {
                continue;
            }
            let next: BTreeSet<usize> = match &current {
                None => spm,
                Some(acc) => acc.intersection(&spm).copied().collect(),
            };
            if current.as_ref() == Some(&next) {
                continue;
            }
            family.push(f);
            current = Some(next.clone());
            if next.len() == 1 {
                found = true;
                break;
            }
        }
        if found && pin_verified(t, &family, x0) {
            out.insert(x0, BetaStatus::Pinned { family });
        } else {
            out.insert(x0, BetaStatus::Unknown);
        }
    }
    Ok(out)
}

/// Injectivity of the pullback on phases-times-points after class
/// deduplication: no two codomain points pull back to unimodular multiples
/// of each other, and no pullback collapses to zero.
pub fn pullback_injective<S: Scalar>(t: &LinearMap<S>) -> bool {
    let n2 = t.codomain().ambient().len();
    let pulled: Vec<Functional<S>> = (0..n2).map(|x| t.pulled_generator(x)).collect();
    for x in 0..n2 {
        if pulled[x].is_zero() {
            return false;
        }
        for y in (x + 1)..n2 {
            if unimodular_ratio(pulled[x].coords(), pulled[y].coords()).is_some() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cq, qz, CQ};
    use crate::space::WeightedSpace;
    use crate::DEFAULT_S_POINTS;

    fn full(weights: &[Q]) -> Subspace<Q> {
        let names: Vec<String> = (0..weights.len())
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect();
        Subspace::full(WeightedSpace::new(names, weights.to_vec()).unwrap())
    }

    fn embed_2_3() -> LinearMap<Q> {
        // Tf = (f(a), -f(b), (f(a)+f(b))/2)
        LinearMap::new(
            full(&[qz(1), qz(1)]),
            full(&[qz(1), qz(1), qz(1)]),
            vec![
                vec![qz(1), qz(0)],
                vec![qz(0), qz(-1)],
                vec![q(1, 2), q(1, 2)],
            ],
        )
        .unwrap()
    }

    fn swap_with_sign() -> LinearMap<Q> {
        // Tf = (f(b), -f(a))
        let a = full(&[qz(1), qz(1)]);
        LinearMap::new(a.clone(), a, vec![vec![qz(0), qz(1)], vec![qz(-1), qz(0)]]).unwrap()
    }

    #[test]
    fn verify_into_examples() {
        assert!(embed_2_3()
            .verify_into_isometry(DEFAULT_S_POINTS)
            .unwrap()
            .is_isometry());

        let a = full(&[qz(1), qz(1)]);
        let shrink = LinearMap::new(
            a.clone(),
            a.clone(),
            vec![vec![q(1, 2), qz(0)], vec![qz(0), qz(1)]],
        )
        .unwrap();
        match shrink.verify_into_isometry(DEFAULT_S_POINTS).unwrap() {
            IsometryVerdict::No { witness } => {
                let nf = a.ambient().sup_norm(witness.values());
                let tf = shrink.apply(&witness).unwrap();
                let ntf = a.ambient().sup_norm(tf.values());
                assert_ne!(nf, ntf);
            }
            other => panic!("expected failure, got {other:?}"),
        }

        let id = LinearMap::identity(a);
        assert!(id.verify_into_isometry(DEFAULT_S_POINTS).unwrap().is_isometry());
    }

    #[test]
    fn verify_onto_examples() {
        assert!(swap_with_sign().verify_onto_isometry(DEFAULT_S_POINTS).unwrap());
        assert!(!embed_2_3().verify_onto_isometry(DEFAULT_S_POINTS).unwrap());
        assert!(LinearMap::identity(full(&[qz(1), qz(1)]))
            .verify_onto_isometry(DEFAULT_S_POINTS)
            .unwrap());
    }

    #[test]
    fn wco_examples() {
        // U = {x,y,z}, tau = (a,b,a), phi = (1,-1,1): Tf = (f(a), -f(b), f(a))
        let a1 = full(&[qz(1), qz(1)]);
        let a2 = full(&[qz(1), qz(1), qz(1)]);
        let form = CompositionForm::new(BTreeMap::from([
            (0, (qz(1), 0)),
            (1, (qz(-1), 1)),
            (2, (qz(1), 0)),
        ]))
        .unwrap();
        let (map, verdict) = weighted_composition_operator(&a1, &a2, &form, DEFAULT_S_POINTS).unwrap();
        assert!(verdict.is_isometry());
        let f = FunctionVec::new(a1.ambient(), vec![qz(2), qz(3)]).unwrap();
        let tf = map.apply(&f).unwrap();
        assert_eq!(tf.values(), &[qz(2), qz(-3), qz(2)]);

        // U = {x}: kills (0,1)
        let small = CompositionForm::new(BTreeMap::from([(0, (qz(1), 0))])).unwrap();
        let (_, verdict) = weighted_composition_operator(&a1, &a2, &small, DEFAULT_S_POINTS).unwrap();
        assert!(!verdict.is_isometry());

        // weighted: p1 = (2,1), p2 = (1,1): Tf = (2 f(a), f(b))
        let w1 = full(&[qz(2), qz(1)]);
        let w2 = full(&[qz(1), qz(1)]);
        let wform =
            CompositionForm::new(BTreeMap::from([(0, (qz(1), 0)), (1, (qz(1), 1))])).unwrap();
        let (wmap, wverdict) = weighted_composition_operator(&w1, &w2, &wform, DEFAULT_S_POINTS).unwrap();
        assert!(wverdict.is_isometry());
        let g = FunctionVec::new(w1.ambient(), vec![qz(1), qz(5)]).unwrap();
        assert_eq!(wmap.apply(&g).unwrap().values(), &[qz(2), qz(5)]);
    }

    #[test]
    fn decompose_examples() {
        let (form, conf) = decompose(&embed_2_3(), DEFAULT_S_POINTS).unwrap();
        assert!(conf.is_exact());
        assert_eq!(form.defined_on(), BTreeSet::from([0, 1]));
        assert_eq!(form.phi(0), Some(&qz(1)));
        assert_eq!(form.tau(0), Some(0));
        assert_eq!(form.phi(1), Some(&qz(-1)));
        assert_eq!(form.tau(1), Some(1));

        let (sform, _) = decompose(&swap_with_sign(), DEFAULT_S_POINTS).unwrap();
        assert_eq!(sform.defined_on(), BTreeSet::from([0, 1]));
        assert_eq!(sform.phi(0), Some(&qz(1)));
        assert_eq!(sform.tau(0), Some(1));
        assert_eq!(sform.phi(1), Some(&qz(-1)));
        assert_eq!(sform.tau(1), Some(0));

        let id = LinearMap::identity(full(&[qz(1), qz(1)]));
        let (iform, _) = decompose(&id, DEFAULT_S_POINTS).unwrap();
        assert_eq!(iform.phi(0), Some(&qz(1)));
        assert_eq!(iform.tau(0), Some(0));
        assert_eq!(iform.phi(1), Some(&qz(1)));
        assert_eq!(iform.tau(1), Some(1));
    }

    #[test]
    fn compose_example() {
        // T1 = swap-with-sign; T2: tau2 = (a,b,b), phi2 = (1,1,-1).
        let t1 = swap_with_sign();
        let (form1, _) = decompose(&t1, DEFAULT_S_POINTS).unwrap();
        let a2 = full(&[qz(1), qz(1)]);
        let a3 = full(&[qz(1), qz(1), qz(1)]);
        let form2 = CompositionForm::new(BTreeMap::from([
            (0, (qz(1), 0)),
            (1, (qz(1), 1)),
            (2, (qz(-1), 1)),
        ]))
        .unwrap();
        let (t2, v2) = weighted_composition_operator(&a2, &a3, &form2, DEFAULT_S_POINTS).unwrap();
        assert!(v2.is_isometry());
        let composed = compose_forms(&t1, &form1, &t2, &form2, DEFAULT_S_POINTS).unwrap();
        // tau3 = (b, a, a), phi3 = (1, -1, 1)
        assert_eq!(composed.tau(0), Some(1));
        assert_eq!(composed.tau(1), Some(0));
        assert_eq!(composed.tau(2), Some(0));
        assert_eq!(composed.phi(0), Some(&qz(1)));
        assert_eq!(composed.phi(1), Some(&qz(-1)));
        assert_eq!(composed.phi(2), Some(&qz(1)));

        // identity compositions
        let id = LinearMap::identity(full(&[qz(1), qz(1)]));
        let (idf, _) = decompose(&id, DEFAULT_S_POINTS).unwrap();
        let both = compose_forms(&id, &idf, &id, &idf, DEFAULT_S_POINTS).unwrap();
        assert_eq!(both, idf);
        let right = compose_forms(&id, &idf, &t1, &form1, DEFAULT_S_POINTS).unwrap();
        assert_eq!(right, form1);
    }

    #[test]
    fn invert_examples() {
        let t = swap_with_sign();
        let (form, _) = decompose(&t, DEFAULT_S_POINTS).unwrap();
        let inv = invert_form(&t, &form, DEFAULT_S_POINTS).unwrap();
        // T^{-1} g = (-g(b), g(a)): tau' = swap, phi' = (-1, 1)
        assert_eq!(inv.tau(0), Some(1));
        assert_eq!(inv.phi(0), Some(&qz(-1)));
        assert_eq!(inv.tau(1), Some(0));
        assert_eq!(inv.phi(1), Some(&qz(1)));

        let id = LinearMap::identity(full(&[qz(1), qz(1)]));
        let (idf, _) = decompose(&id, DEFAULT_S_POINTS).unwrap();
        assert_eq!(invert_form(&id, &idf, DEFAULT_S_POINTS).unwrap(), idf);

        // unimodular diagonal on a one-point complex space
        let csp = WeightedSpace::<CQ>::new(vec!["a".into()], vec![cq(1, 0)]).unwrap();
        let cfull = Subspace::full(csp);
        let ct = LinearMap::new(cfull.clone(), cfull, vec![vec![cq(0, 1)]]).unwrap();
        let (cform, _) = decompose(&ct, DEFAULT_S_POINTS).unwrap();
        assert_eq!(cform.phi(0), Some(&cq(0, 1)));
        let cinv = invert_form(&ct, &cform, DEFAULT_S_POINTS).unwrap();
        assert_eq!(cinv.phi(0), Some(&cq(0, -1)));
    }

    #[test]
    fn alpha_beta_examples() {
        let report = property_alpha_beta(&swap_with_sign(), DEFAULT_S_POINTS).unwrap();
        assert!(report.alpha);
        assert!(report.beta_everywhere());

        let report23 = property_alpha_beta(&embed_2_3(), DEFAULT_S_POINTS).unwrap();
        assert!(report23.beta[&0].is_pinned());
        assert!(report23.beta[&1].is_pinned());
        match &report23.beta[&2] {
            BetaStatus::NotPinned { blocking: Some(_) } => {}
            other => panic!("expected blocked point, got {other:?}"),
        }

        let id = LinearMap::identity(full(&[qz(1), qz(1), qz(1)]));
        let idreport = property_alpha_beta(&id, DEFAULT_S_POINTS).unwrap();
        assert!(idreport.beta_everywhere());
    }

    #[test]
    fn uniqueness_comparison() {
        let t = embed_2_3();
        let (canonical, _) = decompose(&t, DEFAULT_S_POINTS).unwrap();

        // flipped phase: identity fails
        let impostor = CompositionForm::new(BTreeMap::from([(0, (qz(-1), 0))])).unwrap();
        assert_eq!(
            compare_form(&t, &canonical, &impostor).unwrap(),
            FormComparison::IdentityFails { point: 0 }
        );

        // restriction of the canonical form agrees
        let sub = CompositionForm::new(BTreeMap::from([(1, (qz(-1), 1))])).unwrap();
        assert_eq!(compare_form(&t, &canonical, &sub).unwrap(), FormComparison::Agrees);
    }

    #[test]
    fn pullback_injective_cases() {
        assert!(pullback_injective(&swap_with_sign()));
        assert!(pullback_injective(&embed_2_3()));
        // tau hits `a` twice: the pullbacks at x and z are proportional
        let a1 = full(&[qz(1), qz(1)]);
        let a2 = full(&[qz(1), qz(1), qz(1)]);
        let form = CompositionForm::new(BTreeMap::from([
            (0, (qz(1), 0)),
            (1, (qz(-1), 1)),
            (2, (qz(1), 0)),
        ]))
        .unwrap();
        let (map, _) = weighted_composition_operator(&a1, &a2, &form, DEFAULT_S_POINTS).unwrap();
        assert!(!pullback_injective(&map));
    }
}
