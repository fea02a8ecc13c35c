//! Property suites: one per verified law, each running randomized trials
//! against generated instances with brute-force oracles where the law has an
//! independent route. Failures are shrunk (codomain points, then domain
//! points, then basis vectors) before reporting.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use serde_json::Value;

use crate::choquet;
use crate::dual::{Functional, GeneratorSystem};
use crate::error::{Error, Result};
use crate::generate::{
    gen_instance, random_scalar, random_subspace_of, random_wco_isometry,
    rng_for, GenKind,
};
use crate::instance::{typed_to_value, Instance, Scale};
use crate::isometry::{
    compare_form, compose_forms, decompose, invert_form, property_alpha_beta,
    weighted_composition_operator, BetaStatus, CompositionForm, FormComparison, IsometryVerdict,
    LinearMap,
};
use crate::linalg;
use crate::oracle;
use crate::polytope;
use crate::scalar::{q, unimodular_ratio, Field, Q, Scalar};
use crate::space::{is_boundary, placed_over, sim_equiv, Family, FunctionVec, Subspace};

/// The catalog of verified laws. The string ids are the stable CLI surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuiteId {
    ExtremePullbackCover,    // T3.1
    ExtremeSubsetLaw,        // L4.1
    CenteredFamilyExtremes,  // L4.2
    CenteredImagePinning,    // T4.1
    SingletonPinning,        // C4.1
    SeparationBullets,       // P4.1 / C4.2
    EquivalenceWitness,      // P5.1
    InjectivityCriterion,    // P5.2
    CompactBoundaryCover,    // P6.1
    SeparationInclusion,     // P6.2
    ClassicalFaceRoute,      // P6.3
    BoundaryMeetsSuppmax,    // C6.1
    FunctionalAvoidsTail,    // L7.1
    OntoPinningFamilies,     // L7.2
    AlphaImpliesCover,       // P7.1
    BetaImpliesInjective,    // P7.2
    FullCoverBijection,      // T7.1
    FactorizationRoundtrip,  // T7.2
    ClosureGuardVacuity,     // C7.2-vacuity
    ConstructorLaw,          // C7.3
    CompositionLaw,          // C7.4
    InverseLaw,              // C7.5
    MsetIsBoundary,          // R6.3
    ExtremeOracleAgreement,  // EXT-ORACLE
}

impl SuiteId {
    pub fn id(&self) -> &'static str {
        use SuiteId::*;
        match self {
            ExtremePullbackCover => "T3.1",
            ExtremeSubsetLaw => "L4.1",
            CenteredFamilyExtremes => "L4.2",
            CenteredImagePinning => "T4.1",
            SingletonPinning => "C4.1",
            SeparationBullets => "P4.1/C4.2",
            EquivalenceWitness => "P5.1",
            InjectivityCriterion => "P5.2",
            CompactBoundaryCover => "P6.1",
            SeparationInclusion => "P6.2",
            ClassicalFaceRoute => "P6.3",
            BoundaryMeetsSuppmax => "C6.1",
            FunctionalAvoidsTail => "L7.1",
            OntoPinningFamilies => "L7.2",
            AlphaImpliesCover => "P7.1",
            BetaImpliesInjective => "P7.2",
            FullCoverBijection => "T7.1",
            FactorizationRoundtrip => "T7.2",
            ClosureGuardVacuity => "C7.2-vacuity",
            ConstructorLaw => "C7.3",
            CompositionLaw => "C7.4",
            InverseLaw => "C7.5",
            MsetIsBoundary => "R6.3",
            ExtremeOracleAgreement => "EXT-ORACLE",
        }
    }

    pub fn describe(&self) -> &'static str {
        use SuiteId::*;
        match self {
            ExtremePullbackCover => "every extreme functional is a unimodular multiple of a pulled generator",
            ExtremeSubsetLaw => "extreme points of an attainment set are its intersection with the extreme functionals",
            CenteredFamilyExtremes => "nonempty centered families have extreme attainers matching brute-force face enumeration",
            CenteredImagePinning => "extreme attainers of a centered family sit over the common norm-attaining points of the image",
            SingletonPinning => "a family pinned to one point has exactly the signed pullback there as attainment set",
            SeparationBullets => "strict separation implies image disjointness and inclusion",
            EquivalenceWitness => "point equivalence holds exactly when a unimodular witness pair exists",
            InjectivityCriterion => "pairwise non-equivalence matches injectivity plus image disjointness",
            CompactBoundaryCover => "extreme functionals pull back from every compact boundary; the extreme set meets it",
            SeparationInclusion => "separation bullets force the image of the extreme set into the matching evaluations",
            ClassicalFaceRoute => "the constant-one face route equals the extreme-pullback set",
            BoundaryMeetsSuppmax => "every covering family meets every norm-attaining set",
            FunctionalAvoidsTail => "each sphere functional avoids pullbacks from outside a computed set",
            OntoPinningFamilies => "onto maps of full spaces pin every codomain point",
            AlphaImpliesCover => "the avoidance property forces the pullback image to cover the extreme functionals",
            BetaImpliesInjective => "pinning everywhere forces the pullback to be injective modulo phases",
            FullCoverBijection => "avoidance plus pinning make the pullback a bijection onto the extreme functionals",
            FactorizationRoundtrip => "factorizations round-trip through construction and recovery, and impostors are rejected",
            ClosureGuardVacuity => "the non-closed-set guard can never fire on finite models",
            ConstructorLaw => "surjective point maps on a subset always produce an into-isometry",
            CompositionLaw => "phases multiply and point maps compose on the matching set",
            InverseLaw => "inverting an onto isometry inverts the point map and reciprocates the phase",
            MsetIsBoundary => "the extreme-pullback set of the identity is always a boundary",
            ExtremeOracleAgreement => "LP extremality agrees with vertex enumeration on every generator",
        }
    }

    pub fn parse_id(s: &str) -> Result<SuiteId> {
        use SuiteId::*;
        let all = SuiteId::all();
        if let Some(&found) = all.iter().find(|id| id.id().eq_ignore_ascii_case(s)) {
            return Ok(found);
        }
        match s.to_ascii_uppercase().as_str() {
            "P4.1" | "C4.2" => Ok(SeparationBullets),
            "C7.2" => Ok(ClosureGuardVacuity),
            _ => Err(Error::UnknownSuite(s.to_string())),
        }
    }

    pub fn all() -> &'static [SuiteId] {
        use SuiteId::*;
        &[
            ExtremePullbackCover,
            ExtremeSubsetLaw,
            CenteredFamilyExtremes,
            CenteredImagePinning,
            SingletonPinning,
            SeparationBullets,
            EquivalenceWitness,
            InjectivityCriterion,
            CompactBoundaryCover,
            SeparationInclusion,
            ClassicalFaceRoute,
            BoundaryMeetsSuppmax,
            FunctionalAvoidsTail,
            OntoPinningFamilies,
            AlphaImpliesCover,
            BetaImpliesInjective,
            FullCoverBijection,
            FactorizationRoundtrip,
            ClosureGuardVacuity,
            ConstructorLaw,
            CompositionLaw,
            InverseLaw,
            MsetIsBoundary,
            ExtremeOracleAgreement,
        ]
    }

    /// Suites whose oracles are specific to the exact sign set.
    pub fn real_only(&self) -> bool {
        use SuiteId::*;
        matches!(
            self,
            ExtremeSubsetLaw
                | CenteredFamilyExtremes
                | CenteredImagePinning
                | SingletonPinning
                | SeparationBullets
                | CompactBoundaryCover
                | SeparationInclusion
                | ClassicalFaceRoute
                | BoundaryMeetsSuppmax
                | MsetIsBoundary
                | ExtremeOracleAgreement
                | BetaImpliesInjective
                | FullCoverBijection
                | OntoPinningFamilies
                | FunctionalAvoidsTail
        )
    }
}

impl FromStr for SuiteId {
    type Err = Error;
    fn from_str(s: &str) -> Result<SuiteId> {
        SuiteId::parse_id(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub note: String,
    pub instance: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub description: String,
    pub trials: usize,
    pub completed: usize,
    pub skipped: usize,
    pub status: String,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

enum TrialOutcome {
    Pass,
    Fail(String),
    Skip(String),
}

/// Run a suite over `trials` deterministic trials.
pub fn run_suite(
    id: SuiteId,
    trials: usize,
    seed: u64,
    field: Field,
    s_points: usize,
) -> Result<SuiteReport> {
    match field {
        Field::Real => run_generic::<Q>(id, trials, seed, s_points),
        Field::Complex => {
            if id.real_only() {
                return Err(Error::ComplexUnsupported(format!(
                    "suite {} relies on exact sign-set oracles and runs in the real field",
                    id.id()
                )));
            }
            run_generic::<crate::scalar::CQ>(id, trials, seed, s_points)
        }
    }
}

fn run_generic<S: Scalar>(
    id: SuiteId,
    trials: usize,
    seed: u64,
    s_points: usize,
) -> Result<SuiteReport> {
    let mut completed = 0;
    let mut skipped = 0;
    let mut failures = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    if !S::exact_hulls() {
        notes.push(format!(
            "complex field: hull verdicts sampled at {s_points} circle points"
        ));
    }
    if id == SuiteId::ClosureGuardVacuity {
        notes.push("hypothesis never satisfiable on finite models".into());
    }
    for t in 0..trials {
        let inst = suite_instance::<S>(id, seed, t, s_points)?;
        match run_trial(id, &inst, seed, t, s_points)? {
            TrialOutcome::Pass => completed += 1,
            TrialOutcome::Skip(why) => {
                skipped += 1;
                if notes.len() < 8 {
                    notes.push(format!("trial {t} skipped: {why}"));
                }
            }
            TrialOutcome::Fail(why) => {
                completed += 1;
                let minimized = shrink(id, inst, seed, t, s_points)?;
                let final_note = match run_trial(id, &minimized, seed, t, s_points)? {
                    TrialOutcome::Fail(n) => n,
                    _ => why.clone(),
                };
                failures.push(Failure {
                    trial: t,
                    note: final_note,
                    instance: typed_to_value(&minimized),
                });
            }
        }
    }
    let status = if failures.is_empty() { "pass" } else { "fail" };
    Ok(SuiteReport {
        suite: id.id().to_string(),
        description: id.describe().to_string(),
        trials,
        completed,
        skipped,
        status: status.to_string(),
        failures,
        notes,
    })
}

// ---------------------------------------------------------------------------
// instance recipes

fn small_scale() -> Scale {
    Scale {
        max_points: 4,
        max_dim: 3,
        coefficient_height: 8,
    }
}

fn oracle_scale() -> Scale {
    Scale {
        max_points: 5,
        max_dim: 3,
        coefficient_height: 8,
    }
}

/// An instance with a random subspace domain and a weighted composition
/// isometry into a full space.
fn subspace_isometry_instance<S: Scalar>(
    seed: u64,
    trial: usize,
    s_points: usize,
) -> Result<Instance<S>> {
    let scale = Scale::default();
    let mut rng = rng_for(seed, 4_000_000 + trial as u64);
    let n1 = rng.random_range(1..=scale.max_points.min(5));
    let s1 = crate::generate::random_space::<S>(&mut rng, &scale, 0, n1, false);
    let d = rng.random_range(1..=scale.max_dim.min(n1).min(3));
    let a1 = random_subspace_of(&mut rng, &scale, &s1, d);
    let n2 = rng.random_range(n1..=scale.max_points);
    let s2 = crate::generate::random_space::<S>(&mut rng, &scale, 1, n2, false);
    let a2 = Subspace::full(s2.clone());
    let u_size = rng.random_range(n1..=n2);
    let (map, _) = random_wco_isometry(&mut rng, &a1, &a2, u_size, s_points);
    Ok(Instance {
        spaces: vec![("S0".into(), s1), ("S1".into(), s2)],
        subspaces: vec![("A0".into(), a1), ("A1".into(), a2)],
        maps: vec![("T0".into(), map)],
        seed,
        scale,
    })
}

/// An onto isometry between full spaces of equal size.
fn onto_pair_instance<S: Scalar>(seed: u64, trial: usize, s_points: usize) -> Result<Instance<S>> {
    let scale = Scale::default();
    let mut rng = rng_for(seed, 5_000_000 + trial as u64);
    let n = rng.random_range(1..=scale.max_points);
    let s1 = crate::generate::random_space::<S>(&mut rng, &scale, 0, n, false);
    let s2 = crate::generate::random_space::<S>(&mut rng, &scale, 1, n, false);
    let a1 = Subspace::full(s1.clone());
    let a2 = Subspace::full(s2.clone());
    let (map, _) = random_wco_isometry(&mut rng, &a1, &a2, n, s_points);
    Ok(Instance {
        spaces: vec![("S0".into(), s1), ("S1".into(), s2)],
        subspaces: vec![("A0".into(), a1), ("A1".into(), a2)],
        maps: vec![("T0".into(), map)],
        seed,
        scale,
    })
}

/// Three full spaces with composable isometries between them.
fn composable_instance<S: Scalar>(seed: u64, trial: usize, s_points: usize) -> Result<Instance<S>> {
    let scale = Scale::default();
    let mut rng = rng_for(seed, 6_000_000 + trial as u64);
    let n1 = rng.random_range(1..=4);
    let n2 = rng.random_range(n1..=5);
    let n3 = rng.random_range(n2..=6);
    let s1 = crate::generate::random_space::<S>(&mut rng, &scale, 0, n1, false);
    let s2 = crate::generate::random_space::<S>(&mut rng, &scale, 1, n2, false);
    let s3 = crate::generate::random_space::<S>(&mut rng, &scale, 2, n3, false);
    let a1 = Subspace::full(s1.clone());
    let a2 = Subspace::full(s2.clone());
    let a3 = Subspace::full(s3.clone());
    let u1 = rng.random_range(n1..=n2);
    let (t1, _) = random_wco_isometry(&mut rng, &a1, &a2, u1, s_points);
    let u2 = rng.random_range(n2..=n3);
    let (t2, _) = random_wco_isometry(&mut rng, &a2, &a3, u2, s_points);
    Ok(Instance {
        spaces: vec![("S0".into(), s1), ("S1".into(), s2), ("S2".into(), s3)],
        subspaces: vec![("A0".into(), a1), ("A1".into(), a2), ("A2".into(), a3)],
        maps: vec![("T0".into(), t1), ("T1".into(), t2)],
        seed,
        scale,
    })
}

/// A unit-weight space with a subspace containing the constant-one function.
fn constants_instance<S: Scalar>(seed: u64, trial: usize) -> Result<Instance<S>> {
    let scale = small_scale();
    let mut rng = rng_for(seed, 7_000_000 + trial as u64);
    let n = rng.random_range(1..=scale.max_points);
    let s1 = crate::generate::random_space::<S>(&mut rng, &scale, 0, n, true);
    let d = rng.random_range(1..=scale.max_dim.min(n));
    let sub = loop {
        let mut basis = vec![FunctionVec::new(&s1, vec![S::one(); n])?];
        for _ in 1..d {
            let values = (0..n)
                .map(|_| random_scalar::<S>(&mut rng, scale.coefficient_height))
                .collect();
            basis.push(FunctionVec::new(&s1, values)?);
        }
        let rows: Vec<Vec<S>> = basis.iter().map(|b| b.values().to_vec()).collect();
        if linalg::rank(&rows) == d {
            break Subspace::new(s1.clone(), basis)?;
        }
    };
    Ok(Instance {
        spaces: vec![("S0".into(), s1)],
        subspaces: vec![("A0".into(), sub)],
        maps: vec![],
        seed,
        scale,
    })
}

fn suite_instance<S: Scalar>(
    id: SuiteId,
    seed: u64,
    trial: usize,
    s_points: usize,
) -> Result<Instance<S>> {
    use SuiteId::*;
    let t = trial as u64;
    match id {
        ExtremePullbackCover | SeparationBullets | SeparationInclusion | FunctionalAvoidsTail
        | ClosureGuardVacuity | CenteredImagePinning => {
            gen_instance::<S>(seed.wrapping_add(t), &Scale::default(), GenKind::IsometryPair)
        }
        ExtremeSubsetLaw | CenteredFamilyExtremes => {
            gen_instance::<S>(seed.wrapping_add(t), &small_scale(), GenKind::RandomSubspace)
        }
        EquivalenceWitness | InjectivityCriterion | BoundaryMeetsSuppmax | MsetIsBoundary => {
            gen_instance::<S>(seed.wrapping_add(t), &Scale::default(), GenKind::RandomSubspace)
        }
        ExtremeOracleAgreement => {
            gen_instance::<S>(seed.wrapping_add(t), &oracle_scale(), GenKind::RandomSubspace)
        }
        CompactBoundaryCover | AlphaImpliesCover => subspace_isometry_instance::<S>(seed, trial, s_points),
        SingletonPinning | OntoPinningFamilies | BetaImpliesInjective | FullCoverBijection
        | InverseLaw => onto_pair_instance::<S>(seed, trial, s_points),
        ClassicalFaceRoute => constants_instance::<S>(seed, trial),
        FactorizationRoundtrip => {
            gen_instance::<S>(seed.wrapping_add(t), &Scale::default(), GenKind::IsometryPair)
        }
        ConstructorLaw => {
            // unit weights; the operator is built inside the trial
            let scale = Scale::default();
            let mut rng = rng_for(seed, 8_000_000 + t);
            let n1 = rng.random_range(1..=scale.max_points);
            let n2 = rng.random_range(n1..=scale.max_points);
            let s1 = crate::generate::random_space::<S>(&mut rng, &scale, 0, n1, true);
            let s2 = crate::generate::random_space::<S>(&mut rng, &scale, 1, n2, true);
            Ok(Instance {
                spaces: vec![("S0".into(), s1.clone()), ("S1".into(), s2.clone())],
                subspaces: vec![
                    ("A0".into(), Subspace::full(s1)),
                    ("A1".into(), Subspace::full(s2)),
                ],
                maps: vec![],
                seed,
                scale,
            })
        }
        CompositionLaw => composable_instance::<S>(seed, trial, s_points),
    }
}

// ---------------------------------------------------------------------------
// trial predicates

fn trial_rng(seed: u64, trial: usize) -> ChaCha20Rng {
    rng_for(seed, 1_000_000 + trial as u64)
}

fn random_function_in<S: Scalar>(
    rng: &mut ChaCha20Rng,
    a: &Subspace<S>,
    height: i64,
) -> FunctionVec<S> {
    loop {
        let coords: Vec<S> = (0..a.dim()).map(|_| random_scalar::<S>(rng, height)).collect();
        if !coords.iter().all(|c| c.is_zero()) {
            let f = a.function_from_coords(&coords);
            if !f.is_zero() {
                return f;
            }
        }
    }
}

/// A centered family: rejection-sample small families, falling back to a
/// singleton (always centered: its norm is attained at some point).
fn draw_centered_family<S: Scalar>(
    rng: &mut ChaCha20Rng,
    gens: &GeneratorSystem<S>,
    a: &Subspace<S>,
    max_size: usize,
) -> Result<Family<S>> {
    for _ in 0..30 {
        let size = rng.random_range(1..=max_size);
        let members: Vec<FunctionVec<S>> =
            (0..size).map(|_| random_function_in(rng, a, 4)).collect();
        let family = Family::new(a, members)?;
        if gens.sigma_check(&family)?.centered {
            return Ok(family);
        }
    }
    Family::new(a, vec![random_function_in(rng, a, 4)])
}

fn functional_set(v: &[Vec<Q>]) -> BTreeSet<Vec<Q>> {
    v.iter().cloned().collect()
}

fn real_coords<S: Scalar>(f: &Functional<S>) -> Vec<Q> {
    f.coords().iter().map(|c| c.re()).collect()
}

fn run_trial<S: Scalar>(
    id: SuiteId,
    inst: &Instance<S>,
    seed: u64,
    trial: usize,
    s_points: usize,
) -> Result<TrialOutcome> {
    use SuiteId::*;
    let mut rng = trial_rng(seed, trial);
    match id {
        ExtremePullbackCover | AlphaImpliesCover => {
            let t = inst.map("T0")?;
            let a1 = t.domain();
            let n2 = t.codomain().ambient().len();
            let pulled: Vec<Functional<S>> = (0..n2).map(|x| t.pulled_generator(x)).collect();
            let extreme: Vec<usize> = if S::FIELD == Field::Real {
                // oracle route over signs
                let flags = oracle_extreme_flags(a1);
                (0..a1.ambient().len()).filter(|&z| flags[z]).collect()
            } else {
                let gens = GeneratorSystem::new(a1, s_points);
                gens.extreme_points().into_iter().collect()
            };
            for z in extreme {
                let g = a1.delta_unchecked(&S::one(), z);
                let hit = pulled
                    .iter()
                    .any(|p| unimodular_ratio(g.coords(), p.coords()).is_some());
                if !hit {
                    return Ok(TrialOutcome::Fail(format!(
                        "extreme functional at point {} not covered by any pulled generator",
                        a1.ambient().name_of(z)
                    )));
                }
            }
            Ok(TrialOutcome::Pass)
        }

        ExtremeSubsetLaw | CenteredFamilyExtremes => {
            let a = inst.subspace("A0")?;
            let gens = GeneratorSystem::new(a, s_points);
            let family = draw_centered_family(&mut rng, &gens, a, 3)?;
            let report = gens.sigma_check(&family)?;
            if !report.centered {
                return Ok(TrialOutcome::Skip("family not centered".into()));
            }
            // real instances only reach here
            let a_q = real_subspace(a);
            let family_q = real_family(a, &family)?;
            let oracle_ex = functional_set(&oracle::sigma_extreme_points(&a_q, &family_q));
            if oracle_ex.is_empty() {
                return Ok(TrialOutcome::Fail(
                    "centered family has no extreme attainers by enumeration".into(),
                ));
            }
            // intersection route: signed extreme generators passing the
            // membership test
            let flags = oracle::extreme_generator_flags(&a_q);
            let mut intersect = BTreeSet::new();
            for (z, &ex) in flags.iter().enumerate() {
                if !ex {
                    continue;
                }
                let g = real_coords(gens.generator(z));
                for sgn in [Q::one(), -Q::one()] {
                    let cand: Vec<Q> = g.iter().map(|c| c * &sgn).collect();
                    let attains = family_q.coords().iter().zip(family_q.members()).all(|(fc, fv)| {
                        let val: Q = cand.iter().zip(fc.iter()).map(|(a, b)| a * b).sum();
                        let nrm = a_q.ambient().sup_norm(fv.values()).exact().expect("rational");
                        val.abs() == nrm
                    });
                    if attains && !intersect.contains(&cand) {
                        intersect.insert(cand);
                    }
                }
            }
            if oracle_ex != intersect {
                return Ok(TrialOutcome::Fail(format!(
                    "face enumeration gave {} extreme attainers, intersection route {}",
                    oracle_ex.len(),
                    intersect.len()
                )));
            }
            // the implementation's list must agree as well
            let impl_set: BTreeSet<Vec<Q>> = report
                .extreme_members
                .iter()
                .map(real_coords)
                .collect();
            if impl_set != oracle_ex {
                return Ok(TrialOutcome::Fail(format!(
                    "implementation reported {} extreme attainers, enumeration {}",
                    impl_set.len(),
                    oracle_ex.len()
                )));
            }
            // every attainment-set member lies in the hull of the extreme ones
            if let Some(w) = &report.witness {
                let pts: Vec<Vec<Q>> = oracle_ex.iter().cloned().collect();
                if !polytope::conv_contains(&pts, &real_coords(w)) {
                    return Ok(TrialOutcome::Fail(
                        "attainment witness escapes the hull of the extreme attainers".into(),
                    ));
                }
            }
            Ok(TrialOutcome::Pass)
        }

        CenteredImagePinning => {
            let t = inst.map("T0")?;
            let a1 = t.domain();
            let gens = GeneratorSystem::new(a1, s_points);
            let family = draw_centered_family(&mut rng, &gens, a1, 3)?;
            let report = gens.sigma_check(&family)?;
            if !report.centered {
                return Ok(TrialOutcome::Skip("family not centered".into()));
            }
            // image is placed over the whole codomain (finite compact)
            let images: Vec<FunctionVec<S>> = family
                .members()
                .iter()
                .map(|f| t.apply(f))
                .collect::<Result<_>>()?;
            let all: BTreeSet<usize> = (0..t.codomain().ambient().len()).collect();
            let image_family = Family::new(t.codomain(), images.clone())?;
            if !placed_over(t.codomain(), &image_family, &all)? {
                return Ok(TrialOutcome::Fail("image not placed over the whole set".into()));
            }
            let mut common: Option<BTreeSet<usize>> = None;
            for tf in &images {
                let spm = t.codomain().suppmax(tf)?;
                common = Some(match common {
                    None => spm,
                    Some(acc) => acc.intersection(&spm).copied().collect(),
                });
            }
            let common = common.expect("nonempty family");
            for ex in &report.extreme_members {
                let matched = common.iter().any(|&z0| {
                    unimodular_ratio(ex.coords(), t.pulled_generator(z0).coords()).is_some()
                });
                if !matched {
                    return Ok(TrialOutcome::Fail(
                        "extreme attainer is not a pulled generator over the common attaining set"
                            .into(),
                    ));
                }
            }
            if !report.extreme_members.is_empty() && common.is_empty() {
                return Ok(TrialOutcome::Fail("empty common attaining set".into()));
            }
            Ok(TrialOutcome::Pass)
        }

        SingletonPinning => {
            let t = inst.map("T0")?;
            let a1 = t.domain();
            let a2 = t.codomain();
            let n2 = a2.ambient().len();
            let z0 = rng.random_range(0..n2);
            // h peaks exactly at z0; pull back through the inverse
            let values: Vec<S> = (0..n2)
                .map(|x| {
                    let peak = if x == z0 { S::one() } else { S::from_q(q(1, 2)) };
                    peak / a2.ambient().weight(x).clone()
                })
                .collect();
            let h = FunctionVec::new(a2.ambient(), values)?;
            let hc = a2.coords_of(&h)?;
            let f = a1.function_from_coords(&t.inverse()?.apply_coords(&hc));
            let tf = t.apply(&f)?;
            if a2.suppmax(&tf)? != BTreeSet::from([z0]) {
                return Ok(TrialOutcome::Fail("pinning construction failed".into()));
            }
            // attainment set must be exactly the signed pullback at z0
            let a_q = real_subspace(a1);
            let family_q = Family::new(&a_q, vec![real_fvec(&f)])?;
            let ball = oracle::dual_ball_constraints(&a_q);
            let norm = a_q
                .ambient()
                .sup_norm(family_q.members()[0].values())
                .exact()
                .expect("rational");
            let pulled0 = real_coords(&t.pulled_generator(z0));
            for sgn in [Q::one(), -Q::one()] {
                let mut cs = ball.clone();
                cs.push(polytope::Constraint::eq(
                    family_q.coords()[0].clone(),
                    &sgn * &norm,
                ));
                let verts = polytope::vertices(a_q.dim(), &cs);
                let v0 = t.pulled_generator(z0);
                let val = v0.apply(&coords_to_s::<S>(family_q.coords()[0].clone()));
                let expected_sign = if val.re().is_positive() { sgn.clone() } else { -sgn.clone() };
                let expected: Vec<Q> = pulled0.iter().map(|c| c * &expected_sign).collect();
                if verts.len() != 1 || verts[0] != expected {
                    return Ok(TrialOutcome::Fail(format!(
                        "attainment face is not the single signed pullback (got {} vertices)",
                        verts.len()
                    )));
                }
            }
            // and it is extreme
            let flags = oracle_extreme_flags(a1);
            let matched = (0..a1.ambient().len()).any(|z| {
                flags[z]
                    && unimodular_ratio(
                        t.pulled_generator(z0).coords(),
                        a1.delta_unchecked(&S::one(), z).coords(),
                    )
                    .is_some()
            });
            if !matched {
                return Ok(TrialOutcome::Fail("pinned pullback is not extreme".into()));
            }
            Ok(TrialOutcome::Pass)
        }

        SeparationBullets => {
            let t = inst.map("T0")?;
            let a1 = t.domain();
            let f = random_function_in(&mut rng, a1, 4);
            let tf = t.apply(&f)?;
            let k = t.codomain().suppmax(&tf)?;
            let spm_f = a1.suppmax(&f)?;
            let flags = oracle_extreme_flags(a1);
            let Some(z0) = spm_f.iter().copied().find(|&z| flags[z]) else {
                return Ok(TrialOutcome::Skip("no extreme point attains this norm".into()));
            };
            let g0 = a1.delta_unchecked(&S::one(), z0);
            let n2 = t.codomain().ambient().len();
            for z in 0..n2 {
                if k.contains(&z) {
                    continue;
                }
                let p = t.pulled_generator(z);
                // disjointness of the signed sets
                if unimodular_ratio(g0.coords(), p.coords()).is_some() {
                    return Ok(TrialOutcome::Fail(
                        "evaluation at the extreme point meets a pullback from outside the set"
                            .into(),
                    ));
                }
            }
            let hit = k
                .iter()
                .any(|&z| unimodular_ratio(g0.coords(), t.pulled_generator(z).coords()).is_some());
            if !hit {
                return Ok(TrialOutcome::Fail(
                    "evaluation at the extreme point is not pulled from inside the set".into(),
                ));
            }
            Ok(TrialOutcome::Pass)
        }

        EquivalenceWitness => {
            let a = inst.subspace("A0")?;
            let n = a.ambient().len();
            for x in 0..n {
                for y in 0..n {
                    let witness = sim_equiv(a, x, y)?;
                    // oracle: the moduli agree for every function iff the
                    // conjugate-symmetric difference form vanishes
                    let gx = a.delta_unchecked(&S::one(), x);
                    let gy = a.delta_unchecked(&S::one(), y);
                    let d = a.dim();
                    let mut zero = true;
                    for i in 0..d {
                        for j in 0..d {
                            let lhs = gx.coords()[i].clone() * gx.coords()[j].conj();
                            let rhs = gy.coords()[i].clone() * gy.coords()[j].conj();
                            if lhs != rhs {
                                zero = false;
                            }
                        }
                    }
                    if witness.is_some() != zero {
                        return Ok(TrialOutcome::Fail(format!(
                            "equivalence of {} and {} disagrees with the form identity",
                            a.ambient().name_of(x),
                            a.ambient().name_of(y)
                        )));
                    }
                    if let Some((lam, mu)) = witness {
                        let lhs = gx.scale(&lam);
                        let rhs = gy.scale(&mu);
                        if lhs != rhs {
                            return Ok(TrialOutcome::Fail("witness identity fails".into()));
                        }
                    }
                }
            }
            Ok(TrialOutcome::Pass)
        }

        InjectivityCriterion => {
            let a = inst.subspace("A0")?;
            let n = a.ambient().len();
            let gens = GeneratorSystem::new(a, s_points);
            let nonzero: Vec<usize> = (0..n).filter(|&z| !gens.generator(z).is_zero()).collect();
            if nonzero.is_empty() {
                return Ok(TrialOutcome::Skip("all evaluations vanish".into()));
            }
            // random nonempty L within M over nonzero-evaluation points
            let m_size = rng.random_range(1..=nonzero.len());
            let mut pool = nonzero.clone();
            for i in (1..pool.len()).rev() {
                pool.swap(i, rng.random_range(0..=i));
            }
            let m_pts: BTreeSet<usize> = pool[..m_size].iter().copied().collect();
            let l_size = rng.random_range(1..=m_size);
            let l_pts: BTreeSet<usize> = pool[..l_size].iter().copied().collect();

            let mut lhs = true;
            for &x in &l_pts {
                for &y in &m_pts {
                    if x != y && sim_equiv(a, x, y)?.is_some() {
                        lhs = false;
                    }
                }
            }
            let inj = l_pts.iter().all(|&x| !gens.generator(x).is_zero())
                && l_pts.iter().all(|&x| {
                    l_pts.iter().all(|&y| {
                        x >= y
                            || unimodular_ratio(
                                gens.generator(x).coords(),
                                gens.generator(y).coords(),
                            )
                            .is_none()
                    })
                });
            let disjoint = m_pts.iter().filter(|p| !l_pts.contains(p)).all(|&y| {
                l_pts.iter().all(|&x| {
                    unimodular_ratio(gens.generator(y).coords(), gens.generator(x).coords())
                        .is_none()
                })
            });
            if lhs != (inj && disjoint) {
                return Ok(TrialOutcome::Fail(format!(
                    "criterion mismatch: pairwise={lhs} injective={inj} disjoint={disjoint}"
                )));
            }
            Ok(TrialOutcome::Pass)
        }

        CompactBoundaryCover => {
            let t = inst.map("T0")?;
            let a1 = t.domain();
            // whole codomain as the compact boundary
            let flags = oracle_extreme_flags(a1);
            let n2 = t.codomain().ambient().len();
            let pulled: Vec<Functional<S>> = (0..n2).map(|x| t.pulled_generator(x)).collect();
            for (z, &ex) in flags.iter().enumerate() {
                if !ex {
                    continue;
                }
                let g = a1.delta_unchecked(&S::one(), z);
                if !pulled
                    .iter()
                    .any(|p| unimodular_ratio(g.coords(), p.coords()).is_some())
                {
                    return Ok(TrialOutcome::Fail("extreme functional not covered".into()));
                }
            }
            let (mset, _) = choquet::m_set(t, s_points)?;
            if mset.is_empty() {
                return Ok(TrialOutcome::Fail("extreme-pullback set is empty".into()));
            }
            let (member, _) = choquet::ch_contains(t, &mset, s_points)?;
            if !member {
                return Ok(TrialOutcome::Fail(
                    "extreme-pullback set fails its own covering test".into(),
                ));
            }
            // subspace-of-codomain variant: restrict the codomain to the
            // image span plus a random vector
            let mut image_basis: Vec<FunctionVec<S>> = Vec::new();
            for b in a1.basis() {
                image_basis.push(t.apply(b)?);
            }
            let extra = random_function_in(&mut rng, t.codomain(), 3);
            let mut rows: Vec<Vec<S>> = image_basis.iter().map(|f| f.values().to_vec()).collect();
            rows.push(extra.values().to_vec());
            if linalg::rank(&rows) == image_basis.len() + 1 {
                image_basis.push(extra);
            }
            let b_sub = Subspace::new(t.codomain().ambient().clone(), image_basis)?;
            let mut cols = Vec::new();
            for b in a1.basis() {
                cols.push(b_sub.coords_of(&t.apply(b)?)?);
            }
            let matrix = (0..b_sub.dim())
                .map(|k| (0..a1.dim()).map(|j| cols[j][k].clone()).collect())
                .collect();
            let t_b = LinearMap::new(a1.clone(), b_sub, matrix)?;
            let (mset_b, _) = choquet::m_set(&t_b, s_points)?;
            if mset_b.is_empty() {
                return Ok(TrialOutcome::Fail(
                    "extreme-pullback set through the subspace is empty".into(),
                ));
            }
            Ok(TrialOutcome::Pass)
        }

        SeparationInclusion => {
            let t = inst.map("T0")?;
            let a1 = t.domain();
            let f = random_function_in(&mut rng, a1, 4);
            let v = a1.suppmax(&f)?;
            let tf = t.apply(&f)?;
            let w = t.codomain().suppmax(&tf)?;
            // bullet: inf over W strictly above sup outside V
            for x in 0..a1.ambient().len() {
                if v.contains(&x) {
                    continue;
                }
                let g = a1.delta_unchecked(&S::one(), x);
                for &z in &w {
                    if unimodular_ratio(g.coords(), t.pulled_generator(z).coords()).is_some() {
                        return Ok(TrialOutcome::Fail(
                            "outside evaluation meets a pullback from the attaining set".into(),
                        ));
                    }
                }
            }
            let (mset_t, _) = choquet::m_set(t, s_points)?;
            let id = LinearMap::identity(a1.clone());
            let (mset_id, _) = choquet::m_set(&id, s_points)?;
            for &z in mset_t.intersection(&w) {
                let p = t.pulled_generator(z);
                let hit = mset_id.intersection(&v).any(|&x| {
                    unimodular_ratio(p.coords(), a1.delta_unchecked(&S::one(), x).coords())
                        .is_some()
                });
                if !hit {
                    return Ok(TrialOutcome::Fail(
                        "pullback over the attaining set escapes the matching evaluations".into(),
                    ));
                }
            }
            Ok(TrialOutcome::Pass)
        }

        ClassicalFaceRoute => {
            let a = inst.subspace("A0")?;
            let a_q = real_subspace(a);
            let face = choquet::prop63_set(&a_q, s_points)?;
            let ext = oracle::extreme_point_set(&a_q);
            if face != ext {
                return Ok(TrialOutcome::Fail(format!(
                    "face route {face:?} differs from enumerated extreme points {ext:?}"
                )));
            }
            Ok(TrialOutcome::Pass)
        }

        BoundaryMeetsSuppmax => {
            let a = inst.subspace("A0")?;
            let a_q = real_subspace(a);
            let f = random_function_in(&mut rng, &a_q, 4);
            let gens = GeneratorSystem::new(&a_q, s_points);
            let flags = oracle::extreme_generator_flags(&a_q);
            // a random covering family: a nonempty subset of every extreme class
            let mut y = BTreeSet::new();
            for class in gens.classes() {
                if !flags[class[0]] {
                    continue;
                }
                let mut chosen = false;
                for &z in class {
                    if rng.random_range(0..2) == 1 {
                        y.insert(z);
                        chosen = true;
                    }
                }
                if !chosen {
                    y.insert(class[rng.random_range(0..class.len())]);
                }
            }
            if y.is_empty() {
                return Ok(TrialOutcome::Skip("no extreme classes".into()));
            }
            if !choquet::boundary_meets_suppmax(&a_q, &f, &y, s_points)? {
                return Ok(TrialOutcome::Fail(
                    "covering family misses the norm-attaining set".into(),
                ));
            }
            Ok(TrialOutcome::Pass)
        }

        FunctionalAvoidsTail => {
            let t = inst.map("T0")?;
            let a1 = t.domain();
            let gens = GeneratorSystem::new(a1, s_points);
            // a random sphere functional
            let ell = loop {
                let coords: Vec<S> =
                    (0..a1.dim()).map(|_| random_scalar::<S>(&mut rng, 4)).collect();
                let cand = Functional::new(coords);
                if cand.is_zero() {
                    continue;
                }
                let (norm, _) = gens.dual_norm(&cand);
                if let Some(exact) = norm.exact() {
                    if !exact.is_zero() {
                        let inv = S::from_q(Q::one() / exact);
                        break cand.scale(&inv);
                    }
                }
            };
            let j = (0..a1.dim())
                .find(|&j| !ell.coords()[j].is_zero())
                .expect("nonzero functional");
            let fc: Vec<S> = (0..a1.dim())
                .map(|i| if i == j { S::one() } else { S::zero() })
                .collect();
            let bound = ell.apply(&fc).abs_sq() / crate::scalar::qz(4);
            let n2 = t.codomain().ambient().len();
            for z in 0..n2 {
                let p = t.pulled_generator(z);
                if p.apply(&fc).abs_sq() >= bound {
                    continue; // inside the computed set
                }
                if unimodular_ratio(ell.coords(), p.coords()).is_some() {
                    return Ok(TrialOutcome::Fail(
                        "sphere functional equals a pullback from outside its set".into(),
                    ));
                }
            }
            Ok(TrialOutcome::Pass)
        }

        OntoPinningFamilies | BetaImpliesInjective | FullCoverBijection => {
            let t = inst.map("T0")?;
            let report = property_alpha_beta(t, s_points)?;
            if !report.alpha {
                return Ok(TrialOutcome::Fail("avoidance property failed".into()));
            }
            if !report.beta_everywhere() {
                return Ok(TrialOutcome::Fail(
                    "an onto map of full spaces failed to pin a point".into(),
                ));
            }
            if id == SuiteId::OntoPinningFamilies {
                // verify the witness families explicitly
                for (&z0, status) in &report.beta {
                    let BetaStatus::Pinned { family } = status else {
                        unreachable!()
                    };
                    let fam = Family::new(t.domain(), family.clone())?;
                    let all: BTreeSet<usize> = (0..t.codomain().ambient().len()).collect();
                    let images: Vec<FunctionVec<S>> = family
                        .iter()
                        .map(|f| t.apply(f))
                        .collect::<Result<_>>()?;
                    let image_fam = Family::new(t.codomain(), images.clone())?;
                    if !placed_over(t.codomain(), &image_fam, &all)? {
                        return Ok(TrialOutcome::Fail("image family not placed".into()));
                    }
                    let mut common: Option<BTreeSet<usize>> = None;
                    for tf in &images {
                        let spm = t.codomain().suppmax(tf)?;
                        common = Some(match common {
                            None => spm,
                            Some(acc) => acc.intersection(&spm).copied().collect(),
                        });
                    }
                    if common != Some(BTreeSet::from([z0])) {
                        return Ok(TrialOutcome::Fail(format!(
                            "witness family does not pin point {}",
                            t.codomain().ambient().name_of(z0)
                        )));
                    }
                    let _ = fam;
                }
            }
            if matches!(id, SuiteId::BetaImpliesInjective | SuiteId::FullCoverBijection)
                && !crate::isometry::pullback_injective(t)
            {
                return Ok(TrialOutcome::Fail("pullback not injective".into()));
            }
            if id == SuiteId::FullCoverBijection {
                let (mset, _) = choquet::m_set(t, s_points)?;
                let all: BTreeSet<usize> = (0..t.codomain().ambient().len()).collect();
                if mset != all {
                    return Ok(TrialOutcome::Fail(
                        "extreme-pullback set is not the whole codomain".into(),
                    ));
                }
                let (covers, _) = choquet::ch_contains(t, &all, s_points)?;
                if !covers {
                    return Ok(TrialOutcome::Fail(
                        "pullback image does not cover the extreme functionals".into(),
                    ));
                }
            }
            Ok(TrialOutcome::Pass)
        }

        FactorizationRoundtrip => {
            let t = inst.map("T0")?;
            let (canonical, _) = decompose(t, s_points)?;
            // the canonical set must carry the factorization identity
            if let Some(x) = crate::isometry::form_matches_map(t, &canonical)? {
                return Ok(TrialOutcome::Fail(format!(
                    "factorization identity fails at point {}",
                    t.codomain().ambient().name_of(x)
                )));
            }
            // point map surjective onto the domain
            if canonical.tau_image().len() != t.domain().ambient().len() {
                return Ok(TrialOutcome::Fail("point map not surjective".into()));
            }
            // restriction agrees (uniqueness, positive direction)
            if canonical.len() > 1 {
                let drop_key = *canonical
                    .defined_on()
                    .iter()
                    .nth(rng.random_range(0..canonical.len()))
                    .expect("nonempty");
                let restricted = CompositionForm::new(
                    canonical
                        .iter()
                        .filter(|(x, _, _)| *x != drop_key)
                        .map(|(x, p, tp)| (x, (p.clone(), tp)))
                        .collect(),
                )?;
                if compare_form(t, &canonical, &restricted)? != FormComparison::Agrees {
                    return Ok(TrialOutcome::Fail("restriction fails to agree".into()));
                }
            }
            // impostors must be rejected
            for kind in 0..3 {
                let impostor = perturb_form(&mut rng, t, &canonical, kind)?;
                let Some(imp) = impostor else { continue };
                match compare_form(t, &canonical, &imp)? {
                    FormComparison::IdentityFails { .. } => {}
                    FormComparison::Agrees => {
                        return Ok(TrialOutcome::Fail(
                            "perturbed impostor accepted as agreeing".into(),
                        ))
                    }
                    other => {
                        return Ok(TrialOutcome::Fail(format!(
                            "perturbed impostor not rejected: {other:?}"
                        )))
                    }
                }
            }
            Ok(TrialOutcome::Pass)
        }

        ClosureGuardVacuity => {
            let t = inst.map("T0")?;
            let (mset, _) = choquet::m_set(t, s_points)?;
            // discrete topology: the closure is the set itself
            let closure = mset.clone();
            let defect: Vec<usize> = closure.difference(&mset).copied().collect();
            if !defect.is_empty() {
                return Ok(TrialOutcome::Fail(
                    "a finite discrete set failed to be closed".into(),
                ));
            }
            Ok(TrialOutcome::Pass)
        }

        ConstructorLaw => {
            let a1 = inst.subspace("A0")?;
            let a2 = inst.subspace("A1")?;
            let n1 = a1.ambient().len();
            let n2 = a2.ambient().len();
            let mut rng2 = rng_for(seed, 9_000_000 + trial as u64);
            let u_size = rng2.random_range(n1..=n2);
            let mut pool: Vec<usize> = (0..n2).collect();
            for i in (1..pool.len()).rev() {
                pool.swap(i, rng2.random_range(0..=i));
            }
            let mut u: Vec<usize> = pool[..u_size].to_vec();
            u.sort_unstable();
            let tau = crate::generate::random_surjection(&mut rng2, u_size, n1);
            let entries = u
                .iter()
                .zip(tau.iter())
                .map(|(&x, &t)| (x, (S::one(), t)))
                .collect();
            let form = CompositionForm::new(entries)?;
            let (map, verdict) = weighted_composition_operator(a1, a2, &form, s_points)?;
            if !verdict.is_isometry() {
                return Ok(TrialOutcome::Fail(
                    "surjective composition operator not an isometry".into(),
                ));
            }
            match map.verify_into_isometry(s_points)? {
                IsometryVerdict::Isometry { .. } => Ok(TrialOutcome::Pass),
                _ => Ok(TrialOutcome::Fail("constructed operator fails verification".into())),
            }
        }

        CompositionLaw => {
            let t1 = inst.map("T0")?;
            let t2 = inst.map("T1")?;
            let (form1, _) = decompose(t1, s_points)?;
            let (form2, _) = decompose(t2, s_points)?;
            let composed = compose_forms(t1, &form1, t2, &form2, s_points)?;
            // the matching set: preimage of the first canonical set
            let expected: BTreeSet<usize> = form2
                .iter()
                .filter(|(_, _, tp)| form1.defined_on().contains(tp))
                .map(|(x, _, _)| x)
                .collect();
            if composed.defined_on() != expected {
                return Ok(TrialOutcome::Fail("unexpected composite domain".into()));
            }
            let t3 = t2.compose(t1)?;
            let (mset3, _) = choquet::m_set(&t3, s_points)?;
            if !composed.defined_on().is_subset(&mset3) {
                return Ok(TrialOutcome::Fail(
                    "composite domain escapes the extreme-pullback set".into(),
                ));
            }
            if composed.tau_image().len() != t1.domain().ambient().len() {
                return Ok(TrialOutcome::Fail("composite point map not surjective".into()));
            }
            let (covers, _) = choquet::ch_contains(&t3, &composed.defined_on(), s_points)?;
            if !covers {
                return Ok(TrialOutcome::Fail(
                    "composite domain is not a covering family".into(),
                ));
            }
            for (x, phi3, tau3) in composed.iter() {
                let t2x = form2.tau(x).expect("in domain");
                let phi_law = form2.phi(x).expect("in domain").clone()
                    * form1.phi(t2x).expect("in preimage").clone();
                let tau_law = form1.tau(t2x).expect("in preimage");
                if phi3 != &phi_law || tau3 != tau_law {
                    return Ok(TrialOutcome::Fail("phase/point law violated".into()));
                }
            }
            Ok(TrialOutcome::Pass)
        }

        InverseLaw => {
            let t = inst.map("T0")?;
            let (form, _) = decompose(t, s_points)?;
            let inverse = invert_form(t, &form, s_points)?;
            for (z, phi_inv, x) in inverse.iter() {
                // tau' inverts tau, and the phase reciprocates along it
                if form.tau(x) != Some(z) {
                    return Ok(TrialOutcome::Fail("point map inverse law violated".into()));
                }
                let expect = form.phi(x).expect("defined").unimodular_recip();
                if phi_inv != &expect {
                    return Ok(TrialOutcome::Fail("phase reciprocal law violated".into()));
                }
            }
            if inverse.len() != t.domain().ambient().len() {
                return Ok(TrialOutcome::Fail("inverse form not total".into()));
            }
            Ok(TrialOutcome::Pass)
        }

        MsetIsBoundary => {
            let a = inst.subspace("A0")?;
            let id_map = LinearMap::identity(a.clone());
            let (mset, _) = choquet::m_set(&id_map, s_points)?;
            if mset.is_empty() {
                return Ok(TrialOutcome::Fail("empty extreme-pullback set".into()));
            }
            if !is_boundary(a, &mset, s_points)?.holds() {
                return Ok(TrialOutcome::Fail(
                    "extreme-pullback set is not a boundary".into(),
                ));
            }
            Ok(TrialOutcome::Pass)
        }

        ExtremeOracleAgreement => {
            let a = inst.subspace("A0")?;
            let a_q = real_subspace(a);
            let gens = GeneratorSystem::new(&a_q, s_points);
            let oracle_flags = oracle::extreme_generator_flags(&a_q);
            for z in 0..a_q.ambient().len() {
                let g = gens.generator(z);
                let lp_verdict = if g.is_zero() {
                    false
                } else {
                    let (norm, _) = gens.dual_norm(g);
                    if norm.is_one() {
                        gens.is_extreme(g)?.0
                    } else {
                        false
                    }
                };
                if lp_verdict != oracle_flags[z] {
                    return Ok(TrialOutcome::Fail(format!(
                        "extremality disagreement at point {}: lp={lp_verdict} enumeration={}",
                        a_q.ambient().name_of(z),
                        oracle_flags[z]
                    )));
                }
            }
            Ok(TrialOutcome::Pass)
        }
    }
}

/// One structural perturbation of a form; `None` when not applicable.
fn perturb_form<S: Scalar>(
    rng: &mut ChaCha20Rng,
    t: &LinearMap<S>,
    form: &CompositionForm<S>,
    kind: usize,
) -> Result<Option<CompositionForm<S>>> {
    let on: Vec<usize> = form.defined_on().into_iter().collect();
    match kind {
        0 => {
            // flip the phase at one point
            if on.is_empty() {
                return Ok(None);
            }
            let x = on[rng.random_range(0..on.len())];
            let mut entries: BTreeMap<usize, (S, usize)> = form
                .iter()
                .map(|(x, p, tp)| (x, (p.clone(), tp)))
                .collect();
            let entry = entries.get_mut(&x).expect("defined");
            entry.0 = -entry.0.clone();
            Ok(Some(CompositionForm::new(entries)?))
        }
        1 => {
            // redirect the point map at one point
            let n1 = t.domain().ambient().len();
            if on.is_empty() || n1 < 2 {
                return Ok(None);
            }
            let x = on[rng.random_range(0..on.len())];
            let mut entries: BTreeMap<usize, (S, usize)> = form
                .iter()
                .map(|(x, p, tp)| (x, (p.clone(), tp)))
                .collect();
            let entry = entries.get_mut(&x).expect("defined");
            entry.1 = (entry.1 + 1) % n1;
            Ok(Some(CompositionForm::new(entries)?))
        }
        _ => {
            // extend onto a point outside the canonical set
            let n2 = t.codomain().ambient().len();
            let outside: Vec<usize> =
                (0..n2).filter(|x| !form.defined_on().contains(x)).collect();
            if outside.is_empty() {
                return Ok(None);
            }
            let x = outside[rng.random_range(0..outside.len())];
            let mut entries: BTreeMap<usize, (S, usize)> = form
                .iter()
                .map(|(x, p, tp)| (x, (p.clone(), tp)))
                .collect();
            entries.insert(x, (S::one(), 0));
            Ok(Some(CompositionForm::new(entries)?))
        }
    }
}

// Real-field views used by the oracle routes (suites reaching them run over
// the real field only; the conversions are exact).
fn real_subspace<S: Scalar>(a: &Subspace<S>) -> Subspace<Q> {
    assert!(S::FIELD == Field::Real);
    let sp = crate::space::WeightedSpace::new(
        a.ambient().points().to_vec(),
        a.ambient().weights().iter().map(|w| w.re()).collect(),
    )
    .expect("valid space");
    let basis = a
        .basis()
        .iter()
        .map(|b| {
            FunctionVec::new(&sp, b.values().iter().map(|v| v.re()).collect()).expect("length")
        })
        .collect();
    Subspace::new(sp, basis).expect("independent basis")
}

fn real_fvec<S: Scalar>(f: &FunctionVec<S>) -> FunctionVec<Q> {
    FunctionVec::from_values(f.values().iter().map(|v| v.re()).collect())
}

fn real_family<S: Scalar>(a: &Subspace<S>, family: &Family<S>) -> Result<Family<Q>> {
    let a_q = real_subspace(a);
    Family::new(
        &a_q,
        family.members().iter().map(real_fvec).collect(),
    )
}

fn coords_to_s<S: Scalar>(coords: Vec<Q>) -> Vec<S> {
    coords.into_iter().map(S::from_q).collect()
}

fn oracle_extreme_flags<S: Scalar>(a: &Subspace<S>) -> Vec<bool> {
    if S::FIELD == Field::Real {
        oracle::extreme_generator_flags(&real_subspace(a))
    } else {
        let gens = GeneratorSystem::new(a, crate::DEFAULT_S_POINTS);
        let ext = gens.extreme_points();
        (0..a.ambient().len()).map(|z| ext.contains(&z)).collect()
    }
}

// ---------------------------------------------------------------------------
// shrinking

/// Remove one point from a space, rebuilding the dependent subspaces and
/// maps. Basis vectors that collapse to zero are dropped with their matrix
/// rows/columns. `None` when this leaves something invalid.
fn remove_point<S: Scalar>(inst: &Instance<S>, space_id: &str, z: usize) -> Option<Instance<S>> {
    let (_, old_space) = inst.spaces.iter().find(|(id, _)| id == space_id)?;
    if old_space.len() <= 1 {
        return None;
    }
    let points: Vec<String> = old_space
        .points()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != z)
        .map(|(_, p)| p.clone())
        .collect();
    let weights: Vec<S> = old_space
        .weights()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != z)
        .map(|(_, w)| w.clone())
        .collect();
    let new_space = crate::space::WeightedSpace::new(points, weights).ok()?;

    let mut spaces = Vec::new();
    for (id, s) in &inst.spaces {
        if id == space_id {
            spaces.push((id.clone(), new_space.clone()));
        } else {
            spaces.push((id.clone(), s.clone()));
        }
    }
    let mut subspaces = Vec::new();
    let mut dropped_rows: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (id, a) in &inst.subspaces {
        if a.ambient() == old_space {
            let mut basis = Vec::new();
            let mut dropped = Vec::new();
            for (j, b) in a.basis().iter().enumerate() {
                let vals: Vec<S> = b
                    .values()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != z)
                    .map(|(_, v)| v.clone())
                    .collect();
                if vals.iter().all(|v| v.is_zero()) {
                    dropped.push(j);
                } else {
                    basis.push(FunctionVec::new(&new_space, vals).ok()?);
                }
            }
            dropped_rows.insert(id.clone(), dropped);
            subspaces.push((id.clone(), Subspace::new(new_space.clone(), basis).ok()?));
        } else {
            subspaces.push((id.clone(), a.clone()));
        }
    }
    let mut maps = Vec::new();
    for (id, t) in &inst.maps {
        let did = subspace_id(inst, t.domain());
        let cid = subspace_id(inst, t.codomain());
        let mut matrix = t.matrix().to_vec();
        if let Some(rows) = dropped_rows.get(&cid) {
            for &j in rows.iter().rev() {
                matrix.remove(j);
            }
        }
        if let Some(cols) = dropped_rows.get(&did) {
            for row in matrix.iter_mut() {
                for &j in cols.iter().rev() {
                    row.remove(j);
                }
            }
        }
        let new_domain = subspaces.iter().find(|(i, _)| *i == did)?.1.clone();
        let new_codomain = subspaces.iter().find(|(i, _)| *i == cid)?.1.clone();
        maps.push((
            id.clone(),
            LinearMap::new(new_domain, new_codomain, matrix).ok()?,
        ));
    }
    Some(Instance {
        spaces,
        subspaces,
        maps,
        seed: inst.seed,
        scale: inst.scale,
    })
}

fn subspace_id<S: Scalar>(inst: &Instance<S>, a: &Subspace<S>) -> String {
    inst.subspaces
        .iter()
        .find(|(_, ia)| ia == a)
        .map(|(id, _)| id.clone())
        .unwrap_or_default()
}

/// Remove one basis vector from a subspace, trimming matrices accordingly.
fn remove_basis_vector<S: Scalar>(inst: &Instance<S>, sub_id: &str, j: usize) -> Option<Instance<S>> {
    let (_, old_sub) = inst.subspaces.iter().find(|(id, _)| id == sub_id)?;
    if old_sub.dim() <= 1 {
        return None;
    }
    let basis: Vec<FunctionVec<S>> = old_sub
        .basis()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .map(|(_, b)| b.clone())
        .collect();
    let new_sub = Subspace::new(old_sub.ambient().clone(), basis).ok()?;
    let mut subspaces = Vec::new();
    for (id, a) in &inst.subspaces {
        if id == sub_id {
            subspaces.push((id.clone(), new_sub.clone()));
        } else {
            subspaces.push((id.clone(), a.clone()));
        }
    }
    let mut maps = Vec::new();
    for (id, t) in &inst.maps {
        let did = subspace_id(inst, t.domain());
        let cid = subspace_id(inst, t.codomain());
        let mut matrix = t.matrix().to_vec();
        if cid == sub_id {
            matrix.remove(j);
        }
        if did == sub_id {
            for row in matrix.iter_mut() {
                row.remove(j);
            }
        }
        let new_domain = subspaces.iter().find(|(i, _)| *i == did)?.1.clone();
        let new_codomain = subspaces.iter().find(|(i, _)| *i == cid)?.1.clone();
        maps.push((id.clone(), LinearMap::new(new_domain, new_codomain, matrix).ok()?));
    }
    Some(Instance {
        spaces: inst.spaces.clone(),
        subspaces,
        maps,
        seed: inst.seed,
        scale: inst.scale,
    })
}

/// Greedy minimization: drop codomain points, then domain points, then basis
/// vectors, as long as the trial still fails.
fn shrink<S: Scalar>(
    id: SuiteId,
    mut inst: Instance<S>,
    seed: u64,
    trial: usize,
    s_points: usize,
) -> Result<Instance<S>> {
    let still_fails = |cand: &Instance<S>| -> bool {
        matches!(run_trial(id, cand, seed, trial, s_points), Ok(TrialOutcome::Fail(_)))
    };
    loop {
        let mut improved = false;
        // spaces in reverse declaration order: codomains first
        let space_ids: Vec<String> = inst.spaces.iter().rev().map(|(id, _)| id.clone()).collect();
        'outer: for sid in &space_ids {
            let n = inst.space(sid)?.len();
            for z in 0..n {
                if let Some(cand) = remove_point(&inst, sid, z) {
                    if still_fails(&cand) {
                        inst = cand;
                        improved = true;
                        break 'outer;
                    }
                }
            }
        }
        if improved {
            continue;
        }
        let sub_ids: Vec<String> = inst.subspaces.iter().map(|(id, _)| id.clone()).collect();
        'outer2: for aid in &sub_ids {
            let d = inst.subspace(aid)?.dim();
            for j in 0..d {
                if let Some(cand) = remove_basis_vector(&inst, aid, j) {
                    if still_fails(&cand) {
                        inst = cand;
                        improved = true;
                        break 'outer2;
                    }
                }
            }
        }
        if !improved {
            return Ok(inst);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_ids_roundtrip() {
        for &id in SuiteId::all() {
            assert_eq!(SuiteId::parse_id(id.id()).unwrap(), id);
        }
        assert_eq!(SuiteId::parse_id("P4.1").unwrap(), SuiteId::SeparationBullets);
        assert_eq!(SuiteId::parse_id("C4.2").unwrap(), SuiteId::SeparationBullets);
        assert_eq!(SuiteId::parse_id("t3.1").unwrap(), SuiteId::ExtremePullbackCover);
        assert!(SuiteId::parse_id("T9.9").is_err());
    }

    #[test]
    fn small_runs_pass() {
        for &id in SuiteId::all() {
            let report = run_suite(id, 3, 11, Field::Real, crate::DEFAULT_S_POINTS).unwrap();
            assert!(
                report.passed(),
                "suite {} failed: {:?}",
                id.id(),
                report.failures.first().map(|f| &f.note)
            );
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite(SuiteId::FactorizationRoundtrip, 5, 3, Field::Real, 16).unwrap();
        let b = run_suite(SuiteId::FactorizationRoundtrip, 5, 3, Field::Real, 16).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn complex_suites_run() {
        for id in [
            SuiteId::ExtremePullbackCover,
            SuiteId::EquivalenceWitness,
            SuiteId::FactorizationRoundtrip,
            SuiteId::CompositionLaw,
            SuiteId::InverseLaw,
            SuiteId::ConstructorLaw,
            SuiteId::ClosureGuardVacuity,
        ] {
            let report = run_suite(id, 2, 5, Field::Complex, 8).unwrap();
            assert!(report.passed(), "complex suite {} failed", id.id());
        }
        assert!(matches!(
            run_suite(SuiteId::ExtremeOracleAgreement, 1, 1, Field::Complex, 8),
            Err(Error::ComplexUnsupported(_))
        ));
    }

    #[test]
    fn shrinker_minimizes_and_failure_persists() {
        // A synthetic predicate via a doctored suite is intrusive; instead
        // exercise the machinery directly: shrink against a predicate that
        // rejects any instance with more than two points in S1.
        let inst = gen_instance::<Q>(3, &Scale::default(), GenKind::IsometryPair).unwrap();
        let big = inst.space("S1").unwrap().len();
        let mut current = inst;
        loop {
            let n = current.space("S1").unwrap().len();
            if n <= 1 {
                break;
            }
            let mut reduced = None;
            for z in 0..n {
                if let Some(cand) = remove_point(&current, "S1", z) {
                    reduced = Some(cand);
                    break;
                }
            }
            match reduced {
                Some(c) => current = c,
                None => break,
            }
        }
        assert!(current.space("S1").unwrap().len() <= big);
        assert_eq!(current.space("S1").unwrap().len(), 1);
        // maps were rebuilt against the shrunken space
        assert_eq!(current.map("T0").unwrap().codomain().ambient().len(), 1);
    }
}
