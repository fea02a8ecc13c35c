//! Scalar arithmetic for the two supported coefficient fields: exact
//! rationals (real case) and complex numbers with exact rational real and
//! imaginary parts. Everything downstream is generic over [`Scalar`], so the
//! whole geometry stack works identically in both fields; only the unimodular
//! set `S` differs (signs vs. sampled circle points).

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

/// Exact rational scalar.
pub type Q = BigRational;
/// Complex scalar with exact rational real/imaginary parts.
pub type CQ = Complex<Q>;

/// Shorthand rational constructor, mostly for tests and fixed examples.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as a rational.
pub fn qz(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Complex scalar from integer parts.
pub fn cq(re: i64, im: i64) -> CQ {
    CQ::new(qz(re), qz(im))
}

/// Which coefficient field a space lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => write!(f, "real"),
            Field::Complex => write!(f, "complex"),
        }
    }
}

/// How much to trust a hull/extremality verdict. Real-field decisions are
/// exact; complex ones that had to sample the unit circle carry the sample
/// size used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Confidence {
    Exact,
    Discretized { s_points: usize },
}

impl Confidence {
    pub fn merge(self, other: Confidence) -> Confidence {
        match (self, other) {
            (Confidence::Exact, Confidence::Exact) => Confidence::Exact,
            (Confidence::Discretized { s_points }, _) | (_, Confidence::Discretized { s_points }) => {
                Confidence::Discretized { s_points }
            }
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Confidence::Exact)
    }
}

impl fmt::Display for Confidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Confidence::Exact => write!(f, "exact"),
            Confidence::Discretized { s_points } => write!(f, "discretized({s_points})"),
        }
    }
}

/// A nonnegative norm value, stored as its exact square so that complex
/// moduli (square roots of rationals) stay exactly comparable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Norm {
    sq: Q,
}

impl Norm {
    pub fn from_sq(sq: Q) -> Norm {
        assert!(!sq.is_negative(), "norm square must be nonnegative");
        Norm { sq }
    }

    pub fn zero() -> Norm {
        Norm { sq: Q::zero() }
    }

    pub fn one() -> Norm {
        Norm { sq: Q::one() }
    }

    pub fn sq(&self) -> &Q {
        &self.sq
    }

    pub fn is_zero(&self) -> bool {
        self.sq.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.sq.is_one()
    }

    /// The exact value when the square is a perfect rational square
    /// (always the case in the real field).
    pub fn exact(&self) -> Option<Q> {
        let num = self.sq.numer();
        let den = self.sq.denom();
        let sn = num.sqrt();
        let sd = den.sqrt();
        if &(&sn * &sn) == num && &(&sd * &sd) == den {
            Some(Q::new(sn, sd))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.sq.numer().to_string().parse::<f64>().unwrap_or(f64::MAX);
        let d = self.sq.denom().to_string().parse::<f64>().unwrap_or(1.0);
        (n / d).sqrt()
    }

    /// Compare against a nonnegative rational.
    pub fn cmp_q(&self, r: &Q) -> Ordering {
        if r.is_negative() {
            return Ordering::Greater;
        }
        self.sq.cmp(&(r * r))
    }
}

impl PartialOrd for Norm {
    fn partial_cmp(&self, other: &Norm) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Norm {
    fn cmp(&self, other: &Norm) -> Ordering {
        self.sq.cmp(&other.sq)
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "sqrt({})", self.sq),
        }
    }
}

/// Coefficient scalar: an exact field element with conjugation, an exact
/// squared modulus, and a canonical sample of the unimodular set `S`.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialEq + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const FIELD: Field;

    fn from_q(q: Q) -> Self;

    /// Real part, exactly.
    fn re(&self) -> Q;

    /// Imaginary part, exactly (zero in the real field).
    fn im(&self) -> Q;

    /// Build from parts; `None` when the field cannot represent them.
    fn from_parts(re: Q, im: Q) -> Option<Self>;

    fn conj(&self) -> Self;

    /// |x|^2 as an exact rational.
    fn abs_sq(&self) -> Q;

    /// The unimodular set `S` used for hull constructions. The real field
    /// ignores `m` and returns the signs; the complex field returns `m`
    /// rational points lying exactly on the unit circle, spread near the
    /// m-th roots of unity (and exactly ±1, ±i whenever 4 divides m).
    fn s_sample(m: usize) -> Vec<Self>;

    /// Whether hull decisions over this field are exact (no circle sampling).
    fn exact_hulls() -> bool {
        Self::FIELD == Field::Real
    }

    fn abs_norm(&self) -> Norm {
        Norm::from_sq(self.abs_sq())
    }

    fn is_unimodular(&self) -> bool {
        self.abs_sq().is_one()
    }

    /// 1/x for unimodular x, i.e. the conjugate.
    fn unimodular_recip(&self) -> Self {
        debug_assert!(self.is_unimodular());
        self.conj()
    }
}

impl Scalar for Q {
    const FIELD: Field = Field::Real;

    fn from_q(q: Q) -> Self {
        q
    }

    fn re(&self) -> Q {
        self.clone()
    }

    fn im(&self) -> Q {
        Q::zero()
    }

    fn from_parts(re: Q, im: Q) -> Option<Self> {
        if im.is_zero() {
            Some(re)
        } else {
            None
        }
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn abs_sq(&self) -> Q {
        self * self
    }

    fn s_sample(_m: usize) -> Vec<Self> {
        vec![Q::one(), -Q::one()]
    }
}

impl Scalar for CQ {
    const FIELD: Field = Field::Complex;

    fn from_q(q: Q) -> Self {
        CQ::new(q, Q::zero())
    }

    fn re(&self) -> Q {
        self.re.clone()
    }

    fn im(&self) -> Q {
        self.im.clone()
    }

    fn from_parts(re: Q, im: Q) -> Option<Self> {
        Some(CQ::new(re, im))
    }

    fn conj(&self) -> Self {
        CQ::new(self.re.clone(), -self.im.clone())
    }

    fn abs_sq(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    fn s_sample(m: usize) -> Vec<Self> {
        unit_circle_points(m)
    }
}

/// `m` points exactly on the rational unit circle, near the m-th roots of
/// unity. Points on the coordinate axes are exact; the rest come from the
/// tangent half-angle parametrization with a small-denominator rational
/// parameter, so |λ| = 1 holds exactly for every sample.
pub fn unit_circle_points(m: usize) -> Vec<CQ> {
    assert!(m >= 4, "circle sample must have at least 4 points");
    let mut pts = Vec::with_capacity(m);
    for k in 0..m {
        if (4 * k) % m == 0 {
            // k/m in {0, 1/4, 1/2, 3/4}: a power of i.
            let quarter = 4 * k / m;
            pts.push(match quarter {
                0 => cq(1, 0),
                1 => cq(0, 1),
                2 => cq(-1, 0),
                _ => cq(0, -1),
            });
            continue;
        }
        // tan(pi k / m) is finite here since k/m != 1/2.
        let t_f = (std::f64::consts::PI * k as f64 / m as f64).tan();
        let t = rational_approx(t_f, 1 << 12);
        let t2 = &t * &t;
        let den = &t2 + Q::one();
        let re = (Q::one() - &t2) / den.clone();
        let im = (qz(2) * &t) / den;
        pts.push(CQ::new(re, im));
    }
    pts
}

/// Best continued-fraction approximation of `x` with denominator <= `max_den`.
fn rational_approx(x: f64, max_den: u64) -> Q {
    assert!(x.is_finite());
    let negative = x < 0.0;
    let mut frac = x.abs();
    // Convergents p/q of the continued fraction expansion.
    let (mut p0, mut q0) = (BigInt::from(1), BigInt::from(0));
    let (mut p1, mut q1) = (BigInt::from(frac.floor() as i64), BigInt::from(1));
    frac -= frac.floor();
    for _ in 0..40 {
        if frac < 1e-12 {
            break;
        }
        frac = 1.0 / frac;
        let a = frac.floor();
        if a >= 1e15 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > BigInt::from(max_den) {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        frac -= a;
    }
    let value = Q::new(p1, q1);
    if negative {
        -value
    } else {
        value
    }
}

/// The ratio `a = r * b` when it exists with `|r| = 1`; `Some(1)` when both
/// are zero vectors. This is the exact "equal up to a unimodular factor"
/// test used throughout for comparing functionals.
pub fn unimodular_ratio<S: Scalar>(a: &[S], b: &[S]) -> Option<S> {
    debug_assert_eq!(a.len(), b.len());
    let pivot = b.iter().position(|x| !x.is_zero());
    let Some(j) = pivot else {
        // b = 0: ratio exists only when a = 0 as well.
        return if a.iter().all(|x| x.is_zero()) {
            Some(S::one())
        } else {
            None
        };
    };
    let r = a[j].clone() / b[j].clone();
    if !r.is_unimodular() {
        return None;
    }
    for (x, y) in a.iter().zip(b.iter()) {
        if x.clone() != r.clone() * y.clone() {
            return None;
        }
    }
    Some(r)
}
