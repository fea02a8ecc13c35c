//! Error type shared across the toolkit.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("point set must be nonempty")]
    EmptyPointSet,

    #[error("function is not in the span of the subspace basis")]
    NotInSpan,

    #[error("function is not in the span of the codomain basis")]
    NotInCodomainSpan,

    #[error("basis vectors are linearly dependent")]
    DependentBasis,

    #[error("weight must be nonzero at every point (zero at `{0}`)")]
    ZeroWeight(String),

    #[error("scalar {0} is not unimodular")]
    NotUnimodular(String),

    #[error("suppmax is undefined for the zero function")]
    ZeroFunction,

    #[error("family must be nonempty")]
    EmptyFamily,

    #[error("family members must be nonzero")]
    ZeroFamilyMember,

    #[error("family of size {0} exceeds the supported bound {1}")]
    FamilyTooLarge(usize, usize),

    #[error("functional must have dual norm 1 (got {0})")]
    NotNormalized(String),

    #[error("map is not an into-isometry")]
    NotIntoIsometry,

    #[error("map is not an onto-isometry")]
    NotOntoIsometry,

    #[error("matrix is {rows}x{cols} but the bases have sizes {expected_rows}x{expected_cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("codomain of the first map does not match the domain of the second")]
    ComposeMismatch,

    #[error("the evaluation map of the domain collapses on the class {0:?}: every functional there is zero")]
    AmbiguousEvaluationClass(Vec<String>),

    #[error("the point map of the factorization is not a bijection")]
    PointMapNotBijective,

    #[error("subspace does not contain the constant-one function")]
    MissingConstantOne,

    #[error("operation requires the constant weight 1")]
    NonConstantWeight,

    #[error("point set is not a Choquet family for the space")]
    NotChoquetFamily,

    #[error("fields disagree: {0}")]
    FieldMismatch(String),

    #[error("a verified law failed on this input: {0}")]
    LawViolation(String),

    #[error("complex-mode limitation: {0}")]
    ComplexUnsupported(String),

    #[error("scale out of bounds: {0}")]
    ScaleOutOfBounds(String),

    #[error("unknown suite id `{0}`")]
    UnknownSuite(String),

    #[error("unknown id `{0}` in instance")]
    UnknownId(String),

    #[error("duplicate id `{0}` in instance")]
    DuplicateId(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
