//! Exact computational toolkit for linear isometries between finite weighted
//! sup-norm function spaces: dual-ball geometry, extreme functionals, Choquet
//! sets, and weighted-composition factorizations, all decided in exact
//! rational arithmetic (with a sampled unit circle in the complex field).

pub mod choquet;
pub mod dual;
pub mod error;
pub mod generate;
pub mod instance;
pub mod isometry;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod polytope;
pub mod scalar;
pub mod space;
pub mod suites;

pub use error::{Error, Result};
pub use scalar::{Confidence, Field, Norm, Scalar, CQ, Q};

/// Default number of unit-circle sample points for complex-field hull work.
pub const DEFAULT_S_POINTS: usize = 16;

/// Circle sample size from `LAB_S_DISCRETIZATION`, falling back to the
/// default; values below 4 are rejected.
pub fn s_points_from_env() -> Result<usize> {
    match std::env::var("LAB_S_DISCRETIZATION") {
        Ok(v) => {
            let m: usize = v
                .parse()
                .map_err(|_| Error::InvalidInstance(format!("bad LAB_S_DISCRETIZATION `{v}`")))?;
            if m < 4 {
                return Err(Error::InvalidInstance(
                    "LAB_S_DISCRETIZATION must be at least 4".into(),
                ));
            }
            Ok(m)
        }
        Err(_) => Ok(DEFAULT_S_POINTS),
    }
}
