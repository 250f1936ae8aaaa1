//! Exact experimentation with sum-product type quantities over prime fields.
//!
//! The crate computes sumsets, images `f(A,B) = {g(a)(h(a)+b)}`,
//! representation functions and their moment energies, and point-plane
//! incidences in F_p³, then checks the constant-explicit inequalities that
//! connect them (Cauchy-Schwarz, Hölder, popularity and termwise bounds)
//! exactly, and reports ratios for the bounds whose constants are implicit.
//!
//! Module map:
//! - [`field`]: F_p arithmetic, primitive roots, discrete logs.
//! - [`sets`]: bit-mask subsets and set algebra.
//! - [`functions`]: function tables `F_p^* → F_p^*`, the multiplicity `μ`, images.
//! - [`energy`]: representation functions, moments, level sets, dyadic buckets.
//! - [`incidence`]: points and planes in F_p³, incidence and collinearity counts.
//! - [`verify`]: exact proof-chain checks, theorem ratio rows, sweeps.
//! - [`io`]: the text formats for sets, function tables, points and planes.

pub mod bitset;
pub mod conv;
pub mod energy;
pub mod error;
pub mod field;
pub mod functions;
pub mod incidence;
pub mod io;
pub mod rng;
pub mod sets;
pub mod verify;

pub use energy::{Exponent, Moment, RepFn, RepKind};
pub use error::{Error, Result};
pub use field::PrimeField;
pub use functions::{FnSpec, FnTable};
pub use incidence::{IncidenceConfig, Plane3, Point3};
pub use sets::{FSet, Family, SetOp};

/// How to evaluate a set operation or representation function.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Pairwise enumeration, `O(|A||B|)`.
    Naive,
    /// Exact cyclic convolution, `O(p log p)`.
    Transform,
    /// Whichever of the two the cost model prefers.
    #[default]
    Auto,
}

impl Method {
    /// Resolves `Auto` for operands of sizes `na`, `nb` in F_p.
    pub fn resolve(self, na: usize, nb: usize, p: u64) -> Method {
        match self {
            Method::Auto => {
                let pairs = na as u64 * nb as u64;
                let log_p = 64 - p.leading_zeros() as u64;
                if pairs > 8 * p * log_p {
                    Method::Transform
                } else {
                    Method::Naive
                }
            }
            m => m,
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Method::Naive),
            "transform" => Ok(Method::Transform),
            "auto" => Ok(Method::Auto),
            _ => Err(Error::BadParams(format!("unknown method {s:?}"))),
        }
    }
}
