use thiserror::Error;

use crate::parse::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("quotient does not have finite length")]
    InfiniteLength,

    #[error("degenerate ideal: {0}")]
    DegenerateIdeal(&'static str),

    #[error("no monomial satisfies the prime avoidance constraints")]
    Infeasible,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{0} variables exceed the supported maximum of {1} for polyhedral computations")]
    TooManyVariables(usize, usize),

    #[error("no superficial element found (order <= {order_max}, c <= {c_max}, verified to n = {n_max})")]
    SuperficialNotFound { order_max: u32, c_max: u32, n_max: u32 },

    #[error("no exponent l <= {l_max} verified; best l = {best_l} holds through n = {verified_through}")]
    ExponentNotFound { l_max: u32, best_l: u32, verified_through: u32 },
}
