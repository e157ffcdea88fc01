//! Exact rationals and dense linear algebra over Q.

mod linalg;
mod rat;

pub use linalg::{
    hyperplane, in_span, in_span_int, incidence_rats, integer_kernel_basis, rank, rref, IntVec,
    LinearSubspace, RatMat,
};
pub use rat::{parse_rat, Rat};
