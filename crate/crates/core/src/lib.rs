//! Exact nucleolus computation for cooperative games.
//!
//! The MPS linear-programming scheme runs either over an explicit
//! enumeration of coalitions or with a separation oracle that solves the
//! subspace-avoiding minimum excess problem. Oracles are provided for
//! table, b-matching, arboricity and network strength games.

pub mod bmatch_nz;
pub mod coalition;
pub mod error;
pub mod exact_math;
pub mod fixtures;
pub mod game;
pub mod graph;
pub mod io;
pub mod lp;
pub mod matching;
pub mod matroid;
pub mod mps;
pub mod nz_reductions;

pub use coalition::Coalition;
pub use error::{Error, Result};
pub use exact_math::{IntVec, LinearSubspace, Rat, RatMat};
pub use game::{Allocation, ExcessReport, GameKind, GameOracle};
