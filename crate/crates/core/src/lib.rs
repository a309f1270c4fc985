//! Exact tools for the 3-terminal and k-terminal simplex cut problems:
//! weight constructions, dual-graph certificates, cut normalization,
//! projections, randomized rounding and LP search.

pub mod brute;
pub mod dual;
pub mod error;
pub mod io;
pub mod ledger;
pub mod lpsearch;
pub mod normalize;
pub mod projection;
pub mod rational;
pub mod rounding;
pub mod simplex;
pub mod svg;
pub mod weights;

pub use error::{Error, Result};
