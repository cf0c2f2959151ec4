//! Exact arithmetic in F_q[t] and the statistics of multiplicative functions on
//! monic polynomials: characters, L-polynomials, pretentious distances,
//! short-interval and progression variances, correlations and exponential sums.

pub mod chargroup;
pub mod error;
pub mod gf;
pub mod lfun;
pub mod multfn;
pub mod analytics;
pub mod par;
pub mod poly;

pub use error::{Error, Result};
pub use num_complex::Complex64;
