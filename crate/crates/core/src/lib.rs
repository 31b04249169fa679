//! Moment calculus for the number of monochromatic k-cliques in a uniformly
//! random red/blue edge coloring of the complete graph K_n.
//!
//! * [`arith`]: exact rationals, Stirling tables, polynomials in `n`.
//! * [`moments`]: exact raw, factorial, binomial and central moments.
//! * [`oracle`]: exhaustive distribution of the count for small `n`.
//! * [`distributions`]: Poisson, negative binomial and Delaporte models.
//! * [`bounds`]: first-moment, Bonferroni and Chebyshev bounds.
//! * [`simulator`]: Monte Carlo sampling and model fitting.

pub mod arith;
pub mod bounds;
pub mod distributions;
pub mod error;
pub mod moments;
pub mod oracle;
pub mod simulator;

pub use error::{Error, Result};
