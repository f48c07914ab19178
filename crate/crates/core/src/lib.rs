//! Shifted moments of CUE characteristic polynomials, truncated multivariate
//! series, and discrete moments of zeta derivatives at the zeros.

pub mod arith;
pub mod checks;
pub mod cue;
pub mod error;
pub mod predict;
pub mod scalar;
pub mod series;
pub mod special;
pub mod symfunc;
pub mod zeta;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ValueVector = symfunc::ValueVector<f64>;
pub type ShiftSet = symfunc::ShiftSet<f64>;
pub type TruncSeries = series::TruncSeries<f64>;
