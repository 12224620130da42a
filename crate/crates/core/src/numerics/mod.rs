//! Dense row-major matrices, singular values and the seeded random source
//! shared by every other module.

mod matrix;
mod rng;
mod svd;

pub use matrix::{dot, Matrix};
pub use rng::{gaussian_sample, Rng};
pub use svd::singular_values;
