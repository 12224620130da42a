//! Hadamard representation (HR) layers and the diagnostics used to study
//! dormant neurons in value-based reinforcement learning.
//!
//! An HR layer replaces a hidden layer `f(A x + b)` with the element-wise
//! product of two independently parameterized branches,
//! `f(A1 x + b1) * f(A2 x + b2)`. The crate provides:
//!
//! - [`numerics`]: a small dense matrix type, singular values and a seeded RNG.
//! - [`network`]: dense / HR layers with hand-derived backprop, Adam and checkpoints.
//! - [`diagnostics`]: KDE dormancy detection, effective rank and the
//!   effective-bias decomposition of saturated neurons.
//! - [`saturation`]: the single-vs-product collapse probability model.
//! - [`rl`]: a desk-scale DQN on a chain MDP with distractor features.
//! - [`harness`]: score normalization, configs, CSV metrics and the suite runner.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod network;
pub mod numerics;
pub mod rl;
pub mod saturation;

pub use error::{Error, Result};
