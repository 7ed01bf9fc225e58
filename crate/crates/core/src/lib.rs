//! Fractional-time quantum dynamics.
//!
//! Mittag-Leffler evaluation, spectral and time-stepping solvers for the
//! time-fractional Schrödinger equation, the comb-model propagator, Laplace
//! domain pole analysis, and the dilation-Hamiltonian case study.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod caputo;
pub mod comb;
pub mod error;
pub mod hyperbolic;
pub mod laplace;
pub mod mlf;
pub mod quad;
pub mod scenario;
pub mod special;
pub mod spectral;
pub mod verify;
pub mod wave;

pub use error::{Error, Result};
pub use mlf::{mittag_leffler, FractionalOrder, MlfEvalReport, MlfMethod};
pub use num_complex::Complex64;
pub use wave::{EvolutionTrace, Grid, Observable, WaveFunction};
