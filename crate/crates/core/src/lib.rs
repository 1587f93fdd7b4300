//! Oseledets subspaces of finite matrix cocycles.
//!
//! A cocycle is given as a finite, time-indexed run of square matrices
//! ([`CocycleWindow`]). Four families of methods approximate the one-dimensional
//! Oseledets subspace `W_j` at a base time:
//!
//! - [`svd`]: right singular vectors of long products pushed forward, with
//!   periodic re-orthogonalisation against the leading singular frames;
//! - [`dichotomy`]: bounded solutions of impulsively forced, exponentially
//!   shifted difference equations (dichotomy projectors), solved as
//!   minimum-norm least-squares problems through banded normal equations;
//! - [`ginelli`]: stationary Lyapunov basis by QR push-forward followed by
//!   inverse iteration on the triangular cocycle;
//! - [`wolfe`]: intersection of the stationary Lyapunov span with the
//!   orthogonal complement of the leading singular directions.
//!
//! [`exact_model`] builds cocycles whose Oseledets splitting is known in
//! closed form, and [`validation`] provides the equivariance and
//! expansion-rate diagnostics that work without ground truth.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod banded;
pub mod cocycle;
pub mod dichotomy;
mod error;
pub mod exact_model;
pub mod ginelli;
pub mod linalg;
pub mod method;
pub mod rng;
pub mod spectrum;
pub mod svd;
pub mod validation;
pub mod wolfe;

pub use cocycle::{
    left_singular_frame, project_out, propagate, right_singular_frame, scaled_product,
    CocycleWindow, MethodTag, OrthonormalFrame, ScaledProduct, SingularFrame, SubspaceApprox,
};
pub use error::{Error, Result};
pub use method::{Approximator, Method};
pub use spectrum::{choose_shifts, qr_lyapunov, DichotomyShifts, SpectrumEstimate};

pub use nalgebra::{DMatrix, DVector};
