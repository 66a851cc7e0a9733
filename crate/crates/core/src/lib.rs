//! Pointwise verification engine for the two-parameter family of Hermitian
//! structures `(J_{a,b}, g_{a,b})` on a product `M x M'` of Sasakian manifolds.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! * [`tensor`] - dense multilinear algebra on a single tangent space.
//! * [`sasakian`] - closed-form Sasakian factors (round spheres, Sasakian
//!   space forms, D-homothetic deformations) and their pointwise identities.
//! * [`hermitian`] - the product metric, complex structure, covariant
//!   derivative of `J`, curvature, Ricci and Ricci-* tensors.
//! * [`einstein`] - the Einstein decision for the family, both from the
//!   structural conditions and from the Ricci residual, plus the
//!   Calabi-Eckmann example family.
//! * [`oracle`] - an independent finite-difference computation of the same
//!   quantities on stereographic charts of (deformed) spheres.
//!
//! Everything is a pure function of immutable values.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod einstein;
pub mod error;
pub mod hermitian;
pub mod oracle;
pub mod sasakian;
pub mod tensor;

pub use error::{Error, Result};

/// Tolerance for quantities computed in closed form.
pub const TOL_ALGEBRAIC: f64 = 1e-12;

/// Default tolerance for finite-difference curvature comparisons.
pub const TOL_FD: f64 = 1e-4;
