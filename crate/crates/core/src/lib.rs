//! Positive measures δ(f) supported on finite unions of affine hyperplanes,
//! the resultant multiplier J of two root-factored polynomials, and numerical
//! machinery that checks
//!
//! ```text
//! ∫ dx δ(P_x(u)) ⊗ δ(Q_x(v)) = |J(u, v)| δ(R(u, v))
//! ```
//!
//! by several independent routes, together with the 3×3 real symmetric Horn
//! application where the identity localizes an SO(3) integral.

pub mod delta;
pub mod error;
pub mod horn;
pub mod mc;
pub mod poly;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result, Singularity};
