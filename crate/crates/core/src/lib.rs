//! Characterizing sequences and filters for countable subgroups of the circle
//! group 𝕋 = ℝ/ℤ, built on exact circle arithmetic.

pub mod bohr;
pub mod characterize;
pub mod circle;
pub mod cli;
pub mod constants;
pub mod density;
pub mod error;
pub mod filters;
pub mod homomorphism;
pub mod lattice;
pub mod padic;
pub mod sequence;

pub use circle::{ArcSet, CircleElement, IrrationalSymbol, Rational};
pub use error::{Error, Result};
pub use sequence::{CharSequence, Provenance};
