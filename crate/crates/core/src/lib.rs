//! Exact symbolic toolkit for rational proper maps between balls and
//! Siegel upper half-spaces.
//!
//! Everything is computed over the Gaussian rationals: no floating point,
//! no intervals. The crate is organized bottom-up:
//!
//! - [`scalar`]: exact complex scalars with rational real/imaginary parts,
//! - [`poly`]: sparse multivariate polynomials over those scalars,
//! - [`polymatrix`]: matrices of polynomials with determinant, adjugate,
//!   column-splitting expansions, and rank certification,
//! - [`crjet`]: the jet-level pipeline that builds the Segre-restriction
//!   matrices of a normalized map germ and certifies its degree bounds,
//! - [`ballmap`]: concrete rational maps (propriety checks, Cayley
//!   conjugation, Segre restriction, and a catalog of classical maps).

pub mod ballmap;
pub mod crjet;
pub mod poly;
pub mod polymatrix;
pub mod sampling;
pub mod scalar;

pub use scalar::{GaussianRational, Rational};
