//! Numerical toolkit for radial Dirac eigenproblems on warped products.
//!
//! A metric of the form `dt² + ρ(t)² dσ²` over a round sphere reduces the
//! Dirac eigenequation to a family of 2×2 first-order systems, one per
//! sphere mode μ.  This crate integrates those systems in logarithmic /
//! arclength coordinates, measures how the L²-mass of solutions distributes
//! over annuli, computes the spectra of closed rotationally symmetric
//! models by shooting (cross-checked against an independent
//! finite-difference discretization), and drives the connected-sum gluing
//! and eigenvalue zero-crossing experiments built on top of those pieces.

pub mod annulus;
pub mod checks;
pub mod error;
pub mod export;
pub mod fd;
pub mod flow;
pub mod glued;
pub mod gronwall;
pub mod modes;
pub mod neck;
pub mod ode;
pub mod profile;
pub mod quad;
pub mod radial;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;
