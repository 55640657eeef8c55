//! Numerical laboratory for superconductivity in superconductor/normal-metal
//! sandwiches.
//!
//! A cylindrical superconductor of cross section Ω sits inside a normal
//! material filling Ω̃ \ Ω. The normal material is characterised by a coupling
//! `a > 0` and a conductivity ratio `m > 0`; the kinetic term of the free
//! energy carries the weight `1/m` outside Ω and the quadratic term carries
//! the sign flip `V_a = -1` inside, `+a` outside. This crate computes
//!
//! * the 1D model operator family on the line with the transmission condition
//!   `u'(0+) = u'(0-)/m` and its band function ξ ↦ μ₁(a,m,α;ξ) ([`model1d`],
//!   [`band`]),
//! * the spectral constants attached to the band minimum (C₁, b₁, 𝒞₁, I₂, C₂,
//!   δ₀, C₀) via a regularized resolvent ([`constants`]),
//! * the 2D linear eigenvalue μ₁(B,α) on masked grids, both by an angular
//!   Fourier decomposition for concentric discs and by a gauge-covariant
//!   finite-difference discretization for general domains ([`planar`]),
//! * critical magnetic fields, one-sided B-derivatives of λ₁ = μ₁ + αB and
//!   phase-set classification ([`fields`]),
//! * the full nonlinear Ginzburg-Landau energy with link variables, its exact
//!   discrete gradient, a descent minimizer and a diagnostic battery
//!   ([`glflow`]).
//!
//! All solvers are deterministic given their inputs (and a seed where noise
//! is involved), and every operation is a pure function of its arguments, so
//! parameter scans may be evaluated concurrently.

pub mod band;
pub mod constants;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod glflow;
pub mod grid1d;
pub mod grid2d;
pub mod hermband;
pub mod material;
pub mod model1d;
pub mod oracle;
pub mod planar;
pub mod tridiag;

pub use error::{Error, Result};
pub use material::Material;
