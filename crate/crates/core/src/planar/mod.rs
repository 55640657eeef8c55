//! The 2D linear eigenvalue μ₁(B, α) of the weighted magnetic Schrödinger
//! operator -∇_{BF}·w_m∇_{BF} + αB·V_a on Ω̃.
//!
//! Two routes: an angular-Fourier decomposition for concentric discs
//! (radial tridiagonal solves per angular mode, cheap at any B) and a
//! gauge-covariant finite-difference discretization with Peierls link
//! phases for general masked domains. The two are cross-checked against
//! each other in the tests and the acceptance battery.

mod fd;
mod field;
mod fit;
mod fourier;

pub use fd::{assemble_operator, mu1_2d_fd, mu1_2d_fd_with_start, FdOptions};
pub use field::{reference_field, FField};
pub use fit::{disc_expansion_fit, ExpansionFit};
pub use fourier::{disc_mode_eigenvalue, mu1_disc_fourier, xi_star_cached, FourierOptions};

/// One 2D eigenvalue record.
#[derive(Debug, Clone)]
pub struct PlanarEig {
    pub b: f64,
    pub alpha: f64,
    pub mu1: f64,
    /// Winning angular mode (Fourier path only).
    pub winning_mode: Option<i64>,
    /// δ(n*, B) = n* - B/2 - ξ*√B (Fourier path only).
    pub delta: Option<f64>,
    /// Eigenvector mass within distance 5·B^{-1/2} of ∂Ω.
    pub boundary_mass_fraction: f64,
}
