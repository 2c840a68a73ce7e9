//! Complex special functions: log Γ, ζ, real Dirichlet L-functions, the
//! completed zeta ξ, the scattering coefficient c_s, the phase ψ and the
//! K-Bessel function of complex order.

mod bessel;
mod dirichlet;
mod gamma;
mod phase;
mod zeta;

pub use bessel::{bessel_k, bessel_k_imag, bessel_k_scaled};
pub use dirichlet::{dirichlet_l, is_fundamental, kronecker_chi};
pub use gamma::{log_gamma, log_sin_pi};
pub use phase::{psi_and_derivative, psi_principal, PhaseBranch, PSI_MAGIC};
pub use zeta::{riemann_siegel_theta, riemann_zeta, scattering_c, scattering_c_xi, xi_completed};
