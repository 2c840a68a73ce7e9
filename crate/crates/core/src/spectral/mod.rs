//! Spectral pairings on the critical line.
//!
//! All integrals are over s = ½ + it with λ_s − λ_w = t² + (w − ½)², so that
//! (1/4πi)∫ ds becomes (1/4π)∫ dt. Raw pairings need Re(w) > ½ + δ; near the
//! line the subtracted forms are used.

mod pairings;
mod quadrature;
mod sampler;

pub use pairings::{
    constant_term_coefficient, determinant_fg, eta_v, eta_v_closed, heegner_correction_general, j_online,
    kernel_pairing, rd_correction, rd_term, rd_term_sinh, theta_u, theta_v_closed, FgRoute, FgValue, L1_ZERO_EXPONENT,
};
pub(crate) use quadrature::rule as gl_rule;
pub use quadrature::{PairingResult, QuadratureSpec, TailMode};
pub use sampler::{ThetaSampler, THETA_CACHE_MAGIC};
