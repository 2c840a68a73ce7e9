//! Numerical toolkit for pseudo-Laplacians on the modular surface.
//!
//! The crate covers special functions (Γ, ζ, real Dirichlet L-functions, the
//! scattering coefficient and its phase, complex-order K-Bessel), binary
//! quadratic forms and Heegner points, Eisenstein series, spectral pairings on
//! the critical line, zero isolation, and statistics over the resulting zeros.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod eisenstein;
pub mod error;
pub mod heegner;
pub mod specialfns;
pub mod spectral;
pub mod zeros;

pub use error::{Error, Result};
pub use heegner::{FundamentalDiscriminant, HeegnerSet, ReducedForm, ThetaCombination};
pub use num_complex::Complex64;
pub use specialfns::PhaseBranch;
pub use spectral::{PairingResult, QuadratureSpec, TailMode};
pub use zeros::{ZeroKind, ZeroRecord};

/// Area of the standard fundamental domain, ⟨1,1⟩ = π/3.
pub const VOLUME: f64 = std::f64::consts::FRAC_PI_3;

/// Eigenvalue of the constant function, λ_1 = 1·(1−1).
pub const LAMBDA_ONE: f64 = 0.0;

/// λ_s = s(1−s).
pub fn lambda(s: Complex64) -> Complex64 {
    s * (1.0 - s)
}

/// A point x + iy of the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!(
                "point ({x}, {y}) is not in the upper half plane"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// |x| ≤ 1/2 and x² + y² ≥ 1, with a little slack for rounding.
    pub fn in_fundamental_domain(&self) -> bool {
        self.x.abs() <= 0.5 + 1e-12 && self.x * self.x + self.y * self.y >= 1.0 - 1e-12
    }
}

/// Truncation height a > 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
pub struct TruncationHeight(f64);

impl TruncationHeight {
    pub fn new(a: f64) -> Result<Self> {
        if a > 1.0 && a.is_finite() {
            Ok(Self(a))
        } else {
            Err(Error::Domain(format!("truncation height must exceed 1, got {a}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}
