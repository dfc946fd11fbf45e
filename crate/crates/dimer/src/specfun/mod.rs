//! Special functions behind the semiclassical formulas: complete elliptic
//! integrals K, E, Pi built on Carlson symmetric forms, the argument of
//! Gamma(1/2 + i xi), and the digamma combination entering the phase
//! correction derivative.
//!
//! Convention: every elliptic function here takes the MODULUS k, not the
//! parameter m = k^2. Many references (and scipy) use m; porting values
//! without squaring is the single most common mistake against this API.

mod carlson;
mod gamma;

pub use carlson::{carlson_rc, carlson_rd, carlson_rf, carlson_rj};
pub use gamma::{arg_gamma_half_plus_i, digamma_complex, dsphi_dseps, ln_gamma_real};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecfunError {
    #[error("argument outside function domain: {0}")]
    Domain(String),
    #[error("integral diverges: {0}")]
    Divergence(String),
    #[error("characteristic alpha^2 = 1 is a pole of Pi")]
    Pole,
}

/// Complete elliptic integral of the first kind, modulus convention.
pub fn elliptic_k(k: f64) -> Result<f64, SpecfunError> {
    check_modulus(k)?;
    if k >= 1.0 {
        return Err(SpecfunError::Divergence(format!("K(k) at k = {k} >= 1")));
    }
    carlson_rf(0.0, 1.0 - k * k, 1.0)
}

/// Complete elliptic integral of the second kind, modulus convention.
pub fn elliptic_e(k: f64) -> Result<f64, SpecfunError> {
    check_modulus(k)?;
    if k > 1.0 {
        return Err(SpecfunError::Domain(format!("E(k) needs k <= 1, got {k}")));
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    let kp2 = 1.0 - k * k;
    Ok(carlson_rf(0.0, kp2, 1.0)? - k * k / 3.0 * carlson_rd(0.0, kp2, 1.0)?)
}

/// Complete elliptic integral of the third kind, modulus convention.
///
/// The characteristic `alpha2` may be negative (circular case) or exceed 1;
/// for `alpha2 > 1` the real Cauchy principal value is returned via the
/// standard p < 0 transformation of R_J.
pub fn elliptic_pi(alpha2: f64, k: f64) -> Result<f64, SpecfunError> {
    check_modulus(k)?;
    if k >= 1.0 {
        return Err(SpecfunError::Divergence(format!("Pi(a2, k) at k = {k} >= 1")));
    }
    if alpha2 == 1.0 {
        return Err(SpecfunError::Pole);
    }
    let kp2 = 1.0 - k * k;
    Ok(carlson_rf(0.0, kp2, 1.0)? + alpha2 / 3.0 * carlson_rj(0.0, kp2, 1.0, 1.0 - alpha2)?)
}

fn check_modulus(k: f64) -> Result<(), SpecfunError> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(SpecfunError::Domain(format!("modulus must be finite and >= 0, got {k}")));
    }
    Ok(())
}
