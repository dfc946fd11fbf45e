//! Semiclassical quantization of the highest (self-trapped) doublets.
//!
//! The self-trapped island around the pi-mode center supports quantized
//! orbits; the highest pair of Bose-Hubbard levels corresponds to the orbit
//! whose island action reaches h/2. Tunneling between the two islands
//! (positive and negative imbalance) splits each level pair by an amount
//! controlled by the Euclidean action through the forbidden strip |z| < z-.
//!
//! Conventions used throughout:
//! * `s_w` is the island action in units of h, i.e. the phase-space area of
//!   the orbit region divided by h. The quantization variable is
//!   x = 2 pi s_w - s_phi, with doublet centers at x = (2n+1) pi; the highest
//!   doublet therefore sits at s_w = 1/2 (area h/2) up to the small gamma
//!   phase.
//! * `s_eps` <= 0 is the tunneling action; the barrier suppression factor is
//!   exp(pi s_eps).
//! * Dimensionless orbit energies E convert to angular frequencies (rad/s)
//!   through the scale J (N+1); the doublet splitting then reduces to
//!   Delta E = 2 J (omega / pi) exp(pi s_eps) with omega the dimensionless
//!   orbit frequency.
//! * Quantization routes evaluate the classical formulas at the finite-size
//!   nonlinearity U (N+1) / (2J), which is what makes the predicted
//!   splittings land on the exact spectrum at finite N; the closed-form
//!   estimate keeps the bare U N / (2J), where its truncation error happens
//!   to compensate the finite-N shift.

use std::f64::consts::PI;

use thiserror::Error;

use crate::meanfield::{self, DimerParams, MeanfieldError, OrbitGeometry, OrbitKind};
use crate::numerics::{find_root, NumericsError};
use crate::quantum::{self, QuantumError};
use crate::specfun::{
    arg_gamma_half_plus_i, dsphi_dseps, elliptic_e, elliptic_k, elliptic_pi, SpecfunError,
};

/// Errors from semiclassical quantization.
#[derive(Debug, Error)]
pub enum SemiclassicalError {
    #[error("outside the semiclassical domain: {0}")]
    Domain(String),
    #[error("self-trapped region smaller than h/2: {0}")]
    Validity(String),
    #[error(transparent)]
    Meanfield(#[from] MeanfieldError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

type Result<T> = std::result::Result<T, SemiclassicalError>;

/// The three actions of an orbit at fixed energy, plus the barrier factor.
#[derive(Debug, Clone, Copy)]
pub struct ActionBundle {
    /// Island action in units of h.
    pub s_w: f64,
    /// Tunneling action; non-positive inside the self-trapped window.
    pub s_eps: f64,
    /// Gamma-function phase correction.
    pub s_phi: f64,
    /// exp(-pi s_eps), the barrier enhancement of the quantization condition.
    pub kappa: f64,
}

/// Splitting of the highest doublet and the quantities entering it.
#[derive(Debug, Clone, Copy)]
pub struct SplittingResult {
    /// Dimensionless orbit energy of the quantized doublet center.
    pub energy: f64,
    /// Scaled energy e in [0, 1): 0 at the island center, 1 at the separatrix.
    pub e_scaled: f64,
    /// Doublet splitting as a physical frequency in Hz.
    pub delta_e: f64,
    /// Dimensionless classical orbit frequency pi Lambda z+ / (2 K(k)).
    pub omega: f64,
    /// Mean doublet energy in Hz (including the constant interaction shift).
    pub ebar: f64,
}

/// Closed-form estimate of the highest-doublet scaled energy.
#[derive(Debug, Clone, Copy)]
pub struct ApproxHighestEnergy {
    /// Scaled energy e of the highest quantized orbit.
    pub e: f64,
    /// True when e exceeds 1/(Lambda-1)^2, where the quantized orbit is a
    /// rotation and the libration-based estimate degrades.
    pub rotation_regime: bool,
}

/// Which scaled energy feeds the closed-form splitting exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ESource {
    /// The closed-form estimate (default; fully analytic).
    ClosedForm,
    /// The scaled energy of the numerically quantized highest orbit.
    QuantizationRoot,
}

/// Where a doublet splitting comes from when a consumer needs one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplittingSource {
    /// Exact diagonalization of the Bose-Hubbard pair.
    Exact,
    /// Numerical semiclassical quantization.
    Semiclassical,
    /// Fully analytic closed form.
    ClosedForm,
    /// No tunneling at all (frozen doublet).
    Zero,
}

/// Finite-size nonlinearity used by the quantization routes.
///
/// The actions carry N+1 where the mean-field limit has N; consistency
/// requires the same replacement inside Lambda, and this shift is what puts
/// the predicted splittings within ten percent of exact diagonalization.
pub fn lambda_quantization(params: &DimerParams) -> f64 {
    params.interaction() * (params.particles() as f64 + 1.0) / (2.0 * params.hopping())
}

/// Angular-frequency scale (rad/s) converting dimensionless orbit energies.
fn energy_scale(params: &DimerParams) -> f64 {
    params.hopping() * (params.particles() as f64 + 1.0)
}

/// Step an energy off the libration-rotation boundary E = Lambda/2, where
/// z+ = 1 makes the third-kind characteristics blow up; the singularity is
/// removable, so a relative nudge of 1e-9 changes the actions below their
/// evaluation accuracy.
fn nudge_off_cap_boundary(e: f64, lambda: f64) -> f64 {
    let window = meanfield::max_energy(lambda) - 1.0;
    if (e - lambda / 2.0).abs() < 1e-10 * window {
        e + 1e-9 * window
    } else {
        e
    }
}

/// Closed elliptic form of the single-branch orbit integral
/// int (pi - phi(z)) dz between the turning points.
///
/// For rotations phi(z+) = 0 rather than pi, which leaves the boundary term
/// pi z+ from integration by parts in addition to the elliptic combination.
fn orbit_integral(geom: &OrbitGeometry, e: f64, lambda: f64) -> Result<f64> {
    let zp = geom.z_plus;
    let ek = elliptic_e(geom.k)?;
    let kk = elliptic_k(geom.k)?;
    // 1 - z+^2 = (b - 1)^2 / Lambda^2 with b = sqrt(Lambda^2 + 1 - 2 Lambda E),
    // evaluated through b - 1 = Lambda (Lambda - 2E) / (b + 1) to avoid the
    // catastrophic cancellation near E = Lambda/2 and near E -> 1 at
    // Lambda -> 2, where z+ -> 1 quadratically. The characteristic is then
    // alpha^2 = -(z+^2 - z-^2)/(1 - z+^2) = -4 b / (b - 1)^2.
    let b = (lambda * lambda + 1.0 - 2.0 * lambda * e).sqrt();
    let bm1 = lambda * (lambda - 2.0 * e) / (b + 1.0);
    let alpha2 = -4.0 * b / (bm1 * bm1);
    let pik = elliptic_pi(alpha2, geom.k)?;
    let inv_one_minus_zp2 = lambda * lambda / (bm1 * bm1);
    let mut integral =
        -zp * ek + (1.0 - 2.0 * e / lambda) / zp * (kk - pik * inv_one_minus_zp2);
    if geom.kind == OrbitKind::Rotation {
        integral += PI * zp;
    }
    Ok(integral)
}

/// Island action of the self-trapped orbit at energy `e`, in units of h.
///
/// The island area is twice the single-branch integral, plus the polar cap
/// 2 pi (1 - z+) when the orbit winds around the pole (E < Lambda/2).
pub fn action_orbit(e: f64, lambda: f64, n: usize) -> Result<f64> {
    let e = nudge_off_cap_boundary(e, lambda);
    let geom = meanfield::turning_points(e, lambda)?;
    let mut area = 2.0 * orbit_integral(&geom, e, lambda)?;
    if e < lambda / 2.0 {
        area += 2.0 * PI * (1.0 - geom.z_plus);
    }
    Ok((n as f64 + 1.0) / (4.0 * PI) * area)
}

/// Tunneling action through the forbidden strip |z| < z-; non-positive.
///
/// Closed form: -pi s_eps / (N+1) = -(1 - 2E/Lambda) Pi(z+^-2, k') / z+
/// + z+ (K(k') - E(k')), where the third-kind integral with characteristic
/// above one is the real principal value.
pub fn action_tunneling(e: f64, lambda: f64, n: usize) -> Result<f64> {
    let e = nudge_off_cap_boundary(e, lambda);
    let geom = meanfield::turning_points(e, lambda)?;
    let zp = geom.z_plus;
    // At the separatrix the forbidden strip closes; the action vanishes like
    // z-^2 and the elliptic representation degenerates, so return the limit.
    if geom.z_minus < 1e-6 {
        return Ok(0.0);
    }
    let kp = geom.k_prime;
    let kkp = elliptic_k(kp)?;
    let ekp = elliptic_e(kp)?;
    // Characteristic 1/z+^2 = Lambda^2 / (Lambda^2 - (b-1)^2), kept away from
    // the representability cliff at z+ = 1 (see orbit_integral). When it
    // still rounds to exactly 1, the prefactor 1 - 2E/Lambda is itself tiny
    // there, so the principal-value term drops out of the barrier.
    let b = (lambda * lambda + 1.0 - 2.0 * lambda * e).sqrt();
    let bm1 = lambda * (lambda - 2.0 * e) / (b + 1.0);
    let characteristic = lambda * lambda / (lambda * lambda - bm1 * bm1);
    let strip = match elliptic_pi(characteristic, kp) {
        Ok(pi_pv) => -(1.0 - 2.0 * e / lambda) / zp * pi_pv,
        Err(SpecfunError::Pole) => 0.0,
        Err(err) => return Err(err.into()),
    };
    let barrier = strip + zp * (kkp - ekp);
    Ok(-(n as f64 + 1.0) / PI * barrier)
}

/// Gamma-function phase correction S_phi(s) = arg Gamma(1/2 + i s)
/// - s ln|s| + s, extended continuously through s = 0 where it vanishes.
pub fn phase_correction(s_eps: f64) -> f64 {
    if s_eps == 0.0 {
        return 0.0;
    }
    arg_gamma_half_plus_i(s_eps) - s_eps * s_eps.abs().ln() + s_eps
}

/// All three actions plus the barrier factor kappa = exp(-pi s_eps).
pub fn actions(e: f64, lambda: f64, n: usize) -> Result<ActionBundle> {
    let s_w = action_orbit(e, lambda, n)?;
    let s_eps = action_tunneling(e, lambda, n)?;
    Ok(ActionBundle { s_w, s_eps, s_phi: phase_correction(s_eps), kappa: (-PI * s_eps).exp() })
}

/// Quantization variable x(E) = 2 pi s_w - s_phi; doublets sit near odd
/// multiples of pi.
fn quantization_x(e: f64, lambda: f64, n: usize) -> Result<f64> {
    let b = actions(e, lambda, n)?;
    Ok(2.0 * PI * b.s_w - b.s_phi)
}

/// Derivative dx/dE from the analytic period: 2 pi d s_w / dE = -(N+1) T/2
/// with T = 4 K(k) / (Lambda z+), plus the chain-rule term through s_phi.
fn quantization_dx_de(e: f64, lambda: f64, n: usize) -> Result<f64> {
    let e = nudge_off_cap_boundary(e, lambda);
    let geom = meanfield::turning_points(e, lambda)?;
    let np1 = n as f64 + 1.0;
    let kk = elliptic_k(geom.k)?;
    let orbit_term = -np1 * 2.0 * kk / (lambda * geom.z_plus);
    let s_eps = action_tunneling(e, lambda, n)?;
    if s_eps == 0.0 {
        return Ok(orbit_term);
    }
    let kkp = elliptic_k(geom.k_prime)?;
    let dseps_de = -2.0 * np1 / (PI * lambda * geom.z_plus) * kkp;
    // s_phi is odd in s_eps, so its derivative is even; evaluate at |s_eps|.
    let dsphi = dsphi_dseps(s_eps.abs())?;
    Ok(orbit_term - dsphi * dseps_de)
}

/// Scaled energy e = (-E + Lambda/2 + 1/(2 Lambda)) 2 Lambda / (Lambda-1)^2;
/// 0 at the island center (E = E_max) and 1 at the separatrix (E = 1).
pub fn scaled_energy(e: f64, lambda: f64) -> f64 {
    (-e + lambda / 2.0 + 0.5 / lambda) * 2.0 * lambda / ((lambda - 1.0) * (lambda - 1.0))
}

/// Inverse of [`scaled_energy`].
pub fn unscale(e_scaled: f64, lambda: f64) -> f64 {
    lambda / 2.0 + 0.5 / lambda - e_scaled * (lambda - 1.0) * (lambda - 1.0) / (2.0 * lambda)
}

/// Scan the energy window in descending panels and bisect the first sign
/// change of `f`; the highest doublet is the root closest to E_max.
fn solve_descending<F>(lambda: f64, f: F, what: &str) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    const PANELS: usize = 64;
    let e_max = meanfield::max_energy(lambda);
    let delta = 1e-9 * (e_max - 1.0);
    let lo = 1.0 + delta;
    let hi = e_max - delta;
    let step = (hi - lo) / PANELS as f64;
    let mut prev_e = hi;
    let mut prev_f = f(prev_e)?;
    for i in (0..PANELS).rev() {
        let e = lo + step * i as f64;
        let fe = f(e)?;
        if prev_f == 0.0 {
            return Ok(prev_e);
        }
        if fe * prev_f < 0.0 {
            let root = find_root(
                |x| f(x).unwrap_or(f64::NAN),
                e,
                prev_e,
                1e-13 * (e_max - 1.0),
            )?;
            return Ok(root);
        }
        prev_e = e;
        prev_f = fe;
    }
    Err(SemiclassicalError::Validity(format!(
        "no {what} root in the self-trapped window at Lambda = {lambda}"
    )))
}

/// Energy of the highest quantized orbit: the root of s_w(E) = 1/2, i.e. the
/// orbit whose island area is h/2.
pub fn solve_quantization_highest(params: &DimerParams) -> Result<f64> {
    let lambda = lambda_quantization(params);
    let n = params.particles();
    if lambda <= 1.0 {
        return Err(SemiclassicalError::Domain(format!(
            "no self-trapped island at Lambda = {lambda} <= 1"
        )));
    }
    solve_descending(lambda, |e| action_orbit(e, lambda, n).map(|s| s - 0.5), "s_w = 1/2")
}

/// Doublet energies from the full quantization condition.
///
/// Solves x(E_c) = pi, then linearizes around E_c: the condition
/// cos x = -kappa / sqrt(1 + kappa^2) has roots x = pi +- arctan(exp(pi
/// s_eps)), and the x_+ root lies LOWER in energy because x decreases with E.
/// Returns (E_minus, E_plus, splitting) with the dimensionless doublet
/// energies E_minus > E_plus and the splitting as a physical frequency in Hz.
pub fn solve_full_quantization(params: &DimerParams) -> Result<(f64, f64, f64)> {
    solve_full_quantization_doublet(params, 0)
}

/// Generalization of [`solve_full_quantization`] to the `index`-th doublet
/// below the top (x = (2 index + 1) pi). Index 0 is the highest doublet;
/// higher indices are exposed for exploration but only the highest pair is
/// validated against exact diagonalization.
pub fn solve_full_quantization_doublet(
    params: &DimerParams,
    index: usize,
) -> Result<(f64, f64, f64)> {
    let lambda = lambda_quantization(params);
    let n = params.particles();
    if lambda <= 1.0 {
        return Err(SemiclassicalError::Domain(format!(
            "no self-trapped island at Lambda = {lambda} <= 1"
        )));
    }
    let target = (2.0 * index as f64 + 1.0) * PI;
    let e_c = solve_descending(
        lambda,
        |e| quantization_x(e, lambda, n).map(|x| x - target),
        "quantization",
    )?;
    let s_eps = action_tunneling(e_c, lambda, n)?;
    let half_gap_x = (PI * s_eps).exp().atan();
    let dx_de = quantization_dx_de(e_c, lambda, n)?;
    let half_gap_e = half_gap_x / dx_de.abs();
    let e_minus = e_c + half_gap_e;
    let e_plus = e_c - half_gap_e;
    let delta_hz = energy_scale(params) * (e_minus - e_plus) / (2.0 * PI);
    Ok((e_minus, e_plus, delta_hz))
}

/// Splitting of the highest doublet via the explicit barrier formula
/// Delta E = 2 J (omega / pi) exp(pi s_eps) at the s_w = 1/2 orbit.
pub fn splitting_semiclassical(params: &DimerParams) -> Result<SplittingResult> {
    let lambda = lambda_quantization(params);
    let n = params.particles();
    let e_root = solve_quantization_highest(params)?;
    let geom = meanfield::turning_points(e_root, lambda)?;
    let omega = PI * lambda * geom.z_plus / (2.0 * elliptic_k(geom.k)?);
    let s_eps = action_tunneling(e_root, lambda, n)?;
    let delta_rad = 2.0 * params.hopping() * omega / PI * (PI * s_eps).exp();
    let nf = n as f64;
    let offset = 0.5 * params.interaction() * (0.5 * nf * nf - nf);
    let ebar = (energy_scale(params) * e_root + offset) / (2.0 * PI);
    Ok(SplittingResult {
        energy: e_root,
        e_scaled: scaled_energy(e_root, lambda),
        delta_e: delta_rad / (2.0 * PI),
        omega,
        ebar,
    })
}

/// Closed-form scaled energy of the highest doublet,
/// e = 2 Lambda sqrt(Lambda^2 - 1) / ((Lambda - 1)^2 (N + 1)), evaluated at
/// the quantization nonlinearity so it estimates [`solve_quantization_highest`].
pub fn approx_highest_energy(params: &DimerParams) -> Result<ApproxHighestEnergy> {
    let lambda = lambda_quantization(params);
    if lambda <= 1.0 {
        return Err(SemiclassicalError::Domain(format!(
            "closed form needs Lambda > 1, got {lambda}"
        )));
    }
    let e = approx_e_at(lambda, params.particles());
    let lm1 = lambda - 1.0;
    Ok(ApproxHighestEnergy { e, rotation_regime: e > 1.0 / (lm1 * lm1) })
}

fn approx_e_at(lambda: f64, n: usize) -> f64 {
    let lm1 = lambda - 1.0;
    2.0 * lambda * (lambda * lambda - 1.0).sqrt() / (lm1 * lm1 * (n as f64 + 1.0))
}

/// Fully analytic splitting estimate in Hz:
/// Delta E = 2 J (omega / pi) (exp(z0) / (Lambda + omega))^((N+1)(1-e)) with
/// omega = sqrt(Lambda^2 - 1) and z0 = sqrt(1 - 1/Lambda^2).
///
/// With `use_e_correction` off the exponent keeps e = 0 (the harmonic-island
/// limit, typically an order of magnitude too small); with it on, `e_source`
/// selects either the closed-form e or the numerically quantized one.
/// Anchored at the bare nonlinearity U N / (2J), where its truncation error
/// compensates the finite-N shift (see the module docs). Total for
/// Lambda > 1 with the closed-form source (e saturates at 1); the root
/// source propagates validity errors.
pub fn approx_splitting_closed_form(
    params: &DimerParams,
    use_e_correction: bool,
    e_source: ESource,
) -> Result<f64> {
    let lambda = params.lambda();
    let n = params.particles();
    if lambda <= 1.0 {
        return Err(SemiclassicalError::Domain(format!(
            "closed form needs Lambda > 1, got {lambda}"
        )));
    }
    let e = if !use_e_correction {
        0.0
    } else {
        match e_source {
            ESource::ClosedForm => approx_e_at(lambda, n).min(1.0),
            ESource::QuantizationRoot => {
                let root = solve_descending(
                    lambda,
                    |x| action_orbit(x, lambda, n).map(|s| s - 0.5),
                    "s_w = 1/2",
                )?;
                scaled_energy(root, lambda)
            }
        }
    };
    let omega = (lambda * lambda - 1.0).sqrt();
    let z0 = (1.0 - 1.0 / (lambda * lambda)).sqrt();
    let base = z0.exp() / (lambda + omega);
    let exponent = (n as f64 + 1.0) * (1.0 - e);
    let delta_rad = 2.0 * params.hopping() * omega / PI * base.powf(exponent);
    Ok(delta_rad / (2.0 * PI))
}

/// Smallest Lambda at which the self-trapped island reaches area h/2, below
/// which no quantized doublet exists.
pub fn validity_boundary(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(SemiclassicalError::Domain(format!(
            "validity boundary needs N >= 2, got {n}"
        )));
    }
    let area_at_separatrix = |lambda: f64| -> Result<f64> {
        let e_max = meanfield::max_energy(lambda);
        action_orbit(1.0 + 1e-9 * (e_max - 1.0), lambda, n)
    };
    // Evaluation can fail for Lambda so close to 1 that the island window
    // underflows; there the island is certainly smaller than h/2.
    let f = |lambda: f64| area_at_separatrix(lambda).map(|s| s - 0.5).unwrap_or(-0.5);
    let lo = 1.0 + 1e-6;
    let hi = 20.0;
    if f(lo) >= 0.0 {
        return Ok(lo);
    }
    if f(hi) <= 0.0 {
        return Err(SemiclassicalError::Validity(format!(
            "island never reaches h/2 for N = {n} up to Lambda = {hi}"
        )));
    }
    Ok(find_root(f, lo, hi, 1e-10)?)
}

/// Doublet splitting in Hz from the selected source; `Zero` yields 0.
pub fn splitting_hz(params: &DimerParams, source: SplittingSource) -> Result<f64> {
    match source {
        SplittingSource::Exact => Ok(quantum::exact_splitting(params)? / (2.0 * PI)),
        SplittingSource::Semiclassical => Ok(splitting_semiclassical(params)?.delta_e),
        SplittingSource::ClosedForm => {
            approx_splitting_closed_form(params, true, ESource::ClosedForm)
        }
        SplittingSource::Zero => Ok(0.0),
    }
}

/// Times of maximal two-mode entanglement, (T/4, 3T/4) in seconds, where
/// T = 1 / f is period of the two-state beat at the doublet frequency f.
pub fn entanglement_times(params: &DimerParams, source: SplittingSource) -> Result<(f64, f64)> {
    let f_hz = splitting_hz(params, source)?;
    if !(f_hz > 0.0) {
        return Err(SemiclassicalError::Domain(format!(
            "entanglement times need a positive splitting, got {f_hz} Hz"
        )));
    }
    let period = 1.0 / f_hz;
    Ok((period / 4.0, 3.0 * period / 4.0))
}
