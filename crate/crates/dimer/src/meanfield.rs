//! Classical (mean-field) layer of the two-well condensate: the Bose-Josephson
//! junction Hamiltonian on the (z, phi) phase cylinder, its fixed-point
//! structure, and the geometry and period of self-trapped orbits.
//!
//! Dimensionless conventions: energies are in units of 2J, time is tau = 2Jt,
//! and z = (N1 - N2)/N is the normalized population imbalance in [-1, 1].

use crate::numerics::{integrate_ode, NumericsError};
use crate::specfun::{elliptic_k, SpecfunError};
use std::f64::consts::PI;

/// Orbits with modulus below this are treated as the degenerate (harmonic)
/// limit around the self-trapping center.
const DEGENERATE_K: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum MeanfieldError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole at |z| = 1: {0}")]
    Pole(String),
    #[error("divergent quantity: {0}")]
    Divergence(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// Physical parameters of the two-site Bose-Hubbard dimer.
///
/// `j` and `u` are angular frequencies (rad/s); all physical frequencies
/// derived from energy differences are reported as f = dE / 2 pi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerParams {
    j: f64,
    u: f64,
    n: usize,
}

impl DimerParams {
    pub fn new(j: f64, u: f64, n: usize) -> Result<Self, MeanfieldError> {
        if !(j > 0.0) || !j.is_finite() {
            return Err(MeanfieldError::Domain(format!("hopping J must be > 0, got {j}")));
        }
        if !(u >= 0.0) || !u.is_finite() {
            return Err(MeanfieldError::Domain(format!("interaction U must be >= 0, got {u}")));
        }
        if n == 0 {
            return Err(MeanfieldError::Domain("particle number N must be >= 1".into()));
        }
        Ok(Self { j, u, n })
    }

    /// Construct from the dimensionless interaction strength Lambda = UN/2J.
    pub fn from_lambda(j: f64, lambda: f64, n: usize) -> Result<Self, MeanfieldError> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(MeanfieldError::Domain(format!("Lambda must be >= 0, got {lambda}")));
        }
        if n == 0 {
            return Err(MeanfieldError::Domain("particle number N must be >= 1".into()));
        }
        Self::new(j, 2.0 * j * lambda / n as f64, n)
    }

    pub fn hopping(&self) -> f64 {
        self.j
    }

    pub fn interaction(&self) -> f64 {
        self.u
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    /// Dimensionless interaction strength Lambda = UN/2J (always derived).
    pub fn lambda(&self) -> f64 {
        self.u * self.n as f64 / (2.0 * self.j)
    }
}

/// A point on the phase cylinder: population imbalance and relative phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpacePoint {
    pub z: f64,
    pub phi: f64,
}

impl PhaseSpacePoint {
    pub fn new(z: f64, phi: f64) -> Result<Self, MeanfieldError> {
        if !(z.abs() <= 1.0) {
            return Err(MeanfieldError::Domain(format!("|z| must be <= 1, got z = {z}")));
        }
        Ok(Self { z, phi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Center,
    Saddle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitKind {
    Libration,
    Rotation,
    Degenerate,
}

/// Turning points and elliptic moduli of a self-trapped orbit at energy `e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitGeometry {
    pub e: f64,
    pub z_minus: f64,
    pub z_plus: f64,
    pub k: f64,
    pub k_prime: f64,
    /// Characteristic of the third-kind integral; negative for librations
    /// (z_plus < 1).
    pub alpha2: f64,
    pub kind: OrbitKind,
}

/// Result of solving the orbit equation for phi at given z: either a real
/// phase or a classically forbidden point with complex phase re + i*im.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrbitPhi {
    Real(f64),
    Forbidden { re: f64, im: f64 },
}

/// Mean-field energy H(z, phi) = Lambda z^2/2 - sqrt(1 - z^2) cos phi,
/// in units of 2J.
pub fn bjj_energy(p: PhaseSpacePoint, lambda: f64) -> f64 {
    0.5 * lambda * p.z * p.z - (1.0 - p.z * p.z).sqrt() * p.phi.cos()
}

/// Maximum mean-field energy Lambda/2 + 1/(2 Lambda), attained at the
/// self-trapping fixed points (Lambda > 1).
pub fn max_energy(lambda: f64) -> f64 {
    0.5 * lambda + 0.5 / lambda
}

/// Location of the self-trapping centers, z0 = sqrt(1 - 1/Lambda^2).
pub fn self_trapping_z(lambda: f64) -> f64 {
    (1.0 - 1.0 / (lambda * lambda)).max(0.0).sqrt()
}

/// Fixed points of the flow with their stability. Below the bifurcation at
/// Lambda = 1 there are two centers; above it the pi-center splits into a
/// saddle flanked by two self-trapping centers.
pub fn fixed_points(lambda: f64) -> Vec<(PhaseSpacePoint, Stability)> {
    let mut pts = vec![(PhaseSpacePoint { z: 0.0, phi: 0.0 }, Stability::Center)];
    if lambda > 1.0 {
        let z0 = self_trapping_z(lambda);
        pts.push((PhaseSpacePoint { z: 0.0, phi: PI }, Stability::Saddle));
        pts.push((PhaseSpacePoint { z: z0, phi: PI }, Stability::Center));
        pts.push((PhaseSpacePoint { z: -z0, phi: PI }, Stability::Center));
    } else {
        pts.push((PhaseSpacePoint { z: 0.0, phi: PI }, Stability::Center));
    }
    pts
}

/// Solve the orbit equation for the phase at imbalance `z` on the energy-E
/// orbit: phi = arccos[(Lambda z^2 - 2E) / (2 sqrt(1 - z^2))].
///
/// Outside the classically allowed band the arccos argument leaves [-1, 1]
/// and the phase picks up an imaginary part: arccos(-1 - x) = pi - i arccosh(1 + x).
pub fn orbit_phi(z: f64, e: f64, lambda: f64) -> Result<OrbitPhi, MeanfieldError> {
    if z.abs() >= 1.0 {
        return Err(MeanfieldError::Pole(format!("orbit phase undefined at z = {z}")));
    }
    let mut arg = (lambda * z * z - 2.0 * e) / (2.0 * (1.0 - z * z).sqrt());
    // At turning points the argument is exactly +-1; absorb the roundoff
    // overhang rather than reporting a spuriously forbidden point.
    if arg.abs() > 1.0 && arg.abs() <= 1.0 + 1e-12 {
        arg = arg.signum();
    }
    if arg.abs() <= 1.0 {
        Ok(OrbitPhi::Real(arg.acos()))
    } else if arg < -1.0 {
        Ok(OrbitPhi::Forbidden { re: PI, im: -(-arg).acosh() })
    } else {
        Ok(OrbitPhi::Forbidden { re: 0.0, im: arg.acosh() })
    }
}

/// Turning points z- <= z+ and elliptic moduli of the orbit at energy `e`
/// inside the self-trapped window 1 < E <= Lambda/2 + 1/(2 Lambda).
pub fn turning_points(e: f64, lambda: f64) -> Result<OrbitGeometry, MeanfieldError> {
    if !(lambda > 1.0) {
        return Err(MeanfieldError::Domain(format!(
            "self-trapped orbits require Lambda > 1, got {lambda}"
        )));
    }
    let e_max = max_energy(lambda);
    if !(e > 1.0 && e <= e_max) {
        return Err(MeanfieldError::Domain(format!(
            "energy {e} outside the self-trapped window (1, {e_max}]"
        )));
    }
    // Discriminant 1 - 2 E Lambda + Lambda^2 >= 0 throughout the window,
    // vanishing exactly at E = E_max; clamp the roundoff tail.
    let disc = (1.0 - 2.0 * e * lambda + lambda * lambda).max(0.0);
    let root = disc.sqrt();
    let half_l2 = 0.5 * lambda * lambda;
    let zp2 = ((root + lambda * e - 1.0) / half_l2).clamp(0.0, 1.0);
    let zm2 = ((-root + lambda * e - 1.0) / half_l2).clamp(0.0, zp2);
    let z_plus = zp2.sqrt();
    let z_minus = zm2.sqrt();
    let k2 = ((zp2 - zm2) / zp2).clamp(0.0, 1.0);
    let k = k2.sqrt();
    let k_prime = (1.0 - k2).max(0.0).sqrt();
    let alpha2 = (zp2 - zm2) / (zp2 - 1.0);
    let kind = if k < DEGENERATE_K {
        OrbitKind::Degenerate
    } else if 1.0 - 2.0 * e / lambda > 0.0 {
        OrbitKind::Rotation
    } else {
        OrbitKind::Libration
    };
    Ok(OrbitGeometry { e, z_minus, z_plus, k, k_prime, alpha2, kind })
}

/// Dimensionless orbit period T~ = 4 K(k) / (Lambda z+) in units of tau = 2Jt.
/// Degenerate orbits fall back to the harmonic value 2 pi / sqrt(Lambda^2 - 1).
pub fn orbit_period_dimensionless(e: f64, lambda: f64) -> Result<f64, MeanfieldError> {
    let geom = turning_points(e, lambda)?;
    if geom.kind == OrbitKind::Degenerate {
        return Ok(2.0 * PI / (lambda * lambda - 1.0).sqrt());
    }
    if geom.k >= 1.0 - 1e-14 {
        return Err(MeanfieldError::Divergence(
            "orbit period diverges on the separatrix (k -> 1)".into(),
        ));
    }
    Ok(4.0 * elliptic_k(geom.k)? / (lambda * geom.z_plus))
}

/// Orbit period in seconds for hopping rate `j` (rad/s): T = T~ / (2J).
pub fn orbit_period(e: f64, lambda: f64, j: f64) -> Result<f64, MeanfieldError> {
    if !(j > 0.0) {
        return Err(MeanfieldError::Domain(format!("J must be > 0, got {j}")));
    }
    Ok(orbit_period_dimensionless(e, lambda)? / (2.0 * j))
}

/// A mean-field trajectory sampled at uniform steps of dimensionless time.
#[derive(Debug, Clone)]
pub struct PhaseTrajectory {
    pub t0: f64,
    pub dt: f64,
    pub points: Vec<PhaseSpacePoint>,
}

impl PhaseTrajectory {
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + self.dt * i as f64
    }
}

/// Integrate the Josephson equations of motion
/// dz/dtau = -sqrt(1 - z^2) sin phi,
/// dphi/dtau = Lambda z + z cos phi / sqrt(1 - z^2)
/// from `p0` with fixed-step RK4 over dimensionless time.
pub fn bjj_trajectory(
    p0: PhaseSpacePoint,
    lambda: f64,
    t_end: f64,
    dt: f64,
) -> Result<PhaseTrajectory, MeanfieldError> {
    if p0.z.abs() >= 1.0 {
        return Err(MeanfieldError::Pole(format!(
            "trajectory must start strictly inside |z| < 1, got z = {}",
            p0.z
        )));
    }
    let rhs = |_t: f64, s: &[f64]| {
        let (z, phi) = (s[0], s[1]);
        let w = 1.0 - z * z;
        if w <= 0.0 {
            return vec![f64::NAN, f64::NAN];
        }
        let sw = w.sqrt();
        vec![-sw * phi.sin(), lambda * z + z * phi.cos() / sw]
    };
    let traj = integrate_ode(rhs, &[p0.z, p0.phi], t_end, dt).map_err(|err| match err {
        NumericsError::Divergence { t } => MeanfieldError::Pole(format!(
            "trajectory reached |z| = 1 near tau = {t}"
        )),
        other => MeanfieldError::Numerics(other),
    })?;
    let points = traj
        .states
        .iter()
        .map(|s| PhaseSpacePoint { z: s[0], phi: s[1] })
        .collect();
    Ok(PhaseTrajectory { t0: traj.t0, dt: traj.dt, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad_adaptive;

    #[test]
    fn params_invariants() {
        assert!(DimerParams::new(0.0, 1.0, 10).is_err());
        assert!(DimerParams::new(1.0, -0.5, 10).is_err());
        assert!(DimerParams::new(1.0, 1.0, 0).is_err());
        let p = DimerParams::new(1.0, 0.4, 10).unwrap();
        assert!((p.lambda() - 2.0).abs() < 1e-15);
        let q = DimerParams::from_lambda(1.0, 2.0, 10).unwrap();
        assert!((q.interaction() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn energy_anchor_points() {
        let p = |z, phi| PhaseSpacePoint { z, phi };
        assert!((bjj_energy(p(0.0, 0.0), 3.0) + 1.0).abs() < 1e-15);
        assert!((bjj_energy(p(0.0, PI), 3.0) - 1.0).abs() < 1e-15);
        // Self-trapping fixed point sits at the top of the band.
        let lambda = 2.0;
        let z0 = self_trapping_z(lambda);
        let e = bjj_energy(p(z0, PI), lambda);
        assert!((e - 1.25).abs() < 1e-14);
        assert!((e - max_energy(lambda)).abs() < 1e-14);
    }

    #[test]
    fn fixed_point_structure() {
        let below = fixed_points(0.5);
        assert_eq!(below.len(), 2);
        assert!(below.iter().all(|(_, s)| *s == Stability::Center));

        let above = fixed_points(2.0);
        assert_eq!(above.len(), 4);
        let saddles: Vec<_> = above.iter().filter(|(_, s)| *s == Stability::Saddle).collect();
        assert_eq!(saddles.len(), 1);
        assert_eq!(saddles[0].0.phi, PI);
        let z0 = 3.0_f64.sqrt() / 2.0;
        assert!(above
            .iter()
            .any(|(p, s)| *s == Stability::Center && (p.z - z0).abs() < 1e-15));
        assert!(above
            .iter()
            .any(|(p, s)| *s == Stability::Center && (p.z + z0).abs() < 1e-15));

        // At the bifurcation the three pi-points coincide at (0, pi).
        let at = fixed_points(1.0);
        assert_eq!(at.len(), 2);
    }

    #[test]
    fn orbit_phi_at_turning_points_has_zero_sine() {
        // Turning points are where dz/dtau = -sqrt(1-z^2) sin(phi) vanishes,
        // so sin(phi(z+-)) = 0; for librations both ends sit at phi = pi.
        let (e, lambda) = (1.15, 2.0);
        let geom = turning_points(e, lambda).unwrap();
        for z in [geom.z_minus, geom.z_plus] {
            match orbit_phi(z, e, lambda).unwrap() {
                OrbitPhi::Real(phi) => assert!(phi.sin().abs() < 1e-7, "phi = {phi}"),
                other => panic!("expected real phase, got {other:?}"),
            }
        }
        match orbit_phi(geom.z_plus, e, lambda).unwrap() {
            OrbitPhi::Real(phi) => assert!((phi - PI).abs() < 1e-6),
            other => panic!("expected real phase, got {other:?}"),
        }
    }

    #[test]
    fn orbit_phi_at_fixed_point_is_pi() {
        let lambda = 2.0;
        let z0 = self_trapping_z(lambda);
        match orbit_phi(z0, max_energy(lambda), lambda).unwrap() {
            OrbitPhi::Real(phi) => assert!((phi - PI).abs() < 1e-7),
            other => panic!("expected real phase, got {other:?}"),
        }
    }

    #[test]
    fn orbit_phi_forbidden_reports_arccosh() {
        match orbit_phi(0.0, 1.15, 2.0).unwrap() {
            OrbitPhi::Forbidden { re, im } => {
                assert_eq!(re, PI);
                assert!((im.abs() - 1.15_f64.acosh()).abs() < 1e-14);
            }
            other => panic!("expected forbidden, got {other:?}"),
        }
        assert!(orbit_phi(1.0, 1.15, 2.0).is_err());
    }

    #[test]
    fn turning_points_degenerate_at_top() {
        let lambda = 2.0;
        let g = turning_points(max_energy(lambda), lambda).unwrap();
        let z0 = 3.0_f64.sqrt() / 2.0;
        assert!((g.z_minus - z0).abs() < 1e-12);
        assert!((g.z_plus - z0).abs() < 1e-12);
        assert!(g.k < 1e-8);
        assert_eq!(g.kind, OrbitKind::Degenerate);
    }

    #[test]
    fn turning_points_separatrix_limit() {
        // Just above E = 1 the inner turning point collapses and k -> 1.
        let g = turning_points(1.0 + 1e-12, 2.0).unwrap();
        assert!(g.z_minus < 2e-6);
        assert!(g.k > 1.0 - 1e-9);
        assert!(turning_points(1.0, 2.0).is_err());
        assert!(turning_points(1.3, 0.9).is_err());
        assert!(turning_points(1.26, 2.0).is_err()); // above E_max
    }

    #[test]
    fn orbit_classification_flips_at_half_lambda() {
        // Lambda = 4: window (1, 2.125], boundary at E = Lambda/2 = 2.
        let lambda = 4.0;
        assert_eq!(turning_points(1.99, lambda).unwrap().kind, OrbitKind::Rotation);
        assert_eq!(turning_points(2.01, lambda).unwrap().kind, OrbitKind::Libration);
    }

    #[test]
    fn polynomial_identity_on_grid() {
        // 4(1 - z^2) - (Lambda z^2 - 2E)^2 = -Lambda^2 (z^2 - z+^2)(z^2 - z-^2)
        for i in 0..5 {
            let lambda = 1.3 + 0.8 * i as f64;
            let e_max = max_energy(lambda);
            for j in 1..6 {
                let e = 1.0 + (e_max - 1.0) * j as f64 / 6.0;
                let g = turning_points(e, lambda).unwrap();
                for m in 0..9 {
                    let z = -0.95 + 0.22 * m as f64;
                    let z2 = z * z;
                    let lhs = 4.0 * (1.0 - z2) - (lambda * z2 - 2.0 * e).powi(2);
                    let rhs = -lambda * lambda
                        * (z2 - g.z_plus * g.z_plus)
                        * (z2 - g.z_minus * g.z_minus);
                    let scale = lhs.abs().max(rhs.abs()).max(1.0);
                    assert!((lhs - rhs).abs() < 1e-10 * scale, "lambda={lambda} e={e} z={z}");
                }
            }
        }
    }

    #[test]
    fn period_harmonic_limit_and_divergence() {
        let lambda = 2.0;
        let t = orbit_period_dimensionless(max_energy(lambda), lambda).unwrap();
        assert!((t - 2.0 * PI / 3.0_f64.sqrt()).abs() < 1e-12);
        assert!(orbit_period_dimensionless(1.0 + 1e-16, lambda).is_err());
    }

    #[test]
    fn period_matches_quadrature_oracle() {
        let (e, lambda, j) = (1.15, 2.0, 10.0);
        let g = turning_points(e, lambda).unwrap();
        // T~ = 2 * int dz / sqrt(zdot^2), zdot^2 = -Lambda^2 (z^2-z+^2)(z^2-z-^2)/4.
        let oracle = 2.0
            * quad_adaptive(
                |z| {
                    let v = -lambda * lambda / 4.0
                        * (z * z - g.z_plus * g.z_plus)
                        * (z * z - g.z_minus * g.z_minus);
                    1.0 / v.sqrt()
                },
                g.z_minus,
                g.z_plus,
                1e-10,
            )
            .unwrap();
        let t = orbit_period(e, lambda, j).unwrap();
        assert!((t - oracle / (2.0 * j)).abs() < 1e-7 * t, "{t} vs {}", oracle / (2.0 * j));
    }

    #[test]
    fn trajectory_stationary_at_fixed_point() {
        let lambda = 2.0;
        let z0 = self_trapping_z(lambda);
        let start = PhaseSpacePoint { z: z0, phi: PI };
        let traj = bjj_trajectory(start, lambda, 10.0, 0.01).unwrap();
        for p in &traj.points {
            assert!((p.z - z0).abs() < 1e-10 && (p.phi - PI).abs() < 1e-10);
        }
    }

    #[test]
    fn trajectory_conserves_energy_and_closes() {
        let (e, lambda) = (1.15, 2.0);
        let g = turning_points(e, lambda).unwrap();
        let start = PhaseSpacePoint { z: g.z_plus, phi: PI };
        let period = orbit_period_dimensionless(e, lambda).unwrap();
        let dt = period / 2000.0;
        let traj = bjj_trajectory(start, lambda, period, dt).unwrap();
        let e0 = bjj_energy(start, lambda);
        for p in &traj.points {
            assert!((bjj_energy(*p, lambda) - e0).abs() < 1e-8);
        }
        let last = traj.points.last().unwrap();
        assert!((last.z - start.z).abs() < 1e-5, "z drift {}", last.z - start.z);
        let dphi = (last.phi - start.phi).rem_euclid(2.0 * PI);
        let dphi = dphi.min(2.0 * PI - dphi);
        assert!(dphi < 1e-4, "phi drift {dphi}");
    }
}
