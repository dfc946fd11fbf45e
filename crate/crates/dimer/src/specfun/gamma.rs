//! Complex log-gamma (Lanczos) and digamma, specialized for the phase
//! correction terms of the quantization condition.

use super::SpecfunError;
use num_complex::Complex64;
use std::f64::consts::PI;

// Lanczos g = 7, n = 9 coefficient set.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Log-gamma on the right half plane, analytic (no branch jumps along
/// vertical lines), via the Lanczos approximation.
fn ln_gamma_complex(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0);
    let zm = z - 1.0;
    let mut series = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (zm + i as f64);
    }
    let t = zm + 7.5;
    0.5 * (2.0 * PI).ln() + (zm + 0.5) * t.ln() - t + series.ln()
}

/// Real log-gamma for x > 0 (used for log-binomials at large N).
pub fn ln_gamma_real(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma_real needs x > 0, got {x}");
    ln_gamma_complex(Complex64::new(x, 0.0)).re
}

/// Continuous argument of Gamma(1/2 + i xi), in radians.
///
/// The imaginary part of the Lanczos log-gamma is the analytically
/// continued argument accumulated from xi = 0 (where it vanishes), not the
/// pointwise principal value, so no 2 pi unwrapping is needed downstream.
pub fn arg_gamma_half_plus_i(xi: f64) -> f64 {
    if xi == 0.0 {
        return 0.0;
    }
    ln_gamma_complex(Complex64::new(0.5, xi)).im
}

/// Digamma on the right half plane: recurrence lift plus the asymptotic
/// Bernoulli series.
pub fn digamma_complex(z: Complex64) -> Complex64 {
    assert!(z.re > 0.0, "digamma_complex needs Re z > 0");
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 12.0 {
        shift -= 1.0 / w;
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    // psi(w) ~ ln w - 1/(2w) - sum B_{2n} / (2n w^{2n})
    let series = inv2
        * (1.0 / 12.0 + inv2 * (-1.0 / 120.0 + inv2 * (1.0 / 252.0 + inv2 * (-1.0 / 240.0))));
    shift + w.ln() - 0.5 * inv - series
}

/// The derivative dS_phi/dS_eps evaluated at xi = |S_eps|:
/// -ln(xi) + Re psi(1/2 + i xi), with the asymptotic digamma form taking
/// over for xi > 3.
pub fn dsphi_dseps(xi: f64) -> Result<f64, SpecfunError> {
    if !(xi > 0.0) {
        return Err(SpecfunError::Domain(format!("dsphi_dseps needs xi > 0, got {xi}")));
    }
    if xi <= 3.0 {
        let psi = digamma_complex(Complex64::new(0.5, xi));
        Ok(-xi.ln() + psi.re)
    } else {
        // psi(t) ~ ln t - 1/(2t) - 1/(12 t^2) + 1/(120 t^4) - 1/(252 t^6)
        // at t = 1/2 + i xi; the leading log combines with -ln xi into a
        // cancellation-free log1p. Truncation error is ~1e-7 at the switch.
        let x2 = xi * xi;
        let t = Complex64::new(0.5, xi);
        let t2 = t * t;
        let t4 = t2 * t2;
        let tail = -(0.5 * t.inv()).re - (t2.inv() / 12.0).re + (t4.inv() / 120.0).re
            - ((t4 * t2).inv() / 252.0).re;
        Ok(0.5 * (1.0 / (4.0 * x2)).ln_1p() + tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad_adaptive;

    #[test]
    fn arg_gamma_vanishes_at_zero() {
        assert_eq!(arg_gamma_half_plus_i(0.0), 0.0);
    }

    #[test]
    fn arg_gamma_conjugate_symmetry() {
        let xi = 1.7;
        let plus = arg_gamma_half_plus_i(xi);
        let minus = arg_gamma_half_plus_i(-xi);
        assert!((plus + minus).abs() < 1e-12, "{plus} vs {minus}");
    }

    #[test]
    fn arg_gamma_matches_accumulated_derivative() {
        // d/dxi arg Gamma(1/2 + i xi) = Re psi(1/2 + i xi); integrate from 0.
        let xi = 5.0;
        let accumulated = quad_adaptive(
            |t| digamma_complex(Complex64::new(0.5, t)).re,
            0.0,
            xi,
            1e-11,
        )
        .unwrap();
        let direct = arg_gamma_half_plus_i(xi);
        assert!((accumulated - direct).abs() < 1e-9, "{accumulated} vs {direct}");
    }

    #[test]
    fn ln_gamma_real_factorials() {
        for n in 1..12u32 {
            let expect: f64 = (1..n).map(|k| (k as f64).ln()).sum();
            assert!((ln_gamma_real(n as f64) - expect).abs() < 1e-11);
        }
    }

    #[test]
    fn digamma_real_axis_reference() {
        // psi(1) = -gamma (Euler-Mascheroni)
        let gamma = 0.577_215_664_901_532_9;
        let v = digamma_complex(Complex64::new(1.0, 0.0)).re;
        assert!((v + gamma).abs() < 1e-12);
        // psi(1/2) = -gamma - 2 ln 2
        let v = digamma_complex(Complex64::new(0.5, 0.0)).re;
        assert!((v + gamma + 2.0 * 2.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn dsphi_small_beyond_two() {
        // Exact value is -0.010960...; "order 0.01" at xi = 2, shrinking as
        // 1/xi^2 beyond.
        let v = dsphi_dseps(2.0).unwrap();
        assert!(v.abs() < 0.012, "dsphi(2) = {v}");
        assert!((v + 0.010_960_481_210_521).abs() < 1e-12, "dsphi(2) = {v}");
    }

    #[test]
    fn dsphi_decays_inverse_square() {
        let r = dsphi_dseps(10.0).unwrap() / dsphi_dseps(20.0).unwrap();
        assert!((r - 4.0).abs() < 0.3, "ratio = {r}");
    }

    #[test]
    fn dsphi_continuous_at_switch() {
        // The truncated psi expansion carries an O(1e-4) absolute offset at
        // xi = 3, so the switch is continuous in absolute terms even though
        // the function itself is only ~5e-3 there.
        let below = dsphi_dseps(3.0 - 1e-9).unwrap();
        let above = dsphi_dseps(3.0 + 1e-9).unwrap();
        assert!((below - above).abs() < 2e-4, "{below} vs {above}");
    }

    #[test]
    fn dsphi_matches_finite_difference_of_arg_gamma() {
        // S_phi(x) = arg Gamma(1/2 + i x) - x ln|x| + x; central difference
        // at x = 5 against the closed-form derivative.
        let sphi = |x: f64| arg_gamma_half_plus_i(x) - x * x.abs().ln() + x;
        let h = 1e-5;
        let fd = (sphi(5.0 + h) - sphi(5.0 - h)) / (2.0 * h);
        let v = dsphi_dseps(5.0).unwrap();
        assert!((fd - v).abs() < 1e-4, "{fd} vs {v}");
    }

    #[test]
    fn rejects_nonpositive_xi() {
        assert!(dsphi_dseps(0.0).is_err());
        assert!(dsphi_dseps(-1.0).is_err());
    }
}
