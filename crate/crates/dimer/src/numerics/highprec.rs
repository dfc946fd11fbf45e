//! Extended-precision Sturm bisection for the top of a tridiagonal spectrum.
//!
//! The gap between the two highest eigenvalues of the dimer Hamiltonian can
//! be dozens of orders of magnitude below the matrix norm, far beyond what
//! any f64 eigensolver can resolve. Sturm counts evaluated in 320-bit
//! arithmetic recover the pair and their difference to full f64 accuracy.

use super::{NumericsError, TridiagonalSymmetric};
use astro_float::{BigFloat, RoundingMode};

const PREC: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;
// Bisect until the bracket is this many binary orders below the matrix scale.
const TARGET_BITS: i32 = 220;

fn bf(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PREC)
}

fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let words = x.mantissa_digits().expect("finite value");
    let e = x.exponent().expect("finite value");
    let nw = words.len();
    // Assemble the top 128 mantissa bits (MSB-normalized), then round to the
    // nearest 53-bit significand before scaling; a plain `u64 as f64` cast
    // would round each word independently and lose up to an ulp.
    let top = words[nw - 1] as u128;
    let next = if nw >= 2 { words[nw - 2] as u128 } else { 0 };
    let m = (top << 64) | next;
    let m54 = (m >> 74) as u64;
    let m53 = (m54 >> 1) + (m54 & 1);
    let v = m53 as f64 * 2f64.powi(e - 53);
    if x.is_negative() {
        -v
    } else {
        v
    }
}

/// Number of eigenvalues strictly below `x`, by the classic LDL^T sign count.
fn count_below(diag: &[BigFloat], off_sq: &[BigFloat], x: &BigFloat) -> usize {
    let tiny = bf(f64::MIN_POSITIVE);
    let mut count = 0;
    let mut q = bf(1.0);
    for i in 0..diag.len() {
        let mut next = diag[i].sub(x, PREC, RM);
        if i > 0 {
            let t = off_sq[i - 1].div(&q, PREC, RM);
            next = next.sub(&t, PREC, RM);
        }
        // A zero pivot sits exactly on an eigenvalue boundary; nudging it to
        // +tiny keeps the count strict without special-casing (astro-float
        // can produce a negative zero, which must not be counted).
        if next.is_zero() {
            next = tiny.clone();
        } else if next.is_negative() {
            count += 1;
        }
        q = next;
    }
    count
}

/// Bisect for the k-th (0-based, ascending) eigenvalue within [lo, hi].
fn bisect_eigenvalue(
    diag: &[BigFloat],
    off_sq: &[BigFloat],
    k: usize,
    mut lo: BigFloat,
    mut hi: BigFloat,
    scale_exp: i32,
) -> BigFloat {
    let half = bf(0.5);
    for _ in 0..(TARGET_BITS as usize + 80) {
        let mid = lo.add(&hi, PREC, RM).mul(&half, PREC, RM);
        if count_below(diag, off_sq, &mid) >= k + 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        let width = hi.sub(&lo, PREC, RM);
        match width.exponent() {
            Some(e) if e > scale_exp - TARGET_BITS => {}
            _ => break,
        }
    }
    lo.add(&hi, PREC, RM).mul(&half, PREC, RM)
}

/// The two largest eigenvalues and their gap, all accurate as f64 values.
///
/// Returns `(second, top, gap)` with `gap = top - second` evaluated in
/// extended precision before rounding, so it is meaningful even when it is
/// ~1e-40 of the matrix norm.
pub fn top_two_eigenvalues_hp(
    m: &TridiagonalSymmetric,
) -> Result<(f64, f64, f64), NumericsError> {
    let n = m.dim();
    if n < 2 {
        return Err(NumericsError::InvalidInput(
            "top pair requires dimension >= 2".into(),
        ));
    }

    // Gershgorin bounds, padded.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += m.offdiag()[i - 1].abs();
        }
        if i + 1 < n {
            r += m.offdiag()[i].abs();
        }
        lo = lo.min(m.diag()[i] - r);
        hi = hi.max(m.diag()[i] + r);
    }
    let pad = 1e-6 * (hi - lo).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);
    let scale = hi.abs().max(lo.abs()).max(1.0);
    let scale_exp = scale.log2().ceil() as i32;

    let diag: Vec<BigFloat> = m.diag().iter().map(|&d| bf(d)).collect();
    let off_sq: Vec<BigFloat> = m
        .offdiag()
        .iter()
        .map(|&e| {
            let b = bf(e);
            b.mul(&b, PREC, RM)
        })
        .collect();

    let top = bisect_eigenvalue(&diag, &off_sq, n - 1, bf(lo), bf(hi), scale_exp);
    let second = bisect_eigenvalue(&diag, &off_sq, n - 2, bf(lo), top.clone(), scale_exp);
    let gap = top.sub(&second, PREC, RM);

    Ok((bf_to_f64(&second), bf_to_f64(&top), bf_to_f64(&gap)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_plain_pair() {
        let m = TridiagonalSymmetric::new(vec![0.0, 0.0], vec![-1.0]).unwrap();
        let (second, top, gap) = top_two_eigenvalues_hp(&m).unwrap();
        assert!((second + 1.0).abs() < 1e-15, "second = {second:e}");
        assert!((top - 1.0).abs() < 1e-15, "top = {top:e}");
        assert!((gap - 2.0).abs() < 1e-15, "gap = {gap:e}");
    }

    #[test]
    fn resolves_gap_below_f64_resolution() {
        // A weakly coupled 2x2 block with eigenvalues exactly +-1e-30 next to
        // a decoupled level at -10: the gap is 2e-31 of the matrix norm, far
        // below what subtracting f64 eigenvalues (error ~ eps * norm) could
        // ever resolve.
        let eps_c = 1.0e-30;
        let m = TridiagonalSymmetric::new(vec![0.0, 0.0, -10.0], vec![eps_c, 0.0]).unwrap();
        let (second, top, gap) = top_two_eigenvalues_hp(&m).unwrap();
        assert!((second + eps_c).abs() < 1e-45, "second = {second:e}");
        assert!((top - eps_c).abs() < 1e-45, "top = {top:e}");
        assert!((gap - 2.0 * eps_c).abs() < 1e-45, "gap = {gap:e}");
    }

    #[test]
    fn agrees_with_ql_on_resolvable_spectrum() {
        let diag: Vec<f64> = (0..9).map(|i| (i as f64) * 0.7 - 2.0).collect();
        let off: Vec<f64> = (0..8).map(|i| 0.3 + 0.1 * i as f64).collect();
        let m = TridiagonalSymmetric::new(diag, off).unwrap();
        let d = super::super::eigh_tridiagonal(&m).unwrap();
        let (second, top, gap) = top_two_eigenvalues_hp(&m).unwrap();
        assert!((top - d.eigenvalues[8]).abs() < 1e-12);
        assert!((second - d.eigenvalues[7]).abs() < 1e-12);
        assert!((gap - (d.eigenvalues[8] - d.eigenvalues[7])).abs() < 1e-12);
    }
}

