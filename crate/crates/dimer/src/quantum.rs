//! Exact quantum layer: the two-site Bose-Hubbard Hamiltonian in the Fock
//! basis, atomic coherent states, Husimi distributions, spectral time
//! evolution, and tunneling-frequency extraction.
//!
//! Basis convention: index n1 = 0..=N counts particles in well 1, so the
//! reflection n1 <-> N - n1 exchanges the wells. Energies are angular
//! frequencies (rad/s); physical frequencies are dE / 2 pi.

use crate::meanfield::{DimerParams, MeanfieldError, PhaseSpacePoint};
use crate::numerics::{
    dominant_frequency, eigh_tridiagonal, top_two_eigenvalues_hp, NumericsError, TimeSeries,
    TridiagonalSymmetric,
};
use crate::specfun::ln_gamma_real;
use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum QuantumError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error(transparent)]
    Meanfield(#[from] MeanfieldError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A pure state of the N-particle dimer in the Fock basis of well 1.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Wrap amplitudes for N particles; the vector must have length N+1 and
    /// unit norm to 1e-12.
    pub fn new(n: usize, amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        if amplitudes.len() != n + 1 {
            return Err(QuantumError::Shape(format!(
                "expected {} amplitudes for N = {n}, got {}",
                n + 1,
                amplitudes.len()
            )));
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(QuantumError::State(format!(
                "state norm^2 = {norm2}, expected 1 to 1e-12"
            )));
        }
        Ok(Self { n, amplitudes })
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Expectation value of the well-1 number operator.
    pub fn expected_n1(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n1, a)| n1 as f64 * a.norm_sqr())
            .sum()
    }
}

/// Eigen-decomposition of the dimer Hamiltonian with parity-purified
/// eigenvectors (each is exactly symmetric or antisymmetric under well
/// exchange, even inside near-degenerate doublets).
#[derive(Debug, Clone)]
pub struct Spectrum {
    params: DimerParams,
    /// Ascending eigenvalues, angular units (rad/s).
    energies: Vec<f64>,
    /// Orthonormal eigenvectors, `states[j]` belonging to `energies[j]`.
    states: Vec<Vec<f64>>,
}

impl Spectrum {
    pub fn params(&self) -> &DimerParams {
        &self.params
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }
}

/// Husimi quasiprobability Q(z, phi) = |<z, phi | psi>|^2 on a product grid.
#[derive(Debug, Clone)]
pub struct HusimiGrid {
    pub z_axis: Vec<f64>,
    pub phi_axis: Vec<f64>,
    /// `q[i][j]` is Q(z_axis[i], phi_axis[j]), each in [0, 1].
    pub q: Vec<Vec<f64>>,
}

impl HusimiGrid {
    /// Grid coordinates of the maximum of Q.
    pub fn argmax(&self) -> (f64, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for (i, row) in self.q.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        (self.z_axis[best.0], self.phi_axis[best.1])
    }
}

/// Bose-Hubbard dimer Hamiltonian in the Fock basis: tridiagonal with
/// diag[n1] = (U/2)[n1(n1-1) + (N-n1)(N-n1-1)] and
/// offdiag[n1] = -J sqrt((n1+1)(N-n1)).
pub fn build_hamiltonian(params: &DimerParams) -> TridiagonalSymmetric {
    let n = params.particles();
    let (j, u) = (params.hopping(), params.interaction());
    let diag: Vec<f64> = (0..=n)
        .map(|n1| {
            let n1 = n1 as f64;
            let n2 = n as f64 - n1;
            0.5 * u * (n1 * (n1 - 1.0) + n2 * (n2 - 1.0))
        })
        .collect();
    let offdiag: Vec<f64> = (0..n)
        .map(|n1| -j * (((n1 + 1) * (n - n1)) as f64).sqrt())
        .collect();
    TridiagonalSymmetric::new(diag, offdiag).expect("dimer Hamiltonian is well-formed")
}

/// Fold the reflection-symmetric tridiagonal Hamiltonian into its symmetric
/// and antisymmetric parity sectors (basis (e_i +- e_{m-1-i})/sqrt(2), plus
/// the center element for odd dimension in the symmetric sector).
fn parity_sectors(h: &TridiagonalSymmetric) -> (TridiagonalSymmetric, TridiagonalSymmetric) {
    let m = h.dim();
    let d = h.diag();
    let o = h.offdiag();
    if m % 2 == 0 {
        let half = m / 2;
        let mut ds: Vec<f64> = d[..half].to_vec();
        let mut da = ds.clone();
        // The fold couples the two middle sites directly.
        ds[half - 1] += o[half - 1];
        da[half - 1] -= o[half - 1];
        let off = o[..half - 1].to_vec();
        (
            TridiagonalSymmetric::new(ds, off.clone()).expect("valid sector"),
            TridiagonalSymmetric::new(da, off).expect("valid sector"),
        )
    } else {
        let c = (m - 1) / 2;
        let ds: Vec<f64> = d[..=c].to_vec();
        let mut os: Vec<f64> = o[..c].to_vec();
        // Coupling of the paired site into the unpaired center picks up sqrt(2).
        os[c - 1] *= 2.0_f64.sqrt();
        let da: Vec<f64> = d[..c].to_vec();
        let oa: Vec<f64> = o[..c - 1].to_vec();
        (
            TridiagonalSymmetric::new(ds, os).expect("valid sector"),
            TridiagonalSymmetric::new(da, oa).expect("valid sector"),
        )
    }
}

/// Unfold a sector eigenvector back to the full Fock basis.
fn unfold(w: &[f64], m: usize, symmetric: bool) -> Vec<f64> {
    let mut v = vec![0.0; m];
    let inv = 1.0 / 2.0_f64.sqrt();
    let paired = m / 2;
    for i in 0..paired.min(w.len()) {
        v[i] = w[i] * inv;
        v[m - 1 - i] = if symmetric { w[i] * inv } else { -w[i] * inv };
    }
    if symmetric && m % 2 == 1 {
        v[(m - 1) / 2] = w[w.len() - 1];
    }
    v
}

/// Full eigen-decomposition of the dimer Hamiltonian. Eigenvectors come from
/// independent diagonalization of the two parity sectors, so each is an exact
/// parity eigenstate even inside exponentially narrow doublets.
pub fn spectrum(params: &DimerParams) -> Result<Spectrum, QuantumError> {
    let h = build_hamiltonian(params);
    let m = h.dim();
    let (hs, ha) = parity_sectors(&h);
    let ds = eigh_tridiagonal(&hs)?;
    let da = eigh_tridiagonal(&ha)?;

    let mut merged: Vec<(f64, Vec<f64>)> = Vec::with_capacity(m);
    for (e, w) in ds.eigenvalues.iter().zip(&ds.eigenvectors) {
        merged.push((*e, unfold(w, m, true)));
    }
    for (e, w) in da.eigenvalues.iter().zip(&da.eigenvectors) {
        merged.push((*e, unfold(w, m, false)));
    }
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (energies, states) = merged.into_iter().unzip();
    Ok(Spectrum {
        params: *params,
        energies,
        states,
    })
}

/// Gap between the two highest eigenvalues, resolved in extended precision:
/// meaningful even when it falls dozens of orders of magnitude below the
/// spectral norm. Angular units (rad/s).
pub fn exact_splitting(params: &DimerParams) -> Result<f64, QuantumError> {
    let h = build_hamiltonian(params);
    let (_, _, gap) = top_two_eigenvalues_hp(&h)?;
    Ok(gap)
}

/// Two highest eigenvalues `(second, top)` in extended precision.
pub fn top_pair(params: &DimerParams) -> Result<(f64, f64), QuantumError> {
    let h = build_hamiltonian(params);
    let (second, top, _) = top_two_eigenvalues_hp(&h)?;
    Ok((second, top))
}

/// Atomic coherent state |z, phi>: amplitudes
/// c_{n1} = sqrt(C(N,n1)) ((1+z)/2)^{n1/2} ((1-z)/2)^{(N-n1)/2} e^{i phi (N-n1)},
/// evaluated in log space so N = 500 does not underflow.
pub fn coherent_state(
    params: &DimerParams,
    p: PhaseSpacePoint,
) -> Result<QuantumState, QuantumError> {
    let n = params.particles();
    let (z, phi) = (p.z, p.phi);
    if z.abs() > 1.0 {
        return Err(QuantumError::State(format!("|z| must be <= 1, got {z}")));
    }
    let lp = 0.5 * (1.0 + z);
    let lm = 0.5 * (1.0 - z);
    let ln_n_fact = ln_gamma_real(n as f64 + 1.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); n + 1];
    for (n1, amp) in amps.iter_mut().enumerate() {
        let n2 = n - n1;
        // Poles of the log terms only occur with weight zero; the amplitude
        // is then exactly 0 (or 1 at the matching pole).
        if (lp == 0.0 && n1 > 0) || (lm == 0.0 && n2 > 0) {
            continue;
        }
        let mut ln_mag = 0.5
            * (ln_n_fact
                - ln_gamma_real(n1 as f64 + 1.0)
                - ln_gamma_real(n2 as f64 + 1.0));
        if n1 > 0 {
            ln_mag += 0.5 * n1 as f64 * lp.ln();
        }
        if n2 > 0 {
            ln_mag += 0.5 * n2 as f64 * lm.ln();
        }
        let phase = phi * n2 as f64;
        *amp = Complex64::from_polar(ln_mag.exp(), phase);
    }
    // Renormalize away the accumulated log-space roundoff.
    let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let inv = 1.0 / norm2.sqrt();
    for a in &mut amps {
        *a *= inv;
    }
    QuantumState::new(n, amps)
}

/// Overlap <z, phi | psi>.
fn coherent_overlap(
    params: &DimerParams,
    p: PhaseSpacePoint,
    state: &QuantumState,
) -> Result<Complex64, QuantumError> {
    let cs = coherent_state(params, p)?;
    Ok(cs
        .amplitudes
        .iter()
        .zip(&state.amplitudes)
        .map(|(c, a)| c.conj() * a)
        .sum())
}

/// Husimi function of `state` on the product grid `z_axis` x `phi_axis`.
pub fn husimi(
    params: &DimerParams,
    state: &QuantumState,
    z_axis: &[f64],
    phi_axis: &[f64],
) -> Result<HusimiGrid, QuantumError> {
    if state.particles() != params.particles() {
        return Err(QuantumError::Shape(format!(
            "state has N = {}, params N = {}",
            state.particles(),
            params.particles()
        )));
    }
    let mut q = Vec::with_capacity(z_axis.len());
    for &z in z_axis {
        let mut row = Vec::with_capacity(phi_axis.len());
        for &phi in phi_axis {
            let ov = coherent_overlap(params, PhaseSpacePoint { z, phi }, state)?;
            row.push(ov.norm_sqr().min(1.0));
        }
        q.push(row);
    }
    Ok(HusimiGrid {
        z_axis: z_axis.to_vec(),
        phi_axis: phi_axis.to_vec(),
        q,
    })
}

/// Spectral time evolution: psi(t) = sum_j e^{-i E_j t} <E_j|psi0> |E_j>,
/// with `t` in seconds and energies in rad/s.
pub fn evolve(
    state: &QuantumState,
    spectrum: &Spectrum,
    t: f64,
) -> Result<QuantumState, QuantumError> {
    let dim = spectrum.energies.len();
    if state.amplitudes.len() != dim {
        return Err(QuantumError::Shape(format!(
            "state dimension {} does not match spectrum dimension {dim}",
            state.amplitudes.len()
        )));
    }
    // Project onto the eigenbasis, advance phases, and reassemble.
    let coeffs: Vec<Complex64> = spectrum
        .states
        .iter()
        .map(|v| {
            v.iter()
                .zip(&state.amplitudes)
                .map(|(&vi, a)| vi * a)
                .sum::<Complex64>()
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (j, v) in spectrum.states.iter().enumerate() {
        let rotated = coeffs[j] * Complex64::from_polar(1.0, -spectrum.energies[j] * t);
        for (o, &vi) in out.iter_mut().zip(v) {
            *o += rotated * vi;
        }
    }
    QuantumState::new(state.n, out)
}

/// Dominant frequency (Hz) of <n1>(t) for a state launched at `p0`,
/// sampled every `dt` seconds up to `t_end`.
pub fn tunneling_frequency_spectral(
    params: &DimerParams,
    p0: PhaseSpacePoint,
    t_end: f64,
    dt: f64,
) -> Result<f64, QuantumError> {
    if !(dt > 0.0) || !(t_end > dt) {
        return Err(QuantumError::Shape(format!(
            "need 0 < dt < t_end, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let spec = spectrum(params)?;
    let psi0 = coherent_state(params, p0)?;
    let steps = (t_end / dt).floor() as usize;
    let samples: Vec<f64> = (0..=steps)
        .map(|i| evolve(&psi0, &spec, i as f64 * dt).map(|s| s.expected_n1()))
        .collect::<Result<_, _>>()?;
    let series = TimeSeries::new(0.0, dt, samples)?;
    Ok(dominant_frequency(&series)?)
}

/// Sum of the `n_states` largest eigenstate weights |<E_j | z, phi>|^2.
pub fn top_weights(
    params: &DimerParams,
    p: PhaseSpacePoint,
    n_states: usize,
) -> Result<f64, QuantumError> {
    let dim = params.particles() + 1;
    if n_states > dim {
        return Err(QuantumError::Shape(format!(
            "n_states = {n_states} exceeds dimension {dim}"
        )));
    }
    let spec = spectrum(params)?;
    let cs = coherent_state(params, p)?;
    let mut weights: Vec<f64> = spec
        .states
        .iter()
        .map(|v| {
            v.iter()
                .zip(cs.amplitudes())
                .map(|(&vi, a)| vi * a)
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect();
    weights.sort_by(|a, b| b.total_cmp(a));
    Ok(weights.iter().take(n_states).sum::<f64>().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::self_trapping_z;
    use std::f64::consts::PI;

    fn params(j: f64, u: f64, n: usize) -> DimerParams {
        DimerParams::new(j, u, n).unwrap()
    }

    #[test]
    fn hamiltonian_anchors() {
        let h = build_hamiltonian(&params(1.0, 0.7, 1));
        assert_eq!(h.diag(), &[0.0, 0.0]);
        assert_eq!(h.offdiag(), &[-1.0]);

        let h = build_hamiltonian(&params(1.0, 1.0, 2));
        assert_eq!(h.diag(), &[1.0, 0.0, 1.0]);
        let s2 = 2.0_f64.sqrt();
        assert!((h.offdiag()[0] + s2).abs() < 1e-15);
        assert!((h.offdiag()[1] + s2).abs() < 1e-15);
    }

    #[test]
    fn splitting_sanity() {
        // Single particle: Rabi splitting 2J, exactly.
        let gap = exact_splitting(&params(3.0, 0.9, 1)).unwrap();
        assert_eq!(gap, 6.0);
        // Non-interacting ladder: equally spaced, gap 2J for any N.
        let gap = exact_splitting(&params(2.5, 0.0, 5)).unwrap();
        assert!((gap - 5.0).abs() < 1e-12);
    }

    #[test]
    fn splitting_monotone_in_lambda() {
        let n = 30;
        let mut last = f64::INFINITY;
        for i in 0..8 {
            let lambda = 1.2 + 0.25 * i as f64;
            let p = DimerParams::from_lambda(1.0, lambda, n).unwrap();
            let gap = exact_splitting(&p).unwrap();
            assert!(gap < last, "gap not decreasing at lambda = {lambda}");
            last = gap;
        }
    }

    #[test]
    fn near_degenerate_top_pair() {
        // Self-trapped regime: splitting tiny compared to the spectral width.
        let p = DimerParams::from_lambda(10.0, 1.1, 40).unwrap();
        let h = build_hamiltonian(&p);
        let d = eigh_tridiagonal(&h).unwrap();
        let width = d.eigenvalues[40] - d.eigenvalues[0];
        let mean_spacing = width / 40.0;
        let gap = d.eigenvalues[40] - d.eigenvalues[39];
        assert!(gap < 0.25 * mean_spacing, "gap = {gap}, mean spacing = {mean_spacing}");
    }

    #[test]
    fn coherent_state_anchors() {
        let p = params(1.0, 0.0, 2);
        let cs = coherent_state(&p, PhaseSpacePoint { z: 1.0, phi: 0.3 }).unwrap();
        assert!((cs.amplitudes()[2].norm() - 1.0).abs() < 1e-14);
        assert!(cs.amplitudes()[0].norm() < 1e-14);

        let cs = coherent_state(&p, PhaseSpacePoint { z: 0.0, phi: 0.0 }).unwrap();
        let expect = [0.5, 1.0 / 2.0_f64.sqrt(), 0.5];
        for (a, e) in cs.amplitudes().iter().zip(expect) {
            assert!((a.re - e).abs() < 1e-14 && a.im.abs() < 1e-14);
        }
    }

    #[test]
    fn coherent_state_mean_occupation() {
        let p = params(1.0, 0.0, 10);
        let cs = coherent_state(&p, PhaseSpacePoint { z: 0.6, phi: 1.1 }).unwrap();
        assert!((cs.expected_n1() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_survives_large_n() {
        let p = params(1.0, 0.001, 500);
        let cs = coherent_state(&p, PhaseSpacePoint { z: 0.4, phi: PI }).unwrap();
        let norm2: f64 = cs.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert!((norm2 - 1.0).abs() < 1e-12);
        assert!((cs.expected_n1() - 500.0 * 0.7).abs() < 1e-9);
    }

    #[test]
    fn husimi_self_overlap_and_pole() {
        let p = params(1.0, 0.1, 12);
        let at = PhaseSpacePoint { z: 0.35, phi: 2.0 };
        let cs = coherent_state(&p, at).unwrap();
        let grid = husimi(&p, &cs, &[0.35], &[2.0]).unwrap();
        assert!((grid.q[0][0] - 1.0).abs() < 1e-12);

        // Fock state |N, 0> has zero overlap with the opposite pole.
        let mut amps = vec![Complex64::new(0.0, 0.0); 13];
        amps[12] = Complex64::new(1.0, 0.0);
        let fock = QuantumState::new(12, amps).unwrap();
        let grid = husimi(&p, &fock, &[-1.0], &[0.0]).unwrap();
        assert!(grid.q[0][0] < 1e-30);
    }

    #[test]
    fn husimi_resolution_of_identity() {
        // (N+1)/(4 pi) * int Q dz dphi = 1 for any normalized state.
        let n = 10;
        let p = params(1.0, 0.3, n);
        let spec = spectrum(&p).unwrap();
        let state = QuantumState::new(
            n,
            spec.states()[3]
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
        )
        .unwrap();
        let nz = 81;
        let nphi = 81;
        let z_axis: Vec<f64> = (0..nz).map(|i| -1.0 + 2.0 * (i as f64 + 0.5) / nz as f64).collect();
        let phi_axis: Vec<f64> =
            (0..nphi).map(|i| 2.0 * PI * (i as f64 + 0.5) / nphi as f64).collect();
        let grid = husimi(&p, &state, &z_axis, &phi_axis).unwrap();
        let dz = 2.0 / nz as f64;
        let dphi = 2.0 * PI / nphi as f64;
        let total: f64 = grid.q.iter().flatten().sum::<f64>() * dz * dphi;
        let weighted = (n + 1) as f64 / (4.0 * PI) * total;
        assert!((weighted - 1.0).abs() < 0.01, "identity sum = {weighted}");
    }

    #[test]
    fn parity_of_eigenvectors() {
        for &(n, lambda) in &[(10usize, 1.5f64), (60, 1.1), (200, 2.5)] {
            let p = DimerParams::from_lambda(1.0, lambda, n).unwrap();
            let spec = spectrum(&p).unwrap();
            for v in spec.states() {
                let dim = v.len();
                let s: f64 = (0..dim).map(|i| (v[i] - v[dim - 1 - i]).abs()).sum();
                let a: f64 = (0..dim).map(|i| (v[i] + v[dim - 1 - i]).abs()).sum();
                assert!(s < 1e-10 || a < 1e-10, "not a parity eigenstate (N={n})");
            }
            // The top doublet holds one of each parity.
            let top = &spec.states()[n];
            let next = &spec.states()[n - 1];
            let sym = |v: &[f64]| -> bool {
                (0..v.len()).all(|i| (v[i] - v[v.len() - 1 - i]).abs() < 1e-10)
            };
            assert_ne!(sym(top), sym(next));
        }
    }

    #[test]
    fn evolve_identity_phase_and_norm() {
        let p = DimerParams::from_lambda(1.0, 1.4, 8).unwrap();
        let spec = spectrum(&p).unwrap();
        let psi = coherent_state(&p, PhaseSpacePoint { z: 0.5, phi: PI }).unwrap();

        let same = evolve(&psi, &spec, 0.0).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(same.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }

        // An eigenstate only acquires a global phase.
        let eig = QuantumState::new(
            8,
            spec.states()[2].iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
        .unwrap();
        let out = evolve(&eig, &spec, 0.77).unwrap();
        for (a, b) in eig.amplitudes().iter().zip(out.amplitudes()) {
            assert!((a.norm() - b.norm()).abs() < 1e-12);
        }

        let later = evolve(&psi, &spec, 3.21).unwrap();
        let norm2: f64 = later.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert!((norm2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_level_superposition_oscillates_at_gap() {
        let p = DimerParams::from_lambda(1.0, 1.3, 12).unwrap();
        let spec = spectrum(&p).unwrap();
        let dim = 13;
        let inv = 1.0 / 2.0_f64.sqrt();
        let amps: Vec<Complex64> = (0..dim)
            .map(|i| Complex64::new(inv * (spec.states()[12][i] + spec.states()[11][i]), 0.0))
            .collect();
        let psi = QuantumState::new(12, amps).unwrap();
        let gap = spec.energies()[12] - spec.energies()[11];
        // <n1>(t) = A + B cos(gap * t): check half/full period against t = 0.
        let n0 = psi.expected_n1();
        let half = evolve(&psi, &spec, PI / gap).unwrap().expected_n1();
        let full = evolve(&psi, &spec, 2.0 * PI / gap).unwrap().expected_n1();
        assert!((full - n0).abs() < 1e-8);
        assert!((half - n0).abs() > 1e-3, "expected oscillation, got flat <n1>");
    }

    #[test]
    fn spectral_frequency_single_particle() {
        // N = 1 Rabi: physical frequency J/pi Hz.
        let p = params(1.0, 0.0, 1);
        let f = tunneling_frequency_spectral(
            &p,
            PhaseSpacePoint { z: 1.0, phi: 0.0 },
            64.0,
            0.05,
        )
        .unwrap();
        assert!((f - 1.0 / PI).abs() < 0.02, "f = {f}");
    }

    #[test]
    fn spectral_frequency_free_ladder() {
        let p = params(1.0, 0.0, 5);
        let f = tunneling_frequency_spectral(
            &p,
            PhaseSpacePoint { z: 0.8, phi: 0.4 },
            64.0,
            0.05,
        )
        .unwrap();
        assert!((f - 1.0 / PI).abs() < 0.02, "f = {f}");
    }

    #[test]
    fn spectral_frequency_matches_exact_splitting() {
        let p = DimerParams::from_lambda(10.0, 1.1, 40).unwrap();
        let gap = exact_splitting(&p).unwrap();
        let f_expect = gap / (2.0 * PI);
        let t_end = 12.0 / f_expect;
        let dt = t_end / 4096.0;
        let z0 = self_trapping_z(p.lambda());
        let f = tunneling_frequency_spectral(&p, PhaseSpacePoint { z: z0, phi: PI }, t_end, dt)
            .unwrap();
        let resolution = 1.0 / t_end;
        assert!((f - f_expect).abs() < 1.5 * resolution, "f = {f}, expected {f_expect}");
    }

    #[test]
    fn top_weights_completeness_and_monotonicity() {
        let p = DimerParams::from_lambda(1.0, 1.2, 14).unwrap();
        let at = PhaseSpacePoint { z: self_trapping_z(1.2), phi: PI };
        let full = top_weights(&p, at, 15).unwrap();
        assert!((full - 1.0).abs() < 1e-10);
        let mut last = 0.0;
        for k in 1..=15 {
            let w = top_weights(&p, at, k).unwrap();
            assert!(w + 1e-12 >= last);
            last = w;
        }
        assert!(top_weights(&p, at, 16).is_err());
    }

    #[test]
    fn two_state_weight_decreases_with_n() {
        // Fixed (Lambda, U): more particles push weight out of the top doublet.
        let lambda = 1.025;
        let u = 2.0 * PI * 0.063;
        let mut last = f64::INFINITY;
        for &n in &[20usize, 60, 140] {
            let j = u * n as f64 / (2.0 * lambda);
            let p = DimerParams::new(j, u, n).unwrap();
            let at = PhaseSpacePoint { z: self_trapping_z(lambda), phi: PI };
            let w = top_weights(&p, at, 2).unwrap();
            assert!(w < last, "weight {w} not decreasing at N = {n}");
            last = w;
        }
    }
}
