use super::{NumericsError, TimeSeries};

/// Frequency (Hz) of the largest nonzero-frequency power-spectrum peak.
///
/// The mean is subtracted first; the plain DFT is adequate at the series
/// lengths this crate works with, and the result is quantized to the
/// spectral resolution 1/(n dt).
pub fn dominant_frequency(series: &TimeSeries) -> Result<f64, NumericsError> {
    let n = series.samples.len();
    if n < 16 {
        return Err(NumericsError::InvalidInput(format!(
            "need at least 16 samples, got {n}"
        )));
    }
    let mean = series.samples.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = series.samples.iter().map(|s| s - mean).collect();

    let scale = series
        .samples
        .iter()
        .fold(0.0_f64, |acc, s| acc.max(s.abs()))
        .max(1e-300);
    if x.iter().all(|v| v.abs() < 1e-12 * scale) {
        return Err(NumericsError::NoPeak);
    }

    let mut best_k = 0;
    let mut best_power = 0.0;
    let w = -2.0 * std::f64::consts::PI / n as f64;
    for k in 1..=n / 2 {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, v) in x.iter().enumerate() {
            let phi = w * (k * j % n) as f64;
            re += v * phi.cos();
            im += v * phi.sin();
        }
        let p = re * re + im * im;
        if p > best_power {
            best_power = p;
            best_k = k;
        }
    }
    if best_k == 0 {
        return Err(NumericsError::NoPeak);
    }
    Ok(best_k as f64 / (n as f64 * series.dt))
}
