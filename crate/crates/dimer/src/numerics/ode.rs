use super::NumericsError;

/// Uniformly sampled vector-valued trajectory from [`integrate_ode`].
#[derive(Debug, Clone)]
pub struct StateTrajectory {
    pub t0: f64,
    pub dt: f64,
    pub states: Vec<Vec<f64>>,
}

impl StateTrajectory {
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + self.dt * i as f64
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory never empty")
    }

    /// Extract one component as a scalar series.
    pub fn component(&self, idx: usize) -> super::TimeSeries {
        super::TimeSeries {
            t0: self.t0,
            dt: self.dt,
            samples: self.states.iter().map(|s| s[idx]).collect(),
        }
    }
}

/// Classical fixed-step fourth-order Runge-Kutta from t = 0 to `t_end`.
///
/// The trajectory includes the initial state; the final recorded time is
/// within one `dt` of `t_end`.
pub fn integrate_ode<F>(
    rhs: F,
    y0: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<StateTrajectory, NumericsError>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(NumericsError::InvalidInput(format!(
            "need positive dt and t_end, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let steps = (t_end / dt).round().max(1.0) as usize;
    let n = y0.len();
    let mut states = Vec::with_capacity(steps + 1);
    states.push(y0.to_vec());
    let mut y = y0.to_vec();

    for step in 0..steps {
        let t = step as f64 * dt;
        let k1 = rhs(t, &y);
        let y2: Vec<f64> = (0..n).map(|i| y[i] + 0.5 * dt * k1[i]).collect();
        let k2 = rhs(t + 0.5 * dt, &y2);
        let y3: Vec<f64> = (0..n).map(|i| y[i] + 0.5 * dt * k2[i]).collect();
        let k3 = rhs(t + 0.5 * dt, &y3);
        let y4: Vec<f64> = (0..n).map(|i| y[i] + dt * k3[i]).collect();
        let k4 = rhs(t + dt, &y4);
        for i in 0..n {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(NumericsError::Divergence { t: t + dt });
        }
        states.push(y.clone());
    }

    Ok(StateTrajectory {
        t0: 0.0,
        dt,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let traj = integrate_ode(|_, y| vec![-y[0]], &[1.0], 1.0, 1e-3).unwrap();
        assert!((traj.last()[0] - (-1.0_f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn global_error_scales_as_dt4() {
        let err = |dt: f64| {
            let traj = integrate_ode(|_, y| vec![-y[0]], &[1.0], 1.0, dt).unwrap();
            (traj.last()[0] - (-1.0_f64).exp()).abs()
        };
        let ratio = err(2e-3) / err(1e-3);
        assert!((10.0..22.0).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn rotation_preserves_norm() {
        let omega = 3.0;
        let traj = integrate_ode(
            |_, y| vec![-omega * y[1], omega * y[0]],
            &[1.0, 0.0],
            2.0,
            1e-3,
        )
        .unwrap();
        let last = traj.last();
        let norm = (last[0] * last[0] + last[1] * last[1]).sqrt();
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn divergence_reports_time() {
        let res = integrate_ode(|_, y| vec![y[0] * y[0]], &[1.0], 10.0, 0.05);
        assert!(matches!(res, Err(NumericsError::Divergence { .. })));
    }
}
