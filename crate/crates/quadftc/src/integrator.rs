//! Fixed-step classical 4th-order Runge-Kutta stepping.

use serde::{Deserialize, Serialize};

use crate::dynamics::SimState;
use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    /// Step size (s).
    pub dt: f64,
    /// Simulation horizon (s).
    pub t_end: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 0.001,
            t_end: 10.0,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 || self.dt > 0.01 {
            return Err(Error::config("integrator.dt", "must lie in (0, 0.01]"));
        }
        if !self.t_end.is_finite() || self.t_end <= 0.0 {
            return Err(Error::config("integrator.t_end", "must be positive"));
        }
        let steps = self.t_end / self.dt;
        if (steps - steps.round()).abs() > 1e-6 {
            return Err(Error::config(
                "integrator.t_end",
                "t_end must be a whole number of steps",
            ));
        }
        Ok(())
    }

    /// Number of integration steps over the horizon.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// One classical RK4 step of the 12-state model.
pub fn rk4_step<F>(derivative: F, state: &SimState, t: f64, dt: f64) -> Result<SimState>
where
    F: Fn(f64, &SimState) -> Result<[f64; 12]>,
{
    debug_assert!(dt > 0.0);
    let y = state.to_array();

    let k1 = derivative(t, state)?;
    let k2 = derivative(t + dt / 2.0, &SimState::from_array(add_scaled(&y, &k1, dt / 2.0)))?;
    let k3 = derivative(t + dt / 2.0, &SimState::from_array(add_scaled(&y, &k2, dt / 2.0)))?;
    let k4 = derivative(t + dt, &SimState::from_array(add_scaled(&y, &k3, dt)))?;

    let mut out = [0.0; 12];
    for i in 0..12 {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if !out[i].is_finite() {
            return Err(Error::Diverged { t });
        }
    }
    Ok(SimState::from_array(out))
}

fn add_scaled(y: &[f64; 12], k: &[f64; 12], h: f64) -> [f64; 12] {
    let mut out = [0.0; 12];
    for i in 0..12 {
        out[i] = y[i] + h * k[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_derivative_leaves_state_unchanged() {
        let s = SimState::from_array([1.0; 12]);
        let out = rk4_step(|_, _| Ok([0.0; 12]), &s, 0.0, 0.1).unwrap();
        assert_eq!(out, s);
    }

    // Scalar test system y' = -y carried in the first state slot.
    fn decay(_t: f64, s: &SimState) -> Result<[f64; 12]> {
        let mut d = [0.0; 12];
        d[0] = -s.x;
        Ok(d)
    }

    #[test]
    fn exponential_decay_single_step() {
        let mut s = SimState::default();
        s.x = 1.0;
        let out = rk4_step(decay, &s, 0.0, 0.1).unwrap();
        assert_relative_eq!(out.x, (-0.1f64).exp(), epsilon = 1e-7);
        assert_relative_eq!(out.x, 0.9048374, epsilon = 1e-7);
    }

    fn global_error_at_one(dt: f64) -> f64 {
        let mut s = SimState::default();
        s.x = 1.0;
        let n = (1.0 / dt).round() as usize;
        let mut t = 0.0;
        for _ in 0..n {
            s = rk4_step(decay, &s, t, dt).unwrap();
            t += dt;
        }
        (s.x - (-1.0f64).exp()).abs()
    }

    #[test]
    fn order_four_convergence() {
        for dt in [0.01, 0.005] {
            let ratio = global_error_at_one(dt) / global_error_at_one(dt / 2.0);
            assert!(
                (14.0..=18.0).contains(&ratio),
                "convergence ratio {ratio} out of range at dt={dt}"
            );
        }
    }

    #[test]
    fn non_finite_intermediate_reports_divergence() {
        let s = SimState::default();
        let res = rk4_step(|_, _| Ok([f64::INFINITY; 12]), &s, 2.5, 0.1);
        assert!(matches!(res, Err(Error::Diverged { t }) if t == 2.5));
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::default().validate().is_ok());
        assert_eq!(IntegratorConfig::default().steps(), 10000);
        let bad = IntegratorConfig {
            dt: -1.0,
            t_end: 10.0,
        };
        let err = bad.validate().unwrap_err();
        assert!(err.to_string().contains("integrator.dt"));
        let coarse = IntegratorConfig {
            dt: 0.02,
            t_end: 10.0,
        };
        assert!(coarse.validate().is_err());
    }
}
