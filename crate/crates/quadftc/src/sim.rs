//! Closed-loop scenario execution: reference -> controller -> allocation ->
//! fault -> plant, one telemetry record per integration step.

use crate::allocation::{Allocator, EffectivenessVector};
use crate::controller::{control, sliding_surfaces, ControllerState};
use crate::dynamics::{
    apply_fault, rotor_relative_speed, state_derivative, EULER_GUARD,
};
use crate::error::Error;
use crate::integrator::rk4_step;
use crate::model::mix;
use crate::scenario::ScenarioConfig;
use crate::telemetry::TelemetryRecord;
use crate::Result;

/// Runs the full closed loop for the configured horizon.
///
/// Returns `steps + 1` records (including t = 0 and t = t_end). The loop is
/// pure f64 arithmetic with no hidden state, so identical configs produce
/// bit-identical telemetry.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<TelemetryRecord>> {
    cfg.validate()?;

    let p = cfg.params;
    let dt = cfg.integrator.dt;
    let steps = cfg.integrator.steps();
    let schedule = cfg.faults.schedule();
    let allocator = Allocator::new(&p)?;

    let mut state = cfg.initial_state;
    let mut ctrl = ControllerState::default();
    let mut records = Vec::with_capacity(steps + 1);

    for i in 0..=steps {
        let t = i as f64 * dt;
        let refs = cfg.references.refs_at(t);
        let surfaces = sliding_surfaces(&state, &refs, &cfg.gains);
        let wrench_cmd = control(&state, &refs, &cfg.gains, cfg.mode, &mut ctrl, dt, &p)?;

        // LE is taken as measurable; the allocator sees a fault only after
        // the configured detection delay.
        let mut k = [1.0; 4];
        for (rotor, kv) in k.iter_mut().enumerate() {
            *kv = 1.0 - schedule.active_loss(rotor + 1, t - cfg.faults.detection_delay);
        }
        let effectiveness = EffectivenessVector::new(k)?;

        let (commanded, clamped) = allocator.allocate(&wrench_cmd, &effectiveness)?;
        let actual = apply_fault(&commanded, &schedule, t);
        let wrench_act = mix(actual.squared(), &p)?;
        let omega_r = rotor_relative_speed(&actual);

        records.push(TelemetryRecord {
            t,
            state,
            u: [wrench_cmd.u1, wrench_cmd.u2, wrench_cmd.u3, wrench_cmd.u4],
            w_cmd: commanded.0,
            w_act: actual.0,
            s: surfaces,
            k,
            clamped,
        });

        if i < steps {
            // Wrench and gyroscopic speed are held across the RK4 substages.
            state = rk4_step(
                |_, s| state_derivative(s, &wrench_act, omega_r, &p),
                &state,
                t,
                dt,
            )?;
            if !state.is_finite() {
                return Err(Error::Diverged { t: t + dt });
            }
            let half_pi = std::f64::consts::FRAC_PI_2;
            if state.phi.abs() >= half_pi - EULER_GUARD
                || state.theta.abs() >= half_pi - EULER_GUARD
            {
                return Err(Error::Singularity);
            }
        }
    }

    Ok(records)
}
