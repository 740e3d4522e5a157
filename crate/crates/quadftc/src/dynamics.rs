//! Continuous-time state derivative of the 12-state rigid-body model and the
//! multiplicative actuator fault.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{ControlWrench, QuadrotorParams, RotorSpeeds};
use crate::Result;

/// Margin kept from the Euler singularity at |theta| = pi/2.
pub const EULER_GUARD: f64 = 1e-3;

/// 12-dimensional rigid-body state: position, Euler angles and their rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SimState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub xd: f64,
    pub yd: f64,
    pub zd: f64,
    pub phid: f64,
    pub thetad: f64,
    pub psid: f64,
}

impl SimState {
    pub fn to_array(&self) -> [f64; 12] {
        [
            self.x, self.y, self.z, self.phi, self.theta, self.psi, self.xd, self.yd, self.zd,
            self.phid, self.thetad, self.psid,
        ]
    }

    pub fn from_array(a: [f64; 12]) -> Self {
        SimState {
            x: a[0],
            y: a[1],
            z: a[2],
            phi: a[3],
            theta: a[4],
            psi: a[5],
            xd: a[6],
            yd: a[7],
            zd: a[8],
            phid: a[9],
            thetad: a[10],
            psid: a[11],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// One scheduled loss-of-effectiveness event: the rotor runs at
/// `(1 - loss) *` its commanded speed from `start` onward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultEntry {
    /// Rotor index, 1-4.
    pub rotor: usize,
    /// Start time (s).
    pub start: f64,
    /// Loss of effectiveness in [0, 1].
    pub loss: f64,
}

/// Set of scheduled actuator faults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct FaultSchedule {
    pub entries: Vec<FaultEntry>,
}

impl FaultSchedule {
    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.entries.iter().enumerate() {
            if e.rotor < 1 || e.rotor > 4 {
                return Err(Error::config(
                    &format!("faults.entries[{i}].rotor"),
                    "rotor index must be 1..=4",
                ));
            }
            if !e.start.is_finite() || e.start < 0.0 {
                return Err(Error::config(
                    &format!("faults.entries[{i}].start"),
                    "start time must be finite and non-negative",
                ));
            }
            if !e.loss.is_finite() || !(0.0..=1.0).contains(&e.loss) {
                return Err(Error::config(
                    &format!("faults.entries[{i}].loss"),
                    "loss of effectiveness must lie in [0, 1]",
                ));
            }
        }
        // An entry is active from its start onward, so a second entry for the
        // same rotor would overlap it.
        for i in 0..self.entries.len() {
            for j in (i + 1)..self.entries.len() {
                if self.entries[i].rotor == self.entries[j].rotor {
                    return Err(Error::config(
                        &format!("faults.entries[{j}].rotor"),
                        "at most one fault entry per rotor",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Active loss of effectiveness for `rotor` (1-4) at time `t`.
    pub fn active_loss(&self, rotor: usize, t: f64) -> f64 {
        self.entries
            .iter()
            .find(|e| e.rotor == rotor && t >= e.start)
            .map(|e| e.loss)
            .unwrap_or(0.0)
    }
}

/// Degrades commanded rotor speeds according to the active faults at time `t`.
pub fn apply_fault(commanded: &RotorSpeeds, schedule: &FaultSchedule, t: f64) -> RotorSpeeds {
    let mut out = commanded.0;
    for (i, w) in out.iter_mut().enumerate() {
        *w *= 1.0 - schedule.active_loss(i + 1, t);
    }
    RotorSpeeds(out)
}

/// Signed combination of actual rotor speeds entering the gyroscopic terms.
pub fn rotor_relative_speed(actual: &RotorSpeeds) -> f64 {
    -actual.0[0] + actual.0[1] - actual.0[2] + actual.0[3]
}

/// Evaluates the state derivative of the quadrotor model.
///
/// The angular accelerations keep the model's printed coefficient placement
/// (pitch gyroscopic term over `i_x`, yaw input gain `l / i_z`) rather than
/// silently normalizing them; the controller inverts the same expressions.
pub fn state_derivative(
    state: &SimState,
    wrench: &ControlWrench,
    omega_r: f64,
    p: &QuadrotorParams,
) -> Result<[f64; 12]> {
    if !state.is_finite() {
        return Err(Error::NonFinite("state"));
    }
    if !wrench.is_finite() || !omega_r.is_finite() {
        return Err(Error::NonFinite("wrench"));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    if state.theta.abs() >= half_pi - EULER_GUARD || state.phi.abs() >= half_pi - EULER_GUARD {
        return Err(Error::Singularity);
    }

    let (sp, cp) = state.phi.sin_cos();
    let (st, ct) = state.theta.sin_cos();
    let (ss, cs) = state.psi.sin_cos();

    let phidd = state.psid * state.thetad * (p.i_y - p.i_z) / p.i_x
        + state.thetad * omega_r * p.j_r / p.i_x
        + p.l / p.i_x * wrench.u2;
    let thetadd = state.psid * state.thetad * (p.i_z - p.i_x) / p.i_y
        + state.phid * omega_r * p.j_r / p.i_x
        + p.l / p.i_y * wrench.u3;
    let psidd =
        state.phid * state.thetad * (p.i_x - p.i_y) / p.i_z + p.l / p.i_z * wrench.u4;

    let xdd = (cp * st * cs + ss * sp) * wrench.u1 / p.m;
    let ydd = (cp * st * ss - cs * sp) * wrench.u1 / p.m;
    let zdd = (ct * cp) * wrench.u1 / p.m - p.g;

    Ok([
        state.xd,
        state.yd,
        state.zd,
        state.phid,
        state.thetad,
        state.psid,
        xdd,
        ydd,
        zdd,
        phidd,
        thetadd,
        psidd,
    ])
}
