//! Control allocation: wrench to rotor-speed commands, loss-of-effectiveness
//! estimation and effectiveness-weighted redistribution under faults.

use nalgebra::Matrix4;

use crate::error::Error;
use crate::model::{mixing_matrix, ControlWrench, QuadrotorParams, RotorSpeeds};
use crate::Result;

/// Condition-number bound above which the weighted mixing matrix is treated
/// as singular.
pub const COND_LIMIT: f64 = 1e8;

/// Rotors with effectiveness at or below this are considered unusable for
/// allocation purposes.
pub const MIN_USABLE_EFFECTIVENESS: f64 = 0.05;

/// Per-rotor health factors k_i = 1 - LE_i, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivenessVector {
    pub k: [f64; 4],
}

impl EffectivenessVector {
    pub fn healthy() -> Self {
        EffectivenessVector { k: [1.0; 4] }
    }

    pub fn new(k: [f64; 4]) -> Result<Self> {
        for (i, v) in k.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(v) {
                return Err(Error::Domain(format!(
                    "effectiveness k{} must lie in [0, 1], got {v}",
                    i + 1
                )));
            }
        }
        Ok(EffectivenessVector { k })
    }
}

/// Fractional loss of effectiveness `(w_d - w) / w_d`, clamped to [0, 1].
pub fn loss_of_effectiveness(w_d: f64, w: f64) -> Result<f64> {
    if !w_d.is_finite() || w_d <= 0.0 {
        return Err(Error::Domain(format!(
            "commanded speed must be positive, got {w_d}"
        )));
    }
    Ok(((w_d - w) / w_d).clamp(0.0, 1.0))
}

/// Per-rotor effectiveness from commanded vs measured speeds. Rotors with a
/// zero command keep their previous estimate.
pub fn estimate_effectiveness(
    commanded: &RotorSpeeds,
    measured: &RotorSpeeds,
    previous: &EffectivenessVector,
) -> EffectivenessVector {
    let mut k = previous.k;
    for i in 0..4 {
        if commanded.0[i] > 0.0 {
            // clamp keeps the estimate in [0, 1] even with noisy measurements
            k[i] = (1.0 - (commanded.0[i] - measured.0[i]) / commanded.0[i]).clamp(0.0, 1.0);
        }
    }
    EffectivenessVector { k }
}

/// Inverts the effectiveness-weighted mixing map.
pub struct Allocator {
    b: Matrix4<f64>,
    omega_max_sq: f64,
}

impl Allocator {
    /// Builds the allocator and verifies the mixing matrix is invertible.
    pub fn new(params: &QuadrotorParams) -> Result<Self> {
        let b = mixing_matrix(params);
        let cond = condition_number(&b);
        if !cond.is_finite() || cond > COND_LIMIT {
            return Err(Error::AllocationInfeasible(format!(
                "mixing matrix condition number {cond} exceeds {COND_LIMIT}"
            )));
        }
        Ok(Allocator {
            b,
            omega_max_sq: params.omega_max * params.omega_max,
        })
    }

    /// Solves for commanded rotor speeds reproducing `wrench` through the
    /// degraded actuators. Effectiveness enters as k_i^2 on squared speeds
    /// (the fault scales angular speed linearly). Squared speeds are clamped
    /// to [0, omega_max^2] after the solve; the boolean reports whether any
    /// clamp was applied.
    pub fn allocate(
        &self,
        wrench: &ControlWrench,
        effectiveness: &EffectivenessVector,
    ) -> Result<(RotorSpeeds, bool)> {
        if !wrench.is_finite() {
            return Err(Error::NonFinite("wrench"));
        }
        let usable = effectiveness
            .k
            .iter()
            .filter(|k| **k > MIN_USABLE_EFFECTIVENESS)
            .count();
        if usable < 3 {
            return Err(Error::Domain(format!(
                "allocation requires at least 3 usable rotors, have {usable}"
            )));
        }

        let mut m = self.b;
        for col in 0..4 {
            let k2 = effectiveness.k[col] * effectiveness.k[col];
            for row in 0..4 {
                m[(row, col)] *= k2;
            }
        }
        let cond = condition_number(&m);
        if !cond.is_finite() || cond > COND_LIMIT {
            return Err(Error::AllocationInfeasible(format!(
                "weighted mixing matrix condition number {cond} exceeds {COND_LIMIT}"
            )));
        }
        let inv = m.try_inverse().ok_or_else(|| {
            Error::AllocationInfeasible("weighted mixing matrix is singular".to_string())
        })?;
        let v = inv * wrench.as_vector();

        let mut clamped = false;
        let mut speeds = [0.0; 4];
        for i in 0..4 {
            let vi = v[i];
            let bounded = vi.clamp(0.0, self.omega_max_sq);
            if bounded != vi {
                clamped = true;
            }
            speeds[i] = bounded.sqrt();
        }
        Ok((RotorSpeeds(speeds), clamped))
    }
}

fn condition_number(m: &Matrix4<f64>) -> f64 {
    let sv = m.svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
