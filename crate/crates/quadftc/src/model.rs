//! Physical parameters, kinematic transforms and the rotor-to-wrench mixing map.

use nalgebra::{Matrix3, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Physical constants of the Parrot AR Drone 2.0 (indoor hull) plus gravity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadrotorParams {
    /// Mass (kg).
    pub m: f64,
    /// Arm length (m).
    pub l: f64,
    /// Rotor inertia (kg·m²).
    pub j_r: f64,
    /// Moment of inertia about the body x axis (kg·m²).
    pub i_x: f64,
    /// Moment of inertia about the body y axis (kg·m²).
    pub i_y: f64,
    /// Moment of inertia about the body z axis (kg·m²).
    pub i_z: f64,
    /// Thrust factor (N/(rad/s)²).
    pub k_f: f64,
    /// Torque factor (N·m/(rad/s)²).
    pub k_m: f64,
    /// Maximum rotor speed (rad/s).
    pub omega_max: f64,
    /// Gravitational acceleration (m/s²).
    pub g: f64,
}

impl Default for QuadrotorParams {
    fn default() -> Self {
        QuadrotorParams {
            m: 0.429,
            l: 0.1785,
            j_r: 2.03e-5,
            i_x: 2.24e-3,
            i_y: 2.98e-3,
            i_z: 4.80e-3,
            k_f: 8.05e-6,
            k_m: 2.42e-7,
            omega_max: 1047.2,
            g: 9.81,
        }
    }
}

impl QuadrotorParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("params.m", self.m),
            ("params.l", self.l),
            ("params.j_r", self.j_r),
            ("params.i_x", self.i_x),
            ("params.i_y", self.i_y),
            ("params.i_z", self.i_z),
            ("params.k_f", self.k_f),
            ("params.k_m", self.k_m),
            ("params.omega_max", self.omega_max),
            ("params.g", self.g),
        ];
        for (key, v) in fields {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::config(key, "must be finite and strictly positive"));
            }
        }
        Ok(())
    }

    /// Rotor speed that balances gravity with all four rotors equal.
    pub fn hover_speed(&self) -> f64 {
        (self.m * self.g / (4.0 * self.k_f)).sqrt()
    }
}

/// Angular speed per rotor (rad/s), rotor 1..4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorSpeeds(pub [f64; 4]);

impl RotorSpeeds {
    pub fn squared(&self) -> [f64; 4] {
        [
            self.0[0] * self.0[0],
            self.0[1] * self.0[1],
            self.0[2] * self.0[2],
            self.0[3] * self.0[3],
        ]
    }
}

/// The four control inputs U1..U4 = (thrust F, roll torque, pitch torque, yaw torque).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlWrench {
    /// Total thrust (N).
    pub u1: f64,
    /// Roll torque (N·m).
    pub u2: f64,
    /// Pitch torque (N·m).
    pub u3: f64,
    /// Yaw torque (N·m).
    pub u4: f64,
}

impl ControlWrench {
    pub fn as_vector(&self) -> Vector4<f64> {
        Vector4::new(self.u1, self.u2, self.u3, self.u4)
    }

    pub fn is_finite(&self) -> bool {
        self.u1.is_finite() && self.u2.is_finite() && self.u3.is_finite() && self.u4.is_finite()
    }
}

/// Body-to-earth rotation matrix for Z-Y-X Euler angles.
pub fn rotation_matrix(phi: f64, theta: f64, psi: f64) -> Result<Matrix3<f64>> {
    if !(phi.is_finite() && theta.is_finite() && psi.is_finite()) {
        return Err(Error::NonFinite("rotation_matrix angles"));
    }
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (ss, cs) = psi.sin_cos();
    Ok(Matrix3::new(
        ct * cs,
        sp * st * cs - cp * ss,
        cp * st * cs + sp * ss,
        ct * ss,
        sp * st * ss + cp * cs,
        cp * st * ss - sp * cs,
        -st,
        sp * ct,
        cp * ct,
    ))
}

/// Thrust and drag moment of a single rotor spinning at `omega`.
pub fn rotor_thrust_and_moment(omega: f64, params: &QuadrotorParams) -> Result<(f64, f64)> {
    if !omega.is_finite() || omega < 0.0 {
        return Err(Error::Domain(format!(
            "rotor speed must be finite and non-negative, got {omega}"
        )));
    }
    let w2 = omega * omega;
    Ok((params.k_f * w2, params.k_m * w2))
}

/// The 4x4 map from squared rotor speeds to the control wrench.
pub fn mixing_matrix(params: &QuadrotorParams) -> Matrix4<f64> {
    let kf = params.k_f;
    let km = params.k_m;
    let lkf = params.l * kf;
    Matrix4::new(
        kf, kf, kf, kf, //
        0.0, -lkf, 0.0, lkf, //
        lkf, 0.0, -lkf, 0.0, //
        -km, km, -km, km,
    )
}

/// Applies the mixing matrix to squared rotor speeds.
pub fn mix(omega_sq: [f64; 4], params: &QuadrotorParams) -> Result<ControlWrench> {
    for (i, w2) in omega_sq.iter().enumerate() {
        if !w2.is_finite() || *w2 < 0.0 {
            return Err(Error::Domain(format!(
                "squared rotor speed {} must be finite and non-negative, got {w2}",
                i + 1
            )));
        }
    }
    let u = mixing_matrix(params) * Vector4::from_column_slice(&omega_sq);
    Ok(ControlWrench {
        u1: u[0],
        u2: u[1],
        u3: u[2],
        u4: u[3],
    })
}
