//! Analytic reference signals with closed-form first and second derivatives.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Reference value and its first two time derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRef {
    pub r: f64,
    pub rd: f64,
    pub rdd: f64,
}

/// `r(t) = offset + amplitude * sin(omega * t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SinusoidRef {
    pub amplitude: f64,
    /// Angular frequency (rad/s).
    pub omega: f64,
    /// Phase (rad).
    pub phase: f64,
    pub offset: f64,
}

impl Default for SinusoidRef {
    fn default() -> Self {
        SinusoidRef {
            amplitude: 0.0,
            omega: 0.0,
            phase: 0.0,
            offset: 0.0,
        }
    }
}

impl SinusoidRef {
    pub fn new(amplitude: f64, omega: f64, phase: f64, offset: f64) -> Self {
        SinusoidRef {
            amplitude,
            omega,
            phase,
            offset,
        }
    }

    pub fn validate(&self, key: &str) -> Result<()> {
        for (field, v) in [
            ("amplitude", self.amplitude),
            ("omega", self.omega),
            ("phase", self.phase),
            ("offset", self.offset),
        ] {
            if !v.is_finite() {
                return Err(Error::config(&format!("{key}.{field}"), "must be finite"));
            }
        }
        if self.omega < 0.0 {
            return Err(Error::config(
                &format!("{key}.omega"),
                "frequency must be non-negative",
            ));
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> ChannelRef {
        let arg = self.omega * t + self.phase;
        let (s, c) = arg.sin_cos();
        ChannelRef {
            r: self.offset + self.amplitude * s,
            rd: self.amplitude * self.omega * c,
            rdd: -self.amplitude * self.omega * self.omega * s,
        }
    }
}

/// References for the four controlled channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReferenceSet {
    pub z: SinusoidRef,
    pub phi: SinusoidRef,
    pub theta: SinusoidRef,
    pub psi: SinusoidRef,
}

impl Default for ReferenceSet {
    fn default() -> Self {
        // Artifact defaults: 0.5 rad attitude sinusoids, 1 m altitude sinusoid
        // about a 2 m offset, 0.5 rad/s. The altitude channel leads by a
        // quarter period so its reference acceleration is zero exactly where
        // the attitude angles peak; otherwise the combined thrust demand
        // (tilt-compensated gravity plus climb) exceeds what a rotor at 40%
        // effectiveness can deliver, and no controller could track through
        // that window. It also starts the reference at a rest point (peak
        // value, zero slope), so a vehicle spawned on it carries no initial
        // velocity mismatch.
        ReferenceSet {
            z: SinusoidRef::new(1.0, 0.5, std::f64::consts::FRAC_PI_2, 2.0),
            phi: SinusoidRef::new(0.5, 0.5, 0.0, 0.0),
            theta: SinusoidRef::new(0.5, 0.5, 0.0, 0.0),
            psi: SinusoidRef::new(0.5, 0.5, 0.0, 0.0),
        }
    }
}

/// References for the controlled channels evaluated at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefsAtT {
    pub z: ChannelRef,
    pub phi: ChannelRef,
    pub theta: ChannelRef,
    pub psi: ChannelRef,
}

impl ReferenceSet {
    pub fn validate(&self) -> Result<()> {
        self.z.validate("references.z")?;
        self.phi.validate("references.phi")?;
        self.theta.validate("references.theta")?;
        self.psi.validate("references.psi")
    }

    pub fn refs_at(&self, t: f64) -> RefsAtT {
        RefsAtT {
            z: self.z.eval(t),
            phi: self.phi.eval(t),
            theta: self.theta.eval(t),
            psi: self.psi.eval(t),
        }
    }
}
