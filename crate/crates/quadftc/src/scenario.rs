//! Experiment configurations: references, faults, gains, integrator settings.
//!
//! Scenario files are TOML documents; every key has a default, so an empty
//! document runs the nominal experiment. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::controller::{ControllerGains, SwitchingMode};
use crate::dynamics::{FaultEntry, FaultSchedule, SimState};
use crate::error::Error;
use crate::integrator::IntegratorConfig;
use crate::model::QuadrotorParams;
use crate::reference::ReferenceSet;
use crate::Result;

/// Fault schedule plus the delay before the allocator learns of a fault.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FaultConfig {
    /// Delay (s) between a fault becoming active and the allocator seeing it.
    /// During this window the allocator still assumes full effectiveness, so
    /// the degraded rotor under-delivers and the controller must absorb the
    /// wrench error through feedback alone.
    pub detection_delay: f64,
    pub entries: Vec<FaultEntry>,
}

impl Default for FaultConfig {
    fn default() -> Self {
        FaultConfig {
            detection_delay: 0.2,
            entries: Vec::new(),
        }
    }
}

impl FaultConfig {
    pub fn schedule(&self) -> FaultSchedule {
        FaultSchedule {
            entries: self.entries.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.detection_delay.is_finite() || self.detection_delay < 0.0 {
            return Err(Error::config(
                "faults.detection_delay",
                "must be finite and non-negative",
            ));
        }
        self.schedule().validate()
    }
}

/// Full description of one closed-loop experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub params: QuadrotorParams,
    pub gains: ControllerGains,
    pub integrator: IntegratorConfig,
    pub references: ReferenceSet,
    pub faults: FaultConfig,
    pub initial_state: SimState,
    pub mode: SwitchingMode,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        // Start on the reference trajectory (values and rates matched), so
        // the nominal run has no artificial start-up transient and any
        // deviation in a faulted run is attributable to the fault itself.
        // Starting at the origin instead would demand a multi-metre climb
        // whose braking phase is gravity-limited, making sub-second settling
        // physically unreachable.
        let references = ReferenceSet::default();
        let refs0 = references.refs_at(0.0);
        let initial_state = SimState {
            z: refs0.z.r,
            zd: refs0.z.rd,
            phi: refs0.phi.r,
            phid: refs0.phi.rd,
            theta: refs0.theta.r,
            thetad: refs0.theta.rd,
            psi: refs0.psi.r,
            psid: refs0.psi.rd,
            ..SimState::default()
        };
        ScenarioConfig {
            params: QuadrotorParams::default(),
            gains: ControllerGains::default(),
            integrator: IntegratorConfig::default(),
            references,
            faults: FaultConfig::default(),
            initial_state,
            mode: SwitchingMode::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.gains.validate()?;
        self.integrator.validate()?;
        self.references.validate()?;
        self.faults.validate()?;
        if !self.initial_state.is_finite() {
            return Err(Error::config("initial_state", "must be finite"));
        }
        Ok(())
    }

    pub fn from_toml_str(doc: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(doc).map_err(|e| Error::Config {
            key: "<toml>".to_string(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config {
            key: "<toml>".to_string(),
            message: e.to_string(),
        })
    }
}

/// The nominal experiment: default references, no faults.
pub fn nominal() -> ScenarioConfig {
    ScenarioConfig::default()
}

/// The rotor-failure experiment: identical to nominal except for a 60%
/// loss of effectiveness on rotor 4 from t = 0.
pub fn faulted() -> ScenarioConfig {
    let mut cfg = nominal();
    cfg.faults.entries.push(FaultEntry {
        rotor: 4,
        start: 0.0,
        loss: 0.6,
    });
    cfg
}

pub fn benchmark_scenarios() -> (ScenarioConfig, ScenarioConfig) {
    (nominal(), faulted())
}
