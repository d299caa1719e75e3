//! Run configuration: JSON documents that pin every knob of a run so
//! results can be reproduced byte for byte.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use entengine::builder::Temperature;
use entengine::dynamics::Model;
use entengine::optimizer::{MachineFamily, SweepConfig};
use entengine::qcore::Tolerances;

/// Coupling strengths; anything left out falls back to the preset's
/// defaults.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Couplings {
    pub gamma_h: Option<f64>,
    pub gamma_c: Option<f64>,
    pub g: Option<f64>,
}

/// Hot/cold bath temperatures.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Temperatures {
    pub hot: Temperature,
    pub cold: Temperature,
}

impl Default for Temperatures {
    fn default() -> Self {
        Self { hot: Temperature::Infinite, cold: Temperature::Zero }
    }
}

/// Temperature grid for sweep commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TemperatureGrid {
    pub hot: Vec<Temperature>,
    pub cold: Vec<Temperature>,
}

impl Default for TemperatureGrid {
    fn default() -> Self {
        Self {
            hot: [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
                .iter()
                .map(|&t| Temperature::Finite(t))
                .collect(),
            cold: [0.02, 0.05, 0.1, 0.2, 0.5]
                .iter()
                .map(|&t| Temperature::Finite(t))
                .collect(),
        }
    }
}

fn default_model() -> Model {
    Model::Reset
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Full description of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub machine: MachineFamily,
    #[serde(default = "default_model")]
    pub model: Model,
    #[serde(default)]
    pub couplings: Couplings,
    #[serde(default)]
    pub temperatures: Temperatures,
    /// Transition pairs coupled to each bath under the Lindblad model.
    #[serde(default)]
    pub jumps: Option<Vec<(u8, u8)>>,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub temperature_grid: TemperatureGrid,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn for_family(machine: MachineFamily) -> Self {
        Self {
            machine,
            model: default_model(),
            couplings: Couplings::default(),
            temperatures: Temperatures::default(),
            jumps: None,
            sweep: SweepConfig::default(),
            temperature_grid: TemperatureGrid::default(),
            out: default_out(),
            tolerances: Tolerances::default(),
        }
    }
}
