use std::path::Path;

use serde::{Deserialize, Serialize};

use super::potentials::{Family, PotentialSpec};
use super::reconstruct::Mode;
use crate::disc::{BoundaryBasis, GridSpec};
use crate::error::{Error, Result};
use crate::norms::SpaceParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub epsilon: f64,
    pub a: f64,
}

impl Default for SpaceSpec {
    fn default() -> Self {
        Self { epsilon: 0.25, a: 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub fixed_point: f64,
    pub slope_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fixed_point: 1e-10,
            slope_slack: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSpec {
    /// `q1 = q2 + t * perturbation`
    pub t_values: Vec<f64>,
    pub n_min: f64,
    pub mode: Mode,
    pub perturbation: PotentialSpec,
    pub background: PotentialSpec,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            t_values: vec![1.0, 0.5, 0.25, 0.125],
            n_min: 3.0,
            mode: Mode::Cgo,
            perturbation: PotentialSpec {
                family: Family::Bump,
                amplitude: 0.5,
                center: [0.15, 0.1],
                radius: 0.25,
                seed: 11,
            },
            background: PotentialSpec {
                family: Family::Bump,
                amplitude: 1.0,
                center: [-0.3, 0.2],
                radius: 0.3,
                seed: 13,
            },
        }
    }
}

/// Settings of the individual probes not covered by the main sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeSpec {
    pub stationary_phase_ns: Vec<f64>,
    /// Sobolev order assumed for the stationary-phase rate
    pub alpha: f64,
    /// exponent and `r` of the conjugated-Cauchy and remainder probes
    pub p: f64,
    pub r: f64,
    pub cutoff_nodes: usize,
    pub cutoff_deltas: Vec<f64>,
    pub holder_samples: usize,
    pub oneil_fields: usize,
    pub oneil_nodes: [usize; 2],
    pub alessandrini_pairs: usize,
    pub dn_check_k: usize,
    /// probe function for the conjugated Cauchy operator
    pub smooth_a: PotentialSpec,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        Self {
            stationary_phase_ns: vec![8.0, 16.0, 32.0, 64.0, 128.0, 256.0],
            alpha: 1.0,
            p: 3.0,
            r: 0.05,
            cutoff_nodes: 512,
            cutoff_deltas: vec![0.2, 0.1, 0.05],
            holder_samples: 100_000,
            oneil_fields: 50,
            oneil_nodes: [128, 256],
            alessandrini_pairs: 10,
            dn_check_k: 8,
            smooth_a: PotentialSpec {
                family: Family::Bump,
                amplitude: 1.0,
                center: [0.0, 0.0],
                radius: 0.8,
                seed: 0,
            },
        }
    }
}

/// One run of the laboratory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub boundary: BoundaryBasis,
    #[serde(default)]
    pub space: SpaceSpec,
    #[serde(default = "default_probe_ns")]
    pub probe_ns: Vec<f64>,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub probes: ProbeSpec,
}

fn default_probe_ns() -> Vec<f64> {
    vec![8.0, 16.0, 32.0, 64.0, 128.0]
}

impl Default for Config {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            boundary: BoundaryBasis::default(),
            space: SpaceSpec::default(),
            probe_ns: default_probe_ns(),
            potential: PotentialSpec::default(),
            tolerances: Tolerances::default(),
            sweep: SweepSpec::default(),
            probes: ProbeSpec::default(),
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Config = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn space_params(&self) -> Result<SpaceParams> {
        SpaceParams::from_regularity(self.space.epsilon, self.space.a)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.build()?;
        BoundaryBasis::new(self.boundary.m_angles(), self.boundary.k_max())?;
        self.space_params()?;
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]) && v.iter().all(|&x| x > 0.0);
        if self.probe_ns.len() < 2 || !increasing(&self.probe_ns) {
            return Err(Error::InvalidArgument("probe_ns must hold at least two increasing positive values".into()));
        }
        if !increasing(&self.probes.stationary_phase_ns) {
            return Err(Error::InvalidArgument("stationary_phase_ns must be increasing and positive".into()));
        }
        if !(self.tolerances.fixed_point > 0.0) || !(self.tolerances.slope_slack >= 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.sweep.t_values.iter().any(|t| !t.is_finite()) || !(self.sweep.n_min > 0.0) {
            return Err(Error::InvalidArgument("sweep needs finite t values and n_min > 0".into()));
        }
        Ok(())
    }
}
