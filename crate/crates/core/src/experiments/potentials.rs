//! Potential families: compactly supported smooth bumps and rough variants.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::disc::{DiscGrid, Field};
use crate::error::{Error, Result};

pub const DEFAULT_RADIUS: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Bump,
    Rough,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub family: Family,
    /// supremum of `|q|`
    pub amplitude: f64,
    pub center: [f64; 2],
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_radius() -> f64 {
    DEFAULT_RADIUS
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self {
            family: Family::Bump,
            amplitude: 5.0,
            center: [0.15, 0.1],
            radius: DEFAULT_RADIUS,
            seed: 7,
        }
    }
}

impl PotentialSpec {
    pub fn center(&self) -> Complex64 {
        Complex64::new(self.center[0], self.center[1])
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        Self { amplitude, ..*self }
    }

    pub fn with_family(&self, family: Family) -> Self {
        Self { family, ..*self }
    }

    /// `epsilon` and `p_hat` set the coefficient decay of the rough family.
    pub fn build(&self, grid: &Arc<DiscGrid>, epsilon: f64, p_hat: f64) -> Result<Field> {
        if !(self.radius > 0.0) || self.center().norm() + self.radius > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "potential support |c| + radius = {} must stay inside the disc",
                self.center().norm() + self.radius
            )));
        }
        match self.family {
            Family::Bump => Ok(bump(grid, self.center(), self.radius, self.amplitude)),
            Family::Rough => Ok(rough(grid, self, epsilon, p_hat)),
        }
    }
}

/// `exp(1 + 1/(s^2 - 1))` for `s < 1`, zero beyond; equals 1 at `s = 0`.
pub fn bump_profile(s: f64) -> f64 {
    if s < 1.0 {
        (1.0 + 1.0 / (s * s - 1.0)).exp()
    } else {
        0.0
    }
}

/// `peak * bump_profile(|z - c| / radius)`.
pub fn bump(grid: &Arc<DiscGrid>, c: Complex64, radius: f64, peak: f64) -> Field {
    Field::from_fn_masked(grid, |z| Complex64::new(peak * bump_profile((z - c).norm() / radius), 0.0))
}

const ROUGH_MODES: i64 = 12;

/// Bump envelope times a real random Fourier series with coefficients decaying
/// like `(1 + |xi|)^{-1 - epsilon - 2/p_hat}`, rescaled to the requested sup.
pub fn rough(grid: &Arc<DiscGrid>, spec: &PotentialSpec, epsilon: f64, p_hat: f64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let decay = 1.0 + epsilon + 2.0 / p_hat;
    let k0 = PI / spec.radius;
    let mut modes = Vec::new();
    for a in -ROUGH_MODES..=ROUGH_MODES {
        for b in -ROUGH_MODES..=ROUGH_MODES {
            let xi = Complex64::new(a as f64, b as f64) * k0;
            let scale = (1.0 + xi.norm()).powf(-decay);
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
            modes.push((xi, c));
        }
    }
    let c = spec.center();
    let raw = Field::from_fn_masked(grid, |z| {
        let env = bump_profile((z - c).norm() / spec.radius);
        if env == 0.0 {
            return Complex64::default();
        }
        let w = z - c;
        let s: f64 = modes
            .iter()
            .map(|(xi, a)| (a * Complex64::from_polar(1.0, xi.re * w.re + xi.im * w.im)).re)
            .sum();
        Complex64::new(env * (1.0 + s), 0.0)
    });
    let sup = raw.max_abs();
    if sup == 0.0 {
        return raw;
    }
    raw.map(|v| v * (spec.amplitude / sup))
}
