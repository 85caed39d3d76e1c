//! End-to-end experiments: parameter recipes, decay probes, reconstruction,
//! the stability sweep and report emission.

pub mod config;
pub mod criteria;
pub mod fit;
pub mod potentials;
pub mod probes;
pub mod reconstruct;
pub mod report;
pub mod sweep;

pub use config::Config;
pub use fit::DecayReport;
pub use reconstruct::{error_term_integral, reconstruct_potential, reconstruct_with, Mode, Reconstruction};
pub use sweep::{stability_sweep, StabilityRecord, SweepOutput};

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disc::{BoundaryBasis, DiscGrid, Field};
use crate::error::{Error, Result};
use crate::norms::SpaceParams;
use crate::transforms::Transforms;

/// `theta = min(epsilon, 1/4)`, `r = theta/4`, `p = min(a, 4/(2 - theta))`.
pub fn choose_parameters(epsilon: f64, a: f64) -> Result<SpaceParams> {
    SpaceParams::from_regularity(epsilon, a)
}

/// `n = ln(1/gap) / 22` for `0 < gap < 1/e`.
pub fn n_from_dn_gap(gap: f64) -> Result<f64> {
    if !(gap > 0.0 && gap < (-1.0f64).exp()) {
        return Err(Error::InvalidArgument(format!("DN gap must lie in (0, 1/e), got {gap}")));
    }
    Ok((1.0 / gap).ln() / 22.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyLogScan {
    pub alpha: f64,
    pub beta: f64,
    /// `alpha >= beta / e`
    pub condition_met: bool,
    pub violations: usize,
    /// maximizer of `x^alpha (ln 1/x)^beta` over the sweep, and that maximum
    pub worst_x: f64,
    pub worst_ratio: f64,
}

pub const POLY_LOG_POINTS: usize = 10_000;

/// Evaluates `x^alpha <= (ln 1/x)^{-beta}` on a log-spaced sweep of
/// `(1e-8, 1/e)`.
pub fn poly_log_scan(alpha: f64, beta: f64) -> PolyLogScan {
    let (lo, hi) = ((1e-8f64).ln(), -1.0f64);
    let mut scan = PolyLogScan {
        alpha,
        beta,
        condition_met: alpha >= beta * (-1.0f64).exp(),
        violations: 0,
        worst_x: f64::NAN,
        worst_ratio: 0.0,
    };
    for i in 0..POLY_LOG_POINTS {
        let lx = lo + (hi - lo) * i as f64 / (POLY_LOG_POINTS - 1) as f64;
        let x = lx.exp();
        // x^alpha / (ln 1/x)^{-beta}, compared in logs
        let log_ratio = alpha * lx + beta * (-lx).ln();
        if log_ratio > 1e-12 {
            scan.violations += 1;
        }
        let ratio = log_ratio.exp();
        if ratio > scan.worst_ratio {
            scan.worst_ratio = ratio;
            scan.worst_x = x;
        }
    }
    scan
}

/// Whether the polynomial-logarithm inequality holds over the whole sweep.
pub fn poly_log_check(alpha: f64, beta: f64) -> bool {
    poly_log_scan(alpha, beta).violations == 0
}

/// Half-width of the square holding the z0 sub-grid; its corners lie on `|z0| = 1/2`.
pub const Z0_HALF_WIDTH: f64 = 0.5 * std::f64::consts::FRAC_1_SQRT_2;
pub const Z0_POINTS: usize = 5;

/// Uniform 5x5 sub-grid of stationary points inside `|z0| <= 1/2`.
pub fn z0_subgrid() -> Vec<Complex64> {
    let a = Z0_HALF_WIDTH;
    let step = 2.0 * a / (Z0_POINTS - 1) as f64;
    (0..Z0_POINTS)
        .flat_map(|k| (0..Z0_POINTS).map(move |j| Complex64::new(-a + step * j as f64, -a + step * k as f64)))
        .collect()
}

/// Area attached to each sub-grid point in discrete `L^2(z0)` norms.
pub fn z0_cell_area() -> f64 {
    let step = 2.0 * Z0_HALF_WIDTH / (Z0_POINTS - 1) as f64;
    step * step
}

/// Shared state of one run.
#[derive(Debug)]
pub struct Lab {
    pub config: Config,
    pub grid: Arc<DiscGrid>,
    pub ops: Transforms,
    pub basis: BoundaryBasis,
    pub space: SpaceParams,
}

impl Lab {
    pub fn new(config: Config) -> Result<Self> {
        config.validate()?;
        let grid = config.grid.build()?;
        let ops = Transforms::new(&grid)?;
        let basis = BoundaryBasis::new(config.boundary.m_angles(), config.boundary.k_max())?;
        let space = config.space_params()?;
        Ok(Self {
            config,
            grid,
            ops,
            basis,
            space,
        })
    }

    /// The configured potential on the lab grid.
    pub fn potential(&self) -> Result<Field> {
        self.config.potential.build(&self.grid, self.space.epsilon, self.space.p)
    }
}
