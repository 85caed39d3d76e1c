//! Decay probes: measured norms against the frequency `n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fit::DecayReport;
use super::reconstruct::error_term_integral;
use super::{z0_subgrid, Lab};
use crate::cgo::{bukhgeim_solve, CgoSolution, Orientation, DEFAULT_MAX_ITER};
use crate::disc::Field;
use crate::error::Result;
use crate::norms::{lp_norm, p_star, w1p_norm};
use crate::transforms::PhaseParams;

pub const STATIONARY_PHASE: &str = "stationary-phase";
pub const CONJUGATED_CAUCHY: &str = "conjugated-cauchy";
pub const CONJUGATED_CAUCHY_SUP: &str = "conjugated-cauchy-sup";
pub const BUKHGEIM_REMAINDER: &str = "bukhgeim-remainder";
pub const ERROR_TERM: &str = "error-term";

/// `||stationary_phase(Q, n) - Q||_2`, target `-alpha/2`.
pub fn stationary_phase_decay(lab: &Lab, q: &Field) -> Result<DecayReport> {
    let pairs = lab
        .config
        .probes
        .stationary_phase_ns
        .iter()
        .map(|&n| Ok((n, lp_norm(&(&lab.ops.stationary_phase(q, n)? - q), 2.0)?)))
        .collect::<Result<Vec<_>>>()?;
    DecayReport::fit(STATIONARY_PHASE, pairs, -lab.config.probes.alpha / 2.0, 0.1)
}

/// `sup_{z0} ||C(e^{-inR} a)||_p` and the same in `L^inf`.
pub fn conjugated_cauchy_decay(lab: &Lab, a: &Field) -> Result<(DecayReport, DecayReport)> {
    let probes = &lab.config.probes;
    let z0s = z0_subgrid();
    let mut lp = Vec::new();
    let mut sup = Vec::new();
    for &n in &lab.config.probe_ns {
        let mut best = (0.0f64, 0.0f64);
        for &z0 in &z0s {
            let c = lab.ops.conjugated_cauchy(a, &PhaseParams::new(n, z0)?);
            best.0 = best.0.max(lp_norm(&c, probes.p)?);
            best.1 = best.1.max(lp_norm(&c, f64::INFINITY)?);
        }
        lp.push((n, best.0));
        sup.push((n, best.1));
    }
    let slack = lab.config.tolerances.slope_slack;
    let target = probes.r - 1.0 / p_star(probes.p);
    Ok((
        DecayReport::fit(CONJUGATED_CAUCHY, lp, target, slack)?,
        DecayReport::fit(CONJUGATED_CAUCHY_SUP, sup, -0.2, 0.1)?,
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RemainderProbe {
    /// `sup_{z0} ||f_n - 1||_p`
    pub report: DecayReport,
    /// `(n, worst ratio of successive fixed-point residuals over z0)`
    pub contraction: Vec<(f64, f64)>,
    /// `(n, sup_{z0} ||f_n||_{W^{1,p}})`
    pub w1p: Vec<(f64, f64)>,
    pub iterations: Vec<(f64, usize)>,
}

fn solve(lab: &Lab, q: &Field, n: f64, z0: Complex64) -> Result<CgoSolution> {
    bukhgeim_solve(
        &lab.ops,
        q,
        &PhaseParams::new(n, z0)?,
        Orientation::Holomorphic,
        lab.config.tolerances.fixed_point,
        DEFAULT_MAX_ITER,
    )
}

/// Remainder decay of the fixed-point solve over the z0 sub-grid.
pub fn bukhgeim_remainder_decay(lab: &Lab, q: &Field) -> Result<RemainderProbe> {
    let p = lab.config.probes.p;
    let mut pairs = Vec::new();
    let mut contraction = Vec::new();
    let mut w1p = Vec::new();
    let mut iterations = Vec::new();
    for &n in &lab.config.probe_ns {
        let (mut rem, mut worst, mut w, mut its) = (0.0f64, 0.0f64, 0.0f64, 0usize);
        for z0 in z0_subgrid() {
            let sol = solve(lab, q, n, z0)?;
            rem = rem.max(lp_norm(&sol.f.map(|v| v - 1.0), p)?);
            worst = worst.max(sol.worst_contraction().unwrap_or(0.0));
            w = w.max(w1p_norm(&sol.f, p, None)?);
            its = its.max(sol.iterations);
        }
        pairs.push((n, rem));
        contraction.push((n, worst));
        w1p.push((n, w));
        iterations.push((n, its));
    }
    let target = lab.config.probes.r - 1.0 / p_star(p);
    Ok(RemainderProbe {
        report: DecayReport::fit(BUKHGEIM_REMAINDER, pairs, target, lab.config.tolerances.slope_slack)?,
        contraction,
        w1p,
        iterations,
    })
}

/// Error-term integral with `r = f_n - 1` frozen at `z0 = 0`; target `-theta/2`.
pub fn error_term_decay(lab: &Lab, q_diff: &Field, q: &Field) -> Result<DecayReport> {
    let pairs = lab
        .config
        .probe_ns
        .iter()
        .map(|&n| {
            let sol = solve(lab, q, n, Complex64::default())?;
            let r = sol.f.map(|v| v - 1.0);
            Ok((n, error_term_integral(&lab.ops, q_diff, &r, n)?))
        })
        .collect::<Result<Vec<_>>>()?;
    DecayReport::fit(
        format!("{ERROR_TERM} (frozen z0 = 0 surrogate)"),
        pairs,
        -lab.space.theta / 2.0,
        0.2,
    )
}
