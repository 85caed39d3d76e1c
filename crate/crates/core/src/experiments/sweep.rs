//! Log-stability sweep over a scaled perturbation family.

use serde::{Deserialize, Serialize};

use super::reconstruct::{reconstruct_with, Mode};
use super::{n_from_dn_gap, z0_cell_area, z0_subgrid, Lab};
use crate::disc::interpolate;
use crate::error::Result;
use crate::forward::{dn_map_with, DirichletSolver};
use crate::norms::dn_operator_norm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRecord {
    pub t: f64,
    /// `||Lambda_1 - Lambda_2||` from `H^{1/2}` to `H^{-1/2}`
    pub dn_gap: f64,
    /// `ln(1/gap)/22`, absent when the gap is outside `(0, 1/e)`
    pub n_formula: Option<f64>,
    pub n_used: f64,
    /// `||Q - Q_rec||` over the z0 sub-grid
    pub rec_error: f64,
    /// `||Q_rec - stationary_phase(Q, n)||` over the z0 sub-grid
    pub sp_error: f64,
    pub missing: usize,
    /// `C (ln 1/gap)^{-theta/2}` with the fitted envelope constant
    pub bound: Option<f64>,
    pub included: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub mode: Mode,
    pub theta: f64,
    pub records: Vec<StabilityRecord>,
    pub envelope_c: Option<f64>,
    pub envelope_holds: bool,
    /// gap decreases with `|t|` over included records
    pub gap_monotone: bool,
    /// error decreases with the gap over included records
    pub error_monotone: bool,
}

/// Gap below this is indistinguishable from solver roundoff.
const ZERO_GAP: f64 = 1e-12;

pub fn stability_sweep(lab: &Lab) -> Result<SweepOutput> {
    let spec = &lab.config.sweep;
    let eps = lab.space.epsilon;
    let p_hat = lab.space.p;
    let q2 = spec.background.build(&lab.grid, eps, p_hat)?;
    let dq = spec.perturbation.build(&lab.grid, eps, p_hat)?;
    let a2 = dn_map_with(&DirichletSolver::new(&q2)?, &lab.basis);
    let z0s = z0_subgrid();
    let cell = z0_cell_area();
    let mut records = Vec::new();
    for &t in &spec.t_values {
        let q_diff = &dq * t;
        let q1 = &q2 + &q_diff;
        let record = (|| -> Result<StabilityRecord> {
            let a1 = dn_map_with(&DirichletSolver::new(&q1)?, &lab.basis);
            let da = a1.difference(&a2)?;
            let gap = dn_operator_norm(&da);
            let n_formula = n_from_dn_gap(gap).ok();
            let n_used = n_formula.unwrap_or(0.0).max(spec.n_min);
            let rec = reconstruct_with(
                &lab.ops,
                &lab.basis,
                &da,
                &q1,
                &q2,
                n_used,
                &z0s,
                spec.mode,
                lab.config.tolerances.fixed_point,
            )?;
            let sp = lab.ops.stationary_phase(&q_diff, n_used)?;
            let rec_error = rec.l2_distance(cell, |z| interpolate(&q_diff, z));
            let sp_error = rec.l2_distance(cell, |z| interpolate(&sp, z));
            Ok(StabilityRecord {
                t,
                dn_gap: gap,
                n_formula,
                n_used,
                rec_error,
                sp_error,
                missing: rec.missing(),
                bound: None,
                included: gap > ZERO_GAP && n_formula.is_some() && rec.missing() == 0,
            })
        })();
        match record {
            Ok(r) => records.push(r),
            // a failed forward problem drops the record, not the sweep
            Err(crate::Error::IllPosed(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let theta = lab.space.theta;
    let weight = |gap: f64| (1.0 / gap).ln().powf(-theta / 2.0);
    let envelope_c = records
        .iter()
        .filter(|r| r.included)
        .map(|r| r.rec_error / weight(r.dn_gap))
        .reduce(f64::max);
    if let Some(c) = envelope_c {
        for r in records.iter_mut().filter(|r| r.included) {
            r.bound = Some(c * weight(r.dn_gap));
        }
    }
    let envelope_holds = envelope_c.is_some()
        && records
            .iter()
            .filter(|r| r.included)
            .all(|r| r.rec_error <= r.bound.unwrap() * (1.0 + 1e-12));
    let mut inc: Vec<&StabilityRecord> = records.iter().filter(|r| r.included).collect();
    inc.sort_by(|a, b| b.t.abs().total_cmp(&a.t.abs()));
    let gap_monotone = inc.windows(2).all(|w| w[1].dn_gap < w[0].dn_gap);
    let error_monotone = inc.windows(2).all(|w| w[1].rec_error < w[0].rec_error);
    Ok(SweepOutput {
        mode: spec.mode,
        theta,
        records,
        envelope_c,
        envelope_holds,
        gap_monotone,
        error_monotone,
    })
}
