//! Full probe pipeline and its CSV / JSON outputs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::fit::DecayReport;
use super::potentials::Family;
use super::probes::{self, RemainderProbe};
use super::sweep::{stability_sweep, SweepOutput};
use super::Lab;
use crate::error::Result;

/// Everything the decay probes and the sweep produce for one config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub decay: Vec<DecayReport>,
    pub remainder: RemainderProbe,
    pub sweep: SweepOutput,
}

impl PipelineOutput {
    pub fn report(&self, label: &str) -> Option<&DecayReport> {
        self.decay.iter().find(|r| r.label.starts_with(label))
    }
}

/// Runs the four decay probes and the stability sweep.
pub fn run_pipeline(lab: &Lab) -> Result<PipelineOutput> {
    let q = lab.potential()?;
    let eps = lab.space.epsilon;
    let p_hat = lab.space.p;
    // stationary phase acts on the smooth member of the configured family
    let smooth_q = lab
        .config
        .potential
        .with_family(Family::Bump)
        .build(&lab.grid, eps, p_hat)?;
    let a = lab.config.probes.smooth_a.build(&lab.grid, eps, p_hat)?;
    let dq = lab.config.sweep.perturbation.build(&lab.grid, eps, p_hat)?;
    let sp = probes::stationary_phase_decay(lab, &smooth_q)?;
    let (cc, cc_sup) = probes::conjugated_cauchy_decay(lab, &a)?;
    let remainder = probes::bukhgeim_remainder_decay(lab, &q)?;
    let err = probes::error_term_decay(lab, &dq, &q)?;
    let sweep = stability_sweep(lab)?;
    Ok(PipelineOutput {
        decay: vec![sp, cc, cc_sup, remainder.report.clone(), err],
        remainder,
        sweep,
    })
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

/// One row per `(label, n, value)`.
pub fn decay_csv(reports: &[DecayReport]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "n", "value"])?;
    for r in reports {
        for &(n, v) in &r.pairs {
            w.write_record([r.label.clone(), num(n), num(v)])?;
        }
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Per-frequency diagnostics of the fixed-point solves.
pub fn contraction_csv(rem: &RemainderProbe) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "worst_contraction", "w1p_norm", "max_iterations"])?;
    for ((c, wp), it) in rem.contraction.iter().zip(&rem.w1p).zip(&rem.iterations) {
        w.write_record([num(c.0), num(c.1), num(wp.1), it.1.to_string()])?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// One row per stability record.
pub fn sweep_csv(sweep: &SweepOutput) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "t", "dn_gap", "n_formula", "n_used", "rec_error", "sp_error", "missing", "bound", "included",
    ])?;
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    for r in &sweep.records {
        w.write_record([
            num(r.t),
            num(r.dn_gap),
            opt(r.n_formula),
            num(r.n_used),
            num(r.rec_error),
            num(r.sp_error),
            r.missing.to_string(),
            opt(r.bound),
            r.included.to_string(),
        ])?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// CSV outputs of a pipeline run keyed by file name.
pub fn pipeline_csvs(out: &PipelineOutput) -> Result<Vec<(&'static str, Vec<u8>)>> {
    Ok(vec![
        ("decay.csv", decay_csv(&out.decay)?),
        ("contraction.csv", contraction_csv(&out.remainder)?),
        ("sweep.csv", sweep_csv(&out.sweep)?),
    ])
}

pub fn write_files(dir: &Path, files: &[(&str, Vec<u8>)]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, bytes) in files {
        std::fs::write(dir.join(name), bytes)?;
    }
    Ok(())
}
