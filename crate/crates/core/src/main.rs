use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use cgo_lab::cgo::{assemble_u, bukhgeim_solve, cgo_residual, pde_residual, Orientation, DEFAULT_MAX_ITER};
use cgo_lab::disc::BoundaryVector;
use cgo_lab::experiments::report::{contraction_csv, decay_csv, pipeline_csvs, sweep_csv, write_files};
use cgo_lab::experiments::{criteria, probes, reconstruct_potential, stability_sweep, z0_subgrid, Config, Lab, Mode};
use cgo_lab::forward::{dn_map, DirichletSolver};
use cgo_lab::norms::{lp_norm, w1p_norm};
use cgo_lab::transforms::PhaseParams;
use cgo_lab::Result;

#[derive(Parser)]
#[command(name = "cgo-lab", version, about = "Numerical experiments for the 2D Schrödinger inverse problem")]
struct Cli {
    /// JSON run configuration; defaults are used when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output file (or directory for `check`); stdout when omitted
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Probe {
    StationaryPhase,
    ConjugatedCauchy,
    BukhgeimRemainder,
    ErrorTerm,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Holomorphic,
    AntiHolomorphic,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Cgo,
    Born,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one Dirichlet problem with boundary data e^{ik phi}
    Forward {
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k: i64,
    },
    /// Emit the DN matrix of the configured potential as JSON
    Dnmap,
    /// Solve for one oscillating solution and report remainder norms
    Cgo {
        #[arg(long, default_value_t = 32.0)]
        n: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        z0_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        z0_im: f64,
        #[arg(long, value_enum, default_value = "holomorphic")]
        orientation: OrientationArg,
    },
    /// Run one decay probe and write (n, value) rows
    Decay {
        #[arg(value_enum)]
        probe: Probe,
    },
    /// Reconstruct the sweep perturbation on the z0 sub-grid
    Reconstruct {
        #[arg(long, default_value_t = 3.0)]
        n: f64,
        #[arg(long, value_enum, default_value = "cgo")]
        mode: ModeArg,
    },
    /// Run the stability sweep
    Sweep,
    /// Run the acceptance checks; exit status 0 iff all selected pass
    Check {
        /// criterion ids, all when omitted
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let lab = Lab::new(config)?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Forward { k } => {
            let solver = DirichletSolver::new(&lab.potential()?)?;
            let u = solver.solve(&BoundaryVector::unit(lab.basis.k_max(), k));
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["x", "y", "re", "im"])?;
            for (i, v) in u.values().iter().enumerate() {
                if lab.grid.inside(i) {
                    let z = lab.grid.point(i);
                    w.write_record([z.re, z.im, v.re, v.im].map(|x| format!("{x:e}")))?;
                }
            }
            emit(out, &w.into_inner().map_err(|e| e.into_error())?)?;
            eprintln!("{:?}", solver.diagnostics());
            Ok(true)
        }
        Command::Dnmap => {
            let dn = dn_map(&lab.potential()?, &lab.basis)?;
            emit(out, dn.to_json()?.as_bytes())?;
            Ok(true)
        }
        Command::Cgo { n, z0_re, z0_im, orientation } => {
            let q = lab.potential()?;
            let orientation = match orientation {
                OrientationArg::Holomorphic => Orientation::Holomorphic,
                OrientationArg::AntiHolomorphic => Orientation::AntiHolomorphic,
            };
            let p = PhaseParams::new(n, Complex64::new(z0_re, z0_im))?;
            let sol = bukhgeim_solve(&lab.ops, &q, &p, orientation, lab.config.tolerances.fixed_point, DEFAULT_MAX_ITER)?;
            let r = sol.f.map(|v| v - 1.0);
            let exponent = lab.config.probes.p;
            let summary = json!({
                "n": n,
                "z0": [z0_re, z0_im],
                "iterations": sol.iterations,
                "converged": sol.converged,
                "contraction": sol.worst_contraction(),
                "remainder_lp": lp_norm(&r, exponent)?,
                "remainder_sup": lp_norm(&r, f64::INFINITY)?,
                "f_w1p": w1p_norm(&sol.f, exponent, None)?,
                "residual": cgo_residual(&sol, &q)?,
                "unfactored_residual": pde_residual(&assemble_u(&sol)?, &q)?,
                "residual_history": sol.residual_history,
            });
            emit(out, serde_json::to_string_pretty(&summary)?.as_bytes())?;
            Ok(sol.converged)
        }
        Command::Decay { probe } => {
            let q = lab.potential()?;
            let eps = lab.space.epsilon;
            let reports = match probe {
                Probe::StationaryPhase => vec![probes::stationary_phase_decay(&lab, &q)?],
                Probe::ConjugatedCauchy => {
                    let a = lab.config.probes.smooth_a.build(&lab.grid, eps, lab.space.p)?;
                    let (lp, sup) = probes::conjugated_cauchy_decay(&lab, &a)?;
                    vec![lp, sup]
                }
                Probe::BukhgeimRemainder => {
                    let rem = probes::bukhgeim_remainder_decay(&lab, &q)?;
                    eprint!("{}", String::from_utf8_lossy(&contraction_csv(&rem)?));
                    vec![rem.report]
                }
                Probe::ErrorTerm => {
                    let dq = lab.config.sweep.perturbation.build(&lab.grid, eps, lab.space.p)?;
                    vec![probes::error_term_decay(&lab, &dq, &q)?]
                }
            };
            emit(out, &decay_csv(&reports)?)?;
            for r in &reports {
                eprintln!(
                    "{}: slope {:.4}, target {:.4}, slack {} -> {}",
                    r.label,
                    r.slope,
                    r.target,
                    r.slack,
                    if r.pass { "PASS" } else { "FAIL" }
                );
            }
            Ok(reports.iter().all(|r| r.pass))
        }
        Command::Reconstruct { n, mode } => {
            let mode = match mode {
                ModeArg::Cgo => Mode::Cgo,
                ModeArg::Born => Mode::Born,
            };
            let (eps, p_hat) = (lab.space.epsilon, lab.space.p);
            let q2 = lab.config.sweep.background.build(&lab.grid, eps, p_hat)?;
            let dq = lab.config.sweep.perturbation.build(&lab.grid, eps, p_hat)?;
            let q1 = &q2 + &dq;
            let rec = reconstruct_potential(&lab.ops, &lab.basis, &q1, &q2, n, &z0_subgrid(), mode)?;
            let direct = lab.ops.stationary_phase(&dq, n)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["z0_re", "z0_im", "rec_re", "rec_im", "direct_re", "direct_im", "true_re", "true_im"])?;
            for (z, v) in rec.z0.iter().zip(&rec.values) {
                let v = v.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                let d = cgo_lab::disc::interpolate(&direct, *z);
                let t = cgo_lab::disc::interpolate(&dq, *z);
                w.write_record([z.re, z.im, v.re, v.im, d.re, d.im, t.re, t.im].map(|x| format!("{x:e}")))?;
            }
            emit(out, &w.into_inner().map_err(|e| e.into_error())?)?;
            Ok(rec.missing() == 0)
        }
        Command::Sweep => {
            let sweep = stability_sweep(&lab)?;
            emit(out, &sweep_csv(&sweep)?)?;
            eprintln!(
                "envelope C = {:?}, holds {}, error monotone {}, gap monotone {}",
                sweep.envelope_c, sweep.envelope_holds, sweep.error_monotone, sweep.gap_monotone
            );
            Ok(sweep.envelope_holds)
        }
        Command::Check { only } => {
            let ids = if only.is_empty() { criteria::ALL.to_vec() } else { only };
            let (outcomes, pipeline) = criteria::run(&lab, &ids)?;
            for o in &outcomes {
                println!("{}", o.line());
            }
            let all = outcomes.iter().all(|o| o.pass);
            if let Some(dir) = out {
                std::fs::create_dir_all(dir)?;
                let summary = json!({ "pass": all, "criteria": outcomes });
                let mut files = vec![("summary.json", serde_json::to_string_pretty(&summary)?.into_bytes())];
                if let Some(p) = &pipeline {
                    files.extend(pipeline_csvs(p)?);
                }
                write_files(dir, &files)?;
            }
            Ok(all)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
