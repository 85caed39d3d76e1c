//! The acceptance criteria as runnable checks.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fit::DecayReport;
use super::potentials::bump;
use super::report::{pipeline_csvs, run_pipeline, PipelineOutput};
use super::{poly_log_scan, Lab};
use crate::cgo::{self, assemble_u, bukhgeim_solve, build_cutoff, cgo_residual, pde_residual, Orientation};
use crate::disc::{integrate, BoundaryVector, DiscGrid, Field};
use crate::error::Result;
use crate::forward::{alessandrini_pairing, dn_map, dn_map_with, DirichletSolver};
use crate::norms::{lorentz_norm, lp_norm, p_star, w1p_norm};
use crate::transforms::{
    direct_cauchy, gaussian_holder_bound, holder_ratio, holder_samples, right_inverse_residual,
    stationary_phase_symbol_defect, PhaseParams, Transforms,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(id: u8, name: &str, pass: bool, detail: String) -> Self {
        Self {
            id,
            name: name.into(),
            pass,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<34} {}  {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

pub const ALL: [u8; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

fn gaussian(grid: &Arc<DiscGrid>, a: f64) -> Field {
    Field::from_fn_masked(grid, |z| Complex64::new((-a * z.norm_sqr()).exp(), 0.0))
}

fn slope_text(r: &DecayReport) -> String {
    format!("slope {:.3} (limit {:.3})", r.slope, r.target + r.slack)
}

pub fn stationary_phase(lab: &Lab, out: &PipelineOutput) -> Result<Outcome> {
    let r = out.report(super::probes::STATIONARY_PHASE).expect("probe present");
    let q = gaussian(&lab.grid, 16.0);
    let mut defect = 0.0f64;
    for &n in &lab.config.probe_ns {
        defect = defect.max(stationary_phase_symbol_defect(&lab.ops, &q, n)?);
    }
    Ok(Outcome::new(
        1,
        "stationary-phase decay",
        r.pass && defect <= 1e-6,
        format!("{}; symbol defect {:.2e} (limit 1e-6)", slope_text(r), defect),
    ))
}

pub fn gaussian_holder(lab: &Lab) -> Outcome {
    let samples = lab.config.probes.holder_samples;
    let mut violations = 0;
    let mut worst = 0.0f64;
    for alpha in [0.0, 0.5, 1.0, 2.0] {
        let bound = gaussian_holder_bound(alpha);
        for xi in holder_samples(samples) {
            let r = holder_ratio(alpha, xi);
            worst = worst.max(r / bound);
            if r > bound {
                violations += 1;
            }
        }
    }
    Outcome::new(
        2,
        "Gaussian-Hölder bound",
        violations == 0,
        format!("{violations} violations in 4 x {samples} samples; max ratio/bound {worst:.4}"),
    )
}

pub fn cauchy_operators(lab: &Lab) -> Result<Outcome> {
    let f = gaussian(&lab.grid, 16.0);
    let r1 = right_inverse_residual(&lab.ops, &f, false, 2)?;
    let r2 = right_inverse_residual(&lab.ops, &f, true, 2)?;
    let small = Arc::new(DiscGrid::new(32, 2.0)?);
    let ops = Transforms::new(&small)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let values = (0..small.len())
        .map(|i| {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if small.inside(i) { v } else { Complex64::default() }
        })
        .collect();
    let f = Field::from_values(&small, values)?;
    let mut oracle = 0.0f64;
    for bar in [false, true] {
        let fast = if bar { ops.cauchy_bar(&f) } else { ops.cauchy(&f) };
        let slow = direct_cauchy(&f, bar);
        let scale = slow.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let err = fast.values().iter().zip(slow.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        oracle = oracle.max(err / scale);
    }
    Ok(Outcome::new(
        3,
        "Cauchy operator correctness",
        r1 < 0.05 && r2 < 0.05 && oracle <= 1e-8,
        format!("dbar C residual {r1:.2e}, d Cbar residual {r2:.2e} (limit 0.05); direct-sum oracle {oracle:.2e} (limit 1e-8)"),
    ))
}

/// Random smooth fields: sums of three Gaussians with complex weights.
fn random_smooth_fields(count: usize, seed: u64) -> Vec<Vec<(Complex64, f64, Complex64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..3)
                .map(|_| {
                    let c = Complex64::from_polar(rng.gen_range(0.0..0.6), rng.gen_range(0.0..2.0 * PI));
                    let width = rng.gen_range(0.08..0.4);
                    let w = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    (c, width, w)
                })
                .collect()
        })
        .collect()
}

fn sample_field(grid: &Arc<DiscGrid>, terms: &[(Complex64, f64, Complex64)]) -> Field {
    Field::from_fn_masked(grid, |z| {
        terms
            .iter()
            .map(|&(c, width, w)| w * (-((z - c).norm_sqr()) / (width * width)).exp())
            .sum()
    })
}

/// Largest `||C f||_3 / ||f||_{6/5}` and `||C f||_inf / ||f||_{(2,1)}` per resolution.
pub fn oneil_ratios(lab: &Lab) -> Result<Vec<(usize, f64, f64)>> {
    let fields = random_smooth_fields(lab.config.probes.oneil_fields, 17);
    let mut out = Vec::new();
    for nodes in lab.config.probes.oneil_nodes {
        let grid = Arc::new(DiscGrid::new(nodes, lab.grid.half_width())?);
        let ops = Transforms::new(&grid)?;
        let (mut lp, mut sup) = (0.0f64, 0.0f64);
        for terms in &fields {
            let f = sample_field(&grid, terms);
            let c = ops.cauchy(&f);
            lp = lp.max(lp_norm(&c, 3.0)? / lp_norm(&f, p_star(3.0))?);
            sup = sup.max(lp_norm(&c, f64::INFINITY)? / lorentz_norm(&f, 2.0, 1.0)?);
        }
        out.push((nodes, lp, sup));
    }
    Ok(out)
}

pub fn oneil(lab: &Lab) -> Result<Outcome> {
    let r = oneil_ratios(lab)?;
    let (coarse, fine) = (r[0], r[r.len() - 1]);
    let pass = r.iter().all(|x| x.1.is_finite() && x.2.is_finite())
        && fine.1 <= 1.1 * coarse.1
        && fine.2 <= 1.1 * coarse.2;
    Ok(Outcome::new(
        4,
        "O'Neil inequalities",
        pass,
        format!(
            "L3/L6/5 ratio {:.4} -> {:.4}, Linf/L(2,1) ratio {:.4} -> {:.4} (N={} -> {}, growth limit 10%)",
            coarse.1, fine.1, coarse.2, fine.2, coarse.0, fine.0
        ),
    ))
}

pub fn conjugated_cauchy(out: &PipelineOutput) -> Outcome {
    let a = out.report(super::probes::CONJUGATED_CAUCHY_SUP).expect("probe present");
    let b = out
        .decay
        .iter()
        .find(|r| r.label == super::probes::CONJUGATED_CAUCHY)
        .expect("probe present");
    Outcome::new(
        5,
        "conjugated-Cauchy decay",
        a.pass && b.pass,
        format!("L3 {}; Linf {}", slope_text(b), slope_text(a)),
    )
}

pub const RESIDUAL_N: f64 = 32.0;

pub fn bukhgeim(lab: &Lab, out: &PipelineOutput) -> Result<Outcome> {
    let zero = bukhgeim_solve(
        &lab.ops,
        &Field::zeros(&lab.grid),
        &PhaseParams::new(lab.config.probe_ns[0], Complex64::default())?,
        Orientation::Holomorphic,
        lab.config.tolerances.fixed_point,
        cgo::DEFAULT_MAX_ITER,
    )?;
    let exact_one = zero.f.values().iter().all(|v| *v == Complex64::new(1.0, 0.0));
    let worst = out
        .remainder
        .contraction
        .iter()
        .filter(|c| c.0 >= RESIDUAL_N)
        .map(|c| c.1)
        .fold(0.0, f64::max);
    let q = lab.potential()?;
    let sol = bukhgeim_solve(
        &lab.ops,
        &q,
        &PhaseParams::new(RESIDUAL_N, Complex64::default())?,
        Orientation::Holomorphic,
        lab.config.tolerances.fixed_point,
        cgo::DEFAULT_MAX_ITER,
    )?;
    let res = cgo_residual(&sol, &q)?;
    let plain = pde_residual(&assemble_u(&sol)?, &q)?;
    let r = &out.remainder.report;
    Ok(Outcome::new(
        6,
        "Bukhgeim solver",
        exact_one && worst < 0.5 && r.pass && res < 0.1,
        format!(
            "q=0 exact: {exact_one}; contraction {worst:.2e} for n>=32 (limit 0.5); remainder {}; residual at n=32 {res:.2e} (limit 0.1, unfactored stencil {plain:.2e})",
            slope_text(r)
        ),
    ))
}

pub fn cutoff(lab: &Lab) -> Result<Outcome> {
    let grid = Arc::new(DiscGrid::new(lab.config.probes.cutoff_nodes, lab.grid.half_width())?);
    let h = grid.spacing();
    let mut pairs = Vec::new();
    let mut measure_ok = true;
    for &delta in &lab.config.probes.cutoff_deltas {
        let c = build_cutoff(&grid, delta, Complex64::default())?;
        measure_ok &= c.support_measure() <= PI * delta * delta + 4.0 * PI * delta * h;
        pairs.push((delta, w1p_norm(&c.over_conj_distance(), 1.5, None)?));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let target = 2.0 * (1.0 / 1.5 - 1.0);
    let r = DecayReport::fit("cutoff-w1l", pairs, target, 0.2)?;
    let within = (r.slope - target).abs() <= 0.2;
    Ok(Outcome::new(
        7,
        "cutoff scaling",
        within && measure_ok,
        format!(
            "slope {:.3} (target {target:.3} +/- 0.2, N={}); support measure within bound: {measure_ok}",
            r.slope,
            grid.nodes()
        ),
    ))
}

fn random_bump(grid: &Arc<DiscGrid>, rng: &mut ChaCha8Rng) -> Field {
    let c = Complex64::from_polar(rng.gen_range(0.0..0.5), rng.gen_range(0.0..2.0 * PI));
    let radius = rng.gen_range(0.2..0.45);
    let peak = rng.gen_range(0.5..5.0);
    bump(grid, c, radius, peak)
}

pub fn dn_and_alessandrini(lab: &Lab) -> Result<Outcome> {
    let zero = dn_map(&Field::zeros(&lab.grid), &lab.basis)?;
    let kk = lab.config.probes.dn_check_k as i64;
    let mut diag = zero.get(0, 0).norm();
    for k in (-kk..=kk).filter(|&k| k != 0) {
        diag = diag.max((zero.get(k, k).re + k.abs() as f64).abs() / k.abs() as f64);
        diag = diag.max(zero.get(k, k).im.abs());
    }
    // a complex potential, so the symmetry is not implied by conjugation
    let qc = bump(&lab.grid, Complex64::new(0.2, -0.1), 0.4, 3.0).scale(Complex64::new(1.0, 2.0));
    let sym = dn_map(&qc, &lab.basis)?.symmetry_defect();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let k_max = lab.basis.k_max() as i64;
    let mut worst = 0.0f64;
    for _ in 0..lab.config.probes.alessandrini_pairs {
        let q1 = random_bump(&lab.grid, &mut rng);
        let q2 = random_bump(&lab.grid, &mut rng);
        let (s1, s2) = (DirichletSolver::new(&q1)?, DirichletSolver::new(&q2)?);
        let da = dn_map_with(&s1, &lab.basis).difference(&dn_map_with(&s2, &lab.basis))?;
        let mut t1 = BoundaryVector::zeros(lab.basis.k_max());
        let mut t2 = BoundaryVector::zeros(lab.basis.k_max());
        for k in -k_max..=k_max {
            let decay = 1.0 / (1.0 + (k * k) as f64);
            t1.set(k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * decay);
            t2.set(k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * decay);
        }
        let u1 = s1.solve(&t1);
        let u2 = s2.solve(&t2);
        let lhs = integrate(&(&(&u1 * &(&q1 - &q2)) * &u2));
        let rhs = alessandrini_pairing(&da, &t1, &t2)?;
        worst = worst.max((lhs - rhs).norm() / lhs.norm());
    }
    Ok(Outcome::new(
        8,
        "DN map and Alessandrini identity",
        diag < 0.05 && sym < 0.02 && worst < 0.05,
        format!(
            "q=0 diagonal deviation {diag:.2e} for |k|<={kk} (limit 0.05); symmetry defect {sym:.2e} (limit 0.02); identity error {worst:.2e} over {} pairs (limit 0.05)",
            lab.config.probes.alessandrini_pairs
        ),
    ))
}

pub fn error_term(out: &PipelineOutput) -> Outcome {
    let r = out.report(super::probes::ERROR_TERM).expect("probe present");
    Outcome::new(9, "error-term integral", r.pass, slope_text(r))
}

pub fn log_stability(out: &PipelineOutput) -> Outcome {
    let s = &out.sweep;
    let included = s.records.iter().filter(|r| r.included).count();
    let good = [(1.0, 0.0), (0.5, 1.0), ((-1.0f64).exp(), 1.0), (1.0, 2.0)]
        .iter()
        .map(|&(a, b)| poly_log_scan(a, b))
        .all(|scan| scan.condition_met && scan.violations == 0);
    let bad = poly_log_scan(0.1, 1.0);
    let star = (-1.0f64 / 0.1).exp();
    let counterexample = !bad.condition_met && bad.violations > 0 && (bad.worst_x.ln() - star.ln()).abs() < 0.01;
    let pass = included >= 3 && s.envelope_holds && s.error_monotone && s.gap_monotone && good && counterexample;
    Outcome::new(
        10,
        "end-to-end log-stability",
        pass,
        format!(
            "{included} records, envelope C = {:.3e}, error monotone: {}, gap monotone: {}; poly-log: holds {good}, counterexample at x = {:.2e}",
            s.envelope_c.unwrap_or(f64::NAN),
            s.error_monotone,
            s.gap_monotone,
            bad.worst_x
        ),
    )
}

pub fn determinism(lab: &Lab, out: &PipelineOutput) -> Result<Outcome> {
    let first = pipeline_csvs(out)?;
    let second = pipeline_csvs(&run_pipeline(lab)?)?;
    let same = first == second;
    let bytes: usize = first.iter().map(|f| f.1.len()).sum();
    Ok(Outcome::new(
        11,
        "determinism",
        same,
        format!("{} CSV files, {bytes} bytes, identical on rerun: {same}", first.len()),
    ))
}

/// Runs the selected criteria, sharing one pipeline run.
pub fn run(lab: &Lab, ids: &[u8]) -> Result<(Vec<Outcome>, Option<PipelineOutput>)> {
    let needs_pipeline = ids.iter().any(|id| matches!(id, 1 | 5 | 6 | 9 | 10 | 11));
    let out = if needs_pipeline { Some(run_pipeline(lab)?) } else { None };
    let mut outcomes = Vec::new();
    for &id in ids {
        let o = match (id, out.as_ref()) {
            (1, Some(p)) => stationary_phase(lab, p)?,
            (2, _) => gaussian_holder(lab),
            (3, _) => cauchy_operators(lab)?,
            (4, _) => oneil(lab)?,
            (5, Some(p)) => conjugated_cauchy(p),
            (6, Some(p)) => bukhgeim(lab, p)?,
            (7, _) => cutoff(lab)?,
            (8, _) => dn_and_alessandrini(lab)?,
            (9, Some(p)) => error_term(p),
            (10, Some(p)) => log_stability(p),
            (11, Some(p)) => determinism(lab, p)?,
            _ => {
                return Err(crate::Error::InvalidArgument(format!("unknown criterion {id}")));
            }
        };
        outcomes.push(o);
    }
    Ok((outcomes, out))
}
