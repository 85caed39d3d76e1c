//! Oscillating solutions `u = e^{in(z-z0)^2} f` (or the anti-holomorphic
//! mirror) of `Laplace u + q u = 0` by Picard iteration on the remainder `f`.
//!
//! With `R = (z-z0)^2 + conj(z-z0)^2` the remainder of the holomorphic family
//! solves `f = 1 - C(e^{-inR} Cbar(e^{inR} q f)) / 4` and the anti-holomorphic
//! one `f = 1 - Cbar(e^{-inR} C(e^{inR} q f)) / 4`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diff;
use crate::disc::{DiscGrid, Field};
use crate::error::{Error, Result};
use crate::norms::{lp_norm_on, SpaceParams};
use crate::transforms::{phase_factor, PhaseParams, Transforms};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;
/// Consecutive residual increases that count as divergence.
pub const DIVERGENCE_RUN: usize = 5;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// `u = e^{in(z-z0)^2} f`
    Holomorphic,
    /// `u = e^{in(conj z - conj z0)^2} f`
    AntiHolomorphic,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Self::Holomorphic => Self::AntiHolomorphic,
            Self::AntiHolomorphic => Self::Holomorphic,
        }
    }

    /// The exponential `e^{in w^2}` or `e^{in conj(w)^2}` at `z`.
    pub fn exponential(self, p: &PhaseParams, z: Complex64) -> Complex64 {
        let w = match self {
            Self::Holomorphic => z - p.z0,
            Self::AntiHolomorphic => (z - p.z0).conj(),
        };
        (I * p.n * w * w).exp()
    }
}

#[derive(Debug, Clone)]
pub struct CgoSolution {
    pub f: Field,
    pub params: PhaseParams,
    pub orientation: Orientation,
    pub iterations: usize,
    pub converged: bool,
    /// `||f_{k+1} - f_k||_2 / ||f_{k+1}||_2` per iteration
    pub residual_history: Vec<f64>,
}

impl CgoSolution {
    /// Ratio of the last two residuals above roundoff level.
    pub fn contraction_factor(&self) -> Option<f64> {
        let h: Vec<f64> = self.residual_history.iter().copied().filter(|&r| r > 1e-13).collect();
        (h.len() >= 2).then(|| h[h.len() - 1] / h[h.len() - 2])
    }

    /// Largest ratio of successive residuals above roundoff level.
    pub fn worst_contraction(&self) -> Option<f64> {
        let h: Vec<f64> = self.residual_history.iter().copied().filter(|&r| r > 1e-13).collect();
        h.windows(2).map(|w| w[1] / w[0]).reduce(f64::max)
    }
}

/// One application of the fixed-point map.
pub fn fixed_point_map(
    ops: &Transforms,
    q: &Field,
    f: &Field,
    p: &PhaseParams,
    orientation: Orientation,
) -> Field {
    let grid = ops.grid();
    let plus = phase_factor(grid, p, 1.0);
    let minus = plus.conj();
    let src = &(&plus * q) * f;
    let inner = match orientation {
        Orientation::Holomorphic => ops.cauchy_bar(&src),
        Orientation::AntiHolomorphic => ops.cauchy(&src),
    };
    let mid = &minus * &inner;
    let outer = match orientation {
        Orientation::Holomorphic => ops.cauchy(&mid),
        Orientation::AntiHolomorphic => ops.cauchy_bar(&mid),
    };
    outer.map(|v| Complex64::new(1.0, 0.0) - v * 0.25)
}

fn l2_masked(f: &Field) -> f64 {
    let g = f.grid();
    let s: f64 = f
        .values()
        .iter()
        .zip(g.mask())
        .filter(|(_, &m)| m)
        .map(|(v, _)| v.norm_sqr())
        .sum();
    (s * g.weight()).sqrt()
}

/// Picard iteration from `f = 1`.
pub fn bukhgeim_solve(
    ops: &Transforms,
    q: &Field,
    p: &PhaseParams,
    orientation: Orientation,
    tol: f64,
    max_iter: usize,
) -> Result<CgoSolution> {
    if !q.same_grid(&Field::zeros(ops.grid())) {
        return Err(Error::GridMismatch);
    }
    let mut f = Field::constant(ops.grid(), Complex64::new(1.0, 0.0));
    let mut history = Vec::new();
    let mut rising = 0;
    for it in 1..=max_iter {
        let next = fixed_point_map(ops, q, &f, p, orientation);
        let change = l2_masked(&(&next - &f)) / l2_masked(&next).max(f64::MIN_POSITIVE);
        f = next;
        if let Some(&last) = history.last() {
            rising = if change > last { rising + 1 } else { 0 };
        }
        history.push(change);
        if !change.is_finite() || rising >= DIVERGENCE_RUN {
            return Err(Error::Divergence { history });
        }
        if change <= tol {
            return Ok(CgoSolution {
                f,
                params: *p,
                orientation,
                iterations: it,
                converged: true,
                residual_history: history,
            });
        }
    }
    Ok(CgoSolution {
        f,
        params: *p,
        orientation,
        iterations: max_iter,
        converged: false,
        residual_history: history,
    })
}

/// `u = e^{in(z-z0)^2} f` or its anti-holomorphic mirror, on the whole square.
pub fn assemble_u(sol: &CgoSolution) -> Result<Field> {
    if !sol.converged {
        return Err(Error::NotConverged);
    }
    Ok(sol
        .f
        .map_with_point(|z, v| sol.orientation.exponential(&sol.params, z) * v))
}

fn w12_norm_from_gradient(u: &Field, grad_sq: impl Fn(usize) -> f64, region: &[bool]) -> f64 {
    let g = u.grid();
    let s: f64 = (0..g.len())
        .filter(|&i| region[i])
        .map(|i| u.values()[i].norm_sqr() + grad_sq(i))
        .sum();
    (s * g.weight()).sqrt()
}

/// `||Laplace_h u + q u||_2 / ||u||_{W^{1,2}}` away from a two-cell collar,
/// all derivatives by finite differences.
pub fn pde_residual(u: &Field, q: &Field) -> Result<f64> {
    u.check_grid(q)?;
    let region = u.grid().interior(2);
    let r = &diff::laplacian(u) + &(q * u);
    let (ux, uy) = (diff::dx(u), diff::dy(u));
    let den = w12_norm_from_gradient(
        u,
        |i| ux.values()[i].norm_sqr() + uy.values()[i].norm_sqr(),
        &region,
    );
    Ok(lp_norm_on(&r, 2.0, Some(&region))? / den)
}

/// Residual of the same equation with the exponential differentiated exactly:
/// for the holomorphic family `Laplace u + q u = e^{in w^2}(Laplace f +
/// 8 i n w dbar f + q f)`, and finite differences only act on `f`.
/// Normalized by `||u||_{W^{1,2}}` with the same product rule.
pub fn cgo_residual(sol: &CgoSolution, q: &Field) -> Result<f64> {
    sol.f.check_grid(q)?;
    let f = &sol.f;
    let grid = f.grid();
    let region = grid.interior(2);
    let p = sol.params;
    let lap = diff::laplacian(f);
    // derivative of f along which the exponential varies, and the other one
    let (along, across) = match sol.orientation {
        Orientation::Holomorphic => (diff::dbar(f), diff::d(f)),
        Orientation::AntiHolomorphic => (diff::d(f), diff::dbar(f)),
    };
    let mut r = Field::zeros(grid);
    let mut grad = vec![0.0; grid.len()];
    for i in 0..grid.len() {
        let z = grid.point(i);
        let w = match sol.orientation {
            Orientation::Holomorphic => z - p.z0,
            Orientation::AntiHolomorphic => (z - p.z0).conj(),
        };
        let e = sol.orientation.exponential(&p, z);
        let fv = f.values()[i];
        r.values_mut()[i] = e * (lap.values()[i] + I * 8.0 * p.n * w * along.values()[i] + q.values()[i] * fv);
        // |grad u|^2 = 2(|d u|^2 + |dbar u|^2)
        let varying = across.values()[i] + I * 2.0 * p.n * w * fv;
        grad[i] = 2.0 * (e.norm_sqr()) * (varying.norm_sqr() + along.values()[i].norm_sqr());
    }
    let u = assemble_u(sol)?;
    let den = w12_norm_from_gradient(&u, |i| grad[i], &region);
    Ok(lp_norm_on(&r, 2.0, Some(&region))? / den)
}

/// `max(1, (C_rp M)^{-1/e})` with `e = (r - 1/p*) theta - (1 - theta)/5`.
pub fn n0_threshold(sp: &SpaceParams, m: f64, c_rp: f64) -> Result<f64> {
    if !(m > 0.0) || !(c_rp > 0.0) {
        return Err(Error::InvalidArgument("M and C_rp must be positive".into()));
    }
    let e = n0_exponent(sp);
    if !(e < 0.0) {
        return Err(Error::InvalidArgument(format!("threshold exponent {e} is not negative")));
    }
    Ok((c_rp * m).powf(-1.0 / e).max(1.0))
}

pub fn n0_exponent(sp: &SpaceParams) -> f64 {
    (sp.r - sp.inv_p_star()) * sp.theta - (1.0 - sp.theta) / 5.0
}

/// Smooth cutoff vanishing near `z0`.
#[derive(Debug, Clone)]
pub struct CutoffField {
    pub h: Field,
    pub delta: f64,
    pub z0: Complex64,
}

/// `6t^5 - 15t^4 + 10t^3` on `[0, 1]`, clamped outside.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

/// `h(z) = S(|z - z0| / delta)` with `S = 0` on `[0, 1/2]`, `S = 1` on
/// `[1, inf)`. Sampled on the whole square.
pub fn build_cutoff(grid: &Arc<DiscGrid>, delta: f64, z0: Complex64) -> Result<CutoffField> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
    }
    if delta / 2.0 <= 2.0 * grid.spacing() {
        return Err(Error::GridTooCoarse {
            what: "cutoff",
            spacing: grid.spacing(),
            limit: delta / 4.0,
        });
    }
    let h = Field::from_fn(grid, |z| {
        let s = (z - z0).norm() / delta;
        Complex64::new(smoothstep(2.0 * (s - 0.5)), 0.0)
    });
    Ok(CutoffField { h, delta, z0 })
}

impl CutoffField {
    /// Area of the disc nodes where `h < 1`.
    pub fn support_measure(&self) -> f64 {
        let g = self.h.grid();
        let count = (0..g.len())
            .filter(|&i| g.inside(i) && self.h.values()[i].re < 1.0)
            .count();
        count as f64 * g.weight()
    }

    /// `h / conj(z - z0)`, zero where `h` vanishes.
    pub fn over_conj_distance(&self) -> Field {
        self.h.map_with_point(|z, v| {
            if v == Complex64::default() {
                v
            } else {
                v / (z - self.z0).conj()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: usize) -> (Arc<DiscGrid>, Transforms) {
        let g = Arc::new(DiscGrid::new(n, 2.0).unwrap());
        let t = Transforms::new(&g).unwrap();
        (g, t)
    }

    fn bump(g: &Arc<DiscGrid>, amp: f64) -> Field {
        Field::from_fn_masked(g, |z| {
            let s2 = ((z - Complex64::new(0.1, -0.2)) / 0.5).norm_sqr();
            if s2 < 1.0 {
                Complex64::new(amp * (1.0 + 1.0 / (s2 - 1.0)).exp(), 0.0)
            } else {
                Complex64::default()
            }
        })
    }

    #[test]
    fn zero_potential_is_fixed_in_one_step() {
        let (g, t) = setup(32);
        let p = PhaseParams::new(5.0, Complex64::new(0.2, 0.1)).unwrap();
        for o in [Orientation::Holomorphic, Orientation::AntiHolomorphic] {
            let sol = bukhgeim_solve(&t, &Field::zeros(&g), &p, o, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            assert!(sol.converged);
            assert_eq!(sol.iterations, 1);
            assert!(sol.f.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
            let u = assemble_u(&sol).unwrap();
            for (i, v) in u.values().iter().enumerate() {
                assert_eq!(*v, o.exponential(&p, g.point(i)));
            }
        }
    }

    #[test]
    fn converged_solution_is_a_fixed_point() {
        let (g, t) = setup(64);
        let q = bump(&g, 3.0);
        let p = PhaseParams::new(8.0, Complex64::new(0.1, 0.0)).unwrap();
        let tol = 1e-9;
        let sol = bukhgeim_solve(&t, &q, &p, Orientation::Holomorphic, tol, DEFAULT_MAX_ITER).unwrap();
        assert!(sol.converged);
        let again = fixed_point_map(&t, &q, &sol.f, &p, Orientation::Holomorphic);
        let change = l2_masked(&(&again - &sol.f)) / l2_masked(&sol.f);
        assert!(change <= 2.0 * tol, "{change}");
    }

    #[test]
    fn reflection_maps_orientations() {
        // f for the reflected potential and centre, other orientation, is f(conj z)
        let (g, t) = setup(64);
        let q = Field::from_fn_masked(&g, |z| Complex64::new(2.0 + z.re, z.im * z.re));
        let p = PhaseParams::new(6.0, Complex64::new(0.2, 0.15)).unwrap();
        let pr = PhaseParams::new(6.0, p.z0.conj()).unwrap();
        let a = bukhgeim_solve(&t, &q, &p, Orientation::Holomorphic, 1e-12, 200).unwrap();
        let b = bukhgeim_solve(&t, &q.reflect(), &pr, Orientation::AntiHolomorphic, 1e-12, 200).unwrap();
        let fr = a.f.reflect();
        let err = l2_masked(&(&fr - &b.f)) / l2_masked(&b.f);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn unconverged_input_is_refused() {
        let (g, t) = setup(32);
        let q = bump(&g, 3.0);
        let p = PhaseParams::new(4.0, Complex64::default()).unwrap();
        let sol = bukhgeim_solve(&t, &q, &p, Orientation::Holomorphic, 1e-14, 2).unwrap();
        assert!(!sol.converged);
        assert!(matches!(assemble_u(&sol), Err(Error::NotConverged)));
    }

    #[test]
    fn large_potential_diverges() {
        let (g, t) = setup(32);
        let q = bump(&g, 400.0);
        let p = PhaseParams::new(1.0, Complex64::default()).unwrap();
        match bukhgeim_solve(&t, &q, &p, Orientation::Holomorphic, 1e-10, 200) {
            Err(Error::Divergence { history }) => assert!(history.len() >= DIVERGENCE_RUN),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn exponential_residual_vanishes_with_refinement() {
        let p = PhaseParams::new(4.0, Complex64::new(0.1, -0.1)).unwrap();
        let mut last = f64::INFINITY;
        for n in [64, 128, 256] {
            let g = Arc::new(DiscGrid::new(n, 2.0).unwrap());
            let u = Field::from_fn(&g, |z| Orientation::Holomorphic.exponential(&p, z));
            let r = pde_residual(&u, &Field::zeros(&g)).unwrap();
            assert!(r < last / 3.0, "N={n}: {r}");
            last = r;
            let scaled = pde_residual(&u.scale(Complex64::new(3.0, -2.0)), &Field::zeros(&g)).unwrap();
            assert!((scaled - r).abs() < 1e-12 * r.max(1e-300));
        }
    }

    #[test]
    fn threshold_formula() {
        let sp = SpaceParams::from_regularity(0.25, 3.0).unwrap();
        let e = n0_exponent(&sp);
        let expect = (1.0 / 16.0 - 15.0 / 16.0) * 0.25 - 0.2 * 0.75;
        assert!((e - expect).abs() < 1e-14);
        assert_eq!(n0_threshold(&sp, 1.0, 1.0).unwrap(), 1.0);
        let mut last = 0.0;
        for m in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let v = n0_threshold(&sp, m, 1.0).unwrap();
            assert!(v >= 1.0 && v >= last);
            last = v;
        }
        assert!(n0_threshold(&sp, 0.0, 1.0).is_err());
    }

    #[test]
    fn cutoff_shape() {
        let g = Arc::new(DiscGrid::new(128, 2.0).unwrap());
        let z0 = Complex64::new(0.1, 0.2);
        let c = build_cutoff(&g, 0.3, z0).unwrap();
        for (i, v) in c.h.values().iter().enumerate() {
            let r = (g.point(i) - z0).norm();
            assert!(v.re >= 0.0 && v.re <= 1.0 && v.im == 0.0);
            if r <= 0.15 {
                assert_eq!(v.re, 0.0);
            }
            if r >= 0.3 {
                assert_eq!(v.re, 1.0);
            }
        }
        let h = g.spacing();
        assert!(c.support_measure() <= std::f64::consts::PI * (0.09 + 4.0 * 0.3 * h));
        assert!(build_cutoff(&g, 0.05, z0).is_err());
        assert!(build_cutoff(&g, 1.2, z0).is_err());
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
    }
}
