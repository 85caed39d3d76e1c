//! Recovery of `Q = q1 - q2` at stationary points from DN data, and the
//! error-term integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cgo::{assemble_u, bukhgeim_solve, Orientation};
use crate::disc::{trace, BoundaryBasis, Field};
use crate::error::{Error, Result};
use crate::forward::{alessandrini_pairing, dn_map, DnMatrix};
use crate::norms::lp_norm;
use crate::transforms::{PhaseParams, Transforms};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// oscillating solutions from the fixed-point solve
    Cgo,
    /// bare exponentials, `f = 1`
    Born,
}

/// Values of `Q_rec` over a set of stationary points; `None` where a solve failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub n: f64,
    pub mode: Mode,
    pub z0: Vec<Complex64>,
    pub values: Vec<Option<Complex64>>,
}

impl Reconstruction {
    pub fn missing(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Discrete `L^2` distance to `reference(z0)` over the point set, each
    /// point carrying the area `cell`.
    pub fn l2_distance(&self, cell: f64, reference: impl Fn(Complex64) -> Complex64) -> f64 {
        let s: f64 = self
            .z0
            .iter()
            .zip(&self.values)
            .filter_map(|(z, v)| v.map(|v| (v - reference(*z)).norm_sqr()))
            .sum();
        (s * cell).sqrt()
    }
}

fn solution(
    ops: &Transforms,
    q: &Field,
    p: &PhaseParams,
    orientation: Orientation,
    mode: Mode,
    tol: f64,
) -> Result<Field> {
    match mode {
        Mode::Born => Ok(Field::from_fn(ops.grid(), |z| orientation.exponential(p, z))),
        Mode::Cgo => assemble_u(&bukhgeim_solve(ops, q, p, orientation, tol, crate::cgo::DEFAULT_MAX_ITER)?),
    }
}

/// `(2n/pi) ((Lambda_1 - Lambda_2) Tr u1, Tr u2)` at each `z0`, with `u1`
/// holomorphic for `q1` and `u2` anti-holomorphic for `q2`.
#[allow(clippy::too_many_arguments)]
pub fn reconstruct_with(
    ops: &Transforms,
    basis: &BoundaryBasis,
    da: &DnMatrix,
    q1: &Field,
    q2: &Field,
    n: f64,
    z0_set: &[Complex64],
    mode: Mode,
    tol: f64,
) -> Result<Reconstruction> {
    if !da.matches(basis) {
        return Err(Error::BasisMismatch(format!("DN matrix K_max {} vs basis {}", da.k_max(), basis.k_max())));
    }
    let values = z0_set
        .iter()
        .map(|&z0| -> Option<Complex64> {
            let p = PhaseParams::new(n, z0).ok()?;
            let u1 = solution(ops, q1, &p, Orientation::Holomorphic, mode, tol).ok()?;
            let u2 = solution(ops, q2, &p, Orientation::AntiHolomorphic, mode, tol).ok()?;
            let t1 = trace(&u1, basis).ok()?;
            let t2 = trace(&u2, basis).ok()?;
            let pairing = alessandrini_pairing(da, &t1, &t2).ok()?;
            Some(pairing * (2.0 * n / PI))
        })
        .collect();
    Ok(Reconstruction {
        n,
        mode,
        z0: z0_set.to_vec(),
        values,
    })
}

/// [`reconstruct_with`] after computing both DN matrices.
pub fn reconstruct_potential(
    ops: &Transforms,
    basis: &BoundaryBasis,
    q1: &Field,
    q2: &Field,
    n: f64,
    z0_set: &[Complex64],
    mode: Mode,
) -> Result<Reconstruction> {
    let da = dn_map(q1, basis)?.difference(&dn_map(q2, basis)?)?;
    reconstruct_with(ops, basis, &da, q1, q2, n, z0_set, mode, crate::cgo::DEFAULT_TOL)
}

/// `L^2(z0)` norm over the disc of `z0 -> (2n/pi) int e^{inR} Q r dm`, with
/// `r` a single surrogate for the z0-indexed remainder.
pub fn error_term_integral(ops: &Transforms, q: &Field, r: &Field, n: f64) -> Result<f64> {
    q.check_grid(r)?;
    lp_norm(&ops.stationary_phase(&(q * r), n)?, 2.0)
}
