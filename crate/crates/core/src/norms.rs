//! Concrete norms: Lebesgue, Lorentz, Fourier-weighted Sobolev on the plane,
//! boundary Sobolev norms and the `H^{1/2} -> H^{-1/2}` operator norm.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diff;
use crate::disc::{BoundaryVector, Field};
use crate::error::{Error, Result};
use crate::fft::{signed_index, Fft2};
use crate::forward::DnMatrix;
use crate::quad::GL8;

/// Exponents derived from the a-priori regularity `W^{epsilon, a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub epsilon: f64,
    pub a: f64,
    pub theta: f64,
    pub r: f64,
    pub p: f64,
    /// Sobolev conjugate: `1/p* = 1/2 + 1/p`.
    pub p_star: f64,
}

impl SpaceParams {
    /// `theta = min(eps, 1/4)`, `r = theta/4`, `p = min(a, 4/(2 - theta))`.
    pub fn from_regularity(epsilon: f64, a: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("epsilon must be > 0, got {epsilon}")));
        }
        if !(a > 2.0) {
            return Err(Error::InvalidArgument(format!("a must be > 2, got {a}")));
        }
        let theta = epsilon.min(0.25);
        let r = theta / 4.0;
        let p = a.min(4.0 / (2.0 - theta));
        Ok(Self {
            epsilon,
            a,
            theta,
            r,
            p,
            p_star: p_star(p),
        })
    }

    pub fn inv_p_star(&self) -> f64 {
        0.5 + 1.0 / self.p
    }

    /// Exponent `(r - 1/p*) theta - (1 - theta)/5` of the contraction estimate.
    pub fn contraction_exponent(&self) -> f64 {
        (self.r - self.inv_p_star()) * self.theta - 0.2 * (1.0 - self.theta)
    }

    /// `1 - theta + r - 1/p*`, the decay exponent of the error-term integral.
    pub fn error_term_exponent(&self) -> f64 {
        1.0 - self.theta + self.r - self.inv_p_star()
    }

    /// Checks the ordering constraints the recipe guarantees.
    pub fn invariants_hold(&self) -> bool {
        let tol = 1e-12;
        self.theta > 0.0
            && self.theta <= 0.25
            && self.r > 0.0
            && self.r < self.inv_p_star()
            && self.p > 2.0
            && self.p < 2.0 / (1.0 - self.theta)
            && self.p_star > 1.0
            && self.p_star < 2.0
            && self.error_term_exponent() <= -self.theta / 2.0 + tol
    }
}

/// `p*` with `1/p* = 1/2 + 1/p`.
pub fn p_star(p: f64) -> f64 {
    1.0 / (0.5 + 1.0 / p)
}

fn masked_abs<'a>(f: &'a Field, region: Option<&'a [bool]>) -> impl Iterator<Item = f64> + 'a {
    let region = region.unwrap_or(f.grid().mask());
    f.values()
        .iter()
        .zip(region)
        .filter(|(_, &m)| m)
        .map(|(v, _)| v.norm())
}

/// `L^p` norm over the disc; `p = f64::INFINITY` gives the max norm.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    lp_norm_on(f, p, None)
}

/// `L^p` norm over an explicit node selection (defaults to the disc mask).
pub fn lp_norm_on(f: &Field, p: f64, region: Option<&[bool]>) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("L^p needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(masked_abs(f, region).fold(0.0, f64::max));
    }
    let w = f.grid().weight();
    let s: f64 = masked_abs(f, region).map(|a| a.powf(p)).sum();
    Ok((s * w).powf(1.0 / p))
}

fn decreasing_rearrangement(f: &Field) -> Vec<f64> {
    let mut vals: Vec<f64> = masked_abs(f, None).filter(|&a| a > 0.0).collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}


/// Lorentz norm `L^{(p,q)}` built on the maximal function
/// `f**(t) = (1/t) int_0^t f*`.
pub fn lorentz_norm(f: &Field, p: f64, q: f64) -> Result<f64> {
    let vals: Vec<f64> = masked_abs(f, None).collect();
    lorentz_norm_weighted(&vals, f.grid().weight(), p, q)
}

/// [`lorentz_norm`] of a step function taking the values `abs_values` on
/// cells of measure `w`.
pub fn lorentz_norm_weighted(abs_values: &[f64], w: f64, p: f64, q: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!("Lorentz norm needs p > 1, got {p}")));
    }
    if !(q > 0.0) {
        return Err(Error::InvalidArgument(format!("Lorentz norm needs q > 0, got {q}")));
    }
    let mut vals: Vec<f64> = abs_values.iter().copied().filter(|&a| a > 0.0).collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    if vals.is_empty() {
        return Ok(0.0);
    }
    let ip = 1.0 / p;

    if q.is_infinite() {
        // sup_t t^{1/p - 1} F(t); on each piece F = b + a t.
        let mut best = 0.0f64;
        let mut cum = 0.0;
        for (i, &a) in vals.iter().enumerate() {
            let t0 = i as f64 * w;
            let t1 = t0 + w;
            let b = cum - a * t0;
            let g = |t: f64| t.powf(ip - 1.0) * (b + a * t);
            best = best.max(g(t1));
            let crit = (p - 1.0) * b / a;
            if crit > t0 && crit < t1 {
                best = best.max(g(crit));
            }
            cum += a * w;
        }
        return Ok(best);
    }

    let e = q * ip - q - 1.0; // power of t in the integrand t^e F(t)^q
    let mut total = 0.0;
    let mut cum = 0.0;
    for (i, &a) in vals.iter().enumerate() {
        let t0 = i as f64 * w;
        let t1 = t0 + w;
        let b = cum - a * t0;
        if i == 0 {
            total += a.powf(q) * t1.powf(q * ip) / (q * ip);
        } else if q == 1.0 {
            total += b * (t1.powf(ip - 1.0) - t0.powf(ip - 1.0)) / (ip - 1.0)
                + a * (t1.powf(ip) - t0.powf(ip)) / ip;
        } else {
            let mid = 0.5 * (t0 + t1);
            let half = 0.5 * w;
            total += GL8
                .iter()
                .map(|&(x, wt)| {
                    let t = mid + half * x;
                    wt * t.powf(e) * (b + a * t).powf(q)
                })
                .sum::<f64>()
                * half;
        }
        cum += a * w;
    }
    let t_end = vals.len() as f64 * w;
    total += cum.powf(q) * t_end.powf(q * ip - q) / (q - q * ip);
    Ok(total.powf(1.0 / q))
}

/// Classical Lorentz quasi-norm built on `f*` directly; equals `L^p` for `q = p`.
pub fn lorentz_quasi_norm(f: &Field, p: f64, q: f64) -> Result<f64> {
    if !(p > 1.0) || !(q > 0.0) {
        return Err(Error::InvalidArgument(format!("invalid Lorentz indices ({p}, {q})")));
    }
    let vals = decreasing_rearrangement(f);
    let w = f.grid().weight();
    if q.is_infinite() {
        return Ok(vals
            .iter()
            .enumerate()
            .map(|(i, &a)| a * ((i + 1) as f64 * w).powf(1.0 / p))
            .fold(0.0, f64::max));
    }
    let s = q / p;
    let total: f64 = vals
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let t0 = i as f64 * w;
            a.powf(q) * ((t0 + w).powf(s) - t0.powf(s)) / s
        })
        .sum();
    Ok(total.powf(1.0 / q))
}

/// `W^{alpha,2}(C)` norm of the zero extension of `f` beyond the square,
/// through the periodic DFT on the square. Reads every node, not just the disc.
pub fn sobolev_frac_norm(f: &Field, alpha: f64) -> f64 {
    let g = f.grid();
    let n = g.nodes();
    let fft = Fft2::new(n);
    let mut buf = f.values().to_vec();
    fft.forward(&mut buf);
    let dxi = 2.0 * std::f64::consts::PI / (2.0 * g.half_width());
    let mut total = 0.0;
    for my in 0..n {
        let ky = signed_index(my, n) as f64 * dxi;
        for mx in 0..n {
            let kx = signed_index(mx, n) as f64 * dxi;
            let weight = (1.0 + kx * kx + ky * ky).powf(alpha);
            total += weight * buf[my * n + mx].norm_sqr();
        }
    }
    (total * g.weight() / (n * n) as f64).sqrt()
}

/// `(sum (1 + k^2)^s |c_k|^2)^{1/2}` for `|s| <= 1`.
pub fn boundary_sobolev_norm(v: &BoundaryVector, s: f64) -> Result<f64> {
    if s.abs() > 1.0 {
        return Err(Error::InvalidArgument(format!("boundary smoothness |s| <= 1, got {s}")));
    }
    let k_max = v.k_max() as i64;
    let total: f64 = (-k_max..=k_max)
        .map(|k| (1.0 + (k * k) as f64).powf(s) * v.get(k).norm_sqr())
        .sum();
    Ok(total.sqrt())
}

/// Largest singular value of `D^{-1/2} A D^{-1/2}`, `D = diag((1+k^2)^{1/2})`.
pub fn weighted_operator_norm(entries: &DMatrix<Complex64>, k_max: usize) -> f64 {
    let dim = 2 * k_max + 1;
    assert_eq!(entries.shape(), (dim, dim));
    let w: Vec<f64> = (0..dim)
        .map(|s| {
            let k = s as f64 - k_max as f64;
            (1.0 + k * k).powf(-0.25)
        })
        .collect();
    let scaled = DMatrix::from_fn(dim, dim, |j, k| entries[(j, k)] * (w[j] * w[k]));
    if scaled.iter().all(|v| *v == Complex64::default()) {
        return 0.0;
    }
    scaled.singular_values().max()
}

/// `H^{1/2} -> H^{-1/2}` norm of a DN matrix.
pub fn dn_operator_norm(a: &DnMatrix) -> f64 {
    weighted_operator_norm(a.entries(), a.k_max())
}

/// Discrete `W^{1,p}` norm `(||f||_p^p + ||dx f||_p^p + ||dy f||_p^p)^{1/p}`
/// over `region` (defaults to the disc), centered differences.
pub fn w1p_norm(f: &Field, p: f64, region: Option<&[bool]>) -> Result<f64> {
    let fx = diff::dx(f);
    let fy = diff::dy(f);
    if p.is_infinite() {
        let a = lp_norm_on(f, p, region)?;
        let b = lp_norm_on(&fx, p, region)?;
        let c = lp_norm_on(&fy, p, region)?;
        return Ok(a.max(b).max(c));
    }
    let a = lp_norm_on(f, p, region)?;
    let b = lp_norm_on(&fx, p, region)?;
    let c = lp_norm_on(&fy, p, region)?;
    Ok((a.powf(p) + b.powf(p) + c.powf(p)).powf(1.0 / p))
}

/// Endpoint proxy `||f||_p^{1-theta} ||f||_{1,p}^theta` for the intermediate
/// space between `L^p` and `W^{1,p}`.
pub fn interpolated_proxy(f: &Field, p: f64, theta: f64, region: Option<&[bool]>) -> Result<f64> {
    let lo = lp_norm_on(f, p, region)?;
    let hi = w1p_norm(f, p, region)?;
    Ok(lo.powf(1.0 - theta) * hi.powf(theta))
}
