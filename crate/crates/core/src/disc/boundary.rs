use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::Field;
use crate::error::{Error, Result};

/// Largest grid spacing for which boundary interpolation is accepted.
pub const MAX_TRACE_SPACING: f64 = 0.1;

/// Uniform boundary nodes `phi_m = 2 pi m / M` and trigonometric modes
/// `e^{ik phi}`, `|k| <= K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryBasis {
    #[serde(rename = "M_angles")]
    m_angles: usize,
    #[serde(rename = "K_max")]
    k_max: usize,
}

impl Default for BoundaryBasis {
    fn default() -> Self {
        Self {
            m_angles: 256,
            k_max: 32,
        }
    }
}

impl BoundaryBasis {
    pub fn new(m_angles: usize, k_max: usize) -> Result<Self> {
        if !m_angles.is_power_of_two() || m_angles < 4 {
            return Err(Error::InvalidArgument(format!(
                "M_angles must be a power of two >= 4, got {m_angles}"
            )));
        }
        if k_max + 1 > m_angles / 2 {
            return Err(Error::InvalidArgument(format!(
                "K_max = {k_max} exceeds M_angles/2 - 1 = {}",
                m_angles / 2 - 1
            )));
        }
        Ok(Self { m_angles, k_max })
    }

    pub fn m_angles(&self) -> usize {
        self.m_angles
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Number of modes, `2K + 1`.
    pub fn dim(&self) -> usize {
        2 * self.k_max + 1
    }

    pub fn angle(&self, m: usize) -> f64 {
        2.0 * PI * m as f64 / self.m_angles as f64
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m_angles).map(|m| self.angle(m))
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.angles().map(|phi| Complex64::from_polar(1.0, phi))
    }

    /// Frequencies in storage order, `-K..=K`.
    pub fn frequencies(&self) -> impl Iterator<Item = i64> {
        let k = self.k_max as i64;
        -k..=k
    }

    /// Storage slot of frequency `k`.
    pub fn slot(&self, k: i64) -> Option<usize> {
        let kk = self.k_max as i64;
        (-kk..=kk).contains(&k).then(|| (k + kk) as usize)
    }

    pub fn frequency(&self, slot: usize) -> i64 {
        slot as i64 - self.k_max as i64
    }
}

/// Trigonometric coefficients `c_k`, `|k| <= K`, of a boundary function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryVector {
    k_max: usize,
    coeffs: Vec<Complex64>,
}

impl BoundaryVector {
    pub fn zeros(k_max: usize) -> Self {
        Self {
            k_max,
            coeffs: vec![Complex64::default(); 2 * k_max + 1],
        }
    }

    pub fn from_coeffs(k_max: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * k_max + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                2 * k_max + 1,
                coeffs.len()
            )));
        }
        Ok(Self { k_max, coeffs })
    }

    /// The single mode `e^{ik phi}`.
    pub fn unit(k_max: usize, k: i64) -> Self {
        let mut v = Self::zeros(k_max);
        v.set(k, Complex64::new(1.0, 0.0));
        v
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, k: i64) -> Complex64 {
        let kk = self.k_max as i64;
        if k.abs() > kk {
            Complex64::default()
        } else {
            self.coeffs[(k + kk) as usize]
        }
    }

    /// Sets mode `k`; panics if `|k| > K`.
    pub fn set(&mut self, k: i64, value: Complex64) {
        let kk = self.k_max as i64;
        assert!(k.abs() <= kk, "frequency {k} outside |k| <= {kk}");
        self.coeffs[(k + kk) as usize] = value;
    }

    pub fn matches(&self, basis: &BoundaryBasis) -> bool {
        self.k_max == basis.k_max()
    }

    /// Value of the trigonometric polynomial at angle `phi`.
    pub fn evaluate(&self, phi: f64) -> Complex64 {
        let kk = self.k_max as i64;
        let step = Complex64::from_polar(1.0, phi);
        let mut e = Complex64::from_polar(1.0, -(kk as f64) * phi);
        let mut acc = Complex64::default();
        for c in &self.coeffs {
            acc += c * e;
            e *= step;
        }
        acc
    }

    /// Discrete Fourier analysis of samples at the basis nodes.
    pub fn from_samples(basis: &BoundaryBasis, samples: &[Complex64]) -> Result<Self> {
        let m = basis.m_angles();
        if samples.len() != m {
            return Err(Error::BasisMismatch(format!(
                "expected {m} samples, got {}",
                samples.len()
            )));
        }
        let mut buf = samples.to_vec();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let scale = 1.0 / m as f64;
        let coeffs = basis
            .frequencies()
            .map(|k| buf[k.rem_euclid(m as i64) as usize] * scale)
            .collect();
        Ok(Self {
            k_max: basis.k_max(),
            coeffs,
        })
    }

    /// Synthesis at the basis nodes.
    pub fn to_samples(&self, basis: &BoundaryBasis) -> Result<Vec<Complex64>> {
        if !self.matches(basis) {
            return Err(Error::BasisMismatch(format!(
                "vector has K_max = {}, basis has {}",
                self.k_max,
                basis.k_max()
            )));
        }
        let m = basis.m_angles();
        let mut buf = vec![Complex64::default(); m];
        for (slot, c) in self.coeffs.iter().enumerate() {
            let k = basis.frequency(slot);
            buf[k.rem_euclid(m as i64) as usize] += c;
        }
        FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        Ok(buf)
    }

    /// Coefficient-wise product with a scalar.
    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            k_max: self.k_max,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.k_max, other.k_max);
        Self {
            k_max: self.k_max,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Bilinear interpolation of `f` at an arbitrary point of the square.
pub fn interpolate(f: &Field, z: Complex64) -> Complex64 {
    let g = f.grid();
    let n = g.nodes();
    let h = g.spacing();
    let sx = (z.re + g.half_width()) / h - 0.5;
    let sy = (z.im + g.half_width()) / h - 0.5;
    let j0 = (sx.floor() as i64).clamp(0, n as i64 - 2) as usize;
    let k0 = (sy.floor() as i64).clamp(0, n as i64 - 2) as usize;
    let tx = sx - j0 as f64;
    let ty = sy - k0 as f64;
    let v00 = f.at(j0, k0);
    let v10 = f.at(j0 + 1, k0);
    let v01 = f.at(j0, k0 + 1);
    let v11 = f.at(j0 + 1, k0 + 1);
    v00 * ((1.0 - tx) * (1.0 - ty)) + v10 * (tx * (1.0 - ty)) + v01 * ((1.0 - tx) * ty) + v11 * (tx * ty)
}

/// Values of `f` at the basis nodes on the unit circle.
pub fn trace_samples(f: &Field, basis: &BoundaryBasis) -> Result<Vec<Complex64>> {
    let h = f.grid().spacing();
    if h > MAX_TRACE_SPACING {
        return Err(Error::GridTooCoarse {
            what: "boundary trace",
            spacing: h,
            limit: MAX_TRACE_SPACING,
        });
    }
    Ok(basis.points().map(|z| interpolate(f, z)).collect())
}

/// Boundary trace of `f` as trigonometric coefficients.
///
/// The interpolation stencil straddles the circle, so `f` must carry valid
/// values on the nodes just outside the disc.
pub fn trace(f: &Field, basis: &BoundaryBasis) -> Result<BoundaryVector> {
    BoundaryVector::from_samples(basis, &trace_samples(f, basis)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::DiscGrid;
    use std::sync::Arc;

    fn grid() -> Arc<DiscGrid> {
        Arc::new(DiscGrid::new(256, 2.0).unwrap())
    }

    #[test]
    fn basis_validation() {
        assert!(BoundaryBasis::new(100, 10).is_err());
        assert!(BoundaryBasis::new(64, 32).is_err());
        assert!(BoundaryBasis::new(64, 31).is_ok());
    }

    #[test]
    fn modes_are_discretely_orthonormal() {
        let b = BoundaryBasis::new(64, 31).unwrap();
        for k in b.frequencies() {
            for l in b.frequencies() {
                let s: Complex64 = b
                    .angles()
                    .map(|phi| Complex64::from_polar(1.0, (k - l) as f64 * phi))
                    .sum::<Complex64>()
                    / b.m_angles() as f64;
                let expect = if k == l { 1.0 } else { 0.0 };
                assert!((s - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn analysis_synthesis_round_trip() {
        let b = BoundaryBasis::default();
        let coeffs = (0..b.dim())
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let v = BoundaryVector::from_coeffs(b.k_max(), coeffs).unwrap();
        let samples = v.to_samples(&b).unwrap();
        for (m, s) in samples.iter().enumerate() {
            assert!((s - v.evaluate(b.angle(m))).norm() < 1e-11);
        }
        let back = BoundaryVector::from_samples(&b, &samples).unwrap();
        for (a, c) in v.coeffs().iter().zip(back.coeffs()) {
            assert!((a - c).norm() < 1e-12);
        }
    }

    #[test]
    fn trace_of_z() {
        let g = grid();
        let h = g.spacing();
        let t = trace(&Field::from_fn(&g, |z| z), &BoundaryBasis::default()).unwrap();
        for k in -32..=32 {
            let expect = if k == 1 { 1.0 } else { 0.0 };
            assert!((t.get(k) - expect).norm() < 5.0 * h * h, "k={k}");
        }
    }

    #[test]
    fn trace_of_one_and_conj_square() {
        let g = grid();
        let b = BoundaryBasis::default();
        let t = trace(&Field::constant(&g, Complex64::new(1.0, 0.0)), &b).unwrap();
        assert!((t.get(0) - 1.0).norm() < 1e-12);
        assert!(t.coeffs().iter().map(|c| c.norm()).sum::<f64>() - 1.0 < 1e-10);
        let h = g.spacing();
        let t = trace(&Field::from_fn(&g, |z| z.conj() * z.conj()), &b).unwrap();
        assert!((t.get(-2) - 1.0).norm() < 5.0 * h * h);
        for k in [-1, 0, 1, 2, 3] {
            assert!(t.get(k).norm() < 5.0 * h * h);
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let g = Arc::new(DiscGrid::new(16, 2.0).unwrap());
        assert!(matches!(
            trace(&Field::zeros(&g), &BoundaryBasis::default()),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn radial_extension_round_trip_converges() {
        // g(z/|z|) |z|^{|k|} for a degree-4 trigonometric polynomial
        let b = BoundaryBasis::default();
        let c = [(-4i64, 0.3), (-1, -0.5), (0, 1.0), (2, 0.25), (4, 0.7)];
        let field = |g: &Arc<DiscGrid>| {
            Field::from_fn(g, |z| {
                let r = z.norm();
                let phi = z.arg();
                c.iter()
                    .map(|&(k, a)| Complex64::from_polar(a * r.powi(k.abs() as i32), k as f64 * phi))
                    .sum()
            })
        };
        let mut errs = Vec::new();
        for n in [64, 128, 256] {
            let g = Arc::new(DiscGrid::new(n, 2.0).unwrap());
            let t = trace(&field(&g), &b).unwrap();
            let err: f64 = b
                .frequencies()
                .map(|k| {
                    let want = c.iter().find(|e| e.0 == k).map_or(0.0, |e| e.1);
                    (t.get(k) - want).norm()
                })
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
        assert!(errs[2] < 1e-2);
    }
}
