//! Cauchy operators, oscillatory phase factors and the stationary-phase
//! operator on a [`DiscGrid`].
//!
//! The Cauchy operators are linear convolutions evaluated by FFT on the
//! square doubled in each direction, so no wrap-around occurs for inputs
//! supported in the disc.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disc::{trace_samples, BoundaryBasis, DiscGrid, Field};
use crate::error::{Error, Result};
use crate::fft::{signed_index, Fft2};
use crate::norms::lp_norm_on;
use crate::quad;

/// Frequency `n` and stationary point `z0` of the phase
/// `R(z, z0) = (z - z0)^2 + conj(z - z0)^2 = 2 Re (z - z0)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseParams {
    pub n: f64,
    pub z0: Complex64,
}

impl PhaseParams {
    pub fn new(n: f64, z0: Complex64) -> Result<Self> {
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument(format!("frequency must be > 0, got {n}")));
        }
        if z0.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!("|z0| must be <= 1, got {}", z0.norm())));
        }
        Ok(Self { n, z0 })
    }

    pub fn phase(&self, z: Complex64) -> f64 {
        let w = z - self.z0;
        2.0 * (w * w).re
    }
}

/// `e^{i sign n R(z, z0)}` on the whole square.
pub fn phase_factor(grid: &Arc<DiscGrid>, p: &PhaseParams, sign: f64) -> Field {
    Field::from_fn(grid, |z| Complex64::from_polar(1.0, sign * p.n * p.phase(z)))
}

/// Integral of `1/w` over the cell `[-h/2, h/2]^2`, in polar coordinates
/// around the singularity: `int rho(phi) e^{-i phi} dphi`.
fn singular_cell_integral(h: f64) -> Complex64 {
    let rho = |phi: f64| 0.5 * h / phi.cos().abs().max(phi.sin().abs());
    (0..8)
        .map(|octant| {
            let a = octant as f64 * PI / 4.0;
            quad::integrate(a, a + PI / 4.0, 4, |phi| Complex64::from_polar(rho(phi), -phi))
        })
        .sum()
}

/// Cached kernel spectra for one grid.
#[derive(Debug)]
pub struct Transforms {
    grid: Arc<DiscGrid>,
    fft: Fft2,
    cauchy_hat: Vec<Complex64>,
    cauchy_bar_hat: Vec<Complex64>,
}

impl Transforms {
    pub fn new(grid: &Arc<DiscGrid>) -> Result<Self> {
        if grid.half_width() < 1.5 {
            return Err(Error::InvalidGrid("convolution padding needs L >= 1.5".into()));
        }
        let n = grid.nodes();
        let size = 2 * n;
        let h = grid.spacing();
        let fft = Fft2::new(size);
        let center = singular_cell_integral(h) / PI;
        let mut kernel = vec![Complex64::default(); size * size];
        for b in 0..size {
            let wy = signed_index(b, size) as f64 * h;
            for a in 0..size {
                let wx = signed_index(a, size) as f64 * h;
                kernel[b * size + a] = if a == 0 && b == 0 {
                    center
                } else {
                    grid.weight() / (PI * Complex64::new(wx, wy))
                };
            }
        }
        let mut kernel_bar: Vec<Complex64> = kernel.iter().map(|v| v.conj()).collect();
        fft.forward(&mut kernel);
        fft.forward(&mut kernel_bar);
        Ok(Self {
            grid: Arc::clone(grid),
            fft,
            cauchy_hat: kernel,
            cauchy_bar_hat: kernel_bar,
        })
    }

    pub fn grid(&self) -> &Arc<DiscGrid> {
        &self.grid
    }

    fn padded(&self, f: &Field) -> Vec<Complex64> {
        let n = self.grid.nodes();
        let size = 2 * n;
        let mut buf = vec![Complex64::default(); size * size];
        let mask = self.grid.mask();
        for k in 0..n {
            for j in 0..n {
                let idx = self.grid.index(j, k);
                if mask[idx] {
                    buf[k * size + j] = f.values()[idx];
                }
            }
        }
        buf
    }

    fn cropped(&self, buf: &[Complex64]) -> Field {
        let n = self.grid.nodes();
        let size = 2 * n;
        let mut values = Vec::with_capacity(n * n);
        for k in 0..n {
            values.extend_from_slice(&buf[k * size..k * size + n]);
        }
        Field::from_values(&self.grid, values).expect("cropped size matches grid")
    }

    fn convolve(&self, f: &Field, spectrum: &[Complex64]) -> Field {
        assert!(
            Arc::ptr_eq(f.grid(), &self.grid) || f.grid().spec() == self.grid.spec(),
            "field and operator grids differ"
        );
        let mut buf = self.padded(f);
        self.fft.forward(&mut buf);
        buf.iter_mut().zip(spectrum).for_each(|(v, k)| *v *= k);
        self.fft.inverse(&mut buf);
        self.cropped(&buf)
    }

    /// `(1/pi) int_disc f(z') / (z - z') dm(z')` at every node of the square.
    pub fn cauchy(&self, f: &Field) -> Field {
        self.convolve(f, &self.cauchy_hat)
    }

    /// `(1/pi) int_disc f(z') / conj(z - z') dm(z')`.
    pub fn cauchy_bar(&self, f: &Field) -> Field {
        self.convolve(f, &self.cauchy_bar_hat)
    }

    /// `C(e^{-inR} a)`.
    pub fn conjugated_cauchy(&self, a: &Field, p: &PhaseParams) -> Field {
        self.cauchy(&(&phase_factor(&self.grid, p, -1.0) * a))
    }

    /// `z0 -> (2n/pi) int e^{i n R(z, z0)} Q(z) dm(z)` for `Q` restricted to
    /// the disc, applied as the Fourier multiplier
    /// `exp(-i (xi^2 + conj(xi)^2) / (16 n))` of the same convolution.
    pub fn stationary_phase(&self, q: &Field, n: f64) -> Result<Field> {
        if !(n > 0.0) {
            return Err(Error::InvalidArgument(format!("frequency must be > 0, got {n}")));
        }
        let size = 2 * self.grid.nodes();
        let dxi = 2.0 * PI / (size as f64 * self.grid.spacing());
        let mut buf = self.padded(q);
        self.fft.forward(&mut buf);
        for my in 0..size {
            let ky = signed_index(my, size) as f64 * dxi;
            for mx in 0..size {
                let kx = signed_index(mx, size) as f64 * dxi;
                buf[my * size + mx] *= stationary_phase_symbol(Complex64::new(kx, ky), n);
            }
        }
        self.fft.inverse(&mut buf);
        Ok(self.cropped(&buf))
    }
}

/// Largest deviation of the spectrum of `stationary_phase(q, n)` from the
/// symbol times the spectrum of `q`, relative to the largest coefficient of
/// `q`, both on the `N`-point DFT of the square.
pub fn stationary_phase_symbol_defect(ops: &Transforms, q: &Field, n: f64) -> Result<f64> {
    let grid = ops.grid();
    let size = grid.nodes();
    let fft = Fft2::new(size);
    let mut out = ops.stationary_phase(q, n)?.into_values();
    let mut input = q.masked().into_values();
    fft.forward(&mut out);
    fft.forward(&mut input);
    let dxi = 2.0 * PI / (2.0 * grid.half_width());
    let scale = input.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for my in 0..size {
        let ky = signed_index(my, size) as f64 * dxi;
        for mx in 0..size {
            let kx = signed_index(mx, size) as f64 * dxi;
            let i = my * size + mx;
            let expect = stationary_phase_symbol(Complex64::new(kx, ky), n) * input[i];
            worst = worst.max((out[i] - expect).norm());
        }
    }
    Ok(worst / scale)
}

/// Direct `O(N^4)` evaluation of the discrete Cauchy sums, the oracle for
/// the FFT implementation.
pub fn direct_cauchy(f: &Field, bar: bool) -> Field {
    let grid = f.grid();
    let center = singular_cell_integral(grid.spacing()) / PI;
    let center = if bar { center.conj() } else { center };
    let sources: Vec<(Complex64, Complex64)> = (0..grid.len())
        .filter(|&i| grid.inside(i))
        .map(|i| (grid.point(i), f.values()[i]))
        .collect();
    let w = grid.weight();
    Field::from_fn(grid, |z| {
        sources
            .iter()
            .map(|&(zp, v)| {
                let d = z - zp;
                let k = if d.norm() < 0.5 * grid.spacing() {
                    center
                } else if bar {
                    w / (PI * d.conj())
                } else {
                    w / (PI * d)
                };
                k * v
            })
            .sum()
    })
}

/// Linear convolution `(f * g)[m] = sum_j f[j] g[m - j] h^2` of the disc
/// restrictions of two fields, on the `(2N)^2` lattice of index sums.
pub fn lattice_convolution(f: &Field, g: &Field) -> Result<Vec<Complex64>> {
    f.check_grid(g)?;
    let grid = f.grid();
    let n = grid.nodes();
    let size = 2 * n;
    let fft = Fft2::new(size);
    let pad = |x: &Field| {
        let mut buf = vec![Complex64::default(); size * size];
        for k in 0..n {
            for j in 0..n {
                let idx = grid.index(j, k);
                if grid.inside(idx) {
                    buf[k * size + j] = x.values()[idx];
                }
            }
        }
        buf
    };
    let (mut a, mut b) = (pad(f), pad(g));
    fft.forward(&mut a);
    fft.forward(&mut b);
    a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y * grid.weight());
    fft.inverse(&mut a);
    Ok(a)
}

/// `exp(-i (xi^2 + conj(xi)^2) / (16 n))`.
pub fn stationary_phase_symbol(xi: Complex64, n: f64) -> Complex64 {
    let s = 2.0 * (xi * xi).re;
    Complex64::from_polar(1.0, -s / (16.0 * n))
}

/// Upper bound `2^{1 + alpha/2}` for the Gaussian Hölder ratio.
pub fn gaussian_holder_bound(alpha: f64) -> f64 {
    2f64.powf(1.0 + alpha / 2.0)
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

/// Points of the disc of radius 4 from the Halton(2, 3) sequence, origin excluded.
pub fn holder_samples(samples: usize) -> impl Iterator<Item = Complex64> {
    (1..=samples as u64).filter_map(|i| {
        let u = radical_inverse(i, 2);
        let v = radical_inverse(i, 3);
        let xi = Complex64::from_polar(4.0 * u.sqrt(), 2.0 * PI * v);
        (xi.norm() > 0.0).then_some(xi)
    })
}

/// `|1 - e^{-i(xi^2 + conj(xi)^2)}| / |xi|^alpha`.
pub fn holder_ratio(alpha: f64, xi: Complex64) -> f64 {
    let s = 2.0 * (xi * xi).re;
    (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -s)).norm() / xi.norm().powf(alpha)
}

/// Sampled supremum of [`holder_ratio`] over the disc of radius 4.
pub fn gaussian_holder_ratio(alpha: f64, samples: usize) -> f64 {
    holder_samples(samples)
        .map(|xi| holder_ratio(alpha, xi))
        .fold(0.0, f64::max)
}

/// Relative `L^2` residual of the Cauchy-Pompeiu formula
/// `f = (1/2pi) int Tr f(z') z' / (z' - z) dsigma + C(dbar f)` away from a
/// two-cell collar, with the boundary integral by the trapezoid rule.
pub fn cauchy_pompeiu_check(
    ops: &Transforms,
    f: &Field,
    dbar_f: &Field,
    basis: &BoundaryBasis,
) -> Result<f64> {
    f.check_grid(dbar_f)?;
    let grid = f.grid();
    let samples = trace_samples(f, basis)?;
    let points: Vec<Complex64> = basis.points().collect();
    let area = ops.cauchy(dbar_f);
    let interior = grid.interior(2);
    let m = basis.m_angles() as f64;
    let mut diff = Field::zeros(grid);
    for idx in 0..grid.len() {
        if !interior[idx] {
            continue;
        }
        let z = grid.point(idx);
        let boundary: Complex64 = samples
            .iter()
            .zip(&points)
            .map(|(s, zp)| s * zp / (zp - z))
            .sum::<Complex64>()
            / m;
        diff.values_mut()[idx] = f.values()[idx] - boundary - area.values()[idx];
    }
    let num = lp_norm_on(&diff, 2.0, Some(&interior))?;
    let den = lp_norm_on(f, 2.0, Some(&interior))?;
    Ok(num / den)
}

/// Relative residual of `dbar C f = f` (or `d Cbar f = f`) on the interior.
pub fn right_inverse_residual(ops: &Transforms, f: &Field, bar: bool, collar: usize) -> Result<f64> {
    let out = if bar {
        crate::diff::d(&ops.cauchy_bar(f))
    } else {
        crate::diff::dbar(&ops.cauchy(f))
    };
    let interior = f.grid().interior(collar);
    let num = lp_norm_on(&(&out - &f.masked()), 2.0, Some(&interior))?;
    let den = lp_norm_on(f, 2.0, Some(&interior))?;
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: usize) -> (Arc<DiscGrid>, Transforms) {
        let g = Arc::new(DiscGrid::new(n, 2.0).unwrap());
        let t = Transforms::new(&g).unwrap();
        (g, t)
    }

    #[test]
    fn singular_cell_average_vanishes_by_symmetry() {
        assert!(singular_cell_integral(0.1).norm() < 1e-15);
    }

    #[test]
    fn zero_maps_to_zero() {
        let (g, t) = setup(32);
        let z = Field::zeros(&g);
        assert_eq!(t.cauchy(&z).max_abs(), 0.0);
        assert_eq!(t.cauchy_bar(&z).max_abs(), 0.0);
        let p = PhaseParams::new(4.0, Complex64::new(0.1, 0.2)).unwrap();
        assert_eq!(t.conjugated_cauchy(&z, &p).max_abs(), 0.0);
        assert_eq!(t.stationary_phase(&z, 3.0).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn cauchy_of_indicator_vanishes_at_origin() {
        // C chi = conj(z) inside the disc
        let (g, t) = setup(64);
        let chi = Field::from_fn_masked(&g, |_| Complex64::new(1.0, 0.0));
        let c = t.cauchy(&chi);
        let mid = g.nodes() / 2;
        // average of the four nodes around the origin
        let v = (c.at(mid, mid) + c.at(mid - 1, mid) + c.at(mid, mid - 1) + c.at(mid - 1, mid - 1)) / 4.0;
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn conjugation_symmetry() {
        let (g, t) = setup(32);
        let f = Field::from_fn_masked(&g, |z| (z * Complex64::new(0.3, 1.1)).exp());
        let lhs = t.cauchy_bar(&f);
        let rhs = t.cauchy(&f.conj()).conj();
        for (a, b) in lhs.values().iter().zip(rhs.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn phase_factor_examples() {
        let g = Arc::new(DiscGrid::new(32, 2.0).unwrap());
        let p = PhaseParams::new(7.0, Complex64::new(0.3, -0.2)).unwrap();
        for v in phase_factor(&g, &p, 1.0).values() {
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
        let p = PhaseParams::new(1.0, Complex64::default()).unwrap();
        assert!((p.phase(Complex64::new(0.5, 0.0)) - 0.5).abs() < 1e-15);
        assert_eq!(p.phase(p.z0), 0.0);
        assert!(PhaseParams::new(0.0, Complex64::default()).is_err());
        assert!(PhaseParams::new(1.0, Complex64::new(1.5, 0.0)).is_err());
    }

    #[test]
    fn fft_matches_direct_sum() {
        let (g, t) = setup(32);
        let f = Field::from_fn_masked(&g, |z| Complex64::new(z.re.sin() + 0.3, (2.0 * z.im).cos() * z.re));
        for bar in [false, true] {
            let fast = if bar { t.cauchy_bar(&f) } else { t.cauchy(&f) };
            let slow = direct_cauchy(&f, bar);
            let scale = slow.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (a, b) in fast.values().iter().zip(slow.values()) {
                assert!((a - b).norm() < 1e-8 * scale);
            }
        }
    }

    #[test]
    fn lattice_convolution_with_delta() {
        let g = Arc::new(DiscGrid::new(16, 2.0).unwrap());
        let f = Field::from_fn_masked(&g, |z| Complex64::new(1.0 + z.re, z.im));
        let mut delta = Field::zeros(&g);
        let c = g.index(8, 8);
        delta.values_mut()[c] = Complex64::new(1.0 / g.weight(), 0.0);
        let conv = lattice_convolution(&f, &delta).unwrap();
        for k in 0..16 {
            for j in 0..16 {
                let v = conv[(k + 8) * 32 + j + 8];
                assert!((v - f.masked().at(j, k)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn holder_ratio_respects_bound() {
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            let sup = gaussian_holder_ratio(alpha, 20_000);
            assert!(sup <= gaussian_holder_bound(alpha), "alpha={alpha}: {sup}");
        }
        assert!(gaussian_holder_ratio(0.0, 1000) <= 2.0);
        // the ratio tends to 0 at the origin for alpha < 2
        assert!(holder_ratio(1.0, Complex64::new(1e-6, 3e-7)) < 1e-5);
    }
}
