use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::DiscGrid;
use crate::error::{Error, Result};

/// Grid-sampled complex function.
///
/// Fields built with [`Field::from_fn_masked`] vanish outside the disc. Fields
/// built with [`Field::from_fn`] (and outputs of the Cauchy operators) carry
/// values on the whole square; integrals and norms only read masked nodes, but
/// finite differences and traces may use the values just outside the disc.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<DiscGrid>,
    values: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: &Arc<DiscGrid>) -> Self {
        Self {
            grid: Arc::clone(grid),
            values: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_values(grid: &Arc<DiscGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            values,
        })
    }

    /// Sample `f` at every node of the square.
    pub fn from_fn(grid: &Arc<DiscGrid>, f: impl Fn(Complex64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    /// Sample `f` inside the disc, zero elsewhere.
    pub fn from_fn_masked(grid: &Arc<DiscGrid>, f: impl Fn(Complex64) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                if grid.inside(i) {
                    f(grid.point(i))
                } else {
                    Complex64::default()
                }
            })
            .collect();
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn constant(grid: &Arc<DiscGrid>, c: Complex64) -> Self {
        Self::from_fn(grid, |_| c)
    }

    pub fn grid(&self) -> &Arc<DiscGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, j: usize, k: usize) -> Complex64 {
        self.values[self.grid.index(j, k)]
    }

    /// Copy with values outside the disc set to zero.
    pub fn masked(&self) -> Self {
        let mut out = self.clone();
        for (v, &m) in out.values.iter_mut().zip(self.grid.mask()) {
            if !m {
                *v = Complex64::default();
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise map that also receives the node coordinate.
    pub fn map_with_point(&self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| f(self.grid.point(i), v))
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    /// The field `z -> f(conj z)`, exact on the symmetric grid.
    pub fn reflect(&self) -> Self {
        let n = self.grid.nodes();
        let mut values = vec![Complex64::default(); self.values.len()];
        for k in 0..n {
            let src = &self.values[(n - 1 - k) * n..(n - k) * n];
            values[k * n..(k + 1) * n].copy_from_slice(src);
        }
        Self {
            grid: Arc::clone(&self.grid),
            values,
        }
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.spec() == other.grid.spec()
    }

    pub fn check_grid(&self, other: &Field) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn zip_with(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(self.same_grid(other), "fields live on different grids");
        Self {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Largest absolute value over masked nodes.
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.mask())
            .filter(|(_, &m)| m)
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Field {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Mul<Complex64> for &Field {
    type Output = Field;
    fn mul(self, rhs: Complex64) -> Field {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.map(|v| v * rhs)
    }
}

/// Midpoint quadrature of `f` over the disc.
pub fn integrate(f: &Field) -> Complex64 {
    let sum: Complex64 = f
        .values
        .iter()
        .zip(f.grid.mask())
        .filter(|(_, &m)| m)
        .map(|(v, _)| *v)
        .sum();
    sum * f.grid.weight()
}
