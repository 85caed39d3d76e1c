//! Discretization of the unit disc: a cell-centered Cartesian grid on the
//! square `[-L, L]^2` with a mask selecting the nodes inside the disc.

mod boundary;
mod field;

pub use boundary::{interpolate, trace, trace_samples, BoundaryBasis, BoundaryVector};
pub use field::{integrate, Field};

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default nodes per axis.
pub const DEFAULT_NODES: usize = 256;
/// Default half-width of the computational square.
pub const DEFAULT_HALF_WIDTH: f64 = 2.0;

/// Cartesian sampling of a square containing the unit disc.
///
/// Node `(j, k)` sits at `(-L + (j + 1/2) h) + i (-L + (k + 1/2) h)` with
/// `h = 2L / N`; values are stored row-major with `k` as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscGrid {
    nodes: usize,
    half_width: f64,
    spacing: f64,
    mask: Vec<bool>,
}

/// Serializable description of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "N")]
    pub nodes: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            half_width: DEFAULT_HALF_WIDTH,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<DiscGrid>> {
        DiscGrid::new(self.nodes, self.half_width).map(Arc::new)
    }
}

impl DiscGrid {
    /// Build a grid with `nodes` per axis on `[-half_width, half_width]^2`.
    pub fn new(nodes: usize, half_width: f64) -> Result<Self> {
        if nodes < 16 || nodes % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "nodes per axis must be even and >= 16, got {nodes}"
            )));
        }
        if !(half_width >= 1.5) || !half_width.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half-width must be >= 1.5, got {half_width}"
            )));
        }
        let spacing = 2.0 * half_width / nodes as f64;
        let mut grid = Self {
            nodes,
            half_width,
            spacing,
            mask: Vec::new(),
        };
        grid.mask = (0..nodes * nodes)
            .map(|idx| grid.point(idx).norm_sqr() < 1.0)
            .collect();
        Ok(grid)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            nodes: self.nodes,
            half_width: self.half_width,
        }
    }

    /// Stable identifier used in serialized metadata.
    pub fn id(&self) -> String {
        format!("N{}_L{}", self.nodes, self.half_width)
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Quadrature weight of every node (cell area).
    pub fn weight(&self) -> f64 {
        self.spacing * self.spacing
    }

    pub fn len(&self) -> usize {
        self.nodes * self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    pub fn index(&self, j: usize, k: usize) -> usize {
        k * self.nodes + j
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nodes, idx / self.nodes)
    }

    /// Coordinate of node index `j` along either axis.
    pub fn axis(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.spacing
    }

    pub fn node(&self, j: usize, k: usize) -> Complex64 {
        Complex64::new(self.axis(j), self.axis(k))
    }

    pub fn point(&self, idx: usize) -> Complex64 {
        let (j, k) = self.coords(idx);
        self.node(j, k)
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn inside(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Sum of quadrature weights over the disc.
    pub fn disc_area(&self) -> f64 {
        self.masked_count() as f64 * self.weight()
    }

    /// Masked nodes whose `(2c+1)^2` neighbourhood lies entirely in the disc.
    pub fn interior(&self, collar: usize) -> Vec<bool> {
        let n = self.nodes as i64;
        let c = collar as i64;
        (0..self.len())
            .map(|idx| {
                if !self.mask[idx] {
                    return false;
                }
                let (j, k) = self.coords(idx);
                let (j, k) = (j as i64, k as i64);
                for dk in -c..=c {
                    for dj in -c..=c {
                        let (jj, kk) = (j + dj, k + dk);
                        if jj < 0 || kk < 0 || jj >= n || kk >= n {
                            return false;
                        }
                        if !self.mask[(kk * n + jj) as usize] {
                            return false;
                        }
                    }
                }
                true
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_parameters() {
        assert!(DiscGrid::new(17, 2.0).is_err());
        assert!(DiscGrid::new(14, 2.0).is_err());
        assert!(DiscGrid::new(64, 1.4).is_err());
        assert!(DiscGrid::new(64, 1.5).is_ok());
    }

    #[test]
    fn area_close_to_pi() {
        let g = DiscGrid::new(256, 2.0).unwrap();
        let rel = (g.disc_area() - PI).abs() / PI;
        assert!(rel < 0.04, "rel = {rel}");
        for n in [16, 32, 64, 128] {
            let g = DiscGrid::new(n, 2.0).unwrap();
            assert!((g.disc_area() - PI).abs() / PI <= 4.0 * g.spacing());
        }
    }

    #[test]
    fn masked_count_matches_brute_force() {
        let g = DiscGrid::new(16, 2.0).unwrap();
        // Cell centers at +-0.125, +-0.375, ...; count by exact integer test
        // (2a+1)^2 + (2b+1)^2 < 64 with x = (2a+1)/8.
        let mut count = 0;
        for a in -8i64..8 {
            for b in -8i64..8 {
                let (x, y) = (2 * a + 1, 2 * b + 1);
                if x * x + y * y < 64 {
                    count += 1;
                }
            }
        }
        assert_eq!(g.masked_count(), count);
    }

    #[test]
    fn mask_has_reflection_symmetry() {
        for n in [16, 30, 64] {
            let g = DiscGrid::new(n, 1.7).unwrap();
            for k in 0..n {
                for j in 0..n {
                    let m = g.mask()[g.index(j, k)];
                    assert_eq!(m, g.mask()[g.index(n - 1 - j, n - 1 - k)]);
                    assert_eq!(m, g.mask()[g.index(j, n - 1 - k)]);
                    assert_eq!(m, g.mask()[g.index(n - 1 - j, k)]);
                }
            }
        }
    }

    #[test]
    fn interior_collar_shrinks_mask() {
        let g = DiscGrid::new(64, 2.0).unwrap();
        let i0 = g.interior(0).iter().filter(|&&b| b).count();
        let i2 = g.interior(2).iter().filter(|&&b| b).count();
        assert_eq!(i0, g.masked_count());
        assert!(i2 < i0);
    }
}
