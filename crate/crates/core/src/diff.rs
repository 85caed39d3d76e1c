//! Second-order centered differences on the full grid square.
//!
//! Nodes on the outer edge of the square use one-sided first differences and
//! a zero Laplacian; all fields of interest vanish there.

use num_complex::Complex64;

use crate::disc::Field;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn partial(f: &Field, along_x: bool) -> Field {
    let g = f.grid();
    let n = g.nodes();
    let h = g.spacing();
    let v = f.values();
    let mut out = Field::zeros(g);
    let o = out.values_mut();
    for k in 0..n {
        for j in 0..n {
            let (lo, hi, span) = if along_x {
                match j {
                    0 => (g.index(0, k), g.index(1, k), h),
                    _ if j == n - 1 => (g.index(n - 2, k), g.index(n - 1, k), h),
                    _ => (g.index(j - 1, k), g.index(j + 1, k), 2.0 * h),
                }
            } else {
                match k {
                    0 => (g.index(j, 0), g.index(j, 1), h),
                    _ if k == n - 1 => (g.index(j, n - 2), g.index(j, n - 1), h),
                    _ => (g.index(j, k - 1), g.index(j, k + 1), 2.0 * h),
                }
            };
            o[g.index(j, k)] = (v[hi] - v[lo]) / span;
        }
    }
    out
}

pub fn dx(f: &Field) -> Field {
    partial(f, true)
}

pub fn dy(f: &Field) -> Field {
    partial(f, false)
}

/// `dbar = (dx + i dy) / 2`.
pub fn dbar(f: &Field) -> Field {
    let (fx, fy) = (dx(f), dy(f));
    &(&fx + &fy.scale(I)) * 0.5
}

/// `d = (dx - i dy) / 2`.
pub fn d(f: &Field) -> Field {
    let (fx, fy) = (dx(f), dy(f));
    &(&fx - &fy.scale(I)) * 0.5
}

/// Five-point Laplacian.
pub fn laplacian(f: &Field) -> Field {
    let g = f.grid();
    let n = g.nodes();
    let inv_h2 = 1.0 / g.weight();
    let v = f.values();
    let mut out = Field::zeros(g);
    let o = out.values_mut();
    for k in 1..n - 1 {
        for j in 1..n - 1 {
            let c = g.index(j, k);
            o[c] = (v[c - 1] + v[c + 1] + v[c - n] + v[c + n] - v[c] * 4.0) * inv_h2;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::DiscGrid;
    use std::sync::Arc;

    #[test]
    fn derivatives_of_polynomials() {
        let g = Arc::new(DiscGrid::new(64, 2.0).unwrap());
        let f = Field::from_fn(&g, |z| z * z * z.conj());
        let db = dbar(&f);
        let dd = d(&f);
        let lap = laplacian(&f);
        for idx in 0..g.len() {
            if !g.inside(idx) {
                continue;
            }
            let z = g.point(idx);
            let h2 = g.weight();
            // dbar(z^2 zbar) = z^2, d = 2 z zbar, laplacian = 4 * 2z
            assert!((db.values()[idx] - z * z).norm() < 2.0 * h2);
            assert!((dd.values()[idx] - 2.0 * z * z.conj()).norm() < 2.0 * h2);
            assert!((lap.values()[idx] - 8.0 * z).norm() < 1e-9);
        }
    }
}
