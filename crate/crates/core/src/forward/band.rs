//! Banded `L D L^T` factorization for complex symmetric (not Hermitian)
//! matrices, without pivoting.

use num_complex::Complex64;

/// Symmetric band matrix storing the lower triangle row by row.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![Complex64::default(); n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if i - j > self.bw {
            return Complex64::default();
        }
        self.data[self.slot(i, j)]
    }

    /// Add `v` to entries `(i, j)` and `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        assert!(i - j <= self.bw, "entry ({i},{j}) outside band {}", self.bw);
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::default(); self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..i {
                let a = self.data[self.slot(i, j)];
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += self.data[self.slot(i, i)] * x[i];
        }
        y
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut col = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..i {
                let a = self.data[self.slot(i, j)].norm();
                col[i] += a;
                col[j] += a;
            }
            col[i] += self.data[self.slot(i, i)].norm();
        }
        col.into_iter().fold(0.0, f64::max)
    }
}

/// Factors `A = L D L^T`.
#[derive(Debug, Clone)]
pub struct BandLdl {
    n: usize,
    bw: usize,
    // unit lower factor in the same layout as BandMatrix, diagonal slots hold D
    data: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroPivot {
    pub row: usize,
    pub ratio: f64,
}

impl BandLdl {
    /// Fails when a pivot is negligible against the matrix scale.
    pub fn factor(a: &BandMatrix) -> Result<Self, ZeroPivot> {
        let n = a.n;
        let bw = a.bw;
        let w = bw + 1;
        let mut data = a.data.clone();
        let scale = a.norm1().max(f64::MIN_POSITIVE);
        // scratch row: L_ik * D_k for the current row
        let mut ld = vec![Complex64::default(); w];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row = i * w;
            for j in lo..i {
                let jrow = j * w;
                let klo = lo.max(j.saturating_sub(bw));
                let mut s = data[row + j + bw - i];
                for k in klo..j {
                    s -= ld[k + bw - i] * data[jrow + k + bw - j];
                }
                ld[j + bw - i] = s;
                data[row + j + bw - i] = s / data[jrow + bw];
            }
            let mut d = data[row + bw];
            for k in lo..i {
                d -= ld[k + bw - i] * data[row + k + bw - i];
            }
            let ratio = d.norm() / scale;
            if !(ratio > 1e-14) {
                return Err(ZeroPivot { row: i, ratio });
            }
            data[row + bw] = d;
        }
        Ok(Self { n, bw, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, x: &mut [Complex64]) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        assert_eq!(x.len(), n);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row = i * w;
            let mut s = x[i];
            for k in lo..i {
                s -= self.data[row + k + bw - i] * x[k];
            }
            x[i] = s;
        }
        for i in 0..n {
            x[i] /= self.data[i * w + bw];
        }
        for i in (0..n).rev() {
            let lo = i.saturating_sub(bw);
            let row = i * w;
            let xi = x[i];
            for k in lo..i {
                x[k] -= self.data[row + k + bw - i] * xi;
            }
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Estimate of `||A^{-1}||_1` by Hager's method (complex variant).
    pub fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.n;
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            est = y.iter().map(|v| v.norm()).sum::<f64>();
            let xi: Vec<Complex64> = y
                .iter()
                .map(|v| if v.norm() > 0.0 { (v / v.norm()).conj() } else { Complex64::new(1.0, 0.0) })
                .collect();
            // A^H = conj(A) for complex symmetric A
            let z: Vec<Complex64> = self.solve(&xi).into_iter().map(|v| v.conj()).collect();
            let (jmax, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.norm()))
                .fold((0, 0.0), |acc, c| if c.1 > acc.1 { c } else { acc });
            let zx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= zx {
                break;
            }
            x = vec![Complex64::default(); n];
            x[jmax] = Complex64::new(1.0, 0.0);
        }
        est
    }
}
