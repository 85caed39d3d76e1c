//! Dirichlet problem for `Laplace u + q u = 0` on the masked grid and the
//! Dirichlet-to-Neumann matrix in the trigonometric basis.
//!
//! Unknowns are the masked nodes. A masked node whose 5-point stencil reaches
//! outside the disc reads the Dirichlet value there from the boundary series
//! evaluated at that node's polar angle. The weak form used for the DN map is
//! the edge sum
//!
//! `B_q(u, v) = -sum_{edges} (u_a - u_b)(v_a - v_b) + sum_{disc} q u v h^2`
//!
//! over all grid edges with at least one end in the disc. With this form the
//! discrete Green identity, the DN symmetry and the Alessandrini identity
//! hold exactly.

mod band;

pub use band::{BandLdl, BandMatrix};

use std::collections::hash_map::DefaultHasher;
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disc::{BoundaryBasis, BoundaryVector, DiscGrid, Field, GridSpec};
use crate::error::{Error, Result};

/// Condition estimates above this are reported as ill-posed.
pub const MAX_CONDITION: f64 = 1e12;

/// Unmasked nodes closer than this many cells to the circle receive the
/// boundary data in returned solutions, so traces can be interpolated.
const FILL_CELLS: f64 = 2.0;

const NEIGHBOURS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub unknowns: usize,
    pub bandwidth: usize,
    pub condition_estimate: f64,
}

/// Factored system for one potential, reusable across boundary data.
#[derive(Debug)]
pub struct DirichletSolver {
    grid: Arc<DiscGrid>,
    q: Field,
    unknown: Vec<usize>,
    nodes: Vec<usize>,
    // (unknown row, ghost grid index) for every stencil edge leaving the disc
    ghost_edges: Vec<(usize, usize)>,
    ldl: BandLdl,
    diagnostics: SolverDiagnostics,
}

const NONE: usize = usize::MAX;

fn neighbour(grid: &DiscGrid, idx: usize, d: (i64, i64)) -> Option<usize> {
    let (j, k) = grid.coords(idx);
    let n = grid.nodes() as i64;
    let (jj, kk) = (j as i64 + d.0, k as i64 + d.1);
    (0..n).contains(&jj).then_some(())?;
    (0..n).contains(&kk).then_some(())?;
    Some(grid.index(jj as usize, kk as usize))
}

fn angle(z: Complex64) -> f64 {
    z.im.atan2(z.re)
}

impl DirichletSolver {
    pub fn new(q: &Field) -> Result<Self> {
        let grid = Arc::clone(q.grid());
        let nodes: Vec<usize> = (0..grid.len()).filter(|&i| grid.inside(i)).collect();
        let mut unknown = vec![NONE; grid.len()];
        for (row, &idx) in nodes.iter().enumerate() {
            unknown[idx] = row;
        }
        let mut bw = 0;
        let mut ghost_edges = Vec::new();
        for (row, &idx) in nodes.iter().enumerate() {
            for d in NEIGHBOURS {
                let nb = neighbour(&grid, idx, d).expect("disc lies inside the square");
                match unknown[nb] {
                    NONE => ghost_edges.push((row, nb)),
                    other => bw = bw.max(row.abs_diff(other)),
                }
            }
        }
        let h2 = grid.weight();
        let mut a = BandMatrix::zeros(nodes.len(), bw);
        for (row, &idx) in nodes.iter().enumerate() {
            a.add(row, row, Complex64::new(-4.0, 0.0) + q.values()[idx] * h2);
            for d in NEIGHBOURS {
                let nb = neighbour(&grid, idx, d).unwrap();
                let other = unknown[nb];
                if other != NONE && other < row {
                    a.add(row, other, Complex64::new(1.0, 0.0));
                }
            }
        }
        let ldl = BandLdl::factor(&a).map_err(|p| {
            Error::IllPosed(format!("zero pivot at unknown {} (relative size {:.2e})", p.row, p.ratio))
        })?;
        let condition = a.norm1() * ldl.inverse_norm1_estimate();
        if !(condition <= MAX_CONDITION) {
            return Err(Error::IllPosed(format!("condition estimate {condition:.3e}")));
        }
        Ok(Self {
            grid,
            q: q.clone(),
            unknown,
            nodes,
            ghost_edges,
            ldl,
            diagnostics: SolverDiagnostics {
                unknowns: a.dim(),
                bandwidth: bw,
                condition_estimate: condition,
            },
        })
    }

    pub fn grid(&self) -> &Arc<DiscGrid> {
        &self.grid
    }

    pub fn potential(&self) -> &Field {
        &self.q
    }

    pub fn diagnostics(&self) -> SolverDiagnostics {
        self.diagnostics
    }

    /// Solve with Dirichlet data `g(phi)` given as a function of the angle.
    pub fn solve_fn(&self, g: impl Fn(f64) -> Complex64) -> Field {
        let mut rhs = vec![Complex64::default(); self.nodes.len()];
        for &(row, ghost) in &self.ghost_edges {
            rhs[row] -= g(angle(self.grid.point(ghost)));
        }
        self.ldl.solve_in_place(&mut rhs);
        let mut values = vec![Complex64::default(); self.grid.len()];
        for (row, &idx) in self.nodes.iter().enumerate() {
            values[idx] = rhs[row];
        }
        let band = 1.0 + FILL_CELLS * self.grid.spacing();
        for (idx, v) in values.iter_mut().enumerate() {
            let z = self.grid.point(idx);
            if self.unknown[idx] == NONE && z.norm() < band {
                *v = g(angle(z));
            }
        }
        Field::from_values(&self.grid, values).expect("sizes match")
    }

    pub fn solve(&self, g: &BoundaryVector) -> Field {
        self.solve_fn(|phi| g.evaluate(phi))
    }

    /// `-sum_{ghost edges} v_g (u_g - u_i)`, equal to `B_q(u, v)` for a
    /// solution `u` and any `v` agreeing with the Dirichlet data at ghosts.
    fn boundary_flux(&self, u: &Field, v_ghost: impl Fn(f64) -> Complex64) -> Complex64 {
        let mut s = Complex64::default();
        for &(row, ghost) in &self.ghost_edges {
            let i = self.nodes[row];
            let vg = v_ghost(angle(self.grid.point(ghost)));
            s -= vg * (u.values()[ghost] - u.values()[i]);
        }
        s
    }
}

/// Discrete bilinear form `B_q(u, v)`; reads `u` and `v` on the disc and on
/// the nodes one step outside it.
pub fn bilinear_form(q: &Field, u: &Field, v: &Field) -> Result<Complex64> {
    q.check_grid(u)?;
    q.check_grid(v)?;
    let grid = q.grid();
    let (uv, vv) = (u.values(), v.values());
    let mut s = Complex64::default();
    for idx in 0..grid.len() {
        let inside = grid.inside(idx);
        if inside {
            s += q.values()[idx] * uv[idx] * vv[idx] * grid.weight();
        }
        // each edge once: right and up neighbours
        for d in [(1, 0), (0, 1)] {
            if let Some(nb) = neighbour(grid, idx, d) {
                if inside || grid.inside(nb) {
                    s -= (uv[idx] - uv[nb]) * (vv[idx] - vv[nb]);
                }
            }
        }
    }
    Ok(s)
}

/// Solve `Laplace u + q u = 0` with `Tr u = g`.
pub fn solve_dirichlet(q: &Field, g: &BoundaryVector) -> Result<Field> {
    Ok(DirichletSolver::new(q)?.solve(g))
}

/// Matrix of the DN map, `A[j, k]` the `e^{ij phi}` coefficient of
/// `Lambda_q e^{ik phi}`, so `(Lambda_q e_k, e_m) = 2 pi A[-m, k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DnMatrix {
    k_max: usize,
    entries: DMatrix<Complex64>,
    grid: GridSpec,
    q_id: String,
    diagnostics: Option<SolverDiagnostics>,
}

#[derive(Serialize, Deserialize)]
struct DnMatrixJson {
    #[serde(rename = "K_max")]
    k_max: usize,
    grid: GridSpec,
    q_id: String,
    diagnostics: Option<SolverDiagnostics>,
    /// rows `j = -K..=K`, each a list over `k = -K..=K`
    rows: Vec<Vec<[f64; 2]>>,
}

/// Short content hash identifying a potential.
pub fn field_id(f: &Field) -> String {
    let mut hasher = DefaultHasher::new();
    f.grid().id().hash(&mut hasher);
    for v in f.masked().values() {
        v.re.to_bits().hash(&mut hasher);
        v.im.to_bits().hash(&mut hasher);
    }
    format!("{:016x}", hasher.finish())
}

impl DnMatrix {
    pub fn from_entries(k_max: usize, entries: DMatrix<Complex64>, grid: GridSpec) -> Result<Self> {
        let dim = 2 * k_max + 1;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::BasisMismatch(format!(
                "expected {dim}x{dim}, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self {
            k_max,
            entries,
            grid,
            q_id: String::new(),
            diagnostics: None,
        })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn q_id(&self) -> &str {
        &self.q_id
    }

    pub fn diagnostics(&self) -> Option<SolverDiagnostics> {
        self.diagnostics
    }

    fn slot(&self, k: i64) -> usize {
        assert!(k.unsigned_abs() as usize <= self.k_max, "frequency {k} outside basis");
        (k + self.k_max as i64) as usize
    }

    pub fn get(&self, j: i64, k: i64) -> Complex64 {
        self.entries[(self.slot(j), self.slot(k))]
    }

    pub fn matches(&self, basis: &BoundaryBasis) -> bool {
        self.k_max == basis.k_max()
    }

    /// `self - other`; both must share basis and grid.
    pub fn difference(&self, other: &DnMatrix) -> Result<DnMatrix> {
        if self.k_max != other.k_max {
            return Err(Error::BasisMismatch(format!("K_max {} vs {}", self.k_max, other.k_max)));
        }
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(DnMatrix {
            k_max: self.k_max,
            entries: &self.entries - &other.entries,
            grid: self.grid,
            q_id: format!("{}-{}", self.q_id, other.q_id),
            diagnostics: None,
        })
    }

    /// `A^flip[j, k] = A[-k, -j]`.
    pub fn flipped(&self) -> DMatrix<Complex64> {
        let dim = self.entries.nrows();
        DMatrix::from_fn(dim, dim, |a, b| self.entries[(dim - 1 - b, dim - 1 - a)])
    }

    /// `||A - A^flip||_F / ||A||_F`.
    pub fn symmetry_defect(&self) -> f64 {
        let norm = self.entries.norm();
        if norm == 0.0 {
            return 0.0;
        }
        (&self.entries - self.flipped()).norm() / norm
    }

    /// `||A[-j,-k] - conj A[j,k]||_F / ||A||_F`, zero for real potentials.
    pub fn conjugation_defect(&self) -> f64 {
        let dim = self.entries.nrows();
        let norm = self.entries.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mirrored = DMatrix::from_fn(dim, dim, |a, b| self.entries[(dim - 1 - a, dim - 1 - b)].conj());
        (&self.entries - mirrored).norm() / norm
    }

    pub fn to_json(&self) -> Result<String> {
        let dim = self.entries.nrows();
        let rows = (0..dim)
            .map(|a| (0..dim).map(|b| [self.entries[(a, b)].re, self.entries[(a, b)].im]).collect())
            .collect();
        Ok(serde_json::to_string_pretty(&DnMatrixJson {
            k_max: self.k_max,
            grid: self.grid,
            q_id: self.q_id.clone(),
            diagnostics: self.diagnostics,
            rows,
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DnMatrixJson = serde_json::from_str(text)?;
        let dim = 2 * raw.k_max + 1;
        if raw.rows.len() != dim || raw.rows.iter().any(|r| r.len() != dim) {
            return Err(Error::BasisMismatch(format!("rows do not form a {dim}x{dim} matrix")));
        }
        let entries = DMatrix::from_fn(dim, dim, |a, b| Complex64::new(raw.rows[a][b][0], raw.rows[a][b][1]));
        Ok(Self {
            k_max: raw.k_max,
            entries,
            grid: raw.grid,
            q_id: raw.q_id,
            diagnostics: raw.diagnostics,
        })
    }
}

/// DN matrix of an already factored system.
pub fn dn_map_with(solver: &DirichletSolver, basis: &BoundaryBasis) -> DnMatrix {
    let k_max = basis.k_max() as i64;
    let dim = basis.dim();
    let mut entries = DMatrix::zeros(dim, dim);
    for k in -k_max..=k_max {
        let u = solver.solve_fn(|phi| Complex64::from_polar(1.0, k as f64 * phi));
        for j in -k_max..=k_max {
            // pair with the extension of e^{-ij phi}; only its ghost values matter
            let b = solver.boundary_flux(&u, |phi| Complex64::from_polar(1.0, -(j as f64) * phi));
            entries[((j + k_max) as usize, (k + k_max) as usize)] = b / (2.0 * PI);
        }
    }
    DnMatrix {
        k_max: basis.k_max(),
        entries,
        grid: solver.grid.spec(),
        q_id: field_id(&solver.q),
        diagnostics: Some(solver.diagnostics),
    }
}

pub fn dn_map(q: &Field, basis: &BoundaryBasis) -> Result<DnMatrix> {
    Ok(dn_map_with(&DirichletSolver::new(q)?, basis))
}

/// Bilinear pairing `((Lambda_1 - Lambda_2) t1, t2)`.
pub fn alessandrini_pairing(da: &DnMatrix, t1: &BoundaryVector, t2: &BoundaryVector) -> Result<Complex64> {
    if t1.k_max() != da.k_max() || t2.k_max() != da.k_max() {
        return Err(Error::BasisMismatch(format!(
            "matrix K_max {} with vectors {} and {}",
            da.k_max(),
            t1.k_max(),
            t2.k_max()
        )));
    }
    let k_max = da.k_max() as i64;
    let mut s = Complex64::default();
    for m in -k_max..=k_max {
        let t2m = t2.get(m);
        if t2m == Complex64::default() {
            continue;
        }
        let mut row = Complex64::default();
        for k in -k_max..=k_max {
            row += da.get(-m, k) * t1.get(k);
        }
        s += row * t2m;
    }
    Ok(s * (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::integrate;

    fn grid(n: usize) -> Arc<DiscGrid> {
        Arc::new(DiscGrid::new(n, 2.0).unwrap())
    }

    fn bump(g: &Arc<DiscGrid>, c: Complex64, amp: f64) -> Field {
        Field::from_fn_masked(g, |z| {
            let s2 = ((z - c) / 0.4).norm_sqr();
            if s2 < 1.0 {
                Complex64::new(amp * (1.0 + 1.0 / (s2 - 1.0)).exp(), 0.0)
            } else {
                Complex64::default()
            }
        })
    }

    #[test]
    fn constants_are_harmonic() {
        let g = grid(64);
        let u = solve_dirichlet(&Field::zeros(&g), &BoundaryVector::unit(4, 0)).unwrap();
        for (i, v) in u.values().iter().enumerate() {
            if g.inside(i) {
                assert!((v - 1.0).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn harmonic_extension_of_z() {
        let g = grid(128);
        let u = solve_dirichlet(&Field::zeros(&g), &BoundaryVector::unit(4, 1)).unwrap();
        let err = (0..g.len())
            .filter(|&i| g.inside(i))
            .map(|i| (u.values()[i] - g.point(i)).norm())
            .fold(0.0, f64::max);
        assert!(err < 5.0 * g.spacing(), "{err}");
    }

    #[test]
    fn discrete_green_identity_is_exact() {
        let g = grid(48);
        let q = bump(&g, Complex64::new(0.2, -0.1), 3.0);
        let solver = DirichletSolver::new(&q).unwrap();
        let u = solver.solve(&BoundaryVector::unit(3, 2));
        // an arbitrary extension with the same ghost data
        let h = DirichletSolver::new(&Field::zeros(&g)).unwrap();
        let v1 = h.solve(&BoundaryVector::unit(3, -1));
        let mut v2 = v1.clone();
        for (i, v) in v2.values_mut().iter_mut().enumerate() {
            if g.inside(i) {
                *v += Complex64::new((i % 7) as f64, 0.3);
            }
        }
        let b1 = bilinear_form(&q, &u, &v1).unwrap();
        let b2 = bilinear_form(&q, &u, &v2).unwrap();
        let flux = solver.boundary_flux(&u, |phi| Complex64::from_polar(1.0, -phi));
        assert!((b1 - b2).norm() < 1e-9 * b1.norm());
        assert!((b1 - flux).norm() < 1e-9 * b1.norm());
    }

    #[test]
    fn alessandrini_identity_is_exact_on_the_grid() {
        let g = grid(48);
        let basis = BoundaryBasis::new(64, 6).unwrap();
        let q1 = bump(&g, Complex64::new(0.2, 0.1), 4.0);
        let q2 = bump(&g, Complex64::new(-0.3, 0.0), 2.0);
        let (s1, s2) = (DirichletSolver::new(&q1).unwrap(), DirichletSolver::new(&q2).unwrap());
        let da = dn_map_with(&s1, &basis).difference(&dn_map_with(&s2, &basis)).unwrap();
        let mut t1 = BoundaryVector::zeros(6);
        let mut t2 = BoundaryVector::zeros(6);
        for k in -6i64..=6 {
            t1.set(k, Complex64::new(1.0 / (1 + k.abs()) as f64, 0.2 * k as f64));
            t2.set(k, Complex64::new(0.5, -0.1 * (k * k) as f64));
        }
        let u1 = s1.solve(&t1);
        let u2 = s2.solve(&t2);
        let lhs = integrate(&(&(&u1 * &(&q1 - &q2)) * &u2));
        let rhs = alessandrini_pairing(&da, &t1, &t2).unwrap();
        assert!((lhs - rhs).norm() < 1e-9 * lhs.norm(), "{lhs} vs {rhs}");
    }

    #[test]
    fn real_potential_gives_conjugation_symmetry() {
        let g = grid(48);
        let basis = BoundaryBasis::new(64, 5).unwrap();
        let a = dn_map(&bump(&g, Complex64::new(0.1, 0.3), 5.0), &basis).unwrap();
        assert!(a.conjugation_defect() < 1e-10);
        assert!(a.symmetry_defect() < 1e-10);
    }

    #[test]
    fn json_round_trip() {
        let g = grid(32);
        let basis = BoundaryBasis::new(32, 3).unwrap();
        let a = dn_map(&Field::zeros(&g), &basis).unwrap();
        let back = DnMatrix::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(a, back);
        let v: serde_json::Value = serde_json::from_str(&a.to_json().unwrap()).unwrap();
        assert_eq!(v["K_max"], 3);
        assert_eq!(v["rows"].as_array().unwrap().len(), 7);
        assert_eq!(v["grid"]["N"], 32);
    }

    #[test]
    fn pairing_rejects_basis_mismatch() {
        let da = DnMatrix::from_entries(2, DMatrix::zeros(5, 5), GridSpec::default()).unwrap();
        let t = BoundaryVector::unit(3, 0);
        assert!(alessandrini_pairing(&da, &t, &t).is_err());
        let t = BoundaryVector::unit(2, 0);
        assert_eq!(alessandrini_pairing(&da, &t, &t).unwrap(), Complex64::default());
    }

    #[test]
    fn dirichlet_eigenvalue_is_ill_posed() {
        // first Dirichlet eigenvalue of the discrete disc, from inverse iteration
        let g = grid(32);
        let zero = DirichletSolver::new(&Field::zeros(&g)).unwrap();
        let n = zero.nodes.len();
        let mut x = vec![Complex64::new(1.0, 0.0); n];
        let mut lambda = 0.0;
        for _ in 0..200 {
            zero.ldl.solve_in_place(&mut x);
            let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            lambda = -1.0 / norm;
            x.iter_mut().for_each(|v| *v /= norm);
        }
        // -4 + q h^2 shifted by the eigenvalue makes the matrix singular
        let q = Field::from_fn_masked(&g, |_| Complex64::new(-lambda / g.weight(), 0.0));
        assert!(matches!(DirichletSolver::new(&q), Err(Error::IllPosed(_))));
    }
}
