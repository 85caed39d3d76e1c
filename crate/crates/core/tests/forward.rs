use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cgo_lab::disc::{BoundaryBasis, BoundaryVector, DiscGrid, Field};
use cgo_lab::experiments::potentials::bump;
use cgo_lab::forward::{alessandrini_pairing, dn_map, dn_map_with, solve_dirichlet, DirichletSolver};
use cgo_lab::norms::dn_operator_norm;

fn grid(n: usize) -> Arc<DiscGrid> {
    Arc::new(DiscGrid::new(n, 2.0).unwrap())
}

fn random_vector(k_max: usize, rng: &mut ChaCha8Rng) -> BoundaryVector {
    let mut v = BoundaryVector::zeros(k_max);
    for k in -(k_max as i64)..=k_max as i64 {
        v.set(k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    v
}

#[test]
fn dirichlet_solve_is_linear_in_data() {
    let g = grid(64);
    let q = bump(&g, Complex64::new(0.1, 0.0), 0.4, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (a, b) = (random_vector(8, &mut rng), random_vector(8, &mut rng));
    let c = Complex64::new(0.7, -1.3);
    let lhs = solve_dirichlet(&q, &a.scale(c).add(&b)).unwrap();
    let rhs = &solve_dirichlet(&q, &a).unwrap().scale(c) + &solve_dirichlet(&q, &b).unwrap();
    let err = (&lhs - &rhs).max_abs() / rhs.max_abs();
    assert!(err < 1e-10, "{err}");
}

#[test]
fn dn_entries_converge_at_first_order() {
    let basis = BoundaryBasis::new(256, 8).unwrap();
    let errors: Vec<f64> = [128, 256]
        .iter()
        .map(|&n| {
            let a = dn_map(&Field::zeros(&grid(n)), &basis).unwrap();
            (-8i64..=8).map(|k| (a.get(k, k).re + k.abs() as f64).abs()).fold(0.0, f64::max)
        })
        .collect();
    let ratio = errors[0] / errors[1];
    assert!(ratio >= 1.7, "errors {errors:?}, ratio {ratio}");
}

#[test]
fn pairing_is_bilinear() {
    let g = grid(64);
    let basis = BoundaryBasis::new(128, 8).unwrap();
    let q1 = bump(&g, Complex64::new(0.1, 0.0), 0.4, 2.0);
    let da = dn_map(&q1, &basis).unwrap().difference(&dn_map(&Field::zeros(&g), &basis).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (t1, t2, t3) = (random_vector(8, &mut rng), random_vector(8, &mut rng), random_vector(8, &mut rng));
    let c = Complex64::new(-0.4, 2.1);
    let lhs = alessandrini_pairing(&da, &t1.scale(c).add(&t3), &t2).unwrap();
    let rhs = alessandrini_pairing(&da, &t1, &t2).unwrap() * c + alessandrini_pairing(&da, &t3, &t2).unwrap();
    assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    let lhs = alessandrini_pairing(&da, &t1, &t2.scale(c).add(&t3)).unwrap();
    let rhs = alessandrini_pairing(&da, &t1, &t2).unwrap() * c + alessandrini_pairing(&da, &t1, &t3).unwrap();
    assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    let zero = da.difference(&da).unwrap();
    assert_eq!(alessandrini_pairing(&zero, &t1, &t2).unwrap(), Complex64::default());
}

#[test]
fn operator_norm_of_gap_grows_with_perturbation() {
    let g = grid(96);
    let basis = BoundaryBasis::new(128, 12).unwrap();
    let q = bump(&g, Complex64::new(-0.3, 0.2), 0.3, 1.0);
    let dq = bump(&g, Complex64::new(0.15, 0.1), 0.25, 0.5);
    let base = dn_map_with(&DirichletSolver::new(&q).unwrap(), &basis);
    assert_eq!(dn_operator_norm(&base.difference(&base).unwrap()), 0.0);
    let gaps: Vec<f64> = [0.125, 0.25, 0.5, 1.0]
        .iter()
        .map(|&t| {
            let a = dn_map(&(&q + &(&dq * t)), &basis).unwrap();
            dn_operator_norm(&a.difference(&base).unwrap())
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[0] < w[1]), "{gaps:?}");
    // nearly linear at small t
    let r = gaps[1] / gaps[0];
    assert!((r - 2.0).abs() < 0.1, "{gaps:?}");
}
