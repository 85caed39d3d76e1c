use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cgo_lab::disc::{BoundaryBasis, DiscGrid, Field};
use cgo_lab::experiments::potentials::bump;
use cgo_lab::norms::{lorentz_norm_weighted, lp_norm, p_star};
use cgo_lab::transforms::{cauchy_pompeiu_check, lattice_convolution, PhaseParams, Transforms};

fn lab(n: usize) -> (Arc<DiscGrid>, Transforms) {
    let g = Arc::new(DiscGrid::new(n, 2.0).unwrap());
    let t = Transforms::new(&g).unwrap();
    (g, t)
}

fn fine() -> &'static (Arc<DiscGrid>, Transforms) {
    static LAB: OnceLock<(Arc<DiscGrid>, Transforms)> = OnceLock::new();
    LAB.get_or_init(|| lab(256))
}

fn random_field(g: &Arc<DiscGrid>, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..g.len())
        .map(|i| {
            if g.inside(i) {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::default()
            }
        })
        .collect();
    Field::from_values(g, values).unwrap()
}

fn rel_diff(a: &Field, b: &Field) -> f64 {
    let num = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>();
    let den = b.values().iter().map(|y| y.norm_sqr()).sum::<f64>().max(1e-300);
    (num / den).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn operators_are_linear(seed in 0u64..1000, ar in -3.0..3.0f64, ai in -3.0..3.0f64, n in 1.0..64.0f64) {
        let (g, ops) = lab(32);
        let f = random_field(&g, seed);
        let h = random_field(&g, seed + 1);
        let a = Complex64::new(ar, ai);
        let combo = &f.scale(a) + &h;
        let p = PhaseParams::new(n, Complex64::new(0.1, -0.2)).unwrap();
        let ops_list: [&dyn Fn(&Field) -> Field; 4] = [
            &|x| ops.cauchy(x),
            &|x| ops.cauchy_bar(x),
            &|x| ops.conjugated_cauchy(x, &p),
            &|x| ops.stationary_phase(x, n).unwrap(),
        ];
        for op in ops_list {
            let lhs = op(&combo);
            let rhs = &op(&f).scale(a) + &op(&h);
            prop_assert!(rel_diff(&lhs, &rhs) < 1e-10);
        }
    }
}

#[test]
fn cauchy_pompeiu_examples() {
    let (g, ops) = fine();
    let basis = BoundaryBasis::new(512, 32).unwrap();
    let cases: [(&str, fn(Complex64) -> Complex64, Complex64); 3] = [
        ("z", |z| z, Complex64::new(0.0, 0.0)),
        ("conj z", |z| z.conj(), Complex64::new(1.0, 0.0)),
        ("one", |_| Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
    ];
    for (name, f, dbar) in cases {
        let field = Field::from_fn(g, f);
        let dbar_f = Field::from_fn_masked(g, |_| dbar);
        let r = cauchy_pompeiu_check(ops, &field, &dbar_f, &basis).unwrap();
        assert!(r < 0.05, "{name}: residual {r}");
    }
}

#[test]
fn stationary_phase_of_zero_and_symbol() {
    let (g, ops) = fine();
    let zero = ops.stationary_phase(&Field::zeros(g), 16.0).unwrap();
    assert_eq!(zero.max_abs(), 0.0);
}

#[test]
fn stationary_phase_error_decreases_in_n() {
    let (g, ops) = fine();
    let q = bump(g, Complex64::new(0.15, 0.1), 0.5, 1.0);
    let errs: Vec<f64> = [8.0, 16.0, 32.0, 64.0, 128.0, 256.0]
        .iter()
        .map(|&n| lp_norm(&(&ops.stationary_phase(&q, n).unwrap() - &q), 2.0).unwrap())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn cauchy_lp_ratio_is_bounded_across_resolutions() {
    let mut worst = Vec::new();
    for n in [64, 128] {
        let (g, ops) = lab(n);
        let mut w = 0.0f64;
        for seed in 0..50 {
            let c = Complex64::new(0.3 * ((seed % 7) as f64 / 7.0 - 0.5), 0.3 * ((seed % 5) as f64 / 5.0 - 0.5));
            let f = bump(&g, c, 0.2 + 0.01 * (seed % 20) as f64, 1.0).scale(Complex64::from_polar(1.0, seed as f64));
            let ratio = lp_norm(&ops.cauchy(&f), 3.0).unwrap() / lp_norm(&f, p_star(3.0)).unwrap();
            w = w.max(ratio);
        }
        worst.push(w);
    }
    assert!(worst[1] <= 1.1 * worst[0], "{worst:?}");
}

/// O'Neil: ||f * g||_{(r,s)} <= 3r ||f||_{(p1,q1)} ||g||_{(p2,q2)} with
/// 1/p1 + 1/p2 = 1 + 1/r.
#[test]
fn oneil_convolution_inequality() {
    let (g, _) = lab(48);
    let w = g.weight();
    let (p, ps) = (3.0, p_star(3.0));
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let f = bump(&g, Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)), rng.gen_range(0.2..0.6), 1.0);
        let k = random_field(&g, rng.gen());
        let conv = lattice_convolution(&f, &k).unwrap();
        let abs = |v: &[Complex64]| v.iter().map(|x| x.norm()).collect::<Vec<_>>();
        let fv = abs(f.values());
        let kv = abs(k.values());
        let lhs = lorentz_norm_weighted(&abs(&conv), w, p, p).unwrap();
        let rhs = 3.0 * p
            * lorentz_norm_weighted(&fv, w, 2.0, f64::INFINITY).unwrap()
            * lorentz_norm_weighted(&kv, w, ps, ps).unwrap();
        assert!(lhs <= rhs, "{lhs} > {rhs}");
    }
}
