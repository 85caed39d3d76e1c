//! Gauss-Legendre nodes and weights on `[-1, 1]`.

pub const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// Composite 8-point Gauss-Legendre rule with `pieces` equal subintervals.
pub fn integrate<T>(a: f64, b: f64, pieces: usize, f: impl Fn(f64) -> T) -> T
where
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    let width = (b - a) / pieces as f64;
    let mut acc = T::default();
    for p in 0..pieces {
        let mid = a + (p as f64 + 0.5) * width;
        for &(x, w) in &GL8 {
            acc = acc + f(mid + 0.5 * width * x) * (w * 0.5 * width);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    #[test]
    fn integrates_polynomials_and_smooth_functions() {
        let v = super::integrate(0.0, 2.0, 1, |x: f64| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let v = super::integrate(0.0, std::f64::consts::PI, 4, f64::sin);
        assert!((v - 2.0).abs() < 1e-13);
    }
}
