use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line `y = slope x + intercept`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument("need at least two points for a fit".into()));
    }
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Measured values against `n` with a fitted power law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub label: String,
    pub pairs: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub target: f64,
    pub slack: f64,
    pub pass: bool,
}

impl DecayReport {
    /// Fits `ln value` against `ln n`; passes when `slope <= target + slack`.
    pub fn fit(label: impl Into<String>, pairs: Vec<(f64, f64)>, target: f64, slack: f64) -> Result<Self> {
        if pairs.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidArgument("n must be strictly increasing".into()));
        }
        if pairs.iter().any(|&(n, v)| !(n > 0.0) || !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument("decay values must be positive and finite".into()));
        }
        let x: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
        let (slope, intercept) = least_squares(&x, &y)?;
        Ok(Self {
            label: label.into(),
            pairs,
            slope,
            intercept,
            target,
            slack,
            pass: slope <= target + slack,
        })
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().map(|p| p.1)
    }

    pub fn is_monotone_decreasing(&self) -> bool {
        self.pairs.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn recovers_exact_power_laws(c in 0.1f64..10.0, s in -3.0f64..1.0) {
            let pairs: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0].iter().map(|&n: &f64| (n, c * n.powf(s))).collect();
            let r = DecayReport::fit("x", pairs, s, 0.0).unwrap();
            prop_assert!((r.slope - s).abs() < 1e-10);
            prop_assert!((r.intercept - c.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(DecayReport::fit("x", vec![(2.0, 1.0), (1.0, 0.5)], 0.0, 0.1).is_err());
        assert!(DecayReport::fit("x", vec![(1.0, 1.0), (2.0, 0.0)], 0.0, 0.1).is_err());
        assert!(DecayReport::fit("x", vec![(1.0, 1.0)], 0.0, 0.1).is_err());
    }

    #[test]
    fn pass_flag_uses_slack() {
        let pairs = vec![(1.0, 1.0), (2.0, 0.5)];
        assert!(DecayReport::fit("x", pairs.clone(), -1.0, 0.0).unwrap().pass);
        assert!(!DecayReport::fit("x", pairs.clone(), -1.2, 0.1).unwrap().pass);
        assert!(DecayReport::fit("x", pairs, -1.2, 0.25).unwrap().pass);
    }
}
