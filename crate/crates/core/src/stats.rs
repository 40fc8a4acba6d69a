//! Small statistical helpers for the verification suites.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// A moment estimate compared with its target.
#[derive(Debug, Clone, Serialize)]
pub struct MomentCheck {
    pub name: String,
    pub expected: f64,
    pub estimate: f64,
    pub std_error: f64,
}

impl MomentCheck {
    /// Discrepancy in units of the estimated standard error.
    pub fn z(&self) -> f64 {
        if self.std_error > 0.0 {
            (self.estimate - self.expected).abs() / self.std_error
        } else if self.estimate == self.expected {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    pub n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.n as f64).sqrt()
    }

    pub fn check(&self, name: &str, expected: f64) -> MomentCheck {
        MomentCheck {
            name: name.to_string(),
            expected,
            estimate: self.mean(),
            std_error: self.std_error(),
        }
    }
}

/// Upper tail of χ²(df) at `stat`.
pub fn chi2_sf(stat: f64, df: f64) -> f64 {
    match ChiSquared::new(df) {
        Ok(d) => d.sf(stat),
        Err(_) => f64::NAN,
    }
}

/// Kolmogorov distribution tail Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let t = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { t } else { -t };
        if t < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS test; returns (D, asymptotic p-value).
pub fn ks_test(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let en = n.sqrt();
    (d, kolmogorov_q((en + 0.12 + 0.11 / en) * d))
}

/// Pearson χ² over (observed, expected) bins; bins with expected count
/// below `min_expected` are pooled. Returns (statistic, df, p-value).
pub fn pearson(bins: &[(f64, f64)], min_expected: f64) -> (f64, usize, f64) {
    let (mut stat, mut k) = (0.0, 0usize);
    let (mut po, mut pe) = (0.0, 0.0);
    for &(o, e) in bins {
        if e >= min_expected {
            stat += (o - e) * (o - e) / e;
            k += 1;
        } else {
            po += o;
            pe += e;
        }
    }
    if pe > 0.0 {
        stat += (po - pe) * (po - pe) / pe;
        k += 1;
    }
    let df = k.saturating_sub(1).max(1);
    (stat, df, chi2_sf(stat, df as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_tail_values() {
        // scipy.special.kolmogorov
        assert!((kolmogorov_q(1.0) - 0.26999967167735456).abs() < 1e-12);
        assert!((kolmogorov_q(1.36) - 0.049485876755377876).abs() < 1e-12);
    }

    #[test]
    fn welford_matches_direct() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        let mut w = Welford::default();
        xs.iter().for_each(|&x| w.push(x));
        assert!((w.mean() - 3.5).abs() < 1e-15);
        assert!((w.variance() - 7.0).abs() < 1e-14);
    }

    #[test]
    fn chi2_tail() {
        assert!((chi2_sf(3.841458820694124, 1.0) - 0.05).abs() < 1e-9);
    }
}
