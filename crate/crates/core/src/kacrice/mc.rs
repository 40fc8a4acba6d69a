//! Monte Carlo inner expectations with common random numbers: one batch of
//! (uniform, normal, GOE eigenvalues, Z²) draws is reused at every radial
//! node, so the ρ-integrand is a smooth function that adaptive quadrature
//! can resolve. Samples are split into groups; the spread of the group
//! estimates gives the standard error.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::assumptions::RadialParams;
use crate::rmt::{eigvals_sorted, sample_goe};
use crate::rng::{Purpose, RngStream};
use crate::special::{norm_cdf, norm_ppf};

use super::exact::{hpos, Rep};

/// Distance below which |μⱼ| makes η′ numerically singular.
pub const SINGULAR_EPS: f64 = 1e-12;
/// Largest tolerated fraction of discarded samples.
pub const MAX_DISCARD_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Batch {
    pub n: usize,
    pub groups: usize,
    pub per_group: usize,
    /// uniforms for the truncated u-law
    pub unif: Vec<f64>,
    /// standard normals for y
    pub gauss: Vec<f64>,
    /// sorted GOE(n) eigenvalues, n per sample
    pub lam: Vec<f64>,
    /// Zₗ², n per sample
    pub z2: Vec<f64>,
}

impl Batch {
    /// Group g draws from its own streams, so a batch with a larger
    /// `per_group` extends (rather than replaces) a smaller one.
    pub fn new(seed: u64, n: usize, groups: usize, per_group: usize) -> Self {
        let m = groups * per_group;
        let mut b = Batch {
            n,
            groups,
            per_group,
            unif: Vec::with_capacity(m),
            gauss: Vec::with_capacity(m),
            lam: Vec::with_capacity(m * n),
            z2: Vec::with_capacity(m * n),
        };
        for g in 0..groups as u64 {
            let mut sv = RngStream::for_purpose(seed, Purpose::Value, g);
            let mut se = RngStream::for_purpose(seed, Purpose::Eigen, g);
            let mut sc = RngStream::for_purpose(seed, Purpose::Chi, g);
            for _ in 0..per_group {
                b.unif.push(sv.uniform());
                b.gauss.push(sv.normal());
                if n > 0 {
                    let m = sample_goe(n, &mut se).expect("n >= 1");
                    b.lam.extend(eigvals_sorted(m));
                    for _ in 0..n {
                        let z = sc.normal();
                        b.z2.push(z * z);
                    }
                }
            }
        }
        b
    }

    pub fn len(&self) -> usize {
        self.groups * self.per_group
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Intervals of the standardized value t = u/σ_Y with their normal masses.
#[derive(Debug, Clone)]
pub struct TruncNormal {
    pieces: Vec<(f64, f64, f64)>,
    pub mass: f64,
}

fn upper(x: f64) -> f64 {
    norm_cdf(-x)
}

impl TruncNormal {
    pub fn new(intervals: &[(f64, f64)]) -> Self {
        let pieces: Vec<(f64, f64, f64)> = intervals
            .iter()
            .map(|&(a, b)| {
                let m = if a >= 0.0 { upper(a) - upper(b) } else { norm_cdf(b) - norm_cdf(a) };
                (a, b, m.max(0.0))
            })
            .collect();
        let mass = pieces.iter().map(|p| p.2).sum();
        TruncNormal { pieces, mass }
    }

    /// Quantile of the normal law restricted to the union, at level w ∈ (0, 1).
    pub fn quantile(&self, w: f64) -> f64 {
        let mut target = w * self.mass;
        for (i, &(a, b, m)) in self.pieces.iter().enumerate() {
            if target <= m || i + 1 == self.pieces.len() {
                let q = target.min(m);
                let t = if a >= 0.0 { -norm_ppf(upper(a) - q) } else { norm_ppf(norm_cdf(a) + q) };
                return t.clamp(a, b);
            }
            target -= m;
        }
        0.0
    }
}

/// P and Q = Σ zₗ ∏_{j≠l} μⱼ, by prefix/suffix products.
#[inline]
pub fn p_and_q(mu: &[f64], z2: &[f64]) -> (f64, f64) {
    let n = mu.len();
    let mut pre = 1.0;
    let mut q = 0.0;
    let mut suffix = [1.0f64; 16];
    let mut suf_vec;
    let suf: &mut [f64] = if n < 16 {
        &mut suffix[..=n]
    } else {
        suf_vec = vec![1.0; n + 1];
        &mut suf_vec
    };
    for j in (0..n).rev() {
        suf[j] = suf[j + 1] * mu[j];
    }
    for l in 0..n {
        q += z2[l] * pre * suf[l + 1];
        pre *= mu[l];
    }
    (pre, q)
}

/// One radial node: group means of the inner expectation times the u- and
/// y-weights, laid out as out[g·(N+2) + k] with k = N+1 the total.
#[allow(clippy::too_many_arguments)]
pub fn shell_node_mc(
    rep: Rep,
    p: &RadialParams,
    tn: &TruncNormal,
    n_dim: usize,
    batch: &Batch,
    discards: &AtomicU64,
    out: &mut [f64],
) {
    let n = n_dim - 1;
    let nf = n as f64;
    let stride = n_dim + 2;
    let s = (-p.d2_0).sqrt();
    let w = tn.mass / (2.0 * s) / batch.per_group as f64;
    let mut mu = vec![0.0; n];
    let mut bad = 0u64;
    let v = p.corner_variance();
    let k3 = p.m3_slope();
    let kappa = if n > 0 { ((1.0 + nf * p.c).sqrt() - 1.0) / nf } else { 0.0 };
    let vz = (-2.0 * p.d2_0 - p.beta * p.beta) / (4.0 * s * s);
    let b = p.b2.sqrt();
    for g in 0..batch.groups {
        let o = &mut out[g * stride..(g + 1) * stride];
        for i in g * batch.per_group..(g + 1) * batch.per_group {
            let u = p.sigma_y * tn.quantile(batch.unif[i]);
            let m1 = p.m1_per_u * u;
            let m2 = p.m2_per_u * u;
            let lam = &batch.lam[i * n..(i + 1) * n];
            let z2 = &batch.z2[i * n..(i + 1) * n];
            match rep {
                Rep::Goi => {
                    let y = v.sqrt() * batch.gauss[i];
                    let m3 = k3 * y + m2 / (2.0 * s);
                    let tr: f64 = lam.iter().sum();
                    for j in 0..n {
                        mu[j] = lam[j] + kappa * tr + m3;
                    }
                    if mu.iter().any(|m| m.abs() < SINGULAR_EPS) {
                        bad += 1;
                        continue;
                    }
                    let (pp, q) = p_and_q(&mu, z2);
                    let x = (m1 + 2.0 * s * y) * pp - s * q;
                    let j = mu.iter().filter(|&&m| m < 0.0).count();
                    let sig = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let k = if sig * x < 0.0 { j + 1 } else { j };
                    o[k] += w * x.abs();
                    o[n_dim + 1] += w * x.abs();
                }
                Rep::Goe => {
                    let y = -m2 / (2.0 * s) + vz.sqrt() * batch.gauss[i];
                    for j in 0..n {
                        mu[j] = lam[j] - y;
                    }
                    if mu.iter().any(|m| m.abs() < SINGULAR_EPS) {
                        bad += 1;
                        continue;
                    }
                    let (pp, q) = p_and_q(&mu, z2);
                    let abar = p.abar.at(u, y);
                    let j = mu.iter().filter(|&&m| m < 0.0).count();
                    let sig = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let mean = sig * (abar * pp - s * q);
                    let sd = b * pp.abs();
                    let (plus, minus) = (hpos(mean, sd), hpos(-mean, sd));
                    o[j] += w * plus;
                    o[j + 1] += w * minus;
                    o[n_dim + 1] += w * (plus + minus);
                }
            }
        }
    }
    if bad > 0 {
        discards.fetch_add(bad, Ordering::Relaxed);
    }
}

/// Group means of √π·∏|λⱼ + y| by index, y ~ N(0, ½), λ ~ GOE(N).
pub fn er_mc(batch: &Batch) -> Vec<f64> {
    let n = batch.n;
    let stride = n + 2;
    let mut out = vec![0.0; batch.groups * stride];
    let w = std::f64::consts::PI.sqrt() / batch.per_group as f64;
    for g in 0..batch.groups {
        for i in g * batch.per_group..(g + 1) * batch.per_group {
            let y = batch.gauss[i] * std::f64::consts::FRAC_1_SQRT_2;
            let lam = &batch.lam[i * n..(i + 1) * n];
            let v: f64 = lam.iter().map(|l| (l + y).abs()).product();
            let k = lam.iter().filter(|&&l| l < -y).count();
            out[g * stride + k] += w * v;
            out[g * stride + n + 1] += w * v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_quantiles_stay_inside() {
        let tn = TruncNormal::new(&[(-1.0, 0.5), (2.0, 9.0)]);
        for i in 1..100 {
            let t = tn.quantile(i as f64 / 100.0);
            assert!((-1.0..=0.5).contains(&t) || (2.0..=9.0).contains(&t), "{t}");
        }
        let tn = TruncNormal::new(&[(6.0, f64::INFINITY)]);
        let t = tn.quantile(0.5);
        assert!(t > 6.0 && t < 6.3, "{t}");
    }

    #[test]
    fn p_and_q_match_direct_sum() {
        let mu = [0.3, -1.2, 2.0];
        let z2 = [0.5, 1.5, 0.25];
        let (p, q) = p_and_q(&mu, &z2);
        assert!((p - 0.3 * -1.2 * 2.0).abs() < 1e-15);
        let want = 0.5 * (-1.2 * 2.0) + 1.5 * (0.3 * 2.0) + 0.25 * (0.3 * -1.2);
        assert!((q - want).abs() < 1e-15);
    }
}
