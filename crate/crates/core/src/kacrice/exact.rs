//! Deterministic inner expectations for N − 1 ≤ 2 (and the ER integral for
//! N ≤ 3).
//!
//! With μ = λ + m₃ (GOI) or μ = λ − y (GOE) the eigenvalue density times the
//! Gaussian y-weight is Gaussian in y for fixed μ, so y is integrated in
//! closed form. What remains per μ is X = A·P − s·Q + B·G with
//! P = ∏μⱼ, Q = Σ Zₗ² ∏_{j≠l} μⱼ, G standard normal, and
//! index = #neg(μ) + 1{(−1)^{#neg} X < 0}.

use crate::assumptions::RadialParams;
use crate::quad::{breakpoints, integrate, integrate_ordered, QuadOptions, QuadResult, Rule};
use crate::rmt::{goi_logdensity_unchecked, ln_k};
use crate::special::{log_norm_cdf, norm_cdf, norm_pdf, psi};

/// Range of the standard-normal variables Z (|Z| ≤ ZMAX).
pub const ZMAX: f64 = 9.0;

/// E(a + bG)⁺.
#[inline]
pub fn hpos(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        b * psi(a / b)
    } else {
        a.max(0.0)
    }
}

/// E(a − vT + bG)⁺ with T ~ Exp(mean 2) independent of G.
pub fn h_exp(a: f64, v: f64, b: f64) -> f64 {
    if v == 0.0 {
        return hpos(a, b);
    }
    if v < 0.0 {
        return (a - 2.0 * v + h_exp(-a, -v, b)).max(0.0);
    }
    let rate = 0.5 / v;
    if b <= 0.0 {
        return if a <= 0.0 { 0.0 } else { a - 2.0 * v * (-(a * rate)).exp_m1().abs() };
    }
    let t = a / b;
    let tail = (-rate * a + 0.5 * rate * rate * b * b + log_norm_cdf(t - rate * b)).exp();
    (hpos(a, b) - 2.0 * v * (norm_cdf(t) - tail)).max(0.0)
}

/// Relative tolerances per nesting level.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rho: QuadOptions,
    pub u: QuadOptions,
    pub mu: QuadOptions,
    pub z: QuadOptions,
}

impl Tolerances {
    /// Per-level tolerances for a target relative accuracy `tol`. The inner
    /// levels run looser than the target: Gauss–Kronrod error estimates on
    /// these smooth integrands overstate the true error by orders of magnitude.
    pub fn from_rel(tol: f64) -> Self {
        let q = |rel: f64, max_intervals: usize| QuadOptions { abs_tol: 1e-300, rel_tol: rel, max_intervals, rule: Rule::Gk15 };
        let inner = (10.0 * tol).min(0.05);
        Tolerances {
            rho: q(tol / 2.0, 200),
            u: q(tol, 200),
            mu: q(inner.max(1e-9), 200),
            z: q(inner.max(1e-10), 60),
        }
    }
}

/// Adds w·E(σX)⁺ to out[j], w·E(σX)⁻ to out[j+1] and their sum to out[total],
/// where σ = (−1)^j, j = #neg(μ), X = a·P − s·Q + b·|P|·G.
pub fn accumulate(mu: &[f64], w: f64, a: f64, b: f64, s: f64, z: &QuadOptions, total: usize, out: &mut [f64]) {
    if w == 0.0 || !w.is_finite() {
        return;
    }
    let p: f64 = mu.iter().product();
    let j = mu.iter().filter(|&&m| m < 0.0).count();
    let sig = if j % 2 == 0 { 1.0 } else { -1.0 };
    let alpha = sig * a * p;
    let beta = b * p.abs();
    let (plus, minus) = match mu.len() {
        0 => (hpos(alpha, beta), hpos(-alpha, beta)),
        1 => chi1_parts(alpha, sig * s, beta, z),
        2 => polar_parts(alpha, sig * s, mu[0], mu[1], beta, z),
        _ => unreachable!("deterministic inner path needs N - 1 <= 2"),
    };
    out[j] += w * plus;
    out[j + 1] += w * minus;
    out[total] += w * (plus + minus);
}

/// (E(α − vZ² + βG)⁺, E(α − vZ² + βG)⁻) for Z standard normal.
fn chi1_parts(alpha: f64, v: f64, beta: f64, opts: &QuadOptions) -> (f64, f64) {
    let mut extra = vec![];
    if v != 0.0 && alpha / v > 0.0 {
        extra.push((alpha / v).sqrt());
    }
    let r = integrate(
        |z, o| {
            let w = 2.0 * norm_pdf(z);
            let m = alpha - v * z * z;
            o[0] = w * hpos(m, beta);
            o[1] = w * hpos(-m, beta);
        },
        2,
        &breakpoints(0.0, ZMAX, &extra),
        opts,
    );
    (r.value[0], r.value[1])
}

/// The same with Q = Z₁²μ₂ + Z₂²μ₁ = R²(μ₂cos²θ + μ₁sin²θ), R² ~ Exp(mean 2).
fn polar_parts(alpha: f64, s: f64, m1: f64, m2: f64, beta: f64, opts: &QuadOptions) -> (f64, f64) {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut extra = vec![];
    if m1 * m2 < 0.0 {
        extra.push((-m2 / m1).sqrt().atan());
    }
    let r = integrate(
        |th, o| {
            let (sn, cs) = th.sin_cos();
            let v = s * (m2 * cs * cs + m1 * sn * sn);
            o[0] = h_exp(alpha, v, beta) / half_pi;
            o[1] = h_exp(-alpha, -v, beta) / half_pi;
        },
        2,
        &breakpoints(0.0, half_pi, &extra),
        opts,
    );
    (r.value[0], r.value[1])
}

/// Eigenvalue range centre ± (MU_SDS·w + 2) with breakpoints at 0 and centre ± 2w.
pub const MU_SDS: f64 = 7.0;

fn mu_range(centre: f64, w: f64) -> (f64, f64, Vec<f64>) {
    let half = MU_SDS * w + 2.0;
    (centre - half, centre + half, vec![0.0, centre - 2.0 * w, centre + 2.0 * w])
}

/// Which conditional law the inner expectation is taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rep {
    Goi,
    Goe,
}

/// ∫ dμ f(μ) W(μ) E[...] at one (ρ, u) node; components 0..=N by index, N+1 total.
pub fn shell_node(rep: Rep, p: &RadialParams, u: f64, n_dim: usize, tol: &Tolerances) -> QuadResult {
    let n = n_dim - 1;
    let nf = n as f64;
    let s = (-p.d2_0).sqrt();
    let total = n_dim + 1;
    let dim = n_dim + 2;
    let lnk = ln_k(n.max(1));
    let m1 = p.m1_per_u * u;
    let m2 = p.m2_per_u * u;
    let zopt = tol.z;
    match rep {
        Rep::Goi => {
            let v = p.corner_variance();
            let k3 = p.m3_slope();
            let c = p.c;
            let gam = 1.0 + nf * c;
            let m0 = m2 / (2.0 * s);
            let tau2 = 1.0 / (1.0 / v + nf * k3 * k3 / gam);
            let tau = tau2.sqrt();
            let base = 0.5 * (tau2 / v).ln() - nf * m0 * m0 / (2.0 * gam);
            let w = (1.0 + c.abs() * nf + k3 * k3 * v).sqrt();
            let (lo, hi, br) = mu_range(m0, w);
            integrate_ordered(n, lo, hi, &br, dim, &[tol.mu], |mu, out| {
                let sm: f64 = mu.iter().sum();
                let ell = k3 * (sm - nf * m0) / gam;
                let ybar = tau2 * ell;
                let logf = if n == 0 { 0.0 } else { goi_logdensity_unchecked(c, mu, lnk) };
                let w = (logf + base + m0 * sm / gam + 0.5 * tau2 * ell * ell).exp();
                accumulate(mu, w, m1 + 2.0 * s * ybar, 2.0 * s * tau, s, &zopt, total, out);
            })
        }
        Rep::Goe => {
            let mz = -m2 / (2.0 * s);
            let vz = (-2.0 * p.d2_0 - p.beta * p.beta) / (4.0 * s * s);
            let tau2 = 1.0 / (1.0 / vz + nf);
            let ay = p.abar.coef_y;
            let a0 = p.abar.coef_u * u;
            let b = (ay * ay * tau2 + p.b2).sqrt();
            let base = 0.5 * (tau2 / vz).ln() - mz * mz / (2.0 * vz);
            let (lo, hi, br) = mu_range(-mz, (1.0 + vz).sqrt());
            integrate_ordered(n, lo, hi, &br, dim, &[tol.mu], |mu, out| {
                let sm: f64 = mu.iter().sum();
                let ell = mz / vz - sm;
                let ybar = tau2 * ell;
                let logf = if n == 0 { 0.0 } else { goi_logdensity_unchecked(0.0, mu, lnk) };
                let w = (logf + base + 0.5 * tau2 * ell * ell).exp();
                accumulate(mu, w, a0 + ay * ybar, b, s, &zopt, total, out);
            })
        }
    }
}

/// ∫ e^{−y²} E_GOE(N)[∏|λⱼ + y| 1{index}] dy for N ≤ 3, components by index
/// then total. With μ = λ + y the y-integral is Gaussian:
/// ∫ dμ f₀(μ) √(π/a) e^{S²/(4a)} |∏μ|, a = 1 + N/2.
pub fn er_integral(n: usize, opts: &QuadOptions) -> QuadResult {
    let a = 1.0 + n as f64 / 2.0;
    let lnk = ln_k(n);
    let pre = 0.5 * (std::f64::consts::PI / a).ln();
    let (lo, hi, br) = mu_range(0.0, 1.5f64.sqrt());
    integrate_ordered(n, lo, hi, &br, n + 2, &[*opts], |mu, out| {
        let sm: f64 = mu.iter().sum();
        let p: f64 = mu.iter().product::<f64>().abs();
        let w = (goi_logdensity_unchecked(0.0, mu, lnk) + pre + sm * sm / (4.0 * a)).exp() * p;
        let j = mu.iter().filter(|&&m| m < 0.0).count();
        out[j] += w;
        out[n + 1] += w;
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_scalar;

    fn brute_h(a: f64, v: f64, b: f64) -> f64 {
        // E over T ~ Exp(mean 2) of E(a − vT + bG)⁺
        let o = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-12, max_intervals: 400, ..Default::default() };
        integrate_scalar(|t| 0.5 * (-0.5 * t).exp() * hpos(a - v * t, b), 0.0, 120.0, &o).0
    }

    #[test]
    fn exgaussian_positive_part_matches_quadrature() {
        for &(a, v, b) in &[
            (0.3, 0.7, 1.1),
            (-1.0, 0.2, 0.5),
            (2.0, -0.4, 0.3),
            (-0.5, -1.5, 2.0),
            (1.0, 3.0, 0.01),
            (0.0, 1e-6, 1.0),
            (4.0, 2.0, 0.0),
        ] {
            let want = brute_h(a, v, b);
            let got = h_exp(a, v, b);
            assert!((got - want).abs() < 1e-9 * (1.0 + want.abs()), "{a} {v} {b}: {got} vs {want}");
        }
    }

    #[test]
    fn positive_and_negative_parts_sum_to_abs() {
        let (a, v, b) = (0.4, -0.9, 0.6);
        // E(X)⁺ − E(X)⁻ = E X = a − 2v
        let d = h_exp(a, v, b) - h_exp(-a, -v, b);
        assert!((d - (a - 2.0 * v)).abs() < 1e-13);
    }

    #[test]
    fn er_n2_equals_goi_half_representation() {
        // components k = 0, 1, 2 are in ratio 1 : 2 : 1; with the prefactor they are 1/(√3π)·(π/(-2D''(0)/D'(0)))
        let r = er_integral(2, &QuadOptions::rel(1e-10));
        let c = 1.0 / (3f64.sqrt() * std::f64::consts::PI);
        // prefactor for D''(0) = -1, D'(0) = 1 is 2/π^{3/2}
        let pre = 2.0 / std::f64::consts::PI.powf(1.5);
        assert!((pre * r.value[0] - c).abs() < 1e-8);
        assert!((pre * r.value[1] - 2.0 * c).abs() < 1e-8);
        assert!((pre * r.value[2] - c).abs() < 1e-8);
        assert!((pre * r.value[3] - 4.0 * c).abs() < 1e-8);
    }
}
