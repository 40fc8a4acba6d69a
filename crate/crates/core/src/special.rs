//! Special functions: the Λ_N kernel and Bessel J, the normal
//! distribution helpers used in closed-form Gaussian expectations, and the
//! cosine integral needed by the `f2` catalog member.

use num_complex::Complex64;
use libm::erfc;
use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal density.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function Φ.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// 1/(x + a/(x + (a+1)/(x + ...))) by the modified Lentz method.
fn mills_fraction(x: f64, a: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 0..2000 {
        let ak = a + k as f64;
        d = x + ak * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + ak / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// Mills ratio R(x) = (1 − Φ(x)) / φ(x) for x ≥ 0.
pub fn mills_ratio(x: f64) -> f64 {
    if x < 5.0 {
        return 0.5 * erfc(x * FRAC_1_SQRT_2) / norm_pdf(x);
    }
    mills_fraction(x, 1.0)
}

/// ln Φ(x), accurate far into the lower tail.
pub fn log_norm_cdf(x: f64) -> f64 {
    if x > -5.0 {
        norm_cdf(x).ln()
    } else {
        -0.5 * x * x - LN_SQRT_2PI + mills_ratio(-x).ln()
    }
}

/// ψ(t) = tΦ(t) + φ(t) = E (t + G)^+ for standard normal G.
///
/// For t < −3 the difference φ − |t|Φ cancels; there ψ(−x) = φ(x)R(x)T(x)
/// with R the Mills ratio and T(x) = 1/R(x) − x, both as continued fractions.
pub fn psi(t: f64) -> f64 {
    if t >= -3.0 {
        return t * norm_cdf(t) + norm_pdf(t);
    }
    let x = -t;
    norm_pdf(x) * mills_fraction(x, 1.0) * mills_fraction(x, 2.0)
}

/// Standard normal quantile Φ⁻¹(p).
pub fn norm_ppf(p: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::standard().inverse_cdf(p)
}

/// E|a + bG| for b ≥ 0.
pub fn abs_normal_mean(a: f64, b: f64) -> f64 {
    if b <= 0.0 {
        return a.abs();
    }
    b * (psi(a / b) + psi(-a / b))
}

/// Pochhammer symbol (a)_k.
pub fn poch(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a + i as f64))
}

pub fn gamma_fn(x: f64) -> f64 {
    gamma(x)
}

pub fn ln_gamma_fn(x: f64) -> f64 {
    ln_gamma(x)
}

/// Λ_N(x) = 0F1(; N/2; −x²/4); cos x for N = 1.
///
/// The alternating series is used while x < 8 or x² < 8N, where its
/// largest term stays within a factor of ~10 of the result. Beyond that the
/// kernel is Γ(N/2)(2/x)^ν J_ν(x) with ν = N/2 − 1.
pub fn lambda_kernel(n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("Lambda_N needs N >= 1".into()));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("Lambda_N needs x >= 0, got {x}")));
    }
    if n == 1 {
        return Ok(x.cos());
    }
    let b = n as f64 / 2.0;
    if x < 8.0 || x * x < 8.0 * n as f64 {
        return Ok(lambda_series(b, x));
    }
    let nu = b - 1.0;
    let j = bessel_j(nu, x)?;
    if j == 0.0 {
        return Ok(0.0);
    }
    let lg = ln_gamma(b) + nu * (2.0 / x).ln() + j.abs().ln();
    Ok(j.signum() * lg.exp())
}

/// Σ_m (−x²/4)^m / (m! (b)_m).
pub fn lambda_series(b: f64, x: f64) -> f64 {
    let z = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= z / (m * (b + m - 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && m > -z / b {
            break;
        }
        if m > 2000.0 {
            break;
        }
    }
    sum
}

/// 1 − Λ_N(x) without cancellation for small x.
pub fn one_minus_lambda(n: usize, x: f64) -> Result<f64> {
    if x < 1.0 {
        if n == 1 {
            return Ok(2.0 * (0.5 * x).sin().powi(2));
        }
        let b = n as f64 / 2.0;
        let z = -0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 0.0;
        let mut m = 0.0;
        loop {
            m += 1.0;
            term *= z / (m * (b + m - 1.0));
            sum -= term;
            if term.abs() < 1e-18 * sum.abs() || m > 60.0 {
                break;
            }
        }
        return Ok(sum);
    }
    Ok(1.0 - lambda_kernel(n, x)?)
}

/// Bessel function of the first kind J_ν(x) for ν ≥ 0 an integer or a
/// half-integer and x > 0.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    let twice = 2.0 * nu;
    if nu < 0.0 || (twice - twice.round()).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "bessel_j supports integer and half-integer orders, got {nu}"
        )));
    }
    if !(x > 0.0) {
        if x == 0.0 {
            return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
        }
        return Err(Error::Domain(format!("bessel_j needs x >= 0, got {x}")));
    }
    if x >= 30.0 + nu * nu {
        return Ok(bessel_j_hankel(nu, x));
    }
    Ok(bessel_j_miller(nu, x))
}

/// Hankel asymptotic expansion; terminates exactly for half-integer ν.
fn bessel_j_hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let kk = k as f64;
            term *= (mu - (2.0 * kk - 1.0).powi(2)) / (kk * 8.0 * x);
        }
        if term.abs() > last && k > 2 {
            break;
        }
        last = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term == 0.0 || term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Miller backward recurrence. Integer orders are normalised with
/// J₀ + 2ΣJ_{2k} = 1, half-integer orders with the closed forms of J_{±1/2}.
fn bessel_j_miller(nu: f64, x: f64) -> f64 {
    let frac = nu - nu.floor();
    let top = nu.max(x);
    let start = (top + 20.0 + (60.0 * top).sqrt()).ceil() as usize;
    let start = start + start % 2;
    let big = 1e250;
    let mut jp1 = 0.0; // J_{k+1}
    let mut jk = 1e-300; // J_k
    let mut sum = 0.0;
    let mut target = 0.0;
    let mut k = start as f64 + frac;
    let integer = frac == 0.0;
    let lowest = if integer { 0.0 } else { -0.5 };
    loop {
        if (k - nu).abs() < 1e-9 {
            target = jk;
        }
        if integer {
            let ki = k.round() as i64;
            if ki == 0 {
                sum += jk;
            } else if ki % 2 == 0 {
                sum += 2.0 * jk;
            }
        }
        if k <= lowest + 1e-9 {
            break;
        }
        let jm1 = 2.0 * k / x * jk - jp1;
        jp1 = jk;
        jk = jm1;
        k -= 1.0;
        if jk.abs() > big {
            jk /= big;
            jp1 /= big;
            sum /= big;
            target /= big;
        }
    }
    if integer {
        target / sum
    } else {
        // jk ≈ c·J_{-1/2}, jp1 ≈ c·J_{1/2}
        let amp = (2.0 / (PI * x)).sqrt();
        let (s, c) = x.sin_cos();
        let scale = if s.abs() > c.abs() {
            amp * s / jp1
        } else {
            amp * c / jk
        };
        target * scale
    }
}

/// Ci(x) = γ + ln x + ∫₀ˣ (cos t − 1)/t dt for x > 0.
pub fn cosine_integral(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("Ci needs x > 0, got {x}")));
    }
    if x <= 4.0 {
        return Ok(EULER_GAMMA + x.ln() - cin(x));
    }
    Ok(ci_continued_fraction(x))
}

/// Cin(x) = ∫₀ˣ (1 − cos t)/t dt, entire and even.
pub fn cin(x: f64) -> f64 {
    let x = x.abs();
    if x <= 4.0 {
        let x2 = x * x;
        let mut term = 1.0; // x^{2k}/(2k)!
        let mut sum = 0.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= x2 / ((2.0 * k - 1.0) * (2.0 * k));
            let add = term / (2.0 * k);
            if (k as i64) % 2 == 1 {
                sum += add;
            } else {
                sum -= add;
            }
            if add < 1e-18 * sum.abs() || k > 60.0 {
                break;
            }
        }
        return sum;
    }
    EULER_GAMMA + x.ln() - ci_continued_fraction(x)
}

/// Ci(x) for x > 2 from the continued fraction of E₁(ix).
fn ci_continued_fraction(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..1000 {
        let a = -((i - 1) as f64).powi(2);
        b += Complex64::new(2.0, 0.0);
        d = Complex64::new(1.0, 0.0) / (d * a + b);
        c = b + Complex64::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
    }
    let (s, co) = x.sin_cos();
    h *= Complex64::new(co, -s);
    -h.re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn lambda_low_orders_match_elementary_forms() {
        for &x in &[0.0, 0.3, 1.0, 2.5, 7.9, 8.5, 12.0, 31.0, 77.7] {
            let l3 = lambda_kernel(3, x).unwrap();
            let e3 = if x == 0.0 { 1.0 } else { x.sin() / x };
            assert!(close(l3, e3, 1e-13), "N=3 x={x}: {l3} vs {e3}");
            let l5 = lambda_kernel(5, x).unwrap();
            let e5 = if x == 0.0 {
                1.0
            } else {
                3.0 * (x.sin() - x * x.cos()) / x.powi(3)
            };
            assert!(close(l5, e5, 1e-10), "N=5 x={x}: {l5} vs {e5}");
        }
        assert_eq!(lambda_kernel(5, 0.0).unwrap(), 1.0);
        assert!(close(lambda_kernel(3, 1.0).unwrap(), 0.841_470_984_807_896_5, 1e-15));
    }

    #[test]
    fn bessel_reference_values() {
        // scipy.special.jv
        let cases = [
            (0.0, 1.0, 0.765_197_686_557_966_6),
            (0.0, 10.0, -0.245_935_764_451_348_3),
            (0.0, 30.0, -0.086_367_983_581_040_2),
            (1.0, 10.0, 0.043_472_746_168_861_6),
            (3.0, 12.0, 0.195_136_939_531_092_65),
            (1.0, 100.0, -0.077_145_352_014_112_14),
            (7.0, 9.5, 0.286_776_937_785_182_65),
        ];
        for (nu, x, want) in cases {
            let got = bessel_j(nu, x).unwrap();
            assert!((got - want).abs() < 1e-13, "J_{nu}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn series_and_bessel_agree_at_crossover() {
        for n in [2usize, 4, 6, 7, 10] {
            for &x in &[8.0, 9.0, 11.0] {
                let s = lambda_series(n as f64 / 2.0, x);
                let nu = n as f64 / 2.0 - 1.0;
                let j = bessel_j(nu, x).unwrap();
                let b = gamma(n as f64 / 2.0) * (2.0 / x).powf(nu) * j;
                assert!((s - b).abs() < 1e-11, "N={n} x={x}: {s} vs {b}");
            }
        }
    }

    #[test]
    fn one_minus_lambda_small_arguments() {
        let x = 1e-5;
        let v = one_minus_lambda(4, x).unwrap();
        assert!(close(v, x * x / 8.0, 1e-9));
        let v1 = one_minus_lambda(1, x).unwrap();
        assert!(close(v1, x * x / 2.0, 1e-9));
    }

    #[test]
    fn psi_branches_join() {
        let a = psi(-3.0 + 1e-12);
        let b = psi(-3.0 - 1e-12);
        assert!((a - b).abs() < 1e-6 * a);
        // psi(t) - psi(-t) = t
        for &t in &[0.0, 0.7, 3.0, 9.0] {
            assert!((psi(t) - psi(-t) - t).abs() < 1e-14 * t.max(1.0));
        }
        // mpmath reference values
        assert!((psi(-10.0) / 7.474_560_254_589_328e-25 - 1.0).abs() < 1e-12);
        assert!((psi(-8.0) / 7.550_262_411_946_499e-17 - 1.0).abs() < 1e-12);
        assert!(psi(-30.0) > 0.0);
    }

    #[test]
    fn log_norm_cdf_tail() {
        let x: f64 = -40.0;
        let asym = -0.5 * x * x - (-x).ln() - LN_SQRT_2PI + (1.0 - 1.0 / (x * x) + 3.0 / x.powi(4)).ln();
        assert!((log_norm_cdf(x) - asym).abs() < 1e-8);
        assert!((log_norm_cdf(-4.999) - norm_cdf(-4.999).ln()).abs() < 1e-12);
        assert!((log_norm_cdf(-5.001) - norm_cdf(-5.001).ln()).abs() < 1e-10);
    }

    #[test]
    fn cin_branches_join_and_match_reference() {
        // mpmath: ci(5) = -0.19002974965664387
        let ci5 = cosine_integral(5.0).unwrap();
        assert!((ci5 + 0.190_029_749_656_643_87).abs() < 1e-14);
        let lo = cin(4.0);
        let hi = EULER_GAMMA + 4.0f64.ln() - ci_continued_fraction(4.0);
        assert!((lo - hi).abs() < 1e-13);
    }
}
