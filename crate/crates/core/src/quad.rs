//! Adaptive Gauss–Kronrod (21- or 15-point) quadrature for vector-valued
//! integrands, plus a nested driver for integrals over ordered tuples
//! λ₁ ≤ … ≤ λ_n.
//!
//! All components share one subdivision; the adaptivity criterion is on the
//! ℓ¹ norm of the error vector. Node order is fixed, so a parallel evaluator
//! gives bit-identical sums.

use rayon::prelude::*;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_814_256_440,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// weights of the embedded 10-point Gauss rule at XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// 7-point Gauss weights at XGK15[1], XGK15[3], XGK15[5] and the centre
const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rule {
    Gk15,
    #[default]
    Gk21,
}

impl Rule {
    fn points(self) -> usize {
        match self {
            Rule::Gk15 => 15,
            Rule::Gk21 => 21,
        }
    }

    /// (Kronrod abscissae, Kronrod weights); the last entry is the centre.
    fn tables(self) -> (&'static [f64], &'static [f64]) {
        match self {
            Rule::Gk15 => (&XGK15, &WGK15),
            Rule::Gk21 => (&XGK, &WGK),
        }
    }

    /// Gauss weight of Kronrod node i (0 if the node is not a Gauss node).
    fn gauss_weight(self, i: usize) -> f64 {
        match self {
            Rule::Gk15 if i == 7 => WG7[3],
            Rule::Gk15 if i % 2 == 1 => WG7[i / 2],
            Rule::Gk21 if i % 2 == 1 && i < 10 => WG[i / 2],
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    pub rule: Rule,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-8,
            max_intervals: 200,
            rule: Rule::Gk21,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: Vec<f64>,
    pub error: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn error_norm(&self) -> f64 {
        self.error.iter().sum()
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
    norm: f64,
}

/// Nodes of `rule` on [a, b] into `x` (symmetric pairs, then the centre).
fn nodes(rule: Rule, a: f64, b: f64, x: &mut [f64]) {
    let (xgk, _) = rule.tables();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let m = xgk.len() - 1;
    for i in 0..m {
        x[2 * i] = c - h * xgk[i];
        x[2 * i + 1] = c + h * xgk[i];
    }
    x[2 * m] = c;
}

fn rescale(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err.abs();
    if resasc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / resasc).powf(1.5);
        e = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * resabs);
    }
    e
}

/// Apply the rule on [a, b] given its function values (layout: node-major).
fn rule(r: Rule, a: f64, b: f64, fv: &[f64], dim: usize) -> Piece {
    let (_, wgk) = r.tables();
    let m = wgk.len() - 1;
    let h = 0.5 * (b - a);
    let mut value = vec![0.0; dim];
    let mut error = vec![0.0; dim];
    for d in 0..dim {
        let fc = fv[2 * m * dim + d];
        let mut rk = wgk[m] * fc;
        let mut rg = r.gauss_weight(m) * fc;
        let mut rabs = wgk[m] * fc.abs();
        for i in 0..m {
            let f1 = fv[2 * i * dim + d];
            let f2 = fv[(2 * i + 1) * dim + d];
            rk += wgk[i] * (f1 + f2);
            rabs += wgk[i] * (f1.abs() + f2.abs());
            rg += r.gauss_weight(i) * (f1 + f2);
        }
        let mean = 0.5 * rk;
        let mut rasc = wgk[m] * (fc - mean).abs();
        for i in 0..m {
            let f1 = fv[2 * i * dim + d];
            let f2 = fv[(2 * i + 1) * dim + d];
            rasc += wgk[i] * ((f1 - mean).abs() + (f2 - mean).abs());
        }
        value[d] = rk * h;
        error[d] = rescale((rk - rg) * h, rabs * h.abs(), rasc * h.abs());
    }
    let norm = error.iter().sum();
    Piece {
        a,
        b,
        value,
        error,
        norm,
    }
}

/// Core driver. `eval` fills `out[i*dim..(i+1)*dim]` with f(xs[i]).
fn adapt(
    eval: &mut dyn FnMut(&[f64], &mut [f64]),
    dim: usize,
    points: &[f64],
    opts: &QuadOptions,
) -> QuadResult {
    let mut pieces: Vec<Piece> = Vec::new();
    let mut evaluations = 0usize;
    let r = opts.rule;
    let np = r.points();
    let mut buf = vec![0.0; 2 * np * dim];
    let mut xs = vec![0.0; 2 * np];
    let spans: Vec<(f64, f64)> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1]))
        .collect();
    if spans.is_empty() {
        return QuadResult {
            value: vec![0.0; dim],
            error: vec![0.0; dim],
            evaluations: 0,
            converged: true,
        };
    }
    for &(a, b) in &spans {
        nodes(r, a, b, &mut xs[..np]);
        eval(&xs[..np], &mut buf[..np * dim]);
        evaluations += np;
        pieces.push(rule(r, a, b, &buf[..np * dim], dim));
    }
    let mut converged = false;
    loop {
        let mut total = vec![0.0; dim];
        let mut err_norm = 0.0;
        for p in &pieces {
            for d in 0..dim {
                total[d] += p.value[d];
            }
            err_norm += p.norm;
        }
        let scale: f64 = total.iter().map(|v| v.abs()).sum();
        if err_norm <= opts.abs_tol.max(opts.rel_tol * scale) {
            converged = true;
            break;
        }
        if pieces.len() >= opts.max_intervals {
            break;
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.norm > acc.1 { (i, p.norm) } else { acc });
        let worst = pieces.swap_remove(idx);
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-14 * (worst.a.abs() + worst.b.abs()) {
            pieces.push(worst);
            break;
        }
        nodes(r, worst.a, mid, &mut xs[..np]);
        nodes(r, mid, worst.b, &mut xs[np..]);
        eval(&xs, &mut buf);
        evaluations += 2 * np;
        pieces.push(rule(r, worst.a, mid, &buf[..np * dim], dim));
        pieces.push(rule(r, mid, worst.b, &buf[np * dim..], dim));
    }
    // sum in a deterministic order
    pieces.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
    let mut value = vec![0.0; dim];
    let mut error = vec![0.0; dim];
    for p in &pieces {
        for d in 0..dim {
            value[d] += p.value[d];
            error[d] += p.error[d];
        }
    }
    QuadResult {
        value,
        error,
        evaluations,
        converged,
    }
}

/// Integrate a vector-valued `f` over the sorted breakpoints `points`.
pub fn integrate<F>(mut f: F, dim: usize, points: &[f64], opts: &QuadOptions) -> QuadResult
where
    F: FnMut(f64, &mut [f64]),
{
    let mut eval = |xs: &[f64], out: &mut [f64]| {
        for (i, &x) in xs.iter().enumerate() {
            let o = &mut out[i * dim..(i + 1) * dim];
            o.iter_mut().for_each(|v| *v = 0.0);
            f(x, o);
        }
    };
    adapt(&mut eval, dim, points, opts)
}

/// As [`integrate`], evaluating the nodes of each pass in parallel.
pub fn integrate_par<F>(f: F, dim: usize, points: &[f64], opts: &QuadOptions) -> QuadResult
where
    F: Fn(f64, &mut [f64]) + Sync,
{
    let mut eval = |xs: &[f64], out: &mut [f64]| {
        out[..xs.len() * dim]
            .par_chunks_mut(dim)
            .zip(xs.par_iter())
            .for_each(|(o, &x)| {
                o.iter_mut().for_each(|v| *v = 0.0);
                f(x, o);
            });
    };
    adapt(&mut eval, dim, points, opts)
}

/// Scalar convenience wrapper: returns (value, error estimate).
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let r = integrate(|x, o| o[0] = f(x), 1, &[a, b], opts);
    (r.value[0], r.error[0])
}

/// Sorted breakpoints: `lo`, every entry of `extra` strictly inside, `hi`.
pub fn breakpoints(lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
    let mut p = vec![lo];
    let mut inner: Vec<f64> = extra.iter().copied().filter(|&x| x > lo && x < hi).collect();
    inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
    inner.dedup();
    p.extend(inner);
    p.push(hi);
    p
}

/// ∫ over lo ≤ λ₁ ≤ … ≤ λ_n ≤ hi of a vector integrand, by nested adaptive
/// quadrature. Each level splits at `breaks`. `opts[k]` applies at depth k
/// (the last entry is reused for deeper levels).
pub fn integrate_ordered<F>(
    n: usize,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    dim: usize,
    opts: &[QuadOptions],
    mut f: F,
) -> QuadResult
where
    F: FnMut(&[f64], &mut [f64]),
{
    let mut lam = vec![0.0; n];
    if n == 0 {
        let mut out = vec![0.0; dim];
        f(&lam, &mut out);
        return QuadResult {
            value: out,
            error: vec![0.0; dim],
            evaluations: 1,
            converged: true,
        };
    }
    ordered_level(0, n, lo, hi, breaks, dim, opts, &mut lam, &mut f)
}

#[allow(clippy::too_many_arguments)]
fn ordered_level(
    depth: usize,
    n: usize,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    dim: usize,
    opts: &[QuadOptions],
    lam: &mut Vec<f64>,
    f: &mut dyn FnMut(&[f64], &mut [f64]),
) -> QuadResult {
    let lower = if depth == 0 { lo } else { lam[depth - 1] };
    let pts = breakpoints(lower, hi, breaks);
    let o = opts[depth.min(opts.len() - 1)];
    integrate(
        |x, out| {
            lam[depth] = x;
            if depth + 1 == n {
                f(lam, out);
            } else {
                let r = ordered_level(depth + 1, n, lo, hi, breaks, dim, opts, lam, f);
                out.copy_from_slice(&r.value);
            }
        },
        dim,
        &pts,
        &o,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_up_to_degree_31_are_exact() {
        let (v, _) = integrate_scalar(|x| x.powi(31) + 3.0 * x * x, 0.0, 1.0, &QuadOptions::default());
        assert!((v - (1.0 / 32.0 + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn fifteen_point_rule_is_exact_to_degree_22() {
        let o = QuadOptions { rule: Rule::Gk15, ..QuadOptions::rel(1e-12) };
        let (v, _) = integrate_scalar(|x| x.powi(22) + x.powi(3), -1.0, 1.0, &o);
        assert!((v - 2.0 / 23.0).abs() < 1e-14);
        let (v, _) = integrate_scalar(|x| (-x * x).exp(), 0.0, 6.0, &o);
        assert!((v - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let (v, e) = integrate_scalar(|x| 1.0 / x.sqrt(), 0.0, 1.0, &QuadOptions::rel(1e-10));
        assert!((v - 2.0).abs() < 1e-9, "{v} {e}");
    }

    #[test]
    fn vector_components_and_breakpoints() {
        let r = integrate(
            |x, o| {
                o[0] = x.abs();
                o[1] = (-x * x).exp();
            },
            2,
            &breakpoints(-1.0, 2.0, &[0.0]),
            &QuadOptions::rel(1e-12),
        );
        assert!((r.value[0] - 2.5).abs() < 1e-12);
        let want = 0.5 * std::f64::consts::PI.sqrt() * (libm::erf(2.0) + libm::erf(1.0));
        assert!((r.value[1] - want).abs() < 1e-12, "{} {}", r.value[1], want);
        assert!(r.converged);
    }

    #[test]
    fn parallel_matches_serial_bitwise() {
        let f = |x: f64, o: &mut [f64]| {
            o[0] = (3.0 * x).sin() / (1.0 + x * x);
            o[1] = x.cos();
        };
        let a = integrate(f, 2, &[0.0, 10.0], &QuadOptions::rel(1e-12));
        let b = integrate_par(f, 2, &[0.0, 10.0], &QuadOptions::rel(1e-12));
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn ordered_simplex_volume() {
        // volume of {0 ≤ x ≤ y ≤ z ≤ 1} is 1/6; ∫ (y − x) over the 2-simplex is 1/6
        let r3 = integrate_ordered(3, 0.0, 1.0, &[0.5], 1, &[QuadOptions::rel(1e-10)], |_, o| o[0] = 1.0);
        assert!((r3.value[0] - 1.0 / 6.0).abs() < 1e-12);
        let r2 = integrate_ordered(2, 0.0, 1.0, &[], 1, &[QuadOptions::rel(1e-10)], |l, o| o[0] = l[1] - l[0]);
        assert!((r2.value[0] - 1.0 / 6.0).abs() < 1e-12);
    }
}
