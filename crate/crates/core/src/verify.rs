//! The acceptance suite: nine end-to-end checks, each a list of numeric
//! comparisons against an independently computed reference.

use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::assumptions::{
    check_assumption3, check_bernstein_proof, covariance_full, default_grid, nondeg_scalar, nondeg_scale, sgoi_nondeg, Jet,
    RadialParams, Status,
};
use crate::error::Result;
use crate::kacrice::{
    count, count_all, shell_volume, Budget, CountRequest, Counts, Domain, Estimate, FieldSpec, Method, ValueSet,
};
use crate::oracle::{mc_crt, SimOptions, DEFAULT_H_PER_CORRELATION};
use crate::quad::{integrate, integrate_scalar, QuadOptions};
use crate::rmt::{
    conditional_corner_check, eigvals_sorted, goi_eig_logdensity, sample_goi, theta_matrix, SgoiDecomposition,
    SgoiSampler,
};
use crate::rng::{Purpose, RngStream};
use crate::special::norm_cdf;
use crate::stats::{ks_test, pearson, Welford};
use crate::structure_fn::{catalog, lookup};

/// Relative tolerance of the closed-form reproduction.
pub const C1_REL_TOL: f64 = 1e-3;
/// Relative floor of the method-triangle comparison.
pub const C2_REL_FLOOR: f64 = 0.01;
/// Width, in combined standard errors, of every statistical agreement band.
pub const N_SIGMA: f64 = 3.0;
/// Width of the moment bands of the sampler checks.
pub const MOMENT_SIGMA: f64 = 5.0;
/// Significance level of the goodness-of-fit tests.
pub const ALPHA: f64 = 1e-3;
/// Realizations and lattice spacing (in correlation lengths) of the field oracle.
pub const C4_REPS: usize = 400;
pub const C4_H: f64 = DEFAULT_H_PER_CORRELATION;
pub const C5_SAMPLES: usize = 100_000;
pub const C5_BINS: usize = 20;
pub const C6_SAMPLES: usize = 100_000;
pub const C6_GRID: usize = 1000;
pub const C7_SAMPLES: usize = 1_000_000;
pub const C7_WINDOW: f64 = 0.05;
pub const C9_DRAWS: usize = 100;
/// Relative band inside which a sign is not decided.
pub const SIGN_BAND: f64 = 1e-12;
/// Radii of the random nondegeneracy draws: log-uniform on [lo, hi].
pub const C9_R_RANGE: (f64, f64) = (1e-2, 1e2);

pub const TITLES: [&str; 9] = [
    "N=2 closed form from the ER path",
    "method triangle on the shell",
    "index partition",
    "field-simulation oracle",
    "GOI eigenvalue density",
    "SGOI covariance and nondegeneracy",
    "conditional corner law",
    "Bernstein-class property suite",
    "nondegeneracy equivalence",
];

/// Runtime limits in seconds.
pub const BUDGETS: [f64; 9] = [10.0, 300.0, 600.0, 900.0, 120.0, 120.0, 180.0, 60.0, 60.0];

#[derive(Debug, Clone, Serialize)]
pub struct SubCheck {
    pub label: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SubCheck {
    /// |value − reference| ≤ tolerance
    fn near(label: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        SubCheck { label: label.into(), value, reference, tolerance, passed: (value - reference).abs() <= tolerance }
    }

    /// value ≥ reference (p-values, margins)
    fn at_least(label: impl Into<String>, value: f64, reference: f64) -> Self {
        SubCheck { label: label.into(), value, reference, tolerance: 0.0, passed: value >= reference }
    }

    fn flag(label: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        SubCheck { label: label.into(), value: v, reference: 1.0, tolerance: 0.0, passed: ok }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub error: Option<String>,
    pub elapsed_secs: f64,
    pub budget_secs: f64,
    pub checks: Vec<SubCheck>,
}

impl Outcome {
    /// One line for the pass/fail table.
    pub fn line(&self) -> String {
        let ok = self.checks.iter().filter(|c| c.passed).count();
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "criterion {} [{tag}] {}: {ok}/{} checks, {:.1} s of {:.0} s",
            self.id,
            self.title,
            self.checks.len(),
            self.elapsed_secs,
            self.budget_secs
        );
        if let Some(e) = &self.error {
            s.push_str(&format!(", error: {e}"));
        }
        if let Some(c) = self.checks.iter().find(|c| !c.passed) {
            s.push_str(&format!(
                ", first failure: {} = {:.6e} vs {:.6e} (tol {:.3e})",
                c.label, c.value, c.reference, c.tolerance
            ));
        }
        s
    }
}

/// Runs criterion `id` (1..=9).
pub fn run(id: usize, seed: u64) -> Outcome {
    assert!((1..=9).contains(&id), "criteria are numbered 1 to 9");
    let t = Instant::now();
    let res = match id {
        1 => closed_form(seed),
        2 => triangle(seed),
        3 => partition(seed),
        4 => oracle(seed),
        5 => goi_density(seed),
        6 => sgoi_covariance(seed),
        7 => corner_law(seed),
        8 => bernstein_suite(),
        _ => nondeg_equivalence(seed),
    };
    let elapsed_secs = t.elapsed().as_secs_f64();
    let budget_secs = BUDGETS[id - 1];
    let (checks, error) = match res {
        Ok(c) => (c, None),
        Err(e) => (vec![], Some(e.to_string())),
    };
    let passed = error.is_none() && !checks.is_empty() && checks.iter().all(|c| c.passed) && elapsed_secs <= budget_secs;
    Outcome { id, title: TITLES[id - 1], passed, error, elapsed_secs, budget_secs, checks }
}

pub fn run_all(ids: &[usize], seed: u64) -> Vec<Outcome> {
    ids.iter().map(|&i| run(i, seed)).collect()
}

fn budget(seed: u64) -> Budget {
    Budget { seed, ..Budget::default() }
}

fn request(field: &str, n: usize, domain: Domain, e: ValueSet, index: Option<usize>, method: Method, seed: u64) -> CountRequest {
    CountRequest { field: FieldSpec::Name(field.into()), n, domain, e, index, method, budget: budget(seed) }
}

const SHELL: Domain = Domain::Shell { r1: 0.5, r2: 1.5 };

fn closed_form(seed: u64) -> Result<Vec<SubCheck>> {
    let a = 1.0 / (3f64.sqrt() * std::f64::consts::PI);
    let want = [a, 2.0 * a, a];
    let mut out = Vec::new();
    for (k, &w) in want.iter().enumerate() {
        let r = count(&request("exp1", 2, Domain::Volume { volume: 1.0 }, ValueSet::real(), Some(k), Method::Er, seed))?;
        out.push(SubCheck::near(format!("er k={k}"), r.estimate, w, C1_REL_TOL * w));
        out.push(SubCheck::flag(format!("er k={k} deterministic"), r.diagnostics.inner == "exact"));
    }
    Ok(out)
}

fn agree(label: String, a: &Estimate, b: &Estimate, floor: f64) -> SubCheck {
    let tol = (N_SIGMA * a.sigma().hypot(b.sigma())).max(floor * a.value.abs().max(b.value.abs()));
    SubCheck::near(label, a.value, b.value, tol)
}

fn triangle(seed: u64) -> Result<Vec<SubCheck>> {
    let goi = count_all(&request("exp1", 2, SHELL, ValueSet::real(), None, Method::ShellGoi, seed))?;
    let goe = count_all(&request("exp1", 2, SHELL, ValueSet::real(), None, Method::ShellGoe, seed))?;
    let vol = shell_volume(2, 0.5, 1.5);
    let er = count_all(&request("exp1", 2, Domain::Volume { volume: vol }, ValueSet::real(), None, Method::Er, seed))?;
    let named = [("goi", &goi), ("goe", &goe), ("er", &er)];
    let mut out = Vec::new();
    for i in 0..3 {
        for j in (i + 1)..3 {
            let (na, a) = named[i];
            let (nb, b) = named[j];
            out.push(agree(format!("{na} vs {nb} total"), &a.total, &b.total, C2_REL_FLOOR));
            for k in 0..=2 {
                out.push(agree(format!("{na} vs {nb} k={k}"), &a.by_index[k], &b.by_index[k], C2_REL_FLOOR));
            }
        }
    }
    Ok(out)
}

fn partition_check(label: String, c: &Counts) -> SubCheck {
    let sum: f64 = c.by_index.iter().map(|e| e.value).sum();
    let var: f64 = c.by_index.iter().map(|e| e.sigma().powi(2)).sum::<f64>() + c.total.sigma().powi(2);
    SubCheck::near(label, sum, c.total.value, N_SIGMA * var.sqrt())
}

fn partition(seed: u64) -> Result<Vec<SubCheck>> {
    let cases = [("exp1", ValueSet::real()), ("exp-mix", ValueSet::at_least(0.0))];
    let mut out = Vec::new();
    for (field, e) in &cases {
        for n in [2, 3] {
            for m in [Method::ShellGoi, Method::ShellGoe] {
                let c = count_all(&request(field, n, SHELL, e.clone(), None, m, seed))?;
                out.push(partition_check(format!("{field} N={n} E={e} {}", m.name()), &c));
            }
        }
    }
    Ok(out)
}

fn oracle(seed: u64) -> Result<Vec<SubCheck>> {
    let f = lookup("exp1")?;
    let (d1, d2) = f.origin()?;
    let corr = (d1 / -d2).sqrt();
    let kr = count_all(&request("exp1", 2, SHELL, ValueSet::real(), None, Method::ShellGoi, seed))?;
    let sim = mc_crt(&f, 2, 0.5, 1.5, &ValueSet::real(), C4_REPS, &SimOptions { h: C4_H * corr, seed, angle: 0.0 })?;
    let mut out = Vec::new();
    let band = |se: f64, e: &Estimate| N_SIGMA * se.hypot(e.sigma());
    out.push(SubCheck::near("total", sim.total_mean, kr.total.value, band(sim.total_se, &kr.total)));
    for k in 0..=2 {
        out.push(SubCheck::near(
            format!("k={k}"),
            sim.mean_by_index[k],
            kr.by_index[k].value,
            band(sim.se_by_index[k], &kr.by_index[k]),
        ));
    }
    Ok(out)
}

/// Expected counts of the ordered 2×2 eigenvalues on a grid in the rotated
/// coordinates s = (λ₁+λ₂)/√2, g = (λ₂−λ₁)/√2 ≥ 0 (unit Jacobian), obtained
/// by integrating the density cell by cell. The last entry is the remainder.
fn goi2_cells(c: f64, s_edges: &[f64], g_edges: &[f64]) -> Result<Vec<f64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let opts = QuadOptions::rel(1e-9);
    let dens = |s: f64, g: f64| goi_eig_logdensity(c, &[h * (s - g), h * (s + g)]).map(f64::exp);
    goi_eig_logdensity(c, &[0.0, 1.0])?;
    let ng = g_edges.len() - 1;
    let mut cells = Vec::new();
    for w in s_edges.windows(2) {
        let r = integrate(
            |s, o| {
                for j in 0..ng {
                    o[j] = integrate_scalar(|g| dens(s, g).unwrap_or(f64::NAN), g_edges[j], g_edges[j + 1], &opts).0;
                }
            },
            ng,
            &[w[0], w[1]],
            &opts,
        );
        cells.extend(r.value);
    }
    let inside: f64 = cells.iter().sum();
    cells.push(1.0 - inside);
    Ok(cells)
}

fn goi_density(seed: u64) -> Result<Vec<SubCheck>> {
    let mut out = Vec::new();
    for (ci, &c) in [0.0f64, 0.5, -0.4].iter().enumerate() {
        // s ~ N(0, 1 + 2c) and g ~ Rayleigh(1) set the grid extent only
        let sd = (1.0 + 2.0 * c).sqrt();
        let s_edges: Vec<f64> = (0..=C5_BINS).map(|i| sd * (-4.0 + 8.0 * i as f64 / C5_BINS as f64)).collect();
        let g_edges: Vec<f64> = (0..=C5_BINS).map(|i| 4.5 * i as f64 / C5_BINS as f64).collect();
        let probs = goi2_cells(c, &s_edges, &g_edges)?;
        out.push(SubCheck::at_least(format!("c={c} grid mass remainder"), *probs.last().unwrap(), 0.0));
        let mut obs = vec![0.0; probs.len()];
        let mut stream = RngStream::for_purpose(seed, Purpose::Verify, 50 + ci as u64);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bin = |edges: &[f64], x: f64| {
            (x >= edges[0] && x < edges[edges.len() - 1]).then(|| edges.partition_point(|&e| e <= x) - 1)
        };
        for _ in 0..C5_SAMPLES {
            let l = eigvals_sorted(sample_goi(2, c, &mut stream)?);
            let (s, g) = (h * (l[0] + l[1]), h * (l[1] - l[0]));
            match (bin(&s_edges, s), bin(&g_edges, g)) {
                (Some(i), Some(j)) => obs[i * C5_BINS + j] += 1.0,
                _ => *obs.last_mut().unwrap() += 1.0,
            }
        }
        let bins: Vec<(f64, f64)> = obs.iter().zip(&probs).map(|(&o, &p)| (o, p * C5_SAMPLES as f64)).collect();
        let (_, _, p) = pearson(&bins, 5.0);
        out.push(SubCheck::at_least(format!("2x2 chi-square p-value c={c}"), p, ALPHA));

        let mut stream = RngStream::for_purpose(seed, Purpose::Verify, 60 + ci as u64);
        let mut xs = Vec::with_capacity(C5_SAMPLES);
        for _ in 0..C5_SAMPLES {
            xs.push(sample_goi(1, c, &mut stream)?[(0, 0)]);
        }
        let sd1 = (1.0 + c).sqrt();
        let (_, p) = ks_test(&mut xs, |x| norm_cdf(x / sd1));
        out.push(SubCheck::at_least(format!("1x1 KS p-value c={c}"), p, ALPHA));
    }
    Ok(out)
}

fn delta(a: usize, b: usize) -> f64 {
    f64::from(u8::from(a == b))
}

/// E[M_ij M_kl] of SGOI(d1, d2, d3), 0-based with the spike at index 0.
pub fn sgoi_moment(i: usize, j: usize, k: usize, l: usize, d: [f64; 3]) -> f64 {
    let one = |a: usize| delta(a, 0);
    0.5 * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k))
        + d[0] * delta(i, j) * delta(k, l)
        + d[1] * (one(i) * one(j) * delta(k, l) + one(k) * one(l) * delta(i, j))
        + d[2] * one(i) * one(j) * one(k) * one(l)
}

fn sgoi_covariance(seed: u64) -> Result<Vec<SubCheck>> {
    let n = 3;
    // the two standard decompositions: ϑ = 0 with ς = (d1² + d1d2)/(1 + d1)
    // (needs d1 ≥ 0), and ϑ = d1 with ς = 0 (needs d1 ≤ 0)
    let cases: [(&str, [f64; 3]); 2] = [("varsigma", [0.4, 0.2, 0.3]), ("vartheta", [-0.2, 0.1, 0.3])];
    let entries: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for (ci, (name, d)) in cases.iter().enumerate() {
        let dec = SgoiDecomposition::default_for(d[0], d[1]);
        let sampler = SgoiSampler::new(n, d[0], d[1], d[2], Some(dec))?;
        out.push(SubCheck::flag(format!("{name}: block construction in use"), sampler.uses_block_construction()));
        let mut acc = vec![Welford::default(); entries.len() * entries.len()];
        let mut stream = RngStream::for_purpose(seed, Purpose::Verify, 70 + ci as u64);
        for _ in 0..C6_SAMPLES {
            let m = sampler.sample(&mut stream);
            for (a, &(i, j)) in entries.iter().enumerate() {
                for (b, &(k, l)) in entries.iter().enumerate().skip(a) {
                    acc[a * entries.len() + b].push(m[(i, j)] * m[(k, l)]);
                }
            }
        }
        for (a, &(i, j)) in entries.iter().enumerate() {
            for (b, &(k, l)) in entries.iter().enumerate().skip(a) {
                let w = &acc[a * entries.len() + b];
                let want = sgoi_moment(i, j, k, l, *d);
                out.push(SubCheck::near(
                    format!("{name}: E[M{}{} M{}{}]", i + 1, j + 1, k + 1, l + 1),
                    w.mean(),
                    want,
                    MOMENT_SIGMA * w.std_error(),
                ));
            }
        }
    }
    // formula vs numeric eigenvalues of Θ
    let mut stream = RngStream::for_purpose(seed, Purpose::Verify, 79);
    let (mut disagree, mut undecided) = (0usize, 0usize);
    for _ in 0..C6_GRID {
        let n = 2 + (stream.uniform() * 5.0) as usize;
        let d1 = -1.5 / (n - 1) as f64 + 2.5 * stream.uniform();
        let d2 = -1.5 + 3.0 * stream.uniform();
        let d3 = -2.0 + 4.0 * stream.uniform();
        let th = theta_matrix(n, d1, d2, d3);
        let ev = SymmetricEigen::new(th.clone()).eigenvalues;
        let min = ev.min();
        let scale = ev.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if min.abs() <= SIGN_BAND * scale {
            undecided += 1;
            continue;
        }
        if sgoi_nondeg(n, d1, d2, d3) != (min > 0.0) {
            disagree += 1;
        }
    }
    out.push(SubCheck::near("Theta sign disagreements", disagree as f64, 0.0, 0.0));
    out.push(SubCheck::at_least("Theta sign decided draws", (C6_GRID - undecided) as f64, (C6_GRID / 2) as f64));
    Ok(out)
}

fn corner_law(seed: u64) -> Result<Vec<SubCheck>> {
    let p1 = RadialParams::new(&lookup("exp1")?, 1.0)?;
    let p2 = RadialParams::new(&lookup("exp-mix")?, 2f64.sqrt())?;
    let sets = [
        ("exp1 r=1", [p1.d1, p1.d2, p1.d3], 0.7),
        ("exp-mix r=2", [p2.d1, p2.d2, p2.d3], -0.5),
        ("manual", [0.3, 0.1, 0.2], 0.0),
    ];
    let mut out = Vec::new();
    for (i, (name, d, y)) in sets.iter().enumerate() {
        let v = 1.0 + d[0] + 2.0 * d[1] + d[2];
        let mut stream = RngStream::for_purpose(seed, Purpose::Verify, 80 + i as u64);
        let rep = conditional_corner_check(3, d[0], d[1], d[2], y * v.sqrt(), C7_SAMPLES, C7_WINDOW, &mut stream)?;
        out.push(SubCheck::near(
            format!("{name}: slope"),
            rep.slope,
            (d[0] + d[1]) / v,
            MOMENT_SIGMA * rep.slope_std_error,
        ));
        for m in &rep.moments {
            out.push(SubCheck::near(format!("{name}: {}", m.name), m.estimate, m.expected, MOMENT_SIGMA * m.std_error));
        }
    }
    Ok(out)
}

fn bernstein_suite() -> Result<Vec<SubCheck>> {
    let grid = default_grid();
    let mut out = Vec::new();
    for f in catalog().iter().filter(|f| f.is_bernstein()) {
        let a3 = check_assumption3(f, &grid);
        out.push(SubCheck::flag(format!("{}: assumption 3 holds", f.name), a3.status == Status::Holds));
        out.push(SubCheck::at_least(format!("{}: assumption 3 margin", f.name), a3.margin, f64::MIN_POSITIVE));
        let (t1, t2) = check_bernstein_proof(f, &grid);
        out.push(SubCheck::flag(format!("{}: first proof inequality", f.name), t1.status == Status::Holds));
        out.push(SubCheck::at_least(format!("{}: first proof inequality margin", f.name), t1.margin, f64::MIN_POSITIVE));
        out.push(SubCheck::flag(format!("{}: second proof inequality", f.name), t2.status == Status::Holds));
    }
    let f2 = lookup("f2")?;
    out.push(SubCheck::flag("f2: assumption 3 fails somewhere", check_assumption3(&f2, &grid).status == Status::Fails));
    let ex2 = lookup("ex2(0.125)")?;
    out.push(SubCheck::flag("ex2(1/8): assumption 3 holds", check_assumption3(&ex2, &grid).status == Status::Holds));
    // f‴ ≈ (ε cos√r + o(1))/(4r²) at large r: probe the troughs √r = (2m+1)π
    let mut min3 = f64::INFINITY;
    let mut at = 0.0;
    for m in 0..4000 {
        let r = ((2 * m + 1) as f64 * std::f64::consts::PI).powi(2);
        let v = ex2.eval(r, 3)? * r * r;
        if v < min3 {
            (min3, at) = (v, r);
        }
    }
    out.push(SubCheck::at_least(format!("ex2(1/8): -r^2 D'''(r) at r = {at:.4e}"), -min3, f64::MIN_POSITIVE));
    Ok(out)
}

/// Smallest eigenvalue of the correlation matrix of `m`.
fn min_corr_eig(m: &DMatrix<f64>) -> f64 {
    let d: Vec<f64> = m.diagonal().iter().map(|v| v.abs().sqrt().max(1e-300)).collect();
    let c = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] / (d[i] * d[j]));
    SymmetricEigen::new(c).eigenvalues.min()
}

fn nondeg_equivalence(seed: u64) -> Result<Vec<SubCheck>> {
    let fields = catalog();
    let mut stream = RngStream::for_purpose(seed, Purpose::Verify, 90);
    let (lo, hi) = (C9_R_RANGE.0.ln(), C9_R_RANGE.1.ln());
    let (mut dis_cov, mut dis_sgoi, mut undecided) = (0usize, 0usize, 0usize);
    for _ in 0..C9_DRAWS {
        let f = &fields[(stream.uniform() * fields.len() as f64) as usize % fields.len()];
        let n = 1 + (stream.uniform() * 4.0) as usize % 4;
        let r = (lo + (hi - lo) * stream.uniform()).exp();
        let mut x: Vec<f64> = (0..n).map(|_| stream.normal()).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v *= r.sqrt() / norm);
        let j = Jet::new(f, r)?;
        let nd = nondeg_scalar(f, n, r)?;
        let min_eig = min_corr_eig(&covariance_full(f, &x)?);
        if nd.abs() <= SIGN_BAND * nondeg_scale(&j, n) || min_eig.abs() <= SIGN_BAND {
            undecided += 1;
            continue;
        }
        if (nd > 0.0) != (min_eig > 0.0) {
            dis_cov += 1;
        }
        let sgoi = match RadialParams::new(f, r.sqrt()) {
            Ok(p) => sgoi_nondeg(n, p.d1, p.d2, p.d3),
            Err(_) => false,
        };
        if sgoi != (nd > 0.0) {
            dis_sgoi += 1;
        }
    }
    Ok(vec![
        SubCheck::near("nondeg sign vs covariance definiteness disagreements", dis_cov as f64, 0.0, 0.0),
        SubCheck::near("nondeg sign vs SGOI nondegeneracy disagreements", dis_sgoi as f64, 0.0, 0.0),
        SubCheck::at_least("decided draws", (C9_DRAWS - undecided) as f64, (C9_DRAWS / 2) as f64),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgoi_moment_reads_off_theta() {
        let d = [0.4, 0.2, 0.3];
        let th = theta_matrix(3, d[0], d[1], d[2]);
        for i in 0..3 {
            for k in 0..3 {
                assert!((sgoi_moment(i, i, k, k, d) - th[(i, k)]).abs() < 1e-15);
            }
        }
        assert_eq!(sgoi_moment(0, 1, 0, 1, d), 0.5);
        assert_eq!(sgoi_moment(0, 1, 1, 2, d), 0.0);
    }

    #[test]
    fn goi_cells_sum_to_one() {
        let e: Vec<f64> = (0..=8).map(|i| -6.0 + 1.5 * i as f64).collect();
        let g: Vec<f64> = (0..=8).map(|i| 0.75 * i as f64).collect();
        let p = goi2_cells(0.5, &e, &g).unwrap();
        // s ~ N(0, 2) and g ~ Rayleigh(1) independently at c = 1/2
        let inside = (1.0 - 2.0 * norm_cdf(-6.0 / 2f64.sqrt())) * (1.0 - (-18.0f64).exp());
        assert!((p.last().unwrap() - (1.0 - inside)).abs() < 1e-9, "{}", p.last().unwrap());
        let cell = (norm_cdf(-3.0 / 2f64.sqrt()) - norm_cdf(-4.5 / 2f64.sqrt())) * ((-0.75f64 * 0.75 / 2.0).exp() - (-1.5f64 * 1.5 / 2.0).exp());
        assert!((p[8 + 1] - cell).abs() < 1e-10);
    }

    #[test]
    fn fast_criteria_pass() {
        for id in [1, 8, 9] {
            let o = run(id, 0);
            assert!(o.passed, "{}", o.line());
        }
    }
}
