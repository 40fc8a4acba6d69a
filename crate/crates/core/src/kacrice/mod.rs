//! Expected numbers of critical points, E Crt_{N,k}(E, T), by the three
//! Kac–Rice representations (shell/GOI, ER/GOE, shell/GOE) and the N = 2
//! closed form.
//!
//! Every evaluator computes all indices at once: the integrands are vectors
//! with one component per index k = 0..=N and a last component for the total.

pub mod exact;
pub mod mc;
mod valueset;

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::assumptions::{check_assumption3, check_nondeg, check_smoothness, RadialParams, Status};
use crate::error::{Error, Result};
use crate::quad::{breakpoints, integrate, integrate_par, QuadOptions};
use crate::special::{gamma_fn, ln_gamma_fn, norm_cdf, norm_pdf};
use crate::structure_fn::{Descriptor, StructureFunction};

use exact::{er_integral, shell_node, Rep, Tolerances};
use mc::{er_mc, shell_node_mc, Batch, TruncNormal, MAX_DISCARD_FRACTION};
pub use valueset::ValueSet;

/// Standardized values t = u/σ_Y are integrated over |t| ≤ T_MAX.
pub const T_MAX: f64 = 9.0;
const T_BREAKS: [f64; 5] = [-4.0, -2.0, 0.0, 2.0, 4.0];
/// Number of independent groups behind every Monte Carlo standard error.
pub const MC_GROUPS: usize = 16;
/// Radii probed for the preconditions of the shell methods.
pub const PROBE_POINTS: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ShellGoi,
    Er,
    ShellGoe,
    ClosedFormN2,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "shell-goi" | "goi" => Ok(Method::ShellGoi),
            "er" => Ok(Method::Er),
            "shell-goe" | "goe" => Ok(Method::ShellGoe),
            "closed-form-n2" | "closed-form" => Ok(Method::ClosedFormN2),
            _ => Err(Error::InvalidRequest(format!("unknown method '{s}'"))),
        }
    }
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ShellGoi => "shell-goi",
            Method::Er => "er",
            Method::ShellGoe => "shell-goe",
            Method::ClosedFormN2 => "closed-form-n2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    /// R1 < ‖x‖ < R2
    Shell { r1: f64, r2: f64 },
    /// Any Borel set of the given Lebesgue measure (ER and closed form only).
    Volume { volume: f64 },
}

impl Domain {
    /// Lebesgue measure in ℝᴺ.
    pub fn volume(&self, n: usize) -> f64 {
        match *self {
            Domain::Shell { r1, r2 } => shell_volume(n, r1, r2),
            Domain::Volume { volume } => volume,
        }
    }
}

/// π^{N/2}/Γ(N/2 + 1)·(R2ᴺ − R1ᴺ).
pub fn shell_volume(n: usize, r1: f64, r2: f64) -> f64 {
    let nf = n as f64;
    (0.5 * nf * std::f64::consts::PI.ln() - ln_gamma_fn(0.5 * nf + 1.0)).exp() * (r2.powi(n as i32) - r1.powi(n as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerMode {
    /// deterministic quadrature when N ≤ 3, Monte Carlo otherwise
    #[default]
    Auto,
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    pub mc_samples: usize,
    pub mc_max_samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub inner: InnerMode,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            mc_samples: 20_000,
            mc_max_samples: 320_000,
            tol: 1e-3,
            seed: 0,
            inner: InnerMode::Auto,
        }
    }
}

/// A catalog name or an inline descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Name(String),
    Descriptor(Descriptor),
}

impl FieldSpec {
    pub fn resolve(&self) -> Result<StructureFunction> {
        match self {
            FieldSpec::Name(s) => StructureFunction::parse_spec(s),
            FieldSpec::Descriptor(d) => StructureFunction::from_descriptor(d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRequest {
    pub field: FieldSpec,
    #[serde(rename = "N")]
    pub n: usize,
    pub domain: Domain,
    #[serde(rename = "E", default = "ValueSet::real")]
    pub e: ValueSet,
    /// None for the total count
    #[serde(default)]
    pub index: Option<usize>,
    pub method: Method,
    #[serde(default)]
    pub budget: Budget,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// Monte Carlo standard error (0 for deterministic paths)
    pub std_error: f64,
    /// quadrature error estimate
    pub quad_error: f64,
}

impl Estimate {
    fn exact(value: f64, quad_error: f64) -> Self {
        Estimate { value: value.max(0.0), std_error: 0.0, quad_error }
    }

    /// Combined uncertainty used in comparisons.
    pub fn sigma(&self) -> f64 {
        self.std_error.hypot(self.quad_error)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// |u/σ_Y| ≤ t_max
    pub t_max: f64,
    /// normal mass outside |t| ≤ t_max
    pub t_neglected_mass: f64,
    /// |Z| ≤ z_max in the deterministic inner expectation
    pub z_max: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            t_max: T_MAX,
            t_neglected_mass: 2.0 * norm_cdf(-T_MAX),
            z_max: exact::ZMAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// error estimate of the outermost (radial or y) quadrature
    pub quad_error: f64,
    /// pessimistic bound from the inner quadrature error estimates (total count)
    #[serde(default)]
    pub inner_error_bound: f64,
    pub mc_samples: usize,
    pub pathological: u64,
    pub evaluations: usize,
    pub converged: bool,
    /// "exact", "monte-carlo" or "closed-form"
    pub inner: String,
    pub truncation: Truncation,
    pub volume: f64,
}

/// All indices of one request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub method: Method,
    pub by_index: Vec<Estimate>,
    pub total: Estimate,
    pub diagnostics: Diagnostics,
}

impl Counts {
    pub fn get(&self, index: Option<usize>) -> Result<Estimate> {
        match index {
            None => Ok(self.total),
            Some(k) => self
                .by_index
                .get(k)
                .copied()
                .ok_or_else(|| Error::InvalidRequest(format!("index {k} exceeds N = {}", self.by_index.len() - 1))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub estimate: f64,
    pub std_error: f64,
    pub method: Method,
    pub index: Option<usize>,
    pub diagnostics: Diagnostics,
}

/// Prefactor 2(−2D″(0))^{N/2}/(D′(0)^{N/2} Γ(N/2)) of the shell representations.
pub fn shell_prefactor(n: usize, d1_0: f64, d2_0: f64) -> f64 {
    let h = 0.5 * n as f64;
    2.0 * (-2.0 * d2_0 / d1_0).powf(h) / gamma_fn(h)
}

/// (−2D″(0))^{N/2}/(π^{(N+1)/2} D′(0)^{N/2}), per unit volume.
pub fn er_prefactor(n: usize, d1_0: f64, d2_0: f64) -> f64 {
    let h = 0.5 * n as f64;
    (-2.0 * d2_0 / d1_0).powf(h) / std::f64::consts::PI.powf(h + 0.5)
}

fn require_smooth(f: &StructureFunction) -> Result<(f64, f64)> {
    let rep = check_smoothness(f);
    if rep.status != Status::Holds {
        return Err(Error::Domain(format!("{} is not four times differentiable at 0 with D''''(0) != 0", f.name)));
    }
    f.origin()
}

/// (Crt₂,₀, Crt₂,₁, Crt₂,₂) per unit area: −D″(0)/(√3πD′(0))·(1, 2, 1).
pub fn closed_form_n2(f: &StructureFunction) -> Result<[f64; 3]> {
    let (d1, d2) = require_smooth(f)?;
    let a = -d2 / (3f64.sqrt() * std::f64::consts::PI * d1);
    Ok([a, 2.0 * a, a])
}

/// η′ = m₁ + 2√(−D″(0)) y − √(−D″(0)) Σ Zₗ²/(λₗ + m₃).
pub fn eta_prime(m1: f64, y: f64, m3: f64, lambdas: &[f64], z: &[f64], d2pp0: f64) -> Result<f64> {
    if lambdas.len() != z.len() {
        return Err(Error::InvalidRequest("eigenvalue and Z vectors differ in length".into()));
    }
    let s = (-d2pp0).sqrt();
    let mut acc = 0.0;
    for (l, zl) in lambdas.iter().zip(z) {
        let d = l + m3;
        if d.abs() < mc::SINGULAR_EPS {
            return Err(Error::Numeric(format!("|lambda + m3| = {:e} is below the singularity threshold", d.abs())));
        }
        acc += zl * zl / d;
    }
    Ok(m1 + 2.0 * s * y - s * acc)
}

fn use_exact(n_inner: usize, inner: InnerMode) -> Result<bool> {
    match inner {
        InnerMode::Auto => Ok(n_inner <= 2),
        InnerMode::MonteCarlo => Ok(false),
        InnerMode::Exact if n_inner <= 2 => Ok(true),
        InnerMode::Exact => Err(Error::InvalidRequest(format!(
            "deterministic inner expectations need at most 2 inner eigenvalues, got {n_inner}"
        ))),
    }
}

fn validate_budget(b: &Budget) -> Result<()> {
    if !(b.tol > 0.0 && b.tol < 1.0) {
        return Err(Error::InvalidRequest(format!("tolerance must lie in (0, 1), got {}", b.tol)));
    }
    if b.mc_samples < MC_GROUPS {
        return Err(Error::InvalidRequest(format!("mc_samples must be at least {MC_GROUPS}")));
    }
    Ok(())
}

/// E Crt_N(ℝ, T) and its index split by the GOE representation.
pub fn crt_er(f: &StructureFunction, n: usize, volume: f64, budget: &Budget) -> Result<Counts> {
    validate_budget(budget)?;
    if n == 0 {
        return Err(Error::InvalidRequest("N must be at least 1".into()));
    }
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(Error::InvalidRequest(format!("volume must be positive and finite, got {volume}")));
    }
    let (d1, d2) = require_smooth(f)?;
    let pre = er_prefactor(n, d1, d2) * volume;
    let mut diag = Diagnostics {
        quad_error: 0.0,
        inner_error_bound: 0.0,
        mc_samples: 0,
        pathological: 0,
        evaluations: 0,
        converged: true,
        inner: String::new(),
        truncation: Truncation::default(),
        volume,
    };
    if use_exact(n.saturating_sub(1), budget.inner)? && n <= 3 {
        let r = er_integral(n, &QuadOptions { abs_tol: 1e-300, ..QuadOptions::rel(budget.tol / 10.0) });
        diag.inner = "exact".into();
        diag.evaluations = r.evaluations;
        diag.converged = r.converged;
        diag.quad_error = pre * r.error[n + 1];
        let by_index = (0..=n).map(|k| Estimate::exact(pre * r.value[k], pre * r.error[k])).collect();
        let total = Estimate::exact(pre * r.value[n + 1], pre * r.error[n + 1]);
        return Ok(Counts { method: Method::Er, by_index, total, diagnostics: diag });
    }
    diag.inner = "monte-carlo".into();
    let mut samples = budget.mc_samples;
    loop {
        let batch = Batch::new(budget.seed, n, MC_GROUPS, samples / MC_GROUPS);
        let g = er_mc(&batch);
        let (by_index, total) = group_summary(&g, n, pre, &[]);
        diag.mc_samples = batch.len();
        if total.std_error <= budget.tol * total.value / 3.0 || samples * 2 > budget.mc_max_samples {
            diag.converged = total.std_error <= budget.tol * total.value / 3.0;
            return Ok(Counts { method: Method::Er, by_index, total, diagnostics: diag });
        }
        samples *= 2;
    }
}

pub fn crt_total_er(f: &StructureFunction, n: usize, volume: f64, budget: &Budget) -> Result<CountResult> {
    crt_er(f, n, volume, budget).map(|c| to_result(&c, None))
}

pub fn crt_index_er(f: &StructureFunction, n: usize, k: usize, volume: f64, budget: &Budget) -> Result<CountResult> {
    if k > n {
        return Err(Error::InvalidRequest(format!("index {k} exceeds N = {n}")));
    }
    crt_er(f, n, volume, budget).map(|c| to_result(&c, Some(k)))
}

fn to_result(c: &Counts, index: Option<usize>) -> CountResult {
    let e = c.get(index).expect("index validated");
    CountResult {
        estimate: e.value,
        std_error: e.std_error,
        method: c.method,
        index,
        diagnostics: Diagnostics { quad_error: e.quad_error, ..c.diagnostics.clone() },
    }
}

/// Means and standard errors over the MC groups, laid out group-major with
/// stride N + 2. `quad_err` (per component, group-major) is averaged in.
fn group_summary(g: &[f64], n: usize, scale: f64, quad_err: &[f64]) -> (Vec<Estimate>, Estimate) {
    let stride = n + 2;
    let groups = g.len() / stride;
    let est = |k: usize| {
        let vals: Vec<f64> = (0..groups).map(|i| scale * g[i * stride + k]).collect();
        let mean = vals.iter().sum::<f64>() / groups as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (groups - 1) as f64;
        let qe = if quad_err.is_empty() {
            0.0
        } else {
            scale * (0..groups).map(|i| quad_err[i * stride + k]).sum::<f64>() / groups as f64
        };
        Estimate { value: mean.max(0.0), std_error: (var / groups as f64).sqrt(), quad_error: qe }
    };
    ((0..=n).map(est).collect(), est(n + 1))
}

/// Intervals of t = u/σ_Y, clipped to [−T_MAX, T_MAX].
fn t_intervals(e: &ValueSet, sigma_y: f64) -> Vec<(f64, f64)> {
    e.intervals()
        .iter()
        .filter_map(|&(a, b)| {
            let (lo, hi) = ((a / sigma_y).max(-T_MAX), (b / sigma_y).min(T_MAX));
            (hi > lo).then_some((lo, hi))
        })
        .collect()
}

/// Radii r = ρ² at which the preconditions of the shell methods are probed.
pub fn probe_grid(r1: f64, r2: f64) -> Vec<f64> {
    let hi = r2 * r2;
    let lo = (r1 * r1).max(hi * 1e-3);
    (0..PROBE_POINTS).map(|i| lo + (hi - lo) * i as f64 / (PROBE_POINTS - 1) as f64).collect()
}

fn check_shell_preconditions(f: &StructureFunction, n: usize, r1: f64, r2: f64, rep: Rep) -> Result<()> {
    let grid = probe_grid(r1, r2);
    let fail = |r: &crate::assumptions::ConditionReport| r.witnesses.iter().find(|w| w.margin <= 0.0).map(|w| (w.r, w.lhs));
    match rep {
        Rep::Goi => {
            let rep = check_nondeg(f, n, &grid);
            if rep.status == Status::Fails {
                let (r, v) = fail(&rep).unwrap_or((f64::NAN, rep.margin));
                return Err(Error::Nondegenerate { r, value: v });
            }
            let inner = (n - 1) as f64;
            for &r in &grid {
                let p = RadialParams::new(f, r.sqrt())?;
                if !(p.corner_variance() > 0.0) || (inner > 0.0 && !(p.c > -1.0 / inner)) {
                    return Err(Error::Nondegenerate { r, value: p.c });
                }
            }
        }
        Rep::Goe => {
            let rep = check_assumption3(f, &grid);
            if rep.status != Status::Holds {
                let r = fail(&rep).map(|w| w.0).unwrap_or(f64::NAN);
                let which = rep
                    .witnesses
                    .iter()
                    .find(|w| w.margin <= 0.0)
                    .map(|w| w.label.clone())
                    .unwrap_or_else(|| format!("status {:?}", rep.status));
                return Err(Error::Assumption3 { r, which });
            }
            for &r in &grid {
                let p = RadialParams::new(f, r.sqrt())?;
                if !(p.b2 > 0.0) || !(-2.0 * p.d2_0 - p.beta * p.beta > 0.0) {
                    return Err(Error::Assumption3 { r, which: "b^2 > 0".into() });
                }
            }
        }
    }
    Ok(())
}

/// Shell representations (GOI for `Rep::Goi`, GOE for `Rep::Goe`).
pub fn crt_shell(
    f: &StructureFunction,
    n: usize,
    e: &ValueSet,
    r1: f64,
    r2: f64,
    rep: Rep,
    budget: &Budget,
) -> Result<Counts> {
    validate_budget(budget)?;
    let method = if rep == Rep::Goi { Method::ShellGoi } else { Method::ShellGoe };
    if n == 0 {
        return Err(Error::InvalidRequest("N must be at least 1".into()));
    }
    if !(r1 >= 0.0 && r2 > r1 && r2.is_finite()) {
        return Err(Error::InvalidRequest(format!("shell needs 0 <= R1 < R2 < inf, got ({r1}, {r2})")));
    }
    let (d1_0, d2_0) = require_smooth(f)?;
    check_shell_preconditions(f, n, r1, r2, rep)?;
    let pre = shell_prefactor(n, d1_0, d2_0);
    let mut diag = Diagnostics {
        quad_error: 0.0,
        inner_error_bound: 0.0,
        mc_samples: 0,
        pathological: 0,
        evaluations: 0,
        converged: true,
        inner: String::new(),
        truncation: Truncation::default(),
        volume: shell_volume(n, r1, r2),
    };
    let zero = || Counts {
        method,
        by_index: vec![Estimate::exact(0.0, 0.0); n + 1],
        total: Estimate::exact(0.0, 0.0),
        diagnostics: diag.clone(),
    };
    if e.is_empty() {
        return Ok(zero());
    }
    let tol = Tolerances::from_rel(budget.tol);
    let node_error: Mutex<Option<Error>> = Mutex::new(None);
    let evals = AtomicUsize::new(0);
    let dim = n + 2;
    let pow = (n - 1) as i32;

    if use_exact(n - 1, budget.inner)? {
        let r = integrate_par(
            |rho, out| {
                let p = match RadialParams::new(f, rho) {
                    Ok(p) => p,
                    Err(err) => {
                        node_error.lock().unwrap().get_or_insert(err);
                        return;
                    }
                };
                let s = (-p.d2_0).sqrt();
                let w_rho = rho.powi(pow) / (2.0 * s);
                for (lo, hi) in t_intervals(e, p.sigma_y) {
                    // components dim.. carry the inner error estimates along
                    let ru = integrate(
                        |t, o| {
                            let node = shell_node(rep, &p, p.sigma_y * t, n, &tol);
                            evals.fetch_add(node.evaluations, Ordering::Relaxed);
                            let w = norm_pdf(t);
                            for (oi, v) in o.iter_mut().zip(node.value.iter().chain(&node.error)) {
                                *oi = w * v;
                            }
                        },
                        2 * dim,
                        &breakpoints(lo, hi, &T_BREAKS),
                        &tol.u,
                    );
                    for k in 0..dim {
                        out[k] += w_rho * ru.value[k];
                        out[dim + k] += w_rho * (ru.value[dim + k] + ru.error[k]);
                    }
                }
            },
            2 * dim,
            &[r1, r2],
            &tol.rho,
        );
        if let Some(err) = node_error.into_inner().unwrap() {
            return Err(err);
        }
        diag.inner = "exact".into();
        diag.evaluations = evals.into_inner();
        diag.converged = r.converged;
        diag.quad_error = pre * r.error[n + 1];
        diag.inner_error_bound = pre * (r.value[dim + n + 1] + r.error[dim + n + 1]);
        let by_index = (0..=n).map(|k| Estimate::exact(pre * r.value[k], pre * r.error[k])).collect();
        let total = Estimate::exact(pre * r.value[n + 1], pre * r.error[n + 1]);
        return Ok(Counts { method, by_index, total, diagnostics: diag });
    }

    diag.inner = "monte-carlo".into();
    let mut samples = budget.mc_samples;
    loop {
        let batch = Batch::new(budget.seed, n - 1, MC_GROUPS, samples / MC_GROUPS);
        let discards = AtomicU64::new(0);
        let nodes = AtomicUsize::new(0);
        let r = integrate_par(
            |rho, out| {
                let p = match RadialParams::new(f, rho) {
                    Ok(p) => p,
                    Err(err) => {
                        node_error.lock().unwrap().get_or_insert(err);
                        return;
                    }
                };
                nodes.fetch_add(1, Ordering::Relaxed);
                let tn = TruncNormal::new(&t_intervals(e, p.sigma_y));
                shell_node_mc(rep, &p, &tn, n, &batch, &discards, out);
                let w = rho.powi(pow);
                out.iter_mut().for_each(|v| *v *= w);
            },
            MC_GROUPS * dim,
            &[r1, r2],
            &QuadOptions { max_intervals: 60, ..tol.rho },
        );
        if let Some(err) = node_error.lock().unwrap().take() {
            return Err(err);
        }
        let bad = discards.into_inner();
        let seen = (batch.len() * nodes.into_inner()) as f64;
        if bad as f64 > MAX_DISCARD_FRACTION * seen {
            return Err(Error::Numeric(format!("{bad} of {seen} inner samples were numerically singular")));
        }
        let (by_index, total) = group_summary(&r.value, n, pre, &r.error);
        diag.mc_samples = batch.len();
        diag.pathological = bad;
        diag.evaluations = r.evaluations * batch.len();
        diag.quad_error = total.quad_error;
        let done = total.std_error <= budget.tol * total.value / 3.0;
        if done || samples * 2 > budget.mc_max_samples {
            diag.converged = done && r.converged;
            return Ok(Counts { method, by_index, total, diagnostics: diag });
        }
        samples *= 2;
    }
}

pub fn crt_shell_goi(
    f: &StructureFunction,
    n: usize,
    e: &ValueSet,
    r1: f64,
    r2: f64,
    k: Option<usize>,
    budget: &Budget,
) -> Result<CountResult> {
    check_index(k, n)?;
    crt_shell(f, n, e, r1, r2, Rep::Goi, budget).map(|c| to_result(&c, k))
}

pub fn crt_shell_goe(
    f: &StructureFunction,
    n: usize,
    e: &ValueSet,
    r1: f64,
    r2: f64,
    k: Option<usize>,
    budget: &Budget,
) -> Result<CountResult> {
    check_index(k, n)?;
    crt_shell(f, n, e, r1, r2, Rep::Goe, budget).map(|c| to_result(&c, k))
}

fn check_index(k: Option<usize>, n: usize) -> Result<()> {
    match k {
        Some(k) if k > n => Err(Error::InvalidRequest(format!("index {k} exceeds N = {n}"))),
        _ => Ok(()),
    }
}

/// Evaluates a request for every index at once.
pub fn count_all(req: &CountRequest) -> Result<Counts> {
    check_index(req.index, req.n)?;
    let f = req.field.resolve()?;
    let n = req.n;
    match (req.method, req.domain) {
        (Method::ShellGoi, Domain::Shell { r1, r2 }) => crt_shell(&f, n, &req.e, r1, r2, Rep::Goi, &req.budget),
        (Method::ShellGoe, Domain::Shell { r1, r2 }) => crt_shell(&f, n, &req.e, r1, r2, Rep::Goe, &req.budget),
        (Method::ShellGoi | Method::ShellGoe, Domain::Volume { .. }) => Err(Error::InvalidRequest(
            "shell representations need a shell domain {kind: shell, r1, r2}".into(),
        )),
        (Method::Er, d) => {
            if !req.e.is_real() {
                return Err(Error::InvalidRequest("the ER representation requires E = R".into()));
            }
            crt_er(&f, n, d.volume(n), &req.budget)
        }
        (Method::ClosedFormN2, d) => {
            if n != 2 || !req.e.is_real() {
                return Err(Error::InvalidRequest("the closed form needs N = 2 and E = R".into()));
            }
            let vol = d.volume(2);
            if !(vol > 0.0) || !vol.is_finite() {
                return Err(Error::InvalidRequest(format!("volume must be positive and finite, got {vol}")));
            }
            let v = closed_form_n2(&f)?;
            Ok(Counts {
                method: Method::ClosedFormN2,
                by_index: v.iter().map(|x| Estimate::exact(vol * x, 0.0)).collect(),
                total: Estimate::exact(vol * v.iter().sum::<f64>(), 0.0),
                diagnostics: Diagnostics {
                    quad_error: 0.0,
                    inner_error_bound: 0.0,
                    mc_samples: 0,
                    pathological: 0,
                    evaluations: 0,
                    converged: true,
                    inner: "closed-form".into(),
                    truncation: Truncation::default(),
                    volume: vol,
                },
            })
        }
    }
}

pub fn count(req: &CountRequest) -> Result<CountResult> {
    count_all(req).map(|c| to_result(&c, req.index))
}
