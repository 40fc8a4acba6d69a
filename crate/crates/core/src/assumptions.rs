//! Analytic conditions on a structure function: smoothness at 0,
//! nondegeneracy of (H, ∇H, ∇²H), the GOE-representation condition
//! `assumption3` and its consequences, the
//! SGOI nondegeneracy criterion, and the local parameters that feed the
//! Kac–Rice integrands.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::structure_fn::StructureFunction;

/// Relative margins inside this band are neither "holds" nor "fails".
pub const INDETERMINATE_BAND: f64 = 1e-12;

/// Band used for the nondegeneracy sums, which vanish like r³ at the origin
/// while their individual terms are O(r).
pub const ROUNDING_BAND: f64 = 32.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub r: f64,
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Outcome of checking a condition over a set of probe radii.
///
/// `margin` is the minimum over probes of (lhs − rhs)/scale, where the scale
/// is max(|lhs|, |rhs|) unless the condition supplies the magnitude of its
/// terms. Relative margins keep tiny-r and large-r probes comparable.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub name: String,
    pub status: Status,
    pub holds: bool,
    pub margin: f64,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// One probed inequality lhs > rhs (or ≥ when `strict` is false).
#[derive(Debug, Clone)]
pub struct Ineq {
    pub label: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub scale: Option<f64>,
    pub strict: bool,
    /// Relative half-width of the indeterminate band.
    pub band: f64,
}

impl Ineq {
    pub fn strict(label: &'static str, lhs: f64, rhs: f64) -> Self {
        Ineq { label, lhs, rhs, scale: None, strict: true, band: INDETERMINATE_BAND }
    }

    pub fn weak(label: &'static str, lhs: f64, rhs: f64) -> Self {
        Ineq { label, lhs, rhs, scale: None, strict: false, band: INDETERMINATE_BAND }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = Some(scale);
        self
    }

    /// For expressions that cancel down from large terms: the band becomes a
    /// rounding-error bound relative to the sum of absolute terms.
    pub fn with_rounding_band(mut self, scale: f64) -> Self {
        self.scale = Some(scale);
        self.band = ROUNDING_BAND;
        self
    }

    pub fn margin(&self) -> f64 {
        let s = self.scale.unwrap_or_else(|| self.lhs.abs().max(self.rhs.abs()));
        if s == 0.0 || !s.is_finite() {
            return if self.lhs - self.rhs == 0.0 { 0.0 } else { (self.lhs - self.rhs).signum() };
        }
        (self.lhs - self.rhs) / s
    }

    fn status(&self) -> Status {
        let m = self.margin();
        if !m.is_finite() {
            return Status::Fails;
        }
        if self.strict {
            if m >= self.band {
                Status::Holds
            } else if m <= -self.band {
                Status::Fails
            } else {
                Status::Indeterminate
            }
        } else if m > -self.band {
            Status::Holds
        } else {
            Status::Fails
        }
    }
}

/// Builds a report from probes; `Err` probes count as failures.
pub struct ReportBuilder {
    name: String,
    witnesses: Vec<Witness>,
    status: Status,
    margin: f64,
    detail: Option<String>,
}

impl ReportBuilder {
    pub fn new(name: &str) -> Self {
        ReportBuilder {
            name: name.to_string(),
            witnesses: Vec::new(),
            status: Status::Holds,
            margin: f64::INFINITY,
            detail: None,
        }
    }

    pub fn probe(&mut self, r: f64, ineq: &Ineq) {
        let m = ineq.margin();
        let st = ineq.status();
        self.margin = self.margin.min(if m.is_nan() { f64::NEG_INFINITY } else { m });
        self.status = combine(self.status, st);
        self.witnesses.push(Witness {
            r,
            label: ineq.label.to_string(),
            lhs: ineq.lhs,
            rhs: ineq.rhs,
            margin: m,
        });
    }

    pub fn fail(&mut self, r: f64, why: String) {
        self.status = Status::Fails;
        self.margin = f64::NEG_INFINITY;
        if self.detail.is_none() {
            self.detail = Some(format!("r = {r}: {why}"));
        }
    }

    pub fn finish(self) -> ConditionReport {
        ConditionReport {
            name: self.name,
            holds: self.status == Status::Holds,
            status: self.status,
            margin: self.margin,
            witnesses: self.witnesses,
            detail: self.detail,
        }
    }
}

fn combine(a: Status, b: Status) -> Status {
    match (a, b) {
        (Status::Fails, _) | (_, Status::Fails) => Status::Fails,
        (Status::Indeterminate, _) | (_, Status::Indeterminate) => Status::Indeterminate,
        _ => Status::Holds,
    }
}

/// 60 log-spaced radii over [1e-6, 1e6] and 40 uniform radii in (0, 10].
pub fn default_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..60).map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / 59.0)).collect();
    g.extend((1..=40).map(|i| 10.0 * i as f64 / 40.0));
    g.sort_by(|a, b| a.partial_cmp(b).unwrap());
    g.dedup();
    g
}

/// Parse a grid spec: `default`, `log:lo:hi:n`, `lin:lo:hi:n`, or a comma list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let s = spec.trim();
    if s == "default" {
        return Ok(default_grid());
    }
    let bad = || Error::InvalidRequest(format!("cannot parse r-grid '{spec}'"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 4 && (parts[0] == "log" || parts[0] == "lin") {
        let lo: f64 = parts[1].parse().map_err(|_| bad())?;
        let hi: f64 = parts[2].parse().map_err(|_| bad())?;
        let n: usize = parts[3].parse().map_err(|_| bad())?;
        if !(lo > 0.0 && hi >= lo && n >= 1) {
            return Err(bad());
        }
        let step = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        return Ok((0..n)
            .map(|i| {
                if parts[0] == "log" {
                    (lo.ln() + (hi.ln() - lo.ln()) * step(i)).exp()
                } else {
                    lo + (hi - lo) * step(i)
                }
            })
            .collect());
    }
    let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    let v = v.map_err(|_| bad())?;
    if v.is_empty() || v.iter().any(|&r| !(r > 0.0)) {
        return Err(bad());
    }
    Ok(v)
}

/// Smoothness at the origin: 0 < |D⁗(0)| < ∞.
pub fn check_smoothness(f: &StructureFunction) -> ConditionReport {
    let mut b = ReportBuilder::new("smoothness");
    match f.eval(0.0, 4) {
        Ok(v) if v.is_finite() && v != 0.0 => b.probe(0.0, &Ineq::strict("|D''''(0)| > 0", v.abs(), 0.0)),
        Ok(v) => b.fail(0.0, format!("D''''(0) = {v}")),
        Err(e) => b.fail(0.0, e.to_string()),
    }
    b.finish()
}

/// Values of D, D′, D″ at r and D′(0), D″(0).
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub r: f64,
    pub d: f64,
    pub d1: f64,
    pub d2: f64,
    pub d1_0: f64,
    pub d2_0: f64,
}

impl Jet {
    pub fn new(f: &StructureFunction, r: f64) -> Result<Self> {
        let (d1_0, d2_0) = f.origin()?;
        let [d, d1, d2] = f.derivs(r)?;
        Ok(Jet { r, d, d1, d2, d1_0, d2_0 })
    }
}

fn nondeg_terms(j: &Jet, n: usize) -> [f64; 5] {
    let (r, nn) = (j.r, n as f64);
    let inc = j.d1 - j.d1_0;
    [
        j.d,
        -j.d1 * j.d1 * r / j.d1_0,
        (nn + 1.0) * j.d2 * j.d2 * r * r / ((nn + 2.0) * j.d2_0),
        2.0 * r * j.d2 * inc / ((nn + 2.0) * j.d2_0),
        nn * inc * inc / (2.0 * (nn + 2.0) * j.d2_0),
    ]
}

/// Left side of the nondegeneracy condition for (H, ∇H, ∇²H) at ‖x‖² = r.
pub fn nondeg_scalar(f: &StructureFunction, n: usize, r: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("dimension N must be >= 1".into()));
    }
    let j = Jet::new(f, r)?;
    Ok(nondeg_from_jet(&j, n))
}

pub fn nondeg_from_jet(j: &Jet, n: usize) -> f64 {
    nondeg_terms(j, n).iter().sum()
}

/// Sum of absolute values of the nondegeneracy terms (scale for margins).
pub fn nondeg_scale(j: &Jet, n: usize) -> f64 {
    nondeg_terms(j, n).iter().map(|t| t.abs()).sum()
}

/// The dimension-free four-term condition.
pub fn nondeg_dimfree(f: &StructureFunction, r: f64) -> Result<f64> {
    let j = Jet::new(f, r)?;
    Ok(dimfree_from_jet(&j))
}

fn dimfree_terms(j: &Jet) -> [f64; 4] {
    let inc = j.d1 - j.d1_0;
    [
        j.d,
        -j.d1 * j.d1 * j.r / j.d1_0,
        j.d2 * j.d2 * j.r * j.r / j.d2_0,
        inc * inc / (2.0 * j.d2_0),
    ]
}

pub fn dimfree_from_jet(j: &Jet) -> f64 {
    dimfree_terms(j).iter().sum()
}

pub fn check_nondeg(f: &StructureFunction, n: usize, grid: &[f64]) -> ConditionReport {
    let mut b = ReportBuilder::new(&format!("nondegeneracy(N={n})"));
    for &r in grid {
        match Jet::new(f, r) {
            Ok(j) => {
                let v = nondeg_from_jet(&j, n);
                b.probe(r, &Ineq::strict("nondeg > 0", v, 0.0).with_rounding_band(nondeg_scale(&j, n)));
            }
            Err(e) => b.fail(r, e.to_string()),
        }
    }
    b.finish()
}

pub fn check_nondeg_dimfree(f: &StructureFunction, grid: &[f64]) -> ConditionReport {
    let mut b = ReportBuilder::new("nondegeneracy(dimension-free)");
    for &r in grid {
        match Jet::new(f, r) {
            Ok(j) => {
                let t = dimfree_terms(&j);
                let scale: f64 = t.iter().map(|x| x.abs()).sum();
                b.probe(r, &Ineq::strict("dimfree > 0", t.iter().sum(), 0.0).with_rounding_band(scale));
            }
            Err(e) => b.fail(r, e.to_string()),
        }
    }
    b.finish()
}

/// Affine map (u, y) ↦ constant + coef_u·u + coef_y·y.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Affine {
    pub coef_u: f64,
    pub coef_y: f64,
}

impl Affine {
    pub fn at(&self, u: f64, y: f64) -> f64 {
        self.coef_u * u + self.coef_y * y
    }
}

/// The u-independent part of the local parameters at radius ρ.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadialParams {
    pub rho: f64,
    pub r: f64,
    pub d1_0: f64,
    pub d2_0: f64,
    pub sigma_y2: f64,
    pub sigma_y: f64,
    pub alpha: f64,
    pub beta: f64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub c: f64,
    pub b2: f64,
    /// m1 = m1_per_u · u, m2 = m2_per_u · u
    pub m1_per_u: f64,
    pub m2_per_u: f64,
    pub abar: Affine,
}

impl RadialParams {
    pub fn new(f: &StructureFunction, rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {rho}")));
        }
        let r = rho * rho;
        let j = Jet::new(f, r)?;
        let sigma_y2 = j.d - j.d1 * j.d1 * r / j.d1_0;
        if !(sigma_y2 > 0.0) {
            return Err(Error::DegenerateRadial { r, value: sigma_y2 });
        }
        let sigma_y = sigma_y2.sqrt();
        let d2_0 = j.d2_0;
        let alpha = 2.0 * j.d2 / sigma_y;
        let beta = (j.d1 - j.d1_0) / sigma_y;
        let ar = alpha * r;
        let sigma1_sq = -4.0 * d2_0 - (ar + beta) * ar;
        let sigma2_sq = -2.0 * d2_0 - (ar + beta) * beta;
        let d1 = 0.5 + beta * beta / (4.0 * d2_0);
        let d2 = alpha * beta * r / (4.0 * d2_0);
        let d3 = alpha * alpha * r * r / (4.0 * d2_0);
        let c = (d1 + d1 * d3 - d2 * d2) / (1.0 + d1 + 2.0 * d2 + d3);
        let b2 = -4.0 * d2_0 + 2.0 * d2_0 * alpha * alpha * r * r / (-2.0 * d2_0 - beta * beta);
        let m1_per_u = (2.0 * j.d2 * r + j.d1 - j.d1_0) / sigma_y2;
        let m2_per_u = (j.d1 - j.d1_0) / sigma_y2;
        // ā = m1 − σ2²(2s y + m2)/(σ2² + αβρ²)
        let s = (-d2_0).sqrt();
        let big = sigma2_sq + alpha * beta * r;
        let abar = Affine {
            coef_u: m1_per_u - sigma2_sq * m2_per_u / big,
            coef_y: -2.0 * s * sigma2_sq / big,
        };
        Ok(RadialParams {
            rho,
            r,
            d1_0: j.d1_0,
            d2_0,
            sigma_y2,
            sigma_y,
            alpha,
            beta,
            sigma1_sq,
            sigma2_sq,
            d1,
            d2,
            d3,
            c,
            b2,
            m1_per_u,
            m2_per_u,
            abar,
        })
    }

    /// Var ζ₁ = 1 + d1 + 2d2 + d3.
    pub fn corner_variance(&self) -> f64 {
        1.0 + self.d1 + 2.0 * self.d2 + self.d3
    }

    /// Slope of the conditional mean of the lower block given ζ₁ = y.
    pub fn m3_slope(&self) -> f64 {
        (self.d1 + self.d2) / self.corner_variance()
    }

    pub fn at(&self, u: f64) -> LocalParams {
        LocalParams {
            radial: *self,
            u,
            m1: self.m1_per_u * u,
            m2: self.m2_per_u * u,
        }
    }
}

/// Local parameters at (ρ, u).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalParams {
    #[serde(flatten)]
    pub radial: RadialParams,
    pub u: f64,
    pub m1: f64,
    pub m2: f64,
}

impl LocalParams {
    pub fn sigma1(&self) -> Option<f64> {
        (self.radial.sigma1_sq >= 0.0).then(|| self.radial.sigma1_sq.sqrt())
    }

    pub fn sigma2(&self) -> Option<f64> {
        (self.radial.sigma2_sq >= 0.0).then(|| self.radial.sigma2_sq.sqrt())
    }

    /// ā(u, y) at this u.
    pub fn abar(&self, y: f64) -> f64 {
        self.radial.abar.at(self.u, y)
    }

    /// m₃ = (2D″(0) + β² + αβρ²) y/(6D″(0) + (β + αρ²)²) + m₂/(2√(−D″(0))).
    pub fn m3(&self, y: f64) -> f64 {
        let p = &self.radial;
        let ar = p.alpha * p.r;
        let num = 2.0 * p.d2_0 + p.beta * p.beta + p.alpha * p.beta * p.r;
        let den = 6.0 * p.d2_0 + (p.beta + ar).powi(2);
        num * y / den + self.m2 / (2.0 * (-p.d2_0).sqrt())
    }
}

pub fn local_params(f: &StructureFunction, rho: f64, u: f64) -> Result<LocalParams> {
    Ok(RadialParams::new(f, rho)?.at(u))
}

/// The GOE-representation condition at every radius of `grid`: −2D″(0) > (αr+β)β,
/// −4D″(0) > (αr+β)αr and αβ > 0.
///
/// The sign of αβ is taken from the signs of D″(r) and D′(r) − D′(0), so
/// Bernstein functions whose D″(r) underflows at large r still resolve.
pub fn check_assumption3(f: &StructureFunction, grid: &[f64]) -> ConditionReport {
    let mut b = ReportBuilder::new("assumption3");
    for &r in grid {
        match assumption3_probes(f, r) {
            Ok(list) => list.iter().for_each(|q| b.probe(r, q)),
            Err(e) => b.fail(r, e.to_string()),
        }
    }
    b.finish()
}

pub fn assumption3_probes(f: &StructureFunction, r: f64) -> Result<[Ineq; 3]> {
    let p = RadialParams::new(f, r.sqrt())?;
    let ar = p.alpha * r;
    let sign_d2 = f.strict_sign(r, 2)?;
    let inc = f.eval(r, 1)? - p.d1_0;
    let sign_ab = sign_d2 * inc.signum();
    Ok([
        Ineq::strict("-2D''(0) > (alpha r + beta) beta", -2.0 * p.d2_0, (ar + p.beta) * p.beta),
        Ineq::strict("-4D''(0) > (alpha r + beta) alpha r", -4.0 * p.d2_0, (ar + p.beta) * ar),
        Ineq::strict("sgn(alpha beta) > 0", sign_ab, 0.0).with_scale(1.0),
    ])
}

/// c > 0 and −4D″(0) > 2β² + α²r² at every radius of `grid`.
pub fn check_c_positive(f: &StructureFunction, grid: &[f64]) -> ConditionReport {
    let mut b = ReportBuilder::new("c_positive");
    for &r in grid {
        match RadialParams::new(f, r.sqrt()) {
            Ok(p) => {
                let v = p.corner_variance();
                let num = p.d1 + p.d1 * p.d3 - p.d2 * p.d2;
                // c = num / v; compare the numerator against its terms
                let scale = p.d1.abs() + (p.d1 * p.d3).abs() + p.d2 * p.d2;
                b.probe(r, &Ineq::strict("c > 0", num * v.signum(), 0.0).with_scale(scale));
                b.probe(
                    r,
                    &Ineq::strict(
                        "-4D''(0) > 2 beta^2 + alpha^2 r^2",
                        -4.0 * p.d2_0,
                        2.0 * p.beta * p.beta + (p.alpha * r).powi(2),
                    ),
                );
            }
            Err(e) => b.fail(r, e.to_string()),
        }
    }
    b.finish()
}

/// The two inequalities behind the fact that Bernstein functions satisfy
/// `assumption3`; the second is non-strict.
pub fn check_bernstein_proof(f: &StructureFunction, grid: &[f64]) -> (ConditionReport, ConditionReport) {
    let mut b1 = ReportBuilder::new("bernstein_proof_first");
    let mut b2 = ReportBuilder::new("bernstein_proof_second");
    for &r in grid {
        match bernstein_proof_probes(f, r) {
            Ok((p1, p2)) => {
                b1.probe(r, &p1);
                b2.probe(r, &p2);
            }
            Err(e) => {
                b1.fail(r, e.to_string());
                b2.fail(r, e.to_string());
            }
        }
    }
    (b1.finish(), b2.finish())
}

pub fn bernstein_proof_probes(f: &StructureFunction, r: f64) -> Result<(Ineq, Ineq)> {
    let j = Jet::new(f, r)?;
    let inc1 = j.d1 - j.d1_0;
    let inc2 = j.d2 - j.d2_0;
    let lhs1 = -2.0 * j.d2_0 * (j.d + r * j.d1_0 - 2.0 * r * j.d1);
    let rhs1 = 2.0 * r * j.d2_0 * inc1 + inc1 * inc1;
    let lhs2 = 2.0 * r * j.d2_0 * inc1 * inc1 / j.d1_0;
    let rhs2 = 2.0 * r * inc2 * inc1;
    Ok((
        Ineq::strict("-2D''(0)(D + rD'(0) - 2rD') > 2rD''(0)(D'-D'(0)) + (D'-D'(0))^2", lhs1, rhs1),
        Ineq::weak("2rD''(0)(D'-D'(0))^2/D'(0) >= 2r(D''-D''(0))(D'-D'(0))", lhs2, rhs2),
    ))
}

/// D″(r)·r > D′(r) − D′(0) (equivalently αr > 2β).
pub fn check_mean_value(f: &StructureFunction, grid: &[f64]) -> ConditionReport {
    let mut b = ReportBuilder::new("mean_value");
    for &r in grid {
        match Jet::new(f, r) {
            Ok(j) => b.probe(r, &Ineq::strict("D''(r) r > D'(r) - D'(0)", j.d2 * r, j.d1 - j.d1_0)),
            Err(e) => b.fail(r, e.to_string()),
        }
    }
    b.finish()
}

/// SGOI(d1, d2, d3) of size n is nondegenerate.
pub fn sgoi_nondeg(n: usize, d1: f64, d2: f64, d3: f64) -> bool {
    sgoi_margin(n, d1, d2, d3).map(|m| m.0 > 0.0 && m.1 > 0.0).unwrap_or(false)
}

/// (1 + (n−1)d1, 1 + d3 + (d1 + 2d2 − (n−1)d2²)/(1 + (n−1)d1)); nondegenerate
/// iff both are positive. At n = 1 the second factor is Var ζ₁.
/// `None` for n = 0.
pub fn sgoi_margin(n: usize, d1: f64, d2: f64, d3: f64) -> Option<(f64, f64)> {
    if n == 0 {
        return None;
    }
    let m = (n - 1) as f64;
    let first = 1.0 + m * d1;
    let second = 1.0 + d3 + (d1 + 2.0 * d2 - m * d2 * d2) / first;
    Some((first, second))
}

/// det Θ = (1 + (n−1)d1)·(second factor of [`sgoi_margin`]).
pub fn sgoi_det_theta(n: usize, d1: f64, d2: f64, d3: f64) -> Option<f64> {
    sgoi_margin(n, d1, d2, d3).map(|(a, b)| a * b)
}

fn hessian_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            v.push((i, j));
        }
    }
    v
}

fn kd(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Joint covariance of (H(x), ∂ᵢH(x), ∂ᵢⱼH(x)) for the pinned field H(0) = 0.
/// Hessian order: 11, 22, …, NN, 12, 13, …, (N−1)N.
pub fn covariance_full(f: &StructureFunction, x: &[f64]) -> Result<DMatrix<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Domain("point must have dimension >= 1".into()));
    }
    let r: f64 = x.iter().map(|v| v * v).sum();
    let (d1_0, d2_0) = f.origin()?;
    let [d, d1, d2] = f.derivs(r)?;
    let pairs = hessian_pairs(n);
    let size = 1 + n + pairs.len();
    let mut m = DMatrix::<f64>::zeros(size, size);
    m[(0, 0)] = d;
    for i in 0..n {
        m[(0, 1 + i)] = d1 * x[i];
        m[(1 + i, 1 + i)] = d1_0;
    }
    for (a, &(i, j)) in pairs.iter().enumerate() {
        let ia = 1 + n + a;
        m[(0, ia)] = 2.0 * d2 * x[i] * x[j] + (d1 - d1_0) * kd(i, j);
        for (b, &(k, l)) in pairs.iter().enumerate() {
            let ib = 1 + n + b;
            m[(ia, ib)] = -2.0 * d2_0 * (kd(j, l) * kd(i, k) + kd(i, l) * kd(k, j) + kd(k, l) * kd(i, j));
        }
    }
    for a in 0..size {
        for b in 0..a {
            m[(a, b)] = m[(b, a)];
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure_fn::lookup;

    #[test]
    fn smoothness_reports() {
        assert!(check_smoothness(&lookup("exp1").unwrap()).holds);
        assert!(check_smoothness(&lookup("f2").unwrap()).holds);
        let lin = StructureFunction::bernstein(
            "linear",
            crate::structure_fn::Spectral { linear: 1.0, ..Default::default() },
        )
        .unwrap();
        let rep = check_smoothness(&lin);
        assert!(!rep.holds);
        assert_eq!(rep.status, Status::Fails);
    }

    #[test]
    fn exp1_local_params_at_unit_radius() {
        let f = lookup("exp1").unwrap();
        let lp = local_params(&f, 1.0, 0.0).unwrap();
        let e1 = (-1.0f64).exp();
        assert!((lp.radial.sigma_y2 - ((1.0 - e1) - e1 * e1)).abs() < 1e-15);
        assert_eq!(lp.m1, 0.0);
        assert_eq!(lp.m2, 0.0);
        // c from d's equals the closed form in α, β
        let p = lp.radial;
        let alt = (4.0 * p.d2_0 + 2.0 * p.beta.powi(2) + p.alpha.powi(2) * p.r.powi(2))
            / (12.0 * p.d2_0 + 2.0 * (p.beta + p.alpha * p.r).powi(2));
        assert!((p.c - alt).abs() < 1e-14);
        // b² both ways
        let b2 = p.sigma1_sq + p.sigma2_sq - p.sigma2_sq.powi(2) / (p.sigma2_sq + p.alpha * p.beta * p.r);
        assert!((p.b2 - b2).abs() < 1e-13);
    }

    #[test]
    fn sgoi_examples() {
        assert!(sgoi_nondeg(2, 1.0, 0.0, 0.0));
        assert!((sgoi_det_theta(2, 1.0, 0.0, 0.0).unwrap() - 3.0).abs() < 1e-15);
        assert!(!sgoi_nondeg(3, -0.5, 0.0, 0.0));
    }

    #[test]
    fn covariance_full_structure() {
        let f = lookup("exp-mix").unwrap();
        let m = covariance_full(&f, &[1.0, 0.0]).unwrap();
        assert!((m[(0, 1)] - f.eval(1.0, 1).unwrap()).abs() < 1e-15);
        assert_eq!(m[(0, 2)], 0.0);
        for k in 1..3 {
            for a in 3..6 {
                assert_eq!(m[(k, a)], 0.0);
            }
        }
    }

    #[test]
    fn linear_structure_function_is_radially_degenerate() {
        // D = a r: every nondegeneracy term but the first two vanishes and they cancel
        let j = Jet { r: 0.7, d: 2.0 * 0.7, d1: 2.0, d2: 0.0, d1_0: 2.0, d2_0: -1e-300 };
        assert!(nondeg_from_jet(&j, 3).abs() < 1e-15);
    }

    #[test]
    fn grids() {
        let g = default_grid();
        assert_eq!(g.len(), 100);
        assert!((g[0] - 1e-6).abs() < 1e-18);
        assert_eq!(parse_grid("log:1:100:3").unwrap().len(), 3);
        assert!(parse_grid("lin:0:1:3").is_err());
        assert_eq!(parse_grid("0.5, 2").unwrap(), vec![0.5, 2.0]);
    }
}
