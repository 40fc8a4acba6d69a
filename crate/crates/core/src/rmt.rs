//! GOE, GOI(c) and SGOI(d1, d2, d3) ensembles: samplers, the ordered
//! eigenvalue density of GOI(c), the conditional corner law of SGOI and a
//! symmetric eigensolver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::assumptions::sgoi_nondeg;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special::ln_gamma_fn;
use crate::stats::{MomentCheck, Welford};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Tag {
    Goe,
    Goi,
    Sgoi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub tag: Tag,
    pub n: usize,
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub d1: f64,
    #[serde(default)]
    pub d2: f64,
    #[serde(default)]
    pub d3: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomp: Option<SgoiDecomposition>,
}

impl EnsembleSpec {
    pub fn sample(&self, stream: &mut RngStream) -> Result<DMatrix<f64>> {
        match self.tag {
            Tag::Goe => sample_goe(self.n, stream),
            Tag::Goi => sample_goi(self.n, self.c, stream),
            Tag::Sgoi => sample_sgoi(self.n, self.d1, self.d2, self.d3, stream, self.decomp),
        }
    }
}

/// ς = Cov(ζ₁, ζ₂), ϑ = Cov(ζ₂, GOE diagonal).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgoiDecomposition {
    pub varsigma: f64,
    pub vartheta: f64,
}

impl SgoiDecomposition {
    /// ϑ = 0, ς = (d1² + d1d2)/(1 + d1) when d1 ≥ 0; ϑ = d1, ς = 0 otherwise.
    pub fn default_for(d1: f64, d2: f64) -> Self {
        if d1 >= 0.0 {
            SgoiDecomposition { varsigma: (d1 * d1 + d1 * d2) / (1.0 + d1), vartheta: 0.0 }
        } else {
            SgoiDecomposition { varsigma: 0.0, vartheta: d1 }
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("matrix size must be >= 1".into()))
    } else {
        Ok(())
    }
}

fn fill_offdiag(m: &mut DMatrix<f64>, stream: &mut RngStream) {
    let n = m.nrows();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = s * stream.normal();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

pub fn sample_goe(n: usize, stream: &mut RngStream) -> Result<DMatrix<f64>> {
    check_n(n)?;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = stream.normal();
    }
    fill_offdiag(&mut m, stream);
    Ok(m)
}

/// Cholesky factor of a covariance, or a degenerate-ensemble error.
fn chol(cov: DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    nalgebra::Cholesky::new(cov)
        .map(|c| c.l())
        .ok_or_else(|| Error::DegenerateEnsemble(format!("{what}: covariance is not positive definite")))
}

/// Reusable GOI(c) sampler; the diagonal covariance I + c·11ᵀ is factored once.
#[derive(Debug, Clone)]
pub struct GoiSampler {
    n: usize,
    l: DMatrix<f64>,
}

impl GoiSampler {
    pub fn new(n: usize, c: f64) -> Result<Self> {
        check_n(n)?;
        if !(c > -1.0 / n as f64) {
            return Err(Error::DegenerateEnsemble(format!("GOI({c}) of size {n} needs c > -1/{n}")));
        }
        let cov = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 + c } else { c });
        Ok(GoiSampler { n, l: chol(cov, "GOI diagonal")? })
    }

    pub fn sample(&self, stream: &mut RngStream) -> DMatrix<f64> {
        let n = self.n;
        let mut z = DVector::zeros(n);
        stream.fill_normal(z.as_mut_slice());
        let d = &self.l * z;
        let mut m = DMatrix::from_diagonal(&d);
        fill_offdiag(&mut m, stream);
        m
    }
}

pub fn sample_goi(n: usize, c: f64, stream: &mut RngStream) -> Result<DMatrix<f64>> {
    Ok(GoiSampler::new(n, c)?.sample(stream))
}

/// GOI(c) for c > 0 as GOE + N(0, c)·I.
pub fn sample_goi_shifted(n: usize, c: f64, stream: &mut RngStream) -> Result<DMatrix<f64>> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!("the shifted GOI construction needs c > 0, got {c}")));
    }
    let mut m = sample_goe(n, stream)?;
    let s = c.sqrt() * stream.normal();
    for i in 0..n {
        m[(i, i)] += s;
    }
    Ok(m)
}

/// Θ: covariance of the diagonal of an SGOI matrix.
pub fn theta_matrix(n: usize, d1: f64, d2: f64, d3: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => 1.0 + d1 + 2.0 * d2 + d3,
        (0, _) | (_, 0) => d1 + d2,
        _ if i == j => 1.0 + d1,
        _ => d1,
    })
}

/// Ξ: covariance of (ζ₁, ζ₂, GOE₁₁, …, GOE_{n−1,n−1}) in the block construction.
pub fn xi_matrix(n: usize, d1: f64, d2: f64, d3: f64, dec: SgoiDecomposition) -> DMatrix<f64> {
    let (s, t) = (dec.varsigma, dec.vartheta);
    DMatrix::from_fn(n + 1, n + 1, |i, j| match (i.min(j), i.max(j)) {
        (0, 0) => 1.0 + d1 + 2.0 * d2 + d3,
        (0, 1) => s,
        (0, _) => d1 + d2 - s,
        (1, 1) => d1 - 2.0 * t,
        (1, _) => t,
        (a, b) if a == b => 1.0,
        _ => 0.0,
    })
}

/// 1 + d1 + 2d2 + d3 − ς²/d1 − (n−1)(d1 + d2 − ς)²; positivity is sufficient
/// for Ξ ≻ 0 when d1 > 0 and ϑ = 0.
pub fn d1pos_expr(n: usize, d1: f64, d2: f64, d3: f64, varsigma: f64) -> f64 {
    1.0 + d1 + 2.0 * d2 + d3 - varsigma * varsigma / d1 - (n as f64 - 1.0) * (d1 + d2 - varsigma).powi(2)
}

/// Symmetric square root factor of a PSD matrix, tolerating round-off.
fn psd_factor(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    let scale = m.diagonal().iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    let e = SymmetricEigen::new(m.clone());
    let min = e.eigenvalues.min();
    if min < -1e-10 * scale {
        return Err(Error::DegenerateEnsemble(format!(
            "{what}: covariance has eigenvalue {min:e} < 0"
        )));
    }
    let sq = e.eigenvalues.map(|v| v.max(0.0).sqrt());
    Ok(&e.eigenvectors * DMatrix::from_diagonal(&sq))
}

/// Reusable SGOI sampler.
#[derive(Debug, Clone)]
pub struct SgoiSampler {
    n: usize,
    mode: SgoiMode,
}

#[derive(Debug, Clone)]
enum SgoiMode {
    /// (ζ₁, ζ₂, GOE diagonal) jointly from Ξ
    Block(DMatrix<f64>),
    /// diagonal jointly from Θ
    Direct(DMatrix<f64>),
}

impl SgoiSampler {
    pub fn new(n: usize, d1: f64, d2: f64, d3: f64, decomp: Option<SgoiDecomposition>) -> Result<Self> {
        check_n(n)?;
        if !sgoi_nondeg(n, d1, d2, d3) {
            return Err(Error::DegenerateEnsemble(format!(
                "SGOI({d1}, {d2}, {d3}) of size {n} is degenerate"
            )));
        }
        if n == 1 {
            return Ok(SgoiSampler { n, mode: SgoiMode::Direct(chol(theta_matrix(1, d1, d2, d3), "SGOI")?) });
        }
        let mode = match decomp {
            Some(dec) => SgoiMode::Block(psd_factor(&xi_matrix(n, d1, d2, d3, dec), "SGOI block construction")?),
            None => match psd_factor(&xi_matrix(n, d1, d2, d3, SgoiDecomposition::default_for(d1, d2)), "") {
                Ok(f) => SgoiMode::Block(f),
                Err(_) => SgoiMode::Direct(chol(theta_matrix(n, d1, d2, d3), "SGOI diagonal")?),
            },
        };
        Ok(SgoiSampler { n, mode })
    }

    pub fn uses_block_construction(&self) -> bool {
        matches!(self.mode, SgoiMode::Block(_))
    }

    pub fn sample(&self, stream: &mut RngStream) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        match &self.mode {
            SgoiMode::Direct(l) => {
                let mut z = DVector::zeros(n);
                stream.fill_normal(z.as_mut_slice());
                let d = l * z;
                for i in 0..n {
                    m[(i, i)] = d[i];
                }
            }
            SgoiMode::Block(f) => {
                let mut z = DVector::zeros(n + 1);
                stream.fill_normal(z.as_mut_slice());
                let v = f * z;
                m[(0, 0)] = v[0];
                for i in 1..n {
                    m[(i, i)] = v[1] + v[1 + i];
                }
            }
        }
        fill_offdiag(&mut m, stream);
        m
    }
}

pub fn sample_sgoi(
    n: usize,
    d1: f64,
    d2: f64,
    d3: f64,
    stream: &mut RngStream,
    decomp: Option<SgoiDecomposition>,
) -> Result<DMatrix<f64>> {
    Ok(SgoiSampler::new(n, d1, d2, d3, decomp)?.sample(stream))
}

/// ln K_n = (n/2) ln 2 + Σ ln Γ(i/2).
pub fn ln_k(n: usize) -> f64 {
    0.5 * n as f64 * std::f64::consts::LN_2 + (1..=n).map(|i| ln_gamma_fn(i as f64 / 2.0)).sum::<f64>()
}

/// Log density of the ordered eigenvalues of GOI(c); −∞ off the ordered cone.
pub fn goi_eig_logdensity(c: f64, lambdas: &[f64]) -> Result<f64> {
    let n = lambdas.len();
    check_n(n)?;
    if !(c > -1.0 / n as f64) {
        return Err(Error::DegenerateEnsemble(format!("GOI({c}) of size {n} needs c > -1/{n}")));
    }
    Ok(goi_logdensity_unchecked(c, lambdas, ln_k(n)))
}

/// As [`goi_eig_logdensity`] with ln K_n supplied and no parameter checks.
pub fn goi_logdensity_unchecked(c: f64, l: &[f64], lnk: f64) -> f64 {
    let n = l.len();
    let nc = 1.0 + n as f64 * c;
    let (mut s, mut s2, mut lv) = (0.0, 0.0, 0.0);
    for i in 0..n {
        s += l[i];
        s2 += l[i] * l[i];
        for j in (i + 1)..n {
            let d = l[j] - l[i];
            if d < 0.0 {
                return f64::NEG_INFINITY;
            }
            lv += d.ln();
        }
    }
    -lnk - 0.5 * nc.ln() - 0.5 * s2 + c / (2.0 * nc) * s * s + lv
}

/// Ordered eigenvalues and the orthogonal frame (columns).
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn eig_sym(m: &DMatrix<f64>) -> Result<Eigen> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Domain("eig_sym needs a square matrix".into()));
    }
    let norm = m.norm();
    if !norm.is_finite() {
        return Err(Error::Numeric(format!("eig_sym: non-finite input (Frobenius norm {norm})")));
    }
    let asym = (m - m.transpose()).norm();
    if asym > 1e-12 * norm.max(1e-300) {
        return Err(Error::Domain(format!("eig_sym: input not symmetric (asymmetry {asym:e})")));
    }
    let e = SymmetricEigen::new(m.clone());
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].partial_cmp(&e.eigenvalues[b]).unwrap());
    let values: Vec<f64> = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| e.eigenvectors[(r, idx[c])]);
    let rec = &vectors * DMatrix::from_diagonal(&DVector::from_vec(values.clone())) * vectors.transpose();
    let err = (rec - m).norm();
    if err > 1e-10 * norm.max(1e-300) {
        return Err(Error::Numeric(format!(
            "eig_sym: reconstruction error {err:e} for input of norm {norm:e}, size {n}"
        )));
    }
    Ok(Eigen { values, vectors })
}

/// Sorted eigenvalues only (no frame, no checks); the hot-path variant.
pub fn eigvals_sorted(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[derive(Debug, Clone, Serialize)]
pub struct CornerReport {
    pub samples: usize,
    pub accepted: usize,
    pub window: f64,
    pub c: f64,
    pub slope_expected: f64,
    pub slope: f64,
    pub slope_std_error: f64,
    pub moments: Vec<MomentCheck>,
    /// max |estimate − expected| over the block moments
    pub max_abs_discrepancy: f64,
    /// the same discrepancy in units of the standard error, slope included
    pub max_z: f64,
}

/// Samples SGOI matrices and checks that, given M₁₁ ∈ [y − w, y + w], the
/// lower block minus ((d1+d2)y/V)·I has the GOI(c) covariance tensor, and
/// that the regression slope of the block diagonal on M₁₁ is (d1+d2)/V.
pub fn conditional_corner_check(
    n: usize,
    d1: f64,
    d2: f64,
    d3: f64,
    y: f64,
    count: usize,
    window: f64,
    stream: &mut RngStream,
) -> Result<CornerReport> {
    if n < 2 {
        return Err(Error::Domain("the corner check needs n >= 2".into()));
    }
    let v = 1.0 + d1 + 2.0 * d2 + d3;
    if !(v > 0.0) {
        return Err(Error::DegenerateEnsemble(format!("Var(M11) = {v} <= 0")));
    }
    let sampler = SgoiSampler::new(n, d1, d2, d3, None)?;
    let slope_expected = (d1 + d2) / v;
    let c = (d1 + d1 * d3 - d2 * d2) / v;
    let shift = slope_expected * y;

    let mut var_ii = Welford::default();
    let mut cov_ij = Welford::default();
    let mut var_off = Welford::default();
    let mut mean_ii = Welford::default();
    let (mut sxy, mut sxx) = (0.0, 0.0);
    let mut resid: Vec<(f64, f64)> = Vec::with_capacity(count);
    for _ in 0..count {
        let m = sampler.sample(stream);
        let x = m[(0, 0)];
        let b = m[(1, 1)];
        sxy += x * b;
        sxx += x * x;
        resid.push((x, b));
        if (x - y).abs() <= window {
            let a = m[(1, 1)] - shift;
            mean_ii.push(a);
            var_ii.push(a * a);
            if n >= 3 {
                cov_ij.push(a * (m[(2, 2)] - shift));
                var_off.push(m[(1, 2)] * m[(1, 2)]);
            } else {
                var_off.push(m[(0, 1)] * m[(0, 1)]);
            }
        }
    }
    // zero-mean regression through the origin
    let slope = sxy / sxx;
    let mut rv = Welford::default();
    for &(x, b) in &resid {
        rv.push(b - slope * x);
    }
    let slope_std_error = (rv.variance() / sxx).sqrt();

    let mut moments = vec![
        mean_ii.check("E[B11 | corner]", 0.0),
        var_ii.check("Var[B11 | corner]", 1.0 + c),
        var_off.check(if n >= 3 { "Var[B12 | corner]" } else { "Var[M12 | corner]" }, 0.5),
    ];
    if n >= 3 {
        moments.push(cov_ij.check("Cov[B11, B22 | corner]", c));
    }
    let max_abs_discrepancy = moments.iter().map(|m| (m.estimate - m.expected).abs()).fold(0.0, f64::max);
    let slope_z = (slope - slope_expected).abs() / slope_std_error;
    let max_z = moments.iter().map(|m| m.z()).fold(slope_z, f64::max);
    Ok(CornerReport {
        samples: count,
        accepted: mean_ii.n as usize,
        window,
        c,
        slope_expected,
        slope,
        slope_std_error,
        moments,
        max_abs_discrepancy,
        max_z,
    })
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, signs fixed).
pub fn random_orthogonal(n: usize, stream: &mut RngStream) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(n, n);
    stream.fill_normal(g.as_mut_slice());
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn eig_small_cases() {
        let e = eig_sym(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        let e = eig_sym(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        let mut s = RngStream::new(3, 0);
        let m = sample_goe(6, &mut s).unwrap();
        let e = eig_sym(&m).unwrap();
        assert!((e.values.iter().sum::<f64>() - m.trace()).abs() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn goi_density_one_by_one() {
        let v = goi_eig_logdensity(0.0, &[0.0]).unwrap();
        assert!((v + 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-14);
        for &(c, x) in &[(3.0, 1.3), (-0.5, -0.7), (0.2, 2.0)] {
            let s2: f64 = 1.0 + c;
            let want = -0.5 * (2.0 * std::f64::consts::PI * s2).ln() - x * x / (2.0 * s2);
            assert!((goi_eig_logdensity(c, &[x]).unwrap() - want).abs() < 1e-13);
        }
        assert_eq!(goi_eig_logdensity(0.0, &[1.0, 0.0]).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn goi_boundary() {
        assert!(GoiSampler::new(2, -0.5).is_err());
        assert!(GoiSampler::new(2, -0.5 + 1e-9).is_ok());
        assert!(GoiSampler::new(4, -0.25).is_err());
    }

    #[test]
    fn xi_default_decompositions_are_psd() {
        for &(d1, d2, d3) in &[(0.4, 0.1, 0.05), (0.0, 0.0, 0.3), (-0.2, 0.05, 0.1)] {
            let dec = SgoiDecomposition::default_for(d1, d2);
            let xi = xi_matrix(3, d1, d2, d3, dec);
            assert!(xi.symmetric_eigenvalues().min() > -1e-12, "{d1} {d2} {d3}");
        }
    }

    #[test]
    fn sgoi_direct_and_block_agree_on_the_diagonal_covariance() {
        // Ξ ⇒ Cov(diag) must equal Θ
        let (n, d1, d2, d3) = (4, 0.3, -0.1, 0.2);
        let dec = SgoiDecomposition::default_for(d1, d2);
        let xi = xi_matrix(n, d1, d2, d3, dec);
        // diag = A·(ζ1, ζ2, g)
        let a = DMatrix::from_fn(n, n + 1, |i, j| match (i, j) {
            (0, 0) => 1.0,
            (0, _) => 0.0,
            (_, 1) => 1.0,
            _ => (j == i + 1) as u8 as f64,
        });
        let theta = &a * xi * a.transpose();
        assert!((theta - theta_matrix(n, d1, d2, d3)).norm() < 1e-14);
    }
}
