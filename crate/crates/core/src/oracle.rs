//! Brute-force check of the Kac–Rice counts: draw the pinned field
//! H(0) = 0 on a lattice, locate its critical points and average.
//!
//! The kernel is C(x, y) = ½(D(‖x‖²) + D(‖y‖²) − D(‖x − y‖²)). It is factored
//! once by a pivoted (low-rank) Cholesky decomposition; every realization is
//! then a matrix–vector product. Critical points are found on a C¹ bicubic
//! Hermite interpolant of the lattice values.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kacrice::ValueSet;
use crate::rng::{Purpose, RngStream};
use crate::structure_fn::StructureFunction;

/// Largest lattice handled by the dense sampler.
pub const MAX_POINTS: usize = 4000;
/// Pivots below this multiple of the largest variance end the factorization.
pub const PIVOT_REL_TOL: f64 = 1e-10;
/// Minimum number of lattice cells per correlation length.
pub const CELLS_PER_CORRELATION: f64 = 6.0;
/// Default spacing in correlation lengths; at 1/8 the extrema are undercounted by about 1.5%.
pub const DEFAULT_H_PER_CORRELATION: f64 = 1.0 / 12.0;
pub const NEWTON_MAX_ITER: usize = 25;
/// Newton stops once ‖∇H‖ ≤ this multiple of the local gradient scale.
pub const NEWTON_REL_TOL: f64 = 1e-6;
/// Hessian eigenvalues below this multiple of the curvature scale are unclassified.
pub const UNCLASSIFIED_REL: f64 = 1e-8;

/// Regular lattice {−L + i·h}ᴺ, optionally rotated by `angle` (N = 2) when
/// mapped to physical coordinates.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Lattice {
    pub n: usize,
    pub h: f64,
    pub half_width: f64,
    pub per_axis: usize,
    pub angle: f64,
}

impl Lattice {
    pub fn new(n: usize, half_width: f64, h: f64, angle: f64) -> Result<Self> {
        if !(n == 1 || n == 2) {
            return Err(Error::InvalidRequest(format!("field simulation supports N = 1 or 2, got {n}")));
        }
        if !(h > 0.0 && half_width > h) {
            return Err(Error::InvalidRequest(format!("need 0 < h < half-width, got h = {h}, L = {half_width}")));
        }
        let per_axis = (2.0 * half_width / h).round() as usize + 1;
        Ok(Lattice { n, h, half_width: 0.5 * h * (per_axis - 1) as f64, per_axis, angle })
    }

    pub fn len(&self) -> usize {
        self.per_axis.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coord(&self, i: usize) -> f64 {
        -self.half_width + self.h * i as f64
    }

    /// Lattice coordinates of point `idx` (x fastest).
    pub fn local(&self, idx: usize) -> [f64; 2] {
        if self.n == 1 {
            [self.coord(idx), 0.0]
        } else {
            [self.coord(idx % self.per_axis), self.coord(idx / self.per_axis)]
        }
    }

    /// Physical coordinates of point `idx`.
    pub fn physical(&self, idx: usize) -> [f64; 2] {
        let [a, b] = self.local(idx);
        let (s, c) = self.angle.sin_cos();
        [c * a - s * b, s * a + c * b]
    }
}

/// Low-rank factor of the lattice kernel: K ≈ Σₖ colₖ colₖᵀ.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    pub lattice: Lattice,
    cols: Vec<Vec<f64>>,
    /// largest residual variance left out of the factor
    pub residual: f64,
}

impl FieldSampler {
    pub fn new(f: &StructureFunction, lattice: Lattice) -> Result<Self> {
        let (d1, d2) = f.origin()?;
        let corr = (d1 / -d2).sqrt();
        if lattice.h * CELLS_PER_CORRELATION > corr * (1.0 + 1e-12) {
            return Err(Error::InvalidRequest(format!(
                "h = {} is too coarse: the correlation length {corr:.4} must span {CELLS_PER_CORRELATION} cells",
                lattice.h
            )));
        }
        let m = lattice.len();
        if m > MAX_POINTS {
            return Err(Error::InvalidRequest(format!("{m} lattice points exceed the dense limit of {MAX_POINTS}")));
        }
        let pts: Vec<[f64; 2]> = (0..m).map(|i| lattice.physical(i)).collect();
        let dn: Vec<f64> = pts.iter().map(|p| f.eval(p[0] * p[0] + p[1] * p[1], 0)).collect::<Result<_>>()?;
        let scale = dn.iter().cloned().fold(0.0, f64::max);
        if !(scale > 0.0) {
            return Err(Error::Numeric("kernel vanishes on the lattice".into()));
        }
        let stop = PIVOT_REL_TOL * scale;
        let kernel_col = |p: usize| -> Result<Vec<f64>> {
            let xp = pts[p];
            (0..m)
                .map(|i| {
                    let (dx, dy) = (pts[i][0] - xp[0], pts[i][1] - xp[1]);
                    Ok(0.5 * (dn[i] + dn[p] - f.eval(dx * dx + dy * dy, 0)?))
                })
                .collect()
        };
        let mut diag = dn.clone();
        let mut used = vec![false; m];
        let mut cols: Vec<Vec<f64>> = Vec::new();
        loop {
            let mut p = usize::MAX;
            let mut best = f64::NEG_INFINITY;
            for i in 0..m {
                if !used[i] && diag[i] > best {
                    best = diag[i];
                    p = i;
                }
            }
            if p == usize::MAX || best <= stop {
                break;
            }
            let mut col = kernel_col(p)?;
            for c in &cols {
                let cp = c[p];
                for (v, ci) in col.iter_mut().zip(c) {
                    *v -= ci * cp;
                }
            }
            let piv = best.sqrt();
            for i in 0..m {
                if used[i] || i == p {
                    col[i] = 0.0;
                } else {
                    col[i] /= piv;
                    diag[i] -= col[i] * col[i];
                }
            }
            col[p] = piv;
            used[p] = true;
            diag[p] = 0.0;
            cols.push(col);
        }
        let worst = (0..m).filter(|&i| !used[i]).map(|i| diag[i]).fold(f64::INFINITY, f64::min);
        if worst < -stop * m as f64 {
            return Err(Error::NotPsd { worst });
        }
        let residual = (0..m).filter(|&i| !used[i]).map(|i| diag[i].abs()).fold(0.0, f64::max);
        Ok(FieldSampler { lattice, cols, residual })
    }

    pub fn rank(&self) -> usize {
        self.cols.len()
    }

    pub fn sample(&self, stream: &mut RngStream) -> FieldSample {
        let mut values = vec![0.0; self.lattice.len()];
        for c in &self.cols {
            let z = stream.normal();
            for (v, ci) in values.iter_mut().zip(c) {
                *v += z * ci;
            }
        }
        FieldSample { lattice: self.lattice, values }
    }
}

/// One realization (or an injected test surface) on a lattice.
#[derive(Debug, Clone, Serialize)]
pub struct FieldSample {
    pub lattice: Lattice,
    pub values: Vec<f64>,
}

impl FieldSample {
    /// Tabulates `g` at lattice coordinates.
    pub fn from_fn(lattice: Lattice, g: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..lattice.len())
            .map(|i| {
                let p = lattice.local(i);
                g(&p[..lattice.n])
            })
            .collect();
        FieldSample { lattice, values }
    }

    /// Every other lattice point (spacing 2h), centred on the same origin.
    pub fn coarsen(&self) -> Result<FieldSample> {
        let l = self.lattice;
        if l.per_axis.is_multiple_of(2) {
            return Err(Error::InvalidRequest("coarsening needs an odd number of points per axis".into()));
        }
        let pa = l.per_axis.div_ceil(2);
        let lat = Lattice { per_axis: pa, h: 2.0 * l.h, ..l };
        let values = if l.n == 1 {
            (0..pa).map(|i| self.values[2 * i]).collect()
        } else {
            (0..pa * pa).map(|k| self.values[2 * (k / pa) * l.per_axis + 2 * (k % pa)]).collect()
        };
        Ok(FieldSample { lattice: lat, values })
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.lattice.per_axis + i]
    }
}

/// A critical point of the interpolated field.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CriticalPointRecord {
    /// lattice coordinates (the norm is frame independent)
    pub location: Vec<f64>,
    pub value: f64,
    pub index: usize,
    pub classified: bool,
    pub refinement_residual: f64,
    pub hessian_eigenvalues: Vec<f64>,
}

/// Node derivatives along one axis: central differences, one-sided at the ends.
fn diff(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| match i {
            0 => (v[1] - v[0]) / h,
            _ if i == n - 1 => (v[n - 1] - v[n - 2]) / h,
            _ => (v[i + 1] - v[i - 1]) / (2.0 * h),
        })
        .collect()
}

// Hermite basis and derivatives on [0, 1]
fn herm(s: f64) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let (s2, s3) = (s * s, s * s * s);
    (
        [2.0 * s3 - 3.0 * s2 + 1.0, -2.0 * s3 + 3.0 * s2, s3 - 2.0 * s2 + s, s3 - s2],
        [6.0 * s2 - 6.0 * s, -6.0 * s2 + 6.0 * s, 3.0 * s2 - 4.0 * s + 1.0, 3.0 * s2 - 2.0 * s],
        [12.0 * s - 6.0, -12.0 * s + 6.0, 6.0 * s - 4.0, 6.0 * s - 2.0],
    )
}

/// Value, gradient and Hessian of the Hermite interpolant.
struct Interp<'a> {
    s: &'a FieldSample,
    fx: Vec<f64>,
    fy: Vec<f64>,
    fxy: Vec<f64>,
}

struct Jet2 {
    v: f64,
    g: [f64; 2],
    hess: [[f64; 2]; 2],
}

impl<'a> Interp<'a> {
    fn new(s: &'a FieldSample) -> Self {
        let l = s.lattice;
        let pa = l.per_axis;
        let h = l.h;
        if l.n == 1 {
            return Interp { s, fx: diff(&s.values, h), fy: vec![], fxy: vec![] };
        }
        let mut fx = vec![0.0; pa * pa];
        let mut fy = vec![0.0; pa * pa];
        let mut fxy = vec![0.0; pa * pa];
        for j in 0..pa {
            let row: Vec<f64> = (0..pa).map(|i| s.at(i, j)).collect();
            for (i, d) in diff(&row, h).into_iter().enumerate() {
                fx[j * pa + i] = d;
            }
        }
        for i in 0..pa {
            let col: Vec<f64> = (0..pa).map(|j| s.at(i, j)).collect();
            let colx: Vec<f64> = (0..pa).map(|j| fx[j * pa + i]).collect();
            for (j, (d, dx)) in diff(&col, h).into_iter().zip(diff(&colx, h)).enumerate() {
                fy[j * pa + i] = d;
                fxy[j * pa + i] = dx;
            }
        }
        Interp { s, fx, fy, fxy }
    }

    fn cell(&self, x: f64) -> (usize, f64) {
        let l = self.s.lattice;
        let t = (x + l.half_width) / l.h;
        let i = (t.floor().max(0.0) as usize).min(l.per_axis - 2);
        (i, t - i as f64)
    }

    fn eval(&self, x: &[f64]) -> Jet2 {
        let h = self.s.lattice.h;
        let pa = self.s.lattice.per_axis;
        if self.s.lattice.n == 1 {
            let (i, t) = self.cell(x[0]);
            let (b, db, ddb) = herm(t);
            let c = [self.s.values[i], self.s.values[i + 1], h * self.fx[i], h * self.fx[i + 1]];
            let dot = |w: &[f64; 4]| w.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>();
            return Jet2 { v: dot(&b), g: [dot(&db) / h, 0.0], hess: [[dot(&ddb) / (h * h), 0.0], [0.0, 0.0]] };
        }
        let (i, s) = self.cell(x[0]);
        let (j, t) = self.cell(x[1]);
        let (bs, dbs, ddbs) = herm(s);
        let (bt, dbt, ddbt) = herm(t);
        // coefficient grid over (x-basis a, y-basis b): a, b ∈ {value0, value1, slope0, slope1}
        let mut c = [[0.0; 4]; 4];
        for (a, (ii, kind_x)) in [(i, 0), (i + 1, 0), (i, 1), (i + 1, 1)].into_iter().enumerate() {
            for (b, (jj, kind_y)) in [(j, 0), (j + 1, 0), (j, 1), (j + 1, 1)].into_iter().enumerate() {
                let k = jj * pa + ii;
                c[a][b] = match (kind_x, kind_y) {
                    (0, 0) => self.s.values[k],
                    (1, 0) => h * self.fx[k],
                    (0, 1) => h * self.fy[k],
                    _ => h * h * self.fxy[k],
                };
            }
        }
        let form = |u: &[f64; 4], w: &[f64; 4]| {
            let mut acc = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    acc += u[a] * w[b] * c[a][b];
                }
            }
            acc
        };
        Jet2 {
            v: form(&bs, &bt),
            g: [form(&dbs, &bt) / h, form(&bs, &dbt) / h],
            hess: [
                [form(&ddbs, &bt) / (h * h), form(&dbs, &dbt) / (h * h)],
                [form(&dbs, &dbt) / (h * h), form(&bs, &ddbt) / (h * h)],
            ],
        }
    }
}

fn sym_eig2(m: [[f64; 2]; 2]) -> [f64; 2] {
    let tr = 0.5 * (m[0][0] + m[1][1]);
    let d = (0.25 * (m[0][0] - m[1][1]).powi(2) + m[0][1] * m[1][0]).max(0.0).sqrt();
    [tr - d, tr + d]
}

fn norm2(g: &[f64; 2]) -> f64 {
    g[0].hypot(g[1])
}

/// Damped Newton on ∇ of the interpolant from `x0`.
fn polish(ip: &Interp, x0: [f64; 2], tol: f64) -> ([f64; 2], f64) {
    let n = ip.s.lattice.n;
    let mut x = x0;
    let mut jet = ip.eval(&x);
    let mut res = norm2(&jet.g);
    for _ in 0..NEWTON_MAX_ITER {
        if res <= tol {
            break;
        }
        let step = if n == 1 {
            [jet.g[0] / jet.hess[0][0], 0.0]
        } else {
            let [[a, b], [c, d]] = jet.hess;
            let det = a * d - b * c;
            [(d * jet.g[0] - b * jet.g[1]) / det, (a * jet.g[1] - c * jet.g[0]) / det]
        };
        if !step[0].is_finite() || !step[1].is_finite() {
            break;
        }
        let mut lam = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let y = [x[0] - lam * step[0], x[1] - lam * step[1]];
            let jy = ip.eval(&y);
            let ry = norm2(&jy.g);
            if ry < res {
                x = y;
                jet = jy;
                res = ry;
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (x, res)
}

/// Critical points with R1 < ‖x‖ < R2 (attributed by polished location).
pub fn count_critical(sample: &FieldSample, r1: f64, r2: f64) -> Vec<CriticalPointRecord> {
    let l = sample.lattice;
    let ip = Interp::new(sample);
    let pa = l.per_axis;
    let h = l.h;
    let rms = |v: &[f64]| (v.iter().map(|x| x * x).sum::<f64>() / v.len().max(1) as f64).sqrt();
    let mut found: Vec<CriticalPointRecord> = Vec::new();
    let mut consider = |x0: [f64; 2], gscale: f64, cscale: f64| {
        let (x, res) = polish(&ip, x0, NEWTON_REL_TOL * gscale);
        if res > NEWTON_REL_TOL * gscale {
            return;
        }
        let rad = x[0].hypot(x[1]);
        if !(rad > r1 && rad < r2) || x[0].abs() > l.half_width || x[1].abs() > l.half_width {
            return;
        }
        if found.iter().any(|p| (p.location[0] - x[0]).hypot(p.location.get(1).copied().unwrap_or(0.0) - x[1]) < 0.5 * h) {
            return;
        }
        let jet = ip.eval(&x);
        let eig: Vec<f64> = if l.n == 1 { vec![jet.hess[0][0]] } else { sym_eig2(jet.hess).to_vec() };
        let classified = eig.iter().all(|e| e.abs() >= UNCLASSIFIED_REL * cscale);
        found.push(CriticalPointRecord {
            location: x[..l.n].to_vec(),
            value: jet.v,
            index: eig.iter().filter(|&&e| e < 0.0).count(),
            classified,
            refinement_residual: res,
            hessian_eigenvalues: eig,
        });
    };
    let near_shell = |c: f64| c > r1 - 2.0 * h && c < r2 + 2.0 * h;
    if l.n == 1 {
        let g = &ip.fx;
        let gscale = rms(g);
        let cscale = rms(&diff(g, h));
        for i in 0..pa - 1 {
            let mid = l.coord(i) + 0.5 * h;
            if near_shell(mid.abs()) && g[i].signum() != g[i + 1].signum() {
                consider([mid, 0.0], gscale.max(g[i].abs()), cscale);
            }
        }
    } else {
        let gscale_all = rms(&ip.fx).hypot(rms(&ip.fy));
        let cscale = rms(&ip.fxy).max(rms(&diff(&ip.fx, h)));
        for j in 0..pa - 1 {
            for i in 0..pa - 1 {
                let (cx, cy) = (l.coord(i) + 0.5 * h, l.coord(j) + 0.5 * h);
                if !near_shell(cx.hypot(cy)) {
                    continue;
                }
                let ks = [j * pa + i, j * pa + i + 1, (j + 1) * pa + i, (j + 1) * pa + i + 1];
                let changes = |v: &[f64]| {
                    let pos = ks.iter().any(|&k| v[k] > 0.0);
                    let neg = ks.iter().any(|&k| v[k] <= 0.0);
                    pos && neg
                };
                if changes(&ip.fx) && changes(&ip.fy) {
                    let local = ks.iter().map(|&k| ip.fx[k].hypot(ip.fy[k])).fold(0.0, f64::max);
                    consider([cx, cy], local.max(1e-3 * gscale_all), cscale);
                }
            }
        }
    }
    found.sort_by(|a, b| a.location.partial_cmp(&b.location).unwrap());
    found
}

/// Per-index means over realizations.
#[derive(Debug, Clone, Serialize)]
pub struct McCrt {
    pub reps: usize,
    pub mean_by_index: Vec<f64>,
    pub se_by_index: Vec<f64>,
    pub total_mean: f64,
    pub total_se: f64,
    /// critical points whose index could not be classified
    pub unclassified: usize,
    pub rank: usize,
    pub lattice: Lattice,
    /// per-realization counts: by index, then total
    #[serde(skip)]
    pub per_rep: Vec<Vec<usize>>,
}

/// Options of the field-simulation oracle.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimOptions {
    pub h: f64,
    pub seed: u64,
    /// rotation of the sampling frame (N = 2)
    pub angle: f64,
}

/// Lattice covering the shell with two cells of margin.
pub fn shell_lattice(n: usize, r2: f64, h: f64, angle: f64) -> Result<Lattice> {
    let k = ((r2 + 2.0 * h) / h).ceil();
    Lattice::new(n, k * h, h, angle)
}

pub fn mc_crt(
    f: &StructureFunction,
    n: usize,
    r1: f64,
    r2: f64,
    e: &ValueSet,
    reps: usize,
    opts: &SimOptions,
) -> Result<McCrt> {
    if !(r1 >= 0.0 && r2 > r1) {
        return Err(Error::InvalidRequest(format!("shell needs 0 <= R1 < R2, got ({r1}, {r2})")));
    }
    if reps < 2 {
        return Err(Error::InvalidRequest("need at least 2 realizations".into()));
    }
    let sampler = FieldSampler::new(f, shell_lattice(n, r2, opts.h, opts.angle)?)?;
    let per_rep: Vec<(Vec<usize>, usize)> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut stream = RngStream::for_purpose(opts.seed, Purpose::Field, rep);
            let s = sampler.sample(&mut stream);
            let pts = count_critical(&s, r1, r2);
            let mut c = vec![0usize; n + 2];
            let mut unc = 0;
            for p in pts.iter().filter(|p| e.contains(p.value)) {
                c[p.index] += 1;
                c[n + 1] += 1;
                unc += usize::from(!p.classified);
            }
            (c, unc)
        })
        .collect();
    let rf = reps as f64;
    let stat = |k: usize| {
        let m = per_rep.iter().map(|c| c.0[k] as f64).sum::<f64>() / rf;
        let v = per_rep.iter().map(|c| (c.0[k] as f64 - m).powi(2)).sum::<f64>() / (rf - 1.0);
        (m, (v / rf).sqrt())
    };
    let (means, ses): (Vec<f64>, Vec<f64>) = (0..=n).map(stat).unzip();
    let (tm, ts) = stat(n + 1);
    Ok(McCrt {
        reps,
        mean_by_index: means,
        se_by_index: ses,
        total_mean: tm,
        total_se: ts,
        unclassified: per_rep.iter().map(|c| c.1).sum(),
        rank: sampler.rank(),
        lattice: sampler.lattice,
        per_rep: per_rep.into_iter().map(|c| c.0).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure_fn::lookup;

    fn lat2() -> Lattice {
        Lattice::new(2, 2.2, 0.05, 0.0).unwrap()
    }

    fn summary(pts: &[CriticalPointRecord]) -> Vec<(Vec<f64>, usize)> {
        pts.iter().map(|p| (p.location.iter().map(|x| (x * 1e3).round() / 1e3).collect(), p.index)).collect()
    }

    #[test]
    fn inverted_paraboloid_has_one_maximum() {
        let s = FieldSample::from_fn(lat2(), |x| 3.0 - (x[0] - 0.7).powi(2) - (x[1] + 0.4).powi(2));
        let pts = count_critical(&s, 0.5, 1.5);
        assert_eq!(summary(&pts), vec![(vec![0.7, -0.4], 2)]);
        assert!(pts[0].refinement_residual < 1e-6);
    }

    #[test]
    fn saddle_and_minimum() {
        let s = FieldSample::from_fn(lat2(), |x| (x[0] - 0.6).powi(2) - (x[1] - 0.6).powi(2));
        assert_eq!(summary(&count_critical(&s, 0.5, 1.5)), vec![(vec![0.6, 0.6], 1)]);
        let s = FieldSample::from_fn(lat2(), |x| (x[0] + 0.9).powi(2) + 2.0 * x[1].powi(2));
        assert_eq!(summary(&count_critical(&s, 0.5, 1.5)), vec![(vec![-0.9, 0.0], 0)]);
    }

    #[test]
    fn cubic_with_two_points() {
        let s = FieldSample::from_fn(lat2(), |x| x[0].powi(3) / 3.0 - x[0] + 0.5 * x[1] * x[1]);
        assert_eq!(summary(&count_critical(&s, 0.5, 1.5)), vec![(vec![-1.0, 0.0], 1), (vec![1.0, 0.0], 0)]);
    }

    #[test]
    fn egg_crate_surface() {
        // saddles at (±π/4, ±π/4), minima at (±π/2, 0) and (0, ±π/2)
        let s = FieldSample::from_fn(lat2(), |x| (2.0 * x[0]).cos() * (2.0 * x[1]).cos());
        let pts = count_critical(&s, 0.5, 2.0);
        let idx: Vec<usize> = pts.iter().map(|p| p.index).collect();
        assert_eq!(pts.len(), 8);
        assert_eq!(idx.iter().filter(|&&k| k == 1).count(), 4);
        assert_eq!(idx.iter().filter(|&&k| k == 0).count(), 4);
        for p in &pts {
            let r = p.location[0].hypot(p.location[1]);
            assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-3 || (r - std::f64::consts::PI / 8f64.sqrt()).abs() < 1e-3);
        }
    }

    #[test]
    fn one_dimensional_sine() {
        let l = Lattice::new(1, 2.0, 0.01, 0.0).unwrap();
        let s = FieldSample::from_fn(l, |x| (3.0 * x[0]).sin());
        let pts = count_critical(&s, 0.5, 1.5);
        let got: Vec<(f64, usize)> = pts.iter().map(|p| ((p.location[0] * 1e4).round() / 1e4, p.index)).collect();
        let a = (std::f64::consts::PI / 6.0 * 1e4).round() / 1e4;
        assert_eq!(got, vec![(-a, 0), (a, 1)]);
    }

    #[test]
    fn pinned_origin_and_variance() {
        let f = lookup("exp1").unwrap();
        let lat = Lattice::new(2, 1.0, 0.125, 0.0).unwrap();
        let s = FieldSampler::new(&f, lat).unwrap();
        let origin = lat.len() / 2;
        assert_eq!(lat.local(origin), [0.0, 0.0]);
        let unit = (0..lat.len()).find(|&i| lat.local(i) == [1.0, 0.0]).unwrap();
        let mut w = crate::stats::Welford::default();
        for rep in 0..2000 {
            let v = s.sample(&mut RngStream::for_purpose(5, Purpose::Field, rep));
            assert_eq!(v.values[origin], 0.0);
            w.push(v.values[unit] * v.values[unit]);
        }
        let want = f.eval(1.0, 0).unwrap();
        assert!(w.check("var", want).z() < 5.0, "{} vs {want}", w.mean());
    }

    #[test]
    fn coarse_lattice_is_rejected() {
        let f = lookup("exp1").unwrap();
        assert!(FieldSampler::new(&f, Lattice::new(2, 1.0, 0.25, 0.0).unwrap()).is_err());
    }

    #[test]
    fn empty_value_set_counts_nothing() {
        let f = lookup("exp1").unwrap();
        let o = SimOptions { h: 0.125, seed: 3, angle: 0.0 };
        let r = mc_crt(&f, 2, 0.5, 1.5, &ValueSet::empty(), 4, &o).unwrap();
        assert_eq!(r.total_mean, 0.0);
    }
}
