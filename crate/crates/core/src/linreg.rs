//! Dense least squares for small designs (a handful of columns, a few thousand rows).
//!
//! No intercept is ever added: every regression in this crate is through the
//! origin, and R² inside the variance inflation factor is uncentred.
//!
//! Normal equations are solved by Cholesky factorisation of the Jacobi-scaled
//! cross-product matrix. When the pivots indicate a reciprocal condition number
//! at or below [`RCOND_LIMIT`] the fit falls back to Householder QR on the
//! columns themselves.

use serde::{Deserialize, Serialize};

use crate::error::{HegyError, Result};

/// Reciprocal condition limit for the cross-product matrix.
pub const RCOND_LIMIT: f64 = 1e-12;

/// Column pivots smaller than this (relative) make the QR fallback give up.
const QR_RANK_TOL: f64 = 1e-10;

/// Residual sums of squares below this fraction of `y'y` are an exact fit.
const EXACT_FIT_TOL: f64 = 64.0 * 64.0 * f64::EPSILON * f64::EPSILON;

/// R² at or above `1 - VIF_SATURATION` is reported as an infinite VIF.
const VIF_SATURATION: f64 = 1e-12;

/// Named regressors of common length.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    nrows: usize,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl DesignMatrix {
    /// Empty design with `nrows` observations.
    pub fn with_rows(nrows: usize) -> Self {
        Self {
            nrows,
            names: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn from_columns<S: Into<String>>(columns: Vec<(S, Vec<f64>)>) -> Result<Self> {
        let nrows = columns.first().map_or(0, |(_, c)| c.len());
        let mut x = Self::with_rows(nrows);
        for (name, col) in columns {
            x.push(name, col)?;
        }
        Ok(x)
    }

    pub fn push<S: Into<String>>(&mut self, name: S, column: Vec<f64>) -> Result<()> {
        let name = name.into();
        if column.len() != self.nrows {
            return Err(HegyError::DimensionMismatch(format!(
                "column `{name}` has {} rows, design has {}",
                column.len(),
                self.nrows
            )));
        }
        if self.names.contains(&name) {
            return Err(HegyError::DimensionMismatch(format!(
                "duplicate column name `{name}`"
            )));
        }
        self.names.push(name);
        self.columns.push(column);
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column_by_name(&self, name: &str) -> Result<&[f64]> {
        self.index_of(name)
            .map(|j| self.column(j))
            .ok_or_else(|| HegyError::UnknownColumn(name.to_string()))
    }

    /// Names of columns that are identically zero.
    pub fn zero_columns(&self) -> Vec<&str> {
        self.names
            .iter()
            .zip(&self.columns)
            .filter(|(_, c)| c.iter().all(|&x| x == 0.0))
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// Copy of the design without the named columns.
    pub fn without(&self, drop: &[&str]) -> Result<Self> {
        for d in drop {
            if self.index_of(d).is_none() {
                return Err(HegyError::UnknownColumn(d.to_string()));
            }
        }
        let mut out = Self::with_rows(self.nrows);
        for (n, c) in self.names.iter().zip(&self.columns) {
            if !drop.contains(&n.as_str()) {
                out.names.push(n.clone());
                out.columns.push(c.clone());
            }
        }
        Ok(out)
    }

    fn remove(&mut self, j: usize) -> String {
        self.columns.remove(j);
        self.names.remove(j)
    }
}

/// Result of an OLS fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    /// Retained column names, in design order.
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `rss / (n - p)`.
    pub sigma2: f64,
    /// `sigma2 (X'X)^{-1}`, row-major `p x p`.
    pub coef_cov: Vec<f64>,
    pub rss: f64,
    pub nobs: usize,
    /// `(X'X)^{-1}`, kept so Wald statistics work even when `sigma2` is zero.
    xtx_inv: Vec<f64>,
}

impl RegressionFit {
    pub fn ncoef(&self) -> usize {
        self.coefficients.len()
    }

    pub fn df_resid(&self) -> usize {
        self.nobs - self.ncoef()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coefficient(&self, name: &str) -> Result<f64> {
        self.index_of(name)
            .map(|i| self.coefficients[i])
            .ok_or_else(|| HegyError::UnknownColumn(name.to_string()))
    }

    pub fn cov(&self, i: usize, j: usize) -> f64 {
        self.coef_cov[i * self.ncoef() + j]
    }
}

/// Ordinary least squares of `y` on the columns of `x`.
pub fn ols_fit(x: &DesignMatrix, y: &[f64]) -> Result<RegressionFit> {
    let n = x.nrows();
    let p = x.ncols();
    if y.len() != n {
        return Err(HegyError::DimensionMismatch(format!(
            "response has {} rows, design has {n}",
            y.len()
        )));
    }
    if n <= p {
        return Err(HegyError::DimensionMismatch(format!(
            "{n} observations cannot identify {p} coefficients"
        )));
    }
    if let Some(z) = x.zero_columns().first() {
        return Err(HegyError::SingularDesign(format!(
            "column `{z}` is all zeros"
        )));
    }
    let cols: Vec<&[f64]> = x.columns.iter().map(Vec::as_slice).collect();
    let yy = dot(y, y);
    let (g, c) = cross_products(&cols, y);
    let (beta, inv) = match normal_equations(&g, &c, p) {
        Some(s) => (s.beta, s.inv),
        None => qr_least_squares(&cols, y).ok_or_else(|| {
            HegyError::SingularDesign(format!("rank deficient among {:?}", x.names()))
        })?,
    };
    let mut residuals = y.to_vec();
    for (b, col) in beta.iter().zip(&cols) {
        for (r, v) in residuals.iter_mut().zip(col.iter()) {
            *r -= b * v;
        }
    }
    let mut rss = dot(&residuals, &residuals);
    if rss <= EXACT_FIT_TOL * yy {
        residuals.iter_mut().for_each(|r| *r = 0.0);
        rss = 0.0;
    }
    let sigma2 = rss / (n - p) as f64;
    Ok(RegressionFit {
        names: x.names().to_vec(),
        coefficients: beta,
        residuals,
        sigma2,
        coef_cov: inv.iter().map(|v| v * sigma2).collect(),
        rss,
        nobs: n,
        xtx_inv: inv,
    })
}

/// Coefficient divided by its standard error.
pub fn t_statistic(fit: &RegressionFit, name: &str) -> Result<f64> {
    let i = fit
        .index_of(name)
        .ok_or_else(|| HegyError::UnknownColumn(name.to_string()))?;
    t_ratio(fit.coefficients[i], fit.cov(i, i), name)
}

fn t_ratio(coef: f64, var: f64, name: &str) -> Result<f64> {
    if var <= 0.0 || !var.is_finite() {
        return Err(HegyError::ZeroVariance(name.to_string()));
    }
    Ok(coef / var.sqrt())
}

/// F statistic for `coef[restricted] = 0`.
///
/// Evaluated in Wald form `b_R' [(X'X)^{-1}]_RR^{-1} b_R / (q sigma2)`, which for
/// least squares equals `((RSS_r - RSS_u) / q) / (RSS_u / (n - p))` without refitting.
pub fn f_statistic(fit: &RegressionFit, restricted: &[&str]) -> Result<f64> {
    let idx = restricted
        .iter()
        .map(|n| {
            fit.index_of(n)
                .ok_or_else(|| HegyError::UnknownColumn(n.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    if idx.is_empty() {
        return Err(HegyError::Configuration(
            "an F test needs at least one restricted coefficient".into(),
        ));
    }
    if fit.rss <= 0.0 {
        return Err(HegyError::ZeroResidualVariance);
    }
    wald_f(
        &fit.coefficients,
        &fit.xtx_inv,
        fit.ncoef(),
        fit.sigma2,
        &idx,
    )
    .ok_or_else(|| HegyError::SingularDesign("restricted block not invertible".into()))
}

/// F statistic computed literally, by refitting without the restricted columns.
pub fn f_statistic_by_refit(
    fit: &RegressionFit,
    x: &DesignMatrix,
    y: &[f64],
    restricted: &[&str],
) -> Result<f64> {
    if restricted.is_empty() {
        return Err(HegyError::Configuration(
            "an F test needs at least one restricted coefficient".into(),
        ));
    }
    if fit.rss <= 0.0 {
        return Err(HegyError::ZeroResidualVariance);
    }
    let reduced = x.without(restricted)?;
    let rss_r = if reduced.ncols() == 0 {
        dot(y, y)
    } else {
        ols_fit(&reduced, y)?.rss
    };
    let q = restricted.len() as f64;
    Ok((((rss_r - fit.rss) / q) / fit.sigma2).max(0.0))
}

pub(crate) fn wald_f(
    beta: &[f64],
    inv: &[f64],
    p: usize,
    sigma2: f64,
    idx: &[usize],
) -> Option<f64> {
    let q = idx.len();
    let mut sub = vec![0.0; q * q];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            sub[a * q + b] = inv[i * p + j];
        }
    }
    let rhs: Vec<f64> = idx.iter().map(|&i| beta[i]).collect();
    cholesky(&mut sub, q).ok()?;
    let z = chol_solve(&sub, q, &rhs);
    let quad = dot(&rhs, &z);
    Some((quad / (q as f64 * sigma2)).max(0.0))
}

/// Variance inflation factor of `name`: `1 / (1 - R²)` from the uncentred
/// regression of that column on all others. `+inf` when R² saturates.
pub fn vif(x: &DesignMatrix, name: &str) -> Result<f64> {
    let j = x
        .index_of(name)
        .ok_or_else(|| HegyError::UnknownColumn(name.to_string()))?;
    if x.ncols() < 2 {
        return Err(HegyError::Configuration(
            "variance inflation needs at least two columns".into(),
        ));
    }
    Ok(vif_at(x, j))
}

fn vif_at(x: &DesignMatrix, j: usize) -> f64 {
    let target = x.column(j);
    let tss = dot(target, target);
    if tss == 0.0 {
        return f64::INFINITY;
    }
    let others: Vec<&[f64]> = (0..x.ncols())
        .filter(|&i| i != j)
        .map(|i| x.column(i))
        .collect();
    let rss = projection_residual_ss(&others, target);
    let r2 = 1.0 - rss / tss;
    if r2 >= 1.0 - VIF_SATURATION {
        f64::INFINITY
    } else {
        1.0 / (1.0 - r2)
    }
}

/// Residual sum of squares of `target` after projecting on the span of `basis`,
/// by modified Gram-Schmidt with reorthogonalisation. Dependent basis columns
/// are skipped, so the span may have lower rank than `basis.len()`.
fn projection_residual_ss(basis: &[&[f64]], target: &[f64]) -> f64 {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for col in basis {
        let norm0 = dot(col, col).sqrt();
        if norm0 == 0.0 {
            continue;
        }
        let mut v = col.to_vec();
        for _ in 0..2 {
            for e in &q {
                let h = dot(e, &v);
                v.iter_mut().zip(e).for_each(|(a, b)| *a -= h * b);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-10 * norm0 {
            v.iter_mut().for_each(|a| *a /= norm);
            q.push(v);
        }
    }
    let mut r = target.to_vec();
    for _ in 0..2 {
        for e in &q {
            let h = dot(e, &r);
            r.iter_mut().zip(e).for_each(|(a, b)| *a -= h * b);
        }
    }
    dot(&r, &r)
}

/// Design after VIF pruning, with the removal log.
#[derive(Debug, Clone, PartialEq)]
pub struct VifPruneOutcome {
    pub design: DesignMatrix,
    /// `(column, vif at removal)` in removal order.
    pub removed: Vec<(String, f64)>,
}

/// Repeatedly drops the removable column with the largest VIF while it exceeds
/// `threshold`. Columns in `protected` take part in every VIF computation but are
/// never removed. Ties (within 1e-12) go to the larger column index.
pub fn stepwise_vif_prune(
    x: &DesignMatrix,
    threshold: f64,
    protected: &[&str],
) -> Result<VifPruneOutcome> {
    if threshold.is_nan() || threshold <= 1.0 {
        return Err(HegyError::Configuration(format!(
            "VIF threshold must exceed 1, got {threshold}"
        )));
    }
    if x.ncols() == 0 {
        return Err(HegyError::AllColumnsRemoved);
    }
    let mut design = x.clone();
    let mut removed = Vec::new();
    while design.ncols() >= 2 {
        let mut worst: Option<(usize, f64)> = None;
        for j in 0..design.ncols() {
            if protected.contains(&design.names[j].as_str()) {
                continue;
            }
            let v = vif_at(&design, j);
            worst = match worst {
                Some((_, w)) if !ties_or_exceeds(v, w) => worst,
                _ => Some((j, v)),
            };
        }
        match worst {
            Some((j, v)) if v > threshold => {
                let name = design.remove(j);
                removed.push((name, v));
            }
            _ => break,
        }
    }
    if design.ncols() == 0 {
        return Err(HegyError::AllColumnsRemoved);
    }
    Ok(VifPruneOutcome { design, removed })
}

/// `a >= b` with a 1e-12 relative tie band; infinities tie with each other.
fn ties_or_exceeds(a: f64, b: f64) -> bool {
    if b.is_infinite() {
        return a.is_infinite();
    }
    a >= b || (b - a).abs() <= 1e-12 * b.abs().max(1.0)
}

/// Final fit of a t-statistic pruning pass and its log.
#[derive(Debug, Clone, PartialEq)]
pub struct TPruneOutcome {
    pub fit: RegressionFit,
    pub design: DesignMatrix,
    /// `(column, |t| at removal)` in removal order.
    pub removed: Vec<(String, f64)>,
    /// Candidates whose t statistic could not be evaluated; they are kept.
    pub zero_variance_kept: Vec<String>,
}

/// Refits after dropping, one at a time, the candidate with the smallest `|t|`
/// while that value is below `t_threshold`. Non-candidate columns are never
/// removed. Ties go to the larger column index.
pub fn stepwise_t_prune(
    x: &DesignMatrix,
    y: &[f64],
    candidates: &[&str],
    t_threshold: f64,
) -> Result<TPruneOutcome> {
    for c in candidates {
        if x.index_of(c).is_none() {
            return Err(HegyError::UnknownColumn(c.to_string()));
        }
    }
    let mut design = x.clone();
    let mut removed = Vec::new();
    let mut zero_variance_kept = Vec::new();
    loop {
        let fit = ols_fit(&design, y)?;
        let mut weakest: Option<(usize, f64)> = None;
        for (j, name) in design.names.iter().enumerate() {
            if !candidates.contains(&name.as_str()) {
                continue;
            }
            match t_statistic(&fit, name) {
                Ok(t) => {
                    let a = t.abs();
                    if weakest.is_none_or(|(_, w)| a <= w) {
                        weakest = Some((j, a));
                    }
                }
                Err(HegyError::ZeroVariance(n)) => {
                    if !zero_variance_kept.contains(&n) {
                        zero_variance_kept.push(n);
                    }
                }
                Err(e) => return Err(e),
            }
        }
        match weakest {
            Some((j, a)) if a < t_threshold => {
                let name = design.remove(j);
                removed.push((name, a));
            }
            _ => {
                return Ok(TPruneOutcome {
                    fit,
                    design,
                    removed,
                    zero_variance_kept,
                })
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Cross-product solver shared with the HEGY fast path.

pub(crate) struct NormalSolution {
    pub beta: Vec<f64>,
    pub inv: Vec<f64>,
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Row-major `X'X` and `X'y`.
pub(crate) fn cross_products(cols: &[&[f64]], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let p = cols.len();
    let mut g = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let v = dot(cols[i], cols[j]);
            g[i * p + j] = v;
            g[j * p + i] = v;
        }
    }
    let c = cols.iter().map(|col| dot(col, y)).collect();
    (g, c)
}

/// Solves `G b = c` by Cholesky after symmetric Jacobi scaling. `None` when a
/// pivot fails or the pivot spread implies `rcond <= RCOND_LIMIT`.
pub(crate) fn normal_equations(g: &[f64], c: &[f64], p: usize) -> Option<NormalSolution> {
    if p == 0 {
        return Some(NormalSolution {
            beta: Vec::new(),
            inv: Vec::new(),
        });
    }
    let mut scale = vec![0.0; p];
    for i in 0..p {
        let d = g[i * p + i];
        if d.is_nan() || d <= 0.0 {
            return None;
        }
        scale[i] = 1.0 / d.sqrt();
    }
    let mut a = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            a[i * p + j] = g[i * p + j] * (scale[i] * scale[j]);
        }
    }
    cholesky(&mut a, p).ok()?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for i in 0..p {
        let d = a[i * p + i];
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if (lo / hi).powi(2) <= RCOND_LIMIT {
        return None;
    }
    let cs: Vec<f64> = c.iter().zip(&scale).map(|(v, s)| v * s).collect();
    let bs = chol_solve(&a, p, &cs);
    let beta = bs.iter().zip(&scale).map(|(b, s)| b * s).collect();
    let inv_s = chol_inverse(&a, p);
    let mut inv = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            inv[i * p + j] = inv_s[i * p + j] * (scale[i] * scale[j]);
        }
    }
    Some(NormalSolution { beta, inv })
}

/// In-place lower Cholesky factor (upper triangle left untouched).
pub(crate) fn cholesky(a: &mut [f64], p: usize) -> std::result::Result<(), ()> {
    for j in 0..p {
        let mut d = a[j * p + j];
        for k in 0..j {
            d -= a[j * p + k] * a[j * p + k];
        }
        if d.is_nan() || d <= 0.0 {
            return Err(());
        }
        let d = d.sqrt();
        a[j * p + j] = d;
        for i in j + 1..p {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= a[i * p + k] * a[j * p + k];
            }
            a[i * p + j] = s / d;
        }
    }
    Ok(())
}

pub(crate) fn chol_solve(l: &[f64], p: usize, b: &[f64]) -> Vec<f64> {
    let mut z = b.to_vec();
    for i in 0..p {
        let mut s = z[i];
        for k in 0..i {
            s -= l[i * p + k] * z[k];
        }
        z[i] = s / l[i * p + i];
    }
    for i in (0..p).rev() {
        let mut s = z[i];
        for k in i + 1..p {
            s -= l[k * p + i] * z[k];
        }
        z[i] = s / l[i * p + i];
    }
    z
}

fn chol_inverse(l: &[f64], p: usize) -> Vec<f64> {
    let mut inv = vec![0.0; p * p];
    let mut e = vec![0.0; p];
    for j in 0..p {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let col = chol_solve(l, p, &e);
        for i in 0..p {
            inv[i * p + j] = col[i];
        }
    }
    // symmetrise rounding noise
    for i in 0..p {
        for j in 0..i {
            let m = 0.5 * (inv[i * p + j] + inv[j * p + i]);
            inv[i * p + j] = m;
            inv[j * p + i] = m;
        }
    }
    inv
}

/// Householder QR least squares on column-scaled data. Returns `(beta, (X'X)^{-1})`
/// or `None` for numerical rank deficiency.
pub(crate) fn qr_least_squares(cols: &[&[f64]], y: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let p = cols.len();
    let n = y.len();
    let scale: Vec<f64> = cols
        .iter()
        .map(|c| {
            let s = dot(c, c).sqrt();
            if s > 0.0 {
                1.0 / s
            } else {
                0.0
            }
        })
        .collect();
    // column-major working copy
    let mut a: Vec<Vec<f64>> = cols
        .iter()
        .zip(&scale)
        .map(|(c, s)| c.iter().map(|v| v * s).collect())
        .collect();
    let mut qty = y.to_vec();
    let mut rdiag = vec![0.0; p];
    for k in 0..p {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2 = dot(&v, &v);
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(k) {
                let h = 2.0 * dot(&v, &col[k..]) / vnorm2;
                col[k..].iter_mut().zip(&v).for_each(|(c, vi)| *c -= h * vi);
            }
            let h = 2.0 * dot(&v, &qty[k..]) / vnorm2;
            qty[k..].iter_mut().zip(&v).for_each(|(c, vi)| *c -= h * vi);
        }
        rdiag[k] = a[k][k];
    }
    let rmax = rdiag.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if rdiag.iter().any(|v| v.abs() <= QR_RANK_TOL * rmax) {
        return None;
    }
    // R is upper triangular: R[i][j] = a[j][i] for i <= j
    let r = |i: usize, j: usize| a[j][i];
    let mut bs = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = qty[i];
        for (j, b) in bs.iter().enumerate().skip(i + 1) {
            s -= r(i, j) * b;
        }
        bs[i] = s / r(i, i);
    }
    // R^{-1}, then (R'R)^{-1} = R^{-1} R^{-T}
    let mut rinv = vec![0.0; p * p];
    for j in 0..p {
        rinv[j * p + j] = 1.0 / r(j, j);
        for i in (0..j).rev() {
            let mut s = 0.0;
            for k in i + 1..=j {
                s += r(i, k) * rinv[k * p + j];
            }
            rinv[i * p + j] = -s / r(i, i);
        }
    }
    let mut inv = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            let s: f64 = (i.max(j)..p)
                .map(|k| rinv[i * p + k] * rinv[j * p + k])
                .sum();
            inv[i * p + j] = s * (scale[i] * scale[j]);
        }
    }
    let _ = n;
    let beta = bs.iter().zip(&scale).map(|(b, s)| b * s).collect();
    Some((beta, inv))
}

/// Least squares from precomputed cross products, used in the bootstrap inner
/// loop where the same design is refitted on many column subsets.
pub(crate) struct CrossProductSystem<'a> {
    cols: Vec<&'a [f64]>,
    y: &'a [f64],
    g: Vec<f64>,
    c: Vec<f64>,
    yy: f64,
}

/// Coefficients, inverse cross products and residual variance of a subset fit.
pub(crate) struct SubsetFit {
    pub beta: Vec<f64>,
    pub inv: Vec<f64>,
    pub rss: f64,
    pub sigma2: f64,
}

impl SubsetFit {
    pub fn t(&self, i: usize) -> Option<f64> {
        let var = self.sigma2 * self.inv[i * self.beta.len() + i];
        (var > 0.0 && var.is_finite()).then(|| self.beta[i] / var.sqrt())
    }
}

impl<'a> CrossProductSystem<'a> {
    pub fn new(cols: Vec<&'a [f64]>, y: &'a [f64]) -> Self {
        let (g, c) = cross_products(&cols, y);
        let yy = dot(y, y);
        Self { cols, y, g, c, yy }
    }

    pub fn nobs(&self) -> usize {
        self.y.len()
    }

    pub fn fit(&self, subset: &[usize]) -> Result<SubsetFit> {
        let p_all = self.cols.len();
        let p = subset.len();
        let n = self.nobs();
        if n <= p {
            return Err(HegyError::DimensionMismatch(format!(
                "{n} observations cannot identify {p} coefficients"
            )));
        }
        let mut g = vec![0.0; p * p];
        for (a, &i) in subset.iter().enumerate() {
            for (b, &j) in subset.iter().enumerate() {
                g[a * p + b] = self.g[i * p_all + j];
            }
        }
        let c: Vec<f64> = subset.iter().map(|&i| self.c[i]).collect();
        let (beta, inv, mut rss) = match normal_equations(&g, &c, p) {
            Some(s) => {
                let rss = (self.yy - dot(&s.beta, &c)).max(0.0);
                (s.beta, s.inv, rss)
            }
            None => {
                let cols: Vec<&[f64]> = subset.iter().map(|&i| self.cols[i]).collect();
                let (beta, inv) = qr_least_squares(&cols, self.y).ok_or_else(|| {
                    HegyError::SingularDesign(format!("rank deficient subset {subset:?}"))
                })?;
                let mut ss = 0.0;
                for t in 0..n {
                    let fitted: f64 = beta.iter().zip(&cols).map(|(b, col)| b * col[t]).sum();
                    let r = self.y[t] - fitted;
                    ss += r * r;
                }
                (beta, inv, ss)
            }
        };
        if rss <= EXACT_FIT_TOL * self.yy {
            rss = 0.0;
        }
        Ok(SubsetFit {
            sigma2: rss / (n - p) as f64,
            beta,
            inv,
            rss,
        })
    }
}
