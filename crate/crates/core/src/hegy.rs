//! HEGY regressions: the pooled test regression (augmented or not) and the
//! season-by-season periodic regression that drives both bootstraps.
//!
//! The pooled regression is
//!
//! ```text
//! (1 - L^4) y_t = sum_j pi_j Y_{j,t-1} + sum_{i<=k} phi_i (1 - L^4) y_{t-i} + e_t
//! ```
//!
//! over `t = k + 5 ..= n` with no deterministic terms. The periodic regression
//! uses the same window, split by season, with its own coefficients per season.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{HegyError, Result};
use crate::linreg::{
    ols_fit, stepwise_t_prune, stepwise_vif_prune, wald_f, CrossProductSystem, DesignMatrix,
};
use crate::series::{hegy_channels, QuarterlySeries};

/// Lag columns whose `|t|` falls below this are pruned.
pub const DEFAULT_T_THRESHOLD: f64 = 1.65;
/// Regressors whose VIF exceeds this are pruned from the periodic regression.
pub const DEFAULT_VIF_THRESHOLD: f64 = 10.0;
/// Default maximal augmentation order.
pub const DEFAULT_K_MAX: usize = 4;

pub const PI_NAMES: [&str; 4] = ["pi1", "pi2", "pi3", "pi4"];

pub fn lag_name(i: usize) -> String {
    format!("lag{i}")
}

/// Null hypotheses: which of `pi_1..pi_4` are zero in every season.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    #[serde(rename = "1")]
    Root1,
    #[serde(rename = "2")]
    Root2,
    #[serde(rename = "1,2")]
    Roots12,
    #[serde(rename = "3,4")]
    Roots34,
    #[serde(rename = "1,3,4")]
    Roots134,
    #[serde(rename = "2,3,4")]
    Roots234,
    #[serde(rename = "1,2,3,4")]
    Roots1234,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 7] = [
        Hypothesis::Root1,
        Hypothesis::Root2,
        Hypothesis::Roots12,
        Hypothesis::Roots34,
        Hypothesis::Roots134,
        Hypothesis::Roots234,
        Hypothesis::Roots1234,
    ];

    /// 1-based indices `j` of the restricted `pi_j`.
    pub fn root_set(self) -> &'static [usize] {
        match self {
            Hypothesis::Root1 => &[1],
            Hypothesis::Root2 => &[2],
            Hypothesis::Roots12 => &[1, 2],
            Hypothesis::Roots34 => &[3, 4],
            Hypothesis::Roots134 => &[1, 3, 4],
            Hypothesis::Roots234 => &[2, 3, 4],
            Hypothesis::Roots1234 => &[1, 2, 3, 4],
        }
    }

    pub fn from_root_set(set: &[usize]) -> Option<Self> {
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        Self::ALL.into_iter().find(|h| h.root_set() == s.as_slice())
    }

    pub fn is_single_root(self) -> bool {
        matches!(self, Hypothesis::Root1 | Hypothesis::Root2)
    }

    pub fn label(self) -> &'static str {
        match self {
            Hypothesis::Root1 => "1",
            Hypothesis::Root2 => "2",
            Hypothesis::Roots12 => "1,2",
            Hypothesis::Roots34 => "3,4",
            Hypothesis::Roots134 => "1,3,4",
            Hypothesis::Roots234 => "2,3,4",
            Hypothesis::Roots1234 => "1,2,3,4",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Hypothesis {
    type Err = HegyError;

    /// Accepts `1`, `3,4`, `34`, `{1,3,4}` and similar spellings.
    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<usize> = s
            .chars()
            .filter(|c| !matches!(c, ',' | ' ' | '{' | '}'))
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| HegyError::Configuration(format!("invalid hypothesis `{s}`")))
            })
            .collect::<Result<_>>()?;
        Self::from_root_set(&digits).ok_or_else(|| {
            HegyError::Configuration(format!(
                "`{s}` is not one of 1, 2, 1,2, 3,4, 1,3,4, 2,3,4, 1,2,3,4"
            ))
        })
    }
}

/// Statistic used for the single-root hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SingleRootStatistic {
    #[default]
    T,
    Pi,
}

/// A scalar test statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statistic {
    /// `t_j`
    T(u8),
    /// `pi_hat_j`
    Pi(u8),
    /// `F` for a joint hypothesis.
    F(Hypothesis),
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::T(j) => write!(f, "t{j}"),
            Statistic::Pi(j) => write!(f, "pi{j}"),
            Statistic::F(h) => write!(f, "F{{{}}}", h.label()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Left,
    Right,
}

/// Which statistic a hypothesis is decided on, and in which tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRule {
    pub statistic: Statistic,
    pub tail: Tail,
}

/// Single roots reject for small `t_j` (or `pi_hat_j`); joint hypotheses reject
/// for large `F`.
pub fn null_directions(h: Hypothesis, single: SingleRootStatistic) -> DecisionRule {
    match h {
        Hypothesis::Root1 | Hypothesis::Root2 => {
            let j = h.root_set()[0] as u8;
            DecisionRule {
                statistic: match single {
                    SingleRootStatistic::T => Statistic::T(j),
                    SingleRootStatistic::Pi => Statistic::Pi(j),
                },
                tail: Tail::Left,
            }
        }
        _ => DecisionRule {
            statistic: Statistic::F(h),
            tail: Tail::Right,
        },
    }
}

/// F statistics of the five joint hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FStatistics {
    pub f12: f64,
    pub f34: f64,
    pub f134: f64,
    pub f234: f64,
    pub f1234: f64,
}

impl FStatistics {
    pub fn get(&self, h: Hypothesis) -> Option<f64> {
        match h {
            Hypothesis::Roots12 => Some(self.f12),
            Hypothesis::Roots34 => Some(self.f34),
            Hypothesis::Roots134 => Some(self.f134),
            Hypothesis::Roots234 => Some(self.f234),
            Hypothesis::Roots1234 => Some(self.f1234),
            _ => None,
        }
    }
}

/// Statistic bundle of one pooled HEGY regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HegyStatistics {
    pub pi_hat: [f64; 4],
    pub t: [f64; 4],
    pub f: FStatistics,
    /// Maximal augmentation order the regression was built with.
    pub k_used: usize,
    /// Lags (1-based) still in the regression after pruning.
    pub retained_lags: Vec<usize>,
    pub nobs: usize,
}

impl HegyStatistics {
    pub fn value(&self, s: Statistic) -> f64 {
        match s {
            Statistic::T(j) => self.t[j as usize - 1],
            Statistic::Pi(j) => self.pi_hat[j as usize - 1],
            Statistic::F(h) => self
                .f
                .get(h)
                .expect("F statistics exist only for joint hypotheses"),
        }
    }
}

fn require_test_length(y: &QuarterlySeries, needed: usize) -> Result<()> {
    y.require_full_years()?;
    if y.len() < needed {
        return Err(HegyError::SeriesTooShort {
            needed,
            got: y.len(),
        });
    }
    Ok(())
}

/// Regressand and regressor columns over `t = k + 5 ..= n`: `[Y1..Y4 lagged, lag1..lagk]`.
fn regression_columns(y: &[f64], k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = y.len();
    let start = k + 4; // 0-based index of t = k + 5
    let rows = n - start;
    let mut dep = Vec::with_capacity(rows);
    let mut cols: Vec<Vec<f64>> = (0..4 + k).map(|_| Vec::with_capacity(rows)).collect();
    for t in start..n {
        dep.push(y[t] - y[t - 4]);
        let ch = hegy_channels(y[t - 1], y[t - 2], y[t - 3], y[t - 4]);
        for j in 0..4 {
            cols[j].push(ch[j]);
        }
        for i in 1..=k {
            cols[3 + i].push(y[t - i] - y[t - i - 4]);
        }
    }
    (dep, cols)
}

/// Augmented HEGY regression with `k` lags of the seasonal difference; with
/// `prune`, lags are dropped one at a time while `|t| < 1.65`.
pub fn augmented_hegy(y: &QuarterlySeries, k: usize, prune: bool) -> Result<HegyStatistics> {
    pooled_hegy(y, k, prune.then_some(DEFAULT_T_THRESHOLD))
}

/// The four-regressor HEGY regression without augmentation.
pub fn unaugmented_hegy(y: &QuarterlySeries) -> Result<HegyStatistics> {
    pooled_hegy(y, 0, None)
}

/// Pooled HEGY regression with an explicit pruning threshold.
pub fn pooled_hegy(
    y: &QuarterlySeries,
    k: usize,
    t_threshold: Option<f64>,
) -> Result<HegyStatistics> {
    require_test_length(y, 4 * (k + 6))?;
    let (dep, cols) = regression_columns(y.values(), k);
    let sys = CrossProductSystem::new(cols.iter().map(Vec::as_slice).collect(), &dep);
    let mut subset: Vec<usize> = (0..4 + k).collect();
    let fit = loop {
        let fit = sys.fit(&subset)?;
        let Some(threshold) = t_threshold else {
            break fit;
        };
        let mut weakest: Option<(usize, f64)> = None;
        for (pos, &col) in subset.iter().enumerate().skip(4) {
            let _ = col;
            if let Some(t) = fit.t(pos) {
                if weakest.is_none_or(|(_, w)| t.abs() <= w) {
                    weakest = Some((pos, t.abs()));
                }
            }
        }
        match weakest {
            Some((pos, a)) if a < threshold => {
                subset.remove(pos);
            }
            _ => break fit,
        }
    };
    if fit.rss <= 0.0 {
        return Err(HegyError::ZeroResidualVariance);
    }
    let mut t = [0.0; 4];
    for (j, tj) in t.iter_mut().enumerate() {
        *tj = fit
            .t(j)
            .ok_or_else(|| HegyError::ZeroVariance(PI_NAMES[j].to_string()))?;
    }
    let p = subset.len();
    let f = |idx: &[usize]| {
        wald_f(&fit.beta, &fit.inv, p, fit.sigma2, idx)
            .ok_or_else(|| HegyError::SingularDesign("HEGY block not invertible".into()))
    };
    Ok(HegyStatistics {
        pi_hat: [fit.beta[0], fit.beta[1], fit.beta[2], fit.beta[3]],
        t,
        f: FStatistics {
            f12: f(&[0, 1])?,
            f34: f(&[2, 3])?,
            f134: f(&[0, 2, 3])?,
            f234: f(&[1, 2, 3])?,
            f1234: f(&[0, 1, 2, 3])?,
        },
        k_used: k,
        retained_lags: subset[4..].iter().map(|&c| c - 3).collect(),
        nobs: dep.len(),
    })
}

/// Pooled HEGY design as a named matrix, for inspection and cross-checks.
pub fn hegy_design(y: &QuarterlySeries, k: usize) -> Result<(DesignMatrix, Vec<f64>)> {
    require_test_length(y, 4 * (k + 6))?;
    let (dep, cols) = regression_columns(y.values(), k);
    let mut x = DesignMatrix::with_rows(dep.len());
    for (j, col) in cols.into_iter().enumerate() {
        let name = if j < 4 {
            PI_NAMES[j].to_string()
        } else {
            lag_name(j - 3)
        };
        x.push(name, col)?;
    }
    Ok((x, dep))
}

/// Settings of the season-by-season regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalRegressionOptions {
    pub k: usize,
    pub augmented: bool,
    /// `None` disables VIF pruning.
    pub vif_threshold: Option<f64>,
    /// `None` disables lag pruning.
    pub t_threshold: Option<f64>,
    /// `pi_j` indices (1-based) exempt from VIF removal.
    pub protected: Vec<usize>,
}

impl SeasonalRegressionOptions {
    /// Periodic regression feeding the seasonal iid bootstrap.
    pub fn augmented(k: usize, protected: &[usize]) -> Self {
        Self {
            k,
            augmented: true,
            vif_threshold: Some(DEFAULT_VIF_THRESHOLD),
            t_threshold: Some(DEFAULT_T_THRESHOLD),
            protected: protected.to_vec(),
        }
    }

    /// Periodic regression feeding the seasonal block bootstrap.
    pub fn unaugmented() -> Self {
        Self {
            k: 0,
            augmented: false,
            vif_threshold: None,
            t_threshold: None,
            protected: Vec::new(),
        }
    }

    fn lags(&self) -> usize {
        if self.augmented {
            self.k
        } else {
            0
        }
    }
}

/// Pruning record of one season's regression.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeasonLog {
    pub vif_removed: Vec<(String, f64)>,
    pub t_removed: Vec<(String, f64)>,
    pub zero_variance_kept: Vec<String>,
    pub retained: Vec<String>,
}

/// One coefficient clipped to zero by [`truncate_pi`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationEvent {
    pub season: u8,
    pub j: u8,
    pub original: f64,
}

/// Season-by-season coefficients and residuals. Arrays are indexed by `season - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalFit {
    /// `pi[s][j - 1]`; removed regressors are zero.
    pub pi: [[f64; 4]; 4],
    /// `phi[s][i - 1]`, `i = 1..=k`; empty when unaugmented.
    pub phi: [Vec<f64>; 4],
    /// Residuals of each season in time order.
    pub residuals: [Vec<f64>; 4],
    /// 1-based time index of every residual.
    pub times: [Vec<usize>; 4],
    pub logs: [SeasonLog; 4],
    pub truncations: Vec<TruncationEvent>,
    pub k: usize,
    /// First 1-based index of the regression window.
    pub window_start: usize,
    pub series_len: usize,
    pub start_season: u8,
}

impl SeasonalFit {
    pub fn residual_counts(&self) -> [usize; 4] {
        std::array::from_fn(|s| self.residuals[s].len())
    }

    /// Residuals interleaved back into time order over the regression window.
    pub fn residual_series(&self) -> Vec<f64> {
        let len = self.series_len + 1 - self.window_start;
        let mut out = vec![0.0; len];
        for s in 0..4 {
            for (t, e) in self.times[s].iter().zip(&self.residuals[s]) {
                out[t - self.window_start] = *e;
            }
        }
        out
    }

    /// Sets `pi_{j,s} = 0` for every `j` in the hypothesis and every season.
    pub fn impose_null(&self, h: Hypothesis) -> SeasonalFit {
        let mut out = self.clone();
        for row in out.pi.iter_mut() {
            for &j in h.root_set() {
                row[j - 1] = 0.0;
            }
        }
        out
    }
}

/// Fits the periodic regression of `(1 - L^4) y_t` on `Y_{j,t-1}` and, when
/// augmented, `(1 - L^4) y_{t-i}`, separately for each season.
///
/// Each season goes through VIF pruning (lags and non-protected `pi` columns) and
/// then t pruning of the lag columns; dropped coefficients are reported as zero.
pub fn seasonal_regression(
    y: &QuarterlySeries,
    opts: &SeasonalRegressionOptions,
) -> Result<SeasonalFit> {
    let k = opts.lags();
    let n = y.len();
    let window_start = k + 5;
    let ncols = 4 + k;
    // every season needs more rows than regressors plus one
    let per_season_min = ncols + 2;
    let needed = window_start - 1 + 4 * per_season_min;
    if n < needed {
        return Err(HegyError::SeriesTooShort { needed, got: n });
    }
    let (dep, cols) = regression_columns(y.values(), k);
    let names: Vec<String> = (0..ncols)
        .map(|j| {
            if j < 4 {
                PI_NAMES[j].to_string()
            } else {
                lag_name(j - 3)
            }
        })
        .collect();
    let protected: Vec<&str> = opts.protected.iter().map(|&j| PI_NAMES[j - 1]).collect();

    let mut pi = [[0.0; 4]; 4];
    let mut phi: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; k]);
    let mut residuals: [Vec<f64>; 4] = Default::default();
    let mut times: [Vec<usize>; 4] = Default::default();
    let mut logs: [SeasonLog; 4] = Default::default();

    for season in 1..=4u8 {
        let s = season as usize - 1;
        let rows: Vec<usize> = (0..dep.len())
            .filter(|&r| y.season_of(window_start + r) == season)
            .collect();
        let ys: Vec<f64> = rows.iter().map(|&r| dep[r]).collect();
        let mut x = DesignMatrix::with_rows(rows.len());
        for (name, col) in names.iter().zip(&cols) {
            x.push(name.clone(), rows.iter().map(|&r| col[r]).collect())?;
        }
        let log = &mut logs[s];
        if let Some(threshold) = opts.vif_threshold {
            let out = stepwise_vif_prune(&x, threshold, &protected).map_err(|e| match e {
                HegyError::AllColumnsRemoved => HegyError::Configuration(format!(
                    "VIF pruning emptied the season {season} regression"
                )),
                e => e,
            })?;
            x = out.design;
            log.vif_removed = out.removed;
        }
        let lag_candidates: Vec<&str> = x
            .names()
            .iter()
            .filter(|n| n.starts_with("lag"))
            .map(String::as_str)
            .collect();
        let fit = match opts.t_threshold {
            Some(threshold) if !lag_candidates.is_empty() => {
                let out = stepwise_t_prune(&x, &ys, &lag_candidates, threshold)?;
                log.t_removed = out.removed;
                log.zero_variance_kept = out.zero_variance_kept;
                out.fit
            }
            _ => ols_fit(&x, &ys)?,
        };
        for (name, b) in fit.names.iter().zip(&fit.coefficients) {
            let idx = names.iter().position(|n| n == name).expect("known column");
            if idx < 4 {
                pi[s][idx] = *b;
            } else {
                phi[s][idx - 4] = *b;
            }
        }
        log.retained = fit.names.clone();
        residuals[s] = fit.residuals;
        times[s] = rows.iter().map(|&r| window_start + r).collect();
    }
    Ok(SeasonalFit {
        pi,
        phi,
        residuals,
        times,
        logs,
        truncations: Vec::new(),
        k,
        window_start,
        series_len: n,
        start_season: y.start_season(),
    })
}

/// Clips `pi_{j,s}` to `min(0, pi_{j,s})` for `j = 1, 2, 3`; `pi_4` is untouched
/// and residuals are not refitted.
pub fn truncate_pi(fit: &SeasonalFit) -> SeasonalFit {
    let mut out = fit.clone();
    for (s, row) in out.pi.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate().take(3) {
            if *v > 0.0 {
                out.truncations.push(TruncationEvent {
                    season: s as u8 + 1,
                    j: j as u8 + 1,
                    original: *v,
                });
                *v = 0.0;
            }
        }
    }
    out
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::linreg::{dot, f_statistic, t_statistic};
    use crate::series::{ar_recursion, LagPolynomial};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn seasonal_walk(rng: &mut ChaCha8Rng, n: usize) -> QuarterlySeries {
        let e: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let y = ar_recursion(&LagPolynomial::monic_binomial(4, 1.0), &e, &[0.0; 4]).unwrap();
        QuarterlySeries::from_values(y).unwrap()
    }

    #[test]
    fn hypothesis_parsing() {
        assert_eq!("1".parse::<Hypothesis>().unwrap(), Hypothesis::Root1);
        assert_eq!("3,4".parse::<Hypothesis>().unwrap(), Hypothesis::Roots34);
        assert_eq!(
            "{1,3,4}".parse::<Hypothesis>().unwrap(),
            Hypothesis::Roots134
        );
        assert_eq!("1234".parse::<Hypothesis>().unwrap(), Hypothesis::Roots1234);
        assert!("3".parse::<Hypothesis>().is_err());
        assert!("1,4".parse::<Hypothesis>().is_err());
        for h in Hypothesis::ALL {
            assert_eq!(h.label().parse::<Hypothesis>().unwrap(), h);
            let rs = h.root_set();
            assert_eq!(rs.contains(&3), rs.contains(&4));
        }
    }

    #[test]
    fn decision_rules() {
        let r = null_directions(Hypothesis::Root1, SingleRootStatistic::T);
        assert_eq!(r.statistic, Statistic::T(1));
        assert_eq!(r.tail, Tail::Left);
        let r = null_directions(Hypothesis::Root2, SingleRootStatistic::Pi);
        assert_eq!(r.statistic, Statistic::Pi(2));
        let r = null_directions(Hypothesis::Roots34, SingleRootStatistic::T);
        assert_eq!(r.statistic, Statistic::F(Hypothesis::Roots34));
        assert_eq!(r.tail, Tail::Right);
        let r = null_directions(Hypothesis::Roots1234, SingleRootStatistic::Pi);
        assert_eq!(r.statistic, Statistic::F(Hypothesis::Roots1234));
        assert_eq!(r.tail, Tail::Right);
    }

    #[test]
    fn unaugmented_is_augmented_with_no_lags() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = seasonal_walk(&mut rng, 80);
        assert_eq!(
            augmented_hegy(&y, 0, false).unwrap(),
            unaugmented_hegy(&y).unwrap()
        );
    }

    #[test]
    fn length_preconditions() {
        let y = QuarterlySeries::from_values(vec![0.5; 22]).unwrap();
        assert!(matches!(
            unaugmented_hegy(&y),
            Err(HegyError::LengthNotMultipleOfFour(22))
        ));
        let y = QuarterlySeries::from_values(vec![0.5; 20]).unwrap();
        assert!(matches!(
            unaugmented_hegy(&y),
            Err(HegyError::SeriesTooShort { needed: 24, .. })
        ));
        let y = QuarterlySeries::from_values(vec![0.5; 36]).unwrap();
        assert!(matches!(
            augmented_hegy(&y, 4, true),
            Err(HegyError::SeriesTooShort { needed: 40, .. })
        ));
    }

    #[test]
    fn pooled_statistics_match_named_regression() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let y = seasonal_walk(&mut rng, 160);
        let stats = augmented_hegy(&y, 3, false).unwrap();
        let (x, dep) = hegy_design(&y, 3).unwrap();
        let fit = ols_fit(&x, &dep).unwrap();
        for j in 0..4 {
            let t = t_statistic(&fit, PI_NAMES[j]).unwrap();
            assert!((stats.t[j] - t).abs() < 1e-9 * t.abs().max(1.0));
            assert!((stats.pi_hat[j] - fit.coefficients[j]).abs() < 1e-10);
        }
        let f = f_statistic(&fit, &["pi3", "pi4"]).unwrap();
        assert!((stats.f.f34 - f).abs() < 1e-9 * f);
        let f = f_statistic(&fit, &PI_NAMES).unwrap();
        assert!((stats.f.f1234 - f).abs() < 1e-9 * f);
        assert_eq!(stats.retained_lags, vec![1, 2, 3]);
        assert_eq!(stats.nobs, 160 - 3 - 4);
    }

    #[test]
    fn pooled_pruning_matches_stepwise_t_prune() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let y = seasonal_walk(&mut rng, 200);
            let stats = augmented_hegy(&y, 4, true).unwrap();
            let (x, dep) = hegy_design(&y, 4).unwrap();
            let out = stepwise_t_prune(&x, &dep, &["lag1", "lag2", "lag3", "lag4"], 1.65).unwrap();
            let kept: Vec<usize> = out
                .fit
                .names
                .iter()
                .filter_map(|n| n.strip_prefix("lag").map(|d| d.parse().unwrap()))
                .collect();
            assert_eq!(stats.retained_lags, kept);
            let t1 = t_statistic(&out.fit, "pi1").unwrap();
            assert!((stats.t[0] - t1).abs() < 1e-9 * t1.abs().max(1.0));
        }
    }

    #[test]
    fn white_noise_rejects_every_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v: Vec<f64> = (0..400).map(|_| rng.sample(StandardNormal)).collect();
        let stats = unaugmented_hegy(&QuarterlySeries::from_values(v).unwrap()).unwrap();
        assert!(stats.t[0] < -8.0 && stats.t[1] < -8.0, "{:?}", stats.t);
        assert!(stats.f.f34 > 30.0 && stats.f.f1234 > 30.0, "{:?}", stats.f);
    }

    #[test]
    fn periodic_fit_without_pruning_matches_per_season_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y = seasonal_walk(&mut rng, 120);
        let fit = seasonal_regression(&y, &SeasonalRegressionOptions::unaugmented()).unwrap();
        let v = y.values();
        for season in 1..=4u8 {
            // independent 4x4 normal equations by Gaussian elimination
            let mut g = [[0.0; 5]; 4];
            for t in 5..=120usize {
                if y.season_of(t) != season {
                    continue;
                }
                let x = hegy_channels(v[t - 2], v[t - 3], v[t - 4], v[t - 5]);
                let d = v[t - 1] - v[t - 5];
                for a in 0..4 {
                    for b in 0..4 {
                        g[a][b] += x[a] * x[b];
                    }
                    g[a][4] += x[a] * d;
                }
            }
            for c in 0..4 {
                let piv = (c..4)
                    .max_by(|&a, &b| g[a][c].abs().total_cmp(&g[b][c].abs()))
                    .unwrap();
                g.swap(c, piv);
                for r in 0..4 {
                    if r != c {
                        let m = g[r][c] / g[c][c];
                        for q in c..5 {
                            g[r][q] -= m * g[c][q];
                        }
                    }
                }
            }
            for j in 0..4 {
                let b = g[j][4] / g[j][j];
                let got = fit.pi[season as usize - 1][j];
                assert!((got - b).abs() < 1e-8 * b.abs().max(1e-3), "{got} vs {b}");
            }
        }
        assert_eq!(fit.residual_counts(), [29, 29, 29, 29]);
    }

    #[test]
    fn periodic_residuals_reconstruct_the_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let y = seasonal_walk(&mut rng, 240);
        let fit = seasonal_regression(&y, &SeasonalRegressionOptions::augmented(4, &[1])).unwrap();
        let v = y.values();
        for s in 0..4 {
            for (t, e) in fit.times[s].iter().zip(&fit.residuals[s]) {
                let t0 = t - 1;
                let ch = hegy_channels(v[t0 - 1], v[t0 - 2], v[t0 - 3], v[t0 - 4]);
                let mut rhs = e + dot(&fit.pi[s], &ch);
                for i in 1..=fit.k {
                    rhs += fit.phi[s][i - 1] * (v[t0 - i] - v[t0 - i - 4]);
                }
                let lhs = v[t0] - v[t0 - 4];
                assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn periodic_zero_noise_gives_zero_residuals() {
        let pattern = [3.0, -1.0, 0.5, 2.0];
        let v: Vec<f64> = (0..80).map(|i| pattern[i % 4]).collect();
        let y = QuarterlySeries::from_values(v).unwrap();
        let fit = seasonal_regression(&y, &SeasonalRegressionOptions::augmented(2, &[])).unwrap();
        for s in 0..4 {
            assert!(fit.residuals[s].iter().all(|&e| e == 0.0));
        }
    }

    #[test]
    fn truncation_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let y = seasonal_walk(&mut rng, 120);
        let mut fit = seasonal_regression(&y, &SeasonalRegressionOptions::unaugmented()).unwrap();
        fit.pi = [[-0.1; 4]; 4];
        assert_eq!(truncate_pi(&fit).pi, fit.pi);
        fit.pi[1][0] = 0.03;
        fit.pi[0][3] = 0.03;
        let tr = truncate_pi(&fit);
        assert_eq!(tr.pi[1][0], 0.0);
        assert_eq!(tr.pi[0][3], 0.03);
        assert_eq!(tr.truncations.len(), 1);
        assert_eq!(tr.residuals, fit.residuals);
    }

    #[test]
    fn truncation_never_moves_away_from_nonpositive_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let y = seasonal_walk(&mut rng, 120);
        let mut fit = seasonal_regression(&y, &SeasonalRegressionOptions::unaugmented()).unwrap();
        for _ in 0..200 {
            let truth: [[f64; 4]; 4] =
                std::array::from_fn(|_| std::array::from_fn(|_| -rng.random_range(0.0..1.0)));
            fit.pi = std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
            let tr = truncate_pi(&fit);
            for s in 0..4 {
                for j in 0..3 {
                    assert!(
                        (tr.pi[s][j] - truth[s][j]).abs() <= (fit.pi[s][j] - truth[s][j]).abs()
                    );
                }
            }
        }
    }

    #[test]
    fn null_imposition_zeroes_every_season() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y = seasonal_walk(&mut rng, 120);
        let fit = seasonal_regression(&y, &SeasonalRegressionOptions::unaugmented()).unwrap();
        let nulled = fit.impose_null(Hypothesis::Roots34);
        for s in 0..4 {
            assert_eq!(nulled.pi[s][2], 0.0);
            assert_eq!(nulled.pi[s][3], 0.0);
            assert_eq!(nulled.pi[s][0], fit.pi[s][0]);
        }
    }
}
