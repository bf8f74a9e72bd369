//! Pieces shared by the two bootstrap tests: the p-value rules, the report, the
//! data-generating recursion and the replicate runner.

use serde::{Deserialize, Serialize};

use crate::error::{HegyError, Result};
use crate::hegy::{
    DecisionRule, HegyStatistics, Hypothesis, SeasonLog, SeasonalFit, Statistic, Tail,
    TruncationEvent,
};
use crate::series::{hegy_channels, season_after};

/// Magnitude beyond which a generated path is declared explosive.
pub const EXPLOSION_LIMIT: f64 = 1e12;

/// How bootstrap replicates turn into a p-value and a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueRule {
    /// `p = (1 + #{replicates at least as extreme}) / (B + 1)`, reject iff `p <= level`.
    #[default]
    Smoothed,
    /// Reject iff the number of replicates the observed value is at least as
    /// extreme as exceeds `B (1 - level)`; `p` is the share of replicates
    /// strictly more extreme than the observed value.
    PaperCount,
}

/// `true` when `candidate` is at least as extreme as `reference` in the given tail.
fn at_least_as_extreme(candidate: f64, reference: f64, tail: Tail) -> bool {
    match tail {
        Tail::Left => candidate <= reference,
        Tail::Right => candidate >= reference,
    }
}

/// p-value and decision for an observed statistic against its bootstrap replicates.
pub fn bootstrap_decision(
    observed: f64,
    replicates: &[f64],
    tail: Tail,
    rule: PValueRule,
    level: f64,
) -> (f64, bool) {
    let b = replicates.len() as f64;
    match rule {
        PValueRule::Smoothed => {
            let c = replicates
                .iter()
                .filter(|&&r| at_least_as_extreme(r, observed, tail))
                .count() as f64;
            let p = (1.0 + c) / (b + 1.0);
            (p, p <= level)
        }
        PValueRule::PaperCount => {
            let count = replicates
                .iter()
                .filter(|&&r| at_least_as_extreme(observed, r, tail))
                .count() as f64;
            let p = (b - count) / b;
            (p, count > b * (1.0 - level))
        }
    }
}

/// Which bootstrap produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    IidAug,
    BlockUnaug,
}

/// Fit-level diagnostics attached to every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub residual_counts: [usize; 4],
    pub season_logs: [SeasonLog; 4],
    pub truncations: Vec<TruncationEvent>,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    pub(crate) fn from_fit(fit: &SeasonalFit, warnings: Vec<String>) -> Self {
        Self {
            residual_counts: fit.residual_counts(),
            season_logs: fit.logs.clone(),
            truncations: fit.truncations.clone(),
            warnings,
        }
    }
}

/// Outcome of one bootstrap test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport<C> {
    pub method: Method,
    pub hypothesis: Hypothesis,
    pub statistic: Statistic,
    pub tail: Tail,
    pub observed_statistic: f64,
    /// Full statistic bundle of the observed series.
    pub observed: HegyStatistics,
    pub bootstrap_statistics: Vec<f64>,
    pub p_value: f64,
    pub reject: bool,
    pub config: C,
    pub diagnostics: Diagnostics,
}

impl<C> TestReport<C> {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        method: Method,
        hypothesis: Hypothesis,
        rule: DecisionRule,
        observed: HegyStatistics,
        bootstrap_statistics: Vec<f64>,
        pvalue_rule: PValueRule,
        level: f64,
        config: C,
        diagnostics: Diagnostics,
    ) -> Self {
        let observed_statistic = observed.value(rule.statistic);
        let (p_value, reject) = bootstrap_decision(
            observed_statistic,
            &bootstrap_statistics,
            rule.tail,
            pvalue_rule,
            level,
        );
        Self {
            method,
            hypothesis,
            statistic: rule.statistic,
            tail: rule.tail,
            observed_statistic,
            observed,
            bootstrap_statistics,
            p_value,
            reject,
            config,
            diagnostics,
        }
    }
}

/// Which terms of the periodic recursion drive a generated path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecursionTerms {
    pub pi: bool,
    pub phi: bool,
}

/// Runs the periodic recursion
///
/// ```text
/// Y_p = Y_{p-4} + sum_j pi_{j,s} Y_{j,p-1} + sum_i phi_{i,s} (1 - L^4) Y_{p-i} + d_p
/// ```
///
/// forward from `prefix`, one step per driver value. Values before the prefix are
/// zero; position `p` (0-based, counting the prefix) belongs to season
/// `season_after(fit.start_season, p)`. Returns prefix and generated values.
pub fn periodic_recursion(
    fit: &SeasonalFit,
    prefix: &[f64],
    driver: &[f64],
    terms: RecursionTerms,
) -> Result<Vec<f64>> {
    let mut y = Vec::with_capacity(prefix.len() + driver.len());
    y.extend_from_slice(prefix);
    let k = if terms.phi { fit.k } else { 0 };
    for &d in driver {
        let p = y.len();
        let at = |i: usize| if i <= p && i >= 1 { y[p - i] } else { 0.0 };
        let s = season_after(fit.start_season, p) as usize - 1;
        let mut v = at(4) + d;
        if terms.pi {
            let ch = hegy_channels(at(1), at(2), at(3), at(4));
            let pi = &fit.pi[s];
            v += pi[0] * ch[0] + pi[1] * ch[1] + pi[2] * ch[2] + pi[3] * ch[3];
        }
        for (i, phi) in fit.phi[s].iter().enumerate().take(k) {
            let lag = i + 1;
            v += phi * (at(lag) - at(lag + 4));
        }
        if !v.is_finite() || v.abs() > EXPLOSION_LIMIT {
            return Err(HegyError::ExplosiveRecursion {
                position: p + 1,
                magnitude: v.abs(),
            });
        }
        y.push(v);
    }
    Ok(y)
}

/// Subtracts each season's mean from its residual pool.
pub fn demean_by_season(fit: &SeasonalFit) -> SeasonalFit {
    let mut out = fit.clone();
    for pool in out.residuals.iter_mut() {
        if pool.is_empty() {
            continue;
        }
        let m = pool.iter().sum::<f64>() / pool.len() as f64;
        for e in pool.iter_mut() {
            *e -= m;
        }
        // a second pass removes the rounding left by the first
        let m = pool.iter().sum::<f64>() / pool.len() as f64;
        for e in pool.iter_mut() {
            *e -= m;
        }
    }
    out
}

/// Evaluates `f(0..n)`, in parallel when enabled, returning results in index order.
/// The first error by index wins, independent of scheduling.
pub(crate) fn run_indexed<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    let results: Vec<Result<T>> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(&f).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<T>> = (0..n).map(&f).collect();
    results.into_iter().collect()
}

/// Wraps a replicate failure with its index and seed.
pub(crate) fn replicate_error(index: usize, seed: u64) -> impl FnOnce(HegyError) -> HegyError {
    move |e| HegyError::Replicate {
        index,
        seed,
        source: Box::new(e),
    }
}

pub(crate) fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(HegyError::Configuration(format!(
            "level must lie in (0, 1), got {level}"
        )));
    }
    Ok(())
}

pub(crate) fn check_replicates(b: usize) -> Result<()> {
    if b == 0 {
        return Err(HegyError::Configuration(
            "at least one bootstrap replicate is required".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::hegy::{seasonal_regression, SeasonalRegressionOptions};
    use crate::series::QuarterlySeries;

    #[test]
    fn smoothed_rule_arithmetic() {
        let (p, r) = bootstrap_decision(-3.0, &[-1.0], Tail::Left, PValueRule::Smoothed, 0.05);
        assert_eq!((p, r), (0.5, false));
        let (p, _) = bootstrap_decision(-0.5, &[-1.0], Tail::Left, PValueRule::Smoothed, 0.05);
        assert_eq!(p, 1.0);
        let reps: Vec<f64> = (1..=99).map(f64::from).collect();
        let (p, r) = bootstrap_decision(100.0, &reps, Tail::Right, PValueRule::Smoothed, 0.05);
        assert_eq!((p, r), (0.01, true));
        // ties count as extreme
        let (p, _) = bootstrap_decision(50.0, &reps, Tail::Right, PValueRule::Smoothed, 0.05);
        assert_eq!(p, 51.0 / 100.0);
        let (p, _) = bootstrap_decision(50.0, &reps, Tail::Left, PValueRule::Smoothed, 0.05);
        assert_eq!(p, 51.0 / 100.0);
    }

    #[test]
    fn paper_count_rule() {
        let reps: Vec<f64> = (1..=100).map(f64::from).collect();
        // observed below 96 replicates: count 96 > 95 rejects
        let (p, r) = bootstrap_decision(5.0, &reps, Tail::Left, PValueRule::PaperCount, 0.05);
        assert!(r);
        assert!((p - 0.04).abs() < 1e-15);
        // count exactly 95 does not reject
        let (_, r) = bootstrap_decision(6.0, &reps, Tail::Left, PValueRule::PaperCount, 0.05);
        assert!(!r);
        let (_, r) = bootstrap_decision(96.0, &reps, Tail::Right, PValueRule::PaperCount, 0.05);
        assert!(r);
    }

    fn toy_fit() -> SeasonalFit {
        let y: Vec<f64> = (0..48).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        seasonal_regression(
            &QuarterlySeries::from_values(y).unwrap(),
            &SeasonalRegressionOptions::unaugmented(),
        )
        .unwrap()
    }

    #[test]
    fn zero_driver_and_coefficients_stay_at_zero() {
        let mut fit = toy_fit();
        fit.pi = [[0.0; 4]; 4];
        let y = periodic_recursion(
            &fit,
            &[],
            &[0.0; 40],
            RecursionTerms {
                pi: true,
                phi: true,
            },
        )
        .unwrap();
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn without_pi_the_recursion_is_a_seasonal_cumulative_sum() {
        let fit = toy_fit();
        let e: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let y = periodic_recursion(
            &fit,
            &[],
            &e,
            RecursionTerms {
                pi: false,
                phi: false,
            },
        )
        .unwrap();
        for p in 0..40 {
            let want: f64 = (p % 4..=p).step_by(4).map(|i| e[i]).sum();
            assert!((y[p] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn explosive_coefficients_are_reported() {
        let mut fit = toy_fit();
        fit.pi = [[2.0, 0.0, 0.0, 0.0]; 4];
        let e = vec![1.0; 400];
        let err = periodic_recursion(
            &fit,
            &[],
            &e,
            RecursionTerms {
                pi: true,
                phi: false,
            },
        );
        assert!(matches!(err, Err(HegyError::ExplosiveRecursion { .. })));
    }

    #[test]
    fn demeaning_examples() {
        let mut fit = toy_fit();
        fit.residuals[0] = vec![1.0, 2.0, 3.0];
        fit.residuals[1] = vec![-1.0, 1.0];
        let d = demean_by_season(&fit);
        assert_eq!(d.residuals[0], vec![-1.0, 0.0, 1.0]);
        assert_eq!(d.residuals[1], vec![-1.0, 1.0]);
        for pool in &d.residuals {
            let m: f64 = pool.iter().sum::<f64>() / pool.len() as f64;
            assert!(m.abs() <= 1e-12);
        }
    }
}
