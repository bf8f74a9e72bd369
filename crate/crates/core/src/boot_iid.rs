//! Seasonal iid bootstrap for the augmented HEGY test.
//!
//! Residuals of the periodic regression are resampled with replacement inside
//! their own season, then pushed through the fitted periodic recursion with the
//! tested `pi` coefficients set to zero.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{
    check_level, check_replicates, demean_by_season, periodic_recursion, replicate_error,
    run_indexed, Diagnostics, Method, PValueRule, RecursionTerms, TestReport,
};
use crate::error::{HegyError, Result};
use crate::hegy::{
    augmented_hegy, null_directions, seasonal_regression, truncate_pi, Hypothesis, SeasonalFit,
    SeasonalRegressionOptions, SingleRootStatistic, DEFAULT_K_MAX,
};
use crate::rng::{derive_seed, stream};
use crate::series::{season_after, QuarterlySeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IidBootConfig {
    /// Number of bootstrap replicates `B`.
    pub replicates: usize,
    pub k_max: usize,
    pub level: f64,
    pub seed: u64,
    /// Generate single-root replicates without the `pi` terms.
    pub use_reduced_recursion_for_single_roots: bool,
    pub pvalue_rule: PValueRule,
    pub statistic: SingleRootStatistic,
}

impl Default for IidBootConfig {
    fn default() -> Self {
        Self {
            replicates: 500,
            k_max: DEFAULT_K_MAX,
            level: 0.05,
            seed: 0,
            use_reduced_recursion_for_single_roots: true,
            pvalue_rule: PValueRule::Smoothed,
            statistic: SingleRootStatistic::T,
        }
    }
}

impl IidBootConfig {
    pub fn validate(&self) -> Result<()> {
        check_replicates(self.replicates)?;
        check_level(self.level)
    }
}

pub type IidTestReport = TestReport<IidBootConfig>;

/// Centres every season's residual pool.
pub fn demean_residuals_by_season(fit: &SeasonalFit) -> SeasonalFit {
    demean_by_season(fit)
}

/// Draws `horizon` innovations; position `p` takes a uniform draw from the pool
/// of season `season_after(fit.start_season, p)`. Returns `(season, pool index)`
/// for every position.
pub fn resample_seasonal_iid_indices<R: Rng + ?Sized>(
    fit: &SeasonalFit,
    horizon: usize,
    rng: &mut R,
) -> Result<Vec<(u8, usize)>> {
    for (s, pool) in fit.residuals.iter().enumerate() {
        if pool.is_empty() {
            return Err(HegyError::EmptyPool {
                season: s as u8 + 1,
            });
        }
    }
    Ok((0..horizon)
        .map(|p| {
            let season = season_after(fit.start_season, p);
            let pool = &fit.residuals[season as usize - 1];
            (season, rng.random_range(0..pool.len()))
        })
        .collect())
}

/// Seasonal iid innovations for a path of length `horizon`.
pub fn resample_seasonal_iid<R: Rng + ?Sized>(
    fit: &SeasonalFit,
    horizon: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(resample_seasonal_iid_indices(fit, horizon, rng)?
        .into_iter()
        .map(|(s, i)| fit.residuals[s as usize - 1][i])
        .collect())
}

/// Generates a bootstrap path from a zero pre-sample. `fit` must already be
/// truncated and carry the null; the reduced recursion drops the `pi` terms.
pub fn generate_bootstrap_series(
    fit: &SeasonalFit,
    eps_star: &[f64],
    reduced: bool,
) -> Result<QuarterlySeries> {
    let y = periodic_recursion(
        fit,
        &[],
        eps_star,
        RecursionTerms {
            pi: !reduced,
            phi: true,
        },
    )?;
    QuarterlySeries::new(y, fit.start_season)
}

/// Truncated, null-imposed, demeaned periodic fit used to generate replicates.
pub fn bootstrap_model(y: &QuarterlySeries, h: Hypothesis, k_max: usize) -> Result<SeasonalFit> {
    let fit = seasonal_regression(
        y,
        &SeasonalRegressionOptions::augmented(k_max, h.root_set()),
    )?;
    Ok(truncate_pi(&demean_residuals_by_season(&fit)).impose_null(h))
}

/// Seasonal iid bootstrap augmented HEGY test of `h`.
pub fn iid_bootstrap_test(
    y: &QuarterlySeries,
    h: Hypothesis,
    cfg: &IidBootConfig,
) -> Result<IidTestReport> {
    cfg.validate()?;
    let rule = null_directions(h, cfg.statistic);
    let observed = augmented_hegy(y, cfg.k_max, true)?;
    let model = bootstrap_model(y, h, cfg.k_max)?;
    let reduced = cfg.use_reduced_recursion_for_single_roots && h.is_single_root();
    let n = y.len();
    let stats = run_indexed(cfg.replicates, |r| {
        let seed = derive_seed(cfg.seed, &[r as u64]);
        let replicate = || -> Result<f64> {
            let mut rng = stream(cfg.seed, &[r as u64]);
            let eps = resample_seasonal_iid(&model, n, &mut rng)?;
            let ystar = generate_bootstrap_series(&model, &eps, reduced)?;
            Ok(augmented_hegy(&ystar, cfg.k_max, true)?.value(rule.statistic))
        };
        replicate().map_err(replicate_error(r, seed))
    })?;
    Ok(TestReport::assemble(
        Method::IidAug,
        h,
        rule,
        observed,
        stats,
        cfg.pvalue_rule,
        cfg.level,
        cfg.clone(),
        Diagnostics::from_fit(&model, Vec::new()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hegy::Statistic;
    use crate::series::{ar_recursion, LagPolynomial};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn walk(seed: u64, n: usize) -> QuarterlySeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let y = ar_recursion(&LagPolynomial::monic_binomial(4, 1.0), &e, &[0.0; 4]).unwrap();
        QuarterlySeries::from_values(y).unwrap()
    }

    #[test]
    fn degenerate_pool_returns_its_constant() {
        let mut fit = bootstrap_model(&walk(1, 120), Hypothesis::Root1, 4).unwrap();
        fit.residuals[2] = vec![3.5; 7];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let eps = resample_seasonal_iid(&fit, 120, &mut rng).unwrap();
        for (p, e) in eps.iter().enumerate() {
            if season_after(fit.start_season, p) == 3 {
                assert_eq!(*e, 3.5);
            }
        }
    }

    #[test]
    fn empty_pool_is_an_error() {
        let mut fit = bootstrap_model(&walk(1, 120), Hypothesis::Root1, 4).unwrap();
        fit.residuals[1].clear();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(
            resample_seasonal_iid(&fit, 8, &mut rng),
            Err(HegyError::EmptyPool { season: 2 })
        );
    }

    #[test]
    fn full_null_without_lags_is_a_seasonal_cumulative_sum() {
        let mut fit = bootstrap_model(&walk(3, 120), Hypothesis::Roots1234, 4).unwrap();
        fit.phi = std::array::from_fn(|_| vec![0.0; fit.k]);
        let eps: Vec<f64> = (0..120).map(|i| (i as f64 * 0.37).cos()).collect();
        let y = generate_bootstrap_series(&fit, &eps, false).unwrap();
        for p in 0..120 {
            let want: f64 = (p % 4..=p).step_by(4).map(|i| eps[i]).sum();
            assert!((y.values()[p] - want).abs() < 1e-10);
        }
    }

    #[test]
    fn single_replicate_pvalue() {
        let cfg = IidBootConfig {
            replicates: 1,
            seed: 4,
            ..Default::default()
        };
        let rep = iid_bootstrap_test(&walk(4, 120), Hypothesis::Root2, &cfg).unwrap();
        assert!(rep.p_value == 0.5 || rep.p_value == 1.0);
        assert_eq!(rep.statistic, Statistic::T(2));
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = IidBootConfig {
            replicates: 30,
            seed: 11,
            ..Default::default()
        };
        let y = walk(5, 120);
        let a = iid_bootstrap_test(&y, Hypothesis::Roots34, &cfg).unwrap();
        let b = iid_bootstrap_test(&y, Hypothesis::Roots34, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.bootstrap_statistics.len(), 30);
        assert!(a.bootstrap_statistics.iter().all(|f| *f >= 0.0));
    }

    #[test]
    fn invalid_configuration_is_rejected() {
        let y = walk(6, 120);
        let cfg = IidBootConfig {
            replicates: 0,
            ..Default::default()
        };
        assert!(matches!(
            iid_bootstrap_test(&y, Hypothesis::Root1, &cfg),
            Err(HegyError::Configuration(_))
        ));
        let cfg = IidBootConfig {
            level: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            iid_bootstrap_test(&y, Hypothesis::Root1, &cfg),
            Err(HegyError::Configuration(_))
        ));
    }
}
