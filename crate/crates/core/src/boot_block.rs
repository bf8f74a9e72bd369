//! Seasonal block bootstrap for the unaugmented HEGY test.
//!
//! Residuals of the unaugmented periodic regression are resampled in blocks whose
//! starting points are shifted by whole years only, so each copied value keeps
//! its season. Blocks may be tapered.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{
    check_level, check_replicates, demean_by_season, periodic_recursion, replicate_error,
    run_indexed, Diagnostics, Method, PValueRule, RecursionTerms, TestReport,
};
use crate::error::{HegyError, Result};
use crate::hegy::{
    null_directions, seasonal_regression, truncate_pi, unaugmented_hegy, Hypothesis, SeasonalFit,
    SeasonalRegressionOptions, SingleRootStatistic,
};
use crate::rng::{derive_seed, stream};
use crate::series::QuarterlySeries;

/// Window applied to each resampled block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Taper {
    None,
    /// Linear ramps of `ceil(ramp_fraction * b)` points on both ends.
    Trapezoid {
        ramp_fraction: f64,
    },
}

impl Default for Taper {
    fn default() -> Self {
        Taper::Trapezoid { ramp_fraction: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockBootConfig {
    /// Number of bootstrap replicates `B`.
    pub replicates: usize,
    /// Block size in observations.
    pub block_size: usize,
    pub level: f64,
    pub seed: u64,
    pub statistic: SingleRootStatistic,
    pub taper: Taper,
    pub pvalue_rule: PValueRule,
}

impl Default for BlockBootConfig {
    fn default() -> Self {
        Self {
            replicates: 500,
            block_size: 4,
            level: 0.05,
            seed: 0,
            statistic: SingleRootStatistic::T,
            taper: Taper::default(),
            pvalue_rule: PValueRule::Smoothed,
        }
    }
}

impl BlockBootConfig {
    pub fn validate(&self) -> Result<()> {
        check_replicates(self.replicates)?;
        check_level(self.level)?;
        if self.block_size == 0 {
            return Err(HegyError::Configuration(
                "block size must be positive".into(),
            ));
        }
        if let Taper::Trapezoid { ramp_fraction } = self.taper {
            if !(0.0..0.5).contains(&ramp_fraction) {
                return Err(HegyError::Configuration(format!(
                    "taper ramp fraction must lie in [0, 0.5), got {ramp_fraction}"
                )));
            }
        }
        Ok(())
    }
}

pub type BlockTestReport = TestReport<BlockBootConfig>;

/// Admissible 1-based start indices for a block of `len` values placed at
/// position `t` of a length-`n` sequence: every `I ≡ t (mod 4)` with
/// `1 <= I <= n - len + 1`.
pub fn admissible_block_starts(n: usize, len: usize, t: usize) -> Vec<usize> {
    let (first, count) = start_range(n, len, t);
    (0..count).map(|m| first + 4 * m).collect()
}

/// First admissible start and the number of admissible starts.
fn start_range(n: usize, len: usize, t: usize) -> (usize, usize) {
    let r1 = (t - 1) / 4;
    let first = t - 4 * r1;
    let last = n + 1 - len;
    if last < first {
        return (first, 0);
    }
    (first, (last - first) / 4 + 1)
}

/// Block start indices (1-based) used for one resample of a length-`n` sequence.
pub fn draw_block_starts<R: Rng + ?Sized>(
    n: usize,
    b: usize,
    rng: &mut R,
) -> Result<Vec<(usize, usize, usize)>> {
    if b == 0 {
        return Err(HegyError::Configuration(
            "block size must be positive".into(),
        ));
    }
    if b > n {
        return Err(HegyError::BlockTooLong { block: b, len: n });
    }
    let mut out = Vec::with_capacity(n.div_ceil(b));
    let mut t = 1;
    while t <= n {
        let remaining = n - t + 1;
        let (mut first, mut count) = start_range(n, b, t);
        let mut copied = b;
        if count == 0 {
            // the tail block cannot be copied at full length; copy only what is needed
            (first, count) = start_range(n, remaining, t);
            copied = remaining;
        }
        let start = first + 4 * rng.random_range(0..count);
        assert_eq!(start % 4, t % 4, "block start must keep the season");
        out.push((t, start, copied.min(remaining)));
        t += b;
    }
    Ok(out)
}

/// Tapering weights for a block of size `b`.
pub fn taper_weights(b: usize, taper: Taper) -> Vec<f64> {
    let mut w = vec![1.0; b];
    if let Taper::Trapezoid { ramp_fraction } = taper {
        let r = ((ramp_fraction * b as f64).ceil() as usize).min(b / 2);
        for i in 0..r {
            let v = (i as f64 + 0.5) / r as f64;
            w[i] = v;
            w[b - 1 - i] = v;
        }
    }
    w
}

/// Multiplies a block by its weights and rescales by `sqrt(b) / ||w||`.
pub fn apply_taper(block: &[f64], weights: &[f64]) -> Vec<f64> {
    let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let scale = (weights.len() as f64).sqrt() / norm;
    block
        .iter()
        .zip(weights)
        .map(|(x, w)| x * w * scale)
        .collect()
}

/// Season-preserving block resample of `v` with blocks of size `b`; the last
/// block is truncated when `b` does not divide the length.
pub fn seasonal_block_resample<R: Rng + ?Sized>(
    v: &[f64],
    b: usize,
    taper: Taper,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let n = v.len();
    let starts = draw_block_starts(n, b, rng)?;
    let tapered = !matches!(taper, Taper::None);
    let weights = taper_weights(b, taper);
    let mut out = Vec::with_capacity(n);
    for (t, start, copied) in starts {
        let take = copied.min(n - t + 1);
        let src = &v[start - 1..start - 1 + copied];
        if tapered && copied == b {
            out.extend_from_slice(&apply_taper(src, &weights)[..take]);
        } else if tapered {
            let w = taper_weights(copied, taper);
            out.extend_from_slice(&apply_taper(src, &w)[..take]);
        } else {
            out.extend_from_slice(&src[..take]);
        }
    }
    Ok(out)
}

/// Generates a bootstrap path: four zero start values, then the unaugmented
/// periodic recursion driven by `v_star`.
pub fn generate_block_bootstrap_series(
    fit: &SeasonalFit,
    v_star: &[f64],
) -> Result<QuarterlySeries> {
    let y = periodic_recursion(
        fit,
        &[0.0; 4],
        v_star,
        RecursionTerms {
            pi: true,
            phi: false,
        },
    )?;
    QuarterlySeries::new(y, fit.start_season)
}

/// Demeaned residual fit and the interleaved residual series it resamples.
pub fn block_bootstrap_model(
    y: &QuarterlySeries,
    h: Hypothesis,
) -> Result<(SeasonalFit, Vec<f64>)> {
    let fit = seasonal_regression(y, &SeasonalRegressionOptions::unaugmented())?;
    let fit = demean_by_season(&fit);
    let v = fit.residual_series();
    Ok((truncate_pi(&fit).impose_null(h), v))
}

/// Advisory messages for block sizes outside the comfortable range.
pub fn block_size_warnings(n: usize, b: usize) -> Vec<String> {
    let mut w = Vec::new();
    if (b as f64) > (n as f64).sqrt() {
        w.push(format!(
            "block size {b} exceeds sqrt of the sample length {n}; the bootstrap may be unreliable"
        ));
    }
    if n < 6 * b {
        w.push(format!(
            "sample length {n} is below six block lengths ({b})"
        ));
    }
    w
}

/// Seasonal block bootstrap unaugmented HEGY test of `h`.
pub fn block_bootstrap_test(
    y: &QuarterlySeries,
    h: Hypothesis,
    cfg: &BlockBootConfig,
) -> Result<BlockTestReport> {
    cfg.validate()?;
    let rule = null_directions(h, cfg.statistic);
    let observed = unaugmented_hegy(y)?;
    let (model, v) = block_bootstrap_model(y, h)?;
    if cfg.block_size > v.len() {
        return Err(HegyError::BlockTooLong {
            block: cfg.block_size,
            len: v.len(),
        });
    }
    let warnings = block_size_warnings(y.len(), cfg.block_size);
    let stats = run_indexed(cfg.replicates, |r| {
        let seed = derive_seed(cfg.seed, &[r as u64]);
        let replicate = || -> Result<f64> {
            let mut rng = stream(cfg.seed, &[r as u64]);
            let v_star = seasonal_block_resample(&v, cfg.block_size, cfg.taper, &mut rng)?;
            let ystar = generate_block_bootstrap_series(&model, &v_star)?;
            Ok(unaugmented_hegy(&ystar)?.value(rule.statistic))
        };
        replicate().map_err(replicate_error(r, seed))
    })?;
    Ok(TestReport::assemble(
        Method::BlockUnaug,
        h,
        rule,
        observed,
        stats,
        cfg.pvalue_rule,
        cfg.level,
        cfg.clone(),
        Diagnostics::from_fit(&model, warnings),
    ))
}
