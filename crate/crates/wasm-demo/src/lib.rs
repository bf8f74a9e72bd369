//! Browser bindings for the seasonal unit-root tests. Every export takes plain
//! numbers and strings and returns a JSON string for the page to draw.
//!
//! The `*_json` functions hold the logic and are callable natively; the
//! `#[wasm_bindgen]` wrappers only convert errors and take 32-bit seeds so the
//! page can pass plain JavaScript numbers.

use hegy_core::boot_block::{block_bootstrap_test, BlockBootConfig};
use hegy_core::boot_iid::{iid_bootstrap_test, IidBootConfig};
use hegy_core::hegy::{augmented_hegy, unaugmented_hegy, HegyStatistics, Hypothesis, Tail};
use hegy_core::rng::stream;
use hegy_core::series::QuarterlySeries;
use hegy_core::sim::{
    generate_series, power_curve, BootstrapProcedure, DgpSpec, NoiseKind, TargetRoot, RHO_GRID,
};
use hegy_core::{HegyError, Result};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Upper bounds that keep a single call responsive in a browser tab.
pub const MAX_CYCLES: usize = 400;
pub const MAX_REPLICATES: usize = 2000;
pub const MAX_REPLICATIONS: usize = 200;

#[derive(Debug, Serialize)]
pub struct SeriesView {
    pub values: Vec<f64>,
    pub unaugmented: HegyStatistics,
    pub augmented: HegyStatistics,
}

#[derive(Debug, Serialize)]
pub struct DistributionView {
    pub statistic: String,
    pub tail: Tail,
    pub observed_statistic: f64,
    pub bootstrap_statistics: Vec<f64>,
    pub p_value: f64,
    pub reject: bool,
}

#[derive(Debug, Serialize)]
pub struct CurvePoint {
    pub rho: f64,
    pub rate: f64,
    pub se: f64,
}

fn bounded(name: &str, value: usize, max: usize) -> Result<usize> {
    if value == 0 || value > max {
        Err(HegyError::Configuration(format!(
            "{name} must lie in 1..={max}, got {value}"
        )))
    } else {
        Ok(value)
    }
}

fn dgp(root: &str, nuisance: bool, noise: &str, rho: f64, cycles: usize) -> Result<DgpSpec> {
    let spec = DgpSpec {
        target_root: root.parse::<TargetRoot>()?,
        nuisance,
        rho,
        noise: noise.parse::<NoiseKind>()?,
        cycles: bounded("cycles", cycles, MAX_CYCLES)?,
    };
    spec.validate()?;
    Ok(spec)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(|e| HegyError::Configuration(e.to_string()))
}

fn procedure(
    method: &str,
    hypothesis: Hypothesis,
    replicates: usize,
    block_size: usize,
) -> Result<BootstrapProcedure> {
    let replicates = bounded("replicates", replicates, MAX_REPLICATES)?;
    match method {
        "iid-aug" => Ok(BootstrapProcedure::IidAug {
            hypothesis,
            config: IidBootConfig {
                replicates,
                ..Default::default()
            },
        }),
        "block-unaug" => Ok(BootstrapProcedure::BlockUnaug {
            hypothesis,
            config: BlockBootConfig {
                replicates,
                block_size,
                ..Default::default()
            },
        }),
        _ => Err(HegyError::Configuration(format!(
            "method must be `iid-aug` or `block-unaug`, got `{method}`"
        ))),
    }
}

/// Simulates one series from the local-to-unity design and reports both HEGY regressions.
pub fn simulate_series_json(
    root: &str,
    nuisance: bool,
    noise: &str,
    rho: f64,
    cycles: usize,
    seed: u64,
) -> Result<String> {
    let spec = dgp(root, nuisance, noise, rho, cycles)?;
    let y = generate_series(&spec, &mut stream(seed, &[]))?;
    let view = SeriesView {
        unaugmented: unaugmented_hegy(&y)?,
        augmented: augmented_hegy(&y, 4, true)?,
        values: y.into_values(),
    };
    to_json(&view)
}

/// Runs one bootstrap test on `values` (first value in season 1) and returns
/// the bootstrap distribution next to the observed statistic.
pub fn bootstrap_distribution_json(
    values: &[f64],
    method: &str,
    hypothesis: &str,
    replicates: usize,
    block_size: usize,
    seed: u64,
) -> Result<String> {
    let y = QuarterlySeries::from_values(values.to_vec())?;
    let h: Hypothesis = hypothesis.parse()?;
    let view = match procedure(method, h, replicates, block_size)? {
        BootstrapProcedure::IidAug { hypothesis, config } => {
            let r = iid_bootstrap_test(&y, hypothesis, &IidBootConfig { seed, ..config })?;
            DistributionView {
                statistic: r.statistic.to_string(),
                tail: r.tail,
                observed_statistic: r.observed_statistic,
                bootstrap_statistics: r.bootstrap_statistics,
                p_value: r.p_value,
                reject: r.reject,
            }
        }
        BootstrapProcedure::BlockUnaug { hypothesis, config } => {
            let r = block_bootstrap_test(&y, hypothesis, &BlockBootConfig { seed, ..config })?;
            DistributionView {
                statistic: r.statistic.to_string(),
                tail: r.tail,
                observed_statistic: r.observed_statistic,
                bootstrap_statistics: r.bootstrap_statistics,
                p_value: r.p_value,
                reject: r.reject,
            }
        }
    };
    to_json(&view)
}

/// Rejection rate of the chosen test over the default local-alternative grid.
#[allow(clippy::too_many_arguments)]
pub fn power_curve_json(
    root: &str,
    nuisance: bool,
    noise: &str,
    method: &str,
    cycles: usize,
    replications: usize,
    replicates: usize,
    seed: u64,
) -> Result<String> {
    let spec = dgp(root, nuisance, noise, 0.0, cycles)?;
    let replications = bounded("replications", replications, MAX_REPLICATIONS)?;
    let proc = procedure(method, spec.target_root.hypothesis(), replicates, 4)?;
    let points: Vec<CurvePoint> = power_curve(&spec, &RHO_GRID, &proc, replications, seed)?
        .into_iter()
        .map(|p| CurvePoint {
            rho: p.rho,
            rate: p.result.rejection_rate,
            se: p.result.standard_error,
        })
        .collect();
    to_json(&points)
}

fn js_error(e: HegyError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn simulate_series(
    root: &str,
    nuisance: bool,
    noise: &str,
    rho: f64,
    cycles: usize,
    seed: u32,
) -> std::result::Result<String, JsError> {
    simulate_series_json(root, nuisance, noise, rho, cycles, seed.into()).map_err(js_error)
}

#[wasm_bindgen]
pub fn bootstrap_distribution(
    values: &[f64],
    method: &str,
    hypothesis: &str,
    replicates: usize,
    block_size: usize,
    seed: u32,
) -> std::result::Result<String, JsError> {
    bootstrap_distribution_json(
        values,
        method,
        hypothesis,
        replicates,
        block_size,
        seed.into(),
    )
    .map_err(js_error)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn power_curve_points(
    root: &str,
    nuisance: bool,
    noise: &str,
    method: &str,
    cycles: usize,
    replications: usize,
    replicates: usize,
    seed: u32,
) -> std::result::Result<String, JsError> {
    power_curve_json(
        root,
        nuisance,
        noise,
        method,
        cycles,
        replications,
        replicates,
        seed.into(),
    )
    .map_err(js_error)
}
