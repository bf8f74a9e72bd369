//! Command-line surface. Every flag maps to exactly one engine parameter;
//! flags that do not apply to the chosen method are rejected.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hegy_core::boot_block::{BlockBootConfig, Taper};
use hegy_core::boot_iid::IidBootConfig;
use hegy_core::bootstrap::PValueRule;
use hegy_core::hegy::{Hypothesis, SingleRootStatistic};
use hegy_core::sim::{BootstrapProcedure, NoiseKind, TargetRoot};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "hegy",
    version,
    about = "Bootstrap seasonal unit-root tests for quarterly series"
)]
pub struct Cli {
    /// Worker threads for the bootstrap engines (defaults to all cores).
    #[arg(long, global = true, env = "HEGY_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one bootstrap test on a series read from CSV.
    Test(TestArgs),
    /// Reproduce cells of the block-size reference tables.
    Simulate(SimulateArgs),
    /// Rejection rate over the local-alternative grid.
    PowerCurve(PowerCurveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    IidAug,
    BlockUnaug,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticArg {
    T,
    Pi,
}

impl From<StatisticArg> for SingleRootStatistic {
    fn from(s: StatisticArg) -> Self {
        match s {
            StatisticArg::T => SingleRootStatistic::T,
            StatisticArg::Pi => SingleRootStatistic::Pi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PValueRuleArg {
    Smoothed,
    PaperCount,
}

impl From<PValueRuleArg> for PValueRule {
    fn from(r: PValueRuleArg) -> Self {
        match r {
            PValueRuleArg::Smoothed => PValueRule::Smoothed,
            PValueRuleArg::PaperCount => PValueRule::PaperCount,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaperArg {
    Trapezoid,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("`{s}` is not true or false")),
    }
}

fn parse_hypothesis(s: &str) -> std::result::Result<Hypothesis, String> {
    s.parse().map_err(|e: hegy_core::HegyError| e.to_string())
}

fn parse_root(s: &str) -> std::result::Result<TargetRoot, String> {
    s.parse().map_err(|e: hegy_core::HegyError| e.to_string())
}

fn parse_noise(s: &str) -> std::result::Result<NoiseKind, String> {
    s.parse().map_err(|e: hegy_core::HegyError| e.to_string())
}

/// Bootstrap engine parameters shared by `test` and `power-curve`.
#[derive(Debug, Clone, Default, Args)]
pub struct EngineArgs {
    /// Number of bootstrap replicates.
    #[arg(long = "B", visible_alias = "replicates")]
    pub replicates: Option<usize>,
    /// Nominal level of the test.
    #[arg(long)]
    pub level: Option<f64>,
    /// Statistic for single-root hypotheses.
    #[arg(long, value_enum)]
    pub statistic: Option<StatisticArg>,
    /// Rule turning bootstrap replicates into a p-value.
    #[arg(long, value_enum)]
    pub pvalue_rule: Option<PValueRuleArg>,
    /// Largest lag order considered before pruning (iid-aug only).
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Keep the pi terms when generating single-root replicates (iid-aug only).
    #[arg(long)]
    pub full_recursion: bool,
    /// Block size in observations (block-unaug only).
    #[arg(long)]
    pub block_size: Option<usize>,
    /// Block window (block-unaug only).
    #[arg(long, value_enum)]
    pub taper: Option<TaperArg>,
    /// Fraction of each block on either ramp of the trapezoid (block-unaug only).
    #[arg(long)]
    pub ramp_fraction: Option<f64>,
}

fn reject_flag(present: bool, flag: &str, method: &str) -> Result<()> {
    if present {
        Err(CliError::Config(format!(
            "{flag} does not apply to --method {method}"
        )))
    } else {
        Ok(())
    }
}

fn block_taper(taper: Option<TaperArg>, ramp_fraction: Option<f64>) -> Result<Taper> {
    match (taper, ramp_fraction) {
        (Some(TaperArg::None), Some(_)) => Err(CliError::Config(
            "--ramp-fraction has no effect with --taper none".into(),
        )),
        (Some(TaperArg::None), None) => Ok(Taper::None),
        (_, Some(ramp_fraction)) => Ok(Taper::Trapezoid { ramp_fraction }),
        (_, None) => Ok(Taper::default()),
    }
}

impl EngineArgs {
    pub fn iid_config(&self, seed: u64, default_replicates: usize) -> Result<IidBootConfig> {
        reject_flag(self.block_size.is_some(), "--block-size", "iid-aug")?;
        reject_flag(self.taper.is_some(), "--taper", "iid-aug")?;
        reject_flag(self.ramp_fraction.is_some(), "--ramp-fraction", "iid-aug")?;
        let d = IidBootConfig::default();
        let cfg = IidBootConfig {
            replicates: self.replicates.unwrap_or(default_replicates),
            k_max: self.k_max.unwrap_or(d.k_max),
            level: self.level.unwrap_or(d.level),
            seed,
            use_reduced_recursion_for_single_roots: !self.full_recursion,
            pvalue_rule: self.pvalue_rule.map_or(d.pvalue_rule, Into::into),
            statistic: self.statistic.map_or(d.statistic, Into::into),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn block_config(&self, seed: u64, default_replicates: usize) -> Result<BlockBootConfig> {
        reject_flag(self.k_max.is_some(), "--k-max", "block-unaug")?;
        reject_flag(self.full_recursion, "--full-recursion", "block-unaug")?;
        let d = BlockBootConfig::default();
        let cfg = BlockBootConfig {
            replicates: self.replicates.unwrap_or(default_replicates),
            block_size: self.block_size.unwrap_or(d.block_size),
            level: self.level.unwrap_or(d.level),
            seed,
            statistic: self.statistic.map_or(d.statistic, Into::into),
            taper: block_taper(self.taper, self.ramp_fraction)?,
            pvalue_rule: self.pvalue_rule.map_or(d.pvalue_rule, Into::into),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn procedure(
        &self,
        method: MethodArg,
        hypothesis: Hypothesis,
        seed: u64,
        default_replicates: usize,
    ) -> Result<BootstrapProcedure> {
        Ok(match method {
            MethodArg::IidAug => BootstrapProcedure::IidAug {
                hypothesis,
                config: self.iid_config(seed, default_replicates)?,
            },
            MethodArg::BlockUnaug => BootstrapProcedure::BlockUnaug {
                hypothesis,
                config: self.block_config(seed, default_replicates)?,
            },
        })
    }
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// CSV file with one value per row or `period,value` rows.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Hypothesis as a root set, e.g. `1`, `2`, `34`, `1,2,3,4`.
    #[arg(long, value_parser = parse_hypothesis)]
    pub hypothesis: Hypothesis,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Season of the first observation when the input has no period labels.
    #[arg(long)]
    pub start_season: Option<u8>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Reference table number (3, 4 or 5); all tables with --full when omitted.
    #[arg(long)]
    pub table: Option<u8>,
    /// A single cell, e.g. `False,iid,t4`.
    #[arg(long, conflicts_with_all = ["row", "nuisance", "column"])]
    pub cell: Option<String>,
    /// Restrict to one noise row.
    #[arg(long, value_parser = parse_noise)]
    pub row: Option<NoiseKind>,
    /// Restrict to cells with or without nuisance roots.
    #[arg(long, value_parser = parse_bool)]
    pub nuisance: Option<bool>,
    /// Restrict to one column, e.g. `pi8` or `F12`.
    #[arg(long)]
    pub column: Option<String>,
    /// Full-scale run: 600 replications of 500 replicates per cell.
    #[arg(long)]
    pub full: bool,
    /// Monte Carlo replications per cell.
    #[arg(long = "N")]
    pub replications: Option<usize>,
    /// Bootstrap replicates per test.
    #[arg(long = "B")]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long, value_enum)]
    pub pvalue_rule: Option<PValueRuleArg>,
    #[arg(long, value_enum)]
    pub taper: Option<TaperArg>,
    #[arg(long)]
    pub ramp_fraction: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl SimulateArgs {
    /// Applies the overridable engine flags to a table cell's configuration.
    pub fn adjust(&self, mut cfg: BlockBootConfig) -> Result<BlockBootConfig> {
        if let Some(level) = self.level {
            cfg.level = level;
        }
        if let Some(rule) = self.pvalue_rule {
            cfg.pvalue_rule = rule.into();
        }
        if self.taper.is_some() || self.ramp_fraction.is_some() {
            cfg.taper = block_taper(self.taper, self.ramp_fraction)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct PowerCurveArgs {
    /// Root the series is local to: plus1, minus1 or complex.
    #[arg(long, value_parser = parse_root)]
    pub root: TargetRoot,
    /// Add the remaining seasonal unit roots as nuisance roots.
    #[arg(long, value_parser = parse_bool, action = clap::ArgAction::Set)]
    pub nuisance: bool,
    #[arg(long, value_parser = parse_noise)]
    pub noise: NoiseKind,
    #[arg(long, value_enum, default_value_t = MethodArg::BlockUnaug)]
    pub method: MethodArg,
    /// Sample size in years.
    #[arg(long, default_value_t = 120)]
    pub cycles: usize,
    /// Monte Carlo replications per grid point.
    #[arg(long = "N", default_value_t = 300)]
    pub replications: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated local-alternative grid; defaults to 0, 0.004, ..., 0.02.
    #[arg(long, value_delimiter = ',')]
    pub rho: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineArgs,
}
