//! Monte Carlo laboratory: the data-generating processes, noise types, rejection
//! experiments, power curves and the block-size reference tables.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::boot_block::{block_bootstrap_test, BlockBootConfig};
use crate::boot_iid::{iid_bootstrap_test, IidBootConfig};
use crate::bootstrap::{replicate_error, run_indexed, Method};
use crate::error::{HegyError, Result};
use crate::hegy::Hypothesis;
use crate::rng::{derive_seed, stream};
use crate::series::{ar_recursion, LagPolynomial, QuarterlySeries};

/// Burn-in discarded from autoregressive noise.
pub const NOISE_BURN_IN: usize = 100;
/// Burn-in discarded from fully stationary series.
pub const STATIONARY_BURN_IN: usize = 200;
/// Local-alternative grid of the power study.
pub const RHO_GRID: [f64; 6] = [0.0, 0.004, 0.008, 0.012, 0.016, 0.020];

pub const HETER_SIGMA: [f64; 4] = [10.0, 1.0, 1.0, 1.0];
pub const MA_COEFFICIENT: f64 = 0.5;
pub const AR_COEFFICIENT: f64 = 0.5;
pub const PERIODIC_AR: [f64; 4] = [0.2, 0.45, 0.65, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// `V_t = e_t`
    Iid,
    /// `V_t = sigma_s e_t` with `sigma = (10, 1, 1, 1)`
    Heter,
    /// `V_t = e_t + 0.5 e_{t-1}`
    MaPos,
    /// `V_t = e_t - 0.5 e_{t-1}`
    MaNeg,
    /// `V_t = 0.5 V_{t-1} + e_t`
    Ar,
    /// `V_t = phi_s V_{t-1} + e_t` with `phi = (0.2, 0.45, 0.65, 0.8)`
    Period,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 6] = [
        NoiseKind::Iid,
        NoiseKind::Heter,
        NoiseKind::MaPos,
        NoiseKind::MaNeg,
        NoiseKind::Ar,
        NoiseKind::Period,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Iid => "iid",
            NoiseKind::Heter => "heter",
            NoiseKind::MaPos => "ma_pos",
            NoiseKind::MaNeg => "ma_neg",
            NoiseKind::Ar => "ar",
            NoiseKind::Period => "period",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = HegyError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| HegyError::Configuration(format!("unknown noise type `{s}`")))
    }
}

/// Noise of length `n`; position 0 is season 1.
pub fn generate_noise<R: Rng + ?Sized>(kind: NoiseKind, n: usize, rng: &mut R) -> Vec<f64> {
    let mut draw = || -> f64 { rng.sample(StandardNormal) };
    match kind {
        NoiseKind::Iid => (0..n).map(|_| draw()).collect(),
        NoiseKind::Heter => (0..n).map(|p| HETER_SIGMA[p % 4] * draw()).collect(),
        NoiseKind::MaPos | NoiseKind::MaNeg => {
            let theta = if kind == NoiseKind::MaPos {
                MA_COEFFICIENT
            } else {
                -MA_COEFFICIENT
            };
            let mut prev = draw();
            (0..n)
                .map(|_| {
                    let e = draw();
                    let v = e + theta * prev;
                    prev = e;
                    v
                })
                .collect()
        }
        NoiseKind::Ar | NoiseKind::Period => {
            // the burn-in is a whole number of years, so seasons stay aligned
            let mut v = 0.0;
            let mut out = Vec::with_capacity(n);
            for p in 0..NOISE_BURN_IN + n {
                let phi = if kind == NoiseKind::Ar {
                    AR_COEFFICIENT
                } else {
                    PERIODIC_AR[p % 4]
                };
                v = phi * v + draw();
                if p >= NOISE_BURN_IN {
                    out.push(v);
                }
            }
            out
        }
    }
}

/// Frequency of the unit root under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetRoot {
    Plus1,
    Minus1,
    Complex,
}

impl TargetRoot {
    pub const ALL: [TargetRoot; 3] = [TargetRoot::Plus1, TargetRoot::Minus1, TargetRoot::Complex];

    /// Null hypothesis that matches this root.
    pub fn hypothesis(self) -> Hypothesis {
        match self {
            TargetRoot::Plus1 => Hypothesis::Root1,
            TargetRoot::Minus1 => Hypothesis::Root2,
            TargetRoot::Complex => Hypothesis::Roots34,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TargetRoot::Plus1 => "plus1",
            TargetRoot::Minus1 => "minus1",
            TargetRoot::Complex => "complex",
        }
    }
}

impl fmt::Display for TargetRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TargetRoot {
    type Err = HegyError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plus1" | "1" | "+1" => Ok(TargetRoot::Plus1),
            "minus1" | "-1" => Ok(TargetRoot::Minus1),
            "complex" | "i" | "+-i" | "±i" => Ok(TargetRoot::Complex),
            _ => Err(HegyError::Configuration(format!("unknown root `{s}`"))),
        }
    }
}

/// One data-generating process: a target-root filter with parameter `rho`,
/// optionally multiplied by the remaining seasonal unit-root factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub target_root: TargetRoot,
    pub nuisance: bool,
    pub rho: f64,
    pub noise: NoiseKind,
    /// Number of years `T`; the series has `4T` observations.
    pub cycles: usize,
}

impl DgpSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.rho) {
            return Err(HegyError::Configuration(format!(
                "rho must lie in [0, 1), got {}",
                self.rho
            )));
        }
        if self.cycles == 0 {
            return Err(HegyError::Configuration(
                "at least one year is required".into(),
            ));
        }
        Ok(())
    }

    /// Composite autoregressive filter applied to `Y`.
    pub fn filter(&self) -> LagPolynomial {
        let a = 1.0 - self.rho;
        let (target, nuisance) = match self.target_root {
            TargetRoot::Plus1 => (
                LagPolynomial::monic_binomial(1, a),
                &LagPolynomial::monic_binomial(1, -1.0) * &LagPolynomial::monic_binomial(2, -1.0),
            ),
            TargetRoot::Minus1 => (
                LagPolynomial::monic_binomial(1, -a),
                &LagPolynomial::monic_binomial(1, 1.0) * &LagPolynomial::monic_binomial(2, -1.0),
            ),
            TargetRoot::Complex => (
                LagPolynomial::monic_binomial(2, -a),
                LagPolynomial::monic_binomial(2, 1.0),
            ),
        };
        if self.nuisance {
            &nuisance * &target
        } else {
            target
        }
    }

    fn is_stationary(&self) -> bool {
        self.rho > 0.0 && !self.nuisance
    }
}

/// Simulates `4T` observations starting in season 1 from zero initial values.
pub fn generate_series<R: Rng + ?Sized>(spec: &DgpSpec, rng: &mut R) -> Result<QuarterlySeries> {
    spec.validate()?;
    let n = 4 * spec.cycles;
    let burn = if spec.is_stationary() {
        STATIONARY_BURN_IN
    } else {
        0
    };
    let noise = generate_noise(spec.noise, burn + n, rng);
    let filter = spec.filter();
    let y = ar_recursion(&filter, &noise, &vec![0.0; filter.degree()])?;
    QuarterlySeries::from_values(y[burn..].to_vec())
}

/// A test that decides on a single series.
pub trait RejectionProcedure: Sync {
    fn rejects(&self, y: &QuarterlySeries, seed: u64) -> Result<bool>;
}

impl<F> RejectionProcedure for F
where
    F: Fn(&QuarterlySeries, u64) -> Result<bool> + Sync,
{
    fn rejects(&self, y: &QuarterlySeries, seed: u64) -> Result<bool> {
        self(y, seed)
    }
}

/// Bootstrap test with its configuration; the seed is replaced per replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum BootstrapProcedure {
    IidAug {
        hypothesis: Hypothesis,
        config: IidBootConfig,
    },
    BlockUnaug {
        hypothesis: Hypothesis,
        config: BlockBootConfig,
    },
}

impl BootstrapProcedure {
    pub fn method(&self) -> Method {
        match self {
            BootstrapProcedure::IidAug { .. } => Method::IidAug,
            BootstrapProcedure::BlockUnaug { .. } => Method::BlockUnaug,
        }
    }

    pub fn hypothesis(&self) -> Hypothesis {
        match self {
            BootstrapProcedure::IidAug { hypothesis, .. }
            | BootstrapProcedure::BlockUnaug { hypothesis, .. } => *hypothesis,
        }
    }
}

impl RejectionProcedure for BootstrapProcedure {
    fn rejects(&self, y: &QuarterlySeries, seed: u64) -> Result<bool> {
        match self {
            BootstrapProcedure::IidAug { hypothesis, config } => {
                let cfg = IidBootConfig {
                    seed,
                    ..config.clone()
                };
                Ok(iid_bootstrap_test(y, *hypothesis, &cfg)?.reject)
            }
            BootstrapProcedure::BlockUnaug { hypothesis, config } => {
                let cfg = BlockBootConfig {
                    seed,
                    ..config.clone()
                };
                Ok(block_bootstrap_test(y, *hypothesis, &cfg)?.reject)
            }
        }
    }
}

/// Rejection frequency over independent replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub rejection_rate: f64,
    pub replications: usize,
    pub decisions: Vec<bool>,
    pub standard_error: f64,
    /// Elapsed time; not serialised so reports stay reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ExperimentResult {
    pub fn from_decisions(decisions: Vec<bool>, wall_time: Duration) -> Self {
        let n = decisions.len();
        let rate = decisions.iter().filter(|&&d| d).count() as f64 / n as f64;
        Self {
            rejection_rate: rate,
            replications: n,
            standard_error: (rate * (1.0 - rate) / n as f64).sqrt(),
            decisions,
            wall_time,
        }
    }
}

/// Runs `f` and measures it. The wasm32-unknown-unknown target has no clock,
/// so there the elapsed time is reported as zero.
fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    #[cfg(not(target_arch = "wasm32"))]
    {
        let started = std::time::Instant::now();
        let out = f();
        (out, started.elapsed())
    }
    #[cfg(target_arch = "wasm32")]
    {
        (f(), Duration::ZERO)
    }
}

/// Runs `replications` independent (simulate, test) pairs. Replication `r` draws
/// its data from stream `(seed, r, 0)` and tests with seed `(seed, r, 1)`.
pub fn empirical_rejection<P: RejectionProcedure + ?Sized>(
    dgp: &DgpSpec,
    procedure: &P,
    replications: usize,
    seed: u64,
) -> Result<ExperimentResult> {
    if replications == 0 {
        return Err(HegyError::Configuration(
            "at least one replication is required".into(),
        ));
    }
    dgp.validate()?;
    let (decisions, elapsed) = timed(|| {
        run_indexed(replications, |r| {
            let r64 = r as u64;
            let run = || -> Result<bool> {
                let y = generate_series(dgp, &mut stream(seed, &[r64, 0]))?;
                procedure.rejects(&y, derive_seed(seed, &[r64, 1]))
            };
            run().map_err(replicate_error(r, derive_seed(seed, &[r64, 0])))
        })
    });
    Ok(ExperimentResult::from_decisions(decisions?, elapsed))
}

/// One point of a power curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerPoint {
    pub rho: f64,
    pub result: ExperimentResult,
}

/// Rejection rates along a grid of `rho`; every grid point reuses `seed`.
pub fn power_curve<P: RejectionProcedure + ?Sized>(
    template: &DgpSpec,
    rho_grid: &[f64],
    procedure: &P,
    replications: usize,
    seed: u64,
) -> Result<Vec<PowerPoint>> {
    if rho_grid.is_empty() {
        return Err(HegyError::Configuration("empty rho grid".into()));
    }
    rho_grid
        .iter()
        .map(|&rho| {
            let dgp = DgpSpec { rho, ..*template };
            Ok(PowerPoint {
                rho,
                result: empirical_rejection(&dgp, procedure, replications, seed)?,
            })
        })
        .collect()
}

/// Sample constant-parameter autocovariance: the average over seasons of the
/// per-season mean of `V_t V_{t-h}`.
pub fn tilde_gamma(v: &QuarterlySeries, h: usize) -> Result<f64> {
    let x = v.values();
    let needed = 4 + h;
    if x.len() < needed {
        return Err(HegyError::SeriesTooShort {
            needed,
            got: x.len(),
        });
    }
    let mut sums = [0.0; 4];
    let mut counts = [0usize; 4];
    for t in h..x.len() {
        let s = (t + v.start_season() as usize - 1) % 4;
        sums[s] += x[t] * x[t - h];
        counts[s] += 1;
    }
    Ok((0..4).map(|s| sums[s] / counts[s] as f64).sum::<f64>() / 4.0)
}

/// Column of a block-size reference table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TableColumn {
    pub statistic: TableStatistic,
    pub block_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableStatistic {
    Pi,
    T,
    F,
}

impl fmt::Display for TableColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.statistic {
            TableStatistic::Pi => "pi",
            TableStatistic::T => "t",
            TableStatistic::F => "F",
        };
        write!(f, "{s}{}", self.block_size)
    }
}

impl FromStr for TableColumn {
    type Err = HegyError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (statistic, rest) = if let Some(r) = s.strip_prefix("pi") {
            (TableStatistic::Pi, r)
        } else if let Some(r) = s.strip_prefix(['t', 'T']) {
            (TableStatistic::T, r)
        } else if let Some(r) = s.strip_prefix(['F', 'f']) {
            (TableStatistic::F, r)
        } else {
            return Err(HegyError::Configuration(format!(
                "unknown table column `{s}`"
            )));
        };
        let block_size = rest
            .parse()
            .map_err(|_| HegyError::Configuration(format!("unknown table column `{s}`")))?;
        Ok(Self {
            statistic,
            block_size,
        })
    }
}

/// Reference empirical sizes of the block bootstrap at `T = 120`, `B = 250`,
/// `N = 300`, level 0.05, for each target root.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceTable {
    pub number: u8,
    pub target_root: TargetRoot,
    pub columns: &'static [TableColumn],
    /// `rows[nuisance as usize][noise index][column]`
    rows: [[&'static [f64]; 6]; 2],
}

const PI_T_COLUMNS: [TableColumn; 6] = [
    TableColumn {
        statistic: TableStatistic::Pi,
        block_size: 4,
    },
    TableColumn {
        statistic: TableStatistic::Pi,
        block_size: 8,
    },
    TableColumn {
        statistic: TableStatistic::Pi,
        block_size: 12,
    },
    TableColumn {
        statistic: TableStatistic::T,
        block_size: 4,
    },
    TableColumn {
        statistic: TableStatistic::T,
        block_size: 8,
    },
    TableColumn {
        statistic: TableStatistic::T,
        block_size: 12,
    },
];

const F_COLUMNS: [TableColumn; 3] = [
    TableColumn {
        statistic: TableStatistic::F,
        block_size: 4,
    },
    TableColumn {
        statistic: TableStatistic::F,
        block_size: 8,
    },
    TableColumn {
        statistic: TableStatistic::F,
        block_size: 12,
    },
];

pub const REFERENCE_TABLES: [ReferenceTable; 3] = [
    ReferenceTable {
        number: 3,
        target_root: TargetRoot::Plus1,
        columns: &PI_T_COLUMNS,
        rows: [
            [
                &[0.067, 0.047, 0.043, 0.067, 0.050, 0.040],
                &[0.057, 0.067, 0.050, 0.053, 0.063, 0.040],
                &[0.090, 0.050, 0.030, 0.087, 0.050, 0.023],
                &[0.080, 0.073, 0.093, 0.080, 0.060, 0.093],
                &[0.043, 0.047, 0.063, 0.047, 0.053, 0.060],
                &[0.043, 0.043, 0.047, 0.047, 0.043, 0.047],
            ],
            [
                &[0.137, 0.123, 0.110, 0.117, 0.110, 0.110],
                &[0.160, 0.160, 0.193, 0.160, 0.150, 0.190],
                &[0.063, 0.053, 0.073, 0.053, 0.043, 0.057],
                &[0.517, 0.500, 0.570, 0.527, 0.500, 0.567],
                &[0.010, 0.023, 0.033, 0.010, 0.020, 0.030],
                &[0.017, 0.003, 0.023, 0.017, 0.007, 0.023],
            ],
        ],
    },
    ReferenceTable {
        number: 4,
        target_root: TargetRoot::Minus1,
        columns: &PI_T_COLUMNS,
        rows: [
            [
                &[0.040, 0.043, 0.053, 0.040, 0.047, 0.050],
                &[0.040, 0.073, 0.040, 0.047, 0.060, 0.033],
                &[0.080, 0.080, 0.073, 0.073, 0.080, 0.073],
                &[0.060, 0.063, 0.043, 0.063, 0.067, 0.043],
                &[0.040, 0.047, 0.050, 0.047, 0.047, 0.053],
                &[0.030, 0.037, 0.050, 0.037, 0.033, 0.063],
            ],
            [
                &[0.143, 0.127, 0.127, 0.143, 0.120, 0.130],
                &[0.123, 0.147, 0.177, 0.120, 0.140, 0.173],
                &[0.483, 0.543, 0.533, 0.463, 0.550, 0.523],
                &[0.070, 0.083, 0.077, 0.070, 0.070, 0.077],
                &[0.240, 0.313, 0.343, 0.233, 0.313, 0.333],
                &[0.247, 0.327, 0.310, 0.243, 0.310, 0.303],
            ],
        ],
    },
    ReferenceTable {
        number: 5,
        target_root: TargetRoot::Complex,
        columns: &F_COLUMNS,
        rows: [
            [
                &[0.053, 0.050, 0.047],
                &[0.067, 0.090, 0.073],
                &[0.067, 0.060, 0.047],
                &[0.073, 0.040, 0.083],
                &[0.047, 0.030, 0.030],
                &[0.053, 0.040, 0.027],
            ],
            [
                &[0.017, 0.020, 0.017],
                &[0.013, 0.020, 0.010],
                &[0.087, 0.063, 0.097],
                &[0.060, 0.067, 0.123],
                &[0.113, 0.147, 0.120],
                &[0.093, 0.100, 0.090],
            ],
        ],
    },
];

/// Setting of the block-size study.
pub const TABLE_CYCLES: usize = 120;
pub const TABLE_REPLICATES: usize = 250;
pub const TABLE_REPLICATIONS: usize = 300;

impl ReferenceTable {
    pub fn by_number(number: u8) -> Result<&'static ReferenceTable> {
        REFERENCE_TABLES
            .iter()
            .find(|t| t.number == number)
            .ok_or_else(|| HegyError::Configuration(format!("no reference table {number}")))
    }

    pub fn value(&self, cell: &TableCell) -> Result<f64> {
        let col = self
            .columns
            .iter()
            .position(|c| *c == cell.column)
            .ok_or_else(|| {
                HegyError::Configuration(format!(
                    "table {} has no column {}",
                    self.number, cell.column
                ))
            })?;
        let noise = NoiseKind::ALL
            .iter()
            .position(|k| *k == cell.noise)
            .expect("noise kind");
        Ok(self.rows[cell.nuisance as usize][noise][col])
    }

    /// Every cell of the table in row-major order.
    pub fn cells(&self) -> Vec<TableCell> {
        let mut out = Vec::new();
        for nuisance in [false, true] {
            for noise in NoiseKind::ALL {
                for column in self.columns {
                    out.push(TableCell {
                        nuisance,
                        noise,
                        column: *column,
                    });
                }
            }
        }
        out
    }

    /// The simulation design and test procedure that reproduce `cell`.
    pub fn experiment(&self, cell: &TableCell, replicates: usize) -> (DgpSpec, BootstrapProcedure) {
        let dgp = DgpSpec {
            target_root: self.target_root,
            nuisance: cell.nuisance,
            rho: 0.0,
            noise: cell.noise,
            cycles: TABLE_CYCLES,
        };
        let statistic = match cell.column.statistic {
            TableStatistic::Pi => crate::hegy::SingleRootStatistic::Pi,
            _ => crate::hegy::SingleRootStatistic::T,
        };
        let procedure = BootstrapProcedure::BlockUnaug {
            hypothesis: self.target_root.hypothesis(),
            config: BlockBootConfig {
                replicates,
                block_size: cell.column.block_size,
                statistic,
                ..Default::default()
            },
        };
        (dgp, procedure)
    }
}

/// `(nuisance, noise, column)` address within a reference table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TableCell {
    pub nuisance: bool,
    pub noise: NoiseKind,
    pub column: TableColumn,
}

impl FromStr for TableCell {
    type Err = HegyError;

    /// Parses `"False,iid,t4"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [nuisance, noise, column] = parts.as_slice() else {
            return Err(HegyError::Configuration(format!(
                "cell `{s}` must look like `False,iid,t4`"
            )));
        };
        let nuisance = match nuisance.to_ascii_lowercase().as_str() {
            "true" | "yes" => true,
            "false" | "no" => false,
            _ => {
                return Err(HegyError::Configuration(format!(
                    "nuisance flag `{nuisance}` must be True or False"
                )))
            }
        };
        Ok(Self {
            nuisance,
            noise: noise.parse()?,
            column: column.parse()?,
        })
    }
}

impl fmt::Display for TableCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = if self.nuisance { "True" } else { "False" };
        write!(f, "{n},{},{}", self.noise, self.column)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(target_root: TargetRoot, nuisance: bool, rho: f64, noise: NoiseKind) -> DgpSpec {
        DgpSpec {
            target_root,
            nuisance,
            rho,
            noise,
            cycles: 30,
        }
    }

    #[test]
    fn filters_match_the_design() {
        let c = |t, n, r| {
            spec(t, n, r, NoiseKind::Iid)
                .filter()
                .coefficients()
                .to_vec()
        };
        assert_eq!(c(TargetRoot::Plus1, false, 0.25), vec![1.0, -0.75]);
        assert_eq!(c(TargetRoot::Minus1, false, 0.25), vec![1.0, 0.75]);
        assert_eq!(c(TargetRoot::Complex, false, 0.25), vec![1.0, 0.0, 0.75]);
        for t in TargetRoot::ALL {
            // at rho = 0 every nuisance design is the full seasonal difference
            assert_eq!(c(t, true, 0.0), vec![1.0, 0.0, 0.0, 0.0, -1.0]);
        }
        // (1+L)(1+L^2)(1-0.9L) expanded by hand
        let want = [1.0, 0.1, 0.1, 0.1, -0.9];
        for (a, b) in c(TargetRoot::Plus1, true, 0.1).iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_noise_gives_zero_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = spec(TargetRoot::Plus1, false, 0.0, NoiseKind::Iid);
        let y = ar_recursion(&s.filter(), &[0.0; 40], &[0.0]).unwrap();
        assert!(y.iter().all(|&v| v == 0.0));
        assert_eq!(generate_series(&s, &mut rng).unwrap().len(), 120);
    }

    #[test]
    fn differencing_recovers_the_noise() {
        let s = spec(TargetRoot::Plus1, false, 0.0, NoiseKind::Iid);
        let y = generate_series(&s, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let v = generate_noise(NoiseKind::Iid, 120, &mut ChaCha8Rng::seed_from_u64(3));
        let y = y.values();
        assert_eq!(y[0], v[0]);
        for t in 1..120 {
            assert!((y[t] - y[t - 1] - v[t]).abs() < 1e-12);
        }
        let s = spec(TargetRoot::Complex, true, 0.0, NoiseKind::Ar);
        let y = generate_series(&s, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let v = generate_noise(NoiseKind::Ar, 120, &mut ChaCha8Rng::seed_from_u64(4));
        let y = y.values();
        for t in 4..120 {
            assert!((y[t] - y[t - 4] - v[t]).abs() < 1e-10);
        }
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let s = spec(TargetRoot::Minus1, false, 0.012, NoiseKind::Period);
        let a = generate_series(&s, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = generate_series(&s, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn always_rejecting_oracle() {
        let s = spec(TargetRoot::Plus1, false, 0.0, NoiseKind::Iid);
        let always = |_: &QuarterlySeries, _: u64| -> Result<bool> { Ok(true) };
        let r = empirical_rejection(&s, &always, 25, 1).unwrap();
        assert_eq!(r.rejection_rate, 1.0);
        assert_eq!(r.standard_error, 0.0);
        let curve = power_curve(&s, &[0.0], &always, 5, 1).unwrap();
        assert_eq!(curve.len(), 1);
    }

    #[test]
    fn failing_replications_carry_their_seed() {
        let s = spec(TargetRoot::Plus1, false, 0.0, NoiseKind::Iid);
        let fails =
            |_: &QuarterlySeries, _: u64| -> Result<bool> { Err(HegyError::ZeroResidualVariance) };
        match empirical_rejection(&s, &fails, 3, 1) {
            Err(HegyError::Replicate { index: 0, seed, .. }) => {
                assert_eq!(seed, derive_seed(1, &[0, 0]))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reference_cells() {
        let t3 = ReferenceTable::by_number(3).unwrap();
        assert_eq!(t3.value(&"False,iid,t4".parse().unwrap()).unwrap(), 0.067);
        let t4 = ReferenceTable::by_number(4).unwrap();
        assert_eq!(t4.value(&"True,ma_pos,t4".parse().unwrap()).unwrap(), 0.463);
        let t5 = ReferenceTable::by_number(5).unwrap();
        assert_eq!(t5.value(&"False,iid,F4".parse().unwrap()).unwrap(), 0.053);
        assert!(t5.value(&"False,iid,t4".parse().unwrap()).is_err());
        assert_eq!(t3.cells().len(), 72);
        assert_eq!(t5.cells().len(), 36);
        let cell: TableCell = "True,ma_neg,pi12".parse().unwrap();
        assert_eq!(cell.to_string(), "True,ma_neg,pi12");
        assert_eq!(t3.value(&cell).unwrap(), 0.570);
    }

    #[test]
    fn parsing_names() {
        assert_eq!("ma-pos".parse::<NoiseKind>().unwrap(), NoiseKind::MaPos);
        assert!("garch".parse::<NoiseKind>().is_err());
        assert_eq!("minus1".parse::<TargetRoot>().unwrap(), TargetRoot::Minus1);
    }

    #[test]
    fn tilde_gamma_needs_data() {
        let v = QuarterlySeries::from_values(vec![1.0; 5]).unwrap();
        assert!(tilde_gamma(&v, 2).is_err());
        assert_eq!(tilde_gamma(&v, 1).unwrap(), 1.0);
    }
}
