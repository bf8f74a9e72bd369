//! Bootstrap HEGY seasonal unit-root tests for quarterly data.
//!
//! * [`series`] — quarterly series, the HEGY transform and lag-polynomial algebra.
//! * [`linreg`] — least squares, t and F statistics, VIF and t pruning.
//! * [`hegy`] — pooled HEGY regressions and the season-by-season regression.
//! * [`boot_iid`] — seasonal iid bootstrap of the augmented test.
//! * [`boot_block`] — seasonal block bootstrap of the unaugmented test.
//! * [`sim`] — data-generating processes and Monte Carlo experiments.

pub mod boot_block;
pub mod boot_iid;
pub mod bootstrap;
pub mod error;
pub mod hegy;
pub mod linreg;
pub mod rng;
pub mod series;
pub mod sim;

pub use error::{HegyError, Result};
