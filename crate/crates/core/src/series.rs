//! Quarterly series container and the lag-filter algebra used by every test.
//!
//! Indices in the public API are 1-based to match the usual time-series
//! notation `y[t]`, `t = 1..n`. Seasons run 1..4; a season number `s` maps to
//! the conventional offset `s - 4` in the `4t + s` quarterly indexing.

use serde::{Deserialize, Serialize};
use std::ops::Mul;

use crate::error::{HegyError, Result};

/// Season (1..=4) of the observation `offset` steps after one in `start_season`.
#[inline]
pub fn season_after(start_season: u8, offset: usize) -> u8 {
    ((start_season as usize - 1 + offset) % 4 + 1) as u8
}

/// A finite quarterly series with calendar alignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarterlySeries {
    values: Vec<f64>,
    start_season: u8,
}

impl QuarterlySeries {
    pub fn new(values: Vec<f64>, start_season: u8) -> Result<Self> {
        if values.is_empty() {
            return Err(HegyError::InvalidSeries("series is empty".into()));
        }
        if !(1..=4).contains(&start_season) {
            return Err(HegyError::InvalidSeries(format!(
                "start season {start_season} is outside 1..4"
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(HegyError::InvalidSeries(format!(
                "non-finite value at position {}",
                pos + 1
            )));
        }
        Ok(Self {
            values,
            start_season,
        })
    }

    /// Series whose first observation falls in season 1.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn start_season(&self) -> u8 {
        self.start_season
    }

    /// Season of the 1-based observation `t`.
    pub fn season_of(&self, t: usize) -> u8 {
        debug_assert!(t >= 1);
        season_after(self.start_season, t - 1)
    }

    /// Number of complete years, failing unless the length is a multiple of four.
    pub fn require_full_years(&self) -> Result<usize> {
        if !self.values.len().is_multiple_of(4) {
            return Err(HegyError::LengthNotMultipleOfFour(self.values.len()));
        }
        Ok(self.values.len() / 4)
    }
}

/// `(1 - L^4) y`, defined for `t = 5..n`.
pub fn seasonal_difference(y: &QuarterlySeries) -> Result<QuarterlySeries> {
    if y.len() < 5 {
        return Err(HegyError::SeriesTooShort {
            needed: 5,
            got: y.len(),
        });
    }
    let v = y.values();
    let out = (4..v.len()).map(|i| v[i] - v[i - 4]).collect();
    QuarterlySeries::new(out, y.season_of(5))
}

/// The four HEGY regressors on a common window starting at `t = first_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct HegyRegressors {
    /// `Y1..Y4`; element `i` of each corresponds to original index `first_index + i`.
    pub series: [QuarterlySeries; 4],
    pub first_index: usize,
}

/// Channel filters isolating the roots at 1, -1 and ±i:
///
/// * `Y1 = (1 + L)(1 + L^2) y`
/// * `Y2 = -(1 - L)(1 + L^2) y`
/// * `Y3 = -L(1 - L^2) y`
/// * `Y4 = -(1 - L^2) y`
pub fn hegy_transform(y: &QuarterlySeries) -> Result<HegyRegressors> {
    if y.len() < 4 {
        return Err(HegyError::SeriesTooShort {
            needed: 4,
            got: y.len(),
        });
    }
    let v = y.values();
    let m = v.len() - 3;
    let mut cols: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(m));
    for i in 3..v.len() {
        let ch = hegy_channels(v[i], v[i - 1], v[i - 2], v[i - 3]);
        for (col, x) in cols.iter_mut().zip(ch) {
            col.push(x);
        }
    }
    let start = y.season_of(4);
    let [c1, c2, c3, c4] = cols;
    Ok(HegyRegressors {
        series: [
            QuarterlySeries::new(c1, start)?,
            QuarterlySeries::new(c2, start)?,
            QuarterlySeries::new(c3, start)?,
            QuarterlySeries::new(c4, start)?,
        ],
        first_index: 4,
    })
}

/// `(Y1, Y2, Y3, Y4)` at time `t` from `y[t], y[t-1], y[t-2], y[t-3]`.
#[inline(always)]
pub(crate) fn hegy_channels(y0: f64, y1: f64, y2: f64, y3: f64) -> [f64; 4] {
    [
        y0 + y1 + y2 + y3,
        -(y0 - y1 + y2 - y3),
        -(y1 - y3),
        -(y0 - y2),
    ]
}

/// A lag polynomial `c0 + c1 L + ... + cp L^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagPolynomial {
    coefficients: Vec<f64>,
}

impl LagPolynomial {
    pub fn new(coefficients: Vec<f64>) -> Self {
        assert!(
            !coefficients.is_empty(),
            "a lag polynomial needs at least one coefficient"
        );
        Self { coefficients }
    }

    pub fn one() -> Self {
        Self::new(vec![1.0])
    }

    /// `1 - a L^lag`.
    pub fn monic_binomial(lag: usize, a: f64) -> Self {
        let mut c = vec![0.0; lag + 1];
        c[0] = 1.0;
        c[lag] -= a;
        Self::new(c)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Applies the filter to `x`; output index `i` corresponds to `x[i + degree]`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let p = self.degree();
        if x.len() <= p {
            return Vec::new();
        }
        (p..x.len())
            .map(|t| {
                self.coefficients
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * x[t - i])
                    .sum()
            })
            .collect()
    }
}

/// Coefficient convolution.
pub fn multiply_polynomials(a: &LagPolynomial, b: &LagPolynomial) -> LagPolynomial {
    let mut out = vec![0.0; a.coefficients.len() + b.coefficients.len() - 1];
    for (i, x) in a.coefficients.iter().enumerate() {
        for (j, y) in b.coefficients.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    LagPolynomial::new(out)
}

impl Mul for &LagPolynomial {
    type Output = LagPolynomial;

    fn mul(self, rhs: &LagPolynomial) -> LagPolynomial {
        multiply_polynomials(self, rhs)
    }
}

/// Solves `filter(L) y = driver` forward in time.
///
/// `initial` holds the `degree` pre-sample values, oldest first; the output
/// has the same length as `driver` and excludes them.
pub fn ar_recursion(filter: &LagPolynomial, driver: &[f64], initial: &[f64]) -> Result<Vec<f64>> {
    let c = filter.coefficients();
    let p = filter.degree();
    if c[0] != 1.0 {
        return Err(HegyError::DimensionMismatch(format!(
            "recursion filter must be monic, leading coefficient is {}",
            c[0]
        )));
    }
    if initial.len() != p {
        return Err(HegyError::DimensionMismatch(format!(
            "filter of degree {p} needs {p} initial values, got {}",
            initial.len()
        )));
    }
    let mut buf = Vec::with_capacity(p + driver.len());
    buf.extend_from_slice(initial);
    for (t, d) in driver.iter().enumerate() {
        let now = p + t;
        let mut v = *d;
        for i in 1..=p {
            v -= c[i] * buf[now - i];
        }
        buf.push(v);
    }
    Ok(buf.split_off(p))
}
