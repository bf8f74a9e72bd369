//! Reading quarterly series from CSV files.

use std::path::Path;

use hegy_core::series::QuarterlySeries;

use crate::error::{CliError, Result};

const MISSING_TOKENS: [&str; 6] = ["", "na", "nan", "null", "none", "."];

/// A `YYYYQn` period label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Period {
    pub year: i32,
    pub quarter: u8,
}

impl Period {
    pub fn parse(s: &str) -> Option<Self> {
        let (year, quarter) = s.trim().split_once(['Q', 'q'])?;
        let year = year.trim_end_matches(['-', ' ']).parse().ok()?;
        let quarter: u8 = quarter.parse().ok()?;
        (1..=4).contains(&quarter).then_some(Self { year, quarter })
    }

    pub fn next(self) -> Self {
        if self.quarter == 4 {
            Self {
                year: self.year + 1,
                quarter: 1,
            }
        } else {
            Self {
                year: self.year,
                quarter: self.quarter + 1,
            }
        }
    }
}

impl std::fmt::Display for Period {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

/// Parsed file contents before the season is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub values: Vec<f64>,
    /// Quarter of the first row when the file carries period labels.
    pub first_period: Option<Period>,
}

fn parse_value(token: &str, line: u64) -> Result<f64> {
    let trimmed = token.trim();
    if MISSING_TOKENS.contains(&trimmed.to_ascii_lowercase().as_str()) {
        return Err(CliError::MissingValue {
            line,
            token: trimmed.to_string(),
        });
    }
    let v: f64 = trimmed.parse().map_err(|_| CliError::Parse {
        line,
        message: format!("`{trimmed}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(CliError::MissingValue {
            line,
            token: trimmed.to_string(),
        });
    }
    Ok(v)
}

fn is_header(record: &csv::StringRecord) -> bool {
    let fields: Vec<String> = record
        .iter()
        .map(|f| f.trim().to_ascii_lowercase())
        .collect();
    matches!(fields.as_slice(), [v] if v == "value")
        || matches!(fields.as_slice(), [p, v] if p == "period" && v == "value")
}

/// Parses CSV text: one value per row, or `period,value` rows with `YYYYQn`
/// periods, each optionally preceded by a header line.
pub fn parse_csv(text: &str) -> Result<Ingested> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut width = None;
    let mut first_period = None;
    let mut expected: Option<Period> = None;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 && is_header(&record) {
            width = Some(record.len());
            continue;
        }
        if record.len() == 1 && record[0].trim().is_empty() && width != Some(1) {
            continue;
        }
        match *width.get_or_insert(record.len()) {
            w if w != record.len() => {
                return Err(CliError::Parse {
                    line,
                    message: format!("expected {w} column(s), found {}", record.len()),
                })
            }
            1 => values.push(parse_value(&record[0], line)?),
            2 => {
                let period = Period::parse(&record[0]).ok_or_else(|| CliError::Parse {
                    line,
                    message: format!("`{}` is not a YYYYQn period", record[0].trim()),
                })?;
                if let Some(want) = expected {
                    if period != want {
                        return Err(CliError::Parse {
                            line,
                            message: format!("period {period} does not follow the previous row (expected {want})"),
                        });
                    }
                }
                first_period.get_or_insert(period);
                expected = Some(period.next());
                values.push(parse_value(&record[1], line)?);
            }
            w => {
                return Err(CliError::Parse {
                    line,
                    message: format!("expected one or two columns, found {w}"),
                })
            }
        }
    }
    if values.is_empty() {
        return Err(CliError::EmptyInput);
    }
    Ok(Ingested {
        values,
        first_period,
    })
}

/// Reads a series from `path`. The start season comes from the first period
/// label when present, otherwise from `start_season` (default 1).
pub fn ingest_csv(path: &Path, start_season: Option<u8>) -> Result<QuarterlySeries> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed = parse_csv(&text)?;
    let season = match (parsed.first_period, start_season) {
        (Some(p), Some(s)) if p.quarter != s => {
            return Err(CliError::Config(format!(
                "--start-season {s} contradicts the first period {p} of the input"
            )))
        }
        (Some(p), _) => p.quarter,
        (None, s) => s.unwrap_or(1),
    };
    if !(1..=4).contains(&season) {
        return Err(CliError::Config(format!(
            "--start-season must be 1..4, got {season}"
        )));
    }
    Ok(QuarterlySeries::new(parsed.values, season)?)
}
