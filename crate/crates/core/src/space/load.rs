//! Ingestion of delimiter-separated performance tables.
//!
//! Each environment is one UTF-8 text file with a header row. One column
//! holds the measured performance; every other column is an adaptation
//! option unless explicitly ignored. Option domains are inferred from the
//! data (distinct labels per column, ordered by first appearance) unless an
//! explicit domains file overrides them. Duplicate measurements of the same
//! plan are aggregated.

use std::collections::HashMap;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{ConfigurationSpace, EnvironmentLandscape, OptionDomain};

/// How duplicate measurements of one plan are collapsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    #[default]
    Mean,
    Median,
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::Mean => "mean",
            Aggregation::Median => "median",
        }
    }

    fn apply(self, values: &mut [f64]) -> f64 {
        debug_assert!(!values.is_empty());
        match self {
            Aggregation::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Aggregation::Median => {
                values.sort_by(|a, b| a.partial_cmp(b).expect("values are finite"));
                let n = values.len();
                if n % 2 == 1 {
                    values[n / 2]
                } else {
                    (values[n / 2 - 1] + values[n / 2]) / 2.0
                }
            }
        }
    }
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Aggregation::Mean),
            "median" => Ok(Aggregation::Median),
            other => Err(Error::Argument(format!(
                "unknown aggregation {other:?} (expected mean or median)"
            ))),
        }
    }
}

/// Loader settings shared by every command.
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Name of the performance column.
    pub performance_column: String,
    pub aggregation: Aggregation,
    /// Field delimiter; `None` auto-detects among comma, semicolon and tab.
    pub delimiter: Option<u8>,
    /// Columns that are neither options nor performance.
    pub ignore_columns: Vec<String>,
    /// Accept landscapes with missing plans and restrict all downstream
    /// definitions to measured plans.
    pub partial: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            performance_column: "performance".to_string(),
            aggregation: Aggregation::Mean,
            delimiter: None,
            ignore_columns: Vec::new(),
            partial: false,
        }
    }
}

/// One parsed data row: option labels in column order plus performance.
#[derive(Debug, Clone)]
pub struct RawRow {
    pub labels: Vec<String>,
    pub performance: f64,
    /// 1-based line number in the source file.
    pub line: u64,
}

/// A parsed table, before any space is fixed.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub option_columns: Vec<String>,
    pub rows: Vec<RawRow>,
}

fn sniff_delimiter(text: &str) -> Result<u8> {
    let header = text.lines().next().unwrap_or("");
    let candidates = *b",;\t";
    let counts: Vec<usize> = candidates
        .iter()
        .map(|&d| header.bytes().filter(|&b| b == d).count())
        .collect();
    let best = (0..candidates.len()).max_by_key(|&i| counts[i]).unwrap();
    if counts[best] == 0 {
        return Err(Error::Format {
            line: 1,
            message: "could not detect a delimiter (comma, semicolon or tab) in the header row"
                .into(),
        });
    }
    Ok(candidates[best])
}

/// Parses a delimiter-separated table with a header row.
pub fn read_table<R: Read>(mut source: R, opts: &LoadOptions) -> Result<RawTable> {
    let mut text = String::new();
    source.read_to_string(&mut text).map_err(|source| Error::Io {
        path: "<stream>".into(),
        source,
    })?;
    read_table_str(&text, opts)
}

/// Parses the table in `path`.
pub fn read_table_path(path: &Path, opts: &LoadOptions) -> Result<RawTable> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_table_str(&text, opts)
}

fn read_table_str(text: &str, opts: &LoadOptions) -> Result<RawTable> {
    let delimiter = match opts.delimiter {
        Some(d) => d,
        None => sniff_delimiter(text)?,
    };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(e, 1))?
        .iter()
        .map(|h| h.to_string())
        .collect();

    let perf_pos = headers
        .iter()
        .position(|h| h == &opts.performance_column)
        .ok_or_else(|| Error::Format {
            line: 1,
            message: format!(
                "performance column {:?} not found; header has {:?}",
                opts.performance_column, headers
            ),
        })?;

    let mut option_positions = Vec::new();
    let mut option_columns = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        if i == perf_pos || opts.ignore_columns.iter().any(|c| c == h) {
            continue;
        }
        if option_columns.contains(h) {
            return Err(Error::Format {
                line: 1,
                message: format!("duplicate column name {h:?} in header"),
            });
        }
        option_positions.push(i);
        option_columns.push(h.clone());
    }
    if option_columns.is_empty() {
        return Err(Error::Format {
            line: 1,
            message: "no option columns found (every column is performance or ignored)".into(),
        });
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e
                .position()
                .map(|p| p.line())
                .unwrap_or(rows.len() as u64 + 2);
            csv_error(e, line)
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let raw_perf = &record[perf_pos];
        let performance: f64 = raw_perf.parse().map_err(|_| Error::ParsePerformance {
            line,
            value: raw_perf.to_string(),
        })?;
        if !performance.is_finite() {
            return Err(Error::ParsePerformance {
                line,
                value: raw_perf.to_string(),
            });
        }
        let labels = option_positions
            .iter()
            .map(|&i| record[i].to_string())
            .collect();
        rows.push(RawRow {
            labels,
            performance,
            line,
        });
    }
    Ok(RawTable {
        option_columns,
        rows,
    })
}

fn csv_error(e: csv::Error, line: u64) -> Error {
    match e.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, pos } => Error::Format {
            line: pos.as_ref().map(|p| p.line()).unwrap_or(line),
            message: format!("expected {expected_len} columns, found {len}"),
        },
        _ => Error::Format {
            line,
            message: e.to_string(),
        },
    }
}

/// Infers one shared configuration space from one or more tables.
///
/// Every table must carry the same option columns in the same order. Each
/// domain collects the distinct labels of its column, ordered by first
/// appearance across the tables in the order given.
pub fn infer_space(tables: &[&RawTable]) -> Result<ConfigurationSpace> {
    let first = tables.first().ok_or_else(|| {
        Error::Argument("at least one table is required to infer a space".into())
    })?;
    for t in tables {
        if t.option_columns != first.option_columns {
            return Err(Error::Format {
                line: 1,
                message: format!(
                    "environments disagree on option columns: {:?} vs {:?}",
                    first.option_columns, t.option_columns
                ),
            });
        }
    }
    let n = first.option_columns.len();
    let mut domains: Vec<Vec<String>> = vec![Vec::new(); n];
    let mut seen: Vec<HashMap<String, ()>> = vec![HashMap::new(); n];
    for table in tables {
        for row in &table.rows {
            for (i, label) in row.labels.iter().enumerate() {
                if !seen[i].contains_key(label) {
                    seen[i].insert(label.clone(), ());
                    domains[i].push(label.clone());
                }
            }
        }
    }
    let options = first
        .option_columns
        .iter()
        .zip(domains)
        .map(|(name, values)| OptionDomain::new(name.clone(), values))
        .collect::<Result<Vec<_>>>()?;
    ConfigurationSpace::new(options)
}

/// Parses an explicit domains file.
///
/// One option per non-empty line: `name = value, value, ...`. `#` starts a
/// comment. The line order defines the plan encoding.
pub fn parse_domains_file(text: &str) -> Result<Vec<OptionDomain>> {
    let mut domains = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, values) = line.split_once('=').ok_or_else(|| Error::Format {
            line: i as u64 + 1,
            message: "expected `name = value, value, ...`".into(),
        })?;
        let values: Vec<String> = values
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        domains.push(
            OptionDomain::new(name.trim(), values).map_err(|e| Error::Format {
                line: i as u64 + 1,
                message: e.to_string(),
            })?,
        );
    }
    if domains.is_empty() {
        return Err(Error::Format {
            line: 1,
            message: "domains file declares no options".into(),
        });
    }
    Ok(domains)
}

/// Encodes a table against `space` and aggregates duplicate plans.
///
/// In complete mode (the default) every plan in the space must be measured;
/// otherwise an incompleteness error lists up to 10 missing plans.
pub fn build_landscape(
    environment_id: &str,
    table: &RawTable,
    space: &Arc<ConfigurationSpace>,
    opts: &LoadOptions,
) -> Result<EnvironmentLandscape> {
    // Map space options onto table columns by name.
    let column_of: Vec<usize> = space
        .options()
        .iter()
        .map(|opt| {
            table
                .option_columns
                .iter()
                .position(|c| c == opt.name())
                .ok_or_else(|| Error::Format {
                    line: 1,
                    message: format!(
                        "option {:?} declared for the space is missing from the table columns {:?}",
                        opt.name(),
                        table.option_columns
                    ),
                })
        })
        .collect::<Result<Vec<_>>>()?;

    let label_maps: Vec<HashMap<&str, usize>> = space
        .options()
        .iter()
        .map(|opt| {
            opt.values()
                .iter()
                .enumerate()
                .map(|(i, v)| (v.as_str(), i))
                .collect()
        })
        .collect();

    let mut samples: HashMap<usize, Vec<f64>> = HashMap::new();
    let mut digits = vec![0usize; space.option_count()];
    for row in &table.rows {
        for (pos, (&col, map)) in column_of.iter().zip(&label_maps).enumerate() {
            let label = row.labels[col].as_str();
            digits[pos] = *map.get(label).ok_or_else(|| Error::Domain(format!(
                "value {:?} at line {} is not in the domain of option {:?} (known values {:?})",
                label,
                row.line,
                space.options()[pos].name(),
                space.options()[pos].values()
            )))?;
        }
        let index: usize = digits
            .iter()
            .zip(space.strides())
            .map(|(&v, &s)| v * s)
            .sum();
        samples.entry(index).or_default().push(row.performance);
    }

    let measured_count = samples.len();
    if !opts.partial && measured_count < space.size() {
        let mut examples = Vec::new();
        for i in 0..space.size() {
            if !samples.contains_key(&i) {
                examples.push(space.format_plan(i));
                if examples.len() == 10 {
                    break;
                }
            }
        }
        return Err(Error::Incomplete {
            environment: environment_id.to_string(),
            measured: measured_count,
            expected: space.size(),
            missing: space.size() - measured_count,
            examples: examples.join(", "),
        });
    }

    let mut landscape = if opts.partial && measured_count < space.size() {
        let mut entries: Vec<(usize, f64)> = samples
            .into_iter()
            .map(|(i, mut vs)| (i, opts.aggregation.apply(&mut vs)))
            .collect();
        entries.sort_by_key(|&(i, _)| i);
        EnvironmentLandscape::new_partial(environment_id, Arc::clone(space), &entries)?
    } else {
        let mut performance = vec![0.0; space.size()];
        for (i, mut vs) in samples {
            performance[i] = opts.aggregation.apply(&mut vs);
        }
        EnvironmentLandscape::new_complete(environment_id, Arc::clone(space), performance)?
    };
    landscape.set_row_count(table.rows.len());
    Ok(landscape)
}

/// Loads one environment from a reader, inferring the space from its rows.
pub fn load_environment<R: Read>(
    environment_id: &str,
    source: R,
    opts: &LoadOptions,
) -> Result<EnvironmentLandscape> {
    let table = read_table(source, opts)?;
    let space = Arc::new(infer_space(&[&table])?);
    build_landscape(environment_id, &table, &space, opts)
}

/// Loads one environment from a file. With `space = None` the space is
/// inferred from the file itself.
pub fn load_environment_path(
    environment_id: &str,
    path: &Path,
    opts: &LoadOptions,
    space: Option<&Arc<ConfigurationSpace>>,
) -> Result<EnvironmentLandscape> {
    let table = read_table_path(path, opts)?;
    match space {
        Some(space) => build_landscape(environment_id, &table, space, opts),
        None => {
            let space = Arc::new(infer_space(&[&table])?);
            build_landscape(environment_id, &table, &space, opts)
        }
    }
}

/// Coverage summary of a landscape.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessReport {
    pub size: usize,
    pub measured_count: usize,
    pub missing_count: usize,
    /// Input rows beyond the first for some plan (aggregated away).
    pub duplicate_rows: usize,
    /// Up to 10 missing plans, rendered with labels.
    pub missing_examples: Vec<String>,
}

/// Reports size, coverage and duplicates; never fails.
pub fn validate_completeness(landscape: &EnvironmentLandscape) -> CompletenessReport {
    let size = landscape.space().size();
    let measured_count = landscape.measured_count();
    let mut missing_examples = Vec::new();
    if measured_count < size {
        for i in 0..size {
            if !landscape.is_measured(i) {
                missing_examples.push(landscape.space().format_plan(i));
                if missing_examples.len() == 10 {
                    break;
                }
            }
        }
    }
    CompletenessReport {
        size,
        measured_count,
        missing_count: size - measured_count,
        duplicate_rows: landscape.row_count().saturating_sub(measured_count),
        missing_examples,
    }
}
