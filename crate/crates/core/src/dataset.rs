//! Delimited dataset loading, missing-value imputation and the in-memory
//! [`Dataset`] matrix shared by the rest of the crate.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Options controlling [`parse_delimited`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParseOptions {
    pub delimiter: u8,
    pub has_header: bool,
    /// Zero-based index of a text column holding class labels. It is kept
    /// for reporting and never used as a clustering feature.
    pub label_column: Option<usize>,
    /// Cells equal to one of these (after trimming) are treated as missing.
    pub missing_tokens: Vec<String>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            has_header: false,
            label_column: None,
            missing_tokens: vec![String::new(), "?".to_string()],
        }
    }
}

/// Parsed but not yet cleaned input: feature cells may be missing.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    /// Names of the feature columns, in file order, label column excluded.
    pub column_names: Vec<String>,
    /// One record per data row; each holds one cell per feature column.
    pub rows: Vec<Vec<Option<f64>>>,
    /// Label cells, present iff `label_column` is set.
    pub labels: Option<Vec<String>>,
    /// Index of the label column in the original file layout.
    pub label_column: Option<usize>,
}

impl RawDataset {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.column_names.len()
    }

    pub fn missing_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.iter().filter(|c| c.is_none()).count())
            .sum()
    }

    fn column(&self, j: usize) -> impl Iterator<Item = Option<f64>> + '_ {
        self.rows.iter().map(move |r| r[j])
    }
}

/// A dense n x m matrix of finite feature values, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n_rows: usize,
    n_features: usize,
    feature_names: Vec<String>,
    labels: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset from row-major `values`.
    ///
    /// Fails if the shape is empty or inconsistent, if any value is not
    /// finite, or if `labels` does not have one entry per row.
    pub fn new(
        values: Vec<f64>,
        n_rows: usize,
        feature_names: Vec<String>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let n_features = feature_names.len();
        if n_rows == 0 || n_features == 0 {
            return Err(Error::InvalidInput(format!(
                "dataset must have at least one row and one feature (got {n_rows}x{n_features})"
            )));
        }
        if values.len() != n_rows * n_features {
            return Err(Error::Dimension {
                expected: n_rows * n_features,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at row {}, feature {}",
                pos / n_features,
                pos % n_features
            )));
        }
        if let Some(l) = &labels {
            if l.len() != n_rows {
                return Err(Error::Dimension {
                    expected: n_rows,
                    found: l.len(),
                });
            }
        }
        Ok(Self {
            values,
            n_rows,
            n_features,
            feature_names,
            labels,
        })
    }

    /// Convenience constructor with generated feature names and no labels.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * m);
        for r in rows {
            let r = r.as_ref();
            if r.len() != m {
                return Err(Error::Dimension {
                    expected: m,
                    found: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::new(values, rows.len(), default_names(m), None)
    }

    /// Same names and labels, new values of identical shape.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(
            values,
            self.n_rows,
            self.feature_names.clone(),
            self.labels.clone(),
        )
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Row-major cell values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_features)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }
}

fn default_names(m: usize) -> Vec<String> {
    (0..m).map(|j| format!("x{j}")).collect()
}

/// Parses delimited text into a [`RawDataset`].
///
/// Blank lines are skipped. Row numbers in errors are 1-based line numbers
/// of the input; column numbers are 1-based.
pub fn parse_delimited<R: Read>(source: R, options: &ParseOptions) -> Result<RawDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut expected = if options.has_header {
        Some(reader.headers()?.len())
    } else {
        None
    };
    let header: Option<Vec<String>> = if options.has_header {
        Some(reader.headers()?.iter().map(str::to_string).collect())
    } else {
        None
    };

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let width = *expected.get_or_insert(record.len());
        if record.len() != width {
            return Err(Error::RaggedRow {
                row: line,
                expected: width,
                found: record.len(),
            });
        }
        if let Some(lc) = options.label_column {
            if lc >= width {
                return Err(Error::InvalidInput(format!(
                    "label column {lc} out of range for {width} columns"
                )));
            }
        }

        let mut cells = Vec::with_capacity(width);
        for (j, field) in record.iter().enumerate() {
            if Some(j) == options.label_column {
                labels.push(field.to_string());
                continue;
            }
            if options.missing_tokens.iter().any(|t| t == field) {
                cells.push(None);
                continue;
            }
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                row: line,
                column: j + 1,
                message: format!("`{field}` is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    row: line,
                    column: j + 1,
                    message: format!("`{field}` is not a finite number"),
                });
            }
            cells.push(Some(value));
        }
        rows.push(cells);
    }

    let width = match expected {
        Some(w) if !rows.is_empty() => w,
        _ => return Err(Error::InvalidInput("no data rows".to_string())),
    };
    let all_names = header.unwrap_or_else(|| default_names(width));
    let column_names = all_names
        .into_iter()
        .enumerate()
        .filter(|(j, _)| Some(*j) != options.label_column)
        .map(|(_, n)| n)
        .collect();

    Ok(RawDataset {
        column_names,
        rows,
        labels: options.label_column.map(|_| labels),
        label_column: options.label_column,
    })
}

pub fn read_delimited_file(path: impl AsRef<Path>, options: &ParseOptions) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_delimited(std::io::BufReader::new(file), options)
}

/// Guesses the label column: the last field of the first data row, if that
/// field is neither numeric nor a missing token.
pub fn sniff_label_column(text: &str, options: &ParseOptions) -> Option<usize> {
    let delimiter = options.delimiter as char;
    let first = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .nth(usize::from(options.has_header))?;
    let fields: Vec<&str> = first.split(delimiter).map(str::trim).collect();
    let last = fields.last()?;
    let numeric = last.parse::<f64>().is_ok();
    let missing = options.missing_tokens.iter().any(|t| t == last);
    (!numeric && !missing && fields.len() > 1).then(|| fields.len() - 1)
}

/// Writes a dataset as delimited text with a header row. Labels, if any,
/// go in a trailing `label` column.
///
/// Values use the shortest representation that parses back to the same
/// `f64`, so [`parse_delimited`] recovers them exactly.
pub fn write_delimited<W: Write>(data: &Dataset, sink: W, delimiter: u8) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(sink);
    let mut header: Vec<&str> = data.feature_names().iter().map(String::as_str).collect();
    if data.labels().is_some() {
        header.push("label");
    }
    writer.write_record(&header)?;
    for (i, row) in data.rows().enumerate() {
        let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        if let Some(labels) = data.labels() {
            record.push(labels[i].clone());
        }
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// Per-column statistic used to fill missing cells.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum ImputeStrategy {
    Constant(f64),
    #[default]
    Mean,
    Minimum,
    Maximum,
}

impl fmt::Display for ImputeStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "constant:{c}"),
            Self::Mean => f.write_str("mean"),
            Self::Minimum => f.write_str("min"),
            Self::Maximum => f.write_str("max"),
        }
    }
}

impl FromStr for ImputeStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Self::Mean),
            "min" | "minimum" => Ok(Self::Minimum),
            "max" | "maximum" => Ok(Self::Maximum),
            _ => {
                let c = s
                    .strip_prefix("constant:")
                    .and_then(|c| c.parse::<f64>().ok())
                    .filter(|c| c.is_finite())
                    .ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "unknown imputation `{s}` (expected mean, min, max or constant:C)"
                        ))
                    })?;
                Ok(Self::Constant(c))
            }
        }
    }
}

/// Replaces every missing cell with the strategy's statistic over the
/// non-missing cells of its column.
pub fn impute_missing(raw: &RawDataset, strategy: ImputeStrategy) -> Result<Dataset> {
    let m = raw.n_features();
    let mut fill = Vec::with_capacity(m);
    for j in 0..m {
        let present = raw.column(j).flatten();
        let stat = match strategy {
            ImputeStrategy::Constant(c) => Some(c),
            ImputeStrategy::Mean => {
                let (sum, count) = present.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
                (count > 0).then(|| sum / count as f64)
            }
            ImputeStrategy::Minimum => present.reduce(f64::min),
            ImputeStrategy::Maximum => present.reduce(f64::max),
        };
        let needed = raw.column(j).any(|c| c.is_none());
        match stat {
            Some(v) => fill.push(v),
            None if !needed => fill.push(0.0),
            None => {
                return Err(Error::Imputation {
                    column: raw.column_names[j].clone(),
                })
            }
        }
    }

    let values = raw
        .rows
        .iter()
        .flat_map(|r| r.iter().zip(&fill).map(|(c, f)| c.unwrap_or(*f)))
        .collect();
    Dataset::new(
        values,
        raw.n_rows(),
        raw.column_names.clone(),
        raw.labels.clone(),
    )
}
