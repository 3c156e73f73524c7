//! Benchmark harness: runs the normalized weighted-seeding pipeline and the
//! random-seeding baseline over a grid of `k` values and seeds, then
//! aggregates the results into a [`RunReport`].

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{
    impute_missing, read_delimited_file, Dataset, ImputeStrategy, ParseOptions, RawDataset,
};
use crate::error::{Error, Result};
use crate::init::{nk_initial_centroids, CentroidSet, WeightVector};
use crate::kmeans::{lloyd, random_init, KMeansConfig};
use crate::preprocessing::{compute_bounds, min_max_normalize, FeatureBounds};

pub const DEFAULT_K_VALUES: [usize; 4] = [1, 3, 5, 7];
pub const DEFAULT_NUM_SEEDS: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Min-max normalization, weighted-average seeding, Lloyd.
    NkMeans,
    /// Random row seeding on the normalized data, Lloyd.
    KmeansRandom,
    /// Random row seeding on the un-normalized data, Lloyd.
    KmeansRandomRaw,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::NkMeans => "nk_means",
            Self::KmeansRandom => "kmeans_random",
            Self::KmeansRandomRaw => "kmeans_random_raw",
        }
    }

    pub fn is_seeded(self) -> bool {
        !matches!(self, Self::NkMeans)
    }

    pub fn space(self) -> Space {
        match self {
            Self::KmeansRandomRaw => Space::Raw,
            _ => Space::Normalized,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nk_means" => Ok(Self::NkMeans),
            "kmeans_random" => Ok(Self::KmeansRandom),
            "kmeans_random_raw" => Ok(Self::KmeansRandomRaw),
            _ => Err(Error::InvalidInput(format!(
                "unknown algorithm `{s}` (expected nk_means, kmeans_random or kmeans_random_raw)"
            ))),
        }
    }
}

/// Feature space a run clustered in; SSE values are in that space's units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Normalized,
    Raw,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Normalized => "normalized",
            Self::Raw => "raw",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub input: PathBuf,
    pub parse: ParseOptions,
    pub k_values: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
    /// `None` means uniform weights.
    pub weights: Option<WeightVector>,
    pub impute: ImputeStrategy,
    pub kmeans: KMeansConfig,
}

impl RunSpec {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            parse: ParseOptions::default(),
            k_values: DEFAULT_K_VALUES.to_vec(),
            algorithms: vec![Algorithm::NkMeans, Algorithm::KmeansRandom],
            seeds: (0..DEFAULT_NUM_SEEDS).collect(),
            weights: None,
            impute: ImputeStrategy::default(),
            kmeans: KMeansConfig::default(),
        }
    }

    fn validate(&self, data: &Dataset) -> Result<()> {
        let n = data.n_rows();
        if self.k_values.is_empty() {
            return Err(Error::InvalidInput("no k values requested".into()));
        }
        for &k in &self.k_values {
            if k == 0 || k > n {
                return Err(Error::InvalidK { k, n });
            }
        }
        if has_duplicates(&self.k_values) {
            return Err(Error::InvalidInput("duplicate k values".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidInput("no algorithms requested".into()));
        }
        if has_duplicates(&self.algorithms) {
            return Err(Error::InvalidInput("duplicate algorithms".into()));
        }
        if self.algorithms.iter().any(|a| a.is_seeded()) && self.seeds.is_empty() {
            return Err(Error::InvalidInput(
                "random baseline requested without seeds".into(),
            ));
        }
        if let Some(w) = &self.weights {
            if w.len() != data.n_features() {
                return Err(Error::InvalidWeights(format!(
                    "{} weights given for {} features",
                    w.len(),
                    data.n_features()
                )));
            }
        }
        self.kmeans.validate()
    }
}

fn has_duplicates<T: PartialEq>(items: &[T]) -> bool {
    items
        .iter()
        .enumerate()
        .any(|(i, a)| items[..i].contains(a))
}

/// Median, minimum and maximum of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    /// Panics on an empty sample.
    pub fn of(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "statistics of an empty sample");
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        };
        Self {
            median,
            min: sorted[0],
            max: sorted[sorted.len() - 1],
        }
    }
}

/// One clustering run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub k: usize,
    pub algorithm: Algorithm,
    /// `None` for the deterministic pipeline.
    pub seed: Option<u64>,
    pub initial_rows: Vec<usize>,
    pub iterations: usize,
    pub sse: f64,
    pub converged: bool,
    /// Seeding plus Lloyd iteration, in milliseconds.
    pub wall_time_ms: f64,
    pub centroids: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
}

/// Aggregate over all runs of one `(k, algorithm)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub k: usize,
    pub algorithm: Algorithm,
    pub space: Space,
    pub runs: usize,
    pub wall_time_ms: Stats,
    pub iterations: Stats,
    pub sse: Stats,
    pub converged_fraction: f64,
    /// `k = 1` puts every point in one cluster.
    pub degenerate_k: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub source: String,
    pub n_rows: usize,
    pub n_features: usize,
    pub feature_names: Vec<String>,
    pub labelled: bool,
    pub imputed_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub k_values: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
    pub weights: Vec<f64>,
    pub impute: String,
    pub max_iterations: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub dataset: DatasetInfo,
    pub bounds: FeatureBounds,
    pub degenerate_features: Vec<usize>,
    pub config: ConfigEcho,
    pub entries: Vec<ReportEntry>,
    pub runs: Vec<RunRecord>,
}

impl RunReport {
    pub fn entry(&self, k: usize, algorithm: Algorithm) -> Option<&ReportEntry> {
        self.entries
            .iter()
            .find(|e| e.k == k && e.algorithm == algorithm)
    }

    pub fn runs_for(&self, k: usize, algorithm: Algorithm) -> impl Iterator<Item = &RunRecord> {
        self.runs
            .iter()
            .filter(move |r| r.k == k && r.algorithm == algorithm)
    }
}

/// Loads `spec.input` and runs the full grid.
pub fn run_pipeline(spec: &RunSpec) -> Result<RunReport> {
    let raw = read_delimited_file(&spec.input, &spec.parse)?;
    run_on_raw(&raw, spec, &spec.input.display().to_string())
}

/// Same as [`run_pipeline`] for data that is already parsed.
pub fn run_on_raw(raw: &RawDataset, spec: &RunSpec, source: &str) -> Result<RunReport> {
    let data = impute_missing(raw, spec.impute)?;
    spec.validate(&data)?;
    let bounds = compute_bounds(&data);
    let normalized = min_max_normalize(&data, &bounds)?;
    let weights = spec
        .weights
        .clone()
        .unwrap_or_else(|| WeightVector::uniform(data.n_features()));

    let mut runs = Vec::new();
    for &k in &spec.k_values {
        for &algorithm in &spec.algorithms {
            match algorithm {
                Algorithm::NkMeans => {
                    runs.push(timed_run(
                        k,
                        algorithm,
                        None,
                        &normalized,
                        &spec.kmeans,
                        |d| nk_initial_centroids(d, &weights, k),
                    )?);
                }
                Algorithm::KmeansRandom | Algorithm::KmeansRandomRaw => {
                    let space = match algorithm.space() {
                        Space::Normalized => &normalized,
                        Space::Raw => &data,
                    };
                    for &seed in &spec.seeds {
                        runs.push(timed_run(
                            k,
                            algorithm,
                            Some(seed),
                            space,
                            &spec.kmeans,
                            |d| random_init(d, k, seed),
                        )?);
                    }
                }
            }
        }
    }

    let entries = spec
        .k_values
        .iter()
        .flat_map(|&k| spec.algorithms.iter().map(move |&a| (k, a)))
        .map(|(k, algorithm)| {
            let group: Vec<&RunRecord> = runs
                .iter()
                .filter(|r| r.k == k && r.algorithm == algorithm)
                .collect();
            summarize(k, algorithm, &group)
        })
        .collect();

    Ok(RunReport {
        dataset: DatasetInfo {
            source: source.to_string(),
            n_rows: data.n_rows(),
            n_features: data.n_features(),
            feature_names: data.feature_names().to_vec(),
            labelled: data.labels().is_some(),
            imputed_cells: raw.missing_count(),
        },
        degenerate_features: bounds.degenerate_features(),
        bounds,
        config: ConfigEcho {
            k_values: spec.k_values.clone(),
            algorithms: spec.algorithms.clone(),
            seeds: spec.seeds.clone(),
            weights: weights.as_slice().to_vec(),
            impute: spec.impute.to_string(),
            max_iterations: spec.kmeans.max_iterations,
            tolerance: spec.kmeans.tolerance,
        },
        entries,
        runs,
    })
}

fn timed_run(
    k: usize,
    algorithm: Algorithm,
    seed: Option<u64>,
    data: &Dataset,
    config: &KMeansConfig,
    seed_centroids: impl FnOnce(&Dataset) -> Result<CentroidSet>,
) -> Result<RunRecord> {
    let start = Instant::now();
    let initial = seed_centroids(data)?;
    let result = lloyd(data, &initial, config)?;
    let elapsed = start.elapsed();
    Ok(RunRecord {
        k,
        algorithm,
        seed,
        initial_rows: initial.source_rows.unwrap_or_default(),
        iterations: result.iterations,
        sse: result.sse,
        converged: result.converged,
        wall_time_ms: elapsed.as_secs_f64() * 1e3,
        centroids: result.centroids.centroids,
        assignment: result.assignment.cluster_of,
    })
}

fn summarize(k: usize, algorithm: Algorithm, group: &[&RunRecord]) -> ReportEntry {
    let collect = |f: fn(&RunRecord) -> f64| group.iter().map(|r| f(r)).collect::<Vec<_>>();
    let converged = group.iter().filter(|r| r.converged).count();
    ReportEntry {
        k,
        algorithm,
        space: algorithm.space(),
        runs: group.len(),
        wall_time_ms: Stats::of(&collect(|r| r.wall_time_ms)),
        iterations: Stats::of(&collect(|r| r.iterations as f64)),
        sse: Stats::of(&collect(|r| r.sse)),
        converged_fraction: converged as f64 / group.len() as f64,
        degenerate_k: k == 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Self::Table),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::InvalidInput(format!(
                "unknown format `{s}` (expected table, csv or json)"
            ))),
        }
    }
}

pub const CSV_COLUMNS: [&str; 15] = [
    "k",
    "algorithm",
    "space",
    "runs",
    "time_ms_median",
    "time_ms_min",
    "time_ms_max",
    "iterations_median",
    "iterations_min",
    "iterations_max",
    "sse_median",
    "sse_min",
    "sse_max",
    "converged_fraction",
    "degenerate_k",
];

pub fn emit_report<W: Write>(report: &RunReport, format: ReportFormat, mut sink: W) -> Result<()> {
    let io = |source| Error::Io {
        path: PathBuf::from("<report>"),
        source,
    };
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, report)
                .map_err(|e| Error::InvalidInput(format!("json encoding failed: {e}")))?;
            writeln!(sink).map_err(io)?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink);
            w.write_record(CSV_COLUMNS)?;
            for e in &report.entries {
                let s = &e.wall_time_ms;
                let i = &e.iterations;
                let q = &e.sse;
                w.write_record([
                    e.k.to_string(),
                    e.algorithm.to_string(),
                    e.space.to_string(),
                    e.runs.to_string(),
                    s.median.to_string(),
                    s.min.to_string(),
                    s.max.to_string(),
                    i.median.to_string(),
                    i.min.to_string(),
                    i.max.to_string(),
                    q.median.to_string(),
                    q.min.to_string(),
                    q.max.to_string(),
                    e.converged_fraction.to_string(),
                    e.degenerate_k.to_string(),
                ])?;
            }
            w.flush().map_err(io)?;
        }
        ReportFormat::Table => {
            sink.write_all(render_table(report).as_bytes())
                .map_err(io)?;
        }
    }
    Ok(())
}

pub fn render_report(report: &RunReport, format: ReportFormat) -> Result<String> {
    let mut buf = Vec::new();
    emit_report(report, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("report output is UTF-8"))
}

fn render_table(report: &RunReport) -> String {
    let d = &report.dataset;
    let mut out = format!(
        "dataset: {} ({} rows x {} features, {} imputed cells)\n\n",
        d.source, d.n_rows, d.n_features, d.imputed_cells
    );
    let header = [
        "k",
        "algorithm",
        "space",
        "runs",
        "time_ms",
        "iterations",
        "sse",
        "converged",
    ];
    let rows: Vec<[String; 8]> = report
        .entries
        .iter()
        .map(|e| {
            [
                e.k.to_string(),
                e.algorithm.to_string(),
                e.space.to_string(),
                e.runs.to_string(),
                sig3(e.wall_time_ms.median),
                sig3(e.iterations.median),
                sig3(e.sse.median),
                sig3(e.converged_fraction),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[&str]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (s, &w))| {
                if c == 1 || c == 2 {
                    format!("{s:<w$}")
                } else {
                    format!("{s:>w$}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    out += &line(&header);
    out += &line(
        &widths
            .map(|w| "-".repeat(w))
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>(),
    );
    for row in &rows {
        out += &line(&row.iter().map(String::as_str).collect::<Vec<_>>());
    }
    if report.entries.iter().any(|e| e.algorithm.is_seeded()) {
        out += "\nseeded rows show the median over seeds.\n";
    }
    if report.entries.iter().any(|e| e.degenerate_k) {
        out += "k = 1 is degenerate: every point lands in a single cluster.\n";
    }
    out
}

/// Formats `x` rounded to three significant digits.
pub fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = 2 - magnitude;
    if decimals >= 0 {
        let s = format!("{x:.*}", decimals as usize);
        // rounding may carry into a new digit, e.g. 9.996 -> 10.00
        let reparsed: f64 = s.parse().unwrap_or(x);
        if reparsed.abs().log10().floor() as i32 > magnitude && decimals > 0 {
            format!("{x:.*}", decimals as usize - 1)
        } else {
            s
        }
    } else {
        let scale = 10f64.powi(-decimals);
        format!("{:.0}", (x / scale).round() * scale)
    }
}
