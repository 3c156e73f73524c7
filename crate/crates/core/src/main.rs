use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use nkmeans::bench::{self, DEFAULT_NUM_SEEDS};
use nkmeans::dataset::sniff_label_column;
use nkmeans::{
    compute_bounds, impute_missing, min_max_normalize, parse_delimited, write_delimited, Algorithm,
    Error, ImputeStrategy, KMeansConfig, ParseOptions, ReportFormat, RunSpec, WeightVector,
};

/// Benchmark min-max normalized k-means with weighted-average seeding
/// against randomly seeded k-means.
#[derive(Debug, Parser)]
#[command(name = "nkmeans-bench", version)]
struct Cli {
    /// Delimited numeric input file.
    #[arg(long)]
    input: PathBuf,

    /// Comma-separated cluster counts.
    #[arg(long = "k", value_delimiter = ',', default_value = "1,3,5,7")]
    k_values: Vec<usize>,

    /// Comma-separated subset of nk_means, kmeans_random, kmeans_random_raw.
    #[arg(long, value_delimiter = ',', default_value = "nk_means,kmeans_random")]
    algorithms: Vec<Algorithm>,

    /// Explicit comma-separated seeds for the random baseline.
    #[arg(long, value_delimiter = ',', conflicts_with = "num_seeds")]
    seeds: Option<Vec<u64>>,

    /// Use seeds 0..N for the random baseline.
    #[arg(long, default_value_t = DEFAULT_NUM_SEEDS)]
    num_seeds: u64,

    /// Comma-separated per-feature weights (default: all 1).
    #[arg(long)]
    weights: Option<WeightVector>,

    /// mean, min, max or constant:C.
    #[arg(long, default_value = "mean")]
    impute: ImputeStrategy,

    #[arg(long = "max-iter", default_value_t = 100)]
    max_iter: usize,

    #[arg(long, default_value_t = 1e-9)]
    tol: f64,

    /// Also run the random baseline on the un-normalized data.
    #[arg(long)]
    baseline_raw: bool,

    /// table, csv or json.
    #[arg(long, default_value = "table")]
    format: ReportFormat,

    /// Report destination (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,

    /// The first line of the input holds column names.
    #[arg(long)]
    header: bool,

    #[arg(long, default_value_t = ',')]
    delimiter: char,

    /// Label column index, `none`, or `auto` (last column if it is not numeric).
    #[arg(long, default_value = "auto")]
    label_column: String,

    /// Comma-separated cell values treated as missing.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = ",?",
        allow_hyphen_values = true
    )]
    missing_tokens: Vec<String>,

    /// Write the imputed, normalized dataset to this path.
    #[arg(long)]
    normalized_output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let io_err = |path: &PathBuf| {
        let path = path.clone();
        move |source| Error::Io { path, source }
    };
    if !cli.delimiter.is_ascii() {
        return Err(Error::InvalidInput(
            "delimiter must be a single ASCII character".into(),
        ));
    }
    let text = fs::read_to_string(&cli.input).map_err(io_err(&cli.input))?;

    let mut parse = ParseOptions {
        delimiter: cli.delimiter as u8,
        has_header: cli.header,
        label_column: None,
        missing_tokens: cli.missing_tokens.clone(),
    };
    parse.label_column = match cli.label_column.as_str() {
        "auto" => sniff_label_column(&text, &parse),
        "none" => None,
        s => Some(
            s.parse()
                .map_err(|_| Error::InvalidInput(format!("invalid label column `{s}`")))?,
        ),
    };

    let mut algorithms = cli.algorithms.clone();
    if cli.baseline_raw && !algorithms.contains(&Algorithm::KmeansRandomRaw) {
        algorithms.push(Algorithm::KmeansRandomRaw);
    }
    let spec = RunSpec {
        input: cli.input.clone(),
        parse,
        k_values: cli.k_values.clone(),
        algorithms,
        seeds: cli
            .seeds
            .clone()
            .unwrap_or_else(|| (0..cli.num_seeds).collect()),
        weights: cli.weights.clone(),
        impute: cli.impute,
        kmeans: KMeansConfig {
            max_iterations: cli.max_iter,
            tolerance: cli.tol,
        },
    };

    let raw = parse_delimited(text.as_bytes(), &spec.parse)?;
    let report = bench::run_on_raw(&raw, &spec, &cli.input.display().to_string())?;

    if let Some(path) = &cli.normalized_output {
        let data = impute_missing(&raw, spec.impute)?;
        let normalized = min_max_normalize(&data, &compute_bounds(&data))?;
        let file = File::create(path).map_err(io_err(path))?;
        write_delimited(&normalized, BufWriter::new(file), spec.parse.delimiter)?;
    }

    match &cli.output {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            let mut sink = BufWriter::new(file);
            bench::emit_report(&report, cli.format, &mut sink)?;
            sink.flush().map_err(io_err(path))?;
        }
        None => {
            let stdout = io::stdout();
            bench::emit_report(&report, cli.format, stdout.lock())?;
        }
    }
    Ok(())
}
