//! Helpers and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use nkmeans::{impute_missing, read_delimited_file, Dataset, ImputeStrategy, ParseOptions};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

pub fn iris_options() -> ParseOptions {
    ParseOptions {
        label_column: Some(4),
        ..ParseOptions::default()
    }
}

pub fn iris() -> Dataset {
    let raw = read_delimited_file(data_path("iris.data"), &iris_options()).unwrap();
    impute_missing(&raw, ImputeStrategy::Mean).unwrap()
}

/// Iris feature rows read with plain string splitting, independent of the
/// crate's parser.
pub fn iris_rows_by_hand() -> Vec<Vec<f64>> {
    std::fs::read_to_string(data_path("iris.data"))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').take(4).map(|v| v.parse().unwrap()).collect())
        .collect()
}

/// Index of the nearest centroid by exhaustive comparison; ties go to the
/// lowest index.
pub fn brute_nearest(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let d2 = |c: &Vec<f64>| -> f64 { point.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum() };
    let mut best = 0;
    for c in 1..centroids.len() {
        if d2(&centroids[c]) < d2(&centroids[best]) {
            best = c;
        }
    }
    best
}

/// Recomputes the SSE from scratch.
pub fn brute_sse(rows: &[Vec<f64>], centroids: &[Vec<f64>], assignment: &[usize]) -> f64 {
    let mut total = 0.0;
    for (i, row) in rows.iter().enumerate() {
        let c = &centroids[assignment[i]];
        for j in 0..row.len() {
            total += (row[j] - c[j]) * (row[j] - c[j]);
        }
    }
    total
}

pub fn to_rows(d: &Dataset) -> Vec<Vec<f64>> {
    d.rows().map(<[f64]>::to_vec).collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
