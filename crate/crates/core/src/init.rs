//! Deterministic centroid seeding from weighted-average point scores.
//!
//! Every point gets a scalar score `(w_1 x_1 + ... + w_m x_m) / m`. Points are
//! sorted by score, the sorted sequence is cut into `k` contiguous blocks of
//! near-equal size, and from each block the point whose score lies closest
//! to the block's mean score becomes an initial centroid. The data is
//! expected to be min-max normalized already so that no feature dominates
//! the score by scale alone.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Non-negative per-feature weights with at least one positive entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("no weights given".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidWeights(format!(
                "weight {w} is not a finite non-negative number"
            )));
        }
        if weights.iter().all(|w| *w == 0.0) {
            return Err(Error::InvalidWeights("all weights are zero".into()));
        }
        Ok(Self(weights))
    }

    /// All weights equal to 1.
    pub fn uniform(m: usize) -> Self {
        Self(vec![1.0; m.max(1)])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Same vector multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|w| w * factor).collect())
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// Parses a comma-separated list such as `1,1,2,0.5`.
impl FromStr for WeightVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let weights = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidWeights(format!("`{t}` is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(weights)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredPoint {
    pub row_index: usize,
    pub score: f64,
}

/// `k` points in feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidSet {
    pub centroids: Vec<Vec<f64>>,
    /// Dataset rows the centroids were copied from, when they are data points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_rows: Option<Vec<usize>>,
}

impl CentroidSet {
    /// Centroids that are not tied to particular data rows.
    pub fn new(centroids: Vec<Vec<f64>>) -> Result<Self> {
        let set = Self {
            centroids,
            source_rows: None,
        };
        set.validate()?;
        Ok(set)
    }

    /// Centroids copied from the given rows of `data`.
    pub fn from_rows(data: &Dataset, rows: Vec<usize>) -> Result<Self> {
        let n = data.n_rows();
        if let Some(&bad) = rows.iter().find(|&&r| r >= n) {
            return Err(Error::InvalidInput(format!(
                "row {bad} out of range for {n} rows"
            )));
        }
        let set = Self {
            centroids: rows.iter().map(|&r| data.row(r).to_vec()).collect(),
            source_rows: Some(rows),
        };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        let m = self.dim();
        if self.centroids.is_empty() || m == 0 {
            return Err(Error::InvalidInput("empty centroid set".into()));
        }
        for c in &self.centroids {
            if c.len() != m {
                return Err(Error::Dimension {
                    expected: m,
                    found: c.len(),
                });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite centroid coordinate".into()));
            }
        }
        if let Some(rows) = &self.source_rows {
            let mut sorted = rows.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != rows.len() || rows.len() != self.centroids.len() {
                return Err(Error::InvalidInput(
                    "source rows must be distinct, one per centroid".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn dim(&self) -> usize {
        self.centroids.first().map_or(0, Vec::len)
    }

    pub fn get(&self, c: usize) -> &[f64] {
        &self.centroids[c]
    }
}

/// `(sum_j w_j * x_j) / m`.
pub fn weighted_score(point: &[f64], weights: &WeightVector) -> Result<f64> {
    if point.len() != weights.len() {
        return Err(Error::Dimension {
            expected: weights.len(),
            found: point.len(),
        });
    }
    let total: f64 = point
        .iter()
        .zip(weights.as_slice())
        .map(|(x, w)| w * x)
        .sum();
    Ok(total / point.len() as f64)
}

/// Scores every row and sorts ascending by score, then by row index.
pub fn score_and_sort(data: &Dataset, weights: &WeightVector) -> Result<Vec<ScoredPoint>> {
    let mut scored = data
        .rows()
        .enumerate()
        .map(|(row_index, row)| {
            weighted_score(row, weights).map(|score| ScoredPoint { row_index, score })
        })
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| {
        a.score
            .total_cmp(&b.score)
            .then(a.row_index.cmp(&b.row_index))
    });
    Ok(scored)
}

/// Splits `sorted` into `k` contiguous blocks. The first `n % k` blocks hold
/// `n / k + 1` points, the rest `n / k`.
pub fn partition_k(sorted: &[ScoredPoint], k: usize) -> Result<Vec<&[ScoredPoint]>> {
    let n = sorted.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let (base, extra) = (n / k, n % k);
    let mut blocks = Vec::with_capacity(k);
    let mut rest = sorted;
    for b in 0..k {
        let (head, tail) = rest.split_at(base + usize::from(b < extra));
        blocks.push(head);
        rest = tail;
    }
    Ok(blocks)
}

/// Relative slack under which two distances to a block mean count as equal.
/// Rounding in the mean makes exactly symmetric points (e.g. the two members
/// of a two-point block) differ by a few ulps.
const TIE_TOLERANCE: f64 = 1e-12;

/// Row of the point whose score is closest to the subset's mean score.
/// Equidistant points resolve to the lowest row index.
pub fn nearest_to_mean(subset: &[ScoredPoint]) -> Result<usize> {
    let first = subset
        .first()
        .ok_or_else(|| Error::InvalidInput("empty subset".into()))?;
    let mean = subset.iter().map(|p| p.score).sum::<f64>() / subset.len() as f64;
    let scale = subset
        .iter()
        .map(|p| p.score.abs())
        .fold(mean.abs(), f64::max);
    let slack = TIE_TOLERANCE * scale;

    let mut best = first;
    let mut best_dist = (first.score - mean).abs();
    for p in &subset[1..] {
        let dist = (p.score - mean).abs();
        let tied = (dist - best_dist).abs() <= slack;
        if (tied && p.row_index < best.row_index) || (!tied && dist < best_dist) {
            best = p;
            best_dist = dist;
        }
    }
    Ok(best.row_index)
}

/// Full seeding pass: score, sort, partition, then pick one row per block.
pub fn nk_initial_centroids(
    data: &Dataset,
    weights: &WeightVector,
    k: usize,
) -> Result<CentroidSet> {
    let n = data.n_rows();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let sorted = score_and_sort(data, weights)?;
    let rows = partition_k(&sorted, k)?
        .into_iter()
        .map(nearest_to_mean)
        .collect::<Result<Vec<_>>>()?;
    CentroidSet::from_rows(data, rows)
}
