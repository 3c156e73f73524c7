//! Lloyd's k-means iteration and the seeded random-row baseline seeding.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::init::CentroidSet;

/// Cluster index of every point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub cluster_of: Vec<usize>,
}

impl Assignment {
    pub fn len(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cluster_of.is_empty()
    }

    /// Number of points in each of `k` clusters.
    pub fn cluster_sizes(&self, k: usize) -> Vec<usize> {
        let mut sizes = vec![0; k];
        for &c in &self.cluster_of {
            sizes[c] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub max_iterations: usize,
    /// Largest per-coordinate centroid movement still considered converged.
    pub tolerance: f64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            tolerance: 1e-9,
        }
    }
}

impl KMeansConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !self.tolerance.is_finite() || self.tolerance < 0.0 {
            return Err(Error::InvalidInput(format!(
                "tolerance must be a finite non-negative number, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub centroids: CentroidSet,
    pub assignment: Assignment,
    /// Number of update + reassign rounds performed.
    pub iterations: usize,
    pub sse: f64,
    /// SSE of the initial state followed by the SSE after each round.
    pub sse_history: Vec<f64>,
    pub wall_time: Duration,
    pub converged: bool,
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}

#[inline]
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    Ok(squared_distance(a, b).sqrt())
}

fn nearest(point: &[f64], centroids: &CentroidSet) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (c, centroid) in centroids.centroids.iter().enumerate() {
        let d = squared_distance(point, centroid);
        // strict: ties stay with the lower index
        if d < best_dist {
            best = c;
            best_dist = d;
        }
    }
    best
}

/// Assigns each point to its nearest centroid; ties go to the lowest index.
pub fn assign_points(data: &Dataset, centroids: &CentroidSet) -> Result<Assignment> {
    check_dims(data.n_features(), centroids.dim())?;
    Ok(Assignment {
        cluster_of: data.rows().map(|p| nearest(p, centroids)).collect(),
    })
}

/// Moves each centroid to the mean of its points. A centroid with no points
/// keeps its previous position.
pub fn update_centroids(
    data: &Dataset,
    assignment: &Assignment,
    previous: &CentroidSet,
) -> Result<CentroidSet> {
    check_dims(data.n_features(), previous.dim())?;
    check_dims(data.n_rows(), assignment.len())?;
    let (k, m) = (previous.k(), previous.dim());
    if let Some(&bad) = assignment.cluster_of.iter().find(|&&c| c >= k) {
        return Err(Error::InvalidInput(format!(
            "assignment refers to cluster {bad} but only {k} centroids exist"
        )));
    }

    let mut sums = vec![vec![0.0; m]; k];
    let mut counts = vec![0usize; k];
    for (row, &c) in data.rows().zip(&assignment.cluster_of) {
        counts[c] += 1;
        for (s, v) in sums[c].iter_mut().zip(row) {
            *s += v;
        }
    }
    let centroids = sums
        .into_iter()
        .zip(&counts)
        .zip(&previous.centroids)
        .map(|((sum, &count), prev)| {
            if count == 0 {
                prev.clone()
            } else {
                sum.into_iter().map(|s| s / count as f64).collect()
            }
        })
        .collect();
    Ok(CentroidSet {
        centroids,
        source_rows: None,
    })
}

/// Sum over points of the squared distance to the assigned centroid.
pub fn sse(data: &Dataset, centroids: &CentroidSet, assignment: &Assignment) -> Result<f64> {
    check_dims(data.n_features(), centroids.dim())?;
    check_dims(data.n_rows(), assignment.len())?;
    data.rows()
        .zip(&assignment.cluster_of)
        .map(|(p, &c)| {
            centroids
                .centroids
                .get(c)
                .map(|centroid| squared_distance(p, centroid))
                .ok_or_else(|| Error::InvalidInput(format!("no centroid {c}")))
        })
        .sum()
}

fn max_shift(a: &CentroidSet, b: &CentroidSet) -> f64 {
    a.centroids
        .iter()
        .zip(&b.centroids)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
        .fold(0.0, f64::max)
}

/// Runs Lloyd's iteration from `initial`.
///
/// Each round recomputes centroids as cluster means and then reassigns
/// points. It stops when the assignment no longer changes, when no centroid
/// coordinate moved more than `config.tolerance`, or after
/// `config.max_iterations` rounds.
pub fn lloyd(
    data: &Dataset,
    initial: &CentroidSet,
    config: &KMeansConfig,
) -> Result<ClusteringResult> {
    config.validate()?;
    check_dims(data.n_features(), initial.dim())?;
    if initial.k() > data.n_rows() {
        return Err(Error::InvalidK {
            k: initial.k(),
            n: data.n_rows(),
        });
    }

    let start = Instant::now();
    let mut centroids = initial.clone();
    let mut assignment = assign_points(data, &centroids)?;
    let mut sse_history = vec![sse(data, &centroids, &assignment)?];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iterations {
        let updated = update_centroids(data, &assignment, &centroids)?;
        let reassigned = assign_points(data, &updated)?;
        iterations += 1;

        let shift = max_shift(&centroids, &updated);
        let stable = reassigned == assignment;
        centroids = updated;
        assignment = reassigned;
        sse_history.push(sse(data, &centroids, &assignment)?);

        if stable || shift <= config.tolerance {
            converged = true;
            break;
        }
    }
    let wall_time = start.elapsed();

    Ok(ClusteringResult {
        sse: *sse_history.last().expect("initial SSE recorded"),
        centroids,
        assignment,
        iterations,
        sse_history,
        wall_time,
        converged,
    })
}

/// Picks `k` distinct rows uniformly at random (partial Fisher-Yates driven
/// by ChaCha8 seeded with `seed`).
pub fn random_init(data: &Dataset, k: usize, seed: u64) -> Result<CentroidSet> {
    let n = data.n_rows();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        indices.swap(i, j);
    }
    indices.truncate(k);
    CentroidSet::from_rows(data, indices)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(values: &[f64]) -> Dataset {
        let rows: Vec<[f64; 1]> = values.iter().map(|v| [*v]).collect();
        Dataset::from_rows(&rows).unwrap()
    }

    fn cs(points: &[&[f64]]) -> CentroidSet {
        CentroidSet::new(points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn distances() {
        assert_eq!(euclidean_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(euclidean_distance(&[1.5, -2.0], &[1.5, -2.0]).unwrap(), 0.0);
        let d = euclidean_distance(&[1.0, 1.0], &[2.0, 2.0]).unwrap();
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(euclidean_distance(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn assigns_to_nearest() {
        let a = assign_points(&line(&[0.0, 1.0, 10.0]), &cs(&[&[0.0], &[10.0]])).unwrap();
        assert_eq!(a.cluster_of, vec![0, 0, 1]);
    }

    #[test]
    fn assignment_tie_goes_to_lower_index() {
        let a = assign_points(&line(&[5.0]), &cs(&[&[0.0], &[10.0]])).unwrap();
        assert_eq!(a.cluster_of, vec![0]);
        let a = assign_points(&line(&[5.0]), &cs(&[&[10.0], &[0.0]])).unwrap();
        assert_eq!(a.cluster_of, vec![0]);
    }

    #[test]
    fn single_centroid_takes_everything() {
        let a = assign_points(&line(&[-3.0, 0.0, 8.0]), &cs(&[&[100.0]])).unwrap();
        assert_eq!(a.cluster_of, vec![0, 0, 0]);
    }

    #[test]
    fn assign_dimension_mismatch() {
        assert!(matches!(
            assign_points(&line(&[0.0]), &cs(&[&[0.0, 1.0]])),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn update_moves_to_mean() {
        let d = Dataset::from_rows(&[[0.0, 0.0], [2.0, 2.0]]).unwrap();
        let a = Assignment {
            cluster_of: vec![0, 0],
        };
        let c = update_centroids(&d, &a, &cs(&[&[5.0, 5.0]])).unwrap();
        assert_eq!(c.centroids, vec![vec![1.0, 1.0]]);
    }

    #[test]
    fn empty_cluster_keeps_previous_centroid() {
        let d = line(&[0.0, 2.0]);
        let a = Assignment {
            cluster_of: vec![0, 0],
        };
        let c = update_centroids(&d, &a, &cs(&[&[0.0], &[42.0]])).unwrap();
        assert_eq!(c.centroids, vec![vec![1.0], vec![42.0]]);
    }

    #[test]
    fn singleton_clusters_equal_points() {
        let d = line(&[3.0, 7.0, -1.0]);
        let a = Assignment {
            cluster_of: vec![2, 0, 1],
        };
        let c = update_centroids(&d, &a, &cs(&[&[0.0], &[0.0], &[0.0]])).unwrap();
        assert_eq!(c.centroids, vec![vec![7.0], vec![-1.0], vec![3.0]]);
    }

    #[test]
    fn update_rejects_out_of_range_cluster() {
        let a = Assignment {
            cluster_of: vec![1],
        };
        assert!(update_centroids(&line(&[0.0]), &a, &cs(&[&[0.0]])).is_err());
    }

    #[test]
    fn sse_values() {
        let d = Dataset::from_rows(&[[0.0, 0.0]]).unwrap();
        let one = Assignment {
            cluster_of: vec![0],
        };
        assert_eq!(sse(&d, &cs(&[&[3.0, 4.0]]), &one).unwrap(), 25.0);
        assert_eq!(sse(&d, &cs(&[&[0.0, 0.0]]), &one).unwrap(), 0.0);
        let a = Assignment {
            cluster_of: vec![0, 0],
        };
        assert_eq!(sse(&line(&[0.0, 1.0]), &cs(&[&[0.5]]), &a).unwrap(), 0.5);
    }

    #[test]
    fn lloyd_two_groups_on_a_line() {
        let d = line(&[0.0, 1.0, 10.0, 11.0]);
        let r = lloyd(&d, &cs(&[&[0.0], &[10.0]]), &KMeansConfig::default()).unwrap();
        assert_eq!(r.centroids.centroids, vec![vec![0.5], vec![10.5]]);
        assert_eq!(r.assignment.cluster_of, vec![0, 0, 1, 1]);
        assert!(r.converged);
        assert_eq!(r.sse, 1.0);
        assert_eq!(r.sse_history, vec![2.0, 1.0]);
    }

    #[test]
    fn lloyd_from_fixed_point() {
        let d = line(&[0.0, 1.0, 10.0, 11.0]);
        let init = cs(&[&[0.5], &[10.5]]);
        let r = lloyd(&d, &init, &KMeansConfig::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.centroids.centroids, init.centroids);
    }

    #[test]
    fn lloyd_every_point_a_centroid() {
        let d = Dataset::from_rows(&[[0.0, 1.0], [2.0, 3.0], [4.0, 4.0]]).unwrap();
        let init = CentroidSet::from_rows(&d, vec![0, 1, 2]).unwrap();
        let r = lloyd(&d, &init, &KMeansConfig::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.sse, 0.0);
    }

    #[test]
    fn lloyd_respects_iteration_cap() {
        let d = line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let config = KMeansConfig {
            max_iterations: 1,
            tolerance: 0.0,
        };
        let r = lloyd(&d, &cs(&[&[0.0], &[1.0]]), &config).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(!r.converged);
    }

    #[test]
    fn lloyd_rejects_bad_input() {
        let d = line(&[0.0, 1.0]);
        assert!(lloyd(&d, &cs(&[&[0.0, 0.0]]), &KMeansConfig::default()).is_err());
        assert!(lloyd(&d, &cs(&[&[0.0], &[1.0], &[2.0]]), &KMeansConfig::default()).is_err());
        let bad = KMeansConfig {
            max_iterations: 0,
            ..Default::default()
        };
        assert!(lloyd(&d, &cs(&[&[0.0]]), &bad).is_err());
        let bad = KMeansConfig {
            tolerance: f64::NAN,
            ..Default::default()
        };
        assert!(lloyd(&d, &cs(&[&[0.0]]), &bad).is_err());
    }

    #[test]
    fn random_init_is_seeded() {
        let d = line(&(0..30).map(f64::from).collect::<Vec<_>>());
        let a = random_init(&d, 4, 11).unwrap();
        assert_eq!(a, random_init(&d, 4, 11).unwrap());
        assert_eq!(a.k(), 4);
    }

    #[test]
    fn random_init_k_equals_n_draws_all_rows() {
        let d = line(&[5.0, 6.0, 7.0, 8.0]);
        let mut rows = random_init(&d, 4, 3).unwrap().source_rows.unwrap();
        rows.sort_unstable();
        assert_eq!(rows, vec![0, 1, 2, 3]);
    }

    #[test]
    fn random_init_rejects_bad_k() {
        let d = line(&[5.0, 6.0]);
        assert!(matches!(random_init(&d, 0, 1), Err(Error::InvalidK { .. })));
        assert!(matches!(random_init(&d, 3, 1), Err(Error::InvalidK { .. })));
    }
}
