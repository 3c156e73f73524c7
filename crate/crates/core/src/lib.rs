//! Min-max normalized k-means with deterministic centroid seeding.
//!
//! The pipeline loads a delimited numeric dataset, fills missing cells,
//! rescales every feature into `[0, 1]`, seeds `k` centroids by sorting
//! points on a weighted-average score and picking one representative per
//! score block, then runs Lloyd's iteration. A random-seeding baseline and a
//! benchmark harness are included for comparison.
//!
//! ```
//! use nkmeans::{lloyd, min_max_normalize, compute_bounds, nk_initial_centroids};
//! use nkmeans::{Dataset, KMeansConfig, WeightVector};
//!
//! let data = Dataset::from_rows(&[[1.0, 10.0], [2.0, 12.0], [9.0, 30.0], [10.0, 31.0]]).unwrap();
//! let normalized = min_max_normalize(&data, &compute_bounds(&data)).unwrap();
//! let init = nk_initial_centroids(&normalized, &WeightVector::uniform(2), 2).unwrap();
//! let result = lloyd(&normalized, &init, &KMeansConfig::default()).unwrap();
//! assert_eq!(result.assignment.cluster_of, vec![0, 0, 1, 1]);
//! ```

pub mod bench;
pub mod dataset;
pub mod error;
pub mod init;
pub mod kmeans;
pub mod preprocessing;

pub use bench::{
    emit_report, run_on_raw, run_pipeline, Algorithm, ReportFormat, RunReport, RunSpec,
};
pub use dataset::{
    impute_missing, parse_delimited, read_delimited_file, write_delimited, Dataset, ImputeStrategy,
    ParseOptions, RawDataset,
};
pub use error::{Error, Result};
pub use init::{
    nearest_to_mean, nk_initial_centroids, partition_k, score_and_sort, weighted_score,
    CentroidSet, ScoredPoint, WeightVector,
};
pub use kmeans::{
    assign_points, euclidean_distance, lloyd, random_init, sse, update_centroids, Assignment,
    ClusteringResult, KMeansConfig,
};
pub use preprocessing::{compute_bounds, denormalize_point, min_max_normalize, FeatureBounds};
