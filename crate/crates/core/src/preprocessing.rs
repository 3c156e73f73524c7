//! Min-max feature scaling into `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Observed per-feature minimum and maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureBounds {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl FeatureBounds {
    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }

    /// Indices of features whose minimum equals their maximum.
    pub fn degenerate_features(&self) -> Vec<usize> {
        self.min
            .iter()
            .zip(&self.max)
            .enumerate()
            .filter(|(_, (lo, hi))| lo == hi)
            .map(|(j, _)| j)
            .collect()
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if self.len() != found {
            return Err(Error::Dimension {
                expected: self.len(),
                found,
            });
        }
        Ok(())
    }
}

pub fn compute_bounds(data: &Dataset) -> FeatureBounds {
    let m = data.n_features();
    let mut min = data.row(0).to_vec();
    let mut max = min.clone();
    for row in data.rows().skip(1) {
        for j in 0..m {
            min[j] = min[j].min(row[j]);
            max[j] = max[j].max(row[j]);
        }
    }
    FeatureBounds { min, max }
}

/// Maps every cell `v` of feature `j` to `(v - min_j) / (max_j - min_j)`.
///
/// Constant features (`min_j == max_j`) map to `0.0`; a warning is logged for
/// each.
pub fn min_max_normalize(data: &Dataset, bounds: &FeatureBounds) -> Result<Dataset> {
    bounds.check_len(data.n_features())?;
    for j in bounds.degenerate_features() {
        log::warn!(
            "feature `{}` is constant ({}); normalized to 0",
            data.feature_names()[j],
            bounds.min[j]
        );
    }
    let values = data
        .rows()
        .flat_map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| scale(v, bounds.min[j], bounds.max[j]))
        })
        .collect();
    data.with_values(values)
}

#[inline]
fn scale(v: f64, lo: f64, hi: f64) -> f64 {
    if hi == lo {
        0.0
    } else {
        (v - lo) / (hi - lo)
    }
}

/// Maps a normalized point back to original feature units.
pub fn denormalize_point(point: &[f64], bounds: &FeatureBounds) -> Result<Vec<f64>> {
    bounds.check_len(point.len())?;
    Ok(point
        .iter()
        .zip(bounds.min.iter().zip(&bounds.max))
        .map(|(u, (lo, hi))| lo + u * (hi - lo))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(values: &[f64]) -> Dataset {
        let rows: Vec<[f64; 1]> = values.iter().map(|v| [*v]).collect();
        Dataset::from_rows(&rows).unwrap()
    }

    #[test]
    fn bounds_of_column() {
        let b = compute_bounds(&column(&[3.0, 1.0, 2.0]));
        assert_eq!((b.min[0], b.max[0]), (1.0, 3.0));
    }

    #[test]
    fn bounds_of_single_row() {
        let b = compute_bounds(&column(&[5.0]));
        assert_eq!((b.min[0], b.max[0]), (5.0, 5.0));
        assert_eq!(b.degenerate_features(), vec![0]);
    }

    #[test]
    fn endpoints_and_midpoint() {
        let d = column(&[2.0, 6.0, 4.0]);
        let n = min_max_normalize(&d, &compute_bounds(&d)).unwrap();
        assert_eq!(n.values(), &[0.0, 1.0, 0.5]);
    }

    #[test]
    fn degenerate_feature_maps_to_zero() {
        let d = Dataset::from_rows(&[[1.0, 3.0], [2.0, 3.0]]).unwrap();
        let n = min_max_normalize(&d, &compute_bounds(&d)).unwrap();
        assert_eq!(n.values(), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn labels_carried_through() {
        let d = Dataset::new(
            vec![1.0, 2.0],
            2,
            vec!["a".into()],
            Some(vec!["p".into(), "q".into()]),
        )
        .unwrap();
        let n = min_max_normalize(&d, &compute_bounds(&d)).unwrap();
        assert_eq!(n.labels(), d.labels());
        assert_eq!(n.feature_names(), d.feature_names());
    }

    #[test]
    fn mismatched_bounds_rejected() {
        let d = column(&[1.0, 2.0]);
        let b = FeatureBounds {
            min: vec![0.0, 0.0],
            max: vec![1.0, 1.0],
        };
        assert!(matches!(
            min_max_normalize(&d, &b),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            denormalize_point(&[0.5], &b),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn denormalize_endpoints() {
        let b = FeatureBounds {
            min: vec![-2.0, 10.0],
            max: vec![4.0, 30.0],
        };
        assert_eq!(
            denormalize_point(&[0.0, 0.0], &b).unwrap(),
            vec![-2.0, 10.0]
        );
        assert_eq!(denormalize_point(&[1.0, 1.0], &b).unwrap(), vec![4.0, 30.0]);
    }
}
