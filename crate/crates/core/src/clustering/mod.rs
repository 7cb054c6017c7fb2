//! Clustering algorithms over feature matrices and nearest-cluster
//! prediction for new rows.
//!
//! All distances are Euclidean. Every algorithm is deterministic: the
//! randomised ones take their seed from [`ClusterConfig`], and ties are broken
//! towards the lowest index.

mod agglomerative;
mod dbscan;
mod kmeans;
mod kmedoids;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{squared_euclidean, Matrix};

pub use agglomerative::{agglomerative_fit, linkage_tree, model_from_cut, Dendrogram, Linkage, Merge};
pub use dbscan::{dbscan_fit, DbscanParams};
pub use kmeans::{kmeans_fit, kmeans_plus_plus, kmeans_runs, lloyd, KMeansRun};
pub use kmedoids::kmedoids_fit;

/// Label given to DBSCAN noise rows.
pub const NOISE: i32 = -1;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("need at least k={k} rows, got {n}")]
    TooFewRows { n: usize, k: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("model has no non-noise training rows")]
    AllNoise,
    #[error("expected {expected} columns, got {found}")]
    Width { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
    pub n_init: usize,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            k: 12,
            seed: 0,
            max_iter: 300,
            tol: 1e-6,
            n_init: 10,
        }
    }
}

impl ClusterConfig {
    pub fn with_k(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    pub(crate) fn check(&self, n: usize) -> Result<(), ClusterError> {
        if self.k == 0 {
            return Err(ClusterError::InvalidParameter("k must be >= 1".into()));
        }
        if self.max_iter == 0 {
            return Err(ClusterError::InvalidParameter("max_iter must be >= 1".into()));
        }
        if self.n_init == 0 {
            return Err(ClusterError::InvalidParameter("n_init must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(ClusterError::InvalidParameter("tol must be > 0".into()));
        }
        if n < self.k {
            return Err(ClusterError::TooFewRows { n, k: self.k });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "kmeans")]
    KMeans,
    #[serde(rename = "kmedoids")]
    KMedoids,
    #[serde(rename = "agglo-single")]
    AggloSingle,
    #[serde(rename = "agglo-average")]
    AggloAverage,
    #[serde(rename = "agglo-complete")]
    AggloComplete,
    #[serde(rename = "dbscan")]
    Dbscan,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::KMeans,
        Algorithm::KMedoids,
        Algorithm::AggloSingle,
        Algorithm::AggloAverage,
        Algorithm::AggloComplete,
        Algorithm::Dbscan,
    ];

    pub fn linkage(self) -> Option<Linkage> {
        match self {
            Algorithm::AggloSingle => Some(Linkage::Single),
            Algorithm::AggloAverage => Some(Linkage::Average),
            Algorithm::AggloComplete => Some(Linkage::Complete),
            _ => None,
        }
    }

    /// Short name used in setup tables.
    pub fn table_label(self) -> &'static str {
        match self {
            Algorithm::KMeans => "K-means",
            Algorithm::KMedoids => "K-medoids",
            Algorithm::AggloSingle => "Agglo.sing.",
            Algorithm::AggloAverage => "Agglo.avg.",
            Algorithm::AggloComplete => "Agglo.comp.",
            Algorithm::Dbscan => "DBSCAN",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::KMeans => "kmeans",
            Algorithm::KMedoids => "kmedoids",
            Algorithm::AggloSingle => "agglo-single",
            Algorithm::AggloAverage => "agglo-average",
            Algorithm::AggloComplete => "agglo-complete",
            Algorithm::Dbscan => "dbscan",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| {
                format!("unknown algorithm {s:?} (expected kmeans|kmedoids|agglo-single|agglo-average|agglo-complete|dbscan)")
            })
    }
}

/// What a fitted model keeps for prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Centers {
    /// `k × d` centroids (K-Means).
    Centroids { centroids: Matrix },
    /// Training-row indices of the medoids (K-Medoids).
    Medoids { rows: Vec<usize> },
    /// Training-row indices per cluster (Agglomerative, DBSCAN).
    Members { clusters: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub algorithm: Algorithm,
    /// Per-row label, `NOISE` for DBSCAN noise.
    pub labels: Vec<i32>,
    pub n_clusters: usize,
    pub centers: Centers,
    /// Sum of squared distances to the assigned centre (K-Means, K-Medoids).
    pub inertia: Option<f64>,
    #[serde(default)]
    pub config: Option<ClusterConfig>,
    #[serde(default)]
    pub dbscan: Option<DbscanParams>,
}

impl ClusterModel {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters];
        for &l in &self.labels {
            if l >= 0 {
                sizes[l as usize] += 1;
            }
        }
        sizes
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == NOISE).count()
    }
}

/// Parameters for fitting any of the supported algorithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParams {
    pub algorithm: Algorithm,
    pub config: ClusterConfig,
    pub dbscan: DbscanParams,
}

pub fn fit(x: &Matrix, params: &FitParams) -> Result<ClusterModel, ClusterError> {
    match params.algorithm {
        Algorithm::KMeans => kmeans_fit(x, &params.config),
        Algorithm::KMedoids => kmedoids_fit(x, &params.config),
        Algorithm::Dbscan => dbscan_fit(x, &params.dbscan),
        a => agglomerative_fit(x, params.config.k, a.linkage().expect("agglomerative")),
    }
}

/// Index of the nearest row of `candidates` by squared distance, lowest index
/// on ties.
pub(crate) fn nearest<'a>(
    point: &[f64],
    candidates: impl Iterator<Item = &'a [f64]>,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.enumerate() {
        let d = squared_euclidean(point, c);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best
}

/// Cluster of a new row under a fitted model. `training` is the matrix the
/// model was fitted on.
pub fn predict_nearest(
    model: &ClusterModel,
    training: &Matrix,
    x: &[f64],
) -> Result<usize, ClusterError> {
    if x.len() != training.cols() {
        return Err(ClusterError::Width {
            expected: training.cols(),
            found: x.len(),
        });
    }
    match &model.centers {
        Centers::Centroids { centroids } => nearest(x, centroids.iter_rows())
            .map(|(i, _)| i)
            .ok_or(ClusterError::AllNoise),
        Centers::Medoids { rows } => nearest(x, rows.iter().map(|&r| training.row(r)))
            .map(|(i, _)| i)
            .ok_or(ClusterError::AllNoise),
        Centers::Members { .. } => {
            let mut best: Option<(usize, f64)> = None;
            for (i, &label) in model.labels.iter().enumerate() {
                if label == NOISE {
                    continue;
                }
                let d = squared_euclidean(x, training.row(i));
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((i, d));
                }
            }
            best.map(|(i, _)| model.labels[i] as usize)
                .ok_or(ClusterError::AllNoise)
        }
    }
}

/// Renumbers labels by first appearance so two labelings can be compared up
/// to renaming. Noise stays noise.
pub fn canonical_labels(labels: &[i32]) -> Vec<i32> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            if l == NOISE {
                NOISE
            } else {
                let next = map.len() as i32;
                *map.entry(l).or_insert(next)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(seed: u64, n: usize, d: usize) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect())
            .collect();
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.to_string().parse::<Algorithm>(), Ok(a));
            let json = serde_json::to_string(&a).unwrap();
            assert_eq!(json, format!("\"{a}\""));
        }
        assert!("kmeans++".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_validation() {
        let x = random_points(0, 3, 2);
        let mut c = ClusterConfig::with_k(4);
        assert_eq!(kmeans_fit(&x, &c), Err(ClusterError::TooFewRows { n: 3, k: 4 }));
        c.k = 0;
        assert!(matches!(kmeans_fit(&x, &c), Err(ClusterError::InvalidParameter(_))));
        c.k = 2;
        c.tol = 0.0;
        assert!(matches!(kmedoids_fit(&x, &c), Err(ClusterError::InvalidParameter(_))));
    }

    #[test]
    fn predict_on_centroid_and_training_rows() {
        let x = random_points(1, 40, 3);
        let km = kmeans_fit(&x, &ClusterConfig::with_k(4)).unwrap();
        if let Centers::Centroids { centroids } = &km.centers {
            for c in 0..4 {
                assert_eq!(predict_nearest(&km, &x, centroids.row(c)).unwrap(), c);
            }
        }
        for algo in [Algorithm::KMedoids, Algorithm::AggloAverage, Algorithm::Dbscan] {
            let params = FitParams {
                algorithm: algo,
                config: ClusterConfig::with_k(4),
                dbscan: DbscanParams { eps: 4.0, min_pts: 3 },
            };
            let model = fit(&x, &params).unwrap();
            for i in 0..x.rows() {
                let l = model.labels[i];
                if l != NOISE && !matches!(model.centers, Centers::Medoids { .. }) {
                    assert_eq!(predict_nearest(&model, &x, x.row(i)).unwrap() as i32, l);
                }
            }
        }
    }

    #[test]
    fn predict_matches_linear_scan() {
        let x = random_points(2, 60, 2);
        let queries = random_points(3, 50, 2);
        let params = FitParams {
            algorithm: Algorithm::AggloSingle,
            config: ClusterConfig::with_k(5),
            dbscan: DbscanParams::default(),
        };
        let agg = fit(&x, &params).unwrap();
        let km = kmeans_fit(&x, &ClusterConfig::with_k(5)).unwrap();
        let Centers::Centroids { centroids } = &km.centers else {
            panic!()
        };
        for q in queries.iter_rows() {
            let mut best = (0, f64::INFINITY);
            for i in 0..x.rows() {
                let d: f64 = x.row(i).iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum();
                if d < best.1 {
                    best = (i, d);
                }
            }
            assert_eq!(predict_nearest(&agg, &x, q).unwrap() as i32, agg.labels[best.0]);

            let mut bc = (0, f64::INFINITY);
            for c in 0..5 {
                let d: f64 = centroids.row(c).iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum();
                if d < bc.1 {
                    bc = (c, d);
                }
            }
            assert_eq!(predict_nearest(&km, &x, q).unwrap(), bc.0);
        }
    }

    #[test]
    fn all_noise_model_cannot_predict() {
        let x = Matrix::from_rows(&[[0.0], [100.0]]).unwrap();
        let model = dbscan_fit(&x, &DbscanParams { eps: 1.0, min_pts: 2 }).unwrap();
        assert_eq!(model.labels, vec![NOISE, NOISE]);
        assert_eq!(predict_nearest(&model, &x, &[0.0]), Err(ClusterError::AllNoise));
    }

    #[test]
    fn canonical_relabeling() {
        assert_eq!(canonical_labels(&[3, 3, -1, 0, 3, 1]), vec![0, 0, -1, 1, 0, 2]);
    }
}
