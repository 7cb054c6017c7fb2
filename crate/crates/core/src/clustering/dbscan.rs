//! Density-based clustering.
//!
//! A row is a core row when at least `min_pts` rows (itself included) lie
//! within `eps`. Clusters grow from core rows in scan order; a border row
//! joins the first cluster that reaches it. Neighbourhoods are recomputed on
//! demand instead of stored, so memory stays linear in the row count.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Algorithm, Centers, ClusterError, ClusterModel, NOISE};
use crate::matrix::{squared_euclidean, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbscanParams {
    pub eps: f64,
    pub min_pts: usize,
}

impl Default for DbscanParams {
    fn default() -> Self {
        Self {
            eps: 0.5,
            min_pts: 5,
        }
    }
}

/// Number of rows within `eps` of each row, itself included.
pub fn neighbourhood_sizes(x: &Matrix, eps: f64) -> Vec<usize> {
    let eps2 = eps * eps;
    let n = x.rows();
    let mut counts = vec![1usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if squared_euclidean(x.row(i), x.row(j)) <= eps2 {
                counts[i] += 1;
                counts[j] += 1;
            }
        }
    }
    counts
}

pub fn dbscan_fit(x: &Matrix, params: &DbscanParams) -> Result<ClusterModel, ClusterError> {
    if !(params.eps > 0.0) {
        return Err(ClusterError::InvalidParameter("eps must be > 0".into()));
    }
    if params.min_pts == 0 {
        return Err(ClusterError::InvalidParameter("min_pts must be >= 1".into()));
    }
    let n = x.rows();
    let eps2 = params.eps * params.eps;
    let core: Vec<bool> = neighbourhood_sizes(x, params.eps)
        .into_iter()
        .map(|c| c >= params.min_pts)
        .collect();

    let mut labels = vec![NOISE; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if !core[start] || labels[start] != NOISE {
            continue;
        }
        let id = clusters.len() as i32;
        labels[start] = id;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            for q in 0..n {
                if labels[q] == NOISE && squared_euclidean(x.row(p), x.row(q)) <= eps2 {
                    labels[q] = id;
                    if core[q] {
                        queue.push_back(q);
                    }
                }
            }
        }
        clusters.push(Vec::new());
    }
    for (i, &l) in labels.iter().enumerate() {
        if l != NOISE {
            clusters[l as usize].push(i);
        }
    }

    Ok(ClusterModel {
        algorithm: Algorithm::Dbscan,
        labels,
        n_clusters: clusters.len(),
        centers: Centers::Members { clusters },
        inertia: None,
        config: None,
        dbscan: Some(*params),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn compact_group_is_one_cluster() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [0.1, 0.0], [0.0, 0.1], [0.1, 0.1]]).unwrap();
        let m = dbscan_fit(&x, &DbscanParams { eps: 1.0, min_pts: 4 }).unwrap();
        assert_eq!(m.labels, vec![0; 4]);
        assert_eq!(m.noise_count(), 0);
    }

    #[test]
    fn isolated_point_is_noise() {
        let x = Matrix::from_rows(&[[0.0], [0.5], [50.0]]).unwrap();
        let m = dbscan_fit(&x, &DbscanParams { eps: 1.0, min_pts: 2 }).unwrap();
        assert_eq!(m.labels, vec![0, 0, NOISE]);
    }

    #[test]
    fn two_separated_blobs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut rows = Vec::new();
        for cx in [0.0, 5.0] {
            for _ in 0..5 {
                rows.push([cx + rng.gen_range(0.0..0.3), rng.gen_range(0.0..0.3)]);
            }
        }
        let x = Matrix::from_rows(&rows).unwrap();
        // reachability by brute force: blob members are mutually within eps,
        // the gap exceeds eps, so each blob is one connected component
        for i in 0..10 {
            for j in 0..10 {
                let d = squared_euclidean(x.row(i), x.row(j)).sqrt();
                assert_eq!(d <= 1.0, (i < 5) == (j < 5));
            }
        }
        let m = dbscan_fit(&x, &DbscanParams { eps: 1.0, min_pts: 3 }).unwrap();
        assert_eq!(m.n_clusters, 2);
        assert_eq!(m.labels, vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn border_row_joins_first_cluster() {
        // the middle row is reachable from both dense groups but is not core
        let x = Matrix::from_rows(&[
            [0.0], [0.1], [0.2], [0.3], [1.0], [1.7], [1.8], [1.9], [2.0],
        ])
        .unwrap();
        let params = DbscanParams { eps: 0.75, min_pts: 4 };
        assert_eq!(neighbourhood_sizes(&x, params.eps)[4], 3);
        let m = dbscan_fit(&x, &params).unwrap();
        assert_eq!(m.n_clusters, 2);
        assert_eq!(m.labels, vec![0, 0, 0, 0, 0, 1, 1, 1, 1]);
    }

    #[test]
    fn core_set_matches_brute_force_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = rng.gen_range(5..40);
            let rows: Vec<[f64; 2]> = (0..n)
                .map(|_| [rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0)])
                .collect();
            let x = Matrix::from_rows(&rows).unwrap();
            let params = DbscanParams { eps: 0.7, min_pts: 4 };
            let m = dbscan_fit(&x, &params).unwrap();
            let perm: Vec<usize> = (0..n).rev().collect();
            let mp = dbscan_fit(&x.select_rows(&perm), &params).unwrap();
            for i in 0..n {
                let count = (0..n)
                    .filter(|&j| {
                        let d = ((rows[i][0] - rows[j][0]).powi(2) + (rows[i][1] - rows[j][1]).powi(2)).sqrt();
                        d <= 0.7
                    })
                    .count();
                let is_core = count >= 4;
                if is_core {
                    assert_ne!(m.labels[i], NOISE);
                    assert_ne!(mp.labels[n - 1 - i], NOISE);
                }
                assert_eq!(neighbourhood_sizes(&x, 0.7)[i], count);
            }
        }
    }
}
