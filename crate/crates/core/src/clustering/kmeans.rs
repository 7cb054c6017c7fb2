//! Lloyd's algorithm with k-means++ seeding and restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{nearest, Algorithm, Centers, ClusterConfig, ClusterError, ClusterModel};
use crate::matrix::{euclidean, squared_euclidean, Matrix};

/// Picks `k` distinct seed rows by D² sampling.
pub fn kmeans_plus_plus(x: &Matrix, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let n = x.rows();
    let mut chosen = Vec::with_capacity(k);
    if n == 0 || k == 0 {
        return chosen;
    }
    chosen.push(rng.gen_range(0..n));
    let mut d2: Vec<f64> = (0..n)
        .map(|i| squared_euclidean(x.row(i), x.row(chosen[0])))
        .collect();
    let mut taken = vec![false; n];
    taken[chosen[0]] = true;

    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                acc += w;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total weight")
        } else {
            // every remaining row duplicates a seed
            (0..n).find(|&i| !taken[i]).expect("n >= k")
        };
        taken[next] = true;
        chosen.push(next);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(squared_euclidean(x.row(i), x.row(next)));
        }
    }
    chosen
}

/// One Lloyd run from fixed initial centroids.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansRun {
    pub centroids: Matrix,
    pub labels: Vec<usize>,
    pub inertia: f64,
    /// Inertia after each assignment step, final assignment last.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
}

fn assign(x: &Matrix, centroids: &Matrix) -> (Vec<usize>, f64) {
    let mut inertia = 0.0;
    let labels = x
        .iter_rows()
        .map(|row| {
            let (c, d) = nearest(row, centroids.iter_rows()).expect("k >= 1");
            inertia += d;
            c
        })
        .collect();
    (labels, inertia)
}

pub fn lloyd(x: &Matrix, init: Matrix, max_iter: usize, tol: f64) -> KMeansRun {
    let (k, d) = (init.rows(), x.cols());
    let mut centroids = init;
    let mut history = Vec::new();
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        let (labels, inertia) = assign(x, &centroids);
        history.push(inertia);

        let mut sums = Matrix::zeros(k, d);
        let mut counts = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for (s, v) in sums.row_mut(c).iter_mut().zip(x.row(i)) {
                *s += v;
            }
        }
        let mut next = centroids.clone();
        for c in 0..k {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                for (dst, s) in next.row_mut(c).iter_mut().zip(sums.row(c)) {
                    *dst = s * inv;
                }
            }
        }

        let empty: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
        if !empty.is_empty() {
            let mut far: Vec<f64> = labels
                .iter()
                .enumerate()
                .map(|(i, &c)| squared_euclidean(x.row(i), next.row(c)))
                .collect();
            for c in empty {
                let (idx, _) = far.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &v)| {
                    if v > b.1 {
                        (i, v)
                    } else {
                        b
                    }
                });
                next.row_mut(c).copy_from_slice(x.row(idx));
                far[idx] = f64::NEG_INFINITY;
            }
        }

        let shift = (0..k)
            .map(|c| euclidean(centroids.row(c), next.row(c)))
            .fold(0.0, f64::max);
        centroids = next;
        if shift < tol {
            break;
        }
    }

    let (labels, inertia) = assign(x, &centroids);
    history.push(inertia);
    KMeansRun {
        centroids,
        labels,
        inertia,
        inertia_history: history,
        iterations,
    }
}

/// All `n_init` restarts, in seed order.
pub fn kmeans_runs(x: &Matrix, config: &ClusterConfig) -> Result<Vec<KMeansRun>, ClusterError> {
    config.check(x.rows())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok((0..config.n_init)
        .map(|_| {
            let seeds = kmeans_plus_plus(x, config.k, &mut rng);
            lloyd(x, x.select_rows(&seeds), config.max_iter, config.tol)
        })
        .collect())
}

pub fn kmeans_fit(x: &Matrix, config: &ClusterConfig) -> Result<ClusterModel, ClusterError> {
    let runs = kmeans_runs(x, config)?;
    let best = runs
        .into_iter()
        .reduce(|best, run| if run.inertia < best.inertia { run } else { best })
        .expect("n_init >= 1");
    Ok(ClusterModel {
        algorithm: Algorithm::KMeans,
        labels: best.labels.iter().map(|&l| l as i32).collect(),
        n_clusters: config.k,
        centers: Centers::Centroids {
            centroids: best.centroids,
        },
        inertia: Some(best.inertia),
        config: Some(config.clone()),
        dbscan: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::canonical_labels;

    fn pairs() -> Matrix {
        Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [10.0, 10.0], [10.0, 11.0]]).unwrap()
    }

    fn random_points(seed: u64, n: usize, d: usize) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect())
            .collect();
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn k_equals_n_gives_zero_inertia() {
        let x = random_points(4, 7, 2);
        let m = kmeans_fit(&x, &ClusterConfig::with_k(7)).unwrap();
        assert_eq!(m.inertia, Some(0.0));
        let mut labels = m.labels.clone();
        labels.sort();
        assert_eq!(labels, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn identical_points_single_cluster() {
        let x = Matrix::from_rows(&[[3.0, -1.0]; 6]).unwrap();
        let m = kmeans_fit(&x, &ClusterConfig::with_k(1)).unwrap();
        assert_eq!(m.inertia, Some(0.0));
        let Centers::Centroids { centroids } = m.centers else {
            panic!()
        };
        assert_eq!(centroids.row(0), &[3.0, -1.0]);
    }

    #[test]
    fn separated_pairs() {
        let m = kmeans_fit(&pairs(), &ClusterConfig::with_k(2)).unwrap();
        assert_eq!(canonical_labels(&m.labels), vec![0, 0, 1, 1]);
        let Centers::Centroids { centroids } = &m.centers else {
            panic!()
        };
        let mut cs: Vec<Vec<f64>> = centroids.iter_rows().map(<[f64]>::to_vec).collect();
        cs.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(cs, vec![vec![0.0, 0.5], vec![10.0, 10.5]]);
    }

    #[test]
    fn empty_cluster_is_reseeded() {
        // both initial centroids far to one side: the second starts empty
        let x = Matrix::from_rows(&[[0.0], [1.0], [9.0], [10.0]]).unwrap();
        let init = Matrix::from_rows(&[[-100.0], [-200.0]]).unwrap();
        let run = lloyd(&x, init, 50, 1e-9);
        assert_eq!(canonical_labels(&run.labels.iter().map(|&l| l as i32).collect::<Vec<_>>()), vec![0, 0, 1, 1]);
        assert!((run.inertia - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inertia_never_increases() {
        for seed in 0..20 {
            let x = random_points(seed, 60, 3);
            let config = ClusterConfig {
                k: 5,
                seed,
                n_init: 3,
                ..ClusterConfig::default()
            };
            for run in kmeans_runs(&x, &config).unwrap() {
                for w in run.inertia_history.windows(2) {
                    assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", run.inertia_history);
                }
            }
        }
    }

    #[test]
    fn seeded_runs_are_reproducible_and_permutation_invariant() {
        let x = random_points(8, 50, 2);
        let c = ClusterConfig::with_k(3);
        assert_eq!(kmeans_fit(&x, &c).unwrap(), kmeans_fit(&x, &c).unwrap());

        // well separated blobs so every restart finds the global optimum
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut rows = Vec::new();
        for centre in [0.0, 50.0, 100.0] {
            for _ in 0..10 {
                rows.push(vec![centre + rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            }
        }
        let x = Matrix::from_rows(&rows).unwrap();
        let perm: Vec<usize> = (0..30).rev().collect();
        let xp = x.select_rows(&perm);
        let a = kmeans_fit(&x, &c).unwrap().labels;
        let b = kmeans_fit(&xp, &c).unwrap().labels;
        let b_unpermuted: Vec<i32> = (0..30).map(|i| b[29 - i]).collect();
        assert_eq!(canonical_labels(&a), canonical_labels(&b_unpermuted));
    }
}
