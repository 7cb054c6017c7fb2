//! PAM-style K-Medoids with alternating assignment and medoid updates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{kmeans_plus_plus, Algorithm, Centers, ClusterConfig, ClusterError, ClusterModel};
use crate::matrix::{squared_euclidean, Matrix};

struct Run {
    medoids: Vec<usize>,
    labels: Vec<usize>,
    cost: f64,
}

/// Assigns each row to its nearest medoid; ties go to the medoid with the
/// lowest row index.
fn assign(x: &Matrix, medoids: &[usize]) -> (Vec<usize>, f64) {
    let mut cost = 0.0;
    let labels = x
        .iter_rows()
        .map(|row| {
            let mut best = (usize::MAX, f64::INFINITY, usize::MAX);
            for (c, &m) in medoids.iter().enumerate() {
                let d = squared_euclidean(row, x.row(m));
                if d < best.1 || (d == best.1 && m < best.2) {
                    best = (c, d, m);
                }
            }
            cost += best.1;
            best.0
        })
        .collect();
    (labels, cost)
}

fn run(x: &Matrix, mut medoids: Vec<usize>, max_iter: usize) -> Run {
    let k = medoids.len();
    for _ in 0..max_iter {
        let (labels, _) = assign(x, &medoids);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &c) in labels.iter().enumerate() {
            members[c].push(i);
        }
        let mut next = medoids.clone();
        for (c, group) in members.iter().enumerate() {
            if group.is_empty() {
                continue;
            }
            // members are in ascending row order, so strict < keeps the lowest
            let mut best = (medoids[c], f64::INFINITY);
            for &candidate in group {
                let cost: f64 = group
                    .iter()
                    .map(|&j| squared_euclidean(x.row(candidate), x.row(j)))
                    .sum();
                if cost < best.1 {
                    best = (candidate, cost);
                }
            }
            next[c] = best.0;
        }
        if next == medoids {
            break;
        }
        medoids = next;
    }
    let (labels, cost) = assign(x, &medoids);
    Run {
        medoids,
        labels,
        cost,
    }
}

pub fn kmedoids_fit(x: &Matrix, config: &ClusterConfig) -> Result<ClusterModel, ClusterError> {
    config.check(x.rows())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<Run> = None;
    for _ in 0..config.n_init {
        let seeds = kmeans_plus_plus(x, config.k, &mut rng);
        let r = run(x, seeds, config.max_iter);
        if best.as_ref().is_none_or(|b| r.cost < b.cost) {
            best = Some(r);
        }
    }
    let best = best.expect("n_init >= 1");
    Ok(ClusterModel {
        algorithm: Algorithm::KMedoids,
        labels: best.labels.iter().map(|&l| l as i32).collect(),
        n_clusters: config.k,
        centers: Centers::Medoids { rows: best.medoids },
        inertia: Some(best.cost),
        config: Some(config.clone()),
        dbscan: None,
    })
}
