//! Bottom-up hierarchical clustering with single, average or complete
//! linkage.
//!
//! Clusters are identified by their smallest member row. Each step merges
//! the pair with the smallest linkage distance; ties go to the pair whose
//! (smaller id, larger id) is lexicographically lowest. Distances between the
//! merged cluster and the rest are updated with the Lance-Williams formulas on
//! a condensed distance matrix, and every cluster caches its nearest
//! higher-id neighbour so a merge only rescans the rows it invalidates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Algorithm, Centers, ClusterError, ClusterModel};
use crate::matrix::{euclidean, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    Single,
    Average,
    Complete,
}

impl Linkage {
    pub fn algorithm(self) -> Algorithm {
        match self {
            Linkage::Single => Algorithm::AggloSingle,
            Linkage::Average => Algorithm::AggloAverage,
            Linkage::Complete => Algorithm::AggloComplete,
        }
    }

    fn update(self, d_ac: f64, d_bc: f64, size_a: usize, size_b: usize) -> f64 {
        match self {
            Linkage::Single => d_ac.min(d_bc),
            Linkage::Complete => d_ac.max(d_bc),
            Linkage::Average => {
                (size_a as f64 * d_ac + size_b as f64 * d_bc) / (size_a + size_b) as f64
            }
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Average => "average",
            Linkage::Complete => "complete",
        })
    }
}

impl FromStr for Linkage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(Linkage::Single),
            "average" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            other => Err(format!("unknown linkage {other:?}")),
        }
    }
}

/// One merge: cluster `absorbed` joins cluster `into` (`into < absorbed`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub into: usize,
    pub absorbed: usize,
    pub distance: f64,
    pub size: usize,
}

/// Full merge history from `n` singletons down to one cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub n: usize,
    pub linkage: Linkage,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Labels after the first `n - k` merges. Clusters are numbered by their
    /// smallest member row.
    pub fn cut(&self, k: usize) -> Vec<usize> {
        let k = k.clamp(1, self.n.max(1));
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for m in self.merges.iter().take(self.n - k) {
            let (a, b) = (find(&mut parent, m.into), find(&mut parent, m.absorbed));
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi] = lo;
        }
        let mut label_of_root = vec![usize::MAX; self.n];
        let mut next = 0;
        (0..self.n)
            .map(|i| {
                let r = find(&mut parent, i);
                if label_of_root[r] == usize::MAX {
                    label_of_root[r] = next;
                    next += 1;
                }
                label_of_root[r]
            })
            .collect()
    }
}

struct Condensed {
    n: usize,
    data: Vec<f64>,
}

impl Condensed {
    fn new(x: &Matrix) -> Self {
        let n = x.rows();
        let mut data = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                data.push(euclidean(x.row(i), x.row(j)));
            }
        }
        Self { n, data }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }
}

const NONE: usize = usize::MAX;

/// Builds the complete merge history.
pub fn linkage_tree(x: &Matrix, linkage: Linkage) -> Dendrogram {
    let n = x.rows();
    let mut dist = Condensed::new(x);
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut nn = vec![NONE; n];
    let mut nn_dist = vec![f64::INFINITY; n];

    let rescan = |i: usize, dist: &Condensed, active: &[bool]| -> (usize, f64) {
        let mut best = (NONE, f64::INFINITY);
        for j in i + 1..n {
            if active[j] {
                let d = dist.get(i, j);
                if d < best.1 {
                    best = (j, d);
                }
            }
        }
        best
    };
    for i in 0..n {
        (nn[i], nn_dist[i]) = rescan(i, &dist, &active);
    }

    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for _ in 1..n {
        let mut a = NONE;
        for i in 0..n {
            if active[i] && nn[i] != NONE && (a == NONE || nn_dist[i] < nn_dist[a]) {
                a = i;
            }
        }
        let b = nn[a];
        let d_ab = nn_dist[a];
        let (size_a, size_b) = (size[a], size[b]);

        active[b] = false;
        for c in 0..n {
            if active[c] && c != a {
                let v = linkage.update(dist.get(a, c), dist.get(b, c), size_a, size_b);
                dist.set(a, c, v);
            }
        }
        size[a] = size_a + size_b;
        merges.push(Merge {
            into: a,
            absorbed: b,
            distance: d_ab,
            size: size[a],
        });

        (nn[a], nn_dist[a]) = rescan(a, &dist, &active);
        for i in 0..n {
            if !active[i] || i == a {
                continue;
            }
            if nn[i] == b || nn[i] == a {
                (nn[i], nn_dist[i]) = rescan(i, &dist, &active);
            } else if i < a {
                let d = dist.get(i, a);
                if d < nn_dist[i] || (d == nn_dist[i] && a < nn[i]) {
                    nn[i] = a;
                    nn_dist[i] = d;
                }
            }
        }
    }

    Dendrogram { n, linkage, merges }
}

pub fn agglomerative_fit(
    x: &Matrix,
    k: usize,
    linkage: Linkage,
) -> Result<ClusterModel, ClusterError> {
    if k == 0 {
        return Err(ClusterError::InvalidParameter("k must be >= 1".into()));
    }
    if x.rows() < k {
        return Err(ClusterError::TooFewRows { n: x.rows(), k });
    }
    Ok(model_from_cut(&linkage_tree(x, linkage), k))
}

/// Cluster model for one cut of a precomputed tree.
pub fn model_from_cut(tree: &Dendrogram, k: usize) -> ClusterModel {
    let labels = tree.cut(k);
    let mut clusters = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        clusters[l].push(i);
    }
    ClusterModel {
        algorithm: tree.linkage.algorithm(),
        labels: labels.iter().map(|&l| l as i32).collect(),
        n_clusters: k,
        centers: Centers::Members { clusters },
        inertia: None,
        config: None,
        dbscan: None,
    }
}
