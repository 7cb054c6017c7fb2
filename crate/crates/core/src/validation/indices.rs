//! Internal validation indices. Rows labelled `NOISE` are dropped before any
//! index is computed.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::clustering::NOISE;
use crate::matrix::{euclidean, squared_euclidean, Matrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("{labels} labels for {rows} rows")]
    Length { rows: usize, labels: usize },
    #[error("need at least 2 non-noise clusters, found {found}")]
    TooFewClusters { found: usize },
    #[error("need more rows than clusters (n={n}, k={k})")]
    TooFewRows { n: usize, k: usize },
    #[error("clusters {a} and {b} have coincident centroids")]
    CoincidentCentroids { a: i32, b: i32 },
}

/// Non-noise rows grouped by label, labels in ascending order.
struct Groups {
    labels: Vec<i32>,
    members: Vec<Vec<usize>>,
}

impl Groups {
    fn new(x: &Matrix, labels: &[i32]) -> Result<Self, IndexError> {
        if labels.len() != x.rows() {
            return Err(IndexError::Length {
                rows: x.rows(),
                labels: labels.len(),
            });
        }
        let mut by_label: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, &l) in labels.iter().enumerate() {
            if l != NOISE {
                by_label.entry(l).or_default().push(i);
            }
        }
        if by_label.len() < 2 {
            return Err(IndexError::TooFewClusters {
                found: by_label.len(),
            });
        }
        let (labels, members) = by_label.into_iter().unzip();
        Ok(Self { labels, members })
    }

    fn k(&self) -> usize {
        self.members.len()
    }

    fn n(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    fn centroids(&self, x: &Matrix) -> Vec<Vec<f64>> {
        self.members
            .iter()
            .map(|rows| {
                let mut c = vec![0.0; x.cols()];
                for &r in rows {
                    for (s, v) in c.iter_mut().zip(x.row(r)) {
                        *s += v;
                    }
                }
                let inv = 1.0 / rows.len() as f64;
                c.iter_mut().for_each(|v| *v *= inv);
                c
            })
            .collect()
    }
}

/// Per-row silhouette values for the non-noise rows, in row order.
pub fn silhouette_samples(x: &Matrix, labels: &[i32]) -> Result<Vec<f64>, IndexError> {
    let groups = Groups::new(x, labels)?;
    let k = groups.k();
    let mut cluster_of = vec![usize::MAX; x.rows()];
    for (c, rows) in groups.members.iter().enumerate() {
        for &r in rows {
            cluster_of[r] = c;
        }
    }
    let rows: Vec<usize> = (0..x.rows()).filter(|&i| labels[i] != NOISE).collect();
    let sizes: Vec<usize> = groups.members.iter().map(Vec::len).collect();

    // sums[p * k + c]: total distance from rows[p] to the members of c
    let mut sums = vec![0.0; rows.len() * k];
    for p in 0..rows.len() {
        let (i, ci) = (rows[p], cluster_of[rows[p]]);
        for (q, &j) in rows.iter().enumerate().skip(p + 1) {
            let d = euclidean(x.row(i), x.row(j));
            sums[p * k + cluster_of[j]] += d;
            sums[q * k + ci] += d;
        }
    }

    Ok(rows
        .iter()
        .enumerate()
        .map(|(p, &i)| {
            let c = cluster_of[i];
            if sizes[c] == 1 {
                return 0.0;
            }
            let a = sums[p * k + c] / (sizes[c] - 1) as f64;
            let b = (0..k)
                .filter(|&o| o != c)
                .map(|o| sums[p * k + o] / sizes[o] as f64)
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m > 0.0 {
                (b - a) / m
            } else {
                0.0
            }
        })
        .collect())
}

/// Mean silhouette; higher is better.
pub fn silhouette_score(x: &Matrix, labels: &[i32]) -> Result<f64, IndexError> {
    let s = silhouette_samples(x, labels)?;
    Ok(s.iter().sum::<f64>() / s.len() as f64)
}

/// Davies-Bouldin index; lower is better.
pub fn davies_bouldin(x: &Matrix, labels: &[i32]) -> Result<f64, IndexError> {
    let groups = Groups::new(x, labels)?;
    let centroids = groups.centroids(x);
    let scatter: Vec<f64> = groups
        .members
        .iter()
        .zip(&centroids)
        .map(|(rows, c)| {
            rows.iter().map(|&r| euclidean(x.row(r), c)).sum::<f64>() / rows.len() as f64
        })
        .collect();
    let k = groups.k();
    let mut total = 0.0;
    for i in 0..k {
        let mut worst = 0.0f64;
        for j in 0..k {
            if i == j {
                continue;
            }
            let gap = euclidean(&centroids[i], &centroids[j]);
            if gap == 0.0 {
                let (a, b) = (i.min(j), i.max(j));
                return Err(IndexError::CoincidentCentroids {
                    a: groups.labels[a],
                    b: groups.labels[b],
                });
            }
            worst = worst.max((scatter[i] + scatter[j]) / gap);
        }
        total += worst;
    }
    Ok(total / k as f64)
}

/// Calinski-Harabasz index; higher is better. Returns `f64::INFINITY` when
/// every cluster is a single repeated point (zero within-cluster dispersion).
pub fn calinski_harabasz(x: &Matrix, labels: &[i32]) -> Result<f64, IndexError> {
    let groups = Groups::new(x, labels)?;
    let (n, k) = (groups.n(), groups.k());
    if n <= k {
        return Err(IndexError::TooFewRows { n, k });
    }
    let centroids = groups.centroids(x);
    let mut mean = vec![0.0; x.cols()];
    for (rows, c) in groups.members.iter().zip(&centroids) {
        for (m, v) in mean.iter_mut().zip(c) {
            *m += v * rows.len() as f64;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut between = 0.0;
    let mut within = 0.0;
    for (rows, c) in groups.members.iter().zip(&centroids) {
        between += rows.len() as f64 * squared_euclidean(c, &mean);
        within += rows.iter().map(|&r| squared_euclidean(x.row(r), c)).sum::<f64>();
    }
    if within == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((between / (k - 1) as f64) / (within / (n - k) as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub silhouette: f64,
    pub davies_bouldin: f64,
    /// `f64::INFINITY` (serialised as `"inf"`) when within-cluster
    /// dispersion is zero.
    #[serde(serialize_with = "ser_inf", deserialize_with = "de_inf")]
    pub calinski_harabasz: f64,
}

impl IndexReport {
    pub fn compute(x: &Matrix, labels: &[i32]) -> Result<Self, IndexError> {
        Ok(Self {
            silhouette: silhouette_score(x, labels)?,
            davies_bouldin: davies_bouldin(x, labels)?,
            calinski_harabasz: calinski_harabasz(x, labels)?,
        })
    }

    pub fn get(&self, index: IndexKind) -> f64 {
        match index {
            IndexKind::Silhouette => self.silhouette,
            IndexKind::DaviesBouldin => self.davies_bouldin,
            IndexKind::CalinskiHarabasz => self.calinski_harabasz,
        }
    }
}

pub(crate) fn format_ch(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

fn ser_inf<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_inf<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }
    match Repr::deserialize(d)? {
        Repr::Num(v) => Ok(v),
        Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Repr::Text(t) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {t:?}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    #[default]
    Silhouette,
    DaviesBouldin,
    CalinskiHarabasz,
}

impl IndexKind {
    pub fn higher_is_better(self) -> bool {
        !matches!(self, IndexKind::DaviesBouldin)
    }
}

impl std::fmt::Display for IndexKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IndexKind::Silhouette => "silhouette",
            IndexKind::DaviesBouldin => "davies-bouldin",
            IndexKind::CalinskiHarabasz => "calinski-harabasz",
        })
    }
}

impl std::str::FromStr for IndexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "silhouette" => Ok(IndexKind::Silhouette),
            "davies-bouldin" | "db" => Ok(IndexKind::DaviesBouldin),
            "calinski-harabasz" | "ch" => Ok(IndexKind::CalinskiHarabasz),
            _ => Err(format!("unknown index {s:?} (expected silhouette|davies-bouldin|calinski-harabasz)")),
        }
    }
}
