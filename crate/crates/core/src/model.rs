//! The fitted style model: encoder, optional standardisation, PCA and a
//! cluster model together with the embedding it was trained on.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::{predict_nearest, ClusterError, ClusterModel};
use crate::features::{encode, EncoderKind, FeatureTable, Standardizer};
use crate::matrix::Matrix;
use crate::reduction::{PcaError, PcaModel};
use crate::trace::{DesignSession, RoomGrid};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model expects {expected} encoding, bundle carries {found}")]
    EncoderMismatch {
        expected: EncoderKind,
        found: EncoderKind,
    },
    #[error("embedding has {found} columns but PCA produces {expected}")]
    EmbeddingWidth { expected: usize, found: usize },
    #[error("embedding has {rows} rows but cluster model labels {labels}")]
    EmbeddingRows { rows: usize, labels: usize },
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

/// Feature preprocessing fitted on a corpus: standardisation (for the
/// tabular encodings) followed by PCA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub encoder: EncoderKind,
    pub standardizer: Option<Standardizer>,
    pub pca: PcaModel,
}

impl Reduction {
    /// Fits on a feature table and returns the training embedding.
    pub fn fit(table: &FeatureTable, n_components: usize) -> Result<(Self, Matrix), PcaError> {
        let (input, standardizer) = if table.kind.standardized() {
            let (z, s) = crate::features::standardize(&table.matrix);
            (z, Some(s))
        } else {
            (table.matrix.clone(), None)
        };
        let pca = PcaModel::fit(&input, n_components)?;
        let embedding = pca.transform(&input)?;
        Ok((
            Self {
                encoder: table.kind,
                standardizer,
                pca,
            },
            embedding,
        ))
    }

    pub fn project_features(&self, features: &[f64]) -> Vec<f64> {
        match &self.standardizer {
            Some(s) => self.pca.transform_row(&s.transform_row(features)),
            None => self.pca.transform_row(features),
        }
    }

    pub fn project(&self, grid: &RoomGrid) -> Vec<f64> {
        self.project_features(&encode(grid, self.encoder).values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyleModel {
    pub reduction: Reduction,
    pub clusters: ClusterModel,
    /// PCA-space rows the cluster model was fitted on.
    pub embedding: Matrix,
}

impl StyleModel {
    pub fn new(
        reduction: Reduction,
        clusters: ClusterModel,
        embedding: Matrix,
    ) -> Result<Self, ModelError> {
        if embedding.cols() != reduction.pca.n_components {
            return Err(ModelError::EmbeddingWidth {
                expected: reduction.pca.n_components,
                found: embedding.cols(),
            });
        }
        if embedding.rows() != clusters.labels.len() {
            return Err(ModelError::EmbeddingRows {
                rows: embedding.rows(),
                labels: clusters.labels.len(),
            });
        }
        Ok(Self {
            reduction,
            clusters,
            embedding,
        })
    }

    pub fn encoder(&self) -> EncoderKind {
        self.reduction.encoder
    }

    pub fn n_clusters(&self) -> usize {
        self.clusters.n_clusters
    }

    /// Rejects a bundle built for a different encoding than the caller expects.
    pub fn expect_encoder(&self, kind: EncoderKind) -> Result<(), ModelError> {
        if kind == self.encoder() {
            Ok(())
        } else {
            Err(ModelError::EncoderMismatch {
                expected: kind,
                found: self.encoder(),
            })
        }
    }

    pub fn classify(&self, grid: &RoomGrid) -> Result<usize, ModelError> {
        let point = self.reduction.project(grid);
        Ok(predict_nearest(&self.clusters, &self.embedding, &point)?)
    }

    /// Cluster id of every step of a session.
    pub fn classify_session(&self, session: &DesignSession) -> Result<Vec<usize>, ModelError> {
        session.grids().map(|g| self.classify(g)).collect()
    }

    /// Mean PCA-space position of each cluster's training rows.
    pub fn cluster_centroids(&self) -> Vec<Vec<f64>> {
        let k = self.n_clusters();
        let d = self.embedding.cols();
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for (i, &l) in self.clusters.labels.iter().enumerate() {
            if l < 0 {
                continue;
            }
            counts[l as usize] += 1;
            for (s, v) in sums[l as usize].iter_mut().zip(self.embedding.row(i)) {
                *s += v;
            }
        }
        sums.into_iter()
            .zip(counts)
            .map(|(s, c)| {
                if c == 0 {
                    s
                } else {
                    s.into_iter().map(|v| v / c as f64).collect()
                }
            })
            .collect()
    }
}
