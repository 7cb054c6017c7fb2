//! Live classification of design sessions against a fitted model bundle,
//! with next-style predictions from the persona report.
//!
//! Each session sits behind its own mutex, so steps for one session are
//! applied in order while different sessions proceed independently. The
//! model and report are shared read-only.

mod http;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, StyleModel};
use crate::pipeline::{self, Manifest, PipelineError};
use crate::seqmine::PersonaReport;
use crate::trace::{GridViolation, RoomGrid};
use crate::trajectory::{FilterConfig, Runs};

pub use http::{router, serve};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("session {0:?} already exists")]
    SessionExists(String),
    #[error("invalid grid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidGrid(Vec<GridViolation>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::UnknownSession(_) => "unknown_session",
            Self::SessionExists(_) => "session_exists",
            Self::InvalidGrid(_) => "invalid_grid",
            Self::Model(_) => "model",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchetypeMatch {
    pub archetype: String,
    pub matched_len: usize,
    pub archetype_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub cluster: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub session_id: String,
    pub step: usize,
    pub cluster: usize,
    /// Filtered, compressed path after this step.
    pub path: Vec<usize>,
    pub matched: Vec<ArchetypeMatch>,
    /// Heaviest first, ties by cluster id.
    pub predicted_next: Vec<Prediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiveSession {
    pub session_id: String,
    /// Wire form of every step.
    pub steps: Vec<String>,
    /// Cluster id per step.
    pub trajectory: Vec<usize>,
    pub path: Vec<usize>,
}

#[derive(Debug, Default)]
struct SessionState {
    steps: Vec<String>,
    trajectory: Vec<usize>,
    runs: Runs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterCard {
    pub id: usize,
    pub size: usize,
    /// First two PCA coordinates of the cluster mean.
    pub centroid: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonaCard {
    pub name: String,
    pub path: Vec<usize>,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelCard {
    pub encoder: String,
    pub pca_components: usize,
    pub algorithm: String,
    pub n_clusters: usize,
    pub training_rows: usize,
    pub noise_rows: usize,
    pub theta: usize,
    pub clusters: Vec<ClusterCard>,
    pub personas: Vec<PersonaCard>,
}

/// Longest `L` such that the last `L` elements of `path` equal the first
/// `L` elements of `archetype`.
pub fn prefix_match(path: &[usize], archetype: &[usize]) -> usize {
    (1..=path.len().min(archetype.len()))
        .rev()
        .find(|&l| path[path.len() - l..] == archetype[..l])
        .unwrap_or(0)
}

/// Archetype matches and next-cluster predictions for a compressed path.
/// Each matched archetype votes its support for its next element; branch
/// targets leaving the matched position add their frequency.
pub fn predict(path: &[usize], report: &PersonaReport) -> (Vec<ArchetypeMatch>, Vec<Prediction>) {
    let mut matched = Vec::new();
    let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
    for (a, arch) in report.archetypes.iter().enumerate() {
        let items = &arch.pattern.items;
        let m = prefix_match(path, items);
        if m == 0 {
            continue;
        }
        matched.push(ArchetypeMatch {
            archetype: arch.name.clone(),
            matched_len: m,
            archetype_len: items.len(),
        });
        if let Some(&next) = items.get(m) {
            *weights.entry(next).or_default() += arch.pattern.support as f64;
        }
        for b in report.branches.iter().filter(|b| b.archetype == a && b.position == m - 1) {
            for t in &b.targets {
                *weights.entry(t.cluster).or_default() += t.frequency as f64;
            }
        }
    }
    let mut predicted: Vec<Prediction> = weights
        .into_iter()
        .map(|(cluster, weight)| Prediction { cluster, weight })
        .collect();
    predicted.sort_by(|x, y| y.weight.total_cmp(&x.weight).then(x.cluster.cmp(&y.cluster)));
    (matched, predicted)
}

pub struct LiveService {
    model: Arc<StyleModel>,
    report: Arc<PersonaReport>,
    filter: FilterConfig,
    sessions: RwLock<HashMap<String, Arc<Mutex<SessionState>>>>,
    next_id: AtomicU64,
}

impl LiveService {
    pub fn new(model: StyleModel, report: PersonaReport, filter: FilterConfig) -> Self {
        Self {
            model: Arc::new(model),
            report: Arc::new(report),
            filter,
            sessions: RwLock::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        }
    }

    /// Loads a bundle written by the pipeline. θ comes from the bundle's
    /// manifest when present.
    pub fn load(dir: &Path) -> Result<Self, PipelineError> {
        let model = pipeline::load_model(dir)?;
        let report: PersonaReport = pipeline::read_json(&dir.join(pipeline::PERSONA_REPORT_FILE))?;
        let manifest_path = dir.join(pipeline::MANIFEST_FILE);
        let filter = if manifest_path.exists() {
            let m: Manifest = pipeline::read_json(&manifest_path)?;
            m.config.filter()
        } else {
            FilterConfig::default()
        };
        Ok(Self::new(model, report, filter))
    }

    pub fn model(&self) -> &StyleModel {
        &self.model
    }

    pub fn report(&self) -> &PersonaReport {
        &self.report
    }

    /// Opens a session, with a generated id unless one is given.
    pub fn create_session(&self, id: Option<String>) -> Result<String, ServiceError> {
        let mut sessions = self.sessions.write().expect("session table poisoned");
        let id = match id {
            Some(id) if sessions.contains_key(&id) => return Err(ServiceError::SessionExists(id)),
            Some(id) => id,
            None => loop {
                let candidate = format!("live-{:06}", self.next_id.fetch_add(1, Ordering::Relaxed));
                if !sessions.contains_key(&candidate) {
                    break candidate;
                }
            },
        };
        sessions.insert(id.clone(), Arc::default());
        Ok(id)
    }

    fn state(&self, id: &str) -> Result<Arc<Mutex<SessionState>>, ServiceError> {
        self.sessions
            .read()
            .expect("session table poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    /// Parses and classifies one step from its 91-character wire form.
    pub fn classify_wire(&self, id: &str, wire: &str) -> Result<Classification, ServiceError> {
        let grid = RoomGrid::parse(wire).map_err(ServiceError::InvalidGrid)?;
        self.classify_step(id, &grid)
    }

    pub fn classify_step(&self, id: &str, grid: &RoomGrid) -> Result<Classification, ServiceError> {
        let state = self.state(id)?;
        let cluster = self.model.classify(grid)?;
        let mut s = state.lock().expect("session poisoned");
        s.steps.push(grid.to_code_string());
        s.trajectory.push(cluster);
        s.runs.push(cluster);
        let path = s.runs.path(self.filter.theta);
        let step = s.steps.len() - 1;
        drop(s);
        let (matched, predicted_next) = predict(&path, &self.report);
        Ok(Classification {
            session_id: id.to_string(),
            step,
            cluster,
            path,
            matched,
            predicted_next,
        })
    }

    pub fn session(&self, id: &str) -> Result<LiveSession, ServiceError> {
        let state = self.state(id)?;
        let s = state.lock().expect("session poisoned");
        Ok(LiveSession {
            session_id: id.to_string(),
            steps: s.steps.clone(),
            trajectory: s.trajectory.clone(),
            path: s.runs.path(self.filter.theta),
        })
    }

    pub fn model_card(&self) -> ModelCard {
        let m = &self.model;
        let sizes = m.clusters.cluster_sizes();
        let clusters = m
            .cluster_centroids()
            .into_iter()
            .zip(sizes)
            .enumerate()
            .map(|(id, (c, size))| ClusterCard {
                id,
                size,
                centroid: [c.first().copied().unwrap_or(0.0), c.get(1).copied().unwrap_or(0.0)],
            })
            .collect();
        ModelCard {
            encoder: m.encoder().to_string(),
            pca_components: m.reduction.pca.n_components,
            algorithm: m.clusters.algorithm.to_string(),
            n_clusters: m.n_clusters(),
            training_rows: m.embedding.rows(),
            noise_rows: m.clusters.noise_count(),
            theta: self.filter.theta,
            clusters,
            personas: self
                .report
                .archetypes
                .iter()
                .map(|a| PersonaCard {
                    name: a.name.clone(),
                    path: a.pattern.items.clone(),
                    support: a.pattern.support,
                })
                .collect(),
        }
    }
}
