//! End-to-end pipeline: ingest → encode → reduce → cluster → validate →
//! trajectories → mine → personas → report. Every stage writes its outputs
//! into one directory and a `manifest.json` records their SHA-256 hashes.
//!
//! The run is a pure function of the corpus bytes and the config: nothing
//! time- or path-dependent enters any artifact.

mod io;
pub mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::clustering::{self, Algorithm, ClusterConfig, ClusterError, ClusterModel, DbscanParams, FitParams};
use crate::features::{encode_corpus, EncoderKind, FeatureError, FeatureTable};
use crate::matrix::Matrix;
use crate::model::{ModelError, Reduction, StyleModel};
use crate::reduction::PcaError;
use crate::seqmine::{absolute_support, gsp_mine, maximal_patterns, Mode, Pattern, PersonaConfig, PersonaReport, SeqMineError, SequenceDb};
use crate::synth::SynthError;
use crate::trace::{parse_corpus, serialize_corpus, Corpus, TraceError};
use crate::trajectory::{assign_clusters, unique_trajectories, write_jsonl, FilterConfig, TrajectoryRecord, UniquePath};
use crate::validation::{IndexError, IndexReport};

pub use io::*;
pub use svg::{render_cluster_scatter, render_path_diagram, SvgError};

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Mine(#[from] SeqMineError),
    #[error(transparent)]
    Svg(#[from] SvgError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("stage {stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<PipelineError>,
    },
}

impl PipelineError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Stable machine-readable code, printed by the CLI as `error[CODE]`.
    pub fn code(&self) -> &'static str {
        match self {
            Self::Config(_) => "E_CONFIG",
            Self::Io { .. } => "E_IO",
            Self::Format { .. } => "E_FORMAT",
            Self::Trace(_) => "E_TRACE",
            Self::Feature(_) => "E_FEATURE",
            Self::Pca(_) => "E_PCA",
            Self::Cluster(_) => "E_CLUSTER",
            Self::Model(_) => "E_MODEL",
            Self::Index(_) => "E_INDEX",
            Self::Mine(_) => "E_MINE",
            Self::Svg(_) => "E_SVG",
            Self::Synth(_) => "E_SYNTH",
            Self::Stage { source, .. } => source.code(),
        }
    }

    fn in_stage(self, stage: Stage) -> Self {
        match self {
            e @ Self::Stage { .. } => e,
            e => Self::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Ingest,
    Encode,
    Reduce,
    Cluster,
    Validate,
    Trajectories,
    Mine,
    Personas,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Ingest,
        Stage::Encode,
        Stage::Reduce,
        Stage::Cluster,
        Stage::Validate,
        Stage::Trajectories,
        Stage::Mine,
        Stage::Personas,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Encode => "encode",
            Stage::Reduce => "reduce",
            Stage::Cluster => "cluster",
            Stage::Validate => "validate",
            Stage::Trajectories => "trajectories",
            Stage::Mine => "mine",
            Stage::Personas => "personas",
            Stage::Report => "report",
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything that determines a run's outputs. Paths are kept out of the
/// serialised form so manifests do not depend on where a run happened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub encoder: EncoderKind,
    pub pca_k: usize,
    pub algorithm: Algorithm,
    pub k: usize,
    pub eps: f64,
    pub min_pts: usize,
    pub theta: usize,
    pub min_support: f64,
    pub top_k: usize,
    pub mode: Mode,
    pub min_branch_freq: usize,
    pub seed: u64,
    #[serde(skip)]
    pub input: PathBuf,
    #[serde(skip)]
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let persona = PersonaConfig::default();
        Self {
            encoder: EncoderKind::Tiles,
            pca_k: crate::reduction::DEFAULT_COMPONENTS,
            algorithm: Algorithm::KMeans,
            k: 12,
            eps: DbscanParams::default().eps,
            min_pts: DbscanParams::default().min_pts,
            theta: FilterConfig::default().theta,
            min_support: persona.min_support,
            top_k: persona.top_k,
            mode: persona.mode,
            min_branch_freq: persona.min_branch_freq,
            seed: 0,
            input: PathBuf::new(),
            output_dir: PathBuf::new(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_string()));
        if self.pca_k == 0 {
            return bad("pca_k must be >= 1");
        }
        if self.k == 0 && self.algorithm != Algorithm::Dbscan {
            return bad("k must be >= 1");
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("eps must be a positive number");
        }
        if self.min_pts == 0 {
            return bad("min_pts must be >= 1");
        }
        if self.theta == 0 {
            return bad("theta must be >= 1");
        }
        if !(self.min_support > 0.0 && self.min_support <= 1.0) {
            return bad("min_support must be in (0, 1]");
        }
        if self.top_k == 0 {
            return bad("top_k must be >= 1");
        }
        Ok(())
    }

    pub fn fit_params(&self) -> FitParams {
        FitParams {
            algorithm: self.algorithm,
            config: ClusterConfig {
                k: self.k,
                seed: self.seed,
                ..ClusterConfig::default()
            },
            dbscan: DbscanParams {
                eps: self.eps,
                min_pts: self.min_pts,
            },
        }
    }

    pub fn filter(&self) -> FilterConfig {
        FilterConfig { theta: self.theta }
    }

    pub fn persona(&self) -> PersonaConfig {
        PersonaConfig {
            min_support: self.min_support,
            top_k: self.top_k,
            mode: self.mode,
            min_branch_freq: self.min_branch_freq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub outputs: Vec<ArtifactRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: PipelineConfig,
    pub input_sha256: String,
    pub stages: Vec<StageRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<StageFailure>,
}

impl Manifest {
    pub fn artifact(&self, file: &str) -> Option<&ArtifactRecord> {
        self.stages.iter().flat_map(|s| &s.outputs).find(|a| a.file == file)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes files into one directory and remembers what it wrote.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    written: Vec<ArtifactRecord>,
}

impl ArtifactWriter {
    pub fn create(dir: &Path) -> Result<Self, PipelineError> {
        fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, file: &str, bytes: &[u8]) -> Result<(), PipelineError> {
        let path = self.dir.join(file);
        fs::write(&path, bytes).map_err(|e| PipelineError::io(&path, e))?;
        self.written.push(ArtifactRecord {
            file: file.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    /// Records written since the last call.
    pub fn take(&mut self) -> Vec<ArtifactRecord> {
        std::mem::take(&mut self.written)
    }
}

/// Contents of `indices.json`. Degenerate clusterings (one cluster, all
/// noise) record the error instead of aborting the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicesFile {
    pub algorithm: Algorithm,
    pub n_clusters: usize,
    pub noise: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub indices: Option<IndexReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl IndicesFile {
    pub fn compute(embedding: &Matrix, model: &ClusterModel) -> Self {
        let (indices, error) = match IndexReport::compute(embedding, &model.labels) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Self {
            algorithm: model.algorithm,
            n_clusters: model.n_clusters,
            noise: model.noise_count(),
            indices,
            error,
        }
    }
}

/// Contents of `patterns.json`: every frequent pattern and the maximal ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternsFile {
    pub mode: Mode,
    pub n_sequences: usize,
    pub min_support_count: usize,
    pub frequent: Vec<Pattern>,
    pub maximal: Vec<Pattern>,
}

impl PatternsFile {
    pub fn mine(db: &SequenceDb, min_support: f64, mode: Mode) -> Result<Self, SeqMineError> {
        let min_support_count = absolute_support(min_support, db.len())?;
        let frequent = gsp_mine(db, min_support_count, mode);
        let maximal = maximal_patterns(&frequent, mode);
        Ok(Self {
            mode,
            n_sequences: db.len(),
            min_support_count,
            frequent,
            maximal,
        })
    }
}

/// Batch trajectories of every session under `model`.
pub fn corpus_trajectories(
    corpus: &Corpus,
    model: &StyleModel,
    filter: &FilterConfig,
) -> Result<Vec<TrajectoryRecord>, ModelError> {
    corpus
        .sessions()
        .iter()
        .map(|s| Ok(TrajectoryRecord::new(&assign_clusters(s, model)?, filter)))
        .collect()
}

pub fn unique_paths(records: &[TrajectoryRecord], filter: &FilterConfig) -> Vec<UniquePath> {
    let trajs: Vec<_> = records.iter().map(TrajectoryRecord::trajectory).collect();
    unique_trajectories(&trajs, filter)
}

pub fn trajectories_jsonl(records: &[TrajectoryRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    write_jsonl(records, &mut out).expect("in-memory write");
    out
}

/// The scatter plots the first two components; a 1-component embedding is
/// drawn on a line.
pub fn scatter_for(embedding: &Matrix, labels: &[i32]) -> Result<String, SvgError> {
    let plane = if embedding.cols() == 2 {
        embedding.clone()
    } else {
        let data = embedding
            .iter_rows()
            .flat_map(|r| [r[0], r.get(1).copied().unwrap_or(0.0)])
            .collect();
        Matrix::from_vec(embedding.rows(), 2, data).expect("two columns")
    };
    render_cluster_scatter(&plane, labels)
}

pub fn summary_text(
    theta: usize,
    corpus: &Corpus,
    model: &StyleModel,
    indices: &IndicesFile,
    unique: &[UniquePath],
    report: &PersonaReport,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "sessions: {}", corpus.sessions().len());
    let _ = writeln!(s, "steps: {}", corpus.total_steps());
    let _ = writeln!(
        s,
        "setup: {} {}-PCA-{}",
        model.clusters.algorithm.table_label(),
        model.encoder().label(),
        model.reduction.pca.n_components,
    );
    let var: Vec<String> = model.reduction.pca.explained_variance.iter().map(|v| format!("{v:.4}")).collect();
    let _ = writeln!(s, "explained variance: {}", var.join(", "));
    let _ = writeln!(s, "clusters: {}", model.n_clusters());
    for (i, size) in model.clusters.cluster_sizes().iter().enumerate() {
        let _ = writeln!(s, "  cluster {i}: {size} steps");
    }
    if indices.noise > 0 {
        let _ = writeln!(s, "  noise: {} steps", indices.noise);
    }
    match (&indices.indices, &indices.error) {
        (Some(r), _) => {
            let _ = writeln!(
                s,
                "silhouette: {:.4}\ndavies-bouldin: {:.4}\ncalinski-harabasz: {}",
                r.silhouette,
                r.davies_bouldin,
                crate::validation::format_ch(r.calinski_harabasz)
            );
        }
        (None, Some(e)) => {
            let _ = writeln!(s, "indices: unavailable ({e})");
        }
        (None, None) => {}
    }
    let _ = writeln!(s, "theta: {theta}");
    let _ = writeln!(s, "unique paths: {}", unique.len());
    s.push('\n');
    s.push_str(&report.render_text());
    s
}

/// The report stage's files: both figures and the text summary.
pub fn report_artifacts(
    theta: usize,
    corpus: &Corpus,
    model: &StyleModel,
    indices: &IndicesFile,
    unique: &[UniquePath],
    report: &PersonaReport,
) -> Result<Vec<(&'static str, Vec<u8>)>, SvgError> {
    Ok(vec![
        (SCATTER_FILE, scatter_for(&model.embedding, &model.clusters.labels)?.into_bytes()),
        (PATH_DIAGRAM_FILE, render_path_diagram(report).into_bytes()),
        (SUMMARY_FILE, summary_text(theta, corpus, model, indices, unique, report).into_bytes()),
    ])
}

/// Everything a run produced, kept in memory for callers that want to
/// inspect it without re-reading the files.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub manifest: Manifest,
    pub corpus: Corpus,
    pub features: FeatureTable,
    pub model: StyleModel,
    pub indices: IndicesFile,
    pub trajectories: Vec<TrajectoryRecord>,
    pub unique_paths: Vec<UniquePath>,
    pub patterns: PatternsFile,
    pub report: PersonaReport,
}

struct Runner {
    out: ArtifactWriter,
    stages: Vec<StageRecord>,
}

impl Runner {
    fn stage<T>(&mut self, stage: Stage, f: impl FnOnce(&mut ArtifactWriter) -> Result<T, PipelineError>) -> Result<T, PipelineError> {
        log::info!("stage {stage}");
        let value = f(&mut self.out).map_err(|e| e.in_stage(stage))?;
        self.stages.push(StageRecord {
            stage,
            outputs: self.out.take(),
        });
        Ok(value)
    }
}

/// Runs all stages on `config.input`, writing into `config.output_dir`.
/// On failure the outputs of finished stages stay on disk and the manifest
/// records which stage failed.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    config.validate()?;
    let bytes = io::read(&config.input)?;
    let out = ArtifactWriter::create(&config.output_dir)?;
    let mut runner = Runner { out, stages: Vec::new() };
    let mut manifest = Manifest {
        format_version: MANIFEST_FORMAT_VERSION,
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        config: PipelineConfig {
            input: PathBuf::new(),
            output_dir: PathBuf::new(),
            ..config.clone()
        },
        input_sha256: sha256_hex(&bytes),
        stages: Vec::new(),
        failure: None,
    };
    let result = run_stages(config, &bytes, &mut runner);
    manifest.stages = std::mem::take(&mut runner.stages);
    if let Err(PipelineError::Stage { stage, source }) = &result {
        manifest.failure = Some(StageFailure {
            stage: *stage,
            code: source.code().to_string(),
            message: source.to_string(),
        });
    }
    runner.out.write(MANIFEST_FILE, &io::to_json(&manifest))?;
    let o = result?;
    Ok(PipelineRun {
        manifest,
        corpus: o.corpus,
        features: o.features,
        model: o.model,
        indices: o.indices,
        trajectories: o.trajectories,
        unique_paths: o.unique_paths,
        patterns: o.patterns,
        report: o.report,
    })
}

struct Outputs {
    corpus: Corpus,
    features: FeatureTable,
    model: StyleModel,
    indices: IndicesFile,
    trajectories: Vec<TrajectoryRecord>,
    unique_paths: Vec<UniquePath>,
    patterns: PatternsFile,
    report: PersonaReport,
}

fn run_stages(config: &PipelineConfig, bytes: &[u8], r: &mut Runner) -> Result<Outputs, PipelineError> {
    let corpus = r.stage(Stage::Ingest, |out| {
        let corpus = parse_corpus(bytes)?;
        out.write(CORPUS_FILE, &serialize_corpus(&corpus))?;
        Ok(corpus)
    })?;

    let features = r.stage(Stage::Encode, |out| {
        let table = encode_corpus(&corpus, config.encoder)?;
        out.write(FEATURES_FILE, &write_features_csv(&table))?;
        Ok(table)
    })?;

    let (reduction, embedding) = r.stage(Stage::Reduce, |out| {
        let (reduction, embedding) = Reduction::fit(&features, config.pca_k)?;
        out.write(REDUCTION_FILE, &io::to_json(&reduction))?;
        out.write(
            EMBEDDING_FILE,
            &write_table_csv(&features.index, &embedding_columns(embedding.cols()), &embedding),
        )?;
        Ok((reduction, embedding))
    })?;

    let model = r.stage(Stage::Cluster, |out| {
        let clusters = clustering::fit(&embedding, &config.fit_params())?;
        out.write(CLUSTER_MODEL_FILE, &io::to_json(&clusters))?;
        out.write(LABELS_FILE, &write_labels_csv(&features.index, &clusters.labels))?;
        Ok(StyleModel::new(reduction, clusters, embedding)?)
    })?;

    let indices = r.stage(Stage::Validate, |out| {
        let indices = IndicesFile::compute(&model.embedding, &model.clusters);
        out.write(INDICES_FILE, &io::to_json(&indices))?;
        Ok(indices)
    })?;

    let filter = config.filter();
    let (trajectories, unique) = r.stage(Stage::Trajectories, |out| {
        let records = corpus_trajectories(&corpus, &model, &filter)?;
        let unique = unique_paths(&records, &filter);
        out.write(TRAJECTORIES_FILE, &trajectories_jsonl(&records))?;
        out.write(UNIQUE_PATHS_FILE, &io::to_json(&unique))?;
        Ok((records, unique))
    })?;

    let db = SequenceDb::from_unique_paths(&unique)?;
    let patterns = r.stage(Stage::Mine, |out| {
        let patterns = PatternsFile::mine(&db, config.min_support, config.mode)?;
        out.write(PATTERNS_FILE, &io::to_json(&patterns))?;
        Ok(patterns)
    })?;

    let report = r.stage(Stage::Personas, |out| {
        let report = PersonaReport::build(&db, &config.persona())?;
        out.write(PERSONA_REPORT_FILE, &io::to_json(&report))?;
        out.write(PERSONA_TEXT_FILE, report.render_text().as_bytes())?;
        Ok(report)
    })?;

    r.stage(Stage::Report, |out| {
        for (file, bytes) in report_artifacts(config.theta, &corpus, &model, &indices, &unique, &report)? {
            out.write(file, &bytes)?;
        }
        Ok(())
    })?;

    Ok(Outputs {
        corpus,
        features,
        model,
        indices,
        trajectories,
        unique_paths: unique,
        patterns,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_corpus, SynthSpec};

    fn synth_input(dir: &Path, sessions: usize, seed: u64) -> PathBuf {
        let g = generate_corpus(&SynthSpec::default(), sessions, seed).unwrap();
        let path = dir.join("input.json");
        fs::write(&path, serialize_corpus(&g.corpus)).unwrap();
        path
    }

    fn config(dir: &Path, input: PathBuf, out: &str) -> PipelineConfig {
        PipelineConfig {
            input,
            output_dir: dir.join(out),
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn default_run_lists_nine_stages() {
        let tmp = tempfile::tempdir().unwrap();
        let input = synth_input(tmp.path(), 24, 1);
        let run = run_pipeline(&config(tmp.path(), input, "out")).unwrap();
        let names: Vec<Stage> = run.manifest.stages.iter().map(|s| s.stage).collect();
        assert_eq!(names, Stage::ALL);
        assert!(run.manifest.stages.iter().all(|s| !s.outputs.is_empty()));
        for a in run.manifest.stages.iter().flat_map(|s| &s.outputs) {
            let bytes = fs::read(tmp.path().join("out").join(&a.file)).unwrap();
            assert_eq!(sha256_hex(&bytes), a.sha256, "{}", a.file);
        }
        let on_disk: Manifest = read_json(&tmp.path().join("out").join(MANIFEST_FILE)).unwrap();
        assert_eq!(on_disk, run.manifest);
    }

    #[test]
    fn rerun_gives_identical_manifest() {
        let tmp = tempfile::tempdir().unwrap();
        let input = synth_input(tmp.path(), 16, 2);
        run_pipeline(&config(tmp.path(), input.clone(), "a")).unwrap();
        run_pipeline(&config(tmp.path(), input, "b")).unwrap();
        let a = fs::read(tmp.path().join("a").join(MANIFEST_FILE)).unwrap();
        let b = fs::read(tmp.path().join("b").join(MANIFEST_FILE)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn indices_match_direct_module_calls() {
        let tmp = tempfile::tempdir().unwrap();
        let input = synth_input(tmp.path(), 16, 3);
        let out = tmp.path().join("out");
        run_pipeline(&config(tmp.path(), input, "out")).unwrap();

        // recompute from the written intermediates only
        let (_, _, embedding) = read_table_csv(&out.join(EMBEDDING_FILE)).unwrap();
        let clusters: ClusterModel = read_json(&out.join(CLUSTER_MODEL_FILE)).unwrap();
        let direct = IndexReport::compute(&embedding, &clusters.labels).unwrap();
        let file: IndicesFile = read_json(&out.join(INDICES_FILE)).unwrap();
        let got = file.indices.unwrap();
        assert!((got.silhouette - direct.silhouette).abs() < 1e-12);
        assert!((got.davies_bouldin - direct.davies_bouldin).abs() < 1e-12);
        assert!((got.calinski_harabasz - direct.calinski_harabasz).abs() <= 1e-9 * direct.calinski_harabasz);

        // and the embedding itself from the features
        let features = read_features_csv(&out.join(FEATURES_FILE)).unwrap();
        let (_, again) = Reduction::fit(&features, 2).unwrap();
        for (a, b) in again.iter_rows().zip(embedding.iter_rows()) {
            assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9));
        }
    }

    #[test]
    fn failing_stage_is_named_and_earlier_outputs_kept() {
        let tmp = tempfile::tempdir().unwrap();
        let input = synth_input(tmp.path(), 2, 4);
        // far more clusters than rows
        let cfg = PipelineConfig {
            k: 100_000,
            ..config(tmp.path(), input, "out")
        };
        let err = run_pipeline(&cfg).unwrap_err();
        assert!(matches!(err, PipelineError::Stage { stage: Stage::Cluster, .. }), "{err}");
        assert_eq!(err.code(), "E_CLUSTER");
        let out = tmp.path().join("out");
        assert!(out.join(EMBEDDING_FILE).exists());
        let m: Manifest = read_json(&out.join(MANIFEST_FILE)).unwrap();
        assert_eq!(m.stages.len(), 3);
        assert_eq!(m.failure.unwrap().stage, Stage::Cluster);
    }

    #[test]
    fn single_cluster_records_index_error() {
        let tmp = tempfile::tempdir().unwrap();
        let input = synth_input(tmp.path(), 6, 5);
        let cfg = PipelineConfig {
            k: 1,
            ..config(tmp.path(), input, "out")
        };
        let run = run_pipeline(&cfg).unwrap();
        assert!(run.indices.indices.is_none());
        assert!(run.indices.error.is_some());
    }

    #[test]
    fn config_rejects_theta_zero() {
        let cfg = PipelineConfig {
            theta: 0,
            ..PipelineConfig::default()
        };
        assert_eq!(cfg.validate().unwrap_err().code(), "E_CONFIG");
    }

    #[test]
    fn manifest_config_has_no_paths() {
        let cfg = PipelineConfig {
            input: "/somewhere/in.json".into(),
            ..PipelineConfig::default()
        };
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(!json.contains("somewhere"));
    }
}
