//! File formats shared by the stage subcommands and the service.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::PipelineError;
use crate::clustering::ClusterModel;
use crate::features::{EncoderKind, FeatureTable, RowRef};
use crate::matrix::Matrix;
use crate::model::{Reduction, StyleModel};

pub const CORPUS_FILE: &str = "corpus.json";
pub const FEATURES_FILE: &str = "features.csv";
pub const REDUCTION_FILE: &str = "reduction.json";
pub const EMBEDDING_FILE: &str = "embedding.csv";
pub const CLUSTER_MODEL_FILE: &str = "cluster_model.json";
pub const LABELS_FILE: &str = "labels.csv";
pub const INDICES_FILE: &str = "indices.json";
pub const TRAJECTORIES_FILE: &str = "trajectories.jsonl";
pub const UNIQUE_PATHS_FILE: &str = "unique_paths.json";
pub const PATTERNS_FILE: &str = "patterns.json";
pub const PERSONA_REPORT_FILE: &str = "persona_report.json";
pub const PERSONA_TEXT_FILE: &str = "personas.txt";
pub const SCATTER_FILE: &str = "cluster_scatter.svg";
pub const PATH_DIAGRAM_FILE: &str = "path_diagram.svg";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const MANIFEST_FILE: &str = "manifest.json";

pub(crate) fn read(path: &Path) -> Result<Vec<u8>, PipelineError> {
    fs::read(path).map_err(|e| PipelineError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, PipelineError> {
    serde_json::from_slice(&read(path)?).map_err(|e| PipelineError::Format {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serialisable");
    bytes.push(b'\n');
    bytes
}

fn format_err(path: &Path, message: impl ToString) -> PipelineError {
    PipelineError::Format {
        path: path.display().to_string(),
        message: message.to_string(),
    }
}

/// `session_id,step,<columns>` with one row per table row.
pub fn write_table_csv(index: &[RowRef], header: &[String], matrix: &Matrix) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["session_id".to_string(), "step".to_string()];
    head.extend(header.iter().cloned());
    w.write_record(&head).expect("in-memory write");
    for (r, row) in index.iter().zip(matrix.iter_rows()) {
        let mut rec = vec![r.session_id.clone(), r.step.to_string()];
        rec.extend(row.iter().map(f64::to_string));
        w.write_record(&rec).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Inverse of [`write_table_csv`]: header columns, row refs and values.
pub fn read_table_csv(path: &Path) -> Result<(Vec<String>, Vec<RowRef>, Matrix), PipelineError> {
    let bytes = read(path)?;
    let mut r = csv::Reader::from_reader(bytes.as_slice());
    let header: Vec<String> = r.headers().map_err(|e| format_err(path, e))?.iter().map(String::from).collect();
    if header.len() < 3 || header[0] != "session_id" || header[1] != "step" {
        return Err(format_err(path, "expected header session_id,step,<columns>"));
    }
    let columns = header[2..].to_vec();
    let mut index = Vec::new();
    let mut data = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| format_err(path, e))?;
        if rec.len() != header.len() {
            return Err(format_err(path, format!("row {} has {} fields, expected {}", line + 1, rec.len(), header.len())));
        }
        let step = rec[1]
            .parse()
            .map_err(|_| format_err(path, format!("row {}: bad step {:?}", line + 1, &rec[1])))?;
        index.push(RowRef {
            session_id: rec[0].to_string(),
            step,
        });
        for v in rec.iter().skip(2) {
            data.push(
                v.parse::<f64>()
                    .map_err(|_| format_err(path, format!("row {}: bad number {v:?}", line + 1)))?,
            );
        }
    }
    let matrix = Matrix::from_vec(index.len(), columns.len(), data).expect("checked widths");
    Ok((columns, index, matrix))
}

pub fn write_features_csv(table: &FeatureTable) -> Vec<u8> {
    write_table_csv(&table.index, &table.kind.column_names(), &table.matrix)
}

pub fn read_features_csv(path: &Path) -> Result<FeatureTable, PipelineError> {
    let (columns, index, matrix) = read_table_csv(path)?;
    let kind = EncoderKind::from_columns(&columns)
        .ok_or_else(|| format_err(path, "columns match no known encoder"))?;
    Ok(FeatureTable { kind, matrix, index })
}

pub fn embedding_columns(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("pc{i}")).collect()
}

pub fn write_labels_csv(index: &[RowRef], labels: &[i32]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["session_id", "step", "cluster"]).expect("in-memory write");
    for (r, l) in index.iter().zip(labels) {
        w.write_record([r.session_id.clone(), r.step.to_string(), l.to_string()])
            .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Loads reduction.json, cluster_model.json and embedding.csv from `dir`.
pub fn load_model(dir: &Path) -> Result<StyleModel, PipelineError> {
    let reduction: Reduction = read_json(&dir.join(REDUCTION_FILE))?;
    let clusters: ClusterModel = read_json(&dir.join(CLUSTER_MODEL_FILE))?;
    let (_, _, embedding) = read_table_csv(&dir.join(EMBEDDING_FILE))?;
    Ok(StyleModel::new(reduction, clusters, embedding)?)
}

/// Writes the three bundle files of `model` into `dir`.
pub fn save_model(model: &StyleModel, index: &[RowRef], dir: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    let files = [
        (REDUCTION_FILE, to_json(&model.reduction)),
        (CLUSTER_MODEL_FILE, to_json(&model.clusters)),
        (
            EMBEDDING_FILE,
            write_table_csv(index, &embedding_columns(model.embedding.cols()), &model.embedding),
        ),
    ];
    for (name, bytes) in files {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| PipelineError::io(&path, e))?;
    }
    Ok(())
}
