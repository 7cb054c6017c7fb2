//! End-to-end evaluation of (encoder, PCA, algorithm, parameter) setups.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::indices::{format_ch, IndexKind, IndexReport};
use crate::clustering::{
    fit, linkage_tree, model_from_cut, Algorithm, ClusterConfig, DbscanParams, Dendrogram,
    FitParams,
};
use crate::features::{encode_corpus, EncoderKind};
use crate::matrix::Matrix;
use crate::model::Reduction;
use crate::trace::Corpus;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetupParam {
    K(usize),
    Eps(f64),
}

impl std::fmt::Display for SetupParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SetupParam::K(k) => write!(f, "{k}"),
            SetupParam::Eps(e) => write!(f, "eps={e}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setup {
    pub encoder: EncoderKind,
    pub pca_k: usize,
    pub algorithm: Algorithm,
    pub param: SetupParam,
}

impl Setup {
    /// Data column label, e.g. `Tiles-PCA`.
    pub fn data_label(&self) -> String {
        format!("{}-PCA", self.encoder.label())
    }
}

/// Cartesian product of algorithms × encoders × K values, PCA to 2
/// components. DBSCAN is not a K-parameterised algorithm and is skipped.
pub fn paper_setups(algorithms: &[Algorithm], encoders: &[EncoderKind], ks: &[usize]) -> Vec<Setup> {
    let mut out = Vec::new();
    for &algorithm in algorithms.iter().filter(|a| **a != Algorithm::Dbscan) {
        for &encoder in encoders {
            for &k in ks {
                out.push(Setup {
                    encoder,
                    pca_k: crate::reduction::DEFAULT_COMPONENTS,
                    algorithm,
                    param: SetupParam::K(k),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchOptions {
    pub seed: u64,
    pub min_pts: usize,
    pub primary: IndexKind,
}

impl Default for GridSearchOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            min_pts: DbscanParams::default().min_pts,
            primary: IndexKind::Silhouette,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchRow {
    /// Position of the setup in the input list.
    pub setup_index: usize,
    pub setup: Setup,
    /// Reduction tag, e.g. `PCA-2`.
    pub reduction: String,
    pub report: Option<IndexReport>,
    pub error: Option<String>,
}

/// Evaluates every setup and returns one row each, best first by
/// `options.primary`. Failed setups become error rows at the end, in input
/// order.
pub fn grid_search(corpus: &Corpus, setups: &[Setup], options: &GridSearchOptions) -> Vec<GridSearchRow> {
    let mut embeddings: HashMap<(EncoderKind, usize), Result<Matrix, String>> = HashMap::new();
    let mut trees: HashMap<(EncoderKind, usize, Algorithm), Dendrogram> = HashMap::new();

    let mut rows: Vec<GridSearchRow> = setups
        .iter()
        .enumerate()
        .map(|(setup_index, setup)| {
            let outcome = embeddings
                .entry((setup.encoder, setup.pca_k))
                .or_insert_with(|| embed(corpus, setup.encoder, setup.pca_k))
                .clone()
                .and_then(|x| evaluate(&x, setup, options, &mut trees));
            if let Err(e) = &outcome {
                log::warn!("setup {setup_index} ({} {} {}) failed: {e}", setup.algorithm, setup.data_label(), setup.param);
            }
            let (report, error) = match outcome {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e)),
            };
            GridSearchRow {
                setup_index,
                setup: *setup,
                reduction: format!("PCA-{}", setup.pca_k),
                report,
                error,
            }
        })
        .collect();

    let primary = options.primary;
    rows.sort_by(|a, b| match (&a.report, &b.report) {
        (Some(x), Some(y)) => {
            let (x, y) = (x.get(primary), y.get(primary));
            let ord = if primary.higher_is_better() { y.total_cmp(&x) } else { x.total_cmp(&y) };
            ord.then(a.setup_index.cmp(&b.setup_index))
        }
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.setup_index.cmp(&b.setup_index),
    });
    rows
}

fn embed(corpus: &Corpus, encoder: EncoderKind, pca_k: usize) -> Result<Matrix, String> {
    let table = encode_corpus(corpus, encoder).map_err(|e| e.to_string())?;
    let (_, embedding) = Reduction::fit(&table, pca_k).map_err(|e| e.to_string())?;
    Ok(embedding)
}

fn evaluate(
    x: &Matrix,
    setup: &Setup,
    options: &GridSearchOptions,
    trees: &mut HashMap<(EncoderKind, usize, Algorithm), Dendrogram>,
) -> Result<IndexReport, String> {
    let labels = match (setup.algorithm.linkage(), setup.param) {
        (Some(linkage), SetupParam::K(k)) => {
            if k == 0 || k > x.rows() {
                return Err(format!("k={k} invalid for {} rows", x.rows()));
            }
            let tree = trees
                .entry((setup.encoder, setup.pca_k, setup.algorithm))
                .or_insert_with(|| linkage_tree(x, linkage));
            model_from_cut(tree, k).labels
        }
        (_, param) => {
            let mut params = FitParams {
                algorithm: setup.algorithm,
                config: ClusterConfig {
                    seed: options.seed,
                    ..ClusterConfig::default()
                },
                dbscan: DbscanParams {
                    min_pts: options.min_pts,
                    ..DbscanParams::default()
                },
            };
            match (setup.algorithm, param) {
                (Algorithm::Dbscan, SetupParam::Eps(eps)) => params.dbscan.eps = eps,
                (Algorithm::Dbscan, SetupParam::K(_)) => {
                    return Err("dbscan takes eps, not k".into())
                }
                (_, SetupParam::K(k)) => params.config.k = k,
                (a, SetupParam::Eps(_)) => return Err(format!("{a} takes k, not eps")),
            }
            fit(x, &params).map_err(|e| e.to_string())?.labels
        }
    };
    IndexReport::compute(x, &labels).map_err(|e| e.to_string())
}

pub const CSV_HEADER: [&str; 6] = ["algorithm", "data", "k", "silhouette", "davies_bouldin", "calinski_harabasz"];

impl GridSearchRow {
    /// CSV record; index fields are empty for failed setups.
    pub fn csv_record(&self) -> [String; 6] {
        let (s, db, ch) = match &self.report {
            Some(r) => (r.silhouette.to_string(), r.davies_bouldin.to_string(), format_ch(r.calinski_harabasz)),
            None => Default::default(),
        };
        [
            self.setup.algorithm.table_label().to_string(),
            self.setup.data_label(),
            self.setup.param.to_string(),
            s,
            db,
            ch,
        ]
    }
}

/// Fixed-width table with columns Algorithm | Data | K | Silhouette | DB | CH.
pub fn render_table(rows: &[GridSearchRow]) -> String {
    let header = ["Algorithm", "Data", "K", "Silhouette", "DB", "CH"];
    let body: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            let (s, db, ch) = match &r.report {
                Some(rep) => (
                    format!("{:.4}", rep.silhouette),
                    format!("{:.4}", rep.davies_bouldin),
                    if rep.calinski_harabasz.is_infinite() {
                        "inf".to_string()
                    } else {
                        format!("{:.2}", rep.calinski_harabasz)
                    },
                ),
                None => ("error".into(), "error".into(), "error".into()),
            };
            [
                r.setup.algorithm.table_label().to_string(),
                r.setup.data_label(),
                r.setup.param.to_string(),
                s,
                db,
                ch,
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[&str]| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(widths).enumerate() {
            if i > 0 {
                s.push_str(" | ");
            }
            let _ = write!(s, "{c:<w$}");
        }
        s.trim_end().to_string()
    };
    let mut out = line(&header);
    out.push('\n');
    out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"));
    out.push('\n');
    for row in &body {
        out.push_str(&line(&row.iter().map(String::as_str).collect::<Vec<_>>()));
        out.push('\n');
    }
    out
}

/// Writes the rows as CSV with the `CSV_HEADER` columns.
pub fn write_csv<W: std::io::Write>(rows: &[GridSearchRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{DesignSession, RoomGrid, TileType};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Four styles: each fills a different quadrant-ish block with a
    /// different tile, plus a few random single-cell changes per step.
    fn four_style_corpus() -> Corpus {
        let blocks = [
            (0..6, 0..3, TileType::Wall),
            (7..13, 0..3, TileType::Enemy),
            (0..6, 4..7, TileType::Treasure),
            (7..13, 4..7, TileType::Door),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sessions = blocks
            .into_iter()
            .enumerate()
            .map(|(s, (xs, ys, tile))| {
                let mut base = RoomGrid::filled(TileType::Floor);
                for y in ys.clone() {
                    for x in xs.clone() {
                        base.set(x, y, tile);
                    }
                }
                let grids = (0..15)
                    .map(|_| {
                        let mut g = base.clone();
                        g.set_cell(rng.gen_range(0..91), TileType::Boss);
                        g
                    })
                    .collect();
                DesignSession::new(format!("s{s}"), "p", grids).unwrap()
            })
            .collect();
        Corpus::new(sessions).unwrap()
    }

    fn setup(algorithm: Algorithm, k: usize) -> Setup {
        Setup {
            encoder: EncoderKind::Tiles,
            pca_k: 2,
            algorithm,
            param: SetupParam::K(k),
        }
    }

    #[test]
    fn single_setup_matches_direct_calls() {
        let corpus = four_style_corpus();
        let s = setup(Algorithm::KMeans, 4);
        let rows = grid_search(&corpus, &[s], &GridSearchOptions::default());
        assert_eq!(rows.len(), 1);

        let table = encode_corpus(&corpus, EncoderKind::Tiles).unwrap();
        let (_, x) = Reduction::fit(&table, 2).unwrap();
        let model = fit(
            &x,
            &FitParams {
                algorithm: Algorithm::KMeans,
                config: ClusterConfig::with_k(4),
                dbscan: DbscanParams::default(),
            },
        )
        .unwrap();
        assert_eq!(rows[0].report, Some(IndexReport::compute(&x, &model.labels).unwrap()));
    }

    #[test]
    fn planted_k_beats_smaller_k() {
        let corpus = four_style_corpus();
        for algorithm in [Algorithm::KMeans, Algorithm::AggloAverage] {
            let rows = grid_search(
                &corpus,
                &[setup(algorithm, 2), setup(algorithm, 4)],
                &GridSearchOptions::default(),
            );
            // best first
            assert_eq!(rows[0].setup.param, SetupParam::K(4), "{algorithm}");
            assert!(rows[0].report.unwrap().silhouette > rows[1].report.unwrap().silhouette);
        }
    }

    #[test]
    fn failures_become_trailing_error_rows() {
        let corpus = four_style_corpus();
        let setups = [
            setup(Algorithm::KMeans, 500),
            setup(Algorithm::KMeans, 3),
            Setup {
                param: SetupParam::Eps(0.3),
                ..setup(Algorithm::KMeans, 0)
            },
        ];
        let rows = grid_search(&corpus, &setups, &GridSearchOptions::default());
        assert_eq!(rows.iter().map(|r| r.setup_index).collect::<Vec<_>>(), vec![1, 0, 2]);
        assert!(rows[1].error.is_some() && rows[2].error.is_some());
    }

    #[test]
    fn davies_bouldin_sorts_ascending() {
        let corpus = four_style_corpus();
        let options = GridSearchOptions {
            primary: IndexKind::DaviesBouldin,
            ..GridSearchOptions::default()
        };
        let rows = grid_search(
            &corpus,
            &paper_setups(&[Algorithm::KMeans], &[EncoderKind::Tiles], &[2, 3, 4]),
            &options,
        );
        let db: Vec<f64> = rows.iter().map(|r| r.report.unwrap().davies_bouldin).collect();
        assert!(db.windows(2).all(|w| w[0] <= w[1]), "{db:?}");
    }

    #[test]
    fn table_and_csv_columns() {
        let corpus = four_style_corpus();
        let rows = grid_search(&corpus, &[setup(Algorithm::AggloSingle, 4)], &GridSearchOptions::default());
        let table = render_table(&rows);
        let header: Vec<&str> = table.lines().next().unwrap().split('|').map(str::trim).collect();
        assert_eq!(header, ["Algorithm", "Data", "K", "Silhouette", "DB", "CH"]);
        assert!(table.lines().nth(2).unwrap().starts_with("Agglo.sing. | Tiles-PCA | 4 "));

        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("algorithm,data,k,silhouette,davies_bouldin,calinski_harabasz\n"));
        assert_eq!(text.lines().count(), 2);
    }
}
