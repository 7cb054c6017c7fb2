//! Command-line front end. One subcommand per pipeline stage, composable
//! through the files they read and write, plus `run` for the whole flow.
//!
//! Errors print a single line `error[CODE]: message` to stderr and exit 1
//! (2 for usage errors).

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::clustering::{self, Algorithm, ClusterModel};
use crate::features::{encode_corpus, EncoderKind};
use crate::model::{Reduction, StyleModel};
use crate::pipeline::{self as p, ArtifactWriter, IndicesFile, PatternsFile, PipelineConfig, PipelineError};
use crate::seqmine::{Mode, PersonaReport, SequenceDb};
use crate::service::{self, LiveService};
use crate::synth::{generate_corpus, SynthSpec};
use crate::trace::{parse_corpus, serialize_corpus, Corpus};
use crate::trajectory::UniquePath;
use crate::validation::{grid_search, paper_setups, render_table, write_csv, GridSearchOptions, IndexKind, Setup, SetupParam};

pub const LOG_ENV: &str = "PERSONA_MINER_LOG";
pub const GRIDSEARCH_CSV: &str = "gridsearch.csv";
pub const GRIDSEARCH_TABLE: &str = "gridsearch.txt";
pub const PLANTED_FILE: &str = "planted.json";

#[derive(Debug, Parser)]
#[command(name = "persona-miner", version, about = "Design-style clustering and designer persona mining")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Io {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "out")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long = "algo", default_value = "kmeans")]
    pub algorithm: Algorithm,
    #[arg(long, default_value_t = 12)]
    pub k: usize,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value_t = 5)]
    pub min_pts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long, default_value_t = 0.15)]
    pub min_support: f64,
    #[arg(long, default_value = "gapped")]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct PersonaArgs {
    #[command(flatten)]
    pub mine: MineArgs,
    #[arg(long, default_value_t = 4)]
    pub top_k: usize,
    #[arg(long, default_value_t = 3)]
    pub min_branch_freq: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and write its normalised form.
    Ingest(Io),
    /// Corpus → features.csv.
    Encode {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value = "tiles")]
        encoder: EncoderKind,
    },
    /// features.csv → reduction.json + embedding.csv.
    Reduce {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 2)]
        pca_k: usize,
    },
    /// embedding.csv → cluster_model.json + labels.csv.
    Cluster {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        cluster: ClusterArgs,
    },
    /// Bundle directory → indices.json.
    Validate(Io),
    /// Evaluate a grid of setups on a corpus.
    Gridsearch {
        #[command(flatten)]
        io: Io,
        #[arg(long = "algo", value_delimiter = ',', default_value = "kmeans,agglo-single,agglo-average")]
        algorithms: Vec<Algorithm>,
        #[arg(long = "encoder", value_delimiter = ',', default_value = "tiles,dimensions,combined")]
        encoders: Vec<EncoderKind>,
        #[arg(long = "k", value_delimiter = ',', default_value = "6,9,12")]
        ks: Vec<usize>,
        /// DBSCAN radii, used when `dbscan` is among the algorithms.
        #[arg(long = "eps", value_delimiter = ',', default_value = "0.5")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        pca_k: usize,
        #[arg(long, default_value_t = 5)]
        min_pts: usize,
        #[arg(long, default_value = "silhouette")]
        sort_by: IndexKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Corpus + model bundle → trajectories.jsonl + unique_paths.json.
    Trajectories {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        model_dir: PathBuf,
        #[arg(long, default_value_t = 3)]
        theta: usize,
    },
    /// unique_paths.json → patterns.json.
    Mine {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        mine: MineArgs,
    },
    /// unique_paths.json → persona_report.json + personas.txt.
    Personas {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        personas: PersonaArgs,
    },
    /// Bundle directory → SVG figures and summary.txt.
    Report {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 3)]
        theta: usize,
    },
    /// Generate a synthetic corpus with planted personas.
    Synth {
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
        #[arg(long, default_value_t = 180)]
        sessions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Serve a model bundle over HTTP.
    Serve {
        #[arg(long)]
        model_dir: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
    /// Run every stage end to end.
    Run {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value = "tiles")]
        encoder: EncoderKind,
        #[arg(long, default_value_t = 2)]
        pca_k: usize,
        #[command(flatten)]
        cluster: ClusterArgs,
        #[arg(long, default_value_t = 3)]
        theta: usize,
        #[command(flatten)]
        personas: PersonaArgs,
    },
}

fn read_corpus(path: &Path) -> Result<Corpus, PipelineError> {
    Ok(parse_corpus(&fs::read(path).map_err(|e| PipelineError::io(path, e))?)?)
}

fn read_unique(path: &Path) -> Result<(Vec<UniquePath>, SequenceDb), PipelineError> {
    let unique: Vec<UniquePath> = p::read_json(path)?;
    let db = SequenceDb::from_unique_paths(&unique)?;
    Ok((unique, db))
}

fn announce(out: &mut ArtifactWriter) {
    for a in out.take() {
        println!("wrote {}", out.dir().join(&a.file).display());
    }
}

fn check_theta(theta: usize) -> Result<(), PipelineError> {
    if theta == 0 {
        return Err(PipelineError::Config("theta must be >= 1".into()));
    }
    Ok(())
}

pub fn execute(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Ingest(io) => {
            let corpus = read_corpus(&io.input)?;
            let mut out = ArtifactWriter::create(&io.output_dir)?;
            out.write(p::CORPUS_FILE, &serialize_corpus(&corpus))?;
            println!("{} sessions, {} steps", corpus.sessions().len(), corpus.total_steps());
            announce(&mut out);
        }
        Command::Encode { io, encoder } => {
            let table = encode_corpus(&read_corpus(&io.input)?, encoder)?;
            let mut out = ArtifactWriter::create(&io.output_dir)?;
            out.write(p::FEATURES_FILE, &p::write_features_csv(&table))?;
            announce(&mut out);
        }
        Command::Reduce { io, pca_k } => {
            let table = p::read_features_csv(&io.input)?;
            let (reduction, embedding) = Reduction::fit(&table, pca_k)?;
            let mut out = ArtifactWriter::create(&io.output_dir)?;
            out.write(p::REDUCTION_FILE, &p::to_json(&reduction))?;
            out.write(
                p::EMBEDDING_FILE,
                &p::write_table_csv(&table.index, &p::embedding_columns(pca_k), &embedding),
            )?;
            announce(&mut out);
        }
        Command::Cluster { io, cluster } => {
            let (_, index, embedding) = p::read_table_csv(&io.input)?;
            let cfg = PipelineConfig {
                algorithm: cluster.algorithm,
                k: cluster.k,
                eps: cluster.eps,
                min_pts: cluster.min_pts,
                seed: cluster.seed,
                ..PipelineConfig::default()
            };
            cfg.validate()?;
            let model = clustering::fit(&embedding, &cfg.fit_params())?;
            let mut out = ArtifactWriter::create(&io.output_dir)?;
            out.write(p::CLUSTER_MODEL_FILE, &p::to_json(&model))?;
            out.write(p::LABELS_FILE, &p::write_labels_csv(&index, &model.labels))?;
            println!("{} clusters, sizes {:?}", model.n_clusters, model.cluster_sizes());
            announce(&mut out);
        }
        Command::Validate(io) => {
            let (_, _, embedding) = p::read_table_csv(&io.input.join(p::EMBEDDING_FILE))?;
            let model: ClusterModel = p::read_json(&io.input.join(p::CLUSTER_MODEL_FILE))?;
            let indices = IndicesFile::compute(&embedding, &model);
            let mut out = ArtifactWriter::create(&io.output_dir)?;
            out.write(p::INDICES_FILE, &p::to_json(&indices))?;
            print!("{}", String::from_utf8_lossy(&p::to_json(&indices)));
            announce(&mut out);
        }
        Command::Gridsearch {
            io,
            algorithms,
            encoders,
            ks,
            eps,
            pca_k,
            min_pts,
            sort_by,
            seed,
        } => {
            let corpus = read_corpus(&io.input)?;
            let mut setups: Vec<Setup> = paper_setups(&algorithms, &encoders, &ks)
                .into_iter()
                .map(|s| Setup { pca_k, ..s })
                .collect();
            if algorithms.contains(&Algorithm::Dbscan) {
                for &encoder in &encoders {
                    for &e in &eps {
                        setups.push(Setup {
                            encoder,
                            pca_k,
                            algorithm: Algorithm::Dbscan,
                            param: SetupParam::Eps(e),
                        });
                    }
                }
            }
            let options = GridSearchOptions {
                seed,
                min_pts,
                primary: sort_by,
            };
            let rows = grid_search(&corpus, &setups, &options);
            let table = render_table(&rows);
            let mut csv = Vec::new();
            write_csv(&rows, &mut csv).map_err(|e| PipelineError::Format {
                path: GRIDSEARCH_CSV.into(),
                message: e.to_string(),
            })?;
            let mut out = ArtifactWriter::create(&io.output_dir)?;
            out.write(GRIDSEARCH_CSV, &csv)?;
            out.write(GRIDSEARCH_TABLE, table.as_bytes())?;
            print!("{table}");
            announce(&mut out);
        }
        Command::Trajectories { io, model_dir, theta } => {
            check_theta(theta)?;
            let corpus = read_corpus(&io.input)?;
            let model: StyleModel = p::load_model(&model_dir)?;
            let filter = crate::trajectory::FilterConfig { theta };
            let records = p::corpus_trajectories(&corpus, &model, &filter)?;
            let unique = p::unique_paths(&records, &filter);
            let mut out = ArtifactWriter::create(&io.output_dir)?;
            out.write(p::TRAJECTORIES_FILE, &p::trajectories_jsonl(&records))?;
            out.write(p::UNIQUE_PATHS_FILE, &p::to_json(&unique))?;
            println!("{} sessions, {} unique paths", records.len(), unique.len());
            announce(&mut out);
        }
        Command::Mine { io, mine } => {
            let (_, db) = read_unique(&io.input)?;
            let patterns = PatternsFile::mine(&db, mine.min_support, mine.mode)?;
            let mut out = ArtifactWriter::create(&io.output_dir)?;
            out.write(p::PATTERNS_FILE, &p::to_json(&patterns))?;
            println!(
                "{} frequent, {} maximal (support >= {})",
                patterns.frequent.len(),
                patterns.maximal.len(),
                patterns.min_support_count
            );
            announce(&mut out);
        }
        Command::Personas { io, personas } => {
            let (_, db) = read_unique(&io.input)?;
            let cfg = persona_config(&personas);
            cfg.validate()?;
            let report = PersonaReport::build(&db, &cfg.persona())?;
            let text = report.render_text();
            let mut out = ArtifactWriter::create(&io.output_dir)?;
            out.write(p::PERSONA_REPORT_FILE, &p::to_json(&report))?;
            out.write(p::PERSONA_TEXT_FILE, text.as_bytes())?;
            print!("{text}");
            announce(&mut out);
        }
        Command::Report { io, theta } => {
            check_theta(theta)?;
            let dir = &io.input;
            let corpus = read_corpus(&dir.join(p::CORPUS_FILE))?;
            let model = p::load_model(dir)?;
            let indices: IndicesFile = p::read_json(&dir.join(p::INDICES_FILE))?;
            let unique: Vec<UniquePath> = p::read_json(&dir.join(p::UNIQUE_PATHS_FILE))?;
            let report: PersonaReport = p::read_json(&dir.join(p::PERSONA_REPORT_FILE))?;
            let mut out = ArtifactWriter::create(&io.output_dir)?;
            for (file, bytes) in p::report_artifacts(theta, &corpus, &model, &indices, &unique, &report)? {
                out.write(file, &bytes)?;
            }
            announce(&mut out);
        }
        Command::Synth {
            output_dir,
            sessions,
            seed,
        } => {
            let g = generate_corpus(&SynthSpec::default(), sessions, seed)?;
            let planted = serde_json::json!({
                "seed": seed,
                "styles": g.styles,
                "personas": g.personas,
            });
            let mut out = ArtifactWriter::create(&output_dir)?;
            out.write(p::CORPUS_FILE, &serialize_corpus(&g.corpus))?;
            out.write(PLANTED_FILE, &p::to_json(&planted))?;
            println!("{} sessions, {} steps", g.corpus.sessions().len(), g.corpus.total_steps());
            announce(&mut out);
        }
        Command::Serve { model_dir, addr } => {
            let svc = Arc::new(LiveService::load(&model_dir)?);
            let rt = tokio::runtime::Runtime::new().map_err(|e| PipelineError::io(&model_dir, e))?;
            rt.block_on(service::serve(svc, addr)).map_err(|e| PipelineError::Io {
                path: addr.to_string(),
                source: e,
            })?;
        }
        Command::Run {
            io,
            encoder,
            pca_k,
            cluster,
            theta,
            personas,
        } => {
            let cfg = PipelineConfig {
                encoder,
                pca_k,
                algorithm: cluster.algorithm,
                k: cluster.k,
                eps: cluster.eps,
                min_pts: cluster.min_pts,
                seed: cluster.seed,
                theta,
                input: io.input,
                output_dir: io.output_dir,
                ..persona_config(&personas)
            };
            let run = p::run_pipeline(&cfg)?;
            let summary = fs::read_to_string(cfg.output_dir.join(p::SUMMARY_FILE))
                .map_err(|e| PipelineError::io(&cfg.output_dir, e))?;
            print!("{summary}");
            println!(
                "wrote {} ({} stages)",
                cfg.output_dir.join(p::MANIFEST_FILE).display(),
                run.manifest.stages.len()
            );
        }
    }
    Ok(())
}

fn persona_config(a: &PersonaArgs) -> PipelineConfig {
    PipelineConfig {
        min_support: a.mine.min_support,
        mode: a.mine.mode,
        top_k: a.top_k,
        min_branch_freq: a.min_branch_freq,
        ..PipelineConfig::default()
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main() -> i32 {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            // clap's message up to its usage block, folded onto one line
            let text = e.to_string();
            let msg: Vec<&str> = text
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            eprintln!("error[E_USAGE]: {}", msg.join(" ").trim_start_matches("error: "));
            return 2;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.code());
            1
        }
    }
}
