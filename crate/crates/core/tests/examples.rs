//! Every cargo example runs to completion.

macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(trace_model, "trace_model.rs");
example!(encoders, "encoders.rs");
example!(pca, "pca.rs");
example!(clustering, "clustering.rs");
example!(grid_search, "grid_search.rs");
example!(trajectories, "trajectories.rs");
example!(sequence_mining, "sequence_mining.rs");
example!(synthetic_personas, "synthetic_personas.rs");
example!(full_pipeline, "full_pipeline.rs");
example!(live_service, "live_service.rs");
example!(figures, "figures.rs");

#[test]
fn trace_model_runs() {
    trace_model::run_example().unwrap();
}

#[test]
fn encoders_runs() {
    encoders::run_example().unwrap();
}

#[test]
fn pca_runs() {
    pca::run_example().unwrap();
}

#[test]
fn clustering_runs() {
    clustering::run_example().unwrap();
}

#[test]
fn grid_search_runs() {
    grid_search::run_example().unwrap();
}

#[test]
fn trajectories_runs() {
    trajectories::run_example().unwrap();
}

#[test]
fn sequence_mining_runs() {
    sequence_mining::run_example().unwrap();
}

#[test]
fn synthetic_personas_runs() {
    synthetic_personas::run_example().unwrap();
}

#[test]
fn full_pipeline_runs() {
    full_pipeline::run_example().unwrap();
}

#[test]
fn live_service_runs() {
    live_service::run_example().unwrap();
}

#[test]
fn figures_runs() {
    figures::run_example().unwrap();
}
