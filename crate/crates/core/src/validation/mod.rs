//! Cluster validation: internal indices and the setup grid search.

mod grid;
mod indices;

pub(crate) use indices::format_ch;

pub use grid::{
    grid_search, paper_setups, render_table, write_csv, GridSearchOptions, GridSearchRow, Setup,
    SetupParam, CSV_HEADER,
};
pub use indices::{
    calinski_harabasz, davies_bouldin, silhouette_samples, silhouette_score, IndexError,
    IndexKind, IndexReport,
};
