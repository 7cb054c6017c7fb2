//! Scoring mined patterns against the personas a corpus was generated from.

use serde::{Deserialize, Serialize};

use super::align_labels;
use crate::seqmine::Pattern;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    /// Predicted cluster id → planted style id.
    pub alignment: Vec<Option<usize>>,
    /// The first `top_n` ranked patterns, translated to planted ids.
    pub top_patterns: Vec<Vec<Option<usize>>>,
    /// Per planted path, whether it appears among `top_patterns`.
    pub recovered: Vec<bool>,
}

impl Recovery {
    pub fn all_recovered(&self) -> bool {
        self.recovered.iter().all(|&r| r)
    }
}

/// Aligns predicted step labels to planted styles, then looks for each
/// planted path among the first `top_n` of `ranked` (translated through the
/// alignment).
pub fn score_recovery(
    predicted: &[usize],
    planted: &[usize],
    n_predicted: usize,
    n_planted: usize,
    ranked: &[Pattern],
    planted_paths: &[Vec<usize>],
    top_n: usize,
) -> Recovery {
    let alignment = align_labels(predicted, planted, n_predicted, n_planted);
    let top_patterns: Vec<Vec<Option<usize>>> = ranked
        .iter()
        .take(top_n)
        .map(|p| p.items.iter().map(|&c| alignment.get(c).copied().flatten()).collect())
        .collect();
    let recovered = planted_paths
        .iter()
        .map(|path| {
            top_patterns
                .iter()
                .any(|t| t.len() == path.len() && t.iter().zip(path).all(|(a, b)| *a == Some(*b)))
        })
        .collect();
    Recovery {
        alignment,
        top_patterns,
        recovered,
    }
}
