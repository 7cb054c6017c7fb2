//! Frequent subsequence mining (GSP) over compressed trajectories, archetype
//! extraction and branch annotation.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trajectory::UniquePath;

#[derive(Debug, Error, PartialEq)]
pub enum SeqMineError {
    #[error("sequence {0:?} is empty")]
    EmptySequence(String),
    #[error("relative support must be in (0, 1], got {0}")]
    RelativeSupport(f64),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceDb {
    sequences: Vec<(String, Vec<usize>)>,
}

impl SequenceDb {
    pub fn new(sequences: Vec<(String, Vec<usize>)>) -> Result<Self, SeqMineError> {
        if let Some((id, _)) = sequences.iter().find(|(_, s)| s.is_empty()) {
            return Err(SeqMineError::EmptySequence(id.clone()));
        }
        Ok(Self { sequences })
    }

    /// Anonymous ids `0, 1, ...`.
    pub fn from_sequences(seqs: Vec<Vec<usize>>) -> Result<Self, SeqMineError> {
        Self::new(seqs.into_iter().enumerate().map(|(i, s)| (i.to_string(), s)).collect())
    }

    /// One sequence per session, so a path shared by several sessions
    /// contributes its multiplicity to every support count.
    pub fn from_unique_paths(paths: &[UniquePath]) -> Result<Self, SeqMineError> {
        Self::new(
            paths
                .iter()
                .flat_map(|u| u.session_ids.iter().map(|id| (id.clone(), u.path.clone())))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn sequences(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.sequences.iter().map(|(_, s)| s.as_slice())
    }

    pub fn entries(&self) -> &[(String, Vec<usize>)] {
        &self.sequences
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Order-preserving with gaps allowed.
    #[default]
    Gapped,
    /// Items must appear as a consecutive run.
    Contiguous,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Gapped => "gapped",
            Mode::Contiguous => "contiguous",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gapped" => Ok(Mode::Gapped),
            "contiguous" => Ok(Mode::Contiguous),
            _ => Err(format!("unknown mode {s:?} (expected gapped|contiguous)")),
        }
    }
}

/// Whether `pattern` occurs in `seq` under `mode`.
pub fn contains(seq: &[usize], pattern: &[usize], mode: Mode) -> bool {
    match mode {
        Mode::Gapped => {
            let mut it = seq.iter();
            pattern.iter().all(|p| it.any(|s| s == p))
        }
        Mode::Contiguous => pattern.is_empty() || seq.windows(pattern.len()).any(|w| w == pattern),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pattern {
    pub items: Vec<usize>,
    /// Number of distinct db sequences containing the pattern.
    pub support: usize,
}

fn support(db: &SequenceDb, items: &[usize], mode: Mode) -> usize {
    db.sequences().filter(|s| contains(s, items, mode)).count()
}

/// Absolute support for a fraction of the db, at least 1.
pub fn absolute_support(relative: f64, db_len: usize) -> Result<usize, SeqMineError> {
    if !(relative > 0.0 && relative <= 1.0) {
        return Err(SeqMineError::RelativeSupport(relative));
    }
    Ok(((relative * db_len as f64).ceil() as usize).max(1))
}

/// All patterns with support ≥ `min_support`, ordered by length then items.
pub fn gsp_mine(db: &SequenceDb, min_support: usize, mode: Mode) -> Vec<Pattern> {
    let min_support = min_support.max(1);
    let items: BTreeSet<usize> = db.sequences().flatten().copied().collect();
    let mut level: Vec<Pattern> = items
        .into_iter()
        .map(|i| Pattern {
            support: support(db, &[i], mode),
            items: vec![i],
        })
        .filter(|p| p.support >= min_support)
        .collect();

    let mut out = Vec::new();
    while !level.is_empty() {
        let frequent: HashSet<&[usize]> = level.iter().map(|p| p.items.as_slice()).collect();
        let mut candidates: BTreeSet<Vec<usize>> = BTreeSet::new();
        for p in &level {
            for q in &level {
                if p.items[1..] == q.items[..q.items.len() - 1] {
                    let mut c = p.items.clone();
                    c.push(*q.items.last().expect("non-empty"));
                    if survives_prune(&c, &frequent, mode) {
                        candidates.insert(c);
                    }
                }
            }
        }
        let next: Vec<Pattern> = candidates
            .into_iter()
            .map(|items| Pattern {
                support: support(db, &items, mode),
                items,
            })
            .filter(|p| p.support >= min_support)
            .collect();
        out.append(&mut level);
        level = next;
    }
    out
}

/// Apriori check: every shorter sub-pattern of `c` of length `len - 1` that
/// `mode` implies must be frequent.
fn survives_prune(c: &[usize], frequent: &HashSet<&[usize]>, mode: Mode) -> bool {
    match mode {
        Mode::Gapped => (0..c.len()).all(|skip| {
            let sub: Vec<usize> = c
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            frequent.contains(sub.as_slice())
        }),
        Mode::Contiguous => {
            frequent.contains(&c[1..]) && frequent.contains(&c[..c.len() - 1])
        }
    }
}

/// Patterns not strictly contained (under `mode`) in any other pattern.
pub fn maximal_patterns(patterns: &[Pattern], mode: Mode) -> Vec<Pattern> {
    patterns
        .iter()
        .filter(|p| {
            !patterns
                .iter()
                .any(|q| q.items.len() > p.items.len() && contains(&q.items, &p.items, mode))
        })
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonaConfig {
    /// Fraction of db sequences a pattern must occur in.
    pub min_support: f64,
    pub top_k: usize,
    pub mode: Mode,
    /// Minimum sequence count for a reported branch.
    pub min_branch_freq: usize,
}

impl Default for PersonaConfig {
    fn default() -> Self {
        Self {
            min_support: 0.15,
            top_k: 4,
            mode: Mode::Gapped,
            min_branch_freq: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Archetype {
    /// Display slot, `A1`, `A2`, ... in rank order.
    pub name: String,
    pub pattern: Pattern,
}

/// Ranks maximal patterns by support, then length, then items, all
/// descending, and keeps the first `top_k`.
pub fn rank_archetypes(maximal: Vec<Pattern>, top_k: usize) -> Vec<Archetype> {
    let mut ranked = maximal;
    ranked.sort_by(|a, b| {
        b.support
            .cmp(&a.support)
            .then(b.items.len().cmp(&a.items.len()))
            .then(b.items.cmp(&a.items))
    });
    ranked
        .into_iter()
        .take(top_k)
        .enumerate()
        .map(|(i, pattern)| Archetype {
            name: format!("A{}", i + 1),
            pattern,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchTarget {
    pub cluster: usize,
    pub frequency: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchPoint {
    /// Index into the report's archetype list.
    pub archetype: usize,
    /// Position in the archetype's items after which the branch leaves.
    pub position: usize,
    /// Most frequent first; ties by cluster id.
    pub targets: Vec<BranchTarget>,
}

/// Counts, for each archetype position `p`, the sequences whose first
/// consecutive occurrence of `items[..=p]` is followed by something other
/// than `items[p + 1]` (any successor at the last position, i.e. an
/// extension).
pub fn branch_annotation(db: &SequenceDb, archetypes: &[Archetype], min_branch_freq: usize) -> Vec<BranchPoint> {
    let mut out = Vec::new();
    for (a, arch) in archetypes.iter().enumerate() {
        let items = &arch.pattern.items;
        for p in 0..items.len() {
            let prefix = &items[..=p];
            let expected = items.get(p + 1);
            let mut tally: BTreeMap<usize, usize> = BTreeMap::new();
            for seq in db.sequences() {
                let Some(start) = seq.windows(prefix.len()).position(|w| w == prefix) else {
                    continue;
                };
                if let Some(&next) = seq.get(start + prefix.len()) {
                    if Some(&next) != expected {
                        *tally.entry(next).or_default() += 1;
                    }
                }
            }
            let mut targets: Vec<BranchTarget> = tally
                .into_iter()
                .filter(|&(_, f)| f >= min_branch_freq.max(1))
                .map(|(cluster, frequency)| BranchTarget { cluster, frequency })
                .collect();
            targets.sort_by(|x, y| y.frequency.cmp(&x.frequency).then(x.cluster.cmp(&y.cluster)));
            if !targets.is_empty() {
                out.push(BranchPoint {
                    archetype: a,
                    position: p,
                    targets,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonaReport {
    pub config: PersonaConfig,
    pub n_sequences: usize,
    /// Absolute support threshold used for mining.
    pub min_support_count: usize,
    pub archetypes: Vec<Archetype>,
    pub branches: Vec<BranchPoint>,
    /// Set when fewer than `top_k` maximal patterns were found.
    pub insufficient_archetypes: bool,
    /// Every maximal frequent pattern, ranked, for inspection.
    pub maximal: Vec<Pattern>,
}

impl PersonaReport {
    pub fn build(db: &SequenceDb, config: &PersonaConfig) -> Result<Self, SeqMineError> {
        let min_support_count = absolute_support(config.min_support, db.len())?;
        let patterns = gsp_mine(db, min_support_count, config.mode);
        let maximal: Vec<Pattern> = rank_archetypes(maximal_patterns(&patterns, config.mode), usize::MAX)
            .into_iter()
            .map(|a| a.pattern)
            .collect();
        let archetypes = rank_archetypes(maximal.clone(), config.top_k);
        let branches = branch_annotation(db, &archetypes, config.min_branch_freq);
        Ok(Self {
            config: config.clone(),
            n_sequences: db.len(),
            min_support_count,
            insufficient_archetypes: archetypes.len() < config.top_k,
            archetypes,
            branches,
            maximal,
        })
    }

    pub fn render_text(&self) -> String {
        let fmt_path = |items: &[usize]| {
            items.iter().map(usize::to_string).collect::<Vec<_>>().join(" > ")
        };
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} sequences, {} mining, min support {} ({}), top {}",
            self.n_sequences, self.config.mode, self.min_support_count, self.config.min_support, self.config.top_k
        );
        if self.insufficient_archetypes {
            let _ = writeln!(s, "warning: only {} maximal patterns found", self.archetypes.len());
        }
        let _ = writeln!(s, "{:<4} | {:<7} | Path", "Name", "Support");
        let _ = writeln!(s, "-----+---------+-----");
        for a in &self.archetypes {
            let _ = writeln!(s, "{:<4} | {:<7} | {}", a.name, a.pattern.support, fmt_path(&a.pattern.items));
        }
        for b in &self.branches {
            let arch = &self.archetypes[b.archetype];
            let targets: Vec<String> = b.targets.iter().map(|t| format!("{} ({})", t.cluster, t.frequency)).collect();
            let _ = writeln!(
                s,
                "  {} after {}: {}",
                arch.name,
                fmt_path(&arch.pattern.items[..=b.position]),
                targets.join(", ")
            );
        }
        s
    }
}
