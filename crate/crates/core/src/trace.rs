//! Rooms, editing sessions and corpora, plus the JSON corpus format.
//!
//! A room is a fixed 13×7 grid of tiles stored row-major, rows top to bottom.
//! Sessions keep one full snapshot per edit.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const GRID_WIDTH: usize = 13;
pub const GRID_HEIGHT: usize = 7;
pub const GRID_CELLS: usize = GRID_WIDTH * GRID_HEIGHT;

/// Version written to and required from corpus files.
pub const CORPUS_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TileType {
    Floor,
    Wall,
    Enemy,
    Boss,
    Treasure,
    Door,
}

impl TileType {
    pub const ALL: [TileType; 6] = [
        TileType::Floor,
        TileType::Wall,
        TileType::Enemy,
        TileType::Boss,
        TileType::Treasure,
        TileType::Door,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn symbol(self) -> char {
        match self {
            TileType::Floor => 'F',
            TileType::Wall => 'W',
            TileType::Enemy => 'E',
            TileType::Boss => 'B',
            TileType::Treasure => 'T',
            TileType::Door => 'D',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.symbol() == c)
    }

    /// Everything except walls can be walked on.
    pub fn is_walkable(self) -> bool {
        self != TileType::Wall
    }

    pub fn is_hostile(self) -> bool {
        matches!(self, TileType::Enemy | TileType::Boss)
    }
}

/// A problem found while checking raw grid data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridViolation {
    Dimensions { width: usize, height: usize },
    CellCount { expected: usize, found: usize },
    TileCode { cell: usize, code: u8 },
    TileSymbol { cell: usize, symbol: char },
}

impl fmt::Display for GridViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridViolation::Dimensions { width, height } => write!(
                f,
                "grid is {width}x{height}, expected {GRID_WIDTH}x{GRID_HEIGHT}"
            ),
            GridViolation::CellCount { expected, found } => {
                write!(f, "grid has {found} cells, expected {expected}")
            }
            GridViolation::TileCode { cell, code } => {
                write!(f, "cell {cell} has invalid tile code {code}")
            }
            GridViolation::TileSymbol { cell, symbol } => {
                write!(f, "cell {cell} has invalid tile symbol {symbol:?}")
            }
        }
    }
}

/// Unchecked grid data as it arrives from outside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawGrid {
    pub width: usize,
    pub height: usize,
    pub codes: Vec<u8>,
}

/// Checks raw grid data against the room invariants. Never fails; an empty
/// list means the grid is valid.
pub fn validate_grid(raw: &RawGrid) -> Vec<GridViolation> {
    let mut violations = Vec::new();
    if raw.width != GRID_WIDTH || raw.height != GRID_HEIGHT {
        violations.push(GridViolation::Dimensions {
            width: raw.width,
            height: raw.height,
        });
    }
    if raw.codes.len() != GRID_CELLS {
        violations.push(GridViolation::CellCount {
            expected: GRID_CELLS,
            found: raw.codes.len(),
        });
    }
    for (cell, &code) in raw.codes.iter().enumerate() {
        if TileType::from_code(code).is_none() {
            violations.push(GridViolation::TileCode { cell, code });
        }
    }
    violations
}

/// A validated 13×7 room.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RoomGrid {
    cells: [TileType; GRID_CELLS],
}

impl RoomGrid {
    pub fn filled(tile: TileType) -> Self {
        Self {
            cells: [tile; GRID_CELLS],
        }
    }

    pub fn empty() -> Self {
        Self::filled(TileType::Floor)
    }

    pub fn from_tiles(tiles: &[TileType]) -> Result<Self, Vec<GridViolation>> {
        let cells: [TileType; GRID_CELLS] = tiles.try_into().map_err(|_| {
            vec![GridViolation::CellCount {
                expected: GRID_CELLS,
                found: tiles.len(),
            }]
        })?;
        Ok(Self { cells })
    }

    pub fn from_raw(raw: &RawGrid) -> Result<Self, Vec<GridViolation>> {
        let violations = validate_grid(raw);
        if !violations.is_empty() {
            return Err(violations);
        }
        let tiles: Vec<TileType> = raw
            .codes
            .iter()
            .map(|&c| TileType::from_code(c).expect("validated"))
            .collect();
        Self::from_tiles(&tiles)
    }

    /// Parses the 91-character wire form, one symbol per cell.
    pub fn parse(s: &str) -> Result<Self, Vec<GridViolation>> {
        let chars: Vec<char> = s.chars().collect();
        let mut violations = Vec::new();
        if chars.len() != GRID_CELLS {
            violations.push(GridViolation::CellCount {
                expected: GRID_CELLS,
                found: chars.len(),
            });
        }
        let mut tiles = Vec::with_capacity(chars.len());
        for (cell, &c) in chars.iter().enumerate() {
            match TileType::from_symbol(c) {
                Some(t) => tiles.push(t),
                None => violations.push(GridViolation::TileSymbol { cell, symbol: c }),
            }
        }
        if violations.is_empty() {
            Self::from_tiles(&tiles)
        } else {
            Err(violations)
        }
    }

    /// Parses a picture of the room: 7 lines of 13 symbols, whitespace trimmed.
    pub fn from_picture(picture: &str) -> Result<Self, Vec<GridViolation>> {
        let joined: String = picture
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        Self::parse(&joined)
    }

    pub fn to_code_string(&self) -> String {
        self.cells.iter().map(|t| t.symbol()).collect()
    }

    pub fn to_raw(&self) -> RawGrid {
        RawGrid {
            width: GRID_WIDTH,
            height: GRID_HEIGHT,
            codes: self.cells.iter().map(|t| t.code()).collect(),
        }
    }

    pub fn cells(&self) -> &[TileType] {
        &self.cells
    }

    pub fn get(&self, x: usize, y: usize) -> TileType {
        self.cells[y * GRID_WIDTH + x]
    }

    pub fn set(&mut self, x: usize, y: usize, tile: TileType) {
        self.cells[y * GRID_WIDTH + x] = tile;
    }

    pub fn set_cell(&mut self, index: usize, tile: TileType) {
        self.cells[index] = tile;
    }

    pub fn count(&self, tile: TileType) -> usize {
        self.cells.iter().filter(|&&t| t == tile).count()
    }
}

impl fmt::Debug for RoomGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RoomGrid[")?;
        for row in self.cells.chunks(GRID_WIDTH) {
            let line: String = row.iter().map(|t| t.symbol()).collect();
            writeln!(f, "  {line}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for RoomGrid {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_code_string())
    }
}

impl<'de> Deserialize<'de> for RoomGrid {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        RoomGrid::parse(&s).map_err(|v| {
            let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
            serde::de::Error::custom(msgs.join("; "))
        })
    }
}

/// One changed cell between two snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellChange {
    pub cell: usize,
    pub old: TileType,
    pub new: TileType,
}

/// Cell-wise difference from `a` to `b`, in cell order.
pub fn diff_steps(a: &RoomGrid, b: &RoomGrid) -> Vec<CellChange> {
    a.cells
        .iter()
        .zip(&b.cells)
        .enumerate()
        .filter(|(_, (x, y))| x != y)
        .map(|(cell, (&old, &new))| CellChange { cell, old, new })
        .collect()
}

pub fn apply_diff(grid: &RoomGrid, changes: &[CellChange]) -> RoomGrid {
    let mut out = grid.clone();
    for c in changes {
        out.cells[c.cell] = c.new;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditStep {
    pub index: usize,
    pub grid: RoomGrid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignSession {
    session_id: String,
    participant_tag: String,
    steps: Vec<EditStep>,
}

impl DesignSession {
    /// Builds a session from consecutive snapshots, numbering steps from 0.
    pub fn new(
        session_id: impl Into<String>,
        participant_tag: impl Into<String>,
        grids: Vec<RoomGrid>,
    ) -> Result<Self, TraceError> {
        let session_id = session_id.into();
        if grids.is_empty() {
            return Err(TraceError::EmptySession { session_id });
        }
        let steps = grids
            .into_iter()
            .enumerate()
            .map(|(index, grid)| EditStep { index, grid })
            .collect();
        Ok(Self {
            session_id,
            participant_tag: participant_tag.into(),
            steps,
        })
    }

    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn participant_tag(&self) -> &str {
        &self.participant_tag
    }

    pub fn steps(&self) -> &[EditStep] {
        &self.steps
    }

    pub fn grids(&self) -> impl Iterator<Item = &RoomGrid> + '_ {
        self.steps.iter().map(|s| &s.grid)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    sessions: Vec<DesignSession>,
}

impl Corpus {
    pub fn new(sessions: Vec<DesignSession>) -> Result<Self, TraceError> {
        let mut seen = HashSet::new();
        for s in &sessions {
            if !seen.insert(s.session_id.as_str()) {
                return Err(TraceError::DuplicateSession {
                    session_id: s.session_id.clone(),
                });
            }
        }
        Ok(Self { sessions })
    }

    pub fn sessions(&self) -> &[DesignSession] {
        &self.sessions
    }

    pub fn session(&self, id: &str) -> Option<&DesignSession> {
        self.sessions.iter().find(|s| s.session_id == id)
    }

    pub fn total_steps(&self) -> usize {
        self.sessions.iter().map(DesignSession::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("malformed corpus at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unsupported corpus format_version {found} (expected {CORPUS_FORMAT_VERSION})")]
    Version { found: u32 },
    #[error("session {session_id:?} step {step}: {}", join_violations(.violations))]
    InvalidGrid {
        session_id: String,
        step: usize,
        violations: Vec<GridViolation>,
    },
    #[error("session {session_id:?}: step indices must be contiguous from 0, found {found} at position {position}")]
    StepIndex {
        session_id: String,
        position: usize,
        found: usize,
    },
    #[error("session {session_id:?} has no steps")]
    EmptySession { session_id: String },
    #[error("duplicate session id {session_id:?}")]
    DuplicateSession { session_id: String },
}

fn join_violations(v: &[GridViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Serialize, Deserialize)]
struct CorpusFile {
    format_version: u32,
    sessions: Vec<SessionRecord>,
}

#[derive(Serialize, Deserialize)]
struct SessionRecord {
    session_id: String,
    participant_tag: String,
    steps: Vec<StepRecord>,
}

#[derive(Serialize, Deserialize)]
struct StepRecord {
    index: usize,
    grid: String,
}

fn byte_offset(input: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (i, l) in input.split(|&b| b == b'\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(input.len());
        }
        offset += l.len() + 1;
    }
    input.len()
}

/// Parses and validates a corpus file.
pub fn parse_corpus(bytes: &[u8]) -> Result<Corpus, TraceError> {
    let file: CorpusFile = serde_json::from_slice(bytes).map_err(|e| TraceError::Syntax {
        offset: byte_offset(bytes, e.line(), e.column()),
        message: e.to_string(),
    })?;
    if file.format_version != CORPUS_FORMAT_VERSION {
        return Err(TraceError::Version {
            found: file.format_version,
        });
    }
    let mut sessions = Vec::with_capacity(file.sessions.len());
    for record in file.sessions {
        let mut grids = Vec::with_capacity(record.steps.len());
        for (position, step) in record.steps.iter().enumerate() {
            if step.index != position {
                return Err(TraceError::StepIndex {
                    session_id: record.session_id,
                    position,
                    found: step.index,
                });
            }
            let grid = RoomGrid::parse(&step.grid).map_err(|violations| {
                TraceError::InvalidGrid {
                    session_id: record.session_id.clone(),
                    step: step.index,
                    violations,
                }
            })?;
            grids.push(grid);
        }
        sessions.push(DesignSession::new(
            record.session_id,
            record.participant_tag,
            grids,
        )?);
    }
    Corpus::new(sessions)
}

pub fn serialize_corpus(corpus: &Corpus) -> Vec<u8> {
    let file = CorpusFile {
        format_version: CORPUS_FORMAT_VERSION,
        sessions: corpus
            .sessions
            .iter()
            .map(|s| SessionRecord {
                session_id: s.session_id.clone(),
                participant_tag: s.participant_tag.clone(),
                steps: s
                    .steps
                    .iter()
                    .map(|st| StepRecord {
                        index: st.index,
                        grid: st.grid.to_code_string(),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_vec(&file).expect("corpus serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn corpus_json(grid: &str) -> String {
        format!(
            r#"{{"format_version":1,"sessions":[{{"session_id":"s1","participant_tag":"p","steps":[{{"index":0,"grid":"{grid}"}}]}}]}}"#
        )
    }

    #[test]
    fn tile_codes_are_stable() {
        let symbols: String = TileType::ALL.iter().map(|t| t.symbol()).collect();
        assert_eq!(symbols, "FWEBTD");
        for (i, t) in TileType::ALL.iter().enumerate() {
            assert_eq!(t.code() as usize, i);
            assert_eq!(TileType::from_code(i as u8), Some(*t));
            assert_eq!(TileType::from_symbol(t.symbol()), Some(*t));
        }
        assert_eq!(TileType::from_code(6), None);
    }

    #[test]
    fn minimal_corpus_parses() {
        let json = corpus_json(&"F".repeat(91));
        let corpus = parse_corpus(json.as_bytes()).unwrap();
        assert_eq!(corpus.sessions().len(), 1);
        assert_eq!(corpus.sessions()[0].len(), 1);
        assert_eq!(corpus.sessions()[0].steps()[0].grid, RoomGrid::empty());
    }

    #[test]
    fn short_grid_names_session_and_expected_size() {
        let json = corpus_json(&"F".repeat(90));
        let err = parse_corpus(json.as_bytes()).unwrap_err();
        match &err {
            TraceError::InvalidGrid {
                session_id,
                step,
                violations,
            } => {
                assert_eq!(session_id, "s1");
                assert_eq!(*step, 0);
                assert_eq!(
                    violations[0],
                    GridViolation::CellCount {
                        expected: 91,
                        found: 90
                    }
                );
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("expected 91"));
    }

    #[test]
    fn bad_symbol_is_a_validation_error() {
        let mut g = "F".repeat(91);
        g.replace_range(5..6, "X");
        let err = parse_corpus(corpus_json(&g).as_bytes()).unwrap_err();
        assert!(matches!(err, TraceError::InvalidGrid { .. }));
    }

    #[test]
    fn syntax_error_reports_byte_offset() {
        let input = b"{\"format_version\": 1,\n \"sessions\": [ oops ] }";
        match parse_corpus(input).unwrap_err() {
            TraceError::Syntax { offset, .. } => assert_eq!(input[offset], b'o'),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_contiguous_indices_rejected() {
        let g = "F".repeat(91);
        let json = format!(
            r#"{{"format_version":1,"sessions":[{{"session_id":"s","participant_tag":"","steps":[{{"index":0,"grid":"{g}"}},{{"index":2,"grid":"{g}"}}]}}]}}"#
        );
        assert!(matches!(
            parse_corpus(json.as_bytes()),
            Err(TraceError::StepIndex { found: 2, .. })
        ));
    }

    #[test]
    fn duplicate_session_ids_rejected() {
        let a = DesignSession::new("a", "", vec![RoomGrid::empty()]).unwrap();
        assert!(Corpus::new(vec![a.clone(), a]).is_err());
    }

    #[test]
    fn wrong_version_rejected() {
        let json = r#"{"format_version":2,"sessions":[]}"#;
        assert!(matches!(
            parse_corpus(json.as_bytes()),
            Err(TraceError::Version { found: 2 })
        ));
    }

    #[test]
    fn validate_grid_cases() {
        let ok = RoomGrid::empty().to_raw();
        assert!(validate_grid(&ok).is_empty());

        let transposed = RawGrid {
            width: 7,
            height: 13,
            codes: vec![0; 91],
        };
        assert_eq!(
            validate_grid(&transposed),
            vec![GridViolation::Dimensions {
                width: 7,
                height: 13
            }]
        );

        let mut bad = ok.clone();
        bad.codes[40] = 9;
        assert_eq!(
            validate_grid(&bad),
            vec![GridViolation::TileCode { cell: 40, code: 9 }]
        );
    }

    #[test]
    fn validate_accepts_iff_invariants_hold() {
        // every single-cell perturbation of a valid grid over all byte codes
        let base = RoomGrid::empty().to_raw();
        for cell in [0usize, 45, 90] {
            for code in 0..=255u8 {
                let mut raw = base.clone();
                raw.codes[cell] = code;
                let ok = validate_grid(&raw).is_empty();
                assert_eq!(ok, code < 6, "cell {cell} code {code}");
                assert_eq!(ok, RoomGrid::from_raw(&raw).is_ok());
            }
        }
        for len in [0usize, 90, 92] {
            let raw = RawGrid {
                width: 13,
                height: 7,
                codes: vec![0; len],
            };
            assert!(!validate_grid(&raw).is_empty());
        }
    }

    #[test]
    fn diff_identity_and_single_change() {
        let g = RoomGrid::empty();
        assert!(diff_steps(&g, &g).is_empty());
        let mut h = g.clone();
        h.set_cell(0, TileType::Wall);
        assert_eq!(
            diff_steps(&g, &h),
            vec![CellChange {
                cell: 0,
                old: TileType::Floor,
                new: TileType::Wall
            }]
        );
    }

    pub(crate) fn arb_grid() -> impl Strategy<Value = RoomGrid> {
        proptest::collection::vec(0u8..6, GRID_CELLS).prop_map(|codes| {
            RoomGrid::from_raw(&RawGrid {
                width: GRID_WIDTH,
                height: GRID_HEIGHT,
                codes,
            })
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn applying_diff_reproduces_target(a in arb_grid(), b in arb_grid()) {
            let d = diff_steps(&a, &b);
            prop_assert_eq!(apply_diff(&a, &d), b.clone());
            prop_assert_eq!(d.is_empty(), a == b);
        }

        #[test]
        fn corpus_round_trips(grids in proptest::collection::vec(arb_grid(), 1..5), n in 1usize..4) {
            let sessions = (0..n)
                .map(|i| DesignSession::new(format!("s{i}"), "tag", grids.clone()).unwrap())
                .collect();
            let corpus = Corpus::new(sessions).unwrap();
            let back = parse_corpus(&serialize_corpus(&corpus)).unwrap();
            prop_assert_eq!(back, corpus);
        }
    }
}
