//! Synthetic design sessions with planted styles and persona paths.
//!
//! A persona walks its path of style ids. Each new phase morphs the current
//! room into the phase's template in a few batched steps, then dwells there:
//! every dwell step is a single-cell edit that is either noise (a random
//! cell set to a random tile), a repair of one cell that differs from the
//! template, or one of the template's own mutation ops. A phase may detour
//! briefly through a branch style before finishing.

mod align;
mod recovery;
mod templates;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trace::{Corpus, DesignSession, RoomGrid, TileType, TraceError, GRID_CELLS, GRID_HEIGHT, GRID_WIDTH};

pub use align::{align_labels, min_cost_assignment};
pub use recovery::{score_recovery, Recovery};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("unknown style id {0}")]
    UnknownStyle(usize),
    #[error("no personas configured")]
    NoPersonas,
    #[error("persona {0:?} has an empty path")]
    EmptyPath(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    AddWall,
    RemoveWall,
    AddEnemy,
    RemoveEnemy,
    AddTreasure,
    RemoveTreasure,
    AddBoss,
    RemoveBoss,
}

impl EditKind {
    fn tile(self) -> TileType {
        match self {
            EditKind::AddWall | EditKind::RemoveWall => TileType::Wall,
            EditKind::AddEnemy | EditKind::RemoveEnemy => TileType::Enemy,
            EditKind::AddTreasure | EditKind::RemoveTreasure => TileType::Treasure,
            EditKind::AddBoss | EditKind::RemoveBoss => TileType::Boss,
        }
    }

    fn adds(self) -> bool {
        matches!(self, EditKind::AddWall | EditKind::AddEnemy | EditKind::AddTreasure | EditKind::AddBoss)
    }
}

/// Inclusive cell rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Region {
    pub const ROOM: Region = Region { x0: 0, y0: 0, x1: GRID_WIDTH - 1, y1: GRID_HEIGHT - 1 };
    pub const INTERIOR: Region = Region { x0: 1, y0: 1, x1: GRID_WIDTH - 2, y1: GRID_HEIGHT - 2 };

    fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        (self.y0..=self.y1).flat_map(move |y| (self.x0..=self.x1).map(move |x| y * GRID_WIDTH + x))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationOp {
    pub kind: EditKind,
    pub weight: f64,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyleTemplate {
    pub style_id: usize,
    pub name: String,
    pub base: RoomGrid,
    pub mutations: Vec<MutationOp>,
}

fn op(kind: EditKind, weight: f64, region: Region) -> MutationOp {
    MutationOp { kind, weight, region }
}

/// The twelve shipped templates, style id = position.
pub fn default_templates() -> Vec<StyleTemplate> {
    templates::TEMPLATES
        .iter()
        .enumerate()
        .map(|(style_id, (name, picture))| {
            let base = RoomGrid::from_picture(picture).expect("shipped template is valid");
            let walls = base.count(TileType::Wall);
            let content = base.count(TileType::Enemy) + base.count(TileType::Treasure);
            // structural styles tinker with walls, populated ones with content
            let mutations = if content > 0 {
                vec![
                    op(EditKind::AddEnemy, 2.0, Region::INTERIOR),
                    op(EditKind::RemoveEnemy, 2.0, Region::INTERIOR),
                    op(EditKind::AddTreasure, 2.0, Region::INTERIOR),
                    op(EditKind::RemoveTreasure, 2.0, Region::INTERIOR),
                    op(EditKind::AddBoss, 1.0, Region::INTERIOR),
                ]
            } else if walls > 0 {
                vec![
                    op(EditKind::AddWall, 3.0, Region::ROOM),
                    op(EditKind::RemoveWall, 3.0, Region::ROOM),
                    op(EditKind::AddEnemy, 1.0, Region::INTERIOR),
                ]
            } else {
                vec![op(EditKind::AddWall, 1.0, Region::ROOM)]
            };
            StyleTemplate {
                style_id,
                name: name.to_string(),
                base,
                mutations,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonaSpec {
    pub name: String,
    pub path: Vec<usize>,
    /// Inclusive range of steps spent per phase, morph steps included.
    pub steps_per_phase: (usize, usize),
    /// Chance that a phase detours through a branch style.
    pub branch_probability: f64,
    pub branch_targets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPersona {
    pub persona: PersonaSpec,
    pub weight: f64,
}

/// Style ids used only as branch detours by the default personas.
pub const DEFAULT_BRANCH_TARGETS: [usize; 6] = [1, 2, 4, 9, 10, 11];

/// The four archetypal paths, equally weighted.
pub fn default_personas() -> Vec<WeightedPersona> {
    [
        ("Structural-focus", vec![0, 8, 3, 7]),
        ("Goal-oriented", vec![0, 8, 6]),
        ("Split central-focus", vec![0, 5, 6]),
        ("Complex-balance", vec![8, 3, 6]),
    ]
    .into_iter()
    .map(|(name, path)| WeightedPersona {
        persona: PersonaSpec {
            name: name.to_string(),
            path,
            steps_per_phase: (11, 16),
            branch_probability: 0.1,
            branch_targets: DEFAULT_BRANCH_TARGETS.to_vec(),
        },
        weight: 1.0,
    })
    .collect()
}

/// Full generator configuration; this is the JSON spec file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub templates: Vec<StyleTemplate>,
    pub personas: Vec<WeightedPersona>,
    /// Probability that a dwell step is a random-cell noise edit.
    pub noise_rate: f64,
    /// Steps used to morph into a new phase's template.
    pub morph_steps: usize,
    /// Inclusive range of dwell steps inside a branch style.
    pub detour_steps: (usize, usize),
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            templates: default_templates(),
            personas: default_personas(),
            noise_rate: 0.1,
            morph_steps: 3,
            detour_steps: (3, 5),
        }
    }
}

impl SynthSpec {
    pub fn template(&self, style: usize) -> Result<&StyleTemplate, SynthError> {
        self.templates
            .iter()
            .find(|t| t.style_id == style)
            .ok_or(SynthError::UnknownStyle(style))
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.personas.is_empty() {
            return Err(SynthError::NoPersonas);
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(SynthError::Config(format!("noise_rate {} outside [0, 1]", self.noise_rate)));
        }
        if self.morph_steps == 0 {
            return Err(SynthError::Config("morph_steps must be >= 1".into()));
        }
        if self.detour_steps.0 > self.detour_steps.1 {
            return Err(SynthError::Config("detour_steps range is empty".into()));
        }
        for t in &self.templates {
            if t.mutations.iter().any(|m| !(m.weight > 0.0)) {
                return Err(SynthError::Config(format!("template {} has a non-positive mutation weight", t.style_id)));
            }
            let r = t.mutations.iter().map(|m| m.region);
            if r.clone().any(|r| r.x0 > r.x1 || r.y0 > r.y1 || r.x1 >= GRID_WIDTH || r.y1 >= GRID_HEIGHT) {
                return Err(SynthError::Config(format!("template {} has a region outside the room", t.style_id)));
            }
        }
        let total: f64 = self.personas.iter().map(|p| p.weight).sum();
        if self.personas.iter().any(|p| !(p.weight >= 0.0)) || !(total > 0.0) {
            return Err(SynthError::Config("persona weights must be non-negative with a positive sum".into()));
        }
        for WeightedPersona { persona, .. } in &self.personas {
            self.check_persona(persona)?;
        }
        Ok(())
    }

    fn check_persona(&self, p: &PersonaSpec) -> Result<(), SynthError> {
        if p.path.is_empty() {
            return Err(SynthError::EmptyPath(p.name.clone()));
        }
        for &s in p.path.iter().chain(&p.branch_targets) {
            self.template(s)?;
        }
        let (lo, hi) = p.steps_per_phase;
        if lo == 0 || lo > hi {
            return Err(SynthError::Config(format!("persona {:?}: bad steps_per_phase", p.name)));
        }
        if p.path.len() > 1 && lo <= self.morph_steps {
            return Err(SynthError::Config(format!(
                "persona {:?}: steps_per_phase must exceed morph_steps",
                p.name
            )));
        }
        if !(0.0..=1.0).contains(&p.branch_probability) {
            return Err(SynthError::Config(format!("persona {:?}: branch_probability outside [0, 1]", p.name)));
        }
        Ok(())
    }
}

/// A session plus the style each step was generated for.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSession {
    pub session: DesignSession,
    pub styles: Vec<usize>,
}

struct Walker<'a> {
    spec: &'a SynthSpec,
    rng: ChaCha8Rng,
    grid: RoomGrid,
    grids: Vec<RoomGrid>,
    styles: Vec<usize>,
}

impl Walker<'_> {
    fn emit(&mut self, style: usize) {
        self.grids.push(self.grid.clone());
        self.styles.push(style);
    }

    fn diffs(&self, target: &RoomGrid) -> Vec<usize> {
        (0..GRID_CELLS).filter(|&i| self.grid.cells()[i] != target.cells()[i]).collect()
    }

    /// `morph_steps` snapshots, each applying an equal share of the changes.
    fn morph(&mut self, style: usize) -> Result<(), SynthError> {
        let target = self.spec.template(style)?.base.clone();
        let mut diffs = self.diffs(&target);
        diffs.shuffle(&mut self.rng);
        let steps = self.spec.morph_steps;
        let (base, extra) = (diffs.len() / steps, diffs.len() % steps);
        let mut cursor = 0;
        for s in 0..steps {
            let take = base + usize::from(s < extra);
            for &i in &diffs[cursor..cursor + take] {
                self.grid.set_cell(i, target.cells()[i]);
            }
            cursor += take;
            self.emit(style);
        }
        Ok(())
    }

    fn dwell(&mut self, style: usize, steps: usize) -> Result<(), SynthError> {
        let template = self.spec.template(style)?;
        for _ in 0..steps {
            let diffs = self.diffs(&template.base);
            if self.rng.gen::<f64>() < self.spec.noise_rate {
                let cell = self.rng.gen_range(0..GRID_CELLS);
                let tile = TileType::ALL[self.rng.gen_range(0..TileType::ALL.len())];
                self.grid.set_cell(cell, tile);
            } else if let Some(&cell) = diffs.choose(&mut self.rng) {
                self.grid.set_cell(cell, template.base.cells()[cell]);
            } else {
                self.mutate(template);
            }
            self.emit(style);
        }
        Ok(())
    }

    fn mutate(&mut self, template: &StyleTemplate) {
        let Ok(m) = template.mutations.choose_weighted(&mut self.rng, |m| m.weight) else {
            return;
        };
        let tile = m.kind.tile();
        let candidates: Vec<usize> = m
            .region
            .cells()
            .filter(|&i| {
                let here = self.grid.cells()[i];
                if m.kind.adds() {
                    here == TileType::Floor
                } else {
                    here == tile
                }
            })
            .collect();
        if let Some(&cell) = candidates.choose(&mut self.rng) {
            self.grid
                .set_cell(cell, if m.kind.adds() { tile } else { TileType::Floor });
        }
    }
}

/// One session for `persona`, deterministic in `seed`.
pub fn generate_session(
    spec: &SynthSpec,
    persona: &PersonaSpec,
    session_id: &str,
    seed: u64,
) -> Result<GeneratedSession, SynthError> {
    spec.check_persona(persona)?;
    let mut w = Walker {
        spec,
        rng: ChaCha8Rng::seed_from_u64(seed),
        grid: spec.template(persona.path[0])?.base.clone(),
        grids: Vec::new(),
        styles: Vec::new(),
    };
    let (lo, hi) = persona.steps_per_phase;
    for (phase, &style) in persona.path.iter().enumerate() {
        let mut n = w.rng.gen_range(lo..=hi);
        if phase > 0 {
            w.morph(style)?;
            n -= spec.morph_steps;
        }
        let detour = !persona.branch_targets.is_empty() && w.rng.gen::<f64>() < persona.branch_probability;
        if detour {
            let before = n / 2;
            w.dwell(style, before)?;
            let target = *persona.branch_targets.choose(&mut w.rng).expect("non-empty");
            let stay = w.rng.gen_range(spec.detour_steps.0..=spec.detour_steps.1);
            w.morph(target)?;
            w.dwell(target, stay)?;
            w.morph(style)?;
            w.dwell(style, (n - before).saturating_sub(spec.morph_steps).max(1))?;
        } else {
            w.dwell(style, n)?;
        }
    }
    let session = DesignSession::new(session_id, persona.name.clone(), w.grids)?;
    Ok(GeneratedSession {
        session,
        styles: w.styles,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedCorpus {
    pub corpus: Corpus,
    /// Planted style per step, per session.
    pub styles: Vec<Vec<usize>>,
    /// Index into `spec.personas` per session.
    pub personas: Vec<usize>,
}

impl GeneratedCorpus {
    pub fn planted_styles_flat(&self) -> Vec<usize> {
        self.styles.iter().flatten().copied().collect()
    }
}

/// Samples `n_sessions` personas by weight and generates one session each.
///
/// The sampler draws, per session, one `f64` to pick the persona and then
/// one `u64` seeding that session, both from a ChaCha8 stream seeded with
/// `seed`.
pub fn generate_corpus(spec: &SynthSpec, n_sessions: usize, seed: u64) -> Result<GeneratedCorpus, SynthError> {
    spec.validate()?;
    let total: f64 = spec.personas.iter().map(|p| p.weight).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sessions = Vec::with_capacity(n_sessions);
    let mut styles = Vec::with_capacity(n_sessions);
    let mut personas = Vec::with_capacity(n_sessions);
    for i in 0..n_sessions {
        let pick = pick_persona(spec, rng.gen::<f64>() * total);
        let session_seed = rng.gen::<u64>();
        let g = generate_session(spec, &spec.personas[pick].persona, &format!("synth-{i:04}"), session_seed)?;
        sessions.push(g.session);
        styles.push(g.styles);
        personas.push(pick);
    }
    Ok(GeneratedCorpus {
        corpus: Corpus::new(sessions)?,
        styles,
        personas,
    })
}

/// First persona whose cumulative weight exceeds `target`.
fn pick_persona(spec: &SynthSpec, target: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in spec.personas.iter().enumerate() {
        acc += p.weight;
        if target < acc {
            return i;
        }
    }
    // rounding at the top end: last persona with positive weight
    spec.personas.iter().rposition(|p| p.weight > 0.0).expect("positive total")
}
