//! Five per-room design metrics: linearity, leniency, meso patterns,
//! spatial patterns and symmetry.
//!
//! Coordinates are `(x, y)` with `x` the column (0..13) and `y` the row (0..7).

use serde::{Deserialize, Serialize};

use crate::trace::{RoomGrid, TileType, GRID_CELLS, GRID_HEIGHT, GRID_WIDTH};

/// Enemy count at which leniency saturates to zero.
pub const ENEMY_SATURATION: f64 = 10.0;
/// Treasure count at which the treasure bonus reaches one half.
pub const TREASURE_SATURATION: f64 = 10.0;

/// Side of the central square on which diagonal reflections are defined.
const CENTRAL_SIDE: usize = GRID_HEIGHT;
const CENTRAL_X0: usize = (GRID_WIDTH - CENTRAL_SIDE) / 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionValues {
    pub linearity: f64,
    pub leniency: f64,
    pub meso_patterns: usize,
    pub spatial_patterns: usize,
    pub symmetry: f64,
}

impl DimensionValues {
    pub const NAMES: [&'static str; 5] = [
        "linearity",
        "leniency",
        "meso_patterns",
        "spatial_patterns",
        "symmetry",
    ];

    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.linearity,
            self.leniency,
            self.meso_patterns as f64,
            self.spatial_patterns as f64,
            self.symmetry,
        ]
    }
}

pub fn encode_dimensions(grid: &RoomGrid) -> DimensionValues {
    let layout = SpatialLayout::detect(grid);
    DimensionValues {
        linearity: linearity(grid),
        leniency: leniency(grid),
        meso_patterns: layout.meso_patterns(grid),
        spatial_patterns: layout.pattern_count(),
        symmetry: symmetry(grid),
    }
}

/// Reflection axes used by [`symmetry`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Mirror across the horizontal midline: `(x, y) -> (x, 6 - y)`.
    Horizontal,
    /// Mirror across the vertical midline: `(x, y) -> (12 - x, y)`.
    Vertical,
    /// Main diagonal of the central 7×7 square.
    Diagonal,
    /// Anti-diagonal of the central 7×7 square.
    AntiDiagonal,
}

impl Axis {
    pub const ALL: [Axis; 4] = [
        Axis::Horizontal,
        Axis::Vertical,
        Axis::Diagonal,
        Axis::AntiDiagonal,
    ];

    /// Mirror image of a cell, or `None` when the reflection leaves the grid.
    pub fn mirror(self, x: usize, y: usize) -> Option<(usize, usize)> {
        match self {
            Axis::Horizontal => Some((x, GRID_HEIGHT - 1 - y)),
            Axis::Vertical => Some((GRID_WIDTH - 1 - x, y)),
            Axis::Diagonal | Axis::AntiDiagonal => {
                let u = x.checked_sub(CENTRAL_X0).filter(|&u| u < CENTRAL_SIDE)?;
                let (nu, ny) = if self == Axis::Diagonal {
                    (y, u)
                } else {
                    (CENTRAL_SIDE - 1 - y, CENTRAL_SIDE - 1 - u)
                };
                Some((nu + CENTRAL_X0, ny))
            }
        }
    }
}

/// Best fraction of non-floor cells mirrored onto an identical tile, over all
/// axes. Rooms with no non-floor cells are fully symmetric.
pub fn symmetry(grid: &RoomGrid) -> f64 {
    let occupied: Vec<(usize, usize, TileType)> = cells(grid)
        .filter(|&(_, _, t)| t != TileType::Floor)
        .collect();
    if occupied.is_empty() {
        return 1.0;
    }
    let best = Axis::ALL
        .iter()
        .map(|axis| {
            occupied
                .iter()
                .filter(|&&(x, y, t)| {
                    axis.mirror(x, y)
                        .is_some_and(|(mx, my)| grid.get(mx, my) == t)
                })
                .count()
        })
        .max()
        .unwrap_or(0);
    best as f64 / occupied.len() as f64
}

/// `1 - junctions / walkable`, where a junction is a walkable cell with at
/// least three walkable 4-neighbours.
pub fn linearity(grid: &RoomGrid) -> f64 {
    let walkable = grid.cells().iter().filter(|t| t.is_walkable()).count();
    if walkable == 0 {
        return 0.0;
    }
    let junctions = cells(grid)
        .filter(|&(x, y, t)| t.is_walkable() && walkable_neighbours(grid, x, y) >= 3)
        .count();
    1.0 - junctions as f64 / walkable as f64
}

pub fn leniency(grid: &RoomGrid) -> f64 {
    let enemies = grid.count(TileType::Enemy) as f64;
    let bosses = grid.count(TileType::Boss) as f64;
    let treasures = grid.count(TileType::Treasure) as f64;
    let raw = 1.0 - (enemies + 2.0 * bosses) / ENEMY_SATURATION
        + treasures / (2.0 * TREASURE_SATURATION);
    raw.clamp(0.0, 1.0)
}

pub fn count_spatial_patterns(grid: &RoomGrid) -> usize {
    SpatialLayout::detect(grid).pattern_count()
}

pub fn count_meso_patterns(grid: &RoomGrid) -> usize {
    SpatialLayout::detect(grid).meso_patterns(grid)
}

fn cells(grid: &RoomGrid) -> impl Iterator<Item = (usize, usize, TileType)> + '_ {
    (0..GRID_CELLS).map(move |i| (i % GRID_WIDTH, i / GRID_WIDTH, grid.cells()[i]))
}

fn neighbours(x: usize, y: usize) -> impl Iterator<Item = (usize, usize)> {
    let (x, y) = (x as isize, y as isize);
    [(x, y - 1), (x - 1, y), (x + 1, y), (x, y + 1)]
        .into_iter()
        .filter(|&(nx, ny)| {
            nx >= 0 && ny >= 0 && (nx as usize) < GRID_WIDTH && (ny as usize) < GRID_HEIGHT
        })
        .map(|(nx, ny)| (nx as usize, ny as usize))
}

fn walkable_neighbours(grid: &RoomGrid, x: usize, y: usize) -> usize {
    neighbours(x, y)
        .filter(|&(nx, ny)| grid.get(nx, ny).is_walkable())
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.y..self.y + self.height)
            .flat_map(move |y| (self.x..self.x + self.width).map(move |x| (x, y)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Owner {
    Free,
    Chamber(usize),
    Corridor(usize),
}

/// Chambers, corridors and connectors detected in one room.
#[derive(Debug, Clone)]
pub struct SpatialLayout {
    pub chambers: Vec<Rect>,
    /// Cells of each corridor, in run order.
    pub corridors: Vec<Vec<(usize, usize)>>,
    pub connectors: Vec<(usize, usize)>,
    owner: Vec<Owner>,
}

const MIN_CHAMBER_SIDE: usize = 3;
const MIN_CORRIDOR_LEN: usize = 3;

impl SpatialLayout {
    pub fn detect(grid: &RoomGrid) -> Self {
        let mut owner = vec![Owner::Free; GRID_CELLS];
        let idx = |x: usize, y: usize| y * GRID_WIDTH + x;

        // Chambers: greedy row-major, largest rectangle anchored at the scan cell.
        let mut chambers = Vec::new();
        for y in 0..GRID_HEIGHT {
            for x in 0..GRID_WIDTH {
                let free = |cx: usize, cy: usize| {
                    grid.get(cx, cy).is_walkable() && owner[idx(cx, cy)] == Owner::Free
                };
                if !free(x, y) {
                    continue;
                }
                if let Some(rect) = largest_rect_at(x, y, &free) {
                    let id = chambers.len();
                    for (cx, cy) in rect.cells() {
                        owner[idx(cx, cy)] = Owner::Chamber(id);
                    }
                    chambers.push(rect);
                }
            }
        }

        // Corridors: horizontal runs first, then vertical runs over what is left.
        let mut corridors: Vec<Vec<(usize, usize)>> = Vec::new();
        for horizontal in [true, false] {
            let (outer, inner) = if horizontal {
                (GRID_HEIGHT, GRID_WIDTH)
            } else {
                (GRID_WIDTH, GRID_HEIGHT)
            };
            let at = |o: usize, i: usize| if horizontal { (i, o) } else { (o, i) };
            for o in 0..outer {
                let mut i = 0;
                while i < inner {
                    let is_free = |i: usize| {
                        let (x, y) = at(o, i);
                        grid.get(x, y).is_walkable() && owner[idx(x, y)] == Owner::Free
                    };
                    if !is_free(i) {
                        i += 1;
                        continue;
                    }
                    let start = i;
                    while i < inner && is_free(i) {
                        i += 1;
                    }
                    let run: Vec<(usize, usize)> = (start..i).map(|k| at(o, k)).collect();
                    if run.len() >= MIN_CORRIDOR_LEN
                        && is_single_width(&run, horizontal, |x, y| {
                            grid.get(x, y).is_walkable() && owner[idx(x, y)] == Owner::Free
                        })
                    {
                        let id = corridors.len();
                        for &(x, y) in &run {
                            owner[idx(x, y)] = Owner::Corridor(id);
                        }
                        corridors.push(run);
                    }
                }
            }
        }

        let mut connectors = Vec::new();
        for (x, y, t) in cells(grid) {
            if !t.is_walkable() || owner[idx(x, y)] != Owner::Free {
                continue;
            }
            let mut touching: Vec<Owner> = neighbours(x, y)
                .map(|(nx, ny)| owner[idx(nx, ny)])
                .filter(|o| *o != Owner::Free)
                .collect();
            touching.sort_by_key(|o| match o {
                Owner::Chamber(i) => (0, *i),
                Owner::Corridor(i) => (1, *i),
                Owner::Free => (2, 0),
            });
            touching.dedup();
            if touching.len() >= 2 {
                connectors.push((x, y));
            }
        }

        Self {
            chambers,
            corridors,
            connectors,
            owner,
        }
    }

    pub fn pattern_count(&self) -> usize {
        self.chambers.len() + self.corridors.len() + self.connectors.len()
    }

    fn is_corridor(&self, x: usize, y: usize) -> bool {
        matches!(self.owner[y * GRID_WIDTH + x], Owner::Corridor(_))
    }

    /// Treasure rooms, guard rooms, ambush cells and dead ends.
    pub fn meso_patterns(&self, grid: &RoomGrid) -> usize {
        let mut count = 0;
        for rect in &self.chambers {
            let has_treasure = rect
                .cells()
                .any(|(x, y)| grid.get(x, y) == TileType::Treasure);
            if has_treasure {
                // guard room when hostile, treasure room otherwise; one each
                count += 1;
            }
        }
        for (x, y, t) in cells(grid) {
            if !t.is_walkable() {
                continue;
            }
            if self.is_corridor(x, y)
                && neighbours(x, y).any(|(nx, ny)| grid.get(nx, ny).is_hostile())
            {
                count += 1;
            }
            if walkable_neighbours(grid, x, y) == 1 {
                count += 1;
            }
        }
        count
    }

    /// Splits the chamber meso patterns into (treasure rooms, guard rooms).
    pub fn chamber_rooms(&self, grid: &RoomGrid) -> (usize, usize) {
        let mut treasure_rooms = 0;
        let mut guard_rooms = 0;
        for rect in &self.chambers {
            let tiles: Vec<TileType> = rect.cells().map(|(x, y)| grid.get(x, y)).collect();
            if tiles.contains(&TileType::Treasure) {
                if tiles.iter().any(|t| t.is_hostile()) {
                    guard_rooms += 1;
                } else {
                    treasure_rooms += 1;
                }
            }
        }
        (treasure_rooms, guard_rooms)
    }
}

/// Largest all-free rectangle with top-left corner `(x, y)` and both sides at
/// least three. Ties prefer the wider rectangle.
fn largest_rect_at(x: usize, y: usize, free: &impl Fn(usize, usize) -> bool) -> Option<Rect> {
    let mut best: Option<Rect> = None;
    let mut max_width = GRID_WIDTH - x;
    for height in 1..=GRID_HEIGHT - y {
        let row = y + height - 1;
        let run = (x..x + max_width).take_while(|&cx| free(cx, row)).count();
        max_width = max_width.min(run);
        if max_width < MIN_CHAMBER_SIDE {
            break;
        }
        if height >= MIN_CHAMBER_SIDE {
            let candidate = Rect {
                x,
                y,
                width: max_width,
                height,
            };
            let better = best.is_none_or(|b| {
                let (ca, ba) = (candidate.width * height, b.width * b.height);
                ca > ba || (ca == ba && candidate.width > b.width)
            });
            if better {
                best = Some(candidate);
            }
        }
    }
    best
}

/// A run is single width unless two consecutive cells both have a free
/// neighbour on the same side across the run direction.
fn is_single_width(
    run: &[(usize, usize)],
    horizontal: bool,
    free: impl Fn(usize, usize) -> bool,
) -> bool {
    let side = |(x, y): (usize, usize), before: bool| -> bool {
        let (x, y) = (x as isize, y as isize);
        let (nx, ny) = match (horizontal, before) {
            (true, true) => (x, y - 1),
            (true, false) => (x, y + 1),
            (false, true) => (x - 1, y),
            (false, false) => (x + 1, y),
        };
        nx >= 0
            && ny >= 0
            && (nx as usize) < GRID_WIDTH
            && (ny as usize) < GRID_HEIGHT
            && free(nx as usize, ny as usize)
    };
    run.windows(2)
        .all(|w| !(side(w[0], true) && side(w[1], true)) && !(side(w[0], false) && side(w[1], false)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(picture: &str) -> RoomGrid {
        RoomGrid::from_picture(picture).unwrap()
    }

    fn walls() -> RoomGrid {
        RoomGrid::filled(TileType::Wall)
    }

    #[test]
    fn empty_room_dimensions() {
        let g = RoomGrid::empty();
        let d = encode_dimensions(&g);
        assert_eq!(d.symmetry, 1.0);
        assert_eq!(d.leniency, 1.0);
        assert_eq!(d.spatial_patterns, 1);
        assert_eq!(d.meso_patterns, 0);
        // junction count by direct neighbour enumeration: interior 11x5 cells
        // have four walkable neighbours, non-corner border cells have three.
        let mut junctions = 0;
        for y in 0..7i32 {
            for x in 0..13i32 {
                let n = [(0, 1), (1, 0), (0, -1), (-1, 0)]
                    .iter()
                    .filter(|(dx, dy)| {
                        let (a, b) = (x + dx, y + dy);
                        (0..13).contains(&a) && (0..7).contains(&b)
                    })
                    .count();
                if n >= 3 {
                    junctions += 1;
                }
            }
        }
        assert_eq!(junctions, 87);
        assert!((d.linearity - (1.0 - 87.0 / 91.0)).abs() < 1e-15);
    }

    #[test]
    fn symmetry_cases() {
        let mut g = RoomGrid::empty();
        g.set(6, 3, TileType::Wall);
        assert_eq!(symmetry(&g), 1.0);

        let mut g = RoomGrid::empty();
        g.set(0, 0, TileType::Wall);
        for axis in Axis::ALL {
            let matched = axis
                .mirror(0, 0)
                .is_some_and(|(x, y)| g.get(x, y) == TileType::Wall);
            assert!(!matched, "{axis:?}");
        }
        assert_eq!(symmetry(&g), 0.0);
    }

    #[test]
    fn vertically_mirrored_walls_are_symmetric() {
        let g = grid(
            "WWFFFFFFFFFWW
             WFFFEFFFEFFFW
             FFFFFFFFFFFFF
             FFWWFFFFFWWFF
             FFFFFFFFFFFFF
             WFFFTFFFTFFFW
             WWFFFFFFFFFWW",
        );
        assert_eq!(symmetry(&g), 1.0);
    }

    #[test]
    fn axes_are_involutions() {
        for axis in Axis::ALL {
            for y in 0..GRID_HEIGHT {
                for x in 0..GRID_WIDTH {
                    if let Some((mx, my)) = axis.mirror(x, y) {
                        assert_eq!(axis.mirror(mx, my), Some((x, y)));
                    }
                }
            }
        }
    }

    #[test]
    fn linearity_cases() {
        let corridor = grid(
            "FFFFFFFFFFFFF
             WWWWWWWWWWWWW
             WWWWWWWWWWWWW
             WWWWWWWWWWWWW
             WWWWWWWWWWWWW
             WWWWWWWWWWWWW
             WWWWWWWWWWWWW",
        );
        assert_eq!(linearity(&corridor), 1.0);
        assert_eq!(linearity(&walls()), 0.0);

        let maze = grid(
            "FWFWFWFWFWFWF
             FWFWFWFWFWFWF
             FWFWFWFWFWFWF
             FWFWFWFWFWFWF
             FWFWFWFWFWFWF
             FWFWFWFWFWFWF
             FWFWFWFWFWFWF",
        );
        assert_eq!(linearity(&maze), 1.0);
    }

    #[test]
    fn leniency_cases() {
        assert_eq!(leniency(&RoomGrid::empty()), 1.0);
        let mut g = RoomGrid::empty();
        for i in 0..10 {
            g.set_cell(i, TileType::Enemy);
        }
        assert_eq!(leniency(&g), 0.0);

        let mut g = RoomGrid::empty();
        g.set_cell(0, TileType::Enemy);
        g.set_cell(1, TileType::Enemy);
        g.set_cell(2, TileType::Boss);
        for i in 10..15 {
            g.set_cell(i, TileType::Treasure);
        }
        let expected = 1.0 - 4.0 / 10.0 + 5.0 / 20.0;
        assert!((leniency(&g) - expected).abs() < 1e-15);
        assert!((expected - 0.85).abs() < 1e-12);
    }

    #[test]
    fn spatial_patterns_cases() {
        assert_eq!(count_spatial_patterns(&RoomGrid::empty()), 1);
        assert_eq!(count_spatial_patterns(&walls()), 0);
    }

    #[test]
    fn chamber_corridor_and_joint() {
        let g = grid(
            "WWWWWWWWWWWWW
             FFFFFWWWWWWWW
             FFFWFWWWWWWWW
             FFFWFWWWWWWWW
             WWWWFWWWWWWWW
             WWWWFWWWWWWWW
             WWWWWWWWWWWWW",
        );
        let layout = SpatialLayout::detect(&g);
        assert_eq!(layout.chambers.len(), 1);
        assert_eq!(layout.corridors, vec![vec![(4, 1), (4, 2), (4, 3), (4, 4), (4, 5)]]);
        assert_eq!(layout.connectors, vec![(3, 1)]);
        assert_eq!(layout.pattern_count(), 3);
    }

    #[test]
    fn meso_pattern_cases() {
        assert_eq!(count_meso_patterns(&RoomGrid::empty()), 0);

        let closed_treasure = grid(
            "WWWWWWWWWWWWW
             WWWWWWWWWWWWW
             WWWWFFFWWWWWW
             WWWWFTFWWWWWW
             WWWWFFFWWWWWW
             WWWWWWWWWWWWW
             WWWWWWWWWWWWW",
        );
        let layout = SpatialLayout::detect(&closed_treasure);
        assert_eq!(layout.chamber_rooms(&closed_treasure), (1, 0));
        assert_eq!(count_meso_patterns(&closed_treasure), 1);

        let ambush = grid(
            "WWWWWWWWWWWWW
             WWWWWWWWWWWWW
             WWWWWWWWWWWWW
             WFFFEFFFWWWWW
             WWWWWWWWWWWWW
             WWWWWWWWWWWWW
             WWWWWWWWWWWWW",
        );
        let layout = SpatialLayout::detect(&ambush);
        assert_eq!(layout.corridors.len(), 1);
        // two corridor cells touch the enemy, both ends are dead ends
        assert_eq!(count_meso_patterns(&ambush), 4);
    }
}
