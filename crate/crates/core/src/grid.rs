//! Game state: a sparse map of recognized tiles on the cell grid.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tile::{Bit, CellAddr, Mask, Point, TileAtlas, TileKind};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GameState {
    tiles: BTreeMap<CellAddr, TileKind>,
    anchor: Point,
    junk_cells: usize,
}

impl GameState {
    pub fn new(anchor: Point) -> GameState {
        GameState {
            tiles: BTreeMap::new(),
            anchor,
            junk_cells: 0,
        }
    }

    pub fn from_tiles(anchor: Point, tiles: impl IntoIterator<Item = (CellAddr, TileKind)>) -> GameState {
        GameState {
            tiles: tiles.into_iter().collect(),
            anchor,
            junk_cells: 0,
        }
    }

    pub fn anchor(&self) -> Point {
        self.anchor
    }

    /// Occupied cells whose points matched no atlas pattern.
    pub fn junk_cells(&self) -> usize {
        self.junk_cells
    }

    pub fn tiles(&self) -> &BTreeMap<CellAddr, TileKind> {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn get(&self, cell: CellAddr) -> Option<TileKind> {
        self.tiles.get(&cell).copied()
    }

    /// Puts `kind` at `cell`, returning whatever was there.
    pub fn place(&mut self, cell: CellAddr, kind: TileKind) -> Option<TileKind> {
        self.tiles.insert(cell, kind)
    }

    pub fn remove(&mut self, cell: CellAddr) -> Option<TileKind> {
        self.tiles.remove(&cell)
    }

    /// Tiles of one row, left to right.
    pub fn row(&self, row: i64) -> impl Iterator<Item = (CellAddr, TileKind)> + '_ {
        self.tiles
            .range(CellAddr::new(i64::MIN, row)..=CellAddr::new(i64::MAX, row))
            .map(|(c, k)| (*c, *k))
    }

    pub fn tips(&self) -> Vec<CellAddr> {
        self.tiles
            .iter()
            .filter(|(_, k)| **k == TileKind::Tip)
            .map(|(c, _)| *c)
            .collect()
    }

    /// Bottom-left occupied cell, taken per axis.
    pub fn min_cell(&self) -> Option<CellAddr> {
        let col = self.tiles.keys().map(|c| c.col).min()?;
        let row = self.tiles.keys().map(|c| c.row).min()?;
        Some(CellAddr::new(col, row))
    }

    /// Lattice points drawn by the tiles, with the bottom-left occupied
    /// cell placed at the anchor. Junk is not reconstructed.
    pub fn points(&self, atlas: &TileAtlas) -> BTreeSet<Point> {
        let Some(min) = self.min_cell() else {
            return BTreeSet::new();
        };
        let mut out = BTreeSet::new();
        for (cell, kind) in &self.tiles {
            let origin = cell.offset(-min.col, -min.row).origin(self.anchor);
            for (dx, dy) in atlas.pattern(*kind).offsets() {
                out.insert(Point::new(origin.x + dx, origin.y + dy));
            }
        }
        out
    }

    pub fn to_snapshot(&self) -> Snapshot {
        Snapshot {
            anchor: [self.anchor.x, self.anchor.y],
            tiles: self
                .tiles
                .iter()
                .map(|(c, k)| SnapshotTile {
                    col: c.col,
                    row: c.row,
                    kind: k.family().to_string(),
                    value: k.value(),
                })
                .collect(),
            junk_cells: self.junk_cells,
        }
    }

    pub fn from_snapshot(snap: &Snapshot) -> Result<GameState, SnapshotError> {
        let mut state = GameState::new(Point::new(snap.anchor[0], snap.anchor[1]));
        state.junk_cells = snap.junk_cells;
        for t in &snap.tiles {
            let kind = TileKind::from_family(&t.kind, t.value).ok_or_else(|| SnapshotError::BadTile(t.kind.clone()))?;
            if state.place(CellAddr::new(t.col, t.row), kind).is_some() {
                return Err(SnapshotError::Overlap(t.col, t.row));
            }
        }
        Ok(state)
    }
}

/// External form of a [`GameState`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub anchor: [i64; 2],
    pub tiles: Vec<SnapshotTile>,
    pub junk_cells: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotTile {
    pub col: i64,
    pub row: i64,
    pub kind: String,
    pub value: Option<Bit>,
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("unknown tile `{0}` or missing/extra value")]
    BadTile(String),
    #[error("two tiles at cell ({0}, {1})")]
    Overlap(i64, i64),
}

/// Splits `points` into aligned 4×4 cells anchored at the per-axis minimum
/// and classifies every occupied cell.
pub fn recognize<'a>(points: impl IntoIterator<Item = &'a Point>, atlas: &TileAtlas) -> GameState {
    let points: Vec<Point> = points.into_iter().copied().collect();
    let anchor = match (points.iter().map(|p| p.x).min(), points.iter().map(|p| p.y).min()) {
        (Some(x), Some(y)) => Point::new(x, y),
        _ => return GameState::default(),
    };
    let mut cells: BTreeMap<CellAddr, Mask> = BTreeMap::new();
    for p in &points {
        let cell = CellAddr::containing(*p, anchor);
        let origin = cell.origin(anchor);
        let m = cells.entry(cell).or_insert(Mask::EMPTY);
        *m = m.with(p.x - origin.x, p.y - origin.y);
    }
    let mut state = GameState::new(anchor);
    for (cell, mask) in cells {
        match atlas.classify(mask) {
            Some(kind) => {
                state.tiles.insert(cell, kind);
            }
            None => state.junk_cells += 1,
        }
    }
    state
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv(mut h: u64, bytes: &[u8]) -> u64 {
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Digest of the tile layout relative to its bottom-left occupied cell.
///
/// The anchor and the junk count do not contribute. Iteration follows the
/// map's key order, so insertion order is irrelevant.
pub fn state_hash(state: &GameState) -> u64 {
    let mut h = FNV_OFFSET;
    if let Some(min) = state.min_cell() {
        for (cell, kind) in &state.tiles {
            h = fnv(h, &(cell.col - min.col).to_le_bytes());
            h = fnv(h, &(cell.row - min.row).to_le_bytes());
            h = fnv(h, &[kind.index() as u8]);
        }
    }
    h = fnv(h, &(state.tiles.len() as u64).to_le_bytes());
    // splitmix64 finalizer
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}
