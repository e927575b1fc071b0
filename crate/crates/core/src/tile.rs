//! Tile identities, the 4×4 point-pattern atlas and grid geometry.
//!
//! A tile occupies one aligned 4×4 region of the lattice. Inside a region,
//! offsets are `(dx, dy)` with `dy = 0` on the bottom row. Masks are stored
//! row-major with the top row first, so bit `i` of a [`Mask`] is character
//! `i` of its textual form.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The canonical atlas shipped with the crate.
pub const DEFAULT_ATLAS_JSON: &str = include_str!("../data/atlas-v1.json");

/// Side length of a tile in lattice units.
pub const TILE_SIDE: i64 = 4;

/// A binary value carried by tape and rule tiles, and the machine state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn from_u8(v: u8) -> Option<Bit> {
        match v {
            0 => Some(Bit::Zero),
            1 => Some(Bit::One),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    pub fn flip(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Bit {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

impl From<Bit> for u8 {
    fn from(b: Bit) -> u8 {
        b.as_u8()
    }
}

impl TryFrom<u8> for Bit {
    type Error = String;

    fn try_from(v: u8) -> Result<Bit, String> {
        Bit::from_u8(v).ok_or_else(|| format!("expected 0 or 1, got {v}"))
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// A lattice point. Problem inputs only ever produce non-negative
/// coordinates; signed storage keeps offset arithmetic simple.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Point {
        Point { x, y }
    }
}

/// Address of a 4×4 cell relative to the grid anchor. Rows grow upwards.
///
/// Ordered by `(row, col)` so that a row of cells is a contiguous range
/// in ordered maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellAddr {
    pub col: i64,
    pub row: i64,
}

impl CellAddr {
    pub const fn new(col: i64, row: i64) -> CellAddr {
        CellAddr { col, row }
    }

    pub fn offset(self, dcol: i64, drow: i64) -> CellAddr {
        CellAddr::new(self.col + dcol, self.row + drow)
    }

    pub fn above(self) -> CellAddr {
        self.offset(0, 1)
    }

    pub fn below(self) -> CellAddr {
        self.offset(0, -1)
    }

    /// The cell containing `p` for a grid anchored at `anchor`.
    pub fn containing(p: Point, anchor: Point) -> CellAddr {
        CellAddr::new(
            (p.x - anchor.x).div_euclid(TILE_SIDE),
            (p.y - anchor.y).div_euclid(TILE_SIDE),
        )
    }

    /// Lattice point of this cell's bottom-left corner.
    pub fn origin(self, anchor: Point) -> Point {
        Point::new(anchor.x + TILE_SIDE * self.col, anchor.y + TILE_SIDE * self.row)
    }
}

impl Ord for CellAddr {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.row, self.col).cmp(&(other.row, other.col))
    }
}

impl PartialOrd for CellAddr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Coarse type of a tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TileType {
    Tip,
    Tape,
    Rule,
}

/// The 13 tile identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TileKind {
    Tip,
    Tape(Bit),
    Read(Bit),
    Status(Bit),
    Write(Bit),
    ChangeStatus(Bit),
    /// `One` slides the tape left, `Zero` slides it right.
    Movement(Bit),
}

impl TileKind {
    /// All kinds, in the order of the tile list (and of the atlas file).
    pub const ALL: [TileKind; 13] = [
        TileKind::Tip,
        TileKind::Tape(Bit::One),
        TileKind::Tape(Bit::Zero),
        TileKind::Read(Bit::One),
        TileKind::Read(Bit::Zero),
        TileKind::Status(Bit::One),
        TileKind::Status(Bit::Zero),
        TileKind::Write(Bit::One),
        TileKind::Write(Bit::Zero),
        TileKind::ChangeStatus(Bit::One),
        TileKind::ChangeStatus(Bit::Zero),
        TileKind::Movement(Bit::One),
        TileKind::Movement(Bit::Zero),
    ];

    /// Position in [`TileKind::ALL`].
    pub fn index(self) -> usize {
        let pair = |b: Bit| if b == Bit::One { 0 } else { 1 };
        match self {
            TileKind::Tip => 0,
            TileKind::Tape(b) => 1 + pair(b),
            TileKind::Read(b) => 3 + pair(b),
            TileKind::Status(b) => 5 + pair(b),
            TileKind::Write(b) => 7 + pair(b),
            TileKind::ChangeStatus(b) => 9 + pair(b),
            TileKind::Movement(b) => 11 + pair(b),
        }
    }

    pub fn tile_type(self) -> TileType {
        match self {
            TileKind::Tip => TileType::Tip,
            TileKind::Tape(_) => TileType::Tape,
            _ => TileType::Rule,
        }
    }

    pub fn is_rule(self) -> bool {
        self.tile_type() == TileType::Rule
    }

    pub fn is_tape(self) -> bool {
        self.tile_type() == TileType::Tape
    }

    pub fn value(self) -> Option<Bit> {
        match self {
            TileKind::Tip => None,
            TileKind::Tape(b)
            | TileKind::Read(b)
            | TileKind::Status(b)
            | TileKind::Write(b)
            | TileKind::ChangeStatus(b)
            | TileKind::Movement(b) => Some(b),
        }
    }

    /// Packet slot (0-based, R1 = 0) occupied by a rule tile.
    pub fn slot(self) -> Option<usize> {
        match self {
            TileKind::Read(_) => Some(0),
            TileKind::Status(_) => Some(1),
            TileKind::Write(_) => Some(2),
            TileKind::ChangeStatus(_) => Some(3),
            TileKind::Movement(_) => Some(4),
            _ => None,
        }
    }

    /// The rule tile for packet slot `slot` carrying `value`.
    pub fn for_slot(slot: usize, value: Bit) -> Option<TileKind> {
        Some(match slot {
            0 => TileKind::Read(value),
            1 => TileKind::Status(value),
            2 => TileKind::Write(value),
            3 => TileKind::ChangeStatus(value),
            4 => TileKind::Movement(value),
            _ => return None,
        })
    }

    /// Family name without the value suffix, as used in snapshot files.
    pub fn family(self) -> &'static str {
        match self {
            TileKind::Tip => "tip",
            TileKind::Tape(_) => "tape",
            TileKind::Read(_) => "read",
            TileKind::Status(_) => "status",
            TileKind::Write(_) => "write",
            TileKind::ChangeStatus(_) => "change_status",
            TileKind::Movement(_) => "move",
        }
    }

    pub fn from_family(family: &str, value: Option<Bit>) -> Option<TileKind> {
        let kind = match (family, value) {
            ("tip", None) => TileKind::Tip,
            ("tape", Some(b)) => TileKind::Tape(b),
            ("read", Some(b)) => TileKind::Read(b),
            ("status", Some(b)) => TileKind::Status(b),
            ("write", Some(b)) => TileKind::Write(b),
            ("change_status", Some(b)) => TileKind::ChangeStatus(b),
            ("move", Some(b)) => TileKind::Movement(b),
            _ => return None,
        };
        Some(kind)
    }

    /// Atlas-file key, e.g. `tape_1`.
    pub fn name(self) -> String {
        match self.value() {
            None => self.family().to_string(),
            Some(b) => format!("{}_{}", self.family(), b),
        }
    }

    pub fn from_name(name: &str) -> Option<TileKind> {
        TileKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for TileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A 4×4 occupancy mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mask(pub u16);

impl Mask {
    pub const EMPTY: Mask = Mask(0);

    fn bit_index(dx: i64, dy: i64) -> u32 {
        debug_assert!((0..TILE_SIDE).contains(&dx) && (0..TILE_SIDE).contains(&dy));
        ((TILE_SIDE - 1 - dy) * TILE_SIDE + dx) as u32
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, dx: i64, dy: i64) -> bool {
        self.0 & (1 << Mask::bit_index(dx, dy)) != 0
    }

    pub fn with(self, dx: i64, dy: i64) -> Mask {
        Mask(self.0 | (1 << Mask::bit_index(dx, dy)))
    }

    /// In-cell offsets of the set points, bottom row first.
    pub fn offsets(self) -> impl Iterator<Item = (i64, i64)> {
        (0..TILE_SIDE)
            .flat_map(|dy| (0..TILE_SIDE).map(move |dx| (dx, dy)))
            .filter(move |&(dx, dy)| self.contains(dx, dy))
    }
}

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..16 {
            f.write_str(if self.0 & (1 << i) != 0 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Mask {
    type Err = AtlasError;

    fn from_str(s: &str) -> Result<Mask, AtlasError> {
        if s.len() != 16 {
            return Err(AtlasError::BadPattern(s.to_string()));
        }
        let mut bits = 0u16;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(AtlasError::BadPattern(s.to_string())),
            }
        }
        Ok(Mask(bits))
    }
}

#[derive(Debug, Error)]
pub enum AtlasError {
    #[error("atlas is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("atlas i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown tile kind `{0}`")]
    UnknownKind(String),
    #[error("atlas has no pattern for `{0}`")]
    MissingKind(String),
    #[error("pattern `{0}` is not 16 characters of '0'/'1'")]
    BadPattern(String),
    #[error("pattern for `{0}` is empty")]
    EmptyPattern(String),
    #[error("`{0}` and `{1}` share a pattern")]
    Duplicate(String, String),
}

/// Mapping from each tile kind to its point pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileAtlas {
    patterns: [Mask; 13],
}

impl TileAtlas {
    /// Builds an atlas, checking that every pattern is non-empty and that
    /// no two kinds share one.
    pub fn new(patterns: [Mask; 13]) -> Result<TileAtlas, AtlasError> {
        for (i, m) in patterns.iter().enumerate() {
            if m.is_empty() {
                return Err(AtlasError::EmptyPattern(TileKind::ALL[i].name()));
            }
            if let Some(j) = patterns[..i].iter().position(|p| p == m) {
                return Err(AtlasError::Duplicate(TileKind::ALL[j].name(), TileKind::ALL[i].name()));
            }
        }
        Ok(TileAtlas { patterns })
    }

    pub fn pattern(&self, kind: TileKind) -> Mask {
        self.patterns[kind.index()]
    }

    /// Exact-match lookup; `None` means the cell is junk.
    pub fn classify(&self, mask: Mask) -> Option<TileKind> {
        self.patterns.iter().position(|&p| p == mask).map(|i| TileKind::ALL[i])
    }

    pub fn from_json(text: &str) -> Result<TileAtlas, AtlasError> {
        let raw: BTreeMap<String, String> = serde_json::from_str(text)?;
        for key in raw.keys() {
            if TileKind::from_name(key).is_none() {
                return Err(AtlasError::UnknownKind(key.clone()));
            }
        }
        let mut patterns = [Mask::EMPTY; 13];
        for kind in TileKind::ALL {
            let name = kind.name();
            let text = raw.get(&name).ok_or(AtlasError::MissingKind(name))?;
            patterns[kind.index()] = text.parse()?;
        }
        TileAtlas::new(patterns)
    }

    /// Canonical text: one key per line in tile-list order.
    pub fn to_json(&self) -> String {
        let lines: Vec<String> = TileKind::ALL
            .iter()
            .map(|k| format!("  \"{}\": \"{}\"", k.name(), self.pattern(*k)))
            .collect();
        format!("{{\n{}\n}}\n", lines.join(",\n"))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TileAtlas, AtlasError> {
        TileAtlas::from_json(&std::fs::read_to_string(path)?)
    }
}

impl Default for TileAtlas {
    fn default() -> TileAtlas {
        atlas_default()
    }
}

/// The canonical atlas.
///
/// Every pattern is a Cartesian product `X × Y` of two offset sets that
/// both contain 0, so each tile has a point in its bottom-left corner and
/// a product point set such as `A × A` can tile into recognizable cells.
pub fn atlas_default() -> TileAtlas {
    TileAtlas::from_json(DEFAULT_ATLAS_JSON).expect("bundled atlas is valid")
}

/// Classify a raw cell mask against `atlas`; `None` is junk.
pub fn classify_cell(mask: Mask, atlas: &TileAtlas) -> Option<TileKind> {
    atlas.classify(mask)
}
