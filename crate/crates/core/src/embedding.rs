//! Compiling Turing machines into tile layouts and reading them back.
//!
//! The game slides the tape under a fixed tip, so head movement maps to
//! the opposite tape slide: a head move to the right is a `Movement(1)`
//! tile (tape slides left), a head move to the left is `Movement(0)`.
//!
//! Direct layout, for a tape of length `n` with the head at `h`:
//!
//! ```text
//!   row 2+i   rule i as R1..R5 in columns h+1..=h+5
//!   row 3     status (initial state)   at column h
//!   row 2     read placeholder         at column h
//!   row 1     tip                      at column h
//!   row 0     tape cells               at columns 0..n
//! ```
//!
//! The universal layout has no packets. The rule tokens sit in the tape
//! row under the tip and extend leftwards in the order they are consumed;
//! each consumption slides everything left of it one cell right, so the
//! payload cells left of the head end up under the tip once all tokens are
//! gone. Payload cells right of the head start right of the tip.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{packets, tip_context, TerminationReason};
use crate::grid::GameState;
use crate::tile::{Bit, CellAddr, Point, TileAtlas, TileKind};
use crate::tm::{Move, Rule, TmSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbedError {
    #[error("machine tape is empty; the tip needs a cell to read")]
    EmptyTape,
    #[error("payload tape is empty")]
    EmptyPayload,
}

/// Why a state does not contain a Turing machine.
#[derive(Clone, Copy, Debug, Error, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NotATuringMachine {
    #[error("no tip tile")]
    NoTip,
    #[error("more than one tip tile")]
    MultipleTips,
    #[error("tape row under the tip is missing or broken")]
    BrokenTape,
    #[error("no complete rule packet")]
    NoPackets,
    #[error("tip stack lacks a status tile or holds a foreign tile")]
    MalformedStack,
}

fn movement_tile(head: Move) -> Bit {
    match head {
        Move::Right => Bit::One,
        Move::Left => Bit::Zero,
    }
}

fn head_move(movement: Bit) -> Move {
    match movement {
        Bit::One => Move::Right,
        Bit::Zero => Move::Left,
    }
}

/// The five rule tiles of `rule`, R1 first.
pub fn rule_tiles(rule: &Rule) -> [TileKind; 5] {
    [
        TileKind::Read(rule.read),
        TileKind::Status(rule.state),
        TileKind::Write(rule.write),
        TileKind::ChangeStatus(rule.next_state),
        TileKind::Movement(movement_tile(rule.head)),
    ]
}

fn place_stack(state: &mut GameState, tip: CellAddr, read: Bit, status: Bit) {
    state.place(tip, TileKind::Tip);
    state.place(tip.above(), TileKind::Read(read));
    state.place(tip.above().above(), TileKind::Status(status));
}

/// Tile layout of [`compile_direct`].
pub fn direct_state(m: &TmSpec) -> Result<GameState, EmbedError> {
    if m.tape.is_empty() {
        return Err(EmbedError::EmptyTape);
    }
    let mut s = GameState::new(Point::new(0, 0));
    for (i, b) in m.tape.iter().enumerate() {
        s.place(CellAddr::new(i as i64, 0), TileKind::Tape(*b));
    }
    let tip = CellAddr::new(m.head as i64, 1);
    place_stack(&mut s, tip, m.tape[m.head], m.initial_state);
    for (i, rule) in m.rules().iter().enumerate() {
        for (slot, kind) in rule_tiles(rule).into_iter().enumerate() {
            s.place(tip.offset(1 + slot as i64, 1 + i as i64), kind);
        }
    }
    Ok(s)
}

/// Points of a grid running `m` with its rule packets already in place.
pub fn compile_direct(m: &TmSpec, atlas: &TileAtlas) -> Result<BTreeSet<Point>, EmbedError> {
    Ok(direct_state(m)?.points(atlas))
}

/// Tile layout of [`compile_universal`]; the head of `m` indexes `payload`.
pub fn universal_state(m: &TmSpec, payload: &[Bit], head: usize) -> Result<GameState, EmbedError> {
    if payload.is_empty() {
        return Err(EmbedError::EmptyPayload);
    }
    let head = head.min(payload.len() - 1);
    let tokens: Vec<TileKind> = m.rules().iter().flat_map(rule_tiles).collect();
    let tip_col = (tokens.len() + head) as i64;
    let mut s = GameState::new(Point::new(0, 0));
    for (i, b) in payload.iter().enumerate() {
        let col = if i <= head {
            i as i64
        } else {
            tip_col + (i - head) as i64
        };
        s.place(CellAddr::new(col, 0), TileKind::Tape(*b));
    }
    for (j, kind) in tokens.iter().enumerate() {
        s.place(CellAddr::new(tip_col - j as i64, 0), *kind);
    }
    place_stack(&mut s, CellAddr::new(tip_col, 1), Bit::Zero, m.initial_state);
    Ok(s)
}

/// Points of a grid whose rules are loaded from tokens on the tape.
/// The machine's own tape is ignored; `payload` is run with the head at
/// `m.head` (clamped to the payload).
pub fn compile_universal(m: &TmSpec, payload: &[Bit], atlas: &TileAtlas) -> Result<BTreeSet<Point>, EmbedError> {
    Ok(universal_state(m, payload, m.head)?.points(atlas))
}

/// Finds the tip, the tape row under it and the rules, and returns the
/// machine they describe. Rule tokens still waiting on the tape count as
/// rules; the returned head is where the tip will sit once they are loaded.
pub fn extract_tm(state: &GameState) -> Result<TmSpec, NotATuringMachine> {
    let ctx = tip_context(state).map_err(|r| match r {
        TerminationReason::MultipleTips => NotATuringMachine::MultipleTips,
        _ => NotATuringMachine::NoTip,
    })?;
    match state.get(ctx.read_slot) {
        None | Some(TileKind::Read(_)) => {}
        Some(_) => return Err(NotATuringMachine::MalformedStack),
    }
    let initial_state = ctx.status.ok_or(NotATuringMachine::MalformedStack)?;

    let below = ctx.below();
    let tape_like = |k: TileKind| k.is_tape() || k.is_rule();
    if !state.get(below).is_some_and(tape_like) {
        return Err(NotATuringMachine::BrokenTape);
    }
    let mut lo = below.col;
    while state.get(CellAddr::new(lo - 1, below.row)).is_some_and(tape_like) {
        lo -= 1;
    }
    let mut hi = below.col;
    while state.get(CellAddr::new(hi + 1, below.row)).is_some_and(tape_like) {
        hi += 1;
    }
    let row: Vec<TileKind> = (lo..=hi)
        .map(|c| state.get(CellAddr::new(c, below.row)).expect("contiguous"))
        .collect();
    if state.row(below.row).filter(|(_, k)| tape_like(*k)).count() != row.len() {
        return Err(NotATuringMachine::BrokenTape);
    }

    // Rule tokens form one block ending under the tip.
    let tip_idx = (below.col - lo) as usize;
    let token_start = if row[tip_idx].is_rule() {
        let mut start = tip_idx;
        while start > 0 && row[start - 1].is_rule() {
            start -= 1;
        }
        start
    } else {
        tip_idx + 1
    };
    let tokens_span = token_start..=tip_idx;
    if row
        .iter()
        .enumerate()
        .any(|(i, k)| k.is_rule() && !tokens_span.contains(&i))
    {
        return Err(NotATuringMachine::BrokenTape);
    }
    let tokens: Vec<TileKind> = tokens_span.rev().map(|i| row[i]).collect();

    let grid_packets = packets(state, &ctx);
    if !tokens.is_empty() && grid_packets.iter().any(|p| !p.is_complete()) {
        return Err(NotATuringMachine::MalformedStack);
    }
    let mut rules: Vec<Rule> = grid_packets
        .iter()
        .filter_map(|p| p.rule())
        .map(|r| Rule {
            read: r.read,
            state: r.state,
            write: r.write,
            next_state: r.next_state,
            head: head_move(r.movement),
        })
        .collect();
    if !tokens.len().is_multiple_of(5) {
        return Err(NotATuringMachine::BrokenTape);
    }
    for chunk in tokens.chunks(5) {
        let mut v = [Bit::Zero; 5];
        for (slot, kind) in chunk.iter().enumerate() {
            if kind.slot() != Some(slot) {
                return Err(NotATuringMachine::BrokenTape);
            }
            v[slot] = kind.value().expect("rule tiles carry values");
        }
        rules.push(Rule {
            read: v[0],
            state: v[1],
            write: v[2],
            next_state: v[3],
            head: head_move(v[4]),
        });
    }
    if rules.is_empty() {
        return Err(NotATuringMachine::NoPackets);
    }
    // the engine fires the lowest matching packet; later duplicates are dead
    let mut seen = BTreeSet::new();
    rules.retain(|r| seen.insert((r.read, r.state)));

    let tape: Vec<Bit> = row.iter().filter(|k| k.is_tape()).filter_map(|k| k.value()).collect();
    let head = if tokens.is_empty() {
        tip_idx
    } else if token_start == 0 {
        return Err(NotATuringMachine::BrokenTape);
    } else {
        token_start - 1
    };
    TmSpec::new(rules, initial_state, tape, head).map_err(|_| NotATuringMachine::BrokenTape)
}

/// The machine-level reading of a running game: tape row, tip position in
/// it and status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineView {
    /// Tape tiles of the row under the tip, left to right, with blanks for
    /// any gap.
    pub tape: Vec<Bit>,
    /// Index of the tip column in `tape` (may lie outside when the tip has
    /// run off the tape).
    pub head: i64,
    pub state: Option<Bit>,
}

impl MachineView {
    /// Tip-relative positions of the 1 cells.
    pub fn ones_from_head(&self) -> Vec<i64> {
        self.tape
            .iter()
            .enumerate()
            .filter(|(_, b)| **b == Bit::One)
            .map(|(i, _)| i as i64 - self.head)
            .collect()
    }
}

pub fn machine_view(state: &GameState) -> Option<MachineView> {
    let ctx = tip_context(state).ok()?;
    let below = ctx.below();
    let cells: Vec<(i64, Bit)> = state
        .row(below.row)
        .filter_map(|(c, k)| match k {
            TileKind::Tape(b) => Some((c.col, b)),
            _ => None,
        })
        .collect();
    let lo = cells.first().map_or(below.col, |(c, _)| *c);
    let hi = cells.last().map_or(below.col - 1, |(c, _)| *c);
    let mut tape = vec![Bit::Zero; (hi - lo + 1).max(0) as usize];
    for (c, b) in cells {
        tape[(c - lo) as usize] = b;
    }
    Some(MachineView {
        tape,
        head: below.col - lo,
        state: ctx.status,
    })
}
