//! Generation stepping and stabilization detection.
//!
//! Layout around the tip at cell `(c, r)`:
//!
//! ```text
//!   r+2   status
//!   r+1   read      R1 R2 R3 R4 R5     <- lowest rule packet
//!   r     TIP
//!   r-1   tape row (the cell at c is read each generation)
//!          c        c+1 ...    c+5
//! ```
//!
//! Further packets sit on higher rows in the same five columns. All
//! terminations leave the state untouched.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::grid::{state_hash, GameState};
use crate::tile::{Bit, CellAddr, TileKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    NoMatchingPacket,
    NothingBelowTip,
    MultipleTips,
    NoTip,
    MalformedTipContext,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    Fired { packet_row: i64 },
    RuleCopied { target_row: i64, slot: usize },
    Terminated(TerminationReason),
}

impl StepOutcome {
    pub fn is_terminated(&self) -> bool {
        matches!(self, StepOutcome::Terminated(_))
    }
}

/// The tip and the two cells stacked on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TipContext {
    pub tip_cell: CellAddr,
    pub read_slot: CellAddr,
    pub status_slot: CellAddr,
    /// Value of the status tile, if the status slot holds one.
    pub status: Option<Bit>,
}

impl TipContext {
    pub fn below(&self) -> CellAddr {
        self.tip_cell.below()
    }

    /// Cell of packet slot `slot` (0 = R1) on `row`.
    pub fn slot_cell(&self, row: i64, slot: usize) -> CellAddr {
        CellAddr::new(self.tip_cell.col + 1 + slot as i64, row)
    }
}

/// Locates the unique tip.
pub fn tip_context(state: &GameState) -> Result<TipContext, TerminationReason> {
    let tips = state.tips();
    let tip_cell = match tips.as_slice() {
        [] => return Err(TerminationReason::NoTip),
        [one] => *one,
        _ => return Err(TerminationReason::MultipleTips),
    };
    let status_slot = tip_cell.above().above();
    let status = match state.get(status_slot) {
        Some(TileKind::Status(b)) => Some(b),
        _ => None,
    };
    Ok(TipContext {
        tip_cell,
        read_slot: tip_cell.above(),
        status_slot,
        status,
    })
}

/// A row of rule tiles to the right of the tip stack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RulePacket {
    pub row: i64,
    /// Values of the leading in-order slots; `None` past the first gap.
    pub slots: [Option<Bit>; 5],
    /// Number of leading slots holding the right tile type.
    pub filled: usize,
    /// The first unfilled slot is occupied by some other tile.
    pub blocked: bool,
}

/// A complete packet decoded as a transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PacketRule {
    pub read: Bit,
    pub state: Bit,
    pub write: Bit,
    pub next_state: Bit,
    pub movement: Bit,
}

impl RulePacket {
    pub fn is_complete(&self) -> bool {
        self.filled == 5
    }

    pub fn rule(&self) -> Option<PacketRule> {
        match self.slots {
            [Some(read), Some(state), Some(write), Some(next_state), Some(movement)] => Some(PacketRule {
                read,
                state,
                write,
                next_state,
                movement,
            }),
            _ => None,
        }
    }
}

/// Every row above the tip holding a rule tile in the packet columns,
/// lowest first.
pub fn packets(state: &GameState, ctx: &TipContext) -> Vec<RulePacket> {
    let (lo, hi) = (ctx.tip_cell.col + 1, ctx.tip_cell.col + 5);
    let rows: BTreeSet<i64> = state
        .tiles()
        .iter()
        .filter(|(c, k)| c.row > ctx.tip_cell.row && (lo..=hi).contains(&c.col) && k.is_rule())
        .map(|(c, _)| c.row)
        .collect();
    rows.into_iter()
        .map(|row| {
            let mut slots = [None; 5];
            let mut filled = 0;
            for (i, slot) in slots.iter_mut().enumerate() {
                match state.get(ctx.slot_cell(row, i)) {
                    Some(k) if k.slot() == Some(i) => {
                        *slot = k.value();
                        filled += 1;
                    }
                    _ => break,
                }
            }
            let blocked = filled < 5 && state.get(ctx.slot_cell(row, filled)).is_some();
            RulePacket {
                row,
                slots,
                filled,
                blocked,
            }
        })
        .collect()
}

/// Advances one generation.
pub fn step(state: &GameState) -> (GameState, StepOutcome) {
    match try_step(state) {
        Ok((next, outcome)) => (next, outcome),
        Err(reason) => (state.clone(), StepOutcome::Terminated(reason)),
    }
}

fn try_step(state: &GameState) -> Result<(GameState, StepOutcome), TerminationReason> {
    let ctx = tip_context(state)?;
    match state.get(ctx.below()) {
        Some(TileKind::Tape(read)) => fire(state, &ctx, read),
        Some(kind) if kind.is_rule() => copy_rule(state, &ctx, kind),
        _ => Err(TerminationReason::NothingBelowTip),
    }
}

fn fire(state: &GameState, ctx: &TipContext, read: Bit) -> Result<(GameState, StepOutcome), TerminationReason> {
    let status = ctx.status.ok_or(TerminationReason::MalformedTipContext)?;
    let (row, rule) = packets(state, ctx)
        .iter()
        .filter_map(|p| p.rule().map(|r| (p.row, r)))
        .find(|(_, r)| r.read == read && r.state == status)
        .ok_or(TerminationReason::NoMatchingPacket)?;

    let mut next = state.clone();
    next.place(ctx.read_slot, TileKind::Read(read));
    next.place(ctx.below(), TileKind::Tape(rule.write));
    next.place(ctx.status_slot, TileKind::Status(rule.next_state));
    let shift = match rule.movement {
        Bit::One => -1,
        Bit::Zero => 1,
    };
    shift_tape_row(&mut next, ctx.below().row, shift)?;
    Ok((next, StepOutcome::Fired { packet_row: row }))
}

/// Moves every tape tile of `row` by `shift` columns at once.
fn shift_tape_row(state: &mut GameState, row: i64, shift: i64) -> Result<(), TerminationReason> {
    let tape: Vec<(CellAddr, TileKind)> = state.row(row).filter(|(_, k)| k.is_tape()).collect();
    for (cell, _) in &tape {
        state.remove(*cell);
    }
    for (cell, kind) in tape {
        if state.place(cell.offset(shift, 0), kind).is_some() {
            return Err(TerminationReason::MalformedTipContext);
        }
    }
    Ok(())
}

fn copy_rule(
    state: &GameState,
    ctx: &TipContext,
    kind: TileKind,
) -> Result<(GameState, StepOutcome), TerminationReason> {
    let all = packets(state, ctx);
    let (row, slot, blocked) = match all.iter().filter(|p| !p.is_complete()).max_by_key(|p| p.row) {
        Some(p) => (p.row, p.filled, p.blocked),
        None => {
            let row = all.last().map_or(ctx.tip_cell.row + 1, |p| p.row + 1);
            (row, 0, false)
        }
    };
    if blocked || kind.slot() != Some(slot) {
        return Err(TerminationReason::MalformedTipContext);
    }

    let mut next = state.clone();
    if next.place(ctx.slot_cell(row, slot), kind).is_some() {
        return Err(TerminationReason::MalformedTipContext);
    }
    let consumed = ctx.below();
    next.remove(consumed);
    let left: Vec<(CellAddr, TileKind)> = next.row(consumed.row).filter(|(c, _)| c.col < consumed.col).collect();
    for (cell, _) in &left {
        next.remove(*cell);
    }
    for (cell, k) in left {
        next.place(cell.offset(1, 0), k);
    }
    Ok((next, StepOutcome::RuleCopied { target_row: row, slot }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Halted(TerminationReason),
    /// The state after generation `first_index + period` repeats the state
    /// after generation `first_index`.
    CycleDetected {
        period: usize,
        first_index: usize,
    },
    BudgetExhausted,
}

impl RunStatus {
    /// Terminated or stabilized.
    pub fn stopped(&self) -> bool {
        !matches!(self, RunStatus::BudgetExhausted)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub final_state: GameState,
    pub generations_run: usize,
    pub status: RunStatus,
}

/// What an observer sees after each step attempt.
pub struct Generation<'a> {
    /// 1-based step attempt.
    pub index: usize,
    pub before: &'a GameState,
    pub after: &'a GameState,
    pub outcome: StepOutcome,
    pub state_hash: u64,
}

/// One line of a simulation trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub gen: usize,
    pub outcome: StepOutcome,
    pub state_hash: String,
    pub changed_cells: Vec<[i64; 2]>,
}

impl TraceRecord {
    pub fn from_generation(g: &Generation<'_>) -> TraceRecord {
        TraceRecord {
            gen: g.index,
            outcome: g.outcome,
            state_hash: format!("{:016x}", g.state_hash),
            changed_cells: changed_cells(g.before, g.after)
                .into_iter()
                .map(|c| [c.col, c.row])
                .collect(),
        }
    }
}

/// Cells whose content differs between two states.
pub fn changed_cells(a: &GameState, b: &GameState) -> Vec<CellAddr> {
    let keys: BTreeSet<CellAddr> = a.tiles().keys().chain(b.tiles().keys()).copied().collect();
    keys.into_iter().filter(|c| a.get(*c) != b.get(*c)).collect()
}

pub fn run(state: &GameState, max_gens: usize) -> RunResult {
    run_with(state, max_gens, |_| {})
}

/// Runs and hands a [`TraceRecord`] for every generation to `sink`.
pub fn run_traced(state: &GameState, max_gens: usize, mut sink: impl FnMut(TraceRecord)) -> RunResult {
    run_with(state, max_gens, |g| sink(TraceRecord::from_generation(&g)))
}

/// Steps up to `max_gens` times, stopping at termination or at the first
/// repeated state hash.
pub fn run_with(state: &GameState, max_gens: usize, mut observe: impl FnMut(Generation<'_>)) -> RunResult {
    let mut seen: HashMap<u64, usize> = HashMap::new();
    seen.insert(state_hash(state), 0);
    let mut current = state.clone();
    for gen in 0..max_gens {
        let (next, outcome) = step(&current);
        if let StepOutcome::Terminated(reason) = outcome {
            observe(Generation {
                index: gen + 1,
                before: &current,
                after: &current,
                outcome,
                state_hash: state_hash(&current),
            });
            return RunResult {
                final_state: current,
                generations_run: gen,
                status: RunStatus::Halted(reason),
            };
        }
        let hash = state_hash(&next);
        observe(Generation {
            index: gen + 1,
            before: &current,
            after: &next,
            outcome,
            state_hash: hash,
        });
        current = next;
        if let Some(&first) = seen.get(&hash) {
            return RunResult {
                final_state: current,
                generations_run: gen + 1,
                status: RunStatus::CycleDetected {
                    period: gen + 1 - first,
                    first_index: first,
                },
            };
        }
        seen.insert(hash, gen + 1);
    }
    RunResult {
        final_state: current,
        generations_run: max_gens,
        status: RunStatus::BudgetExhausted,
    }
}
