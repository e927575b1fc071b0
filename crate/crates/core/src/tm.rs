//! Two-state, two-symbol reference Turing machine.
//!
//! Kept independent of the tile engine: it is the oracle the embedding is
//! checked against.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tile::Bit;

/// Head direction. Encoded `1 = Left`, `0 = Right` in files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
}

impl Move {
    pub fn from_bit(b: Bit) -> Move {
        match b {
            Bit::One => Move::Left,
            Bit::Zero => Move::Right,
        }
    }

    pub fn as_bit(self) -> Bit {
        match self {
            Move::Left => Bit::One,
            Move::Right => Bit::Zero,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub read: Bit,
    pub state: Bit,
    pub write: Bit,
    pub next_state: Bit,
    pub head: Move,
}

impl Rule {
    pub fn new(read: u8, state: u8, write: u8, next_state: u8, head: Move) -> Rule {
        let b = |v| Bit::from_u8(v).expect("bit is 0 or 1");
        Rule {
            read: b(read),
            state: b(state),
            write: b(write),
            next_state: b(next_state),
            head,
        }
    }

    fn to_array(self) -> [u8; 5] {
        [
            self.read.as_u8(),
            self.state.as_u8(),
            self.write.as_u8(),
            self.next_state.as_u8(),
            self.head.as_bit().as_u8(),
        ]
    }

    fn from_array(a: [u8; 5]) -> Result<Rule, TmError> {
        let b = |v| Bit::from_u8(v).ok_or(TmError::NotABit(v));
        Ok(Rule {
            read: b(a[0])?,
            state: b(a[1])?,
            write: b(a[2])?,
            next_state: b(a[3])?,
            head: Move::from_bit(b(a[4])?),
        })
    }
}

#[derive(Debug, Error)]
pub enum TmError {
    #[error("two rules for (read {0}, state {1})")]
    DuplicateKey(Bit, Bit),
    #[error("head index {head} outside tape of length {len}")]
    HeadOutOfRange { head: usize, len: usize },
    #[error("value {0} is not a bit")]
    NotABit(u8),
    #[error("tape must be a string of '0'/'1'")]
    BadTape,
    #[error("machine file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("machine file: {0}")]
    Io(#[from] std::io::Error),
}

/// A machine plus its initial configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmSpec {
    rules: Vec<Rule>,
    pub initial_state: Bit,
    pub tape: Vec<Bit>,
    pub head: usize,
}

impl TmSpec {
    pub fn new(rules: Vec<Rule>, initial_state: Bit, tape: Vec<Bit>, head: usize) -> Result<TmSpec, TmError> {
        for (i, r) in rules.iter().enumerate() {
            if rules[..i].iter().any(|o| (o.read, o.state) == (r.read, r.state)) {
                return Err(TmError::DuplicateKey(r.read, r.state));
            }
        }
        if !tape.is_empty() && head >= tape.len() {
            return Err(TmError::HeadOutOfRange { head, len: tape.len() });
        }
        Ok(TmSpec {
            rules,
            initial_state,
            tape,
            head,
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule_for(&self, read: Bit, state: Bit) -> Option<&Rule> {
        self.rules.iter().find(|r| r.read == read && r.state == state)
    }

    /// Same machine on a different tape.
    pub fn with_tape(&self, tape: Vec<Bit>, head: usize) -> Result<TmSpec, TmError> {
        TmSpec::new(self.rules.clone(), self.initial_state, tape, head)
    }

    /// Adds `left` and `right` blank cells around the tape.
    pub fn padded(&self, left: usize, right: usize) -> TmSpec {
        let mut tape = vec![Bit::Zero; left];
        tape.extend_from_slice(&self.tape);
        tape.extend(std::iter::repeat_n(Bit::Zero, right));
        TmSpec {
            rules: self.rules.clone(),
            initial_state: self.initial_state,
            tape,
            head: self.head + left,
        }
    }

    pub fn initial_config(&self) -> Config {
        let mut tape = self.tape.clone();
        if tape.is_empty() {
            tape.push(Bit::Zero);
        }
        Config {
            tape,
            head: self.head,
            state: self.initial_state,
        }
    }

    pub fn from_json(text: &str) -> Result<TmSpec, TmError> {
        let file: TmFile = serde_json::from_str(text)?;
        let rules = file.rules.into_iter().map(Rule::from_array).collect::<Result<_, _>>()?;
        let tape = parse_tape(&file.tape)?;
        let state = Bit::from_u8(file.initial_state).ok_or(TmError::NotABit(file.initial_state))?;
        TmSpec::new(rules, state, tape, file.head)
    }

    pub fn to_json(&self) -> String {
        let file = TmFile {
            rules: self.rules.iter().map(|r| r.to_array()).collect(),
            tape: tape_string(&self.tape),
            head: self.head,
            initial_state: self.initial_state.as_u8(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TmSpec, TmError> {
        TmSpec::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct TmFile {
    rules: Vec<[u8; 5]>,
    tape: String,
    head: usize,
    initial_state: u8,
}

pub fn parse_tape(s: &str) -> Result<Vec<Bit>, TmError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(Bit::Zero),
            '1' => Ok(Bit::One),
            _ => Err(TmError::BadTape),
        })
        .collect()
}

pub fn tape_string(tape: &[Bit]) -> String {
    tape.iter().map(|b| if *b == Bit::One { '1' } else { '0' }).collect()
}

/// Tape, head position and state. The tape grows with blanks on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub tape: Vec<Bit>,
    pub head: usize,
    pub state: Bit,
}

impl Config {
    pub fn read(&self) -> Bit {
        self.tape[self.head]
    }

    /// Head-relative positions of the 1 cells.
    pub fn ones_from_head(&self) -> Vec<i64> {
        self.tape
            .iter()
            .enumerate()
            .filter(|(_, b)| **b == Bit::One)
            .map(|(i, _)| i as i64 - self.head as i64)
            .collect()
    }

    /// Tape with leading and trailing blanks removed.
    pub fn trimmed_tape(&self) -> &[Bit] {
        trim_blanks(&self.tape)
    }
}

pub fn trim_blanks(tape: &[Bit]) -> &[Bit] {
    let Some(first) = tape.iter().position(|b| *b == Bit::One) else {
        return &[];
    };
    let last = tape.iter().rposition(|b| *b == Bit::One).unwrap_or(first);
    &tape[first..=last]
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @{} s{}", tape_string(&self.tape), self.head, self.state)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TmStep {
    Next(Config),
    Halt,
}

/// One transition; `Halt` when no rule matches.
pub fn tm_step(m: &TmSpec, config: &Config) -> TmStep {
    let Some(rule) = m.rule_for(config.read(), config.state) else {
        return TmStep::Halt;
    };
    let mut next = config.clone();
    next.tape[next.head] = rule.write;
    next.state = rule.next_state;
    match rule.head {
        Move::Left if next.head == 0 => next.tape.insert(0, Bit::Zero),
        Move::Left => next.head -= 1,
        Move::Right => {
            next.head += 1;
            if next.head == next.tape.len() {
                next.tape.push(Bit::Zero);
            }
        }
    }
    TmStep::Next(next)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TmRun {
    Halted { config: Config, steps: usize },
    BudgetExhausted { config: Config },
}

impl TmRun {
    pub fn config(&self) -> &Config {
        match self {
            TmRun::Halted { config, .. } | TmRun::BudgetExhausted { config } => config,
        }
    }
}

pub fn tm_run(m: &TmSpec, budget: usize) -> TmRun {
    tm_run_from(m, m.initial_config(), budget)
}

pub fn tm_run_from(m: &TmSpec, mut config: Config, budget: usize) -> TmRun {
    for steps in 0..budget {
        match tm_step(m, &config) {
            TmStep::Next(next) => config = next,
            TmStep::Halt => return TmRun::Halted { config, steps },
        }
    }
    TmRun::BudgetExhausted { config }
}

/// Furthest the head strays left of cell 0 and right of the last cell
/// within `budget` steps.
pub fn head_excursion(m: &TmSpec, budget: usize) -> (usize, usize) {
    let mut config = m.initial_config();
    let len = config.tape.len();
    let mut origin = 0usize; // cells prepended so far
    let (mut left, mut right) = (0usize, 0usize);
    for _ in 0..budget {
        match tm_step(m, &config) {
            TmStep::Halt => break,
            TmStep::Next(next) => {
                if next.tape.len() > config.tape.len() && next.head == 0 {
                    origin += 1;
                }
                config = next;
                let abs = config.head as i64 - origin as i64;
                if abs < 0 {
                    left = left.max((-abs) as usize);
                } else if abs as usize >= len {
                    right = right.max(abs as usize - len + 1);
                }
            }
        }
    }
    (left, right)
}
