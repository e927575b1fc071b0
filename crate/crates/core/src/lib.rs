//! Debilandia: a tile automaton on the integer lattice whose generations
//! run a two-state Turing machine, plus the certificate problem built on it.
//!
//! Points are grouped into 4×4 cells; each cell is either one of 13 tile
//! kinds from a [`TileAtlas`] or junk. [`engine::step`] advances one
//! generation. [`embedding`] compiles machines into tiles and back, and
//! [`verifier::verify`] checks a certificate list while counting its own
//! work.

pub mod embedding;
pub mod engine;
pub mod grid;
pub mod instance;
pub mod solver;
pub mod tile;
pub mod tm;
pub mod verifier;

pub use embedding::{compile_direct, compile_universal, extract_tm, NotATuringMachine};
pub use engine::{run, step, RunResult, RunStatus, StepOutcome, TerminationReason};
pub use grid::{recognize, state_hash, GameState};
pub use instance::{CandidateList, Instance, RejectReason, Verdict};
pub use solver::{construct_certificate, growth_probe, SolverConfig};
pub use tile::{atlas_default, Bit, CellAddr, Point, TileAtlas, TileKind};
pub use tm::{tm_run, Move, Rule, TmSpec};
pub use verifier::{verify, VerifierReport};
