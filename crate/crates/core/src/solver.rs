//! Constructive certificate search and growth measurement.
//!
//! Conditions 1–4 and 6 force the certificate skeleton, so the only free
//! parts are the generation count and the marker. The search places all
//! of `A×A`, runs the engine once and reads both off the run.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::embedding::{extract_tm, NotATuringMachine};
use crate::engine::{run, RunStatus};
use crate::grid::recognize;
use crate::instance::{build_list, enumerate_tuples, tuples_to_points, CandidateList, Instance, Verdict, MARKERS};
use crate::tile::TileAtlas;
use crate::verifier::verify;

pub const DEFAULT_CAP: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Largest `|A|` the solver agrees to handle.
    pub cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { cap: DEFAULT_CAP }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error(
        "|A| = {size} exceeds the cap of {cap}: certificate construction cost grows exponentially in |A|, raise the cap explicitly to proceed"
    )]
    CapExceeded { size: usize, cap: usize },
    #[error("max_E must be at least 1")]
    ZeroBudget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SolveOutcome {
    Found {
        list: CandidateList,
        e: usize,
        verdict: Verdict,
    },
    NoneFound {
        why: NotATuringMachine,
    },
}

impl SolveOutcome {
    pub fn list(&self) -> Option<&CandidateList> {
        match self {
            SolveOutcome::Found { list, .. } => Some(list),
            SolveOutcome::NoneFound { .. } => None,
        }
    }
}

/// Work done by one construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub cells_placed: u64,
    pub cells_scanned: u64,
    pub generations: u64,
}

impl SolveStats {
    pub fn ops(&self) -> u64 {
        self.cells_placed + self.cells_scanned + self.generations
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    #[serde(flatten)]
    pub outcome: SolveOutcome,
    pub run_status: Option<RunStatus>,
    pub stats: SolveStats,
}

pub fn construct_certificate(
    inst: &Instance,
    max_e: usize,
    atlas: &TileAtlas,
    config: SolverConfig,
) -> Result<SolveReport, SolverError> {
    if inst.m() > config.cap {
        return Err(SolverError::CapExceeded {
            size: inst.m(),
            cap: config.cap,
        });
    }
    if max_e == 0 {
        return Err(SolverError::ZeroBudget);
    }
    let tuples = enumerate_tuples(inst);
    let state = recognize(&tuples_to_points(&tuples), atlas);
    let mut stats = SolveStats {
        cells_placed: tuples.len() as u64,
        cells_scanned: (state.len() + state.junk_cells()) as u64,
        generations: 0,
    };
    if let Err(why) = extract_tm(&state) {
        return Ok(SolveReport {
            outcome: SolveOutcome::NoneFound { why },
            run_status: None,
            stats,
        });
    }
    let result = run(&state, max_e);
    // The verifier runs exactly E generations, so a halt observed on step
    // attempt k+1 needs E = k+1, a cycle closed after k steps needs E = k,
    // and an undecided run is "does not stop" at E = max_E.
    let (e, verdict) = match result.status {
        RunStatus::Halted(_) => (result.generations_run + 1, Verdict::Stops),
        RunStatus::CycleDetected { .. } => (result.generations_run, Verdict::Stops),
        RunStatus::BudgetExhausted => (max_e, Verdict::RunsOn),
    };
    stats.generations = e as u64;
    Ok(SolveReport {
        outcome: SolveOutcome::Found {
            list: build_list(&tuples, e, verdict),
            e,
            verdict,
        },
        run_status: Some(result.status),
        stats,
    })
}

/// Every skeleton certificate with `E ≤ max_e` and either marker that
/// `verify` accepts.
pub fn accepted_candidates(inst: &Instance, max_e: usize, atlas: &TileAtlas) -> Vec<CandidateList> {
    let tuples = enumerate_tuples(inst);
    let mut out = Vec::new();
    for e in 0..=max_e {
        for verdict in [Verdict::Stops, Verdict::RunsOn] {
            let list = build_list(&tuples, e, verdict);
            if verify(inst, &list, atlas).accepted() {
                out.push(list);
            }
        }
    }
    out
}

/// `(m!)²`, saturating.
pub fn claimed_cells(m: usize) -> u128 {
    let f = (1..=m as u128).try_fold(1u128, |acc, k| acc.checked_mul(k));
    f.and_then(|f| f.checked_mul(f)).unwrap_or(u128::MAX)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub m: usize,
    pub trial: usize,
    pub set_a: String,
    pub cells_placed: u64,
    pub claimed_cells: u128,
    pub cells_scanned: u64,
    pub generations: u64,
    pub ops: u64,
    pub found: bool,
}

impl GrowthRow {
    pub const CSV_HEADER: &'static str = "m,trial,set_a,cells_placed,claimed_cells,cells_scanned,generations,ops,found";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},\"{}\",{},{},{},{},{},{}",
            self.m,
            self.trial,
            self.set_a,
            self.cells_placed,
            self.claimed_cells,
            self.cells_scanned,
            self.generations,
            self.ops,
            self.found
        )
    }
}

pub fn growth_csv(rows: &[GrowthRow]) -> String {
    let mut out = String::from(GrowthRow::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// Values a random instance draws from.
pub const SAMPLE_RANGE: std::ops::RangeInclusive<u64> = 1..=64;

pub fn random_instance(m: usize, rng: &mut ChaCha8Rng) -> Instance {
    let pool: Vec<u64> = SAMPLE_RANGE.filter(|v| !MARKERS.contains(v)).collect();
    let picked = pool.choose_multiple(rng, m).copied();
    Instance::new(picked).expect("pool excludes markers and duplicates")
}

/// One row per (size, trial), each on a fresh random `A`.
pub fn growth_probe(
    sizes: &[usize],
    trials: usize,
    seed: u64,
    max_e: usize,
    atlas: &TileAtlas,
    config: SolverConfig,
) -> Result<Vec<GrowthRow>, SolverError> {
    if let Some(&size) = sizes.iter().find(|&&s| s > config.cap) {
        return Err(SolverError::CapExceeded { size, cap: config.cap });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(sizes.len() * trials);
    for &m in sizes {
        for trial in 0..trials {
            let inst = random_instance(m, &mut rng);
            let report = construct_certificate(&inst, max_e, atlas, config)?;
            rows.push(GrowthRow {
                m,
                trial,
                set_a: inst.to_string(),
                cells_placed: report.stats.cells_placed,
                claimed_cells: claimed_cells(m),
                cells_scanned: report.stats.cells_scanned,
                generations: report.stats.generations,
                ops: report.stats.ops(),
                found: report.outcome.list().is_some(),
            });
        }
    }
    Ok(rows)
}
