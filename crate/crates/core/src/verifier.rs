//! Certificate verifier with abstract step accounting.
//!
//! Steps, with their budgeted ceilings in terms of `T` pairs, `P = 2T`
//! coordinates and `E` generations:
//!
//! | step | work                                        | ceiling        |
//! |------|---------------------------------------------|----------------|
//! | 1    | first element is 2                          | 1              |
//! | 2–3  | group pairs up to the 5                     | 2P + T + 1     |
//! | 4    | place points, split into cells, recognize   | P + 17T        |
//! | 5    | count 4s, run E generations                 | 2E + ET + 3    |
//! | 6    | find tape, tip and rules at generation one  | ET             |
//! | 7    | read the verdict marker                     | 2              |
//! | 8    | nothing trails; verdict agrees with game    | 2              |
//!
//! Ceilings add up to `2ET + 2E + 3P + 18T + 9`, one less than the closed
//! form `f = 2ET + 2E + 3P + 18T + 10` that is bounded by `2N² + 33N` with
//! `N = P + E + T + 4`.

use serde::Serialize;

use crate::embedding::{extract_tm, NotATuringMachine};
use crate::engine::{run_with, RunStatus, TraceRecord};
use crate::grid::recognize;
use crate::instance::{
    check_coverage, tuples_to_points, CandidateList, Instance, Reject, RejectReason, Scanner, Verdict,
};
use crate::tile::TileAtlas;

/// Steps charged to recognizing one occupied cell: 16 point slots plus
/// the atlas lookup.
pub const CELL_COST: u64 = 17;

/// Abstract step counters and the size parameters they are judged by.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CostLedger {
    pub start: u64,
    pub tuples: u64,
    pub placement: u64,
    pub generations: u64,
    pub detection: u64,
    pub verdict: u64,
    pub decision: u64,
    pub t: u64,
    pub p: u64,
    pub e: u64,
    pub n: u64,
}

impl CostLedger {
    pub fn with_sizes(t: u64, e: u64) -> CostLedger {
        let mut l = CostLedger::default();
        l.set_sizes(t, e);
        l
    }

    fn set_sizes(&mut self, t: u64, e: u64) {
        self.t = t;
        self.p = 2 * t;
        self.e = e;
        self.n = self.p + e + t + 4;
    }

    pub fn counters(&self) -> [u64; 7] {
        [
            self.start,
            self.tuples,
            self.placement,
            self.generations,
            self.detection,
            self.verdict,
            self.decision,
        ]
    }

    /// Per-step ceilings, in the order of [`CostLedger::counters`].
    pub fn ceilings(&self) -> [u64; 7] {
        let (t, p, e) = (self.t, self.p, self.e);
        [1, 2 * p + t + 1, p + 17 * t, 2 * e + e * t + 3, e * t, 2, 2]
    }

    pub fn within_ceilings(&self) -> bool {
        self.counters().iter().zip(self.ceilings()).all(|(c, b)| *c <= b)
    }

    pub fn total(&self) -> u64 {
        self.counters().iter().sum()
    }

    /// Sum of the per-step ceilings.
    pub fn ceiling_sum(&self) -> u64 {
        self.ceilings().iter().sum()
    }
}

/// `2ET + 2E + 3P + 18T + 10`.
pub fn f_of(ledger: &CostLedger) -> u64 {
    let (t, p, e) = (ledger.t, ledger.p, ledger.e);
    2 * e * t + 2 * e + 3 * p + 18 * t + 10
}

/// `2N² + 33N`.
pub fn bound_of(n: u64) -> u64 {
    2 * n * n + 33 * n
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject {
        reason: RejectReason,
        /// Verifier step (1–8) that rejected.
        step: u8,
        position: usize,
    },
}

impl Decision {
    pub fn accepted(&self) -> bool {
        matches!(self, Decision::Accept)
    }

    pub fn reason(&self) -> Option<RejectReason> {
        match self {
            Decision::Accept => None,
            Decision::Reject { reason, .. } => Some(*reason),
        }
    }

    pub fn step(&self) -> u8 {
        match self {
            Decision::Accept => 8,
            Decision::Reject { step, .. } => *step,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifierReport {
    /// `"accept"` or `"reject"`.
    pub verdict: &'static str,
    /// Reason text with its condition number, e.g. `condition 1: first_element`.
    pub reason: Option<String>,
    pub decision: Decision,
    /// Set when step 6 fails.
    pub machine_error: Option<NotATuringMachine>,
    /// Engine result for the E generations, when they were run.
    pub run_status: Option<RunStatus>,
    pub stopped: Option<bool>,
    #[serde(rename = "counters")]
    pub ledger: CostLedger,
    #[serde(rename = "f_N")]
    pub f_n: u64,
    pub bound: u64,
    pub total_counted: u64,
    pub ceiling_sum: u64,
}

impl VerifierReport {
    fn new(decision: Decision, ledger: CostLedger) -> VerifierReport {
        VerifierReport {
            verdict: if decision.accepted() { "accept" } else { "reject" },
            reason: decision.reason().map(|r| r.to_string()),
            decision,
            machine_error: None,
            run_status: None,
            stopped: None,
            ledger,
            f_n: f_of(&ledger),
            bound: bound_of(ledger.n),
            total_counted: ledger.total(),
            ceiling_sum: ledger.ceiling_sum(),
        }
    }

    pub fn accepted(&self) -> bool {
        self.decision.accepted()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}

pub fn verify(inst: &Instance, list: &CandidateList, atlas: &TileAtlas) -> VerifierReport {
    verify_traced(inst, list, atlas, |_| {})
}

/// [`verify`], streaming one record per generation run in step 5.
pub fn verify_traced(
    inst: &Instance,
    list: &CandidateList,
    atlas: &TileAtlas,
    mut trace: impl FnMut(TraceRecord),
) -> VerifierReport {
    // Sizes are known only as the scan proceeds; start from T = E = 0.
    let mut c = CostLedger::with_sizes(0, 0);
    let reject = |c: CostLedger, step: u8, r: Reject| {
        VerifierReport::new(
            Decision::Reject {
                reason: r.reason,
                step,
                position: r.position,
            },
            c,
        )
    };
    let mut scan = Scanner::new(inst, &list.0);

    if let Err(r) = scan.start(&mut c.start) {
        return reject(c, 1, r);
    }

    let mut opened = 0;
    let tuples = match scan.tuples(&mut c.tuples, &mut opened) {
        Ok(t) => t,
        Err(r) => {
            c.set_sizes(opened as u64, 0);
            let step = if r.reason == RejectReason::MissingTerminator {
                3
            } else {
                2
            };
            return reject(c, step, r);
        }
    };
    let t = tuples.len() as u64;
    c.set_sizes(t, 0);

    if let Err(r) = check_coverage(inst, &tuples, &mut c.placement) {
        return reject(c, 4, r);
    }
    let state = recognize(&tuples_to_points(&tuples), atlas);
    c.placement += CELL_COST * (state.len() + state.junk_cells()) as u64;

    let run_start = scan.position();
    let mut e = 0usize;
    let counted = scan.generations(&mut c.generations, &mut e);
    c.set_sizes(t, e as u64);
    if let Err(r) = counted {
        return reject(c, 5, r);
    }

    // Detection happens while the first generation runs; with no
    // generation there is nothing to inspect.
    if e == 0 {
        return reject(c, 6, Reject::at(RejectReason::NotATuringMachine, run_start));
    }
    c.detection += state.len() as u64;
    if let Err(why) = extract_tm(&state) {
        let mut report = reject(c, 6, Reject::at(RejectReason::NotATuringMachine, run_start));
        report.machine_error = Some(why);
        return report;
    }

    let run = run_with(&state, e, |g| {
        c.generations += g.before.len() as u64;
        trace(TraceRecord::from_generation(&g));
    });
    let stopped = run.status.stopped();

    let marker_at = scan.position();
    let verdict = scan.verdict(&mut c.verdict);
    let finished = verdict.and_then(|v| scan.finish(&mut c.decision).map(|_| v));
    let with_run = |mut r: VerifierReport| {
        r.run_status = Some(run.status);
        r.stopped = Some(stopped);
        r
    };
    let verdict = match finished {
        Ok(v) => v,
        Err(r) => {
            let step = if r.reason == RejectReason::TrailingElement {
                8
            } else {
                7
            };
            return with_run(reject(c, step, r));
        }
    };
    c.decision += 1;
    if (verdict == Verdict::Stops) != stopped {
        return with_run(reject(c, 8, Reject::at(RejectReason::VerdictMismatch, marker_at)));
    }
    with_run(VerifierReport::new(Decision::Accept, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tile::atlas_default;

    fn inst(a: &[u64]) -> Instance {
        Instance::new(a.iter().copied()).unwrap()
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(f_of(&CostLedger::with_sizes(1, 2)), 42);
        assert_eq!(f_of(&CostLedger::with_sizes(0, 0)), 10);
        assert_eq!(f_of(&CostLedger::with_sizes(4, 2)), 126);
        assert_eq!(bound_of(0), 0);
        assert_eq!(bound_of(19), 1349);
    }

    #[test]
    fn ceilings_sum_one_below_closed_form() {
        for t in 0..5 {
            for e in 0..5 {
                let l = CostLedger::with_sizes(t, e);
                assert_eq!(l.ceiling_sum() + 1, f_of(&l));
            }
        }
    }

    #[test]
    fn wrong_first_element_costs_one_step() {
        let r = verify(&inst(&[1, 3]), &CandidateList(vec![3]), &atlas_default());
        assert_eq!(
            r.decision,
            Decision::Reject {
                reason: RejectReason::FirstElement,
                step: 1,
                position: 0
            }
        );
        assert_eq!(r.ledger.counters(), [1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn small_square_has_no_machine() {
        let l = CandidateList(vec![2, 1, 1, 7, 1, 3, 7, 3, 1, 7, 3, 3, 5, 4, 4, 25]);
        let r = verify(&inst(&[1, 3]), &l, &atlas_default());
        assert_eq!(r.decision.reason(), Some(RejectReason::NotATuringMachine));
        assert_eq!(r.decision.step(), 6);
        assert_eq!(r.machine_error, Some(NotATuringMachine::NoTip));
        assert!(r.ledger.within_ceilings(), "{:?}", r.ledger);
        assert!(r.total_counted <= r.bound);
    }

    #[test]
    fn zero_generations_cannot_show_a_machine() {
        let l = CandidateList(vec![2, 1, 1, 7, 1, 3, 7, 3, 1, 7, 3, 3, 5, 43]);
        let r = verify(&inst(&[1, 3]), &l, &atlas_default());
        assert_eq!(r.decision.step(), 6);
        assert_eq!(r.ledger.detection, 0);
    }
}
