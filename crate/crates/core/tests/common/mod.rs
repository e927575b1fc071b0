#![allow(dead_code)]

use debilandia::embedding::{direct_state, machine_view, universal_state};
use debilandia::engine::{step, StepOutcome};
use debilandia::grid::GameState;
use debilandia::tm::{head_excursion, tm_step, Config, TmStep};
use debilandia::{Bit, Move, Rule, TmSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BUDGET: usize = 1000;
pub const TAPES_PER_MACHINE: usize = 20;
pub const MAX_TAPE: usize = 12;

pub struct Machine {
    pub name: &'static str,
    pub rules: Vec<Rule>,
    /// Head starts on the last cell instead of a random one.
    pub head_at_end: bool,
}

use Move::{Left, Right};

pub fn corpus() -> Vec<Machine> {
    vec![
        Machine {
            name: "immediate_halter",
            rules: vec![Rule::new(0, 1, 1, 1, Right), Rule::new(1, 1, 1, 1, Right)],
            head_at_end: false,
        },
        Machine {
            name: "right_runner",
            rules: vec![Rule::new(0, 0, 0, 0, Right), Rule::new(1, 0, 1, 0, Right)],
            head_at_end: false,
        },
        Machine {
            name: "incrementer",
            rules: vec![Rule::new(1, 0, 0, 0, Left), Rule::new(0, 0, 1, 1, Left)],
            head_at_end: true,
        },
        Machine {
            name: "oscillator",
            rules: vec![
                Rule::new(0, 0, 0, 1, Right),
                Rule::new(1, 0, 1, 1, Right),
                Rule::new(0, 1, 0, 0, Left),
                Rule::new(1, 1, 1, 0, Left),
            ],
            head_at_end: false,
        },
        Machine {
            // two-state busy beaver; its halting transition is the missing B1 rule
            name: "busy_beaver",
            rules: vec![
                Rule::new(0, 0, 1, 1, Right),
                Rule::new(1, 0, 1, 1, Left),
                Rule::new(0, 1, 1, 0, Left),
            ],
            head_at_end: false,
        },
        Machine {
            name: "eraser",
            rules: vec![Rule::new(1, 0, 0, 0, Right)],
            head_at_end: false,
        },
    ]
}

/// Deterministic tapes of length 1..=MAX_TAPE for `m`.
pub fn tapes(m: &Machine, seed: u64) -> Vec<TmSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..TAPES_PER_MACHINE)
        .map(|_| {
            let len = rng.random_range(1..=MAX_TAPE);
            let tape: Vec<Bit> = (0..len)
                .map(|_| if rng.random() { Bit::One } else { Bit::Zero })
                .collect();
            let head = if m.head_at_end {
                len - 1
            } else {
                rng.random_range(0..len)
            };
            TmSpec::new(m.rules.clone(), Bit::Zero, tape, head).expect("valid machine")
        })
        .collect()
}

/// The spec with enough blanks that the head never leaves the tape
/// within `budget` steps.
pub fn padded(spec: &TmSpec, budget: usize) -> TmSpec {
    let (l, r) = head_excursion(spec, budget);
    spec.padded(l, r)
}

#[derive(Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub ones: Vec<i64>,
    pub state: Bit,
}

fn tm_snapshot(c: &Config) -> Snapshot {
    Snapshot {
        ones: c.ones_from_head(),
        state: c.state,
    }
}

fn engine_snapshot(s: &GameState) -> Snapshot {
    let v = machine_view(s).expect("tip present");
    Snapshot {
        ones: v.ones_from_head(),
        state: v.state.expect("status tile present"),
    }
}

/// Steps the reference machine and the direct embedding side by side.
/// Returns the number of transitions taken and whether the machine halted.
pub fn lockstep(spec: &TmSpec, budget: usize) -> Result<(usize, bool), String> {
    let spec = padded(spec, budget);
    let mut config = spec.initial_config();
    let mut state = direct_state(&spec).map_err(|e| e.to_string())?;
    for i in 0..budget {
        let tm = tm_step(&spec, &config);
        let (next, outcome) = step(&state);
        match (tm, outcome) {
            (TmStep::Halt, StepOutcome::Terminated(_)) => return Ok((i, true)),
            (TmStep::Next(c), StepOutcome::Fired { .. }) => {
                config = c;
                state = next;
                let (want, got) = (tm_snapshot(&config), engine_snapshot(&state));
                if want != got {
                    return Err(format!("step {}: machine {want:?}, engine {got:?}", i + 1));
                }
            }
            (tm, outcome) => {
                return Err(format!(
                    "step {}: machine {}, engine {outcome:?}",
                    i + 1,
                    if matches!(tm, TmStep::Halt) { "halted" } else { "moved" }
                ))
            }
        }
    }
    Ok((budget, false))
}

/// Runs `state` until it terminates or `budget` generations pass.
pub fn run_to_end(mut state: GameState, budget: usize) -> (GameState, usize, bool) {
    for i in 0..budget {
        let (next, outcome) = step(&state);
        if outcome.is_terminated() {
            return (state, i, true);
        }
        state = next;
    }
    (state, budget, false)
}

pub struct UniversalCheck {
    pub load_generations: usize,
    pub rule_count: usize,
    pub direct_tape: Vec<Bit>,
    pub universal_tape: Vec<Bit>,
}

/// Loads the rules from tape tokens, then runs both layouts to halting.
/// Returns `None` for runs that do not halt within `budget`.
pub fn universal_vs_direct(spec: &TmSpec, budget: usize) -> Result<Option<UniversalCheck>, String> {
    let spec = padded(spec, budget);
    let direct = direct_state(&spec).map_err(|e| e.to_string())?;
    let (direct_end, _, halted) = run_to_end(direct, budget);
    if !halted {
        return Ok(None);
    }

    let mut u = universal_state(&spec, &spec.tape, spec.head).map_err(|e| e.to_string())?;
    let k = spec.rules().len();
    let mut loading = 0;
    loop {
        let (next, outcome) = step(&u);
        match outcome {
            StepOutcome::RuleCopied { .. } => {
                loading += 1;
                u = next;
            }
            _ => break,
        }
        if loading > 5 * k {
            return Err(format!("loading ran past {} generations", 5 * k));
        }
    }
    let (u_end, _, u_halted) = run_to_end(u, budget);
    if !u_halted {
        return Err("universal layout did not halt".into());
    }
    let tape = |s: &GameState| machine_view(s).expect("tip").tape;
    Ok(Some(UniversalCheck {
        load_generations: loading,
        rule_count: k,
        direct_tape: tape(&direct_end),
        universal_tape: tape(&u_end),
    }))
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn accept1() -> (debilandia::Instance, debilandia::CandidateList) {
    debilandia::instance::InstanceFile::load(fixture("accept1.json")).expect("accept1 fixture")
}

/// Sets listed in `small_sets.json`.
pub fn small_sets() -> Vec<debilandia::Instance> {
    #[derive(serde::Deserialize)]
    struct Sets {
        sets: Vec<Vec<u64>>,
    }
    let text = std::fs::read_to_string(fixture("small_sets.json")).expect("small_sets fixture");
    let sets: Sets = serde_json::from_str(&text).expect("small_sets json");
    sets.sets
        .into_iter()
        .map(|a| debilandia::Instance::new(a).expect("valid set"))
        .collect()
}

/// One targeted break of an accepted list per structural condition, with
/// the reason the verifier must give.
pub fn mutations(list: &[u64]) -> Vec<(&'static str, Vec<u64>, debilandia::RejectReason)> {
    use debilandia::RejectReason::*;
    let five = list.iter().position(|&v| v == 5).expect("terminator");
    let a0 = list[1];
    let mut out = Vec::new();

    let mut l = list.to_vec();
    l[0] = 3;
    out.push(("wrong first element", l, FirstElement));

    let mut l = list.to_vec();
    l.insert(3, a0);
    out.push(("three members in a pair", l, TupleShape));

    let mut l = list.to_vec();
    l.remove(2);
    out.push(("one member in a pair", l, TupleShape));

    let mut l = list.to_vec();
    l[4] = list[1];
    l[5] = list[2];
    out.push(("duplicate pair", l, DuplicateTuple));

    let mut l = list.to_vec();
    l.drain(1..4);
    out.push(("missing pair", l, MissingTuple));

    let mut l = list.to_vec();
    l.remove(five);
    out.push(("missing 5", l, MissingTerminator));

    let mut l = list.to_vec();
    l.insert(five + 1, a0);
    out.push(("non-4 in the run", l, NotGeneration));

    let mut l = list.to_vec();
    *l.last_mut().unwrap() = 7;
    out.push(("wrong marker", l, MissingVerdict));

    let mut l = list.to_vec();
    *l.last_mut().unwrap() = 43;
    out.push(("marker contradicts the game", l, VerdictMismatch));

    let mut l = list.to_vec();
    l.push(25);
    out.push(("trailing element", l, TrailingElement));

    out
}
