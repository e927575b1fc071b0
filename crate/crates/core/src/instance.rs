//! Problem instances and certificate lists.
//!
//! A certificate has the shape
//!
//! ```text
//!   2  a b  7  a b  7 ... a b  5  4 4 ... 4  (25 | 43)
//! ```
//!
//! with every ordered pair of `A × A` appearing exactly once, a 7 between
//! consecutive pairs, one 4 per generation and a closing verdict marker:
//! 25 when the game stops, 43 when it does not.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tile::Point;

pub const START: u64 = 2;
pub const SEPARATOR: u64 = 7;
pub const TUPLES_END: u64 = 5;
pub const GENERATION: u64 = 4;
pub const STOPS: u64 = 25;
pub const RUNS_ON: u64 = 43;

/// Values reserved for markers; they may not appear in `A`.
pub const MARKERS: [u64; 6] = [GENERATION, STOPS, RUNS_ON, SEPARATOR, TUPLES_END, START];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("set A is empty")]
    Empty,
    #[error("{0} is not a positive integer")]
    NotPositive(u64),
    #[error("{0} is a reserved marker value")]
    Marker(u64),
    #[error("{0} appears twice in A")]
    Repeated(u64),
}

/// The set `A`, kept in ascending order. `B` is `A` plus the markers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    a: Vec<u64>,
}

impl Instance {
    pub fn new(values: impl IntoIterator<Item = u64>) -> Result<Instance, InstanceError> {
        let mut a: Vec<u64> = values.into_iter().collect();
        if a.is_empty() {
            return Err(InstanceError::Empty);
        }
        a.sort_unstable();
        for (i, &v) in a.iter().enumerate() {
            if v == 0 {
                return Err(InstanceError::NotPositive(v));
            }
            if MARKERS.contains(&v) {
                return Err(InstanceError::Marker(v));
            }
            if i > 0 && a[i - 1] == v {
                return Err(InstanceError::Repeated(v));
            }
        }
        Ok(Instance { a })
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    /// `M = |A|`.
    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn b(&self) -> Vec<u64> {
        let mut b: Vec<u64> = self.a.iter().copied().chain(MARKERS).collect();
        b.sort_unstable();
        b
    }

    pub fn in_a(&self, v: u64) -> bool {
        self.a.binary_search(&v).is_ok()
    }

    pub fn in_b(&self, v: u64) -> bool {
        MARKERS.contains(&v) || self.in_a(v)
    }
}

impl FromStr for Instance {
    type Err = String;

    /// Comma-separated values, e.g. `"1,3"`.
    fn from_str(s: &str) -> Result<Instance, String> {
        let values = s
            .split(',')
            .map(|t| t.trim())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u64>().map_err(|e| format!("`{t}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        Instance::new(values).map_err(|e| e.to_string())
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// A candidate certificate `L`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CandidateList(pub Vec<u64>);

impl CandidateList {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Canonical one-line text: space-separated integers.
    pub fn to_text(&self) -> String {
        self.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    }
}

impl FromStr for CandidateList {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<CandidateList, Self::Err> {
        s.split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map(CandidateList)
    }
}

impl fmt::Display for CandidateList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// 25: the game stops.
    Stops,
    /// 43: the game does not stop.
    RunsOn,
}

impl Verdict {
    pub fn marker(self) -> u64 {
        match self {
            Verdict::Stops => STOPS,
            Verdict::RunsOn => RUNS_ON,
        }
    }

    pub fn from_marker(v: u64) -> Option<Verdict> {
        match v {
            STOPS => Some(Verdict::Stops),
            RUNS_ON => Some(Verdict::RunsOn),
            _ => None,
        }
    }
}

/// Why a list was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    /// Element outside `B`.
    NotInSetB,
    /// First element is not 2.
    FirstElement,
    /// A pair group without exactly two members of `A`.
    TupleShape,
    /// A pair appears twice.
    DuplicateTuple,
    /// Pairs do not cover `A × A`.
    MissingTuple,
    /// No 5 after the last pair.
    MissingTerminator,
    /// Something other than 4 inside the generation run.
    NotGeneration,
    /// List ends before a verdict marker.
    MissingVerdict,
    /// Anything after the verdict marker.
    TrailingElement,
    /// The placed points do not build a Turing machine.
    NotATuringMachine,
    /// Verdict marker disagrees with the game.
    VerdictMismatch,
}

impl RejectReason {
    /// The numbered problem condition this reason violates, if any.
    pub fn condition(self) -> Option<u8> {
        match self {
            RejectReason::NotInSetB => None,
            RejectReason::FirstElement => Some(1),
            RejectReason::TupleShape => Some(2),
            RejectReason::DuplicateTuple | RejectReason::MissingTuple => Some(3),
            RejectReason::MissingTerminator => Some(4),
            RejectReason::NotGeneration => Some(5),
            RejectReason::NotATuringMachine => Some(6),
            RejectReason::MissingVerdict | RejectReason::TrailingElement | RejectReason::VerdictMismatch => Some(7),
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = serde_json::to_value(self).expect("unit variant");
        match self.condition() {
            Some(c) => write!(f, "condition {c}: {}", name.as_str().unwrap_or_default()),
            None => write!(f, "{}", name.as_str().unwrap_or_default()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error, Serialize)]
#[error("{reason} at position {position}")]
pub struct Reject {
    pub reason: RejectReason,
    /// Index into `L`.
    pub position: usize,
}

impl Reject {
    pub fn at(reason: RejectReason, position: usize) -> Reject {
        Reject { reason, position }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedCertificate {
    pub tuples: Vec<(u64, u64)>,
    /// `E`, the number of 4s.
    pub gen_count: usize,
    pub verdict: Verdict,
}

impl ParsedCertificate {
    /// `T`
    pub fn t(&self) -> usize {
        self.tuples.len()
    }

    /// `P = 2T`
    pub fn p(&self) -> usize {
        2 * self.t()
    }

    /// Input-size bookkeeping `N = P + E + T + 4`.
    pub fn n(&self) -> usize {
        self.p() + self.gen_count + self.t() + 4
    }

    /// Actual length of the list, `3T + E + 2`.
    pub fn list_len(&self) -> usize {
        3 * self.t() + self.gen_count + 2
    }

    pub fn to_list(&self) -> CandidateList {
        build_list(&self.tuples, self.gen_count, self.verdict)
    }

    pub fn points(&self) -> BTreeSet<Point> {
        tuples_to_points(&self.tuples)
    }
}

/// Assembles a certificate list from its parts.
pub fn build_list(tuples: &[(u64, u64)], gen_count: usize, verdict: Verdict) -> CandidateList {
    let mut l = vec![START];
    for (i, (a, b)) in tuples.iter().enumerate() {
        if i > 0 {
            l.push(SEPARATOR);
        }
        l.extend([*a, *b]);
    }
    l.push(TUPLES_END);
    l.extend(std::iter::repeat_n(GENERATION, gen_count));
    l.push(verdict.marker());
    CandidateList(l)
}

/// All ordered pairs of `A`, lexicographic over ascending `A`.
pub fn enumerate_tuples(inst: &Instance) -> Vec<(u64, u64)> {
    let a = inst.a();
    a.iter().flat_map(|&x| a.iter().map(move |&y| (x, y))).collect()
}

/// One lattice point per pair: first element is x, second is y.
pub fn tuples_to_points(tuples: &[(u64, u64)]) -> BTreeSet<Point> {
    tuples.iter().map(|&(x, y)| Point::new(x as i64, y as i64)).collect()
}

/// Staged left-to-right reader over `L`.
///
/// Each stage adds the abstract steps it performs to the counter it is
/// given, so the verifier can charge them to its own steps.
pub struct Scanner<'a> {
    inst: &'a Instance,
    list: &'a [u64],
    pos: usize,
}

impl<'a> Scanner<'a> {
    pub fn new(inst: &'a Instance, list: &'a [u64]) -> Scanner<'a> {
        Scanner { inst, list, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    fn foreign(&self, v: u64) -> Option<Reject> {
        (!self.inst.in_b(v)).then(|| Reject::at(RejectReason::NotInSetB, self.pos))
    }

    /// The list must open with a 2; anything else there, in `B` or not,
    /// violates condition 1.
    pub fn start(&mut self, cost: &mut u64) -> Result<(), Reject> {
        *cost += 1;
        match self.list.first() {
            Some(&START) => {
                self.pos = 1;
                Ok(())
            }
            _ => Err(Reject::at(RejectReason::FirstElement, 0)),
        }
    }

    /// Groups pairs up to and including the 5. `opened` counts the groups
    /// started, including one abandoned by a rejection.
    pub fn tuples(&mut self, cost: &mut u64, opened: &mut usize) -> Result<Vec<(u64, u64)>, Reject> {
        let mut out = Vec::new();
        loop {
            *opened += 1;
            let mut group: Vec<u64> = Vec::with_capacity(2);
            let closer = loop {
                let Some(&v) = self.list.get(self.pos) else {
                    return Err(Reject::at(RejectReason::MissingTerminator, self.pos));
                };
                *cost += 1;
                if v == SEPARATOR || v == TUPLES_END {
                    break v;
                }
                if let Some(r) = self.foreign(v) {
                    return Err(r);
                }
                if self.inst.in_a(v) {
                    group.push(v);
                    if group.len() > 2 {
                        return Err(Reject::at(RejectReason::TupleShape, self.pos));
                    }
                    self.pos += 1;
                    continue;
                }
                let reason = if v == START {
                    RejectReason::TupleShape
                } else {
                    RejectReason::MissingTerminator
                };
                return Err(Reject::at(reason, self.pos));
            };
            *cost += 1;
            if group.len() != 2 {
                return Err(Reject::at(RejectReason::TupleShape, self.pos));
            }
            out.push((group[0], group[1]));
            self.pos += 1;
            if closer == TUPLES_END {
                return Ok(out);
            }
        }
    }

    /// Counts the 4s into `count`; stops without consuming it on the
    /// verdict marker or on the last element, which is left for
    /// [`Scanner::verdict`] to judge. A stray value with more list after it
    /// breaks the run.
    pub fn generations(&mut self, cost: &mut u64, count: &mut usize) -> Result<(), Reject> {
        loop {
            let Some(&v) = self.list.get(self.pos) else {
                return Err(Reject::at(RejectReason::MissingVerdict, self.pos));
            };
            *cost += 1;
            match v {
                GENERATION => {
                    *count += 1;
                    self.pos += 1;
                }
                STOPS | RUNS_ON => return Ok(()),
                _ if self.inst.in_b(v) && self.pos + 1 == self.list.len() => return Ok(()),
                _ => {
                    return Err(self
                        .foreign(v)
                        .unwrap_or(Reject::at(RejectReason::NotGeneration, self.pos)))
                }
            }
        }
    }

    /// Reads the verdict marker.
    pub fn verdict(&mut self, cost: &mut u64) -> Result<Verdict, Reject> {
        *cost += 1;
        let v = self
            .list
            .get(self.pos)
            .copied()
            .ok_or(Reject::at(RejectReason::MissingVerdict, self.pos))?;
        *cost += 1;
        let verdict = Verdict::from_marker(v).ok_or(Reject::at(RejectReason::MissingVerdict, self.pos))?;
        self.pos += 1;
        Ok(verdict)
    }

    /// Nothing may follow the verdict.
    pub fn finish(&mut self, cost: &mut u64) -> Result<(), Reject> {
        *cost += 1;
        if self.pos < self.list.len() {
            return Err(Reject::at(RejectReason::TrailingElement, self.pos));
        }
        Ok(())
    }
}

/// Pairs must be distinct and cover `A × A`. Charges two steps per pair.
pub fn check_coverage(inst: &Instance, tuples: &[(u64, u64)], cost: &mut u64) -> Result<(), Reject> {
    let mut seen = BTreeSet::new();
    for (i, t) in tuples.iter().enumerate() {
        *cost += 2;
        if !seen.insert(*t) {
            return Err(Reject::at(RejectReason::DuplicateTuple, 1 + 3 * i));
        }
    }
    // every pair is drawn from A, so distinct + count M² means full coverage
    if tuples.len() != inst.m() * inst.m() {
        return Err(Reject::at(RejectReason::MissingTuple, 3 * tuples.len()));
    }
    Ok(())
}

/// Structural parse of `L` against `inst`.
pub fn parse_certificate(inst: &Instance, list: &CandidateList) -> Result<ParsedCertificate, Reject> {
    let mut cost = 0;
    let mut opened = 0;
    let mut scan = Scanner::new(inst, &list.0);
    scan.start(&mut cost)?;
    let tuples = scan.tuples(&mut cost, &mut opened)?;
    check_coverage(inst, &tuples, &mut cost)?;
    let mut gen_count = 0;
    scan.generations(&mut cost, &mut gen_count)?;
    let verdict = scan.verdict(&mut cost)?;
    scan.finish(&mut cost)?;
    Ok(ParsedCertificate {
        tuples,
        gen_count,
        verdict,
    })
}

/// Instance file: `{"A": [...], "L": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(rename = "A")]
    pub a: Vec<u64>,
    #[serde(rename = "L")]
    pub l: Vec<u64>,
}

#[derive(Debug, Error)]
pub enum InstanceFileError {
    #[error("instance file: {0}")]
    Io(#[from] std::io::Error),
    #[error("instance file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("instance file: {0}")]
    Instance(#[from] InstanceError),
}

impl InstanceFile {
    pub fn new(inst: &Instance, list: &CandidateList) -> InstanceFile {
        InstanceFile {
            a: inst.a().to_vec(),
            l: list.0.clone(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(Instance, CandidateList), InstanceFileError> {
        InstanceFile::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<(Instance, CandidateList), InstanceFileError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        Ok((Instance::new(file.a)?, CandidateList(file.l)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(a: &[u64]) -> Instance {
        Instance::new(a.iter().copied()).unwrap()
    }

    fn list(v: &[u64]) -> CandidateList {
        CandidateList(v.to_vec())
    }

    const SAMPLE: [u64; 16] = [2, 1, 1, 7, 1, 3, 7, 3, 1, 7, 3, 3, 5, 4, 4, 25];

    #[test]
    fn instance_validation() {
        assert_eq!(Instance::new([]), Err(InstanceError::Empty));
        assert_eq!(Instance::new([0]), Err(InstanceError::NotPositive(0)));
        for m in MARKERS {
            assert_eq!(Instance::new([1, m]), Err(InstanceError::Marker(m)));
        }
        assert_eq!(Instance::new([3, 1, 3]), Err(InstanceError::Repeated(3)));
        let i = inst(&[9, 1, 3]);
        assert_eq!(i.a(), &[1, 3, 9]);
        assert_eq!(i.b().len(), i.m() + 6);
        assert_eq!("1, 3".parse::<Instance>().unwrap(), inst(&[1, 3]));
        assert!("1,x".parse::<Instance>().is_err());
    }

    #[test]
    fn parses_sample_certificate() {
        let p = parse_certificate(&inst(&[1, 3]), &list(&SAMPLE)).unwrap();
        assert_eq!(p.tuples, vec![(1, 1), (1, 3), (3, 1), (3, 3)]);
        assert_eq!((p.t(), p.p(), p.gen_count), (4, 8, 2));
        assert_eq!(p.verdict, Verdict::Stops);
        assert_eq!(p.to_list(), list(&SAMPLE));
        assert_eq!(p.list_len(), SAMPLE.len());
        assert_eq!(p.n(), 8 + 2 + 4 + 4);
    }

    #[test]
    fn first_element_must_be_two() {
        let mut l = SAMPLE;
        l[0] = 3;
        let r = parse_certificate(&inst(&[1, 3]), &list(&l)).unwrap_err();
        assert_eq!(r, Reject::at(RejectReason::FirstElement, 0));
        assert_eq!(r.reason.condition(), Some(1));
        let r = parse_certificate(&inst(&[1, 3]), &list(&[])).unwrap_err();
        assert_eq!(r.reason, RejectReason::FirstElement);
    }

    #[test]
    fn repeated_tuple_is_condition_three() {
        let l = [2, 1, 1, 7, 1, 1, 7, 3, 1, 7, 3, 3, 5, 25];
        let r = parse_certificate(&inst(&[1, 3]), &list(&l)).unwrap_err();
        assert_eq!(r, Reject::at(RejectReason::DuplicateTuple, 4));
        assert_eq!(r.reason.condition(), Some(3));
        let short = [2, 1, 1, 7, 1, 3, 7, 3, 1, 5, 25];
        let r = parse_certificate(&inst(&[1, 3]), &list(&short)).unwrap_err();
        assert_eq!(r.reason, RejectReason::MissingTuple);
    }

    #[test]
    fn structural_rejections() {
        let a = inst(&[1, 3]);
        let cases: [(&[u64], RejectReason, usize); 9] = [
            (&[2, 1, 7, 1, 3, 5, 25], RejectReason::TupleShape, 2),
            (&[2, 1, 1, 1, 5, 25], RejectReason::TupleShape, 3),
            (&[2, 1, 1, 7, 5, 25], RejectReason::TupleShape, 4),
            (&[2, 1, 1, 4, 25], RejectReason::MissingTerminator, 3),
            (&[2, 1, 1], RejectReason::MissingTerminator, 3),
            (&[2, 1, 9, 5, 25], RejectReason::NotInSetB, 2),
            (
                &[2, 1, 1, 7, 1, 3, 7, 3, 1, 7, 3, 3, 5, 4, 7, 25],
                RejectReason::NotGeneration,
                14,
            ),
            (
                &[2, 1, 1, 7, 1, 3, 7, 3, 1, 7, 3, 3, 5, 4, 4],
                RejectReason::MissingVerdict,
                15,
            ),
            (
                &[2, 1, 1, 7, 1, 3, 7, 3, 1, 7, 3, 3, 5, 25, 4],
                RejectReason::TrailingElement,
                14,
            ),
        ];
        for (l, reason, pos) in cases {
            assert_eq!(parse_certificate(&a, &list(l)), Err(Reject::at(reason, pos)), "{l:?}");
        }
    }

    #[test]
    fn zero_generations_is_structurally_fine() {
        let l = [2, 1, 1, 7, 1, 3, 7, 3, 1, 7, 3, 3, 5, 43];
        let p = parse_certificate(&inst(&[1, 3]), &list(&l)).unwrap();
        assert_eq!(p.gen_count, 0);
        assert_eq!(p.verdict, Verdict::RunsOn);
    }

    #[test]
    fn enumeration() {
        assert_eq!(enumerate_tuples(&inst(&[3, 1])), vec![(1, 1), (1, 3), (3, 1), (3, 3)]);
        assert_eq!(enumerate_tuples(&inst(&[9])), vec![(9, 9)]);
        let pool = [1u64, 3, 6, 8, 9];
        for m in 1..=pool.len() {
            let t = enumerate_tuples(&inst(&pool[..m]));
            assert_eq!(t.len(), m * m);
            assert_eq!(t.iter().collect::<BTreeSet<_>>().len(), m * m);
        }
    }

    #[test]
    fn points_use_first_element_as_x() {
        assert_eq!(
            tuples_to_points(&[(1, 3)]).into_iter().collect::<Vec<_>>(),
            vec![Point::new(1, 3)]
        );
        let pts = tuples_to_points(&enumerate_tuples(&inst(&[1, 3])));
        let expect: BTreeSet<Point> = [(1, 1), (1, 3), (3, 1), (3, 3)]
            .into_iter()
            .map(|(x, y)| Point::new(x, y))
            .collect();
        assert_eq!(pts, expect);
    }

    #[test]
    fn text_and_file_forms() {
        let l = list(&SAMPLE);
        assert_eq!(l.to_text(), "2 1 1 7 1 3 7 3 1 7 3 3 5 4 4 25");
        assert_eq!(l.to_text().parse::<CandidateList>().unwrap(), l);
        let f = InstanceFile::new(&inst(&[1, 3]), &l);
        let (i, back) = InstanceFile::parse(&f.to_json()).unwrap();
        assert_eq!(i, inst(&[1, 3]));
        assert_eq!(back, l);
        assert!(InstanceFile::parse(r#"{"A":[4],"L":[]}"#).is_err());
        assert!(InstanceFile::parse(r#"{"A":[1],"L":[-1]}"#).is_err());
    }
}
