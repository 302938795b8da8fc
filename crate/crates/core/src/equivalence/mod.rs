//! Equivalence relations on instruction sequences.
//!
//! Four generator relations: behavioural equivalence (equal threads), bit
//! exchange on auxiliary registers, auxiliary register renumbering, and
//! transposition of independent adjacent actions. Their transitive closure
//! is structural algorithmic equivalence (`sa`). Replacing behavioural
//! equivalence by computational trace equivalence (`ct`, equal tracked
//! behaviour for every input) gives structural computational equivalence
//! (`sc`).
//!
//! Every query answers with a [`Verdict`]: a replayable witness, a
//! certificate, or an honest "unknown" when the budget runs out.

pub mod group;
pub mod oracle;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Serialize, Serializer};

use crate::pga::{FocusKind, Instruction, InstructionSeq, Permutation, Profile};
use crate::semantics::{all_bits, bits_to_string, Bits};
use crate::services::{tracking_use, ServiceFamily};
use crate::thread::{
    extract, parse_term, thread_bit_exchange, thread_renumber, Action, Node, Thread, TreePath,
};

pub use oracle::{universe_closure, Partition, Universe, UniverseBounds, UniverseError};
pub use search::{
    structurally_algorithmically_equivalent, structurally_computationally_equivalent, sa_threads,
    sc_threads, transposition_equivalent, transposition_threads, ScSearch,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Relation {
    Behavioural,
    BitExchange,
    Renumbering,
    Transposition,
    StructuralAlgorithmic,
    ComputationalTrace,
    StructuralComputational,
}

impl Relation {
    pub const ALL: [Relation; 7] = [
        Relation::Behavioural,
        Relation::BitExchange,
        Relation::Renumbering,
        Relation::Transposition,
        Relation::StructuralAlgorithmic,
        Relation::ComputationalTrace,
        Relation::StructuralComputational,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Relation::Behavioural => "b",
            Relation::BitExchange => "x",
            Relation::Renumbering => "r",
            Relation::Transposition => "t",
            Relation::StructuralAlgorithmic => "sa",
            Relation::ComputationalTrace => "ct",
            Relation::StructuralComputational => "sc",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Relation::ALL
            .into_iter()
            .find(|r| r.short_name() == s)
            .ok_or_else(|| format!("unknown relation {:?}; expected one of b, x, r, t, sa, ct, sc", s))
    }
}

/// One step of a witness, acting on threads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    BitExchange(BTreeSet<u32>),
    Renumber(Permutation),
    Transpose(TreePath),
    /// Step between sequences with the same thread; the identity on threads.
    Behaviour,
    /// Replaces a subtree that no input valuation reaches.
    DeadBranch { path: TreePath, replacement: Thread },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::BitExchange(set) => {
                let parts: Vec<String> = set.iter().map(u32::to_string).collect();
                write!(f, "xchg {{{}}}", parts.join(","))
            }
            Move::Renumber(p) => write!(f, "renum {}", p),
            Move::Transpose(path) => write!(f, "swap @path {}", path),
            Move::Behaviour => f.write_str("beh"),
            Move::DeadBranch { path, replacement } => write!(f, "dead @path {} {}", path, replacement),
        }
    }
}

impl Serialize for Move {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("line {line}: cannot parse move {text:?}: {reason}")]
    Parse { line: usize, text: String, reason: String },
    #[error("move {index} ({text}): {reason}")]
    Inapplicable { index: usize, text: String, reason: String },
    #[error("replay ends at a different thread than the target")]
    WrongTarget,
}

impl FromStr for Move {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "beh" {
            return Ok(Move::Behaviour);
        }
        if let Some(rest) = s.strip_prefix("xchg") {
            let inner = rest
                .trim()
                .strip_prefix('{')
                .and_then(|r| r.strip_suffix('}'))
                .ok_or("expected xchg {i,j,...}")?;
            let set = inner
                .split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(|p| match p.parse::<u32>() {
                    Ok(0) | Err(_) => Err(format!("bad register index {:?}", p)),
                    Ok(v) => Ok(v),
                })
                .collect::<Result<BTreeSet<u32>, _>>()?;
            return Ok(Move::BitExchange(set));
        }
        if let Some(rest) = s.strip_prefix("renum") {
            return rest.parse::<Permutation>().map(Move::Renumber).map_err(|e| e.to_string());
        }
        if let Some(rest) = s.strip_prefix("swap @path") {
            return rest.trim().parse::<TreePath>().map(Move::Transpose);
        }
        if let Some(rest) = s.strip_prefix("dead @path") {
            let rest = rest.trim();
            let (path, term) = rest.split_once(char::is_whitespace).ok_or("expected a path and a thread term")?;
            return Ok(Move::DeadBranch {
                path: path.parse()?,
                replacement: parse_term(term).map_err(|e| e.to_string())?,
            });
        }
        Err("unknown move".into())
    }
}

impl Move {
    /// Applies a move that needs no knowledge of the input registers.
    pub fn apply_basic(&self, t: Thread) -> Result<Thread, String> {
        match self {
            Move::BitExchange(set) => thread_bit_exchange(t, set).map_err(|e| e.to_string()),
            Move::Renumber(p) => Ok(thread_renumber(t, p)),
            Move::Transpose(path) => t.transpose_at(path).ok_or_else(|| format!("no transposition redex at {}", path)),
            Move::Behaviour => Ok(t),
            Move::DeadBranch { .. } => Err("dead-branch rewrites need the input count".into()),
        }
    }

    /// Applies the move; dead-branch rewrites are checked against the `inputs` input registers.
    pub fn apply(&self, t: Thread, inputs: u32) -> Result<Thread, String> {
        match self {
            Move::DeadBranch { path, replacement } => {
                if !is_input_unreachable(t, inputs, path) {
                    return Err(format!("position {} is reachable for some input", path));
                }
                t.replace_at(path, *replacement).ok_or_else(|| format!("no position {}", path))
            }
            other => other.apply_basic(t),
        }
    }
}

pub fn render_witness(moves: &[Move]) -> String {
    moves.iter().map(|m| format!("{}\n", m)).collect()
}

pub fn parse_witness(text: &str) -> Result<Vec<Move>, ReplayError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with("//"))
        .map(|(i, l)| {
            l.parse::<Move>().map_err(|reason| ReplayError::Parse {
                line: i + 1,
                text: l.to_string(),
                reason,
            })
        })
        .collect()
}

/// Replays `moves` from `start`, returning the final thread.
pub fn replay(start: Thread, moves: &[Move], inputs: u32) -> Result<Thread, ReplayError> {
    moves.iter().enumerate().try_fold(start, |t, (i, m)| {
        m.apply(t, inputs).map_err(|reason| ReplayError::Inapplicable {
            index: i + 1,
            text: m.to_string(),
            reason,
        })
    })
}

/// Replays `moves` from `start` and checks that they end at `target`.
pub fn check_witness(start: Thread, target: Thread, moves: &[Move], inputs: u32) -> Result<(), ReplayError> {
    if replay(start, moves, inputs)? == target {
        Ok(())
    } else {
        Err(ReplayError::WrongTarget)
    }
}

/// Search limits. Exceeding either yields [`Verdict::Unknown`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_states: usize,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_states: 1_000_000,
            max_time: Duration::from_secs(10),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BudgetReport {
    pub states_explored: usize,
    pub max_states: usize,
    pub max_millis: u64,
    pub reason: String,
}

impl fmt::Display for BudgetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} after {} states (limits: {} states, {} s)",
            self.reason, self.states_explored, self.max_states, self.max_millis as f64 / 1000.0
        )
    }
}

/// A quantity preserved by every move of the relation, with differing values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Certificate {
    DistinctThreads,
    LengthMismatch { left: usize, right: usize },
    NoBitExchange,
    NoRenumbering { position: usize, reason: String },
    Depth { left: u32, right: u32 },
    LeafCounts { left: (String, String), right: (String, String) },
    ActionSet { left: Vec<String>, right: Vec<String> },
    ClassExhausted { states: usize },
    TraceDiffers { input: String },
    OracleSeparated { bounds: UniverseBounds },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::DistinctThreads => f.write_str("the extracted threads differ"),
            Certificate::LengthMismatch { left, right } => write!(f, "lengths differ: {} vs {}", left, right),
            Certificate::NoBitExchange => f.write_str("no set of auxiliary registers maps one sequence to the other"),
            Certificate::NoRenumbering { position, reason } => write!(f, "no renumbering: instruction {}: {}", position, reason),
            Certificate::Depth { left, right } => write!(f, "depth differs: {} vs {}", left, right),
            Certificate::LeafCounts { left, right } => write!(
                f,
                "leaf counts (S, D) differ: ({}, {}) vs ({}, {})",
                left.0, left.1, right.0, right.1
            ),
            Certificate::ActionSet { left, right } => write!(
                f,
                "action sets differ: {{{}}} vs {{{}}}",
                left.join(", "),
                right.join(", ")
            ),
            Certificate::ClassExhausted { states } => {
                write!(f, "the equivalence class of the left side ({} threads) was exhausted", states)
            }
            Certificate::TraceDiffers { input } => write!(f, "tracked behaviour differs for input {}", input),
            Certificate::OracleSeparated { bounds } => write!(f, "separated by the bounded-universe oracle ({})", bounds),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Equivalent { witness: Vec<Move> },
    Inequivalent { certificate: Certificate },
    Unknown { report: BudgetReport },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }

    pub fn is_inequivalent(&self) -> bool {
        matches!(self, Verdict::Inequivalent { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Equivalent { .. } => "equivalent",
            Verdict::Inequivalent { .. } => "inequivalent",
            Verdict::Unknown { .. } => "unknown",
        }
    }

    pub fn witness(&self) -> Option<&[Move]> {
        match self {
            Verdict::Equivalent { witness } => Some(witness),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EquivError {
    #[error("profile mismatch: {0} vs {1}")]
    ProfileMismatch(Profile, Profile),
}

fn same_profile(x: &InstructionSeq, y: &InstructionSeq) -> Result<(), EquivError> {
    if x.profile() == y.profile() {
        Ok(())
    } else {
        Err(EquivError::ProfileMismatch(x.profile(), y.profile()))
    }
}

pub fn behaviourally_equivalent(x: &InstructionSeq, y: &InstructionSeq) -> bool {
    extract(x) == extract(y)
}

/// A set `I` of used auxiliary indices of `x` with `χ_I(x) = y`, if any.
pub fn bit_exchange_equivalent(x: &InstructionSeq, y: &InstructionSeq) -> Option<BTreeSet<u32>> {
    if x.len() != y.len() {
        return None;
    }
    // the flipped registers are exactly those whose instructions differ
    let mut flip = BTreeSet::new();
    for (a, b) in x.items().iter().zip(y.items()) {
        if a != b {
            if let Some(ba) = a.basic() {
                if ba.focus.is_aux() {
                    flip.insert(ba.focus.index());
                }
            }
        }
    }
    (x.bit_exchange(&flip) == *y).then_some(flip)
}

/// A permutation `π` with `ρ_π(x) = y`, found by matching positions.
pub fn renumber_equivalent(x: &InstructionSeq, y: &InstructionSeq) -> Result<Permutation, Certificate> {
    if x.len() != y.len() {
        return Err(Certificate::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let mut forward: BTreeMap<u32, u32> = BTreeMap::new();
    let mut backward: BTreeMap<u32, u32> = BTreeMap::new();
    for (pos, (a, b)) in x.items().iter().zip(y.items()).enumerate() {
        let fail = |reason: String| Certificate::NoRenumbering {
            position: pos + 1,
            reason,
        };
        let same_shape = matches!(
            (a, b),
            (Instruction::Plain(_), Instruction::Plain(_))
                | (Instruction::PosTest(_), Instruction::PosTest(_))
                | (Instruction::NegTest(_), Instruction::NegTest(_))
        );
        match (a.basic(), b.basic()) {
            (Some(ba), Some(bb)) if same_shape && ba.method == bb.method && ba.focus.kind() == bb.focus.kind() => {
                if ba.focus.kind() != FocusKind::Auxiliary {
                    if ba.focus != bb.focus {
                        return Err(fail(format!("{} vs {}", a, b)));
                    }
                    continue;
                }
                let (i, j) = (ba.focus.index(), bb.focus.index());
                if *forward.entry(i).or_insert(j) != j {
                    return Err(fail(format!("aux:{} would map to both aux:{} and aux:{}", i, forward[&i], j)));
                }
                if *backward.entry(j).or_insert(i) != i {
                    return Err(fail(format!("aux:{} and aux:{} would both map to aux:{}", backward[&j], i, j)));
                }
            }
            _ => {
                if a != b {
                    return Err(fail(format!("{} vs {}", a, b)));
                }
            }
        }
    }
    Ok(Permutation::completing(&forward))
}

/// The input register family holding `bits`.
pub fn input_family(bits: &[bool]) -> ServiceFamily {
    ServiceFamily::registers(FocusKind::Input, bits)
}

/// Tracked behaviour for every input valuation, in valuation order.
pub fn ct_signature(t: Thread, inputs: u32) -> Vec<Thread> {
    all_bits(inputs).iter().map(|b| tracking_use(t, &input_family(b))).collect()
}

/// First input valuation on which the tracked behaviours differ.
pub fn ct_counterexample(tx: Thread, ty: Thread, inputs: u32) -> Option<Bits> {
    all_bits(inputs)
        .into_iter()
        .find(|b| tracking_use(tx, &input_family(b)) != tracking_use(ty, &input_family(b)))
}

pub fn computational_trace_equivalent(x: &InstructionSeq, y: &InstructionSeq) -> bool {
    ct_counterexample(extract(x), extract(y), x.profile().inputs.max(y.profile().inputs)).is_none()
}

/// Roots of the maximal subtrees that no input valuation reaches. Branching
/// on a non-input action visits both branches.
pub fn input_unreachable_nodes(t: Thread, inputs: u32) -> Vec<TreePath> {
    fn go(t: Thread, inputs: u32, fixed: &mut Vec<Option<bool>>, path: &mut TreePath, out: &mut Vec<TreePath>) {
        let Node::Post(a, x, y) = t.node() else {
            return;
        };
        let b = a.instruction();
        let input = match a {
            Action::Basic(_) if b.focus.kind() == FocusKind::Input && b.focus.index() <= inputs => {
                Some(b.focus.index() as usize - 1)
            }
            _ => None,
        };
        let reachable = |branch_value: bool, fixed: &Vec<Option<bool>>| match input {
            Some(i) => fixed[i].is_none_or(|v| v == branch_value),
            None => true,
        };
        for (child, value, branch) in [(x, true, crate::thread::Branch::True), (y, false, crate::thread::Branch::False)] {
            if matches!(a, Action::Traced(..)) && branch == crate::thread::Branch::False {
                // traced nodes always continue on the true branch
                out.push(path.child(branch));
                continue;
            }
            path.0.push(branch);
            if reachable(value, fixed) {
                let saved = input.map(|i| fixed[i]);
                if let Some(i) = input {
                    fixed[i] = Some(value);
                }
                go(child, inputs, fixed, path, out);
                if let (Some(i), Some(s)) = (input, saved) {
                    fixed[i] = s;
                }
            } else {
                out.push(path.clone());
            }
            path.0.pop();
        }
    }
    let mut out = Vec::new();
    go(t, inputs, &mut vec![None; inputs as usize], &mut TreePath::root(), &mut out);
    out
}

/// Whether the position at `path` lies inside a subtree no input valuation reaches.
pub fn is_input_unreachable(t: Thread, inputs: u32, path: &TreePath) -> bool {
    if t.at(path).is_none() {
        return false;
    }
    let mut fixed: Vec<Option<bool>> = vec![None; inputs as usize];
    let mut cur = t;
    for &branch in &path.0 {
        let Node::Post(a, x, y) = cur.node() else {
            return false;
        };
        let value = branch == crate::thread::Branch::True;
        match a {
            Action::Traced(..) if !value => return true,
            Action::Basic(b) if b.focus.kind() == FocusKind::Input && b.focus.index() <= inputs => {
                let i = b.focus.index() as usize - 1;
                if fixed[i].is_some_and(|v| v != value) {
                    return true;
                }
                fixed[i] = Some(value);
            }
            _ => {}
        }
        cur = if value { x } else { y };
    }
    false
}

/// Dead-branch rewrites turning `from` into `to`, valid when the two threads
/// are computationally trace equivalent; `None` otherwise.
pub fn dead_branch_moves(from: Thread, to: Thread, inputs: u32) -> Option<Vec<Move>> {
    let mut moves = Vec::new();
    let mut cur = from;
    for path in input_unreachable_nodes(from, inputs) {
        let replacement = to.at(&path)?;
        if cur.at(&path) != Some(replacement) {
            cur = cur.replace_at(&path, replacement)?;
            moves.push(Move::DeadBranch { path, replacement });
        }
    }
    (cur == to).then_some(moves)
}

/// Decides or semi-decides `relation` between two sequences of the same profile.
pub fn decide(relation: Relation, x: &InstructionSeq, y: &InstructionSeq, budget: Budget) -> Result<Verdict, EquivError> {
    same_profile(x, y)?;
    let inputs = x.profile().inputs;
    Ok(match relation {
        Relation::Behavioural => {
            if behaviourally_equivalent(x, y) {
                Verdict::Equivalent {
                    witness: if x == y { vec![] } else { vec![Move::Behaviour] },
                }
            } else {
                Verdict::Inequivalent {
                    certificate: Certificate::DistinctThreads,
                }
            }
        }
        Relation::BitExchange => match bit_exchange_equivalent(x, y) {
            Some(set) if set.is_empty() => Verdict::Equivalent { witness: vec![] },
            Some(set) => Verdict::Equivalent {
                witness: vec![Move::BitExchange(set)],
            },
            None => Verdict::Inequivalent {
                certificate: if x.len() == y.len() {
                    Certificate::NoBitExchange
                } else {
                    Certificate::LengthMismatch {
                        left: x.len(),
                        right: y.len(),
                    }
                },
            },
        },
        Relation::Renumbering => match renumber_equivalent(x, y) {
            Ok(p) if p.is_identity() => Verdict::Equivalent { witness: vec![] },
            Ok(p) => Verdict::Equivalent {
                witness: vec![Move::Renumber(p)],
            },
            Err(certificate) => Verdict::Inequivalent { certificate },
        },
        Relation::Transposition => transposition_equivalent(x, y, budget)?,
        Relation::StructuralAlgorithmic => structurally_algorithmically_equivalent(x, y, budget)?,
        Relation::ComputationalTrace => {
            let (tx, ty) = (extract(x), extract(y));
            match ct_counterexample(tx, ty, inputs) {
                None => Verdict::Equivalent {
                    witness: dead_branch_moves(tx, ty, inputs).expect("trace-equivalent threads differ only in dead branches"),
                },
                Some(b) => Verdict::Inequivalent {
                    certificate: Certificate::TraceDiffers {
                        input: bits_to_string(&b),
                    },
                },
            }
        }
        Relation::StructuralComputational => structurally_computationally_equivalent(x, y, budget)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pga::parse;

    fn seq(text: &str) -> InstructionSeq {
        parse(text, Profile::new(1, 1)).unwrap()
    }

    fn set(items: &[u32]) -> BTreeSet<u32> {
        items.iter().copied().collect()
    }

    const UNSAT_X: &str = "+in:1.get; #2; #5; +in:1.get; #3; out:1.set:1; !; out:1.set:0; !";
    const UNSAT_Y: &str = "+in:1.get; #2; #5; +in:1.get; #3; out:1.set:0; !; out:1.set:0; !";

    #[test]
    fn behavioural_examples() {
        assert!(behaviourally_equivalent(&seq("#1; !"), &seq("!")));
        assert!(!behaviourally_equivalent(&seq("out:1.set:1; !"), &seq("out:1.set:0; !")));
        assert!(behaviourally_equivalent(&seq(UNSAT_X), &seq(UNSAT_X)));
    }

    #[test]
    fn bit_exchange_examples() {
        assert_eq!(bit_exchange_equivalent(&seq("aux:1.set:0; !"), &seq("aux:1.set:1; !")), Some(set(&[1])));
        // the pair the literature presents as not structurally equivalent
        let x = seq("out:1.set:0; aux:1.set:0; !");
        let y = seq("out:1.set:0; aux:1.set:1; !");
        assert_eq!(bit_exchange_equivalent(&x, &y), Some(set(&[1])));
        assert_eq!(bit_exchange_equivalent(&x, &x), Some(set(&[])));
        assert_eq!(bit_exchange_equivalent(&seq("aux:1.get; !"), &seq("aux:2.get; !")), None);
        assert_eq!(bit_exchange_equivalent(&seq("in:1.get; !"), &seq("!")), None);
    }

    #[test]
    fn renumber_examples() {
        assert_eq!(
            renumber_equivalent(&seq("aux:2.get; !"), &seq("aux:1.get; !")),
            Ok(Permutation::swap(1, 2))
        );
        assert!(renumber_equivalent(&seq("aux:1.get; aux:1.get; !"), &seq("aux:1.get; aux:2.get; !")).is_err());
        assert!(renumber_equivalent(&seq("aux:1.get; aux:2.get; !"), &seq("aux:1.get; aux:1.get; !")).is_err());
        assert_eq!(renumber_equivalent(&seq(UNSAT_X), &seq(UNSAT_X)), Ok(Permutation::identity()));
        assert!(renumber_equivalent(&seq("+aux:1.get; !"), &seq("-aux:1.get; !")).is_err());
    }

    #[test]
    fn computational_trace_examples() {
        assert!(computational_trace_equivalent(&seq("#1; !"), &seq("!")));
        assert!(computational_trace_equivalent(&seq(UNSAT_X), &seq(UNSAT_Y)));
        assert!(!computational_trace_equivalent(&seq("out:1.set:1; !"), &seq("out:1.set:0; !")));
    }

    #[test]
    fn unreachable_positions() {
        assert!(input_unreachable_nodes(Thread::stop(), 1).is_empty());
        let t = extract(&seq(UNSAT_X));
        let dead = input_unreachable_nodes(t, 1);
        assert_eq!(dead, vec!["0.1".parse::<TreePath>().unwrap()]);
        let out = crate::pga::BasicInstruction::new(crate::pga::Focus::output(1), crate::pga::Method::Set1);
        assert_eq!(t.at(&dead[0]), Some(Thread::prefix(Action::Basic(out), Thread::stop())));
        assert!(input_unreachable_nodes(extract(&seq("+aux:1.get; out:1.set:1; !")), 1).is_empty());
        assert!(is_input_unreachable(t, 1, &"0.1.0".parse().unwrap()));
        assert!(!is_input_unreachable(t, 1, &"0.0".parse().unwrap()));
    }

    #[test]
    fn moves_print_and_parse() {
        let moves = vec![
            Move::BitExchange(set(&[1, 3])),
            Move::Renumber(Permutation::swap(1, 2)),
            Move::Transpose("0.1".parse().unwrap()),
            Move::Behaviour,
            Move::DeadBranch {
                path: "0.1".parse().unwrap(),
                replacement: extract(&seq("out:1.set:0; !")),
            },
        ];
        let text = render_witness(&moves);
        assert_eq!(
            text,
            "xchg {1,3}\nrenum (1 2)\nswap @path 0.1\nbeh\ndead @path 0.1 out:1.set:0(S, S)\n"
        );
        assert_eq!(parse_witness(&text).unwrap(), moves);
        assert!(parse_witness("jump 3").is_err());
    }

    #[test]
    fn ct_witness_replays() {
        let (x, y) = (seq(UNSAT_X), seq(UNSAT_Y));
        let v = decide(Relation::ComputationalTrace, &x, &y, Budget::default()).unwrap();
        let w = v.witness().unwrap();
        assert!(matches!(w[0], Move::DeadBranch { .. }));
        check_witness(extract(&x), extract(&y), w, 1).unwrap();
        // a dead-branch move at a reachable position is rejected
        let bad = [Move::DeadBranch {
            path: "1".parse().unwrap(),
            replacement: Thread::stop(),
        }];
        assert!(replay(extract(&x), &bad, 1).is_err());
    }

    #[test]
    fn profile_mismatch_is_an_error() {
        let x = parse("!", Profile::new(1, 1)).unwrap();
        let y = parse("!", Profile::new(2, 1)).unwrap();
        assert!(decide(Relation::StructuralAlgorithmic, &x, &y, Budget::default()).is_err());
    }
}
