//! Breadth-first search over transposition classes, and the `t`, `sa` and
//! `sc` procedures built on it.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::rc::Rc;
use std::time::Instant;

use crate::pga::{compaction_permutation, BasicInstruction, InstructionSeq, Permutation, Profile};
use crate::thread::{
    action_set, aux_first_occurrence, extract, leaf_multiset, thread_renumber, Action, Branch, Node, Thread,
    TreePath,
};

use super::group::{canonical_action_set, elements, group_order, GroupElement};
use super::oracle::{default_universe, UniverseBounds};
use super::{
    ct_counterexample, ct_signature, dead_branch_moves, same_profile, Budget, BudgetReport, Certificate, EquivError,
    Move, Verdict,
};

/// Largest symmetry group for which orbits are enumerated.
const MAX_GROUP: u64 = 50_000;

struct Meter {
    budget: Budget,
    start: Instant,
    states: usize,
}

impl Meter {
    fn new(budget: Budget) -> Meter {
        Meter {
            budget,
            start: Instant::now(),
            states: 0,
        }
    }

    fn report(&self, reason: &str) -> BudgetReport {
        BudgetReport {
            states_explored: self.states,
            max_states: self.budget.max_states,
            max_millis: self.budget.max_time.as_millis() as u64,
            reason: reason.to_string(),
        }
    }

    fn charge(&mut self, n: usize) -> Result<(), BudgetReport> {
        self.states += n;
        if self.states > self.budget.max_states {
            return Err(self.report("state budget exhausted"));
        }
        if self.start.elapsed() > self.budget.max_time {
            return Err(self.report("time budget exhausted"));
        }
        Ok(())
    }
}

/// A transposition class explored breadth-first, with parent links.
#[derive(Default)]
struct SwapTree {
    states: Vec<Thread>,
    parent: Vec<Option<(usize, TreePath)>>,
    root: Vec<usize>,
    index: HashMap<Thread, usize>,
}

enum Explore {
    Found(usize),
    Exhausted,
}

impl SwapTree {
    fn add(&mut self, t: Thread, parent: Option<(usize, TreePath)>, root: usize) -> Option<usize> {
        if self.index.contains_key(&t) {
            return None;
        }
        let i = self.states.len();
        self.states.push(t);
        self.parent.push(parent);
        self.root.push(root);
        self.index.insert(t, i);
        Some(i)
    }

    /// Explores the class of `start` (tagged `root`), stopping at the first
    /// state accepted by `goal`. States already present are not revisited.
    fn explore(
        &mut self,
        start: Thread,
        root: usize,
        meter: &mut Meter,
        goal: &mut dyn FnMut(Thread) -> bool,
    ) -> Result<Explore, BudgetReport> {
        let Some(first) = self.add(start, None, root) else {
            return Ok(Explore::Exhausted);
        };
        meter.charge(1)?;
        if goal(start) {
            return Ok(Explore::Found(first));
        }
        let mut next = first;
        while next < self.states.len() {
            let t = self.states[next];
            let mut paths = Vec::new();
            let _ = crate::thread::for_each_redex(t, |p| {
                paths.push(p.clone());
                ControlFlow::Continue(())
            });
            for p in paths {
                let s = t.transpose_at(&p).expect("redex paths address redexes");
                if let Some(i) = self.add(s, Some((next, p)), root) {
                    meter.charge(1)?;
                    if goal(s) {
                        return Ok(Explore::Found(i));
                    }
                }
            }
            next += 1;
        }
        Ok(Explore::Exhausted)
    }

    /// Swap positions leading from the root of `i`'s search to `i`.
    fn path_to(&self, mut i: usize) -> Vec<TreePath> {
        let mut out = Vec::new();
        while let Some((p, path)) = &self.parent[i] {
            out.push(path.clone());
            i = *p;
        }
        out.reverse();
        out
    }
}

type Moves = Rc<Vec<TreePath>>;

fn prefixed(branch: Branch, moves: &[TreePath]) -> impl Iterator<Item = TreePath> + '_ {
    moves.iter().map(move |p| {
        let mut v = Vec::with_capacity(p.0.len() + 1);
        v.push(branch);
        v.extend_from_slice(&p.0);
        TreePath(v)
    })
}

/// Goal-directed transposition search: makes the roots agree by raising the
/// target's root action, then aligns the branches. Incomplete but sound;
/// every result is a replayable swap sequence.
struct Aligner<'m> {
    meter: &'m mut Meter,
    raised: HashMap<(Thread, BasicInstruction), Option<(Thread, Moves)>>,
    aligned: HashMap<(Thread, Thread), Option<Moves>>,
}

impl<'m> Aligner<'m> {
    fn new(meter: &'m mut Meter) -> Self {
        Aligner {
            meter,
            raised: HashMap::new(),
            aligned: HashMap::new(),
        }
    }

    /// Swaps that bring an action `b` to the root of `t`.
    fn raise(&mut self, t: Thread, b: BasicInstruction) -> Result<Option<(Thread, Moves)>, BudgetReport> {
        if let Some(r) = self.raised.get(&(t, b)) {
            return Ok(r.clone());
        }
        self.meter.charge(1)?;
        let r = match t.node() {
            Node::Post(Action::Basic(a), _, _) if a == b => Some((t, Moves::default())),
            Node::Post(Action::Basic(a), l, r) if a.focus != b.focus => match (self.raise(l, b)?, self.raise(r, b)?) {
                (Some((l2, ml)), Some((r2, mr))) => {
                    let raised = Thread::basic(a, l2, r2).transpose_root().expect("both branches start with b");
                    let moves: Vec<TreePath> = prefixed(Branch::True, &ml)
                        .chain(prefixed(Branch::False, &mr))
                        .chain([TreePath::root()])
                        .collect();
                    self.meter.charge(moves.len())?;
                    Some((raised, Rc::new(moves)))
                }
                _ => None,
            },
            _ => None,
        };
        self.raised.insert((t, b), r.clone());
        Ok(r)
    }

    fn align(&mut self, s: Thread, u: Thread) -> Result<Option<Moves>, BudgetReport> {
        if s == u {
            return Ok(Some(Moves::default()));
        }
        if let Some(r) = self.aligned.get(&(s, u)) {
            return Ok(r.clone());
        }
        self.meter.charge(1)?;
        let r = match (s.node(), u.node()) {
            (Node::Post(Action::Basic(a), _, _), Node::Post(Action::Basic(b), lu, ru)) => {
                let (s2, mut moves): (Thread, Vec<TreePath>) = if a == b {
                    (s, Vec::new())
                } else {
                    match self.raise(s, b)? {
                        Some((s2, m)) => (s2, m.to_vec()),
                        None => {
                            self.aligned.insert((s, u), None);
                            return Ok(None);
                        }
                    }
                };
                let Node::Post(_, ls, rs) = s2.node() else { unreachable!() };
                match (self.align(ls, lu)?, self.align(rs, ru)?) {
                    (Some(ml), Some(mr)) => {
                        moves.extend(prefixed(Branch::True, &ml));
                        moves.extend(prefixed(Branch::False, &mr));
                        self.meter.charge(moves.len())?;
                        Some(Rc::new(moves))
                    }
                    _ => None,
                }
            }
            _ => None,
        };
        self.aligned.insert((s, u), r.clone());
        Ok(r)
    }
}

fn swaps(paths: impl IntoIterator<Item = TreePath>) -> impl Iterator<Item = Move> {
    paths.into_iter().map(Move::Transpose)
}

fn trace_free(t: Thread) -> bool {
    t.is_trace_free()
}

fn basic_certificate(tx: Thread, ty: Thread) -> Option<Certificate> {
    if tx.depth() != ty.depth() {
        return Some(Certificate::Depth {
            left: tx.depth(),
            right: ty.depth(),
        });
    }
    let (lx, ly) = (leaf_multiset(tx), leaf_multiset(ty));
    if lx != ly {
        return Some(Certificate::LeafCounts {
            left: (lx.0.to_string(), lx.1.to_string()),
            right: (ly.0.to_string(), ly.1.to_string()),
        });
    }
    None
}

fn render_actions(actions: impl IntoIterator<Item = Action>) -> Vec<String> {
    actions.into_iter().map(|a| a.to_string()).collect()
}

/// Transposition equivalence of two threads.
pub fn transposition_threads(tx: Thread, ty: Thread, budget: Budget) -> Verdict {
    if tx == ty {
        return Verdict::Equivalent { witness: vec![] };
    }
    if let Some(certificate) = basic_certificate(tx, ty) {
        return Verdict::Inequivalent { certificate };
    }
    let (ax, ay) = (action_set(tx), action_set(ty));
    if ax != ay {
        return Verdict::Inequivalent {
            certificate: Certificate::ActionSet {
                left: render_actions(ax),
                right: render_actions(ay),
            },
        };
    }
    let mut meter = Meter::new(budget);
    match Aligner::new(&mut meter).align(tx, ty) {
        Ok(Some(moves)) => {
            return Verdict::Equivalent {
                witness: swaps(moves.iter().cloned()).collect(),
            }
        }
        Ok(None) => {}
        Err(report) => return Verdict::Unknown { report },
    }
    let mut tree = SwapTree::default();
    match tree.explore(tx, 0, &mut meter, &mut |s| s == ty) {
        Ok(Explore::Found(i)) => Verdict::Equivalent {
            witness: swaps(tree.path_to(i)).collect(),
        },
        Ok(Explore::Exhausted) => Verdict::Inequivalent {
            certificate: Certificate::ClassExhausted {
                states: tree.states.len(),
            },
        },
        Err(report) => Verdict::Unknown { report },
    }
}

pub fn transposition_equivalent(x: &InstructionSeq, y: &InstructionSeq, budget: Budget) -> Result<Verdict, EquivError> {
    same_profile(x, y)?;
    Ok(with_behaviour_step(x, y, transposition_threads(extract(x), extract(y), budget)))
}

/// Sequences with equal threads but different text need one behaviour step.
fn with_behaviour_step(x: &InstructionSeq, y: &InstructionSeq, v: Verdict) -> Verdict {
    match v {
        Verdict::Equivalent { witness } if witness.is_empty() && x != y => Verdict::Equivalent {
            witness: vec![Move::Behaviour],
        },
        v => v,
    }
}

struct Compacted {
    thread: Thread,
    perm: Permutation,
    k: u32,
}

fn compact(t: Thread) -> Compacted {
    let order = aux_first_occurrence(t);
    let k = order.len() as u32;
    let perm = compaction_permutation(order);
    Compacted {
        thread: thread_renumber(t, &perm),
        perm,
        k,
    }
}

fn renumber_move(p: &Permutation) -> Option<Move> {
    (!p.is_identity()).then(|| Move::Renumber(p.clone()))
}

/// Assembles `tx → cx → ... → g(cy)`, then `g(cy) → cy → ty`.
fn framed(cx: &Compacted, middle: Vec<Move>, g: &GroupElement, cy: &Compacted) -> Vec<Move> {
    renumber_move(&cx.perm)
        .into_iter()
        .chain(middle)
        .chain(g.inverse_moves())
        .chain(renumber_move(&cy.perm.inverse()))
        .collect()
}

fn group_too_large(k: u32, meter: &Meter) -> Verdict {
    Verdict::Unknown {
        report: meter.report(&format!(
            "symmetry group on {} auxiliary registers has {} elements",
            k,
            group_order(k)
        )),
    }
}

/// Structural algorithmic equivalence of two trace-free threads.
pub fn sa_threads(tx: Thread, ty: Thread, budget: Budget) -> Verdict {
    if tx == ty {
        return Verdict::Equivalent { witness: vec![] };
    }
    debug_assert!(trace_free(tx) && trace_free(ty));
    if let Some(certificate) = basic_certificate(tx, ty) {
        return Verdict::Inequivalent { certificate };
    }
    let (cx, cy) = (compact(tx), compact(ty));
    let k = cx.k.max(cy.k);
    let meter = Meter::new(budget);
    if cx.k != cy.k {
        return Verdict::Inequivalent {
            certificate: Certificate::ActionSet {
                left: render_actions(action_set(cx.thread)),
                right: render_actions(action_set(cy.thread)),
            },
        };
    }
    if group_order(k) > MAX_GROUP || group_order(k) as usize > budget.max_states {
        return group_too_large(k, &meter);
    }
    let (sx, sy) = (
        canonical_action_set(&action_set(cx.thread), k),
        canonical_action_set(&action_set(cy.thread), k),
    );
    if sx != sy {
        return Verdict::Inequivalent {
            certificate: Certificate::ActionSet {
                left: render_actions(sx),
                right: render_actions(sy),
            },
        };
    }
    let mut meter = meter;
    let group = elements(k);
    let mut targets: HashMap<Thread, usize> = HashMap::new();
    for (i, g) in group.iter().enumerate() {
        targets.entry(g.act(cy.thread)).or_insert(i);
    }
    if let Err(report) = meter.charge(group.len()) {
        return Verdict::Unknown { report };
    }
    {
        let mut aligner = Aligner::new(&mut meter);
        for g in &group {
            match aligner.align(cx.thread, g.act(cy.thread)) {
                Ok(Some(moves)) => {
                    return Verdict::Equivalent {
                        witness: framed(&cx, swaps(moves.iter().cloned()).collect(), g, &cy),
                    }
                }
                Ok(None) => {}
                Err(report) => return Verdict::Unknown { report },
            }
        }
    }
    let mut tree = SwapTree::default();
    match tree.explore(cx.thread, 0, &mut meter, &mut |s| targets.contains_key(&s)) {
        Ok(Explore::Found(i)) => {
            let g = &group[targets[&tree.states[i]]];
            Verdict::Equivalent {
                witness: framed(&cx, swaps(tree.path_to(i)).collect(), g, &cy),
            }
        }
        Ok(Explore::Exhausted) => Verdict::Inequivalent {
            certificate: Certificate::ClassExhausted {
                states: tree.states.len(),
            },
        },
        Err(report) => Verdict::Unknown { report },
    }
}

pub fn structurally_algorithmically_equivalent(
    x: &InstructionSeq,
    y: &InstructionSeq,
    budget: Budget,
) -> Result<Verdict, EquivError> {
    same_profile(x, y)?;
    Ok(with_behaviour_step(x, y, sa_threads(extract(x), extract(y), budget)))
}

/// Result of the constructive search for structural computational equivalence.
pub enum ScSearch {
    Found(Vec<Move>),
    Exhausted,
    OutOfBudget(BudgetReport),
}

/// Searches `swaps* · dead-branch rewrites · swaps* · group` paths from `tx` to `ty`.
pub fn sc_threads(tx: Thread, ty: Thread, inputs: u32, budget: Budget) -> ScSearch {
    if tx == ty {
        return ScSearch::Found(vec![]);
    }
    if ct_counterexample(tx, ty, inputs).is_none() {
        return ScSearch::Found(dead_branch_moves(tx, ty, inputs).expect("trace-equivalent threads"));
    }
    let (cx, cy) = (compact(tx), compact(ty));
    let k = cx.k.max(cy.k);
    let mut meter = Meter::new(budget);
    if group_order(k) > MAX_GROUP || group_order(k) as usize > budget.max_states {
        let Verdict::Unknown { report } = group_too_large(k, &meter) else {
            unreachable!()
        };
        return ScSearch::OutOfBudget(report);
    }

    // the whole class of cx, keyed by tracked behaviour
    let mut left = SwapTree::default();
    if let Err(report) = left.explore(cx.thread, 0, &mut meter, &mut |_| false) {
        return ScSearch::OutOfBudget(report);
    }
    let mut by_signature: HashMap<Vec<Thread>, usize> = HashMap::new();
    for (i, &s) in left.states.iter().enumerate() {
        by_signature.entry(ct_signature(s, inputs)).or_insert(i);
    }

    let group = elements(k);
    let mut right = SwapTree::default();
    for (gi, g) in group.iter().enumerate() {
        let mut hit = None;
        let outcome = right.explore(g.act(cy.thread), gi, &mut meter, &mut |s| {
            hit = by_signature.get(&ct_signature(s, inputs)).copied();
            hit.is_some()
        });
        match outcome {
            Ok(Explore::Found(j)) => {
                let i = hit.expect("goal records the match");
                let (s, s2) = (left.states[i], right.states[j]);
                let dead = dead_branch_moves(s, s2, inputs).expect("equal tracked behaviour");
                let mut back = right.path_to(j);
                back.reverse();
                let middle = swaps(left.path_to(i)).chain(dead).chain(swaps(back)).collect();
                return ScSearch::Found(framed(&cx, middle, &group[right.root[j]], &cy));
            }
            Ok(Explore::Exhausted) => {}
            Err(report) => return ScSearch::OutOfBudget(report),
        }
    }
    ScSearch::Exhausted
}

/// Whether a sequence lies inside the default oracle universe.
fn within_oracle_bounds(x: &InstructionSeq, bounds: &UniverseBounds) -> bool {
    x.profile() == Profile::new(bounds.inputs, bounds.outputs) && bounds.contains(x)
}

pub fn structurally_computationally_equivalent(
    x: &InstructionSeq,
    y: &InstructionSeq,
    budget: Budget,
) -> Result<Verdict, EquivError> {
    same_profile(x, y)?;
    let inputs = x.profile().inputs;
    let report = match sc_threads(extract(x), extract(y), inputs, budget) {
        ScSearch::Found(witness) => {
            return Ok(with_behaviour_step(x, y, Verdict::Equivalent { witness }));
        }
        ScSearch::OutOfBudget(report) => report,
        ScSearch::Exhausted => BudgetReport {
            states_explored: 0,
            max_states: budget.max_states,
            max_millis: budget.max_time.as_millis() as u64,
            reason: "constructive moves exhausted without a witness".into(),
        },
    };
    let bounds = UniverseBounds::default();
    if within_oracle_bounds(x, &bounds) && within_oracle_bounds(y, &bounds) {
        let universe = default_universe();
        if let (Some(i), Some(j)) = (universe.index_of(x), universe.index_of(y)) {
            if !universe.sc.same_class(i, j) {
                return Ok(Verdict::Inequivalent {
                    certificate: Certificate::OracleSeparated { bounds },
                });
            }
        }
    }
    Ok(Verdict::Unknown { report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::check_witness;
    use crate::pga::parse;

    fn seq(text: &str) -> InstructionSeq {
        parse(text, Profile::new(1, 1)).unwrap()
    }

    fn verdict(f: fn(&InstructionSeq, &InstructionSeq, Budget) -> Result<Verdict, EquivError>, a: &str, b: &str) -> Verdict {
        let (x, y) = (seq(a), seq(b));
        let v = f(&x, &y, Budget::default()).unwrap();
        if let Some(w) = v.witness() {
            check_witness(extract(&x), extract(&y), w, 1).unwrap();
        }
        v
    }

    const UNSAT_X: &str = "+in:1.get; #2; #5; +in:1.get; #3; out:1.set:1; !; out:1.set:0; !";
    const UNSAT_Y: &str = "+in:1.get; #2; #5; +in:1.get; #3; out:1.set:0; !; out:1.set:0; !";

    #[test]
    fn transposition_examples() {
        let v = verdict(transposition_equivalent, "aux:1.set:1; out:1.set:1; !", "out:1.set:1; aux:1.set:1; !");
        assert_eq!(v.witness().unwrap(), &[Move::Transpose(TreePath::root())]);
        let v = verdict(transposition_equivalent, "out:1.set:0; out:1.set:1; !", "out:1.set:1; out:1.set:0; !");
        assert!(v.is_inequivalent());
        let v = verdict(transposition_equivalent, UNSAT_X, UNSAT_X);
        assert_eq!(v.witness().unwrap(), &[] as &[Move]);
    }

    #[test]
    fn sa_examples() {
        let v = verdict(
            structurally_algorithmically_equivalent,
            "aux:1.get; out:1.set:1; !",
            "aux:1.set:0; out:1.set:1; !",
        );
        assert!(matches!(v, Verdict::Inequivalent { certificate: Certificate::ActionSet { .. } }));
        let v = verdict(structurally_algorithmically_equivalent, UNSAT_X, UNSAT_Y);
        assert!(matches!(v, Verdict::Inequivalent { certificate: Certificate::ActionSet { .. } }));
        let v = verdict(structurally_algorithmically_equivalent, "#1; !", "!");
        assert_eq!(v.witness().unwrap(), &[Move::Behaviour]);
        assert!(verdict(
            structurally_algorithmically_equivalent,
            "out:1.set:0; aux:1.set:0; !",
            "out:1.set:0; aux:1.set:1; !"
        )
        .is_equivalent());
    }

    #[test]
    fn sa_combines_all_generators() {
        let x = "-aux:3.get; !; aux:5.set:1; out:1.set:1; !";
        let y = "+aux:2.get; !; out:1.set:1; aux:1.set:0; !";
        let v = verdict(structurally_algorithmically_equivalent, x, y);
        assert!(v.is_equivalent(), "{:?}", v);
    }

    #[test]
    fn sc_examples() {
        let v = verdict(structurally_computationally_equivalent, UNSAT_X, UNSAT_Y);
        let w = v.witness().unwrap();
        assert!(w.iter().any(|m| matches!(m, Move::DeadBranch { .. })));
        assert!(verdict(structurally_computationally_equivalent, UNSAT_X, UNSAT_X).is_equivalent());
        let v = verdict(structurally_computationally_equivalent, "out:1.set:1; !", "out:1.set:0; !");
        assert!(matches!(v, Verdict::Inequivalent { certificate: Certificate::OracleSeparated { .. } }));
    }

    #[test]
    fn sc_mixes_swaps_and_dead_branches() {
        let x = "+in:1.get; #2; #5; +in:1.get; #3; out:1.set:1; aux:1.set:1; !; out:1.set:0; !";
        let y = "+in:1.get; #2; #5; +in:1.get; #3; aux:1.set:0; out:1.set:1; !; out:1.set:0; !";
        let v = verdict(structurally_computationally_equivalent, x, y);
        assert!(v.is_equivalent(), "{:?}", v);
    }

    #[test]
    fn tiny_budget_gives_unknown() {
        let x = seq("aux:1.set:1; aux:2.set:1; aux:3.set:1; out:1.set:1; !");
        let y = seq("out:1.set:1; aux:3.set:1; aux:2.set:1; aux:1.set:1; !");
        let budget = Budget {
            max_states: 3,
            ..Budget::default()
        };
        let v = structurally_algorithmically_equivalent(&x, &y, budget).unwrap();
        assert!(matches!(v, Verdict::Unknown { .. }), "{:?}", v);
        assert!(structurally_algorithmically_equivalent(&x, &y, Budget::default()).unwrap().is_equivalent());
    }
}
