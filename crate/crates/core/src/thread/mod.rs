//! Finite threads: termination `S`, inaction `D`, and postconditional
//! composition `x ◁ a ▷ y` (continue with `x` on reply T, `y` on reply F).
//!
//! Threads are hash-consed: a [`Thread`] is a copyable handle and two
//! handles are equal iff the threads they denote are syntactically equal.

mod path;
mod render;
mod store;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::pga::{BasicInstruction, Instruction, InstructionSeq, Permutation};
use crate::services::Reply;

pub use path::{for_each_redex, redex_paths, Branch, TreePath};
pub use render::{parse_term, render_graph, render_tree, TermError};
pub use store::interned_count;

/// Label of a postconditional node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Basic(BasicInstruction),
    /// Record of a request handled by a service, produced by tracking use.
    Traced(BasicInstruction, Reply),
}

impl Action {
    pub fn instruction(self) -> BasicInstruction {
        match self {
            Action::Basic(b) | Action::Traced(b, _) => b,
        }
    }

    pub fn basic(self) -> Option<BasicInstruction> {
        match self {
            Action::Basic(b) => Some(b),
            Action::Traced(..) => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Basic(b) => write!(f, "{}", b),
            Action::Traced(b, r) => write!(f, "i({},{})", b, r),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Stop,
    Dead,
    Post(Action, Thread, Thread),
}

/// Handle to a hash-consed finite thread.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Thread(u32);

impl Thread {
    pub fn stop() -> Thread {
        store::STOP
    }

    pub fn dead() -> Thread {
        store::DEAD
    }

    /// `on_true ◁ action ▷ on_false`.
    pub fn post(action: Action, on_true: Thread, on_false: Thread) -> Thread {
        store::intern(Node::Post(action, on_true, on_false))
    }

    pub fn basic(b: BasicInstruction, on_true: Thread, on_false: Thread) -> Thread {
        Thread::post(Action::Basic(b), on_true, on_false)
    }

    /// Action prefix `a ∘ t`, i.e. `t ◁ a ▷ t`.
    pub fn prefix(action: Action, then: Thread) -> Thread {
        Thread::post(action, then, then)
    }

    pub fn node(self) -> Node {
        store::node(self)
    }

    /// Maximum number of actions on any path; stored at interning time.
    pub fn depth(self) -> u32 {
        store::depth(self)
    }

    pub fn is_stop(self) -> bool {
        self == store::STOP
    }

    pub fn is_dead(self) -> bool {
        self == store::DEAD
    }

    pub fn is_trace_free(self) -> bool {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if !seen.insert(t) {
                continue;
            }
            if let Node::Post(a, x, y) = t.node() {
                if matches!(a, Action::Traced(..)) {
                    return false;
                }
                stack.push(x);
                stack.push(y);
            }
        }
        true
    }
}

impl fmt::Debug for Thread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Term syntax: `S`, `D`, `a(x, y)`; see [`parse_term`].
impl fmt::Display for Thread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Stop => f.write_str("S"),
            Node::Dead => f.write_str("D"),
            Node::Post(a, x, y) => write!(f, "{}({}, {})", a, x, y),
        }
    }
}

/// Thread extraction for a finite instruction sequence.
///
/// Positions are resolved from the end backwards, so every forward jump
/// refers to an already-built thread; jumps of length 0 and positions past
/// the end denote inaction.
pub fn extract(seq: &InstructionSeq) -> Thread {
    extract_items(seq.items())
}

pub fn extract_items(items: &[Instruction]) -> Thread {
    let len = items.len();
    // at[p] is the thread extracted from position p (1-based); at[p] = D for p > len
    let mut at = vec![Thread::dead(); len + 3];
    let get = |at: &Vec<Thread>, p: usize| at.get(p).copied().unwrap_or(Thread::dead());
    for p in (1..=len).rev() {
        at[p] = match items[p - 1] {
            Instruction::Plain(b) => Thread::prefix(Action::Basic(b), get(&at, p + 1)),
            Instruction::PosTest(b) => Thread::basic(b, get(&at, p + 1), get(&at, p + 2)),
            Instruction::NegTest(b) => Thread::basic(b, get(&at, p + 2), get(&at, p + 1)),
            Instruction::Jump(0) => Thread::dead(),
            Instruction::Jump(l) => get(&at, p + l as usize),
            Instruction::Halt => Thread::stop(),
        };
    }
    at[1]
}

pub fn depth(t: Thread) -> u32 {
    t.depth()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bit exchange is undefined on traced action {0}")]
pub struct TracedActionError(pub Action);

/// Thread-level image of the instruction-level bit exchange: nodes on
/// `aux:i` with `i` in `indices` get their set method flipped and their
/// branches swapped.
pub fn thread_bit_exchange(t: Thread, indices: &BTreeSet<u32>) -> Result<Thread, TracedActionError> {
    fn go(
        t: Thread,
        indices: &BTreeSet<u32>,
        memo: &mut HashMap<Thread, Thread>,
    ) -> Result<Thread, TracedActionError> {
        if let Some(&r) = memo.get(&t) {
            return Ok(r);
        }
        let r = match t.node() {
            Node::Stop | Node::Dead => t,
            Node::Post(a @ Action::Traced(..), _, _) => return Err(TracedActionError(a)),
            Node::Post(Action::Basic(b), x, y) => {
                let x = go(x, indices, memo)?;
                let y = go(y, indices, memo)?;
                match b.bit_exchanged(indices) {
                    (b, true) => Thread::basic(b, y, x),
                    (b, false) => Thread::basic(b, x, y),
                }
            }
        };
        memo.insert(t, r);
        Ok(r)
    }
    if indices.is_empty() {
        return Ok(t);
    }
    go(t, indices, &mut HashMap::new())
}

/// Thread-level image of register renumbering; traced actions are relabeled too.
pub fn thread_renumber(t: Thread, perm: &Permutation) -> Thread {
    fn go(t: Thread, perm: &Permutation, memo: &mut HashMap<Thread, Thread>) -> Thread {
        if let Some(&r) = memo.get(&t) {
            return r;
        }
        let r = match t.node() {
            Node::Stop | Node::Dead => t,
            Node::Post(a, x, y) => {
                let a = match a {
                    Action::Basic(b) => Action::Basic(b.renumbered(perm)),
                    Action::Traced(b, r) => Action::Traced(b.renumbered(perm), r),
                };
                Thread::post(a, go(x, perm, memo), go(y, perm, memo))
            }
        };
        memo.insert(t, r);
        r
    }
    if perm.is_identity() {
        return t;
    }
    go(t, perm, &mut HashMap::new())
}

/// Distinct nodes reachable from `t`, in depth-first pre-order (true branch first).
pub fn nodes(t: Thread) -> Vec<Thread> {
    let mut seen = std::collections::HashSet::new();
    let mut order = Vec::new();
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        if !seen.insert(t) {
            continue;
        }
        order.push(t);
        if let Node::Post(_, x, y) = t.node() {
            stack.push(y);
            stack.push(x);
        }
    }
    order
}

pub fn action_set(t: Thread) -> BTreeSet<Action> {
    nodes(t)
        .into_iter()
        .filter_map(|n| match n.node() {
            Node::Post(a, _, _) => Some(a),
            _ => None,
        })
        .collect()
}

/// Numbers of `S` and `D` leaves of the unfolded tree.
pub fn leaf_multiset(t: Thread) -> (BigUint, BigUint) {
    fn go(t: Thread, memo: &mut HashMap<Thread, (BigUint, BigUint)>) -> (BigUint, BigUint) {
        if let Some(r) = memo.get(&t) {
            return r.clone();
        }
        let r = match t.node() {
            Node::Stop => (BigUint::from(1u32), BigUint::from(0u32)),
            Node::Dead => (BigUint::from(0u32), BigUint::from(1u32)),
            Node::Post(_, x, y) => {
                let (xs, xd) = go(x, memo);
                let (ys, yd) = go(y, memo);
                (xs + ys, xd + yd)
            }
        };
        memo.insert(t, r.clone());
        r
    }
    go(t, &mut HashMap::new())
}

/// Auxiliary register indices occurring in actions of `t`.
pub fn used_aux_indices(t: Thread) -> BTreeSet<u32> {
    action_set(t)
        .into_iter()
        .map(Action::instruction)
        .filter(|b| b.focus.is_aux())
        .map(|b| b.focus.index())
        .collect()
}

/// Auxiliary indices in depth-first pre-order of first occurrence.
pub fn aux_first_occurrence(t: Thread) -> Vec<u32> {
    let mut out = Vec::new();
    for n in nodes(t) {
        if let Node::Post(a, _, _) = n.node() {
            let b = a.instruction();
            if b.focus.is_aux() && !out.contains(&b.focus.index()) {
                out.push(b.focus.index());
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinearizeError {
    #[error("traced action {0} has no instruction counterpart")]
    Traced(Action),
    #[error(transparent)]
    Seq(#[from] crate::pga::SeqError),
}

/// Builds an instruction sequence whose extraction is `t`.
///
/// Each distinct node becomes one block, laid out in an order where every
/// node precedes its children: `!` for `S`, `#0` for `D`, and
/// `+a; #→x; #→y` for `x ◁ a ▷ y`.
pub fn linearize(t: Thread, profile: crate::pga::Profile) -> Result<InstructionSeq, LinearizeError> {
    // reverse post-order puts parents before children
    let mut post = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![(t, false)];
    while let Some((n, expanded)) = stack.pop() {
        if expanded {
            post.push(n);
            continue;
        }
        if !seen.insert(n) {
            continue;
        }
        stack.push((n, true));
        if let Node::Post(_, x, y) = n.node() {
            stack.push((y, false));
            stack.push((x, false));
        }
    }
    post.reverse();
    let mut start = HashMap::new();
    let mut pos = 1usize;
    for &n in &post {
        start.insert(n, pos);
        pos += match n.node() {
            Node::Post(..) => 3,
            _ => 1,
        };
    }
    let mut items = Vec::with_capacity(pos);
    for &n in &post {
        match n.node() {
            Node::Stop => items.push(Instruction::Halt),
            Node::Dead => items.push(Instruction::Jump(0)),
            Node::Post(Action::Basic(b), x, y) => {
                let here = start[&n];
                items.push(Instruction::PosTest(b));
                items.push(Instruction::Jump((start[&x] - (here + 1)) as u32));
                items.push(Instruction::Jump((start[&y] - (here + 2)) as u32));
            }
            Node::Post(a, _, _) => return Err(LinearizeError::Traced(a)),
        }
    }
    Ok(InstructionSeq::new(items, profile)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pga::{parse_items, Focus, Method, Profile};

    fn x(text: &str) -> Thread {
        extract_items(&parse_items(text).unwrap())
    }

    fn bi(f: Focus, m: Method) -> BasicInstruction {
        BasicInstruction::new(f, m)
    }

    fn set(items: &[u32]) -> BTreeSet<u32> {
        items.iter().copied().collect()
    }

    #[test]
    fn extraction_examples() {
        let out1 = bi(Focus::output(1), Method::Set1);
        let in1 = bi(Focus::input(1), Method::Get);
        assert_eq!(x("!"), Thread::stop());
        assert_eq!(x("#0; !"), Thread::dead());
        assert_eq!(x("out:1.set:1"), Thread::basic(out1, Thread::dead(), Thread::dead()));
        assert_eq!(x("+in:1.get; !"), Thread::basic(in1, Thread::stop(), Thread::dead()));
        assert_eq!(x("#2; out:1.set:1; !"), Thread::stop());
        assert_eq!(x("#1; !"), x("!"));
    }

    #[test]
    fn depth_examples() {
        assert_eq!(depth(Thread::stop()), 0);
        assert_eq!(depth(Thread::dead()), 0);
        let a = bi(Focus::input(1), Method::Get);
        assert_eq!(depth(Thread::basic(a, Thread::stop(), Thread::dead())), 1);
    }

    #[test]
    fn bit_exchange_examples() {
        assert_eq!(
            thread_bit_exchange(x("aux:1.set:0; !"), &set(&[1])).unwrap(),
            x("aux:1.set:1; !")
        );
        let t = x("+aux:1.get; out:1.set:0; !");
        assert_eq!(thread_bit_exchange(t, &set(&[])).unwrap(), t);
        let get = bi(Focus::aux(1), Method::Get);
        assert_eq!(
            thread_bit_exchange(Thread::basic(get, Thread::stop(), Thread::dead()), &set(&[1])).unwrap(),
            Thread::basic(get, Thread::dead(), Thread::stop())
        );
        let traced = Thread::prefix(Action::Traced(get, Reply::T), Thread::stop());
        assert!(thread_bit_exchange(traced, &set(&[1])).is_err());
    }

    #[test]
    fn renumber_examples() {
        let swap = Permutation::swap(1, 2);
        assert_eq!(thread_renumber(x("aux:1.get; !"), &swap), x("aux:2.get; !"));
        let t = x("+aux:1.get; aux:2.set:0; !");
        assert_eq!(thread_renumber(t, &Permutation::identity()), t);
        let io = x("+in:1.get; out:1.set:1; !");
        assert_eq!(thread_renumber(io, &swap), io);
    }

    #[test]
    fn action_set_and_leaves() {
        assert!(action_set(Thread::stop()).is_empty());
        let acts = action_set(x("+in:1.get; out:1.set:1; !"));
        let expected: BTreeSet<Action> = [
            Action::Basic(bi(Focus::input(1), Method::Get)),
            Action::Basic(bi(Focus::output(1), Method::Set1)),
        ]
        .into_iter()
        .collect();
        assert_eq!(acts, expected);
        let one = BigUint::from(1u32);
        let zero = BigUint::from(0u32);
        assert_eq!(leaf_multiset(Thread::stop()), (one.clone(), zero.clone()));
        let a = Action::Basic(bi(Focus::aux(1), Method::Get));
        let t = Thread::post(a, Thread::stop(), Thread::dead());
        assert_eq!(leaf_multiset(t), (one.clone(), one.clone()));
        let doubled = Thread::prefix(a, t);
        assert_eq!(leaf_multiset(doubled), (BigUint::from(2u32), BigUint::from(2u32)));
    }

    #[test]
    fn node_bound_holds() {
        let text = "+in:1.get; #2; #5; +in:1.get; #3; out:1.set:1; !; out:1.set:0; !";
        let items = parse_items(text).unwrap();
        assert!(nodes(extract_items(&items)).len() <= items.len() + 2);
    }

    #[test]
    fn linearize_reproduces_the_thread() {
        for text in ["!", "#0", "+in:1.get; #2; #5; +in:1.get; #3; out:1.set:1; !; out:1.set:0; !", "aux:1.set:1; -aux:1.get; #0; !"] {
            let t = x(text);
            let seq = linearize(t, Profile::new(1, 1)).unwrap();
            assert_eq!(extract(&seq), t, "{}", text);
        }
    }
}
