//! Brute-force oracle: every sequence within small bounds, partitioned by
//! the closure of the generator relations.
//!
//! The oracle keeps its own instruction and tree representations and its
//! own extraction, so it shares no code with the search it is checked against.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::pga::{FocusKind, Instruction, InstructionSeq};

/// Largest universe the oracle agrees to enumerate.
pub const MAX_UNIVERSE: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct UniverseBounds {
    pub max_len: u32,
    pub inputs: u32,
    pub outputs: u32,
    pub aux_bound: u32,
    pub max_jump: u32,
}

impl Default for UniverseBounds {
    fn default() -> Self {
        UniverseBounds {
            max_len: 3,
            inputs: 1,
            outputs: 1,
            aux_bound: 1,
            max_jump: 4,
        }
    }
}

impl fmt::Display for UniverseBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max_len {}, n {}, m {}, aux {}, jumps {}",
            self.max_len, self.inputs, self.outputs, self.aux_bound, self.max_jump
        )
    }
}

impl UniverseBounds {
    pub fn primitive_count(&self) -> u64 {
        let basics = self.inputs as u64 + 3 * self.aux_bound as u64 + 2 * self.outputs as u64;
        3 * basics + self.max_jump as u64 + 2
    }

    /// Number of sequences in bounds, saturating.
    pub fn size(&self) -> u64 {
        let p = self.primitive_count();
        (1..=self.max_len).fold(0u64, |acc, l| acc.saturating_add(p.saturating_pow(l)))
    }

    pub fn contains(&self, x: &InstructionSeq) -> bool {
        x.len() <= self.max_len as usize
            && x.items().iter().all(|i| match i {
                Instruction::Jump(l) => *l <= self.max_jump,
                Instruction::Halt => true,
                other => {
                    let b = other.basic().expect("non-jump, non-halt instructions are basic");
                    let bound = match b.focus.kind() {
                        FocusKind::Input => self.inputs,
                        FocusKind::Auxiliary => self.aux_bound,
                        FocusKind::Output => self.outputs,
                    };
                    b.focus.index() <= bound
                }
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UniverseError {
    #[error("universe of {estimate} sequences exceeds the limit of {limit}")]
    TooLarge { estimate: u64, limit: u64 },
}

/// Classes listed by least member; members ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

impl Partition {
    fn from_union_find(uf: UnionFind<usize>, n: usize) -> Partition {
        let labels = uf.into_labeling();
        let mut class_by_label: HashMap<usize, usize> = HashMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = vec![0; n];
        for (i, l) in labels.into_iter().enumerate() {
            let c = *class_by_label.entry(l).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[c].push(i);
            class_of[i] = c;
        }
        Partition { class_of, classes }
    }

    pub fn same_class(&self, i: usize, j: usize) -> bool {
        self.class_of[i] == self.class_of[j]
    }

    /// Whether every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.classes
            .iter()
            .all(|c| c.iter().all(|&i| coarser.same_class(i, c[0])))
    }
}

#[derive(Clone, Debug)]
pub struct Universe {
    pub bounds: UniverseBounds,
    /// Sequence texts in enumeration order.
    pub sequences: Vec<String>,
    /// Closure of behavioural, bit exchange, renumbering and transposition edges.
    pub sa: Partition,
    /// The same edges plus computational trace equivalence.
    pub sc: Partition,
    index: HashMap<String, usize>,
}

impl Universe {
    pub fn index_of(&self, x: &InstructionSeq) -> Option<usize> {
        self.index.get(&x.to_string()).copied()
    }
}

/// The universe for the default bounds, built once.
pub fn default_universe() -> &'static Universe {
    static CELL: OnceLock<Universe> = OnceLock::new();
    CELL.get_or_init(|| universe_closure(UniverseBounds::default()).expect("default bounds are small"))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
struct Op {
    reg: u8,
    idx: u32,
    meth: u8,
}

const REG: [&str; 3] = ["in", "aux", "out"];
const METH: [&str; 3] = ["get", "set:0", "set:1"];

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}.{}", REG[self.reg as usize], self.idx, METH[self.meth as usize])
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Prim {
    Do(Op),
    Pos(Op),
    Neg(Op),
    Jump(u32),
    Halt,
}

impl fmt::Display for Prim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prim::Do(o) => write!(f, "{}", o),
            Prim::Pos(o) => write!(f, "+{}", o),
            Prim::Neg(o) => write!(f, "-{}", o),
            Prim::Jump(l) => write!(f, "#{}", l),
            Prim::Halt => f.write_str("!"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Tree {
    S,
    D,
    Node(Op, Box<Tree>, Box<Tree>),
    Trace(Op, bool, Box<Tree>),
}

fn node(a: Op, x: Tree, y: Tree) -> Tree {
    Tree::Node(a, Box::new(x), Box::new(y))
}

fn primitives(b: &UniverseBounds) -> Vec<Prim> {
    let mut ops = Vec::new();
    for idx in 1..=b.inputs {
        ops.push(Op { reg: 0, idx, meth: 0 });
    }
    for idx in 1..=b.aux_bound {
        for meth in 0..3 {
            ops.push(Op { reg: 1, idx, meth });
        }
    }
    for idx in 1..=b.outputs {
        for meth in 1..3 {
            ops.push(Op { reg: 2, idx, meth });
        }
    }
    let mut out: Vec<Prim> = Vec::new();
    for &o in &ops {
        out.extend([Prim::Do(o), Prim::Pos(o), Prim::Neg(o)]);
    }
    out.extend((0..=b.max_jump).map(Prim::Jump));
    out.push(Prim::Halt);
    out
}

/// Extraction by the defining equations, one instruction at a time.
fn ext(head: Prim, tail: &[Prim]) -> Tree {
    let rest = || ext(tail[0], &tail[1..]);
    match head {
        Prim::Halt => Tree::S,
        Prim::Do(a) | Prim::Pos(a) | Prim::Neg(a) if tail.is_empty() => node(a, Tree::D, Tree::D),
        Prim::Do(a) => node(a, rest(), rest()),
        Prim::Pos(a) => node(a, rest(), ext(Prim::Jump(2), tail)),
        Prim::Neg(a) => node(a, ext(Prim::Jump(2), tail), rest()),
        Prim::Jump(_) if tail.is_empty() => Tree::D,
        Prim::Jump(0) => Tree::D,
        Prim::Jump(1) => rest(),
        Prim::Jump(_) if tail.len() == 1 => Tree::D,
        Prim::Jump(l) => ext(Prim::Jump(l - 1), &tail[1..]),
    }
}

fn extract(seq: &[Prim]) -> Tree {
    ext(seq[0], &seq[1..])
}

fn flip(p: Prim, idx: u32) -> Prim {
    let f = |o: Op| {
        if o.reg == 1 && o.idx == idx && o.meth != 0 {
            Op { meth: 3 - o.meth, ..o }
        } else {
            o
        }
    };
    let hit = |o: Op| o.reg == 1 && o.idx == idx;
    match p {
        Prim::Do(o) => Prim::Do(f(o)),
        Prim::Pos(o) if hit(o) => Prim::Neg(f(o)),
        Prim::Neg(o) if hit(o) => Prim::Pos(f(o)),
        other => other,
    }
}

fn rename(p: Prim, from: u32, to: u32) -> Prim {
    let r = |o: Op| {
        if o.reg == 1 && o.idx == from {
            Op { idx: to, ..o }
        } else if o.reg == 1 && o.idx == to {
            Op { idx: from, ..o }
        } else {
            o
        }
    };
    match p {
        Prim::Do(o) => Prim::Do(r(o)),
        Prim::Pos(o) => Prim::Pos(r(o)),
        Prim::Neg(o) => Prim::Neg(r(o)),
        other => other,
    }
}

/// Every tree one swap away from `t`.
fn neighbours(t: &Tree) -> Vec<Tree> {
    let mut out = Vec::new();
    if let Tree::Node(a, l, r) = t {
        if let (Tree::Node(b, x, y), Tree::Node(b2, x2, y2)) = (&**l, &**r) {
            if b == b2 && (a.reg, a.idx) != (b.reg, b.idx) {
                out.push(node(
                    *b,
                    node(*a, (**x).clone(), (**x2).clone()),
                    node(*a, (**y).clone(), (**y2).clone()),
                ));
            }
        }
        for l2 in neighbours(l) {
            out.push(Tree::Node(*a, Box::new(l2), r.clone()));
        }
        for r2 in neighbours(r) {
            out.push(Tree::Node(*a, l.clone(), Box::new(r2)));
        }
    }
    out
}

fn swap_closure(t: &Tree) -> Vec<Tree> {
    let mut seen: HashSet<Tree> = HashSet::from([t.clone()]);
    let mut queue = VecDeque::from([t.clone()]);
    let mut out = Vec::new();
    while let Some(s) = queue.pop_front() {
        for n in neighbours(&s) {
            if seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
        out.push(s);
    }
    out
}

fn track(t: &Tree, inputs: &[bool]) -> Tree {
    match t {
        Tree::S | Tree::D | Tree::Trace(..) => t.clone(),
        Tree::Node(a, x, y) if a.reg == 0 && (a.idx as usize) <= inputs.len() => {
            let v = inputs[a.idx as usize - 1];
            Tree::Trace(*a, v, Box::new(track(if v { x } else { y }, inputs)))
        }
        Tree::Node(a, x, y) => node(*a, track(x, inputs), track(y, inputs)),
    }
}

fn valuations(n: u32) -> Vec<Vec<bool>> {
    (0..1u64 << n)
        .map(|m| (0..n).map(|i| m >> (n - 1 - i) & 1 == 1).collect())
        .collect()
}

/// Enumerates every sequence within `bounds` and partitions it.
pub fn universe_closure(bounds: UniverseBounds) -> Result<Universe, UniverseError> {
    let estimate = bounds.size();
    if estimate > MAX_UNIVERSE {
        return Err(UniverseError::TooLarge {
            estimate,
            limit: MAX_UNIVERSE,
        });
    }
    let prims = primitives(&bounds);
    let mut seqs: Vec<Vec<Prim>> = Vec::new();
    let mut layer: Vec<Vec<Prim>> = vec![vec![]];
    for _ in 0..bounds.max_len {
        layer = layer
            .iter()
            .flat_map(|s| prims.iter().map(move |&p| [s.as_slice(), &[p]].concat()))
            .collect();
        seqs.extend(layer.iter().cloned());
    }
    let texts: Vec<String> = seqs
        .iter()
        .map(|s| s.iter().map(Prim::to_string).collect::<Vec<_>>().join("; "))
        .collect();
    let index: HashMap<Vec<Prim>, usize> = seqs.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let trees: Vec<Tree> = seqs.iter().map(|s| extract(s)).collect();
    let n = seqs.len();

    let mut uf = UnionFind::new(n);
    // behavioural edges
    let mut by_tree: HashMap<&Tree, usize> = HashMap::new();
    for (i, t) in trees.iter().enumerate() {
        uf.union(*by_tree.entry(t).or_insert(i), i);
    }
    // bit exchange and renumbering edges, one register at a time
    for (i, s) in seqs.iter().enumerate() {
        for a in 1..=bounds.aux_bound {
            let flipped: Vec<Prim> = s.iter().map(|&p| flip(p, a)).collect();
            uf.union(i, index[&flipped]);
            for b in a + 1..=bounds.aux_bound {
                let renamed: Vec<Prim> = s.iter().map(|&p| rename(p, a, b)).collect();
                uf.union(i, index[&renamed]);
            }
        }
    }
    // transposition edges through the thread-level swap closure
    let mut owner: HashMap<Tree, usize> = HashMap::new();
    for (i, t) in trees.iter().enumerate() {
        if let Some(&o) = owner.get(t) {
            uf.union(o, i);
            continue;
        }
        for c in swap_closure(t) {
            match owner.get(&c) {
                Some(&o) => {
                    uf.union(o, i);
                }
                None => {
                    owner.insert(c, i);
                }
            }
        }
    }
    let sa = Partition::from_union_find(uf.clone(), n);

    let vals = valuations(bounds.inputs);
    let mut by_trace: HashMap<Vec<Tree>, usize> = HashMap::new();
    let mut trace_rep: HashMap<&Tree, usize> = HashMap::new();
    for (i, t) in trees.iter().enumerate() {
        if let Some(&r) = trace_rep.get(t) {
            uf.union(r, i);
            continue;
        }
        trace_rep.insert(t, i);
        let signature: Vec<Tree> = vals.iter().map(|v| track(t, v)).collect();
        uf.union(*by_trace.entry(signature).or_insert(i), i);
    }
    let sc = Partition::from_union_find(uf, n);

    let text_index = texts.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    Ok(Universe {
        bounds,
        sequences: texts,
        sa,
        sc,
        index: text_index,
    })
}
