//! Finite instruction sequences over Boolean-register instructions.
//!
//! An [`InstructionSeq`] is a flat, non-empty vector of [`Instruction`]s
//! together with the `(n, m)` register profile it was validated against.
//! Concatenation is vector append, so associativity holds by construction.

mod perm;
pub(crate) mod syntax;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

pub use perm::{Permutation, PermutationError};
pub use syntax::{parse, parse_items, ParseError, ParseErrorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FocusKind {
    Input,
    Auxiliary,
    Output,
}

/// Name of a Boolean register: `in:i`, `aux:i` or `out:i` with `i >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Focus {
    kind: FocusKind,
    index: u32,
}

impl Focus {
    /// Returns `None` when `index` is zero.
    pub fn new(kind: FocusKind, index: u32) -> Option<Focus> {
        (index >= 1).then_some(Focus { kind, index })
    }

    pub fn input(index: u32) -> Focus {
        Focus::new(FocusKind::Input, index).expect("register index must be positive")
    }

    pub fn aux(index: u32) -> Focus {
        Focus::new(FocusKind::Auxiliary, index).expect("register index must be positive")
    }

    pub fn output(index: u32) -> Focus {
        Focus::new(FocusKind::Output, index).expect("register index must be positive")
    }

    pub fn kind(self) -> FocusKind {
        self.kind
    }

    pub fn index(self) -> u32 {
        self.index
    }

    pub fn is_aux(self) -> bool {
        self.kind == FocusKind::Auxiliary
    }

    /// Same kind, different index.
    pub fn with_index(self, index: u32) -> Focus {
        Focus::new(self.kind, index).expect("register index must be positive")
    }
}

impl fmt::Display for Focus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.kind {
            FocusKind::Input => "in",
            FocusKind::Auxiliary => "aux",
            FocusKind::Output => "out",
        };
        write!(f, "{}:{}", prefix, self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    Get,
    Set0,
    Set1,
}

impl Method {
    /// The 0/1 exchange on methods: `set:0` and `set:1` trade places, `get` is fixed.
    pub fn exchanged(self) -> Method {
        match self {
            Method::Get => Method::Get,
            Method::Set0 => Method::Set1,
            Method::Set1 => Method::Set0,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Get => "get",
            Method::Set0 => "set:0",
            Method::Set1 => "set:1",
        })
    }
}

/// Numbers of input and output registers an instruction sequence may address.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Profile {
    pub inputs: u32,
    pub outputs: u32,
}

impl Profile {
    pub fn new(inputs: u32, outputs: u32) -> Profile {
        Profile { inputs, outputs }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.inputs, self.outputs)
    }
}

/// A basic instruction `f.m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasicInstruction {
    pub focus: Focus,
    pub method: Method,
}

impl BasicInstruction {
    pub fn new(focus: Focus, method: Method) -> BasicInstruction {
        BasicInstruction { focus, method }
    }

    /// Checks membership in the basic instructions admitted by `profile`.
    /// The error is a short human-readable reason.
    pub fn check_profile(&self, profile: Profile) -> Result<(), String> {
        match self.focus.kind {
            FocusKind::Input => {
                if self.method != Method::Get {
                    return Err("input registers admit only get".into());
                }
                if self.focus.index > profile.inputs {
                    return Err(format!(
                        "input register {} exceeds the profile's {} inputs",
                        self.focus.index, profile.inputs
                    ));
                }
            }
            FocusKind::Output => {
                if self.method == Method::Get {
                    return Err("output registers admit only set:0 and set:1".into());
                }
                if self.focus.index > profile.outputs {
                    return Err(format!(
                        "output register {} exceeds the profile's {} outputs",
                        self.focus.index, profile.outputs
                    ));
                }
            }
            FocusKind::Auxiliary => {}
        }
        Ok(())
    }

    pub fn bit_exchanged(self, indices: &BTreeSet<u32>) -> (BasicInstruction, bool) {
        if self.focus.is_aux() && indices.contains(&self.focus.index) {
            (BasicInstruction::new(self.focus, self.method.exchanged()), true)
        } else {
            (self, false)
        }
    }

    pub fn renumbered(self, perm: &Permutation) -> BasicInstruction {
        if self.focus.is_aux() {
            BasicInstruction::new(self.focus.with_index(perm.apply(self.focus.index)), self.method)
        } else {
            self
        }
    }
}

impl fmt::Display for BasicInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.focus, self.method)
    }
}

/// One primitive instruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Instruction {
    Plain(BasicInstruction),
    PosTest(BasicInstruction),
    NegTest(BasicInstruction),
    Jump(u32),
    Halt,
}

impl Instruction {
    pub fn basic(&self) -> Option<BasicInstruction> {
        match *self {
            Instruction::Plain(b) | Instruction::PosTest(b) | Instruction::NegTest(b) => Some(b),
            Instruction::Jump(_) | Instruction::Halt => None,
        }
    }

    fn map_basic(self, f: impl FnOnce(BasicInstruction) -> BasicInstruction) -> Instruction {
        match self {
            Instruction::Plain(b) => Instruction::Plain(f(b)),
            Instruction::PosTest(b) => Instruction::PosTest(f(b)),
            Instruction::NegTest(b) => Instruction::NegTest(f(b)),
            other => other,
        }
    }

    /// Instruction-level bit exchange: flips set methods and test polarity
    /// for auxiliary foci whose index is in `indices`.
    pub fn bit_exchanged(self, indices: &BTreeSet<u32>) -> Instruction {
        match self {
            Instruction::Plain(b) => Instruction::Plain(b.bit_exchanged(indices).0),
            Instruction::PosTest(b) => match b.bit_exchanged(indices) {
                (b, true) => Instruction::NegTest(b),
                (b, false) => Instruction::PosTest(b),
            },
            Instruction::NegTest(b) => match b.bit_exchanged(indices) {
                (b, true) => Instruction::PosTest(b),
                (b, false) => Instruction::NegTest(b),
            },
            other => other,
        }
    }

    pub fn renumbered(self, perm: &Permutation) -> Instruction {
        self.map_basic(|b| b.renumbered(perm))
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Plain(b) => write!(f, "{}", b),
            Instruction::PosTest(b) => write!(f, "+{}", b),
            Instruction::NegTest(b) => write!(f, "-{}", b),
            Instruction::Jump(l) => write!(f, "#{}", l),
            Instruction::Halt => f.write_str("!"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeqError {
    #[error("instruction sequences must contain at least one instruction")]
    Empty,
    #[error("instruction {position} ({instruction}): {reason}")]
    Profile {
        position: usize,
        instruction: String,
        reason: String,
    },
}

/// A finite, non-empty instruction sequence valid for its profile.
///
/// Equality and hashing look at the instructions only, so two sequences
/// are equal iff they have the same length and agree positionwise.
#[derive(Clone, Debug, Serialize)]
pub struct InstructionSeq {
    items: Vec<Instruction>,
    profile: Profile,
}

impl PartialEq for InstructionSeq {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items
    }
}

impl Eq for InstructionSeq {}

impl Hash for InstructionSeq {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.items.hash(state)
    }
}

impl InstructionSeq {
    pub fn new(items: Vec<Instruction>, profile: Profile) -> Result<InstructionSeq, SeqError> {
        if items.is_empty() {
            return Err(SeqError::Empty);
        }
        for (i, instr) in items.iter().enumerate() {
            if let Some(b) = instr.basic() {
                b.check_profile(profile).map_err(|reason| SeqError::Profile {
                    position: i + 1,
                    instruction: instr.to_string(),
                    reason,
                })?;
            }
        }
        Ok(InstructionSeq { items, profile })
    }

    /// Builds a sequence for the smallest profile that admits every instruction.
    pub fn with_inferred_profile(items: Vec<Instruction>) -> Result<InstructionSeq, SeqError> {
        let profile = infer_profile(&items);
        InstructionSeq::new(items, profile)
    }

    pub fn items(&self) -> &[Instruction] {
        &self.items
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    /// Re-validates the same instructions under a different profile.
    pub fn with_profile(&self, profile: Profile) -> Result<InstructionSeq, SeqError> {
        InstructionSeq::new(self.items.clone(), profile)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// Always false; kept for the `len`/`is_empty` convention.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The `k`th instruction (1-based), or `#0` past the end.
    pub fn instruction_at(&self, k: usize) -> Instruction {
        assert!(k >= 1, "instruction positions start at 1");
        self.items.get(k - 1).copied().unwrap_or(Instruction::Jump(0))
    }

    /// Concatenation. The result carries the larger of the two profiles.
    pub fn append(&self, other: &InstructionSeq) -> InstructionSeq {
        let mut items = self.items.clone();
        items.extend_from_slice(&other.items);
        let profile = Profile::new(
            self.profile.inputs.max(other.profile.inputs),
            self.profile.outputs.max(other.profile.outputs),
        );
        InstructionSeq { items, profile }
    }

    pub fn bit_exchange(&self, indices: &BTreeSet<u32>) -> InstructionSeq {
        InstructionSeq {
            items: self.items.iter().map(|i| i.bit_exchanged(indices)).collect(),
            profile: self.profile,
        }
    }

    pub fn renumber(&self, perm: &Permutation) -> InstructionSeq {
        InstructionSeq {
            items: self.items.iter().map(|i| i.renumbered(perm)).collect(),
            profile: self.profile,
        }
    }

    pub fn used_aux_indices(&self) -> BTreeSet<u32> {
        self.items
            .iter()
            .filter_map(Instruction::basic)
            .filter(|b| b.focus.is_aux())
            .map(|b| b.focus.index)
            .collect()
    }

    /// Renumbers the used auxiliary registers to `1..=k` in order of first
    /// occurrence. Returns the renumbered sequence, `k`, and the permutation used.
    pub fn compact_aux(&self) -> (InstructionSeq, u32, Permutation) {
        let perm = compaction_permutation(
            self.items
                .iter()
                .filter_map(Instruction::basic)
                .filter(|b| b.focus.is_aux())
                .map(|b| b.focus.index),
        );
        let k = self.used_aux_indices().len() as u32;
        (self.renumber(&perm), k, perm)
    }
}

impl fmt::Display for InstructionSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, instr) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}", instr)?;
        }
        Ok(())
    }
}

/// Canonical text rendering; `parse(&print(x), x.profile())` returns `x`.
pub fn print(seq: &InstructionSeq) -> String {
    seq.to_string()
}

pub fn infer_profile(items: &[Instruction]) -> Profile {
    let mut profile = Profile::new(0, 0);
    for b in items.iter().filter_map(Instruction::basic) {
        match b.focus.kind {
            FocusKind::Input => profile.inputs = profile.inputs.max(b.focus.index),
            FocusKind::Output => profile.outputs = profile.outputs.max(b.focus.index),
            FocusKind::Auxiliary => {}
        }
    }
    profile
}

/// The permutation sending the distinct indices of `occurrences`, in
/// first-occurrence order, to `1, 2, ...`, completed to a bijection.
pub fn compaction_permutation(occurrences: impl IntoIterator<Item = u32>) -> Permutation {
    let mut mapping = BTreeMap::new();
    for index in occurrences {
        let next = mapping.len() as u32 + 1;
        mapping.entry(index).or_insert(next);
    }
    Permutation::completing(&mapping)
}
