//! The finite group generated by bit exchanges and renumberings of the
//! auxiliary registers `1..=k`, acting on threads and action sets.

use std::collections::BTreeSet;

use crate::pga::Permutation;
use crate::thread::{thread_bit_exchange, thread_renumber, Action, Thread};

use super::Move;

/// `t ↦ χ_flip(ρ_perm(t))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub flip: BTreeSet<u32>,
    pub perm: Permutation,
}

impl GroupElement {
    pub fn identity() -> GroupElement {
        GroupElement {
            flip: BTreeSet::new(),
            perm: Permutation::identity(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.flip.is_empty() && self.perm.is_identity()
    }

    pub fn act(&self, t: Thread) -> Thread {
        thread_bit_exchange(thread_renumber(t, &self.perm), &self.flip)
            .expect("group elements act on trace-free threads")
    }

    pub fn act_on_action(&self, a: Action) -> Action {
        let b = a.instruction().renumbered(&self.perm);
        let (b, _) = b.bit_exchanged(&self.flip);
        match a {
            Action::Basic(_) => Action::Basic(b),
            Action::Traced(_, r) => Action::Traced(b, r),
        }
    }

    /// Moves that undo this element: exchange first, then the inverse renumbering.
    pub fn inverse_moves(&self) -> Vec<Move> {
        let mut moves = Vec::new();
        if !self.flip.is_empty() {
            moves.push(Move::BitExchange(self.flip.clone()));
        }
        if !self.perm.is_identity() {
            moves.push(Move::Renumber(self.perm.inverse()));
        }
        moves
    }
}

/// Subsets of `{1..=k}` ordered by rank (size, then lexicographic).
pub fn subsets(k: u32) -> Vec<BTreeSet<u32>> {
    let mut all: Vec<BTreeSet<u32>> = (0..1u64 << k)
        .map(|mask| (1..=k).filter(|i| mask >> (i - 1) & 1 == 1).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
    all
}

/// Number of elements of the group on `k` registers, saturating.
pub fn group_order(k: u32) -> u64 {
    let fact = (1..=k as u64).try_fold(1u64, |acc, i| acc.checked_mul(i));
    fact.and_then(|f| f.checked_mul(1u64.checked_shl(k)?)).unwrap_or(u64::MAX)
}

/// All group elements: subsets by rank, permutations lexicographically within each.
pub fn elements(k: u32) -> Vec<GroupElement> {
    let perms = Permutation::all_of(k);
    let mut out = Vec::new();
    for flip in subsets(k) {
        for perm in &perms {
            out.push(GroupElement {
                flip: flip.clone(),
                perm: perm.clone(),
            });
        }
    }
    out
}

/// Least image of an action set over the group on `k` registers.
pub fn canonical_action_set(actions: &BTreeSet<Action>, k: u32) -> Vec<Action> {
    elements(k)
        .iter()
        .map(|g| {
            let image: BTreeSet<Action> = actions.iter().map(|a| g.act_on_action(*a)).collect();
            image.into_iter().collect::<Vec<_>>()
        })
        .min()
        .unwrap_or_default()
}
