#![allow(dead_code)]

use std::collections::BTreeSet;

use algeq_core::pga::{BasicInstruction, Focus, Instruction, InstructionSeq, Method, Permutation, Profile};
use algeq_core::services::{Reply, Service, ServiceFamily};
use algeq_core::thread::{Action, Thread};
use proptest::prelude::*;

/// Basic instructions admitted by `(n, m)` with auxiliary indices `1..=aux`.
pub fn basics(n: u32, m: u32, aux: u32) -> Vec<BasicInstruction> {
    let mut out = Vec::new();
    for i in 1..=n {
        out.push(BasicInstruction::new(Focus::input(i), Method::Get));
    }
    for i in 1..=aux {
        for method in [Method::Get, Method::Set0, Method::Set1] {
            out.push(BasicInstruction::new(Focus::aux(i), method));
        }
    }
    for i in 1..=m {
        for method in [Method::Set0, Method::Set1] {
            out.push(BasicInstruction::new(Focus::output(i), method));
        }
    }
    out
}

pub fn arb_instruction(n: u32, m: u32, aux: u32, max_jump: u32) -> BoxedStrategy<Instruction> {
    let jumps = (0..=max_jump).prop_map(Instruction::Jump);
    let halt = Just(Instruction::Halt);
    let b = basics(n, m, aux);
    if b.is_empty() {
        return prop_oneof![jumps, halt].boxed();
    }
    let pick = proptest::sample::select(b);
    prop_oneof![
        3 => pick.clone().prop_map(Instruction::Plain),
        3 => pick.clone().prop_map(Instruction::PosTest),
        3 => pick.prop_map(Instruction::NegTest),
        2 => jumps,
        1 => halt,
    ]
    .boxed()
}

pub fn arb_seq_in(n: u32, m: u32, aux: u32, max_len: usize) -> BoxedStrategy<InstructionSeq> {
    proptest::collection::vec(arb_instruction(n, m, aux, max_len as u32 + 1), 1..=max_len)
        .prop_map(move |items| InstructionSeq::new(items, Profile::new(n, m)).unwrap())
        .boxed()
}

/// Sequences over a random profile with `n, m, aux ≤ 2`.
pub fn arb_seq(max_len: usize) -> BoxedStrategy<InstructionSeq> {
    (0..=2u32, 0..=2u32, 0..=2u32)
        .prop_flat_map(move |(n, m, aux)| arb_seq_in(n, m, aux, max_len))
        .boxed()
}

pub fn arb_subset(k: u32) -> BoxedStrategy<BTreeSet<u32>> {
    proptest::collection::btree_set(1..=k, 0..=k as usize).boxed()
}

pub fn arb_perm(k: u32) -> BoxedStrategy<Permutation> {
    proptest::sample::select(Permutation::all_of(k)).boxed()
}

pub fn arb_reply() -> impl Strategy<Value = Reply> {
    prop_oneof![Just(Reply::T), Just(Reply::F), Just(Reply::Div)]
}

/// Foci used when threads meet families: small enough that requests
/// often hit a present service, large enough that some miss.
pub fn focus_pool() -> Vec<Focus> {
    vec![Focus::input(1), Focus::aux(1), Focus::aux(2), Focus::output(1), Focus::output(2)]
}

pub fn arb_action(traced: bool) -> BoxedStrategy<Action> {
    let methods = [Method::Get, Method::Set0, Method::Set1];
    let b = (proptest::sample::select(focus_pool()), proptest::sample::select(methods.to_vec()))
        .prop_map(|(f, m)| BasicInstruction::new(f, m));
    if traced {
        prop_oneof![
            4 => b.clone().prop_map(Action::Basic),
            1 => (b, arb_reply()).prop_map(|(b, r)| Action::Traced(b, r)),
        ]
        .boxed()
    } else {
        b.prop_map(Action::Basic).boxed()
    }
}

/// Threads of depth at most `depth`.
pub fn arb_thread(depth: u32, traced: bool) -> BoxedStrategy<Thread> {
    let leaf = prop_oneof![Just(Thread::stop()), Just(Thread::dead())];
    leaf.prop_recursive(depth, 64, 2, move |inner| {
        (arb_action(traced), inner.clone(), inner).prop_map(|(a, x, y)| match a {
            Action::Traced(..) => Thread::prefix(a, x),
            Action::Basic(_) => Thread::post(a, x, y),
        })
    })
    .boxed()
}

pub fn arb_service() -> impl Strategy<Value = Service> {
    prop_oneof![
        3 => any::<bool>().prop_map(Service::BoolReg),
        1 => Just(Service::Empty),
    ]
}

/// Families over at most four foci of the pool.
pub fn arb_family() -> BoxedStrategy<ServiceFamily> {
    proptest::collection::btree_map(proptest::sample::select(focus_pool()), arb_service(), 0..=4)
        .prop_map(|entries| {
            entries
                .into_iter()
                .fold(ServiceFamily::empty(), |u, (f, s)| u.compose(&ServiceFamily::single(f, s)))
        })
        .boxed()
}

pub fn seq(text: &str, n: u32, m: u32) -> InstructionSeq {
    algeq_core::pga::parse(text, Profile::new(n, m)).unwrap()
}

pub fn bits_of(value: u64, len: u32) -> Vec<bool> {
    (0..len).map(|i| value >> (len - 1 - i) & 1 == 1).collect()
}
