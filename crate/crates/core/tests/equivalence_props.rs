mod common;

use std::collections::BTreeSet;
use std::time::Duration;

use algeq_core::equivalence::group::canonical_action_set;
use algeq_core::equivalence::{
    bit_exchange_equivalent, check_witness, decide, renumber_equivalent, universe_closure, Budget, Move, Relation,
    UniverseBounds, Verdict,
};
use algeq_core::pga::{compaction_permutation, parse, FocusKind, InstructionSeq, Permutation, Profile};
use algeq_core::services::{abstracting_use, apply, tracking_use, ServiceFamily};
use algeq_core::thread::{
    action_set, aux_first_occurrence, extract, leaf_multiset, linearize, redex_paths, thread_renumber, Thread,
};
use common::{arb_perm, arb_seq_in, arb_subset, bits_of};
use proptest::prelude::*;

fn budget() -> Budget {
    Budget {
        max_states: 200_000,
        max_time: Duration::from_secs(10),
    }
}

#[derive(Clone, Debug)]
enum Step {
    Flip(BTreeSet<u32>),
    Perm(Permutation),
    Swap(usize),
    Behaviour,
}

fn arb_step() -> impl Strategy<Value = Step> {
    prop_oneof![
        1 => arb_subset(2).prop_map(Step::Flip),
        1 => arb_perm(2).prop_map(Step::Perm),
        2 => any::<usize>().prop_map(Step::Swap),
        1 => Just(Step::Behaviour),
    ]
}

fn arb_chain() -> impl Strategy<Value = (InstructionSeq, Vec<Step>)> {
    (0..=2u32, 0..=2u32)
        .prop_flat_map(|(n, m)| (arb_seq_in(n, m, 2, 8), proptest::collection::vec(arb_step(), 1..=4)))
}

/// Resolves the steps against the threads they meet; swaps without a redex are dropped.
fn realise(start: Thread, steps: &[Step]) -> Vec<Move> {
    let mut t = start;
    let mut moves = Vec::new();
    for step in steps {
        let mv = match step {
            Step::Flip(set) => Move::BitExchange(set.clone()),
            Step::Perm(p) => Move::Renumber(p.clone()),
            Step::Behaviour => Move::Behaviour,
            Step::Swap(k) => {
                let paths = redex_paths(t);
                if paths.is_empty() {
                    continue;
                }
                Move::Transpose(paths[k % paths.len()].clone())
            }
        };
        t = mv.apply_basic(t).unwrap();
        moves.push(mv);
    }
    moves
}

/// The aux initialisation under which the moved thread reproduces the run
/// of the original thread on `aux`.
fn corresponding_aux(moves: &[Move], aux: &[bool]) -> Vec<bool> {
    let mut b = aux.to_vec();
    for mv in moves {
        match mv {
            Move::BitExchange(set) => {
                for &i in set {
                    b[i as usize - 1] ^= true;
                }
            }
            Move::Renumber(p) => {
                let mut next = b.clone();
                for i in 1..=b.len() as u32 {
                    next[p.apply(i) as usize - 1] = b[i as usize - 1];
                }
                b = next;
            }
            _ => {}
        }
    }
    b
}

fn registers(kind: FocusKind, bits: &[bool]) -> ServiceFamily {
    ServiceFamily::registers(kind, bits)
}

/// Orbit-canonical action set of the compacted thread.
fn canonical_actions(t: Thread) -> Vec<String> {
    let occ = aux_first_occurrence(t);
    let k = occ.len() as u32;
    let compact = thread_renumber(t, &compaction_permutation(occ));
    canonical_action_set(&action_set(compact), k).iter().map(ToString::to_string).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn moved_threads_keep_their_run_results((x, steps) in arb_chain()) {
        let profile = x.profile();
        let tx = extract(&x);
        let moves = realise(tx, &steps);
        let ty = moves.iter().try_fold(tx, |t, m| m.apply_basic(t)).unwrap();
        let outputs = registers(FocusKind::Output, &vec![false; profile.outputs as usize]);
        for a in 0..4 {
            let aux = bits_of(a, 2);
            let aux_y = corresponding_aux(&moves, &aux);
            for i in 0..1u64 << profile.inputs {
                let input = registers(FocusKind::Input, &bits_of(i, profile.inputs));
                let fx = input.compose(&registers(FocusKind::Auxiliary, &aux));
                let fy = input.compose(&registers(FocusKind::Auxiliary, &aux_y));
                prop_assert_eq!(apply(abstracting_use(tx, &fx), &outputs), apply(abstracting_use(ty, &fy), &outputs));
                prop_assert_eq!(
                    tracking_use(tracking_use(tx, &fx), &outputs).depth(),
                    tracking_use(tracking_use(ty, &fy), &outputs).depth()
                );
            }
        }
    }

    #[test]
    fn certificates_are_invariant_under_every_move((x, steps) in arb_chain()) {
        let tx = extract(&x);
        let (depth, leaves, actions) = (tx.depth(), leaf_multiset(tx), canonical_actions(tx));
        let mut t = tx;
        for mv in realise(tx, &steps) {
            t = mv.apply_basic(t).unwrap();
            prop_assert_eq!(t.depth(), depth, "depth after {}", mv);
            prop_assert_eq!(leaf_multiset(t), leaves.clone(), "leaves after {}", mv);
            prop_assert_eq!(canonical_actions(t), actions.clone(), "action set after {}", mv);
        }
    }

    #[test]
    fn sa_finds_chains_and_its_witnesses_replay((x, steps) in arb_chain()) {
        let tx = extract(&x);
        let moves = realise(tx, &steps);
        let ty = moves.iter().try_fold(tx, |t, m| m.apply_basic(t)).unwrap();
        let y = linearize(ty, x.profile()).unwrap();
        let verdict = decide(Relation::StructuralAlgorithmic, &x, &y, budget()).unwrap();
        prop_assert!(!verdict.is_inequivalent(), "{} vs {}: {:?}", x, y, verdict);
        if let Verdict::Equivalent { witness } = &verdict {
            prop_assert!(check_witness(tx, ty, witness, x.profile().inputs).is_ok());
        }
        let back = decide(Relation::StructuralAlgorithmic, &y, &x, budget()).unwrap();
        prop_assert_eq!(back.label(), verdict.label());
    }

    #[test]
    fn every_relation_gives_replayable_witnesses(x in arb_seq_in(1, 1, 2, 6), y in arb_seq_in(1, 1, 2, 6)) {
        for rel in Relation::ALL {
            for (a, b) in [(&x, &y), (&x, &x)] {
                let verdict = decide(rel, a, b, budget()).unwrap();
                if a == b {
                    prop_assert!(verdict.is_equivalent(), "{} not reflexive on {}", rel, a);
                }
                if let Verdict::Equivalent { witness } = verdict {
                    prop_assert!(check_witness(extract(a), extract(b), &witness, 1).is_ok(), "{} witness for {} vs {}", rel, a, b);
                }
            }
        }
    }

    #[test]
    fn generator_relations_are_symmetric(x in arb_seq_in(1, 1, 2, 6), i in arb_subset(2), p in arb_perm(2), k in any::<usize>()) {
        let flipped = x.bit_exchange(&i);
        prop_assert!(bit_exchange_equivalent(&x, &flipped).is_some());
        prop_assert!(bit_exchange_equivalent(&flipped, &x).is_some());
        let moved = x.renumber(&p);
        prop_assert!(renumber_equivalent(&x, &moved).is_ok());
        prop_assert!(renumber_equivalent(&moved, &x).is_ok());
        // a swap undone by the swap at the same position
        let t = extract(&x);
        let paths = redex_paths(t);
        if !paths.is_empty() {
            let path = &paths[k % paths.len()];
            let swapped = t.transpose_at(path).unwrap();
            prop_assert_eq!(swapped.transpose_at(path), Some(t));
        }
    }

    #[test]
    fn generator_relations_are_transitive(x in arb_seq_in(1, 1, 2, 6), i in arb_subset(2), j in arb_subset(2), p in arb_perm(2), q in arb_perm(2)) {
        let y = x.bit_exchange(&i);
        let z = y.bit_exchange(&j);
        prop_assert!(bit_exchange_equivalent(&x, &z).is_some());
        let y = x.renumber(&p);
        let z = y.renumber(&q);
        prop_assert!(renumber_equivalent(&x, &z).is_ok());
    }
}

#[test]
fn oracle_partitions_agree_with_the_tool_on_a_small_universe() {
    let bounds = UniverseBounds {
        max_len: 2,
        inputs: 1,
        outputs: 1,
        aux_bound: 1,
        max_jump: 3,
    };
    let universe = universe_closure(bounds).unwrap();
    let profile = Profile::new(1, 1);
    let seqs: Vec<InstructionSeq> = universe.sequences.iter().map(|s| parse(s, profile).unwrap()).collect();
    assert!(universe.sa.refines(&universe.sc));
    for class in &universe.sa.classes {
        for &j in &class[1..] {
            let v = decide(Relation::StructuralAlgorithmic, &seqs[class[0]], &seqs[j], budget()).unwrap();
            assert!(v.is_equivalent(), "{} vs {}: {:?}", seqs[class[0]], seqs[j], v);
        }
    }
    for i in (0..seqs.len()).step_by(7) {
        for j in (0..seqs.len()).step_by(11) {
            let v = decide(Relation::StructuralAlgorithmic, &seqs[i], &seqs[j], budget()).unwrap();
            if v.is_inequivalent() {
                assert!(!universe.sa.same_class(i, j), "{} vs {}", seqs[i], seqs[j]);
            }
        }
    }
}

#[test]
fn sa_is_strictly_finer_than_sc() {
    let profile = Profile::new(1, 1);
    // the out:1.set:1 branch needs in:1 to read 1 and then 0
    let x = parse("+in:1.get; #2; #5; +in:1.get; #3; out:1.set:1; !; out:1.set:0; !", profile).unwrap();
    let y = parse("+in:1.get; #2; #5; +in:1.get; #3; out:1.set:0; !; out:1.set:0; !", profile).unwrap();
    let sc = decide(Relation::StructuralComputational, &x, &y, budget()).unwrap();
    let sa = decide(Relation::StructuralAlgorithmic, &x, &y, budget()).unwrap();
    assert!(sc.is_equivalent(), "{:?}", sc);
    assert!(sa.is_inequivalent(), "{:?}", sa);
}
