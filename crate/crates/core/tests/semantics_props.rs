mod common;

use algeq_core::semantics::{all_bits, computed_function, interpret_direct, run_algebraic, synthesize, Bits, Computed};
use common::{arb_seq, bits_of};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn algebraic_and_direct_runs_agree(x in arb_seq(10)) {
        let n = x.profile().inputs;
        for input in all_bits(n) {
            for aux in all_bits(2) {
                prop_assert_eq!(
                    run_algebraic(&x, &input, &aux),
                    interpret_direct(&x, &input, &aux),
                    "input {:?} aux {:?} on {}", input, aux, x
                );
            }
        }
    }

    #[test]
    fn unused_aux_registers_change_nothing(x in arb_seq(10), extra in proptest::collection::vec(any::<bool>(), 1..3)) {
        let n = x.profile().inputs;
        for input in all_bits(n) {
            for aux in all_bits(2) {
                let mut wider = aux.clone();
                wider.extend(&extra);
                prop_assert_eq!(run_algebraic(&x, &input, &wider), run_algebraic(&x, &input, &aux));
            }
        }
    }
}

/// Every partial function `{0,1}^n → {0,1}^m` as a value table, with
/// `None` marking undefined inputs.
fn all_tables(n: u32, m: u32) -> Vec<Vec<Option<Bits>>> {
    let rows = 1usize << n;
    let choices = (1u64 << m) + 1;
    let total = choices.pow(rows as u32);
    (0..total)
        .map(|mut code| {
            (0..rows)
                .map(|_| {
                    let c = code % choices;
                    code /= choices;
                    (c > 0).then(|| bits_of(c - 1, m))
                })
                .collect()
        })
        .collect()
}

#[test]
fn every_small_table_is_computed_by_some_sequence() {
    for n in 0..=2 {
        for m in 0..=2 {
            for table in all_tables(n, m) {
                let lookup = |input: &[bool]| {
                    let row = input.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
                    table[row].clone()
                };
                let x = synthesize(n, m, &lookup);
                let Computed::Table(computed) = computed_function(&x, None) else {
                    panic!("{} depends on auxiliary registers", x);
                };
                for input in all_bits(n) {
                    let entry = computed.get(&input).unwrap();
                    assert_eq!(entry.output().cloned(), lookup(&input), "{} on {:?}", x, input);
                }
            }
        }
    }
}
