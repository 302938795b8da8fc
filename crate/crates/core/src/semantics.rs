//! What an instruction sequence computes.
//!
//! [`run_algebraic`] evaluates a sequence through thread extraction,
//! abstracting use, apply and tracking use. [`interpret_direct`] is an
//! independent register machine that steps through the instructions; the
//! two must agree on output, definedness and step count.

use std::collections::BTreeMap;
use std::fmt::{self, Write};

use serde::Serialize;

use crate::pga::{BasicInstruction, FocusKind, Instruction, InstructionSeq, Method};
use crate::services::{abstracting_use, apply_explained, tracking_use, ServiceFamily};
use crate::thread::{extract, Thread};

pub type Bits = Vec<bool>;

pub fn bits_to_string(bits: &[bool]) -> String {
    if bits.is_empty() {
        return "ε".to_string();
    }
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// All bit vectors of length `n` in lexicographic order, register 1 first.
pub fn all_bits(n: u32) -> Vec<Bits> {
    (0..1u64 << n)
        .map(|v| (0..n).map(|i| v >> (n - 1 - i) & 1 == 1).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RunResult {
    Defined { output: Bits, steps: u32 },
    Undefined { steps: u32 },
}

impl RunResult {
    pub fn steps(&self) -> u32 {
        match self {
            RunResult::Defined { steps, .. } | RunResult::Undefined { steps } => *steps,
        }
    }

    pub fn output(&self) -> Option<&Bits> {
        match self {
            RunResult::Defined { output, .. } => Some(output),
            RunResult::Undefined { .. } => None,
        }
    }
}

impl fmt::Display for RunResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunResult::Defined { output, steps } => write!(f, "{} ({})", bits_to_string(output), plural_steps(*steps, *steps)),
            RunResult::Undefined { steps } => write!(f, "UNDEF ({})", plural_steps(*steps, *steps)),
        }
    }
}

fn plural_steps(min: u32, max: u32) -> String {
    match (min, max) {
        (1, 1) => "1 step".to_string(),
        (a, b) if a == b => format!("{} steps", a),
        (a, b) => format!("{}..{} steps", a, b),
    }
}

/// The input and auxiliary register family used by the computation judgment.
pub fn machine_family(inputs: &[bool], aux_init: &[bool]) -> ServiceFamily {
    ServiceFamily::registers(FocusKind::Input, inputs).compose(&ServiceFamily::registers(FocusKind::Auxiliary, aux_init))
}

/// Evaluates `t` against input and auxiliary registers, then applies the
/// result to output registers initialised to 0. Steps are the depth of the
/// doubly tracked thread.
pub fn run_thread(t: Thread, inputs: &[bool], aux_init: &[bool], outputs: u32) -> RunResult {
    let family = machine_family(inputs, aux_init);
    let out_family = ServiceFamily::registers(FocusKind::Output, &vec![false; outputs as usize]);
    let steps = tracking_use(tracking_use(t, &family), &out_family).depth();
    let (result, stuck) = apply_explained(abstracting_use(t, &family), &out_family);
    match (stuck, result.register_bits(FocusKind::Output, outputs)) {
        (None, Some(output)) => RunResult::Defined { output, steps },
        _ => RunResult::Undefined { steps },
    }
}

pub fn run_algebraic(seq: &InstructionSeq, inputs: &[bool], aux_init: &[bool]) -> RunResult {
    assert_eq!(inputs.len(), seq.profile().inputs as usize, "one bit per input register");
    run_thread(extract(seq), inputs, aux_init, seq.profile().outputs)
}

/// Register-machine state for [`interpret_direct`].
#[derive(Clone, Debug)]
pub struct MachineState {
    pub pc: usize,
    pub inputs: Bits,
    pub auxs: BTreeMap<u32, bool>,
    pub outs: Bits,
}

impl MachineState {
    fn request(&mut self, b: BasicInstruction) -> Option<bool> {
        let i = b.focus.index();
        let reg = match b.focus.kind() {
            FocusKind::Input => return self.inputs.get(i as usize - 1).copied(),
            FocusKind::Auxiliary => self.auxs.get_mut(&i)?,
            FocusKind::Output => self.outs.get_mut(i as usize - 1)?,
        };
        match b.method {
            Method::Get => Some(*reg),
            Method::Set0 => {
                *reg = false;
                Some(false)
            }
            Method::Set1 => {
                *reg = true;
                Some(true)
            }
        }
    }
}

/// Steps through the instructions directly. Requests to registers missing
/// from the machine make the run undefined; agreement with
/// [`run_algebraic`] is only claimed when `aux_init` covers every used
/// auxiliary register.
pub fn interpret_direct(seq: &InstructionSeq, inputs: &[bool], aux_init: &[bool]) -> RunResult {
    let mut state = MachineState {
        pc: 1,
        inputs: inputs.to_vec(),
        auxs: aux_init.iter().enumerate().map(|(i, &b)| (i as u32 + 1, b)).collect(),
        outs: vec![false; seq.profile().outputs as usize],
    };
    let mut steps = 0;
    loop {
        if state.pc > seq.len() {
            return RunResult::Undefined { steps };
        }
        match seq.instruction_at(state.pc) {
            Instruction::Halt => return RunResult::Defined { output: state.outs, steps },
            Instruction::Jump(0) => return RunResult::Undefined { steps },
            Instruction::Jump(l) => state.pc += l as usize,
            Instruction::Plain(b) => {
                steps += 1;
                if state.request(b).is_none() {
                    return RunResult::Undefined { steps };
                }
                state.pc += 1;
            }
            Instruction::PosTest(b) => {
                steps += 1;
                let Some(reply) = state.request(b) else {
                    return RunResult::Undefined { steps };
                };
                state.pc += if reply { 1 } else { 2 };
            }
            Instruction::NegTest(b) => {
                steps += 1;
                let Some(reply) = state.request(b) else {
                    return RunResult::Undefined { steps };
                };
                state.pc += if reply { 2 } else { 1 };
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Entry {
    Defined { output: Bits, steps: BTreeMap<String, u32> },
    Undefined { steps: BTreeMap<String, u32> },
}

impl Entry {
    pub fn steps(&self) -> &BTreeMap<String, u32> {
        match self {
            Entry::Defined { steps, .. } | Entry::Undefined { steps } => steps,
        }
    }

    pub fn step_range(&self) -> (u32, u32) {
        let s = self.steps();
        (
            s.values().copied().min().unwrap_or(0),
            s.values().copied().max().unwrap_or(0),
        )
    }

    pub fn output(&self) -> Option<&Bits> {
        match self {
            Entry::Defined { output, .. } => Some(output),
            Entry::Undefined { .. } => None,
        }
    }
}

/// A partial function from `n` to `m` bits with step counts per auxiliary
/// initialisation (keyed by the aux bits as a string).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctionTable {
    pub n: u32,
    pub m: u32,
    pub aux_count: u32,
    pub rows: Vec<(Bits, Entry)>,
}

impl FunctionTable {
    pub fn get(&self, input: &[bool]) -> Option<&Entry> {
        self.rows.iter().find(|(i, _)| i == input).map(|(_, e)| e)
    }

    /// Same partial function, ignoring step counts.
    pub fn same_function(&self, other: &FunctionTable) -> bool {
        self.n == other.n
            && self.m == other.m
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|((a, x), (b, y))| a == b && x.output() == y.output())
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (input, entry) in &self.rows {
            let (lo, hi) = entry.step_range();
            let value = match entry.output() {
                Some(o) => bits_to_string(o),
                None => "UNDEF".to_string(),
            };
            writeln!(out, "{}→{} ({})", bits_to_string(input), value, plural_steps(lo, hi)).unwrap();
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("input_bits,output_bits,steps_min,steps_max\n");
        for (input, entry) in &self.rows {
            let (lo, hi) = entry.step_range();
            let value = match entry.output() {
                Some(o) => bits_to_string(o),
                None => "UNDEF".to_string(),
            };
            writeln!(out, "{},{},{},{}", bits_to_string(input), value, lo, hi).unwrap();
        }
        out
    }
}

/// Two auxiliary initialisations that disagree on the result for one input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuxWitness {
    pub input: Bits,
    pub aux_a: Bits,
    pub result_a: RunResult,
    pub aux_b: Bits,
    pub result_b: RunResult,
}

impl fmt::Display for AuxWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "input {}: aux {} gives {}, aux {} gives {}",
            bits_to_string(&self.input),
            bits_to_string(&self.aux_a),
            self.result_a,
            bits_to_string(&self.aux_b),
            self.result_b
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Computed {
    Table(FunctionTable),
    /// The result depends on the initial auxiliary contents, so the sequence computes no function.
    AuxSensitive(AuxWitness),
}

/// Default auxiliary register count: the largest used index.
pub fn default_aux_count(seq: &InstructionSeq) -> u32 {
    seq.used_aux_indices().last().copied().unwrap_or(0)
}

/// Evaluates every input against every auxiliary initialisation of
/// `aux_count` registers (default: the largest used index).
pub fn computed_function(seq: &InstructionSeq, aux_count: Option<u32>) -> Computed {
    let l = aux_count.unwrap_or_else(|| default_aux_count(seq));
    let t = extract(seq);
    let profile = seq.profile();
    let mut rows = Vec::new();
    for input in all_bits(profile.inputs) {
        let mut first: Option<(Bits, RunResult)> = None;
        let mut steps = BTreeMap::new();
        for aux in all_bits(l) {
            let r = run_thread(t, &input, &aux, profile.outputs);
            steps.insert(bits_to_string(&aux), r.steps());
            match &first {
                None => first = Some((aux, r)),
                Some((aux_a, ra)) => {
                    if ra.output() != r.output() {
                        return Computed::AuxSensitive(AuxWitness {
                            input,
                            aux_a: aux_a.clone(),
                            result_a: ra.clone(),
                            aux_b: aux,
                            result_b: r,
                        });
                    }
                }
            }
        }
        let (_, r) = first.expect("at least one auxiliary initialisation");
        let entry = match r {
            RunResult::Defined { output, .. } => Entry::Defined { output, steps },
            RunResult::Undefined { .. } => Entry::Undefined { steps },
        };
        rows.push((input, entry));
    }
    Computed::Table(FunctionTable {
        n: profile.inputs,
        m: profile.outputs,
        aux_count: l,
        rows,
    })
}

/// Builds a sequence computing `f` by testing the inputs in order and, at
/// each leaf, setting the 1-bits of the output and halting (or `#0` where
/// `f` is undefined).
pub fn synthesize(n: u32, m: u32, f: &dyn Fn(&[bool]) -> Option<Bits>) -> InstructionSeq {
    use crate::pga::{Focus, Profile};
    fn block(i: u32, n: u32, prefix: &mut Bits, f: &dyn Fn(&[bool]) -> Option<Bits>) -> Vec<Instruction> {
        if i > n {
            return match f(prefix) {
                Some(out) => {
                    let mut v: Vec<Instruction> = out
                        .iter()
                        .enumerate()
                        .filter(|(_, &b)| b)
                        .map(|(j, _)| Instruction::Plain(BasicInstruction::new(Focus::output(j as u32 + 1), Method::Set1)))
                        .collect();
                    v.push(Instruction::Halt);
                    v
                }
                None => vec![Instruction::Jump(0)],
            };
        }
        prefix.push(true);
        let on_one = block(i + 1, n, prefix, f);
        prefix.pop();
        prefix.push(false);
        let on_zero = block(i + 1, n, prefix, f);
        prefix.pop();
        let mut v = vec![
            Instruction::PosTest(BasicInstruction::new(Focus::input(i), Method::Get)),
            Instruction::Jump(2),
            Instruction::Jump(on_one.len() as u32 + 1),
        ];
        v.extend(on_one);
        v.extend(on_zero);
        v
    }
    let items = block(1, n, &mut Vec::new(), f);
    InstructionSeq::new(items, Profile::new(n, m)).expect("synthesized instructions fit the profile")
}
