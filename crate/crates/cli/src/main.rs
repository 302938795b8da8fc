//! `algeq`: batch queries over instruction sequences.
//!
//! Exit codes: 0 equivalent or success, 1 inequivalent, 2 unknown,
//! 3 and above for usage and input errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use algeq_core::equivalence::{
    check_witness, decide, parse_witness, render_witness, universe_closure, Budget, Relation, UniverseBounds, Verdict,
};
use algeq_core::pga::{infer_profile, parse_items, InstructionSeq, Profile};
use algeq_core::projection::{parse_loop, project_loop, validate_notation, ProgramNotation};
use algeq_core::semantics::{bits_to_string, computed_function, default_aux_count, run_algebraic, Computed, RunResult};
use algeq_core::thread::{extract, render_graph, render_tree};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

const EXIT_USAGE: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "algeq", version, about = "Equivalence of instruction sequences over Boolean registers")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Number of input registers (inferred from the files when absent).
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Number of output registers (inferred from the files when absent).
    #[arg(long, global = true)]
    m: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Notation::Pga)]
    notation: Notation,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Notation {
    Pga,
    Loop,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Style {
    Tree,
    Graph,
    Term,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Closure {
    Sa,
    Sc,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical form of a program (loops are unrolled).
    Parse { file: PathBuf },
    /// Print the thread extracted from a program.
    Extract {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Style::Tree)]
        style: Style,
    },
    /// Print the function computed by a program.
    Table {
        file: PathBuf,
        /// Number of auxiliary registers to initialise (default: the largest used index).
        #[arg(long)]
        aux: Option<u32>,
    },
    /// Run a program on one input and report its step count.
    Steps {
        file: PathBuf,
        /// Input bits, `in:1` first.
        #[arg(long, default_value = "")]
        input: String,
        /// Initial auxiliary bits, `aux:1` first (default: all zero).
        #[arg(long)]
        aux_init: Option<String>,
    },
    /// Decide an equivalence relation between two programs.
    Equiv {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value = "sa", value_parser = parse_relation)]
        rel: Relation,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Write the witness of an equivalent verdict to this file.
        #[arg(long)]
        witness_out: Option<PathBuf>,
        /// Check a witness file instead of searching.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Partition every sequence within small bounds by brute force.
    Oracle {
        #[arg(long, default_value_t = 3)]
        max_len: u32,
        #[arg(long, default_value_t = 1)]
        aux: u32,
        #[arg(long, default_value_t = 4)]
        max_jump: u32,
        #[arg(long, value_enum, default_value_t = Closure::Sa)]
        closure: Closure,
    },
    /// Check the admissibility conditions of a notation on sample programs.
    ValidateNotation { samples: Vec<PathBuf> },
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, env = "ALGEQ_BUDGET_STATES", default_value_t = 1_000_000)]
    budget_states: usize,
    #[arg(long, env = "ALGEQ_BUDGET_SECS", default_value_t = 10.0)]
    budget_secs: f64,
}

fn parse_relation(s: &str) -> Result<Relation, String> {
    s.parse()
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type Outcome = Result<(String, u8), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(EXIT_INPUT, format!("{}: {}", path.display(), e)))
}

/// Instructions of a program with a profile wide enough for any register.
fn raw_items(text: &str, notation: Notation, path: &Path) -> Result<Vec<algeq_core::pga::Instruction>, Failure> {
    let err = |e: &dyn std::fmt::Display| fail(EXIT_INPUT, format!("{}:{}", path.display(), e));
    match notation {
        Notation::Pga => parse_items(text).map_err(|e| err(&e)),
        Notation::Loop => {
            let p = parse_loop(text, Profile::new(u32::MAX, u32::MAX)).map_err(|e| err(&e))?;
            project_loop(&p).map(|s| s.items().to_vec()).map_err(|e| err(&e))
        }
    }
}

/// Loads programs with the profile from the flags, filling in missing
/// components from the largest registers used across all of them.
fn load_all(paths: &[&Path], common: &Common) -> Result<Vec<InstructionSeq>, Failure> {
    let texts = paths.iter().map(|p| read(p)).collect::<Result<Vec<_>, _>>()?;
    let items = paths
        .iter()
        .zip(&texts)
        .map(|(p, t)| raw_items(t, common.notation, p))
        .collect::<Result<Vec<_>, _>>()?;
    let inferred = items.iter().map(|i| infer_profile(i)).fold(Profile::new(0, 0), |a, b| {
        Profile::new(a.inputs.max(b.inputs), a.outputs.max(b.outputs))
    });
    let profile = Profile::new(common.n.unwrap_or(inferred.inputs), common.m.unwrap_or(inferred.outputs));
    paths
        .iter()
        .zip(&texts)
        .map(|(p, text)| {
            let pn = match common.notation {
                Notation::Pga => ProgramNotation::pga(profile),
                Notation::Loop => ProgramNotation::loops(profile),
            };
            pn.project(text)
                .map_err(|e| fail(EXIT_INPUT, format!("{}:{}", p.display(), e)))
        })
        .collect()
}

fn load(path: &Path, common: &Common) -> Result<InstructionSeq, Failure> {
    Ok(load_all(&[path], common)?.remove(0))
}

fn parse_bits(text: &str, len: u32, what: &str) -> Result<Vec<bool>, Failure> {
    let bits = text
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(fail(EXIT_USAGE, format!("{} must consist of 0 and 1, found {:?}", what, c))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if bits.len() != len as usize {
        return Err(fail(
            EXIT_USAGE,
            format!("{} needs {} bits, found {}", what, len, bits.len()),
        ));
    }
    Ok(bits)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_parse(file: &Path, common: &Common) -> Outcome {
    let x = load(file, common)?;
    let p = x.profile();
    Ok(match common.format {
        Format::Text => (format!("{}\n", x), 0),
        Format::Csv => (
            format!("n,m,length,text\n{},{},{},{}\n", p.inputs, p.outputs, x.len(), csv_field(&x.to_string())),
            0,
        ),
        Format::Jsonl => (
            format!("{}\n", json!({"n": p.inputs, "m": p.outputs, "length": x.len(), "text": x.to_string()})),
            0,
        ),
    })
}

fn cmd_extract(file: &Path, style: Style, common: &Common) -> Outcome {
    let t = extract(&load(file, common)?);
    let body = match style {
        Style::Tree => render_tree(t),
        Style::Graph => render_graph(t),
        Style::Term => format!("{}\n", t),
    };
    Ok(match common.format {
        Format::Jsonl => (format!("{}\n", json!({"depth": t.depth(), "thread": t.to_string()})), 0),
        _ => (body, 0),
    })
}

fn cmd_table(file: &Path, aux: Option<u32>, common: &Common) -> Outcome {
    let x = load(file, common)?;
    Ok(match computed_function(&x, aux) {
        Computed::Table(table) => match common.format {
            Format::Text => (table.render_text(), 0),
            Format::Csv => (table.render_csv(), 0),
            Format::Jsonl => {
                let mut out = String::new();
                for (input, entry) in &table.rows {
                    let (lo, hi) = entry.step_range();
                    let line = json!({
                        "input": bits_to_string(input),
                        "output": entry.output().map(|o| bits_to_string(o)),
                        "steps_min": lo,
                        "steps_max": hi,
                    });
                    writeln!(out, "{}", line).unwrap();
                }
                (out, 0)
            }
        },
        Computed::AuxSensitive(w) => match common.format {
            Format::Jsonl => (format!("{}\n", json!({"aux_sensitive": w.to_string()})), 0),
            _ => (format!("computes no function: {}\n", w), 0),
        },
    })
}

fn cmd_steps(file: &Path, input: &str, aux_init: Option<&str>, common: &Common) -> Outcome {
    let x = load(file, common)?;
    let inputs = parse_bits(input, x.profile().inputs, "--input")?;
    let aux = match aux_init {
        Some(a) => parse_bits(a, a.len() as u32, "--aux-init")?,
        None => vec![false; default_aux_count(&x) as usize],
    };
    if (aux.len() as u32) < default_aux_count(&x) {
        return Err(fail(
            EXIT_USAGE,
            format!("--aux-init needs at least {} bits", default_aux_count(&x)),
        ));
    }
    let r = run_algebraic(&x, &inputs, &aux);
    let output = match &r {
        RunResult::Defined { output, .. } => Some(bits_to_string(output)),
        RunResult::Undefined { .. } => None,
    };
    Ok(match common.format {
        Format::Text => (
            format!(
                "output: {}\nsteps: {}\n",
                output.as_deref().unwrap_or("undefined"),
                r.steps()
            ),
            0,
        ),
        Format::Csv => (
            format!("output_bits,steps\n{},{}\n", output.as_deref().unwrap_or("UNDEF"), r.steps()),
            0,
        ),
        Format::Jsonl => (format!("{}\n", json!({"output": output, "steps": r.steps()})), 0),
    })
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Equivalent { .. } => 0,
        Verdict::Inequivalent { .. } => 1,
        Verdict::Unknown { .. } => 2,
    }
}

fn verdict_detail(v: &Verdict) -> String {
    match v {
        Verdict::Equivalent { witness } => render_witness(witness).trim_end().replace('\n', "; "),
        Verdict::Inequivalent { certificate } => certificate.to_string(),
        Verdict::Unknown { report } => report.to_string(),
    }
}

fn render_verdict(rel: Relation, v: &Verdict, format: Format) -> String {
    match format {
        Format::Text => {
            let mut out = format!("relation: {}\nverdict: {}\n", rel, v.label());
            match v {
                Verdict::Equivalent { witness } => {
                    writeln!(out, "witness: {} move(s)", witness.len()).unwrap();
                    for m in witness {
                        writeln!(out, "  {}", m).unwrap();
                    }
                }
                Verdict::Inequivalent { certificate } => writeln!(out, "certificate: {}", certificate).unwrap(),
                Verdict::Unknown { report } => writeln!(out, "report: {}", report).unwrap(),
            }
            out
        }
        Format::Csv => format!(
            "relation,verdict,detail\n{},{},{}\n",
            rel,
            v.label(),
            csv_field(&verdict_detail(v))
        ),
        Format::Jsonl => {
            let mut obj = json!({"relation": rel.short_name(), "verdict": v.label()});
            match v {
                Verdict::Equivalent { witness } => obj["witness"] = json!(witness),
                Verdict::Inequivalent { certificate } => {
                    obj["certificate"] = json!(certificate);
                    obj["explanation"] = json!(certificate.to_string());
                }
                Verdict::Unknown { report } => obj["report"] = json!(report),
            }
            format!("{}\n", obj)
        }
    }
}

fn cmd_equiv(
    left: &Path,
    right: &Path,
    rel: Relation,
    budget: &BudgetArgs,
    witness_out: Option<&Path>,
    replay: Option<&Path>,
    common: &Common,
) -> Outcome {
    let seqs = load_all(&[left, right], common)?;
    let (x, y) = (&seqs[0], &seqs[1]);
    if let Some(path) = replay {
        let moves = parse_witness(&read(path)?).map_err(|e| fail(EXIT_INPUT, format!("{}: {}", path.display(), e)))?;
        let inputs = x.profile().inputs;
        return Ok(match check_witness(extract(x), extract(y), &moves, inputs) {
            Ok(()) => (format!("replay: ok ({} move(s))\n", moves.len()), 0),
            Err(e) => (format!("replay: failed: {}\n", e), 1),
        });
    }
    if !(budget.budget_secs > 0.0 && budget.budget_secs.is_finite()) || budget.budget_states == 0 {
        return Err(fail(EXIT_USAGE, "budgets must be positive"));
    }
    let b = Budget {
        max_states: budget.budget_states,
        max_time: Duration::from_secs_f64(budget.budget_secs),
    };
    let v = decide(rel, x, y, b).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    if let (Some(path), Some(w)) = (witness_out, v.witness()) {
        fs::write(path, render_witness(w)).map_err(|e| fail(EXIT_INPUT, format!("{}: {}", path.display(), e)))?;
    }
    Ok((render_verdict(rel, &v, common.format), verdict_code(&v)))
}

fn cmd_oracle(max_len: u32, aux: u32, max_jump: u32, closure: Closure, common: &Common) -> Outcome {
    let bounds = UniverseBounds {
        max_len,
        inputs: common.n.unwrap_or(1),
        outputs: common.m.unwrap_or(1),
        aux_bound: aux,
        max_jump,
    };
    let u = universe_closure(bounds).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let partition = match closure {
        Closure::Sa => &u.sa,
        Closure::Sc => &u.sc,
    };
    let mut out = String::new();
    match common.format {
        Format::Text => {
            writeln!(
                out,
                "bounds: {}\nsequences: {}\nclasses: {}",
                bounds,
                u.sequences.len(),
                partition.classes.len()
            )
            .unwrap();
            for (i, class) in partition.classes.iter().enumerate() {
                let members: Vec<&str> = class.iter().map(|&j| u.sequences[j].as_str()).collect();
                writeln!(out, "class {} ({}): {}", i, class.len(), members.join(" | ")).unwrap();
            }
        }
        Format::Csv => {
            out.push_str("class,sequence\n");
            for (i, class) in partition.classes.iter().enumerate() {
                for &j in class {
                    writeln!(out, "{},{}", i, csv_field(&u.sequences[j])).unwrap();
                }
            }
        }
        Format::Jsonl => {
            for (i, class) in partition.classes.iter().enumerate() {
                let members: Vec<&str> = class.iter().map(|&j| u.sequences[j].as_str()).collect();
                writeln!(out, "{}", json!({"class": i, "members": members})).unwrap();
            }
        }
    }
    Ok((out, 0))
}

fn cmd_validate(samples: &[PathBuf], common: &Common) -> Outcome {
    let texts = samples.iter().map(|p| read(p)).collect::<Result<Vec<_>, _>>()?;
    let seqs = load_all(&samples.iter().map(PathBuf::as_path).collect::<Vec<_>>(), common)?;
    let profile = seqs.first().map(|s| s.profile()).unwrap_or(Profile::new(
        common.n.unwrap_or(0),
        common.m.unwrap_or(0),
    ));
    let pn = match common.notation {
        Notation::Pga => ProgramNotation::pga(profile),
        Notation::Loop => ProgramNotation::loops(profile),
    };
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    let report = validate_notation(&pn, &refs);
    let code = if report.passes() { 0 } else { 1 };
    Ok(match common.format {
        Format::Jsonl => (
            format!(
                "{}\n",
                json!({
                    "notation": pn.name,
                    "passes": report.passes(),
                    "samples": report.samples,
                    "condition1": report.foreign_services,
                    "condition2": report.bad_behaviours,
                    "condition3": report.embedding_failures,
                })
            ),
            code,
        ),
        _ => (format!("notation: {}\n{}\n", pn.name, report), code),
    })
}

fn run(cli: Cli) -> Outcome {
    let common = &cli.common;
    match &cli.command {
        Command::Parse { file } => cmd_parse(file, common),
        Command::Extract { file, style } => cmd_extract(file, *style, common),
        Command::Table { file, aux } => cmd_table(file, *aux, common),
        Command::Steps { file, input, aux_init } => cmd_steps(file, input, aux_init.as_deref(), common),
        Command::Equiv {
            left,
            right,
            rel,
            budget,
            witness_out,
            replay,
        } => cmd_equiv(left, right, *rel, budget, witness_out.as_deref(), replay.as_deref(), common),
        Command::Oracle {
            max_len,
            aux,
            max_jump,
            closure,
        } => cmd_oracle(*max_len, *aux, *max_jump, *closure, common),
        Command::ValidateNotation { samples } => cmd_validate(samples, common),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((out, code)) => {
            // a reader that closed the pipe early is not an error
            let _ = std::io::stdout().write_all(out.as_bytes());
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
