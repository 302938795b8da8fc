//! Program notations projected onto instruction sequences, with a
//! bounded-loop notation as the shipped example.
//!
//! Loop programs extend the instruction grammar with blocks:
//!
//! ```text
//! program := item (";" item)*
//! item    := instr | "repeat" POSNAT "{" program "}"
//! ```
//!
//! The `;` after a closing brace is optional. Projection unrolls every
//! block and performs no other rewriting.

use std::fmt;

use crate::equivalence::{sa_threads, structurally_algorithmically_equivalent, Budget, EquivError, Verdict};
use crate::pga::syntax::{check_profile, Cursor, ParseError, Span};
use crate::pga::{parse, FocusKind, Instruction, InstructionSeq, Profile, SeqError};
use crate::services::{abstracting_use, ServiceFamily};
use crate::thread::extract;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoopItem {
    Instr(Instruction),
    Repeat { count: u32, body: Vec<LoopItem> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopProgram {
    pub items: Vec<LoopItem>,
    pub profile: Profile,
}

fn render_items(items: &[LoopItem]) -> String {
    items
        .iter()
        .map(|i| match i {
            LoopItem::Instr(instr) => instr.to_string(),
            LoopItem::Repeat { count, body } => format!("repeat {} {{ {} }}", count, render_items(body)),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

impl fmt::Display for LoopProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_items(&self.items))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LoopError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error(
        "{}:{}: `{instruction}` transfers control past the end of the body of `repeat {count}` at {}:{}",
        at.line, at.column, block.line, block.column
    )]
    CrossBoundary {
        instruction: String,
        at: Span,
        count: u32,
        block: Span,
    },
    #[error(transparent)]
    Seq(#[from] SeqError),
}

struct Parsed {
    item: LoopItem,
    spans: Vec<Span>,
}

fn parse_block(cursor: &mut Cursor<'_>, profile: Profile, nested: bool) -> Result<Vec<Parsed>, LoopError> {
    let mut items = Vec::new();
    loop {
        cursor.skip_trivia();
        let span = cursor.span();
        let closed_block = if cursor.eat_keyword("repeat") {
            cursor.skip_trivia();
            let count_span = cursor.span();
            let count = cursor.nat("a repetition count")?;
            if count == 0 {
                return Err(ParseError {
                    line: count_span.line,
                    column: count_span.column,
                    kind: crate::pga::ParseErrorKind::Other("repetition counts start at 1".into()),
                }
                .into());
            }
            cursor.skip_trivia();
            if !cursor.eat("{") {
                return Err(cursor.error("`{`").into());
            }
            let body = parse_block(cursor, profile, true)?;
            cursor.skip_trivia();
            if !cursor.eat("}") {
                return Err(cursor.error("`}`").into());
            }
            let (body, spans) = check_body(body, count, span)?;
            items.push(Parsed {
                item: LoopItem::Repeat { count, body },
                spans,
            });
            true
        } else {
            let (instr, span) = cursor.instruction()?;
            check_profile(instr, span, profile)?;
            items.push(Parsed {
                item: LoopItem::Instr(instr),
                spans: vec![span],
            });
            false
        };
        cursor.skip_trivia();
        if cursor.eat(";") {
            continue;
        }
        match cursor.peek() {
            None if !nested => return Ok(items),
            Some('}') if nested => return Ok(items),
            Some(_) if closed_block => continue,
            _ => {
                let expected = if nested { "`;` or `}`" } else { "`;` or end of input" };
                return Err(cursor.error(expected).into());
            }
        }
    }
}

/// Checks that no control transfer in one copy of the body lands beyond
/// the start of the next copy.
fn check_body(body: Vec<Parsed>, count: u32, block: Span) -> Result<(Vec<LoopItem>, Vec<Span>), LoopError> {
    let items: Vec<LoopItem> = body.iter().map(|p| p.item.clone()).collect();
    let spans: Vec<Span> = body.into_iter().flat_map(|p| p.spans).collect();
    let flat = unroll(&items);
    let len = flat.len();
    for (i, instr) in flat.iter().enumerate() {
        let reach = match instr {
            Instruction::Jump(l) if *l > 0 => i + *l as usize,
            Instruction::PosTest(_) | Instruction::NegTest(_) => i + 2,
            _ => continue,
        };
        if reach > len {
            return Err(LoopError::CrossBoundary {
                instruction: instr.to_string(),
                at: spans[i],
                count,
                block,
            });
        }
    }
    let unrolled_spans = (0..count).flat_map(|_| spans.iter().copied()).collect();
    Ok((items, unrolled_spans))
}

fn unroll(items: &[LoopItem]) -> Vec<Instruction> {
    let mut out = Vec::new();
    for item in items {
        match item {
            LoopItem::Instr(i) => out.push(*i),
            LoopItem::Repeat { count, body } => {
                let once = unroll(body);
                for _ in 0..*count {
                    out.extend_from_slice(&once);
                }
            }
        }
    }
    out
}

pub fn parse_loop(text: &str, profile: Profile) -> Result<LoopProgram, LoopError> {
    let mut cursor = Cursor::new(text);
    let items = parse_block(&mut cursor, profile, false)?;
    Ok(LoopProgram {
        items: items.into_iter().map(|p| p.item).collect(),
        profile,
    })
}

/// Full unrolling.
pub fn project_loop(p: &LoopProgram) -> Result<InstructionSeq, SeqError> {
    InstructionSeq::new(unroll(&p.items), p.profile)
}

/// The loop-free program with the same instructions as `x`.
pub fn embed(x: &InstructionSeq) -> LoopProgram {
    LoopProgram {
        items: x.items().iter().copied().map(LoopItem::Instr).collect(),
        profile: x.profile(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Language {
    Pga,
    Loop,
}

/// A language, its projection onto instruction sequences, and the service
/// family the projected sequences are used with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramNotation {
    pub name: String,
    pub language: Language,
    pub profile: Profile,
    pub services: ServiceFamily,
}

impl ProgramNotation {
    pub fn pga(profile: Profile) -> ProgramNotation {
        ProgramNotation {
            name: "pga".into(),
            language: Language::Pga,
            profile,
            services: ServiceFamily::empty(),
        }
    }

    pub fn loops(profile: Profile) -> ProgramNotation {
        ProgramNotation {
            name: "loop".into(),
            language: Language::Loop,
            profile,
            services: ServiceFamily::empty(),
        }
    }

    pub fn project(&self, text: &str) -> Result<InstructionSeq, LoopError> {
        match self.language {
            Language::Pga => Ok(parse(text, self.profile)?),
            Language::Loop => Ok(project_loop(&parse_loop(text, self.profile)?)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PnError {
    #[error(transparent)]
    Program(#[from] LoopError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

/// Structural algorithmic equivalence lifted through the notation.
pub fn pn_equivalent(pn: &ProgramNotation, p: &str, q: &str, budget: Budget) -> Result<Verdict, PnError> {
    let (x, y) = (pn.project(p)?, pn.project(q)?);
    if pn.services.is_empty() {
        return Ok(structurally_algorithmically_equivalent(&x, &y, budget)?);
    }
    let (tx, ty) = (
        abstracting_use(extract(&x), &pn.services),
        abstracting_use(extract(&y), &pn.services),
    );
    Ok(sa_threads(tx, ty, budget))
}

/// Violations found for each admissibility condition; empty means it holds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NotationReport {
    pub foreign_services: Vec<String>,
    pub bad_behaviours: Vec<String>,
    pub embedding_failures: Vec<String>,
    pub samples: usize,
}

impl NotationReport {
    pub fn passes(&self) -> bool {
        self.foreign_services.is_empty() && self.bad_behaviours.is_empty() && self.embedding_failures.is_empty()
    }
}

impl fmt::Display for NotationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("services avoid the machine registers", &self.foreign_services),
            ("projected behaviours are finite and trace-free", &self.bad_behaviours),
            ("every sequence embeds and projects back", &self.embedding_failures),
        ];
        for (i, (name, violations)) in rows.iter().enumerate() {
            let status = if violations.is_empty() { "ok" } else { "FAILED" };
            writeln!(f, "condition {} ({}): {}", i + 1, name, status)?;
            for v in violations.iter() {
                writeln!(f, "  {}", v)?;
            }
        }
        write!(f, "samples checked: {}", self.samples)
    }
}

/// Checks the admissibility conditions of `pn` on `samples`.
pub fn validate_notation(pn: &ProgramNotation, samples: &[&str]) -> NotationReport {
    let mut report = NotationReport {
        samples: samples.len(),
        ..NotationReport::default()
    };
    for focus in pn.services.foci() {
        let clash = match focus.kind() {
            FocusKind::Input => focus.index() <= pn.profile.inputs,
            FocusKind::Auxiliary => true,
            FocusKind::Output => focus.index() <= pn.profile.outputs,
        };
        if clash {
            report.foreign_services.push(format!("service on {} overlaps the machine registers", focus));
        }
    }
    for (i, text) in samples.iter().enumerate() {
        let x = match pn.project(text) {
            Ok(x) => x,
            Err(e) => {
                report.bad_behaviours.push(format!("sample {}: {}", i + 1, e));
                continue;
            }
        };
        let t = abstracting_use(extract(&x), &pn.services);
        if !t.is_trace_free() {
            report.bad_behaviours.push(format!("sample {}: behaviour contains traced actions", i + 1));
        }
        match project_loop(&embed(&x)) {
            Ok(back) if back == x => {}
            _ => report
                .embedding_failures
                .push(format!("sample {}: embedding of `{}` does not project back", i + 1, x)),
        }
    }
    report
}
