//! Concrete syntax:
//!
//! ```text
//! program := instr (";" instr)*
//! instr   := basic | "+" basic | "-" basic | "#" NAT | "!"
//! basic   := focus "." method
//! focus   := ("in" | "aux" | "out") ":" POSNAT
//! method  := "get" | "set:0" | "set:1"
//! ```
//!
//! `//` starts a comment running to the end of the line.

use std::fmt;

use super::{BasicInstruction, Focus, FocusKind, Instruction, InstructionSeq, Method, Profile};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { expected: String, found: String },
    Profile { token: String, reason: String },
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Syntax { expected, found } => write!(f, "expected {}, found {}", expected, found),
            ParseErrorKind::Profile { token, reason } => write!(f, "`{}`: {}", token, reason),
            ParseErrorKind::Other(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for ParseError {}

/// Source position of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

/// Character cursor shared by the instruction-sequence and loop-program parsers.
pub(crate) struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(text: &'a str) -> Cursor<'a> {
        Cursor {
            text,
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    pub(crate) fn span(&self) -> Span {
        Span {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.rest().chars().next()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub(crate) fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.rest().starts_with("//") => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(_) => {
                let word: String = self
                    .rest()
                    .chars()
                    .take_while(|c| !c.is_whitespace() && *c != ';')
                    .take(16)
                    .collect();
                format!("`{}`", word)
            }
        }
    }

    pub(crate) fn error(&self, expected: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            kind: ParseErrorKind::Syntax {
                expected: expected.into(),
                found: self.found(),
            },
        }
    }

    pub(crate) fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            for _ in token.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    /// Consumes `word` only when it is not immediately followed by more identifier characters.
    pub(crate) fn eat_keyword(&mut self, word: &str) -> bool {
        let rest = self.rest();
        if rest.starts_with(word)
            && !rest[word.len()..]
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.eat(word)
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("`{}`", token)))
        }
    }

    pub(crate) fn nat(&mut self, what: &str) -> Result<u32, ParseError> {
        let digits: String = self.rest().chars().take_while(char::is_ascii_digit).collect();
        if digits.is_empty() {
            return Err(self.error(what));
        }
        let value = digits.parse::<u32>().map_err(|_| ParseError {
            line: self.line,
            column: self.column,
            kind: ParseErrorKind::Other(format!("number {} is too large", digits)),
        })?;
        for _ in 0..digits.len() {
            self.bump();
        }
        Ok(value)
    }

    fn basic(&mut self) -> Result<BasicInstruction, ParseError> {
        let start = self.span();
        let start_pos = self.pos;
        let kind = if self.eat("in") {
            FocusKind::Input
        } else if self.eat("aux") {
            FocusKind::Auxiliary
        } else if self.eat("out") {
            FocusKind::Output
        } else {
            return Err(self.error("a focus (`in`, `aux` or `out`)"));
        };
        self.expect(":")?;
        let index = self.nat("a register index")?;
        let Some(focus) = Focus::new(kind, index) else {
            return Err(ParseError {
                line: start.line,
                column: start.column,
                kind: ParseErrorKind::Profile {
                    token: self.text[start_pos..self.pos].to_string(),
                    reason: "register indices start at 1".into(),
                },
            });
        };
        self.expect(".")?;
        let method = if self.eat("get") {
            Method::Get
        } else if self.eat("set:0") {
            Method::Set0
        } else if self.eat("set:1") {
            Method::Set1
        } else {
            return Err(self.error("a method (`get`, `set:0` or `set:1`)"));
        };
        Ok(BasicInstruction::new(focus, method))
    }

    /// Parses one primitive instruction, returning it with its start position.
    pub(crate) fn instruction(&mut self) -> Result<(Instruction, Span), ParseError> {
        self.skip_trivia();
        let span = self.span();
        let instr = match self.peek() {
            Some('!') => {
                self.bump();
                Instruction::Halt
            }
            Some('#') => {
                self.bump();
                Instruction::Jump(self.nat("a jump length")?)
            }
            Some('+') => {
                self.bump();
                Instruction::PosTest(self.basic()?)
            }
            Some('-') => {
                self.bump();
                Instruction::NegTest(self.basic()?)
            }
            _ => Instruction::Plain(self.basic().map_err(|e| {
                if matches!(e.kind, ParseErrorKind::Syntax { .. }) && e.line == span.line && e.column == span.column {
                    self.error("an instruction")
                } else {
                    e
                }
            })?),
        };
        Ok((instr, span))
    }
}

fn parse_spanned(text: &str) -> Result<Vec<(Instruction, Span)>, ParseError> {
    let mut cursor = Cursor::new(text);
    let mut items = vec![cursor.instruction()?];
    loop {
        cursor.skip_trivia();
        if cursor.peek().is_none() {
            return Ok(items);
        }
        if !cursor.eat(";") {
            return Err(cursor.error("`;` or end of input"));
        }
        items.push(cursor.instruction()?);
    }
}

/// Parses the instructions without any profile check.
pub fn parse_items(text: &str) -> Result<Vec<Instruction>, ParseError> {
    Ok(parse_spanned(text)?.into_iter().map(|(i, _)| i).collect())
}

pub(crate) fn check_profile(instr: Instruction, span: Span, profile: Profile) -> Result<(), ParseError> {
    if let Some(b) = instr.basic() {
        b.check_profile(profile).map_err(|reason| ParseError {
            line: span.line,
            column: span.column,
            kind: ParseErrorKind::Profile {
                token: instr.to_string(),
                reason,
            },
        })?;
    }
    Ok(())
}

/// Parses an instruction sequence and validates it against `profile`.
pub fn parse(text: &str, profile: Profile) -> Result<InstructionSeq, ParseError> {
    let spanned = parse_spanned(text)?;
    for &(instr, span) in &spanned {
        check_profile(instr, span, profile)?;
    }
    let items = spanned.into_iter().map(|(i, _)| i).collect();
    Ok(InstructionSeq::new(items, profile).expect("validated above"))
}
