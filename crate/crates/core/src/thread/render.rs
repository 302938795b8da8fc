use std::collections::HashMap;
use std::fmt::Write;

use crate::pga::{parse_items, Instruction};
use crate::services::Reply;

use super::{Action, Node, Thread};

/// Indented tree. Prefix nodes `a ∘ t` print a single child.
pub fn render_tree(t: Thread) -> String {
    fn go(t: Thread, indent: usize, label: &str, out: &mut String) {
        let pad = "  ".repeat(indent);
        match t.node() {
            Node::Stop => writeln!(out, "{}{}S", pad, label).unwrap(),
            Node::Dead => writeln!(out, "{}{}D", pad, label).unwrap(),
            Node::Post(a, x, y) if x == y => {
                writeln!(out, "{}{}{} ∘", pad, label, a).unwrap();
                go(x, indent + 1, "", out);
            }
            Node::Post(a, x, y) => {
                writeln!(out, "{}{}{}", pad, label, a).unwrap();
                go(x, indent + 1, "T: ", out);
                go(y, indent + 1, "F: ", out);
            }
        }
    }
    let mut out = String::new();
    go(t, 0, "", &mut out);
    out
}

/// One line per distinct node: `id<TAB>label<TAB>true-edge<TAB>false-edge`.
/// Ids are assigned in depth-first pre-order from the root, which is node 0.
pub fn render_graph(t: Thread) -> String {
    let order = super::nodes(t);
    let ids: HashMap<Thread, usize> = order.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut out = String::from("id\tlabel\ttrue\tfalse\n");
    for (i, n) in order.iter().enumerate() {
        match n.node() {
            Node::Stop => writeln!(out, "{}\tS\t-\t-", i).unwrap(),
            Node::Dead => writeln!(out, "{}\tD\t-\t-", i).unwrap(),
            Node::Post(a, x, y) => writeln!(out, "{}\t{}\t{}\t{}", i, a, ids[&x], ids[&y]).unwrap(),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("thread term, byte {offset}: {message}")]
pub struct TermError {
    pub offset: usize,
    pub message: String,
}

/// Parses the term syntax produced by `Display for Thread`:
/// `S`, `D`, `a(x, y)` and `i(a,r)(x, y)` for traced actions.
pub fn parse_term(text: &str) -> Result<Thread, TermError> {
    struct P<'a> {
        s: &'a str,
        pos: usize,
    }
    impl P<'_> {
        fn err(&self, message: impl Into<String>) -> TermError {
            TermError {
                offset: self.pos,
                message: message.into(),
            }
        }
        fn ws(&mut self) {
            while self.s[self.pos..].starts_with(char::is_whitespace) {
                self.pos += self.s[self.pos..].chars().next().unwrap().len_utf8();
            }
        }
        fn eat(&mut self, tok: &str) -> bool {
            self.ws();
            if self.s[self.pos..].starts_with(tok) {
                self.pos += tok.len();
                true
            } else {
                false
            }
        }
        fn expect(&mut self, tok: &str) -> Result<(), TermError> {
            if self.eat(tok) {
                Ok(())
            } else {
                Err(self.err(format!("expected `{}`", tok)))
            }
        }
        fn basic(&mut self) -> Result<crate::pga::BasicInstruction, TermError> {
            self.ws();
            let rest = &self.s[self.pos..];
            let end = rest.find(['(', ',', ')']).unwrap_or(rest.len());
            let word = rest[..end].trim();
            let b = match parse_items(word) {
                Ok(items) if items.len() == 1 => match items[0] {
                    Instruction::Plain(b) => b,
                    _ => return Err(self.err(format!("`{}` is not a basic action", word))),
                },
                _ => return Err(self.err(format!("`{}` is not a basic action", word))),
            };
            self.pos += end;
            Ok(b)
        }
        fn thread(&mut self) -> Result<Thread, TermError> {
            if self.eat("S") {
                return Ok(Thread::stop());
            }
            if self.eat("D") {
                return Ok(Thread::dead());
            }
            let action = if self.eat("i(") {
                let b = self.basic()?;
                self.expect(",")?;
                let r = if self.eat("T") {
                    Reply::T
                } else if self.eat("F") {
                    Reply::F
                } else if self.eat("Div") {
                    Reply::Div
                } else {
                    return Err(self.err("expected a reply `T`, `F` or `Div`"));
                };
                self.expect(")")?;
                Action::Traced(b, r)
            } else {
                Action::Basic(self.basic()?)
            };
            self.expect("(")?;
            let x = self.thread()?;
            self.expect(",")?;
            let y = self.thread()?;
            self.expect(")")?;
            Ok(Thread::post(action, x, y))
        }
    }
    let mut p = P { s: text, pos: 0 };
    let t = p.thread()?;
    p.ws();
    if p.pos != text.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pga::{BasicInstruction, Focus, Method};
    use crate::thread::extract_items;

    #[test]
    fn term_round_trip() {
        let t = extract_items(&parse_items("+in:1.get; #2; #5; +in:1.get; #3; out:1.set:1; !; out:1.set:0; !").unwrap());
        assert_eq!(parse_term(&t.to_string()).unwrap(), t);
        let b = BasicInstruction::new(Focus::aux(2), Method::Set0);
        let traced = Thread::prefix(Action::Traced(b, Reply::Div), Thread::dead());
        assert_eq!(traced.to_string(), "i(aux:2.set:0,Div)(D, D)");
        assert_eq!(parse_term(&traced.to_string()).unwrap(), traced);
        assert!(parse_term("in:1.get(S)").is_err());
        assert!(parse_term("S S").is_err());
    }

    #[test]
    fn renders_tree_and_graph() {
        let t = extract_items(&parse_items("+in:1.get; out:1.set:1; !").unwrap());
        assert_eq!(render_tree(t), "in:1.get\n  T: out:1.set:1 ∘\n    S\n  F: S\n");
        assert_eq!(
            render_graph(t),
            "id\tlabel\ttrue\tfalse\n0\tin:1.get\t1\t2\n1\tout:1.set:1\t2\t2\n2\tS\t-\t-\n"
        );
    }
}
