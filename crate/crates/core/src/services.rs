//! Boolean-register services, service families, and the operators that let
//! a thread interact with a family: abstracting use, apply, and tracking use.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::pga::{Focus, FocusKind, Method};
use crate::thread::{Action, Node, Thread};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Reply {
    F,
    T,
    Div,
}

impl fmt::Display for Reply {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reply::F => "F",
            Reply::T => "T",
            Reply::Div => "Div",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Service {
    BoolReg(bool),
    /// Unable to process any method.
    Empty,
}

impl Service {
    pub fn reply(self, m: Method) -> Reply {
        match (self, m) {
            (Service::Empty, _) => Reply::Div,
            (Service::BoolReg(_), Method::Set0) => Reply::F,
            (Service::BoolReg(_), Method::Set1) => Reply::T,
            (Service::BoolReg(b), Method::Get) => {
                if b {
                    Reply::T
                } else {
                    Reply::F
                }
            }
        }
    }

    pub fn derive(self, m: Method) -> Service {
        match (self, m) {
            (Service::Empty, _) => Service::Empty,
            (Service::BoolReg(_), Method::Set0) => Service::BoolReg(false),
            (Service::BoolReg(_), Method::Set1) => Service::BoolReg(true),
            (s @ Service::BoolReg(_), Method::Get) => s,
        }
    }
}

pub fn service_reply(s: Service, m: Method) -> Reply {
    s.reply(m)
}

pub fn service_derive(s: Service, m: Method) -> Service {
    s.derive(m)
}

/// Finite map from foci to services.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ServiceFamily {
    entries: BTreeMap<Focus, Service>,
}

impl ServiceFamily {
    pub fn empty() -> ServiceFamily {
        ServiceFamily::default()
    }

    /// The family `f.s` holding one named service.
    pub fn single(focus: Focus, service: Service) -> ServiceFamily {
        ServiceFamily {
            entries: [(focus, service)].into_iter().collect(),
        }
    }

    /// Registers `kind:1 .. kind:bits.len()` holding `bits`.
    pub fn registers(kind: FocusKind, bits: &[bool]) -> ServiceFamily {
        ServiceFamily {
            entries: bits
                .iter()
                .enumerate()
                .map(|(i, &b)| (Focus::new(kind, i as u32 + 1).unwrap(), Service::BoolReg(b)))
                .collect(),
        }
    }

    pub fn get(&self, focus: Focus) -> Option<Service> {
        self.entries.get(&focus).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn foci(&self) -> impl Iterator<Item = Focus> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Focus, Service)> + '_ {
        self.entries.iter().map(|(f, s)| (*f, *s))
    }

    fn with(&self, focus: Focus, service: Service) -> ServiceFamily {
        let mut entries = self.entries.clone();
        entries.insert(focus, service);
        ServiceFamily { entries }
    }

    /// Composition: union of entries, with a name clash collapsing to the empty service.
    pub fn compose(&self, other: &ServiceFamily) -> ServiceFamily {
        let mut entries = self.entries.clone();
        for (f, s) in &other.entries {
            entries
                .entry(*f)
                .and_modify(|e| *e = Service::Empty)
                .or_insert(*s);
        }
        ServiceFamily { entries }
    }

    /// Encapsulation: removes every service named in `foci`.
    pub fn encapsulate(&self, foci: &BTreeSet<Focus>) -> ServiceFamily {
        ServiceFamily {
            entries: self
                .entries
                .iter()
                .filter(|(f, _)| !foci.contains(f))
                .map(|(f, s)| (*f, *s))
                .collect(),
        }
    }

    /// Reads a register family holding only Boolean registers back as bits
    /// `kind:1..=count`; `None` if it has any other shape.
    pub fn register_bits(&self, kind: FocusKind, count: u32) -> Option<Vec<bool>> {
        if self.entries.len() != count as usize {
            return None;
        }
        (1..=count)
            .map(|i| match self.get(Focus::new(kind, i).unwrap()) {
                Some(Service::BoolReg(b)) => Some(b),
                _ => None,
            })
            .collect()
    }
}

pub fn compose(u: &ServiceFamily, v: &ServiceFamily) -> ServiceFamily {
    u.compose(v)
}

pub fn encapsulate(foci: &BTreeSet<Focus>, u: &ServiceFamily) -> ServiceFamily {
    u.encapsulate(foci)
}

/// `in:1=0, aux:2=1`; the empty family prints as `∅` and the empty service as `empty`.
impl fmt::Display for ServiceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(focus, s)| match s {
                Service::BoolReg(b) => format!("{}={}", focus, u8::from(*b)),
                Service::Empty => format!("{}=empty", focus),
            })
            .collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyParseError {
    #[error("malformed family entry {0:?}; expected focus=bit such as in:1=0")]
    Entry(String),
    #[error("focus {0} appears twice")]
    Duplicate(Focus),
}

impl FromStr for ServiceFamily {
    type Err = FamilyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut entries = BTreeMap::new();
        let s = s.trim();
        if s.is_empty() || s == "∅" {
            return Ok(ServiceFamily::empty());
        }
        for part in s.split(',') {
            let part = part.trim();
            let bad = || FamilyParseError::Entry(part.to_string());
            let (focus, value) = part.split_once('=').ok_or_else(bad)?;
            let (kind, index) = focus.trim().split_once(':').ok_or_else(bad)?;
            let kind = match kind {
                "in" => FocusKind::Input,
                "aux" => FocusKind::Auxiliary,
                "out" => FocusKind::Output,
                _ => return Err(bad()),
            };
            let index: u32 = index.parse().map_err(|_| bad())?;
            let focus = Focus::new(kind, index).ok_or_else(bad)?;
            let service = match value.trim() {
                "0" => Service::BoolReg(false),
                "1" => Service::BoolReg(true),
                "empty" => Service::Empty,
                _ => return Err(bad()),
            };
            if entries.insert(focus, service).is_some() {
                return Err(FamilyParseError::Duplicate(focus));
            }
        }
        Ok(ServiceFamily { entries })
    }
}

/// Outcome of resolving one request against a family.
enum Resolution {
    Absent,
    Reply(Reply, ServiceFamily),
}

fn resolve(u: &ServiceFamily, focus: Focus, m: Method) -> Resolution {
    match u.get(focus) {
        None => Resolution::Absent,
        Some(s) => Resolution::Reply(s.reply(m), u.with(focus, s.derive(m))),
    }
}

type Memo = HashMap<(Thread, ServiceFamily), Thread>;

/// Abstracting use: resolves every request the family can answer and leaves no trace.
pub fn abstracting_use(t: Thread, u: &ServiceFamily) -> Thread {
    fn go(t: Thread, u: &ServiceFamily, memo: &mut Memo) -> Thread {
        let key = (t, u.clone());
        if let Some(&r) = memo.get(&key) {
            return r;
        }
        let r = match t.node() {
            Node::Stop | Node::Dead => t,
            Node::Post(a @ Action::Traced(..), x, _) => Thread::prefix(a, go(x, u, memo)),
            Node::Post(Action::Basic(b), x, y) => match resolve(u, b.focus, b.method) {
                Resolution::Absent => Thread::basic(b, go(x, u, memo), go(y, u, memo)),
                Resolution::Reply(Reply::T, v) => go(x, &v, memo),
                Resolution::Reply(Reply::F, v) => go(y, &v, memo),
                Resolution::Reply(Reply::Div, _) => Thread::dead(),
            },
        };
        memo.insert(key, r);
        r
    }
    go(t, u, &mut Memo::new())
}

/// Why [`apply`] produced the empty family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EmptyCause {
    Inaction,
    AbsentFocus(Focus),
    Divergent(Focus),
}

/// Apply: the family left behind after the thread has run against it.
pub fn apply(t: Thread, u: &ServiceFamily) -> ServiceFamily {
    apply_explained(t, u).0
}

/// [`apply`] together with the reason when the result is the empty family
/// because execution got stuck.
pub fn apply_explained(t: Thread, u: &ServiceFamily) -> (ServiceFamily, Option<EmptyCause>) {
    let mut t = t;
    let mut u = u.clone();
    loop {
        match t.node() {
            Node::Stop => return (u, None),
            Node::Dead => return (ServiceFamily::empty(), Some(EmptyCause::Inaction)),
            Node::Post(Action::Traced(..), x, _) => t = x,
            Node::Post(Action::Basic(b), x, y) => match resolve(&u, b.focus, b.method) {
                Resolution::Absent => return (ServiceFamily::empty(), Some(EmptyCause::AbsentFocus(b.focus))),
                Resolution::Reply(Reply::Div, _) => {
                    return (ServiceFamily::empty(), Some(EmptyCause::Divergent(b.focus)))
                }
                Resolution::Reply(r, v) => {
                    t = if r == Reply::T { x } else { y };
                    u = v;
                }
            },
        }
    }
}

/// Tracking use: like abstracting use, but each handled request leaves a
/// traced action recording the request and its reply.
pub fn tracking_use(t: Thread, u: &ServiceFamily) -> Thread {
    fn go(t: Thread, u: &ServiceFamily, memo: &mut Memo) -> Thread {
        let key = (t, u.clone());
        if let Some(&r) = memo.get(&key) {
            return r;
        }
        let r = match t.node() {
            Node::Stop | Node::Dead => t,
            Node::Post(a @ Action::Traced(..), x, _) => Thread::prefix(a, go(x, u, memo)),
            Node::Post(Action::Basic(b), x, y) => match resolve(u, b.focus, b.method) {
                Resolution::Absent => Thread::basic(b, go(x, u, memo), go(y, u, memo)),
                Resolution::Reply(Reply::T, v) => Thread::prefix(Action::Traced(b, Reply::T), go(x, &v, memo)),
                Resolution::Reply(Reply::F, v) => Thread::prefix(Action::Traced(b, Reply::F), go(y, &v, memo)),
                Resolution::Reply(Reply::Div, _) => Thread::prefix(Action::Traced(b, Reply::Div), Thread::dead()),
            },
        };
        memo.insert(key, r);
        r
    }
    go(t, u, &mut Memo::new())
}

/// Erases traced actions, continuing on their true branch.
pub fn strip_trace(t: Thread) -> Thread {
    fn go(t: Thread, memo: &mut HashMap<Thread, Thread>) -> Thread {
        if let Some(&r) = memo.get(&t) {
            return r;
        }
        let r = match t.node() {
            Node::Stop | Node::Dead => t,
            Node::Post(Action::Traced(..), x, _) => go(x, memo),
            Node::Post(a, x, y) => Thread::post(a, go(x, memo), go(y, memo)),
        };
        memo.insert(t, r);
        r
    }
    go(t, &mut HashMap::new())
}
