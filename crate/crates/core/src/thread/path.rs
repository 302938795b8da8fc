//! Positions in the unfolded tree of a thread and the transposition rewrite.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Action, Node, Thread};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    /// Taken on reply T; written `0`.
    True,
    /// Taken on reply F; written `1`.
    False,
}

/// A root-to-node path in the unfolded tree. Written as `0.1.1`, the root as `root`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreePath(pub Vec<Branch>);

impl TreePath {
    pub fn root() -> TreePath {
        TreePath(Vec::new())
    }

    pub fn child(&self, b: Branch) -> TreePath {
        let mut v = self.0.clone();
        v.push(b);
        TreePath(v)
    }

    pub fn is_prefix_of(&self, other: &TreePath) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|b| match b {
                Branch::True => "0",
                Branch::False => "1",
            })
            .collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for TreePath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "root" {
            return Ok(TreePath::root());
        }
        s.split('.')
            .map(|p| match p {
                "0" => Ok(Branch::True),
                "1" => Ok(Branch::False),
                other => Err(format!("bad path component {:?}", other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(TreePath)
    }
}

impl Thread {
    pub fn child(self, b: Branch) -> Option<Thread> {
        match self.node() {
            Node::Post(_, x, y) => Some(match b {
                Branch::True => x,
                Branch::False => y,
            }),
            _ => None,
        }
    }

    /// The subthread at `path`, if the path stays inside the tree.
    pub fn at(self, path: &TreePath) -> Option<Thread> {
        path.0.iter().try_fold(self, |t, &b| t.child(b))
    }

    /// Replaces the subthread at `path` with `new`.
    pub fn replace_at(self, path: &TreePath, new: Thread) -> Option<Thread> {
        fn go(t: Thread, rest: &[Branch], new: Thread) -> Option<Thread> {
            let Some((&first, rest)) = rest.split_first() else {
                return Some(new);
            };
            match t.node() {
                Node::Post(a, x, y) => Some(match first {
                    Branch::True => Thread::post(a, go(x, rest, new)?, y),
                    Branch::False => Thread::post(a, x, go(y, rest, new)?),
                }),
                _ => None,
            }
        }
        go(self, &path.0, new)
    }

    /// Applies the transposition rule at the root:
    /// `(x ◁b▷ y) ◁a▷ (x' ◁b▷ y')` becomes `(x ◁a▷ x') ◁b▷ (y ◁a▷ y')`
    /// when `a` and `b` are basic actions on different foci.
    pub fn transpose_root(self) -> Option<Thread> {
        let Node::Post(Action::Basic(a), left, right) = self.node() else {
            return None;
        };
        let Node::Post(Action::Basic(b), x, y) = left.node() else {
            return None;
        };
        let Node::Post(Action::Basic(b2), x2, y2) = right.node() else {
            return None;
        };
        if b != b2 || a.focus == b.focus {
            return None;
        }
        Some(Thread::basic(b, Thread::basic(a, x, x2), Thread::basic(a, y, y2)))
    }

    pub fn is_redex(self) -> bool {
        self.transpose_root().is_some()
    }

    pub fn transpose_at(self, path: &TreePath) -> Option<Thread> {
        let swapped = self.at(path)?.transpose_root()?;
        self.replace_at(path, swapped)
    }
}

/// Visits every redex position of the unfolded tree, innermost first and
/// true branch before false branch. Subtrees without redexes are skipped.
pub fn for_each_redex(t: Thread, mut f: impl FnMut(&TreePath) -> ControlFlow<()>) -> ControlFlow<()> {
    fn has_redex(t: Thread, memo: &mut HashMap<Thread, bool>) -> bool {
        if let Some(&r) = memo.get(&t) {
            return r;
        }
        let r = match t.node() {
            Node::Post(_, x, y) => t.is_redex() || has_redex(x, memo) || has_redex(y, memo),
            _ => false,
        };
        memo.insert(t, r);
        r
    }
    fn go(
        t: Thread,
        path: &mut Vec<Branch>,
        memo: &mut HashMap<Thread, bool>,
        f: &mut dyn FnMut(&TreePath) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if !has_redex(t, memo) {
            return ControlFlow::Continue(());
        }
        if let Node::Post(_, x, y) = t.node() {
            path.push(Branch::True);
            go(x, path, memo, f)?;
            path.pop();
            path.push(Branch::False);
            go(y, path, memo, f)?;
            path.pop();
        }
        if t.is_redex() {
            f(&TreePath(path.clone()))?;
        }
        ControlFlow::Continue(())
    }
    go(t, &mut Vec::new(), &mut HashMap::new(), &mut f)
}

pub fn redex_paths(t: Thread) -> Vec<TreePath> {
    let mut out = Vec::new();
    let _ = for_each_redex(t, |p| {
        out.push(p.clone());
        ControlFlow::Continue(())
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pga::parse_items;
    use crate::thread::extract_items;

    fn x(text: &str) -> Thread {
        extract_items(&parse_items(text).unwrap())
    }

    #[test]
    fn single_swap_between_distinct_foci() {
        let a = x("aux:1.set:1; out:1.set:1; !");
        let b = x("out:1.set:1; aux:1.set:1; !");
        assert_eq!(a.transpose_root(), Some(b));
        assert_eq!(b.transpose_root(), Some(a));
        assert_eq!(redex_paths(a), vec![TreePath::root()]);
    }

    #[test]
    fn equal_foci_are_not_redexes() {
        assert!(redex_paths(x("out:1.set:0; out:1.set:1; !")).is_empty());
        assert!(x("aux:1.get; aux:1.set:1; !").transpose_root().is_none());
    }

    #[test]
    fn swap_is_an_involution_at_any_path() {
        let t = x("+in:1.get; aux:1.set:1; out:1.set:1; !");
        for p in redex_paths(t) {
            let s = t.transpose_at(&p).unwrap();
            assert_eq!(s.transpose_at(&p), Some(t));
        }
    }

    #[test]
    fn paths_print_and_parse() {
        let p: TreePath = "0.1".parse().unwrap();
        assert_eq!(p.0, vec![Branch::True, Branch::False]);
        assert_eq!(p.to_string(), "0.1");
        assert_eq!("root".parse::<TreePath>().unwrap(), TreePath::root());
        assert!("0.2".parse::<TreePath>().is_err());
    }

    #[test]
    fn replace_at_rebuilds_only_the_path() {
        let t = x("+in:1.get; out:1.set:1; !");
        let p: TreePath = "1".parse().unwrap();
        assert_eq!(t.at(&p), Some(Thread::stop()));
        let r = t.replace_at(&p, Thread::dead()).unwrap();
        assert_eq!(r.at(&p), Some(Thread::dead()));
        assert_eq!(r.at(&"0".parse().unwrap()), t.at(&"0".parse().unwrap()));
        assert!(Thread::stop().replace_at(&p, Thread::dead()).is_none());
    }
}
