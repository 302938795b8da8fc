use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermutationError {
    #[error("register index 0 is not a positive integer")]
    ZeroIndex,
    #[error("not injective: {0} and {1} both map to {2}")]
    NotInjective(u32, u32, u32),
    #[error("{0} is hit by the mapping but never mapped itself; not a bijection on its support")]
    NotClosed(u32),
    #[error("{0} appears twice in the cycle notation")]
    RepeatedInCycle(u32),
    #[error("malformed cycle notation: {0}")]
    Syntax(String),
}

/// A bijection on the positive integers that moves finitely many points.
/// Only the moved points are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    moved: BTreeMap<u32, u32>,
}

impl Permutation {
    pub fn identity() -> Permutation {
        Permutation::default()
    }

    pub fn swap(a: u32, b: u32) -> Permutation {
        assert!(a >= 1 && b >= 1, "register indices must be positive");
        let mut moved = BTreeMap::new();
        if a != b {
            moved.insert(a, b);
            moved.insert(b, a);
        }
        Permutation { moved }
    }

    /// Validates a finite mapping as a bijection on its support.
    pub fn from_mapping(pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Permutation, PermutationError> {
        let mut moved = BTreeMap::new();
        let mut seen: BTreeMap<u32, u32> = BTreeMap::new();
        for (from, to) in pairs {
            if from == 0 || to == 0 {
                return Err(PermutationError::ZeroIndex);
            }
            if let Some(&prev) = seen.get(&to) {
                if prev != from {
                    return Err(PermutationError::NotInjective(prev, from, to));
                }
            }
            if let Some(&old) = moved.get(&from) {
                if old != to {
                    return Err(PermutationError::NotInjective(from, from, to));
                }
            }
            seen.insert(to, from);
            moved.insert(from, to);
        }
        let domain: BTreeSet<u32> = moved.keys().copied().collect();
        for to in seen.keys() {
            if !domain.contains(to) {
                return Err(PermutationError::NotClosed(*to));
            }
        }
        moved.retain(|a, b| a != b);
        Ok(Permutation { moved })
    }

    /// Extends an injective partial map to a bijection on `domain ∪ image`:
    /// image points outside the domain are sent, in increasing order, to the
    /// domain points outside the image.
    pub fn completing(partial: &BTreeMap<u32, u32>) -> Permutation {
        let domain: BTreeSet<u32> = partial.keys().copied().collect();
        let image: BTreeSet<u32> = partial.values().copied().collect();
        assert_eq!(domain.len(), image.len(), "partial map must be injective");
        let mut moved: BTreeMap<u32, u32> = partial.clone();
        for (from, to) in image.difference(&domain).zip(domain.difference(&image)) {
            moved.insert(*from, *to);
        }
        moved.retain(|a, b| a != b);
        Permutation { moved }
    }

    pub fn apply(&self, i: u32) -> u32 {
        self.moved.get(&i).copied().unwrap_or(i)
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            moved: self.moved.iter().map(|(a, b)| (*b, *a)).collect(),
        }
    }

    /// `self` first, then `next`: `i ↦ next(self(i))`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        let support: BTreeSet<u32> = self.moved.keys().chain(next.moved.keys()).copied().collect();
        let mut moved = BTreeMap::new();
        for i in support {
            let j = next.apply(self.apply(i));
            if i != j {
                moved.insert(i, j);
            }
        }
        Permutation { moved }
    }

    pub fn is_identity(&self) -> bool {
        self.moved.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.moved.keys().copied()
    }

    /// All permutations of `{1..=k}` in lexicographic order of their images.
    pub fn all_of(k: u32) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut images: Vec<u32> = (1..=k).collect();
        loop {
            let pairs = (1..=k).zip(images.iter().copied());
            out.push(Permutation::from_mapping(pairs).expect("images form a permutation"));
            // next lexicographic permutation
            let Some(i) = (1..images.len()).rev().find(|&i| images[i - 1] < images[i]) else {
                break;
            };
            let j = (i..images.len()).rev().find(|&j| images[j] > images[i - 1]).unwrap();
            images.swap(i - 1, j);
            images[i..].reverse();
        }
        out
    }

    fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = BTreeSet::new();
        let mut cycles = Vec::new();
        for &start in self.moved.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut cycle = vec![start];
            seen.insert(start);
            let mut cur = self.apply(start);
            while cur != start {
                seen.insert(cur);
                cycle.push(cur);
                cur = self.apply(cur);
            }
            cycles.push(cycle);
        }
        cycles
    }
}

/// Cycle notation: `(1 2)(3 5 4)`; the identity prints as `()`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            let parts: Vec<String> = cycle.iter().map(u32::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = PermutationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut pairs = Vec::new();
        let mut used = BTreeSet::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let Some(body) = rest.strip_prefix('(') else {
                return Err(PermutationError::Syntax(format!("expected '(' at {:?}", rest)));
            };
            let Some(close) = body.find(')') else {
                return Err(PermutationError::Syntax("unclosed cycle".into()));
            };
            let mut cycle = Vec::new();
            for tok in body[..close].split_whitespace() {
                let v: u32 = tok
                    .parse()
                    .map_err(|_| PermutationError::Syntax(format!("bad index {:?}", tok)))?;
                if v == 0 {
                    return Err(PermutationError::ZeroIndex);
                }
                if !used.insert(v) {
                    return Err(PermutationError::RepeatedInCycle(v));
                }
                cycle.push(v);
            }
            for (i, &a) in cycle.iter().enumerate() {
                pairs.push((a, cycle[(i + 1) % cycle.len()]));
            }
            rest = body[close + 1..].trim_start();
        }
        Permutation::from_mapping(pairs)
    }
}
