//! Process-wide hash-consing store for thread nodes.
//!
//! Every structurally distinct node is stored once, so handle equality is
//! structural equality of the unfolded trees. Nodes are never freed.

use std::sync::LazyLock;

use dashmap::DashMap;

use super::{Node, Thread};

struct Entry {
    node: Node,
    depth: u32,
}

struct Store {
    entries: boxcar::Vec<Entry>,
    index: DashMap<Node, u32>,
}

static STORE: LazyLock<Store> = LazyLock::new(|| {
    let store = Store {
        entries: boxcar::Vec::new(),
        index: DashMap::new(),
    };
    for node in [Node::Stop, Node::Dead] {
        let id = store.entries.push(Entry { node, depth: 0 }) as u32;
        store.index.insert(node, id);
    }
    store
});

pub(super) const STOP: Thread = Thread(0);
pub(super) const DEAD: Thread = Thread(1);

pub(super) fn intern(node: Node) -> Thread {
    let store = &*STORE;
    if let Some(id) = store.index.get(&node) {
        return Thread(*id);
    }
    let depth = match node {
        Node::Stop | Node::Dead => 0,
        Node::Post(_, t, f) => 1 + entry(t).depth.max(entry(f).depth),
    };
    let id = *store
        .index
        .entry(node)
        .or_insert_with(|| store.entries.push(Entry { node, depth }) as u32);
    Thread(id)
}

fn entry(t: Thread) -> &'static Entry {
    &STORE.entries[t.0 as usize]
}

pub(super) fn node(t: Thread) -> Node {
    entry(t).node
}

pub(super) fn depth(t: Thread) -> u32 {
    entry(t).depth
}

/// Number of distinct nodes interned so far, process-wide.
pub fn interned_count() -> usize {
    STORE.entries.count()
}
