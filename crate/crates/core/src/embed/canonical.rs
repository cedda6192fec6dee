//! Canonical forms of hypertrees.
//!
//! A hypertree is encoded through its vertex–edge incidence tree rooted at a
//! vertex: a vertex node is `(` + sorted child codes + `)`, an edge node is
//! `[` + sorted child codes + `]`. Both are balanced, hence prefix-free, so
//! equal strings mean isomorphic rooted trees. The key is the smallest code
//! over all vertex roots.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Serialize, Serializer};

use crate::hypertree::Hypertree;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(core::str::from_utf8(&self.0).unwrap_or("?"))
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({self})")
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let text: String = self.0.iter().map(|&b| b as char).collect();
        s.serialize_str(&text)
    }
}

/// Canonical key plus a vertex order realizing it. If two hypertrees have the
/// same key, mapping `order[i]` of one to `order[i]` of the other is an
/// isomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    pub order: Vec<u32>,
}

struct Rooted {
    code: Vec<u8>,
    order: Vec<u32>,
}

fn rooted(t: &Hypertree, root: u32) -> Rooted {
    let n = t.n() as usize;
    // Edge nodes are numbered after the vertex nodes.
    let mut parent_edge = vec![u32::MAX; n];
    let mut bfs = Vec::with_capacity(n);
    let mut queue = VecDeque::from([root]);
    let mut seen = vec![false; n];
    seen[root as usize] = true;
    while let Some(v) = queue.pop_front() {
        bfs.push(v);
        for &e in t.incident(v) {
            if e == parent_edge[v as usize] {
                continue;
            }
            for &x in &t.edges()[e as usize] {
                if !seen[x as usize] {
                    seen[x as usize] = true;
                    parent_edge[x as usize] = e;
                    queue.push_back(x);
                }
            }
        }
    }

    let mut vertex_code: Vec<Vec<u8>> = vec![Vec::new(); n];
    // Child edges of each vertex and child vertices of each edge, sorted by code.
    let mut vertex_children: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut edge_children: Vec<[u32; 2]> = vec![[0, 0]; t.edges().len()];
    let mut edge_code: Vec<Vec<u8>> = vec![Vec::new(); t.edges().len()];
    for &v in bfs.iter().rev() {
        let mut kids: Vec<u32> = t
            .incident(v)
            .iter()
            .copied()
            .filter(|&e| e != parent_edge[v as usize])
            .collect();
        for &e in &kids {
            let mut pair = [0u32; 2];
            let mut i = 0;
            for &x in &t.edges()[e as usize] {
                if x != v {
                    pair[i] = x;
                    i += 1;
                }
            }
            if vertex_code[pair[1] as usize] < vertex_code[pair[0] as usize] {
                pair.swap(0, 1);
            }
            let mut code = Vec::new();
            code.push(b'[');
            code.extend_from_slice(&vertex_code[pair[0] as usize]);
            code.extend_from_slice(&vertex_code[pair[1] as usize]);
            code.push(b']');
            edge_children[e as usize] = pair;
            edge_code[e as usize] = code;
        }
        kids.sort_by(|&a, &b| edge_code[a as usize].cmp(&edge_code[b as usize]));
        let mut code = Vec::new();
        code.push(b'(');
        for &e in &kids {
            code.extend_from_slice(&edge_code[e as usize]);
        }
        code.push(b')');
        vertex_code[v as usize] = code;
        vertex_children[v as usize] = kids;
    }

    let mut order = Vec::with_capacity(n);
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        order.push(v);
        // Push in reverse so the smallest code is visited first.
        for &e in vertex_children[v as usize].iter().rev() {
            let [a, b] = edge_children[e as usize];
            stack.push(b);
            stack.push(a);
        }
    }
    Rooted {
        code: core::mem::take(&mut vertex_code[root as usize]),
        order,
    }
}

pub fn canonical_form(t: &Hypertree) -> CanonicalForm {
    let best = (0..t.n())
        .map(|r| rooted(t, r))
        .min_by(|a, b| a.code.cmp(&b.code))
        .expect("a hypertree has at least one vertex");
    CanonicalForm {
        key: CanonicalKey(best.code),
        order: best.order,
    }
}

pub fn canonical_key(t: &Hypertree) -> CanonicalKey {
    canonical_form(t).key
}
