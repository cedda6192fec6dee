//! Brute-force ground truth: exhaustive subhypergraph search and isomorphism
//! by bijection enumeration. Deliberately plain.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::design::{sorted_triple, Triple, TripleSystem};
use crate::embed::{Embedding, UNMAPPED};
use crate::hypertree::Hypertree;

/// Largest order accepted by the bijection-based checks.
pub const ISO_MAX_ORDER: u32 = 9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OracleOutcome {
    Found { embedding: Embedding, nodes: u64 },
    /// The whole search space was exhausted.
    None { nodes: u64 },
    BudgetExceeded { nodes: u64 },
}

impl OracleOutcome {
    pub fn nodes(&self) -> u64 {
        match self {
            Self::Found { nodes, .. } | Self::None { nodes } | Self::BudgetExceeded { nodes } => *nodes,
        }
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        match self {
            Self::Found { embedding, .. } => Some(embedding),
            _ => None,
        }
    }
}

/// Root and edge steps `(anchor, a, b)` in breadth-first order.
pub fn bfs_edge_order(t: &Hypertree) -> (u32, Vec<(u32, u32, u32)>) {
    let root = (0..t.n()).find(|&v| t.degree(v) >= 2).unwrap_or(0);
    let mut steps = Vec::with_capacity(t.edges().len());
    let mut seen = vec![false; t.edges().len()];
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &e in t.incident(v) {
            if seen[e as usize] {
                continue;
            }
            seen[e as usize] = true;
            let mut rest = t.edges()[e as usize].iter().copied().filter(|&x| x != v);
            let (a, b) = (rest.next().unwrap(), rest.next().unwrap());
            steps.push((v, a, b));
            queue.push_back(a);
            queue.push_back(b);
        }
    }
    (root, steps)
}

struct Search<'a, F> {
    host: &'a TripleSystem,
    steps: &'a [(u32, u32, u32)],
    map: Vec<u32>,
    used: Vec<bool>,
    nodes: u64,
    node_limit: u64,
    interrupt: F,
    out_of_budget: bool,
}

impl<F: FnMut() -> bool> Search<'_, F> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.node_limit || (self.nodes % 1024 == 1 && (self.interrupt)()) {
            self.out_of_budget = true;
        }
        !self.out_of_budget
    }

    fn extend(&mut self, i: usize) -> bool {
        let Some(&(anchor, a, b)) = self.steps.get(i) else {
            return true;
        };
        let x = self.map[anchor as usize];
        for &ti in self.host.incident(x) {
            let t = self.host.triples()[ti as usize];
            let mut rest = t.iter().copied().filter(|&y| y != x);
            let (y, z) = (rest.next().unwrap(), rest.next().unwrap());
            if self.used[y as usize] || self.used[z as usize] {
                continue;
            }
            for (p, q) in [(y, z), (z, y)] {
                if !self.tick() {
                    return false;
                }
                self.map[a as usize] = p;
                self.map[b as usize] = q;
                self.used[p as usize] = true;
                self.used[q as usize] = true;
                if self.extend(i + 1) {
                    return true;
                }
                self.used[p as usize] = false;
                self.used[q as usize] = false;
                if self.out_of_budget {
                    return false;
                }
            }
        }
        self.map[a as usize] = UNMAPPED;
        self.map[b as usize] = UNMAPPED;
        false
    }
}

/// Exhaustive backtracking search for a copy of `t` in `host`. Root images are
/// tried in ascending order, candidate triples in ascending index order, and
/// both orientations of each. `interrupt` is polled on the first node and
/// every 1024 nodes after it.
pub fn brute_embed(
    t: &Hypertree,
    host: &TripleSystem,
    node_limit: u64,
    interrupt: impl FnMut() -> bool,
) -> OracleOutcome {
    let (root, steps) = bfs_edge_order(t);
    let mut s = Search {
        host,
        steps: &steps,
        map: vec![UNMAPPED; t.n() as usize],
        used: vec![false; host.order() as usize],
        nodes: 0,
        node_limit,
        interrupt,
        out_of_budget: false,
    };
    let roots: Vec<u32> = host.vertices().collect();
    for x in roots {
        if !s.tick() {
            break;
        }
        s.map[root as usize] = x;
        s.used[x as usize] = true;
        if s.extend(0) {
            let embedding = Embedding::from_map(t, host, s.map).expect("search only follows host triples");
            return OracleOutcome::Found {
                embedding,
                nodes: s.nodes,
            };
        }
        s.used[x as usize] = false;
        if s.out_of_budget {
            break;
        }
    }
    if s.out_of_budget {
        OracleOutcome::BudgetExceeded { nodes: s.nodes }
    } else {
        OracleOutcome::None { nodes: s.nodes }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("hypertree on {0} vertices exceeds the limit of 9")]
pub struct SizeLimit(pub u32);

/// Counts bijections `V(a) → V(b)` mapping `E(a)` onto `E(b)`, stopping after
/// `stop_after` of them.
fn count_bijections(a: &Hypertree, b: &Hypertree, stop_after: u64) -> u64 {
    let n = a.n() as usize;
    let mut target: Vec<Triple> = b.edges().iter().map(|&e| sorted_triple(e)).collect();
    target.sort_unstable();
    let mut closing: Vec<Vec<Triple>> = vec![Vec::new(); n];
    for &e in a.edges() {
        closing[*e.iter().max().unwrap() as usize].push(e);
    }

    fn go(
        v: usize,
        a: &Hypertree,
        b: &Hypertree,
        target: &[Triple],
        closing: &[Vec<Triple>],
        map: &mut [u32],
        used: &mut [bool],
        found: &mut u64,
        stop_after: u64,
    ) {
        if v == map.len() {
            *found += 1;
            return;
        }
        for y in 0..b.n() {
            if used[y as usize] || a.degree(v as u32) != b.degree(y) {
                continue;
            }
            map[v] = y;
            let ok = closing[v]
                .iter()
                .all(|e| target.binary_search(&sorted_triple(e.map(|x| map[x as usize]))).is_ok());
            if ok {
                used[y as usize] = true;
                go(v + 1, a, b, target, closing, map, used, found, stop_after);
                used[y as usize] = false;
                if *found >= stop_after {
                    return;
                }
            }
        }
    }

    let mut map = vec![UNMAPPED; n];
    let mut used = vec![false; n];
    let mut found = 0;
    go(0, a, b, &target, &closing, &mut map, &mut used, &mut found, stop_after);
    found
}

/// True iff some vertex bijection maps the edges of `a` onto those of `b`.
pub fn exhaustive_isomorphic(a: &Hypertree, b: &Hypertree) -> Result<bool, SizeLimit> {
    for t in [a, b] {
        if t.n() > ISO_MAX_ORDER {
            return Err(SizeLimit(t.n()));
        }
    }
    if a.n() != b.n() || a.edges().len() != b.edges().len() {
        return Ok(false);
    }
    Ok(count_bijections(a, b, 1) > 0)
}

/// `|Aut(t)|` by enumerating every bijection.
pub fn automorphism_count(t: &Hypertree) -> Result<u64, SizeLimit> {
    if t.n() > ISO_MAX_ORDER {
        return Err(SizeLimit(t.n()));
    }
    Ok(count_bijections(t, t, u64::MAX))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::SteinerTripleSystem;

    fn fano() -> TripleSystem {
        TripleSystem::new(
            7,
            &[[0, 1, 3], [1, 2, 4], [2, 3, 5], [3, 4, 6], [4, 5, 0], [5, 6, 1], [6, 0, 2]],
        )
        .unwrap()
    }

    #[test]
    fn single_edge_is_found() {
        let t = Hypertree::new(3, vec![[0, 1, 2]]).unwrap();
        let out = brute_embed(&t, &fano(), 1000, || false);
        assert_eq!(out.embedding().unwrap().certify(&t, &fano()), Ok(()));
    }

    #[test]
    fn counterexample_is_not_in_fano() {
        // {u,v1,w1}, {u,v2,w2}, {w1,x,y}
        let t = Hypertree::new(7, vec![[0, 1, 2], [0, 3, 4], [2, 5, 6]]).unwrap();
        assert!(matches!(brute_embed(&t, &fano(), u64::MAX, || false), OracleOutcome::None { .. }));
        let s7 = SteinerTripleSystem::construct(7).unwrap();
        assert!(matches!(brute_embed(&t, &s7, u64::MAX, || false), OracleOutcome::None { .. }));
    }

    #[test]
    fn budget_is_reported() {
        let t = Hypertree::new(7, vec![[0, 1, 2], [0, 3, 4], [2, 5, 6]]).unwrap();
        assert!(matches!(brute_embed(&t, &fano(), 5, || false), OracleOutcome::BudgetExceeded { .. }));
        assert!(matches!(
            brute_embed(&t, &fano(), u64::MAX, || true),
            OracleOutcome::BudgetExceeded { .. }
        ));
    }

    #[test]
    fn isomorphism_and_automorphisms() {
        let path = Hypertree::new(5, vec![[0, 1, 2], [2, 3, 4]]).unwrap();
        assert_eq!(exhaustive_isomorphic(&path, &path.relabeled(&[3, 1, 4, 0, 2])), Ok(true));
        let edge = Hypertree::new(3, vec![[0, 1, 2]]).unwrap();
        assert_eq!(exhaustive_isomorphic(&path, &edge), Ok(false));
        // Swap within each edge (2·2) and swap the edges (2).
        assert_eq!(automorphism_count(&path), Ok(8));
        let star = Hypertree::new(7, vec![[0, 1, 2], [0, 3, 4], [0, 5, 6]]).unwrap();
        assert_eq!(automorphism_count(&star), Ok(48));
        let path7 = Hypertree::new(7, vec![[0, 1, 2], [2, 3, 4], [4, 5, 6]]).unwrap();
        assert_eq!(exhaustive_isomorphic(&star, &path7), Ok(false));
        let big = Hypertree::new(11, vec![[0, 1, 2], [2, 3, 4], [4, 5, 6], [6, 7, 8], [8, 9, 10]]).unwrap();
        assert_eq!(exhaustive_isomorphic(&big, &big), Err(SizeLimit(11)));
    }
}
