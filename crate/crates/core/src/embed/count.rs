//! Exact embedding counts on tiny hosts.

use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use super::forest::Forest;
use super::UNMAPPED;
use crate::design::{sorted_triple, TripleSystem};

pub const COUNT_MAX_HOST: usize = 15;
pub const COUNT_MAX_FOREST: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum CountError {
    #[error("host has {0} vertices; at most 15 are supported")]
    HostTooLarge(usize),
    #[error("forest has {0} vertices; at most 7 are supported")]
    ForestTooLarge(u32),
    #[error("pin ({0}, {1}) names a missing vertex or repeats one")]
    BadPin(u32, u32),
}

/// Number of injective maps `V(F) → V(host)` sending every edge of `F` onto a
/// host triple and every pinned forest vertex to its given image.
pub fn count_labeled_embeddings(
    host: &TripleSystem,
    f: &Forest,
    pins: &[(u32, u32)],
) -> Result<u64, CountError> {
    if host.vertex_count() > COUNT_MAX_HOST {
        return Err(CountError::HostTooLarge(host.vertex_count()));
    }
    if f.order > COUNT_MAX_FOREST {
        return Err(CountError::ForestTooLarge(f.order));
    }
    let mut pinned = vec![UNMAPPED; f.order as usize];
    for &(v, x) in pins {
        if v >= f.order || !host.contains_vertex(x) || pinned[v as usize] != UNMAPPED {
            return Err(CountError::BadPin(v, x));
        }
        pinned[v as usize] = x;
    }
    // Edges are checked as soon as their largest vertex is assigned.
    let mut closing: Vec<Vec<[u32; 3]>> = vec![Vec::new(); f.order as usize];
    for e in &f.edges {
        let top = *e.iter().max().expect("three vertices");
        closing[top as usize].push(*e);
    }
    let hosts: Vec<u32> = host.vertices().collect();
    let mut map = vec![UNMAPPED; f.order as usize];
    let mut used = vec![false; host.order() as usize];
    Ok(count_from(0, host, &hosts, &pinned, &closing, &mut map, &mut used))
}

fn count_from(
    v: usize,
    host: &TripleSystem,
    hosts: &[u32],
    pinned: &[u32],
    closing: &[Vec<[u32; 3]>],
    map: &mut [u32],
    used: &mut [bool],
) -> u64 {
    if v == map.len() {
        return 1;
    }
    let single = [pinned[v]];
    let candidates: &[u32] = if pinned[v] == UNMAPPED { hosts } else { &single };
    let mut total = 0;
    for &x in candidates {
        if used[x as usize] {
            continue;
        }
        map[v] = x;
        let fits = closing[v]
            .iter()
            .all(|e| host.has_triple(sorted_triple(e.map(|y| map[y as usize]))));
        if fits {
            used[x as usize] = true;
            total += count_from(v + 1, host, hosts, pinned, closing, map, used);
            used[x as usize] = false;
        }
    }
    map[v] = UNMAPPED;
    total
}
