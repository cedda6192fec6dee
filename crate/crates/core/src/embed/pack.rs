//! Greedy randomized packing of vertex-disjoint copies of the sample forest.
//!
//! Copies are placed one after another. Inside a copy, larger components go
//! first and each component is grown edge by edge from a random root image,
//! every new edge sharing exactly one vertex with the part already placed.
//! A bounded backtracking search covers dead ends; a component that still
//! fails after several root images ends the packing with a shortfall.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::forest::SampleForest;
use super::UNMAPPED;
use crate::design::TripleSystem;

const ROOT_ATTEMPTS: usize = 48;

/// One copy of the forest: `images[x]` is the host vertex of forest vertex `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlacedCopy {
    pub images: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum PackError {
    #[error("{copies} copies of a {r}-vertex forest need more than the {available} host vertices")]
    InsufficientVertices {
        copies: usize,
        r: u32,
        available: usize,
    },
    #[error("placed {placed} of {needed} copies; component {component} did not fit")]
    Shortfall {
        placed: usize,
        needed: usize,
        component: usize,
    },
}

/// Edge growth order of one component: `(anchor, a, b)` adds the edge
/// `{anchor, a, b}` where `anchor` is already placed.
struct ComponentPlan {
    root: u32,
    steps: Vec<(u32, u32, u32)>,
}

fn component_plans(forest: &SampleForest) -> Vec<ComponentPlan> {
    let order = forest.forest.order as usize;
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); order];
    for (i, e) in forest.forest.edges.iter().enumerate() {
        for &v in e {
            incident[v as usize].push(i);
        }
    }
    forest
        .components
        .iter()
        .map(|c| {
            let range = c.offset..c.offset + c.size;
            let root = range
                .clone()
                .max_by_key(|&v| (incident[v as usize].len(), core::cmp::Reverse(v)))
                .expect("components are nonempty");
            let mut steps = Vec::new();
            let mut seen_edge = vec![false; forest.forest.edges.len()];
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &e in &incident[v as usize] {
                    if seen_edge[e] {
                        continue;
                    }
                    seen_edge[e] = true;
                    let mut rest = forest.forest.edges[e].iter().copied().filter(|&x| x != v);
                    let (a, b) = (rest.next().unwrap(), rest.next().unwrap());
                    steps.push((v, a, b));
                    queue.push_back(a);
                    queue.push_back(b);
                }
            }
            ComponentPlan { root, steps }
        })
        .collect()
}

struct Packer<'a> {
    host: &'a TripleSystem,
    used: Vec<bool>,
    free: Vec<u32>,
    free_pos: Vec<usize>,
    rng: ChaCha8Rng,
}

impl Packer<'_> {
    fn take(&mut self, x: u32) {
        debug_assert!(!self.used[x as usize]);
        self.used[x as usize] = true;
        let pos = self.free_pos[x as usize];
        let last = *self.free.last().expect("taken vertex is free");
        self.free.swap_remove(pos);
        if last != x {
            self.free_pos[last as usize] = pos;
        }
    }

    fn give_back(&mut self, x: u32) {
        self.used[x as usize] = false;
        self.free_pos[x as usize] = self.free.len();
        self.free.push(x);
    }

    fn grow(&mut self, steps: &[(u32, u32, u32)], images: &mut [u32], budget: &mut usize) -> bool {
        let Some(&(anchor, a, b)) = steps.first() else {
            return true;
        };
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let x = images[anchor as usize];
        let mut candidates: Vec<(u32, u32)> = self
            .host
            .incident(x)
            .iter()
            .filter_map(|&ti| {
                let t = self.host.triples()[ti as usize];
                let mut rest = t.iter().copied().filter(|&y| y != x);
                let (y, z) = (rest.next()?, rest.next()?);
                (!self.used[y as usize] && !self.used[z as usize]).then_some((y, z))
            })
            .collect();
        candidates.shuffle(&mut self.rng);
        for (y, z) in candidates {
            let (y, z) = if self.rng.gen::<bool>() { (y, z) } else { (z, y) };
            images[a as usize] = y;
            images[b as usize] = z;
            self.take(y);
            self.take(z);
            if self.grow(&steps[1..], images, budget) {
                return true;
            }
            self.give_back(z);
            self.give_back(y);
            if *budget == 0 {
                break;
            }
        }
        images[a as usize] = UNMAPPED;
        images[b as usize] = UNMAPPED;
        false
    }

    fn place(&mut self, plan: &ComponentPlan, images: &mut [u32]) -> bool {
        for _ in 0..ROOT_ATTEMPTS {
            if self.free.is_empty() {
                return false;
            }
            let x = self.free[self.rng.gen_range(0..self.free.len())];
            images[plan.root as usize] = x;
            self.take(x);
            let mut budget = 64 + 16 * plan.steps.len();
            if self.grow(&plan.steps, images, &mut budget) {
                return true;
            }
            self.give_back(x);
            images[plan.root as usize] = UNMAPPED;
        }
        false
    }
}

/// Packs `copies_needed` vertex-disjoint copies of `forest` into `host`.
pub fn pack_forest(
    host: &TripleSystem,
    forest: &SampleForest,
    copies_needed: usize,
    seed: u64,
) -> Result<Vec<PlacedCopy>, PackError> {
    let r = forest.r();
    let available = host.vertex_count();
    if copies_needed.saturating_mul(r as usize) > available {
        return Err(PackError::InsufficientVertices {
            copies: copies_needed,
            r,
            available,
        });
    }
    let plans = component_plans(forest);
    let mut order: Vec<usize> = (0..plans.len()).collect();
    order.sort_by_key(|&i| core::cmp::Reverse(forest.components[i].size));

    let free: Vec<u32> = host.vertices().collect();
    let mut free_pos = vec![usize::MAX; host.order() as usize];
    for (i, &v) in free.iter().enumerate() {
        free_pos[v as usize] = i;
    }
    let mut packer = Packer {
        host,
        used: vec![false; host.order() as usize],
        free,
        free_pos,
        rng: ChaCha8Rng::seed_from_u64(seed),
    };

    let mut copies = Vec::with_capacity(copies_needed);
    for placed in 0..copies_needed {
        let mut images = vec![UNMAPPED; r as usize];
        for &c in &order {
            if !packer.place(&plans[c], &mut images) {
                return Err(PackError::Shortfall {
                    placed,
                    needed: copies_needed,
                    component: c,
                });
            }
        }
        copies.push(PlacedCopy { images });
    }
    Ok(copies)
}
