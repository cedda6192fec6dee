//! Assigning every subtree to a placed copy of its class representative.

use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use super::forest::{IsoClassPartition, SampleForest};
use super::pack::PlacedCopy;
use super::UNMAPPED;
use crate::decompose::Decomposition;

/// Images of the subtree vertices; isolated vertices stay [`UNMAPPED`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Placement {
    pub vertex_map: Vec<u32>,
    /// `(copy, component)` used by each subtree.
    pub slots: Vec<(usize, usize)>,
}

impl Placement {
    pub fn image(&self, v: u32) -> Option<u32> {
        self.vertex_map
            .get(v as usize)
            .copied()
            .filter(|&x| x != UNMAPPED)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum RealizeError {
    #[error("class {class} has {members} subtrees but only {supply} placed copies")]
    Shortfall {
        class: usize,
        members: usize,
        supply: usize,
    },
}

/// Per class, the placed components available to its members.
pub fn class_supply(
    partition: &IsoClassPartition,
    forest: &SampleForest,
    copies: usize,
) -> Vec<usize> {
    let mut per_copy = vec![0usize; partition.t()];
    for c in &forest.components {
        per_copy[c.class] += 1;
    }
    per_copy.into_iter().map(|s| s * copies).collect()
}

/// Maps subtree `P` of class `i` onto the next unused component of class
/// `i`: position `q` of the canonical order of `P` goes to position `q` of
/// the representative's canonical order, then through the copy's images.
pub fn realize_p(
    dec: &Decomposition,
    partition: &IsoClassPartition,
    forest: &SampleForest,
    copies: &[PlacedCopy],
) -> Result<Placement, RealizeError> {
    let supply = class_supply(partition, forest, copies.len());
    for (class, c) in partition.classes.iter().enumerate() {
        if c.size() > supply[class] {
            return Err(RealizeError::Shortfall {
                class,
                members: c.size(),
                supply: supply[class],
            });
        }
    }

    let mut slots_of_class: Vec<Vec<(usize, usize)>> = vec![Vec::new(); partition.t()];
    for copy in 0..copies.len() {
        for (i, c) in forest.components.iter().enumerate() {
            slots_of_class[c.class].push((copy, i));
        }
    }
    let mut next = vec![0usize; partition.t()];
    let mut vertex_map = vec![UNMAPPED; dec.n as usize];
    let mut slots = Vec::with_capacity(dec.subtrees.len());
    for (p, sub) in dec.subtrees.iter().enumerate() {
        let class = partition.class_of[p];
        let (copy, comp) = slots_of_class[class][next[class]];
        next[class] += 1;
        let offset = forest.components[comp].offset;
        let rep_order = &partition.classes[class].representative_order;
        for (q, &local) in partition.member_orders[p].iter().enumerate() {
            let x = offset + rep_order[q];
            vertex_map[sub.vertices[local as usize] as usize] = copies[copy].images[x as usize];
        }
        slots.push((copy, comp));
    }
    Ok(Placement { vertex_map, slots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::saw;
    use crate::design::{sorted_triple, SteinerTripleSystem};
    use crate::embed::forest::{build_sample_forest, partition_classes};
    use crate::embed::pack::pack_forest;
    use crate::hypertree::{annotate, random_bounded_tree, subdivide, GraphTree};

    #[test]
    fn k13_singletons_land_on_distinct_vertices() {
        let t = subdivide(&GraphTree::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap());
        let dec = saw(&t, &annotate(&t, None).unwrap(), 4).unwrap();
        let part = partition_classes(&dec);
        let forest = build_sample_forest(&part);
        let s = SteinerTripleSystem::construct(15).unwrap();
        let copies = pack_forest(&s, &forest, part.copies_needed(), 2).unwrap();
        let pl = realize_p(&dec, &part, &forest, &copies).unwrap();
        let mut imgs: Vec<u32> = dec
            .subtrees
            .iter()
            .map(|p| pl.image(p.vertices[0]).unwrap())
            .collect();
        imgs.sort_unstable();
        imgs.dedup();
        assert_eq!(imgs.len(), 3);
    }

    #[test]
    fn subtree_edges_map_to_host_triples() {
        let g = random_bounded_tree(100, 4, 5).unwrap();
        let t = subdivide(&g);
        let dec = saw(&t, &annotate(&t, None).unwrap(), 20).unwrap();
        let part = partition_classes(&dec);
        let forest = build_sample_forest(&part);
        let s = SteinerTripleSystem::construct(301).unwrap();
        let copies = pack_forest(&s, &forest, part.copies_needed(), 8).unwrap();
        let pl = realize_p(&dec, &part, &forest, &copies).unwrap();
        for p in &dec.subtrees {
            for e in &p.edges {
                let img = sorted_triple(e.map(|v| pl.image(v).unwrap()));
                assert!(s.has_triple(img));
            }
        }
        let mut used: Vec<u32> = pl.vertex_map.iter().copied().filter(|&x| x != UNMAPPED).collect();
        let count = used.len();
        used.sort_unstable();
        used.dedup();
        assert_eq!(used.len(), count);
    }

    #[test]
    fn missing_copies_are_reported() {
        let t = subdivide(&GraphTree::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap());
        let dec = saw(&t, &annotate(&t, None).unwrap(), 4).unwrap();
        let part = partition_classes(&dec);
        let forest = build_sample_forest(&part);
        assert_eq!(
            realize_p(&dec, &part, &forest, &[]),
            Err(RealizeError::Shortfall {
                class: 0,
                members: 3,
                supply: 0
            })
        );
    }
}
