//! Sawing a subdivision tree into stars, small subtrees, and isolated vertices.
//!
//! Each iteration walks the heaviest branch from the root, picks the deepest
//! red vertex `u` whose progeny still exceeds `k` (or the red son just below a
//! blue one), removes the star of all edges at `u`, sends `u` and the celibate
//! ray vertices to the isolated set, and cuts every component hanging below
//! `u` off as a subtree. What is left when the root's progeny drops to `k` or
//! less becomes the final subtree.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::design::{sorted_triple, Triple};
use crate::hypertree::{validate_hypertree, Color, Hypertree, RootedAnnotation};

/// Edges `{v_i, w_i, u}` pairwise meeting only at the center `u`. `w_i` is
/// the celibate vertex of its edge. When present, ray `father_ray_index`
/// holds the father of `u` as its `v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Star {
    pub center: u32,
    pub rays: Vec<(u32, u32)>,
    pub father_ray_index: Option<usize>,
    /// Progeny of the center in the remaining tree when it was sawn.
    pub progeny_at_saw: u32,
}

impl Star {
    pub fn degree(&self) -> usize {
        self.rays.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Triple> + '_ {
        self.rays.iter().map(|&(v, w)| sorted_triple([v, w, self.center]))
    }

    pub fn anchors(&self) -> impl Iterator<Item = u32> + '_ {
        self.rays.iter().map(|&(v, _)| v)
    }
}

/// A subtree cut from the original tree, in original labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subtree {
    /// Sorted ascending.
    pub vertices: Vec<u32>,
    pub edges: Vec<Triple>,
}

impl Subtree {
    fn from_parts(mut vertices: Vec<u32>, edges: Vec<Triple>) -> Self {
        vertices.sort_unstable();
        Self { vertices, edges }
    }

    pub fn local_index(&self, v: u32) -> Option<u32> {
        self.vertices.binary_search(&v).ok().map(|i| i as u32)
    }

    /// The subtree relabeled onto `0..|V|`, local label `i` standing for
    /// `vertices[i]`.
    pub fn to_local(&self) -> Result<Hypertree, crate::hypertree::HypertreeViolation> {
        let edges = self
            .edges
            .iter()
            .map(|t| t.map(|v| self.local_index(v).unwrap_or(u32::MAX)))
            .collect();
        Hypertree::new(self.vertices.len() as u32, edges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "role", content = "index", rename_all = "snake_case")]
pub enum Provenance {
    Subtree(usize),
    Isolated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub n: u32,
    pub k: u32,
    pub stars: Vec<Star>,
    pub subtrees: Vec<Subtree>,
    /// Sorted ascending.
    pub isolated: Vec<u32>,
    pub provenance: Vec<Provenance>,
}

impl Decomposition {
    pub fn e(&self) -> usize {
        self.stars.len()
    }

    pub fn l(&self) -> usize {
        self.subtrees.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum DecomposeError {
    #[error("annotation does not match the tree")]
    AnnotationMismatch,
    #[error("block size k must be positive")]
    ZeroBlock,
    #[error("sawing reached blue vertex {0}; k is too small for the degree")]
    BlueCenter(u32),
}

struct Saw<'a> {
    t: &'a Hypertree,
    ann: &'a RootedAnnotation,
    alive: Vec<bool>,
    progeny: Vec<u32>,
}

impl Saw<'_> {
    fn alive_child_edges(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        // Child edges are removed whole, so one lower vertex decides.
        self.ann.child_edges[v as usize].iter().copied().filter(move |&e| {
            self.t.edges()[e as usize]
                .iter()
                .any(|&x| x != v && self.alive[x as usize])
        })
    }

    /// Removes `v` and everything still hanging below it.
    fn cut_below(&mut self, v: u32) -> Subtree {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            vertices.push(x);
            let child: Vec<u32> = self.alive_child_edges(x).collect();
            for e in child {
                let t = self.t.edges()[e as usize];
                edges.push(t);
                stack.extend(t.iter().copied().filter(|&y| y != x));
            }
            self.alive[x as usize] = false;
        }
        Subtree::from_parts(vertices, edges)
    }

    /// Heaviest alive son; ties go to red sons, then to smaller labels.
    fn heaviest_son(&self, v: u32) -> Option<u32> {
        self.ann
            .sons(self.t, v)
            .filter(|&s| self.alive[s as usize])
            .max_by_key(|&s| {
                (
                    self.progeny[s as usize],
                    self.ann.color[s as usize] == Color::Red,
                    core::cmp::Reverse(s),
                )
            })
    }
}

/// Decomposes `t` with block size `k`.
pub fn saw(t: &Hypertree, ann: &RootedAnnotation, k: u32) -> Result<Decomposition, DecomposeError> {
    let n = t.n();
    if k == 0 {
        return Err(DecomposeError::ZeroBlock);
    }
    if ann.color.len() != n as usize
        || ann.progeny_size.len() != n as usize
        || ann.celibate_of_edge.len() != t.edges().len()
        || ann.root >= n
        || ann.progeny_size[ann.root as usize] != n
    {
        return Err(DecomposeError::AnnotationMismatch);
    }

    let mut st = Saw {
        t,
        ann,
        alive: vec![true; n as usize],
        progeny: ann.progeny_size.clone(),
    };
    let root = ann.root;
    let mut stars = Vec::new();
    let mut subtrees = Vec::new();
    let mut isolated = Vec::new();

    while st.alive[root as usize] {
        if st.progeny[root as usize] <= k {
            subtrees.push(st.cut_below(root));
            break;
        }
        // Walk the heaviest branch down to the last vertex with progeny > k.
        let mut b = root;
        let below = loop {
            match st.heaviest_son(b) {
                Some(s) if st.progeny[s as usize] > k => b = s,
                other => break other,
            }
        };
        let u = if ann.color[b as usize] == Color::Red {
            b
        } else {
            below.ok_or(DecomposeError::BlueCenter(b))?
        };
        if ann.color[u as usize] != Color::Red {
            return Err(DecomposeError::BlueCenter(u));
        }
        let progeny_at_saw = st.progeny[u as usize];

        let mut rays = Vec::new();
        let mut father_ray_index = None;
        if let (Some(v1), Some(pe)) = (ann.father[u as usize], ann.parent_edge[u as usize]) {
            let w1 = ann.celibate_of_edge[pe as usize];
            if w1 == u || w1 == v1 {
                return Err(DecomposeError::AnnotationMismatch);
            }
            father_ray_index = Some(0);
            rays.push((v1, w1));
        }
        let child: Vec<u32> = st.alive_child_edges(u).collect();
        debug_assert_eq!(child.len(), ann.child_edges[u as usize].len());
        for e in child {
            let w = ann.celibate_of_edge[e as usize];
            let v = t.edges()[e as usize]
                .iter()
                .copied()
                .find(|&x| x != u && x != w)
                .ok_or(DecomposeError::AnnotationMismatch)?;
            rays.push((v, w));
        }

        for (i, &(v, w)) in rays.iter().enumerate() {
            isolated.push(w);
            st.alive[w as usize] = false;
            if Some(i) != father_ray_index {
                subtrees.push(st.cut_below(v));
            }
        }
        isolated.push(u);
        st.alive[u as usize] = false;

        // Ancestors lose u's progeny plus the celibate sibling w_1.
        if father_ray_index.is_some() {
            let lost = progeny_at_saw + 1;
            let mut a = ann.father[u as usize];
            while let Some(x) = a {
                st.progeny[x as usize] -= lost;
                a = ann.father[x as usize];
            }
        }

        stars.push(Star {
            center: u,
            rays,
            father_ray_index,
            progeny_at_saw,
        });
    }

    isolated.sort_unstable();
    let mut provenance = vec![Provenance::Isolated; n as usize];
    for (i, p) in subtrees.iter().enumerate() {
        for &v in &p.vertices {
            provenance[v as usize] = Provenance::Subtree(i);
        }
    }
    Ok(Decomposition {
        n,
        k,
        stars,
        subtrees,
        isolated,
        provenance,
    })
}

/// A guarantee of the decomposition that can be violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// Stars, subtrees, and isolated vertices partition the tree exactly.
    Partition,
    /// (1) every subtree has at most `k` vertices.
    SubtreeSize,
    /// (2) `|I| ≤ (2d²/k)·n`.
    IsolatedBound,
    /// (3) `|I| ≥ l`, waived when there are no stars.
    IsolatedCoversSubtrees,
    /// (4) `l ≥ e`.
    SubtreesCoverStars,
    /// (5) `l ≥ n/(k+3)`.
    SubtreeCount,
    /// (6) `I` is exactly the star centers and celibate ray vertices, and no
    /// anchor `v` is isolated.
    IsolatedAreStarInteriors,
}

impl Property {
    /// 0 for the partition check, otherwise the item number (1)–(6).
    pub fn number(self) -> u8 {
        match self {
            Property::Partition => 0,
            Property::SubtreeSize => 1,
            Property::IsolatedBound => 2,
            Property::IsolatedCoversSubtrees => 3,
            Property::SubtreesCoverStars => 4,
            Property::SubtreeCount => 5,
            Property::IsolatedAreStarInteriors => 6,
        }
    }
}

fn partition_is_exact(t: &Hypertree, dec: &Decomposition) -> bool {
    let n = t.n() as usize;
    if dec.n != t.n() || dec.provenance.len() != n {
        return false;
    }
    let index: BTreeMap<Triple, usize> = t
        .edges()
        .iter()
        .enumerate()
        .map(|(i, &e)| (sorted_triple(e), i))
        .collect();
    let mut edge_uses = vec![0u32; t.edges().len()];
    let mut use_edge = |e: Triple| match index.get(&sorted_triple(e)) {
        Some(&i) => {
            edge_uses[i] += 1;
            true
        }
        None => false,
    };

    for s in &dec.stars {
        let mut vs: Vec<u32> = s.rays.iter().flat_map(|&(v, w)| [v, w]).collect();
        vs.push(s.center);
        let total = vs.len();
        vs.sort_unstable();
        vs.dedup();
        if vs.len() != total || vs.iter().any(|&v| v as usize >= n) {
            return false;
        }
        if s.degree() != t.degree(s.center) {
            return false;
        }
        if !s.edges().all(&mut use_edge) {
            return false;
        }
    }

    let mut vertex_uses = vec![0u32; n];
    for &v in &dec.isolated {
        match vertex_uses.get_mut(v as usize) {
            Some(c) => *c += 1,
            None => return false,
        }
        if dec.provenance[v as usize] != Provenance::Isolated {
            return false;
        }
    }
    for (i, p) in dec.subtrees.iter().enumerate() {
        for &v in &p.vertices {
            match vertex_uses.get_mut(v as usize) {
                Some(c) => *c += 1,
                None => return false,
            }
            if dec.provenance[v as usize] != Provenance::Subtree(i) {
                return false;
            }
        }
        if !p.edges.iter().all(|&e| use_edge(e)) {
            return false;
        }
        let local: Option<Vec<Triple>> = p
            .edges
            .iter()
            .map(|e| {
                let mut out = [0; 3];
                for (o, &v) in out.iter_mut().zip(e) {
                    *o = p.local_index(v)?;
                }
                Some(out)
            })
            .collect();
        match local {
            Some(local) if validate_hypertree(&local, p.vertices.len() as u32).is_ok() => {}
            _ => return false,
        }
    }
    vertex_uses.iter().all(|&c| c == 1) && edge_uses.iter().all(|&c| c == 1)
}

/// Verifies the partition and the six guarantees for degree bound `d`.
/// Returns the violated properties, sorted.
pub fn check_decomposition(
    t: &Hypertree,
    dec: &Decomposition,
    k: u32,
    d: usize,
) -> Result<(), Vec<Property>> {
    let mut bad = Vec::new();
    if !partition_is_exact(t, dec) {
        bad.push(Property::Partition);
    }
    let n = t.n() as u64;
    let (k64, d64) = (k as u64, d as u64);
    let (e, l, i) = (dec.e() as u64, dec.l() as u64, dec.isolated.len() as u64);

    if dec.subtrees.iter().any(|p| p.vertices.len() as u64 > k64) {
        bad.push(Property::SubtreeSize);
    }
    if i * k64 > 2 * d64 * d64 * n {
        bad.push(Property::IsolatedBound);
    }
    if e >= 1 && i < l {
        bad.push(Property::IsolatedCoversSubtrees);
    }
    if l < e {
        bad.push(Property::SubtreesCoverStars);
    }
    if l * (k64 + 3) < n {
        bad.push(Property::SubtreeCount);
    }

    let mut interiors: Vec<u32> = dec
        .stars
        .iter()
        .flat_map(|s| s.rays.iter().map(|&(_, w)| w).chain([s.center]))
        .collect();
    interiors.sort_unstable();
    interiors.dedup();
    let anchor_isolated = dec
        .stars
        .iter()
        .flat_map(Star::anchors)
        .any(|v| dec.isolated.binary_search(&v).is_ok());
    if interiors != dec.isolated || anchor_isolated {
        bad.push(Property::IsolatedAreStarInteriors);
    }

    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

/// Where a star's anchor `v_i` lives after the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AnchorRef {
    pub ray: usize,
    pub vertex: u32,
    pub subtree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarAttachment {
    pub star: usize,
    pub center: u32,
    pub anchors: Vec<AnchorRef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("anchor {vertex} of star {star} is not in any subtree")]
pub struct DanglingAnchor {
    pub star: usize,
    pub vertex: u32,
}

/// For each star in order, the subtree holding each of its anchors.
pub fn reassembly_plan(dec: &Decomposition) -> Result<Vec<StarAttachment>, DanglingAnchor> {
    dec.stars
        .iter()
        .enumerate()
        .map(|(star, s)| {
            let anchors = s
                .rays
                .iter()
                .enumerate()
                .map(|(ray, &(vertex, _))| match dec.provenance.get(vertex as usize) {
                    Some(&Provenance::Subtree(subtree)) => Ok(AnchorRef { ray, vertex, subtree }),
                    _ => Err(DanglingAnchor { star, vertex }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(StarAttachment {
                star,
                center: s.center,
                anchors,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypertree::{annotate, random_bounded_tree, subdivide, GraphTree};

    fn decompose(t: &Hypertree, k: u32) -> Decomposition {
        let ann = annotate(t, None).unwrap();
        saw(t, &ann, k).unwrap()
    }

    #[test]
    fn star_k13_saws_at_root() {
        // z_i = 0,1,2 carry the small labels so they are the celibates;
        // y_i = 3,4,5; center x = 6.
        let t = Hypertree::new(7, vec![[6, 3, 0], [6, 4, 1], [6, 5, 2]]).unwrap();
        let dec = decompose(&t, 4);
        assert_eq!(dec.stars.len(), 1);
        let s = &dec.stars[0];
        assert_eq!(s.center, 6);
        assert_eq!(s.father_ray_index, None);
        assert_eq!(s.rays, vec![(3, 0), (4, 1), (5, 2)]);
        assert_eq!(dec.isolated, vec![0, 1, 2, 6]);
        let singles: Vec<Vec<u32>> = dec.subtrees.iter().map(|p| p.vertices.clone()).collect();
        assert_eq!(singles, vec![vec![3], vec![4], vec![5]]);
        assert_eq!(check_decomposition(&t, &dec, 4, 3), Ok(()));

        let plan = reassembly_plan(&dec).unwrap();
        assert_eq!(plan.len(), 1);
        let targets: Vec<usize> = plan[0].anchors.iter().map(|a| a.subtree).collect();
        assert_eq!(targets, vec![0, 1, 2]);
    }

    #[test]
    fn star_k13_default_labels() {
        let t = subdivide(&GraphTree::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap());
        let dec = decompose(&t, 4);
        assert_eq!(dec.stars.len(), 1);
        assert_eq!(dec.isolated.len(), 4);
        assert_eq!(dec.subtrees.len(), 3);
        assert!(dec.subtrees.iter().all(|p| p.vertices.len() == 1));
        assert_eq!(check_decomposition(&t, &dec, 4, 3), Ok(()));
    }

    #[test]
    fn small_tree_is_one_subtree() {
        let t = subdivide(&random_bounded_tree(6, 3, 3).unwrap());
        let dec = decompose(&t, 20);
        assert!(dec.stars.is_empty());
        assert!(dec.isolated.is_empty());
        assert_eq!(dec.subtrees.len(), 1);
        assert_eq!(dec.subtrees[0].vertices.len(), 11);
        // (3) is waived without stars.
        assert_eq!(check_decomposition(&t, &dec, 20, 3), Ok(()));
        assert!(reassembly_plan(&dec).unwrap().is_empty());
    }

    #[test]
    fn long_path_satisfies_all_properties() {
        let path = GraphTree::new(25, (0..24).map(|i| (i, i + 1)).collect()).unwrap();
        let t = subdivide(&path);
        assert_eq!(t.n(), 49);
        let dec = decompose(&t, 10);
        assert!(dec.e() >= 1);
        assert_eq!(check_decomposition(&t, &dec, 10, 2), Ok(()));
        for a in reassembly_plan(&dec).unwrap() {
            for r in a.anchors {
                assert!(dec.subtrees[r.subtree].vertices.contains(&r.vertex));
            }
        }
    }

    #[test]
    fn single_vertex_and_single_edge() {
        let t = Hypertree::single_vertex();
        let dec = decompose(&t, 3);
        assert_eq!(dec.subtrees.len(), 1);
        let t = Hypertree::new(3, vec![[0, 1, 2]]).unwrap();
        let dec = decompose(&t, 3);
        assert_eq!(dec.subtrees[0].edges, vec![[0, 1, 2]]);
    }

    #[test]
    fn mutants_are_caught() {
        let path = GraphTree::new(25, (0..24).map(|i| (i, i + 1)).collect()).unwrap();
        let t = subdivide(&path);
        let dec = decompose(&t, 10);

        // Move a star center out of I into a subtree.
        let mut moved = dec.clone();
        let c = moved.stars[0].center;
        moved.isolated.retain(|&v| v != c);
        moved.subtrees[0].vertices.push(c);
        moved.subtrees[0].vertices.sort_unstable();
        moved.provenance[c as usize] = Provenance::Subtree(0);
        let bad = check_decomposition(&t, &moved, 10, 2).unwrap_err();
        assert!(bad.contains(&Property::IsolatedAreStarInteriors));

        // Check the same decomposition against a smaller block size so the
        // largest subtree has k+1 vertices.
        let biggest = dec.subtrees.iter().map(|p| p.vertices.len()).max().unwrap() as u32;
        let bad = check_decomposition(&t, &dec, biggest - 1, 2).unwrap_err();
        assert!(bad.contains(&Property::SubtreeSize));
    }

    #[test]
    fn plan_reports_dangling_anchor() {
        let t = Hypertree::new(7, vec![[6, 3, 0], [6, 4, 1], [6, 5, 2]]).unwrap();
        let mut dec = decompose(&t, 4);
        dec.provenance[3] = Provenance::Isolated;
        assert_eq!(
            reassembly_plan(&dec),
            Err(DanglingAnchor { star: 0, vertex: 3 })
        );
    }

    #[test]
    fn sawing_is_deterministic() {
        let t = subdivide(&random_bounded_tree(300, 4, 11).unwrap());
        assert_eq!(decompose(&t, 20), decompose(&t, 20));
    }
}
