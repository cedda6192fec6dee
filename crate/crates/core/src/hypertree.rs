//! 3-uniform hypertrees, graph trees, and the rooted annotation used by the
//! decomposition (father/son relations, celibate vertices, red/blue coloring,
//! progeny sizes).

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::design::{sorted_triple, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum HypertreeViolation {
    #[error("edge {edge} repeats a vertex")]
    RepeatedVertex { edge: usize },
    #[error("edge {edge} has a vertex outside 0..{n}")]
    OutOfRange { edge: usize, n: u32 },
    #[error("edge {edge} closes a cycle")]
    Cycle { edge: usize },
    #[error("vertex {vertex} is not connected to vertex 0")]
    Disconnected { vertex: u32 },
    #[error("{edges} edges on {n} vertices; a hypertree has (n-1)/2")]
    SizeMismatch { n: u32, edges: usize },
}

struct DisjointSets(Vec<u32>);

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self((0..n as u32).collect())
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let up = self.0[self.0[x as usize] as usize];
            self.0[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra as usize] = rb;
    }
}

/// Checks that `edges` form a hypertree on `0..n`: the vertex–edge incidence
/// graph must be a tree. Violations are reported in the order malformed edge,
/// cycle, disconnection, size.
pub fn validate_hypertree(edges: &[Triple], n: u32) -> Result<(), HypertreeViolation> {
    if n == 0 {
        return Err(HypertreeViolation::SizeMismatch { n, edges: edges.len() });
    }
    for (edge, t) in edges.iter().enumerate() {
        if t.iter().any(|&v| v >= n) {
            return Err(HypertreeViolation::OutOfRange { edge, n });
        }
        if t[0] == t[1] || t[0] == t[2] || t[1] == t[2] {
            return Err(HypertreeViolation::RepeatedVertex { edge });
        }
    }
    let mut sets = DisjointSets::new(n as usize);
    for (edge, t) in edges.iter().enumerate() {
        let roots = [sets.find(t[0]), sets.find(t[1]), sets.find(t[2])];
        if roots[0] == roots[1] || roots[0] == roots[2] || roots[1] == roots[2] {
            return Err(HypertreeViolation::Cycle { edge });
        }
        sets.union(t[0], t[1]);
        sets.union(t[0], t[2]);
    }
    let base = sets.find(0);
    for v in 1..n {
        if sets.find(v) != base {
            return Err(HypertreeViolation::Disconnected { vertex: v });
        }
    }
    if 2 * edges.len() + 1 != n as usize {
        return Err(HypertreeViolation::SizeMismatch { n, edges: edges.len() });
    }
    Ok(())
}

/// A connected 3-uniform hypergraph with unique paths between vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypertree {
    n: u32,
    edges: Vec<Triple>,
    #[serde(skip)]
    incidence: Vec<Vec<u32>>,
}

impl Hypertree {
    pub fn new(n: u32, edges: Vec<Triple>) -> Result<Self, HypertreeViolation> {
        validate_hypertree(&edges, n)?;
        let edges: Vec<Triple> = edges.into_iter().map(sorted_triple).collect();
        let mut incidence = vec![Vec::new(); n as usize];
        for (i, t) in edges.iter().enumerate() {
            for &v in t {
                incidence[v as usize].push(i as u32);
            }
        }
        Ok(Self { n, edges, incidence })
    }

    /// The hypertree with one vertex and no edges.
    pub fn single_vertex() -> Self {
        Self::new(1, Vec::new()).expect("one vertex is a hypertree")
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> &[Triple] {
        &self.edges
    }

    pub fn incident(&self, v: u32) -> &[u32] {
        &self.incidence[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.incidence[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The same tree with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[u32]) -> Self {
        assert_eq!(perm.len(), self.n as usize);
        let edges = self
            .edges
            .iter()
            .map(|t| [perm[t[0] as usize], perm[t[1] as usize], perm[t[2] as usize]])
            .collect();
        Self::new(self.n, edges).expect("relabeling preserves the hypertree axioms")
    }

    /// A uniformly random relabeling, deterministic per seed.
    pub fn shuffled(&self, seed: u64) -> Self {
        let mut perm: Vec<u32> = (0..self.n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        self.relabeled(&perm)
    }
}

/// `true` iff every edge has a vertex of degree one.
pub fn is_subdivision_tree(t: &Hypertree) -> bool {
    t.edges
        .iter()
        .all(|e| e.iter().any(|&v| t.degree(v) == 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum GraphTreeError {
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("{edges} edges on {order} vertices")]
    WrongEdgeCount { order: u32, edges: usize },
    #[error("edge {0} is malformed")]
    BadEdge(usize),
    #[error("edge {0} closes a cycle")]
    Cycle(usize),
    #[error("order {order} with degree bound {d} is infeasible")]
    Infeasible { order: u32, d: usize },
}

/// An ordinary (2-uniform) tree on `0..order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphTree {
    order: u32,
    edges: Vec<(u32, u32)>,
}

impl GraphTree {
    pub fn new(order: u32, edges: Vec<(u32, u32)>) -> Result<Self, GraphTreeError> {
        if order == 0 {
            return Err(GraphTreeError::Empty);
        }
        if edges.len() + 1 != order as usize {
            return Err(GraphTreeError::WrongEdgeCount { order, edges: edges.len() });
        }
        let mut sets = DisjointSets::new(order as usize);
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a >= order || b >= order || a == b {
                return Err(GraphTreeError::BadEdge(i));
            }
            if sets.find(a) == sets.find(b) {
                return Err(GraphTreeError::Cycle(i));
            }
            sets.union(a, b);
        }
        Ok(Self { order, edges })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.order as usize];
        for &(a, b) in &self.edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        deg
    }
}

/// Replaces every edge `{x, y}` with the hyperedge `{x, y, z_xy}`, where the
/// new vertex `z_xy` takes label `order + i` for the `i`-th edge.
pub fn subdivide(t: &GraphTree) -> Hypertree {
    let edges = t
        .edges
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| [x, y, t.order + i as u32])
        .collect();
    Hypertree::new(2 * t.order - 1, edges).expect("subdivision of a tree is a hypertree")
}

/// Random tree grown one vertex at a time: vertex `i` attaches to a uniform
/// choice among earlier vertices that still have degree below `d`.
pub fn random_bounded_tree(order: u32, d: usize, seed: u64) -> Result<GraphTree, GraphTreeError> {
    if order < 2 || (d < 2 && order > 2) || d == 0 {
        return Err(GraphTreeError::Infeasible { order, d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degree = vec![0usize; order as usize];
    let mut open: Vec<u32> = vec![0];
    let mut edges = Vec::with_capacity(order as usize - 1);
    for v in 1..order {
        let slot = rng.gen_range(0..open.len());
        let p = open[slot];
        edges.push((p, v));
        degree[p as usize] += 1;
        degree[v as usize] = 1;
        if degree[p as usize] >= d {
            open.swap_remove(slot);
        }
        if d > 1 {
            open.push(v);
        }
    }
    GraphTree::new(order, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Red,
    Blue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum AnnotateError {
    #[error("root {0} is out of range")]
    RootOutOfRange(u32),
    #[error("root {0} has degree one while vertices of degree two or more exist")]
    LeafRoot(u32),
    #[error("edge {0} has no vertex of degree one")]
    NotSubdivision(usize),
}

/// Rooting of a subdivision tree together with the coloring and celibate
/// choice the decomposition relies on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootedAnnotation {
    pub root: u32,
    pub father: Vec<Option<u32>>,
    /// Edge joining a vertex to its father.
    pub parent_edge: Vec<Option<u32>>,
    /// Edges in which the vertex is the one closest to the root.
    pub child_edges: Vec<Vec<u32>>,
    pub celibate_of_edge: Vec<u32>,
    pub color: Vec<Color>,
    pub progeny_size: Vec<u32>,
    /// Breadth-first order from the root.
    pub bfs_order: Vec<u32>,
}

impl RootedAnnotation {
    pub fn is_celibate(&self, t: &Hypertree, v: u32) -> bool {
        t.degree(v) == 1 && self.celibate_of_edge[t.incident(v)[0] as usize] == v
    }

    /// Sons of `v`: the two lower vertices of each child edge.
    pub fn sons<'a>(&'a self, t: &'a Hypertree, v: u32) -> impl Iterator<Item = u32> + 'a {
        self.child_edges[v as usize]
            .iter()
            .flat_map(move |&e| t.edges()[e as usize])
            .filter(move |&x| x != v)
    }
}

/// Roots `t` (default: smallest label of degree ≥ 2), designates one celibate
/// vertex per edge (smallest-label degree-one vertex other than the root), and
/// colors vertices: celibate blue, root red, otherwise opposite of the father.
pub fn annotate(t: &Hypertree, root: Option<u32>) -> Result<RootedAnnotation, AnnotateError> {
    let n = t.n();
    let branching = (0..n).find(|&v| t.degree(v) >= 2);
    let root = match root {
        Some(r) if r >= n => return Err(AnnotateError::RootOutOfRange(r)),
        Some(r) if t.degree(r) < 2 && branching.is_some() => return Err(AnnotateError::LeafRoot(r)),
        Some(r) => r,
        None => branching.unwrap_or(0),
    };

    let mut celibate_of_edge = Vec::with_capacity(t.edges().len());
    for (i, e) in t.edges().iter().enumerate() {
        let c = e
            .iter()
            .copied()
            .filter(|&v| v != root && t.degree(v) == 1)
            .min()
            .ok_or(AnnotateError::NotSubdivision(i))?;
        celibate_of_edge.push(c);
    }

    let nn = n as usize;
    let mut father = vec![None; nn];
    let mut parent_edge = vec![None; nn];
    let mut child_edges = vec![Vec::new(); nn];
    let mut color = vec![Color::Blue; nn];
    let mut seen = vec![false; nn];
    let mut bfs_order = Vec::with_capacity(nn);
    let mut queue = VecDeque::from([root]);
    seen[root as usize] = true;
    color[root as usize] = Color::Red;
    while let Some(p) = queue.pop_front() {
        bfs_order.push(p);
        for &e in t.incident(p) {
            if Some(e) == parent_edge[p as usize] {
                continue;
            }
            child_edges[p as usize].push(e);
            for &c in &t.edges()[e as usize] {
                if c == p {
                    continue;
                }
                debug_assert!(!seen[c as usize]);
                seen[c as usize] = true;
                father[c as usize] = Some(p);
                parent_edge[c as usize] = Some(e);
                color[c as usize] = if celibate_of_edge[e as usize] == c || color[p as usize] == Color::Red {
                    Color::Blue
                } else {
                    Color::Red
                };
                queue.push_back(c);
            }
        }
    }

    let mut progeny_size = vec![1u32; nn];
    for &v in bfs_order.iter().rev() {
        if let Some(f) = father[v as usize] {
            progeny_size[f as usize] += progeny_size[v as usize];
        }
    }

    Ok(RootedAnnotation {
        root,
        father,
        parent_edge,
        child_edges,
        celibate_of_edge,
        color,
        progeny_size,
        bfs_order,
    })
}
