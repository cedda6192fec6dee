//! Greedy search for pairwise-disjoint stars through a fixed anchor tuple.
//!
//! For anchors `v_1..v_c`, a center `u` determines the star
//! `{v_i, w_i, u}` with `w_i = third(v_i, u)`. Centers are scanned in
//! ascending order. Excluded are the anchors, the set `Q` of thirds of anchor
//! pairs, every earlier `W_l = {w_1..w_c, u}`, and every `third(v_i, w_j)`
//! with `i ≠ j` for earlier stars. Whatever survives yields a star disjoint
//! from all earlier ones off the anchors.

use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::design::SteinerTripleSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Want {
    Count(usize),
    All,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarMember {
    pub center: u32,
    /// `w[i]` completes the triple with anchor `i` and the center.
    pub w: Vec<u32>,
}

impl StarMember {
    /// `W_l`: the `w` vertices followed by the center.
    pub fn w_set(&self) -> impl Iterator<Item = u32> + '_ {
        self.w.iter().copied().chain([self.center])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarFamily {
    pub anchors: Vec<u32>,
    pub members: Vec<StarMember>,
}

impl StarFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum StarError {
    #[error("at least one anchor is required")]
    NoAnchors,
    #[error("anchor {0} appears twice")]
    DuplicateAnchor(u32),
    #[error("anchor {0} is not a vertex of the system")]
    AnchorOutOfRange(u32),
    #[error("{c} anchors exceed the degree bound {d}")]
    TooManyAnchors { c: usize, d: usize },
}

/// The count every full greedy run reaches: `⌊(m−1)/(c²+1)⌋`.
pub fn guaranteed_count(m: u32, c: usize) -> usize {
    (m as usize).saturating_sub(1) / (c * c + 1)
}

pub fn find_disjoint_stars(
    sts: &SteinerTripleSystem,
    anchors: &[u32],
    want: Want,
    degree_bound: usize,
) -> Result<StarFamily, StarError> {
    find_disjoint_stars_within(sts, anchors, want, degree_bound, |_| true)
}

/// As [`find_disjoint_stars`], but a center is only accepted when every
/// vertex of its `W` set passes `admissible`. Rejected centers are skipped
/// without being excluded, so the count guarantee no longer applies.
pub fn find_disjoint_stars_within(
    sts: &SteinerTripleSystem,
    anchors: &[u32],
    want: Want,
    degree_bound: usize,
    admissible: impl Fn(u32) -> bool,
) -> Result<StarFamily, StarError> {
    let m = sts.m();
    let c = anchors.len();
    if c == 0 {
        return Err(StarError::NoAnchors);
    }
    if c > degree_bound {
        return Err(StarError::TooManyAnchors { c, d: degree_bound });
    }
    let mut blocked = vec![false; m as usize];
    for &v in anchors {
        if v >= m {
            return Err(StarError::AnchorOutOfRange(v));
        }
        if blocked[v as usize] {
            return Err(StarError::DuplicateAnchor(v));
        }
        blocked[v as usize] = true;
    }
    // Anchors and earlier W sets; the center exclusions keep new W sets off it.
    let mut taken = blocked.clone();
    let third = |x: u32, y: u32| sts.third(x, y).expect("Steiner system covers every pair");
    for (i, &a) in anchors.iter().enumerate() {
        for &b in &anchors[i + 1..] {
            blocked[third(a, b) as usize] = true;
        }
    }

    let limit = match want {
        Want::Count(n) => n,
        Want::All => usize::MAX,
    };
    let mut members = Vec::new();
    let mut w = Vec::with_capacity(c);
    for u in 0..m {
        if members.len() >= limit {
            break;
        }
        if blocked[u as usize] || !admissible(u) {
            continue;
        }
        w.clear();
        w.extend(anchors.iter().map(|&v| third(v, u)));
        if !w.iter().all(|&x| admissible(x)) {
            continue;
        }
        debug_assert!(w.iter().all(|&x| !taken[x as usize]));
        blocked[u as usize] = true;
        taken[u as usize] = true;
        for &x in &w {
            blocked[x as usize] = true;
            taken[x as usize] = true;
        }
        for (i, &v) in anchors.iter().enumerate() {
            for (j, &wj) in w.iter().enumerate() {
                if i != j {
                    blocked[third(v, wj) as usize] = true;
                }
            }
        }
        members.push(StarMember {
            center: u,
            w: w.clone(),
        });
    }
    Ok(StarFamily {
        anchors: anchors.to_vec(),
        members,
    })
}
