//! Reattaching the sawn-off stars through the reservoir.
//!
//! Stars are processed in sawing order. The anchors of each star already have
//! images inside the placed subtrees; the star search then runs on those
//! images and accepts the first center whose whole `W` set lies in `R` and
//! is still unused.

use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use super::realize::Placement;
use super::{CertificateError, Embedding, UNMAPPED};
use crate::decompose::{reassembly_plan, Decomposition};
use crate::design::SteinerTripleSystem;
use crate::hypertree::Hypertree;
use crate::reservoir::Reservoir;
use crate::stars::{find_disjoint_stars_within, Want};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum AttachError {
    #[error("anchor {vertex} of star {star} has no image")]
    UnplacedAnchor { star: usize, vertex: u32 },
    #[error("no unused star inside the reservoir for star {star} (center {center})")]
    NoFreeStar { star: usize, center: u32 },
    #[error("vertex {0} has no image after all stars were attached")]
    Incomplete(u32),
    #[error("certificate check failed: {0}")]
    Certificate(CertificateError),
}

pub fn attach_stars(
    t: &Hypertree,
    sts: &SteinerTripleSystem,
    res: &Reservoir,
    dec: &Decomposition,
    placement: &Placement,
) -> Result<Embedding, AttachError> {
    let plan = reassembly_plan(dec).map_err(|d| AttachError::UnplacedAnchor {
        star: d.star,
        vertex: d.vertex,
    })?;
    let mut map = placement.vertex_map.clone();
    let mut used = vec![false; sts.m() as usize];
    for &x in &map {
        if x != UNMAPPED {
            used[x as usize] = true;
        }
    }
    for (att, star) in plan.iter().zip(&dec.stars) {
        let mut images = Vec::with_capacity(att.anchors.len());
        for a in &att.anchors {
            match map[a.vertex as usize] {
                UNMAPPED => {
                    return Err(AttachError::UnplacedAnchor {
                        star: att.star,
                        vertex: a.vertex,
                    })
                }
                x => images.push(x),
            }
        }
        let fam = find_disjoint_stars_within(sts, &images, Want::Count(1), images.len(), |y| {
            res.contains(y) && !used[y as usize]
        })
        .map_err(|_| AttachError::UnplacedAnchor {
            star: att.star,
            vertex: att.center,
        })?;
        let Some(found) = fam.members.first() else {
            return Err(AttachError::NoFreeStar {
                star: att.star,
                center: att.center,
            });
        };
        map[star.center as usize] = found.center;
        used[found.center as usize] = true;
        for (&(_, w), &img) in star.rays.iter().zip(&found.w) {
            map[w as usize] = img;
            used[img as usize] = true;
        }
    }
    if let Some(v) = map.iter().position(|&x| x == UNMAPPED) {
        return Err(AttachError::Incomplete(v as u32));
    }
    Embedding::from_map(t, sts, map).map_err(AttachError::Certificate)
}
