//! Steiner triple systems and partial triple systems.
//!
//! Vertices are dense integers `0..m`. Every pair `{x, y}` is stored in a
//! flat triangular table of size `m(m-1)/2` holding the third vertex of the
//! triple through that pair, so `third_vertex` is a single array read.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use serde::Serialize;

/// An unordered triple stored in ascending order.
pub type Triple = [u32; 3];

const NO_VERTEX: u32 = u32::MAX;

/// Returns the triple with its vertices sorted ascending.
pub fn sorted_triple(t: Triple) -> Triple {
    let mut t = t;
    t.sort_unstable();
    t
}

#[inline]
fn pair_slot(x: u32, y: u32) -> usize {
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let hi = hi as usize;
    hi * (hi - 1) / 2 + lo as usize
}

/// Why a triple was rejected before any coverage check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MalformedKind {
    RepeatedVertex,
    OutOfRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum DesignError {
    #[error("m = {0}: m ≡ 1 or 3 mod 6 required")]
    InvalidOrder(u32),
    #[error("m = {m} is not ≡ {expected} mod 6")]
    WrongResidue { m: u32, expected: u32 },
    #[error("triple {index} {triple:?} is malformed ({kind:?})")]
    Malformed {
        index: usize,
        triple: Triple,
        kind: MalformedKind,
    },
    #[error("pair {{{0}, {1}}} lies in more than one triple")]
    DoublyCovered(u32, u32),
    #[error("pair {{{first_x}, {first_y}}} is uncovered ({count} uncovered pairs in total)")]
    Uncovered {
        first_x: u32,
        first_y: u32,
        count: usize,
    },
    #[error("vertex pair ({0}, {0}) is not a pair")]
    SameVertex(u32),
    #[error("vertex {vertex} out of range for order {order}")]
    VertexOutOfRange { vertex: u32, order: u32 },
}

/// A set of triples on `0..order` in which every pair lies in at most one
/// triple. Vertices may be marked absent, which is how induced subsystems
/// keep host labels.
#[derive(Clone, PartialEq, Eq)]
pub struct TripleSystem {
    order: u32,
    present: Vec<bool>,
    triples: Vec<Triple>,
    pair_index: Vec<u32>,
    incidence: Vec<Vec<u32>>,
}

impl fmt::Debug for TripleSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TripleSystem")
            .field("order", &self.order)
            .field("vertices", &self.vertex_count())
            .field("triples", &self.triples.len())
            .finish()
    }
}

impl TripleSystem {
    /// Builds a partial triple system with every vertex present.
    pub fn new(order: u32, triples: &[Triple]) -> Result<Self, DesignError> {
        Self::with_vertices(vec![true; order as usize], triples)
    }

    /// Builds a partial triple system on the vertices flagged in `present`.
    /// Every triple must lie inside the present vertices.
    pub fn with_vertices(present: Vec<bool>, triples: &[Triple]) -> Result<Self, DesignError> {
        let order = present.len() as u32;
        let m = order as usize;
        let mut pair_index = vec![NO_VERTEX; m * m.saturating_sub(1) / 2];
        let mut incidence = vec![Vec::new(); m];
        let mut stored = Vec::with_capacity(triples.len());
        for (index, &raw) in triples.iter().enumerate() {
            let t = sorted_triple(raw);
            if t[2] >= order || t.iter().any(|&v| !present[v as usize]) {
                return Err(DesignError::Malformed {
                    index,
                    triple: raw,
                    kind: MalformedKind::OutOfRange,
                });
            }
            if t[0] == t[1] || t[1] == t[2] {
                return Err(DesignError::Malformed {
                    index,
                    triple: raw,
                    kind: MalformedKind::RepeatedVertex,
                });
            }
            for (a, b, c) in [(t[0], t[1], t[2]), (t[0], t[2], t[1]), (t[1], t[2], t[0])] {
                let slot = pair_slot(a, b);
                if pair_index[slot] != NO_VERTEX {
                    return Err(DesignError::DoublyCovered(a, b));
                }
                pair_index[slot] = c;
            }
            let ti = stored.len() as u32;
            for v in t {
                incidence[v as usize].push(ti);
            }
            stored.push(t);
        }
        Ok(Self {
            order,
            present,
            triples: stored,
            pair_index,
            incidence,
        })
    }

    /// Label space size. Absent vertices still occupy a label.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn vertex_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        (v as usize) < self.present.len() && self.present[v as usize]
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(v, _)| v as u32)
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Indices of the triples through `v`, ascending.
    pub fn incident(&self, v: u32) -> &[u32] {
        &self.incidence[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.incidence[v as usize].len()
    }

    /// Third vertex of the triple through `{x, y}`, if any.
    #[inline]
    pub fn third(&self, x: u32, y: u32) -> Option<u32> {
        if x == y || x >= self.order || y >= self.order {
            return None;
        }
        match self.pair_index[pair_slot(x, y)] {
            NO_VERTEX => None,
            z => Some(z),
        }
    }

    pub fn has_triple(&self, t: Triple) -> bool {
        t[0] != t[1] && self.third(t[0], t[1]) == Some(t[2])
    }

    /// The subsystem induced on the vertices flagged in `keep`: the triples
    /// lying entirely inside them.
    pub fn induced(&self, keep: &[bool]) -> TripleSystem {
        assert_eq!(keep.len(), self.present.len());
        let present: Vec<bool> = self
            .present
            .iter()
            .zip(keep)
            .map(|(&p, &k)| p && k)
            .collect();
        let triples: Vec<Triple> = self
            .triples
            .iter()
            .copied()
            .filter(|t| t.iter().all(|&v| present[v as usize]))
            .collect();
        Self::with_vertices(present, &triples).expect("subset of a valid system")
    }
}

/// Checks a candidate triple list against the Steiner triple system axioms.
///
/// Reports the first malformed triple, then the first doubly covered pair,
/// then the first uncovered pair together with the number of uncovered pairs.
pub fn validate(triples: &[Triple], m: u32) -> Result<(), DesignError> {
    let mm = m as usize;
    let mut cover = vec![0u8; mm * mm.saturating_sub(1) / 2];
    for (index, &raw) in triples.iter().enumerate() {
        let t = sorted_triple(raw);
        if t[2] >= m {
            return Err(DesignError::Malformed {
                index,
                triple: raw,
                kind: MalformedKind::OutOfRange,
            });
        }
        if t[0] == t[1] || t[1] == t[2] {
            return Err(DesignError::Malformed {
                index,
                triple: raw,
                kind: MalformedKind::RepeatedVertex,
            });
        }
    }
    for &raw in triples {
        let t = sorted_triple(raw);
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            let slot = pair_slot(a, b);
            if cover[slot] > 0 {
                return Err(DesignError::DoublyCovered(a, b));
            }
            cover[slot] = 1;
        }
    }
    let mut first = None;
    let mut count = 0;
    for y in 1..m {
        for x in 0..y {
            if cover[pair_slot(x, y)] == 0 {
                count += 1;
                first.get_or_insert((x, y));
            }
        }
    }
    match first {
        None => Ok(()),
        Some((first_x, first_y)) => Err(DesignError::Uncovered {
            first_x,
            first_y,
            count,
        }),
    }
}

/// `true` when a Steiner triple system of order `m` exists.
pub fn admissible_order(m: u32) -> bool {
    m >= 1 && matches!(m % 6, 1 | 3)
}

/// Smallest admissible order that is at least `m`.
pub fn next_admissible_order(m: u32) -> u32 {
    let mut m = m.max(1);
    while !admissible_order(m) {
        m += 1;
    }
    m
}

/// A triple system in which every pair lies in exactly one triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerTripleSystem(TripleSystem);

impl Deref for SteinerTripleSystem {
    type Target = TripleSystem;

    fn deref(&self) -> &TripleSystem {
        &self.0
    }
}

impl SteinerTripleSystem {
    pub fn from_triples(m: u32, triples: &[Triple]) -> Result<Self, DesignError> {
        validate(triples, m)?;
        Ok(Self(TripleSystem::new(m, triples)?))
    }

    /// Bose or Skolem, whichever applies to `m`.
    pub fn construct(m: u32) -> Result<Self, DesignError> {
        match m % 6 {
            3 => Self::bose(m),
            1 if m >= 7 => Self::skolem(m),
            // STS(1) has no triples.
            1 => Self::from_triples(1, &[]),
            _ => Err(DesignError::InvalidOrder(m)),
        }
    }

    /// Bose construction for `m ≡ 3 (mod 6)` over `Z_v × Z_3`, `v = m/3`,
    /// using the idempotent commutative quasigroup `x∘y = (x+y)(v+1)/2 mod v`.
    pub fn bose(m: u32) -> Result<Self, DesignError> {
        if m % 6 != 3 {
            return Err(DesignError::WrongResidue { m, expected: 3 });
        }
        let v = m / 3;
        let half = (v as u64).div_ceil(2);
        let op = |x: u32, y: u32| (((x as u64 + y as u64) * half) % v as u64) as u32;
        let label = |x: u32, i: u32| x + (i % 3) * v;
        let mut triples = Vec::with_capacity((m as usize) * (m as usize - 1) / 6);
        for x in 0..v {
            triples.push([label(x, 0), label(x, 1), label(x, 2)]);
        }
        for x in 0..v {
            for y in x + 1..v {
                for i in 0..3 {
                    triples.push([label(x, i), label(y, i), label(op(x, y), i + 1)]);
                }
            }
        }
        Self::from_triples(m, &triples)
    }

    /// Skolem construction for `m ≡ 1 (mod 6)`, `m ≥ 7`, over
    /// `{∞} ∪ Z_{2t} × Z_3` with a half-idempotent commutative quasigroup
    /// of order `2t`.
    pub fn skolem(m: u32) -> Result<Self, DesignError> {
        if m % 6 != 1 || m < 7 {
            return Err(DesignError::WrongResidue { m, expected: 1 });
        }
        let t = (m - 1) / 6;
        let q = 2 * t;
        let op = |x: u32, y: u32| {
            let s = (x + y) % q;
            if s % 2 == 0 {
                s / 2
            } else {
                t + (s - 1) / 2
            }
        };
        let label = |x: u32, i: u32| x + (i % 3) * q;
        let inf = 3 * q;
        let mut triples = Vec::with_capacity((m as usize) * (m as usize - 1) / 6);
        for x in 0..t {
            triples.push([label(x, 0), label(x, 1), label(x, 2)]);
        }
        for x in 0..t {
            for i in 0..3 {
                triples.push([inf, label(t + x, i), label(x, i + 1)]);
            }
        }
        for x in 0..q {
            for y in x + 1..q {
                for i in 0..3 {
                    triples.push([label(x, i), label(y, i), label(op(x, y), i + 1)]);
                }
            }
        }
        Self::from_triples(m, &triples)
    }

    pub fn m(&self) -> u32 {
        self.0.order
    }

    pub fn as_system(&self) -> &TripleSystem {
        &self.0
    }

    /// The unique `z` with `{x, y, z}` a triple.
    pub fn third_vertex(&self, x: u32, y: u32) -> Result<u32, DesignError> {
        let order = self.0.order;
        for v in [x, y] {
            if v >= order {
                return Err(DesignError::VertexOutOfRange { vertex: v, order });
            }
        }
        if x == y {
            return Err(DesignError::SameVertex(x));
        }
        Ok(self.0.pair_index[pair_slot(x, y)])
    }
}
