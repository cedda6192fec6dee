//! Random reservoir `R ⊂ V(S)` and the induced system `S̃ = S[V∖R]`.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::design::{SteinerTripleSystem, TripleSystem};
use crate::stars::{find_disjoint_stars, Want};

/// Relative tolerance applied to the size and degree audits.
pub const AUDIT_TOLERANCE: f64 = 0.15;
/// Below this order the size and degree audits are reported, not enforced.
pub const AUDIT_MIN_ORDER: u32 = 500;
/// Share of `S̃` degrees that must fall within [`AUDIT_TOLERANCE`].
pub const AUDIT_DEGREE_SHARE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ReservoirError {
    #[error("epsilon {0} is outside [0, 1]")]
    Epsilon(f64),
}

#[derive(Debug, Clone)]
pub struct Reservoir {
    members: Vec<u32>,
    in_reservoir: Vec<bool>,
    epsilon: f64,
    seed: u64,
    complement: TripleSystem,
}

impl Reservoir {
    /// Sorted ascending.
    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn contains(&self, v: u32) -> bool {
        self.in_reservoir[v as usize]
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `S̃`: the triples of `S` avoiding `R`, on the vertices outside `R`.
    pub fn complement_view(&self) -> &TripleSystem {
        &self.complement
    }
}

/// Each vertex joins `R` independently when its uniform draw falls below
/// `epsilon`. Draws are taken in vertex order from a seeded stream, so raising
/// `epsilon` under the same seed only adds vertices.
pub fn draw_reservoir(
    sts: &SteinerTripleSystem,
    epsilon: f64,
    seed: u64,
) -> Result<Reservoir, ReservoirError> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(ReservoirError::Epsilon(epsilon));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let in_reservoir: Vec<bool> = (0..sts.m()).map(|_| rng.gen::<f64>() < epsilon).collect();
    let members = (0..sts.m()).filter(|&v| in_reservoir[v as usize]).collect();
    let keep: Vec<bool> = in_reservoir.iter().map(|&r| !r).collect();
    let complement = sts.induced(&keep);
    Ok(Reservoir {
        members,
        in_reservoir,
        epsilon,
        seed,
        complement,
    })
}

fn relative_deviation(actual: f64, expected: f64) -> f64 {
    if expected == 0.0 {
        return if actual == 0.0 { 0.0 } else { f64::INFINITY };
    }
    let x = (actual - expected) / expected;
    if x < 0.0 {
        -x
    } else {
        x
    }
}

fn powi(x: f64, e: usize) -> f64 {
    (0..e).fold(1.0, |acc, _| acc * x)
}

/// `r(c) = ε^{c+1} m / (2(c²+1))`.
pub fn reservoir_star_target(epsilon: f64, m: u32, c: usize) -> f64 {
    powi(epsilon, c + 1) * m as f64 / (2.0 * (c * c + 1) as f64)
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeAudit {
    /// `(1−ε)² m / 2`.
    pub target: f64,
    pub sampled: usize,
    pub max_deviation: f64,
    pub mean_deviation: f64,
    /// Share of sampled vertices within [`AUDIT_TOLERANCE`] of the target.
    pub within_tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TupleCoverage {
    pub anchors: Vec<u32>,
    pub family_size: usize,
    pub inside_reservoir: usize,
    pub target: f64,
    pub below_target: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub m: u32,
    pub epsilon: f64,
    pub seed: u64,
    pub reservoir_size: usize,
    /// `||R| − εm| / εm`.
    pub size_deviation: f64,
    pub complement_size: usize,
    /// `||V(S̃)| − (1−ε)m| / (1−ε)m`.
    pub complement_deviation: f64,
    pub degree: DegreeAudit,
    pub star_coverage: Vec<TupleCoverage>,
    pub tuples_below_target: usize,
}

impl AuditReport {
    /// Items (1) and (2) within [`AUDIT_TOLERANCE`], and at least
    /// [`AUDIT_DEGREE_SHARE`] of the degrees within it too. Always true below
    /// [`AUDIT_MIN_ORDER`], where the concentration is too weak to enforce.
    pub fn concentrated(&self) -> bool {
        self.m < AUDIT_MIN_ORDER
            || (self.size_deviation <= AUDIT_TOLERANCE
                && self.complement_deviation <= AUDIT_TOLERANCE
                && self.degree.within_tolerance >= AUDIT_DEGREE_SHARE)
    }
}

/// Measures the reservoir against its four expected properties. Degrees are
/// audited on every vertex of `S̃`; star coverage on `tuples` random anchor
/// tuples with sizes drawn from `sizes`.
pub fn audit_reservoir(
    sts: &SteinerTripleSystem,
    res: &Reservoir,
    tuples: usize,
    sizes: RangeInclusive<usize>,
    seed: u64,
) -> AuditReport {
    let m = sts.m();
    let eps = res.epsilon;
    let mf = m as f64;
    let complement = res.complement_view();

    let target = (1.0 - eps) * (1.0 - eps) * mf / 2.0;
    let mut sampled = 0;
    let mut max_deviation: f64 = 0.0;
    let mut total = 0.0;
    let mut within = 0;
    for v in complement.vertices() {
        let dev = relative_deviation(complement.degree(v) as f64, target);
        sampled += 1;
        total += dev;
        max_deviation = max_deviation.max(dev);
        if dev <= AUDIT_TOLERANCE {
            within += 1;
        }
    }
    let degree = DegreeAudit {
        target,
        sampled,
        max_deviation,
        mean_deviation: if sampled > 0 { total / sampled as f64 } else { 0.0 },
        within_tolerance: if sampled > 0 { within as f64 / sampled as f64 } else { 1.0 },
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut star_coverage = Vec::with_capacity(tuples);
    let (lo, hi) = (*sizes.start(), *sizes.end());
    for _ in 0..tuples {
        let c = rng.gen_range(lo.max(1)..=hi.max(lo.max(1))).min(m as usize);
        let anchors: Vec<u32> = sample(&mut rng, m as usize, c)
            .into_iter()
            .map(|v| v as u32)
            .collect();
        let fam = find_disjoint_stars(sts, &anchors, Want::All, c).expect("distinct anchors");
        let inside = fam
            .members
            .iter()
            .filter(|s| s.w_set().all(|x| res.contains(x)))
            .count();
        let target = reservoir_star_target(eps, m, c);
        star_coverage.push(TupleCoverage {
            anchors,
            family_size: fam.len(),
            inside_reservoir: inside,
            target,
            below_target: (inside as f64) < target,
        });
    }
    let tuples_below_target = star_coverage.iter().filter(|t| t.below_target).count();

    AuditReport {
        m,
        epsilon: eps,
        seed: res.seed,
        reservoir_size: res.members.len(),
        size_deviation: relative_deviation(res.members.len() as f64, eps * mf),
        complement_size: complement.vertex_count(),
        complement_deviation: relative_deviation(complement.vertex_count() as f64, (1.0 - eps) * mf),
        degree,
        star_coverage,
        tuples_below_target,
    }
}
