//! The full embedding pipeline with reservoir redraws.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use super::attach::attach_stars;
use super::forest::{build_sample_forest, partition_classes, strict_forest_bounds, StrictBounds};
use super::pack::pack_forest;
use super::realize::{class_supply, realize_p};
use super::{ConfigError, Embedding, PipelineConfig};
use crate::decompose::{saw, DecomposeError};
use crate::design::SteinerTripleSystem;
use crate::hypertree::{annotate, is_subdivision_tree, AnnotateError, Hypertree};
use crate::reservoir::{audit_reservoir, draw_reservoir, AUDIT_MIN_ORDER};
use crate::seed::{derive, Stage};

/// Where an attempt stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Reservoir,
    Pack,
    Realize,
    Attach,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttemptLog {
    pub attempt: u32,
    pub reservoir_seed: u64,
    pub packing_seed: u64,
    pub reservoir_size: usize,
    pub failed_at: Option<Phase>,
    pub detail: Option<String>,
}

/// Sizes of the deterministic stages, shared by every attempt.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageStats {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub e: usize,
    pub l: usize,
    pub isolated: usize,
    pub t: usize,
    pub sample_size: u64,
    pub r: u32,
    pub f: usize,
    pub copies_needed: usize,
    /// `(l_i, placed copies of class i)` per class.
    pub supply: Vec<(usize, usize)>,
    pub strict: Option<StrictBounds>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbedReport {
    pub embedding: Embedding,
    /// Sorted reservoir of the successful attempt.
    pub reservoir: Vec<u32>,
    /// Isolated vertices of the decomposition; their images lie in the reservoir.
    pub isolated: Vec<u32>,
    pub stats: StageStats,
    pub retries: u32,
    pub attempts: Vec<AttemptLog>,
}

#[derive(Debug, Clone, Serialize, thiserror::Error)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum EmbedError {
    #[error("invalid configuration: {0}")]
    Config(ConfigError),
    #[error("tree is not a subdivision tree")]
    NotSubdivision,
    #[error("tree has maximum degree {max}, above the bound {d}")]
    DegreeTooLarge { max: usize, d: usize },
    #[error("host has m = {m} < (1 + mu)·n = {required}")]
    HostTooSmall { m: u32, n: u32, required: f64 },
    #[error("annotation failed: {0}")]
    Annotate(AnnotateError),
    #[error("decomposition failed: {0}")]
    Decompose(DecomposeError),
    #[error("strict forest bounds violated")]
    StrictBounds { bounds: StrictBounds },
    #[error("all {} attempts failed", attempts.len())]
    Exhausted {
        stats: StageStats,
        attempts: Vec<AttemptLog>,
    },
}

/// Embeds `t` into `sts`: annotate, saw, partition into classes, build the
/// sample forest, then up to `1 + retry_budget` times draw a reservoir, pack
/// the forest into `S̃`, realize the subtrees, and attach the stars. A returned
/// embedding has passed the certificate check.
pub fn embed(
    t: &Hypertree,
    sts: &SteinerTripleSystem,
    cfg: &PipelineConfig,
) -> Result<EmbedReport, EmbedError> {
    cfg.validate().map_err(EmbedError::Config)?;
    if !is_subdivision_tree(t) {
        return Err(EmbedError::NotSubdivision);
    }
    if t.max_degree() > cfg.d {
        return Err(EmbedError::DegreeTooLarge {
            max: t.max_degree(),
            d: cfg.d,
        });
    }
    let (n, m) = (t.n(), sts.m());
    let required = (1.0 + cfg.mu) * n as f64;
    if (m as f64) < required {
        return Err(EmbedError::HostTooSmall { m, n, required });
    }

    let ann = annotate(t, None).map_err(EmbedError::Annotate)?;
    let dec = saw(t, &ann, cfg.k).map_err(EmbedError::Decompose)?;
    let partition = partition_classes(&dec);
    let forest = build_sample_forest(&partition);
    let copies_needed = partition.copies_needed();
    let supply = class_supply(&partition, &forest, copies_needed);
    let strict = cfg
        .strict_hierarchy
        .then(|| strict_forest_bounds(&partition, n, cfg.mu));
    let stats = StageStats {
        n,
        m,
        k: cfg.k,
        e: dec.e(),
        l: dec.l(),
        isolated: dec.isolated.len(),
        t: partition.t(),
        sample_size: partition.sample_size,
        r: forest.r(),
        f: forest.f(),
        copies_needed,
        supply: partition
            .classes
            .iter()
            .zip(&supply)
            .map(|(c, &s)| (c.size(), s))
            .collect(),
        strict,
    };
    if let Some(b) = &stats.strict {
        if !(b.within_size_cap && b.within_density_cap) {
            return Err(EmbedError::StrictBounds { bounds: b.clone() });
        }
    }

    let mut attempts = Vec::new();
    for attempt in 0..=cfg.retry_budget {
        let reservoir_seed = derive(cfg.seed, Stage::Reservoir, attempt as u64);
        let packing_seed = derive(cfg.seed, Stage::Packing, attempt as u64);
        let res = draw_reservoir(sts, cfg.epsilon, reservoir_seed)
            .expect("epsilon validated with the configuration");
        let mut log = AttemptLog {
            attempt,
            reservoir_seed,
            packing_seed,
            reservoir_size: res.members().len(),
            failed_at: None,
            detail: None,
        };
        let fail = |log: &mut AttemptLog, phase, detail: String| {
            log.failed_at = Some(phase);
            log.detail = Some(detail);
        };

        if m >= AUDIT_MIN_ORDER {
            let audit = audit_reservoir(sts, &res, 0, 1..=1, derive(cfg.seed, Stage::Audit, attempt as u64));
            if !audit.concentrated() {
                fail(&mut log, Phase::Reservoir, String::from("reservoir audit outside tolerance"));
                attempts.push(log);
                continue;
            }
        }
        if res.members().len() < dec.isolated.len() {
            let d = format!("|R| = {} < |I| = {}", res.members().len(), dec.isolated.len());
            fail(&mut log, Phase::Reservoir, d);
            attempts.push(log);
            continue;
        }
        let copies = match pack_forest(res.complement_view(), &forest, copies_needed, packing_seed) {
            Ok(c) => c,
            Err(e) => {
                fail(&mut log, Phase::Pack, format!("{e}"));
                attempts.push(log);
                continue;
            }
        };
        let placement = match realize_p(&dec, &partition, &forest, &copies) {
            Ok(p) => p,
            Err(e) => {
                fail(&mut log, Phase::Realize, format!("{e}"));
                attempts.push(log);
                continue;
            }
        };
        match attach_stars(t, sts, &res, &dec, &placement) {
            Ok(embedding) => {
                attempts.push(log);
                return Ok(EmbedReport {
                    embedding,
                    reservoir: res.members().to_vec(),
                    isolated: dec.isolated.clone(),
                    stats,
                    retries: attempt,
                    attempts,
                });
            }
            Err(e) => {
                fail(&mut log, Phase::Attach, format!("{e}"));
                attempts.push(log);
            }
        }
    }
    Err(EmbedError::Exhausted { stats, attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypertree::{random_bounded_tree, subdivide, GraphTree};

    fn check_contract(t: &Hypertree, sts: &SteinerTripleSystem, rep: &EmbedReport) {
        assert_eq!(rep.embedding.certify(t, sts), Ok(()));
        let map = &rep.embedding.vertex_map;
        for v in 0..t.n() {
            let x = map[v as usize];
            let in_r = rep.reservoir.binary_search(&x).is_ok();
            assert_eq!(in_r, rep.isolated.binary_search(&v).is_ok());
        }
    }

    #[test]
    fn single_edge_into_fano() {
        let t = Hypertree::new(3, alloc::vec![[0, 1, 2]]).unwrap();
        let s = SteinerTripleSystem::construct(7).unwrap();
        let cfg = PipelineConfig {
            mu: 0.5,
            ..Default::default()
        };
        let rep = embed(&t, &s, &cfg).unwrap();
        check_contract(&t, &s, &rep);
    }

    #[test]
    fn counterexample_rejected_at_gate() {
        let t = Hypertree::new(7, alloc::vec![[0, 1, 2], [0, 3, 4], [2, 5, 6]]).unwrap();
        let s = SteinerTripleSystem::construct(7).unwrap();
        let cfg = PipelineConfig {
            mu: 0.01,
            epsilon: 0.005,
            ..Default::default()
        };
        assert!(matches!(embed(&t, &s, &cfg), Err(EmbedError::HostTooSmall { .. })));
    }

    #[test]
    fn k13_into_sts15() {
        let t = subdivide(&GraphTree::new(4, alloc::vec![(0, 1), (0, 2), (0, 3)]).unwrap());
        let s = SteinerTripleSystem::construct(15).unwrap();
        let cfg = PipelineConfig {
            d: 3,
            mu: 1.0,
            epsilon: 0.5,
            k: 4,
            seed: 1,
            ..Default::default()
        };
        let rep = embed(&t, &s, &cfg).unwrap();
        check_contract(&t, &s, &rep);
    }

    #[test]
    fn random_tree_into_sts301() {
        let t = subdivide(&random_bounded_tree(100, 4, 11).unwrap());
        let s = SteinerTripleSystem::construct(301).unwrap();
        let cfg = PipelineConfig {
            seed: 4,
            ..Default::default()
        };
        let rep = embed(&t, &s, &cfg).unwrap();
        check_contract(&t, &s, &rep);
        let again = embed(&t, &s, &cfg).unwrap();
        assert_eq!(rep.embedding, again.embedding);
    }

    #[test]
    fn gate_checks() {
        let s = SteinerTripleSystem::construct(301).unwrap();
        let t = subdivide(&random_bounded_tree(60, 5, 2).unwrap());
        let cfg = PipelineConfig {
            d: 2,
            ..Default::default()
        };
        if t.max_degree() > 2 {
            assert!(matches!(embed(&t, &s, &cfg), Err(EmbedError::DegreeTooLarge { .. })));
        }
        let tight = Hypertree::new(9, alloc::vec![[0, 1, 2], [2, 3, 4], [3, 5, 6], [4, 7, 8]]).unwrap();
        assert!(matches!(embed(&tight, &s, &Default::default()), Err(EmbedError::NotSubdivision)));
    }
}
