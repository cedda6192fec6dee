//! Embedding a subdivision tree into a Steiner triple system: subtree
//! isomorphism classes, the sample forest, vertex-disjoint packing into the
//! reservoir complement, and star reattachment through the reservoir.

mod attach;
mod canonical;
mod count;
mod forest;
mod pack;
mod pipeline;
mod realize;

use alloc::vec::Vec;

use serde::Serialize;

use crate::design::{sorted_triple, Triple, TripleSystem};
use crate::hypertree::Hypertree;

pub use attach::{attach_stars, AttachError};
pub use canonical::{canonical_form, canonical_key, CanonicalForm, CanonicalKey};
pub use count::{count_labeled_embeddings, CountError, COUNT_MAX_FOREST, COUNT_MAX_HOST};
pub use forest::{
    build_sample_forest, partition_classes, strict_forest_bounds, Forest, ForestComponent,
    IsoClass, IsoClassPartition, SampleForest, StrictBounds,
};
pub use pack::{pack_forest, PackError, PlacedCopy};
pub use pipeline::{embed, AttemptLog, EmbedError, EmbedReport, Phase, StageStats};
pub use realize::{realize_p, Placement, RealizeError};

/// Marks an unmapped vertex in a partial vertex map.
pub const UNMAPPED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, thiserror::Error)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum ConfigError {
    #[error("degree bound must be positive")]
    Degree,
    #[error("mu must be positive, got {0}")]
    Mu(f64),
    #[error("epsilon must lie in (0, 1), got {0}")]
    Epsilon(f64),
    #[error("block size k must be positive")]
    Block,
    #[error("constants violate 1 > 1/d > mu > epsilon > 1/k")]
    Hierarchy,
    #[error("k = {k} is below 8d^5/epsilon^(d+1) = {required}")]
    StrictBlock { k: u32, required: f64 },
}

/// Constants of one pipeline run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub d: usize,
    pub mu: f64,
    pub epsilon: f64,
    pub k: u32,
    pub seed: u64,
    /// Reservoir redraws after the first attempt.
    pub retry_budget: u32,
    /// Enforce the constant hierarchy and evaluate the forest bounds with the
    /// unclipped sample size.
    pub strict_hierarchy: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            d: 4,
            mu: 0.5,
            epsilon: 0.4,
            k: 20,
            seed: 0,
            retry_budget: 20,
            strict_hierarchy: false,
        }
    }
}

impl PipelineConfig {
    /// `8d⁵ / ε^{d+1}`.
    pub fn strict_block_size(&self) -> f64 {
        let d = self.d as f64;
        let eps_pow = (0..=self.d).fold(1.0, |acc, _| acc * self.epsilon);
        8.0 * d * d * d * d * d / eps_pow
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.d == 0 {
            return Err(ConfigError::Degree);
        }
        if !(self.mu > 0.0) {
            return Err(ConfigError::Mu(self.mu));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(ConfigError::Epsilon(self.epsilon));
        }
        if self.k == 0 {
            return Err(ConfigError::Block);
        }
        if self.strict_hierarchy {
            let inv_d = 1.0 / self.d as f64;
            let inv_k = 1.0 / self.k as f64;
            if !(1.0 > inv_d && inv_d > self.mu && self.mu > self.epsilon && self.epsilon > inv_k) {
                return Err(ConfigError::Hierarchy);
            }
            let required = self.strict_block_size();
            if (self.k as f64) < required {
                return Err(ConfigError::StrictBlock { k: self.k, required });
            }
        }
        Ok(())
    }
}

/// Evidence that one guest edge lands on a host triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub edge: Triple,
    pub image: Triple,
}

/// An injective vertex map from a hypertree into a triple system, with one
/// witness per guest edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub vertex_map: Vec<u32>,
    pub certificate: Vec<Witness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum CertificateError {
    #[error("vertex map has {got} entries for {n} vertices")]
    MapLength { n: u32, got: usize },
    #[error("vertex {0} is unmapped or maps outside the host")]
    BadImage(u32),
    #[error("vertices {0} and {1} share an image")]
    NotInjective(u32, u32),
    #[error("certificate has {got} witnesses for {edges} edges")]
    WitnessCount { edges: usize, got: usize },
    #[error("witness {0} does not describe its edge")]
    WitnessMismatch(usize),
    #[error("edge {0} does not map onto a host triple")]
    NotATriple(usize),
}

impl Embedding {
    /// Builds the certificate for a complete vertex map, checking it as it goes.
    pub fn from_map(
        t: &Hypertree,
        host: &TripleSystem,
        vertex_map: Vec<u32>,
    ) -> Result<Self, CertificateError> {
        let certificate = t
            .edges()
            .iter()
            .map(|&edge| Witness {
                edge,
                image: sorted_triple(edge.map(|v| vertex_map.get(v as usize).copied().unwrap_or(UNMAPPED))),
            })
            .collect();
        let emb = Self {
            vertex_map,
            certificate,
        };
        emb.certify(t, host)?;
        Ok(emb)
    }

    /// Re-checks the embedding from scratch against the host's pair index.
    pub fn certify(&self, t: &Hypertree, host: &TripleSystem) -> Result<(), CertificateError> {
        let n = t.n();
        if self.vertex_map.len() != n as usize {
            return Err(CertificateError::MapLength {
                n,
                got: self.vertex_map.len(),
            });
        }
        let mut owner = alloc::vec![UNMAPPED; host.order() as usize];
        for (v, &x) in self.vertex_map.iter().enumerate() {
            if !host.contains_vertex(x) {
                return Err(CertificateError::BadImage(v as u32));
            }
            if owner[x as usize] != UNMAPPED {
                return Err(CertificateError::NotInjective(owner[x as usize], v as u32));
            }
            owner[x as usize] = v as u32;
        }
        if self.certificate.len() != t.edges().len() {
            return Err(CertificateError::WitnessCount {
                edges: t.edges().len(),
                got: self.certificate.len(),
            });
        }
        for (i, (w, &edge)) in self.certificate.iter().zip(t.edges()).enumerate() {
            let image = sorted_triple(edge.map(|v| self.vertex_map[v as usize]));
            if sorted_triple(w.edge) != sorted_triple(edge) || sorted_triple(w.image) != image {
                return Err(CertificateError::WitnessMismatch(i));
            }
            if host.third(image[0], image[1]) != Some(image[2]) {
                return Err(CertificateError::NotATriple(i));
            }
        }
        Ok(())
    }
}
