//! Constructive embedding of bounded-degree subdivision hypertrees into
//! Steiner triple systems.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end, and wall-clock budgets live in the `sts-embed` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod decompose;
pub mod design;
pub mod embed;
pub mod hypertree;
pub mod oracle;
pub mod reservoir;
pub mod seed;
pub mod stars;

pub use decompose::{check_decomposition, reassembly_plan, saw, Decomposition, Star};
pub use design::{SteinerTripleSystem, Triple, TripleSystem};
pub use embed::{embed, Embedding, PipelineConfig};
pub use hypertree::{annotate, GraphTree, Hypertree, RootedAnnotation};
pub use reservoir::{draw_reservoir, Reservoir};
pub use stars::{find_disjoint_stars, StarFamily, Want};
