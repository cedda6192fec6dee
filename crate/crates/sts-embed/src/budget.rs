//! Wall-clock and node budgets for the brute-force oracle.

use std::time::{Duration, Instant};

use serde::Serialize;
use sts_embed_core::design::TripleSystem;
use sts_embed_core::hypertree::Hypertree;
use sts_embed_core::oracle::{brute_embed, OracleOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBudget {
    pub node_limit: u64,
    #[serde(serialize_with = "as_secs")]
    pub time_limit: Duration,
}

fn as_secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("search budget limits must be positive")]
pub struct BudgetError;

impl SearchBudget {
    pub fn new(node_limit: u64, time_limit: Duration) -> Result<Self, BudgetError> {
        if node_limit == 0 || time_limit.is_zero() {
            return Err(BudgetError);
        }
        Ok(Self {
            node_limit,
            time_limit,
        })
    }

    pub fn run(&self, t: &Hypertree, host: &TripleSystem) -> OracleOutcome {
        let start = Instant::now();
        brute_embed(t, host, self.node_limit, || start.elapsed() > self.time_limit)
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            node_limit: 50_000_000,
            time_limit: Duration::from_secs(60),
        }
    }
}
