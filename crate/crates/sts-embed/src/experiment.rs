//! Seeded end-to-end trials and their per-cell success rates.

use std::collections::BTreeMap;

use serde::Serialize;
use sts_embed_core::design::{next_admissible_order, SteinerTripleSystem};
use sts_embed_core::embed::{embed, EmbedError, EmbedReport, PipelineConfig, StageStats};
use sts_embed_core::hypertree::{random_bounded_tree, subdivide, Hypertree};
use sts_embed_core::oracle::OracleOutcome;
use sts_embed_core::seed::{derive, Stage};

use crate::budget::SearchBudget;

/// Oracle cross-checks only run at or below these sizes.
pub const ORACLE_MAX_N: u32 = 21;
pub const ORACLE_MAX_M: u32 = 31;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub n: u32,
    pub d: usize,
    pub mu: f64,
    pub epsilon: f64,
    pub k: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialSpec {
    pub trial: u64,
    #[serde(flatten)]
    pub cell: Cell,
    pub seed: u64,
    pub retry_budget: u32,
    /// Host order; `None` picks the smallest admissible `m ≥ (1+μ)n`.
    pub m: Option<u32>,
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Success,
    Failure,
    Rejected,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialOutcome {
    #[serde(flatten)]
    pub spec: TrialSpec,
    pub tree_n: u32,
    pub m: u32,
    pub status: Status,
    pub retries: Option<u32>,
    /// Independent re-check of a returned certificate.
    pub certified: Option<bool>,
    /// Isolated vertices map into `R`, subtree vertices outside it.
    pub partition_contract: Option<bool>,
    /// Placed copies per class cover the class size.
    pub supply_ok: Option<bool>,
    pub failure: Option<String>,
    pub oracle: Option<&'static str>,
}

/// Tree of a trial: a random graph tree on `(n+1)/2` vertices, subdivided.
pub fn trial_tree(spec: &TrialSpec) -> Hypertree {
    let order = spec.cell.n.div_ceil(2).max(1);
    if order == 1 {
        return Hypertree::single_vertex();
    }
    let g = random_bounded_tree(order, spec.cell.d, derive(spec.seed, Stage::Tree, 0))
        .expect("orders and degrees are checked by the caller");
    subdivide(&g)
}

pub fn host_order(n: u32, mu: f64) -> u32 {
    next_admissible_order(((1.0 + mu) * n as f64).ceil() as u32)
}

fn supply_ok(stats: &StageStats) -> bool {
    stats.supply.iter().all(|&(members, placed)| placed >= members)
}

fn partition_contract(rep: &EmbedReport) -> bool {
    rep.embedding
        .vertex_map
        .iter()
        .enumerate()
        .all(|(v, x)| rep.reservoir.binary_search(x).is_ok() == rep.isolated.binary_search(&(v as u32)).is_ok())
}

pub fn run_trial(spec: &TrialSpec) -> TrialOutcome {
    let t = trial_tree(spec);
    let m = spec.m.unwrap_or_else(|| host_order(t.n(), spec.cell.mu));
    let sts = SteinerTripleSystem::construct(m).expect("host order is admissible");
    let cfg = PipelineConfig {
        d: spec.cell.d,
        mu: spec.cell.mu,
        epsilon: spec.cell.epsilon,
        k: spec.cell.k,
        seed: spec.seed,
        retry_budget: spec.retry_budget,
        strict_hierarchy: false,
    };
    let mut out = TrialOutcome {
        spec: *spec,
        tree_n: t.n(),
        m,
        status: Status::Failure,
        retries: None,
        certified: None,
        partition_contract: None,
        supply_ok: None,
        failure: None,
        oracle: None,
    };
    match embed(&t, &sts, &cfg) {
        Ok(rep) => {
            out.status = Status::Success;
            out.retries = Some(rep.retries);
            out.certified = Some(rep.embedding.certify(&t, &sts).is_ok());
            out.partition_contract = Some(partition_contract(&rep));
            out.supply_ok = Some(supply_ok(&rep.stats));
        }
        Err(EmbedError::Exhausted { stats, attempts }) => {
            out.retries = Some(spec.retry_budget);
            out.supply_ok = Some(supply_ok(&stats));
            out.failure = attempts
                .last()
                .and_then(|a| a.detail.clone());
        }
        Err(e) => {
            out.status = Status::Rejected;
            out.failure = Some(e.to_string());
        }
    }
    if spec.oracle && t.n() <= ORACLE_MAX_N && m <= ORACLE_MAX_M {
        out.oracle = Some(match SearchBudget::default().run(&t, &sts) {
            OracleOutcome::Found { .. } => "found",
            OracleOutcome::None { .. } => "none",
            OracleOutcome::BudgetExceeded { .. } => "budget_exceeded",
        });
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    #[serde(flatten)]
    pub cell: Cell,
    pub trials: usize,
    pub successes: usize,
    pub rejected: usize,
    pub success_rate: f64,
}

/// Success rates per cell, cells in first-seen order.
pub fn summarize(outcomes: &[TrialOutcome]) -> Vec<CellSummary> {
    let mut order: Vec<Cell> = Vec::new();
    let mut counts: BTreeMap<usize, (usize, usize, usize)> = BTreeMap::new();
    for o in outcomes {
        let i = match order.iter().position(|c| *c == o.spec.cell) {
            Some(i) => i,
            None => {
                order.push(o.spec.cell);
                order.len() - 1
            }
        };
        let e = counts.entry(i).or_default();
        e.0 += 1;
        e.1 += usize::from(o.status == Status::Success);
        e.2 += usize::from(o.status == Status::Rejected);
    }
    order
        .into_iter()
        .enumerate()
        .map(|(i, cell)| {
            let (trials, successes, rejected) = counts[&i];
            CellSummary {
                cell,
                trials,
                successes,
                rejected,
                success_rate: successes as f64 / trials as f64,
            }
        })
        .collect()
}

/// Trial specs for every cell, `trials` each, seeds split from `seed`.
pub fn plan(cells: &[Cell], trials: u64, seed: u64, retry_budget: u32, oracle: bool) -> Vec<TrialSpec> {
    let mut specs = Vec::new();
    for cell in cells {
        for _ in 0..trials {
            let trial = specs.len() as u64;
            specs.push(TrialSpec {
                trial,
                cell: *cell,
                seed: derive(seed, Stage::Trial, trial),
                retry_budget,
                m: None,
                oracle,
            });
        }
    }
    specs
}
