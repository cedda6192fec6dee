//! Command line front end. Every subcommand writes JSON to stdout;
//! diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 domain failure (no embedding, failed checks),
//! 2 usage or input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sts_embed_core::decompose::{check_decomposition, saw};
use sts_embed_core::design::SteinerTripleSystem;
use sts_embed_core::embed::{canonical_key, embed, EmbedError, PipelineConfig};
use sts_embed_core::hypertree::{annotate, random_bounded_tree, subdivide};
use sts_embed_core::oracle::{exhaustive_isomorphic, OracleOutcome};
use sts_embed_core::reservoir::{audit_reservoir, draw_reservoir};
use sts_embed_core::seed::{derive, Stage};
use sts_embed_core::stars::{find_disjoint_stars, guaranteed_count, Want};

use crate::budget::SearchBudget;
use crate::experiment::{plan, run_trial, summarize, Cell};
use crate::formats::{self, FormatError, Host};
use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "sts-embed", version, about = "Embed subdivision hypertrees into Steiner triple systems")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct a Steiner triple system (Bose or Skolem).
    GenSts {
        #[arg(long)]
        m: u32,
        /// Write the STS v1 file here instead of listing triples in the JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random bounded-degree graph tree and subdivide it.
    GenTree {
        /// Order of the graph tree; the hypertree has 2·order − 1 vertices.
        #[arg(long)]
        order: u32,
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// HT v1 output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// GT v1 output of the graph tree before subdivision.
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
    /// Saw a subdivision tree into stars, subtrees, and isolated vertices.
    Decompose {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value_t = 20)]
        k: u32,
        /// Degree bound for the property check; defaults to the tree's maximum degree.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        root: Option<u32>,
    },
    /// Greedy pairwise-disjoint stars through an anchor tuple.
    Stars {
        #[command(flatten)]
        host: HostArgs,
        /// Comma-separated anchor vertices.
        #[arg(long, value_delimiter = ',', required = true)]
        anchors: Vec<u32>,
        /// A number, or `all`.
        #[arg(long, default_value = "all")]
        want: String,
    },
    /// Draw a reservoir and audit it.
    Reservoir {
        #[command(flatten)]
        host: HostArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random anchor tuples for the star coverage audit.
        #[arg(long, default_value_t = 50)]
        tuples: usize,
        /// Largest anchor tuple size.
        #[arg(long, default_value_t = 4)]
        d: usize,
    },
    /// Run the embedding pipeline.
    Embed {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        sts: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Brute-force ground truth.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Seeded trials over a grid of cells, as JSON lines.
    Experiment {
        /// Tree orders: `49,99,199` or `lo..hi` stepped by `--n-step`.
        #[arg(long, default_value = "49,99,199,399")]
        n_range: String,
        #[arg(long, default_value_t = 50)]
        n_step: u32,
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        mu: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.4")]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "20")]
        k: Vec<u32>,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        retry_budget: u32,
        /// Cross-check small instances with the brute-force oracle.
        #[arg(long)]
        oracle: bool,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Exhaustive search for a copy of the tree in the host.
    Embed {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        sts: PathBuf,
        /// Accept hosts in which some pairs are uncovered.
        #[arg(long)]
        allow_partial: bool,
        #[arg(long, default_value_t = 50_000_000)]
        node_limit: u64,
        /// Seconds.
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
    },
    /// Isomorphism by bijection enumeration (at most 9 vertices).
    Iso {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

#[derive(Debug, Args)]
struct HostArgs {
    /// STS v1 file.
    #[arg(long, conflicts_with = "m")]
    sts: Option<PathBuf>,
    /// Construct the host of this order instead of reading one.
    #[arg(long)]
    m: Option<u32>,
}

#[derive(Debug, Args, Serialize)]
struct PipelineArgs {
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    #[arg(long, default_value_t = 0.4)]
    eps: f64,
    #[arg(long, default_value_t = 20)]
    k: u32,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    retry_budget: u32,
    #[arg(long)]
    strict_hierarchy: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Input(#[from] FormatError),
}

struct Output {
    body: Value,
    exit: i32,
}

impl Output {
    fn ok(body: Value) -> Self {
        Self { body, exit: 0 }
    }

    fn domain(body: Value, success: bool) -> Self {
        Self {
            body,
            exit: if success { 0 } else { 1 },
        }
    }
}

fn load(path: &Path, manifest: &mut RunManifest) -> Result<String, CliError> {
    let text = formats::read_file(path)?;
    manifest.input(path, &text);
    Ok(text)
}

fn load_steiner(path: &Path, manifest: &mut RunManifest) -> Result<SteinerTripleSystem, CliError> {
    match formats::parse_sts(&load(path, manifest)?, false)? {
        Host::Steiner(s) => Ok(s),
        Host::Partial(_) => unreachable!("partial hosts are only returned on request"),
    }
}

fn host(args: &HostArgs, manifest: &mut RunManifest) -> Result<SteinerTripleSystem, CliError> {
    match (&args.sts, args.m) {
        (Some(p), _) => load_steiner(p, manifest),
        (None, Some(m)) => SteinerTripleSystem::construct(m).map_err(|e| CliError::Usage(e.to_string())),
        (None, None) => Err(CliError::Usage("one of --sts or --m is required".into())),
    }
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn write_out(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| {
        CliError::Input(FormatError::Io {
            path: path.display().to_string(),
            source,
        })
    })
}

fn gen_sts(m: u32, out: Option<&Path>) -> Result<Output, CliError> {
    let manifest = RunManifest::new("gen-sts", json!({ "m": m }));
    let s = SteinerTripleSystem::construct(m).map_err(|_| CliError::Usage("m ≡ 1 or 3 mod 6 required".into()))?;
    let construction = match m % 6 {
        _ if m == 1 => "trivial",
        3 => "bose",
        _ => "skolem",
    };
    let mut body = json!({
        "status": "ok",
        "manifest": manifest,
        "m": m,
        "construction": construction,
        "triple_count": s.triples().len(),
    });
    match out {
        Some(p) => {
            write_out(p, &formats::write_sts(&s))?;
            body["out"] = json!(p.display().to_string());
        }
        None => body["triples"] = to_value(s.triples()),
    }
    Ok(Output::ok(body))
}

fn gen_tree(order: u32, d: usize, seed: u64, out: Option<&Path>, graph_out: Option<&Path>) -> Result<Output, CliError> {
    let tree_seed = derive(seed, Stage::Tree, 0);
    let manifest = RunManifest::new("gen-tree", json!({ "order": order, "d": d }))
        .seed("seed", seed)
        .seed("tree", tree_seed);
    let g = random_bounded_tree(order, d, tree_seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let t = subdivide(&g);
    let mut body = json!({
        "status": "ok",
        "manifest": manifest,
        "order": order,
        "n": t.n(),
        "max_degree": t.max_degree(),
    });
    if let Some(p) = graph_out {
        write_out(p, &formats::write_gt(&g))?;
        body["graph_out"] = json!(p.display().to_string());
    }
    match out {
        Some(p) => {
            write_out(p, &formats::write_ht(&t))?;
            body["out"] = json!(p.display().to_string());
        }
        None => body["edges"] = to_value(t.edges()),
    }
    Ok(Output::ok(body))
}

fn decompose(tree: &Path, k: u32, d: Option<usize>, root: Option<u32>) -> Result<Output, CliError> {
    let mut manifest = RunManifest::new("decompose", json!({ "k": k, "d": d, "root": root }));
    let t = formats::parse_ht(&load(tree, &mut manifest)?)?;
    let d = d.unwrap_or_else(|| t.max_degree());
    let ann = match annotate(&t, root) {
        Ok(a) => a,
        Err(e) => {
            return Ok(Output::domain(
                json!({ "status": "failure", "manifest": manifest, "error": e.to_string() }),
                false,
            ))
        }
    };
    let dec = match saw(&t, &ann, k) {
        Ok(dec) => dec,
        Err(e) => {
            return Ok(Output::domain(
                json!({ "status": "failure", "manifest": manifest, "error": e.to_string() }),
                false,
            ))
        }
    };
    let check = check_decomposition(&t, &dec, k, d);
    let violated: Vec<u8> = check.as_ref().err().map_or(Vec::new(), |v| v.iter().map(|p| p.number()).collect());
    Ok(Output::domain(
        json!({
            "status": if check.is_ok() { "ok" } else { "failure" },
            "manifest": manifest,
            "n": t.n(),
            "k": k,
            "d": d,
            "root": ann.root,
            "e": dec.e(),
            "l": dec.l(),
            "properties_hold": check.is_ok(),
            "violated": violated,
            "decomposition": dec,
        }),
        check.is_ok(),
    ))
}

fn stars(args: &HostArgs, anchors: &[u32], want: &str) -> Result<Output, CliError> {
    let mut manifest = RunManifest::new("stars", json!({ "m": args.m, "anchors": anchors, "want": want }));
    let s = host(args, &mut manifest)?;
    let want = match want {
        "all" => Want::All,
        w => Want::Count(w.parse().map_err(|_| CliError::Usage(format!("--want: `{w}` is neither a number nor `all`")))?),
    };
    let fam = find_disjoint_stars(&s, anchors, want, anchors.len()).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Output::ok(json!({
        "status": "ok",
        "manifest": manifest,
        "m": s.m(),
        "c": anchors.len(),
        "count": fam.len(),
        "guaranteed": guaranteed_count(s.m(), anchors.len()),
        "family": fam,
    })))
}

fn reservoir(args: &HostArgs, eps: f64, seed: u64, tuples: usize, d: usize) -> Result<Output, CliError> {
    let audit_seed = derive(seed, Stage::Audit, 0);
    let mut manifest = RunManifest::new("reservoir", json!({ "m": args.m, "eps": eps, "tuples": tuples, "d": d }))
        .seed("reservoir", seed)
        .seed("audit", audit_seed);
    let s = host(args, &mut manifest)?;
    let res = draw_reservoir(&s, eps, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let report = audit_reservoir(&s, &res, tuples, 1..=d.max(1), audit_seed);
    Ok(Output::ok(json!({
        "status": "ok",
        "manifest": manifest,
        "concentrated": report.concentrated(),
        "audit": report,
    })))
}

fn embed_cmd(tree: &Path, sts: &Path, p: &PipelineArgs) -> Result<Output, CliError> {
    let mut manifest = RunManifest::new("embed", p).seed("seed", p.seed);
    let t = formats::parse_ht(&load(tree, &mut manifest)?)?;
    let s = load_steiner(sts, &mut manifest)?;
    let cfg = PipelineConfig {
        d: p.d,
        mu: p.mu,
        epsilon: p.eps,
        k: p.k,
        seed: p.seed,
        retry_budget: p.retry_budget,
        strict_hierarchy: p.strict_hierarchy,
    };
    Ok(match embed(&t, &s, &cfg) {
        Ok(rep) => Output::ok(json!({
            "status": "success",
            "manifest": manifest,
            "vertex_map": rep.embedding.vertex_map,
            "certificate": rep.embedding.certificate,
            "certified": rep.embedding.certify(&t, &s).is_ok(),
            "reservoir": rep.reservoir,
            "isolated": rep.isolated,
            "stage_stats": rep.stats,
            "retries": rep.retries,
            "attempts": rep.attempts,
        })),
        Err(EmbedError::Exhausted { stats, attempts }) => Output::domain(
            json!({
                "status": "failure",
                "manifest": manifest,
                "stage_stats": stats,
                "retries": p.retry_budget,
                "attempts": attempts,
            }),
            false,
        ),
        Err(e) => Output::domain(
            json!({
                "status": "rejected",
                "manifest": manifest,
                "error": e.to_string(),
                "detail": e,
            }),
            false,
        ),
    })
}

fn oracle(cmd: &OracleCommand) -> Result<Output, CliError> {
    match cmd {
        OracleCommand::Embed {
            tree,
            sts,
            allow_partial,
            node_limit,
            time_limit,
        } => {
            let mut manifest = RunManifest::new(
                "oracle embed",
                json!({ "allow_partial": allow_partial, "node_limit": node_limit, "time_limit": time_limit }),
            );
            let t = formats::parse_ht(&load(tree, &mut manifest)?)?;
            let host = formats::parse_sts(&load(sts, &mut manifest)?, *allow_partial)?;
            if !(time_limit.is_finite() && *time_limit > 0.0) {
                return Err(CliError::Usage("--time-limit must be positive".into()));
            }
            let budget = SearchBudget::new(*node_limit, Duration::from_secs_f64(*time_limit))
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let outcome = budget.run(&t, host.system());
            let found = matches!(outcome, OracleOutcome::Found { .. });
            let mut body = to_value(&outcome);
            body["manifest"] = to_value(&manifest);
            body["budget"] = to_value(budget);
            Ok(Output::domain(body, found))
        }
        OracleCommand::Iso { a, b } => {
            let mut manifest = RunManifest::new("oracle iso", json!({}));
            let ta = formats::parse_ht(&load(a, &mut manifest)?)?;
            let tb = formats::parse_ht(&load(b, &mut manifest)?)?;
            let iso = exhaustive_isomorphic(&ta, &tb).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(Output::ok(json!({
                "status": "ok",
                "manifest": manifest,
                "isomorphic": iso,
                "canonical_keys_equal": canonical_key(&ta) == canonical_key(&tb),
            })))
        }
    }
}

fn parse_orders(spec: &str, step: u32) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Usage(format!("--n-range: cannot read `{spec}`"));
    let orders: Vec<u32> = if let Some((lo, hi)) = spec.split_once("..") {
        let (lo, hi): (u32, u32) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
        if step == 0 || lo > hi {
            return Err(bad());
        }
        (lo..=hi).step_by(step as usize).collect()
    } else {
        spec.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if orders.iter().any(|&n| n % 2 == 0 || n == 0) {
        return Err(CliError::Usage("--n-range: hypertree orders are odd".into()));
    }
    Ok(orders)
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    out: &mut dyn Write,
    n_range: &str,
    n_step: u32,
    d: usize,
    mu: &[f64],
    eps: &[f64],
    k: &[u32],
    trials: u64,
    seed: u64,
    retry_budget: u32,
    oracle: bool,
    threads: usize,
) -> Result<i32, CliError> {
    let orders = parse_orders(n_range, n_step)?;
    if d < 2 {
        return Err(CliError::Usage("--d must be at least 2".into()));
    }
    let mut cells = Vec::new();
    for &n in &orders {
        for &mu in mu {
            for &epsilon in eps {
                for &k in k {
                    cells.push(Cell { n, d, mu, epsilon, k });
                }
            }
        }
    }
    let manifest = RunManifest::new(
        "experiment",
        json!({ "n": orders, "d": d, "mu": mu, "eps": eps, "k": k, "trials": trials,
                "retry_budget": retry_budget, "oracle": oracle }),
    )
    .seed("seed", seed);
    let specs = plan(&cells, trials, seed, retry_budget, oracle);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let emit = |out: &mut dyn Write, v: Value| {
        let _ = writeln!(out, "{v}");
        let _ = out.flush();
    };
    emit(out, json!({ "manifest": manifest }));
    let chunk = 4 * pool.current_num_threads().max(1);
    let mut outcomes = Vec::with_capacity(specs.len());
    for batch in specs.chunks(chunk) {
        let done: Vec<_> = pool.install(|| batch.par_iter().map(run_trial).collect());
        for o in &done {
            emit(out, to_value(o));
        }
        outcomes.extend(done);
    }
    emit(out, json!({ "summary": summarize(&outcomes) }));
    let unsound = outcomes
        .iter()
        .any(|o| o.certified == Some(false) || o.partition_contract == Some(false) || o.supply_ok == Some(false));
    Ok(if unsound { 1 } else { 0 })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let output = match &cli.command {
        Command::GenSts { m, out } => gen_sts(*m, out.as_deref())?,
        Command::GenTree {
            order,
            d,
            seed,
            out,
            graph_out,
        } => gen_tree(*order, *d, *seed, out.as_deref(), graph_out.as_deref())?,
        Command::Decompose { tree, k, d, root } => decompose(tree, *k, *d, *root)?,
        Command::Stars { host, anchors, want } => stars(host, anchors, want)?,
        Command::Reservoir {
            host,
            eps,
            seed,
            tuples,
            d,
        } => reservoir(host, *eps, *seed, *tuples, *d)?,
        Command::Embed { tree, sts, pipeline } => embed_cmd(tree, sts, pipeline)?,
        Command::Oracle { command } => oracle(command)?,
        Command::Experiment {
            n_range,
            n_step,
            d,
            mu,
            eps,
            k,
            trials,
            seed,
            retry_budget,
            oracle,
            threads,
        } => {
            return experiment(
                out, n_range, *n_step, *d, mu, eps, k, *trials, *seed, *retry_budget, *oracle, *threads,
            )
        }
    };
    let _ = writeln!(out, "{}", output.body);
    Ok(output.exit)
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{e}");
            let _ = writeln!(out, "{}", json!({ "status": "error", "error": e.kind().to_string() }));
            return 2;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            let _ = writeln!(out, "{}", json!({ "status": "error", "error": e.to_string() }));
            2
        }
    }
}
