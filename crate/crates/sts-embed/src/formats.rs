//! Plain-text file formats.
//!
//! * STS v1: line 1 is `m`, then one triple per line.
//! * HT v1: line 1 is `n`, then one hyperedge per line.
//! * GT v1: line 1 is the order, then one edge `x y` per line.
//!
//! Blank lines and lines starting with `#` are ignored. Values are separated
//! by whitespace.

use std::fmt::Write as _;
use std::path::Path;

use sts_embed_core::design::{DesignError, SteinerTripleSystem, Triple, TripleSystem};
use sts_embed_core::hypertree::{GraphTree, GraphTreeError, Hypertree, HypertreeViolation};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing header line")]
    MissingHeader,
    #[error("line {line}: {source}")]
    Design { line: usize, source: DesignError },
    #[error("{0}")]
    Hypertree(HypertreeViolation),
    #[error("{0}")]
    GraphTree(GraphTreeError),
}

/// Data lines as `(line number, fields)`.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#')).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn parse_fields<const N: usize>(line: usize, fields: &[&str]) -> Result<[u32; N], FormatError> {
    if fields.len() != N {
        return Err(FormatError::Syntax {
            line,
            message: format!("expected {N} integers, found {}", fields.len()),
        });
    }
    let mut out = [0u32; N];
    for (o, f) in out.iter_mut().zip(fields) {
        *o = f.parse().map_err(|_| FormatError::Syntax {
            line,
            message: format!("`{f}` is not a non-negative integer"),
        })?;
    }
    Ok(out)
}

/// Header value plus the records with their line numbers.
fn parse_records<const N: usize>(text: &str) -> Result<(u32, Vec<(usize, [u32; N])>), FormatError> {
    let mut lines = data_lines(text);
    let (hl, header) = lines.next().ok_or(FormatError::MissingHeader)?;
    let [size] = parse_fields::<1>(hl, &header)?;
    let records = lines
        .map(|(l, f)| parse_fields::<N>(l, &f).map(|r| (l, r)))
        .collect::<Result<_, _>>()?;
    Ok((size, records))
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A host read from an STS v1 file.
#[derive(Debug, Clone)]
pub enum Host {
    Steiner(SteinerTripleSystem),
    /// Accepted only with `allow_partial`: pairs covered at most once.
    Partial(TripleSystem),
}

impl Host {
    pub fn system(&self) -> &TripleSystem {
        match self {
            Host::Steiner(s) => s.as_system(),
            Host::Partial(p) => p,
        }
    }
}

/// Maps a validation failure onto the line of the offending triple where one
/// can be identified.
fn design_error(records: &[(usize, [u32; 3])], source: DesignError) -> FormatError {
    let line = match &source {
        DesignError::Malformed { index, .. } => records.get(*index).map_or(1, |r| r.0),
        DesignError::DoublyCovered(x, y) => records
            .iter()
            .filter(|(_, t)| t.contains(x) && t.contains(y))
            .nth(1)
            .map_or(1, |r| r.0),
        _ => 1,
    };
    FormatError::Design { line, source }
}

pub fn parse_sts(text: &str, allow_partial: bool) -> Result<Host, FormatError> {
    let (m, records) = parse_records::<3>(text)?;
    let triples: Vec<Triple> = records.iter().map(|r| r.1).collect();
    match SteinerTripleSystem::from_triples(m, &triples) {
        Ok(s) => Ok(Host::Steiner(s)),
        Err(DesignError::Uncovered { .. }) if allow_partial => TripleSystem::new(m, &triples)
            .map(Host::Partial)
            .map_err(|e| design_error(&records, e)),
        Err(e) => Err(design_error(&records, e)),
    }
}

pub fn write_sts(s: &TripleSystem) -> String {
    let mut out = format!("{}\n", s.order());
    for t in s.triples() {
        let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
    }
    out
}

pub fn parse_ht(text: &str) -> Result<Hypertree, FormatError> {
    let (n, records) = parse_records::<3>(text)?;
    Hypertree::new(n, records.into_iter().map(|r| r.1).collect()).map_err(FormatError::Hypertree)
}

pub fn write_ht(t: &Hypertree) -> String {
    let mut out = format!("{}\n", t.n());
    for e in t.edges() {
        let _ = writeln!(out, "{} {} {}", e[0], e[1], e[2]);
    }
    out
}

pub fn parse_gt(text: &str) -> Result<GraphTree, FormatError> {
    let (order, records) = parse_records::<2>(text)?;
    GraphTree::new(order, records.into_iter().map(|(_, [x, y])| (x, y)).collect())
        .map_err(FormatError::GraphTree)
}

pub fn write_gt(g: &GraphTree) -> String {
    let mut out = format!("{}\n", g.order());
    for &(x, y) in g.edges() {
        let _ = writeln!(out, "{x} {y}");
    }
    out
}
