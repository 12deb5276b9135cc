//! File formats: edge lists, CSV tables with `# ` comment headers, and
//! JSON documents.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use k4free_core::{Pair, ParamSet};
use serde::Serialize;

use crate::error::{LabError, Result};

/// Edge list: a header line `n m seed`, then one `u v` line per edge with
/// 1-based vertices, in insertion order.
pub fn write_edge_list(
    out: &mut impl Write,
    n: usize,
    seed: u64,
    edges: &[Pair],
) -> io::Result<()> {
    writeln!(out, "{n} {} {seed}", edges.len())?;
    for e in edges {
        writeln!(out, "{} {}", e.u + 1, e.v + 1)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeList {
    pub n: usize,
    pub seed: u64,
    pub edges: Vec<Pair>,
}

pub fn parse_edge_list(origin: &str, text: &str) -> Result<EdgeList> {
    let err = |line: usize, message: String| LabError::Parse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines
        .next()
        .ok_or_else(|| err(1, "missing header line".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [n, m, seed] = fields[..] else {
        return Err(err(
            hl,
            format!("header must be `n m seed`, got {header:?}"),
        ));
    };
    let n: usize = n
        .parse()
        .map_err(|_| err(hl, format!("bad vertex count {n:?}")))?;
    let m: usize = m
        .parse()
        .map_err(|_| err(hl, format!("bad edge count {m:?}")))?;
    let seed: u64 = seed
        .parse()
        .map_err(|_| err(hl, format!("bad seed {seed:?}")))?;
    let mut edges = Vec::with_capacity(m);
    for (ln, line) in lines {
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(err(ln, format!("expected `u v`, got {line:?}")));
        };
        let parse = |s: &str| -> Result<u32> {
            match s.parse::<u32>() {
                Ok(x) if x >= 1 && (x as usize) <= n => Ok(x - 1),
                _ => Err(err(ln, format!("vertex {s:?} not in 1..={n}"))),
            }
        };
        let (a, b) = (parse(a)?, parse(b)?);
        let e =
            Pair::try_new(a, b).map_err(|_| err(ln, format!("self-loop at vertex {}", a + 1)))?;
        edges.push(e);
    }
    if edges.len() != m {
        return Err(err(
            hl,
            format!("header announces {m} edges but {} follow", edges.len()),
        ));
    }
    Ok(EdgeList { n, seed, edges })
}

/// `# params {...}` comment line carrying the full parameter set.
pub fn params_comment(params: &ParamSet) -> Result<String> {
    Ok(format!("params {}", serde_json::to_string(params)?))
}

/// CSV table preceded by `# `-prefixed comment lines.
pub fn csv_table<T: Serialize>(comments: &[String], rows: &[T]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for c in comments {
        for line in c.lines() {
            out.extend_from_slice(b"# ");
            out.extend_from_slice(line.as_bytes());
            out.push(b'\n');
        }
    }
    let mut w = csv::Writer::from_writer(&mut out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    drop(w);
    Ok(out)
}

pub fn json_document<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes `bytes` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|source| LabError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|source| LabError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| LabError::Io {
        path: path.to_path_buf(),
        source,
    })
}
