//! Text formats for strings, graphs and contraction schedules.
//!
//! * String files: `#` comment lines are skipped, every other non-blank line
//!   is one string of whitespace-separated token names.
//! * Graph files: `#` comments, a header `n m`, then `m` lines `u v`.
//! * Schedule files: one `start half_len` pair per line, applied in order.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::ces::{Graph, GraphError};
use crate::strings::{ContractionStep, SymbolTable, TokenString};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("no strings found")]
    EmptyFile,
    #[error("bad header: {0:?}")]
    BadHeader(String),
    #[error("line {line}: {message}")]
    BadLine { line: usize, message: String },
    #[error("expected {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
}

impl From<GraphError> for ParseError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::SelfLoop(v) => ParseError::SelfLoop(v),
            GraphError::DuplicateEdge(u, v) => ParseError::DuplicateEdge(u, v),
            GraphError::InvalidVertex { vertex, n } => ParseError::InvalidVertex { vertex, n },
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, ParseError> {
    fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Numbered content lines, skipping blanks and `#` comments.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses a string file, interning into `table` so several files can share
/// one alphabet.
pub fn parse_strings(text: &str, table: &mut SymbolTable) -> Result<Vec<TokenString>, ParseError> {
    let strings: Vec<_> = content_lines(text).map(|(_, l)| table.parse(l)).collect();
    if strings.is_empty() {
        return Err(ParseError::EmptyFile);
    }
    Ok(strings)
}

pub fn parse_string_file(
    path: &Path,
    table: &mut SymbolTable,
) -> Result<Vec<TokenString>, ParseError> {
    parse_strings(&read_file(path)?, table)
}

pub fn emit_strings(strings: &[TokenString], table: &SymbolTable) -> String {
    strings
        .iter()
        .map(|s| table.render(s) + "\n")
        .collect()
}

fn parse_num(line: usize, tok: &str) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| ParseError::BadLine {
        line,
        message: format!("expected a non-negative integer, got {tok:?}"),
    })
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut lines = content_lines(text);
    let (_, header) = lines
        .next()
        .ok_or_else(|| ParseError::BadHeader(String::new()))?;
    let fields: Vec<_> = header.split_whitespace().collect();
    let (n, m) = match fields.as_slice() {
        [n, m] => match (n.parse::<usize>(), m.parse::<usize>()) {
            (Ok(n), Ok(m)) => (n, m),
            _ => return Err(ParseError::BadHeader(header.to_owned())),
        },
        _ => return Err(ParseError::BadHeader(header.to_owned())),
    };
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let fields: Vec<_> = l.split_whitespace().collect();
        let [u, v] = fields.as_slice() else {
            return Err(ParseError::BadLine {
                line,
                message: "expected two vertex ids".to_owned(),
            });
        };
        edges.push((parse_num(line, u)?, parse_num(line, v)?));
    }
    if edges.len() != m {
        return Err(ParseError::EdgeCount {
            expected: m,
            found: edges.len(),
        });
    }
    Ok(Graph::new(n, edges)?)
}

pub fn parse_graph_file(path: &Path) -> Result<Graph, ParseError> {
    parse_graph(&read_file(path)?)
}

pub fn emit_graph(graph: &Graph) -> String {
    let mut out = format!("{} {}\n", graph.n(), graph.m());
    for (u, v) in graph.edges() {
        out += &format!("{u} {v}\n");
    }
    out
}

pub fn parse_schedule(text: &str) -> Result<Vec<ContractionStep>, ParseError> {
    content_lines(text)
        .map(|(line, l)| {
            let fields: Vec<_> = l.split_whitespace().collect();
            let [start, half] = fields.as_slice() else {
                return Err(ParseError::BadLine {
                    line,
                    message: "expected `start half_len`".to_owned(),
                });
            };
            Ok(ContractionStep::new(
                parse_num(line, start)?,
                parse_num(line, half)?,
            ))
        })
        .collect()
}

pub fn emit_schedule(steps: &[ContractionStep]) -> String {
    steps.iter().map(|s| format!("{s}\n")).collect()
}
