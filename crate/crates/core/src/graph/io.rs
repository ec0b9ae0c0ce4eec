//! Plain-text formats.
//!
//! * graph: a header line `n m`, then `m` lines `i j` (1-indexed vertices)
//! * configuration: one integer position per line
//! * length vector: one integer per line, in canonical edge order

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::{Configuration, Graph};
use crate::Int;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("header declares {declared} edges but {found} were listed")]
    EdgeCount { declared: usize, found: usize },
    #[error("empty input")]
    Empty,
    #[error("invalid graph: {0}")]
    Graph(#[from] super::GraphError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_token<T: FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T, ParseError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| syntax(line, format!("invalid {what} `{tok}`")))
}

pub fn format_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for &(a, b) in g.edges() {
        writeln!(out, "{} {}", a + 1, b + 1).unwrap();
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(ParseError::Empty)?;
    let mut toks = header.split_whitespace();
    let n: usize = parse_token(hl, toks.next(), "vertex count")?;
    let m: usize = parse_token(hl, toks.next(), "edge count")?;
    let mut edges = Vec::with_capacity(m);
    for (ln, line) in lines {
        let mut toks = line.split_whitespace();
        let a: usize = parse_token(ln, toks.next(), "endpoint")?;
        let b: usize = parse_token(ln, toks.next(), "endpoint")?;
        if a == 0 || b == 0 {
            return Err(syntax(ln, "vertices are 1-indexed"));
        }
        edges.push((a - 1, b - 1));
    }
    if edges.len() != m {
        return Err(ParseError::EdgeCount { declared: m, found: edges.len() });
    }
    Ok(Graph::new(n, edges)?)
}

pub fn format_integers(values: &[Int]) -> String {
    let mut out = String::new();
    for v in values {
        writeln!(out, "{v}").unwrap();
    }
    out
}

pub fn parse_integers(text: &str) -> Result<Vec<Int>, ParseError> {
    content_lines(text)
        .map(|(ln, line)| line.parse::<Int>().map_err(|_| syntax(ln, format!("invalid integer `{line}`"))))
        .collect()
}

pub fn format_configuration(p: &Configuration<Int>) -> String {
    format_integers(p.positions())
}

pub fn parse_configuration(text: &str) -> Result<Configuration<Int>, ParseError> {
    parse_integers(text).map(Configuration::new)
}
