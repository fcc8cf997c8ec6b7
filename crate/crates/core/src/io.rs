//! Text graph format and JSON helpers.
//!
//! Graph files are UTF-8: a header `n <count>`, then one `u v w` line per
//! edge where `w` is an integer, a decimal, or `p/q`. Lines starting with `#`
//! and blank lines are ignored.

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::metric::Graph;
use crate::rational::{self, Rational};
use crate::{Error, Result};

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges: Vec<(usize, usize, Rational, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match n {
            None => match fields.as_slice() {
                ["n", count] => {
                    n = Some(
                        count
                            .parse()
                            .map_err(|e| err(format!("bad vertex count {count:?}: {e}")))?,
                    );
                }
                _ => return Err(err("expected header `n <count>`".into())),
            },
            Some(_) => match fields.as_slice() {
                [u, v, w] => {
                    let u = u.parse().map_err(|e| err(format!("bad vertex {u:?}: {e}")))?;
                    let v = v.parse().map_err(|e| err(format!("bad vertex {v:?}: {e}")))?;
                    let w = rational::parse(w).map_err(err)?;
                    edges.push((u, v, w, line_no));
                }
                _ => return Err(err(format!("expected `u v w`, got {} fields", fields.len()))),
            },
        }
    }
    let n = n.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        msg: "missing header `n <count>`".into(),
    })?;
    let mut seen = std::collections::BTreeSet::new();
    for &(u, v, w, line) in &edges {
        let single = Graph::new(n, [(u, v, w)]).err();
        let dup = (!seen.insert((u.min(v), u.max(v)))).then(|| Error::DuplicateEdge(u.min(v), u.max(v)));
        if let Some(e) = single.or(dup) {
            return Err(Error::Parse {
                line,
                msg: e.to_string(),
            });
        }
    }
    Graph::new(n, edges.into_iter().map(|(u, v, w, _)| (u, v, w)))
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.n());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, rational::format(&e.w));
    }
    out
}

pub fn read_graph_file(path: &std::path::Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("{}: {e}", path.display()),
    })?;
    parse_graph(&text)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable value")
}
