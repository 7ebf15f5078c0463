//! Line-oriented walk traces.
//!
//! ```text
//! tpwalk-trace 1
//! star-demand 1
//! initial-supply 1
//! origin 1-1 1-2 2-2 2-3
//! final 1-2 1-3 2-1 2-2
//! 1 insert 1-3 1-2 2 2
//! 2 shade 2-2 - 2 2
//! ```
//!
//! Step lines hold the iteration number, the action, the shaded edge, the
//! leaving edge (`-` when nothing left), `delta'` and the next supply node
//! (`-` on the last step). Blank lines and `#` comments are ignored.

use std::fmt::Write as _;

use tpwalk_core::walk::{Action, StepLog, WalkLog};
use tpwalk_core::Edge;

const MAGIC: &str = "tpwalk-trace";
const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("trace line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

fn edge_token(e: Edge) -> String {
    format!("{}-{}", e.supply, e.demand)
}

pub fn write_log(log: &WalkLog) -> String {
    let mut out = String::new();
    let edges = |es: &[Edge]| es.iter().map(|&e| edge_token(e)).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "star-demand {}", log.star_demand);
    let _ = writeln!(out, "initial-supply {}", log.initial_supply);
    let _ = writeln!(out, "origin {}", edges(&log.origin));
    let _ = writeln!(out, "final {}", edges(&log.final_edges));
    for (k, s) in log.steps.iter().enumerate() {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {}",
            k + 1,
            s.action,
            edge_token(s.edge),
            s.leaving.map_or("-".into(), edge_token),
            s.delta_prime,
            s.next_supply.map_or("-".into(), |x| x.to_string()),
        );
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next meaningful line, split into tokens.
    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (k, raw) in self.inner.by_ref() {
            let text = raw.split('#').next().unwrap_or("").trim();
            if !text.is_empty() {
                self.last = k + 1;
                return Some((k + 1, text.split_whitespace().collect()));
            }
        }
        None
    }

    fn expect(&mut self, key: &str) -> Result<(usize, Vec<&'a str>), TraceParseError> {
        match self.next() {
            Some((line, tokens)) if tokens[0] == key => Ok((line, tokens[1..].to_vec())),
            Some((line, tokens)) => Err(err(line, format!("expected `{key}`, found `{}`", tokens[0]))),
            None => Err(err(self.last + 1, format!("missing `{key}` line"))),
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> TraceParseError {
    TraceParseError { line, message: message.into() }
}

fn number(line: usize, tok: &str) -> Result<usize, TraceParseError> {
    tok.parse().map_err(|_| err(line, format!("`{tok}` is not a non-negative integer")))
}

fn single(line: usize, tokens: &[&str]) -> Result<usize, TraceParseError> {
    match tokens {
        [t] => number(line, t),
        _ => Err(err(line, "expected exactly one value")),
    }
}

fn edge(line: usize, tok: &str) -> Result<Edge, TraceParseError> {
    let (s, d) = tok.split_once('-').ok_or_else(|| err(line, format!("`{tok}` is not an edge like 2-3")))?;
    Ok(Edge::new(number(line, s)?, number(line, d)?))
}

fn optional<T>(tok: &str, parse: impl FnOnce() -> Result<T, TraceParseError>) -> Result<Option<T>, TraceParseError> {
    if tok == "-" {
        Ok(None)
    } else {
        parse().map(Some)
    }
}

pub fn parse_log(text: &str) -> Result<WalkLog, TraceParseError> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (line, header) = lines.expect(MAGIC)?;
    if single(line, &header)? != VERSION as usize {
        return Err(err(line, format!("unsupported trace version `{}`", header[0])));
    }
    let (line, t) = lines.expect("star-demand")?;
    let star_demand = single(line, &t)?;
    let (line, t) = lines.expect("initial-supply")?;
    let initial_supply = single(line, &t)?;
    let (line, t) = lines.expect("origin")?;
    let origin = t.iter().map(|tok| edge(line, tok)).collect::<Result<_, _>>()?;
    let (line, t) = lines.expect("final")?;
    let final_edges = t.iter().map(|tok| edge(line, tok)).collect::<Result<_, _>>()?;

    let mut steps = Vec::new();
    while let Some((line, t)) = lines.next() {
        let [iter, action, e, leaving, delta, next] = t[..] else {
            return Err(err(line, format!("expected 6 fields, found {}", t.len())));
        };
        if number(line, iter)? != steps.len() + 1 {
            return Err(err(line, format!("expected iteration {}", steps.len() + 1)));
        }
        let action = match action {
            "shade" => Action::ShadeOnly,
            "insert" => Action::InsertAndShade,
            other => return Err(err(line, format!("unknown action `{other}`"))),
        };
        steps.push(StepLog {
            action,
            edge: edge(line, e)?,
            leaving: optional(leaving, || edge(line, leaving))?,
            delta_prime: number(line, delta)?,
            next_supply: optional(next, || number(line, next))?,
        });
    }
    Ok(WalkLog { star_demand, initial_supply, origin, final_edges, steps })
}
