use std::fmt::Write as _;

use super::{Graph, GraphError};

fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, GraphError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

/// Parses the line-oriented graph format.
///
/// ```text
/// n m k
/// u v [w]        (m lines, 0-based node ids)
/// H: e1 e2 ...   (optional, edge indices in the subgraph)
/// ST: s t        (optional)
/// E*: e          (optional)
/// ```
///
/// Blank lines and lines starting with `#` are ignored.
pub fn load_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(parse_err(hline, "header must be 'n m k'"));
    }
    let n: usize = parse_num(toks[0], hline, "node count")?;
    let m: usize = parse_num(toks[1], hline, "edge count")?;
    let k: usize = parse_num(toks[2], hline, "pin count")?;
    if k == 0 {
        return Err(parse_err(hline, "k must be at least 1"));
    }

    let mut g = Graph::new(n, k);
    let mut weights: Vec<u64> = Vec::with_capacity(m);
    let mut weighted: Option<bool> = None;
    for _ in 0..m {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(text.lines().count() + 1, format!("expected {m} edges")))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(parse_err(ln, "edge line must be 'u v [w]'"));
        }
        let u: usize = parse_num(toks[0], ln, "node")?;
        let v: usize = parse_num(toks[1], ln, "node")?;
        let has_w = toks.len() == 3;
        match weighted {
            None => weighted = Some(has_w),
            Some(prev) if prev != has_w => {
                return Err(parse_err(ln, "weights must be given for all edges or none"))
            }
            _ => {}
        }
        if has_w {
            let w: u64 = parse_num(toks[2], ln, "weight")?;
            if w < 1 {
                return Err(parse_err(ln, format!("weight {w} below 1")));
            }
            weights.push(w);
        }
        g.add_edge(u, v).map_err(|e| match e {
            GraphError::SelfLoop(_) => parse_err(ln, "self-loop"),
            GraphError::DuplicateEdge(..) => parse_err(ln, "duplicate edge"),
            GraphError::NodeOutOfRange { node, .. } => {
                parse_err(ln, format!("node {node} out of range"))
            }
            other => parse_err(ln, other.to_string()),
        })?;
    }
    if weighted == Some(true) {
        g.set_weights(weights)?;
    }

    for (ln, l) in lines {
        let (tag, rest) = l
            .split_once(':')
            .ok_or_else(|| parse_err(ln, format!("unexpected line '{l}'")))?;
        let nums = rest
            .split_whitespace()
            .map(|t| parse_num::<usize>(t, ln, "index"))
            .collect::<Result<Vec<_>, _>>()?;
        match tag.trim() {
            "H" => {
                if g.subgraph().is_some() {
                    return Err(parse_err(ln, "repeated H section"));
                }
                if let Some(&e) = nums.iter().find(|&&e| e >= g.m()) {
                    return Err(parse_err(ln, format!("edge index {e} out of range")));
                }
                g.set_subgraph_edges(&nums)?;
            }
            "ST" => {
                if nums.len() != 2 {
                    return Err(parse_err(ln, "ST needs two nodes"));
                }
                g.set_st(nums[0], nums[1])
                    .map_err(|e| parse_err(ln, e.to_string()))?;
            }
            "E*" => {
                if nums.len() != 1 {
                    return Err(parse_err(ln, "E* needs one edge index"));
                }
                g.set_marked_edge(nums[0])
                    .map_err(|e| parse_err(ln, e.to_string()))?;
            }
            other => return Err(parse_err(ln, format!("unknown section '{other}'"))),
        }
    }
    Ok(g)
}

pub fn save_graph(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", g.n(), g.m(), g.k());
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        match g.weight(e) {
            Some(w) => {
                let _ = writeln!(out, "{u} {v} {w}");
            }
            None => {
                let _ = writeln!(out, "{u} {v}");
            }
        }
    }
    if let Some(h) = g.subgraph() {
        out.push_str("H:");
        for (e, _) in h.iter().enumerate().filter(|(_, &b)| b) {
            let _ = write!(out, " {e}");
        }
        out.push('\n');
    }
    if let Some((s, t)) = g.st() {
        let _ = writeln!(out, "ST: {s} {t}");
    }
    if let Some(e) = g.marked_edge() {
        let _ = writeln!(out, "E*: {e}");
    }
    out
}
