use std::io::{BufRead, Write};

use super::{SparseWeights, WeightedGraph};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Writes the plain-text graph format.
///
/// ```text
/// n m alpha normalized
/// i j w        (m lines, i < j)
/// d i value    (n lines)
/// ```
pub fn write_graph<T: Scalar, W: Write>(graph: &WeightedGraph<T>, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{} {} {} {}", graph.n_vertices(), graph.n_edges(), graph.alpha(), graph.is_normalized())?;
    for (i, j, w) in graph.weights().edges() {
        writeln!(out, "{i} {j} {w}")?;
    }
    for (i, d) in graph.degrees().iter().enumerate() {
        writeln!(out, "d {i} {d}")?;
    }
    out.flush()
}

/// Reads the format produced by [`write_graph`].
pub fn read_graph<T: Scalar, R: BufRead>(input: R) -> Result<WeightedGraph<T>> {
    let mut lines = input.lines().enumerate().filter_map(|(k, l)| match l {
        Ok(s) if s.trim().is_empty() => None,
        other => Some((k + 1, other)),
    });
    let bad = |line: usize, message: String| Error::Parse { line, message };
    let io_err = |e: std::io::Error| Error::io("<graph>", e);

    let (line, header) = lines.next().ok_or_else(|| bad(1, "missing header".into()))?;
    let header = header.map_err(io_err)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(bad(line, format!("header needs 4 fields `n m alpha normalized`, got {}", fields.len())));
    }
    let n: usize = parse(fields[0], line, "n")?;
    let m: usize = parse(fields[1], line, "m")?;
    let alpha: T = parse(fields[2], line, "alpha")?;
    let normalized: bool = parse(fields[3], line, "normalized")?;

    let mut edges = Vec::with_capacity(m);
    let mut degrees: Vec<Option<T>> = vec![None; n];
    for (line, text) in lines {
        let text = text.map_err(io_err)?;
        let f: Vec<&str> = text.split_whitespace().collect();
        match f.as_slice() {
            ["d", i, v] => {
                let i: usize = parse(i, line, "vertex")?;
                if i >= n {
                    return Err(bad(line, format!("degree for vertex {i} but n = {n}")));
                }
                degrees[i] = Some(parse(v, line, "degree")?);
            }
            [i, j, w] => {
                let i: usize = parse(i, line, "i")?;
                let j: usize = parse(j, line, "j")?;
                if i >= j {
                    return Err(bad(line, format!("edge ({i}, {j}) must have i < j")));
                }
                if j >= n {
                    return Err(bad(line, format!("edge ({i}, {j}) out of range for n = {n}")));
                }
                edges.push((i, j, parse::<T>(w, line, "weight")?));
            }
            _ => return Err(bad(line, format!("expected `i j w` or `d i value`, got `{text}`"))),
        }
    }
    if edges.len() != m {
        return Err(bad(0, format!("header declares {m} edges, found {}", edges.len())));
    }
    let degrees = degrees
        .into_iter()
        .enumerate()
        .map(|(i, d)| d.ok_or_else(|| bad(0, format!("missing degree for vertex {i}"))))
        .collect::<Result<Vec<T>>>()?;
    let weights = SparseWeights::from_edges(n, edges)?;
    let mut g = WeightedGraph::new(weights, degrees, alpha)?;
    g.set_normalized(normalized);
    Ok(g)
}

fn parse<V: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<V> {
    s.parse().map_err(|_| Error::Parse { line, message: format!("cannot parse {what} from `{s}`") })
}
