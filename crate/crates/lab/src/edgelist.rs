//! Plain edge lists: one `u v` pair per line, 1-based labels. Blank lines
//! and lines starting with `#` are ignored.

use std::io::Write;

use anyhow::{bail, Context};
use semirandom_core::graph::{SimpleGraph, Vertex};

/// Parses an edge list. The vertex count is `n` when given, else the
/// largest label.
pub fn parse_edge_list(text: &str, n: Option<usize>) -> anyhow::Result<SimpleGraph> {
    let mut edges = Vec::new();
    let mut top = 0u64;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            bail!("line {}: expected two labels", i + 1);
        };
        let a: u64 = a.parse().with_context(|| format!("line {}", i + 1))?;
        let b: u64 = b.parse().with_context(|| format!("line {}", i + 1))?;
        if a == 0 || b == 0 {
            bail!("line {}: labels are 1-based", i + 1);
        }
        if a == b {
            bail!("line {}: loops are not allowed", i + 1);
        }
        top = top.max(a).max(b);
        edges.push(((a - 1) as Vertex, (b - 1) as Vertex));
    }
    let n = match n {
        Some(n) if (n as u64) < top => bail!("label {top} exceeds vertex count {n}"),
        Some(n) => n,
        None => top as usize,
    };
    Ok(SimpleGraph::from_edges(n, &edges)?)
}

pub fn write_edge_list<W: Write>(mut w: W, g: &SimpleGraph) -> anyhow::Result<()> {
    for (a, b) in g.edge_list() {
        writeln!(w, "{} {}", a + 1, b + 1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use semirandom_core::graph::Adjacency;

    #[test]
    fn parses_one_based_pairs() {
        let g = parse_edge_list("# square\n1 2\n2 3\n\n3 4\n4 1\n", None).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert!(g.has_edge(0, 3));
        let g = parse_edge_list("1 2\n", Some(5)).unwrap();
        assert_eq!(g.vertex_count(), 5);
    }

    #[test]
    fn rejects_bad_lines() {
        for bad in ["0 1", "1", "1 2 3", "1 x", "2 2"] {
            assert!(parse_edge_list(bad, None).is_err(), "{bad}");
        }
        assert!(parse_edge_list("1 7", Some(4)).is_err());
    }
}
