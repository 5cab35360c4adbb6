//! Line-delimited run traces: one JSON object per round with 1-based
//! vertex labels, `{"t":1,"u":4,"v":2,"color":"blue","discarded":false}`.

use std::io::{BufRead, Write};

use anyhow::{bail, Context};
use semirandom_core::graph::{EdgeColor, EdgeRecord, ProcessState};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: u64,
    /// The random vertex `u_t`.
    pub u: u64,
    /// The player's vertex `v_t`.
    pub v: u64,
    pub color: EdgeColor,
    pub discarded: bool,
}

impl From<&EdgeRecord> for TraceRecord {
    fn from(e: &EdgeRecord) -> Self {
        TraceRecord {
            t: e.round,
            u: e.head as u64 + 1,
            v: e.tail as u64 + 1,
            color: e.color,
            discarded: e.discarded,
        }
    }
}

pub fn write_trace<W: Write>(mut w: W, edges: &[EdgeRecord]) -> anyhow::Result<()> {
    for e in edges {
        serde_json::to_writer(&mut w, &TraceRecord::from(e))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace<R: BufRead>(r: R) -> anyhow::Result<Vec<TraceRecord>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TraceRecord =
            serde_json::from_str(&line).with_context(|| format!("trace line {}", i + 1))?;
        if rec.t != out.len() as u64 + 1 {
            bail!(
                "trace line {}: expected round {}, found {}",
                i + 1,
                out.len() + 1,
                rec.t
            );
        }
        out.push(rec);
    }
    Ok(out)
}

/// Rebuilds the process state from a trace and checks the recorded
/// `discarded` flags against the replay.
pub fn replay(n: usize, records: &[TraceRecord]) -> anyhow::Result<ProcessState> {
    let mut st = ProcessState::new(n, 0)?;
    for r in records {
        if r.u == 0 || r.v == 0 || r.u > n as u64 || r.v > n as u64 {
            bail!("round {}: vertex label out of 1..={n}", r.t);
        }
        let e = st.push_edge((r.u - 1) as u32, (r.v - 1) as u32, r.color)?;
        if e.discarded != r.discarded {
            bail!("round {}: discarded flag disagrees with replay", r.t);
        }
    }
    Ok(st)
}
