use proptest::prelude::*;
use semirandom_core::engine::{run_to_completion, RunOptions};
use semirandom_core::graph::{Adjacency, SimpleGraph};
use semirandom_core::strategy::{upper_bound_replicate, verify_hamilton_cycle, FourPhaseConfig};
use semirandom_lab::edgelist::{parse_edge_list, write_edge_list};
use semirandom_lab::seeds::SeedList;
use semirandom_lab::trace::{read_trace, replay, write_trace, TraceRecord};

#[test]
fn trace_replays_to_the_same_graph() {
    let n = 1500;
    let (mut st, mut s) = upper_bound_replicate(n, FourPhaseConfig::default(), 9, 0).unwrap();
    run_to_completion(&mut st, &mut s, &RunOptions::default());
    let mut buf = Vec::new();
    write_trace(&mut buf, st.edges()).unwrap();
    let recs = read_trace(buf.as_slice()).unwrap();
    assert_eq!(recs.len() as u64, st.t());
    let back = replay(n, &recs).unwrap();
    assert_eq!(back.simple_edge_count(), st.simple_edge_count());
    assert_eq!(back.degrees(), st.degrees());
    assert!(verify_hamilton_cycle(s.cycle().unwrap(), &back));
    for (r, e) in recs.iter().zip(st.edges()) {
        assert_eq!((r.u, r.v), (e.head as u64 + 1, e.tail as u64 + 1));
        assert_eq!(r.color, e.color);
    }
}

#[test]
fn trace_line_format() {
    let line = r#"{"t":1,"u":4,"v":2,"color":"blue","discarded":false}"#;
    let recs = read_trace(format!("{line}\n\n").as_bytes()).unwrap();
    assert_eq!(recs[0].u, 4);
    let mut out = Vec::new();
    let st = replay(5, &recs).unwrap();
    write_trace(&mut out, st.edges()).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().trim_end(), line);
}

#[test]
fn corrupted_traces_are_rejected() {
    let ok = TraceRecord {
        t: 1,
        u: 1,
        v: 2,
        color: semirandom_core::EdgeColor::Blue,
        discarded: false,
    };
    let dup = TraceRecord {
        t: 2,
        u: 2,
        v: 1,
        discarded: false,
        ..ok
    };
    assert!(replay(3, &[ok, dup]).is_err());
    assert!(replay(
        3,
        &[
            ok,
            TraceRecord {
                discarded: true,
                ..dup
            }
        ]
    )
    .is_ok());
    assert!(replay(3, &[TraceRecord { u: 4, ..ok }]).is_err());
    let skipped = r#"{"t":2,"u":1,"v":2,"color":"red","discarded":false}"#;
    assert!(read_trace(skipped.as_bytes()).is_err());
    assert!(read_trace("not json".as_bytes()).is_err());
}

proptest! {
    #[test]
    fn edge_lists_round_trip(n in 2usize..30, raw in proptest::collection::vec((0u32..30, 0u32..30), 0..60)) {
        let edges: Vec<_> = raw.into_iter()
            .map(|(a, b)| (a % n as u32, b % n as u32))
            .filter(|(a, b)| a != b)
            .collect();
        let g = SimpleGraph::from_edges(n, &edges).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &g).unwrap();
        let back = parse_edge_list(std::str::from_utf8(&buf).unwrap(), Some(n)).unwrap();
        prop_assert_eq!(back.vertex_count(), n);
        prop_assert_eq!(back.edge_count(), g.edge_count());
        for (a, b) in g.edge_list() {
            prop_assert!(back.has_edge(a, b));
        }
    }

    #[test]
    fn seed_lists_round_trip(seeds in proptest::collection::btree_set(0u64..1000, 1..20)) {
        let list = SeedList(seeds.into_iter().collect());
        let parsed: SeedList = list.to_string().parse().unwrap();
        prop_assert_eq!(parsed, list);
    }
}
