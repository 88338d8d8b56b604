use std::fs;

use bbqram::data::SparseVector;
use bbqram::kptree::KpTree;
use bbqram::qram::{QramInstance, RoutingLog};
use bbqram::stateprep::{prepare_vector, PrepOptions};

fn golden(name: &str) -> String {
    fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn example_prep_trace() {
    let tree = KpTree::build(&SparseVector::from_dense(&[-2.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0, -1.0]).unwrap());
    let r = prepare_vector(&tree, &PrepOptions::default()).unwrap();
    let trace = r.log.trace_text();
    assert_eq!(trace, golden("example_prep_trace.txt"));

    // hand-derived anchors
    for line in [
        "ROTATE prefix=- p=0.8",
        "ROTATE prefix=0 p=0.5",
        "ROTATE prefix=1 p=0",
        "ROTATE prefix=00 p=1",
        "ROTATE prefix=01 p=1",
        "ROTATE prefix=11 p=0.5",
        "  QUERY addr=110 word=1 routing_ops=3 stores=3 time_steps=18",
        "  QUERY addr=11 word=2 routing_ops=1 stores=2 time_steps=8",
    ] {
        assert!(trace.lines().any(|l| l == line), "missing {line:?}");
    }
    let queries = trace
        .lines()
        .filter(|l| l.starts_with("LEVEL") || l.starts_with("SIGN LOAD") || l.starts_with("SIGN UNLOAD"))
        .count();
    assert_eq!(queries, 4 * 3 + 2);
}

#[test]
fn route_110_trace() {
    let mut q = QramInstance::new(vec![0u8; 8]).unwrap();
    let mut log = RoutingLog::new();
    q.route_address(&"110".parse().unwrap(), &mut log).unwrap();
    q.unroute(&mut log);
    assert_eq!(log.trace_text(), golden("route_110_trace.txt"));
}
