//! Reference networks and the stored ten-slot repetition scheme.

use crate::error::Result;
use crate::scheme::SchemeDescriptor;
use crate::topology::{parse_topology, Topology};

pub const FIG5_TOPO: &str = include_str!("../fixtures/fig5.topo");
pub const REG53_TOPO: &str = include_str!("../fixtures/reg53.topo");
pub const EX7_TOPO: &str = include_str!("../fixtures/ex7.topo");
pub const EX9_TOPO: &str = include_str!("../fixtures/ex9.topo");
pub const WYNER5_TOPO: &str = include_str!("../fixtures/wyner5.topo");
pub const TRIANGULAR4_TOPO: &str = include_str!("../fixtures/triangular4.topo");
/// Ten-slot scheme for the (5,3)-regular network with one channel draw per
/// slot; five instances per message, each fifth instance sent twice.
pub const EX4_REPETITION_JSON: &str = include_str!("../fixtures/ex4_repetition.json");

fn embedded(text: &str) -> Topology {
    parse_topology(text).expect("embedded fixture parses")
}

/// Six-cell network with the 2/5 to 1/2 gap.
pub fn fig5() -> Topology {
    embedded(FIG5_TOPO)
}

/// The (5,3)-regular network.
pub fn reg53() -> Topology {
    embedded(REG53_TOPO)
}

/// Six-cell network whose best scheme comes from a proper partition.
pub fn ex7() -> Topology {
    embedded(EX7_TOPO)
}

/// Four-cell network with an acyclic demand graph.
pub fn ex9() -> Topology {
    embedded(EX9_TOPO)
}

/// `(K, 2)` cyclic Wyner network: receiver `j` hears transmitters `j` and `j+1`.
pub fn wyner(k: usize) -> Result<Topology> {
    Topology::circulant(k, 2)
}

/// Receiver `j` hears transmitters `1..=j`.
pub fn triangular(k: usize) -> Result<Topology> {
    Topology::triangular(k)
}

pub fn ex4_repetition() -> SchemeDescriptor {
    serde_json::from_str(EX4_REPETITION_JSON).expect("embedded scheme parses")
}
