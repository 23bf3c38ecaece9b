//! Small hand-built instances used throughout the tests.

use crate::circuit::{Circuit, CircuitBuilder, VarId};
use crate::hardness::BipartiteGraph;
use crate::partition::VariablePartition;
use crate::pgc::{pgc_var, Pgc};
use crate::rational::{int, ratio};

/// Nonmonotone PC over `x1, xb1, x2, xb2`:
/// `1/12 (x1 + xb1)(xb2 + 2 x2) + 1/6 (x1 + xb1)(x2 + 1/2 xb2)`.
pub fn fig2_pc() -> (Circuit, VariablePartition) {
    let (x1, xb1, x2, xb2) = (VarId::positive(1), VarId::negated(1), VarId::positive(2), VarId::negated(2));
    let mut b = CircuitBuilder::with_variables([x1.clone(), xb1.clone(), x2.clone(), xb2.clone()]);
    let (x1, xb1, x2, xb2) = (b.var(&x1), b.var(&xb1), b.var(&x2), b.var(&xb2));
    let s4 = b.sum(alloc::vec![(x1, int(1)), (xb1, int(1))]);
    let s5 = b.sum(alloc::vec![(xb2, int(1)), (x2, int(2))]);
    let s6 = b.sum(alloc::vec![(x2, int(1)), (xb2, ratio(1, 2))]);
    let p2 = b.prod(alloc::vec![s4, s5]);
    let p3 = b.prod(alloc::vec![s4, s6]);
    let root = b.sum(alloc::vec![(p2, ratio(1, 12)), (p3, ratio(1, 6))]);
    (b.finish(root), VariablePartition::binary(2))
}

/// Binary PGC with a negative edge:
/// `2/3 (1 + 2 z2)(1 + z1) - (1 + z1)(z2 + 1/2)`, whose table is
/// `{00: 1/6, 10: 1/6, 01: 1/3, 11: 1/3}`.
pub fn fig3_pgc() -> Pgc {
    let (z1, z2) = (pgc_var(1), pgc_var(2));
    let mut b = CircuitBuilder::with_variables([z1.clone(), z2.clone()]);
    let one = b.one();
    let (z1, z2) = (b.var(&z1), b.var(&z2));
    let s4 = b.sum(alloc::vec![(one, int(1)), (z2, int(2))]);
    let s5 = b.sum(alloc::vec![(one, int(1)), (z1, int(1))]);
    let s6 = b.sum(alloc::vec![(z2, int(1)), (one, ratio(1, 2))]);
    let p2 = b.prod(alloc::vec![s4, s5]);
    let p3 = b.prod(alloc::vec![s5, s6]);
    let root = b.sum(alloc::vec![(p2, ratio(2, 3)), (p3, int(-1))]);
    Pgc::binary(b.finish(root), 2).expect("fixed instance")
}

/// `0.6 z1 z2 + 0.4 z1`.
pub fn example_pgc() -> Pgc {
    let (z1, z2) = (pgc_var(1), pgc_var(2));
    let mut b = CircuitBuilder::with_variables([z1.clone(), z2.clone()]);
    let (z1, z2) = (b.var(&z1), b.var(&z2));
    let m = b.prod(alloc::vec![z1, z2]);
    let root = b.sum(alloc::vec![(m, ratio(3, 5)), (z1, ratio(2, 5))]);
    Pgc::binary(b.finish(root), 2).expect("fixed instance")
}

/// 3-regular bipartite graph on 4 + 4 vertices with 9 perfect matchings:
/// `u1: v1 v2 v3`, `u2: v1 v2 v4`, `u3: v1 v3 v4`, `u4: v2 v3 v4`.
pub fn fig4_graph() -> BipartiteGraph {
    let adjacency: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    let edges = adjacency
        .iter()
        .enumerate()
        .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
        .collect();
    BipartiteGraph::new(4, 4, edges).expect("fixed instance")
}
