use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::rng;

/// Bipartite graph with left part `U = {0..left}` and right part
/// `V = {0..right}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    edges: Vec<(usize, usize)>,
    adj_left: Vec<Vec<usize>>,
    adj_right: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) out of range")]
    OutOfRange(usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    Duplicate(usize, usize),
    #[error("graph is not {expected}")]
    Regularity { expected: RegularityKind },
    #[error("(2,3)-regular graphs need an even, positive number of right vertices, got {0}")]
    OddSize(usize),
    #[error("3-regular bipartite graphs need at least 3 vertices per side, got {0}")]
    TooSmall(usize),
    #[error("no simple graph found within {0} attempts")]
    RetryLimit(usize),
}

/// Degree pattern of a bipartite graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularityKind {
    /// `|U| = |V|`, every degree 3.
    ThreeRegular,
    /// `|U| = 3|V|/2`, left degrees 2, right degrees 3.
    TwoThree,
    Irregular,
}

impl core::fmt::Display for RegularityKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            RegularityKind::ThreeRegular => "3-regular",
            RegularityKind::TwoThree => "(2,3)-regular",
            RegularityKind::Irregular => "irregular",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityProfile {
    pub kind: RegularityKind,
    pub left_degrees: Vec<usize>,
    pub right_degrees: Vec<usize>,
}

impl BipartiteGraph {
    /// Edges are `(u, v)` with `u < left`, `v < right`, 0-based.
    pub fn new(left: usize, right: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        let mut adj_left = alloc::vec![Vec::new(); left];
        let mut adj_right = alloc::vec![Vec::new(); right];
        for &(u, v) in &edges {
            if u >= left || v >= right {
                return Err(GraphError::OutOfRange(u, v));
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::Duplicate(u, v));
            }
            adj_left[u].push(v);
            adj_right[v].push(u);
        }
        adj_left.iter_mut().for_each(|a| a.sort_unstable());
        adj_right.iter_mut().for_each(|a| a.sort_unstable());
        let edges = seen.into_iter().collect();
        Ok(BipartiteGraph { left, right, edges, adj_left, adj_right })
    }

    pub fn complete(left: usize, right: usize) -> Self {
        let edges = (0..left).flat_map(|u| (0..right).map(move |v| (u, v))).collect();
        BipartiteGraph::new(left, right, edges).expect("complete graphs are simple")
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn left_neighbours(&self, u: usize) -> &[usize] {
        &self.adj_left[u]
    }

    pub fn right_neighbours(&self, v: usize) -> &[usize] {
        &self.adj_right[v]
    }

    /// The `k`-th neighbour (0-based, ascending) of left vertex `u`.
    pub fn neighbour(&self, u: usize, k: usize) -> Option<usize> {
        self.adj_left[u].get(k).copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj_left[u].binary_search(&v).is_ok()
    }

    pub fn profile(&self) -> RegularityProfile {
        let left_degrees: Vec<usize> = self.adj_left.iter().map(Vec::len).collect();
        let right_degrees: Vec<usize> = self.adj_right.iter().map(Vec::len).collect();
        let all = |d: &[usize], k: usize| d.iter().all(|&x| x == k);
        let kind = if self.left == self.right && self.left > 0 && all(&left_degrees, 3) && all(&right_degrees, 3) {
            RegularityKind::ThreeRegular
        } else if self.right > 0
            && self.right % 2 == 0
            && 2 * self.left == 3 * self.right
            && all(&left_degrees, 2)
            && all(&right_degrees, 3)
        {
            RegularityKind::TwoThree
        } else {
            RegularityKind::Irregular
        };
        RegularityProfile { kind, left_degrees, right_degrees }
    }

    pub fn require(&self, kind: RegularityKind) -> Result<(), GraphError> {
        if self.profile().kind == kind {
            Ok(())
        } else {
            Err(GraphError::Regularity { expected: kind })
        }
    }
}

const GRAPH_TAG: u64 = 0x6a;
pub const RETRY_LIMIT: usize = 1000;

/// Configuration-model sample: stubs on both sides are paired by a random
/// permutation and samples with a repeated edge are rejected. For
/// `TwoThree`, `n` is the number of right vertices.
pub fn random_regular_bipartite(kind: RegularityKind, n: usize, seed: u64) -> Result<BipartiteGraph, GraphError> {
    let (left, right, dl, dr) = match kind {
        RegularityKind::ThreeRegular => {
            if n < 3 {
                return Err(GraphError::TooSmall(n));
            }
            (n, n, 3, 3)
        }
        RegularityKind::TwoThree => {
            if n == 0 || n % 2 != 0 {
                return Err(GraphError::OddSize(n));
            }
            (3 * n / 2, n, 2, 3)
        }
        RegularityKind::Irregular => return Err(GraphError::Regularity { expected: kind }),
    };
    let left_stubs: Vec<usize> = (0..left).flat_map(|u| core::iter::repeat(u).take(dl)).collect();
    let mut right_stubs: Vec<usize> = (0..right).flat_map(|v| core::iter::repeat(v).take(dr)).collect();
    for attempt in 0..RETRY_LIMIT {
        let mut r = rng::stream(seed, rng::stream_id(GRAPH_TAG, &[n as u64, attempt as u64]));
        right_stubs.sort_unstable();
        right_stubs.shuffle(&mut r);
        let edges: Vec<(usize, usize)> = left_stubs.iter().copied().zip(right_stubs.iter().copied()).collect();
        if let Ok(g) = BipartiteGraph::new(left, right, edges) {
            return Ok(g);
        }
    }
    Err(GraphError::RetryLimit(RETRY_LIMIT))
}
