use alloc::vec::Vec;

use num_bigint::BigInt;

use super::graph::BipartiteGraph;
use crate::circuit::{Assignment, VarId};
use crate::poly::{Monomial, SparsePolynomial};
use crate::rational::Rational;

/// Largest side accepted by the perfect-matching counters.
pub const PERMANENT_LIMIT: usize = 12;
/// Largest side accepted by permutation enumeration.
pub const ENUMERATION_LIMIT: usize = 8;
/// Largest edge count accepted by matching enumeration.
pub const MATCHING_EDGE_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MatchingError {
    #[error("perfect matchings need equal sides, got {left} and {right}")]
    Unbalanced { left: usize, right: usize },
    #[error("instance of size {size} exceeds the oracle limit {limit}")]
    TooLarge { size: usize, limit: usize },
}

fn balanced(g: &BipartiteGraph, limit: usize) -> Result<usize, MatchingError> {
    if g.left() != g.right() {
        return Err(MatchingError::Unbalanced { left: g.left(), right: g.right() });
    }
    if g.left() > limit {
        return Err(MatchingError::TooLarge { size: g.left(), limit });
    }
    Ok(g.left())
}

/// Permanent of the biadjacency matrix (rows `U`, columns `V`) by Ryser's
/// inclusion-exclusion formula.
pub fn count_perfect_matchings_ryser(g: &BipartiteGraph) -> Result<u64, MatchingError> {
    let n = balanced(g, PERMANENT_LIMIT)?;
    if n == 0 {
        return Ok(1);
    }
    let rows: Vec<u32> = (0..n).map(|u| g.left_neighbours(u).iter().fold(0u32, |m, &v| m | (1 << v))).collect();
    let mut total: i128 = 0;
    for cols in 1u32..(1 << n) {
        let mut prod: i128 = 1;
        for r in &rows {
            prod *= (r & cols).count_ones() as i128;
            if prod == 0 {
                break;
            }
        }
        let sign = if (n as u32 - cols.count_ones()) % 2 == 0 { 1 } else { -1 };
        total += sign * prod;
    }
    Ok(total as u64)
}

/// Perfect matchings by enumerating injective assignments along edges.
pub fn count_perfect_matchings_enumeration(g: &BipartiteGraph) -> Result<u64, MatchingError> {
    let n = balanced(g, ENUMERATION_LIMIT)?;
    fn go(g: &BipartiteGraph, u: usize, used: u32, n: usize) -> u64 {
        if u == n {
            return 1;
        }
        g.left_neighbours(u).iter().filter(|&&v| used & (1 << v) == 0).map(|&v| go(g, u + 1, used | (1 << v), n)).sum()
    }
    Ok(go(g, 0, 0, n))
}

/// Ryser's count, cross-checked against enumeration when small enough.
pub fn count_perfect_matchings(g: &BipartiteGraph) -> Result<u64, MatchingError> {
    let ryser = count_perfect_matchings_ryser(g)?;
    if g.left() <= ENUMERATION_LIMIT {
        let brute = count_perfect_matchings_enumeration(g)?;
        assert_eq!(ryser, brute, "perfect-matching counters disagree");
    }
    Ok(ryser)
}

/// Number of matchings by size, by include/exclude branching over edges
/// with conflicting edges pruned.
pub fn matchings_by_size(g: &BipartiteGraph) -> Result<Vec<u64>, MatchingError> {
    let edges = g.edges();
    if edges.len() > MATCHING_EDGE_LIMIT || g.left() > 64 || g.right() > 64 {
        return Err(MatchingError::TooLarge { size: edges.len(), limit: MATCHING_EDGE_LIMIT });
    }
    let mut counts = alloc::vec![0u64; g.left().min(g.right()) + 1];
    fn go(edges: &[(usize, usize)], k: usize, ul: u64, ur: u64, size: usize, counts: &mut [u64]) {
        if k == edges.len() {
            counts[size] += 1;
            return;
        }
        let (u, v) = edges[k];
        if ul & (1 << u) == 0 && ur & (1 << v) == 0 {
            go(edges, k + 1, ul | (1 << u), ur | (1 << v), size + 1, counts);
        }
        go(edges, k + 1, ul, ur, size, counts);
    }
    go(edges, 0, 0, 0, 0, &mut counts);
    Ok(counts)
}

/// Variable of the matching polynomial.
pub fn rmatch_variable() -> VarId {
    VarId::new("x")
}

/// `Σ_M x^{#right vertices unmatched by M}`.
pub fn rmatch_poly(g: &BipartiteGraph) -> Result<SparsePolynomial, MatchingError> {
    let counts = matchings_by_size(g)?;
    let mut p = SparsePolynomial::zero();
    for (size, c) in counts.iter().enumerate() {
        let unmatched = (g.right() - size) as u32;
        p.add_term(Monomial::from_pairs([(rmatch_variable(), unmatched)]), Rational::from_integer(BigInt::from(*c)));
    }
    Ok(p)
}

pub fn rmatch(g: &BipartiteGraph, lambda: &Rational) -> Result<Rational, MatchingError> {
    let p = rmatch_poly(g)?;
    Ok(p.evaluate(&Assignment::from_pairs([(rmatch_variable(), lambda.clone())])).expect("x is assigned"))
}

/// Total number of matchings, `RMatch(G, 1)`.
pub fn count_matchings(g: &BipartiteGraph) -> Result<u64, MatchingError> {
    Ok(matchings_by_size(g)?.iter().sum())
}
