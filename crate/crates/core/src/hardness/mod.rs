//! Constructive side of the matching-counting reductions: graph to
//! generating circuit, plus brute-force oracles to check the marginal
//! identities on small graphs.

mod graph;
mod matching;

pub use graph::{random_regular_bipartite, BipartiteGraph, GraphError, RegularityKind, RegularityProfile, RETRY_LIMIT};
pub use matching::{
    count_matchings, count_perfect_matchings, count_perfect_matchings_enumeration, count_perfect_matchings_ryser,
    matchings_by_size, rmatch, rmatch_poly, rmatch_variable, MatchingError,
};

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed};

use crate::circuit::{Circuit, CircuitBuilder, VarId};
use crate::pgc::{check_distribution, selective_marginal_oracle, DistributionCheck, Pgc, PgcError};
use crate::poly::{expand, ExpandError};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("lambda must be positive")]
    Lambda,
    #[error("left vertex {0} has no neighbours")]
    IsolatedLeft(usize),
    #[error("right vertex {0} has no neighbours")]
    IsolatedRight(usize),
    #[error("sides differ: {0} and {1}")]
    Unbalanced(usize, usize),
    #[error(transparent)]
    Pgc(#[from] PgcError),
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("generated circuit is not a distribution")]
    NotADistribution,
}

/// `V{j}`, 1-based.
pub fn vertex_variable(j: usize) -> VarId {
    VarId::new(&alloc::format!("V{j}"))
}

/// `E{i}_{j}`, 1-based.
pub fn edge_variable(i: usize, j: usize) -> VarId {
    VarId::new(&alloc::format!("E{i}_{j}"))
}

/// `U{i}`, 1-based.
pub fn left_variable(i: usize) -> VarId {
    VarId::new(&alloc::format!("U{i}"))
}

/// `Π_i Σ_{j∈N(i)} E_{i,j} V_j` over left vertices `i`, unnormalized.
/// Variables: `V1..Vn` (arity 4) then the `E` variables in edge order
/// (arity 2).
pub fn quaternary_generating_circuit(g: &BipartiteGraph) -> Result<(Circuit, Vec<VarId>, Vec<u32>), ReductionError> {
    if g.left() != g.right() {
        return Err(ReductionError::Unbalanced(g.left(), g.right()));
    }
    let mut vars: Vec<VarId> = (1..=g.right()).map(vertex_variable).collect();
    let mut arities = alloc::vec![4; g.right()];
    vars.extend(g.edges().iter().map(|&(u, v)| edge_variable(u + 1, v + 1)));
    arities.extend(core::iter::repeat(2).take(g.edges().len()));
    let mut b = CircuitBuilder::with_variables(vars.iter().cloned());
    let mut factors = Vec::with_capacity(g.left());
    for u in 0..g.left() {
        if g.left_neighbours(u).is_empty() {
            return Err(ReductionError::IsolatedLeft(u));
        }
        let terms = g
            .left_neighbours(u)
            .iter()
            .map(|&v| {
                let e = b.var(&edge_variable(u + 1, v + 1));
                let x = b.var(&vertex_variable(v + 1));
                (b.prod(alloc::vec![e, x]), Rational::one())
            })
            .collect();
        factors.push(b.sum(terms));
    }
    let out = b.prod(factors);
    Ok((b.finish(out), vars, arities))
}

/// Normalized quaternary generating circuit of a 3-regular graph, and the
/// normalization `3^n`.
pub fn quaternary_pgc_from_graph(g: &BipartiteGraph) -> Result<(Pgc, Rational), ReductionError> {
    g.require(RegularityKind::ThreeRegular)?;
    let (circuit, vars, arities) = quaternary_generating_circuit(g)?;
    Ok(Pgc::new(circuit, vars, arities)?.normalize()?)
}

/// `Π_{j∈R} (λ + Σ_{i∈N(j)} U_i)`, unnormalized; variables `U1..Um`.
pub fn ternary_generating_circuit(g: &BipartiteGraph, lambda: &Rational) -> Result<(Circuit, Vec<VarId>), ReductionError> {
    if !lambda.is_positive() {
        return Err(ReductionError::Lambda);
    }
    let vars: Vec<VarId> = (1..=g.left()).map(left_variable).collect();
    let mut b = CircuitBuilder::with_variables(vars.iter().cloned());
    let one = b.one();
    let mut factors = Vec::with_capacity(g.right());
    for v in 0..g.right() {
        let mut terms = alloc::vec![(one, lambda.clone())];
        terms.extend(g.right_neighbours(v).iter().map(|&u| (b.var(&left_variable(u + 1)), Rational::one())));
        factors.push(b.sum(terms));
    }
    let out = b.prod(factors);
    Ok((b.finish(out), vars))
}

/// Normalized ternary generating circuit of a (2,3)-regular graph, and the
/// normalization `(λ+3)^n`.
pub fn ternary_pgc_from_graph(g: &BipartiteGraph, lambda: &Rational) -> Result<(Pgc, Rational), ReductionError> {
    g.require(RegularityKind::TwoThree)?;
    let (circuit, vars) = ternary_generating_circuit(g, lambda)?;
    let arities = alloc::vec![3; vars.len()];
    Ok(Pgc::new(circuit, vars, arities)?.normalize()?)
}

/// Outcome of a reduction check: the marginal read off the brute-force
/// table against the matching count divided by the normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub marginal: Rational,
    /// `#PM(G)` or `RMatch(G, λ)`.
    pub count: Rational,
    pub normalization: Rational,
    /// Monomials of the `V_1⋯V_n` coefficient (quaternary only).
    pub h_monomials: Option<usize>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.marginal == &self.count / &self.normalization
    }
}

const ORACLE_BUDGET: usize = 1 << 20;

/// Checks `Pr[V_1 = 1, .., V_n = 1] = #PM(G) / f(1..1)` on the expanded
/// table. For 3-regular graphs the normalization is `3^n`; any balanced
/// graph without isolated left vertices is accepted.
pub fn verify_quaternary_identity(g: &BipartiteGraph) -> Result<IdentityReport, ReductionError> {
    let (circuit, vars, arities) = quaternary_generating_circuit(g)?;
    let (pgc, normalization) = Pgc::new(circuit, vars, arities)?.normalize()?;
    let table = match check_distribution(&pgc, ORACLE_BUDGET)? {
        DistributionCheck::Valid(t) => t,
        DistributionCheck::Invalid(_) => return Err(ReductionError::NotADistribution),
    };
    let n = g.right();
    let mut sets: Vec<BTreeSet<u32>> = alloc::vec![[1].into_iter().collect(); n];
    sets.extend(core::iter::repeat([0, 1].into_iter().collect()).take(g.edges().len()));
    let marginal = selective_marginal_oracle(&table, &sets);
    let h_monomials = table.entries().filter(|(t, _)| t[..n].iter().all(|&j| j == 1)).count();
    let count = Rational::from_integer(BigInt::from(count_perfect_matchings(g)?));
    Ok(IdentityReport { marginal, count, normalization, h_monomials: Some(h_monomials) })
}

/// Checks that the selective marginal with every `U_i ∈ {0, 1}` equals
/// `RMatch(G, λ) / (λ+3)^n`.
pub fn verify_ternary_identity(g: &BipartiteGraph, lambda: &Rational) -> Result<IdentityReport, ReductionError> {
    let (pgc, normalization) = ternary_pgc_from_graph(g, lambda)?;
    let table = match check_distribution(&pgc, ORACLE_BUDGET)? {
        DistributionCheck::Valid(t) => t,
        DistributionCheck::Invalid(_) => return Err(ReductionError::NotADistribution),
    };
    let sets = alloc::vec![[0, 1].into_iter().collect(); g.left()];
    let marginal = selective_marginal_oracle(&table, &sets);
    let count = rmatch(g, lambda)?;
    Ok(IdentityReport { marginal, count, normalization, h_monomials: None })
}

/// `(λ + 3)^n` for convenience in tests and reports.
pub fn ternary_normalization(lambda: &Rational, n: usize) -> Rational {
    (lambda + Rational::from_integer(3.into())).pow(n as u32)
}

/// Expanded unnormalized quaternary polynomial (for inspecting single
/// coefficients).
pub fn quaternary_polynomial(g: &BipartiteGraph) -> Result<crate::poly::SparsePolynomial, ReductionError> {
    let (c, _, _) = quaternary_generating_circuit(g)?;
    Ok(expand(&c, ORACLE_BUDGET)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Assignment;
    use crate::corpus::figures;
    use crate::poly::Monomial;
    use crate::rational::{int, ratio};

    #[test]
    fn fig4_quaternary() {
        let g = figures::fig4_graph();
        let (c, vars, _) = quaternary_generating_circuit(&g).unwrap();
        let ones = Assignment::from_pairs(vars.iter().map(|v| (v.clone(), int(1))));
        assert_eq!(c.evaluate(&ones).unwrap(), int(81));
        let (pgc, norm) = quaternary_pgc_from_graph(&g).unwrap();
        assert_eq!(norm, int(81));
        assert_eq!(pgc.total_mass().unwrap(), int(1));
        let report = verify_quaternary_identity(&g).unwrap();
        assert_eq!(report.marginal, ratio(1, 9));
        assert_eq!(report.count, int(9));
        assert_eq!(report.h_monomials, Some(9));
        assert!(report.holds());

        let poly = quaternary_polynomial(&g).unwrap();
        let m = Monomial::product(
            [vertex_variable(1), vertex_variable(2), vertex_variable(3), vertex_variable(4)]
                .into_iter()
                .chain([edge_variable(1, 1), edge_variable(2, 4), edge_variable(3, 3), edge_variable(4, 2)]),
        );
        assert_eq!(poly.coefficient(&m), int(1));
    }

    #[test]
    fn k33_and_no_matching() {
        let r = verify_quaternary_identity(&BipartiteGraph::complete(3, 3)).unwrap();
        assert_eq!(r.marginal, ratio(2, 9));
        assert!(r.holds());
        let path = BipartiteGraph::new(2, 2, alloc::vec![(0, 0), (1, 0)]).unwrap();
        let r = verify_quaternary_identity(&path).unwrap();
        assert_eq!(r.marginal, int(0));
        assert!(r.holds());
        assert!(quaternary_pgc_from_graph(&path).is_err());
    }

    #[test]
    fn k32_ternary() {
        let g = BipartiteGraph::complete(3, 2);
        let (c, vars) = ternary_generating_circuit(&g, &int(1)).unwrap();
        let poly = expand(&c, 100).unwrap();
        assert_eq!(poly.len(), 10);
        assert_eq!(poly.coefficient(&Monomial::product([left_variable(1), left_variable(2)])), int(2));
        let ones = Assignment::from_pairs(vars.iter().map(|v| (v.clone(), int(1))));
        assert_eq!(c.evaluate(&ones).unwrap(), int(16));
        let r = verify_ternary_identity(&g, &int(1)).unwrap();
        assert_eq!(r.marginal, ratio(13, 16));
        assert!(r.holds());
        let r = verify_ternary_identity(&g, &int(2)).unwrap();
        assert_eq!(r.marginal, ratio(22, 25));
        assert_eq!(ternary_normalization(&int(2), 2), int(25));
        assert_eq!(ternary_pgc_from_graph(&g, &int(0)), Err(ReductionError::Lambda));
    }
}
