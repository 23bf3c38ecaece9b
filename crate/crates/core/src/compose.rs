//! Composition of set-multilinear distribution circuits: smoothing,
//! mixture, product and hierarchical substitution.
//!
//! Random variable `i` with arity `d` is represented by the slots
//! `z{i}_0 .. z{i}_{d-1}`; a scope is the sorted list of such indices.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::circuit::{Circuit, CircuitBuilder, NodeId, StructuralError, VarId, VarRole};
use crate::partition::{PartitionError, VariablePartition};
use crate::pgc::DistributionTable;
use crate::rational::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ComposeError {
    #[error("weights must be nonnegative and sum to 1")]
    Weights,
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("mixture weight {0} outside [0, 1]")]
    Alpha(alloc::string::String),
    #[error("arities differ: {0} vs {1}")]
    Arity(u32, u32),
    #[error("scopes not disjoint: variable {0} appears in both")]
    ScopesOverlap(usize),
    #[error("new scope does not contain variable {0} of the old scope")]
    ScopeShrinks(usize),
    #[error("hierarchical composition needs a binary outer circuit over {expected} variables, got {got}")]
    Outer { expected: usize, got: usize },
    #[error("block {block} has {got} variables, expected {expected}")]
    BlockSize { block: usize, expected: usize, got: usize },
    #[error("variable `{0}` is not a slot of the scope")]
    Variable(VarId),
    #[error(transparent)]
    Structure(#[from] StructuralError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// A circuit over slot variables together with its scope and arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScopedDistributionCircuit {
    circuit: Circuit,
    partition: VariablePartition,
    scope: Vec<usize>,
    arity: u32,
}

impl ScopedDistributionCircuit {
    /// Checks that the circuit is division-free and only uses slots of the
    /// scope. Distributionhood is not checked.
    pub fn new(circuit: Circuit, scope: Vec<usize>, arity: u32) -> Result<Self, ComposeError> {
        circuit.require_division_free()?;
        let scope: Vec<usize> = scope.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        for v in circuit.variables() {
            match v.role() {
                Some(VarRole::Slot { var, value }) if scope.binary_search(&var).is_ok() && value < arity as usize => {}
                _ => return Err(ComposeError::Variable(v.clone())),
            }
        }
        let partition = VariablePartition::slots(scope.iter().copied(), arity as usize);
        Ok(ScopedDistributionCircuit { circuit, partition, scope, arity })
    }

    /// Renames the literals `xb{i}`, `x{i}` of a compiled binary circuit to
    /// `z{i}_0`, `z{i}_1`.
    pub fn from_literals(circuit: &Circuit, n: usize) -> Result<Self, ComposeError> {
        let mut map = BTreeMap::new();
        for i in 1..=n {
            map.insert(VarId::negated(i), Circuit::variable(VarId::slot(i, 0)));
            map.insert(VarId::positive(i), Circuit::variable(VarId::slot(i, 1)));
        }
        ScopedDistributionCircuit::new(circuit.substitute(&map), (1..=n).collect(), 2)
    }

    /// Dense sum of products `Σ_t p_t Π_i z{s_i}_{t_i}` for a table, with the
    /// table's variables mapped to `scope` in order.
    pub fn from_table(table: &DistributionTable, scope: &[usize]) -> Result<Self, ComposeError> {
        assert_eq!(scope.len(), table.n(), "one scope index per table variable");
        let d = table.arity();
        let mut b = CircuitBuilder::with_variables(
            scope.iter().flat_map(|&i| (0..d as usize).map(move |j| VarId::slot(i, j))),
        );
        let mut terms = Vec::new();
        for (tuple, p) in table.entries() {
            let factors: Vec<NodeId> = scope.iter().zip(tuple).map(|(&i, &j)| b.var(&VarId::slot(i, j as usize))).collect();
            let node = match factors.len() {
                0 => b.one(),
                1 => factors[0],
                _ => b.prod(factors),
            };
            terms.push((node, p.clone()));
        }
        let out = b.sum(terms);
        ScopedDistributionCircuit::new(b.finish(out), scope.to_vec(), d)
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn partition(&self) -> &VariablePartition {
        &self.partition
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn size(&self) -> usize {
        self.circuit.size()
    }
}

fn check_weights(weights: &[Rational]) -> Result<(), ComposeError> {
    let total = weights.iter().fold(Rational::zero(), |a, b| a + b);
    if weights.iter().any(Signed::is_negative) || !total.is_one() {
        return Err(ComposeError::Weights);
    }
    Ok(())
}

/// `Σ_δ α_δ z{i}_δ`.
pub fn leaf_distribution(i: usize, weights: &[Rational]) -> Result<ScopedDistributionCircuit, ComposeError> {
    if weights.len() < 2 {
        return Err(ComposeError::WeightCount { expected: 2, got: weights.len() });
    }
    check_weights(weights)?;
    let d = weights.len();
    let mut b = CircuitBuilder::with_variables((0..d).map(|j| VarId::slot(i, j)));
    let terms: Vec<_> = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(j, w)| (b.var(&VarId::slot(i, j)), w.clone()))
        .collect();
    let out = b.sum(terms);
    ScopedDistributionCircuit::new(b.finish(out), alloc::vec![i], d as u32)
}

/// `(1/d)(z{j}_0 + .. + z{j}_{d-1})` inside `b`.
fn uniform_factor(b: &mut CircuitBuilder, j: usize, d: u32) -> NodeId {
    let w = Rational::new(1.into(), d.into());
    let terms = (0..d as usize).map(|k| (b.var(&VarId::slot(j, k)), w.clone())).collect();
    b.sum(terms)
}

/// Multiplies in the uniform distribution of every variable of
/// `new_scope` that is not yet in scope.
pub fn extend_smooth(
    f: &ScopedDistributionCircuit,
    new_scope: &[usize],
) -> Result<ScopedDistributionCircuit, ComposeError> {
    let old: BTreeSet<usize> = f.scope.iter().copied().collect();
    let new: BTreeSet<usize> = new_scope.iter().copied().collect();
    if let Some(&i) = old.difference(&new).next() {
        return Err(ComposeError::ScopeShrinks(i));
    }
    let added: Vec<usize> = new.difference(&old).copied().collect();
    if added.is_empty() {
        return Ok(f.clone());
    }
    let mut b = CircuitBuilder::with_variables(f.circuit.variables().iter().cloned());
    let root = b.graft(&f.circuit);
    let mut factors = alloc::vec![root];
    for &j in &added {
        factors.push(uniform_factor(&mut b, j, f.arity));
    }
    let out = b.prod(factors);
    ScopedDistributionCircuit::new(b.finish(out), new.into_iter().collect(), f.arity)
}

/// `α f + (1 - α) g`, both first extended to the union of the scopes.
pub fn mixture(
    f: &ScopedDistributionCircuit,
    g: &ScopedDistributionCircuit,
    alpha: &Rational,
) -> Result<ScopedDistributionCircuit, ComposeError> {
    if f.arity != g.arity {
        return Err(ComposeError::Arity(f.arity, g.arity));
    }
    if alpha.is_negative() || *alpha > Rational::one() {
        return Err(ComposeError::Alpha(format_rational(alpha)));
    }
    let union: Vec<usize> = f.scope.iter().chain(&g.scope).copied().collect::<BTreeSet<_>>().into_iter().collect();
    let (fe, ge) = (extend_smooth(f, &union)?, extend_smooth(g, &union)?);
    let mut b = CircuitBuilder::new();
    let a = b.graft(&fe.circuit);
    let c = b.graft(&ge.circuit);
    let out = b.sum(alloc::vec![(a, alpha.clone()), (c, Rational::one() - alpha)]);
    ScopedDistributionCircuit::new(b.finish(out), union, f.arity)
}

/// Product distribution of two circuits on disjoint scopes.
pub fn product(
    f: &ScopedDistributionCircuit,
    g: &ScopedDistributionCircuit,
) -> Result<ScopedDistributionCircuit, ComposeError> {
    if f.arity != g.arity {
        return Err(ComposeError::Arity(f.arity, g.arity));
    }
    if let Some(&i) = f.scope.iter().find(|i| g.scope.binary_search(i).is_ok()) {
        return Err(ComposeError::ScopesOverlap(i));
    }
    let mut b = CircuitBuilder::new();
    let a = b.graft(&f.circuit);
    let c = b.graft(&g.circuit);
    let out = b.prod(alloc::vec![a, c]);
    let scope = f.scope.iter().chain(&g.scope).copied().collect();
    ScopedDistributionCircuit::new(b.finish(out), scope, f.arity)
}

/// Replaces, for the `i`-th variable of the binary outer circuit `f`, the
/// slot for value 1 by `g_i` and the slot for value 0 by the uniform
/// distribution on `g_i`'s block.
pub fn hierarchical(
    f: &ScopedDistributionCircuit,
    blocks: &[ScopedDistributionCircuit],
) -> Result<ScopedDistributionCircuit, ComposeError> {
    if f.arity != 2 || f.scope.len() != blocks.len() {
        return Err(ComposeError::Outer { expected: blocks.len(), got: f.scope.len() });
    }
    let Some(first) = blocks.first() else {
        return Ok(f.clone());
    };
    let (m, d) = (first.scope.len(), first.arity);
    let mut seen = BTreeSet::new();
    for (k, g) in blocks.iter().enumerate() {
        if g.arity != d {
            return Err(ComposeError::Arity(d, g.arity));
        }
        if g.scope.len() != m {
            return Err(ComposeError::BlockSize { block: k, expected: m, got: g.scope.len() });
        }
        for &i in &g.scope {
            if !seen.insert(i) {
                return Err(ComposeError::ScopesOverlap(i));
            }
        }
    }
    let mut map = BTreeMap::new();
    for (&i, g) in f.scope.iter().zip(blocks) {
        map.insert(VarId::slot(i, 1), g.circuit.clone());
        let mut b = CircuitBuilder::new();
        let factors: Vec<NodeId> = g.scope.iter().map(|&j| uniform_factor(&mut b, j, d)).collect();
        let out = if factors.len() == 1 { factors[0] } else { b.prod(factors) };
        map.insert(VarId::slot(i, 0), b.finish(out));
    }
    let circuit = f.circuit.substitute(&map);
    ScopedDistributionCircuit::new(circuit, seen.into_iter().collect(), d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{expand, Monomial};
    use crate::rational::{int, ratio};

    fn slots(pairs: &[(usize, usize)]) -> Monomial {
        Monomial::product(pairs.iter().map(|&(i, j)| VarId::slot(i, j)))
    }

    fn coin(i: usize) -> ScopedDistributionCircuit {
        leaf_distribution(i, &[ratio(1, 2), ratio(1, 2)]).unwrap()
    }

    #[test]
    fn leaves() {
        let p = expand(coin(1).circuit(), 10).unwrap();
        assert_eq!(p.coefficient(&slots(&[(1, 0)])), ratio(1, 2));
        let point = leaf_distribution(4, &[int(1), int(0), int(0)]).unwrap();
        let p = expand(point.circuit(), 10).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coefficient(&slots(&[(4, 0)])), int(1));
        assert_eq!(leaf_distribution(1, &[ratio(1, 2), ratio(1, 3)]), Err(ComposeError::Weights));
    }

    #[test]
    fn smoothing() {
        let e = extend_smooth(&coin(1), &[1, 2]).unwrap();
        let p = expand(e.circuit(), 10).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.terms().all(|(_, c)| *c == ratio(1, 4)));
        assert_eq!(extend_smooth(&coin(1), &[1]).unwrap(), coin(1));
        assert_eq!(extend_smooth(&coin(1), &[2]), Err(ComposeError::ScopeShrinks(1)));
    }

    #[test]
    fn mixtures() {
        let zero = leaf_distribution(1, &[int(1), int(0)]).unwrap();
        let one = leaf_distribution(1, &[int(0), int(1)]).unwrap();
        let m = mixture(&zero, &one, &ratio(1, 2)).unwrap();
        assert_eq!(expand(m.circuit(), 10).unwrap(), expand(coin(1).circuit(), 10).unwrap());
        assert!(matches!(mixture(&zero, &one, &ratio(3, 2)), Err(ComposeError::Alpha(_))));
    }

    #[test]
    fn products() {
        let p = product(&coin(1), &coin(2)).unwrap();
        let e = expand(p.circuit(), 10).unwrap();
        assert_eq!(e.len(), 4);
        assert!(e.terms().all(|(_, c)| *c == ratio(1, 4)));
        assert_eq!(product(&coin(1), &coin(1)), Err(ComposeError::ScopesOverlap(1)));
    }

    #[test]
    fn hierarchical_degenerate_cases() {
        let g = product(&leaf_distribution(5, &[ratio(1, 3), ratio(2, 3)]).unwrap(), &coin(6)).unwrap();
        let bar = leaf_distribution(1, &[int(1), int(0)]).unwrap();
        let h = hierarchical(&bar, &[g.clone()]).unwrap();
        let e = expand(h.circuit(), 100).unwrap();
        assert_eq!(e.len(), 4);
        assert!(e.terms().all(|(_, c)| *c == ratio(1, 4)));

        let top = leaf_distribution(1, &[int(0), int(1)]).unwrap();
        let h = hierarchical(&top, &[g.clone()]).unwrap();
        assert_eq!(expand(h.circuit(), 100).unwrap(), expand(g.circuit(), 100).unwrap());
        assert_eq!(h.scope(), &[5, 6]);
    }
}
