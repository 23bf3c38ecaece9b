//! Marginals of set-multilinear circuits by a single evaluation at an
//! indicator point.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::circuit::{Assignment, Circuit, EvalError, Lowered};
use crate::compiler::{compile_pgc_to_smlpc, CompileError, Compiled};
use crate::partition::VariablePartition;
use crate::pgc::Pgc;
use crate::rational::Rational;
use crate::smltest::{test_set_multilinear, SmlError, SmlOptions, SmlVerdict, SmlWitness};

/// One value set `A_i` per random variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalQuery {
    pub sets: Vec<BTreeSet<u32>>,
}

impl MarginalQuery {
    pub fn new(sets: Vec<BTreeSet<u32>>) -> Self {
        MarginalQuery { sets }
    }

    pub fn from_slices(sets: &[&[u32]]) -> Self {
        MarginalQuery { sets: sets.iter().map(|s| s.iter().copied().collect()).collect() }
    }

    /// Every variable unconstrained.
    pub fn full(n: usize, arity: u32) -> Self {
        MarginalQuery { sets: alloc::vec![(0..arity).collect(); n] }
    }

    /// Indices of empty sets.
    pub fn empty_sets(&self) -> Vec<usize> {
        self.sets.iter().enumerate().filter(|(_, s)| s.is_empty()).map(|(i, _)| i).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MarginalError {
    #[error("query has {query} sets but the partition has {parts} parts")]
    Length { query: usize, parts: usize },
    #[error("value {value} is out of range for part {part} of size {size}")]
    Value { part: usize, value: u32, size: usize },
    #[error("circuit rejected as not set-multilinear: {0}")]
    NotSetMultilinear(SmlWitness),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Sml(#[from] SmlError),
}

/// The point `v_{i,j} = [j ∈ A_i]`, and the indices of parts whose set is
/// empty (those marginals are zero).
pub fn indicator_point(
    query: &MarginalQuery,
    partition: &VariablePartition,
) -> Result<(Assignment<Rational>, Vec<usize>), MarginalError> {
    if query.sets.len() != partition.len() {
        return Err(MarginalError::Length { query: query.sets.len(), parts: partition.len() });
    }
    let mut point = Assignment::new();
    for (i, (set, part)) in query.sets.iter().zip(partition.parts()).enumerate() {
        if let Some(&value) = set.iter().find(|&&j| j as usize >= part.len()) {
            return Err(MarginalError::Value { part: i, value, size: part.len() });
        }
        for (j, v) in part.iter().enumerate() {
            let x = if set.contains(&(j as u32)) { Rational::one() } else { Rational::zero() };
            point.set(v.clone(), x);
        }
    }
    Ok((point, query.empty_sets()))
}

/// `Pr[X_1 ∈ A_1, .., X_n ∈ A_n]` for a circuit that is set-multilinear
/// with respect to `partition` and encodes a distribution. Neither claim is
/// checked here; see [`Marginalizer::paranoid`].
pub fn marginalize_smlpc(
    pc: &Circuit,
    partition: &VariablePartition,
    query: &MarginalQuery,
) -> Result<Rational, MarginalError> {
    let (point, empty) = indicator_point(query, partition)?;
    if !empty.is_empty() {
        return Ok(Rational::zero());
    }
    Ok(pc.evaluate(&point)?)
}

/// Compiles a binary PGC and marginalizes the result.
pub fn marginalize_pgc_binary(pgc: &Pgc, query: &MarginalQuery) -> Result<Rational, MarginalError> {
    let Compiled { circuit, partition } = compile_pgc_to_smlpc(pgc)?;
    marginalize_smlpc(&circuit, &partition, query)
}

/// Repeated marginal queries against one circuit, with constants lowered
/// once. In paranoid mode the set-multilinearity test runs once and its
/// verdict is kept for the lifetime of the value.
#[derive(Clone, Debug)]
pub struct Marginalizer {
    circuit: Circuit,
    partition: VariablePartition,
    lowered: Lowered<Rational>,
    verdict: Option<SmlVerdict>,
}

impl Marginalizer {
    pub fn new(circuit: Circuit, partition: VariablePartition) -> Result<Self, MarginalError> {
        let lowered = Lowered::new(&circuit)?;
        Ok(Marginalizer { circuit, partition, lowered, verdict: None })
    }

    pub fn from_pgc(pgc: &Pgc) -> Result<Self, MarginalError> {
        let Compiled { circuit, partition } = compile_pgc_to_smlpc(pgc)?;
        Marginalizer::new(circuit, partition)
    }

    /// Runs the set-multilinearity test now and refuses all queries if it
    /// rejects.
    pub fn paranoid(mut self, options: &SmlOptions) -> Result<Self, MarginalError> {
        let verdict = test_set_multilinear(&self.circuit, &self.partition, options)?;
        if let SmlVerdict::Rejected(w) = &verdict {
            return Err(MarginalError::NotSetMultilinear(w.clone()));
        }
        self.verdict = Some(verdict);
        Ok(self)
    }

    pub fn verdict(&self) -> Option<&SmlVerdict> {
        self.verdict.as_ref()
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn partition(&self) -> &VariablePartition {
        &self.partition
    }

    pub fn query(&self, query: &MarginalQuery) -> Result<Rational, MarginalError> {
        let (point, empty) = indicator_point(query, &self.partition)?;
        if !empty.is_empty() {
            return Ok(Rational::zero());
        }
        let values = point.ordered(self.circuit.variables())?;
        Ok(self.lowered.evaluate(&values)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::VarId;
    use crate::corpus::figures;
    use crate::rational::{int, ratio};

    #[test]
    fn indicator_examples() {
        let parts = VariablePartition::binary(2);
        let (p, empty) = indicator_point(&MarginalQuery::from_slices(&[&[1], &[0, 1]]), &parts).unwrap();
        assert!(empty.is_empty());
        assert_eq!(p.get(&VarId::positive(1)), Some(&int(1)));
        assert_eq!(p.get(&VarId::negated(1)), Some(&int(0)));
        assert_eq!(p.get(&VarId::positive(2)), Some(&int(1)));
        assert_eq!(p.get(&VarId::negated(2)), Some(&int(1)));

        let (p, _) = indicator_point(&MarginalQuery::full(2, 2), &parts).unwrap();
        assert!(p.0.values().all(|v| *v == int(1)));

        let (p, empty) = indicator_point(&MarginalQuery::from_slices(&[&[], &[0]]), &parts).unwrap();
        assert_eq!(empty, alloc::vec![0]);
        assert_eq!(p.get(&VarId::positive(1)), Some(&int(0)));
        assert_eq!(p.get(&VarId::negated(1)), Some(&int(0)));

        assert!(matches!(
            indicator_point(&MarginalQuery::from_slices(&[&[2], &[0]]), &parts),
            Err(MarginalError::Value { .. })
        ));
    }

    #[test]
    fn fig2_marginal() {
        let (pc, parts) = figures::fig2_pc();
        assert_eq!(marginalize_smlpc(&pc, &parts, &MarginalQuery::from_slices(&[&[1], &[0, 1]])).unwrap(), ratio(1, 2));
        assert_eq!(marginalize_smlpc(&pc, &parts, &MarginalQuery::full(2, 2)).unwrap(), int(1));
    }

    #[test]
    fn fig3_through_compiler() {
        let pgc = figures::fig3_pgc();
        assert_eq!(marginalize_pgc_binary(&pgc, &MarginalQuery::from_slices(&[&[1], &[0, 1]])).unwrap(), ratio(1, 2));
        assert_eq!(marginalize_pgc_binary(&pgc, &MarginalQuery::full(2, 2)).unwrap(), int(1));
        let m = Marginalizer::from_pgc(&pgc).unwrap().paranoid(&SmlOptions::new(3)).unwrap();
        assert!(m.verdict().unwrap().is_accepted());
        assert_eq!(m.query(&MarginalQuery::from_slices(&[&[0], &[1]])).unwrap(), ratio(1, 3));
        assert_eq!(m.query(&MarginalQuery::from_slices(&[&[0], &[]])).unwrap(), int(0));
    }

    #[test]
    fn paranoid_refuses_non_sml() {
        let pgc = figures::fig3_pgc();
        let parts = VariablePartition::new(alloc::vec![alloc::vec![VarId::new("z1")], alloc::vec![VarId::new("z2")]]).unwrap();
        let m = Marginalizer::new(pgc.circuit().clone(), parts).unwrap();
        assert!(matches!(m.paranoid(&SmlOptions::new(1)), Err(MarginalError::NotSetMultilinear(_))));
    }
}
