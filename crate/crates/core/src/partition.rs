//! Partitions of a variable set into ordered parts.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::circuit::{Circuit, VarId};

/// Ordered list of pairwise disjoint variable parts. The position of a
/// variable inside its part is the category value it stands for.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct VariablePartition {
    parts: Vec<Vec<VarId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("variable `{0}` appears in more than one part")]
    Overlap(VarId),
    #[error("part {0} is empty")]
    EmptyPart(usize),
    #[error("circuit variable `{0}` is not covered by the partition")]
    Uncovered(VarId),
}

impl VariablePartition {
    pub fn new(parts: Vec<Vec<VarId>>) -> Result<Self, PartitionError> {
        let mut seen = BTreeSet::new();
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(PartitionError::EmptyPart(i));
            }
            for v in part {
                if !seen.insert(v.clone()) {
                    return Err(PartitionError::Overlap(v.clone()));
                }
            }
        }
        Ok(VariablePartition { parts })
    }

    /// Parts `[xb_i, x_i]` for `i = 1..=n`, so index 0 is the value 0.
    pub fn binary(n: usize) -> Self {
        VariablePartition {
            parts: (1..=n).map(|i| alloc::vec![VarId::negated(i), VarId::positive(i)]).collect(),
        }
    }

    /// Parts `[z{i}_0, .., z{i}_{d-1}]` for the given 1-based indices.
    pub fn slots<I: IntoIterator<Item = usize>>(vars: I, arity: usize) -> Self {
        VariablePartition {
            parts: vars.into_iter().map(|i| (0..arity).map(|j| VarId::slot(i, j)).collect()).collect(),
        }
    }

    pub fn parts(&self) -> &[Vec<VarId>] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn variables(&self) -> impl Iterator<Item = &VarId> {
        self.parts.iter().flatten()
    }

    /// `(part, position)` of a variable.
    pub fn locate(&self, var: &VarId) -> Option<(usize, usize)> {
        self.parts
            .iter()
            .enumerate()
            .find_map(|(i, p)| p.iter().position(|v| v == var).map(|j| (i, j)))
    }

    /// Checks that every variable of `circuit` lies in some part.
    pub fn covers(&self, circuit: &Circuit) -> Result<(), PartitionError> {
        let known: BTreeSet<&VarId> = self.variables().collect();
        match circuit.variables().iter().find(|v| !known.contains(v)) {
            Some(v) => Err(PartitionError::Uncovered(v.clone())),
            None => Ok(()),
        }
    }

    /// Concatenation; fails if the two share a variable.
    pub fn concat(&self, other: &VariablePartition) -> Result<Self, PartitionError> {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        VariablePartition::new(parts)
    }
}

impl fmt::Display for VariablePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for part in &self.parts {
            let names: Vec<&str> = part.iter().map(VarId::name).collect();
            writeln!(f, "{}", names.join(" "))?;
        }
        Ok(())
    }
}
