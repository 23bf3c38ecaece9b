//! Exact-arithmetic toolkit for circuits that represent probability
//! distributions.
//!
//! * [`circuit`]: the DAG IR with evaluation over the rationals and the prime
//!   field 2^61 - 1, substitution and syntactic degrees.
//! * [`poly`]: sparse polynomials and brute-force circuit expansion.
//! * [`pgc`]: generating-polynomial semantics and distribution tables.
//! * [`compiler`]: ratio substitution, Taylor shift and division elimination,
//!   turning a binary generating circuit into a set-multilinear circuit.
//! * [`marginal`]: marginals of set-multilinear circuits by one evaluation.
//! * [`smltest`]: randomized set-multilinearity testing.
//! * [`compose`]: mixture, product and hierarchical composition.
//! * [`dpp`]: formulas and branching programs as determinants with variables
//!   confined to the diagonal.
//! * [`hardness`]: matching-counting reductions and their oracles.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod circuit;
pub mod compiler;
pub mod compose;
pub mod corpus;
pub mod dpp;
pub mod field;
pub mod hardness;
pub mod identity;
pub mod marginal;
pub mod partition;
pub mod pgc;
pub mod poly;
pub mod rational;
pub mod rng;
pub mod smltest;

pub use circuit::{Assignment, Circuit, CircuitBuilder, Node, NodeId, VarId};
pub use field::Fp;
pub use partition::VariablePartition;
pub use poly::{Monomial, SparsePolynomial};
pub use rational::Rational;
