use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use super::{Circuit, Node, NodeId, VarId};
use crate::field::{Fp, Scalar};
use crate::rational::{format_rational, Rational};

/// A point: values for (at least) every variable of a circuit.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Assignment<F>(pub BTreeMap<VarId, F>);

impl<F: Clone> Assignment<F> {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn from_pairs<I: IntoIterator<Item = (VarId, F)>>(pairs: I) -> Self {
        Assignment(pairs.into_iter().collect())
    }

    pub fn set(&mut self, var: VarId, value: F) {
        self.0.insert(var, value);
    }

    pub fn get(&self, var: &VarId) -> Option<&F> {
        self.0.get(var)
    }

    /// Values in the order of `vars`, or the first missing variable.
    pub fn ordered(&self, vars: &[VarId]) -> Result<Vec<F>, EvalError> {
        vars.iter()
            .map(|v| self.0.get(v).cloned().ok_or_else(|| EvalError::UnmappedVariable(v.clone())))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable `{0}` has no value")]
    UnmappedVariable(VarId),
    #[error("division by zero at node {node}")]
    DivisionByZero { node: NodeId },
    #[error("constant at node {node} is not representable in the field")]
    NotRepresentable { node: NodeId },
}

/// Which field an evaluation runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Rational,
    /// Integers modulo 2^61 - 1.
    PrimeField,
}

/// Value produced by [`Circuit::evaluate_in`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldElement {
    Rational(Rational),
    Fp(Fp),
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(r) => f.write_str(&format_rational(r)),
            FieldElement::Fp(x) => write!(f, "{x} (mod 2^61-1)"),
        }
    }
}

#[derive(Clone, Debug)]
enum LoweredNode<F> {
    Const(F),
    Var(usize),
    Sum(Vec<(NodeId, F)>),
    Prod(Vec<NodeId>),
    Div(NodeId, NodeId),
}

/// A circuit whose constants have been embedded into `F` once, for repeated
/// evaluation.
#[derive(Clone, Debug)]
pub struct Lowered<F> {
    nodes: Vec<LoweredNode<F>>,
    output: NodeId,
    var_count: usize,
}

impl<F: Scalar> Lowered<F> {
    pub fn new(circuit: &Circuit) -> Result<Self, EvalError> {
        let embed = |value: &Rational, node: NodeId| F::from_rational(value).ok_or(EvalError::NotRepresentable { node });
        let mut nodes = Vec::with_capacity(circuit.nodes().len());
        for (i, node) in circuit.nodes().iter().enumerate() {
            nodes.push(match node {
                Node::Const(c) => LoweredNode::Const(embed(c, i)?),
                Node::Var(v) => LoweredNode::Var(*v),
                Node::Sum(terms) => LoweredNode::Sum(
                    terms.iter().map(|(c, w)| Ok((*c, embed(w, i)?))).collect::<Result<_, EvalError>>()?,
                ),
                Node::Prod(f) => LoweredNode::Prod(f.clone()),
                Node::Div(a, b) => LoweredNode::Div(*a, *b),
            });
        }
        Ok(Lowered { nodes, output: circuit.output(), var_count: circuit.variables().len() })
    }

    /// Values of all nodes, given values indexed like the variable table.
    pub fn evaluate_all(&self, values: &[F]) -> Result<Vec<F>, EvalError> {
        assert_eq!(values.len(), self.var_count, "one value per table variable");
        let mut out: Vec<F> = Vec::with_capacity(self.nodes.len());
        for (i, node) in self.nodes.iter().enumerate() {
            let v = match node {
                LoweredNode::Const(c) => c.clone(),
                LoweredNode::Var(v) => values[*v].clone(),
                LoweredNode::Sum(terms) => {
                    let mut acc = F::zero();
                    for (c, w) in terms {
                        acc = acc + out[*c].clone() * w.clone();
                    }
                    acc
                }
                LoweredNode::Prod(factors) => {
                    let mut acc = F::one();
                    for c in factors {
                        acc = acc * out[*c].clone();
                    }
                    acc
                }
                LoweredNode::Div(a, b) => {
                    let inv = out[*b].inverse().ok_or(EvalError::DivisionByZero { node: i })?;
                    out[*a].clone() * inv
                }
            };
            out.push(v);
        }
        Ok(out)
    }

    pub fn evaluate(&self, values: &[F]) -> Result<F, EvalError> {
        let mut all = self.evaluate_all(values)?;
        Ok(all.swap_remove(self.output))
    }
}

impl Circuit {
    /// Value of the output at `point`, in the field `F`.
    pub fn evaluate<F: Scalar>(&self, point: &Assignment<F>) -> Result<F, EvalError> {
        let values = point.ordered(self.variables())?;
        Lowered::<F>::new(self)?.evaluate(&values)
    }

    /// Evaluation with the field chosen at run time; the point is rational
    /// and is reduced modulo p for the prime field.
    pub fn evaluate_in(&self, point: &Assignment<Rational>, field: FieldKind) -> Result<FieldElement, EvalError> {
        match field {
            FieldKind::Rational => self.evaluate(point).map(FieldElement::Rational),
            FieldKind::PrimeField => {
                let mut reduced = Assignment::new();
                for (v, r) in &point.0 {
                    let x = Fp::from_rational(r).ok_or(EvalError::NotRepresentable { node: usize::MAX })?;
                    reduced.set(v.clone(), x);
                }
                self.evaluate(&reduced).map(FieldElement::Fp)
            }
        }
    }
}
