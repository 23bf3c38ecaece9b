use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{Circuit, Node, NodeId, VarId};
use crate::rational::Rational;

/// Incremental construction of a [`Circuit`].
///
/// Node ids handed out by the builder are always smaller than the ids of
/// nodes created later, so anything assembled through it is topologically
/// ordered. `var` and `constant` reuse existing leaves; `push` does not.
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder {
    vars: Vec<VarId>,
    var_slots: BTreeMap<VarId, usize>,
    nodes: Vec<Node>,
    var_nodes: BTreeMap<usize, NodeId>,
    constants: BTreeMap<Rational, NodeId>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts with a fixed variable table (order preserved).
    pub fn with_variables<I: IntoIterator<Item = VarId>>(vars: I) -> Self {
        let mut b = Self::new();
        for v in vars {
            b.declare(&v);
        }
        b
    }

    /// Table slot for `var`, adding it if needed.
    pub fn declare(&mut self, var: &VarId) -> usize {
        if let Some(&slot) = self.var_slots.get(var) {
            return slot;
        }
        let slot = self.vars.len();
        self.vars.push(var.clone());
        self.var_slots.insert(var.clone(), slot);
        slot
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    /// Appends a node verbatim. Children must already exist.
    pub fn push(&mut self, node: Node) -> NodeId {
        let id = self.nodes.len();
        debug_assert!(node.children().all(|c| c < id), "child must precede parent");
        if let Node::Var(slot) = &node {
            debug_assert!(*slot < self.vars.len());
            self.var_nodes.entry(*slot).or_insert(id);
        }
        self.nodes.push(node);
        id
    }

    pub fn var(&mut self, var: &VarId) -> NodeId {
        let slot = self.declare(var);
        if let Some(&id) = self.var_nodes.get(&slot) {
            return id;
        }
        self.push(Node::Var(slot))
    }

    pub fn constant(&mut self, value: Rational) -> NodeId {
        if let Some(&id) = self.constants.get(&value) {
            return id;
        }
        let id = self.push(Node::Const(value.clone()));
        self.constants.insert(value, id);
        id
    }

    pub fn zero(&mut self) -> NodeId {
        self.constant(Rational::zero())
    }

    pub fn one(&mut self) -> NodeId {
        self.constant(Rational::one())
    }

    pub fn sum(&mut self, terms: Vec<(NodeId, Rational)>) -> NodeId {
        self.push(Node::Sum(terms))
    }

    pub fn prod(&mut self, factors: Vec<NodeId>) -> NodeId {
        self.push(Node::Prod(factors))
    }

    pub fn div(&mut self, numerator: NodeId, denominator: NodeId) -> NodeId {
        self.push(Node::Div(numerator, denominator))
    }

    /// `c + sign * var` as a two-term sum.
    pub fn affine(&mut self, constant: Rational, var: &VarId, coefficient: Rational) -> NodeId {
        let c = self.one();
        let v = self.var(var);
        self.sum(alloc::vec![(c, constant), (v, coefficient)])
    }

    /// Copies every node of `circuit` (structure preserved, variables merged
    /// by name) and returns the id of its output.
    pub fn graft(&mut self, circuit: &Circuit) -> NodeId {
        let slots: Vec<usize> = circuit.variables().iter().map(|v| self.declare(v)).collect();
        let offset = self.nodes.len();
        for node in circuit.nodes() {
            let copied = match node {
                Node::Var(v) => Node::Var(slots[*v]),
                other => super::transform::shift_children(other, offset),
            };
            self.push(copied);
        }
        offset + circuit.output()
    }

    pub fn finish(self, output: NodeId) -> Circuit {
        Circuit::from_parts(self.vars, self.nodes, output).expect("builder output is topologically ordered")
    }
}
