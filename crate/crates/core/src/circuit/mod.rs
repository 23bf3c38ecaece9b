//! The circuit IR shared by generating circuits, probabilistic circuits and
//! the transient division circuits of the compiler.
//!
//! A [`Circuit`] is an immutable DAG stored in topological order: every child
//! index is strictly smaller than its parent's index, so the node list itself
//! witnesses acyclicity. Variables live in a per-circuit table and `Var`
//! nodes refer to table slots.

mod builder;
mod eval;
mod transform;

pub use builder::CircuitBuilder;
pub use eval::{Assignment, EvalError, FieldElement, FieldKind, Lowered};

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::rational::Rational;

/// Index of a node inside its circuit.
pub type NodeId = usize;

/// Name of a formal variable.
///
/// Names follow a few conventions that [`VarId::role`] recognizes:
/// `z{i}_{j}` is slot `j` of categorical variable `i`, `x{i}` and `xb{i}` are
/// the positive and negated literal of binary variable `i`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(Arc<str>);

/// Structured role encoded in a variable name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarRole {
    /// `z_{i,j}`
    Slot { var: usize, value: usize },
    /// `x_i`
    Positive(usize),
    /// `x̄_i`
    Negated(usize),
}

impl VarId {
    pub fn new(name: &str) -> Self {
        VarId(Arc::from(name))
    }

    pub fn slot(var: usize, value: usize) -> Self {
        VarId::new(&alloc::format!("z{var}_{value}"))
    }

    pub fn positive(var: usize) -> Self {
        VarId::new(&alloc::format!("x{var}"))
    }

    pub fn negated(var: usize) -> Self {
        VarId::new(&alloc::format!("xb{var}"))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn role(&self) -> Option<VarRole> {
        let name = self.name();
        if let Some(rest) = name.strip_prefix("xb") {
            return rest.parse().ok().map(VarRole::Negated);
        }
        if let Some(rest) = name.strip_prefix('x') {
            return rest.parse().ok().map(VarRole::Positive);
        }
        let rest = name.strip_prefix('z')?;
        let (var, value) = rest.split_once('_')?;
        Some(VarRole::Slot {
            var: var.parse().ok()?,
            value: value.parse().ok()?,
        })
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VarId {
    fn from(name: &str) -> Self {
        VarId::new(name)
    }
}

/// A circuit node. Sum edges carry weights, products are unweighted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Const(Rational),
    /// Index into the circuit's variable table.
    Var(usize),
    Sum(Vec<(NodeId, Rational)>),
    Prod(Vec<NodeId>),
    /// `numerator / denominator`
    Div(NodeId, NodeId),
}

impl Node {
    pub fn children(&self) -> impl Iterator<Item = NodeId> + '_ {
        let (slice_sum, slice_prod, div): (&[(NodeId, Rational)], &[NodeId], Option<[NodeId; 2]>) =
            match self {
                Node::Sum(c) => (c, &[], None),
                Node::Prod(c) => (&[], c, None),
                Node::Div(a, b) => (&[], &[], Some([*a, *b])),
                _ => (&[], &[], None),
            };
        slice_sum
            .iter()
            .map(|(c, _)| *c)
            .chain(slice_prod.iter().copied())
            .chain(div.into_iter().flatten())
    }

    fn edge_count(&self) -> usize {
        match self {
            Node::Const(_) | Node::Var(_) => 0,
            Node::Sum(c) => c.len(),
            Node::Prod(c) => c.len(),
            Node::Div(..) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Node::Const(_) => "const",
            Node::Var(_) => "var",
            Node::Sum(_) => "sum",
            Node::Prod(_) => "prod",
            Node::Div(..) => "div",
        }
    }
}

/// What is wrong with a node list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ForwardReference { child: NodeId },
    UnknownVariable { index: usize },
    OutputOutOfRange { output: NodeId, len: usize },
    DuplicateVariable(VarId),
    Empty,
    DivisionNode,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ForwardReference { child } => write!(f, "forward reference to node {child}"),
            Violation::UnknownVariable { index } => write!(f, "unknown variable slot {index}"),
            Violation::OutputOutOfRange { output, len } => {
                write!(f, "output index {output} out of range for {len} nodes")
            }
            Violation::DuplicateVariable(v) => write!(f, "duplicate variable `{v}`"),
            Violation::Empty => f.write_str("circuit has no nodes"),
            Violation::DivisionNode => f.write_str("division node in a circuit required to be division-free"),
        }
    }
}

/// Structural violation located at a node.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("node {node}: {violation}")]
pub struct StructuralError {
    pub node: NodeId,
    pub violation: Violation,
}

/// Summary produced by a successful validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub nodes: usize,
    pub edges: usize,
    /// `nodes + edges`
    pub size: usize,
    pub division_free: bool,
}

/// Immutable arithmetic circuit over exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    vars: Vec<VarId>,
    nodes: Vec<Node>,
    output: NodeId,
}

/// Checks a raw node list. Rationals are normalized by construction, so the
/// remaining checks are topological order, variable slots and the output.
pub fn validate(vars: &[VarId], nodes: &[Node], output: NodeId) -> Result<ValidationReport, StructuralError> {
    let mut seen = BTreeSet::new();
    for v in vars {
        if !seen.insert(v) {
            return Err(StructuralError { node: 0, violation: Violation::DuplicateVariable(v.clone()) });
        }
    }
    if nodes.is_empty() {
        return Err(StructuralError { node: 0, violation: Violation::Empty });
    }
    let mut edges = 0;
    let mut division_free = true;
    for (index, node) in nodes.iter().enumerate() {
        if let Node::Var(slot) = node {
            if *slot >= vars.len() {
                return Err(StructuralError { node: index, violation: Violation::UnknownVariable { index: *slot } });
            }
        }
        if let Some(child) = node.children().find(|&c| c >= index) {
            return Err(StructuralError { node: index, violation: Violation::ForwardReference { child } });
        }
        if matches!(node, Node::Div(..)) {
            division_free = false;
        }
        edges += node.edge_count();
    }
    if output >= nodes.len() {
        return Err(StructuralError {
            node: output,
            violation: Violation::OutputOutOfRange { output, len: nodes.len() },
        });
    }
    Ok(ValidationReport { nodes: nodes.len(), edges, size: nodes.len() + edges, division_free })
}

impl Circuit {
    /// Builds a circuit from raw parts, rejecting structural violations.
    pub fn from_parts(vars: Vec<VarId>, nodes: Vec<Node>, output: NodeId) -> Result<Self, StructuralError> {
        validate(&vars, &nodes, output)?;
        Ok(Circuit { vars, nodes, output })
    }

    /// The one-node circuit computing `value`.
    pub fn constant(value: Rational) -> Self {
        Circuit { vars: Vec::new(), nodes: alloc::vec![Node::Const(value)], output: 0 }
    }

    /// The one-node circuit computing `var`.
    pub fn variable(var: VarId) -> Self {
        Circuit { vars: alloc::vec![var], nodes: alloc::vec![Node::Var(0)], output: 0 }
    }

    pub fn variables(&self) -> &[VarId] {
        &self.vars
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn output(&self) -> NodeId {
        self.output
    }

    pub fn var_index(&self, var: &VarId) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    pub fn report(&self) -> ValidationReport {
        validate(&self.vars, &self.nodes, self.output).expect("circuits are valid by construction")
    }

    /// Nodes plus edges.
    pub fn size(&self) -> usize {
        self.report().size
    }

    pub fn is_division_free(&self) -> bool {
        !self.nodes.iter().any(|n| matches!(n, Node::Div(..)))
    }

    /// Error naming the first division node, if any.
    pub fn require_division_free(&self) -> Result<(), StructuralError> {
        match self.nodes.iter().position(|n| matches!(n, Node::Div(..))) {
            Some(node) => Err(StructuralError { node, violation: Violation::DivisionNode }),
            None => Ok(()),
        }
    }

    /// Per-node syntactic degree: constants 0, variables 1, sums take the
    /// maximum, products the sum, divisions the maximum of both sides.
    pub fn syntactic_degrees(&self) -> Vec<usize> {
        let mut deg: Vec<usize> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let d = match node {
                Node::Const(_) => 0,
                Node::Var(_) => 1,
                Node::Sum(c) => c.iter().map(|(i, _)| deg[*i]).max().unwrap_or(0),
                Node::Prod(c) => c.iter().map(|i| deg[*i]).sum(),
                Node::Div(a, b) => deg[*a].max(deg[*b]),
            };
            deg.push(d);
        }
        deg
    }

    /// Upper bound on the degree of the computed polynomial.
    pub fn syntactic_degree(&self) -> usize {
        self.syntactic_degrees()[self.output]
    }

    /// Nodes reachable from the output.
    pub fn reachable(&self) -> Vec<bool> {
        let mut live = alloc::vec![false; self.nodes.len()];
        live[self.output] = true;
        for i in (0..self.nodes.len()).rev() {
            if live[i] {
                for c in self.nodes[i].children() {
                    live[c] = true;
                }
            }
        }
        live
    }

    /// Copy with unreachable nodes removed; the variable table is kept.
    pub fn compact(&self) -> Circuit {
        let live = self.reachable();
        let mut remap = alloc::vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if !live[i] {
                continue;
            }
            remap[i] = nodes.len();
            nodes.push(transform::remap_children(node, &remap));
        }
        Circuit { vars: self.vars.clone(), output: remap[self.output], nodes }
    }

    /// Short human-readable listing, one node per line.
    pub fn describe(&self) -> String {
        use core::fmt::Write;
        let mut out = String::new();
        for (i, node) in self.nodes.iter().enumerate() {
            let _ = write!(out, "{i}: {}", node.kind());
            match node {
                Node::Const(c) => {
                    let _ = write!(out, " {}", crate::rational::format_rational(c));
                }
                Node::Var(v) => {
                    let _ = write!(out, " {}", self.vars[*v]);
                }
                _ => {
                    let children: Vec<_> = node.children().collect();
                    let _ = write!(out, " {children:?}");
                }
            }
            out.push('\n');
        }
        let _ = write!(out, "output: {}", self.output);
        out
    }
}
