use alloc::collections::BTreeMap;

use super::{Circuit, CircuitBuilder, Node, NodeId, VarId};

pub(super) fn remap_children(node: &Node, map: &[NodeId]) -> Node {
    match node {
        Node::Sum(t) => Node::Sum(t.iter().map(|(c, w)| (map[*c], w.clone())).collect()),
        Node::Prod(f) => Node::Prod(f.iter().map(|c| map[*c]).collect()),
        Node::Div(a, b) => Node::Div(map[*a], map[*b]),
        leaf => leaf.clone(),
    }
}

pub(super) fn shift_children(node: &Node, offset: NodeId) -> Node {
    match node {
        Node::Sum(t) => Node::Sum(t.iter().map(|(c, w)| (c + offset, w.clone())).collect()),
        Node::Prod(f) => Node::Prod(f.iter().map(|c| c + offset).collect()),
        Node::Div(a, b) => Node::Div(a + offset, b + offset),
        leaf => leaf.clone(),
    }
}

impl Circuit {
    /// Replaces variables by circuits.
    ///
    /// Each replacement is grafted once, at the position of the first `Var`
    /// node it replaces, and shared by every use. The new variable table keeps
    /// the original order with each substituted variable replaced in place by
    /// the variables of its replacement.
    pub fn substitute(&self, map: &BTreeMap<VarId, Circuit>) -> Circuit {
        let mut b = CircuitBuilder::new();
        for v in self.variables() {
            match map.get(v) {
                Some(r) => r.variables().iter().for_each(|w| {
                    b.declare(w);
                }),
                None => {
                    b.declare(v);
                }
            }
        }
        let mut grafted: BTreeMap<usize, NodeId> = BTreeMap::new();
        let mut remap = alloc::vec::Vec::with_capacity(self.nodes().len());
        for node in self.nodes() {
            let id = match node {
                Node::Var(slot) => {
                    let var = &self.variables()[*slot];
                    match map.get(var) {
                        Some(replacement) => match grafted.get(slot) {
                            Some(&id) => id,
                            None => {
                                let id = b.graft(replacement);
                                grafted.insert(*slot, id);
                                id
                            }
                        },
                        None => {
                            let s = b.declare(var);
                            b.push(Node::Var(s))
                        }
                    }
                }
                other => b.push(remap_children(other, &remap)),
            };
            remap.push(id);
        }
        b.finish(remap[self.output()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Assignment;
    use crate::rational::{int, Rational};

    fn xy_plus_x() -> Circuit {
        let mut b = CircuitBuilder::new();
        let x = b.var(&VarId::new("x"));
        let y = b.var(&VarId::new("y"));
        let p = b.prod(alloc::vec![x, y]);
        let s = b.sum(alloc::vec![(p, int(1)), (x, int(1))]);
        b.finish(s)
    }

    #[test]
    fn identity_map_is_structural_identity() {
        let c = xy_plus_x();
        let map: BTreeMap<_, _> = c.variables().iter().map(|v| (v.clone(), Circuit::variable(v.clone()))).collect();
        assert_eq!(c.substitute(&map), c);
        assert_eq!(c.substitute(&BTreeMap::new()), c);
    }

    #[test]
    fn replacement_is_shared() {
        let c = xy_plus_x();
        let mut b = CircuitBuilder::new();
        let u = b.var(&VarId::new("u"));
        let w = b.var(&VarId::new("w"));
        let s = b.sum(alloc::vec![(u, int(1)), (w, int(1))]);
        let map: BTreeMap<_, _> = [(VarId::new("x"), b.finish(s))].into_iter().collect();
        let out = c.substitute(&map);
        assert_eq!(out.variables(), &[VarId::new("u"), VarId::new("w"), VarId::new("y")]);
        // three grafted nodes, y, prod, sum
        assert_eq!(out.nodes().len(), 6);
        let p = Assignment::from_pairs([(VarId::new("u"), int(2)), (VarId::new("w"), int(3)), (VarId::new("y"), int(7))]);
        assert_eq!(out.evaluate::<Rational>(&p).unwrap(), int(5 * 7 + 5));
    }
}
