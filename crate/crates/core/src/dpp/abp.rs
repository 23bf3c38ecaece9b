use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{AffineForm, DppRepresentation, Label};
use crate::circuit::{Assignment, VarId};
use crate::poly::SparsePolynomial;
use crate::rational::Rational;

/// Edge from node `from` of layer `layer` to node `to` of layer `layer + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbpEdge {
    pub layer: usize,
    pub from: usize,
    pub to: usize,
    pub label: Label,
}

/// Layered algebraic branching program. Layer 0 holds only the source and
/// the last layer only the sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abp {
    layers: Vec<usize>,
    edges: Vec<AbpEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AbpError {
    #[error("need at least a source and a sink layer, each of size one")]
    Shape,
    #[error("edge {0} points outside its layers")]
    Edge(usize),
}

/// Entry `(i, j)` of the `k`-th matrix of an iterated matrix product.
pub fn imm_variable(k: usize, i: usize, j: usize) -> VarId {
    VarId::new(&alloc::format!("x{k}_{i}_{j}"))
}

impl Abp {
    pub fn new(layers: Vec<usize>, edges: Vec<AbpEdge>) -> Result<Self, AbpError> {
        if layers.len() < 2 || layers[0] != 1 || *layers.last().expect("nonempty") != 1 || layers.contains(&0) {
            return Err(AbpError::Shape);
        }
        for (k, e) in edges.iter().enumerate() {
            if e.layer + 1 >= layers.len() || e.from >= layers[e.layer] || e.to >= layers[e.layer + 1] {
                return Err(AbpError::Edge(k));
            }
        }
        Ok(Abp { layers, edges })
    }

    /// `IMM_{n,d}`: entry `(1,1)` of the product of `d` symbolic `n×n`
    /// matrices.
    pub fn imm(n: usize, d: usize) -> Self {
        assert!(n >= 1 && d >= 1);
        let mut layers = alloc::vec![1];
        layers.extend(core::iter::repeat(n).take(d - 1));
        layers.push(1);
        let mut edges = Vec::new();
        for k in 0..d {
            for from in 0..layers[k] {
                for to in 0..layers[k + 1] {
                    // Row/column 1 is the only one present at the ends.
                    edges.push(AbpEdge { layer: k, from, to, label: Label::Var(imm_variable(k + 1, from + 1, to + 1)) });
                }
            }
        }
        Abp { layers, edges }
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn edges(&self) -> &[AbpEdge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.layers.iter().sum()
    }

    fn offset(&self, layer: usize) -> usize {
        self.layers[..layer].iter().sum()
    }

    /// Global index of node `i` of `layer`.
    pub fn node(&self, layer: usize, i: usize) -> usize {
        self.offset(layer) + i
    }

    /// Sum over source-sink paths of the product of labels.
    pub fn polynomial(&self) -> SparsePolynomial {
        let mut value = alloc::vec![SparsePolynomial::zero(); self.node_count()];
        value[0] = SparsePolynomial::constant(Rational::one());
        for layer in 0..self.layers.len() - 1 {
            for e in self.edges.iter().filter(|e| e.layer == layer) {
                let (u, v) = (self.node(layer, e.from), self.node(layer + 1, e.to));
                let add = value[u].mul(&e.label.to_polynomial());
                value[v] = value[v].add(&add);
            }
        }
        value.pop().expect("sink exists")
    }

    pub fn evaluate(&self, point: &Assignment<Rational>) -> Option<Rational> {
        let mut value = alloc::vec![Rational::zero(); self.node_count()];
        value[0] = Rational::one();
        for layer in 0..self.layers.len() - 1 {
            for e in self.edges.iter().filter(|e| e.layer == layer) {
                let w = match &e.label {
                    Label::Const(c) => c.clone(),
                    Label::Var(v) => point.get(v)?.clone(),
                };
                let (u, v) = (self.node(layer, e.from), self.node(layer + 1, e.to));
                let add = &value[u] * w;
                value[v] += add;
            }
        }
        value.pop()
    }
}

/// Determinantal representation of an ABP. Nodes: the ABP nodes, then per
/// edge `e` the triple `n_e, n_e', n_e''` (path node, loop `w_e`, loop 1),
/// then per internal node `u` the pair `u', u''` (loops 1), with 3-cycles
/// `n_e → n_e' → n_e'' → n_e` and `u → u' → u'' → u`, path edges
/// `u → n_e → v`, and the back edge from sink to source.
pub fn abp_to_dpp(abp: &Abp) -> DppRepresentation {
    let v = abp.node_count();
    let internal = v - 2;
    let size = v + 3 * abp.edges.len() + 2 * internal;
    let mut k = alloc::vec![alloc::vec![Rational::zero(); size]; size];
    let mut projection = BTreeMap::new();
    let one = Rational::one;
    let (source, sink) = (0, v - 1);
    k[sink][source] = one();
    let triangle = |k: &mut Vec<Vec<Rational>>, a: usize, b: usize, c: usize| {
        k[a][b] = one();
        k[b][c] = one();
        k[c][a] = one();
    };
    for (idx, e) in abp.edges.iter().enumerate() {
        let ne = v + 3 * idx;
        let (from, to) = (abp.node(e.layer, e.from), abp.node(e.layer + 1, e.to));
        k[from][ne] = one();
        k[ne][to] = one();
        triangle(&mut k, ne, ne + 1, ne + 2);
        match &e.label {
            Label::Const(c) => k[ne + 1][ne + 1] = c.clone(),
            Label::Var(x) => {
                projection.insert(ne + 1, AffineForm::var(x.clone()));
            }
        }
        k[ne + 2][ne + 2] = one();
    }
    let aux = v + 3 * abp.edges.len();
    for u in 1..=internal {
        let a = aux + 2 * (u - 1);
        triangle(&mut k, u, a, a + 1);
        k[a][a] = one();
        k[a + 1][a + 1] = one();
    }
    DppRepresentation::new(k, projection).expect("square by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpp::cycle_covers;
    use crate::poly::Monomial;
    use crate::rational::int;

    #[test]
    fn imm_2_3_at_ones() {
        let abp = Abp::imm(2, 3);
        let rep = abp_to_dpp(&abp);
        assert_eq!(rep.size(), 6 + 3 * 8 + 2 * 4);
        let ones = Assignment::from_pairs(
            abp.edges().iter().filter_map(|e| match &e.label {
                Label::Var(x) => Some((x.clone(), int(1))),
                Label::Const(_) => None,
            }),
        );
        assert_eq!(abp.evaluate(&ones), Some(int(4)));
        assert_eq!(rep.evaluate(&ones).unwrap(), int(4));
    }

    #[test]
    fn imm_2_2_symbolic() {
        let rep = abp_to_dpp(&Abp::imm(2, 2));
        let m = |a: (usize, usize, usize), b: (usize, usize, usize)| {
            Monomial::product([imm_variable(a.0, a.1, a.2), imm_variable(b.0, b.1, b.2)])
        };
        let expected = SparsePolynomial::from_terms([(m((1, 1, 1), (2, 1, 1)), int(1)), (m((1, 1, 2), (2, 2, 1)), int(1))]);
        assert_eq!(rep.polynomial().unwrap(), expected);
    }

    #[test]
    fn single_edge_and_signs() {
        let x = VarId::new("x");
        let abp = Abp::new(alloc::vec![1, 1], alloc::vec![AbpEdge { layer: 0, from: 0, to: 0, label: Label::Var(x.clone()) }])
            .unwrap();
        let rep = abp_to_dpp(&abp);
        assert_eq!(rep.size(), 5);
        assert_eq!(rep.polynomial_by_cofactors().unwrap(), SparsePolynomial::var(x));
        let covers = cycle_covers(&rep.symbolic_matrix()).unwrap();
        assert!(covers.iter().all(|c| c.sign == 1));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert_eq!(Abp::new(alloc::vec![2, 1], Vec::new()), Err(AbpError::Shape));
        let e = AbpEdge { layer: 0, from: 0, to: 1, label: Label::constant(1) };
        assert_eq!(Abp::new(alloc::vec![1, 1], alloc::vec![e]), Err(AbpError::Edge(0)));
    }
}
