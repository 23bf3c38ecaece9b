//! Compilation of binary generating circuits into division-free,
//! set-multilinear circuits over literals `x_i`, `x̄_i`.
//!
//! Pipeline: substitute `z_i ↦ x_i / x̄_i` and multiply by `Π x̄_i`, shift
//! `x̄_i ↦ 1 - x̄_i` so every denominator has a nonzero constant term,
//! eliminate divisions by computing truncated homogeneous components, then
//! undo the shift.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::circuit::{Circuit, CircuitBuilder, EvalError, Lowered, Node, NodeId, VarId};
use crate::partition::VariablePartition;
use crate::pgc::{check_distribution, DistributionCheck, DistributionWitness, Pgc};
use crate::poly::ExpandError;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("the compiler handles binary generating circuits only")]
    NotBinary,
    #[error("bad shift point: denominator of division node {node} has zero constant term")]
    BadShiftPoint { node: NodeId },
    #[error("shift of `{0}` has zero scale")]
    DegenerateShift(VarId),
    #[error("input is not a distribution: {0}")]
    NotADistribution(DistributionWitness),
    #[error(transparent)]
    Expand(#[from] ExpandError),
}

/// `u ↦ offset + scale·u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shift {
    pub offset: Rational,
    pub scale: Rational,
}

impl Shift {
    /// `u ↦ c - u`, an involution.
    pub fn reflect(c: Rational) -> Self {
        Shift { offset: c, scale: -Rational::one() }
    }
}

/// `f(x_1/x̄_1, .., x_n/x̄_n) · x̄_1 ⋯ x̄_n`, with `x_i`, `x̄_i` named `x{i}`,
/// `xb{i}` after the position of `z_i` among the PGC's variables.
pub fn ratio_substitute(pgc: &Pgc) -> Result<Circuit, CompileError> {
    if !pgc.is_binary() {
        return Err(CompileError::NotBinary);
    }
    let n = pgc.n();
    let mut b = CircuitBuilder::new();
    for i in 1..=n {
        b.declare(&VarId::positive(i));
        b.declare(&VarId::negated(i));
    }
    let source = pgc.circuit();
    let index: BTreeMap<&VarId, usize> = pgc.variables().iter().enumerate().map(|(i, v)| (v, i + 1)).collect();
    let mut ratios: BTreeMap<usize, NodeId> = BTreeMap::new();
    let mut remap = Vec::with_capacity(source.nodes().len());
    for node in source.nodes() {
        let id = match node {
            Node::Var(slot) => {
                let i = index[&source.variables()[*slot]];
                match ratios.get(&i) {
                    Some(&id) => id,
                    None => {
                        let x = b.var(&VarId::positive(i));
                        let xb = b.var(&VarId::negated(i));
                        let id = b.div(x, xb);
                        ratios.insert(i, id);
                        id
                    }
                }
            }
            other => b.push(remap_node(other, &remap)),
        };
        remap.push(id);
    }
    let root = remap[source.output()];
    if n == 0 {
        return Ok(b.finish(root));
    }
    let mut factors = alloc::vec![root];
    factors.extend((1..=n).map(|i| b.var(&VarId::negated(i))));
    let out = b.prod(factors);
    Ok(b.finish(out))
}

fn remap_node(node: &Node, map: &[NodeId]) -> Node {
    match node {
        Node::Sum(t) => Node::Sum(t.iter().map(|(c, w)| (map[*c], w.clone())).collect()),
        Node::Prod(f) => Node::Prod(f.iter().map(|c| map[*c]).collect()),
        Node::Div(a, b) => Node::Div(map[*a], map[*b]),
        leaf => leaf.clone(),
    }
}

/// Affine change of variables. Fails if afterwards some division has a
/// denominator vanishing at the origin, since division elimination expands
/// around that point.
pub fn taylor_shift(circuit: &Circuit, shift: &BTreeMap<VarId, Shift>) -> Result<Circuit, CompileError> {
    let mut map = BTreeMap::new();
    for (var, s) in shift {
        if s.scale.is_zero() {
            return Err(CompileError::DegenerateShift(var.clone()));
        }
        if circuit.var_index(var).is_none() {
            continue;
        }
        let mut b = CircuitBuilder::new();
        let node = b.affine(s.offset.clone(), var, s.scale.clone());
        map.insert(var.clone(), b.finish(node));
    }
    let shifted = if map.is_empty() { circuit.clone() } else { circuit.substitute(&map) };
    check_shift_point(&shifted)?;
    Ok(shifted)
}

/// Errors with the first division whose denominator is zero at the origin.
pub fn check_shift_point(circuit: &Circuit) -> Result<(), CompileError> {
    if circuit.is_division_free() {
        return Ok(());
    }
    let lowered = Lowered::<Rational>::new(circuit).expect("rationals embed into themselves");
    let zeros = alloc::vec![Rational::zero(); circuit.variables().len()];
    match lowered.evaluate_all(&zeros) {
        Ok(_) => Ok(()),
        Err(EvalError::DivisionByZero { node }) => Err(CompileError::BadShiftPoint { node }),
        Err(e) => unreachable!("rational evaluation at the origin: {e}"),
    }
}

/// Truncated power series of one gate: the constant term (a number, since
/// the series is expanded at the origin) and one node per degree `1..=D`,
/// `None` for a zero component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousBundle {
    pub constant: Rational,
    pub components: Vec<Option<NodeId>>,
}

impl HomogeneousBundle {
    fn zero(bound: usize) -> Self {
        HomogeneousBundle { constant: Rational::zero(), components: alloc::vec![None; bound] }
    }

    /// Component of degree `k >= 1`.
    pub fn component(&self, k: usize) -> Option<NodeId> {
        self.components[k - 1]
    }
}

struct Eliminator {
    b: CircuitBuilder,
    bound: usize,
}

impl Eliminator {
    /// Weighted sum of components, collapsing the trivial cases.
    fn combine(&mut self, terms: Vec<(NodeId, Rational)>) -> Option<NodeId> {
        let terms: Vec<_> = terms.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        match terms.len() {
            0 => None,
            1 if terms[0].1.is_one() => Some(terms[0].0),
            _ => Some(self.b.sum(terms)),
        }
    }

    fn mul(&mut self, f: &HomogeneousBundle, g: &HomogeneousBundle) -> HomogeneousBundle {
        let mut out = HomogeneousBundle::zero(self.bound);
        out.constant = &f.constant * &g.constant;
        for k in 1..=self.bound {
            let mut terms = Vec::new();
            if let Some(gk) = g.component(k) {
                terms.push((gk, f.constant.clone()));
            }
            if let Some(fk) = f.component(k) {
                terms.push((fk, g.constant.clone()));
            }
            for i in 1..k {
                if let (Some(fi), Some(gj)) = (f.component(i), g.component(k - i)) {
                    let p = self.b.prod(alloc::vec![fi, gj]);
                    terms.push((p, Rational::one()));
                }
            }
            out.components[k - 1] = self.combine(terms);
        }
        out
    }

    /// Series inverse: `w_0 = 1/v_0`, `w_k = -(1/v_0) Σ_{i=1..k} v_i w_{k-i}`.
    fn inverse(&mut self, v: &HomogeneousBundle) -> HomogeneousBundle {
        let w0 = v.constant.recip();
        let mut w = HomogeneousBundle::zero(self.bound);
        w.constant = w0.clone();
        for k in 1..=self.bound {
            let mut terms = Vec::new();
            if let Some(vk) = v.component(k) {
                terms.push((vk, -(&w0 * &w0)));
            }
            for i in 1..k {
                if let (Some(vi), Some(wj)) = (v.component(i), w.component(k - i)) {
                    let p = self.b.prod(alloc::vec![vi, wj]);
                    terms.push((p, -w0.clone()));
                }
            }
            w.components[k - 1] = self.combine(terms);
        }
        w
    }
}

/// Division elimination by truncated power series around the origin.
///
/// The output expands to the degree-`≤ bound` truncation of the input's
/// series; if the input computes a polynomial of degree at most `bound`,
/// that polynomial exactly.
pub fn eliminate_divisions(circuit: &Circuit, bound: usize) -> Result<Circuit, CompileError> {
    let mut e = Eliminator { b: CircuitBuilder::with_variables(circuit.variables().iter().cloned()), bound };
    let live = circuit.reachable();
    let mut bundles: Vec<Option<HomogeneousBundle>> = alloc::vec![None; circuit.nodes().len()];
    for (i, node) in circuit.nodes().iter().enumerate() {
        if !live[i] {
            continue;
        }
        let get = |c: NodeId| -> &HomogeneousBundle { bundles[c].as_ref().expect("children precede parents") };
        let bundle = match node {
            Node::Const(c) => HomogeneousBundle { constant: c.clone(), ..HomogeneousBundle::zero(bound) },
            Node::Var(slot) => {
                let mut h = HomogeneousBundle::zero(bound);
                if bound >= 1 {
                    h.components[0] = Some(e.b.var(&circuit.variables()[*slot]));
                }
                h
            }
            Node::Sum(terms) => {
                let mut h = HomogeneousBundle::zero(bound);
                h.constant = terms.iter().map(|(c, w)| &get(*c).constant * w).fold(Rational::zero(), |a, b| a + b);
                for k in 1..=bound {
                    let parts: Vec<_> =
                        terms.iter().filter_map(|(c, w)| get(*c).component(k).map(|n| (n, w.clone()))).collect();
                    h.components[k - 1] = e.combine(parts);
                }
                h
            }
            Node::Prod(factors) => {
                let mut acc = HomogeneousBundle { constant: Rational::one(), ..HomogeneousBundle::zero(bound) };
                for (pos, c) in factors.iter().enumerate() {
                    acc = if pos == 0 { get(*c).clone() } else { e.mul(&acc, get(*c)) };
                }
                acc
            }
            Node::Div(num, den) => {
                let v = get(*den).clone();
                if v.constant.is_zero() {
                    return Err(CompileError::BadShiftPoint { node: i });
                }
                let u = get(*num).clone();
                let w = e.inverse(&v);
                e.mul(&u, &w)
            }
        };
        bundles[i] = Some(bundle);
    }
    let root = bundles[circuit.output()].take().expect("output is live");
    let mut terms = Vec::new();
    if !root.constant.is_zero() {
        let one = e.b.one();
        terms.push((one, root.constant.clone()));
    }
    terms.extend(root.components.iter().flatten().map(|&n| (n, Rational::one())));
    let out = match e.combine(terms) {
        Some(n) => n,
        None => e.b.zero(),
    };
    Ok(e.b.finish(out))
}

/// Result of [`compile_pgc_to_smlpc`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compiled {
    pub circuit: Circuit,
    pub partition: VariablePartition,
}

fn negation_shift(n: usize) -> BTreeMap<VarId, Shift> {
    (1..=n).map(|i| (VarId::negated(i), Shift::reflect(Rational::one()))).collect()
}

/// End-to-end compilation. The coefficient of `Π_{i∈S} x_i Π_{i∉S} x̄_i` in
/// the output equals the coefficient of `Π_{i∈S} z_i` in the input.
pub fn compile_pgc_to_smlpc(pgc: &Pgc) -> Result<Compiled, CompileError> {
    let n = pgc.n();
    let g = ratio_substitute(pgc)?;
    let shifted = taylor_shift(&g, &negation_shift(n))?;
    let eliminated = eliminate_divisions(&shifted, n)?;
    let unshifted = taylor_shift(&eliminated, &negation_shift(n))?;
    Ok(Compiled { circuit: unshifted.compact(), partition: VariablePartition::binary(n) })
}

/// [`compile_pgc_to_smlpc`] after a brute-force distribution check.
pub fn compile_checked(pgc: &Pgc, budget: usize) -> Result<Compiled, CompileError> {
    if let DistributionCheck::Invalid(w) = check_distribution(pgc, budget)? {
        return Err(CompileError::NotADistribution(w));
    }
    compile_pgc_to_smlpc(pgc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::figures;
    use crate::poly::{expand, Monomial, SparsePolynomial};
    use crate::rational::{int, ratio};

    fn lit(names: &[&str]) -> Monomial {
        Monomial::product(names.iter().copied())
    }

    #[test]
    fn section_example() {
        let c = compile_pgc_to_smlpc(&figures::example_pgc()).unwrap();
        let poly = expand(&c.circuit, 1000).unwrap();
        let expected = SparsePolynomial::from_terms([(lit(&["x1", "x2"]), ratio(3, 5)), (lit(&["x1", "xb2"]), ratio(2, 5))]);
        assert_eq!(poly, expected);
        assert!(c.circuit.is_division_free());
    }

    #[test]
    fn section_example_before_unshift() {
        let pgc = figures::example_pgc();
        let g = ratio_substitute(&pgc).unwrap();
        let shifted = taylor_shift(&g, &negation_shift(2)).unwrap();
        let eliminated = eliminate_divisions(&shifted, 2).unwrap();
        let poly = expand(&eliminated, 1000).unwrap();
        // 0.6 x1 x2 + 0.4 x1 (1 - xb2)
        let expected = SparsePolynomial::from_terms([
            (lit(&["x1", "x2"]), ratio(3, 5)),
            (lit(&["x1"]), ratio(2, 5)),
            (lit(&["x1", "xb2"]), ratio(-2, 5)),
        ]);
        assert_eq!(poly, expected);
    }

    #[test]
    fn fig3_compiles_to_fig1() {
        let c = compile_pgc_to_smlpc(&figures::fig3_pgc()).unwrap();
        let poly = expand(&c.circuit, 1000).unwrap();
        let expected = SparsePolynomial::from_terms([
            (lit(&["xb1", "xb2"]), ratio(1, 6)),
            (lit(&["x1", "xb2"]), ratio(1, 6)),
            (lit(&["xb1", "x2"]), ratio(1, 3)),
            (lit(&["x1", "x2"]), ratio(1, 3)),
        ]);
        assert_eq!(poly, expected);
    }

    #[test]
    fn constant_one() {
        for n in 0..4 {
            let pgc = Pgc::binary(Circuit::constant(int(1)), n).unwrap();
            let c = compile_pgc_to_smlpc(&pgc).unwrap();
            let poly = expand(&c.circuit, 100).unwrap();
            let m = Monomial::product((1..=n).map(VarId::negated));
            assert_eq!(poly, SparsePolynomial::from_terms([(m, int(1))]));
        }
    }

    #[test]
    fn geometric_series() {
        let mut b = CircuitBuilder::new();
        let one = b.one();
        let den = b.affine(int(1), &VarId::new("u"), int(-1));
        let d = b.div(one, den);
        let c = b.finish(d);
        let poly = expand(&eliminate_divisions(&c, 3).unwrap(), 100).unwrap();
        let u = |e: u32| Monomial::from_pairs([("u", e)]);
        let expected = SparsePolynomial::from_terms([(Monomial::one(), int(1)), (u(1), int(1)), (u(2), int(1)), (u(3), int(1))]);
        assert_eq!(poly, expected);
    }

    #[test]
    fn cancellation() {
        let mut b = CircuitBuilder::new();
        let x = b.var(&VarId::new("x"));
        let den = b.affine(int(1), &VarId::new("u"), int(-1));
        let d = b.div(x, den);
        let p = b.prod(alloc::vec![d, den]);
        let c = b.finish(p);
        let poly = expand(&eliminate_divisions(&c, 1).unwrap(), 100).unwrap();
        assert_eq!(poly, SparsePolynomial::var(VarId::new("x")));
    }

    #[test]
    fn shift_checks() {
        let mut b = CircuitBuilder::new();
        let x = b.var(&VarId::new("x"));
        let zero = b.zero();
        let d = b.div(x, zero);
        let c = b.finish(d);
        let shift = [(VarId::new("x"), Shift::reflect(int(1)))].into_iter().collect();
        assert!(matches!(taylor_shift(&c, &shift), Err(CompileError::BadShiftPoint { .. })));
        assert!(matches!(taylor_shift(&c, &BTreeMap::new()), Err(CompileError::BadShiftPoint { .. })));

        let plain = figures::fig3_pgc().circuit().clone();
        assert_eq!(taylor_shift(&plain, &BTreeMap::new()).unwrap(), plain);
    }

    #[test]
    fn shift_is_involution() {
        let c = figures::fig3_pgc().circuit().clone();
        let map: BTreeMap<_, _> = [(VarId::new("z1"), Shift::reflect(int(1))), (VarId::new("z2"), Shift::reflect(int(3)))]
            .into_iter()
            .collect();
        let twice = taylor_shift(&taylor_shift(&c, &map).unwrap(), &map).unwrap();
        assert_eq!(expand(&twice, 100).unwrap(), expand(&c, 100).unwrap());
    }

    #[test]
    fn rejects_categorical() {
        let pgc = Pgc::categorical(Circuit::constant(int(1)), 1, 3).unwrap();
        assert_eq!(compile_pgc_to_smlpc(&pgc), Err(CompileError::NotBinary));
    }
}
