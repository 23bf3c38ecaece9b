use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{exact_determinant, AffineForm, DppError, DppRepresentation, Formula, Label};
use crate::circuit::{Assignment, VarId};
use crate::poly::SparsePolynomial;
use crate::rational::Rational;
use crate::rng;

/// Weighted digraph with distinguished source and sink. Edge weights are
/// constants; variables occur only as self-loop labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StGadget {
    size: usize,
    edges: BTreeMap<(usize, usize), Rational>,
    loops: BTreeMap<usize, Label>,
    s: usize,
    t: usize,
}

impl StGadget {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn source(&self) -> usize {
        self.s
    }

    pub fn sink(&self) -> usize {
        self.t
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.edges
    }

    pub fn loops(&self) -> &BTreeMap<usize, Label> {
        &self.loops
    }

    /// Overwrites an off-diagonal edge weight (zero removes it).
    pub fn set_edge(&mut self, from: usize, to: usize, weight: Rational) {
        assert!(from != to && from < self.size && to < self.size);
        if weight.is_zero() {
            self.edges.remove(&(from, to));
        } else {
            self.edges.insert((from, to), weight);
        }
    }

    /// Overwrites a self-loop label.
    pub fn set_loop(&mut self, node: usize, label: Label) {
        assert!(node < self.size);
        self.loops.insert(node, label);
    }

    fn variables(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self
            .loops
            .values()
            .filter_map(|l| match l {
                Label::Var(v) => Some(v.clone()),
                Label::Const(_) => None,
            })
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Numeric adjacency matrix at a point, with or without the `(t, s)`
    /// back edge.
    fn matrix_at(&self, point: &Assignment<Rational>, closed: bool) -> Vec<Vec<Rational>> {
        let mut m = alloc::vec![alloc::vec![Rational::zero(); self.size]; self.size];
        for ((i, j), w) in &self.edges {
            m[*i][*j] = w.clone();
        }
        for (k, l) in &self.loops {
            m[*k][*k] = match l {
                Label::Const(c) => c.clone(),
                Label::Var(v) => point.get(v).cloned().expect("point covers the loop variables"),
            };
        }
        if closed {
            m[self.t][self.s] += Rational::one();
        }
        m
    }

    /// The closed matrix as a determinantal representation.
    pub fn close(&self) -> DppRepresentation {
        let mut kernel = alloc::vec![alloc::vec![Rational::zero(); self.size]; self.size];
        for ((i, j), w) in &self.edges {
            kernel[*i][*j] = w.clone();
        }
        kernel[self.t][self.s] += Rational::one();
        let mut projection = BTreeMap::new();
        for (k, l) in &self.loops {
            match l {
                Label::Const(c) => kernel[*k][*k] = c.clone(),
                Label::Var(v) => {
                    projection.insert(*k, AffineForm::var(v.clone()));
                }
            }
        }
        DppRepresentation::new(kernel, projection).expect("square by construction")
    }
}

/// The five-node gadget with nodes `(s, 2, 3, 4, t)`: edges `s→2`, `2→3`,
/// `2→t`, `3→4`, `4→2`, loop `v` on node 3 and loop `1` on node 4.
pub fn base_gadget(v: Label) -> StGadget {
    let one = Rational::one;
    let edges = [((0, 1), one()), ((1, 2), one()), ((1, 4), one()), ((2, 3), one()), ((3, 1), one())]
        .into_iter()
        .collect();
    let loops = [(2, v), (3, Label::Const(one()))].into_iter().collect();
    StGadget { size: 5, edges, loops, s: 0, t: 4 }
}

/// Identifies the sources and the sinks of the two gadgets.
pub fn add_gadgets(g1: &StGadget, g2: &StGadget) -> StGadget {
    let mut map = alloc::vec![usize::MAX; g2.size];
    let mut next = g1.size;
    for (i, slot) in map.iter_mut().enumerate() {
        *slot = if i == g2.s {
            g1.s
        } else if i == g2.t {
            g1.t
        } else {
            next += 1;
            next - 1
        };
    }
    let mut out = g1.clone();
    out.size = next;
    for ((i, j), w) in &g2.edges {
        *out.edges.entry((map[*i], map[*j])).or_insert_with(Rational::zero) += w;
    }
    for (k, l) in &g2.loops {
        out.loops.insert(map[*k], l.clone());
    }
    out
}

/// Chains the gadgets through a new node `z` and the 3-cycle
/// `t1 → z → s2 → t1`; the result runs from `s1` to `t2`.
pub fn mul_gadgets(g1: &StGadget, g2: &StGadget) -> StGadget {
    let offset = g1.size;
    let z = g1.size + g2.size;
    let mut out = g1.clone();
    out.size = z + 1;
    for ((i, j), w) in &g2.edges {
        out.edges.insert((i + offset, j + offset), w.clone());
    }
    for (k, l) in &g2.loops {
        out.loops.insert(k + offset, l.clone());
    }
    let s2 = g2.s + offset;
    out.edges.insert((g1.t, z), Rational::one());
    out.edges.insert((z, s2), Rational::one());
    out.edges.insert((s2, g1.t), Rational::one());
    out.t = g2.t + offset;
    out
}

/// Gadget for a formula by structural induction.
pub fn formula_to_gadget(formula: &Formula) -> StGadget {
    match formula {
        Formula::Const(c) => base_gadget(Label::Const(c.clone())),
        Formula::Var(v) => base_gadget(Label::Var(v.clone())),
        Formula::Add(a, b) => add_gadgets(&formula_to_gadget(a), &formula_to_gadget(b)),
        Formula::Mul(a, b) => mul_gadgets(&formula_to_gadget(a), &formula_to_gadget(b)),
    }
}

/// Closed gadget of a formula; its projected determinant is the formula.
pub fn formula_to_dpp(formula: &Formula) -> DppRepresentation {
    formula_to_gadget(formula).close()
}

/// The determinant conditions a gadget must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetCondition {
    /// `det(G \ {s, t}) = 1`
    WithoutSourceAndSink,
    /// `det(G \ {s}) = 0`
    WithoutSource,
    /// `det(G \ {t}) = 0`
    WithoutSink,
    /// closed determinant equals the expected polynomial
    Closed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetReport {
    /// Sub-determinants `(G\{s,t}, G\{s}, G\{t})` at the first point.
    pub values: (Rational, Rational, Rational),
    /// First failed condition, with the offending value and point index.
    pub failure: Option<(GadgetCondition, Rational, usize)>,
    pub points: usize,
}

impl GadgetReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn without(m: &[Vec<Rational>], drop: &[usize]) -> Vec<Vec<Rational>> {
    let keep: Vec<usize> = (0..m.len()).filter(|i| !drop.contains(i)).collect();
    keep.iter().map(|&i| keep.iter().map(|&j| m[i][j].clone()).collect()).collect()
}

const GADGET_TAG: u64 = 0x9a;

/// Checks the three sub-determinant conditions, and optionally the closed
/// determinant against `expected`, at `points` seeded random rational
/// points.
pub fn verify_gadget(
    g: &StGadget,
    expected: Option<&SparsePolynomial>,
    points: usize,
    seed: u64,
) -> Result<GadgetReport, DppError> {
    let vars = g.variables();
    let mut report = GadgetReport { values: Default::default(), failure: None, points };
    for p in 0..points.max(1) {
        let mut r = rng::stream(seed, rng::stream_id(GADGET_TAG, &[p as u64]));
        let mut point: Assignment<Rational> =
            Assignment::from_pairs(vars.iter().map(|v| (v.clone(), rng::small_rational(&mut r, 20))));
        if let Some(e) = expected {
            for v in e.variables() {
                if point.get(&v).is_none() {
                    point.set(v, rng::small_rational(&mut r, 20));
                }
            }
        }
        let open = g.matrix_at(&point, false);
        let st = exact_determinant(&without(&open, &[g.s, g.t]))?;
        let s = exact_determinant(&without(&open, &[g.s]))?;
        let t = exact_determinant(&without(&open, &[g.t]))?;
        if p == 0 {
            report.values = (st.clone(), s.clone(), t.clone());
        }
        let failure = if !st.is_one() {
            Some((GadgetCondition::WithoutSourceAndSink, st))
        } else if !s.is_zero() {
            Some((GadgetCondition::WithoutSource, s))
        } else if !t.is_zero() {
            Some((GadgetCondition::WithoutSink, t))
        } else if let Some(e) = expected {
            let closed = exact_determinant(&g.matrix_at(&point, true))?;
            let want = e.evaluate(&point).expect("point covers the expected polynomial");
            (closed != want).then_some((GadgetCondition::Closed, closed))
        } else {
            None
        };
        if let Some((c, v)) = failure {
            report.failure = Some((c, v, p));
            break;
        }
    }
    Ok(report)
}
