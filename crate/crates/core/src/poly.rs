//! Sparse multivariate polynomials over the rationals, and brute-force
//! expansion of circuits into them. This is the ground-truth oracle the rest
//! of the crate is checked against, so it favours obviousness over speed.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::circuit::{Assignment, Circuit, Node, NodeId, VarId};
use crate::field::Scalar;
use crate::rational::{format_rational, Rational};

/// A monomial as a sorted list of `(variable, exponent)` with exponents > 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(var: VarId) -> Self {
        Monomial(alloc::vec![(var, 1)])
    }

    /// Builds from arbitrary pairs; repeated variables are merged and zero
    /// exponents dropped.
    pub fn from_pairs<I, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (V, u32)>,
        V: Into<VarId>,
    {
        let mut m: BTreeMap<VarId, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *m.entry(v.into()).or_insert(0) += e;
        }
        Monomial(m.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    /// Product of distinct-or-repeated variables, each with exponent one.
    pub fn product<I, V>(vars: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<VarId>,
    {
        Monomial::from_pairs(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, var: &VarId) -> u32 {
        self.0.iter().find(|(v, _)| v == var).map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (&self.0[i], &other.0[j]);
            match a.0.cmp(&b.0) {
                core::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    out.push((a.0.clone(), a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Map from monomials to nonzero rational coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SparsePolynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl SparsePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), value);
        p
    }

    pub fn var(var: VarId) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(var), Rational::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `coeff * monomial`, dropping the term if it cancels.
    pub fn add_term(&mut self, monomial: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(monomial) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, monomial: &Monomial) -> Rational {
        self.terms.get(monomial).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; zero for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn variables(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| v.clone())).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn add(&self, other: &SparsePolynomial) -> SparsePolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SparsePolynomial) -> SparsePolynomial {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, factor: &Rational) -> SparsePolynomial {
        if factor.is_zero() {
            return Self::zero();
        }
        SparsePolynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * factor)).collect() }
    }

    pub fn mul(&self, other: &SparsePolynomial) -> SparsePolynomial {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn evaluate<F: Scalar>(&self, point: &Assignment<F>) -> Option<F> {
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut t = F::from_rational(c)?;
            for (v, e) in &m.0 {
                let x = point.get(v)?;
                for _ in 0..*e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        Some(acc)
    }

    /// Polynomial-level substitution of variables by polynomials.
    pub fn substitute(&self, map: &BTreeMap<VarId, SparsePolynomial>) -> SparsePolynomial {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut t = SparsePolynomial::constant(c.clone());
            for (v, e) in &m.0 {
                let factor = match map.get(v) {
                    Some(p) => p.clone(),
                    None => SparsePolynomial::var(v.clone()),
                };
                for _ in 0..*e {
                    t = t.mul(&factor);
                }
            }
            out = out.add(&t);
        }
        out
    }
}

impl fmt::Debug for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if m.0.is_empty() {
                f.write_str(&format_rational(c))?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_rational(c))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExpandError {
    #[error("expansion too large: node {node} has {terms} terms (budget {budget})")]
    TooLarge { node: NodeId, terms: usize, budget: usize },
    #[error("cannot expand division node {node}")]
    Division { node: NodeId },
}

type IndexMonomial = Vec<(u32, u32)>;
type IndexPoly = BTreeMap<IndexMonomial, Rational>;

fn index_mul(a: &IndexMonomial, b: &IndexMonomial) -> IndexMonomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            core::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn accumulate(into: &mut IndexPoly, m: IndexMonomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match into.entry(m) {
        alloc::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        alloc::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Exact expansion of a division-free circuit, bottom-up over the nodes that
/// reach the output. Fails once any intermediate polynomial exceeds
/// `budget` terms.
pub fn expand(circuit: &Circuit, budget: usize) -> Result<SparsePolynomial, ExpandError> {
    let live = circuit.reachable();
    let nodes = circuit.nodes();
    // Release intermediate results after their last use.
    let mut last_use = alloc::vec![0usize; nodes.len()];
    for (i, node) in nodes.iter().enumerate() {
        for c in node.children() {
            last_use[c] = last_use[c].max(i);
        }
    }
    let mut values: Vec<Option<IndexPoly>> = alloc::vec![None; nodes.len()];
    for (i, node) in nodes.iter().enumerate() {
        if !live[i] {
            continue;
        }
        let poly: IndexPoly = match node {
            Node::Const(c) => {
                let mut p = IndexPoly::new();
                accumulate(&mut p, Vec::new(), c.clone());
                p
            }
            Node::Var(v) => {
                let mut p = IndexPoly::new();
                p.insert(alloc::vec![(*v as u32, 1)], Rational::one());
                p
            }
            Node::Sum(terms) => {
                let mut p = IndexPoly::new();
                for (c, w) in terms {
                    for (m, coeff) in values[*c].as_ref().expect("child computed") {
                        accumulate(&mut p, m.clone(), coeff * w);
                    }
                    if p.len() > budget {
                        return Err(ExpandError::TooLarge { node: i, terms: p.len(), budget });
                    }
                }
                p
            }
            Node::Prod(factors) => {
                let mut p = IndexPoly::new();
                p.insert(Vec::new(), Rational::one());
                for c in factors {
                    let child = values[*c].as_ref().expect("child computed");
                    let mut next = IndexPoly::new();
                    for (m1, c1) in &p {
                        for (m2, c2) in child {
                            accumulate(&mut next, index_mul(m1, m2), c1 * c2);
                        }
                        if next.len() > budget {
                            return Err(ExpandError::TooLarge { node: i, terms: next.len(), budget });
                        }
                    }
                    p = next;
                }
                p
            }
            Node::Div(..) => return Err(ExpandError::Division { node: i }),
        };
        if poly.len() > budget {
            return Err(ExpandError::TooLarge { node: i, terms: poly.len(), budget });
        }
        values[i] = Some(poly);
        for c in node.children() {
            if last_use[c] == i && c != circuit.output() {
                values[c] = None;
            }
        }
    }
    let vars = circuit.variables();
    let root = values[circuit.output()].take().expect("output computed");
    Ok(SparsePolynomial::from_terms(root.into_iter().map(|(m, c)| {
        (Monomial::from_pairs(m.into_iter().map(|(v, e)| (vars[v as usize].clone(), e))), c)
    })))
}

/// Renders `coefficient: monomial` lines, in canonical term order.
pub fn render_terms(poly: &SparsePolynomial) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    for (m, c) in poly.terms() {
        let _ = writeln!(out, "{} {}", format_rational(c), m);
    }
    out
}
