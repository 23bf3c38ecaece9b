//! Probabilistic generating circuits: a circuit whose polynomial has
//! coefficient `Pr[X = (j_1..j_n)]` at the monomial `z_1^{j_1}..z_n^{j_n}`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::circuit::{Assignment, Circuit, CircuitBuilder, EvalError, Node, VarId};
use crate::partition::VariablePartition;
use crate::poly::{expand, ExpandError, Monomial, SparsePolynomial};
use crate::rational::{format_rational, Rational};

/// Name of the generating variable of random variable `i` (1-based).
pub fn pgc_var(i: usize) -> VarId {
    VarId::new(&alloc::format!("z{i}"))
}

/// A generating circuit plus the random variables it speaks about. Whether
/// it really encodes a distribution is only decided by [`check_distribution`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pgc {
    circuit: Circuit,
    vars: Vec<VarId>,
    /// Exponent cap per variable: values range over `0..arity`.
    arities: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PgcError {
    #[error("generating circuits must be division-free")]
    Division,
    #[error("circuit variable `{0}` is not a declared random variable")]
    Undeclared(VarId),
    #[error("variable `{0}` declared twice")]
    Duplicate(VarId),
    #[error("arity must be at least 2, got {0}")]
    Arity(u32),
    #[error("polynomial sums to zero at the all-ones point and cannot be normalized")]
    ZeroMass,
}

impl Pgc {
    pub fn new(circuit: Circuit, vars: Vec<VarId>, arities: Vec<u32>) -> Result<Self, PgcError> {
        assert_eq!(vars.len(), arities.len(), "one arity per variable");
        if !circuit.is_division_free() {
            return Err(PgcError::Division);
        }
        if let Some(&a) = arities.iter().find(|&&a| a < 2) {
            return Err(PgcError::Arity(a));
        }
        let declared: BTreeSet<&VarId> = vars.iter().collect();
        if declared.len() != vars.len() {
            let mut seen = BTreeSet::new();
            let dup = vars.iter().find(|v| !seen.insert(*v)).expect("a duplicate exists");
            return Err(PgcError::Duplicate(dup.clone()));
        }
        if let Some(v) = circuit.variables().iter().find(|v| !declared.contains(v)) {
            return Err(PgcError::Undeclared(v.clone()));
        }
        Ok(Pgc { circuit, vars, arities })
    }

    /// Binary PGC over `z1..zn`.
    pub fn binary(circuit: Circuit, n: usize) -> Result<Self, PgcError> {
        Pgc::new(circuit, (1..=n).map(pgc_var).collect(), alloc::vec![2; n])
    }

    /// Uniform arity `d` over `z1..zn`.
    pub fn categorical(circuit: Circuit, n: usize, d: u32) -> Result<Self, PgcError> {
        Pgc::new(circuit, (1..=n).map(pgc_var).collect(), alloc::vec![d; n])
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn variables(&self) -> &[VarId] {
        &self.vars
    }

    pub fn arities(&self) -> &[u32] {
        &self.arities
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    /// Largest arity; the `d` of the table.
    pub fn arity(&self) -> u32 {
        self.arities.iter().copied().max().unwrap_or(2)
    }

    pub fn is_binary(&self) -> bool {
        self.arities.iter().all(|&a| a == 2)
    }

    /// Value at `z = (1, .., 1)`.
    pub fn total_mass(&self) -> Result<Rational, EvalError> {
        let ones = Assignment::from_pairs(self.circuit.variables().iter().map(|v| (v.clone(), Rational::one())));
        self.circuit.evaluate(&ones)
    }

    /// Scales the circuit by `1 / f(1, .., 1)` with a single top sum and
    /// returns the scale that was divided out.
    pub fn normalize(&self) -> Result<(Pgc, Rational), PgcError> {
        let mass = self.total_mass().expect("division-free circuits evaluate everywhere");
        if mass.is_zero() {
            return Err(PgcError::ZeroMass);
        }
        let mut b = CircuitBuilder::with_variables(self.circuit.variables().iter().cloned());
        let root = b.graft(&self.circuit);
        let top = b.sum(alloc::vec![(root, mass.recip())]);
        let pgc = Pgc { circuit: b.finish(top), vars: self.vars.clone(), arities: self.arities.clone() };
        Ok((pgc, mass))
    }
}

/// A joint distribution on `{0..d-1}^n`, stored sparsely (zeros omitted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionTable {
    n: usize,
    arity: u32,
    entries: BTreeMap<Vec<u32>, Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("tuple {0:?} has the wrong length or a value out of range")]
    BadTuple(Vec<u32>),
    #[error("negative probability {1} at {0:?}")]
    Negative(Vec<u32>, String),
    #[error("probabilities sum to {0}, not 1")]
    Total(String),
    #[error("tuple {0:?} listed twice")]
    Duplicate(Vec<u32>),
}

impl DistributionTable {
    pub fn new<I>(n: usize, arity: u32, entries: I) -> Result<Self, TableError>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut map = BTreeMap::new();
        let mut total = Rational::zero();
        for (t, p) in entries {
            if t.len() != n || t.iter().any(|&j| j >= arity) {
                return Err(TableError::BadTuple(t));
            }
            if p.is_negative() {
                return Err(TableError::Negative(t, format_rational(&p)));
            }
            total += &p;
            if map.contains_key(&t) {
                return Err(TableError::Duplicate(t));
            }
            if !p.is_zero() {
                map.insert(t, p);
            }
        }
        if !total.is_one() {
            return Err(TableError::Total(format_rational(&total)));
        }
        Ok(DistributionTable { n, arity, entries: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    /// Nonzero entries in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.entries.iter()
    }

    pub fn probability(&self, tuple: &[u32]) -> Rational {
        self.entries.get(tuple).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }
}

/// Why a circuit does not encode a distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistributionWitness {
    ExponentTooLarge { monomial: Monomial, var: VarId, exponent: u32, arity: u32 },
    NegativeCoefficient { monomial: Monomial, coefficient: Rational },
    Total(Rational),
    /// Set-multilinear variant: a monomial that does not pick exactly one
    /// variable of `part` with exponent one.
    NotSetMultilinear { monomial: Monomial, part: usize },
}

impl core::fmt::Display for DistributionWitness {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DistributionWitness::ExponentTooLarge { monomial, var, exponent, arity } => {
                write!(f, "monomial {monomial}: exponent {exponent} of {var} exceeds arity {arity}")
            }
            DistributionWitness::NegativeCoefficient { monomial, coefficient } => {
                write!(f, "monomial {monomial}: negative coefficient {}", format_rational(coefficient))
            }
            DistributionWitness::Total(t) => write!(f, "coefficients sum to {}", format_rational(t)),
            DistributionWitness::NotSetMultilinear { monomial, part } => {
                write!(f, "monomial {monomial} is not set-multilinear at part {}", part + 1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistributionCheck {
    Valid(DistributionTable),
    Invalid(DistributionWitness),
}

impl DistributionCheck {
    pub fn table(self) -> Option<DistributionTable> {
        match self {
            DistributionCheck::Valid(t) => Some(t),
            DistributionCheck::Invalid(_) => None,
        }
    }
}

/// Brute-force distribution check by full expansion. Exponential in general.
pub fn check_distribution(pgc: &Pgc, budget: usize) -> Result<DistributionCheck, ExpandError> {
    let poly = expand(pgc.circuit(), budget)?;
    let position: BTreeMap<&VarId, usize> = pgc.vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut entries = Vec::with_capacity(poly.len());
    let mut total = Rational::zero();
    for (m, c) in poly.terms() {
        let mut tuple = alloc::vec![0u32; pgc.n()];
        for (v, e) in m.factors() {
            let i = position[v];
            if *e >= pgc.arities[i] {
                return Ok(DistributionCheck::Invalid(DistributionWitness::ExponentTooLarge {
                    monomial: m.clone(),
                    var: v.clone(),
                    exponent: *e,
                    arity: pgc.arities[i],
                }));
            }
            tuple[i] = *e;
        }
        if c.is_negative() {
            return Ok(DistributionCheck::Invalid(DistributionWitness::NegativeCoefficient {
                monomial: m.clone(),
                coefficient: c.clone(),
            }));
        }
        total += c;
        entries.push((tuple, c.clone()));
    }
    if !total.is_one() {
        return Ok(DistributionCheck::Invalid(DistributionWitness::Total(total)));
    }
    let table = DistributionTable::new(pgc.n(), pgc.arity(), entries).expect("checked above");
    Ok(DistributionCheck::Valid(table))
}

/// Distribution check for a circuit that is meant to be a set-multilinear
/// probabilistic circuit: every monomial must pick exactly one variable per
/// part (its position being the value), coefficients must be nonnegative and
/// sum to one.
pub fn check_sml_distribution(
    circuit: &Circuit,
    partition: &VariablePartition,
    budget: usize,
) -> Result<DistributionCheck, ExpandError> {
    let poly = expand(circuit, budget)?;
    check_sml_polynomial(&poly, partition)
}

/// [`check_sml_distribution`] on an already expanded polynomial.
pub fn check_sml_polynomial(
    poly: &SparsePolynomial,
    partition: &VariablePartition,
) -> Result<DistributionCheck, ExpandError> {
    let arity = partition.parts().iter().map(|p| p.len() as u32).max().unwrap_or(1).max(1);
    let mut entries = Vec::with_capacity(poly.len());
    let mut total = Rational::zero();
    for (m, c) in poly.terms() {
        let mut tuple: Vec<Option<u32>> = alloc::vec![None; partition.len()];
        for (v, e) in m.factors() {
            let Some((part, pos)) = partition.locate(v) else {
                return Ok(DistributionCheck::Invalid(DistributionWitness::NotSetMultilinear {
                    monomial: m.clone(),
                    part: partition.len(),
                }));
            };
            if *e != 1 || tuple[part].is_some() {
                return Ok(DistributionCheck::Invalid(DistributionWitness::NotSetMultilinear {
                    monomial: m.clone(),
                    part,
                }));
            }
            tuple[part] = Some(pos as u32);
        }
        if let Some(part) = tuple.iter().position(Option::is_none) {
            return Ok(DistributionCheck::Invalid(DistributionWitness::NotSetMultilinear {
                monomial: m.clone(),
                part,
            }));
        }
        if c.is_negative() {
            return Ok(DistributionCheck::Invalid(DistributionWitness::NegativeCoefficient {
                monomial: m.clone(),
                coefficient: c.clone(),
            }));
        }
        total += c;
        entries.push((tuple.into_iter().map(|j| j.expect("filled")).collect(), c.clone()));
    }
    if !total.is_one() {
        return Ok(DistributionCheck::Invalid(DistributionWitness::Total(total)));
    }
    Ok(DistributionCheck::Valid(DistributionTable::new(partition.len(), arity, entries).expect("checked above")))
}

/// Dense sum-of-products generating circuit of a table, over `z1..zn`.
pub fn table_to_pgc(table: &DistributionTable) -> Pgc {
    let n = table.n();
    let mut b = CircuitBuilder::with_variables((1..=n).map(pgc_var));
    let mut terms = Vec::with_capacity(table.support_size());
    for (tuple, p) in table.entries() {
        let factors: Vec<_> = tuple
            .iter()
            .enumerate()
            .flat_map(|(i, &j)| core::iter::repeat(i + 1).take(j as usize))
            .map(|i| pgc_var(i))
            .collect();
        let node = match factors.len() {
            0 => b.one(),
            1 => b.var(&factors[0]),
            _ => {
                let ids = factors.iter().map(|v| b.var(v)).collect();
                b.prod(ids)
            }
        };
        terms.push((node, p.clone()));
    }
    let out = if terms.len() == 1 && terms[0].1.is_one() && matches!(b.node(terms[0].0), Node::Const(_)) {
        terms[0].0
    } else {
        b.sum(terms)
    };
    Pgc::categorical(b.finish(out), n, table.arity()).expect("variables are declared")
}

/// `Pr[X_1 ∈ V_1, .., X_n ∈ V_n]` summed straight off the table.
pub fn selective_marginal_oracle(table: &DistributionTable, sets: &[BTreeSet<u32>]) -> Rational {
    assert_eq!(sets.len(), table.n(), "one set per variable");
    table
        .entries()
        .filter(|(t, _)| t.iter().zip(sets).all(|(j, s)| s.contains(j)))
        .map(|(_, p)| p.clone())
        .fold(Rational::zero(), |a, b| a + b)
}
