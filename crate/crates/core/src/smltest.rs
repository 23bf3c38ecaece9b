//! Randomized set-multilinearity test.
//!
//! Phase 1 zeroes one part at a time and evaluates at random points: a
//! nonzero value proves some monomial misses that part. Phase 2 fixes every
//! variable except one or two members of a part to random values and
//! expands the remaining bivariate polynomial densely; any surviving
//! monomial of degree two or more in those members is a violation.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::circuit::{Circuit, EvalError, Lowered, Node, VarId};
use crate::field::Fp;
use crate::identity::schwartz_zippel_bound;
use crate::partition::{PartitionError, VariablePartition};
use crate::poly::{expand, ExpandError};
use crate::rational::Rational;
use crate::rng;

const PHASE1_TAG: u64 = 0x51;
const PHASE2_TAG: u64 = 0x52;
/// Largest degree phase 2 will expand densely.
pub const MAX_DEGREE_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmlOptions {
    pub seed: u64,
    /// Random points per part in phase 1.
    pub trials: usize,
    /// Independent repetitions per variable pair in phase 2.
    pub repetitions: usize,
    /// Truncation degree for phase 2; defaults to the syntactic degree.
    pub degree_cap: Option<usize>,
}

impl SmlOptions {
    pub fn new(seed: u64) -> Self {
        SmlOptions { seed, trials: 3, repetitions: 3, degree_cap: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SmlError {
    #[error("degree {degree} too large for dense expansion (limit {limit})")]
    DegreeTooLarge { degree: usize, limit: usize },
    #[error("syntactic degree {degree} exceeds the requested cap {cap}")]
    CapBelowDegree { degree: usize, cap: usize },
    #[error("set-multilinearity is only tested on division-free circuits")]
    Division,
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Evidence that a circuit is not set-multilinear.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmlWitness {
    /// With part `part` set to zero the circuit is `value ≠ 0` at `point`,
    /// so some monomial contains no variable of that part.
    MissingPart { part: usize, point: Vec<(VarId, Fp)>, value: Fp },
    /// After fixing all other variables to `point`, the monomial
    /// `first^e1 · second^e2` (or `first^e1` if both are the same variable)
    /// has nonzero coefficient `coefficient`.
    Repeated {
        part: usize,
        first: VarId,
        second: VarId,
        exponents: (u32, u32),
        coefficient: Fp,
        point: Vec<(VarId, Fp)>,
    },
}

impl fmt::Display for SmlWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmlWitness::MissingPart { part, value, .. } => {
                write!(f, "part {} missing: value {value} with the part zeroed", part + 1)
            }
            SmlWitness::Repeated { part, first, second, exponents, coefficient, .. } => {
                if first == second {
                    write!(f, "part {}: {first}^{} has coefficient {coefficient}", part + 1, exponents.0)
                } else {
                    write!(
                        f,
                        "part {}: {first}^{}*{second}^{} has coefficient {coefficient}",
                        part + 1,
                        exponents.0,
                        exponents.1
                    )
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmlVerdict {
    Rejected(SmlWitness),
    /// Wrongly accepted with probability at most `failure_bound`.
    Accepted { tests: usize, failure_bound: Rational },
}

impl SmlVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, SmlVerdict::Accepted { .. })
    }
}

fn prepare(pc: &Circuit, partition: &VariablePartition) -> Result<Lowered<Fp>, SmlError> {
    if !pc.is_division_free() {
        return Err(SmlError::Division);
    }
    partition.covers(pc)?;
    Ok(Lowered::<Fp>::new(pc)?)
}

fn random_point(pc: &Circuit, seed: u64, stream: u64) -> Vec<Fp> {
    let mut r = rng::stream(seed, stream);
    pc.variables().iter().map(|_| Fp::random(&mut r)).collect()
}

/// Phase 1: one entry per part, `Some` with a witness if the part is
/// provably missed by some monomial.
pub fn phase1_part_coverage(
    pc: &Circuit,
    partition: &VariablePartition,
    seed: u64,
    trials: usize,
) -> Result<Vec<Option<SmlWitness>>, SmlError> {
    let lowered = prepare(pc, partition)?;
    let mut out = Vec::with_capacity(partition.len());
    for (i, part) in partition.parts().iter().enumerate() {
        let slots: Vec<usize> = part.iter().filter_map(|v| pc.var_index(v)).collect();
        let mut witness = None;
        for t in 0..trials {
            let mut point = random_point(pc, seed, rng::stream_id(PHASE1_TAG, &[i as u64, t as u64]));
            for &s in &slots {
                point[s] = Fp::ZERO;
            }
            let value = lowered.evaluate(&point)?;
            if !value.is_zero() {
                witness = Some(SmlWitness::MissingPart {
                    part: i,
                    point: pc.variables().iter().cloned().zip(point).collect(),
                    value,
                });
                break;
            }
        }
        out.push(witness);
    }
    Ok(out)
}

/// Dense polynomial in `a`, `b` truncated to total degree `deg`, stored by
/// total degree then by exponent of `b`.
#[derive(Clone, Debug)]
struct Dense {
    deg: usize,
    coeffs: Vec<Fp>,
}

fn tri(t: usize) -> usize {
    t * (t + 1) / 2
}

impl Dense {
    fn zeros(deg: usize) -> Self {
        Dense { deg, coeffs: alloc::vec![Fp::ZERO; tri(deg + 1)] }
    }

    fn from_scalar(c: Fp, deg: usize) -> Self {
        let mut d = Dense::zeros(deg);
        d.coeffs[0] = c;
        d
    }

    fn add_scaled(&mut self, other: &Dense, w: Fp) {
        if other.deg > self.deg {
            let mut grown = Dense::zeros(other.deg);
            grown.coeffs[..self.coeffs.len()].copy_from_slice(&self.coeffs);
            *self = grown;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            self.coeffs[k] = self.coeffs[k] + *c * w;
        }
    }

    fn mul(&self, other: &Dense, cap: usize) -> Dense {
        let deg = (self.deg + other.deg).min(cap);
        let mut out = Dense::zeros(deg);
        for t1 in 0..=self.deg {
            for b1 in 0..=t1 {
                let c1 = self.coeffs[tri(t1) + b1];
                if c1.is_zero() {
                    continue;
                }
                for t2 in 0..=other.deg.min(deg.saturating_sub(t1)) {
                    if t1 + t2 > deg {
                        break;
                    }
                    for b2 in 0..=t2 {
                        let c2 = other.coeffs[tri(t2) + b2];
                        let k = tri(t1 + t2) + b1 + b2;
                        out.coeffs[k] = out.coeffs[k] + c1 * c2;
                    }
                }
            }
        }
        out.trim();
        out
    }

    fn trim(&mut self) {
        while self.deg > 0 && self.coeffs[tri(self.deg)..].iter().all(|c| c.is_zero()) {
            self.deg -= 1;
            self.coeffs.truncate(tri(self.deg + 1));
        }
    }
}

#[derive(Clone, Debug)]
enum Val {
    Scalar(Fp),
    Poly(Dense),
}

impl Val {
    fn into_dense(self) -> Dense {
        match self {
            Val::Scalar(c) => Dense::from_scalar(c, 0),
            Val::Poly(d) => d,
        }
    }
}

/// Dense expansion in the two free slots (`b` may equal `a`), with all other
/// variables at `values`.
fn bivariate(pc: &Circuit, values: &[Fp], a: usize, b: Option<usize>, cap: usize) -> Dense {
    let mut out: Vec<Val> = Vec::with_capacity(pc.nodes().len());
    let live = pc.reachable();
    for (i, node) in pc.nodes().iter().enumerate() {
        if !live[i] {
            out.push(Val::Scalar(Fp::ZERO));
            continue;
        }
        let v = match node {
            Node::Const(c) => Val::Scalar(Fp::from_rational(c).expect("checked by lowering")),
            Node::Var(s) if *s == a => {
                let mut d = Dense::zeros(1.min(cap));
                if cap >= 1 {
                    d.coeffs[1] = Fp::ONE;
                }
                Val::Poly(d)
            }
            Node::Var(s) if Some(*s) == b => {
                let mut d = Dense::zeros(1.min(cap));
                if cap >= 1 {
                    d.coeffs[2] = Fp::ONE;
                }
                Val::Poly(d)
            }
            Node::Var(s) => Val::Scalar(values[*s]),
            Node::Sum(terms) => {
                let mut scalar = Fp::ZERO;
                let mut poly: Option<Dense> = None;
                for (c, w) in terms {
                    let w = Fp::from_rational(w).expect("checked by lowering");
                    match &out[*c] {
                        Val::Scalar(x) => scalar = scalar + *x * w,
                        Val::Poly(d) => match &mut poly {
                            Some(p) => p.add_scaled(d, w),
                            None => {
                                let mut p = Dense::zeros(0);
                                p.add_scaled(d, w);
                                poly = Some(p);
                            }
                        },
                    }
                }
                match poly {
                    Some(mut p) => {
                        p.coeffs[0] = p.coeffs[0] + scalar;
                        p.trim();
                        Val::Poly(p)
                    }
                    None => Val::Scalar(scalar),
                }
            }
            Node::Prod(factors) => {
                let mut scalar = Fp::ONE;
                let mut poly: Option<Dense> = None;
                for c in factors {
                    match &out[*c] {
                        Val::Scalar(x) => scalar = scalar * *x,
                        Val::Poly(d) => {
                            poly = Some(match poly {
                                Some(p) => p.mul(d, cap),
                                None => d.clone(),
                            })
                        }
                    }
                }
                match poly {
                    Some(mut p) => {
                        for c in p.coeffs.iter_mut() {
                            *c = *c * scalar;
                        }
                        p.trim();
                        Val::Poly(p)
                    }
                    None => Val::Scalar(scalar),
                }
            }
            Node::Div(..) => unreachable!("division-free by precondition"),
        };
        out.push(v);
    }
    out.swap_remove(pc.output()).into_dense()
}

/// Result of one phase-2 probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairOutcome {
    pub part: usize,
    pub first: VarId,
    pub second: VarId,
    pub witness: Option<SmlWitness>,
}

fn effective_cap(pc: &Circuit, cap: Option<usize>) -> Result<usize, SmlError> {
    let degree = pc.syntactic_degree();
    let cap = cap.unwrap_or(degree);
    if cap > MAX_DEGREE_CAP {
        return Err(SmlError::DegreeTooLarge { degree: cap, limit: MAX_DEGREE_CAP });
    }
    if degree > cap {
        return Err(SmlError::CapBelowDegree { degree, cap });
    }
    Ok(cap)
}

/// Phase 2 over every part and every pair `j <= j'` of its members, each
/// repeated `repetitions` times with fresh values for the other variables.
pub fn phase2_pairwise(
    pc: &Circuit,
    partition: &VariablePartition,
    degree_cap: Option<usize>,
    seed: u64,
    repetitions: usize,
) -> Result<Vec<PairOutcome>, SmlError> {
    prepare(pc, partition)?;
    let cap = effective_cap(pc, degree_cap)?;
    let mut out = Vec::new();
    for (i, part) in partition.parts().iter().enumerate() {
        for j in 0..part.len() {
            for k in j..part.len() {
                out.push(probe_pair(pc, i, &part[j], &part[k], (j, k), cap, seed, repetitions));
            }
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn probe_pair(
    pc: &Circuit,
    part: usize,
    first: &VarId,
    second: &VarId,
    (j, k): (usize, usize),
    cap: usize,
    seed: u64,
    repetitions: usize,
) -> PairOutcome {
    let mut outcome = PairOutcome { part, first: first.clone(), second: second.clone(), witness: None };
    let (sa, sb) = (pc.var_index(first), pc.var_index(second));
    // A variable absent from the circuit cannot occur in any monomial.
    let (a, b) = match (sa, sb) {
        (Some(a), Some(_)) if j == k => (a, None),
        (Some(a), Some(b)) => (a, Some(b)),
        (Some(a), None) | (None, Some(a)) => (a, None),
        (None, None) => return outcome,
    };
    let (ea_var, eb_var) = match (sa, sb) {
        (None, Some(_)) => (second, first),
        _ => (first, second),
    };
    for rep in 0..repetitions {
        let values = random_point(pc, seed, rng::stream_id(PHASE2_TAG, &[part as u64, j as u64, k as u64, rep as u64]));
        let dense = bivariate(pc, &values, a, b, cap);
        for t in 2..=dense.deg {
            for eb in 0..=t {
                let c = dense.coeffs[tri(t) + eb];
                if c.is_zero() {
                    continue;
                }
                let mut point: Vec<(VarId, Fp)> = pc.variables().iter().cloned().zip(values).collect();
                point.retain(|(v, _)| v != ea_var && v != eb_var);
                outcome.witness = Some(SmlWitness::Repeated {
                    part,
                    first: ea_var.clone(),
                    second: if b.is_some() { eb_var.clone() } else { ea_var.clone() },
                    exponents: ((t - eb) as u32, eb as u32),
                    coefficient: c,
                    point,
                });
                return outcome;
            }
        }
    }
    outcome
}

/// Phase 1, then phase 2; stops at the first violation.
pub fn test_set_multilinear(
    pc: &Circuit,
    partition: &VariablePartition,
    options: &SmlOptions,
) -> Result<SmlVerdict, SmlError> {
    prepare(pc, partition)?;
    let cap = effective_cap(pc, options.degree_cap)?;
    for w in phase1_part_coverage(pc, partition, options.seed, options.trials)? {
        if let Some(w) = w {
            return Ok(SmlVerdict::Rejected(w));
        }
    }
    let mut pairs = 0;
    for (i, part) in partition.parts().iter().enumerate() {
        for j in 0..part.len() {
            for k in j..part.len() {
                let o = probe_pair(pc, i, &part[j], &part[k], (j, k), cap, options.seed, options.repetitions);
                if let Some(w) = o.witness {
                    return Ok(SmlVerdict::Rejected(w));
                }
                pairs += 1;
            }
        }
    }
    let tests = partition.len() * options.trials + pairs * options.repetitions;
    let degree = pc.syntactic_degree().max(1);
    Ok(SmlVerdict::Accepted { tests, failure_bound: schwartz_zippel_bound(degree) * Rational::from_integer(tests.into()) })
}

/// Checks a witness against the exact expansion.
pub fn confirm_witness(
    pc: &Circuit,
    partition: &VariablePartition,
    witness: &SmlWitness,
    budget: usize,
) -> Result<bool, ExpandError> {
    let poly = expand(pc, budget)?;
    Ok(match witness {
        SmlWitness::MissingPart { part, .. } => {
            let members: BTreeSet<&VarId> = partition.parts()[*part].iter().collect();
            poly.terms().any(|(m, _)| m.factors().iter().all(|(v, _)| !members.contains(v)))
        }
        SmlWitness::Repeated { first, second, exponents, .. } => poly.terms().any(|(m, _)| {
            if first == second {
                m.exponent(first) == exponents.0
            } else {
                m.exponent(first) == exponents.0 && m.exponent(second) == exponents.1
            }
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::corpus::figures;
    use crate::rational::int;

    fn lits() -> (VarId, VarId, VarId, VarId) {
        (VarId::positive(1), VarId::negated(1), VarId::positive(2), VarId::negated(2))
    }

    fn agree_or_disagree() -> Circuit {
        let (x1, xb1, x2, xb2) = lits();
        let mut b = CircuitBuilder::with_variables([xb1.clone(), x1.clone(), xb2.clone(), x2.clone()]);
        let (a, c) = (b.var(&x1), b.var(&x2));
        let p = b.prod(alloc::vec![a, c]);
        let (a, c) = (b.var(&xb1), b.var(&xb2));
        let q = b.prod(alloc::vec![a, c]);
        let s = b.sum(alloc::vec![(p, int(1)), (q, int(1))]);
        b.finish(s)
    }

    #[test]
    fn phase1_examples() {
        let parts = VariablePartition::binary(2);
        let ok = phase1_part_coverage(&agree_or_disagree(), &parts, 1, 3).unwrap();
        assert!(ok.iter().all(Option::is_none));

        let (x1, _, x2, _) = lits();
        let mut b = CircuitBuilder::new();
        let (a, c) = (b.var(&x1), b.var(&x2));
        let p = b.prod(alloc::vec![a, c]);
        let s = b.sum(alloc::vec![(a, int(1)), (p, int(1))]);
        let res = phase1_part_coverage(&b.finish(s), &parts, 1, 3).unwrap();
        assert!(res[0].is_none());
        assert!(matches!(res[1], Some(SmlWitness::MissingPart { part: 1, .. })));

        let zero = phase1_part_coverage(&Circuit::constant(int(0)), &parts, 1, 3).unwrap();
        assert!(zero.iter().all(Option::is_none));
    }

    #[test]
    fn phase2_examples() {
        let parts = VariablePartition::binary(1);
        let (x1, xb1, _, _) = lits();
        let mut b = CircuitBuilder::new();
        let (a, c) = (b.var(&x1), b.var(&xb1));
        let p = b.prod(alloc::vec![a, c]);
        let res = phase2_pairwise(&b.finish(p), &parts, None, 5, 3).unwrap();
        let hit: Vec<_> = res.iter().filter(|o| o.witness.is_some()).collect();
        assert_eq!(hit.len(), 1);
        assert_ne!(hit[0].first, hit[0].second);

        let mut b = CircuitBuilder::new();
        let a = b.var(&x1);
        let p = b.prod(alloc::vec![a, a]);
        let res = phase2_pairwise(&b.finish(p), &parts, None, 5, 3).unwrap();
        assert!(res.iter().any(|o| matches!(&o.witness, Some(SmlWitness::Repeated { exponents: (2, 0), .. }))
            && o.first == o.second));

        let res = phase2_pairwise(&agree_or_disagree(), &VariablePartition::binary(2), None, 5, 3).unwrap();
        assert!(res.iter().all(|o| o.witness.is_none()));
    }

    #[test]
    fn fig3_rejected_against_singleton_parts() {
        let pgc = figures::fig3_pgc();
        let parts = VariablePartition::new(alloc::vec![alloc::vec![VarId::new("z1")], alloc::vec![VarId::new("z2")]]).unwrap();
        let v = test_set_multilinear(pgc.circuit(), &parts, &SmlOptions::new(7)).unwrap();
        let SmlVerdict::Rejected(w) = v else { panic!("accepted") };
        assert!(confirm_witness(pgc.circuit(), &parts, &w, 100).unwrap());
    }

    #[test]
    fn accepted_bound_is_reported() {
        let v = test_set_multilinear(&agree_or_disagree(), &VariablePartition::binary(2), &SmlOptions::new(1)).unwrap();
        match v {
            SmlVerdict::Accepted { tests, failure_bound } => {
                assert_eq!(tests, 2 * 3 + 6 * 3);
                assert!(failure_bound < Rational::new(1.into(), (1u64 << 50).into()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn refuses_huge_caps() {
        let e = test_set_multilinear(
            &agree_or_disagree(),
            &VariablePartition::binary(2),
            &SmlOptions { degree_cap: Some(5000), ..SmlOptions::new(1) },
        );
        assert!(matches!(e, Err(SmlError::DegreeTooLarge { .. })));
    }
}
