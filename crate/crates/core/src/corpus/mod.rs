//! Seeded instance generators for tests, benchmarks and the CLI.
//!
//! Every generator takes an explicit RNG so callers decide the stream layout;
//! `*_corpus` helpers derive one stream per instance index.

pub mod figures;

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::circuit::{Circuit, CircuitBuilder, NodeId, VarId};
use crate::dpp::{Abp, AbpEdge, Formula, Label};
use crate::partition::VariablePartition;
use crate::pgc::{pgc_var, DistributionTable, Pgc};
use crate::poly::Monomial;
use crate::rational::Rational;
use crate::rng::{small_rational, stream, stream_id};

const TAG_PGC: u64 = 0x5047_4301;
const TAG_SML: u64 = 0x534d_4c01;
const TAG_PLANT: u64 = 0x504c_4e01;
const TAG_FORMULA: u64 = 0x464f_5201;

/// Probability `k/den` with `den <= 6`, endpoints included.
fn probability<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let den: i64 = rng.gen_range(1..=6);
    Rational::new(rng.gen_range(0..=den).into(), den.into())
}

/// Strictly inside `(0, 1)`.
fn weight<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let den: i64 = rng.gen_range(2..=7);
    Rational::new(rng.gen_range(1..den).into(), den.into())
}

fn nonzero_rational<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rational {
    loop {
        let r = small_rational(rng, bound);
        if !r.is_zero() {
            return r;
        }
    }
}

fn leaf_distribution<R: Rng + ?Sized>(b: &mut CircuitBuilder, rng: &mut R, i: usize) -> NodeId {
    let p = probability(rng);
    let one = b.one();
    let z = b.var(&pgc_var(i));
    b.sum(alloc::vec![(one, Rational::one() - &p), (z, p)])
}

/// `(1 - z_i)`
fn complement(b: &mut CircuitBuilder, i: usize) -> NodeId {
    let one = b.one();
    let z = b.var(&pgc_var(i));
    b.sum(alloc::vec![(one, Rational::one()), (z, -Rational::one())])
}

/// Joint law of two variables: independent leaves plus `δ (1 - z_i)(1 - z_j)`,
/// which shifts mass between the diagonal and anti-diagonal.
fn correlated_pair<R: Rng + ?Sized>(b: &mut CircuitBuilder, rng: &mut R, i: usize, j: usize) -> NodeId {
    let (pi, pj) = (probability(rng), probability(rng));
    let one = Rational::one();
    let p00 = (&one - &pi) * (&one - &pj);
    let p11 = &pi * &pj;
    let p10 = &pi * (&one - &pj);
    let p01 = (&one - &pi) * &pj;
    let t = weight(rng);
    let delta = if rng.gen_bool(0.5) { -(p00.min(p11)) * t } else { p10.min(p01) * t };
    let (c, zi, zj) = (b.one(), b.var(&pgc_var(i)), b.var(&pgc_var(j)));
    let li = b.sum(alloc::vec![(c, &one - &pi), (zi, pi)]);
    let lj = b.sum(alloc::vec![(c, &one - &pj), (zj, pj)]);
    let indep = b.prod(alloc::vec![li, lj]);
    let (ci, cj) = (complement(b, i), complement(b, j));
    let corr = b.prod(alloc::vec![ci, cj]);
    b.sum(alloc::vec![(indep, one), (corr, delta)])
}

fn distribution<R: Rng + ?Sized>(b: &mut CircuitBuilder, rng: &mut R, vars: &[usize], depth: u32) -> NodeId {
    match vars.len() {
        0 => b.one(),
        1 => leaf_distribution(b, rng, vars[0]),
        2 if rng.gen_bool(0.4) => correlated_pair(b, rng, vars[0], vars[1]),
        len => match rng.gen_range(0..10) {
            0..=1 if depth < 3 => {
                let alpha = weight(rng);
                let f = distribution(b, rng, vars, depth + 1);
                let g = distribution(b, rng, vars, depth + 1);
                b.sum(alloc::vec![(f, alpha.clone()), (g, Rational::one() - alpha)])
            }
            2 if depth < 3 => {
                // Same polynomial twice with weights 1 + β and -β.
                let beta = weight(rng);
                let mut sub = CircuitBuilder::new();
                let f = distribution(&mut sub, rng, vars, depth + 1);
                let sub = sub.finish(f);
                let f = b.graft(&sub);
                let g = b.graft(&sub);
                b.sum(alloc::vec![(f, Rational::one() + &beta), (g, -beta)])
            }
            _ => {
                let cut = rng.gen_range(1..len);
                let l = distribution(b, rng, &vars[..cut], depth);
                let r = distribution(b, rng, &vars[cut..], depth);
                b.prod(alloc::vec![l, r])
            }
        },
    }
}

/// Valid binary PGC over `z1..zn` with at most `max_nodes` nodes, built from
/// leaves, products, mixtures, cancelling negative pairs and correlated
/// pairs with negative edges. Falls back to a product of leaves when
/// repeated draws exceed the budget.
pub fn random_binary_pgc<R: Rng + ?Sized>(rng: &mut R, n: usize, max_nodes: usize) -> Pgc {
    for _ in 0..32 {
        let mut vars: Vec<usize> = (1..=n).collect();
        vars.shuffle(rng);
        let mut b = CircuitBuilder::with_variables((1..=n).map(pgc_var));
        let out = distribution(&mut b, rng, &vars, 0);
        if b.len() <= max_nodes {
            return Pgc::binary(b.finish(out), n).expect("variables declared");
        }
    }
    let mut b = CircuitBuilder::with_variables((1..=n).map(pgc_var));
    let leaves = (1..=n).map(|i| leaf_distribution(&mut b, rng, i)).collect();
    let out = b.prod(leaves);
    Pgc::binary(b.finish(out), n).expect("variables declared")
}

/// `count` binary PGCs with `n` uniform in `1..=max_n`.
pub fn binary_pgc_corpus(seed: u64, count: usize, max_n: usize, max_nodes: usize) -> Vec<Pgc> {
    (0..count)
        .map(|k| {
            let mut rng = stream(seed, stream_id(TAG_PGC, &[k as u64]));
            let n = rng.gen_range(1..=max_n);
            random_binary_pgc(&mut rng, n, max_nodes)
        })
        .collect()
}

fn sml_leaf<R: Rng + ?Sized>(b: &mut CircuitBuilder, rng: &mut R, i: usize) -> NodeId {
    let (x, xb) = (b.var(&VarId::positive(i)), b.var(&VarId::negated(i)));
    b.sum(alloc::vec![(x, nonzero_rational(rng, 4)), (xb, nonzero_rational(rng, 4))])
}

fn sml<R: Rng + ?Sized>(b: &mut CircuitBuilder, rng: &mut R, parts: &[usize], depth: u32) -> NodeId {
    if parts.len() == 1 && rng.gen_bool(0.7) {
        return sml_leaf(b, rng, parts[0]);
    }
    match rng.gen_range(0..8) {
        0..=1 if depth < 3 => {
            let f = sml(b, rng, parts, depth + 1);
            let g = sml(b, rng, parts, depth + 1);
            b.sum(alloc::vec![(f, nonzero_rational(rng, 3)), (g, nonzero_rational(rng, 3))])
        }
        2..=3 if depth < 4 => {
            // g + c x_i xb_i g - c x_i (xb_i g): non-multilinear gates that cancel.
            let i = *parts.choose(rng).expect("nonempty");
            let g = sml(b, rng, parts, depth + 1);
            let (x, xb) = (b.var(&VarId::positive(i)), b.var(&VarId::negated(i)));
            let t = b.prod(alloc::vec![x, xb, g]);
            let inner = b.prod(alloc::vec![xb, g]);
            let t2 = b.prod(alloc::vec![x, inner]);
            let c = nonzero_rational(rng, 5);
            b.sum(alloc::vec![(g, Rational::one()), (t, c.clone()), (t2, -c)])
        }
        _ if parts.len() > 1 => {
            let cut = rng.gen_range(1..parts.len());
            let l = sml(b, rng, &parts[..cut], depth);
            let r = sml(b, rng, &parts[cut..], depth);
            b.prod(alloc::vec![l, r])
        }
        _ => sml_leaf(b, rng, parts[0]),
    }
}

/// Set-multilinear circuit over the binary partition of `n` variables whose
/// intermediate gates need not be set-multilinear.
pub fn random_sml_circuit<R: Rng + ?Sized>(rng: &mut R, n: usize, max_nodes: usize) -> Circuit {
    assert!(n >= 1);
    let declared = (1..=n).flat_map(|i| [VarId::negated(i), VarId::positive(i)]);
    for _ in 0..32 {
        let mut parts: Vec<usize> = (1..=n).collect();
        parts.shuffle(rng);
        let mut b = CircuitBuilder::with_variables(declared.clone());
        let out = sml(&mut b, rng, &parts, 0);
        if b.len() <= max_nodes {
            return b.finish(out);
        }
    }
    let mut b = CircuitBuilder::with_variables(declared);
    let leaves = (1..=n).map(|i| sml_leaf(&mut b, rng, i)).collect();
    let out = b.prod(leaves);
    b.finish(out)
}

/// `count` set-multilinear circuits with `n` uniform in `1..=max_n`.
pub fn sml_corpus(seed: u64, count: usize, max_n: usize, max_nodes: usize) -> Vec<(Circuit, VariablePartition)> {
    (0..count)
        .map(|k| {
            let mut rng = stream(seed, stream_id(TAG_SML, &[k as u64]));
            let n = rng.gen_range(1..=max_n);
            (random_sml_circuit(&mut rng, n, max_nodes), VariablePartition::binary(n))
        })
        .collect()
}

/// A set-multilinear circuit plus one monomial that breaks the property.
#[derive(Clone, Debug)]
pub struct PlantedViolation {
    pub circuit: Circuit,
    pub monomial: Monomial,
    pub coefficient: Rational,
}

/// Adds `ε m` to `base` (over the binary partition of `n`), where `m` is a
/// cross term `x_i xb_i ...`, a square `x_i^2 ...` or misses a part.
pub fn plant_violation<R: Rng + ?Sized>(rng: &mut R, base: &Circuit, n: usize) -> PlantedViolation {
    let i = rng.gen_range(1..=n);
    let pick = |rng: &mut R, k: usize| if rng.gen_bool(0.5) { VarId::positive(k) } else { VarId::negated(k) };
    let mut factors: Vec<VarId> = Vec::new();
    match rng.gen_range(0..3) {
        0 => {
            factors.push(VarId::positive(i));
            factors.push(VarId::negated(i));
            for k in (1..=n).filter(|&k| k != i) {
                if rng.gen_bool(0.5) {
                    factors.push(pick(rng, k));
                }
            }
        }
        1 => {
            let v = pick(rng, i);
            factors.push(v.clone());
            factors.push(v);
            for k in (1..=n).filter(|&k| k != i) {
                factors.push(pick(rng, k));
            }
        }
        _ => {
            for k in (1..=n).filter(|&k| k != i) {
                factors.push(pick(rng, k));
            }
        }
    }
    let coefficient = nonzero_rational(rng, 9);
    let mut b = CircuitBuilder::new();
    let root = b.graft(base);
    let leaves: Vec<NodeId> = factors.iter().map(|v| b.var(v)).collect();
    let m = match leaves.len() {
        0 => b.one(),
        _ => b.prod(leaves),
    };
    let out = b.sum(alloc::vec![(root, Rational::one()), (m, coefficient.clone())]);
    PlantedViolation { circuit: b.finish(out), monomial: Monomial::product(factors), coefficient }
}

/// `count` planted violations on top of fresh set-multilinear circuits.
pub fn planted_corpus(seed: u64, count: usize, max_n: usize, max_nodes: usize) -> Vec<(PlantedViolation, VariablePartition)> {
    (0..count)
        .map(|k| {
            let mut rng = stream(seed, stream_id(TAG_PLANT, &[k as u64]));
            let n = rng.gen_range(1..=max_n);
            let base = random_sml_circuit(&mut rng, n, max_nodes);
            (plant_violation(&mut rng, &base, n), VariablePartition::binary(n))
        })
        .collect()
}

/// Set-multilinear circuit of `terms` products of `n` fresh leaves each;
/// size grows linearly in `terms` for fixed `n`.
pub fn layered_sml_circuit<R: Rng + ?Sized>(rng: &mut R, n: usize, terms: usize) -> Circuit {
    let mut b = CircuitBuilder::with_variables((1..=n).flat_map(|i| [VarId::negated(i), VarId::positive(i)]));
    let mut products = Vec::with_capacity(terms);
    for _ in 0..terms {
        let leaves = (1..=n).map(|i| sml_leaf(&mut b, rng, i)).collect();
        let p = b.prod(leaves);
        products.push((p, small_rational(rng, 5)));
    }
    let out = b.sum(products);
    b.finish(out)
}

/// Division-free circuit over `z1..zn` with at most `max_nodes` nodes and
/// syntactic degree at most `max_degree`.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, n: usize, max_nodes: usize, max_degree: usize) -> Circuit {
    assert!(n >= 1 && max_nodes >= 2);
    let mut b = CircuitBuilder::with_variables((1..=n).map(pgc_var));
    let mut degree: Vec<usize> = Vec::new();
    let seeds = rng.gen_range(1..=n.min(max_nodes - 1));
    for _ in 0..seeds {
        let v = b.var(&pgc_var(rng.gen_range(1..=n)));
        if v == degree.len() {
            degree.push(1);
        }
    }
    let c = b.constant(small_rational(rng, 4));
    if c == degree.len() {
        degree.push(0);
    }
    while b.len() < max_nodes {
        let fanin = rng.gen_range(1..=3usize.min(b.len()));
        let children: Vec<NodeId> = (0..fanin).map(|_| rng.gen_range(0..b.len())).collect();
        let id = if rng.gen_bool(0.5) {
            let d = children.iter().map(|&c| degree[c]).sum::<usize>();
            if d > max_degree {
                continue;
            }
            degree.push(d);
            b.prod(children)
        } else {
            degree.push(children.iter().map(|&c| degree[c]).max().unwrap_or(0));
            b.sum(children.into_iter().map(|c| (c, small_rational(rng, 4))).collect())
        };
        debug_assert_eq!(id + 1, degree.len());
    }
    let out = b.len() - 1;
    b.finish(out)
}

fn formula_tree<R: Rng + ?Sized>(rng: &mut R, leaves: usize, vars: usize) -> Formula {
    if leaves == 1 {
        return if rng.gen_bool(0.7) {
            Formula::var(&alloc::format!("y{}", rng.gen_range(1..=vars)))
        } else {
            Formula::Const(small_rational(rng, 4))
        };
    }
    let cut = rng.gen_range(1..leaves);
    let l = Box::new(formula_tree(rng, cut, vars));
    let r = Box::new(formula_tree(rng, leaves - cut, vars));
    if rng.gen_bool(0.5) {
        Formula::Add(l, r)
    } else {
        Formula::Mul(l, r)
    }
}

/// Random formula with at most `max_nodes` nodes over `y1..y{vars}`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, max_nodes: usize, vars: usize) -> Formula {
    let leaves = rng.gen_range(1..=(max_nodes + 1) / 2);
    formula_tree(rng, leaves, vars.max(1))
}

/// `count` formulas with at most `max_nodes` nodes each.
pub fn formula_corpus(seed: u64, count: usize, max_nodes: usize) -> Vec<Formula> {
    (0..count)
        .map(|k| {
            let mut rng = stream(seed, stream_id(TAG_FORMULA, &[k as u64]));
            random_formula(&mut rng, max_nodes, 4)
        })
        .collect()
}

/// Layered ABP with `depth` edge layers, inner layers of width up to
/// `width`, each possible edge present with probability `density`.
pub fn random_abp<R: Rng + ?Sized>(rng: &mut R, depth: usize, width: usize, vars: usize, density: f64) -> Abp {
    assert!(depth >= 1 && width >= 1);
    let mut layers = alloc::vec![1];
    layers.extend((1..depth).map(|_| rng.gen_range(1..=width)));
    layers.push(1);
    let mut edges = Vec::new();
    for layer in 0..depth {
        for from in 0..layers[layer] {
            for to in 0..layers[layer + 1] {
                if !rng.gen_bool(density) {
                    continue;
                }
                let label = if rng.gen_bool(0.7) {
                    Label::Var(VarId::new(&alloc::format!("y{}", rng.gen_range(1..=vars.max(1)))))
                } else {
                    Label::Const(nonzero_rational(rng, 3))
                };
                edges.push(AbpEdge { layer, from, to, label });
            }
        }
    }
    Abp::new(layers, edges).expect("layer shape is valid")
}

/// Full-support random table over `n` variables of arity `d`.
pub fn random_table<R: Rng + ?Sized>(rng: &mut R, n: usize, d: u32) -> DistributionTable {
    let mut tuples: Vec<Vec<u32>> = alloc::vec![Vec::new()];
    for _ in 0..n {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..d).map(move |j| {
                    let mut t = t.clone();
                    t.push(j);
                    t
                })
            })
            .collect();
    }
    let weights: Vec<i64> = tuples.iter().map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = weights.iter().sum();
    let entries = tuples
        .into_iter()
        .zip(weights)
        .map(|(t, w)| (t, Rational::new(w.into(), total.into())));
    DistributionTable::new(n, d, entries).expect("weights are normalized")
}
