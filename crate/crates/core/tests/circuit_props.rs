use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::Rng;

use pgc_core::circuit::{Assignment, FieldElement, FieldKind};
use pgc_core::corpus::random_circuit;
use pgc_core::poly::expand;
use pgc_core::rng::{small_rational, stream};
use pgc_core::{Circuit, Fp, Rational, SparsePolynomial, VarId};

fn random_point(seed: u64, vars: &[VarId]) -> Assignment<Rational> {
    let mut rng = stream(seed, 77);
    Assignment::from_pairs(vars.iter().map(|v| (v.clone(), small_rational(&mut rng, 9))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn evaluation_matches_expansion(seed in any::<u64>(), n in 1usize..6, size in 2usize..31) {
        let c = random_circuit(&mut stream(seed, 0), n, size, 8);
        let poly = expand(&c, 1 << 16).unwrap();
        let point = random_point(seed, c.variables());
        prop_assert_eq!(c.evaluate(&point).unwrap(), poly.evaluate(&point).unwrap());
    }

    #[test]
    fn syntactic_degree_bounds_total_degree(seed in any::<u64>(), n in 1usize..6, size in 2usize..31) {
        let c = random_circuit(&mut stream(seed, 1), n, size, 8);
        let poly = expand(&c, 1 << 16).unwrap();
        prop_assert!(c.syntactic_degree() >= poly.total_degree() as usize);
    }

    #[test]
    fn substitution_commutes_with_expansion(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = stream(seed, 2);
        let c = random_circuit(&mut rng, n, 16, 4);
        let mut circuits: BTreeMap<VarId, Circuit> = BTreeMap::new();
        let mut polys: BTreeMap<VarId, SparsePolynomial> = BTreeMap::new();
        for v in c.variables() {
            if rng.gen_bool(0.3) {
                continue;
            }
            let r = random_circuit(&mut rng, 3, 6, 2);
            polys.insert(v.clone(), expand(&r, 1 << 12).unwrap());
            circuits.insert(v.clone(), r);
        }
        let lhs = expand(&c.substitute(&circuits), 1 << 18).unwrap();
        let rhs = expand(&c, 1 << 16).unwrap().substitute(&polys);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn prime_field_agrees_with_rationals(seed in any::<u64>(), n in 1usize..6, size in 2usize..31) {
        let c = random_circuit(&mut stream(seed, 3), n, size, 8);
        let point = random_point(seed, c.variables());
        let exact = c.evaluate(&point).unwrap();
        match c.evaluate_in(&point, FieldKind::PrimeField).unwrap() {
            FieldElement::Fp(x) => prop_assert_eq!(Some(x), Fp::from_rational(&exact)),
            FieldElement::Rational(_) => prop_assert!(false, "asked for the prime field"),
        }
    }
}
