use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;

use pgc_core::corpus::random_binary_pgc;
use pgc_core::marginal::{marginalize_smlpc, MarginalQuery, Marginalizer};
use pgc_core::pgc::{check_distribution, selective_marginal_oracle};
use pgc_core::rng::stream;

fn random_sets<R: Rng>(rng: &mut R, n: usize) -> Vec<BTreeSet<u32>> {
    (0..n).map(|_| (0..2).filter(|_| rng.gen_bool(0.6)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn agrees_with_table_oracle(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = stream(seed, 0);
        let pgc = random_binary_pgc(&mut rng, n, 40);
        let table = check_distribution(&pgc, 1 << 16).unwrap().table().unwrap();
        let m = Marginalizer::from_pgc(&pgc).unwrap();
        for _ in 0..20 {
            let sets = random_sets(&mut rng, n);
            let expected = selective_marginal_oracle(&table, &sets);
            prop_assert_eq!(m.query(&MarginalQuery::new(sets)).unwrap(), expected);
        }
    }

    #[test]
    fn enlarging_a_set_never_decreases(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = stream(seed, 1);
        let pgc = random_binary_pgc(&mut rng, n, 40);
        let m = Marginalizer::from_pgc(&pgc).unwrap();
        let mut sets = random_sets(&mut rng, n);
        let before = m.query(&MarginalQuery::new(sets.clone())).unwrap();
        let i = rng.gen_range(0..n);
        sets[i].insert(rng.gen_range(0..2));
        let after = m.query(&MarginalQuery::new(sets)).unwrap();
        prop_assert!(after >= before);
    }

    #[test]
    fn unit_vector_points_give_table_entries(seed in any::<u64>(), n in 1usize..7) {
        let pgc = random_binary_pgc(&mut stream(seed, 2), n, 40);
        let table = check_distribution(&pgc, 1 << 16).unwrap().table().unwrap();
        let m = Marginalizer::from_pgc(&pgc).unwrap();
        for bits in 0u32..(1 << n) {
            let tuple: Vec<u32> = (0..n).map(|i| (bits >> i) & 1).collect();
            let q = MarginalQuery::new(tuple.iter().map(|&j| [j].into_iter().collect()).collect());
            let value = marginalize_smlpc(m.circuit(), m.partition(), &q).unwrap();
            prop_assert_eq!(value, table.probability(&tuple));
        }
    }
}
