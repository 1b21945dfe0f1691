//! Lattice-law properties on randomly generated bounded distributive
//! lattices, plus closure-operator laws for downset closure.

use muloc_core::{case_rng, downset_closure, random_lattice, ElemSet};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn meet_join_tables_satisfy_lattice_laws(seed in any::<u64>(), case in 0u64..1 << 16) {
        let lat = random_lattice(&mut case_rng(seed, case), 10).unwrap().value;
        for a in lat.elements() {
            prop_assert_eq!(lat.meet(a, a), a);
            prop_assert_eq!(lat.join(a, a), a);
            for b in lat.elements() {
                prop_assert_eq!(lat.meet(a, b), lat.meet(b, a));
                prop_assert_eq!(lat.join(a, b), lat.join(b, a));
                prop_assert_eq!(lat.meet(a, lat.join(a, b)), a);
                prop_assert_eq!(lat.join(a, lat.meet(a, b)), a);
                for c in lat.elements() {
                    prop_assert_eq!(
                        lat.meet(a, lat.meet(b, c)),
                        lat.meet(lat.meet(a, b), c)
                    );
                    prop_assert_eq!(
                        lat.join(a, lat.join(b, c)),
                        lat.join(lat.join(a, b), c)
                    );
                }
            }
        }
    }

    #[test]
    fn downset_closure_is_a_closure_operator(seed in any::<u64>(), case in 0u64..1 << 16) {
        let lat = random_lattice(&mut case_rng(seed, case), 10).unwrap().value;
        let mut rng = case_rng(seed ^ 0x9e37, case);
        for _ in 0..8 {
            let a = ElemSet::from_mask(rng.gen::<u64>() & lat.all().mask());
            let b = ElemSet::from_mask(rng.gen::<u64>() & lat.all().mask());
            let ca = downset_closure(&lat, a).members();
            let cb = downset_closure(&lat, b).members();
            // Inflationary.
            prop_assert!(a.is_subset(ca));
            // Monotone: a and b both sit under a | b.
            let cab = downset_closure(&lat, a | b).members();
            prop_assert!(ca.is_subset(cab));
            prop_assert!(cb.is_subset(cab));
            // Idempotent.
            prop_assert_eq!(downset_closure(&lat, ca).members(), ca);
            // The result is downward closed.
            for p in ca.iter() {
                prop_assert!(lat.downset(p).is_subset(ca));
            }
        }
    }

    #[test]
    fn bulk_bounds_match_brute_force(seed in any::<u64>(), case in 0u64..1 << 16) {
        let lat = random_lattice(&mut case_rng(seed, case), 10).unwrap().value;
        let mut rng = case_rng(seed ^ 0x51f1, case);
        for _ in 0..8 {
            let s = ElemSet::from_mask(rng.gen::<u64>() & lat.all().mask());
            // Brute-force least upper bound: scan all common upper bounds.
            let ubs: Vec<_> = lat
                .elements()
                .filter(|u| s.iter().all(|p| lat.leq(p, *u)))
                .collect();
            let lub = ubs
                .iter()
                .copied()
                .find(|u| ubs.iter().all(|v| lat.leq(*u, *v)));
            prop_assert_eq!(Some(lat.join_all(s)), lub);

            let lbs: Vec<_> = lat
                .elements()
                .filter(|l| s.iter().all(|p| lat.leq(*l, p)))
                .collect();
            let glb = lbs
                .iter()
                .copied()
                .find(|l| lbs.iter().all(|m| lat.leq(*m, *l)));
            if s.is_empty() {
                // Empty meet is the top, which every built lattice has.
                prop_assert_eq!(lat.meet_all(s).ok(), lat.top());
            } else {
                prop_assert_eq!(lat.meet_all(s).ok(), glb);
            }
        }
    }
}
