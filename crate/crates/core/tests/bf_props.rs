mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ecbf_core::bf::{
    bf_sum_bruteforce, bf_sum_closed, compare_cup_orders, cross_branch_pairing, isotypic_split_sum, FiniteBFSystem,
};

use common::*;

fn shape_strategy() -> impl Strategy<Value = (u64, Vec<u32>)> {
    (prop_oneof![Just(3u64), Just(5u64)], 0usize..shapes(4).len()).prop_map(|(p, i)| {
        let mut s = shapes(4)[i].clone();
        if p == 5 && s.iter().sum::<u32>() > 3 {
            s.pop();
        }
        (p, s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn brute_force_matches_closed_form((p, shape) in shape_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_system(p, &shape, &mut rng);
        prop_assert!(s.is_perfect_by_enumeration());
        prop_assert_eq!(s.is_perfect_by_smith(), true);
        prop_assert_eq!(bf_sum_bruteforce(&s).unwrap(), bf_sum_closed(&s).unwrap());
        let orders = compare_cup_orders(&s).unwrap();
        prop_assert!(orders.agree);
    }

    #[test]
    fn zero_delta_gives_square((p, shape) in shape_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = random_system(p, &shape, &mut rng);
        for row in s.bockstein.iter_mut() {
            row.iter_mut().for_each(|x| *x = 0);
        }
        prop_assert_eq!(bf_sum_bruteforce(&s).unwrap(), s.group_order().pow(2));
    }

    #[test]
    fn degenerate_pairings_still_give_integers(seed in any::<u64>()) {
        // Kill one coordinate of the pairing: the sum stays an integer, the closed form refuses.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = random_system(3, &[2, 1], &mut rng);
        s.pairing[1] = vec![0, 0];
        s.pairing[0][1] = 0;
        prop_assert!(!s.is_perfect_by_enumeration());
        prop_assert!(!s.is_perfect_by_smith());
        prop_assert!(bf_sum_bruteforce(&s).is_ok());
        prop_assert!(bf_sum_closed(&s).is_err());
    }

    #[test]
    fn product_of_components(seed in any::<u64>(), regular in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = if regular {
            regular_action_system(if seed % 2 == 0 { 3 } else { 5 }, 1, false, &mut rng)
        } else {
            character_system(if seed % 2 == 0 { 3 } else { 5 }, &mut rng)
        };
        let r = isotypic_split_sum(&s).unwrap();
        prop_assert_eq!(r.component_values.unwrap().values().product::<u128>(), r.value);
        prop_assert!(cross_branch_pairing(&s).unwrap().iter().all(|t| t.2));
    }
}

#[test]
fn regular_representation_with_zero_delta() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in [3u64, 5] {
        let s = regular_action_system(p, 1, true, &mut rng);
        let r = isotypic_split_sum(&s).unwrap();
        let comps = r.component_values.unwrap();
        assert_eq!(comps.len(), p as usize - 1);
        assert!(comps.values().all(|&v| v == (p * p) as u128));
        assert_eq!(r.value, (p as u128).pow(2 * (p as u32 - 1)));
    }
}

#[test]
fn trivial_action_single_component() {
    let s = FiniteBFSystem {
        p: 3,
        m: 1,
        orders: vec![3],
        pairing: vec![vec![1]],
        bockstein: vec![vec![0]],
        action: Some(vec![vec![vec![1]]]),
    };
    let r = isotypic_split_sum(&s).unwrap();
    let comps = r.component_values.unwrap();
    assert_eq!(comps[&0], 9);
    assert_eq!(comps[&1], 1);
    assert_eq!(r.value, 9);
}

#[test]
fn smith_and_enumeration_agree_on_large_groups() {
    // |G| = 5^6 is above the enumeration threshold, so is_perfect takes the Smith path.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = random_system(5, &[2, 2, 2], &mut rng);
    assert!(s.group_order() > ecbf_core::bf::ENUMERATION_LIMIT);
    assert!(s.is_perfect());
    assert!(s.is_perfect_by_enumeration());
}

#[test]
fn descriptor_file_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = regular_action_system(3, 2, false, &mut rng);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sys.json");
    std::fs::write(&path, serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(FiniteBFSystem::load(&path).unwrap(), s);
}
