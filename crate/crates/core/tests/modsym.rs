mod common;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ecbf_core::curve::{count_points, EllipticCurve};
use ecbf_core::modsym::{Decomposition, ModularSymbols, SymbolCache, DEFAULT_DENOMINATOR_BOUND};

use common::e11;

fn hecke_holds(ms: &ModularSymbols, l: i64, a: i64, m: i64) -> bool {
    let a_l = count_points(ms.curve(), l as u64).unwrap().a_ell;
    let mut lhs = ms.plus(l * a, m).unwrap();
    for j in 0..l {
        lhs += ms.plus(a + j * m, l * m).unwrap();
    }
    lhs == ms.plus(a, m).unwrap() * BigRational::from_integer(a_l.into())
}

#[test]
fn hecke_on_eleven_a1_for_more_primes() {
    let ms = ModularSymbols::new(&e11(), 128, DEFAULT_DENOMINATOR_BOUND).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..30 {
        let m = rng.gen_range(1..=40);
        let a = rng.gen_range(0..m);
        for l in [5, 7] {
            assert!(hecke_holds(&ms, l, a, m), "l={l} r={a}/{m}");
        }
    }
}

#[test]
fn rank_one_curve() {
    let e = EllipticCurve::new([0, 0, 1, -1, 0]).unwrap();
    let ms = ModularSymbols::new(&e, 128, DEFAULT_DENOMINATOR_BOUND).unwrap();
    assert_eq!(ms.plus(0, 1).unwrap(), BigRational::from_integer(0.into()));
    for (a, m) in [(1, 2), (1, 3), (2, 5), (3, 7)] {
        assert!(hecke_holds(&ms, 2, a, m), "r={a}/{m}");
    }
}

#[test]
fn decompositions_agree_with_direct_evaluation() {
    let ms = ModularSymbols::new(&e11(), 128, DEFAULT_DENOMINATOR_BOUND).unwrap();
    for (a, m) in [(1, 7), (3, 7), (5, 49), (17, 343), (-4, 9)] {
        let regular = ms.plus_via(a, m, Decomposition::Regular).unwrap();
        let backward = ms.plus_via(a, m, Decomposition::Backward).unwrap();
        assert_eq!(regular, backward);
        assert_eq!(regular, ms.plus_direct(a, m).unwrap());
        assert_eq!(regular, ms.plus(-a, m).unwrap());
    }
}

#[test]
fn symbol_cache_serves_repeat_queries() {
    let dir = tempfile::tempdir().unwrap();
    let cache = SymbolCache::new(dir.path());
    let ms = ModularSymbols::new(&e11(), 128, DEFAULT_DENOMINATOR_BOUND).unwrap();
    let first = cache.symbols_at(&ms, 49).unwrap();
    assert_eq!(first.len(), 42);
    assert_eq!(cache.load(&e11(), 49).unwrap(), first);
    assert_eq!(cache.symbols_at(&ms, 49).unwrap(), first);
}
