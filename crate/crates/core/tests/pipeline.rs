mod common;

use std::path::PathBuf;

use num_rational::BigRational;

use ecbf_core::modsym::{ModularSymbols, DEFAULT_DENOMINATOR_BOUND};
use ecbf_core::verifier::{
    check_assumptions, check_keylemma, check_theorem_with, element_valuation, load_fixture, lhs_valuation_with,
    primes_above, primes_above_direct, rhs_value, Mode, Outcome, SelmerFixture, TheoremReport, Verdict,
};
use ecbf_core::Error;

use common::{e11, synthetic_element};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(n: u32) -> SelmerFixture {
    load_fixture(fixtures().join(format!("11a1_p7_n{n}.json"))).unwrap()
}

#[test]
fn bundled_fixtures_load() {
    for n in 0..=1 {
        let f = fixture(n);
        assert_eq!((f.p, f.n, f.sel_p_infty_order, f.rank, f.torsion_p_part), (7, n, 1, 0, 1));
        assert!(!f.source.is_empty());
    }
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = std::fs::read_to_string(fixtures().join("11a1_p7_n0.json")).unwrap();
    std::fs::write(&bad, text.replace("\"sel_p_infty_order\": 1", "\"sel_p_infty_order\": 6")).unwrap();
    let err = load_fixture(&bad).unwrap_err();
    assert!(matches!(&err, Error::Fixture(m) if m.contains("sel_p_infty_order")), "{err}");
    assert!(load_fixture(dir.path().join("missing.json")).is_err());
}

#[test]
fn report_round_trips_and_is_stable() {
    let e = e11();
    let ms = ModularSymbols::new(&e, 128, DEFAULT_DENOMINATOR_BOUND).unwrap();
    let ms_hi = ModularSymbols::new(&e, 256, DEFAULT_DENOMINATOR_BOUND).unwrap();
    for n in 0..=1 {
        let rep = check_theorem_with(&ms, 7, n, &fixture(n), 8).unwrap();
        let back: TheoremReport = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
        assert_eq!(rep.rhs_value, rep.reduction_factor * rep.tamagawa_factor * rep.path_integral_limit);
        for (m, ms) in [(12, &ms), (16, &ms_hi), (24, &ms_hi)] {
            let again = check_theorem_with(ms, 7, n, &fixture(n), m).unwrap();
            assert_eq!((again.verdict, again.lhs_valuation, again.rhs_value), (rep.verdict, rep.lhs_valuation, rep.rhs_value));
        }
        let text = rep.to_string();
        assert!(text.contains("verdict: Pass") && text.contains("Tamagawa factor = 1"));
    }
}

#[test]
fn perturbing_a_factor_flips_the_verdict() {
    let e = e11();
    let ms = ModularSymbols::new(&e, 128, DEFAULT_DENOMINATOR_BOUND).unwrap();
    let mut f = fixture(1);
    f.sel_p_infty_order = 7;
    let rep = check_theorem_with(&ms, 7, 1, &f, 8).unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
    assert!(rep.discrepancy.unwrap().contains("rhs - lhs = 1"));
    f.sel_p_infty_order = 49;
    assert_eq!(check_theorem_with(&ms, 7, 1, &f, 8).unwrap().verdict, Verdict::Fail);
}

#[test]
fn hypotheses_and_modes() {
    let e = e11();
    let log = check_assumptions(&e, 7, 0, Some(&fixture(0)), Mode::Theorem);
    assert!(log.iter().all(|c| c.outcome == Outcome::Pass));
    let mut ranked = fixture(0);
    ranked.rank = 2;
    let log = check_assumptions(&e, 7, 0, Some(&ranked), Mode::Theorem);
    assert!(log.iter().any(|c| c.name == "rank 0" && c.outcome == Outcome::Fail));
    let log = check_assumptions(&e, 7, 0, Some(&ranked), Mode::KeyLemma);
    assert!(log.iter().all(|c| c.outcome != Outcome::Fail));
    let k = check_keylemma(&e, 7, 0, &ranked, 8, 128).unwrap();
    assert_eq!(k.verdict, Verdict::ReportOnly);
    let k = check_keylemma(&e, 7, 1, &fixture(1), 8, 128).unwrap();
    assert_eq!((k.verdict, k.residual), (Verdict::Pass, 0));
    // Mismatched fixture is an input error.
    let ms = ModularSymbols::new(&e, 128, DEFAULT_DENOMINATOR_BOUND).unwrap();
    assert!(matches!(check_theorem_with(&ms, 7, 1, &fixture(0), 8), Err(Error::Fixture(_))));
}

#[test]
fn right_hand_side_factors() {
    let e = e11();
    let r = rhs_value(&e, 7, 0, &fixture(0)).unwrap();
    assert_eq!((r.reduction_factor, r.tamagawa_factor, r.path_integral_limit), (1, 1, 1));
    // #E~(F_5) = 5.
    let mut f5 = fixture(0);
    f5.p = 5;
    assert_eq!(rhs_value(&e, 5, 0, &f5).unwrap().reduction_factor, 25);
    // 11^4 = 16 mod 25 has order 5, so 11 is inert in the whole 5-tower.
    for n in 1..=3 {
        assert_eq!(primes_above(11, 5, n), 1);
        assert_eq!(primes_above_direct(11, 5, n), 1);
    }
    // 7^4 = 1 mod 25 but 26 mod 125: 5 primes above 7 from the first layer on.
    assert_eq!(primes_above(7, 5, 1), 5);
    assert_eq!(primes_above(7, 5, 2), 5);
    assert_eq!(primes_above_direct(7, 5, 2), 5);
    assert_eq!(rhs_value(&e, 5, 1, &{ let mut f = f5.clone(); f.n = 1; f }).unwrap().tamagawa_factor, 5);
}

#[test]
fn analytic_side_and_synthetic_elements() {
    let e = e11();
    let ms = ModularSymbols::new(&e, 128, DEFAULT_DENOMINATOR_BOUND).unwrap();
    for n in 0..=2 {
        let l = lhs_valuation_with(&ms, 7, n, 4).unwrap();
        assert_eq!((l.valuation, l.mu, l.lambda), (0, 0, 0));
    }
    // (mu, lambda) = (1, 0), n = 1, p = 3: valuation 1 at zeta = 1 plus 2 from the primitive roots.
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let (g, _) = synthetic_element(3, 1, 0, 12, &mut rng);
    assert_eq!(element_valuation(&g, 1).unwrap(), 3);
    assert_eq!(ms.plus(0, 1).unwrap(), BigRational::new(1.into(), 5.into()));
}
