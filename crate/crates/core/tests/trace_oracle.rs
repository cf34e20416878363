mod common;

use akalab::traces::{canonicalize, parse_trace, ufresh, validate_trace, ActionId};
use common::{alphabet, explore, ident, random_valid_trace, Product};
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn two_by_two() -> Vec<ActionId> {
    alphabet(&[ident("A"), ident("B")], 2)
}

#[test]
fn checker_matches_product_oracle_on_all_traces_up_to_8() {
    let letters = two_by_two();
    assert_eq!(letters.len(), 38);
    let e = explore(&letters, 8);
    assert!(e.mismatch.is_none(), "disagreement on {:?}", e.mismatch);
    // Frozen from the product oracle. Length 1: four entry actions per
    // identity and UE session, plus PNAI(0,0) and CNAI(0,0).
    assert_eq!(
        e.valid_by_len,
        vec![1, 18, 242, 2_450, 20_938, 158_312, 1_065_310, 6_373_232, 33_978_472]
    );
    assert_eq!(e.valid_by_len.iter().sum::<u64>(), 41_598_975);
}

#[test]
fn literal_enumeration_up_to_4() {
    let letters = two_by_two();
    let mut frontier: Vec<Vec<ActionId>> = vec![Vec::new()];
    for _ in 0..4 {
        let mut next = Vec::with_capacity(frontier.len() * letters.len());
        for t in &frontier {
            for a in &letters {
                let mut t2 = t.clone();
                t2.push(a.clone());
                let v = validate_trace(&t2);
                assert_eq!(v.valid, Product::accepts(&t2), "{t2:?}");
                if !v.valid {
                    let first = v.first_violation.unwrap();
                    assert!(validate_trace(&t2[..first]).valid);
                    assert!(!Product::accepts(&t2[..=first]));
                }
                next.push(t2);
            }
        }
        frontier = next;
    }
}

#[test]
fn random_length_8_samples() {
    let letters = two_by_two();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10_000 {
        let t: Vec<ActionId> = (0..8).map(|_| letters.choose(&mut rng).unwrap().clone()).collect();
        assert_eq!(validate_trace(&t).valid, Product::accepts(&t), "{t:?}");
    }
    for _ in 0..2_000 {
        let t = random_valid_trace(&mut rng, &letters, 8);
        assert!(validate_trace(&t).valid);
    }
}

#[test]
fn ufresh_preserves_validity_on_random_valid_traces() {
    let letters = alphabet(&[ident("A"), ident("B")], 4);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut with_ns = 0;
    for _ in 0..1_000 {
        let t = random_valid_trace(&mut rng, &letters, 14);
        assert!(validate_trace(&t).valid);
        with_ns += usize::from(t.iter().any(|a| matches!(a, ActionId::Ns(..))));
        let f = ufresh(&t, 16).unwrap();
        assert!(validate_trace(&f).valid, "{t:?}");
        assert_eq!(canonicalize(&ufresh(&f, 32).unwrap()), canonicalize(&f));
    }
    assert!(with_ns > 300, "samples exercise renewals: {with_ns}");
}

#[test]
fn example_traces() {
    let supi = parse_trace("PNAI(0,0) PUAI(A,0,1) PNAI(0,1) PUAI(A,0,2) FNAI(0) FUAI(A,0)").unwrap();
    assert!(validate_trace(&supi).valid);
    assert!(Product::accepts(&supi));
    let guti = parse_trace("CUAI(A,0,0) CNAI(0,0) CUAI(A,0,1) CNAI(0,1) FNAI(0) FUAI(A,0)").unwrap();
    assert!(validate_trace(&guti).valid);
    let renewed = parse_trace("CUAI(A,0,0) NS(A,1) CUAI(A,2,0)").unwrap();
    assert_eq!(
        ufresh(&renewed, 1).unwrap(),
        parse_trace("CUAI(A,0,0) NS(A#1,1) CUAI(A#1,2,0)").unwrap()
    );
}
