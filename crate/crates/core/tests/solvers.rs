mod common;

use alignh_core::model::{alignment_weight, enumerate_partitions, Link, Span, Weight, WsaInstance};
use alignh_core::solvers::{decide_weight_one, max_weight, solve_exact, solve_monotone_dp, solve_pwsa, SolveStatus};
use alignh_core::witness::decode_partition;
use alignh_core::{Error, DEFAULT_GUARD};
use common::*;
use proptest::prelude::*;

fn same(a: &Weight, b: &Weight) -> bool {
    a.as_ratio() == b.as_ratio()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_matches_full_enumeration(inst in arb_instance(6, false, false)) {
        let r = solve_exact(&inst, DEFAULT_GUARD).unwrap();
        let brute = brute_best(&inst, false);
        prop_assert!(same(&r.best_weight, &brute), "{} vs {}", r.best_weight, brute);
        match r.best_alignment {
            Some(a) => prop_assert!(same(&alignment_weight(&inst, &a).unwrap(), &r.best_weight)),
            None => prop_assert!(r.best_weight.is_zero()),
        }
        prop_assert_eq!(r.status == SolveStatus::Found, !brute.is_zero());
    }

    #[test]
    fn mask_search_matches_enumeration(inst in arb_instance(6, false, false)) {
        let brute = brute_best(&inst, false);
        prop_assert!(same(&max_weight(&inst).unwrap(), &brute));
    }

    #[test]
    fn decision_matches_enumeration(inst in arb_instance(6, true, false)) {
        let brute = brute_best(&inst, false);
        prop_assert_eq!(decide_weight_one(&inst).unwrap(), brute.is_one());
        prop_assert_eq!(solve_exact(&inst, DEFAULT_GUARD).unwrap().best_weight.is_one(), brute.is_one());
    }

    #[test]
    fn pwsa_finds_lexicographically_first_partition(inst in arb_instance(6, true, true)) {
        prop_assume!(inst.f().len() <= inst.e().len());
        let r = solve_pwsa(&inst).unwrap();
        let (ne, nf) = (inst.e().len(), inst.f().len());
        // oracle: first partition in lex order with a weight-1 matching
        let expected = if ne == 0 {
            None
        } else {
            enumerate_partitions(ne, Some(nf), 63).unwrap().find(|p| {
                permutations_one(&inst, p)
            })
        };
        match (r.canonical_witness, expected) {
            (Some(w), Some(p)) => prop_assert_eq!(decode_partition(w.as_partition().unwrap()), p),
            (None, None) => prop_assert!(ne == 0 || r.status == SolveStatus::NoPositiveAlignment),
            (got, want) => prop_assert!(false, "{:?} vs {:?}", got, want),
        }
    }

    #[test]
    fn monotone_matches_restricted_enumeration(inst in arb_instance(5, false, false)) {
        let r = solve_monotone_dp(&inst).unwrap();
        prop_assert!(same(&r.best_weight, &brute_best(&inst, true)));
        if let Some(a) = r.best_alignment {
            prop_assert!(a.is_monotone());
        }
    }
}

fn permutations_one(inst: &WsaInstance, phrases: &[Span]) -> bool {
    use itertools::Itertools;
    let nf = inst.f().len();
    (1..=nf).permutations(nf).any(|perm| {
        phrases.iter().zip(perm).all(|(&p, k)| inst.phi().is_one(&Link::new(p, Span::single(k))))
    })
}

#[test]
fn mask_search_handles_long_sentences() {
    // identity on 30 words with a decoy merged link
    let n = 30;
    let mut phi = alignh_core::WeightFn::new();
    for k in 1..=n {
        phi.set_one(Link::new(Span::single(k), Span::single(k)));
    }
    phi.set_one(Link::new(Span::new(0, 2), Span::single(1)));
    let inst = WsaInstance::new(sentence(n, "e"), sentence(n, "f"), phi).unwrap();
    assert!(decide_weight_one(&inst).unwrap());
    assert_eq!(solve_exact(&inst, DEFAULT_GUARD), Err(Error::SizeGuard { len: 30, guard: 20 }));
    let r = solve_pwsa(&inst).unwrap();
    assert_eq!(r.canonical_witness.unwrap().bits().count_ones(), n - 1);
}
