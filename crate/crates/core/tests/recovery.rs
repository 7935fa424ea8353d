use alignh_core::recovery::*;
use alignh_core::reductions::*;
use alignh_core::solvers::{solve_exact, solve_pwsa};
use alignh_core::witness::{hamming, BitString, PartitionWitness};
use proptest::prelude::*;

fn arb_formula() -> impl Strategy<Value = CnfFormula> {
    (1usize..=4).prop_flat_map(|n| {
        let lit = (1..=n, any::<bool>()).prop_map(|(v, p)| if p { Lit::pos(v) } else { Lit::neg(v) });
        prop::collection::vec(prop::collection::vec(lit, 1..=3), 1..=5)
            .prop_map(move |c| preprocess(&CnfFormula::new(n, c).unwrap(), true).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn canonical_witness_round_trip(f in arb_formula(), amplify in 0usize..3, dummy in any::<bool>()) {
        let (inst, map) = sat_to_wsa_amplified(&f, 1, amplify, dummy).unwrap();
        for asg in satisfying_assignments(&map.formula) {
            let w = witness_from_assignment(&map, &asg, &inst).unwrap();
            prop_assert_eq!(w.bits.count_ones(), inst.f().len() - 1);
            let back = decode_assignment(&w, &map, &inst).unwrap().unwrap();
            prop_assert!(map.formula.is_satisfied_by(&back));
        }
    }

    #[test]
    fn readout_agrees_with_decoding(f in arb_formula(), amplify in 1usize..4) {
        let (inst, map) = sat_to_wsa_amplified(&f, 1, amplify, true).unwrap();
        let r = solve_pwsa(&inst).unwrap();
        prop_assert_eq!(r.canonical_witness.is_some(), brute_force_satisfiable(&f));
        if let Some(w) = r.canonical_witness {
            let w = w.as_partition().unwrap().clone();
            let asg = decode_assignment(&w, &map, &inst).unwrap().unwrap();
            for v in 1..=map.formula.num_vars() {
                if let Some(value) = direct_block_readout(&w, &map, v).unwrap() {
                    prop_assert_eq!(value, asg.value(v), "var {}", v);
                }
            }
        }
    }

    #[test]
    fn hamming_corruption_flips_exactly_the_budget(
        bits in prop::collection::vec(any::<bool>(), 1..40),
        frac in 0.0f64..=1.0,
        seed in any::<u64>(),
        adversarial in any::<bool>(),
    ) {
        let w = BitString::new(bits);
        let k = (w.len() as f64 * frac) as usize;
        let strategy = if adversarial {
            let half = w.len() / 2;
            let t = BitString::ones(half);
            let target = BlockPattern::contiguous(0, t.clone(), BitString::zeros(half)).unwrap();
            CorruptionStrategy::AdversarialBlock { target, seed }
        } else {
            CorruptionStrategy::Random { seed }
        };
        let budget = CorruptionBudget { max_ops: k, mode: CorruptionMode::Hamming, strategy };
        let c = corrupt(&w, &budget).unwrap();
        prop_assert_eq!(hamming(w.bits(), c.bits()).unwrap(), k);
        prop_assert_eq!(c, corrupt(&w, &budget).unwrap());
    }

    #[test]
    fn majority_survives_minority_damage(a in 1usize..10, b in 1usize..10, seed in any::<u64>()) {
        let truth = BitString::new((0..a + b).map(|i| i < a).collect());
        let other = BitString::new(truth.bits().iter().map(|x| !x).collect());
        let p = BlockPattern::contiguous(0, truth.clone(), other).unwrap();
        let flips = (a + b - 1) / 2;
        let budget = CorruptionBudget {
            max_ops: flips,
            mode: CorruptionMode::Hamming,
            strategy: CorruptionStrategy::AdversarialBlock { target: p.clone(), seed },
        };
        prop_assert!(majority_decode(&corrupt(&truth, &budget).unwrap(), &p).unwrap());
    }
}

#[test]
fn decoded_covers_are_covers() {
    let graphs = [
        Graph::complete(3),
        Graph::complete(4),
        Graph::new(4, vec![(1, 2), (2, 3), (3, 4)]).unwrap(),
        Graph::new(4, vec![(1, 2), (1, 3), (1, 4)]).unwrap(),
        Graph::new(4, vec![(1, 2), (3, 4)]).unwrap(),
    ];
    for g in &graphs {
        for k in 1..=g.num_vertices() {
            let (inst, map) = vc_to_wsa(g, k).unwrap();
            if inst.e().len() > 12 {
                continue;
            }
            let r = solve_exact(&inst, 20).unwrap();
            assert_eq!(r.best_weight.is_one(), has_cover(g, k));
            if let Some(a) = r.best_alignment.filter(|_| r.best_weight.is_one()) {
                let c = decode_cover(&a, &map).unwrap();
                assert!(c.covers(g) && c.len() <= k, "{g:?} {k} {c:?}");
            }
        }
    }
}

/// Every length-preserving script of at most `t` unit operations applied to
/// `s`, as resulting strings tagged with their (pairs, replacements) counts.
fn scripts(s: &[bool], t: usize) -> Vec<(Vec<bool>, usize, usize)> {
    fn go(cur: Vec<bool>, n: usize, left: usize, dels: usize, ins: usize, reps: usize, out: &mut Vec<(Vec<bool>, usize, usize)>) {
        if cur.len() == n && dels == ins {
            out.push((cur.clone(), dels, reps));
        }
        if left == 0 {
            return;
        }
        for i in 0..cur.len() {
            let mut d = cur.clone();
            d.remove(i);
            go(d, n, left - 1, dels + 1, ins, reps, out);
            let mut r = cur.clone();
            r[i] = !r[i];
            go(r, n, left - 1, dels, ins, reps + 1, out);
        }
        for i in 0..=cur.len() {
            for b in [false, true] {
                let mut x = cur.clone();
                x.insert(i, b);
                go(x, n, left - 1, dels, ins + 1, reps, out);
            }
        }
    }
    let mut out = Vec::new();
    go(s.to_vec(), s.len(), t, 0, 0, 0, &mut out);
    out
}

#[test]
fn edit_scripts_damage_each_part_at_most_once_per_pair() {
    for len in 1..=8 {
        for a in 0..=len {
            let s: Vec<bool> = (0..len).map(|i| i < a).collect();
            for (r, pairs, reps) in scripts(&s, 3) {
                let u = (0..a).filter(|&i| !r[i]).count();
                let w = (a..len).filter(|&i| r[i]).count();
                assert!(u <= pairs + reps && w <= pairs + reps, "{s:?} -> {r:?}");
                assert!(u + w <= 2 * pairs + reps);
            }
        }
    }
}

#[test]
fn sat_assignment_and_cover_experiments_run() {
    for kind in [ExperimentKind::SatAssignment, ExperimentKind::VcCover, ExperimentKind::Dual] {
        let cfg = RecoveryConfig { kind, amplification: 16, trials: 200, budget: Some(7), ..RecoveryConfig::default() };
        let r = run_recovery_experiment(&cfg).unwrap();
        assert_eq!(r.success_rate, 1.0, "{kind:?}");
        let rate = r.rows.iter().filter(|x| x.success).count() as f64 / r.rows.len() as f64;
        assert_eq!(rate, r.success_rate);
    }
    let edit = RecoveryConfig { metric: Metric::Edit, trials: 100, budget: Some(14), ..RecoveryConfig::default() };
    let r = run_recovery_experiment(&edit).unwrap();
    assert!(r.rows.iter().all(|x| x.distance <= 14));
    assert_eq!(r.success_rate, 1.0);
}

#[test]
fn negative_budget_is_a_config_error() {
    let cfg = RecoveryConfig { amplification: 1, epsilon: 1.0, ..RecoveryConfig::default() };
    assert!(matches!(run_recovery_experiment(&cfg), Err(alignh_core::Error::Config(_))));
}

#[test]
fn partition_witness_roundtrip_through_strings() {
    let w = PartitionWitness::new("0110".parse().unwrap());
    assert_eq!(w.to_string(), "0110");
}
