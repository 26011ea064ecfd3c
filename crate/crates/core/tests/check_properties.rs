use hardy_core::checks::{
    jcin_margin, jcin_sweep, rearrange_samesum, replay_decreasing, replay_jcin,
    reproduce_lsc_example, verify_cut, verify_decreasing, verify_jcin, weighted_sum_exact, CutMode,
    SweepConfig, Verdict,
};
use hardy_core::rational::{self, int, ratio};
use hardy_core::weights::coarsen;
use hardy_core::{Blocks, MeanSpec, PointVector, StepFunction, WeightSeq, WeightVector};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn concave_monotone() -> impl Strategy<Value = MeanSpec> {
    prop_oneof![
        (-16i32..=8).prop_map(|k| MeanSpec::power(k as f64 / 8.0).unwrap()),
        Just(MeanSpec::power(f64::NEG_INFINITY).unwrap()),
        Just("quasiarithmetic:log".parse::<MeanSpec>().unwrap()),
        Just("quasiarithmetic:sqrt".parse::<MeanSpec>().unwrap()),
    ]
}

fn instance() -> impl Strategy<Value = (PointVector, WeightVector)> {
    (1usize..10).prop_flat_map(|n| {
        (
            prop::collection::vec(-4.0f64..4.0, n)
                .prop_map(|v| PointVector::new(v.into_iter().map(f64::exp2).collect()).unwrap()),
            prop::collection::vec((1i64..12, 1i64..6), n).prop_map(|v| {
                WeightVector::from_rationals(v.into_iter().map(|(p, q)| ratio(p, q)).collect())
                    .unwrap()
            }),
        )
    })
}

/// `sum_{m <= n} lambda_m / Lambda_m` from the exact terms.
fn ratio_sum(w: &WeightSeq, n: usize) -> BigRational {
    let mut cum = BigRational::zero();
    let mut total = BigRational::zero();
    for m in 1..=n {
        let t = w.term_exact(m).unwrap();
        cum += &t;
        total += t / &cum;
    }
    total
}

fn base() -> impl Strategy<Value = WeightSeq> {
    prop_oneof![
        Just(WeightSeq::ones()),
        Just(WeightSeq::dyadic()),
        (1i64..9).prop_map(|p| WeightSeq::geometric(ratio(p, 10)).unwrap()),
        (0i64..3).prop_map(|a| WeightSeq::power(a as f64).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rearrangement_keeps_the_sum_and_sorts((x, w) in instance()) {
        let r = rearrange_samesum(&x, &w).unwrap();
        let exact: Vec<BigRational> = x.as_slice().iter().map(|&v| rational::from_f64(v).unwrap()).collect();
        prop_assert_eq!(weighted_sum_exact(&r.y_exact, &w), weighted_sum_exact(&exact, &w));
        prop_assert!(r.y_exact.windows(2).all(|p| p[0] >= p[1]));
        prop_assert_eq!(r.y.len(), x.len());
    }

    #[test]
    fn prefix_means_dominate_for_concave_means(m in concave_monotone(), (x, w) in instance()) {
        let rep = verify_jcin(&m, &x, &w).unwrap();
        prop_assert!(rep.worst_margin >= -1e-10, "{m}: {}", rep.worst_margin);
        prop_assert!(rep.pass);
    }

    #[test]
    fn arithmetic_cut_is_exact(lam in base(), sizes in prop::collection::vec(1usize..5, 1..6), n in 1usize..25) {
        let b = Blocks::list(sizes).unwrap();
        let psi = coarsen(&lam, b.clone());
        let rep = verify_cut(&CutMode::Arithmetic, &psi, &lam, n, 0.0).unwrap();
        prop_assert!(rep.pass);
        // Independent restatement of the inequality in exact arithmetic.
        let lhs = ratio_sum(&psi, n);
        let rhs = ratio_sum(&lam, b.boundary(n));
        prop_assert!(lhs <= rhs);
    }
}

#[test]
fn convex_witnesses_replay() {
    let m = MeanSpec::power(3.0).unwrap();
    let rep = jcin_sweep(
        &m,
        &SweepConfig {
            instances: 200,
            seed: 4,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
    let witness = rep.witness.as_ref().unwrap();
    let replayed = replay_jcin(&m, witness).unwrap();
    assert!((replayed - rep.worst_margin).abs() <= 1e-9 * (1.0 + rep.worst_margin.abs()));
    let x = PointVector::new(witness.x.clone()).unwrap();
    let w = WeightVector::parse(&witness.weights.join(",")).unwrap();
    assert!(jcin_margin(&m, &x, &w).unwrap().0 < 0.0);
}

#[test]
fn semicontinuity_direction() {
    let t = reproduce_lsc_example(20, 200, 1e-4).unwrap();
    assert!(t.pass);
    assert!(t.tail_min >= t.baseline);
    assert!((t.limit - t.baseline - 0.5).abs() < 1e-12);
    assert!((t.rows[19].value - t.limit).abs() < 1e-4);
    // Values approach the limit from below once k is large.
    assert!(t.rows[10..].windows(2).all(|p| p[0].value <= p[1].value));
}

#[test]
fn decreasing_means_of_step_functions() {
    let f = StepFunction::new(
        vec![int(0), int(1), ratio(5, 2), int(4)],
        vec![9.0, 2.0, 0.5],
    )
    .unwrap();
    let grid: Vec<BigRational> = (1..=16).map(|k| ratio(k, 4)).collect();
    for m in [
        "min",
        "harmonic",
        "geometric",
        "arithmetic",
        "power:3",
        "max",
    ] {
        let m: MeanSpec = m.parse().unwrap();
        let rep = verify_decreasing(&m, &f, &grid).unwrap();
        assert!(rep.pass, "{m}");
        if let Some(wit) = &rep.witness {
            assert!((replay_decreasing(&m, wit).unwrap() - rep.worst_margin).abs() <= 1e-9);
        }
    }
}
