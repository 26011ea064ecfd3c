use hardy_core::axioms::{check_axioms, Axiom};
use hardy_core::families::{power_mean, quasiarithmetic_mean, Generator};
use hardy_core::rational::ratio;
use hardy_core::{chi, evaluate, integral_eval, shuffle, MeanSpec, PointVector, WeightVector};
use num_rational::BigRational;
use proptest::prelude::*;

fn mean() -> impl Strategy<Value = MeanSpec> {
    prop_oneof![
        (-40i32..=40).prop_map(|k| MeanSpec::power(k as f64 / 8.0).unwrap()),
        Just(MeanSpec::power(f64::INFINITY).unwrap()),
        Just(MeanSpec::power(f64::NEG_INFINITY).unwrap()),
        prop::sample::select(vec![
            "quasiarithmetic:log",
            "quasiarithmetic:sqrt",
            "quasiarithmetic:exp",
            "quasiarithmetic:power:3"
        ])
        .prop_map(|s| s.parse::<MeanSpec>().unwrap()),
    ]
}

/// Points in [1/8, 8] and rational weights, of equal length.
fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<BigRational>)> {
    (1usize..8).prop_flat_map(|n| {
        (
            prop::collection::vec(-3.0f64..3.0, n)
                .prop_map(|v| v.into_iter().map(f64::exp2).collect()),
            prop::collection::vec((1i64..30, 1i64..12), n)
                .prop_map(|v| v.into_iter().map(|(p, q)| ratio(p, q)).collect()),
        )
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mean_value_property(m in mean(), (x, w) in instance()) {
        let x = PointVector::new(x).unwrap();
        let v = evaluate(&m, &x, &WeightVector::from_rationals(w).unwrap()).unwrap();
        prop_assert!(v >= x.min() * (1.0 - 1e-12) && v <= x.max() * (1.0 + 1e-12), "{v} outside [{}, {}]", x.min(), x.max());
    }

    #[test]
    fn nullhomogeneity(m in mean(), (x, w) in instance(), (p, q) in (1i64..1000, 1i64..1000)) {
        let x = PointVector::new(x).unwrap();
        let w = WeightVector::from_rationals(w).unwrap();
        let t = ratio(p, q);
        // Exact normalization makes rational scaling bit-for-bit invisible.
        prop_assert_eq!(evaluate(&m, &x, &w).unwrap(), evaluate(&m, &x, &w.scaled(&t).unwrap()).unwrap());
        let wf = WeightVector::from_f64(&w.to_f64()).unwrap();
        let sf = WeightVector::from_f64(&w.to_f64().iter().map(|v| v * 3.7).collect::<Vec<_>>()).unwrap();
        prop_assert!(close(evaluate(&m, &x, &wf).unwrap(), evaluate(&m, &x, &sf).unwrap(), 1e-12));
    }

    #[test]
    fn reduction(m in mean(), (x, w) in instance(), seed in prop::collection::vec((1i64..30, 1i64..12), 8)) {
        let mu: Vec<BigRational> = seed.iter().take(x.len()).map(|&(p, q)| ratio(p, q)).collect();
        let summed: Vec<BigRational> = w.iter().zip(&mu).map(|(a, b)| a + b).collect();
        let lhs = evaluate(&m, &PointVector::new(x.clone()).unwrap(), &WeightVector::from_rationals(summed).unwrap()).unwrap();
        let rhs = evaluate(
            &m,
            &PointVector::new(shuffle(&x, &x).unwrap()).unwrap(),
            &WeightVector::from_rationals(shuffle(&w, &mu).unwrap()).unwrap(),
        )
        .unwrap();
        prop_assert!(close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    #[test]
    fn elimination(k in -32i32..=32, (x, w) in instance(), extra in -3.0f64..3.0) {
        let m = MeanSpec::power(k as f64 / 8.0).unwrap();
        let base = evaluate(&m, &PointVector::new(x.clone()).unwrap(), &WeightVector::from_rationals(w.clone()).unwrap()).unwrap();
        let total: f64 = w.iter().map(hardy_core::rational::to_f64).sum();
        let diff = |eps: f64| {
            let mut xs = x.clone();
            xs.push(extra.exp2());
            let mut ws: Vec<f64> = w.iter().map(hardy_core::rational::to_f64).collect();
            ws.push(eps * total);
            (evaluate(&m, &PointVector::new(xs).unwrap(), &WeightVector::from_f64(&ws).unwrap()).unwrap() - base).abs()
        };
        let (d6, d9) = (diff(1e-6), diff(1e-9));
        // The gap is first order in epsilon with a constant governed by the
        // spread R = max/min of all points involved.
        let y = extra.exp2();
        let hi = x.iter().copied().fold(y, f64::max);
        let lo = x.iter().copied().fold(y, f64::min);
        let spread = (hi / lo).powf(k.abs() as f64 / 8.0 + 1.0);
        prop_assert!(d9 <= d6 + 1e-15 * base, "{d6} then {d9}");
        prop_assert!(d9 <= 10.0 * 1e-9 * spread * base + 1e-13 * base, "{d9} vs spread {spread}");
    }

    #[test]
    fn chi_integral_reproduces_evaluate(m in mean(), (x, w) in instance()) {
        let xv = PointVector::new(x).unwrap();
        let wv = WeightVector::from_rationals(w).unwrap();
        let f = chi(&xv, &wv).unwrap();
        let zero = BigRational::from_integer(0.into());
        prop_assert_eq!(integral_eval(&m, &f, &zero, &wv.total()).unwrap(), evaluate(&m, &xv, &wv).unwrap());
    }

    #[test]
    fn power_means_increase_with_p((x, w) in instance(), a in -6.0f64..6.0, b in -6.0f64..6.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let x = PointVector::new(x).unwrap();
        let w = WeightVector::from_rationals(w).unwrap();
        let (ml, mh) = (power_mean(lo, &x, &w).unwrap(), power_mean(hi, &x, &w).unwrap());
        prop_assert!(ml <= mh * (1.0 + 1e-12), "P_{lo} = {ml} > P_{hi} = {mh}");
    }

    #[test]
    fn power_generator_reproduces_power_mean(p in prop::sample::select(vec![-2.0, -1.0, 0.5, 1.0, 2.0]), (x, w) in instance()) {
        let x = PointVector::new(x).unwrap();
        let w = WeightVector::from_rationals(w).unwrap();
        let q = quasiarithmetic_mean(&Generator::power(p).unwrap(), &x, &w).unwrap();
        prop_assert!(close(q, power_mean(p, &x, &w).unwrap(), 1e-10));
    }
}

#[test]
fn family_flags_match_behaviour() {
    for k in -12..=12 {
        let p = k as f64 / 4.0;
        let m = MeanSpec::power(p).unwrap();
        let f = hardy_core::WeightedMean::flags(&m);
        assert_eq!(f.concave, p <= 1.0);
        assert!(f.homogeneous);
        let r = check_axioms(&m, 100, 5);
        assert!(
            r.outcome(Axiom::Symmetry).passed() && r.outcome(Axiom::Monotonicity).passed(),
            "p = {p}"
        );
        assert_eq!(r.outcome(Axiom::Concavity).passed(), p <= 1.0, "p = {p}");
    }
    for g in ["log", "identity", "sqrt", "exp", "power:3", "power:-1"] {
        let m: MeanSpec = format!("quasiarithmetic:{g}").parse().unwrap();
        let r = check_axioms(&m, 100, 5);
        assert!(r.passes() && r.flags_consistent(), "{g}");
    }
}

#[test]
fn generators_invert() {
    let samples: Vec<f64> = (-20..=20).map(|k| (k as f64 / 4.0).exp2()).collect();
    for g in [
        Generator::log(),
        Generator::identity(),
        Generator::sqrt(),
        Generator::exp(),
        Generator::power(-2.5).unwrap(),
    ] {
        assert!(g.inverse_error(&samples) < 1e-12, "{}", g.name());
    }
}
