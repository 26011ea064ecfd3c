use hardy_core::hardy::{
    finite_lower_bound, finite_sweep, geometric_probe, hardy_ratio, kedlaya_estimate,
    nonweighted_limit, Direction, OptimizerConfig,
};
use hardy_core::weights::make_sequence;
use hardy_core::{MeanSpec, WeightSeq};

/// For `P_{1/2}` the substitution `x = y^2` turns the finite Hardy ratio into
/// the Rayleigh quotient of `T^T T`, `T[n][k] = sqrt(lambda_n lambda_k) / Lambda_n`
/// for `k <= n`. Power iteration with prefix sums gives its top eigenvalue.
fn half_power_oracle(lam: &[f64]) -> f64 {
    let n = lam.len();
    let s: Vec<f64> = lam.iter().map(|v| v.sqrt()).collect();
    let mut cum = Vec::with_capacity(n);
    let mut acc = 0.0;
    for v in lam {
        acc += v;
        cum.push(acc);
    }
    let apply = |u: &[f64]| -> Vec<f64> {
        let mut tu = vec![0.0; n];
        let mut run = 0.0;
        for i in 0..n {
            run += s[i] * u[i];
            tu[i] = s[i] * run / cum[i];
        }
        let mut out = vec![0.0; n];
        let mut back = 0.0;
        for i in (0..n).rev() {
            back += s[i] * tu[i] / cum[i];
            out[i] = s[i] * back;
        }
        out
    };
    let mut u = vec![1.0 / (n as f64).sqrt(); n];
    let mut value = 0.0;
    for _ in 0..200_000 {
        let v = apply(&u);
        let next: f64 = v.iter().zip(&u).map(|(a, b)| a * b).sum();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        u = v.into_iter().map(|a| a / norm).collect();
        if (next - value).abs() <= 1e-14 * next {
            return next;
        }
        value = next;
    }
    value
}

fn half() -> MeanSpec {
    MeanSpec::power(0.5).unwrap()
}

fn check_against_oracle(desc: &str, n: usize, published: Option<f64>) -> f64 {
    let w = make_sequence(desc).unwrap();
    let oracle = half_power_oracle(&w.terms(n).unwrap());
    if let Some(p) = published {
        assert!(
            (oracle - p).abs() <= 1e-6 * p,
            "{desc} N={n}: oracle {oracle} vs {p}"
        );
    }
    let est = finite_lower_bound(&half(), &w, n, &OptimizerConfig::default()).unwrap();
    assert_eq!(est.direction, Direction::LowerBound);
    assert!(
        est.value <= oracle * (1.0 + 1e-9),
        "{desc} N={n}: {} above the supremum {oracle}",
        est.value
    );
    assert!(
        est.value >= oracle * (1.0 - 1e-5),
        "{desc} N={n}: {} vs {oracle}",
        est.value
    );
    est.value
}

#[test]
fn half_power_matches_eigen_oracle() {
    for (desc, vals) in [
        ("ones", [2.5531393, 2.8440372, 3.0590442]),
        ("power:1", [2.9014466, 3.2244023, 3.4330325]),
        ("power:-1", [1.8888769, 2.0039397, 2.0887838]),
    ] {
        for (n, v) in [64usize, 256, 1024].into_iter().zip(vals) {
            check_against_oracle(desc, n, Some(v));
        }
    }
}

/// At N = 4096 the unit and linear weights clear 3.0. The harmonic weights
/// (`1/n`) converge much more slowly: `Lambda_N` grows like `ln N`, so the
/// section sees only about eight e-folds of `Lambda` and sits near 2.155.
#[test]
fn large_sections_approach_four_slowly() {
    let ones = check_against_oracle("ones", 4096, Some(3.2212199));
    let linear = check_against_oracle("power:1", 4096, Some(3.5716576));
    let harmonic = check_against_oracle("power:-1", 4096, Some(2.1550084));
    assert!(ones > 3.0 && linear > 3.0);
    assert!(harmonic > 2.0888 && harmonic < 4.0);
}

#[test]
fn witness_reproduces_value_naively() {
    for mean in [
        half(),
        MeanSpec::geometric(),
        MeanSpec::power(-1.0).unwrap(),
        "quasiarithmetic:log".parse().unwrap(),
    ] {
        let w = make_sequence("power:1").unwrap();
        let n = 256;
        let est = finite_lower_bound(&mean, &w, n, &OptimizerConfig::default()).unwrap();
        let x = est.witness.clone().unwrap();
        assert_eq!(x.len(), n);
        // Quadratic evaluation straight from the definition.
        let lam = w.terms(n).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 1..=n {
            let prefix_w: f64 = lam[..k].iter().sum();
            let weights: Vec<f64> = lam[..k].iter().map(|v| v / prefix_w).collect();
            let m = hardy_core::mean::evaluate_f64(&mean, &x[..k], &weights).unwrap();
            num += lam[k - 1] * m;
            den += lam[k - 1] * x[k - 1];
        }
        let naive = num / den;
        assert!(
            (naive - est.value).abs() <= 1e-9 * est.value,
            "{mean}: {naive} vs {}",
            est.value
        );
        assert_eq!(hardy_ratio(&mean, &w, &x).unwrap(), est.value);
    }
}

#[test]
fn values_grow_with_the_section() {
    let ns = [8usize, 16, 32, 64, 128];
    for desc in ["ones", "dyadic", "power:2"] {
        let w = make_sequence(desc).unwrap();
        let sweep = finite_sweep(&half(), &w, &ns, &OptimizerConfig::default()).unwrap();
        for pair in sweep.windows(2) {
            assert!(
                pair[1].value >= pair[0].value,
                "{desc}: {} then {}",
                pair[0].value,
                pair[1].value
            );
        }
    }
}

#[test]
fn random_weights_stay_below_the_unit_constant() {
    for seed in 0..6u64 {
        let block: Vec<f64> = (0..5)
            .map(|i| 1.0 + ((seed * 7 + i * 3) % 11) as f64)
            .collect();
        let w = WeightSeq::periodic_f64(&block).unwrap();
        let est = finite_lower_bound(&half(), &w, 128, &OptimizerConfig::with_seed(seed)).unwrap();
        assert!(est.value < 4.0);
    }
}

#[test]
fn limit_estimators() {
    let k = kedlaya_estimate(
        &half(),
        &WeightSeq::ones(),
        &hardy_core::hardy::default_y_grid(),
        100_000,
        0.5,
    )
    .unwrap();
    assert_eq!(k.direction, Direction::LimitApprox);
    assert!(k.value > 3.8 && k.value < 4.0, "{}", k.value);

    let g = nonweighted_limit(&MeanSpec::arithmetic(), 10_000).unwrap();
    let harmonic: f64 = (1..=10_000).map(|k| 1.0 / k as f64).sum();
    assert!((g.value - harmonic).abs() < 1e-9 * harmonic);
    assert!((g.value - 9.79).abs() < 0.01);
    assert_eq!(g.diagnostics["divergent_trend"], true);

    let dyadic = geometric_probe(&MeanSpec::arithmetic(), &WeightSeq::dyadic(), 0.9, 1000).unwrap();
    assert_eq!(dyadic.direction, Direction::LowerBound);
    assert!(dyadic.value <= 1.606_695_152_415_291_8 + 1e-9);
}

#[test]
fn estimates_serialize_deterministically() {
    let w = make_sequence("geometric:1/3").unwrap();
    let a = finite_lower_bound(&half(), &w, 64, &OptimizerConfig::with_seed(3))
        .unwrap()
        .to_json();
    let b = finite_lower_bound(&half(), &w, 64, &OptimizerConfig::with_seed(3))
        .unwrap()
        .to_json();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let v = a;
    assert_eq!(v["schema"], hardy_core::SCHEMA);
    assert_eq!(v["N"], 64);
    assert_eq!(v["direction"], "lower_bound");
}
