//! Metric implementations against independent re-computation oracles and the
//! exact identities the auditors must satisfy.

mod common;

use common::{corpus, naive_ma, naive_mc, naive_opt, permuted, random_predictor};
use fairboost_core::hypothesis::{Hypothesis, HypothesisClass, HypothesisKind};
use fairboost_core::instance::{FiniteInstance, Labels};
use fairboost_core::metrics::{
    correlation, ece, ece_dual, eae, ma_error, mc_error, opt_correlation,
};
use fairboost_core::predictor::Predictor;

#[test]
fn ma_matches_naive_recomputation_across_corpus() {
    for (i, (inst, class)) in corpus(40).iter().enumerate() {
        let p = random_predictor(inst, 40 + i as u64);
        let report = ma_error(inst, &p, class).unwrap();
        let (naive, naive_arg) = naive_ma(inst, &p, class);
        assert!(
            (report.value - naive).abs() < 1e-12,
            "instance {i}: {} vs {naive}",
            report.value
        );
        assert_eq!(
            report.witness.unwrap().hypothesis.unwrap(),
            class.get(naive_arg).name()
        );
    }
}

#[test]
fn mc_matches_naive_recomputation_across_corpus() {
    for (i, (inst, class)) in corpus(30).iter().enumerate() {
        let p = random_predictor(inst, 99 + i as u64);
        let value = mc_error(inst, &p, class).unwrap().value;
        let naive = naive_mc(inst, &p, class);
        assert!((value - naive).abs() < 1e-12, "instance {i}");
    }
}

#[test]
fn opt_matches_exhaustive_scan() {
    for (i, (inst, class)) in corpus(30).iter().enumerate() {
        let value = opt_correlation(inst, class).unwrap().value;
        let naive = naive_opt(inst, class);
        assert!((value - naive).abs() < 1e-12, "instance {i}");
    }
}

#[test]
fn ece_primal_and_dual_agree_everywhere() {
    for (i, (inst, _)) in corpus(40).iter().enumerate() {
        let p = random_predictor(inst, 7 + i as u64);
        let primal = ece(inst, &p).unwrap().value;
        let dual = ece_dual(inst, &p).unwrap();
        assert!(
            (primal - dual).abs() < 1e-12,
            "instance {i}: primal {primal} dual {dual}"
        );
    }
}

#[test]
fn correlation_is_affine_in_the_disagreement_probability() {
    // cor(y, c) = 1 - 2 Pr[c != g] for {-1,1} hypotheses on Boolean targets
    for (i, (inst, _)) in corpus(24).iter().enumerate().filter(|(_, (inst, _))| {
        inst.is_deterministic()
    }) {
        let mut state = 0x5eed_u64.wrapping_add(i as u64) | 1;
        let values: Vec<f64> = (0..inst.len())
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                if state & 1 == 1 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        let h = Hypothesis::new("h", HypothesisKind::BooleanPM, values).unwrap();
        let cor = correlation(inst, &h).unwrap();
        let disagree: f64 = (0..inst.len())
            .filter(|&j| h.value(j) != 2.0 * inst.label(j) - 1.0)
            .map(|j| inst.weight(j))
            .sum();
        assert!((cor - (1.0 - 2.0 * disagree)).abs() < 1e-12);
    }
}

#[test]
fn ma_with_constant_one_class_equals_eae_on_corpus() {
    for (i, (inst, _)) in corpus(12).iter().enumerate() {
        let p = random_predictor(inst, 3 + i as u64);
        let one = Hypothesis::new("1", HypothesisKind::Bounded, vec![1.0; inst.len()]).unwrap();
        let class = HypothesisClass::new(vec![one]).unwrap();
        let ma = ma_error(inst, &p, &class).unwrap().value;
        let e = eae(inst, &p).unwrap();
        assert!((ma - e).abs() < 1e-14, "instance {i}");
    }
}

#[test]
fn pm1_conversion_multiplies_violations_by_at_most_three() {
    // for a {0,1} class: ma over the 2c-1 versions <= 3 ma + 2 eae
    for (i, (inst, class)) in corpus(40)
        .iter()
        .enumerate()
        .filter(|(_, (_, c))| c.kind() == HypothesisKind::Boolean01)
    {
        let p = random_predictor(inst, 17 + i as u64);
        let ma01 = ma_error(inst, &p, class).unwrap().value;
        let e = eae(inst, &p).unwrap();
        let pm = HypothesisClass::new(
            class
                .iter()
                .map(|h| h.to_pm1().unwrap())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let ma_pm = ma_error(inst, &p, &pm).unwrap().value;
        assert!(
            ma_pm <= 3.0 * ma01 + 2.0 * e + 1e-12,
            "instance {i}: {ma_pm} vs 3*{ma01} + 2*{e}"
        );
    }
}

#[test]
fn all_metrics_invariant_under_point_permutation() {
    for (i, (inst, class)) in corpus(16).iter().enumerate() {
        let p = random_predictor(inst, 51 + i as u64);
        let n = inst.len();
        // a fixed derangement-ish permutation: rotate by n/2 then swap pairs
        let mut perm: Vec<usize> = (0..n).map(|j| (j + n / 2) % n).collect();
        if n >= 4 {
            perm.swap(0, 3);
        }
        let (inst2, p2, class2) = permuted(inst, &p, class, &perm);

        let pairs = [
            (
                ma_error(inst, &p, class).unwrap().value,
                ma_error(&inst2, &p2, &class2).unwrap().value,
            ),
            (
                mc_error(inst, &p, class).unwrap().value,
                mc_error(&inst2, &p2, &class2).unwrap().value,
            ),
            (
                ece(inst, &p).unwrap().value,
                ece(&inst2, &p2).unwrap().value,
            ),
            (eae(inst, &p).unwrap(), eae(&inst2, &p2).unwrap()),
            (
                opt_correlation(inst, class).unwrap().value,
                opt_correlation(&inst2, &class2).unwrap().value,
            ),
        ];
        for (a, b) in pairs {
            assert!((a - b).abs() < 1e-12, "instance {i}: {a} vs {b}");
        }
    }
}

#[test]
fn opt_on_negation_closed_classes_equals_the_absolute_maximum() {
    // true negation closure only: for {0,1} classes the flag means
    // complement closure, which shifts rather than negates correlations
    use fairboost_core::hypothesis::Hypothesis;
    let corpus_pm: Vec<_> = corpus(30)
        .into_iter()
        .map(|(inst, class)| {
            let mut hs: Vec<Hypothesis> = Vec::new();
            for h in class.iter() {
                if h.kind() == HypothesisKind::Boolean01 {
                    hs.push(h.to_pm1().unwrap());
                } else {
                    hs.push(h.clone());
                }
            }
            let negated: Vec<Hypothesis> = hs
                .iter()
                .map(|h| {
                    Hypothesis::new(
                        format!("neg-{}", h.name()),
                        h.kind(),
                        h.values().iter().map(|&v| -v).collect(),
                    )
                    .unwrap()
                })
                .collect();
            hs.extend(negated);
            (inst, HypothesisClass::new(hs).unwrap())
        })
        .collect();
    for (i, (inst, class)) in corpus_pm.iter().enumerate() {
        assert!(class.negation_closed());
        let signed = opt_correlation(inst, class).unwrap().value;
        let abs_max = class
            .iter()
            .map(|h| correlation(inst, h).unwrap().abs())
            .fold(0.0, f64::max);
        assert!((signed - abs_max).abs() < 1e-12, "instance {i}");
    }
}

#[test]
fn bayes_predictor_audits_clean_on_every_metric() {
    for (inst, class) in corpus(12) {
        let p = Predictor::new(inst.labels().values().to_vec()).unwrap();
        // residuals vanish per point, so the sums are exactly zero
        assert_eq!(ma_error(&inst, &p, &class).unwrap().value, 0.0);
        assert_eq!(eae(&inst, &p).unwrap(), 0.0);
        // conditional means re-divide the masses, leaving ulp-level noise
        assert!(ece(&inst, &p).unwrap().value < 1e-12);
        assert!(mc_error(&inst, &p, &class).unwrap().value < 1e-12);
    }
}

#[test]
fn domain_mismatch_is_detected_with_the_point_name() {
    let inst = FiniteInstance::uniform(
        vec!["x".into(), "y".into(), "z".into()],
        Labels::Bayes(vec![0.2, 0.5, 0.9]),
    )
    .unwrap();
    let p = Predictor::new(vec![0.5, 0.5]).unwrap();
    let err = ece(&inst, &p).unwrap_err();
    assert!(err.to_string().contains('z'), "got: {err}");
}
