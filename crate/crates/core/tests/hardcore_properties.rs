//! Measure machinery against the identities and density bounds it must
//! satisfy, plus the end-to-end optimal-density pipeline.

mod common;

use common::{deterministic_corpus, random_predictor};
use fairboost_core::constructions::{build_showcase, ShowcaseConfig};
use fairboost_core::hardcore::{
    density_bounds, hardcore_audit, ihcl_pipeline, induce, measure_ttv, measure_weighted,
    measured_hardness, verify_identity_wma, w_max, PipelineOutcome, WeightFn,
};
use fairboost_core::learners::recalibrate;
use fairboost_core::metrics::ece;
use fairboost_core::predictor::Predictor;

#[test]
fn measure_chain_holds_pointwise() {
    // mu_ttv <= mu_w <= mu_max <= 2 mu_ttv for every admissible w
    let table_weight = |v: f64| 1.0 + (w_max(v).unwrap() - 1.0) / 2.0;
    for (i, (inst, _)) in deterministic_corpus(20).iter().enumerate() {
        let p = random_predictor(inst, 2100 + i as u64);
        let w_mid = WeightFn::table(
            p.values()
                .iter()
                .map(|&v| (v, table_weight(v)))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let ttv = measure_ttv(inst, &p).unwrap();
        let mid = measure_weighted(inst, &p, &w_mid).unwrap();
        let max = measure_weighted(inst, &p, &WeightFn::WMax).unwrap();
        for j in 0..inst.len() {
            let a = ttv.values()[j];
            let b = mid.values()[j];
            let c = max.values()[j];
            assert!(a <= b + 1e-12 && b <= c + 1e-12, "instance {i} point {j}");
            assert!(c <= 2.0 * a + 1e-12, "instance {i} point {j}");
        }
    }
}

#[test]
fn min_entropy_ratio_bounded_by_reciprocal_density() {
    for (i, (inst, class)) in deterministic_corpus(20).iter().enumerate() {
        let p = random_predictor(inst, 2200 + i as u64);
        let mu = measure_weighted(inst, &p, &WeightFn::WMax).unwrap();
        let report = hardcore_audit(inst, &mu, class).unwrap();
        assert!(
            report.min_entropy_ratio <= 1.0 / report.density + 1e-9,
            "instance {i}"
        );
    }
}

#[test]
fn advantage_sandwich_holds_for_complement_closed_classes() {
    for (i, (inst, class)) in deterministic_corpus(30).iter().enumerate() {
        assert!(class.negation_closed(), "corpus classes are complement closed");
        let p = random_predictor(inst, 2300 + i as u64);
        let mu = match measure_weighted(inst, &p, &WeightFn::WMax) {
            Ok(mu) => mu,
            Err(_) => continue,
        };
        let report = hardcore_audit(inst, &mu, class).unwrap();
        let lower = report.eta.min(1.0 - report.eta) + report.class_correlation;
        let upper = report.eta.max(1.0 - report.eta) + report.class_correlation;
        assert!(
            lower - 1e-12 <= report.advantage && report.advantage <= upper + 1e-12,
            "instance {i}: {lower} <= {} <= {upper}",
            report.advantage
        );
    }
}

#[test]
fn weighted_ma_identity_sweep_stays_exact() {
    // 100 seeded instances, both distinguished weights: discrepancy < 1e-10
    let mut checked = 0usize;
    let mut max_disc: f64 = 0.0;
    for (i, (inst, class)) in deterministic_corpus(50).iter().enumerate() {
        for (j, w) in [WeightFn::Constant, WeightFn::WMax].iter().enumerate() {
            let p = random_predictor(inst, 2400 + (2 * i + j) as u64);
            let check = match verify_identity_wma(inst, &p, class, w) {
                Ok(c) => c,
                Err(_) => continue,
            };
            max_disc = max_disc.max(check.discrepancy);
            checked += 1;
        }
    }
    assert!(checked >= 90, "only {checked} identity checks ran");
    assert!(max_disc < 1e-10, "max discrepancy {max_disc}");
}

#[test]
fn density_bounds_hold_on_recalibrated_predictors() {
    // coarse levels: recalibrating an all-distinct predictor would just
    // reproduce the Boolean target and leave nothing to audit
    let mut audited = 0usize;
    for (i, (inst, class)) in deterministic_corpus(30).iter().enumerate() {
        let raw = random_predictor(inst, 2500 + i as u64);
        let coarse = Predictor::new(
            raw.values()
                .iter()
                .map(|v| (v * 5.0).round() / 5.0)
                .collect(),
        )
        .unwrap();
        let p = recalibrate(inst, &coarse, 0.05).unwrap();
        for w in [WeightFn::Constant, WeightFn::WMax] {
            let report = match density_bounds(inst, &p, &w, 0.05) {
                Ok(r) => r,
                Err(_) => continue,
            };
            audited += 1;
            assert!(report.bound_a_ok, "instance {i} ({}): gap", w.name());
            assert!(report.bound_b_ok, "instance {i} ({}): majority", w.name());
            assert!(report.bound_c_ok, "instance {i} ({}): ttv", w.name());
            assert!(report.bound_d_ok, "instance {i} ({}): max", w.name());
        }
        let _ = class;
    }
    assert!(audited >= 40, "only {audited} density reports audited");
}

#[test]
fn perfectly_calibrated_densities_are_exact() {
    // with ECE = 0: dns(mu_max) = 2 E[min(p, 1-p)], dns(mu_ttv) = E[2p(1-p)]
    let cfg = ShowcaseConfig::new(0.1, 0.3).unwrap();
    let (inst, p) = build_showcase(&cfg).unwrap();
    assert!(ece(&inst, &p).unwrap().value < 1e-12);
    let report = density_bounds(&inst, &p, &WeightFn::WMax, 0.0).unwrap();
    assert!((report.density_max - 2.0 * report.expected_min).abs() < 1e-12);
    assert!((report.density_ttv - report.quadratic_mean).abs() < 1e-12);
    // and min(v, 1-v) <= 2v(1-v) <= 2 min(v, 1-v) integrated
    assert!(report.expected_min <= report.quadratic_mean + 1e-12);
    assert!(report.quadratic_mean <= 2.0 * report.expected_min + 1e-12);
}

#[test]
fn showcase_closed_forms_across_the_parameter_grid() {
    for eta_step in 1..=10 {
        for delta_step in 1..=9 {
            let eta = eta_step as f64 / 100.0;
            let delta = delta_step as f64 / 20.0;
            let cfg = ShowcaseConfig::new(eta, delta).unwrap();
            let (inst, p) = build_showcase(&cfg).unwrap();
            let ttv = measure_ttv(&inst, &p).unwrap().density(&inst).unwrap();
            let max = measure_weighted(&inst, &p, &WeightFn::WMax)
                .unwrap()
                .density(&inst)
                .unwrap();
            assert!(
                (ttv - cfg.density_ttv()).abs() < 1e-9,
                "eta {eta} delta {delta}: ttv {ttv} vs {}",
                cfg.density_ttv()
            );
            assert!(
                (max - cfg.density_max()).abs() < 1e-9,
                "eta {eta} delta {delta}: max {max} vs {}",
                cfg.density_max()
            );
        }
    }
}

#[test]
fn induced_distribution_of_the_showcase_matches_region_arithmetic() {
    // reweighting by mu_max: each region's new mass is mass * mu / dns
    let cfg = ShowcaseConfig::new(0.05, 0.2).unwrap();
    let (inst, p) = build_showcase(&cfg).unwrap();
    let mu = measure_weighted(&inst, &p, &WeightFn::WMax).unwrap();
    let induced = induce(&inst, &mu).unwrap();
    let dns = cfg.density_max();
    // region order: (1/2, g=1, delta), (1/2, g=0, delta), (eta, 0, ...), (eta, 1, ...)
    let expected = [
        0.2 / dns,
        0.2 / dns,
        (0.05 / 0.95) * (0.95 * 0.6) / dns,
        1.0 * (0.05 * 0.6) / dns,
    ];
    for (i, e) in expected.iter().enumerate() {
        assert!(
            (induced.weight(i) - e).abs() < 1e-12,
            "region {i}: {} vs {e}",
            induced.weight(i)
        );
    }
}

#[test]
fn pipeline_full_checks_on_a_seeded_batch() {
    for (i, (inst, class)) in deterministic_corpus(10).iter().enumerate() {
        match ihcl_pipeline(inst, class, 0.2, 0.2, 0.1) {
            Ok(PipelineOutcome::Hardcore {
                measure, checks, ..
            }) => {
                assert!(checks.density_bound_ok, "instance {i}: density bound");
                assert!(checks.advantage_bound_ok, "instance {i}: advantage bound");
                assert!(measure.density(inst).unwrap() > 0.0);
            }
            Ok(PipelineOutcome::NoHardness { .. }) => {
                // legitimately easy target
            }
            Err(e) => panic!("instance {i}: {e}"),
        }
    }
}

#[test]
fn realizable_target_reports_no_hardness() {
    use fairboost_core::constructions::{random_instance, ClassSpec, LabelMode};
    let (inst, class) = random_instance(
        4242,
        16,
        &ClassSpec::Juntas {
            k: 2,
            n: 4,
            subsets: 2,
        },
        &LabelMode::Planted {
            index: 2,
            noise: 0.0,
        },
    )
    .unwrap();
    match ihcl_pipeline(&inst, &class, 0.2, 0.2, 0.05).unwrap() {
        PipelineOutcome::NoHardness { predictor, .. } => {
            // the learner nailed the target exactly
            for i in 0..inst.len() {
                assert_eq!(predictor.value(i), inst.label(i));
            }
        }
        PipelineOutcome::Hardcore { checks, .. } => {
            panic!("expected the easy branch, got density {}", checks.density)
        }
    }
}

#[test]
fn measured_hardness_is_consistent_with_the_min_bound() {
    // E[min(p, 1-p)] >= best enumerated error - ECE
    let mut nontrivial = 0usize;
    for (i, (inst, class)) in deterministic_corpus(20).iter().enumerate() {
        let raw = random_predictor(inst, 2600 + i as u64);
        let coarse = Predictor::new(
            raw.values()
                .iter()
                .map(|v| (v * 4.0).round() / 4.0)
                .collect(),
        )
        .unwrap();
        let p = recalibrate(inst, &coarse, 0.1).unwrap();
        let (delta, _) = measured_hardness(inst, &p, class).unwrap();
        let cal = ece(inst, &p).unwrap().value;
        let e_min: f64 = (0..inst.len())
            .map(|j| inst.weight(j) * p.value(j).min(1.0 - p.value(j)))
            .sum();
        if delta > 1e-9 {
            nontrivial += 1;
        }
        assert!(
            e_min >= delta - cal - 1e-9,
            "instance {i}: {e_min} < {delta} - {cal}"
        );
    }
    assert!(nontrivial >= 10, "only {nontrivial} hard targets seen");
}

#[test]
fn pipeline_on_a_planted_two_level_instance_recovers_the_closed_form() {
    // Region indicators force the learner to land exactly on the region
    // conditional means (exact line search along an indicator direction),
    // so the resulting maximal measure has the closed-form density.
    use fairboost_core::hypothesis::{Hypothesis, HypothesisKind};

    let eta = 0.05;
    let delta = 0.2;
    let cfg = ShowcaseConfig::new(eta, delta).unwrap();
    let (inst, _) = build_showcase(&cfg).unwrap();
    // points 0,1 form the 1/2-level region, points 2,3 the eta-level region
    let h01 = |name: &str, v: Vec<f64>| {
        Hypothesis::new(name, HypothesisKind::Boolean01, v).unwrap()
    };
    let class = fairboost_core::hypothesis::HypothesisClass::new(vec![
        h01("zero", vec![0.0; 4]),
        h01("one", vec![1.0; 4]),
        h01("mid", vec![1.0, 1.0, 0.0, 0.0]),
        h01("low", vec![0.0, 0.0, 1.0, 1.0]),
    ])
    .unwrap();

    match ihcl_pipeline(&inst, &class, 0.1, 0.2, 0.01).unwrap() {
        PipelineOutcome::Hardcore { measure, .. } => {
            let dns = measure.density(&inst).unwrap();
            assert!(
                (dns - cfg.density_max()).abs() < 1e-9,
                "dns {dns} vs closed form {}",
                cfg.density_max()
            );
        }
        PipelineOutcome::NoHardness { .. } => panic!("the target is genuinely hard here"),
    }
}

#[test]
fn identity_on_a_deterministic_maj_instance() {
    use fairboost_core::constructions::{build_maj_instance, MajConfig};
    use fairboost_core::instance::{FiniteInstance, Labels};

    let (inst, p, class) = build_maj_instance(&MajConfig::new(3, 1, 2).unwrap()).unwrap();
    // the labels are 0/1-valued; rebuild them as a Boolean target
    let det = FiniteInstance::new(
        inst.points().to_vec(),
        inst.weights().to_vec(),
        Labels::Deterministic(inst.labels().values().to_vec()),
    )
    .unwrap();
    let class01 = class.to_boolean01().unwrap();
    for w in [WeightFn::Constant, WeightFn::WMax] {
        let check = verify_identity_wma(&det, &p, &class01, &w).unwrap();
        assert!(check.discrepancy < 1e-10, "{}: {}", w.name(), check.discrepancy);
    }
}

#[test]
fn constant_weight_ma_equals_plain_ma() {
    use fairboost_core::metrics::{ma_error, weighted_ma_error};
    for (i, (inst, class)) in deterministic_corpus(12).iter().enumerate() {
        let p = random_predictor(inst, 4400 + i as u64);
        let plain = ma_error(inst, &p, class).unwrap().value;
        let weighted = weighted_ma_error(inst, &p, class, &WeightFn::Constant)
            .unwrap()
            .value;
        assert!((plain - weighted).abs() < 1e-15, "instance {i}");
    }
}

#[test]
fn zero_density_and_identically_zero_are_distinct_outcomes() {
    use fairboost_core::error::Error;
    use fairboost_core::hardcore::Measure;
    use fairboost_core::instance::{FiniteInstance, Labels};

    // measure positive only on a zero-weight point: constructible, zero density
    let inst = FiniteInstance::new(
        vec!["a".into(), "b".into()],
        vec![1.0, 0.0],
        Labels::Deterministic(vec![1.0, 0.0]),
    )
    .unwrap();
    let mu = Measure::new(vec![0.0, 0.5]).unwrap();
    assert!(matches!(
        induce(&inst, &mu).unwrap_err(),
        Error::ZeroDensity
    ));
    assert!(matches!(
        Measure::new(vec![0.0, 0.0]).unwrap_err(),
        Error::MeasureIdenticallyZero
    ));
    let p = Predictor::new(vec![1.0, 0.0]).unwrap();
    assert!(matches!(
        measure_ttv(&inst, &p).unwrap_err(),
        Error::MeasureIdenticallyZero
    ));
}
