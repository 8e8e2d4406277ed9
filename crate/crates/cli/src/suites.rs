//! Verification suites: every acceptance bound as a runnable corpus sweep.
//!
//! Each suite builds its seeded corpus, runs the relevant constructions,
//! learners, and auditors, and records one assertion per claimed bound. The
//! tolerances are pinned here, identical to the acceptance test target.

use std::collections::BTreeMap;

use rayon::prelude::*;

use fairboost_core::constructions::{
    build_maj_instance, build_showcase, random_instance, ClassSpec, LabelMode, MajConfig,
    ShowcaseConfig,
};
use fairboost_core::cube;
use fairboost_core::fourier::{full_spectrum, goldreich_levin, GlConfig};
use fairboost_core::hardcore::{
    density_bounds, ihcl_pipeline, measure_ttv, measure_weighted, measured_hardness,
    verify_identity_wma, PipelineOutcome, WeightFn,
};
use fairboost_core::hypothesis::{Hypothesis, HypothesisClass, HypothesisKind};
use fairboost_core::instance::FiniteInstance;
use fairboost_core::learners::{
    learn_calibrated_multiaccurate, learn_multiaccurate, learn_multicalibrated, recalibrate,
    LearnerConfig,
};
use fairboost_core::metrics::{
    correlation, ece, ma_error, opt_correlation, predictor_correlation,
};
use fairboost_core::postprocess::{best_postprocessing, project_span, sqloss_to_correlation, threshold};
use fairboost_core::predictor::Predictor;
use fairboost_core::schema;

use crate::report::{Assertion, RunReport};

/// Inequality tolerance pinned by the acceptance criteria.
pub const TOL: f64 = 1e-9;
/// Identity tolerance for the weighted-multiaccuracy identity.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Exact-equality criteria ("= 0.5 exactly") use a zero tolerance.
pub const EXACT: f64 = 0.0;

pub const SUITES: &[&str] = &[
    "maj-counterexample",
    "restricted-wal",
    "strong-agnostic",
    "sqloss-correlation",
    "wma-identity",
    "showcase-density",
    "density-bounds",
    "ihcl-density",
    "tier-cost",
    "gl",
    "projection",
    "determinism",
];

/// Mixed corpus for the learning bounds: up to 256 points, at most 64
/// hypotheses per class.
pub fn corpus_wal(base_seed: u64, count: usize) -> Vec<(FiniteInstance, HypothesisClass)> {
    (0..count)
        .map(|i| {
            let seed = base_seed.wrapping_add(i as u64);
            let spec = match i % 4 {
                0 => ClassSpec::Parities {
                    n: 3 + (i / 4 % 3) as u32,
                },
                1 => ClassSpec::Dictators {
                    n: 3 + (i / 4 % 5) as u32,
                },
                2 => ClassSpec::Juntas {
                    k: 2,
                    n: 4 + (i / 4 % 3) as u32,
                    subsets: 2 + i / 8 % 2,
                },
                _ => ClassSpec::RandomBoolean { m: 4 + i / 4 % 12 },
            };
            let n_points = match &spec {
                ClassSpec::Parities { n }
                | ClassSpec::Dictators { n }
                | ClassSpec::Juntas { n, .. } => 1usize << n,
                ClassSpec::RandomBoolean { .. } => 8 + (i * 13) % 249,
            };
            let mode = match i % 3 {
                0 => LabelMode::BayesUniform,
                1 => LabelMode::DeterministicRandom,
                _ => LabelMode::Planted {
                    index: i % 2,
                    noise: 0.2 + 0.1 * ((i / 3 % 3) as f64),
                },
            };
            random_instance(seed, n_points, &spec, &mode).expect("corpus entry builds")
        })
        .collect()
}

/// Deterministic-label corpus with complement-closed Boolean01 classes.
pub fn corpus_deterministic(base_seed: u64, count: usize) -> Vec<(FiniteInstance, HypothesisClass)> {
    (0..count)
        .map(|i| {
            let seed = base_seed.wrapping_add(5000 + i as u64);
            let spec = match i % 2 {
                0 => ClassSpec::Juntas {
                    k: 2,
                    n: 4 + (i / 2 % 3) as u32,
                    subsets: 2,
                },
                _ => ClassSpec::RandomBoolean { m: 5 + i % 9 },
            };
            let n_points = match &spec {
                ClassSpec::Juntas { n, .. } => 1usize << n,
                _ => 10 + (i * 7) % 120,
            };
            let mode = if i % 3 == 0 {
                LabelMode::Planted {
                    index: i % 3,
                    noise: 0.3,
                }
            } else {
                LabelMode::DeterministicRandom
            };
            random_instance(seed, n_points, &spec, &mode).expect("corpus entry builds")
        })
        .collect()
}

/// Random Boolean targets on cubes up to dimension 10 with junta classes.
pub fn corpus_ihcl(base_seed: u64, count: usize) -> Vec<(FiniteInstance, HypothesisClass)> {
    (0..count)
        .map(|i| {
            let seed = base_seed.wrapping_add(9000 + i as u64);
            let n = [6u32, 8, 10][i % 3];
            let spec = ClassSpec::Juntas {
                k: 3,
                n,
                subsets: 2 + i % 2,
            };
            random_instance(seed, 1usize << n, &spec, &LabelMode::DeterministicRandom)
                .expect("corpus entry builds")
        })
        .collect()
}

/// Seeded predictor used where the criteria call for arbitrary predictors.
pub fn seeded_predictor(inst: &FiniteInstance, seed: u64) -> Predictor {
    let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
    let values = (0..inst.len())
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect();
    Predictor::new(values).expect("values in range")
}

/// Seeded predictor with few distinct values. Recalibrating an all-distinct
/// predictor against a Boolean target reproduces the target exactly (each
/// level set is a single point), which collapses every measure to zero;
/// coarse levels keep the recalibrated corpus non-degenerate.
pub fn coarse_predictor(inst: &FiniteInstance, seed: u64, step: f64) -> Predictor {
    let fine = seeded_predictor(inst, seed);
    let values = fine
        .values()
        .iter()
        .map(|v| ((v / step).round() * step).clamp(0.0, 1.0))
        .collect();
    Predictor::new(values).expect("values in range")
}

fn run_parallel<T: Send, R: Send>(
    jobs: usize,
    items: Vec<T>,
    f: impl Fn(usize, T) -> R + Sync + Send,
) -> Vec<R> {
    if jobs <= 1 {
        items.into_iter().enumerate().map(|(i, t)| f(i, t)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool builds");
        pool.install(|| {
            items
                .into_par_iter()
                .enumerate()
                .map(|(i, t)| f(i, t))
                .collect()
        })
    }
}

/// Dispatches a suite by name.
pub fn run_suite(name: &str, seed: u64, trials: Option<usize>, jobs: usize) -> anyhow::Result<RunReport> {
    let started = std::time::Instant::now();
    let mut report = match name {
        "maj-counterexample" => suite_maj(seed),
        "restricted-wal" => suite_restricted_wal(seed, trials.unwrap_or(200), jobs),
        "strong-agnostic" => suite_strong_agnostic(seed, trials.unwrap_or(200), jobs),
        "sqloss-correlation" => suite_sqloss(seed, trials.unwrap_or(1000)),
        "wma-identity" => suite_wma_identity(seed, trials.unwrap_or(100)),
        "showcase-density" => suite_showcase(),
        "density-bounds" => suite_density_bounds(seed, trials.unwrap_or(100)),
        "ihcl-density" => suite_ihcl(seed, trials.unwrap_or(50), jobs),
        "tier-cost" => suite_tier_cost(seed, trials.unwrap_or(50), jobs),
        "gl" => suite_gl(seed, trials.unwrap_or(20), jobs),
        "projection" => suite_projection(seed, trials.unwrap_or(100)),
        "determinism" => suite_determinism(seed),
        other => anyhow::bail!(
            "unknown suite `{other}`; available: {}",
            SUITES.join(", ")
        ),
    };
    report.aggregate();
    report.wall_clock_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

fn suite_maj(_seed: u64) -> RunReport {
    let mut report = RunReport::new("verify maj-counterexample", None);
    let cfg = MajConfig::new(3, 1, 2).expect("valid config");
    let (inst, p, class) = build_maj_instance(&cfg).expect("construction builds");

    let ma_basis = ma_error(&inst, &p, &class).expect("audit runs").value;
    report.assertions.push(Assertion::at_most(
        "multiaccuracy error against the parity basis",
        ma_basis,
        0.0,
        1e-12,
    ));

    // every {-1,1} function of (x1, x2): 16 truth tables over 4 cells
    let all16 = HypothesisClass::new(
        (0..16u32)
            .map(|table| {
                let values: Vec<f64> = (0..8u64)
                    .map(|i| {
                        let b1 = u32::from(cube::coord_value(i, 1, 3) < 0.0);
                        let b2 = u32::from(cube::coord_value(i, 2, 3) < 0.0);
                        let cell = b1 * 2 + b2;
                        if table >> cell & 1 == 1 {
                            1.0
                        } else {
                            -1.0
                        }
                    })
                    .collect();
                Hypothesis::new(format!("t{table}"), HypothesisKind::BooleanPM, values)
                    .expect("valid hypothesis")
            })
            .collect(),
    )
    .expect("valid class");
    let worst_all16 = ma_error(&inst, &p, &all16).expect("audit runs").value;
    report.assertions.push(Assertion::at_most(
        "multiaccuracy error against all 16 two-bit functions",
        worst_all16,
        0.0,
        1e-12,
    ));
    let opt16 = opt_correlation(&inst, &all16).expect("audit runs").value;
    report.assertions.push(Assertion::at_most(
        "best two-bit correlation equals one half exactly",
        (opt16 - 0.5).abs(),
        0.0,
        EXACT,
    ));

    let (_, best_cor) = best_postprocessing(&inst, &p).expect("audit runs");
    report.assertions.push(Assertion::at_most(
        "best post-processing correlation",
        best_cor.abs(),
        0.0,
        1e-12,
    ));

    let dictator = class
        .iter()
        .find(|h| h.name() == "chi_1")
        .expect("basis contains the first dictator");
    let cor = correlation(&inst, dictator).expect("audit runs");
    report.assertions.push(Assertion::at_most(
        "dictator correlation equals one half exactly",
        (cor - 0.5).abs(),
        0.0,
        EXACT,
    ));

    let cal = ece(&inst, &p).expect("audit runs").value;
    report.assertions.push(Assertion::at_most(
        "calibration error equals one half exactly",
        (cal - 0.5).abs(),
        0.0,
        EXACT,
    ));

    let agreement: f64 = (0..inst.len())
        .filter(|&i| inst.label(i) == p.value(i))
        .map(|i| inst.weight(i))
        .sum();
    report.assertions.push(Assertion::at_most(
        "predictor agrees with the target on exactly half the cube",
        (agreement - 0.5).abs(),
        0.0,
        EXACT,
    ));

    let mut row = BTreeMap::new();
    row.insert("ma_parity_basis".into(), ma_basis);
    row.insert("ma_all16".into(), worst_all16);
    row.insert("best_post_cor".into(), best_cor);
    row.insert("dictator_cor".into(), cor);
    row.insert("ece".into(), cal);
    report.push_trial(row);
    report
}

fn suite_restricted_wal(seed: u64, count: usize, jobs: usize) -> RunReport {
    let mut report = RunReport::new("verify restricted-wal", Some(seed));
    let corpus = corpus_wal(seed, count);
    for tau in [0.05, 0.01] {
        let config = LearnerConfig::new(tau).expect("valid config");
        let rows = run_parallel(jobs, corpus.clone(), |_, (inst, class)| {
            let (p, trace) =
                learn_multiaccurate(&inst, &class, &config).expect("learner converges");
            let cor = predictor_correlation(&inst, &p).expect("audit runs");
            let opt = opt_correlation(&inst, &class).expect("audit runs").value;
            (cor - (2.0 * opt - 1.0 - 2.0 * tau), trace.oracle_calls)
        });
        let mut worst_margin = f64::INFINITY;
        let mut max_calls = 0u64;
        for (i, (margin, calls)) in rows.iter().enumerate() {
            worst_margin = worst_margin.min(*margin);
            max_calls = max_calls.max(*calls);
            report.oracle_calls_total += calls;
            let mut row = BTreeMap::new();
            row.insert("tau".into(), tau);
            row.insert("instance".into(), i as f64);
            row.insert("margin".into(), *margin);
            row.insert("oracle_calls".into(), *calls as f64);
            report.push_trial(row);
        }
        report.assertions.push(Assertion::at_least(
            format!("cor(y, 2p-1) >= 2 Opt - 1 - 2 tau at tau = {tau}"),
            worst_margin,
            0.0,
            TOL,
        ));
        report.assertions.push(Assertion::at_most(
            format!("oracle calls <= 8 / tau^2 at tau = {tau}"),
            max_calls as f64,
            8.0 / (tau * tau),
            0.0,
        ));
    }
    report
}

fn suite_strong_agnostic(seed: u64, count: usize, jobs: usize) -> RunReport {
    let mut report = RunReport::new("verify strong-agnostic", Some(seed));
    let corpus = corpus_wal(seed, count);
    for tau in [0.05, 0.01] {
        let config = LearnerConfig::new(tau).expect("valid config");
        let rows = run_parallel(jobs, corpus.clone(), |_, (inst, class)| {
            let (p, trace) = learn_calibrated_multiaccurate(&inst, &class, &config, None)
                .expect("learner converges");
            let cor = correlation(&inst, &threshold(&p)).expect("audit runs");
            let opt = opt_correlation(&inst, &class).expect("audit runs").value;
            (cor - (opt - 4.0 * tau), trace.oracle_calls)
        });
        let mut worst_margin = f64::INFINITY;
        let mut max_calls = 0u64;
        for (i, (margin, calls)) in rows.iter().enumerate() {
            worst_margin = worst_margin.min(*margin);
            max_calls = max_calls.max(*calls);
            report.oracle_calls_total += calls;
            let mut row = BTreeMap::new();
            row.insert("tau".into(), tau);
            row.insert("instance".into(), i as f64);
            row.insert("margin".into(), *margin);
            row.insert("oracle_calls".into(), *calls as f64);
            report.push_trial(row);
        }
        report.assertions.push(Assertion::at_least(
            format!("cor(y, sign(2p-1)) >= Opt - 4 tau at tau = {tau}"),
            worst_margin,
            0.0,
            TOL,
        ));
        report.assertions.push(Assertion::at_most(
            format!("oracle calls <= 8 / tau^2 at tau = {tau}"),
            max_calls as f64,
            8.0 / (tau * tau),
            0.0,
        ));
    }
    report
}

fn suite_sqloss(seed: u64, count: usize) -> RunReport {
    let mut report = RunReport::new("verify sqloss-correlation", Some(seed));
    let corpus = corpus_wal(seed, 25);
    let mut state = seed | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut worst_margin = f64::INFINITY;
    let mut exercised = 0usize;
    for trial in 0..count {
        let (inst, _) = &corpus[trial % corpus.len()];
        let h: Vec<f64> = if trial % 2 == 0 {
            (0..inst.len()).map(|_| next() * 2.0 - 0.5).collect()
        } else {
            (0..inst.len())
                .map(|j| inst.label(j) + (next() - 0.5) * 0.6)
                .collect()
        };
        let out = sqloss_to_correlation(inst, &h).expect("conversion runs");
        if out.gamma > 0.0 {
            exercised += 1;
            worst_margin = worst_margin.min(out.correlation - 2.0 * out.gamma);
        }
        let mut row = BTreeMap::new();
        row.insert("gamma".into(), out.gamma);
        row.insert("correlation".into(), out.correlation);
        report.push_trial(row);
    }
    report.assertions.push(Assertion::at_least(
        "correlation >= 2 gamma whenever gamma > 0",
        worst_margin,
        0.0,
        TOL,
    ));
    report.assertions.push(Assertion::at_least(
        "positive-gamma cases exercised",
        exercised as f64,
        100.0,
        0.0,
    ));
    report
}

fn suite_wma_identity(seed: u64, count: usize) -> RunReport {
    let mut report = RunReport::new("verify wma-identity", Some(seed));
    let corpus = corpus_deterministic(seed, count.div_ceil(2));
    let mut max_disc: f64 = 0.0;
    let mut checked = 0usize;
    for (i, (inst, class)) in corpus.iter().enumerate() {
        for (j, w) in [WeightFn::Constant, WeightFn::WMax].iter().enumerate() {
            let p = seeded_predictor(inst, seed ^ (2 * i + j) as u64);
            match verify_identity_wma(inst, &p, class, w) {
                Ok(check) => {
                    checked += 1;
                    max_disc = max_disc.max(check.discrepancy);
                    let mut row = BTreeMap::new();
                    row.insert("lhs".into(), check.lhs_weighted_ma);
                    row.insert("rhs".into(), check.rhs_cor_times_dns);
                    row.insert("discrepancy".into(), check.discrepancy);
                    report.push_trial(row);
                }
                Err(_) => continue, // degenerate zero-density draw
            }
        }
    }
    report.assertions.push(Assertion::at_most(
        "max |weighted MA - cor * dns| over the corpus",
        max_disc,
        0.0,
        IDENTITY_TOL,
    ));
    report.assertions.push(Assertion::at_least(
        "identity checks performed",
        checked as f64,
        count as f64,
        0.0,
    ));
    report
}

fn suite_showcase() -> RunReport {
    let mut report = RunReport::new("verify showcase-density", None);
    let cfg = ShowcaseConfig::new(0.05, 0.2).expect("valid config");
    let (inst, p) = build_showcase(&cfg).expect("construction builds");
    let ttv = measure_ttv(&inst, &p)
        .expect("nonzero measure")
        .density(&inst)
        .expect("density computes");
    let max = measure_weighted(&inst, &p, &WeightFn::WMax)
        .expect("nonzero measure")
        .density(&inst)
        .expect("density computes");
    report.assertions.push(Assertion::at_most(
        "minimal measure density at (0.05, 0.2) equals 0.257",
        (ttv - 0.257).abs(),
        0.0,
        TOL,
    ));
    report.assertions.push(Assertion::at_most(
        "maximal measure density at (0.05, 0.2) equals 0.46",
        (max - 0.46).abs(),
        0.0,
        TOL,
    ));
    report.assertions.push(Assertion::at_most(
        "showcase predictor is perfectly calibrated",
        ece(&inst, &p).expect("audit runs").value,
        0.0,
        1e-12,
    ));

    let mut worst_gap: f64 = 0.0;
    for eta_step in 1..=10 {
        for delta_step in 1..=9 {
            let eta = eta_step as f64 / 100.0;
            let delta = delta_step as f64 / 20.0;
            let cfg = ShowcaseConfig::new(eta, delta).expect("valid config");
            let (inst, p) = build_showcase(&cfg).expect("construction builds");
            let ttv = measure_ttv(&inst, &p)
                .expect("nonzero measure")
                .density(&inst)
                .expect("density computes");
            let max = measure_weighted(&inst, &p, &WeightFn::WMax)
                .expect("nonzero measure")
                .density(&inst)
                .expect("density computes");
            worst_gap = worst_gap
                .max((ttv - cfg.density_ttv()).abs())
                .max((max - cfg.density_max()).abs());
            let mut row = BTreeMap::new();
            row.insert("eta".into(), eta);
            row.insert("delta".into(), delta);
            row.insert("dns_ttv".into(), ttv);
            row.insert("dns_max".into(), max);
            report.push_trial(row);
        }
    }
    report.assertions.push(Assertion::at_most(
        "closed forms across the parameter grid",
        worst_gap,
        0.0,
        TOL,
    ));
    report
}

fn suite_density_bounds(seed: u64, count: usize) -> RunReport {
    let mut report = RunReport::new("verify density-bounds", Some(seed));
    let corpus = corpus_deterministic(seed, count);
    let mut worst_a = f64::NEG_INFINITY; // gap - 2 ECE, must stay <= 0
    let mut worst_b = f64::INFINITY; // E[min] - (best error - ECE), must stay >= 0
    let mut nontrivial = 0usize;
    for (i, (inst, class)) in corpus.iter().enumerate() {
        let p = recalibrate(inst, &coarse_predictor(inst, seed ^ (7919 * i) as u64, 0.2), 0.05)
            .expect("recalibration runs");
        for w in [WeightFn::Constant, WeightFn::WMax] {
            let r = match density_bounds(inst, &p, &w, 0.05) {
                Ok(r) => r,
                Err(_) => continue, // target hit exactly: no measure to audit
            };
            nontrivial += 1;
            worst_a = worst_a.max(r.calibration_gap - 2.0 * r.ece);
            let mut row = BTreeMap::new();
            row.insert("density".into(), r.density);
            row.insert("gap".into(), r.calibration_gap);
            row.insert("ece".into(), r.ece);
            report.push_trial(row);
        }
        let (best_err, _) = measured_hardness(inst, &p, class).expect("enumeration runs");
        let cal = ece(inst, &p).expect("audit runs").value;
        let e_min: f64 = (0..inst.len())
            .map(|j| inst.weight(j) * p.value(j).min(1.0 - p.value(j)))
            .sum();
        worst_b = worst_b.min(e_min - (best_err - cal));
    }
    report.assertions.push(Assertion::at_most(
        "|dns - 2 E[w(p) p (1-p)]| <= 2 ECE for both weights",
        worst_a,
        0.0,
        TOL,
    ));
    report.assertions.push(Assertion::at_least(
        "E[min(p, 1-p)] >= best enumerated error - ECE",
        worst_b,
        0.0,
        TOL,
    ));
    report.assertions.push(Assertion::at_least(
        "non-degenerate measures audited",
        nontrivial as f64,
        count as f64,
        0.0,
    ));
    report
}

fn suite_ihcl(seed: u64, count: usize, jobs: usize) -> RunReport {
    let mut report = RunReport::new("verify ihcl-density", Some(seed));
    let corpus = corpus_ihcl(seed, count);
    let eps = 0.1;
    let delta_target = 0.25;
    let tau = 0.1;
    let results = run_parallel(jobs, corpus, |_, (inst, class)| {
        let outcome = ihcl_pipeline(&inst, &class, eps, delta_target, tau)
            .expect("pipeline runs");
        match outcome {
            PipelineOutcome::Hardcore {
                predictor,
                measure,
                checks,
                trace,
                ..
            } => {
                // pointwise chain against the minimal measure
                let ttv = measure_ttv(&inst, &predictor).expect("nonzero measure");
                let mut chain_ok = true;
                for j in 0..inst.len() {
                    let a = ttv.values()[j];
                    let c = measure.values()[j];
                    if !(a <= c + 1e-12 && c <= 2.0 * a + 1e-12) {
                        chain_ok = false;
                    }
                }
                Some((checks, chain_ok, trace.oracle_calls))
            }
            PipelineOutcome::NoHardness { .. } => None,
        }
    });
    let mut worst_density = f64::INFINITY;
    let mut worst_adv = f64::INFINITY;
    let mut chain_all = true;
    let mut hard = 0usize;
    for item in results.into_iter().flatten() {
        let (checks, chain_ok, calls) = item;
        hard += 1;
        report.oracle_calls_total += calls;
        worst_density = worst_density.min(checks.density - (2.0 * checks.delta_measured - tau));
        worst_adv = worst_adv.min(
            0.5 + 1.5 * checks.weighted_ma_error / checks.density - checks.advantage,
        );
        chain_all &= chain_ok;
        let mut row = BTreeMap::new();
        row.insert("density".into(), checks.density);
        row.insert("delta_measured".into(), checks.delta_measured);
        row.insert("advantage".into(), checks.advantage);
        row.insert("weighted_ma".into(), checks.weighted_ma_error);
        row.insert("oracle_calls".into(), calls as f64);
        report.push_trial(row);
    }
    report.assertions.push(Assertion::at_least(
        "dns(mu_max) >= 2 E[min(p,1-p)] - tau",
        worst_density,
        0.0,
        TOL,
    ));
    report.assertions.push(Assertion::at_least(
        "advantage <= 1/2 + 3 eps'/(2 dns)",
        worst_adv,
        0.0,
        TOL,
    ));
    report.assertions.push(Assertion::at_least(
        "pointwise measure chain holds everywhere",
        f64::from(u8::from(chain_all)),
        1.0,
        0.0,
    ));
    report.assertions.push(Assertion::at_least(
        "hardcore branch exercised",
        hard as f64,
        1.0,
        0.0,
    ));
    report
}

fn suite_tier_cost(seed: u64, count: usize, jobs: usize) -> RunReport {
    let mut report = RunReport::new("verify tier-cost", Some(seed));
    let tau = 0.05;
    let config = LearnerConfig::new(tau).expect("valid config");
    let corpus: Vec<_> = corpus_deterministic(seed, count);
    let rows = run_parallel(jobs, corpus, |_, (inst, class)| {
        let (_, cal) = learn_calibrated_multiaccurate(&inst, &class, &config, None)
            .expect("learner converges");
        let (_, mc) = learn_multicalibrated(&inst, &class, &config).expect("learner converges");
        (cal.oracle_calls, mc.oracle_calls)
    });
    let mut cal_calls: Vec<u64> = Vec::new();
    let mut mc_calls: Vec<u64> = Vec::new();
    for (i, (c, m)) in rows.iter().enumerate() {
        cal_calls.push(*c);
        mc_calls.push(*m);
        report.oracle_calls_total += c + m;
        let mut row = BTreeMap::new();
        row.insert("instance".into(), i as f64);
        row.insert("calma_calls".into(), *c as f64);
        row.insert("mc_calls".into(), *m as f64);
        report.push_trial(row);
    }
    cal_calls.sort_unstable();
    mc_calls.sort_unstable();
    let cal_median = cal_calls[cal_calls.len() / 2] as f64;
    let mc_median = mc_calls[mc_calls.len() / 2] as f64;
    report.assertions.push(Assertion::at_most(
        "median oracle calls: calibrated multiaccuracy <= multicalibration",
        cal_median,
        mc_median,
        0.0,
    ));
    report
}

fn suite_gl(seed: u64, count: usize, jobs: usize) -> RunReport {
    let mut report = RunReport::new("verify gl", Some(seed));
    let n = 8u32;
    let gamma = 0.3;
    let results = run_parallel(jobs, (0..count).collect::<Vec<_>>(), |_, trial| {
        let poly_seed = seed.wrapping_add(31 * trial as u64 + 7);
        let terms = planted_poly(n, poly_seed, 3, 4, gamma);
        let values: Vec<f64> = (0..1u64 << n)
            .map(|i| {
                terms
                    .iter()
                    .map(|&(m, c)| c * cube::parity_value(i, m))
                    .sum()
            })
            .collect();
        let spectrum = full_spectrum(&values).expect("spectrum computes");
        let cfg = GlConfig::new(gamma, 1e-4, seed.wrapping_add(trial as u64))
            .expect("valid config");
        let result =
            goldreich_levin(|i| values[i as usize], n, &cfg).expect("search runs");

        let mut missed = 0usize;
        for &mask in &spectrum.heavy(gamma) {
            if !result.subsets.contains(&mask) {
                missed += 1;
            }
        }
        let mut spurious = 0usize;
        for &mask in &result.subsets {
            if spectrum.coefficient(mask).abs() < gamma / 2.0 {
                spurious += 1;
            }
        }
        (missed, spurious, result.subsets.len(), result.complete)
    });
    let mut missed_total = 0usize;
    let mut spurious_total = 0usize;
    let mut max_list = 0usize;
    let mut all_complete = true;
    for (i, (missed, spurious, list, complete)) in results.iter().enumerate() {
        missed_total += missed;
        spurious_total += spurious;
        max_list = max_list.max(*list);
        all_complete &= complete;
        let mut row = BTreeMap::new();
        row.insert("seed_index".into(), i as f64);
        row.insert("missed".into(), *missed as f64);
        row.insert("spurious".into(), *spurious as f64);
        row.insert("list_size".into(), *list as f64);
        report.push_trial(row);
    }
    report.assertions.push(Assertion::at_most(
        "heavy coefficients missed across all seeds",
        missed_total as f64,
        0.0,
        0.0,
    ));
    report.assertions.push(Assertion::at_most(
        "below-half-threshold subsets returned",
        spurious_total as f64,
        0.0,
        0.0,
    ));
    report.assertions.push(Assertion::at_most(
        "list size <= 4 / gamma^2",
        max_list as f64,
        (4.0 / (gamma * gamma)).ceil(),
        0.0,
    ));
    report.assertions.push(Assertion::at_least(
        "all searches ran to completion",
        f64::from(u8::from(all_complete)),
        1.0,
        0.0,
    ));
    report
}

/// Sparse polynomial with heavy terms above `gamma` and light ones below
/// `gamma / 2`; total l1 mass kept at or below 1.
pub fn planted_poly(n: u32, seed: u64, heavy: usize, light: usize, gamma: f64) -> Vec<(u64, f64)> {
    let mut state = seed | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let size = 1u64 << n;
    let mut masks = Vec::new();
    let mut terms = Vec::new();
    let heavy_weight = (0.98 / heavy as f64).min(0.9).max(gamma * 1.3);
    for _ in 0..heavy {
        let mut m = next() % size;
        while masks.contains(&m) {
            m = next() % size;
        }
        masks.push(m);
        let sign = if next() & 1 == 1 { 1.0 } else { -1.0 };
        terms.push((m, sign * heavy_weight));
    }
    let light_weight = (gamma * 0.3).min(0.02 / light.max(1) as f64);
    for _ in 0..light {
        let mut m = next() % size;
        while masks.contains(&m) {
            m = next() % size;
        }
        masks.push(m);
        let sign = if next() & 1 == 1 { 1.0 } else { -1.0 };
        terms.push((m, sign * light_weight));
    }
    let l1: f64 = terms.iter().map(|(_, c)| c.abs()).sum();
    if l1 > 1.0 {
        for t in &mut terms {
            t.1 /= l1;
        }
    }
    terms
}

fn suite_projection(seed: u64, count: usize) -> RunReport {
    let mut report = RunReport::new("verify projection", Some(seed));
    let corpus = corpus_wal(seed, count);
    let mut worst_margin = f64::INFINITY;
    for (i, (inst, class)) in corpus.iter().enumerate() {
        let p = seeded_predictor(inst, seed ^ (104_729 * i) as u64);
        let result = project_span(inst, &p, class, None).expect("projection solves");
        let tau = ma_error(inst, &p, class).expect("audit runs").value;
        let lhs: f64 = (0..inst.len())
            .map(|j| {
                let pm = 2.0 * inst.label(j) - 1.0;
                let h = result.h_values[j];
                inst.weight(j) * (1.0 - 2.0 * pm * h + h * h)
            })
            .sum();
        let rhs = result.squared_loss_bound(tau);
        worst_margin = worst_margin.min(rhs - lhs);
        let mut row = BTreeMap::new();
        row.insert("gamma".into(), result.gamma);
        row.insert("l1_norm".into(), result.l1_norm);
        row.insert("lhs".into(), lhs);
        row.insert("rhs".into(), rhs);
        report.push_trial(row);
    }
    report.assertions.push(Assertion::at_least(
        "E[((2y-1) - clip(q))^2] <= 1 - gamma + 4 tau sum|lambda|",
        worst_margin,
        0.0,
        TOL,
    ));
    report
}

fn suite_determinism(seed: u64) -> RunReport {
    let mut report = RunReport::new("verify determinism", Some(seed));
    // same seed twice: identical serialized instances and identical reports
    let build = || {
        let (inst, class) = random_instance(
            seed,
            32,
            &ClassSpec::RandomBoolean { m: 6 },
            &LabelMode::BayesUniform,
        )
        .expect("instance builds");
        let file = schema::to_instance_file(&inst, Some(&class), None, None);
        serde_json::to_string_pretty(&file).expect("serializes")
    };
    let a = build();
    let b = build();
    report.assertions.push(Assertion::at_least(
        "identical seeds produce byte-identical instance files",
        f64::from(u8::from(a == b)),
        1.0,
        0.0,
    ));

    let run_audit = || {
        let mut inner = RunReport::new("audit", Some(seed));
        let (inst, class) = random_instance(
            seed,
            16,
            &ClassSpec::RandomBoolean { m: 4 },
            &LabelMode::DeterministicRandom,
        )
        .expect("instance builds");
        let p = seeded_predictor(&inst, seed);
        let mut row = BTreeMap::new();
        row.insert("ma".into(), ma_error(&inst, &p, &class).expect("audit").value);
        row.insert("ece".into(), ece(&inst, &p).expect("audit").value);
        inner.push_trial(row);
        inner.aggregate();
        inner.to_json()
    };
    let ra = run_audit();
    let rb = run_audit();
    report.assertions.push(Assertion::at_least(
        "identical seeds produce byte-identical reports",
        f64::from(u8::from(ra == rb)),
        1.0,
        0.0,
    ));
    report
}
