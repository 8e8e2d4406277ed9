//! Shared corpus generation and independent re-computation oracles for the
//! integration suites. The oracles deliberately work from the raw vectors
//! (weights, label values, hypothesis tables) rather than going through the
//! metric implementations they check.

#![allow(dead_code)]

use fairboost_core::constructions::{random_instance, ClassSpec, LabelMode};
use fairboost_core::hypothesis::HypothesisClass;
use fairboost_core::instance::FiniteInstance;
use fairboost_core::predictor::Predictor;

/// Deterministic mixed corpus: cycles over class families, label modes, and
/// domain sizes. Every entry is reproducible from its index.
pub fn corpus(count: usize) -> Vec<(FiniteInstance, HypothesisClass)> {
    (0..count)
        .map(|i| {
            let seed = 1000 + i as u64;
            let spec = match i % 4 {
                0 => ClassSpec::Parities {
                    n: 3 + (i / 4 % 3) as u32,
                },
                1 => ClassSpec::Dictators {
                    n: 3 + (i / 4 % 4) as u32,
                },
                2 => ClassSpec::Juntas {
                    k: 2,
                    n: 4 + (i / 4 % 2) as u32,
                    subsets: 2 + i / 8 % 2,
                },
                _ => ClassSpec::RandomBoolean { m: 4 + i / 4 % 11 },
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
                    noise: 0.25,
                },
            };
            random_instance(seed, n_points, &spec, &mode).expect("corpus entry builds")
        })
        .collect()
}

/// Deterministic-label corpus (for the measure machinery, which needs a
/// Boolean target) with complement-closed Boolean01 classes.
pub fn deterministic_corpus(count: usize) -> Vec<(FiniteInstance, HypothesisClass)> {
    (0..count)
        .map(|i| {
            let seed = 7000 + i as u64;
            let spec = match i % 2 {
                0 => ClassSpec::Juntas {
                    k: 2,
                    n: 4 + (i / 2 % 3) as u32,
                    subsets: 2,
                },
                _ => ClassSpec::RandomBoolean { m: 5 + i % 8 },
            };
            let n_points = match &spec {
                ClassSpec::Juntas { n, .. } => 1usize << n,
                _ => 10 + (i * 7) % 90,
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

/// A deterministic seeded random predictor on the instance's domain.
pub fn random_predictor(inst: &FiniteInstance, seed: u64) -> Predictor {
    // xorshift-style mixing; self-contained so the oracle stack stays
    // independent of the crate's rng choices
    let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
    let mut values = Vec::with_capacity(inst.len());
    for _ in 0..inst.len() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        values.push((state >> 11) as f64 / (1u64 << 53) as f64);
    }
    Predictor::new(values).unwrap()
}

/// Naive multiaccuracy recomputation: plain nested loops over raw tables.
pub fn naive_ma(inst: &FiniteInstance, p: &Predictor, class: &HypothesisClass) -> (f64, usize) {
    let weights = inst.weights();
    let labels = inst.labels().values();
    let pv = p.values();
    let mut best = -1.0;
    let mut arg = 0;
    for (idx, h) in class.iter().enumerate() {
        let hv = h.values();
        let mut sum = 0.0;
        for i in 0..weights.len() {
            sum += weights[i] * hv[i] * (labels[i] - pv[i]);
        }
        if sum.abs() > best {
            best = sum.abs();
            arg = idx;
        }
    }
    (best, arg)
}

/// Naive multicalibration recomputation, conditional means included.
pub fn naive_mc(inst: &FiniteInstance, p: &Predictor, class: &HypothesisClass) -> f64 {
    let weights = inst.weights();
    let labels = inst.labels().values();
    let pv = p.values();
    let n = weights.len();
    // conditional mean per point, by scanning for equal predictor values
    let mut cond = vec![0.0; n];
    for i in 0..n {
        let mut mass = 0.0;
        let mut acc = 0.0;
        for j in 0..n {
            if pv[j] == pv[i] {
                mass += weights[j];
                acc += weights[j] * labels[j];
            }
        }
        cond[i] = if mass > 0.0 { acc / mass } else { pv[i] };
    }
    let mut best: f64 = -1.0;
    for h in class.iter() {
        let hv = h.values();
        let mut sum = 0.0;
        for i in 0..n {
            sum += weights[i] * (hv[i] * (cond[i] - pv[i])).abs();
        }
        best = best.max(sum);
    }
    best
}

/// Naive best correlation over the class.
pub fn naive_opt(inst: &FiniteInstance, class: &HypothesisClass) -> f64 {
    let weights = inst.weights();
    let labels = inst.labels().values();
    let mut best = f64::NEG_INFINITY;
    for h in class.iter() {
        let hv = h.values();
        let mut sum = 0.0;
        for i in 0..weights.len() {
            sum += weights[i] * (2.0 * labels[i] - 1.0) * hv[i];
        }
        best = best.max(sum);
    }
    best
}

/// Rebuilds instance, predictor, and class with the points permuted.
pub fn permuted(
    inst: &FiniteInstance,
    p: &Predictor,
    class: &HypothesisClass,
    perm: &[usize],
) -> (FiniteInstance, Predictor, HypothesisClass) {
    use fairboost_core::hypothesis::Hypothesis;
    use fairboost_core::instance::Labels;

    let points: Vec<String> = perm.iter().map(|&i| inst.points()[i].clone()).collect();
    let weights: Vec<f64> = perm.iter().map(|&i| inst.weight(i)).collect();
    let label_values: Vec<f64> = perm.iter().map(|&i| inst.label(i)).collect();
    let labels = if inst.is_deterministic() {
        Labels::Deterministic(label_values)
    } else {
        Labels::Bayes(label_values)
    };
    let inst2 = FiniteInstance::new(points, weights, labels).unwrap();
    let p2 = Predictor::new(perm.iter().map(|&i| p.value(i)).collect()).unwrap();
    let class2 = HypothesisClass::new(
        class
            .iter()
            .map(|h| {
                Hypothesis::new(
                    h.name(),
                    h.kind(),
                    perm.iter().map(|&i| h.value(i)).collect(),
                )
                .unwrap()
            })
            .collect(),
    )
    .unwrap();
    (inst2, p2, class2)
}
