//! Exact auditors: correlation, accuracy in expectation, calibration,
//! multiaccuracy (plain and weighted), and multicalibration.
//!
//! Every metric is a finite weighted sum over the instance. Conventions:
//!
//! * labels enter through `2y - 1`, so correlation lives in `[-1,1]`;
//! * the residual audited by multiaccuracy-style metrics is `y - p(x)`;
//! * level sets of a predictor are grouped by the exact bit pattern of the
//!   value, so there is no epsilon-merging ambiguity.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hardcore::WeightFn;
use crate::hypothesis::{Hypothesis, HypothesisClass};
use crate::instance::FiniteInstance;
use crate::predictor::Predictor;
use crate::Result;

/// Which quantity an [`AuditReport`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Eae,
    Ece,
    Ma,
    WeightedMa,
    Mc,
    Opt,
    HardnessAdvantage,
}

/// What achieved the reported extremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
}

/// A metric value with an optional witness for the maximizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub metric: Metric,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl AuditReport {
    fn with_hypothesis(metric: Metric, value: f64, name: &str) -> Self {
        AuditReport {
            metric,
            value,
            witness: Some(Witness {
                hypothesis: Some(name.to_string()),
                level: None,
            }),
        }
    }
}

/// `cor(y, h) = E[(2y - 1) h(x)]` for a per-point table `h` with range
/// `[-1,1]`.
pub fn correlation_values(inst: &FiniteInstance, values: &[f64]) -> Result<f64> {
    inst.check_domain(values.len())?;
    for &v in values {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange {
                field: "correlation input",
                value: v,
                range: "[-1,1]",
            });
        }
    }
    let mut total = 0.0;
    for (i, &v) in values.iter().enumerate() {
        total += inst.weight(i) * (2.0 * inst.label(i) - 1.0) * v;
    }
    Ok(total)
}

/// Correlation of a hypothesis with the labels.
pub fn correlation(inst: &FiniteInstance, h: &Hypothesis) -> Result<f64> {
    correlation_values(inst, h.values())
}

/// Correlation of the `[-1,1]` view `2p - 1` of a predictor.
pub fn predictor_correlation(inst: &FiniteInstance, p: &Predictor) -> Result<f64> {
    inst.check_domain(p.len())?;
    correlation_values(inst, &p.pm1())
}

/// `Opt(C) = max_{c in C} cor(y, c)`, with the achieving hypothesis.
///
/// For a negation-closed class this equals `max_c |cor(y, c)|`.
pub fn opt_correlation(inst: &FiniteInstance, class: &HypothesisClass) -> Result<AuditReport> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_name = "";
    for h in class.iter() {
        let c = correlation(inst, h)?;
        if c > best {
            best = c;
            best_name = h.name();
        }
    }
    Ok(AuditReport::with_hypothesis(Metric::Opt, best, best_name))
}

/// Expected accuracy error `|E[y] - E[p(x)]|`.
pub fn eae(inst: &FiniteInstance, p: &Predictor) -> Result<f64> {
    inst.check_domain(p.len())?;
    let mean_p = inst.expect(p.values())?;
    Ok((inst.mean_label() - mean_p).abs())
}

/// Per-level conditional label means: `(value, mass, E[y | p = value])`.
/// Levels of zero mass report a conditional mean equal to the level value, so
/// they contribute nothing to calibration metrics.
pub fn level_means(inst: &FiniteInstance, p: &Predictor) -> Result<Vec<(f64, f64, f64)>> {
    inst.check_domain(p.len())?;
    Ok(p.level_sets()
        .into_iter()
        .map(|level| {
            let mass: f64 = level.points.iter().map(|&i| inst.weight(i)).sum();
            let mean = if mass > 0.0 {
                level
                    .points
                    .iter()
                    .map(|&i| inst.weight(i) * inst.label(i))
                    .sum::<f64>()
                    / mass
            } else {
                level.value
            };
            (level.value, mass, mean)
        })
        .collect())
}

/// Expected calibration error `E[|E[y | p(x)] - p(x)|]`, computed over exact
/// level sets. The witness records the level with the largest conditional gap.
pub fn ece(inst: &FiniteInstance, p: &Predictor) -> Result<AuditReport> {
    let mut total = 0.0;
    let mut worst_gap = -1.0;
    let mut worst_level = 0.0;
    for (value, mass, mean) in level_means(inst, p)? {
        let gap = (mean - value).abs();
        total += mass * gap;
        if gap > worst_gap {
            worst_gap = gap;
            worst_level = value;
        }
    }
    Ok(AuditReport {
        metric: Metric::Ece,
        value: total,
        witness: Some(Witness {
            hypothesis: None,
            level: Some(worst_level),
        }),
    })
}

/// The dual form of the calibration error: the maximum of
/// `E[v(p(x))(y - p(x))]` over bounded auditing functions `v`, realized by
/// `v(t) = sign(E[y | p = t] - t)`. Agrees with [`ece`] up to roundoff; the
/// two routes are kept separate so tests can compare them.
pub fn ece_dual(inst: &FiniteInstance, p: &Predictor) -> Result<f64> {
    let stats = level_means(inst, p)?;
    // realize the optimal auditor per level, then evaluate the bilinear form
    let mut total = 0.0;
    for level in p.level_sets() {
        let (_, _, mean) = stats
            .iter()
            .find(|(v, _, _)| v.to_bits() == level.value.to_bits())
            .copied()
            .expect("level present in stats");
        let v = if mean - level.value >= 0.0 { 1.0 } else { -1.0 };
        for &i in &level.points {
            total += inst.weight(i) * v * (inst.label(i) - level.value);
        }
    }
    Ok(total)
}

/// Multiaccuracy error `max_{c in C} |E[c(x)(y - p(x))]|` with the witness
/// hypothesis. Ties break toward the lowest index.
pub fn ma_error(
    inst: &FiniteInstance,
    p: &Predictor,
    class: &HypothesisClass,
) -> Result<AuditReport> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    inst.check_domain(p.len())?;
    let mut best = -1.0;
    let mut best_name = "";
    for h in class.iter() {
        inst.check_domain(h.values().len())?;
        let mut sum = 0.0;
        for i in 0..inst.len() {
            sum += inst.weight(i) * h.value(i) * (inst.label(i) - p.value(i));
        }
        if sum.abs() > best {
            best = sum.abs();
            best_name = h.name();
        }
    }
    Ok(AuditReport::with_hypothesis(Metric::Ma, best, best_name))
}

/// Weighted multiaccuracy error
/// `max_{c in C} |E[c(x) w(p(x)) (g(x) - p(x))]|`.
///
/// Defined only for deterministic labels; the weight function must be
/// evaluable at every value the predictor takes.
pub fn weighted_ma_error(
    inst: &FiniteInstance,
    p: &Predictor,
    class: &HypothesisClass,
    w: &WeightFn,
) -> Result<AuditReport> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    if !inst.is_deterministic() {
        return Err(Error::LabelsNotDeterministic);
    }
    inst.check_domain(p.len())?;
    let weights: Vec<f64> = p
        .values()
        .iter()
        .map(|&v| w.eval(v))
        .collect::<Result<_>>()?;
    let mut best = -1.0;
    let mut best_name = "";
    for h in class.iter() {
        inst.check_domain(h.values().len())?;
        let mut sum = 0.0;
        for (i, &wv) in weights.iter().enumerate() {
            sum += inst.weight(i) * h.value(i) * wv * (inst.label(i) - p.value(i));
        }
        if sum.abs() > best {
            best = sum.abs();
            best_name = h.name();
        }
    }
    Ok(AuditReport::with_hypothesis(
        Metric::WeightedMa,
        best,
        best_name,
    ))
}

/// Multicalibration error `max_{c in C} E[|c(x)(E[y | p(x)] - p(x))|]`,
/// with `c(x)` inside the absolute value, evaluated exactly as written.
pub fn mc_error(
    inst: &FiniteInstance,
    p: &Predictor,
    class: &HypothesisClass,
) -> Result<AuditReport> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    let stats = level_means(inst, p)?;
    // conditional gap per point, looked up through its level
    let mut gap = vec![0.0; inst.len()];
    for level in p.level_sets() {
        let (_, _, mean) = stats
            .iter()
            .find(|(v, _, _)| v.to_bits() == level.value.to_bits())
            .copied()
            .expect("level present in stats");
        for &i in &level.points {
            gap[i] = mean - level.value;
        }
    }
    let mut best = -1.0;
    let mut best_name = "";
    for h in class.iter() {
        inst.check_domain(h.values().len())?;
        let mut sum = 0.0;
        for (i, &g) in gap.iter().enumerate() {
            sum += inst.weight(i) * (h.value(i) * g).abs();
        }
        if sum > best {
            best = sum;
            best_name = h.name();
        }
    }
    Ok(AuditReport::with_hypothesis(Metric::Mc, best, best_name))
}

/// Draws a label for `point` from a Bernoulli coin with parameter `p(point)`.
/// Deterministic given `(seed, draw_index)`; distinct indices give independent
/// draws, which is what query-simulation needs.
pub fn sample_label(
    inst: &FiniteInstance,
    p: &Predictor,
    point: &str,
    seed: u64,
    draw_index: u64,
) -> Result<u8> {
    let i = inst.point_index(point)?;
    inst.check_domain(p.len())?;
    Ok(draw_bernoulli(p.value(i), seed, draw_index))
}

pub(crate) fn draw_bernoulli(prob: f64, seed: u64, draw_index: u64) -> u8 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(draw_index);
    let u: f64 = rng.gen::<f64>();
    u8::from(u < prob)
}

/// Stateful Bernoulli label source over a predictor: each call is a fresh
/// independent draw, reproducible from the seed.
pub struct LabelSampler {
    seed: u64,
    draws: u64,
}

impl LabelSampler {
    pub fn new(seed: u64) -> Self {
        LabelSampler { seed, draws: 0 }
    }

    pub fn draw(&mut self, prob: f64) -> u8 {
        let b = draw_bernoulli(prob, self.seed, self.draws);
        self.draws += 1;
        b
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }
}
