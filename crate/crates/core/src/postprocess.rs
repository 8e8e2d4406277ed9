//! Post-processing of predictors: affine and threshold transforms, the exact
//! best post-processor, squared-loss-to-correlation conversion, and
//! least-squares projection onto the span of a hypothesis class.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hypothesis::{Hypothesis, HypothesisClass, HypothesisKind};
use crate::instance::FiniteInstance;
use crate::metrics::correlation_values;
use crate::predictor::Predictor;
use crate::Result;

/// A map from distinct predictor values to outputs in `[-1,1]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PostProcessor {
    /// `(value, output)` pairs, sorted by value.
    pub table: Vec<(f64, f64)>,
}

impl PostProcessor {
    /// Applies the table to a predictor; every value must be covered.
    pub fn apply(&self, p: &Predictor) -> Result<Vec<f64>> {
        p.values()
            .iter()
            .map(|&v| {
                self.table
                    .iter()
                    .find(|(value, _)| value.to_bits() == v.to_bits())
                    .map(|&(_, out)| out)
                    .ok_or(Error::OutOfRange {
                        field: "post-processor domain",
                        value: v,
                        range: "predictor levels",
                    })
            })
            .collect()
    }
}

/// The `[-1,1]` view `2p - 1`.
pub fn affine_pm1(p: &Predictor) -> Vec<f64> {
    p.pm1()
}

/// `sign(2p - 1)` as a `{-1,1}` hypothesis, with `sign(0) = +1`.
pub fn threshold(p: &Predictor) -> Hypothesis {
    let values = p
        .values()
        .iter()
        .map(|&v| if 2.0 * v - 1.0 >= 0.0 { 1.0 } else { -1.0 })
        .collect();
    Hypothesis::new("sign(2p-1)", HypothesisKind::BooleanPM, values)
        .expect("signs are in {-1,1}")
}

/// The exact optimum over all post-processings `k : [0,1] -> [-1,1]` of the
/// correlation `cor(y, k(p))`.
///
/// Correlation is linear in the per-level outputs `k(v)`, so the maximum over
/// the product of intervals `[-1,1]^levels` sits at a vertex: the best `k` is
/// a sign pattern, namely `k(v) = sign(E[2y - 1 | p = v])`, achieving
/// `sum_v Pr[p = v] |E[2y - 1 | p = v]|`. This is exact, not a heuristic
/// restriction.
pub fn best_postprocessing(inst: &FiniteInstance, p: &Predictor) -> Result<(PostProcessor, f64)> {
    inst.check_domain(p.len())?;
    let mut table = Vec::new();
    let mut total = 0.0;
    for level in p.level_sets() {
        // Pr[p = v] * E[2y - 1 | p = v], the level's signed contribution
        let signed: f64 = level
            .points
            .iter()
            .map(|&i| inst.weight(i) * (2.0 * inst.label(i) - 1.0))
            .sum();
        let k = if signed >= 0.0 { 1.0 } else { -1.0 };
        table.push((level.value, k));
        total += signed.abs();
    }
    Ok((PostProcessor { table }, total))
}

/// Result of converting a squared-loss edge into a correlation guarantee.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SqLossConversion {
    /// Squared-loss improvement over the constant 1/2: `E[(y - 1/2)^2] - E[(y - h)^2]`.
    pub gamma: f64,
    /// The bounded function `2 clip(h) - 1`.
    pub bounded: Vec<f64>,
    /// Its correlation with the labels; at least `2 gamma` whenever `gamma > 0`.
    pub correlation: f64,
}

/// Converts any real-valued `h` that beats random guessing in squared loss
/// into a bounded weak learner: truncate `h` to `[0,1]` (which can only
/// shrink the loss) and take the `[-1,1]` view.
pub fn sqloss_to_correlation(inst: &FiniteInstance, h: &[f64]) -> Result<SqLossConversion> {
    inst.check_domain(h.len())?;
    let baseline = inst.squared_loss(&vec![0.5; inst.len()])?;
    let loss = inst.squared_loss(h)?;
    let gamma = baseline - loss;
    let bounded: Vec<f64> = h.iter().map(|&v| 2.0 * v.clamp(0.0, 1.0) - 1.0).collect();
    let correlation = correlation_values(inst, &bounded)?;
    Ok(SqLossConversion {
        gamma,
        bounded,
        correlation,
    })
}

/// Least-squares projection of `2p - 1` onto the span of a class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectionResult {
    /// `(hypothesis name, coefficient)` in class order.
    pub coefficients: Vec<(String, f64)>,
    pub l1_norm: f64,
    /// The projection `q = sum_s lambda_s c_s`, per point.
    pub q_values: Vec<f64>,
    /// `clip(q)` to `[-1,1]`, per point.
    pub h_values: Vec<f64>,
    /// Squared-norm improvement `E[(2p-1)^2] - E[((2p-1) - q)^2]`.
    pub gamma: f64,
    /// Condition number of the Gram matrix (ratio of extreme singular values).
    pub gram_condition_number: f64,
    /// Set when an l1 budget was supplied: whether the solution exceeds it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1_budget_exceeded: Option<bool>,
}

impl ProjectionResult {
    /// The projection-theorem bound `1 - gamma + 4 tau sum_s |lambda_s|` on
    /// `E[((2y-1) - clip(q))^2]`, for a caller-measured multiaccuracy
    /// error `tau`.
    pub fn squared_loss_bound(&self, tau: f64) -> f64 {
        1.0 - self.gamma + 4.0 * tau * self.l1_norm
    }
}

/// Singular values below this fraction of the largest are treated as zero
/// when inverting the Gram matrix; rank-deficient classes (e.g. containing
/// both `c` and `-c`) then get the minimum-norm solution.
const SV_CUTOFF: f64 = 1e-10;

/// Projects `2p - 1` onto `span(class)` under the domain weights by solving
/// the normal equations `G lambda = b` with `G_{st} = E[c_s c_t]` and
/// `b_s = E[c_s (2p - 1)]`, using the pseudo-inverse for rank-deficient `G`.
pub fn project_span(
    inst: &FiniteInstance,
    p: &Predictor,
    class: &HypothesisClass,
    l1_budget: Option<f64>,
) -> Result<ProjectionResult> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    inst.check_domain(p.len())?;
    inst.check_domain(class.domain_len())?;

    let m = class.len();
    let n = inst.len();
    let target = p.pm1();

    let mut gram = DMatrix::zeros(m, m);
    let mut rhs = DVector::zeros(m);
    for s in 0..m {
        let cs = class.get(s).values();
        for t in s..m {
            let ct = class.get(t).values();
            let mut dot = 0.0;
            for i in 0..n {
                dot += inst.weight(i) * cs[i] * ct[i];
            }
            gram[(s, t)] = dot;
            gram[(t, s)] = dot;
        }
        let mut dot = 0.0;
        for i in 0..n {
            dot += inst.weight(i) * cs[i] * target[i];
        }
        rhs[s] = dot;
    }

    let svd = gram.clone().svd(true, true);
    let sv_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let sv_min_kept = svd
        .singular_values
        .iter()
        .cloned()
        .filter(|&s| s > SV_CUTOFF * sv_max.max(1.0))
        .fold(f64::INFINITY, f64::min);
    let condition = if sv_min_kept.is_finite() && sv_min_kept > 0.0 {
        sv_max / sv_min_kept
    } else {
        f64::INFINITY
    };
    let lambda = svd
        .pseudo_inverse(SV_CUTOFF * sv_max.max(1.0))
        .map_err(|e| Error::InvalidConfig {
            reason: format!("gram pseudo-inverse failed: {e}"),
        })?
        * rhs;

    let mut q_values = vec![0.0; n];
    for s in 0..m {
        let cs = class.get(s).values();
        for i in 0..n {
            q_values[i] += lambda[s] * cs[i];
        }
    }
    let h_values: Vec<f64> = q_values.iter().map(|&v| v.clamp(-1.0, 1.0)).collect();

    let norm_sq = inst.expect(&target.iter().map(|&v| v * v).collect::<Vec<_>>())?;
    let residual_sq = inst.expect(
        &target
            .iter()
            .zip(&q_values)
            .map(|(&t, &q)| (t - q) * (t - q))
            .collect::<Vec<_>>(),
    )?;
    let gamma = norm_sq - residual_sq;

    let l1_norm: f64 = lambda.iter().map(|l| l.abs()).sum();
    let coefficients = class
        .iter()
        .zip(lambda.iter())
        .map(|(h, &l)| (h.name().to_string(), l))
        .collect();

    Ok(ProjectionResult {
        coefficients,
        l1_norm,
        q_values,
        h_values,
        gamma,
        gram_condition_number: condition,
        l1_budget_exceeded: l1_budget.map(|budget| l1_norm > budget),
    })
}
