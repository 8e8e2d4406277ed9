//! Measures, reweighted distributions, and hardness auditing.
//!
//! A measure is a `[0,1]`-valued reweighting of the base distribution. Given a
//! Boolean target `g` and a predictor `p`, the family of measures studied here
//! is `mu_w(x) = w(p(x)) |g(x) - p(x)|` for weight functions `w` with
//! `1 <= w(v) <= w_max(v) = 1/max(v, 1-v)`. The two distinguished members are
//! the minimal measure (`w = 1`) and the maximal one (`w = w_max`), whose
//! density doubles the minimal one exactly on perfectly calibrated predictors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hypothesis::{HypothesisClass, HypothesisKind};
use crate::instance::FiniteInstance;
use crate::learners::{learn_calibrated_multiaccurate, LearnerConfig, LearnerTrace};
use crate::metrics::{ece, weighted_ma_error};
use crate::predictor::Predictor;
use crate::Result;

/// `w_max(v) = 1 / max(v, 1 - v)`, the largest admissible weight at `v`.
pub fn w_max(v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange {
            field: "w_max argument",
            value: v,
            range: "[0,1]",
        });
    }
    Ok(1.0 / v.max(1.0 - v))
}

/// A weight function on prediction values.
///
/// Admissible weights satisfy `1 <= w(v) <= w_max(v)` pointwise, which keeps
/// every induced measure inside `[0,1]`.
#[derive(Debug, Clone)]
pub enum WeightFn {
    /// `w(v) = 1/max(v, 1-v)`.
    WMax,
    /// `w = 1`, plain multiaccuracy.
    Constant,
    /// Explicit table keyed by the exact bit pattern of grid values; values
    /// between table entries are deliberately undefined.
    Table(BTreeMap<u64, f64>),
}

impl WeightFn {
    pub fn table(entries: impl IntoIterator<Item = (f64, f64)>) -> Result<WeightFn> {
        let mut map = BTreeMap::new();
        for (v, w) in entries {
            let cap = w_max(v)?;
            if !(1.0..=cap + 1e-12).contains(&w) {
                return Err(Error::OutOfRange {
                    field: "weight table entry",
                    value: w,
                    range: "[1, w_max(v)]",
                });
            }
            map.insert(v.to_bits(), w);
        }
        Ok(WeightFn::Table(map))
    }

    pub fn eval(&self, v: f64) -> Result<f64> {
        match self {
            WeightFn::WMax => w_max(v),
            WeightFn::Constant => {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::OutOfRange {
                        field: "weight argument",
                        value: v,
                        range: "[0,1]",
                    });
                }
                Ok(1.0)
            }
            WeightFn::Table(map) => map
                .get(&v.to_bits())
                .copied()
                .ok_or(Error::MissingWeight { value: v }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightFn::WMax => "w_max",
            WeightFn::Constant => "1",
            WeightFn::Table(_) => "table",
        }
    }
}

/// A `[0,1]`-valued measure over the domain, not identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    values: Vec<f64>,
}

impl Measure {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            if !(0.0..=1.0 + 1e-12).contains(&v) {
                return Err(Error::OutOfRange {
                    field: "measure",
                    value: v,
                    range: "[0,1]",
                });
            }
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::MeasureIdenticallyZero);
        }
        Ok(Measure {
            values: values.iter().map(|&v| v.min(1.0)).collect(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Density `dns(mu) = E_{D_X}[mu(x)]` under the base distribution.
    pub fn density(&self, inst: &FiniteInstance) -> Result<f64> {
        inst.expect(&self.values)
    }
}

fn require_deterministic(inst: &FiniteInstance) -> Result<()> {
    if !inst.is_deterministic() {
        return Err(Error::LabelsNotDeterministic);
    }
    Ok(())
}

/// The minimal measure `|g(x) - p(x)|`.
pub fn measure_ttv(inst: &FiniteInstance, p: &Predictor) -> Result<Measure> {
    require_deterministic(inst)?;
    inst.check_domain(p.len())?;
    let values = (0..inst.len())
        .map(|i| (inst.label(i) - p.value(i)).abs())
        .collect();
    Measure::new(values)
}

/// The weighted measure `w(p(x)) |g(x) - p(x)|` for an admissible `w`.
pub fn measure_weighted(inst: &FiniteInstance, p: &Predictor, w: &WeightFn) -> Result<Measure> {
    require_deterministic(inst)?;
    inst.check_domain(p.len())?;
    let mut values = Vec::with_capacity(inst.len());
    for i in 0..inst.len() {
        let wv = w.eval(p.value(i))?;
        let cap = w_max(p.value(i))?;
        if !(1.0 - 1e-12..=cap + 1e-12).contains(&wv) {
            return Err(Error::OutOfRange {
                field: "weight value",
                value: wv,
                range: "[1, w_max(v)]",
            });
        }
        values.push(wv * (inst.label(i) - p.value(i)).abs());
    }
    Measure::new(values)
}

/// Reweights the instance by `mu` and renormalizes; labels carry over.
pub fn induce(inst: &FiniteInstance, mu: &Measure) -> Result<FiniteInstance> {
    inst.check_domain(mu.len())?;
    let dns = mu.density(inst)?;
    if dns <= 0.0 {
        return Err(Error::ZeroDensity);
    }
    let weights = (0..inst.len())
        .map(|i| inst.weight(i) * mu.values[i] / dns)
        .collect();
    inst.with_weights(weights)
}

/// Everything the hardness auditors measure about `(inst, mu, class)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HardcoreReport {
    /// `dns(mu)` under the base distribution.
    pub density: f64,
    /// `max_x mu(x) / dns(mu)`; bounded by `1/dns(mu)`.
    pub min_entropy_ratio: f64,
    /// `eta = E[g]` under the induced distribution.
    pub eta: f64,
    /// `max_{c in C} Pr[c = g]` under the induced distribution.
    pub advantage: f64,
    /// Name of the hypothesis achieving the advantage.
    pub advantage_witness: String,
    /// `max_{c in C} |E[(2g - 1) c]|` under the induced distribution.
    pub class_correlation: f64,
    /// Whether the class is complement-closed; without it the lower half of
    /// the advantage sandwich is not guaranteed.
    pub complement_closed: bool,
}

/// Audits how well the class predicts `g` when sampling from `mu`.
/// Requires a `{0,1}`-valued class; convert `{-1,1}` classes first.
pub fn hardcore_audit(
    inst: &FiniteInstance,
    mu: &Measure,
    class: &HypothesisClass,
) -> Result<HardcoreReport> {
    require_deterministic(inst)?;
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    if class.kind() != HypothesisKind::Boolean01 {
        return Err(Error::InvalidClassKind {
            expected: "boolean01",
            found: class.kind().name(),
        });
    }
    let induced = induce(inst, mu)?;
    let density = mu.density(inst)?;
    let max_mu = mu.values.iter().cloned().fold(0.0, f64::max);

    let eta = induced.mean_label();
    let mut advantage = -1.0;
    let mut advantage_witness = "";
    let mut class_correlation = -1.0;
    for h in class.iter() {
        induced.check_domain(h.values().len())?;
        let mut agree = 0.0;
        let mut cor = 0.0;
        for i in 0..induced.len() {
            let g = induced.label(i);
            let c = h.value(i);
            if c == g {
                agree += induced.weight(i);
            }
            cor += induced.weight(i) * (2.0 * g - 1.0) * c;
        }
        if agree > advantage {
            advantage = agree;
            advantage_witness = h.name();
        }
        if cor.abs() > class_correlation {
            class_correlation = cor.abs();
        }
    }

    Ok(HardcoreReport {
        density,
        min_entropy_ratio: max_mu / density,
        eta,
        advantage,
        advantage_witness: advantage_witness.to_string(),
        class_correlation,
        complement_closed: class.negation_closed(),
    })
}

/// Two-sided evaluation of the weighted-multiaccuracy identity: the weighted
/// multiaccuracy error of `p` on the labelled instance equals the class
/// correlation with `g` under the induced distribution times the density.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs_weighted_ma: f64,
    pub rhs_cor_times_dns: f64,
    pub discrepancy: f64,
}

pub fn verify_identity_wma(
    inst: &FiniteInstance,
    p: &Predictor,
    class: &HypothesisClass,
    w: &WeightFn,
) -> Result<IdentityCheck> {
    require_deterministic(inst)?;
    let lhs = weighted_ma_error(inst, p, class, w)?.value;
    let mu = measure_weighted(inst, p, w)?;
    let dns = mu.density(inst)?;
    if dns <= 0.0 {
        return Err(Error::ZeroDensity);
    }
    let induced = induce(inst, &mu)?;
    let mut cor_max: f64 = -1.0;
    for h in class.iter() {
        induced.check_domain(h.values().len())?;
        let mut cor = 0.0;
        for i in 0..induced.len() {
            cor += induced.weight(i) * (2.0 * induced.label(i) - 1.0) * h.value(i);
        }
        cor_max = cor_max.max(cor.abs());
    }
    let rhs = cor_max * dns;
    Ok(IdentityCheck {
        lhs_weighted_ma: lhs,
        rhs_cor_times_dns: rhs,
        discrepancy: (lhs - rhs).abs(),
    })
}

/// Density cross-checks tying measures, calibration, and hardness together.
///
/// All bounds are stated with the measured calibration error, so on exact
/// arithmetic they are theorems, not empirical observations:
///
/// * (a) `|dns(mu_w) - 2 E[w(p) p (1-p)]| <= 2 ECE`
/// * (b) `E[min(p, 1-p)] >= Pr[majority(p) != g] - ECE`
/// * (c) `dns(mu_ttv) >= E[2 p (1-p)] - 2 ECE`
/// * (d) `dns(mu_max) >= 2 E[min(p, 1-p)] - 2 ECE`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityReport {
    pub density: f64,
    pub weighted_quadratic_mean: f64,
    pub ece: f64,
    pub tau_cal: f64,
    pub calibration_gap: f64,
    pub bound_a_ok: bool,
    pub bound_a_ok_at_tau: bool,
    pub expected_min: f64,
    pub majority_error: f64,
    pub bound_b_ok: bool,
    pub density_ttv: f64,
    pub quadratic_mean: f64,
    pub bound_c_ok: bool,
    pub density_max: f64,
    pub bound_d_ok: bool,
}

pub fn density_bounds(
    inst: &FiniteInstance,
    p: &Predictor,
    w: &WeightFn,
    tau_cal: f64,
) -> Result<DensityReport> {
    require_deterministic(inst)?;
    inst.check_domain(p.len())?;
    let mu_w = measure_weighted(inst, p, w)?;
    let density = mu_w.density(inst)?;
    let cal = ece(inst, p)?.value;

    let mut weighted_quadratic = 0.0;
    let mut quadratic = 0.0;
    let mut e_min = 0.0;
    let mut maj_err = 0.0;
    for i in 0..inst.len() {
        let v = p.value(i);
        let g = inst.label(i);
        let wv = w.eval(v)?;
        weighted_quadratic += inst.weight(i) * wv * v * (1.0 - v);
        quadratic += inst.weight(i) * 2.0 * v * (1.0 - v);
        e_min += inst.weight(i) * v.min(1.0 - v);
        let majority = if v >= 0.5 { 1.0 } else { 0.0 };
        if majority != g {
            maj_err += inst.weight(i);
        }
    }
    let gap = (density - 2.0 * weighted_quadratic).abs();

    let density_ttv = match measure_ttv(inst, p) {
        Ok(mu) => mu.density(inst)?,
        Err(Error::MeasureIdenticallyZero) => 0.0,
        Err(e) => return Err(e),
    };
    let density_max = match measure_weighted(inst, p, &WeightFn::WMax) {
        Ok(mu) => mu.density(inst)?,
        Err(Error::MeasureIdenticallyZero) => 0.0,
        Err(e) => return Err(e),
    };

    let tol = 1e-9;
    Ok(DensityReport {
        density,
        weighted_quadratic_mean: weighted_quadratic,
        ece: cal,
        tau_cal,
        calibration_gap: gap,
        bound_a_ok: gap <= 2.0 * cal + tol,
        bound_a_ok_at_tau: gap <= 2.0 * tau_cal + tol,
        expected_min: e_min,
        majority_error: maj_err,
        bound_b_ok: e_min >= maj_err - cal - tol,
        density_ttv,
        quadratic_mean: quadratic,
        bound_c_ok: density_ttv >= quadratic - 2.0 * cal - tol,
        density_max,
        bound_d_ok: density_max >= 2.0 * e_min - 2.0 * cal - tol,
    })
}

/// Measured hardness of `g`: the smallest error achieved by any hypothesis in
/// the class, any threshold predictor `1{p >= psi}`, or the majority vote.
/// At desk scale this replaces the circuit-class hardness hypothesis with an
/// enumerated quantity.
pub fn measured_hardness(
    inst: &FiniteInstance,
    p: &Predictor,
    class: &HypothesisClass,
) -> Result<(f64, String)> {
    require_deterministic(inst)?;
    inst.check_domain(p.len())?;
    let mut best_err = f64::INFINITY;
    let mut witness = String::new();

    let mut consider = |err: f64, name: &str| {
        if err < best_err {
            best_err = err;
            witness = name.to_string();
        }
    };

    for h in class.iter() {
        inst.check_domain(h.values().len())?;
        let mut err = 0.0;
        for i in 0..inst.len() {
            let predicted = match class.kind() {
                HypothesisKind::Boolean01 => h.value(i),
                HypothesisKind::BooleanPM => (h.value(i) + 1.0) / 2.0,
                HypothesisKind::Bounded => {
                    return Err(Error::InvalidClassKind {
                        expected: "boolean",
                        found: "bounded",
                    })
                }
            };
            if predicted != inst.label(i) {
                err += inst.weight(i);
            }
        }
        consider(err, h.name());
    }

    // thresholds of p at every distinct value, both polarities, plus majority
    let mut cuts: Vec<f64> = p.level_sets().iter().map(|l| l.value).collect();
    cuts.push(0.5);
    for psi in cuts {
        let mut err_hi = 0.0;
        let mut err_lo = 0.0;
        for i in 0..inst.len() {
            let above = if p.value(i) >= psi { 1.0 } else { 0.0 };
            if above != inst.label(i) {
                err_hi += inst.weight(i);
            }
            if (1.0 - above) != inst.label(i) {
                err_lo += inst.weight(i);
            }
        }
        consider(err_hi, &format!("threshold(p>={psi})"));
        consider(err_lo, &format!("threshold(p<{psi})"));
    }

    Ok((best_err, witness))
}

/// End-to-end checks produced by [`ihcl_pipeline`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineChecks {
    /// `E[min(p, 1-p)]`, the measured stand-in for the hardness parameter.
    pub delta_measured: f64,
    /// Best enumerated error over class, thresholds, and majority.
    pub delta_enumerated: f64,
    pub density: f64,
    /// `dns(mu_max) >= 2 delta_measured - tau`.
    pub density_bound_ok: bool,
    pub advantage: f64,
    pub weighted_ma_error: f64,
    /// `advantage <= 1/2 + 3 eps' / (2 dns)` with the measured error.
    pub advantage_bound_ok: bool,
    /// Whether the measured weighted-MA error meets `eps * dns(mu_max)`,
    /// re-checked after the measure is built.
    pub ma_condition_ok: bool,
    pub ece: f64,
}

/// Outcome of the optimal-density pipeline. Targets that the class already
/// predicts well produce (near-)zero measures; that is reported as an explicit
/// no-hardness branch rather than an error.
#[derive(Debug)]
pub enum PipelineOutcome {
    NoHardness {
        predictor: Predictor,
        trace: LearnerTrace,
    },
    Hardcore {
        predictor: Predictor,
        measure: Measure,
        report: HardcoreReport,
        checks: PipelineChecks,
        trace: LearnerTrace,
    },
}

/// Runs calibrated multiaccuracy with the maximal weight function, builds the
/// maximal measure from the result, and audits density and hardness.
///
/// `eps` and `delta_target` fix the weighted-MA target `eps * delta_target`;
/// `tau` fixes the calibration target `tau / 4` and the slack in the density
/// assertion `dns >= 2 E[min(p, 1-p)] - tau`.
pub fn ihcl_pipeline(
    inst: &FiniteInstance,
    class: &HypothesisClass,
    eps: f64,
    delta_target: f64,
    tau: f64,
) -> Result<PipelineOutcome> {
    require_deterministic(inst)?;
    if [eps, delta_target, tau].iter().any(|v| v.is_nan() || *v <= 0.0) {
        return Err(Error::InvalidConfig {
            reason: "eps, delta_target, tau must be positive".into(),
        });
    }
    let ma_target = eps * delta_target;
    let config = LearnerConfig::new(ma_target)?.with_calibration_tau(tau / 4.0)?;
    let (p, trace) =
        learn_calibrated_multiaccurate(inst, class, &config, Some(&WeightFn::WMax))?;

    let mu = match measure_weighted(inst, &p, &WeightFn::WMax) {
        Ok(mu) => mu,
        Err(Error::MeasureIdenticallyZero) => {
            return Ok(PipelineOutcome::NoHardness {
                predictor: p,
                trace,
            })
        }
        Err(e) => return Err(e),
    };
    let density = mu.density(inst)?;
    if density <= 0.0 {
        return Ok(PipelineOutcome::NoHardness {
            predictor: p,
            trace,
        });
    }

    let class01 = class.to_boolean01()?;
    let report = hardcore_audit(inst, &mu, &class01)?;
    let wma = weighted_ma_error(inst, &p, &class01, &WeightFn::WMax)?.value;
    let cal = ece(inst, &p)?.value;
    let (delta_enumerated, _) = measured_hardness(inst, &p, &class01)?;

    let mut delta_measured = 0.0;
    for i in 0..inst.len() {
        delta_measured += inst.weight(i) * p.value(i).min(1.0 - p.value(i));
    }

    let tol = 1e-9;
    let checks = PipelineChecks {
        delta_measured,
        delta_enumerated,
        density,
        density_bound_ok: density >= 2.0 * delta_measured - tau - tol,
        advantage: report.advantage,
        weighted_ma_error: wma,
        advantage_bound_ok: report.advantage <= 0.5 + 1.5 * wma / density + tol,
        ma_condition_ok: wma <= eps * density + tol,
        ece: cal,
    };
    Ok(PipelineOutcome::Hardcore {
        predictor: p,
        measure: mu,
        report,
        checks,
        trace,
    })
}
