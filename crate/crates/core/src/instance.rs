//! Weighted finite domains with ground-truth labels.
//!
//! A [`FiniteInstance`] is a fully enumerated distribution over labelled points:
//! every metric in this crate is an exact weighted sum over it, never a sample
//! estimate. Labels come in two flavours that share one code path: `Bayes`
//! stores the conditional expectation of the binary label at each point, and
//! `Deterministic` stores a Boolean target (the special case where every
//! conditional expectation is 0 or 1 exactly).

use std::collections::HashMap;

use crate::error::Error;
use crate::Result;

/// Ground-truth labels, one value per domain point.
#[derive(Debug, Clone, PartialEq)]
pub enum Labels {
    /// Conditional expectations of the label, each in `[0,1]`.
    Bayes(Vec<f64>),
    /// A Boolean target; values are exactly 0 or 1.
    Deterministic(Vec<f64>),
}

impl Labels {
    pub fn values(&self) -> &[f64] {
        match self {
            Labels::Bayes(v) | Labels::Deterministic(v) => v,
        }
    }

    pub fn len(&self) -> usize {
        self.values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.values().is_empty()
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Labels::Deterministic(_))
    }
}

/// A finite weighted domain together with its labels.
#[derive(Debug, Clone)]
pub struct FiniteInstance {
    points: Vec<String>,
    weights: Vec<f64>,
    labels: Labels,
    index: HashMap<String, usize>,
}

/// Tolerance on the total probability mass.
const WEIGHT_SUM_TOL: f64 = 1e-12;

impl FiniteInstance {
    /// Builds an instance, validating all type invariants: unique points,
    /// nonnegative weights summing to 1 within `1e-12`, labels in range.
    pub fn new(points: Vec<String>, weights: Vec<f64>, labels: Labels) -> Result<Self> {
        if points.len() != weights.len() || points.len() != labels.len() {
            return Err(Error::Schema {
                path: "instance".into(),
                reason: format!(
                    "points/weights/labels lengths disagree: {}/{}/{}",
                    points.len(),
                    weights.len(),
                    labels.len()
                ),
            });
        }
        if points.is_empty() {
            return Err(Error::Schema {
                path: "instance.points".into(),
                reason: "domain is empty".into(),
            });
        }
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::DuplicatePoint { point: p.clone() });
            }
        }
        for (p, &w) in points.iter().zip(&weights) {
            if w.is_nan() || w < 0.0 {
                return Err(Error::NegativeWeight {
                    point: p.clone(),
                    value: w,
                });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSum { sum });
        }
        match &labels {
            Labels::Bayes(vals) => {
                for &v in vals {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::OutOfRange {
                            field: "labels",
                            value: v,
                            range: "[0,1]",
                        });
                    }
                }
            }
            Labels::Deterministic(vals) => {
                for &v in vals {
                    if v != 0.0 && v != 1.0 {
                        return Err(Error::OutOfRange {
                            field: "labels",
                            value: v,
                            range: "{0,1}",
                        });
                    }
                }
            }
        }
        Ok(Self {
            points,
            weights,
            labels,
            index,
        })
    }

    /// Uniform distribution over the given points.
    pub fn uniform(points: Vec<String>, labels: Labels) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::Schema {
                path: "instance.points".into(),
                reason: "domain is empty".into(),
            });
        }
        let w = 1.0 / n as f64;
        FiniteInstance::new(points, vec![w; n], labels)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn is_deterministic(&self) -> bool {
        self.labels.is_deterministic()
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// The label value at point `i`: `p*(x)` for Bayes labels, `g(x)` for
    /// deterministic ones.
    pub fn label(&self, i: usize) -> f64 {
        self.labels.values()[i]
    }

    pub fn point_index(&self, point: &str) -> Result<usize> {
        self.index
            .get(point)
            .copied()
            .ok_or_else(|| Error::UnknownPoint {
                point: point.to_string(),
            })
    }

    /// Checks that a per-point table covers this domain, naming the first
    /// uncovered point otherwise.
    pub fn check_domain(&self, table_len: usize) -> Result<()> {
        if table_len < self.len() {
            return Err(Error::DomainMismatch {
                point: self.points[table_len].clone(),
            });
        }
        if table_len > self.len() {
            return Err(Error::DomainMismatch {
                point: format!("<extra value at index {}>", self.len()),
            });
        }
        Ok(())
    }

    /// `E[y]`, the overall label mean.
    pub fn mean_label(&self) -> f64 {
        self.weights
            .iter()
            .zip(self.labels.values())
            .map(|(w, y)| w * y)
            .sum()
    }

    /// Expectation of a per-point function under the domain distribution.
    pub fn expect(&self, values: &[f64]) -> Result<f64> {
        self.check_domain(values.len())?;
        Ok(self
            .weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .sum())
    }

    /// Exact squared loss `E[(y - v(x))^2]` of a per-point table against the
    /// labels. For Bayes labels this expands the inner expectation over the
    /// label coin: `E[(y - v)^2 | x] = p*(x)(1 - 2v(x)) + v(x)^2`.
    pub fn squared_loss(&self, values: &[f64]) -> Result<f64> {
        self.check_domain(values.len())?;
        let mut total = 0.0;
        for (i, &v) in values.iter().enumerate() {
            let y = self.label(i);
            total += self.weight(i) * (y * (1.0 - 2.0 * v) + v * v);
        }
        Ok(total)
    }

    /// Replaces the weights, renormalizing; used by measure reweighting.
    pub(crate) fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        FiniteInstance::new(self.points.clone(), weights, self.labels.clone())
    }
}
