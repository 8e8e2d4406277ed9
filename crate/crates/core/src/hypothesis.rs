//! Hypotheses and finite hypothesis classes.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Value range of a hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HypothesisKind {
    /// Real-valued in `[-1,1]`.
    Bounded,
    /// Exactly `{0,1}`-valued, read as set membership.
    Boolean01,
    /// Exactly `{-1,+1}`-valued.
    BooleanPM,
}

impl HypothesisKind {
    pub fn name(&self) -> &'static str {
        match self {
            HypothesisKind::Bounded => "bounded",
            HypothesisKind::Boolean01 => "boolean01",
            HypothesisKind::BooleanPM => "pm1",
        }
    }
}

/// A single hypothesis: a named per-point value table.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    name: String,
    kind: HypothesisKind,
    values: Vec<f64>,
}

impl Hypothesis {
    pub fn new(name: impl Into<String>, kind: HypothesisKind, values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            let ok = match kind {
                HypothesisKind::Bounded => (-1.0..=1.0).contains(&v),
                HypothesisKind::Boolean01 => v == 0.0 || v == 1.0,
                HypothesisKind::BooleanPM => v == -1.0 || v == 1.0,
            };
            if !ok {
                return Err(Error::OutOfRange {
                    field: "hypothesis",
                    value: v,
                    range: match kind {
                        HypothesisKind::Bounded => "[-1,1]",
                        HypothesisKind::Boolean01 => "{0,1}",
                        HypothesisKind::BooleanPM => "{-1,1}",
                    },
                });
            }
        }
        Ok(Self {
            name: name.into(),
            kind,
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> HypothesisKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// `2c - 1`, the `{-1,1}` version of a `{0,1}` hypothesis.
    pub fn to_pm1(&self) -> Result<Hypothesis> {
        match self.kind {
            HypothesisKind::Boolean01 => Hypothesis::new(
                format!("{}~pm1", self.name),
                HypothesisKind::BooleanPM,
                self.values.iter().map(|&v| 2.0 * v - 1.0).collect(),
            ),
            _ => Err(Error::InvalidClassKind {
                expected: "boolean01",
                found: self.kind.name(),
            }),
        }
    }
}

/// A finite set of hypotheses over one domain, all of the same kind.
///
/// The closure flags are not taken on trust: they are recomputed by scanning
/// the class for exact value-table matches whenever a class is built.
#[derive(Debug, Clone)]
pub struct HypothesisClass {
    kind: HypothesisKind,
    hypotheses: Vec<Hypothesis>,
    contains_constant_one: bool,
    negation_closed: bool,
}

impl HypothesisClass {
    pub fn new(hypotheses: Vec<Hypothesis>) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::EmptyClass);
        }
        let kind = hypotheses[0].kind;
        let len = hypotheses[0].values.len();
        if hypotheses
            .iter()
            .any(|h| h.kind != kind || h.values.len() != len)
        {
            return Err(Error::MixedClass);
        }

        let contains_constant_one = hypotheses.iter().any(|h| h.values.iter().all(|&v| v == 1.0));
        let negation_closed = hypotheses.iter().all(|h| {
            hypotheses.iter().any(|other| {
                h.values.iter().zip(&other.values).all(|(&a, &b)| match kind {
                    // complement for set-indicator classes, negation otherwise
                    HypothesisKind::Boolean01 => b == 1.0 - a,
                    _ => b == -a,
                })
            })
        });

        Ok(Self {
            kind,
            hypotheses,
            contains_constant_one,
            negation_closed,
        })
    }

    pub fn kind(&self) -> HypothesisKind {
        self.kind
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn get(&self, i: usize) -> &Hypothesis {
        &self.hypotheses[i]
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Hypothesis> {
        self.hypotheses.iter()
    }

    pub fn contains_constant_one(&self) -> bool {
        self.contains_constant_one
    }

    pub fn negation_closed(&self) -> bool {
        self.negation_closed
    }

    pub fn domain_len(&self) -> usize {
        self.hypotheses[0].values.len()
    }

    /// Reinterprets a `{-1,1}` class as set indicators via `c -> (c+1)/2`.
    /// Negation closure of the original becomes complement closure.
    pub fn to_boolean01(&self) -> Result<HypothesisClass> {
        match self.kind {
            HypothesisKind::Boolean01 => Ok(self.clone()),
            HypothesisKind::BooleanPM => {
                let hs = self
                    .hypotheses
                    .iter()
                    .map(|h| {
                        Hypothesis::new(
                            format!("{}~01", h.name),
                            HypothesisKind::Boolean01,
                            h.values.iter().map(|&v| (v + 1.0) / 2.0).collect(),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                HypothesisClass::new(hs)
            }
            HypothesisKind::Bounded => Err(Error::InvalidClassKind {
                expected: "boolean",
                found: "bounded",
            }),
        }
    }
}
