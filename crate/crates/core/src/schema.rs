//! The JSON instance file format.
//!
//! ```json
//! {
//!   "points": ["a", "b"],
//!   "weights": [0.5, 0.5],
//!   "labels": {"kind": "bayes", "values": [0.25, 0.75]},
//!   "class": {"kind": "pm1", "hypotheses": [{"name": "one", "values": [1, 1]}]},
//!   "predictor": {"values": [0.5, 0.5]},
//!   "measure": [1.0, 0.25]
//! }
//! ```
//!
//! `weights` may be omitted for the uniform distribution. Cube domains may
//! declare `"hypercube": n` instead of listing points, in which case
//! hypotheses may be given as truth-table strings over `{0,1}` in point
//! order (`"table": "0110..."`).

use serde::{Deserialize, Serialize};

use crate::cube;
use crate::error::Error;
use crate::hypothesis::{Hypothesis, HypothesisClass, HypothesisKind};
use crate::instance::{FiniteInstance, Labels};
use crate::predictor::Predictor;
use crate::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelsFile {
    pub kind: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisFile {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassFile {
    pub kind: String,
    pub hypotheses: Vec<HypothesisFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictorFile {
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypercube: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub labels: LabelsFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predictor: Option<PredictorFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<Vec<f64>>,
}

/// Everything a file can carry, validated into domain types.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub instance: FiniteInstance,
    pub class: Option<HypothesisClass>,
    pub predictor: Option<Predictor>,
    pub measure: Option<crate::hardcore::Measure>,
}

fn kind_from_str(kind: &str) -> Result<HypothesisKind> {
    match kind {
        "pm1" => Ok(HypothesisKind::BooleanPM),
        "boolean01" => Ok(HypothesisKind::Boolean01),
        "bounded" => Ok(HypothesisKind::Bounded),
        other => Err(Error::Schema {
            path: "class.kind".into(),
            reason: format!("unknown kind `{other}` (expected pm1 | boolean01 | bounded)"),
        }),
    }
}

fn table_to_values(table: &str, kind: HypothesisKind, path: &str) -> Result<Vec<f64>> {
    table
        .chars()
        .map(|ch| match (ch, kind) {
            ('0', HypothesisKind::Boolean01) => Ok(0.0),
            ('1', HypothesisKind::Boolean01) => Ok(1.0),
            ('0', HypothesisKind::BooleanPM) => Ok(-1.0),
            ('1', HypothesisKind::BooleanPM) => Ok(1.0),
            _ => Err(Error::Schema {
                path: path.to_string(),
                reason: format!("truth table character `{ch}` invalid for kind {kind:?}"),
            }),
        })
        .collect()
}

/// Parses and validates an instance file.
pub fn parse_instance(json: &str) -> Result<Loaded> {
    let file: InstanceFile = serde_json::from_str(json)?;

    let points = match (&file.points, file.hypercube) {
        (Some(points), None) => points.clone(),
        (None, Some(n)) => {
            if n == 0 || n > 20 {
                return Err(Error::Schema {
                    path: "hypercube".into(),
                    reason: format!("dimension {n} outside 1..=20"),
                });
            }
            cube::point_ids(n)
        }
        (Some(points), Some(n)) => {
            if cube::hypercube_dimension(points) != Some(n) {
                return Err(Error::Schema {
                    path: "points".into(),
                    reason: "explicit points disagree with the declared hypercube".into(),
                });
            }
            points.clone()
        }
        (None, None) => {
            return Err(Error::Schema {
                path: "points".into(),
                reason: "either points or hypercube must be given".into(),
            })
        }
    };

    if file.labels.values.len() != points.len() {
        return Err(Error::Schema {
            path: "labels.values".into(),
            reason: format!(
                "length {} does not match {} points",
                file.labels.values.len(),
                points.len()
            ),
        });
    }
    let labels = match file.labels.kind.as_str() {
        "bayes" => Labels::Bayes(file.labels.values.clone()),
        "deterministic" => Labels::Deterministic(file.labels.values.clone()),
        other => {
            return Err(Error::Schema {
                path: "labels.kind".into(),
                reason: format!("unknown kind `{other}` (expected bayes | deterministic)"),
            })
        }
    };

    let weights = match &file.weights {
        Some(w) => {
            if w.len() != points.len() {
                return Err(Error::Schema {
                    path: "weights".into(),
                    reason: format!("length {} does not match {} points", w.len(), points.len()),
                });
            }
            w.clone()
        }
        None => vec![1.0 / points.len() as f64; points.len()],
    };
    let instance = FiniteInstance::new(points, weights, labels)?;

    let class = match &file.class {
        Some(cf) => {
            let kind = kind_from_str(&cf.kind)?;
            let mut hs = Vec::with_capacity(cf.hypotheses.len());
            for (i, hf) in cf.hypotheses.iter().enumerate() {
                let path = format!("class.hypotheses[{i}]");
                let values = match (&hf.values, &hf.table) {
                    (Some(v), None) => v.clone(),
                    (None, Some(t)) => table_to_values(t, kind, &path)?,
                    _ => {
                        return Err(Error::Schema {
                            path,
                            reason: "exactly one of values or table must be given".into(),
                        })
                    }
                };
                if values.len() != instance.len() {
                    return Err(Error::Schema {
                        path,
                        reason: format!(
                            "length {} does not match {} points",
                            values.len(),
                            instance.len()
                        ),
                    });
                }
                hs.push(Hypothesis::new(hf.name.clone(), kind, values)?);
            }
            Some(HypothesisClass::new(hs)?)
        }
        None => None,
    };

    let predictor = match &file.predictor {
        Some(pf) => {
            if pf.values.len() != instance.len() {
                return Err(Error::Schema {
                    path: "predictor.values".into(),
                    reason: format!(
                        "length {} does not match {} points",
                        pf.values.len(),
                        instance.len()
                    ),
                });
            }
            Some(match pf.grid {
                Some(grid) => Predictor::with_grid(pf.values.clone(), grid)?,
                None => Predictor::new(pf.values.clone())?,
            })
        }
        None => None,
    };

    let measure = match &file.measure {
        Some(values) => {
            if values.len() != instance.len() {
                return Err(Error::Schema {
                    path: "measure".into(),
                    reason: format!(
                        "length {} does not match {} points",
                        values.len(),
                        instance.len()
                    ),
                });
            }
            Some(crate::hardcore::Measure::new(values.clone())?)
        }
        None => None,
    };

    Ok(Loaded {
        instance,
        class,
        predictor,
        measure,
    })
}

/// Serializes domain objects back into the file schema.
pub fn to_instance_file(
    inst: &FiniteInstance,
    class: Option<&HypothesisClass>,
    predictor: Option<&Predictor>,
    measure: Option<&crate::hardcore::Measure>,
) -> InstanceFile {
    let hypercube = cube::hypercube_dimension(inst.points());
    InstanceFile {
        points: if hypercube.is_some() {
            None
        } else {
            Some(inst.points().to_vec())
        },
        hypercube,
        weights: Some(inst.weights().to_vec()),
        labels: LabelsFile {
            kind: if inst.is_deterministic() {
                "deterministic".into()
            } else {
                "bayes".into()
            },
            values: inst.labels().values().to_vec(),
        },
        class: class.map(|c| ClassFile {
            kind: c.kind().name().to_string(),
            hypotheses: c
                .iter()
                .map(|h| HypothesisFile {
                    name: h.name().to_string(),
                    values: Some(h.values().to_vec()),
                    table: None,
                })
                .collect(),
        }),
        predictor: predictor.map(|p| PredictorFile {
            values: p.values().to_vec(),
            grid: p.grid(),
        }),
        measure: measure.map(|m| m.values().to_vec()),
    }
}
