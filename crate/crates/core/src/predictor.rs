//! Predictors: per-point probability estimates in `[0,1]`.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::Result;

/// A map from domain points to `[0,1]`, optionally constrained to a
/// discretization grid.
///
/// When `grid` is present every value is an integer multiple of the step
/// (within `1e-12`); learners emit grid-snapped predictors so that level sets
/// stay stable under serialization round trips.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictor {
    values: Vec<f64>,
    grid: Option<f64>,
}

/// One level set `S_v = {x : p(x) = v}`, with points listed by domain index.
#[derive(Debug, Clone)]
pub struct LevelSet {
    pub value: f64,
    pub points: Vec<usize>,
}

impl Predictor {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    field: "predictor",
                    value: v,
                    range: "[0,1]",
                });
            }
        }
        Ok(Self { values, grid: None })
    }

    pub fn with_grid(values: Vec<f64>, grid: f64) -> Result<Self> {
        if !(grid > 0.0 && grid <= 1.0) {
            return Err(Error::OutOfRange {
                field: "grid",
                value: grid,
                range: "(0,1]",
            });
        }
        let mut p = Predictor::new(values)?;
        for &v in &p.values {
            let snapped = (v / grid).round() * grid;
            if (v - snapped).abs() > 1e-12 {
                return Err(Error::GridViolation { value: v, grid });
            }
        }
        p.grid = Some(grid);
        Ok(p)
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Predictor::new(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn grid(&self) -> Option<f64> {
        self.grid
    }

    /// The `[-1,1]` view `2p - 1`.
    pub fn pm1(&self) -> Vec<f64> {
        self.values.iter().map(|&v| 2.0 * v - 1.0).collect()
    }

    /// Groups points into level sets keyed by the exact bit pattern of the
    /// value. Returned in increasing value order (bit order coincides with
    /// numeric order on nonnegative doubles), so iteration is deterministic.
    pub fn level_sets(&self) -> Vec<LevelSet> {
        let mut map: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (i, &v) in self.values.iter().enumerate() {
            map.entry(v.to_bits()).or_default().push(i);
        }
        map.into_iter()
            .map(|(bits, points)| LevelSet {
                value: f64::from_bits(bits),
                points,
            })
            .collect()
    }
}
