//! Generators for the named counterexample instances and for seeded random
//! instance families used in corpus sweeps.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cube;
use crate::error::Error;
use crate::hypothesis::{Hypothesis, HypothesisClass, HypothesisKind};
use crate::instance::{FiniteInstance, Labels};
use crate::predictor::Predictor;
use crate::Result;

/// Maximum cube dimension for enumerated instances.
const MAX_CUBE_DIM: u32 = 16;

/// Configuration of the majority counterexample: an anti-calibrated,
/// perfectly multiaccurate predictor whose post-processings all have zero
/// correlation with the labels.
#[derive(Debug, Clone, Copy)]
pub struct MajConfig {
    /// Cube dimension, at least 3.
    pub n: u32,
    /// Distinct 1-based indices among the first `n - 1` coordinates.
    pub i: u32,
    pub j: u32,
}

impl MajConfig {
    pub fn new(n: u32, i: u32, j: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidConfig {
                reason: format!("need n >= 3, got {n}"),
            });
        }
        if n > MAX_CUBE_DIM {
            return Err(Error::DomainTooLarge {
                n,
                max: MAX_CUBE_DIM,
            });
        }
        if i == j || i == 0 || j == 0 || i >= n || j >= n {
            return Err(Error::InvalidConfig {
                reason: format!("need distinct i, j in 1..={}, got i={i}, j={j}", n - 1),
            });
        }
        Ok(MajConfig { n, i, j })
    }
}

fn majority(a: f64, b: f64, c: f64) -> f64 {
    if a + b + c > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Builds the majority instance: uniform labels `MAJ(x_i, x_j, x_n)`, the
/// predictor `MAJ(x_i, x_j, -x_n)`, and the full parity basis of the first
/// `n - 1` coordinates.
///
/// Multiaccuracy is linear in the hypothesis, so vanishing on this spanning
/// basis is equivalent to vanishing on every bounded function of the first
/// `n - 1` coordinates; the basis keeps the audit polynomial in `2^n`.
pub fn build_maj_instance(
    cfg: &MajConfig,
) -> Result<(FiniteInstance, Predictor, HypothesisClass)> {
    let n = cfg.n;
    let size = 1u64 << n;
    let ids = cube::point_ids(n);

    let mut labels = Vec::with_capacity(size as usize);
    let mut predictor = Vec::with_capacity(size as usize);
    for idx in 0..size {
        let xi = cube::coord_value(idx, cfg.i, n);
        let xj = cube::coord_value(idx, cfg.j, n);
        let xn = cube::coord_value(idx, n, n);
        labels.push(majority(xi, xj, xn));
        predictor.push(majority(xi, xj, -xn));
    }

    let inst = FiniteInstance::uniform(ids, Labels::Bayes(labels))?;
    let p = Predictor::new(predictor)?;

    let mut hypotheses = Vec::with_capacity(1 << (n - 1));
    for subset in 0..1u64 << (n - 1) {
        // subset bit t selects coordinate t + 1; only the first n-1 appear
        let coords: Vec<u32> = (0..n - 1).filter(|t| subset >> t & 1 == 1).map(|t| t + 1).collect();
        let mask = cube::subset_mask(&coords, n);
        let values = (0..size).map(|i| cube::parity_value(i, mask)).collect();
        hypotheses.push(Hypothesis::new(
            cube::parity_name(mask, n),
            HypothesisKind::BooleanPM,
            values,
        )?);
    }
    let class = HypothesisClass::new(hypotheses)?;
    Ok((inst, p, class))
}

/// Configuration of the two-level density showcase: a perfectly calibrated
/// predictor over four regions whose measure densities have closed forms.
#[derive(Debug, Clone, Copy)]
pub struct ShowcaseConfig {
    pub eta: f64,
    pub delta: f64,
    /// Number of equal-mass points each region is expanded into.
    pub points_per_region: usize,
}

impl ShowcaseConfig {
    pub fn new(eta: f64, delta: f64) -> Result<Self> {
        if eta.is_nan() || eta <= 0.0 || eta >= 0.5 {
            return Err(Error::InvalidConfig {
                reason: format!("eta must lie in (0, 1/2), got {eta}"),
            });
        }
        if delta.is_nan() || delta <= 0.0 || delta >= 0.5 {
            return Err(Error::InvalidConfig {
                reason: format!("delta must lie in (0, 1/2), got {delta}"),
            });
        }
        Ok(ShowcaseConfig {
            eta,
            delta,
            points_per_region: 1,
        })
    }

    pub fn with_points_per_region(mut self, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidConfig {
                reason: "points_per_region must be at least 1".into(),
            });
        }
        self.points_per_region = count;
        Ok(self)
    }

    /// Closed form for the density of the minimal measure:
    /// `delta + 2 eta (1 - eta) (1 - 2 delta)`.
    pub fn density_ttv(&self) -> f64 {
        self.delta + 2.0 * self.eta * (1.0 - self.eta) * (1.0 - 2.0 * self.delta)
    }

    /// Closed form for the density of the maximal measure:
    /// `2 delta + 2 eta (1 - 2 delta)`.
    pub fn density_max(&self) -> f64 {
        2.0 * self.delta + 2.0 * self.eta * (1.0 - 2.0 * self.delta)
    }
}

/// Builds the showcase instance with regions
/// `(p, g, mass) = (1/2, 1, delta), (1/2, 0, delta),
/// (eta, 0, (1-eta)(1-2delta)), (eta, 1, eta(1-2delta))`.
/// The predictor is perfectly calibrated by construction.
pub fn build_showcase(cfg: &ShowcaseConfig) -> Result<(FiniteInstance, Predictor)> {
    let regions: [(f64, f64, f64, &str); 4] = [
        (0.5, 1.0, cfg.delta, "s12_g1"),
        (0.5, 0.0, cfg.delta, "s12_g0"),
        (
            cfg.eta,
            0.0,
            (1.0 - cfg.eta) * (1.0 - 2.0 * cfg.delta),
            "seta_g0",
        ),
        (cfg.eta, 1.0, cfg.eta * (1.0 - 2.0 * cfg.delta), "seta_g1"),
    ];
    for (_, _, mass, name) in &regions {
        if mass.is_nan() || *mass <= 0.0 {
            return Err(Error::InvalidConfig {
                reason: format!("region {name} has non-positive mass {mass}"),
            });
        }
    }
    let mut ids = Vec::new();
    let mut weights = Vec::new();
    let mut labels = Vec::new();
    let mut predictor = Vec::new();
    for (p, g, mass, name) in regions {
        for k in 0..cfg.points_per_region {
            ids.push(format!("{name}_{k}"));
            weights.push(mass / cfg.points_per_region as f64);
            labels.push(g);
            predictor.push(p);
        }
    }
    let inst = FiniteInstance::new(ids, weights, Labels::Deterministic(labels))?;
    let p = Predictor::new(predictor)?;
    Ok((inst, p))
}

/// Hypothesis families for random instances.
#[derive(Debug, Clone)]
pub enum ClassSpec {
    /// All `2^n` parities over the `n`-cube, as `{-1,1}` hypotheses.
    Parities { n: u32 },
    /// Constant one plus the `n` single-coordinate parities.
    Dictators { n: u32 },
    /// Indicator juntas: for `subsets` random `k`-coordinate sets, all `2^k`
    /// assignment indicators, their complements, and the constants.
    Juntas { k: u32, n: u32, subsets: usize },
    /// `m` random `{0,1}` tables, their complements, and the constants.
    RandomBoolean { m: usize },
}

/// Label generators for random instances.
#[derive(Debug, Clone)]
pub enum LabelMode {
    /// Conditional expectations drawn uniformly from `[0,1]`.
    BayesUniform,
    /// A fair random Boolean target.
    DeterministicRandom,
    /// Labels copied from class member `index` (as a `{0,1}` function), each
    /// point flipped independently with probability `noise`.
    Planted { index: usize, noise: f64 },
}

fn cube_points_checked(n: u32, n_points: usize) -> Result<Vec<String>> {
    if n > MAX_CUBE_DIM {
        return Err(Error::DomainTooLarge {
            n,
            max: MAX_CUBE_DIM,
        });
    }
    let size = 1usize << n;
    if n_points != size {
        return Err(Error::InvalidConfig {
            reason: format!("cube spec needs n_points = 2^{n} = {size}, got {n_points}"),
        });
    }
    Ok(cube::point_ids(n))
}

fn build_class(spec: &ClassSpec, n_points: usize, rng: &mut ChaCha8Rng) -> Result<HypothesisClass> {
    match spec {
        ClassSpec::Parities { n } => {
            cube_points_checked(*n, n_points)?;
            let mut hs = Vec::with_capacity(1 << n);
            for mask in 0..1u64 << n {
                let values = (0..n_points as u64)
                    .map(|i| cube::parity_value(i, mask))
                    .collect();
                hs.push(Hypothesis::new(
                    cube::parity_name(mask, *n),
                    HypothesisKind::BooleanPM,
                    values,
                )?);
            }
            HypothesisClass::new(hs)
        }
        ClassSpec::Dictators { n } => {
            cube_points_checked(*n, n_points)?;
            let mut hs = vec![Hypothesis::new(
                "one",
                HypothesisKind::BooleanPM,
                vec![1.0; n_points],
            )?];
            for j in 1..=*n {
                let mask = cube::subset_mask(&[j], *n);
                let values = (0..n_points as u64)
                    .map(|i| cube::parity_value(i, mask))
                    .collect();
                hs.push(Hypothesis::new(
                    format!("x{j}"),
                    HypothesisKind::BooleanPM,
                    values,
                )?);
            }
            HypothesisClass::new(hs)
        }
        ClassSpec::Juntas { k, n, subsets } => {
            cube_points_checked(*n, n_points)?;
            if *k == 0 || k > n {
                return Err(Error::InvalidConfig {
                    reason: format!("junta arity must lie in 1..={n}, got {k}"),
                });
            }
            let mut hs = vec![
                Hypothesis::new("zero", HypothesisKind::Boolean01, vec![0.0; n_points])?,
                Hypothesis::new("one", HypothesisKind::Boolean01, vec![1.0; n_points])?,
            ];
            for s in 0..*subsets {
                // draw k distinct coordinates
                let mut coords: Vec<u32> = (1..=*n).collect();
                for pos in 0..*k as usize {
                    let swap = rng.gen_range(pos..coords.len());
                    coords.swap(pos, swap);
                }
                let mut coords: Vec<u32> = coords[..*k as usize].to_vec();
                coords.sort_unstable();
                for assignment in 0..1u64 << k {
                    let values: Vec<f64> = (0..n_points as u64)
                        .map(|i| {
                            let hit = coords.iter().enumerate().all(|(b, &j)| {
                                let want = assignment >> b & 1 == 1;
                                let is = cube::coord_value(i, j, *n) < 0.0;
                                want == is
                            });
                            if hit {
                                1.0
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    let complement: Vec<f64> = values.iter().map(|&v| 1.0 - v).collect();
                    let tag: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
                    let base = format!("j{s}[{}]={assignment}", tag.join(","));
                    hs.push(Hypothesis::new(
                        base.clone(),
                        HypothesisKind::Boolean01,
                        values,
                    )?);
                    hs.push(Hypothesis::new(
                        format!("not-{base}"),
                        HypothesisKind::Boolean01,
                        complement,
                    )?);
                }
            }
            HypothesisClass::new(hs)
        }
        ClassSpec::RandomBoolean { m } => {
            let mut hs = vec![
                Hypothesis::new("zero", HypothesisKind::Boolean01, vec![0.0; n_points])?,
                Hypothesis::new("one", HypothesisKind::Boolean01, vec![1.0; n_points])?,
            ];
            for r in 0..*m {
                let values: Vec<f64> = (0..n_points)
                    .map(|_| if rng.gen::<bool>() { 1.0 } else { 0.0 })
                    .collect();
                let complement: Vec<f64> = values.iter().map(|&v| 1.0 - v).collect();
                hs.push(Hypothesis::new(
                    format!("r{r}"),
                    HypothesisKind::Boolean01,
                    values,
                )?);
                hs.push(Hypothesis::new(
                    format!("not-r{r}"),
                    HypothesisKind::Boolean01,
                    complement,
                )?);
            }
            HypothesisClass::new(hs)
        }
    }
}

/// Seeded, reproducible random instance. The same seed yields bit-identical
/// instances; randomness is consumed in a fixed order (class, labels,
/// weights).
pub fn random_instance(
    seed: u64,
    n_points: usize,
    class_spec: &ClassSpec,
    label_mode: &LabelMode,
) -> Result<(FiniteInstance, HypothesisClass)> {
    if n_points < 2 {
        return Err(Error::InvalidConfig {
            reason: format!("need at least 2 points, got {n_points}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let class = build_class(class_spec, n_points, &mut rng)?;

    let labels = match label_mode {
        LabelMode::BayesUniform => {
            Labels::Bayes((0..n_points).map(|_| rng.gen::<f64>()).collect())
        }
        LabelMode::DeterministicRandom => Labels::Deterministic(
            (0..n_points)
                .map(|_| if rng.gen::<bool>() { 1.0 } else { 0.0 })
                .collect(),
        ),
        LabelMode::Planted { index, noise } => {
            if *index >= class.len() {
                return Err(Error::InvalidConfig {
                    reason: format!(
                        "planted index {index} outside class of size {}",
                        class.len()
                    ),
                });
            }
            if !(0.0..=1.0).contains(noise) {
                return Err(Error::InvalidConfig {
                    reason: format!("noise must lie in [0,1], got {noise}"),
                });
            }
            let h = class.get(*index);
            let values = h
                .values()
                .iter()
                .map(|&v| {
                    let bit = match class.kind() {
                        HypothesisKind::Boolean01 => v,
                        HypothesisKind::BooleanPM => (v + 1.0) / 2.0,
                        HypothesisKind::Bounded => v.round().clamp(0.0, 1.0),
                    };
                    if *noise > 0.0 && rng.gen::<f64>() < *noise {
                        1.0 - bit
                    } else {
                        bit
                    }
                })
                .collect();
            Labels::Deterministic(values)
        }
    };

    let is_cube = matches!(
        class_spec,
        ClassSpec::Parities { .. } | ClassSpec::Dictators { .. } | ClassSpec::Juntas { .. }
    );
    let inst = if is_cube {
        FiniteInstance::uniform(
            cube::point_ids(n_points.trailing_zeros()),
            labels,
        )?
    } else {
        let raw: Vec<f64> = (0..n_points).map(|_| rng.gen_range(0.5..1.5)).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|&u| u / total).collect();
        FiniteInstance::new(
            (0..n_points).map(|i| format!("p{i}")).collect(),
            weights,
            labels,
        )?
    };
    Ok((inst, class))
}
