//! Boolean Fourier analysis over the cube, and the query-access
//! heavy-coefficient search.
//!
//! Coefficients follow the conventions of [`crate::cube`]: the coefficient at
//! subset mask `S` is `E[f(x) chi_S(x)]` under the uniform distribution.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cube;
use crate::error::Error;
use crate::hypothesis::{Hypothesis, HypothesisKind};
use crate::instance::FiniteInstance;
use crate::metrics::{correlation, LabelSampler};
use crate::predictor::Predictor;
use crate::Result;

/// Largest dimension for a fully materialized spectrum.
const MAX_SPECTRUM_DIM: u32 = 20;
/// Largest dimension for the query-access search.
const MAX_GL_DIM: u32 = 24;

/// The complete Fourier spectrum of a function on the `n`-cube.
#[derive(Debug, Clone)]
pub struct FourierSpectrum {
    n: u32,
    coeffs: Vec<f64>,
}

impl FourierSpectrum {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Coefficient at a subset bitmask.
    pub fn coefficient(&self, mask: u64) -> f64 {
        self.coeffs[mask as usize]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Masks of all coefficients with `|coef| >= threshold`, ascending.
    pub fn heavy(&self, threshold: f64) -> Vec<u64> {
        (0..self.coeffs.len() as u64)
            .filter(|&m| self.coeffs[m as usize].abs() >= threshold)
            .collect()
    }

    /// Total Fourier weight `sum_S coef(S)^2`; equals `E[f^2]`.
    pub fn total_weight(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Reconstructs the point-value table (inverse transform).
    pub fn inverse(&self) -> Vec<f64> {
        let mut data = self.coeffs.clone();
        walsh_hadamard(&mut data);
        data
    }
}

/// In-place unnormalized Walsh-Hadamard butterfly:
/// `out[m] = sum_i in[i] (-1)^popcount(i & m)`.
fn walsh_hadamard(data: &mut [f64]) {
    let n = data.len();
    let mut span = 1;
    while span < n {
        let mut block = 0;
        while block < n {
            for i in block..block + span {
                let a = data[i];
                let b = data[i + span];
                data[i] = a + b;
                data[i + span] = a - b;
            }
            block += 2 * span;
        }
        span *= 2;
    }
}

/// Exact spectrum of a per-point table on the `n`-cube (`len = 2^n`),
/// computed by the `O(n 2^n)` butterfly.
pub fn full_spectrum(values: &[f64]) -> Result<FourierSpectrum> {
    let len = values.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidConfig {
            reason: format!("spectrum input length {len} is not a power of two"),
        });
    }
    let n = len.trailing_zeros();
    if n > MAX_SPECTRUM_DIM {
        return Err(Error::DomainTooLarge {
            n,
            max: MAX_SPECTRUM_DIM,
        });
    }
    let mut coeffs = values.to_vec();
    walsh_hadamard(&mut coeffs);
    let scale = 1.0 / len as f64;
    for c in &mut coeffs {
        *c *= scale;
    }
    Ok(FourierSpectrum { n, coeffs })
}

/// Parameters of the heavy-coefficient search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlConfig {
    /// Heaviness threshold: every `|coef| >= gamma` must be found, nothing
    /// below `gamma / 2` may be returned.
    pub gamma: f64,
    /// Overall failure probability budget for the estimate union bound.
    pub delta_fail: f64,
    /// Override for the per-estimate sample count; `None` derives it from
    /// `(gamma, delta_fail)` by a Hoeffding bound.
    pub samples_per_estimate: Option<usize>,
    /// Cap on total queries; exceeding it flags the result incomplete.
    pub query_budget: Option<u64>,
    pub seed: u64,
    /// Compute bucket weights exactly from the full spectrum instead of
    /// sampling (costs `2^n` queries up front; n <= 12). Separates search
    /// logic from estimation noise.
    pub exact_mode: bool,
}

impl GlConfig {
    pub fn new(gamma: f64, delta_fail: f64, seed: u64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidConfig {
                reason: format!("gamma must lie in (0,1], got {gamma}"),
            });
        }
        if !(delta_fail > 0.0 && delta_fail < 1.0) {
            return Err(Error::InvalidConfig {
                reason: format!("delta_fail must lie in (0,1), got {delta_fail}"),
            });
        }
        Ok(GlConfig {
            gamma,
            delta_fail,
            samples_per_estimate: None,
            query_budget: None,
            seed,
            exact_mode: false,
        })
    }

    pub fn exact(mut self) -> Self {
        self.exact_mode = true;
        self
    }
}

/// Outcome of the heavy-coefficient search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlResult {
    /// Subset masks surviving the final coefficient filter, ascending.
    pub subsets: Vec<u64>,
    /// Estimated coefficient per surviving subset.
    pub estimates: Vec<f64>,
    /// False when the query budget ran out before the search finished.
    pub complete: bool,
    /// False positives are pruned by capping survivors at `4 / gamma^2`
    /// per level; true when the cap ever fired.
    pub list_capped: bool,
    pub queries_used: u64,
    /// Per-estimate sample sizes actually used (weight buckets, coefficients).
    pub samples_weight: usize,
    pub samples_coeff: usize,
}

struct GlRun<F: FnMut(u64) -> f64> {
    query: F,
    n: u32,
    rng: ChaCha8Rng,
    queries_used: u64,
    budget: Option<u64>,
}

impl<F: FnMut(u64) -> f64> GlRun<F> {
    fn ask(&mut self, point: u64) -> Option<f64> {
        if let Some(b) = self.budget {
            if self.queries_used >= b {
                return None;
            }
        }
        self.queries_used += 1;
        Some((self.query)(point))
    }

    /// Estimates the Fourier weight of the bucket `(k, prefix)`: all subsets
    /// agreeing with `prefix` on the first `k` coordinates. Uses the paired
    /// estimator `f(x z) chi(x) f(x' z) chi(x')` with independent prefixes.
    fn bucket_weight(&mut self, k: u32, prefix: u64, samples: usize) -> Option<f64> {
        let suffix_bits = self.n - k;
        let mut acc = 0.0;
        for _ in 0..samples {
            let z: u64 = self.rng.gen::<u64>() & ((1u64 << suffix_bits) - 1);
            let (x1, x2) = if k == 0 {
                (0u64, 0u64)
            } else {
                let m = (1u64 << k) - 1;
                (self.rng.gen::<u64>() & m, self.rng.gen::<u64>() & m)
            };
            let p1 = (x1 << suffix_bits) | z;
            let p2 = (x2 << suffix_bits) | z;
            let f1 = self.ask(p1)?;
            let f2 = self.ask(p2)?;
            let chi1 = cube::parity_value(x1, prefix);
            let chi2 = cube::parity_value(x2, prefix);
            acc += f1 * chi1 * f2 * chi2;
        }
        Some(acc / samples as f64)
    }

    fn coefficient(&mut self, mask: u64, samples: usize) -> Option<f64> {
        let mut acc = 0.0;
        for _ in 0..samples {
            let x: u64 = self.rng.gen::<u64>() & ((1u64 << self.n) - 1);
            let f = self.ask(x)?;
            acc += f * cube::parity_value(x, mask);
        }
        Some(acc / samples as f64)
    }
}

/// Standalone bucket-weight estimate: the total squared coefficient mass of
/// all subsets agreeing with `prefix` on the first `k` coordinates, from
/// `samples` paired queries. Exposed for estimator diagnostics.
pub fn estimate_bucket_weight<F: FnMut(u64) -> f64>(
    query: F,
    n: u32,
    k: u32,
    prefix: u64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if n == 0 || n > MAX_GL_DIM || k > n {
        return Err(Error::DomainTooLarge { n, max: MAX_GL_DIM });
    }
    let mut run = GlRun {
        query,
        n,
        rng: ChaCha8Rng::seed_from_u64(seed),
        queries_used: 0,
        budget: None,
    };
    Ok(run
        .bucket_weight(k, prefix, samples)
        .expect("no budget set"))
}

/// Finds all subsets whose coefficient magnitude reaches `gamma`, given query
/// access to a `[-1,1]`-valued function on the `n`-cube.
///
/// Prefix-bucket search: buckets of candidate subsets sharing a fixed prefix
/// are kept while their estimated Fourier weight reaches `gamma^2 / 2`,
/// split one coordinate at a time, and the fully specified survivors are
/// confirmed by a direct coefficient estimate at threshold `3 gamma / 4`.
/// With the derived sample sizes, every `|coef| >= gamma` appears and nothing
/// with `|coef| < gamma / 2` does, except with probability `delta_fail`.
pub fn goldreich_levin<F: FnMut(u64) -> f64>(
    query: F,
    n: u32,
    cfg: &GlConfig,
) -> Result<GlResult> {
    if n == 0 || n > MAX_GL_DIM {
        return Err(Error::DomainTooLarge { n, max: MAX_GL_DIM });
    }
    if cfg.exact_mode {
        return goldreich_levin_exact(query, n, cfg);
    }
    let gamma = cfg.gamma;
    let list_cap = (4.0 / (gamma * gamma)).ceil() as usize;

    // union bound over every estimate the search can make
    let estimates_bound = (n as f64 + 1.0) * 2.0 * (list_cap as f64 + 1.0) + list_cap as f64;
    let delta_each = cfg.delta_fail / estimates_bound;
    let samples_weight = cfg.samples_per_estimate.unwrap_or_else(|| {
        // accuracy gamma^2/4 on a mean of [-1,1] samples
        let eps = gamma * gamma / 4.0;
        (2.0 * (2.0 / delta_each).ln() / (eps * eps)).ceil() as usize
    });
    let samples_coeff = cfg.samples_per_estimate.unwrap_or_else(|| {
        let eps = gamma / 4.0;
        (2.0 * (2.0 / delta_each).ln() / (eps * eps)).ceil() as usize
    });

    let mut run = GlRun {
        query,
        n,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        queries_used: 0,
        budget: cfg.query_budget,
    };

    let mut list_capped = false;
    let mut survivors: Vec<u64> = vec![0]; // prefixes at the current level
    let keep_threshold = gamma * gamma / 2.0;
    for k in 0..=n {
        let mut next = Vec::new();
        for &prefix in &survivors {
            let candidates: &[u64] = if k == 0 {
                &[0]
            } else {
                // extend the parent prefix by one coordinate, absent or present
                &[prefix << 1, (prefix << 1) | 1]
            };
            for &cand in candidates {
                match run.bucket_weight(k, cand, samples_weight) {
                    Some(w) if w >= keep_threshold => next.push(cand),
                    Some(_) => {}
                    None => {
                        return Ok(partial_result(
                            run.queries_used,
                            list_capped,
                            samples_weight,
                            samples_coeff,
                        ))
                    }
                }
            }
            if k == 0 {
                break; // single root bucket
            }
        }
        if next.len() > list_cap {
            list_capped = true;
            next.truncate(list_cap);
        }
        survivors = next;
        if survivors.is_empty() {
            break;
        }
        if k == n {
            break;
        }
    }

    // survivors are full masks now; confirm each coefficient directly
    let mut subsets = Vec::new();
    let mut estimates = Vec::new();
    let mut complete = true;
    for &mask in &survivors {
        match run.coefficient(mask, samples_coeff) {
            Some(est) if est.abs() >= 0.75 * gamma => {
                subsets.push(mask);
                estimates.push(est);
            }
            Some(_) => {}
            None => {
                complete = false;
                break;
            }
        }
    }
    let mut order: Vec<usize> = (0..subsets.len()).collect();
    order.sort_by_key(|&i| subsets[i]);
    Ok(GlResult {
        subsets: order.iter().map(|&i| subsets[i]).collect(),
        estimates: order.iter().map(|&i| estimates[i]).collect(),
        complete,
        list_capped,
        queries_used: run.queries_used,
        samples_weight,
        samples_coeff,
    })
}

fn partial_result(
    queries_used: u64,
    list_capped: bool,
    samples_weight: usize,
    samples_coeff: usize,
) -> GlResult {
    GlResult {
        subsets: Vec::new(),
        estimates: Vec::new(),
        complete: false,
        list_capped,
        queries_used,
        samples_weight,
        samples_coeff,
    }
}

/// Exact-weight variant: queries the whole cube once and runs the same
/// prefix-bucket logic against true bucket weights.
fn goldreich_levin_exact<F: FnMut(u64) -> f64>(
    mut query: F,
    n: u32,
    cfg: &GlConfig,
) -> Result<GlResult> {
    if n > 12 {
        return Err(Error::DomainTooLarge { n, max: 12 });
    }
    let size = 1usize << n;
    let values: Vec<f64> = (0..size as u64).map(&mut query).collect();
    let spectrum = full_spectrum(&values)?;
    let gamma = cfg.gamma;
    let list_cap = (4.0 / (gamma * gamma)).ceil() as usize;
    let keep_threshold = gamma * gamma / 2.0;

    let mut list_capped = false;
    let mut survivors: Vec<u64> = vec![0];
    for k in 0..=n {
        let mut next = Vec::new();
        for &prefix in &survivors {
            let candidates: &[u64] = if k == 0 {
                &[0]
            } else {
                &[prefix << 1, (prefix << 1) | 1]
            };
            for &cand in candidates {
                // true bucket weight: sum of coef^2 over masks with this prefix
                let suffix_bits = n - k;
                let mut w = 0.0;
                for suffix in 0..1u64 << suffix_bits {
                    let mask = (cand << suffix_bits) | suffix;
                    let c = spectrum.coefficient(mask);
                    w += c * c;
                }
                if w >= keep_threshold {
                    next.push(cand);
                }
            }
            if k == 0 {
                break;
            }
        }
        if next.len() > list_cap {
            list_capped = true;
            next.truncate(list_cap);
        }
        survivors = next;
        if survivors.is_empty() || k == n {
            break;
        }
    }
    let mut subsets: Vec<u64> = survivors
        .into_iter()
        .filter(|&m| spectrum.coefficient(m).abs() >= 0.75 * gamma)
        .collect();
    subsets.sort_unstable();
    let estimates = subsets.iter().map(|&m| spectrum.coefficient(m)).collect();
    Ok(GlResult {
        subsets,
        estimates,
        complete: true,
        list_capped,
        queries_used: size as u64,
        samples_weight: size,
        samples_coeff: size,
    })
}

/// Proper agnostic learning over the parity class, with queries simulated by
/// Bernoulli draws from the predictor: each query at `x` returns
/// `2 Z - 1` for a fresh `Z ~ Bernoulli(p(x))`, so estimates concern
/// `2p - 1`. Returns the parity with the largest estimated coefficient and
/// its exact correlation with the instance labels.
pub fn proper_agnostic_parity_learn(
    inst: &FiniteInstance,
    p: &Predictor,
    cfg: &GlConfig,
) -> Result<(Hypothesis, f64)> {
    let n = cube::hypercube_dimension(inst.points()).ok_or_else(|| Error::InvalidConfig {
        reason: "instance is not a canonical hypercube domain".into(),
    })?;
    inst.check_domain(p.len())?;
    let mut sampler = LabelSampler::new(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let values = p.values();
    let result = goldreich_levin(
        |point| 2.0 * f64::from(sampler.draw(values[point as usize])) - 1.0,
        n,
        cfg,
    )?;

    let best_mask = result
        .subsets
        .iter()
        .zip(&result.estimates)
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).expect("finite estimates"))
        .map(|(&m, _)| m)
        .unwrap_or(0);

    let table: Vec<f64> = (0..inst.len() as u64)
        .map(|i| cube::parity_value(i, best_mask))
        .collect();
    let hyp = Hypothesis::new(
        cube::parity_name(best_mask, n),
        HypothesisKind::BooleanPM,
        table,
    )?;
    let cor = correlation(inst, &hyp)?;
    Ok((hyp, cor))
}
