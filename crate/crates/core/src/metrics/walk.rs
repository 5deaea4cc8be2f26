//! Random walks over the Hamming-1 neighbor graph and the correlation
//! length of their performance series.
//!
//! The lag-s autocorrelation of a walk of length p is
//!
//! ```text
//! r_s = [ Σ_{i=1}^{p−s} (f_i − f̄)(f_{i+s} − f̄) / (p − s) ] / σ_f²
//! ```
//!
//! with f̄ and σ_f² (population variance) taken over the walk's own samples,
//! and the correlation length is ell = −1 / ln |r_s|. Walks with σ_f = 0 or
//! r_s = 0 are degenerate; |r_s| ≥ 1 maps to an infinite correlation length
//! rather than an error.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::space::EnvironmentLandscape;

/// A seeded random-walk trace. Consecutive plans are at Hamming distance 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkRecord {
    pub seed: u64,
    pub start_index: usize,
    /// `(plan index, performance)` per sampled point, start included.
    pub trace: Vec<(usize, f64)>,
}

impl WalkRecord {
    pub fn performances(&self) -> Vec<f64> {
        self.trace.iter().map(|&(_, f)| f).collect()
    }
}

/// Correlation length of one walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrelationLength {
    Finite(f64),
    /// |r_s| ≥ 1; serialized as "inf".
    Infinite,
}

impl CorrelationLength {
    pub fn as_f64(self) -> f64 {
        match self {
            CorrelationLength::Finite(v) => v,
            CorrelationLength::Infinite => f64::INFINITY,
        }
    }
}

/// Outcome of the lag autocorrelation of one walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LagCorrelation {
    Measured { r: f64, ell: CorrelationLength },
    /// σ_f = 0 over the walk; the autocorrelation is undefined.
    ConstantWalk,
    /// r_s came out exactly 0; excluded from study aggregates.
    ZeroCorrelation,
}

impl LagCorrelation {
    pub fn is_degenerate(&self) -> bool {
        !matches!(self, LagCorrelation::Measured { .. })
    }
}

/// Deterministic sub-seed for repeat `k` of a study: the (k+1)-th output of
/// the SplitMix64 sequence seeded with `master`. Stable across versions.
pub fn sub_seed(master: u64, k: u64) -> u64 {
    let mut z = master.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Walks `length` sampled points (start included) from a uniformly drawn
/// start plan; every step moves to a uniformly drawn Hamming-1 neighbor.
///
/// On partial landscapes the walk is confined to measured plans and fails if
/// it reaches a plan with no measured neighbor.
pub fn random_walk(
    landscape: &EnvironmentLandscape,
    length: usize,
    seed: u64,
) -> Result<WalkRecord> {
    if length < 2 {
        return Err(Error::Argument(format!(
            "walk length must be at least 2, got {length}"
        )));
    }
    let space = landscape.space();
    if space.neighbor_total() == 0 {
        return Err(Error::Domain(
            "every plan has an empty neighborhood (all domains are singletons)".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let start_index = if landscape.is_complete() {
        rng.gen_range(0..space.size())
    } else {
        let measured: Vec<usize> = landscape.measured_indices().collect();
        if measured.is_empty() {
            return Err(Error::Domain("empty landscape".into()));
        }
        measured[rng.gen_range(0..measured.len())]
    };

    let mut digits = vec![0usize; space.option_count()];
    space.decode_into(start_index, &mut digits);
    let mut index = start_index;
    let mut trace = Vec::with_capacity(length);
    trace.push((index, landscape.perf_unchecked(index)));

    while trace.len() < length {
        if landscape.is_complete() {
            // Pick the t-th of the Σ (|domain_i| − 1) neighbors directly.
            let mut t = rng.gen_range(0..space.neighbor_total());
            let mut moved = false;
            for (pos, opt) in space.options().iter().enumerate() {
                let alternatives = opt.len() - 1;
                if t < alternatives {
                    let current = digits[pos];
                    let v = if t < current { t } else { t + 1 };
                    let stride = space.strides()[pos];
                    index = index - current * stride + v * stride;
                    digits[pos] = v;
                    moved = true;
                    break;
                }
                t -= alternatives;
            }
            debug_assert!(moved);
        } else {
            let mut options = Vec::new();
            crate::neighborhood::visit_neighbor_indices(space, &digits, index, |n| {
                if landscape.is_measured(n) {
                    options.push(n);
                }
                true
            });
            if options.is_empty() {
                return Err(Error::Domain(format!(
                    "plan {} has no measured neighbor to walk to",
                    space.format_plan(index)
                )));
            }
            index = options[rng.gen_range(0..options.len())];
            space.decode_into(index, &mut digits);
        }
        trace.push((index, landscape.perf_unchecked(index)));
    }

    Ok(WalkRecord {
        seed,
        start_index,
        trace,
    })
}

/// Lag-`s` autocorrelation and correlation length of a raw value series.
pub fn lag_autocorrelation(values: &[f64], s: usize) -> Result<LagCorrelation> {
    let p = values.len();
    if s == 0 {
        return Err(Error::Argument("step size s must be positive".into()));
    }
    if p <= s {
        return Err(Error::Argument(format!(
            "series of length {p} is too short for lag {s}"
        )));
    }
    // A constant series has zero variance by definition; test for it
    // exactly rather than through accumulated rounding.
    if values.iter().all(|&v| v == values[0]) {
        return Ok(LagCorrelation::ConstantWalk);
    }
    let pf = p as f64;
    let mean = values.iter().sum::<f64>() / pf;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / pf;
    if variance == 0.0 {
        return Ok(LagCorrelation::ConstantWalk);
    }
    let cross = values
        .iter()
        .zip(&values[s..])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum::<f64>()
        / (p - s) as f64;
    let r = cross / variance;
    if r == 0.0 {
        return Ok(LagCorrelation::ZeroCorrelation);
    }
    let ell = if r.abs() >= 1.0 {
        CorrelationLength::Infinite
    } else {
        CorrelationLength::Finite(-1.0 / r.abs().ln())
    };
    Ok(LagCorrelation::Measured { r, ell })
}

/// Correlation length of one walk at step size `s` (normally 1).
pub fn correlation_length(walk: &WalkRecord, s: usize) -> Result<LagCorrelation> {
    lag_autocorrelation(&walk.performances(), s)
}

/// Aggregated correlation-length study over repeated seeded walks.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationLengthResult {
    /// `(sub-seed, outcome)` per repeat, in repeat order.
    pub per_repeat: Vec<(u64, LagCorrelation)>,
    /// Mean ell over non-degenerate repeats; +inf if any repeat is infinite.
    pub mean_ell: f64,
    /// Population standard deviation over the same repeats; +inf when the
    /// mean is infinite.
    pub std_ell: f64,
    pub degenerate_count: usize,
}

impl CorrelationLengthResult {
    /// Repeats that produced a usable autocorrelation.
    pub fn used_count(&self) -> usize {
        self.per_repeat.len() - self.degenerate_count
    }

    /// r values of non-degenerate repeats with |r| < 1, for Fisher-based
    /// comparisons between environments.
    pub fn fisher_ready_r1s(&self) -> Vec<f64> {
        self.per_repeat
            .iter()
            .filter_map(|(_, o)| match o {
                LagCorrelation::Measured { r, .. } if r.abs() < 1.0 => Some(*r),
                _ => None,
            })
            .collect()
    }
}

/// Runs `repeats` independent walks of `length` points with sub-seeds
/// derived from `master_seed` and aggregates their correlation lengths.
pub fn correlation_length_study(
    landscape: &EnvironmentLandscape,
    length: usize,
    repeats: usize,
    master_seed: u64,
) -> Result<CorrelationLengthResult> {
    if repeats == 0 {
        return Err(Error::Argument("repeats must be at least 1".into()));
    }
    let mut per_repeat = Vec::with_capacity(repeats);
    let mut ells = Vec::new();
    for k in 0..repeats {
        let seed = sub_seed(master_seed, k as u64);
        let walk = random_walk(landscape, length, seed)?;
        let outcome = correlation_length(&walk, 1)?;
        if let LagCorrelation::Measured { ell, .. } = outcome {
            ells.push(ell.as_f64());
        }
        per_repeat.push((seed, outcome));
    }
    if ells.is_empty() {
        return Err(Error::DegenerateStudy(repeats));
    }
    let n = ells.len() as f64;
    let mean_ell = ells.iter().sum::<f64>() / n;
    let std_ell = if mean_ell.is_infinite() {
        f64::INFINITY
    } else {
        (ells.iter().map(|e| (e - mean_ell) * (e - mean_ell)).sum::<f64>() / n).sqrt()
    };
    Ok(CorrelationLengthResult {
        per_repeat,
        mean_ell,
        std_ell,
        degenerate_count: repeats - ells.len(),
    })
}
