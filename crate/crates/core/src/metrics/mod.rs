//! Per-environment landscape metrics: distance-to-optimum field, fitness
//! distance correlation, multi-modality, random-walk correlation length, and
//! two-option projections.

mod walk;

use std::collections::HashSet;

pub use walk::{
    correlation_length, correlation_length_study, lag_autocorrelation, random_walk, sub_seed,
    CorrelationLength, CorrelationLengthResult, LagCorrelation, WalkRecord,
};

use crate::error::{Error, Result};
use crate::neighborhood::OptimaClassification;
use crate::space::EnvironmentLandscape;

const UNMEASURED: usize = usize::MAX;

/// Shortest Hamming distance from each measured plan to any global optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    d: Vec<usize>,
}

impl DistanceField {
    /// Distance of plan `index`, `None` for unmeasured plans.
    pub fn distance(&self, index: usize) -> Option<usize> {
        match self.d.get(index) {
            Some(&UNMEASURED) | None => None,
            Some(&v) => Some(v),
        }
    }

    /// `(plan index, distance)` for every measured plan, ascending.
    pub fn values(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.d
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != UNMEASURED)
            .map(|(i, &v)| (i, v))
    }

    pub fn len(&self) -> usize {
        self.d.iter().filter(|&&v| v != UNMEASURED).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Computes `d[i] = min over g in globals of hamming(plan_i, plan_g)` for
/// every measured plan.
pub fn distance_field(
    landscape: &EnvironmentLandscape,
    globals: &[usize],
) -> Result<DistanceField> {
    if globals.is_empty() {
        return Err(Error::Domain(
            "distance field needs at least one global optimum".into(),
        ));
    }
    let space = landscape.space();
    for &g in globals {
        if g >= space.size() || !landscape.is_measured(g) {
            return Err(Error::Domain(format!(
                "global optimum index {g} is not a measured plan"
            )));
        }
    }
    let global_set: HashSet<usize> = globals.iter().copied().collect();
    let global_digits: Vec<Vec<usize>> = globals
        .iter()
        .map(|&g| {
            let mut d = vec![0usize; space.option_count()];
            space.decode_into(g, &mut d);
            d
        })
        .collect();

    let mut d = vec![UNMEASURED; space.size()];
    let mut digits = vec![0usize; space.option_count()];
    for index in landscape.measured_indices() {
        if global_set.contains(&index) {
            d[index] = 0;
            continue;
        }
        space.decode_into(index, &mut digits);
        let mut best = usize::MAX;
        for g in &global_digits {
            let dist = digits.iter().zip(g).filter(|(a, b)| a != b).count();
            if dist < best {
                best = dist;
                if best == 1 {
                    break; // a non-global plan cannot be closer
                }
            }
        }
        d[index] = best;
    }
    Ok(DistanceField { d })
}

/// Guidance classes for the fitness distance correlation, with the band
/// boundaries at ±0.15.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdcClass {
    /// rho ≤ −0.15: the landscape drives search away from the global optima.
    Misleading,
    /// −0.15 < rho < 0.15: no usable correlation either way.
    Difficult,
    /// rho ≥ 0.15: performance decreases toward the global optima.
    Straightforward,
}

impl FdcClass {
    pub fn from_rho(rho: f64) -> FdcClass {
        if rho <= -0.15 {
            FdcClass::Misleading
        } else if rho < 0.15 {
            FdcClass::Difficult
        } else {
            FdcClass::Straightforward
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FdcClass::Misleading => "Misleading",
            FdcClass::Difficult => "Difficult",
            FdcClass::Straightforward => "Straightforward",
        }
    }
}

/// Fitness distance correlation over the full measured landscape.
#[derive(Debug, Clone, PartialEq)]
pub struct FdcResult {
    pub rho: f64,
    pub classification: FdcClass,
    /// Number of plans the correlation was computed over.
    pub p_points: usize,
}

/// Pearson correlation between performance and distance-to-optimum, using
/// population (divide-by-p) standard deviations over every measured plan.
pub fn fdc(landscape: &EnvironmentLandscape, field: &DistanceField) -> Result<FdcResult> {
    let mut fs = Vec::with_capacity(landscape.measured_count());
    let mut ds = Vec::with_capacity(landscape.measured_count());
    for (index, perf) in landscape.measured_values() {
        let dist = field.distance(index).ok_or_else(|| {
            Error::Domain(format!(
                "distance field has no value for measured plan index {index}"
            ))
        })?;
        fs.push(perf);
        ds.push(dist as f64);
    }
    let p = fs.len();
    if p == 0 {
        return Err(Error::Domain("empty landscape".into()));
    }
    let pf = p as f64;
    let mean_f = fs.iter().sum::<f64>() / pf;
    let mean_d = ds.iter().sum::<f64>() / pf;
    let mut cov = 0.0;
    let mut var_f = 0.0;
    let mut var_d = 0.0;
    for (f, d) in fs.iter().zip(&ds) {
        cov += (f - mean_f) * (d - mean_d);
        var_f += (f - mean_f) * (f - mean_f);
        var_d += (d - mean_d) * (d - mean_d);
    }
    cov /= pf;
    var_f /= pf;
    var_d /= pf;
    if var_f == 0.0 && var_d == 0.0 {
        return Err(Error::DegenerateLandscape(
            "both performance and distance have zero variance".into(),
        ));
    }
    if var_f == 0.0 {
        return Err(Error::DegenerateLandscape(
            "performance has zero variance (constant landscape)".into(),
        ));
    }
    if var_d == 0.0 {
        return Err(Error::DegenerateLandscape(
            "distance has zero variance (every plan is a global optimum)".into(),
        ));
    }
    let rho = (cov / (var_f.sqrt() * var_d.sqrt())).clamp(-1.0, 1.0);
    Ok(FdcResult {
        rho,
        classification: FdcClass::from_rho(rho),
        p_points: p,
    })
}

/// Percentage of plans that are global or strictly local optima.
pub fn modality_percentage(classification: &OptimaClassification, size: usize) -> f64 {
    let optima =
        classification.global_optima().len() + classification.strictly_local_optima().len();
    100.0 * optima as f64 / size as f64
}

/// Aggregator for two-option projections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionAggregate {
    #[default]
    Mean,
    Min,
}

impl ProjectionAggregate {
    pub fn as_str(self) -> &'static str {
        match self {
            ProjectionAggregate::Mean => "mean",
            ProjectionAggregate::Min => "min",
        }
    }
}

impl std::str::FromStr for ProjectionAggregate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(ProjectionAggregate::Mean),
            "min" => Ok(ProjectionAggregate::Min),
            other => Err(Error::Argument(format!(
                "unknown projection aggregator {other:?} (expected mean or min)"
            ))),
        }
    }
}

/// A landscape projected onto two options.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionGrid {
    pub option_a: String,
    pub option_b: String,
    pub values_a: Vec<String>,
    pub values_b: Vec<String>,
    /// `(value index in a, value index in b, aggregated performance)`, in
    /// row-major (a-major) order. Cells with no measured plan are omitted.
    pub cells: Vec<(usize, usize, f64)>,
}

impl ProjectionGrid {
    /// Long-form delimiter-separated rendering: `value_a,value_b,aggregate`.
    pub fn to_long_form(&self, delimiter: char) -> String {
        let mut out = format!("value_a{delimiter}value_b{delimiter}aggregate\n");
        for &(a, b, v) in &self.cells {
            out.push_str(&format!(
                "{}{delimiter}{}{delimiter}{v}\n",
                self.values_a[a], self.values_b[b]
            ));
        }
        out
    }
}

/// Aggregates performance over every plan that fixes the two named options.
pub fn project(
    landscape: &EnvironmentLandscape,
    option_a: &str,
    option_b: &str,
    aggregate: ProjectionAggregate,
) -> Result<ProjectionGrid> {
    let space = landscape.space();
    let names: Vec<&str> = space.options().iter().map(|o| o.name()).collect();
    let pos_a = space.option_position(option_a).ok_or_else(|| {
        Error::Argument(format!(
            "unknown option {option_a:?}; valid options are {names:?}"
        ))
    })?;
    let pos_b = space.option_position(option_b).ok_or_else(|| {
        Error::Argument(format!(
            "unknown option {option_b:?}; valid options are {names:?}"
        ))
    })?;
    if pos_a == pos_b {
        return Err(Error::Argument(format!(
            "projection needs two distinct options, got {option_a:?} twice"
        )));
    }

    let len_a = space.options()[pos_a].len();
    let len_b = space.options()[pos_b].len();
    let mut sums = vec![0.0f64; len_a * len_b];
    let mut counts = vec![0usize; len_a * len_b];
    let mut mins = vec![f64::INFINITY; len_a * len_b];
    let mut digits = vec![0usize; space.option_count()];
    for (index, perf) in landscape.measured_values() {
        space.decode_into(index, &mut digits);
        let cell = digits[pos_a] * len_b + digits[pos_b];
        sums[cell] += perf;
        counts[cell] += 1;
        if perf < mins[cell] {
            mins[cell] = perf;
        }
    }

    let mut cells = Vec::new();
    for a in 0..len_a {
        for b in 0..len_b {
            let cell = a * len_b + b;
            if counts[cell] == 0 {
                continue;
            }
            let v = match aggregate {
                ProjectionAggregate::Mean => sums[cell] / counts[cell] as f64,
                ProjectionAggregate::Min => mins[cell],
            };
            cells.push((a, b, v));
        }
    }
    Ok(ProjectionGrid {
        option_a: option_a.to_string(),
        option_b: option_b.to_string(),
        values_a: space.options()[pos_a].values().to_vec(),
        values_b: space.options()[pos_b].values().to_vec(),
        cells,
    })
}
