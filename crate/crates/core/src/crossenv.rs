//! Cross-environment analyses: optima overlap between two environments over
//! the same configuration space, and the distance comparison between
//! strictly local optima and non-optimal plans.

use crate::error::{Error, Result};
use crate::metrics::DistanceField;
use crate::neighborhood::OptimaClassification;
use crate::space::EnvironmentLandscape;

/// Optima shared when the environment changes from `source` to `target`.
///
/// - `a1`: some source global optimum is also a target global optimum.
/// - `a2`: some source strictly local optimum is a target global optimum.
/// - `a3`: percentage of source optima (global ∪ strictly local) that are
///   also target optima; the denominator is the source optima count.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapResult {
    pub source_id: String,
    pub target_id: String,
    pub a1: bool,
    pub a1_witnesses: Vec<usize>,
    pub a2: bool,
    pub a2_witnesses: Vec<usize>,
    pub a3_percent: f64,
    pub source_optima_count: usize,
    pub shared_optima_count: usize,
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Computes the A1/A2/A3 overlap indicators for `source` → `target`.
pub fn optima_overlap(
    source: &EnvironmentLandscape,
    source_cls: &OptimaClassification,
    target: &EnvironmentLandscape,
    target_cls: &OptimaClassification,
) -> Result<OverlapResult> {
    if source.space() != target.space() {
        return Err(Error::Domain(format!(
            "environments {:?} and {:?} do not share a configuration space",
            source.environment_id(),
            target.environment_id()
        )));
    }

    let a1_witnesses = sorted_intersection(source_cls.global_optima(), target_cls.global_optima());
    let a2_witnesses =
        sorted_intersection(source_cls.strictly_local_optima(), target_cls.global_optima());

    let source_optima = source_cls.optima_union();
    let target_optima = target_cls.optima_union();
    let shared = sorted_intersection(&source_optima, &target_optima);
    let a3_percent = 100.0 * shared.len() as f64 / source_optima.len() as f64;

    Ok(OverlapResult {
        source_id: source.environment_id().to_string(),
        target_id: target.environment_id().to_string(),
        a1: !a1_witnesses.is_empty(),
        a1_witnesses,
        a2: !a2_witnesses.is_empty(),
        a2_witnesses,
        a3_percent,
        source_optima_count: source_optima.len(),
        shared_optima_count: shared.len(),
    })
}

/// Distances to the closest global optimum, split by plan role.
///
/// `d_local` holds one distance per strictly local optimum, `d_others` one
/// per non-optimal plan. Either group may be empty; downstream tests then
/// report "not applicable".
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceGroups {
    pub d_local: Vec<usize>,
    pub d_others: Vec<usize>,
}

fn mean_std(values: &[usize]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let var = values
        .iter()
        .map(|&v| (v as f64 - mean) * (v as f64 - mean))
        .sum::<f64>()
        / n;
    Some((mean, var.sqrt()))
}

impl DistanceGroups {
    /// Mean and population standard deviation of `d_local`, if non-empty.
    pub fn local_stats(&self) -> Option<(f64, f64)> {
        mean_std(&self.d_local)
    }

    pub fn others_stats(&self) -> Option<(f64, f64)> {
        mean_std(&self.d_others)
    }

    pub fn local_as_f64(&self) -> Vec<f64> {
        self.d_local.iter().map(|&v| v as f64).collect()
    }

    pub fn others_as_f64(&self) -> Vec<f64> {
        self.d_others.iter().map(|&v| v as f64).collect()
    }
}

/// Collects per-plan distances from `field` grouped by the classification.
pub fn distance_groups(
    landscape: &EnvironmentLandscape,
    classification: &OptimaClassification,
    field: &DistanceField,
) -> Result<DistanceGroups> {
    if classification.population() != landscape.measured_count() {
        return Err(Error::Domain(
            "classification does not cover this landscape's measured plans".into(),
        ));
    }
    let collect = |indices: &[usize]| -> Result<Vec<usize>> {
        indices
            .iter()
            .map(|&i| {
                field.distance(i).ok_or_else(|| {
                    Error::Domain(format!("distance field has no value for plan index {i}"))
                })
            })
            .collect()
    };
    Ok(DistanceGroups {
        d_local: collect(classification.strictly_local_optima())?,
        d_others: collect(classification.non_optimal())?,
    })
}
