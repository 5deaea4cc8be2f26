//! Configuration-space model: adaptation options, plans, and per-environment
//! performance landscapes.
//!
//! A space is an ordered list of options, each with a categorical value
//! domain. Option values are opaque labels even when they look numeric;
//! neighborhood structure never depends on label magnitudes. Plans are
//! encoded as vectors of per-option value indices and map bijectively onto
//! `0..size` with the rightmost option varying fastest.

mod load;

use std::sync::Arc;

pub use load::{
    build_landscape, infer_space, load_environment, load_environment_path, parse_domains_file,
    read_table, read_table_path, validate_completeness, Aggregation, CompletenessReport,
    LoadOptions, RawRow, RawTable,
};

use crate::error::{Error, Result};

/// One adaptation option and its ordered categorical value domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptionDomain {
    name: String,
    values: Vec<String>,
}

impl OptionDomain {
    pub fn new(name: impl Into<String>, values: Vec<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::Domain("option name must not be empty".into()));
        }
        if values.is_empty() {
            return Err(Error::Domain(format!(
                "option {name:?} has an empty value domain"
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::Domain(format!(
                    "option {name:?} lists duplicate value {v:?}"
                )));
            }
        }
        Ok(OptionDomain { name, values })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    /// Number of values in the domain.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.values.iter().position(|v| v == label)
    }
}

/// A full assignment of value indices, one per option.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdaptationPlan {
    pub values: Vec<usize>,
}

impl AdaptationPlan {
    pub fn new(values: Vec<usize>) -> Self {
        AdaptationPlan { values }
    }
}

impl From<Vec<usize>> for AdaptationPlan {
    fn from(values: Vec<usize>) -> Self {
        AdaptationPlan { values }
    }
}

/// The Cartesian search space over all options.
///
/// Option order is fixed and defines the plan encoding: plan indices are the
/// mixed-radix number with the last option as the least-significant digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigurationSpace {
    options: Vec<OptionDomain>,
    strides: Vec<usize>,
    size: usize,
}

impl ConfigurationSpace {
    pub fn new(options: Vec<OptionDomain>) -> Result<Self> {
        if options.is_empty() {
            return Err(Error::Domain(
                "a configuration space needs at least one option".into(),
            ));
        }
        for (i, opt) in options.iter().enumerate() {
            if options[..i].iter().any(|o| o.name == opt.name) {
                return Err(Error::Domain(format!(
                    "duplicate option name {:?}",
                    opt.name
                )));
            }
        }
        let mut strides = vec![1usize; options.len()];
        let mut size = 1usize;
        for (i, opt) in options.iter().enumerate().rev() {
            strides[i] = size;
            size = size.checked_mul(opt.len()).ok_or_else(|| {
                Error::Domain("search space size overflows the machine word".into())
            })?;
        }
        Ok(ConfigurationSpace {
            options,
            strides,
            size,
        })
    }

    pub fn options(&self) -> &[OptionDomain] {
        &self.options
    }

    pub fn option_count(&self) -> usize {
        self.options.len()
    }

    /// Total number of plans (product of all domain sizes).
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn option_position(&self, name: &str) -> Option<usize> {
        self.options.iter().position(|o| o.name == name)
    }

    /// Number of Hamming-1 neighbors of any plan: Σ (|domain_i| − 1).
    pub fn neighbor_total(&self) -> usize {
        self.options.iter().map(|o| o.len() - 1).sum()
    }

    pub fn validate_plan(&self, plan: &AdaptationPlan) -> Result<()> {
        if plan.values.len() != self.options.len() {
            return Err(Error::Domain(format!(
                "plan has {} values but the space has {} options",
                plan.values.len(),
                self.options.len()
            )));
        }
        for (i, (&v, opt)) in plan.values.iter().zip(&self.options).enumerate() {
            if v >= opt.len() {
                return Err(Error::Domain(format!(
                    "value index {v} out of range for option {:?} (domain size {}) at position {i}",
                    opt.name,
                    opt.len()
                )));
            }
        }
        Ok(())
    }

    /// Mixed-radix encoding of a plan; the rightmost option has stride 1.
    pub fn plan_to_index(&self, plan: &AdaptationPlan) -> Result<usize> {
        self.validate_plan(plan)?;
        Ok(plan
            .values
            .iter()
            .zip(&self.strides)
            .map(|(&v, &s)| v * s)
            .sum())
    }

    pub fn index_to_plan(&self, index: usize) -> Result<AdaptationPlan> {
        if index >= self.size {
            return Err(Error::Domain(format!(
                "plan index {index} out of range for a space of size {}",
                self.size
            )));
        }
        let mut values = vec![0usize; self.options.len()];
        self.decode_into(index, &mut values);
        Ok(AdaptationPlan { values })
    }

    /// Decodes `index` into `digits` without allocating; `digits` must have
    /// one slot per option.
    pub(crate) fn decode_into(&self, index: usize, digits: &mut [usize]) {
        debug_assert_eq!(digits.len(), self.options.len());
        let mut rest = index;
        for (slot, opt) in digits.iter_mut().zip(&self.options).rev() {
            *slot = rest % opt.len();
            rest /= opt.len();
        }
    }

    /// Labels of a plan, in option order.
    pub fn plan_labels(&self, plan: &AdaptationPlan) -> Result<Vec<&str>> {
        self.validate_plan(plan)?;
        Ok(plan
            .values
            .iter()
            .zip(&self.options)
            .map(|(&v, opt)| opt.values[v].as_str())
            .collect())
    }

    /// Human-readable rendering of the plan behind `index`, e.g. `(1, a, off)`.
    pub fn format_plan(&self, index: usize) -> String {
        match self.index_to_plan(index) {
            Ok(plan) => {
                let labels = self.plan_labels(&plan).expect("plan came from this space");
                format!("({})", labels.join(", "))
            }
            Err(_) => format!("<invalid index {index}>"),
        }
    }

    /// Iterates over every plan in index order.
    pub fn plans(&self) -> impl Iterator<Item = AdaptationPlan> + '_ {
        (0..self.size).map(move |i| {
            self.index_to_plan(i)
                .expect("indices below size are always decodable")
        })
    }
}

/// One environment's performance table over a shared configuration space.
///
/// Lower performance is better. Complete landscapes assign a finite value to
/// every plan; partial landscapes carry a measured mask and every downstream
/// definition is restricted to measured plans.
#[derive(Debug, Clone)]
pub struct EnvironmentLandscape {
    environment_id: String,
    space: Arc<ConfigurationSpace>,
    performance: Vec<f64>,
    measured: Option<Vec<bool>>,
    measured_count: usize,
    row_count: usize,
}

impl EnvironmentLandscape {
    /// Builds a complete landscape; `performance[i]` is the value of plan `i`.
    pub fn new_complete(
        environment_id: impl Into<String>,
        space: Arc<ConfigurationSpace>,
        performance: Vec<f64>,
    ) -> Result<Self> {
        let environment_id = environment_id.into();
        if performance.len() != space.size() {
            return Err(Error::Domain(format!(
                "landscape {environment_id:?} has {} performance values for a space of size {}",
                performance.len(),
                space.size()
            )));
        }
        if let Some(i) = performance.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "landscape {environment_id:?} has a non-finite performance value at plan index {i}"
            )));
        }
        let measured_count = performance.len();
        Ok(EnvironmentLandscape {
            environment_id,
            space,
            performance,
            measured: None,
            measured_count,
            row_count: measured_count,
        })
    }

    /// Builds a partial landscape from `(plan index, performance)` entries.
    pub fn new_partial(
        environment_id: impl Into<String>,
        space: Arc<ConfigurationSpace>,
        entries: &[(usize, f64)],
    ) -> Result<Self> {
        let environment_id = environment_id.into();
        let mut performance = vec![f64::NAN; space.size()];
        let mut measured = vec![false; space.size()];
        let mut measured_count = 0usize;
        for &(index, value) in entries {
            if index >= space.size() {
                return Err(Error::Domain(format!(
                    "plan index {index} out of range for a space of size {}",
                    space.size()
                )));
            }
            if !value.is_finite() {
                return Err(Error::Domain(format!(
                    "landscape {environment_id:?} has a non-finite performance value for plan index {index}"
                )));
            }
            if measured[index] {
                return Err(Error::Domain(format!(
                    "plan index {index} listed twice; aggregate duplicates before construction"
                )));
            }
            performance[index] = value;
            measured[index] = true;
            measured_count += 1;
        }
        Ok(EnvironmentLandscape {
            environment_id,
            space,
            performance,
            measured: Some(measured),
            measured_count,
            row_count: measured_count,
        })
    }

    pub(crate) fn set_row_count(&mut self, rows: usize) {
        self.row_count = rows;
    }

    pub fn environment_id(&self) -> &str {
        &self.environment_id
    }

    pub fn space(&self) -> &ConfigurationSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<ConfigurationSpace> {
        &self.space
    }

    /// True when every plan in the space has a measurement.
    pub fn is_complete(&self) -> bool {
        self.measured.is_none()
    }

    pub fn measured_count(&self) -> usize {
        self.measured_count
    }

    /// Raw data rows consumed to build this landscape (before aggregation).
    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn is_measured(&self, index: usize) -> bool {
        match &self.measured {
            None => index < self.performance.len(),
            Some(mask) => mask.get(index).copied().unwrap_or(false),
        }
    }

    /// Performance of plan `index`, `None` when unmeasured or out of range.
    pub fn performance(&self, index: usize) -> Option<f64> {
        if self.is_measured(index) {
            Some(self.performance[index])
        } else {
            None
        }
    }

    /// Performance of a measured plan; panics on unmeasured indices.
    pub(crate) fn perf_unchecked(&self, index: usize) -> f64 {
        debug_assert!(self.is_measured(index));
        self.performance[index]
    }

    /// Measured plan indices in ascending order.
    pub fn measured_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.space.size()).filter(move |&i| self.is_measured(i))
    }

    /// `(plan index, performance)` for every measured plan, ascending.
    pub fn measured_values(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.measured_indices().map(move |i| (i, self.performance[i]))
    }

    /// Copy of this landscape with every measured value mapped through `f`.
    /// Intended for synthetic-transform tests (affine rescaling, shuffles).
    pub fn map_performance(&self, mut f: impl FnMut(usize, f64) -> f64) -> Result<Self> {
        let mut clone = self.clone();
        for i in 0..clone.performance.len() {
            if clone.is_measured(i) {
                let v = f(i, clone.performance[i]);
                if !v.is_finite() {
                    return Err(Error::Domain(format!(
                        "mapped performance for plan index {i} is not finite"
                    )));
                }
                clone.performance[i] = v;
            }
        }
        Ok(clone)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space_232() -> ConfigurationSpace {
        ConfigurationSpace::new(vec![
            OptionDomain::new("a", vec!["0".into(), "1".into()]).unwrap(),
            OptionDomain::new("b", vec!["x".into(), "y".into(), "z".into()]).unwrap(),
            OptionDomain::new("c", vec!["0".into(), "1".into()]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn size_is_product_of_domain_sizes() {
        let space = space_232();
        assert_eq!(space.size(), 12);
        assert_eq!(space.option_count(), 3);
        assert_eq!(space.neighbor_total(), 1 + 2 + 1);
    }

    #[test]
    fn zero_plan_maps_to_index_zero() {
        let space = space_232();
        let idx = space
            .plan_to_index(&AdaptationPlan::new(vec![0, 0, 0]))
            .unwrap();
        assert_eq!(idx, 0);
    }

    #[test]
    fn mixed_radix_maximum() {
        let space = space_232();
        let idx = space
            .plan_to_index(&AdaptationPlan::new(vec![1, 2, 1]))
            .unwrap();
        assert_eq!(idx, 11);
        assert_eq!(idx, space.size() - 1);
    }

    #[test]
    fn rightmost_option_varies_fastest() {
        let space = space_232();
        let p0 = space.index_to_plan(0).unwrap();
        let p1 = space.index_to_plan(1).unwrap();
        assert_eq!(p0.values, vec![0, 0, 0]);
        assert_eq!(p1.values, vec![0, 0, 1]);
    }

    #[test]
    fn out_of_range_value_is_a_domain_error() {
        let space = space_232();
        let err = space
            .plan_to_index(&AdaptationPlan::new(vec![0, 3, 0]))
            .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn wrong_length_plan_is_rejected() {
        let space = space_232();
        assert!(space
            .plan_to_index(&AdaptationPlan::new(vec![0, 0]))
            .is_err());
    }

    #[test]
    fn index_plan_roundtrip_over_whole_space() {
        let space = space_232();
        for i in 0..space.size() {
            let plan = space.index_to_plan(i).unwrap();
            assert_eq!(space.plan_to_index(&plan).unwrap(), i);
        }
    }

    #[test]
    fn duplicate_option_values_rejected() {
        let err = OptionDomain::new("a", vec!["1".into(), "1".into()]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn duplicate_option_names_rejected() {
        let a = OptionDomain::new("a", vec!["0".into()]).unwrap();
        let b = OptionDomain::new("a", vec!["1".into()]).unwrap();
        assert!(ConfigurationSpace::new(vec![a, b]).is_err());
    }

    #[test]
    fn partial_landscape_masks_unmeasured_plans() {
        let space = Arc::new(space_232());
        let land =
            EnvironmentLandscape::new_partial("e", Arc::clone(&space), &[(0, 1.0), (5, 2.0)])
                .unwrap();
        assert!(!land.is_complete());
        assert_eq!(land.measured_count(), 2);
        assert_eq!(land.performance(0), Some(1.0));
        assert_eq!(land.performance(1), None);
        assert_eq!(land.measured_indices().collect::<Vec<_>>(), vec![0, 5]);
    }

    #[test]
    fn complete_landscape_rejects_non_finite_values() {
        let space = Arc::new(space_232());
        let mut perf = vec![0.0; 12];
        perf[3] = f64::NAN;
        assert!(EnvironmentLandscape::new_complete("e", space, perf).is_err());
    }

    #[test]
    fn format_plan_uses_labels() {
        let space = space_232();
        assert_eq!(space.format_plan(1), "(0, x, 1)");
    }
}
