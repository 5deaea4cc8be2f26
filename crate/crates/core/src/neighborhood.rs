//! Hamming distance, distance-1 neighborhoods, and optima classification.
//!
//! Two plans are neighbors when they differ on exactly one option. A plan is
//! a local optimum when it is no worse than every neighbor; ties count, so
//! plateau members are local optima. Global optima are the plans within
//! `epsilon` of the minimum performance. On partial landscapes both
//! definitions are restricted to measured plans.

use crate::error::{Error, Result};
use crate::space::{AdaptationPlan, ConfigurationSpace, EnvironmentLandscape};

/// Number of option positions on which two plans differ.
pub fn hamming_distance(a: &AdaptationPlan, b: &AdaptationPlan) -> Result<usize> {
    if a.values.len() != b.values.len() {
        return Err(Error::Domain(format!(
            "plans with {} and {} options do not share a space",
            a.values.len(),
            b.values.len()
        )));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .filter(|(x, y)| x != y)
        .count())
}

/// All plans at Hamming distance exactly 1 from `plan`.
///
/// The result has Σ (|domain_i| − 1) entries, ordered by option and then by
/// value index.
pub fn neighbors(space: &ConfigurationSpace, plan: &AdaptationPlan) -> Result<Vec<AdaptationPlan>> {
    space.validate_plan(plan)?;
    let mut out = Vec::with_capacity(space.neighbor_total());
    for (pos, opt) in space.options().iter().enumerate() {
        let current = plan.values[pos];
        for v in 0..opt.len() {
            if v != current {
                let mut values = plan.values.clone();
                values[pos] = v;
                out.push(AdaptationPlan::new(values));
            }
        }
    }
    Ok(out)
}

/// Calls `visit` with the plan index of every neighbor of the plan whose
/// digits are given; stops early when `visit` returns `false`.
pub(crate) fn visit_neighbor_indices(
    space: &ConfigurationSpace,
    digits: &[usize],
    index: usize,
    mut visit: impl FnMut(usize) -> bool,
) {
    for (pos, opt) in space.options().iter().enumerate() {
        let stride = space.strides()[pos];
        let current = digits[pos];
        let base = index - current * stride;
        for v in 0..opt.len() {
            if v != current && !visit(base + v * stride) {
                return;
            }
        }
    }
}

/// Partition of the measured plans into global optima, strictly local optima
/// and non-optimal plans.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimaClassification {
    global_optima: Vec<usize>,
    strictly_local_optima: Vec<usize>,
    non_optimal: Vec<usize>,
    epsilon: f64,
    population: usize,
}

impl OptimaClassification {
    /// Plan indices within `epsilon` of the minimum performance, ascending.
    pub fn global_optima(&self) -> &[usize] {
        &self.global_optima
    }

    /// Local optima that are not global optima, ascending.
    pub fn strictly_local_optima(&self) -> &[usize] {
        &self.strictly_local_optima
    }

    /// Plans that are neither global nor local optima, ascending.
    pub fn non_optimal(&self) -> &[usize] {
        &self.non_optimal
    }

    /// Performance-equality tolerance the classification was computed under.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Number of plans classified (the measured count of the landscape).
    pub fn population(&self) -> usize {
        self.population
    }

    pub fn is_global(&self, index: usize) -> bool {
        self.global_optima.binary_search(&index).is_ok()
    }

    pub fn is_strictly_local(&self, index: usize) -> bool {
        self.strictly_local_optima.binary_search(&index).is_ok()
    }

    /// Sorted union of global and strictly local optima.
    pub fn optima_union(&self) -> Vec<usize> {
        let mut union =
            Vec::with_capacity(self.global_optima.len() + self.strictly_local_optima.len());
        let (mut g, mut l) = (0, 0);
        while g < self.global_optima.len() || l < self.strictly_local_optima.len() {
            match (
                self.global_optima.get(g),
                self.strictly_local_optima.get(l),
            ) {
                (Some(&a), Some(&b)) if a < b => {
                    union.push(a);
                    g += 1;
                }
                (Some(_), Some(&b)) => {
                    union.push(b);
                    l += 1;
                }
                (Some(&a), None) => {
                    union.push(a);
                    g += 1;
                }
                (None, Some(&b)) => {
                    union.push(b);
                    l += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        union
    }
}

/// Classifies every measured plan of the landscape.
///
/// A plan is a local optimum iff its performance is ≤ every measured
/// neighbor's performance + `epsilon`; global optima are within `epsilon` of
/// the minimum. Global optima are always local optima under this definition,
/// so the three reported sets partition the measured plans.
pub fn classify_optima(
    landscape: &EnvironmentLandscape,
    epsilon: f64,
) -> Result<OptimaClassification> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::Argument(format!(
            "epsilon must be a non-negative number, got {epsilon}"
        )));
    }
    if landscape.measured_count() == 0 {
        return Err(Error::Domain("empty landscape".into()));
    }
    let space = landscape.space();
    let min_perf = landscape
        .measured_values()
        .map(|(_, f)| f)
        .fold(f64::INFINITY, f64::min);

    let mut global_optima = Vec::new();
    let mut strictly_local_optima = Vec::new();
    let mut non_optimal = Vec::new();
    let mut digits = vec![0usize; space.option_count()];

    for (index, perf) in landscape.measured_values() {
        space.decode_into(index, &mut digits);
        let mut is_local = true;
        visit_neighbor_indices(space, &digits, index, |n| {
            if let Some(np) = landscape.performance(n) {
                if perf > np + epsilon {
                    is_local = false;
                    return false;
                }
            }
            true
        });
        if perf <= min_perf + epsilon {
            debug_assert!(is_local, "global optima are always local optima");
            global_optima.push(index);
        } else if is_local {
            strictly_local_optima.push(index);
        } else {
            non_optimal.push(index);
        }
    }

    Ok(OptimaClassification {
        global_optima,
        strictly_local_optima,
        non_optimal,
        epsilon,
        population: landscape.measured_count(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::space::{load_environment, LoadOptions, OptionDomain};

    fn plan(values: &[usize]) -> AdaptationPlan {
        AdaptationPlan::new(values.to_vec())
    }

    fn binary_space(n: usize) -> ConfigurationSpace {
        let options = (0..n)
            .map(|i| OptionDomain::new(format!("o{i}"), vec!["0".into(), "1".into()]).unwrap())
            .collect();
        ConfigurationSpace::new(options).unwrap()
    }

    fn landscape_from_values(space: ConfigurationSpace, values: Vec<f64>) -> EnvironmentLandscape {
        EnvironmentLandscape::new_complete("test", Arc::new(space), values).unwrap()
    }

    #[test]
    fn hamming_identity_is_zero() {
        assert_eq!(hamming_distance(&plan(&[0, 1, 2]), &plan(&[0, 1, 2])).unwrap(), 0);
    }

    #[test]
    fn hamming_counts_single_difference() {
        assert_eq!(hamming_distance(&plan(&[0, 1, 2]), &plan(&[0, 3, 2])).unwrap(), 1);
    }

    #[test]
    fn hamming_counts_all_differences() {
        assert_eq!(hamming_distance(&plan(&[0, 1]), &plan(&[1, 0])).unwrap(), 2);
    }

    #[test]
    fn hamming_rejects_mismatched_plans() {
        assert!(hamming_distance(&plan(&[0, 1]), &plan(&[0, 1, 2])).is_err());
    }

    #[test]
    fn binary_neighbors_flip_one_option() {
        let space = binary_space(3);
        let got = neighbors(&space, &plan(&[0, 0, 0])).unwrap();
        assert_eq!(got.len(), 3);
        let expect = [vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        for e in &expect {
            assert!(got.iter().any(|p| &p.values == e), "missing {e:?}");
        }
    }

    #[test]
    fn neighbor_cardinality_sums_domain_sizes() {
        let space = ConfigurationSpace::new(vec![
            OptionDomain::new("a", vec!["0".into(), "1".into()]).unwrap(),
            OptionDomain::new("b", vec!["x".into(), "y".into(), "z".into()]).unwrap(),
        ])
        .unwrap();
        let got = neighbors(&space, &plan(&[0, 0])).unwrap();
        assert_eq!(got.len(), 3);
        let expect = [vec![1, 0], vec![0, 1], vec![0, 2]];
        for e in &expect {
            assert!(got.iter().any(|p| &p.values == e), "missing {e:?}");
        }
    }

    #[test]
    fn classify_worked_four_plan_example() {
        // f(00)=0, f(01)=3, f(10)=2, f(11)=1 over two binary options.
        let land = landscape_from_values(binary_space(2), vec![0.0, 3.0, 2.0, 1.0]);
        let cls = classify_optima(&land, 0.0).unwrap();
        assert_eq!(cls.global_optima(), &[0]);
        assert_eq!(cls.strictly_local_optima(), &[3]);
        assert_eq!(cls.non_optimal(), &[1, 2]);
    }

    #[test]
    fn constant_landscape_is_all_global() {
        let land = landscape_from_values(binary_space(2), vec![5.0; 4]);
        let cls = classify_optima(&land, 0.0).unwrap();
        assert_eq!(cls.global_optima(), &[0, 1, 2, 3]);
        assert!(cls.strictly_local_optima().is_empty());
        assert!(cls.non_optimal().is_empty());
    }

    #[test]
    fn distance_to_plan_landscape_is_unimodal() {
        // f = Hamming distance to a designated plan g; brute-force over the
        // whole 3-binary-option space confirms a single optimum.
        let space = binary_space(3);
        let g = plan(&[1, 0, 1]);
        let g_index = space.plan_to_index(&g).unwrap();
        let values: Vec<f64> = space
            .plans()
            .map(|p| hamming_distance(&p, &g).unwrap() as f64)
            .collect();
        let land = landscape_from_values(space, values);
        let cls = classify_optima(&land, 0.0).unwrap();
        assert_eq!(cls.global_optima(), &[g_index]);
        assert!(cls.strictly_local_optima().is_empty());
        assert_eq!(cls.non_optimal().len(), 7);
    }

    #[test]
    fn partition_covers_the_whole_space() {
        let land = landscape_from_values(binary_space(3), vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0]);
        let cls = classify_optima(&land, 0.0).unwrap();
        let total = cls.global_optima().len()
            + cls.strictly_local_optima().len()
            + cls.non_optimal().len();
        assert_eq!(total, 8);
        assert_eq!(cls.population(), 8);
    }

    #[test]
    fn epsilon_grows_the_local_optima_sets() {
        let values = vec![0.0, 3.0, 2.0, 1.0];
        let land = landscape_from_values(binary_space(2), values);
        let tight = classify_optima(&land, 0.0).unwrap();
        let loose = classify_optima(&land, 3.0).unwrap();
        let tight_local = tight.optima_union();
        let loose_local = loose.optima_union();
        for i in tight_local {
            assert!(loose_local.contains(&i));
        }
        // With epsilon 3 every plan tolerates its neighbors.
        assert_eq!(loose_local.len(), 4);
    }

    #[test]
    fn empty_landscape_is_a_domain_error() {
        let space = Arc::new(binary_space(1));
        let land = EnvironmentLandscape::new_partial("e", space, &[]).unwrap();
        assert!(matches!(classify_optima(&land, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn negative_epsilon_is_an_argument_error() {
        let land = landscape_from_values(binary_space(1), vec![0.0, 1.0]);
        assert!(matches!(
            classify_optima(&land, -1.0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn partial_mode_restricts_neighborhoods_to_measured_plans() {
        // Measured plans of a 2-binary space: 00 -> 2.0, 01 -> 3.0, 11 -> 1.0.
        // 10 is unmeasured, so 00's only measured neighbor is 01.
        let text = "a,b,performance\n0,0,2.0\n0,1,3.0\n1,1,1.0\n";
        let opts = LoadOptions {
            partial: true,
            ..LoadOptions::default()
        };
        let land = load_environment("e", text.as_bytes(), &opts).unwrap();
        let cls = classify_optima(&land, 0.0).unwrap();
        assert_eq!(cls.global_optima(), &[3]);
        assert_eq!(cls.strictly_local_optima(), &[0]);
        assert_eq!(cls.non_optimal(), &[1]);
        assert_eq!(cls.population(), 3);
    }
}
