//! Statistical machinery for interpreting metric differences: Fisher's
//! transformation, the two-sample correlation z-test with Zou's confidence
//! interval, the Wilcoxon rank-sum test with tie correction, and the
//! significance markers used in reports.

mod normal;

pub use normal::{standard_normal_cdf, standard_normal_quantile, standard_normal_sf, two_sided_p};

use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Fisher's z-transformation, z = ½·ln((1+r)/(1−r)), for |r| < 1.
pub fn fisher_z(r: f64) -> Result<f64> {
    if r.is_nan() || r.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "Fisher transformation needs |r| < 1, got {r}"
        )));
    }
    Ok(0.5 * ((1.0 + r) / (1.0 - r)).ln())
}

/// Two-sample comparison of correlation coefficients.
///
/// Carries both decision routes: the Fisher z-test p-value and Zou's
/// confidence interval for r1 − r2. `significant` is the interval verdict
/// (0 outside the interval); `z_test_significant` is p < alpha;
/// `methods_agree` flags any disagreement between the two.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTestResult {
    pub r1: f64,
    pub r2: f64,
    pub n1: usize,
    pub n2: usize,
    pub alpha: f64,
    pub z_stat: f64,
    pub p_value: f64,
    pub zou_interval: (f64, f64),
    pub significant: bool,
    pub z_test_significant: bool,
    pub methods_agree: bool,
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Argument(format!(
            "alpha must lie strictly between 0 and 1, got {alpha}"
        )));
    }
    Ok(())
}

/// One side of a two-sample comparison on the Fisher-z scale.
struct FisherSide {
    r: f64,
    z: f64,
    se: f64,
    n: usize,
}

fn assemble_correlation_test(a: FisherSide, b: FisherSide, alpha: f64) -> CorrelationTestResult {
    let z_stat = (a.z - b.z) / (a.se * a.se + b.se * b.se).sqrt();
    let p_value = two_sided_p(z_stat);
    let q = standard_normal_quantile(1.0 - alpha / 2.0);
    let l1 = (a.z - q * a.se).tanh();
    let u1 = (a.z + q * a.se).tanh();
    let l2 = (b.z - q * b.se).tanh();
    let u2 = (b.z + q * b.se).tanh();
    let diff = a.r - b.r;
    let lower = diff - ((a.r - l1).powi(2) + (u2 - b.r).powi(2)).sqrt();
    let upper = diff + ((u1 - a.r).powi(2) + (b.r - l2).powi(2)).sqrt();
    let significant = lower > 0.0 || upper < 0.0;
    let z_test_significant = p_value < alpha;
    CorrelationTestResult {
        r1: a.r,
        r2: b.r,
        n1: a.n,
        n2: b.n,
        alpha,
        z_stat,
        p_value,
        zou_interval: (lower, upper),
        significant,
        z_test_significant,
        methods_agree: significant == z_test_significant,
    }
}

/// Compares two independent Pearson correlations observed on n1 and n2
/// points. z = (z1 − z2) / √(1/(n1−3) + 1/(n2−3)) with Fisher-transformed
/// correlations; the interval follows Zou's construction.
pub fn correlation_diff_test(
    r1: f64,
    n1: usize,
    r2: f64,
    n2: usize,
    alpha: f64,
) -> Result<CorrelationTestResult> {
    validate_alpha(alpha)?;
    if n1 < 4 || n2 < 4 {
        return Err(Error::Domain(format!(
            "correlation comparison needs at least 4 points per side, got {n1} and {n2}"
        )));
    }
    let a = FisherSide {
        r: r1,
        z: fisher_z(r1)?,
        se: (1.0 / (n1 as f64 - 3.0)).sqrt(),
        n: n1,
    };
    let b = FisherSide {
        r: r2,
        z: fisher_z(r2)?,
        se: (1.0 / (n2 as f64 - 3.0)).sqrt(),
        n: n2,
    };
    Ok(assemble_correlation_test(a, b, alpha))
}

/// Compares the lag-1 walk autocorrelations of two environments.
///
/// Each repeat's r is Fisher-transformed with effective sample size
/// n = walk_length − 1 (the number of lag-1 pairs); the per-environment
/// statistic is the mean of the per-repeat z values with variance
/// (1/(n−3))/repeats. The reported r1/r2 are the back-transformed mean z
/// values and n1/n2 the repeats used per side.
pub fn correlation_length_diff_test(
    r1s_a: &[f64],
    r1s_b: &[f64],
    walk_length: usize,
    alpha: f64,
) -> Result<CorrelationTestResult> {
    validate_alpha(alpha)?;
    if walk_length < 5 {
        return Err(Error::Argument(format!(
            "walk length {walk_length} leaves fewer than 4 lag-1 pairs; cannot Fisher-transform"
        )));
    }
    let mean_z = |rs: &[f64]| -> Result<(f64, usize)> {
        let mut sum = 0.0;
        let mut used = 0usize;
        for &r in rs {
            if r.abs() < 1.0 {
                sum += fisher_z(r)?;
                used += 1;
            }
        }
        if used == 0 {
            return Err(Error::DegenerateLandscape(
                "no walk repeat produced a usable lag-1 autocorrelation".into(),
            ));
        }
        Ok((sum / used as f64, used))
    };
    let (z1, m1) = mean_z(r1s_a)?;
    let (z2, m2) = mean_z(r1s_b)?;
    let n = walk_length as f64 - 1.0;
    let a = FisherSide {
        r: z1.tanh(),
        z: z1,
        se: (1.0 / (n - 3.0) / m1 as f64).sqrt(),
        n: m1,
    };
    let b = FisherSide {
        r: z2.tanh(),
        z: z2,
        se: (1.0 / (n - 3.0) / m2 as f64).sqrt(),
        n: m2,
    };
    Ok(assemble_correlation_test(a, b, alpha))
}

/// Two-sided Wilcoxon rank-sum (Mann-Whitney U) result under the normal
/// approximation with midranks and tie-corrected variance.
#[derive(Debug, Clone, PartialEq)]
pub struct RankSumResult {
    /// U statistic of the first sample, in [0, n1·n2].
    pub u_stat: f64,
    pub z_stat: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
    /// True when tied observations occurred and the variance was corrected.
    pub tie_corrected: bool,
    /// True when either sample has fewer than 3 observations and the normal
    /// approximation is unreliable.
    pub small_sample: bool,
}

/// Non-paired two-sided Wilcoxon rank-sum test.
pub fn wilcoxon_rank_sum(xs: &[f64], ys: &[f64], continuity: bool) -> Result<RankSumResult> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Domain(
            "rank-sum test needs at least one observation per sample".into(),
        ));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Argument(
            "rank-sum samples must be finite numbers".into(),
        ));
    }
    let n1 = xs.len();
    let n2 = ys.len();
    let n = n1 + n2;

    let mut order: Vec<usize> = (0..n).collect();
    let value = |i: usize| if i < n1 { xs[i] } else { ys[i - n1] };
    order.sort_by(|&a, &b| value(a).partial_cmp(&value(b)).expect("finite values"));

    // Midranks and the tie-correction term Σ (t³ − t).
    let mut ranks = vec![0.0f64; n];
    let mut tie_term = 0.0f64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && value(order[j]) == value(order[i]) {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for k in i..j {
            ranks[order[k]] = rank;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }

    let r1: f64 = ranks[..n1].iter().sum();
    let u_stat = r1 - (n1 * (n1 + 1)) as f64 / 2.0;
    let mu = (n1 * n2) as f64 / 2.0;
    let nf = n as f64;
    let variance =
        (n1 * n2) as f64 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));

    let (z_stat, p_value) = if variance <= 0.0 {
        (0.0, 1.0) // every observation tied
    } else {
        let dev = u_stat - mu;
        let magnitude = if continuity {
            (dev.abs() - 0.5).max(0.0)
        } else {
            dev.abs()
        };
        let z = dev.signum() * magnitude / variance.sqrt();
        (z, two_sided_p(z))
    };

    Ok(RankSumResult {
        u_stat,
        z_stat,
        p_value,
        n1,
        n2,
        tie_corrected: tie_term > 0.0,
        small_sample: n1 < 3 || n2 < 3,
    })
}

/// Report marker for a p-value: `◇` when p < 1e-4, `*` when 1e-4 ≤ p < 0.05,
/// empty otherwise.
pub fn significance_marker(p: f64) -> Result<&'static str> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "p-value must lie in [0, 1], got {p}"
        )));
    }
    Ok(if p < 1e-4 {
        "◇"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fisher_z_at_zero_and_half() {
        assert_eq!(fisher_z(0.0).unwrap(), 0.0);
        // ½·ln 3
        assert!((fisher_z(0.5).unwrap() - 0.5493061443340549).abs() < 1e-12);
    }

    #[test]
    fn fisher_z_is_odd_and_inverts_tanh() {
        for i in 0..100 {
            let r = -0.99 + 0.02 * i as f64;
            let z = fisher_z(r).unwrap();
            assert!((fisher_z(-r).unwrap() + z).abs() < 1e-12);
            assert!((z.tanh() - r).abs() < 1e-12);
        }
    }

    #[test]
    fn fisher_z_rejects_unit_correlations() {
        assert!(fisher_z(1.0).is_err());
        assert!(fisher_z(-1.0).is_err());
        assert!(fisher_z(f64::NAN).is_err());
    }

    #[test]
    fn equal_correlations_are_indistinguishable() {
        let t = correlation_diff_test(0.5, 100, 0.5, 100, 0.05).unwrap();
        assert_eq!(t.z_stat, 0.0);
        assert_eq!(t.p_value, 1.0);
        assert!(!t.significant);
        assert!(t.methods_agree);
        // Zou interval symmetric about 0 (scipy-derived bounds).
        assert!((t.zou_interval.0 + 0.21137385569276412).abs() < 1e-6);
        assert!((t.zou_interval.1 - 0.21137385569276412).abs() < 1e-6);
    }

    #[test]
    fn well_separated_correlations_are_significant() {
        // scipy: z = 9.554067499514105, p = 1.247e-21.
        let t = correlation_diff_test(0.9, 100, 0.1, 100, 0.05).unwrap();
        assert!((t.z_stat - 9.554067499514105).abs() < 1e-9);
        assert!(t.p_value < 0.0001);
        assert!(t.significant && t.z_test_significant);
        assert!((t.zou_interval.0 - 0.6039778558534248).abs() < 1e-6);
        assert!((t.zou_interval.1 - 1.0008691374522265).abs() < 1e-6);
    }

    #[test]
    fn swapping_sides_negates_z_and_reflects_the_interval() {
        let a = correlation_diff_test(0.7, 50, 0.2, 80, 0.05).unwrap();
        let b = correlation_diff_test(0.2, 80, 0.7, 50, 0.05).unwrap();
        assert!((a.z_stat + b.z_stat).abs() < 1e-12);
        assert!((a.p_value - b.p_value).abs() < 1e-12);
        assert!((a.zou_interval.0 + b.zou_interval.1).abs() < 1e-12);
        assert!((a.zou_interval.1 + b.zou_interval.0).abs() < 1e-12);
    }

    #[test]
    fn zou_interval_contains_the_point_estimate() {
        let t = correlation_diff_test(0.63, 40, -0.22, 55, 0.05).unwrap();
        let diff = t.r1 - t.r2;
        assert!(t.zou_interval.0 <= diff && diff <= t.zou_interval.1);
    }

    #[test]
    fn correlation_test_input_validation() {
        assert!(correlation_diff_test(0.5, 3, 0.5, 100, 0.05).is_err());
        assert!(correlation_diff_test(1.0, 10, 0.5, 10, 0.05).is_err());
        assert!(correlation_diff_test(0.5, 10, 0.5, 10, 0.0).is_err());
        assert!(correlation_diff_test(0.5, 10, 0.5, 10, 1.0).is_err());
    }

    #[test]
    fn correlation_length_test_on_identical_sides_is_flat() {
        let rs = vec![0.5, 0.6, 0.55];
        let t = correlation_length_diff_test(&rs, &rs, 50, 0.05).unwrap();
        assert_eq!(t.z_stat, 0.0);
        assert_eq!(t.p_value, 1.0);
        assert_eq!((t.n1, t.n2), (3, 3));
    }

    #[test]
    fn correlation_length_test_detects_separated_sides() {
        let a = vec![0.9; 50];
        let b = vec![0.1; 50];
        let t = correlation_length_diff_test(&a, &b, 50, 0.05).unwrap();
        assert!(t.p_value < 1e-4);
        assert!(t.significant);
        assert!((t.r1 - 0.9).abs() < 1e-12);
    }

    #[test]
    fn correlation_length_test_ignores_unit_repeats() {
        let a = vec![0.5, 1.0, -1.0, 0.5];
        let b = vec![0.5, 0.5];
        let t = correlation_length_diff_test(&a, &b, 50, 0.05).unwrap();
        assert_eq!(t.n1, 2);
        assert!(correlation_length_diff_test(&[1.0], &b, 50, 0.05).is_err());
        assert!(correlation_length_diff_test(&a, &b, 4, 0.05).is_err());
    }

    #[test]
    fn rank_sum_identical_samples() {
        let t = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], true).unwrap();
        assert_eq!(t.z_stat, 0.0);
        assert_eq!(t.p_value, 1.0);
        assert!(t.tie_corrected);
    }

    #[test]
    fn rank_sum_fully_separated_samples() {
        // scipy: U = 0, z = -2.5067182457620487, p = 0.012185780355344813.
        let t = wilcoxon_rank_sum(&[1.0, 2.0, 3.0, 4.0, 5.0], &[6.0, 7.0, 8.0, 9.0, 10.0], true)
            .unwrap();
        assert_eq!(t.u_stat, 0.0);
        assert!((t.z_stat + 2.5067182457620487).abs() < 1e-9);
        assert!((t.p_value - 0.012185780355344813).abs() < 1e-7);
        assert!(t.p_value < 0.05);
        assert!(!t.tie_corrected);
    }

    #[test]
    fn rank_sum_is_symmetric_in_argument_order() {
        let xs = [1.0, 3.0, 3.0, 7.0];
        let ys = [2.0, 3.0, 9.0, 9.0, 4.0];
        let a = wilcoxon_rank_sum(&xs, &ys, true).unwrap();
        let b = wilcoxon_rank_sum(&ys, &xs, true).unwrap();
        assert_eq!(a.p_value, b.p_value);
        assert_eq!(a.z_stat, -b.z_stat);
        assert_eq!(a.u_stat + b.u_stat, (xs.len() * ys.len()) as f64);
    }

    #[test]
    fn rank_sum_all_tied_data_has_p_one() {
        let t = wilcoxon_rank_sum(&[2.0; 5], &[2.0; 7], true).unwrap();
        assert_eq!(t.p_value, 1.0);
        assert!(t.tie_corrected);
    }

    #[test]
    fn rank_sum_flags_small_samples_and_rejects_empty_ones() {
        assert!(wilcoxon_rank_sum(&[], &[1.0], true).is_err());
        assert!(wilcoxon_rank_sum(&[1.0], &[], true).is_err());
        let t = wilcoxon_rank_sum(&[1.0, 2.0], &[5.0, 6.0, 7.0], true).unwrap();
        assert!(t.small_sample);
    }

    #[test]
    fn markers_follow_the_reporting_bands() {
        assert_eq!(significance_marker(0.5).unwrap(), "");
        assert_eq!(significance_marker(0.05).unwrap(), "");
        assert_eq!(significance_marker(0.01).unwrap(), "*");
        assert_eq!(significance_marker(1e-4).unwrap(), "*");
        assert_eq!(significance_marker(1e-5).unwrap(), "◇");
        assert_eq!(significance_marker(0.0).unwrap(), "◇");
        assert_eq!(significance_marker(1.0).unwrap(), "");
        assert!(significance_marker(-0.1).is_err());
        assert!(significance_marker(1.1).is_err());
        assert!(significance_marker(f64::NAN).is_err());
    }
}
