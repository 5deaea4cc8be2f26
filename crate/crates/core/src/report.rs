//! Study orchestration and report serialization.
//!
//! [`run_study`] loads every environment over one shared configuration
//! space, computes the per-environment metrics, the pairwise statistical
//! comparisons, and the cross-environment optima overlap, and assembles a
//! [`StudyReport`]. Reports serialize to a flat, diffable `key = value`
//! document with a stable field order (byte-identical for identical inputs,
//! config and seed) and to a human-readable summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use crate::crossenv::{distance_groups, optima_overlap, DistanceGroups, OverlapResult};
use crate::error::{Error, Result};
use crate::metrics::{
    correlation_length_study, distance_field, fdc, modality_percentage, sub_seed,
    CorrelationLength, CorrelationLengthResult, FdcResult, LagCorrelation,
};
use crate::neighborhood::{classify_optima, OptimaClassification};
use crate::space::{
    build_landscape, infer_space, parse_domains_file, read_table_path, validate_completeness,
    ConfigurationSpace, LoadOptions,
};
use crate::stats::{
    correlation_diff_test, correlation_length_diff_test, significance_marker, wilcoxon_rank_sum,
    CorrelationTestResult, RankSumResult,
};

pub const DEFAULT_WALK_LENGTH: usize = 50;
pub const DEFAULT_REPEATS: usize = 50;
pub const DEFAULT_SEED: u64 = 42;

/// Method note embedded in every report for the correlation-length
/// comparison, which the underlying study protocol leaves open.
pub const ELL_TEST_METHOD: &str = "per-repeat lag-1 autocorrelations Fisher-transformed with \
     n = walk_length - 1; mean z per environment; per-side variance (1/(n-3))/repeats_used; \
     repeats with |r1| >= 1 excluded";

/// One environment input: an id plus the file holding its table.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentInput {
    pub id: String,
    pub path: PathBuf,
}

/// Full configuration of a study run.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub environments: Vec<EnvironmentInput>,
    pub load: LoadOptions,
    pub domains_file: Option<PathBuf>,
    pub epsilon: f64,
    pub walk_length: usize,
    pub repeats: usize,
    pub seed: u64,
    pub alpha: f64,
    /// Optional literature reference correlation lengths, echoed in reports.
    pub ell_baselines: Vec<(String, f64)>,
}

impl StudyConfig {
    pub fn new(environments: Vec<EnvironmentInput>) -> Self {
        StudyConfig {
            environments,
            load: LoadOptions::default(),
            domains_file: None,
            epsilon: 0.0,
            walk_length: DEFAULT_WALK_LENGTH,
            repeats: DEFAULT_REPEATS,
            seed: DEFAULT_SEED,
            alpha: crate::stats::DEFAULT_ALPHA,
            ell_baselines: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.environments.is_empty() {
            return Err(Error::Argument("at least one environment is required".into()));
        }
        for (i, env) in self.environments.iter().enumerate() {
            if env.id.is_empty()
                || !env
                    .id
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
            {
                return Err(Error::Argument(format!(
                    "environment id {:?} must be non-empty and use only [A-Za-z0-9_.-]",
                    env.id
                )));
            }
            if self.environments[..i].iter().any(|e| e.id == env.id) {
                return Err(Error::Argument(format!(
                    "duplicate environment id {:?}",
                    env.id
                )));
            }
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::Argument(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        if self.walk_length < 2 {
            return Err(Error::Argument(format!(
                "walk length must be at least 2, got {}",
                self.walk_length
            )));
        }
        if self.repeats < 1 {
            return Err(Error::Argument("repeats must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Argument(format!(
                "alpha must lie strictly between 0 and 1, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Deterministic per-environment walk seed: the master seed xored with a
/// 64-bit FNV-1a hash of the environment id, pushed through SplitMix64.
/// Stable under changes to the rest of the environment set.
pub fn environment_seed(master: u64, environment_id: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in environment_id.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    sub_seed(master ^ hash, 0)
}

/// Everything computed for one environment.
#[derive(Debug, Clone)]
pub struct EnvironmentReport {
    pub id: String,
    pub path: PathBuf,
    pub size: usize,
    pub measured_count: usize,
    pub row_count: usize,
    pub duplicate_rows: usize,
    pub classification: OptimaClassification,
    pub modality_percent: f64,
    pub fdc: FdcResult,
    pub walk_seed: u64,
    pub ell: CorrelationLengthResult,
    pub groups: DistanceGroups,
    /// Rank-sum comparison of d_local vs d_others; `None` when either group
    /// is empty ("not applicable").
    pub distance_test: Option<RankSumResult>,
}

/// A pairwise comparison between two environments.
#[derive(Debug, Clone)]
pub struct PairReport {
    pub a: String,
    pub b: String,
    pub fdc_test: CorrelationTestResult,
    pub ell_test: Option<CorrelationTestResult>,
    pub ell_note: Option<String>,
}

/// The complete study output.
#[derive(Debug, Clone)]
pub struct StudyReport {
    pub tool_version: String,
    pub config: StudyConfig,
    pub partial_mode: bool,
    pub space: Arc<ConfigurationSpace>,
    pub environments: Vec<EnvironmentReport>,
    pub pairwise: Vec<PairReport>,
    pub crossenv: Vec<OverlapResult>,
}

fn stage<T>(result: Result<T>, stage_name: &str, environment: &str) -> Result<T> {
    result.map_err(|e| e.in_stage(stage_name, environment))
}

/// Runs the full pipeline: load → classify → metrics → statistics →
/// cross-environment overlap.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let mut inputs = config.environments.clone();
    inputs.sort_by(|a, b| a.id.cmp(&b.id));

    // Load every table first so the space can be inferred from their union.
    let mut tables = Vec::with_capacity(inputs.len());
    for env in &inputs {
        tables.push(stage(
            read_table_path(&env.path, &config.load),
            "load",
            &env.id,
        )?);
    }
    let space = Arc::new(match &config.domains_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            ConfigurationSpace::new(parse_domains_file(&text)?)?
        }
        None => infer_space(&tables.iter().collect::<Vec<_>>())?,
    });

    let mut landscapes = Vec::with_capacity(inputs.len());
    for (env, table) in inputs.iter().zip(&tables) {
        landscapes.push(stage(
            build_landscape(&env.id, table, &space, &config.load),
            "load",
            &env.id,
        )?);
    }
    // The flag alone stamps the report: metrics computed under partial-mode
    // semantics are marked even when every plan happens to be measured.
    let partial_mode = config.load.partial || landscapes.iter().any(|l| !l.is_complete());

    let mut environments = Vec::with_capacity(inputs.len());
    let mut classifications: BTreeMap<String, OptimaClassification> = BTreeMap::new();
    for (env, landscape) in inputs.iter().zip(&landscapes) {
        let completeness = validate_completeness(landscape);
        let cls = stage(classify_optima(landscape, config.epsilon), "classify", &env.id)?;
        let field = stage(
            distance_field(landscape, cls.global_optima()),
            "distance-field",
            &env.id,
        )?;
        let fdc_result = stage(fdc(landscape, &field), "fdc", &env.id)?;
        let walk_seed = environment_seed(config.seed, &env.id);
        let ell = stage(
            correlation_length_study(landscape, config.walk_length, config.repeats, walk_seed),
            "correlation-length",
            &env.id,
        )?;
        let groups = stage(
            distance_groups(landscape, &cls, &field),
            "distance-groups",
            &env.id,
        )?;
        let distance_test = if groups.d_local.is_empty() || groups.d_others.is_empty() {
            None
        } else {
            Some(stage(
                wilcoxon_rank_sum(&groups.local_as_f64(), &groups.others_as_f64(), true),
                "distance-test",
                &env.id,
            )?)
        };
        let modality_percent = modality_percentage(&cls, landscape.measured_count());
        environments.push(EnvironmentReport {
            id: env.id.clone(),
            path: env.path.clone(),
            size: space.size(),
            measured_count: landscape.measured_count(),
            row_count: landscape.row_count(),
            duplicate_rows: completeness.duplicate_rows,
            classification: cls.clone(),
            modality_percent,
            fdc: fdc_result,
            walk_seed,
            ell,
            groups,
            distance_test,
        });
        classifications.insert(env.id.clone(), cls);
    }

    let mut pairwise = Vec::new();
    for i in 0..environments.len() {
        for j in (i + 1)..environments.len() {
            let (a, b) = (&environments[i], &environments[j]);
            let fdc_test = stage(
                correlation_diff_test(
                    a.fdc.rho,
                    a.fdc.p_points,
                    b.fdc.rho,
                    b.fdc.p_points,
                    config.alpha,
                ),
                "fdc-comparison",
                &format!("{}:{}", a.id, b.id),
            )?;
            let (ell_test, ell_note) = match correlation_length_diff_test(
                &a.ell.fisher_ready_r1s(),
                &b.ell.fisher_ready_r1s(),
                config.walk_length,
                config.alpha,
            ) {
                Ok(t) => (Some(t), None),
                Err(e) => (None, Some(e.to_string())),
            };
            pairwise.push(PairReport {
                a: a.id.clone(),
                b: b.id.clone(),
                fdc_test,
                ell_test,
                ell_note,
            });
        }
    }

    let mut crossenv = Vec::new();
    for source in &inputs {
        for target in &inputs {
            if source.id == target.id {
                continue;
            }
            let src_land = landscapes.iter().find(|l| l.environment_id() == source.id);
            let tgt_land = landscapes.iter().find(|l| l.environment_id() == target.id);
            let (src_land, tgt_land) = (src_land.unwrap(), tgt_land.unwrap());
            crossenv.push(stage(
                optima_overlap(
                    src_land,
                    &classifications[&source.id],
                    tgt_land,
                    &classifications[&target.id],
                ),
                "optima-overlap",
                &format!("{}->{}", source.id, target.id),
            )?);
        }
    }

    Ok(StudyReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        partial_mode,
        space,
        environments,
        pairwise,
        crossenv,
    })
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

fn fmt_indices(indices: &[usize]) -> String {
    let shown: Vec<String> = indices.iter().take(10).map(|i| i.to_string()).collect();
    shown.join(" ")
}

struct KeyValueDoc {
    text: String,
}

impl KeyValueDoc {
    fn new() -> Self {
        KeyValueDoc {
            text: String::new(),
        }
    }

    fn push(&mut self, key: &str, value: impl AsRef<str>) {
        let _ = writeln!(self.text, "{key} = {}", value.as_ref());
    }
}

impl StudyReport {
    /// Flat `key = value` document with a stable field order.
    pub fn to_machine_text(&self) -> String {
        let mut doc = KeyValueDoc::new();
        doc.push("report.format", "planscape/1");
        doc.push("tool.version", &self.tool_version);
        doc.push("config.seed", self.config.seed.to_string());
        doc.push("config.alpha", fmt_f64(self.config.alpha));
        doc.push("config.epsilon", fmt_f64(self.config.epsilon));
        doc.push("config.walk_length", self.config.walk_length.to_string());
        doc.push("config.repeats", self.config.repeats.to_string());
        doc.push("config.aggregation", self.config.load.aggregation.as_str());
        doc.push(
            "config.performance_column",
            &self.config.load.performance_column,
        );
        doc.push(
            "config.mode",
            if self.partial_mode { "partial" } else { "complete" },
        );
        doc.push("config.ell_comparison_method", ELL_TEST_METHOD);
        for (name, value) in &self.config.ell_baselines {
            doc.push(&format!("config.ell_baseline.{name}"), fmt_f64(*value));
        }
        let mut ids: Vec<&str> = self.environments.iter().map(|e| e.id.as_str()).collect();
        ids.sort_unstable();
        doc.push("config.environments", ids.join(","));
        for env in &self.environments {
            doc.push(
                &format!("config.environment.{}.path", env.id),
                env.path.display().to_string(),
            );
        }

        doc.push("space.options", self.space.option_count().to_string());
        doc.push("space.size", self.space.size().to_string());
        for (i, opt) in self.space.options().iter().enumerate() {
            doc.push(&format!("space.option.{i}.name"), opt.name());
            doc.push(
                &format!("space.option.{i}.values"),
                opt.values().join(","),
            );
        }

        for env in &self.environments {
            let k = |suffix: &str| format!("env.{}.{suffix}", env.id);
            doc.push(&k("size"), env.size.to_string());
            doc.push(&k("measured_count"), env.measured_count.to_string());
            doc.push(&k("rows"), env.row_count.to_string());
            doc.push(&k("duplicate_rows"), env.duplicate_rows.to_string());
            let cls = &env.classification;
            doc.push(
                &k("optima.global_count"),
                cls.global_optima().len().to_string(),
            );
            doc.push(
                &k("optima.strictly_local_count"),
                cls.strictly_local_optima().len().to_string(),
            );
            doc.push(
                &k("optima.non_optimal_count"),
                cls.non_optimal().len().to_string(),
            );
            doc.push(&k("optima.epsilon"), fmt_f64(cls.epsilon()));
            doc.push(&k("optima.modality_percent"), fmt_f64(env.modality_percent));
            doc.push(&k("fdc.rho"), fmt_f64(env.fdc.rho));
            doc.push(&k("fdc.classification"), env.fdc.classification.as_str());
            doc.push(&k("fdc.points"), env.fdc.p_points.to_string());
            doc.push(&k("walk.seed"), env.walk_seed.to_string());
            doc.push(&k("ell.mean"), fmt_f64(env.ell.mean_ell));
            doc.push(&k("ell.std"), fmt_f64(env.ell.std_ell));
            doc.push(&k("ell.repeats_used"), env.ell.used_count().to_string());
            doc.push(
                &k("ell.degenerate_count"),
                env.ell.degenerate_count.to_string(),
            );
            for (i, (seed, outcome)) in env.ell.per_repeat.iter().enumerate() {
                let key = k(&format!("ell.repeat.{i}"));
                let rendered = match outcome {
                    LagCorrelation::Measured { r, ell } => {
                        let ell_s = match ell {
                            CorrelationLength::Finite(v) => fmt_f64(*v),
                            CorrelationLength::Infinite => "inf".to_string(),
                        };
                        format!("seed={seed} r1={} ell={ell_s}", fmt_f64(*r))
                    }
                    LagCorrelation::ConstantWalk => {
                        format!("seed={seed} r1=degenerate ell=degenerate")
                    }
                    LagCorrelation::ZeroCorrelation => {
                        format!("seed={seed} r1=0 ell=degenerate")
                    }
                };
                doc.push(&key, rendered);
            }
            doc.push(
                &k("distance.local.count"),
                env.groups.d_local.len().to_string(),
            );
            if let Some((mean, std)) = env.groups.local_stats() {
                doc.push(&k("distance.local.mean"), fmt_f64(mean));
                doc.push(&k("distance.local.std"), fmt_f64(std));
            }
            doc.push(
                &k("distance.others.count"),
                env.groups.d_others.len().to_string(),
            );
            if let Some((mean, std)) = env.groups.others_stats() {
                doc.push(&k("distance.others.mean"), fmt_f64(mean));
                doc.push(&k("distance.others.std"), fmt_f64(std));
            }
            match &env.distance_test {
                None => doc.push(&k("distance.test.applicable"), "false"),
                Some(t) => {
                    doc.push(&k("distance.test.applicable"), "true");
                    doc.push(&k("distance.test.u"), fmt_f64(t.u_stat));
                    doc.push(&k("distance.test.z"), fmt_f64(t.z_stat));
                    doc.push(&k("distance.test.p"), fmt_f64(t.p_value));
                    doc.push(
                        &k("distance.test.marker"),
                        significance_marker(t.p_value).unwrap_or(""),
                    );
                    doc.push(
                        &k("distance.test.tie_corrected"),
                        t.tie_corrected.to_string(),
                    );
                    doc.push(&k("distance.test.small_sample"), t.small_sample.to_string());
                }
            }
        }

        for pair in &self.pairwise {
            let k = |suffix: &str| format!("pair.{}:{}.{suffix}", pair.a, pair.b);
            let t = &pair.fdc_test;
            doc.push(&k("fdc.r1"), fmt_f64(t.r1));
            doc.push(&k("fdc.r2"), fmt_f64(t.r2));
            doc.push(&k("fdc.z"), fmt_f64(t.z_stat));
            doc.push(&k("fdc.p"), fmt_f64(t.p_value));
            doc.push(&k("fdc.marker"), significance_marker(t.p_value).unwrap_or(""));
            doc.push(&k("fdc.zou_lower"), fmt_f64(t.zou_interval.0));
            doc.push(&k("fdc.zou_upper"), fmt_f64(t.zou_interval.1));
            doc.push(&k("fdc.significant"), t.significant.to_string());
            doc.push(
                &k("fdc.z_test_significant"),
                t.z_test_significant.to_string(),
            );
            doc.push(&k("fdc.methods_agree"), t.methods_agree.to_string());
            match &pair.ell_test {
                Some(t) => {
                    doc.push(&k("ell.applicable"), "true");
                    doc.push(&k("ell.r1"), fmt_f64(t.r1));
                    doc.push(&k("ell.r2"), fmt_f64(t.r2));
                    doc.push(&k("ell.repeats_used_a"), t.n1.to_string());
                    doc.push(&k("ell.repeats_used_b"), t.n2.to_string());
                    doc.push(&k("ell.z"), fmt_f64(t.z_stat));
                    doc.push(&k("ell.p"), fmt_f64(t.p_value));
                    doc.push(
                        &k("ell.marker"),
                        significance_marker(t.p_value).unwrap_or(""),
                    );
                    doc.push(&k("ell.zou_lower"), fmt_f64(t.zou_interval.0));
                    doc.push(&k("ell.zou_upper"), fmt_f64(t.zou_interval.1));
                    doc.push(&k("ell.significant"), t.significant.to_string());
                    doc.push(
                        &k("ell.z_test_significant"),
                        t.z_test_significant.to_string(),
                    );
                    doc.push(&k("ell.methods_agree"), t.methods_agree.to_string());
                }
                None => {
                    doc.push(&k("ell.applicable"), "false");
                    if let Some(note) = &pair.ell_note {
                        doc.push(&k("ell.note"), note);
                    }
                }
            }
        }

        for cross in &self.crossenv {
            let k = |suffix: &str| {
                format!("cross.{}->{}.{suffix}", cross.source_id, cross.target_id)
            };
            doc.push(&k("a1"), cross.a1.to_string());
            doc.push(&k("a1_witness_count"), cross.a1_witnesses.len().to_string());
            if !cross.a1_witnesses.is_empty() {
                doc.push(&k("a1_witnesses"), fmt_indices(&cross.a1_witnesses));
            }
            doc.push(&k("a2"), cross.a2.to_string());
            doc.push(&k("a2_witness_count"), cross.a2_witnesses.len().to_string());
            if !cross.a2_witnesses.is_empty() {
                doc.push(&k("a2_witnesses"), fmt_indices(&cross.a2_witnesses));
            }
            doc.push(&k("a3_percent"), fmt_f64(cross.a3_percent));
            doc.push(
                &k("source_optima"),
                cross.source_optima_count.to_string(),
            );
            doc.push(&k("shared_optima"), cross.shared_optima_count.to_string());
        }

        doc.text
    }

    /// Plain-text summary tables for terminals.
    pub fn to_summary_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Planning landscape study: {} environment(s), space size {} ({} options){}",
            self.environments.len(),
            self.space.size(),
            self.space.option_count(),
            if self.partial_mode { " [partial]" } else { "" }
        );
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<12} {:>9} {:>8} {:>8} {:>10} {:>9}  {:<15} {:>10} {:>10}",
            "environment",
            "measured",
            "global",
            "local",
            "modality%",
            "FDC",
            "class",
            "mean ell",
            "std ell"
        );
        for env in &self.environments {
            let _ = writeln!(
                out,
                "{:<12} {:>9} {:>8} {:>8} {:>10.4} {:>9.4}  {:<15} {:>10} {:>10}",
                env.id,
                env.measured_count,
                env.classification.global_optima().len(),
                env.classification.strictly_local_optima().len(),
                env.modality_percent,
                env.fdc.rho,
                env.fdc.classification.as_str(),
                trim_num(env.ell.mean_ell),
                trim_num(env.ell.std_ell),
            );
        }
        for (name, value) in &self.config.ell_baselines {
            let _ = writeln!(out, "{:<12} reference ell = {}", name, fmt_f64(*value));
        }

        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "Distance to closest global optimum (d_local vs d_others, rank-sum):"
        );
        let _ = writeln!(
            out,
            "{:<12} {:>16} {:>16} {:>12}",
            "environment", "d_local", "d_others", "p"
        );
        for env in &self.environments {
            let group = |stats: Option<(f64, f64)>, n: usize| match stats {
                Some((mean, std)) => format!("{:.2}±{:.2} (n={})", mean, std, n),
                None => "empty".to_string(),
            };
            let p = match &env.distance_test {
                Some(t) => format!(
                    "{}{}",
                    trim_num(t.p_value),
                    significance_marker(t.p_value).unwrap_or("")
                ),
                None => "n/a".to_string(),
            };
            let _ = writeln!(
                out,
                "{:<12} {:>16} {:>16} {:>12}",
                env.id,
                group(env.groups.local_stats(), env.groups.d_local.len()),
                group(env.groups.others_stats(), env.groups.d_others.len()),
                p
            );
        }

        if !self.pairwise.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "Pairwise comparisons (p-values at alpha = {}; * 1e-4 <= p < 0.05, ◇ p < 1e-4):",
                fmt_f64(self.config.alpha)
            );
            let _ = writeln!(out, "{:<16} {:>14} {:>14}", "pair", "FDC p", "ell p");
            for pair in &self.pairwise {
                let fdc_p = format!(
                    "{}{}",
                    trim_num(pair.fdc_test.p_value),
                    significance_marker(pair.fdc_test.p_value).unwrap_or("")
                );
                let ell_p = match &pair.ell_test {
                    Some(t) => format!(
                        "{}{}",
                        trim_num(t.p_value),
                        significance_marker(t.p_value).unwrap_or("")
                    ),
                    None => "n/a".to_string(),
                };
                let _ = writeln!(
                    out,
                    "{:<16} {:>14} {:>14}",
                    format!("{}:{}", pair.a, pair.b),
                    fdc_p,
                    ell_p
                );
            }
        }

        if !self.crossenv.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "Cross-environment optima overlap:");
            let _ = writeln!(out, "{:<16} {:>4} {:>4} {:>8}", "change", "A1", "A2", "A3");
            for cross in &self.crossenv {
                let _ = writeln!(
                    out,
                    "{:<16} {:>4} {:>4} {:>7.0}%",
                    format!("{}->{}", cross.source_id, cross.target_id),
                    if cross.a1 { "✓" } else { "✗" },
                    if cross.a2 { "✓" } else { "✗" },
                    cross.a3_percent
                );
            }
        }
        out
    }
}

fn trim_num(v: f64) -> String {
    if v.is_infinite() || v.is_nan() {
        fmt_f64(v)
    } else if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}
