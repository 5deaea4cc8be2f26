//! Python extension module exposing the landscape-analysis types and
//! operations. Build with `cargo build -p planscape-py --release` and import
//! the produced shared library as `planscape_py` (see python/smoke_test.py).

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use planscape::crossenv;
use planscape::error::Error;
use planscape::metrics::{
    self, CorrelationLength, CorrelationLengthResult, LagCorrelation, ProjectionAggregate,
};
use planscape::neighborhood::{self, OptimaClassification};
use planscape::report::{run_study, EnvironmentInput, StudyConfig};
use planscape::space::{
    load_environment, load_environment_path, AdaptationPlan, EnvironmentLandscape, LoadOptions,
};
use planscape::stats;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn load_opts(
    perf_col: &str,
    agg: &str,
    delimiter: Option<&str>,
    ignore_cols: Vec<String>,
    partial: bool,
) -> PyResult<LoadOptions> {
    let delimiter = match delimiter {
        None => None,
        Some(s) if s.len() == 1 => Some(s.as_bytes()[0]),
        Some(s) => {
            return Err(PyValueError::new_err(format!(
                "delimiter must be one character, got {s:?}"
            )))
        }
    };
    Ok(LoadOptions {
        performance_column: perf_col.to_string(),
        aggregation: agg.parse().map_err(to_py_err)?,
        delimiter,
        ignore_columns: ignore_cols,
        partial,
    })
}

/// One environment's performance table over its configuration space.
#[pyclass(name = "Landscape")]
struct PyLandscape {
    inner: EnvironmentLandscape,
}

#[pymethods]
impl PyLandscape {
    /// Loads a delimiter-separated table from `path`.
    #[staticmethod]
    #[pyo3(signature = (path, id=None, perf_col="performance", agg="mean", delimiter=None, ignore_cols=vec![], partial=false))]
    fn load(
        path: PathBuf,
        id: Option<String>,
        perf_col: &str,
        agg: &str,
        delimiter: Option<&str>,
        ignore_cols: Vec<String>,
        partial: bool,
    ) -> PyResult<Self> {
        let id = id.unwrap_or_else(|| {
            path.file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("environment")
                .to_string()
        });
        let opts = load_opts(perf_col, agg, delimiter, ignore_cols, partial)?;
        let inner = load_environment_path(&id, &path, &opts, None).map_err(to_py_err)?;
        Ok(PyLandscape { inner })
    }

    /// Parses a table from text, mainly for tests and small experiments.
    #[staticmethod]
    #[pyo3(signature = (id, text, perf_col="performance", agg="mean", delimiter=None, ignore_cols=vec![], partial=false))]
    fn loads(
        id: &str,
        text: &str,
        perf_col: &str,
        agg: &str,
        delimiter: Option<&str>,
        ignore_cols: Vec<String>,
        partial: bool,
    ) -> PyResult<Self> {
        let opts = load_opts(perf_col, agg, delimiter, ignore_cols, partial)?;
        let inner = load_environment(id, text.as_bytes(), &opts).map_err(to_py_err)?;
        Ok(PyLandscape { inner })
    }

    #[getter]
    fn environment_id(&self) -> &str {
        self.inner.environment_id()
    }

    /// Total number of plans in the configuration space.
    #[getter]
    fn size(&self) -> usize {
        self.inner.space().size()
    }

    #[getter]
    fn measured_count(&self) -> usize {
        self.inner.measured_count()
    }

    #[getter]
    fn complete(&self) -> bool {
        self.inner.is_complete()
    }

    #[getter]
    fn option_names(&self) -> Vec<String> {
        self.inner
            .space()
            .options()
            .iter()
            .map(|o| o.name().to_string())
            .collect()
    }

    fn option_values(&self, name: &str) -> PyResult<Vec<String>> {
        let pos = self.inner.space().option_position(name).ok_or_else(|| {
            PyValueError::new_err(format!(
                "unknown option {name:?}; valid options: {:?}",
                self.option_names()
            ))
        })?;
        Ok(self.inner.space().options()[pos].values().to_vec())
    }

    /// Performance of plan `index`, or None when unmeasured.
    fn performance(&self, index: usize) -> Option<f64> {
        self.inner.performance(index)
    }

    fn plan_to_index(&self, plan: Vec<usize>) -> PyResult<usize> {
        self.inner
            .space()
            .plan_to_index(&AdaptationPlan::new(plan))
            .map_err(to_py_err)
    }

    fn index_to_plan(&self, index: usize) -> PyResult<Vec<usize>> {
        Ok(self
            .inner
            .space()
            .index_to_plan(index)
            .map_err(to_py_err)?
            .values)
    }

    fn plan_labels(&self, index: usize) -> PyResult<Vec<String>> {
        let plan = self.inner.space().index_to_plan(index).map_err(to_py_err)?;
        Ok(self
            .inner
            .space()
            .plan_labels(&plan)
            .map_err(to_py_err)?
            .iter()
            .map(|s| s.to_string())
            .collect())
    }

    /// All plans at Hamming distance 1 from `plan`, as value-index vectors.
    fn neighbors(&self, plan: Vec<usize>) -> PyResult<Vec<Vec<usize>>> {
        Ok(
            neighborhood::neighbors(self.inner.space(), &AdaptationPlan::new(plan))
                .map_err(to_py_err)?
                .into_iter()
                .map(|p| p.values)
                .collect(),
        )
    }

    /// Classifies every measured plan into global / strictly local /
    /// non-optimal under the given performance tolerance.
    #[pyo3(signature = (epsilon=0.0))]
    fn classify(&self, epsilon: f64) -> PyResult<PyOptima> {
        Ok(PyOptima {
            inner: neighborhood::classify_optima(&self.inner, epsilon).map_err(to_py_err)?,
        })
    }

    /// Shortest Hamming distance from every measured plan to the given
    /// global-optima set; None for unmeasured plans.
    fn distance_field(&self, optima: &PyOptima) -> PyResult<Vec<Option<usize>>> {
        let field =
            metrics::distance_field(&self.inner, optima.inner.global_optima()).map_err(to_py_err)?;
        Ok((0..self.inner.space().size())
            .map(|i| field.distance(i))
            .collect())
    }

    /// Fitness distance correlation; returns {rho, classification, points}.
    fn fdc<'py>(&self, py: Python<'py>, optima: &PyOptima) -> PyResult<Bound<'py, PyDict>> {
        let field =
            metrics::distance_field(&self.inner, optima.inner.global_optima()).map_err(to_py_err)?;
        let result = metrics::fdc(&self.inner, &field).map_err(to_py_err)?;
        let out = PyDict::new(py);
        out.set_item("rho", result.rho)?;
        out.set_item("classification", result.classification.as_str())?;
        out.set_item("points", result.p_points)?;
        Ok(out)
    }

    /// One seeded random walk; returns [(plan_index, performance), ...].
    fn random_walk(&self, length: usize, seed: u64) -> PyResult<Vec<(usize, f64)>> {
        Ok(metrics::random_walk(&self.inner, length, seed)
            .map_err(to_py_err)?
            .trace)
    }

    /// Repeated-walk correlation-length study.
    #[pyo3(signature = (length=50, repeats=50, seed=42))]
    fn correlation_length_study<'py>(
        &self,
        py: Python<'py>,
        length: usize,
        repeats: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let study = metrics::correlation_length_study(&self.inner, length, repeats, seed)
            .map_err(to_py_err)?;
        study_dict(py, &study)
    }

    /// d_local / d_others distance groups; returns a dict with both
    /// multisets and their summary statistics.
    fn distance_groups<'py>(
        &self,
        py: Python<'py>,
        optima: &PyOptima,
    ) -> PyResult<Bound<'py, PyDict>> {
        let field =
            metrics::distance_field(&self.inner, optima.inner.global_optima()).map_err(to_py_err)?;
        let groups =
            crossenv::distance_groups(&self.inner, &optima.inner, &field).map_err(to_py_err)?;
        let out = PyDict::new(py);
        out.set_item("d_local", groups.d_local.clone())?;
        out.set_item("d_others", groups.d_others.clone())?;
        out.set_item("local_mean_std", groups.local_stats())?;
        out.set_item("others_mean_std", groups.others_stats())?;
        Ok(out)
    }

    /// Projects the landscape onto two options; returns
    /// [(label_a, label_b, aggregate), ...] in row-major order.
    #[pyo3(signature = (x, y, agg="mean"))]
    fn project(&self, x: &str, y: &str, agg: &str) -> PyResult<Vec<(String, String, f64)>> {
        let aggregate: ProjectionAggregate = agg.parse().map_err(to_py_err)?;
        let grid = metrics::project(&self.inner, x, y, aggregate).map_err(to_py_err)?;
        Ok(grid
            .cells
            .iter()
            .map(|&(a, b, v)| (grid.values_a[a].clone(), grid.values_b[b].clone(), v))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Landscape(id={:?}, size={}, measured={})",
            self.inner.environment_id(),
            self.inner.space().size(),
            self.inner.measured_count()
        )
    }
}

/// Partition of measured plans into global optima, strictly local optima
/// and non-optimal plans.
#[pyclass(name = "Optima")]
struct PyOptima {
    inner: OptimaClassification,
}

#[pymethods]
impl PyOptima {
    #[getter]
    fn global_optima(&self) -> Vec<usize> {
        self.inner.global_optima().to_vec()
    }

    #[getter]
    fn strictly_local_optima(&self) -> Vec<usize> {
        self.inner.strictly_local_optima().to_vec()
    }

    #[getter]
    fn non_optimal(&self) -> Vec<usize> {
        self.inner.non_optimal().to_vec()
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon()
    }

    /// Number of plans classified.
    #[getter]
    fn population(&self) -> usize {
        self.inner.population()
    }

    /// 100 × (global + strictly local) / population.
    #[getter]
    fn modality_percent(&self) -> f64 {
        metrics::modality_percentage(&self.inner, self.inner.population())
    }

    fn __repr__(&self) -> String {
        format!(
            "Optima(global={}, strictly_local={}, non_optimal={})",
            self.inner.global_optima().len(),
            self.inner.strictly_local_optima().len(),
            self.inner.non_optimal().len()
        )
    }
}

fn study_dict<'py>(
    py: Python<'py>,
    study: &CorrelationLengthResult,
) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("mean_ell", study.mean_ell)?;
    out.set_item("std_ell", study.std_ell)?;
    out.set_item("degenerate_count", study.degenerate_count)?;
    out.set_item("repeats_used", study.used_count())?;
    let repeats: Vec<Bound<'py, PyDict>> = study
        .per_repeat
        .iter()
        .map(|(seed, outcome)| {
            let d = PyDict::new(py);
            d.set_item("seed", seed)?;
            match outcome {
                LagCorrelation::Measured { r, ell } => {
                    d.set_item("r1", *r)?;
                    d.set_item(
                        "ell",
                        match ell {
                            CorrelationLength::Finite(v) => *v,
                            CorrelationLength::Infinite => f64::INFINITY,
                        },
                    )?;
                }
                LagCorrelation::ConstantWalk => {
                    d.set_item("r1", py.None())?;
                    d.set_item("ell", py.None())?;
                }
                LagCorrelation::ZeroCorrelation => {
                    d.set_item("r1", 0.0)?;
                    d.set_item("ell", py.None())?;
                }
            }
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    out.set_item("per_repeat", repeats)?;
    Ok(out)
}

/// Number of option positions on which two plans differ.
#[pyfunction]
fn hamming_distance(a: Vec<usize>, b: Vec<usize>) -> PyResult<usize> {
    neighborhood::hamming_distance(&AdaptationPlan::new(a), &AdaptationPlan::new(b))
        .map_err(to_py_err)
}

/// A1/A2/A3 optima overlap for the environment change source -> target.
#[pyfunction]
fn optima_overlap<'py>(
    py: Python<'py>,
    source: &PyLandscape,
    source_optima: &PyOptima,
    target: &PyLandscape,
    target_optima: &PyOptima,
) -> PyResult<Bound<'py, PyDict>> {
    let overlap = crossenv::optima_overlap(
        &source.inner,
        &source_optima.inner,
        &target.inner,
        &target_optima.inner,
    )
    .map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("source", overlap.source_id)?;
    out.set_item("target", overlap.target_id)?;
    out.set_item("a1", overlap.a1)?;
    out.set_item("a1_witnesses", overlap.a1_witnesses)?;
    out.set_item("a2", overlap.a2)?;
    out.set_item("a2_witnesses", overlap.a2_witnesses)?;
    out.set_item("a3_percent", overlap.a3_percent)?;
    Ok(out)
}

/// Fisher's z-transformation, ½·ln((1+r)/(1−r)).
#[pyfunction]
fn fisher_z(r: f64) -> PyResult<f64> {
    stats::fisher_z(r).map_err(to_py_err)
}

fn correlation_test_dict<'py>(
    py: Python<'py>,
    t: &stats::CorrelationTestResult,
) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("r1", t.r1)?;
    out.set_item("r2", t.r2)?;
    out.set_item("n1", t.n1)?;
    out.set_item("n2", t.n2)?;
    out.set_item("z", t.z_stat)?;
    out.set_item("p", t.p_value)?;
    out.set_item("zou_interval", t.zou_interval)?;
    out.set_item("significant", t.significant)?;
    out.set_item("z_test_significant", t.z_test_significant)?;
    out.set_item("methods_agree", t.methods_agree)?;
    Ok(out)
}

/// Two-sample Fisher z-test with Zou's confidence interval.
#[pyfunction]
#[pyo3(signature = (r1, n1, r2, n2, alpha=0.05))]
fn correlation_diff_test<'py>(
    py: Python<'py>,
    r1: f64,
    n1: usize,
    r2: f64,
    n2: usize,
    alpha: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let t = stats::correlation_diff_test(r1, n1, r2, n2, alpha).map_err(to_py_err)?;
    correlation_test_dict(py, &t)
}

/// Compares two environments' per-repeat lag-1 walk autocorrelations.
#[pyfunction]
#[pyo3(signature = (r1s_a, r1s_b, walk_length, alpha=0.05))]
fn correlation_length_diff_test<'py>(
    py: Python<'py>,
    r1s_a: Vec<f64>,
    r1s_b: Vec<f64>,
    walk_length: usize,
    alpha: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let t = stats::correlation_length_diff_test(&r1s_a, &r1s_b, walk_length, alpha)
        .map_err(to_py_err)?;
    correlation_test_dict(py, &t)
}

/// Two-sided Wilcoxon rank-sum test with midranks and tie correction.
#[pyfunction]
#[pyo3(signature = (xs, ys, continuity=true))]
fn wilcoxon_rank_sum<'py>(
    py: Python<'py>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    continuity: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let t = stats::wilcoxon_rank_sum(&xs, &ys, continuity).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("u", t.u_stat)?;
    out.set_item("z", t.z_stat)?;
    out.set_item("p", t.p_value)?;
    out.set_item("n1", t.n1)?;
    out.set_item("n2", t.n2)?;
    out.set_item("tie_corrected", t.tie_corrected)?;
    out.set_item("small_sample", t.small_sample)?;
    Ok(out)
}

/// Report marker for a p-value: "◇", "*" or "".
#[pyfunction]
fn significance_marker(p: f64) -> PyResult<&'static str> {
    stats::significance_marker(p).map_err(to_py_err)
}

/// Runs the full study pipeline over `envs` = [(id, path), ...] and returns
/// (machine_report, human_summary) as strings.
#[pyfunction]
#[pyo3(signature = (envs, perf_col="performance", agg="mean", epsilon=0.0, walk_length=50,
                    repeats=50, seed=42, alpha=0.05, partial=false, delimiter=None,
                    ignore_cols=vec![], domains=None))]
#[allow(clippy::too_many_arguments)]
fn analyze(
    envs: Vec<(String, PathBuf)>,
    perf_col: &str,
    agg: &str,
    epsilon: f64,
    walk_length: usize,
    repeats: usize,
    seed: u64,
    alpha: f64,
    partial: bool,
    delimiter: Option<&str>,
    ignore_cols: Vec<String>,
    domains: Option<PathBuf>,
) -> PyResult<(String, String)> {
    let environments = envs
        .into_iter()
        .map(|(id, path)| EnvironmentInput { id, path })
        .collect();
    let mut config = StudyConfig::new(environments);
    config.load = load_opts(perf_col, agg, delimiter, ignore_cols, partial)?;
    config.domains_file = domains;
    config.epsilon = epsilon;
    config.walk_length = walk_length;
    config.repeats = repeats;
    config.seed = seed;
    config.alpha = alpha;
    let report = run_study(&config).map_err(to_py_err)?;
    Ok((report.to_machine_text(), report.to_summary_text()))
}

#[pymodule]
fn planscape_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLandscape>()?;
    m.add_class::<PyOptima>()?;
    m.add_function(wrap_pyfunction!(hamming_distance, m)?)?;
    m.add_function(wrap_pyfunction!(optima_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(fisher_z, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_diff_test, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_length_diff_test, m)?)?;
    m.add_function(wrap_pyfunction!(wilcoxon_rank_sum, m)?)?;
    m.add_function(wrap_pyfunction!(significance_marker, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    Ok(())
}
