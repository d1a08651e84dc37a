//! Python bindings: simplex solves over dense quadratics, SVM training and
//! prediction, and LIBSVM file loading.

use fwsvm_core::io;
use fwsvm_core::simplex::{QuadraticObjective, SimplexPoint};
use fwsvm_core::solvers::{solve, SolverConfig, Termination, Variant};
use fwsvm_core::svm::{train, KernelSpec, TrainConfig, TrainedModel};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn variant_from_name(name: &str) -> PyResult<Variant> {
    Variant::parse(name).ok_or_else(|| {
        PyValueError::new_err(format!(
            "unknown solver {name:?}; expected fw, mfw, swap, swap2o or fcfw"
        ))
    })
}

fn kernel_from_args(kernel: &str, sigma2: Option<f64>, gamma: Option<f64>) -> PyResult<KernelSpec> {
    match kernel {
        "rbf" => {
            let sigma2 = sigma2
                .ok_or_else(|| PyValueError::new_err("the rbf kernel needs sigma2"))?;
            Ok(KernelSpec::Rbf { sigma2 })
        }
        "poly2" => {
            let gamma =
                gamma.ok_or_else(|| PyValueError::new_err("the poly2 kernel needs gamma"))?;
            Ok(KernelSpec::Poly2 { gamma })
        }
        "linear" => Ok(KernelSpec::Linear),
        other => Err(PyValueError::new_err(format!(
            "unknown kernel {other:?}; expected rbf, poly2 or linear"
        ))),
    }
}

type SparseRows = Vec<Vec<(u32, f64)>>;

fn dense_to_sparse(row: &[f64]) -> Vec<(u32, f64)> {
    row.iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, &v)| (i as u32, v))
        .collect()
}

/// Result of a simplex solve.
#[pyclass(name = "SolveResult")]
struct PySolveResult {
    #[pyo3(get)]
    weights: Vec<f64>,
    #[pyo3(get)]
    objective: f64,
    #[pyo3(get)]
    dual_gap: f64,
    #[pyo3(get)]
    iterations: u64,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    step_counts: std::collections::HashMap<String, u64>,
}

#[pymethods]
impl PySolveResult {
    fn __repr__(&self) -> String {
        format!(
            "SolveResult(objective={}, dual_gap={}, iterations={}, converged={})",
            self.objective,
            self.dual_gap,
            self.iterations,
            if self.converged { "True" } else { "False" }
        )
    }
}

/// Maximizes `-alpha' Q alpha` (or `-1/2 alpha' Q alpha` with `half=True`)
/// over the unit simplex.
#[pyfunction]
#[pyo3(signature = (matrix, solver="swap", tolerance=1e-6, start=None, max_iterations=10_000_000, half=false, seed=0))]
fn solve_quadratic(
    matrix: Vec<Vec<f64>>,
    solver: &str,
    tolerance: f64,
    start: Option<Vec<f64>>,
    max_iterations: u64,
    half: bool,
    seed: u64,
) -> PyResult<PySolveResult> {
    let m = matrix.len();
    if m == 0 || matrix.iter().any(|row| row.len() != m) {
        return Err(PyValueError::new_err("matrix must be square and non-empty"));
    }
    let variant = variant_from_name(solver)?;
    let objective = if half {
        QuadraticObjective::half(matrix)
    } else {
        QuadraticObjective::new(matrix)
    };
    let start_point = match start {
        Some(weights) => SimplexPoint::new(&weights)
            .map_err(|e| PyValueError::new_err(format!("invalid start point: {e}")))?,
        None => SimplexPoint::vertex(m, 0).expect("m >= 1"),
    };
    let config = SolverConfig::new(variant)
        .with_tolerance(tolerance)
        .with_max_iterations(max_iterations)
        .with_seed(seed);
    let result = solve(&objective, &start_point, &config);
    let mut step_counts = std::collections::HashMap::new();
    step_counts.insert("fw".to_string(), result.counts.fw);
    step_counts.insert("swap_add".to_string(), result.counts.swap_add);
    step_counts.insert("swap_drop".to_string(), result.counts.swap_drop);
    step_counts.insert("away".to_string(), result.counts.away);
    step_counts.insert("away_drop".to_string(), result.counts.away_drop);
    Ok(PySolveResult {
        weights: result.point.to_dense(),
        objective: fwsvm_core::simplex::ConcaveObjective::value(&objective, &result.point),
        dual_gap: result.gap.dual_gap,
        iterations: result.iterations,
        converged: result.termination == Termination::Converged,
        step_counts,
    })
}

/// A trained classifier (binary or one-vs-one).
#[pyclass(name = "Model")]
struct PyModel {
    model: TrainedModel,
    #[pyo3(get)]
    iterations: u64,
    #[pyo3(get)]
    solve_seconds: f64,
    #[pyo3(get)]
    dual_gap: f64,
}

#[pymethods]
impl PyModel {
    /// Predicted label and decision value for one dense feature vector.
    fn predict(&self, x: Vec<f64>) -> (f64, f64) {
        self.model.predict(&dense_to_sparse(&x))
    }

    fn predict_batch(&self, xs: Vec<Vec<f64>>) -> Vec<f64> {
        xs.iter()
            .map(|x| self.model.predict(&dense_to_sparse(x)).0)
            .collect()
    }

    fn accuracy(&self, xs: Vec<Vec<f64>>, ys: Vec<f64>) -> PyResult<f64> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(PyValueError::new_err(
                "need one label per row and at least one row",
            ));
        }
        let correct = xs
            .iter()
            .zip(&ys)
            .filter(|(x, &y)| self.model.predict(&dense_to_sparse(x)).0 == y)
            .count();
        Ok(correct as f64 / xs.len() as f64)
    }

    #[getter]
    fn support_size(&self) -> usize {
        self.model.support_size()
    }

    fn save(&self, path: &str) -> PyResult<()> {
        io::save_model(&self.model, path)
            .map_err(|e| PyIOError::new_err(format!("saving model: {e}")))
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<PyModel> {
        let model =
            io::load_model(path).map_err(|e| PyIOError::new_err(format!("loading model: {e}")))?;
        Ok(PyModel {
            model,
            iterations: 0,
            solve_seconds: 0.0,
            dual_gap: f64::NAN,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(support_size={}, dual_gap={})",
            self.model.support_size(),
            self.dual_gap
        )
    }
}

/// Trains a kernel L2-SVM on dense rows.
#[pyfunction]
#[pyo3(signature = (xs, ys, kernel="rbf", sigma2=None, gamma=None, c=1.0, solver="swap", tolerance=1e-6, init_points=20, seed=0, sample=None, parallel=false))]
#[allow(clippy::too_many_arguments)]
fn train_svm(
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
    kernel: &str,
    sigma2: Option<f64>,
    gamma: Option<f64>,
    c: f64,
    solver: &str,
    tolerance: f64,
    init_points: usize,
    seed: u64,
    sample: Option<usize>,
    parallel: bool,
) -> PyResult<PyModel> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(PyValueError::new_err(
            "need one label per row and at least one row",
        ));
    }
    let rows: Vec<Vec<(u32, f64)>> = xs.iter().map(|x| dense_to_sparse(x)).collect();
    let n_features = xs.iter().map(|x| x.len()).max().unwrap_or(0);
    let data = io::Dataset {
        rows,
        labels: ys,
        n_features,
    };
    let kernel = resolve_kernel_auto(kernel, sigma2, gamma, &data, seed)?;
    let variant = variant_from_name(solver)?;
    let mut solver_config = SolverConfig::new(variant)
        .with_tolerance(tolerance)
        .with_seed(seed);
    solver_config.ascent_sample = sample;
    let mut config = TrainConfig::new(kernel, c, solver_config);
    config.init_points = init_points;
    config.parallel = parallel;
    let outcome =
        train(&data, &config).map_err(|e| PyValueError::new_err(format!("training: {e}")))?;
    Ok(PyModel {
        iterations: outcome.total_iterations(),
        solve_seconds: outcome.total_seconds(),
        dual_gap: outcome.max_gap(),
        model: outcome.model,
    })
}

/// `sigma2=None`/`gamma=None` fall back to the mean-squared-distance
/// heuristic over the training rows.
fn resolve_kernel_auto(
    kernel: &str,
    sigma2: Option<f64>,
    gamma: Option<f64>,
    data: &io::Dataset,
    seed: u64,
) -> PyResult<KernelSpec> {
    use rand::SeedableRng;
    let auto = || -> PyResult<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        fwsvm_core::svm::default_sigma2(&data.rows, &mut rng)
            .map_err(|e| PyValueError::new_err(format!("scale heuristic: {e}")))
    };
    match kernel {
        "rbf" => Ok(KernelSpec::Rbf {
            sigma2: match sigma2 {
                Some(v) => v,
                None => auto()?,
            },
        }),
        "poly2" => Ok(KernelSpec::Poly2 {
            gamma: match gamma {
                Some(v) => v,
                None => 1.0 / auto()?,
            },
        }),
        _ => kernel_from_args(kernel, sigma2, gamma),
    }
}

/// Loads a LIBSVM file as `(rows, labels)` where each row is a list of
/// `(index, value)` pairs with 0-based indices.
#[pyfunction]
fn load_libsvm(path: &str) -> PyResult<(SparseRows, Vec<f64>)> {
    let data =
        io::load_libsvm(path).map_err(|e| PyIOError::new_err(format!("loading {path}: {e}")))?;
    Ok((data.rows, data.labels))
}

/// Loads a LIBSVM file as dense rows.
#[pyfunction]
fn load_libsvm_dense(path: &str) -> PyResult<(Vec<Vec<f64>>, Vec<f64>)> {
    let data =
        io::load_libsvm(path).map_err(|e| PyIOError::new_err(format!("loading {path}: {e}")))?;
    let dense = data
        .rows
        .iter()
        .map(|row| {
            let mut out = vec![0.0; data.n_features];
            for &(i, v) in row {
                out[i as usize] = v;
            }
            out
        })
        .collect();
    Ok((dense, data.labels))
}

#[pymodule]
fn fwsvm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(solve_quadratic, m)?)?;
    m.add_function(wrap_pyfunction!(train_svm, m)?)?;
    m.add_function(wrap_pyfunction!(load_libsvm, m)?)?;
    m.add_function(wrap_pyfunction!(load_libsvm_dense, m)?)?;
    m.add_class::<PySolveResult>()?;
    m.add_class::<PyModel>()?;
    Ok(())
}
