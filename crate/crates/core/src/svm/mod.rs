//! Kernel L2-SVM training on top of the simplex solvers: the dual objective,
//! initialization, optional sampled ascent scans, binary and one-vs-one
//! training, and prediction.

mod cache;
mod kernel;
mod model;
mod objective;

pub use kernel::{default_sigma2, dot, squared_distance, KernelSpec};
pub use model::{OvoEnsemble, SupportVector, SvmModel, TrainedModel};
pub use objective::{default_cache_rows, L2DualObjective, SvmSearch, REBUILD_INTERVAL};

use crate::io::{Dataset, SparseVector};
use crate::simplex::{ascent_index, ConcaveObjective, SimplexPoint};
use crate::solvers::{restricted_solve, solve, SolveResult, SolverConfig, SolverError};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SvmError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("degenerate data: all training points are identical")]
    DegenerateData,
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Starting point for a solve: uniform weight on `min(p, m)` distinct
/// uniformly sampled coordinates, refined by a restricted solve on that face
/// to the given tolerance.
pub fn initialize(
    objective: &L2DualObjective,
    p: usize,
    tolerance: f64,
    max_iterations: u64,
    rng: &mut ChaCha8Rng,
) -> Result<SimplexPoint, SvmError> {
    let m = objective.examples();
    let count = p.clamp(1, m);
    let mut face = rand::seq::index::sample(rng, m, count).into_vec();
    face.sort_unstable();
    let start = SimplexPoint::uniform_on(m, &face)
        .expect("sampled face is non-empty and in range");
    Ok(restricted_solve(
        objective,
        &face,
        &start,
        tolerance,
        max_iterations,
    )?)
}

/// Best-of-sample ascent coordinate: `sample_size` uniform draws with
/// replacement, exact full scan when the sample covers the problem.
pub fn sample_ascent_index<O: ConcaveObjective + ?Sized>(
    objective: &O,
    point: &SimplexPoint,
    sample_size: usize,
    rng: &mut ChaCha8Rng,
) -> usize {
    let m = objective.dim();
    if sample_size >= m {
        return ascent_index(&objective.gradient(point));
    }
    let mut best = rng.random_range(0..m);
    let mut best_grad = objective.grad_coord(point, best);
    for _ in 1..sample_size.max(1) {
        let candidate = rng.random_range(0..m);
        let grad = objective.grad_coord(point, candidate);
        if grad > best_grad || (grad == best_grad && candidate < best) {
            best = candidate;
            best_grad = grad;
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub kernel: KernelSpec,
    pub c: f64,
    pub solver: SolverConfig,
    /// Number of points used to seed the starting face.
    pub init_points: usize,
    /// Kernel-row cache capacity; `None` uses `min(m, 4096)`.
    pub cache_rows: Option<usize>,
    /// Train one-vs-one subproblems on separate threads.
    pub parallel: bool,
}

impl TrainConfig {
    pub fn new(kernel: KernelSpec, c: f64, solver: SolverConfig) -> Self {
        Self {
            kernel,
            c,
            solver,
            init_points: 20,
            cache_rows: None,
            parallel: false,
        }
    }
}

/// Outcome of one binary subproblem.
#[derive(Debug, Clone)]
pub struct PairOutcome {
    pub positive: f64,
    pub negative: f64,
    pub result: SolveResult,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: TrainedModel,
    pub pairs: Vec<PairOutcome>,
}

impl TrainOutcome {
    pub fn total_iterations(&self) -> u64 {
        self.pairs.iter().map(|p| p.result.iterations).sum()
    }

    pub fn total_seconds(&self) -> f64 {
        self.pairs.iter().map(|p| p.seconds).sum()
    }

    pub fn max_gap(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.result.gap.dual_gap)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn converged(&self) -> bool {
        self.pairs
            .iter()
            .all(|p| p.result.termination == crate::solvers::Termination::Converged)
    }
}

struct BinaryProblem {
    rows: Vec<SparseVector>,
    labels: Vec<f64>,
    original_indices: Vec<usize>,
    positive: f64,
    negative: f64,
    seed: u64,
}

fn train_binary(
    problem: BinaryProblem,
    config: &TrainConfig,
) -> Result<(SvmModel, PairOutcome), SvmError> {
    let capacity = config
        .cache_rows
        .unwrap_or_else(|| default_cache_rows(problem.rows.len()));
    let objective = L2DualObjective::new(
        problem.rows.clone(),
        problem.labels.clone(),
        config.c,
        config.kernel,
    )?
    .with_cache_rows(capacity);
    let mut solver_config = config.solver.clone();
    solver_config.seed = problem.seed;
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    let started = Instant::now();
    let start = initialize(
        &objective,
        config.init_points,
        solver_config.tolerance,
        solver_config.max_iterations,
        &mut rng,
    )?;
    let result = solve(&objective, &start, &solver_config);
    let seconds = started.elapsed().as_secs_f64();

    let mut support = Vec::with_capacity(result.point.active_len());
    let mut support_indices = Vec::with_capacity(result.point.active_len());
    for (i, alpha) in result.point.active() {
        support.push(SupportVector {
            alpha,
            label: problem.labels[i],
            features: problem.rows[i].clone(),
        });
        support_indices.push(problem.original_indices[i]);
    }
    let model = SvmModel {
        kernel: config.kernel,
        c: config.c,
        positive_label: problem.positive,
        negative_label: problem.negative,
        support,
        support_indices,
    };
    let outcome = PairOutcome {
        positive: problem.positive,
        negative: problem.negative,
        result,
        seconds,
    };
    Ok((model, outcome))
}

/// Trains a classifier on a labelled dataset: a single binary model for two
/// classes, a one-vs-one ensemble otherwise. Within each class pair the
/// first-seen class maps to the internal +1 side.
pub fn train(data: &Dataset, config: &TrainConfig) -> Result<TrainOutcome, SvmError> {
    if data.is_empty() {
        return Err(SvmError::InvalidProblem("empty dataset".into()));
    }
    if !data.has_labels() {
        return Err(SvmError::InvalidProblem(
            "training data must be fully labelled".into(),
        ));
    }
    let classes = data.classes();
    if classes.len() < 2 {
        return Err(SvmError::InvalidProblem(
            "need at least two distinct labels".into(),
        ));
    }

    let mut problems = Vec::new();
    for i in 0..classes.len() {
        for j in (i + 1)..classes.len() {
            let positive = classes[i];
            let negative = classes[j];
            let mut rows = Vec::new();
            let mut labels = Vec::new();
            let mut original_indices = Vec::new();
            for (idx, (row, &label)) in data.rows.iter().zip(&data.labels).enumerate() {
                if label == positive || label == negative {
                    rows.push(row.clone());
                    labels.push(if label == positive { 1.0 } else { -1.0 });
                    original_indices.push(idx);
                }
            }
            let seed = config.solver.seed.wrapping_add(problems.len() as u64);
            problems.push(BinaryProblem {
                rows,
                labels,
                original_indices,
                positive,
                negative,
                seed,
            });
        }
    }

    let trained: Vec<Result<(SvmModel, PairOutcome), SvmError>> = if config.parallel
        && problems.len() > 1
    {
        std::thread::scope(|scope| {
            let handles: Vec<_> = problems
                .into_iter()
                .map(|problem| scope.spawn(move || train_binary(problem, config)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("training thread panicked"))
                .collect()
        })
    } else {
        problems
            .into_iter()
            .map(|problem| train_binary(problem, config))
            .collect()
    };

    let mut models = Vec::new();
    let mut pairs = Vec::new();
    for item in trained {
        let (model, outcome) = item?;
        models.push(model);
        pairs.push(outcome);
    }

    let model = if classes.len() == 2 {
        TrainedModel::Binary(models.into_iter().next().unwrap())
    } else {
        TrainedModel::Ovo(OvoEnsemble { classes, models })
    };
    Ok(TrainOutcome { model, pairs })
}
