//! The L2-SVM dual `g(alpha) = -alpha' K alpha` over the simplex, with
//! `K_{i,j} = y_i y_j k(x_i, x_j) + y_i y_j + delta_{i,j}/C`, served through
//! the [`ConcaveObjective`] contract.
//!
//! The objective keeps a tracked iterate with its full gradient vector and
//! objective value, updated incrementally after each solver step and rebuilt
//! from scratch every [`REBUILD_INTERVAL`] steps to bound drift.

use crate::io::SparseVector;
use crate::simplex::{
    clipped_quadratic_search, ConcaveObjective, SearchContext, SearchDirection, SimplexPoint,
    Step, StepKind,
};
use crate::svm::cache::RowCache;
use crate::svm::{KernelSpec, SvmError};
use std::cell::RefCell;
use std::sync::Arc;

/// Steps between full recomputations of the maintained gradient and value.
pub const REBUILD_INTERVAL: u32 = 1000;

/// Default cache capacity in kernel rows.
pub fn default_cache_rows(m: usize) -> usize {
    m.min(4096)
}

struct TrackState {
    point: SimplexPoint,
    gradient: Vec<f64>,
    value: f64,
    steps_since_rebuild: u32,
}

/// Elementary search kinds of the analytic SVM line search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvmSearch {
    Fw { ascent: usize },
    Swap { ascent: usize, descent: usize },
    /// Identical to [`SvmSearch::Swap`] for this quadratic objective; the
    /// second-order variant differs only in how the descent vertex is chosen.
    Swap2o { ascent: usize, descent: usize },
}

pub struct L2DualObjective {
    rows: Vec<SparseVector>,
    labels: Vec<f64>,
    c: f64,
    kernel: KernelSpec,
    cache: RefCell<RowCache>,
    track: RefCell<Option<TrackState>>,
}

impl L2DualObjective {
    pub fn new(
        rows: Vec<SparseVector>,
        labels: Vec<f64>,
        c: f64,
        kernel: KernelSpec,
    ) -> Result<Self, SvmError> {
        if rows.is_empty() || rows.len() != labels.len() {
            return Err(SvmError::InvalidProblem(
                "need one label per example and at least one example".into(),
            ));
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(SvmError::InvalidProblem(
                "labels must be +1 or -1".into(),
            ));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(SvmError::InvalidProblem("C must be positive".into()));
        }
        kernel.validate()?;
        let capacity = default_cache_rows(rows.len());
        Ok(Self {
            rows,
            labels,
            c,
            kernel,
            cache: RefCell::new(RowCache::new(capacity)),
            track: RefCell::new(None),
        })
    }

    /// Overrides the kernel-row cache capacity (0 disables caching).
    pub fn with_cache_rows(self, capacity: usize) -> Self {
        Self {
            cache: RefCell::new(RowCache::new(capacity)),
            ..self
        }
    }

    pub fn examples(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    fn compute_entry(&self, i: usize, j: usize) -> f64 {
        let k = self.kernel.eval(&self.rows[i], &self.rows[j]);
        let mut value = self.labels[i] * self.labels[j] * (k + 1.0);
        if i == j {
            value += 1.0 / self.c;
        }
        value
    }

    fn fill_row(&self, i: usize) -> Arc<Vec<f64>> {
        Arc::new(
            (0..self.rows.len())
                .map(|j| self.compute_entry(i, j))
                .collect(),
        )
    }

    fn fetch_row(&self, i: usize) -> Arc<Vec<f64>> {
        if let Some(row) = self.cache.borrow_mut().get(i) {
            return row;
        }
        let row = self.fill_row(i);
        self.cache.borrow_mut().insert(i, row.clone());
        row
    }

    /// `K_{i,j}`, served from a resident cache row when possible. Single
    /// entries are computed directly rather than filling a whole row.
    pub fn effective_entry(&self, i: usize, j: usize) -> f64 {
        let cache = self.cache.borrow();
        if let Some(row) = cache.peek(i) {
            return row[j];
        }
        if let Some(row) = cache.peek(j) {
            // K is assembled symmetrically, entry for entry.
            return row[i];
        }
        drop(cache);
        self.compute_entry(i, j)
    }

    /// Gradient and value recomputed from scratch, independent of (and
    /// without touching) the maintained state.
    pub fn compute_fresh(&self, point: &SimplexPoint) -> (Vec<f64>, f64) {
        let m = self.rows.len();
        let mut k_alpha = vec![0.0; m];
        for (j, w) in point.active() {
            let row = self.fetch_row(j);
            for (t, &r) in k_alpha.iter_mut().zip(row.iter()) {
                *t += w * r;
            }
        }
        let value = -point.active().map(|(i, w)| w * k_alpha[i]).sum::<f64>();
        let gradient = k_alpha.into_iter().map(|t| -2.0 * t).collect();
        (gradient, value)
    }

    /// The maintained `(gradient, value)` when `point` is the tracked
    /// iterate.
    pub fn maintained_state(&self, point: &SimplexPoint) -> Option<(Vec<f64>, f64)> {
        let track = self.track.borrow();
        track.as_ref().and_then(|state| {
            (state.point == *point).then(|| (state.gradient.clone(), state.value))
        })
    }

    fn install(&self, point: &SimplexPoint) -> (Vec<f64>, f64) {
        let (gradient, value) = self.compute_fresh(point);
        *self.track.borrow_mut() = Some(TrackState {
            point: point.clone(),
            gradient: gradient.clone(),
            value,
            steps_since_rebuild: 0,
        });
        (gradient, value)
    }

    /// Analytic line search over `lambda in [0, 1]` for the given search
    /// kind, with the improvement at the chosen step size. When the
    /// unconstrained maximizer is clipped, the improvement is re-evaluated
    /// directly along the direction.
    pub fn exact_line_search_and_gain(
        &self,
        point: &SimplexPoint,
        search: SvmSearch,
    ) -> Result<(f64, f64), SvmError> {
        let value = self.value(point);
        let (a, b) = match search {
            SvmSearch::Fw { ascent } => {
                let grad_i = self.grad_coord(point, ascent);
                let b = self.effective_entry(ascent, ascent) + grad_i - value;
                (grad_i - 2.0 * value, b)
            }
            SvmSearch::Swap { ascent, descent } | SvmSearch::Swap2o { ascent, descent } => {
                let grad_i = self.grad_coord(point, ascent);
                let grad_j = self.grad_coord(point, descent);
                let b = self.effective_entry(ascent, ascent)
                    - 2.0 * self.effective_entry(ascent, descent)
                    + self.effective_entry(descent, descent);
                (grad_i - grad_j, b)
            }
        };
        if b <= 0.0 {
            return Err(SvmError::InvalidProblem(
                "zero or negative curvature along the search direction; \
                 the effective matrix is not positive definite"
                    .into(),
            ));
        }
        Ok(clipped_quadratic_search(a, b))
    }

    /// Incremental update of the maintained gradient and value after `step`
    /// moved the tracked iterate to `after`.
    pub fn refresh_after_step(&self, step: &Step, after: &SimplexPoint) {
        let mut track = self.track.borrow_mut();
        let Some(state) = track.as_mut() else {
            drop(track);
            self.install(after);
            return;
        };
        let lambda = step.lambda;
        let g = state.value;
        match step.kind {
            StepKind::Fw { ascent } => {
                let row = self.fetch_row(ascent);
                let grad_i = state.gradient[ascent];
                let a = grad_i - 2.0 * g;
                let b = row[ascent] + grad_i - g;
                for (grad, &k) in state.gradient.iter_mut().zip(row.iter()) {
                    *grad = (1.0 - lambda) * *grad - 2.0 * lambda * k;
                }
                state.value += lambda * a - lambda * lambda * b;
            }
            StepKind::SwapAdd { ascent, descent } | StepKind::SwapDrop { ascent, descent } => {
                let row_a = self.fetch_row(ascent);
                let row_d = self.fetch_row(descent);
                let a = state.gradient[ascent] - state.gradient[descent];
                let b = row_a[ascent] - 2.0 * row_a[descent] + row_d[descent];
                for ((grad, &ka), &kd) in state
                    .gradient
                    .iter_mut()
                    .zip(row_a.iter())
                    .zip(row_d.iter())
                {
                    *grad -= 2.0 * lambda * (ka - kd);
                }
                state.value += lambda * a - lambda * lambda * b;
            }
            StepKind::Away { descent } | StepKind::AwayDrop { descent } => {
                let row = self.fetch_row(descent);
                let grad_j = state.gradient[descent];
                let a = 2.0 * g - grad_j;
                let b = -g + grad_j + row[descent];
                for (grad, &k) in state.gradient.iter_mut().zip(row.iter()) {
                    *grad = (1.0 + lambda) * *grad + 2.0 * lambda * k;
                }
                state.value += lambda * a - lambda * lambda * b;
            }
        }
        state.point = after.clone();
        state.steps_since_rebuild += 1;
        if state.steps_since_rebuild >= REBUILD_INTERVAL {
            drop(track);
            self.install(after);
        }
    }
}

impl ConcaveObjective for L2DualObjective {
    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn value(&self, point: &SimplexPoint) -> f64 {
        if let Some(state) = self.track.borrow().as_ref() {
            if state.point == *point {
                return state.value;
            }
        }
        self.install(point).1
    }

    fn grad_coord(&self, point: &SimplexPoint, i: usize) -> f64 {
        if let Some(state) = self.track.borrow().as_ref() {
            if state.point == *point {
                return state.gradient[i];
            }
        }
        // O(|active|) kernel entries for a single coordinate.
        let s: f64 = point
            .active()
            .map(|(j, w)| self.effective_entry(i, j) * w)
            .sum();
        -2.0 * s
    }

    fn hess_entry(&self, _point: &SimplexPoint, i: usize, j: usize) -> f64 {
        -2.0 * self.effective_entry(i, j)
    }

    fn gradient(&self, point: &SimplexPoint) -> Vec<f64> {
        if let Some(state) = self.track.borrow().as_ref() {
            if state.point == *point {
                return state.gradient.clone();
            }
        }
        self.install(point).0
    }

    fn exact_line_search(
        &self,
        point: &SimplexPoint,
        direction: &[(usize, f64)],
        lambda_max: f64,
    ) -> Option<(f64, f64)> {
        let a: f64 = direction
            .iter()
            .map(|&(i, d)| d * self.grad_coord(point, i))
            .sum();
        let mut dkd = 0.0;
        for &(i, di) in direction {
            for &(j, dj) in direction {
                dkd += di * dj * self.effective_entry(i, j);
            }
        }
        if a <= 0.0 {
            return Some((0.0, 0.0));
        }
        if dkd <= 0.0 {
            return Some((lambda_max, lambda_max * a - lambda_max * lambda_max * dkd));
        }
        let unconstrained = a / (2.0 * dkd);
        if unconstrained <= lambda_max {
            Some((unconstrained, a * a / (4.0 * dkd)))
        } else {
            Some((lambda_max, lambda_max * a - lambda_max * lambda_max * dkd))
        }
    }

    fn step_line_search(
        &self,
        _point: &SimplexPoint,
        direction: SearchDirection,
        ctx: &SearchContext,
    ) -> Option<(f64, f64)> {
        let g = ctx.value;
        let (a, b) = match direction {
            SearchDirection::Toward { ascent } => {
                let grad_i = ctx.gradient[ascent];
                (
                    grad_i - 2.0 * g,
                    self.effective_entry(ascent, ascent) + grad_i - g,
                )
            }
            SearchDirection::Swap { ascent, descent } => {
                let b = self.effective_entry(ascent, ascent)
                    - 2.0 * self.effective_entry(ascent, descent)
                    + self.effective_entry(descent, descent);
                (ctx.gradient[ascent] - ctx.gradient[descent], b)
            }
            SearchDirection::Away { descent } => {
                let grad_j = ctx.gradient[descent];
                (
                    2.0 * g - grad_j,
                    -g + grad_j + self.effective_entry(descent, descent),
                )
            }
        };
        if b <= 0.0 {
            // Degenerate curvature: defer to the generic search.
            return None;
        }
        Some(clipped_quadratic_search(a, b))
    }

    fn on_step_applied(&self, before: &SimplexPoint, step: &Step, after: &SimplexPoint) {
        let tracked_matches = self
            .track
            .borrow()
            .as_ref()
            .is_some_and(|state| state.point == *before);
        if tracked_matches {
            self.refresh_after_step(step, after);
        } else {
            self.install(after);
        }
    }
}
