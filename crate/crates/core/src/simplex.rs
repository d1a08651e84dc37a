//! Feasible points on the unit simplex, optimality measures and the three
//! elementary step updates (toward, swap, away) shared by every solver.

use std::collections::BTreeMap;
use thiserror::Error;

/// Weights below this threshold are treated as zero and removed from the
/// active set after a step.
pub const WEIGHT_CLIP: f64 = 1e-14;

/// Absolute tolerance on `|sum(weights) - 1|` accepted by [`SimplexPoint::new`].
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Slack allowed when checking a step size against its feasible bound.
const STEP_RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplexError {
    #[error("negative weight {value} at coordinate {index}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("active set is empty")]
    EmptyActiveSet,
    #[error("coordinate {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("step size {lambda} exceeds feasible bound {bound}")]
    StepOutOfRange { lambda: f64, bound: f64 },
    #[error("empty weight vector")]
    EmptyPoint,
}

/// A feasible point of the unit simplex.
///
/// Only strictly positive weights are stored; the key set of the map is the
/// active set. The sum of the stored weights is 1 up to floating-point
/// round-off (points are renormalized after every step).
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    dim: usize,
    weights: BTreeMap<usize, f64>,
}

impl SimplexPoint {
    /// Validates a dense weight vector and builds the point.
    pub fn new(weights: &[f64]) -> Result<Self, SimplexError> {
        if weights.is_empty() {
            return Err(SimplexError::EmptyPoint);
        }
        for (index, &value) in weights.iter().enumerate() {
            if value < 0.0 || !value.is_finite() {
                return Err(SimplexError::NegativeWeight { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(SimplexError::NotNormalized { sum });
        }
        let map = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, &w)| (i, w))
            .collect();
        Ok(Self {
            dim: weights.len(),
            weights: map,
        })
    }

    /// The vertex `e_index` of the simplex.
    pub fn vertex(dim: usize, index: usize) -> Result<Self, SimplexError> {
        if index >= dim {
            return Err(SimplexError::IndexOutOfRange { index, dim });
        }
        let mut weights = BTreeMap::new();
        weights.insert(index, 1.0);
        Ok(Self { dim, weights })
    }

    /// Uniform weights over `indices` (deduplicated), zeros elsewhere.
    pub fn uniform_on(dim: usize, indices: &[usize]) -> Result<Self, SimplexError> {
        let mut unique: Vec<usize> = indices.to_vec();
        unique.sort_unstable();
        unique.dedup();
        if unique.is_empty() {
            return Err(SimplexError::EmptyActiveSet);
        }
        if let Some(&bad) = unique.iter().find(|&&i| i >= dim) {
            return Err(SimplexError::IndexOutOfRange { index: bad, dim });
        }
        let w = 1.0 / unique.len() as f64;
        Ok(Self {
            dim,
            weights: unique.into_iter().map(|i| (i, w)).collect(),
        })
    }

    pub(crate) fn from_map_unchecked(dim: usize, weights: BTreeMap<usize, f64>) -> Self {
        Self { dim, weights }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Weight of coordinate `i` (zero when inactive).
    pub fn weight(&self, i: usize) -> f64 {
        self.weights.get(&i).copied().unwrap_or(0.0)
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.weights.contains_key(&i)
    }

    /// Active `(index, weight)` pairs in ascending index order.
    pub fn active(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().map(|(&i, &w)| (i, w))
    }

    pub fn active_indices(&self) -> Vec<usize> {
        self.weights.keys().copied().collect()
    }

    pub fn active_len(&self) -> usize {
        self.weights.len()
    }

    pub fn sum(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dim];
        for (&i, &w) in &self.weights {
            dense[i] = w;
        }
        dense
    }

    /// Clips weights below [`WEIGHT_CLIP`] to zero and rescales the rest to
    /// sum to one.
    pub(crate) fn renormalized(mut self) -> Self {
        self.weights.retain(|_, w| *w > WEIGHT_CLIP);
        let sum: f64 = self.weights.values().sum();
        if sum > 0.0 && sum != 1.0 {
            for w in self.weights.values_mut() {
                *w /= sum;
            }
        }
        self
    }

    /// `alpha + lambda * d` for a sparse direction, without validation,
    /// clipping or renormalization. Line searches evaluate the objective
    /// along the literal ray, which may leave the simplex (coordinates can
    /// go negative); feasibility is restored only when a step is applied.
    pub fn offset_by(&self, direction: &[(usize, f64)], lambda: f64) -> Self {
        let mut weights = self.weights.clone();
        for &(i, d) in direction {
            let w = weights.entry(i).or_insert(0.0);
            *w += lambda * d;
            if *w == 0.0 {
                weights.remove(&i);
            }
        }
        Self {
            dim: self.dim,
            weights,
        }
    }
}

/// An elementary search direction used by the solvers, identified by the
/// vertices involved rather than by a dense vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchDirection {
    /// `e_ascent - alpha`: move toward the ascent vertex.
    Toward { ascent: usize },
    /// `e_ascent - e_descent`: transfer weight between two vertices.
    Swap { ascent: usize, descent: usize },
    /// `alpha - e_descent`: move away from the descent vertex.
    Away { descent: usize },
}

impl SearchDirection {
    /// Expands the direction into a sparse coordinate vector at `point`.
    /// The coordinates always sum to zero.
    pub fn to_sparse(&self, point: &SimplexPoint) -> Vec<(usize, f64)> {
        match *self {
            SearchDirection::Toward { ascent } => {
                let mut d: Vec<(usize, f64)> = point
                    .active()
                    .filter(|&(i, _)| i != ascent)
                    .map(|(i, w)| (i, -w))
                    .collect();
                d.push((ascent, 1.0 - point.weight(ascent)));
                d.sort_unstable_by_key(|&(i, _)| i);
                d
            }
            SearchDirection::Swap { ascent, descent } => {
                if ascent == descent {
                    return Vec::new();
                }
                let mut d = vec![(ascent, 1.0), (descent, -1.0)];
                d.sort_unstable_by_key(|&(i, _)| i);
                d
            }
            SearchDirection::Away { descent } => {
                let mut d: Vec<(usize, f64)> = point
                    .active()
                    .filter(|&(i, _)| i != descent)
                    .collect();
                d.push((descent, point.weight(descent) - 1.0));
                d.sort_unstable_by_key(|&(i, _)| i);
                d
            }
        }
    }
}

/// Per-iteration quantities a solver already holds, passed to
/// [`ConcaveObjective::step_line_search`] so implementations can avoid
/// recomputing them.
#[derive(Debug, Clone, Copy)]
pub struct SearchContext<'a> {
    /// Gradient at the current iterate, all coordinates.
    pub gradient: &'a [f64],
    /// Objective value at the current iterate.
    pub value: f64,
    /// `alpha' * gradient` at the current iterate.
    pub alpha_dot_grad: f64,
}

/// Contract for a concave objective over the unit simplex.
pub trait ConcaveObjective {
    /// Dimension `m` of the feasible space.
    fn dim(&self) -> usize;

    /// `g(alpha)`.
    fn value(&self, point: &SimplexPoint) -> f64;

    /// `grad g(alpha)_i`.
    fn grad_coord(&self, point: &SimplexPoint, i: usize) -> f64;

    /// `hess g(alpha)_{i,j}`; must be symmetric in `(i, j)`.
    fn hess_entry(&self, point: &SimplexPoint, i: usize, j: usize) -> f64;

    /// Full gradient vector. The default loops over [`Self::grad_coord`];
    /// stateful objectives may serve a maintained vector instead.
    fn gradient(&self, point: &SimplexPoint) -> Vec<f64> {
        (0..self.dim()).map(|i| self.grad_coord(point, i)).collect()
    }

    /// Exact maximizer of `g(alpha + lambda d)` over `[0, lambda_max]`
    /// together with the realized gain, for objectives that admit one.
    /// Returning `None` makes [`generic_line_search`] fall back to
    /// derivative bisection.
    fn exact_line_search(
        &self,
        point: &SimplexPoint,
        direction: &[(usize, f64)],
        lambda_max: f64,
    ) -> Option<(f64, f64)> {
        let _ = (point, direction, lambda_max);
        None
    }

    /// Exact line search over `lambda in [0, 1]` for an elementary step
    /// direction. `None` defers to the generic search.
    fn step_line_search(
        &self,
        point: &SimplexPoint,
        direction: SearchDirection,
        ctx: &SearchContext,
    ) -> Option<(f64, f64)> {
        let _ = (point, direction, ctx);
        None
    }

    /// Notification that `step` was applied, moving the solver iterate from
    /// `before` to `after`. Stateful objectives use this to keep maintained
    /// quantities in sync; the default does nothing.
    fn on_step_applied(&self, before: &SimplexPoint, step: &Step, after: &SimplexPoint) {
        let _ = (before, step, after);
    }
}

impl<T: ConcaveObjective + ?Sized> ConcaveObjective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, point: &SimplexPoint) -> f64 {
        (**self).value(point)
    }
    fn grad_coord(&self, point: &SimplexPoint, i: usize) -> f64 {
        (**self).grad_coord(point, i)
    }
    fn hess_entry(&self, point: &SimplexPoint, i: usize, j: usize) -> f64 {
        (**self).hess_entry(point, i, j)
    }
    fn gradient(&self, point: &SimplexPoint) -> Vec<f64> {
        (**self).gradient(point)
    }
    fn exact_line_search(
        &self,
        point: &SimplexPoint,
        direction: &[(usize, f64)],
        lambda_max: f64,
    ) -> Option<(f64, f64)> {
        (**self).exact_line_search(point, direction, lambda_max)
    }
    fn step_line_search(
        &self,
        point: &SimplexPoint,
        direction: SearchDirection,
        ctx: &SearchContext,
    ) -> Option<(f64, f64)> {
        (**self).step_line_search(point, direction, ctx)
    }
    fn on_step_applied(&self, before: &SimplexPoint, step: &Step, after: &SimplexPoint) {
        (**self).on_step_applied(before, step, after)
    }
}

/// Closed-form maximizer of `phi(lambda) = lambda a - lambda^2 b` over
/// `[0, 1]`, with the gain at the clipped maximizer. `a` is the directional
/// derivative at zero, `b > 0` the curvature term.
pub(crate) fn clipped_quadratic_search(a: f64, b: f64) -> (f64, f64) {
    if a <= 0.0 {
        return (0.0, 0.0);
    }
    if b <= 0.0 {
        return (1.0, a - b);
    }
    let unconstrained = a / (2.0 * b);
    if unconstrained <= 1.0 {
        (unconstrained, a * a / (4.0 * b))
    } else {
        (1.0, a - b)
    }
}

/// Dense quadratic objective `g(alpha) = -coeff * alpha' Q alpha` for a
/// symmetric positive-definite `Q`. With `coeff = 1` this is the SVM-style
/// form; `coeff = 1/2` is the minimum-norm-point form.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    matrix: Vec<Vec<f64>>,
    coeff: f64,
}

impl QuadraticObjective {
    /// `g(alpha) = -alpha' Q alpha`.
    pub fn new(matrix: Vec<Vec<f64>>) -> Self {
        Self::with_coeff(matrix, 1.0)
    }

    /// `g(alpha) = -1/2 alpha' Q alpha`.
    pub fn half(matrix: Vec<Vec<f64>>) -> Self {
        Self::with_coeff(matrix, 0.5)
    }

    fn with_coeff(matrix: Vec<Vec<f64>>, coeff: f64) -> Self {
        let m = matrix.len();
        assert!(m > 0, "empty matrix");
        for row in &matrix {
            assert_eq!(row.len(), m, "matrix must be square");
        }
        Self { matrix, coeff }
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    fn q_dot_active(&self, point: &SimplexPoint, i: usize) -> f64 {
        point
            .active()
            .map(|(j, w)| self.matrix[i][j] * w)
            .sum::<f64>()
    }
}

impl ConcaveObjective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.matrix.len()
    }

    fn value(&self, point: &SimplexPoint) -> f64 {
        let quad: f64 = point
            .active()
            .map(|(i, w)| w * self.q_dot_active(point, i))
            .sum();
        -self.coeff * quad
    }

    fn grad_coord(&self, point: &SimplexPoint, i: usize) -> f64 {
        -2.0 * self.coeff * self.q_dot_active(point, i)
    }

    fn hess_entry(&self, _point: &SimplexPoint, i: usize, j: usize) -> f64 {
        -2.0 * self.coeff * self.matrix[i][j]
    }

    fn exact_line_search(
        &self,
        point: &SimplexPoint,
        direction: &[(usize, f64)],
        lambda_max: f64,
    ) -> Option<(f64, f64)> {
        // g(alpha + t d) = g(alpha) + t d'grad - t^2 coeff d'Qd
        let a: f64 = direction
            .iter()
            .map(|&(i, d)| d * self.grad_coord(point, i))
            .sum();
        let mut dqd = 0.0;
        for &(i, di) in direction {
            for &(j, dj) in direction {
                dqd += di * dj * self.matrix[i][j];
            }
        }
        let b = self.coeff * dqd;
        if a <= 0.0 {
            return Some((0.0, 0.0));
        }
        if b <= 0.0 {
            // Non-concave along the ray; the maximum sits on the boundary.
            return Some((lambda_max, lambda_max * a - lambda_max * lambda_max * b));
        }
        let unconstrained = a / (2.0 * b);
        if unconstrained <= lambda_max {
            Some((unconstrained, a * a / (4.0 * b)))
        } else {
            Some((lambda_max, lambda_max * a - lambda_max * lambda_max * b))
        }
    }

    fn step_line_search(
        &self,
        point: &SimplexPoint,
        direction: SearchDirection,
        ctx: &SearchContext,
    ) -> Option<(f64, f64)> {
        // The objective is a homogeneous quadratic, so alpha'grad = 2 g and
        // (H alpha)_i = grad_i; every curvature term reduces to O(1) entries.
        let g = ctx.value;
        let (a, dhd) = match direction {
            SearchDirection::Toward { ascent } => {
                let gi = ctx.gradient[ascent];
                let h_ii = self.hess_entry(point, ascent, ascent);
                (gi - ctx.alpha_dot_grad, h_ii - 2.0 * gi + 2.0 * g)
            }
            SearchDirection::Swap { ascent, descent } => {
                let a = ctx.gradient[ascent] - ctx.gradient[descent];
                let dhd = self.hess_entry(point, ascent, ascent)
                    - 2.0 * self.hess_entry(point, ascent, descent)
                    + self.hess_entry(point, descent, descent);
                (a, dhd)
            }
            SearchDirection::Away { descent } => {
                let gj = ctx.gradient[descent];
                let h_jj = self.hess_entry(point, descent, descent);
                (ctx.alpha_dot_grad - gj, 2.0 * g - 2.0 * gj + h_jj)
            }
        };
        let b = -0.5 * dhd;
        if b <= 0.0 {
            return if a <= 0.0 { Some((0.0, 0.0)) } else { Some((1.0, a - b)) };
        }
        Some(clipped_quadratic_search(a, b))
    }
}

/// Gap certificate at a feasible point: the primal-dual gap, the selected
/// ascent/descent vertices and the per-coordinate gaps over the active set.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    /// `max_i grad_i - alpha' grad`.
    pub dual_gap: f64,
    /// Smallest index attaining the gradient maximum.
    pub ascent_index: usize,
    /// Smallest active index attaining the gradient minimum over the active set.
    pub descent_index: usize,
    /// `grad_i - alpha' grad` for every active `i`.
    pub active_gaps: BTreeMap<usize, f64>,
    /// `alpha' grad`.
    pub alpha_dot_grad: f64,
}

impl GapReport {
    /// Checks the two-sided near-optimality condition: dual gap at most
    /// `delta` and every active per-coordinate gap at least `-delta`.
    pub fn is_delta_approximate(&self, delta: f64) -> bool {
        self.dual_gap <= delta && self.active_gaps.values().all(|&gap| gap >= -delta)
    }
}

/// Smallest index attaining the maximum gradient coordinate.
pub fn ascent_index(gradient: &[f64]) -> usize {
    let mut best = 0;
    for (i, &g) in gradient.iter().enumerate().skip(1) {
        if g > gradient[best] {
            best = i;
        }
    }
    best
}

/// Smallest active index attaining the minimum gradient coordinate over the
/// active set. `active` must be sorted ascending.
pub fn descent_index(gradient: &[f64], active: &[usize]) -> Result<usize, SimplexError> {
    let mut best: Option<usize> = None;
    for &i in active {
        match best {
            None => best = Some(i),
            Some(b) if gradient[i] < gradient[b] => best = Some(i),
            _ => {}
        }
    }
    best.ok_or(SimplexError::EmptyActiveSet)
}

pub(crate) fn gap_report_from_gradient(gradient: &[f64], point: &SimplexPoint) -> GapReport {
    let alpha_dot_grad: f64 = point.active().map(|(i, w)| w * gradient[i]).sum();
    let ascent = ascent_index(gradient);
    let descent = descent_index(gradient, &point.active_indices())
        .expect("feasible point has a non-empty active set");
    let active_gaps = point
        .active()
        .map(|(i, _)| (i, gradient[i] - alpha_dot_grad))
        .collect();
    GapReport {
        dual_gap: gradient[ascent] - alpha_dot_grad,
        ascent_index: ascent,
        descent_index: descent,
        active_gaps,
        alpha_dot_grad,
    }
}

/// Evaluates the primal-dual gap and per-coordinate gaps at `point`.
pub fn gap_report<O: ConcaveObjective + ?Sized>(obj: &O, point: &SimplexPoint) -> GapReport {
    let gradient = obj.gradient(point);
    gap_report_from_gradient(&gradient, point)
}

/// The kind of elementary step taken by a solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Toward step `alpha + lambda (e_ascent - alpha)`.
    Fw { ascent: usize },
    /// Swap step `alpha + lambda (e_ascent - e_descent)` keeping the descent
    /// vertex active.
    SwapAdd { ascent: usize, descent: usize },
    /// Swap step whose step size equals the weight of the descent vertex,
    /// zeroing it.
    SwapDrop { ascent: usize, descent: usize },
    /// Away step `alpha + lambda (alpha - e_descent)`.
    Away { descent: usize },
    /// Away step that attains the feasibility bound, zeroing the descent
    /// vertex.
    AwayDrop { descent: usize },
}

impl StepKind {
    pub fn label(&self) -> &'static str {
        match self {
            StepKind::Fw { .. } => "fw",
            StepKind::SwapAdd { .. } => "swap_add",
            StepKind::SwapDrop { .. } => "swap_drop",
            StepKind::Away { .. } => "away",
            StepKind::AwayDrop { .. } => "away_drop",
        }
    }

    pub fn is_drop(&self) -> bool {
        matches!(self, StepKind::SwapDrop { .. } | StepKind::AwayDrop { .. })
    }
}

/// An elementary step with its size and the gain reported by the search that
/// selected it. For drop steps the reported gain is the unclipped search
/// gain, which may exceed the realized improvement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub kind: StepKind,
    pub lambda: f64,
    pub gain: f64,
}

/// Applies an elementary step to `point`. The result is zero-clipped at
/// [`WEIGHT_CLIP`] and rescaled to sum to one.
pub fn apply_step(point: &SimplexPoint, step: &Step) -> Result<SimplexPoint, SimplexError> {
    let lambda = step.lambda;
    if lambda < -STEP_RANGE_SLACK || !lambda.is_finite() {
        return Err(SimplexError::StepOutOfRange { lambda, bound: 0.0 });
    }
    let check_bound = |bound: f64| {
        if lambda > bound + STEP_RANGE_SLACK {
            Err(SimplexError::StepOutOfRange { lambda, bound })
        } else {
            Ok(())
        }
    };
    let mut weights = BTreeMap::new();
    match step.kind {
        StepKind::Fw { ascent } => {
            if ascent >= point.dim() {
                return Err(SimplexError::IndexOutOfRange {
                    index: ascent,
                    dim: point.dim(),
                });
            }
            check_bound(1.0)?;
            for (i, w) in point.active() {
                weights.insert(i, (1.0 - lambda) * w);
            }
            let w = weights.entry(ascent).or_insert(0.0);
            *w += lambda;
        }
        StepKind::SwapAdd { ascent, descent } | StepKind::SwapDrop { ascent, descent } => {
            if ascent >= point.dim() {
                return Err(SimplexError::IndexOutOfRange {
                    index: ascent,
                    dim: point.dim(),
                });
            }
            check_bound(point.weight(descent))?;
            for (i, w) in point.active() {
                weights.insert(i, w);
            }
            *weights.entry(ascent).or_insert(0.0) += lambda;
            let wd = weights.entry(descent).or_insert(0.0);
            *wd = (*wd - lambda).max(0.0);
        }
        StepKind::Away { descent } | StepKind::AwayDrop { descent } => {
            let wd = point.weight(descent);
            let bound = if wd < 1.0 { wd / (1.0 - wd) } else { f64::INFINITY };
            check_bound(bound)?;
            for (i, w) in point.active() {
                weights.insert(i, (1.0 + lambda) * w);
            }
            let entry = weights.entry(descent).or_insert(0.0);
            *entry = (*entry - lambda).max(0.0);
        }
    }
    Ok(SimplexPoint::from_map_unchecked(point.dim(), weights).renormalized())
}

/// Line search along `direction` from `point`: delegates to the objective's
/// exact search when available and otherwise bisects the directional
/// derivative (100 iterations, derivative tolerance 1e-12).
///
/// `direction` must have zero coordinate sum. A non-ascent direction
/// (directional derivative at zero not positive) yields `(0.0, 0.0)`.
pub fn generic_line_search<O: ConcaveObjective + ?Sized>(
    obj: &O,
    point: &SimplexPoint,
    direction: &[(usize, f64)],
    lambda_max: f64,
) -> (f64, f64) {
    if let Some(found) = obj.exact_line_search(point, direction, lambda_max) {
        return found;
    }
    bisection_line_search(obj, point, direction, lambda_max)
}

/// Derivative-bisection line search, independent of any closed form the
/// objective may provide. Kept public so closed-form searches can be checked
/// against it.
pub fn bisection_line_search<O: ConcaveObjective + ?Sized>(
    obj: &O,
    point: &SimplexPoint,
    direction: &[(usize, f64)],
    lambda_max: f64,
) -> (f64, f64) {
    const ITERATIONS: usize = 100;
    const DERIVATIVE_TOL: f64 = 1e-12;

    let derivative = |lambda: f64| -> f64 {
        let at = point.offset_by(direction, lambda);
        direction
            .iter()
            .map(|&(i, d)| d * obj.grad_coord(&at, i))
            .sum()
    };

    if derivative(0.0) <= 0.0 {
        return (0.0, 0.0);
    }
    let base = obj.value(point);
    let gain_at = |lambda: f64| obj.value(&point.offset_by(direction, lambda)) - base;

    if derivative(lambda_max) >= 0.0 {
        return (lambda_max, gain_at(lambda_max).max(0.0));
    }
    let (mut lo, mut hi) = (0.0_f64, lambda_max);
    for _ in 0..ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let d = derivative(mid);
        if d.abs() <= DERIVATIVE_TOL {
            lo = mid;
            break;
        }
        if d > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, gain_at(lo).max(0.0))
}
