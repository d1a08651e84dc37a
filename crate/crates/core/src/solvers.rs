//! The iterative solvers: FW, MFW, first- and second-order SWAP, and the
//! fully-corrective variant, all driven over any [`ConcaveObjective`] with
//! full per-iteration tracing and a primal-dual gap stopping rule.

use crate::simplex::{
    apply_step, ascent_index, gap_report_from_gradient, ConcaveObjective, GapReport,
    SearchContext, SearchDirection, SimplexPoint, Step, StepKind,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

/// Solver scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Fw,
    Mfw,
    Swap,
    Swap2o,
    Fcfw,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Fw,
        Variant::Mfw,
        Variant::Swap,
        Variant::Swap2o,
        Variant::Fcfw,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Fw => "fw",
            Variant::Mfw => "mfw",
            Variant::Swap => "swap",
            Variant::Swap2o => "swap2o",
            Variant::Fcfw => "fcfw",
        }
    }

    pub fn parse(name: &str) -> Option<Variant> {
        match name {
            "fw" => Some(Variant::Fw),
            "mfw" => Some(Variant::Mfw),
            "swap" => Some(Variant::Swap),
            "swap2o" => Some(Variant::Swap2o),
            "fcfw" => Some(Variant::Fcfw),
            _ => None,
        }
    }
}

/// Descent-vertex selection rule for the SWAP scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapOrder {
    /// Gradient argmin over the active set.
    First,
    /// Second-order score over the active set (SMO-style working pair).
    Second,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub variant: Variant,
    /// Stopping tolerance on the primal-dual gap.
    pub tolerance: f64,
    pub max_iterations: u64,
    /// Tolerance of restricted (face) solves; defaults to `tolerance`.
    pub inner_tolerance: Option<f64>,
    /// Seed for any randomized selection (sampled ascent scans).
    pub seed: u64,
    /// When set to `n`, the ascent vertex is chosen as the best of `n`
    /// uniform draws instead of a full gradient scan. Values at or above
    /// the problem dimension fall back to the exact scan. The stopping
    /// certificate then refers to the sampled scan.
    pub ascent_sample: Option<usize>,
}

impl SolverConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            tolerance: 1e-6,
            max_iterations: 10_000_000,
            inner_tolerance: None,
            seed: 0,
            ascent_sample: None,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: u64) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn inner_tolerance(&self) -> f64 {
        self.inner_tolerance.unwrap_or(self.tolerance)
    }
}

/// One row of the solve trace.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: u64,
    pub step: Step,
    /// Gap certificate before the step (restricted to the working face for
    /// face-confined solves).
    pub dual_gap: f64,
    /// Objective value after the step.
    pub objective: f64,
    pub active_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepCounts {
    pub fw: u64,
    pub swap_add: u64,
    pub swap_drop: u64,
    pub away: u64,
    pub away_drop: u64,
}

impl StepCounts {
    pub fn total(&self) -> u64 {
        self.fw + self.swap_add + self.swap_drop + self.away + self.away_drop
    }

    fn record(&mut self, kind: &StepKind) {
        match kind {
            StepKind::Fw { .. } => self.fw += 1,
            StepKind::SwapAdd { .. } => self.swap_add += 1,
            StepKind::SwapDrop { .. } => self.swap_drop += 1,
            StepKind::Away { .. } => self.away += 1,
            StepKind::AwayDrop { .. } => self.away_drop += 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub point: SimplexPoint,
    pub gap: GapReport,
    pub trace: Vec<IterationRecord>,
    pub termination: Termination,
    pub counts: StepCounts,
    /// Active-set size of the starting point.
    pub initial_active: usize,
    /// Total number of iterations performed (equals the trace length until
    /// the retention limit thins old records).
    pub iterations: u64,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("restricted solve did not reach the requested tolerance")]
    InnerSolveIncomplete { best: SimplexPoint },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

/// Trace retention limit; past it the trace is thinned to every 10th record.
const TRACE_LIMIT: usize = 1_000_000;

struct TraceBuffer {
    records: Vec<IterationRecord>,
    stride: u64,
    limit: usize,
}

impl TraceBuffer {
    fn new() -> Self {
        Self::with_limit(TRACE_LIMIT)
    }

    fn with_limit(limit: usize) -> Self {
        Self {
            records: Vec::new(),
            stride: 1,
            limit,
        }
    }

    fn push(&mut self, record: IterationRecord) {
        if record.iteration.is_multiple_of(self.stride) {
            self.records.push(record);
        }
        if self.records.len() >= self.limit {
            self.stride *= 10;
            self.records
                .retain(|r| r.iteration.is_multiple_of(self.stride));
        }
    }
}

/// Runs the variant selected by `config`.
pub fn solve<O: ConcaveObjective + ?Sized>(
    obj: &O,
    start: &SimplexPoint,
    config: &SolverConfig,
) -> SolveResult {
    match config.variant {
        Variant::Fw => solve_fw(obj, start, config),
        Variant::Mfw => solve_mfw(obj, start, config),
        Variant::Swap => solve_swap(obj, start, config, SwapOrder::First),
        Variant::Swap2o => solve_swap(obj, start, config, SwapOrder::Second),
        Variant::Fcfw => solve_fully_corrective(obj, start, config),
    }
}

/// Standard Frank-Wolfe: toward steps only.
pub fn solve_fw<O: ConcaveObjective + ?Sized>(
    obj: &O,
    start: &SimplexPoint,
    config: &SolverConfig,
) -> SolveResult {
    Driver::new(obj, start, config).run(Scheme::Fw)
}

/// Modified Frank-Wolfe: toward steps or classic away steps, selected by
/// comparing the linearized gains of the two directions.
pub fn solve_mfw<O: ConcaveObjective + ?Sized>(
    obj: &O,
    start: &SimplexPoint,
    config: &SolverConfig,
) -> SolveResult {
    Driver::new(obj, start, config).run(Scheme::Mfw)
}

/// SWAP scheme: per iteration line-searches both the swap and the toward
/// direction and takes whichever realizes the larger improvement.
pub fn solve_swap<O: ConcaveObjective + ?Sized>(
    obj: &O,
    start: &SimplexPoint,
    config: &SolverConfig,
    order: SwapOrder,
) -> SolveResult {
    Driver::new(obj, start, config).run(Scheme::Swap(order))
}

/// Fully-corrective variant: after each new vertex enters the working face,
/// the face is re-optimized to the inner tolerance.
pub fn solve_fully_corrective<O: ConcaveObjective + ?Sized>(
    obj: &O,
    start: &SimplexPoint,
    config: &SolverConfig,
) -> SolveResult {
    let mut driver = Driver::new(obj, start, config);
    // The face solves must be at least as tight as the outer stopping rule,
    // otherwise an outer round could finish without taking a single step.
    let inner_eps = config.inner_tolerance().min(config.tolerance);
    let mut face: BTreeSet<usize> = driver.point.active_indices().into_iter().collect();
    loop {
        let gradient = driver.gradient();
        let ascent = driver.select_ascent(&gradient);
        let report = driver.report_for(&gradient, ascent);
        if report.dual_gap <= config.tolerance {
            return driver.finish(Termination::Converged, Some(report));
        }
        if driver.budget_exhausted() {
            return driver.finish(Termination::MaxIterations, Some(report));
        }
        face.insert(ascent);
        let face_indices: Vec<usize> = face.iter().copied().collect();
        // Re-optimize the face in place; the shared driver keeps the trace
        // and counters across inner solves.
        let done = driver.swap_loop(SwapOrder::First, Some(&face_indices), inner_eps);
        if !done {
            return driver.finish(Termination::MaxIterations, None);
        }
    }
}

/// Solves the problem restricted to `face` until the face-restricted gap
/// drops to `eps_inner`. The returned point is supported on `face`.
pub fn restricted_solve<O: ConcaveObjective + ?Sized>(
    obj: &O,
    face: &[usize],
    start: &SimplexPoint,
    eps_inner: f64,
    max_iterations: u64,
) -> Result<SimplexPoint, SolverError> {
    let face_set: BTreeSet<usize> = face.iter().copied().collect();
    if face_set.is_empty() {
        return Err(SolverError::InvalidProblem("empty face".into()));
    }
    if let Some(&bad) = face_set.iter().find(|&&i| i >= obj.dim()) {
        return Err(SolverError::InvalidProblem(format!(
            "face coordinate {bad} out of range for dimension {}",
            obj.dim()
        )));
    }
    for (i, _) in start.active() {
        if !face_set.contains(&i) {
            return Err(SolverError::InvalidProblem(format!(
                "start point has weight on coordinate {i} outside the face"
            )));
        }
    }
    let config = SolverConfig::new(Variant::Swap)
        .with_tolerance(eps_inner)
        .with_max_iterations(max_iterations);
    let mut driver = Driver::new(obj, start, &config);
    let face_indices: Vec<usize> = face_set.into_iter().collect();
    let done = driver.swap_loop(SwapOrder::First, Some(&face_indices), eps_inner);
    if done {
        Ok(driver.point)
    } else {
        Err(SolverError::InnerSolveIncomplete { best: driver.point })
    }
}

enum Scheme {
    Fw,
    Mfw,
    Swap(SwapOrder),
}

/// Consecutive zero-length steps after which a solve is abandoned as
/// stalled (reported as `MaxIterations`).
const STALL_LIMIT: u32 = 64;

struct Driver<'a, O: ?Sized> {
    obj: &'a O,
    point: SimplexPoint,
    config: &'a SolverConfig,
    trace: TraceBuffer,
    counts: StepCounts,
    iterations: u64,
    initial_active: usize,
    value: f64,
    rng: ChaCha8Rng,
    zero_steps: u32,
}

impl<'a, O: ConcaveObjective + ?Sized> Driver<'a, O> {
    fn new(obj: &'a O, start: &SimplexPoint, config: &'a SolverConfig) -> Self {
        Self {
            obj,
            point: start.clone(),
            config,
            trace: TraceBuffer::new(),
            counts: StepCounts::default(),
            iterations: 0,
            initial_active: start.active_len(),
            value: obj.value(start),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            zero_steps: 0,
        }
    }

    fn gradient(&self) -> Vec<f64> {
        self.obj.gradient(&self.point)
    }

    fn budget_exhausted(&self) -> bool {
        self.iterations >= self.config.max_iterations || self.zero_steps >= STALL_LIMIT
    }

    /// Gap certificate anchored at the selected ascent vertex. With exact
    /// scans this equals the full report; with sampled scans it reflects
    /// the sampled certificate the solver actually checked.
    fn report_for(&self, gradient: &[f64], ascent: usize) -> GapReport {
        let mut report = gap_report_from_gradient(gradient, &self.point);
        if report.ascent_index != ascent {
            report.ascent_index = ascent;
            report.dual_gap = gradient[ascent] - report.alpha_dot_grad;
        }
        report
    }

    /// Ascent vertex over `candidates` (`None` = all coordinates), honoring
    /// the sampled-scan option on unrestricted scans.
    fn select_ascent_on(&mut self, gradient: &[f64], candidates: Option<&[usize]>) -> usize {
        match candidates {
            Some(indices) => {
                let mut best = indices[0];
                for &i in &indices[1..] {
                    if gradient[i] > gradient[best] {
                        best = i;
                    }
                }
                best
            }
            None => {
                let m = gradient.len();
                match self.config.ascent_sample {
                    Some(n) if n < m => {
                        let mut best = self.rng.random_range(0..m);
                        for _ in 1..n {
                            let candidate = self.rng.random_range(0..m);
                            if gradient[candidate] > gradient[best]
                                || (gradient[candidate] == gradient[best] && candidate < best)
                            {
                                best = candidate;
                            }
                        }
                        best
                    }
                    _ => ascent_index(gradient),
                }
            }
        }
    }

    fn select_ascent(&mut self, gradient: &[f64]) -> usize {
        self.select_ascent_on(gradient, None)
    }

    fn alpha_dot_grad(&self, gradient: &[f64]) -> f64 {
        self.point.active().map(|(i, w)| w * gradient[i]).sum()
    }

    fn line_search(&self, direction: SearchDirection, ctx: &SearchContext) -> (f64, f64) {
        if let Some(found) = self.obj.step_line_search(&self.point, direction, ctx) {
            return found;
        }
        let sparse = direction.to_sparse(&self.point);
        crate::simplex::generic_line_search(self.obj, &self.point, &sparse, 1.0)
    }

    fn take_step(&mut self, step: Step, dual_gap: f64) {
        if step.lambda == 0.0 {
            self.zero_steps += 1;
        } else {
            self.zero_steps = 0;
        }
        let next = apply_step(&self.point, &step).expect("solver step within feasible range");
        self.obj.on_step_applied(&self.point, &step, &next);
        self.value = self.obj.value(&next);
        self.counts.record(&step.kind);
        self.trace.push(IterationRecord {
            iteration: self.iterations,
            step,
            dual_gap,
            objective: self.value,
            active_size: next.active_len(),
        });
        self.point = next;
        self.iterations += 1;
    }

    fn finish(self, termination: Termination, report: Option<GapReport>) -> SolveResult {
        let gap = report.unwrap_or_else(|| {
            let gradient = self.obj.gradient(&self.point);
            gap_report_from_gradient(&gradient, &self.point)
        });
        SolveResult {
            point: self.point,
            gap,
            trace: self.trace.records,
            termination,
            counts: self.counts,
            initial_active: self.initial_active,
            iterations: self.iterations,
        }
    }

    fn run(mut self, scheme: Scheme) -> SolveResult {
        loop {
            let gradient = self.gradient();
            let adg = self.alpha_dot_grad(&gradient);
            let ascent = self.select_ascent(&gradient);
            let gap = gradient[ascent] - adg;
            if gap <= self.config.tolerance {
                let report = self.report_for(&gradient, ascent);
                return self.finish(Termination::Converged, Some(report));
            }
            if self.budget_exhausted() {
                let report = self.report_for(&gradient, ascent);
                return self.finish(Termination::MaxIterations, Some(report));
            }
            let ctx = SearchContext {
                gradient: &gradient,
                value: self.value,
                alpha_dot_grad: adg,
            };
            match scheme {
                Scheme::Fw => {
                    let (lambda, gain) =
                        self.line_search(SearchDirection::Toward { ascent }, &ctx);
                    self.take_step(
                        Step {
                            kind: StepKind::Fw { ascent },
                            lambda,
                            gain,
                        },
                        gap,
                    );
                }
                Scheme::Mfw => self.mfw_iteration(ascent, gap, &gradient, adg),
                Scheme::Swap(order) => self.swap_iteration(order, ascent, gap, &gradient, adg),
            }
        }
    }

    fn mfw_iteration(&mut self, ascent: usize, gap: f64, gradient: &[f64], adg: f64) {
        let descent = crate::simplex::descent_index(gradient, &self.point.active_indices())
            .expect("non-empty active set");
        let toward_gain = gradient[ascent] - adg;
        let away_gain = adg - gradient[descent];
        let ctx = SearchContext {
            gradient,
            value: self.value,
            alpha_dot_grad: adg,
        };
        if toward_gain >= away_gain {
            let (lambda, gain) = self.line_search(SearchDirection::Toward { ascent }, &ctx);
            self.take_step(
                Step {
                    kind: StepKind::Fw { ascent },
                    lambda,
                    gain,
                },
                gap,
            );
        } else {
            let (lambda, gain) = self.line_search(SearchDirection::Away { descent }, &ctx);
            let weight = self.point.weight(descent);
            let bound = if weight < 1.0 {
                weight / (1.0 - weight)
            } else {
                f64::INFINITY
            };
            // Feasibility clip; attaining the bound zeroes the descent vertex.
            let (kind, lambda) = if lambda >= bound {
                (StepKind::AwayDrop { descent }, bound)
            } else {
                (StepKind::Away { descent }, lambda)
            };
            self.take_step(
                Step {
                    kind,
                    lambda,
                    gain,
                },
                gap,
            );
        }
    }

    fn swap_iteration(
        &mut self,
        order: SwapOrder,
        ascent: usize,
        gap: f64,
        gradient: &[f64],
        adg: f64,
    ) {
        let active = self.point.active_indices();
        let descent = match order {
            SwapOrder::First => {
                crate::simplex::descent_index(gradient, &active).expect("non-empty active set")
            }
            SwapOrder::Second => self.second_order_descent(gradient, &active, ascent),
        };
        let ctx = SearchContext {
            gradient,
            value: self.value,
            alpha_dot_grad: adg,
        };
        let (lambda_swap, delta_swap) = if ascent == descent {
            (0.0, 0.0)
        } else {
            self.line_search(SearchDirection::Swap { ascent, descent }, &ctx)
        };
        let (lambda_fw, delta_fw) = self.line_search(SearchDirection::Toward { ascent }, &ctx);
        if delta_swap >= delta_fw {
            // The improvement comparison uses the [0,1]-searched step size;
            // feasibility clipping happens only now.
            let weight = self.point.weight(descent);
            let (kind, lambda) = if lambda_swap >= weight {
                (StepKind::SwapDrop { ascent, descent }, weight)
            } else {
                (StepKind::SwapAdd { ascent, descent }, lambda_swap)
            };
            self.take_step(
                Step {
                    kind,
                    lambda,
                    gain: delta_swap,
                },
                gap,
            );
        } else {
            self.take_step(
                Step {
                    kind: StepKind::Fw { ascent },
                    lambda: lambda_fw,
                    gain: delta_fw,
                },
                gap,
            );
        }
    }

    /// Second-order descent score: predicted improvement of the swap
    /// direction under the quadratic model, maximized over the active set.
    fn second_order_descent(&self, gradient: &[f64], active: &[usize], ascent: usize) -> usize {
        let h_ii = self.obj.hess_entry(&self.point, ascent, ascent);
        let mut best: Option<(usize, f64)> = None;
        for &j in active {
            let grad_diff = gradient[ascent] - gradient[j];
            let curvature = h_ii - 2.0 * self.obj.hess_entry(&self.point, ascent, j)
                + self.obj.hess_entry(&self.point, j, j);
            // Degenerate curvature (duplicate points): the direction is
            // linear, so any positive gradient difference is unboundedly
            // good and a non-positive one is useless.
            let score = if curvature >= -1e-14 {
                if grad_diff > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                grad_diff * grad_diff / (-2.0 * curvature)
            };
            match best {
                None => best = Some((j, score)),
                Some((_, best_score)) if score > best_score => best = Some((j, score)),
                _ => {}
            }
        }
        best.expect("non-empty active set").0
    }

    /// Runs SWAP iterations, optionally confined to `face`, until the
    /// (face-restricted) gap reaches `eps`. Returns false when the
    /// iteration budget runs out first.
    fn swap_loop(&mut self, order: SwapOrder, face: Option<&[usize]>, eps: f64) -> bool {
        loop {
            let gradient = self.gradient();
            let adg = self.alpha_dot_grad(&gradient);
            let ascent = self.select_ascent_on(&gradient, face);
            let gap = gradient[ascent] - adg;
            if gap <= eps {
                return true;
            }
            if self.budget_exhausted() {
                return false;
            }
            self.swap_iteration(order, ascent, gap, &gradient, adg);
        }
    }
}
