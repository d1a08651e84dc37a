//! Minimum-norm-point formulation over the convex hull of a finite point
//! set, and the Gilbert/MDM iterations. These serve as geometric
//! cross-checks for the simplex solvers: Frank-Wolfe coincides with the
//! Gilbert algorithm and the swap scheme selects the same vertex pair as
//! MDM.

use crate::io::SparseVector;
use crate::simplex::{apply_step, QuadraticObjective, SimplexPoint, Step, StepKind};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("points have inconsistent dimensions")]
    MixedDimensions,
    #[error("point coordinates must be finite")]
    NonFiniteCoordinate,
}

/// A finite set of points in a common dot-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        let Some(first) = points.first() else {
            return Err(GeometryError::EmptyPointSet);
        };
        let dim = first.len();
        for point in &points {
            if point.len() != dim {
                return Err(GeometryError::MixedDimensions);
            }
            if point.iter().any(|v| !v.is_finite()) {
                return Err(GeometryError::NonFiniteCoordinate);
            }
        }
        Ok(Self { points, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Gram matrix `Z'Z`.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let m = self.points.len();
        let mut gram = vec![vec![0.0; m]; m];
        for (i, row) in gram.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = dot(&self.points[i], &self.points[j]);
            }
        }
        gram
    }

    /// `Z alpha`: the hull point with the given simplex coordinates.
    pub fn combine(&self, alpha: &SimplexPoint) -> Vec<f64> {
        let mut z = vec![0.0; self.dim];
        for (i, w) in alpha.active() {
            for (zc, &pc) in z.iter_mut().zip(&self.points[i]) {
                *zc += w * pc;
            }
        }
        z
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The minimum-norm-point objective `g(alpha) = -1/2 ||Z alpha||^2` as a
/// quadratic over the simplex.
pub fn mnp_objective(points: &PointSet) -> QuadraticObjective {
    QuadraticObjective::half(points.gram())
}

/// Iteration state shared by the Gilbert and MDM algorithms: the current
/// hull point, its simplex coordinates and an iteration counter.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricState {
    pub z: Vec<f64>,
    pub alpha: SimplexPoint,
    pub iteration: u64,
}

impl GeometricState {
    pub fn new(points: &PointSet, alpha: SimplexPoint) -> Self {
        let z = points.combine(&alpha);
        Self {
            z,
            alpha,
            iteration: 0,
        }
    }

    /// Squared norm of the current hull point.
    pub fn squared_norm(&self) -> f64 {
        dot(&self.z, &self.z)
    }
}

/// Smallest index minimizing `z' z_i` (the Gilbert/MDM toward vertex).
fn toward_vertex(state: &GeometricState, points: &PointSet) -> usize {
    let mut best = 0;
    let mut best_dot = dot(&state.z, points.point(0));
    for i in 1..points.len() {
        let d = dot(&state.z, points.point(i));
        if d < best_dot {
            best = i;
            best_dot = d;
        }
    }
    best
}

/// One Gilbert iteration: move toward the vertex minimizing `z' z_i` with
/// an exact line search of `||(1-t) z + t z_i||^2` over `[0, 1]`. Returns
/// the new state and the simplex step it corresponds to.
pub fn gilbert_iterate(state: &GeometricState, points: &PointSet) -> (GeometricState, Step) {
    let toward = toward_vertex(state, points);
    let target = points.point(toward);
    let diff: Vec<f64> = target
        .iter()
        .zip(&state.z)
        .map(|(t, z)| t - z)
        .collect();
    let denom = dot(&diff, &diff);
    let lambda = if denom > 0.0 {
        ((dot(&state.z, &state.z) - dot(&state.z, target)) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let z: Vec<f64> = state
        .z
        .iter()
        .zip(&diff)
        .map(|(z, d)| z + lambda * d)
        .collect();
    let step = Step {
        kind: StepKind::Fw { ascent: toward },
        lambda,
        gain: 0.0,
    };
    let alpha = apply_step(&state.alpha, &step).expect("Gilbert step is feasible");
    (
        GeometricState {
            z,
            alpha,
            iteration: state.iteration + 1,
        },
        step,
    )
}

/// One MDM iteration: transfer weight from the active vertex maximizing
/// `z' z_j` to the vertex minimizing `z' z_i`, with the step size from an
/// exact line search clipped to the available weight. Returns the new
/// state and the simplex step it corresponds to.
pub fn mdm_iterate(state: &GeometricState, points: &PointSet) -> (GeometricState, Step) {
    let toward = toward_vertex(state, points);
    // Away vertex: active support maximizing z' z_j (smallest index wins ties).
    let mut away = None;
    let mut away_dot = f64::NEG_INFINITY;
    for (j, _) in state.alpha.active() {
        let d = dot(&state.z, points.point(j));
        if d > away_dot {
            away = Some(j);
            away_dot = d;
        }
    }
    let away = away.expect("state has active support");
    if toward == away {
        let step = Step {
            kind: StepKind::SwapAdd {
                ascent: toward,
                descent: away,
            },
            lambda: 0.0,
            gain: 0.0,
        };
        return (
            GeometricState {
                z: state.z.clone(),
                alpha: state.alpha.clone(),
                iteration: state.iteration + 1,
            },
            step,
        );
    }
    let diff: Vec<f64> = points
        .point(toward)
        .iter()
        .zip(points.point(away))
        .map(|(i, j)| i - j)
        .collect();
    let denom = dot(&diff, &diff);
    let unconstrained = if denom > 0.0 {
        (-dot(&state.z, &diff) / denom).max(0.0)
    } else {
        0.0
    };
    let available = state.alpha.weight(away);
    let (lambda, kind) = if unconstrained >= available {
        (
            available,
            StepKind::SwapDrop {
                ascent: toward,
                descent: away,
            },
        )
    } else {
        (
            unconstrained,
            StepKind::SwapAdd {
                ascent: toward,
                descent: away,
            },
        )
    };
    let z: Vec<f64> = state
        .z
        .iter()
        .zip(&diff)
        .map(|(z, d)| z + lambda * d)
        .collect();
    let step = Step {
        kind,
        lambda,
        gain: 0.0,
    };
    let alpha = apply_step(&state.alpha, &step).expect("MDM step is feasible");
    (
        GeometricState {
            z,
            alpha,
            iteration: state.iteration + 1,
        },
        step,
    )
}

/// Embeds a linear-kernel SVM problem as a point set whose Gram matrix is
/// the effective SVM matrix: `z_i = (y_i x_i, y_i, e_i / sqrt(C))`.
pub fn embed_linear_svm(rows: &[SparseVector], labels: &[f64], c: f64) -> PointSet {
    let m = rows.len();
    let n = rows
        .iter()
        .flat_map(|row| row.iter().map(|&(i, _)| i as usize + 1))
        .max()
        .unwrap_or(0);
    let scale = 1.0 / c.sqrt();
    let mut points = Vec::with_capacity(m);
    for (i, (row, &y)) in rows.iter().zip(labels).enumerate() {
        let mut z = vec![0.0; n + 1 + m];
        for &(idx, value) in row {
            z[idx as usize] = y * value;
        }
        z[n] = y;
        z[n + 1 + i] = scale;
        points.push(z);
    }
    PointSet::new(points).expect("embedding produces a consistent point set")
}
