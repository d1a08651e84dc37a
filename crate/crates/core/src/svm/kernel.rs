//! Kernel functions over sparse feature vectors and the default scale
//! heuristic.

use crate::io::SparseVector;
use crate::svm::SvmError;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

/// Kernel selector with its scale parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `exp(-||x1 - x2||^2 / (2 sigma2))`.
    Rbf { sigma2: f64 },
    /// Homogeneous second-order polynomial `(gamma x1'x2)^2`.
    Poly2 { gamma: f64 },
    /// Plain dot product.
    Linear,
}

impl KernelSpec {
    pub fn eval(&self, x1: &[(u32, f64)], x2: &[(u32, f64)]) -> f64 {
        match *self {
            KernelSpec::Rbf { sigma2 } => (-squared_distance(x1, x2) / (2.0 * sigma2)).exp(),
            KernelSpec::Poly2 { gamma } => {
                let d = gamma * dot(x1, x2);
                d * d
            }
            KernelSpec::Linear => dot(x1, x2),
        }
    }

    pub fn validate(&self) -> Result<(), SvmError> {
        let ok = match *self {
            KernelSpec::Rbf { sigma2 } => sigma2 > 0.0 && sigma2.is_finite(),
            KernelSpec::Poly2 { gamma } => gamma > 0.0 && gamma.is_finite(),
            KernelSpec::Linear => true,
        };
        if ok {
            Ok(())
        } else {
            Err(SvmError::InvalidProblem(
                "kernel scale parameter must be positive and finite".into(),
            ))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Rbf { .. } => "rbf",
            KernelSpec::Poly2 { .. } => "poly2",
            KernelSpec::Linear => "linear",
        }
    }
}

/// Sparse dot product (merge walk over sorted indices).
pub fn dot(a: &[(u32, f64)], b: &[(u32, f64)]) -> f64 {
    let mut sum = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (ia, va) = a[i];
        let (ib, vb) = b[j];
        if ia == ib {
            sum += va * vb;
            i += 1;
            j += 1;
        } else if ia < ib {
            i += 1;
        } else {
            j += 1;
        }
    }
    sum
}

/// Squared Euclidean distance between sparse vectors.
pub fn squared_distance(a: &[(u32, f64)], b: &[(u32, f64)]) -> f64 {
    let mut sum = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ia, va)), Some(&(ib, vb))) => {
                if ia == ib {
                    let d = va - vb;
                    sum += d * d;
                    i += 1;
                    j += 1;
                } else if ia < ib {
                    sum += va * va;
                    i += 1;
                } else {
                    sum += vb * vb;
                    j += 1;
                }
            }
            (Some(&(_, va)), None) => {
                sum += va * va;
                i += 1;
            }
            (None, Some(&(_, vb))) => {
                sum += vb * vb;
                j += 1;
            }
            (None, None) => break,
        }
    }
    sum
}

/// Number of sampled pairs the scale heuristic is capped at.
const SIGMA2_PAIR_CAP: u64 = 100_000;

/// Average squared distance among training patterns, over all pairs when
/// there are at most 10^5 of them and over that many uniformly sampled
/// distinct pairs otherwise.
pub fn default_sigma2(rows: &[SparseVector], rng: &mut ChaCha8Rng) -> Result<f64, SvmError> {
    let m = rows.len();
    if m < 2 {
        return Err(SvmError::InvalidProblem(
            "scale heuristic needs at least two examples".into(),
        ));
    }
    let total_pairs = (m as u64) * (m as u64 - 1) / 2;
    let mut sum = 0.0;
    let mut count = 0u64;
    if total_pairs <= SIGMA2_PAIR_CAP {
        for i in 0..m {
            for j in (i + 1)..m {
                sum += squared_distance(&rows[i], &rows[j]);
                count += 1;
            }
        }
    } else {
        let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(SIGMA2_PAIR_CAP as usize);
        while count < SIGMA2_PAIR_CAP {
            let i = rng.random_range(0..m) as u32;
            let j = rng.random_range(0..m) as u32;
            if i == j {
                continue;
            }
            let pair = (i.min(j), i.max(j));
            if seen.insert(pair) {
                sum += squared_distance(&rows[pair.0 as usize], &rows[pair.1 as usize]);
                count += 1;
            }
        }
    }
    let mean = sum / count as f64;
    if mean <= 0.0 {
        return Err(SvmError::DegenerateData);
    }
    Ok(mean)
}
