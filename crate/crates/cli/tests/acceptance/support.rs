//! Shared machinery for the acceptance suite: an independent brute-force
//! oracle, seeded problem generators and fixture loading.
//!
//! The oracle path deliberately avoids the library's own solver and gap
//! code: plain dense vectors, its own gradient evaluation and a sort-based
//! simplex projection.
#![allow(dead_code)]

use fwsvm_core::io::{load_libsvm, Dataset};
use fwsvm_core::simplex::QuadraticObjective;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

/// Euclidean projection onto the unit simplex (sort-and-threshold).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Maximizes `-alpha' Q alpha` over the simplex by projected gradient
/// ascent, run until the primal-dual gap drops below `tolerance`. Returns
/// the optimal value and point.
pub fn projected_gradient_oracle(
    q: &[Vec<f64>],
    tolerance: f64,
    max_iterations: usize,
) -> (f64, Vec<f64>) {
    let m = q.len();
    let l = 2.0 * lambda_max(q);
    let step = 1.0 / l.max(1e-12);
    let mut alpha = vec![1.0 / m as f64; m];
    for _ in 0..max_iterations {
        // gradient of -a'Qa is -2Qa
        let mut grad = vec![0.0; m];
        for i in 0..m {
            let mut s = 0.0;
            for j in 0..m {
                s += q[i][j] * alpha[j];
            }
            grad[i] = -2.0 * s;
        }
        let adg: f64 = alpha.iter().zip(&grad).map(|(a, g)| a * g).sum();
        let max_grad = grad.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max_grad - adg <= tolerance {
            break;
        }
        let moved: Vec<f64> = alpha
            .iter()
            .zip(&grad)
            .map(|(a, g)| a + step * g)
            .collect();
        alpha = project_simplex(&moved);
    }
    let mut value = 0.0;
    for i in 0..m {
        for j in 0..m {
            value -= alpha[i] * q[i][j] * alpha[j];
        }
    }
    (value, alpha)
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
pub fn lambda_max(q: &[Vec<f64>]) -> f64 {
    let m = q.len();
    let mut v = vec![1.0 / (m as f64).sqrt(); m];
    let mut eig = 0.0_f64;
    for _ in 0..20_000 {
        let mut w = vec![0.0; m];
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = q[i].iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let delta = (norm - eig).abs();
        v = w.into_iter().map(|x| x / norm).collect();
        eig = norm;
        if delta <= 1e-14 * eig.max(1.0) {
            break;
        }
    }
    eig
}

/// Random symmetric positive-definite matrix `A'A/m + 0.2 I`.
pub fn random_pd_matrix(m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let a: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let mut q = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            let mut s = 0.0;
            for row in &a {
                s += row[i] * row[j];
            }
            q[i][j] = s / m as f64;
            if i == j {
                q[i][j] += 0.2;
            }
        }
    }
    q
}

pub fn quadratic(q: Vec<Vec<f64>>) -> QuadraticObjective {
    QuadraticObjective::new(q)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn load_fixture(name: &str) -> Dataset {
    load_libsvm(fixture_path(name)).expect("fixture parses")
}

pub fn relative_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Double-double value for compensated evaluation of quadratic forms.
/// Near a tight optimum the per-step objective improvements sit far below
/// plain f64 resolution; error ratios are only meaningful when the
/// objective differences are carried to ~1e-32 relative precision.
#[derive(Debug, Clone, Copy)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: err }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    let e = a.mul_add(b, -p);
    Dd { hi: p, lo: e }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn add(self, other: Dd) -> Dd {
        let s = two_sum(self.hi, other.hi);
        let lo = s.lo + self.lo + other.lo;
        two_sum(s.hi, lo)
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    pub fn mul_f64(self, c: f64) -> Dd {
        let p = two_prod(self.hi, c);
        let lo = self.lo.mul_add(c, p.lo);
        two_sum(p.hi, lo)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `alpha' Q alpha` in double-double precision.
pub fn quad_form_dd(q: &[Vec<f64>], alpha: &[f64]) -> Dd {
    let mut acc = Dd::ZERO;
    for (i, &ai) in alpha.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &aj) in alpha.iter().enumerate() {
            if aj == 0.0 {
                continue;
            }
            acc = acc.add(two_prod(ai, q[i][j]).mul_f64(aj));
        }
    }
    acc
}
