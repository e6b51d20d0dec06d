//! Hermitian eigen-decomposition and continuous eigenpaths of polynomial
//! one-parameter families `L(t) = Σ_k C_k t^k` with `L(t)` self-adjoint for
//! real `t`.
//!
//! Eigenpaths are tracked numerically: each sample is diagonalized, and
//! consecutive samples are linked by the permutation that maximizes total
//! eigenvector overlap. Exactly degenerate eigenspaces are rotated onto the
//! previous sample's vectors so that crossings follow the analytic branches
//! rather than the sorted order.

mod assign;
mod io;
mod paths;

pub use assign::best_assignment;
pub use io::FamilyJson;
pub use paths::{
    eigenpaths, eigenpaths_with, match_step, multiplicity_pattern, segment_breakpoints, segment_breakpoints_with,
    BreakpointOptions, EigenPathBundle, PathOptions, TrackedSample,
};

use crate::linalg::{self, fix_phase, CMat, CVec};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix is not self-adjoint: ‖H − H†‖ = {defect:e}")]
    NotSelfAdjoint { defect: f64 },
    #[error("family must have n ≥ 1 and at least one coefficient")]
    EmptyFamily,
    #[error("coefficient {index} has shape {rows}x{cols}, expected {n}x{n}")]
    Shape {
        index: usize,
        rows: usize,
        cols: usize,
        n: usize,
    },
    #[error("vectors are linearly dependent: rank {rank} < {count}")]
    RankDeficient { rank: usize, count: usize },
    #[error("ambiguous eigenvalue crossing near t = {t} (step floor reached)")]
    DegenerateCrossing { t: f64 },
    #[error("grid resolution must be at least 2 samples, got {0}")]
    Resolution(usize),
    #[error("invalid interval [{0}, {1}]")]
    Interval(f64, f64),
    #[error("malformed family data: {0}")]
    Format(String),
}

/// Relative self-adjointness tolerance for inputs.
pub const SELF_ADJOINT_TOL: f64 = 1e-12;

/// Rank tolerance for Gram–Schmidt input validation.
pub const RANK_TOL: f64 = 1e-10;

/// Real-parameter polynomial family of self-adjoint matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianFamily {
    n: usize,
    coefficients: Vec<CMat>,
}

impl HermitianFamily {
    /// Validates that every coefficient is `n × n` and self-adjoint, which is
    /// equivalent to `L(t)` being self-adjoint for all real `t`.
    pub fn new(coefficients: Vec<CMat>) -> Result<Self, SpectralError> {
        let n = coefficients.first().map(|c| c.nrows()).unwrap_or(0);
        if n == 0 {
            return Err(SpectralError::EmptyFamily);
        }
        for (index, c) in coefficients.iter().enumerate() {
            if c.nrows() != n || c.ncols() != n {
                return Err(SpectralError::Shape {
                    index,
                    rows: c.nrows(),
                    cols: c.ncols(),
                    n,
                });
            }
            let defect = linalg::hermitian_defect(c);
            if defect > SELF_ADJOINT_TOL * (1.0 + linalg::norm(c)) {
                return Err(SpectralError::NotSelfAdjoint { defect });
            }
        }
        Ok(Self { n, coefficients })
    }

    pub fn constant(a: CMat) -> Result<Self, SpectralError> {
        Self::new(vec![a])
    }

    /// `L(t) = a + t·b`.
    pub fn linear(a: CMat, b: CMat) -> Result<Self, SpectralError> {
        Self::new(vec![a, b])
    }

    pub const DEMOS: [&'static str; 3] = ["constant", "crossing", "avoided"];

    /// Named closed-form families on `[−1, 1]`: `constant` is `diag(1, 2)`,
    /// `crossing` is `diag(t, −t)` and `avoided` is `[[t, 1], [1, −t]]`.
    pub fn demo(name: &str) -> Option<Self> {
        let m = |e: [f64; 4]| CMat::from_fn(2, 2, |i, j| linalg::re(e[2 * i + j]));
        let f = match name {
            "constant" => Self::constant(m([1.0, 0.0, 0.0, 2.0])),
            "crossing" => Self::linear(m([0.0; 4]), m([1.0, 0.0, 0.0, -1.0])),
            "avoided" => Self::linear(m([0.0, 1.0, 1.0, 0.0]), m([1.0, 0.0, 0.0, -1.0])),
            _ => return None,
        };
        f.ok()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[CMat] {
        &self.coefficients
    }

    /// Horner evaluation, symmetrized to remove rounding asymmetry.
    pub fn eval(&self, t: f64) -> CMat {
        let mut acc = CMat::zeros(self.n, self.n);
        for c in self.coefficients.iter().rev() {
            acc = acc * linalg::re(t) + c;
        }
        linalg::hermitian_part(&acc)
    }

    /// Upper bound on `sup ‖L'(t)‖` over the interval, which by Weyl's
    /// inequality bounds the Lipschitz constant of every eigenvalue branch.
    pub fn lipschitz_bound(&self, a: f64, b: f64) -> f64 {
        let r = a.abs().max(b.abs());
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * linalg::norm(c) * r.powi(k as i32 - 1))
            .sum()
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvector columns. Each
/// column is normalized so its largest-magnitude entry is real positive.
pub fn hermitian_eigen(h: &CMat) -> Result<(Vec<f64>, CMat), SpectralError> {
    let defect = linalg::hermitian_defect(h);
    if defect > SELF_ADJOINT_TOL * (1.0 + linalg::norm(h)) {
        return Err(SpectralError::NotSelfAdjoint { defect });
    }
    let n = h.nrows();
    let eig = linalg::hermitian_part(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut v: CVec = eig.eigenvectors.column(k).into_owned();
        v /= linalg::re(v.norm());
        fix_phase(&mut v);
        vectors.set_column(col, &v);
    }
    Ok((values, vectors))
}

/// Modified Gram–Schmidt with one re-orthogonalization pass. Output vectors
/// are orthonormal and the k-th lies in the span of the first k inputs.
pub fn gram_schmidt(vectors: &[CVec]) -> Result<Vec<CVec>, SpectralError> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let dim = vectors[0].len();
    let mut stacked = CMat::zeros(dim, vectors.len());
    for (k, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(SpectralError::Format(format!(
                "vector {k} has length {}, expected {dim}",
                v.len()
            )));
        }
        stacked.set_column(k, v);
    }
    let r = linalg::rank(&stacked, RANK_TOL);
    if r < vectors.len() {
        return Err(SpectralError::RankDeficient {
            rank: r,
            count: vectors.len(),
        });
    }
    let mut out: Vec<CVec> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let proj = q.dotc(&w);
                w -= q * proj;
            }
        }
        let nrm = w.norm();
        w /= linalg::re(nrm);
        out.push(w);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag_real, identity, random_complex, random_hermitian, re};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn residual(h: &CMat, values: &[f64], vectors: &CMat) -> f64 {
        (0..values.len())
            .map(|k| {
                let v = vectors.column(k);
                (h * v - v * re(values[k])).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let (vals, vecs) = hermitian_eigen(&identity(2)).unwrap();
        assert_eq!(vals.len(), 2);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        assert!((vecs.adjoint() * &vecs - identity(2)).norm() < 1e-12);
    }

    #[test]
    fn diagonal_sorted_ascending() {
        let (vals, vecs) = hermitian_eigen(&diag_real(&[3.0, 1.0])).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        assert!((vecs[(1, 0)] - re(1.0)).norm() < 1e-12);
        assert!((vecs[(0, 1)] - re(1.0)).norm() < 1e-12);
    }

    #[test]
    fn pauli_x_eigenvectors() {
        // characteristic polynomial λ² − 1
        let h = CMat::from_row_slice(2, 2, &[re(0.0), re(1.0), re(1.0), re(0.0)]);
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = vecs.column(0);
        let v1 = vecs.column(1);
        assert!((v0[0].norm() - s).abs() < 1e-12 && (v0[0] + v0[1]).norm() < 1e-12);
        assert!((v1[0] - v1[1]).norm() < 1e-12);
    }

    #[test]
    fn random_hermitian_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=6 {
            let h = random_hermitian(&mut rng, n);
            let (vals, vecs) = hermitian_eigen(&h).unwrap();
            assert!(residual(&h, &vals, &vecs) < 1e-10);
            assert!((vecs.adjoint() * &vecs - identity(n)).norm() < 1e-10);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn non_self_adjoint_rejected() {
        let h = CMat::from_row_slice(2, 2, &[re(0.0), re(1.0), re(0.0), re(0.0)]);
        match hermitian_eigen(&h) {
            Err(SpectralError::NotSelfAdjoint { defect }) => assert!((defect - 2f64.sqrt()).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn family_rejects_non_hermitian_coefficient() {
        let bad = CMat::from_row_slice(2, 2, &[re(0.0), c(0.0, 1.0), c(0.0, 1.0), re(0.0)]);
        assert!(HermitianFamily::linear(identity(2), bad).is_err());
        assert!(matches!(HermitianFamily::new(vec![]), Err(SpectralError::EmptyFamily)));
    }

    #[test]
    fn gram_schmidt_orthonormal_input_unchanged() {
        let e0 = CVec::from_column_slice(&[re(1.0), re(0.0)]);
        let e1 = CVec::from_column_slice(&[re(0.0), re(1.0)]);
        let out = gram_schmidt(&[e0.clone(), e1.clone()]).unwrap();
        assert!((&out[0] - e0).norm() < 1e-15 && (&out[1] - e1).norm() < 1e-15);
    }

    #[test]
    fn gram_schmidt_single_projection() {
        let a = CVec::from_column_slice(&[re(1.0), re(0.0)]);
        let b = CVec::from_column_slice(&[re(1.0), re(1.0)]);
        let out = gram_schmidt(&[a, b]).unwrap();
        assert!((out[1][0]).norm() < 1e-15 && (out[1][1] - re(1.0)).norm() < 1e-15);
    }

    #[test]
    fn gram_schmidt_random_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_complex(&mut rng, 4, 4);
        let vs: Vec<CVec> = (0..4).map(|k| m.column(k).into_owned()).collect();
        let out = gram_schmidt(&vs).unwrap();
        let mut q = CMat::zeros(4, 4);
        for (k, v) in out.iter().enumerate() {
            q.set_column(k, v);
        }
        let gram = q.adjoint() * &q;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(gram[(i, j)].norm() < 1e-10);
                }
            }
        }
        // k-th output lies in the span of the first k inputs
        for k in 0..4 {
            let mut span = CMat::zeros(4, k + 2);
            for j in 0..=k {
                span.set_column(j, &vs[j]);
            }
            span.set_column(k + 1, &out[k]);
            assert_eq!(linalg::rank(&span, 1e-10), k + 1);
        }
    }

    #[test]
    fn gram_schmidt_dependent_input() {
        let a = CVec::from_column_slice(&[re(1.0), re(2.0), re(0.0)]);
        let b = &a * c(0.0, 3.0);
        let e = CVec::from_column_slice(&[re(0.0), re(0.0), re(1.0)]);
        assert_eq!(
            gram_schmidt(&[a, e, b]),
            Err(SpectralError::RankDeficient { rank: 2, count: 3 })
        );
    }
}
