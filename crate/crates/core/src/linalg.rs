//! Dense complex linear algebra shared by every module.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`; the Frobenius norm
//! `‖A‖² = Tr(A A†)` is used throughout.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

pub type C64 = Complex64;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular or ill-conditioned (condition number {cond:e})")]
    Singular { cond: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn diag(entries: &[C64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(entries))
}

pub fn diag_real(entries: &[f64]) -> CMat {
    let v: Vec<C64> = entries.iter().map(|&x| re(x)).collect();
    diag(&v)
}

/// Matrix unit `E_{rc}` (zero-based).
pub fn unit(n: usize, r: usize, col: usize) -> CMat {
    let mut m = zeros(n);
    m[(r, col)] = re(1.0);
    m
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Frobenius norm.
pub fn norm(a: &CMat) -> f64 {
    a.norm()
}

pub fn norm_sq(a: &CMat) -> f64 {
    a.norm_squared()
}

/// `‖A − A†‖`, the distance from self-adjointness.
pub fn hermitian_defect(a: &CMat) -> f64 {
    (a - a.adjoint()).norm()
}

/// `‖A + A†‖`, the distance from skew-adjointness.
pub fn skew_defect(a: &CMat) -> f64 {
    (a + a.adjoint()).norm()
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * re(0.5)
}

pub fn skew_part(a: &CMat) -> CMat {
    (a - a.adjoint()) * re(0.5)
}

/// Imaginary part with respect to the real form `u(n)`: for `A = P + iQ`
/// with `P, Q` skew-Hermitian this returns `Q = (A + A†) / 2i`.
pub fn im_part(a: &CMat) -> CMat {
    (a + a.adjoint()) / c(0.0, 2.0)
}

/// Real part with respect to `u(n)`: `P = (A − A†) / 2`.
pub fn re_part(a: &CMat) -> CMat {
    skew_part(a)
}

pub fn singular_values(a: &CMat) -> Vec<f64> {
    a.clone().singular_values().iter().copied().collect()
}

/// 2-norm condition number; `inf` for singular matrices.
pub fn condition_number(a: &CMat) -> f64 {
    let sv = singular_values(a);
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse guarded by a condition-number ceiling.
pub fn inverse_checked(a: &CMat, max_cond: f64) -> Result<CMat, LinalgError> {
    let cond = condition_number(a);
    if !cond.is_finite() || cond > max_cond {
        return Err(LinalgError::Singular { cond });
    }
    a.clone().try_inverse().ok_or(LinalgError::Singular { cond })
}

pub fn det(a: &CMat) -> C64 {
    a.clone().determinant()
}

pub fn trace(a: &CMat) -> C64 {
    a.trace()
}

/// Numerical rank by Gaussian elimination with complete pivoting. A pivot
/// counts when it exceeds `tol · max|a_ij|`.
pub fn rank(a: &CMat, tol: f64) -> usize {
    let mut m = a.clone();
    let (rows, cols) = m.shape();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut r = 0;
    for _ in 0..rows.min(cols) {
        let mut best = (r, r, 0.0);
        for i in r..rows {
            for j in r..cols {
                let v = m[(i, j)].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= tol * scale {
            break;
        }
        m.swap_rows(r, best.0);
        m.swap_columns(r, best.1);
        let p = m[(r, r)];
        for i in (r + 1)..rows {
            let f = m[(i, r)] / p;
            if f != C64::new(0.0, 0.0) {
                for j in r..cols {
                    let sub = f * m[(r, j)];
                    m[(i, j)] -= sub;
                }
            }
        }
        r += 1;
    }
    r
}

/// Unitary polar factor `Q` of `A = Q P` (`P` positive semidefinite).
pub fn polar_unitary(a: &CMat) -> CMat {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^t");
    u * v_t
}

/// Multiply a column by a unit phase so that its largest-magnitude entry is
/// real and positive. Ties go to the lowest index.
pub fn fix_phase(v: &mut CVec) {
    let mut best = 0;
    let mut mag = -1.0;
    for (k, z) in v.iter().enumerate() {
        // small slack keeps the choice stable under rounding
        if z.norm() > mag * (1.0 + 1e-12) {
            mag = z.norm();
            best = k;
        }
    }
    if mag <= 0.0 {
        return;
    }
    let phase = v[best].conj() / v[best].norm();
    *v *= phase;
}

/// Entry-wise i.i.d. complex standard normal (`E|z|² = 1`).
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        c(a * s, b * s)
    })
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    let m = random_complex(rng, n, 1);
    CVec::from_column_slice(m.as_slice())
}

pub fn random_skew<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    skew_part(&random_complex(rng, n, n))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    hermitian_part(&random_complex(rng, n, n))
}

/// Random unitary: the polar factor of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    polar_unitary(&random_complex(rng, n, n))
}

/// Flatten row-major into `[re, im]` pairs.
pub fn to_pairs(a: &CMat) -> Vec<[f64; 2]> {
    let (r, cols) = a.shape();
    let mut out = Vec::with_capacity(r * cols);
    for i in 0..r {
        for j in 0..cols {
            out.push([a[(i, j)].re, a[(i, j)].im]);
        }
    }
    out
}

pub fn from_pairs(rows: usize, cols: usize, data: &[[f64; 2]]) -> Result<CMat, LinalgError> {
    if data.len() != rows * cols {
        return Err(LinalgError::Dimension {
            expected: rows * cols,
            found: data.len(),
        });
    }
    Ok(CMat::from_fn(rows, cols, |i, j| {
        let p = data[i * cols + j];
        c(p[0], p[1])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rank_detects_dependence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_complex(&mut rng, 4, 2);
        let b = &a * random_complex(&mut rng, 2, 4);
        assert_eq!(rank(&b, 1e-10), 2);
        assert_eq!(rank(&random_complex(&mut rng, 4, 4), 1e-10), 4);
        assert_eq!(rank(&zeros(3), 1e-10), 0);
    }

    #[test]
    fn im_part_recovers_skew_component() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_skew(&mut rng, 3);
        let q = random_skew(&mut rng, 3);
        let a = &p + &q * I;
        assert!(norm(&(im_part(&a) - &q)) < 1e-12);
        assert!(norm(&(re_part(&a) - &p)) < 1e-12);
    }

    #[test]
    fn polar_factor_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = random_unitary(&mut rng, 4);
        assert!(norm(&(q.adjoint() * &q - identity(4))) < 1e-12);
    }

    #[test]
    fn phase_convention() {
        let mut v = CVec::from_column_slice(&[c(0.1, 0.0), c(0.0, -2.0)]);
        fix_phase(&mut v);
        assert!((v[1] - re(2.0)).norm() < 1e-15);
        assert!((v[0] - c(0.0, 0.1)).norm() < 1e-15);
    }

    #[test]
    fn singular_inverse_rejected() {
        let m = diag_real(&[1.0, 0.0]);
        assert!(matches!(inverse_checked(&m, 1e12), Err(LinalgError::Singular { .. })));
    }
}
