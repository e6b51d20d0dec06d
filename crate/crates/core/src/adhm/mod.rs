//! ADHM-type data `(X, Y, i, j)` with `X` invertible.

mod io;
mod kempf_ness;

pub use io::{AdhmJson, PointsJson};
pub use kempf_ness::{
    kempf_ness_flow, kempf_ness_flow_with, pairing_check, FlowOptions, KNDirectionResult, KNOrbitProblem, KNOutcome,
};

use nalgebra::RowDVector;
use rand::Rng;
use thiserror::Error;

use crate::linalg::{self, CMat, CVec, C64};

pub type CRow = RowDVector<C64>;

/// Condition-number ceiling for inverting `X` and gauge elements.
pub const MAX_COND: f64 = 1e12;
pub const DET_TOL: f64 = 1e-12;
pub const STABILITY_TOL: f64 = 1e-10;
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdhmError {
    #[error("X is not invertible (|det X| = {det:e})")]
    NotInvertible { det: f64 },
    #[error("matrix is singular or ill-conditioned (condition number {cond:e})")]
    Singular { cond: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("point {index} has x = 0")]
    ZeroX { index: usize },
    #[error("points {0} and {1} coincide")]
    RepeatedPoint(usize, usize),
    #[error("ζ = {zeta} is not an n-th root of unity for n = {n} (|ζⁿ − 1| = {defect:e})")]
    NotRoot { zeta: C64, n: usize, defect: f64 },
    #[error("length must be positive")]
    EmptyBlock,
    #[error("malformed input: {0}")]
    Format(String),
}

impl From<linalg::LinalgError> for AdhmError {
    fn from(e: linalg::LinalgError) -> Self {
        match e {
            linalg::LinalgError::Singular { cond } => AdhmError::Singular { cond },
            other => AdhmError::Dimension(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ADHMData {
    pub x: CMat,
    pub y: CMat,
    pub i: CVec,
    pub j: CRow,
}

impl ADHMData {
    pub fn new(x: CMat, y: CMat, i: CVec, j: CRow) -> Result<Self, AdhmError> {
        let n = x.nrows();
        if !x.is_square() || y.shape() != (n, n) || i.len() != n || j.len() != n {
            return Err(AdhmError::Dimension(format!(
                "X {:?}, Y {:?}, i {}, j {}",
                x.shape(),
                y.shape(),
                i.len(),
                j.len()
            )));
        }
        let det = linalg::det(&x).norm();
        if !(det > DET_TOL) {
            return Err(AdhmError::NotInvertible { det });
        }
        Ok(Self { x, y, i, j })
    }

    pub fn dim(&self) -> usize {
        self.x.nrows()
    }

    fn x_inv(&self) -> Result<CMat, AdhmError> {
        Ok(linalg::inverse_checked(&self.x, MAX_COND)?)
    }

    /// `1 + ‖X‖ + ‖X⁻¹‖ + ‖Y‖ + ‖i‖‖j‖`, a size for relative tolerances.
    pub fn scale(&self) -> f64 {
        let xi = self.x_inv().map_or(f64::INFINITY, |m| m.norm());
        1.0 + self.x.norm() + xi + self.y.norm() + self.i.norm() * self.j.norm()
    }

    /// Direct sum of blocks.
    pub fn direct_sum(blocks: &[ADHMData]) -> Result<Self, AdhmError> {
        let n: usize = blocks.iter().map(ADHMData::dim).sum();
        let mut x = CMat::zeros(n, n);
        let mut y = CMat::zeros(n, n);
        let mut i = CVec::zeros(n);
        let mut j = CRow::zeros(n);
        let mut at = 0;
        for b in blocks {
            let k = b.dim();
            x.view_mut((at, at), (k, k)).copy_from(&b.x);
            y.view_mut((at, at), (k, k)).copy_from(&b.y);
            i.rows_mut(at, k).copy_from(&b.i);
            j.columns_mut(at, k).copy_from(&b.j);
            at += k;
        }
        Self::new(x, y, i, j)
    }
}

/// `X Y X⁻¹ − Y + i j`.
pub fn complex_moment(d: &ADHMData) -> Result<CMat, AdhmError> {
    let xi = d.x_inv()?;
    Ok(&d.x * &d.y * xi - &d.y + &d.i * &d.j)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NakajimaForm {
    pub x: CMat,
    pub y: CMat,
    pub i: CVec,
    /// `j′ = jX`.
    pub j_prime: CRow,
    /// `‖X Y X⁻¹ − Y + ij‖`.
    pub moment_residual: f64,
    /// `‖[X, Y] + ij′‖`.
    pub nakajima_residual: f64,
    /// 2-norm condition number of `X`.
    pub cond: f64,
}

/// `(X, Y, i, jX)` with both residuals. Since `[X, Y] + ijX = μX`, the
/// residuals satisfy `r_N ≤ ‖X‖₂ r_μ` and `r_μ ≤ ‖X⁻¹‖₂ r_N`.
pub fn nakajima_form(d: &ADHMData) -> Result<NakajimaForm, AdhmError> {
    let mu = complex_moment(d)?;
    let j_prime = &d.j * &d.x;
    let nak = linalg::commutator(&d.x, &d.y) + &d.i * &j_prime;
    Ok(NakajimaForm {
        x: d.x.clone(),
        y: d.y.clone(),
        i: d.i.clone(),
        moment_residual: mu.norm(),
        nakajima_residual: nak.norm(),
        cond: linalg::condition_number(&d.x),
        j_prime,
    })
}

/// `(det X, Tr Y)`.
pub fn det_tr(d: &ADHMData) -> (C64, C64) {
    (linalg::det(&d.x), d.y.trace())
}

/// A multiset of points `(x, y)` with `x ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    points: Vec<(C64, C64)>,
}

impl PointConfig {
    pub fn new(points: Vec<(C64, C64)>) -> Result<Self, AdhmError> {
        if let Some(index) = points.iter().position(|p| p.0 == C64::new(0.0, 0.0)) {
            return Err(AdhmError::ZeroX { index });
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(C64, C64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `n` points with `|x|` in `[0.5, 2)`, uniform `arg x`, and `y` uniform
    /// in the unit square.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let points = (0..n)
            .map(|_| {
                let x = C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU));
                (x, C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            })
            .collect();
        Self { points }
    }

    /// `(∏ x, Σ y)`.
    pub fn product_sum(&self) -> (C64, C64) {
        self.points
            .iter()
            .fold((C64::new(1.0, 0.0), C64::new(0.0, 0.0)), |(p, s), &(x, y)| {
                (p * x, s + y)
            })
    }

    /// Multiset equality up to `tol` per coordinate.
    pub fn same_multiset(&self, other: &PointConfig, tol: f64) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut used = vec![false; other.len()];
        self.points.iter().all(|&(x, y)| {
            let hit = other
                .points
                .iter()
                .enumerate()
                .position(|(k, &(u, v))| !used[k] && (x - u).norm() <= tol && (y - v).norm() <= tol);
            hit.map(|k| used[k] = true).is_some()
        })
    }
}

/// Diagonal representative `X = diag(x)`, `Y = diag(y)`, `i = 1`, `j = 0`
/// of pairwise distinct points.
pub fn from_points(cfg: &PointConfig) -> Result<ADHMData, AdhmError> {
    let p = cfg.points();
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            if p[a] == p[b] {
                return Err(AdhmError::RepeatedPoint(a, b));
            }
        }
    }
    let xs: Vec<C64> = p.iter().map(|q| q.0).collect();
    let ys: Vec<C64> = p.iter().map(|q| q.1).collect();
    let n = p.len();
    ADHMData::new(
        linalg::diag(&xs),
        linalg::diag(&ys),
        CVec::from_element(n, linalg::re(1.0)),
        CRow::zeros(n),
    )
}

/// Punctual block at `ζ` of length `m`: `X = ζI`, `Y` the nilpotent Jordan
/// block `Y e_k = e_{k+1}`, `i = e_1`, `j = 0`.
pub fn fixed_point_data(zeta: C64, m: usize) -> Result<ADHMData, AdhmError> {
    if m == 0 {
        return Err(AdhmError::EmptyBlock);
    }
    let mut y = CMat::zeros(m, m);
    for k in 0..m - 1 {
        y[(k + 1, k)] = linalg::re(1.0);
    }
    let mut i = CVec::zeros(m);
    i[0] = linalg::re(1.0);
    ADHMData::new(linalg::identity(m) * zeta, y, i, CRow::zeros(m))
}

/// Dimension of the span of all words of length `≤ 2n` in `X, X⁻¹, Y`
/// applied to `i`.
pub fn krylov_rank(d: &ADHMData) -> Result<usize, AdhmError> {
    let n = d.dim();
    let xi = d.x_inv()?;
    let ops = [&d.x, &xi, &d.y];
    let mut basis = orthonormal_columns(&CMat::from_columns(std::slice::from_ref(&d.i)));
    for _ in 0..2 * n {
        if basis.ncols() == n || basis.ncols() == 0 {
            break;
        }
        let mut cols: Vec<CVec> = basis.column_iter().map(|c| c.into_owned()).collect();
        for op in ops {
            cols.extend((op * &basis).column_iter().map(|c| c.into_owned()));
        }
        let next = orthonormal_columns(&CMat::from_columns(&cols));
        if next.ncols() == basis.ncols() {
            basis = next;
            break;
        }
        basis = next;
    }
    if basis.ncols() == 0 {
        return Ok(0);
    }
    Ok(linalg::rank(&basis, STABILITY_TOL))
}

/// Left singular vectors above `STABILITY_TOL` relative to the largest.
fn orthonormal_columns(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| top > 0.0 && svd.singular_values[k] > STABILITY_TOL * top)
        .collect();
    CMat::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// `i` is cyclic for the algebra generated by `X^{±1}` and `Y`.
pub fn is_stable(d: &ADHMData) -> bool {
    krylov_rank(d).is_ok_and(|r| r == d.dim())
}

/// `g·(X, Y, i, j) = (gXg⁻¹, gYg⁻¹, gi, jg⁻¹)`.
pub fn group_act(g: &CMat, d: &ADHMData) -> Result<ADHMData, AdhmError> {
    if g.shape() != (d.dim(), d.dim()) {
        return Err(AdhmError::Dimension(format!(
            "g is {:?}, data has n = {}",
            g.shape(),
            d.dim()
        )));
    }
    let gi = linalg::inverse_checked(g, MAX_COND)?;
    ADHMData::new(g * &d.x * &gi, g * &d.y * &gi, g * &d.i, &d.j * &gi)
}

/// `(x, y) ↦ (ζx, y)` for `ζ` an `n`-th root of unity, `n` the number of
/// points.
pub fn gamma_act_points(zeta: C64, cfg: &PointConfig) -> Result<PointConfig, AdhmError> {
    let n = cfg.len();
    let defect = (zeta.powu(n as u32) - linalg::re(1.0)).norm();
    if defect > ROOT_TOL {
        return Err(AdhmError::NotRoot { zeta, n, defect });
    }
    PointConfig::new(cfg.points().iter().map(|&(x, y)| (zeta * x, y)).collect())
}
