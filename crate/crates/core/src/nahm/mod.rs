//! Nahm data sampled on a uniform grid of `[0, 1]`.
//!
//! Derivatives are second order everywhere (central in the interior,
//! three-point one-sided at the ends) and integrals use the trapezoid rule,
//! so every discretization error is `O(h²)`.

mod growth;
mod io;

pub use growth::{
    canonical_trials, evaluate_trial, flow_classify_analytic, flow_classify_analytic_with, flow_classify_numeric,
    flow_classify_numeric_with, growth_profile, run_trials, trial_seed, AnalyticOptions, AnalyticReport, FitReport,
    GrowthClass, GrowthTag, NumericOptions, TrialKind, TrialRecord, TrialSpec, CANONICAL_TAGS,
};
pub use io::{write_trials_csv, NahmJson, PairJson};

use crate::linalg::{self, CMat, I};
use crate::spectral::SpectralError;
use rand::Rng;
use thiserror::Error;

pub const DEFAULT_GRID: usize = 256;
/// Condition-number ceiling for gauge samples.
pub const MAX_GAUGE_COND: f64 = 1e14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NahmError {
    #[error("grid needs at least 2 intervals, got {0}")]
    Grid(usize),
    #[error("T{component} at sample {sample} is not skew-Hermitian (defect {defect:e})")]
    NotSkewHermitian {
        component: usize,
        sample: usize,
        defect: f64,
    },
    #[error("inconsistent shapes: {0}")]
    Shape(String),
    #[error("grids differ: {0} vs {1} intervals")]
    GridMismatch(usize, usize),
    #[error("gauge sample {sample} is not invertible (condition number {cond:e})")]
    Singular { sample: usize, cond: f64 },
    #[error("left-right generator is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("growth classification ambiguous: {0}")]
    Ambiguous(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("malformed input: {0}")]
    Format(String),
}

/// Sample `k` of an `m`-interval grid.
#[inline]
pub fn grid_point(m: usize, k: usize) -> f64 {
    k as f64 / m as f64
}

pub fn grid(m: usize) -> Vec<f64> {
    (0..=m).map(|k| grid_point(m, k)).collect()
}

/// Second-order finite-difference derivative of uniformly sampled matrices.
pub fn derivative(samples: &[CMat], h: f64) -> Vec<CMat> {
    let m = samples.len() - 1;
    let inv = linalg::re(1.0 / (2.0 * h));
    (0..=m)
        .map(|k| {
            let d = if k == 0 {
                &samples[1] * linalg::re(4.0) - &samples[0] * linalg::re(3.0) - &samples[2]
            } else if k == m {
                &samples[m] * linalg::re(3.0) - &samples[m - 1] * linalg::re(4.0) + &samples[m - 2]
            } else {
                &samples[k + 1] - &samples[k - 1]
            };
            d * inv
        })
        .collect()
}

pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let m = values.len() - 1;
    let inner: f64 = values[1..m].iter().sum();
    h * (inner + 0.5 * (values[0] + values[m]))
}

fn check_samples(samples: &[&[CMat]]) -> Result<(usize, usize), NahmError> {
    let len = samples[0].len();
    if len < 3 {
        return Err(NahmError::Grid(len.saturating_sub(1)));
    }
    let n = samples[0][0].nrows();
    for (c, s) in samples.iter().enumerate() {
        if s.len() != len {
            return Err(NahmError::Shape(format!(
                "component {c} has {} samples, expected {len}",
                s.len()
            )));
        }
        if let Some(k) = s.iter().position(|a| a.shape() != (n, n)) {
            return Err(NahmError::Shape(format!(
                "component {c} sample {k} is {:?}, expected {n}x{n}",
                s[k].shape()
            )));
        }
    }
    Ok((n, len - 1))
}

/// `(T0, T1, T2, T3)` sampled at `t_k = k/M`, each skew-Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct NahmQuadruple {
    n: usize,
    m: usize,
    t: [Vec<CMat>; 4],
}

impl NahmQuadruple {
    pub fn new(t: [Vec<CMat>; 4]) -> Result<Self, NahmError> {
        let (n, m) = check_samples(&[&t[0], &t[1], &t[2], &t[3]])?;
        for (component, s) in t.iter().enumerate() {
            for (sample, a) in s.iter().enumerate() {
                let defect = linalg::skew_defect(a);
                if defect > 1e-12 * (1.0 + linalg::norm(a)) {
                    return Err(NahmError::NotSkewHermitian {
                        component,
                        sample,
                        defect,
                    });
                }
            }
        }
        Ok(Self { n, m, t })
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> [CMat; 4]) -> Result<Self, NahmError> {
        let mut t: [Vec<CMat>; 4] = Default::default();
        for k in 0..=m {
            for (a, x) in f(grid_point(m, k)).into_iter().enumerate() {
                t[a].push(x);
            }
        }
        Self::new(t)
    }

    pub fn zero(n: usize, m: usize) -> Result<Self, NahmError> {
        Self::from_fn(m, |_| std::array::from_fn(|_| linalg::zeros(n)))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn intervals(&self) -> usize {
        self.m
    }

    pub fn step(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn component(&self, a: usize) -> &[CMat] {
        &self.t[a]
    }

    /// The closed-form su(2) solution `T0 = 0`, `T_i(t) = −e_i/(t + c)` with
    /// `e_i = −(i/2)σ_i`.
    pub fn su2(m: usize, c: f64) -> Result<Self, NahmError> {
        let e = su2_basis();
        Self::from_fn(m, |t| {
            let f = linalg::re(-1.0 / (t + c));
            [linalg::zeros(2), &e[0] * f, &e[1] * f, &e[2] * f]
        })
    }

    /// Random quadratic-in-`t` skew-Hermitian components.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Result<Self, NahmError> {
        let coef: Vec<[CMat; 3]> = (0..4)
            .map(|_| std::array::from_fn(|_| linalg::random_skew(rng, n)))
            .collect();
        Self::from_fn(m, |t| {
            std::array::from_fn(|a| {
                let [c0, c1, c2] = &coef[a];
                c0 + c1 * linalg::re(t) + c2 * linalg::re(t * t)
            })
        })
    }
}

/// `e_i = −(i/2)σ_i`, satisfying `[e_1, e_2] = e_3` cyclically.
pub fn su2_basis() -> [CMat; 3] {
    let z = linalg::re(0.0);
    let o = linalg::re(1.0);
    let sx = CMat::from_row_slice(2, 2, &[z, o, o, z]);
    let sy = CMat::from_row_slice(2, 2, &[z, -I, I, z]);
    let sz = CMat::from_row_slice(2, 2, &[o, z, z, -o]);
    let f = linalg::c(0.0, -0.5);
    [sx * f, sy * f, sz * f]
}

/// `(α, β)` sampled on the same grid convention as [`NahmQuadruple`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPair {
    n: usize,
    m: usize,
    pub alpha: Vec<CMat>,
    pub beta: Vec<CMat>,
}

impl ComplexPair {
    pub fn new(alpha: Vec<CMat>, beta: Vec<CMat>) -> Result<Self, NahmError> {
        let (n, m) = check_samples(&[&alpha, &beta])?;
        Ok(Self { n, m, alpha, beta })
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> (CMat, CMat)) -> Result<Self, NahmError> {
        let (alpha, beta) = (0..=m).map(|k| f(grid_point(m, k))).unzip();
        Self::new(alpha, beta)
    }

    pub fn constant(m: usize, alpha: CMat, beta: CMat) -> Result<Self, NahmError> {
        Self::from_fn(m, |_| (alpha.clone(), beta.clone()))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn intervals(&self) -> usize {
        self.m
    }

    pub fn step(&self) -> f64 {
        1.0 / self.m as f64
    }
}

/// `α = T0 + iT1`, `β = T2 + iT3`.
pub fn to_complex_pair(t: &NahmQuadruple) -> ComplexPair {
    let join = |a: &[CMat], b: &[CMat]| a.iter().zip(b).map(|(x, y)| x + y * I).collect();
    ComplexPair {
        n: t.n,
        m: t.m,
        alpha: join(&t.t[0], &t.t[1]),
        beta: join(&t.t[2], &t.t[3]),
    }
}

/// `α = T0 − iT1`, `β = T2 + iT3`: the convention under which solutions of
/// Nahm's equations solve the complex equation. `‖Im α‖ = ‖T1‖` either way.
pub fn to_complex_pair_conj(t: &NahmQuadruple) -> ComplexPair {
    let join = |a: &[CMat], b: &[CMat], sign: f64| a.iter().zip(b).map(|(x, y)| x + y * (I * sign)).collect();
    ComplexPair {
        n: t.n,
        m: t.m,
        alpha: join(&t.t[0], &t.t[1], -1.0),
        beta: join(&t.t[2], &t.t[3], 1.0),
    }
}

/// Inverse of [`to_complex_pair`]: the `u(n)` real and imaginary parts.
pub fn from_complex_pair(p: &ComplexPair) -> Result<NahmQuadruple, NahmError> {
    let split = |v: &[CMat], f: fn(&CMat) -> CMat| v.iter().map(f).collect::<Vec<_>>();
    NahmQuadruple::new([
        split(&p.alpha, linalg::re_part),
        split(&p.alpha, linalg::im_part),
        split(&p.beta, linalg::re_part),
        split(&p.beta, linalg::im_part),
    ])
}

/// `dT_i/dt + [T0, T_i] − [T_j, T_k]` for `(i, j, k)` cyclic.
pub fn nahm_residual(t: &NahmQuadruple) -> [Vec<CMat>; 3] {
    let h = t.step();
    std::array::from_fn(|idx| {
        let i = idx + 1;
        let j = i % 3 + 1;
        let k = j % 3 + 1;
        let dt = derivative(&t.t[i], h);
        dt.into_iter()
            .enumerate()
            .map(|(s, d)| d + linalg::commutator(&t.t[0][s], &t.t[i][s]) - linalg::commutator(&t.t[j][s], &t.t[k][s]))
            .collect()
    })
}

/// `dβ/dt + [α, β]`.
pub fn complex_nahm_residual(p: &ComplexPair) -> Vec<CMat> {
    derivative(&p.beta, p.step())
        .into_iter()
        .enumerate()
        .map(|(s, d)| d + linalg::commutator(&p.alpha[s], &p.beta[s]))
        .collect()
}

/// Largest Frobenius norm among the samples.
pub fn max_norm(samples: &[CMat]) -> f64 {
    samples.iter().map(linalg::norm).fold(0.0, f64::max)
}

/// Largest residual norm over the three real Nahm equations.
pub fn max_nahm_residual(t: &NahmQuadruple) -> f64 {
    nahm_residual(t).iter().map(|v| max_norm(v)).fold(0.0, f64::max)
}

/// An invertible gauge path sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePath {
    m: usize,
    g: Vec<CMat>,
    g_inv: Vec<CMat>,
    boundary_trivial: bool,
}

impl GaugePath {
    pub fn new(g: Vec<CMat>) -> Result<Self, NahmError> {
        check_samples(&[&g])?;
        let g_inv = g
            .iter()
            .enumerate()
            .map(|(sample, a)| {
                linalg::inverse_checked(a, MAX_GAUGE_COND).map_err(|e| match e {
                    linalg::LinalgError::Singular { cond } => NahmError::Singular { sample, cond },
                    other => NahmError::Shape(other.to_string()),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::assemble(g, g_inv))
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> CMat) -> Result<Self, NahmError> {
        Self::new((0..=m).map(|k| f(grid_point(m, k))).collect())
    }

    fn assemble(g: Vec<CMat>, g_inv: Vec<CMat>) -> Self {
        let n = g[0].nrows();
        let id = linalg::identity(n);
        let last = g.len() - 1;
        let boundary_trivial = linalg::norm(&(&g[0] - &id)) <= 1e-12 && linalg::norm(&(&g[last] - &id)) <= 1e-12;
        Self {
            m: last,
            g,
            g_inv,
            boundary_trivial,
        }
    }

    pub fn intervals(&self) -> usize {
        self.m
    }

    pub fn samples(&self) -> &[CMat] {
        &self.g
    }

    pub fn inverses(&self) -> &[CMat] {
        &self.g_inv
    }

    /// `g(0) = g(1) = 1`.
    pub fn boundary_trivial(&self) -> bool {
        self.boundary_trivial
    }

    /// Pointwise product `g₁(t) g₂(t)`.
    pub fn compose(&self, other: &GaugePath) -> Result<GaugePath, NahmError> {
        if self.m != other.m {
            return Err(NahmError::GridMismatch(self.m, other.m));
        }
        let g = self.g.iter().zip(&other.g).map(|(a, b)| a * b).collect();
        let g_inv = self.g_inv.iter().zip(&other.g_inv).map(|(a, b)| b * a).collect();
        Ok(Self::assemble(g, g_inv))
    }
}

/// `g(t) = exp(s·((1 − t)Y_l + tY_r))`.
pub fn leftright_gauge(y_l: &CMat, y_r: &CMat, s: f64, m: usize) -> Result<GaugePath, NahmError> {
    if y_l.shape() != y_r.shape() || !y_l.is_square() {
        return Err(NahmError::Shape("Y_l and Y_r must be square of equal size".into()));
    }
    if m < 2 {
        return Err(NahmError::Grid(m));
    }
    let (g, g_inv) = (0..=m)
        .map(|k| {
            let t = grid_point(m, k);
            let y = (y_l * linalg::re(1.0 - t) + y_r * linalg::re(t)) * linalg::re(s);
            (y.clone().exp(), (-y).exp())
        })
        .unzip();
    Ok(GaugePath::assemble(g, g_inv))
}

/// `α′ = gαg⁻¹ − (dg/dt)g⁻¹`, `β′ = gβg⁻¹`.
pub fn gauge_apply(g: &GaugePath, p: &ComplexPair) -> Result<ComplexPair, NahmError> {
    if g.m != p.m {
        return Err(NahmError::GridMismatch(g.m, p.m));
    }
    if g.g[0].nrows() != p.n {
        return Err(NahmError::Shape(format!(
            "gauge is {}x{}, pair is {}x{}",
            g.g[0].nrows(),
            g.g[0].nrows(),
            p.n,
            p.n
        )));
    }
    let dg = derivative(&g.g, p.step());
    let mut alpha = Vec::with_capacity(p.m + 1);
    let mut beta = Vec::with_capacity(p.m + 1);
    for k in 0..=p.m {
        let (gk, gi) = (&g.g[k], &g.g_inv[k]);
        alpha.push(gk * &p.alpha[k] * gi - &dg[k] * gi);
        beta.push(gk * &p.beta[k] * gi);
    }
    Ok(ComplexPair {
        n: p.n,
        m: p.m,
        alpha,
        beta,
    })
}

/// `∫ ‖Im α‖² + ½‖β‖²`.
pub fn potential(p: &ComplexPair) -> f64 {
    let f: Vec<f64> = p
        .alpha
        .iter()
        .zip(&p.beta)
        .map(|(a, b)| linalg::norm_sq(&linalg::im_part(a)) + 0.5 * linalg::norm_sq(b))
        .collect();
    trapezoid(&f, p.step())
}

/// `∫ ‖T1‖² + ‖T2‖²`.
pub fn mu_k(t: &NahmQuadruple) -> f64 {
    let f: Vec<f64> = t.t[1]
        .iter()
        .zip(&t.t[2])
        .map(|(a, b)| linalg::norm_sq(a) + linalg::norm_sq(b))
        .collect();
    trapezoid(&f, t.step())
}

/// `¼ ∫ Tr β²`.
pub fn kronheimer_h(p: &ComplexPair) -> linalg::C64 {
    let h = p.step();
    let f: Vec<linalg::C64> = p.beta.iter().map(|b| (b * b).trace()).collect();
    let m = f.len() - 1;
    let inner: linalg::C64 = f[1..m].iter().sum();
    (inner + (f[0] + f[m]) * 0.5) * (0.25 * h)
}
