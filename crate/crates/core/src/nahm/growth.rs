//! Growth of the potential along left-right flows `s ↦ exp(s𝖸)·P`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{gauge_apply, grid_point, leftright_gauge, potential, ComplexPair, NahmError};
use crate::linalg::{self, CMat};
use crate::spectral::{eigenpaths_with, HermitianFamily, PathOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthTag {
    Bounded,
    Quadratic,
    Exponential,
}

impl fmt::Display for GrowthTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GrowthTag::Bounded => "bounded",
            GrowthTag::Quadratic => "quadratic",
            GrowthTag::Exponential => "exponential",
        })
    }
}

/// Fits of `Φ` over the window `[s_max/2, s_max]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    /// `(max Φ − min Φ) / max |Φ|`.
    pub variation: f64,
    /// Slope and intercept of the least-squares line through `log Φ`.
    pub rate: f64,
    pub log_intercept: f64,
    pub r_squared: f64,
    /// Relative RMS residual of the exponential model.
    pub r_exp: f64,
    /// `Φ ≈ a2 s² + a1 s + a0`.
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
    pub r_quad: f64,
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "variation {:.3e}, rate {:.4} (R² {:.5}, rms {:.3e}), quadratic ({:.4e}, {:.4e}, {:.4e}) rms {:.3e}",
            self.variation, self.rate, self.r_squared, self.r_exp, self.a2, self.a1, self.a0, self.r_quad
        )
    }
}

/// What the eigenbasis decomposition found.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticReport {
    /// Largest ad-eigenvalue `η_i − η_j` seen on the grid.
    pub max_gap: f64,
    /// `(η_i − η_j, |coefficient|)` at every sample where a positive
    /// eigenvalue path carries a nonvanishing coefficient.
    pub growing: Vec<(f64, f64)>,
    /// `‖Im(Y_r − Y_l)‖`.
    pub drift: f64,
    pub scale: f64,
}

impl AnalyticReport {
    /// `2 max (η_i − η_j)` over growing terms.
    pub fn rate(&self) -> Option<f64> {
        self.growing.iter().map(|&(d, _)| 2.0 * d).reduce(f64::max)
    }

    /// `log max_k |c_k|² e^{2 Δ_k s}` over growing terms.
    pub fn log_weight(&self, s: f64) -> Option<f64> {
        self.growing
            .iter()
            .map(|&(d, c)| 2.0 * c.ln() + 2.0 * d * s)
            .reduce(f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Evidence {
    Fit(FitReport),
    Spectral(AnalyticReport),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthClass {
    pub tag: GrowthTag,
    pub evidence: Evidence,
}

impl GrowthClass {
    /// Fitted exponential rate, or the spectral estimate for analytic results.
    pub fn rate(&self) -> Option<f64> {
        match &self.evidence {
            Evidence::Fit(f) => Some(f.rate),
            Evidence::Spectral(a) => a.rate(),
        }
    }

    pub fn a2(&self) -> Option<f64> {
        match &self.evidence {
            Evidence::Fit(f) => Some(f.a2),
            Evidence::Spectral(a) => Some(a.drift * a.drift),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    pub s_max: f64,
    pub samples: usize,
    pub bounded_tol: f64,
    pub rate_margin: f64,
    pub r2_min: f64,
    /// `a2` must exceed `quad_margin · max Φ / s_max²`.
    pub quad_margin: f64,
    pub quad_fit_max: f64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            s_max: 8.0,
            samples: 33,
            bounded_tol: 1e-3,
            rate_margin: 0.1,
            r2_min: 0.99,
            quad_margin: 1e-3,
            quad_fit_max: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticOptions {
    /// Ad-eigenvalues above `pos_gap · scale` count as strictly positive.
    pub pos_gap: f64,
    pub zero_tol: f64,
    pub nonzero_tol: f64,
    pub min_run: usize,
}

impl Default for AnalyticOptions {
    fn default() -> Self {
        Self {
            pos_gap: 1e-3,
            zero_tol: 1e-8,
            nonzero_tol: 1e-5,
            min_run: 3,
        }
    }
}

/// `Φ(s)` at `samples` equally spaced points of `[0, s_max]`.
pub fn growth_profile(
    y_l: &CMat,
    y_r: &CMat,
    p: &ComplexPair,
    s_max: f64,
    samples: usize,
) -> Result<Vec<(f64, f64)>, NahmError> {
    (0..samples)
        .map(|k| {
            let s = s_max * k as f64 / (samples - 1) as f64;
            let g = leftright_gauge(y_l, y_r, s, p.intervals())?;
            Ok((s, potential(&gauge_apply(&g, p)?)))
        })
        .collect()
}

pub fn flow_classify_numeric(
    y_l: &CMat,
    y_r: &CMat,
    p: &ComplexPair,
    s_max: f64,
    samples: usize,
) -> Result<GrowthClass, NahmError> {
    let opts = NumericOptions {
        s_max,
        samples,
        ..NumericOptions::default()
    };
    flow_classify_numeric_with(y_l, y_r, p, &opts)
}

fn rms(v: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = v.fold((0.0, 0usize), |(s, c), x| (s + x * x, c + 1));
    (sum / count as f64).sqrt()
}

fn least_squares(rows: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let cols = rows[0].len();
    let a = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(rhs);
    a.svd(true, true)
        .solve(&b, 1e-14)
        .map(|x| x.iter().copied().collect())
        .unwrap_or_else(|_| vec![f64::NAN; cols])
}

fn fit(window: &[(f64, f64)]) -> FitReport {
    let phi: Vec<f64> = window.iter().map(|w| w.1).collect();
    let max_abs = phi.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let hi = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = phi.iter().copied().fold(f64::INFINITY, f64::min);
    let variation = if max_abs == 0.0 { 0.0 } else { (hi - lo) / max_abs };
    let scale = rms(phi.iter().copied()).max(f64::MIN_POSITIVE);

    // quadratic model in s/s_max for conditioning
    let s_end = window.last().map_or(1.0, |w| w.0);
    let rows: Vec<Vec<f64>> = window
        .iter()
        .map(|&(s, _)| {
            let u = s / s_end;
            vec![u * u, u, 1.0]
        })
        .collect();
    let q = least_squares(&rows, &phi);
    let r_quad = rms(rows
        .iter()
        .zip(&phi)
        .map(|(r, &y)| q[0] * r[0] + q[1] * r[1] + q[2] - y))
        / scale;
    let (a2, a1, a0) = (q[0] / (s_end * s_end), q[1] / s_end, q[2]);

    let (mut rate, mut log_intercept, mut r_squared, mut r_exp) = (f64::NAN, f64::NAN, f64::NAN, f64::INFINITY);
    if lo > 0.0 {
        let logs: Vec<f64> = phi.iter().map(|x| x.ln()).collect();
        let rows: Vec<Vec<f64>> = window.iter().map(|&(s, _)| vec![s, 1.0]).collect();
        let l = least_squares(&rows, &logs);
        rate = l[0];
        log_intercept = l[1];
        let mean = logs.iter().sum::<f64>() / logs.len() as f64;
        let ss_tot: f64 = logs.iter().map(|y| (y - mean).powi(2)).sum();
        let ss_res: f64 = window
            .iter()
            .zip(&logs)
            .map(|(&(s, _), y)| (rate * s + log_intercept - y).powi(2))
            .sum();
        r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
        r_exp = rms(window.iter().map(|&(s, y)| (rate * s + log_intercept).exp() - y)) / scale;
    }
    FitReport {
        variation,
        rate,
        log_intercept,
        r_squared,
        r_exp,
        a2,
        a1,
        a0,
        r_quad,
    }
}

/// Classify by fitting `Φ(s)` on `[s_max/2, s_max]`.
///
/// Exponential needs a log-linear rate above the margin with `R²` above its
/// floor and a smaller residual than the quadratic model; quadratic needs a
/// positive leading coefficient with a good fit.
pub fn flow_classify_numeric_with(
    y_l: &CMat,
    y_r: &CMat,
    p: &ComplexPair,
    opts: &NumericOptions,
) -> Result<GrowthClass, NahmError> {
    if !(opts.s_max > 0.0) || opts.samples < 8 {
        return Err(NahmError::Format(format!(
            "need s_max > 0 and at least 8 samples, got {} and {}",
            opts.s_max, opts.samples
        )));
    }
    let profile = growth_profile(y_l, y_r, p, opts.s_max, opts.samples)?;
    if profile.iter().any(|w| !w.1.is_finite()) {
        return Err(NahmError::Ambiguous("potential overflowed".into()));
    }
    let window: Vec<(f64, f64)> = profile
        .into_iter()
        .filter(|w| w.0 >= 0.5 * opts.s_max - 1e-12)
        .collect();
    let f = fit(&window);
    let max_phi = window.iter().fold(0.0f64, |a, w| a.max(w.1));
    let tag = if f.variation < opts.bounded_tol {
        GrowthTag::Bounded
    } else if f.rate > opts.rate_margin && f.r_squared > opts.r2_min && f.r_exp < f.r_quad {
        GrowthTag::Exponential
    } else if f.a2 > opts.quad_margin * max_phi / (opts.s_max * opts.s_max) && f.r_quad < opts.quad_fit_max {
        GrowthTag::Quadratic
    } else {
        return Err(NahmError::Ambiguous(f.to_string()));
    };
    Ok(GrowthClass {
        tag,
        evidence: Evidence::Fit(f),
    })
}

pub fn flow_classify_analytic(y_l: &CMat, y_r: &CMat, p: &ComplexPair) -> Result<GrowthClass, NahmError> {
    flow_classify_analytic_with(y_l, y_r, p, &AnalyticOptions::default())
}

#[derive(Clone, Copy, PartialEq)]
enum Coef {
    Zero,
    Unclear,
    Nonzero,
}

/// Classify from the eigen-decomposition of `𝖸(t) = (1 − t)Y_l + tY_r`.
///
/// In the eigenbasis of `𝖸(t)`, `β′_ij = e^{sΔ}β_ij` and
/// `α′_ij = e^{sΔ}(α_ij − D_ij/Δ) + D_ij/Δ` with `Δ = η_i − η_j` and
/// `D = Y_r − Y_l`, so growth is exponential iff one of those coefficients
/// survives on a positive path over a run of samples.
pub fn flow_classify_analytic_with(
    y_l: &CMat,
    y_r: &CMat,
    p: &ComplexPair,
    opts: &AnalyticOptions,
) -> Result<GrowthClass, NahmError> {
    for y in [y_l, y_r] {
        let defect = linalg::hermitian_defect(y);
        if defect > 1e-12 * (1.0 + linalg::norm(y)) {
            return Err(NahmError::NotHermitian { defect });
        }
    }
    if y_l.shape() != (p.dim(), p.dim()) || y_r.shape() != (p.dim(), p.dim()) {
        return Err(NahmError::Shape("generators and pair differ in size".into()));
    }
    let n = p.dim();
    let m = p.intervals();
    let d = y_r - y_l;
    let scale = 1.0 + super::max_norm(&p.alpha) + super::max_norm(&p.beta) + linalg::norm(y_l) + linalg::norm(y_r);
    let (pos, zero, nonzero) = (opts.pos_gap * scale, opts.zero_tol * scale, opts.nonzero_tol * scale);

    let family = HermitianFamily::linear(linalg::hermitian_part(y_l), linalg::hermitian_part(&d))?;
    let bundle = eigenpaths_with(&family, (0.0, 1.0), m + 1, &PathOptions::default())?;

    let mut status = vec![vec![Coef::Zero; m + 1]; n * n];
    let mut gaps = vec![vec![0.0; m + 1]; n * n];
    let mut coefs = vec![vec![0.0; m + 1]; n * n];
    let mut max_gap = 0.0f64;
    for k in 0..=m {
        let idx = bundle
            .index_of(grid_point(m, k))
            .ok_or_else(|| NahmError::Format(format!("grid point {k} missing from eigenpaths")))?;
        let v = &bundle.vectors[idx];
        let eta = &bundle.values[idx];
        let vh = v.adjoint();
        let at = &vh * &p.alpha[k] * v;
        let bt = &vh * &p.beta[k] * v;
        let dt = &vh * &d * v;
        for i in 0..n {
            for j in 0..n {
                let gap = eta[i] - eta[j];
                max_gap = max_gap.max(gap);
                if gap <= pos {
                    continue;
                }
                let c = bt[(i, j)].norm().max((at[(i, j)] - dt[(i, j)] / gap).norm());
                gaps[i * n + j][k] = gap;
                coefs[i * n + j][k] = c;
                status[i * n + j][k] = if c > nonzero {
                    Coef::Nonzero
                } else if c <= zero {
                    Coef::Zero
                } else {
                    Coef::Unclear
                };
            }
        }
    }

    let mut growing = Vec::new();
    let mut unclear = false;
    for (pair, st) in status.iter().enumerate() {
        let mut k = 0;
        while k <= m {
            match st[k] {
                Coef::Zero => k += 1,
                Coef::Unclear => {
                    unclear = true;
                    k += 1;
                }
                Coef::Nonzero => {
                    let start = k;
                    while k <= m && st[k] == Coef::Nonzero {
                        k += 1;
                    }
                    if k - start >= opts.min_run {
                        growing.extend((start..k).map(|s| (gaps[pair][s], coefs[pair][s])));
                    } else {
                        unclear = true;
                    }
                }
            }
        }
    }
    let drift = linalg::norm(&linalg::im_part(&d));
    let report = AnalyticReport {
        max_gap,
        growing,
        drift,
        scale,
    };
    let tag = if !report.growing.is_empty() {
        GrowthTag::Exponential
    } else if unclear {
        return Err(NahmError::Ambiguous(
            "coefficient on a positive eigenvalue path inside the tolerance band".into(),
        ));
    } else if drift > nonzero {
        GrowthTag::Quadratic
    } else if drift <= zero {
        GrowthTag::Bounded
    } else {
        return Err(NahmError::Ambiguous(format!(
            "drift {drift:e} inside the tolerance band"
        )));
    };
    Ok(GrowthClass {
        tag,
        evidence: Evidence::Spectral(report),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialKind {
    Canonical,
    Generic,
    CommutingFixed,
    CommutingDrift,
}

impl fmt::Display for TrialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrialKind::Canonical => "canonical",
            TrialKind::Generic => "generic",
            TrialKind::CommutingFixed => "commuting_fixed",
            TrialKind::CommutingDrift => "commuting_drift",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub index: usize,
    pub seed: u64,
    pub kind: TrialKind,
    pub y_l: CMat,
    pub y_r: CMat,
    pub pair: ComplexPair,
}

/// Expected classes of [`canonical_trials`], in order.
pub const CANONICAL_TAGS: [GrowthTag; 3] = [GrowthTag::Bounded, GrowthTag::Exponential, GrowthTag::Quadratic];

/// The closed-form bounded, exponential and quadratic flows, as trials 0–2.
pub fn canonical_trials(m: usize) -> Vec<TrialSpec> {
    let e12 = linalg::unit(2, 0, 1);
    let e21 = linalg::unit(2, 1, 0);
    let y = linalg::diag_real(&[1.0, -1.0]);
    let one = |x: f64| linalg::diag_real(&[x]);
    let spec = |index, y_l, y_r, pair| TrialSpec {
        index,
        seed: 0,
        kind: TrialKind::Canonical,
        y_l,
        y_r,
        pair,
    };
    vec![
        spec(
            0,
            linalg::zeros(2),
            linalg::zeros(2),
            ComplexPair::constant(m, e12.clone(), e21).expect("m ≥ 2"),
        ),
        spec(
            1,
            y.clone(),
            y,
            ComplexPair::constant(m, linalg::zeros(2), e12).expect("m ≥ 2"),
        ),
        spec(
            2,
            one(0.0),
            one(1.0),
            ComplexPair::constant(m, one(0.0), one(0.0)).expect("m ≥ 2"),
        ),
    ]
}

/// SplitMix64 finalizer, used to derive independent per-trial seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(seed: u64, index: usize) -> u64 {
    mix(seed ^ mix(index as u64))
}

fn normals<R: Rng>(rng: &mut R, k: usize, sd: f64) -> Vec<f64> {
    (0..k).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
}

fn complex_normals<R: Rng>(rng: &mut R, k: usize, sd: f64) -> Vec<linalg::C64> {
    (0..k)
        .map(|_| {
            linalg::c(
                sd * rng.sample::<f64, _>(StandardNormal),
                sd * rng.sample::<f64, _>(StandardNormal),
            )
        })
        .collect()
}

impl TrialSpec {
    /// A seeded random trial. Generic trials draw independent Hermitian
    /// generators and affine `α, β`; the commuting kinds diagonalize
    /// everything in one random unitary basis, with equal (`CommutingFixed`)
    /// or distinct (`CommutingDrift`) generators.
    pub fn random(index: usize, seed: u64, n: usize, m: usize) -> Self {
        let seed = trial_seed(seed, index);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = match rng.random_range(0..3) {
            0 => TrialKind::Generic,
            1 => TrialKind::CommutingFixed,
            _ => TrialKind::CommutingDrift,
        };
        let half = linalg::re(0.5);
        let (y_l, y_r, pair) = match kind {
            TrialKind::Generic => {
                let y_l = linalg::random_hermitian(&mut rng, n) * half;
                let y_r = linalg::random_hermitian(&mut rng, n) * half;
                let c: Vec<CMat> = (0..4).map(|_| linalg::random_complex(&mut rng, n, n) * half).collect();
                let pair = ComplexPair::from_fn(m, |t| (&c[0] + &c[1] * linalg::re(t), &c[2] + &c[3] * linalg::re(t)));
                (y_l, y_r, pair)
            }
            _ => {
                let u = linalg::random_unitary(&mut rng, n);
                let lam_l = normals(&mut rng, n, 0.5);
                let lam_r = if kind == TrialKind::CommutingFixed {
                    lam_l.clone()
                } else {
                    normals(&mut rng, n, 0.5)
                };
                let c: Vec<Vec<linalg::C64>> = (0..4).map(|_| complex_normals(&mut rng, n, 0.5)).collect();
                let conj = |d: CMat| &u * d * u.adjoint();
                let pair = ComplexPair::from_fn(m, |t| {
                    let at: Vec<_> = (0..n).map(|i| c[0][i] + c[1][i] * t).collect();
                    let bt: Vec<_> = (0..n).map(|i| c[2][i] + c[3][i] * t).collect();
                    (conj(linalg::diag(&at)), conj(linalg::diag(&bt)))
                });
                (
                    linalg::hermitian_part(&conj(linalg::diag_real(&lam_l))),
                    linalg::hermitian_part(&conj(linalg::diag_real(&lam_r))),
                    pair,
                )
            }
        };
        Self {
            index,
            seed,
            kind,
            y_l,
            y_r,
            pair: pair.expect("grid validated by caller"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub kind: TrialKind,
    pub class_numeric: Option<GrowthTag>,
    pub class_analytic: Option<GrowthTag>,
    pub fit_rate: Option<f64>,
    pub fit_a2: Option<f64>,
    /// Reasons for excluding the trial from the agreement count.
    pub margin_flags: Vec<&'static str>,
}

impl TrialRecord {
    pub fn passes_margins(&self) -> bool {
        self.margin_flags.is_empty()
    }

    pub fn agrees(&self) -> bool {
        self.class_numeric.is_some() && self.class_numeric == self.class_analytic
    }
}

/// Exponential terms whose predicted weight at `s_max` stays below this
/// multiple of the non-exponential part are flagged as weak.
const DOMINANCE: f64 = 1.0;
/// Spectral rates below this are flagged as slow.
const SLOW_RATE: f64 = 0.5;

pub fn evaluate_trial(spec: &TrialSpec, numeric: &NumericOptions, analytic: &AnalyticOptions) -> TrialRecord {
    let num = flow_classify_numeric_with(&spec.y_l, &spec.y_r, &spec.pair, numeric);
    let ana = flow_classify_analytic_with(&spec.y_l, &spec.y_r, &spec.pair, analytic);
    let mut flags = Vec::new();
    if num.is_err() {
        flags.push("numeric_ambiguous");
    }
    match &ana {
        Err(_) => flags.push("analytic_ambiguous"),
        Ok(GrowthClass {
            tag: GrowthTag::Exponential,
            evidence: Evidence::Spectral(r),
        }) => {
            if r.rate().unwrap_or(0.0) < SLOW_RATE {
                flags.push("slow_rate");
            }
            let s = numeric.s_max;
            let rest = 1.0 + super::potential(&spec.pair) + (r.drift * s).powi(2);
            if r.log_weight(s).unwrap_or(f64::NEG_INFINITY) < (DOMINANCE * rest).ln() {
                flags.push("weak_exponential");
            }
        }
        Ok(_) => {}
    }
    let fit = num.as_ref().ok();
    TrialRecord {
        trial: spec.index,
        seed: spec.seed,
        n: spec.pair.dim(),
        kind: spec.kind,
        class_numeric: fit.map(|c| c.tag),
        class_analytic: ana.as_ref().ok().map(|c| c.tag),
        fit_rate: fit.and_then(|c| c.rate()).filter(|r| r.is_finite()),
        fit_a2: fit.and_then(|c| c.a2()),
        margin_flags: flags,
    }
}

/// The canonical trio followed by `trials` seeded random trials of size `n`,
/// evaluated in parallel and returned in trial order.
pub fn run_trials(
    n: usize,
    trials: usize,
    seed: u64,
    m: usize,
    numeric: &NumericOptions,
    analytic: &AnalyticOptions,
) -> Result<Vec<TrialRecord>, NahmError> {
    if m < 2 {
        return Err(NahmError::Grid(m));
    }
    let mut specs = canonical_trials(m);
    specs.extend((0..trials).map(|k| TrialSpec::random(k + 3, seed, n, m)));
    Ok(specs.par_iter().map(|s| evaluate_trial(s, numeric, analytic)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_real, unit, zeros};

    fn classify_both(t: &TrialSpec) -> (GrowthClass, GrowthClass) {
        let n = flow_classify_numeric(&t.y_l, &t.y_r, &t.pair, 8.0, 33).unwrap();
        let a = flow_classify_analytic(&t.y_l, &t.y_r, &t.pair).unwrap();
        (n, a)
    }

    #[test]
    fn canonical_flows() {
        let c = canonical_trials(256);
        let (n, a) = classify_both(&c[0]);
        assert_eq!((n.tag, a.tag), (GrowthTag::Bounded, GrowthTag::Bounded));
        let (n, a) = classify_both(&c[1]);
        assert_eq!((n.tag, a.tag), (GrowthTag::Exponential, GrowthTag::Exponential));
        assert!((n.rate().unwrap() - 4.0).abs() < 1e-9);
        assert!((a.rate().unwrap() - 4.0).abs() < 1e-12);
        let (n, a) = classify_both(&c[2]);
        assert_eq!((n.tag, a.tag), (GrowthTag::Quadratic, GrowthTag::Quadratic));
        assert!((n.a2().unwrap() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn exponential_profile_closed_form() {
        let c = &canonical_trials(32)[1];
        for (s, phi) in growth_profile(&c.y_l, &c.y_r, &c.pair, 8.0, 9).unwrap() {
            let want = 0.5 * (4.0 * s).exp();
            assert!((phi - want).abs() < 1e-10 * want);
        }
    }

    #[test]
    fn quadratic_profile_closed_form() {
        let c = &canonical_trials(256)[2];
        for (s, phi) in growth_profile(&c.y_l, &c.y_r, &c.pair, 8.0, 9).unwrap() {
            // finite-difference derivative of e^{st} is accurate to O((sh)²)
            assert!((phi - s * s).abs() <= 1e-3 * s * s + 1e-14, "{s} {phi}");
        }
    }

    #[test]
    fn skew_generator_gives_flat_profile() {
        let i1 = CMat::from_element(1, 1, linalg::I);
        let p = ComplexPair::constant(64, zeros(1), zeros(1)).unwrap();
        let prof = growth_profile(&zeros(1), &i1, &p, 8.0, 9).unwrap();
        assert!(prof.iter().all(|w| w.1.abs() < 1e-6));
        assert!(matches!(
            flow_classify_analytic(&zeros(1), &i1, &p),
            Err(NahmError::NotHermitian { .. })
        ));
    }

    #[test]
    fn diagonal_beta_in_constant_basis_is_bounded() {
        let y = diag_real(&[0.5, -1.0, 2.0]);
        let b = diag_real(&[1.0, 2.0, 3.0]);
        let p = ComplexPair::constant(32, zeros(3), b).unwrap();
        let a = flow_classify_analytic(&y, &y, &p).unwrap();
        assert_eq!(a.tag, GrowthTag::Bounded);
        let n = flow_classify_numeric(&y, &y, &p, 8.0, 33).unwrap();
        assert_eq!(n.tag, GrowthTag::Bounded);
    }

    #[test]
    fn lower_triangular_beta_decays() {
        // E21 sits on the negative path: bounded
        let y = diag_real(&[1.0, -1.0]);
        let p = ComplexPair::constant(32, zeros(2), unit(2, 1, 0)).unwrap();
        assert_eq!(flow_classify_analytic(&y, &y, &p).unwrap().tag, GrowthTag::Bounded);
    }

    #[test]
    fn trials_are_deterministic_and_ordered() {
        let a = run_trials(2, 6, 7, 32, &NumericOptions::default(), &AnalyticOptions::default()).unwrap();
        let b = run_trials(2, 6, 7, 32, &NumericOptions::default(), &AnalyticOptions::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.iter().map(|r| r.trial).collect::<Vec<_>>(),
            (0..9).collect::<Vec<_>>()
        );
        assert!(a[..3].iter().all(|r| r.agrees() && r.passes_margins()));
    }

    #[test]
    fn commuting_kinds_have_known_class() {
        for idx in 3..40 {
            let t = TrialSpec::random(idx, 1, 3, 32);
            let a = flow_classify_analytic(&t.y_l, &t.y_r, &t.pair).unwrap();
            match t.kind {
                TrialKind::CommutingFixed => assert_eq!(a.tag, GrowthTag::Bounded),
                TrialKind::CommutingDrift => assert_eq!(a.tag, GrowthTag::Quadratic),
                _ => {}
            }
        }
    }
}
