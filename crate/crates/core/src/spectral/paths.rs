use super::assign::best_assignment;
use super::{hermitian_eigen, HermitianFamily, SpectralError};
use crate::linalg::{self, fix_phase, CMat};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOptions {
    /// Eigenvalues closer than `degenerate_tol · (1 + ‖L‖)` share an
    /// eigenspace whose basis is aligned with the previous sample.
    pub degenerate_tol: f64,
    /// Minimum lead of a path's assigned overlap over any competing
    /// eigenspace before the step is accepted without refinement.
    pub ambiguity_margin: f64,
    /// Smallest step, relative to the interval length.
    pub floor_step: f64,
}

impl Default for PathOptions {
    fn default() -> Self {
        Self {
            degenerate_tol: 1e-9,
            ambiguity_margin: 0.2,
            floor_step: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakpointOptions {
    /// Eigenvalues within `gap_threshold · (1 + max‖L‖)` count as one cluster.
    pub gap_threshold: f64,
    pub samples: usize,
}

impl Default for BreakpointOptions {
    fn default() -> Self {
        Self {
            gap_threshold: 1e-6,
            samples: 1025,
        }
    }
}

/// One diagonalized sample with columns in path order.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedSample {
    pub t: f64,
    pub values: Vec<f64>,
    pub vectors: CMat,
    /// Position of each path in the ascending order of this sample.
    pub ranks: Vec<usize>,
}

impl TrackedSample {
    /// Diagonalizes `l` and labels paths by ascending eigenvalue.
    pub fn sorted(t: f64, l: &CMat) -> Result<Self, SpectralError> {
        let (values, vectors) = hermitian_eigen(l)?;
        let ranks = (0..values.len()).collect();
        Ok(Self {
            t,
            values,
            vectors,
            ranks,
        })
    }
}

/// Continuous eigenvalue/eigenvector paths sampled on an increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPathBundle {
    pub grid: Vec<f64>,
    /// `values[k][i]` is `η_i(t_k)`.
    pub values: Vec<Vec<f64>>,
    /// Column `i` of `vectors[k]` is `v_i(t_k)`.
    pub vectors: Vec<CMat>,
    /// `ranks[k][i]`: ascending-order position of path `i` at sample `k`.
    pub ranks: Vec<Vec<usize>>,
    /// `matching[k][r]`: ascending position at `t_{k+1}` of the path that
    /// occupies position `r` at `t_k`.
    pub matching: Vec<Vec<usize>>,
}

impl EigenPathBundle {
    fn from_samples(samples: Vec<TrackedSample>) -> Self {
        let matching = samples
            .windows(2)
            .map(|w| {
                let mut m = vec![0; w[0].ranks.len()];
                for (i, &r) in w[0].ranks.iter().enumerate() {
                    m[r] = w[1].ranks[i];
                }
                m
            })
            .collect();
        let mut bundle = Self {
            grid: Vec::with_capacity(samples.len()),
            values: Vec::with_capacity(samples.len()),
            vectors: Vec::with_capacity(samples.len()),
            ranks: Vec::with_capacity(samples.len()),
            matching,
        };
        for s in samples {
            bundle.grid.push(s.t);
            bundle.values.push(s.values);
            bundle.vectors.push(s.vectors);
            bundle.ranks.push(s.ranks);
        }
        bundle
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// The eigenvalue path `η_i` over the whole grid.
    pub fn path(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[i]).collect()
    }

    /// Index of an exact grid value, if present.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.grid.iter().position(|&g| g == t)
    }

    /// `max_{k,i} ‖L(t_k) v_i − η_i v_i‖`.
    pub fn max_residual(&self, family: &HermitianFamily) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, &t) in self.grid.iter().enumerate() {
            let l = family.eval(t);
            for i in 0..self.dim() {
                let v = self.vectors[k].column(i);
                let r = (&l * v - v * linalg::re(self.values[k][i])).norm();
                worst = worst.max(r);
            }
        }
        worst
    }

    /// `max_k ‖V_k† V_k − I‖_max`.
    pub fn max_orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        self.vectors
            .iter()
            .map(|v| {
                let g = v.adjoint() * v - linalg::identity(n);
                g.iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|η_i(t_{k+1}) − η_i(t_k)| / (t_{k+1} − t_k)`.
    pub fn max_slope(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..self.len() {
            let h = self.grid[k] - self.grid[k - 1];
            for i in 0..self.dim() {
                worst = worst.max((self.values[k][i] - self.values[k - 1][i]).abs() / h);
            }
        }
        worst
    }
}

enum StepFailure {
    Ambiguous,
    Spectral(SpectralError),
}

/// Groups of consecutive ascending eigenvalues whose spacing is within `tol`.
fn groups(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > tol {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Cluster sizes of ascending eigenvalues under a gap threshold.
pub fn multiplicity_pattern(values: &[f64], threshold: f64) -> Vec<usize> {
    groups(values, threshold).into_iter().map(|r| r.len()).collect()
}

fn try_step(
    prev: &TrackedSample,
    next_l: &CMat,
    t_next: f64,
    slopes: Option<&[f64]>,
    opts: &PathOptions,
    at_floor: bool,
) -> Result<TrackedSample, StepFailure> {
    let n = prev.values.len();
    let (mu, w) = hermitian_eigen(next_l).map_err(StepFailure::Spectral)?;
    let scale = 1.0 + linalg::norm(next_l);
    let grp = groups(&mu, opts.degenerate_tol * scale);
    let slot_group: Vec<usize> = grp
        .iter()
        .enumerate()
        .flat_map(|(g, r)| std::iter::repeat_n(g, r.len()))
        .collect();

    // overlap mass of each previous path inside each new eigenspace
    let proj = w.adjoint() * &prev.vectors;
    let mass: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            grp.iter()
                .map(|r| r.clone().map(|s| proj[(s, i)].norm_sqr()).sum())
                .collect()
        })
        .collect();
    let score: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|s| mass[i][slot_group[s]]).collect())
        .collect();
    let mut perm = best_assignment(&score);

    if grp.len() > 1 {
        let margin = (0..n)
            .map(|i| {
                let g = slot_group[perm[i]];
                let rival = (0..grp.len())
                    .filter(|&h| h != g)
                    .map(|h| mass[i][h])
                    .fold(f64::NEG_INFINITY, f64::max);
                mass[i][g] - rival
            })
            .fold(f64::INFINITY, f64::min);
        if margin < opts.ambiguity_margin {
            if !at_floor {
                return Err(StepFailure::Ambiguous);
            }
            // eigenvalue-slope continuation decides at the floor step
            let slopes = slopes.ok_or(StepFailure::Ambiguous)?;
            let h = t_next - prev.t;
            let pred: Vec<f64> = (0..n).map(|i| prev.values[i] + slopes[i] * h).collect();
            let cost: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|s| -(pred[i] - mu[s]).powi(2)).collect())
                .collect();
            perm = best_assignment(&cost);
            let decisive = (0..n).all(|i| {
                let g = slot_group[perm[i]];
                let own = (pred[i] - mu[perm[i]]).abs();
                (0..n)
                    .filter(|&s| slot_group[s] != g)
                    .all(|s| (pred[i] - mu[s]).abs() > own + 1e-12 * scale)
            });
            if !decisive {
                return Err(StepFailure::Ambiguous);
            }
        }
    }

    let mut values = vec![0.0; n];
    let mut vectors = CMat::zeros(n, n);
    let mut ranks = vec![0; n];
    for (g, range) in grp.iter().enumerate() {
        let members: Vec<usize> = (0..n).filter(|&i| slot_group[perm[i]] == g).collect();
        let m = range.len();
        let wg = w.columns(range.start, m).into_owned();
        let aligned = if m == 1 {
            wg
        } else {
            let mut vs = CMat::zeros(n, m);
            for (s, &i) in members.iter().enumerate() {
                vs.set_column(s, &prev.vectors.column(i));
            }
            let q = linalg::polar_unitary(&(wg.adjoint() * vs));
            wg * q
        };
        for (s, &i) in members.iter().enumerate() {
            let mut v = aligned.column(s).into_owned();
            fix_phase(&mut v);
            values[i] = if m == 1 {
                mu[range.start]
            } else {
                v.dotc(&(next_l * &v)).re
            };
            vectors.set_column(i, &v);
            ranks[i] = range.start + s;
        }
    }
    Ok(TrackedSample {
        t: t_next,
        values,
        vectors,
        ranks,
    })
}

/// Continue the paths of `prev` to the matrix `next_l` sampled at `t_next`,
/// without refinement. Ambiguous matchings are reported as a degenerate
/// crossing at `t_next`.
pub fn match_step(
    prev: &TrackedSample,
    next_l: &CMat,
    t_next: f64,
    slopes: Option<&[f64]>,
    opts: &PathOptions,
) -> Result<TrackedSample, SpectralError> {
    try_step(prev, next_l, t_next, slopes, opts, true).map_err(|e| match e {
        StepFailure::Ambiguous => SpectralError::DegenerateCrossing { t: t_next },
        StepFailure::Spectral(e) => e,
    })
}

pub fn eigenpaths(
    family: &HermitianFamily,
    interval: (f64, f64),
    resolution: usize,
) -> Result<EigenPathBundle, SpectralError> {
    eigenpaths_with(family, interval, resolution, &PathOptions::default())
}

/// Track eigenpaths on a uniform grid of `resolution` samples, bisecting any
/// step whose matching is ambiguous until it resolves or the floor step is
/// reached. Grid points of the uniform grid are always present verbatim.
pub fn eigenpaths_with(
    family: &HermitianFamily,
    (a, b): (f64, f64),
    resolution: usize,
    opts: &PathOptions,
) -> Result<EigenPathBundle, SpectralError> {
    if resolution < 2 {
        return Err(SpectralError::Resolution(resolution));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(SpectralError::Interval(a, b));
    }
    let grid: Vec<f64> = (0..resolution)
        .map(|k| {
            if k + 1 == resolution {
                b
            } else {
                a + (b - a) * k as f64 / (resolution - 1) as f64
            }
        })
        .collect();
    let floor = opts.floor_step * (b - a);
    let mut samples = vec![TrackedSample::sorted(a, &family.eval(a))?];
    let mut slopes: Option<Vec<f64>> = None;
    for &target in &grid[1..] {
        let mut pending = vec![target];
        while let Some(&t) = pending.last() {
            let cur = samples.last().expect("non-empty");
            let h = t - cur.t;
            let l = family.eval(t);
            match try_step(cur, &l, t, slopes.as_deref(), opts, h <= floor) {
                Ok(next) => {
                    slopes = Some(
                        (0..next.values.len())
                            .map(|i| (next.values[i] - cur.values[i]) / h)
                            .collect(),
                    );
                    samples.push(next);
                    pending.pop();
                }
                Err(StepFailure::Ambiguous) if h > floor => pending.push(cur.t + 0.5 * h),
                Err(StepFailure::Ambiguous) => return Err(SpectralError::DegenerateCrossing { t }),
                Err(StepFailure::Spectral(e)) => return Err(e),
            }
        }
    }
    Ok(EigenPathBundle::from_samples(samples))
}

pub fn segment_breakpoints(family: &HermitianFamily, interval: (f64, f64)) -> Result<Vec<f64>, SpectralError> {
    segment_breakpoints_with(family, interval, &BreakpointOptions::default())
}

fn sorted_eigenvalues(family: &HermitianFamily, t: f64) -> Vec<f64> {
    let mut v: Vec<f64> = family.eval(t).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Golden-section minimization of the `k`-th ascending eigenvalue gap.
fn gap_minimum(family: &HermitianFamily, k: usize, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let gap = |t: f64| {
        let v = sorted_eigenvalues(family, t);
        v[k + 1] - v[k]
    };
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = gap(x1);
    let mut f2 = gap(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = gap(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = gap(x2);
        }
    }
    let t = 0.5 * (lo + hi);
    (t, gap(t))
}

/// Parameter values in the open interval where the eigenvalue multiplicity
/// pattern changes. Each sub-threshold dip of an ascending gap contributes
/// the location of its minimum; gaps that stay below threshold over the
/// whole interval are persistent degeneracies and contribute nothing.
pub fn segment_breakpoints_with(
    family: &HermitianFamily,
    (a, b): (f64, f64),
    opts: &BreakpointOptions,
) -> Result<Vec<f64>, SpectralError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(SpectralError::Interval(a, b));
    }
    let n = family.dim();
    let samples = opts.samples.max(3);
    let ts: Vec<f64> = (0..samples)
        .map(|k| a + (b - a) * k as f64 / (samples - 1) as f64)
        .collect();
    let eig: Vec<Vec<f64>> = ts.iter().map(|&t| sorted_eigenvalues(family, t)).collect();
    let scale = 1.0 + ts.iter().map(|&t| linalg::norm(&family.eval(t))).fold(0.0, f64::max);
    let thr = opts.gap_threshold * scale;
    let len = b - a;
    let edge = 1e-8 * len;
    let interior = |t: f64| t - a > edge && b - t > edge;
    let mut found = Vec::new();

    for k in 0..n.saturating_sub(1) {
        let g: Vec<f64> = eig.iter().map(|v| v[k + 1] - v[k]).collect();
        let mut j = 0;
        while j < samples {
            if g[j] >= thr {
                j += 1;
                continue;
            }
            let start = j;
            while j < samples && g[j] < thr {
                j += 1;
            }
            let end = j - 1;
            if start == 0 && end == samples - 1 {
                continue;
            }
            let lo = ts[start.saturating_sub(1)];
            let hi = ts[(end + 1).min(samples - 1)];
            let (t, _) = gap_minimum(family, k, lo, hi, 1e-13 * len);
            if interior(t) {
                found.push(t);
            }
        }
        for j in 1..samples - 1 {
            if g[j] >= thr && g[j] <= g[j - 1] && g[j] <= g[j + 1] {
                let (t, v) = gap_minimum(family, k, ts[j - 1], ts[j + 1], 1e-13 * len);
                if v < thr && interior(t) {
                    found.push(t);
                }
            }
        }
    }
    found.sort_by(f64::total_cmp);
    found.dedup_by(|x, y| (*x - *y).abs() < 1e-7 * len);
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_real, identity, random_hermitian, re};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn crossing() -> HermitianFamily {
        HermitianFamily::linear(diag_real(&[0.0, 0.0]), diag_real(&[1.0, -1.0])).unwrap()
    }

    fn avoided() -> HermitianFamily {
        let a = CMat::from_row_slice(2, 2, &[re(0.0), re(1.0), re(1.0), re(0.0)]);
        HermitianFamily::linear(a, diag_real(&[1.0, -1.0])).unwrap()
    }

    #[test]
    fn breakpoints_constant_family() {
        let f = HermitianFamily::constant(diag_real(&[1.0, 2.0])).unwrap();
        assert!(segment_breakpoints(&f, (-1.0, 1.0)).unwrap().is_empty());
    }

    #[test]
    fn breakpoints_crossing_at_zero() {
        let bp = segment_breakpoints(&crossing(), (-1.0, 1.0)).unwrap();
        assert_eq!(bp.len(), 1);
        assert!(bp[0].abs() < 1e-9, "{bp:?}");
        // off-grid crossing
        let bp = segment_breakpoints(&crossing(), (-0.7, 1.3)).unwrap();
        assert_eq!(bp.len(), 1);
        assert!(bp[0].abs() < 1e-9, "{bp:?}");
    }

    #[test]
    fn breakpoints_avoided_crossing() {
        assert!(segment_breakpoints(&avoided(), (-1.0, 1.0)).unwrap().is_empty());
    }

    #[test]
    fn breakpoints_ignore_persistent_degeneracy() {
        let f = HermitianFamily::linear(identity(2), identity(2)).unwrap();
        assert!(segment_breakpoints(&f, (-1.0, 1.0)).unwrap().is_empty());
    }

    #[test]
    fn segments_have_constant_pattern() {
        // three crossing lines: t, -t, 0.5 - t  (collisions at 0, 0.25, and none else)
        let f = HermitianFamily::linear(diag_real(&[0.0, 0.0, 0.5]), diag_real(&[1.0, -1.0, -1.0])).unwrap();
        let bp = segment_breakpoints(&f, (-1.0, 1.0)).unwrap();
        assert_eq!(bp.len(), 2, "{bp:?}");
        assert!(bp[0].abs() < 1e-9 && (bp[1] - 0.25).abs() < 1e-9);
        let mut edges = vec![-1.0];
        edges.extend(&bp);
        edges.push(1.0);
        for w in edges.windows(2) {
            let patterns: Vec<Vec<usize>> = (1..50)
                .map(|k| w[0] + (w[1] - w[0]) * k as f64 / 50.0)
                .map(|t| multiplicity_pattern(&sorted_eigenvalues(&f, t), 1e-6))
                .collect();
            assert!(patterns.windows(2).all(|p| p[0] == p[1]));
        }
    }

    #[test]
    fn constant_family_constant_paths() {
        let f = HermitianFamily::constant(diag_real(&[1.0, 2.0])).unwrap();
        let b = eigenpaths(&f, (0.0, 1.0), 17).unwrap();
        assert!(b.path(0).iter().all(|&x| (x - 1.0).abs() < 1e-14));
        assert!(b.path(1).iter().all(|&x| (x - 2.0).abs() < 1e-14));
        for v in &b.vectors {
            assert!((v - identity(2)).norm() < 1e-14);
        }
        assert!(b.matching.iter().all(|m| m == &vec![0, 1]));
    }

    #[test]
    fn crossing_follows_analytic_branches() {
        let f = crossing();
        for res in [64, 65, 257] {
            let b = eigenpaths(&f, (-1.0, 1.0), res).unwrap();
            let dev = b
                .grid
                .iter()
                .enumerate()
                .map(|(k, &t)| (b.values[k][0] - t).abs().max((b.values[k][1] + t).abs()))
                .fold(0.0, f64::max);
            // path 0 starts at the lower value -1, i.e. the branch η = t
            assert!(dev < 1e-12, "res {res}: {dev}");
            for v in &b.vectors {
                assert!((v - identity(2)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn avoided_crossing_branches() {
        let b = eigenpaths(&avoided(), (-1.0, 1.0), 101).unwrap();
        for (k, &t) in b.grid.iter().enumerate() {
            let r = (t * t + 1.0).sqrt();
            assert!((b.values[k][0] + r).abs() < 1e-12);
            assert!((b.values[k][1] - r).abs() < 1e-12);
        }
        assert!(b.max_residual(&avoided()) < 1e-10);
    }

    #[test]
    fn identity_family_keeps_basis() {
        let f = HermitianFamily::linear(identity(3), identity(3)).unwrap();
        let b = eigenpaths(&f, (0.0, 2.0), 9).unwrap();
        for v in &b.vectors {
            assert!((v - &b.vectors[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_loop_matching_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let fam = HermitianFamily::constant(random_hermitian(&mut rng, 4)).unwrap();
        let degenerate = HermitianFamily::constant(diag_real(&[1.0, 1.0, 3.0])).unwrap();
        for f in [fam, degenerate] {
            let n = f.dim();
            let ts: Vec<f64> = (0..=10)
                .map(|k| k as f64 / 10.0)
                .chain((0..10).rev().map(|k| k as f64 / 10.0))
                .collect();
            let mut cur = TrackedSample::sorted(ts[0], &f.eval(ts[0])).unwrap();
            let mut composed: Vec<usize> = (0..n).collect();
            for &t in &ts[1..] {
                let next = match_step(&cur, &f.eval(t), t, None, &PathOptions::default()).unwrap();
                let mut m = vec![0; n];
                for i in 0..n {
                    m[cur.ranks[i]] = next.ranks[i];
                }
                composed = composed.iter().map(|&r| m[r]).collect();
                cur = next;
            }
            assert_eq!(composed, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn resolution_and_interval_validated() {
        assert_eq!(
            eigenpaths(&crossing(), (0.0, 1.0), 1),
            Err(SpectralError::Resolution(1))
        );
        assert!(matches!(
            eigenpaths(&crossing(), (1.0, 0.0), 4),
            Err(SpectralError::Interval(..))
        ));
    }

    #[test]
    fn near_avoided_crossing_refines() {
        // gap 2e-4 at t = 0: vectors rotate over a width far below the grid step
        let a = CMat::from_row_slice(2, 2, &[re(0.0), re(1e-4), re(1e-4), re(0.0)]);
        let f = HermitianFamily::linear(a, diag_real(&[1.0, -1.0])).unwrap();
        let b = eigenpaths(&f, (-1.0, 1.0), 33).unwrap();
        assert!(b.len() > 33);
        assert!(b.max_residual(&f) < 1e-10);
        // adiabatic branches: ascending order is kept
        for v in &b.values {
            assert!(v[0] < v[1]);
        }
    }
}
