//! Kempf–Ness minimization along one-parameter torus directions.
//!
//! For a direction `c` the orbit function is
//! `F(s) = Σ_k e^{2scw_k}|y_k|² + cχs`, whose derivative is the pairing
//! `2Re⟨iX q, q⟩ + λ(iX)` at `q = e^{sX}y`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AdhmError;
use crate::linalg::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KNOrbitProblem {
    pub y0: Vec<C64>,
    pub weights: Vec<i64>,
    pub char_weight: i64,
    /// Scalar multiples of the weight generator.
    pub directions: Vec<f64>,
}

impl KNOrbitProblem {
    /// `F(s) = e^{2s+2} − 2s`, minimized at `s = −1` with value 3.
    pub fn toy() -> Self {
        Self {
            y0: vec![C64::new(std::f64::consts::E, 0.0)],
            weights: vec![1],
            char_weight: -2,
            directions: vec![1.0],
        }
    }

    /// Positive weight with no character term: `F` decreases to `s → −∞`.
    pub fn unbounded() -> Self {
        Self {
            y0: vec![C64::new(0.6, 0.8)],
            weights: vec![1],
            char_weight: 0,
            directions: vec![1.0],
        }
    }

    /// Up to four coordinates with entries in the unit square, weights in
    /// `[−3, 3]`, character weight in `[−4, 4]`.
    pub fn random_flat<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let k = rng.random_range(1..=4);
        Self {
            y0: (0..k)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
            weights: (0..k).map(|_| rng.random_range(-3..=3)).collect(),
            char_weight: rng.random_range(-4..=4),
            directions: vec![1.0, -0.5],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub initial_step: f64,
    pub backtrack: f64,
    pub max_iter: usize,
    pub grad_tol: f64,
    /// Relative step for the central-difference derivative check.
    pub fd_step: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            backtrack: 0.5,
            max_iter: 10_000,
            grad_tol: 1e-6,
            fd_step: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum KNOutcome {
    Minimum {
        s: f64,
        value: f64,
        gradient: f64,
        /// Relative gap between the finite-difference derivative and the
        /// moment pairing at `s`.
        moment_residual: f64,
        iterations: usize,
    },
    /// `F` is not bounded below or the infimum sits at `s → sign·∞`.
    Destabilizing { sign: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KNDirectionResult {
    pub direction: f64,
    #[serde(flatten)]
    pub outcome: KNOutcome,
}

struct Orbit<'a> {
    p: &'a KNOrbitProblem,
    c: f64,
}

impl Orbit<'_> {
    fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.p
            .weights
            .iter()
            .zip(&self.p.y0)
            .map(|(&w, y)| (self.c * w as f64, y.norm_sqr()))
    }

    fn value(&self, s: f64) -> f64 {
        self.terms().map(|(a, m)| (2.0 * s * a).exp() * m).sum::<f64>() + self.c * self.p.char_weight as f64 * s
    }

    /// `2Re⟨iX q, q⟩ + λ(iX)` with `iX` acting by `c·w_k`.
    fn pairing(&self, s: f64) -> f64 {
        self.terms()
            .map(|(a, m)| 2.0 * a * (2.0 * s * a).exp() * m)
            .sum::<f64>()
            + self.c * self.p.char_weight as f64
    }

    /// Sum of absolute values of the pairing's terms.
    fn magnitude(&self, s: f64) -> f64 {
        self.terms()
            .map(|(a, m)| (2.0 * a * (2.0 * s * a).exp() * m).abs())
            .sum::<f64>()
            + (self.c * self.p.char_weight as f64).abs()
    }

    /// Sign of the end where `F` fails to grow, if any.
    fn escape(&self) -> Option<f64> {
        let a = self.c * self.p.char_weight as f64;
        let live: Vec<f64> = self.terms().filter(|t| t.1 > 0.0).map(|t| t.0).collect();
        if a == 0.0 && live.iter().all(|&w| w == 0.0) {
            return None;
        }
        let up = live.iter().any(|&w| w > 0.0) || a > 0.0;
        let down = live.iter().any(|&w| w < 0.0) || a < 0.0;
        match (up, down) {
            (true, true) => None,
            (false, _) => Some(1.0),
            (true, false) => Some(-1.0),
        }
    }
}

/// Relative gap between a central difference of `F` and the pairing at `s`.
pub fn pairing_check(p: &KNOrbitProblem, c: f64, s: f64, fd_step: f64) -> f64 {
    let o = Orbit { p, c };
    let h = fd_step * (1.0 + s.abs());
    let fd = (o.value(s + h) - o.value(s - h)) / (2.0 * h);
    (fd - o.pairing(s)).abs() / (1.0 + o.magnitude(s))
}

pub fn kempf_ness_flow(p: &KNOrbitProblem) -> Result<Vec<KNDirectionResult>, AdhmError> {
    kempf_ness_flow_with(p, &FlowOptions::default())
}

/// Backtracking gradient descent on `F` along each direction, starting at
/// `s = 0`. Directions along which `F` has no minimum are reported as
/// destabilizing without iterating.
pub fn kempf_ness_flow_with(p: &KNOrbitProblem, opts: &FlowOptions) -> Result<Vec<KNDirectionResult>, AdhmError> {
    if p.weights.len() != p.y0.len() {
        return Err(AdhmError::Dimension(format!(
            "{} weights for a vector of length {}",
            p.weights.len(),
            p.y0.len()
        )));
    }
    Ok(p.directions
        .iter()
        .map(|&c| KNDirectionResult {
            direction: c,
            outcome: descend(&Orbit { p, c }, opts),
        })
        .collect())
}

fn descend(o: &Orbit<'_>, opts: &FlowOptions) -> KNOutcome {
    if let Some(sign) = o.escape() {
        return KNOutcome::Destabilizing { sign };
    }
    let mut s = 0.0;
    let mut f = o.value(s);
    let mut step = opts.initial_step;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let g = o.pairing(s);
        if g.abs() <= opts.grad_tol {
            break;
        }
        iterations += 1;
        let trial = s - step * g;
        let ft = o.value(trial);
        if ft <= f - 1e-4 * step * g * g {
            s = trial;
            f = ft;
            step *= 2.0;
        } else {
            step *= opts.backtrack;
            if step < 1e-300 {
                break;
            }
        }
    }
    KNOutcome::Minimum {
        s,
        value: f,
        gradient: o.pairing(s),
        moment_residual: pairing_check(o.p, o.c, s, opts.fd_step),
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn toy_minimizer() {
        let r = kempf_ness_flow(&KNOrbitProblem::toy()).unwrap();
        match r[0].outcome {
            KNOutcome::Minimum {
                s,
                value,
                gradient,
                moment_residual,
                ..
            } => {
                assert!((s + 1.0).abs() < 1e-6, "{s}");
                assert!((value - 3.0).abs() < 1e-10);
                assert!(gradient.abs() <= 1e-6);
                assert!(moment_residual < 1e-4);
            }
            ref o => panic!("{o:?}"),
        }
    }

    #[test]
    fn constant_function_is_critical_at_zero() {
        let p = KNOrbitProblem {
            y0: vec![re(0.0)],
            weights: vec![1],
            char_weight: 0,
            directions: vec![1.0, -2.0],
        };
        for r in kempf_ness_flow(&p).unwrap() {
            assert!(matches!(r.outcome, KNOutcome::Minimum { s, gradient, .. } if s == 0.0 && gradient == 0.0));
        }
    }

    #[test]
    fn monotone_direction_is_destabilizing() {
        let p = KNOrbitProblem {
            directions: vec![1.0, -1.0],
            ..KNOrbitProblem::unbounded()
        };
        let r = kempf_ness_flow(&p).unwrap();
        assert_eq!(r[0].outcome, KNOutcome::Destabilizing { sign: -1.0 });
        assert_eq!(r[1].outcome, KNOutcome::Destabilizing { sign: 1.0 });
    }

    #[test]
    fn length_mismatch_rejected() {
        let p = KNOrbitProblem {
            y0: vec![re(1.0)],
            weights: vec![1, 2],
            char_weight: 0,
            directions: vec![1.0],
        };
        assert!(matches!(kempf_ness_flow(&p), Err(AdhmError::Dimension(_))));
    }

    #[test]
    fn random_problems_satisfy_pairing_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let p = KNOrbitProblem::random_flat(&mut rng);
            for &dir in &p.directions {
                for s in [-1.0, 0.0, 0.7] {
                    assert!(pairing_check(&p, dir, s, 1e-5) < 1e-4);
                }
            }
            for r in kempf_ness_flow(&p).unwrap() {
                if let KNOutcome::Minimum {
                    gradient,
                    moment_residual,
                    ..
                } = r.outcome
                {
                    assert!(gradient.abs() <= 1e-6 && moment_residual < 1e-4);
                }
            }
        }
    }
}
