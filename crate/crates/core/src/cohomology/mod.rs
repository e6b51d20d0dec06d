//! Partition combinatorics for torus-fixed loci of the Hilbert scheme of
//! points on `C* × C`, and the `μ_n`-character of the fixed components of
//! the `(det × tr)⁻¹(1, 0)` fiber.

mod certificate;
pub mod oracle;
mod poly;

pub use certificate::{kirwan_certificate, CertificateJson, KirwanCertificate, ReasoningStep};
pub use poly::Poly;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("parts must be positive and non-increasing: {0:?}")]
    InvalidParts(Vec<usize>),
    #[error("partition of {found} used where {expected} was required")]
    Size { expected: usize, found: usize },
    #[error("n must be at least 1")]
    ZeroN,
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Non-increasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self, CohomologyError> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(CohomologyError::InvalidParts(parts));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `(part size, multiplicity)` in decreasing order of size.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((s, c)) if *s == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Distinct part sizes.
    pub fn distinct(&self) -> Vec<usize> {
        self.multiplicities().into_iter().map(|(s, _)| s).collect()
    }

    /// Number of distinct part sizes.
    pub fn m(&self) -> usize {
        self.multiplicities().len()
    }

    /// gcd of the part sizes; 0 for the empty partition.
    pub fn d(&self) -> usize {
        self.parts.iter().fold(0, |g, &p| gcd(g, p))
    }
}

/// All partitions of `n`, parts non-increasing, listed in ascending
/// lexicographic order of the part sequences.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in 1..=max.min(rest) {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// `(1 + q)^{m(λ)}`.
pub fn sym_product_poincare(lambda: &Partition) -> Poly {
    Poly::one_plus_q_pow(lambda.m())
}

/// `Σ_λ (1 + q)^{m(λ)}`, grading shifts ignored.
pub fn hilb_total_betti(n: usize) -> Poly {
    partitions(n)
        .iter()
        .map(sym_product_poincare)
        .fold(Poly::zero(), |a, b| a + b)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedComponentReport {
    pub partition: Partition,
    pub m: usize,
    pub d: usize,
    pub num_components: usize,
    pub component_poincare: Poly,
    /// Components are the preimages of the `d`-th roots of unity under
    /// `p ↦ ∏ p_i^{i/d}`; labelling the root `e^{2πir/d}` by `r·n/d ∈ Z/n`,
    /// the generator of `μ_n` adds this class.
    pub gamma_shift: usize,
    pub free: bool,
}

/// Fixed components of the fiber for the stratum `λ`: the torus `(C*)^m`
/// of part-size coordinates cut by `∏ p_i^i = 1`.
pub fn fiber_fixed_components(lambda: &Partition, n: usize) -> Result<FixedComponentReport, CohomologyError> {
    if n == 0 {
        return Err(CohomologyError::ZeroN);
    }
    if lambda.size() != n {
        return Err(CohomologyError::Size {
            expected: n,
            found: lambda.size(),
        });
    }
    let m = lambda.m();
    let d = lambda.d();
    Ok(FixedComponentReport {
        partition: lambda.clone(),
        m,
        d,
        num_components: d,
        component_poincare: Poly::one_plus_q_pow(m - 1),
        gamma_shift: (n / d) % n,
        free: d == n,
    })
}

/// Coefficients over the characters `χ_0, …, χ_{n−1}` of `μ_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterVector {
    pub n: usize,
    pub coefficients: Vec<Poly>,
}

impl CharacterVector {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coefficients: vec![Poly::zero(); n],
        }
    }

    /// Total dimension: all coefficients evaluated at `q = 1`.
    pub fn dimension(&self) -> u64 {
        self.coefficients.iter().map(|p| p.eval(1)).sum()
    }

    /// Character of the permutation action of `μ_n` on the components of
    /// one report, weighted by the component Poincaré polynomial.
    pub fn of_report(n: usize, r: &FixedComponentReport) -> Self {
        let step = n / r.d;
        let mut out = Self::zero(n);
        for k in (0..n).step_by(step) {
            out.coefficients[k] = r.component_poincare.clone();
        }
        out
    }

    pub fn add(&mut self, other: &CharacterVector) {
        for (a, b) in self.coefficients.iter_mut().zip(&other.coefficients) {
            *a = a.clone() + b.clone();
        }
    }

    /// Every character has a nonzero coefficient.
    pub fn contains_regular(&self) -> bool {
        self.coefficients.iter().all(|p| !p.is_zero())
    }
}

pub fn fiber_fixed_character(n: usize) -> Result<CharacterVector, CohomologyError> {
    let mut total = CharacterVector::zero(n);
    for lambda in partitions(n) {
        total.add(&CharacterVector::of_report(n, &fiber_fixed_components(&lambda, n)?));
    }
    Ok(total)
}
