use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul};

/// Polynomial in `q` with nonnegative integer coefficients, lowest degree
/// first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly(Vec<u64>);

impl Poly {
    pub fn new(mut c: Vec<u64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        Self(c)
    }

    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn one() -> Self {
        Self(vec![1])
    }

    /// `(1 + q)^k`.
    pub fn one_plus_q_pow(k: usize) -> Self {
        let mut c = vec![1u64];
        for _ in 0..k {
            let mut next = vec![0u64; c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i] += a;
                next[i + 1] += a;
            }
            c = next;
        }
        Self(c)
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, q: u64) -> u64 {
        self.0.iter().rev().fold(0, |acc, &a| acc * q + a)
    }
}

impl Add for Poly {
    type Output = Poly;

    fn add(self, rhs: Poly) -> Poly {
        let (mut long, short) = if self.0.len() >= rhs.0.len() {
            (self.0, rhs.0)
        } else {
            (rhs.0, self.0)
        };
        for (a, b) in long.iter_mut().zip(short) {
            *a += b;
        }
        Poly::new(long)
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0u64; self.0.len() + rhs.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in rhs.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(k, &a)| match (k, a) {
                (0, a) => a.to_string(),
                (1, 1) => "q".into(),
                (1, a) => format!("{a}q"),
                (k, 1) => format!("q^{k}"),
                (k, a) => format!("{a}q^{k}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(Poly::one_plus_q_pow(0), Poly::one());
        assert_eq!(Poly::one_plus_q_pow(3), Poly::new(vec![1, 3, 3, 1]));
        assert_eq!(
            &Poly::one_plus_q_pow(2) * &Poly::one_plus_q_pow(1),
            Poly::one_plus_q_pow(3)
        );
    }

    #[test]
    fn arithmetic_and_display() {
        let p = Poly::new(vec![3, 1, 0, 0]);
        assert_eq!(p.coefficients(), &[3, 1]);
        assert_eq!(p.to_string(), "3 + q");
        assert_eq!((p.clone() + Poly::new(vec![0, 0, 2])).to_string(), "3 + q + 2q^2");
        assert_eq!(p.eval(1), 4);
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
