//! Univariate polynomials with rational coefficients, used to follow
//! expressions along a ray `e + j * step`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(alloc::vec![c])
    }

    /// `a + b j`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Poly::new(alloc::vec![a, b])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial given degree 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, k: usize) -> Rational {
        self.0.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, j: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * j + c;
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::new((0..n).map(|k| self.coefficient(k) + other.coefficient(k)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::new(Vec::new());
        }
        let mut out = alloc::vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (k, b) in other.0.iter().enumerate() {
                out[i + k] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Sign of the polynomial for all sufficiently large arguments.
    pub fn eventual_sign(&self) -> Ordering {
        self.leading().cmp(&Rational::zero())
    }

    /// A nonnegative integer beyond which the polynomial has no real root,
    /// so its sign is constant on `[threshold, inf)`.
    pub fn sign_threshold(&self) -> BigInt {
        let t = match self.0.len() {
            0 | 1 => Rational::zero(),
            2 => (-&self.0[0] / &self.0[1]).floor() + Rational::one(),
            _ => {
                let lead = self.leading().abs();
                let m = self.0[..self.0.len() - 1]
                    .iter()
                    .map(|c| c.abs() / &lead)
                    .max()
                    .unwrap_or_else(Rational::zero);
                (m + Rational::one()).ceil()
            }
        };
        let t = t.to_integer();
        if t.is_negative() {
            BigInt::zero()
        } else {
            t
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn arithmetic() {
        let p = Poly::linear(q(1), q(2));
        let sq = p.mul(&p);
        assert_eq!(sq.coeffs(), &[q(1), q(4), q(4)]);
        assert_eq!(sq.eval(&q(3)), q(49));
        assert_eq!(sq.derivative().coeffs(), &[q(4), q(8)]);
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn thresholds_bound_roots() {
        let p = Poly::new(alloc::vec![q(-6), q(1), q(1)]);
        let t = p.sign_threshold();
        for j in 0..30i64 {
            if BigInt::from(j) >= t {
                assert!(p.eval(&q(j)) > q(0));
            }
        }
        assert_eq!(Poly::linear(q(-7), q(2)).sign_threshold(), BigInt::from(4));
    }
}
