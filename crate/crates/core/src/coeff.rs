use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Exact p-adic valuation of an integer, `None` for zero.
pub fn int_valuation(n: &BigInt, p: u32) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// Exact p-adic valuation of a rational, `None` standing for `+inf`.
pub fn padic_valuation(x: &Rational, p: u32) -> Option<i64> {
    let num = int_valuation(x.numer(), p)?;
    let den = int_valuation(x.denom(), p).unwrap_or(0);
    Some(num - den)
}

/// `p^k` as an exact rational, for any sign of `k`.
pub fn prime_power(p: u32, k: i64) -> Rational {
    let base = BigInt::from(p).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

/// An element of the model field Q with its p-adic valuation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coefficient {
    pub value: Rational,
    pub prime: u32,
}

impl Coefficient {
    pub fn new(value: Rational, prime: u32) -> Self {
        Coefficient { value, prime }
    }

    pub fn from_int(n: i64, prime: u32) -> Self {
        Coefficient::new(Rational::from_integer(n.into()), prime)
    }

    /// `p^k`.
    pub fn uniformizer_power(k: i64, prime: u32) -> Self {
        Coefficient::new(prime_power(prime, k), prime)
    }

    pub fn valuation(&self) -> Option<i64> {
        padic_valuation(&self.value, self.prime)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn add(&self, other: &Coefficient) -> Coefficient {
        debug_assert_eq!(self.prime, other.prime);
        Coefficient::new(&self.value + &other.value, self.prime)
    }

    pub fn mul(&self, other: &Coefficient) -> Coefficient {
        debug_assert_eq!(self.prime, other.prime);
        Coefficient::new(&self.value * &other.value, self.prime)
    }

    pub fn neg(&self) -> Coefficient {
        Coefficient::new(-&self.value, self.prime)
    }

    /// Whether the coefficient lies in the valuation ring.
    pub fn is_integral(&self) -> bool {
        self.valuation().is_none_or(|v| v >= 0)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn valuations() {
        assert_eq!(padic_valuation(&q(12, 1), 2), Some(2));
        assert_eq!(padic_valuation(&q(3, 8), 2), Some(-3));
        assert_eq!(padic_valuation(&q(0, 1), 2), None);
        assert_eq!(padic_valuation(&q(-50, 3), 5), Some(2));
        assert_eq!(padic_valuation(&q(7, 9), 3), Some(-2));
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(2, 3), q(8, 1));
        assert_eq!(prime_power(2, -2), q(1, 4));
        assert_eq!(Coefficient::uniformizer_power(-5, 3).valuation(), Some(-5));
    }

    #[test]
    fn multiplicative_and_ultrametric() {
        let a = Coefficient::new(q(12, 5), 2);
        let b = Coefficient::new(q(3, 4), 2);
        assert_eq!(a.mul(&b).valuation(), Some(0));
        assert!(a.add(&b).valuation().unwrap() >= -2);
        assert!(Coefficient::from_int(0, 2).is_integral());
    }
}
