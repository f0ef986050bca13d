use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::monomial::ExponentVector;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub invertible: bool,
    pub nilpotency_cap: Option<u32>,
    pub p_divisible: bool,
}

impl VarDecl {
    pub fn plain(name: &str) -> Self {
        VarDecl { name: name.into(), invertible: false, nilpotency_cap: None, p_divisible: false }
    }

    pub fn invertible(name: &str) -> Self {
        VarDecl { invertible: true, ..VarDecl::plain(name) }
    }

    pub fn nilpotent(name: &str, cap: u32) -> Self {
        VarDecl { nilpotency_cap: Some(cap), ..VarDecl::plain(name) }
    }

    pub fn p_divisible(mut self) -> Self {
        self.p_divisible = true;
        self
    }

    /// Whether the exponent ranges over a half-line or a bounded interval.
    pub fn is_graded(&self) -> bool {
        !self.invertible
    }
}

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && name != "pi" && name != "inf"
}

/// The variable declarations of a ring together with the model prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    prime: u32,
    vars: Vec<VarDecl>,
}

impl Signature {
    pub fn new(prime: u32, vars: Vec<VarDecl>) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::Declaration(format!("{prime} is not a prime")));
        }
        for (i, v) in vars.iter().enumerate() {
            if !valid_identifier(&v.name) {
                return Err(Error::Declaration(format!("invalid variable name `{}`", v.name)));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::Declaration(format!("variable `{}` declared twice", v.name)));
            }
            if let Some(cap) = v.nilpotency_cap {
                if v.invertible {
                    return Err(Error::Declaration(format!(
                        "variable `{}` cannot be both invertible and nilpotent",
                        v.name
                    )));
                }
                if cap == 0 {
                    return Err(Error::Declaration(format!("variable `{}` has cap 0", v.name)));
                }
                if v.p_divisible {
                    return Err(Error::Declaration(format!(
                        "nilpotent variable `{}` cannot take fractional exponents",
                        v.name
                    )));
                }
            }
        }
        Ok(Signature { prime, vars })
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn nilpotent_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.vars[i].nilpotency_cap.is_some()).collect()
    }

    fn denominator_ok(&self, d: &BigInt) -> bool {
        let p = BigInt::from(self.prime);
        let mut d = d.clone();
        while d.is_multiple_of(&p) {
            d /= &p;
        }
        d.is_one()
    }

    /// Checks that `e` is an exponent vector of this signature.
    pub fn check(&self, e: &ExponentVector) -> Result<()> {
        if e.len() != self.len() {
            return Err(Error::Declaration(format!(
                "exponent vector has {} entries, ring has {} variables",
                e.len(),
                self.len()
            )));
        }
        for (v, x) in self.vars.iter().zip(e.entries()) {
            if !x.is_integer() && !(v.p_divisible && self.denominator_ok(x.denom())) {
                return Err(Error::Declaration(format!("exponent {x} not allowed for `{}`", v.name)));
            }
            if !v.invertible && x.is_negative() {
                return Err(Error::Declaration(format!(
                    "negative exponent {x} for non-invertible `{}`",
                    v.name
                )));
            }
            if let Some(cap) = v.nilpotency_cap {
                if *x >= Rational::from_integer(cap.into()) {
                    return Err(Error::Declaration(format!(
                        "exponent {x} reaches the nilpotency cap of `{}`",
                        v.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self, e: &ExponentVector) -> bool {
        self.check(e).is_ok()
    }

    /// Builds a monomial from `(name, exponent)` pairs.
    pub fn monomial(&self, factors: &[(&str, i64)]) -> Result<ExponentVector> {
        let mut e = ExponentVector::zero(self.len());
        for (name, k) in factors {
            let i = self
                .index_of(name)
                .ok_or_else(|| Error::Declaration(format!("unknown variable `{name}`")))?;
            e.set(i, e.get(i) + Rational::from_integer((*k).into()));
        }
        self.check(&e)?;
        Ok(e)
    }

    fn annihilated(&self, e: &ExponentVector) -> bool {
        self.vars.iter().zip(e.entries()).any(|(v, x)| {
            v.nilpotency_cap.is_some_and(|cap| *x >= Rational::from_integer(cap.into()))
        })
    }

    /// Product of monomials, `None` when a nilpotent variable reaches its cap.
    pub fn multiply(&self, a: &ExponentVector, b: &ExponentVector) -> Option<ExponentVector> {
        let s = a.add(b);
        if self.annihilated(&s) {
            None
        } else {
            Some(s)
        }
    }

    pub fn power(&self, e: &ExponentVector, m: u64) -> Option<ExponentVector> {
        let s = e.scale_int(m as i64);
        if self.annihilated(&s) {
            None
        } else {
            Some(s)
        }
    }

    /// Least `c >= 1` with `x^(c e) = 0`, if any.
    pub fn annihilating_power(&self, e: &ExponentVector) -> Option<u64> {
        self.vars
            .iter()
            .zip(e.entries())
            .filter_map(|(v, x)| {
                let cap = v.nilpotency_cap?;
                if !x.is_positive() {
                    return None;
                }
                let c = (Rational::from_integer(cap.into()) / x).ceil();
                c.to_integer().to_u64()
            })
            .min()
    }

    /// Whether the monomial is a unit, i.e. only involves invertible variables.
    pub fn is_unit(&self, e: &ExponentVector) -> bool {
        self.vars.iter().zip(e.entries()).all(|(v, x)| v.invertible || x.is_zero())
    }

    pub fn format_monomial(&self, e: &ExponentVector) -> String {
        let mut out = String::new();
        for (v, x) in self.vars.iter().zip(e.entries()) {
            if x.is_zero() {
                continue;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&v.name);
            if !x.is_one() {
                out.push_str(&format!("^{x}"));
            }
        }
        if out.is_empty() {
            out.push('1');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(2, alloc::vec![VarDecl::invertible("T").p_divisible(), VarDecl::nilpotent("Z", 2)])
            .unwrap()
    }

    #[test]
    fn declaration_errors() {
        let clash = VarDecl { nilpotency_cap: Some(2), ..VarDecl::invertible("T") };
        assert!(Signature::new(2, alloc::vec![clash]).is_err());
        assert!(Signature::new(4, alloc::vec![]).is_err());
        assert!(Signature::new(3, alloc::vec![VarDecl::plain("T"), VarDecl::plain("T")]).is_err());
        assert!(Signature::new(3, alloc::vec![VarDecl::plain("pi")]).is_err());
    }

    #[test]
    fn lattice_membership() {
        let s = sig();
        let half = ExponentVector::new(alloc::vec![Rational::new(1.into(), 2.into()), Rational::zero()]);
        assert!(s.check(&half).is_ok());
        let third = ExponentVector::new(alloc::vec![Rational::new(1.into(), 3.into()), Rational::zero()]);
        assert!(s.check(&third).is_err());
        assert!(s.monomial(&[("Z", 2)]).is_err());
        assert!(s.monomial(&[("Q", 1)]).is_err());
    }

    #[test]
    fn nilpotent_products() {
        let s = sig();
        let z = s.monomial(&[("Z", 1)]).unwrap();
        let t = s.monomial(&[("T", -3)]).unwrap();
        assert_eq!(s.multiply(&z, &z), None);
        assert!(s.multiply(&z, &t).is_some());
        assert_eq!(s.annihilating_power(&z), Some(2));
        assert_eq!(s.annihilating_power(&t), None);
        assert_eq!(s.format_monomial(&s.multiply(&z, &t).unwrap()), "T^-3 Z");
    }
}
