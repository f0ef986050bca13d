use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::coeff::{prime_power, Coefficient};
use crate::error::{Error, Result};
use crate::monomial::ExponentVector;
use crate::signature::Signature;
use crate::Rational;

/// A finite sum of rational multiples of monomials, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElement {
    sig: Arc<Signature>,
    terms: BTreeMap<ExponentVector, Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Pow(u32),
}

/// `x op y`; for `Pow(n)` the result is `x^n` and `y` only has to share the declarations.
pub fn element_arith(x: &RingElement, y: &RingElement, op: ArithOp) -> Result<RingElement> {
    match op {
        ArithOp::Add => x.checked_add(y),
        ArithOp::Mul => x.checked_mul(y),
        ArithOp::Pow(n) => {
            x.same_ring(y)?;
            Ok(x.pow(n))
        }
    }
}

impl RingElement {
    pub fn zero(sig: Arc<Signature>) -> Self {
        RingElement { sig, terms: BTreeMap::new() }
    }

    pub fn constant(sig: Arc<Signature>, c: Rational) -> Self {
        let n = sig.len();
        let mut x = RingElement::zero(sig);
        x.push(ExponentVector::zero(n), c);
        x
    }

    pub fn one(sig: Arc<Signature>) -> Self {
        RingElement::constant(sig, Rational::one())
    }

    pub fn monomial(sig: Arc<Signature>, c: Rational, e: ExponentVector) -> Result<Self> {
        sig.check(&e)?;
        let mut x = RingElement::zero(sig);
        x.push(e, c);
        Ok(x)
    }

    pub fn from_terms<I>(sig: Arc<Signature>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, Rational)>,
    {
        let mut x = RingElement::zero(sig);
        for (e, c) in terms {
            x.sig.check(&e)?;
            x.push(e, c);
        }
        Ok(x)
    }

    fn push(&mut self, e: ExponentVector, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn prime(&self) -> u32 {
        self.sig.prime()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &ExponentVector) -> Coefficient {
        let v = self.terms.get(e).cloned().unwrap_or_else(Rational::zero);
        Coefficient::new(v, self.prime())
    }

    fn same_ring(&self, other: &RingElement) -> Result<()> {
        if Arc::ptr_eq(&self.sig, &other.sig) || self.sig == other.sig {
            Ok(())
        } else {
            Err(Error::Declaration("operands have different variable declarations".into()))
        }
    }

    pub fn checked_add(&self, other: &RingElement) -> Result<RingElement> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.push(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &RingElement) -> Result<RingElement> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &RingElement) -> Result<RingElement> {
        self.same_ring(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &RingElement) -> RingElement {
        let mut out = RingElement::zero(self.sig.clone());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                if let Some(e) = self.sig.multiply(e1, e2) {
                    out.push(e, c1 * c2);
                }
            }
        }
        out
    }

    pub fn neg(&self) -> RingElement {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> RingElement {
        if c.is_zero() {
            return RingElement::zero(self.sig.clone());
        }
        RingElement {
            sig: self.sig.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// `p^k * self`.
    pub fn scale_by_prime_power(&self, k: i64) -> RingElement {
        self.scale(&prime_power(self.prime(), k))
    }

    pub fn pow(&self, n: u32) -> RingElement {
        let mut result = RingElement::one(self.sig.clone());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let magnitude = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if e.is_zero() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{}", self.sig.format_monomial(e))?;
            } else {
                write!(f, "{magnitude} {}", self.sig.format_monomial(e))?;
            }
        }
        Ok(())
    }
}

/// Assigns each variable a weight in `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    weights: Vec<Vec<i64>>,
}

impl Grading {
    pub fn new(weights: Vec<Vec<i64>>) -> Result<Self> {
        let d = weights.first().map_or(0, Vec::len);
        if weights.iter().any(|w| w.len() != d) {
            return Err(Error::Parameter("grading weights of unequal length".into()));
        }
        Ok(Grading { weights })
    }

    /// Each variable's exponent is its own graded direction.
    pub fn canonical(nvars: usize) -> Self {
        let weights = (0..nvars)
            .map(|i| (0..nvars).map(|j| i64::from(i == j)).collect())
            .collect();
        Grading { weights }
    }

    pub fn rank(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn weight_of(&self, e: &ExponentVector) -> Vec<Rational> {
        let mut w = alloc::vec![Rational::zero(); self.rank()];
        for (x, row) in e.entries().iter().zip(&self.weights) {
            for (acc, k) in w.iter_mut().zip(row) {
                *acc += x * Rational::from_integer((*k).into());
            }
        }
        w
    }
}

/// Splits `x` into homogeneous pieces, sorted by weight.
pub fn homogeneous_components(x: &RingElement, g: &Grading) -> Vec<(Vec<Rational>, RingElement)> {
    let mut parts: BTreeMap<Vec<Rational>, RingElement> = BTreeMap::new();
    for (e, c) in x.terms() {
        parts
            .entry(g.weight_of(e))
            .or_insert_with(|| RingElement::zero(x.sig.clone()))
            .push(e.clone(), c.clone());
    }
    parts.into_iter().collect()
}

/// Renders a weight vector as `(a,b,...)`.
pub fn format_weight(w: &[Rational]) -> String {
    let inner: Vec<String> = w.iter().map(|x| alloc::format!("{x}")).collect();
    alloc::format!("({})", inner.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::VarDecl;

    fn ring41() -> Arc<Signature> {
        Arc::new(Signature::new(2, alloc::vec![VarDecl::invertible("T"), VarDecl::nilpotent("Z", 2)]).unwrap())
    }

    fn mono(sig: &Arc<Signature>, c: i64, f: &[(&str, i64)]) -> RingElement {
        RingElement::monomial(sig.clone(), Rational::from_integer(c.into()), sig.monomial(f).unwrap()).unwrap()
    }

    #[test]
    fn nilpotent_square_vanishes() {
        let s = ring41();
        let z = mono(&s, 1, &[("Z", 1)]);
        assert!(z.checked_mul(&z).unwrap().is_zero());
        assert_eq!(z.checked_mul(&RingElement::one(s)).unwrap(), z);
    }

    #[test]
    fn cancellation_gives_canonical_zero() {
        let s = ring41();
        let t = mono(&s, 3, &[("T", 1)]);
        assert_eq!(t.checked_sub(&t).unwrap(), RingElement::zero(s));
    }

    #[test]
    fn mismatched_declarations() {
        let s = ring41();
        let other = Arc::new(Signature::new(2, alloc::vec![VarDecl::invertible("T")]).unwrap());
        let x = RingElement::one(s);
        let y = RingElement::one(other);
        assert!(matches!(element_arith(&x, &y, ArithOp::Add), Err(Error::Declaration(_))));
    }

    #[test]
    fn components_of_product() {
        let s = ring41();
        let one = RingElement::one(s.clone());
        let a = one.checked_add(&mono(&s, 1, &[("T", 1)])).unwrap();
        let b = one.checked_add(&mono(&s, 1, &[("Z", 1)])).unwrap();
        let parts = homogeneous_components(&a.checked_mul(&b).unwrap(), &Grading::canonical(2));
        assert_eq!(parts.len(), 4);
        assert!(parts.iter().all(|(_, c)| c.len() == 1));
        assert!(parts.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn display() {
        let s = ring41();
        let x = mono(&s, -3, &[("T", -1), ("Z", 1)]).checked_add(&mono(&s, 2, &[])).unwrap();
        assert_eq!(alloc::format!("{x}"), "-3 T^-1 Z + 2");
    }
}
