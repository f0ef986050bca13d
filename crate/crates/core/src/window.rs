//! Finite boxes of exponent vectors.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::monomial::ExponentVector;
use crate::signature::Signature;
use crate::Rational;

/// Invertible exponents range over `[-radius, radius]`, plain ones over
/// `[0, radius]`, nilpotent ones over `[0, cap)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub radius: u32,
    /// Bound on the total exponent of the non-invertible variables.
    pub max_degree: Option<u32>,
    /// Step `1/denominator` on p-divisible variables.
    pub denominator: u32,
}

impl Window {
    pub fn new(radius: u32) -> Self {
        Window { radius, max_degree: None, denominator: 1 }
    }

    pub fn with_degree(mut self, d: u32) -> Self {
        self.max_degree = Some(d);
        self
    }

    pub fn with_denominator(mut self, d: u32) -> Self {
        self.denominator = d.max(1);
        self
    }

    fn axis(&self, sig: &Signature, i: usize) -> Vec<Rational> {
        let v = &sig.vars()[i];
        let r = i64::from(self.radius);
        if let Some(cap) = v.nilpotency_cap {
            return (0..i64::from(cap).min(r + 1)).map(|k| Rational::from_integer(k.into())).collect();
        }
        let den = if v.p_divisible { i64::from(self.denominator) } else { 1 };
        let lo = if v.invertible { -r * den } else { 0 };
        (lo..=r * den).map(|k| Rational::new(BigInt::from(k), BigInt::from(den))).collect()
    }

    /// All points, in lexicographic order of the coordinates.
    pub fn points(&self, sig: &Signature) -> Vec<ExponentVector> {
        let axes: Vec<Vec<Rational>> = (0..sig.len()).map(|i| self.axis(sig, i)).collect();
        let graded: Vec<bool> = sig.vars().iter().map(|v| !v.invertible).collect();
        let mut out = Vec::new();
        let mut cur: Vec<Rational> = Vec::with_capacity(sig.len());
        self.fill(&axes, &graded, &mut cur, &Rational::zero(), &mut out);
        out
    }

    fn fill(
        &self,
        axes: &[Vec<Rational>],
        graded: &[bool],
        cur: &mut Vec<Rational>,
        degree: &Rational,
        out: &mut Vec<ExponentVector>,
    ) {
        let i = cur.len();
        if i == axes.len() {
            out.push(ExponentVector::new(cur.clone()));
            return;
        }
        for x in &axes[i] {
            let d = if graded[i] { degree + x } else { degree.clone() };
            if let Some(m) = self.max_degree {
                if d > Rational::from_integer(m.into()) {
                    continue;
                }
            }
            cur.push(x.clone());
            self.fill(axes, graded, cur, &d, out);
            cur.pop();
        }
    }
}

/// Sum of absolute values of the exponents, used to pick the simplest witness.
pub fn weight(e: &ExponentVector) -> Rational {
    e.entries().iter().fold(Rational::zero(), |acc, x| acc + num_traits::Signed::abs(x))
}

/// Exponents as machine integers, when they all are integers in range.
pub fn small_coords(e: &ExponentVector) -> Option<Vec<i64>> {
    e.entries().iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::VarDecl;

    #[test]
    fn box_shape() {
        let sig = Signature::new(2, alloc::vec![VarDecl::invertible("T"), VarDecl::nilpotent("Z", 2), VarDecl::plain("W")])
            .unwrap();
        assert_eq!(Window::new(2).points(&sig).len(), 5 * 2 * 3);
        assert_eq!(Window::new(2).with_degree(1).points(&sig).len(), 5 * 3);
        let sig = Signature::new(2, alloc::vec![VarDecl::invertible("T").p_divisible()]).unwrap();
        assert_eq!(Window::new(1).with_denominator(4).points(&sig).len(), 9);
    }
}
