use core::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

/// Integers extended by both infinities. The derived order puts `NegInf` first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtInt {
    NegInf,
    Finite(BigInt),
    PosInf,
}

impl ExtInt {
    pub fn int(n: i64) -> Self {
        ExtInt::Finite(n.into())
    }

    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            ExtInt::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtInt::Finite(_))
    }

    pub fn neg(&self) -> ExtInt {
        match self {
            ExtInt::NegInf => ExtInt::PosInf,
            ExtInt::PosInf => ExtInt::NegInf,
            ExtInt::Finite(v) => ExtInt::Finite(-v),
        }
    }

    /// Sum with a finite shift.
    pub fn shift(&self, k: &BigInt) -> ExtInt {
        match self {
            ExtInt::Finite(v) => ExtInt::Finite(v + k),
            other => other.clone(),
        }
    }

    /// Sum of two values; `None` for `-inf + +inf`.
    pub fn add(&self, other: &ExtInt) -> Option<ExtInt> {
        match (self, other) {
            (ExtInt::NegInf, ExtInt::PosInf) | (ExtInt::PosInf, ExtInt::NegInf) => None,
            (ExtInt::NegInf, _) | (_, ExtInt::NegInf) => Some(ExtInt::NegInf),
            (ExtInt::PosInf, _) | (_, ExtInt::PosInf) => Some(ExtInt::PosInf),
            (ExtInt::Finite(a), ExtInt::Finite(b)) => Some(ExtInt::Finite(a + b)),
        }
    }
}

impl From<BigInt> for ExtInt {
    fn from(v: BigInt) -> Self {
        ExtInt::Finite(v)
    }
}

impl Default for ExtInt {
    fn default() -> Self {
        ExtInt::Finite(BigInt::zero())
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => write!(f, "-inf"),
            ExtInt::PosInf => write!(f, "+inf"),
            ExtInt::Finite(v) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_arithmetic() {
        assert!(ExtInt::NegInf < ExtInt::int(-1000));
        assert!(ExtInt::int(1000) < ExtInt::PosInf);
        assert_eq!(ExtInt::int(3).add(&ExtInt::int(-5)), Some(ExtInt::int(-2)));
        assert_eq!(ExtInt::NegInf.add(&ExtInt::PosInf), None);
        assert_eq!(ExtInt::NegInf.neg(), ExtInt::PosInf);
    }
}
