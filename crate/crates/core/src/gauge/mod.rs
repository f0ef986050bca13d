//! Gauges of monomial rings of definition.
//!
//! `gauge(e)` is the least `d` with `p^d x^e` in the ring of definition;
//! `+inf` marks monomials outside the ring and `-inf` topologically zero ones.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ext::ExtInt;
use crate::monomial::ExponentVector;
use crate::signature::Signature;

mod derived;
mod expression;
mod generators;
mod membership;

pub use derived::{gauge_intersection, DerivedGauge, Direction, IntersectionGauge};
pub use expression::ExpressionGauge;
pub use generators::{generator_gauge_oracle, Combination, Generator, GeneratorGauge, Minimum};
pub use membership::{asymptotic_slope, membership, ExtRational, Membership, Slope, Trend};

/// One member of a family certifying `-inf`: `x^monomial` has gauge `value`
/// and `x^e = x^monomial * x^shift` with `x^shift` a unit of the localized ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub monomial: ExponentVector,
    pub shift: ExponentVector,
    pub value: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GaugeVerdict {
    Exact(BigInt),
    AtMost { value: BigInt, horizon: u32 },
    /// `witnesses[n-1]` has gauge at most `-n` for every `n <= depth`.
    MinusInfCertified { depth: u32, witnesses: Vec<Witness> },
    PlusInf,
    Inconclusive { horizon: u32 },
}

impl GaugeVerdict {
    /// Certified interval containing the gauge value.
    pub fn bounds(&self) -> (ExtInt, ExtInt) {
        match self {
            GaugeVerdict::Exact(v) => (ExtInt::Finite(v.clone()), ExtInt::Finite(v.clone())),
            GaugeVerdict::AtMost { value, .. } => (ExtInt::NegInf, ExtInt::Finite(value.clone())),
            GaugeVerdict::MinusInfCertified { depth, .. } => (ExtInt::NegInf, ExtInt::int(-i64::from(*depth))),
            GaugeVerdict::PlusInf => (ExtInt::PosInf, ExtInt::PosInf),
            GaugeVerdict::Inconclusive { .. } => (ExtInt::NegInf, ExtInt::PosInf),
        }
    }

    pub fn lower(&self) -> ExtInt {
        self.bounds().0
    }

    pub fn upper(&self) -> ExtInt {
        self.bounds().1
    }

    pub fn exact(&self) -> Option<&BigInt> {
        match self {
            GaugeVerdict::Exact(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_minus_inf(&self) -> bool {
        matches!(self, GaugeVerdict::MinusInfCertified { .. })
    }

    /// Whether the value is at most `-horizon`, i.e. the monomial vanishes to that precision.
    pub fn vanishes_to(&self, horizon: u32) -> bool {
        self.upper() <= ExtInt::int(-i64::from(horizon))
    }

    pub fn label(&self) -> &'static str {
        match self {
            GaugeVerdict::Exact(_) => "exact",
            GaugeVerdict::AtMost { .. } => "at_most",
            GaugeVerdict::MinusInfCertified { .. } => "minus_inf",
            GaugeVerdict::PlusInf => "plus_inf",
            GaugeVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

impl fmt::Display for GaugeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaugeVerdict::Exact(v) => write!(f, "exact {v}"),
            GaugeVerdict::AtMost { value, horizon } => write!(f, "at_most {value} (horizon {horizon})"),
            GaugeVerdict::MinusInfCertified { depth, .. } => write!(f, "minus_inf (depth {depth})"),
            GaugeVerdict::PlusInf => write!(f, "plus_inf"),
            GaugeVerdict::Inconclusive { horizon } => write!(f, "inconclusive (horizon {horizon})"),
        }
    }
}

/// A verdict together with how it was reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub verdict: GaugeVerdict,
    /// Optimal shift for exact derived values.
    pub shift: Option<ExponentVector>,
    /// Optimal generator multiset for generator gauges.
    pub combination: Option<Combination>,
}

impl Evaluation {
    pub(crate) fn plain(verdict: GaugeVerdict) -> Self {
        Evaluation { verdict, shift: None, combination: None }
    }
}

pub trait Gauge {
    fn signature(&self) -> &Arc<Signature>;

    /// Evaluates at a declared exponent vector.
    fn explain(&self, e: &ExponentVector, horizon: u32) -> Result<Evaluation>;

    fn evaluate(&self, e: &ExponentVector, horizon: u32) -> Result<GaugeVerdict> {
        Ok(self.explain(e, horizon)?.verdict)
    }
}

/// Evaluates any gauge, checking the exponent and horizon first.
pub fn gauge_eval(g: &dyn Gauge, e: &ExponentVector, horizon: u32) -> Result<GaugeVerdict> {
    if horizon == 0 {
        return Err(Error::Parameter("horizon must be at least 1".into()));
    }
    g.signature().check(e)?;
    g.evaluate(e, horizon)
}

/// A ring of definition described either by a closed formula or by generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GaugeSpec {
    Expression(ExpressionGauge),
    Generators(GeneratorGauge),
}

impl GaugeSpec {
    pub fn as_expression(&self) -> Option<&ExpressionGauge> {
        match self {
            GaugeSpec::Expression(g) => Some(g),
            GaugeSpec::Generators(_) => None,
        }
    }

    pub fn as_generators(&self) -> Option<&GeneratorGauge> {
        match self {
            GaugeSpec::Generators(g) => Some(g),
            GaugeSpec::Expression(_) => None,
        }
    }
}

impl Gauge for GaugeSpec {
    fn signature(&self) -> &Arc<Signature> {
        match self {
            GaugeSpec::Expression(g) => g.signature(),
            GaugeSpec::Generators(g) => g.signature(),
        }
    }

    fn explain(&self, e: &ExponentVector, horizon: u32) -> Result<Evaluation> {
        match self {
            GaugeSpec::Expression(g) => g.explain(e, horizon),
            GaugeSpec::Generators(g) => g.explain(e, horizon),
        }
    }
}
