use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Gauge, GaugeSpec, GaugeVerdict};
use crate::element::RingElement;
use crate::error::{Error, Result};
use crate::ext::ExtInt;
use crate::monomial::ExponentVector;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Membership {
    Yes,
    No,
    Inconclusive,
}

impl Membership {
    /// Three-valued conjunction.
    pub fn and(self, other: Membership) -> Membership {
        match (self, other) {
            (Membership::No, _) | (_, Membership::No) => Membership::No,
            (Membership::Yes, Membership::Yes) => Membership::Yes,
            _ => Membership::Inconclusive,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Membership::Yes => "yes",
            Membership::No => "no",
            Membership::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Decides a single term `lambda x^e` with `v(lambda) = v` against a verdict for `gauge(e)`.
pub(crate) fn term_membership(v: i64, n: i64, verdict: &GaugeVerdict) -> Membership {
    let (lo, hi) = verdict.bounds();
    let slack = ExtInt::int(v - n);
    if hi <= slack {
        Membership::Yes
    } else if slack < lo {
        Membership::No
    } else {
        Membership::Inconclusive
    }
}

/// Whether `x` lies in `p^n` times the ring of definition.
pub fn membership(x: &RingElement, g: &dyn Gauge, n: i64, horizon: u32) -> Result<Membership> {
    if **x.signature_arc() != **g.signature() {
        return Err(Error::Declaration("element and gauge use different variables".into()));
    }
    let mut acc = Membership::Yes;
    for (e, c) in x.terms() {
        let v = crate::coeff::padic_valuation(c, x.prime()).expect("stored coefficients are nonzero");
        let verdict = g.evaluate(e, horizon)?;
        acc = acc.and(term_membership(v, n, &verdict));
        if acc == Membership::No {
            break;
        }
    }
    Ok(acc)
}

/// Rationals extended by both infinities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtRational {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::NegInf => f.write_str("-inf"),
            ExtRational::Finite(q) => write!(f, "{q}"),
            ExtRational::PosInf => f.write_str("+inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    Nondecreasing,
    Nonincreasing,
    Constant,
    Mixed,
}

/// Growth rate of `gauge(m e) / m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slope {
    /// Exact limit, available for closed-form gauges.
    pub limit: Option<ExtRational>,
    /// `gauge(h e) / h` at the horizon, when that value is known.
    pub sampled: Option<ExtRational>,
    pub horizon: u32,
    /// Trend of the sampled ratios over `1..=horizon`, where all are known.
    pub trend: Option<Trend>,
}

fn ratio(verdict: &GaugeVerdict, m: u32) -> Option<ExtRational> {
    match verdict {
        GaugeVerdict::Exact(v) => Some(ExtRational::Finite(Rational::new(v.clone(), BigInt::from(m)))),
        GaugeVerdict::MinusInfCertified { .. } => Some(ExtRational::NegInf),
        GaugeVerdict::PlusInf => Some(ExtRational::PosInf),
        _ => None,
    }
}

/// Exact limit of `gauge(m e) / m` for a closed-form gauge without adjoined monomials.
pub(crate) fn exact_slope(g: &GaugeSpec, e: &ExponentVector) -> Option<ExtRational> {
    let g = g.as_expression()?;
    let expr = g.expression_for(e)?;
    let zero = alloc::vec![Rational::zero(); e.len()];
    let ev = expr.eventual(&zero, e.entries());
    Some(match ev.tail {
        None => ExtRational::PosInf,
        Some(p) => match p.degree() {
            0 => ExtRational::Finite(Rational::zero()),
            1 => ExtRational::Finite(p.leading()),
            _ => match p.leading().cmp(&Rational::zero()) {
                Ordering::Less => ExtRational::NegInf,
                _ => ExtRational::PosInf,
            },
        },
    })
}

/// Growth rate of the gauge along the powers of `x^e`.
pub fn asymptotic_slope(g: &super::DerivedGauge, e: &ExponentVector, horizon: u32) -> Result<Slope> {
    let sig = g.signature().clone();
    sig.check(e)?;
    if horizon == 0 {
        return Err(Error::Parameter("horizon must be at least 1".into()));
    }
    if sig.annihilating_power(e).is_some() {
        return Err(Error::Parameter(alloc::format!(
            "{} is nilpotent; its powers vanish",
            sig.format_monomial(e)
        )));
    }
    let limit = if g.adjoined().is_empty() { exact_slope(g.base(), e) } else { None };
    let mut ratios = alloc::vec::Vec::new();
    for m in 1..=horizon {
        let em = e.scale_int(i64::from(m));
        ratios.push(ratio(&g.evaluate(&em, horizon)?, m));
    }
    let sampled = ratios.last().cloned().flatten();
    let trend = if ratios.iter().all(Option::is_some) {
        let r: alloc::vec::Vec<ExtRational> = ratios.into_iter().flatten().collect();
        let up = r.windows(2).all(|w| w[0] <= w[1]);
        let down = r.windows(2).all(|w| w[0] >= w[1]);
        Some(match (up, down) {
            (true, true) => Trend::Constant,
            (true, false) => Trend::Nondecreasing,
            (false, true) => Trend::Nonincreasing,
            _ => Trend::Mixed,
        })
    } else {
        None
    };
    Ok(Slope { limit, sampled, horizon, trend })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::RingElement;
    use crate::expr::var;
    use crate::gauge::{DerivedGauge, ExpressionGauge};
    use crate::signature::{Signature, VarDecl};
    use alloc::sync::Arc;

    fn ex41() -> DerivedGauge {
        let sig = Arc::new(Signature::new(2, alloc::vec![VarDecl::invertible("T"), VarDecl::nilpotent("Z", 2)]).unwrap());
        DerivedGauge::plain(GaugeSpec::Expression(
            ExpressionGauge::new(
                sig,
                alloc::vec![(alloc::vec![0], var(0).abs()), (alloc::vec![1], var(0).abs().negate())],
                None,
            )
            .unwrap(),
        ))
    }

    #[test]
    fn z_over_p_is_outside() {
        let g = ex41();
        let sig = g.signature().clone();
        let z = RingElement::monomial(sig.clone(), Rational::new(1.into(), 2.into()), sig.monomial(&[("Z", 1)]).unwrap())
            .unwrap();
        assert_eq!(membership(&z, &g, 0, 4).unwrap(), Membership::No);
        assert_eq!(membership(&RingElement::zero(sig), &g, 9, 4).unwrap(), Membership::Yes);
    }

    #[test]
    fn slope_of_t_is_one() {
        let g = ex41();
        let t = g.signature().monomial(&[("T", 1)]).unwrap();
        let s = asymptotic_slope(&g, &t, 10).unwrap();
        assert_eq!(s.limit, Some(ExtRational::Finite(Rational::from_integer(1.into()))));
        assert_eq!(s.trend, Some(Trend::Constant));
        let zero = ExponentVector::zero(2);
        assert_eq!(asymptotic_slope(&g, &zero, 3).unwrap().limit, Some(ExtRational::Finite(Rational::zero())));
        assert!(asymptotic_slope(&g, &g.signature().monomial(&[("Z", 1)]).unwrap(), 3).is_err());
    }
}
