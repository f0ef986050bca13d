use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::expression::{affine_minimum, descent_point, ray_minimum, AffineMin, RayMin};
use super::generators::{descend, Search};
use super::{Evaluation, Gauge, GaugeSpec, GaugeVerdict, Generator, GeneratorGauge, Witness};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::ext::ExtInt;
use crate::monomial::ExponentVector;
use crate::signature::Signature;
use crate::Rational;

const NODE_LIMIT: usize = 20_000;
/// Largest box side scanned when no exact method applies.
const SCAN_SIDE: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// Adjoin `t`.
    Nonneg,
    /// Adjoin `1/t`.
    Nonpos,
    Both,
}

impl Direction {
    fn flip(self) -> Direction {
        match self {
            Direction::Nonneg => Direction::Nonpos,
            Direction::Nonpos => Direction::Nonneg,
            Direction::Both => Direction::Both,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Direction::Nonneg => "nonneg",
            Direction::Nonpos => "nonpos",
            Direction::Both => "both",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// The ring of definition generated by a base one together with some unit
/// monomials or their inverses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedGauge {
    base: GaugeSpec,
    adjoined: Vec<(ExponentVector, Direction)>,
    extended: Option<GeneratorGauge>,
    offset: usize,
}

impl DerivedGauge {
    pub fn plain(base: GaugeSpec) -> Self {
        DerivedGauge { base, adjoined: Vec::new(), extended: None, offset: 0 }
    }

    pub fn new(base: GaugeSpec, adjoined: Vec<(ExponentVector, Direction)>) -> Result<Self> {
        let sig = base.signature().clone();
        let mut norm: Vec<(ExponentVector, Direction)> = Vec::new();
        for (tau, dir) in adjoined {
            sig.check(&tau).map_err(|e| Error::Localization(e.to_string()))?;
            if tau.is_zero() {
                continue;
            }
            if let Some(i) = (0..sig.len()).find(|&i| !tau.get(i).is_zero() && !sig.vars()[i].invertible) {
                return Err(Error::Localization(format!(
                    "{} is not a unit: {} is not invertible",
                    sig.format_monomial(&tau),
                    sig.vars()[i].name
                )));
            }
            if matches!(base.evaluate(&tau, 1)?, GaugeVerdict::PlusInf) {
                return Err(Error::Localization(format!("{} is not in the ring", sig.format_monomial(&tau))));
            }
            let first = tau.entries().iter().find(|x| !x.is_zero()).unwrap();
            let (tau, dir) = if first.is_negative() { (tau.neg(), dir.flip()) } else { (tau, dir) };
            match norm.iter_mut().find(|(t, _)| *t == tau) {
                Some(slot) if slot.1 != dir => slot.1 = Direction::Both,
                Some(_) => {}
                None => norm.push((tau, dir)),
            }
        }
        norm.sort();
        let (extended, offset) = match &base {
            GaugeSpec::Generators(g) if !norm.is_empty() => {
                let mut extra = Vec::new();
                for (tau, dir) in &norm {
                    if *dir != Direction::Nonpos {
                        extra.push(Generator::new(tau.clone(), 0));
                    }
                    if *dir != Direction::Nonneg {
                        extra.push(Generator::new(tau.neg(), 0));
                    }
                }
                (Some(g.extended(extra)?), g.generators().len())
            }
            _ => (None, 0),
        };
        Ok(DerivedGauge { base, adjoined: norm, extended, offset })
    }

    /// Adjoins further monomials on top of the current ones.
    pub fn adjoin(&self, more: Vec<(ExponentVector, Direction)>) -> Result<DerivedGauge> {
        let mut all = self.adjoined.clone();
        all.extend(more);
        DerivedGauge::new(self.base.clone(), all)
    }

    pub fn base(&self) -> &GaugeSpec {
        &self.base
    }

    /// Normalized adjoined monomials: sorted, first nonzero exponent positive.
    pub fn adjoined(&self) -> &[(ExponentVector, Direction)] {
        &self.adjoined
    }

    pub fn signature(&self) -> &Arc<Signature> {
        self.base.signature()
    }

    /// Generators indexed by the combinations this gauge reports, if it has any.
    pub fn generators(&self) -> Option<&[Generator]> {
        match (&self.extended, &self.base) {
            (Some(g), _) | (None, GaugeSpec::Generators(g)) => Some(g.generators()),
            _ => None,
        }
    }

    /// Shift directions: the base is evaluated at `e + sum_k j_k columns[k]`, `j >= 0`.
    fn columns(&self) -> Vec<Vec<Rational>> {
        let mut cols = Vec::new();
        for (tau, dir) in &self.adjoined {
            if *dir != Direction::Nonpos {
                cols.push(tau.neg().entries().to_vec());
            }
            if *dir != Direction::Nonneg {
                cols.push(tau.entries().to_vec());
            }
        }
        cols
    }

    pub fn explain(&self, e: &ExponentVector, horizon: u32) -> Result<Evaluation> {
        self.signature().check(e)?;
        if self.adjoined.is_empty() {
            return self.base.explain(e, horizon);
        }
        match &self.base {
            GaugeSpec::Expression(g) => {
                let Some(expr) = g.expression_for(e) else {
                    return Ok(Evaluation::plain(GaugeVerdict::PlusInf));
                };
                self.explain_expression(expr, e, horizon)
            }
            GaugeSpec::Generators(_) => self.explain_generators(e, horizon),
        }
    }

    fn explain_generators(&self, e: &ExponentVector, horizon: u32) -> Result<Evaluation> {
        let g = self.extended.as_ref().expect("generator base carries its extension");
        let gens = g.generators();
        let n = e.len();
        let shift_of = |c: &super::Combination| {
            let mut s = ExponentVector::zero(n);
            for (k, gen) in c.counts.iter().zip(gens).skip(self.offset) {
                s = s.add(&gen.exponent.scale(&Rational::from_integer(k.clone())));
            }
            s
        };
        Ok(match g.search(e) {
            Search::Finite { value, combination } => Evaluation {
                verdict: GaugeVerdict::Exact(value),
                shift: Some(shift_of(&combination)),
                combination: Some(combination),
            },
            Search::Empty => Evaluation::plain(GaugeVerdict::PlusInf),
            Search::Exhausted => Evaluation::plain(GaugeVerdict::Inconclusive { horizon }),
            Search::Unbounded { base, cycle } => {
                let witnesses = (1..=horizon)
                    .map(|d| {
                        let c = descend(gens, &base, &cycle, &BigInt::from(-i64::from(d)));
                        let shift = shift_of(&c);
                        Witness { monomial: e.sub(&shift), shift, value: c.cost(gens) }
                    })
                    .collect();
                Evaluation::plain(GaugeVerdict::MinusInfCertified { depth: horizon, witnesses })
            }
        })
    }

    fn explain_expression(&self, expr: &Expr, e: &ExponentVector, horizon: u32) -> Result<Evaluation> {
        let cols = self.columns();
        let x = e.entries();
        let single = self.adjoined.len() == 1;
        if single {
            if let Some(ev) = rays(expr, e, &cols, horizon) {
                return Ok(ev);
            }
        }
        let moved: Vec<bool> = (0..x.len()).map(|i| cols.iter().any(|c| !c[i].is_zero())).collect();
        let fixed: Vec<Option<Rational>> =
            x.iter().zip(&moved).map(|(v, &m)| if m { None } else { Some(v.clone()) }).collect();
        let spec = expr.specialize(&fixed);
        let point_at = |j: &[BigInt]| -> ExponentVector {
            let mut p = x.to_vec();
            for (col, k) in cols.iter().zip(j) {
                let k = Rational::from_integer(k.clone());
                for (pi, c) in p.iter_mut().zip(col) {
                    *pi += c * &k;
                }
            }
            ExponentVector::new(p)
        };
        match affine_minimum(&spec, x.len(), x, &cols, NODE_LIMIT) {
            Some(AffineMin::Empty) => Ok(Evaluation::plain(GaugeVerdict::PlusInf)),
            Some(AffineMin::Min { value, point }) => {
                let at = point_at(&point);
                Ok(Evaluation {
                    verdict: GaugeVerdict::Exact(value.ceil().to_integer()),
                    shift: Some(e.sub(&at)),
                    combination: None,
                })
            }
            Some(AffineMin::Unbounded { point, ray, objective, offset }) => {
                let dot = |v: &[BigInt]| {
                    objective.iter().zip(v).fold(Rational::zero(), |acc, (o, k)| {
                        acc + o * Rational::from_integer(k.clone())
                    })
                };
                let v0 = dot(&point) + &offset;
                let slope = -dot(&ray);
                let witnesses = (1..=horizon)
                    .map(|d| {
                        let need = (&v0 + Rational::from_integer(d.into())) / &slope;
                        let t = need.ceil().to_integer().max(BigInt::zero());
                        let j: Vec<BigInt> = point.iter().zip(&ray).map(|(p, r)| p + r * &t).collect();
                        let at = point_at(&j);
                        let value = expr.eval(at.entries()).expect("ray stays in the support").ceil().to_integer();
                        Witness { shift: e.sub(&at), monomial: at, value }
                    })
                    .collect();
                Ok(Evaluation::plain(GaugeVerdict::MinusInfCertified { depth: horizon, witnesses }))
            }
            Some(AffineMin::Undecided { best }) => Ok(Evaluation::plain(match best {
                Some((v, _)) => GaugeVerdict::AtMost { value: v.ceil().to_integer(), horizon },
                None => GaugeVerdict::Inconclusive { horizon },
            })),
            None => Ok(Evaluation::plain(scan(expr, x, &cols, horizon))),
        }
    }
}

/// Exact evaluation along the one or two rays of a single adjoined monomial.
fn rays(expr: &Expr, e: &ExponentVector, cols: &[Vec<Rational>], horizon: u32) -> Option<Evaluation> {
    let x = e.entries();
    let mut best: Option<(BigInt, ExponentVector)> = None;
    let mut descent: Option<(usize, crate::poly::Poly, BigInt)> = None;
    for (k, col) in cols.iter().enumerate() {
        match ray_minimum(expr, x, col) {
            RayMin::TooLong => return None,
            RayMin::Empty => {}
            RayMin::Min { value, j } => {
                let jr = Rational::from_integer(j);
                let at = ExponentVector::new(x.iter().zip(col).map(|(a, c)| a + c * &jr).collect());
                if best.as_ref().is_none_or(|(b, _)| value < *b) {
                    best = Some((value, at));
                }
            }
            RayMin::Unbounded { tail, from } => {
                if descent.is_none() {
                    descent = Some((k, tail, from));
                }
            }
        }
    }
    if let Some((k, tail, from)) = descent {
        let col = &cols[k];
        let witnesses = (1..=horizon)
            .map(|d| {
                let j = Rational::from_integer(descent_point(&tail, &from, &BigInt::from(-i64::from(d))));
                let at = ExponentVector::new(x.iter().zip(col).map(|(a, c)| a + c * &j).collect());
                let value = expr.eval(at.entries()).expect("tail is finite").ceil().to_integer();
                Witness { shift: e.sub(&at), monomial: at, value }
            })
            .collect();
        return Some(Evaluation::plain(GaugeVerdict::MinusInfCertified { depth: horizon, witnesses }));
    }
    Some(match best {
        Some((v, at)) => Evaluation { verdict: GaugeVerdict::Exact(v), shift: Some(e.sub(&at)), combination: None },
        None => Evaluation::plain(GaugeVerdict::PlusInf),
    })
}

/// Minimum over the box `[0, side]^k` of shifts; only an upper bound.
fn scan(expr: &Expr, x: &[Rational], cols: &[Vec<Rational>], horizon: u32) -> GaugeVerdict {
    let side = horizon.min(SCAN_SIDE);
    let k = cols.len();
    let mut j = alloc::vec![0u32; k];
    let mut best: Option<BigInt> = None;
    loop {
        let mut p = x.to_vec();
        for (col, &m) in cols.iter().zip(&j) {
            let m = Rational::from_integer(m.into());
            for (pi, c) in p.iter_mut().zip(col) {
                *pi += c * &m;
            }
        }
        if let Some(v) = expr.eval(&p) {
            let v = v.ceil().to_integer();
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
        let mut i = 0;
        while i < k {
            j[i] += 1;
            if j[i] <= side {
                break;
            }
            j[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    match best {
        Some(value) => GaugeVerdict::AtMost { value, horizon },
        None => GaugeVerdict::Inconclusive { horizon },
    }
}

impl Gauge for DerivedGauge {
    fn signature(&self) -> &Arc<Signature> {
        self.base.signature()
    }

    fn explain(&self, e: &ExponentVector, horizon: u32) -> Result<Evaluation> {
        DerivedGauge::explain(self, e, horizon)
    }
}

/// Pointwise maximum of two gauges on one lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionGauge {
    left: DerivedGauge,
    right: DerivedGauge,
}

impl IntersectionGauge {
    pub fn left(&self) -> &DerivedGauge {
        &self.left
    }

    pub fn right(&self) -> &DerivedGauge {
        &self.right
    }
}

pub fn gauge_intersection(g1: &DerivedGauge, g2: &DerivedGauge) -> Result<IntersectionGauge> {
    if g1.signature() != g2.signature() {
        return Err(Error::Declaration("intersected gauges live on different rings".into()));
    }
    Ok(IntersectionGauge { left: g1.clone(), right: g2.clone() })
}

/// Combines two verdicts by taking the maximum of their certified intervals.
pub(crate) fn max_verdict(a: GaugeVerdict, b: GaugeVerdict, horizon: u32) -> GaugeVerdict {
    if let (
        GaugeVerdict::MinusInfCertified { depth: da, witnesses: wa },
        GaugeVerdict::MinusInfCertified { depth: db, witnesses: wb },
    ) = (&a, &b)
    {
        let depth = (*da).min(*db);
        let mut witnesses: Vec<Witness> = wa.iter().take(depth as usize).cloned().collect();
        witnesses.extend(wb.iter().take(depth as usize).cloned());
        return GaugeVerdict::MinusInfCertified { depth, witnesses };
    }
    let (la, ha) = a.bounds();
    let (lb, hb) = b.bounds();
    let lo = la.max(lb);
    let hi = ha.max(hb);
    match (lo, hi) {
        (ExtInt::PosInf, _) => GaugeVerdict::PlusInf,
        (ExtInt::Finite(l), ExtInt::Finite(h)) if l == h => GaugeVerdict::Exact(l),
        (_, ExtInt::Finite(h)) => GaugeVerdict::AtMost { value: h, horizon },
        _ => GaugeVerdict::Inconclusive { horizon },
    }
}

impl Gauge for IntersectionGauge {
    fn signature(&self) -> &Arc<Signature> {
        self.left.signature()
    }

    fn explain(&self, e: &ExponentVector, horizon: u32) -> Result<Evaluation> {
        let a = self.left.evaluate(e, horizon)?;
        let b = self.right.evaluate(e, horizon)?;
        Ok(Evaluation::plain(max_verdict(a, b, horizon)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, var, CmpOp};
    use crate::gauge::ExpressionGauge;
    use crate::signature::VarDecl;

    fn ex41() -> GaugeSpec {
        let sig = Arc::new(Signature::new(2, alloc::vec![VarDecl::invertible("T"), VarDecl::nilpotent("Z", 2)]).unwrap());
        GaugeSpec::Expression(
            ExpressionGauge::new(
                sig,
                alloc::vec![(alloc::vec![0], var(0).abs()), (alloc::vec![1], var(0).abs().negate())],
                None,
            )
            .unwrap(),
        )
    }

    fn t() -> ExponentVector {
        ExponentVector::from_ints(&[1, 0])
    }

    #[test]
    fn adjoining_t_kills_z() {
        let a = DerivedGauge::new(ex41(), alloc::vec![(t(), Direction::Nonneg)]).unwrap();
        let z = ExponentVector::from_ints(&[0, 1]);
        match a.evaluate(&z, 6).unwrap() {
            GaugeVerdict::MinusInfCertified { depth, witnesses } => {
                assert_eq!(depth, 6);
                for (n, w) in witnesses.iter().enumerate() {
                    assert!(w.value <= BigInt::from(-(n as i64) - 1));
                    assert_eq!(w.monomial.add(&w.shift), z);
                    assert!(w.shift.get(0).is_positive());
                }
            }
            v => panic!("{v}"),
        }
        assert_eq!(a.evaluate(&t(), 4).unwrap(), GaugeVerdict::Exact(BigInt::zero()));
    }

    #[test]
    fn normalization_merges_directions() {
        let d = DerivedGauge::new(
            ex41(),
            alloc::vec![(t(), Direction::Nonneg), (t().neg(), Direction::Nonneg), (ExponentVector::from_ints(&[0, 0]), Direction::Both)],
        )
        .unwrap();
        assert_eq!(d.adjoined(), &[(t(), Direction::Both)]);
        let err = DerivedGauge::new(ex41(), alloc::vec![(ExponentVector::from_ints(&[0, 1]), Direction::Nonneg)]);
        assert!(matches!(err, Err(Error::Localization(_))));
    }

    #[test]
    fn intersection_rules() {
        let h = 3;
        let m = GaugeVerdict::MinusInfCertified { depth: 3, witnesses: Vec::new() };
        assert_eq!(max_verdict(GaugeVerdict::Exact(BigInt::from(-1)), m.clone(), h), GaugeVerdict::Exact(BigInt::from(-1)));
        assert_eq!(
            max_verdict(GaugeVerdict::Exact(BigInt::from(-7)), m.clone(), h),
            GaugeVerdict::AtMost { value: BigInt::from(-3), horizon: 3 }
        );
        assert!(max_verdict(m.clone(), m, h).is_minus_inf());
        assert_eq!(max_verdict(GaugeVerdict::PlusInf, GaugeVerdict::Exact(BigInt::zero()), h), GaugeVerdict::PlusInf);
    }

    #[test]
    fn multi_adjunction_uses_pieces() {
        let sig = Arc::new(Signature::new(2, alloc::vec![VarDecl::invertible("P"), VarDecl::invertible("Q")]).unwrap());
        // max(P + Q, P - Q) with P and Q adjoined: unbounded below
        let g = GaugeSpec::Expression(
            ExpressionGauge::formula(sig.clone(), Expr::Max(alloc::vec![var(0).add(var(1)), var(0).sub(var(1))])).unwrap(),
        );
        let d = DerivedGauge::new(
            g,
            alloc::vec![(ExponentVector::from_ints(&[1, 0]), Direction::Nonneg), (ExponentVector::from_ints(&[0, 1]), Direction::Nonneg)],
        )
        .unwrap();
        match d.evaluate(&ExponentVector::from_ints(&[2, 0]), 5).unwrap() {
            GaugeVerdict::MinusInfCertified { witnesses, .. } => {
                for (n, w) in witnesses.iter().enumerate() {
                    assert!(w.value <= BigInt::from(-(n as i64) - 1));
                }
            }
            v => panic!("{v}"),
        }
        // max(P, Q, 0 - 4) bounded below by -4... here guarded by a case
        let h = GaugeSpec::Expression(
            ExpressionGauge::formula(
                sig,
                Expr::case(
                    alloc::vec![(crate::expr::Guard(alloc::vec![crate::expr::atom(var(0), CmpOp::Ge, int(-3))]), var(0))],
                    Expr::Inf,
                ),
            )
            .unwrap(),
        );
        let d = DerivedGauge::new(
            h,
            alloc::vec![(ExponentVector::from_ints(&[1, 1]), Direction::Nonneg), (ExponentVector::from_ints(&[1, 0]), Direction::Nonneg)],
        )
        .unwrap();
        assert_eq!(d.evaluate(&ExponentVector::from_ints(&[4, 0]), 5).unwrap(), GaugeVerdict::Exact(BigInt::from(-3)));
    }
}
