//! Power-bounded elements, topological nilpotence and uniformity.
//!
//! The rings here are graded by their exponent lattice, so an element is
//! power-bounded exactly when each of its terms is. Every question is
//! therefore reduced to single terms `lambda x^e`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::coeff::padic_valuation;
use crate::element::{Grading, RingElement};
use crate::error::{Error, Result};
use crate::ext::ExtInt;
use crate::gauge::{membership, DerivedGauge, Direction, ExtRational, Gauge, GaugeSpec, GaugeVerdict, Membership};
use crate::monomial::ExponentVector;
use crate::signature::Signature;
use crate::window::{small_coords, weight, Window};
use crate::Rational;

const POWER_SCAN_LIMIT: u64 = 200_000;

/// A Tate ring together with its ring of definition; the open subring of
/// integral elements is always the power-bounded one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TateRingDesc {
    gauge: DerivedGauge,
    grading: Grading,
}

impl TateRingDesc {
    pub fn new(gauge: GaugeSpec) -> Result<Self> {
        TateRingDesc::with_gauge(DerivedGauge::plain(gauge))
    }

    /// Checks `1` lies in the ring of definition and spot-checks closure under products.
    pub fn with_gauge(gauge: DerivedGauge) -> Result<Self> {
        let sig = gauge.signature().clone();
        let zero = ExponentVector::zero(sig.len());
        if gauge.evaluate(&zero, 1)?.lower() > ExtInt::int(0) {
            return Err(Error::Definition("the ring of definition does not contain 1".into()));
        }
        let report = subadditivity(&gauge, &Window::new(1).with_degree(1), 1)?;
        if let Some((a, b)) = report.violations.first() {
            return Err(Error::Definition(format!(
                "not closed under products: {} * {}",
                sig.format_monomial(a),
                sig.format_monomial(b)
            )));
        }
        let grading = Grading::canonical(sig.len());
        Ok(TateRingDesc { gauge, grading })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        self.gauge.signature()
    }

    pub fn gauge(&self) -> &DerivedGauge {
        &self.gauge
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    /// The same ring with a larger ring of definition.
    pub fn adjoin(&self, more: Vec<(ExponentVector, Direction)>) -> Result<TateRingDesc> {
        TateRingDesc::with_gauge(self.gauge.adjoin(more)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubadditivityReport {
    pub pairs: u64,
    /// Pairs with `gauge(e + e') > gauge(e) + gauge(e')` certainly.
    pub violations: Vec<(ExponentVector, ExponentVector)>,
}

enum Table {
    Dense { lo: Vec<i64>, dims: Vec<usize>, cells: Vec<Option<(ExtInt, ExtInt)>> },
    Sparse(BTreeMap<ExponentVector, (ExtInt, ExtInt)>),
}

impl Table {
    fn for_sums(points: &[ExponentVector]) -> Table {
        let coords: Option<Vec<Vec<i64>>> = points.iter().map(small_coords).collect();
        if let Some(coords) = coords.filter(|c| !c.is_empty()) {
            let n = coords[0].len();
            let lo: Vec<i64> = (0..n).map(|i| coords.iter().map(|c| c[i].min(2 * c[i])).min().unwrap()).collect();
            let hi: Vec<i64> = (0..n).map(|i| coords.iter().map(|c| c[i].max(2 * c[i])).max().unwrap()).collect();
            let dims: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
            let size = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
            if let Some(size) = size.filter(|&s| s <= 4_000_000) {
                return Table::Dense { lo, dims, cells: alloc::vec![None; size] };
            }
        }
        Table::Sparse(BTreeMap::new())
    }

    fn get(&mut self, g: &dyn Gauge, e: &ExponentVector, horizon: u32) -> Result<(ExtInt, ExtInt)> {
        match self {
            Table::Dense { lo, dims, cells } => {
                let c = small_coords(e).expect("integral window");
                let mut idx = 0usize;
                for ((x, l), d) in c.iter().zip(lo.iter()).zip(dims.iter()) {
                    idx = idx * d + (x - l) as usize;
                }
                if let Some(v) = &cells[idx] {
                    return Ok(v.clone());
                }
                let v = g.evaluate(e, horizon)?.bounds();
                cells[idx] = Some(v.clone());
                Ok(v)
            }
            Table::Sparse(map) => {
                if let Some(v) = map.get(e) {
                    return Ok(v.clone());
                }
                let v = g.evaluate(e, horizon)?.bounds();
                map.insert(e.clone(), v.clone());
                Ok(v)
            }
        }
    }
}

/// Exhaustive check of `gauge(e + e') <= gauge(e) + gauge(e')` over pairs of window points.
pub fn subadditivity(g: &dyn Gauge, window: &Window, horizon: u32) -> Result<SubadditivityReport> {
    let sig = g.signature().clone();
    let points = window.points(&sig);
    let mut table = Table::for_sums(&points);
    let mut pairs = 0u64;
    let mut violations = Vec::new();
    for (i, a) in points.iter().enumerate() {
        let (_, ha) = table.get(g, a, horizon)?;
        if ha == ExtInt::PosInf {
            continue;
        }
        for b in &points[i..] {
            let (_, hb) = table.get(g, b, horizon)?;
            let Some(rhs) = ha.add(&hb) else { continue };
            if rhs == ExtInt::PosInf {
                continue;
            }
            let Some(s) = sig.multiply(a, b) else { continue };
            pairs += 1;
            let (ls, _) = table.get(g, &s, horizon)?;
            if ls > rhs {
                violations.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(SubadditivityReport { pairs, violations })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    NilpotentLine,
    SlopeViolation,
    Family,
}

impl WitnessKind {
    pub fn label(self) -> &'static str {
        match self {
            WitnessKind::NilpotentLine => "nilpotent_line",
            WitnessKind::SlopeViolation => "slope_violation",
            WitnessKind::Family => "family",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundednessWitness {
    pub kind: WitnessKind,
    pub monomial: ExponentVector,
    /// Pairs `(n, k)` with `(p^-n x^e)^k` in the ring of definition.
    pub powers: Vec<(u32, u64)>,
    /// Members of an exhibited family with their defects `gauge(e) - v_min(e)`.
    pub family: Vec<(ExponentVector, BigInt)>,
    pub annihilator: Option<u64>,
    pub slope: Option<ExtRational>,
    pub valuation: Option<i64>,
}

impl BoundednessWitness {
    fn bare(kind: WitnessKind, monomial: ExponentVector) -> Self {
        BoundednessWitness {
            kind,
            monomial,
            powers: Vec::new(),
            family: Vec::new(),
            annihilator: None,
            slope: None,
            valuation: None,
        }
    }

    /// Re-derives the certificate from membership and gauge calls.
    pub fn recheck(&self, ring: &TateRingDesc, horizon: u32) -> Result<bool> {
        let sig = ring.signature();
        let g = ring.gauge();
        match self.kind {
            WitnessKind::NilpotentLine => {
                let Some(c) = self.annihilator else { return Ok(false) };
                Ok(sig.power(&self.monomial, c).is_none() && g.evaluate(&self.monomial, horizon)?.exact().is_some())
            }
            WitnessKind::SlopeViolation => {
                let (Some(ExtRational::Finite(s)), Some(v)) = (&self.slope, self.valuation) else {
                    return Ok(matches!(self.slope, Some(ExtRational::PosInf)));
                };
                Ok(*s > Rational::from_integer(v.into()))
            }
            WitnessKind::Family => {
                for &(n, k) in &self.powers {
                    let Some(ek) = sig.power(&self.monomial, k) else { continue };
                    let coeff = crate::coeff::prime_power(sig.prime(), -i64::from(n) * k as i64);
                    let x = RingElement::monomial(sig.clone(), coeff, ek)?;
                    if membership(&x, g, 0, horizon)? != Membership::Yes {
                        return Ok(false);
                    }
                }
                for (i, (e, d)) in self.family.iter().enumerate() {
                    let again = defect(ring, e, horizon)?;
                    if again.as_ref() != Some(d) || *d < BigInt::from(i + 1) {
                        return Ok(false);
                    }
                }
                Ok(!self.powers.is_empty() || !self.family.is_empty())
            }
        }
    }
}

/// Least valuation making `lambda x^e` power-bounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinValuation {
    Finite(BigInt),
    /// Every multiple is power-bounded.
    Line,
    /// No multiple is power-bounded.
    Never,
}

/// Exact least valuation, available for closed-form rings of definition.
pub fn min_valuation(ring: &TateRingDesc, e: &ExponentVector) -> Option<MinValuation> {
    let sig = ring.signature();
    if sig.annihilating_power(e).is_some() {
        return Some(MinValuation::Line);
    }
    if !ring.gauge().adjoined().is_empty() {
        return None;
    }
    let expr = ring.gauge().base().as_expression()?.expression_for(e)?;
    let zero = alloc::vec![Rational::zero(); e.len()];
    let ev = expr.eventual(&zero, e.entries());
    Some(match ev.tail {
        None => MinValuation::Never,
        Some(p) => match p.degree() {
            0 => MinValuation::Finite(BigInt::zero()),
            1 => MinValuation::Finite(p.leading().ceil().to_integer()),
            _ if p.leading().is_negative() => MinValuation::Line,
            _ => MinValuation::Never,
        },
    })
}

/// `gauge(e) - v_min(e)` when both are exact and finite.
fn defect(ring: &TateRingDesc, e: &ExponentVector, horizon: u32) -> Result<Option<BigInt>> {
    let g = ring.gauge().evaluate(e, horizon)?;
    Ok(match (g.exact(), min_valuation(ring, e)) {
        (Some(v), Some(MinValuation::Finite(m))) => Some(v - m),
        _ => None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PowerBounded {
    /// Every power lies in `p^-n` times the ring of definition.
    Yes { n: BigInt },
    No { witness: BoundednessWitness },
    Inconclusive { term: ExponentVector },
}

impl PowerBounded {
    pub fn as_membership(&self) -> Membership {
        match self {
            PowerBounded::Yes { .. } => Membership::Yes,
            PowerBounded::No { .. } => Membership::No,
            PowerBounded::Inconclusive { .. } => Membership::Inconclusive,
        }
    }
}

enum TermBound {
    Bounded(BigInt),
    Unbounded(BoundednessWitness),
    Unknown,
}

fn upper(ring: &TateRingDesc, e: &ExponentVector, horizon: u32) -> Result<ExtInt> {
    Ok(ring.gauge().evaluate(e, horizon)?.upper())
}

/// `max(0, max_{1 <= m < k} gauge(m e) - m v)` from upper bounds, or `None` if one is infinite.
fn early_powers(ring: &TateRingDesc, e: &ExponentVector, v: i64, k: u64, horizon: u32) -> Result<Option<BigInt>> {
    let sig = ring.signature();
    let mut n = BigInt::zero();
    for m in 1..k {
        let Some(em) = sig.power(e, m) else { break };
        match upper(ring, &em, horizon)? {
            ExtInt::Finite(g) => n = n.max(g - BigInt::from(m) * v),
            ExtInt::NegInf => {}
            ExtInt::PosInf => return Ok(None),
        }
    }
    Ok(Some(n))
}

fn term_bound(ring: &TateRingDesc, e: &ExponentVector, v: i64, horizon: u32) -> Result<TermBound> {
    let sig = ring.signature();
    if matches!(ring.gauge().evaluate(e, horizon)?, GaugeVerdict::PlusInf) {
        return Err(Error::Support(format!("{} is not in the ring", sig.format_monomial(e))));
    }
    if let Some(c) = sig.annihilating_power(e) {
        return Ok(match early_powers(ring, e, v, c, horizon)? {
            Some(n) => TermBound::Bounded(n),
            None => TermBound::Unknown,
        });
    }
    if let Some(t) = exact_term_bound(ring, e, v)? {
        return Ok(t);
    }
    // generic: (lambda x^e)^k in the ring of definition bounds every power
    let kmax = 4 * u64::from(horizon) + 4;
    for k in 1..=kmax {
        let ek = e.scale_int(k as i64);
        let verdict = ring.gauge().evaluate(&ek, horizon)?;
        if matches!(verdict, GaugeVerdict::Inconclusive { .. }) {
            return Ok(TermBound::Unknown);
        }
        let hit = match verdict.upper() {
            ExtInt::Finite(g) => g <= BigInt::from(k) * v,
            ExtInt::NegInf => true,
            ExtInt::PosInf => false,
        };
        if hit {
            if let Some(n) = early_powers(ring, e, v, k, horizon)? {
                return Ok(TermBound::Bounded(n));
            }
        }
    }
    Ok(TermBound::Unknown)
}

/// Exact supremum of `gauge(m e) - m v` for closed-form gauges.
fn exact_term_bound(ring: &TateRingDesc, e: &ExponentVector, v: i64) -> Result<Option<TermBound>> {
    if !ring.gauge().adjoined().is_empty() {
        return Ok(None);
    }
    let Some(gx) = ring.gauge().base().as_expression() else { return Ok(None) };
    let Some(expr) = gx.expression_for(e) else { return Ok(None) };
    let zero = alloc::vec![Rational::zero(); e.len()];
    let ev = expr.eventual(&zero, e.entries());
    let Some(p) = ev.tail else { return Ok(None) };
    let vq = Rational::from_integer(v.into());
    let shifted = p.sub(&crate::poly::Poly::linear(Rational::zero(), vq));
    let grows = match shifted.degree() {
        0 => false,
        _ => shifted.leading().is_positive(),
    };
    if grows {
        let mut w = BoundednessWitness::bare(WitnessKind::SlopeViolation, e.clone());
        w.slope = Some(match p.degree() {
            0 => ExtRational::Finite(Rational::zero()),
            1 => ExtRational::Finite(p.leading()),
            _ => ExtRational::PosInf,
        });
        w.valuation = Some(v);
        return Ok(Some(TermBound::Unbounded(w)));
    }
    let end = ev.threshold.clone().max(shifted.derivative().sign_threshold());
    let Some(end) = end.to_u64().filter(|&m| m <= POWER_SCAN_LIMIT) else { return Ok(None) };
    let mut n = BigInt::zero();
    for m in 1..=end {
        let em = e.scale_int(m as i64);
        if let Some(g) = expr.eval(em.entries()) {
            n = n.max(g.ceil().to_integer() - BigInt::from(m) * v);
        }
    }
    Ok(Some(TermBound::Bounded(n)))
}

/// Whether every power of `x` lies in a fixed `p^-n R_0`.
pub fn power_bounded(ring: &TateRingDesc, x: &RingElement, horizon: u32) -> Result<PowerBounded> {
    if **x.signature_arc() != **ring.signature() {
        return Err(Error::Declaration("element and ring use different variables".into()));
    }
    let mut n = BigInt::zero();
    let mut unknown = None;
    for (e, c) in x.terms() {
        let v = padic_valuation(c, x.prime()).expect("nonzero coefficient");
        match term_bound(ring, e, v, horizon)? {
            TermBound::Bounded(b) => n = n.max(b),
            TermBound::Unbounded(witness) => return Ok(PowerBounded::No { witness }),
            TermBound::Unknown => {
                if unknown.is_none() {
                    unknown = Some(e.clone());
                }
            }
        }
    }
    Ok(match unknown {
        Some(term) => PowerBounded::Inconclusive { term },
        None => PowerBounded::Yes { n },
    })
}

/// `p^-1 x` power-bounded, which makes `x` topologically nilpotent.
pub fn topologically_nilpotent(ring: &TateRingDesc, x: &RingElement, horizon: u32) -> Result<Membership> {
    Ok(power_bounded(ring, &x.scale_by_prime_power(-1), horizon)?.as_membership())
}

/// Least `m <= horizon` with `x^m` in `p R_0`.
pub fn nilpotence_power(ring: &TateRingDesc, x: &RingElement, horizon: u32) -> Result<Option<u32>> {
    let mut y = x.clone();
    for m in 1..=horizon {
        if membership(&y, ring.gauge(), 1, horizon)? == Membership::Yes {
            return Ok(Some(m));
        }
        y = y.checked_mul(x)?;
    }
    Ok(None)
}

/// Certifies that `p^-n x^e` is power-bounded for every `n <= horizon`.
pub fn certify_line(ring: &TateRingDesc, e: &ExponentVector, horizon: u32) -> Result<Option<Vec<(u32, u64)>>> {
    let sig = ring.signature();
    let kmax = 4 * u64::from(horizon) + 4;
    let mut k = 1u64;
    let mut out = Vec::new();
    for n in 1..=horizon {
        loop {
            if k > kmax {
                return Ok(None);
            }
            let ok = match sig.power(e, k) {
                None => true,
                Some(ek) => {
                    let verdict = ring.gauge().evaluate(&ek, horizon)?;
                    if matches!(verdict, GaugeVerdict::Inconclusive { .. }) {
                        return Ok(None);
                    }
                    verdict.upper() <= ExtInt::Finite(-BigInt::from(n) * BigInt::from(k))
                }
            };
            if ok {
                break;
            }
            k += 1;
        }
        out.push((n, k));
    }
    Ok(Some(out))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Uniformity {
    /// Power-bounded elements of the window lie in `p^-n R_0`.
    Uniform { n: BigInt, points: usize },
    NonUniform(BoundednessWitness),
    Inconclusive { monomial: ExponentVector },
}

/// Sorts by total absolute exponent, then lexicographically.
pub fn by_weight(mut points: Vec<ExponentVector>) -> Vec<ExponentVector> {
    points.sort_by(|a, b| match weight(a).cmp(&weight(b)) {
        Ordering::Equal => a.cmp(b),
        o => o,
    });
    points
}

/// Window-relative uniformity. Each family is tested for defects growing at
/// least linearly along it, which shows that no single bound exists.
pub fn uniformity(
    ring: &TateRingDesc,
    window: &Window,
    horizon: u32,
    families: &[Vec<ExponentVector>],
) -> Result<Uniformity> {
    let sig = ring.signature().clone();
    for fam in families {
        let mut members = Vec::new();
        for (i, e) in fam.iter().enumerate() {
            match defect(ring, e, horizon)? {
                Some(d) if d >= BigInt::from(i + 1) => members.push((e.clone(), d)),
                _ => break,
            }
        }
        if !fam.is_empty() && members.len() == fam.len() {
            let mut w = BoundednessWitness::bare(WitnessKind::Family, fam[0].clone());
            w.family = members;
            return Ok(Uniformity::NonUniform(w));
        }
    }
    let points = by_weight(window.points(&sig));
    let mut sup = BigInt::zero();
    let mut undecided = None;
    for e in &points {
        let verdict = ring.gauge().evaluate(e, horizon)?;
        if matches!(verdict, GaugeVerdict::PlusInf) || verdict.is_minus_inf() {
            continue;
        }
        if let Some(c) = sig.annihilating_power(e) {
            if verdict.exact().is_some() {
                let mut w = BoundednessWitness::bare(WitnessKind::NilpotentLine, e.clone());
                w.annihilator = Some(c);
                return Ok(Uniformity::NonUniform(w));
            }
            undecided.get_or_insert_with(|| e.clone());
            continue;
        }
        match (verdict.exact(), min_valuation(ring, e)) {
            (Some(g), Some(MinValuation::Finite(m))) => sup = sup.max(g - m),
            (_, Some(MinValuation::Never)) => {}
            (g, mv) => {
                if let (Some(_), Some(powers)) = (g, certify_line(ring, e, horizon)?) {
                    let mut w = BoundednessWitness::bare(WitnessKind::Family, e.clone());
                    w.powers = powers;
                    if mv == Some(MinValuation::Line) {
                        w.slope = Some(ExtRational::NegInf);
                    }
                    return Ok(Uniformity::NonUniform(w));
                }
                undecided.get_or_insert_with(|| e.clone());
            }
        }
    }
    Ok(match undecided {
        Some(monomial) => Uniformity::Inconclusive { monomial },
        None => Uniformity::Uniform { n: sup, points: points.len() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::var;
    use crate::gauge::ExpressionGauge;
    use crate::signature::VarDecl;

    fn ex41() -> TateRingDesc {
        let sig = Arc::new(Signature::new(2, alloc::vec![VarDecl::invertible("T"), VarDecl::nilpotent("Z", 2)]).unwrap());
        TateRingDesc::new(GaugeSpec::Expression(
            ExpressionGauge::new(
                sig,
                alloc::vec![(alloc::vec![0], var(0).abs()), (alloc::vec![1], var(0).abs().negate())],
                None,
            )
            .unwrap(),
        ))
        .unwrap()
    }

    fn mono(ring: &TateRingDesc, c: i64, f: &[(&str, i64)]) -> RingElement {
        let sig = ring.signature().clone();
        RingElement::monomial(sig.clone(), Rational::from_integer(c.into()), sig.monomial(f).unwrap()).unwrap()
    }

    #[test]
    fn basic_verdicts() {
        let r = ex41();
        assert_eq!(power_bounded(&r, &mono(&r, 1, &[]), 8).unwrap(), PowerBounded::Yes { n: BigInt::zero() });
        assert!(matches!(power_bounded(&r, &mono(&r, 1, &[("Z", 1)]), 8).unwrap(), PowerBounded::Yes { .. }));
        match power_bounded(&r, &mono(&r, 1, &[("T", 1)]), 8).unwrap() {
            PowerBounded::No { witness } => {
                assert_eq!(witness.kind, WitnessKind::SlopeViolation);
                assert!(witness.recheck(&r, 8).unwrap());
            }
            v => panic!("{v:?}"),
        }
        assert_eq!(topologically_nilpotent(&r, &mono(&r, 2, &[]), 8).unwrap(), Membership::Yes);
        assert_eq!(topologically_nilpotent(&r, &mono(&r, 1, &[("Z", 1)]), 8).unwrap(), Membership::Yes);
    }

    #[test]
    fn nilpotent_line_breaks_uniformity() {
        let r = ex41();
        match uniformity(&r, &Window::new(2), 8, &[]).unwrap() {
            Uniformity::NonUniform(w) => {
                assert_eq!(w.kind, WitnessKind::NilpotentLine);
                assert_eq!(w.monomial, r.signature().monomial(&[("Z", 1)]).unwrap());
                assert!(w.recheck(&r, 8).unwrap());
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn subadditive_on_window() {
        let r = ex41();
        let rep = subadditivity(r.gauge(), &Window::new(3), 4).unwrap();
        assert!(rep.violations.is_empty());
        assert!(rep.pairs > 0);
    }
}
