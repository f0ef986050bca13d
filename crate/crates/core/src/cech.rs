//! The two-piece cover `U = {|t| <= 1}`, `V = {|t| >= 1}` and the Cech map
//! `R -> A (+) B -> C` attached to it.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::coeff::{padic_valuation, prime_power};
use crate::element::RingElement;
use crate::error::{Error, Result};
use crate::ext::ExtInt;
use crate::gauge::{
    gauge_intersection, membership, DerivedGauge, Direction, ExtRational, Gauge, GaugeVerdict, IntersectionGauge,
    Membership,
};
use crate::monomial::ExponentVector;
use crate::topology::{by_weight, power_bounded, topologically_nilpotent, PowerBounded, TateRingDesc};
use crate::window::Window;
use crate::Rational;

/// Rings of definition of `R`, `A = R<t>`, `B = R<1/t>`, `C = R<t, 1/t>` and
/// `S = A_0 cap B_0`, all on the lattice of `R`.
#[derive(Clone, Debug)]
pub struct LocalizationTriple {
    ring: TateRingDesc,
    t: ExponentVector,
    a: DerivedGauge,
    b: DerivedGauge,
    c: DerivedGauge,
    s: IntersectionGauge,
    reference: Option<TateRingDesc>,
}

impl LocalizationTriple {
    pub fn ring(&self) -> &TateRingDesc {
        &self.ring
    }

    pub fn t(&self) -> &ExponentVector {
        &self.t
    }

    pub fn base(&self) -> &DerivedGauge {
        self.ring.gauge()
    }

    pub fn gauge_a(&self) -> &DerivedGauge {
        &self.a
    }

    pub fn gauge_b(&self) -> &DerivedGauge {
        &self.b
    }

    pub fn gauge_c(&self) -> &DerivedGauge {
        &self.c
    }

    pub fn gauge_s(&self) -> &IntersectionGauge {
        &self.s
    }

    /// Uses `smaller`, whose ring of definition is contained in this one's,
    /// for power-boundedness certificates. A bound there is a bound here.
    pub fn with_reference(mut self, smaller: TateRingDesc) -> Result<Self> {
        if smaller.signature() != self.ring.signature() {
            return Err(Error::Declaration("reference ring uses different variables".into()));
        }
        self.reference = Some(smaller);
        Ok(self)
    }

    fn reference(&self) -> &TateRingDesc {
        self.reference.as_ref().unwrap_or(&self.ring)
    }
}

pub fn build_triple(ring: &TateRingDesc, t: &ExponentVector) -> Result<LocalizationTriple> {
    let sig = ring.signature();
    sig.check(t).map_err(|e| Error::Localization(format!("{e}")))?;
    if let Some(i) = (0..sig.len()).find(|&i| !t.get(i).is_zero() && !sig.vars()[i].invertible) {
        return Err(Error::Localization(format!("t must be a unit monomial; {} is not invertible", sig.vars()[i].name)));
    }
    let g = ring.gauge();
    let a = g.adjoin(alloc::vec![(t.clone(), Direction::Nonneg)])?;
    let b = g.adjoin(alloc::vec![(t.clone(), Direction::Nonpos)])?;
    let c = g.adjoin(alloc::vec![(t.clone(), Direction::Both)])?;
    let s = gauge_intersection(&a, &b)?;
    let triple = LocalizationTriple { ring: ring.clone(), t: t.clone(), a, b, c, s, reference: None };
    dominance_spot_check(&triple)?;
    Ok(triple)
}

fn dominance_spot_check(tr: &LocalizationTriple) -> Result<()> {
    let sig = tr.ring.signature().clone();
    let pairs: [(&dyn Gauge, &dyn Gauge, &str); 6] = [
        (&tr.c, &tr.a, "C <= A"),
        (&tr.c, &tr.b, "C <= B"),
        (&tr.a, &tr.s, "A <= S"),
        (&tr.b, &tr.s, "B <= S"),
        (&tr.a, tr.ring.gauge(), "A <= R"),
        (&tr.s, tr.ring.gauge(), "S <= R"),
    ];
    for e in Window::new(1).with_degree(1).points(&sig) {
        for (lo, hi, name) in pairs.iter() {
            if lo.evaluate(&e, 1)?.lower() > hi.evaluate(&e, 1)?.upper() {
                return Err(Error::Definition(format!("{name} fails at {}", sig.format_monomial(&e))));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrictnessWitness {
    /// `S_0` contains the whole line through this monomial while `R_0` does not.
    Monomial(ExponentVector),
    /// The k-th member has `gauge_R - gauge_S >= k`.
    Family(Vec<(ExponentVector, BigInt)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strictness {
    Holds { n: BigInt, points: usize },
    Fails { witness: StrictnessWitness },
    Inconclusive { monomial: ExponentVector },
}

fn strict_defect(tr: &LocalizationTriple, e: &ExponentVector, horizon: u32) -> Result<Option<BigInt>> {
    let r = tr.base().evaluate(e, horizon)?;
    let s = tr.s.evaluate(e, horizon)?;
    Ok(match (r.exact(), s.exact()) {
        (Some(x), Some(y)) => Some(x - y),
        _ => None,
    })
}

/// Window-relative test of `p^n S_0 subset R_0`.
pub fn strictness_check(
    tr: &LocalizationTriple,
    window: &Window,
    horizon: u32,
    families: &[Vec<ExponentVector>],
) -> Result<Strictness> {
    let sig = tr.ring.signature().clone();
    let points = by_weight(window.points(&sig));
    let mut sup = BigInt::zero();
    let mut undecided = None;
    for e in &points {
        let r = tr.base().evaluate(e, horizon)?;
        let s = tr.s.evaluate(e, horizon)?;
        match (&r, &s) {
            (GaugeVerdict::PlusInf, _) => {}
            (GaugeVerdict::Exact(x), GaugeVerdict::Exact(y)) => sup = sup.max(x - y),
            (GaugeVerdict::Exact(_), GaugeVerdict::MinusInfCertified { .. }) => {
                return Ok(Strictness::Fails { witness: StrictnessWitness::Monomial(e.clone()) });
            }
            _ => {
                undecided.get_or_insert_with(|| e.clone());
            }
        }
    }
    for fam in families {
        let mut members = Vec::new();
        for (i, e) in fam.iter().enumerate() {
            match strict_defect(tr, e, horizon)? {
                Some(d) if d >= BigInt::from(i + 1) => members.push((e.clone(), d)),
                _ => break,
            }
        }
        if !fam.is_empty() && members.len() == fam.len() {
            return Ok(Strictness::Fails { witness: StrictnessWitness::Family(members) });
        }
    }
    Ok(match undecided {
        Some(monomial) => Strictness::Inconclusive { monomial },
        None => Strictness::Holds { n: sup, points: points.len() },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocallyZero {
    pub monomial: ExponentVector,
    pub nilpotent: bool,
    /// No power up to the horizon vanishes.
    pub non_nilpotent_to_horizon: bool,
    pub topologically_nilpotent: Membership,
}

/// Monomials nonzero in `R` whose images in `A` and `B` are divisible by
/// `p^horizon` more than the monomial itself.
pub fn locally_zero_sections(tr: &LocalizationTriple, window: &Window, horizon: u32) -> Result<Vec<LocallyZero>> {
    let sig = tr.ring.signature().clone();
    let mut out = Vec::new();
    for e in by_weight(window.points(&sig)) {
        let base = tr.base().evaluate(&e, horizon)?;
        let Some(g) = base.exact() else { continue };
        let deep = ExtInt::Finite(g - BigInt::from(horizon));
        let vanishes = |v: GaugeVerdict| v.is_minus_inf() || v.upper() <= deep;
        if !vanishes(tr.a.evaluate(&e, horizon)?) || !vanishes(tr.b.evaluate(&e, horizon)?) {
            continue;
        }
        let nilpotent = sig.annihilating_power(&e).is_some();
        let non_nilpotent_to_horizon = (1..=u64::from(horizon)).all(|m| sig.power(&e, m).is_some());
        let x = RingElement::monomial(sig.clone(), Rational::one(), e.clone())?;
        let topologically_nilpotent = topologically_nilpotent(tr.reference(), &x, horizon)?;
        out.push(LocallyZero { monomial: e, nilpotent, non_nilpotent_to_horizon, topologically_nilpotent });
    }
    Ok(out)
}

pub fn epsilon(x: &RingElement) -> (RingElement, RingElement) {
    (x.clone(), x.clone())
}

pub fn delta(a: &RingElement, b: &RingElement) -> Result<RingElement> {
    b.checked_sub(a)
}

/// The splitting `c -> (0, c)` of `delta`.
pub fn split(c: &RingElement) -> (RingElement, RingElement) {
    (RingElement::zero(c.signature_arc().clone()), c.clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CechReport {
    pub precision: i64,
    pub composite_zero: bool,
    pub split_identity: bool,
    /// Membership of `x` in `p^N R_0`: `No` means `x` survives in the completion at precision `N`.
    pub in_ring: Membership,
    pub in_a: Membership,
    pub in_b: Membership,
}

impl CechReport {
    /// `x` is nonzero in the completion of `R` yet zero in those of `A` and `B`.
    pub fn injectivity_failure(&self) -> bool {
        self.in_ring == Membership::No && self.in_a == Membership::Yes && self.in_b == Membership::Yes
    }
}

pub fn cech_sequence_check(tr: &LocalizationTriple, x: &RingElement, precision: i64, horizon: u32) -> Result<CechReport> {
    if **x.signature_arc() != **tr.ring.signature() {
        return Err(Error::Declaration("element and ring use different variables".into()));
    }
    let (a, b) = epsilon(x);
    let composite_zero = delta(&a, &b)?.is_zero();
    let (a0, c1) = split(x);
    let split_identity = delta(&a0, &c1)? == *x;
    Ok(CechReport {
        precision,
        composite_zero,
        split_identity,
        in_ring: membership(x, tr.base(), precision, horizon)?,
        in_a: membership(x, &tr.a, precision, horizon)?,
        in_b: membership(x, &tr.b, precision, horizon)?,
    })
}

/// An element of a completion known modulo `p^precision` times a ring of definition.
#[derive(Clone, Debug)]
pub struct TruncatedElement {
    representative: RingElement,
    precision: i64,
    gauge: DerivedGauge,
}

impl TruncatedElement {
    /// Drops the terms already lying in `p^precision R_0`.
    pub fn new(x: &RingElement, precision: i64, gauge: &DerivedGauge, horizon: u32) -> Result<Self> {
        let sig = x.signature_arc().clone();
        let mut kept = Vec::new();
        for (e, c) in x.terms() {
            let one = RingElement::monomial(sig.clone(), c.clone(), e.clone())?;
            if membership(&one, gauge, precision, horizon)? != Membership::Yes {
                kept.push((e.clone(), c.clone()));
            }
        }
        Ok(TruncatedElement {
            representative: RingElement::from_terms(sig, kept)?,
            precision,
            gauge: gauge.clone(),
        })
    }

    pub fn representative(&self) -> &RingElement {
        &self.representative
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// Equality modulo `p^N R_0` at the common precision.
    pub fn equals(&self, other: &TruncatedElement, horizon: u32) -> Result<Membership> {
        let n = self.precision.min(other.precision);
        membership(&self.representative.checked_sub(&other.representative)?, &self.gauge, n, horizon)
    }

    pub fn is_zero(&self, horizon: u32) -> Result<Membership> {
        membership(&self.representative, &self.gauge, self.precision, horizon)
    }
}

/// A series `sum_i c_i x^{e_i}` whose i-th term (from 1) lies in
/// `p^(i + offset)` times the ring of definition it is taken in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSpec {
    pub terms: Vec<(Rational, ExponentVector)>,
    pub offset: i64,
}

impl SeriesSpec {
    fn check(&self, g: &DerivedGauge, horizon: u32) -> Result<()> {
        let sig = g.signature().clone();
        for (i, (c, e)) in self.terms.iter().enumerate() {
            let x = RingElement::monomial(sig.clone(), c.clone(), e.clone())?;
            let need = i as i64 + 1 + self.offset;
            if membership(&x, g, need, horizon)? != Membership::Yes {
                return Err(Error::Definition(format!(
                    "term {} ({}) is not in p^{need} times the ring of definition",
                    i + 1,
                    sig.format_monomial(e)
                )));
            }
        }
        Ok(())
    }

    /// The partial sum determining the series modulo `p^precision`.
    pub fn truncate(&self, g: &DerivedGauge, precision: i64) -> Result<RingElement> {
        let sig = g.signature().clone();
        let kept = self
            .terms
            .iter()
            .enumerate()
            .filter(|(i, _)| (*i as i64) + 1 + self.offset < precision)
            .map(|(_, (c, e))| (e.clone(), c.clone()));
        RingElement::from_terms(sig, kept)
    }

    pub fn coefficient(&self, e: &ExponentVector) -> Rational {
        self.terms.iter().filter(|(_, f)| f == e).fold(Rational::zero(), |acc, (c, _)| acc + c)
    }
}

/// `rho_n` reads off the coefficient of the n-th monomial of the family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatingFunctional {
    pub family: Vec<ExponentVector>,
}

impl SeparatingFunctional {
    pub fn apply(&self, n: usize, x: &RingElement) -> Rational {
        x.coefficient(&self.family[n - 1]).value
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separation {
    pub index: usize,
    pub monomial: ExponentVector,
    /// Valuation of the coefficient demanded by the local sections.
    pub target: Option<i64>,
    /// `rho_n(p^M R_0)` has valuation at least this.
    pub bound: ExtInt,
    pub separated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueingCertificate {
    pub precision: i64,
    pub agree: Membership,
    pub separations: Vec<Separation>,
}

impl GlueingCertificate {
    /// The sections agree on the overlap, yet every functional separates them from `R`.
    pub fn obstructed(&self) -> bool {
        self.agree == Membership::Yes && !self.separations.is_empty() && self.separations.iter().all(|s| s.separated)
    }
}

pub fn glueing_obstruction(
    tr: &LocalizationTriple,
    a_spec: &SeriesSpec,
    b_spec: &SeriesSpec,
    functional: &SeparatingFunctional,
    precision: i64,
    horizon: u32,
) -> Result<GlueingCertificate> {
    a_spec.check(&tr.a, horizon)?;
    b_spec.check(&tr.b, horizon)?;
    let diff = a_spec.truncate(&tr.a, precision)?.checked_sub(&b_spec.truncate(&tr.b, precision)?)?;
    let agree = membership(&diff, &tr.c, precision, horizon)?;
    let p = tr.ring.signature().prime();
    let mut separations = Vec::new();
    for (i, e) in functional.family.iter().enumerate() {
        let target = padic_valuation(&a_spec.coefficient(e), p);
        let bound = match tr.base().evaluate(e, horizon)? {
            GaugeVerdict::Exact(g) => ExtInt::Finite(g + BigInt::from(precision)),
            GaugeVerdict::PlusInf => ExtInt::PosInf,
            _ => ExtInt::NegInf,
        };
        let separated = match target {
            Some(v) => ExtInt::int(v) < bound,
            None => false,
        };
        separations.push(Separation { index: i + 1, monomial: e.clone(), target, bound, separated });
    }
    Ok(GlueingCertificate { precision, agree, separations })
}

/// `t_i^{d_i} r = sum_j c_j prod_k t_k^{m_jk}`, homogeneous of degree `d_i` in the `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub degree: u32,
    pub terms: Vec<(RingElement, Vec<u32>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlainCertificate {
    pub t_list: Vec<RingElement>,
    pub a_list: Vec<RingElement>,
    pub degrees: Vec<u32>,
    /// Least `A` with every `p^A t_i` in `R_0`.
    pub a_bound: BigInt,
    /// Least `B` with every `p^B a_i` in `R_0`.
    pub b_bound: BigInt,
    pub total_degree: u32,
    pub exponent: BigInt,
    /// `p^exponent r^m` membership for `m = 1, 2, ...`.
    pub verified: Vec<(u32, Membership)>,
}

impl AlainCertificate {
    pub fn is_valid(&self) -> bool {
        self.verified.iter().all(|(_, m)| *m == Membership::Yes)
    }
}

fn check_partition(t_list: &[RingElement], a_list: &[RingElement]) -> Result<()> {
    if t_list.is_empty() || t_list.len() != a_list.len() {
        return Err(Error::Relation("need equally many t_i and a_i, at least one".into()));
    }
    let sig = t_list[0].signature_arc().clone();
    let mut sum = RingElement::zero(sig.clone());
    for (t, a) in t_list.iter().zip(a_list) {
        sum = sum.checked_add(&a.checked_mul(t)?)?;
    }
    if sum != RingElement::one(sig) {
        return Err(Error::Relation(format!("sum of a_i t_i is {sum}, not 1")));
    }
    Ok(())
}

/// Least `A` with `p^A x` in the ring of definition; `None` for `x = 0`.
pub fn min_scaling(x: &RingElement, g: &DerivedGauge, horizon: u32) -> Result<Option<BigInt>> {
    let sig = x.signature_arc().clone();
    let mut best: Option<BigInt> = None;
    for (e, c) in x.terms() {
        let v = padic_valuation(c, x.prime()).expect("nonzero coefficient");
        let need = match g.evaluate(e, horizon)?.upper() {
            ExtInt::Finite(d) => d - BigInt::from(v),
            ExtInt::NegInf => continue,
            ExtInt::PosInf => {
                return Err(Error::Support(format!("{} is not in the ring", sig.format_monomial(e))));
            }
        };
        best = Some(best.map_or(need.clone(), |b| b.max(need)));
    }
    Ok(best)
}

pub fn alain_bound(
    ring: &TateRingDesc,
    t_list: &[RingElement],
    a_list: &[RingElement],
    r: &RingElement,
    relations: &[Relation],
    verify_to: u32,
    horizon: u32,
) -> Result<AlainCertificate> {
    check_partition(t_list, a_list)?;
    if relations.len() != t_list.len() {
        return Err(Error::Relation(format!("{} relations for {} elements t_i", relations.len(), t_list.len())));
    }
    let g = ring.gauge();
    for (i, rel) in relations.iter().enumerate() {
        let lhs = t_list[i].pow(rel.degree).checked_mul(r)?;
        let mut rhs = RingElement::zero(r.signature_arc().clone());
        for (c, m) in &rel.terms {
            if m.len() != t_list.len() || m.iter().sum::<u32>() != rel.degree {
                return Err(Error::Relation(format!("relation {} is not homogeneous of degree {}", i + 1, rel.degree)));
            }
            if membership(c, g, 0, horizon)? != Membership::Yes {
                return Err(Error::Relation(format!("coefficient {c} of relation {} is not integral", i + 1)));
            }
            let mut term = c.clone();
            for (t, &k) in t_list.iter().zip(m) {
                term = term.checked_mul(&t.pow(k))?;
            }
            rhs = rhs.checked_add(&term)?;
        }
        if lhs != rhs {
            return Err(Error::Relation(format!("relation {} fails: {lhs} != {rhs}", i + 1)));
        }
    }
    let max_scaling = |xs: &[RingElement]| -> Result<BigInt> {
        let mut best: Option<BigInt> = None;
        for x in xs {
            if let Some(s) = min_scaling(x, g, horizon)? {
                best = Some(best.map_or(s.clone(), |b: BigInt| b.max(s)));
            }
        }
        Ok(best.unwrap_or_else(BigInt::zero))
    };
    let a_bound = max_scaling(t_list)?;
    let b_bound = max_scaling(a_list)?;
    let total_degree: u32 = relations.iter().map(|r| r.degree).sum();
    let exponent = BigInt::from(total_degree) * (&a_bound + &b_bound);
    let scale = prime_power(ring.signature().prime(), i64::try_from(&exponent).map_err(|_| {
        Error::Parameter("certificate exponent out of range".into())
    })?);
    let mut verified = Vec::new();
    let mut power = RingElement::one(r.signature_arc().clone());
    for m in 1..=verify_to {
        power = power.checked_mul(r)?;
        verified.push((m, membership(&power.scale(&scale), g, 0, horizon)?));
    }
    Ok(AlainCertificate {
        t_list: t_list.to_vec(),
        a_list: a_list.to_vec(),
        degrees: relations.iter().map(|r| r.degree).collect(),
        a_bound,
        b_bound,
        total_degree,
        exponent,
        verified,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LaurentConstant {
    /// Least `B` with every `p^B a_i` power-bounded, and the exponent `-(B + 1)` of `c`.
    Found { b: u32, c_exponent: i64 },
    Inconclusive,
}

pub fn laurent_constant(ring: &TateRingDesc, t_list: &[RingElement], a_list: &[RingElement], horizon: u32) -> Result<LaurentConstant> {
    check_partition(t_list, a_list)?;
    'search: for b in 0..=horizon {
        for a in a_list {
            match power_bounded(ring, &a.scale_by_prime_power(i64::from(b)), horizon)? {
                PowerBounded::Yes { .. } => {}
                _ => continue 'search,
            }
        }
        return Ok(LaurentConstant::Found { b, c_exponent: -(i64::from(b) + 1) });
    }
    Ok(LaurentConstant::Inconclusive)
}

/// A monomial valuation `lambda x^e -> unit * v(lambda) + sum_i e_i w_i`, with
/// nilpotent variables sent to `+inf`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationSample {
    weights: Vec<Rational>,
    unit: Rational,
    prime: u32,
    nilpotent: Vec<bool>,
}

impl ValuationSample {
    /// Rejects samples with `unit <= 0` and samples negative on some `p^gauge(e) x^e`.
    pub fn new(ring: &TateRingDesc, weights: Vec<Rational>, unit: Rational, horizon: u32) -> Result<Self> {
        let sig = ring.signature().clone();
        if !unit.is_positive() {
            return Err(Error::Sample(format!("value of p must be positive, got {unit}")));
        }
        if weights.len() != sig.len() {
            return Err(Error::Sample(format!("{} weights for {} variables", weights.len(), sig.len())));
        }
        let sample = ValuationSample {
            weights,
            unit,
            prime: sig.prime(),
            nilpotent: sig.vars().iter().map(|v| v.nilpotency_cap.is_some()).collect(),
        };
        for e in Window::new(1).points(&sig) {
            if let GaugeVerdict::Exact(d) = ring.gauge().evaluate(&e, horizon)? {
                let v = sample.monomial_value(&e, &Rational::from_integer(d));
                if v < ExtRational::Finite(Rational::zero()) {
                    return Err(Error::Sample(format!(
                        "negative on the integral element p^{} {}",
                        v_display(&v),
                        sig.format_monomial(&e)
                    )));
                }
            }
        }
        Ok(sample)
    }

    fn monomial_value(&self, e: &ExponentVector, v: &Rational) -> ExtRational {
        if e.entries().iter().zip(&self.nilpotent).any(|(x, &n)| n && x.is_positive()) {
            return ExtRational::PosInf;
        }
        let s = e.entries().iter().zip(&self.weights).fold(&self.unit * v, |acc, (x, w)| acc + x * w);
        ExtRational::Finite(s)
    }

    pub fn value(&self, x: &RingElement) -> ExtRational {
        x.terms()
            .map(|(e, c)| {
                let v = padic_valuation(c, self.prime).expect("nonzero coefficient");
                self.monomial_value(e, &Rational::from_integer(v.into()))
            })
            .min()
            .unwrap_or(ExtRational::PosInf)
    }
}

fn v_display(v: &ExtRational) -> alloc::string::String {
    format!("{v}")
}

pub fn valuation_sample(
    ring: &TateRingDesc,
    weights: Vec<Rational>,
    unit: Rational,
    x: &RingElement,
    horizon: u32,
) -> Result<ExtRational> {
    Ok(ValuationSample::new(ring, weights, unit, horizon)?.value(x))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverPiece {
    /// `|t| <= 1`.
    U(RingElement),
    /// `|t| >= 1`.
    V(RingElement),
    /// `|t_i| <= 1` where the flag is set, `|t_i| >= 1` elsewhere.
    Laurent(Vec<(RingElement, bool)>),
}

pub fn cover_membership(sample: &ValuationSample, piece: &CoverPiece) -> bool {
    let zero = ExtRational::Finite(Rational::zero());
    match piece {
        CoverPiece::U(t) => sample.value(t) >= zero,
        CoverPiece::V(t) => sample.value(t) <= zero,
        CoverPiece::Laurent(parts) => parts
            .iter()
            .all(|(t, small)| if *small { sample.value(t) >= zero } else { sample.value(t) <= zero }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::var;
    use crate::gauge::{ExpressionGauge, GaugeSpec};
    use crate::signature::{Signature, VarDecl};
    use alloc::sync::Arc;

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

    fn flat() -> TateRingDesc {
        let sig = Arc::new(Signature::new(2, alloc::vec![VarDecl::invertible("T")]).unwrap());
        TateRingDesc::new(GaugeSpec::Expression(ExpressionGauge::formula(sig, crate::expr::int(0)).unwrap())).unwrap()
    }

    #[test]
    fn z_is_locally_zero() {
        let r = ex41();
        let t = r.signature().monomial(&[("T", 1)]).unwrap();
        let tr = build_triple(&r, &t).unwrap();
        let lz = locally_zero_sections(&tr, &Window::new(2), 12).unwrap();
        assert_eq!(lz.len(), 5);
        assert_eq!(lz[0].monomial, r.signature().monomial(&[("Z", 1)]).unwrap());
        assert!(lz[0].nilpotent);
        match strictness_check(&tr, &Window::new(2), 12, &[]).unwrap() {
            Strictness::Fails { witness: StrictnessWitness::Monomial(e) } => assert_eq!(e, lz[0].monomial),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn flat_ring_is_strict() {
        let r = flat();
        let t = r.signature().monomial(&[("T", 1)]).unwrap();
        let tr = build_triple(&r, &t).unwrap();
        assert_eq!(
            strictness_check(&tr, &Window::new(3), 12, &[]).unwrap(),
            Strictness::Holds { n: BigInt::zero(), points: 7 }
        );
        assert!(locally_zero_sections(&tr, &Window::new(3), 12).unwrap().is_empty());
        assert!(build_triple(&r, &ExponentVector::from_ints(&[0])).is_ok());
    }

    #[test]
    fn samples_cover() {
        let r = ex41();
        let sig = r.signature().clone();
        let t = RingElement::monomial(sig.clone(), Rational::one(), sig.monomial(&[("T", 1)]).unwrap()).unwrap();
        let half = Rational::new(1.into(), 2.into());
        let s = ValuationSample::new(&r, alloc::vec![half, Rational::zero()], Rational::one(), 4).unwrap();
        assert!(cover_membership(&s, &CoverPiece::U(t.clone())));
        assert!(!cover_membership(&s, &CoverPiece::V(t.clone())));
        assert!(ValuationSample::new(&r, alloc::vec![Rational::zero(); 2], Rational::zero(), 4).is_err());
        assert!(ValuationSample::new(&r, alloc::vec![Rational::from_integer(3.into()), Rational::zero()], Rational::one(), 4)
            .is_err());
    }
}
