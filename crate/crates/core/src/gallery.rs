//! The counterexample rings, the positive fixtures, and the checklists run on them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cech::{
    alain_bound, build_triple, cech_sequence_check, cover_membership, glueing_obstruction, laurent_constant,
    locally_zero_sections, strictness_check, CoverPiece, LaurentConstant, LocalizationTriple, Relation,
    SeparatingFunctional, SeriesSpec, Strictness, StrictnessWitness, TruncatedElement, ValuationSample,
};
use crate::coeff::prime_power;
use crate::element::RingElement;
use crate::error::{Error, Result};
use crate::expr::{atom, int, var, CmpOp, Expr, Guard};
use crate::ext::ExtInt;
use crate::gauge::{
    generator_gauge_oracle, membership, DerivedGauge, Direction, ExpressionGauge, Gauge, GaugeSpec, GaugeVerdict,
    Generator, GeneratorGauge, Membership,
};
use crate::monomial::ExponentVector;
use crate::signature::{Signature, VarDecl};
use crate::topology::{subadditivity, uniformity, TateRingDesc, Uniformity};
use crate::window::Window;
use crate::Rational;

/// Number of variables `Z_1, Z_2, ...` kept in the glueing example.
pub const GLUEING_VARIABLES: usize = 8;

/// Line certificates on generator rings search powers up to `4 * horizon + 4`,
/// one dynamic program each; the coherence check caps that search here.
pub const GENERATOR_UNIFORMITY_HORIZON: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExampleId {
    Ex41,
    Ex42,
    Ex43,
    Ex44,
    Ex45,
    Ex46,
    FlatLaurent,
}

impl ExampleId {
    pub const ALL: [ExampleId; 7] = [
        ExampleId::Ex41,
        ExampleId::Ex42,
        ExampleId::Ex43,
        ExampleId::Ex44,
        ExampleId::Ex45,
        ExampleId::Ex46,
        ExampleId::FlatLaurent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExampleId::Ex41 => "ex41",
            ExampleId::Ex42 => "ex42",
            ExampleId::Ex43 => "ex43",
            ExampleId::Ex44 => "ex44",
            ExampleId::Ex45 => "ex45",
            ExampleId::Ex46 => "ex46",
            ExampleId::FlatLaurent => "flat_laurent",
        }
    }

    pub fn from_name(s: &str) -> Option<ExampleId> {
        ExampleId::ALL.into_iter().find(|id| id.name() == s)
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyParams {
    pub prime: u32,
    /// Number of terms of the sequences `a`, `b` used for `ex43`.
    pub depth: u32,
    pub horizon: u32,
    pub precision: u32,
    pub seed: u64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams { prime: 2, depth: 3, horizon: 24, precision: 12, seed: 0 }
    }
}

impl VerifyParams {
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 || self.depth > 64 {
            return Err(Error::Parameter(format!("depth must be in 1..=64, got {}", self.depth)));
        }
        if self.horizon == 0 || self.horizon > 512 {
            return Err(Error::Parameter(format!("horizon must be in 1..=512, got {}", self.horizon)));
        }
        if self.precision == 0 || self.precision > 512 {
            return Err(Error::Parameter(format!("precision must be in 1..=512, got {}", self.precision)));
        }
        if self.prime > 1000 {
            return Err(Error::Parameter(format!("prime {} is too large for the gallery windows", self.prime)));
        }
        Signature::new(self.prime, Vec::new())?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequencePair {
    pub a: Vec<BigInt>,
    pub b: Vec<BigInt>,
}

impl SequencePair {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Re-checks `a(1) = 1` and the two growth inequalities.
    pub fn satisfies_bounds(&self) -> bool {
        if self.a.len() != self.b.len() || self.a.first() != Some(&BigInt::one()) {
            return false;
        }
        for j in 1..=self.a.len() {
            let jj = BigInt::from(j);
            let sq = &jj * &jj;
            if j >= 2 {
                let m = self.b[..j - 1].iter().chain(&self.a[..j - 1]).max().cloned().unwrap_or_default();
                if self.a[j - 1] <= &sq + &jj * m {
                    return false;
                }
            }
            let m = self.b[..j - 1].iter().chain(&self.a[..j]).max().cloned().unwrap_or_default();
            if self.b[j - 1] <= &sq + &jj * m {
                return false;
            }
        }
        true
    }
}

/// Smallest values satisfying each inequality, chosen in the order `a(1), b(1), a(2), ...`.
pub fn build_sequences(k: usize) -> SequencePair {
    let mut a: Vec<BigInt> = Vec::with_capacity(k);
    let mut b: Vec<BigInt> = Vec::with_capacity(k);
    for j in 1..=k {
        let jj = BigInt::from(j);
        let sq = &jj * &jj;
        if j == 1 {
            a.push(BigInt::one());
        } else {
            let m = b.iter().chain(&a).max().cloned().unwrap_or_default();
            a.push(&sq + &jj * m + 1);
        }
        let m = b.iter().chain(&a).max().cloned().unwrap_or_default();
        b.push(&sq + &jj * m + 1);
    }
    SequencePair { a, b }
}

fn shared(sig: Signature) -> Arc<Signature> {
    Arc::new(sig)
}

fn expression_ring(sig: Arc<Signature>, strata: Vec<(Vec<u32>, Expr)>, default: Option<Expr>) -> Result<TateRingDesc> {
    TateRingDesc::new(GaugeSpec::Expression(ExpressionGauge::new(sig, strata, default)?))
}

fn line_ring(prime: u32, divisible: bool) -> Result<TateRingDesc> {
    let t = if divisible { VarDecl::invertible("T").p_divisible() } else { VarDecl::invertible("T") };
    let sig = shared(Signature::new(prime, vec![t, VarDecl::nilpotent("Z", 2)])?);
    expression_ring(sig, vec![(vec![0], var(0).abs()), (vec![1], var(0).abs().negate())], None)
}

pub fn ex41_ring(prime: u32) -> Result<TateRingDesc> {
    line_ring(prime, false)
}

pub fn ex42_ring(prime: u32) -> Result<TateRingDesc> {
    line_ring(prime, true)
}

/// Generated by `pT`, `pT^-1` and, for `n <= level`, `p^-n T^a(n) Z` and `p^-n T^-b(n) Z`.
pub fn ex43_ring(prime: u32, seq: &SequencePair, level: usize) -> Result<TateRingDesc> {
    if level == 0 || level > seq.len() {
        return Err(Error::Parameter(format!("level {level} outside 1..={}", seq.len())));
    }
    let sig = shared(Signature::new(prime, vec![VarDecl::invertible("T"), VarDecl::plain("Z")])?);
    let point = |t: &BigInt, z: i64| ExponentVector::new(vec![Rational::from_integer(t.clone()), Rational::from_integer(z.into())]);
    let mut gens = vec![
        Generator::new(point(&BigInt::one(), 0), 1),
        Generator::new(point(&-BigInt::one(), 0), 1),
    ];
    for n in 1..=level {
        gens.push(Generator::new(point(&seq.a[n - 1], 1), -(n as i64)));
    }
    for n in 1..=level {
        gens.push(Generator::new(point(&-seq.b[n - 1].clone(), 1), -(n as i64)));
    }
    TateRingDesc::new(GaugeSpec::Generators(GeneratorGauge::new(sig, gens)?))
}

/// Exhaustive minimum for the ring above: `|residual|` steps of `pT^{+-1}` after
/// every multiset of the `Z`-carrying generators.
pub fn ex43_oracle(seq: &SequencePair, level: usize, t_exp: &BigInt, z_exp: u32) -> BigInt {
    let mut steps: Vec<(BigInt, i64)> = Vec::new();
    for n in 1..=level {
        steps.push((seq.a[n - 1].clone(), -(n as i64)));
        steps.push((-seq.b[n - 1].clone(), -(n as i64)));
    }
    fn walk(steps: &[(BigInt, i64)], from: usize, left: u32, t: &BigInt, cost: i64, target: &BigInt, best: &mut Option<BigInt>) {
        if left == 0 {
            let total = BigInt::from(cost) + (target - t).abs();
            if best.as_ref().is_none_or(|b| total < *b) {
                *best = Some(total);
            }
            return;
        }
        for i in from..steps.len() {
            walk(steps, i, left - 1, &(t + &steps[i].0), cost + steps[i].1, target, best);
        }
    }
    let mut best = None;
    walk(&steps, 0, z_exp, &BigInt::zero(), 0, t_exp, &mut best);
    best.expect("at least the empty product")
}

/// `T` and `Z_1..Z_count`, with the three degree rules on the total `Z`-degree.
pub fn ex44_ring(prime: u32, count: usize) -> Result<TateRingDesc> {
    if count == 0 {
        return Err(Error::Parameter("need at least one variable Z_i".into()));
    }
    let mut vars = vec![VarDecl::invertible("T")];
    vars.extend((1..=count).map(|i| VarDecl::plain(&format!("Z{i}"))));
    let sig = shared(Signature::new(prime, vars)?);
    let degree = (2..=count).fold(var(1), |acc, i| acc.add(var(i)));
    let weight = (2..=count).fold(var(1), |acc, i| acc.add(int(i as i64).mul(var(i))));
    let a = || var(0).abs();
    let expr = Expr::case(
        vec![
            (Guard(vec![atom(degree.clone(), CmpOp::Eq, int(0))]), a()),
            (
                Guard(vec![atom(degree, CmpOp::Eq, int(1))]),
                a().sub(int(2).mul(Expr::Min(vec![weight.clone(), a()]))),
            ),
        ],
        a().sub(int(2).mul(weight)),
    );
    expression_ring(sig, Vec::new(), Some(expr))
}

/// Free on `(pT)^a (pZ)^b` with `b >= 0`, `a >= -b^2`.
pub fn ex45_ring(prime: u32) -> Result<TateRingDesc> {
    let sig = shared(Signature::new(prime, vec![VarDecl::invertible("T"), VarDecl::plain("Z")])?);
    let support = Guard(vec![atom(var(0).add(var(1).mul(var(1))), CmpOp::Ge, int(0))]);
    expression_ring(sig, Vec::new(), Some(Expr::case(vec![(support, var(0).add(var(1)))], Expr::Inf)))
}

/// `P, Q, T` invertible and `Z`; value `max(p+q+a, p+q-a, p+a, q-a)` with the
/// sign conditions in `Z`-degrees 0 and 1.
pub fn ex46_ring(prime: u32) -> Result<TateRingDesc> {
    let sig = shared(Signature::new(
        prime,
        vec![VarDecl::invertible("P"), VarDecl::invertible("Q"), VarDecl::invertible("T"), VarDecl::plain("Z")],
    )?);
    let (p, q, a, e) = (|| var(0), || var(1), || var(2), || var(3));
    let d = Expr::Max(vec![p().add(q()).add(a()), p().add(q()).sub(a()), p().add(a()), q().sub(a())]);
    let ge0 = |x: Expr| atom(x, CmpOp::Ge, int(0));
    let deg = |k: i64| atom(e(), CmpOp::Eq, int(k));
    let expr = Expr::case(
        vec![
            (Guard(vec![deg(0), ge0(p()), ge0(q())]), d.clone()),
            (Guard(vec![deg(0)]), Expr::Inf),
            (Guard(vec![deg(1), ge0(p())]), d.clone()),
            (Guard(vec![deg(1), ge0(q())]), d.clone()),
            (Guard(vec![deg(1)]), Expr::Inf),
        ],
        d,
    );
    expression_ring(sig, Vec::new(), Some(expr))
}

/// `O_k[T, T^-1]`.
pub fn flat_laurent_ring(prime: u32) -> Result<TateRingDesc> {
    let sig = shared(Signature::new(prime, vec![VarDecl::invertible("T")])?);
    expression_ring(sig, Vec::new(), Some(int(0)))
}

#[derive(Clone, Debug)]
pub struct Example {
    pub id: ExampleId,
    pub ring: TateRingDesc,
    /// The element localized at.
    pub t: ExponentVector,
    /// Adjoined before localizing, cutting out a subspace.
    pub subspace: Vec<(ExponentVector, Direction)>,
}

impl Example {
    pub fn localized_ring(&self) -> Result<TateRingDesc> {
        if self.subspace.is_empty() {
            Ok(self.ring.clone())
        } else {
            self.ring.adjoin(self.subspace.clone())
        }
    }

    pub fn triple(&self) -> Result<LocalizationTriple> {
        build_triple(&self.localized_ring()?, &self.t)
    }
}

pub fn build_example(id: ExampleId, params: &VerifyParams) -> Result<Example> {
    params.validate()?;
    let p = params.prime;
    let ring = match id {
        ExampleId::Ex41 => ex41_ring(p)?,
        ExampleId::Ex42 => ex42_ring(p)?,
        ExampleId::Ex43 => {
            let k = params.depth as usize;
            ex43_ring(p, &build_sequences(k), k)?
        }
        ExampleId::Ex44 => ex44_ring(p, GLUEING_VARIABLES)?,
        ExampleId::Ex45 => ex45_ring(p)?,
        ExampleId::Ex46 => ex46_ring(p)?,
        ExampleId::FlatLaurent => flat_laurent_ring(p)?,
    };
    let sig = ring.signature().clone();
    let subspace = if id == ExampleId::Ex46 {
        vec![(sig.monomial(&[("P", 1)])?, Direction::Nonneg), (sig.monomial(&[("Q", 1)])?, Direction::Nonneg)]
    } else {
        Vec::new()
    };
    Ok(Example { id, t: sig.monomial(&[("T", 1)])?, ring, subspace })
}

/// Window on which the uniformity and strictness of each example are compared.
pub fn standard_window(id: ExampleId, prime: u32) -> Window {
    match id {
        ExampleId::Ex41 => Window::new(2),
        ExampleId::Ex42 => Window::new(1).with_denominator(prime.saturating_pow(3)),
        ExampleId::Ex43 => Window::new(1).with_degree(1),
        ExampleId::Ex44 => Window::new(2).with_degree(2),
        ExampleId::Ex45 => Window::new(4),
        ExampleId::Ex46 => Window::new(2),
        ExampleId::FlatLaurent => Window::new(3),
    }
}

/// The family `Z_1, Z_2, ...` of the glueing example.
pub fn glueing_family(sig: &Signature) -> Result<Vec<ExponentVector>> {
    (1..sig.len()).map(|i| sig.monomial(&[(&format!("Z{i}"), 1)])).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }

    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub details: Vec<(String, String)>,
}

impl Check {
    pub fn new(name: &str, status: Status) -> Self {
        Check { name: name.into(), status, details: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.details.push((key.into(), value.to_string()));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub subject: String,
    pub horizon: u32,
    pub precision: u32,
    pub checks: Vec<Check>,
}

impl Report {
    /// Fail if anything failed, else inconclusive if anything was, else pass.
    pub fn status(&self) -> Status {
        self.checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }
}

fn monomial_element(sig: &Arc<Signature>, p_exp: i64, e: &ExponentVector) -> Result<RingElement> {
    RingElement::monomial(sig.clone(), prime_power(sig.prime(), p_exp), e.clone())
}

fn render(sig: &Signature, e: &ExponentVector) -> String {
    sig.format_monomial(e)
}

fn join<T: fmt::Display>(xs: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for (i, x) in xs.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("{x}"));
    }
    out
}

/// Allowed sign of each coordinate of a shift into the localized ring.
fn shift_signs(g: &DerivedGauge) -> Option<Vec<Option<i8>>> {
    let n = g.signature().len();
    let mut signs = vec![Some(0i8); n];
    for (tau, dir) in g.adjoined() {
        let nz: Vec<usize> = (0..n).filter(|&i| !tau.get(i).is_zero()).collect();
        if nz.len() != 1 || !tau.get(nz[0]).is_one() {
            return None;
        }
        signs[nz[0]] = match dir {
            Direction::Nonneg => Some(1),
            Direction::Nonpos => Some(-1),
            Direction::Both => None,
        };
    }
    Some(signs)
}

/// `-inf` to the horizon with witnesses `x^e = x^monomial * x^shift`, each shift
/// a unit of the localized ring and each value recomputed from the base ring.
fn certified_vanishing(g: &DerivedGauge, e: &ExponentVector, horizon: u32) -> Result<(bool, String)> {
    let sig = g.signature().clone();
    let GaugeVerdict::MinusInfCertified { depth, witnesses } = g.evaluate(e, horizon)? else {
        return Ok((false, String::new()));
    };
    let base = DerivedGauge::plain(g.base().clone());
    let signs = shift_signs(g);
    let mut ok = depth >= horizon && !witnesses.is_empty();
    for w in &witnesses {
        ok &= w.monomial.add(&w.shift) == *e;
        ok &= base.evaluate(&w.monomial, horizon)? == GaugeVerdict::Exact(w.value.clone());
        if let Some(signs) = &signs {
            ok &= w.shift.entries().iter().zip(signs).all(|(x, s)| match s {
                Some(1) => !x.is_negative(),
                Some(-1) => !x.is_positive(),
                Some(_) => x.is_zero(),
                None => true,
            });
        }
    }
    ok &= witnesses.iter().map(|w| &w.value).min().is_some_and(|v| *v <= BigInt::from(-i64::from(horizon)));
    let shown = witnesses
        .last()
        .map(|w| format!("{}*{}", render(&sig, &w.monomial), render(&sig, &w.shift)))
        .unwrap_or_default();
    Ok((ok, shown))
}

/// Checks shared by the two nilpotent-line examples.
fn line_suite(ex: &Example, params: &VerifyParams, window: &Window, extra: &[ExponentVector]) -> Result<Vec<Check>> {
    let sig = ex.ring.signature().clone();
    let h = params.horizon;
    let z = sig.monomial(&[("Z", 1)])?;
    let tr = ex.triple()?;
    let mut checks = Vec::new();

    let m = membership(&monomial_element(&sig, -1, &z)?, tr.base(), 0, h)?;
    checks.push(Check::new("outside_ring", Status::from_bool(m == Membership::No)).with("element", "p^-1*Z").with("member", m));

    let mut ok = true;
    for v in -3..=3i64 {
        let m = membership(&monomial_element(&sig, v, &z)?, tr.base(), 0, h)?;
        ok &= m == if v >= 0 { Membership::Yes } else { Membership::No };
    }
    checks.push(Check::new("integral_multiples", Status::from_bool(ok)).with("valuations", "-3..3"));

    for (name, g) in [("vanishes_on_u", tr.gauge_a()), ("vanishes_on_v", tr.gauge_b())] {
        let mut ok = true;
        let mut shown = String::new();
        for e in core::iter::once(&z).chain(extra) {
            let (good, w) = certified_vanishing(g, e, h)?;
            ok &= good;
            if shown.is_empty() {
                shown = w;
            }
        }
        checks.push(
            Check::new(name, Status::from_bool(ok))
                .with("monomials", extra.len() + 1)
                .with("depth", h)
                .with("witness", shown),
        );
    }

    let x = monomial_element(&sig, 0, &z)?;
    let mut ok = true;
    for n in 1..=i64::from(params.precision) {
        let r = cech_sequence_check(&tr, &x, n, h)?;
        ok &= r.injectivity_failure() && r.composite_zero && r.split_identity;
    }
    checks.push(Check::new("injectivity_failure", Status::from_bool(ok)).with("precisions", format!("1..{}", params.precision)));

    let st = strictness_check(&tr, window, h, &[])?;
    let status = match &st {
        Strictness::Fails { witness: StrictnessWitness::Monomial(e) } => Status::from_bool(*e == z),
        Strictness::Inconclusive { .. } => Status::Inconclusive,
        _ => Status::Fail,
    };
    checks.push(Check::new("strictness_fails", status).with("witness", strictness_label(&sig, &st)));

    let lz = locally_zero_sections(&tr, window, h)?;
    let status = match lz.first() {
        Some(first) if first.monomial == z => match first.topologically_nilpotent {
            Membership::Yes => Status::from_bool(first.nilpotent),
            Membership::Inconclusive => Status::Inconclusive,
            Membership::No => Status::Fail,
        },
        _ => Status::Fail,
    };
    let shown = lz.first().map(|l| render(&sig, &l.monomial)).unwrap_or_else(|| "none".into());
    checks.push(
        Check::new("locally_zero", status)
            .with("witness", shown)
            .with("nilpotent", lz.first().is_some_and(|l| l.nilpotent))
            .with("count", lz.len()),
    );
    Ok(checks)
}

fn strictness_label(sig: &Signature, st: &Strictness) -> String {
    match st {
        Strictness::Holds { n, .. } => format!("holds:{n}"),
        Strictness::Fails { witness: StrictnessWitness::Monomial(e) } => render(sig, e),
        Strictness::Fails { witness: StrictnessWitness::Family(f) } => {
            format!("family:{}", join(f.iter().map(|(e, d)| format!("{}@{d}", render(sig, e)))))
        }
        Strictness::Inconclusive { monomial } => format!("undecided:{}", render(sig, monomial)),
    }
}

fn ex41_suite(params: &VerifyParams) -> Result<Vec<Check>> {
    let ex = build_example(ExampleId::Ex41, params)?;
    line_suite(&ex, params, &standard_window(ExampleId::Ex41, params.prime), &[])
}

fn ex42_suite(params: &VerifyParams) -> Result<Vec<Check>> {
    let ex = build_example(ExampleId::Ex42, params)?;
    let sig = ex.ring.signature().clone();
    let den = params.prime.saturating_pow(3);
    let frac = |k: i64| ExponentVector::new(vec![Rational::new(k.into(), den.into()), Rational::one()]);
    let extra = [frac(1), frac(-1), frac(i64::from(den) + 1), frac(-3)];
    let mut checks = line_suite(&ex, params, &standard_window(ExampleId::Ex42, params.prime), &extra)?;

    let plain = ex41_ring(params.prime)?;
    let mut ok = true;
    let points = Window::new(4).points(&sig);
    for e in &points {
        ok &= ex.ring.gauge().evaluate(e, params.horizon)? == plain.gauge().evaluate(e, params.horizon)?;
    }
    checks.push(Check::new("integer_agreement", Status::from_bool(ok)).with("points", points.len()));
    Ok(checks)
}

fn ex43_suite(params: &VerifyParams) -> Result<Vec<Check>> {
    let p = params.prime;
    let h = params.horizon;
    let k = params.depth as usize;
    let level = k.max(h as usize);
    let seq = build_sequences(level.max(4));
    let mut checks = Vec::new();

    let shown = build_sequences(k);
    checks.push(
        Check::new("sequences", Status::from_bool(seq.satisfies_bounds() && shown.a[0].is_one()))
            .with("a", join(&shown.a))
            .with("b", join(&shown.b)),
    );

    let small = ex43_ring(p, &seq, k)?;
    let big = ex43_ring(p, &seq, level)?;
    let sig = big.signature().clone();
    let z = sig.monomial(&[("Z", 1)])?;
    let t = sig.monomial(&[("T", 1)])?;
    let tr = build_triple(&big, &t)?.with_reference(small.clone())?;
    let nonzero = membership(&monomial_element(&sig, -1, &z)?, tr.base(), 0, h)?;
    let lz = locally_zero_sections(&tr, &standard_window(ExampleId::Ex43, p), h)?;
    let status = match lz.iter().find(|l| l.monomial == z) {
        Some(l) if nonzero == Membership::No && l.non_nilpotent_to_horizon => match l.topologically_nilpotent {
            Membership::Yes => Status::Pass,
            Membership::Inconclusive => Status::Inconclusive,
            Membership::No => Status::Fail,
        },
        _ => Status::Fail,
    };
    checks.push(
        Check::new("locally_zero", status)
            .with("witness", "Z")
            .with("depth", h)
            .with("level", level)
            .with("gauge_u", tr.gauge_a().evaluate(&z, h)?.upper())
            .with("gauge_v", tr.gauge_b().evaluate(&z, h)?.upper()),
    );

    let mut ok = true;
    let mut values = Vec::new();
    for e in 1..=4u32 {
        let ring = ex43_ring(p, &seq, k.max(e as usize))?;
        let ze = sig.monomial(&[("Z", i64::from(e))])?;
        let v = ring.gauge().evaluate(&ze, h)?;
        let bound = -i64::from(e * e);
        ok &= v.lower() >= ExtInt::int(bound);
        ok &= membership(&monomial_element(&sig, bound - 1, &ze)?, ring.gauge(), 0, h)? == Membership::No;
        values.push(v.to_string());
    }
    checks.push(Check::new("not_nilpotent", Status::from_bool(ok)).with("gauges", join(values)));

    let mut ok = true;
    let mut instances = 0usize;
    for lv in [2usize.min(k), k] {
        let ring = ex43_ring(p, &seq, lv)?;
        for e in Window::new(4).points(&sig) {
            ok &= oracle_matches(&ring, &seq, lv, &e, h)?;
            instances += 1;
        }
    }
    for e in 1..=4u32 {
        let lv = k.max(e as usize);
        let ring = ex43_ring(p, &seq, lv)?;
        ok &= oracle_matches(&ring, &seq, lv, &sig.monomial(&[("Z", i64::from(e))])?, h)?;
        instances += 1;
    }
    checks.push(Check::new("oracle_agreement", Status::from_bool(ok)).with("instances", instances));

    let gens = small.gauge().base().as_generators().expect("generator ring").generators().to_vec();
    let mut ok = true;
    for i in 0..gens.len() {
        for j in i..gens.len() {
            let e = gens[i].exponent.add(&gens[j].exponent);
            let cost = &gens[i].cost + &gens[j].cost;
            let c = i64::try_from(&cost).map_err(|_| Error::Parameter("cost out of range".into()))?;
            ok &= membership(&monomial_element(&sig, c, &e)?, small.gauge(), 0, h)? == Membership::Yes;
        }
    }
    checks.push(Check::new("product_closure", Status::from_bool(ok)).with("generators", gens.len()));
    Ok(checks)
}

fn oracle_matches(ring: &TateRingDesc, seq: &SequencePair, level: usize, e: &ExponentVector, horizon: u32) -> Result<bool> {
    let t = e.get(0).to_integer();
    let z = u32::try_from(e.get(1).to_integer()).map_err(|_| Error::Parameter("Z exponent out of range".into()))?;
    let want = ex43_oracle(seq, level, &t, z);
    Ok(ring.gauge().evaluate(e, horizon)? == GaugeVerdict::Exact(want))
}

fn ex44_suite(params: &VerifyParams) -> Result<Vec<Check>> {
    let h = params.horizon;
    let ex = build_example(ExampleId::Ex44, params)?;
    let sig = ex.ring.signature().clone();
    let family = glueing_family(&sig)?;
    let tr = ex.triple()?;
    let mut checks = Vec::new();

    let mut ok = true;
    for (i, e) in family.iter().enumerate() {
        let n = BigInt::from(i + 1);
        ok &= tr.base().evaluate(e, h)? == GaugeVerdict::Exact(BigInt::zero());
        ok &= tr.gauge_s().evaluate(e, h)? == GaugeVerdict::Exact(-n);
    }
    checks.push(Check::new("intersection_gauges", Status::from_bool(ok)).with("family", format!("Z1..Z{}", family.len())));

    let st = strictness_check(&tr, &standard_window(ExampleId::Ex44, params.prime), h, core::slice::from_ref(&family))?;
    let status = match &st {
        Strictness::Fails { witness: StrictnessWitness::Family(f) } => Status::from_bool(f.len() == family.len()),
        Strictness::Inconclusive { .. } => Status::Inconclusive,
        _ => Status::Fail,
    };
    checks.push(Check::new("strictness_fails", status).with("witness", strictness_label(&sig, &st)));

    let window = Window::new(6).with_degree(2);
    let lz = locally_zero_sections(&tr, &window, h)?;
    checks.push(
        Check::new("no_locally_zero", Status::from_bool(lz.is_empty()))
            .with("points", window.points(&sig).len())
            .with("found", lz.len()),
    );

    let series = SeriesSpec { terms: family.iter().map(|e| (Rational::one(), e.clone())).collect(), offset: 0 };
    let functional = SeparatingFunctional { family: family.clone() };
    let mut ok = (1..=family.len()).all(|n| series.coefficient(&functional.family[n - 1]).is_one());
    for m in 1..=family.len() as i64 {
        ok &= glueing_obstruction(&tr, &series, &series, &functional, m, h)?.obstructed();
    }
    ok &= !glueing_obstruction(&tr, &series, &series, &functional, 0, h)?.obstructed();
    checks.push(
        Check::new("glueing_obstruction", Status::from_bool(ok))
            .with("precisions", format!("1..{}", family.len()))
            .with("target", 1),
    );

    let mut ok = true;
    for a in -4..=4i64 {
        let ta = |rest: &[(&str, i64)]| -> Result<ExponentVector> {
            let mut f = vec![("T", a)];
            f.extend_from_slice(rest);
            sig.monomial(&f)
        };
        ok &= ex.ring.gauge().evaluate(&ta(&[])?, h)? == GaugeVerdict::Exact(a.abs().into());
        for i in 1..=family.len() as i64 {
            let zi = format!("Z{i}");
            let want = a.abs() - 2 * i.min(a.abs());
            ok &= ex.ring.gauge().evaluate(&ta(&[(&zi, 1)])?, h)? == GaugeVerdict::Exact(want.into());
            for j in (i + 1)..=family.len() as i64 {
                let zj = format!("Z{j}");
                let want = a.abs() - 2 * (i + j);
                ok &= ex.ring.gauge().evaluate(&ta(&[(&zi, 1), (&zj, 1)])?, h)? == GaugeVerdict::Exact(want.into());
            }
        }
    }
    checks.push(Check::new("rule_values", Status::from_bool(ok)).with("t_range", "-4..4"));
    Ok(checks)
}

fn uniform_status(u: &Uniformity, n: i64) -> Status {
    match u {
        Uniformity::Uniform { n: m, .. } => Status::from_bool(*m == BigInt::from(n)),
        Uniformity::Inconclusive { .. } => Status::Inconclusive,
        Uniformity::NonUniform(_) => Status::Fail,
    }
}

fn uniform_label(sig: &Signature, u: &Uniformity) -> String {
    match u {
        Uniformity::Uniform { n, points } => format!("uniform:{n}@{points}"),
        Uniformity::NonUniform(w) => format!("non_uniform:{}:{}", w.kind.label(), render(sig, &w.monomial)),
        Uniformity::Inconclusive { monomial } => format!("undecided:{}", render(sig, monomial)),
    }
}

fn ex45_suite(params: &VerifyParams) -> Result<Vec<Check>> {
    let h = params.horizon;
    let ex = build_example(ExampleId::Ex45, params)?;
    let ring = &ex.ring;
    let sig = ring.signature().clone();
    let z = sig.monomial(&[("Z", 1)])?;
    let window = Window::new(6);
    let mut checks = Vec::new();

    let mut ok = true;
    for e in window.points(&sig) {
        let (a, b) = (e.get(0).to_integer(), e.get(1).to_integer());
        let supported = &a + &b * &b >= BigInt::zero();
        ok &= (ring.gauge().evaluate(&e, h)? != GaugeVerdict::PlusInf) == supported;
    }
    checks.push(Check::new("support", Status::from_bool(ok)).with("points", window.points(&sig).len()));

    let u = uniformity(ring, &window, h, &[])?;
    checks.push(Check::new("uniform", uniform_status(&u, 0)).with("result", uniform_label(&sig, &u)));

    let a_ring = ring.adjoin(vec![(ex.t.clone(), Direction::Nonneg)])?;
    let u = uniformity(&a_ring, &window, h, &[])?;
    let status = match &u {
        Uniformity::NonUniform(w) => Status::from_bool(w.monomial == z && w.recheck(&a_ring, h)?),
        Uniformity::Inconclusive { .. } => Status::Inconclusive,
        Uniformity::Uniform { .. } => Status::Fail,
    };
    checks.push(Check::new("line_in_localization", status).with("result", uniform_label(&sig, &u)));

    let p = sig.prime();
    let one_t = |k: i64| sig.monomial(&[("T", k)]);
    let mut ok = membership(&monomial_element(&sig, 0, &z)?, a_ring.gauge(), 0, h)? == Membership::Yes;
    ok &= membership(&monomial_element(&sig, -1, &z)?, a_ring.gauge(), 0, h)? == Membership::No;
    for n in 1..=5i64 {
        let lhs = monomial_element(&sig, -n, &z)?.pow((n + 1) as u32);
        let m = (n + 1) * (n + 1);
        let pz = RingElement::monomial(sig.clone(), Rational::from_integer(p.into()), z.clone())?;
        let pt_inv = RingElement::monomial(sig.clone(), prime_power(p, -1), one_t(-1)?)?;
        let rhs = pt_inv.pow(m as u32).checked_mul(&pz.pow((n + 1) as u32))?.checked_mul(&monomial_element(&sig, 0, &one_t(m)?)?)?;
        ok &= lhs == rhs;
        ok &= membership(&lhs, a_ring.gauge(), 0, h)? == Membership::Yes;
    }
    checks.push(Check::new("power_identity", Status::from_bool(ok)).with("n", "1..5"));

    let tr = ex.triple()?;
    let st = strictness_check(&tr, &window, h, &[])?;
    let status = match st {
        Strictness::Holds { .. } => Status::Pass,
        Strictness::Inconclusive { .. } => Status::Inconclusive,
        Strictness::Fails { .. } => Status::Fail,
    };
    checks.push(Check::new("strictness_holds", status).with("result", strictness_label(&sig, &st)));

    let mut ok = true;
    let mut tested = 0usize;
    for e in Window::new(3).points(&sig) {
        if let GaugeVerdict::Exact(g) = ring.gauge().evaluate(&e, h)? {
            let g = i64::try_from(&g).map_err(|_| Error::Parameter("gauge out of range".into()))?;
            for n in 1..=6i64 {
                let r = monomial_element(&sig, g * n - 1, &e.scale_int(n))?;
                ok &= membership(&r, ring.gauge(), 0, h)? == Membership::No;
                tested += 1;
            }
        }
    }
    checks.push(Check::new("reduction_condition", Status::from_bool(ok)).with("instances", tested));

    let report = subadditivity(ring.gauge(), &Window::new(3), h)?;
    checks.push(product_closure_check(&report));
    Ok(checks)
}

fn product_closure_check(report: &crate::topology::SubadditivityReport) -> Check {
    Check::new("product_closure", Status::from_bool(report.violations.is_empty()))
        .with("pairs", report.pairs)
        .with("violations", report.violations.len())
}

fn ex46_suite(params: &VerifyParams) -> Result<Vec<Check>> {
    let h = params.horizon;
    let ex = build_example(ExampleId::Ex46, params)?;
    let ring = &ex.ring;
    let sig = ring.signature().clone();
    let z = sig.monomial(&[("Z", 1)])?;
    let mut checks = Vec::new();

    let u = uniformity(ring, &Window::new(5), h, &[])?;
    checks.push(Check::new("uniform", uniform_status(&u, 0)).with("result", uniform_label(&sig, &u)));

    let tr = ex.triple()?;
    let (ok_u, shown_u) = certified_vanishing(tr.gauge_a(), &z, h)?;
    let (ok_v, shown_v) = certified_vanishing(tr.gauge_b(), &z, h)?;
    let mut ok = ok_u && ok_v;
    for n in 1..=i64::from(h) {
        let on_u = sig.monomial(&[("Q", -2 * n), ("T", -n), ("Z", 1)])?;
        let on_v = sig.monomial(&[("P", -2 * n), ("T", n), ("Z", 1)])?;
        for e in [on_u, on_v] {
            ok &= ring.gauge().evaluate(&e, h)?.upper() <= ExtInt::int(-n);
        }
    }
    checks.push(
        Check::new("vanishes_on_pieces", Status::from_bool(ok))
            .with("depth", h)
            .with("witness_u", shown_u)
            .with("witness_v", shown_v),
    );

    let lz = locally_zero_sections(&tr, &Window::new(1).with_degree(1), h)?;
    let status = match lz.iter().find(|l| l.monomial == z) {
        Some(l) => match l.topologically_nilpotent {
            Membership::Yes => Status::Pass,
            Membership::Inconclusive => Status::Inconclusive,
            Membership::No => Status::Fail,
        },
        None => Status::Fail,
    };
    checks.push(Check::new("locally_zero", status).with("witness", "Z").with("count", lz.len()));

    let w = tr.ring().gauge();
    let mut ok = membership(&monomial_element(&sig, -1, &z)?, w, 0, h)? == Membership::No;
    for m in 0..=3i64 {
        for n in 0..=3i64 {
            let e = sig.monomial(&[("P", -m), ("Q", -n), ("Z", 1)])?;
            ok &= membership(&monomial_element(&sig, -1, &e)?, ring.gauge(), 0, h)? == Membership::No;
            if m > 0 && n > 0 {
                ok &= ring.gauge().evaluate(&e, h)? == GaugeVerdict::PlusInf;
            }
        }
    }
    checks.push(Check::new("nonzero_on_subspace", Status::from_bool(ok)).with("element", "p^-1*Z"));

    let report = subadditivity(ring.gauge(), &Window::new(2), h)?;
    checks.push(product_closure_check(&report));
    Ok(checks)
}

fn flat_suite(params: &VerifyParams) -> Result<Vec<Check>> {
    let h = params.horizon;
    let ex = build_example(ExampleId::FlatLaurent, params)?;
    let sig = ex.ring.signature().clone();
    let window = standard_window(ExampleId::FlatLaurent, params.prime);
    let tr = ex.triple()?;
    let st = strictness_check(&tr, &window, h, &[])?;
    let status = match &st {
        Strictness::Holds { n, .. } => Status::from_bool(n.is_zero()),
        Strictness::Inconclusive { .. } => Status::Inconclusive,
        _ => Status::Fail,
    };
    let lz = locally_zero_sections(&tr, &window, h)?;
    let u = uniformity(&ex.ring, &window, h, &[])?;
    Ok(vec![
        Check::new("strictness_holds", status).with("result", strictness_label(&sig, &st)),
        Check::new("no_locally_zero", Status::from_bool(lz.is_empty())).with("found", lz.len()),
        Check::new("uniform", uniform_status(&u, 0)).with("result", uniform_label(&sig, &u)),
    ])
}

fn report(subject: &str, params: &VerifyParams, checks: Vec<Check>) -> Report {
    Report { subject: subject.into(), horizon: params.horizon, precision: params.precision, checks }
}

/// Runs the checklist of one example.
pub fn verify_proposition(id: ExampleId, params: &VerifyParams) -> Result<Report> {
    params.validate()?;
    let checks = match id {
        ExampleId::Ex41 => ex41_suite(params)?,
        ExampleId::Ex42 => ex42_suite(params)?,
        ExampleId::Ex43 => ex43_suite(params)?,
        ExampleId::Ex44 => ex44_suite(params)?,
        ExampleId::Ex45 => ex45_suite(params)?,
        ExampleId::Ex46 => ex46_suite(params)?,
        ExampleId::FlatLaurent => flat_suite(params)?,
    };
    Ok(report(id.name(), params, checks))
}

/// Acceptance criteria 1 to 8: one per example, then the positive fixtures and the engine properties.
pub fn verify_criterion(n: u32, params: &VerifyParams) -> Result<Report> {
    let id = match n {
        1 => ExampleId::Ex41,
        2 => ExampleId::Ex42,
        3 => ExampleId::Ex43,
        4 => ExampleId::Ex44,
        5 => ExampleId::Ex45,
        6 => ExampleId::Ex46,
        7 => return positive_criteria(params),
        8 => return engine_properties(params),
        _ => return Err(Error::Parameter(format!("criteria are numbered 1..=8, got {n}"))),
    };
    let mut r = verify_proposition(id, params)?;
    r.subject = format!("criterion{n}:{}", id.name());
    Ok(r)
}

struct AlainFixture {
    name: &'static str,
    ring: TateRingDesc,
    t_list: Vec<RingElement>,
    a_list: Vec<RingElement>,
    r: RingElement,
    relations: Vec<Relation>,
}

/// `t = (1, T)`, `a = (1, 0)` with the relations `t_i r = r t_i`.
fn unit_partition_fixture(name: &'static str, ring: TateRingDesc, r: &ExponentVector) -> Result<AlainFixture> {
    let sig = ring.signature().clone();
    let one = RingElement::one(sig.clone());
    let t = monomial_element(&sig, 0, &sig.monomial(&[("T", 1)])?)?;
    let r = monomial_element(&sig, 0, r)?;
    Ok(AlainFixture {
        name,
        t_list: vec![one.clone(), t],
        a_list: vec![one, RingElement::zero(sig)],
        relations: vec![
            Relation { degree: 1, terms: vec![(r.clone(), vec![1, 0])] },
            Relation { degree: 1, terms: vec![(r.clone(), vec![0, 1])] },
        ],
        r,
        ring,
    })
}

fn alain_fixtures(prime: u32) -> Result<Vec<AlainFixture>> {
    let ex41 = ex41_ring(prime)?;
    let sig = ex41.signature().clone();
    let z = sig.monomial(&[("Z", 1)])?;
    let t = monomial_element(&sig, 0, &sig.monomial(&[("T", 1)])?)?;
    let t_inv = monomial_element(&sig, 0, &sig.monomial(&[("T", -1)])?)?;
    let r = monomial_element(&sig, 0, &sig.monomial(&[("T", -1), ("Z", 1)])?)?;
    let single = AlainFixture {
        name: "ex41_unit",
        ring: ex41.clone(),
        t_list: vec![t],
        a_list: vec![t_inv],
        relations: vec![Relation { degree: 1, terms: vec![(r.clone(), vec![1])] }],
        r,
    };
    let ex45 = ex45_ring(prime)?;
    let r45 = ex45.signature().monomial(&[("T", -1), ("Z", 1)])?;
    let ex46 = ex46_ring(prime)?;
    let z46 = ex46.signature().monomial(&[("Z", 1)])?;
    let flat = flat_laurent_ring(prime)?;
    let t3 = flat.signature().monomial(&[("T", 3)])?;
    Ok(vec![
        single,
        unit_partition_fixture("ex41_cover", ex41, &z)?,
        unit_partition_fixture("ex45_cover", ex45, &r45)?,
        unit_partition_fixture("ex46_cover", ex46, &z46)?,
        unit_partition_fixture("flat_cover", flat, &t3)?,
    ])
}

fn positive_criteria(params: &VerifyParams) -> Result<Report> {
    params.validate()?;
    let h = params.horizon;
    let p = params.prime;
    let mut checks = Vec::new();

    for f in alain_fixtures(p)? {
        let cert = alain_bound(&f.ring, &f.t_list, &f.a_list, &f.r, &f.relations, 8, h)?;
        let status = if cert.is_valid() {
            Status::Pass
        } else if cert.verified.iter().any(|(_, m)| *m == Membership::No) {
            Status::Fail
        } else {
            Status::Inconclusive
        };
        checks.push(
            Check::new(&format!("alain_{}", f.name), status)
                .with("a_bound", &cert.a_bound)
                .with("b_bound", &cert.b_bound)
                .with("exponent", &cert.exponent)
                .with("powers", "1..8"),
        );
    }

    let ring = ex41_ring(p)?;
    let sig = ring.signature().clone();
    let t = monomial_element(&sig, 0, &sig.monomial(&[("T", 1)])?)?;
    let one = RingElement::one(sig.clone());
    let zero = RingElement::zero(sig.clone());
    let trivial = laurent_constant(&ring, &[one.clone(), t.clone()], &[one.clone(), zero.clone()], h)?;
    checks.push(laurent_check("laurent_trivial", &trivial, 0));
    let scaled = laurent_constant(
        &ring,
        &[one.scale_by_prime_power(2), t],
        &[one.scale_by_prime_power(-2), zero],
        h,
    )?;
    checks.push(laurent_check("laurent_scaled", &scaled, 2));

    let mut ok = Status::Pass;
    let mut uniform = Vec::new();
    for id in ExampleId::ALL {
        let ex = build_example(id, params)?;
        let window = standard_window(id, p);
        let families = if id == ExampleId::Ex44 { vec![glueing_family(ex.ring.signature())?] } else { Vec::new() };
        let depth = if ex.ring.gauge().base().as_generators().is_some() { h.min(GENERATOR_UNIFORMITY_HORIZON) } else { h };
        if let Uniformity::Uniform { .. } = uniformity(&ex.ring, &window, depth, &families)? {
            let st = strictness_check(&build_triple(&ex.ring, &ex.t)?, &window, h, &families)?;
            ok = ok.max(match st {
                Strictness::Holds { .. } => Status::Pass,
                Strictness::Inconclusive { .. } => Status::Inconclusive,
                Strictness::Fails { .. } => Status::Fail,
            });
            uniform.push(id.name());
        }
    }
    checks.push(Check::new("uniform_implies_strict", ok).with("uniform", join(uniform)));
    Ok(report("criterion7:positive", params, checks))
}

fn laurent_check(name: &str, got: &LaurentConstant, want: u32) -> Check {
    match got {
        LaurentConstant::Found { b, c_exponent } => {
            Check::new(name, Status::from_bool(*b == want && *c_exponent == -(i64::from(want) + 1)))
                .with("b", b)
                .with("c_exponent", c_exponent)
        }
        LaurentConstant::Inconclusive => Check::new(name, Status::Inconclusive),
    }
}

/// A random element of the `ex41` ring: up to four terms `u p^v T^a Z^b`.
pub fn random_element(rng: &mut impl Rng, sig: &Arc<Signature>) -> Result<RingElement> {
    let n = rng.gen_range(0..=4);
    let mut terms = Vec::new();
    for _ in 0..n {
        let a = rng.gen_range(-3..=3i64);
        let b = rng.gen_range(0..=1i64);
        let v = rng.gen_range(-3..=3i64);
        let u = [1i64, -1, 3, -3, 5][rng.gen_range(0..5)];
        let c = prime_power(sig.prime(), v) * Rational::from_integer(u.into());
        terms.push((ExponentVector::from_ints(&[a, b]), c));
    }
    RingElement::from_terms(sig.clone(), terms)
}

/// A random generator gauge in `T`, `Z` whose optimum uses at most eight generators.
pub fn random_generator_instance(rng: &mut impl Rng, prime: u32) -> Result<(GeneratorGauge, ExponentVector)> {
    let sig = shared(Signature::new(prime, vec![VarDecl::invertible("T"), VarDecl::plain("Z")])?);
    let mut gens = vec![
        Generator::new(ExponentVector::from_ints(&[1, 0]), rng.gen_range(1..=3i64)),
        Generator::new(ExponentVector::from_ints(&[-1, 0]), rng.gen_range(1..=3i64)),
    ];
    for _ in 0..rng.gen_range(1..=3) {
        let e = ExponentVector::from_ints(&[rng.gen_range(-2..=2), rng.gen_range(1..=2)]);
        gens.push(Generator::new(e, rng.gen_range(-2..=2i64)));
    }
    let target = ExponentVector::from_ints(&[rng.gen_range(-2..=2), rng.gen_range(0..=2)]);
    Ok((GeneratorGauge::new(sig, gens)?, target))
}

/// Bound on the multiset size for the instances above: two graded factors and
/// at most `2 + 2 * 2` unit steps.
pub const RANDOM_INSTANCE_BOUND: usize = 8;

fn engine_properties(params: &VerifyParams) -> Result<Report> {
    params.validate()?;
    let h = params.horizon;
    let p = params.prime;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut checks = Vec::new();

    let mut ok = true;
    let mut pairs = 0u64;
    let mut names = Vec::new();
    for id in ExampleId::ALL {
        let ex = build_example(id, params)?;
        let window = if id == ExampleId::Ex44 { Window::new(4).with_degree(2) } else { Window::new(4) };
        let r = subadditivity(ex.ring.gauge(), &window, h)?;
        ok &= r.violations.is_empty();
        pairs += r.pairs;
        names.push(id.name());
    }
    checks.push(
        Check::new("subadditivity", Status::from_bool(ok))
            .with("radius", 4)
            .with("rings", join(names))
            .with("pairs", pairs),
    );

    let mut ok = true;
    let mut instances = 0usize;
    let seq = build_sequences((params.depth as usize).max(2));
    let sig = ex43_ring(p, &seq, 2)?.signature().clone();
    for lv in [2usize, params.depth as usize] {
        let ring = ex43_ring(p, &seq, lv)?;
        for e in Window::new(4).points(&sig) {
            ok &= oracle_matches(&ring, &seq, lv, &e, h)?;
            instances += 1;
        }
    }
    for _ in 0..200 {
        let (g, e) = random_generator_instance(&mut rng, p)?;
        let want = generator_gauge_oracle(&g, &e, RANDOM_INSTANCE_BOUND).value;
        let got = match g.evaluate(&e, h)? {
            GaugeVerdict::Exact(v) => ExtInt::Finite(v),
            GaugeVerdict::PlusInf => ExtInt::PosInf,
            _ => ExtInt::NegInf,
        };
        ok &= got == want;
        instances += 1;
    }
    checks.push(Check::new("dp_oracle", Status::from_bool(ok)).with("instances", instances));

    let ring = ex41_ring(p)?;
    let sig = ring.signature().clone();
    let tr = build_triple(&ring, &sig.monomial(&[("T", 1)])?)?;
    let mut ok = true;
    for _ in 0..200 {
        let x = random_element(&mut rng, &sig)?;
        let r = cech_sequence_check(&tr, &x, 1, h)?;
        ok &= r.composite_zero && r.split_identity;
    }
    checks.push(Check::new("exactness", Status::from_bool(ok)).with("elements", 200));

    let mut ok = true;
    for _ in 0..200 {
        let x = random_element(&mut rng, &sig)?;
        let n = rng.gen_range(-3..=4i64);
        let big_n = n + rng.gen_range(0..=4i64);
        let tx = TruncatedElement::new(&x, big_n, ring.gauge(), h)?;
        let whole = TruncatedElement::new(&x, big_n, ring.gauge(), h)?;
        ok &= membership(&x, ring.gauge(), n, h)? == membership(tx.representative(), ring.gauge(), n, h)?;
        ok &= membership(&x.checked_sub(tx.representative())?, ring.gauge(), big_n, h)? == Membership::Yes;
        ok &= tx.equals(&whole, h)? == Membership::Yes;
    }
    checks.push(Check::new("truncation", Status::from_bool(ok)).with("triples", 200));

    let t = monomial_element(&sig, 0, &sig.monomial(&[("T", 1)])?)?;
    let mut ok = true;
    for _ in 0..100 {
        let w = Rational::new(rng.gen_range(-16..=16i64).into(), 16.into());
        let wz = Rational::new(rng.gen_range(-16..=16i64).into(), 4.into());
        let s = ValuationSample::new(&ring, vec![w, wz], Rational::one(), h)?;
        ok &= cover_membership(&s, &CoverPiece::U(t.clone())) || cover_membership(&s, &CoverPiece::V(t.clone()));
    }
    checks.push(Check::new("valuation_cover", Status::from_bool(ok)).with("samples", 100));
    Ok(report("criterion8:engine", params, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_sequences() {
        let s = build_sequences(3);
        assert_eq!(s.a, vec![BigInt::from(1), BigInt::from(11), BigInt::from(91)]);
        assert_eq!(s.b, vec![BigInt::from(3), BigInt::from(27), BigInt::from(283)]);
        assert!(s.satisfies_bounds());
        let mut bad = s.clone();
        bad.b[1] = BigInt::from(26);
        assert!(!bad.satisfies_bounds());
    }

    #[test]
    fn names_round_trip() {
        for id in ExampleId::ALL {
            assert_eq!(ExampleId::from_name(id.name()), Some(id));
        }
        assert_eq!(ExampleId::from_name("ex47"), None);
    }

    #[test]
    fn rings_build() {
        let params = VerifyParams::default();
        for id in ExampleId::ALL {
            let ex = build_example(id, &params).unwrap();
            ex.triple().unwrap();
        }
    }

    #[test]
    fn example_values() {
        let h = 8;
        let r = ex41_ring(2).unwrap();
        let sig = r.signature().clone();
        for n in -3..=3i64 {
            let e = sig.monomial(&[("T", n), ("Z", 1)]).unwrap();
            assert_eq!(r.gauge().evaluate(&e, h).unwrap(), GaugeVerdict::Exact((-n.abs()).into()));
        }
        let r = ex44_ring(2, 4).unwrap();
        let sig = r.signature().clone();
        let e = sig.monomial(&[("T", 3), ("Z1", 1), ("Z3", 1)]).unwrap();
        assert_eq!(r.gauge().evaluate(&e, h).unwrap(), GaugeVerdict::Exact(BigInt::from(3 - 8)));
        let r = ex46_ring(2).unwrap();
        let sig = r.signature().clone();
        let e = sig.monomial(&[("P", -1), ("Q", -1), ("Z", 1)]).unwrap();
        assert_eq!(r.gauge().evaluate(&e, h).unwrap(), GaugeVerdict::PlusInf);
    }

    #[test]
    fn ex43_oracle_small() {
        let s = build_sequences(2);
        assert_eq!(ex43_oracle(&s, 2, &BigInt::zero(), 0), BigInt::zero());
        // alpha_1 beta_1 and two steps of pT
        assert_eq!(ex43_oracle(&s, 1, &BigInt::zero(), 2), BigInt::zero());
        assert_eq!(ex43_oracle(&s, 1, &BigInt::from(1), 1), BigInt::from(-1));
    }
}
