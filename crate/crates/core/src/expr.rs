//! Piecewise expressions over exponent coordinates.
//!
//! Besides plain evaluation an expression can be decomposed into affine
//! pieces (for exact minimization over shift lattices) and followed along a
//! ray `base + j * step`, where it eventually agrees with a polynomial in `j`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    pub fn complement(self) -> CmpOp {
        match self {
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
        }
    }

    /// Truth of `lhs op rhs` given `lhs.cmp(rhs)`.
    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Ge => ord != Ordering::Less,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub lhs: Expr,
    pub op: CmpOp,
    pub rhs: Expr,
}

/// A conjunction of comparisons; the empty guard is true.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Guard(pub Vec<Atom>);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational),
    Var(usize),
    /// `+inf`; only allowed where the value of the whole expression is returned.
    Inf,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Min(Vec<Expr>),
    Max(Vec<Expr>),
    Abs(Box<Expr>),
    /// First arm whose guard holds, else the fallback.
    Case(Vec<(Guard, Expr)>, Box<Expr>),
}

pub fn int(n: i64) -> Expr {
    Expr::Const(Rational::from_integer(n.into()))
}

pub fn var(i: usize) -> Expr {
    Expr::Var(i)
}

pub fn atom(lhs: Expr, op: CmpOp, rhs: Expr) -> Atom {
    Atom { lhs, op, rhs }
}

impl Expr {
    pub fn add(self, other: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(other))
    }

    pub fn sub(self, other: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(other))
    }

    pub fn mul(self, other: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(other))
    }

    /// Negation; constants are folded so that printing and reparsing is the identity.
    pub fn negate(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(-c),
            e => Expr::Neg(Box::new(e)),
        }
    }

    pub fn abs(self) -> Expr {
        Expr::Abs(Box::new(self))
    }

    pub fn case(arms: Vec<(Guard, Expr)>, otherwise: Expr) -> Expr {
        Expr::Case(arms, Box::new(otherwise))
    }

    /// Checks variable indices, arities and that `inf` only appears in value position.
    pub fn validate(&self, nvars: usize) -> Result<()> {
        self.validate_at(nvars, true)
    }

    fn validate_at(&self, nvars: usize, tail: bool) -> Result<()> {
        match self {
            Expr::Const(_) => Ok(()),
            Expr::Var(i) if *i < nvars => Ok(()),
            Expr::Var(i) => Err(Error::Definition(format!("variable index {i} out of range"))),
            Expr::Inf if tail => Ok(()),
            Expr::Inf => Err(Error::Definition("`inf` used inside arithmetic".into())),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.validate_at(nvars, false)?;
                b.validate_at(nvars, false)
            }
            Expr::Neg(a) | Expr::Abs(a) => a.validate_at(nvars, false),
            Expr::Min(v) | Expr::Max(v) => {
                if v.is_empty() {
                    return Err(Error::Definition("empty min/max".into()));
                }
                v.iter().try_for_each(|e| e.validate_at(nvars, false))
            }
            Expr::Case(arms, otherwise) => {
                for (g, e) in arms {
                    for a in &g.0 {
                        a.lhs.validate_at(nvars, false)?;
                        a.rhs.validate_at(nvars, false)?;
                    }
                    e.validate_at(nvars, tail)?;
                }
                otherwise.validate_at(nvars, tail)
            }
        }
    }

    /// Value at a point; `None` is `+inf`.
    pub fn eval(&self, x: &[Rational]) -> Option<Rational> {
        match self {
            Expr::Const(c) => Some(c.clone()),
            Expr::Var(i) => Some(x[*i].clone()),
            Expr::Inf => None,
            Expr::Add(a, b) => Some(a.eval(x)? + b.eval(x)?),
            Expr::Sub(a, b) => Some(a.eval(x)? - b.eval(x)?),
            Expr::Mul(a, b) => Some(a.eval(x)? * b.eval(x)?),
            Expr::Neg(a) => Some(-a.eval(x)?),
            Expr::Abs(a) => Some(a.eval(x)?.abs()),
            Expr::Min(v) => v.iter().map(|e| e.eval(x)).try_fold(None::<Rational>, |acc, y| {
                let y = y?;
                Some(Some(match acc {
                    Some(a) if a <= y => a,
                    _ => y,
                }))
            })?,
            Expr::Max(v) => v.iter().map(|e| e.eval(x)).try_fold(None::<Rational>, |acc, y| {
                let y = y?;
                Some(Some(match acc {
                    Some(a) if a >= y => a,
                    _ => y,
                }))
            })?,
            Expr::Case(arms, otherwise) => {
                for (g, e) in arms {
                    if g.holds(x) {
                        return e.eval(x);
                    }
                }
                otherwise.eval(x)
            }
        }
    }

    /// Replaces the fixed coordinates by constants and folds everything decidable.
    pub fn specialize(&self, fixed: &[Option<Rational>]) -> Expr {
        match self {
            Expr::Const(_) | Expr::Inf => self.clone(),
            Expr::Var(i) => match &fixed[*i] {
                Some(c) => Expr::Const(c.clone()),
                None => self.clone(),
            },
            Expr::Add(a, b) => fold2(a.specialize(fixed), b.specialize(fixed), Expr::Add, |p, q| p + q),
            Expr::Sub(a, b) => fold2(a.specialize(fixed), b.specialize(fixed), Expr::Sub, |p, q| p - q),
            Expr::Mul(a, b) => fold2(a.specialize(fixed), b.specialize(fixed), Expr::Mul, |p, q| p * q),
            Expr::Neg(a) => match a.specialize(fixed) {
                Expr::Const(c) => Expr::Const(-c),
                e => Expr::Neg(Box::new(e)),
            },
            Expr::Abs(a) => match a.specialize(fixed) {
                Expr::Const(c) => Expr::Const(c.abs()),
                e => Expr::Abs(Box::new(e)),
            },
            Expr::Min(v) | Expr::Max(v) => {
                let is_min = matches!(self, Expr::Min(_));
                let parts: Vec<Expr> = v.iter().map(|e| e.specialize(fixed)).collect();
                let mut consts: Option<Rational> = None;
                let mut rest = Vec::new();
                for p in parts {
                    match p {
                        Expr::Const(c) => {
                            consts = Some(match consts {
                                None => c,
                                Some(d) if (c < d) == is_min => c,
                                Some(d) => d,
                            })
                        }
                        e => rest.push(e),
                    }
                }
                if rest.is_empty() {
                    return Expr::Const(consts.unwrap_or_else(Rational::zero));
                }
                rest.extend(consts.map(Expr::Const));
                if is_min {
                    Expr::Min(rest)
                } else {
                    Expr::Max(rest)
                }
            }
            Expr::Case(arms, otherwise) => {
                let mut kept = Vec::new();
                for (g, e) in arms {
                    let mut atoms = Vec::new();
                    let mut falsified = false;
                    for a in &g.0 {
                        let lhs = a.lhs.specialize(fixed);
                        let rhs = a.rhs.specialize(fixed);
                        match (&lhs, &rhs) {
                            (Expr::Const(l), Expr::Const(r)) => {
                                if !a.op.holds(l.cmp(r)) {
                                    falsified = true;
                                    break;
                                }
                            }
                            _ => atoms.push(Atom { lhs, op: a.op, rhs }),
                        }
                    }
                    if falsified {
                        continue;
                    }
                    let value = e.specialize(fixed);
                    if atoms.is_empty() {
                        if kept.is_empty() {
                            return value;
                        }
                        return Expr::Case(kept, Box::new(value));
                    }
                    kept.push((Guard(atoms), value));
                }
                let fallback = otherwise.specialize(fixed);
                if kept.is_empty() {
                    fallback
                } else {
                    Expr::Case(kept, Box::new(fallback))
                }
            }
        }
    }

    /// The expression as an affine form, if it is one syntactically.
    pub fn affine(&self, nvars: usize) -> Option<Affine> {
        match self {
            Expr::Const(c) => Some(Affine::constant(nvars, c.clone())),
            Expr::Var(i) => Some(Affine::coordinate(nvars, *i)),
            Expr::Add(a, b) => Some(a.affine(nvars)?.add(&b.affine(nvars)?)),
            Expr::Sub(a, b) => Some(a.affine(nvars)?.sub(&b.affine(nvars)?)),
            Expr::Neg(a) => Some(a.affine(nvars)?.scale(&-Rational::one())),
            Expr::Mul(a, b) => {
                let (a, b) = (a.affine(nvars)?, b.affine(nvars)?);
                if a.is_constant() {
                    Some(b.scale(&a.constant))
                } else if b.is_constant() {
                    Some(a.scale(&b.constant))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Decomposes the expression into affine pieces covering its domain.
    /// Pieces may overlap, but agree where they do. `None` when some product
    /// of non-constant terms makes the expression non-affine.
    pub fn pieces(&self, nvars: usize) -> Option<Vec<Piece>> {
        match self {
            Expr::Const(_) | Expr::Var(_) => Some(alloc::vec![Piece::plain(self.affine(nvars)?)]),
            Expr::Inf => Some(alloc::vec![Piece { constraints: Vec::new(), value: None }]),
            Expr::Add(a, b) => combine(a.pieces(nvars)?, b.pieces(nvars)?, |p, q| Some(p.add(q))),
            Expr::Sub(a, b) => combine(a.pieces(nvars)?, b.pieces(nvars)?, |p, q| Some(p.sub(q))),
            Expr::Mul(a, b) => combine(a.pieces(nvars)?, b.pieces(nvars)?, |p, q| {
                if p.is_constant() {
                    Some(q.scale(&p.constant))
                } else if q.is_constant() {
                    Some(p.scale(&q.constant))
                } else {
                    None
                }
            }),
            Expr::Neg(a) => {
                let mut out = a.pieces(nvars)?;
                for p in &mut out {
                    p.value = Some(p.value.as_ref()?.scale(&-Rational::one()));
                }
                Some(out)
            }
            Expr::Abs(a) => {
                let mut out = Vec::new();
                for p in a.pieces(nvars)? {
                    let v = p.value.clone()?;
                    let mut pos = p.clone();
                    pos.constraints.push(Constraint { form: v.scale(&-Rational::one()), rel: Rel::Le });
                    let mut neg = p;
                    neg.constraints.push(Constraint { form: v.clone(), rel: Rel::Le });
                    neg.value = Some(v.scale(&-Rational::one()));
                    out.push(pos);
                    out.push(neg);
                }
                Some(out)
            }
            Expr::Min(v) | Expr::Max(v) => {
                let is_min = matches!(self, Expr::Min(_));
                let lists: Vec<Vec<Piece>> = v.iter().map(|e| e.pieces(nvars)).collect::<Option<_>>()?;
                let mut out = Vec::new();
                for choice in cartesian(&lists) {
                    let values: Vec<Affine> = choice.iter().map(|p| p.value.clone()).collect::<Option<_>>()?;
                    let base: Vec<Constraint> =
                        choice.iter().flat_map(|p| p.constraints.iter().cloned()).collect();
                    for (i, vi) in values.iter().enumerate() {
                        let mut cs = base.clone();
                        for (k, vk) in values.iter().enumerate() {
                            if k != i {
                                // min: vi <= vk ; max: vi >= vk
                                let form = if is_min { vi.sub(vk) } else { vk.sub(vi) };
                                cs.push(Constraint { form, rel: Rel::Le });
                            }
                        }
                        out.push(Piece { constraints: cs, value: Some(vi.clone()) });
                    }
                }
                Some(out)
            }
            Expr::Case(arms, otherwise) => {
                let mut out = Vec::new();
                let mut negated_so_far: Vec<Vec<Constraint>> = alloc::vec![Vec::new()];
                for (g, e) in arms {
                    let holds = g.dnf(nvars, false)?;
                    let values = e.pieces(nvars)?;
                    for prefix in &negated_so_far {
                        for h in &holds {
                            for v in &values {
                                let mut cs = prefix.clone();
                                cs.extend(h.iter().cloned());
                                cs.extend(v.constraints.iter().cloned());
                                out.push(Piece { constraints: cs, value: v.value.clone() });
                            }
                        }
                    }
                    let fails = g.dnf(nvars, true)?;
                    let mut next = Vec::new();
                    for prefix in &negated_so_far {
                        for f in &fails {
                            let mut cs = prefix.clone();
                            cs.extend(f.iter().cloned());
                            next.push(cs);
                        }
                    }
                    negated_so_far = next;
                }
                for prefix in &negated_so_far {
                    for v in otherwise.pieces(nvars)? {
                        let mut cs = prefix.clone();
                        cs.extend(v.constraints.iter().cloned());
                        out.push(Piece { constraints: cs, value: v.value });
                    }
                }
                Some(out)
            }
        }
    }

    /// Behaviour along `base + j * step` for large integers `j`: the returned
    /// polynomial (or `None` for `+inf`) equals the expression for every `j >= threshold`.
    pub fn eventual(&self, base: &[Rational], step: &[Rational]) -> Eventual {
        match self {
            Expr::Const(c) => Eventual::poly(Poly::constant(c.clone())),
            Expr::Var(i) => Eventual::poly(Poly::linear(base[*i].clone(), step[*i].clone())),
            Expr::Inf => Eventual { tail: None, threshold: BigInt::zero() },
            Expr::Add(a, b) => a.eventual(base, step).zip(b.eventual(base, step), |p, q| p.add(q)),
            Expr::Sub(a, b) => a.eventual(base, step).zip(b.eventual(base, step), |p, q| p.sub(q)),
            Expr::Mul(a, b) => a.eventual(base, step).zip(b.eventual(base, step), |p, q| p.mul(q)),
            Expr::Neg(a) => {
                let mut ev = a.eventual(base, step);
                ev.tail = ev.tail.map(|p| p.neg());
                ev
            }
            Expr::Abs(a) => {
                let mut ev = a.eventual(base, step);
                if let Some(p) = ev.tail.take() {
                    ev.threshold = ev.threshold.max(p.sign_threshold());
                    ev.tail = Some(if p.eventual_sign() == Ordering::Less { p.neg() } else { p });
                }
                ev
            }
            Expr::Min(v) | Expr::Max(v) => {
                let want = if matches!(self, Expr::Min(_)) { Ordering::Less } else { Ordering::Greater };
                let mut best = v[0].eventual(base, step);
                for e in &v[1..] {
                    let next = e.eventual(base, step);
                    let threshold = best.threshold.clone().max(next.threshold.clone());
                    let (tail, t) = match (best.tail, next.tail) {
                        (None, None) => (None, BigInt::zero()),
                        (Some(p), None) | (None, Some(p)) => {
                            (if want == Ordering::Less { Some(p) } else { None }, BigInt::zero())
                        }
                        (Some(p), Some(q)) => {
                            let d = q.sub(&p);
                            let t = d.sign_threshold();
                            // keep p unless q is eventually strictly better
                            let q_better = d.eventual_sign() == want;
                            (Some(if q_better { q } else { p }), t)
                        }
                    };
                    best = Eventual { tail, threshold: threshold.max(t) };
                }
                best
            }
            Expr::Case(arms, otherwise) => {
                let mut threshold = BigInt::zero();
                for (g, e) in arms {
                    let mut all = true;
                    for a in &g.0 {
                        let l = a.lhs.eventual(base, step);
                        let r = a.rhs.eventual(base, step);
                        threshold = threshold.max(l.threshold).max(r.threshold);
                        match (l.tail, r.tail) {
                            (Some(p), Some(q)) => {
                                let d = p.sub(&q);
                                threshold = threshold.max(d.sign_threshold());
                                if !a.op.holds(d.eventual_sign()) {
                                    all = false;
                                }
                            }
                            _ => all = false,
                        }
                    }
                    if all {
                        let mut ev = e.eventual(base, step);
                        ev.threshold = ev.threshold.max(threshold);
                        return ev;
                    }
                }
                let mut ev = otherwise.eventual(base, step);
                ev.threshold = ev.threshold.max(threshold);
                ev
            }
        }
    }

    /// Whether the expression mentions `inf` anywhere.
    pub fn mentions_inf(&self) -> bool {
        match self {
            Expr::Inf => true,
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.mentions_inf() || b.mentions_inf(),
            Expr::Neg(a) | Expr::Abs(a) => a.mentions_inf(),
            Expr::Min(v) | Expr::Max(v) => v.iter().any(Expr::mentions_inf),
            Expr::Case(arms, o) => arms.iter().any(|(_, e)| e.mentions_inf()) || o.mentions_inf(),
        }
    }

    /// Renders the expression with the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        self.write(&mut s, names, Level::Sum);
        s
    }

    fn write(&self, out: &mut String, names: &[String], level: Level) {
        let needs = |own: Level| own < level;
        match self {
            Expr::Const(c) => {
                if c.is_negative() && level > Level::Sum {
                    out.push_str(&format!("({c})"));
                } else {
                    out.push_str(&format!("{c}"));
                }
            }
            Expr::Var(i) => out.push_str(&names[*i]),
            Expr::Inf => out.push_str("inf"),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let paren = needs(Level::Sum);
                if paren {
                    out.push('(');
                }
                a.write(out, names, Level::Sum);
                out.push_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " });
                b.write(out, names, Level::Product);
                if paren {
                    out.push(')');
                }
            }
            Expr::Mul(a, b) => {
                let paren = needs(Level::Product);
                if paren {
                    out.push('(');
                }
                a.write(out, names, Level::Product);
                out.push_str(" * ");
                b.write(out, names, Level::Unary);
                if paren {
                    out.push(')');
                }
            }
            Expr::Neg(a) => {
                let paren = needs(Level::Unary);
                if paren {
                    out.push('(');
                }
                out.push('-');
                a.write(out, names, Level::Atom);
                if paren {
                    out.push(')');
                }
            }
            Expr::Abs(a) => {
                out.push_str("abs(");
                a.write(out, names, Level::Sum);
                out.push(')');
            }
            Expr::Min(v) | Expr::Max(v) => {
                out.push_str(if matches!(self, Expr::Min(_)) { "min(" } else { "max(" });
                for (k, e) in v.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    e.write(out, names, Level::Sum);
                }
                out.push(')');
            }
            Expr::Case(arms, otherwise) => {
                out.push_str("case { ");
                for (g, e) in arms {
                    if g.0.is_empty() {
                        out.push_str("true");
                    }
                    for (k, a) in g.0.iter().enumerate() {
                        if k > 0 {
                            out.push_str(" & ");
                        }
                        a.lhs.write(out, names, Level::Sum);
                        out.push_str(&format!(" {} ", a.op.symbol()));
                        a.rhs.write(out, names, Level::Sum);
                    }
                    out.push_str(" => ");
                    e.write(out, names, Level::Sum);
                    out.push_str("; ");
                }
                out.push_str("else => ");
                otherwise.write(out, names, Level::Sum);
                out.push_str(" }");
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Sum,
    Product,
    Unary,
    Atom,
}

fn fold2(
    a: Expr,
    b: Expr,
    make: fn(Box<Expr>, Box<Expr>) -> Expr,
    f: fn(Rational, Rational) -> Rational,
) -> Expr {
    match (a, b) {
        (Expr::Const(p), Expr::Const(q)) => Expr::Const(f(p, q)),
        (a, b) => make(Box::new(a), Box::new(b)),
    }
}

impl Guard {
    pub fn holds(&self, x: &[Rational]) -> bool {
        self.0.iter().all(|a| match (a.lhs.eval(x), a.rhs.eval(x)) {
            (Some(l), Some(r)) => a.op.holds(l.cmp(&r)),
            _ => false,
        })
    }

    /// The guard (or its negation) as a disjunction of constraint conjunctions.
    fn dnf(&self, nvars: usize, negate: bool) -> Option<Vec<Vec<Constraint>>> {
        let per_atom: Vec<Vec<Vec<Constraint>>> = self
            .0
            .iter()
            .map(|a| {
                let op = if negate { a.op.complement() } else { a.op };
                atom_dnf(a, op, nvars)
            })
            .collect::<Option<_>>()?;
        if negate {
            Some(per_atom.into_iter().flatten().collect())
        } else {
            let mut acc: Vec<Vec<Constraint>> = alloc::vec![Vec::new()];
            for alts in per_atom {
                let mut next = Vec::new();
                for prefix in &acc {
                    for alt in &alts {
                        let mut cs = prefix.clone();
                        cs.extend(alt.iter().cloned());
                        next.push(cs);
                    }
                }
                acc = next;
            }
            Some(acc)
        }
    }
}

fn atom_dnf(a: &Atom, op: CmpOp, nvars: usize) -> Option<Vec<Vec<Constraint>>> {
    let mut out = Vec::new();
    for l in a.lhs.pieces(nvars)? {
        for r in a.rhs.pieces(nvars)? {
            let (lv, rv) = (l.value.clone()?, r.value.clone()?);
            let mut base = l.constraints.clone();
            base.extend(r.constraints.iter().cloned());
            let d = lv.sub(&rv);
            let alts: Vec<Constraint> = match op {
                CmpOp::Le => alloc::vec![Constraint { form: d, rel: Rel::Le }],
                CmpOp::Lt => alloc::vec![Constraint { form: d, rel: Rel::Lt }],
                CmpOp::Ge => alloc::vec![Constraint { form: d.scale(&-Rational::one()), rel: Rel::Le }],
                CmpOp::Gt => alloc::vec![Constraint { form: d.scale(&-Rational::one()), rel: Rel::Lt }],
                CmpOp::Eq => alloc::vec![Constraint { form: d, rel: Rel::Eq }],
                CmpOp::Ne => {
                    let mut lo = base.clone();
                    lo.push(Constraint { form: d.clone(), rel: Rel::Lt });
                    let mut hi = base;
                    hi.push(Constraint { form: d.scale(&-Rational::one()), rel: Rel::Lt });
                    out.push(lo);
                    out.push(hi);
                    continue;
                }
            };
            let mut cs = base;
            cs.extend(alts);
            out.push(cs);
        }
    }
    Some(out)
}

fn cartesian(lists: &[Vec<Piece>]) -> Vec<Vec<&Piece>> {
    let mut acc: Vec<Vec<&Piece>> = alloc::vec![Vec::new()];
    for list in lists {
        let mut next = Vec::new();
        for prefix in &acc {
            for p in list {
                let mut v = prefix.clone();
                v.push(p);
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

fn combine(
    a: Vec<Piece>,
    b: Vec<Piece>,
    f: impl Fn(&Affine, &Affine) -> Option<Affine>,
) -> Option<Vec<Piece>> {
    let mut out = Vec::new();
    for p in &a {
        for q in &b {
            let mut cs = p.constraints.clone();
            cs.extend(q.constraints.iter().cloned());
            out.push(Piece { constraints: cs, value: Some(f(p.value.as_ref()?, q.value.as_ref()?)?) });
        }
    }
    Some(out)
}

/// `coeffs . x + constant`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
}

impl Affine {
    pub fn constant(n: usize, c: Rational) -> Self {
        Affine { coeffs: alloc::vec![Rational::zero(); n], constant: c }
    }

    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut a = Affine::constant(n, Rational::zero());
        a.coeffs[i] = Rational::one();
        a
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Affine) -> Affine {
        Affine {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
            constant: &self.constant + &o.constant,
        }
    }

    pub fn sub(&self, o: &Affine) -> Affine {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> Affine {
        Affine { coeffs: self.coeffs.iter().map(|a| a * k).collect(), constant: &self.constant * k }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().zip(x).fold(self.constant.clone(), |acc, (a, v)| acc + a * v)
    }

    /// Substitutes `x = base + matrix * j`, where `matrix[k]` is the k-th column.
    pub fn substitute(&self, base: &[Rational], columns: &[Vec<Rational>]) -> Affine {
        let constant = self.eval(base);
        let coeffs = columns
            .iter()
            .map(|col| self.coeffs.iter().zip(col).fold(Rational::zero(), |acc, (a, c)| acc + a * c))
            .collect();
        Affine { coeffs, constant }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Lt,
    Eq,
}

/// `form rel 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub form: Affine,
    pub rel: Rel,
}

impl Constraint {
    pub fn holds(&self, x: &[Rational]) -> bool {
        let v = self.form.eval(x);
        match self.rel {
            Rel::Le => !v.is_positive(),
            Rel::Lt => v.is_negative(),
            Rel::Eq => v.is_zero(),
        }
    }
}

/// A region cut out by constraints on which the expression is affine (or `+inf`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub constraints: Vec<Constraint>,
    pub value: Option<Affine>,
}

impl Piece {
    fn plain(value: Affine) -> Self {
        Piece { constraints: Vec::new(), value: Some(value) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eventual {
    pub tail: Option<Poly>,
    pub threshold: BigInt,
}

impl Eventual {
    fn poly(p: Poly) -> Self {
        Eventual { tail: Some(p), threshold: BigInt::zero() }
    }

    fn zip(self, other: Eventual, f: impl Fn(&Poly, &Poly) -> Poly) -> Eventual {
        let threshold = self.threshold.max(other.threshold);
        let tail = match (self.tail, other.tail) {
            (Some(p), Some(q)) => Some(f(&p, &q)),
            _ => None,
        };
        Eventual { tail, threshold }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.max_var().map_or(0, |m| m + 1)).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.render(&names))
    }
}

impl Expr {
    fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Const(_) | Expr::Inf => None,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.max_var().max(b.max_var()),
            Expr::Neg(a) | Expr::Abs(a) => a.max_var(),
            Expr::Min(v) | Expr::Max(v) => v.iter().filter_map(Expr::max_var).max(),
            Expr::Case(arms, o) => arms
                .iter()
                .flat_map(|(g, e)| {
                    g.0.iter()
                        .flat_map(|a| [a.lhs.max_var(), a.rhs.max_var()])
                        .chain(core::iter::once(e.max_var()))
                })
                .chain(core::iter::once(o.max_var()))
                .flatten()
                .max(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn pt(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&k| q(k)).collect()
    }

    // case { x1 == 0 => abs(x0); else => -abs(x0) }
    fn sample() -> Expr {
        Expr::case(
            alloc::vec![(Guard(alloc::vec![atom(var(1), CmpOp::Eq, int(0))]), var(0).abs())],
            var(0).abs().negate(),
        )
    }

    #[test]
    fn evaluation() {
        let e = sample();
        assert_eq!(e.eval(&pt(&[3, 0])), Some(q(3)));
        assert_eq!(e.eval(&pt(&[-4, 1])), Some(q(-4)));
        let m = Expr::Min(alloc::vec![var(0), int(2), var(1).mul(int(3))]);
        assert_eq!(m.eval(&pt(&[5, 0])), Some(q(0)));
    }

    #[test]
    fn inf_position() {
        assert!(Expr::case(alloc::vec![], Expr::Inf).validate(1).is_ok());
        assert!(Expr::Inf.add(int(1)).validate(1).is_err());
        assert!(var(3).validate(2).is_err());
    }

    #[test]
    fn pieces_agree_with_eval() {
        let exprs = [
            sample(),
            Expr::Max(alloc::vec![var(0).add(var(1)), var(0).sub(var(1)), var(1).negate()]),
            Expr::case(
                alloc::vec![(
                    Guard(alloc::vec![atom(var(0), CmpOp::Ne, int(1)), atom(var(1).abs(), CmpOp::Ge, int(2))]),
                    Expr::Inf,
                )],
                var(0).sub(var(1).mul(int(2))),
            ),
        ];
        for e in &exprs {
            let pieces = e.pieces(2).unwrap();
            for a in -4..=4 {
                for b in -4..=4 {
                    let x = pt(&[a, b]);
                    let direct = e.eval(&x);
                    let mut hit = false;
                    for p in &pieces {
                        if p.constraints.iter().all(|c| c.holds(&x)) {
                            hit = true;
                            assert_eq!(p.value.as_ref().map(|v| v.eval(&x)), direct, "{e} at {a},{b}");
                        }
                    }
                    assert!(hit, "{e} not covered at {a},{b}");
                }
            }
        }
    }

    #[test]
    fn products_are_not_affine() {
        let e = var(0).mul(var(1));
        assert!(e.pieces(2).is_none());
        assert!(var(0).mul(int(3)).pieces(2).is_some());
    }

    #[test]
    fn specialize_resolves_guards() {
        let e = sample().specialize(&[None, Some(q(0))]);
        assert_eq!(e, var(0).abs());
        let e = sample().specialize(&[Some(q(-2)), Some(q(1))]);
        assert_eq!(e, int(-2));
    }

    #[test]
    fn eventual_matches_eval() {
        let quad = Expr::case(
            alloc::vec![(Guard(alloc::vec![atom(var(0).add(var(1).mul(var(1))), CmpOp::Ge, int(0))]), var(0).add(var(1)))],
            Expr::Inf,
        );
        let exprs = [sample(), quad, Expr::Min(alloc::vec![var(0).abs().sub(int(7)), var(1).mul(int(2))])];
        let bases = [pt(&[3, 0]), pt(&[-5, 2]), pt(&[0, 1])];
        let steps = [pt(&[-1, 0]), pt(&[1, 0]), pt(&[-2, 1])];
        for e in &exprs {
            for b in &bases {
                for s in &steps {
                    let ev = e.eventual(b, s);
                    for extra in 0..40i64 {
                        let j = Rational::from_integer(ev.threshold.clone()) + q(extra);
                        let x: Vec<Rational> = b.iter().zip(s).map(|(bi, si)| bi + si * &j).collect();
                        assert_eq!(ev.tail.as_ref().map(|p| p.eval(&j)), e.eval(&x));
                    }
                }
            }
        }
    }

    #[test]
    fn rendering() {
        let names: Vec<String> = ["T".into(), "Z".into()].into();
        assert_eq!(sample().render(&names), "case { Z == 0 => abs(T); else => -abs(T) }");
        let e = var(0).sub(var(1).sub(int(1))).mul(int(-2));
        assert_eq!(e.render(&names), "(T - (Z - 1)) * (-2)");
    }
}
