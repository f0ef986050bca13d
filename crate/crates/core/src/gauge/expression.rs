use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Evaluation, Gauge, GaugeVerdict};
use crate::error::{Error, Result};
use crate::expr::{Expr, Rel};
use crate::ext::ExtInt;
use crate::ilp::{solve_ilp, IlpOutcome, LinearProgram};
use crate::monomial::ExponentVector;
use crate::poly::Poly;
use crate::signature::Signature;
use crate::Rational;

/// Longest stretch of a ray evaluated point by point before giving up on exactness.
const SCAN_LIMIT: u64 = 200_000;

/// A gauge given by one expression per nilpotent stratum; the value is the
/// ceiling of the expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpressionGauge {
    sig: Arc<Signature>,
    strata: Vec<(Vec<u32>, Expr)>,
    default: Option<Expr>,
}

impl ExpressionGauge {
    /// `strata` maps the exponents of the nilpotent variables (in declaration
    /// order) to the expression used there; other strata use `default`, or are
    /// unsupported when it is absent.
    pub fn new(sig: Arc<Signature>, strata: Vec<(Vec<u32>, Expr)>, default: Option<Expr>) -> Result<Self> {
        let nil = sig.nilpotent_indices();
        for (i, (key, e)) in strata.iter().enumerate() {
            if key.len() != nil.len() {
                return Err(Error::Definition(format!(
                    "stratum key has {} entries, ring has {} nilpotent variables",
                    key.len(),
                    nil.len()
                )));
            }
            for (&k, &v) in key.iter().zip(&nil) {
                if k >= sig.vars()[v].nilpotency_cap.unwrap_or(0) {
                    return Err(Error::Definition(format!("stratum exponent {k} reaches the cap")));
                }
            }
            if strata[..i].iter().any(|(other, _)| other == key) {
                return Err(Error::Definition("stratum listed twice".into()));
            }
            e.validate(sig.len())?;
        }
        if let Some(d) = &default {
            d.validate(sig.len())?;
        }
        Ok(ExpressionGauge { sig, strata, default })
    }

    /// The same expression on every stratum.
    pub fn formula(sig: Arc<Signature>, expr: Expr) -> Result<Self> {
        ExpressionGauge::new(sig, Vec::new(), Some(expr))
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn strata(&self) -> &[(Vec<u32>, Expr)] {
        &self.strata
    }

    pub fn default_expr(&self) -> Option<&Expr> {
        self.default.as_ref()
    }

    pub fn stratum_key(&self, e: &ExponentVector) -> Vec<u32> {
        self.sig
            .nilpotent_indices()
            .into_iter()
            .map(|i| e.get(i).to_integer().to_u32().unwrap_or(u32::MAX))
            .collect()
    }

    pub fn expression_for(&self, e: &ExponentVector) -> Option<&Expr> {
        let key = self.stratum_key(e);
        self.strata.iter().find(|(k, _)| *k == key).map(|(_, x)| x).or(self.default.as_ref())
    }

    pub fn value(&self, e: &ExponentVector) -> ExtInt {
        match self.expression_for(e).and_then(|x| x.eval(e.entries())) {
            Some(v) => ExtInt::Finite(v.ceil().to_integer()),
            None => ExtInt::PosInf,
        }
    }

    pub(crate) fn explain(&self, e: &ExponentVector, _horizon: u32) -> Result<Evaluation> {
        self.sig.check(e)?;
        Ok(Evaluation::plain(match self.value(e) {
            ExtInt::Finite(v) => GaugeVerdict::Exact(v),
            _ => GaugeVerdict::PlusInf,
        }))
    }
}

impl Gauge for ExpressionGauge {
    fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    fn explain(&self, e: &ExponentVector, horizon: u32) -> Result<Evaluation> {
        ExpressionGauge::explain(self, e, horizon)
    }
}

fn ceil_int(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

fn point_on(base: &[Rational], step: &[Rational], j: &BigInt) -> Vec<Rational> {
    let j = Rational::from_integer(j.clone());
    base.iter().zip(step).map(|(b, s)| b + s * &j).collect()
}

pub(crate) enum RayMin {
    Min { value: BigInt, j: BigInt },
    /// `+inf` along the whole ray.
    Empty,
    /// The expression equals `tail`, which decreases to `-inf`, on `[from, inf)`.
    Unbounded { tail: Poly, from: BigInt },
    TooLong,
}

/// Exact minimum of `ceil(expr(base + j step))` over integers `j >= 0`.
pub(crate) fn ray_minimum(expr: &Expr, base: &[Rational], step: &[Rational]) -> RayMin {
    let ev = expr.eventual(base, step);
    let (scan_to, tail) = match ev.tail {
        None => (ev.threshold.clone(), None),
        Some(p) => {
            let d = p.derivative();
            let from = ev.threshold.clone().max(d.sign_threshold());
            if p.degree() >= 1 && p.leading().is_negative() {
                return RayMin::Unbounded { tail: p, from };
            }
            // nondecreasing from `from` on, so the minimum is attained by `from`
            (from.clone() + BigInt::one(), Some(p))
        }
    };
    let Some(limit) = scan_to.to_u64() else { return RayMin::TooLong };
    if limit > SCAN_LIMIT {
        return RayMin::TooLong;
    }
    let mut best: Option<(BigInt, BigInt)> = None;
    for j in 0..limit {
        let j = BigInt::from(j);
        if let Some(v) = expr.eval(&point_on(base, step, &j)) {
            let v = ceil_int(&v);
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, j));
            }
        }
    }
    let _ = tail;
    match best {
        Some((value, j)) => RayMin::Min { value, j },
        None => RayMin::Empty,
    }
}

/// Smallest `j >= from` with `ceil(tail(j)) <= target`, for a tail decreasing on `[from, inf)`.
pub(crate) fn descent_point(tail: &Poly, from: &BigInt, target: &BigInt) -> BigInt {
    let ok = |j: &BigInt| ceil_int(&tail.eval(&Rational::from_integer(j.clone()))) <= *target;
    if ok(from) {
        return from.clone();
    }
    let mut step = BigInt::one();
    let mut lo = from.clone();
    let mut hi = from + &step;
    while !ok(&hi) {
        lo = hi.clone();
        step *= 2;
        hi = from + &step;
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2;
        if ok(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub(crate) enum AffineMin {
    Min { value: Rational, point: Vec<BigInt> },
    Empty,
    /// An integer point and an integer direction along which the value decreases without bound.
    Unbounded { point: Vec<BigInt>, ray: Vec<BigInt>, objective: Vec<Rational>, offset: Rational },
    Undecided { best: Option<(Rational, Vec<BigInt>)> },
}

fn lcm_of_denominators<'a>(xs: impl Iterator<Item = &'a Rational>) -> BigInt {
    xs.fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Exact minimum of `expr(base + sum_k j_k columns[k])` over integer `j >= 0`,
/// or `None` when the expression is not piecewise affine.
pub(crate) fn affine_minimum(
    expr: &Expr,
    nvars: usize,
    base: &[Rational],
    columns: &[Vec<Rational>],
    node_limit: usize,
) -> Option<AffineMin> {
    let pieces = expr.pieces(nvars)?;
    let k = columns.len();
    let mut best: Option<(Rational, Vec<BigInt>)> = None;
    let mut undecided = false;
    'pieces: for piece in pieces {
        let Some(value) = &piece.value else { continue };
        let obj = value.substitute(base, columns);
        let mut lp = LinearProgram::new(k, obj.coeffs.clone());
        for c in &piece.constraints {
            let form = c.form.substitute(base, columns);
            if form.is_constant() {
                let holds = match c.rel {
                    Rel::Le => !form.constant.is_positive(),
                    Rel::Lt => form.constant.is_negative(),
                    Rel::Eq => form.constant.is_zero(),
                };
                if holds {
                    continue;
                }
                continue 'pieces;
            }
            match c.rel {
                Rel::Le => lp.push_le(form.coeffs.clone(), -form.constant.clone()),
                Rel::Lt => {
                    let l = Rational::from_integer(lcm_of_denominators(
                        form.coeffs.iter().chain(core::iter::once(&form.constant)),
                    ));
                    let a: Vec<Rational> = form.coeffs.iter().map(|x| x * &l).collect();
                    lp.push_le(a, -(&form.constant * &l) - Rational::one());
                }
                Rel::Eq => {
                    lp.push_le(form.coeffs.clone(), -form.constant.clone());
                    lp.push_le(form.coeffs.iter().map(|x| -x).collect(), form.constant.clone());
                }
            }
        }
        match solve_ilp(&lp, node_limit) {
            IlpOutcome::Infeasible => {}
            IlpOutcome::Optimal { point, value } => {
                let v = value + &obj.constant;
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, point));
                }
            }
            IlpOutcome::Unbounded { point, ray } => {
                return Some(AffineMin::Unbounded { point, ray, objective: obj.coeffs, offset: obj.constant });
            }
            IlpOutcome::Undecided { best: found } => {
                undecided = true;
                if let Some((point, value)) = found {
                    let v = value + &obj.constant;
                    if best.as_ref().is_none_or(|(b, _)| v < *b) {
                        best = Some((v, point));
                    }
                }
            }
        }
    }
    Some(match (best, undecided) {
        (best, true) => AffineMin::Undecided { best },
        (Some((value, point)), false) => AffineMin::Min { value, point },
        (None, false) => AffineMin::Empty,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{atom, int, var, CmpOp, Guard};
    use crate::signature::VarDecl;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn strata_and_support() {
        let sig = Arc::new(Signature::new(2, alloc::vec![VarDecl::invertible("T"), VarDecl::nilpotent("Z", 2)]).unwrap());
        let g = ExpressionGauge::new(
            sig.clone(),
            alloc::vec![(alloc::vec![0], var(0).abs()), (alloc::vec![1], var(0).abs().negate())],
            None,
        )
        .unwrap();
        assert_eq!(g.value(&sig.monomial(&[("T", 3)]).unwrap()), ExtInt::int(3));
        assert_eq!(g.value(&sig.monomial(&[("T", -5), ("Z", 1)]).unwrap()), ExtInt::int(-5));
        assert!(ExpressionGauge::new(sig, alloc::vec![(alloc::vec![2], int(0))], None).is_err());
    }

    #[test]
    fn ray_on_quadratic_support() {
        // a + b on a >= -b^2, along a -> a - j at b = 2
        let e = Expr::case(
            alloc::vec![(Guard(alloc::vec![atom(var(0).add(var(1).mul(var(1))), CmpOp::Ge, int(0))]), var(0).add(var(1)))],
            Expr::Inf,
        );
        match ray_minimum(&e, &[q(0), q(2)], &[q(-1), q(0)]) {
            RayMin::Min { value, j } => {
                assert_eq!(value, BigInt::from(-2));
                assert_eq!(j, BigInt::from(4));
            }
            _ => panic!("expected a minimum"),
        }
    }

    #[test]
    fn ray_descent() {
        let e = var(0).abs().negate();
        match ray_minimum(&e, &[q(0)], &[q(1)]) {
            RayMin::Unbounded { tail, from } => {
                let j = descent_point(&tail, &from, &BigInt::from(-17));
                assert_eq!(j, BigInt::from(17));
            }
            _ => panic!("expected descent"),
        }
    }

    #[test]
    fn affine_two_directions() {
        // max(x + y, x - y) shifted by j0 * (-1, 0) and j1 * (0, -1), starting at (3, 1)
        let e = Expr::Max(alloc::vec![var(0).add(var(1)), var(0).sub(var(1))]);
        let cols = alloc::vec![alloc::vec![q(-1), q(0)], alloc::vec![q(0), q(-1)]];
        match affine_minimum(&e, 2, &[q(3), q(1)], &cols, 1000).unwrap() {
            AffineMin::Unbounded { .. } => {}
            _ => panic!("expected unbounded"),
        }
        let bounded = Expr::Max(alloc::vec![var(0).add(var(1)), int(-4)]);
        match affine_minimum(&bounded, 2, &[q(3), q(1)], &cols, 1000).unwrap() {
            AffineMin::Min { value, .. } => assert_eq!(value, q(-4)),
            _ => panic!("expected a minimum"),
        }
    }
}
