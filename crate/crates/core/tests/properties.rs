use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use sheafcheck_core::cech::{build_triple, cech_sequence_check, delta, epsilon, split, TruncatedElement};
use sheafcheck_core::coeff::prime_power;
use sheafcheck_core::expr::{atom, int, var, CmpOp, Expr, Guard};
use sheafcheck_core::element::homogeneous_components;
use sheafcheck_core::gallery::{ex41_ring, ex43_oracle, ex43_ring, ex45_ring, ex46_ring, build_sequences};
use sheafcheck_core::gauge::{
    gauge_intersection, membership, Direction, ExpressionGauge, Gauge, GaugeSpec, GaugeVerdict, Membership,
};
use sheafcheck_core::topology::{power_bounded, TateRingDesc};
use sheafcheck_core::window::Window;
use sheafcheck_core::{padic_valuation, ExponentVector, Grading, Rational, RingElement, Signature};

const H: u32 = 24;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (-60i64..=60, 1i64..=24).prop_filter_map("nonzero", |(n, d)| (n != 0).then(|| rat(n, d)))
}

fn element(sig: Arc<Signature>) -> impl Strategy<Value = RingElement> {
    prop::collection::vec((-3i64..=3, 0i64..=1, -3i64..=3, prop::sample::select(vec![1i64, -1, 3, -3, 5])), 0..=4)
        .prop_map(move |terms| {
            let p = sig.prime();
            let terms = terms
                .into_iter()
                .map(|(a, b, v, u)| (ExponentVector::from_ints(&[a, b]), prime_power(p, v) * Rational::from_integer(u.into())));
            RingElement::from_terms(sig.clone(), terms).unwrap()
        })
}

fn ex41_sig() -> Arc<Signature> {
    ex41_ring(2).unwrap().signature().clone()
}

fn ex46_point() -> impl Strategy<Value = ExponentVector> {
    (-3i64..=3, -3i64..=3, -3i64..=3, 0i64..=2).prop_map(|(p, q, t, z)| ExponentVector::from_ints(&[p, q, t, z]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn valuation_is_additive_and_ultrametric(a in nonzero_rational(), b in nonzero_rational()) {
        let va = padic_valuation(&a, 2).unwrap();
        let vb = padic_valuation(&b, 2).unwrap();
        prop_assert_eq!(padic_valuation(&(&a * &b), 2).unwrap(), va + vb);
        match padic_valuation(&(&a + &b), 2) {
            Some(v) => prop_assert!(v >= va.min(vb)),
            None => prop_assert_eq!(&a, &-b.clone()),
        }
        prop_assert_eq!(padic_valuation(&Rational::zero(), 2), None);
    }

    #[test]
    fn ring_axioms(x in element(ex41_sig()), y in element(ex41_sig()), z in element(ex41_sig())) {
        prop_assert_eq!(x.checked_add(&y).unwrap(), y.checked_add(&x).unwrap());
        prop_assert_eq!(x.checked_mul(&y).unwrap(), y.checked_mul(&x).unwrap());
        prop_assert_eq!(
            x.checked_mul(&y).unwrap().checked_mul(&z).unwrap(),
            x.checked_mul(&y.checked_mul(&z).unwrap()).unwrap()
        );
        prop_assert_eq!(
            x.checked_mul(&y.checked_add(&z).unwrap()).unwrap(),
            x.checked_mul(&y).unwrap().checked_add(&x.checked_mul(&z).unwrap()).unwrap()
        );
        prop_assert!(x.checked_sub(&x).unwrap().is_zero());
        let one = RingElement::one(x.signature_arc().clone());
        prop_assert_eq!(x.checked_mul(&one).unwrap(), x.clone());
    }

    #[test]
    fn sums_are_ultrametric_per_term(x in element(ex41_sig()), y in element(ex41_sig())) {
        let s = x.checked_add(&y).unwrap();
        for (e, c) in s.terms() {
            let v = padic_valuation(c, 2).unwrap();
            let floor = [x.coefficient(e).valuation(), y.coefficient(e).valuation()].into_iter().flatten().min().unwrap();
            prop_assert!(v >= floor);
        }
    }

    #[test]
    fn pow_is_repeated_mul(x in element(ex41_sig()), n in 0u32..=4) {
        let mut acc = RingElement::one(x.signature_arc().clone());
        for _ in 0..n {
            acc = acc.checked_mul(&x).unwrap();
        }
        prop_assert_eq!(x.pow(n), acc);
    }

    #[test]
    fn homogeneous_components_partition(x in element(ex41_sig())) {
        let g = Grading::canonical(2);
        let parts = homogeneous_components(&x, &g);
        let mut sum = RingElement::zero(x.signature_arc().clone());
        for (w, part) in &parts {
            for (e, _) in part.terms() {
                prop_assert_eq!(&g.weight_of(e), w);
            }
            sum = sum.checked_add(part).unwrap();
        }
        prop_assert_eq!(sum, x);
    }

    #[test]
    fn membership_is_monotone(x in element(ex41_sig()), n in -4i64..=4) {
        let ring = ex41_ring(2).unwrap();
        if membership(&x, ring.gauge(), n, H).unwrap() == Membership::Yes {
            prop_assert_eq!(membership(&x, ring.gauge(), n - 1, H).unwrap(), Membership::Yes);
        }
        if membership(&x, ring.gauge(), n, H).unwrap() == Membership::No {
            prop_assert_eq!(membership(&x, ring.gauge(), n + 1, H).unwrap(), Membership::No);
        }
    }

    #[test]
    fn truncation_consistency(x in element(ex41_sig()), n in -3i64..=4, extra in 0i64..=4) {
        let ring = ex41_ring(2).unwrap();
        let g = ring.gauge();
        let big_n = n + extra;
        let tx = TruncatedElement::new(&x, big_n, g, H).unwrap();
        prop_assert_eq!(membership(&x, g, n, H).unwrap(), membership(tx.representative(), g, n, H).unwrap());
        let rest = x.checked_sub(tx.representative()).unwrap();
        prop_assert_eq!(membership(&rest, g, big_n, H).unwrap(), Membership::Yes);
        let again = TruncatedElement::new(tx.representative(), big_n, g, H).unwrap();
        prop_assert_eq!(again.representative(), tx.representative());
        prop_assert_eq!(tx.is_zero(H).unwrap(), membership(&x, g, big_n, H).unwrap());
    }

    #[test]
    fn cech_algebra(x in element(ex41_sig()), y in element(ex41_sig())) {
        let ring = ex41_ring(2).unwrap();
        let tr = build_triple(&ring, &ring.signature().monomial(&[("T", 1)]).unwrap()).unwrap();
        let (a, b) = epsilon(&x);
        prop_assert!(delta(&a, &b).unwrap().is_zero());
        let (a, b) = split(&y);
        prop_assert_eq!(delta(&a, &b).unwrap(), y);
        let r = cech_sequence_check(&tr, &x, 1, H).unwrap();
        prop_assert!(r.composite_zero && r.split_identity);
    }

    #[test]
    fn intersection_membership(x in element(ex41_sig()), n in -3i64..=3) {
        let ring = ex41_ring(2).unwrap();
        let tr = build_triple(&ring, &ring.signature().monomial(&[("T", 1)]).unwrap()).unwrap();
        let s = gauge_intersection(tr.gauge_a(), tr.gauge_b()).unwrap();
        let both = membership(&x, tr.gauge_a(), n, H).unwrap().and(membership(&x, tr.gauge_b(), n, H).unwrap());
        let inter = membership(&x, &s, n, H).unwrap();
        if both != Membership::Inconclusive && inter != Membership::Inconclusive {
            prop_assert_eq!(inter, both);
        }
    }

    #[test]
    fn derived_is_below_base(e in ex46_point()) {
        let ring = ex46_ring(2).unwrap();
        let sig = ring.signature().clone();
        let derived = ring.gauge().adjoin(vec![(sig.monomial(&[("P", 1)]).unwrap(), Direction::Nonneg)]).unwrap();
        let base = ring.gauge().evaluate(&e, H).unwrap().upper();
        prop_assert!(derived.evaluate(&e, H).unwrap().upper() <= base);
    }

    #[test]
    fn adjunction_order_does_not_matter(e in ex46_point(), order in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
        let ring = ex46_ring(2).unwrap();
        let sig = ring.signature().clone();
        let steps = [
            (sig.monomial(&[("P", 1)]).unwrap(), Direction::Nonneg),
            (sig.monomial(&[("Q", 1)]).unwrap(), Direction::Nonneg),
            (sig.monomial(&[("T", -1)]).unwrap(), Direction::Nonpos),
            (sig.monomial(&[("T", 1)]).unwrap(), Direction::Nonpos),
        ];
        let one_shot = ring.gauge().adjoin(steps.to_vec()).unwrap();
        let mut stepwise = ring.gauge().clone();
        for &i in &order {
            stepwise = stepwise.adjoin(vec![steps[i].clone()]).unwrap();
        }
        prop_assert_eq!(one_shot.evaluate(&e, H).unwrap(), stepwise.evaluate(&e, H).unwrap());
    }

    #[test]
    fn rescaling_keeps_power_boundedness(x in element(ex41_sig()), c in 0i64..=3) {
        // O_k + p^c R_0 is a ring of definition for the same topology
        let ring = ex41_ring(2).unwrap();
        let expr = ring.gauge().base().as_expression().unwrap();
        let at_one = Guard(vec![atom(var(0), CmpOp::Eq, int(0)), atom(var(1), CmpOp::Eq, int(0))]);
        let shifted: Vec<_> = expr
            .strata()
            .iter()
            .map(|(k, f)| (k.clone(), Expr::case(vec![(at_one.clone(), int(0))], f.clone().add(int(c)))))
            .collect();
        let moved = TateRingDesc::new(GaugeSpec::Expression(
            ExpressionGauge::new(expr.signature().clone(), shifted, expr.default_expr().cloned()).unwrap(),
        ))
        .unwrap();
        let a = power_bounded(&ring, &x, H).unwrap().as_membership();
        let b = power_bounded(&moved, &x, H).unwrap().as_membership();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn power_boundedness_respects_grading(x in element(ex41_sig())) {
        let ring = ex41_ring(2).unwrap();
        let whole = power_bounded(&ring, &x, H).unwrap().as_membership();
        let parts = homogeneous_components(&x, ring.grading())
            .into_iter()
            .map(|(_, part)| power_bounded(&ring, &part, H).unwrap().as_membership())
            .fold(Membership::Yes, Membership::and);
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn products_of_power_bounded_are_power_bounded(x in element(ex41_sig()), y in element(ex41_sig())) {
        let ring = ex45_ring(2).unwrap();
        let sig = ring.signature().clone();
        let x = RingElement::from_terms(sig.clone(), x.terms().map(|(e, c)| (e.clone(), c.clone()))).unwrap();
        let y = RingElement::from_terms(sig, y.terms().map(|(e, c)| (e.clone(), c.clone()))).unwrap();
        let (Ok(bx), Ok(by)) = (power_bounded(&ring, &x, H), power_bounded(&ring, &y, H)) else {
            return Err(TestCaseError::reject("outside the ring"));
        };
        let (bx, by) = (bx.as_membership(), by.as_membership());
        if bx == Membership::Yes && by == Membership::Yes {
            let xy = x.checked_mul(&y).unwrap();
            prop_assert_ne!(power_bounded(&ring, &xy, H).unwrap().as_membership(), Membership::No);
        }
    }
}

#[test]
fn derived_value_matches_shift_search() {
    let ring = ex46_ring(2).unwrap();
    let sig = ring.signature().clone();
    let p = sig.monomial(&[("P", 1)]).unwrap();
    let q = sig.monomial(&[("Q", 1)]).unwrap();
    let derived = ring.gauge().adjoin(vec![(p.clone(), Direction::Nonneg), (q.clone(), Direction::Nonneg)]).unwrap();
    let search = |e: &ExponentVector, side: i64| {
        let mut best: Option<BigInt> = None;
        for j in 0..=side {
            for k in 0..=side {
                let moved = e.sub(&p.scale_int(j)).sub(&q.scale_int(k));
                if let Some(v) = ring.gauge().evaluate(&moved, H).unwrap().exact().cloned() {
                    if best.as_ref().is_none_or(|b| v < *b) {
                        best = Some(v);
                    }
                }
            }
        }
        best
    };
    let (mut exact, mut unbounded) = (0, 0);
    for e in Window::new(2).points(&sig) {
        let best = search(&e, 12);
        match derived.evaluate(&e, H).unwrap() {
            GaugeVerdict::Exact(v) => {
                assert_eq!(Some(v), best, "at {}", sig.format_monomial(&e));
                exact += 1;
            }
            GaugeVerdict::PlusInf => assert_eq!(best, None),
            GaugeVerdict::MinusInfCertified { .. } => {
                let half = search(&e, 6).unwrap();
                assert!(best.unwrap() <= half - 5, "at {}", sig.format_monomial(&e));
                unbounded += 1;
            }
            other => panic!("unexpected verdict {other} at {}", sig.format_monomial(&e)),
        }
    }
    assert!(exact > 100 && unbounded > 0, "{exact} {unbounded}");
}

#[test]
fn dp_matches_oracle_on_two_level_ring() {
    let seq = build_sequences(2);
    let ring = ex43_ring(2, &seq, 2).unwrap();
    let sig = ring.signature().clone();
    let mut n = 0;
    for e in Window::new(4).points(&sig) {
        let t = e.get(0).to_integer();
        let z = e.get(1).to_integer();
        let want = ex43_oracle(&seq, 2, &t, u32::try_from(z).unwrap());
        assert_eq!(ring.gauge().evaluate(&e, H).unwrap(), GaugeVerdict::Exact(want), "at {}", sig.format_monomial(&e));
        n += 1;
    }
    assert_eq!(n, 45);
}

#[test]
fn unit_shift_values() {
    let ring = ex41_ring(2).unwrap();
    let sig = ring.signature().clone();
    for k in -5i64..=5 {
        let t = sig.monomial(&[("T", k)]).unwrap();
        let tz = sig.monomial(&[("T", k), ("Z", 1)]).unwrap();
        assert_eq!(ring.gauge().evaluate(&t, H).unwrap(), GaugeVerdict::Exact(BigInt::from(k.abs())));
        assert_eq!(ring.gauge().evaluate(&tz, H).unwrap(), GaugeVerdict::Exact(BigInt::from(-k.abs())));
    }
}
