use num_bigint::BigInt;

use sheafcheck_core::cech::{locally_zero_sections, strictness_check, Strictness};
use sheafcheck_core::gallery::{
    build_example, build_sequences, ex43_oracle, ex43_ring, standard_window, verify_criterion, verify_proposition, ExampleId,
    Status, VerifyParams,
};
use sheafcheck_core::gauge::{Gauge, GaugeVerdict};
use sheafcheck_core::topology::subadditivity;
use sheafcheck_core::window::Window;
use sheafcheck_core::ExponentVector;

fn params() -> VerifyParams {
    VerifyParams::default()
}

#[test]
fn every_example_verifies() {
    for id in ExampleId::ALL {
        let report = verify_proposition(id, &params()).unwrap();
        let bad: Vec<_> = report.checks.iter().filter(|c| c.status != Status::Pass).collect();
        assert!(bad.is_empty(), "{id}: {bad:?}");
        assert!(report.checks.len() >= 3, "{id}");
    }
}

#[test]
fn line_example_reports_z() {
    let report = verify_criterion(1, &params()).unwrap();
    let lz = report.checks.iter().find(|c| c.name == "locally_zero").unwrap();
    assert_eq!(lz.status, Status::Pass);
    assert!(lz.details.iter().any(|(k, v)| k == "witness" && v == "Z"), "{:?}", lz.details);
}

#[test]
fn sequences_satisfy_bounds() {
    for k in 1..=6 {
        let s = build_sequences(k);
        assert_eq!(s.len(), k);
        assert!(s.satisfies_bounds(), "k = {k}");
        assert_eq!(s.a[0], BigInt::from(1));
    }
}

#[test]
fn subadditivity_on_wide_windows() {
    for id in ExampleId::ALL {
        let ex = build_example(id, &params()).unwrap();
        let window = match id {
            ExampleId::Ex44 => Window::new(4).with_degree(2),
            ExampleId::Ex46 => Window::new(4),
            _ => Window::new(5),
        };
        let r = subadditivity(ex.ring.gauge(), &window, 24).unwrap();
        assert!(r.violations.is_empty(), "{id}: {:?}", r.violations.first());
        assert!(r.pairs > 0, "{id}");
    }
}

#[test]
fn locally_zero_sections_break_strictness() {
    for id in ExampleId::ALL {
        let ex = build_example(id, &params()).unwrap();
        let tr = ex.triple().unwrap();
        let window = standard_window(id, 2);
        let zeros = locally_zero_sections(&tr, &window, 24).unwrap();
        let strict = strictness_check(&tr, &window, 24, &[]).unwrap();
        if !zeros.is_empty() {
            assert!(!matches!(strict, Strictness::Holds { .. }), "{id}");
        }
        if let Strictness::Holds { .. } = strict {
            assert!(zeros.is_empty(), "{id}");
        }
    }
}

#[test]
fn powers_of_z_escape_the_ring() {
    let seq = build_sequences(3);
    let ring = ex43_ring(2, &seq, 3).unwrap();
    for e in 1..=4u32 {
        let z = ExponentVector::from_ints(&[0, i64::from(e)]);
        let v = ring.gauge().evaluate(&z, 24).unwrap();
        let want = ex43_oracle(&seq, 3, &BigInt::from(0), e);
        assert_eq!(v, GaugeVerdict::Exact(want.clone()));
        assert!(want > -BigInt::from(e * e + 1), "e = {e}");
    }
}

#[test]
fn reports_are_deterministic() {
    let a = verify_criterion(8, &params()).unwrap();
    let b = verify_criterion(8, &params()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn criteria_out_of_range_are_rejected() {
    assert!(verify_criterion(0, &params()).is_err());
    assert!(verify_criterion(9, &params()).is_err());
}
