use std::path::Path;
use std::process::{Command, Output};

use num_bigint::BigInt;
use sheafcheck_cli::parse_ring;
use sheafcheck_core::gallery::{build_example, build_sequences, ex43_oracle, ExampleId, VerifyParams};

fn sheafcheck(args: &[&str]) -> (i32, String, String) {
    let Output { status, stdout, stderr } = Command::new(env!("CARGO_BIN_EXE_sheafcheck")).args(args).output().unwrap();
    (status.code().unwrap(), String::from_utf8(stdout).unwrap(), String::from_utf8(stderr).unwrap())
}

fn field<'a>(out: &'a str, check: &str, key: &str) -> &'a str {
    let line = out.lines().find(|l| l.starts_with(&format!("CHECK {check} "))).unwrap();
    let start = line.find(&format!(" {key}=")).unwrap() + key.len() + 2;
    let rest = &line[start..];
    if let Some(q) = rest.strip_prefix('"') {
        &q[..q.find('"').unwrap()]
    } else {
        rest.split(' ').next().unwrap()
    }
}

#[test]
fn verify_line_example() {
    let (code, out, _) = sheafcheck(&["verify", "--example", "ex41"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("CHECK locally_zero PASS witness=Z"), "{out}");
    assert!(out.starts_with("RUN command=verify horizon=24 precision=12"));
    assert!(out.ends_with("status=PASS\n"));
}

#[test]
fn flat_laurent_is_strict() {
    let (code, out, _) = sheafcheck(&["strict", "flat_laurent", "--t", "T"]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict=holds n=0"), "{out}");
}

#[test]
fn generator_gauge_matches_oracle() {
    let (code, out, _) = sheafcheck(&["gauge", "ex43", "Z^2", "--horizon", "6"]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "gauge", "verdict"), "exact");
    let want = ex43_oracle(&build_sequences(3), 3, &BigInt::from(0), 2);
    assert_eq!(field(&out, "gauge", "value"), want.to_string());
    assert!(field(&out, "gauge", "combination").contains("[T Z]"), "{out}");
    assert!(out.contains("horizon=6"));
}

#[test]
fn exit_codes() {
    assert_eq!(sheafcheck(&["member", "ex41", "pi^-1 Z"]).0, 1);
    assert_eq!(sheafcheck(&["member", "ex41", "pi Z", "--power", "-2"]).0, 0);
    assert_eq!(sheafcheck(&["uniform", "ex41"]).0, 1);
    assert_eq!(sheafcheck(&["powerbounded", "ex43", "pi^-3 Z", "--horizon", "2"]).0, 2);
    assert_eq!(sheafcheck(&["powerbounded", "ex45", "pi^-1 T^-1 Z"]).0, 1);
    let (code, _, err) = sheafcheck(&["frobnicate"]);
    assert_eq!(code, 3);
    assert!(!err.is_empty());
    let (code, _, err) = sheafcheck(&["gauge", "ex41", "Y^2"]);
    assert_eq!(code, 3);
    assert!(err.contains("unknown variable"), "{err}");
    assert_eq!(sheafcheck(&["verify", "--criterion", "9"]).0, 3);
    assert_eq!(sheafcheck(&["--help"]).0, 0);
}

#[test]
fn positive_criteria_commands() {
    let (code, out, err) = sheafcheck(&[
        "alain", "ex41", "--t", "1", "--t", "T", "--a", "1", "--a", "0", "--r", "pi T", "--rel", "1; pi T @ 1 0", "--rel",
        "1; pi T @ 0 1",
    ]);
    assert_eq!(code, 0, "{out}{err}");
    assert_eq!(field(&out, "alain", "exponent"), "2");
    let (code, out, _) = sheafcheck(&["laurent-const", "ex41", "--t", "1", "--a", "1"]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "laurent_constant", "b"), "0");
    let (code, _, err) = sheafcheck(&["alain", "ex41", "--t", "1", "--a", "1", "--r", "T", "--rel", "1; T @ 1"]);
    assert_eq!(code, 3);
    assert!(err.contains("not integral"), "{err}");
}

#[test]
fn local_sections_listed() {
    let (code, out, _) = sheafcheck(&["localzero", "ex41", "--t", "T"]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "locally_zero", "found"), "5");
    assert!(field(&out, "locally_zero", "witnesses").starts_with("Z,"));
    let (_, out, _) = sheafcheck(&["localzero", "flat_laurent"]);
    assert_eq!(field(&out, "locally_zero", "found"), "0");
}

#[test]
fn exported_gallery_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = sheafcheck(&["export", "--all", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    for id in ExampleId::ALL {
        let path = dir.path().join(format!("{}.ring", id.name()));
        let text = std::fs::read_to_string(&path).unwrap();
        let want = build_example(id, &VerifyParams::default()).unwrap().localized_ring().unwrap();
        assert_eq!(parse_ring(&text).unwrap(), want, "{id}");
    }
    let (_, single, _) = sheafcheck(&["export", "ex41"]);
    assert_eq!(parse_ring(&single).unwrap(), build_example(ExampleId::Ex41, &VerifyParams::default()).unwrap().ring);
}

#[test]
fn files_behave_like_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("line.ring");
    assert_eq!(sheafcheck(&["export", "ex41", "--out", path.to_str().unwrap()]).0, 0);
    let file = path.to_str().unwrap();
    for args in [["strict", "--t", "T"], ["localzero", "--t", "T"]] {
        let (c1, o1, _) = sheafcheck(&[args[0], "ex41", args[1], args[2], "--window", "2"]);
        let (c2, o2, _) = sheafcheck(&[args[0], file, args[1], args[2], "--window", "2"]);
        assert_eq!(c1, c2);
        assert_eq!(o1.lines().skip(1).collect::<Vec<_>>(), o2.lines().skip(1).collect::<Vec<_>>());
    }
    let (code, _, err) = sheafcheck(&["strict", file]);
    assert_eq!(code, 3);
    assert!(err.contains("--t"));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn parse_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.ring",
        "[field]\nprime = 2\n[vars]\nT invertible\n[gauge]\nkind = expression\ndefault : case { T >= 0 & => T; else => -T }\n",
    );
    let (code, _, err) = sheafcheck(&["gauge", &bad, "T"]);
    assert_eq!(code, 3);
    assert!(err.contains("line 7, column 27"), "{err}");
    let clash = write(dir.path(), "clash.ring", "[field]\nprime = 2\n[vars]\nZ invertible nilpotent 2\n[gauge]\nkind = expression\ndefault : 0\n");
    let (code, _, err) = sheafcheck(&["gauge", &clash, "1"]);
    assert_eq!(code, 3);
    assert!(err.contains("line 3"), "{err}");
    let field_only = write(dir.path(), "k.ring", "[field]\nprime = 2\n[vars]\n[gauge]\nkind = expression\ndefault : 0\n");
    let (code, out, _) = sheafcheck(&["gauge", &field_only, "1"]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "gauge", "value"), "0");
}

#[test]
fn reports_are_byte_identical() {
    let a = sheafcheck(&["verify", "--criterion", "8"]);
    let b = sheafcheck(&["verify", "--criterion", "8"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
}
