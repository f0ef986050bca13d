//! `CHECK` lines, the `SUMMARY` trailer and exit codes.

use std::fmt::Write as _;

use sheafcheck_core::gallery::{Check, Status};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

fn quote(v: &str) -> String {
    if !v.is_empty() && !v.contains(|c: char| c.is_whitespace() || c == '"' || c == '=') {
        return v.to_string();
    }
    let mut out = String::from("\"");
    for c in v.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

pub fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Inconclusive => "INCONCLUSIVE",
    }
}

/// A sequence of checks printed under a header that echoes the parameters.
#[derive(Default)]
pub struct Output {
    header: Vec<(String, String)>,
    checks: Vec<Check>,
}

impl Output {
    pub fn new(command: &str) -> Self {
        Output { header: vec![("command".into(), command.into())], checks: Vec::new() }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.header.push((key.into(), value.to_string()));
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn status(&self) -> Status {
        self.checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }

    pub fn exit_code(&self) -> u8 {
        match self.status() {
            Status::Pass => EXIT_PASS,
            Status::Fail => EXIT_FAIL,
            Status::Inconclusive => EXIT_INCONCLUSIVE,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::from("RUN");
        for (k, v) in &self.header {
            let _ = write!(out, " {k}={}", quote(v));
        }
        out.push('\n');
        for c in &self.checks {
            let _ = write!(out, "CHECK {} {}", c.name, status_word(c.status));
            for (k, v) in &c.details {
                let _ = write!(out, " {k}={}", quote(v));
            }
            out.push('\n');
        }
        let count = |s: Status| self.checks.iter().filter(|c| c.status == s).count();
        let _ = writeln!(
            out,
            "SUMMARY pass={} fail={} inconclusive={} status={}",
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Inconclusive),
            status_word(self.status())
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoting() {
        assert_eq!(quote("Z"), "Z");
        assert_eq!(quote("T^-3 Z"), "\"T^-3 Z\"");
        assert_eq!(quote(""), "\"\"");
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
    }

    #[test]
    fn exit_codes_follow_worst_status() {
        let mut o = Output::new("x");
        assert_eq!(o.exit_code(), EXIT_PASS);
        o.push(Check::new("a", Status::Inconclusive));
        assert_eq!(o.exit_code(), EXIT_INCONCLUSIVE);
        o.push(Check::new("b", Status::Fail));
        assert_eq!(o.exit_code(), EXIT_FAIL);
        assert!(o.render().ends_with("SUMMARY pass=0 fail=1 inconclusive=1 status=FAIL\n"));
    }
}
