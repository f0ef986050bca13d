//! Tokens and recursive-descent parsers for expressions, monomials and elements.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use sheafcheck_core::coeff::prime_power;
use sheafcheck_core::expr::{Atom, CmpOp, Expr, Guard};
use sheafcheck_core::{ExponentVector, Rational, RingElement, Signature};

use crate::error::ParseError;

/// Words that cannot name a variable.
pub const KEYWORDS: [&str; 8] = ["min", "max", "abs", "case", "else", "inf", "true", "pi"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Num(String),
    Ident(String),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

const SYMBOLS: [&str; 20] =
    ["=>", "==", "<=", ">=", "!=", "<", ">", "+", "-", "*", "/", "^", "(", ")", "{", "}", ",", ";", "&", ":"];

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Token { tok: Tok::Num(text[start..i].into()), col });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(text[start..i].into()), col });
        } else if let Some(s) = SYMBOLS.iter().find(|s| text[i..].starts_with(**s)) {
            out.push(Token { tok: Tok::Sym(s), col });
            i += s.len();
        } else {
            return Err(ParseError::new(line, col, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

/// A token stream over one line of input.
pub struct Cursor<'a> {
    toks: Vec<Token>,
    pos: usize,
    line: usize,
    end_col: usize,
    names: &'a [String],
}

impl<'a> Cursor<'a> {
    /// `col0` is the 1-based column of the first character of `text`.
    pub fn new(text: &str, line: usize, col0: usize, names: &'a [String]) -> Result<Self, ParseError> {
        Ok(Cursor { toks: lex(text, line, col0)?, pos: 0, line, end_col: col0 + text.len(), names })
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), msg)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn peek_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.peek_sym(s);
        if hit {
            self.pos += 1;
        }
        hit
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{s}'")))
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    fn number(&mut self) -> Result<BigInt, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                Ok(BigInt::from_str(&s).expect("digits"))
            }
            _ => Err(self.error("expected a number")),
        }
    }

    /// `n` or `n/d`.
    fn rational(&mut self) -> Result<Rational, ParseError> {
        let n = self.number()?;
        if self.eat_sym("/") {
            let at = self.col();
            let d = self.number()?;
            if d == BigInt::from(0) {
                return Err(ParseError::new(self.line, at, "zero denominator"));
            }
            Ok(Rational::new(n, d))
        } else {
            Ok(Rational::from_integer(n))
        }
    }

    /// An optionally negated rational.
    pub fn signed_rational(&mut self) -> Result<Rational, ParseError> {
        let neg = self.eat_sym("-");
        let q = self.rational()?;
        Ok(if neg { -q } else { q })
    }

    pub fn signed_int(&mut self) -> Result<BigInt, ParseError> {
        let neg = self.eat_sym("-");
        let n = self.number()?;
        Ok(if neg { -n } else { n })
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected a name")),
        }
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.product()?;
        loop {
            if self.eat_sym("+") {
                acc = acc.add(self.product()?);
            } else if self.eat_sym("-") {
                acc = acc.sub(self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        while self.eat_sym("*") {
            acc = acc.mul(self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_sym("-") {
            Ok(self.unary()?.negate())
        } else {
            self.atom()
        }
    }

    fn list(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect_sym("(")?;
        let mut items = vec![self.expr()?];
        while self.eat_sym(",") {
            items.push(self.expr()?);
        }
        self.expect_sym(")")?;
        Ok(items)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(_)) => Ok(Expr::Const(self.rational()?)),
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                let col = self.col();
                self.pos += 1;
                match name.as_str() {
                    "inf" => Ok(Expr::Inf),
                    "min" => Ok(Expr::Min(self.list()?)),
                    "max" => Ok(Expr::Max(self.list()?)),
                    "abs" => {
                        let mut v = self.list()?;
                        if v.len() != 1 {
                            return Err(ParseError::new(self.line, col, "abs takes one argument"));
                        }
                        Ok(v.remove(0).abs())
                    }
                    "case" => self.case(),
                    _ => match self.names.iter().position(|n| *n == name) {
                        Some(i) => Ok(Expr::Var(i)),
                        None => Err(ParseError::new(self.line, col, format!("unknown variable '{name}'"))),
                    },
                }
            }
            _ => Err(self.error("expected an expression")),
        }
    }

    fn case(&mut self) -> Result<Expr, ParseError> {
        self.expect_sym("{")?;
        let mut arms = Vec::new();
        loop {
            if self.peek_ident("else") {
                self.pos += 1;
                self.expect_sym("=>")?;
                let otherwise = self.expr()?;
                self.eat_sym(";");
                self.expect_sym("}")?;
                return Ok(Expr::case(arms, otherwise));
            }
            let guard = self.guard()?;
            self.expect_sym("=>")?;
            let value = self.expr()?;
            self.expect_sym(";")?;
            arms.push((guard, value));
        }
    }

    fn guard(&mut self) -> Result<Guard, ParseError> {
        if self.peek_ident("true") {
            self.pos += 1;
            return Ok(Guard(Vec::new()));
        }
        let mut atoms = vec![self.comparison()?];
        while self.eat_sym("&") {
            atoms.push(self.comparison()?);
        }
        Ok(Guard(atoms))
    }

    fn comparison(&mut self) -> Result<Atom, ParseError> {
        let lhs = self.expr()?;
        let op = match self.peek() {
            Some(Tok::Sym("<=")) => CmpOp::Le,
            Some(Tok::Sym("<")) => CmpOp::Lt,
            Some(Tok::Sym(">=")) => CmpOp::Ge,
            Some(Tok::Sym(">")) => CmpOp::Gt,
            Some(Tok::Sym("==")) => CmpOp::Eq,
            Some(Tok::Sym("!=")) => CmpOp::Ne,
            _ => return Err(self.error("expected a comparison")),
        };
        self.pos += 1;
        let rhs = self.expr()?;
        Ok(Atom { lhs, op, rhs })
    }

    /// Factors `X^k` separated by whitespace or `*`, accumulated into `e`.
    fn factors(&mut self, sig: &Signature, e: &mut ExponentVector) -> Result<usize, ParseError> {
        let mut count = 0;
        loop {
            if count > 0 && self.peek_sym("*") && matches!(self.toks.get(self.pos + 1).map(|t| &t.tok), Some(Tok::Ident(_))) {
                self.pos += 1;
            }
            let Some(Tok::Ident(name)) = self.peek().cloned() else { return Ok(count) };
            if name == "pi" {
                return Ok(count);
            }
            let col = self.col();
            self.pos += 1;
            let i = sig
                .index_of(&name)
                .ok_or_else(|| ParseError::new(self.line, col, format!("unknown variable '{name}'")))?;
            let k = if self.eat_sym("^") { self.signed_rational()? } else { Rational::from_integer(1.into()) };
            let v = e.get(i) + k;
            e.set(i, v);
            count += 1;
        }
    }

    /// `1` or whitespace-separated factors like `T^-3 Z`.
    pub fn monomial(&mut self, sig: &Signature) -> Result<ExponentVector, ParseError> {
        let mut e = ExponentVector::zero(sig.len());
        if matches!(self.peek(), Some(Tok::Num(s)) if s == "1") {
            self.pos += 1;
            return Ok(e);
        }
        if self.factors(sig, &mut e)? == 0 {
            return Err(self.error("expected a monomial"));
        }
        Ok(e)
    }

    /// One term: optional rational, optional `pi^k`, then factors.
    fn term(&mut self, sig: &Signature) -> Result<(Rational, ExponentVector), ParseError> {
        let start = self.pos;
        let mut c = Rational::from_integer(1.into());
        if matches!(self.peek(), Some(Tok::Num(_))) {
            c = self.rational()?;
            self.eat_sym("*");
        }
        if self.peek_ident("pi") {
            self.pos += 1;
            let k = if self.eat_sym("^") { self.signed_int()? } else { BigInt::from(1) };
            let k = i64::try_from(&k).map_err(|_| self.error("exponent of pi out of range"))?;
            c *= prime_power(sig.prime(), k);
            self.eat_sym("*");
        }
        let mut e = ExponentVector::zero(sig.len());
        self.factors(sig, &mut e)?;
        if self.pos == start {
            return Err(self.error("expected a term"));
        }
        Ok((c, e))
    }

    /// A sum of terms such as `3/4 pi^-2 T^-1 Z - T + 1`.
    pub fn element(&mut self, sig: &Arc<Signature>) -> Result<RingElement, ParseError> {
        let mut terms = Vec::new();
        let mut neg = self.eat_sym("-");
        loop {
            let at = self.col();
            let (c, e) = self.term(sig)?;
            sig.check(&e).map_err(|err| ParseError::new(self.line, at, err.to_string()))?;
            terms.push((e, if neg { -c } else { c }));
            if self.eat_sym("+") {
                neg = false;
            } else if self.eat_sym("-") {
                neg = true;
            } else {
                break;
            }
        }
        RingElement::from_terms(sig.clone(), terms).map_err(|err| self.error(err.to_string()))
    }
}

fn whole<T>(text: &str, names: &[String], f: impl FnOnce(&mut Cursor) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut c = Cursor::new(text, 1, 1, names)?;
    let out = f(&mut c)?;
    c.finish()?;
    Ok(out)
}

pub fn parse_expr(text: &str, names: &[String]) -> Result<Expr, ParseError> {
    whole(text, names, |c| c.expr())
}

pub fn parse_monomial(text: &str, sig: &Signature) -> Result<ExponentVector, ParseError> {
    let e = whole(text, &[], |c| c.monomial(sig))?;
    sig.check(&e).map_err(|err| ParseError::new(1, 1, err.to_string()))?;
    Ok(e)
}

pub fn parse_element(text: &str, sig: &Arc<Signature>) -> Result<RingElement, ParseError> {
    whole(text, &[], |c| c.element(sig))
}

pub fn variable_names(sig: &Signature) -> Vec<String> {
    sig.vars().iter().map(|v| v.name.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use sheafcheck_core::VarDecl;

    fn sig() -> Arc<Signature> {
        Arc::new(Signature::new(2, vec![VarDecl::invertible("T"), VarDecl::nilpotent("Z", 2)]).unwrap())
    }

    #[test]
    fn monomials() {
        let s = sig();
        assert_eq!(parse_monomial("T^-3 Z", &s).unwrap(), ExponentVector::from_ints(&[-3, 1]));
        assert_eq!(parse_monomial("1", &s).unwrap(), ExponentVector::from_ints(&[0, 0]));
        assert_eq!(parse_monomial("T T^2", &s).unwrap(), ExponentVector::from_ints(&[3, 0]));
        assert!(parse_monomial("Z^2", &s).is_err());
        assert!(parse_monomial("Y", &s).is_err());
    }

    #[test]
    fn elements() {
        let s = sig();
        let x = parse_element("3/4 pi^-2 T^-1 Z - T + 1", &s).unwrap();
        assert_eq!(x.len(), 3);
        assert_eq!(x.to_string(), "3/16 T^-1 Z + 1 - T");
        assert_eq!(parse_element("-T*Z", &s).unwrap().to_string(), "-T Z");
    }

    #[test]
    fn expressions_round_trip() {
        let names: Vec<String> = vec!["T".into(), "Z".into()];
        for text in [
            "abs(T)",
            "-abs(T)",
            "T - (Z - 1)",
            "(T - (Z - 1)) * (-2)",
            "case { T + Z * Z >= 0 & Z != 1 => T + Z; true => 3/2; else => inf }",
            "max(T + Z, -T, min(Z, 2)) - -T",
            "-(-T)",
        ] {
            let e = parse_expr(text, &names).unwrap();
            assert_eq!(parse_expr(&e.render(&names), &names).unwrap(), e, "{text}");
        }
        assert_eq!(parse_expr("-3/2", &names).unwrap(), Expr::Const(Rational::new((-3).into(), 2.into())));
    }

    #[test]
    fn errors_have_columns() {
        let names: Vec<String> = vec!["T".into()];
        let err = parse_expr("T + $", &names).unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
        let err = parse_expr("case { T >> 0 => 1; else => 0 }", &names).unwrap_err();
        assert_eq!(err.column, 11);
    }
}
