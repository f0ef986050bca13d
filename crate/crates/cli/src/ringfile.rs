//! The ring-definition file format: `[field]`, `[vars]`, `[gauge]` and an
//! optional `[adjoin]` section. See the README for the grammar.

use std::sync::Arc;

use sheafcheck_core::gauge::{Direction, DerivedGauge, ExpressionGauge, Generator, GeneratorGauge, GaugeSpec};
use sheafcheck_core::expr::Expr;
use sheafcheck_core::topology::TateRingDesc;
use sheafcheck_core::{ExponentVector, Signature, VarDecl};

use crate::error::ParseError;
use crate::syntax::{variable_names, Cursor, KEYWORDS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Field,
    Vars,
    Gauge,
    Adjoin,
}

struct Line<'a> {
    number: usize,
    /// Column of the first character of `text`.
    col: usize,
    text: &'a str,
}

impl Line<'_> {
    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.number, self.col, msg)
    }

    fn cursor<'n>(&self, names: &'n [String]) -> Result<Cursor<'n>, ParseError> {
        Cursor::new(self.text, self.number, self.col, names)
    }
}

fn content_lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim_start();
        let col = body.len() - trimmed.len() + 1;
        let trimmed = trimmed.trim_end();
        if !trimmed.is_empty() {
            out.push(Line { number: i + 1, col, text: trimmed });
        }
    }
    out
}

/// Splits `key = value`, returning the key and a line for the value.
fn key_value<'a>(line: &Line<'a>) -> Option<(&'a str, Line<'a>)> {
    let (k, v) = line.text.split_once('=')?;
    if v.starts_with('=') || v.starts_with('>') {
        return None;
    }
    let skip = line.text.len() - v.len();
    let value = v.trim_start();
    let col = line.col + skip + (v.len() - value.len());
    Some((k.trim(), Line { number: line.number, col, text: value.trim_end() }))
}

/// Splits at the first `:`, returning the head and a line for the rest.
fn colon_split<'a>(line: &Line<'a>) -> Option<(&'a str, Line<'a>)> {
    let (h, rest) = line.text.split_once(':')?;
    let skip = h.len() + 1;
    let body = rest.trim_start();
    let col = line.col + skip + (rest.len() - body.len());
    Some((h.trim(), Line { number: line.number, col, text: body }))
}

#[derive(Default)]
struct Draft<'a> {
    prime: Option<(u32, usize)>,
    vars: Vec<VarDecl>,
    vars_line: usize,
    kind: Option<(String, Line<'a>)>,
    budget: Option<(usize, usize)>,
    gauge_lines: Vec<Line<'a>>,
    gauge_line: usize,
    adjoin: Vec<Line<'a>>,
}

fn parse_var(line: &Line) -> Result<VarDecl, ParseError> {
    let mut words = line.text.split_whitespace();
    let name = words.next().expect("nonempty line");
    if KEYWORDS.contains(&name) {
        return Err(line.error(format!("'{name}' is reserved")));
    }
    let mut decl = VarDecl::plain(name);
    while let Some(w) = words.next() {
        match w {
            "invertible" => decl.invertible = true,
            "p_divisible" => decl.p_divisible = true,
            "nilpotent" => {
                let cap = words
                    .next()
                    .and_then(|c| c.parse::<u32>().ok())
                    .ok_or_else(|| line.error("nilpotent needs a positive integer cap"))?;
                decl.nilpotency_cap = Some(cap);
            }
            other => return Err(line.error(format!("unknown flag '{other}'"))),
        }
    }
    Ok(decl)
}

fn split_sections(text: &str) -> Result<Draft<'_>, ParseError> {
    let mut draft = Draft::default();
    let mut current: Option<Section> = None;
    let mut seen: Vec<Section> = Vec::new();
    for line in content_lines(text) {
        if line.text.starts_with('[') {
            let section = match line.text {
                "[field]" => Section::Field,
                "[vars]" => Section::Vars,
                "[gauge]" => Section::Gauge,
                "[adjoin]" => Section::Adjoin,
                other => return Err(line.error(format!("unknown section {other}"))),
            };
            if seen.contains(&section) {
                return Err(line.error("section repeated"));
            }
            if seen.last().is_some_and(|s| *s > section) {
                return Err(line.error("sections must appear in the order field, vars, gauge, adjoin"));
            }
            seen.push(section);
            match section {
                Section::Vars => draft.vars_line = line.number,
                Section::Gauge => draft.gauge_line = line.number,
                _ => {}
            }
            current = Some(section);
            continue;
        }
        match current {
            None => return Err(line.error("content before the first section")),
            Some(Section::Field) => {
                let Some(("prime", value)) = key_value(&line) else {
                    return Err(line.error("expected 'prime = <p>'"));
                };
                let p = value.text.parse::<u32>().map_err(|_| value.error("expected a prime"))?;
                draft.prime = Some((p, line.number));
            }
            Some(Section::Vars) => draft.vars.push(parse_var(&line)?),
            Some(Section::Gauge) => match key_value(&line) {
                Some(("kind", value)) => draft.kind = Some((value.text.to_string(), value)),
                Some(("budget", value)) => {
                    let b = value.text.parse::<usize>().map_err(|_| value.error("expected a count"))?;
                    draft.budget = Some((b, line.number));
                }
                _ => draft.gauge_lines.push(line),
            },
            Some(Section::Adjoin) => draft.adjoin.push(line),
        }
    }
    for (s, name) in [(Section::Field, "[field]"), (Section::Vars, "[vars]"), (Section::Gauge, "[gauge]")] {
        if !seen.contains(&s) {
            return Err(ParseError::new(text.lines().count().max(1), 1, format!("missing section {name}")));
        }
    }
    Ok(draft)
}

fn expression_gauge(draft: &Draft, sig: &Arc<Signature>) -> Result<ExpressionGauge, ParseError> {
    let names = variable_names(sig);
    let nil = sig.nilpotent_indices().len();
    let mut strata: Vec<(Vec<u32>, Expr)> = Vec::new();
    let mut default = None;
    for line in &draft.gauge_lines {
        let Some((head, body)) = colon_split(line) else {
            return Err(line.error("expected 'stratum <k>... : <expr>' or 'default : <expr>'"));
        };
        let mut c = body.cursor(&names)?;
        let expr = c.expr()?;
        c.finish()?;
        expr.validate(sig.len()).map_err(|e| body.error(e.to_string()))?;
        let mut words = head.split_whitespace();
        match words.next() {
            Some("default") if words.next().is_none() => {
                if default.replace(expr).is_some() {
                    return Err(line.error("default given twice"));
                }
            }
            Some("stratum") => {
                let key: Vec<u32> = words
                    .map(|w| w.parse::<u32>().map_err(|_| line.error(format!("bad stratum exponent '{w}'"))))
                    .collect::<Result<_, _>>()?;
                if key.len() != nil {
                    return Err(line.error(format!("stratum needs {nil} exponents, one per nilpotent variable")));
                }
                strata.push((key, expr));
            }
            _ => return Err(line.error("expected 'stratum' or 'default'")),
        }
    }
    ExpressionGauge::new(sig.clone(), strata, default).map_err(|e| ParseError::new(draft.gauge_line, 1, e.to_string()))
}

fn generator_gauge(draft: &Draft, sig: &Arc<Signature>) -> Result<GeneratorGauge, ParseError> {
    let mut gens = Vec::new();
    for line in &draft.gauge_lines {
        let mut c = line.cursor(&[])?;
        let mut nums = Vec::new();
        while !c.at_end() {
            nums.push(c.signed_rational()?);
        }
        if nums.len() != sig.len() + 1 {
            return Err(line.error(format!("expected {} exponents and a cost", sig.len())));
        }
        let cost = nums.pop().unwrap();
        if !cost.is_integer() {
            return Err(line.error("cost must be an integer"));
        }
        gens.push(Generator::new(ExponentVector::new(nums), cost.to_integer()));
    }
    let g = GeneratorGauge::new(sig.clone(), gens).map_err(|e| ParseError::new(draft.gauge_line, 1, e.to_string()))?;
    Ok(match draft.budget {
        Some((b, _)) => g.with_budget(b),
        None => g,
    })
}

/// Parses a ring-definition file.
pub fn parse_ring(text: &str) -> Result<TateRingDesc, ParseError> {
    let draft = split_sections(text)?;
    let Some((prime, prime_line)) = draft.prime else {
        return Err(ParseError::new(1, 1, "[field] needs 'prime = <p>'"));
    };
    let sig = Signature::new(prime, draft.vars.clone()).map_err(|e| {
        let line = if e.to_string().contains("prime") { prime_line } else { draft.vars_line };
        ParseError::new(line, 1, e.to_string())
    })?;
    let sig = Arc::new(sig);
    let Some((kind, kind_line)) = &draft.kind else {
        return Err(ParseError::new(draft.gauge_line, 1, "[gauge] needs 'kind = expression' or 'kind = generators'"));
    };
    let spec = match kind.as_str() {
        "expression" => {
            if let Some((_, line)) = draft.budget {
                return Err(ParseError::new(line, 1, "budget only applies to generator gauges"));
            }
            GaugeSpec::Expression(expression_gauge(&draft, &sig)?)
        }
        "generators" => GaugeSpec::Generators(generator_gauge(&draft, &sig)?),
        other => return Err(kind_line.error(format!("unknown gauge kind '{other}'"))),
    };
    let mut steps = Vec::new();
    for line in &draft.adjoin {
        let mut c = line.cursor(&[])?;
        let dir = match c.ident()?.as_str() {
            "nonneg" => Direction::Nonneg,
            "nonpos" => Direction::Nonpos,
            "both" => Direction::Both,
            other => return Err(line.error(format!("unknown direction '{other}'"))),
        };
        let e = c.monomial(&sig)?;
        c.finish()?;
        steps.push((e, dir, line.number));
    }
    let adjoin_line = steps.first().map_or(draft.gauge_line, |s| s.2);
    let gauge = DerivedGauge::new(spec, steps.into_iter().map(|(e, d, _)| (e, d)).collect())
        .map_err(|e| ParseError::new(adjoin_line, 1, e.to_string()))?;
    TateRingDesc::with_gauge(gauge).map_err(|e| ParseError::new(draft.gauge_line, 1, e.to_string()))
}

/// Writes a ring in the file format; `parse_ring` reads it back to an equal description.
pub fn emit_ring(ring: &TateRingDesc) -> String {
    let sig = ring.signature();
    let names = variable_names(sig);
    let mut out = String::new();
    out.push_str(&format!("[field]\nprime = {}\n\n[vars]\n", sig.prime()));
    for v in sig.vars() {
        out.push_str(&v.name);
        if v.invertible {
            out.push_str(" invertible");
        }
        if let Some(cap) = v.nilpotency_cap {
            out.push_str(&format!(" nilpotent {cap}"));
        }
        if v.p_divisible {
            out.push_str(" p_divisible");
        }
        out.push('\n');
    }
    out.push_str("\n[gauge]\n");
    match ring.gauge().base() {
        GaugeSpec::Expression(g) => {
            out.push_str("kind = expression\n");
            for (key, e) in g.strata() {
                let key: Vec<String> = key.iter().map(u32::to_string).collect();
                let head = if key.is_empty() { "stratum".to_string() } else { format!("stratum {}", key.join(" ")) };
                out.push_str(&format!("{head} : {}\n", e.render(&names)));
            }
            if let Some(e) = g.default_expr() {
                out.push_str(&format!("default : {}\n", e.render(&names)));
            }
        }
        GaugeSpec::Generators(g) => {
            out.push_str(&format!("kind = generators\nbudget = {}\n", g.budget()));
            for gen in g.generators() {
                let cols: Vec<String> = gen.exponent.entries().iter().map(|x| x.to_string()).collect();
                out.push_str(&format!("{} {}\n", cols.join(" "), gen.cost));
            }
        }
    }
    if !ring.gauge().adjoined().is_empty() {
        out.push_str("\n[adjoin]\n");
        for (e, d) in ring.gauge().adjoined() {
            out.push_str(&format!("{} {}\n", d.keyword(), sig.format_monomial(e)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = "\
# the line with a nilpotent fibre
[field]
prime = 2

[vars]
T invertible
Z nilpotent 2

[gauge]
kind = expression
stratum 0 : abs(T)
stratum 1 : -abs(T)
";

    #[test]
    fn parses_and_round_trips() {
        let ring = parse_ring(LINE).unwrap();
        assert_eq!(ring.signature().len(), 2);
        let text = emit_ring(&ring);
        assert_eq!(parse_ring(&text).unwrap(), ring);
    }

    #[test]
    fn constant_field() {
        let ring = parse_ring("[field]\nprime = 3\n[vars]\n[gauge]\nkind = expression\ndefault : 0\n").unwrap();
        assert!(ring.signature().is_empty());
        assert_eq!(parse_ring(&emit_ring(&ring)).unwrap(), ring);
    }

    #[test]
    fn generators_and_adjoin() {
        let text = "[field]\nprime = 2\n[vars]\nT invertible\nZ\n[gauge]\nkind = generators\n1 0 1\n-1 0 1\n3 1 -1\n[adjoin]\nnonneg T\n";
        let ring = parse_ring(text).unwrap();
        assert_eq!(ring.gauge().adjoined().len(), 1);
        assert_eq!(parse_ring(&emit_ring(&ring)).unwrap(), ring);
    }

    #[test]
    fn error_positions() {
        let bad_guard = LINE.replace("stratum 1 : -abs(T)", "stratum 1 : case { T >> 0 => 1; else => 0 }");
        let err = parse_ring(&bad_guard).unwrap_err();
        assert_eq!((err.line, err.column), (12, 23));
        let err = parse_ring(&LINE.replace("nilpotent 2", "nilpotent 2 invertible")).unwrap_err();
        assert_eq!(err.line, 5);
        let err = parse_ring(&LINE.replace("Z nilpotent", "Z wobbly")).unwrap_err();
        assert_eq!(err.line, 7);
        let err = parse_ring(&LINE.replace("[gauge]", "[gauges]")).unwrap_err();
        assert_eq!(err.line, 9);
        assert!(parse_ring(&LINE.replace("abs(T)\n", "abs(Y)\n")).unwrap_err().message.contains("unknown variable"));
    }
}
