use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sheafcheck_core::cech::{
    alain_bound, build_triple, laurent_constant, locally_zero_sections, strictness_check, LaurentConstant, Relation, Strictness,
    StrictnessWitness,
};
use sheafcheck_core::gallery::{
    build_example, standard_window, verify_criterion, verify_proposition, Check, Example, ExampleId, Report, Status,
    VerifyParams,
};
use sheafcheck_core::gauge::{membership, Direction, GaugeVerdict, Membership};
use sheafcheck_core::topology::{power_bounded, uniformity, BoundednessWitness, PowerBounded, TateRingDesc, Uniformity};
use sheafcheck_core::window::Window;
use sheafcheck_core::{ExponentVector, RingElement, Signature};

use crate::error::CliError;
use crate::report::{Output, EXIT_PASS, EXIT_USAGE};
use crate::ringfile::{emit_ring, parse_ring};
use crate::syntax::{parse_element, parse_monomial};

#[derive(Parser, Debug)]
#[command(name = "sheafcheck", version, about = "Gauge, power-boundedness and Cech-strictness diagnostics for Tate rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Depth {
    /// Search horizon for gauges, witnesses and power scans.
    #[arg(long, default_value_t = 24)]
    horizon: u32,
}

#[derive(Args, Debug, Clone, Copy)]
struct WindowArgs {
    /// Radius of the exponent box (default: the example's window, or 2 for files).
    #[arg(long)]
    window: Option<u32>,
    /// Cap on the total degree of non-invertible variables.
    #[arg(long)]
    degree: Option<u32>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum DirArg {
    #[value(alias = "t")]
    Nonneg,
    #[value(alias = "1/t")]
    Nonpos,
    Both,
}

impl From<DirArg> for Direction {
    fn from(d: DirArg) -> Self {
        match d {
            DirArg::Nonneg => Direction::Nonneg,
            DirArg::Nonpos => Direction::Nonpos,
            DirArg::Both => Direction::Both,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gauge of a monomial, optionally after adjoining a unit or its inverse.
    Gauge {
        ring: String,
        monomial: String,
        #[arg(long, requires = "by")]
        adjoin: Option<DirArg>,
        #[arg(long, requires = "adjoin")]
        by: Option<String>,
        #[command(flatten)]
        depth: Depth,
    },
    /// Whether an element lies in p^n times the ring of definition.
    Member {
        ring: String,
        element: String,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0)]
        power: i64,
        #[command(flatten)]
        depth: Depth,
    },
    /// Whether an element is power-bounded.
    Powerbounded {
        ring: String,
        element: String,
        #[command(flatten)]
        depth: Depth,
    },
    /// Whether power-bounded monomials of a window lie in one p^-n R_0.
    Uniform {
        ring: String,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        depth: Depth,
    },
    /// Strictness of R_0 against A_0 and B_0 when localizing at t.
    Strict {
        ring: String,
        #[arg(long)]
        t: Option<String>,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        depth: Depth,
    },
    /// Monomials vanishing on both pieces of the cover at t.
    Localzero {
        ring: String,
        #[arg(long)]
        t: Option<String>,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        depth: Depth,
    },
    /// Power bound for r from a partition of unity and relations.
    Alain {
        ring: String,
        #[arg(long = "t", required = true)]
        t_list: Vec<String>,
        #[arg(long = "a", required = true)]
        a_list: Vec<String>,
        #[arg(long)]
        r: String,
        /// `degree; coeff @ m1 m2 ...; ...`, one per t.
        #[arg(long = "rel", required = true)]
        relations: Vec<String>,
        #[arg(long, default_value_t = 8)]
        verify_to: u32,
        #[command(flatten)]
        depth: Depth,
    },
    /// Least B with every p^B a_i power-bounded.
    LaurentConst {
        ring: String,
        #[arg(long = "t", required = true)]
        t_list: Vec<String>,
        #[arg(long = "a", required = true)]
        a_list: Vec<String>,
        #[command(flatten)]
        depth: Depth,
    },
    /// Runs the gallery checklists.
    Verify {
        #[arg(long, conflicts_with = "criterion")]
        example: Option<String>,
        #[arg(long)]
        criterion: Option<u32>,
        #[arg(long, default_value_t = 24)]
        horizon: u32,
        #[arg(long, default_value_t = 12)]
        precision: u32,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(long, default_value_t = 2)]
        prime: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Writes a ring as a ring-definition file.
    Export {
        #[arg(required_unless_present = "all")]
        ring: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Every gallery ring into `--dir`.
        #[arg(long, requires = "dir", conflicts_with = "ring")]
        all: bool,
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

struct Loaded {
    ring: TateRingDesc,
    example: Option<Example>,
}

fn load(spec: &str) -> Result<Loaded, CliError> {
    if let Some(id) = ExampleId::from_name(spec) {
        let example = build_example(id, &VerifyParams::default())?;
        return Ok(Loaded { ring: example.localized_ring()?, example: Some(example) });
    }
    let text = std::fs::read_to_string(spec).map_err(|source| CliError::Io { path: spec.into(), source })?;
    let ring = parse_ring(&text).map_err(|source| CliError::Parse { path: spec.into(), source })?;
    Ok(Loaded { ring, example: None })
}

fn arg_error(what: &str) -> impl Fn(crate::error::ParseError) -> CliError + '_ {
    move |e| CliError::Usage(format!("{what}: column {}: {}", e.column, e.message))
}

fn monomial_arg(text: &str, sig: &Signature) -> Result<ExponentVector, CliError> {
    parse_monomial(text, sig).map_err(arg_error(text))
}

fn element_arg(text: &str, sig: &Arc<Signature>) -> Result<RingElement, CliError> {
    parse_element(text, sig).map_err(arg_error(text))
}

fn window_for(loaded: &Loaded, args: WindowArgs) -> Window {
    let mut w = match (&loaded.example, args.window) {
        (_, Some(r)) => Window::new(r),
        (Some(ex), None) => standard_window(ex.id, loaded.ring.signature().prime()),
        (None, None) => Window::new(2),
    };
    if let Some(d) = args.degree {
        w = w.with_degree(d);
    }
    w
}

fn t_for(loaded: &Loaded, t: Option<&str>) -> Result<ExponentVector, CliError> {
    match (t, &loaded.example) {
        (Some(t), _) => monomial_arg(t, loaded.ring.signature()),
        (None, Some(ex)) => Ok(ex.t.clone()),
        (None, None) => Err(CliError::Usage("--t is required for ring files".into())),
    }
}

fn membership_status(m: Membership) -> Status {
    match m {
        Membership::Yes => Status::Pass,
        Membership::No => Status::Fail,
        Membership::Inconclusive => Status::Inconclusive,
    }
}

fn witness_check(name: &str, sig: &Signature, w: &BoundednessWitness) -> Check {
    let mut c = Check::new(name, Status::Fail).with("kind", w.kind.label()).with("monomial", sig.format_monomial(&w.monomial));
    if let Some(a) = w.annihilator {
        c = c.with("annihilator", a);
    }
    if let Some(s) = &w.slope {
        c = c.with("slope", s);
    }
    if !w.family.is_empty() {
        c = c.with("family", w.family.len());
    }
    c
}

fn gauge_check(loaded: &Loaded, monomial: &str, adjoin: Option<(Direction, &str)>, horizon: u32) -> Result<Check, CliError> {
    let sig = loaded.ring.signature().clone();
    let e = monomial_arg(monomial, &sig)?;
    let g = match adjoin {
        Some((dir, by)) => loaded.ring.gauge().adjoin(vec![(monomial_arg(by, &sig)?, dir)])?,
        None => loaded.ring.gauge().clone(),
    };
    let ev = g.explain(&e, horizon)?;
    let status = match ev.verdict {
        GaugeVerdict::Exact(_) | GaugeVerdict::PlusInf | GaugeVerdict::MinusInfCertified { .. } => Status::Pass,
        GaugeVerdict::AtMost { .. } | GaugeVerdict::Inconclusive { .. } => Status::Inconclusive,
    };
    let mut c = Check::new("gauge", status).with("monomial", sig.format_monomial(&e)).with("verdict", ev.verdict.label());
    match &ev.verdict {
        GaugeVerdict::Exact(v) => c = c.with("value", v),
        GaugeVerdict::AtMost { value, .. } => c = c.with("at_most", value),
        GaugeVerdict::MinusInfCertified { depth, witnesses } => {
            c = c.with("value", "-inf").with("depth", depth);
            if let Some(w) = witnesses.last() {
                c = c.with("deepest", sig.format_monomial(&w.monomial)).with("deepest_value", &w.value);
            }
        }
        GaugeVerdict::PlusInf => c = c.with("value", "+inf"),
        GaugeVerdict::Inconclusive { .. } => {}
    }
    if let (Some(comb), Some(gens)) = (&ev.combination, g.generators()) {
        c = c.with("combination", comb.render(&sig, gens));
    }
    if let Some(s) = &ev.shift {
        if !s.is_zero() {
            c = c.with("shift", sig.format_monomial(s));
        }
    }
    Ok(c)
}

fn strict_check(loaded: &Loaded, t: Option<&str>, window: WindowArgs, horizon: u32) -> Result<Check, CliError> {
    let sig = loaded.ring.signature().clone();
    let tr = build_triple(&loaded.ring, &t_for(loaded, t)?)?;
    let w = window_for(loaded, window);
    Ok(match strictness_check(&tr, &w, horizon, &[])? {
        Strictness::Holds { n, points } => Check::new("strictness", Status::Pass).with("verdict", "holds").with("n", n).with("points", points),
        Strictness::Fails { witness } => {
            let c = Check::new("strictness", Status::Fail).with("verdict", "fails");
            match witness {
                StrictnessWitness::Monomial(e) => c.with("witness", sig.format_monomial(&e)),
                StrictnessWitness::Family(f) => c.with("family", f.len()),
            }
        }
        Strictness::Inconclusive { monomial } => {
            Check::new("strictness", Status::Inconclusive).with("verdict", "inconclusive").with("at", sig.format_monomial(&monomial))
        }
    })
}

fn localzero_checks(loaded: &Loaded, t: Option<&str>, window: WindowArgs, horizon: u32) -> Result<Vec<Check>, CliError> {
    let sig = loaded.ring.signature().clone();
    let mut tr = build_triple(&loaded.ring, &t_for(loaded, t)?)?;
    if let Some(ex) = &loaded.example {
        if tr.t() == &ex.t {
            tr = ex.triple()?;
        }
    }
    let found = locally_zero_sections(&tr, &window_for(loaded, window), horizon)?;
    let names: Vec<String> = found.iter().map(|z| sig.format_monomial(&z.monomial)).collect();
    let mut out = vec![Check::new("locally_zero", Status::Pass).with("found", found.len()).with("witnesses", names.join(","))];
    for z in &found {
        out.push(
            Check::new("section", Status::Pass)
                .with("monomial", sig.format_monomial(&z.monomial))
                .with("nilpotent", z.nilpotent)
                .with("non_nilpotent_to_horizon", z.non_nilpotent_to_horizon)
                .with("topologically_nilpotent", z.topologically_nilpotent),
        );
    }
    Ok(out)
}

/// `degree; coeff @ m1 m2 ...; ...`
fn relation_arg(text: &str, sig: &Arc<Signature>, count: usize) -> Result<Relation, CliError> {
    let bad = |msg: &str| CliError::Usage(format!("relation '{text}': {msg}"));
    let mut parts = text.split(';');
    let degree = parts.next().unwrap_or("").trim().parse::<u32>().map_err(|_| bad("expected a degree first"))?;
    let mut terms = Vec::new();
    for part in parts.filter(|p| !p.trim().is_empty()) {
        let (coeff, exps) = part.split_once('@').ok_or_else(|| bad("terms are 'coeff @ m1 m2 ...'"))?;
        let c = element_arg(coeff.trim(), sig)?;
        let m: Vec<u32> = exps.split_whitespace().map(|x| x.parse::<u32>()).collect::<Result<_, _>>().map_err(|_| bad("bad exponent"))?;
        if m.len() != count {
            return Err(bad(&format!("each term needs {count} exponents")));
        }
        terms.push((c, m));
    }
    Ok(Relation { degree, terms })
}

fn report_checks(report: &Report, prefix: bool) -> Vec<Check> {
    report
        .checks
        .iter()
        .map(|c| {
            let mut c = c.clone();
            if prefix {
                c.name = format!("{}/{}", report.subject, c.name);
            }
            c
        })
        .collect()
}

fn export(ring: Option<&str>, out: Option<&PathBuf>, all: bool, dir: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let write = |path: &PathBuf, text: &str| std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source });
    if all {
        let dir = dir.expect("clap enforces --dir");
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
        for id in ExampleId::ALL {
            let ring = build_example(id, &VerifyParams::default())?.localized_ring()?;
            write(&dir.join(format!("{}.ring", id.name())), &emit_ring(&ring))?;
        }
        return Ok(());
    }
    let loaded = load(ring.expect("clap enforces a ring"))?;
    let mut text = String::new();
    if let Some(ex) = &loaded.example {
        text.push_str(&format!("# gallery ring {}\n", ex.id));
    }
    text.push_str(&emit_ring(&loaded.ring));
    match out {
        Some(path) => write(path, &text),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "stdout".into(), source }),
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<Option<Output>, CliError> {
    let mut out;
    match command {
        Command::Gauge { ring, monomial, adjoin, by, depth } => {
            out = Output::new("gauge");
            out.param("ring", &ring);
            out.param("horizon", depth.horizon);
            let loaded = load(&ring)?;
            let adjoin = adjoin.zip(by.as_deref()).map(|(d, b)| (Direction::from(d), b));
            out.push(gauge_check(&loaded, &monomial, adjoin, depth.horizon)?);
        }
        Command::Member { ring, element, power, depth } => {
            out = Output::new("member");
            out.param("ring", &ring);
            out.param("horizon", depth.horizon);
            let loaded = load(&ring)?;
            let x = element_arg(&element, loaded.ring.signature())?;
            let m = membership(&x, loaded.ring.gauge(), power, depth.horizon)?;
            out.push(Check::new("member", membership_status(m)).with("element", &x).with("power", power).with("result", m));
        }
        Command::Powerbounded { ring, element, depth } => {
            out = Output::new("powerbounded");
            out.param("ring", &ring);
            out.param("horizon", depth.horizon);
            let loaded = load(&ring)?;
            let sig = loaded.ring.signature().clone();
            let x = element_arg(&element, &sig)?;
            out.push(match power_bounded(&loaded.ring, &x, depth.horizon)? {
                PowerBounded::Yes { n } => Check::new("powerbounded", Status::Pass).with("element", &x).with("n", n),
                PowerBounded::No { witness } => witness_check("powerbounded", &sig, &witness).with("element", &x),
                PowerBounded::Inconclusive { term } => {
                    Check::new("powerbounded", Status::Inconclusive).with("element", &x).with("term", sig.format_monomial(&term))
                }
            });
        }
        Command::Uniform { ring, window, depth } => {
            out = Output::new("uniform");
            out.param("ring", &ring);
            out.param("horizon", depth.horizon);
            let loaded = load(&ring)?;
            let sig = loaded.ring.signature().clone();
            let w = window_for(&loaded, window);
            out.param("window", w.radius);
            out.push(match uniformity(&loaded.ring, &w, depth.horizon, &[])? {
                Uniformity::Uniform { n, points } => Check::new("uniform", Status::Pass).with("n", n).with("points", points),
                Uniformity::NonUniform(wit) => witness_check("uniform", &sig, &wit),
                Uniformity::Inconclusive { monomial } => {
                    Check::new("uniform", Status::Inconclusive).with("at", sig.format_monomial(&monomial))
                }
            });
        }
        Command::Strict { ring, t, window, depth } => {
            out = Output::new("strict");
            out.param("ring", &ring);
            out.param("horizon", depth.horizon);
            let loaded = load(&ring)?;
            out.param("window", window_for(&loaded, window).radius);
            out.push(strict_check(&loaded, t.as_deref(), window, depth.horizon)?);
        }
        Command::Localzero { ring, t, window, depth } => {
            out = Output::new("localzero");
            out.param("ring", &ring);
            out.param("horizon", depth.horizon);
            let loaded = load(&ring)?;
            out.param("window", window_for(&loaded, window).radius);
            out.extend(localzero_checks(&loaded, t.as_deref(), window, depth.horizon)?);
        }
        Command::Alain { ring, t_list, a_list, r, relations, verify_to, depth } => {
            out = Output::new("alain");
            out.param("ring", &ring);
            out.param("horizon", depth.horizon);
            let loaded = load(&ring)?;
            let sig = loaded.ring.signature().clone();
            let ts = t_list.iter().map(|t| element_arg(t, &sig)).collect::<Result<Vec<_>, _>>()?;
            let as_ = a_list.iter().map(|a| element_arg(a, &sig)).collect::<Result<Vec<_>, _>>()?;
            let r = element_arg(&r, &sig)?;
            let rels = relations.iter().map(|x| relation_arg(x, &sig, ts.len())).collect::<Result<Vec<_>, _>>()?;
            let cert = alain_bound(&loaded.ring, &ts, &as_, &r, &rels, verify_to, depth.horizon)?;
            let worst = cert.verified.iter().map(|(_, m)| membership_status(*m)).max().unwrap_or(Status::Pass);
            out.push(
                Check::new("alain", worst)
                    .with("a_bound", &cert.a_bound)
                    .with("b_bound", &cert.b_bound)
                    .with("total_degree", cert.total_degree)
                    .with("exponent", &cert.exponent)
                    .with("verified_to", verify_to),
            );
        }
        Command::LaurentConst { ring, t_list, a_list, depth } => {
            out = Output::new("laurent-const");
            out.param("ring", &ring);
            out.param("horizon", depth.horizon);
            let loaded = load(&ring)?;
            let sig = loaded.ring.signature().clone();
            let ts = t_list.iter().map(|t| element_arg(t, &sig)).collect::<Result<Vec<_>, _>>()?;
            let as_ = a_list.iter().map(|a| element_arg(a, &sig)).collect::<Result<Vec<_>, _>>()?;
            out.push(match laurent_constant(&loaded.ring, &ts, &as_, depth.horizon)? {
                LaurentConstant::Found { b, c_exponent } => {
                    Check::new("laurent_constant", Status::Pass).with("b", b).with("c_exponent", c_exponent)
                }
                LaurentConstant::Inconclusive => Check::new("laurent_constant", Status::Inconclusive),
            });
        }
        Command::Verify { example, criterion, horizon, precision, depth, prime, seed } => {
            out = Output::new("verify");
            let params = VerifyParams { prime, depth, horizon, precision, seed };
            params.validate()?;
            for (k, v) in [("horizon", horizon), ("precision", precision), ("depth", depth), ("prime", prime)] {
                out.param(k, v);
            }
            out.param("seed", seed);
            if let Some(name) = example {
                let id = ExampleId::from_name(&name).ok_or_else(|| {
                    let names: Vec<&str> = ExampleId::ALL.iter().map(|i| i.name()).collect();
                    CliError::Usage(format!("unknown example '{name}'; expected one of {}", names.join(", ")))
                })?;
                out.param("example", id);
                out.extend(report_checks(&verify_proposition(id, &params)?, false));
            } else if let Some(n) = criterion {
                out.param("criterion", n);
                out.extend(report_checks(&verify_criterion(n, &params)?, false));
            } else {
                for n in 1..=8 {
                    out.extend(report_checks(&verify_criterion(n, &params)?, true));
                }
            }
        }
        Command::Export { ring, out: path, all, dir } => {
            export(ring.as_deref(), path.as_ref(), all, dir.as_ref(), stdout)?;
            return Ok(None);
        }
    }
    Ok(Some(out))
}

/// Runs one invocation, writing the report to `stdout` and diagnostics to `stderr`; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(Some(out)) => {
            let _ = stdout.write_all(out.render().as_bytes());
            out.exit_code()
        }
        Ok(None) => EXIT_PASS,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}
