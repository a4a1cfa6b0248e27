//! Command-line front end for scaled Boolean algebras.
//!
//! Reports go to the `out` writer and diagnostics to `err`. Exit codes:
//! 0 success, 1 verification failure or undefined result, 2 input error.

pub mod document;
pub mod expr;

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use scaled_boolean::belief::{check_axioms, BeliefSystem, BeliefViolation};
use scaled_boolean::census::{enumerate_scalings, CensusFilter};
use scaled_boolean::cf::{continued_fraction, scale_multiply, verify_product_rule, CfError};
use scaled_boolean::divisibility::{
    construct_division, divided_counterexample, find_agreeing_measure, is_divided,
    kleene_tuple_representation, kps_example, poset6, Certificate, DivisionOutcome, Measurability,
    KPS_GENERATORS,
};
use scaled_boolean::named::{balanced, linear_middlescale, middlescale, quasicomplement, uniform};
use scaled_boolean::nonarch::{
    discontinuity_witness, divided_witness, galaxy_shift_witness, is_infinitesimal,
    nonarch_compare, upset_ops, validate_infinitesimal_witness, Infinitesimality, UPSet,
};
use scaled_boolean::scaling::AxiomViolation;
use scaled_boolean::{Algebra, ClassId, Mask, Rel, Scale, Scaling, TableOp};

use crate::document::ScalingDocument;
use crate::expr::parse_upset;

/// Bundled examples usable in place of a file name.
pub const BUNDLED: [&str; 7] = [
    "middlescale",
    "linear-middlescale",
    "poset6",
    "balanced",
    "quasicomplement",
    "kps",
    "uniform3",
];

#[derive(Debug, Parser)]
#[command(
    name = "scaled",
    version,
    about = "Scaled Boolean algebras: check, tabulate, measure and divide scalings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct FileArg {
    /// Scaling document (JSON) or the name of a bundled example
    file: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OpArg {
    Add,
    Dualadd,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify the scaling axioms
    Check(FileArg),
    /// Print the normal form of a document
    Show(FileArg),
    /// Addition or dual-addition table of the scale
    Table {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, value_enum)]
        op: OpArg,
        /// Use greek letters and the boxed times sign
        #[arg(long)]
        unicode: bool,
    },
    /// Decide whether the scaling is divided
    Divided(FileArg),
    /// Find an agreeing measure or an infeasibility certificate
    Measure(FileArg),
    /// Construct a division or prove that none exists
    Divide(FileArg),
    /// Tuple representation of a divided scaling
    Kleene(FileArg),
    /// Count scalings on n atoms up to isomorphism
    Census {
        #[arg(long)]
        n: usize,
        /// Only one-to-one scalings
        #[arg(long)]
        one_to_one: bool,
        /// Only linear scalings
        #[arg(long)]
        linear: bool,
        /// List the representatives
        #[arg(long)]
        list: bool,
    },
    /// The indivisible five-atom scaling: axioms, certificate, division
    Kps,
    /// Continued fraction of the quotient of two classes
    Cf {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        num: String,
        #[arg(long)]
        den: String,
    },
    /// Product of two classes
    Multiply {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Check P(x and z) = P(x | z) P(z); sets are written like a,b or {a,b}
    Prodrule {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Check the belief axioms on the scaling's order
    Axioms(FileArg),
    /// Ultimately periodic subsets of the naturals
    DemoNonarch {
        #[command(subcommand)]
        command: NonarchCommand,
    },
}

#[derive(Debug, Subcommand)]
enum NonarchCommand {
    /// Boolean operations and the size of A minus B
    Ops { a: String, b: String },
    /// Compare rho(A) with rho(B)
    Compare { a: String, b: String },
    /// Decide whether rho(A) is infinitesimal
    Infinitesimal { a: String },
    /// A subset of B with the same value as A, when rho(A) < rho(B)
    Divided { a: String, b: String },
    /// The tails chain and its failure of continuity
    Discontinuity {
        /// Tail starts to sample
        #[arg(long, value_delimiter = ',', default_value = "0,10,1000")]
        at: Vec<u64>,
    },
    /// Shifting the galaxy of A breaks relative complements
    Shift { a: String },
}

/// Result of a handler that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

/// Input error, reported on standard error with exit code 2.
#[derive(Debug)]
struct InputError(String);

type Handler = Result<(Outcome, String), InputError>;

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return if code == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli.command) {
        Ok((outcome, text)) => {
            let _ = out.write_all(text.as_bytes());
            match outcome {
                Outcome::Pass => 0,
                Outcome::Fail => 1,
            }
        }
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn dispatch(command: Command) -> Handler {
    match command {
        Command::Check(f) => check(&f.file),
        Command::Show(f) => show(&f.file),
        Command::Table { file, op, unicode } => table(&file.file, op, unicode),
        Command::Divided(f) => divided(&f.file),
        Command::Measure(f) => measure(&f.file),
        Command::Divide(f) => divide(&f.file),
        Command::Kleene(f) => kleene(&f.file),
        Command::Census {
            n,
            one_to_one,
            linear,
            list,
        } => census(n, one_to_one, linear, list),
        Command::Kps => kps(),
        Command::Cf { file, num, den } => cf(&file.file, &num, &den),
        Command::Multiply { file, x, y } => multiply(&file.file, &x, &y),
        Command::Prodrule { file, x, z } => prodrule(&file.file, &x, &z),
        Command::Axioms(f) => axioms(&f.file),
        Command::DemoNonarch { command } => nonarch(command),
    }
}

fn bundled(name: &str) -> Option<Scaling> {
    Some(match name {
        "middlescale" => middlescale(),
        "linear-middlescale" => linear_middlescale(),
        "poset6" => poset6(),
        "balanced" => balanced(3).expect("balanced(3) is a scaling"),
        "quasicomplement" => quasicomplement(),
        "kps" => kps_example().expect("the kps closure is a scaling"),
        "uniform3" => uniform(3).expect("uniform(3) is a scaling"),
        _ => return None,
    })
}

/// Loads a document or bundled example without checking the axioms.
fn load_unchecked(file: &str) -> Result<Scaling, InputError> {
    let path = Path::new(file);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{file}: {e}")))?;
        let doc = ScalingDocument::parse(&text).map_err(|e| InputError(format!("{file}: {e}")))?;
        return doc
            .to_scaling()
            .map_err(|e| InputError(format!("{file}: {e}")));
    }
    let stem = file.strip_suffix(".json").unwrap_or(file);
    let stem = Path::new(stem)
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or(stem);
    bundled(stem).ok_or_else(|| {
        InputError(format!(
            "{file}: no such file or bundled example (bundled: {})",
            BUNDLED.join(", ")
        ))
    })
}

/// Loads a verified scaling, or returns the failure report.
fn load(file: &str) -> Result<Result<Scaling, String>, InputError> {
    let s = load_unchecked(file)?;
    let report = s.verify_axioms();
    Ok(match report.violations.first() {
        None => Ok(s),
        Some(v) => Err(format!(
            "FAIL: not a scaling: {}\n",
            describe_violation(s.algebra(), v)
        )),
    })
}

/// Like [`load`], also tabulating the scale.
fn load_scale(file: &str) -> Result<Result<(Scaling, Scale), String>, InputError> {
    Ok(match load(file)? {
        Ok(s) => {
            let scale = Scale::from_scaling(&s).map_err(|e| InputError(format!("{file}: {e}")))?;
            Ok((s, scale))
        }
        Err(report) => Err(report),
    })
}

macro_rules! try_load {
    ($e:expr) => {
        match $e? {
            Ok(v) => v,
            Err(report) => return Ok((Outcome::Fail, report)),
        }
    };
}

fn describe_violation(alg: &Algebra, v: &AxiomViolation) -> String {
    let f = |m: Mask| alg.format_bits(m);
    match *v {
        AxiomViolation::NotStrictlyIncreasing { x, y } => {
            format!(
                "{} is below {} but its image is not strictly below",
                f(x),
                f(y)
            )
        }
        AxiomViolation::ComplementNotReversed { a, b, x, y } => format!(
            "in [{}, {}], rho({}) < rho({}) but the relative complements are not reversed",
            f(a),
            f(b),
            f(x),
            f(y)
        ),
        AxiomViolation::ComplementNotEqual { a, b, x, y } => format!(
            "in [{}, {}], rho({}) = rho({}) but the relative complements differ",
            f(a),
            f(b),
            f(x),
            f(y)
        ),
    }
}

fn class_arg(s: &Scaling, name: &str) -> Result<ClassId, InputError> {
    s.class_by_name(name).ok_or_else(|| {
        InputError(format!(
            "unknown class {name:?} (classes: {})",
            s.names().join(", ")
        ))
    })
}

/// Parses `a,b`, `{a,b}` or `{}`.
fn set_arg(alg: &Algebra, text: &str) -> Result<Mask, InputError> {
    let inner = text.trim();
    let inner = inner
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .unwrap_or(inner);
    let mut bits = 0;
    for name in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let i = alg
            .labels()
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| InputError(format!("unknown atom {name:?} in {text:?}")))?;
        bits |= 1 << i;
    }
    Ok(bits)
}

fn tuple(v: &[u64]) -> String {
    let parts: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("({})", parts.join(", "))
}

fn rationals(v: &[BigRational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn rel_word(r: Rel) -> &'static str {
    match r {
        Rel::Lt => "lt",
        Rel::Eq => "eq",
        Rel::Gt => "gt",
        Rel::Incomparable => "incomparable",
    }
}

fn check(file: &str) -> Handler {
    let s = try_load!(load(file));
    Ok((
        Outcome::Pass,
        format!("PASS: valid scaling, {} classes\n", s.class_count()),
    ))
}

fn show(file: &str) -> Handler {
    let s = try_load!(load(file));
    Ok((Outcome::Pass, ScalingDocument::from_scaling(&s).to_json()))
}

fn table(file: &str, op: OpArg, unicode: bool) -> Handler {
    let (_, scale) = try_load!(load_scale(file));
    let op = match op {
        OpArg::Add => TableOp::Add,
        OpArg::Dualadd => TableOp::DualAdd,
    };
    Ok((Outcome::Pass, scale.render_table(op, unicode)))
}

fn divided(file: &str) -> Handler {
    let s = try_load!(load(file));
    let alg = s.algebra();
    Ok(match divided_counterexample(&s) {
        None => (Outcome::Pass, "DIVIDED\n".to_string()),
        Some((x, y)) => (
            Outcome::Fail,
            format!(
                "NOT DIVIDED: rho({}) < rho({}) but no proper part of {} has the image of {}\n",
                alg.format_bits(x),
                alg.format_bits(y),
                alg.format_bits(y),
                alg.format_bits(x)
            ),
        ),
    })
}

fn write_certificate(out: &mut String, alg: &Algebra, cert: &Certificate) {
    let f = |m: Mask| alg.format_bits(m);
    out.push_str("certificate multipliers:\n");
    for (row, y) in &cert.strict {
        let _ = writeln!(out, "  {y} x [mu{} < mu{}]", f(row.lesser), f(row.greater));
    }
    for (atom, y) in &cert.positivity {
        let _ = writeln!(out, "  {y} x [mu{{{}}} > 0]", alg.labels()[*atom]);
    }
    for ((a, b), z) in &cert.equalities {
        let _ = writeln!(out, "  {z} x [mu{} = mu{}]", f(*a), f(*b));
    }
    let valid = cert.is_valid(alg.atom_count());
    let _ = writeln!(
        out,
        "weighted sum: 0 < 0 ({})",
        if valid {
            "certificate checks"
        } else {
            "CERTIFICATE INVALID"
        }
    );
}

fn measure(file: &str) -> Handler {
    let s = try_load!(load(file));
    let alg = s.algebra();
    let mut out = String::new();
    Ok(match find_agreeing_measure(&s) {
        Measurability::Measurable(m) => {
            out.push_str("MEASURABLE\n");
            for (label, mass) in alg.labels().iter().zip(m.masses()) {
                let _ = writeln!(out, "  mu{{{label}}} = {mass}");
            }
            let agrees = m.agrees_with(&s);
            let _ = writeln!(
                out,
                "agrees with the scaling: {}",
                if agrees { "yes" } else { "NO" }
            );
            (Outcome::from_bool(agrees), out)
        }
        Measurability::NotMeasurable(cert) => {
            out.push_str("INFEASIBLE\n");
            write_certificate(&mut out, alg, &cert);
            (Outcome::Fail, out)
        }
    })
}

fn divide(file: &str) -> Handler {
    let s = try_load!(load(file));
    let alg = s.algebra();
    let mut out = String::new();
    let outcome = match construct_division(&s) {
        Err(e) => return Ok((Outcome::Fail, format!("FAIL: {e}\n"))),
        Ok(o) => o,
    };
    Ok(match outcome {
        DivisionOutcome::Indivisible(cert) => {
            out.push_str("INDIVISIBLE\n");
            write_certificate(&mut out, alg, &cert);
            (Outcome::Fail, out)
        }
        DivisionOutcome::Divided(d) => {
            out.push_str("DIVISIBLE\ncorners of the measure polytope:\n");
            for (v, den) in d.corners.vertices.iter().zip(&d.corners.denominators) {
                let _ = writeln!(out, "  {}  denominator {den}", rationals(v));
            }
            out.push_str("sigma:\n");
            for (label, s) in alg.labels().iter().zip(&d.sigma) {
                let _ = writeln!(out, "  {{{label}}} -> {}", tuple(s));
            }
            let _ = writeln!(out, "class sizes: {}", tuple(&d.class_sizes));
            out.push_str("embedding:\n");
            for (c, img) in d.embedding.iter().enumerate() {
                let t = d.scale.tuple(*img).unwrap_or_default();
                let _ = writeln!(out, "  {} -> {}", s.name(ClassId(c)), tuple(&t));
            }
            let ok = match &d.expanded {
                Some(exp) => {
                    let divided = is_divided(exp);
                    let _ = writeln!(
                        out,
                        "expanded algebra: {} atoms, divided: {}",
                        exp.algebra().atom_count(),
                        if divided { "yes" } else { "NO" }
                    );
                    divided
                }
                None => {
                    let _ = writeln!(
                        out,
                        "expanded algebra: {} atoms, too large to tabulate",
                        d.expanded_atoms.len()
                    );
                    true
                }
            };
            (Outcome::from_bool(ok), out)
        }
    })
}

fn kleene(file: &str) -> Handler {
    let s = try_load!(load(file));
    let alg = s.algebra();
    if divided_counterexample(&s).is_some() {
        let (_, report) = divided(file)?;
        return Ok((Outcome::Fail, report));
    }
    let rep = match kleene_tuple_representation(&s) {
        Ok(rep) => rep,
        Err(e) => return Ok((Outcome::Fail, format!("FAIL: {e}\n"))),
    };
    let mut out = String::from("parts:");
    for p in rep.parts() {
        let _ = write!(out, " {}", alg.format_bits(*p));
    }
    out.push('\n');
    for c in 0..s.class_count() {
        let c = ClassId(c);
        let _ = writeln!(
            out,
            "  {} = {}",
            s.name(c),
            tuple(&rep.rep(s.members(c)[0]))
        );
    }
    Ok((Outcome::Pass, out))
}

fn describe_scaling(s: &Scaling) -> String {
    let alg = s.algebra();
    let classes: Vec<String> = (0..s.class_count())
        .map(|c| {
            let members: Vec<String> = s
                .members(ClassId(c))
                .iter()
                .map(|&m| alg.format_bits(m))
                .collect();
            format!("{}={}", s.name(ClassId(c)), members.join("="))
        })
        .collect();
    let covers: Vec<String> = s
        .order()
        .covers()
        .into_iter()
        .map(|(a, b)| format!("{}<{}", s.name(ClassId(a)), s.name(ClassId(b))))
        .collect();
    format!("{}; {}", classes.join(" "), covers.join(" "))
}

fn census(n: usize, one_to_one: bool, linear: bool, list: bool) -> Handler {
    let filter = CensusFilter {
        one_to_one: one_to_one.then_some(true),
        linear_only: linear,
    };
    let result = enumerate_scalings(n, filter).map_err(|e| InputError(e.to_string()))?;
    let (c, l) = (result.counts, result.labelled_counts);
    let mut out = String::new();
    let _ = writeln!(out, "atoms: {n}");
    let _ = writeln!(
        out,
        "one-to-one: {} (linear {})",
        c.one_to_one_total, c.one_to_one_linear
    );
    if !one_to_one {
        let _ = writeln!(
            out,
            "many-to-one: {} (linear {})",
            c.many_to_one_total, c.many_to_one_linear
        );
    }
    let _ = writeln!(out, "total: {}", c.total());
    let _ = writeln!(
        out,
        "with atoms labelled: {} (one-to-one {}, linear {})",
        l.total(),
        l.one_to_one_total,
        l.one_to_one_linear + l.many_to_one_linear
    );
    if list {
        for (i, e) in result.representatives.iter().enumerate() {
            let _ = writeln!(out, "{:>3}: {}", i + 1, describe_scaling(&e.scaling));
        }
    }
    Ok((Outcome::Pass, out))
}

fn kps() -> Handler {
    let s = kps_example().map_err(|e| InputError(e.to_string()))?;
    let alg = s.algebra();
    let mut out = String::from("generators:\n");
    for (a, b) in KPS_GENERATORS {
        let _ = writeln!(out, "  {} < {}", alg.format_bits(a), alg.format_bits(b));
    }
    let axioms = s.verify_axioms().passed();
    let _ = writeln!(out, "axioms: {}", if axioms { "PASS" } else { "FAIL" });
    let infeasible = match find_agreeing_measure(&s) {
        Measurability::NotMeasurable(cert) => {
            out.push_str("measure: INFEASIBLE\n");
            write_certificate(&mut out, alg, &cert);
            cert.is_valid(alg.atom_count())
        }
        Measurability::Measurable(_) => {
            out.push_str("measure: MEASURABLE\n");
            false
        }
    };
    let indivisible = matches!(construct_division(&s), Ok(DivisionOutcome::Indivisible(_)));
    let _ = writeln!(
        out,
        "division: {}",
        if indivisible { "INDIVISIBLE" } else { "FOUND" }
    );
    Ok((Outcome::from_bool(axioms && infeasible && indivisible), out))
}

fn undefined(s: &Scaling, e: CfError) -> (Outcome, String) {
    let reason = match e {
        CfError::NotDivided { lesser, greater } => format!(
            "scale is not divided: {} - {} is undefined",
            s.name(ClassId(greater)),
            s.name(ClassId(lesser))
        ),
        other => other.to_string(),
    };
    (Outcome::Fail, format!("UNDEFINED: {reason}\n"))
}

fn cf(file: &str, num: &str, den: &str) -> Handler {
    let (s, scale) = try_load!(load_scale(file));
    let (eta, zeta) = (class_arg(&s, num)?, class_arg(&s, den)?);
    let cf = match continued_fraction(&scale, eta, zeta) {
        Ok(cf) => cf,
        Err(e) => return Ok(undefined(&s, e)),
    };
    let mut out = format!("{num}/{den} = {cf}\nvalue: {}\nconvergents:", cf.value());
    for c in cf.convergents() {
        let _ = write!(out, " {c}");
    }
    out.push('\n');
    Ok((Outcome::Pass, out))
}

fn multiply(file: &str, x: &str, y: &str) -> Handler {
    let (s, scale) = try_load!(load_scale(file));
    let (a, b) = (class_arg(&s, x)?, class_arg(&s, y)?);
    Ok(match scale_multiply(&scale, a, b) {
        Ok(Some(c)) => (Outcome::Pass, format!("{x} * {y} = {}\n", s.name(c))),
        Ok(None) => (
            Outcome::Fail,
            format!("UNDEFINED: {x} * {y} is not a value of the scale\n"),
        ),
        Err(e) => undefined(&s, e),
    })
}

fn prodrule(file: &str, x: &str, z: &str) -> Handler {
    let s = try_load!(load(file));
    let alg = s.algebra();
    let (xb, zb) = (set_arg(alg, x)?, set_arg(alg, z)?);
    let rule = match verify_product_rule(&s, xb, zb) {
        Ok(r) => r,
        Err(e) => return Ok(undefined(&s, e)),
    };
    let (fx, fz, fxz) = (
        alg.format_bits(xb),
        alg.format_bits(zb),
        alg.format_bits(xb & zb),
    );
    let mut out = String::new();
    let _ = writeln!(out, "P({fxz}) = {}", rule.joint);
    let _ = writeln!(out, "P({fx} | {fz}) = {}", rule.conditional);
    let _ = writeln!(out, "P({fz}) = {}", rule.marginal);
    let _ = writeln!(out, "P({fxz}) / P({fz}) = {}", rule.joint_over_marginal);
    let _ = writeln!(out, "P({fx} | {fz}) / 1 = {}", rule.conditional_over_one);
    let ok = rule.passed();
    let _ = writeln!(out, "{}", if ok { "PASS" } else { "FAIL" });
    Ok((Outcome::from_bool(ok), out))
}

fn axioms(file: &str) -> Handler {
    let s = try_load!(load(file));
    if !s.is_linear() {
        return Ok((
            Outcome::Fail,
            "FAIL: totality: the order is not linear, so beliefs are not all comparable\n"
                .to_string(),
        ));
    }
    let n = s.algebra().atom_count();
    let ranks: Vec<u32> = s.assignment().iter().map(|&c| c as u32).collect();
    let bs = BeliefSystem::from_unconditional(n, ranks).map_err(|e| InputError(e.to_string()))?;
    let report = check_axioms(&bs);
    let alg = s.algebra();
    let f = |m: Mask| alg.format_bits(m);
    let mut out = String::new();
    if report.passed() {
        out.push_str("PASS: monotonicity, negation, sure-thing, totality, coherence\n");
        return Ok((Outcome::Pass, out));
    }
    let _ = writeln!(out, "FAIL: {} violations", report.violations.len());
    for v in report.violations.iter().take(20) {
        let line = match *v {
            BeliefViolation::Monotone { corpus, x, y } => {
                format!("monotonicity: {} < {} given {}", f(x), f(y), f(corpus))
            }
            BeliefViolation::Negation { corpus, x, y } => {
                format!("negation: {} and {} given {}", f(x), f(y), f(corpus))
            }
            BeliefViolation::SureThing { z, x, y }
            | BeliefViolation::SureThingStrict { z, x, y } => {
                format!("sure-thing: {} and {} split by {}", f(x), f(y), f(z))
            }
            BeliefViolation::Coherence { z, x, y } => {
                format!("coherence: {} and {} given {}", f(x), f(y), f(z))
            }
        };
        let _ = writeln!(out, "  {line}");
    }
    Ok((Outcome::Fail, out))
}

fn upset(text: &str) -> Result<UPSet, InputError> {
    parse_upset(text).map_err(|e| InputError(format!("{text:?}: {e}")))
}

fn nonarch(command: NonarchCommand) -> Handler {
    let mut out = String::new();
    let outcome = match command {
        NonarchCommand::Ops { a, b } => {
            let (a, b) = (upset(&a)?, upset(&b)?);
            let ops = upset_ops(&a, &b);
            let _ = writeln!(out, "A = {a}\nB = {b}");
            let _ = writeln!(out, "A | B = {}", ops.union);
            let _ = writeln!(out, "A & B = {}", ops.intersection);
            let _ = writeln!(out, "~A = {}", ops.complement);
            let _ = writeln!(out, "A - B = {}", ops.difference);
            let _ = writeln!(out, "|A - B| = {}", ops.difference_cardinality);
            Outcome::Pass
        }
        NonarchCommand::Compare { a, b } => {
            let (a, b) = (upset(&a)?, upset(&b)?);
            let _ = writeln!(out, "rho(A) = {}\nrho(B) = {}", a.galaxy(), b.galaxy());
            let _ = writeln!(out, "{}", rel_word(nonarch_compare(&a, &b)));
            Outcome::Pass
        }
        NonarchCommand::Infinitesimal { a } => {
            let v = upset(&a)?.galaxy();
            let _ = writeln!(out, "rho(A) = {v}");
            match is_infinitesimal(&v) {
                Infinitesimality::Infinitesimal { family } => {
                    let valid = validate_infinitesimal_witness(&v, &family);
                    let _ = writeln!(out, "INFINITESIMAL; pairwise disjoint sets above it:");
                    for x in &family {
                        let _ = writeln!(out, "  {x}");
                    }
                    let _ = writeln!(out, "witness checks: {}", if valid { "yes" } else { "NO" });
                    Outcome::from_bool(valid)
                }
                Infinitesimality::NotInfinitesimal { residue, period } => {
                    let _ = writeln!(
                        out,
                        "NOT INFINITESIMAL: every set at or above it contains almost all of {residue} mod {period}, so no two are disjoint"
                    );
                    Outcome::Fail
                }
            }
        }
        NonarchCommand::Divided { a, b } => {
            let (a, b) = (upset(&a)?, upset(&b)?);
            match divided_witness(&a, &b) {
                Some(b1) => {
                    let _ = writeln!(out, "B1 = {b1}");
                    Outcome::Pass
                }
                None => {
                    let _ = writeln!(out, "UNDEFINED: rho(A) < rho(B) fails");
                    Outcome::Fail
                }
            }
        }
        NonarchCommand::Discontinuity { at } => {
            let r = discontinuity_witness(&at);
            for (n, v) in r.sampled.iter().zip(&r.tail_values) {
                let _ = writeln!(out, "rho(T_{n}) = {v}");
            }
            let _ = writeln!(
                out,
                "meet of the tails: {} with value {}",
                r.meet, r.meet_value
            );
            let _ = writeln!(
                out,
                "lower bound {} below every sampled tail: {}",
                r.lower_bound,
                if r.lower_bound_holds { "yes" } else { "NO" }
            );
            let _ = writeln!(
                out,
                "lower bound above the value of the meet: {}",
                if r.lower_bound_above_meet {
                    "yes"
                } else {
                    "NO"
                }
            );
            let _ = writeln!(
                out,
                "partial sums of singletons below rho(N): {}",
                if r.partial_sums_below_top {
                    "yes"
                } else {
                    "NO"
                }
            );
            let ok = r.passed();
            let _ = writeln!(out, "{}", if ok { "DISCONTINUOUS" } else { "FAIL" });
            Outcome::from_bool(ok)
        }
        NonarchCommand::Shift { a } => {
            let a = upset(&a)?;
            match galaxy_shift_witness(&a) {
                Some(w) => {
                    let _ = writeln!(out, "x = {}", w.x);
                    let _ = writeln!(out, "shifted image of ~x: {}", w.shifted_complement);
                    let _ = writeln!(
                        out,
                        "complement of the shifted image of x: {}",
                        w.complement_of_shifted
                    );
                    out.push_str("relative complements not preserved\n");
                    Outcome::Pass
                }
                None => {
                    out.push_str("UNDEFINED: the galaxy of A cannot be shifted on its own\n");
                    Outcome::Fail
                }
            }
        }
    };
    Ok((outcome, out))
}
