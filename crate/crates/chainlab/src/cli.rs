//! Command-line front end: parses user input, including c(x) expressions
//! and exact rational constants, drives the other modules, and renders
//! text, LaTeX, or JSON reports.
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure,
//! 2 on a usage or parse error, 3 on an unsupported expression or an
//! internal limitation. Reports go to stdout, diagnostics to stderr.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num::ToPrimitive;

use crate::chains::{
    catalog_check, generate_chain_capped, ChainError, ChainFamily, DEFAULT_MAX_ORDER,
};
use crate::kernel::{
    format_rational, parse_rational, Atom, Canon, Dep, Expr, KernelError, Rational,
};
use crate::numcheck::{
    convergence_order_estimate, cross_check, pole_free_interval, pole_scan,
    random_cross_check_grid, reduction_consistency, NumcheckError,
};
use crate::parser::{parse_expression, SyntaxError};
use crate::reduction::{reduce_chain, reduction_ladder, reduction_report, Reduction, ReductionError};
use crate::report::{CheckEntry, CheckStatus, VerificationReport};
use crate::solutions::{
    general_solution, recursive_solve, printed_solution_check, side_condition,
    solution_report, verify_linearization_witness, Constants, SolutionError,
    SolutionEvaluator,
};
use crate::symmetry::{
    invariance_report, specialized_symmetry_report, symmetry_report,
    verify_determining_equations, SymmetryError,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

/// Everything a finished invocation hands back to the caller.
#[derive(Debug)]
pub struct CliOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Entry point for the binary: parses `std::env::args`, prints, and
/// returns the exit code.
pub fn run_from_env() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let outcome = run_args(&args);
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    outcome.code
}

/// Runs one command given a full argv (program name first). Suited for
/// scripting the exit-code contract without spawning processes.
pub fn run_args<S: AsRef<str>>(args: &[S]) -> CliOutcome {
    let argv: Vec<&str> = args.iter().map(AsRef::as_ref).collect();
    let command_line = argv.get(1..).unwrap_or_default().join(" ");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliOutcome {
                    code: EXIT_PASS,
                    stdout: rendered,
                    stderr: String::new(),
                },
                _ => CliOutcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: rendered,
                },
            };
        }
    };
    match execute(&cli, &command_line) {
        Ok((code, payload)) => CliOutcome {
            code,
            stdout: payload,
            stderr: String::new(),
        },
        Err(e) => CliOutcome {
            code: e.code(),
            stdout: String::new(),
            stderr: format!("error: {}\n", e.message()),
        },
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "chainlab",
    version,
    about = "Riccati and Abel equation chains: members, nonlocal symmetries, \
             reductions, closed-form solutions, and numerical cross checks"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Output format for the emitted report or artifact.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Print one chain member.
    Chain {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        order: u32,
    },
    /// Reduce a member onto the first-power chain one order down.
    Reduce {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        order: u32,
        /// Repeat the reduction all the way down to first order.
        #[arg(long)]
        ladder: bool,
    },
    /// Verify the shared nonlocal symmetry, optionally at a concrete c(x).
    Symmetry {
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        /// Highest member order whose invariance is checked.
        #[arg(long, default_value_t = 4)]
        max_order: u32,
        /// Concrete replacement for the arbitrary function c(x), e.g. "x^2 + 1".
        #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
        c: Option<String>,
    },
    /// Print the closed-form general solution, optionally evaluated.
    Solve {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        order: u32,
        /// Comma-separated exact rational integration constants, e.g. "2/3,-1".
        #[arg(long, allow_hyphen_values = true)]
        constants: Option<String>,
        /// Evaluate the solution at this exact rational point.
        #[arg(long, value_name = "X", allow_hyphen_values = true)]
        eval: Option<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
        method: MethodArg,
    },
    /// Run a verification suite and report per-check results.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        /// Restrict to one family; default is both.
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long, default_value_t = 4)]
        max_order: u32,
    },
    /// Numerical checks: trajectory cross checks, pole scans, reduced-equation
    /// consistency, and the integrator convergence order.
    Numcheck {
        #[arg(long, value_enum, default_value_t = CheckKind::Crosscheck)]
        check: CheckKind,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long)]
        order: Option<u32>,
        /// Comma-separated exact rational integration constants.
        #[arg(long, allow_hyphen_values = true)]
        constants: Option<String>,
        /// Interval "a,b" (decimal bounds allowed). Chosen automatically for
        /// cross checks when omitted.
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
        /// Constant sets per order for the randomized grid.
        #[arg(long, default_value_t = 5)]
        sets: u32,
        #[arg(long, default_value_t = 2026)]
        seed: u64,
        /// Highest order for the randomized grid.
        #[arg(long, default_value_t = 3)]
        max_order: u32,
    },
    /// Assemble the full verification document across all modules.
    Report {
        /// Restrict the per-family sections to one family.
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long, default_value_t = 4)]
        max_order: u32,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Riccati,
    Abel,
}

impl FamilyArg {
    fn family(self) -> ChainFamily {
        match self {
            FamilyArg::Riccati => ChainFamily::Riccati,
            FamilyArg::Abel => ChainFamily::Abel,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Latex,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Frozen denominator ladder.
    Direct,
    /// Through the similarity reduction one order down.
    Reduction,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    /// Generated members against the printed catalog.
    Catalog,
    /// Determining equations with symbolic c(x).
    Determining,
    /// Member invariance under the nonlocal generator.
    Symmetry,
    /// Exact order-by-one reductions.
    Reduction,
    /// Closed forms against the chain members.
    Solutions,
    /// Generality witness for the linearizing substitution.
    Witness,
    /// Printed closed forms against the frozen ladder.
    Printed,
    /// Everything above.
    All,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    /// Integrate the member and compare against the closed form.
    Crosscheck,
    /// Locate movable poles and branch boundaries exactly.
    Poles,
    /// The reduction variable satisfies the reduced equation along
    /// integrated trajectories.
    Reduction,
    /// Measured convergence order of the fixed-step integrator.
    Order,
    /// Randomized cross checks over automatically chosen intervals.
    Grid,
}

enum CliError {
    Usage(String),
    Failed(String),
    Unsupported(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_FAIL,
            CliError::Unsupported(_) => EXIT_UNSUPPORTED,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failed(m) | CliError::Unsupported(m) => m,
        }
    }
}

impl From<ChainError> for CliError {
    fn from(e: ChainError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        CliError::Unsupported(e.to_string())
    }
}

impl From<SyntaxError> for CliError {
    fn from(e: SyntaxError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::OrderTooLow { .. } => CliError::Usage(e.to_string()),
            ReductionError::Chain(inner) => inner.into(),
            _ => CliError::Unsupported(e.to_string()),
        }
    }
}

impl From<SymmetryError> for CliError {
    fn from(e: SymmetryError) -> Self {
        match e {
            SymmetryError::Chain(inner) => inner.into(),
            SymmetryError::Kernel(inner) => inner.into(),
        }
    }
}

impl From<SolutionError> for CliError {
    fn from(e: SolutionError) -> Self {
        match e {
            SolutionError::Chain(inner) => inner.into(),
            SolutionError::Kernel(inner) => inner.into(),
            SolutionError::Reduction(inner) => inner.into(),
            SolutionError::WrongConstantCount { .. }
            | SolutionError::SymbolicConstants => CliError::Usage(e.to_string()),
            SolutionError::PoleAt { .. } | SolutionError::NotReal { .. } => {
                CliError::Failed(e.to_string())
            }
            SolutionError::FormMismatch { .. }
            | SolutionError::DerivativeOutOfRange { .. } => {
                CliError::Unsupported(e.to_string())
            }
        }
    }
}

impl From<NumcheckError> for CliError {
    fn from(e: NumcheckError) -> Self {
        match e {
            NumcheckError::Chain(inner) => inner.into(),
            NumcheckError::Solution(inner) => inner.into(),
            NumcheckError::PoleInInterval { .. }
            | NumcheckError::NotRealInterval { .. }
            | NumcheckError::StepUnderflow { .. } => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// What a verb produced: the report (always renderable as JSON) plus
/// optional plain text and LaTeX forms for artifact-printing verbs.
struct Rendered {
    report: VerificationReport,
    text: Option<String>,
    latex: Option<String>,
}

impl Rendered {
    fn from_report(mut report: VerificationReport) -> Self {
        report.sort_entries();
        Rendered {
            report,
            text: None,
            latex: None,
        }
    }

    fn with_plain(report: VerificationReport, text: String, latex: String) -> Self {
        Rendered {
            report,
            text: Some(text),
            latex: Some(latex),
        }
    }
}

fn execute(cli: &Cli, command_line: &str) -> Result<(i32, String), CliError> {
    let cap = order_cap()?;
    let rendered = match &cli.verb {
        Verb::Chain { family, order } => run_chain(family.family(), *order, cap)?,
        Verb::Reduce {
            family,
            order,
            ladder,
        } => run_reduce(family.family(), *order, *ladder, cap)?,
        Verb::Symmetry {
            family,
            max_order,
            c,
        } => run_symmetry(*family, *max_order, c.as_deref(), cap)?,
        Verb::Solve {
            family,
            order,
            constants,
            eval,
            method,
        } => run_solve(
            family.family(),
            *order,
            constants.as_deref(),
            eval.as_deref(),
            *method,
            cap,
        )?,
        Verb::Verify {
            suite,
            family,
            max_order,
        } => run_verify(*suite, *family, *max_order, cap)?,
        Verb::Numcheck {
            check,
            family,
            order,
            constants,
            interval,
            rel_tol,
            sets,
            seed,
            max_order,
        } => run_numcheck(NumcheckArgs {
            check: *check,
            family: *family,
            order: *order,
            constants: constants.as_deref(),
            interval: interval.as_deref(),
            rel_tol: *rel_tol,
            sets: *sets,
            seed: *seed,
            max_order: *max_order,
            cap,
        })?,
        Verb::Report { family, max_order } => {
            run_report(*family, *max_order, cap)?
        }
    };
    let payload = match cli.format {
        Format::Text => rendered
            .text
            .clone()
            .unwrap_or_else(|| rendered.report.render_text()),
        Format::Latex => rendered
            .latex
            .clone()
            .unwrap_or_else(|| rendered.report.render_latex()),
        Format::Json => {
            let value = rendered.report.render_json(command_line);
            let mut s = serde_json::to_string_pretty(&value)
                .expect("reports serialize without maps of non-string keys");
            s.push('\n');
            s
        }
    };
    let code = match rendered.report.status() {
        CheckStatus::Pass => EXIT_PASS,
        _ => EXIT_FAIL,
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, payload).map_err(|e| {
                CliError::Usage(format!("cannot write {}: {e}", path.display()))
            })?;
            Ok((code, String::new()))
        }
        None => Ok((code, payload)),
    }
}

/// Order ceiling: `CHAINLAB_MAX_ORDER` when set, otherwise the library
/// default.
fn order_cap() -> Result<u32, CliError> {
    match std::env::var("CHAINLAB_MAX_ORDER") {
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_MAX_ORDER),
        Err(e) => Err(CliError::Usage(format!("CHAINLAB_MAX_ORDER: {e}"))),
        Ok(s) => s
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|v| *v >= 1)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "CHAINLAB_MAX_ORDER must be a positive integer, got '{s}'"
                ))
            }),
    }
}

fn enforce_order(requested: u32, min: u32, cap: u32) -> Result<u32, CliError> {
    if requested < min {
        return Err(CliError::Usage(format!(
            "order must be at least {min}, got {requested}"
        )));
    }
    if requested > cap {
        return Err(CliError::Usage(format!(
            "order {requested} exceeds the configured maximum {cap} \
             (raise CHAINLAB_MAX_ORDER to allow it)"
        )));
    }
    Ok(requested)
}

fn families_of(arg: Option<FamilyArg>) -> Vec<ChainFamily> {
    match arg {
        Some(f) => vec![f.family()],
        None => vec![ChainFamily::Riccati, ChainFamily::Abel],
    }
}

fn family_list(families: &[ChainFamily]) -> String {
    families
        .iter()
        .map(|f| f.name())
        .collect::<Vec<_>>()
        .join(", ")
}

fn parse_constants(src: &str) -> Result<Vec<Rational>, CliError> {
    src.split(',')
        .map(|piece| {
            parse_rational(piece).map_err(|e| {
                CliError::Usage(format!("integration constant '{piece}': {e}"))
            })
        })
        .collect()
}

fn parse_interval(src: &str) -> Result<(f64, f64), CliError> {
    let (a, b) = src.split_once(',').ok_or_else(|| {
        CliError::Usage(format!("interval '{src}' must look like \"a,b\""))
    })?;
    let lo: f64 = a.trim().parse().map_err(|_| {
        CliError::Usage(format!("interval bound '{a}' is not a number"))
    })?;
    let hi: f64 = b.trim().parse().map_err(|_| {
        CliError::Usage(format!("interval bound '{b}' is not a number"))
    })?;
    Ok((lo, hi))
}

/// Converts a parsed input expression into a canonical rational function.
/// Exponentials and half-integer powers fall outside the rational class.
fn expr_to_canon(e: &Expr) -> Result<Canon, CliError> {
    match e {
        Expr::Rational(q) => Ok(Canon::constant(q.clone())),
        Expr::Symbol(Atom::X) => Ok(Canon::atom(Atom::X)),
        Expr::Symbol(_) => Err(CliError::Unsupported(
            "the expression may involve the variable x only".into(),
        )),
        Expr::Neg(inner) => Ok(expr_to_canon(inner)?.neg()),
        Expr::Add(a, b) => Ok(expr_to_canon(a)?.add(&expr_to_canon(b)?)),
        Expr::Sub(a, b) => Ok(expr_to_canon(a)?.sub(&expr_to_canon(b)?)),
        Expr::Mul(a, b) => Ok(expr_to_canon(a)?.mul(&expr_to_canon(b)?)),
        Expr::Div(a, b) => expr_to_canon(a)?
            .div(&expr_to_canon(b)?)
            .map_err(|e| CliError::Unsupported(e.to_string())),
        Expr::Pow(base, q) => {
            if !q.is_integer() {
                return Err(CliError::Unsupported(
                    "half-integer powers are outside the rational class \
                     supported here"
                        .into(),
                ));
            }
            let n = q.numer().to_i64().ok_or_else(|| {
                CliError::Unsupported("the exponent is too large".into())
            })?;
            expr_to_canon(base)?
                .pow(n)
                .map_err(|e| CliError::Unsupported(e.to_string()))
        }
        Expr::Exp(_) => Err(CliError::Unsupported(
            "exp(...) is outside the rational class supported here".into(),
        )),
    }
}

fn run_chain(family: ChainFamily, order: u32, cap: u32) -> Result<Rendered, CliError> {
    let eq = generate_chain_capped(family, order, cap)?;
    let mut report = VerificationReport::new(format!(
        "{family} chain member of order {order}"
    ));
    report.push(CheckEntry::symbolic(
        "chain member",
        Some(family),
        Some(order),
        CheckStatus::Pass,
        eq.text(),
        format!("chain:{}[{}]", family.name(), order),
    ));
    let text = format!("{}\n", eq.text());
    let latex = format!("{}\n", eq.latex());
    Ok(Rendered::with_plain(report, text, latex))
}

fn zeta_definition_text(family: ChainFamily) -> String {
    match family.exponent() {
        1 => "zeta = u_x/u + u".to_string(),
        m => format!("zeta = u_x/u + u^{m}"),
    }
}

fn zeta_definition_latex(family: ChainFamily) -> String {
    match family.exponent() {
        1 => r"\zeta = \frac{u_{x}}{u} + u".to_string(),
        m => format!(r"\zeta = \frac{{u_{{x}}}}{{u}} + u^{{{m}}}"),
    }
}

fn run_reduce(
    family: ChainFamily,
    order: u32,
    ladder: bool,
    cap: u32,
) -> Result<Rendered, CliError> {
    enforce_order(order, 2, cap)?;
    let steps: Vec<Reduction> = if ladder {
        reduction_ladder(family, order)?
    } else {
        vec![reduce_chain(family, order)?]
    };
    let mut report = VerificationReport::new(format!(
        "{family} similarity reduction from order {order}"
    ));
    let mut text = String::new();
    let mut latex = String::new();
    for (i, step) in steps.iter().enumerate() {
        let src_family = step.source.family;
        let src_order = step.source.order;
        let renamed = step.target.lhs.rename_dep(Dep::U, Dep::Zeta);
        let residual = step.residual();
        report.push(CheckEntry::symbolic(
            "order drops by one onto the first-power chain",
            Some(src_family),
            Some(src_order),
            if step.is_exact() {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            residual.text(),
            format!("reduction:{}[{}]", src_family.name(), src_order),
        ));
        if steps.len() > 1 {
            text.push_str(&format!("step {}:\n", i + 1));
        }
        let cofactor = if step.cofactor_power == 1 {
            "u".to_string()
        } else {
            format!("u^{}", step.cofactor_power)
        };
        text.push_str(&format!("source: {}\n", step.source.text()));
        text.push_str(&format!(
            "invariant: {}\n",
            zeta_definition_text(src_family)
        ));
        text.push_str(&format!(
            "factored: {} * ({})\n",
            cofactor,
            step.reduced.text()
        ));
        text.push_str(&format!("reduced member: {} = 0\n", renamed.text()));
        text.push_str(&format!("residual: {}\n", residual.text()));
        latex.push_str(&format!(
            "\\[ {} \\;\\Longrightarrow\\; {} = 0, \\qquad {} \\]\n",
            step.source.latex(),
            renamed.latex(),
            zeta_definition_latex(src_family)
        ));
    }
    Ok(Rendered::with_plain(report, text, latex))
}

fn run_symmetry(
    family: Option<FamilyArg>,
    max_order: u32,
    c: Option<&str>,
    cap: u32,
) -> Result<Rendered, CliError> {
    enforce_order(max_order, 1, cap)?;
    let c_canon = match c {
        None => None,
        Some(src) => {
            let expr = parse_expression(src)?;
            Some((expr_to_canon(&expr)?, src))
        }
    };
    let families = families_of(family);
    let mut parts = Vec::new();
    for f in &families {
        let part = match &c_canon {
            None => symmetry_report(*f, max_order)?,
            Some((canon, label)) => {
                specialized_symmetry_report(*f, canon, label, max_order)?
            }
        };
        parts.push(part);
    }
    if parts.len() == 1 {
        Ok(Rendered::from_report(parts.pop().unwrap()))
    } else {
        let subject = match c {
            None => format!("nonlocal symmetry: {}", family_list(&families)),
            Some(src) => format!(
                "nonlocal symmetry at c(x) = {src}: {}",
                family_list(&families)
            ),
        };
        let mut combined = VerificationReport::new(subject);
        for part in parts {
            combined.absorb(part);
        }
        Ok(Rendered::from_report(combined))
    }
}

fn run_solve(
    family: ChainFamily,
    order: u32,
    constants: Option<&str>,
    eval: Option<&str>,
    method: MethodArg,
    cap: u32,
) -> Result<Rendered, CliError> {
    enforce_order(order, 1, cap)?;
    let constants = match constants {
        None => Constants::Symbolic,
        Some(src) => Constants::Values(parse_constants(src)?),
    };
    let sol = match method {
        MethodArg::Direct => general_solution(family, order, &constants)?,
        MethodArg::Reduction => recursive_solve(family, order, &constants)?,
    };
    let mut report = VerificationReport::new(format!(
        "{family} general solution of order {order}"
    ));
    report.push(CheckEntry::symbolic(
        "closed-form general solution",
        Some(family),
        Some(order),
        CheckStatus::Pass,
        sol.text(),
        format!("solve:{}[{}]", family.name(), order),
    ));
    let mut text = format!("u = {}\n", sol.text());
    let mut latex = format!("u = {}\n", sol.latex());
    if matches!(constants, Constants::Symbolic) {
        if let Some(cond) = side_condition(family, order) {
            report.push(CheckEntry::symbolic(
                "domain side condition",
                Some(family),
                Some(order),
                CheckStatus::Pass,
                cond.to_string(),
                format!("solve-domain:{}[{}]", family.name(), order),
            ));
            text.push_str(&format!("valid where: {cond}\n"));
            latex.push_str(&format!("\\text{{valid where }} {cond}\n"));
        }
    }
    if let Some(at) = eval {
        let x = parse_rational(at)
            .map_err(|e| CliError::Usage(format!("evaluation point '{at}': {e}")))?;
        let evaluator = SolutionEvaluator::new(&sol, 0)?;
        let x_str = format_rational(&x);
        match evaluator.derivative_at_rational(0, &x) {
            Ok(value) => {
                let v_str = format_rational(&value);
                report.push(CheckEntry::symbolic(
                    format!("value at x = {x_str}"),
                    Some(family),
                    Some(order),
                    CheckStatus::Pass,
                    v_str.clone(),
                    format!("solve-eval:{}[{}]", family.name(), order),
                ));
                text.push_str(&format!("u({x_str}) = {v_str}\n"));
                latex.push_str(&format!("u({x_str}) = {v_str}\n"));
            }
            Err(SolutionError::FormMismatch { .. }) => {
                let value = evaluator.value_at(&x)?;
                report.push(CheckEntry::numeric(
                    format!("value at x = {x_str}"),
                    Some(family),
                    Some(order),
                    CheckStatus::Pass,
                    value,
                    format!("solve-eval:{}[{}]", family.name(), order),
                ));
                text.push_str(&format!("u({x_str}) = {value}\n"));
                latex.push_str(&format!("u({x_str}) = {value}\n"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Rendered::with_plain(report, text, latex))
}

fn run_verify(
    suite: SuiteArg,
    family: Option<FamilyArg>,
    max_order: u32,
    cap: u32,
) -> Result<Rendered, CliError> {
    let families = families_of(family);
    let needs_two = matches!(
        suite,
        SuiteArg::Symmetry | SuiteArg::Reduction | SuiteArg::All
    );
    enforce_order(max_order, if needs_two { 2 } else { 1 }, cap)?;
    let subject = format!(
        "verify {}: {}",
        match suite {
            SuiteArg::Catalog => "catalog",
            SuiteArg::Determining => "determining equations",
            SuiteArg::Symmetry => "chain invariance",
            SuiteArg::Reduction => "similarity reduction",
            SuiteArg::Solutions => "general solutions",
            SuiteArg::Witness => "linearization witness",
            SuiteArg::Printed => "printed closed forms",
            SuiteArg::All => "all suites",
        },
        family_list(&families)
    );
    let mut report = VerificationReport::new(subject);
    match suite {
        SuiteArg::Catalog => report.absorb(catalog_check()),
        SuiteArg::Determining => {
            for f in &families {
                report.absorb(verify_determining_equations(*f)?);
            }
        }
        SuiteArg::Symmetry => {
            for f in &families {
                report.absorb(invariance_report(*f, 2..=max_order)?);
            }
        }
        SuiteArg::Reduction => {
            for f in &families {
                report.absorb(reduction_report(*f, 2..=max_order)?);
            }
        }
        SuiteArg::Solutions => {
            for f in &families {
                report.absorb(solution_report(*f, 1..=max_order)?);
            }
        }
        SuiteArg::Witness => {
            for n in 1..=max_order {
                report.push(verify_linearization_witness(n)?);
            }
        }
        SuiteArg::Printed => report.absorb(printed_solution_check()),
        SuiteArg::All => {
            report.absorb(catalog_check());
            for f in &families {
                report.absorb(verify_determining_equations(*f)?);
                report.absorb(invariance_report(*f, 2..=max_order)?);
                report.absorb(reduction_report(*f, 2..=max_order)?);
                report.absorb(solution_report(*f, 1..=max_order)?);
            }
            for n in 1..=max_order {
                report.push(verify_linearization_witness(n)?);
            }
            report.absorb(printed_solution_check());
        }
    }
    Ok(Rendered::from_report(report))
}

struct NumcheckArgs<'a> {
    check: CheckKind,
    family: Option<FamilyArg>,
    order: Option<u32>,
    constants: Option<&'a str>,
    interval: Option<&'a str>,
    rel_tol: f64,
    sets: u32,
    seed: u64,
    max_order: u32,
    cap: u32,
}

fn numeric_inputs(
    args: &NumcheckArgs<'_>,
    min_order: u32,
) -> Result<(ChainFamily, u32, Vec<Rational>), CliError> {
    let family = args
        .family
        .ok_or_else(|| CliError::Usage("--family is required for this check".into()))?
        .family();
    let order = args
        .order
        .ok_or_else(|| CliError::Usage("--order is required for this check".into()))?;
    let order = enforce_order(order, min_order, args.cap)?;
    let constants = parse_constants(args.constants.ok_or_else(|| {
        CliError::Usage("--constants is required for this check".into())
    })?)?;
    Ok((family, order, constants))
}

fn run_numcheck(args: NumcheckArgs<'_>) -> Result<Rendered, CliError> {
    match args.check {
        CheckKind::Order => {
            let est = convergence_order_estimate();
            let mut report =
                VerificationReport::new("fixed-step integrator convergence");
            report.push(CheckEntry::numeric(
                "convergence order of the embedded pair",
                None,
                None,
                if est.order >= 4.5 {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                },
                est.order,
                "integrator-order",
            ));
            let text = format!(
                "measured order: {:.2}\ncoarse error: {:.3e}\nfine error: {:.3e}\n",
                est.order, est.coarse_error, est.fine_error
            );
            let latex = format!(
                "\\[ p \\approx {:.2}, \\quad e_{{h}} = {:.3e}, \\quad e_{{h/2}} = {:.3e} \\]\n",
                est.order, est.coarse_error, est.fine_error
            );
            Ok(Rendered::with_plain(report, text, latex))
        }
        CheckKind::Grid => {
            enforce_order(args.max_order, 1, args.cap)?;
            if args.sets == 0 {
                return Err(CliError::Usage("--sets must be at least 1".into()));
            }
            let families = families_of(args.family);
            let mut report = VerificationReport::new(format!(
                "randomized numerical cross checks: {}",
                family_list(&families)
            ));
            for f in &families {
                report.absorb(random_cross_check_grid(
                    *f,
                    1..=args.max_order,
                    args.sets,
                    args.rel_tol,
                    args.seed,
                )?);
            }
            Ok(Rendered::from_report(report))
        }
        CheckKind::Poles => {
            let (family, order, constants) = numeric_inputs(&args, 1)?;
            let (lo, hi) = parse_interval(args.interval.ok_or_else(|| {
                CliError::Usage("--interval is required for a pole scan".into())
            })?)?;
            let roots = pole_scan(family, order, &constants, lo, hi)?;
            let mut report = VerificationReport::new(format!(
                "movable singularity scan on [{lo}, {hi}]"
            ));
            let mut text = String::new();
            if roots.is_empty() {
                report.push(CheckEntry::symbolic(
                    "no movable singularities inside the interval",
                    Some(family),
                    Some(order),
                    CheckStatus::Pass,
                    "none".to_string(),
                    format!("poles:{}[{}]", family.name(), order),
                ));
                text.push_str(&format!(
                    "no poles or branch points in [{lo}, {hi}]\n"
                ));
            }
            for (i, r) in roots.iter().enumerate() {
                report.push(CheckEntry::numeric(
                    format!("movable singularity {}", i + 1),
                    Some(family),
                    Some(order),
                    CheckStatus::Pass,
                    *r,
                    format!("poles:{}[{}].{}", family.name(), order, i + 1),
                ));
                text.push_str(&format!("pole or branch point at x = {r:.12}\n"));
            }
            let latex = format!(
                "\\[ \\{{ {} \\}} \\]\n",
                roots
                    .iter()
                    .map(|r| format!("{r:.12}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            Ok(Rendered::with_plain(report, text, latex))
        }
        CheckKind::Crosscheck => {
            let (family, order, constants) = numeric_inputs(&args, 1)?;
            let (lo, hi) = match args.interval {
                Some(src) => parse_interval(src)?,
                None => pole_free_interval(family, order, &constants)?,
            };
            let mut report = VerificationReport::new(format!(
                "numerical cross check on [{lo}, {hi}]"
            ));
            match cross_check(family, order, &constants, lo, hi, args.rel_tol) {
                Ok(cc) => report.push(cc.entry),
                Err(e) => report.push(interval_failure_entry(family, order, e)?),
            }
            Ok(Rendered::from_report(report))
        }
        CheckKind::Reduction => {
            let (family, order, constants) = numeric_inputs(&args, 2)?;
            let (lo, hi) = parse_interval(args.interval.ok_or_else(|| {
                CliError::Usage(
                    "--interval is required for the reduction consistency check"
                        .into(),
                )
            })?)?;
            let mut report = VerificationReport::new(format!(
                "reduced equation along trajectories on [{lo}, {hi}]"
            ));
            match reduction_consistency(family, order, &constants, lo, hi) {
                Ok(entry) => report.push(entry),
                Err(e) => report.push(interval_failure_entry(family, order, e)?),
            }
            Ok(Rendered::from_report(report))
        }
    }
}

/// Runtime breakdowns of a numeric check become failing entries so the
/// report (and exit code 1) still carries the located obstruction; anything
/// else propagates as a hard error.
fn interval_failure_entry(
    family: ChainFamily,
    order: u32,
    e: NumcheckError,
) -> Result<CheckEntry, CliError> {
    let (name, at) = match &e {
        NumcheckError::PoleInInterval { x } => {
            ("closed form has a pole inside the interval", *x)
        }
        NumcheckError::NotRealInterval { x } => {
            ("closed form is not real on the interval", *x)
        }
        NumcheckError::StepUnderflow { last_x } => {
            ("integration step collapsed", *last_x)
        }
        _ => return Err(e.into()),
    };
    Ok(CheckEntry::numeric(
        name,
        Some(family),
        Some(order),
        CheckStatus::Fail,
        at,
        format!("numcheck-interval:{}[{}]", family.name(), order),
    ))
}

fn run_report(
    family: Option<FamilyArg>,
    max_order: u32,
    cap: u32,
) -> Result<Rendered, CliError> {
    enforce_order(max_order, 2, cap)?;
    let families = families_of(family);
    let mut report = VerificationReport::new(format!(
        "equation chain verification: {}",
        family_list(&families)
    ));
    report.absorb(catalog_check());
    for f in &families {
        report.absorb(symmetry_report(*f, max_order)?);
        report.absorb(reduction_report(*f, 2..=max_order)?);
        report.absorb(solution_report(*f, 1..=max_order)?);
    }
    for n in 1..=max_order {
        report.push(verify_linearization_witness(n)?);
    }
    report.absorb(printed_solution_check());
    Ok(Rendered::from_report(report))
}
