//! Acceptance gate: one test per advertised capability. Each prints a
//! single pass/fail line with the measured detail and must finish inside
//! its pinned wall-clock budget. A mutex serializes the criteria so the
//! timings are not distorted by parallel test scheduling.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use chainlab::chains::{catalog_check, ChainFamily};
use chainlab::numcheck::{
    convergence_order_estimate, pole_free_interval, random_cross_check_grid,
};
use chainlab::parser::{parse_expression, sample_expression};
use chainlab::reduction::reduction_report;
use chainlab::report::{CheckStatus, VerificationReport};
use chainlab::solutions::{printed_solution_check, verify_linearization_witness};
use chainlab::symmetry::{invariance_report, verify_determining_equations};

static GATE: Mutex<()> = Mutex::new(());

fn criterion(
    name: &str,
    budget: Duration,
    run: impl FnOnce() -> Result<String, String>,
) {
    let _serial = GATE.lock().unwrap_or_else(|p| p.into_inner());
    let start = Instant::now();
    let outcome = run();
    let elapsed = start.elapsed();
    match outcome {
        Ok(detail) => {
            println!("pass: {name} ({elapsed:.2?} of {budget:?}) {detail}");
            assert!(
                elapsed <= budget,
                "{name} took {elapsed:?}, budget is {budget:?}"
            );
        }
        Err(msg) => {
            println!("fail: {name} {msg}");
            panic!("{name}: {msg}");
        }
    }
}

fn all_pass(report: &VerificationReport) -> Result<(), String> {
    for e in report.entries() {
        if e.status != CheckStatus::Pass {
            return Err(format!(
                "entry '{}' [{}] is {}",
                e.name, e.anchor, e.status
            ));
        }
    }
    Ok(())
}

#[test]
fn catalog_members_match_the_printed_list() {
    criterion(
        "catalog members match the printed list",
        Duration::from_secs(1),
        || {
            let report = catalog_check();
            all_pass(&report)?;
            if report.errata().len() != 1 {
                return Err(format!(
                    "expected exactly one recorded erratum, found {}",
                    report.errata().len()
                ));
            }
            Ok(format!(
                "{} members term for term, 1 recorded erratum",
                report.entries().len()
            ))
        },
    );
}

#[test]
fn determining_systems_vanish_for_symbolic_c() {
    criterion(
        "determining systems vanish for symbolic c(x)",
        Duration::from_secs(5),
        || {
            let mut checked = 0;
            for family in ChainFamily::ALL {
                let report =
                    verify_determining_equations(family).map_err(|e| e.to_string())?;
                all_pass(&report)?;
                for e in report.entries() {
                    if e.residual.as_deref() != Some("0") {
                        return Err(format!(
                            "{family} residual '{}' is not literally zero",
                            e.name
                        ));
                    }
                }
                checked += report.entries().len();
            }
            if checked != 12 {
                return Err(format!("expected 6 + 6 residuals, found {checked}"));
            }
            Ok("6 + 6 residuals identically zero".to_string())
        },
    );
}

#[test]
fn members_stay_invariant_under_the_shared_generator() {
    criterion(
        "members invariant under the shared generator, orders 1-8",
        Duration::from_secs(120),
        || {
            let mut checked = 0;
            for family in ChainFamily::ALL {
                let report =
                    invariance_report(family, 1..=8).map_err(|e| e.to_string())?;
                all_pass(&report)?;
                checked += report.entries().len();
            }
            Ok(format!("{checked} members, exact to order 8 in both families"))
        },
    );
}

#[test]
fn reductions_hold_from_order_two_through_ten() {
    criterion(
        "order-by-one reductions hold, orders 2-10",
        Duration::from_secs(60),
        || {
            let mut checked = 0;
            for family in ChainFamily::ALL {
                let report =
                    reduction_report(family, 2..=10).map_err(|e| e.to_string())?;
                all_pass(&report)?;
                checked += report.entries().len();
            }
            Ok(format!("{checked} exact factorizations"))
        },
    );
}

#[test]
fn printed_closed_forms_match_with_one_recorded_correction() {
    criterion(
        "printed closed forms match the ladder, one sign corrected",
        Duration::from_secs(60),
        || {
            let report = printed_solution_check();
            all_pass(&report)?;
            if report.errata().len() != 1 {
                return Err(format!(
                    "expected the single recorded sign correction, found {} notes",
                    report.errata().len()
                ));
            }
            if report.entries().len() < 7 {
                return Err(format!(
                    "expected at least 7 printed forms, found {}",
                    report.entries().len()
                ));
            }
            Ok(format!(
                "{} printed forms verified, 1 sign correction recorded",
                report.entries().len()
            ))
        },
    );
}

#[test]
fn linearizing_substitution_stays_general() {
    criterion(
        "linearizing substitution generality witness, orders 1-8",
        Duration::from_secs(60),
        || {
            for order in 1..=8 {
                let entry =
                    verify_linearization_witness(order).map_err(|e| e.to_string())?;
                if entry.status != CheckStatus::Pass {
                    return Err(format!("order {order} witness is {}", entry.status));
                }
            }
            Ok("8 orders carry the two-parameter witness".to_string())
        },
    );
}

#[test]
fn random_trajectories_follow_the_closed_forms() {
    criterion(
        "random trajectories follow the closed forms",
        Duration::from_secs(120),
        || {
            let rel_tol = 1e-9;
            let mut worst: f64 = 0.0;
            let mut checked = 0;
            for family in ChainFamily::ALL {
                let report =
                    random_cross_check_grid(family, 1..=5, 20, rel_tol, 20260814)
                        .map_err(|e| e.to_string())?;
                all_pass(&report)?;
                for e in report.entries() {
                    let d = e
                        .deviation
                        .ok_or_else(|| format!("entry '{}' lost its deviation", e.name))?;
                    if d >= 1e-7 {
                        return Err(format!(
                            "{family} deviation {d:.3e} is not below 1e-7"
                        ));
                    }
                    worst = worst.max(d);
                    checked += 1;
                }
            }
            if checked != 200 {
                return Err(format!("expected 20 sets x 5 orders x 2 families, found {checked}"));
            }
            for family in ChainFamily::ALL {
                for order in 1..=5u32 {
                    let ones: Vec<_> =
                        (0..order).map(|_| chainlab::kernel::rat(1)).collect();
                    let (lo, hi) = pole_free_interval(family, order, &ones)
                        .map_err(|e| e.to_string())?;
                    if hi - lo < 1.0 {
                        return Err(format!(
                            "{family} order {order}: interval [{lo}, {hi}] is shorter than 1"
                        ));
                    }
                }
            }
            Ok(format!(
                "200 trajectories at rel_tol 1e-9, worst deviation {worst:.3e}"
            ))
        },
    );
}

#[test]
fn integrator_converges_at_embedded_order() {
    criterion(
        "fixed-step convergence order is at least 4.5",
        Duration::from_secs(10),
        || {
            let est = convergence_order_estimate();
            if est.order < 4.5 {
                return Err(format!("measured order {:.2}", est.order));
            }
            Ok(format!("measured order {:.2}", est.order))
        },
    );
}

const GOLDEN_RENDERS: &[(&str, &str)] = &[
    ("1", "1"),
    ("x", "x"),
    ("-x", "-x"),
    ("x + 1", "x + 1"),
    ("x+1", "x + 1"),
    ("x - 1", "x - 1"),
    ("2*x", "2*x"),
    ("x/2", "x/2"),
    ("x^2", "x^2"),
    ("x^0", "x^0"),
    ("1/2", "1/2"),
    ("-1/2", "-1/2"),
    ("2/4", "1/2"),
    ("1 + 2", "1 + 2"),
    ("1 - 2 - 3", "1 - 2 - 3"),
    ("(1 - 2) - 3", "1 - 2 - 3"),
    ("1 - (2 - 3)", "1 - (2 - 3)"),
    ("2*(x + 1)", "2*(x + 1)"),
    ("(x + 1)*(x - 1)", "(x + 1)*(x - 1)"),
    ("x*x", "x*x"),
    ("x/x", "x/x"),
    ("x/(2*x)", "x/(2*x)"),
    ("x/2/3", "x/2/3"),
    ("2/3/4", "1/6"),
    ("x^2 + 2*x - 2", "x^2 + 2*x - 2"),
    ("exp(x)", "exp(x)"),
    ("exp(2*x)*x", "exp(2*x)*x"),
    ("x^(1/2)", "x^(1/2)"),
    ("x^(3/2)", "x^(3/2)"),
    ("x^-1", "x^(-1)"),
    ("2^3^2", "2^9"),
    ("(-x)^2", "(-x)^2"),
    ("-x^2", "-x^2"),
    ("-(x + 1)", "-(x + 1)"),
    ("x - -1", "x - -1"),
    ("x*-1", "x*-1"),
    ("x*(-1/2)", "x*(-1/2)"),
    ("1/x", "1/x"),
    ("exp(x^2)", "exp(x^2)"),
    ("exp(x)^2", "exp(x)^2"),
    ("x^(1/2)*x", "x^(1/2)*x"),
    ("(x^2)^3", "(x^2)^3"),
    ("0", "0"),
    ("-0", "0"),
    ("007", "7"),
    (
        "123456789012345678901234567890",
        "123456789012345678901234567890",
    ),
    ("x + x", "x + x"),
    ("2 * 3", "2*3"),
    ("1 + x", "1 + x"),
    ("x/1", "x/1"),
    ("x^(2/4)", "x^(1/2)"),
    ("-exp(x)", "-exp(x)"),
    ("exp(exp(x))", "exp(exp(x))"),
    ("((x))", "x"),
    ("x^1", "x^1"),
    ("x^2*x^3", "x^2*x^3"),
    ("2^-2", "2^(-2)"),
    ("(1/2)^2", "(1/2)^2"),
    ("x - (x)", "x - x"),
    ("-(-x)", "--x"),
    ("x^(0/2)", "x^0"),
    ("- 2", "-2"),
    ("x --1", "x - -1"),
    ("3 - -x", "3 - -x"),
    ("exp(-x)", "exp(-x)"),
    ("x/(1/2)", "x/(1/2)"),
    ("(x + 1)^2", "(x + 1)^2"),
    ("(x + 1)^(1/2)", "(x + 1)^(1/2)"),
    ("x^2^2", "x^4"),
    ("1/2/x", "1/2/x"),
    ("x* - x", "x*-x"),
];

const GOLDEN_ERRORS: &[(&str, usize)] = &[
    ("", 0),
    ("1 +", 3),
    ("(1+2", 4),
    ("2 3", 2),
    ("x^y", 2),
    ("x^(1/3)", 2),
    ("1 + $", 4),
    ("foo", 0),
    ("2*^x", 2),
    ("exp x", 4),
    ("x x", 2),
    ("()", 1),
    (")", 0),
    ("1//2", 2),
    ("^2", 0),
    ("2^", 2),
    ("exp(", 4),
    ("exp()", 4),
    ("(x", 2),
    ("x)", 1),
    ("1.5", 1),
    ("x^x", 2),
    ("exp", 3),
    ("x ^ ^ 2", 4),
    ("2 + +", 4),
    ("[x]", 0),
    ("x & 2", 2),
    ("exp(x", 5),
    ("1^x", 2),
];

#[test]
fn grammar_round_trips_and_pinpoints_errors() {
    criterion(
        "grammar: 100 golden cases and 1000 round trips",
        Duration::from_secs(10),
        || {
            if GOLDEN_RENDERS.len() + GOLDEN_ERRORS.len() != 100 {
                return Err(format!(
                    "golden table holds {} cases, expected 100",
                    GOLDEN_RENDERS.len() + GOLDEN_ERRORS.len()
                ));
            }
            for (src, want) in GOLDEN_RENDERS {
                let got = parse_expression(src)
                    .map_err(|e| format!("{src:?} failed to parse: {e}"))?
                    .text();
                if got != *want {
                    return Err(format!("{src:?} renders {got:?}, expected {want:?}"));
                }
                let again = parse_expression(&got)
                    .map_err(|e| format!("render {got:?} failed to reparse: {e}"))?;
                if again.text() != got {
                    return Err(format!("render {got:?} is not a fixed point"));
                }
            }
            for (src, offset) in GOLDEN_ERRORS {
                match parse_expression(src) {
                    Ok(e) => {
                        return Err(format!(
                            "{src:?} unexpectedly parsed to {}",
                            e.text()
                        ))
                    }
                    Err(e) if e.offset != *offset => {
                        return Err(format!(
                            "{src:?} errored at byte {}, expected {offset}",
                            e.offset
                        ))
                    }
                    Err(_) => {}
                }
            }
            for seed in 0..1000 {
                let tree = sample_expression(seed);
                let text = tree.text();
                let reparsed = parse_expression(&text)
                    .map_err(|e| format!("seed {seed}: {text:?} does not reparse: {e}"))?;
                if reparsed != tree {
                    return Err(format!("seed {seed}: {text:?} changed shape"));
                }
            }
            Ok("71 renders, 29 diagnostics, 1000 stable round trips".to_string())
        },
    );
}
