//! Numerical validation of chain members and their closed-form solutions.
//!
//! A chain member `E_N = 0` is solved for the top derivative and integrated
//! as a first-order system with an embedded Runge-Kutta pair. The numerical
//! trajectory is then compared against the closed form evaluated exactly at
//! every accepted step; poles are located beforehand with exact root
//! isolation so an integration interval is known to be safe rather than
//! merely observed to survive.

pub mod rk45;
pub mod roots;

use crate::chains::{generate_chain, ChainEquation, ChainError, ChainFamily};
use crate::kernel::{
    rational_from_f64, rational_to_f64, ratio, DiffPoly, JetMonomial, Poly, Rational,
};
use crate::report::{CheckEntry, CheckStatus, VerificationReport};
use crate::solutions::{
    general_solution, ClosedForm, Constants, GeneralSolution, SolutionError, SolutionEvaluator,
};
use num::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumcheckError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error("step size underflowed at x = {last_x}; the trajectory left the resolvable range")]
    StepUnderflow { last_x: f64 },
    #[error("the solution has a pole at x = {x} inside the requested interval")]
    PoleInInterval { x: f64 },
    #[error("the radicand is non-positive at x = {x}; the branch is not real on the interval")]
    NotRealInterval { x: f64 },
    #[error("tolerance {value} is not a positive finite number")]
    InvalidTolerance { value: f64 },
    #[error("interval bound {value} is not finite")]
    NonFiniteBound { value: f64 },
    #[error("the integration interval is empty")]
    EmptyInterval,
    #[error("order {order} needs {order} initial values, got {got}")]
    StateLength { order: u32, got: usize },
}

/// Density cap for dense output: at least 64 accepted samples per unit
/// length, and at least 256 over any requested interval.
fn dense_max_step(interval: f64) -> f64 {
    f64::min(1.0 / 64.0, interval.abs() / 256.0)
}

const ROOT_WIDTH_DEN: i64 = 1_000_000_000_000;

/// An initial value problem for one chain member, written as a first-order
/// system in `(u, u', ..., u^(N-1))`.
#[derive(Clone, Debug)]
pub struct Ivp {
    pub equation: ChainEquation,
    pub x0: f64,
    pub state: Vec<f64>,
}

impl Ivp {
    pub fn new(equation: ChainEquation, x0: f64, state: Vec<f64>) -> Result<Self, NumcheckError> {
        if state.len() != equation.order as usize {
            return Err(NumcheckError::StateLength {
                order: equation.order,
                got: state.len(),
            });
        }
        if !x0.is_finite() || state.iter().any(|v| !v.is_finite()) {
            return Err(NumcheckError::NonFiniteBound {
                value: if x0.is_finite() { f64::NAN } else { x0 },
            });
        }
        Ok(Ivp {
            equation,
            x0,
            state,
        })
    }

    /// Initial data taken from a closed-form solution at `x0`: the symbolic
    /// derivative tower is evaluated exactly and rounded once per entry.
    pub fn from_solution(
        family: ChainFamily,
        order: u32,
        constants: &[Rational],
        x0: &Rational,
    ) -> Result<Self, NumcheckError> {
        let sol = general_solution(family, order, &Constants::Values(constants.to_vec()))?;
        let evaluator = SolutionEvaluator::new(&sol, order.saturating_sub(1))?;
        let mut state = Vec::with_capacity(order as usize);
        for j in 0..order {
            state.push(evaluator.derivative_at(j, x0)?);
        }
        let equation = generate_chain(family, order)?;
        Ivp::new(equation, rational_to_f64(x0), state)
    }
}

/// An accepted-step record of one integration.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// `(x, state)` at every accepted step, endpoints included; `x` is
    /// strictly monotone in the direction of integration.
    pub samples: Vec<(f64, Vec<f64>)>,
    pub accepted: u64,
    pub rejected: u64,
    pub min_step: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> (f64, &[f64]) {
        let (x, y) = self.samples.last().expect("a trajectory is never empty");
        (*x, y)
    }

    /// u at the final point.
    pub fn final_value(&self) -> f64 {
        self.final_state().1[0]
    }
}

fn check_tolerance(value: f64) -> Result<(), NumcheckError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(NumcheckError::InvalidTolerance { value })
    }
}

fn integrate_with_cap(
    ivp: &Ivp,
    x_end: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_step: f64,
) -> Result<Trajectory, NumcheckError> {
    check_tolerance(rel_tol)?;
    check_tolerance(abs_tol)?;
    if !x_end.is_finite() {
        return Err(NumcheckError::NonFiniteBound { value: x_end });
    }
    if x_end == ivp.x0 {
        return Err(NumcheckError::EmptyInterval);
    }
    let order = ivp.equation.order as usize;
    let rhs_poly = ivp.equation.solved_rhs();
    let f = move |_x: f64, y: &[f64], dy: &mut [f64]| {
        for i in 0..order - 1 {
            dy[i] = y[i + 1];
        }
        dy[order - 1] = rhs_poly.eval_f64(&|jv| y[jv.order as usize]);
    };
    let mut samples = Vec::new();
    let stats = rk45::integrate_adaptive(
        &f,
        ivp.x0,
        &ivp.state,
        x_end,
        rel_tol,
        abs_tol,
        max_step,
        &mut samples,
    )
    .map_err(|u| NumcheckError::StepUnderflow { last_x: u.last_x })?;
    Ok(Trajectory {
        samples,
        accepted: stats.accepted,
        rejected: stats.rejected,
        min_step: stats.min_step,
    })
}

/// Integrates the member's first-order system from `ivp` to `x_end`,
/// recording at least 64 samples per unit interval (256 over the whole
/// range) regardless of how large the controller would like to step.
pub fn integrate(
    ivp: &Ivp,
    x_end: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Trajectory, NumcheckError> {
    integrate_with_cap(ivp, x_end, rel_tol, abs_tol, dense_max_step(x_end - ivp.x0))
}

/// The polynomial whose real roots mark where the closed form stops being
/// usable: the denominator for the rational form, the radicand for the
/// radical one.
fn breakdown_polynomial(sol: &GeneralSolution) -> &Poly {
    match &sol.form {
        ClosedForm::Rational { denominator, .. } => denominator,
        ClosedForm::Radical { radicand, .. } => radicand,
    }
}

fn exact_bound(value: f64) -> Result<Rational, NumcheckError> {
    rational_from_f64(value).ok_or(NumcheckError::NonFiniteBound { value })
}

/// Real roots of the breakdown polynomial inside `[lo, hi]`, each located
/// to width 1e-12. Multiple roots are reported once; the scan works on the
/// square-free part so even roots (no sign change) are still found.
pub fn pole_scan(
    family: ChainFamily,
    order: u32,
    constants: &[Rational],
    lo: f64,
    hi: f64,
) -> Result<Vec<f64>, NumcheckError> {
    let sol = general_solution(family, order, &Constants::Values(constants.to_vec()))?;
    let (a, b) = (exact_bound(lo)?, exact_bound(hi)?);
    let width = ratio(1, ROOT_WIDTH_DEN);
    let found = roots::real_roots_in(breakdown_polynomial(&sol), &a, &b, &width)
        .expect("concrete constants leave a numeric univariate polynomial");
    Ok(found.iter().map(rational_to_f64).collect())
}

/// Outcome of one numeric comparison between the integrated trajectory and
/// the closed form.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub entry: CheckEntry,
    /// max |u_numeric - u_closed| / max |u_closed| over the samples.
    pub deviation: f64,
    pub comparison_points: usize,
    pub trajectory: Trajectory,
}

/// Integrates the order-`order` member with initial data taken from the
/// closed form at `lo` and measures the worst relative deviation over all
/// accepted samples (at least 256 of them). Passes when the deviation stays
/// below `100 * rel_tol`. Fails early with a located root when the interval
/// contains a pole (or, for radical forms, a branch boundary).
pub fn cross_check(
    family: ChainFamily,
    order: u32,
    constants: &[Rational],
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<CrossCheck, NumcheckError> {
    check_tolerance(rel_tol)?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(NumcheckError::NonFiniteBound {
            value: if lo.is_finite() { hi } else { lo },
        });
    }
    if lo >= hi {
        return Err(NumcheckError::EmptyInterval);
    }
    let poles = pole_scan(family, order, constants, lo, hi)?;
    if let Some(&x) = poles.first() {
        return Err(NumcheckError::PoleInInterval { x });
    }
    let sol = general_solution(family, order, &Constants::Values(constants.to_vec()))?;
    if matches!(sol.form, ClosedForm::Radical { .. }) {
        // No radicand roots inside, so one interior sign decides the branch.
        let mid = exact_bound((lo + hi) / 2.0)?;
        let s = roots::sign_at(breakdown_polynomial(&sol), &mid)
            .expect("concrete constants leave a numeric univariate polynomial");
        if s <= 0 {
            return Err(NumcheckError::NotRealInterval {
                x: (lo + hi) / 2.0,
            });
        }
    }

    let x0 = exact_bound(lo)?;
    let ivp = Ivp::from_solution(family, order, constants, &x0)?;
    let trajectory = integrate(&ivp, hi, rel_tol, rel_tol * 1e-3)?;

    let evaluator = SolutionEvaluator::new(&sol, 0)?;
    let mut worst_abs = 0.0f64;
    let mut scale = 0.0f64;
    for (x, y) in &trajectory.samples {
        let exact_x = exact_bound(*x)?;
        let reference = evaluator.derivative_at(0, &exact_x)?;
        worst_abs = worst_abs.max((y[0] - reference).abs());
        scale = scale.max(reference.abs());
    }
    let deviation = if scale > 0.0 {
        worst_abs / scale
    } else {
        worst_abs
    };
    let status = if deviation < 100.0 * rel_tol {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    let entry = CheckEntry::numeric(
        "numerical trajectory matches the closed form",
        Some(family),
        Some(order),
        status,
        deviation,
        format!("crosscheck:{}[{}]", family.name(), order),
    );
    Ok(CrossCheck {
        entry,
        deviation,
        comparison_points: trajectory.samples.len(),
        trajectory,
    })
}

/// A pole-free interval of length 1.25 for the given solution: everything
/// to the right of the last real root of the breakdown polynomial (there
/// the radicand is also positive, since its leading term dominates).
pub fn pole_free_interval(
    family: ChainFamily,
    order: u32,
    constants: &[Rational],
) -> Result<(f64, f64), NumcheckError> {
    let sol = general_solution(family, order, &Constants::Values(constants.to_vec()))?;
    let poly = breakdown_polynomial(&sol);
    let dense = roots::dense_coefficients(poly)
        .expect("concrete constants leave a numeric univariate polynomial");
    // Cauchy bound: all real roots lie within 1 + max |a_i| / |a_n|.
    let lead = dense.last().expect("breakdown polynomial is nonzero");
    let mut bound = Rational::zero();
    for c in &dense[..dense.len() - 1] {
        let q = (c / lead).abs();
        if q > bound {
            bound = q;
        }
    }
    let bound = rational_to_f64(&bound) + 1.0;
    let roots = pole_scan(family, order, constants, -bound, bound)?;
    let right = roots.last().copied().unwrap_or(0.0).max(0.0);
    Ok((right + 0.5, right + 1.75))
}

/// Runs `sets_per_order` cross checks per order with integration constants
/// drawn uniformly from the nonzero integers in [-6, 6], over automatically
/// chosen pole-free intervals. Deterministic in `seed`.
pub fn random_cross_check_grid(
    family: ChainFamily,
    orders: std::ops::RangeInclusive<u32>,
    sets_per_order: u32,
    rel_tol: f64,
    seed: u64,
) -> Result<VerificationReport, NumcheckError> {
    let mut report = VerificationReport::new(format!(
        "randomized numerical cross checks: {}",
        family.name()
    ));
    for order in orders {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(order) << 8));
        for _ in 0..sets_per_order {
            let constants: Vec<Rational> = (0..order)
                .map(|_| {
                    let mut v = 0i64;
                    while v == 0 {
                        v = rng.random_range(-6..=6);
                    }
                    crate::kernel::rat(v)
                })
                .collect();
            let (lo, hi) = pole_free_interval(family, order, &constants)?;
            let outcome = cross_check(family, order, &constants, lo, hi, rel_tol)?;
            report.push(outcome.entry);
        }
    }
    Ok(report)
}

/// Empirical convergence order of the fixed-step integrator, measured by
/// halving the step on u' = -u^2, u(0) = 1 (exact value 1/(1+x)).
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceEstimate {
    pub order: f64,
    pub coarse_error: f64,
    pub fine_error: f64,
}

pub fn convergence_order_estimate() -> ConvergenceEstimate {
    let equation = generate_chain(ChainFamily::Riccati, 1).expect("order one always exists");
    let rhs_poly = equation.solved_rhs();
    let f = move |_x: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = rhs_poly.eval_f64(&|jv| y[jv.order as usize]);
    };
    let exact = 0.5;
    let coarse_error = (rk45::integrate_fixed(&f, 0.0, &[1.0], 1.0, 32)[0] - exact).abs();
    let fine_error = (rk45::integrate_fixed(&f, 0.0, &[1.0], 1.0, 64)[0] - exact).abs();
    ConvergenceEstimate {
        order: (coarse_error / fine_error).log2(),
        coarse_error,
        fine_error,
    }
}

/// Polynomials in the ratios r_j = u^(j)/u, used to push derivatives
/// through the logarithmic derivative without leaving polynomial algebra:
/// (r_j)' = r_{j+1} - r_j * r_1. Keys are exponent vectors over (r_1,
/// r_2, ...); values are integer coefficients.
#[derive(Clone, Debug, Default)]
struct RatioPoly(BTreeMap<Vec<u32>, i64>);

impl RatioPoly {
    fn single(var: usize) -> Self {
        let mut exps = vec![0u32; var + 1];
        exps[var] = 1;
        RatioPoly(BTreeMap::from([(exps, 1)]))
    }

    fn add_term(&mut self, mut exps: Vec<u32>, coeff: i64) {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        match self.0.entry(exps) {
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if *slot.get() == 0 {
                    slot.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(slot) => {
                if coeff != 0 {
                    slot.insert(coeff);
                }
            }
        }
    }

    fn derivative(&self) -> Self {
        let mut out = RatioPoly::default();
        for (exps, coeff) in &self.0 {
            for (var, e) in exps.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                let factor = *coeff * i64::from(*e);
                // d(r_{var+1}) = r_{var+2} - r_{var+1} r_1
                let mut up = exps.clone();
                up[var] -= 1;
                if up.len() < var + 2 {
                    up.resize(var + 2, 0);
                }
                up[var + 1] += 1;
                out.add_term(up, factor);
                let mut cross = exps.clone();
                if cross.is_empty() {
                    cross.push(0);
                }
                cross[0] += 1;
                out.add_term(cross, -factor);
            }
        }
        out
    }

    fn eval(&self, ratios: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (exps, coeff) in &self.0 {
            let mut term = *coeff as f64;
            for (var, e) in exps.iter().enumerate() {
                for _ in 0..*e {
                    term *= ratios[var];
                }
            }
            acc += term;
        }
        acc
    }
}

/// zeta^(k) for k = 0..=top, computed from the state jets (u, ..., u^(N-1))
/// at one point: zeta = u'/u + u^m, the log-derivative part expands in the
/// ratios r_j and the power part is an ordinary jet polynomial.
struct ZetaJets {
    log_parts: Vec<RatioPoly>,
    power_parts: Vec<DiffPoly>,
}

impl ZetaJets {
    fn prepare(m: u32, top: u32) -> Self {
        let mut log_parts = vec![RatioPoly::single(0)];
        let mut power_parts = vec![DiffPoly::from_terms(&[(
            crate::kernel::rat(1),
            JetMonomial::of_u(&[(0, m)]),
        )])];
        for k in 0..top {
            log_parts.push(log_parts[k as usize].derivative());
            power_parts.push(power_parts[k as usize].total_derivative());
        }
        ZetaJets {
            log_parts,
            power_parts,
        }
    }

    /// Values (zeta, zeta', ..., zeta^(top)) from one state vector. The
    /// state must have enough jets: entry k uses u^(k+1) at most.
    fn eval(&self, state: &[f64]) -> Vec<f64> {
        let ratios: Vec<f64> = state[1..].iter().map(|v| v / state[0]).collect();
        self.log_parts
            .iter()
            .zip(&self.power_parts)
            .map(|(log, power)| {
                log.eval(&ratios) + power.eval_f64(&|jv| state[jv.order as usize])
            })
            .collect()
    }
}

/// States at the points of a uniform grid, obtained by one continuous
/// adaptive integration pinned to each grid point in turn.
fn states_on_grid(
    ivp: &Ivp,
    hi: f64,
    n: usize,
    rel_tol: f64,
) -> Result<Vec<Vec<f64>>, NumcheckError> {
    let lo = ivp.x0;
    let h = (hi - lo) / n as f64;
    let mut states = Vec::with_capacity(n + 1);
    states.push(ivp.state.clone());
    let mut current = ivp.clone();
    for i in 1..=n {
        let target = lo + h * i as f64;
        let trajectory = integrate_with_cap(&current, target, rel_tol, rel_tol * 1e-3, h.abs())?;
        let (x, y) = trajectory.final_state();
        current = Ivp::new(current.equation.clone(), x, y.to_vec())?;
        states.push(y.to_vec());
    }
    Ok(states)
}

/// Consistency of the similarity reduction along a numerical trajectory of
/// the order-N member (exponent m): zeta = u'/u + u^m, computed pointwise
/// from the integrated jets, must satisfy the order-(N-1) member of the
/// first-power chain. All zeta-derivatives below the top come exactly from
/// the state; the top one is a fourth-order finite-difference estimate, so
/// it is not fed back from the equation being checked.
pub fn reduction_consistency(
    family: ChainFamily,
    order: u32,
    constants: &[Rational],
    lo: f64,
    hi: f64,
) -> Result<CheckEntry, NumcheckError> {
    assert!(order >= 2, "reduction consistency needs order two or more");
    let poles = pole_scan(family, order, constants, lo, hi)?;
    if let Some(&x) = poles.first() {
        return Err(NumcheckError::PoleInInterval { x });
    }
    let x0 = exact_bound(lo)?;
    let ivp = Ivp::from_solution(family, order, constants, &x0)?;

    let n = ((hi - lo) * 64.0).ceil().max(256.0) as usize;
    let h = (hi - lo) / n as f64;
    let states = states_on_grid(&ivp, hi, n, 1e-11)?;

    let top = order - 1;
    let jets = ZetaJets::prepare(family.exponent(), top - 1);
    let zeta_rows: Vec<Vec<f64>> = states.iter().map(|s| jets.eval(s)).collect();

    let reduced = generate_chain(ChainFamily::Riccati, top)?;
    let mut worst = 0.0f64;
    for i in 2..=n - 2 {
        let row = &zeta_rows[i];
        // 4th-order central first derivative of the highest exact row.
        let col = top as usize - 1;
        let fd = (zeta_rows[i - 2][col] - 8.0 * zeta_rows[i - 1][col]
            + 8.0 * zeta_rows[i + 1][col]
            - zeta_rows[i + 2][col])
            / (12.0 * h);
        let residual = reduced.lhs.eval_f64(&|jv| {
            if jv.order == top {
                fd
            } else {
                row[jv.order as usize]
            }
        });
        worst = worst.max(residual.abs());
    }
    let status = if worst < 1e-6 {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(CheckEntry::numeric(
        "integrated trajectory satisfies the reduced equation",
        Some(family),
        Some(order),
        status,
        worst,
        format!("reduction-numeric:{}[{}]", family.name(), order),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rat;

    fn rats(values: &[i64]) -> Vec<Rational> {
        values.iter().map(|v| rat(*v)).collect()
    }

    #[test]
    fn first_order_decay_reaches_one_half() {
        // u' = -u^2 from u(1) = 1 is u = 1/x
        let eq = generate_chain(ChainFamily::Riccati, 1).unwrap();
        let ivp = Ivp::new(eq, 1.0, vec![1.0]).unwrap();
        let trajectory = integrate(&ivp, 2.0, 1e-10, 1e-12).unwrap();
        assert!((trajectory.final_value() - 0.5).abs() < 1e-9);
        assert!(trajectory.samples.len() > 64);
    }

    #[test]
    fn second_order_member_follows_its_closed_form() {
        // u = 2/x solves the second member; jets at x = 1 are (2, -2)
        let eq = generate_chain(ChainFamily::Riccati, 2).unwrap();
        let ivp = Ivp::new(eq, 1.0, vec![2.0, -2.0]).unwrap();
        let trajectory = integrate(&ivp, 3.0, 1e-10, 1e-12).unwrap();
        assert!((trajectory.final_value() - 2.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn integrating_into_a_pole_underflows() {
        // u' = -u^2 with u(-1/2) = -2 is u = 1/x, blowing up at x = 0
        let eq = generate_chain(ChainFamily::Riccati, 1).unwrap();
        let ivp = Ivp::new(eq, -0.5, vec![-2.0]).unwrap();
        let err = integrate(&ivp, 0.5, 1e-9, 1e-11).unwrap_err();
        match err {
            NumcheckError::StepUnderflow { last_x } => {
                assert!(last_x.abs() < 0.05, "stopped at {last_x}");
            }
            other => panic!("expected a step underflow, got {other:?}"),
        }
    }

    #[test]
    fn initial_data_comes_from_the_derivative_tower() {
        let ivp = Ivp::from_solution(ChainFamily::Riccati, 2, &rats(&[0, 0]), &rat(1)).unwrap();
        assert_eq!(ivp.state, vec![2.0, -2.0]);
    }

    #[test]
    fn pole_scan_finds_a_double_root() {
        let found = pole_scan(ChainFamily::Riccati, 2, &rats(&[0, 0]), -1.0, 1.0).unwrap();
        assert_eq!(found, vec![0.0]);
    }

    #[test]
    fn pole_scan_sees_the_radicand_boundary() {
        let found = pole_scan(ChainFamily::Abel, 2, &rats(&[0, 0]), -1.0, 1.0).unwrap();
        assert_eq!(found, vec![0.0]);
    }

    #[test]
    fn pole_scan_comes_back_empty_without_real_roots() {
        // constants (0, -1/2) give denominator x^2 + 1
        let constants = vec![rat(0), crate::kernel::ratio(-1, 2)];
        let found = pole_scan(ChainFamily::Riccati, 2, &constants, -10.0, 10.0).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn cross_check_passes_on_a_safe_interval() {
        let outcome =
            cross_check(ChainFamily::Riccati, 3, &rats(&[1, 1, 1]), 2.0, 4.0, 1e-9).unwrap();
        assert_eq!(outcome.entry.status, CheckStatus::Pass);
        assert!(outcome.deviation < 1e-7, "deviation {}", outcome.deviation);
        assert!(outcome.comparison_points >= 200);
    }

    #[test]
    fn cross_check_passes_for_the_radical_form() {
        let outcome =
            cross_check(ChainFamily::Abel, 2, &rats(&[0, 1]), 0.5, 3.0, 1e-9).unwrap();
        assert_eq!(outcome.entry.status, CheckStatus::Pass);
        assert!(outcome.deviation < 1e-7, "deviation {}", outcome.deviation);
    }

    #[test]
    fn cross_check_refuses_an_interval_with_a_pole() {
        let err =
            cross_check(ChainFamily::Riccati, 2, &rats(&[0, 0]), -1.0, 1.0, 1e-9).unwrap_err();
        match err {
            NumcheckError::PoleInInterval { x } => assert!(x.abs() < 1e-9),
            other => panic!("expected a pole report, got {other:?}"),
        }
    }

    #[test]
    fn cross_check_refuses_a_negative_radicand() {
        let err =
            cross_check(ChainFamily::Abel, 2, &rats(&[0, 1]), -3.0, -2.0, 1e-9).unwrap_err();
        assert!(matches!(err, NumcheckError::NotRealInterval { .. }));
    }

    #[test]
    fn interval_with_interior_pole_is_reported_not_survived() {
        // The third-order denominator with unit constants has a root
        // between 1 and 2, so [0, 2] is not usable despite looking tame.
        let err =
            cross_check(ChainFamily::Riccati, 3, &rats(&[1, 1, 1]), 0.0, 2.0, 1e-9).unwrap_err();
        match err {
            NumcheckError::PoleInInterval { x } => assert!(x > 1.0 && x < 2.0),
            other => panic!("expected a pole report, got {other:?}"),
        }
    }

    #[test]
    fn chosen_intervals_avoid_poles_by_construction() {
        let (lo, hi) = pole_free_interval(ChainFamily::Riccati, 3, &rats(&[1, 1, 1])).unwrap();
        assert!(hi - lo >= 1.0);
        assert!(pole_scan(ChainFamily::Riccati, 3, &rats(&[1, 1, 1]), lo, hi)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn random_grid_passes_for_both_families() {
        for family in [ChainFamily::Riccati, ChainFamily::Abel] {
            let report = random_cross_check_grid(family, 1..=3, 3, 1e-9, 7).unwrap();
            assert_eq!(report.entries().len(), 9);
            assert_eq!(report.status(), CheckStatus::Pass);
        }
    }

    #[test]
    fn integrator_order_is_at_least_four_and_a_half() {
        let estimate = convergence_order_estimate();
        assert!(
            estimate.order >= 4.5,
            "measured order {} (errors {} / {})",
            estimate.order,
            estimate.coarse_error,
            estimate.fine_error
        );
    }

    #[test]
    fn ratio_polynomials_differentiate_the_log_derivative() {
        // r1' = r2 - r1^2 and r1'' = r3 - 3 r1 r2 + 2 r1^3, checked
        // against u = exp(2x) where r_j = 2^j and every derivative of
        // r1 vanishes.
        let jets = ZetaJets::prepare(1, 2);
        let state = [1.0, 2.0, 4.0, 8.0];
        let values = jets.eval(&state);
        // zeta = r1 + u = 3, zeta' = 0 + u' = 2, zeta'' = 0 + u'' = 4
        assert!((values[0] - 3.0).abs() < 1e-12);
        assert!((values[1] - 2.0).abs() < 1e-12);
        assert!((values[2] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_equation_holds_along_abel_trajectories() {
        for (order, constants) in [(2, rats(&[1, 2])), (3, rats(&[1, 1, 1]))] {
            let (lo, hi) = pole_free_interval(ChainFamily::Abel, order, &constants).unwrap();
            let entry =
                reduction_consistency(ChainFamily::Abel, order, &constants, lo, hi).unwrap();
            assert_eq!(
                entry.status,
                CheckStatus::Pass,
                "order {order}: worst residual {:?}",
                entry.deviation
            );
        }
    }

    #[test]
    fn reduced_equation_holds_along_a_riccati_trajectory() {
        let constants = rats(&[2, 1, 1]);
        let (lo, hi) = pole_free_interval(ChainFamily::Riccati, 3, &constants).unwrap();
        let entry =
            reduction_consistency(ChainFamily::Riccati, 3, &constants, lo, hi).unwrap();
        assert_eq!(entry.status, CheckStatus::Pass);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let eq = generate_chain(ChainFamily::Riccati, 2).unwrap();
        assert!(matches!(
            Ivp::new(eq.clone(), 0.0, vec![1.0]),
            Err(NumcheckError::StateLength { order: 2, got: 1 })
        ));
        let ivp = Ivp::new(eq, 0.0, vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            integrate(&ivp, 0.0, 1e-9, 1e-9),
            Err(NumcheckError::EmptyInterval)
        ));
        assert!(matches!(
            integrate(&ivp, 1.0, -1.0, 1e-9),
            Err(NumcheckError::InvalidTolerance { .. })
        ));
    }
}
