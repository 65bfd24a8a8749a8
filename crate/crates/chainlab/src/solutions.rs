//! Closed-form general solutions of the chains, with exact verification.
//!
//! The first-power chain solves as a logarithmic derivative `u = Q_N'/Q_N`,
//! where the denominators form a ladder: `Q_N` is `N` times the
//! antiderivative of `Q_{N-1}` plus a fresh integration constant. The
//! second-power chain solves as `u = P/sqrt(S)` with polynomial `P` of
//! degree `N-1` and radicand `S` of degree `2N-1` satisfying `S' = 2 P^2`.
//!
//! Verification never touches radical atoms: differentiating `G/Q` or
//! `P*S^(-1/2)` repeatedly produces towers of plain polynomials
//! (`A_{j+1} = A_j' Q - (j+1) A_j Q'` and `T_{j+1} = T_j' S - (2j+1)/2 T_j
//! S'`), and because every chain member is isobaric each of its terms
//! clears to the same denominator power. The residual is therefore a
//! single polynomial whose canonical form decides the check.

use num::{One, Signed, Zero};

use crate::chains::{generate_chain, ChainError, ChainFamily};
use crate::kernel::{
    rat, ratio, rational_to_f64, sqrt_poly, Atom, Canon, KernelError, Poly, Rational,
};
use crate::reduction::{reduce_chain, ReductionError};
use crate::report::{CheckEntry, CheckStatus, VerificationReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolutionError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("order {order} needs {order} integration constants, got {got}")]
    WrongConstantCount { order: u32, got: usize },
    #[error("solution form does not fit the {family} chain: {detail}")]
    FormMismatch { family: ChainFamily, detail: String },
    #[error("numeric evaluation needs numeric integration constants")]
    SymbolicConstants,
    #[error("the solution has a pole at x = {x}")]
    PoleAt { x: f64 },
    #[error("the radicand is negative at x = {x}; the branch is not real there")]
    NotReal { x: f64 },
    #[error("derivative order {requested} exceeds the prepared order {available}")]
    DerivativeOutOfRange { requested: u32, available: u32 },
}

/// Integration constants for a solution of order `N`: either symbolic
/// `k_1..k_N` or concrete rational values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constants {
    Symbolic,
    Values(Vec<Rational>),
}

impl Constants {
    fn polys(&self, order: u32) -> Result<Vec<Poly>, SolutionError> {
        match self {
            Constants::Symbolic => {
                Ok((1..=order).map(|i| Poly::atom(Atom::K(i))).collect())
            }
            Constants::Values(v) => {
                if v.len() != order as usize {
                    return Err(SolutionError::WrongConstantCount {
                        order,
                        got: v.len(),
                    });
                }
                Ok(v.iter().map(|q| Poly::constant(q.clone())).collect())
            }
        }
    }
}

/// A closed-form candidate solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    /// `u = numerator / denominator`.
    Rational { numerator: Poly, denominator: Poly },
    /// `u = numerator / sqrt(radicand)`.
    Radical { numerator: Poly, radicand: Poly },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralSolution {
    pub family: ChainFamily,
    pub order: u32,
    pub form: ClosedForm,
}

impl GeneralSolution {
    pub fn text(&self) -> String {
        match &self.form {
            ClosedForm::Rational {
                numerator,
                denominator,
            } => format!("({})/({})", numerator.text(), denominator.text()),
            ClosedForm::Radical {
                numerator,
                radicand,
            } => format!("({})/sqrt({})", numerator.text(), radicand.text()),
        }
    }

    pub fn latex(&self) -> String {
        match &self.form {
            ClosedForm::Rational {
                numerator,
                denominator,
            } => format!(
                r"\frac{{{}}}{{{}}}",
                numerator.latex(),
                denominator.latex()
            ),
            ClosedForm::Radical {
                numerator,
                radicand,
            } => format!(
                r"\frac{{{}}}{{\sqrt{{{}}}}}",
                numerator.latex(),
                radicand.latex()
            ),
        }
    }
}

fn dx(p: &Poly) -> Poly {
    p.formal_partial(&Atom::X)
}

fn antiderivative(p: &Poly) -> Poly {
    p.antiderivative_x()
        .expect("solution polynomials contain no radicals")
}

/// Ladder weights for the fresh constant at each rung. The first four are
/// fixed by the catalog of closed forms; later rungs keep the antiderivative
/// normalization `alpha_N = N`.
fn alpha(n: u32) -> Rational {
    match n {
        1 => rat(1),
        2 => rat(-2),
        3 => rat(-3),
        4 => rat(4),
        _ => rat(i64::from(n)),
    }
}

/// Denominator ladder `Q_1, ..., Q_order` with supplied constant inserts:
/// `Q_1 = x + c_1`, `Q_N = N * int(Q_{N-1}) + alpha_N * c_N`.
pub fn denominator_ladder(order: u32, consts: &[Poly]) -> Vec<Poly> {
    assert_eq!(consts.len(), order as usize);
    let mut ladder: Vec<Poly> = Vec::with_capacity(order as usize);
    for n in 1..=order {
        let prev = if n == 1 {
            Poly::one()
        } else {
            ladder[(n - 2) as usize].clone()
        };
        let q = antiderivative(&prev)
            .scale(&rat(i64::from(n)))
            .add(&consts[(n - 1) as usize].scale(&alpha(n)));
        ladder.push(q);
    }
    ladder
}

/// Product of the odd numbers `3 * 5 * ... * (2N-1)`; the squared scale
/// that clears the radical-form normalization to rational coefficients.
fn odd_product_squared_scale(order: u32) -> Rational {
    let mut p = Rational::one();
    for j in 2..=i64::from(order) {
        p *= rat(2 * j - 1);
    }
    p
}

/// General solution of the first-power chain member of this order:
/// `u = Q_N'/Q_N` along the denominator ladder.
pub fn riccati_solution(
    order: u32,
    constants: &Constants,
) -> Result<GeneralSolution, SolutionError> {
    if order == 0 {
        return Err(SolutionError::Chain(ChainError::OrderZero));
    }
    let consts = constants.polys(order)?;
    let ladder = denominator_ladder(order, &consts);
    let q = ladder.last().unwrap().clone();
    Ok(GeneralSolution {
        family: ChainFamily::Riccati,
        order,
        form: ClosedForm::Rational {
            numerator: dx(&q),
            denominator: q,
        },
    })
}

/// General solution of the second-power chain member: `u = P/sqrt(S)` with
/// monic core `x^(N-1) + c_1 x^(N-2) + ... + c_{N-1}`, both sides scaled by
/// the odd product so that `S' = 2 P^2` holds with rational coefficients.
pub fn abel_solution(
    order: u32,
    constants: &Constants,
) -> Result<GeneralSolution, SolutionError> {
    if order == 0 {
        return Err(SolutionError::Chain(ChainError::OrderZero));
    }
    let consts = constants.polys(order)?;
    let scale = odd_product_squared_scale(order);
    let mut core = Poly::atom_pow(Atom::X, order - 1);
    for (i, c) in consts.iter().take((order - 1) as usize).enumerate() {
        let power = order - 2 - i as u32;
        core = core.add(&c.mul(&Poly::atom_pow(Atom::X, power)));
    }
    let p = core.scale(&scale);
    // S = 2 * scale^2 * int(core^2) + scale^2 * c_N, so S' = 2 P^2
    let scale_sq = scale.clone() * scale.clone();
    let s = antiderivative(&core.mul(&core))
        .scale(&(scale_sq.clone() * rat(2)))
        .add(&consts[(order - 1) as usize].scale(&scale_sq));
    Ok(GeneralSolution {
        family: ChainFamily::Abel,
        order,
        form: ClosedForm::Radical {
            numerator: p,
            radicand: s,
        },
    })
}

pub fn general_solution(
    family: ChainFamily,
    order: u32,
    constants: &Constants,
) -> Result<GeneralSolution, SolutionError> {
    match family {
        ChainFamily::Riccati => riccati_solution(order, constants),
        ChainFamily::Abel => abel_solution(order, constants),
    }
}

/// Solves through the similarity reduction instead of the frozen ladder:
/// the reduced equation is a first-power member one order down, its
/// solution is the logarithmic derivative `zeta = Q'/Q`, and recovering `u`
/// from `zeta = u_x/u + u^m` is one linear substitution step. For `m = 1`
/// this reproduces the ladder solution literally; for `m = 2` it gives
/// `u = Q/sqrt(2 int(Q^2) + c_N)`.
pub fn recursive_solve(
    family: ChainFamily,
    order: u32,
    constants: &Constants,
) -> Result<GeneralSolution, SolutionError> {
    if order < 2 {
        // No reduction below order two; fall back to the direct form.
        return general_solution(family, order, constants);
    }
    let consts = constants.polys(order)?;
    let inner = denominator_ladder(order - 1, &consts[..(order - 1) as usize]);
    let q = inner.last().unwrap().clone();
    let last = &consts[(order - 1) as usize];
    match family {
        ChainFamily::Riccati => {
            // w = 1/u turns the recovery into (Q w)' = Q, so
            // u = Q / (int(Q) + alpha_N c_N / N); scaling both sides by N
            // lands exactly on the ladder pair (Q_N', Q_N).
            let n = rat(i64::from(order));
            let numerator = q.scale(&n);
            let denominator = antiderivative(&q)
                .scale(&n)
                .add(&last.scale(&alpha(order)));
            Ok(GeneralSolution {
                family,
                order,
                form: ClosedForm::Rational {
                    numerator,
                    denominator,
                },
            })
        }
        ChainFamily::Abel => {
            // w = u^(-2) turns the recovery into (Q^2 w)' = 2 Q^2, so
            // u = Q / sqrt(2 int(Q^2) + c_N).
            let radicand = antiderivative(&q.mul(&q)).scale(&rat(2)).add(last);
            Ok(GeneralSolution {
                family,
                order,
                form: ClosedForm::Radical {
                    numerator: q,
                    radicand,
                },
            })
        }
    }
}

/// Linearizing witness of generality for the first-power chain: for an
/// arbitrary polynomial `psi = a_0 + a_1 x + ... + a_N x^N` with symbolic
/// coefficients, `u = psi'/psi` solves the order-`N` member. Its `N`
/// projective degrees of freedom are the full constant count.
pub fn linearization_witness(order: u32) -> GeneralSolution {
    let mut psi = Poly::zero();
    for i in 0..=order {
        psi = psi.add(&Poly::atom(Atom::Coeff(i)).mul(&Poly::atom_pow(Atom::X, i)));
    }
    GeneralSolution {
        family: ChainFamily::Riccati,
        order,
        form: ClosedForm::Rational {
            numerator: dx(&psi),
            denominator: psi,
        },
    }
}

/// Verifies the witness through the defining recursion instead of the
/// expanded member: substituting `u = psi'/psi` into member `k` yields
/// `psi^(k+1)/psi`, each step one derivative and one product, so the
/// order-`N` member vanishes exactly because `psi` has degree `N`. This
/// keeps every intermediate small and reaches high orders quickly.
pub fn verify_linearization_witness(order: u32) -> Result<CheckEntry, SolutionError> {
    let witness = linearization_witness(order);
    let ClosedForm::Rational {
        numerator,
        denominator,
    } = &witness.form
    else {
        unreachable!()
    };
    let u = Canon::fraction(numerator.clone(), denominator.clone())?;
    let mut member = u.partial(&Atom::X)?.add(&u.mul(&u));
    for _ in 1..order {
        member = member.partial(&Atom::X)?.add(&u.mul(&member));
    }
    let zero = member.is_zero()?;
    Ok(CheckEntry::symbolic(
        "logarithmic derivative of a full-degree polynomial solves the member",
        Some(ChainFamily::Riccati),
        Some(order),
        if zero {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        member.text(),
        format!("witness:riccati[{order}]"),
    ))
}

/// Derivative towers for `u = G/Q`: `A_0 = G`,
/// `A_{j+1} = A_j' Q - (j+1) A_j Q'`, giving `u^(j) = A_j / Q^(j+1)`.
fn rational_towers(g: &Poly, q: &Poly, upto: u32) -> Vec<Poly> {
    let qp = dx(q);
    let mut towers = vec![g.clone()];
    for j in 0..upto {
        let a = towers.last().unwrap();
        let next = dx(a)
            .mul(q)
            .sub(&a.mul(&qp).scale(&rat(i64::from(j) + 1)));
        towers.push(next);
    }
    towers
}

/// Derivative towers for `u = P * S^(-1/2)`: `T_0 = P`,
/// `T_{j+1} = T_j' S - (2j+1)/2 T_j S'`, giving
/// `u^(j) = T_j * S^(-(2j+1)/2)`.
fn radical_towers(p: &Poly, s: &Poly, upto: u32) -> Vec<Poly> {
    let sp = dx(s);
    let mut towers = vec![p.clone()];
    for j in 0..upto {
        let t = towers.last().unwrap();
        let next = dx(t)
            .mul(s)
            .sub(&t.mul(&sp).scale(&ratio(2 * i64::from(j) + 1, 2)));
        towers.push(next);
    }
    towers
}

/// The exact residual of a closed form in a chain member, cleared to one
/// denominator power. The claim holds iff `numerator` is the zero
/// polynomial.
#[derive(Clone, Debug)]
pub struct ResidualCertificate {
    pub family: ChainFamily,
    pub order: u32,
    /// Residual times the uniform clearing denominator.
    pub numerator: Poly,
    /// Human-readable description of the clearing factor.
    pub clearing: String,
}

impl ResidualCertificate {
    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }
}

/// Substitutes the closed form into its chain member and clears the
/// uniform denominator exactly.
pub fn verify_solution_symbolic(
    sol: &GeneralSolution,
) -> Result<ResidualCertificate, SolutionError> {
    let eq = generate_chain(sol.family, sol.order)?;
    let m = sol.family.exponent();
    let (towers, clearing) = match (&sol.form, sol.family) {
        (
            ClosedForm::Rational {
                numerator,
                denominator,
            },
            ChainFamily::Riccati,
        ) => (
            rational_towers(numerator, denominator, sol.order),
            format!("Q^{}", sol.order + 1),
        ),
        (
            ClosedForm::Radical {
                numerator,
                radicand,
            },
            ChainFamily::Abel,
        ) => {
            // u = P/sqrt(S) is invariant under (P, S) -> (P/c, S/c^2)
            // for positive c; stripping the content keeps the tower
            // coefficients small.
            let c = numerator.content_and_primitive().0.abs();
            let (p, s) = if c.is_zero() || c.is_one() {
                (numerator.clone(), radicand.clone())
            } else {
                (
                    numerator.scale(&(Rational::one() / c.clone())),
                    radicand.scale(&(Rational::one() / (c.clone() * c))),
                )
            };
            (
                radical_towers(&p, &s, sol.order),
                format!("S^({}/2) up to a positive rescaling", 2 * sol.order + 1),
            )
        }
        (form, family) => {
            let detail = match form {
                ClosedForm::Rational { .. } => "rational form against the second-power chain",
                ClosedForm::Radical { .. } => "radical form against the first-power chain",
            };
            return Err(SolutionError::FormMismatch {
                family,
                detail: detail.to_string(),
            });
        }
    };
    // Isobaric weights make every term clear to the same power, so the
    // residual numerator is a plain polynomial sum.
    let mut numerator = Poly::zero();
    let target = u64::from(sol.order * m + 1);
    for (mono, coeff) in eq.lhs.terms() {
        debug_assert_eq!(mono.scaled_weight(m), target);
        let mut term = Poly::constant(coeff.clone());
        for (jv, e) in mono.variables() {
            term = term.mul(&towers[jv.order as usize].pow(e));
        }
        numerator = numerator.add(&term);
    }
    Ok(ResidualCertificate {
        family: sol.family,
        order: sol.order,
        numerator,
        clearing,
    })
}

/// Largest order verified by expanding the full member in reports. The
/// residual towers are isobaric in the constants, so their term count
/// grows superexponentially with the order; beyond this point reports
/// switch to the reduction-factorized proof, which is equally symbolic
/// but linear in the order.
pub const SYMBOLIC_VERIFY_CAP: u32 = 4;

/// Fully symbolic verification through the chain structure instead of the
/// expanded member. Three exact identities compose into the claim:
///
/// 1. the pair identity (`numerator = Q'` for the rational form,
///    `S' = 2 P^2` for the radical form), checked as polynomials;
/// 2. `u_x/u + u^m = P'/P` where `P` is `Q'` or the radical numerator,
///    computed in closed form, so the similarity variable of the solution
///    is itself a logarithmic derivative;
/// 3. the reduction factorization `E_N = u * R_{N-1}(zeta)`, re-derived
///    exactly for this order, together with the telescoped recursion
///    `R_{N-1}[P'/P] = P^(N)/P`, which vanishes because `deg P = N - 1`.
///
/// Each leg runs in this call; nothing is cited. Unlike the expanded
/// towers this stays small at every order.
pub fn verify_solution_via_reduction(
    sol: &GeneralSolution,
) -> Result<CheckEntry, SolutionError> {
    let m = sol.family.exponent();
    let name = "closed form verified through the reduction factorization";
    let fail = |detail: String| {
        CheckEntry::symbolic(
            name,
            Some(sol.family),
            Some(sol.order),
            CheckStatus::Fail,
            detail,
            format!("solution-factorized:{}[{}]", sol.family.name(), sol.order),
        )
    };
    let pass = || {
        CheckEntry::symbolic(
            name,
            Some(sol.family),
            Some(sol.order),
            CheckStatus::Pass,
            "0".to_string(),
            format!("solution-factorized:{}[{}]", sol.family.name(), sol.order),
        )
    };

    // Leg 1: pair identity, and the log-derivative core P.
    let (p, u) = match (&sol.form, sol.family) {
        (
            ClosedForm::Rational {
                numerator,
                denominator,
            },
            ChainFamily::Riccati,
        ) => {
            if *numerator != dx(denominator) {
                return Ok(fail(
                    "numerator is not the derivative of the denominator".to_string(),
                ));
            }
            let u = Canon::fraction(numerator.clone(), denominator.clone())?;
            (numerator.clone(), u)
        }
        (
            ClosedForm::Radical {
                numerator,
                radicand,
            },
            ChainFamily::Abel,
        ) => {
            if dx(radicand) != numerator.mul(numerator).scale(&rat(2)) {
                return Ok(fail(
                    "radicand derivative is not twice the squared numerator".to_string(),
                ));
            }
            let root = sqrt_poly(radicand)?;
            let u = Canon::from_poly(numerator.clone())
                .div(&Canon::from_poly(root))?;
            (numerator.clone(), u)
        }
        (form, family) => {
            let detail = match form {
                ClosedForm::Rational { .. } => "rational form against the second-power chain",
                ClosedForm::Radical { .. } => "radical form against the first-power chain",
            };
            return Err(SolutionError::FormMismatch {
                family,
                detail: detail.to_string(),
            });
        }
    };
    if p.is_zero() {
        return Ok(fail("log-derivative core is zero".to_string()));
    }

    // Order one has no reduction: substitute directly.
    if sol.order == 1 {
        let residual = u
            .partial(&Atom::X)?
            .add(&u.pow(i64::from(m) + 1)?);
        return Ok(if residual.is_zero()? {
            pass()
        } else {
            fail(format!("first member residual {}", residual.text()))
        });
    }

    // Leg 2: the similarity variable of this solution is P'/P.
    let u_pow_m = u.pow(i64::from(m))?;
    let zeta_of_u = u.partial(&Atom::X)?.div(&u)?.add(&u_pow_m);
    let log_derivative = Canon::fraction(dx(&p), p.clone())?;
    if !zeta_of_u.sub(&log_derivative).is_zero()? {
        return Ok(fail(format!(
            "u_x/u + u^{m} differs from the log derivative: {}",
            zeta_of_u.sub(&log_derivative).text()
        )));
    }

    // Leg 3a: the member factors through the reduction for this order.
    let red = reduce_chain(sol.family, sol.order)?;
    if !red.is_exact() {
        return Ok(fail(format!(
            "reduction factorization residual {}",
            red.residual().text()
        )));
    }

    // Leg 3b: telescoped recursion for the reduced first-power chain at
    // zeta = P'/P; each step divides out one power of P, so the final
    // numerator is the order-th derivative of the degree (order-1) core.
    let zeta = log_derivative;
    let mut member = zeta.partial(&Atom::X)?.add(&zeta.mul(&zeta));
    for _ in 2..sol.order {
        member = member.partial(&Atom::X)?.add(&zeta.mul(&member));
    }
    Ok(if member.is_zero()? {
        pass()
    } else {
        fail(format!("reduced member residual {}", member.text()))
    })
}

/// Exact verification at concrete rational constants: the towers become
/// univariate in x, and the cleared residual is decided exactly. A zero
/// here certifies the solution for that constant set, not generically.
pub fn verify_solution_at_constants(
    family: ChainFamily,
    order: u32,
    constants: &[Rational],
) -> Result<ResidualCertificate, SolutionError> {
    let sol = general_solution(family, order, &Constants::Values(constants.to_vec()))?;
    verify_solution_symbolic(&sol)
}

/// Repeats `verify_solution_at_constants` over a deterministic pseudo-random
/// grid of constant sets. Integer draws keep the tower coefficients from
/// compounding denominators; the residual is polynomial in the constants,
/// so integer points probe the same identity.
pub fn verify_solution_sampled(
    family: ChainFamily,
    order: u32,
    samples: u32,
    seed: u64,
) -> Result<CheckEntry, SolutionError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
        seed ^ (u64::from(order) << 8) ^ u64::from(family.exponent()),
    );
    let mut failures = Vec::new();
    for _ in 0..samples {
        let constants: Vec<Rational> = (0..order)
            .map(|_| rat(rng.random_range(-12..=12)))
            .collect();
        let cert = verify_solution_at_constants(family, order, &constants)?;
        if !cert.is_zero() {
            failures.push(format!(
                "constants {:?}: residual {}",
                constants
                    .iter()
                    .map(crate::kernel::format_rational)
                    .collect::<Vec<_>>(),
                cert.numerator.text()
            ));
        }
    }
    let status = if failures.is_empty() {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(CheckEntry::symbolic(
        format!("closed form satisfies the chain member at {samples} sampled constant sets"),
        Some(family),
        Some(order),
        status,
        if failures.is_empty() {
            "0".to_string()
        } else {
            failures.join("; ")
        },
        format!("solution-sampled:{}[{}]", family.name(), order),
    ))
}

/// Verifies the constructed general solution of each order in the range
/// with fully symbolic constants: by expanding the member up to
/// `SYMBOLIC_VERIFY_CAP`, and through the reduction factorization beyond
/// it, where expansion no longer fits.
pub fn solution_report(
    family: ChainFamily,
    orders: std::ops::RangeInclusive<u32>,
) -> Result<VerificationReport, SolutionError> {
    let mut report = VerificationReport::new(format!("{family} general solutions"));
    for n in orders {
        let sol = general_solution(family, n, &Constants::Symbolic)?;
        if n <= SYMBOLIC_VERIFY_CAP {
            let cert = verify_solution_symbolic(&sol)?;
            report.push(CheckEntry::symbolic(
                "closed form satisfies the chain member",
                Some(family),
                Some(n),
                if cert.is_zero() {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                },
                cert.numerator.text(),
                format!("solution:{}[{}]", family.name(), n),
            ));
        } else {
            report.push(verify_solution_via_reduction(&sol)?);
        }
    }
    Ok(report)
}

/// Side conditions attached to specific printed closed forms, transcribed
/// verbatim and surfaced, never interpreted.
pub fn side_condition(family: ChainFamily, order: u32) -> Option<&'static str> {
    match (family, order) {
        (ChainFamily::Abel, 3) => Some("4k2 - 4k1^2 > 0"),
        _ => None,
    }
}

fn k(i: u32) -> Poly {
    Poly::atom(Atom::K(i))
}

fn x_pow(e: u32) -> Poly {
    Poly::atom_pow(Atom::X, e)
}

/// The printed closed forms, transcribed coefficient by coefficient.
/// First-power orders 1..4 as denominator-ladder members; second-power
/// orders 2..4 as `(core, radicand)` in the printed normalization
/// `u = sqrt(scale) * core / sqrt(radicand)`.
pub fn printed_denominators() -> Vec<Poly> {
    vec![
        // x + k1
        x_pow(1).add(&k(1)),
        // x^2 + 2 k1 x - 2 k2
        x_pow(2)
            .add(&k(1).mul(&x_pow(1)).scale(&rat(2)))
            .sub(&k(2).scale(&rat(2))),
        // x^3 + 3 k1 x^2 - 6 k2 x - 3 k3
        x_pow(3)
            .add(&k(1).mul(&x_pow(2)).scale(&rat(3)))
            .sub(&k(2).mul(&x_pow(1)).scale(&rat(6)))
            .sub(&k(3).scale(&rat(3))),
        // x^4 + 4 k1 x^3 - 12 k2 x^2 - 12 k3 x + 4 k4
        x_pow(4)
            .add(&k(1).mul(&x_pow(3)).scale(&rat(4)))
            .sub(&k(2).mul(&x_pow(2)).scale(&rat(12)))
            .sub(&k(3).mul(&x_pow(1)).scale(&rat(12)))
            .add(&k(4).scale(&rat(4))),
    ]
}

/// Printed second-power forms: `(scale, core, radicand)` for orders 2..4.
pub fn printed_radical_forms() -> Vec<(Rational, Poly, Poly)> {
    vec![
        (
            rat(3),
            // x + k1
            x_pow(1).add(&k(1)),
            // 2x^3 + 6 k1 x^2 + 6 k1^2 x + 3 k2
            x_pow(3)
                .scale(&rat(2))
                .add(&k(1).mul(&x_pow(2)).scale(&rat(6)))
                .add(&k(1).pow(2).mul(&x_pow(1)).scale(&rat(6)))
                .add(&k(2).scale(&rat(3))),
        ),
        (
            rat(15),
            // x^2 + k1 x + k2
            x_pow(2).add(&k(1).mul(&x_pow(1))).add(&k(2)),
            // 6x^5 + 15 k1 x^4 + (20 k2 + 10 k1^2) x^3 + 30 k1 k2 x^2
            //   + 30 k2^2 x + 15 k3
            x_pow(5)
                .scale(&rat(6))
                .add(&k(1).mul(&x_pow(4)).scale(&rat(15)))
                .add(
                    &k(2)
                        .scale(&rat(20))
                        .add(&k(1).pow(2).scale(&rat(10)))
                        .mul(&x_pow(3)),
                )
                .add(&k(1).mul(&k(2)).mul(&x_pow(2)).scale(&rat(30)))
                .add(&k(2).pow(2).mul(&x_pow(1)).scale(&rat(30)))
                .add(&k(3).scale(&rat(15))),
        ),
        (
            rat(105),
            // x^3 + k1 x^2 + k2 x + k3
            x_pow(3)
                .add(&k(1).mul(&x_pow(2)))
                .add(&k(2).mul(&x_pow(1)))
                .add(&k(3)),
            // 30x^7 + 70 k1 x^6 + (84 k2 + 42 k1^2) x^5
            //   + (105 k3 + 105 k1 k2) x^4 + (140 k1 k3 + 70 k2^2) x^3
            //   + 210 k2 k3 x^2 + 210 k3^2 x + 105 k4
            x_pow(7)
                .scale(&rat(30))
                .add(&k(1).mul(&x_pow(6)).scale(&rat(70)))
                .add(
                    &k(2)
                        .scale(&rat(84))
                        .add(&k(1).pow(2).scale(&rat(42)))
                        .mul(&x_pow(5)),
                )
                .add(
                    &k(3)
                        .scale(&rat(105))
                        .add(&k(1).mul(&k(2)).scale(&rat(105)))
                        .mul(&x_pow(4)),
                )
                .add(
                    &k(1)
                        .mul(&k(3))
                        .scale(&rat(140))
                        .add(&k(2).pow(2).scale(&rat(70)))
                        .mul(&x_pow(3)),
                )
                .add(&k(2).mul(&k(3)).mul(&x_pow(2)).scale(&rat(210)))
                .add(&k(3).pow(2).mul(&x_pow(1)).scale(&rat(210)))
                .add(&k(4).scale(&rat(105))),
        ),
    ]
}

/// Checks every printed closed form: the transcription must equal the
/// constructed solution, and the residual in the chain member must vanish.
/// The order-four first-power form is printed with a leading minus; both
/// signs are tried and the outcome is recorded as an erratum, with the
/// printed text kept verbatim.
pub fn printed_solution_check() -> VerificationReport {
    let mut report = VerificationReport::new("printed closed forms");
    let printed_q = printed_denominators();
    for (i, pq) in printed_q.iter().enumerate() {
        let n = (i + 1) as u32;
        let direct = riccati_solution(n, &Constants::Symbolic)
            .expect("orders 1..=4 are constructible");
        let ClosedForm::Rational {
            numerator,
            denominator,
        } = &direct.form
        else {
            unreachable!()
        };
        let transcription_ok = denominator == pq;
        let mut cert_ok = verify_solution_symbolic(&direct)
            .map(|c| c.is_zero())
            .unwrap_or(false);
        let mut name = "printed logarithmic-derivative form".to_string();
        if n == 4 {
            // As printed the form carries a leading minus. Try it.
            let printed_sign = GeneralSolution {
                family: ChainFamily::Riccati,
                order: 4,
                form: ClosedForm::Rational {
                    numerator: numerator.neg(),
                    denominator: denominator.clone(),
                },
            };
            let printed_zero = verify_solution_symbolic(&printed_sign)
                .map(|c| c.is_zero())
                .unwrap_or(false);
            if !printed_zero && cert_ok {
                report.note_erratum(
                    "printed closed form, first-power order 4: the leading minus \
                     sign leaves a nonzero residual; with the plus sign the \
                     residual vanishes. Kept verbatim, verified with the plus sign."
                        .to_string(),
                );
                name = "printed form verified up to the recorded sign".to_string();
            } else {
                cert_ok = printed_zero && cert_ok;
            }
        }
        report.push(CheckEntry::symbolic(
            name,
            Some(ChainFamily::Riccati),
            Some(n),
            if transcription_ok && cert_ok {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            if transcription_ok && cert_ok {
                "0".to_string()
            } else {
                format!(
                    "transcription match: {transcription_ok}, residual zero: {cert_ok}"
                )
            },
            format!("printed-solution:riccati[{n}]"),
        ));
    }

    for (i, (scale, core, radicand)) in printed_radical_forms().iter().enumerate() {
        let n = (i + 2) as u32;
        // Printed normalization: u = sqrt(scale)*core/sqrt(radicand).
        // Scaling numerator and radicand by `scale` clears the prefactor:
        // u = (scale*core)/sqrt(scale*radicand), which is the constructed
        // solution exactly.
        let direct = abel_solution(n, &Constants::Symbolic)
            .expect("orders 2..=4 are constructible");
        let ClosedForm::Radical {
            numerator,
            radicand: s_direct,
        } = &direct.form
        else {
            unreachable!()
        };
        let transcription_ok = *numerator == core.scale(scale)
            && *s_direct == radicand.scale(scale);
        // Verify the printed pair itself through the tower calculus.
        let printed_form = GeneralSolution {
            family: ChainFamily::Abel,
            order: n,
            form: ClosedForm::Radical {
                numerator: core.scale(scale),
                radicand: radicand.scale(scale),
            },
        };
        let cert_ok = verify_solution_symbolic(&printed_form)
            .map(|c| c.is_zero())
            .unwrap_or(false);
        report.push(CheckEntry::symbolic(
            "printed radical form",
            Some(ChainFamily::Abel),
            Some(n),
            if transcription_ok && cert_ok {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            if transcription_ok && cert_ok {
                "0".to_string()
            } else {
                format!(
                    "transcription match: {transcription_ok}, residual zero: {cert_ok}"
                )
            },
            format!("printed-solution:abel[{n}]"),
        ));
    }
    report
}

/// Pointwise evaluator for a solution with numeric constants: exact
/// rational towers, with a single square-root rounding for radical forms.
#[derive(Clone, Debug)]
pub struct SolutionEvaluator {
    family: ChainFamily,
    towers: Vec<Poly>,
    denominator: Poly,
}

impl SolutionEvaluator {
    /// Prepares derivatives `u, u', ..., u^(max_derivative)`.
    pub fn new(
        sol: &GeneralSolution,
        max_derivative: u32,
    ) -> Result<Self, SolutionError> {
        let (towers, denominator) = match &sol.form {
            ClosedForm::Rational {
                numerator,
                denominator,
            } => (
                rational_towers(numerator, denominator, max_derivative),
                denominator.clone(),
            ),
            ClosedForm::Radical {
                numerator,
                radicand,
            } => (
                radical_towers(numerator, radicand, max_derivative),
                radicand.clone(),
            ),
        };
        for p in towers.iter().chain(std::iter::once(&denominator)) {
            let mut atoms = std::collections::BTreeSet::new();
            p.collect_atoms(&mut atoms);
            if atoms.iter().any(|a| !matches!(a, Atom::X)) {
                return Err(SolutionError::SymbolicConstants);
            }
        }
        Ok(SolutionEvaluator {
            family: sol.family,
            towers,
            denominator,
        })
    }

    pub fn max_derivative(&self) -> u32 {
        (self.towers.len() - 1) as u32
    }

    fn eval_at(p: &Poly, x: &Rational) -> Rational {
        p.eval(&|a| (a == &Atom::X).then(|| x.clone()))
            .expect("only x occurs")
    }

    /// Denominator value: `Q(x)` or the radicand `S(x)`.
    pub fn denominator_at(&self, x: &Rational) -> Rational {
        Self::eval_at(&self.denominator, x)
    }

    /// Exact building blocks of the value: `(numerator(x), Q(x))` for the
    /// rational form, `(P(x), S(x))` for the radical form. Exact even
    /// where the value itself is a pole or not real.
    pub fn parts_at(&self, x: &Rational) -> (Rational, Rational) {
        (
            Self::eval_at(&self.towers[0], x),
            self.denominator_at(x),
        )
    }

    /// Exact rational `u^(j)(x)` for rational forms.
    pub fn derivative_at_rational(
        &self,
        j: u32,
        x: &Rational,
    ) -> Result<Rational, SolutionError> {
        if j > self.max_derivative() {
            return Err(SolutionError::DerivativeOutOfRange {
                requested: j,
                available: self.max_derivative(),
            });
        }
        match self.family {
            ChainFamily::Riccati => {
                let q = self.denominator_at(x);
                if q.is_zero() {
                    return Err(SolutionError::PoleAt {
                        x: rational_to_f64(x),
                    });
                }
                let mut den = Rational::one();
                for _ in 0..=j {
                    den *= q.clone();
                }
                Ok(Self::eval_at(&self.towers[j as usize], x) / den)
            }
            ChainFamily::Abel => Err(SolutionError::FormMismatch {
                family: self.family,
                detail: "radical values are irrational; use derivative_at".to_string(),
            }),
        }
    }

    /// `u^(j)(x)` as a float; the only rounding for radical forms is the
    /// single square root of the radicand.
    pub fn derivative_at(&self, j: u32, x: &Rational) -> Result<f64, SolutionError> {
        if j > self.max_derivative() {
            return Err(SolutionError::DerivativeOutOfRange {
                requested: j,
                available: self.max_derivative(),
            });
        }
        let d = self.denominator_at(x);
        let t = Self::eval_at(&self.towers[j as usize], x);
        match self.family {
            ChainFamily::Riccati => {
                if d.is_zero() {
                    return Err(SolutionError::PoleAt {
                        x: rational_to_f64(x),
                    });
                }
                let mut den = Rational::one();
                for _ in 0..=j {
                    den *= d.clone();
                }
                Ok(rational_to_f64(&(t / den)))
            }
            ChainFamily::Abel => {
                if d.is_zero() {
                    return Err(SolutionError::PoleAt {
                        x: rational_to_f64(x),
                    });
                }
                if d.is_negative() {
                    return Err(SolutionError::NotReal {
                        x: rational_to_f64(x),
                    });
                }
                let root = rational_to_f64(&d).sqrt();
                Ok(rational_to_f64(&t) / root.powi(2 * j as i32 + 1))
            }
        }
    }

    pub fn value_at(&self, x: &Rational) -> Result<f64, SolutionError> {
        self.derivative_at(0, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_matches_printed_denominators() {
        let consts = Constants::Symbolic.polys(4).unwrap();
        let ladder = denominator_ladder(4, &consts);
        assert_eq!(ladder, printed_denominators());
    }

    #[test]
    fn ladder_derivative_steps_down() {
        // Q_N' = N * Q_{N-1}
        let consts = Constants::Symbolic.polys(6).unwrap();
        let ladder = denominator_ladder(6, &consts);
        for n in 2..=6usize {
            let lhs = dx(&ladder[n - 1]);
            let rhs = ladder[n - 2].scale(&rat(n as i64));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn radicand_derivative_identity() {
        // S' = 2 P^2 for the constructed radical forms
        for n in 1..=6 {
            let sol = abel_solution(n, &Constants::Symbolic).unwrap();
            let ClosedForm::Radical {
                numerator,
                radicand,
            } = &sol.form
            else {
                unreachable!()
            };
            assert_eq!(
                dx(radicand),
                numerator.mul(numerator).scale(&rat(2)),
                "order {n}"
            );
        }
    }

    #[test]
    fn solutions_satisfy_their_members() {
        for family in ChainFamily::ALL {
            for n in 1..=SYMBOLIC_VERIFY_CAP {
                let sol = general_solution(family, n, &Constants::Symbolic).unwrap();
                let cert = verify_solution_symbolic(&sol).unwrap();
                assert!(
                    cert.is_zero(),
                    "{family} order {n}: {}",
                    cert.numerator.text()
                );
            }
        }
    }

    #[test]
    fn solutions_hold_at_sampled_constants_past_the_symbolic_cap() {
        for family in ChainFamily::ALL {
            for n in (SYMBOLIC_VERIFY_CAP + 1)..=6 {
                let entry = verify_solution_sampled(family, n, 2, 41).unwrap();
                assert_eq!(
                    entry.status,
                    CheckStatus::Pass,
                    "{family} order {n}: {:?}",
                    entry.residual
                );
            }
        }
    }

    #[test]
    fn factorized_verification_reaches_high_orders() {
        for n in 1..=8 {
            let sol = riccati_solution(n, &Constants::Symbolic).unwrap();
            let entry = verify_solution_via_reduction(&sol).unwrap();
            assert_eq!(
                entry.status,
                CheckStatus::Pass,
                "riccati order {n}: {:?}",
                entry.residual
            );
        }
        for n in 1..=6 {
            let sol = abel_solution(n, &Constants::Symbolic).unwrap();
            let entry = verify_solution_via_reduction(&sol).unwrap();
            assert_eq!(
                entry.status,
                CheckStatus::Pass,
                "abel order {n}: {:?}",
                entry.residual
            );
        }
    }

    #[test]
    fn factorized_verification_rejects_a_wrong_pair() {
        let sol = riccati_solution(3, &Constants::Symbolic).unwrap();
        let ClosedForm::Rational {
            numerator,
            denominator,
        } = sol.form
        else {
            unreachable!()
        };
        let wrong = GeneralSolution {
            family: ChainFamily::Riccati,
            order: 3,
            form: ClosedForm::Rational {
                numerator: numerator.scale(&rat(2)),
                denominator,
            },
        };
        let entry = verify_solution_via_reduction(&wrong).unwrap();
        assert_eq!(entry.status, CheckStatus::Fail);
    }

    #[test]
    fn report_switches_methods_at_the_cap() {
        let report =
            solution_report(ChainFamily::Abel, SYMBOLIC_VERIFY_CAP..=SYMBOLIC_VERIFY_CAP + 1)
                .unwrap();
        assert_eq!(report.status(), CheckStatus::Pass);
        let names: Vec<&str> = report
            .entries()
            .iter()
            .map(|e| e.name.as_str())
            .collect();
        assert_eq!(names.len(), 2);
        assert_ne!(names[0], names[1]);
        assert!(names[1].contains("reduction factorization"));
    }

    #[test]
    fn wrong_sign_fails_verification() {
        let sol = riccati_solution(4, &Constants::Symbolic).unwrap();
        let ClosedForm::Rational {
            numerator,
            denominator,
        } = sol.form
        else {
            unreachable!()
        };
        let flipped = GeneralSolution {
            family: ChainFamily::Riccati,
            order: 4,
            form: ClosedForm::Rational {
                numerator: numerator.neg(),
                denominator,
            },
        };
        let cert = verify_solution_symbolic(&flipped).unwrap();
        assert!(!cert.is_zero());
    }

    #[test]
    fn printed_forms_all_check_with_one_recorded_sign() {
        let report = printed_solution_check();
        assert_eq!(report.status(), CheckStatus::Pass, "{}", report.render_text());
        assert_eq!(report.entries().len(), 7);
        assert_eq!(report.errata().len(), 1);
        assert!(report.errata()[0].contains("order 4"));
        assert!(report.errata()[0].contains("minus"));
    }

    #[test]
    fn recursive_solve_first_power_is_literal() {
        for n in 2..=6 {
            let direct = riccati_solution(n, &Constants::Symbolic).unwrap();
            let recursive =
                recursive_solve(ChainFamily::Riccati, n, &Constants::Symbolic).unwrap();
            assert_eq!(direct, recursive, "order {n}");
        }
    }

    #[test]
    fn recursive_solve_second_power_satisfies_and_matches() {
        for n in 2..=6u32 {
            if n <= SYMBOLIC_VERIFY_CAP {
                let rec =
                    recursive_solve(ChainFamily::Abel, n, &Constants::Symbolic).unwrap();
                let cert = verify_solution_symbolic(&rec).unwrap();
                assert!(cert.is_zero(), "order {n}");
            }

            // Constant-matched agreement with the direct form: the inner
            // ladder member is x^(n-1) + sum_j beta_j c_j x^(n-1-j) with
            // pure-monomial constant directions, so matching the monic core
            // of the direct form takes c_j = k_j / beta_j, c_n = k_n.
            let zeros = vec![Poly::zero(); (n - 1) as usize];
            let base = denominator_ladder(n - 1, &zeros);
            let mut matched: Vec<Poly> = Vec::new();
            for j in 1..n {
                let mut probe = zeros.clone();
                probe[(j - 1) as usize] = Poly::one();
                let with_one = denominator_ladder(n - 1, &probe);
                let direction = with_one.last().unwrap().sub(base.last().unwrap());
                let (beta, monomial) = direction.as_single_term().expect("pure direction");
                assert_eq!(monomial.exponent(&Atom::X), n - 1 - j);
                matched.push(k(j).scale(&(Rational::one() / beta)));
            }
            matched.push(k(n));
            let q = denominator_ladder(n - 1, &matched[..(n - 1) as usize])
                .last()
                .unwrap()
                .clone();
            let s_rec = antiderivative(&q.mul(&q))
                .scale(&rat(2))
                .add(&matched[(n - 1) as usize]);

            let direct = abel_solution(n, &Constants::Symbolic).unwrap();
            let ClosedForm::Radical {
                numerator: p_d,
                radicand: s_d,
            } = &direct.form
            else {
                unreachable!()
            };
            // Same function iff the squares agree: P_d^2 S_rec = Q^2 S_d.
            let lhs = p_d.mul(p_d).mul(&s_rec);
            let rhs = q.mul(&q).mul(s_d);
            assert_eq!(lhs, rhs, "order {n}");
        }
    }

    #[test]
    fn linearization_witness_zeroes_every_member() {
        for n in 1..=8 {
            let entry = verify_linearization_witness(n).unwrap();
            assert_eq!(entry.status, CheckStatus::Pass, "order {n}");
        }
        // The expanded tower calculus agrees with the recursion at the
        // orders where both stay small.
        for n in 1..=4 {
            let witness = linearization_witness(n);
            let cert = verify_solution_symbolic(&witness).unwrap();
            assert!(cert.is_zero(), "order {n}");
        }
    }

    #[test]
    fn evaluator_exact_values() {
        // order 1: u = 1/(x + 2) at x = 3 is 1/5, derivative -1/25
        let sol = riccati_solution(1, &Constants::Values(vec![rat(2)])).unwrap();
        let ev = SolutionEvaluator::new(&sol, 2).unwrap();
        assert_eq!(ev.derivative_at_rational(0, &rat(3)).unwrap(), ratio(1, 5));
        assert_eq!(
            ev.derivative_at_rational(1, &rat(3)).unwrap(),
            ratio(-1, 25)
        );
        assert!(matches!(
            ev.derivative_at_rational(0, &rat(-2)),
            Err(SolutionError::PoleAt { .. })
        ));
    }

    #[test]
    fn evaluator_second_order_values() {
        // u = 2(x + k1)/(x^2 + 2k1x - 2k2) at (1, 0), x = 1: 4/3
        let sol =
            riccati_solution(2, &Constants::Values(vec![rat(1), rat(0)])).unwrap();
        let ev = SolutionEvaluator::new(&sol, 0).unwrap();
        assert_eq!(ev.derivative_at_rational(0, &rat(1)).unwrap(), ratio(4, 3));

        // (0, 0): u = 2/x, pole at the origin
        let sol =
            riccati_solution(2, &Constants::Values(vec![rat(0), rat(0)])).unwrap();
        let ev = SolutionEvaluator::new(&sol, 0).unwrap();
        assert!(matches!(
            ev.derivative_at_rational(0, &rat(0)),
            Err(SolutionError::PoleAt { .. })
        ));
        assert_eq!(ev.parts_at(&rat(3)), (rat(6), rat(9)));

        // radical form at (0, 0): radicand 6x^3 < 0 left of the origin
        let sol = abel_solution(2, &Constants::Values(vec![rat(0), rat(0)])).unwrap();
        let ev = SolutionEvaluator::new(&sol, 0).unwrap();
        assert!(matches!(
            ev.value_at(&rat(-1)),
            Err(SolutionError::NotReal { .. })
        ));
        assert_eq!(ev.parts_at(&rat(-1)), (rat(-3), rat(-6)));
        // at x = 2: u^2 = P^2/S = 36/48 = 3/4
        let (p, s) = ev.parts_at(&rat(2));
        assert_eq!(p.clone() * p / s, ratio(3, 4));
    }

    #[test]
    fn evaluator_radical_values() {
        // second-power order 1: u = 1/sqrt(2x + k1), k1 = 1: u(0) = 1
        let sol = abel_solution(1, &Constants::Values(vec![rat(1)])).unwrap();
        let ev = SolutionEvaluator::new(&sol, 1).unwrap();
        assert!((ev.value_at(&rat(0)).unwrap() - 1.0).abs() < 1e-15);
        // u'(0) = -1 * (2x+1)^(-3/2) at 0 = -1
        assert!((ev.derivative_at(1, &rat(0)).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(
            ev.value_at(&rat(-1)),
            Err(SolutionError::NotReal { .. })
        ));
        assert!(matches!(
            ev.value_at(&ratio(-1, 2)),
            Err(SolutionError::PoleAt { .. })
        ));
    }

    #[test]
    fn evaluator_rejects_symbolic_constants() {
        let sol = riccati_solution(2, &Constants::Symbolic).unwrap();
        assert!(matches!(
            SolutionEvaluator::new(&sol, 1),
            Err(SolutionError::SymbolicConstants)
        ));
    }

    #[test]
    fn constant_count_is_checked() {
        let err = riccati_solution(3, &Constants::Values(vec![rat(1)])).unwrap_err();
        assert!(matches!(
            err,
            SolutionError::WrongConstantCount { order: 3, got: 1 }
        ));
    }

    #[test]
    fn side_conditions_surface() {
        assert!(side_condition(ChainFamily::Abel, 3).unwrap().contains("4k2"));
        assert!(side_condition(ChainFamily::Riccati, 3).is_none());
    }

    #[test]
    fn rendering_matches_the_ladder() {
        let sol = riccati_solution(2, &Constants::Symbolic).unwrap();
        assert_eq!(sol.text(), "(2*x + 2*k1)/(x^2 + 2*k1*x - 2*k2)");
        let abel = abel_solution(2, &Constants::Symbolic).unwrap();
        assert_eq!(
            abel.text(),
            "(3*x + 3*k1)/sqrt(6*x^3 + 18*k1*x^2 + 18*k1^2*x + 9*k2)"
        );
    }
}
