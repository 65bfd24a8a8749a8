//! Nonlocal symmetries of the chains over a covering system.
//!
//! Each chain member is augmented by one covering equation `v_x = f(x,u,v)`
//! with flux `f = -m*u^m - c_x/c`, where `m` is the family exponent and
//! `c(x)` stays an undetermined function throughout: every identity proved
//! here holds for symbolic `c`. Over that covering the entire family shares
//! the generator
//!
//! ```text
//! X = phi * d/du + psi * d/dv,   phi = c(x) e^v u,   psi = m c(x) e^v,
//! ```
//!
//! whose `v`-dependence is what makes it nonlocal for the original
//! equations. The module builds the generator, prolongs it, checks the
//! determining equations and the invariance of every chain member, and
//! cross-validates the machinery on the classical scaling symmetry.

use crate::chains::{generate_chain, ChainError, ChainFamily};
use crate::kernel::{
    poly_from_diffpoly, rat, ratio, total_derivative, Atom, Canon, JetVar, KernelError, Poly,
};
use crate::report::{CheckEntry, CheckStatus, VerificationReport};

/// Errors from symmetry verification.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymmetryError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// The covering equation `v_x = f` attached to a chain family.
#[derive(Clone, Debug)]
pub struct CoveringSystem {
    family: ChainFamily,
    flux: Canon,
}

impl CoveringSystem {
    pub fn new(family: ChainFamily) -> Self {
        let m = family.exponent();
        let u_pow = Poly::atom_pow(Atom::u(0), m);
        let flux = Canon::from_poly(u_pow.scale(&-rat(i64::from(m))))
            .sub(&c_over_c());
        CoveringSystem { family, flux }
    }

    pub fn family(&self) -> ChainFamily {
        self.family
    }

    /// The flux `f = -m*u^m - c_x/c`.
    pub fn flux(&self) -> &Canon {
        &self.flux
    }
}

fn c_over_c() -> Canon {
    Canon::fraction(Poly::atom(Atom::CDeriv(1)), Poly::atom(Atom::CDeriv(0)))
        .expect("c is not identically zero")
}

/// A point/covering vector field `xi d/dx + phi d/du + psi d/dv`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub xi: Canon,
    pub phi: Canon,
    pub psi: Canon,
}

impl Generator {
    /// Depends on the covering variable, i.e. is nonlocal for the
    /// original equation.
    pub fn is_nonlocal(&self) -> Result<bool, KernelError> {
        let xi_v = self.xi.partial(&Atom::V)?;
        let phi_v = self.phi.partial(&Atom::V)?;
        Ok(!(xi_v.is_zero()? && phi_v.is_zero()?))
    }
}

/// The shared nonlocal generator of a family:
/// `xi = 0`, `phi = c e^v u`, `psi = m c e^v`.
pub fn nonlocal_generator(family: ChainFamily) -> Generator {
    let m = family.exponent();
    let ce_v = Poly::atom(Atom::CDeriv(0)).mul(&Poly::exp_v(rat(1)));
    Generator {
        xi: Canon::zero(),
        phi: Canon::from_poly(ce_v.mul(&Poly::atom(Atom::u(0)))),
        psi: Canon::from_poly(ce_v.scale(&rat(i64::from(m)))),
    }
}

/// The classical scaling generator `x d/dx - (u/m) d/du`, used to
/// cross-validate the prolongation machinery on a local symmetry.
pub fn scaling_generator(family: ChainFamily) -> Generator {
    let m = i64::from(family.exponent());
    Generator {
        xi: Canon::atom(Atom::X),
        phi: Canon::atom(Atom::u(0)).scale(&ratio(-1, m)),
        psi: Canon::zero(),
    }
}

/// Prolonged `d/du`-coefficients `phi = phi^(0), phi^(1), ..., phi^(order)`
/// via `phi^(k) = D phi^(k-1) - u^(k) D xi`, with `D` the total derivative
/// along the covering (pass a zero flux for fields without `v`).
pub fn prolong(
    gen: &Generator,
    flux: &Canon,
    order: u32,
) -> Result<Vec<Canon>, KernelError> {
    let mut phis = vec![gen.phi.clone()];
    let d_xi = total_derivative(&gen.xi, flux)?;
    for k in 1..=order {
        let prev = phis.last().unwrap();
        let top = Canon::atom(Atom::Jet(JetVar::u(k)));
        let next = total_derivative(prev, flux)?.sub(&top.mul(&d_xi));
        debug_assert!(
            next.atoms().iter().all(|a| match a {
                Atom::CDeriv(d) => *d <= k + 2,
                _ => true,
            }),
            "prolongation should raise the c tower at most once per step"
        );
        phis.push(next);
    }
    Ok(phis)
}

/// Applies the prolonged field to an expression:
/// `X(E) = xi dE/dx + sum_k phi^(k) dE/du^(k) + psi dE/dv`.
pub fn apply_prolonged(
    gen: &Generator,
    phis: &[Canon],
    target: &Canon,
) -> Result<Canon, KernelError> {
    let mut out = gen.xi.mul(&x_partial(target)?);
    out = out.add(&gen.psi.mul(&target.partial(&Atom::V)?));
    for (k, phi_k) in phis.iter().enumerate() {
        let jet = Atom::Jet(JetVar::u(k as u32));
        out = out.add(&phi_k.mul(&target.partial(&jet)?));
    }
    Ok(out)
}

/// Partial derivative in `x` holding `u`, `v`, and all jets fixed, but
/// seeing through the `c(x)` tower.
fn x_partial(e: &Canon) -> Result<Canon, KernelError> {
    let mut out = e.partial(&Atom::X)?;
    for a in e.atoms() {
        if let Atom::CDeriv(d) = a {
            let up = Canon::atom(Atom::CDeriv(d + 1));
            out = out.add(&up.mul(&e.partial(&a)?));
        }
    }
    Ok(out)
}

fn status_of(zero: bool) -> CheckStatus {
    if zero {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

fn entry_for_residual(
    name: &str,
    family: ChainFamily,
    order: Option<u32>,
    residual: &Canon,
    anchor: String,
) -> Result<CheckEntry, KernelError> {
    let zero = residual.is_zero()?;
    Ok(CheckEntry::symbolic(
        name,
        Some(family),
        order,
        status_of(zero),
        residual.text(),
        anchor,
    ))
}

/// The six determining equations of a family, evaluated at the nonlocal
/// ansatz with symbolic `c(x)`. Returns `(label, residual)` pairs; every
/// residual must be identically zero.
pub fn determining_residuals(
    family: ChainFamily,
) -> Result<Vec<(String, Canon)>, KernelError> {
    let cov = CoveringSystem::new(family);
    let gen = nonlocal_generator(family);
    let f = cov.flux().clone();
    let xi = &gen.xi;
    let phi = &gen.phi;
    let psi = &gen.psi;

    let u = Canon::atom(Atom::u(0));
    let up = |e: &Canon| e.partial(&Atom::u(0));
    let vp = |e: &Canon| e.partial(&Atom::V);
    let xp = x_partial;

    let f_x = xp(&f)?;
    let f_u = up(&f)?;
    let f_v = vp(&f)?;
    let f2 = f.mul(&f);

    let xi_u = up(xi)?;
    let xi_v = vp(xi)?;
    let xi_x = xp(xi)?;
    let phi_u = up(phi)?;
    let phi_v = vp(phi)?;
    let phi_x = xp(phi)?;
    let psi_u = up(psi)?;
    let psi_v = vp(psi)?;
    let psi_x = xp(psi)?;

    let mut residuals = Vec::new();

    // 1: the x-translation coefficient is affine in u
    residuals.push(("xi_uu".to_string(), up(&xi_u)?));

    // 2: psi_u - f xi_u
    residuals.push(("psi_u - f*xi_u".to_string(), psi_u.sub(&f.mul(&xi_u))));

    // 3: phi_uu - f_u xi_v - 2 xi_ux - 2 f xi_uv + 2(m+2) u^m xi_u
    let m = family.exponent();
    let u_m = Canon::from_poly(Poly::atom_pow(Atom::u(0), m));
    let coef3 = rat(2 * i64::from(m) + 4);
    let r3 = up(&phi_u)?
        .sub(&f_u.mul(&xi_v))
        .sub(&xp(&xi_u)?.scale(&rat(2)))
        .sub(&f.mul(&vp(&xi_u)?).scale(&rat(2)))
        .add(&u_m.mul(&xi_u).scale(&coef3));
    residuals.push(("phi_uu + lower-order terms".to_string(), r3));

    // 4: psi_x + f psi_v - f xi_x - f^2 xi_v - f_x xi - f_u phi
    let r4 = psi_x
        .add(&f.mul(&psi_v))
        .sub(&f.mul(&xi_x))
        .sub(&f2.mul(&xi_v))
        .sub(&f_x.mul(xi))
        .sub(&f_u.mul(phi));
    residuals.push(("covering coefficient transport".to_string(), r4));

    // 5: the pure-power balance,
    //   2 u^(2m+1) xi_x + 2 f u^(2m+1) xi_v - phi_u u^(2m+1)
    //   + (2m+1) phi u^(2m) + (m+2) phi_x u^m + (m+2) f phi_v u^m
    //   + phi_xx + f^2 phi_vv + 2 f phi_vx + f_x phi_v
    let u_pure = Canon::from_poly(Poly::atom_pow(Atom::u(0), 2 * m + 1));
    let u_2m = Canon::from_poly(Poly::atom_pow(Atom::u(0), 2 * m));
    let c_pure = rat(2 * i64::from(m) + 1);
    let c_mid = rat(i64::from(m) + 2);
    let r5 = u_pure
        .mul(&xi_x)
        .scale(&rat(2))
        .add(&f.mul(&u_pure).mul(&xi_v).scale(&rat(2)))
        .sub(&phi_u.mul(&u_pure))
        .add(&phi.mul(&u_2m).scale(&c_pure))
        .add(&phi_x.mul(&u_m).scale(&c_mid))
        .add(&f.mul(&phi_v).mul(&u_m).scale(&c_mid))
        .add(&xp(&phi_x)?)
        .add(&f2.mul(&vp(&phi_v)?))
        .add(&f.mul(&xp(&phi_v)?).scale(&rat(2)))
        .add(&f_x.mul(&phi_v));
    residuals.push(("pure-power balance".to_string(), r5));

    // 6: (m+2) u^m xi_x - xi_xx - f^2 xi_vv - 2 f xi_vx + (m+2) f u^m xi_v
    //    - f_x xi_v + 3 u^(2m+1) xi_u + f_u phi_v + 2 phi_ux + 2 f phi_uv
    //    + (2m+1) phi u^(m-1) ... the mixed balance; for m=1 the last term
    //    is 3 phi, for m=2 it is 8 phi u. Uniformly: 2(m+1) phi u^(m-1) + ...
    let last = match family {
        ChainFamily::Riccati => phi.scale(&rat(3)),
        ChainFamily::Abel => phi.mul(&u).scale(&rat(8)),
    };
    let r6 = u_m
        .mul(&xi_x)
        .scale(&c_mid)
        .sub(&xp(&xi_x)?)
        .sub(&f2.mul(&vp(&xi_v)?))
        .sub(&f.mul(&xp(&xi_v)?).scale(&rat(2)))
        .add(&f.mul(&u_m).mul(&xi_v).scale(&c_mid))
        .sub(&f_x.mul(&xi_v))
        .add(&u_pure.mul(&xi_u).scale(&rat(3)))
        .add(&f_u.mul(&phi_v))
        .add(&xp(&phi_u)?.scale(&rat(2)))
        .add(&f.mul(&vp(&phi_u)?).scale(&rat(2)))
        .add(&last);
    residuals.push(("mixed balance".to_string(), r6));

    let _ = f_v;
    Ok(residuals)
}

/// Checks all six determining equations of a family.
pub fn verify_determining_equations(
    family: ChainFamily,
) -> Result<VerificationReport, SymmetryError> {
    let mut report =
        VerificationReport::new(format!("{family} determining equations"));
    for (i, (label, residual)) in determining_residuals(family)?.into_iter().enumerate() {
        report.push(entry_for_residual(
            &format!("determining equation {}: {label}", i + 1),
            family,
            None,
            &residual,
            format!("determining:{}[{}]", family.name(), i + 1),
        )?);
    }
    Ok(report)
}

/// The symmetry must also preserve the covering equation itself:
/// `D psi - f D xi - xi f_x - phi f_u - psi f_v = 0`.
pub fn verify_covering_compatibility(
    family: ChainFamily,
) -> Result<CheckEntry, SymmetryError> {
    let cov = CoveringSystem::new(family);
    let gen = nonlocal_generator(family);
    let f = cov.flux();
    let residual = total_derivative(&gen.psi, f)?
        .sub(&f.mul(&total_derivative(&gen.xi, f)?))
        .sub(&gen.xi.mul(&x_partial(f)?))
        .sub(&gen.phi.mul(&f.partial(&Atom::u(0))?))
        .sub(&gen.psi.mul(&f.partial(&Atom::V)?));
    Ok(entry_for_residual(
        "covering equation preserved",
        family,
        None,
        &residual,
        format!("covering:{}", family.name()),
    )?)
}

/// Witnesses that the generator is genuinely nonlocal (depends on `v`).
pub fn verify_nonlocality(family: ChainFamily) -> Result<CheckEntry, SymmetryError> {
    let gen = nonlocal_generator(family);
    let nonlocal = gen.is_nonlocal()?;
    Ok(CheckEntry::symbolic(
        "generator depends on the covering variable",
        Some(family),
        None,
        status_of(nonlocal),
        gen.phi.partial(&Atom::V)?.text(),
        format!("nonlocal:{}", family.name()),
    ))
}

/// Invariance of one chain member: `X(E_N)` restricted onto solutions of
/// `E_N = 0` (by eliminating the top jet) must vanish identically.
pub fn verify_invariance(
    family: ChainFamily,
    order: u32,
) -> Result<CheckEntry, SymmetryError> {
    let eq = generate_chain(family, order)?;
    let cov = CoveringSystem::new(family);
    let gen = nonlocal_generator(family);
    let phis = prolong(&gen, cov.flux(), order)?;
    let target = Canon::from_poly(poly_from_diffpoly(&eq.lhs));
    let action = apply_prolonged(&gen, &phis, &target)?;
    let top = Atom::Jet(JetVar::u(order));
    let rhs = Canon::from_poly(poly_from_diffpoly(&eq.solved_rhs()));
    let restricted = action.substitute_atom_canon(&top, &rhs)?;
    Ok(entry_for_residual(
        "chain member invariance on solutions",
        family,
        Some(order),
        &restricted,
        format!("invariance:{}[{}]", family.name(), order),
    )?)
}

/// Invariance of a run of chain members.
pub fn invariance_report(
    family: ChainFamily,
    orders: std::ops::RangeInclusive<u32>,
) -> Result<VerificationReport, SymmetryError> {
    let mut report = VerificationReport::new(format!("{family} chain invariance"));
    for n in orders {
        report.push(verify_invariance(family, n)?);
    }
    Ok(report)
}

/// The first-order differential invariant `zeta = u_x/u + u^m` is
/// annihilated by the prolonged generator.
pub fn verify_invariant_function(
    family: ChainFamily,
) -> Result<CheckEntry, SymmetryError> {
    let m = family.exponent();
    let cov = CoveringSystem::new(family);
    let gen = nonlocal_generator(family);
    let phis = prolong(&gen, cov.flux(), 1)?;
    let zeta = Canon::fraction(Poly::atom(Atom::u(1)), Poly::atom(Atom::u(0)))
        .map_err(KernelError::from)?
        .add(&Canon::from_poly(Poly::atom_pow(Atom::u(0), m)));
    let action = apply_prolonged(&gen, &phis, &zeta)?;
    Ok(entry_for_residual(
        "reduction variable is invariant",
        family,
        Some(1),
        &action,
        format!("invariant-function:{}", family.name()),
    )?)
}

/// Cross-validation on a local symmetry: the scaling field satisfies
/// `X(E_N) = -(N + 1/m) E_N` exactly, without restricting onto solutions.
pub fn verify_scaling_symmetry(
    family: ChainFamily,
    order: u32,
) -> Result<CheckEntry, SymmetryError> {
    let eq = generate_chain(family, order)?;
    let gen = scaling_generator(family);
    let phis = prolong(&gen, &Canon::zero(), order)?;
    let target = Canon::from_poly(poly_from_diffpoly(&eq.lhs));
    let action = apply_prolonged(&gen, &phis, &target)?;
    let m = i64::from(family.exponent());
    let eigen = ratio(i64::from(order) * m + 1, m);
    let residual = action.add(&target.scale(&eigen));
    Ok(entry_for_residual(
        "scaling eigenvalue matches the weight",
        family,
        Some(order),
        &residual,
        format!("scaling:{}[{}]", family.name(), order),
    )?)
}

/// Full symmetry verification for one family: determining equations,
/// covering compatibility, nonlocality, the invariant function, and
/// invariance of the members up to `max_order`.
pub fn symmetry_report(
    family: ChainFamily,
    max_order: u32,
) -> Result<VerificationReport, SymmetryError> {
    let mut report = VerificationReport::new(format!("{family} nonlocal symmetry"));
    report.absorb(verify_determining_equations(family)?);
    report.push(verify_covering_compatibility(family)?);
    report.push(verify_nonlocality(family)?);
    report.push(verify_invariant_function(family)?);
    for n in 1..=max_order {
        report.push(verify_invariance(family, n)?);
    }
    Ok(report)
}

/// Reruns the covering compatibility, the invariant function, and member
/// invariance with a concrete choice of `c(x)` in place of the symbolic
/// tower. The choice must be a nonzero rational function of `x` alone;
/// the flux divides by `c`, so the zero function degenerates the covering.
pub fn specialized_symmetry_report(
    family: ChainFamily,
    c: &Canon,
    label: &str,
    max_order: u32,
) -> Result<VerificationReport, SymmetryError> {
    if c.atoms().iter().any(|a| *a != Atom::X) {
        return Err(KernelError::unsupported(
            "a concrete c(x) may involve the variable x only",
        )
        .into());
    }
    if c.is_zero()? {
        return Err(KernelError::unsupported(
            "c(x) = 0 degenerates the covering: the flux divides by c",
        )
        .into());
    }
    let m = family.exponent();
    let flux = Canon::from_poly(
        Poly::atom_pow(Atom::u(0), m).scale(&-rat(i64::from(m))),
    )
    .sub(&c.partial(&Atom::X)?.div(c)?);
    let ce_v = c.mul(&Canon::from_poly(Poly::exp_v(rat(1))));
    let gen = Generator {
        xi: Canon::zero(),
        phi: ce_v.mul(&Canon::atom(Atom::u(0))),
        psi: ce_v.scale(&rat(i64::from(m))),
    };

    let mut report = VerificationReport::new(format!(
        "{family} nonlocal symmetry at c(x) = {label}"
    ));
    let compat = total_derivative(&gen.psi, &flux)?
        .sub(&flux.mul(&total_derivative(&gen.xi, &flux)?))
        .sub(&gen.xi.mul(&x_partial(&flux)?))
        .sub(&gen.phi.mul(&flux.partial(&Atom::u(0))?))
        .sub(&gen.psi.mul(&flux.partial(&Atom::V)?));
    report.push(entry_for_residual(
        "covering equation preserved",
        family,
        None,
        &compat,
        format!("covering-at:{}", family.name()),
    )?);
    report.push(CheckEntry::symbolic(
        "generator depends on the covering variable",
        Some(family),
        None,
        status_of(gen.is_nonlocal()?),
        gen.phi.partial(&Atom::V)?.text(),
        format!("nonlocal-at:{}", family.name()),
    ));
    let phis1 = prolong(&gen, &flux, 1)?;
    let zeta = Canon::fraction(Poly::atom(Atom::u(1)), Poly::atom(Atom::u(0)))
        .map_err(KernelError::from)?
        .add(&Canon::from_poly(Poly::atom_pow(Atom::u(0), m)));
    report.push(entry_for_residual(
        "reduction variable is invariant",
        family,
        Some(1),
        &apply_prolonged(&gen, &phis1, &zeta)?,
        format!("invariant-function-at:{}", family.name()),
    )?);
    for order in 1..=max_order {
        let eq = generate_chain(family, order)?;
        let phis = prolong(&gen, &flux, order)?;
        let target = Canon::from_poly(poly_from_diffpoly(&eq.lhs));
        let action = apply_prolonged(&gen, &phis, &target)?;
        let top = Atom::Jet(JetVar::u(order));
        let rhs = Canon::from_poly(poly_from_diffpoly(&eq.solved_rhs()));
        let restricted = action.substitute_atom_canon(&top, &rhs)?;
        report.push(entry_for_residual(
            "chain member invariance on solutions",
            family,
            Some(order),
            &restricted,
            format!("invariance-at:{}[{}]", family.name(), order),
        )?);
    }
    Ok(report)
}
