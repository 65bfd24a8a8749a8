//! Expression trees.
//!
//! [`Expr`] preserves the written shape of an expression (binary operators,
//! parenthesization via structure), which is what the parser produces and
//! the printer consumes. Semantics live in [`Expr::canonicalize`], which
//! lowers a tree to a [`Canon`] fraction; two trees denote the same
//! function exactly when their canonical forms agree.

use std::fmt;

use num::{One, Signed, Zero};

use super::canon::Canon;
use super::poly::{Atom, Poly};
use super::rational::{format_rational, rat, Rational};
use super::KernelError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Rational(Rational),
    Symbol(Atom),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer or half-integer power. A half-integer exponent asserts that
    /// the base is positive where the expression is used.
    Pow(Box<Expr>, Rational),
    /// `exp` of an argument.
    Exp(Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Self {
        Expr::Rational(rat(n))
    }

    pub fn x() -> Self {
        Expr::Symbol(Atom::X)
    }

    pub fn v() -> Self {
        Expr::Symbol(Atom::V)
    }

    pub fn u(order: u32) -> Self {
        Expr::Symbol(Atom::u(order))
    }

    pub fn zeta(order: u32) -> Self {
        Expr::Symbol(Atom::zeta(order))
    }

    pub fn c(d: u32) -> Self {
        Expr::Symbol(Atom::CDeriv(d))
    }

    pub fn k(i: u32) -> Self {
        Expr::Symbol(Atom::K(i))
    }

    pub fn pow_int(self, e: i64) -> Self {
        Expr::Pow(Box::new(self), rat(e))
    }

    /// Square root; asserts the argument is positive on the domain of use.
    pub fn sqrt(self) -> Self {
        Expr::Pow(Box::new(self), Rational::new(1.into(), 2.into()))
    }

    /// Validated power constructor: the exponent denominator must be 1 or 2.
    pub fn pow_rational(self, e: Rational) -> Result<Self, KernelError> {
        let den = e.denom();
        if *den == 1.into() || *den == 2.into() {
            Ok(Expr::Pow(Box::new(self), e))
        } else {
            Err(KernelError::unsupported(format!(
                "exponent {} is neither an integer nor a half-integer",
                format_rational(&e)
            )))
        }
    }

    pub fn exp(self) -> Self {
        Expr::Exp(Box::new(self))
    }

    /// Lower to a canonical fraction.
    pub fn canonicalize(&self) -> Result<Canon, KernelError> {
        match self {
            Expr::Rational(q) => Ok(Canon::constant(q.clone())),
            Expr::Symbol(a) => {
                if matches!(a, Atom::Sqrt(_)) {
                    return Err(KernelError::unsupported(
                        "radical atoms are built through powers, not symbols",
                    ));
                }
                Ok(Canon::atom(a.clone()))
            }
            Expr::Neg(e) => Ok(e.canonicalize()?.neg()),
            Expr::Add(a, b) => Ok(a.canonicalize()?.add(&b.canonicalize()?)),
            Expr::Sub(a, b) => Ok(a.canonicalize()?.sub(&b.canonicalize()?)),
            Expr::Mul(a, b) => Ok(a.canonicalize()?.mul(&b.canonicalize()?)),
            Expr::Div(a, b) => a.canonicalize()?.div(&b.canonicalize()?),
            Expr::Pow(base, e) => {
                let b = base.canonicalize()?;
                if e.is_integer() {
                    let n: i64 = e
                        .to_integer()
                        .try_into()
                        .map_err(|_| KernelError::unsupported("exponent out of range"))?;
                    return b.pow(n);
                }
                if *e.denom() != 2.into() {
                    return Err(KernelError::unsupported(
                        "exponent is neither an integer nor a half-integer",
                    ));
                }
                // p/2 with odd p: b^((p-1)/2) * sqrt(b)
                let p: i64 = e
                    .numer()
                    .try_into()
                    .map_err(|_| KernelError::unsupported("exponent out of range"))?;
                if !b.den_is_one() {
                    return Err(KernelError::unsupported(
                        "half-integer power of a quotient",
                    ));
                }
                let root = Canon::from_poly(super::poly::sqrt_poly(b.num())?);
                let whole = (p - 1) / 2; // p odd; rounds toward zero for p < 0 too
                let frac_part = if p >= 0 {
                    root
                } else {
                    root.reciprocal()?
                };
                // adjust: for negative odd p, p = 2*whole - 1 with whole <= 0
                let int_pow = if p >= 0 { whole } else { (p + 1) / 2 };
                Ok(b.pow(int_pow)?.mul(&frac_part))
            }
            Expr::Exp(arg) => {
                let a = arg.canonicalize()?;
                if !a.den_is_one() {
                    return Err(KernelError::unsupported(
                        "exponential of a general quotient",
                    ));
                }
                // supported arguments: alpha*v + beta with rational alpha, beta
                let p = a.num();
                let v = Poly::atom(Atom::V);
                let alpha_poly = p.formal_partial(&Atom::V);
                let alpha = alpha_poly.as_constant().ok_or_else(|| {
                    KernelError::unsupported("exponential argument nonlinear in v")
                })?;
                let rest = p.sub(&v.scale(&alpha));
                let beta = rest.as_constant().ok_or_else(|| {
                    KernelError::unsupported(
                        "exponential argument must be linear in v with a constant term",
                    )
                })?;
                if !beta.is_zero() {
                    return Err(KernelError::unsupported(
                        "exponential argument with a nonzero constant term",
                    ));
                }
                Ok(Canon::from_poly(Poly::exp_v(alpha)))
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Rational(q) => {
                if !q.is_integer() {
                    2 // printed as n/d, and the slash binds like division
                } else if q.is_negative() {
                    3
                } else {
                    5
                }
            }
            Expr::Symbol(..) | Expr::Exp(..) => 5,
        }
    }

    fn render(&self, latex: bool, min_prec: u8, out: &mut String) {
        let prec = self.precedence();
        let parens = prec < min_prec;
        if parens {
            out.push(if latex { '(' } else { '(' });
        }
        match self {
            Expr::Rational(q) => {
                if latex && !q.is_integer() {
                    out.push_str(&format!(
                        r"\frac{{{}}}{{{}}}",
                        q.numer(),
                        q.denom()
                    ));
                } else {
                    out.push_str(&format_rational(q));
                }
            }
            Expr::Symbol(a) => out.push_str(&symbol_text(a, latex)),
            Expr::Neg(e) => {
                out.push('-');
                e.render(latex, 3, out);
            }
            Expr::Add(a, b) => {
                a.render(latex, 1, out);
                out.push_str(" + ");
                b.render(latex, 2, out);
            }
            Expr::Sub(a, b) => {
                a.render(latex, 1, out);
                out.push_str(" - ");
                b.render(latex, 2, out);
            }
            Expr::Mul(a, b) => {
                a.render(latex, 2, out);
                out.push_str(if latex { r" \cdot " } else { "*" });
                b.render(latex, 3, out);
            }
            Expr::Div(a, b) => {
                if latex {
                    out.push_str(r"\frac{");
                    a.render(latex, 0, out);
                    out.push_str("}{");
                    b.render(latex, 0, out);
                    out.push('}');
                } else {
                    a.render(latex, 2, out);
                    out.push('/');
                    b.render(latex, 3, out);
                }
            }
            Expr::Pow(base, e) => {
                base.render(latex, 5, out);
                out.push('^');
                if latex {
                    out.push('{');
                    out.push_str(&format_rational(e));
                    out.push('}');
                } else if e.is_integer() && !e.is_negative() {
                    out.push_str(&format_rational(e));
                } else {
                    out.push('(');
                    out.push_str(&format_rational(e));
                    out.push(')');
                }
            }
            Expr::Exp(arg) => {
                if latex {
                    out.push_str(r"e^{");
                    arg.render(latex, 0, out);
                    out.push('}');
                } else {
                    out.push_str("exp(");
                    arg.render(latex, 0, out);
                    out.push(')');
                }
            }
        }
        if parens {
            out.push(')');
        }
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        self.render(false, 0, &mut s);
        s
    }

    pub fn latex(&self) -> String {
        let mut s = String::new();
        self.render(true, 0, &mut s);
        s
    }
}

fn symbol_text(a: &Atom, latex: bool) -> String {
    // Rendering one atom matches the polynomial layer exactly; reuse it by
    // round-tripping through a single-atom polynomial.
    let p = Poly::atom(a.clone());
    if latex {
        p.latex()
    } else {
        p.text()
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// A canonical fraction rebuilt as a display tree: sum of monomial products
/// over the factored denominator.
pub fn canon_to_expr(c: &Canon) -> Expr {
    let num = poly_to_expr(c.num());
    if c.den_is_one() {
        return num;
    }
    let mut den: Option<Expr> = None;
    for (f, e) in c.den_factors() {
        let factor = if e == 1 {
            poly_to_expr(f)
        } else {
            poly_to_expr(f).pow_int(i64::from(e))
        };
        den = Some(match den {
            None => factor,
            Some(d) => d * factor,
        });
    }
    num / den.expect("nonempty denominator")
}

pub fn poly_to_expr(p: &Poly) -> Expr {
    let mut terms: Vec<_> = p.terms().collect();
    if terms.is_empty() {
        return Expr::int(0);
    }
    terms.sort_by(|a, b| {
        b.0.degree()
            .cmp(&a.0.degree())
            .then_with(|| b.0.cmp(a.0))
    });
    let mut acc: Option<Expr> = None;
    for (m, coeff) in terms {
        let mut factors: Vec<Expr> = Vec::new();
        let mag = coeff.abs();
        if !mag.is_one() || (m.is_unit()) {
            factors.push(Expr::Rational(mag));
        }
        for (a, e) in m.atoms() {
            let base = match a {
                Atom::Sqrt(r) => poly_to_expr(r.radicand()).sqrt(),
                other => Expr::Symbol(other.clone()),
            };
            factors.push(if e == 1 {
                base
            } else {
                base.pow_int(i64::from(e))
            });
        }
        if !m.exp_v().is_zero() {
            let arg = if m.exp_v().is_one() {
                Expr::v()
            } else {
                Expr::Rational(m.exp_v().clone()) * Expr::v()
            };
            factors.push(arg.exp());
        }
        let term = factors
            .into_iter()
            .reduce(|a, b| a * b)
            .expect("at least one factor per term");
        let negative = coeff.is_negative();
        acc = Some(match acc {
            None => {
                if negative {
                    -term
                } else {
                    term
                }
            }
            Some(prev) => {
                if negative {
                    prev - term
                } else {
                    prev + term
                }
            }
        });
    }
    acc.expect("nonempty polynomial")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalize_identifies_equal_trees() {
        // (x+1)^2 and x^2 + 2x + 1
        let a = (Expr::x() + Expr::int(1)).pow_int(2);
        let b = Expr::x().pow_int(2) + Expr::int(2) * Expr::x() + Expr::int(1);
        assert_eq!(a.canonicalize().unwrap(), b.canonicalize().unwrap());
    }

    #[test]
    fn canonicalize_cancels() {
        // -u*exp(v) + u*exp(v) is zero; exp(v)*(u - u^2) is not
        let a = -(Expr::u(0) * Expr::v().exp()) + Expr::u(0) * Expr::v().exp();
        assert!(a.canonicalize().unwrap().is_zero().unwrap());
        let b = Expr::v().exp() * (Expr::u(0) - Expr::u(0).pow_int(2));
        assert!(!b.canonicalize().unwrap().is_zero().unwrap());
    }

    #[test]
    fn half_integer_powers() {
        // x^(3/2) = x * sqrt(x); x^(-1/2) * x^(1/2) = 1... as canon forms
        let a = Expr::x()
            .pow_rational(Rational::new(3.into(), 2.into()))
            .unwrap()
            .canonicalize()
            .unwrap();
        let b = (Expr::x() * Expr::x().sqrt()).canonicalize().unwrap();
        assert_eq!(a, b);
        let inv = Expr::x()
            .pow_rational(Rational::new((-1).into(), 2.into()))
            .unwrap()
            .canonicalize()
            .unwrap();
        let prod = inv.mul(&Expr::x().sqrt().canonicalize().unwrap());
        assert!(prod.sub(&Canon::one()).is_zero().unwrap());
    }

    #[test]
    fn rejects_thirds_powers() {
        assert!(Expr::x()
            .pow_rational(Rational::new(1.into(), 3.into()))
            .is_err());
    }

    #[test]
    fn exp_arguments_must_be_linear_in_v() {
        assert!((Expr::v() * Expr::int(2)).exp().canonicalize().is_ok());
        assert!((-Expr::v()).exp().canonicalize().is_ok());
        assert!(Expr::x().exp().canonicalize().is_err());
        assert!((Expr::v().pow_int(2)).exp().canonicalize().is_err());
    }

    #[test]
    fn display_preserves_structure() {
        let e = (Expr::x() + Expr::int(1)) * Expr::x() - Expr::int(2) / Expr::x();
        assert_eq!(e.text(), "(x + 1)*x - 2/x");
        let f = Expr::x() - (Expr::x() - Expr::int(1));
        assert_eq!(f.text(), "x - (x - 1)");
        let g = Expr::u(1) + Expr::u(0).pow_int(2);
        assert_eq!(g.text(), "u_x + u^2");
        assert_eq!(g.latex(), "u_{x} + u^{2}");
    }

    #[test]
    fn negative_base_powers_parenthesize() {
        let e = Expr::Rational(rat(-2)).pow_int(3);
        assert_eq!(e.text(), "(-2)^3");
        let n = Expr::x().pow_int(-1);
        assert_eq!(n.text(), "x^(-1)");
    }

    #[test]
    fn canon_round_trip_through_expr() {
        let c = (Expr::u(1) / Expr::u(0) + Expr::u(0).pow_int(2))
            .canonicalize()
            .unwrap();
        let back = canon_to_expr(&c).canonicalize().unwrap();
        assert!(back.sub(&c).is_zero().unwrap());
    }
}
