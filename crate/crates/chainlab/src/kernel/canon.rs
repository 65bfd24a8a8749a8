//! Canonical fractions of [`Poly`]s.
//!
//! A [`Canon`] is `num / prod(F_i^{e_i})` where the denominator factors are
//! primitive, non-constant, and free of radicals and exponential grades.
//! Scalars live in the numerator, so the factored denominator is unique and
//! equal fractions compare equal after [`Canon::reduce`]. Differentiation
//! uses the factored form directly (quotient rule per factor) instead of
//! expanding, which keeps the derivative towers of `c(x)` powers small.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Zero};

use super::poly::{Atom, Poly};
use super::rational::{rat, Rational};
use super::KernelError;

#[derive(Clone, Debug)]
pub struct Canon {
    num: Poly,
    den: BTreeMap<Poly, u32>,
}

/// Semantic equality by cross-multiplication: `a/b == c/d` iff `a*d == c*b`
/// as canonical polynomials. Denominators are nonzero by construction.
impl PartialEq for Canon {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den_expanded()) == other.num.mul(&self.den_expanded())
    }
}

impl Eq for Canon {}

impl Canon {
    pub fn zero() -> Self {
        Canon {
            num: Poly::zero(),
            den: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(rat(n))
    }

    pub fn atom(a: Atom) -> Self {
        Self::from_poly(Poly::atom(a))
    }

    pub fn from_poly(num: Poly) -> Self {
        Canon {
            num,
            den: BTreeMap::new(),
        }
    }

    /// `num / den` as a canonical fraction. The denominator must be a plain
    /// polynomial (no radicals, no exponential grade); division by more
    /// general expressions goes through [`Canon::div`].
    pub fn fraction(num: Poly, den: Poly) -> Result<Self, KernelError> {
        if den.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        if !den.radicals().is_empty() || den.has_exp_grade() {
            return Err(KernelError::unsupported(
                "denominator with radicals or exponentials must be divided, not constructed",
            ));
        }
        let mut out = Self::from_poly(num);
        out.push_den_factor(den, 1);
        out.reduce();
        Ok(out)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den_factors(&self) -> impl Iterator<Item = (&Poly, u32)> {
        self.den.iter().map(|(f, &e)| (f, e))
    }

    pub fn den_is_one(&self) -> bool {
        self.den.is_empty()
    }

    /// The denominator multiplied out.
    pub fn den_expanded(&self) -> Poly {
        let mut out = Poly::one();
        for (f, &e) in &self.den {
            out = out.mul(&f.pow(e));
        }
        out
    }

    /// Numerator is identically zero. This is definite: the denominator is
    /// nonzero by construction.
    pub fn is_zero_certain(&self) -> bool {
        self.num.is_zero()
    }

    /// Semantic zero test. Radical-free numerators are decided by canonical
    /// form. A numerator `A + B*sqrt(r)` is nonzero when `A^2 - B^2*r` is
    /// nonzero; when that difference vanishes the sign of the combination
    /// depends on the domain, which this layer cannot see, so the test
    /// reports the expression as unsupported rather than guessing.
    pub fn is_zero(&self) -> Result<bool, KernelError> {
        if self.num.is_zero() {
            return Ok(true);
        }
        let radicals: Vec<_> = self.num.radicals().into_iter().collect();
        match radicals.len() {
            0 => Ok(false),
            1 => {
                let atom = Atom::Sqrt(radicals[0].clone());
                let b = self.num.coefficient_of(&atom, 1);
                let a = self.num.coefficient_of(&atom, 0);
                if a.is_zero() || b.is_zero() {
                    return Ok(false);
                }
                let disc = a.mul(&a).sub(&b.mul(&b).mul(radicals[0].radicand()));
                if disc.is_zero() {
                    Err(KernelError::unsupported(
                        "sign-ambiguous radical combination",
                    ))
                } else {
                    Ok(false)
                }
            }
            _ => Err(KernelError::unsupported(
                "zero test with several distinct radicals",
            )),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        // Common denominator: factor-wise max of exponents.
        let mut den: BTreeMap<Poly, u32> = self.den.clone();
        for (f, &e) in &other.den {
            let cur = den.entry(f.clone()).or_insert(0);
            *cur = (*cur).max(e);
        }
        let mut lhs = self.num.clone();
        let mut rhs = other.num.clone();
        for (f, &e) in &den {
            let es = self.den.get(f).copied().unwrap_or(0);
            let eo = other.den.get(f).copied().unwrap_or(0);
            if e > es {
                lhs = lhs.mul(&f.pow(e - es));
            }
            if e > eo {
                rhs = rhs.mul(&f.pow(e - eo));
            }
        }
        let mut out = Canon {
            num: lhs.add(&rhs),
            den,
        };
        out.reduce();
        out
    }

    pub fn neg(&self) -> Self {
        Canon {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut out = Canon {
            num: self.num.scale(k),
            den: self.den.clone(),
        };
        if out.num.is_zero() {
            out.den.clear();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.num.is_zero() || other.num.is_zero() {
            return Self::zero();
        }
        let mut den = self.den.clone();
        for (f, &e) in &other.den {
            *den.entry(f.clone()).or_insert(0) += e;
        }
        let mut out = Canon {
            num: self.num.mul(&other.num),
            den,
        };
        out.reduce();
        out
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        self.mul(&Canon::from_poly(p.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self, KernelError> {
        Ok(self.mul(&other.reciprocal()?))
    }

    pub fn reciprocal(&self) -> Result<Self, KernelError> {
        if self.num.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        let mut new_num = self.den_expanded();

        // Strip a common exponential grade from the would-be denominator.
        let mut candidate = self.num.clone();
        let grades: BTreeSet<Rational> = candidate
            .terms()
            .map(|(m, _)| m.exp_v().clone())
            .collect();
        if grades.len() > 1 {
            return Err(KernelError::unsupported(
                "reciprocal of a mixed exponential sum",
            ));
        }
        if let Some(alpha) = grades.into_iter().next() {
            if !alpha.is_zero() {
                candidate = candidate.mul(&Poly::exp_v(-alpha.clone()));
                new_num = new_num.mul(&Poly::exp_v(-alpha));
            }
        }

        // A radical carried by every term factors out directly:
        // 1/(sqrt(r)*A) = sqrt(r)/(r*A). Normalized terms hold square
        // roots at exponent one, so uniformity is a per-term membership
        // check, and multiplying by the root clears it from the candidate.
        for radical in candidate.radicals() {
            let atom = Atom::Sqrt(radical.clone());
            let uniform = candidate
                .terms()
                .all(|(mono, _)| mono.exponent(&atom) == 1);
            if uniform {
                let root = Poly::atom(atom);
                new_num = new_num.mul(&root);
                candidate = candidate.mul(&root);
            }
        }

        // Rationalize a single remaining radical via its conjugate.
        let radicals: Vec<_> = candidate.radicals().into_iter().collect();
        match radicals.len() {
            0 => {}
            1 => {
                let atom = Atom::Sqrt(radicals[0].clone());
                let b = candidate.coefficient_of(&atom, 1);
                let a = candidate.coefficient_of(&atom, 0);
                let disc = a.mul(&a).sub(&b.mul(&b).mul(radicals[0].radicand()));
                if disc.is_zero() {
                    return Err(KernelError::unsupported(
                        "reciprocal of a sign-ambiguous radical combination",
                    ));
                }
                let conjugate = a.sub(&b.mul(&Poly::atom(atom)));
                new_num = new_num.mul(&conjugate);
                candidate = disc;
            }
            _ => {
                return Err(KernelError::unsupported(
                    "reciprocal with several distinct radicals",
                ))
            }
        }

        let mut out = Self::from_poly(new_num);
        out.push_den_factor(candidate, 1);
        out.reduce();
        Ok(out)
    }

    pub fn pow(&self, e: i64) -> Result<Self, KernelError> {
        let base = if e < 0 {
            self.reciprocal()?
        } else {
            self.clone()
        };
        let mut n = e.unsigned_abs();
        let mut acc = Self::one();
        let mut b = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&b);
            }
            n >>= 1;
            if n > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// Partial derivative with respect to one atom, with the chain rules
    /// this layer owns: radicands differentiate through their square roots,
    /// and the `v`-derivative scales each term by its exponential grade.
    /// The target may not itself be a radical.
    pub fn partial(&self, s: &Atom) -> Result<Self, KernelError> {
        if matches!(s, Atom::Sqrt(_)) {
            return Err(KernelError::unsupported(
                "differentiation with respect to a radical",
            ));
        }
        // d(N / prod F^e) = dN / den - sum_i e_i dF_i N / (F_i * den)
        let mut out = poly_partial(&self.num, s)?.mul(&self.den_reciprocal());
        for (f, &e) in &self.den {
            let df = poly_partial(f, s)?;
            if df.is_zero_certain() {
                continue;
            }
            let mut den = self.den.clone();
            *den.entry(f.clone()).or_insert(0) += 1;
            let mut piece = Canon {
                num: self.num.clone(),
                den,
            };
            piece = piece.mul(&df).scale(&-rat(i64::from(e)));
            out = out.add(&piece);
        }
        Ok(out)
    }

    fn den_reciprocal(&self) -> Canon {
        Canon {
            num: Poly::one(),
            den: self.den.clone(),
        }
    }

    /// Replaces an atom by a fraction. The atom must not occur in the
    /// denominator or inside a radicand; in the intended uses (restricting
    /// onto solutions by eliminating the top jet) it never does.
    pub fn substitute_atom_canon(
        &self,
        a: &Atom,
        replacement: &Canon,
    ) -> Result<Canon, KernelError> {
        for f in self.den.keys() {
            if f.contains_atom(a) {
                return Err(KernelError::unsupported(
                    "substitution target occurs in a denominator",
                ));
            }
        }
        for r in self.num.radicals() {
            if r.radicand().contains_atom(a) {
                return Err(KernelError::unsupported(
                    "substitution target occurs in a radicand",
                ));
            }
        }
        let deg = self.num.degree_in(a);
        let mut out = Canon::zero();
        for e in 0..=deg {
            let coeff = self.num.coefficient_of(a, e);
            if coeff.is_zero() {
                continue;
            }
            let piece = Canon {
                num: coeff,
                den: self.den.clone(),
            };
            out = out.add(&piece.mul(&replacement.pow(i64::from(e))?));
        }
        Ok(out)
    }

    /// Every atom occurring in the numerator, denominator, or radicands.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut set = BTreeSet::new();
        self.num.collect_atoms(&mut set);
        for f in self.den.keys() {
            f.collect_atoms(&mut set);
        }
        set
    }

    pub fn eval(
        &self,
        value: &dyn Fn(&Atom) -> Option<Rational>,
    ) -> Result<Rational, KernelError> {
        let n = self.num.eval(value)?;
        let mut d = Rational::one();
        for (f, &e) in &self.den {
            let fv = f.eval(value)?;
            if fv.is_zero() {
                return Err(KernelError::DivisionByZero);
            }
            for _ in 0..e {
                d *= fv.clone();
            }
        }
        Ok(n / d)
    }

    fn push_den_factor(&mut self, f: Poly, e: u32) {
        if e == 0 {
            return;
        }
        let (content, primitive) = f.content_and_primitive();
        debug_assert!(!content.is_zero(), "denominator factor must be nonzero");
        if !content.is_one() {
            let mut inv = Rational::one();
            for _ in 0..e {
                inv /= content.clone();
            }
            self.num = self.num.scale(&inv);
        }
        if primitive.is_one() {
            return;
        }
        if let Some((c, m)) = primitive.as_single_term() {
            debug_assert!(c.is_one());
            for (a, ea) in m.atoms() {
                *self
                    .den
                    .entry(Poly::atom(a.clone()))
                    .or_insert(0) += e * ea;
            }
            return;
        }
        // Split off the monomial gcd so x^2 + x factors as x * (x + 1).
        let mut gcd: Option<BTreeMap<Atom, u32>> = None;
        for (m, _) in primitive.terms() {
            let exps: BTreeMap<Atom, u32> =
                m.atoms().map(|(a, ea)| (a.clone(), ea)).collect();
            gcd = Some(match gcd {
                None => exps,
                Some(prev) => prev
                    .into_iter()
                    .filter_map(|(a, ea)| {
                        let eb = exps.get(&a).copied().unwrap_or(0);
                        let e = ea.min(eb);
                        (e > 0).then_some((a, e))
                    })
                    .collect(),
            });
        }
        let gcd = gcd.unwrap_or_default();
        let mut rest = primitive;
        for (a, ea) in gcd {
            let divisor = Poly::atom_pow(a.clone(), ea);
            rest = rest
                .div_exact(&divisor)
                .expect("monomial gcd divides every term");
            *self.den.entry(Poly::atom(a)).or_insert(0) += e * ea;
        }
        if !rest.is_one() {
            *self.den.entry(rest).or_insert(0) += e;
        }
    }

    /// Cancels denominator factors against the numerator: single-atom
    /// factors by exponent bookkeeping, general factors by attempted exact
    /// division. This is not a full multivariate gcd, but the expressions
    /// built here only ever share the factors this catches.
    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let factors: Vec<(Poly, u32)> = std::mem::take(&mut self.den).into_iter().collect();
        for (f, mut e) in factors {
            if let Some((c, m)) = f.as_single_term() {
                if c.is_one() && m.degree() == 1 {
                    let a = m.atoms().next().unwrap().0.clone();
                    let min_e = self
                        .num
                        .terms()
                        .map(|(mm, _)| mm.exponent(&a))
                        .min()
                        .unwrap_or(0);
                    let cancel = min_e.min(e);
                    if cancel > 0 {
                        let divisor = Poly::atom_pow(a, cancel);
                        self.num = self
                            .num
                            .div_exact(&divisor)
                            .expect("atom power divides by exponent bookkeeping");
                        e -= cancel;
                    }
                    if e > 0 {
                        self.den.insert(f, e);
                    }
                    continue;
                }
            }
            while e > 0 {
                match self.num.div_exact(&f) {
                    Some(q) => {
                        self.num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            if e > 0 {
                self.den.insert(f, e);
            }
        }
    }

    fn render(&self, latex: bool) -> String {
        let num_s = if latex {
            self.num.latex()
        } else {
            self.num.text()
        };
        if self.den.is_empty() {
            return num_s;
        }
        let mut factors: Vec<(&Poly, &u32)> = self.den.iter().collect();
        factors.sort_by_key(|(f, _)| f.term_count());
        let mut den_parts = Vec::new();
        for (f, &e) in factors {
            let fs = if latex { f.latex() } else { f.text() };
            let needs_parens = f.term_count() > 1
                || f.as_single_term()
                    .map(|(c, m)| !c.is_one() || m.degree() > 1)
                    .unwrap_or(false);
            let base = if needs_parens && !(latex && e == 1 && self.den.len() == 1) {
                format!("({fs})")
            } else {
                fs
            };
            if e == 1 {
                den_parts.push(base);
            } else if latex {
                den_parts.push(format!("{base}^{{{e}}}"));
            } else {
                den_parts.push(format!("{base}^{e}"));
            }
        }
        if latex {
            format!(r"\frac{{{num_s}}}{{{}}}", den_parts.join(" "))
        } else {
            let num_wrapped = if self.num.term_count() > 1 {
                format!("({num_s})")
            } else {
                num_s
            };
            let den_joined = den_parts.join("*");
            let den_wrapped = if den_parts.len() > 1 {
                format!("({den_joined})")
            } else {
                den_joined
            };
            format!("{num_wrapped}/{den_wrapped}")
        }
    }

    pub fn text(&self) -> String {
        self.render(false)
    }

    pub fn latex(&self) -> String {
        self.render(true)
    }
}

impl fmt::Display for Canon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// Partial derivative of a polynomial as a fraction: radicals contribute
/// `dr/ds * sqrt(r) / (2r)` through the chain rule, and for the covering
/// variable each term also picks up its exponential grade.
fn poly_partial(p: &Poly, s: &Atom) -> Result<Canon, KernelError> {
    let mut out = Canon::from_poly(p.formal_partial(s));
    if *s == Atom::V {
        out = out.add(&Canon::from_poly(p.exp_grade_partial()));
    }
    for r in p.radicals() {
        let dr = r.radicand().formal_partial(s);
        if dr.is_zero() {
            continue;
        }
        let atom = Atom::Sqrt(r.clone());
        let dp_dr = p.formal_partial(&atom);
        if dp_dr.is_zero() {
            continue;
        }
        let num = dp_dr.mul(&dr).mul(&Poly::atom(atom));
        let piece = Canon::fraction(num, r.radicand().scale(&rat(2)))?;
        out = out.add(&piece);
    }
    Ok(out)
}

/// Total derivative along `x` over the covering system: `x` moves, every
/// jet variable and every `c`-derivative steps up, and `v` differentiates
/// to the supplied flux. Pass a zero flux for expressions that do not
/// involve the covering variable.
pub fn total_derivative(e: &Canon, flux: &Canon) -> Result<Canon, KernelError> {
    let mut out = e.partial(&Atom::X)?;
    for a in e.atoms() {
        match &a {
            Atom::Jet(jv) => {
                let up = Canon::atom(Atom::Jet(jv.raised()));
                out = out.add(&up.mul(&e.partial(&a)?));
            }
            Atom::CDeriv(d) => {
                let up = Canon::atom(Atom::CDeriv(d + 1));
                out = out.add(&up.mul(&e.partial(&a)?));
            }
            _ => {}
        }
    }
    if !flux.is_zero_certain() {
        let dv = e.partial(&Atom::V)?;
        if !dv.is_zero_certain() {
            out = out.add(&flux.mul(&dv));
        }
    }
    Ok(out)
}
