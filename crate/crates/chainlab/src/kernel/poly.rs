//! Multivariate polynomials over the covering variables.
//!
//! Atoms are the independent variable `x`, the nonlocal variable `v`, jet
//! variables of `u` and `zeta`, the derivative tower `c, c_x, c_xx, ...` of
//! an undetermined function `c(x)`, symbolic constants, and square roots of
//! registered-positive polynomials. Each monomial additionally carries a
//! rational grade `alpha` standing for a factor `exp(alpha*v)`; products add
//! grades, so powers of the exponential never leave the representation.
//!
//! The representation is canonical: coefficients are exact rationals, zero
//! terms are dropped, and `sqrt(r)^2` is rewritten to `r` during
//! multiplication. Structural equality is therefore semantic equality on
//! this class.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num::integer::Integer;
use num::{BigInt, One, Signed, Zero};

use super::jet::{DiffPoly, JetVar};
use super::rational::{format_rational, rat, Rational};
use super::KernelError;

/// A square-root atom. The wrapped polynomial is the radicand; it is kept
/// square-root-free, primitive, and with a positive leading coefficient, so
/// equal radicands always produce the identical atom. Constructing one
/// asserts that the radicand is positive wherever the expression is used.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Radical(Arc<Poly>);

impl Radical {
    pub fn radicand(&self) -> &Poly {
        &self.0
    }
}

/// An atomic symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    /// The independent variable.
    X,
    /// The nonlocal (covering) variable.
    V,
    /// A jet variable of `u` or `zeta`.
    Jet(JetVar),
    /// The `d`-th derivative of the undetermined function `c(x)`;
    /// `CDeriv(0)` is `c` itself.
    CDeriv(u32),
    /// Integration constant `k_i` of a solution family.
    K(u32),
    /// The radicand integration constant `C`.
    BigC,
    /// Generic symbolic coefficient `a_i` (used by generality witnesses).
    Coeff(u32),
    /// Square root of a registered-positive polynomial.
    Sqrt(Radical),
}

impl Atom {
    pub fn u(order: u32) -> Self {
        Atom::Jet(JetVar::u(order))
    }

    pub fn zeta(order: u32) -> Self {
        Atom::Jet(JetVar::zeta(order))
    }

    fn render(&self, latex: bool) -> String {
        match self {
            Atom::X => "x".to_string(),
            Atom::V => "v".to_string(),
            Atom::Jet(jv) => {
                if latex {
                    jv.latex()
                } else {
                    jv.text()
                }
            }
            Atom::CDeriv(d) => {
                let jv = JetVar::u(*d); // reuse the subscript scheme
                let s = if latex { jv.latex() } else { jv.text() };
                s.replacen('u', "c", 1)
            }
            Atom::K(i) => {
                if latex {
                    format!("k_{{{i}}}")
                } else {
                    format!("k{i}")
                }
            }
            Atom::BigC => "C".to_string(),
            Atom::Coeff(i) => {
                if latex {
                    format!("a_{{{i}}}")
                } else {
                    format!("a{i}")
                }
            }
            Atom::Sqrt(r) => {
                if latex {
                    format!(r"\sqrt{{{}}}", r.radicand().render(true))
                } else {
                    format!("sqrt({})", r.radicand().render(false))
                }
            }
        }
    }
}

/// A power product of atoms with an `exp(alpha*v)` grade.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Monomial {
    vars: BTreeMap<Atom, u32>,
    exp_v: Rational,
}

impl Monomial {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn atom(a: Atom) -> Self {
        Self::atom_pow(a, 1)
    }

    pub fn atom_pow(a: Atom, e: u32) -> Self {
        let mut vars = BTreeMap::new();
        if e > 0 {
            vars.insert(a, e);
        }
        Monomial {
            vars,
            exp_v: Rational::zero(),
        }
    }

    pub fn exp_grade(alpha: Rational) -> Self {
        Monomial {
            vars: BTreeMap::new(),
            exp_v: alpha,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.vars.is_empty() && self.exp_v.is_zero()
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        self.vars.get(a).copied().unwrap_or(0)
    }

    pub fn exp_v(&self) -> &Rational {
        &self.exp_v
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Atom, u32)> {
        self.vars.iter().map(|(a, &e)| (a, e))
    }

    pub fn degree(&self) -> u32 {
        self.vars.values().sum()
    }

    /// Raw product of the exponent maps; square-root reduction happens at
    /// the polynomial level.
    fn mul_raw(&self, other: &Self) -> Self {
        let mut vars = self.vars.clone();
        for (a, &e) in &other.vars {
            *vars.entry(a.clone()).or_insert(0) += e;
        }
        Monomial {
            vars,
            exp_v: self.exp_v.clone() + other.exp_v.clone(),
        }
    }

    fn without(&self, a: &Atom) -> Self {
        let mut vars = self.vars.clone();
        vars.remove(a);
        Monomial {
            vars,
            exp_v: self.exp_v.clone(),
        }
    }

    fn with_exponent(&self, a: &Atom, e: u32) -> Self {
        let mut vars = self.vars.clone();
        if e == 0 {
            vars.remove(a);
        } else {
            vars.insert(a.clone(), e);
        }
        Monomial {
            vars,
            exp_v: self.exp_v.clone(),
        }
    }

    /// Division-order comparison: graded, then lexicographic over the union
    /// of atoms. Monotone under monomial multiplication, which is what the
    /// exact-division loop needs. The exponential grade takes no part;
    /// division only runs on grade-separated groups.
    fn cmp_division(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let keys: BTreeSet<&Atom> = self.vars.keys().chain(other.vars.keys()).collect();
            for a in keys {
                match self.exponent(a).cmp(&other.exponent(a)) {
                    Ordering::Equal => {}
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }

    fn divides(&self, other: &Self) -> bool {
        self.vars.iter().all(|(a, &e)| other.exponent(a) >= e)
    }

    fn div(&self, other: &Self) -> Self {
        let mut vars = BTreeMap::new();
        for (a, &e) in &self.vars {
            let r = e - other.exponent(a);
            if r > 0 {
                vars.insert(a.clone(), r);
            }
        }
        Monomial {
            vars,
            exp_v: self.exp_v.clone() - other.exp_v.clone(),
        }
    }

    fn render(&self, latex: bool) -> Vec<String> {
        let mut parts = Vec::new();
        // Constants read first, like `2*k1*x`, then variables.
        let mut ordered: Vec<(&Atom, u32)> = self.atoms().collect();
        ordered.sort_by_key(|(a, _)| {
            !matches!(a, Atom::K(_) | Atom::BigC | Atom::Coeff(_))
        });
        for (a, e) in ordered {
            let name = a.render(latex);
            if e == 1 {
                parts.push(name);
            } else if latex {
                parts.push(format!("{name}^{{{e}}}"));
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        if !self.exp_v.is_zero() {
            let alpha = &self.exp_v;
            if latex {
                if alpha.is_one() {
                    parts.push("e^{v}".to_string());
                } else {
                    parts.push(format!("e^{{{} v}}", format_rational(alpha)));
                }
            } else if alpha.is_one() {
                parts.push("exp(v)".to_string());
            } else {
                parts.push(format!("exp({}*v)", format_rational(alpha)));
            }
        }
        parts
    }
}

/// Multivariate polynomial over [`Atom`]s with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(rat(1))
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::unit(), c);
        p
    }

    pub fn atom(a: Atom) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::atom(a), rat(1));
        p
    }

    pub fn atom_pow(a: Atom, e: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::atom_pow(a, e), rat(1));
        p
    }

    /// `exp(alpha*v)` as a polynomial.
    pub fn exp_v(alpha: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::exp_grade(alpha), rat(1));
        p
    }

    pub fn from_terms(terms: Vec<(Rational, Monomial)>) -> Self {
        let mut p = Self::zero();
        for (c, m) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    /// The value if the polynomial is a constant (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_unit().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// The `(coefficient, monomial)` pair if the polynomial has one term.
    pub fn as_single_term(&self) -> Option<(Rational, Monomial)> {
        (self.terms.len() == 1).then(|| {
            let (m, c) = self.terms.iter().next().unwrap();
            (c.clone(), m.clone())
        })
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone() * k.clone());
        }
        out
    }

    /// Product of two monomials as a polynomial, rewriting any
    /// `sqrt(r)^(2t+s)` into `r^t * sqrt(r)^s`.
    fn mul_monomials(a: &Monomial, b: &Monomial, c: Rational) -> Self {
        let raw = a.mul_raw(b);
        let radicals: Vec<(Atom, u32)> = raw
            .atoms()
            .filter(|(atom, e)| matches!(atom, Atom::Sqrt(_)) && *e >= 2)
            .map(|(atom, e)| (atom.clone(), e))
            .collect();
        if radicals.is_empty() {
            let mut p = Self::zero();
            p.add_term(raw, c);
            return p;
        }
        let mut reduced = raw;
        let mut extra = Self::constant(c);
        for (atom, e) in radicals {
            reduced = reduced.with_exponent(&atom, e % 2);
            if let Atom::Sqrt(r) = &atom {
                extra = extra.mul(&r.radicand().pow(e / 2));
            }
        }
        let mut p = Self::zero();
        for (m, k) in &extra.terms {
            p.add_term(m.mul_raw(&reduced), k.clone());
        }
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = Self::mul_monomials(ma, mb, ca.clone() * cb.clone());
                out = out.add(&prod);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut base = self.clone();
        let mut e = e;
        let mut out = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Formal partial derivative treating every atom as independent (no
    /// chain rules; those live in the canonical-fraction layer).
    pub fn formal_partial(&self, a: &Atom) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(a);
            if e > 0 {
                let reduced = m.with_exponent(a, e - 1);
                out.add_term(reduced, c.clone() * rat(i64::from(e)));
            }
        }
        out
    }

    /// Derivative of the exponential grade: sum of `alpha * term`.
    pub fn exp_grade_partial(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if !m.exp_v.is_zero() {
                out.add_term(m.clone(), c.clone() * m.exp_v.clone());
            }
        }
        out
    }

    /// Every atom that occurs, including inside radicands.
    pub fn collect_atoms(&self, into: &mut BTreeSet<Atom>) {
        for m in self.terms.keys() {
            for (a, _) in m.atoms() {
                into.insert(a.clone());
                if let Atom::Sqrt(r) = a {
                    r.radicand().collect_atoms(into);
                }
            }
        }
    }

    pub fn contains_atom(&self, a: &Atom) -> bool {
        let mut set = BTreeSet::new();
        self.collect_atoms(&mut set);
        set.contains(a)
    }

    pub fn has_exp_grade(&self) -> bool {
        self.terms.keys().any(|m| !m.exp_v.is_zero())
    }

    pub fn radicals(&self) -> BTreeSet<Radical> {
        let mut set = BTreeSet::new();
        let mut atoms = BTreeSet::new();
        self.collect_atoms(&mut atoms);
        for a in atoms {
            if let Atom::Sqrt(r) = a {
                set.insert(r);
            }
        }
        set
    }

    /// Largest monomial in the division order, with its coefficient.
    fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms
            .iter()
            .max_by(|a, b| a.0.cmp_division(b.0))
    }

    /// Exact division. Returns `None` when the divisor does not divide
    /// exactly (or is unsupported: zero, carrying an exponential grade, or
    /// carrying radicals). Dividends with exponential grades or radicals
    /// are divided group-by-group, the groups being the distinct
    /// (grade, radical-part) monomial factors.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if divisor.has_exp_grade() || !divisor.radicals().is_empty() {
            return None;
        }
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&(Rational::one() / c)));
        }
        // Group the dividend by its special (grade + radical) part.
        let mut groups: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut special = Monomial::unit();
            special.exp_v = m.exp_v.clone();
            let mut plain = Monomial::unit();
            for (a, e) in m.atoms() {
                if matches!(a, Atom::Sqrt(_)) {
                    special.vars.insert(a.clone(), e);
                } else {
                    plain.vars.insert(a.clone(), e);
                }
            }
            groups
                .entry(special)
                .or_default()
                .add_term(plain, c.clone());
        }
        let mut out = Self::zero();
        for (special, group) in groups {
            let q = group.div_exact_plain(divisor)?;
            for (m, c) in &q.terms {
                out.add_term(m.mul_raw(&special), c.clone());
            }
        }
        Some(out)
    }

    fn div_exact_plain(&self, divisor: &Self) -> Option<Self> {
        let (dm, dc) = divisor.leading_term()?;
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while !rem.is_zero() {
            let (lm, lc) = rem.leading_term()?;
            if !dm.divides(lm) {
                return None;
            }
            let qm = lm.div(&dm);
            let qc = lc.clone() / dc.clone();
            quot.add_term(qm.clone(), qc.clone());
            let mut single = Self::zero();
            single.add_term(qm, qc);
            rem = rem.sub(&single.mul(divisor));
        }
        Some(quot)
    }

    /// Rational content and primitive part: `self == content * primitive`
    /// with the primitive part having coprime integer coefficients and a
    /// positive leading coefficient. Zero returns `(0, 0)`.
    pub fn content_and_primitive(&self) -> (Rational, Poly) {
        if self.is_zero() {
            return (Rational::zero(), Self::zero());
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = Rational::new(num_gcd, den_lcm);
        let leading = self
            .leading_term()
            .map(|(_, c)| c.clone())
            .expect("nonzero polynomial has a leading term");
        if leading.is_negative() {
            content = -content;
        }
        let primitive = self.scale(&(Rational::one() / content.clone()));
        (content, primitive)
    }

    /// Replaces an atom by a rational value. Radicands are substituted too;
    /// a radical whose radicand becomes the square of a rational collapses
    /// to that rational (taking the nonnegative root).
    pub fn substitute_atom(&self, target: &Atom, value: &Rational) -> Result<Self, KernelError> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Monomial::unit();
            rest.exp_v = m.exp_v.clone();
            let mut radical_factors = Self::one();
            for (a, e) in m.atoms() {
                if a == target {
                    let mut p = Rational::one();
                    for _ in 0..e {
                        p *= value.clone();
                    }
                    coeff *= p;
                    continue;
                }
                match a {
                    Atom::Sqrt(r) if r.radicand().contains_atom(target) => {
                        let new_rad = r.radicand().substitute_atom(target, value)?;
                        let factor = sqrt_poly(&new_rad)?;
                        radical_factors = radical_factors.mul(&factor.pow(e));
                    }
                    _ => {
                        rest.vars.insert(a.clone(), e);
                    }
                }
            }
            let mut base = Self::zero();
            base.add_term(rest, coeff);
            out = out.add(&base.mul(&radical_factors));
        }
        Ok(out)
    }

    /// Full evaluation with every atom assigned a rational value. Fails on
    /// exponential grades, radicals that do not collapse to rationals, or
    /// unassigned atoms.
    pub fn eval(&self, value: &dyn Fn(&Atom) -> Option<Rational>) -> Result<Rational, KernelError> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            if !m.exp_v.is_zero() {
                return Err(KernelError::unsupported(
                    "cannot evaluate an exponential grade to a rational",
                ));
            }
            let mut t = c.clone();
            for (a, e) in m.atoms() {
                let val = match a {
                    Atom::Sqrt(r) => {
                        let inner = r.radicand().eval(value)?;
                        rational_sqrt(&inner).ok_or_else(|| {
                            KernelError::unsupported(format!(
                                "sqrt({inner}) is not rational at the evaluation point"
                            ))
                        })?
                    }
                    _ => value(a).ok_or_else(|| {
                        KernelError::unsupported(format!("unassigned atom {}", a.render(false)))
                    })?,
                };
                let mut p = Rational::one();
                for _ in 0..e {
                    p *= val.clone();
                }
                t *= p;
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Antiderivative in `x` with zero constant term. Fails if `x` occurs
    /// inside a radicand (not a polynomial integral then).
    pub fn antiderivative_x(&self) -> Result<Self, KernelError> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for (a, _) in m.atoms() {
                if let Atom::Sqrt(r) = a {
                    if r.radicand().contains_atom(&Atom::X) {
                        return Err(KernelError::unsupported(
                            "antiderivative of a radical in x",
                        ));
                    }
                }
            }
            let e = m.exponent(&Atom::X);
            let raised = m.with_exponent(&Atom::X, e + 1);
            out.add_term(raised, c.clone() / rat(i64::from(e) + 1));
        }
        Ok(out)
    }

    /// Degree in one atom.
    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.terms
            .keys()
            .map(|m| m.exponent(a))
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of `a^e` as a polynomial in the remaining atoms.
    pub fn coefficient_of(&self, a: &Atom, e: u32) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.exponent(a) == e {
                out.add_term(m.without(a), c.clone());
            }
        }
        out
    }

    fn render(&self, latex: bool) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            b.0.exponent(&Atom::X)
                .cmp(&a.0.exponent(&Atom::X))
                .then_with(|| b.0.degree().cmp(&a.0.degree()))
                .then_with(|| b.0.cmp(a.0))
        });
        let mut out = String::new();
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut parts = m.render(latex);
            if !mag.is_one() || parts.is_empty() {
                parts.insert(0, format_rational(&mag));
            }
            let sep = if latex { " " } else { "*" };
            out.push_str(&parts.join(sep));
        }
        out
    }

    pub fn text(&self) -> String {
        self.render(false)
    }

    pub fn latex(&self) -> String {
        self.render(true)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// Square root of a polynomial as a polynomial factor. Constants become
/// `sqrt(n)` atoms over the integer `numer*denom` (or plain rationals for
/// perfect squares); general radicands are normalized to their primitive
/// part so equal radicands share one atom. The caller asserts positivity.
pub fn sqrt_poly(p: &Poly) -> Result<Poly, KernelError> {
    if p.is_zero() {
        return Ok(Poly::zero());
    }
    if !p.radicals().is_empty() {
        return Err(KernelError::unsupported("nested radicals"));
    }
    if p.has_exp_grade() {
        return Err(KernelError::unsupported(
            "square root of an exponential grade",
        ));
    }
    if let Some(c) = p.as_constant() {
        if c.is_negative() {
            return Err(KernelError::unsupported(
                "square root of a negative constant",
            ));
        }
        if let Some(r) = rational_sqrt(&c) {
            return Ok(Poly::constant(r));
        }
        // sqrt(n/d) = sqrt(n*d) / d with n*d a positive integer
        let nd = c.numer() * c.denom();
        let rad = Radical(Arc::new(Poly::constant(Rational::from_integer(nd))));
        return Ok(Poly::atom(Atom::Sqrt(rad)).scale(&Rational::new(
            BigInt::one(),
            c.denom().clone(),
        )));
    }
    let (content, primitive) = p.content_and_primitive();
    if content.is_negative() {
        return Err(KernelError::unsupported(
            "square root of a negated polynomial",
        ));
    }
    let content_factor = sqrt_poly(&Poly::constant(content))?;
    let rad = Radical(Arc::new(primitive));
    Ok(Poly::atom(Atom::Sqrt(rad)).mul(&content_factor))
}

/// Exact square root of a rational, if it is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

/// Bridge from the jet layer: a [`DiffPoly`] as a general [`Poly`].
pub fn poly_from_diffpoly(p: &DiffPoly) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let mut mono = Monomial::unit();
        for (jv, e) in m.variables() {
            mono.vars.insert(Atom::Jet(jv), e);
        }
        out.add_term(mono, c.clone());
    }
    out
}

/// Convenience constructors for univariate polynomials in `x`.
pub fn x_poly(coeffs_ascending: &[Rational]) -> Poly {
    let mut p = Poly::zero();
    for (k, c) in coeffs_ascending.iter().enumerate() {
        p.add_term(Monomial::atom_pow(Atom::X, k as u32), c.clone());
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rational::ratio;

    fn x() -> Poly {
        Poly::atom(Atom::X)
    }

    fn u() -> Poly {
        Poly::atom(Atom::u(0))
    }

    #[test]
    fn arithmetic_is_canonical() {
        let p = x().mul(&u()).add(&Poly::one());
        let q = u().mul(&x()).add(&Poly::one());
        assert_eq!(p, q);
        assert!(p.sub(&q).is_zero());
    }

    #[test]
    fn exp_grades_add_under_multiplication() {
        let a = Poly::exp_v(rat(1));
        let b = Poly::exp_v(rat(2));
        let ab = a.mul(&b);
        assert_eq!(ab, Poly::exp_v(rat(3)));
        let inv = Poly::exp_v(rat(-3));
        assert!(ab.mul(&inv).is_one());
    }

    #[test]
    fn sqrt_square_collapses() {
        let s = x().add(&Poly::one()); // x + 1
        let r = sqrt_poly(&s).unwrap();
        assert_eq!(r.mul(&r), s);
        let r3 = r.pow(3);
        assert_eq!(r3, s.mul(&r));
    }

    #[test]
    fn sqrt_of_scaled_polynomial_extracts_square_content() {
        // sqrt(4x^2 + 8x + 4) = 2*sqrt(x^2 + 2x + 1)  (content 4 extracted)
        let p = x_poly(&[rat(4), rat(8), rat(4)]);
        let r = sqrt_poly(&p).unwrap();
        assert_eq!(r.mul(&r), p);
        let (content, _) = r.content_and_primitive();
        assert_eq!(content, rat(2));
    }

    #[test]
    fn sqrt_of_constants() {
        assert_eq!(
            sqrt_poly(&Poly::constant(ratio(9, 4))).unwrap(),
            Poly::constant(ratio(3, 2))
        );
        let r2 = sqrt_poly(&Poly::constant(rat(2))).unwrap();
        assert_eq!(r2.mul(&r2), Poly::constant(rat(2)));
        assert!(sqrt_poly(&Poly::constant(rat(-1))).is_err());
    }

    #[test]
    fn exact_division_succeeds_and_fails_properly() {
        let q = x().add(&u()); // x + u
        let p = q.mul(&q).mul(&x()); // x(x+u)^2
        let quot = p.div_exact(&q).unwrap();
        assert_eq!(quot, q.mul(&x()));
        assert!(x().add(&Poly::one()).div_exact(&q).is_none());
    }

    #[test]
    fn division_respects_exp_grades() {
        // exp(v)*(x+u)^2 / (x+u) = exp(v)*(x+u)
        let q = x().add(&u());
        let p = Poly::exp_v(rat(1)).mul(&q).mul(&q);
        let quot = p.div_exact(&q).unwrap();
        assert_eq!(quot, Poly::exp_v(rat(1)).mul(&q));
    }

    #[test]
    fn content_and_primitive_normalize_sign() {
        let p = x().scale(&rat(-4)).add(&Poly::constant(rat(-6)));
        let (content, primitive) = p.content_and_primitive();
        assert_eq!(content, rat(-2));
        assert_eq!(primitive, x().scale(&rat(2)).add(&Poly::constant(rat(3))));
    }

    #[test]
    fn formal_partial_is_a_derivation() {
        let p = x().mul(&u()).add(&x().pow(3));
        let q = u().pow(2);
        let lhs = p.mul(&q).formal_partial(&Atom::u(0));
        let rhs = p
            .formal_partial(&Atom::u(0))
            .mul(&q)
            .add(&p.mul(&q.formal_partial(&Atom::u(0))));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn antiderivative_and_eval() {
        // int (3x^2 + 1) dx = x^3 + x
        let p = x_poly(&[rat(1), rat(0), rat(3)]);
        let ad = p.antiderivative_x().unwrap();
        assert_eq!(ad, x_poly(&[rat(0), rat(1), rat(0), rat(1)]));
        let val = ad
            .eval(&|a| (a == &Atom::X).then(|| rat(2)))
            .unwrap();
        assert_eq!(val, rat(10));
    }

    #[test]
    fn substitute_atom_reaches_radicands() {
        // sqrt(x + 2) with x := 2 gives 2
        let s = sqrt_poly(&x().add(&Poly::constant(rat(2)))).unwrap();
        let at2 = s.substitute_atom(&Atom::X, &rat(2)).unwrap();
        assert_eq!(at2, Poly::constant(rat(2)));
        // with x := 1 it stays sqrt(3)
        let at1 = s.substitute_atom(&Atom::X, &rat(1)).unwrap();
        assert_eq!(at1, sqrt_poly(&Poly::constant(rat(3))).unwrap());
    }

    #[test]
    fn rendering() {
        let p = x()
            .pow(2)
            .scale(&rat(3))
            .add(&u().mul(&Poly::exp_v(rat(1))).scale(&rat(-1)));
        assert_eq!(p.text(), "3*x^2 - u*exp(v)");
        let s = sqrt_poly(&x().add(&Poly::one())).unwrap();
        assert_eq!(s.text(), "sqrt(x + 1)");
        assert_eq!(s.latex(), r"\sqrt{x + 1}");
    }
}
