//! Differential polynomials in jet variables.
//!
//! A [`DiffPoly`] is a finite sum of monomials in the jet variables
//! `u, u_x, u_xx, ...` (and, for reduced equations, `zeta, zeta_x, ...`)
//! with exact rational coefficients. The representation is canonical by
//! construction: exponents are positive, zero coefficients are dropped, and
//! terms live in ordered maps, so structural equality is semantic equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};

use super::rational::{format_rational, rat, Rational};

/// Dependent symbol a jet variable belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dep {
    /// The original dependent variable `u`.
    U,
    /// The reduced dependent variable `zeta` (an invariant of the symmetry).
    Zeta,
}

/// A jet variable: the `order`-th x-derivative of a dependent symbol.
/// Order 0 is the symbol itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    pub dep: Dep,
    pub order: u32,
}

impl JetVar {
    pub fn u(order: u32) -> Self {
        JetVar { dep: Dep::U, order }
    }

    pub fn zeta(order: u32) -> Self {
        JetVar {
            dep: Dep::Zeta,
            order,
        }
    }

    pub fn raised(self) -> Self {
        JetVar {
            dep: self.dep,
            order: self.order + 1,
        }
    }

    fn name(base: &str, order: u32, latex: bool) -> String {
        match (order, latex) {
            (0, _) => base.to_string(),
            (1..=4, false) => format!("{base}_{}", "x".repeat(order as usize)),
            (_, false) => format!("{base}^({order})"),
            (1..=4, true) => format!("{base}_{{{}}}", "x".repeat(order as usize)),
            (_, true) => format!("{base}^{{({order})}}"),
        }
    }

    /// Plain-text name, e.g. `u_xx` or `zeta_x`.
    pub fn text(&self) -> String {
        let base = match self.dep {
            Dep::U => "u",
            Dep::Zeta => "zeta",
        };
        Self::name(base, self.order, false)
    }

    /// LaTeX name, e.g. `u_{xx}` or `\zeta_{x}`.
    pub fn latex(&self) -> String {
        let base = match self.dep {
            Dep::U => "u",
            Dep::Zeta => r"\zeta",
        };
        Self::name(base, self.order, true)
    }
}

/// A power product of jet variables. The unit monomial is the empty map.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct JetMonomial {
    exps: BTreeMap<JetVar, u32>,
}

impl JetMonomial {
    pub fn unit() -> Self {
        Self::default()
    }

    /// Monomial from `(variable, exponent)` pairs; zero exponents are dropped.
    pub fn from_pairs(pairs: &[(JetVar, u32)]) -> Self {
        let mut exps = BTreeMap::new();
        for &(v, e) in pairs {
            if e > 0 {
                *exps.entry(v).or_insert(0) += e;
            }
        }
        JetMonomial { exps }
    }

    /// Monomial in `u`-jets only, from `(order, exponent)` pairs.
    pub fn of_u(pairs: &[(u32, u32)]) -> Self {
        Self::from_pairs(
            &pairs
                .iter()
                .map(|&(k, e)| (JetVar::u(k), e))
                .collect::<Vec<_>>(),
        )
    }

    pub fn exponent(&self, v: JetVar) -> u32 {
        self.exps.get(&v).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.exps.values().sum()
    }

    pub fn variables(&self) -> impl Iterator<Item = (JetVar, u32)> + '_ {
        self.exps.iter().map(|(&v, &e)| (v, e))
    }

    pub fn is_unit(&self) -> bool {
        self.exps.is_empty()
    }

    fn mul(&self, other: &Self) -> Self {
        let mut exps = self.exps.clone();
        for (&v, &e) in &other.exps {
            *exps.entry(v).or_insert(0) += e;
        }
        JetMonomial { exps }
    }

    /// Removes one factor `v^e`; `None` if the monomial lacks it.
    fn divide_by(&self, v: JetVar, e: u32) -> Option<Self> {
        let have = self.exponent(v);
        if have < e {
            return None;
        }
        let mut exps = self.exps.clone();
        if have == e {
            exps.remove(&v);
        } else {
            exps.insert(v, have - e);
        }
        Some(JetMonomial { exps })
    }

    /// Weight of the monomial under the chain grading, scaled by `m` to stay
    /// integral: a `u`-jet of order `k` weighs `k*m + 1` per power and a
    /// `zeta`-jet of order `k` weighs `(k + 1)*m` per power.
    pub fn scaled_weight(&self, m: u32) -> u64 {
        self.exps
            .iter()
            .map(|(v, &e)| {
                let w = match v.dep {
                    Dep::U => u64::from(v.order) * u64::from(m) + 1,
                    Dep::Zeta => (u64::from(v.order) + 1) * u64::from(m),
                };
                w * u64::from(e)
            })
            .sum()
    }

    /// Sequence of jet orders of one dependent symbol, each repeated by its
    /// exponent, descending. Used by the display ordering.
    fn order_seq(&self, dep: Dep) -> Vec<u32> {
        let mut seq = Vec::new();
        for (v, &e) in self.exps.iter().rev() {
            if v.dep == dep {
                for _ in 0..e {
                    seq.push(v.order);
                }
            }
        }
        seq
    }
}

/// Descending-lexicographic comparison of jet-order sequences; when one
/// sequence is a prefix of the other, the longer (higher-degree) one comes
/// first. This reproduces the printed ordering of the chain catalog.
fn seq_display_cmp(a: &[u32], b: &[u32]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match y.cmp(x) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    b.len().cmp(&a.len())
}

fn display_cmp(a: &JetMonomial, b: &JetMonomial) -> Ordering {
    seq_display_cmp(&a.order_seq(Dep::Zeta), &b.order_seq(Dep::Zeta))
        .then_with(|| seq_display_cmp(&a.order_seq(Dep::U), &b.order_seq(Dep::U)))
        .then_with(|| a.cmp(b))
}

/// A differential polynomial: jet monomials with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffPoly {
    terms: BTreeMap<JetMonomial, Rational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(JetMonomial::unit(), c);
        p
    }

    pub fn var(v: JetVar) -> Self {
        let mut p = Self::zero();
        p.add_term(JetMonomial::from_pairs(&[(v, 1)]), rat(1));
        p
    }

    /// Polynomial from `(coefficient, monomial)` pairs.
    pub fn from_terms(terms: &[(Rational, JetMonomial)]) -> Self {
        let mut p = Self::zero();
        for (c, m) in terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    /// Polynomial in `u`-jets from integer coefficients and
    /// `(order, exponent)` monomials; the builder the catalog tables use.
    pub fn of_u(terms: &[(i64, &[(u32, u32)])]) -> Self {
        let mut p = Self::zero();
        for &(c, pairs) in terms {
            p.add_term(JetMonomial::of_u(pairs), rat(c));
        }
        p
    }

    fn add_term(&mut self, m: JetMonomial, c: Rational) {
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

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&JetMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &JetMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Highest jet order of `dep` that occurs, if any.
    pub fn max_order(&self, dep: Dep) -> Option<u32> {
        self.terms
            .keys()
            .flat_map(|m| m.variables())
            .filter(|(v, _)| v.dep == dep)
            .map(|(v, _)| v.order)
            .max()
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

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(rat(1));
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Total x-derivative: the derivation with `D(u^(k)) = u^(k+1)` (and the
    /// same for `zeta`-jets), extended by linearity and the Leibniz rule.
    pub fn total_derivative(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for (v, e) in m.variables() {
                let reduced = m
                    .divide_by(v, 1)
                    .expect("variable taken from the monomial itself");
                let raised = reduced.mul(&JetMonomial::from_pairs(&[(v.raised(), 1)]));
                out.add_term(raised, c.clone() * rat(i64::from(e)));
            }
        }
        out
    }

    /// Partial derivative with respect to a single jet variable.
    pub fn partial(&self, v: JetVar) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > 0 {
                let reduced = m.divide_by(v, 1).expect("exponent checked above");
                out.add_term(reduced, c.clone() * rat(i64::from(e)));
            }
        }
        out
    }

    /// Replaces every occurrence of `v` by `replacement`, expanding powers.
    pub fn substitute(&self, v: JetVar, replacement: &Self) -> Self {
        let mut powers: Vec<DiffPoly> = vec![Self::constant(rat(1))];
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            let rest = m.divide_by(v, e).expect("own exponent");
            while powers.len() <= e as usize {
                let next = powers.last().unwrap().mul(replacement);
                powers.push(next);
            }
            let mut contrib = Self::zero();
            contrib.add_term(rest, c.clone());
            out = out.add(&contrib.mul(&powers[e as usize]));
        }
        out
    }

    /// Exact division by the monomial `v`; `None` unless every term contains it.
    pub fn divide_by_var(&self, v: JetVar) -> Option<Self> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.divide_by(v, 1)?, c.clone());
        }
        Some(out)
    }

    /// Renames every jet of `from` to the same order of `to`.
    pub fn rename_dep(&self, from: Dep, to: Dep) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let pairs: Vec<(JetVar, u32)> = m
                .variables()
                .map(|(v, e)| {
                    if v.dep == from {
                        (
                            JetVar {
                                dep: to,
                                order: v.order,
                            },
                            e,
                        )
                    } else {
                        (v, e)
                    }
                })
                .collect();
            out.add_term(JetMonomial::from_pairs(&pairs), c.clone());
        }
        out
    }

    /// Common scaled weight of all terms, if the polynomial is isobaric.
    pub fn uniform_scaled_weight(&self, m: u32) -> Option<u64> {
        let mut it = self.terms.keys().map(|mon| mon.scaled_weight(m));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Evaluates with jet values supplied by `value`.
    pub fn eval_f64(&self, value: &dyn Fn(JetVar) -> f64) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = super::rational::rational_to_f64(c);
            for (v, e) in m.variables() {
                t *= value(v).powi(e as i32);
            }
            acc += t;
        }
        acc
    }

    /// Terms in display order (the catalog's printed ordering).
    pub fn display_terms(&self) -> Vec<(&JetMonomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| display_cmp(a.0, b.0));
        v
    }

    fn render(&self, latex: bool) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.display_terms().into_iter().enumerate() {
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
            let mut factors = Vec::new();
            if !mag.is_one() || m.is_unit() {
                factors.push(format_rational(&mag));
            }
            for (v, e) in m.variables() {
                let name = if latex { v.latex() } else { v.text() };
                if e == 1 {
                    factors.push(name);
                } else if latex {
                    factors.push(format!("{name}^{{{e}}}"));
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            let sep = if latex { " " } else { "*" };
            out.push_str(&factors.join(sep));
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

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}
