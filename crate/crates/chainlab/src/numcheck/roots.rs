//! Exact real-root location for univariate polynomials over the rationals.
//!
//! Pole scanning needs every real root of a denominator (or radicand)
//! inside an interval, including multiple roots, so the polynomial is first
//! reduced to its square-free part, isolating intervals are found with
//! Sturm sequences, and each one is narrowed by bisection in exact rational
//! arithmetic until it is thinner than the requested width.

use crate::kernel::{rat, Atom, Poly, Rational};
use num::{Signed, Zero};

/// Dense ascending coefficients of a polynomial in x alone.
///
/// Returns `None` when the input mentions any other atom (symbolic
/// constants, radicals, jets) or carries an exponential grade.
pub fn dense_coefficients(p: &Poly) -> Option<Vec<Rational>> {
    if p.has_exp_grade() {
        return None;
    }
    let x = Atom::X;
    let deg = p.degree_in(&x);
    let mut out = vec![Rational::zero(); deg as usize + 1];
    for (mono, coeff) in p.terms() {
        let mut e = None;
        for (atom, exp) in mono.atoms() {
            if *atom == x {
                e = Some(exp);
            } else {
                return None;
            }
        }
        out[e.unwrap_or(0) as usize] = coeff.clone();
    }
    trim(&mut out);
    Some(out)
}

fn trim(c: &mut Vec<Rational>) {
    while c.last().is_some_and(Rational::is_zero) {
        c.pop();
    }
}

fn degree(c: &[Rational]) -> Option<usize> {
    if c.is_empty() {
        None
    } else {
        Some(c.len() - 1)
    }
}

fn eval(c: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for coeff in c.iter().rev() {
        acc = acc * x + coeff;
    }
    acc
}

fn derivative(c: &[Rational]) -> Vec<Rational> {
    let mut out: Vec<Rational> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, coeff)| rat(i as i64) * coeff)
        .collect();
    trim(&mut out);
    out
}

/// Remainder of a by b, scaled so the leading coefficient has magnitude
/// one. Scaling keeps coefficient growth bounded during Euclid's
/// algorithm; the factor is positive, so sign variation counts survive.
fn scaled_remainder(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let db = degree(b).expect("division by the zero polynomial");
    let lead = b[db].clone();
    let mut rem = a.to_vec();
    while degree(&rem).is_some_and(|dr| dr >= db) {
        let dr = rem.len() - 1;
        let q = &rem[dr] / &lead;
        for i in 0..db {
            let delta = &q * &b[i];
            rem[dr - db + i] -= delta;
        }
        rem.pop();
        trim(&mut rem);
    }
    if let Some(d) = degree(&rem) {
        let l = rem[d].abs();
        for coeff in &mut rem {
            *coeff /= &l;
        }
    }
    rem
}

fn gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut p = a.to_vec();
    let mut q = b.to_vec();
    while !q.is_empty() {
        let r = scaled_remainder(&p, &q);
        p = q;
        q = r;
    }
    if let Some(d) = degree(&p) {
        let l = p[d].clone();
        for coeff in &mut p {
            *coeff /= &l;
        }
    }
    p
}

fn divide_exact(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let db = degree(b).expect("division by the zero polynomial");
    let mut rem = a.to_vec();
    let mut quot = vec![Rational::zero(); a.len().saturating_sub(db)];
    while degree(&rem).is_some_and(|dr| dr >= db) {
        let dr = rem.len() - 1;
        let q = &rem[dr] / &b[db];
        quot[dr - db] = q.clone();
        for i in 0..=db {
            let delta = &q * &b[i];
            rem[dr - db + i] -= delta;
        }
        trim(&mut rem);
    }
    debug_assert!(rem.is_empty(), "inexact polynomial division");
    trim(&mut quot);
    quot
}

/// The square-free part: same real roots, all simple.
fn square_free(c: &[Rational]) -> Vec<Rational> {
    if degree(c).is_none_or(|d| d == 0) {
        return c.to_vec();
    }
    let g = gcd(c, &derivative(c));
    if degree(&g) == Some(0) {
        c.to_vec()
    } else {
        divide_exact(c, &g)
    }
}

/// Synthetic division by (x - root); the root must be exact.
fn deflate(c: &[Rational], root: &Rational) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); c.len() - 1];
    let mut carry = Rational::zero();
    for i in (0..c.len()).rev() {
        let v = &c[i] + &carry;
        if i == 0 {
            debug_assert!(v.is_zero(), "deflation at a non-root");
        } else {
            out[i - 1] = v.clone();
            carry = v * root;
        }
    }
    trim(&mut out);
    out
}

fn sturm_chain(c: &[Rational]) -> Vec<Vec<Rational>> {
    let mut chain = vec![c.to_vec(), derivative(c)];
    loop {
        let last = &chain[chain.len() - 1];
        if degree(last).is_none_or(|d| d == 0) {
            break;
        }
        let prev = &chain[chain.len() - 2];
        let mut r = scaled_remainder(prev, last);
        for coeff in &mut r {
            *coeff = -coeff.clone();
        }
        if r.is_empty() {
            break;
        }
        chain.push(r);
    }
    chain
}

fn sign_variations(chain: &[Vec<Rational>], x: &Rational) -> usize {
    let mut variations = 0;
    let mut prev = 0i8;
    for member in chain {
        let v = eval(member, x);
        let s = if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        };
        if s != 0 {
            if prev != 0 && s != prev {
                variations += 1;
            }
            prev = s;
        }
    }
    variations
}

/// Roots in the open interval, assuming neither endpoint is a root.
fn count_between(chain: &[Vec<Rational>], lo: &Rational, hi: &Rational) -> usize {
    sign_variations(chain, lo) - sign_variations(chain, hi)
}

fn sign(v: &Rational) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// Narrows an isolating interval with a sign change down to `width` and
/// returns its midpoint, or the root itself if bisection lands on it.
fn bisect(c: &[Rational], mut lo: Rational, mut hi: Rational, width: &Rational) -> Rational {
    let slo = sign(&eval(c, &lo));
    debug_assert_ne!(slo, 0);
    debug_assert_ne!(sign(&eval(c, &hi)), slo);
    let half = ratio_half();
    while &hi - &lo >= *width {
        let mid = (&lo + &hi) * &half;
        let smid = sign(&eval(c, &mid));
        if smid == 0 {
            return mid;
        }
        if smid == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (&lo + &hi) * half
}

fn ratio_half() -> Rational {
    crate::kernel::ratio(1, 2)
}

/// All distinct real roots of `p` in the closed interval `[lo, hi]`, each
/// located to within `width` (exact roots are returned exactly). The
/// polynomial must be univariate in x with numeric coefficients; multiple
/// roots are reported once.
///
/// Returns `None` when `p` has symbolic content, `Some(vec![])` when there
/// are no roots. A zero polynomial is rejected the same way as a symbolic
/// one since "every point is a root" has no useful finite answer.
pub fn real_roots_in(
    p: &Poly,
    lo: &Rational,
    hi: &Rational,
    width: &Rational,
) -> Option<Vec<Rational>> {
    let dense = dense_coefficients(p)?;
    if dense.is_empty() {
        return None;
    }
    let mut q = square_free(&dense);
    if degree(&q) == Some(0) {
        return Some(Vec::new());
    }

    let mut roots = Vec::new();
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    // Peel off endpoint roots so the Sturm count applies cleanly inside.
    while eval(&q, &lo).is_zero() {
        roots.push(lo.clone());
        q = deflate(&q, &lo);
        if degree(&q).is_none_or(|d| d == 0) {
            roots.sort();
            roots.dedup();
            return Some(roots);
        }
    }
    while eval(&q, &hi).is_zero() {
        roots.push(hi.clone());
        q = deflate(&q, &hi);
        if degree(&q).is_none_or(|d| d == 0) {
            roots.sort();
            roots.dedup();
            return Some(roots);
        }
    }

    let chain = sturm_chain(&q);
    let mut stack = vec![(lo, hi, None::<usize>)];
    while let Some((a, b, known)) = stack.pop() {
        let count = known.unwrap_or_else(|| count_between(&chain, &a, &b));
        if count == 0 {
            continue;
        }
        if count == 1 {
            roots.push(bisect(&q, a, b, width));
            continue;
        }
        let mid = (&a + &b) * ratio_half();
        if eval(&q, &mid).is_zero() {
            roots.push(mid.clone());
            // Count strictly to each side of the located root.
            let left = count_between(&chain, &a, &mid).saturating_sub(1);
            stack.push((a, mid.clone(), Some(left)));
            stack.push((mid, b, Some(count - 1 - left)));
        } else {
            let left = count_between(&chain, &a, &mid);
            stack.push((a, mid.clone(), Some(left)));
            stack.push((mid, b, Some(count - left)));
        }
    }
    roots.sort();
    roots.dedup();
    Some(roots)
}

/// Sign of `p` at an exact rational point. `None` if `p` is not a numeric
/// univariate polynomial in x.
pub fn sign_at(p: &Poly, x: &Rational) -> Option<i8> {
    let dense = dense_coefficients(p)?;
    Some(sign(&eval(&dense, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{ratio, rational_to_f64};

    /// Builds sum(coeffs[i] * x^i) from ascending integer coefficients.
    fn poly(coeffs: &[i64]) -> Poly {
        let mut p = Poly::zero();
        for (i, c) in coeffs.iter().enumerate() {
            p = p.add(&Poly::atom_pow(Atom::X, i as u32).scale(&rat(*c)));
        }
        p
    }

    fn roots(p: &Poly, lo: i64, hi: i64) -> Vec<f64> {
        let width = ratio(1, 1_000_000_000_000);
        real_roots_in(p, &rat(lo), &rat(hi), &width)
            .unwrap()
            .iter()
            .map(crate::kernel::rational_to_f64)
            .collect()
    }

    #[test]
    fn double_root_is_found_once() {
        assert_eq!(roots(&poly(&[0, 0, 1]), -1, 1), vec![0.0]);
    }

    #[test]
    fn no_real_roots() {
        assert!(roots(&poly(&[1, 0, 1]), -10, 10).is_empty());
    }

    #[test]
    fn rational_roots_to_requested_width() {
        // (2x - 1)(x + 3)
        let found = roots(&poly(&[-3, 5, 2]), -5, 5);
        assert_eq!(found.len(), 2);
        assert!((found[0] + 3.0).abs() < 1e-12);
        assert!((found[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn midpoint_and_endpoint_hits_come_back_exact() {
        // x(x + 1): -1 sits on the endpoint, 0 on the first bisection probe.
        let width = ratio(1, 1_000_000_000_000);
        let found = real_roots_in(&poly(&[0, 1, 1]), &rat(-1), &rat(1), &width).unwrap();
        assert_eq!(found, vec![rat(-1), rat(0)]);
    }

    #[test]
    fn irrational_roots_to_requested_width() {
        let found = roots(&poly(&[-2, 0, 1]), 0, 2);
        assert_eq!(found.len(), 1);
        assert!((found[0] - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn clustered_roots_are_separated() {
        // roots at 0, 1/1000, 1/999
        let a = ratio(1, 1000);
        let b = ratio(1, 999);
        let shifted = poly(&[0, 0, 0, 1])
            .sub(&poly(&[0, 0, 1]).scale(&(&a + &b)))
            .add(&poly(&[0, 1]).scale(&(&a * &b)));
        let width = ratio(1, 1_000_000_000_000);
        let found = real_roots_in(&shifted, &rat(-1), &rat(1), &width).unwrap();
        assert_eq!(found.len(), 3);
        let expected = [0.0, 1.0 / 1000.0, 1.0 / 999.0];
        for (r, e) in found.iter().zip(expected) {
            assert!((rational_to_f64(r) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoint_roots_are_included() {
        assert_eq!(roots(&poly(&[-1, 0, 1]), -1, 1), vec![-1.0, 1.0]);
        assert_eq!(roots(&poly(&[-1, 0, 1]), 0, 1), vec![1.0]);
    }

    #[test]
    fn cubic_with_three_roots() {
        // x^3 + 3x^2 - 6x - 3 arises as a second-order denominator; its
        // roots straddle the scanning interval used in the pole tests.
        let found = roots(&poly(&[-3, -6, 3, 1]), -10, 10);
        assert_eq!(found.len(), 3);
        for r in &found {
            let v = r * r * r + 3.0 * r * r - 6.0 * r - 3.0;
            assert!(v.abs() < 1e-8, "residual {v} at {r}");
        }
        assert!(found[2] > 1.0 && found[2] < 2.0);
    }

    #[test]
    fn symbolic_input_is_rejected() {
        let symbolic = poly(&[0, 1]).add(&Poly::atom(Atom::K(1)));
        assert!(real_roots_in(&symbolic, &rat(0), &rat(1), &ratio(1, 10)).is_none());
    }

    #[test]
    fn signs_at_points() {
        let p = poly(&[-2, 0, 1]);
        assert_eq!(sign_at(&p, &rat(0)), Some(-1));
        assert_eq!(sign_at(&p, &rat(2)), Some(1));
        assert_eq!(sign_at(&poly(&[0, 1]), &rat(0)), Some(0));
    }
}
