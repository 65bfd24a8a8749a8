//! Text form of expressions: a hand-rolled lexer and recursive-descent
//! parser matched to the printer on [`Expr`].
//!
//! Grammar (whitespace between tokens is ignored):
//!
//! ```text
//! expression := term (('+' | '-') term)*
//! term       := unary (('*' | '/') unary)*
//! unary      := '-' unary | power
//! power      := atom ('^' unary)?
//! atom       := integer | 'x' | 'exp' '(' expression ')' | '(' expression ')'
//! ```
//!
//! The binary operators associate left; '^' binds tighter than unary minus
//! and associates right through the `unary` rule. An exponent must fold to
//! a constant integer or half-integer, which is exactly what [`Expr::Pow`]
//! can hold. Two small normalizations keep parsing and printing inverse to
//! each other: a literal minus in front of a number becomes a negative
//! [`Expr::Rational`], and a quotient of two number literals (with nonzero
//! divisor) becomes a single rational.

use crate::kernel::{Expr, Rational};
use num::bigint::BigInt;
use num::{One, Zero};
use std::fmt;

/// A parse failure: where it happened (byte offset), what was found there,
/// and what the grammar would have accepted instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub offset: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at byte {}: found {}; expected {}",
            self.offset,
            self.found,
            self.expected.join(", ")
        )
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(Rational),
    X,
    ExpFn,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Lexed {
    tok: Tok,
    offset: usize,
    len: usize,
}

const ATOM_EXPECTED: [&str; 5] = ["a number", "'x'", "'exp'", "'('", "'-'"];

fn lex(input: &str) -> Result<Vec<Lexed>, SyntaxError> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match b {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let digits = &input[start..=i];
                let n: BigInt = digits.parse().expect("ascii digits parse");
                Tok::Int(Rational::from_integer(n))
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_alphabetic() {
                    i += 1;
                }
                match &input[start..=i] {
                    "x" => Tok::X,
                    "exp" => Tok::ExpFn,
                    _ => {
                        return Err(SyntaxError {
                            offset: start,
                            found: format!("'{}'", &input[start..=i]),
                            expected: ATOM_EXPECTED.to_vec(),
                        })
                    }
                }
            }
            _ => {
                return Err(SyntaxError {
                    offset: start,
                    found: format!("'{}'", &input[start..=i]),
                    expected: ATOM_EXPECTED.to_vec(),
                })
            }
        };
        toks.push(Lexed {
            tok,
            offset: start,
            len: i - start + 1,
        });
        i += 1;
    }
    Ok(toks)
}

struct Parser<'a> {
    input: &'a str,
    toks: Vec<Lexed>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map_or(self.input.len(), |l| l.offset)
    }

    fn found_here(&self) -> String {
        match self.toks.get(self.pos) {
            Some(l) => format!("'{}'", &self.input[l.offset..l.offset + l.len]),
            None => "end of input".to_string(),
        }
    }

    fn advance(&mut self) {
        self.pos += 1;
    }

    fn fail<T>(&self, expected: &[&'static str]) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            offset: self.here(),
            found: self.found_here(),
            expected: expected.to_vec(),
        })
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&tok) {
            self.advance();
            Ok(())
        } else {
            self.fail(&[expected])
        }
    }

    fn expression(&mut self) -> Result<Expr, SyntaxError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.advance();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.advance();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.advance();
                    acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.advance();
                    let rhs = self.unary()?;
                    acc = match (&acc, &rhs) {
                        (Expr::Rational(a), Expr::Rational(b)) if !b.is_zero() => {
                            Expr::Rational(a / b)
                        }
                        _ => Expr::Div(Box::new(acc), Box::new(rhs)),
                    };
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.peek() == Some(&Tok::Minus) {
            self.advance();
            return Ok(match self.unary()? {
                Expr::Rational(q) => Expr::Rational(-q),
                other => Expr::Neg(Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.advance();
        let exp_offset = self.here();
        let exp_tree = self.unary()?;
        let Some(q) = fold_constant(&exp_tree) else {
            return Err(SyntaxError {
                offset: exp_offset,
                found: format!("'{}'", exp_tree.text()),
                expected: vec!["a constant exponent"],
            });
        };
        base.pow_rational(q).map_err(|_| SyntaxError {
            offset: exp_offset,
            found: format!("'{}'", exp_tree.text()),
            expected: vec!["an integer or half-integer exponent"],
        })
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek() {
            Some(Tok::Int(q)) => {
                let q = q.clone();
                self.advance();
                Ok(Expr::Rational(q))
            }
            Some(Tok::X) => {
                self.advance();
                Ok(Expr::x())
            }
            Some(Tok::ExpFn) => {
                self.advance();
                self.expect(Tok::LParen, "'('")?;
                let arg = self.expression()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(arg.exp())
            }
            Some(Tok::LParen) => {
                self.advance();
                let inner = self.expression()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => self.fail(&ATOM_EXPECTED),
        }
    }
}

/// Evaluates a subtree that contains no symbols to a single rational.
/// Integer powers are folded too (bounded to keep the fold cheap); anything
/// touching `x` or `exp` is not constant.
fn fold_constant(e: &Expr) -> Option<Rational> {
    match e {
        Expr::Rational(q) => Some(q.clone()),
        Expr::Neg(inner) => fold_constant(inner).map(|q| -q),
        Expr::Add(a, b) => Some(fold_constant(a)? + fold_constant(b)?),
        Expr::Sub(a, b) => Some(fold_constant(a)? - fold_constant(b)?),
        Expr::Mul(a, b) => Some(fold_constant(a)? * fold_constant(b)?),
        Expr::Div(a, b) => {
            let d = fold_constant(b)?;
            if d.is_zero() {
                None
            } else {
                Some(fold_constant(a)? / d)
            }
        }
        Expr::Pow(base, exp) => {
            if !exp.is_integer() {
                return None;
            }
            let n: i64 = exp.to_integer().try_into().ok()?;
            if n.unsigned_abs() > 32 {
                return None;
            }
            let b = fold_constant(base)?;
            if n >= 0 {
                Some(num::pow::pow(b, n as usize))
            } else if b.is_zero() {
                None
            } else {
                Some(Rational::one() / num::pow::pow(b, n.unsigned_abs() as usize))
            }
        }
        Expr::Symbol(_) | Expr::Exp(_) => None,
    }
}

/// Parses the expression grammar above into an [`Expr`].
pub fn parse_expression(input: &str) -> Result<Expr, SyntaxError> {
    let toks = lex(input)?;
    let mut parser = Parser {
        input,
        toks,
        pos: 0,
    };
    let expr = parser.expression()?;
    if parser.pos != parser.toks.len() {
        return parser.fail(&["an operator", "end of input"]);
    }
    Ok(expr)
}

/// A deterministic pseudo-random expression for round-trip suites: every
/// tree this returns renders to text that parses back to the same tree.
pub fn sample_expression(seed: u64) -> Expr {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let budget = rng.random_range(1..=6);
    grow(&mut rng, budget)
}

fn grow(rng: &mut rand_chacha::ChaCha8Rng, budget: u32) -> Expr {
    use rand::Rng;
    if budget == 0 {
        return if rng.random_bool(0.4) {
            Expr::x()
        } else {
            Expr::int(rng.random_range(-9..=9))
        };
    }
    let next = budget - 1;
    match rng.random_range(0..17u32) {
        0..3 => Expr::Add(Box::new(grow(rng, next)), Box::new(grow(rng, next))),
        3..5 => Expr::Sub(Box::new(grow(rng, next)), Box::new(grow(rng, next))),
        5..8 => Expr::Mul(Box::new(grow(rng, next)), Box::new(grow(rng, next))),
        8..10 => {
            let a = grow(rng, next);
            let b = grow(rng, next);
            match (&a, &b) {
                (Expr::Rational(p), Expr::Rational(q)) if !q.is_zero() => Expr::Rational(p / q),
                _ => Expr::Div(Box::new(a), Box::new(b)),
            }
        }
        10..12 => match grow(rng, next) {
            Expr::Rational(q) => Expr::Rational(-q),
            other => Expr::Neg(Box::new(other)),
        },
        12..14 => {
            let base = grow(rng, next.min(2));
            let den = if rng.random_bool(0.3) { 2 } else { 1 };
            let num = rng.random_range(-4i64..=4);
            base.pow_rational(crate::kernel::ratio(num, den))
                .expect("half-integer exponents are representable")
        }
        14..15 => grow(rng, next.min(2)).exp(),
        _ => grow(rng, 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{rat, ratio};

    fn parse(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn precedence_shapes() {
        assert_eq!(
            parse("1+2*3"),
            Expr::Add(
                Box::new(Expr::int(1)),
                Box::new(Expr::Mul(Box::new(Expr::int(2)), Box::new(Expr::int(3))))
            )
        );
        assert_eq!(
            parse("1*2+3"),
            Expr::Add(
                Box::new(Expr::Mul(Box::new(Expr::int(1)), Box::new(Expr::int(2)))),
                Box::new(Expr::int(3))
            )
        );
        // left association
        assert_eq!(parse("1-2-3").text(), "1 - 2 - 3");
        assert_eq!(
            parse("1-2-3"),
            Expr::Sub(
                Box::new(Expr::Sub(Box::new(Expr::int(1)), Box::new(Expr::int(2)))),
                Box::new(Expr::int(3))
            )
        );
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        assert_eq!(parse("-x^2"), Expr::Neg(Box::new(Expr::x().pow_int(2))));
        assert_eq!(parse("(-x)^2").text(), "(-x)^2");
    }

    #[test]
    fn power_exponent_folds_and_associates_right() {
        // 2^3^2 = 2^(3^2) = 2^9 after the exponent subtree folds
        assert_eq!(parse("2^3^2"), Expr::int(2).pow_int(9));
        assert_eq!(parse("x^-1"), Expr::x().pow_int(-1));
        assert_eq!(parse("x^(-1)"), Expr::x().pow_int(-1));
        assert_eq!(parse("x^(1/2)"), Expr::x().sqrt());
        assert_eq!(parse("x^(3/2)").text(), "x^(3/2)");
    }

    #[test]
    fn constant_quotients_collapse_to_rationals() {
        assert_eq!(parse("1/2"), Expr::Rational(ratio(1, 2)));
        assert_eq!(parse("2/3/4"), Expr::Rational(ratio(1, 6)));
        assert_eq!(parse("-5/2"), Expr::Rational(ratio(-5, 2)));
        // non-constant operands keep the tree
        assert_eq!(
            parse("x/2"),
            Expr::Div(Box::new(Expr::x()), Box::new(Expr::int(2)))
        );
        // a zero divisor is left for canonicalization to reject
        assert_eq!(
            parse("1/0"),
            Expr::Div(Box::new(Expr::int(1)), Box::new(Expr::int(0)))
        );
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(parse(" 1 +\t2 * x "), parse("1+2*x"));
    }

    #[test]
    fn exp_requires_parentheses() {
        assert_eq!(parse("exp(2*x)"), (Expr::int(2) * Expr::x()).exp());
        let err = parse_expression("exp x").unwrap_err();
        assert_eq!(err.offset, 4);
        assert_eq!(err.expected, vec!["'('"]);
    }

    #[test]
    fn error_offset_points_at_the_bad_byte() {
        let err = parse_expression("2*^x").unwrap_err();
        assert_eq!(err.offset, 2);
        assert_eq!(err.found, "'^'");
        assert!(err.expected.contains(&"a number"));
        assert!(err.expected.contains(&"'('"));
    }

    #[test]
    fn error_catalogue() {
        let cases: &[(&str, usize)] = &[
            ("", 0),
            ("1 +", 3),
            ("(1+2", 4),
            ("2 3", 2),
            ("x^y", 2),
            ("x^(1/3)", 2),
            ("1 + $", 4),
            ("foo", 0),
        ];
        for (input, offset) in cases {
            let err = parse_expression(input).unwrap_err();
            assert_eq!(err.offset, *offset, "offset for {input:?}: {err}");
        }
    }

    #[test]
    fn error_messages_name_the_expectation() {
        let err = parse_expression("x^x").unwrap_err();
        assert_eq!(err.expected, vec!["a constant exponent"]);
        let err = parse_expression("x^(1/3)").unwrap_err();
        assert_eq!(err.expected, vec!["an integer or half-integer exponent"]);
        let err = parse_expression("2 3").unwrap_err();
        assert_eq!(err.expected, vec!["an operator", "end of input"]);
        assert_eq!(
            parse_expression("").unwrap_err().to_string(),
            "syntax error at byte 0: found end of input; expected a number, 'x', 'exp', '(', '-'"
        );
    }

    #[test]
    fn big_integer_literals_do_not_overflow() {
        let parsed = parse("123456789012345678901234567890");
        assert_eq!(parsed.text(), "123456789012345678901234567890");
    }

    #[test]
    fn renders_parse_back_to_the_same_tree() {
        for seed in 0..1000u64 {
            let expr = sample_expression(seed);
            let text = expr.text();
            let reparsed = parse_expression(&text)
                .unwrap_or_else(|e| panic!("seed {seed}: {text:?} failed to reparse: {e}"));
            assert_eq!(reparsed, expr, "seed {seed}: {text:?}");
        }
    }

    #[test]
    fn parsed_arithmetic_canonicalizes_to_the_expected_value() {
        let expr = parse("(1/2 + 1/3)*6/5");
        let canon = expr.canonicalize().unwrap();
        assert!(canon.sub(&crate::kernel::Canon::constant(rat(1))).is_zero_certain());
    }
}
