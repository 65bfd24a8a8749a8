//! Exact symbolic kernel: rationals, jet polynomials, general polynomials
//! over the covering variables, canonical fractions, and expression trees.

pub mod canon;
pub mod expr;
pub mod jet;
pub mod poly;
pub mod rational;

pub use canon::{total_derivative, Canon};
pub use expr::{canon_to_expr, poly_to_expr, Expr};
pub use jet::{Dep, DiffPoly, JetMonomial, JetVar};
pub use poly::{poly_from_diffpoly, rational_sqrt, sqrt_poly, Atom, Monomial, Poly, Radical};
pub use rational::{
    format_rational, parse_rational, rat, ratio, rational_from_f64, rational_to_f64, Rational,
};

/// Errors from exact symbolic computation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    /// The expression leaves the class this kernel decides. Carries a short
    /// description of the offending construction.
    #[error("unsupported expression: {0}")]
    Unsupported(String),
    /// Exact division by a quantity that is identically zero.
    #[error("division by zero")]
    DivisionByZero,
}

impl KernelError {
    pub fn unsupported(msg: impl Into<String>) -> Self {
        KernelError::Unsupported(msg.into())
    }
}
