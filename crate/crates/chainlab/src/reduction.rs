//! Similarity reduction of the chains.
//!
//! The invariant combination `zeta = u_x/u + u^m` lowers every chain member
//! by one order: substituting `u_x = u*(zeta - u^m)` and its derivative
//! consequences into `E_N` factors the result exactly as
//!
//! ```text
//! E_N(u) = u * R_{N-1}(zeta),
//! ```
//!
//! where `R_{N-1}` is a chain member again, and always from the first-power
//! family regardless of which family `E_N` came from. The reduction is
//! proved here by exact polynomial division, never by numeric sampling.

use crate::chains::{generate_chain, ChainEquation, ChainError, ChainFamily};
use crate::kernel::{rat, Dep, DiffPoly, JetMonomial, JetVar};
use crate::report::{CheckEntry, CheckStatus, VerificationReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("order {order} member of the {family} chain has no similarity reduction (need order 2 or higher)")]
    OrderTooLow { family: ChainFamily, order: u32 },
    #[error("substituted polynomial did not factor: {detail}")]
    FactorizationFailure { detail: String },
}

/// Expressions of `u^(k)` in terms of `u` and the jets of `zeta`.
#[derive(Clone, Debug)]
pub struct SubstitutionTable {
    family: ChainFamily,
    entries: Vec<DiffPoly>,
}

impl SubstitutionTable {
    /// Builds the table up to `max_order`. Entry `k` (for `1 <= k <=
    /// max_order`) is the polynomial giving `u^(k)`; each is obtained from
    /// the previous by total differentiation followed by re-substituting
    /// the first entry for `u_x`.
    pub fn new(family: ChainFamily, max_order: u32) -> Self {
        let m = family.exponent();
        // u_x = u*zeta - u^(m+1)
        let first = DiffPoly::from_terms(&[
            (
                rat(1),
                JetMonomial::from_pairs(&[(JetVar::u(0), 1), (JetVar::zeta(0), 1)]),
            ),
            (rat(-1), JetMonomial::from_pairs(&[(JetVar::u(0), m + 1)])),
        ]);
        let mut entries = vec![first.clone()];
        for _ in 1..max_order {
            let raised = entries.last().unwrap().total_derivative();
            entries.push(raised.substitute(JetVar::u(1), &first));
        }
        SubstitutionTable { family, entries }
    }

    pub fn family(&self) -> ChainFamily {
        self.family
    }

    /// The expression substituted for `u^(k)`.
    pub fn entry(&self, k: u32) -> Option<&DiffPoly> {
        (k >= 1)
            .then(|| self.entries.get((k - 1) as usize))
            .flatten()
    }

    pub fn max_order(&self) -> u32 {
        self.entries.len() as u32
    }

    /// Replaces every `u`-jet of positive order in `p`.
    pub fn apply(&self, p: &DiffPoly) -> DiffPoly {
        let mut out = p.clone();
        if let Some(top) = p.max_order(Dep::U) {
            for k in (1..=top).rev() {
                if let Some(e) = self.entry(k) {
                    out = out.substitute(JetVar::u(k), e);
                }
            }
        }
        out
    }
}

/// One proved reduction step: `source` in `u`, `reduced` in `zeta`, with
/// `substituted == u * reduced` exactly and `reduced` equal to the
/// first-power chain member one order down.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub source: ChainEquation,
    /// `E_N` after eliminating the `u`-jets.
    pub substituted: DiffPoly,
    /// The factored form is `u^cofactor_power * reduced`.
    pub cofactor_power: u32,
    /// The quotient, a polynomial in `zeta` and its jets.
    pub reduced: DiffPoly,
    /// The chain member the quotient must equal (stated in `u`-naming).
    pub target: ChainEquation,
}

impl Reduction {
    /// The quotient minus the expected chain member, in `zeta`-naming.
    pub fn residual(&self) -> DiffPoly {
        self.reduced
            .sub(&self.target.lhs.rename_dep(Dep::U, Dep::Zeta))
    }

    pub fn is_exact(&self) -> bool {
        self.residual().is_zero()
    }
}

/// Reduces one chain member and proves the factorization.
pub fn reduce_chain(family: ChainFamily, order: u32) -> Result<Reduction, ReductionError> {
    if order < 2 {
        return Err(ReductionError::OrderTooLow { family, order });
    }
    let source = generate_chain(family, order)?;
    let table = SubstitutionTable::new(family, order);
    let substituted = table.apply(&source.lhs);
    let reduced = substituted.divide_by_var(JetVar::u(0)).ok_or_else(|| {
        ReductionError::FactorizationFailure {
            detail: format!(
                "u does not divide the substituted {family} member of order {order}"
            ),
        }
    })?;
    if reduced.max_order(Dep::U).is_some() {
        return Err(ReductionError::FactorizationFailure {
            detail: format!(
                "quotient still involves u for the {family} member of order {order}"
            ),
        });
    }
    let target = generate_chain(ChainFamily::Riccati, order - 1)?;
    Ok(Reduction {
        source,
        substituted,
        cofactor_power: 1,
        reduced,
        target,
    })
}

/// Repeated reduction down to the first-order member: first the requested
/// family member, then the resulting first-power members, each step
/// renaming the new invariant back to `u`.
pub fn reduction_ladder(
    family: ChainFamily,
    order: u32,
) -> Result<Vec<Reduction>, ReductionError> {
    if order < 2 {
        return Err(ReductionError::OrderTooLow { family, order });
    }
    let mut steps = Vec::new();
    let mut current_family = family;
    let mut current_order = order;
    while current_order >= 2 {
        let step = reduce_chain(current_family, current_order)?;
        steps.push(step);
        current_family = ChainFamily::Riccati;
        current_order -= 1;
    }
    Ok(steps)
}

/// Checks one reduction and renders the outcome.
pub fn verify_reduction(
    family: ChainFamily,
    order: u32,
) -> Result<CheckEntry, ReductionError> {
    let reduction = reduce_chain(family, order)?;
    let residual = reduction.residual();
    let status = if reduction.is_exact() {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(CheckEntry::symbolic(
        "order drops by one onto the first-power chain",
        Some(family),
        Some(order),
        status,
        residual.text(),
        format!("reduction:{}[{}]", family.name(), order),
    ))
}

/// Reduction checks over a range of orders.
pub fn reduction_report(
    family: ChainFamily,
    orders: std::ops::RangeInclusive<u32>,
) -> Result<VerificationReport, ReductionError> {
    let mut report = VerificationReport::new(format!("{family} similarity reduction"));
    for n in orders {
        report.push(verify_reduction(family, n)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rat;

    #[test]
    fn table_entries_stay_polynomial_in_zeta() {
        for family in ChainFamily::ALL {
            let table = SubstitutionTable::new(family, 6);
            for k in 1..=6 {
                let e = table.entry(k).unwrap();
                assert!(e.max_order(Dep::U) == Some(0) || e.max_order(Dep::U).is_none());
                assert_eq!(e.max_order(Dep::Zeta), Some(k - 1));
            }
        }
    }

    #[test]
    fn second_member_factors_by_hand() {
        // Riccati: u_xx + 3uu_x + u^3 becomes u*(zeta_x + zeta^2)
        let r = reduce_chain(ChainFamily::Riccati, 2).unwrap();
        let expected = DiffPoly::from_terms(&[
            (rat(1), JetMonomial::from_pairs(&[(JetVar::zeta(1), 1)])),
            (rat(1), JetMonomial::from_pairs(&[(JetVar::zeta(0), 2)])),
        ]);
        assert_eq!(r.reduced, expected);
        assert!(r.is_exact());
        // Abel: u_xx + 4u^2 u_x + u^5 becomes the same quotient
        let a = reduce_chain(ChainFamily::Abel, 2).unwrap();
        assert_eq!(a.reduced, expected);
        assert!(a.is_exact());
    }

    #[test]
    fn every_reduction_lands_on_the_first_power_chain() {
        for family in ChainFamily::ALL {
            for n in 2..=10 {
                let r = reduce_chain(family, n).unwrap();
                assert!(
                    r.is_exact(),
                    "{family} order {n}: residual {}",
                    r.residual().text()
                );
                assert_eq!(r.target.family, ChainFamily::Riccati);
                assert_eq!(r.target.order, n - 1);
            }
        }
    }

    #[test]
    fn substituted_member_is_isobaric_in_the_mixed_grading() {
        for family in ChainFamily::ALL {
            let m = family.exponent();
            for n in 2..=8 {
                let r = reduce_chain(family, n).unwrap();
                let w = r.substituted.uniform_scaled_weight(m);
                assert_eq!(w, Some(u64::from(n * m + 1)), "{family} order {n}");
            }
        }
    }

    #[test]
    fn ladder_walks_down_to_order_one() {
        let steps = reduction_ladder(ChainFamily::Abel, 5).unwrap();
        assert_eq!(steps.len(), 4);
        assert_eq!(steps[0].source.family, ChainFamily::Abel);
        assert_eq!(steps[0].source.order, 5);
        for (i, s) in steps.iter().enumerate() {
            assert!(s.is_exact());
            if i > 0 {
                assert_eq!(s.source.family, ChainFamily::Riccati);
            }
        }
        assert_eq!(steps.last().unwrap().target.order, 1);
    }

    #[test]
    fn first_member_is_rejected() {
        let err = reduce_chain(ChainFamily::Riccati, 1).unwrap_err();
        assert!(matches!(err, ReductionError::OrderTooLow { order: 1, .. }));
    }

    #[test]
    fn report_over_a_range() {
        let report = reduction_report(ChainFamily::Abel, 2..=6).unwrap();
        assert_eq!(report.entries().len(), 5);
        assert_eq!(report.status(), CheckStatus::Pass);
    }
}
