//! Order-by-one similarity reduction: each member factors over the
//! invariant zeta = u_x/u + u^m into u times the first-power member one
//! order down, all the way to a first-order equation.

use chainlab::chains::ChainFamily;
use chainlab::kernel::Dep;
use chainlab::reduction::{reduce_chain, reduction_ladder};

fn main() {
    let step = reduce_chain(ChainFamily::Abel, 3).unwrap();
    println!("one step, abel order 3:");
    println!("  source:   {}", step.source.text());
    println!("  factored: u * ({})", step.reduced.text());
    println!(
        "  target:   {} = 0",
        step.target.lhs.rename_dep(Dep::U, Dep::Zeta).text()
    );
    println!("  residual: {}", step.residual().text());
    println!("  exact: {}\n", step.is_exact());

    println!("full ladder, riccati order 5 down to order 1:");
    for (i, step) in reduction_ladder(ChainFamily::Riccati, 5)
        .unwrap()
        .iter()
        .enumerate()
    {
        println!(
            "  step {}: order {} -> {}, exact: {}",
            i + 1,
            step.source.order,
            step.target.order,
            step.is_exact()
        );
    }
}
