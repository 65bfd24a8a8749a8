//! Numerical validation: exact pole scans choose safe intervals, the
//! adaptive integrator follows the closed form to within a hundred times
//! the requested tolerance, the reduced equation holds along integrated
//! trajectories, and the fixed-step convergence order comes out as the
//! embedded pair promises.

use chainlab::chains::ChainFamily;
use chainlab::kernel::rat;
use chainlab::numcheck::{
    convergence_order_estimate, cross_check, pole_free_interval, pole_scan,
    reduction_consistency,
};

fn main() {
    let constants = [rat(1), rat(1), rat(1)];

    let poles = pole_scan(ChainFamily::Riccati, 3, &constants, -4.0, 4.0).unwrap();
    println!("movable poles of the riccati order-3 solution in [-4, 4]:");
    for x in &poles {
        println!("  x = {x:.12}");
    }

    let (lo, hi) = pole_free_interval(ChainFamily::Riccati, 3, &constants).unwrap();
    println!("chosen pole-free interval: [{lo}, {hi}]");

    let cc = cross_check(ChainFamily::Riccati, 3, &constants, lo, hi, 1e-9).unwrap();
    println!(
        "cross check: {} over {} samples, deviation {:.3e}",
        cc.entry.status, cc.comparison_points, cc.deviation
    );

    let abel = cross_check(ChainFamily::Abel, 2, &[rat(0), rat(1)], 0.5, 3.0, 1e-9)
        .unwrap();
    println!(
        "abel radical form: {} over {} samples, deviation {:.3e}",
        abel.entry.status, abel.comparison_points, abel.deviation
    );

    let (alo, ahi) = pole_free_interval(ChainFamily::Abel, 3, &constants).unwrap();
    let reduced = reduction_consistency(ChainFamily::Abel, 3, &constants, alo, ahi)
        .unwrap();
    println!(
        "reduced equation along the trajectory: {} (deviation {:.3e})",
        reduced.status,
        reduced.deviation.unwrap()
    );

    let est = convergence_order_estimate();
    println!(
        "fixed-step convergence order: {:.2} (errors {:.3e} -> {:.3e})",
        est.order, est.coarse_error, est.fine_error
    );
}
