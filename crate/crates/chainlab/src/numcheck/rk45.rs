//! Embedded Runge-Kutta stepping: the Dormand-Prince pair (fifth order
//! solution, fourth-order error estimate) with proportional-integral step
//! control, plus a fixed-step mode for convergence measurements.

/// Right-hand side of a first-order system: writes y' into `dy`.
pub type Rhs<'a> = &'a dyn Fn(f64, &[f64], &mut [f64]);

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepperStats {
    pub accepted: u64,
    pub rejected: u64,
    pub min_step: f64,
}

/// Step size collapsed below the underflow floor, which for polynomial
/// right-hand sides signals a blow-up or pole.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepUnderflow {
    /// Last x the integrator reached with an accepted step.
    pub last_x: f64,
}

const STAGES: usize = 7;

const C: [f64; STAGES] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Fifth-order weights (the last stage row: first-same-as-last pair).
const B5: [f64; STAGES] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

/// Fourth-order companion weights for the error estimate.
const B4: [f64; STAGES] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One trial step from (x, y) with size h. Returns the fifth-order value
/// and the scaled error norm (error per tolerance, so 1.0 is the
/// acceptance boundary).
fn trial_step(
    f: Rhs,
    x: f64,
    y: &[f64],
    h: f64,
    rel_tol: f64,
    abs_tol: f64,
    k: &mut [Vec<f64>],
    scratch: &mut [f64],
) -> (Vec<f64>, f64) {
    let n = y.len();
    f(x, y, &mut k[0]);
    for s in 1..STAGES {
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += A[s][j] * kj[i];
            }
            scratch[i] = y[i] + h * acc;
        }
        let (_, tail) = k.split_at_mut(s);
        f(x + C[s] * h, scratch, &mut tail[0]);
    }
    let mut y5 = vec![0.0; n];
    let mut err_sq = 0.0;
    for i in 0..n {
        let mut acc5 = 0.0;
        let mut acc4 = 0.0;
        for (j, kj) in k.iter().enumerate() {
            acc5 += B5[j] * kj[i];
            acc4 += B4[j] * kj[i];
        }
        y5[i] = y[i] + h * acc5;
        let e = h * (acc5 - acc4);
        let scale = abs_tol + rel_tol * y[i].abs().max(y5[i].abs());
        err_sq += (e / scale) * (e / scale);
    }
    let err = (err_sq / n as f64).sqrt();
    (y5, err)
}

/// Adaptive integration from (x0, y0) to x_end. Every accepted step is
/// recorded, so the sample density is at least |interval| / max_step.
#[allow(clippy::too_many_arguments)]
pub fn integrate_adaptive(
    f: Rhs,
    x0: f64,
    y0: &[f64],
    x_end: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_step: f64,
    samples: &mut Vec<(f64, Vec<f64>)>,
) -> Result<StepperStats, StepUnderflow> {
    let n = y0.len();
    let interval = (x_end - x0).abs();
    let dir = if x_end > x0 { 1.0 } else { -1.0 };
    let floor = 1e-13 * interval;

    let mut k: Vec<Vec<f64>> = (0..STAGES).map(|_| vec![0.0; n]).collect();
    let mut scratch = vec![0.0; n];
    let mut stats = StepperStats {
        accepted: 0,
        rejected: 0,
        min_step: f64::INFINITY,
    };

    let mut x = x0;
    let mut y = y0.to_vec();
    samples.push((x, y.clone()));

    let mut h = dir * max_step.min(interval).max(floor * 2.0);
    let mut err_prev: f64 = 1e-4;
    let mut just_rejected = false;

    while (x_end - x) * dir > 0.0 {
        if h.abs() < floor {
            return Err(StepUnderflow { last_x: x });
        }
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }
        let (y5, err) = trial_step(f, x, &y, h, rel_tol, abs_tol, &mut k, &mut scratch);
        let bad = !err.is_finite() || y5.iter().any(|v| !v.is_finite());
        if !bad && err <= 1.0 {
            x += h;
            y = y5;
            samples.push((x, y.clone()));
            stats.accepted += 1;
            stats.min_step = stats.min_step.min(h.abs());
            let fac = 0.9 * err.max(1e-10).powf(-0.17) * err_prev.powf(0.04);
            let fac = fac.clamp(0.2, if just_rejected { 1.0 } else { 5.0 });
            h = dir * (h.abs() * fac).min(max_step);
            err_prev = err.max(1e-4);
            just_rejected = false;
        } else {
            stats.rejected += 1;
            let fac = if bad {
                0.2
            } else {
                (0.9 * err.powf(-0.17)).clamp(0.2, 0.9)
            };
            h *= fac;
            just_rejected = true;
        }
    }
    Ok(stats)
}

/// Fixed-step fifth-order integration; the error estimate is ignored.
/// Used to measure the convergence order on problems with known solutions.
pub fn integrate_fixed(f: Rhs, x0: f64, y0: &[f64], x_end: f64, steps: u32) -> Vec<f64> {
    let n = y0.len();
    let h = (x_end - x0) / f64::from(steps);
    let mut k: Vec<Vec<f64>> = (0..STAGES).map(|_| vec![0.0; n]).collect();
    let mut scratch = vec![0.0; n];
    let mut x = x0;
    let mut y = y0.to_vec();
    for step in 0..steps {
        let (y5, _) = trial_step(f, x, &y, h, 1.0, 1.0, &mut k, &mut scratch);
        y = y5;
        x = x0 + h * f64::from(step + 1);
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_x: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = -y[0];
    }

    #[test]
    fn adaptive_matches_exponential_decay() {
        let mut samples = Vec::new();
        let stats = integrate_adaptive(
            &decay,
            0.0,
            &[1.0],
            1.0,
            1e-10,
            1e-12,
            1.0 / 64.0,
            &mut samples,
        )
        .unwrap();
        let (x, y) = samples.last().unwrap();
        assert_eq!(*x, 1.0);
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-9);
        assert!(stats.accepted >= 64);
        for w in samples.windows(2) {
            assert!(w[1].0 > w[0].0);
        }
    }

    #[test]
    fn integrates_backwards() {
        let mut samples = Vec::new();
        integrate_adaptive(
            &decay,
            1.0,
            &[(-1.0f64).exp()],
            0.0,
            1e-10,
            1e-12,
            1.0 / 64.0,
            &mut samples,
        )
        .unwrap();
        let (x, y) = samples.last().unwrap();
        assert_eq!(*x, 0.0);
        assert!((y[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn blow_up_underflows_the_step() {
        // y' = y^2 from y(0) = 1 blows up at x = 1
        let square = |_x: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[0] * y[0];
        };
        let mut samples = Vec::new();
        let err = integrate_adaptive(
            &square,
            0.0,
            &[1.0],
            2.0,
            1e-9,
            1e-9,
            1.0 / 64.0,
            &mut samples,
        )
        .unwrap_err();
        assert!((err.last_x - 1.0).abs() < 1e-2);
    }

    #[test]
    fn fixed_step_fifth_order_on_decay() {
        let exact = (-1.0f64).exp();
        let coarse = (integrate_fixed(&decay, 0.0, &[1.0], 1.0, 16)[0] - exact).abs();
        let fine = (integrate_fixed(&decay, 0.0, &[1.0], 1.0, 32)[0] - exact).abs();
        let order = (coarse / fine).log2();
        assert!(order > 4.5, "measured order {order}");
    }
}
