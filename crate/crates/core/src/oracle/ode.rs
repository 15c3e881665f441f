//! Adaptive Dormand-Prince 5(4) integration of the guidance equation
//! `dX/dt = v(X, t)`.

use crate::error::{Error, Result};
use crate::model::TimeGrid;
use crate::schrodinger::BohmianTrajectory;

// Butcher tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
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
/// Fifth-order weights (equal to the last row of `A`).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_steps: 1_000_000,
        }
    }
}

/// Integrate `v` from `x0` at `grid.start()` and sample at every grid time.
pub fn trajectory_ode_oracle<V>(velocity: V, x0: f64, grid: &TimeGrid, opts: &OdeOptions) -> Result<BohmianTrajectory>
where
    V: Fn(f64, f64) -> f64,
{
    let mut t = grid.start();
    let mut x = x0;
    let mut samples = vec![(t, x)];
    let mut h = grid.step().clamp(1e-6, 1e-2);
    let mut k1 = velocity(x, t);
    let mut steps = 0usize;
    for target in grid.times().skip(1) {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::numerical(
                    "trajectory_ode_oracle",
                    format!("step budget exhausted at t = {t}"),
                ));
            }
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            let mut k = [0.0; 7];
            k[0] = k1;
            for s in 1..7 {
                let xs = x + step * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
                k[s] = velocity(xs, t + C[s] * step);
            }
            let x5 = x + step * (0..7).map(|j| B5[j] * k[j]).sum::<f64>();
            let x4 = x + step * (0..7).map(|j| B4[j] * k[j]).sum::<f64>();
            if !x5.is_finite() {
                return Err(Error::numerical(
                    "trajectory_ode_oracle",
                    format!("non-finite state at t = {t}"),
                ));
            }
            let scale = opts.abs_tol + opts.rel_tol * x.abs().max(x5.abs());
            let err = (x5 - x4).abs() / scale;
            steps += 1;
            if err <= 1.0 {
                t = if last { target } else { t + step };
                x = x5;
                // First-same-as-last: the seventh stage is v at the new point.
                k1 = k[6];
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = step * factor;
            if h < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::numerical(
                    "trajectory_ode_oracle",
                    format!("step size collapsed at t = {t}"),
                ));
            }
        }
        samples.push((t, x));
    }
    Ok(BohmianTrajectory { x0, samples })
}
