//! Cancellation-free evaluation of the exponential combinations that appear
//! in the damped (Caldeira-Leggett) solution. Every function here has a
//! finite limit at `x = 0`, which is what makes the undamped limit exact.

/// Below this argument `relaxation_fraction` uses its Taylor series.
/// In terms of the rate this is `γ t < 1e-4`.
pub const LINEAR_SERIES_SWITCH: f64 = 2.0e-4;

/// Below this argument the quadratic and cubic remainders use their series.
pub const REMAINDER_SERIES_SWITCH: f64 = 0.5;

/// `(1 - e^{-x}) / x`, equal to 1 at `x = 0`.
pub fn relaxation_fraction(x: f64) -> f64 {
    if x.abs() < LINEAR_SERIES_SWITCH {
        1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// `(e^{-x} - 1 + x) / x^2`, equal to 1/2 at `x = 0`.
pub fn quadratic_remainder(x: f64) -> f64 {
    if x.abs() < REMAINDER_SERIES_SWITCH {
        // sum_{k>=0} (-x)^k / (k+2)!
        series(|k| {
            let mut f = 1.0;
            for i in 1..=(k + 2) {
                f *= i as f64;
            }
            (-x).powi(k as i32) / f
        })
    } else {
        ((-x).exp_m1() + x) / (x * x)
    }
}

/// `(3 + e^{-2x} - 4 e^{-x} - 2x) / x^3`, equal to -2/3 at `x = 0`.
///
/// With `x = 2γt` this is the combination that carries thermal diffusion
/// into the packet width.
pub fn diffusion_cubic(x: f64) -> f64 {
    if x.abs() < REMAINDER_SERIES_SWITCH {
        // sum_{n>=3} (-1)^n (2^n - 4) x^(n-3) / n!
        series(|k| {
            let n = k + 3;
            let mut f = 1.0;
            for i in 1..=n {
                f *= i as f64;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * (2f64.powi(n as i32) - 4.0) * x.powi(k as i32) / f
        })
    } else {
        ((-2.0 * x).exp_m1() - 4.0 * (-x).exp_m1() - 2.0 * x) / (x * x * x)
    }
}

fn series(term: impl Fn(usize) -> f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..40 {
        let t = term(k);
        sum += t;
        if t.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}
