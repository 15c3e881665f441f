//! Time interval during which the two packets' effective supports stay disjoint.
//!
//! A packet with centre `x_c` and width `s` is taken to occupy
//! `[x_c - f s, x_c + f s]` with `f` the support factor (5 by default, which
//! holds 0.99999 of the probability). Gravity shifts both packets equally, so
//! the gap depends only on the kick and the width:
//! `F(t) = -L - (ħk/m) T(t) + 2 f W(t)` is negative while the packets are apart.

use crate::cl::cl_kinematics;
use crate::error::{Error, Result};
use crate::model::{BathParams, PhysicalConstants, SuperpositionSpec};
use crate::schrodinger::packet_state;
use std::fmt;

pub const DEFAULT_SUPPORT_FACTOR: f64 = 5.0;

/// Default upper end of the initial search bracket.
pub const DEFAULT_HORIZON: f64 = 100.0;

/// Bisection tolerance on `t_max`.
pub const WINDOW_TOLERANCE: f64 = 1e-9;

/// Which width law governs the packets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowModel {
    Schrodinger,
    CaldeiraLeggett(BathParams),
    /// One particle's reduced state under a bath shared by two particles:
    /// the friction time constants halve (`γ → 2γ`) while `D` is unchanged.
    CommonBath(BathParams),
}

impl WindowModel {
    fn describe(&self) -> String {
        match self {
            WindowModel::Schrodinger => "schrodinger: -L - (hbar k/m) t + 2f sigma_t < 0".into(),
            WindowModel::CaldeiraLeggett(b) => format!(
                "cl (gamma={}, D={}): -L - (hbar k/m) tau(t) + 2f w_t < 0",
                b.gamma(),
                b.diffusion()
            ),
            WindowModel::CommonBath(b) => format!(
                "common bath (gamma={} doubled, D={}): -L - (hbar k/m) tau(t) + 2f w_t < 0",
                b.gamma(),
                b.diffusion()
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapWindow {
    /// Latest time at which the supports are still disjoint; infinite when
    /// they never meet.
    pub t_max: f64,
    pub support_factor: f64,
    pub criterion: String,
}

impl fmt::Display for OverlapWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t_max = {} (support factor {}; {})",
            self.t_max, self.support_factor, self.criterion
        )
    }
}

/// `F(t)`; negative while the packets are separated.
pub fn window_gap(
    model: &WindowModel,
    spec: &SuperpositionSpec,
    c: &PhysicalConstants,
    support_factor: f64,
    t: f64,
) -> f64 {
    let s0 = spec.sigma0();
    let (time, width) = match model {
        WindowModel::Schrodinger => (t, packet_state(spec.left(), c, t).sigma_t),
        WindowModel::CaldeiraLeggett(b) => {
            let k = cl_kinematics(b.gamma(), b.diffusion(), s0, c, t);
            (k.tau, k.width)
        }
        WindowModel::CommonBath(b) => {
            let k = cl_kinematics(2.0 * b.gamma(), b.diffusion(), s0, c, t);
            (k.tau, k.width)
        }
    };
    -spec.separation() - c.hbar * spec.kick() * time / c.mass + 2.0 * support_factor * width
}

pub fn overlap_window(
    model: &WindowModel,
    spec: &SuperpositionSpec,
    c: &PhysicalConstants,
    support_factor: f64,
) -> Result<OverlapWindow> {
    overlap_window_bracketed(model, spec, c, support_factor, DEFAULT_HORIZON)
}

/// As [`overlap_window`], scanning `[0, horizon]` first and doubling the
/// horizon (up to `1e6`) until the supports meet.
pub fn overlap_window_bracketed(
    model: &WindowModel,
    spec: &SuperpositionSpec,
    c: &PhysicalConstants,
    support_factor: f64,
    horizon: f64,
) -> Result<OverlapWindow> {
    if !(support_factor.is_finite() && support_factor > 0.0) {
        return Err(Error::param("support_factor", "must be positive"));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::param("horizon", "must be positive"));
    }
    let f = |t: f64| window_gap(model, spec, c, support_factor, t);
    if f(0.0) >= 0.0 {
        return Err(Error::Domain(format!(
            "packets already overlap at t = 0: L = {} but 2f sigma0 = {}",
            spec.separation(),
            2.0 * support_factor * spec.sigma0()
        )));
    }
    let criterion = model.describe();
    let mut lo = 0.0;
    let mut hi = horizon;
    loop {
        // Scan so that a crossing followed by re-separation is not skipped.
        let steps = 400;
        let dt = (hi - lo) / steps as f64;
        for i in 1..=steps {
            let t = lo + dt * i as f64;
            if f(t) >= 0.0 {
                let t_max = bisect(&f, t - dt, t);
                return Ok(OverlapWindow {
                    t_max,
                    support_factor,
                    criterion,
                });
            }
        }
        if hi >= 1e6 {
            return Ok(OverlapWindow {
                t_max: f64::INFINITY,
                support_factor,
                criterion,
            });
        }
        lo = hi;
        hi *= 2.0;
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    while b - a > WINDOW_TOLERANCE {
        let mid = 0.5 * (a + b);
        if f(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}
