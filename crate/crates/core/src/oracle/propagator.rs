//! Split-operator propagation of the wavefunction on a periodic grid.
//!
//! Each step applies half a potential kick, a full kinetic step in the
//! Fourier basis and another half kick. For a linear potential the only
//! splitting error is a global phase of order `dt²`.

use crate::error::{Error, Result};
use crate::model::{PhysicalConstants, SuperpositionSpec};
use crate::schrodinger::{packet_state, superposed_amplitude};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Largest `|Ψ|²` tolerated on the outer edge of the box.
const BOUNDARY_DENSITY: f64 = 1e-12;

/// Fraction of the box on each side treated as the edge.
const EDGE_FRACTION: f64 = 0.01;

/// Padding around the packets, in final widths.
const BOX_WIDTHS: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorGrid {
    /// Number of grid points; must be a power of two.
    pub points: usize,
    /// Requested time step; rounded down so that it divides the run.
    pub dt: f64,
    /// Explicit box; [`propagator_box`] when absent.
    pub domain: Option<(f64, f64)>,
}

impl PropagatorGrid {
    pub fn new(points: usize, dt: f64) -> Self {
        Self {
            points,
            dt,
            domain: None,
        }
    }
}

impl Default for PropagatorGrid {
    fn default() -> Self {
        Self::new(1024, 2.5e-4)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedState {
    pub t: f64,
    pub x: Vec<f64>,
    pub psi: Vec<Complex64>,
    pub dx: f64,
    pub steps: usize,
    pub norm_drift: f64,
    /// Largest edge density seen during the run.
    pub boundary_density: f64,
}

impl PropagatedState {
    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx
    }

    /// `‖Ψ_grid - Ψ_ref‖₂` on the grid.
    pub fn l2_error<F: Fn(f64) -> Complex64>(&self, reference: F) -> f64 {
        let sum: f64 = self
            .x
            .iter()
            .zip(&self.psi)
            .map(|(&x, &v)| (v - reference(x)).norm_sqr())
            .sum();
        (sum * self.dx).sqrt()
    }
}

/// Box covering both packets up to `t_end`, padded by fifteen final widths
/// on each side; the gravitational drift is included.
pub fn propagator_box(spec: &SuperpositionSpec, c: &PhysicalConstants, t_end: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in [spec.left(), spec.right()] {
        let start = packet_state(p, c, 0.0);
        let end = packet_state(p, c, t_end);
        let pad = BOX_WIDTHS * end.sigma_t.max(start.sigma_t);
        // The centre moves on a parabola; its extremes lie at the ends or
        // at the turning point.
        let mut xs = vec![start.x_t, end.x_t];
        if c.gravity != 0.0 {
            let turn = p.p0 / (c.mass * c.gravity);
            if turn > 0.0 && turn < t_end {
                xs.push(packet_state(p, c, turn).x_t);
            }
        }
        for x in xs {
            lo = lo.min(x - pad);
            hi = hi.max(x + pad);
        }
    }
    (lo, hi)
}

fn edge_density(psi: &[Complex64]) -> f64 {
    let n = psi.len();
    let edge = ((n as f64 * EDGE_FRACTION).ceil() as usize).max(1);
    psi[..edge]
        .iter()
        .chain(&psi[n - edge..])
        .map(|v| v.norm_sqr())
        .fold(0.0, f64::max)
}

/// Propagate the superposition from `t = 0` to `t_end`.
pub fn grid_propagator(
    spec: &SuperpositionSpec,
    c: &PhysicalConstants,
    t_end: f64,
    grid: &PropagatorGrid,
) -> Result<PropagatedState> {
    if !grid.points.is_power_of_two() || grid.points < 16 {
        return Err(Error::param(
            "points",
            format!("need a power of two >= 16, got {}", grid.points),
        ));
    }
    if !(grid.dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::param("dt", "need dt > 0 and t_end >= 0"));
    }
    let n = grid.points;
    let (lo, hi) = grid.domain.unwrap_or_else(|| propagator_box(spec, c, t_end));
    if !(lo < hi) {
        return Err(Error::param("domain", format!("empty box [{lo}, {hi}]")));
    }
    let length = hi - lo;
    let dx = length / n as f64;
    let x: Vec<f64> = (0..n).map(|i| lo + i as f64 * dx).collect();
    let mut psi: Vec<Complex64> = x.iter().map(|&xi| superposed_amplitude(spec, c, xi, 0.0)).collect();

    let steps = (t_end / grid.dt).ceil().max(if t_end > 0.0 { 1.0 } else { 0.0 }) as usize;
    let dt = if steps > 0 { t_end / steps as f64 } else { 0.0 };
    let (m, hbar) = (c.mass, c.hbar);
    let half_kick: Vec<Complex64> = x
        .iter()
        .map(|&xi| Complex64::from_polar(1.0, -m * c.gravity * xi * dt / (2.0 * hbar)))
        .collect();
    let kinetic: Vec<Complex64> = (0..n)
        .map(|j| {
            let freq = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
            let k = 2.0 * PI * freq / length;
            // The 1/n of the inverse transform is folded in here.
            Complex64::from_polar(1.0 / n as f64, -hbar * k * k * dt / (2.0 * m))
        })
        .collect();

    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let norm0 = psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
    let mut boundary = edge_density(&psi);
    for step in 0..steps {
        for (v, k) in psi.iter_mut().zip(&half_kick) {
            *v *= k;
        }
        forward.process(&mut psi);
        for (v, k) in psi.iter_mut().zip(&kinetic) {
            *v *= k;
        }
        inverse.process(&mut psi);
        for (v, k) in psi.iter_mut().zip(&half_kick) {
            *v *= k;
        }
        if step % 64 == 63 || step + 1 == steps {
            boundary = boundary.max(edge_density(&psi));
            if boundary > BOUNDARY_DENSITY {
                return Err(Error::Domain(format!(
                    "density {boundary:e} reached the edge of [{lo}, {hi}] at t = {}; enlarge the box",
                    (step + 1) as f64 * dt
                )));
            }
        }
    }
    let norm = psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
    Ok(PropagatedState {
        t: t_end,
        x,
        psi,
        dx,
        steps,
        norm_drift: (norm - norm0).abs(),
        boundary_density: boundary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub points: usize,
    pub dt: f64,
    pub l2_error: f64,
    pub norm_drift: f64,
}

/// Error against the closed form at `t_end` for each resolution.
pub fn propagator_convergence(
    spec: &SuperpositionSpec,
    c: &PhysicalConstants,
    t_end: f64,
    grids: &[PropagatorGrid],
) -> Result<Vec<ConvergenceRow>> {
    grids
        .iter()
        .map(|g| {
            let state = grid_propagator(spec, c, t_end, g)?;
            Ok(ConvergenceRow {
                points: g.points,
                dt: g.dt,
                l2_error: state.l2_error(|x| superposed_amplitude(spec, c, x, t_end)),
                norm_drift: state.norm_drift,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_superposition, reference_superposition};

    #[test]
    fn free_spreading() {
        let c = PhysicalConstants::reference().with_gravity(0.0);
        let spec = make_superposition(50.0, 1.0, 0.1, 0.0, &c).unwrap();
        let state = grid_propagator(&spec, &c, 2.0, &PropagatorGrid::default()).unwrap();
        let err = state.l2_error(|x| superposed_amplitude(&spec, &c, x, 2.0));
        assert!(err < 1e-6, "{err}");
        assert!(state.norm_drift < 1e-10);
    }

    #[test]
    fn gravity_and_superposition() {
        let c = PhysicalConstants::reference();
        let spec = reference_superposition(0.6);
        let state = grid_propagator(&spec, &c, 2.0, &PropagatorGrid::default()).unwrap();
        let err = state.l2_error(|x| superposed_amplitude(&spec, &c, x, 2.0));
        assert!(err < 1e-6, "{err}");
        assert!(state.norm_drift < 1e-10, "{}", state.norm_drift);
        assert!((state.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn leaking_box_is_rejected() {
        let c = PhysicalConstants::reference();
        let spec = reference_superposition(0.0);
        let tight = PropagatorGrid {
            domain: Some((-40.0, 30.0)),
            ..PropagatorGrid::new(512, 1e-3)
        };
        let err = grid_propagator(&spec, &c, 2.0, &tight).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "{err}");
        assert!(grid_propagator(&spec, &c, 2.0, &PropagatorGrid::new(12, 1e-3)).is_err());
    }

    #[test]
    fn box_includes_drift() {
        let c = PhysicalConstants::reference();
        let spec = reference_superposition(0.0);
        let (lo, hi) = propagator_box(&spec, &c, 2.0);
        assert!(lo <= -25.0 - 15.0);
        // Gravity pushes towards +x by |g| t²/2 = 6.
        assert!(hi >= 25.0 + 0.2 + 6.0 + 15.0);
    }
}
