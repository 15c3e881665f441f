//! Closed-form unitary evolution of Gaussian packets in a uniform field.

use crate::error::{Error, Result};
use crate::model::{Flagged, GaussianPacket, PhysicalConstants, SuperpositionSpec, TimeGrid, TimeSeries};
use crate::window::{overlap_window, WindowModel, DEFAULT_SUPPORT_FACTOR};
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `|Ψ|²` below which local values are refused.
pub const UNDERFLOW_THRESHOLD: f64 = 1e-300;

/// Classical data carried by an evolving Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketStateS {
    pub s_t: Complex64,
    pub sigma_t: f64,
    pub x_t: f64,
    pub p_t: f64,
    pub action_t: f64,
}

/// Sampled Bohmian path.
#[derive(Debug, Clone, PartialEq)]
pub struct BohmianTrajectory {
    pub x0: f64,
    pub samples: Vec<(f64, f64)>,
}

impl BohmianTrajectory {
    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }
}

pub fn packet_state(p: &GaussianPacket, c: &PhysicalConstants, t: f64) -> PacketStateS {
    let (m, hbar, g) = (c.mass, c.hbar, c.gravity);
    let s0 = p.sigma0;
    let spread = hbar * t / (2.0 * m * s0 * s0);
    PacketStateS {
        s_t: Complex64::new(s0, s0 * spread),
        sigma_t: s0 * spread.hypot(1.0),
        x_t: p.x0 + p.p0 * t / m - 0.5 * g * t * t,
        p_t: p.p0 - m * g * t,
        action_t: (p.p0 * p.p0 / (2.0 * m) - m * g * p.x0) * t - p.p0 * g * t * t + m * g * g * t * t * t / 3.0,
    }
}

/// `ln φ(x, t)`; finite even where `φ` itself underflows.
pub fn packet_log_amplitude(p: &GaussianPacket, c: &PhysicalConstants, x: f64, t: f64) -> Complex64 {
    let st = packet_state(p, c, t);
    let d = x - st.x_t;
    let i = Complex64::i();
    -0.25 * (2.0 * PI).ln() - 0.5 * st.s_t.ln() - d * d / (4.0 * st.s_t * p.sigma0)
        + i * (st.p_t * d + st.action_t) / c.hbar
}

pub fn packet_amplitude(p: &GaussianPacket, c: &PhysicalConstants, x: f64, t: f64) -> Complex64 {
    packet_log_amplitude(p, c, x, t).exp()
}

/// Probability density and current of a single packet.
pub fn density_and_current(p: &GaussianPacket, c: &PhysicalConstants, x: f64, t: f64) -> (f64, f64) {
    let st = packet_state(p, c, t);
    let d = x - st.x_t;
    let rho = (-d * d / (2.0 * st.sigma_t * st.sigma_t)).exp() / ((2.0 * PI).sqrt() * st.sigma_t);
    (rho, rho * bohmian_velocity(p, c, x, t))
}

/// Guidance velocity of a single packet.
pub fn bohmian_velocity(p: &GaussianPacket, c: &PhysicalConstants, x: f64, t: f64) -> f64 {
    let (m, hbar, g) = (c.mass, c.hbar, c.gravity);
    let s0 = p.sigma0;
    let s4 = s0.powi(4);
    let sigma_t = packet_state(p, c, t).sigma_t;
    let num =
        8.0 * m * s4 * p.p0 + (2.0 * hbar * hbar * (x - p.x0) - 8.0 * m * m * g * s4) * t - g * hbar * hbar * t.powi(3);
    num / (8.0 * m * m * s0 * s0 * sigma_t * sigma_t)
}

/// Position at time `t` of the trajectory starting at `x_start`.
pub fn bohmian_position(p: &GaussianPacket, c: &PhysicalConstants, x_start: f64, t: f64) -> f64 {
    let st = packet_state(p, c, t);
    st.x_t + (x_start - p.x0) * st.sigma_t / p.sigma0
}

pub fn bohmian_trajectory(
    p: &GaussianPacket,
    c: &PhysicalConstants,
    x_start: f64,
    grid: &TimeGrid,
) -> BohmianTrajectory {
    BohmianTrajectory {
        x0: x_start,
        samples: grid.times().map(|t| (t, bohmian_position(p, c, x_start, t))).collect(),
    }
}

/// `[1 + cos(α - kL/2) exp(-L²/8σ0² - k²σ0²/2)]^{-1/2}` from raw parameters,
/// usable for coincident packets (`L = 0`).
pub fn norm_factor(separation: f64, sigma0: f64, kick: f64, alpha: f64) -> f64 {
    let overlap = (-separation * separation / (8.0 * sigma0 * sigma0) - kick * kick * sigma0 * sigma0 / 2.0).exp();
    (1.0 + (alpha - kick * separation / 2.0).cos() * overlap).powf(-0.5)
}

pub fn superposition_norm(spec: &SuperpositionSpec) -> f64 {
    norm_factor(spec.separation(), spec.sigma0(), spec.kick(), spec.alpha())
}

/// `Ψ = N (ψ_A + e^{iα} ψ_B) / √2`.
pub fn superposed_amplitude(spec: &SuperpositionSpec, c: &PhysicalConstants, x: f64, t: f64) -> Complex64 {
    let a = packet_amplitude(spec.left(), c, x, t);
    let b = packet_amplitude(spec.right(), c, x, t);
    superposition_norm(spec) * FRAC_1_SQRT_2 * (a + Complex64::from_polar(1.0, spec.alpha()) * b)
}

/// `j = (ħ/m) Im(Ψ* ∂Ψ/∂x)` of the superposition.
pub fn superposed_current(spec: &SuperpositionSpec, c: &PhysicalConstants, x: f64, t: f64) -> f64 {
    let slope = |p: &GaussianPacket| {
        let st = packet_state(p, c, t);
        -(x - st.x_t) / (2.0 * st.s_t * p.sigma0) + Complex64::i() * st.p_t / c.hbar
    };
    let a = packet_amplitude(spec.left(), c, x, t);
    let b = Complex64::from_polar(1.0, spec.alpha()) * packet_amplitude(spec.right(), c, x, t);
    let scale = superposition_norm(spec) * FRAC_1_SQRT_2;
    let psi = scale * (a + b);
    let dpsi = scale * (a * slope(spec.left()) + b * slope(spec.right()));
    c.hbar / c.mass * (psi.conj() * dpsi).im
}

/// `⟨cos(p̂L/ħ)⟩ = ½ e^{-k²σ0²/2} cos(α - m g L t/ħ)`; flagged outside the
/// non-overlap window.
pub fn modular_expectation(spec: &SuperpositionSpec, c: &PhysicalConstants, t: f64) -> Flagged<f64> {
    let value = modular_signal(spec, c, t);
    match overlap_window(&WindowModel::Schrodinger, spec, c, DEFAULT_SUPPORT_FACTOR) {
        Ok(w) if t <= w.t_max => Flagged::exact(value),
        Ok(w) => Flagged::approximate(
            value,
            format!("t = {t} is past the non-overlap window t_max = {}", w.t_max),
        ),
        Err(e) => Flagged::approximate(value, e.to_string()),
    }
}

/// Unflagged closed form behind [`modular_expectation`].
pub fn modular_signal(spec: &SuperpositionSpec, c: &PhysicalConstants, t: f64) -> f64 {
    let (k, s0, l) = (spec.kick(), spec.sigma0(), spec.separation());
    0.5 * (-k * k * s0 * s0 / 2.0).exp() * (spec.alpha() - c.mass * c.gravity * l * t / c.hbar).cos()
}

/// Heisenberg evolution of `⟨e^{ip̂ℓ/ħ}⟩` in a linear potential: a pure phase.
pub fn phase_rotated_modular(initial: Complex64, ell: f64, c: &PhysicalConstants, t: f64) -> Complex64 {
    initial * Complex64::from_polar(1.0, -c.mass * c.gravity * ell * t / c.hbar)
}

/// `Re{[Ψ(x+L) + Ψ(x-L)] / (2 Ψ(x))}`.
pub fn local_modular_pointwise(spec: &SuperpositionSpec, c: &PhysicalConstants, x: f64, t: f64) -> Result<f64> {
    let psi = superposed_amplitude(spec, c, x, t);
    if psi.norm_sqr() < UNDERFLOW_THRESHOLD {
        return Err(Error::Domain(format!(
            "|Psi|^2 = {:e} underflows at x = {x}, t = {t}",
            psi.norm_sqr()
        )));
    }
    let l = spec.separation();
    let shifted = superposed_amplitude(spec, c, x + l, t) + superposed_amplitude(spec, c, x - l, t);
    Ok((shifted / (2.0 * psi)).re)
}

/// Closed-form local modular value along a trajectory of the left packet.
pub fn local_modular_closed(spec: &SuperpositionSpec, c: &PhysicalConstants, x_start: f64, t: f64) -> f64 {
    let (m, hbar, g) = (c.mass, c.hbar, c.gravity);
    let (k, s0, l) = (spec.kick(), spec.sigma0(), spec.separation());
    let sigma_t = packet_state(spec.left(), c, t).sigma_t;
    let ratio = sigma_t / s0;
    let exponent =
        hbar * k * t / (2.0 * m * sigma_t * sigma_t) * (-hbar * k * t / (2.0 * m) + (x_start + l / 2.0) * ratio);
    let phase = spec.alpha()
        + 0.5
            * (-2.0 * m * g * l * t / hbar - hbar * k * k * s0 * s0 * t / (m * sigma_t * sigma_t)
                + k * (l + 2.0 * x_start) / ratio);
    0.5 * exponent.exp() * phase.cos()
}

/// A series together with the caveats raised while producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedSeries {
    pub series: TimeSeries,
    pub warnings: Vec<String>,
}

/// Local modular value along the Bohmian trajectory of the occupied (left)
/// packet that starts at `x_start`.
pub fn local_modular_on_trajectory(
    spec: &SuperpositionSpec,
    c: &PhysicalConstants,
    x_start: f64,
    grid: &TimeGrid,
) -> AnnotatedSeries {
    let mut warnings = Vec::new();
    let offset = (x_start - spec.left().x0) / spec.sigma0();
    if offset.abs() > DEFAULT_SUPPORT_FACTOR {
        warnings.push(format!(
            "X0 = {x_start} lies {offset:.3} widths from the left packet centre, outside its support"
        ));
    }
    if let Ok(w) = overlap_window(&WindowModel::Schrodinger, spec, c, DEFAULT_SUPPORT_FACTOR) {
        if grid.end() > w.t_max {
            warnings.push(format!("grid extends past the non-overlap window t_max = {}", w.t_max));
        }
    }
    let mut series = TimeSeries::new(
        format!("schrodinger X0={x_start}"),
        format!(
            "local cos(pL/hbar) on trajectory; alpha={} L={} k={} sigma0={} g={}",
            spec.alpha(),
            spec.separation(),
            spec.kick(),
            spec.sigma0(),
            c.gravity
        ),
    );
    series.samples = grid
        .times()
        .map(|t| (t, local_modular_closed(spec, c, x_start, t)))
        .collect();
    AnnotatedSeries { series, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_superposition, reference_superposition};
    use crate::quadrature::{integrate, integrate_real, QuadOptions};
    use std::f64::consts::FRAC_PI_4;

    fn reference() -> PhysicalConstants {
        PhysicalConstants::reference()
    }

    fn packet(x0: f64, p0: f64) -> GaussianPacket {
        GaussianPacket::new(x0, p0, 1.0).unwrap()
    }

    #[test]
    fn initial_state() {
        let p = packet(-25.0, 0.3);
        let s = packet_state(&p, &reference(), 0.0);
        assert_eq!(s.s_t, Complex64::new(1.0, 0.0));
        assert_eq!((s.sigma_t, s.x_t, s.p_t, s.action_t), (1.0, -25.0, 0.3, 0.0));
    }

    #[test]
    fn width_and_centre_values() {
        let c = reference();
        let s = packet_state(&packet(-25.0, 0.0), &c, 2.0);
        assert!((s.sigma_t - 2f64.sqrt()).abs() < 1e-15);
        assert!((s.sigma_t - s.s_t.norm()).abs() < 1e-15);
        // ẍ = -g = 3 from rest: x = -25 + 3·4/2.
        assert!((s.x_t + 19.0).abs() < 1e-14);
    }

    #[test]
    fn action_matches_lagrangian_integral() {
        // 𝒜 = ∫ (p²/2m - m g x) dt along the classical path.
        let c = PhysicalConstants::new(1.3, 0.8, 1.0, -2.1).unwrap();
        let p = GaussianPacket::new(0.7, 0.4, 1.1).unwrap();
        let t = 1.7;
        let lag = |s: f64| {
            let st = packet_state(&p, &c, s);
            st.p_t * st.p_t / (2.0 * c.mass) - c.mass * c.gravity * st.x_t
        };
        let (v, _) = integrate_real(lag, 0.0, t, QuadOptions::default()).unwrap();
        assert!((packet_state(&p, &c, t).action_t - v).abs() < 1e-12);
    }

    #[test]
    fn amplitude_peak_and_norm() {
        let c = reference();
        let p = packet(-25.0, 0.1);
        let peak = packet_amplitude(&p, &c, -25.0, 0.0);
        assert!((peak.re - (2.0 * PI).powf(-0.25)).abs() < 1e-15);
        assert!(peak.im.abs() < 1e-15);
        let xt = packet_state(&p, &c, 2.0).x_t;
        let (n, _) = integrate_real(
            |x| packet_amplitude(&p, &c, x, 2.0).norm_sqr(),
            xt - 20.0,
            xt + 20.0,
            QuadOptions::default(),
        )
        .unwrap();
        assert!((n - 1.0).abs() < 1e-10);
    }

    #[test]
    fn density_peak_norm_and_continuity() {
        let c = reference();
        let p = packet(-25.0, 0.1);
        let st = packet_state(&p, &c, 1.3);
        let (rho, _) = density_and_current(&p, &c, st.x_t, 1.3);
        assert!((rho - 1.0 / ((2.0 * PI).sqrt() * st.sigma_t)).abs() < 1e-15);
        let (n, _) = integrate_real(
            |x| density_and_current(&p, &c, x, 1.3).0,
            st.x_t - 20.0,
            st.x_t + 20.0,
            QuadOptions::default(),
        )
        .unwrap();
        assert!((n - 1.0).abs() < 1e-10);

        let h = 1e-4;
        for &(x, t) in &[(-24.0, 0.5), (-19.5, 1.9), (-22.0, 1.0)] {
            let drho = (density_and_current(&p, &c, x, t + h).0 - density_and_current(&p, &c, x, t - h).0) / (2.0 * h);
            let dj = (density_and_current(&p, &c, x + h, t).1 - density_and_current(&p, &c, x - h, t).1) / (2.0 * h);
            assert!((drho + dj).abs() < 1e-6, "continuity residual {}", drho + dj);
        }
    }

    #[test]
    fn velocity_initial_values() {
        let c = reference();
        assert_eq!(bohmian_velocity(&packet(-25.0, 0.0), &c, -23.0, 0.0), 0.0);
        assert!((bohmian_velocity(&packet(25.0, 0.1), &c, 27.0, 0.0) - 0.1).abs() < 1e-16);
    }

    #[test]
    fn velocity_equals_phase_gradient() {
        let c = PhysicalConstants::new(1.4, 0.9, 1.0, -3.0).unwrap();
        let p = GaussianPacket::new(-3.0, 0.4, 0.8).unwrap();
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let t = 3.0 * next();
            let x = packet_state(&p, &c, t).x_t + 6.0 * (next() - 0.5);
            // ln φ is quadratic in x, so a central difference is exact up to rounding.
            let h = 1e-3;
            let d = (packet_log_amplitude(&p, &c, x + h, t) - packet_log_amplitude(&p, &c, x - h, t)) / (2.0 * h);
            let v = c.hbar / c.mass * d.im;
            assert!((v - bohmian_velocity(&p, &c, x, t)).abs() < 1e-10);
        }
    }

    #[test]
    fn trajectory_values() {
        let c = reference();
        let p = packet(-25.0, 0.0);
        let grid = TimeGrid::new(0.0, 2.0, 11).unwrap();
        let centre = bohmian_trajectory(&p, &c, -25.0, &grid);
        for &(t, x) in &centre.samples {
            assert_eq!(x, packet_state(&p, &c, t).x_t);
        }
        // σ_t = √2 σ0 at t = 2.
        let off = bohmian_position(&p, &c, -23.0, 2.0);
        assert!((off - (-19.0 + 2.0 * 2f64.sqrt())).abs() < 1e-13);
    }

    #[test]
    fn norm_values() {
        let spec = reference_superposition(1.0);
        assert!((superposition_norm(&spec) - 1.0).abs() < 1e-15);
        assert!((norm_factor(0.0, 1.0, 0.0, 0.0) - FRAC_1_SQRT_2).abs() < 1e-15);

        // Position-space quadrature of |ψ_A + ψ_B|²/2 at L = 4.
        let c = reference();
        let spec = make_superposition(4.0, 1.0, 0.0, 0.0, &c).unwrap();
        let raw = |x: f64| {
            let a = packet_amplitude(spec.left(), &c, x, 0.0);
            let b = packet_amplitude(spec.right(), &c, x, 0.0);
            (a + b).norm_sqr() / 2.0
        };
        let (n2inv, _) = integrate_real(raw, -20.0, 20.0, QuadOptions::default()).unwrap();
        assert!((superposition_norm(&spec) - n2inv.powf(-0.5)).abs() < 1e-13);
    }

    #[test]
    fn superposition_normalised() {
        let c = reference();
        for &(l, k, alpha) in &[(50.0, 0.1, 0.3), (4.0, 0.7, 2.0), (2.0, 0.0, 0.0)] {
            let spec = make_superposition(l, 1.0, k, alpha, &c).unwrap();
            for &t in &[0.0, 1.0, 2.0] {
                let r = integrate(
                    |x| Complex64::new(superposed_amplitude(&spec, &c, x, t).norm_sqr(), 0.0),
                    -l / 2.0 - 15.0,
                    l / 2.0 + 25.0,
                    QuadOptions::default(),
                )
                .unwrap();
                assert!((r.value.re - 1.0).abs() < 1e-10, "L={l} t={t}: {}", r.value.re);
            }
        }
    }

    #[test]
    fn modular_values() {
        let c = reference();
        let spec = reference_superposition(std::f64::consts::FRAC_PI_2);
        assert!(modular_expectation(&spec, &c, 0.0).value.abs() < 1e-16);
        let spec = reference_superposition(0.0);
        let m0 = modular_expectation(&spec, &c, 0.0);
        assert!(!m0.is_approximate());
        assert!((m0.value - 0.5 * (-0.005f64).exp()).abs() < 1e-15);
        assert!(modular_expectation(&spec, &c, 11.0).is_approximate());
    }

    #[test]
    fn modular_period_from_zero_crossings() {
        let c = reference();
        let spec = reference_superposition(0.0);
        let n = 20001;
        let tmax = 0.5;
        let mut crossings = Vec::new();
        let mut prev = modular_signal(&spec, &c, 0.0);
        for i in 1..n {
            let t = tmax * i as f64 / (n - 1) as f64;
            let v = modular_signal(&spec, &c, t);
            if prev.signum() != v.signum() {
                // Linear interpolation of the root.
                let t0 = t - tmax / (n - 1) as f64;
                crossings.push(t0 + (t - t0) * prev / (prev - v));
            }
            prev = v;
        }
        let spans = crossings.len() - 1;
        let period = 2.0 * (crossings[spans] - crossings[0]) / spans as f64;
        assert!((period - 0.041_887_902_047_863_9).abs() < 1e-6, "period {period}");
    }

    #[test]
    fn phase_rotation() {
        let z = Complex64::new(0.3, -0.2);
        let free = PhysicalConstants::reference().with_gravity(0.0);
        assert_eq!(phase_rotated_modular(z, 50.0, &free, 7.0), z);
        let c = reference();
        let period = 2.0 * PI * c.hbar / (c.mass * c.gravity.abs() * 50.0);
        assert!((phase_rotated_modular(z, 50.0, &c, period) - z).norm() < 1e-14);
    }

    #[test]
    fn local_value_guard_and_golden_point() {
        let c = reference();
        let spec = make_superposition(50.0, 1.0, 0.0, 0.0, &c).unwrap();
        // Right packet shifted onto the left one is identical to it, so the
        // ratio Ψ(x+L)/Ψ(x) is exactly 1 and the other shift contributes ~0.
        let v = local_modular_pointwise(&spec, &c, -25.0, 0.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert!(matches!(
            local_modular_pointwise(&spec, &c, 400.0, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn local_closed_form_matches_pointwise() {
        let c = reference();
        let spec = reference_superposition(FRAC_PI_4);
        for &x_start in &[-27.0, -25.0, -23.0, -24.2] {
            for i in 0..=20 {
                let t = 0.1 * i as f64;
                let x = bohmian_position(spec.left(), &c, x_start, t);
                let a = local_modular_pointwise(&spec, &c, x, t).unwrap();
                let b = local_modular_closed(&spec, &c, x_start, t);
                assert!((a - b).abs() < 1e-8, "X0={x_start} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn local_value_initial_and_free_limits() {
        let c = reference();
        let spec = reference_superposition(FRAC_PI_4);
        let v = local_modular_closed(&spec, &c, -25.0, 0.0);
        assert!((v - 0.5 * FRAC_PI_4.cos()).abs() < 1e-15);

        let free = c.with_gravity(0.0);
        let still = make_superposition(50.0, 1.0, 0.0, 0.7, &free).unwrap();
        let grid = TimeGrid::new(0.0, 2.0, 21).unwrap();
        let out = local_modular_on_trajectory(&still, &free, -24.0, &grid);
        assert!(out.warnings.is_empty());
        for v in out.series.values() {
            assert!((v - 0.5 * 0.7f64.cos()).abs() < 1e-15);
        }
        let far = local_modular_on_trajectory(&still, &free, -40.0, &grid);
        assert_eq!(far.warnings.len(), 1);
    }

    #[test]
    fn local_to_global_decomposition() {
        let c = reference();
        for &alpha in &[0.0, FRAC_PI_4, 2.0] {
            let spec = reference_superposition(alpha);
            for &t in &[0.0, 0.8, 2.0] {
                let weighted = |x: f64| {
                    let rho = superposed_amplitude(&spec, &c, x, t).norm_sqr();
                    local_modular_pointwise(&spec, &c, x, t).map(|a| rho * a).unwrap_or(0.0)
                };
                let xa = packet_state(spec.left(), &c, t).x_t;
                let xb = packet_state(spec.right(), &c, t).x_t;
                let opts = QuadOptions::default();
                let (ia, _) = integrate_real(weighted, xa - 12.0, xa + 12.0, opts).unwrap();
                let (ib, _) = integrate_real(weighted, xb - 12.0, xb + 12.0, opts).unwrap();
                let expected = modular_signal(&spec, &c, t);
                assert!((ia + ib - expected).abs() < 1e-6, "alpha={alpha} t={t}");
            }
        }
    }

    #[test]
    fn superposed_current_by_differences() {
        let c = reference();
        let spec = make_superposition(4.0, 1.0, 0.3, 0.7, &c).unwrap();
        let h = 1e-5;
        for &(x, t) in &[(-2.0, 0.3), (0.1, 1.0), (1.5, 2.0)] {
            let psi = superposed_amplitude(&spec, &c, x, t);
            let d = (superposed_amplitude(&spec, &c, x + h, t) - superposed_amplitude(&spec, &c, x - h, t)) / (2.0 * h);
            let fd = (psi.conj() * d).im;
            assert!((superposed_current(&spec, &c, x, t) - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn density_blind_to_phase() {
        let c = reference();
        let a = reference_superposition(0.0);
        let b = reference_superposition(PI);
        for &x in &[-25.0, -20.0, 0.0, 24.0, 30.0] {
            for &t in &[0.0, 1.0, 2.0] {
                let ra = superposed_amplitude(&a, &c, x, t).norm_sqr();
                let rb = superposed_amplitude(&b, &c, x, t).norm_sqr();
                assert!((ra - rb).abs() < 1e-12);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn width_identity(t in 0.0f64..100.0, s0 in 0.1f64..5.0, m in 0.1f64..5.0, hbar in 0.1f64..3.0) {
            let c = PhysicalConstants::new(m, hbar, 1.0, -3.0).unwrap();
            let p = GaussianPacket::new(0.0, 0.0, s0).unwrap();
            let s = packet_state(&p, &c, t);
            proptest::prop_assert!((s.sigma_t - s.s_t.norm()).abs() <= 4.0 * f64::EPSILON * s.sigma_t);
            proptest::prop_assert!(s.sigma_t >= s0);
        }

        #[test]
        fn modular_bounded(alpha in -10.0f64..10.0, k in -2.0f64..2.0, t in 0.0f64..10.0) {
            let c = reference();
            let spec = make_superposition(50.0, 1.0, k, alpha, &c).unwrap();
            let v = modular_signal(&spec, &c, t);
            proptest::prop_assert!(v.abs() <= 0.5 * (-k * k / 2.0).exp() + 1e-16);
        }

        #[test]
        fn trajectories_never_cross(a in -30.0f64..-20.0, gap in 1e-3f64..5.0, t in 0.0f64..20.0) {
            let c = reference();
            let p = packet(-25.0, 0.0);
            proptest::prop_assert!(bohmian_position(&p, &c, a, t) < bohmian_position(&p, &c, a + gap, t));
        }
    }
}
