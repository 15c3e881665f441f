//! Caldeira-Leggett evolution of the two-packet superposition.
//!
//! In the coordinates `r = x - y`, `R = (x + y)/2` the master equation reads
//! `∂ρ/∂t = [iħ/m ∂r∂R - 2γ r ∂r - D r²/ħ² - i m g r/ħ] ρ`, and each of the
//! four Gaussian pieces of the initial state keeps its Gaussian form.

mod coefficients;
mod density;
mod observables;

pub use coefficients::{term_coefficients, term_coefficients_with, B2Reading, TermCoefficients, TermPolynomials};
pub use density::{
    cl_current, cl_density, cl_local_modular, cl_local_modular_on_trajectory, density_matrix_rR, local_translation,
    ClDensityMatrix, ClSnapshot,
};
pub use observables::{
    characteristic_function, cl_modular_closed, cl_modular_parts, cl_modular_quadrature, l1_coherence, trace_check,
    CoherenceReport, ModularParts, QuadratureMethod, ScaledQuadrature,
};

use crate::model::{BathParams, GaussianPacket, PhysicalConstants, TimeGrid};
use crate::schrodinger::BohmianTrajectory;
use crate::special::{diffusion_cubic, quadratic_remainder, relaxation_fraction};

/// Centre and width of a damped packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketStateCL {
    pub x_t: f64,
    pub w_t: f64,
    pub tau: f64,
}

/// Friction-rescaled times and width for a given rate and diffusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ClKinematics {
    /// `(1 - e^{-2γt}) / 2γ`
    pub tau: f64,
    /// `(t - τ) / 2γ`, the coefficient of `-g` in the centre.
    pub xi: f64,
    pub width: f64,
}

pub(crate) fn cl_kinematics(gamma: f64, diffusion: f64, sigma0: f64, c: &PhysicalConstants, t: f64) -> ClKinematics {
    let x = 2.0 * gamma * t;
    let tau = t * relaxation_fraction(x);
    let xi = t * t * quadratic_remainder(x);
    let m = c.mass;
    let spread = c.hbar * tau / (2.0 * m * sigma0);
    let w2 = sigma0 * sigma0 + spread * spread - diffusion * t.powi(3) * diffusion_cubic(x) / (m * m);
    assert!(w2 > 0.0, "non-positive squared width {w2} at t = {t}");
    ClKinematics {
        tau,
        xi,
        width: w2.sqrt(),
    }
}

pub fn cl_packet_state(p: &GaussianPacket, b: &BathParams, c: &PhysicalConstants, t: f64) -> PacketStateCL {
    let k = cl_kinematics(b.gamma(), b.diffusion(), p.sigma0, c, t);
    PacketStateCL {
        x_t: p.x0 + p.p0 * k.tau / c.mass - c.gravity * k.xi,
        w_t: k.width,
        tau: k.tau,
    }
}

pub fn cl_bohmian_position(p: &GaussianPacket, b: &BathParams, c: &PhysicalConstants, x_start: f64, t: f64) -> f64 {
    let s = cl_packet_state(p, b, c, t);
    s.x_t + (x_start - p.x0) * s.w_t / p.sigma0
}

pub fn cl_bohmian_trajectory(
    p: &GaussianPacket,
    b: &BathParams,
    c: &PhysicalConstants,
    x_start: f64,
    grid: &TimeGrid,
) -> BohmianTrajectory {
    BohmianTrajectory {
        x0: x_start,
        samples: grid
            .times()
            .map(|t| (t, cl_bohmian_position(p, b, c, x_start, t)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schrodinger::{bohmian_position, packet_state};

    fn bath(gamma: f64, temp: f64) -> BathParams {
        BathParams::new(&PhysicalConstants::reference(), gamma, temp).unwrap()
    }

    #[test]
    fn initial_state() {
        let c = PhysicalConstants::reference();
        let p = GaussianPacket::new(-25.0, 0.1, 1.3).unwrap();
        let s = cl_packet_state(&p, &bath(0.1, 10.0), &c, 0.0);
        assert_eq!(
            s,
            PacketStateCL {
                x_t: -25.0,
                w_t: 1.3,
                tau: 0.0
            }
        );
    }

    #[test]
    fn frictionless_limit() {
        let c = PhysicalConstants::reference();
        let p = GaussianPacket::new(25.0, 0.1, 1.0).unwrap();
        let b = bath(1e-12, 2.0);
        for &t in &[0.3, 1.0, 2.0, 7.0] {
            let s = cl_packet_state(&p, &b, &c, t);
            let q = packet_state(&p, &c, t);
            assert!((s.x_t - q.x_t).abs() < 1e-8);
            assert!((s.w_t - q.sigma_t).abs() < 1e-8);
            let xa = cl_bohmian_position(&p, &b, &c, 27.0, t);
            assert!((xa - bohmian_position(&p, &c, 27.0, t)).abs() < 1e-8);
        }
    }

    #[test]
    fn golden_width_and_centre() {
        // 40-digit evaluation of the exponential forms at γ = 0.001, T = 2, t = 2
        // for x0 = -25, p0 = 0.
        let c = PhysicalConstants::reference();
        let p = GaussianPacket::new(-25.0, 0.0, 1.0).unwrap();
        let s = cl_packet_state(&p, &bath(0.001, 2.0), &c, 2.0);
        assert!((s.w_t - GOLDEN_W).abs() < 1e-13, "{}", s.w_t);
        assert!((s.x_t - GOLDEN_X).abs() < 1e-12, "{}", s.x_t);
    }

    const GOLDEN_W: f64 = 1.420_309_392_345_515_3;
    const GOLDEN_X: f64 = -19.007_992_006_395_736;

    #[test]
    fn rearrangement_matches_exponential_form() {
        // Direct transcription with exponentials, well conditioned for γt ≳ 0.05.
        let c = PhysicalConstants::new(1.2, 0.9, 1.0, -3.0).unwrap();
        let p = GaussianPacket::new(-4.0, 0.3, 0.8).unwrap();
        for &(gamma, temp, t) in &[(0.1, 10.0, 2.0), (0.05, 3.0, 1.5), (0.3, 2.0, 4.0)] {
            let b = BathParams::new(&c, gamma, temp).unwrap();
            let d = b.diffusion();
            let tau = (1.0 - (-2.0 * gamma * t).exp()) / (2.0 * gamma);
            let x = p.x0 + p.p0 * tau / c.mass - c.gravity * (t - tau) / (2.0 * gamma);
            let e2 = (-2.0 * gamma * t).exp();
            let e4 = (-4.0 * gamma * t).exp();
            let s0 = p.sigma0;
            let w2 = s0 * s0 * (1.0 + c.hbar.powi(2) * tau * tau / (4.0 * c.mass.powi(2) * s0.powi(4)))
                - (3.0 + e4 - 4.0 * e2 - 4.0 * gamma * t) / (8.0 * c.mass.powi(2) * gamma.powi(3)) * d;
            let s = cl_packet_state(&p, &b, &c, t);
            assert!((s.x_t - x).abs() < 1e-12);
            assert!((s.w_t - w2.sqrt()).abs() < 1e-11);
            assert!((s.tau - tau).abs() < 1e-14);
        }
    }

    proptest::proptest! {
        #[test]
        fn width_grows(gamma in 0.0f64..0.5, temp in 0.0f64..20.0, t in 0.0f64..10.0, dt in 1e-3f64..1.0) {
            let c = PhysicalConstants::reference();
            let p = GaussianPacket::new(0.0, 0.0, 1.0).unwrap();
            let b = BathParams::new(&c, gamma, temp).unwrap();
            let w0 = cl_packet_state(&p, &b, &c, t).w_t;
            let w1 = cl_packet_state(&p, &b, &c, t + dt).w_t;
            proptest::prop_assert!(w1 >= w0);
            proptest::prop_assert!(w0 >= 1.0 - 1e-15);
        }
    }
}
