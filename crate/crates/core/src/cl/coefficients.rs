//! Exponent coefficients of the four Gaussian pieces of the damped density matrix.
//!
//! Each piece has the form
//! `ρ_j(r, R, t) = exp[a_j(r, t) - (R + i b_j(r, t))² / (2 w_t²)] / (√(2π) w_t)`
//! with `a_j` quadratic and `b_j` linear in `r`. The expressions below are the
//! standard exponential forms rewritten through `τ`, `ξ` and `τ₄ = (1 - e^{-4γt})/(4γ)` so
//! that the frictionless limit is evaluated without cancellation.

use super::cl_kinematics;
use crate::error::{Error, Result};
use crate::model::{BathParams, PhysicalConstants, SuperpositionSpec};
use crate::special::relaxation_fraction;
use num_complex::Complex64;

/// How the constant multiplying `k (1 - e^{-2γt}) / (2γm)` in `b_2` is read.
///
/// Only [`B2Reading::ReducedPlanck`] solves the master equation; the others
/// exist so the residual check can demonstrate that it rejects them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum B2Reading {
    #[default]
    ReducedPlanck,
    Unit,
    Planck,
}

impl B2Reading {
    fn factor(&self, hbar: f64) -> f64 {
        match self {
            B2Reading::ReducedPlanck => hbar,
            B2Reading::Unit => 1.0,
            B2Reading::Planck => 2.0 * std::f64::consts::PI * hbar,
        }
    }
}

/// `a_j` and `b_j` evaluated at one `(r, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermCoefficients {
    pub j: usize,
    pub a: Complex64,
    pub b: Complex64,
}

/// `a_j(r) = a[0] + a[1] r + a[2] r²`, `b_j(r) = b[0] + b[1] r` at fixed `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermPolynomials {
    pub a: [Complex64; 3],
    pub b: [Complex64; 2],
}

impl TermPolynomials {
    pub fn a_at(&self, r: f64) -> Complex64 {
        self.a[0] + r * (self.a[1] + r * self.a[2])
    }

    pub fn b_at(&self, r: f64) -> Complex64 {
        self.b[0] + r * self.b[1]
    }

    pub fn da(&self, r: f64) -> Complex64 {
        self.a[1] + 2.0 * r * self.a[2]
    }
}

/// Coefficient polynomials of all four pieces at time `t`.
pub(crate) fn term_polynomials(
    spec: &SuperpositionSpec,
    b: &BathParams,
    c: &PhysicalConstants,
    t: f64,
    reading: B2Reading,
) -> [TermPolynomials; 4] {
    let i = Complex64::i();
    let (m, hbar, g) = (c.mass, c.hbar, c.gravity);
    let (gamma, d) = (b.gamma(), b.diffusion());
    let (l, k, s0) = (spec.separation(), spec.kick(), spec.sigma0());
    let s2 = s0 * s0;
    let kin = cl_kinematics(gamma, d, s0, c, t);
    let (tau, xi) = (kin.tau, kin.xi);
    let tau4 = t * relaxation_fraction(4.0 * gamma * t);
    let e1 = (-2.0 * gamma * t).exp();
    let e2 = e1 * e1;
    let zero = Complex64::new(0.0, 0.0);

    let a1 = [
        zero,
        -i * m * g * tau / hbar,
        Complex64::from(-d * tau4 / (hbar * hbar) - e2 / (8.0 * s2)),
    ];
    let b1 = [
        -i * (l / 2.0 + g * xi),
        Complex64::from(-(d * tau * tau / (hbar * m) + hbar * tau * e1 / (4.0 * m * s2))),
    ];
    let t1 = TermPolynomials { a: a1, b: b1 };

    let t2 = TermPolynomials {
        a: [a1[0], a1[1] + i * k * e1, a1[2]],
        b: [b1[0] + i * (l + reading.factor(hbar) * k * tau / m), b1[1]],
    };

    let lk = Complex64::new(l, 2.0 * k * s2);
    let a3 = [
        a1[0] - Complex64::new(4.0 * k * k * s2 * s2 + l * l, 4.0 * k * l * s2) / (8.0 * s2),
        a1[1] + e1 * lk / (4.0 * s2),
        a1[2],
    ];
    let b3 = [b1[0] + lk * Complex64::new(hbar * tau / (4.0 * m * s2), 0.5), b1[1]];
    let t3 = TermPolynomials { a: a3, b: b3 };

    let t4 = TermPolynomials {
        a: [a3[0] + i * k * l, a3[1] - e1 * l / (2.0 * s2), a3[2]],
        b: [b3[0] + 2.0 * k * s2 - hbar * l * tau / (2.0 * m * s2), b3[1]],
    };
    [t1, t2, t3, t4]
}

/// `a_j(r, t)` and `b_j(r, t)` for `j ∈ {1, 2, 3, 4}`.
pub fn term_coefficients(
    j: usize,
    spec: &SuperpositionSpec,
    b: &BathParams,
    c: &PhysicalConstants,
    r: f64,
    t: f64,
) -> Result<TermCoefficients> {
    term_coefficients_with(j, spec, b, c, r, t, B2Reading::default())
}

pub fn term_coefficients_with(
    j: usize,
    spec: &SuperpositionSpec,
    b: &BathParams,
    c: &PhysicalConstants,
    r: f64,
    t: f64,
    reading: B2Reading,
) -> Result<TermCoefficients> {
    if !(1..=4).contains(&j) {
        return Err(Error::param("j", format!("term index must be 1..=4, got {j}")));
    }
    if !(t >= 0.0) {
        return Err(Error::param("t", "time must be non-negative"));
    }
    let p = term_polynomials(spec, b, c, t, reading)[j - 1];
    Ok(TermCoefficients {
        j,
        a: p.a_at(r),
        b: p.b_at(r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_superposition;

    fn i() -> Complex64 {
        Complex64::i()
    }

    /// The coefficients typed in their standard exponential form, with the `h`
    /// of `b_2` taken as `ħ`.
    fn transcribed(
        j: usize,
        spec: &SuperpositionSpec,
        bath: &BathParams,
        c: &PhysicalConstants,
        r: f64,
        t: f64,
    ) -> (Complex64, Complex64) {
        let (m, hb, g) = (c.mass, c.hbar, c.gravity);
        let (gm, d) = (bath.gamma(), bath.diffusion());
        let (l, k, s0) = (spec.separation(), spec.kick(), spec.sigma0());
        let s2 = s0 * s0;
        let ex = |y: f64| y.exp();
        let a1 = -i() * m * g * (1.0 - ex(-2.0 * gm * t)) / (2.0 * gm * hb) * r
            + ex(-4.0 * gm * t) * (-2.0 * d * s2 * (ex(4.0 * gm * t) - 1.0) - gm * hb * hb) / (8.0 * gm * hb * hb * s2)
                * r
                * r;
        let b1 = i() * (-2.0 * gm * g * t - g * ex(-2.0 * gm * t) + g - 2.0 * gm * gm * l) / (4.0 * gm * gm)
            - ex(-4.0 * gm * t) * (ex(2.0 * gm * t) - 1.0) * (2.0 * d * s2 * (ex(2.0 * gm * t) - 1.0) + gm * hb * hb)
                / (8.0 * gm * gm * hb * m * s2)
                * r;
        let a2 = a1 + i() * k * r * ex(-2.0 * gm * t);
        let b2 = b1 + i() * (l + hb * k * (1.0 - ex(-2.0 * gm * t)) / (2.0 * gm * m));
        let lk = Complex64::new(l, 2.0 * k * s2);
        let a3 = a1 - (4.0 * k * k * s2 * s2 + 4.0 * i() * k * l * s2 + l * l) / (8.0 * s2)
            + ex(-2.0 * gm * t) * lk / (4.0 * s2) * r;
        let b3 = b1
            + ex(-2.0 * gm * t) * lk * (-hb + ex(2.0 * gm * t) * (hb + 4.0 * i() * gm * m * s2)) / (8.0 * gm * m * s2);
        let a4 = a3 + l * (i() * k - ex(-2.0 * gm * t) / (2.0 * s2) * r);
        let b4 = b3 + 2.0 * k * s2 + hb * l * (ex(-2.0 * gm * t) - 1.0) / (4.0 * gm * m * s2);
        match j {
            1 => (a1, b1),
            2 => (a2, b2),
            3 => (a3, b3),
            _ => (a4, b4),
        }
    }

    #[test]
    fn matches_transcription() {
        let c = PhysicalConstants::new(1.3, 0.7, 1.1, -2.5).unwrap();
        let spec = make_superposition(12.0, 0.9, 0.4, 0.3, &c).unwrap();
        for &(gamma, temp) in &[(0.1, 10.0), (0.05, 2.0), (0.3, 1.0)] {
            let bath = BathParams::new(&c, gamma, temp).unwrap();
            for &t in &[0.5, 1.0, 2.0] {
                for &r in &[-13.0, -1.0, 0.0, 0.7, 12.0] {
                    for j in 1..=4 {
                        let tc = term_coefficients(j, &spec, &bath, &c, r, t).unwrap();
                        let (a, b) = transcribed(j, &spec, &bath, &c, r, t);
                        assert!((tc.a - a).norm() < 1e-10 * (1.0 + a.norm()), "a{j} r={r} t={t}");
                        assert!((tc.b - b).norm() < 1e-10 * (1.0 + b.norm()), "b{j} r={r} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn simple_values() {
        let c = PhysicalConstants::reference();
        let spec = make_superposition(50.0, 1.0, 0.1, 0.0, &c).unwrap();
        let bath = BathParams::new(&c, 0.001, 2.0).unwrap();
        for &t in &[0.0, 0.7, 2.0] {
            assert_eq!(
                term_coefficients(1, &spec, &bath, &c, 0.0, t).unwrap().a,
                Complex64::new(0.0, 0.0)
            );
        }
        let c1 = term_coefficients(1, &spec, &bath, &c, 0.0, 0.0).unwrap();
        let c2 = term_coefficients(2, &spec, &bath, &c, 0.0, 0.0).unwrap();
        assert_eq!(c2.a, Complex64::new(0.0, 0.0));
        assert!((c2.b - c1.b - Complex64::new(0.0, 50.0)).norm() < 1e-14);

        let c3 = term_coefficients(3, &spec, &bath, &c, 0.0, 0.0).unwrap();
        // ψ_B(x) ψ_A*(x) at x = y = R has modulus exp(-(R - L/2)²/4σ0² - (R + L/2)²/4σ0²)
        // and phase k(R - L/2); completing the square gives this constant.
        let (l, k) = (50.0, 0.1);
        let expected = -Complex64::new(4.0 * k * k + l * l, 4.0 * k * l) / 8.0;
        assert!((c3.a - expected).norm() < 1e-12);
    }

    #[test]
    fn index_out_of_range() {
        let c = PhysicalConstants::reference();
        let spec = make_superposition(50.0, 1.0, 0.1, 0.0, &c).unwrap();
        let bath = BathParams::frictionless();
        assert!(term_coefficients(0, &spec, &bath, &c, 0.0, 1.0).is_err());
        assert!(term_coefficients(5, &spec, &bath, &c, 0.0, 1.0).is_err());
    }

    #[test]
    fn readings_differ_only_in_b2() {
        let c = PhysicalConstants::new(1.0, 0.5, 1.0, -3.0).unwrap();
        let spec = make_superposition(20.0, 1.0, 0.3, 0.0, &c).unwrap();
        let bath = BathParams::new(&c, 0.01, 3.0).unwrap();
        let good = term_polynomials(&spec, &bath, &c, 1.0, B2Reading::ReducedPlanck);
        let unit = term_polynomials(&spec, &bath, &c, 1.0, B2Reading::Unit);
        for j in [0, 2, 3] {
            assert_eq!(good[j], unit[j]);
        }
        assert_ne!(good[1].b[0], unit[1].b[0]);
    }
}
