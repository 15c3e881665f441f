//! Evaluation of the damped density matrix and the local quantities built on it.

use super::coefficients::{term_polynomials, B2Reading, TermPolynomials};
use super::{cl_bohmian_position, cl_packet_state};
use crate::error::{Error, Result};
use crate::extended::GaussianTerm;
use crate::model::{BathParams, PhysicalConstants, SuperpositionSpec, TimeGrid, TimeSeries};
use crate::schrodinger::{superposition_norm, AnnotatedSeries, UNDERFLOW_THRESHOLD};
use crate::window::{overlap_window, WindowModel, DEFAULT_SUPPORT_FACTOR};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `ρ(r, R, t) = (N²/2) [ρ1 + ρ2 + e^{iα} ρ3 + e^{-iα} ρ4]` for one
/// superposition, bath and set of constants.
///
/// The `N²` factor makes the trace exactly one; for separated packets it
/// differs from one by `e^{-L²/8σ0²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClDensityMatrix {
    pub spec: SuperpositionSpec,
    pub bath: BathParams,
    pub constants: PhysicalConstants,
    pub reading: B2Reading,
}

impl ClDensityMatrix {
    pub fn new(spec: SuperpositionSpec, bath: BathParams, constants: PhysicalConstants) -> Self {
        Self {
            spec,
            bath,
            constants,
            reading: B2Reading::default(),
        }
    }

    pub fn with_reading(self, reading: B2Reading) -> Self {
        Self { reading, ..self }
    }

    /// Everything that depends on `t` alone, computed once.
    pub fn at(&self, t: f64) -> ClSnapshot {
        let terms = term_polynomials(&self.spec, &self.bath, &self.constants, t, self.reading);
        let width = cl_packet_state(self.spec.left(), &self.bath, &self.constants, t).w_t;
        let n = superposition_norm(&self.spec);
        let base = (n * n / 2.0).ln() - ((2.0 * PI).sqrt() * width).ln();
        let alpha = self.spec.alpha();
        ClSnapshot {
            t,
            terms,
            width,
            log_prefactor: [
                Complex64::new(base, 0.0),
                Complex64::new(base, 0.0),
                Complex64::new(base, alpha),
                Complex64::new(base, -alpha),
            ],
        }
    }

    pub fn value(&self, r: f64, big_r: f64, t: f64) -> Complex64 {
        self.at(t).value(r, big_r)
    }
}

/// The density matrix frozen at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClSnapshot {
    pub t: f64,
    pub terms: [TermPolynomials; 4],
    pub width: f64,
    /// Logarithm of each piece's weight times `1/(√(2π) w_t)`.
    pub log_prefactor: [Complex64; 4],
}

impl ClSnapshot {
    /// Logarithms of the four weighted pieces at `(r, R)`.
    pub fn log_terms(&self, r: f64, big_r: f64) -> [Complex64; 4] {
        let w2 = self.width * self.width;
        let i = Complex64::i();
        std::array::from_fn(|j| {
            let p = &self.terms[j];
            let z = big_r + i * p.b_at(r);
            self.log_prefactor[j] + p.a_at(r) - z * z / (2.0 * w2)
        })
    }

    pub fn value(&self, r: f64, big_r: f64) -> Complex64 {
        self.log_terms(r, big_r).iter().map(|l| l.exp()).sum()
    }

    /// `ρ(r, R) e^{-shift}`, free of underflow when `shift` tracks the size of `ρ`.
    pub fn scaled(&self, r: f64, big_r: f64, shift: f64) -> Complex64 {
        self.log_terms(r, big_r).iter().map(|l| (l - shift).exp()).sum()
    }

    /// `(m, s)` with `ρ = m e^{s}` and `|m| ≤ 4`.
    pub fn log_value(&self, r: f64, big_r: f64) -> (Complex64, f64) {
        let logs = self.log_terms(r, big_r);
        let s = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        (logs.iter().map(|l| (l - s).exp()).sum(), s)
    }

    /// `∂ρ/∂r` by differentiating each Gaussian piece.
    pub fn dr(&self, r: f64, big_r: f64) -> Complex64 {
        let w2 = self.width * self.width;
        let i = Complex64::i();
        let logs = self.log_terms(r, big_r);
        (0..4)
            .map(|j| {
                let p = &self.terms[j];
                let z = big_r + i * p.b_at(r);
                logs[j].exp() * (p.da(r) - i * z * p.b[1] / w2)
            })
            .sum()
    }

    /// Piece `j` (0-based) as `exp(c0 + c1 R + c2 R²)` at fixed `r`.
    pub fn gaussian_term(&self, j: usize, r: f64) -> GaussianTerm {
        let w2 = self.width * self.width;
        let b = self.terms[j].b_at(r);
        GaussianTerm {
            c0: self.log_prefactor[j] + self.terms[j].a_at(r) + b * b / (2.0 * w2),
            c1: -Complex64::i() * b / w2,
            c2: -1.0 / (2.0 * w2),
        }
    }

    /// `R` at which `|ρ_j(r, R)|` peaks: `Im b_j(r)`.
    pub fn term_centre(&self, j: usize, r: f64) -> f64 {
        self.terms[j].b_at(r).im
    }

    /// Logarithm of the peak of `|ρ_j(r, ·)|`.
    pub fn term_log_peak(&self, j: usize, r: f64) -> f64 {
        let w2 = self.width * self.width;
        let b = self.terms[j].b_at(r);
        self.log_prefactor[j].re + self.terms[j].a_at(r).re + b.re * b.re / (2.0 * w2)
    }

    /// `ρ(r1, R1) / ρ(r0, R0)`, refusing denominators below the underflow threshold.
    pub(crate) fn ratio(&self, num: (f64, f64), den: (f64, f64)) -> Result<Complex64> {
        let (dm, ds) = self.log_value(den.0, den.1);
        let log_den = dm.norm().ln() + ds;
        if !(log_den >= UNDERFLOW_THRESHOLD.ln()) {
            return Err(Error::Domain(format!(
                "density {:e} underflows at r = {}, R = {}, t = {}",
                log_den.exp(),
                den.0,
                den.1,
                self.t
            )));
        }
        Ok(self.scaled(num.0, num.1, ds) / dm)
    }
}

#[allow(non_snake_case)]
pub fn density_matrix_rR(
    spec: &SuperpositionSpec,
    b: &BathParams,
    c: &PhysicalConstants,
    r: f64,
    big_r: f64,
    t: f64,
) -> Complex64 {
    ClDensityMatrix::new(*spec, *b, *c).value(r, big_r, t)
}

/// Diagonal `ρ(x, x, t)`.
pub fn cl_density(spec: &SuperpositionSpec, b: &BathParams, c: &PhysicalConstants, x: f64, t: f64) -> f64 {
    density_matrix_rR(spec, b, c, 0.0, x, t).re
}

/// `j(x, t) = (ħ/m) Im ∂ρ/∂r` at `r = 0, R = x`.
pub fn cl_current(spec: &SuperpositionSpec, b: &BathParams, c: &PhysicalConstants, x: f64, t: f64) -> f64 {
    let snap = ClDensityMatrix::new(*spec, *b, *c).at(t);
    c.hbar / c.mass * snap.dr(0.0, x).im
}

/// `𝒯_L(x, t) = ρ(x + L, x, t) / ρ(x, x, t)`.
pub fn local_translation(
    spec: &SuperpositionSpec,
    b: &BathParams,
    c: &PhysicalConstants,
    x: f64,
    t: f64,
) -> Result<Complex64> {
    let l = spec.separation();
    ClDensityMatrix::new(*spec, *b, *c)
        .at(t)
        .ratio((l, x + l / 2.0), (0.0, x))
}

/// `Re{[ρ(x + L, x) + ρ(x - L, x)] / (2 ρ(x, x))}`.
pub fn cl_local_modular(
    spec: &SuperpositionSpec,
    b: &BathParams,
    c: &PhysicalConstants,
    x: f64,
    t: f64,
) -> Result<f64> {
    local_modular_in(&ClDensityMatrix::new(*spec, *b, *c).at(t), spec.separation(), x)
}

fn local_modular_in(snap: &ClSnapshot, l: f64, x: f64) -> Result<f64> {
    let plus = snap.ratio((l, x + l / 2.0), (0.0, x))?;
    let minus = snap.ratio((-l, x - l / 2.0), (0.0, x))?;
    Ok(0.5 * (plus + minus).re)
}

/// Local modular value along the damped Bohmian trajectory of the left packet.
pub fn cl_local_modular_on_trajectory(
    spec: &SuperpositionSpec,
    b: &BathParams,
    c: &PhysicalConstants,
    x_start: f64,
    grid: &TimeGrid,
) -> Result<AnnotatedSeries> {
    let mut warnings = Vec::new();
    let offset = (x_start - spec.left().x0) / spec.sigma0();
    if offset.abs() > DEFAULT_SUPPORT_FACTOR {
        warnings.push(format!(
            "X0 = {x_start} lies {offset:.3} widths from the left packet centre, outside its support"
        ));
    }
    if let Ok(w) = overlap_window(&WindowModel::CaldeiraLeggett(*b), spec, c, DEFAULT_SUPPORT_FACTOR) {
        if grid.end() > w.t_max {
            warnings.push(format!("grid extends past the non-overlap window t_max = {}", w.t_max));
        }
    }
    let rho = ClDensityMatrix::new(*spec, *b, *c);
    let mut series = TimeSeries::new(
        format!("cl X0={x_start}"),
        format!(
            "local cos(pL/hbar) on damped trajectory; gamma={} T={} alpha={} L={} k={} sigma0={} g={}",
            b.gamma(),
            b.temperature(),
            spec.alpha(),
            spec.separation(),
            spec.kick(),
            spec.sigma0(),
            c.gravity
        ),
    );
    for t in grid.times() {
        let x = cl_bohmian_position(spec.left(), b, c, x_start, t);
        series
            .samples
            .push((t, local_modular_in(&rho.at(t), spec.separation(), x)?));
    }
    Ok(AnnotatedSeries { series, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_superposition, reference_superposition};
    use crate::schrodinger::{local_modular_closed, superposed_amplitude};
    use std::f64::consts::FRAC_PI_4;

    fn bath(gamma: f64, temp: f64) -> BathParams {
        BathParams::new(&PhysicalConstants::reference(), gamma, temp).unwrap()
    }

    /// `Ψ(x) Ψ*(y)` from the unitary closed form.
    fn pure(spec: &SuperpositionSpec, c: &PhysicalConstants, r: f64, big_r: f64, t: f64) -> Complex64 {
        superposed_amplitude(spec, c, big_r + r / 2.0, t) * superposed_amplitude(spec, c, big_r - r / 2.0, t).conj()
    }

    #[test]
    fn initial_condition_on_grid() {
        // Small separation so every piece is visible on the grid.
        let c = PhysicalConstants::new(1.0, 0.8, 1.0, -3.0).unwrap();
        let spec = make_superposition(6.0, 1.0, 0.4, 0.9, &c).unwrap();
        let b = BathParams::new(&c, 0.1, 10.0).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=40 {
            for k in 0..=40 {
                let r = -12.0 + 0.6 * i as f64;
                let big_r = -9.0 + 0.45 * k as f64;
                let d = density_matrix_rR(&spec, &b, &c, r, big_r, 0.0) - pure(&spec, &c, r, big_r, 0.0);
                worst = worst.max(d.norm());
            }
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn frictionless_limit_is_pure_evolution() {
        let c = PhysicalConstants::new(1.0, 0.8, 1.0, -3.0).unwrap();
        let spec = make_superposition(6.0, 1.0, 0.4, 0.9, &c).unwrap();
        let b = BathParams::new(&c, 1e-13, 0.0).unwrap();
        for &t in &[0.5, 2.0] {
            for &(r, big_r) in &[(0.0, -3.0), (6.0, 0.5), (-5.5, 1.0), (1.0, 4.0)] {
                let d = density_matrix_rR(&spec, &b, &c, r, big_r, t) - pure(&spec, &c, r, big_r, t);
                assert!(d.norm() < 1e-8, "t={t} r={r} R={big_r}: {d}");
            }
        }
    }

    #[test]
    fn hermitian_on_random_points() {
        let c = PhysicalConstants::reference();
        let spec = reference_superposition(0.4);
        let rho = ClDensityMatrix::new(spec, bath(0.1, 10.0), c);
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let t = 2.0 * next();
            let r = 120.0 * (next() - 0.5);
            let big_r = -35.0 + 70.0 * next();
            let s = rho.at(t);
            let d = s.value(-r, big_r) - s.value(r, big_r).conj();
            assert!(d.norm() < 1e-10);
        }
    }

    #[test]
    fn diagonal_is_gaussian_pair() {
        let c = PhysicalConstants::reference();
        let spec = reference_superposition(0.0);
        let b = bath(0.001, 2.0);
        let s = cl_packet_state(spec.left(), &b, &c, 1.5);
        let peak = cl_density(&spec, &b, &c, s.x_t, 1.5);
        assert!((peak - 0.5 / ((2.0 * PI).sqrt() * s.w_t)).abs() < 1e-14);
    }

    #[test]
    fn current_of_resting_packets_vanishes_initially() {
        let c = PhysicalConstants::reference();
        let spec = make_superposition(50.0, 1.0, 0.0, 0.0, &c).unwrap();
        for &x in &[-27.0, -25.0, -20.0, 25.0, 26.0] {
            assert!(cl_current(&spec, &bath(0.1, 10.0), &c, x, 0.0).abs() < 1e-16);
        }
    }

    #[test]
    fn analytic_current_matches_differences() {
        let c = PhysicalConstants::reference();
        let spec = reference_superposition(0.3);
        let b = bath(0.1, 10.0);
        let snap = ClDensityMatrix::new(spec, b, c).at(1.2);
        for &x in &[-22.0, -20.5, -18.0, 27.0] {
            // Richardson-extrapolated central difference in r.
            let d = |h: f64| (snap.value(h, x) - snap.value(-h, x)) / (2.0 * h);
            let h = 1e-3;
            let rich = (4.0 * d(h / 2.0) - d(h)) / 3.0;
            let fd = c.hbar / c.mass * rich.im;
            let an = cl_current(&spec, &b, &c, x, 1.2);
            assert!((fd - an).abs() < 1e-8, "x={x}: {fd} vs {an}");
        }
    }

    #[test]
    fn continuity() {
        let c = PhysicalConstants::reference();
        let spec = reference_superposition(0.3);
        let b = bath(0.1, 10.0);
        let h = 1e-4;
        for &(x, t) in &[(-22.0, 0.5), (-20.0, 1.5), (27.0, 1.0), (-23.5, 1.9)] {
            let drho = (cl_density(&spec, &b, &c, x, t + h) - cl_density(&spec, &b, &c, x, t - h)) / (2.0 * h);
            let dj = (cl_current(&spec, &b, &c, x + h, t) - cl_current(&spec, &b, &c, x - h, t)) / (2.0 * h);
            assert!((drho + dj).abs() < 1e-6, "x={x} t={t}: {}", drho + dj);
        }
    }

    #[test]
    fn local_quantities_blind_to_phase() {
        let c = PhysicalConstants::reference();
        let b = bath(0.001, 2.0);
        let a = reference_superposition(0.0);
        let p = reference_superposition(PI);
        for &x in &[-25.0, -21.0, 0.0, 26.0] {
            for &t in &[0.0, 1.0, 2.0] {
                assert!((cl_density(&a, &b, &c, x, t) - cl_density(&p, &b, &c, x, t)).abs() < 1e-12);
                assert!((cl_current(&a, &b, &c, x, t) - cl_current(&p, &b, &c, x, t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn translation_golden_and_phase_shift() {
        let c = PhysicalConstants::reference();
        let spec = make_superposition(50.0, 1.0, 0.0, 0.0, &c).unwrap();
        let b = bath(0.001, 2.0);
        // k = 0, α = 0: the right packet is the left one moved by L, so
        // ρ0(x + L, x) / ρ0(x, x) = ψ_B(x + L) / ψ_A(x) = 1 at every x.
        for &x in &[-25.0, -24.0, -27.5] {
            let v = local_translation(&spec, &b, &c, x, 0.0).unwrap();
            let raw = pure(&spec, &c, 50.0, x + 25.0, 0.0) / pure(&spec, &c, 0.0, x, 0.0);
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert!((v - raw).norm() < 1e-12);
        }

        let s1 = reference_superposition(0.2);
        let s2 = reference_superposition(0.2 + 1.1);
        let t1 = local_translation(&s1, &b, &c, -23.0, 1.3).unwrap();
        let t2 = local_translation(&s2, &b, &c, -23.0, 1.3).unwrap();
        assert!(((t2 / t1).arg() - 1.1).abs() < 1e-10);
        assert!(matches!(
            local_translation(&s1, &b, &c, 500.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn translation_modulus_decays() {
        let c = PhysicalConstants::reference();
        let spec = reference_superposition(0.0);
        let b = bath(0.005, 15.0);
        let mut prev = f64::INFINITY;
        for i in 0..=20 {
            let t = 0.1 * i as f64;
            let x = cl_packet_state(spec.left(), &b, &c, t).x_t;
            let m = local_translation(&spec, &b, &c, x, t).unwrap().norm();
            assert!(m < prev);
            prev = m;
        }
    }

    #[test]
    fn local_value_frictionless_limit() {
        let c = PhysicalConstants::reference();
        let spec = reference_superposition(FRAC_PI_4);
        let b = bath(1e-12, 2.0);
        let grid = TimeGrid::new(0.0, 2.0, 21).unwrap();
        for &x0 in &[-27.0, -25.0, -23.0] {
            let out = cl_local_modular_on_trajectory(&spec, &b, &c, x0, &grid).unwrap();
            for &(t, v) in &out.series.samples {
                assert!((v - local_modular_closed(&spec, &c, x0, t)).abs() < 1e-6);
            }
        }
    }
}
