//! Physical parameters, the two-packet initial state, and time grids.
//!
//! Units are whatever the caller chooses; the reference configuration uses
//! `m = ħ = k_B = 1` with `g = -3`, which accelerates packets toward `+x`.

use crate::error::{Error, Result};
use crate::special::relaxation_fraction;
use std::fmt;

/// Factor by which `k_B T` must exceed `ħ γ` before the high-temperature
/// master equation is considered trustworthy.
pub const REGIME_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub mass: f64,
    pub hbar: f64,
    pub boltzmann: f64,
    /// Signed field strength; the potential is `m g x`.
    pub gravity: f64,
}

impl PhysicalConstants {
    pub fn new(mass: f64, hbar: f64, boltzmann: f64, gravity: f64) -> Result<Self> {
        positive("mass", mass)?;
        positive("hbar", hbar)?;
        positive("boltzmann", boltzmann)?;
        if !gravity.is_finite() {
            return Err(Error::param("gravity", "must be finite"));
        }
        Ok(Self {
            mass,
            hbar,
            boltzmann,
            gravity,
        })
    }

    /// `m = ħ = k_B = 1`, `g = -3`.
    pub fn reference() -> Self {
        Self {
            mass: 1.0,
            hbar: 1.0,
            boltzmann: 1.0,
            gravity: -3.0,
        }
    }

    pub fn with_gravity(self, gravity: f64) -> Self {
        Self { gravity, ..self }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::reference()
    }
}

/// Environment of the damped dynamics. The diffusion coefficient is derived
/// once at construction so it always equals `2 m γ k_B T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    gamma: f64,
    temperature: f64,
    diffusion: f64,
}

impl BathParams {
    pub fn new(constants: &PhysicalConstants, gamma: f64, temperature: f64) -> Result<Self> {
        let diffusion = diffusion_coefficient(constants, gamma, temperature)?;
        Ok(Self {
            gamma,
            temperature,
            diffusion,
        })
    }

    /// No friction, no diffusion: the unitary limit.
    pub fn frictionless() -> Self {
        Self {
            gamma: 0.0,
            temperature: 0.0,
            diffusion: 0.0,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }
}

/// `D = 2 m γ k_B T`.
pub fn diffusion_coefficient(c: &PhysicalConstants, gamma: f64, temperature: f64) -> Result<f64> {
    non_negative("gamma", gamma)?;
    non_negative("temperature", temperature)?;
    Ok(2.0 * c.mass * gamma * c.boltzmann * temperature)
}

/// Friction-rescaled time `τ(t) = (1 - e^{-2γt}) / (2γ)`.
///
/// Uses a cubic Taylor series for `γt < 1e-4` and returns `t` exactly when
/// `γ = 0`.
pub fn scaled_time_tau(gamma: f64, t: f64) -> f64 {
    t * relaxation_fraction(2.0 * gamma * t)
}

/// A warning that the bath parameters leave the high-temperature regime.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeWarning {
    pub thermal_energy: f64,
    pub damping_energy: f64,
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k_B T = {} is not much larger than hbar*gamma = {} (factor {} required)",
            self.thermal_energy, self.damping_energy, REGIME_FACTOR
        )
    }
}

/// Check `k_B T ≫ ħ γ`, read as a factor of [`REGIME_FACTOR`].
///
/// Only the high-temperature condition is checked. The oscillator frequency
/// and bath cutoff of the microscopic derivation play no role in the free
/// particle in a linear field, so nothing here refers to them.
pub fn validate_regime(c: &PhysicalConstants, b: &BathParams) -> Vec<RegimeWarning> {
    let thermal = c.boltzmann * b.temperature;
    let damping = c.hbar * b.gamma;
    if thermal < REGIME_FACTOR * damping {
        vec![RegimeWarning {
            thermal_energy: thermal,
            damping_energy: damping,
        }]
    } else {
        Vec::new()
    }
}

/// Initial data of one Gaussian component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub x0: f64,
    pub p0: f64,
    pub sigma0: f64,
}

impl GaussianPacket {
    pub fn new(x0: f64, p0: f64, sigma0: f64) -> Result<Self> {
        positive("sigma0", sigma0)?;
        if !x0.is_finite() || !p0.is_finite() {
            return Err(Error::param("x0/p0", "must be finite"));
        }
        Ok(Self { x0, p0, sigma0 })
    }
}

/// Two equal-width packets at `∓L/2`; only the right one carries momentum
/// `ħk`, and it enters with relative phase `e^{iα}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionSpec {
    left: GaussianPacket,
    right: GaussianPacket,
    separation: f64,
    kick: f64,
    alpha: f64,
}

impl SuperpositionSpec {
    pub fn left(&self) -> &GaussianPacket {
        &self.left
    }

    pub fn right(&self) -> &GaussianPacket {
        &self.right
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn kick(&self) -> f64 {
        self.kick
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma0(&self) -> f64 {
        self.left.sigma0
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..*self }
    }
}

pub fn make_superposition(
    separation: f64,
    sigma0: f64,
    kick: f64,
    alpha: f64,
    c: &PhysicalConstants,
) -> Result<SuperpositionSpec> {
    positive("separation", separation)?;
    positive("sigma0", sigma0)?;
    if !kick.is_finite() || !alpha.is_finite() {
        return Err(Error::param("kick/alpha", "must be finite"));
    }
    Ok(SuperpositionSpec {
        left: GaussianPacket::new(-separation / 2.0, 0.0, sigma0)?,
        right: GaussianPacket::new(separation / 2.0, c.hbar * kick, sigma0)?,
        separation,
        kick,
        alpha,
    })
}

/// Reference superposition: `L = 50`, `σ0 = 1`, `k = 0.1`.
pub fn reference_superposition(alpha: f64) -> SuperpositionSpec {
    make_superposition(50.0, 1.0, 0.1, alpha, &PhysicalConstants::reference()).expect("reference parameters are valid")
}

/// Damped or undamped evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Framework {
    Schrodinger,
    CaldeiraLeggett,
}

impl Framework {
    pub fn name(&self) -> &'static str {
        match self {
            Framework::Schrodinger => "schrodinger",
            Framework::CaldeiraLeggett => "cl",
        }
    }
}

/// Uniformly spaced sample times, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    start: f64,
    end: f64,
    samples: usize,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, samples: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || start > end {
            return Err(Error::param("time grid", "need finite start <= end"));
        }
        if samples < 2 {
            return Err(Error::param("samples", "at least two samples required"));
        }
        Ok(Self { start, end, samples })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn len(&self) -> usize {
        self.samples
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.end - self.start) / (self.samples - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i + 1 == self.samples {
            self.end
        } else {
            self.start + (self.end - self.start) * i as f64 / (self.samples - 1) as f64
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples).map(move |i| self.time(i))
    }
}

/// A result that is only trustworthy under a condition the caller may have
/// violated, such as evaluating a closed form outside the non-overlap window.
#[derive(Debug, Clone, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub note: Option<String>,
}

impl<T> Flagged<T> {
    pub fn exact(value: T) -> Self {
        Self { value, note: None }
    }

    pub fn approximate(value: T, note: impl Into<String>) -> Self {
        Self {
            value,
            note: Some(note.into()),
        }
    }

    pub fn is_approximate(&self) -> bool {
        self.note.is_some()
    }
}

/// Ordered `(t, value)` samples with a description of what produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub label: String,
    pub provenance: String,
    pub samples: Vec<(f64, f64)>,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, provenance: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            provenance: provenance.into(),
            samples: Vec::new(),
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {v}")))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be non-negative and finite, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn superposition_layout() {
        let c = PhysicalConstants::reference();
        let s = make_superposition(50.0, 1.0, 0.1, 0.0, &c).unwrap();
        assert_eq!(s.left().x0, -25.0);
        assert_eq!(s.right().x0, 25.0);
        assert_eq!(s.left().p0, 0.0);
        assert_eq!(s.right().p0, 0.1);
        assert_eq!(s.left().sigma0, s.right().sigma0);

        let s = make_superposition(50.0, 1.0, 0.0, 0.0, &c).unwrap();
        assert_eq!(s.right().p0, 0.0);
        let s = make_superposition(50.0, 1.0, 0.1, PI, &c).unwrap();
        assert_eq!(s.alpha(), PI);
    }

    #[test]
    fn superposition_rejects_bad_geometry() {
        let c = PhysicalConstants::reference();
        assert!(make_superposition(0.0, 1.0, 0.1, 0.0, &c).is_err());
        assert!(make_superposition(-3.0, 1.0, 0.1, 0.0, &c).is_err());
        assert!(make_superposition(50.0, 0.0, 0.1, 0.0, &c).is_err());
    }

    #[test]
    fn diffusion_values() {
        let c = PhysicalConstants::reference();
        let d = diffusion_coefficient(&c, 0.001, 2.0).unwrap();
        assert!((d / (2.0 * 0.001) - 2.0).abs() < 1e-15);
        assert!((d - 0.004).abs() < 1e-18);
        assert!((diffusion_coefficient(&c, 0.005, 15.0).unwrap() - 0.15).abs() < 1e-16);
        assert_eq!(diffusion_coefficient(&c, 0.0, 7.0).unwrap(), 0.0);
        assert!(diffusion_coefficient(&c, -0.1, 2.0).is_err());
        assert!(diffusion_coefficient(&c, 0.1, -2.0).is_err());
    }

    #[test]
    fn diffusion_is_linear_in_each_factor() {
        let base = PhysicalConstants::new(1.3, 0.7, 0.9, -3.0).unwrap();
        let d0 = diffusion_coefficient(&base, 0.02, 4.0).unwrap();
        let twice_m = PhysicalConstants { mass: 2.6, ..base };
        let twice_kb = PhysicalConstants { boltzmann: 1.8, ..base };
        let close = |a: f64| (a / d0 - 2.0).abs() < 1e-14;
        assert!(close(diffusion_coefficient(&twice_m, 0.02, 4.0).unwrap()));
        assert!(close(diffusion_coefficient(&twice_kb, 0.02, 4.0).unwrap()));
        assert!(close(diffusion_coefficient(&base, 0.04, 4.0).unwrap()));
        assert!(close(diffusion_coefficient(&base, 0.02, 8.0).unwrap()));
    }

    #[test]
    fn tau_values() {
        assert_eq!(scaled_time_tau(0.3, 0.0), 0.0);
        assert_eq!(scaled_time_tau(0.0, 2.0), 2.0);
        // (1 - e^{-0.004}) / 0.002 to 30 digits: 1.99600532800426382...
        let expected = 1.996_005_328_004_263_8;
        assert!((scaled_time_tau(0.001, 2.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn tau_matches_integrated_rate() {
        // dτ/dt = e^{-2γt}: Simpson integration as an independent route.
        let gamma = 0.07;
        let t = 3.0;
        let n = 2000;
        let h = t / n as f64;
        let f = |s: f64| (-2.0 * gamma * s).exp();
        let mut sum = f(0.0) + f(t);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(i as f64 * h);
        }
        let simpson = sum * h / 3.0;
        assert!((scaled_time_tau(gamma, t) - simpson).abs() < 1e-12);
    }

    #[test]
    fn regime_warnings() {
        let c = PhysicalConstants::reference();
        let ok = BathParams::new(&c, 0.1, 2.0).unwrap();
        assert!(validate_regime(&c, &ok).is_empty());
        let cold = BathParams::new(&c, 0.1, 0.0).unwrap();
        assert_eq!(validate_regime(&c, &cold).len(), 1);
        let hot = BathParams::new(&c, 0.005, 15.0).unwrap();
        assert!(validate_regime(&c, &hot).is_empty());
    }

    #[test]
    fn time_grid_endpoints() {
        let g = TimeGrid::new(0.0, 2.0, 201).unwrap();
        let ts: Vec<f64> = g.times().collect();
        assert_eq!(ts.len(), 201);
        assert_eq!(ts[0], 0.0);
        assert_eq!(ts[200], 2.0);
        assert!((g.step() - 0.01).abs() < 1e-16);
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(1.0, 0.0, 5).is_err());
    }

    proptest::proptest! {
        #[test]
        fn tau_monotone_and_bounded(gamma in 1e-6f64..1.0, t in 0.0f64..50.0, dt in 1e-6f64..1.0) {
            let a = scaled_time_tau(gamma, t);
            let b = scaled_time_tau(gamma, t + dt);
            proptest::prop_assert!(b >= a * (1.0 - 4.0 * f64::EPSILON));
            if 2.0 * gamma * t < 20.0 {
                proptest::prop_assert!(b > a);
                proptest::prop_assert!(a < 1.0 / (2.0 * gamma));
            }
            // Saturated values may round a few ulps either side of the bound.
            proptest::prop_assert!(a <= t * (1.0 + 4.0 * f64::EPSILON));
            proptest::prop_assert!(a <= (1.0 + 4.0 * f64::EPSILON) / (2.0 * gamma));
        }

        #[test]
        fn superposition_round_trips(l in 0.1f64..500.0, k in -3.0f64..3.0, alpha in -10.0f64..10.0) {
            let c = PhysicalConstants::reference();
            let s = make_superposition(l, 1.0, k, alpha, &c).unwrap();
            proptest::prop_assert_eq!(s.separation(), l);
            proptest::prop_assert_eq!(s.kick(), k);
            proptest::prop_assert_eq!(s.alpha(), alpha);
        }
    }
}
