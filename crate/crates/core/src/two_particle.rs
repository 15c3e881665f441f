//! Two-particle modular expectation values: quantum statistics of the
//! initial state and the reduced signal under a bath shared by both particles.
//!
//! Packets follow the convention of [`crate::schrodinger`]: a packet centred
//! at `x0` with momentum `p0` is
//! `(2πσ²)^{-1/4} exp[-(x - x0)²/(4σ²) + i p0 (x - x0)/ħ]`.

use crate::cl::ModularParts;
use crate::error::{Error, Result};
use crate::model::{BathParams, Flagged, GaussianPacket, PhysicalConstants, SuperpositionSpec};
use crate::special::relaxation_fraction;
use crate::window::{overlap_window, WindowModel, DEFAULT_SUPPORT_FACTOR};
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Largest `|⟨ψ_A|ψ_B⟩|` accepted as "non-overlapping".
pub const OVERLAP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatisticsKind {
    /// Distinguishable particles.
    MB,
    /// Symmetrised state.
    BE,
    /// Antisymmetrised state.
    FD,
}

impl StatisticsKind {
    fn sign(&self) -> Result<f64> {
        match self {
            StatisticsKind::BE => Ok(1.0),
            StatisticsKind::FD => Ok(-1.0),
            StatisticsKind::MB => Err(Error::param(
                "statistics",
                "distinguishable particles need no symmetrisation",
            )),
        }
    }
}

/// The state `χ` of the second particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompanionState {
    Packet(GaussianPacket),
    EqualsA,
    EqualsB,
    /// Localized far from both branches and from their translates by `L`:
    /// every matrix element coupling `χ` to them is exactly zero.
    Disjoint,
}

impl CompanionState {
    fn packet(&self, spec: &SuperpositionSpec) -> Option<GaussianPacket> {
        match self {
            CompanionState::Packet(p) => Some(*p),
            CompanionState::EqualsA => Some(*spec.left()),
            CompanionState::EqualsB => Some(*spec.right()),
            CompanionState::Disjoint => None,
        }
    }
}

/// `⟨ψ_A|ψ_B⟩` in closed form, for any pair of widths.
pub fn gaussian_overlap(pa: &GaussianPacket, pb: &GaussianPacket, c: &PhysicalConstants) -> Complex64 {
    let (s1, s2) = (pa.sigma0, pb.sigma0);
    let d = pb.x0 - pa.x0;
    let dk = (pb.p0 - pa.p0) / c.hbar;
    // With u = x - x_A the exponent is -a u² + b u + e.
    let a = 1.0 / (4.0 * s1 * s1) + 1.0 / (4.0 * s2 * s2);
    let b = Complex64::new(d / (2.0 * s2 * s2), dk);
    let e = Complex64::new(-d * d / (4.0 * s2 * s2), -pb.p0 * d / c.hbar);
    let norm = (4.0 * PI * PI * s1 * s1 * s2 * s2).powf(-0.25);
    norm * (PI / a).sqrt() * (b * b / (4.0 * a) + e).exp()
}

/// `⟨ψ_A|e^{ip̂ℓ/ħ}|ψ_B⟩ = ∫ ψ_A*(x) ψ_B(x + ℓ) dx`.
pub fn translated_matrix_element(
    pa: &GaussianPacket,
    pb: &GaussianPacket,
    ell: f64,
    c: &PhysicalConstants,
) -> Complex64 {
    // Translating a packet moves its centre and, with the phase referred to
    // the centre, nothing else.
    let moved = GaussianPacket { x0: pb.x0 - ell, ..*pb };
    gaussian_overlap(pa, &moved, c)
}

fn check_separated(spec: &SuperpositionSpec, c: &PhysicalConstants) -> Result<()> {
    let overlap = gaussian_overlap(spec.left(), spec.right(), c).norm();
    if overlap < OVERLAP_TOLERANCE {
        Ok(())
    } else {
        Err(Error::param(
            "spec",
            format!("branches overlap: |<psi_A|psi_B>| = {overlap:e} is not below {OVERLAP_TOLERANCE:e}"),
        ))
    }
}

/// `⟨e^{ip̂₁L/ħ}⟩ = ½ e^{iα} ⟨ψ_A|e^{ip̂L/ħ}|ψ_B⟩` for distinguishable particles.
pub fn modular_mb(spec: &SuperpositionSpec, c: &PhysicalConstants) -> Result<Complex64> {
    check_separated(spec, c)?;
    let m = translated_matrix_element(spec.left(), spec.right(), spec.separation(), c);
    Ok(0.5 * Complex64::from_polar(1.0, spec.alpha()) * m)
}

/// `√2 ⟨χ|Φ⟩ = ⟨χ|ψ_A⟩ + e^{iα}⟨χ|ψ_B⟩`, zero for a disjoint companion.
fn companion_projection(spec: &SuperpositionSpec, chi: &CompanionState, c: &PhysicalConstants) -> Complex64 {
    match chi.packet(spec) {
        Some(p) => {
            gaussian_overlap(&p, spec.left(), c)
                + Complex64::from_polar(1.0, spec.alpha()) * gaussian_overlap(&p, spec.right(), c)
        }
        None => Complex64::new(0.0, 0.0),
    }
}

/// `N_± = [2 ± |⟨χ|ψ_A⟩ + e^{iα}⟨χ|ψ_B⟩|²]^{-1/2}`.
pub fn indistinguishable_norm(
    spec: &SuperpositionSpec,
    chi: &CompanionState,
    s: StatisticsKind,
    c: &PhysicalConstants,
) -> Result<f64> {
    let sign = s.sign()?;
    let n2 = 2.0 + sign * companion_projection(spec, chi, c).norm_sqr();
    if !(n2 > 0.0) {
        return Err(Error::Domain(format!(
            "the antisymmetrised state vanishes (norm² = {n2:e})"
        )));
    }
    Ok(n2.powf(-0.5))
}

/// `⟨e^{ip̂L/ħ}⟩` in the one-particle reduced state of a (anti)symmetrised pair.
///
/// With `Φ = (ψ_A + e^{iα}ψ_B)/√2` the reduced state is
/// `N²[|Φ⟩⟨Φ| + |χ⟩⟨χ| ± (⟨Φ|χ⟩ |Φ⟩⟨χ| + ⟨χ|Φ⟩ |χ⟩⟨Φ|)]`. The exchange
/// terms are Hermitian conjugates as operators; since `e^{ip̂L/ħ}` is not
/// Hermitian their traces against it are not complex conjugates of each
/// other, so each is evaluated separately. Every matrix element is kept,
/// including the ones the separation makes negligible.
pub fn modular_indistinguishable(
    spec: &SuperpositionSpec,
    chi: &CompanionState,
    s: StatisticsKind,
    c: &PhysicalConstants,
) -> Result<Complex64> {
    if s == StatisticsKind::MB {
        return modular_mb(spec, c);
    }
    check_separated(spec, c)?;
    let sign = s.sign()?;
    let norm = indistinguishable_norm(spec, chi, s, c)?;
    let l = spec.separation();
    let (a, b) = (spec.left(), spec.right());
    let phase = Complex64::from_polar(1.0, spec.alpha());
    let u = |p: &GaussianPacket, q: &GaussianPacket| translated_matrix_element(p, q, l, c);

    let phi_phi = 0.5 * (u(a, a) + phase * u(a, b) + phase.conj() * u(b, a) + u(b, b));
    let mut value = phi_phi;
    if let Some(x) = chi.packet(spec) {
        let chi_phi = FRAC_1_SQRT_2 * companion_projection(spec, chi, c);
        // ⟨χ|U|Φ⟩ and ⟨Φ|U|χ⟩.
        let chi_u_phi = FRAC_1_SQRT_2 * (u(&x, a) + phase * u(&x, b));
        let phi_u_chi = FRAC_1_SQRT_2 * (u(a, &x) + phase.conj() * u(b, &x));
        value += u(&x, &x) + sign * (chi_phi.conj() * chi_u_phi + chi_phi * phi_u_chi);
    }
    Ok(norm * norm * value)
}

/// The magnitude `e^{-L²/8σ0²}` that bounds the modular signal of the
/// second particle when it starts in `ψ_A`.
pub fn second_particle_bound(spec: &SuperpositionSpec) -> f64 {
    let (l, s0) = (spec.separation(), spec.sigma0());
    (-l * l / (8.0 * s0 * s0)).exp()
}

/// `⟨ψ_A|e^{ip̂L/ħ}|ψ_A⟩`, the kernel behind the second particle's signal.
pub fn second_particle_cross_term(spec: &SuperpositionSpec, c: &PhysicalConstants) -> Complex64 {
    translated_matrix_element(spec.left(), spec.left(), spec.separation(), c)
}

/// Envelope and phase of `⟨cos(p̂₁L/ħ) ⊗ 𝟙⟩` under a shared bath:
/// log-envelope `ln ½ - D L² τ₈/ħ² - L² γ² τ₄²/σ0² - k²σ0²/2` and phase
/// `α - L (kγ + mg/ħ) τ₄`, with `τ_n = (1 - e^{-nγt})/(nγ)`.
pub fn common_bath_parts(spec: &SuperpositionSpec, b: &BathParams, c: &PhysicalConstants, t: f64) -> ModularParts {
    let (gamma, d) = (b.gamma(), b.diffusion());
    let (l, k, s0) = (spec.separation(), spec.kick(), spec.sigma0());
    let tau4 = t * relaxation_fraction(4.0 * gamma * t);
    let tau8 = t * relaxation_fraction(8.0 * gamma * t);
    let log_envelope = 0.5f64.ln()
        - d * l * l * tau8 / (c.hbar * c.hbar)
        - l * l * gamma * gamma * tau4 * tau4 / (s0 * s0)
        - k * k * s0 * s0 / 2.0;
    let phase = spec.alpha() - l * (k * gamma + c.mass * c.gravity / c.hbar) * tau4;
    ModularParts { log_envelope, phase }
}

/// Reduced modular signal of the first particle under a shared bath, flagged
/// outside the non-overlap window.
pub fn reduced_modular_common_bath(
    spec: &SuperpositionSpec,
    b: &BathParams,
    c: &PhysicalConstants,
    t: f64,
) -> Flagged<f64> {
    let value = common_bath_parts(spec, b, c, t).value();
    match overlap_window(&WindowModel::CommonBath(*b), spec, c, DEFAULT_SUPPORT_FACTOR) {
        Ok(w) if t <= w.t_max => Flagged::exact(value),
        Ok(w) => Flagged::approximate(
            value,
            format!("t = {t} is past the two-particle window t_max = {}", w.t_max),
        ),
        Err(e) => Flagged::approximate(value, e.to_string()),
    }
}

/// Early-time form `𝒜(t) cos(α - ω0 t)` of the shared-bath signal, with
/// `𝒜(t) = prefactor · exp(-linear_rate t - quadratic_rate t²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarlyTimeModel {
    pub prefactor: f64,
    pub linear_rate: f64,
    /// `L²γ(γ/σ0² + 4D/ħ²)`, the commonly quoted rate.
    pub quadratic_rate: f64,
    /// `L²γ(γ/σ0² - 4D/ħ²)`, the second-order Taylor coefficient of the
    /// exact log-envelope.
    pub taylor_quadratic_rate: f64,
    pub omega0: f64,
    pub alpha: f64,
}

impl EarlyTimeModel {
    pub fn envelope(&self, t: f64) -> f64 {
        self.prefactor * (-self.linear_rate * t - self.quadratic_rate * t * t).exp()
    }

    pub fn phase_shift(&self, t: f64) -> f64 {
        -self.omega0 * t
    }

    pub fn value(&self, t: f64) -> f64 {
        self.envelope(t) * (self.alpha + self.phase_shift(t)).cos()
    }
}

pub fn early_time_model(spec: &SuperpositionSpec, b: &BathParams, c: &PhysicalConstants) -> EarlyTimeModel {
    let (gamma, d) = (b.gamma(), b.diffusion());
    let (l, k, s0) = (spec.separation(), spec.kick(), spec.sigma0());
    let h2 = c.hbar * c.hbar;
    EarlyTimeModel {
        prefactor: 0.5 * (-k * k * s0 * s0 / 2.0).exp(),
        linear_rate: d * l * l / h2,
        quadratic_rate: l * l * gamma * (gamma / (s0 * s0) + 4.0 * d / h2),
        taylor_quadratic_rate: l * l * gamma * (gamma / (s0 * s0) - 4.0 * d / h2),
        omega0: l * (k * gamma + c.mass * c.gravity / c.hbar),
        alpha: spec.alpha(),
    }
}
