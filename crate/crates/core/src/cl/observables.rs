//! Global observables of the damped state: characteristic function, modular
//! signal (closed form and quadrature), trace and ℓ1 coherence.

use super::density::{ClDensityMatrix, ClSnapshot};
use super::{cl_kinematics, cl_packet_state};
use crate::error::{Error, Result};
use crate::extended::{required_bits, trapezoid_gaussians};
use crate::model::{BathParams, Flagged, PhysicalConstants, SuperpositionSpec};
use crate::quadrature::{integrate, integrate_real, QuadOptions};
use crate::special::relaxation_fraction;
use crate::window::{overlap_window, WindowModel, DEFAULT_SUPPORT_FACTOR};
use num_complex::Complex64;
use std::cell::Cell;
use std::f64::consts::PI;

/// Above this integrand-to-result ratio (`ln 1e6`) double precision is abandoned.
pub const EXTENDED_SWITCH_LOG: f64 = 13.815_510_557_964_274;

/// Tails beyond `e^{-TAIL_LOG}` of the result are dropped from the domain.
const TAIL_LOG: f64 = 40.0;

/// Envelope (as a logarithm) and phase of a modular signal
/// `exp(log_envelope) cos(phase)`; kept apart so deep decay never underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularParts {
    pub log_envelope: f64,
    pub phase: f64,
}

impl ModularParts {
    pub fn envelope(&self) -> f64 {
        self.log_envelope.exp()
    }

    pub fn value(&self) -> f64 {
        self.envelope() * self.phase.cos()
    }
}

/// Closed-form damped modular signal:
/// envelope `½ exp[-D L² τ₄/ħ² - L² γ² τ²/(2σ0²) - k²σ0²/2]` and
/// phase `α - L (kγ + mg/ħ) τ`, where `τ₄ = (1 - e^{-4γt})/(4γ)`.
pub fn cl_modular_parts(spec: &SuperpositionSpec, b: &BathParams, c: &PhysicalConstants, t: f64) -> ModularParts {
    let (gamma, d) = (b.gamma(), b.diffusion());
    let (l, k, s0) = (spec.separation(), spec.kick(), spec.sigma0());
    let tau = t * relaxation_fraction(2.0 * gamma * t);
    let tau4 = t * relaxation_fraction(4.0 * gamma * t);
    let log_envelope = 0.5f64.ln()
        - d * l * l * tau4 / (c.hbar * c.hbar)
        - l * l * gamma * gamma * tau * tau / (2.0 * s0 * s0)
        - k * k * s0 * s0 / 2.0;
    let phase = spec.alpha() - l * (k * gamma + c.mass * c.gravity / c.hbar) * tau;
    ModularParts { log_envelope, phase }
}

/// Closed-form `⟨cos(p̂L/ħ)⟩`, flagged outside the damped non-overlap window.
pub fn cl_modular_closed(spec: &SuperpositionSpec, b: &BathParams, c: &PhysicalConstants, t: f64) -> Flagged<f64> {
    let value = cl_modular_parts(spec, b, c, t).value();
    match overlap_window(&WindowModel::CaldeiraLeggett(*b), spec, c, DEFAULT_SUPPORT_FACTOR) {
        Ok(w) if t <= w.t_max => Flagged::exact(value),
        Ok(w) => Flagged::approximate(
            value,
            format!(
                "t = {t} is past the non-overlap window t_max = {}; packet overlap {:e}",
                w.t_max,
                cl_overlap_diagnostic(spec, b, c, t)
            ),
        ),
        Err(e) => Flagged::approximate(value, e.to_string()),
    }
}

/// `exp(-d²/8w_t²)` with `d` the current distance between the packet centres.
pub fn cl_overlap_diagnostic(spec: &SuperpositionSpec, b: &BathParams, c: &PhysicalConstants, t: f64) -> f64 {
    let kin = cl_kinematics(b.gamma(), b.diffusion(), spec.sigma0(), c, t);
    let d = spec.separation() + c.hbar * spec.kick() * kin.tau / c.mass;
    (-d * d / (8.0 * kin.width * kin.width)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureMethod {
    /// Adaptive Gauss-Kronrod in double precision.
    Double,
    /// Trapezoid sum in extended precision.
    Extended { bits: usize },
}

/// A quadrature result `mantissa · e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledQuadrature {
    pub mantissa: Complex64,
    pub log_scale: f64,
    /// Error estimate in mantissa units.
    pub error: f64,
    pub method: QuadratureMethod,
    /// `ln(peak integrand / result)`: the cancellation the sum had to survive.
    pub log_amplification: f64,
}

impl ScaledQuadrature {
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }
}

/// `χ(r, t) = ∫ dR ρ(r, R, t)`.
pub fn characteristic_function(snap: &ClSnapshot, r: f64) -> Result<ScaledQuadrature> {
    characteristic_with(snap, r, 0)
}

fn characteristic_with(snap: &ClSnapshot, r: f64, extra_bits: usize) -> Result<ScaledQuadrature> {
    let w = snap.width;
    // Size of each piece's integral, used only to pick the scale, domain and
    // working precision; the value itself comes from the sum below.
    let sizes: Vec<f64> = (0..4)
        .map(|j| {
            let g = snap.gaussian_term(j, r);
            (g.c0 - g.c1 * g.c1 / (4.0 * g.c2)).re + (PI / -g.c2).sqrt().ln()
        })
        .collect();
    let shift = sizes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let peaks: Vec<f64> = (0..4).map(|j| snap.term_log_peak(j, r)).collect();

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut breaks = Vec::new();
    for j in 0..4 {
        let excess = peaks[j] - shift + TAIL_LOG;
        if excess <= 0.0 {
            continue;
        }
        let centre = snap.term_centre(j, r);
        let half = w * (2.0 * excess).sqrt();
        lo = lo.min(centre - half);
        hi = hi.max(centre + half);
        breaks.extend([centre - half, centre - w, centre, centre + w, centre + half]);
    }
    if !(lo < hi) {
        return Err(Error::numerical("characteristic_function", "empty integration domain"));
    }
    let log_amplification = peaks.iter().copied().fold(f64::NEG_INFINITY, f64::max) + ((hi - lo) / w).ln() - shift;

    if log_amplification < EXTENDED_SWITCH_LOG {
        breaks.retain(|x| *x > lo && *x < hi);
        breaks.extend([lo, hi]);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let opts = QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_intervals: 4000,
        };
        let mut mantissa = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        for pair in breaks.windows(2) {
            let q = integrate(|x| snap.scaled(r, x, shift), pair[0], pair[1], opts)?;
            mantissa += q.value;
            error += q.error;
        }
        return Ok(ScaledQuadrature {
            mantissa,
            log_scale: shift,
            error,
            method: QuadratureMethod::Double,
            log_amplification,
        });
    }

    // Trapezoid on a dyadic grid. Aliasing of piece j is suppressed by
    // exp(2π|Re b_j|/h - 2π²w²/h²) relative to its own integral.
    let widest = (0..4).map(|j| snap.terms[j].b_at(r).re.abs()).fold(0.0, f64::max);
    let mut h = 1.0;
    while 2.0 * PI * PI * w * w / (h * h) - 2.0 * PI * widest / h < TAIL_LOG + 5.0 {
        h /= 2.0;
    }
    let start = (lo / h).floor() * h;
    let n_steps = ((hi - start) / h).ceil() as usize;
    let bits = required_bits(log_amplification, n_steps) + extra_bits;
    let terms: Vec<_> = (0..4)
        .map(|j| {
            let mut g = snap.gaussian_term(j, r);
            g.c0 -= shift;
            g
        })
        .collect();
    let mantissa = trapezoid_gaussians(&terms, start, h, n_steps, bits)?;
    Ok(ScaledQuadrature {
        mantissa,
        log_scale: shift,
        error: mantissa.norm() * 1e-15 + (-TAIL_LOG).exp(),
        method: QuadratureMethod::Extended { bits },
        log_amplification,
    })
}

/// `⟨cos(p̂ℓ/ħ)⟩ = ∫ dx' [ρ(x' + ℓ, x') + ρ(x' - ℓ, x')] / 2` by numerical quadrature.
pub fn cl_modular_quadrature(
    spec: &SuperpositionSpec,
    b: &BathParams,
    c: &PhysicalConstants,
    t: f64,
    ell: f64,
) -> Result<ScaledQuadrature> {
    let snap = ClDensityMatrix::new(*spec, *b, *c).at(t);
    modular_from_snapshot(&snap, ell)
}

pub(crate) fn modular_from_snapshot(snap: &ClSnapshot, ell: f64) -> Result<ScaledQuadrature> {
    let plus = characteristic_function(snap, ell)?;
    let minus = characteristic_function(snap, -ell)?;
    let s = plus.log_scale.max(minus.log_scale);
    let wp = (plus.log_scale - s).exp();
    let wm = (minus.log_scale - s).exp();
    let method = match (plus.method, minus.method) {
        (QuadratureMethod::Extended { bits: a }, QuadratureMethod::Extended { bits: b }) => {
            QuadratureMethod::Extended { bits: a.max(b) }
        }
        (QuadratureMethod::Extended { bits }, _) | (_, QuadratureMethod::Extended { bits }) => {
            QuadratureMethod::Extended { bits }
        }
        _ => QuadratureMethod::Double,
    };
    Ok(ScaledQuadrature {
        mantissa: 0.5 * (plus.mantissa * wp + minus.mantissa * wm),
        log_scale: s,
        error: 0.5 * (plus.error * wp + minus.error * wm),
        method,
        log_amplification: plus.log_amplification.max(minus.log_amplification),
    })
}

/// `∫ ρ(0, R, t) dR`, the same integral as the `ℓ = 0` modular quadrature.
pub fn trace_check(spec: &SuperpositionSpec, b: &BathParams, c: &PhysicalConstants, t: f64) -> Result<f64> {
    Ok(cl_modular_quadrature(spec, b, c, t, 0.0)?.value().re)
}

/// Integration rectangle for [`l1_coherence`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceBounds {
    pub r_min: f64,
    pub r_max: f64,
    pub big_r_min: f64,
    pub big_r_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub value: f64,
    pub error: f64,
    pub bounds: CoherenceBounds,
}

/// Default rectangle: twelve widths around every piece in `R`, and
/// `|r| ≤ L + 12` coherence lengths.
pub fn coherence_bounds(spec: &SuperpositionSpec, b: &BathParams, c: &PhysicalConstants, t: f64) -> CoherenceBounds {
    let snap = ClDensityMatrix::new(*spec, *b, *c).at(t);
    let w = snap.width;
    let centres: Vec<f64> = (0..4).map(|j| snap.term_centre(j, 0.0)).collect();
    let lo = centres.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = centres.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // |ρ_1(r, ·)| peaks at exp(-κ r²).
    let p = &snap.terms[0];
    let kappa = -(p.a[2].re + p.b[1].re * p.b[1].re / (2.0 * w * w));
    let coherence = (1.0 / (2.0 * kappa)).sqrt();
    let reach = spec.separation() + c.hbar * spec.kick() * cl_packet_state(spec.left(), b, c, t).tau / c.mass;
    CoherenceBounds {
        r_min: -reach.abs() - 12.0 * coherence,
        r_max: reach.abs() + 12.0 * coherence,
        big_r_min: lo - 12.0 * w,
        big_r_max: hi + 12.0 * w,
    }
}

/// `C_ℓ1 = ∫dr ∫dR |ρ(r, R, t)|` with an error estimate.
pub fn l1_coherence(
    spec: &SuperpositionSpec,
    b: &BathParams,
    c: &PhysicalConstants,
    t: f64,
    bounds: Option<CoherenceBounds>,
) -> Result<CoherenceReport> {
    let bounds = bounds.unwrap_or_else(|| coherence_bounds(spec, b, c, t));
    let snap = ClDensityMatrix::new(*spec, *b, *c).at(t);
    let w = snap.width;
    let mut r_breaks = vec![bounds.r_min, bounds.r_max];
    let mut big_r_breaks = vec![bounds.big_r_min, bounds.big_r_max];
    for j in 0..4 {
        let centre = snap.term_centre(j, 0.0);
        big_r_breaks.extend([centre - 4.0 * w, centre, centre + 4.0 * w]);
    }
    let reach = 0.5 * (bounds.r_max - bounds.r_min);
    r_breaks.extend([0.0, -1.0, 1.0]);
    for sign in [1.0, -1.0] {
        let r_peak = sign * spec.separation();
        if r_peak.abs() < reach {
            r_breaks.extend([r_peak - 2.0, r_peak, r_peak + 2.0]);
        }
    }
    let clean = |v: &mut Vec<f64>, lo: f64, hi: f64| {
        v.retain(|x| *x >= lo && *x <= hi);
        v.sort_by(f64::total_cmp);
        v.dedup();
    };
    clean(&mut r_breaks, bounds.r_min, bounds.r_max);
    clean(&mut big_r_breaks, bounds.big_r_min, bounds.big_r_max);

    let inner_opts = QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_intervals: 2000,
    };
    let outer_opts = QuadOptions {
        abs_tol: 1e-11,
        rel_tol: 1e-9,
        max_intervals: 2000,
    };
    let worst_inner = Cell::new(0.0f64);
    let failure = Cell::new(None::<Error>);
    let inner = |r: f64| {
        let mut sum = 0.0;
        let mut err = 0.0;
        for pair in big_r_breaks.windows(2) {
            match integrate_real(|x| snap.value(r, x).norm(), pair[0], pair[1], inner_opts) {
                Ok((v, e)) => {
                    sum += v;
                    err += e;
                }
                Err(e) => failure.set(Some(e)),
            }
        }
        worst_inner.set(worst_inner.get().max(err));
        sum
    };
    let mut value = 0.0;
    let mut error = 0.0;
    for pair in r_breaks.windows(2) {
        let (v, e) = integrate_real(inner, pair[0], pair[1], outer_opts)?;
        value += v;
        error += e;
    }
    if let Some(e) = failure.take() {
        return Err(e);
    }
    error += worst_inner.get() * (bounds.r_max - bounds.r_min);
    Ok(CoherenceReport { value, error, bounds })
}
