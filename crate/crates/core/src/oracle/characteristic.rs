//! Characteristic function `χ(r, t) = ∫ dR ρ(r, R, t)` by direct quadrature,
//! and the translated momentum moment `⟨p̂ e^{ip̂ℓ/ħ}⟩ = (ħ/i) ∂χ/∂r`.

use crate::cl::{characteristic_function, ClDensityMatrix, ClSnapshot};
use crate::error::{Error, Result};
use crate::model::{PhysicalConstants, SuperpositionSpec};
use crate::quadrature::{integrate, QuadOptions};
use crate::schrodinger::{packet_log_amplitude, packet_state, superposition_norm};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Above this `ln(peak · span / |χ|)` the double-precision sum is not
/// trusted and the extended-precision trapezoid takes over.
const CANCELLATION_LIMIT: f64 = 13.8;

/// Half-width of the integration window around each piece, in widths.
const SUPPORT_WIDTHS: f64 = 15.0;

/// Where the density matrix comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    /// `ρ(r, R) = Ψ(R + r/2) Ψ*(R - r/2)` for the closed-form wavefunction.
    Schrodinger {
        spec: SuperpositionSpec,
        constants: PhysicalConstants,
    },
    CaldeiraLeggett(ClDensityMatrix),
}

/// A quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    pub error: f64,
}

/// `χ(r, t)` for one source at one time.
#[derive(Debug, Clone, Copy)]
pub struct CharacteristicFunction {
    source: Source,
    t: f64,
    snapshot: Option<ClSnapshot>,
}

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_intervals: 4000,
    }
}

fn integrate_pieces<F: Fn(f64) -> Complex64>(f: F, mut breaks: Vec<f64>) -> Result<OracleValue> {
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for pair in breaks.windows(2) {
        let q = integrate(&f, pair[0], pair[1], opts())?;
        value += q.value;
        error += q.error;
    }
    Ok(OracleValue { value, error })
}

impl CharacteristicFunction {
    pub fn new(source: Source, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::param("t", "time must be non-negative"));
        }
        let snapshot = match &source {
            Source::CaldeiraLeggett(m) => Some(m.at(t)),
            Source::Schrodinger { .. } => None,
        };
        Ok(Self { source, t, snapshot })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn eval(&self, r: f64) -> Result<OracleValue> {
        match (&self.source, &self.snapshot) {
            (Source::Schrodinger { spec, constants }, _) => self.pure(spec, constants, r, false),
            (Source::CaldeiraLeggett(_), Some(snap)) => damped(snap, r, false),
            _ => Err(Error::Internal("damped source without snapshot".into())),
        }
    }

    /// `∂χ/∂r` from the analytic `r`-derivative of the integrand.
    pub fn derivative(&self, r: f64) -> Result<OracleValue> {
        match (&self.source, &self.snapshot) {
            (Source::Schrodinger { spec, constants }, _) => self.pure(spec, constants, r, true),
            (Source::CaldeiraLeggett(_), Some(snap)) => damped(snap, r, true),
            _ => Err(Error::Internal("damped source without snapshot".into())),
        }
    }

    fn pure(&self, spec: &SuperpositionSpec, c: &PhysicalConstants, r: f64, derivative: bool) -> Result<OracleValue> {
        let t = self.t;
        let weight = superposition_norm(spec) * FRAC_1_SQRT_2;
        let phase = Complex64::from_polar(1.0, spec.alpha());
        let packets = [(*spec.left(), Complex64::new(1.0, 0.0)), (*spec.right(), phase)];
        // Ψ and Ψ' at x.
        let psi = |x: f64| -> (Complex64, Complex64) {
            let mut v = Complex64::new(0.0, 0.0);
            let mut dv = Complex64::new(0.0, 0.0);
            for (p, coeff) in &packets {
                let st = packet_state(p, c, t);
                let amp = coeff * packet_log_amplitude(p, c, x, t).exp();
                let dlog = -(x - st.x_t) / (2.0 * st.s_t * p.sigma0) + Complex64::i() * st.p_t / c.hbar;
                v += amp;
                dv += amp * dlog;
            }
            (weight * v, weight * dv)
        };
        let f = |big_r: f64| {
            let (a, da) = psi(big_r + r / 2.0);
            let (b, db) = psi(big_r - r / 2.0);
            if derivative {
                0.5 * (da * b.conj() - a * db.conj())
            } else {
                a * b.conj()
            }
        };
        let mut breaks = Vec::new();
        for (p, _) in &packets {
            let st = packet_state(p, c, t);
            for centre in [st.x_t - r / 2.0, st.x_t + r / 2.0] {
                let reach = SUPPORT_WIDTHS * st.sigma_t;
                breaks.extend([
                    centre - reach,
                    centre - st.sigma_t,
                    centre,
                    centre + st.sigma_t,
                    centre + reach,
                ]);
            }
        }
        integrate_pieces(f, breaks)
    }
}

/// Integrate over `x' = R - r/2`, i.e. `χ(r) = ∫ dx' ρ(x' + r, x')`.
fn damped(snap: &ClSnapshot, r: f64, derivative: bool) -> Result<OracleValue> {
    let w = snap.width;
    let peaks: Vec<f64> = (0..4).map(|j| snap.term_log_peak(j, r)).collect();
    let top = peaks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut breaks = Vec::new();
    for j in 0..4 {
        if peaks[j] < top - 60.0 {
            continue;
        }
        let centre = snap.term_centre(j, r) - r / 2.0;
        let reach = SUPPORT_WIDTHS * w;
        breaks.extend([centre - reach, centre - w, centre, centre + w, centre + reach]);
    }
    let span =
        breaks.iter().copied().fold(f64::NEG_INFINITY, f64::max) - breaks.iter().copied().fold(f64::INFINITY, f64::min);
    let q = if derivative {
        integrate_pieces(|x| snap.dr(r, x + r / 2.0) * (-top).exp(), breaks)?
    } else {
        integrate_pieces(|x| snap.scaled(r, x + r / 2.0, top), breaks)?
    };
    let scale = top.exp();
    let cancellation = (span / w).ln() - q.value.norm().max(1e-300).ln();
    if !derivative && cancellation > CANCELLATION_LIMIT {
        let s = characteristic_function(snap, r)?;
        return Ok(OracleValue {
            value: s.value(),
            error: s.error * s.log_scale.exp(),
        });
    }
    if derivative && cancellation > CANCELLATION_LIMIT + (1.0 + r.abs() / w).ln() + 2.0 {
        return Err(Error::numerical(
            "characteristic derivative",
            format!("integrand exceeds the result by e^{cancellation:.1}; double precision is insufficient"),
        ));
    }
    Ok(OracleValue {
        value: q.value * scale,
        error: q.error * scale,
    })
}

/// `⟨e^{ip̂ℓ/ħ}⟩ = χ(ℓ, t)`.
pub fn characteristic_modular(source: &Source, t: f64, ell: f64) -> Result<Complex64> {
    Ok(CharacteristicFunction::new(*source, t)?.eval(ell)?.value)
}

fn hbar_of(source: &Source) -> f64 {
    match source {
        Source::Schrodinger { constants, .. } => constants.hbar,
        Source::CaldeiraLeggett(m) => m.constants.hbar,
    }
}

/// `⟨p̂ e^{ip̂ℓ/ħ}⟩ = -iħ ∂χ/∂r` at `r = ℓ`, from the analytic derivative.
pub fn momentum_first_moment_translated(source: &Source, t: f64, ell: f64) -> Result<Complex64> {
    let d = CharacteristicFunction::new(*source, t)?.derivative(ell)?.value;
    Ok(-Complex64::i() * hbar_of(source) * d)
}

/// A derivative obtained by repeated step halving.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeEstimate {
    pub value: Complex64,
    /// Difference between the two finest extrapolated estimates.
    pub error: f64,
    pub steps: Vec<f64>,
    /// `|D(h) - D(h/2)| / |D(h/2) - D(h/4)|` at the coarsest levels; 4 for a
    /// second-order scheme.
    pub convergence_ratio: f64,
}

/// Richardson-extrapolated central differences of `f` at `x`, starting from
/// step `h0` and halving `levels - 1` times.
pub fn richardson_derivative<F>(f: F, x: f64, h0: f64, levels: usize) -> Result<DerivativeEstimate>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if levels < 3 || !(h0 > 0.0) {
        return Err(Error::param("levels", "need h0 > 0 and at least three levels"));
    }
    let steps: Vec<f64> = (0..levels).map(|i| h0 / f64::powi(2.0, i as i32)).collect();
    let mut central = Vec::with_capacity(levels);
    for &h in &steps {
        central.push((f(x + h)? - f(x - h)?) / (2.0 * h));
    }
    let extrapolated: Vec<Complex64> = central.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    // Pick the extrapolation where successive values agree best: finer steps
    // eventually lose to rounding.
    let mut best = 0;
    let mut best_gap = f64::INFINITY;
    for i in 0..extrapolated.len() - 1 {
        let gap = (extrapolated[i + 1] - extrapolated[i]).norm();
        if gap < best_gap {
            best_gap = gap;
            best = i + 1;
        }
    }
    let ratio = (central[0] - central[1]).norm() / (central[1] - central[2]).norm();
    let value = extrapolated[best];
    if !(best_gap <= 1e-4 * value.norm().max(1e-300)) {
        return Err(Error::numerical(
            "richardson_derivative",
            format!("estimates do not settle: closest pair differs by {best_gap:e}"),
        ));
    }
    Ok(DerivativeEstimate {
        value,
        error: best_gap,
        steps,
        convergence_ratio: ratio,
    })
}

/// The same moment from finite differences of `χ`; an independent route to
/// [`momentum_first_moment_translated`].
pub fn momentum_first_moment_richardson(
    source: &Source,
    t: f64,
    ell: f64,
    h0: f64,
) -> Result<(Complex64, DerivativeEstimate)> {
    let cf = CharacteristicFunction::new(*source, t)?;
    let est = richardson_derivative(|r| Ok(cf.eval(r)?.value), ell, h0, 6)?;
    Ok((-Complex64::i() * hbar_of(source) * est.value, est))
}
